//! Method-of-types combinatorics with exact rational compositions.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::info::CqSource;

/// Largest denominator accepted when rounding a float prior to a rational.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Rounding tolerance for float priors.
pub const RATIONAL_TOL: f64 = 1e-9;

/// Simplest continued-fraction convergent of `x` within [`RATIONAL_TOL`],
/// searching denominators up to [`MAX_DENOMINATOR`].
pub fn rationalize(x: f64) -> Option<Ratio<u64>> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = x;
    let mut best = Ratio::new(x.round() as u64, 1);
    for _ in 0..64 {
        let a = v.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1).and_then(|t| t.checked_add(p0));
        let q2 = a.checked_mul(q1).and_then(|t| t.checked_add(q0));
        let (Some(p2), Some(q2)) = (p2, q2) else {
            break;
        };
        if q2 > MAX_DENOMINATOR {
            break;
        }
        best = Ratio::new(p2, q2);
        if (p2 as f64 / q2 as f64 - x).abs() <= RATIONAL_TOL {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac <= 0.0 {
            break;
        }
        v = 1.0 / frac;
    }
    let err = (best.to_f64().unwrap_or(f64::NAN) - x).abs();
    (err <= RATIONAL_TOL).then_some(best)
}

/// Rounds every entry and requires the rationals to sum to exactly 1.
pub fn rationalize_distribution(p: &[f64]) -> Result<Vec<Ratio<u64>>> {
    let mut out = Vec::with_capacity(p.len());
    for (x, &v) in p.iter().enumerate() {
        out.push(rationalize(v).ok_or_else(|| {
            Error::InvalidDistribution(format!(
                "p({x}) = {v} is not within {RATIONAL_TOL} of a fraction with denominator <= {MAX_DENOMINATOR}"
            ))
        })?);
    }
    let total = out.iter().fold(Ratio::zero(), |a, b| a + b);
    if total != Ratio::one() {
        return Err(Error::InvalidDistribution(format!(
            "rounded prior sums to {total}, not 1"
        )));
    }
    Ok(out)
}

/// The exact prior of a source: its rational prior when present, otherwise
/// the rounded float prior.
pub fn rational_prior(cq: &CqSource) -> Result<Vec<Ratio<u64>>> {
    match cq.rational_prior() {
        Some(r) => Ok(r.to_vec()),
        None => rationalize_distribution(cq.prior()),
    }
}

/// Letter counts `n·p(x)`, which must all be integers.
pub fn composition_counts(p: &[Ratio<u64>], n: usize) -> Result<Vec<usize>> {
    p.iter()
        .enumerate()
        .map(|(x, r)| {
            let c = r * Ratio::from_integer(n as u64);
            if c.is_integer() {
                Ok(c.to_integer() as usize)
            } else {
                Err(Error::NonIntegralComposition {
                    letter: x,
                    value: c.to_f64().unwrap_or(f64::NAN),
                })
            }
        })
        .collect()
}

/// Empirical distribution of a sequence over `0..alphabet`.
pub fn empirical_distribution(x: &[usize], alphabet: usize) -> Result<Vec<Ratio<u64>>> {
    if x.is_empty() {
        return Err(Error::Shape("empty sequence".into()));
    }
    let mut counts = vec![0u64; alphabet];
    for &a in x {
        if a >= alphabet {
            return Err(Error::OutOfRange(format!(
                "symbol {a} outside alphabet of size {alphabet}"
            )));
        }
        counts[a] += 1;
    }
    let n = x.len() as u64;
    Ok(counts.into_iter().map(|c| Ratio::new(c, n)).collect())
}

/// `|T_p^n| = n! / Π (n p(x))!`.
pub fn type_class_size(p: &[Ratio<u64>], n: usize) -> Result<BigUint> {
    let counts = composition_counts(p, n)?;
    Ok(multinomial(&counts))
}

pub(crate) fn multinomial(counts: &[usize]) -> BigUint {
    let mut out = BigUint::one();
    let mut total = 0u64;
    for &c in counts {
        for k in 1..=c as u64 {
            total += 1;
            out *= total;
            out /= k;
        }
    }
    out
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln |T_p^n|` without big-integer arithmetic.
pub(crate) fn ln_multinomial(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    ln_factorial(n) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
}

/// `p^{⊗n}(T_p^n)` and the Stirling bracket
/// `e^{-ξ k/(12 ln 2)} (2πn)^{-(k-1)/2} Π_x p(x)^{-1/2}` at `ξ = 1` (lo) and `ξ = 0` (hi),
/// `k = |supp p|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeClassProbability {
    pub exact: f64,
    pub ln_exact: f64,
    pub stirling_lo: f64,
    pub stirling_hi: f64,
}

pub fn type_class_probability(p: &[Ratio<u64>], n: usize) -> Result<TypeClassProbability> {
    let counts = composition_counts(p, n)?;
    let pf: Vec<f64> = p.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
    let ln_size = ln_multinomial(&counts);
    let ln_prod: f64 = counts
        .iter()
        .zip(&pf)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &q)| c as f64 * q.ln())
        .sum();
    let ln_exact = ln_size + ln_prod;
    let support: Vec<f64> = pf.iter().copied().filter(|&q| q > 0.0).collect();
    let k = support.len() as f64;
    let ln_hi = -(k - 1.0) / 2.0 * (2.0 * std::f64::consts::PI * n as f64).ln()
        - 0.5 * support.iter().map(|q| q.ln()).sum::<f64>();
    let ln_lo = ln_hi - k / (12.0 * std::f64::consts::LN_2);
    Ok(TypeClassProbability {
        exact: ln_exact.exp(),
        ln_exact,
        stirling_lo: ln_lo.exp(),
        stirling_hi: ln_hi.exp(),
    })
}

/// The constant
/// `K_p = k/(12 ln 2) + (k-1)/2 ln(2π) + ½ Σ_x ln p(x) + ln 4` (sum over the support).
pub fn k_p(p: &[f64]) -> f64 {
    let support: Vec<f64> = p.iter().copied().filter(|&q| q > 0.0).collect();
    let k = support.len() as f64;
    k / (12.0 * std::f64::consts::LN_2)
        + (k - 1.0) / 2.0 * (2.0 * std::f64::consts::PI).ln()
        + 0.5 * support.iter().map(|q| q.ln()).sum::<f64>()
        + 4f64.ln()
}

/// All sequences with the given letter counts, in lexicographic order.
pub fn type_class_members(counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for a in 0..counts.len() {
            if counts[a] > 0 {
                counts[a] -= 1;
                prefix.push(a);
                rec(counts, left - 1, prefix, out);
                prefix.pop();
                counts[a] += 1;
            }
        }
    }
    let n = counts.iter().sum();
    let mut c = counts.to_vec();
    let mut out = Vec::new();
    rec(&mut c, n, &mut Vec::with_capacity(n), &mut out);
    out
}
