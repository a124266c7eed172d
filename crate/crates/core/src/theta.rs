//! Operator-valued functions on finite probability spaces and the centred
//! sample-mean map `Θ(f) = (1/M) Σ_i π_i(f) − E(f)` on the `M`-fold product.
//!
//! Norms on product spaces are computed by exhaustive enumeration, point by
//! point, so the `|Ω|^M` values never need to be stored at once.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{eigvalsh, norm_of_values, HermitianMatrix};
use crate::random::{random_hermitian, random_probability};

/// Largest product space enumerated.
pub const MAX_PRODUCT_POINTS: f64 = 1e6;

const WEIGHT_TOL: f64 = 1e-12;

/// `ω ↦ f(ω)` with weights `μ(ω)`.
#[derive(Clone, Debug)]
pub struct OperatorField {
    weights: Vec<f64>,
    values: Vec<HermitianMatrix>,
}

impl OperatorField {
    pub fn new(weights: Vec<f64>, values: Vec<HermitianMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} weights for {} values",
                weights.len(),
                values.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidDistribution(format!("weights {weights:?}")));
        }
        let d = values[0].dim();
        if let Some(v) = values.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch(d, v.dim()));
        }
        Ok(Self { weights, values })
    }

    /// `f ≡ A` on a one-point space.
    pub fn constant(a: HermitianMatrix) -> Self {
        Self {
            weights: vec![1.0],
            values: vec![a],
        }
    }

    /// Scalar `±1` with probability `1/2` each.
    pub fn rademacher() -> Self {
        Self {
            weights: vec![0.5, 0.5],
            values: vec![
                HermitianMatrix::from_real_diagonal(&[1.0]),
                HermitianMatrix::from_real_diagonal(&[-1.0]),
            ],
        }
    }

    pub fn points(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[HermitianMatrix] {
        &self.values
    }

    /// `E_μ f`.
    pub fn mean(&self) -> HermitianMatrix {
        self.weights
            .iter()
            .zip(&self.values)
            .fold(HermitianMatrix::zeros(self.dim()), |acc, (w, v)| acc.add(&v.scale(*w)))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::OutOfRange(format!("p must be >= 1, got {p}")));
    }
    Ok(())
}

/// `‖A‖_p^p` for Hermitian `A`.
fn schatten_pow(a: &HermitianMatrix, p: f64) -> f64 {
    let s: Vec<f64> = eigvalsh(a).into_iter().map(f64::abs).collect();
    norm_of_values(&s, p).powf(p)
}

/// `(Σ_ω μ(ω) ‖f(ω)‖_p^p)^{1/p}`.
pub fn lp_norm(f: &OperatorField, p: f64) -> Result<f64> {
    check_p(p)?;
    let s: f64 = f
        .weights
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * schatten_pow(v, p))
        .sum();
    Ok(s.powf(1.0 / p))
}

fn product_size(points: usize, m: usize) -> Result<usize> {
    let size = (points as f64).powi(m as i32);
    if m == 0 {
        return Err(Error::OutOfRange("M must be >= 1".into()));
    }
    if size > MAX_PRODUCT_POINTS {
        return Err(Error::TooLarge(format!(
            "product space has {points}^{m} = {size:e} points, above {MAX_PRODUCT_POINTS:e}"
        )));
    }
    Ok(size as usize)
}

/// Coordinates of product-space point `k`; coordinate `i` is digit `i` base `|Ω|`.
fn coordinates(mut k: usize, points: usize, m: usize) -> Vec<usize> {
    (0..m)
        .map(|_| {
            let c = k % points;
            k /= points;
            c
        })
        .collect()
}

fn product_weight(f: &OperatorField, coords: &[usize]) -> f64 {
    coords.iter().map(|&c| f.weights[c]).product()
}

fn theta_value(f: &OperatorField, mean: &HermitianMatrix, coords: &[usize]) -> HermitianMatrix {
    let m = coords.len() as f64;
    coords
        .iter()
        .fold(HermitianMatrix::zeros(f.dim()), |acc, &c| acc.add(&f.values[c]))
        .scale(1.0 / m)
        .sub(mean)
}

/// `Θ(f)` on `Ω^M` with product weights.
pub fn theta_apply(f: &OperatorField, m: usize) -> Result<OperatorField> {
    let size = product_size(f.points(), m)?;
    let mean = f.mean();
    let (weights, values) = (0..size)
        .map(|k| {
            let c = coordinates(k, f.points(), m);
            (product_weight(f, &c), theta_value(f, &mean, &c))
        })
        .unzip();
    Ok(OperatorField { weights, values })
}

/// `π_i(f)`: the field on `Ω^M` that reads coordinate `i` (0-based).
pub fn embedding(f: &OperatorField, m: usize, i: usize) -> Result<OperatorField> {
    if i >= m {
        return Err(Error::OutOfRange(format!("coordinate {i} of an {m}-fold product")));
    }
    let size = product_size(f.points(), m)?;
    let (weights, values) = (0..size)
        .map(|k| {
            let c = coordinates(k, f.points(), m);
            (product_weight(f, &c), f.values[c[i]].clone())
        })
        .unzip();
    Ok(OperatorField { weights, values })
}

/// `E(f)` as a constant field on the same space.
pub fn expectation_field(f: &OperatorField) -> OperatorField {
    let mean = f.mean();
    OperatorField {
        weights: f.weights.clone(),
        values: vec![mean; f.points()],
    }
}

/// `⟨f̂_i, f̂_j⟩ = Σ μ^{⊗M} Tr[f̂_i f̂_j]` with `f̂_i = π_i(f) − E f`.
pub fn centered_inner_product(f: &OperatorField, m: usize, i: usize, j: usize) -> Result<Complex64> {
    if i >= m || j >= m {
        return Err(Error::OutOfRange(format!(
            "coordinates {i}, {j} of an {m}-fold product"
        )));
    }
    let size = product_size(f.points(), m)?;
    let mean = f.mean();
    let centered: Vec<HermitianMatrix> = f.values.iter().map(|v| v.sub(&mean)).collect();
    Ok((0..size)
        .map(|k| {
            let c = coordinates(k, f.points(), m);
            let w = product_weight(f, &c);
            centered[c[i]].as_matrix().trace_product(centered[c[j]].as_matrix()) * w
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `‖Θ(f)‖_p` on `Ω^M` with `2^{2/p-1} M^{(1-p)/p} ‖f‖_p`.
pub fn verify_theta_bound(f: &OperatorField, m: usize, p: f64) -> Result<ThetaCheck> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p must lie in [1, 2], got {p}")));
    }
    let size = product_size(f.points(), m)?;
    let mean = f.mean();
    let terms: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|k| {
            let c = coordinates(k, f.points(), m);
            product_weight(f, &c) * schatten_pow(&theta_value(f, &mean, &c), p)
        })
        .collect();
    let lhs = terms.iter().sum::<f64>().powf(1.0 / p);
    let rhs = 2f64.powf(2.0 / p - 1.0) * (m as f64).powf((1.0 - p) / p) * lp_norm(f, p)?;
    Ok(ThetaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

/// Field with `points` random Hermitian values of dimension `dim` and random weights.
pub fn random_field<R: Rng + ?Sized>(points: usize, dim: usize, rng: &mut R) -> OperatorField {
    OperatorField {
        weights: random_probability(points, rng),
        values: (0..points).map(|_| random_hermitian(dim, rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::schatten_norm;
    use crate::random::random_hermitian;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lp_norm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let a = random_hermitian(3, &mut rng);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let want = schatten_norm(a.as_matrix(), p).unwrap();
            assert!((lp_norm(&OperatorField::constant(a.clone()), p).unwrap() - want).abs() < 1e-12);
            assert!((lp_norm(&OperatorField::rademacher(), p).unwrap() - 1.0).abs() < 1e-15);
        }
        let f = random_field(3, 2, &mut rng);
        let mean_trace: f64 = f
            .weights()
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * schatten_norm(v.as_matrix(), 1.0).unwrap())
            .sum();
        assert!((lp_norm(&f, 1.0).unwrap() - mean_trace).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn theta_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let a = random_hermitian(2, &mut rng);
        let c = OperatorField::new(vec![0.3, 0.7], vec![a.clone(), a]).unwrap();
        let t = theta_apply(&c, 3).unwrap();
        assert!(t.values().iter().all(|v| v.as_matrix().max_abs() < 1e-15));

        let f = random_field(3, 2, &mut rng);
        let t = theta_apply(&f, 1).unwrap();
        let mean = f.mean();
        for (tv, fv) in t.values().iter().zip(f.values()) {
            assert!((tv.as_matrix() - fv.sub(&mean).as_matrix()).max_abs() < 1e-14);
        }
        let t = theta_apply(&f, 3).unwrap();
        assert_eq!(t.points(), 27);
        assert!((t.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(t.mean().as_matrix().max_abs() < 1e-12);
        assert!(matches!(
            theta_apply(&random_field(11, 1, &mut rng), 6),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn rademacher_is_tight_at_two() {
        for m in 1..=8 {
            let chk = verify_theta_bound(&OperatorField::rademacher(), m, 2.0).unwrap();
            let want = 1.0 / (m as f64).sqrt();
            assert!((chk.lhs - want).abs() < 1e-12 && (chk.rhs - want).abs() < 1e-12);
            assert!(chk.holds);
        }
        let chk = verify_theta_bound(&OperatorField::constant(HermitianMatrix::identity(2)), 4, 1.5).unwrap();
        assert!(chk.lhs == 0.0 && chk.holds);
        assert!(verify_theta_bound(&OperatorField::rademacher(), 2, 2.5).is_err());
    }

    #[test]
    fn proof_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..10 {
            let f = random_field(3, 2, &mut rng);
            for p in [1.0, 1.5, 2.0] {
                let norm = lp_norm(&f, p).unwrap();
                for i in 0..3 {
                    let e = lp_norm(&embedding(&f, 3, i).unwrap(), p).unwrap();
                    assert!((e - norm).abs() < 1e-12 * norm.max(1.0));
                }
                assert!(lp_norm(&expectation_field(&f), p).unwrap() <= norm + 1e-12);
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert!(centered_inner_product(&f, 3, i, j).unwrap().norm() < 1e-12);
            }
            assert!(centered_inner_product(&f, 3, 1, 1).unwrap().re > 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn bound_holds_on_random_fields(seed in any::<u64>(), points in 2usize..=3, dim in 1usize..=2,
                                        m in 2usize..=4, pi in 0usize..5) {
            let p = [1.0, 1.25, 1.5, 1.75, 2.0][pi];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_field(points, dim, &mut rng);
            let chk = verify_theta_bound(&f, m, p).unwrap();
            prop_assert!(chk.holds, "{chk:?}");
        }
    }
}
