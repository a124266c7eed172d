//! Codebook-induced states and the expected trace distance
//! `E_C ½‖ρ^C − ρ_ref‖₁`, by exact enumeration or Monte Carlo.
//!
//! The trace distance of a codebook is unchanged when the same permutation is
//! applied to the positions of all codewords (it conjugates both states by a
//! tensor-factor swap, and both references are permutation invariant). A
//! codebook is therefore summarized by the multiset of its columns, i.e. the
//! `M`-tuples `(x_i(1), ..., x_i(M))` for `i = 1..n`. Exact enumeration sums
//! over column multisets with their multinomial weights, and Monte Carlo
//! evaluates each distinct multiset once.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::{canonical_sequence, cc_codeword, iid_codeword, Codebook, CodebookKind, LetterSampler};
use super::types::{composition_counts, ln_multinomial, rational_prior, type_class_members, type_class_size};
use crate::error::{Error, Result};
use crate::hermitian::{trace_norm, DensityOperator, HermitianMatrix};
use crate::info::CqSource;

/// Largest output dimension `d^n` for which induced states are formed.
pub const MAX_OUTPUT_DIM: usize = 4096;

/// Largest number of codebooks summed by exact enumeration.
pub const MAX_CODEBOOKS: f64 = 1e7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectationEstimate {
    pub mean: f64,
    /// 95% normal-approximation half width; 0 for exact values.
    pub half_width_95: f64,
    pub samples: u64,
    pub exact: bool,
}

/// `d^n`, or an error describing the memory an induced state would need.
pub fn output_dim(d: usize, n: usize) -> Result<usize> {
    let dim = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d));
    match dim {
        Some(v) if v <= MAX_OUTPUT_DIM => Ok(v),
        _ => {
            let log2 = n as f64 * (d as f64).log2();
            let mib = 2f64.powf(2.0 * log2) * 16.0 / (1024.0 * 1024.0);
            Err(Error::TooLarge(format!(
                "output dimension {d}^{n} exceeds {MAX_OUTPUT_DIM}; one induced state would need about {mib:.3e} MiB"
            )))
        }
    }
}

/// `ρ_{x_1} ⊗ ... ⊗ ρ_{x_n}`.
pub fn product_state(cq: &CqSource, word: &[usize]) -> HermitianMatrix {
    let mut acc = HermitianMatrix::identity(1);
    for &x in word {
        acc = acc.kron(cq.state(x).matrix());
    }
    acc
}

fn average_of_words<'a, I: Iterator<Item = &'a [usize]>>(
    cq: &CqSource,
    words: I,
    count: usize,
    dim: usize,
) -> HermitianMatrix {
    let mut acc = HermitianMatrix::zeros(dim);
    let mut cache: HashMap<&[usize], HermitianMatrix> = HashMap::new();
    for w in words {
        let term = cache.entry(w).or_insert_with(|| product_state(cq, w));
        acc = acc.add(term);
    }
    acc.scale(1.0 / count as f64)
}

/// `ρ^C = (1/M) Σ_m ρ_{x(m)}`.
pub fn induced_state(cb: &Codebook, cq: &CqSource) -> Result<DensityOperator> {
    let dim = output_dim(cq.dim(), cb.n)?;
    if cb.codewords.is_empty() {
        return Err(Error::Shape("empty codebook".into()));
    }
    for w in &cb.codewords {
        if w.len() != cb.n {
            return Err(Error::Shape(format!(
                "codeword of length {} in a length-{} codebook",
                w.len(),
                cb.n
            )));
        }
        if let Some(&a) = w.iter().find(|&&a| a >= cq.alphabet_size()) {
            return Err(Error::OutOfRange(format!("symbol {a} outside the alphabet")));
        }
    }
    let m = average_of_words(cq, cb.codewords.iter().map(|w| w.as_slice()), cb.codewords.len(), dim);
    DensityOperator::new(m)
}

/// `ρ_B^{⊗n}`.
pub fn iid_reference_state(cq: &CqSource, n: usize) -> Result<DensityOperator> {
    output_dim(cq.dim(), n)?;
    let mut acc = HermitianMatrix::identity(1);
    for _ in 0..n {
        acc = acc.kron(cq.marginal().matrix());
    }
    DensityOperator::new(acc)
}

/// `ρ̆_{B^n}`: the average of `ρ_{x^n}` over the type class of the prior.
pub fn cc_reference_state(cq: &CqSource, n: usize) -> Result<DensityOperator> {
    let dim = output_dim(cq.dim(), n)?;
    let p = rational_prior(cq)?;
    let size = type_class_size(&p, n)?;
    if size.to_f64().unwrap_or(f64::INFINITY) > MAX_CODEBOOKS {
        return Err(Error::TooLarge(format!("type class has {size} members")));
    }
    let counts = composition_counts(&p, n)?;
    let members = type_class_members(&counts);
    let m = average_of_words(cq, members.iter().map(|w| w.as_slice()), members.len(), dim);
    DensityOperator::new(m)
}

pub fn reference_state(cq: &CqSource, kind: CodebookKind, n: usize) -> Result<DensityOperator> {
    match kind {
        CodebookKind::Iid => iid_reference_state(cq, n),
        CodebookKind::ConstantComposition => cc_reference_state(cq, n),
    }
}

/// Trace distance of the codebook whose columns are `columns` (each an
/// `M`-tuple of letters) from `reference`.
fn columns_distance(cq: &CqSource, columns: &[Vec<usize>], m: usize, reference: &DensityOperator) -> f64 {
    let rows: Vec<Vec<usize>> = (0..m).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
    let dim = reference.dim();
    let induced = average_of_words(cq, rows.iter().map(|w| w.as_slice()), m, dim);
    0.5 * trace_norm(&induced.sub(reference.matrix()))
}

/// All `M`-tuples over the given letters, lexicographic.
fn column_types(letters: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(m)];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                letters.iter().map(move |&a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Multisets of `n` column types, as non-decreasing index lists, subject to
/// `admit(remaining, column)` which may veto a column given per-row budgets.
struct ClassEnumerator<'a> {
    types: &'a [Vec<usize>],
    budgets: Option<Vec<Vec<usize>>>,
    out: Vec<Vec<usize>>,
}

impl ClassEnumerator<'_> {
    fn run(&mut self, start: usize, left: usize, prefix: &mut Vec<usize>) {
        if left == 0 {
            self.out.push(prefix.clone());
            return;
        }
        for t in start..self.types.len() {
            if let Some(b) = &mut self.budgets {
                let col = &self.types[t];
                if col.iter().enumerate().any(|(row, &a)| b[row][a] == 0) {
                    continue;
                }
                for (row, &a) in col.iter().enumerate() {
                    b[row][a] -= 1;
                }
            }
            prefix.push(t);
            self.run(t, left - 1, prefix);
            prefix.pop();
            if let Some(b) = &mut self.budgets {
                for (row, &a) in self.types[t].iter().enumerate() {
                    b[row][a] += 1;
                }
            }
        }
    }
}

fn multiplicities(class: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < class.len() {
        let j = class[i..].iter().take_while(|&&t| t == class[i]).count();
        out.push(j);
        i += j;
    }
    out
}

/// Exact `E_C ½‖ρ^C − ρ_ref‖₁` over all codebooks of `M` codewords of length `n`:
/// i.i.d. codewords from `p^{⊗n}` with reference `ρ_B^{⊗n}`, or uniform
/// draws from the type class with reference `ρ̆_{B^n}`.
pub fn exact_expected_td(cq: &CqSource, kind: CodebookKind, n: usize, m: usize) -> Result<ExpectationEstimate> {
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange("n and M must be positive".into()));
    }
    output_dim(cq.dim(), n)?;
    let reference = reference_state(cq, kind, n)?;
    let letters: Vec<usize> = cq.support().map(|(x, _)| x).collect();
    let (count, budgets) = match kind {
        CodebookKind::Iid => ((cq.alphabet_size() as f64).powf((n * m) as f64), None),
        CodebookKind::ConstantComposition => {
            let p = rational_prior(cq)?;
            let size = type_class_size(&p, n)?.to_f64().unwrap_or(f64::INFINITY);
            let counts = composition_counts(&p, n)?;
            (size.powf(m as f64), Some(vec![counts; m]))
        }
    };
    if count > MAX_CODEBOOKS {
        return Err(Error::TooLarge(format!(
            "{count:.3e} codebooks exceed the exact-enumeration limit of {MAX_CODEBOOKS:e}; use the Monte Carlo estimator"
        )));
    }
    let types = column_types(&letters, m);
    let mut en = ClassEnumerator {
        types: &types,
        budgets,
        out: Vec::new(),
    };
    en.run(0, n, &mut Vec::with_capacity(n));
    let classes = en.out;

    let ln_weight = |class: &[usize]| -> f64 {
        let ln_arrangements = ln_multinomial(&multiplicities(class));
        match kind {
            CodebookKind::Iid => {
                let lp: f64 = class
                    .iter()
                    .map(|&t| types[t].iter().map(|&a| cq.prior()[a].ln()).sum::<f64>())
                    .sum();
                ln_arrangements + lp
            }
            CodebookKind::ConstantComposition => ln_arrangements - count.ln(),
        }
    };
    let terms: Vec<(f64, f64)> = classes
        .par_iter()
        .map(|class| {
            let cols: Vec<Vec<usize>> = class.iter().map(|&t| types[t].clone()).collect();
            (ln_weight(class).exp(), columns_distance(cq, &cols, m, &reference))
        })
        .collect();
    let mean = terms.iter().map(|(w, d)| w * d).sum();
    Ok(ExpectationEstimate {
        mean,
        half_width_95: 0.0,
        samples: count.round() as u64,
        exact: true,
    })
}

/// Monte Carlo estimate from `samples` independent codebooks; codebook `s`
/// is the `s`-th indexed draw for `seed`, so the result does not depend on
/// the number of worker threads.
pub fn mc_expected_td(
    cq: &CqSource,
    kind: CodebookKind,
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<ExpectationEstimate> {
    if samples < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 samples, got {samples}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange("n and M must be positive".into()));
    }
    output_dim(cq.dim(), n)?;
    let reference = reference_state(cq, kind, n)?;
    let sampler = LetterSampler::new(cq.prior());
    let canonical = match kind {
        CodebookKind::Iid => Vec::new(),
        CodebookKind::ConstantComposition => canonical_sequence(&composition_counts(&rational_prior(cq)?, n)?),
    };
    let keys: Vec<Vec<Vec<usize>>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let rows: Vec<Vec<usize>> = (0..m as u64)
                .map(|k| match kind {
                    CodebookKind::Iid => iid_codeword(&sampler, n, seed, s, k),
                    CodebookKind::ConstantComposition => cc_codeword(&canonical, seed, s, k),
                })
                .collect();
            let mut cols: Vec<Vec<usize>> = (0..n).map(|i| rows.iter().map(|w| w[i]).collect()).collect();
            cols.sort_unstable();
            cols
        })
        .collect();
    let mut distinct: Vec<&Vec<Vec<usize>>> = keys.iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let values: HashMap<&Vec<Vec<usize>>, f64> = distinct
        .par_iter()
        .map(|k| (*k, columns_distance(cq, k, m, &reference)))
        .collect();
    let xs: Vec<f64> = keys.iter().map(|k| values[k]).collect();
    let count = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / count;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
    Ok(ExpectationEstimate {
        mean,
        half_width_95: 1.96 * var.sqrt() / count.sqrt(),
        samples: samples as u64,
        exact: false,
    })
}

/// Expected trace distance, exactly when requested.
pub fn expected_td(
    cq: &CqSource,
    kind: CodebookKind,
    n: usize,
    m: usize,
    exact: bool,
    samples: usize,
    seed: u64,
) -> Result<ExpectationEstimate> {
    if exact {
        exact_expected_td(cq, kind, n, m)
    } else {
        mc_expected_td(cq, kind, n, m, samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::sample::{sample_cc_codebook, sample_iid_codebook};
    use crate::codebook::types::type_class_probability;
    use crate::hermitian::{eigvalsh, trace_distance};
    use crate::info::models::*;
    use crate::random::{random_density, random_qubit_source};
    use num_rational::Ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: every ordered tuple of codewords, lexicographic.
    fn brute_force(cq: &CqSource, kind: CodebookKind, n: usize, m: usize) -> f64 {
        let k = cq.alphabet_size();
        let words: Vec<(Vec<usize>, f64)> = match kind {
            CodebookKind::Iid => (0..k.pow(n as u32))
                .map(|mut idx| {
                    let mut w = vec![0; n];
                    for slot in w.iter_mut().rev() {
                        *slot = idx % k;
                        idx /= k;
                    }
                    let p = w.iter().map(|&a| cq.prior()[a]).product();
                    (w, p)
                })
                .collect(),
            CodebookKind::ConstantComposition => {
                let counts = composition_counts(&rational_prior(cq).unwrap(), n).unwrap();
                let members = type_class_members(&counts);
                let w = 1.0 / members.len() as f64;
                members.into_iter().map(|m| (m, w)).collect()
            }
        };
        let reference = reference_state(cq, kind, n).unwrap();
        let mut total = 0.0;
        let mut idx = vec![0usize; m];
        loop {
            let weight: f64 = idx.iter().map(|&i| words[i].1).product();
            if weight > 0.0 {
                let cb = Codebook {
                    codewords: idx.iter().map(|&i| words[i].0.clone()).collect(),
                    kind,
                    seed: 0,
                    n,
                    m,
                };
                let rho = induced_state(&cb, cq).unwrap();
                total += weight * trace_distance(&rho, &reference).unwrap();
            }
            let mut pos = m;
            loop {
                if pos == 0 {
                    return total;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < words.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    #[test]
    fn induced_state_examples() {
        let ob = orthogonal_binary();
        let cb = Codebook {
            codewords: vec![vec![0], vec![1]],
            kind: CodebookKind::Iid,
            seed: 0,
            n: 1,
            m: 2,
        };
        let rho = induced_state(&cb, &ob).unwrap();
        assert!((rho.matrix().as_matrix() - ob.marginal().matrix().as_matrix()).max_abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let s = random_density(2, 2, &mut rng);
        let eq = all_equal(s.clone(), 2);
        let cb = sample_iid_codebook(eq.prior(), 3, 4, 0).unwrap();
        let rho = induced_state(&cb, &eq).unwrap();
        let want = s.kron(&s).kron(&s);
        assert!((rho.matrix().as_matrix() - want.matrix().as_matrix()).max_abs() < 1e-14);

        let cb = sample_iid_codebook(model_a().prior(), 2, 1, 5).unwrap();
        let rho = induced_state(&cb, &model_a()).unwrap();
        let w = &cb.codewords[0];
        let want = product_state(&model_a(), w);
        assert!((rho.matrix().as_matrix() - want.as_matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn guards_reject_large_problems() {
        assert!(matches!(output_dim(2, 13), Err(Error::TooLarge(_))));
        assert_eq!(output_dim(2, 12).unwrap(), 4096);
        assert!(matches!(
            exact_expected_td(&orthogonal_binary(), CodebookKind::Iid, 8, 4),
            Err(Error::TooLarge(_))
        ));
        assert!(mc_expected_td(&orthogonal_binary(), CodebookKind::Iid, 1, 2, 1, 0).is_err());
    }

    #[test]
    fn exact_examples() {
        let ob = orthogonal_binary();
        let e = exact_expected_td(&ob, CodebookKind::Iid, 1, 1).unwrap();
        assert!(e.exact && e.half_width_95 == 0.0);
        assert!((e.mean - 0.5).abs() < 1e-15);
        let e = exact_expected_td(&ob, CodebookKind::Iid, 1, 2).unwrap();
        assert!((e.mean - 0.25).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let eq = all_equal(random_density(2, 2, &mut rng), 2);
        for kind in [CodebookKind::Iid, CodebookKind::ConstantComposition] {
            assert!(exact_expected_td(&eq, kind, 2, 2).unwrap().mean.abs() < 1e-12);
        }
    }

    #[test]
    fn class_enumeration_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let q = random_qubit_source(2, &mut rng);
        let cq = CqSource::with_rational_prior(vec![Ratio::new(1, 4), Ratio::new(3, 4)], q.states().to_vec()).unwrap();
        for (n, m) in [(1, 3), (2, 2), (3, 2), (4, 1), (4, 2)] {
            let fast = exact_expected_td(&cq, CodebookKind::Iid, n, m).unwrap().mean;
            let slow = brute_force(&cq, CodebookKind::Iid, n, m);
            assert!((fast - slow).abs() < 1e-12, "iid n={n} m={m}: {fast} vs {slow}");
        }
        for (n, m) in [(4, 1), (4, 2), (4, 3)] {
            let fast = exact_expected_td(&cq, CodebookKind::ConstantComposition, n, m)
                .unwrap()
                .mean;
            let slow = brute_force(&cq, CodebookKind::ConstantComposition, n, m);
            assert!((fast - slow).abs() < 1e-12, "cc n={n} m={m}: {fast} vs {slow}");
        }
    }

    #[test]
    fn monte_carlo_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let eq = all_equal(random_density(2, 2, &mut rng), 2);
        let e = mc_expected_td(&eq, CodebookKind::Iid, 2, 2, 100, 0).unwrap();
        assert!(e.mean.abs() < 1e-12 && e.half_width_95 < 1e-12);

        let ob = orthogonal_binary();
        for (n, m) in [(1, 1), (1, 2), (2, 3)] {
            let exact = exact_expected_td(&ob, CodebookKind::Iid, n, m).unwrap().mean;
            let mc = mc_expected_td(&ob, CodebookKind::Iid, n, m, 2000, 7).unwrap();
            assert!((mc.mean - exact).abs() <= 4.0 * mc.half_width_95, "{mc:?} vs {exact}");
        }
        let a = mc_expected_td(&ob, CodebookKind::Iid, 2, 3, 4000, 1).unwrap();
        let b = mc_expected_td(&ob, CodebookKind::Iid, 2, 3, 8000, 1).unwrap();
        let ratio = b.half_width_95 / a.half_width_95;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.2 * std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let cq = model_a();
        let a = mc_expected_td(&cq, CodebookKind::ConstantComposition, 4, 2, 300, 9).unwrap();
        let b = mc_expected_td(&cq, CodebookKind::ConstantComposition, 4, 2, 300, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cc_codebooks_average_to_the_cc_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let q = random_qubit_source(2, &mut rng);
        let cq = CqSource::with_rational_prior(vec![Ratio::new(1, 2); 2], q.states().to_vec()).unwrap();
        let n = 4;
        let members = type_class_members(&[2, 2]);
        let reference = cc_reference_state(&cq, n).unwrap();
        // All ordered pairs of type-class members.
        let mut acc = HermitianMatrix::zeros(16);
        for a in &members {
            for b in &members {
                let cb = Codebook {
                    codewords: vec![a.clone(), b.clone()],
                    kind: CodebookKind::ConstantComposition,
                    seed: 0,
                    n,
                    m: 2,
                };
                acc = acc.add(induced_state(&cb, &cq).unwrap().matrix());
            }
        }
        let avg = acc.scale(1.0 / 36.0);
        assert!((avg.as_matrix() - reference.matrix().as_matrix()).max_abs() < 1e-10);
        let _ = sample_cc_codebook(&[Ratio::new(1, 2); 2], n, 1, 0).unwrap();
    }

    #[test]
    fn cc_reference_is_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let q = random_qubit_source(2, &mut rng);
        let p = vec![Ratio::new(1, 4), Ratio::new(3, 4)];
        let cq = CqSource::with_rational_prior(p.clone(), q.states().to_vec()).unwrap();
        let n = 4;
        let ptype = type_class_probability(&p, n).unwrap().exact;
        let cc = cc_reference_state(&cq, n).unwrap();
        let iid = iid_reference_state(&cq, n).unwrap();
        let diff = iid.matrix().scale(1.0 / ptype).sub(cc.matrix());
        let min = *eigvalsh(&diff).last().unwrap();
        assert!(min >= -1e-10, "{min}");
    }
}
