//! Information quantities of classical-quantum sources.
//!
//! The Petz-type quantities have closed forms in the marginal `ρ_B`. The
//! sandwiched ones are infima over output states and go through the
//! minimizer in [`solver`]; [`oracle`] has independent cross-checks.

pub mod oracle;
pub mod solver;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::divergence::{log_ratio_moments, petz_renyi, petz_trace, relative_entropy};
use crate::error::{Error, Result};
use crate::hermitian::{DensityOperator, HermitianMatrix};

pub use oracle::{bloch_grid_oracle, classical_augustin, classical_sibson_closed_form};
pub use solver::{sandwiched_augustin_info, sandwiched_renyi_info, SolverConfig};

/// Tolerance on `Σ p(x) = 1` for floating priors.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// A classical-quantum source: prior `p` over a finite alphabet and a state
/// `ρ_x` for every letter.
#[derive(Clone, Debug)]
pub struct CqSource {
    prior: Vec<f64>,
    rational_prior: Option<Vec<Ratio<u64>>>,
    states: Vec<DensityOperator>,
    marginal: DensityOperator,
}

impl CqSource {
    pub fn new(prior: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if prior.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if prior.len() != states.len() {
            return Err(Error::Shape(format!(
                "{} prior entries for {} states",
                prior.len(),
                states.len()
            )));
        }
        if let Some((x, p)) = prior.iter().enumerate().find(|(_, p)| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("p({x}) = {p}")));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("prior sums to {total}")));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(d, s.dim()));
        }
        let mut acc = HermitianMatrix::zeros(d);
        for (p, s) in prior.iter().zip(&states) {
            if *p > 0.0 {
                acc = acc.add(&s.matrix().scale(*p));
            }
        }
        let marginal = DensityOperator::normalized(acc)?;
        Ok(Self {
            prior,
            rational_prior: None,
            states,
            marginal,
        })
    }

    /// Source with an exact rational prior (needed for constant-composition
    /// codebooks).
    pub fn with_rational_prior(prior: Vec<Ratio<u64>>, states: Vec<DensityOperator>) -> Result<Self> {
        let total = prior.iter().fold(Ratio::zero(), |a, b| a + b);
        if total != Ratio::from_integer(1) {
            return Err(Error::InvalidDistribution(format!("prior sums to {total}")));
        }
        let floats = prior.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        let mut src = Self::new(floats, states)?;
        src.rational_prior = Some(prior);
        Ok(src)
    }

    pub fn alphabet_size(&self) -> usize {
        self.prior.len()
    }

    pub fn dim(&self) -> usize {
        self.marginal.dim()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn rational_prior(&self) -> Option<&[Ratio<u64>]> {
        self.rational_prior.as_deref()
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn state(&self, x: usize) -> &DensityOperator {
        &self.states[x]
    }

    /// `ρ_B = Σ p(x) ρ_x`.
    pub fn marginal(&self) -> &DensityOperator {
        &self.marginal
    }

    /// Letters with positive prior weight, paired with their weight.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.prior.iter().copied().enumerate().filter(|(_, p)| *p > 0.0)
    }

    /// Largest pairwise commutator norm among the letter states.
    pub fn max_commutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.states.len() {
            for j in (i + 1)..self.states.len() {
                let a = self.states[i].matrix().as_matrix();
                let b = self.states[j].matrix().as_matrix();
                worst = worst.max(a.commutator_norm(b));
            }
        }
        worst
    }

    /// Product source on `X × Y` with letter `(x, y)` at index `x·|Y| + y`.
    pub fn tensor(&self, other: &CqSource) -> CqSource {
        let mut prior = Vec::with_capacity(self.prior.len() * other.prior.len());
        let mut states = Vec::with_capacity(prior.capacity());
        for (p, s) in self.prior.iter().zip(&self.states) {
            for (q, t) in other.prior.iter().zip(&other.states) {
                prior.push(p * q);
                states.push(s.kron(t));
            }
        }
        let rational = match (&self.rational_prior, &other.rational_prior) {
            (Some(a), Some(b)) => Some(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()),
            _ => None,
        };
        let total: f64 = prior.iter().sum();
        for p in prior.iter_mut() {
            *p /= total;
        }
        let mut src = CqSource::new(prior, states).expect("product of valid sources");
        src.rational_prior = rational;
        src
    }
}

/// Result of an information-quantity evaluation.
#[derive(Clone, Debug)]
pub struct InfoResult {
    pub value: f64,
    pub alpha: f64,
    /// Minimizing output state, for the optimizing quantities.
    pub optimizer: Option<DensityOperator>,
    pub iterations: usize,
    /// Certified bound on `value - infimum`; `+∞` when the solver failed.
    pub gap_estimate: f64,
    pub converged: bool,
}

impl InfoResult {
    fn closed_form(value: f64, alpha: f64) -> Self {
        Self {
            value,
            alpha,
            optimizer: None,
            iterations: 0,
            gap_estimate: 0.0,
            converged: true,
        }
    }
}

/// `I(X:B) = Σ p(x) D(ρ_x ‖ ρ_B)`.
pub fn mutual_information(cq: &CqSource) -> f64 {
    cq.support()
        .map(|(x, p)| {
            p * relative_entropy(cq.state(x), cq.marginal().matrix())
                .expect("dimensions checked")
                .value
        })
        .sum()
}

/// Mutual-information variance `V(X:B)` and its letter-averaged variant `V̆(X:B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variances {
    pub v: f64,
    pub v_breve: f64,
}

pub fn variances(cq: &CqSource) -> Variances {
    let spec = cq.marginal().spectrum();
    let mut first = 0.0;
    let mut second = 0.0;
    let mut breve = 0.0;
    for (x, p) in cq.support() {
        let (d, s) = log_ratio_moments(cq.state(x), spec);
        first += p * d;
        second += p * s;
        breve += p * (s - d * d);
    }
    let clean = |v: f64| if v < 0.0 && v > -1e-10 { 0.0 } else { v };
    Variances {
        v: clean(second - first * first),
        v_breve: clean(breve),
    }
}

fn check_petz_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
        return Err(Error::OutOfRange(format!(
            "Petz order must lie in (0, 2] \\ {{1}}, got {alpha}"
        )));
    }
    Ok(())
}

/// `I↓_α = 1/(α-1) ln Σ p(x) Tr[ρ_x^α ρ_B^{1-α}]`.
pub fn petz_down_renyi_info(cq: &CqSource, alpha: f64) -> Result<InfoResult> {
    check_petz_alpha(alpha)?;
    let spec = cq.marginal().spectrum();
    let s: f64 = cq
        .support()
        .map(|(x, p)| p * petz_trace(cq.state(x), spec, alpha))
        .sum();
    Ok(InfoResult::closed_form(s.ln() / (alpha - 1.0), alpha))
}

/// `Ĭ↓_α = Σ p(x) D_α(ρ_x ‖ ρ_B)`.
pub fn petz_down_augustin_info(cq: &CqSource, alpha: f64) -> Result<InfoResult> {
    check_petz_alpha(alpha)?;
    let mut v = 0.0;
    for (x, p) in cq.support() {
        v += p * petz_renyi(cq.state(x), cq.marginal().matrix(), alpha)?.value;
    }
    Ok(InfoResult::closed_form(v, alpha))
}

/// Named example sources used throughout tests, benches and the CLI.
pub mod models {
    use super::*;

    fn r(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    /// Uniform prior over `|0⟩⟨0|` and `|1⟩⟨1|`.
    pub fn orthogonal_binary() -> CqSource {
        CqSource::with_rational_prior(
            vec![r(1, 2), r(1, 2)],
            vec![
                DensityOperator::from_diagonal(&[1.0, 0.0]).unwrap(),
                DensityOperator::from_diagonal(&[0.0, 1.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// Uniform prior over `diag(1, 0)` and `diag(1/2, 1/2)`.
    pub fn model_a() -> CqSource {
        CqSource::with_rational_prior(
            vec![r(1, 2), r(1, 2)],
            vec![
                DensityOperator::from_diagonal(&[1.0, 0.0]).unwrap(),
                DensityOperator::from_diagonal(&[0.5, 0.5]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// Every letter mapped to the same state; uniform prior.
    pub fn all_equal(state: DensityOperator, letters: u64) -> CqSource {
        CqSource::with_rational_prior(vec![r(1, letters); letters as usize], vec![state; letters as usize]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::models::*;
    use super::*;
    use crate::random::{random_cq_source, random_density};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h2(p: &[f64]) -> f64 {
        -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
    }

    #[test]
    fn marginals() {
        let m = model_a().marginal().matrix().as_matrix().diagonal();
        assert!((m[0].re - 0.75).abs() < 1e-15 && (m[1].re - 0.25).abs() < 1e-15);
        let m = orthogonal_binary().marginal().matrix().as_matrix().diagonal();
        assert!((m[0].re - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(2, 2, &mut rng);
        let single = CqSource::new(vec![1.0], vec![rho.clone()]).unwrap();
        assert!((single.marginal().matrix().as_matrix() - rho.matrix().as_matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        assert!((mutual_information(&orthogonal_binary()) - 2f64.ln()).abs() < 1e-14);
        let a = mutual_information(&model_a());
        let oracle = h2(&[0.75, 0.25]) - 0.5 * h2(&[0.5, 0.5]);
        assert!((a - oracle).abs() < 1e-14);
        assert!((a - 0.215762).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eq = all_equal(random_density(3, 3, &mut rng), 3);
        assert!(mutual_information(&eq).abs() < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let v = variances(&orthogonal_binary());
        assert!(v.v.abs() < 1e-12 && v.v_breve.abs() < 1e-12);
        // Scalar oracle over the joint eigenvalues of model A.
        let joint: [(f64, f64, f64); 3] = [(0.5, 1.0, 0.75), (0.5, 0.5, 0.75), (0.5, 0.5, 0.25)];
        let llr: Vec<(f64, f64)> = joint.iter().map(|&(p, w, q)| (p * w, (w / q).ln())).collect();
        let mean: f64 = llr.iter().map(|(w, l)| w * l).sum();
        let v_oracle: f64 = llr.iter().map(|(w, l)| w * l * l).sum::<f64>() - mean * mean;
        // Letter 0 has a constant log-likelihood ratio, so only letter 1 contributes.
        let d1 = 0.5 * (0.5f64 / 0.75).ln() + 0.5 * (0.5f64 / 0.25).ln();
        let v1 = 0.5 * (0.5f64 / 0.75).ln().powi(2) + 0.5 * 2f64.ln().powi(2) - d1 * d1;
        let vb_oracle = 0.5 * v1;
        let v = variances(&model_a());
        assert!((v.v - v_oracle).abs() < 1e-14);
        assert!((v.v_breve - vb_oracle).abs() < 1e-14);
        assert!((v.v - 0.156041).abs() < 1e-6);
        assert!((v.v_breve - 0.150869).abs() < 1e-6);
    }

    #[test]
    fn petz_examples() {
        let ob = orthogonal_binary();
        for a in [0.6, 0.75, 0.9, 1.5] {
            assert!((petz_down_renyi_info(&ob, a).unwrap().value - 2f64.ln()).abs() < 1e-13);
            assert!((petz_down_augustin_info(&ob, a).unwrap().value - 2f64.ln()).abs() < 1e-13);
        }
        let a = 0.75;
        let oracle = {
            let q = [0.75f64, 0.25];
            let s = 0.5 * q[0].powf(1.0 - a)
                + 0.5 * (0.5f64.powf(a) * q[0].powf(1.0 - a) + 0.5f64.powf(a) * q[1].powf(1.0 - a));
            s.ln() / (a - 1.0)
        };
        assert!((petz_down_renyi_info(&model_a(), a).unwrap().value - oracle).abs() < 1e-13);
        assert!(petz_down_renyi_info(&model_a(), 1.0).is_err());
        assert!(petz_down_renyi_info(&model_a(), 2.5).is_err());
    }

    #[test]
    fn petz_augustin_dominates_renyi_below_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let cq = random_cq_source(2, 3, &mut rng);
            for a in [0.55, 0.7, 0.9] {
                let r = petz_down_renyi_info(&cq, a).unwrap().value;
                let b = petz_down_augustin_info(&cq, a).unwrap().value;
                assert!(b >= r - 1e-10);
            }
        }
    }

    #[test]
    fn prior_validation() {
        let s = DensityOperator::maximally_mixed(2);
        assert!(CqSource::new(vec![0.5, 0.6], vec![s.clone(), s.clone()]).is_err());
        assert!(CqSource::new(vec![1.2, -0.2], vec![s.clone(), s.clone()]).is_err());
        assert!(CqSource::new(vec![1.0], vec![s.clone(), s.clone()]).is_err());
        let big = DensityOperator::maximally_mixed(3);
        assert!(matches!(
            CqSource::new(vec![0.5, 0.5], vec![s, big]),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn tensor_product_source() {
        let a = model_a();
        let aa = a.tensor(&a);
        assert_eq!(aa.alphabet_size(), 4);
        assert_eq!(aa.dim(), 4);
        assert!(aa.rational_prior().is_some());
        assert!((mutual_information(&aa) - 2.0 * mutual_information(&a)).abs() < 1e-12);
    }
}
