//! Minimization over output states for the sandwiched information quantities.
//!
//! The infimum runs over states `σ` supported on `supp(ρ_B)`; outside that
//! subspace the objective only gets worse. After compressing every letter
//! state to the support (dimension `r`), `σ` is parameterized as
//! `exp(H) / Tr exp(H)` with `H` an unconstrained `r × r` Hermitian matrix and
//! the objective is minimized by BFGS with exact gradients (Daleckii–Krein
//! divided differences through both `σ ↦ σ^{(1-α)/α}` and `H ↦ exp(H)`).
//!
//! Termination uses the Frank–Wolfe duality gap of the convex objective in
//! `σ`: with `G` the Euclidean gradient, `Tr[Gσ] - λ_min(G)` bounds the
//! suboptimality, so [`InfoResult::gap_estimate`] is a certificate rather than
//! a heuristic (given convexity in `σ`, which holds for `α ∈ (1, 2]`).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CqSource, InfoResult};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, eigvalsh, DensityOperator, HermitianMatrix};
use crate::matrix::{CMatrix, ZERO};
use crate::random::random_hermitian;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Target duality gap in nats.
    pub tolerance: f64,
    pub max_iters: usize,
    /// Extra runs from random starting points; the best converged run wins.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iters: 5000,
            restarts: 0,
            seed: 0,
        }
    }
}

/// Which sandwiched quantity to minimize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SandwichedKind {
    /// `I*_α`: `1/(α-1) ln Σ p(x) Q_x(σ)`.
    Renyi,
    /// `Ĭ*_α`: `Σ p(x) 1/(α-1) ln Q_x(σ)`.
    Augustin,
}

/// `I*_α(X:B) = inf_σ D*_α(ρ_XB ‖ ρ_X ⊗ σ)` for `α ∈ (1, 2]`.
pub fn sandwiched_renyi_info(cq: &CqSource, alpha: f64, cfg: &SolverConfig) -> Result<InfoResult> {
    minimize(cq, alpha, SandwichedKind::Renyi, cfg)
}

/// `Ĭ*_α(X:B) = inf_σ Σ p(x) D*_α(ρ_x ‖ σ)` for `α ∈ (1, 2]`; the minimizer
/// is the order-α Augustin mean.
pub fn sandwiched_augustin_info(cq: &CqSource, alpha: f64, cfg: &SolverConfig) -> Result<InfoResult> {
    minimize(cq, alpha, SandwichedKind::Augustin, cfg)
}

pub fn sandwiched_info(cq: &CqSource, alpha: f64, kind: SandwichedKind, cfg: &SolverConfig) -> Result<InfoResult> {
    minimize(cq, alpha, kind, cfg)
}

pub(crate) fn check_sandwiched_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::OutOfRange(format!(
            "sandwiched order must lie in (1, 2], got {alpha}"
        )));
    }
    Ok(())
}

/// `B† M B` for an orthonormal column set `B` (given as columns).
fn compress(m: &CMatrix, basis: &[Vec<Complex64>]) -> CMatrix {
    let r = basis.len();
    let d = m.dim();
    let mut out = CMatrix::zeros(r);
    let mut mb = vec![ZERO; d];
    for (b, col_b) in basis.iter().enumerate() {
        for i in 0..d {
            mb[i] = (0..d).map(|j| m[(i, j)] * col_b[j]).sum();
        }
        for (a, col_a) in basis.iter().enumerate() {
            out[(a, b)] = (0..d).map(|i| col_a[i].conj() * mb[i]).sum();
        }
    }
    out
}

/// `B M B†`.
fn expand(m: &CMatrix, basis: &[Vec<Complex64>], d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d);
    for (a, col_a) in basis.iter().enumerate() {
        for (b, col_b) in basis.iter().enumerate() {
            let w = m[(a, b)];
            if w == ZERO {
                continue;
            }
            for i in 0..d {
                let wi = col_a[i] * w;
                for j in 0..d {
                    out[(i, j)] += wi * col_b[j].conj();
                }
            }
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in an orthonormal real basis
/// (diagonal entries, then `√2 Re`, `√2 Im` of the strict upper triangle).
fn herm_to_vec(h: &CMatrix) -> Vec<f64> {
    let r = h.dim();
    let mut v = Vec::with_capacity(r * r);
    for i in 0..r {
        v.push(h[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..r {
        for j in (i + 1)..r {
            v.push(s * h[(i, j)].re);
            v.push(s * h[(i, j)].im);
        }
    }
    v
}

fn vec_to_herm(v: &[f64], r: usize) -> HermitianMatrix {
    let mut h = CMatrix::zeros(r);
    for i in 0..r {
        h[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = r;
    for i in 0..r {
        for j in (i + 1)..r {
            let z = Complex64::new(v[k] * s, v[k + 1] * s);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermitianMatrix::from_hermitian_unchecked(h)
}

/// First divided difference of `λ ↦ λ^t`.
fn power_dd(a: f64, b: f64, t: f64) -> f64 {
    // b^{t-1} ((a/b)^t - 1) / (a/b - 1), without cancellation for close a, b.
    let (a, b) = if a > b { (b, a) } else { (a, b) };
    let u = (a - b) / b;
    if u == 0.0 {
        return t * b.powf(t - 1.0);
    }
    b.powf(t - 1.0) * (t * u.ln_1p()).exp_m1() / u
}

/// First divided difference of `μ ↦ exp(μ)/Z` given `s = exp(μ)/Z`.
fn exp_dd(mu_i: f64, mu_j: f64, s_i: f64, s_j: f64) -> f64 {
    let (dm, s) = if mu_i < mu_j {
        (mu_i - mu_j, s_j)
    } else {
        (mu_j - mu_i, s_i)
    };
    if dm == 0.0 {
        s
    } else {
        s * dm.exp_m1() / dm
    }
}

pub(crate) struct Objective {
    alpha: f64,
    kind: SandwichedKind,
    weights: Vec<f64>,
    /// `ρ_x^{1/2}` compressed to the support of `ρ_B`.
    sqrt_states: Vec<HermitianMatrix>,
    r: usize,
}

pub(crate) struct Evaluation {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Frank–Wolfe gap in value units.
    pub gap: f64,
    pub sigma: CMatrix,
}

impl Objective {
    fn new(cq: &CqSource, alpha: f64, kind: SandwichedKind) -> (Self, Vec<Vec<Complex64>>) {
        let basis = cq.marginal().spectrum().support_basis();
        let mut weights = Vec::new();
        let mut sqrt_states = Vec::new();
        for (x, p) in cq.support() {
            let reduced = HermitianMatrix::from_hermitian_unchecked(compress(cq.state(x).matrix().as_matrix(), &basis));
            let spec = eigh(&reduced);
            let cut = spec.support_cutoff();
            weights.push(p);
            sqrt_states.push(spec.map(|l| if l > cut { l.sqrt() } else { 0.0 }));
        }
        let r = basis.len();
        (
            Self {
                alpha,
                kind,
                weights,
                sqrt_states,
                r,
            },
            basis,
        )
    }

    fn eval(&self, params: &[f64]) -> Option<Evaluation> {
        let a = self.alpha;
        let t = (1.0 - a) / a;
        let r = self.r;
        let hspec = eigh(&vec_to_herm(params, r));
        let mu = &hspec.values;
        let u = &hspec.vectors;
        let top = mu.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let e: Vec<f64> = mu.iter().map(|&m| (m - top).exp()).collect();
        let z: f64 = e.iter().sum();
        let s: Vec<f64> = e.iter().map(|x| x / z).collect();
        if s.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let spow: Vec<f64> = s.iter().map(|&x| x.powf(t)).collect();
        let h_mat = diag_in_basis(u, &spow);

        let mut qs = Vec::with_capacity(self.weights.len());
        let mut ws = Vec::with_capacity(self.weights.len());
        for root in &self.sqrt_states {
            let inner = root.sandwich(&h_mat);
            let spec = eigh(&inner);
            let cut = spec.support_cutoff();
            let q: f64 = spec.values.iter().filter(|&&l| l > cut).map(|&l| l.powf(a)).sum();
            let pw = spec.map(|l| if l > cut { l.powf(a - 1.0) } else { 0.0 });
            ws.push(root.sandwich(&pw));
            qs.push(q);
        }

        let (value, coefs, g_total): (f64, Vec<f64>, f64) = match self.kind {
            SandwichedKind::Renyi => {
                let g: f64 = self.weights.iter().zip(&qs).map(|(w, q)| w * q).sum();
                let c = self.weights.iter().map(|w| w * a / (g * (a - 1.0))).collect();
                (g.ln() / (a - 1.0), c, g)
            }
            SandwichedKind::Augustin => {
                let v: f64 = self.weights.iter().zip(&qs).map(|(w, q)| w * q.ln() / (a - 1.0)).sum();
                let c = self
                    .weights
                    .iter()
                    .zip(&qs)
                    .map(|(w, q)| w * a / (q * (a - 1.0)))
                    .collect();
                (v, c, f64::NAN)
            }
        };
        if !value.is_finite() {
            return None;
        }

        let mut gw = CMatrix::zeros(r);
        for (c, w) in coefs.iter().zip(&ws) {
            gw.add_scaled(w.as_matrix(), *c);
        }
        // Euclidean gradient in σ, expressed in the eigenbasis of H (= of σ).
        let gw_t = u.adjoint().matmul(&gw).matmul(u);
        let mut g_t = CMatrix::zeros(r);
        for i in 0..r {
            for j in 0..r {
                g_t[(i, j)] = gw_t[(i, j)] * power_dd(s[i], s[j], t);
            }
        }
        let tr_g_sigma: f64 = (0..r).map(|i| g_t[(i, i)].re * s[i]).sum();
        let lmin = eigvalsh(&HermitianMatrix::from_hermitian_unchecked(g_t.clone()))
            .last()
            .copied()
            .unwrap_or(0.0);
        let raw_gap = (tr_g_sigma - lmin).max(0.0);
        let gap = match self.kind {
            SandwichedKind::Renyi => {
                // Convexity holds for g = Σ p Q_x; translate its gap to nats.
                let gap_g = g_total * (a - 1.0) * raw_gap;
                if gap_g >= g_total {
                    f64::INFINITY
                } else {
                    -(1.0 - gap_g / g_total).ln() / (a - 1.0)
                }
            }
            SandwichedKind::Augustin => raw_gap,
        };

        let mut gh_t = CMatrix::zeros(r);
        for i in 0..r {
            for j in 0..r {
                gh_t[(i, j)] = g_t[(i, j)] * exp_dd(mu[i], mu[j], s[i], s[j]);
            }
            gh_t[(i, i)] -= Complex64::new(tr_g_sigma * s[i], 0.0);
        }
        let gh = u.matmul(&gh_t).matmul(&u.adjoint());
        let grad = herm_to_vec(&gh);
        let sigma = diag_in_basis(u, &s).into_matrix();
        Some(Evaluation {
            value,
            grad,
            gap,
            sigma,
        })
    }
}

fn diag_in_basis(u: &CMatrix, d: &[f64]) -> HermitianMatrix {
    let n = u.dim();
    let mut out = CMatrix::zeros(n);
    for (k, &w) in d.iter().enumerate() {
        for i in 0..n {
            let a = u[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += a * u[(j, k)].conj();
            }
        }
    }
    HermitianMatrix::from_hermitian_unchecked(out)
}

struct RunOutcome {
    value: f64,
    gap: f64,
    sigma: CMatrix,
    iterations: usize,
    converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bfgs(obj: &Objective, x0: Vec<f64>, cfg: &SolverConfig) -> Option<RunOutcome> {
    let n = x0.len();
    let mut x = x0;
    let mut ev = obj.eval(&x)?;
    let identity = |n: usize| {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        m
    };
    let mut hinv = identity(n);
    let mut fresh = true;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        if ev.gap <= cfg.tolerance {
            break;
        }
        iterations += 1;
        let g = &ev.grad;
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], g)).collect();
        let mut slope = dot(&d, g);
        if !(slope < 0.0) {
            hinv = identity(n);
            fresh = true;
            d = g.iter().map(|v| -v).collect();
            slope = dot(&d, g);
        }
        if slope == 0.0 {
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            if let Some(e) = obj.eval(&trial) {
                // Near the optimum value differences drown in rounding; there,
                // a step that flattens the directional derivative still counts
                // as progress.
                // Both objectives divide a logarithm by α-1, which scales the
                // rounding noise of the value by the same factor.
                let noise = 4.0 * f64::EPSILON * (ev.value.abs().max(1.0) + 1.0 / (obj.alpha - 1.0));
                let flat = (e.value - ev.value).abs() <= noise;
                let moved = trial.iter().zip(&x).any(|(a, b)| a != b);
                if moved
                    && ((e.value < ev.value && e.value <= ev.value + 1e-4 * step * slope)
                        || (flat && dot(&e.grad, &d).abs() <= 0.9 * slope.abs()))
                {
                    accepted = Some((trial, e));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((x_new, ev_new)) = accepted else {
            if fresh {
                break;
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ev_new.grad.iter().zip(g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if fresh {
                let scale = sy / dot(&y, &y);
                for v in hinv.iter_mut() {
                    *v *= scale;
                }
                fresh = false;
            }
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        x = x_new;
        ev = ev_new;
    }
    Some(RunOutcome {
        value: ev.value,
        gap: ev.gap,
        sigma: ev.sigma,
        iterations,
        converged: ev.gap <= cfg.tolerance,
    })
}

fn minimize(cq: &CqSource, alpha: f64, kind: SandwichedKind, cfg: &SolverConfig) -> Result<InfoResult> {
    check_sandwiched_alpha(alpha)?;
    let (obj, basis) = Objective::new(cq, alpha, kind);
    let r = obj.r;
    let reduced_marginal =
        HermitianMatrix::from_hermitian_unchecked(compress(cq.marginal().matrix().as_matrix(), &basis));
    let h0 = eigh(&reduced_marginal).log();
    let mut starts = vec![herm_to_vec(h0.as_matrix())];
    for k in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1)));
        let perturb = random_hermitian(r, &mut rng);
        starts.push(herm_to_vec(h0.add(&perturb).as_matrix()));
    }

    let mut best: Option<RunOutcome> = None;
    let mut total_iters = 0;
    for x0 in starts {
        let Some(run) = bfgs(&obj, x0, cfg) else {
            continue;
        };
        total_iters += run.iterations;
        let better = match &best {
            None => true,
            Some(b) => (run.converged && !b.converged) || (run.converged == b.converged && run.value < b.value),
        };
        if better {
            best = Some(run);
        }
    }
    let best = best
        .ok_or_else(|| Error::NoConvergence(format!("objective not finite at any starting point (alpha = {alpha})")))?;
    let sigma = expand(&best.sigma, &basis, cq.dim());
    let optimizer = DensityOperator::normalized(HermitianMatrix::from_hermitian_unchecked(sigma)).ok();
    Ok(InfoResult {
        value: best.value,
        alpha,
        optimizer,
        iterations: total_iters,
        gap_estimate: if best.converged { best.gap } else { f64::INFINITY },
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::sandwiched_renyi;
    use crate::info::models::*;
    use crate::random::{random_cq_source, random_density};

    fn objective_at(cq: &CqSource, alpha: f64, kind: SandwichedKind, sigma: &DensityOperator) -> f64 {
        let terms = cq
            .support()
            .map(|(x, p)| (p, sandwiched_renyi(cq.state(x), sigma.matrix(), alpha).unwrap().value));
        match kind {
            SandwichedKind::Renyi => {
                let s: f64 = terms.map(|(p, d)| p * ((alpha - 1.0) * d).exp()).sum();
                s.ln() / (alpha - 1.0)
            }
            SandwichedKind::Augustin => terms.map(|(p, d)| p * d).sum(),
        }
    }

    /// Finite-difference check of the analytic gradient.
    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for kind in [SandwichedKind::Renyi, SandwichedKind::Augustin] {
            let cq = random_cq_source(3, 3, &mut rng);
            let (obj, _) = Objective::new(&cq, 1.6, kind);
            let x: Vec<f64> = herm_to_vec(random_hermitian(3, &mut rng).scale(0.3).as_matrix());
            let ev = obj.eval(&x).unwrap();
            let h = 1e-6;
            for k in 0..x.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let fd = (obj.eval(&xp).unwrap().value - obj.eval(&xm).unwrap().value) / (2.0 * h);
                assert!((fd - ev.grad[k]).abs() < 1e-7, "{kind:?} k={k}: {fd} vs {}", ev.grad[k]);
            }
        }
    }

    #[test]
    fn orthogonal_binary_gives_ln2() {
        let cfg = SolverConfig::default();
        for a in [1.25, 1.5, 2.0] {
            let r = sandwiched_renyi_info(&orthogonal_binary(), a, &cfg).unwrap();
            assert!(r.converged);
            assert!((r.value - 2f64.ln()).abs() < 1e-9, "{}", r.value);
            let b = sandwiched_augustin_info(&orthogonal_binary(), a, &cfg).unwrap();
            assert!((b.value - 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_letters_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let rho = random_density(3, 3, &mut rng);
        let cq = all_equal(rho.clone(), 2);
        let r = sandwiched_renyi_info(&cq, 1.5, &SolverConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-10);
        let sigma = r.optimizer.unwrap();
        assert!((sigma.matrix().as_matrix() - rho.matrix().as_matrix()).max_abs() < 1e-6);
    }

    #[test]
    fn rejects_alpha_outside_range() {
        let cfg = SolverConfig::default();
        assert!(sandwiched_renyi_info(&model_a(), 1.0, &cfg).is_err());
        assert!(sandwiched_renyi_info(&model_a(), 2.5, &cfg).is_err());
        assert!(sandwiched_augustin_info(&model_a(), 0.5, &cfg).is_err());
    }

    #[test]
    fn value_matches_objective_at_optimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfg = SolverConfig::default();
        for _ in 0..5 {
            let cq = random_cq_source(3, 3, &mut rng);
            for kind in [SandwichedKind::Renyi, SandwichedKind::Augustin] {
                let r = sandwiched_info(&cq, 1.7, kind, &cfg).unwrap();
                assert!(r.converged);
                let f = objective_at(&cq, 1.7, kind, r.optimizer.as_ref().unwrap());
                assert!((f - r.value).abs() < 1e-9, "{f} vs {}", r.value);
            }
        }
    }

    #[test]
    fn restarts_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..5 {
            let cq = random_cq_source(2, 3, &mut rng);
            for kind in [SandwichedKind::Renyi, SandwichedKind::Augustin] {
                let values: Vec<f64> = (0..3)
                    .map(|seed| {
                        let cfg = SolverConfig {
                            restarts: 1,
                            seed,
                            ..SolverConfig::default()
                        };
                        sandwiched_info(&cq, 1.5, kind, &cfg).unwrap().value
                    })
                    .collect();
                for v in &values {
                    assert!((v - values[0]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn random_starts_reach_the_same_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let cq = random_cq_source(3, 2, &mut rng);
        let cfg = SolverConfig::default();
        let (obj, _) = Objective::new(&cq, 1.8, SandwichedKind::Renyi);
        let mut values = Vec::new();
        for _ in 0..3 {
            let x0 = herm_to_vec(random_hermitian(3, &mut rng).as_matrix());
            let run = bfgs(&obj, x0, &cfg).unwrap();
            assert!(run.converged);
            values.push(run.value);
        }
        for v in &values {
            assert!((v - values[0]).abs() < 1e-7, "{values:?}");
        }
    }

    #[test]
    fn monotone_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let cfg = SolverConfig::default();
        for _ in 0..5 {
            let cq = random_cq_source(2, 3, &mut rng);
            for kind in [SandwichedKind::Renyi, SandwichedKind::Augustin] {
                let vals: Vec<f64> = [1.05, 1.25, 1.5, 1.75, 2.0]
                    .iter()
                    .map(|&a| sandwiched_info(&cq, a, kind, &cfg).unwrap().value)
                    .collect();
                for w in vals.windows(2) {
                    assert!(w[1] >= w[0] - 1e-9, "{vals:?}");
                }
            }
        }
    }
}
