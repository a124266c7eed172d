//! Quantum divergences: Petz–Rényi, sandwiched Rényi, Umegaki relative
//! entropy and the relative-entropy variance.
//!
//! All logarithms are natural. A violated support condition yields `+∞`
//! (recorded in [`DivergenceValue::support_violated`]) rather than an error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{psd_spectrum, DensityOperator, HermitianMatrix, Spectrum};

/// Weight of `ρ` outside `supp(σ)` above which `supp(ρ) ⊄ supp(σ)`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    Petz,
    Sandwiched,
    Umegaki,
    Variance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceValue {
    pub value: f64,
    /// Order of the divergence; 1 for the Umegaki quantities.
    pub alpha: f64,
    pub kind: DivergenceKind,
    pub support_violated: bool,
}

impl DivergenceValue {
    fn finite(value: f64, alpha: f64, kind: DivergenceKind) -> Self {
        Self {
            value,
            alpha,
            kind,
            support_violated: false,
        }
    }

    fn infinite(alpha: f64, kind: DivergenceKind) -> Self {
        Self {
            value: f64::INFINITY,
            alpha,
            kind,
            support_violated: true,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() || alpha == 1.0 {
        return Err(Error::OutOfRange(format!(
            "Renyi order must lie in (0, inf) \\ {{1}}, got {alpha}"
        )));
    }
    Ok(())
}

fn check_dims(rho: &DensityOperator, sigma: &HermitianMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(())
}

/// `Tr[ρ (1 - P_σ)]`: mass of `ρ` outside the support of `σ`.
pub(crate) fn support_leak(rho: &DensityOperator, sigma: &Spectrum) -> f64 {
    let cut = sigma.support_cutoff();
    let m = rho.matrix().as_matrix();
    let n = m.dim();
    let u = &sigma.vectors;
    let mut inside = 0.0;
    for (k, &l) in sigma.values.iter().enumerate() {
        if l <= cut {
            continue;
        }
        // <u_k| ρ |u_k>
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..n {
            let ui = u[(i, k)].conj();
            for j in 0..n {
                acc += ui * m[(i, j)] * u[(j, k)];
            }
        }
        inside += acc.re;
    }
    (rho.matrix().trace() - inside).max(0.0)
}

/// `Tr[P_ρ P_σ]`: zero exactly when the supports are orthogonal.
fn support_overlap(rho: &Spectrum, sigma: &Spectrum) -> f64 {
    let pr = rho.support_projector();
    let ps = sigma.support_projector();
    pr.as_matrix().trace_product(ps.as_matrix()).re
}

fn orthogonal_supports(rho: &DensityOperator, sigma: &Spectrum) -> bool {
    support_overlap(rho.spectrum(), sigma) <= SUPPORT_LEAK_TOL
}

/// `Tr[ρ^α σ^{1-α}]` with support-restricted powers.
pub(crate) fn petz_trace(rho: &DensityOperator, sigma: &Spectrum, alpha: f64) -> f64 {
    let a = rho.power(alpha);
    let b = sigma.power(1.0 - alpha);
    a.as_matrix().trace_product(b.as_matrix()).re
}

/// `Tr[(σ^γ ρ σ^γ)^α]` with `γ = (1-α)/(2α)`.
pub(crate) fn sandwiched_trace(rho: &DensityOperator, sigma: &Spectrum, alpha: f64) -> f64 {
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let s = sigma.power(gamma);
    let inner = s.sandwich(rho.matrix());
    inner
        .eigenvalues()
        .iter()
        .map(|&l| if l > 0.0 { l.powf(alpha) } else { 0.0 })
        .sum()
}

fn renyi(rho: &DensityOperator, sigma: &HermitianMatrix, alpha: f64, kind: DivergenceKind) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    check_dims(rho, sigma)?;
    let spec = psd_spectrum(sigma)?;
    if alpha > 1.0 {
        if support_leak(rho, &spec) > SUPPORT_LEAK_TOL {
            return Ok(DivergenceValue::infinite(alpha, kind));
        }
    } else if orthogonal_supports(rho, &spec) {
        return Ok(DivergenceValue::infinite(alpha, kind));
    }
    let q = match kind {
        DivergenceKind::Petz => petz_trace(rho, &spec, alpha),
        _ => sandwiched_trace(rho, &spec, alpha),
    };
    if !(q > 0.0) {
        return Ok(DivergenceValue::infinite(alpha, kind));
    }
    Ok(DivergenceValue::finite(q.ln() / (alpha - 1.0), alpha, kind))
}

/// Petz–Rényi divergence `1/(α-1) ln Tr[ρ^α σ^{1-α}]`.
pub fn petz_renyi(rho: &DensityOperator, sigma: &HermitianMatrix, alpha: f64) -> Result<DivergenceValue> {
    renyi(rho, sigma, alpha, DivergenceKind::Petz)
}

/// Sandwiched Rényi divergence `1/(α-1) ln Tr[(σ^γ ρ σ^γ)^α]`, `γ = (1-α)/2α`.
pub fn sandwiched_renyi(rho: &DensityOperator, sigma: &HermitianMatrix, alpha: f64) -> Result<DivergenceValue> {
    renyi(rho, sigma, alpha, DivergenceKind::Sandwiched)
}

/// Tr[ρ ln ρ] from the spectrum.
pub(crate) fn neg_entropy(rho: &DensityOperator) -> f64 {
    let spec = rho.spectrum();
    let cut = spec.support_cutoff();
    spec.values.iter().filter(|&&l| l > cut).map(|&l| l * l.ln()).sum()
}

/// Von Neumann entropy in nats.
pub fn entropy(rho: &DensityOperator) -> f64 {
    -neg_entropy(rho)
}

/// Umegaki relative entropy `Tr[ρ(ln ρ - ln σ)]`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &HermitianMatrix) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let spec = psd_spectrum(sigma)?;
    if support_leak(rho, &spec) > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite(1.0, DivergenceKind::Umegaki));
    }
    let cross = rho.matrix().as_matrix().trace_product(spec.log().as_matrix()).re;
    Ok(DivergenceValue::finite(
        neg_entropy(rho) - cross,
        1.0,
        DivergenceKind::Umegaki,
    ))
}

/// Relative-entropy variance `Tr[ρ(ln ρ - ln σ)²] - D(ρ‖σ)²`.
pub fn relative_entropy_variance(rho: &DensityOperator, sigma: &HermitianMatrix) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let spec = psd_spectrum(sigma)?;
    if support_leak(rho, &spec) > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite(1.0, DivergenceKind::Variance));
    }
    let (d, second) = log_ratio_moments(rho, &spec);
    let v = second - d * d;
    // Cancellation noise can push an exact zero slightly negative.
    let v = if v < 0.0 && v > -1e-10 { 0.0 } else { v };
    Ok(DivergenceValue::finite(v, 1.0, DivergenceKind::Variance))
}

/// First and second moments of the log-likelihood ratio operator
/// `L = ln ρ - ln σ` under `ρ`: `(Tr[ρL], Tr[ρL²])`.
pub(crate) fn log_ratio_moments(rho: &DensityOperator, sigma: &Spectrum) -> (f64, f64) {
    let l = rho.log().sub(&sigma.log());
    let rl = rho.matrix().as_matrix().matmul(l.as_matrix());
    let first = rl.trace().re;
    let second = rl.trace_product(l.as_matrix()).re;
    (first, second)
}
