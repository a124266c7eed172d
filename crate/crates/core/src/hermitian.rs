//! Hermitian linear algebra: eigendecomposition, functions of PSD matrices on
//! their support, Schatten norms, trace distance and the Helstrom test.
//!
//! The support of a PSD matrix is the span of eigenvectors whose eigenvalue
//! exceeds [`SUPPORT_RTOL`] times the largest eigenvalue. Every function that
//! maps eigenvalues (`powers`, `log`) sends the complement of the support to 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ZERO};

/// Relative eigenvalue threshold defining the support of a PSD matrix.
pub const SUPPORT_RTOL: f64 = 1e-14;

/// Elementwise Hermiticity tolerance (scaled by the largest entry when > 1).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Negative eigenvalues down to this value are treated as rounding noise.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity and symmetrizes away the residual.
    pub fn new(mut m: CMatrix) -> Result<Self> {
        let asym = m.max_asymmetry();
        if asym > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        m.hermitize();
        Ok(Self(m))
    }

    /// For matrices that are Hermitian by construction up to rounding.
    pub(crate) fn from_hermitian_unchecked(mut m: CMatrix) -> Self {
        m.hermitize();
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_real_diagonal(diag))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        Self(self.0.scale(s))
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(self.0.kron(&other.0))
    }

    /// `A B A` for Hermitian `A`, `B`; Hermitian by construction.
    pub fn sandwich(&self, inner: &HermitianMatrix) -> HermitianMatrix {
        Self::from_hermitian_unchecked(self.0.matmul(&inner.0).matmul(&self.0))
    }

    pub fn eigh(&self) -> Spectrum {
        eigh(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(self)
    }
}

/// Eigendecomposition `A = U diag(values) U†` with eigenvalues in descending
/// order; `vectors` holds the eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues at or below this are outside the support.
    pub fn support_cutoff(&self) -> f64 {
        let top = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        SUPPORT_RTOL * top
    }

    pub fn rank(&self) -> usize {
        let cut = self.support_cutoff();
        self.values.iter().filter(|&&v| v > cut).count()
    }

    /// Columns spanning the support.
    pub fn support_basis(&self) -> Vec<Vec<Complex64>> {
        let cut = self.support_cutoff();
        let n = self.dim();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > cut)
            .map(|(k, _)| (0..n).map(|i| self.vectors[(i, k)]).collect())
            .collect()
    }

    /// `U diag(f(λ)) U†`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let u = &self.vectors;
        let mut out = CMatrix::zeros(n);
        for (k, &w) in fv.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = u[(i, k)] * w;
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * u[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::from_hermitian_unchecked(out)
    }

    /// Support-restricted power `λ ↦ λ^t` (0 off the support, for any sign of t).
    pub fn power(&self, t: f64) -> HermitianMatrix {
        let cut = self.support_cutoff();
        self.map(|l| if l > cut { l.powf(t) } else { 0.0 })
    }

    /// Support-restricted natural logarithm.
    pub fn log(&self) -> HermitianMatrix {
        let cut = self.support_cutoff();
        self.map(|l| if l > cut { l.ln() } else { 0.0 })
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> HermitianMatrix {
        let cut = self.support_cutoff();
        self.map(|l| if l > cut { 1.0 } else { 0.0 })
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eigh(h: &HermitianMatrix) -> Spectrum {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    if n > 1 {
        jacobi_sweeps(&mut a, &mut v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Spectrum { values, vectors }
}

fn off_diagonal_norm2(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_sweeps(a: &mut CMatrix, v: &mut CMatrix) {
    let n = a.dim();
    let scale2 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    if scale2 == 0.0 {
        return;
    }
    let stop = scale2 * 1e-32;
    for _sweep in 0..100 {
        if off_diagonal_norm2(a) <= stop {
            return;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // A <- A J (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
}

/// Eigenvalues only, descending.
///
/// Small matrices go through Jacobi; larger ones are reduced to real
/// tridiagonal form by Householder reflections and finished with implicit QL.
pub fn eigvalsh(h: &HermitianMatrix) -> Vec<f64> {
    let m = h.as_matrix();
    let n = m.dim();
    if m.is_diagonal(0.0) {
        let mut d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    if n <= 8 {
        return eigh(h).values;
    }
    let (mut d, mut e) = tridiagonalize(m);
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal one. Returns (diagonal, subdiagonal moduli).
fn tridiagonalize(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut sub = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let xnorm2: f64 = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        let xnorm = xnorm2.sqrt();
        let x0 = a[(k + 1, k)];
        let tail2 = xnorm2 - x0.norm_sqr();
        if tail2 <= f64::MIN_POSITIVE {
            sub[k] = x0.norm();
            continue;
        }
        let ph = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -ph * xnorm;
        v[..n].fill(ZERO);
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: f64 = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum();
        let inv = 1.0 / vnorm2.sqrt();
        for item in v.iter_mut().take(n).skip(k + 1) {
            *item *= inv;
        }
        // H = I - 2 v v†; A <- H A H on the trailing block (rows/cols >= k).
        // p = A v, w = 2 (p - (v† p) v), A <- A - v w† - w v†
        for i in k..n {
            let mut s = ZERO;
            for j in (k + 1)..n {
                s += a[(i, j)] * v[j];
            }
            p[i] = s;
        }
        let mut vp = ZERO;
        for i in (k + 1)..n {
            vp += v[i].conj() * p[i];
        }
        for i in k..n {
            p[i] = (p[i] - vp * v[i]) * 2.0;
        }
        for i in k..n {
            for j in k..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(i, j)] -= upd;
            }
        }
        sub[k] = a[(k + 1, k)].norm();
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, sub)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix;
/// `e[i]` couples `d[i]` and `d[i+1]`. Eigenvalues are left in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n < 2 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Matrix power of a PSD matrix restricted to its support.
///
/// Eigenvalues outside the support map to 0 for every `t`, so negative powers
/// are pseudo-inverse powers; the zero matrix maps to the zero matrix.
pub fn matrix_power(a: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    let spec = psd_spectrum(a)?;
    Ok(spec.power(t))
}

/// Natural logarithm on the support; 0 elsewhere. Support inclusion is the
/// caller's responsibility.
pub fn matrix_log(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = psd_spectrum(a)?;
    Ok(spec.log())
}

pub fn matrix_exp(h: &HermitianMatrix) -> HermitianMatrix {
    eigh(h).map(f64::exp)
}

/// Spectrum of a matrix that must be PSD up to [`PSD_TOL`] (relative to its
/// largest eigenvalue when that exceeds 1); negative noise is clamped to 0.
pub fn psd_spectrum(a: &HermitianMatrix) -> Result<Spectrum> {
    let mut spec = eigh(a);
    let top = spec.values.first().copied().unwrap_or(0.0).max(1.0);
    let min = spec.min();
    if min < -PSD_TOL * top {
        return Err(Error::NotPositive(min));
    }
    for v in spec.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(spec)
}

/// Schatten norm of order `p` (pass `f64::INFINITY` for the operator norm).
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::OutOfRange(format!("Schatten p must be >= 1, got {p}")));
    }
    let singular: Vec<f64> = if a.max_asymmetry() <= HERMITIAN_TOL * a.max_abs().max(1.0) {
        eigvalsh(&HermitianMatrix::from_hermitian_unchecked(a.clone()))
            .into_iter()
            .map(f64::abs)
            .collect()
    } else {
        let gram = HermitianMatrix::from_hermitian_unchecked(a.adjoint().matmul(a));
        eigvalsh(&gram).into_iter().map(|x| x.max(0.0).sqrt()).collect()
    };
    Ok(norm_of_values(&singular, p))
}

pub(crate) fn norm_of_values(s: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return s.iter().fold(0.0f64, |m, &x| m.max(x));
    }
    if p == 1.0 {
        return s.iter().sum();
    }
    let top = s.iter().fold(0.0f64, |m, &x| m.max(x));
    if top == 0.0 {
        return 0.0;
    }
    top * s.iter().map(|&x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `||A||_1` for Hermitian `A`.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    eigvalsh(a).iter().map(|x| x.abs()).sum()
}

/// A density operator with its spectral decomposition.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
    spectrum: Spectrum,
}

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr));
        }
        let spectrum = psd_spectrum(&matrix)?;
        Ok(Self { matrix, spectrum })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Rescales a PSD matrix to unit trace first.
    pub fn normalized(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if !(tr > 0.0) {
            return Err(Error::BadTrace(tr));
        }
        Self::new(matrix.scale(1.0 / tr))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(p))
    }

    /// Pure state |ψ><ψ| for a normalized vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::from_matrix(CMatrix::outer(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(HermitianMatrix::identity(dim).scale(1.0 / dim as f64)).expect("maximally mixed state is valid")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn power(&self, t: f64) -> HermitianMatrix {
        self.spectrum.power(t)
    }

    pub fn log(&self) -> HermitianMatrix {
        self.spectrum.log()
    }

    pub fn kron(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator::new(self.matrix.kron(&other.matrix)).expect("product of states is a state")
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.matrix.as_matrix().is_diagonal(tol)
    }
}

/// `½ ||ρ - σ||_1`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(0.5 * trace_norm(&rho.matrix.sub(&sigma.matrix)))
}

/// Optimal test for discriminating two states and its value.
#[derive(Clone, Debug)]
pub struct Helstrom {
    pub value: f64,
    /// Projector onto the positive eigenspace of `ρ - σ`.
    pub test: HermitianMatrix,
}

pub fn helstrom_value(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Helstrom> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = rho.matrix.sub(&sigma.matrix);
    let spec = eigh(&diff);
    let cut = spec.support_cutoff().max(1e-15);
    let test = spec.map(|l| if l > cut { 1.0 } else { 0.0 });
    let value = diff.as_matrix().trace_product(test.as_matrix()).re;
    Ok(Helstrom { value, test })
}
