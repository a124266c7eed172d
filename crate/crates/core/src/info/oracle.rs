//! Independent cross-checks for the sandwiched quantities: scalar formulas for
//! commuting sources and brute-force search over the Bloch ball for qubits.

use super::solver::{check_sandwiched_alpha, SandwichedKind};
use super::CqSource;
use crate::error::{Error, Result};
use crate::hermitian::{eigh, HermitianMatrix};

/// Commutators below this Frobenius norm count as commuting.
pub const COMMUTING_TOL: f64 = 1e-12;

/// Letter distributions `W_x(y)` in a common eigenbasis of a commuting source,
/// restricted to letters with positive prior.
fn classical_channel(cq: &CqSource) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let c = cq.max_commutator();
    if c > COMMUTING_TOL {
        return Err(Error::NonCommuting(c));
    }
    // A generic combination has a common eigenbasis with every letter state.
    let d = cq.dim();
    let mut mix = HermitianMatrix::zeros(d);
    for (x, s) in cq.states().iter().enumerate() {
        let w = 1.0 + ((x as f64 + 1.0) * 0.618_033_988_749_895).fract();
        mix = mix.add(&s.matrix().scale(w));
    }
    let basis = eigh(&mix).vectors;
    let mut weights = Vec::new();
    let mut rows = Vec::new();
    for (x, p) in cq.support() {
        let m = cq.state(x).matrix().as_matrix();
        let row: Vec<f64> = (0..d)
            .map(|k| {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        acc += basis[(i, k)].conj() * m[(i, j)] * basis[(j, k)];
                    }
                }
                acc.re.max(0.0)
            })
            .collect();
        weights.push(p);
        rows.push(row);
    }
    Ok((weights, rows))
}

/// Sibson's closed form `α/(α-1) ln Σ_y (Σ_x p(x) W_x(y)^α)^{1/α}`, valid
/// for commuting sources.
pub fn classical_sibson_closed_form(cq: &CqSource, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("order {alpha}")));
    }
    let (p, w) = classical_channel(cq)?;
    let d = cq.dim();
    let s: f64 = (0..d)
        .map(|y| {
            p.iter()
                .zip(&w)
                .map(|(px, wx)| px * wx[y].powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .sum();
    Ok(alpha / (alpha - 1.0) * s.ln())
}

/// Classical Augustin information of a commuting source, from the fixed point
/// `q(y)^α ∝ Σ_x p(x) W_x(y)^α / Z_x(q)`, `Z_x(q) = Σ_y W_x(y)^α q(y)^{1-α}`.
///
/// The iteration is damped geometrically and its output is rejected unless
/// the stationarity conditions hold to `1e-12`.
pub fn classical_augustin(cq: &CqSource, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("order {alpha}")));
    }
    let (p, w) = classical_channel(cq)?;
    let d = cq.dim();
    let active: Vec<usize> = (0..d).filter(|&y| w.iter().any(|wx| wx[y] > 1e-15)).collect();
    let z = |q: &[f64]| -> Vec<f64> {
        w.iter()
            .map(|wx| {
                active
                    .iter()
                    .filter(|&&y| wx[y] > 0.0)
                    .map(|&y| wx[y].powf(alpha) * q[y].powf(1.0 - alpha))
                    .sum()
            })
            .collect()
    };
    let tilt = |q: &[f64]| -> Vec<f64> {
        let zs = z(q);
        let mut t = vec![0.0; d];
        for &y in &active {
            let s: f64 = p
                .iter()
                .zip(&w)
                .zip(&zs)
                .map(|((px, wx), zx)| px * wx[y].powf(alpha) / zx)
                .sum();
            t[y] = s.powf(1.0 / alpha);
        }
        let total: f64 = t.iter().sum();
        t.iter().map(|v| v / total).collect()
    };
    let mut q = vec![0.0; d];
    for &y in &active {
        q[y] = p.iter().zip(&w).map(|(px, wx)| px * wx[y]).sum();
    }
    let mut eta = 1.0;
    let mut converged = false;
    for _ in 0..200_000 {
        let t = tilt(&q);
        let next: Vec<f64> = {
            let raw: Vec<f64> = (0..d)
                .map(|y| {
                    if q[y] > 0.0 {
                        q[y].powf(1.0 - eta) * t[y].powf(eta)
                    } else {
                        0.0
                    }
                })
                .collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        };
        let change = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let objective =
            |q: &[f64]| -> f64 { z(q).iter().zip(&p).map(|(zx, px)| px * zx.ln()).sum::<f64>() / (alpha - 1.0) };
        if objective(&next) > objective(&q) + 1e-15 {
            eta *= 0.5;
            if eta < 1e-6 {
                break;
            }
            continue;
        }
        q = next;
        if change < 1e-16 {
            converged = true;
            break;
        }
    }
    // Stationarity: q is its own tilt.
    let t = tilt(&q);
    let resid = t.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !converged && resid > 1e-12 {
        return Err(Error::NoConvergence(format!(
            "Augustin fixed point residual {resid:.3e}"
        )));
    }
    let zs = z(&q);
    Ok(zs.iter().zip(&p).map(|(zx, px)| px * zx.ln()).sum::<f64>() / (alpha - 1.0))
}

/// Bloch vector `(x, y, z)` of a qubit state.
fn bloch_vector(m: &HermitianMatrix) -> [f64; 3] {
    let a = m.as_matrix();
    [2.0 * a[(0, 1)].re, -2.0 * a[(0, 1)].im, (a[(0, 0)] - a[(1, 1)]).re]
}

/// Minimum of the sandwiched objective over qubit states `σ = (1 + r·σ⃗)/2`
/// with `r` on the grid `{-1 + 2i/res}³` and `|r| ≤ 1 - 1e-6`.
///
/// Doubling the resolution refines the grid, so the result is non-increasing
/// along `res, 2 res, 4 res, ...`.
pub fn bloch_grid_oracle(cq: &CqSource, kind: SandwichedKind, alpha: f64, resolution: usize) -> Result<f64> {
    check_sandwiched_alpha(alpha)?;
    if cq.dim() != 2 {
        return Err(Error::Shape(format!(
            "grid oracle needs qubit states, got dimension {}",
            cq.dim()
        )));
    }
    if resolution < 1 {
        return Err(Error::OutOfRange("resolution must be positive".into()));
    }
    let letters: Vec<(f64, [f64; 3], f64)> = cq
        .support()
        .map(|(x, p)| {
            let m = cq.state(x).matrix();
            let v = bloch_vector(m);
            let a = m.as_matrix();
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re.max(0.0);
            (p, v, det)
        })
        .collect();
    let t = (1.0 - alpha) / alpha;
    let rmax = 1.0 - 1e-6;
    let coords: Vec<f64> = (0..=resolution)
        .map(|i| -1.0 + 2.0 * i as f64 / resolution as f64)
        .collect();
    let mut best = f64::INFINITY;
    for &x in &coords {
        for &y in &coords {
            let rxy = x * x + y * y;
            if rxy > rmax * rmax {
                continue;
            }
            for &z in &coords {
                let r2 = rxy + z * z;
                if r2 > rmax * rmax {
                    continue;
                }
                let r = r2.sqrt();
                let lp = 0.5 * (1.0 + r);
                let lm = 0.5 * (1.0 - r);
                let (pp, pm) = (lp.powf(t), lm.powf(t));
                // σ^t = a·1 + b·(r̂·σ⃗)
                let a = 0.5 * (pp + pm);
                let b = 0.5 * (pp - pm);
                let det_s = pp * pm;
                let mut acc = 0.0;
                for &(p, v, det_rho) in &letters {
                    let proj = if r > 0.0 {
                        (x * v[0] + y * v[1] + z * v[2]) / r
                    } else {
                        0.0
                    };
                    // M = ρ^{1/2} σ^t ρ^{1/2}: trace and determinant in closed form.
                    let tr = a + b * proj;
                    let det = det_rho * det_s;
                    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
                    let m1 = 0.5 * tr + disc;
                    let m2 = (0.5 * tr - disc).max(0.0);
                    let q = m1.powf(alpha) + if m2 > 0.0 { m2.powf(alpha) } else { 0.0 };
                    match kind {
                        SandwichedKind::Renyi => acc += p * q,
                        SandwichedKind::Augustin => acc += p * q.ln(),
                    }
                }
                let value = match kind {
                    SandwichedKind::Renyi => acc.ln() / (alpha - 1.0),
                    SandwichedKind::Augustin => acc / (alpha - 1.0),
                };
                if value < best {
                    best = value;
                }
            }
        }
    }
    Ok(best)
}
