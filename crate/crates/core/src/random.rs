//! Random matrices and states for tests, property checks and benchmarks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{DensityOperator, HermitianMatrix};
use crate::info::CqSource;
use crate::matrix::CMatrix;

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Square matrix with i.i.d. standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let data = (0..dim * dim).map(|_| complex_normal(rng)).collect();
    CMatrix::from_vec(dim, data).expect("length matches")
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_unchecked(random_ginibre(dim, rng))
}

/// `G G†` with `G` a `dim x rank` Ginibre block; PSD of rank `rank` almost surely.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    assert!(rank >= 1 && rank <= dim, "rank must lie in 1..=dim");
    let g = random_ginibre(dim, rng);
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rank {
                acc += g[(i, k)] * g[(j, k)].conj();
            }
            m[(i, j)] = acc;
        }
    }
    HermitianMatrix::from_hermitian_unchecked(m)
}

/// Density operator of the given rank, induced by a Ginibre block.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    DensityOperator::normalized(random_psd(dim, rank, rng)).expect("Ginibre PSD is nonzero")
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    random_density(dim, 1, rng)
}

/// Diagonal density operator with a uniformly random (Dirichlet(1)) spectrum.
pub fn random_diagonal_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let p = random_probability(dim, rng);
    DensityOperator::from_diagonal(&p).expect("probability vector")
}

/// Uniform point on the probability simplex.
pub fn random_probability<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Source with `letters` random full-rank states of dimension `dim` and a
/// random prior.
pub fn random_cq_source<R: Rng + ?Sized>(dim: usize, letters: usize, rng: &mut R) -> CqSource {
    let prior = random_probability(letters, rng);
    let states = (0..letters).map(|_| random_density(dim, dim, rng)).collect();
    CqSource::new(prior, states).expect("valid random source")
}

pub fn random_qubit_source<R: Rng + ?Sized>(letters: usize, rng: &mut R) -> CqSource {
    random_cq_source(2, letters, rng)
}

/// Haar-distributed unitary (QR of a Ginibre matrix via Gram–Schmidt).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_ginibre(dim, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|i| g[(i, j)]).collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = CMatrix::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Source whose states are diagonal in one shared random basis.
pub fn random_commuting_source<R: Rng + ?Sized>(dim: usize, letters: usize, rng: &mut R) -> CqSource {
    let u = random_unitary(dim, rng);
    let prior = random_probability(letters, rng);
    let states = (0..letters)
        .map(|_| {
            let d = CMatrix::from_real_diagonal(&random_probability(dim, rng));
            let m = u.matmul(&d).matmul(&u.adjoint());
            DensityOperator::new(HermitianMatrix::from_hermitian_unchecked(m)).expect("rotated state")
        })
        .collect();
    CqSource::new(prior, states).expect("valid random source")
}
