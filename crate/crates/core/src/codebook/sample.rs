//! Seeded random codebooks.
//!
//! Every codeword draws from its own ChaCha stream whose key is derived from
//! `(seed, sample index, codeword index)`, so a codebook does not depend on
//! the order in which codewords (or Monte Carlo samples) are generated.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::types::composition_counts;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    Iid,
    ConstantComposition,
}

impl std::fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CodebookKind::Iid => "iid",
            CodebookKind::ConstantComposition => "cc",
        })
    }
}

/// `M` length-`n` codewords over the alphabet `0..|X|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Codebook {
    pub codewords: Vec<Vec<usize>>,
    pub kind: CodebookKind,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one codeword of one sampled codebook.
pub(crate) fn codeword_rng(seed: u64, sample: u64, codeword: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let words = [
        splitmix(seed),
        splitmix(seed ^ splitmix(sample)),
        splitmix(sample.wrapping_add(0x5151)),
        splitmix(codeword),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(codeword);
    rng
}

/// Inverse-CDF sampler over a probability vector.
pub(crate) struct LetterSampler {
    cdf: Vec<f64>,
    last: usize,
}

impl LetterSampler {
    pub fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .iter()
            .map(|&q| {
                acc += q;
                acc
            })
            .collect();
        let last = p.iter().rposition(|&q| q > 0.0).unwrap_or(0);
        Self { cdf, last }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // First letter whose cumulative mass exceeds u; zero-mass letters are
        // never chosen because their cdf equals the previous one.
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.last)
    }
}

pub(crate) fn iid_codeword(sampler: &LetterSampler, n: usize, seed: u64, sample: u64, m: u64) -> Vec<usize> {
    let mut rng = codeword_rng(seed, sample, m);
    (0..n).map(|_| sampler.draw(&mut rng)).collect()
}

pub(crate) fn cc_codeword(canonical: &[usize], seed: u64, sample: u64, m: u64) -> Vec<usize> {
    let mut rng = codeword_rng(seed, sample, m);
    let mut w = canonical.to_vec();
    for i in (1..w.len()).rev() {
        let j = rng.random_range(0..=i);
        w.swap(i, j);
    }
    w
}

/// Sorted sequence with the given letter counts.
pub(crate) fn canonical_sequence(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
        .collect()
}

fn check_prior(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&q| !(q >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("{p:?}")));
    }
    Ok(())
}

/// `M` codewords with i.i.d. letters from `p`.
pub fn sample_iid_codebook(p: &[f64], n: usize, m: usize, seed: u64) -> Result<Codebook> {
    sample_iid_codebook_indexed(p, n, m, seed, 0)
}

/// The `sample`-th independent codebook for a given seed.
pub fn sample_iid_codebook_indexed(p: &[f64], n: usize, m: usize, seed: u64, sample: u64) -> Result<Codebook> {
    check_prior(p)?;
    let sampler = LetterSampler::new(p);
    Ok(Codebook {
        codewords: (0..m as u64)
            .map(|k| iid_codeword(&sampler, n, seed, sample, k))
            .collect(),
        kind: CodebookKind::Iid,
        seed,
        n,
        m,
    })
}

/// `M` codewords drawn independently and uniformly from the type class `T_p^n`.
pub fn sample_cc_codebook(p: &[Ratio<u64>], n: usize, m: usize, seed: u64) -> Result<Codebook> {
    sample_cc_codebook_indexed(p, n, m, seed, 0)
}

pub fn sample_cc_codebook_indexed(p: &[Ratio<u64>], n: usize, m: usize, seed: u64, sample: u64) -> Result<Codebook> {
    let counts = composition_counts(p, n)?;
    let canonical = canonical_sequence(&counts);
    Ok(Codebook {
        codewords: (0..m as u64)
            .map(|k| cc_codeword(&canonical, seed, sample, k))
            .collect(),
        kind: CodebookKind::ConstantComposition,
        seed,
        n,
        m,
    })
}
