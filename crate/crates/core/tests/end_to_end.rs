//! Public-API checks against oracles written from scratch in this file.

use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use softcover_core::codebook::{exact_expected_td, mc_expected_td, type_class_probability, CodebookKind};
use softcover_core::exponent::Exponents;
use softcover_core::{CMatrix, CqSource, DensityOperator, SolverConfig};

/// Qubit state from a Bloch vector with |r| ≤ 1.
fn bloch_state(r: [f64; 3]) -> DensityOperator {
    let m = CMatrix::from_rows(&[
        vec![
            Complex64::new((1.0 + r[2]) / 2.0, 0.0),
            Complex64::new(r[0] / 2.0, -r[1] / 2.0),
        ],
        vec![
            Complex64::new(r[0] / 2.0, r[1] / 2.0),
            Complex64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    ])
    .unwrap();
    DensityOperator::from_matrix(m).unwrap()
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ½‖ρ − σ‖₁ for qubits is half the distance of the Bloch vectors.
fn brute_force_one_shot(prior: &[f64], bloch: &[[f64; 3]], m: usize) -> f64 {
    let k = prior.len();
    let mut rb = [0.0; 3];
    for (p, r) in prior.iter().zip(bloch) {
        for i in 0..3 {
            rb[i] += p * r[i];
        }
    }
    let mut total = 0.0;
    let mut word = vec![0usize; m];
    loop {
        let weight: f64 = word.iter().map(|&x| prior[x]).product();
        let mut avg = [0.0; 3];
        for &x in &word {
            for i in 0..3 {
                avg[i] += bloch[x][i] / m as f64;
            }
        }
        total += weight * norm([avg[0] - rb[0], avg[1] - rb[1], avg[2] - rb[2]]) / 2.0;
        let mut i = 0;
        while i < m {
            word[i] += 1;
            if word[i] < k {
                break;
            }
            word[i] = 0;
            i += 1;
        }
        if i == m {
            return total;
        }
    }
}

fn bloch_strategy() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th, ph)| [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()])
}

#[test]
fn exact_expectation_matches_bloch_enumeration() {
    let bloch = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.3, -0.4, 0.2]];
    let prior = [0.5, 0.25, 0.25];
    let states = bloch.iter().map(|&r| bloch_state(r)).collect();
    let cq = CqSource::new(prior.to_vec(), states).unwrap();
    for m in 1..=5 {
        let got = exact_expected_td(&cq, CodebookKind::Iid, 1, m).unwrap();
        let want = brute_force_one_shot(&prior, &bloch, m);
        assert!((got.mean - want).abs() < 1e-13, "M={m}: {} vs {want}", got.mean);
        assert!(got.exact);
    }
}

#[test]
fn monte_carlo_tracks_bloch_enumeration() {
    let bloch = [[0.0, 0.0, 1.0], [0.6, 0.0, -0.6]];
    let prior = [0.5, 0.5];
    let states = bloch.iter().map(|&r| bloch_state(r)).collect();
    let cq = CqSource::new(prior.to_vec(), states).unwrap();
    let want = brute_force_one_shot(&prior, &bloch, 6);
    let est = mc_expected_td(&cq, CodebookKind::Iid, 1, 6, 4000, 3).unwrap();
    assert!((est.mean - want).abs() <= 4.0 * est.half_width_95, "{est:?} vs {want}");
}

#[test]
fn type_class_probability_matches_direct_product() {
    // P^n(T_P) = n! / Π n_x! · Π p_x^{n_x}, evaluated in floating point.
    let fact = |n: u64| (1..=n).map(|k| k as f64).product::<f64>();
    for (p, n) in [
        (vec![(1u64, 2u64), (1, 2)], 10usize),
        (vec![(1, 3), (2, 3)], 9),
        (vec![(1, 4), (1, 4), (1, 2)], 8),
    ] {
        let r: Vec<Ratio<u64>> = p.iter().map(|&(a, b)| Ratio::new(a, b)).collect();
        let counts: Vec<u64> = p.iter().map(|&(a, b)| n as u64 * a / b).collect();
        let mut want = fact(n as u64);
        for (&(a, b), &c) in p.iter().zip(&counts) {
            want *= (a as f64 / b as f64).powi(c as i32) / fact(c);
        }
        let got = type_class_probability(&r, n).unwrap();
        assert!((got.exact - want).abs() < 1e-13 * want, "{got:?} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_shot_bounds_sandwich_brute_force(a in bloch_strategy(), b in bloch_strategy(), m in 1usize..=4) {
        let prior = [0.5, 0.5];
        let cq = CqSource::with_rational_prior(
            vec![Ratio::new(1, 2), Ratio::new(1, 2)],
            vec![bloch_state(a), bloch_state(b)],
        ).unwrap();
        let exact = brute_force_one_shot(&prior, &[a, b], m);
        let rec = Exponents::new(&cq, &SolverConfig::default()).nshot_bounds_for_size(1, m as f64).unwrap();
        prop_assert!(exact <= rec.ach_iid_tight + 1e-10, "{exact} > {}", rec.ach_iid_tight);
        prop_assert!(exact <= rec.ach_iid + 1e-10);
        prop_assert!(exact >= rec.sc_iid);
    }
}
