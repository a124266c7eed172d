//! Seeded property suites: each draws its own random instances, checks one
//! family of inequalities or identities, and reports the worst case together
//! with a dump of every failing instance.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codebook::expectation::{exact_expected_td, mc_expected_td, output_dim, ExpectationEstimate};
use crate::codebook::sample::CodebookKind;
use crate::codebook::types::{composition_counts, rational_prior, type_class_probability};
use crate::error::{Error, Result};
use crate::exponent::{alpha_one_slopes, Exponents};
use crate::hermitian::{psd_spectrum, HermitianMatrix};
use crate::info::models::{model_a, orthogonal_binary};
use crate::info::oracle::{bloch_grid_oracle, classical_augustin, classical_sibson_closed_form};
use crate::info::solver::{sandwiched_info, SandwichedKind};
use crate::info::{
    mutual_information, petz_down_augustin_info, petz_down_renyi_info, variances, CqSource, SolverConfig,
};
use crate::random::{random_commuting_source, random_density, random_psd, random_qubit_source};
use crate::theta::{random_field, verify_theta_bound, OperatorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Theta,
    TraceInequality,
    Oracles,
    Derivatives,
    Additivity,
    Orderings,
    Positivity,
    TypeClass,
    Moderate,
    Sandwich,
    MonteCarlo,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Theta,
        Suite::TraceInequality,
        Suite::Oracles,
        Suite::Derivatives,
        Suite::Additivity,
        Suite::Orderings,
        Suite::Positivity,
        Suite::TypeClass,
        Suite::Moderate,
        Suite::Sandwich,
        Suite::MonteCarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::TraceInequality => "trace-inequality",
            Suite::Oracles => "oracles",
            Suite::Derivatives => "derivatives",
            Suite::Additivity => "additivity",
            Suite::Orderings => "orderings",
            Suite::Positivity => "positivity",
            Suite::TypeClass => "type-class",
            Suite::Moderate => "moderate",
            Suite::Sandwich => "sandwich",
            Suite::MonteCarlo => "monte-carlo",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    /// Worst observed value of the suite's figure of merit (see `summary`).
    pub worst: f64,
    pub summary: String,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Tally {
    suite: Suite,
    cases: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(suite: Suite, worst: f64) -> Self {
        Self {
            suite,
            cases: 0,
            worst,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, dump: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(dump());
        }
    }

    fn finish(self, summary: String) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            cases: self.cases,
            worst: self.worst,
            summary,
            failures: self.failures,
        }
    }
}

fn suite_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite as u64 + 1);
    rng
}

/// Runs one suite at its default size.
pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let cfg = SolverConfig::default();
    match suite {
        Suite::Theta => theta_suite(seed, 100),
        Suite::TraceInequality => trace_inequality_suite(seed, 200),
        Suite::Oracles => oracle_suite(seed, 20, 200, &cfg),
        Suite::Derivatives => derivative_suite(seed, 10, &cfg),
        Suite::Additivity => additivity_suite(seed, 5, &cfg),
        Suite::Orderings => ordering_suite(seed, 10, &cfg),
        Suite::Positivity => positivity_suite(seed, 10, &cfg),
        Suite::TypeClass => type_class_suite(),
        Suite::Moderate => moderate_suite(&cfg),
        Suite::Sandwich => sandwich_suite(seed, 10, &cfg),
        Suite::MonteCarlo => monte_carlo_suite(seed, 10, 2000),
    }
}

/// Source with a nondegenerate variance `V ≥ min_v`, by rejection.
pub fn random_nondegenerate_model<R: Rng + ?Sized>(rng: &mut R, min_v: f64) -> Result<CqSource> {
    for _ in 0..10_000 {
        let letters = rng.random_range(2..=3);
        let cq = random_qubit_source(letters, rng);
        if variances(&cq).v >= min_v {
            return Ok(cq);
        }
    }
    Err(Error::Degenerate(format!("no random model with V >= {min_v} found")))
}

/// Qubit source whose prior is one of (1/2,1/2), (1/4,3/4), (3/4,1/4) or
/// (1/2,1/4,1/4), with states of random rank.
pub fn random_rational_model<R: Rng + ?Sized>(rng: &mut R) -> CqSource {
    let priors: [&[(u64, u64)]; 4] = [
        &[(1, 2), (1, 2)],
        &[(1, 4), (3, 4)],
        &[(3, 4), (1, 4)],
        &[(1, 2), (1, 4), (1, 4)],
    ];
    let prior: Vec<Ratio<u64>> = priors[rng.random_range(0..priors.len())]
        .iter()
        .map(|&(a, b)| Ratio::new(a, b))
        .collect();
    let states = prior
        .iter()
        .map(|_| {
            let rank = rng.random_range(1..=2);
            random_density(2, rank, rng)
        })
        .collect();
    CqSource::with_rational_prior(prior, states).expect("valid rational model")
}

fn describe(cq: &CqSource) -> String {
    let states: Vec<String> = cq
        .states()
        .iter()
        .map(|s| format!("{:?}", s.matrix().as_matrix()))
        .collect();
    format!("prior {:?}; states [{}]", cq.prior(), states.join(", "))
}

/// Interpolation bound for `Θ` on random fields, plus the tight Rademacher case.
pub fn theta_suite(seed: u64, fields: usize) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Theta);
    let mut t = Tally::new(Suite::Theta, f64::NEG_INFINITY);
    for _ in 0..fields {
        let points = rng.random_range(2..=3);
        let dim = rng.random_range(1..=2);
        let m = rng.random_range(2..=4);
        let f = random_field(points, dim, &mut rng);
        for p in [1.0, 1.25, 1.5, 1.75, 2.0] {
            let chk = verify_theta_bound(&f, m, p)?;
            t.worst = t.worst.max(chk.lhs - chk.rhs);
            t.check(chk.holds, || {
                format!("M={m} p={p} lhs={} rhs={} field={f:?}", chk.lhs, chk.rhs)
            });
        }
    }
    for m in 1..=4 {
        let chk = verify_theta_bound(&OperatorField::rademacher(), m, 2.0)?;
        let want = 1.0 / (m as f64).sqrt();
        t.check(
            (chk.lhs - want).abs() <= 1e-12 && (chk.rhs - want).abs() <= 1e-12,
            || format!("Rademacher M={m}: lhs={} rhs={} want={want}", chk.lhs, chk.rhs),
        );
    }
    let worst = t.worst;
    Ok(t.finish(format!("max(lhs - rhs) = {worst:.3e}")))
}

/// `Tr[K(K+L)^{-1/2} L (K+L)^{-1/2}]`, with the inverse taken on the support of `K+L`.
pub fn trace_inequality_lhs(k: &HermitianMatrix, l: &HermitianMatrix) -> Result<f64> {
    let spec = psd_spectrum(&k.add(l))?;
    let cut = spec.support_cutoff();
    let inv_sqrt = spec.map(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 });
    let inner = inv_sqrt.sandwich(l);
    Ok(k.as_matrix().trace_product(inner.as_matrix()).re)
}

/// `Tr[K^{1-s} L^s]`.
pub fn trace_inequality_rhs(k: &HermitianMatrix, l: &HermitianMatrix, s: f64) -> Result<f64> {
    let ks = psd_spectrum(k)?.power(1.0 - s);
    let ls = psd_spectrum(l)?.power(s);
    Ok(ks.as_matrix().trace_product(ls.as_matrix()).re)
}

/// `rhs − lhs` of the trace inequality.
pub fn trace_inequality_margin(k: &HermitianMatrix, l: &HermitianMatrix, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange(format!("s must lie in (0, 1), got {s}")));
    }
    Ok(trace_inequality_rhs(k, l, s)? - trace_inequality_lhs(k, l)?)
}

pub fn trace_inequality_suite(seed: u64, pairs: usize) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::TraceInequality);
    let mut t = Tally::new(Suite::TraceInequality, f64::INFINITY);
    for _ in 0..pairs {
        let d = rng.random_range(1..=4);
        let k = random_psd(d, rng.random_range(1..=d), &mut rng);
        let l = random_psd(d, rng.random_range(1..=d), &mut rng);
        for i in 1..=9 {
            let s = i as f64 / 10.0;
            let margin = trace_inequality_margin(&k, &l, s)?;
            t.worst = t.worst.min(margin);
            t.check(margin >= -1e-10, || format!("s={s} margin={margin} K={k:?} L={l:?}"));
        }
    }
    // K = L: lhs = Tr K / 2 and rhs = Tr K.
    let k = random_psd(3, 3, &mut rng);
    let lhs = trace_inequality_lhs(&k, &k)?;
    let rhs = trace_inequality_rhs(&k, &k, 0.5)?;
    let tr = k.trace();
    t.check(
        (lhs - tr / 2.0).abs() <= 1e-12 * tr && (rhs - tr).abs() <= 1e-12 * tr,
        || format!("K = L: lhs={lhs} rhs={rhs} Tr K={tr}"),
    );
    let worst = t.worst;
    Ok(t.finish(format!("min margin = {worst:.3e}")))
}

/// Solver against the classical closed forms on commuting sources and
/// against the Bloch-ball grid on qubit sources.
pub fn oracle_suite(seed: u64, models: usize, resolution: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Oracles);
    let mut t = Tally::new(Suite::Oracles, 0.0);
    let alphas = [1.25, 1.5, 2.0];
    let solve = |cq: &CqSource, a: f64, kind: SandwichedKind| -> Result<f64> {
        let r = sandwiched_info(cq, a, kind, cfg)?;
        if !r.converged {
            return Err(Error::NoConvergence(format!("{kind:?} at α = {a}")));
        }
        Ok(r.value)
    };
    for _ in 0..models {
        let dim = rng.random_range(2..=3);
        let letters = rng.random_range(2..=3);
        let cq = random_commuting_source(dim, letters, &mut rng);
        for a in alphas {
            let pairs = [
                (
                    solve(&cq, a, SandwichedKind::Renyi)?,
                    classical_sibson_closed_form(&cq, a)?,
                    "Sibson",
                ),
                (
                    solve(&cq, a, SandwichedKind::Augustin)?,
                    classical_augustin(&cq, a)?,
                    "Augustin",
                ),
            ];
            for (got, want, what) in pairs {
                let err = (got - want).abs();
                t.worst = t.worst.max(err);
                t.check(err <= 1e-6, || {
                    format!("commuting {what} α={a}: {got} vs {want}; {}", describe(&cq))
                });
            }
        }
    }
    for _ in 0..models {
        let letters = rng.random_range(2..=3);
        let cq = random_qubit_source(letters, &mut rng);
        for a in alphas {
            for kind in [SandwichedKind::Renyi, SandwichedKind::Augustin] {
                let got = solve(&cq, a, kind)?;
                let grid = bloch_grid_oracle(&cq, kind, a, resolution)?;
                let err = (got - grid).abs();
                t.worst = t.worst.max(err);
                t.check(err <= 1e-4, || {
                    format!("qubit {kind:?} α={a}: {got} vs grid {grid}; {}", describe(&cq))
                });
            }
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("max |solver - oracle| = {worst:.3e}")))
}

/// Limits and one-sided slopes at `α = 1`.
pub fn derivative_suite(seed: u64, models: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Derivatives);
    let mut t = Tally::new(Suite::Derivatives, 0.0);
    let h = 1e-3;
    for _ in 0..models {
        let cq = random_nondegenerate_model(&mut rng, 0.05)?;
        let var = variances(&cq);
        let i = mutual_information(&cq);
        let near = sandwiched_info(&cq, 1.0 + h, SandwichedKind::Renyi, cfg)?.value;
        t.check((near - i).abs() <= 2.0 * h * var.v, || {
            format!(
                "|I*_(1+h) - I| = {} > 2hV = {}; {}",
                (near - i).abs(),
                2.0 * h * var.v,
                describe(&cq)
            )
        });
        let s = alpha_one_slopes(&cq, 1e-2, cfg)?;
        let checks = [
            ("I*", s.sandwiched_renyi, var.v / 2.0),
            ("I*_breve", s.sandwiched_augustin, var.v_breve / 2.0),
            ("I_down", s.petz_down_renyi, var.v / 2.0),
            ("I_down_breve", s.petz_down_augustin, var.v_breve / 2.0),
        ];
        for (what, got, want) in checks {
            let rel = (got - want).abs() / want.abs();
            t.worst = t.worst.max(rel);
            t.check(rel <= 0.05, || {
                format!("slope of {what}: {got} vs {want}; {}", describe(&cq))
            });
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("max relative slope error = {worst:.3e}")))
}

/// `I*_α` of the two-fold product source equals twice the single-copy value.
pub fn additivity_suite(seed: u64, models: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Additivity);
    let mut t = Tally::new(Suite::Additivity, 0.0);
    for _ in 0..models {
        let cq = random_qubit_source(2, &mut rng);
        let pair = cq.tensor(&cq);
        for a in [1.5, 2.0] {
            let one = sandwiched_info(&cq, a, SandwichedKind::Renyi, cfg)?;
            let two = sandwiched_info(&pair, a, SandwichedKind::Renyi, cfg)?;
            let err = (two.value - 2.0 * one.value).abs();
            t.worst = t.worst.max(err);
            t.check(err <= 1e-6 && one.converged && two.converged, || {
                format!("α={a}: {} vs 2 x {}; {}", two.value, one.value, describe(&cq))
            });
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("max |I*(pair) - 2 I*| = {worst:.3e}")))
}

/// Augustin-versus-Rényi orderings of the quantities and of the exponents.
pub fn ordering_suite(seed: u64, models: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Orderings);
    let mut t = Tally::new(Suite::Orderings, f64::NEG_INFINITY);
    let tol = 1e-6;
    for _ in 0..models {
        let letters = rng.random_range(2..=3);
        let cq = random_qubit_source(letters, &mut rng);
        let record = |t: &mut Tally, what: String, excess: f64| {
            t.worst = t.worst.max(excess);
            t.check(excess <= tol, || {
                format!("{what}: violation {excess}; {}", describe(&cq))
            });
        };
        for a in [1.1, 1.25, 1.5, 1.75, 1.9] {
            let r = sandwiched_info(&cq, a, SandwichedKind::Renyi, cfg)?.value;
            let b = sandwiched_info(&cq, a, SandwichedKind::Augustin, cfg)?.value;
            record(&mut t, format!("I*_breve <= I* at α={a}"), b - r);
        }
        for a in [0.55, 0.65, 0.75, 0.85, 0.95] {
            let r = petz_down_renyi_info(&cq, a)?.value;
            let b = petz_down_augustin_info(&cq, a)?.value;
            record(&mut t, format!("I_down_breve >= I_down at α={a}"), r - b);
        }
        let ex = Exponents::new(&cq, cfg);
        let i = ex.mutual_information();
        for f in [0.5, 0.8, 1.0, 1.2, 1.5] {
            let rep = ex.report(f * i)?;
            record(
                &mut t,
                format!("E*_breve >= E* at R={}", f * i),
                rep.e_star - rep.e_star_breve,
            );
            record(
                &mut t,
                format!("E_sc_breve >= E_sc at R={}", f * i),
                rep.e_sc_down - rep.e_sc_down_breve,
            );
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("max ordering violation = {worst:.3e}")))
}

/// Exponents are positive exactly on their side of `I(X:B)`.
pub fn positivity_suite(seed: u64, models: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(seed, Suite::Positivity);
    let mut t = Tally::new(Suite::Positivity, f64::INFINITY);
    let delta = 0.05;
    let mut done = 0;
    while done < models {
        let letters = rng.random_range(2..=3);
        let cq = random_qubit_source(letters, &mut rng);
        let i = mutual_information(&cq);
        if i < 2.0 * delta {
            continue;
        }
        done += 1;
        let ex = Exponents::new(&cq, cfg);
        let above = ex.report(i + delta)?;
        let below = ex.report(i - delta)?;
        let positive = [
            ("E*(I+δ)", above.e_star),
            ("E*_breve(I+δ)", above.e_star_breve),
            ("E_sc(I-δ)", below.e_sc_down),
            ("E_sc_breve(I-δ)", below.e_sc_down_breve),
        ];
        for (what, v) in positive {
            t.worst = t.worst.min(v);
            t.check(v > 1e-4, || format!("{what} = {v} is not > 1e-4; {}", describe(&cq)));
        }
        let zero = [
            ("E*(I-δ)", below.e_star),
            ("E*_breve(I-δ)", below.e_star_breve),
            ("E_sc(I+δ)", above.e_sc_down),
            ("E_sc_breve(I+δ)", above.e_sc_down_breve),
        ];
        for (what, v) in zero {
            t.check(v == 0.0, || format!("{what} = {v} is not 0; {}", describe(&cq)));
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("smallest positive-side exponent = {worst:.3e}")))
}

pub fn type_class_suite() -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::TypeClass, f64::INFINITY);
    let priors: [&[(u64, u64)]; 3] = [&[(1, 2), (1, 2)], &[(1, 2), (1, 4), (1, 4)], &[(3, 4), (1, 4)]];
    for p in priors {
        let p: Vec<Ratio<u64>> = p.iter().map(|&(a, b)| Ratio::new(a, b)).collect();
        for n in [4, 8, 16, 32] {
            let tc = type_class_probability(&p, n)?;
            let slack = (tc.exact - tc.stirling_lo).min(tc.stirling_hi - tc.exact) / tc.exact;
            t.worst = t.worst.min(slack);
            t.check(tc.stirling_lo <= tc.exact && tc.exact <= tc.stirling_hi, || {
                format!("p={p:?} n={n}: {tc:?}")
            });
        }
    }
    let worst = t.worst;
    Ok(t.finish(format!("min relative distance to a bracket end = {worst:.3e}")))
}

/// Model A, `a_n = n^{-1/4}`: the ratio `n E*(R_n) / (n a_n² / 2V)` approaches 1.
pub fn moderate_suite(cfg: &SolverConfig) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Moderate, f64::NAN);
    let cq = model_a();
    let rows = Exponents::new(&cq, cfg).moderate_deviation_scan(0.25, 1.0, &[100, 10_000, 1_000_000])?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio_iid).collect();
    let last = ratios[2];
    t.worst = last;
    t.check((0.8..=1.2).contains(&last), || format!("ratio at n = 1e6 is {last}"));
    t.check((last - 1.0).abs() < (ratios[0] - 1.0).abs(), || {
        format!("ratios {ratios:?} do not approach 1")
    });
    t.check(
        ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()),
        || format!("ratios {ratios:?} are not monotone towards 1"),
    );
    Ok(t.finish(format!("ratios at n = 1e2, 1e4, 1e6: {ratios:.4?}")))
}

/// Largest output dimension enumerated by the sandwich sweeps.
pub const SWEEP_MAX_DIM: usize = 128;
/// Largest `|X|^{nM}` in the sandwich sweeps.
pub const SWEEP_MAX_CODEBOOKS: f64 = 1e5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichCase {
    pub model: String,
    pub kind: CodebookKind,
    pub n: usize,
    pub m: usize,
    pub exact: f64,
    /// `min_α` of the n-shot achievability bound.
    pub achievability: f64,
    /// Unclamped strong-converse bound.
    pub strong_converse: f64,
}

/// `(n, M)` pairs with `d^n ≤ 128` and `|X|^{nM} ≤ 10⁵`; constant-composition
/// pairs additionally need an integral composition.
pub fn feasible_settings(cq: &CqSource, kind: CodebookKind) -> Vec<(usize, usize)> {
    let k = cq.alphabet_size() as f64;
    let mut out = Vec::new();
    for n in 1.. {
        match output_dim(cq.dim(), n) {
            Ok(d) if d <= SWEEP_MAX_DIM => {}
            _ => break,
        }
        if kind == CodebookKind::ConstantComposition
            && rational_prior(cq).and_then(|p| composition_counts(&p, n)).is_err()
        {
            continue;
        }
        for m in 1.. {
            if k.powf((n * m) as f64) > SWEEP_MAX_CODEBOOKS {
                break;
            }
            out.push((n, m));
        }
    }
    out
}

/// The models of the sandwich sweeps: the orthogonal binary source and
/// `random` rational qubit models.
pub fn sweep_models(seed: u64, random: usize) -> Vec<(String, CqSource)> {
    let mut rng = suite_rng(seed, Suite::Sandwich);
    let mut out = vec![("orthogonal_binary".to_string(), orthogonal_binary())];
    for i in 0..random {
        out.push((format!("random_{i}"), random_rational_model(&mut rng)));
    }
    out
}

/// Exact expectations and the matching bounds over every feasible setting.
pub fn sandwich_cases(seed: u64, random_models: usize, cfg: &SolverConfig) -> Result<Vec<SandwichCase>> {
    let mut out = Vec::new();
    for (name, cq) in sweep_models(seed, random_models) {
        let ex = Exponents::new(&cq, cfg);
        for kind in [CodebookKind::Iid, CodebookKind::ConstantComposition] {
            for (n, m) in feasible_settings(&cq, kind) {
                let exact = exact_expected_td(&cq, kind, n, m)?.mean;
                let rec = ex.nshot_bounds_for_size(n, m as f64)?;
                let (ach, sc) = match kind {
                    CodebookKind::Iid => (rec.ach_iid_tight, rec.sc_iid),
                    CodebookKind::ConstantComposition => (
                        rec.ach_cc_tight.expect("integral composition"),
                        rec.sc_cc.expect("integral composition"),
                    ),
                };
                out.push(SandwichCase {
                    model: name.clone(),
                    kind,
                    n,
                    m,
                    exact,
                    achievability: ach,
                    strong_converse: sc,
                });
            }
        }
    }
    Ok(out)
}

pub fn sandwich_suite(seed: u64, random_models: usize, cfg: &SolverConfig) -> Result<SuiteReport> {
    let cases = sandwich_cases(seed, random_models, cfg)?;
    Ok(sandwich_report(&cases))
}

/// Achievability and strong-converse sides of a finished sweep.
pub fn sandwich_report(cases: &[SandwichCase]) -> SuiteReport {
    let mut t = Tally::new(Suite::Sandwich, f64::INFINITY);
    for c in cases {
        let ach = c.achievability - c.exact;
        let sc = c.exact - c.strong_converse;
        t.worst = t.worst.min(ach.min(sc));
        t.check(ach >= -1e-10, || format!("achievability violated: {c:?}"));
        t.check(sc >= 0.0, || format!("strong converse violated: {c:?}"));
    }
    let worst = t.worst;
    t.finish(format!("{} settings; min slack = {worst:.3e}", cases.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloCase {
    pub model: String,
    pub kind: CodebookKind,
    pub n: usize,
    pub m: usize,
    pub exact: f64,
    pub estimate: ExpectationEstimate,
}

/// Monte Carlo estimates against exact enumeration on every feasible setting.
pub fn monte_carlo_cases(seed: u64, random_models: usize, samples: usize) -> Result<Vec<MonteCarloCase>> {
    let mut out = Vec::new();
    for (name, cq) in sweep_models(seed, random_models) {
        for kind in [CodebookKind::Iid, CodebookKind::ConstantComposition] {
            for (n, m) in feasible_settings(&cq, kind) {
                out.push(MonteCarloCase {
                    model: name.clone(),
                    kind,
                    n,
                    m,
                    exact: exact_expected_td(&cq, kind, n, m)?.mean,
                    estimate: mc_expected_td(&cq, kind, n, m, samples, seed)?,
                });
            }
        }
    }
    Ok(out)
}

/// Agreement within four half-widths. A zero-variance sample (every codebook
/// at the same distance) is compared at rounding level instead.
pub fn monte_carlo_report(cases: &[MonteCarloCase]) -> SuiteReport {
    let mut t = Tally::new(Suite::MonteCarlo, 0.0);
    for c in cases {
        let err = (c.estimate.mean - c.exact).abs();
        let allowed = 4.0 * c.estimate.half_width_95 + 1e-12;
        t.worst = t.worst.max(err / allowed);
        t.check(err <= allowed, || format!("Monte Carlo off by {err}: {c:?}"));
    }
    let worst = t.worst;
    t.finish(format!(
        "{} settings; max |mc - exact| / (4 half-widths) = {worst:.3}",
        cases.len()
    ))
}

pub fn monte_carlo_suite(seed: u64, random_models: usize, samples: usize) -> Result<SuiteReport> {
    Ok(monte_carlo_report(&monte_carlo_cases(seed, random_models, samples)?))
}
