//! Error exponents, one-shot and n-shot bounds, and the moderate-deviation scan.
//!
//! Each exponent is a supremum over an open order interval. It is evaluated on
//! a closed grid that stays [`ALPHA_EDGE`] inside the interval, then refined by
//! golden-section search between the neighbours of the best grid point.
//! Information values are cached per order, so sweeping many rates (or
//! blocklengths) costs one solver call per distinct order.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::codebook::types::{k_p, rational_prior, type_class_probability};
use crate::error::{Error, Result};
use crate::info::solver::{sandwiched_info, SandwichedKind};
use crate::info::{
    mutual_information, petz_down_augustin_info, petz_down_renyi_info, variances, CqSource, SolverConfig,
};

pub const ALPHA_GRID_POINTS: usize = 64;
pub const ALPHA_EDGE: f64 = 1e-4;
/// Golden-section steps after the grid search; shrinks the bracket of two
/// grid spacings by `0.618^24 ≈ 1e-5`.
pub const GOLDEN_STEPS: usize = 24;
/// Smallest variance accepted by the moderate-deviation scan.
pub const MIN_VARIANCE: f64 = 1e-6;

/// The four exponents: achievability and strong converse, for i.i.d. and
/// constant-composition codebooks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    /// `E*(R) = sup_{α∈(1,2)} (1-α)/α (I*_α − R)`.
    AchievabilityIid,
    /// `Ĕ*(R)` with `Ĭ*_α`.
    AchievabilityCc,
    /// `E↓_sc(R) = sup_{α∈(1/2,1)} (1-α)/α (I↓_{2-1/α} − R)`.
    StrongConverseIid,
    /// `Ĕ↓_sc(R)` with `Ĭ↓_{2-1/α}`.
    StrongConverseCc,
}

impl ExponentKind {
    pub const ALL: [ExponentKind; 4] = [
        ExponentKind::AchievabilityIid,
        ExponentKind::AchievabilityCc,
        ExponentKind::StrongConverseIid,
        ExponentKind::StrongConverseCc,
    ];

    /// Closed order interval searched for the supremum.
    pub fn alpha_range(self) -> (f64, f64) {
        match self {
            ExponentKind::AchievabilityIid | ExponentKind::AchievabilityCc => (1.0 + ALPHA_EDGE, 2.0 - ALPHA_EDGE),
            _ => (0.5 + ALPHA_EDGE, 1.0 - ALPHA_EDGE),
        }
    }

    pub fn is_achievability(self) -> bool {
        matches!(self, ExponentKind::AchievabilityIid | ExponentKind::AchievabilityCc)
    }
}

impl std::fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExponentKind::AchievabilityIid => "E_star",
            ExponentKind::AchievabilityCc => "E_star_breve",
            ExponentKind::StrongConverseIid => "E_sc_down",
            ExponentKind::StrongConverseCc => "E_sc_down_breve",
        })
    }
}

/// Information quantity behind an exponent as a function of `α`:
/// `I*_α` / `Ĭ*_α` for achievability, `I↓_{2-1/α}` / `Ĭ↓_{2-1/α}` for the
/// strong converse.
pub struct InfoCurve<'a> {
    cq: &'a CqSource,
    kind: ExponentKind,
    cfg: SolverConfig,
    cache: Mutex<BTreeMap<u64, Option<f64>>>,
}

impl<'a> InfoCurve<'a> {
    pub fn new(cq: &'a CqSource, kind: ExponentKind, cfg: &SolverConfig) -> Self {
        Self {
            cq,
            kind,
            cfg: cfg.clone(),
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn kind(&self) -> ExponentKind {
        self.kind
    }

    fn compute(&self, alpha: f64) -> Option<f64> {
        let r = match self.kind {
            ExponentKind::AchievabilityIid => sandwiched_info(self.cq, alpha, SandwichedKind::Renyi, &self.cfg),
            ExponentKind::AchievabilityCc => sandwiched_info(self.cq, alpha, SandwichedKind::Augustin, &self.cfg),
            ExponentKind::StrongConverseIid => petz_down_renyi_info(self.cq, 2.0 - 1.0 / alpha),
            ExponentKind::StrongConverseCc => petz_down_augustin_info(self.cq, 2.0 - 1.0 / alpha),
        };
        match r {
            Ok(v) if v.converged && v.value.is_finite() => Some(v.value),
            _ => None,
        }
    }

    /// Information value at order `α`; `None` when the solver failed there.
    pub fn value(&self, alpha: f64) -> Option<f64> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&alpha.to_bits()) {
            return *v;
        }
        let v = self.compute(alpha);
        self.cache.lock().expect("cache lock").insert(alpha.to_bits(), v);
        v
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.kind.alpha_range();
        let step = (hi - lo) / (ALPHA_GRID_POINTS - 1) as f64;
        (0..ALPHA_GRID_POINTS).map(|i| lo + step * i as f64).collect()
    }

    /// Evaluates every grid order (concurrently) so that later sweeps hit the cache.
    pub fn prefill(&self) {
        let missing: Vec<f64> = {
            let cache = self.cache.lock().expect("cache lock");
            self.grid()
                .into_iter()
                .filter(|a| !cache.contains_key(&a.to_bits()))
                .collect()
        };
        let values: Vec<(f64, Option<f64>)> = missing.par_iter().map(|&a| (a, self.compute(a))).collect();
        let mut cache = self.cache.lock().expect("cache lock");
        for (a, v) in values {
            cache.insert(a.to_bits(), v);
        }
    }

    /// Grid orders at which the solver failed.
    pub fn failed_orders(&self) -> Vec<f64> {
        self.cache
            .lock()
            .expect("cache lock")
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| f64::from_bits(*k))
            .collect()
    }

    /// `sup_α f(α, value(α))` by grid search plus golden-section refinement.
    pub fn maximize<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<Optimum> {
        self.prefill();
        let grid = self.grid();
        let eval = |a: f64| self.value(a).map(|v| f(a, v)).filter(|y| !y.is_nan());
        let mut best: Option<(usize, f64)> = None;
        for (i, &a) in grid.iter().enumerate() {
            if let Some(y) = eval(a) {
                if best.is_none_or(|(_, b)| y > b) {
                    best = Some((i, y));
                }
            }
        }
        let (i, mut best_y) = best.ok_or_else(|| {
            Error::NoConvergence(format!("information solver failed at every order for {}", self.kind))
        })?;
        let mut best_a = grid[i];
        let (mut lo, mut hi) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let score = |a: f64| eval(a).unwrap_or(f64::NEG_INFINITY);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (score(c), score(d));
        for _ in 0..GOLDEN_STEPS {
            if fc >= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = score(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = score(d);
            }
        }
        for (a, y) in [(c, fc), (d, fd)] {
            if y > best_y {
                best_y = y;
                best_a = a;
            }
        }
        Ok(Optimum {
            value: best_y,
            alpha: best_a,
            failed_orders: self.failed_orders(),
        })
    }

    /// `sup_α (1-α)/α (value(α) − R)`, unclamped.
    pub fn exponent(&self, rate: f64) -> Result<ExponentValue> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::OutOfRange(format!("rate must be finite and >= 0, got {rate}")));
        }
        let opt = self.maximize(|a, v| (1.0 - a) / a * (v - rate))?;
        Ok(ExponentValue {
            value: opt.value.max(0.0),
            unclamped: opt.value,
            argmax_alpha: opt.alpha,
            failed_orders: opt.failed_orders,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub value: f64,
    pub alpha: f64,
    pub failed_orders: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentValue {
    /// Clamped at 0.
    pub value: f64,
    pub unclamped: f64,
    pub argmax_alpha: f64,
    /// Orders excluded from the supremum because the solver failed there.
    pub failed_orders: Vec<f64>,
}

pub fn achievability_exponent_iid(cq: &CqSource, rate: f64, cfg: &SolverConfig) -> Result<ExponentValue> {
    InfoCurve::new(cq, ExponentKind::AchievabilityIid, cfg).exponent(rate)
}

pub fn achievability_exponent_cc(cq: &CqSource, rate: f64, cfg: &SolverConfig) -> Result<ExponentValue> {
    InfoCurve::new(cq, ExponentKind::AchievabilityCc, cfg).exponent(rate)
}

pub fn sc_exponent_iid(cq: &CqSource, rate: f64) -> Result<ExponentValue> {
    InfoCurve::new(cq, ExponentKind::StrongConverseIid, &SolverConfig::default()).exponent(rate)
}

pub fn sc_exponent_cc(cq: &CqSource, rate: f64) -> Result<ExponentValue> {
    InfoCurve::new(cq, ExponentKind::StrongConverseCc, &SolverConfig::default()).exponent(rate)
}

fn check_size(m: f64) -> Result<()> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::OutOfRange(format!("codebook size must be >= 1, got {m}")));
    }
    Ok(())
}

/// `ln` of `2^{2/α-2} e^{(α-1)/α (info − ln M)}`; `info` is the blocklength-`n` total.
fn ln_achievability(alpha: f64, info: f64, ln_m: f64) -> f64 {
    (2.0 / alpha - 2.0) * std::f64::consts::LN_2 + (alpha - 1.0) / alpha * (info - ln_m)
}

/// `(α-1)/α (info − ln M + ln P)`, the log of the term subtracted (over 4) in the strong converse.
fn ln_sc_term(alpha: f64, info: f64, ln_m: f64, ln_prefactor: f64) -> f64 {
    (alpha - 1.0) / alpha * (info - ln_m + ln_prefactor)
}

/// `2^{2/α-2} e^{(α-1)/α (I*_α − ln M)}`, an upper bound on `½ E‖ρ^C − ρ_B‖₁`.
pub fn one_shot_achievability_bound(cq: &CqSource, m: f64, alpha: f64, cfg: &SolverConfig) -> Result<f64> {
    check_size(m)?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::OutOfRange(format!(
            "achievability order must lie in (1, 2), got {alpha}"
        )));
    }
    let info = sandwiched_info(cq, alpha, SandwichedKind::Renyi, cfg)?;
    if !info.converged {
        return Err(Error::NoConvergence(format!("I*_α at α = {alpha}")));
    }
    Ok(ln_achievability(alpha, info.value, m.ln()).exp())
}

/// `1 − 4 e^{(α-1)/α (I↓_{2-1/α} − ln M)}`, a lower bound on `½ E‖ρ^C − ρ_B‖₁`.
/// Reported unclamped; it is vacuous when negative.
pub fn one_shot_sc_bound(cq: &CqSource, m: f64, alpha: f64) -> Result<f64> {
    check_size(m)?;
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::OutOfRange(format!(
            "strong-converse order must lie in (1/2, 1), got {alpha}"
        )));
    }
    let info = petz_down_renyi_info(cq, 2.0 - 1.0 / alpha)?.value;
    Ok(1.0 - 4.0 * ln_sc_term(alpha, info, m.ln(), 0.0).exp())
}

/// The four exponents at one rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub rate: f64,
    pub e_star: f64,
    pub e_star_breve: f64,
    pub e_sc_down: f64,
    pub e_sc_down_breve: f64,
    pub argmax_e_star: f64,
    pub argmax_e_star_breve: f64,
    pub argmax_e_sc_down: f64,
    pub argmax_e_sc_down_breve: f64,
    pub mutual_information: f64,
    pub v: f64,
    pub v_breve: f64,
    /// Orders excluded from some supremum after a solver failure.
    pub failed_orders: Vec<f64>,
}

/// Cached exponent curves of one source; reuse it to sweep rates or blocklengths.
pub struct Exponents<'a> {
    cq: &'a CqSource,
    curves: [InfoCurve<'a>; 4],
    mutual_information: f64,
    v: f64,
    v_breve: f64,
}

impl<'a> Exponents<'a> {
    pub fn new(cq: &'a CqSource, cfg: &SolverConfig) -> Self {
        let var = variances(cq);
        Self {
            cq,
            curves: ExponentKind::ALL.map(|k| InfoCurve::new(cq, k, cfg)),
            mutual_information: mutual_information(cq),
            v: var.v,
            v_breve: var.v_breve,
        }
    }

    pub fn curve(&self, kind: ExponentKind) -> &InfoCurve<'a> {
        &self.curves[ExponentKind::ALL.iter().position(|&k| k == kind).expect("listed kind")]
    }

    pub fn mutual_information(&self) -> f64 {
        self.mutual_information
    }

    pub fn exponent(&self, kind: ExponentKind, rate: f64) -> Result<ExponentValue> {
        self.curve(kind).exponent(rate)
    }

    pub fn report(&self, rate: f64) -> Result<ExponentReport> {
        let [a, b, c, d] = ExponentKind::ALL.map(|k| self.exponent(k, rate));
        let (a, b, c, d) = (a?, b?, c?, d?);
        let mut failed: Vec<f64> = [&a, &b, &c, &d].iter().flat_map(|e| e.failed_orders.clone()).collect();
        failed.sort_by(f64::total_cmp);
        failed.dedup();
        Ok(ExponentReport {
            rate,
            e_star: a.value,
            e_star_breve: b.value,
            e_sc_down: c.value,
            e_sc_down_breve: d.value,
            argmax_e_star: a.argmax_alpha,
            argmax_e_star_breve: b.argmax_alpha,
            argmax_e_sc_down: c.argmax_alpha,
            argmax_e_sc_down_breve: d.argmax_alpha,
            mutual_information: self.mutual_information,
            v: self.v,
            v_breve: self.v_breve,
            failed_orders: failed,
        })
    }

    /// Bounds at blocklength `n` for the codebook size `M = ⌈e^{nR}⌉`.
    pub fn nshot_bounds(&self, n: usize, rate: f64) -> Result<BoundRecord> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::OutOfRange(format!("rate must be finite and >= 0, got {rate}")));
        }
        let m = (n as f64 * rate).exp().ceil();
        let mut rec = self.nshot_bounds_for_size(n, m)?;
        rec.rate = Some(rate);
        Ok(rec)
    }

    /// Bounds at blocklength `n` for a codebook of `M` codewords. All bounds
    /// use the rate `ln M / n` of the actual codebook.
    pub fn nshot_bounds_for_size(&self, n: usize, m: f64) -> Result<BoundRecord> {
        if n == 0 {
            return Err(Error::OutOfRange("blocklength must be positive".into()));
        }
        check_size(m)?;
        let nf = n as f64;
        let ln_m = m.ln();
        let r = ln_m / nf;
        let e_ach_iid = self.exponent(ExponentKind::AchievabilityIid, r)?;
        let e_ach_cc = self.exponent(ExponentKind::AchievabilityCc, r)?;
        let e_sc_iid = self.exponent(ExponentKind::StrongConverseIid, r)?;
        let ach_iid_tight = self
            .curve(ExponentKind::AchievabilityIid)
            .maximize(|a, v| -ln_achievability(a, nf * v, ln_m))?;
        let sc_iid = self
            .curve(ExponentKind::StrongConverseIid)
            .maximize(|a, v| -ln_sc_term(a, nf * v, ln_m, 0.0))?;
        let mut rec = BoundRecord {
            n,
            m,
            rate: None,
            effective_rate: r,
            ach_iid: (-nf * e_ach_iid.value).exp(),
            ach_iid_tight: (-ach_iid_tight.value).exp(),
            ach_iid_alpha: ach_iid_tight.alpha,
            sc_iid: 1.0 - 4.0 * (-sc_iid.value).exp(),
            sc_iid_clamped: 0.0,
            sc_iid_alpha: sc_iid.alpha,
            sc_iid_exponent: e_sc_iid.unclamped,
            ach_cc: None,
            ach_cc_tight: None,
            ach_cc_alpha: None,
            sc_cc: None,
            sc_cc_clamped: None,
            sc_cc_alpha: None,
            prefactor_cc: None,
            k_p: None,
            cc_unavailable: None,
        };
        rec.sc_iid_clamped = rec.sc_iid.max(0.0);
        let prior = rational_prior(self.cq).and_then(|p| type_class_probability(&p, n));
        match prior {
            Ok(t) => {
                let ach = self
                    .curve(ExponentKind::AchievabilityCc)
                    .maximize(|a, v| -ln_achievability(a, nf * v, ln_m))?;
                let sc = self
                    .curve(ExponentKind::StrongConverseCc)
                    .maximize(|a, v| -ln_sc_term(a, nf * v, ln_m, t.ln_exact))?;
                let sc_value = 1.0 - 4.0 * (-sc.value).exp();
                rec.ach_cc = Some((-nf * e_ach_cc.value).exp());
                rec.ach_cc_tight = Some((-ach.value).exp());
                rec.ach_cc_alpha = Some(ach.alpha);
                rec.sc_cc = Some(sc_value);
                rec.sc_cc_clamped = Some(sc_value.max(0.0));
                rec.sc_cc_alpha = Some(sc.alpha);
                rec.prefactor_cc = Some(t.exact);
                rec.k_p = Some(k_p(self.cq.prior()));
            }
            Err(e) => rec.cc_unavailable = Some(e.to_string()),
        }
        Ok(rec)
    }

    /// Moderate-deviation rows for `a_n = c n^{-t}` and `R_n = I + a_n`.
    pub fn moderate_deviation_scan(&self, t: f64, c: f64, ns: &[u64]) -> Result<Vec<ModerateRow>> {
        if !(t > 0.0 && t < 0.5) {
            return Err(Error::OutOfRange(format!("t must lie in (0, 1/2), got {t}")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::OutOfRange(format!("c must be positive, got {c}")));
        }
        if self.v <= MIN_VARIANCE {
            return Err(Error::Degenerate(format!(
                "moderate deviations need V(X:B) > 0; V = {:.3e} is below {MIN_VARIANCE:e}",
                self.v
            )));
        }
        let cc_ok = self.v_breve > MIN_VARIANCE;
        ns.iter()
            .map(|&n| {
                let nf = n as f64;
                let a_n = c * nf.powf(-t);
                let rate = self.mutual_information + a_n;
                let e = self.exponent(ExponentKind::AchievabilityIid, rate)?;
                let target = nf * a_n * a_n / (2.0 * self.v);
                let n_e = nf * e.value;
                let (n_e_cc, target_cc, ratio_cc) = if cc_ok {
                    let e = self.exponent(ExponentKind::AchievabilityCc, rate)?;
                    let tc = nf * a_n * a_n / (2.0 * self.v_breve);
                    (Some(nf * e.value), Some(tc), Some(nf * e.value / tc))
                } else {
                    (None, None, None)
                };
                Ok(ModerateRow {
                    n,
                    a_n,
                    n_a_n_sq: nf * a_n * a_n,
                    rate,
                    n_e_star: n_e,
                    n_e_star_breve: n_e_cc,
                    target_iid: target,
                    target_cc,
                    ratio_iid: n_e / target,
                    ratio_cc,
                    argmax_alpha: e.argmax_alpha,
                })
            })
            .collect()
    }
}

/// Finite-blocklength bounds on the expected trace distance.
///
/// `ach_*` are upper bounds of the form `e^{-n E(R)}`; `ach_*_tight` keep the
/// `2^{2/α-2}` factor and minimize over `α` directly. `sc_*` are lower
/// bounds, reported unclamped with a clamped companion; `sc_cc` uses the
/// exact type-class probability `prefactor_cc` in place of a polynomial factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub n: usize,
    pub m: f64,
    /// Requested rate, when the size was derived from one.
    pub rate: Option<f64>,
    pub effective_rate: f64,
    pub ach_iid: f64,
    pub ach_iid_tight: f64,
    pub ach_iid_alpha: f64,
    pub sc_iid: f64,
    pub sc_iid_clamped: f64,
    pub sc_iid_alpha: f64,
    pub sc_iid_exponent: f64,
    pub ach_cc: Option<f64>,
    pub ach_cc_tight: Option<f64>,
    pub ach_cc_alpha: Option<f64>,
    pub sc_cc: Option<f64>,
    pub sc_cc_clamped: Option<f64>,
    pub sc_cc_alpha: Option<f64>,
    pub prefactor_cc: Option<f64>,
    pub k_p: Option<f64>,
    /// Why the constant-composition entries are missing.
    pub cc_unavailable: Option<String>,
}

pub fn nshot_bounds(cq: &CqSource, n: usize, rate: f64, cfg: &SolverConfig) -> Result<BoundRecord> {
    Exponents::new(cq, cfg).nshot_bounds(n, rate)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModerateRow {
    pub n: u64,
    pub a_n: f64,
    pub n_a_n_sq: f64,
    pub rate: f64,
    pub n_e_star: f64,
    pub n_e_star_breve: Option<f64>,
    pub target_iid: f64,
    pub target_cc: Option<f64>,
    pub ratio_iid: f64,
    pub ratio_cc: Option<f64>,
    pub argmax_alpha: f64,
}

pub fn moderate_deviation_scan(
    cq: &CqSource,
    t: f64,
    c: f64,
    ns: &[u64],
    cfg: &SolverConfig,
) -> Result<Vec<ModerateRow>> {
    Exponents::new(cq, cfg).moderate_deviation_scan(t, c, ns)
}

/// One-sided slopes at `α = 1` of `I*_α`, `Ĭ*_α`, `I↓_{2-1/α}` and
/// `Ĭ↓_{2-1/α}`, Richardson-extrapolated from steps `h` and `h/10`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaOneSlopes {
    pub sandwiched_renyi: f64,
    pub sandwiched_augustin: f64,
    pub petz_down_renyi: f64,
    pub petz_down_augustin: f64,
}

pub fn alpha_one_slopes(cq: &CqSource, h: f64, cfg: &SolverConfig) -> Result<AlphaOneSlopes> {
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::OutOfRange(format!("step must lie in (0, 1/2), got {h}")));
    }
    let i = mutual_information(cq);
    let value = |kind: ExponentKind, alpha: f64| -> Result<f64> {
        InfoCurve::new(cq, kind, cfg)
            .value(alpha)
            .ok_or_else(|| Error::NoConvergence(format!("{kind} at α = {alpha}")))
    };
    let slope = |kind: ExponentKind, step: f64| -> Result<f64> {
        Ok(if kind.is_achievability() {
            (value(kind, 1.0 + step)? - i) / step
        } else {
            (i - value(kind, 1.0 - step)?) / step
        })
    };
    let extrapolate = |kind| -> Result<f64> { Ok((10.0 * slope(kind, h / 10.0)? - slope(kind, h)?) / 9.0) };
    Ok(AlphaOneSlopes {
        sandwiched_renyi: extrapolate(ExponentKind::AchievabilityIid)?,
        sandwiched_augustin: extrapolate(ExponentKind::AchievabilityCc)?,
        petz_down_renyi: extrapolate(ExponentKind::StrongConverseIid)?,
        petz_down_augustin: extrapolate(ExponentKind::StrongConverseCc)?,
    })
}

/// `K_p` of a source with an exact prior, for reference output.
pub fn source_k_p(cq: &CqSource) -> f64 {
    k_p(&rational_prior(cq)
        .map(|p| p.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>())
        .unwrap_or_else(|_| cq.prior().to_vec()))
}
