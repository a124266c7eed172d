//! The five subcommands. Each returns its table, the resolved configuration
//! and whether any row was flagged.

use serde_json::{json, Value};
use softcover_core::codebook::{composition_counts, expected_td, rational_prior, CodebookKind};
use softcover_core::exponent::Exponents;
use softcover_core::info::solver::{sandwiched_info, SandwichedKind};
use softcover_core::info::{mutual_information, petz_down_augustin_info, petz_down_renyi_info, variances};
use softcover_core::verify::{run_suite, Suite};
use softcover_core::{InfoResult, SolverConfig};

use crate::model::{load_model, Model};
use crate::report::{Cell, Table};
use crate::{CliError, Status};

pub type CommandResult = Result<(Status, Table, Value), CliError>;

/// Exact enumeration tolerance for the achievability self-check.
pub const ACH_TOL: f64 = 1e-10;

/// Suites run by `verify` when no selector is given.
pub const DEFAULT_SUITES: [Suite; 8] = [
    Suite::Theta,
    Suite::TraceInequality,
    Suite::Orderings,
    Suite::Derivatives,
    Suite::Additivity,
    Suite::TypeClass,
    Suite::Positivity,
    Suite::Moderate,
];

fn model_config(path: &str, m: &Model) -> Value {
    json!({
        "model": path,
        "alphabet": m.labels,
        "prior": m.source.prior(),
        "dim": m.source.dim(),
        "metadata": m.metadata,
    })
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn info(path: &str, alphas: &[f64]) -> CommandResult {
    let model = load_model(path)?;
    let cq = &model.source;
    let cfg = SolverConfig::default();
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 2.0) || **a == 1.0) {
        return Err(validation(format!("order {a} is outside (0, 2] \\ {{1}}")));
    }
    let mut table = Table::new(&[
        "alpha",
        "I_star",
        "I_star_breve",
        "I_down",
        "I_down_breve",
        "I",
        "V",
        "V_breve",
        "status",
    ]);
    let mut status = Status::Ok;
    for &a in alphas {
        let mut failed = Vec::new();
        let mut cell = |name: &str, r: Option<softcover_core::Result<InfoResult>>| -> Result<Cell, CliError> {
            match r {
                None => Ok(Cell::Empty),
                Some(Ok(r)) if r.converged => Ok(Cell::Num(r.value)),
                Some(Ok(r)) => {
                    failed.push(name.to_string());
                    Ok(Cell::Num(r.value))
                }
                Some(Err(softcover_core::Error::NoConvergence(_))) => {
                    failed.push(name.to_string());
                    Ok(Cell::Num(f64::NAN))
                }
                Some(Err(e)) => Err(e.into()),
            }
        };
        let sandwiched = a > 1.0;
        let row = vec![
            Cell::Num(a),
            cell(
                "I_star",
                sandwiched.then(|| sandwiched_info(cq, a, SandwichedKind::Renyi, &cfg)),
            )?,
            cell(
                "I_star_breve",
                sandwiched.then(|| sandwiched_info(cq, a, SandwichedKind::Augustin, &cfg)),
            )?,
            cell("I_down", Some(petz_down_renyi_info(cq, a)))?,
            cell("I_down_breve", Some(petz_down_augustin_info(cq, a)))?,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            if failed.is_empty() {
                "ok".into()
            } else {
                status = Status::SolverFailure;
                format!("no_convergence: {}", failed.join(";")).into()
            },
        ];
        table.push(row);
    }
    let var = variances(cq);
    table.push(vec![
        "summary".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        mutual_information(cq).into(),
        var.v.into(),
        var.v_breve.into(),
        "ok".into(),
    ]);
    let mut config = model_config(path, &model);
    config["alpha"] = json!(alphas);
    Ok((status, table, config))
}

pub fn exponent(path: &str, rates: &[f64], n: Option<usize>) -> CommandResult {
    let model = load_model(path)?;
    let cq = &model.source;
    if let Some(r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(validation(format!("rate must be finite and >= 0, got {r}")));
    }
    if n == Some(0) {
        return Err(validation("blocklength must be positive"));
    }
    let cc_note = n.and_then(|n| {
        rational_prior(cq)
            .and_then(|p| composition_counts(&p, n))
            .err()
            .map(|e| format!("cc columns omitted at n = {n}: {e}"))
    });
    let cfg = SolverConfig::default();
    let ex = Exponents::new(cq, &cfg);
    let mut table = Table::new(&[
        "rate",
        "E_star",
        "E_star_breve",
        "E_sc_down",
        "E_sc_down_breve",
        "argmax_E_star",
        "argmax_E_star_breve",
        "argmax_E_sc_down",
        "argmax_E_sc_down_breve",
        "I",
        "V",
        "V_breve",
        "failed_orders",
        "note",
    ]);
    let mut status = Status::Ok;
    for &r in rates {
        let e = ex.report(r)?;
        let cc = |v: f64| if cc_note.is_some() { Cell::Empty } else { Cell::Num(v) };
        if !e.failed_orders.is_empty() {
            status = Status::SolverFailure;
        }
        let failed: Vec<String> = e
            .failed_orders
            .iter()
            .map(|a| crate::report::format_float(*a))
            .collect();
        table.push(vec![
            r.into(),
            e.e_star.into(),
            cc(e.e_star_breve),
            e.e_sc_down.into(),
            cc(e.e_sc_down_breve),
            e.argmax_e_star.into(),
            cc(e.argmax_e_star_breve),
            e.argmax_e_sc_down.into(),
            cc(e.argmax_e_sc_down_breve),
            e.mutual_information.into(),
            e.v.into(),
            e.v_breve.into(),
            failed.join(";").into(),
            cc_note.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    let mut config = model_config(path, &model);
    config["rate"] = json!(rates);
    config["n"] = json!(n);
    Ok((status, table, config))
}

#[derive(Clone, Debug)]
pub struct SimulateRequest {
    pub kind: CodebookKind,
    pub n: usize,
    pub m: Option<usize>,
    pub rate: Option<f64>,
    pub samples: usize,
    pub exact: bool,
    pub seed: u64,
}

/// `M = ⌈e^{nR}⌉`, when it fits.
fn size_from_rate(n: usize, rate: f64) -> Result<usize, CliError> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(validation(format!("rate must be finite and >= 0, got {rate}")));
    }
    let m = (n as f64 * rate).exp().ceil();
    if m > u32::MAX as f64 {
        return Err(validation(format!("codebook size e^(nR) = {m:e} is too large")));
    }
    Ok(m as usize)
}

pub fn simulate(path: &str, req: &SimulateRequest) -> CommandResult {
    let model = load_model(path)?;
    let cq = &model.source;
    if req.n == 0 {
        return Err(validation("blocklength must be positive"));
    }
    let m = match (req.m, req.rate) {
        (Some(m), _) => m,
        (None, Some(r)) => size_from_rate(req.n, r)?,
        (None, None) => return Err(validation("give --M or --rate")),
    };
    if m == 0 {
        return Err(validation("codebook size must be positive"));
    }
    let est = expected_td(cq, req.kind, req.n, m, req.exact, req.samples, req.seed)?;
    let cfg = SolverConfig::default();
    let rec = Exponents::new(cq, &cfg).nshot_bounds_for_size(req.n, m as f64)?;
    let bound = match req.kind {
        CodebookKind::Iid => Some(rec.ach_iid_tight),
        CodebookKind::ConstantComposition => rec.ach_cc_tight,
    };
    let slack = if est.exact {
        ACH_TOL
    } else {
        4.0 * est.half_width_95 + ACH_TOL
    };
    let violated = bound.is_some_and(|b| est.mean > b + slack);
    let mut table = Table::new(&[
        "kind",
        "n",
        "M",
        "effective_rate",
        "mean",
        "half_width_95",
        "samples",
        "exact",
        "ach_iid",
        "ach_iid_tight",
        "sc_iid",
        "sc_iid_clamped",
        "ach_cc",
        "ach_cc_tight",
        "sc_cc",
        "sc_cc_clamped",
        "prefactor_cc",
        "k_p",
        "ach_check",
        "note",
    ]);
    table.push(vec![
        req.kind.to_string().into(),
        req.n.into(),
        m.into(),
        rec.effective_rate.into(),
        est.mean.into(),
        est.half_width_95.into(),
        est.samples.into(),
        est.exact.into(),
        rec.ach_iid.into(),
        rec.ach_iid_tight.into(),
        rec.sc_iid.into(),
        rec.sc_iid_clamped.into(),
        rec.ach_cc.into(),
        rec.ach_cc_tight.into(),
        rec.sc_cc.into(),
        rec.sc_cc_clamped.into(),
        rec.prefactor_cc.into(),
        rec.k_p.into(),
        if violated { "violated" } else { "ok" }.into(),
        rec.cc_unavailable.clone().map_or(Cell::Empty, Cell::Text),
    ]);
    if violated {
        eprintln!(
            "achievability bound violated: mean {} > bound {} + {slack:e}",
            est.mean,
            bound.unwrap_or(f64::NAN)
        );
    }
    let mut config = model_config(path, &model);
    config["kind"] = json!(req.kind);
    config["n"] = json!(req.n);
    config["M"] = json!(m);
    config["rate"] = json!(req.rate);
    config["samples"] = json!(req.samples);
    config["exact"] = json!(req.exact);
    let status = if violated { Status::Violation } else { Status::Ok };
    Ok((status, table, config))
}

fn select_suites(names: &[String]) -> Result<Vec<Suite>, CliError> {
    let mut out: Vec<Suite> = Vec::new();
    for name in names {
        let add: Vec<Suite> = match name.trim() {
            "default" => DEFAULT_SUITES.to_vec(),
            "all" => Suite::ALL.to_vec(),
            s => vec![Suite::from_name(s).ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                validation(format!(
                    "unknown suite {s:?}; known: default, all, {}",
                    known.join(", ")
                ))
            })?],
        };
        for s in add {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

pub fn verify(names: &[String], seed: u64) -> CommandResult {
    let suites = select_suites(names)?;
    let mut table = Table::new(&[
        "suite",
        "status",
        "cases",
        "worst",
        "summary",
        "failures",
        "first_failure",
    ]);
    let mut status = Status::Ok;
    for s in &suites {
        let r = run_suite(*s, seed)?;
        if !r.passed() {
            status = Status::Violation;
            for f in &r.failures {
                eprintln!("{}: {f}", s.name());
            }
        }
        table.push(vec![
            s.name().into(),
            if r.passed() { "pass" } else { "fail" }.into(),
            r.cases.into(),
            r.worst.into(),
            r.summary.clone().into(),
            r.failures.len().into(),
            r.failures.first().cloned().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
    Ok((status, table, json!({ "suites": names })))
}

pub fn moderate(path: &str, t: f64, c: f64, ns: &[u64]) -> CommandResult {
    let model = load_model(path)?;
    if ns.contains(&0) {
        return Err(validation("blocklengths must be positive"));
    }
    let cfg = SolverConfig::default();
    let rows = Exponents::new(&model.source, &cfg).moderate_deviation_scan(t, c, ns)?;
    let mut table = Table::new(&[
        "n",
        "a_n",
        "n_a_n_sq",
        "rate",
        "n_E_star",
        "n_E_star_breve",
        "target_iid",
        "target_cc",
        "ratio_iid",
        "ratio_cc",
        "argmax_alpha",
    ]);
    for r in rows {
        table.push(vec![
            r.n.into(),
            r.a_n.into(),
            r.n_a_n_sq.into(),
            r.rate.into(),
            r.n_e_star.into(),
            r.n_e_star_breve.into(),
            r.target_iid.into(),
            r.target_cc.into(),
            r.ratio_iid.into(),
            r.ratio_cc.into(),
            r.argmax_alpha.into(),
        ]);
    }
    let mut config = model_config(path, &model);
    config["t"] = json!(t);
    config["c"] = json!(c);
    config["n_list"] = json!(ns);
    Ok((Status::Ok, table, config))
}
