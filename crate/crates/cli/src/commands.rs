//! Dispatch of parsed requests onto the library, one CSV row per grid
//! point per method.

use crate::args::{Command, MethodChoice, RunRequest, TransformChoice};
use crate::table::{Flags, Row};
use crate::validate;
use lqlab::error::{Error, Result};
use lqlab::inversion::{laplace_of_min, survival_sn, survival_sp, SurvivalEstimate};
use lqlab::mcsim::{estimate_laplace, estimate_survival, McEstimate};
use lqlab::models::LevyModel;
use lqlab::tail_heavy::{window_min_tail_heavy, window_min_tail_heavy_regime, RegimeSpec};
use lqlab::tail_light::{window_min_log_asymptote, window_min_log_asymptote_regime};
use lqlab::{closedform, fluctuation};

pub enum Outcome {
    Table(Vec<Row>),
    Validation { rows: Vec<Row>, summary: String, passed: bool },
}

pub fn execute(req: &RunRequest) -> Result<Outcome> {
    match req.command {
        Command::Survival => survival_rows(req).map(Outcome::Table),
        Command::Transform => transform_rows(req).map(Outcome::Table),
        Command::Mgf => mgf_rows(req).map(Outcome::Table),
        Command::AsympHeavy => asymp_heavy_rows(req).map(Outcome::Table),
        Command::AsympLight => asymp_light_rows(req).map(Outcome::Table),
        Command::Simulate => simulate_rows(req).map(Outcome::Table),
        Command::Validate => {
            let (rows, checks) = validate::run(req)?;
            let passed = checks.iter().all(|c| c.passed);
            Ok(Outcome::Validation { rows, summary: validate::summarize(&checks), passed })
        }
    }
}

pub(crate) fn base_row(req: &RunRequest, method: impl Into<String>) -> Row {
    Row {
        model: req.model.to_string(),
        command: req.command.as_str(),
        method: method.into(),
        t: None,
        u: None,
        x: None,
        q: None,
        value: f64::NAN,
        wide_value: false,
        stderr: None,
        flags: Flags::default(),
    }
}

pub(crate) fn grid_point_context(t: Option<f64>, u: Option<f64>, x: Option<f64>) -> String {
    let fmt = |name: &str, v: Option<f64>| v.map(|v| format!("{name}={v}")).unwrap_or_default();
    [fmt("t", t), fmt("u", u), fmt("x", x)]
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn at_point<T>(r: Result<T>, t: Option<f64>, u: Option<f64>, x: Option<f64>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::Numeric {
            operation: "grid evaluation",
            message: format!("at {}: {other}", grid_point_context(t, u, x)),
        },
    })
}

pub(crate) fn survival_estimate_row(req: &RunRequest, t: f64, u: f64, est: &SurvivalEstimate) -> Row {
    Row {
        t: Some(t),
        u: Some(u),
        value: est.value,
        stderr: est.stderr,
        flags: Flags {
            clamped: est.clamped,
            fallback_inversion: est.fallback,
            ..Flags::default()
        },
        ..base_row(req, est.method.as_str())
    }
}

pub(crate) fn mc_estimate_row(req: &RunRequest, t: f64, u: Option<f64>, x: Option<f64>, est: &McEstimate) -> Row {
    Row {
        t: Some(t),
        u,
        x,
        value: est.mean,
        stderr: Some(est.stderr),
        flags: Flags {
            approximate_stationarity: est.approximate_stationarity,
            ..Flags::default()
        },
        ..base_row(req, est.method)
    }
}

/// Survival by the requested route. The inversion route picks the
/// spectrally negative branch when the model supports it.
pub(crate) fn survival_by_inversion(req: &RunRequest, t: f64, u: f64) -> Result<SurvivalEstimate> {
    if req.model.is_spectrally_negative() {
        survival_sn(&req.model, t, u, &req.inversion)
    } else {
        survival_sp(&req.model, t, u, &req.inversion)
    }
}

fn survival_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let method = req.method.unwrap_or({
        if req.model == (LevyModel::BrownianDrift { sigma: 1.0 }) {
            MethodChoice::Closed
        } else {
            MethodChoice::Invert
        }
    });
    let mut rows = Vec::new();
    for &t in &req.t {
        for &u in &req.u {
            let row = match method {
                MethodChoice::Closed => {
                    let v = at_point(closedform::survival_brownian(t, u), Some(t), Some(u), None)?;
                    Row { t: Some(t), u: Some(u), value: v, ..base_row(req, "closed") }
                }
                MethodChoice::Invert => {
                    let est = at_point(survival_by_inversion(req, t, u), Some(t), Some(u), None)?;
                    survival_estimate_row(req, t, u, &est)
                }
                MethodChoice::Mc => {
                    let est = at_point(estimate_survival(&req.model, t, u, &req.mc), Some(t), Some(u), None)?;
                    mc_estimate_row(req, t, Some(u), None, &est)
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn transform_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let qs: Vec<Option<f64>> = if req.which == TransformChoice::Stationary {
        vec![None]
    } else {
        req.q.iter().copied().map(Some).collect()
    };
    for &x in &req.x {
        for &q in &qs {
            let (name, value) = match (req.which, q) {
                (TransformChoice::Min, Some(q)) => {
                    ("min", at_point(fluctuation::window_min_transform(&req.model, x, q), None, None, Some(x))?.value)
                }
                (TransformChoice::MinTail, Some(q)) => (
                    "min-tail",
                    at_point(fluctuation::window_min_tail_transform(&req.model, x, q), None, None, Some(x))?.value,
                ),
                (TransformChoice::RunningMax, Some(q)) => (
                    "running-max",
                    at_point(fluctuation::running_max_transform(&req.model, x, q), None, None, Some(x))?.value,
                ),
                (TransformChoice::Stationary, _) => (
                    "stationary",
                    at_point(fluctuation::stationary_transform(&req.model, x), None, None, Some(x))?.value,
                ),
                _ => unreachable!("q list validated non-empty"),
            };
            rows.push(Row { x: Some(x), q, value, ..base_row(req, name) });
        }
    }
    Ok(rows)
}

fn mgf_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let method = req.method.unwrap_or(MethodChoice::Invert);
    let mut rows = Vec::new();
    for &x in &req.x {
        for &t in &req.t {
            match method {
                MethodChoice::Invert => {
                    let v = at_point(laplace_of_min(&req.model, x, t, &req.inversion), Some(t), None, Some(x))?;
                    rows.push(Row { t: Some(t), x: Some(x), value: v, ..base_row(req, "invert") });
                }
                MethodChoice::Mc => {
                    let est = at_point(estimate_laplace(&req.model, x, t, &req.mc), Some(t), None, Some(x))?;
                    rows.push(mc_estimate_row(req, t, None, Some(x), &est));
                }
                MethodChoice::Closed => {
                    return Err(Error::Parse {
                        index: 0,
                        offset: 0,
                        message: "mgf has no closed-form route; use --method invert or mc".into(),
                    })
                }
            }
        }
    }
    Ok(rows)
}

fn asymp_heavy_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let asym = Flags { asymptotic: true, ..Flags::default() };
    match req.regime {
        None => {
            for &u in &req.u {
                for &t in &req.big_t {
                    let r = at_point(window_min_tail_heavy(&req.model, u, t), Some(t), Some(u), None)?;
                    rows.push(Row {
                        t: Some(t),
                        u: Some(u),
                        value: r.value,
                        flags: asym,
                        ..base_row(req, r.formula)
                    });
                }
            }
        }
        Some(regime) => {
            let (args, is_u) = regime_arguments(req, regime);
            for &v in args {
                let r = at_point(window_min_tail_heavy_regime(&req.model, regime, v), None, None, None)?;
                rows.push(Row {
                    t: (!is_u).then_some(v),
                    u: is_u.then_some(v),
                    value: r.value,
                    flags: asym,
                    ..base_row(req, r.formula)
                });
            }
        }
    }
    Ok(rows)
}

fn regime_arguments(req: &RunRequest, regime: RegimeSpec) -> (&Vec<f64>, bool) {
    match regime {
        RegimeSpec::TSmall => (&req.u, true),
        _ => (&req.big_t, false),
    }
}

fn asymp_light_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let asym = Flags { asymptotic: true, ..Flags::default() };
    match req.regime {
        None => {
            for &u in &req.u {
                for &t in &req.big_t {
                    let v = at_point(window_min_log_asymptote(&req.model, u, t), Some(t), Some(u), None)?;
                    rows.push(Row {
                        t: Some(t),
                        u: Some(u),
                        value: v,
                        wide_value: true,
                        flags: asym,
                        ..base_row(req, "log-asymptote")
                    });
                }
            }
        }
        Some(regime) => {
            let (args, is_u) = regime_arguments(req, regime);
            let name = match regime {
                RegimeSpec::TSmall => "short-window",
                RegimeSpec::Proportional { .. } => "proportional",
                RegimeSpec::TLarge => "long-window",
            };
            for &v in args {
                let val =
                    at_point(window_min_log_asymptote_regime(&req.model, regime, v), None, None, None)?;
                rows.push(Row {
                    t: (!is_u).then_some(v),
                    u: is_u.then_some(v),
                    value: val,
                    wide_value: true,
                    flags: asym,
                    ..base_row(req, name)
                });
            }
        }
    }
    Ok(rows)
}

fn simulate_rows(req: &RunRequest) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &t in &req.t {
        for &u in &req.u {
            let est = at_point(estimate_survival(&req.model, t, u, &req.mc), Some(t), Some(u), None)?;
            rows.push(mc_estimate_row(req, t, Some(u), None, &est));
        }
        for &x in &req.x {
            let est = at_point(estimate_laplace(&req.model, x, t, &req.mc), Some(t), None, Some(x))?;
            rows.push(mc_estimate_row(req, t, None, Some(x), &est));
        }
    }
    Ok(rows)
}
