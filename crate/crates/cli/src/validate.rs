//! The cross-method comparison suite behind `lqlab validate`.
//!
//! Each check reports its worst discrepancy against the tolerance it must
//! meet; the command exits zero only when every applicable check passes.
//! Monte Carlo comparisons are normalized by three standard errors, so
//! their tolerance column reads 1.

use crate::args::RunRequest;
use crate::commands::{base_row, mc_estimate_row, survival_by_inversion, survival_estimate_row};
use crate::table::Row;
use lqlab::error::Result;
use lqlab::inversion::survival_sp_fallback;
use lqlab::mcsim::estimate_survival;
use lqlab::models::LevyModel;
use lqlab::tail_heavy::{regime_prefactor, window_min_tail_heavy_regime, RegimeSpec};
use lqlab::tail_light::theta_star;
use lqlab::{closedform, fluctuation};

pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, worst: f64, tol: f64) -> Self {
        Self { name, worst, tol, passed: worst.is_finite() && worst <= tol }
    }
}

pub fn summarize(checks: &[Check]) -> String {
    let mut out = String::from("check                              worst         tolerance  result\n");
    for c in checks {
        out.push_str(&format!(
            "{:<34} {:<13.6e} {:<10.1e} {}\n",
            c.name,
            c.worst,
            c.tol,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    let n_fail = checks.iter().filter(|c| !c.passed).count();
    if n_fail == 0 {
        out.push_str("all checks passed\n");
    } else {
        out.push_str(&format!("{n_fail} check(s) FAILED\n"));
    }
    out
}

const SN_GRID_T: [f64; 3] = [0.5, 1.0, 2.0];
const SN_GRID_U: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
const SP_GRID_T: [f64; 2] = [1.0, 2.0];
const SP_GRID_U: [f64; 3] = [0.25, 0.5, 1.0];

fn log_grid() -> Vec<f64> {
    (0..10)
        .map(|i| 10f64.powf(-1.0 + 2.0 * f64::from(i) / 9.0))
        .collect()
}

fn ratio_identity_worst(model: &LevyModel) -> Result<f64> {
    let grid = log_grid();
    let mut worst = 0.0f64;
    for &x in &grid {
        for &q in &grid {
            let l = fluctuation::window_min_transform(model, x, q)?.value;
            let ym = fluctuation::running_max_transform(model, x, q)?.value;
            let qe = fluctuation::stationary_transform(model, x)?.value;
            worst = worst.max((l * ym - qe).abs());
        }
    }
    Ok(worst)
}

fn theta_consistency_worst(model: &LevyModel) -> Result<f64> {
    let a = theta_star(model)?.theta_star;
    let b = fluctuation::right_inverse(model, 0.0)?.theta;
    Ok((a - b).abs())
}

/// Monotone convergence onto the removable singularity of the spectrally
/// positive transform: worst final relative gap over q in {1, 2}, set to
/// infinity if any approach fails to be monotone.
fn singularity_worst(model: &LevyModel) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in [1.0, 2.0] {
        let ph = fluctuation::dual_right_inverse(model, q)?.theta;
        let center = fluctuation::window_min_transform_sp(model, ph, q)?.value;
        let mut prev = f64::INFINITY;
        let mut gap = f64::INFINITY;
        for k in 4..=8 {
            let d = 10f64.powi(-k);
            let hi = fluctuation::window_min_transform_sp(model, ph + d, q)?.value;
            let lo = fluctuation::window_min_transform_sp(model, ph - d, q)?.value;
            gap = ((hi - center).abs()).max((lo - center).abs()) / center;
            if gap > prev * (1.0 + 1e-12) {
                return Ok(f64::INFINITY); // not monotone
            }
            prev = gap;
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

pub fn run(req: &RunRequest) -> Result<(Vec<Row>, Vec<Check>)> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let model = &req.model;

    match model {
        LevyModel::BrownianDrift { .. } => {
            // closed form vs inversion vs Monte Carlo on the reference grid
            let mut worst_inv = 0.0f64;
            let mut worst_mc = 0.0f64;
            let mut clamp_events = 0u32;
            for &t in &SN_GRID_T {
                for &u in &SN_GRID_U {
                    let cf = closedform::survival_brownian(t, u)?;
                    rows.push(Row {
                        t: Some(t),
                        u: Some(u),
                        value: cf,
                        ..base_row(req, "closed")
                    });
                    let inv = survival_by_inversion(req, t, u)?;
                    clamp_events += u32::from(inv.clamped);
                    rows.push(survival_estimate_row(req, t, u, &inv));
                    worst_inv = worst_inv.max((inv.value - cf).abs());
                    let mc = estimate_survival(model, t, u, &req.mc)?;
                    rows.push(mc_estimate_row(req, t, Some(u), None, &mc));
                    worst_mc = worst_mc.max((mc.mean - cf).abs() / (3.0 * mc.stderr));
                }
            }
            checks.push(Check::new("closed-vs-inversion (abs)", worst_inv, 5e-3));
            checks.push(Check::new("closed-vs-mc (3 stderr units)", worst_mc, 1.0));
            checks.push(Check::new("clamp-events (count)", f64::from(clamp_events), 0.0));
            checks.push(Check::new("ratio-identity (abs)", ratio_identity_worst(model)?, 1e-9));
            checks.push(Check::new("theta*-vs-phi(0) (abs)", theta_consistency_worst(model)?, 1e-10));
        }
        LevyModel::CompoundPoissonPositive { .. } => {
            let mut worst_mc = 0.0f64;
            let mut worst_fb = 0.0f64;
            for &t in &SP_GRID_T {
                for &u in &SP_GRID_U {
                    let inv = survival_by_inversion(req, t, u)?;
                    rows.push(survival_estimate_row(req, t, u, &inv));
                    let fb = survival_sp_fallback(model, t, u, &req.inversion)?;
                    rows.push(survival_estimate_row(req, t, u, &fb));
                    worst_fb = worst_fb.max((inv.value - fb.value).abs());
                    let mc = estimate_survival(model, t, u, &req.mc)?;
                    rows.push(mc_estimate_row(req, t, Some(u), None, &mc));
                    worst_mc = worst_mc.max((mc.mean - inv.value).abs() / (3.0 * mc.stderr));
                }
            }
            checks.push(Check::new("inversion-vs-mc (3 stderr units)", worst_mc, 1.0));
            checks.push(Check::new("primary-vs-fallback (abs)", worst_fb, 1e-2));
            checks.push(Check::new("ratio-identity (abs)", ratio_identity_worst(model)?, 1e-9));
            checks.push(Check::new("singularity-convergence (rel)", singularity_worst(model)?, 1e-6));
        }
        LevyModel::CompoundPoissonNegative { .. } => {
            let mut worst_mc = 0.0f64;
            for &t in &SP_GRID_T {
                for &u in &SP_GRID_U {
                    let inv = survival_by_inversion(req, t, u)?;
                    rows.push(survival_estimate_row(req, t, u, &inv));
                    let mc = estimate_survival(model, t, u, &req.mc)?;
                    rows.push(mc_estimate_row(req, t, Some(u), None, &mc));
                    worst_mc = worst_mc.max((mc.mean - inv.value).abs() / (3.0 * mc.stderr));
                }
            }
            checks.push(Check::new("inversion-vs-mc (3 stderr units)", worst_mc, 1.0));
            checks.push(Check::new("ratio-identity (abs)", ratio_identity_worst(model)?, 1e-9));
            checks.push(Check::new("theta*-vs-phi(0) (abs)", theta_consistency_worst(model)?, 1e-10));
        }
        LevyModel::Stable { alpha, beta } => {
            // asymptotic structure; Monte Carlo agreement is not asserted
            // because the stationary start is only approximate
            let p0 = regime_prefactor(*alpha, RegimeSpec::Proportional { a: 1e-8 });
            let tl = regime_prefactor(*alpha, RegimeSpec::TLarge);
            checks.push(Check::new("regime-continuity a->0 (rel)", ((p0 - tl) / tl).abs(), 1e-6));
            let mut worst_match = 0.0f64;
            for a in [1e2, 1e3, 1e4] {
                let prop = window_min_tail_heavy_regime(model, RegimeSpec::Proportional { a }, 10.0)?;
                let small = window_min_tail_heavy_regime(model, RegimeSpec::TSmall, a * 10.0)?;
                worst_match = worst_match.max((prop.value / small.value - 1.0).abs() * a);
            }
            checks.push(Check::new("regime-matching a->inf (gap*a)", worst_match, 1.0));
            let rv_hi = window_min_tail_heavy_regime(model, RegimeSpec::TLarge, 2e3)?.value;
            let rv_lo = window_min_tail_heavy_regime(model, RegimeSpec::TLarge, 1e3)?.value;
            checks.push(Check::new(
                "regular-variation ratio (abs)",
                (rv_hi / rv_lo - 2f64.powf(1.0 - alpha)).abs(),
                1e-12,
            ));
            if *beta == 1.0 {
                checks.push(Check::new("ratio-identity (abs)", ratio_identity_worst(model)?, 1e-9));
                // informational rows: fallback inversion and the (approximate)
                // MC. Nothing is asserted against the burn-in start, so the
                // path budget is capped; `simulate` runs full-scale studies.
                let mc_cfg = lqlab::mcsim::McConfig {
                    paths: req.mc.paths.min(10_000),
                    dt: req.mc.dt.max(0.02),
                    ..req.mc.clone()
                };
                for &t in &SP_GRID_T {
                    for &u in &SP_GRID_U {
                        let inv = survival_by_inversion(req, t, u)?;
                        rows.push(survival_estimate_row(req, t, u, &inv));
                        let mc = estimate_survival(model, t, u, &mc_cfg)?;
                        rows.push(mc_estimate_row(req, t, Some(u), None, &mc));
                    }
                }
            }
        }
    }
    Ok((rows, checks))
}
