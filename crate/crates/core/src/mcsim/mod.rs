//! Monte Carlo oracle for the window minimum.
//!
//! The reflection representation makes simulating the reflected path
//! unnecessary: with a stationary start `Q(0) = q0`,
//! `M(t) > u  iff  q0 + inf_{s<=t} Y(s) > u`, so only the running infimum
//! of the free net input is sampled. Compound Poisson paths are simulated
//! exactly event by event (between jumps the path is linear, so segment
//! minima sit at segment endpoints); Brownian paths walk a grid with the
//! exact bridge-minimum law sampled inside each step (on by default, which
//! removes the O(sqrt(dt)) minimum bias); stable paths walk the grid with
//! Chambers–Mallows–Stuck increments.
//!
//! Determinism: path `i` draws from ChaCha8 stream `i` of the configured
//! seed, and the engine reduces batches in a fixed order, so estimates are
//! bit-identical for any `workers` setting and any scheduling.

mod engine;

use crate::error::{Error, Result};
use crate::fluctuation::{self, StationaryLaw};
use crate::models::LevyModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Path count, grid step, seed, worker lanes and variance knobs for one
/// estimator run.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub paths: u64,
    /// Grid step for Brownian and stable paths (event-driven compound
    /// Poisson paths ignore it).
    pub dt: f64,
    pub seed: u64,
    pub workers: usize,
    /// Sample the exact Brownian bridge minimum inside each grid step.
    pub bridge_correction: bool,
    /// Burn-in horizon for the approximate stable stationary start.
    pub stable_burn_in: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            dt: 0.01,
            seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            bridge_correction: true,
            stable_burn_in: 50.0,
        }
    }
}

impl McConfig {
    pub fn validate(&self, model: &LevyModel) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidParameter("paths must be >= 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        if !(self.stable_burn_in.is_finite() && self.stable_burn_in > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stable_burn_in must be > 0, got {}",
                self.stable_burn_in
            )));
        }
        if matches!(model, LevyModel::BrownianDrift { .. })
            && !self.bridge_correction
            && self.dt > 0.01
        {
            return Err(Error::InvalidParameter(
                "Brownian paths without bridge correction need dt <= 0.01".into(),
            ));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate: sample mean, its standard error, the sample
/// count and the method tag. `approximate_stationarity` marks runs whose
/// stationary start used the stable burn-in fallback.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub method: &'static str,
    pub approximate_stationarity: bool,
}

/// Per-path RNG: one ChaCha8 stream per path index under the run seed.
fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

fn clamp_open_unit(u: f64) -> f64 {
    u.clamp(1e-12, 1.0 - 1e-12)
}

/// One standard stable variate S_alpha(1, beta, 0), alpha in (1,2), by the
/// Chambers–Mallows–Stuck transform.
fn sample_stable_standard(alpha: f64, beta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let v = (clamp_open_unit(rng.random::<f64>()) - 0.5) * std::f64::consts::PI;
    let w: f64 = Exp1.sample(rng);
    let w = w.max(1e-300);
    let ta = (half_pi * alpha).tan();
    let b = (beta * ta).atan() / alpha;
    let s = (1.0 + beta * beta * ta * ta).powf(0.5 / alpha);
    s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Endpoint and running infimum of the net input over `[0, t]`. When
/// `stop_below` is set the walk returns as soon as the infimum reaches it
/// (the indicator `q0 + inf > u` is then already decided); `y_end` is NaN
/// in that case.
#[derive(Debug, Clone, Copy)]
struct PathSample {
    y_end: f64,
    y_min: f64,
}

fn simulate_net_input(
    model: &LevyModel,
    t: f64,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
    stop_below: Option<f64>,
) -> PathSample {
    let stopped = |m: f64| stop_below.is_some_and(|s| m <= s);
    match *model {
        LevyModel::BrownianDrift { sigma } => {
            let n = (t / cfg.dt).ceil().max(1.0) as u64;
            let h = t / n as f64;
            let sig_h = sigma * h.sqrt();
            let mut y = 0.0;
            let mut y_min = 0.0f64;
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(rng);
                let y_next = y + sig_h * z - h;
                let m = if cfg.bridge_correction {
                    // exact bridge-minimum law between the grid points
                    let u = clamp_open_unit(rng.random::<f64>());
                    let d = y_next - y;
                    0.5 * (y + y_next - (d * d - 2.0 * sigma * sigma * h * u.ln()).sqrt())
                } else {
                    y_next
                };
                y_min = y_min.min(m);
                y = y_next;
                if stopped(y_min) {
                    return PathSample { y_end: f64::NAN, y_min };
                }
            }
            PathSample { y_end: y, y_min }
        }
        LevyModel::CompoundPoissonPositive { lambda, mu }
        | LevyModel::CompoundPoissonNegative { lambda, mu } => {
            let up = matches!(model, LevyModel::CompoundPoissonPositive { .. });
            // net-input drift between jumps: jumps are compensated and the
            // drain is 1
            let drift = if up { -(1.0 + lambda / mu) } else { lambda / mu - 1.0 };
            let mut y = 0.0;
            let mut y_min = 0.0f64;
            let mut clock = 0.0;
            loop {
                let e: f64 = Exp1.sample(rng);
                let tau = e / lambda;
                if clock + tau >= t {
                    let y_end = y + drift * (t - clock);
                    y_min = y_min.min(y.min(y_end));
                    return PathSample { y_end, y_min };
                }
                clock += tau;
                let y_pre = y + drift * tau;
                let e: f64 = Exp1.sample(rng);
                let jump = e / mu;
                let y_post = if up { y_pre + jump } else { y_pre - jump };
                y_min = y_min.min(y_pre.min(y_post));
                y = y_post;
                if stopped(y_min) {
                    return PathSample { y_end: f64::NAN, y_min };
                }
            }
        }
        LevyModel::Stable { alpha, beta } => {
            let n = (t / cfg.dt).ceil().max(1.0) as u64;
            let h = t / n as f64;
            let scale = h.powf(1.0 / alpha);
            let mut y = 0.0;
            let mut y_min = 0.0f64;
            for _ in 0..n {
                y += scale * sample_stable_standard(alpha, beta, rng) - h;
                y_min = y_min.min(y);
                if stopped(y_min) {
                    return PathSample { y_end: f64::NAN, y_min };
                }
            }
            PathSample { y_end: y, y_min }
        }
    }
}

/// Stationary start resolved once per run and shared by all paths.
#[derive(Debug, Clone, Copy)]
enum StationaryStart {
    Exponential { rate: f64 },
    ZeroModified { mass_at_zero: f64, rate: f64 },
    /// Lindley recursion on the grid over the burn-in horizon.
    BurnIn,
}

fn stationary_start(model: &LevyModel) -> Result<StationaryStart> {
    Ok(match fluctuation::stationary_law(model)? {
        StationaryLaw::Exponential { rate } => StationaryStart::Exponential { rate },
        StationaryLaw::ZeroModified { mass_at_zero, rate } => {
            StationaryStart::ZeroModified { mass_at_zero, rate }
        }
        StationaryLaw::Approximate => StationaryStart::BurnIn,
    })
}

fn draw_q0(start: StationaryStart, model: &LevyModel, cfg: &McConfig, rng: &mut ChaCha8Rng) -> f64 {
    match start {
        StationaryStart::Exponential { rate } => {
            let e: f64 = Exp1.sample(rng);
            e / rate
        }
        StationaryStart::ZeroModified { mass_at_zero, rate } => {
            if rng.random::<f64>() < mass_at_zero {
                0.0
            } else {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
        }
        StationaryStart::BurnIn => {
            let LevyModel::Stable { alpha, beta } = *model else {
                unreachable!("burn-in start is stable-only")
            };
            let n = (cfg.stable_burn_in / cfg.dt).ceil().max(1.0) as u64;
            let h = cfg.stable_burn_in / n as f64;
            let scale = h.powf(1.0 / alpha);
            let mut q = 0.0f64;
            for _ in 0..n {
                q = (q + scale * sample_stable_standard(alpha, beta, rng) - h).max(0.0);
            }
            q
        }
    }
}

/// One draw from the stationary workload law (exact for Brownian and
/// compound Poisson input, burn-in approximation for stable input).
pub fn sample_stationary_workload(
    model: &LevyModel,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    Ok(draw_q0(stationary_start(model)?, model, cfg, rng))
}

/// Pathwise window minimum `M(t) = max(0, q0 + inf_{s<=t} Y(s))`.
pub fn simulate_window_min(
    model: &LevyModel,
    q0: f64,
    t: f64,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    check_window(t)?;
    cfg.validate(model)?;
    let p = simulate_net_input(model, t, cfg, rng, None);
    Ok((q0 + p.y_min).max(0.0))
}

/// Pathwise workload endpoint `Q(t) = q0 + Y(t) + max(0, -q0 - inf Y)`.
pub fn simulate_workload_endpoint(
    model: &LevyModel,
    q0: f64,
    t: f64,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    check_window(t)?;
    cfg.validate(model)?;
    let p = simulate_net_input(model, t, cfg, rng, None);
    Ok(q0 + p.y_end + (-q0 - p.y_min).max(0.0))
}

fn check_window(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { operation: "mcsim", message: format!("t must be > 0, got {t}") })
    }
}

/// Estimate `P{M(t) > u}` with a binomial standard error.
pub fn estimate_survival(model: &LevyModel, t: f64, u: f64, cfg: &McConfig) -> Result<McEstimate> {
    check_window(t)?;
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::Domain {
            operation: "estimate_survival",
            message: format!("u must be >= 0, got {u}"),
        });
    }
    cfg.validate(model)?;
    let start = stationary_start(model)?;
    let acc = engine::run(cfg.paths, cfg.workers, |path| {
        let mut rng = path_rng(cfg.seed, path);
        let q0 = draw_q0(start, model, cfg, &mut rng);
        if q0 <= u {
            // the infimum of Y is <= 0, so the level cannot be held
            return 0.0;
        }
        let p = simulate_net_input(model, t, cfg, &mut rng, Some(u - q0));
        f64::from(q0 + p.y_min > u)
    });
    let mean = acc.sum / acc.n as f64;
    let stderr = (mean * (1.0 - mean) / acc.n as f64).sqrt();
    Ok(McEstimate {
        mean,
        stderr,
        n: acc.n,
        method: "mc-survival",
        approximate_stationarity: matches!(start, StationaryStart::BurnIn),
    })
}

/// Estimate `E exp(-x M(t))` with a sample standard error.
pub fn estimate_laplace(model: &LevyModel, x: f64, t: f64, cfg: &McConfig) -> Result<McEstimate> {
    check_window(t)?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain {
            operation: "estimate_laplace",
            message: format!("x must be >= 0, got {x}"),
        });
    }
    cfg.validate(model)?;
    let start = stationary_start(model)?;
    let acc = engine::run(cfg.paths, cfg.workers, |path| {
        let mut rng = path_rng(cfg.seed, path);
        let q0 = draw_q0(start, model, cfg, &mut rng);
        let p = simulate_net_input(model, t, cfg, &mut rng, None);
        (-x * (q0 + p.y_min).max(0.0)).exp()
    });
    let n = acc.n as f64;
    let mean = acc.sum / n;
    let var = ((acc.sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        n: acc.n,
        method: "mc-laplace",
        approximate_stationarity: matches!(start, StationaryStart::BurnIn),
    })
}

/// Empirical frequency of `|inf_{s<=horizon} Y(s) / horizon + 1| > eps`,
/// the finite-horizon law-of-large-numbers statistic for the net input.
pub fn estimate_slln_exceedance(
    model: &LevyModel,
    horizon: f64,
    eps: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_window(horizon)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain {
            operation: "estimate_slln_exceedance",
            message: format!("eps must be > 0, got {eps}"),
        });
    }
    cfg.validate(model)?;
    let acc = engine::run(cfg.paths, cfg.workers, |path| {
        let mut rng = path_rng(cfg.seed, path);
        let p = simulate_net_input(model, horizon, cfg, &mut rng, None);
        f64::from((p.y_min / horizon + 1.0).abs() > eps)
    });
    let mean = acc.sum / acc.n as f64;
    Ok(McEstimate {
        mean,
        stderr: (mean * (1.0 - mean) / acc.n as f64).sqrt(),
        n: acc.n,
        method: "mc-slln",
        approximate_stationarity: false,
    })
}
