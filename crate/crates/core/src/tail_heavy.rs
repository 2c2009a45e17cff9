//! Heavy-tailed exact asymptotics of P{M(T) > u} for stable input.
//!
//! The window-minimum tail decomposes into a stationary part and a big-jump
//! part, `P{Q_e > u+T} + T P{X(1) > u+T}`, which the regime variants make
//! explicit once the growth of `u` relative to `T` is declared. Regime
//! classification is always caller-declared: little-o relations are not
//! decidable from two finite numbers.

use crate::error::{Error, Result};
use crate::models::{stable_b_constant, LevyModel, TailAsymptote};

/// Declared growth regime of the level `u` against the window `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSpec {
    /// `T = o(u)`: the window is short, the stationary tail dominates.
    TSmall,
    /// `u ~ a T` with `a > 0`.
    Proportional { a: f64 },
    /// `u = o(T)`: the window is long, the big-jump term dominates.
    TLarge,
}

impl RegimeSpec {
    pub fn validate(&self) -> Result<()> {
        if let RegimeSpec::Proportional { a } = self {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "proportional regime needs a > 0, got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// An evaluated asymptotic line. Every value is asymptotic by construction;
/// `below_threshold` is raised when the tail asymptote was used outside its
/// declared regime.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticResult {
    pub value: f64,
    /// Multiplier of the relevant `tail` factor (see `formula`).
    pub prefactor: f64,
    /// Declared regime; `None` for the non-regime two-term form.
    pub regime: Option<RegimeSpec>,
    /// Which displayed line produced the value.
    pub formula: &'static str,
    pub below_threshold: bool,
}

/// B(α,β), the tail constant of the stable law:
/// `Γ(1+α)/π · sqrt(1+β²tan²(πα/2)) · sin(πα/2 + arctan(β tan(πα/2)))`.
pub fn stable_tail_constant(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain {
            operation: "stable_tail_constant",
            message: format!("alpha must lie in (1,2), got {alpha}"),
        });
    }
    if !(beta.is_finite() && beta > -1.0 && beta <= 1.0) {
        return Err(Error::Domain {
            operation: "stable_tail_constant",
            message: format!("beta must lie in (-1,1], got {beta}"),
        });
    }
    Ok(stable_b_constant(alpha, beta))
}

fn stable_alpha(model: &LevyModel, operation: &'static str) -> Result<f64> {
    match model {
        LevyModel::Stable { alpha, .. } => Ok(*alpha),
        _ => Err(Error::Unsupported {
            operation,
            message: format!("{model} is not in the heavy-tailed class"),
        }),
    }
}

/// Stationary tail asymptote `P{Q_e > u} ~ u/(α-1) · P{X(1) > u}`.
pub fn stationary_tail_heavy(model: &LevyModel, u: f64) -> Result<TailAsymptote> {
    let alpha = stable_alpha(model, "stationary_tail_heavy")?;
    let tail = model.unit_increment_tail(u)?;
    Ok(TailAsymptote {
        value: u / (alpha - 1.0) * tail.value,
        below_threshold: tail.below_threshold,
    })
}

/// Big-jump tail asymptote `P{X(n) > x} ~ n P{X(1) > x}`, declared for
/// `x >= n`; below that the flag is raised.
pub fn increment_big_jump_tail(model: &LevyModel, n: f64, x: f64) -> Result<TailAsymptote> {
    const OP: &str = "increment_big_jump_tail";
    stable_alpha(model, OP)?;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("n must be > 0, got {n}") });
    }
    let tail = model.unit_increment_tail(x)?;
    Ok(TailAsymptote {
        value: n * tail.value,
        below_threshold: tail.below_threshold || x < n,
    })
}

/// The two-term window-minimum asymptote
/// `P{Q_e > u+T} + T P{X(1) > u+T}`, with both pieces evaluated through
/// the stable tail asymptote.
pub fn window_min_tail_heavy(model: &LevyModel, u: f64, t: f64) -> Result<AsymptoticResult> {
    const OP: &str = "window_min_tail_heavy";
    let alpha = stable_alpha(model, OP)?;
    if !(u.is_finite() && u >= 0.0 && t.is_finite() && t >= 0.0 && u + t > 0.0) {
        return Err(Error::Domain {
            operation: OP,
            message: format!("need u,t >= 0 with u+t > 0, got u={u} t={t}"),
        });
    }
    let tail = model.unit_increment_tail(u + t)?;
    let prefactor = (u + t) / (alpha - 1.0) + t;
    Ok(AsymptoticResult {
        value: prefactor * tail.value,
        prefactor,
        regime: None,
        formula: "stationary-plus-big-jump",
        below_threshold: tail.below_threshold,
    })
}

/// Prefactor of the displayed regime line (the factor multiplying
/// `u P{X(1)>u}` or `T P{X(1)>T}`).
pub fn regime_prefactor(alpha: f64, regime: RegimeSpec) -> f64 {
    match regime {
        RegimeSpec::TSmall => 1.0 / (alpha - 1.0),
        RegimeSpec::Proportional { a } => {
            (a + alpha) / (alpha - 1.0) * (a + 1.0).powf(-alpha)
        }
        RegimeSpec::TLarge => alpha / (alpha - 1.0),
    }
}

/// The matching displayed regime line. `u_or_t` is the level `u` in the
/// short-window regime and the window length `T` otherwise.
pub fn window_min_tail_heavy_regime(
    model: &LevyModel,
    regime: RegimeSpec,
    u_or_t: f64,
) -> Result<AsymptoticResult> {
    const OP: &str = "window_min_tail_heavy_regime";
    let alpha = stable_alpha(model, OP)?;
    regime.validate()?;
    if !(u_or_t.is_finite() && u_or_t > 0.0) {
        return Err(Error::Domain {
            operation: OP,
            message: format!("argument must be > 0, got {u_or_t}"),
        });
    }
    let tail = model.unit_increment_tail(u_or_t)?;
    let prefactor = regime_prefactor(alpha, regime);
    let formula = match regime {
        RegimeSpec::TSmall => "short-window",
        RegimeSpec::Proportional { .. } => "proportional",
        RegimeSpec::TLarge => "long-window",
    };
    Ok(AsymptoticResult {
        value: prefactor * u_or_t * tail.value,
        prefactor,
        regime: Some(regime),
        formula,
        below_threshold: tail.below_threshold,
    })
}
