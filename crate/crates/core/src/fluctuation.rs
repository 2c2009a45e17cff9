//! Right inverses of the exponents and the exponential-clock transforms.
//!
//! With `e_q` an independent exponential clock of rate `q` and
//! `M(t) = inf_{s in [0,t]} Q(s)` started in stationarity, the module
//! evaluates
//!
//! * `window_min_transform`      L(x,q) = E exp(-x M(e_q))
//! * `window_min_tail_transform` K(x,q) = ∫ e^{-xu} P{M(e_q) > u} du
//! * `stationary_transform`      E exp(-x Q_e)
//! * `running_max_transform`     E exp(-x sup_{s<=e_q} Y(s))
//!
//! plus the analytic inverse-in-`x` of `K` for the spectrally negative
//! case. `K` is computed from its own closed form rather than through
//! `1 - L(x,q))/x`, so the two routes cross-check each other.

use crate::error::{Error, Result};
use crate::models::LevyModel;
use crate::numeric::roots;

/// A right-inverse evaluation `theta = Φ(q)` (or `Φ̂(q)`), with the solver
/// residual `exponent(theta) - q` and iteration count.
#[derive(Debug, Clone, Copy)]
pub struct InverseEval {
    pub q: f64,
    pub theta: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Which transform a [`TransformValue`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// L(x,q) = E exp(-x M(e_q))
    WindowMin,
    /// K(x,q), the Laplace transform in u of P{M(e_q) > u}
    WindowMinTail,
    /// E exp(-x Q_e)
    Stationary,
    /// E exp(-x  sup_{s <= e_q} Y(s))
    RunningMax,
}

#[derive(Debug, Clone, Copy)]
pub struct TransformValue {
    pub x: f64,
    /// Clock rate; `None` for the stationary transform.
    pub q: Option<f64>,
    pub value: f64,
    pub kind: TransformKind,
}

/// Closed-form stationary workload law, where one exists.
#[derive(Debug, Clone, Copy)]
pub enum StationaryLaw {
    /// `Q_e ~ Exp(rate)` (spectrally negative input).
    Exponential { rate: f64 },
    /// Atom at zero plus an exponential tail:
    /// `P{Q_e > u} = (1 - mass_at_zero) exp(-rate u)`.
    ZeroModified { mass_at_zero: f64, rate: f64 },
    /// No closed form in scope (stable input); simulation falls back to a
    /// burn-in start.
    Approximate,
}

fn check_pos(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { operation: op, message: format!("{name} must be > 0, got {v}") })
    }
}

fn check_nonneg(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { operation: op, message: format!("{name} must be >= 0, got {v}") })
    }
}

/// Φ(q): the largest root of ψ(θ) = q, found on the increasing branch of
/// the convex exponent. Spectrally negative models only.
pub fn right_inverse(model: &LevyModel, q: f64) -> Result<InverseEval> {
    const OP: &str = "right_inverse";
    check_nonneg(OP, "q", q)?;
    if !model.is_spectrally_negative() {
        return Err(Error::WrongSidedness { operation: OP, required: "negative", model: model.to_string() });
    }
    let branch = roots::increasing_branch_start(
        |t| model.laplace_exponent(t).map(|e| e.derivative).unwrap_or(f64::NAN),
        0.0,
        OP,
    )?;
    let sol = roots::solve_increasing(
        |t| {
            let e = model.laplace_exponent(t).expect("theta >= 0 on the branch");
            (e.value - q, e.derivative)
        },
        branch,
        q.abs(),
        OP,
    )?;
    Ok(InverseEval { q, theta: sol.root, residual: sol.residual, iterations: sol.iterations })
}

/// Φ̂(q): the root of ψ̂(θ) = q. ψ̂ is increasing from ψ̂(0) = 0 with
/// ψ̂'(0) = 1, so Φ̂(0) = 0. Spectrally positive models only.
pub fn dual_right_inverse(model: &LevyModel, q: f64) -> Result<InverseEval> {
    const OP: &str = "dual_right_inverse";
    check_nonneg(OP, "q", q)?;
    if !model.is_spectrally_positive() {
        return Err(Error::WrongSidedness { operation: OP, required: "positive", model: model.to_string() });
    }
    let sol = roots::solve_increasing(
        |t| {
            let e = model.dual_laplace_exponent(t).expect("theta >= 0");
            (e.value - q, e.derivative)
        },
        0.0,
        q.abs(),
        OP,
    )?;
    Ok(InverseEval { q, theta: sol.root, residual: sol.residual, iterations: sol.iterations })
}

/// Relative half-width of the zone around `x = Φ̂(q)` where the SP
/// transforms switch to the Taylor form of the smooth ratio.
const SP_SWITCH_TOL: f64 = 1e-6;

/// The ratio `R(x) = (q - ψ̂(x)) / (Φ̂(q) - x)`, which every spectrally
/// positive transform factors through. `R` extends analytically across
/// `x = Φ̂(q)` with `R(Φ̂) = ψ̂'(Φ̂)`; inside the switch zone it is
/// evaluated by the three-term Taylor expansion around `Φ̂`, which both
/// removes the cancellation and reduces exactly to the removable-
/// singularity limit at `x = Φ̂(q)`.
pub(crate) fn sp_smooth_ratio(model: &LevyModel, x: f64, q: f64, phi_hat: f64) -> Result<f64> {
    let tol = SP_SWITCH_TOL * phi_hat.max(1.0);
    if (x - phi_hat).abs() < tol {
        let d = x - phi_hat;
        let d1 = model.dual_laplace_exponent(phi_hat)?.derivative;
        let d2 = model.dual_exponent_d2(phi_hat);
        let d3 = model.dual_exponent_d3(phi_hat);
        Ok(d1 + 0.5 * d2 * d + d3 * d * d / 6.0)
    } else {
        let psi_hat = model.dual_laplace_exponent(x)?.value;
        Ok((q - psi_hat) / (phi_hat - x))
    }
}

/// L(x,q) for a spectrally negative model:
/// `Φ(0)/(x+Φ(0)) · (Φ(q)+x)/Φ(q)`.
pub fn window_min_transform_sn(model: &LevyModel, x: f64, q: f64) -> Result<TransformValue> {
    const OP: &str = "window_min_transform_sn";
    check_pos(OP, "x", x)?;
    check_pos(OP, "q", q)?;
    let phi0 = right_inverse(model, 0.0)?.theta;
    let phiq = right_inverse(model, q)?.theta;
    let value = phi0 / (x + phi0) * (phiq + x) / phiq;
    Ok(TransformValue { x, q: Some(q), value, kind: TransformKind::WindowMin })
}

/// L(x,q) for a spectrally positive model:
/// `ψ̂'(0)x/ψ̂(x) · Φ̂(q)/q · (q-ψ̂(x))/(Φ̂(q)-x)`, the last factor being
/// the smooth ratio `R(x)`; at `x = Φ̂(q)` the value is the limit
/// `ψ̂'(0) Φ̂²(q) ψ̂'(Φ̂(q)) / q²` of the removable singularity.
pub fn window_min_transform_sp(model: &LevyModel, x: f64, q: f64) -> Result<TransformValue> {
    const OP: &str = "window_min_transform_sp";
    check_pos(OP, "x", x)?;
    check_pos(OP, "q", q)?;
    let phi_hat = dual_right_inverse(model, q)?.theta;
    let d0 = model.dual_laplace_exponent(0.0)?.derivative;
    let psi_hat_x = model.dual_laplace_exponent(x)?.value;
    let r = sp_smooth_ratio(model, x, q, phi_hat)?;
    let value = d0 * x / psi_hat_x * (phi_hat / q) * r;
    Ok(TransformValue { x, q: Some(q), value, kind: TransformKind::WindowMin })
}

/// L(x,q) dispatched on one-sidedness (Brownian goes through the
/// spectrally negative branch).
pub fn window_min_transform(model: &LevyModel, x: f64, q: f64) -> Result<TransformValue> {
    if model.is_spectrally_negative() {
        window_min_transform_sn(model, x, q)
    } else if model.is_spectrally_positive() {
        window_min_transform_sp(model, x, q)
    } else {
        Err(Error::Unsupported {
            operation: "window_min_transform",
            message: format!("{model} is not spectrally one-sided"),
        })
    }
}

/// K(x,q) from the closed forms in the proofs (not via `1 - L`):
/// SN: `1/(x+Φ(0)) · (Φ(q)-Φ(0))/Φ(q)`;
/// SP: `(1 - ψ̂'(0)x/ψ̂(x))/x - ψ̂'(0)(Φ̂(q)R(x) - q)/(q ψ̂(x))`.
pub fn window_min_tail_transform(model: &LevyModel, x: f64, q: f64) -> Result<TransformValue> {
    const OP: &str = "window_min_tail_transform";
    check_pos(OP, "x", x)?;
    check_pos(OP, "q", q)?;
    let value = if model.is_spectrally_negative() {
        let phi0 = right_inverse(model, 0.0)?.theta;
        let phiq = right_inverse(model, q)?.theta;
        (phiq - phi0) / phiq / (x + phi0)
    } else if model.is_spectrally_positive() {
        let phi_hat = dual_right_inverse(model, q)?.theta;
        let d0 = model.dual_laplace_exponent(0.0)?.derivative;
        let psi_hat_x = model.dual_laplace_exponent(x)?.value;
        let r = sp_smooth_ratio(model, x, q, phi_hat)?;
        (1.0 - d0 * x / psi_hat_x) / x - d0 * (phi_hat * r - q) / (q * psi_hat_x)
    } else {
        return Err(Error::Unsupported { operation: OP, message: format!("{model} is not spectrally one-sided") });
    };
    Ok(TransformValue { x, q: Some(q), value, kind: TransformKind::WindowMinTail })
}

/// E exp(-x Q_e): `Φ(0)/(Φ(0)+x)` for spectrally negative input, the
/// Pollaczek–Khintchine ratio `ψ̂'(0)x/ψ̂(x)` for spectrally positive.
pub fn stationary_transform(model: &LevyModel, x: f64) -> Result<TransformValue> {
    const OP: &str = "stationary_transform";
    check_pos(OP, "x", x)?;
    let value = if model.is_spectrally_negative() {
        let phi0 = right_inverse(model, 0.0)?.theta;
        phi0 / (phi0 + x)
    } else if model.is_spectrally_positive() {
        let d0 = model.dual_laplace_exponent(0.0)?.derivative;
        d0 * x / model.dual_laplace_exponent(x)?.value
    } else {
        return Err(Error::Unsupported { operation: OP, message: format!("{model} is not spectrally one-sided") });
    };
    Ok(TransformValue { x, q: None, value, kind: TransformKind::Stationary })
}

/// E exp(-x sup_{s<=e_q} Y(s)): the running maximum at the clock is
/// exponential with rate Φ(q) in the SN case; in the SP case it is the
/// Wiener–Hopf ratio `q/Φ̂(q) · (x-Φ̂(q))/(ψ̂(x)-q) = q/(Φ̂(q) R(x))`.
pub fn running_max_transform(model: &LevyModel, x: f64, q: f64) -> Result<TransformValue> {
    const OP: &str = "running_max_transform";
    check_pos(OP, "x", x)?;
    check_pos(OP, "q", q)?;
    let value = if model.is_spectrally_negative() {
        let phiq = right_inverse(model, q)?.theta;
        phiq / (phiq + x)
    } else if model.is_spectrally_positive() {
        let phi_hat = dual_right_inverse(model, q)?.theta;
        let r = sp_smooth_ratio(model, x, q, phi_hat)?;
        q / (phi_hat * r)
    } else {
        return Err(Error::Unsupported { operation: OP, message: format!("{model} is not spectrally one-sided") });
    };
    Ok(TransformValue { x, q: Some(q), value, kind: TransformKind::RunningMax })
}

/// P{M(e_q) > u} for a spectrally negative model: the analytic inverse in
/// `x` of the SN `K`, namely `(1 - Φ(0)/Φ(q)) exp(-Φ(0) u)`.
pub fn survival_at_exp_clock_sn(model: &LevyModel, u: f64, q: f64) -> Result<f64> {
    const OP: &str = "survival_at_exp_clock_sn";
    check_nonneg(OP, "u", u)?;
    check_pos(OP, "q", q)?;
    let phi0 = right_inverse(model, 0.0)?.theta;
    let phiq = right_inverse(model, q)?.theta;
    Ok((1.0 - phi0 / phiq) * (-phi0 * u).exp())
}

/// The closed-form stationary law, where one exists.
pub fn stationary_law(model: &LevyModel) -> Result<StationaryLaw> {
    match *model {
        LevyModel::BrownianDrift { .. } | LevyModel::CompoundPoissonNegative { .. } => {
            let rate = right_inverse(model, 0.0)?.theta;
            Ok(StationaryLaw::Exponential { rate })
        }
        LevyModel::CompoundPoissonPositive { lambda, mu } => Ok(StationaryLaw::ZeroModified {
            mass_at_zero: mu / (lambda + mu),
            rate: mu * mu / (lambda + mu),
        }),
        LevyModel::Stable { .. } => Ok(StationaryLaw::Approximate),
    }
}

/// P{Q_e > v} from the closed-form stationary law.
pub fn stationary_tail(model: &LevyModel, v: f64) -> Result<f64> {
    const OP: &str = "stationary_tail";
    check_nonneg(OP, "v", v)?;
    match stationary_law(model)? {
        StationaryLaw::Exponential { rate } => Ok((-rate * v).exp()),
        StationaryLaw::ZeroModified { mass_at_zero, rate } => {
            Ok((1.0 - mass_at_zero) * (-rate * v).exp())
        }
        StationaryLaw::Approximate => Err(Error::Unsupported {
            operation: OP,
            message: format!("{model} has no closed-form stationary law"),
        }),
    }
}
