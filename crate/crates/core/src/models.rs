//! Supported Lévy input models and their exponents.
//!
//! Every model is normalized so that the driving process `X` has zero mean
//! (`E X(1) = 0`) and the net input is `Y(t) = X(t) - t` (unit drain). For
//! the compound Poisson variants the compensating drift is implied by the
//! jump parameters; the stable variant is the strictly stable law with unit
//! scale and zero shift.
//!
//! Three exponents are exposed:
//!
//! * `laplace_exponent`      ψ(θ)  = log E exp(θ Y(1))   (spectrally negative)
//! * `dual_laplace_exponent` ψ̂(θ) = log E exp(-θ Y(1))  (spectrally positive)
//! * `cumulant`              φ(θ)  = log E exp(θ X(1))
//!
//! All three vanish at 0; ψ'(0) = -1, ψ̂'(0) = +1, φ'(0) = 0.

use crate::error::{Error, Result};
use std::fmt;

/// Threshold above which the one-jump tail asymptote is considered to be in
/// its regime; below it results carry a warning flag.
pub const TAIL_ASYMPTOTE_THRESHOLD: f64 = 5.0;

/// A supported Lévy input process, centered and time-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyModel {
    /// `X = sigma * B` for a standard Brownian motion `B`.
    BrownianDrift { sigma: f64 },
    /// Positive exponential jumps: `X(t) = sum_{i<=N(t)} J_i - (lambda/mu) t`,
    /// `N` Poisson(lambda), `J ~ Exp(mu)`.
    CompoundPoissonPositive { lambda: f64, mu: f64 },
    /// Negative exponential jumps: `X(t) = (lambda/mu) t - sum_{i<=N(t)} J_i`.
    CompoundPoissonNegative { lambda: f64, mu: f64 },
    /// Strictly stable increments: `X(1) ~ S_alpha(1, beta, 0)`,
    /// `alpha in (1,2)`, `beta in (-1,1]`.
    Stable { alpha: f64, beta: f64 },
}

/// An exponent evaluated at a real argument. `value` and `derivative` are
/// meaningful only when `finite` is set.
#[derive(Debug, Clone, Copy)]
pub struct ExponentEval {
    pub theta: f64,
    pub value: f64,
    pub derivative: f64,
    pub finite: bool,
}

impl ExponentEval {
    fn finite(theta: f64, value: f64, derivative: f64) -> Self {
        Self { theta, value, derivative, finite: true }
    }

    fn infinite(theta: f64) -> Self {
        Self { theta, value: f64::NAN, derivative: f64::NAN, finite: false }
    }
}

/// An asymptotic tail value together with a flag raised when the argument is
/// below [`TAIL_ASYMPTOTE_THRESHOLD`] (the asymptote is then not declared).
#[derive(Debug, Clone, Copy)]
pub struct TailAsymptote {
    pub value: f64,
    pub below_threshold: bool,
}

fn require_positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be strictly positive, got {v}")))
    }
}

impl LevyModel {
    pub fn brownian(sigma: f64) -> Result<Self> {
        require_positive("sigma", sigma)?;
        Ok(Self::BrownianDrift { sigma })
    }

    pub fn compound_poisson_positive(lambda: f64, mu: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_positive("mu", mu)?;
        Ok(Self::CompoundPoissonPositive { lambda, mu })
    }

    pub fn compound_poisson_negative(lambda: f64, mu: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_positive("mu", mu)?;
        Ok(Self::CompoundPoissonNegative { lambda, mu })
    }

    pub fn stable(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (1,2), got {alpha}")));
        }
        if !(beta.is_finite() && beta > -1.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (-1,1], got {beta}")));
        }
        Ok(Self::Stable { alpha, beta })
    }

    /// Only negative jumps (Brownian counts; it is treated as spectrally
    /// negative by default).
    pub fn is_spectrally_negative(&self) -> bool {
        matches!(self, Self::BrownianDrift { .. } | Self::CompoundPoissonNegative { .. })
    }

    /// Only positive jumps. Brownian qualifies under the dual convention;
    /// a stable model qualifies exactly when `beta = 1`.
    pub fn is_spectrally_positive(&self) -> bool {
        match self {
            Self::BrownianDrift { .. } | Self::CompoundPoissonPositive { .. } => true,
            Self::Stable { beta, .. } => *beta == 1.0,
            Self::CompoundPoissonNegative { .. } => false,
        }
    }

    pub fn is_heavy_tailed(&self) -> bool {
        matches!(self, Self::Stable { .. })
    }

    /// Supremum of the set where `E exp(theta X(1))` is finite.
    pub fn beta_star(&self) -> f64 {
        match self {
            Self::BrownianDrift { .. } | Self::CompoundPoissonNegative { .. } => f64::INFINITY,
            Self::CompoundPoissonPositive { mu, .. } => *mu,
            Self::Stable { .. } => 0.0,
        }
    }

    /// ψ(θ) = log E exp(θ Y(1)) for a spectrally negative model, θ >= 0.
    pub fn laplace_exponent(&self, theta: f64) -> Result<ExponentEval> {
        const OP: &str = "laplace_exponent";
        if !self.is_spectrally_negative() {
            return Err(self.wrong_sidedness(OP, "negative"));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::Domain { operation: OP, message: format!("theta must be >= 0, got {theta}") });
        }
        Ok(match *self {
            Self::BrownianDrift { sigma } => {
                let s2 = sigma * sigma;
                ExponentEval::finite(theta, 0.5 * s2 * theta * theta - theta, s2 * theta - 1.0)
            }
            Self::CompoundPoissonNegative { lambda, mu } => {
                let value = lambda * mu / (mu + theta) - lambda + (lambda / mu - 1.0) * theta;
                let deriv = -lambda * mu / ((mu + theta) * (mu + theta)) + lambda / mu - 1.0;
                ExponentEval::finite(theta, value, deriv)
            }
            _ => unreachable!(),
        })
    }

    /// ψ̂(θ) = log E exp(θ Ŷ(1)) with Ŷ = -Y, for a spectrally positive
    /// model, θ >= 0. Finite on all of [0, ∞) for every supported variant:
    /// the jump transform enters as E exp(-θ ΣJ), whose pole sits at -mu.
    pub fn dual_laplace_exponent(&self, theta: f64) -> Result<ExponentEval> {
        const OP: &str = "dual_laplace_exponent";
        if !self.is_spectrally_positive() {
            return Err(self.wrong_sidedness(OP, "positive"));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::Domain { operation: OP, message: format!("theta must be >= 0, got {theta}") });
        }
        Ok(match *self {
            Self::BrownianDrift { sigma } => {
                let s2 = sigma * sigma;
                ExponentEval::finite(theta, 0.5 * s2 * theta * theta + theta, s2 * theta + 1.0)
            }
            Self::CompoundPoissonPositive { lambda, mu } => {
                let value = (1.0 + lambda / mu) * theta - lambda * theta / (mu + theta);
                let deriv = 1.0 + lambda / mu - lambda * mu / ((mu + theta) * (mu + theta));
                ExponentEval::finite(theta, value, deriv)
            }
            Self::Stable { alpha, .. } => {
                // beta = 1 enforced by the sidedness gate. ψ̂(θ) = θ + c θ^α
                // with c = -1/cos(πα/2) > 0 for α in (1,2).
                let c = stable_sp_coefficient(alpha);
                let value = theta + c * theta.powf(alpha);
                let deriv = 1.0 + c * alpha * theta.powf(alpha - 1.0);
                ExponentEval::finite(theta, value, deriv)
            }
            Self::CompoundPoissonNegative { .. } => unreachable!(),
        })
    }

    /// φ(θ) = log E exp(θ X(1)). Never errors: divergence is reported via
    /// the `finite` flag (true exponential moments only; the stable variants
    /// report `finite` only at θ = 0).
    pub fn cumulant(&self, theta: f64) -> ExponentEval {
        if !theta.is_finite() {
            return ExponentEval::infinite(theta);
        }
        match *self {
            Self::BrownianDrift { sigma } => {
                let s2 = sigma * sigma;
                ExponentEval::finite(theta, 0.5 * s2 * theta * theta, s2 * theta)
            }
            Self::CompoundPoissonPositive { lambda, mu } => {
                if theta >= mu {
                    return ExponentEval::infinite(theta);
                }
                let value = lambda * mu / (mu - theta) - lambda - lambda * theta / mu;
                let deriv = lambda * mu / ((mu - theta) * (mu - theta)) - lambda / mu;
                ExponentEval::finite(theta, value, deriv)
            }
            Self::CompoundPoissonNegative { lambda, mu } => {
                if theta <= -mu {
                    return ExponentEval::infinite(theta);
                }
                let value = lambda * mu / (mu + theta) - lambda + lambda * theta / mu;
                let deriv = -lambda * mu / ((mu + theta) * (mu + theta)) + lambda / mu;
                ExponentEval::finite(theta, value, deriv)
            }
            Self::Stable { .. } => {
                if theta == 0.0 {
                    ExponentEval::finite(0.0, 0.0, 0.0)
                } else {
                    ExponentEval::infinite(theta)
                }
            }
        }
    }

    /// Second derivative of ψ̂, used by the removable-singularity expansion.
    pub(crate) fn dual_exponent_d2(&self, theta: f64) -> f64 {
        match *self {
            Self::BrownianDrift { sigma } => sigma * sigma,
            Self::CompoundPoissonPositive { lambda, mu } => {
                2.0 * lambda * mu / (mu + theta).powi(3)
            }
            Self::Stable { alpha, .. } => {
                stable_sp_coefficient(alpha) * alpha * (alpha - 1.0) * theta.powf(alpha - 2.0)
            }
            Self::CompoundPoissonNegative { .. } => f64::NAN,
        }
    }

    /// Third derivative of ψ̂.
    pub(crate) fn dual_exponent_d3(&self, theta: f64) -> f64 {
        match *self {
            Self::BrownianDrift { .. } => 0.0,
            Self::CompoundPoissonPositive { lambda, mu } => {
                -6.0 * lambda * mu / (mu + theta).powi(4)
            }
            Self::Stable { alpha, .. } => {
                stable_sp_coefficient(alpha)
                    * alpha
                    * (alpha - 1.0)
                    * (alpha - 2.0)
                    * theta.powf(alpha - 3.0)
            }
            Self::CompoundPoissonNegative { .. } => f64::NAN,
        }
    }

    /// Asymptotic one-jump tail `P{X(1) > x} ~ B(alpha,beta)/alpha * x^-alpha`
    /// for the stable models. Flags when `x` is below the declared regime
    /// threshold.
    pub fn unit_increment_tail(&self, x: f64) -> Result<TailAsymptote> {
        const OP: &str = "unit_increment_tail";
        let Self::Stable { alpha, beta } = *self else {
            return Err(Error::Unsupported {
                operation: OP,
                message: format!("{self} has no regularly varying tail"),
            });
        };
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Domain { operation: OP, message: format!("x must be > 0, got {x}") });
        }
        let b = stable_b_constant(alpha, beta);
        Ok(TailAsymptote {
            value: b / alpha * x.powf(-alpha),
            below_threshold: x < TAIL_ASYMPTOTE_THRESHOLD,
        })
    }

    fn wrong_sidedness(&self, operation: &'static str, required: &'static str) -> Error {
        Error::WrongSidedness { operation, required, model: self.to_string() }
    }
}

/// Coefficient `c` of ψ̂(θ) = θ + c θ^α for the spectrally positive stable
/// model: c = -1/cos(πα/2), positive on α in (1,2).
pub(crate) fn stable_sp_coefficient(alpha: f64) -> f64 {
    -1.0 / (std::f64::consts::PI * alpha / 2.0).cos()
}

/// B(α,β) = Γ(1+α)/π · sqrt(1 + β² tan²(πα/2)) · sin(πα/2 + arctan(β tan(πα/2))).
pub(crate) fn stable_b_constant(alpha: f64, beta: f64) -> f64 {
    let half = std::f64::consts::PI * alpha / 2.0;
    let bt = beta * half.tan();
    libm::tgamma(1.0 + alpha) / std::f64::consts::PI
        * (1.0 + bt * bt).sqrt()
        * (half + bt.atan()).sin()
}

impl fmt::Display for LevyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BrownianDrift { sigma } => write!(f, "kind=brownian sigma={sigma}"),
            Self::CompoundPoissonPositive { lambda, mu } => {
                write!(f, "kind=cpp lambda={lambda} mu={mu}")
            }
            Self::CompoundPoissonNegative { lambda, mu } => {
                write!(f, "kind=cpn lambda={lambda} mu={mu}")
            }
            Self::Stable { alpha, beta } => write!(f, "kind=stable alpha={alpha} beta={beta}"),
        }
    }
}

/// Parse a model from whitespace-separated `key=value` tokens, e.g.
/// `kind=brownian sigma=1.0`. Keys are case-insensitive.
pub fn parse_model(spec: &str) -> Result<LevyModel> {
    let mut kind: Option<String> = None;
    let mut params: Vec<(String, f64, usize, usize)> = Vec::new();

    let mut offset = 0usize;
    let mut index = 0usize;
    for raw in spec.split_whitespace() {
        // byte offset of this token in the original string
        offset = spec[offset..].find(raw).map(|p| p + offset).unwrap_or(offset);
        let err = |message: String| Error::Parse { index, offset, message };
        let (key, value) = raw
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{raw}`")))?;
        let key = key.to_ascii_lowercase();
        if key == "kind" {
            if kind.is_some() {
                return Err(err("duplicate key `kind`".into()));
            }
            kind = Some(value.to_ascii_lowercase());
        } else {
            let parsed: f64 = value
                .parse()
                .map_err(|_| err(format!("`{value}` is not a number for key `{key}`")))?;
            if params.iter().any(|(k, ..)| *k == key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            params.push((key, parsed, index, offset));
        }
        offset += raw.len();
        index += 1;
    }

    let kind = kind.ok_or(Error::Parse {
        index: 0,
        offset: 0,
        message: "missing `kind=` token".into(),
    })?;

    let take = |params: &mut Vec<(String, f64, usize, usize)>, key: &str| -> Result<f64> {
        match params.iter().position(|(k, ..)| k == key) {
            Some(i) => Ok(params.remove(i).1),
            None => Err(Error::Parse {
                index: 0,
                offset: 0,
                message: format!("kind={kind} requires key `{key}`"),
            }),
        }
    };

    let model = match kind.as_str() {
        "brownian" => LevyModel::brownian(take(&mut params, "sigma")?)?,
        "cpp" => {
            LevyModel::compound_poisson_positive(take(&mut params, "lambda")?, take(&mut params, "mu")?)?
        }
        "cpn" => {
            LevyModel::compound_poisson_negative(take(&mut params, "lambda")?, take(&mut params, "mu")?)?
        }
        "stable" => LevyModel::stable(take(&mut params, "alpha")?, take(&mut params, "beta")?)?,
        other => {
            return Err(Error::Parse {
                index: 0,
                offset: 0,
                message: format!("unknown kind `{other}` (expected brownian|cpp|cpn|stable)"),
            })
        }
    };
    if let Some((key, _, index, offset)) = params.into_iter().next() {
        return Err(Error::Parse {
            index,
            offset,
            message: format!("unexpected key `{key}` for kind={kind}"),
        });
    }
    Ok(model)
}
