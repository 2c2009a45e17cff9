//! Cramér-case decay rates: the positive fixed point of the cumulant, the
//! rate function, and the logarithmic window-minimum asymptote
//! `log P{M(T) > u} ~ -u θ* - T I(1)`.

use crate::error::{Error, Result};
use crate::models::LevyModel;
use crate::numeric::roots;
use crate::tail_heavy::RegimeSpec;

/// Solution of the Cramér fixed-point problem φ(θ*) = θ* together with the
/// per-unit-time cost `I(1)` when it has been evaluated.
#[derive(Debug, Clone, Copy)]
pub struct CramerSolution {
    pub theta_star: f64,
    pub beta_star: f64,
    pub i_one: Option<f64>,
    pub residual: f64,
    pub iterations: u32,
}

fn require_cramer(model: &LevyModel, operation: &'static str) -> Result<f64> {
    let beta_star = model.beta_star();
    if beta_star <= 0.0 {
        return Err(Error::Unsupported {
            operation,
            message: format!("{model} has no positive exponential moments (beta* = 0)"),
        });
    }
    Ok(beta_star)
}

/// The positive root of φ(θ) = θ on (0, β*). Errors with the
/// assumption-violated diagnostics when the root does not exist (e.g. a
/// compound Poisson negative model with `lambda <= mu`).
pub fn theta_star(model: &LevyModel) -> Result<CramerSolution> {
    const OP: &str = "theta_star";
    let beta_star = require_cramer(model, OP)?;
    let f_df = |theta: f64| {
        let e = model.cumulant(theta);
        if e.finite {
            (e.value - theta, e.derivative - 1.0)
        } else {
            (f64::INFINITY, f64::INFINITY)
        }
    };
    // increasing branch of the convex function φ(θ) - θ (derivative -1 at 0)
    let violated = |e: Error| match e {
        Error::Bracket { .. } => Error::Numeric {
            operation: OP,
            message: format!(
                "Cramér assumption violated for {model}: no root of the cumulant fixed point below beta*"
            ),
        },
        other => other,
    };
    let sol = if beta_star.is_finite() {
        // bracket capped below the divergence at beta*: walk the upper end
        // toward beta* geometrically until the sign flips
        let branch = {
            let df = |t: f64| f_df(t).1;
            let mut a = 0.0;
            let mut b = beta_star * 0.5;
            while df(b) < 0.0 {
                a = b;
                b = 0.5 * (b + beta_star);
                if beta_star - b < 1e-14 * beta_star {
                    return Err(violated(Error::Bracket { operation: OP, message: String::new() }));
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if df(mid) < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            b
        };
        let mut hi = 0.5 * (branch + beta_star);
        while f_df(hi).0 < 0.0 {
            hi = 0.5 * (hi + beta_star);
            if beta_star - hi < 1e-14 * beta_star {
                return Err(violated(Error::Bracket { operation: OP, message: String::new() }));
            }
        }
        roots::solve_bracketed(f_df, branch, hi, 1.0, OP)?
    } else {
        let branch = roots::increasing_branch_start(|t| f_df(t).1, 0.0, OP).map_err(violated)?;
        roots::solve_increasing(f_df, branch, 1.0, OP).map_err(violated)?
    };
    Ok(CramerSolution {
        theta_star: sol.root,
        beta_star,
        i_one: None,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

/// I(r) = sup_{θ>0} (θ r − φ(θ)), by golden-section maximization of the
/// concave objective with a derivative-bisection polish.
pub fn rate_function(model: &LevyModel, r: f64) -> Result<f64> {
    const OP: &str = "rate_function";
    let beta_star = require_cramer(model, OP)?;
    if !r.is_finite() {
        return Err(Error::Domain { operation: OP, message: format!("r must be finite, got {r}") });
    }
    let g = |theta: f64| {
        let e = model.cumulant(theta);
        if e.finite {
            theta * r - e.value
        } else {
            f64::NEG_INFINITY
        }
    };
    let dg = |theta: f64| {
        let e = model.cumulant(theta);
        if e.finite {
            r - e.derivative
        } else {
            f64::NEG_INFINITY
        }
    };
    // expand the cap until the objective turns downhill (or beta* blocks it)
    let margin = if beta_star.is_finite() { beta_star * 1e-9 } else { 0.0 };
    let mut cap = 1.0f64.min(if beta_star.is_finite() { beta_star * 0.5 } else { 1.0 });
    let mut expansions = 0;
    while dg(cap) > 0.0 {
        cap = if beta_star.is_finite() {
            0.5 * (cap + beta_star - margin)
        } else {
            cap * 2.0
        };
        expansions += 1;
        if expansions > 500 || (beta_star.is_finite() && beta_star - cap <= margin) {
            if beta_star.is_finite() {
                break; // supremum pinned against beta*; φ diverges there
            }
            return Err(Error::Numeric {
                operation: OP,
                message: format!("θr − φ(θ) keeps increasing (r={r} exceeds the drift range)"),
            });
        }
    }
    let theta = roots::golden_section_max(g, Some(&dg), 1e-12, cap, OP)?;
    let value = g(theta);
    if !value.is_finite() {
        return Err(Error::Numeric { operation: OP, message: format!("non-finite I({r})") });
    }
    Ok(value)
}

/// θ* together with I(1).
pub fn cramer_solution(model: &LevyModel) -> Result<CramerSolution> {
    let mut sol = theta_star(model)?;
    sol.i_one = Some(rate_function(model, 1.0)?);
    Ok(sol)
}

/// The logarithmic asymptote `-u θ* - T I(1)` of `log P{M(T) > u}`.
pub fn window_min_log_asymptote(model: &LevyModel, u: f64, t: f64) -> Result<f64> {
    const OP: &str = "window_min_log_asymptote";
    if !(u.is_finite() && u >= 0.0 && t.is_finite() && t >= 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("need u,t >= 0, got u={u} t={t}") });
    }
    let sol = cramer_solution(model)?;
    Ok(-u * sol.theta_star - t * sol.i_one.expect("populated"))
}

/// The matching decay-rate line once the regime is declared:
/// short window `-u θ*`, proportional `-T (a θ* + I(1))`, long window
/// `-T I(1)`.
pub fn window_min_log_asymptote_regime(
    model: &LevyModel,
    regime: RegimeSpec,
    u_or_t: f64,
) -> Result<f64> {
    const OP: &str = "window_min_log_asymptote_regime";
    regime.validate()?;
    if !(u_or_t.is_finite() && u_or_t > 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("argument must be > 0, got {u_or_t}") });
    }
    match regime {
        RegimeSpec::TSmall => Ok(-u_or_t * theta_star(model)?.theta_star),
        RegimeSpec::Proportional { a } => {
            let sol = cramer_solution(model)?;
            Ok(-u_or_t * (a * sol.theta_star + sol.i_one.expect("populated")))
        }
        RegimeSpec::TLarge => Ok(-u_or_t * rate_function(model, 1.0)?),
    }
}

/// The uniform stationary-tail bound `P{Q_e > u} <= exp(-θ* u)` (a bound,
/// not an approximation).
pub fn stationary_tail_bound(model: &LevyModel, u: f64) -> Result<f64> {
    const OP: &str = "stationary_tail_bound";
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("u must be >= 0, got {u}") });
    }
    Ok((-theta_star(model)?.theta_star * u).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bm() -> LevyModel {
        LevyModel::brownian(1.0).unwrap()
    }
    fn cpp11() -> LevyModel {
        LevyModel::compound_poisson_positive(1.0, 1.0).unwrap()
    }
    fn cpn21() -> LevyModel {
        LevyModel::compound_poisson_negative(2.0, 1.0).unwrap()
    }

    #[test]
    fn theta_star_analytic_values() {
        assert_abs_diff_eq!(theta_star(&bm()).unwrap().theta_star, 2.0, epsilon = 1e-10);
        // general sigma: 2/sigma^2
        let m = LevyModel::brownian(0.5).unwrap();
        assert_abs_diff_eq!(theta_star(&m).unwrap().theta_star, 8.0, epsilon = 1e-9);
        // cpp(1,1): phi = theta^2/(1-theta), fixed point 1/2
        assert_abs_diff_eq!(theta_star(&cpp11()).unwrap().theta_star, 0.5, epsilon = 1e-10);
        // cpn(2,1): mu^2/(lambda-mu) = 1
        assert_abs_diff_eq!(theta_star(&cpn21()).unwrap().theta_star, 1.0, epsilon = 1e-10);
        let sol = theta_star(&cpp11()).unwrap();
        assert!(sol.residual.abs() <= 1e-12);
        assert!(sol.theta_star < sol.beta_star);
    }

    #[test]
    fn theta_star_error_paths() {
        assert!(matches!(
            theta_star(&LevyModel::stable(1.5, 0.0).unwrap()),
            Err(Error::Unsupported { .. })
        ));
        // degenerate negative-jump model: no Cramér root
        let m = LevyModel::compound_poisson_negative(1.0, 1.0).unwrap();
        match theta_star(&m) {
            Err(Error::Numeric { message, .. }) => assert!(message.contains("violated")),
            other => panic!("expected assumption-violated, got {other:?}"),
        }
    }

    #[test]
    fn rate_function_analytic_values() {
        assert_abs_diff_eq!(rate_function(&bm(), 1.0).unwrap(), 0.5, epsilon = 1e-10);
        // cpp(1,1): I(1) = 3 - 2 sqrt(2) at theta = 1 - sqrt(2)/2
        assert_abs_diff_eq!(
            rate_function(&cpp11(), 1.0).unwrap(),
            3.0 - 2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-10
        );
        // I(0) = sup(-phi) = 0 for a centered convex cumulant
        let i0 = rate_function(&bm(), 0.0).unwrap();
        assert!(i0 >= -1e-12 && i0 < 1e-10);
    }

    #[test]
    fn maximizer_sits_below_theta_star() {
        // I(1) attained inside (0, theta*), hence finite, for every
        // Cramér-class instance
        for m in [bm(), cpp11(), cpn21()] {
            let sol = cramer_solution(&m).unwrap();
            let i1 = sol.i_one.unwrap();
            assert!(i1.is_finite() && i1 > 0.0);
            // evaluate the objective's derivative at theta*: already downhill
            let e = m.cumulant(sol.theta_star);
            assert!(1.0 - e.derivative < 0.0, "{m}");
        }
    }

    #[test]
    fn theta_star_agrees_with_right_inverse_at_zero() {
        for m in [bm(), cpn21(), LevyModel::brownian(2.0).unwrap()] {
            let a = theta_star(&m).unwrap().theta_star;
            let b = crate::fluctuation::right_inverse(&m, 0.0).unwrap().theta;
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_asymptote_values() {
        assert_abs_diff_eq!(window_min_log_asymptote(&bm(), 3.0, 4.0).unwrap(), -8.0, epsilon = 1e-9);
        // T=0 leaves the stationary decay rate
        assert_abs_diff_eq!(window_min_log_asymptote(&bm(), 5.0, 0.0).unwrap(), -10.0, epsilon = 1e-9);
        let want = -10.0 * 0.5 - 10.0 * (3.0 - 2.0 * std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(window_min_log_asymptote(&cpp11(), 10.0, 10.0).unwrap(), want, epsilon = 1e-9);
        assert_abs_diff_eq!(want, -6.7157287525381, epsilon = 1e-10);
    }

    #[test]
    fn log_asymptote_is_linear_in_u_and_t() {
        let f = |u: f64, t: f64| window_min_log_asymptote(&bm(), u, t).unwrap();
        let du = f(2.0, 4.0) - f(1.0, 4.0);
        assert_abs_diff_eq!(f(7.0, 4.0) - f(6.0, 4.0), du, epsilon = 1e-9);
        let dt = f(3.0, 2.0) - f(3.0, 1.0);
        assert_abs_diff_eq!(f(3.0, 9.0) - f(3.0, 8.0), dt, epsilon = 1e-9);
    }

    #[test]
    fn regime_lines() {
        assert_abs_diff_eq!(
            window_min_log_asymptote_regime(&bm(), RegimeSpec::TSmall, 3.0).unwrap(),
            -6.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            window_min_log_asymptote_regime(&bm(), RegimeSpec::Proportional { a: 1.0 }, 4.0).unwrap(),
            -10.0,
            epsilon = 1e-9
        );
        // a -> 0 joins the long-window line
        let a0 = window_min_log_asymptote_regime(&bm(), RegimeSpec::Proportional { a: 1e-12 }, 4.0)
            .unwrap();
        let tl = window_min_log_asymptote_regime(&bm(), RegimeSpec::TLarge, 4.0).unwrap();
        assert_abs_diff_eq!(a0, tl, epsilon = 1e-9);
    }

    #[test]
    fn stationary_bound_holds() {
        // Brownian: the exact tail exp(-2u) attains the bound
        let b = stationary_tail_bound(&bm(), 1.0).unwrap();
        assert_abs_diff_eq!(b, (-2.0f64).exp(), epsilon = 1e-10);
        assert!(crate::fluctuation::stationary_tail(&bm(), 1.0).unwrap() <= b + 1e-12);
        // spectrally positive: exact 0.5 e^{-u/2} sits below e^{-u/2}
        let b = stationary_tail_bound(&cpp11(), 2.0).unwrap();
        let exact = crate::fluctuation::stationary_tail(&cpp11(), 2.0).unwrap();
        assert!(exact <= b);
        assert_abs_diff_eq!(b, (-1.0f64).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(stationary_tail_bound(&bm(), 0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn brownian_exact_to_asymptote_ratio() {
        // frozen exact ratios: monotone approach to 1, within 10% at k=20
        let mut prev = f64::INFINITY;
        for (k, want) in [(5.0, 1.214313621), (10.0, 1.137113916), (20.0, 1.085540576)] {
            let lp = crate::closedform::log_survival_brownian(k, k).unwrap();
            let ratio = lp / window_min_log_asymptote(&bm(), k, k).unwrap();
            assert_abs_diff_eq!(ratio, want, epsilon = 1e-6);
            assert!(ratio < prev);
            prev = ratio;
        }
        assert!((prev - 1.0).abs() < 0.10);
    }
}
