//! Exact window-minimum survival function for standard Brownian input.
//!
//! For `X` a standard Brownian motion (unit volatility, unit drain),
//!
//! ```text
//! P{M(t) > u} = exp(-2u) ( 2(1+t) Ψ(√t) - sqrt(2t/π) exp(-t/2) )
//! ```
//!
//! with `Ψ` the standard normal upper tail. The two bracket terms agree to
//! leading order for large `t` (the difference decays like t^{-3/2} relative
//! to either term), so the bracket is evaluated through the scaled
//! complementary error function: `2 Ψ(√t) = exp(-t/2) erfcx(√(t/2))`,
//! giving `P = exp(-2u - t/2) ((1+t) erfcx(√(t/2)) - sqrt(2t/π))`, which
//! neither underflows nor loses the leading digits prematurely.

use crate::error::{Error, Result};
use crate::numeric::special::erfcx;

/// Largest tolerated floating-point overshoot outside [0,1] before the
/// result is treated as a numeric failure instead of being clamped.
const CLAMP_BUDGET: f64 = 1e-12;

fn bracket_term(t: f64) -> f64 {
    (1.0 + t) * erfcx((t / 2.0).sqrt()) - (2.0 * t / std::f64::consts::PI).sqrt()
}

/// P{M(t) > u} for standard Brownian input; `t > 0`, `u >= 0`.
pub fn survival_brownian(t: f64, u: f64) -> Result<f64> {
    const OP: &str = "survival_brownian";
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("t must be > 0, got {t}") });
    }
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("u must be >= 0, got {u}") });
    }
    let p = (-2.0 * u - 0.5 * t).exp() * bracket_term(t);
    if p < -CLAMP_BUDGET || p > 1.0 + CLAMP_BUDGET {
        return Err(Error::Numeric { operation: OP, message: format!("value {p} outside [0,1]") });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// log P{M(t) > u}, evaluated in log space so that deep-tail arguments
/// (large `t`, `u`) never underflow.
pub fn log_survival_brownian(t: f64, u: f64) -> Result<f64> {
    const OP: &str = "log_survival_brownian";
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("t must be > 0, got {t}") });
    }
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::Domain { operation: OP, message: format!("u must be >= 0, got {u}") });
    }
    Ok(-2.0 * u - 0.5 * t + bracket_term(t).ln())
}

/// Ψ(x) = P{N > x} for a standard normal, via the complementary error
/// function (no CDF subtraction, so large arguments keep full relative
/// accuracy).
pub fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // frozen from an independent high-precision evaluation of the closed form
    const GRID: &[(f64, f64, f64)] = &[
        (0.5, 0.0, 0.2798588938127078),
        (0.5, 0.25, 0.16974299949066948),
        (0.5, 0.5, 0.10295433346267696),
        (0.5, 1.0, 0.037874782660427925),
        (1.0, 0.0, 0.15067956668754151),
        (1.0, 0.25, 0.091391776988208292),
        (1.0, 0.5, 0.055431914788967846),
        (1.0, 1.0, 0.0203922618356285),
        (2.0, 0.0, 0.056790123730260689),
        (2.0, 0.25, 0.034444951211277094),
        (2.0, 0.5, 0.020891918981945368),
        (2.0, 1.0, 0.00768570748007711),
    ];

    #[test]
    fn matches_reference_grid() {
        for &(t, u, want) in GRID {
            let got = survival_brownian(t, u).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "survival({t},{u}) = {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn tiny_window_reduces_to_stationary_tail() {
        // t -> 0+: P{M(0) > u} = P{Q_e > u} = exp(-2u)
        for u in [0.0, 0.3, 0.7, 2.0] {
            let got = survival_brownian(1e-12, u).unwrap();
            assert_abs_diff_eq!(got, (-2.0 * u).exp(), epsilon = 1e-5);
        }
    }

    #[test]
    fn log_form_agrees_and_extends() {
        for &(t, u, _) in GRID {
            let a = survival_brownian(t, u).unwrap().ln();
            let b = log_survival_brownian(t, u).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // deep range: direct form would underflow past t ~ 1400
        let lp = log_survival_brownian(2000.0, 500.0).unwrap();
        assert!(lp < -1900.0 && lp.is_finite());
    }

    #[test]
    fn monotone_in_t_and_u() {
        let mut prev_row: Option<Vec<f64>> = None;
        for i in 1..=20 {
            let t = 0.25 * f64::from(i);
            let row: Vec<f64> = (0..20)
                .map(|j| survival_brownian(t, 0.1 * f64::from(j)).unwrap())
                .collect();
            for w in row.windows(2) {
                assert!(w[1] < w[0]);
            }
            if let Some(prev) = prev_row {
                for (a, b) in prev.iter().zip(&row) {
                    assert!(b < a);
                }
            }
            prev_row = Some(row);
        }
    }

    #[test]
    fn large_t_log_asymptote() {
        // log P ~ -2u - t/2 - (3/2) ln t + ln(4/sqrt(2 pi)) + O(1/t): the
        // sqrt(t) parts of the bracket cancel exactly, leaving 2 t^{-3/2}.
        let c = (4.0 / (2.0 * std::f64::consts::PI).sqrt()).ln();
        for t in [20.0, 30.0, 40.0, 60.0] {
            let exact = log_survival_brownian(t, 1.0).unwrap();
            let asym = -2.0 - 0.5 * t - 1.5 * t.ln() + c;
            assert!(
                (exact - asym).abs() < 12.0 * 0.5 / t,
                "t={t}: gap {} vs bound {}",
                exact - asym,
                12.0 * 0.5 / t
            );
        }
        // slope of log P in t approaches -1/2 from below; within 2% at t=150
        let slope = |t: f64| {
            (log_survival_brownian(t + 1e-3, 1.0).unwrap()
                - log_survival_brownian(t - 1e-3, 1.0).unwrap())
                / 2e-3
        };
        let mut prev = f64::NEG_INFINITY;
        for t in [20.0, 40.0, 80.0, 150.0] {
            let s = slope(t);
            assert!(s > prev);
            prev = s;
        }
        assert!((slope(150.0) + 0.5).abs() / 0.5 < 0.02);
    }

    #[test]
    fn normal_tail_reference_values() {
        let cases = [
            (-8.0, 9.99999999999999334e-1),
            (-3.0, 9.98650101968369897e-1),
            (-1.0, 8.41344746068542926e-1),
            (0.0, 5.0e-1),
            (0.5, 3.08537538725986937e-1),
            (1.0, 1.58655253931457074e-1),
            (2.0, 2.27501319481792155e-2),
            (5.0, 2.86651571879194494e-7),
            (8.0, 6.22096057427182923e-16),
        ];
        for (x, want) in cases {
            let got = normal_tail(x);
            assert!(
                ((got - want) / want).abs() < 1e-14,
                "normal_tail({x}) = {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn domain_errors() {
        assert!(survival_brownian(0.0, 0.5).is_err());
        assert!(survival_brownian(-1.0, 0.5).is_err());
        assert!(survival_brownian(1.0, -0.1).is_err());
    }
}
