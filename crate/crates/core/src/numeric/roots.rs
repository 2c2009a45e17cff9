//! Bracketed scalar solvers for the convex exponents.
//!
//! The right inverses are roots on the increasing branch of a convex
//! function: locate the branch start by the derivative sign, expand the
//! bracket by doubling until a sign change, then run Newton clipped to the
//! bracket with bisection as the fallback step.

use crate::error::{Error, Result};

/// Result of a bracketed solve.
#[derive(Debug, Clone, Copy)]
pub struct RootSolution {
    pub root: f64,
    pub residual: f64,
    pub iterations: u32,
}

const MAX_EXPAND: u32 = 200;
const MAX_ITER: u32 = 200;
// Expansion ceiling: far above every exponent root in scope, and well
// below the 2^53 range where cancellation in the exponents can fabricate
// exact zeros.
const THETA_MAX: f64 = 1e12;

/// Smallest `theta >= lo` with `df(theta) >= 0`, located by doubling and
/// bisection on the derivative sign. `df` must be nondecreasing (convexity).
pub fn increasing_branch_start(
    df: impl Fn(f64) -> f64,
    lo: f64,
    operation: &'static str,
) -> Result<f64> {
    if df(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut step = 1.0;
    let mut a = lo;
    let mut b = lo + step;
    let mut expansions = 0;
    while df(b) < 0.0 {
        a = b;
        step *= 2.0;
        b = lo + step;
        expansions += 1;
        if expansions > MAX_EXPAND || !(b < THETA_MAX) {
            return Err(Error::Bracket {
                operation,
                message: format!(
                    "derivative stays negative up to theta={a:e} (df={:e}); \
                     the exponent has no increasing branch",
                    df(a)
                ),
            });
        }
    }
    // bisect the derivative sign change
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
    Ok(b)
}

/// Solve `f(theta) = 0` for `f` increasing on `[lo, ∞)` with `f(lo) <= 0`,
/// expanding the bracket upward by doubling. `scale` sets the residual
/// target: convergence at `|f| <= 1e-12 * scale`.
pub fn solve_increasing(
    f_df: impl Fn(f64) -> (f64, f64),
    lo: f64,
    scale: f64,
    operation: &'static str,
) -> Result<RootSolution> {
    let tol = 1e-12 * scale.max(1.0);
    let (f_lo, _) = f_df(lo);
    if f_lo > 0.0 {
        return Err(Error::Bracket {
            operation,
            message: format!("f({lo:e}) = {f_lo:e} > 0 at the branch start"),
        });
    }
    if f_lo.abs() <= tol {
        return Ok(RootSolution { root: lo, residual: f_lo, iterations: 0 });
    }

    let mut a = lo;
    let mut step = 1.0;
    let mut b = lo + step;
    let mut expansions = 0;
    loop {
        let (fb, _) = f_df(b);
        if !fb.is_finite() {
            return Err(Error::Numeric {
                operation,
                message: format!("non-finite value f({b:e}) while expanding the bracket"),
            });
        }
        if fb >= 0.0 {
            break;
        }
        a = b;
        step *= 2.0;
        b = lo + step;
        expansions += 1;
        if expansions > MAX_EXPAND || !(b < THETA_MAX) {
            return Err(Error::Bracket {
                operation,
                message: format!("no sign change up to theta={b:e} after {expansions} doublings"),
            });
        }
    }

    solve_bracketed(f_df, a, b, scale, operation)
}

/// Newton clipped to a known sign-change bracket `[a, b]` (`f(a) <= 0 <=
/// f(b)`), with bisection whenever the Newton step leaves the bracket or
/// the derivative degenerates.
///
/// Iterates to machine precision (step below one ulp), not merely to the
/// contract tolerance: downstream Laplace inversion multiplies transform
/// values by alternating weights whose magnitudes reach ~1e9, so any
/// slack left in the root comes back amplified.
pub fn solve_bracketed(
    f_df: impl Fn(f64) -> (f64, f64),
    mut a: f64,
    mut b: f64,
    scale: f64,
    operation: &'static str,
) -> Result<RootSolution> {
    let contract_tol = 1e-12 * scale.max(1.0);
    let mut x = b;
    let (mut fx, mut dfx) = f_df(x);
    let mut best = (x, fx);
    let mut iterations = 0;
    for it in 1..=MAX_ITER {
        iterations = it;
        if fx == 0.0 {
            best = (x, fx);
            break;
        }
        if fx > 0.0 {
            b = x;
        } else {
            a = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx.is_finite() && dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let step = (next - x).abs();
        x = next;
        let (nfx, ndfx) = f_df(x);
        fx = nfx;
        dfx = ndfx;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if step <= f64::EPSILON * x.abs() || b - a <= f64::EPSILON * b.abs() {
            break;
        }
    }
    let (root, residual) = best;
    if residual.abs() <= contract_tol {
        Ok(RootSolution { root, residual, iterations })
    } else {
        Err(Error::Numeric {
            operation,
            message: format!(
                "no convergence: theta={root:e}, residual={residual:e}, bracket [{a:e},{b:e}]"
            ),
        })
    }
}

/// Maximize a concave function on `[lo, hi]` by golden-section search,
/// polished by bisection on the derivative when one is supplied.
pub fn golden_section_max(
    g: impl Fn(f64) -> f64,
    dg: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    operation: &'static str,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Numeric {
            operation,
            message: format!("bad maximization bracket [{lo:e},{hi:e}]"),
        });
    }
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..240 {
        if b - a <= 1e-12 * b.abs().max(1.0) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INVPHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INVPHI * (b - a);
            gd = g(d);
        }
    }
    let mut x = 0.5 * (a + b);
    if let Some(dg) = dg {
        // derivative bisection polish on the containing interval
        let (mut a, mut b) = (lo, hi);
        if dg(a) > 0.0 && dg(b) < 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if dg(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            x = 0.5 * (a + b);
        }
    }
    if !g(x).is_finite() {
        return Err(Error::Numeric {
            operation,
            message: format!("non-finite objective at theta={x:e}"),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_brownian_style_root() {
        // psi(t) = t^2/2 - t, increasing branch from 1, root of psi = q
        for q in [0.0f64, 0.1, 1.5, 40.0] {
            let sol = solve_increasing(|t| (0.5 * t * t - t - q, t - 1.0), 1.0, q.abs(), "test")
                .unwrap();
            assert_abs_diff_eq!(sol.root, 1.0 + (1.0 + 2.0 * q).sqrt(), epsilon = 1e-10);
            assert!(sol.residual.abs() <= 1e-12 * q.max(1.0));
        }
    }

    #[test]
    fn branch_start_by_derivative() {
        let lo = increasing_branch_start(|t| t - 3.0, 0.0, "test").unwrap();
        assert_abs_diff_eq!(lo, 3.0, epsilon = 1e-9);
        // derivative never turns positive
        assert!(matches!(
            increasing_branch_start(|_| -1.0, 0.0, "test"),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn golden_section_finds_concave_max() {
        // g(t) = t - t^2/2 has maximum at 1
        let x = golden_section_max(|t| t - 0.5 * t * t, Some(&|t: f64| 1.0 - t), 1e-12, 10.0, "test")
            .unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-10);
    }
}
