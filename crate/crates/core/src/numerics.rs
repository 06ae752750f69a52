//! Quadrature and root bracketing shared by the analytic layer.
//!
//! Integrals use double-exponential rules: tanh-sinh on finite intervals and
//! exp-sinh on `[a, ∞)`. Abscissas are formed from their distance to the
//! nearest endpoint, so algebraic endpoint singularities and power-law tails
//! keep full relative accuracy.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Default relative error target of analytic integrals.
pub const QUAD_REL_TOL: f64 = 1e-10;

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 6.5;

/// Level-doubling driver. `node(t)` returns the weighted integrand at `t`
/// (0 outside the usable range); the rule is the trapezoid sum in `t`.
fn de_sum<N: Fn(f64) -> f64>(node: N, t_lo: f64, t_hi: f64, rel_tol: f64, ctx: &str) -> Result<f64> {
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_hi && t > -t_lo {
            break;
        }
        if t <= t_hi {
            sum += node(t);
        }
        if -t >= t_lo {
            sum += node(-t);
        }
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 1..MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_hi && t > -t_lo {
                break;
            }
            if t <= t_hi {
                sum += node(t);
            }
            if -t >= t_lo {
                sum += node(-t);
            }
            k += 2;
        }
        let next = sum * h;
        if !next.is_finite() {
            return Err(Error::NumericFailure {
                context: format!("{ctx}: non-finite integral"),
                achieved: f64::INFINITY,
            });
        }
        let diff = (next - estimate).abs();
        estimate = next;
        // the rule converges quadratically in the level, so `diff` bounds the previous error
        if diff <= rel_tol * next.abs() || diff < 1e-300 {
            return Ok(next);
        }
    }
    Err(Error::NumericFailure {
        context: format!("{ctx}: quadrature did not converge"),
        achieved: f64::NAN,
    })
}

fn clean(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// tanh-sinh on a finite `[a, b]`.
fn de_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, ctx: &str) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let len = b - a;
    let mid = 0.5 * (a + b);
    let node = |t: f64| {
        let u = FRAC_PI_2 * t.abs().sinh();
        let e = (-2.0 * u).exp();
        // distance from the nearer endpoint, in units of len
        let s = e / (1.0 + e);
        let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e)) * 0.5 * len;
        if w == 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            return w * clean(f(mid));
        }
        // nodes closer to an endpoint than its ulp collapse onto it
        let x = if t < 0.0 { a + len * s } else { b - len * s };
        w * clean(f(x.clamp(a, b)))
    };
    // abscissas carry an absolute error of one ulp of the endpoints
    let floor = 64.0 * f64::EPSILON * a.abs().max(b.abs()) / len;
    de_sum(node, -T_MAX, T_MAX, rel_tol.max(floor), ctx)
}

/// exp-sinh on `[a, ∞)`: x = a + e^{(π/2) sinh t}.
fn integrate_tail<F: Fn(f64) -> f64>(f: &F, a: f64, rel_tol: f64, ctx: &str) -> Result<f64> {
    let node = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        if u > 700.0 {
            return 0.0;
        }
        let d = u.exp();
        let x = a + d;
        if !x.is_finite() {
            return 0.0;
        }
        clean(FRAC_PI_2 * t.cosh() * d * f(x))
    };
    de_sum(node, -T_MAX, T_MAX, rel_tol, ctx)
}

/// ∫_a^b f, split at the interior `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], ctx: &str) -> Result<f64> {
    integrate_with_tol(f, a, b, breaks, QUAD_REL_TOL, ctx)
}

pub fn integrate_with_tol<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    ctx: &str,
) -> Result<f64> {
    let mut knots = vec![a];
    let mut interior: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    interior.sort_by(|x, y| x.total_cmp(y));
    interior.dedup();
    knots.extend(interior);
    let mut total = 0.0;
    if b.is_infinite() {
        let last = *knots.last().unwrap();
        for w in knots.windows(2) {
            total += de_integrate(&f, w[0], w[1], rel_tol, ctx)?;
        }
        total += integrate_tail(&f, last, rel_tol, ctx)?;
    } else {
        knots.push(b);
        for w in knots.windows(2) {
            total += de_integrate(&f, w[0], w[1], rel_tol, ctx)?;
        }
    }
    Ok(total)
}

/// Bisection on `[lo, hi]` where `below(x)` holds left of the target point and
/// fails right of it. Stops at width `tol` or when the interval cannot shrink.
pub fn bisect<P: Fn(f64) -> bool>(below: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `hi = start * 2^k` with `pred(hi)` true.
pub fn expand_until<P: Fn(f64) -> bool>(start: f64, pred: P) -> Option<f64> {
    let mut hi = start;
    for _ in 0..2000 {
        if pred(hi) {
            return Some(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    None
}
