//! Safeguarded Newton iteration with a bisection fallback.

/// Newton iteration cap before falling back to bisection.
pub const MAX_NEWTON_ITERATIONS: u32 = 64;
/// Relative step tolerance for convergence.
pub const REL_TOLERANCE: f64 = 1e-12;

const MAX_BISECTION_ITERATIONS: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub newton_iterations: u32,
    pub used_bisection: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonConvergence {
    pub x: f64,
    pub residual: f64,
}

/// Finds a root of `f` inside `[lo, hi]` starting from `x0`.
///
/// `f` returns the residual and its derivative. The bracket must straddle a
/// sign change. Newton steps that leave the bracket are replaced by bisection
/// of the current bracket; if Newton has not met the step tolerance after
/// [`MAX_NEWTON_ITERATIONS`] the remaining work is pure bisection.
pub fn newton_bisect<F>(f: F, lo: f64, hi: f64, x0: f64) -> Result<Root, NonConvergence>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let f_lo = f(lo).0;
    let f_hi = f(hi).0;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, newton_iterations: 0, used_bisection: false });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, newton_iterations: 0, used_bisection: false });
    }
    if f_lo.signum() == f_hi.signum() {
        let x = if f_lo.abs() < f_hi.abs() { lo } else { hi };
        return Err(NonConvergence { x, residual: f_lo.abs().min(f_hi.abs()) });
    }
    let lo_negative = f_lo < 0.0;

    let mut x = if x0 >= lo && x0 <= hi { x0 } else { 0.5 * (lo + hi) };
    let mut used_bisection = false;
    for iter in 1..=MAX_NEWTON_ITERATIONS {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(Root { x, residual: 0.0, newton_iterations: iter, used_bisection });
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton.is_finite() && newton >= lo && newton <= hi {
            newton
        } else {
            used_bisection = true;
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= REL_TOLERANCE * x.abs() || hi - lo <= REL_TOLERANCE * x.abs() {
            // one more Newton step polishes the root to rounding level
            let (fx, dfx) = f(x);
            let polished = x - fx / dfx;
            if dfx != 0.0 && polished.is_finite() && polished >= lo && polished <= hi {
                let r = f(polished).0;
                if r.abs() <= fx.abs() {
                    return Ok(Root { x: polished, residual: r, newton_iterations: iter, used_bisection });
                }
            }
            return Ok(Root { x, residual: fx, newton_iterations: iter, used_bisection });
        }
    }

    bisect(&f, lo, hi, lo_negative).map(|(x, residual)| Root {
        x,
        residual,
        newton_iterations: MAX_NEWTON_ITERATIONS,
        used_bisection: true,
    })
}

fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, lo_negative: bool) -> Result<(f64, f64), NonConvergence>
where
    F: Fn(f64) -> (f64, f64),
{
    let mut mid = 0.5 * (lo + hi);
    let mut fm = f(mid).0;
    for _ in 0..MAX_BISECTION_ITERATIONS {
        if fm == 0.0 || hi - lo <= REL_TOLERANCE * mid.abs() {
            return Ok((mid, fm));
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == mid {
            return Ok((mid, fm));
        }
        mid = next;
        fm = f(mid).0;
    }
    Err(NonConvergence { x: mid, residual: fm })
}
