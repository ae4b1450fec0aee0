//! Constant product-sum (StableSwap) invariant.
//!
//! ```text
//! chi * D^(n-1) * sum(x) + prod(x) = chi * D^n + (D / n)^n
//! ```
//!
//! `chi = 0` reduces to the constant product `prod(x) = (D/n)^n`; as
//! `chi -> inf` the sum term dominates and `D -> sum(x)`. For positive
//! reserves the residual has exactly one positive root (one sign change in
//! its coefficients), and it lies in `(0, sum(x)]` by AM-GM.

use super::solver::{newton_bisect, Root};
use super::CurveError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSwapD {
    pub value: f64,
    pub newton_iterations: u32,
    pub used_bisection: bool,
}

/// Residual and derivative of the invariant in `D`.
#[cfg(test)]
pub(crate) fn residual(d: f64, sum: f64, prod: f64, chi: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let dn1 = d.powi(n as i32 - 1);
    let f = chi * dn1 * sum + prod - chi * dn1 * d - (d / nf).powi(n as i32);
    let df = chi * (nf - 1.0) * d.powi(n as i32 - 2) * sum
        - chi * nf * dn1
        - (d / nf).powi(n as i32 - 1);
    (f, df)
}

pub fn solve_stableswap_d(reserves: &[f64], chi: f64) -> Result<StableSwapD, CurveError> {
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(CurveError::Domain(format!("chi must be >= 0, got {chi}")));
    }
    if reserves.len() < 2 {
        return Err(CurveError::Domain("need at least two reserves".into()));
    }
    if let Some(bad) = reserves.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(CurveError::Domain(format!("reserves must be > 0, got {bad}")));
    }
    let n = reserves.len();
    let sum: f64 = reserves.iter().sum();
    let prod: f64 = reserves.iter().product();
    let nf = n as f64;
    let floor = nf * prod.powf(1.0 / nf);
    if floor >= sum {
        return Ok(StableSwapD { value: sum, newton_iterations: 0, used_bisection: false });
    }
    let lo = floor * (1.0 - 1e-10);
    let scaled = |d: f64| {
        let tail = prod / d.powi(n as i32);
        let h = chi * sum / d + tail - chi - nf.powi(-(n as i32));
        let dh = -(chi * sum / d + nf * tail) / d;
        (h, dh)
    };
    let Root { x, newton_iterations, used_bisection, .. } =
        newton_bisect(scaled, lo, sum, lo).map_err(|e| CurveError::Solver { residual: e.residual })?;
    Ok(StableSwapD { value: x, newton_iterations, used_bisection })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_reserves_give_sum() {
        for chi in [0.0, 0.5, 10.0, 1e6] {
            let d = solve_stableswap_d(&[100.0, 100.0], chi).unwrap();
            assert!((d.value - 200.0).abs() < 1e-9, "chi={chi} d={}", d.value);
        }
    }

    #[test]
    fn product_limit() {
        let d = solve_stableswap_d(&[100.0, 50.0], 0.0).unwrap();
        assert!((d.value - 2.0 * 5000f64.sqrt()).abs() < 1e-9);
        assert!((d.value - 141.42136).abs() < 1e-5);
    }

    #[test]
    fn sum_limit() {
        let d = solve_stableswap_d(&[100.0, 50.0], 1e6).unwrap();
        assert!((d.value - 150.0).abs() / 150.0 < 1e-4);
    }

    #[test]
    fn three_tokens() {
        let r = [30.0, 70.0, 55.0];
        let d = solve_stableswap_d(&r, 2.0).unwrap();
        let s: f64 = r.iter().sum();
        let p: f64 = r.iter().product();
        let (res, _) = residual(d.value, s, p, 2.0, 3);
        assert!(res.abs() < 1e-9 * d.value.powi(3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_stableswap_d(&[1.0, 0.0], 1.0).is_err());
        assert!(solve_stableswap_d(&[1.0, 2.0], -1.0).is_err());
    }
}
