//! Oracle price adoption with an imbalance surcharge.
//!
//! Two-token pools only. The adopted price `p` is the price of token 0 in
//! units of token 1. When the pool sells token `o`, the offered price of `o`
//! rises with that token's shortfall below its target reserve:
//!
//! ```text
//! shortfall_o = max(0, (target_o - r_o) / target_o)
//! P_o         = base_o * (1 + k * shortfall_o)
//! ```
//!
//! `base_o` is `p` for token 0 and `1/p` for token 1 (both quoted in the other
//! token). A token held above target carries no surcharge. `P_o` is affine in
//! `r_o`, so the input owed for a finite output is a piecewise quadratic
//! integral over the reserve trajectory.

use super::CurveError;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    /// Price of the outgoing token in units of the incoming token, no surcharge.
    base: f64,
    k: f64,
    target: f64,
    reserve: f64,
}

pub(crate) fn check(k: f64, targets: &[f64], reserves: &[f64]) -> Result<(), CurveError> {
    if !(0.0..=1.0).contains(&k) {
        return Err(CurveError::Domain(format!("k must lie in [0, 1], got {k}")));
    }
    if targets.len() != 2 || reserves.len() != 2 {
        return Err(CurveError::Domain("price adoption pools hold exactly two tokens".into()));
    }
    if targets.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CurveError::Domain("target reserves must be > 0".into()));
    }
    if reserves.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(CurveError::Domain("reserves must be >= 0".into()));
    }
    Ok(())
}

pub(crate) fn side(
    k: f64,
    targets: &[f64],
    reserves: &[f64],
    adopted_price: f64,
    token_out: usize,
) -> Result<Side, CurveError> {
    if !(adopted_price.is_finite() && adopted_price > 0.0) {
        return Err(CurveError::Domain(format!("adopted price must be > 0, got {adopted_price}")));
    }
    let base = if token_out == 0 { adopted_price } else { 1.0 / adopted_price };
    Ok(Side { base, k, target: targets[token_out], reserve: reserves[token_out] })
}

impl Side {
    pub(crate) fn shortfall(&self, reserve: f64) -> f64 {
        ((self.target - reserve) / self.target).max(0.0)
    }

    /// Marginal price of the outgoing token at `reserve`.
    pub(crate) fn marginal(&self, reserve: f64) -> f64 {
        self.base * (1.0 + self.k * self.shortfall(reserve))
    }

    /// Input owed for taking `dy` out: integral of the marginal price from
    /// `reserve - dy` to `reserve`.
    pub(crate) fn cost_of_output(&self, dy: f64) -> f64 {
        let lo = self.reserve - dy;
        let a = lo.min(self.target);
        let b = self.reserve.min(self.target);
        let slope_part = ((self.target - a).powi(2) - (self.target - b).powi(2)) / 2.0;
        self.base * (dy + self.k / self.target * slope_part)
    }

    /// Output received for `dx` in; inverse of [`Side::cost_of_output`].
    pub(crate) fn output_for_input(&self, dx: f64) -> f64 {
        if dx == 0.0 {
            return 0.0;
        }
        let flat = (self.reserve - self.target).max(0.0);
        if dx <= self.base * flat {
            return dx / self.base;
        }
        let rest = dx - self.base * flat;
        let start = self.reserve.min(self.target);
        let a = self.base * self.k / (2.0 * self.target);
        let b = self.base * (1.0 + self.k * (self.target - start) / self.target);
        // positive root of a z^2 + b z - rest = 0 in cancellation-free form
        let z = 2.0 * rest / (b + (b * b + 4.0 * a * rest).sqrt());
        flat + z
    }
}

/// Output amount for selling `dx` of `token_in`.
pub fn pmm_trade_cost(
    k: f64,
    target_reserves: &[f64],
    current_reserves: &[f64],
    adopted_price: f64,
    token_in: usize,
    token_out: usize,
    dx: f64,
) -> Result<f64, CurveError> {
    check(k, target_reserves, current_reserves)?;
    if token_in > 1 || token_out > 1 || token_in == token_out {
        return Err(CurveError::InvalidIndex { token_in, token_out, tokens: 2 });
    }
    if !(dx.is_finite() && dx >= 0.0) {
        return Err(CurveError::Domain(format!("trade amount must be >= 0, got {dx}")));
    }
    let s = side(k, target_reserves, current_reserves, adopted_price, token_out)?;
    let dy = s.output_for_input(dx);
    if dy > s.reserve {
        return Err(CurveError::Depleted { token: token_out, requested: dy, available: s.reserve });
    }
    Ok(dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_k_is_oracle_price() {
        let dy = pmm_trade_cost(0.0, &[100.0, 1000.0], &[57.0, 3000.0], 10.0, 0, 1, 1.0).unwrap();
        assert!((dy - 10.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_price_with_shortfall() {
        let s = side(0.5, &[100.0, 1000.0], &[80.0, 1200.0], 10.0, 0).unwrap();
        assert!((s.marginal(80.0) - 11.0).abs() < 1e-12);
        // tiny purchase pays the marginal price
        let dx = 1e-7;
        let dy = s.output_for_input(dx);
        assert!((dx / dy - 11.0).abs() < 1e-6);
    }

    #[test]
    fn balanced_marginal_equals_oracle() {
        let s = side(0.5, &[100.0, 1000.0], &[100.0, 1000.0], 10.0, 0).unwrap();
        assert!((s.marginal(100.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn cost_and_output_are_inverse_across_the_kink() {
        // reserve above target: part of the trade is flat, the rest surcharged
        let s = side(0.8, &[100.0, 100.0], &[130.0, 70.0], 2.0, 0).unwrap();
        for dy in [5.0, 30.0, 31.0, 90.0, 129.0] {
            let dx = s.cost_of_output(dy);
            assert!((s.output_for_input(dx) - dy).abs() < 1e-9 * dy.max(1.0), "dy={dy}");
        }
    }

    #[test]
    fn cost_matches_midpoint_quadrature() {
        let s = side(0.6, &[100.0, 100.0], &[120.0, 80.0], 3.0, 0).unwrap();
        let dy = 70.0;
        let n = 200_000;
        let h = dy / n as f64;
        let quad: f64 = (0..n).map(|i| s.marginal(120.0 - (i as f64 + 0.5) * h) * h).sum();
        assert!((quad - s.cost_of_output(dy)).abs() < 1e-6);
    }

    #[test]
    fn overdraw_is_depletion() {
        let err = pmm_trade_cost(0.5, &[100.0, 100.0], &[100.0, 100.0], 1.0, 1, 0, 1e6).unwrap_err();
        assert!(matches!(err, CurveError::Depleted { .. }));
    }
}
