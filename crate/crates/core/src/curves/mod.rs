//! Price-discovery curves behind one pricing interface.
//!
//! Reserve vectors are interpreted per curve:
//!
//! | curve | state vector | token indices |
//! |-------|--------------|---------------|
//! | conservation curves | pool reserves | one per reserve |
//! | `Lmsr` | outstanding shares `q` | `0..n` outcomes, `n` collateral |
//! | `PriceAdoption` | two pool reserves | `0` base, `1` quote |
//! | `Exponential` | `[reserve, supply]` | `0` reserve token, `1` issued token |
//!
//! Spot prices and quotes are expressed as units of `token_out` per unit of
//! `token_in`. Conservation curves are quoted by solving the conservation
//! equation numerically.

pub mod bonding;
pub mod lmsr;
pub mod pmm;
pub mod solver;
pub mod stableswap;

use thiserror::Error;

pub use bonding::bonding_trade;
pub use lmsr::trade_cost as lmsr_trade_cost;
pub use pmm::pmm_trade_cost;
pub use stableswap::{solve_stableswap_d, StableSwapD};

use solver::newton_bisect;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("reserve of token {token} depleted: requested {requested}, available {available}")]
    Depleted { token: usize, requested: f64, available: f64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("price adoption curve needs an adopted oracle price")]
    MissingOraclePrice,
    #[error("invalid token pair {token_in} -> {token_out} for a curve with {tokens} tokens")]
    InvalidIndex { token_in: usize, token_out: usize, tokens: usize },
    #[error("solver failed to converge (residual {residual:e})")]
    Solver { residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    ConstantProduct,
    GeometricMean { weights: Vec<f64> },
    ConstantSum,
    ConstantProductSum { chi: f64 },
    ConstantPowerSum { t: f64 },
    Lmsr { b: f64 },
    PriceAdoption { k: f64, target_reserves: Vec<f64> },
    Exponential { kappa: f64, c: f64 },
}

impl CurveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CurveSpec::ConstantProduct => "constant-product",
            CurveSpec::GeometricMean { .. } => "geometric-mean",
            CurveSpec::ConstantSum => "constant-sum",
            CurveSpec::ConstantProductSum { .. } => "constant-product-sum",
            CurveSpec::ConstantPowerSum { .. } => "constant-power-sum",
            CurveSpec::Lmsr { .. } => "lmsr",
            CurveSpec::PriceAdoption { .. } => "price-adoption",
            CurveSpec::Exponential { .. } => "exponential",
        }
    }

    /// Curves whose zero-fee trades hold a scalar function of the reserves fixed.
    pub fn has_conservation_function(&self) -> bool {
        !matches!(self, CurveSpec::Lmsr { .. } | CurveSpec::PriceAdoption { .. })
    }

    /// Checks parameter domains, and the weight count against `n_reserves`.
    pub fn validate(&self, n_reserves: usize) -> Result<(), CurveError> {
        let domain = |msg: String| Err(CurveError::Domain(msg));
        match self {
            CurveSpec::ConstantProduct | CurveSpec::ConstantSum => Ok(()),
            CurveSpec::GeometricMean { weights } => {
                if weights.len() != n_reserves {
                    return domain(format!("{} weights for {} reserves", weights.len(), n_reserves));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return domain("weights must be > 0".into());
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return domain(format!("weights must sum to 1, got {s}"));
                }
                Ok(())
            }
            CurveSpec::ConstantProductSum { chi } => {
                if chi.is_finite() && *chi >= 0.0 {
                    Ok(())
                } else {
                    domain(format!("chi must be >= 0, got {chi}"))
                }
            }
            CurveSpec::ConstantPowerSum { t } => {
                if (0.0..1.0).contains(t) {
                    Ok(())
                } else {
                    domain(format!("t must lie in [0, 1), got {t}"))
                }
            }
            CurveSpec::Lmsr { b } => {
                if b.is_finite() && *b > 0.0 {
                    Ok(())
                } else {
                    domain(format!("b must be > 0, got {b}"))
                }
            }
            CurveSpec::PriceAdoption { k, target_reserves } => {
                if !(0.0..=1.0).contains(k) {
                    return domain(format!("k must lie in [0, 1], got {k}"));
                }
                if target_reserves.len() != 2 || n_reserves != 2 {
                    return domain("price adoption pools hold exactly two tokens".into());
                }
                if target_reserves.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return domain("target reserves must be > 0".into());
                }
                Ok(())
            }
            CurveSpec::Exponential { kappa, c } => bonding::check_params(*kappa, *c),
        }
    }

    /// Number of tradable token indices for a state vector of `len` entries.
    pub fn token_count(&self, len: usize) -> usize {
        match self {
            CurveSpec::Lmsr { .. } => len + 1,
            _ => len,
        }
    }
}

fn check_state(spec: &CurveSpec, reserves: &[f64]) -> Result<(), CurveError> {
    if let Some(bad) = reserves.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(CurveError::Domain(format!("reserve must be finite and >= 0, got {bad}")));
    }
    let n = match spec {
        CurveSpec::Lmsr { .. } => reserves.len(),
        CurveSpec::Exponential { .. } => {
            if reserves.len() != 2 {
                return Err(CurveError::Domain("exponential state is [reserve, supply]".into()));
            }
            1
        }
        _ => reserves.len(),
    };
    if !matches!(spec, CurveSpec::Exponential { .. }) && n < 2 {
        return Err(CurveError::Domain("need at least two tokens".into()));
    }
    spec.validate(reserves.len())
}

fn check_pair(spec: &CurveSpec, reserves: &[f64], token_in: usize, token_out: usize) -> Result<(), CurveError> {
    let tokens = spec.token_count(reserves.len());
    if token_in >= tokens || token_out >= tokens || token_in == token_out {
        return Err(CurveError::InvalidIndex { token_in, token_out, tokens });
    }
    if let CurveSpec::Lmsr { .. } = spec {
        let collateral = reserves.len();
        if token_in != collateral && token_out != collateral {
            return Err(CurveError::Unsupported("lmsr trades go through the collateral token"));
        }
    }
    Ok(())
}

fn check_amount(amount: f64) -> Result<(), CurveError> {
    if amount.is_finite() && amount >= 0.0 {
        Ok(())
    } else {
        Err(CurveError::Domain(format!("trade amount must be >= 0, got {amount}")))
    }
}

/// Scalar conservation value of the state.
///
/// `ConstantProductSum` returns `D`; `Lmsr` returns the cost function
/// `C(q)`; `Exponential` returns `S^kappa / r`.
pub fn invariant_value(spec: &CurveSpec, reserves: &[f64]) -> Result<f64, CurveError> {
    check_state(spec, reserves)?;
    let positive = || -> Result<(), CurveError> {
        match reserves.iter().find(|r| **r <= 0.0) {
            Some(r) => Err(CurveError::Domain(format!("reserves must be > 0, got {r}"))),
            None => Ok(()),
        }
    };
    match spec {
        CurveSpec::ConstantProduct => {
            positive()?;
            Ok(reserves.iter().product())
        }
        CurveSpec::GeometricMean { weights } => {
            positive()?;
            Ok(reserves.iter().zip(weights).map(|(r, w)| r.powf(*w)).product())
        }
        CurveSpec::ConstantSum => {
            positive()?;
            Ok(reserves.iter().sum())
        }
        CurveSpec::ConstantProductSum { chi } => {
            positive()?;
            Ok(solve_stableswap_d(reserves, *chi)?.value)
        }
        CurveSpec::ConstantPowerSum { t } => {
            positive()?;
            Ok(reserves.iter().map(|r| r.powf(1.0 - t)).sum())
        }
        CurveSpec::Lmsr { b } => lmsr::cost(*b, reserves),
        CurveSpec::PriceAdoption { .. } => Err(CurveError::Unsupported("price adoption has no conservation function")),
        CurveSpec::Exponential { kappa, .. } => {
            positive()?;
            Ok(reserves[1].powf(*kappa) / reserves[0])
        }
    }
}

/// Level function of a conservation curve, measured relative to a base state.
///
/// Deltas are evaluated in log/expm1 form so that a change of one part in
/// 10^12 of a reserve is still resolved to full precision.
struct Conservation<'a> {
    spec: &'a CurveSpec,
    base: &'a [f64],
    /// `chi * D^(n-1)` for the product-sum curve, computed once per quote.
    sum_coeff: f64,
}

impl<'a> Conservation<'a> {
    fn new(spec: &'a CurveSpec, base: &'a [f64]) -> Result<Self, CurveError> {
        if let Some(r) = base.iter().find(|r| **r <= 0.0) {
            return Err(CurveError::Domain(format!("reserves must be > 0, got {r}")));
        }
        let sum_coeff = match spec {
            CurveSpec::ConstantProductSum { chi } => {
                let d = solve_stableswap_d(base, *chi)?.value;
                chi * d.powi(base.len() as i32 - 1)
            }
            _ => 0.0,
        };
        Ok(Conservation { spec, base, sum_coeff })
    }

    /// `L(base + di e_i + dj e_j) - L(base)`.
    fn delta(&self, i: usize, di: f64, j: usize, dj: f64) -> f64 {
        let (ri, rj) = (self.base[i], self.base[j]);
        match self.spec {
            CurveSpec::ConstantProduct => (di / ri).ln_1p() + (dj / rj).ln_1p(),
            CurveSpec::GeometricMean { weights } => weights[i] * (di / ri).ln_1p() + weights[j] * (dj / rj).ln_1p(),
            CurveSpec::ConstantSum => di + dj,
            CurveSpec::ConstantPowerSum { t } => {
                let e = 1.0 - t;
                let term = |r: f64, d: f64| r.powf(e) * (e * (d / r).ln_1p()).exp_m1();
                term(ri, di) + term(rj, dj)
            }
            CurveSpec::ConstantProductSum { .. } => {
                let prod: f64 = self.base.iter().product();
                let growth = ((di / ri).ln_1p() + (dj / rj).ln_1p()).exp_m1();
                self.sum_coeff * (di + dj) + prod * growth
            }
            _ => unreachable!("not a conservation curve"),
        }
    }

    /// Partial derivative of `L` in reserve `k`, at `base + di e_i + dj e_j`.
    fn partial(&self, k: usize, i: usize, di: f64, j: usize, dj: f64) -> f64 {
        let at = |m: usize| {
            let mut v = self.base[m];
            if m == i {
                v += di;
            }
            if m == j {
                v += dj;
            }
            v
        };
        match self.spec {
            CurveSpec::ConstantProduct => 1.0 / at(k),
            CurveSpec::GeometricMean { weights } => weights[k] / at(k),
            CurveSpec::ConstantSum => 1.0,
            CurveSpec::ConstantPowerSum { t } => (1.0 - t) * at(k).powf(-t),
            CurveSpec::ConstantProductSum { .. } => {
                let others: f64 = (0..self.base.len()).filter(|m| *m != k).map(at).product();
                self.sum_coeff + others
            }
            _ => unreachable!("not a conservation curve"),
        }
    }

    fn spot(&self, token_in: usize, token_out: usize) -> f64 {
        self.partial(token_in, token_in, 0.0, token_out, 0.0) / self.partial(token_out, token_in, 0.0, token_out, 0.0)
    }

    fn exact_in(&self, i: usize, j: usize, dx: f64) -> Result<f64, CurveError> {
        if dx == 0.0 {
            return Ok(0.0);
        }
        let y = self.base[j];
        let g = |u: f64| (self.delta(i, dx, j, -u), -self.partial(j, i, dx, j, -u));
        let at_depletion = self.delta(i, dx, j, -y);
        if at_depletion > 0.0 {
            return Err(CurveError::Depleted { token: j, requested: dx * self.spot(i, j), available: y });
        }
        let guess = (dx * self.spot(i, j)).min(y);
        let root = newton_bisect(g, 0.0, y, guess).map_err(|e| CurveError::Solver { residual: e.residual })?;
        Ok(root.x)
    }

    fn exact_out(&self, i: usize, j: usize, dy: f64) -> Result<f64, CurveError> {
        if dy == 0.0 {
            return Ok(0.0);
        }
        let y = self.base[j];
        if dy >= y {
            return Err(CurveError::Depleted { token: j, requested: dy, available: y });
        }
        let h = |v: f64| (self.delta(i, v, j, -dy), self.partial(i, i, v, j, -dy));
        let mut hi = (dy / self.spot(i, j)).max(dy);
        let mut expansions = 0;
        while h(hi).0 < 0.0 {
            hi *= 2.0;
            expansions += 1;
            if expansions > 2000 || !hi.is_finite() {
                return Err(CurveError::Solver { residual: h(hi).0 });
            }
        }
        let guess = dy / self.spot(i, j);
        let root = newton_bisect(h, 0.0, hi, guess).map_err(|e| CurveError::Solver { residual: e.residual })?;
        Ok(root.x)
    }
}

fn adopted(adopted_price: Option<f64>) -> Result<f64, CurveError> {
    adopted_price.ok_or(CurveError::MissingOraclePrice)
}

/// Instantaneous units of `token_out` per unit of `token_in`.
pub fn spot_price(
    spec: &CurveSpec,
    reserves: &[f64],
    token_in: usize,
    token_out: usize,
    adopted_price: Option<f64>,
) -> Result<f64, CurveError> {
    check_state(spec, reserves)?;
    check_pair(spec, reserves, token_in, token_out)?;
    match spec {
        CurveSpec::ConstantSum => Ok(1.0),
        CurveSpec::Lmsr { b } => {
            let collateral = reserves.len();
            let p = lmsr::prices(*b, reserves)?;
            if token_out == collateral {
                Ok(p[token_in])
            } else {
                Ok(1.0 / p[token_out])
            }
        }
        CurveSpec::PriceAdoption { k, target_reserves } => {
            let s = pmm::side(*k, target_reserves, reserves, adopted(adopted_price)?, token_out)?;
            Ok(1.0 / s.marginal(reserves[token_out]))
        }
        CurveSpec::Exponential { kappa, c } => {
            let price = bonding::marginal_price(*kappa, *c, reserves[1]);
            let spot = if token_in == 1 { price } else { 1.0 / price };
            if spot.is_finite() && spot > 0.0 {
                Ok(spot)
            } else {
                Err(CurveError::Domain(format!("spot price undefined at supply {}", reserves[1])))
            }
        }
        _ => Ok(Conservation::new(spec, reserves)?.spot(token_in, token_out)),
    }
}

/// Output amount for selling `dx` of `token_in` (no fee).
pub fn quote_exact_in(
    spec: &CurveSpec,
    reserves: &[f64],
    token_in: usize,
    token_out: usize,
    dx: f64,
    adopted_price: Option<f64>,
) -> Result<f64, CurveError> {
    check_state(spec, reserves)?;
    check_pair(spec, reserves, token_in, token_out)?;
    check_amount(dx)?;
    match spec {
        CurveSpec::Lmsr { b } => {
            let collateral = reserves.len();
            if token_in == collateral {
                lmsr::shares_for_collateral(*b, reserves, token_out, dx)
            } else {
                lmsr::collateral_for_shares(*b, reserves, token_in, dx)
            }
        }
        CurveSpec::PriceAdoption { k, target_reserves } => {
            pmm_trade_cost(*k, target_reserves, reserves, adopted(adopted_price)?, token_in, token_out, dx)
        }
        CurveSpec::Exponential { kappa, c } => {
            let supply = reserves[1];
            if token_in == 0 {
                bonding::supply_for_reserve(*kappa, *c, supply, dx)
            } else {
                if dx > supply {
                    return Err(CurveError::Depleted { token: 1, requested: dx, available: supply });
                }
                bonding_trade(*kappa, *c, supply, -dx)
            }
        }
        _ => Conservation::new(spec, reserves)?.exact_in(token_in, token_out, dx),
    }
}

/// Input amount needed to receive `dy` of `token_out` (no fee).
pub fn quote_exact_out(
    spec: &CurveSpec,
    reserves: &[f64],
    token_in: usize,
    token_out: usize,
    dy: f64,
    adopted_price: Option<f64>,
) -> Result<f64, CurveError> {
    check_state(spec, reserves)?;
    check_pair(spec, reserves, token_in, token_out)?;
    check_amount(dy)?;
    match spec {
        CurveSpec::Lmsr { b } => {
            let collateral = reserves.len();
            if token_in == collateral {
                let mut dq = vec![0.0; reserves.len()];
                dq[token_out] = dy;
                lmsr::trade_cost(*b, reserves, &dq)
            } else {
                lmsr::shares_for_payout(*b, reserves, token_in, dy)
            }
        }
        CurveSpec::PriceAdoption { k, target_reserves } => {
            let s = pmm::side(*k, target_reserves, reserves, adopted(adopted_price)?, token_out)?;
            if dy > reserves[token_out] {
                return Err(CurveError::Depleted { token: token_out, requested: dy, available: reserves[token_out] });
            }
            Ok(s.cost_of_output(dy))
        }
        CurveSpec::Exponential { kappa, c } => {
            let supply = reserves[1];
            if token_out == 1 {
                bonding_trade(*kappa, *c, supply, dy)
            } else {
                bonding::supply_for_payout(*kappa, *c, supply, dy)
            }
        }
        _ => Conservation::new(spec, reserves)?.exact_out(token_in, token_out, dy),
    }
}

#[cfg(test)]
mod tests;
