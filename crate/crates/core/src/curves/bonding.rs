//! Exponential bonding curve: the reserve required to back a circulating
//! supply `S` is `r(S) = S^kappa / c`.

use super::CurveError;

pub(crate) fn check_params(kappa: f64, c: f64) -> Result<(), CurveError> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(CurveError::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(CurveError::Domain(format!("c must be > 0, got {c}")));
    }
    Ok(())
}

/// Reserve backing a supply of `supply` tokens.
pub fn reserve_for_supply(kappa: f64, c: f64, supply: f64) -> f64 {
    supply.powf(kappa) / c
}

/// Marginal reserve per issued token, `dr/dS`.
pub fn marginal_price(kappa: f64, c: f64, supply: f64) -> f64 {
    kappa * supply.powf(kappa - 1.0) / c
}

/// Reserve delta `|r(S + dS) - r(S)|`.
///
/// Positive `d_supply` is the cost of minting, negative the payout for
/// burning.
pub fn bonding_trade(kappa: f64, c: f64, supply: f64, d_supply: f64) -> Result<f64, CurveError> {
    check_params(kappa, c)?;
    if !(supply.is_finite() && supply >= 0.0) || !d_supply.is_finite() {
        return Err(CurveError::Domain(format!("invalid supply {supply} / change {d_supply}")));
    }
    if supply + d_supply < 0.0 {
        return Err(CurveError::Domain(format!(
            "cannot burn {} tokens from a supply of {supply}",
            -d_supply
        )));
    }
    if d_supply == 0.0 {
        return Ok(0.0);
    }
    if supply == 0.0 {
        return Ok(reserve_for_supply(kappa, c, d_supply));
    }
    // S^k * expm1(k * ln1p(dS/S)) / c keeps precision for small changes
    let ratio = (kappa * (d_supply / supply).ln_1p()).exp_m1();
    Ok((supply.powf(kappa) * ratio / c).abs())
}

/// Tokens minted when `reserve_in` is bonded at supply `supply`.
pub fn supply_for_reserve(kappa: f64, c: f64, supply: f64, reserve_in: f64) -> Result<f64, CurveError> {
    check_params(kappa, c)?;
    if reserve_in == 0.0 {
        return Ok(0.0);
    }
    if supply == 0.0 {
        return Ok((c * reserve_in).powf(1.0 / kappa));
    }
    // S' = (S^k + c dx)^(1/k)  =>  dS = S * expm1(ln1p(c dx / S^k) / k)
    let rel = c * reserve_in / supply.powf(kappa);
    Ok(supply * (rel.ln_1p() / kappa).exp_m1())
}

/// Tokens that must be burned at supply `supply` to release `reserve_out`.
pub fn supply_for_payout(kappa: f64, c: f64, supply: f64, reserve_out: f64) -> Result<f64, CurveError> {
    check_params(kappa, c)?;
    if reserve_out == 0.0 {
        return Ok(0.0);
    }
    let backing = reserve_for_supply(kappa, c, supply);
    if reserve_out > backing {
        return Err(CurveError::Depleted { token: 0, requested: reserve_out, available: backing });
    }
    let rel = -reserve_out / backing;
    Ok(-supply * (rel.ln_1p() / kappa).exp_m1())
}
