//! Logarithmic market scoring rule over outstanding outcome shares `q`.
//!
//! `C(q) = b * ln(sum_j exp(q_j / b))`; outcome prices are the softmax of
//! `q / b`. All evaluations go through a shifted log-sum-exp so large share
//! positions do not overflow.

use super::solver::newton_bisect;
use super::CurveError;

fn check_b(b: f64) -> Result<(), CurveError> {
    if b.is_finite() && b > 0.0 {
        Ok(())
    } else {
        Err(CurveError::Domain(format!("lmsr liquidity b must be > 0, got {b}")))
    }
}

fn check_q(q: &[f64]) -> Result<(), CurveError> {
    if q.len() < 2 {
        return Err(CurveError::Domain("lmsr needs at least two outcomes".into()));
    }
    if let Some(bad) = q.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(CurveError::Domain(format!("outcome quantity must be >= 0, got {bad}")));
    }
    Ok(())
}

/// Cost function `C(q)`.
pub fn cost(b: f64, q: &[f64]) -> Result<f64, CurveError> {
    check_b(b)?;
    check_q(q)?;
    let m = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = q.iter().map(|qi| ((qi - m) / b).exp()).sum();
    Ok(m + b * s.ln())
}

/// Instantaneous outcome prices; each lies in (0, 1) and they sum to one.
pub fn prices(b: f64, q: &[f64]) -> Result<Vec<f64>, CurveError> {
    check_b(b)?;
    check_q(q)?;
    Ok(softmax(b, q))
}

fn softmax(b: f64, q: &[f64]) -> Vec<f64> {
    let m = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = q.iter().map(|qi| ((qi - m) / b).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// `C(q + dq) - C(q)`: positive means the trader pays collateral.
pub fn trade_cost(b: f64, q: &[f64], dq: &[f64]) -> Result<f64, CurveError> {
    check_b(b)?;
    check_q(q)?;
    if dq.len() != q.len() {
        return Err(CurveError::Domain(format!(
            "trade vector has {} entries, market has {} outcomes",
            dq.len(),
            q.len()
        )));
    }
    if let Some((i, _)) = q
        .iter()
        .zip(dq)
        .enumerate()
        .find(|(_, (qi, di))| !di.is_finite() || **qi + **di < 0.0)
    {
        return Err(CurveError::Domain(format!("outcome {i} would go below zero shares")));
    }
    Ok(cost_delta(b, q, dq))
}

// b * ln(sum_j p_j * exp(dq_j / b)) written with ln1p/expm1 so small trades
// keep full relative precision.
fn cost_delta(b: f64, q: &[f64], dq: &[f64]) -> f64 {
    let p = softmax(b, q);
    let mut acc = 0.0;
    let mut big = false;
    for (pj, dj) in p.iter().zip(dq) {
        let e = (dj / b).exp_m1();
        if !e.is_finite() {
            big = true;
        }
        acc += pj * e;
    }
    if big || acc > 1e300 {
        // huge purchases: fall back to the direct difference
        let next: Vec<f64> = q.iter().zip(dq).map(|(a, d)| a + d).collect();
        let m1 = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let m0 = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s1: f64 = next.iter().map(|v| ((v - m1) / b).exp()).sum();
        let s0: f64 = q.iter().map(|v| ((v - m0) / b).exp()).sum();
        return (m1 - m0) + b * (s1.ln() - s0.ln());
    }
    b * acc.ln_1p()
}

fn single(q: &[f64], j: usize, amount: f64) -> Vec<f64> {
    let mut dq = vec![0.0; q.len()];
    dq[j] = amount;
    dq
}

/// Shares of outcome `j` bought for `collateral` (before any fee).
pub fn shares_for_collateral(b: f64, q: &[f64], j: usize, collateral: f64) -> Result<f64, CurveError> {
    check_b(b)?;
    check_q(q)?;
    if collateral == 0.0 {
        return Ok(0.0);
    }
    let pj = softmax(b, q)[j];
    let residual = |s: f64| {
        let r = cost_delta(b, q, &single(q, j, s)) - collateral;
        let mut shifted = q.to_vec();
        shifted[j] += s;
        (r, softmax(b, &shifted)[j])
    };
    // cost(s) lies between p_j * s and s, which brackets the root
    let lo = collateral;
    let hi = collateral / pj;
    let root = newton_bisect(residual, lo, hi, lo).map_err(|e| CurveError::Solver { residual: e.residual })?;
    Ok(root.x)
}

/// Collateral paid out for selling `shares` of outcome `j`.
pub fn collateral_for_shares(b: f64, q: &[f64], j: usize, shares: f64) -> Result<f64, CurveError> {
    check_b(b)?;
    check_q(q)?;
    if shares > q[j] {
        return Err(CurveError::Depleted { token: j, requested: shares, available: q[j] });
    }
    Ok(-cost_delta(b, q, &single(q, j, -shares)))
}

/// Shares of outcome `j` that must be sold to receive `collateral`.
pub fn shares_for_payout(b: f64, q: &[f64], j: usize, collateral: f64) -> Result<f64, CurveError> {
    check_b(b)?;
    check_q(q)?;
    if collateral == 0.0 {
        return Ok(0.0);
    }
    let max_payout = -cost_delta(b, q, &single(q, j, -q[j]));
    if collateral >= max_payout {
        return Err(CurveError::Depleted { token: q.len(), requested: collateral, available: max_payout });
    }
    let residual = |s: f64| {
        let r = -cost_delta(b, q, &single(q, j, -s)) - collateral;
        let mut shifted = q.to_vec();
        shifted[j] -= s;
        (r, softmax(b, &shifted)[j])
    };
    let root = newton_bisect(residual, 0.0, q[j], collateral).map_err(|e| CurveError::Solver { residual: e.residual })?;
    Ok(root.x)
}
