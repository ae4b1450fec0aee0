//! Shared domain primitives: token amounts, identifiers and fee parameters.

use std::fmt;
use std::ops::Add;

use thiserror::Error;

/// Default relative tolerance for amount comparisons.
pub const REL_TOL: f64 = 1e-9;

/// Relative comparison with an absolute floor of `tol` for values near zero.
pub fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both are zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmountError {
    #[error("amount must be finite and non-negative, got {0}")]
    Invalid(f64),
    #[error("subtraction underflow: {lhs} - {rhs} is negative")]
    Underflow { lhs: f64, rhs: f64 },
}

/// Non-negative quantity of a single token.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Amount(f64);

impl Amount {
    pub const ZERO: Amount = Amount(0.0);

    pub fn new(value: f64) -> Result<Self, AmountError> {
        if value.is_finite() && value >= 0.0 {
            // normalise -0.0
            Ok(Amount(value + 0.0))
        } else {
            Err(AmountError::Invalid(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn checked_sub(self, rhs: Amount) -> Result<Amount, AmountError> {
        let diff = self.0 - rhs.0;
        if diff < 0.0 {
            Err(AmountError::Underflow { lhs: self.0, rhs: rhs.0 })
        } else {
            Ok(Amount(diff))
        }
    }

    pub fn scale(self, factor: f64) -> Result<Amount, AmountError> {
        Amount::new(self.0 * factor)
    }
}

impl Add for Amount {
    type Output = Amount;

    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Amount {
    type Error = AmountError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Amount::new(value)
    }
}

/// Short token symbol such as `WETH` or `USDC`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(String);

impl TokenId {
    pub fn new(symbol: impl Into<String>) -> Self {
        TokenId(symbol.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TokenId {
    fn from(s: &str) -> Self {
        TokenId::new(s)
    }
}

/// Opaque account identifier. Pools hold balances under their own account.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Self {
        AccountId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for AccountId {
    fn from(s: String) -> Self {
        AccountId(s)
    }
}

impl From<&str> for AccountId {
    fn from(s: &str) -> Self {
        AccountId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeeError {
    #[error("trade fee must lie in [0, 1), got {0}")]
    TradeFee(f64),
    #[error("surcharge k must lie in [0, 1], got {0}")]
    Surcharge(f64),
}

/// Pool parameters that adjust the curve price.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeeParams {
    trade_fee: f64,
    surcharge_k: f64,
}

impl FeeParams {
    pub fn new(trade_fee: f64, surcharge_k: f64) -> Result<Self, FeeError> {
        if !(0.0..1.0).contains(&trade_fee) {
            return Err(FeeError::TradeFee(trade_fee));
        }
        if !(0.0..=1.0).contains(&surcharge_k) {
            return Err(FeeError::Surcharge(surcharge_k));
        }
        Ok(FeeParams { trade_fee, surcharge_k })
    }

    pub fn trade_fee(&self) -> f64 {
        self.trade_fee
    }

    pub fn surcharge_k(&self) -> f64 {
        self.surcharge_k
    }

    pub fn with_trade_fee(self, trade_fee: f64) -> Result<Self, FeeError> {
        FeeParams::new(trade_fee, self.surcharge_k)
    }
}
