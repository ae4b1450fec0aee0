//! Archetype orchestration: quoting with fees, settlement against ledgers,
//! LP share accounting, oracle adoption and supply-sovereign mint/burn.
//!
//! Every operation is a pure transition: it takes the current pool (and
//! ledgers) by reference and returns new values, so a failed operation
//! leaves its inputs untouched.

mod config;

use std::collections::BTreeMap;

use thiserror::Error;

pub use config::{Archetype, ConfigError, ParameterAdjustment, PoolConfig, TradingPairs};

use crate::curves::{self, CurveError, CurveSpec};
use crate::ledger::{LedgerError, Ledgers};
use crate::types::{AccountId, Amount, AmountError, FeeError, FeeParams, TokenId};

/// Relative tolerance for proportional deposits and rounding clamps.
const PROPORTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Amount(#[from] AmountError),
    #[error(transparent)]
    Fee(#[from] FeeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown token {0}")]
    UnknownToken(TokenId),
    #[error("{0}")]
    Unsupported(String),
    #[error("price-adopting pool has no oracle price; call set_oracle_price first")]
    MissingOraclePrice,
    #[error("oracle price must be finite and > 0, got {0}")]
    InvalidPrice(f64),
    #[error("initial deposit must be strictly positive in every token")]
    EmptyDeposit,
    #[error("deposit is not proportional to reserves")]
    NotProportional,
    #[error("{account} holds {available} LP shares, {requested} requested")]
    InsufficientShares { account: AccountId, requested: f64, available: f64 },
    #[error("market already resolved")]
    AlreadyResolved,
    #[error("market is resolved; trading and deposits are closed")]
    MarketClosed,
    #[error("market must be resolved before liquidity can be withdrawn")]
    MarketOpen,
    #[error("outcome index {0} out of range")]
    UnknownOutcome(usize),
    #[error("collateral deposit {deposit} is below the worst-case loss b ln n = {required}")]
    Undercollateralised { deposit: f64, required: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarketStatus {
    Open,
    Resolved { winner: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    ExactIn,
    ExactOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeOrder {
    pub trader: AccountId,
    pub token_in: TokenId,
    pub token_out: TokenId,
    pub amount: Amount,
    pub kind: OrderKind,
}

impl TradeOrder {
    pub fn exact_in(trader: impl Into<AccountId>, token_in: &str, token_out: &str, amount: f64) -> Result<Self, AmountError> {
        Ok(TradeOrder {
            trader: trader.into(),
            token_in: TokenId::new(token_in),
            token_out: TokenId::new(token_out),
            amount: Amount::new(amount)?,
            kind: OrderKind::ExactIn,
        })
    }

    pub fn exact_out(trader: impl Into<AccountId>, token_in: &str, token_out: &str, amount: f64) -> Result<Self, AmountError> {
        Ok(TradeOrder { kind: OrderKind::ExactOut, ..Self::exact_in(trader, token_in, token_out, amount)? })
    }
}

/// A priced trade. Spot prices are `NaN` where the curve has none.
#[derive(Debug, Clone, PartialEq)]
pub struct Quote {
    pub amount_in: f64,
    pub amount_out: f64,
    pub fee_paid: f64,
    /// Index of the token the fee is denominated in.
    pub fee_token: usize,
    /// Output withheld by the imbalance surcharge, in output-token units.
    pub surcharge_component: f64,
    pub spot_before: f64,
    pub spot_after: f64,
    pub mean_price: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerDelta {
    pub token: TokenId,
    pub account: AccountId,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeReceipt {
    pub quote: Quote,
    pub reserves_after: Vec<f64>,
    pub circulating_supply_after: f64,
    pub deltas: Vec<LedgerDelta>,
}

/// Archetype flags that are reported rather than simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticMeta {
    pub trading_pairs: TradingPairs,
    pub parameter_adjustment: ParameterAdjustment,
}

/// State of one pool.
///
/// `reserves` follows the curve layout: pool holdings for LP-based pools,
/// `[q_1 .. q_n, collateral]` for LMSR markets and `[bonded reserve]` for
/// supply-sovereign pools (whose supply lives in `circulating_supply`).
#[derive(Debug, Clone, PartialEq)]
pub struct PoolState {
    name: String,
    archetype: Archetype,
    curve: CurveSpec,
    tokens: Vec<TokenId>,
    reserves: Vec<f64>,
    fee: FeeParams,
    lp_share_supply: f64,
    lp_shares: BTreeMap<AccountId, f64>,
    circulating_supply: f64,
    /// Largest supply reached; bounds the rounding drift between the
    /// supply and the holders' ledger balances.
    peak_supply: f64,
    oracle_price: Option<f64>,
    accumulated_fees: Vec<f64>,
    account: AccountId,
    status: MarketStatus,
    meta: StaticMeta,
}

enum Settlement {
    /// trader -> pool of the input, pool -> trader of the output.
    Swap,
    /// Collateral in, outcome shares minted.
    MintShares,
    /// Outcome shares in (fee portion kept by the pool, rest burned), collateral out.
    BurnShares { net: f64 },
    /// Reserve bonded in, issued token minted.
    Bond,
    /// Issued token burned, reserve paid out.
    Unbond,
}

fn amount(v: f64) -> Result<Amount, EngineError> {
    Ok(Amount::new(v)?)
}

/// Subtracts `b` from `a`, clamping sub-tolerance negative noise to zero.
fn sub_clamped(a: f64, b: f64) -> Result<f64, EngineError> {
    let d = a - b;
    if d >= 0.0 {
        Ok(d)
    } else if -d <= PROPORTION_TOL * a.abs().max(b.abs()) {
        Ok(0.0)
    } else {
        Err(AmountError::Underflow { lhs: a, rhs: b }.into())
    }
}

impl PoolState {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn archetype(&self) -> Archetype {
        self.archetype
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn reserves(&self) -> &[f64] {
        &self.reserves
    }

    pub fn fee(&self) -> FeeParams {
        self.fee
    }

    pub fn lp_share_supply(&self) -> f64 {
        self.lp_share_supply
    }

    pub fn lp_shares(&self, account: &AccountId) -> f64 {
        self.lp_shares.get(account).copied().unwrap_or(0.0)
    }

    pub fn lp_holders(&self) -> impl Iterator<Item = (&AccountId, f64)> {
        self.lp_shares.iter().map(|(a, s)| (a, *s))
    }

    pub fn circulating_supply(&self) -> f64 {
        self.circulating_supply
    }

    pub fn oracle_price(&self) -> Option<f64> {
        self.oracle_price
    }

    pub fn accumulated_fees(&self) -> &[f64] {
        &self.accumulated_fees
    }

    pub fn account(&self) -> &AccountId {
        &self.account
    }

    pub fn status(&self) -> MarketStatus {
        self.status
    }

    pub fn meta(&self) -> &StaticMeta {
        &self.meta
    }

    pub fn token_index(&self, token: &TokenId) -> Result<usize, EngineError> {
        self.tokens.iter().position(|t| t == token).ok_or_else(|| EngineError::UnknownToken(token.clone()))
    }

    /// Target reserves of a price-adopting pool.
    pub fn target_reserves(&self) -> Option<&[f64]> {
        match &self.curve {
            CurveSpec::PriceAdoption { target_reserves, .. } => Some(target_reserves),
            _ => None,
        }
    }

    /// State vector handed to the curve functions.
    pub fn curve_state(&self) -> Vec<f64> {
        match &self.curve {
            CurveSpec::Lmsr { .. } => self.reserves[..self.reserves.len() - 1].to_vec(),
            CurveSpec::Exponential { .. } => vec![self.reserves[0], self.circulating_supply],
            _ => self.reserves.clone(),
        }
    }

    /// Conservation value of the current state; `None` for price adoption
    /// and for states where it is undefined (for example an empty reserve).
    pub fn invariant_value(&self) -> Option<f64> {
        curves::invariant_value(&self.curve, &self.curve_state()).ok()
    }

    /// `(asset, numeraire)` indices used when a single price is reported:
    /// the issued token against the reserve for supply-sovereign pools,
    /// outcome 0 against collateral for LMSR, otherwise the first token
    /// against the last.
    pub fn price_pair(&self) -> (usize, usize) {
        match self.curve {
            CurveSpec::Exponential { .. } => (1, 0),
            _ => (0, self.reserves.len() - 1),
        }
    }

    pub fn spot_price(&self, token_in: usize, token_out: usize) -> Result<f64, EngineError> {
        let adopted = self.adopted_price()?;
        Ok(curves::spot_price(&self.curve, &self.curve_state(), token_in, token_out, adopted)?)
    }

    fn adopted_price(&self) -> Result<Option<f64>, EngineError> {
        match (&self.curve, self.oracle_price) {
            (CurveSpec::PriceAdoption { .. }, None) => Err(EngineError::MissingOraclePrice),
            (_, p) => Ok(p),
        }
    }

    fn is_lmsr(&self) -> bool {
        matches!(self.curve, CurveSpec::Lmsr { .. })
    }

    /// Builds a pool from a spec without touching any ledger. The creator is
    /// recorded as `creator` and the pool as `pool:<name>`.
    pub fn from_config(config: &PoolConfig) -> Result<PoolState, EngineError> {
        let deposit: Vec<Amount> = match config.archetype {
            Archetype::PriceDiscoveringSupplySovereign => Vec::new(),
            _ => config.reserves.iter().map(|r| amount(*r)).collect::<Result<_, _>>()?,
        };
        Self::open(config, &deposit, &AccountId::new("creator"))
    }

    fn open(config: &PoolConfig, deposit: &[Amount], creator: &AccountId) -> Result<PoolState, EngineError> {
        config.check_shape()?;
        let n = config.tokens.len();
        let fee = FeeParams::new(config.fee, config.surcharge_k())?;
        let mut pool = PoolState {
            name: config.name.clone(),
            archetype: config.archetype,
            curve: config.curve.clone(),
            tokens: config.tokens.clone(),
            reserves: Vec::new(),
            fee,
            lp_share_supply: 0.0,
            lp_shares: BTreeMap::new(),
            circulating_supply: 0.0,
            peak_supply: 0.0,
            oracle_price: None,
            accumulated_fees: vec![0.0; n],
            account: AccountId::new(format!("pool:{}", config.name)),
            status: MarketStatus::Open,
            meta: StaticMeta { trading_pairs: config.trading_pairs, parameter_adjustment: config.parameter_adjustment },
        };
        let values: Vec<f64> = deposit.iter().map(|a| a.value()).collect();
        match &config.curve {
            CurveSpec::Exponential { .. } => {
                if values.iter().any(|v| *v > 0.0) {
                    return Err(EngineError::Unsupported(
                        "supply-sovereign pools start with zero tokens minted; bond reserve with curve_buy".into(),
                    ));
                }
                pool.reserves = vec![0.0];
                return Ok(pool);
            }
            CurveSpec::Lmsr { b } => {
                if values.len() != n || values[..n - 1].iter().any(|q| *q != 0.0) {
                    return Err(EngineError::Unsupported("lmsr markets open with zero outstanding shares".into()));
                }
                let required = b * ((n - 1) as f64).ln();
                let collateral = values[n - 1];
                if collateral <= 0.0 || collateral < required {
                    return Err(EngineError::Undercollateralised { deposit: collateral, required });
                }
                pool.reserves = values;
                pool.lp_share_supply = collateral;
            }
            _ => {
                if values.len() != n || values.iter().any(|v| *v <= 0.0) {
                    return Err(EngineError::EmptyDeposit);
                }
                pool.lp_share_supply = geometric_mean(&values);
                pool.reserves = values;
            }
        }
        pool.lp_shares.insert(creator.clone(), pool.lp_share_supply);
        if let Some(p) = config.oracle {
            pool = pool.with_oracle_price(p)?;
        }
        Ok(pool)
    }

    /// Copy of the pool with a different trade fee.
    /// Pool ready to quote: like [`PoolState::from_config`], except that a
    /// supply-sovereign pool is bought into with its first configured
    /// reserve so it has a defined price.
    pub fn bootstrapped(config: &PoolConfig) -> Result<PoolState, EngineError> {
        let pool = PoolState::from_config(config)?;
        match config.reserves.first() {
            Some(&r) if pool.archetype == Archetype::PriceDiscoveringSupplySovereign && r > 0.0 => {
                Ok(pool.swap(0, 1, r, OrderKind::ExactIn)?.0)
            }
            _ => Ok(pool),
        }
    }

    pub fn with_trade_fee(&self, trade_fee: f64) -> Result<PoolState, EngineError> {
        let mut next = self.clone();
        next.fee = self.fee.with_trade_fee(trade_fee)?;
        Ok(next)
    }

    pub fn with_oracle_price(&self, price: f64) -> Result<PoolState, EngineError> {
        if self.archetype != Archetype::PriceAdoptingLpBased {
            return Err(EngineError::Unsupported(format!("{} pools do not adopt oracle prices", self.archetype)));
        }
        if !(price.is_finite() && price > 0.0) {
            return Err(EngineError::InvalidPrice(price));
        }
        let mut next = self.clone();
        next.oracle_price = Some(price);
        Ok(next)
    }

    /// Copy of the pool holding `factor` times the liquidity.
    ///
    /// LP-based pools keep their marginal prices: reserves, targets, LP
    /// shares and (for LMSR) both `b` and `q` are scaled together. A
    /// supply-sovereign pool scales its bonded reserve and moves along the
    /// curve to the matching supply.
    pub fn with_liquidity_scaled(&self, factor: f64) -> Result<PoolState, EngineError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(AmountError::Invalid(factor).into());
        }
        let mut next = self.clone();
        match &mut next.curve {
            CurveSpec::Exponential { kappa, c } => {
                next.reserves[0] *= factor;
                next.circulating_supply = (*c * next.reserves[0]).powf(1.0 / *kappa);
                next.peak_supply = (self.peak_supply * factor).max(next.circulating_supply);
                return Ok(next);
            }
            CurveSpec::Lmsr { b } => *b *= factor,
            CurveSpec::PriceAdoption { target_reserves, .. } => {
                for t in target_reserves.iter_mut() {
                    *t *= factor;
                }
            }
            _ => {}
        }
        for r in next.reserves.iter_mut() {
            *r *= factor;
        }
        next.lp_share_supply *= factor;
        for s in next.lp_shares.values_mut() {
            *s *= factor;
        }
        Ok(next)
    }

    /// Pure swap: returns the pool after the trade and its quote.
    pub fn swap(&self, token_in: usize, token_out: usize, amount: f64, kind: OrderKind) -> Result<(PoolState, Quote), EngineError> {
        self.swap_inner(token_in, token_out, amount, kind).map(|(p, q, _)| (p, q))
    }

    fn swap_inner(
        &self,
        token_in: usize,
        token_out: usize,
        amount: f64,
        kind: OrderKind,
    ) -> Result<(PoolState, Quote, Settlement), EngineError> {
        if self.status != MarketStatus::Open {
            return Err(EngineError::MarketClosed);
        }
        Amount::new(amount)?;
        let adopted = self.adopted_price()?;
        let state = self.curve_state();
        let spot_before = curves::spot_price(&self.curve, &state, token_in, token_out, adopted).unwrap_or(f64::NAN);
        let fee = self.fee.trade_fee();
        let unbond = matches!(self.curve, CurveSpec::Exponential { .. }) && token_in == 1;

        // (gross input, output to trader, fee, curve-level input, curve-level output)
        let (amount_in, amount_out, fee_paid, curve_in, curve_out) = if unbond {
            match kind {
                OrderKind::ExactIn => {
                    let supply = self.circulating_supply;
                    let burn = if amount > supply && amount - supply <= PROPORTION_TOL * self.peak_supply {
                        supply
                    } else {
                        amount
                    };
                    curves::quote_exact_in(&self.curve, &state, 1, 0, burn, None)?;
                    // Pay out down to the on-curve reserve of the remaining supply so
                    // rounding drift in the held reserve never accumulates.
                    let gross = match self.curve {
                        CurveSpec::Exponential { kappa, c } if burn < supply => {
                            (self.reserves[0] - (supply - burn).powf(kappa) / c).max(0.0)
                        }
                        _ => self.reserves[0],
                    };
                    let fee_paid = gross * fee;
                    (amount, gross - fee_paid, fee_paid, burn, gross)
                }
                OrderKind::ExactOut => {
                    let gross = amount / (1.0 - fee);
                    let burn = curves::quote_exact_out(&self.curve, &state, 1, 0, gross, None)?;
                    (burn, amount, gross - amount, burn, gross)
                }
            }
        } else {
            match kind {
                OrderKind::ExactIn => {
                    let fee_paid = amount * fee;
                    let net = amount - fee_paid;
                    let out = curves::quote_exact_in(&self.curve, &state, token_in, token_out, net, adopted)?;
                    (amount, out, fee_paid, net, out)
                }
                OrderKind::ExactOut => {
                    let net = curves::quote_exact_out(&self.curve, &state, token_in, token_out, amount, adopted)?;
                    let gross = net / (1.0 - fee);
                    (gross, amount, gross - net, net, amount)
                }
            }
        };

        let mut next = self.clone();
        let settlement = match &self.curve {
            CurveSpec::Lmsr { .. } => {
                let c = self.reserves.len() - 1;
                if token_in == c {
                    next.reserves[c] += amount_in;
                    next.reserves[token_out] += curve_out;
                    Settlement::MintShares
                } else {
                    next.reserves[token_in] = sub_clamped(next.reserves[token_in], curve_in)?;
                    next.reserves[c] = sub_clamped(next.reserves[c], amount_out)?;
                    Settlement::BurnShares { net: curve_in }
                }
            }
            CurveSpec::Exponential { .. } => {
                if unbond {
                    next.circulating_supply = sub_clamped(self.circulating_supply, curve_in)?;
                    next.reserves[0] = if next.circulating_supply == 0.0 { 0.0 } else { sub_clamped(self.reserves[0], curve_out)? };
                    next.accumulated_fees[0] += fee_paid;
                    Settlement::Unbond
                } else {
                    next.reserves[0] += curve_in;
                    next.circulating_supply += curve_out;
                    next.peak_supply = next.peak_supply.max(next.circulating_supply);
                    next.accumulated_fees[0] += fee_paid;
                    Settlement::Bond
                }
            }
            _ => {
                next.reserves[token_in] += amount_in;
                next.reserves[token_out] = sub_clamped(self.reserves[token_out], amount_out)?;
                Settlement::Swap
            }
        };
        if !matches!(self.curve, CurveSpec::Exponential { .. }) {
            next.accumulated_fees[token_in] += fee_paid;
        }

        let surcharge_component = match &self.curve {
            CurveSpec::PriceAdoption { target_reserves, .. } => {
                let flat = CurveSpec::PriceAdoption { k: 0.0, target_reserves: target_reserves.clone() };
                let unsurcharged = curves::quote_exact_in(&flat, &state, token_in, token_out, curve_in, adopted)
                    .unwrap_or(f64::INFINITY);
                (unsurcharged.min(state[token_out]) - curve_out).max(0.0)
            }
            _ => 0.0,
        };
        let spot_after =
            curves::spot_price(&next.curve, &next.curve_state(), token_in, token_out, adopted).unwrap_or(f64::NAN);
        let mean_price = if amount_in > 0.0 { amount_out / amount_in } else { spot_before };
        let fee_token = if unbond { 0 } else { token_in };
        let quote = Quote {
            amount_in,
            amount_out,
            fee_paid,
            fee_token,
            surcharge_component,
            spot_before,
            spot_after,
            mean_price,
        };
        Ok((next, quote, settlement))
    }

    /// Pure proportional deposit; returns the new pool and minted shares.
    pub fn deposit(&self, provider: &AccountId, amounts: &[f64]) -> Result<(PoolState, f64), EngineError> {
        if !self.archetype.is_lp_based() {
            return Err(EngineError::Unsupported("supply-sovereign pools take no liquidity deposits".into()));
        }
        if self.is_lmsr() {
            return Err(EngineError::Unsupported("lmsr markets take liquidity only at creation".into()));
        }
        if amounts.len() != self.reserves.len() {
            return Err(EngineError::Unsupported(format!(
                "deposit needs {} amounts, got {}",
                self.reserves.len(),
                amounts.len()
            )));
        }
        for a in amounts {
            Amount::new(*a)?;
        }
        if amounts.iter().all(|a| *a == 0.0) {
            return Ok((self.clone(), 0.0));
        }
        let mut next = self.clone();
        let minted = if self.lp_share_supply == 0.0 {
            if amounts.iter().any(|a| *a <= 0.0) {
                return Err(EngineError::EmptyDeposit);
            }
            geometric_mean(amounts)
        } else {
            let ratio = amounts[0] / self.reserves[0];
            let proportional = amounts
                .iter()
                .zip(&self.reserves)
                .all(|(a, r)| (a / r - ratio).abs() <= PROPORTION_TOL * ratio.max(f64::MIN_POSITIVE));
            if !proportional {
                return Err(EngineError::NotProportional);
            }
            if let CurveSpec::PriceAdoption { target_reserves, .. } = &mut next.curve {
                for t in target_reserves.iter_mut() {
                    *t *= 1.0 + ratio;
                }
            }
            self.lp_share_supply * ratio
        };
        for (r, a) in next.reserves.iter_mut().zip(amounts) {
            *r += a;
        }
        next.lp_share_supply += minted;
        *next.lp_shares.entry(provider.clone()).or_insert(0.0) += minted;
        Ok((next, minted))
    }

    /// Pure pro-rata withdrawal; returns the new pool and amounts paid out
    /// (indexed like `tokens`).
    pub fn withdraw(&self, provider: &AccountId, shares: f64) -> Result<(PoolState, Vec<f64>), EngineError> {
        if !self.archetype.is_lp_based() {
            return Err(EngineError::Unsupported("supply-sovereign pools have no LP shares".into()));
        }
        Amount::new(shares)?;
        let held = self.lp_shares(provider);
        if shares > held {
            return Err(EngineError::InsufficientShares { account: provider.clone(), requested: shares, available: held });
        }
        let n = self.tokens.len();
        if shares == 0.0 {
            return Ok((self.clone(), vec![0.0; n]));
        }
        if self.is_lmsr() && self.status == MarketStatus::Open {
            return Err(EngineError::MarketOpen);
        }
        let fraction = shares / self.lp_share_supply;
        let full = shares == self.lp_share_supply;
        let mut next = self.clone();
        let paid_from: Vec<usize> = if self.is_lmsr() { vec![n - 1] } else { (0..n).collect() };
        let mut out = vec![0.0; n];
        for i in paid_from {
            out[i] = if full { self.reserves[i] } else { self.reserves[i] * fraction };
            next.reserves[i] = if full { 0.0 } else { sub_clamped(self.reserves[i], out[i])? };
        }
        for f in next.accumulated_fees.iter_mut() {
            *f *= 1.0 - fraction;
        }
        if !full {
            if let CurveSpec::PriceAdoption { target_reserves, .. } = &mut next.curve {
                for t in target_reserves.iter_mut() {
                    *t *= 1.0 - fraction;
                }
            }
        }
        next.lp_share_supply = if full { 0.0 } else { sub_clamped(self.lp_share_supply, shares)? };
        let left = held - shares;
        if left == 0.0 {
            next.lp_shares.remove(provider);
        } else {
            next.lp_shares.insert(provider.clone(), left);
        }
        Ok((next, out))
    }
}

fn geometric_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
}

/// Opens a pool funded by `creator`'s `initial_deposit`.
pub fn create_pool(
    config: &PoolConfig,
    initial_deposit: &[Amount],
    creator: &AccountId,
    ledgers: &Ledgers,
) -> Result<(PoolState, Ledgers), EngineError> {
    let pool = PoolState::open(config, initial_deposit, creator)?;
    let mut books = ledgers.clone();
    for (token, a) in pool.tokens.iter().zip(initial_deposit) {
        books.transfer(token, creator, &pool.account, *a)?;
    }
    Ok((pool, books))
}

/// Prices `order` against `pool` without changing anything.
pub fn quote(pool: &PoolState, order: &TradeOrder) -> Result<Quote, EngineError> {
    let (i, o) = (pool.token_index(&order.token_in)?, pool.token_index(&order.token_out)?);
    pool.swap(i, o, order.amount.value(), order.kind).map(|(_, q)| q)
}

struct Books<'a> {
    books: Ledgers,
    deltas: Vec<LedgerDelta>,
    pool: &'a AccountId,
}

impl<'a> Books<'a> {
    fn new(ledgers: &Ledgers, pool: &'a AccountId) -> Self {
        Books { books: ledgers.clone(), deltas: Vec::new(), pool }
    }

    fn record(&mut self, token: &TokenId, account: &AccountId, delta: f64) {
        if delta != 0.0 {
            self.deltas.push(LedgerDelta { token: token.clone(), account: account.clone(), delta });
        }
    }

    fn transfer(&mut self, token: &TokenId, from: &AccountId, to: &AccountId, v: f64) -> Result<(), EngineError> {
        let v = self.clamp_to_pool(token, from, v);
        self.books.transfer(token, from, to, amount(v)?)?;
        if from != to {
            self.record(token, from, -v);
            self.record(token, to, v);
        }
        Ok(())
    }

    fn mint(&mut self, token: &TokenId, to: &AccountId, v: f64) -> Result<(), EngineError> {
        self.books.mint(token, to, amount(v)?);
        self.record(token, to, v);
        Ok(())
    }

    fn burn(&mut self, token: &TokenId, from: &AccountId, v: f64) -> Result<(), EngineError> {
        self.books.burn(token, from, amount(v)?)?;
        self.record(token, from, -v);
        Ok(())
    }

    /// Pool payouts computed from reserves may exceed the pool's ledger
    /// balance by rounding noise; such payouts are trimmed to the balance.
    fn clamp_to_pool(&self, token: &TokenId, from: &AccountId, v: f64) -> f64 {
        if from != self.pool {
            return v;
        }
        let have = self.books.balance(token, from).value();
        if v > have && v - have <= PROPORTION_TOL * v {
            have
        } else {
            v
        }
    }
}

fn settle(
    pool: &PoolState,
    trader: &AccountId,
    token_in: usize,
    token_out: usize,
    quote: &Quote,
    settlement: &Settlement,
    ledgers: &Ledgers,
) -> Result<(Ledgers, Vec<LedgerDelta>), EngineError> {
    let mut b = Books::new(ledgers, &pool.account);
    let (tin, tout) = (&pool.tokens[token_in], &pool.tokens[token_out]);
    match settlement {
        Settlement::Swap => {
            b.transfer(tin, trader, &pool.account, quote.amount_in)?;
            b.transfer(tout, &pool.account, trader, quote.amount_out)?;
        }
        Settlement::MintShares | Settlement::Bond => {
            b.transfer(tin, trader, &pool.account, quote.amount_in)?;
            b.mint(tout, trader, quote.amount_out)?;
        }
        Settlement::BurnShares { net } => {
            b.transfer(tin, trader, &pool.account, quote.amount_in - net)?;
            b.burn(tin, trader, *net)?;
            b.transfer(tout, &pool.account, trader, quote.amount_out)?;
        }
        Settlement::Unbond => {
            b.burn(tin, trader, quote.amount_in)?;
            b.transfer(tout, &pool.account, trader, quote.amount_out)?;
        }
    }
    Ok((b.books, b.deltas))
}

/// Executes `order`, settling both legs against `ledgers`.
pub fn execute_swap(
    pool: &PoolState,
    order: &TradeOrder,
    ledgers: &Ledgers,
) -> Result<(PoolState, TradeReceipt, Ledgers), EngineError> {
    let (i, o) = (pool.token_index(&order.token_in)?, pool.token_index(&order.token_out)?);
    let (next, quote, settlement) = pool.swap_inner(i, o, order.amount.value(), order.kind)?;
    let (books, deltas) = settle(pool, &order.trader, i, o, &quote, &settlement, ledgers)?;
    let receipt = TradeReceipt {
        reserves_after: next.reserves.clone(),
        circulating_supply_after: next.circulating_supply,
        quote,
        deltas,
    };
    Ok((next, receipt, books))
}

/// Proportional deposit by `provider`; returns minted LP shares.
pub fn deposit_liquidity(
    pool: &PoolState,
    provider: &AccountId,
    amounts: &[Amount],
    ledgers: &Ledgers,
) -> Result<(PoolState, f64, Ledgers), EngineError> {
    if pool.status != MarketStatus::Open {
        return Err(EngineError::MarketClosed);
    }
    let values: Vec<f64> = amounts.iter().map(|a| a.value()).collect();
    let (next, minted) = pool.deposit(provider, &values)?;
    let mut b = Books::new(ledgers, &pool.account);
    for (token, v) in pool.tokens.iter().zip(&values) {
        b.transfer(token, provider, &pool.account, *v)?;
    }
    Ok((next, minted, b.books))
}

/// Burns `shares` of `provider`'s LP position for a pro-rata payout.
pub fn withdraw_liquidity(
    pool: &PoolState,
    provider: &AccountId,
    shares: Amount,
    ledgers: &Ledgers,
) -> Result<(PoolState, Vec<f64>, Ledgers), EngineError> {
    let (next, out) = pool.withdraw(provider, shares.value())?;
    let mut b = Books::new(ledgers, &pool.account);
    for (token, v) in pool.tokens.iter().zip(&out) {
        b.transfer(token, &pool.account, provider, *v)?;
    }
    Ok((next, out, b.books))
}

fn require_supply_sovereign(pool: &PoolState) -> Result<(), EngineError> {
    if pool.archetype == Archetype::PriceDiscoveringSupplySovereign {
        Ok(())
    } else {
        Err(EngineError::Unsupported(format!("{} pools do not mint against a bonding curve", pool.archetype)))
    }
}

/// Bonds `reserve_in` and mints issued tokens to `buyer`.
pub fn curve_buy(
    pool: &PoolState,
    buyer: &AccountId,
    reserve_in: Amount,
    ledgers: &Ledgers,
) -> Result<(PoolState, f64, Ledgers), EngineError> {
    require_supply_sovereign(pool)?;
    let order = TradeOrder {
        trader: buyer.clone(),
        token_in: pool.tokens[0].clone(),
        token_out: pool.tokens[1].clone(),
        amount: reserve_in,
        kind: OrderKind::ExactIn,
    };
    let (next, receipt, books) = execute_swap(pool, &order, ledgers)?;
    Ok((next, receipt.quote.amount_out, books))
}

/// Burns `tokens_in` issued tokens from `seller` and pays out reserve.
pub fn curve_sell(
    pool: &PoolState,
    seller: &AccountId,
    tokens_in: Amount,
    ledgers: &Ledgers,
) -> Result<(PoolState, f64, Ledgers), EngineError> {
    require_supply_sovereign(pool)?;
    if tokens_in.value() > pool.circulating_supply + PROPORTION_TOL * pool.peak_supply {
        return Err(CurveError::Depleted { token: 1, requested: tokens_in.value(), available: pool.circulating_supply }.into());
    }
    let order = TradeOrder {
        trader: seller.clone(),
        token_in: pool.tokens[1].clone(),
        token_out: pool.tokens[0].clone(),
        amount: tokens_in,
        kind: OrderKind::ExactIn,
    };
    let (next, receipt, books) = execute_swap(pool, &order, ledgers)?;
    Ok((next, receipt.quote.amount_out, books))
}

pub fn set_oracle_price(pool: &PoolState, price: f64) -> Result<PoolState, EngineError> {
    pool.with_oracle_price(price)
}

/// Settles an LMSR market: each winning share redeems one unit of
/// collateral, losing shares expire worthless.
pub fn resolve_prediction(
    pool: &PoolState,
    winning_outcome: usize,
    ledgers: &Ledgers,
) -> Result<(PoolState, Ledgers), EngineError> {
    if !pool.is_lmsr() {
        return Err(EngineError::Unsupported("only lmsr markets resolve".into()));
    }
    if pool.status != MarketStatus::Open {
        return Err(EngineError::AlreadyResolved);
    }
    let n = pool.reserves.len() - 1;
    if winning_outcome >= n {
        return Err(EngineError::UnknownOutcome(winning_outcome));
    }
    let collateral = &pool.tokens[n];
    let mut next = pool.clone();
    let mut b = Books::new(ledgers, &pool.account);
    for (j, token) in pool.tokens[..n].iter().enumerate() {
        let holders: Vec<(AccountId, f64)> = match ledgers.get(token) {
            Some(l) => l.accounts().map(|(a, v)| (a.clone(), v.value())).collect(),
            None => Vec::new(),
        };
        for (account, shares) in holders {
            if shares == 0.0 {
                continue;
            }
            b.burn(token, &account, shares)?;
            if j == winning_outcome && account != pool.account {
                b.transfer(collateral, &pool.account, &account, shares)?;
                next.reserves[n] = sub_clamped(next.reserves[n], shares)?;
            }
        }
        next.reserves[j] = 0.0;
    }
    next.status = MarketStatus::Resolved { winner: winning_outcome };
    Ok((next, b.books))
}
