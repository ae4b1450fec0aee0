//! Empirical taxonomy probe.
//!
//! Each behavioural dimension is measured on cloned pool states driven by a
//! seeded RNG. Static dimensions are read from the pool spec.

pub mod taxonomy_table;

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::{lmsr_trade_cost, CurveSpec};
use crate::engine::{Archetype, EngineError, OrderKind, PoolConfig, PoolState};

/// Relative deviation below which a property counts as holding.
pub const INVARIANT_TOL: f64 = 1e-6;
/// Relative deviation above which a property counts as violated.
pub const VARIANT_TOL: f64 = 1e-3;
pub const DEFAULT_TRIALS: usize = 200;
pub const MIN_TRIALS: usize = 100;
pub const INDETERMINATE: &str = "Indeterminate";

const SIZE_RANGE: (f64, f64) = (1e-4, 1e-1);
const BOUND_DECADES: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    InformationIncorporation,
    LiquidityConcentration,
    LiquiditySensitivity,
    PathDeficiency,
    PathIndependence,
    PriceBounding,
    PriceDiscovery,
    TokenPriceSource,
    TranslationInvariance,
    VolumeDependency,
    NumberOfTokens,
    RiskManagement,
    SourceOfLiquidity,
    SupportedTradingPairs,
    Interoperability,
    LimitOrderFunctionality,
    ParameterAdjustment,
}

impl Dimension {
    /// Every dimension in report order.
    pub const ALL: [Dimension; 17] = [
        Dimension::InformationIncorporation,
        Dimension::LiquidityConcentration,
        Dimension::LiquiditySensitivity,
        Dimension::PathDeficiency,
        Dimension::PathIndependence,
        Dimension::PriceBounding,
        Dimension::PriceDiscovery,
        Dimension::TokenPriceSource,
        Dimension::TranslationInvariance,
        Dimension::VolumeDependency,
        Dimension::NumberOfTokens,
        Dimension::RiskManagement,
        Dimension::SourceOfLiquidity,
        Dimension::SupportedTradingPairs,
        Dimension::Interoperability,
        Dimension::LimitOrderFunctionality,
        Dimension::ParameterAdjustment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::InformationIncorporation => "Information Incorporation",
            Dimension::LiquidityConcentration => "Liquidity Concentration",
            Dimension::LiquiditySensitivity => "Liquidity Sensitivity",
            Dimension::PathDeficiency => "Path Deficiency",
            Dimension::PathIndependence => "Path Independence",
            Dimension::PriceBounding => "Price Bounding",
            Dimension::PriceDiscovery => "Price Discovery",
            Dimension::TokenPriceSource => "Token Price Source",
            Dimension::TranslationInvariance => "Translation Invariance",
            Dimension::VolumeDependency => "Volume Dependency",
            Dimension::NumberOfTokens => "Number of Tokens per Liquidity Pool",
            Dimension::RiskManagement => "Risk Management",
            Dimension::SourceOfLiquidity => "Source of Liquidity",
            Dimension::SupportedTradingPairs => "Supported Trading Pairs",
            Dimension::Interoperability => "Interoperability",
            Dimension::LimitOrderFunctionality => "Limit Order Functionality",
            Dimension::ParameterAdjustment => "Parameter Adjustment",
        }
    }

    /// Dimensions measured by trading against the pool.
    pub fn is_probeable(self) -> bool {
        matches!(
            self,
            Dimension::InformationIncorporation
                | Dimension::LiquiditySensitivity
                | Dimension::PathDeficiency
                | Dimension::PathIndependence
                | Dimension::PriceBounding
                | Dimension::TranslationInvariance
                | Dimension::VolumeDependency
        )
    }

    /// Labels a verdict may carry; `Indeterminate` is added for probed
    /// dimensions and `Unbounded` for price bounding.
    pub fn legal_values(self) -> Vec<&'static str> {
        let mut v = taxonomy_table::characteristics(self);
        if self == Dimension::PriceBounding {
            v.push(UNBOUNDED);
        }
        if self.is_probeable() {
            v.push(INDETERMINATE);
        }
        v
    }

    fn index(self) -> u64 {
        Dimension::ALL.iter().position(|d| *d == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Dimension {
    type Err = ProbeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProbeError::UnknownDimension(s.to_string()))
    }
}

/// Price bounding verdict when neither side is bounded; the table leaves
/// such cells blank.
pub const UNBOUNDED: &str = "Unbounded";

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("dimension `{0}` is read from the pool spec and cannot be probed")]
    Unprobeable(Dimension),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("at least {MIN_TRIALS} trials are required, got {0}")]
    TooFewTrials(usize),
    #[error("pool construction failed: {0}")]
    Pool(#[from] EngineError),
    #[error("probe could not complete: {0}")]
    Stalled(String),
}

/// Numeric support for a probed verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub max_deviation: f64,
    pub trials: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionVerdict {
    pub dimension: Dimension,
    pub characteristic: &'static str,
    /// `None` for dimensions copied from the pool spec.
    pub evidence: Option<Evidence>,
}

impl DimensionVerdict {
    /// Characteristic as a table cell; `None` where the table leaves it blank.
    pub fn cell(&self) -> Option<&'static str> {
        (self.characteristic != UNBOUNDED).then_some(self.characteristic)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaxonomyReport {
    pub pool: String,
    pub seed: u64,
    pub verdicts: Vec<DimensionVerdict>,
}

impl TaxonomyReport {
    pub fn get(&self, dimension: Dimension) -> Option<&DimensionVerdict> {
        self.verdicts.iter().find(|v| v.dimension == dimension)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dimension,characteristic,max_deviation,trials,tolerance\n");
        for v in &self.verdicts {
            match v.evidence {
                Some(e) => out.push_str(&format!(
                    "{},{},{:e},{},{:e}\n",
                    v.dimension, v.characteristic, e.max_deviation, e.trials, e.tolerance
                )),
                None => out.push_str(&format!("{},{},,,\n", v.dimension, v.characteristic)),
            }
        }
        out
    }
}

/// Runs every dimension with [`DEFAULT_TRIALS`].
pub fn classify(config: &PoolConfig, seed: u64) -> Result<TaxonomyReport, ProbeError> {
    classify_with_trials(config, seed, DEFAULT_TRIALS)
}

pub fn classify_with_trials(config: &PoolConfig, seed: u64, trials: usize) -> Result<TaxonomyReport, ProbeError> {
    let verdicts = Dimension::ALL
        .into_iter()
        .map(|d| {
            if d.is_probeable() {
                run_dimension_probe(config, d, seed, trials)
            } else {
                Ok(static_verdict(config, d))
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(TaxonomyReport { pool: config.name.clone(), seed, verdicts })
}

/// Dimension read from the pool spec rather than measured.
pub fn static_verdict(config: &PoolConfig, dimension: Dimension) -> DimensionVerdict {
    let adopting = matches!(config.curve, CurveSpec::PriceAdoption { .. });
    let characteristic = match dimension {
        Dimension::LiquidityConcentration => {
            if adopting {
                "Automatic"
            } else {
                "Function-based"
            }
        }
        Dimension::PriceDiscovery => match config.curve {
            CurveSpec::ConstantProduct => "Constant-product",
            CurveSpec::GeometricMean { .. } => "Geometric Mean",
            CurveSpec::ConstantSum => "Constant-sum",
            CurveSpec::ConstantProductSum { .. } => "Constant-product-sum",
            CurveSpec::ConstantPowerSum { .. } => "Constant-power-sum",
            CurveSpec::Lmsr { .. } => "Logarithmic Market Scoring",
            CurveSpec::PriceAdoption { .. } => "Price Adoption",
            CurveSpec::Exponential { .. } => "Exponential Function",
        },
        Dimension::TokenPriceSource => {
            if adopting {
                "External"
            } else {
                "Internal"
            }
        }
        Dimension::NumberOfTokens => {
            let n = match config.curve {
                CurveSpec::Lmsr { .. } => config.tokens.len().saturating_sub(1),
                _ => config.tokens.len(),
            };
            if n <= 2 {
                "Two"
            } else {
                "Three or More"
            }
        }
        Dimension::RiskManagement => {
            if config.surcharge_k() > 0.0 {
                "Imbalance Surcharges"
            } else {
                "No Risk Management"
            }
        }
        Dimension::SourceOfLiquidity => match config.archetype {
            Archetype::PriceDiscoveringSupplySovereign => "Internal",
            _ => "External",
        },
        Dimension::SupportedTradingPairs => match config.trading_pairs {
            crate::engine::TradingPairs::Open => "Open",
            crate::engine::TradingPairs::Restricted => "Restricted",
        },
        Dimension::Interoperability => "Non-interoperable",
        Dimension::LimitOrderFunctionality => "Not Included",
        Dimension::ParameterAdjustment => match config.parameter_adjustment {
            crate::engine::ParameterAdjustment::Automatic => "Automatic",
            crate::engine::ParameterAdjustment::Fixed => "Fixed",
            crate::engine::ParameterAdjustment::Manual => "Manual",
        },
        _ => INDETERMINATE,
    };
    DimensionVerdict { dimension, characteristic, evidence: None }
}

/// Measures one behavioural dimension. Deterministic in `(config, seed, trials)`.
pub fn run_dimension_probe(
    config: &PoolConfig,
    dimension: Dimension,
    seed: u64,
    trials: usize,
) -> Result<DimensionVerdict, ProbeError> {
    if !dimension.is_probeable() {
        return Err(ProbeError::Unprobeable(dimension));
    }
    if trials < MIN_TRIALS {
        return Err(ProbeError::TooFewTrials(trials));
    }
    let subject = Subject::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ dimension.index().wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut probe = Probe { subject: &subject, rng: &mut rng, trials };
    match dimension {
        Dimension::InformationIncorporation => probe.information_incorporation(),
        Dimension::LiquiditySensitivity => probe.liquidity_sensitivity(),
        Dimension::PathDeficiency => probe.path_deficiency(),
        Dimension::PathIndependence => probe.path_independence(),
        Dimension::PriceBounding => probe.price_bounding(),
        Dimension::TranslationInvariance => probe.translation_invariance(),
        Dimension::VolumeDependency => probe.volume_dependency(),
        _ => unreachable!("static dimensions rejected above"),
    }
}

/// Three-way verdict on a relative deviation.
fn threshold(dimension: Dimension, dev: f64, holds: &'static str, fails: &'static str, trials: usize) -> DimensionVerdict {
    let (characteristic, tolerance) = if dev < INVARIANT_TOL {
        (holds, INVARIANT_TOL)
    } else if dev > VARIANT_TOL {
        (fails, VARIANT_TOL)
    } else {
        (INDETERMINATE, INVARIANT_TOL)
    };
    DimensionVerdict { dimension, characteristic, evidence: Some(Evidence { max_deviation: dev, trials, tolerance }) }
}

/// Base pool plus the token pair the probe trades.
struct Subject {
    pool: PoolState,
    asset: usize,
    numeraire: usize,
    scale: f64,
}

impl Subject {
    fn new(config: &PoolConfig) -> Result<Subject, EngineError> {
        let mut pool = PoolState::bootstrapped(config)?;
        let (asset, numeraire) = pool.price_pair();
        let scale = match *pool.curve() {
            CurveSpec::Exponential { .. } => {
                if pool.circulating_supply() == 0.0 {
                    pool = pool.swap(numeraire, asset, 1000.0, OrderKind::ExactIn)?.0;
                }
                pool.circulating_supply()
            }
            CurveSpec::Lmsr { b } => {
                for j in 0..numeraire {
                    pool = pool.swap(numeraire, j, b, OrderKind::ExactOut)?.0;
                }
                b
            }
            _ => pool.reserves()[asset],
        };
        Ok(Subject { pool, asset, numeraire, scale })
    }

    fn is_lmsr(&self) -> bool {
        matches!(self.pool.curve(), CurveSpec::Lmsr { .. })
    }

    fn is_supply_sovereign(&self) -> bool {
        matches!(self.pool.curve(), CurveSpec::Exponential { .. })
    }

    /// Price of the asset in numeraire units.
    fn price(&self, pool: &PoolState) -> Result<f64, EngineError> {
        pool.spot_price(self.asset, self.numeraire)
    }

    /// Positive `q` sells `q` of the asset; negative `q` buys `|q|` of it.
    fn trade(&self, pool: &PoolState, q: f64) -> Result<PoolState, EngineError> {
        if q >= 0.0 {
            Ok(pool.swap(self.asset, self.numeraire, q, OrderKind::ExactIn)?.0)
        } else {
            Ok(pool.swap(self.numeraire, self.asset, -q, OrderKind::ExactOut)?.0)
        }
    }

    /// Numeraire paid for `q` of the asset.
    fn buy_cost(&self, pool: &PoolState, q: f64) -> Result<(PoolState, f64), EngineError> {
        let (next, quote) = pool.swap(self.numeraire, self.asset, q, OrderKind::ExactOut)?;
        Ok((next, quote.amount_in))
    }

    /// Values describing the terminal state compared by the path probe.
    fn state_vector(&self, pool: &PoolState) -> Vec<f64> {
        let mut v = pool.reserves().to_vec();
        v.push(pool.circulating_supply());
        v
    }
}

struct Probe<'a> {
    subject: &'a Subject,
    rng: &'a mut ChaCha8Rng,
    trials: usize,
}

impl Probe<'_> {
    fn size(&mut self) -> f64 {
        let (lo, hi) = SIZE_RANGE;
        self.subject.scale * self.rng.gen_range(lo.ln()..hi.ln()).exp()
    }

    fn signed_size(&mut self) -> f64 {
        let s = self.size();
        if self.rng.gen_bool(0.5) {
            s
        } else {
            -s
        }
    }

    /// Base pool moved by one to four random trades. Trades the pool cannot
    /// fill are skipped.
    fn random_state_from(&mut self, base: &PoolState) -> PoolState {
        let mut pool = base.clone();
        for _ in 0..self.rng.gen_range(1..=4) {
            let q = self.signed_size();
            if let Ok(next) = self.subject.trade(&pool, q) {
                pool = next;
            }
        }
        pool
    }

    fn random_state(&mut self) -> PoolState {
        let base = self.subject.pool.clone();
        self.random_state_from(&base)
    }

    /// Largest relative spot move caused by buying the asset.
    fn information_incorporation(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let mut max_dev = 0.0f64;
        for _ in 0..self.trials {
            let pool = self.random_state();
            let s = self.size();
            let p0 = self.subject.price(&pool)?;
            let (after, _) = self.subject.buy_cost(&pool, s)?;
            let p1 = self.subject.price(&after)?;
            max_dev = max_dev.max((p1 - p0).abs() / p0);
        }
        Ok(threshold(Dimension::InformationIncorporation, max_dev, "Non-incorporative", "Incorporative", self.trials))
    }

    /// Price impact of a fixed buy, at the drawn state and at ten times its liquidity.
    fn liquidity_sensitivity(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let mut max_dev = 0.0f64;
        for _ in 0..self.trials {
            let pool = self.random_state();
            let deep = pool.with_liquidity_scaled(10.0)?;
            let s = self.size();
            let i1 = self.impact(&pool, s)?;
            let i10 = self.impact(&deep, s)?;
            let denom = i1.max(i10);
            if denom > 0.0 {
                max_dev = max_dev.max((i1 - i10).abs() / denom);
            }
        }
        Ok(threshold(Dimension::LiquiditySensitivity, max_dev, "Insensitive", "Sensitive", self.trials))
    }

    fn impact(&self, pool: &PoolState, s: f64) -> Result<f64, EngineError> {
        let p0 = self.subject.price(pool)?;
        let (after, _) = self.subject.buy_cost(pool, s)?;
        Ok((self.subject.price(&after)? - p0).abs() / p0)
    }

    /// Round trips at the configured fee: buy the asset, sell it straight back.
    /// The verdict is read from the numeraire lost per unit spent; any
    /// observed drop of the conservation value marks the pool not deficient.
    fn path_deficiency(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let mut min_gap = f64::INFINITY;
        let mut max_abs_gap = 0.0f64;
        let mut invariant_dropped = false;
        let conservation = self.subject.pool.curve().has_conservation_function() && !self.subject.is_supply_sovereign();
        for _ in 0..self.trials {
            let pool = self.random_state();
            let s = self.size();
            let (mid, paid) = self.subject.buy_cost(&pool, s)?;
            let (end, back) = mid.swap(self.subject.asset, self.subject.numeraire, s, OrderKind::ExactIn)?;
            let gap = (paid - back.amount_out) / paid;
            min_gap = min_gap.min(gap);
            max_abs_gap = max_abs_gap.max(gap.abs());
            if conservation {
                let values = [&pool, &mid, &end].map(|p| p.invariant_value());
                if let [Some(a), Some(b), Some(c)] = values {
                    if b < a * (1.0 - 1e-12) || c < b * (1.0 - 1e-12) {
                        invariant_dropped = true;
                    }
                }
            }
        }
        let (characteristic, max_deviation, tolerance) = if invariant_dropped || min_gap < -INVARIANT_TOL {
            ("Not Deficient", max_abs_gap, INVARIANT_TOL)
        } else if min_gap > INVARIANT_TOL {
            ("Strictly Deficient", min_gap, INVARIANT_TOL)
        } else if max_abs_gap <= INVARIANT_TOL {
            ("Deficient", max_abs_gap, INVARIANT_TOL)
        } else {
            (INDETERMINATE, max_abs_gap, INVARIANT_TOL)
        };
        Ok(DimensionVerdict {
            dimension: Dimension::PathDeficiency,
            characteristic,
            evidence: Some(Evidence { max_deviation, trials: self.trials, tolerance }),
        })
    }

    /// Applies a random multiset of trades in two orders on a fee-free copy
    /// and compares the terminal states, each entry relative to the volume
    /// that moved through it.
    fn path_independence(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let base = self.subject.pool.with_trade_fee(0.0)?;
        let mut max_dev = 0.0f64;
        let mut completed = 0usize;
        let mut attempts = 0usize;
        while completed < self.trials {
            attempts += 1;
            if attempts > self.trials * 20 {
                return Err(ProbeError::Stalled(format!("path independence completed {completed} of {} trials", self.trials)));
            }
            let start = self.random_state_from(&base);
            let n = self.rng.gen_range(4..=8);
            let order: Vec<f64> = (0..n).map(|_| self.signed_size()).collect();
            let mut shuffled = order.clone();
            shuffled.shuffle(&mut *self.rng);
            let Some((a, volume)) = self.run_sequence(&start, &order) else { continue };
            let Some((b, _)) = self.run_sequence(&start, &shuffled) else { continue };
            completed += 1;
            for i in 0..a.len() {
                let scale = volume[i].max(a[i].abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
                max_dev = max_dev.max((a[i] - b[i]).abs() / scale);
            }
        }
        Ok(threshold(Dimension::PathIndependence, max_dev, "Path Independent", "Path Dependent", self.trials))
    }

    /// Terminal state vector and per-entry traded volume, or `None` if a
    /// trade in the sequence cannot be filled.
    fn run_sequence(&self, start: &PoolState, trades: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut pool = start.clone();
        let mut prev = self.subject.state_vector(&pool);
        let mut volume = vec![0.0; prev.len()];
        for &q in trades {
            pool = self.subject.trade(&pool, q).ok()?;
            let next = self.subject.state_vector(&pool);
            for i in 0..next.len() {
                volume[i] += (next[i] - prev[i]).abs();
            }
            prev = next;
        }
        Some((prev, volume))
    }

    /// Spread of the cost of one unit of every token across random states.
    fn translation_invariance(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..self.trials {
            let pool = self.random_state();
            let a = self.size();
            let cost = self.basket_cost(&pool, a)?;
            lo = lo.min(cost);
            hi = hi.max(cost);
        }
        let spread = (hi - lo) / (0.5 * (hi + lo));
        Ok(threshold(
            Dimension::TranslationInvariance,
            spread,
            "Translation Invariant",
            "Non-translation Invariant",
            self.trials,
        ))
    }

    /// Numeraire cost per unit of a basket holding equal amounts of every
    /// token the pool prices.
    fn basket_cost(&self, pool: &PoolState, a: f64) -> Result<f64, EngineError> {
        if let CurveSpec::Lmsr { b } = *pool.curve() {
            let q = pool.curve_state();
            let dq = vec![a; q.len()];
            return Ok(lmsr_trade_cost(b, &q, &dq)? / a);
        }
        let mut total = 1.0;
        for i in 0..pool.tokens().len() {
            if i != self.subject.numeraire {
                total += pool.spot_price(i, self.subject.numeraire)?;
            }
        }
        Ok(total)
    }

    /// Mean price of buying `v` against `10 v` of the asset.
    fn volume_dependency(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let mut max_dev = 0.0f64;
        for _ in 0..self.trials {
            let pool = self.random_state();
            let v = self.size() / 10.0;
            let (_, c1) = self.subject.buy_cost(&pool, v)?;
            let (_, c10) = self.subject.buy_cost(&pool, 10.0 * v)?;
            let m1 = c1 / v;
            let m10 = c10 / (10.0 * v);
            max_dev = max_dev.max((m1 - m10).abs() / m1);
        }
        Ok(threshold(Dimension::VolumeDependency, max_dev, "Volume-independent", "Volume-dependent", self.trials))
    }

    /// Spot price along trajectories that push the asset price up and down
    /// towards depletion. A side is bounded when the log price settles over
    /// the final decade.
    fn price_bounding(&mut self) -> Result<DimensionVerdict, ProbeError> {
        let up = self.trajectory(true)?;
        let down = self.trajectory(false)?;
        let up_dev = settle(&up);
        let down_dev = settle(&down);
        let above = up_dev < VARIANT_TOL;
        let below = down_dev < VARIANT_TOL;
        let characteristic = match (above, below) {
            (true, true) => "Bounded from Above and Below",
            (true, false) => "Bounded from Above",
            (false, true) => "Bounded from Below",
            (false, false) => UNBOUNDED,
        };
        Ok(DimensionVerdict {
            dimension: Dimension::PriceBounding,
            characteristic,
            evidence: Some(Evidence {
                max_deviation: up_dev.max(down_dev),
                trials: up.len() + down.len(),
                tolerance: VARIANT_TOL,
            }),
        })
    }

    /// Asset prices after each decade step. `rising` buys the asset,
    /// otherwise the numeraire side is drained.
    fn trajectory(&self, rising: bool) -> Result<Vec<f64>, ProbeError> {
        let s = self.subject;
        let base = &s.pool;
        let mut prices = Vec::new();
        for k in 1..=BOUND_DECADES {
            let f = 10f64.powi(k);
            let pool = if s.is_lmsr() {
                let b = s.scale;
                let collateral = s.numeraire;
                if rising {
                    base.swap(collateral, s.asset, b * f, OrderKind::ExactOut)?.0
                } else {
                    let mut p = base.clone();
                    for j in (0..collateral).filter(|j| *j != s.asset) {
                        p = p.swap(collateral, j, b * f, OrderKind::ExactOut)?.0;
                    }
                    p
                }
            } else if s.is_supply_sovereign() {
                let supply = base.circulating_supply();
                if rising {
                    s.trade(base, -supply * f)?
                } else {
                    s.trade(base, supply * (1.0 - 1.0 / f))?
                }
            } else if rising {
                let r = base.reserves()[s.asset];
                s.trade(base, -r * (1.0 - 1.0 / f))?
            } else {
                let r = base.reserves()[s.numeraire];
                base.swap(s.asset, s.numeraire, r * (1.0 - 1.0 / f), OrderKind::ExactOut)?.0
            };
            prices.push(s.price(&pool)?);
        }
        Ok(prices)
    }
}

/// Change of log price over the last decade of a trajectory.
fn settle(prices: &[f64]) -> f64 {
    match prices {
        [.., a, b] if *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite() => (b.ln() - a.ln()).abs(),
        _ => f64::INFINITY,
    }
}
