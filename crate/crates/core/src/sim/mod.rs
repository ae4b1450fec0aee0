//! Scenario runner with a reference price feed and an arbitrageur.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::CurveSpec;
use crate::engine::{
    self, Archetype, ConfigError, EngineError, OrderKind, PoolConfig, PoolState, TradeOrder, TradeReceipt,
};
use crate::ledger::Ledgers;
use crate::presets;
use crate::types::{AccountId, Amount, TokenId};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario setup: {0}")]
    Setup(EngineError),
    #[error("event {index}: {source}")]
    Event { index: usize, source: EngineError },
    #[error("event {index}: {message}")]
    Invalid { index: usize, message: String },
}

fn read(path: &Path) -> Result<String, SimError> {
    std::fs::read_to_string(path).map_err(|e| SimError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Reference prices keyed by step. Steps are strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriceSeries {
    points: Vec<(u64, f64)>,
}

impl PriceSeries {
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self, SimError> {
        for (i, &(step, price)) in points.iter().enumerate() {
            if !(price.is_finite() && price > 0.0) {
                return Err(SimError::Parse { line: i + 2, message: format!("price must be positive, got {price}") });
            }
            if i > 0 && step <= points[i - 1].0 {
                return Err(SimError::Parse { line: i + 2, message: format!("step {step} does not increase") });
            }
        }
        Ok(PriceSeries { points })
    }

    /// Parses `step,price` CSV. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "step,price" => {}
            Some((i, header)) => {
                return Err(SimError::Parse { line: i + 1, message: format!("expected header `step,price`, got `{header}`") })
            }
            None => return Err(SimError::Parse { line: 1, message: "missing header `step,price`".into() }),
        }
        let mut points: Vec<(u64, f64)> = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            let err = |message: String| SimError::Parse { line: line_no, message };
            let (step, price) = line.split_once(',').ok_or_else(|| err(format!("expected `step,price`, got `{line}`")))?;
            let step: u64 = step.trim().parse().map_err(|_| err(format!("bad step `{}`", step.trim())))?;
            let price: f64 = price.trim().parse().map_err(|_| err(format!("bad price `{}`", price.trim())))?;
            if !(price.is_finite() && price > 0.0) {
                return Err(err(format!("price must be positive, got {price}")));
            }
            if points.last().is_some_and(|(s, _)| step <= *s) {
                return Err(err(format!("step {step} does not increase")));
            }
            points.push((step, price));
        }
        Ok(PriceSeries { points })
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Latest price at or before `step`.
    pub fn at(&self, step: u64) -> Option<f64> {
        let idx = self.points.partition_point(|(s, _)| *s <= step);
        idx.checked_sub(1).map(|i| self.points[i].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,price\n");
        for (s, p) in &self.points {
            let _ = writeln!(out, "{s},{p}");
        }
        out
    }
}

pub fn load_price_series(path: impl AsRef<Path>) -> Result<PriceSeries, SimError> {
    PriceSeries::parse(&read(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Trade { account: AccountId, token_in: TokenId, token_out: TokenId, amount: f64 },
    Deposit { account: AccountId, amounts: Vec<f64> },
    Withdraw { account: AccountId, shares: f64 },
    Oracle { price: f64 },
    Arb { account: AccountId },
    Resolve { outcome: TokenId },
    /// Random trade of up to `fraction` of the traded reserve, drawn from the scenario RNG.
    Noise { account: AccountId, fraction: f64 },
}

impl Action {
    pub fn verb(&self) -> &'static str {
        match self {
            Action::Trade { .. } => "trade",
            Action::Deposit { .. } => "deposit",
            Action::Withdraw { .. } => "withdraw",
            Action::Oracle { .. } => "oracle",
            Action::Arb { .. } => "arb",
            Action::Resolve { .. } => "resolve",
            Action::Noise { .. } => "noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub step: u64,
    pub action: Action,
}

/// Pool, endowments, events and the reference feed for one run.
///
/// The creator is funded with the pool's initial reserves before the pool
/// opens; supply-sovereign pools are bootstrapped by the creator buying
/// with the first configured reserve.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pool: PoolConfig,
    pub creator: AccountId,
    pub endowments: Vec<(AccountId, TokenId, f64)>,
    pub events: Vec<Event>,
    pub seed: u64,
    pub prices: PriceSeries,
}

impl Scenario {
    pub fn new(pool: PoolConfig) -> Self {
        Scenario {
            pool,
            creator: AccountId::new("creator"),
            endowments: Vec::new(),
            events: Vec::new(),
            seed: 0,
            prices: PriceSeries::default(),
        }
    }

    /// Parses a scenario. `pool` names a built-in spec or a file, resolved
    /// against `base_dir` when relative.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, SimError> {
        let mut pool = None;
        let mut creator = AccountId::new("creator");
        let mut endowments = Vec::new();
        let mut events: Vec<Event> = Vec::new();
        let mut seed = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SimError::Parse { line: line_no, message };
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |w: &str| -> Result<f64, SimError> {
                w.parse::<f64>().map_err(|_| err(format!("expected a number, got `{w}`")))
            };
            let arity = |n: usize| -> Result<(), SimError> {
                if words.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("`{}` takes {} arguments, got {}", words[0], n - 1, words.len() - 1)))
                }
            };
            match words[0] {
                "pool" => {
                    arity(2)?;
                    let cfg = match presets::builtin(words[1]) {
                        Some(cfg) => cfg?,
                        None => {
                            let path = PathBuf::from(words[1]);
                            let path = match base_dir {
                                Some(dir) if path.is_relative() => dir.join(path),
                                _ => path,
                            };
                            PoolConfig::from_path(path)?
                        }
                    };
                    pool = Some(cfg);
                }
                "creator" => {
                    arity(2)?;
                    creator = AccountId::new(words[1]);
                }
                "endow" => {
                    arity(4)?;
                    endowments.push((AccountId::new(words[1]), TokenId::new(words[2]), num(words[3])?));
                }
                "seed" => {
                    arity(2)?;
                    seed = words[1].parse().map_err(|_| err(format!("bad seed `{}`", words[1])))?;
                }
                first => {
                    let step: u64 = first.parse().map_err(|_| err(format!("unknown directive `{first}`")))?;
                    if events.last().is_some_and(|e| step < e.step) {
                        return Err(err(format!("step {step} goes backwards")));
                    }
                    let verb = words.get(1).copied().ok_or_else(|| err("missing event verb".into()))?;
                    let args = &words[2..];
                    let want = |n: usize| -> Result<(), SimError> {
                        if args.len() == n {
                            Ok(())
                        } else {
                            Err(err(format!("`{verb}` takes {n} arguments, got {}", args.len())))
                        }
                    };
                    let action = match verb {
                        "trade" => {
                            want(4)?;
                            Action::Trade {
                                account: AccountId::new(args[0]),
                                token_in: TokenId::new(args[1]),
                                token_out: TokenId::new(args[2]),
                                amount: num(args[3])?,
                            }
                        }
                        "deposit" => {
                            if args.len() < 2 {
                                return Err(err("`deposit` takes an account and one amount per token".into()));
                            }
                            Action::Deposit {
                                account: AccountId::new(args[0]),
                                amounts: args[1..].iter().map(|w| num(w)).collect::<Result<_, _>>()?,
                            }
                        }
                        "withdraw" => {
                            want(2)?;
                            Action::Withdraw { account: AccountId::new(args[0]), shares: num(args[1])? }
                        }
                        "oracle" => {
                            want(1)?;
                            Action::Oracle { price: num(args[0])? }
                        }
                        "arb" => {
                            want(1)?;
                            Action::Arb { account: AccountId::new(args[0]) }
                        }
                        "resolve" => {
                            want(1)?;
                            Action::Resolve { outcome: TokenId::new(args[0]) }
                        }
                        "noise" => {
                            want(2)?;
                            let fraction = num(args[1])?;
                            if !(fraction > 0.0 && fraction < 1.0) {
                                return Err(err(format!("noise fraction must lie in (0, 1), got {fraction}")));
                            }
                            Action::Noise { account: AccountId::new(args[0]), fraction }
                        }
                        other => return Err(err(format!("unknown verb `{other}`"))),
                    };
                    events.push(Event { step, action });
                }
            }
        }
        let pool = pool.ok_or(SimError::Parse { line: 0, message: "scenario declares no `pool`".into() })?;
        let scenario = Scenario { pool, creator, endowments, events, seed, prices: PriceSeries::default() };
        scenario.check_references()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        Scenario::parse(&read(path)?, path.parent())
    }

    pub fn with_prices(mut self, prices: PriceSeries) -> Self {
        self.prices = prices;
        self
    }

    fn check_references(&self) -> Result<(), SimError> {
        let tokens = &self.pool.tokens;
        let known = |t: &TokenId| tokens.contains(t);
        for (account, token, _) in &self.endowments {
            if !known(token) {
                return Err(SimError::Parse { line: 0, message: format!("endowment of {account} names unknown token {token}") });
            }
        }
        for (index, event) in self.events.iter().enumerate() {
            let bad = |message: String| SimError::Invalid { index, message };
            match &event.action {
                Action::Trade { token_in, token_out, .. } => {
                    for t in [token_in, token_out] {
                        if !known(t) {
                            return Err(bad(format!("unknown token {t}")));
                        }
                    }
                }
                Action::Resolve { outcome } if !known(outcome) => return Err(bad(format!("unknown outcome {outcome}"))),
                Action::Deposit { amounts, .. } if amounts.len() != tokens.len() => {
                    return Err(bad(format!("deposit lists {} amounts for {} tokens", amounts.len(), tokens.len())))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// One row per executed event. Undefined values are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub step: u64,
    pub event: &'static str,
    pub spot: f64,
    pub reference: f64,
    pub tracking_error: f64,
    pub invariant: f64,
    pub lp_value: f64,
    pub divergence_loss: f64,
    pub fees_cum: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub records: Vec<MetricsRecord>,
}

pub const METRICS_HEADER: &str = "step,event,spot,reference,tracking_error,invariant,lp_value,divergence_loss,fees_cum";

fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

impl Metrics {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{METRICS_HEADER}\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.step,
                r.event,
                cell(r.spot),
                cell(r.reference),
                cell(r.tracking_error),
                cell(r.invariant),
                cell(r.lp_value),
                cell(r.divergence_loss),
                cell(r.fees_cum),
            );
        }
        out
    }
}

/// Failure of a run with the metrics recorded before it.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct ScenarioFailure {
    pub error: SimError,
    pub partial: Metrics,
}

/// Final pool and ledgers of a completed run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub metrics: Metrics,
    pub pool: PoolState,
    pub ledgers: Ledgers,
}

fn amt(v: f64) -> Result<Amount, EngineError> {
    Ok(Amount::new(v)?)
}

/// Profit in numeraire of the best trade against `reference`, found by
/// golden-section search over the input amount.
fn best_trade(pool: &PoolState, reference: f64) -> Result<Option<(usize, usize, f64)>, EngineError> {
    let (asset, numeraire) = pool.price_pair();
    let spot = pool.spot_price(asset, numeraire)?;
    let (i, o) = if spot < reference { (numeraire, asset) } else if spot > reference { (asset, numeraire) } else { return Ok(None) };
    let value = |token: usize, amount: f64| if token == asset { amount * reference } else { amount };
    let profit = |dx: f64| -> f64 {
        match pool.swap(i, o, dx, OrderKind::ExactIn) {
            Ok((_, q)) => value(o, q.amount_out) - value(i, dx),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let depth = pool.reserves()[i].max(pool.reserves()[o]).max(1.0);
    let tol = 1e-9 * depth;
    let mut hi = tol;
    let mut best = profit(hi);
    if best <= 0.0 {
        return Ok(None);
    }
    for _ in 0..200 {
        let next = profit(2.0 * hi);
        if next <= best {
            break;
        }
        best = next;
        hi *= 2.0;
    }
    let (mut a, mut b) = (hi / 2.0, 2.0 * hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (profit(c), profit(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = profit(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = profit(d);
        }
    }
    let dx = 0.5 * (a + b);
    Ok((profit(dx) > 0.0).then_some((i, o, dx)))
}

/// Executes the profit-maximising trade against `reference_price`, or
/// nothing when no trade size is profitable.
pub fn arbitrage_step(
    pool: &PoolState,
    reference_price: f64,
    arb_account: &AccountId,
    ledgers: &Ledgers,
) -> Result<(PoolState, Option<TradeReceipt>, Ledgers), EngineError> {
    if !(reference_price.is_finite() && reference_price > 0.0) {
        return Err(EngineError::InvalidPrice(reference_price));
    }
    match best_trade(pool, reference_price)? {
        None => Ok((pool.clone(), None, ledgers.clone())),
        Some((i, o, dx)) => {
            let order = TradeOrder {
                trader: arb_account.clone(),
                token_in: pool.tokens()[i].clone(),
                token_out: pool.tokens()[o].clone(),
                amount: amt(dx)?,
                kind: OrderKind::ExactIn,
            };
            let (next, receipt, books) = engine::execute_swap(pool, &order, ledgers)?;
            Ok((next, Some(receipt), books))
        }
    }
}

/// Runs `scenario` on top of `ledgers` (extra balances, usually empty).
pub fn run_scenario(scenario: &Scenario, ledgers: &Ledgers) -> Result<Outcome, ScenarioFailure> {
    let mut run = Run::new(scenario, ledgers).map_err(|error| ScenarioFailure { error, partial: Metrics::default() })?;
    for (index, event) in scenario.events.iter().enumerate() {
        if let Err(error) = run.apply(index, event) {
            return Err(ScenarioFailure { error, partial: run.metrics });
        }
        run.record(event);
    }
    Ok(Outcome { metrics: run.metrics, pool: run.pool, ledgers: run.ledgers })
}

struct Run<'a> {
    scenario: &'a Scenario,
    pool: PoolState,
    ledgers: Ledgers,
    rng: ChaCha8Rng,
    metrics: Metrics,
    /// Token amounts the creator would hold had they not provided liquidity.
    hold: Vec<f64>,
}

impl<'a> Run<'a> {
    fn new(scenario: &'a Scenario, extra: &Ledgers) -> Result<Self, SimError> {
        let setup = SimError::Setup;
        let cfg = &scenario.pool;
        let mut ledgers = extra.clone();
        for (account, token, amount) in &scenario.endowments {
            ledgers.mint(token, account, amt(*amount).map_err(setup)?);
        }
        let creator = &scenario.creator;
        let (pool, hold) = if cfg.archetype == Archetype::PriceDiscoveringSupplySovereign {
            let (pool, books) = engine::create_pool(cfg, &[], creator, &ledgers).map_err(setup)?;
            ledgers = books;
            match cfg.reserves.first().copied().filter(|r| *r > 0.0) {
                Some(bootstrap) => {
                    ledgers.mint(&cfg.tokens[0], creator, amt(bootstrap).map_err(setup)?);
                    let (pool, _, books) = engine::curve_buy(&pool, creator, amt(bootstrap).map_err(setup)?, &ledgers).map_err(setup)?;
                    ledgers = books;
                    (pool, Vec::new())
                }
                None => (pool, Vec::new()),
            }
        } else {
            let deposit: Vec<Amount> = cfg.reserves.iter().map(|r| amt(*r)).collect::<Result<_, _>>().map_err(setup)?;
            for (token, a) in cfg.tokens.iter().zip(&deposit) {
                if !a.is_zero() {
                    ledgers.mint(token, creator, *a);
                }
            }
            let (pool, books) = engine::create_pool(cfg, &deposit, creator, &ledgers).map_err(setup)?;
            ledgers = books;
            (pool, cfg.reserves.clone())
        };
        Ok(Run { scenario, pool, ledgers, rng: ChaCha8Rng::seed_from_u64(scenario.seed), metrics: Metrics::default(), hold })
    }

    fn apply(&mut self, index: usize, event: &Event) -> Result<(), SimError> {
        let fail = |source: EngineError| SimError::Event { index, source };
        let pool = &self.pool;
        match &event.action {
            Action::Trade { account, token_in, token_out, amount } => {
                let order = TradeOrder::exact_in(account.clone(), token_in.as_str(), token_out.as_str(), *amount)
                    .map_err(|e| fail(e.into()))?;
                let (next, _, books) = engine::execute_swap(pool, &order, &self.ledgers).map_err(fail)?;
                self.pool = next;
                self.ledgers = books;
            }
            Action::Deposit { account, amounts } => {
                let amounts: Vec<Amount> = amounts.iter().map(|a| amt(*a)).collect::<Result<_, _>>().map_err(fail)?;
                let (next, _, books) = engine::deposit_liquidity(pool, account, &amounts, &self.ledgers).map_err(fail)?;
                if account == &self.scenario.creator {
                    for (h, a) in self.hold.iter_mut().zip(&amounts) {
                        *h += a.value();
                    }
                }
                self.pool = next;
                self.ledgers = books;
            }
            Action::Withdraw { account, shares } => {
                let before = pool.lp_shares(account);
                let (next, _, books) =
                    engine::withdraw_liquidity(pool, account, amt(*shares).map_err(fail)?, &self.ledgers).map_err(fail)?;
                if account == &self.scenario.creator && before > 0.0 {
                    let keep = 1.0 - shares / before;
                    for h in self.hold.iter_mut() {
                        *h *= keep;
                    }
                }
                self.pool = next;
                self.ledgers = books;
            }
            Action::Oracle { price } => {
                self.pool = engine::set_oracle_price(pool, *price).map_err(fail)?;
            }
            Action::Arb { account } => {
                let reference = self.scenario.prices.at(event.step).ok_or_else(|| SimError::Invalid {
                    index,
                    message: format!("no reference price at or before step {}", event.step),
                })?;
                let (next, _, books) = arbitrage_step(pool, reference, account, &self.ledgers).map_err(fail)?;
                self.pool = next;
                self.ledgers = books;
            }
            Action::Resolve { outcome } => {
                let winner = pool.token_index(outcome).map_err(fail)?;
                let (next, books) = engine::resolve_prediction(pool, winner, &self.ledgers).map_err(fail)?;
                self.pool = next;
                self.ledgers = books;
            }
            Action::Noise { account, fraction } => {
                let (asset, numeraire) = pool.price_pair();
                let (i, o) = if self.rng.gen_bool(0.5) { (asset, numeraire) } else { (numeraire, asset) };
                let reserve = match pool.curve() {
                    CurveSpec::Lmsr { b } if i != numeraire => *b,
                    CurveSpec::Exponential { .. } if i == asset => pool.circulating_supply(),
                    _ => pool.reserves()[i],
                };
                let amount = reserve * fraction * self.rng.gen::<f64>();
                if amount > 0.0 {
                    let order = TradeOrder {
                        trader: account.clone(),
                        token_in: pool.tokens()[i].clone(),
                        token_out: pool.tokens()[o].clone(),
                        amount: amt(amount).map_err(fail)?,
                        kind: OrderKind::ExactIn,
                    };
                    let (next, _, books) = engine::execute_swap(pool, &order, &self.ledgers).map_err(fail)?;
                    self.pool = next;
                    self.ledgers = books;
                }
            }
        }
        Ok(())
    }

    /// Numeraire value of one unit of each pool token: the reference price
    /// for the asset when one is set, the pool's spot price otherwise.
    fn marks(&self, reference: f64) -> Vec<f64> {
        let pool = &self.pool;
        let (asset, numeraire) = pool.price_pair();
        (0..pool.tokens().len())
            .map(|i| {
                if i == numeraire {
                    1.0
                } else if i == asset && reference.is_finite() {
                    reference
                } else {
                    pool.spot_price(i, numeraire).unwrap_or(f64::NAN)
                }
            })
            .collect()
    }

    fn record(&mut self, event: &Event) {
        let pool = &self.pool;
        let (asset, numeraire) = pool.price_pair();
        let reference = self.scenario.prices.at(event.step).unwrap_or(f64::NAN);
        let spot = pool.spot_price(asset, numeraire).unwrap_or(f64::NAN);
        let marks = self.marks(reference);
        let dot = |v: &[f64]| v.iter().zip(&marks).map(|(a, m)| a * m).sum::<f64>();
        let (lp_value, divergence_loss) = if pool.archetype().is_lp_based() && pool.lp_share_supply() > 0.0 {
            let share = pool.lp_shares(&self.scenario.creator) / pool.lp_share_supply();
            let pool_value = match pool.curve() {
                CurveSpec::Lmsr { .. } => {
                    let n = pool.reserves().len() - 1;
                    pool.reserves()[n] - dot(&pool.reserves()[..n])
                }
                _ => dot(pool.reserves()),
            };
            let lp = share * pool_value;
            let hold = dot(&self.hold);
            (lp, if hold > 0.0 { lp / hold - 1.0 } else { f64::NAN })
        } else {
            (f64::NAN, f64::NAN)
        };
        self.metrics.records.push(MetricsRecord {
            step: event.step,
            event: event.action.verb(),
            spot,
            reference,
            tracking_error: (spot - reference).abs() / reference,
            invariant: pool.invariant_value().unwrap_or(f64::NAN),
            lp_value,
            divergence_loss,
            fees_cum: dot(pool.accumulated_fees()),
        });
    }
}
