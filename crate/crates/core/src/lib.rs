//! Automated market maker engine with eight pricing curves, a taxonomy
//! probe and a scenario simulator.

pub mod curves;
pub mod engine;
pub mod ledger;
pub mod presets;
pub mod probe;
pub mod sim;
pub mod types;

pub use curves::{
    invariant_value, quote_exact_in, quote_exact_out, solve_stableswap_d, spot_price, CurveError, CurveSpec,
};
pub use engine::{
    create_pool, curve_buy, curve_sell, deposit_liquidity, execute_swap, quote, resolve_prediction,
    set_oracle_price, withdraw_liquidity, Archetype, ConfigError, EngineError, OrderKind, PoolConfig, PoolState,
    Quote, TradeOrder, TradeReceipt,
};
pub use ledger::{Ledger, LedgerError, Ledgers};
pub use probe::{classify, run_dimension_probe, Dimension, DimensionVerdict, ProbeError, TaxonomyReport};
pub use sim::{arbitrage_step, load_price_series, run_scenario, Metrics, PriceSeries, Scenario, SimError};
pub use types::{AccountId, Amount, AmountError, FeeParams, TokenId};
