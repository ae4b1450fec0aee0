//! Built-in pool specifications modelled on well-known deployments.

use crate::engine::{ConfigError, PoolConfig};

pub const UNISWAP_V2_LIKE: &str = "\
name = uniswap-v2-like
archetype = price-discovering-lp-based
curve = constant-product
tokens = WETH, USDC
reserves = 1000, 2000000
fee = 0.003
";

pub const CURVE_V1_LIKE: &str = "\
name = curve-v1-like
archetype = price-discovering-lp-based
curve = constant-product-sum
tokens = DAI, USDC, USDT
reserves = 1000000, 1000000, 1000000
chi = 0.2
fee = 0.0004
";

pub const MSTABLE_2021_LIKE: &str = "\
name = mstable-2021-like
archetype = price-discovering-lp-based
curve = constant-sum
tokens = USDC, DAI, USDT
reserves = 1000000, 1000000, 1000000
fee = 0.0006
trading_pairs = restricted
";

pub const DODO_LIKE: &str = "\
name = dodo-like
archetype = price-adopting-lp-based
curve = price-adoption
tokens = WETH, USDC
reserves = 1000, 2000000
k = 1
target_reserves = 1000, 2000000
oracle = 2000
fee = 0.003
parameter_adjustment = automatic
";

pub const BANCOR_LIKE: &str = "\
name = bancor-like
archetype = price-discovering-supply-sovereign
curve = exponential
tokens = DAI, BNT
reserves = 10000
kappa = 2
c = 1
fee = 0
trading_pairs = restricted
";

pub const AUGUR_LIKE: &str = "\
name = augur-like
archetype = price-discovering-lp-based
curve = lmsr
tokens = YES, NO, DAI
reserves = 0, 0, 1000
b = 100
fee = 0
";

/// Names of the built-in specs, in a stable order.
pub const NAMES: [&str; 6] =
    ["uniswap-v2-like", "curve-v1-like", "mstable-2021-like", "dodo-like", "bancor-like", "augur-like"];

/// Source text of a built-in spec.
pub fn text(name: &str) -> Option<&'static str> {
    Some(match name {
        "uniswap-v2-like" => UNISWAP_V2_LIKE,
        "curve-v1-like" => CURVE_V1_LIKE,
        "mstable-2021-like" => MSTABLE_2021_LIKE,
        "dodo-like" => DODO_LIKE,
        "bancor-like" => BANCOR_LIKE,
        "augur-like" => AUGUR_LIKE,
        _ => return None,
    })
}

/// Parsed built-in spec, or `None` for an unknown name.
pub fn builtin(name: &str) -> Option<Result<PoolConfig, ConfigError>> {
    text(name).map(PoolConfig::parse)
}

/// Resolves a built-in name or reads a spec file from disk.
pub fn load(name_or_path: &str) -> Result<PoolConfig, ConfigError> {
    match builtin(name_or_path) {
        Some(cfg) => cfg,
        None => PoolConfig::from_path(name_or_path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PoolState;

    #[test]
    fn every_builtin_parses_and_opens() {
        for name in NAMES {
            let cfg = builtin(name).unwrap().unwrap();
            assert_eq!(cfg.name, name);
            PoolState::from_config(&cfg).unwrap();
        }
    }

    #[test]
    fn unknown_name_falls_back_to_file() {
        assert!(builtin("sushiswap-like").is_none());
        assert!(matches!(load("/nonexistent/pool.spec"), Err(ConfigError::Io { .. })));
    }
}
