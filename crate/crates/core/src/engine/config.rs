//! Pool specification files: one `key = value` pair per line, `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::curves::CurveSpec;
use crate::types::TokenId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Archetype {
    PriceDiscoveringLpBased,
    PriceAdoptingLpBased,
    PriceDiscoveringSupplySovereign,
}

impl Archetype {
    pub fn as_str(&self) -> &'static str {
        match self {
            Archetype::PriceDiscoveringLpBased => "price-discovering-lp-based",
            Archetype::PriceAdoptingLpBased => "price-adopting-lp-based",
            Archetype::PriceDiscoveringSupplySovereign => "price-discovering-supply-sovereign",
        }
    }

    /// Archetype a curve belongs to when the pool spec does not say.
    pub fn for_curve(curve: &CurveSpec) -> Archetype {
        match curve {
            CurveSpec::PriceAdoption { .. } => Archetype::PriceAdoptingLpBased,
            CurveSpec::Exponential { .. } => Archetype::PriceDiscoveringSupplySovereign,
            _ => Archetype::PriceDiscoveringLpBased,
        }
    }

    pub fn is_lp_based(&self) -> bool {
        !matches!(self, Archetype::PriceDiscoveringSupplySovereign)
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Archetype {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Archetype::PriceDiscoveringLpBased,
            Archetype::PriceAdoptingLpBased,
            Archetype::PriceDiscoveringSupplySovereign,
        ]
        .into_iter()
        .find(|a| a.as_str() == s)
        .ok_or_else(|| format!("unknown archetype `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TradingPairs {
    #[default]
    Open,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterAdjustment {
    Automatic,
    Fixed,
    Manual,
}

/// Parsed pool specification.
///
/// For LMSR pools `tokens` lists the outcomes followed by the collateral
/// token, and `reserves` holds the initial outstanding shares (all zero)
/// followed by the collateral deposit. Supply-sovereign pools list
/// `[reserve, issued]` tokens and an optional single bootstrap purchase in
/// `reserves`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    pub name: String,
    pub archetype: Archetype,
    pub curve: CurveSpec,
    pub tokens: Vec<TokenId>,
    pub reserves: Vec<f64>,
    pub fee: f64,
    pub oracle: Option<f64>,
    pub trading_pairs: TradingPairs,
    pub parameter_adjustment: ParameterAdjustment,
}

const KEYS: &[&str] = &[
    "name",
    "archetype",
    "curve",
    "tokens",
    "reserves",
    "fee",
    "weights",
    "chi",
    "t",
    "b",
    "k",
    "target_reserves",
    "kappa",
    "c",
    "oracle",
    "trading_pairs",
    "parameter_adjustment",
];

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn text(&self, key: &'static str) -> Result<&str, ConfigError> {
        self.0.get(key).map(String::as_str).ok_or(ConfigError::Missing(key))
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn real(&self, key: &'static str) -> Result<f64, ConfigError> {
        parse_real(key, self.text(key)?)
    }

    fn opt_real(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        self.opt(key).map(|v| parse_real(key, v)).transpose()
    }

    fn reals(&self, key: &'static str) -> Result<Vec<f64>, ConfigError> {
        self.text(key)?.split(',').map(|v| parse_real(key, v.trim())).collect()
    }
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| invalid(key, format!("`{value}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

impl PoolConfig {
    pub fn parse(text: &str) -> Result<PoolConfig, ConfigError> {
        let mut fields = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line: idx + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(syntax(format!("unknown key `{key}`")));
            }
            if fields.insert(key.to_string(), value.to_string()).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }
        Self::from_fields(Fields(fields))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<PoolConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    fn from_fields(f: Fields) -> Result<PoolConfig, ConfigError> {
        let curve = match f.text("curve")? {
            "constant-product" => CurveSpec::ConstantProduct,
            "geometric-mean" => CurveSpec::GeometricMean { weights: f.reals("weights")? },
            "constant-sum" => CurveSpec::ConstantSum,
            "constant-product-sum" => CurveSpec::ConstantProductSum { chi: f.real("chi")? },
            "constant-power-sum" => CurveSpec::ConstantPowerSum { t: f.real("t")? },
            "lmsr" => CurveSpec::Lmsr { b: f.real("b")? },
            "price-adoption" => CurveSpec::PriceAdoption { k: f.real("k")?, target_reserves: f.reals("target_reserves")? },
            "exponential" => CurveSpec::Exponential { kappa: f.real("kappa")?, c: f.opt_real("c")?.unwrap_or(1.0) },
            other => return Err(invalid("curve", format!("unknown curve `{other}`"))),
        };
        let archetype = match f.opt("archetype") {
            Some(a) => a.parse().map_err(|m: String| invalid("archetype", m))?,
            None => Archetype::for_curve(&curve),
        };
        if archetype != Archetype::for_curve(&curve) {
            return Err(invalid("archetype", format!("{archetype} pools cannot use a {} curve", curve.name())));
        }
        let tokens: Vec<TokenId> = f.text("tokens")?.split(',').map(|t| TokenId::new(t.trim())).collect();
        if tokens.iter().any(|t| t.as_str().is_empty()) {
            return Err(invalid("tokens", "empty token symbol"));
        }
        for (i, t) in tokens.iter().enumerate() {
            if tokens[..i].contains(t) {
                return Err(invalid("tokens", format!("duplicate token {t}")));
            }
        }
        let reserves = match f.opt("reserves") {
            Some(_) => f.reals("reserves")?,
            None => Vec::new(),
        };
        let fee = f.opt_real("fee")?.unwrap_or(0.0);
        let trading_pairs = match f.opt("trading_pairs") {
            None | Some("open") => TradingPairs::Open,
            Some("restricted") => TradingPairs::Restricted,
            Some(other) => return Err(invalid("trading_pairs", format!("expected open or restricted, got `{other}`"))),
        };
        let parameter_adjustment = match f.opt("parameter_adjustment") {
            None => match archetype {
                Archetype::PriceAdoptingLpBased => ParameterAdjustment::Automatic,
                _ => ParameterAdjustment::Fixed,
            },
            Some("automatic") => ParameterAdjustment::Automatic,
            Some("fixed") => ParameterAdjustment::Fixed,
            Some("manual") => ParameterAdjustment::Manual,
            Some(other) => return Err(invalid("parameter_adjustment", format!("unknown value `{other}`"))),
        };
        let config = PoolConfig {
            name: f.opt("name").unwrap_or("pool").to_string(),
            archetype,
            curve,
            tokens,
            reserves,
            fee,
            oracle: f.opt_real("oracle")?,
            trading_pairs,
            parameter_adjustment,
        };
        config.check_shape()?;
        Ok(config)
    }

    /// Checks token and reserve counts against the curve.
    pub fn check_shape(&self) -> Result<(), ConfigError> {
        let n = self.tokens.len();
        match &self.curve {
            CurveSpec::Exponential { .. } => {
                if n != 2 {
                    return Err(invalid("tokens", "supply-sovereign pools list [reserve, issued] tokens"));
                }
                if self.reserves.len() > 1 {
                    return Err(invalid("reserves", "supply-sovereign pools take at most one bootstrap amount"));
                }
            }
            CurveSpec::Lmsr { .. } => {
                if n < 3 {
                    return Err(invalid("tokens", "lmsr pools list at least two outcomes and a collateral token"));
                }
                if self.reserves.len() != n {
                    return Err(invalid("reserves", format!("expected {n} values")));
                }
            }
            _ => {
                if n < 2 {
                    return Err(invalid("tokens", "need at least two tokens"));
                }
                if self.reserves.len() != n {
                    return Err(invalid("reserves", format!("expected {n} values, got {}", self.reserves.len())));
                }
            }
        }
        let state_len = match &self.curve {
            CurveSpec::Lmsr { .. } => n - 1,
            _ => n,
        };
        self.curve.validate(state_len).map_err(|e| invalid("curve", e.to_string()))?;
        if !(0.0..1.0).contains(&self.fee) {
            return Err(invalid("fee", format!("must lie in [0, 1), got {}", self.fee)));
        }
        if let Some(p) = self.oracle {
            if p <= 0.0 {
                return Err(invalid("oracle", "must be > 0"));
            }
        }
        if self.reserves.iter().any(|r| *r < 0.0) {
            return Err(invalid("reserves", "must be >= 0"));
        }
        Ok(())
    }

    /// Surcharge parameter `k` (zero for curves without one).
    pub fn surcharge_k(&self) -> f64 {
        match &self.curve {
            CurveSpec::PriceAdoption { k, .. } => *k,
            _ => 0.0,
        }
    }

    /// Renders the spec back to the file format.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = format!("name = {}\narchetype = {}\ncurve = {}\n", self.name, self.archetype, self.curve.name());
        let tokens: Vec<&str> = self.tokens.iter().map(TokenId::as_str).collect();
        out += &format!("tokens = {}\n", tokens.join(", "));
        if !self.reserves.is_empty() {
            out += &format!("reserves = {}\n", join(&self.reserves));
        }
        out += &format!("fee = {}\n", self.fee);
        match &self.curve {
            CurveSpec::GeometricMean { weights } => out += &format!("weights = {}\n", join(weights)),
            CurveSpec::ConstantProductSum { chi } => out += &format!("chi = {chi}\n"),
            CurveSpec::ConstantPowerSum { t } => out += &format!("t = {t}\n"),
            CurveSpec::Lmsr { b } => out += &format!("b = {b}\n"),
            CurveSpec::PriceAdoption { k, target_reserves } => {
                out += &format!("k = {k}\ntarget_reserves = {}\n", join(target_reserves))
            }
            CurveSpec::Exponential { kappa, c } => out += &format!("kappa = {kappa}\nc = {c}\n"),
            CurveSpec::ConstantProduct | CurveSpec::ConstantSum => {}
        }
        if let Some(p) = self.oracle {
            out += &format!("oracle = {p}\n");
        }
        if self.trading_pairs == TradingPairs::Restricted {
            out += "trading_pairs = restricted\n";
        }
        out += &format!(
            "parameter_adjustment = {}\n",
            match self.parameter_adjustment {
                ParameterAdjustment::Automatic => "automatic",
                ParameterAdjustment::Fixed => "fixed",
                ParameterAdjustment::Manual => "manual",
            }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CP: &str = "# a pool\ncurve = constant-product\ntokens = WETH, USDC\nreserves = 100, 400\nfee = 0.003\n";

    #[test]
    fn parses_minimal_spec() {
        let c = PoolConfig::parse(CP).unwrap();
        assert_eq!(c.archetype, Archetype::PriceDiscoveringLpBased);
        assert_eq!(c.tokens, vec![TokenId::new("WETH"), TokenId::new("USDC")]);
        assert_eq!(c.reserves, vec![100.0, 400.0]);
        assert_eq!(c.fee, 0.003);
    }

    #[test]
    fn unknown_key_is_error() {
        let err = PoolConfig::parse("curve = constant-sum\nslippage = 3\n").unwrap_err();
        assert!(err.to_string().contains("slippage"));
    }

    #[test]
    fn incompatible_archetype_is_error() {
        let text = format!("{CP}archetype = price-discovering-supply-sovereign\n");
        assert!(matches!(PoolConfig::parse(&text), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn missing_curve_parameter() {
        let err = PoolConfig::parse("curve = lmsr\ntokens = A, B, C\nreserves = 0, 0, 100\n").unwrap_err();
        assert_eq!(err, ConfigError::Missing("b"));
    }

    #[test]
    fn text_round_trip() {
        let text = "curve = price-adoption\ntokens = X, Y\nreserves = 10, 100\nk = 0.5\ntarget_reserves = 10, 100\noracle = 10\nfee = 0.001\n";
        let c = PoolConfig::parse(text).unwrap();
        assert_eq!(PoolConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn reserve_count_checked() {
        let err = PoolConfig::parse("curve = constant-sum\ntokens = A, B\nreserves = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { .. }));
    }
}
