//! Published taxonomy classification of thirteen AMMs, as printed, plus the
//! cell corrections this crate applies before comparing against it.

use super::Dimension;

pub const COLUMNS: [&str; 13] = [
    "Augur",
    "Balancer WP",
    "Balancer MP",
    "Bancor ST",
    "Curve v1",
    "DODO",
    "mStable 2021",
    "Ref.Finance",
    "THORSwap Sb",
    "Uniswap v2",
    "Uniswap v3",
    "WooFi",
    "YieldSpace",
];

/// `(dimension, characteristic, marks)` with one mark per column in
/// [`COLUMNS`] order.
const ROWS: &[(Dimension, &str, &str)] = &[
    (Dimension::InformationIncorporation, "Incorporative", "xxxxxx.xxxxxx"),
    (Dimension::InformationIncorporation, "Non-incorporative", "......x......"),
    (Dimension::LiquidityConcentration, "Automatic", ".....x.....x."),
    (Dimension::LiquidityConcentration, "Function-based", "xxxxx.x.xx..x"),
    (Dimension::LiquidityConcentration, "LP-based", ".......x..x.."),
    (Dimension::LiquiditySensitivity, "Insensitive", "......x......"),
    (Dimension::LiquiditySensitivity, "Sensitive", "xxxxxx.xxxxxx"),
    (Dimension::PathDeficiency, "Deficient", "x..x........."),
    (Dimension::PathDeficiency, "Strictly Deficient", ".xx.xxxxxxxxx"),
    (Dimension::PathIndependence, "Path Dependent", ".....x..x...."),
    (Dimension::PathIndependence, "Path Independent", "xxxxx.xx.xxxx"),
    (Dimension::PriceBounding, "Bounded from Above", "............x"),
    (Dimension::PriceBounding, "Bounded from Above and Below", ".xx.xx.xxxxx."),
    (Dimension::PriceBounding, "Bounded from Below", "......x......"),
    (Dimension::PriceDiscovery, "Constant-sum", "......x......"),
    (Dimension::PriceDiscovery, "Constant-power-sum", ".......xx...."),
    (Dimension::PriceDiscovery, "Constant-product", "....x........"),
    (Dimension::PriceDiscovery, "Constant-product-sum", "............x"),
    (Dimension::PriceDiscovery, "Exponential Function", "...x........."),
    (Dimension::PriceDiscovery, "Geometric Mean", ".xx.........."),
    (Dimension::PriceDiscovery, "Logarithmic Market Scoring", "x............"),
    (Dimension::PriceDiscovery, "Price Adoption", ".....x.....x."),
    (Dimension::TokenPriceSource, "External", "xxxxx.xxxxx.x"),
    (Dimension::TokenPriceSource, "Internal", ".....x.....x."),
    (Dimension::TranslationInvariance, "Non-translation Invariant", ".xxxxx.xxxxxx"),
    (Dimension::TranslationInvariance, "Translation Invariant", "x.....x......"),
    (Dimension::VolumeDependency, "Volume-dependent", "xxxxxx.xxxxxx"),
    (Dimension::VolumeDependency, "Volume-independent", "......x......"),
    (Dimension::NumberOfTokens, "Three or More", "...xxxxxxxxxx"),
    (Dimension::NumberOfTokens, "Two", "xxx.........."),
    (Dimension::RiskManagement, "Imbalance Surcharges", ".....x.....x."),
    (Dimension::RiskManagement, "Loss Insurance", "........x...."),
    (Dimension::RiskManagement, "No Risk Management", "xxxxx.xx.xx.x"),
    (Dimension::SourceOfLiquidity, "External", "xxx.xxxxxxxxx"),
    (Dimension::SourceOfLiquidity, "Internal", "...x........."),
    (Dimension::SupportedTradingPairs, "Open", "xx..xx.xxxxx."),
    (Dimension::SupportedTradingPairs, "Restricted", "..xx..x.....x"),
    (Dimension::Interoperability, "Interoperable", ".......x...x."),
    (Dimension::Interoperability, "Non-interoperable", "xxxxxxx.xxx.x"),
    (Dimension::LimitOrderFunctionality, "Included", ".......x....."),
    (Dimension::LimitOrderFunctionality, "Not Included", "xxxxxxx.xxxxx"),
    (Dimension::ParameterAdjustment, "Automatic", ".....x..x...x"),
    (Dimension::ParameterAdjustment, "Fixed", "xx.xx.x..xx.."),
    (Dimension::ParameterAdjustment, "Manual", "..x....x...x."),
];

/// A printed cell replaced before comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correction {
    pub column: &'static str,
    pub dimension: Dimension,
    pub printed: Option<&'static str>,
    pub corrected: Option<&'static str>,
    pub reason: &'static str,
}

const INVERTED_SOURCE: &str =
    "row printed inverted; price-discovering AMMs compute prices internally, price adopters use external oracles";
const TWO_TOKEN: &str = "two-token pool; rows of this dimension are printed swapped";
const PD_SHIFT: &str = "price discovery marks shifted by one column";
const BOUNDING: &str = "spot price along depletion trajectories of the implemented curve";

pub const CORRECTIONS: &[Correction] = &[
    Correction { column: "Augur", dimension: Dimension::TokenPriceSource, printed: Some("External"), corrected: Some("Internal"), reason: INVERTED_SOURCE },
    Correction { column: "Bancor ST", dimension: Dimension::TokenPriceSource, printed: Some("External"), corrected: Some("Internal"), reason: INVERTED_SOURCE },
    Correction { column: "Curve v1", dimension: Dimension::TokenPriceSource, printed: Some("External"), corrected: Some("Internal"), reason: INVERTED_SOURCE },
    Correction { column: "DODO", dimension: Dimension::TokenPriceSource, printed: Some("Internal"), corrected: Some("External"), reason: INVERTED_SOURCE },
    Correction { column: "mStable 2021", dimension: Dimension::TokenPriceSource, printed: Some("External"), corrected: Some("Internal"), reason: INVERTED_SOURCE },
    Correction { column: "Uniswap v2", dimension: Dimension::TokenPriceSource, printed: Some("External"), corrected: Some("Internal"), reason: INVERTED_SOURCE },
    Correction { column: "Bancor ST", dimension: Dimension::NumberOfTokens, printed: Some("Three or More"), corrected: Some("Two"), reason: TWO_TOKEN },
    Correction { column: "DODO", dimension: Dimension::NumberOfTokens, printed: Some("Three or More"), corrected: Some("Two"), reason: TWO_TOKEN },
    Correction { column: "Uniswap v2", dimension: Dimension::NumberOfTokens, printed: Some("Three or More"), corrected: Some("Two"), reason: TWO_TOKEN },
    Correction { column: "Curve v1", dimension: Dimension::PriceDiscovery, printed: Some("Constant-product"), corrected: Some("Constant-product-sum"), reason: PD_SHIFT },
    Correction { column: "Uniswap v2", dimension: Dimension::PriceDiscovery, printed: None, corrected: Some("Constant-product"), reason: PD_SHIFT },
    Correction { column: "Augur", dimension: Dimension::PriceBounding, printed: None, corrected: Some("Bounded from Above"), reason: BOUNDING },
    Correction { column: "mStable 2021", dimension: Dimension::PriceBounding, printed: Some("Bounded from Below"), corrected: Some("Bounded from Above and Below"), reason: BOUNDING },
    Correction { column: "Uniswap v2", dimension: Dimension::PriceBounding, printed: Some("Bounded from Above and Below"), corrected: None, reason: BOUNDING },
];

/// Table column a built-in spec is modelled on.
pub fn column_for_preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "uniswap-v2-like" => "Uniswap v2",
        "curve-v1-like" => "Curve v1",
        "mstable-2021-like" => "mStable 2021",
        "dodo-like" => "DODO",
        "bancor-like" => "Bancor ST",
        "augur-like" => "Augur",
        _ => return None,
    })
}

fn column_index(column: &str) -> Option<usize> {
    COLUMNS.iter().position(|c| *c == column)
}

/// Cell as printed; `None` when no characteristic is marked.
pub fn printed(column: &str, dimension: Dimension) -> Option<&'static str> {
    let idx = column_index(column)?;
    ROWS.iter()
        .find(|(d, _, marks)| *d == dimension && marks.as_bytes()[idx] == b'x')
        .map(|(_, c, _)| *c)
}

/// Cell after applying [`CORRECTIONS`].
pub fn golden(column: &str, dimension: Dimension) -> Option<&'static str> {
    match CORRECTIONS.iter().find(|c| c.column == column && c.dimension == dimension) {
        Some(c) => c.corrected,
        None => printed(column, dimension),
    }
}

/// Legal characteristics of a dimension, in table order.
pub fn characteristics(dimension: Dimension) -> Vec<&'static str> {
    ROWS.iter().filter(|(d, _, _)| *d == dimension).map(|(_, c, _)| *c).collect()
}
