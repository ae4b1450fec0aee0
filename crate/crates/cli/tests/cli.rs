use std::path::PathBuf;
use std::process::{Command, Output};

use ammtax::presets;
use ammtax::probe::{taxonomy_table, Dimension};

fn ammtax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ammtax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ammtax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("{key} missing from {text}"))
        .parse()
        .unwrap()
}

#[test]
fn quote_constant_product() {
    let pool = scratch("cp.pool", "curve = constant-product\ntokens = X, Y\nreserves = 100, 100\nfee = 0\n");
    let o = ammtax(&["quote", "--pool", pool.to_str().unwrap(), "--in", "X", "--out", "Y", "--amount", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = field(&stdout(&o), "amount_out");
    assert!((out - 100.0 / 11.0).abs() < 1e-9);
    assert!(stderr(&o).is_empty());
}

#[test]
fn quote_exact_out_inverts_exact_in() {
    let o = ammtax(&["quote", "--pool", "uniswap-v2-like", "--in", "USDC", "--out", "WETH", "--amount", "1", "--exact-out"]);
    assert!(o.status.success());
    let paid = field(&stdout(&o), "amount_in");
    let o = ammtax(&["quote", "--pool", "uniswap-v2-like", "--in", "USDC", "--out", "WETH", "--amount", &paid.to_string()]);
    assert!((field(&stdout(&o), "amount_out") - 1.0).abs() < 1e-9);
}

#[test]
fn unknown_flag_is_a_usage_error_naming_the_flag() {
    let o = ammtax(&["quote", "--pool", "uniswap-v2-like", "--frobnicate", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("--frobnicate"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(ammtax(&[]).status.code(), Some(1));
    assert_eq!(ammtax(&["--help"]).status.code(), Some(0));
}

#[test]
fn engine_errors_exit_with_two() {
    let o = ammtax(&["quote", "--pool", "uniswap-v2-like", "--in", "WETH", "--out", "DOGE", "--amount", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);
    let o = ammtax(&["quote", "--pool", "mstable-2021-like", "--in", "USDC", "--out", "DAI", "--amount", "5e6"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ammtax(&["classify", "--pool", "/nonexistent/spec.pool"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn too_few_trials_is_a_usage_error() {
    let o = ammtax(&["classify", "--pool", "uniswap-v2-like", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_uniswap_matches_table_column() {
    let o = ammtax(&["classify", "--pool", "uniswap-v2-like", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("dimension,characteristic,max_deviation,trials,tolerance"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), Dimension::ALL.len());
    for (row, d) in rows.iter().zip(Dimension::ALL) {
        let cells: Vec<_> = row.split(',').collect();
        assert_eq!(cells[0], d.name());
        let got = Some(cells[1]).filter(|c| *c != "Unbounded");
        assert_eq!(got, taxonomy_table::golden("Uniswap v2", d), "{row}");
    }
}

#[test]
fn classify_output_is_byte_stable_and_honours_out() {
    let a = stdout(&ammtax(&["classify", "--pool", "dodo-like", "--seed", "4"]));
    let b = stdout(&ammtax(&["classify", "--pool", "dodo-like", "--seed", "4"]));
    assert_eq!(a, b);
    let path = scratch("report.csv", "");
    let o = ammtax(&["classify", "--pool", "dodo-like", "--seed", "4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), a);
}

#[test]
fn every_preset_is_listed_and_quotable() {
    let listed = stdout(&ammtax(&["presets"]));
    for name in presets::NAMES {
        assert!(listed.lines().any(|l| l == name));
        let o = ammtax(&["curve-table", "--pool", name, "--samples", "4"]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
}

#[test]
fn curve_table_rows_are_log_spaced() {
    let o = ammtax(&["curve-table", "--pool", "uniswap-v2-like", "--samples", "5"]);
    let csv = stdout(&o);
    let rows: Vec<Vec<f64>> =
        csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(csv.lines().next(), Some("amount_in,amount_out,mean_price,spot_after"));
    assert_eq!(rows.len(), 5);
    for w in rows.windows(2) {
        assert!((w[1][0] / w[0][0] - 10f64.powf(0.75)).abs() < 1e-9);
        assert!(w[1][2] < w[0][2], "mean price falls with size");
    }
}

#[test]
fn simulate_writes_metrics() {
    let pool = scratch("sim.pool", "curve = constant-product\ntokens = X, Y\nreserves = 100, 100\nfee = 0\n");
    let scenario = scratch(
        "double.scn",
        &format!("pool {}\nendow arb X 1000\nendow arb Y 1000\n0 arb arb\n1 arb arb\n", pool.display()),
    );
    let prices = scratch("double.csv", "step,price\n0,1\n1,2\n");
    let out = scratch("metrics.csv", "");
    let o = ammtax(&[
        "simulate",
        "--scenario",
        scenario.to_str().unwrap(),
        "--prices",
        prices.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(ammtax::sim::METRICS_HEADER));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    let loss: f64 = last[7].parse().unwrap();
    assert!((loss - (2.0 * 2f64.sqrt() / 3.0 - 1.0)).abs() < 1e-9);
}

#[test]
fn simulate_failure_keeps_partial_metrics() {
    let scenario = scratch(
        "broke.scn",
        "pool uniswap-v2-like\nendow bob USDC 100\n0 trade bob USDC WETH 50\n1 trade bob USDC WETH 80\n",
    );
    let out = scratch("partial.csv", "");
    let o = ammtax(&["simulate", "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("event 1"), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 2);
}
