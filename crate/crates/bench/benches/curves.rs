use std::hint::black_box;

use ammtax::curves::{quote_exact_in, quote_exact_out, solve_stableswap_d, CurveSpec};
use ammtax::probe::{self, Dimension};
use ammtax::{arbitrage_step, presets, AccountId, Amount, Ledgers, PoolState};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn curves() -> Vec<(&'static str, CurveSpec, Vec<f64>, Option<f64>)> {
    vec![
        ("constant-product", CurveSpec::ConstantProduct, vec![1000.0, 2000.0], None),
        ("geometric-mean", CurveSpec::GeometricMean { weights: vec![0.2, 0.3, 0.5] }, vec![500.0, 800.0, 1200.0], None),
        ("constant-sum", CurveSpec::ConstantSum, vec![1000.0, 1000.0], None),
        ("constant-product-sum", CurveSpec::ConstantProductSum { chi: 100.0 }, vec![1e6, 1.1e6, 0.9e6], None),
        ("constant-power-sum", CurveSpec::ConstantPowerSum { t: 0.5 }, vec![1000.0, 1500.0], None),
        ("lmsr", CurveSpec::Lmsr { b: 100.0 }, vec![20.0, 50.0], None),
        (
            "price-adoption",
            CurveSpec::PriceAdoption { k: 0.5, target_reserves: vec![1000.0, 2e6] },
            vec![900.0, 2.2e6],
            Some(2000.0),
        ),
        ("exponential", CurveSpec::Exponential { kappa: 2.0, c: 1.0 }, vec![10_000.0, 100.0], None),
    ]
}

fn quotes(c: &mut Criterion) {
    let mut group = c.benchmark_group("quote");
    for (name, spec, reserves, adopted) in curves() {
        let out = if matches!(spec, CurveSpec::Lmsr { .. }) { reserves.len() } else { 1 };
        group.bench_with_input(BenchmarkId::new("exact_in", name), &spec, |b, spec| {
            b.iter(|| quote_exact_in(spec, black_box(&reserves), 0, out, black_box(1.0), adopted))
        });
        let (i, o) = if matches!(spec, CurveSpec::Lmsr { .. }) { (out, 0) } else { (0, 1) };
        group.bench_with_input(BenchmarkId::new("exact_out", name), &spec, |b, spec| {
            b.iter(|| quote_exact_out(spec, black_box(&reserves), i, o, black_box(1.0), adopted))
        });
    }
    group.finish();
}

fn stableswap(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_stableswap_d");
    for n in [2usize, 3, 5, 8] {
        let reserves: Vec<f64> = (0..n).map(|i| 1e6 * (1.0 + 0.37 * i as f64)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &reserves, |b, r| {
            b.iter(|| solve_stableswap_d(black_box(r), 100.0))
        });
    }
    group.finish();
}

fn arbitrage(c: &mut Criterion) {
    let cfg = presets::builtin("uniswap-v2-like").unwrap().unwrap();
    let pool = PoolState::from_config(&cfg).unwrap();
    let arb = AccountId::new("arb");
    let mut ledgers = Ledgers::new();
    for (t, r) in pool.tokens().iter().zip(pool.reserves()) {
        ledgers.mint(t, pool.account(), Amount::new(*r).unwrap());
        ledgers.mint(t, &arb, Amount::new(1e9).unwrap());
    }
    c.bench_function("arbitrage_step", |b| b.iter(|| arbitrage_step(&pool, black_box(2100.0), &arb, &ledgers)));
}

fn probes(c: &mut Criterion) {
    let mut group = c.benchmark_group("probe");
    group.sample_size(10);
    for name in presets::NAMES {
        let cfg = presets::builtin(name).unwrap().unwrap();
        group.bench_with_input(BenchmarkId::new("classify", name), &cfg, |b, cfg| {
            b.iter(|| probe::classify(cfg, black_box(1)))
        });
    }
    let cfg = presets::builtin("dodo-like").unwrap().unwrap();
    group.bench_function("path_independence/dodo-like", |b| {
        b.iter(|| probe::run_dimension_probe(&cfg, Dimension::PathIndependence, black_box(1), 200))
    });
    group.finish();
}

criterion_group!(benches, quotes, stableswap, arbitrage, probes);
criterion_main!(benches);
