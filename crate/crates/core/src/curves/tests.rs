use super::*;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

const CP: CurveSpec = CurveSpec::ConstantProduct;
const CS: CurveSpec = CurveSpec::ConstantSum;

#[test]
fn invariant_examples() {
    assert_eq!(invariant_value(&CP, &[100.0, 100.0]).unwrap(), 10000.0);
    let gm = CurveSpec::GeometricMean { weights: vec![0.5, 0.5] };
    assert!(close(invariant_value(&gm, &[100.0, 100.0]).unwrap(), 100.0, 1e-12));
    let lmsr = CurveSpec::Lmsr { b: 100.0 };
    assert!((invariant_value(&lmsr, &[0.0, 0.0]).unwrap() - 69.3147).abs() < 1e-4);
    let cps = CurveSpec::ConstantProductSum { chi: 3.0 };
    assert!(close(invariant_value(&cps, &[100.0, 100.0]).unwrap(), 200.0, 1e-12));
}

#[test]
fn invariant_rejects_price_adoption_and_bad_reserves() {
    let pa = CurveSpec::PriceAdoption { k: 0.5, target_reserves: vec![1.0, 1.0] };
    assert!(matches!(invariant_value(&pa, &[1.0, 1.0]), Err(CurveError::Unsupported(_))));
    assert!(matches!(invariant_value(&CP, &[0.0, 1.0]), Err(CurveError::Domain(_))));
    assert!(matches!(invariant_value(&CP, &[-1.0, 1.0]), Err(CurveError::Domain(_))));
}

#[test]
fn spot_examples() {
    assert!(close(spot_price(&CP, &[100.0, 200.0], 0, 1, None).unwrap(), 2.0, 1e-15));
    let gm = CurveSpec::GeometricMean { weights: vec![0.8, 0.2] };
    assert!(close(spot_price(&gm, &[80.0, 20.0], 0, 1, None).unwrap(), 1.0, 1e-15));
    let lmsr = CurveSpec::Lmsr { b: 100.0 };
    assert!(close(spot_price(&lmsr, &[0.0, 0.0], 0, 2, None).unwrap(), 0.5, 1e-15));
    // price of the base token in quote units at a 20% shortfall
    let pa = CurveSpec::PriceAdoption { k: 0.5, target_reserves: vec![100.0, 1000.0] };
    let spot = spot_price(&pa, &[80.0, 1000.0], 1, 0, Some(10.0)).unwrap();
    assert!(close(1.0 / spot, 11.0, 1e-12));
    assert!(matches!(spot_price(&pa, &[80.0, 1000.0], 1, 0, None), Err(CurveError::MissingOraclePrice)));
}

#[test]
fn constant_sum_spot_is_one_even_when_depleted() {
    assert_eq!(spot_price(&CS, &[0.0, 10.0], 0, 1, None).unwrap(), 1.0);
}

#[test]
fn exact_in_examples() {
    let dy = quote_exact_in(&CP, &[100.0, 100.0], 0, 1, 10.0, None).unwrap();
    assert!(close(dy, 100.0 - 10000.0 / 110.0, 1e-12));
    assert!(close(quote_exact_in(&CS, &[100.0, 100.0], 0, 1, 10.0, None).unwrap(), 10.0, 1e-12));
    let cps = CurveSpec::ConstantProductSum { chi: 0.0 };
    assert!(close(quote_exact_in(&cps, &[100.0, 100.0], 0, 1, 10.0, None).unwrap(), dy, 1e-9));
    let lmsr = CurveSpec::Lmsr { b: 100.0 };
    let dx = 100.0 * ((0.1f64.exp() + 1.0) / 2.0).ln();
    let s = quote_exact_in(&lmsr, &[0.0, 0.0], 2, 0, dx, None).unwrap();
    assert!((s - 10.0).abs() < 1e-9);
}

#[test]
fn exact_out_examples() {
    let dy = 100.0 - 10000.0 / 110.0;
    assert!(close(quote_exact_out(&CP, &[100.0, 100.0], 0, 1, dy, None).unwrap(), 10.0, 1e-12));
    assert!(close(quote_exact_out(&CS, &[100.0, 100.0], 0, 1, 10.0, None).unwrap(), 10.0, 1e-12));
    assert_eq!(quote_exact_out(&CP, &[100.0, 100.0], 0, 1, 0.0, None).unwrap(), 0.0);
    assert!(matches!(
        quote_exact_out(&CP, &[100.0, 100.0], 0, 1, 100.0, None),
        Err(CurveError::Depleted { .. })
    ));
}

#[test]
fn constant_sum_depletes_to_exactly_zero() {
    assert_eq!(quote_exact_in(&CS, &[100.0, 50.0], 0, 1, 50.0, None).unwrap(), 50.0);
    assert!(matches!(quote_exact_in(&CS, &[100.0, 50.0], 0, 1, 50.1, None), Err(CurveError::Depleted { .. })));
}

#[test]
fn negative_amount_is_domain_error() {
    assert!(matches!(quote_exact_in(&CP, &[1.0, 1.0], 0, 1, -1.0, None), Err(CurveError::Domain(_))));
}

#[test]
fn bad_pairs_rejected() {
    assert!(matches!(quote_exact_in(&CP, &[1.0, 1.0], 0, 0, 1.0, None), Err(CurveError::InvalidIndex { .. })));
    assert!(matches!(quote_exact_in(&CP, &[1.0, 1.0], 0, 2, 1.0, None), Err(CurveError::InvalidIndex { .. })));
    let lmsr = CurveSpec::Lmsr { b: 10.0 };
    assert!(matches!(quote_exact_in(&lmsr, &[1.0, 1.0], 0, 1, 1.0, None), Err(CurveError::Unsupported(_))));
}

#[test]
fn validate_rejects_out_of_domain_parameters() {
    assert!(CurveSpec::GeometricMean { weights: vec![0.5, 0.6] }.validate(2).is_err());
    assert!(CurveSpec::GeometricMean { weights: vec![0.5, 0.5] }.validate(3).is_err());
    assert!(CurveSpec::ConstantPowerSum { t: 1.0 }.validate(2).is_err());
    assert!(CurveSpec::ConstantProductSum { chi: -1.0 }.validate(2).is_err());
    assert!(CurveSpec::Lmsr { b: 0.0 }.validate(2).is_err());
    assert!(CurveSpec::PriceAdoption { k: 1.5, target_reserves: vec![1.0, 1.0] }.validate(2).is_err());
    assert!(CurveSpec::Exponential { kappa: 0.0, c: 1.0 }.validate(2).is_err());
}

#[test]
fn exponential_dispatch() {
    let spec = CurveSpec::Exponential { kappa: 2.0, c: 1.0 };
    // 100 reserve in at zero supply mints 10
    assert!(close(quote_exact_in(&spec, &[0.0, 0.0], 0, 1, 100.0, None).unwrap(), 10.0, 1e-12));
    assert!(close(quote_exact_in(&spec, &[100.0, 10.0], 1, 0, 10.0, None).unwrap(), 100.0, 1e-12));
    assert!(close(quote_exact_out(&spec, &[100.0, 10.0], 0, 1, 1.0, None).unwrap(), 21.0, 1e-12));
    assert!(close(invariant_value(&spec, &[100.0, 10.0]).unwrap(), 1.0, 1e-15));
}

#[test]
fn power_sum_small_t_approaches_constant_sum() {
    let ps = CurveSpec::ConstantPowerSum { t: 1e-9 };
    let a = quote_exact_in(&ps, &[120.0, 80.0], 0, 1, 7.0, None).unwrap();
    assert!(close(a, 7.0, 1e-6));
}

#[test]
fn power_sum_closed_form() {
    let t = 0.4;
    let e = 1.0 - t;
    let spec = CurveSpec::ConstantPowerSum { t };
    let (x, y, dx) = (120.0f64, 80.0f64, 15.0f64);
    let expected = y - (x.powf(e) + y.powf(e) - (x + dx).powf(e)).powf(1.0 / e);
    assert!(close(quote_exact_in(&spec, &[x, y], 0, 1, dx, None).unwrap(), expected, 1e-11));
}

fn positive() -> impl Strategy<Value = f64> {
    (0.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

fn conservation_specs() -> Vec<CurveSpec> {
    vec![
        CurveSpec::ConstantProduct,
        CurveSpec::GeometricMean { weights: vec![0.3, 0.7] },
        CurveSpec::ConstantSum,
        CurveSpec::ConstantProductSum { chi: 5.0 },
        CurveSpec::ConstantPowerSum { t: 0.5 },
    ]
}

proptest! {
    #[test]
    fn zero_fee_swaps_conserve(x in positive(), y in positive(), frac in 1e-6f64..0.5) {
        for spec in conservation_specs() {
            let r = [x, y];
            let dx = frac * x.min(y);
            let dy = quote_exact_in(&spec, &r, 0, 1, dx, None).unwrap();
            let before = invariant_value(&spec, &r).unwrap();
            let after = invariant_value(&spec, &[x + dx, y - dy]).unwrap();
            prop_assert!(close(before, after, 1e-9), "{}: {before} vs {after}", spec.name());
        }
    }

    #[test]
    fn exact_out_inverts_exact_in(x in positive(), y in positive(), frac in 1e-6f64..0.5) {
        for spec in conservation_specs() {
            let r = [x, y];
            let dx = frac * x.min(y);
            let dy = quote_exact_in(&spec, &r, 0, 1, dx, None).unwrap();
            let back = quote_exact_out(&spec, &r, 0, 1, dy, None).unwrap();
            prop_assert!(close(back, dx, 1e-9), "{}: {back} vs {dx}", spec.name());
        }
    }

    #[test]
    fn product_sum_limits(x in positive(), y in positive(), frac in 1e-4f64..0.5) {
        let r = [x, y];
        let dx = frac * x.min(y);
        let cp = quote_exact_in(&CP, &r, 0, 1, dx, None).unwrap();
        let zero = quote_exact_in(&CurveSpec::ConstantProductSum { chi: 0.0 }, &r, 0, 1, dx, None).unwrap();
        prop_assert!(close(zero, cp, 1e-9));
        if dx < 0.5 * y {
            let cs = quote_exact_in(&CS, &r, 0, 1, dx, None).unwrap();
            let big = quote_exact_in(&CurveSpec::ConstantProductSum { chi: 1e6 }, &r, 0, 1, dx, None).unwrap();
            prop_assert!(close(big, cs, 1e-4), "{big} vs {cs}");
        }
    }

    #[test]
    fn equal_weights_match_product(x in positive(), y in positive(), frac in 1e-6f64..0.5) {
        let gm = CurveSpec::GeometricMean { weights: vec![0.5, 0.5] };
        let dx = frac * x;
        let a = quote_exact_in(&gm, &[x, y], 0, 1, dx, None).unwrap();
        let b = quote_exact_in(&CP, &[x, y], 0, 1, dx, None).unwrap();
        prop_assert!(close(a, b, 1e-12));
        prop_assert!(close(b, y * dx / (x + dx), 1e-12));
    }

    #[test]
    fn spot_matches_small_trade(x in positive(), y in positive()) {
        for spec in conservation_specs() {
            let r = [x, y];
            let eps = 1e-6 * x.min(y);
            let mean = quote_exact_in(&spec, &r, 0, 1, eps, None).unwrap() / eps;
            let spot = spot_price(&spec, &r, 0, 1, None).unwrap();
            prop_assert!(close(mean, spot, 1e-4), "{}: {mean} vs {spot}", spec.name());
        }
    }

    #[test]
    fn lmsr_prices_and_baskets(z in prop::collection::vec(0.0f64..30.0, 2..6), b in 1.0f64..200.0, a in 0.0f64..1000.0) {
        let q: Vec<f64> = z.iter().map(|v| v * b).collect();
        let p = lmsr::prices(b, &q).unwrap();
        prop_assert!(p.iter().all(|v| *v > 0.0 && *v < 1.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let cost = lmsr_trade_cost(b, &q, &vec![a; q.len()]).unwrap();
        prop_assert!((cost - a).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn lmsr_buy_then_sell_returns_collateral(q in prop::collection::vec(0.0f64..300.0, 2..5), dx in 0.01f64..100.0) {
        let spec = CurveSpec::Lmsr { b: 50.0 };
        let n = q.len();
        let shares = quote_exact_in(&spec, &q, n, 0, dx, None).unwrap();
        let mut after = q.clone();
        after[0] += shares;
        let back = quote_exact_in(&spec, &after, 0, n, shares, None).unwrap();
        prop_assert!(close(back, dx, 1e-9));
        let cost = quote_exact_out(&spec, &q, n, 0, shares, None).unwrap();
        prop_assert!(close(cost, dx, 1e-9));
    }

    #[test]
    fn bonding_round_trip(kappa in 0.5f64..4.0, c in 0.1f64..10.0, s in 0.0f64..1e3, d in 0.0f64..1e3) {
        let up = bonding_trade(kappa, c, s, d).unwrap();
        let down = bonding_trade(kappa, c, s + d, -d).unwrap();
        prop_assert!(close(up, down, 1e-12));
    }

    #[test]
    fn stableswap_newton_matches_bisection(r in prop::collection::vec(1e-2f64..1e6, 2..5), chi in 0.0f64..1e4) {
        let d = solve_stableswap_d(&r, chi).unwrap();
        prop_assert!(d.newton_iterations <= solver::MAX_NEWTON_ITERATIONS);
        let sum: f64 = r.iter().sum();
        let prod: f64 = r.iter().product();
        let (mut lo, mut hi) = (0.0, sum);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if stableswap::residual(mid, sum, prod, chi, r.len()).0 > 0.0 { lo = mid } else { hi = mid }
        }
        prop_assert!(close(d.value, 0.5 * (lo + hi), 1e-10), "{} vs {}", d.value, 0.5 * (lo + hi));
    }
}
