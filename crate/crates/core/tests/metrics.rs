use iftr::metrics::*;
use iftr::model::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn params() -> impl Strategy<Value = IftrParams> {
    (0.05f64..20.0, 0.5f64..20.0, 0.5f64..20.0, 0.0f64..20.0, 0.0f64..=1.0)
        .prop_map(|(gb, m1, m2, k, d)| IftrParams::new(gb, m1, m2, k, d).unwrap())
}

#[test]
fn capacity_matches_density_quadrature() {
    for &(gb, m1, m2, k, d) in &[
        (1.0, 8.0, 5.0, 10.0, 0.5),
        (10.0, 2.0, 3.0, 2.0, 0.9),
        (0.3, 0.6, 12.0, 20.0, 0.1),
        (100.0, 15.7, 5.1, 10.0, 0.5),
    ] {
        let p = IftrParams::new(gb, m1, m2, k, d).unwrap();
        let mix = build_mixture(&p, 400).unwrap();
        let h = |x: f64| x.ln_1p() / std::f64::consts::LN_2;
        let kernel = MetricKernel { a: 0.0, b: f64::INFINITY, h: &h };
        let direct = mix.average(&kernel, 1e-10).unwrap();
        let closed = capacity_from_mixture(&mix).unwrap();
        assert!(rel(closed, direct) < 1e-8, "gb={gb}: {closed} vs {direct}");
    }
}

#[test]
fn ber_matches_density_quadrature() {
    let bpsk = ModulationSpec::bpsk();
    let qam = ModulationSpec::new(vec![(0.75, 0.2), (0.5, 1.8)]).unwrap();
    for &(gb, d) in &[(1.0, 0.1), (10.0, 0.5), (300.0, 0.9)] {
        let p = IftrParams::new(gb, 15.7, 5.1, 10.0, d).unwrap();
        let mix = build_mixture(&p, 400).unwrap();
        for m in [&bpsk, &qam] {
            let h = |x: f64| m.conditional(x);
            let kernel = MetricKernel { a: 0.0, b: f64::INFINITY, h: &h };
            let direct = mix.average(&kernel, 1e-11).unwrap();
            let closed = ber_from_mixture(&mix, m);
            assert!(rel(closed, direct) < 1e-8, "gb={gb} d={d}: {closed} vs {direct}");
        }
    }
}

#[test]
fn capacity_grows_with_snr() {
    let shape = IftrParams::new(1.0, 3.0, 2.0, 6.0, 0.7).unwrap();
    let mut last = 0.0;
    for db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
        let p = shape.with_gamma_bar(10f64.powf(db / 10.0)).unwrap();
        let c = avg_capacity(&p, 200).unwrap();
        assert!(c > last);
        last = c;
    }
}

#[test]
fn ber_limits() {
    let bpsk = ModulationSpec::bpsk();
    let tiny = IftrParams::new(1e-9, 4.0, 2.0, 8.0, 0.5).unwrap();
    assert!((avg_ber(&tiny, &bpsk, 100).unwrap() - 0.5).abs() < 1e-4);
    // Θ(1/γ̄): doubling γ̄ halves the asymptote
    let hi = IftrParams::new(1e6, 4.0, 2.0, 8.0, 0.5).unwrap();
    let a = avg_ber_asymptotic(&hi, &bpsk).unwrap();
    let b = avg_ber_asymptotic(&hi.with_gamma_bar(2e6).unwrap(), &bpsk).unwrap();
    assert!(rel(a / b, 2.0) < 1e-5);
    let exact = avg_ber(&hi, &bpsk, 400).unwrap();
    assert!(rel(a, exact) < 1e-3);
}

#[test]
fn cci_monotonicity_grid() {
    let p = IftrParams::new(3.0, 3.0, 30.0, 5.0, 0.5).unwrap();
    for l in 1..=3 {
        for &pi in &[0.5, 1.0, 2.0] {
            for &r in &[0.3, 1.0, 3.0] {
                let at = |n: usize, pi: f64, r: f64| {
                    outage_cci(&p, &CciScenario::new(n, l, pi, r).unwrap()).unwrap()
                };
                let base = at(2, pi, r);
                assert!((0.0..=1.0).contains(&base));
                assert!(at(3, pi, r) <= base);
                assert!(at(2, pi * 1.5, r) >= base);
                assert!(at(2, pi, r * 1.5) >= base);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn transfer_reproduces_direct_forms(p in params(), th in 0.01f64..5.0) {
        let mix = build_mixture(&p, 200).unwrap();
        let bpsk = ModulationSpec::bpsk();

        let c = mix.nakagami_transfer(|mean, m| nakagami::capacity(mean, m).unwrap());
        let direct = capacity_from_mixture(&mix).unwrap();
        prop_assert!(rel(c, direct) < 1e-8, "capacity {} vs {}", c, direct);

        let b = mix.nakagami_transfer(|mean, m| nakagami::ber(mean, m, &bpsk).unwrap());
        let direct = ber_from_mixture(&mix, &bpsk);
        prop_assert!(rel(b, direct) < 1e-8, "ber {} vs {}", b, direct);

        let o = mix.nakagami_transfer(|mean, m| nakagami::outage(mean, m, th).unwrap());
        let direct = mix.cdf(th);
        prop_assert!((o - direct).abs() < 1e-8 * direct.max(1e-300) || (o - direct).abs() < 1e-300);
    }

    #[test]
    fn capacity_below_jensen_bound(p in params()) {
        let mix = build_mixture(&p, 200).unwrap();
        let mean: f64 = mix
            .weights()
            .iter()
            .enumerate()
            .map(|(j, a)| a * (j + 1) as f64)
            .sum::<f64>()
            * mix.scale();
        prop_assert!(capacity_from_mixture(&mix).unwrap() <= (1.0 + mean).log2() + 1e-9);
    }

    #[test]
    fn outage_is_monotone(p in params(), th in 0.01f64..5.0, f in 1.0f64..4.0) {
        let lo = outage(&p, th, 200).unwrap();
        prop_assert!(outage(&p, th * f, 200).unwrap() >= lo - 1e-15);
        let brighter = p.with_gamma_bar(p.gamma_bar() * f).unwrap();
        prop_assert!(outage(&brighter, th, 200).unwrap() <= lo + 1e-15);
    }

    #[test]
    fn ber_is_bounded_and_monotone(p in params(), f in 1.0f64..10.0) {
        let bpsk = ModulationSpec::bpsk();
        let b = avg_ber(&p, &bpsk, 200).unwrap();
        prop_assert!(b > 0.0 && b <= 0.5);
        let brighter = p.with_gamma_bar(p.gamma_bar() * f).unwrap();
        prop_assert!(avg_ber(&brighter, &bpsk, 200).unwrap() <= b * (1.0 + 1e-12));
    }
}
