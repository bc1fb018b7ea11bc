use bec_entanglement::scaling::{critical_exponents, fit_power_law};
use bec_entanglement::spectral::{build_hamiltonian_with, ground_state, jz_moments, Coupling};
use bec_entanglement::{CouplingConvention, SystemSize};
use proptest::prelude::*;

fn even_size(max_half: u32) -> impl Strategy<Value = SystemSize> {
    (1..=max_half).prop_map(|h| SystemSize::new(2 * h).unwrap())
}

/// Zero, or log-uniform on `[1e-6, 1e2]`.
fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        9 => (-6.0f64..2.0).prop_map(|e| 10f64.powf(e)),
    ]
}

fn convention() -> impl Strategy<Value = CouplingConvention> {
    prop_oneof![
        Just(CouplingConvention::SpinOperator),
        Just(CouplingConvention::PairHopping)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn ground_state_invariants(n in even_size(200), omega in coupling(), conv in convention()) {
        let h = build_hamiltonian_with(n, Coupling::new(omega).unwrap(), conv);
        let c = ground_state(&h).unwrap();
        prop_assert!((c.norm_sq() - 1.0).abs() <= 1e-12, "norm {}", c.norm_sq());

        let a = &c.amplitudes;
        for k in 0..a.len() {
            prop_assert!((a[k] - a[a.len() - 1 - k]).abs() <= 1e-10);
        }
        let m = jz_moments(&c, n);
        prop_assert!(m.mean.abs() <= 1e-10, "mean {}", m.mean);
        prop_assert!(m.fluct >= 0.0);

        let r = c.residual(&h);
        prop_assert!(r <= 1e-10 * c.energy.abs().max(1.0), "residual {r}");
    }

    #[test]
    fn entropy_is_bounded_and_positive_off_zero(n in even_size(200), omega in coupling()) {
        let (_, obs) = bec_entanglement::spectral::solve_point(n, omega, CouplingConvention::SpinOperator).unwrap();
        prop_assert!((0.0..=1.0).contains(&obs.entropy));
        if omega == 0.0 {
            prop_assert_eq!(obs.entropy, 0.0);
        } else {
            prop_assert!(obs.entropy > 0.0);
        }
    }

    #[test]
    fn power_law_is_recovered_exactly(
        a in 1e-3f64..1e3,
        b in -3.0f64..3.0,
        // closely spaced sizes make the log-log system ill-conditioned
        ns in prop::collection::btree_set(2u32..100_000, 3..10)
            .prop_filter("sizes span a decade", |s| s.last().unwrap() / s.first().unwrap() >= 10),
    ) {
        let points: Vec<(f64, f64)> = ns.iter().map(|&n| (f64::from(n), a * f64::from(n).powf(b))).collect();
        let fit = fit_power_law(&points).unwrap();
        prop_assert!((fit.exponent - b).abs() < 1e-12, "exponent {} vs {b}", fit.exponent);
        prop_assert!(((fit.prefactor - a) / a).abs() < 1e-12, "prefactor {} vs {a}", fit.prefactor);
        prop_assert!(fit.rms_log_residual < 1e-12);
    }

    #[test]
    fn fit_is_scale_equivariant(
        s in 1e-4f64..1e4,
        values in prop::collection::vec(1e-3f64..1e3, 6),
    ) {
        let ns = [240.0, 400.0, 700.0, 1000.0, 2100.0, 2700.0];
        let points: Vec<(f64, f64)> = ns.iter().copied().zip(values.iter().copied()).collect();
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n, s * v)).collect();
        let f = fit_power_law(&points).unwrap();
        let g = fit_power_law(&scaled).unwrap();
        prop_assert!((g.exponent - f.exponent).abs() < 1e-12);
        prop_assert!((g.prefactor / (s * f.prefactor) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_invert_the_fits(bw in 0.2f64..3.0, bc in 0.1f64..3.0) {
        let fit = |b: f64| bec_entanglement::PowerLawFit { prefactor: 1.0, exponent: b, rms_log_residual: 0.0 };
        let e = critical_exponents(&fit(-bw), &fit(bc)).unwrap();
        prop_assert!((e.nu * bw - 1.0).abs() < 1e-14);
        prop_assert!((e.gamma / e.nu - bc).abs() < 1e-12);
    }
}

#[test]
fn critical_exponent_examples() {
    let fit = |b: f64| bec_entanglement::PowerLawFit {
        prefactor: 1.0,
        exponent: b,
        rms_log_residual: 0.0,
    };
    let e = critical_exponents(&fit(-0.989062), &fit(0.846662)).unwrap();
    assert!((e.nu - 1.0110589).abs() < 1e-6);
    assert!((e.gamma - 0.8560252).abs() < 1e-6);
    let e = critical_exponents(&fit(-0.5), &fit(0.25)).unwrap();
    assert_eq!((e.nu, e.gamma), (2.0, 0.5));
    assert!(critical_exponents(&fit(0.5), &fit(0.25)).is_err());
    assert!(critical_exponents(&fit(-0.5), &fit(-0.25)).is_err());
}

#[test]
fn fit_example_and_rejections() {
    let fit = fit_power_law(&[(10.0f64, 0.2f64), (100.0, 0.02), (1000.0, 0.002)]).unwrap();
    assert!((fit.prefactor - 2.0).abs() < 1e-12);
    assert!((fit.exponent + 1.0).abs() < 1e-12);
    assert!(fit.rms_log_residual < 1e-12);
    assert!(fit_power_law(&[(10.0, 0.2), (100.0, 0.02)]).is_err());
    assert!(fit_power_law(&[(10.0, 0.2), (100.0, 0.0), (1000.0, 0.002)]).is_err());
    assert!(fit_power_law(&[(10.0, 0.2), (10.0, 0.02), (1000.0, 0.002)]).is_err());
}
