use pbg_fluorescence::params::{compute_beta, RawCouplingConstants, UnitReference};
use pbg_fluorescence::{normalize, Error, PhysicalParams, Reservoir};
use proptest::prelude::*;

fn band(beta: f64, omega_c: f64, omega_a: f64, rabi: f64) -> PhysicalParams {
    PhysicalParams::resonant(omega_a, rabi, Reservoir::band_edge(beta, omega_c).unwrap()).unwrap()
}

#[test]
fn normalize_band_edge_divides_by_beta() {
    let n = normalize(&band(2.0, 200.0, 200.54, 0.5));
    assert_eq!(n.scale, 2.0);
    assert_eq!(n.params.reservoir(), Reservoir::band_edge(1.0, 100.0).unwrap());
    assert!((n.params.omega_a() - 100.27).abs() < 1e-12);
    assert_eq!(n.params.rabi(), 0.25);
    assert_eq!(n.unit.reference, UnitReference::Beta);
    assert_eq!(n.unit.to_string(), "beta");
}

#[test]
fn normalize_free_space_divides_by_gamma() {
    let p = PhysicalParams::detuned(1000.0, 10.0, 50.0, Reservoir::free_space(5.0).unwrap()).unwrap();
    let n = normalize(&p);
    assert_eq!(n.params.rabi(), 10.0);
    assert_eq!(n.params.delta(), 2.0);
    assert_eq!(n.params.reservoir(), Reservoir::free_space(1.0).unwrap());
}

#[test]
fn unnormalized_unit_is_labelled() {
    let p = band(2.0, 200.0, 210.0, 0.5);
    assert_eq!(p.unit().to_string(), "0.5 beta");
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(Reservoir::band_edge(0.0, 100.0), Err(Error::InvalidParameter { .. })));
    assert!(matches!(Reservoir::band_edge(1.0, -1.0), Err(Error::InvalidParameter { .. })));
    assert!(matches!(Reservoir::free_space(f64::NAN), Err(Error::InvalidParameter { .. })));
    let r = Reservoir::band_edge(1.0, 100.0).unwrap();
    assert!(PhysicalParams::resonant(100.27, -0.1, r).is_err());
    assert!(PhysicalParams::resonant(f64::INFINITY, 0.1, r).is_err());
    // delta must equal omega_l - omega_a
    assert!(PhysicalParams::new(100.0, 101.0, 0.5, 0.1, r).is_err());
    assert!(PhysicalParams::new(100.0, 101.0, 1.0, 0.1, r).is_ok());
}

#[test]
fn beta_from_raw_constants() {
    // all unit inputs: beta = (1/(6π))^{2/3}
    let raw = RawCouplingConstants {
        dipole_moment: 1.0,
        model_constant: 1.0,
        eta: 1.0,
        omega_a: 1.0,
        hbar: 1.0,
        epsilon0: 1.0,
    };
    let beta = compute_beta(&raw).unwrap();
    assert!((beta - 0.141_188_476_272_903).abs() < 1e-14);
    let bad = RawCouplingConstants { eta: 0.0, ..raw };
    assert!(compute_beta(&bad).is_err());
}

#[test]
fn config_round_trip() {
    let p = band(1.0, 100.0, 100.27, 0.25);
    let json = serde_json::to_string(&p).unwrap();
    let back: PhysicalParams = serde_json::from_str(&json).unwrap();
    assert_eq!(p, back);
    let bad = json.replace("\"rabi\"", "\"rabbi\"");
    assert!(serde_json::from_str::<PhysicalParams>(&bad).is_err());
}

proptest! {
    #[test]
    fn normalize_is_idempotent(beta in 0.1f64..10.0, wc in 1.0f64..500.0, off in 0.01f64..100.0, rabi in 0.0f64..5.0) {
        let n1 = normalize(&band(beta, wc, wc + off, rabi));
        let n2 = normalize(&n1.params);
        prop_assert_eq!(n2.scale, 1.0);
        prop_assert_eq!(n1.params, n2.params);
    }

    #[test]
    fn normalize_is_scale_invariant(beta in 0.1f64..10.0, wc in 1.0f64..500.0, off in 0.01f64..100.0, rabi in 0.0f64..5.0, s in 0.1f64..10.0) {
        let a = normalize(&band(beta, wc, wc + off, rabi)).params;
        let b = normalize(&band(beta * s, wc * s, (wc + off) * s, rabi * s)).params;
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
        prop_assert!(close(a.omega_a(), b.omega_a()));
        prop_assert!(close(a.rabi(), b.rabi()));
        prop_assert!(close(a.reservoir().scale(), b.reservoir().scale()));
    }
}
