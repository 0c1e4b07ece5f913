use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DVector};
use proptest::prelude::*;
use rydgate::gate::{
    bell_fidelity, cz_fidelity, evolve_sector, pulse_duration, sector_hamiltonian, BlockadeMode, GateParams,
    PropagatorConfig, Sector,
};

type C = Complex<f64>;

fn wrap(p: f64) -> f64 {
    (p + PI).rem_euclid(TAU) - PI
}

fn lossless_perfect() -> GateParams {
    GateParams::calibrated(7.0, 0.0, 0.0, BlockadeMode::Perfect).unwrap()
}

fn delta_tau(p: &GateParams) -> f64 {
    p.delta_mhz * TAU * p.tau_ns * 1e-3
}

#[test]
fn calibrated_gate_meets_its_conditions() {
    let p = lossless_perfect();
    let cfg = PropagatorConfig::default();
    let r = bell_fidelity(&p, &cfg).unwrap();
    assert!(r.amplitudes[1].norm_sqr() > 1.0 - 1e-9);
    assert!(r.amplitudes[3].norm_sqr() > 1.0 - 1e-9);
    let cz = wrap(r.phases[3] - 2.0 * (r.phases[1] - r.phases[0]) - PI);
    assert!(cz.abs() < 1e-8, "{cz}");
    assert!(wrap(r.phases[3] - delta_tau(&p)).abs() < 1e-6);
    assert!(r.fidelity > 0.9999);
}

#[test]
fn headline_duration() {
    let p = lossless_perfect();
    assert_eq!(p.tau_ns, pulse_duration(7.0, p.delta_mhz).unwrap());
    assert!(p.tau_ns > 90.0 && p.tau_ns < 100.0);
}

#[test]
fn bb_phase_ignores_the_laser_phase_jump() {
    let base = lossless_perfect();
    let cfg = PropagatorConfig::default();
    let target = delta_tau(&base);
    for k in 0..36 {
        let p = GateParams {
            xi: TAU * k as f64 / 36.0,
            ..base
        };
        let amp = evolve_sector(Sector::BB, &p, &cfg).unwrap().return_amplitude();
        assert!((amp.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(wrap(amp.arg() - target).abs() < 1e-6, "ξ = {}", p.xi);
    }
}

#[test]
fn probability_is_conserved_with_decay() {
    let p = GateParams::calibrated(7.0, 30.0, 1.0 / 150.0, BlockadeMode::Finite).unwrap();
    let cfg = PropagatorConfig::default();
    for sector in [Sector::AA, Sector::AB, Sector::BB] {
        let evo = evolve_sector(sector, &p, &cfg).unwrap();
        for (pops, lost) in evo.populations.iter().zip(&evo.decayed) {
            let total: f64 = pops.iter().sum::<f64>() + lost;
            assert!((total - 1.0).abs() < 1e-9, "{sector:?}: {total}");
        }
        if sector != Sector::AA {
            assert!(*evo.decayed.last().unwrap() > 0.0);
        }
    }
}

#[test]
fn stepping_matches_matrix_exponential() {
    let cfg = PropagatorConfig::default();
    for (delta_r, gamma) in [(30.0, 1.0 / 150.0), (-45.0, 0.0), (60.0, 0.05)] {
        let p = GateParams::calibrated(7.0, delta_r, gamma, BlockadeMode::Finite).unwrap();
        let tau = p.tau_ns * 1e-3;
        for sector in [Sector::AB, Sector::BB] {
            let exp = |pulse: usize| (sector_hamiltonian(sector, &p, pulse) * C::new(0.0, -tau)).exp();
            let u = exp(1) * exp(0);
            let mut psi0 = DVector::<C>::zeros(u.nrows());
            psi0[0] = C::new(1.0, 0.0);
            let oracle = &u * &psi0;
            let stepped = evolve_sector(sector, &p, &cfg).unwrap().final_state;
            assert!((stepped - oracle).norm() < 1e-8, "{sector:?} δ_R = {delta_r}");
        }
    }
}

#[test]
fn fidelity_is_independent_of_stark_phase() {
    let base = GateParams::calibrated(7.0, 40.0, 1.0 / 150.0, BlockadeMode::Finite).unwrap();
    let cfg = PropagatorConfig::default();
    let f0 = bell_fidelity(&base, &cfg).unwrap().fidelity;
    for phi in [0.3, 1.7, -2.5] {
        let f = bell_fidelity(&GateParams { stark_phase: phi, ..base }, &cfg).unwrap().fidelity;
        assert!((f - f0).abs() < 1e-9, "φ_a = {phi}");
    }
}

#[test]
fn double_excitation_shrinks_with_blockade() {
    let cfg = PropagatorConfig::default();
    let peak = |delta_r: f64| {
        let p = GateParams::calibrated(7.0, delta_r, 0.0, BlockadeMode::Finite).unwrap();
        let evo = evolve_sector(Sector::BB, &p, &cfg).unwrap();
        evo.populations.iter().map(|row| row[2]).fold(0.0, f64::max)
    };
    let (p30, p60) = (peak(30.0), peak(60.0));
    assert!(p30 > 1e-4 && p30 < 0.1, "{p30}");
    assert!(p60 < p30);
}

#[test]
fn oversized_fixed_step_is_refused() {
    let p = lossless_perfect();
    let cfg = PropagatorConfig {
        step_us: Some(0.05),
        ..PropagatorConfig::default()
    };
    assert!(evolve_sector(Sector::AB, &p, &cfg).is_err());
}

fn amplitude() -> impl Strategy<Value = C> {
    (0.0f64..=1.0, 0.0f64..TAU).prop_map(|(r, a)| C::from_polar(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fidelity_bounds(c in prop::array::uniform4(amplitude())) {
        let f = cz_fidelity(&c);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn gate_fidelity_bounds(omega in 1.0f64..15.0, delta_r in -80.0f64..80.0, gamma in 0.0f64..0.1) {
        prop_assume!(delta_r.abs() > 1.0);
        let p = GateParams::calibrated(omega, delta_r, gamma, BlockadeMode::Finite).unwrap();
        let r = bell_fidelity(&p, &PropagatorConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
        for leak in r.leakage {
            prop_assert!(leak > -1e-9);
        }
    }
}

#[test]
fn cz_target_has_unit_fidelity() {
    let c = [C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(-1.0, 0.0), C::new(-1.0, 0.0)];
    assert!((cz_fidelity(&c) - 1.0).abs() < 1e-12);
}
