//! Property-based invariants of states, spectra and propagation.

mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use common::gaussian_overlap_sqr;
use oam_ring::observables::{circular_centroid, fidelity, population_imbalance, Readout, Weight};
use oam_ring::propagator::{evolve_linear, half_revival_superposition, FluxSpec};
use oam_ring::spectrum::{
    corrected_dispersion, ideal_dispersion, Corrections, DispersionModel, Trap,
};
use oam_ring::state::{gaussian_packet, rotate, to_grid, to_spectral, wrap_angle};

fn packet() -> impl Strategy<Value = (f64, f64)> {
    (-PI..PI, 0.05..0.8f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_compose((c, w) in packet(), a in -7.0..7.0f64, b in -7.0..7.0f64) {
        let psi = gaussian_packet(c, w, 96).unwrap();
        let two = rotate(&rotate(&psi, a), b);
        let one = rotate(&psi, a + b);
        for (x, y) in two.amplitudes().iter().zip(one.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn evolution_preserves_norm((c, w) in packet(), t in 0.0..20.0f64, angle in -3.0..3.0f64) {
        let psi = gaussian_packet(c, w, 96).unwrap();
        let trap = Trap { eccentricity: 0.2, tilt_amplitude: 0.02, ..Trap::circular(50.0) };
        let model = corrected_dispersion(&trap, 96, Corrections::ALL).unwrap();
        let out = evolve_linear(&psi, t, &model, Some(&FluxSpec::new(angle))).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centroid_is_equivariant((c, w) in packet(), a in -PI..PI) {
        let psi = gaussian_packet(c, w, 96).unwrap();
        let c0 = circular_centroid(&psi).unwrap();
        let c1 = circular_centroid(&rotate(&psi, a)).unwrap();
        prop_assert!(wrap_angle(c1 - c0 - a).abs() < 1e-10);
    }

    #[test]
    fn grid_round_trip((c, w) in packet()) {
        let psi = gaussian_packet(c, w, 128).unwrap();
        let back = to_spectral(&to_grid(&psi, 512).unwrap(), 128).unwrap();
        prop_assert!((1.0 - fidelity(&psi, &back).unwrap()) < 1e-13);
    }

    #[test]
    fn dispersion_is_even(ecc in 0.0..0.5f64, v in 0.0..0.1f64, omega in 10.0..500.0f64) {
        let trap = Trap { eccentricity: ecc, tilt_amplitude: v, ..Trap::circular(omega) };
        let model = corrected_dispersion(&trap, 40, Corrections::ALL).unwrap();
        for l in 1..=40 {
            prop_assert_eq!(model.energy(l), model.energy(-l));
        }
    }

    #[test]
    fn quadratic_dispersion_revives_at_pi_over_a((c, w) in packet(), a in 0.2..3.0f64) {
        let psi = gaussian_packet(c, w, 96).unwrap();
        let model = DispersionModel::from_fn(96, |l| a * (l * l) as f64);
        let out = evolve_linear(&psi, PI / a, &model, None).unwrap();
        prop_assert!(1.0 - fidelity(&rotate(&psi, PI), &out).unwrap() < 1e-12);
    }

    #[test]
    fn small_rotation_matches_gaussian_overlap(w in 0.08..0.2f64, d in 0.0..0.3f64) {
        // |ψ|² ∝ exp(-2α²/w²): width w/√2
        let psi = gaussian_packet(0.0, w, 128).unwrap();
        let f = fidelity(&psi, &rotate(&psi, d)).unwrap();
        let oracle = gaussian_overlap_sqr(d, w / 2f64.sqrt());
        prop_assert!((f - oracle).abs() < 1e-10, "{} vs {}", f, oracle);
    }

    #[test]
    fn flux_rotates_density_by_twice_angle((c, w) in packet(), angle in -2.0..2.0f64) {
        let psi = gaussian_packet(c, w, 96).unwrap();
        let out = evolve_linear(&psi, 2.0 * TAU, &ideal_dispersion(96), Some(&FluxSpec::new(angle))).unwrap();
        let expected = rotate(&psi, 2.0 * angle);
        let (a, b) = (to_grid(&out, 256).unwrap(), to_grid(&expected, 256).unwrap());
        for (x, y) in a.density().iter().zip(b.density()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let moved = wrap_angle(circular_centroid(&out).unwrap() - circular_centroid(&psi).unwrap());
        prop_assert!((moved - wrap_angle(2.0 * angle)).abs() < 1e-10);
    }
}

#[test]
fn beam_splitter_balances_populations() {
    let psi = gaussian_packet(0.0, 0.12, 128).unwrap();
    let half = to_grid(&half_revival_superposition(&psi), 512).unwrap();
    let r = population_imbalance(&half, &Readout::halves(0.0, Weight::Uniform)).unwrap();
    assert!((r.right - 0.5).abs() < 1e-10);
    assert!((r.left - 0.5).abs() < 1e-10);
}

#[test]
fn beam_splitter_twice_is_pi_rotation() {
    let psi = gaussian_packet(1.0, 0.2, 64).unwrap();
    let twice = half_revival_superposition(&half_revival_superposition(&psi));
    assert!(1.0 - fidelity(&rotate(&psi, PI), &twice).unwrap() < 1e-12);
}

#[test]
fn uniform_state_unchanged_by_beam_splitter() {
    let u = oam_ring::state::SpectralState::eigenstate(16, 0).unwrap();
    assert!(1.0 - fidelity(&u, &half_revival_superposition(&u)).unwrap() < 1e-14);
}

#[test]
fn flux_of_one_quantum_is_identity() {
    let psi = gaussian_packet(0.5, 0.2, 64).unwrap();
    let model = ideal_dispersion(64);
    let with = evolve_linear(&psi, TAU, &model, Some(&FluxSpec::new(TAU))).unwrap();
    let without = evolve_linear(&psi, TAU, &model, None).unwrap();
    for (x, y) in with.amplitudes().iter().zip(without.amplitudes()) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn quartic_term_spoils_revival() {
    let trap = Trap::circular(30.0);
    let model = corrected_dispersion(&trap, 96, Corrections::CENTRIFUGAL).unwrap();
    let psi = gaussian_packet(0.0, 0.3, 96).unwrap();
    let target = rotate(&psi, PI);
    let best = (0..2001)
        .map(|i| {
            let t = TAU * (0.95 + 0.1 * i as f64 / 2000.0);
            fidelity(&target, &evolve_linear(&psi, t, &model, None).unwrap()).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(best < 1.0 - 1e-6, "{best}");
}
