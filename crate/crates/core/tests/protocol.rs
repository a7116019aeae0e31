use std::f64::consts::{PI, TAU};

use oam_ring::observables::{circular_centroid, population_imbalance, Readout, Weight};
use oam_ring::propagator::{
    evolve_linear, evolve_split, ground_state_imaginary_time, FluxSpec, SplitStepper,
};
use oam_ring::protocol::{
    find_revival_time, run_protocol, run_protocol_sampled, sweep_phase, timing_sensitivity,
    ImprintProfile, ImprintSpec, ProtocolSpec, Solver,
};
use oam_ring::spectrum::{corrected_dispersion, ideal_dispersion, Corrections, Trap};
use oam_ring::state::{gaussian_packet, harmonic_ground_packet, to_grid, to_spectral};
use oam_ring::Error;

const OMEGA: f64 = 136.68;

fn centrifugal() -> ProtocolSpec {
    ProtocolSpec::new(Trap::circular(OMEGA), Corrections::CENTRIFUGAL)
}

#[test]
fn scenario_rotation_invariance() {
    let mut spec = centrifugal().with_phase(1.1);
    spec.imprint.profile = ImprintProfile::Cos2;
    let found = find_revival_time(&spec).unwrap();
    // the search itself only resolves 1e-7, so compare dynamics at a fixed time
    let mut pinned = spec.clone();
    pinned.revival_time = Some(found);
    let base = run_protocol(&pinned).unwrap();
    for angle in [0.7, -2.3, PI] {
        let r = run_protocol(&pinned.rotated(angle)).unwrap();
        let (a, b) = (r.imbalance.imbalance, base.imbalance.imbalance);
        assert!((a - b).abs() < 1e-10, "{angle}: {a} vs {b}");
        assert!((r.fidelity - base.fidelity).abs() < 1e-10);
        let t = find_revival_time(&spec.rotated(angle)).unwrap();
        assert!((t - found).abs() < 1e-6);
    }
}

#[test]
fn split_step_matches_linear_without_interactions() {
    let psi = harmonic_ground_packet(0.3, 1.0 / OMEGA.sqrt(), 128).unwrap();
    let model =
        corrected_dispersion(&Trap::circular(OMEGA), 256, Corrections::CENTRIFUGAL).unwrap();
    let exact = evolve_linear(&psi, 1.7, &model, Some(&FluxSpec::new(0.4))).unwrap();
    let mut g = to_grid(&psi, 512).unwrap();
    evolve_split(&mut g, 1.7, 1e-3, &model, 0.0, None, 0.4 / TAU).unwrap();
    let back = to_spectral(&g, 128).unwrap();
    for (x, y) in exact.amplitudes().iter().zip(back.amplitudes()) {
        assert!((x - y).norm() < 1e-8);
    }
}

#[test]
fn split_step_norm_conserved_with_interactions() {
    let psi = ground_state_imaginary_time(OMEGA, 0.0, 49.0, 512, 1e-10).unwrap();
    let mut s = SplitStepper::new(512, 2e-4, &ideal_dispersion(256), 49.0, None, 0.0).unwrap();
    let mut g = psi.clone();
    s.run(&mut g, 10_000).unwrap();
    assert!((g.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn oversized_step_rejected() {
    let psi = ground_state_imaginary_time(OMEGA, 0.0, 49.0, 512, 1e-10).unwrap();
    let mut s = SplitStepper::new(512, 0.05, &ideal_dispersion(256), 49.0, None, 0.0).unwrap();
    let mut g = psi;
    assert!(matches!(s.step(&mut g), Err(Error::StepSize { .. })));
}

#[test]
fn interactions_reduce_fringe_contrast() {
    let mut spec = centrifugal();
    spec.imprint.profile = ImprintProfile::Cos2;
    let free = sweep_phase(&spec, &[0.0, PI]).unwrap();
    spec.coupling = 49.0;
    spec.solver = Solver::SplitStep { dt: TAU * 2e-5 };
    let bound = sweep_phase(&spec, &[0.0, PI]).unwrap();
    let swing = |p: &[oam_ring::protocol::PhasePoint]| p[1].imbalance - p[0].imbalance;
    assert!(
        bound[0].imbalance < 0.0 && bound[1].imbalance > 0.0,
        "{bound:?}"
    );
    assert!(swing(&bound) > 1.5, "{bound:?}");
    assert!(swing(&bound) < swing(&free), "{bound:?} {free:?}");
}

#[test]
fn finite_imprint_pulse_approaches_instantaneous() {
    let mut spec = ProtocolSpec::new(Trap::circular(OMEGA), Corrections::NONE).with_phase(1.2);
    spec.revival_time = Some(TAU);
    let instant = run_protocol(&spec).unwrap().imbalance.imbalance;
    let mut short = spec.clone();
    short.imprint.duration = 1e-5;
    let pulsed = run_protocol(&short).unwrap().imbalance.imbalance;
    assert!((instant - pulsed).abs() < 1e-3, "{instant} vs {pulsed}");
    assert!((instant + 1.2f64.cos()).abs() < 1e-6);
}

#[test]
fn revival_time_search_is_consistent_across_solvers() {
    let linear = find_revival_time(&centrifugal()).unwrap();
    let mut split = centrifugal();
    split.solver = Solver::SplitStep { dt: TAU * 5e-5 };
    let stepped = find_revival_time(&split).unwrap();
    assert!((linear - stepped).abs() < 1e-5, "{linear} vs {stepped}");
    assert!(linear > TAU);
}

#[test]
fn timing_offsets_lower_fidelity() {
    let points = timing_sensitivity(&centrifugal(), &[0.0, 0.003, 0.01, 0.03]).unwrap();
    assert!(
        points.windows(2).all(|w| w[1].fidelity < w[0].fidelity),
        "{points:?}"
    );
}

#[test]
fn snapshots_follow_the_packet() {
    let mut spec = ProtocolSpec::new(Trap::circular(OMEGA), Corrections::NONE);
    spec.revival_time = Some(TAU);
    let r = run_protocol_sampled(&spec, &[0.0, PI, TAU]).unwrap();
    let readout = Readout::halves(0.0, Weight::Uniform);
    let imb: Vec<f64> = r
        .snapshots
        .iter()
        .map(|s| population_imbalance(&s.state, &readout).unwrap().imbalance)
        .collect();
    assert!((imb[0] - 1.0).abs() < 1e-12);
    assert!(imb[1].abs() < 1e-10);
    assert!((imb[2] + 1.0).abs() < 1e-12);
    assert!((circular_centroid(&r.snapshots[2].state).unwrap().abs() - PI).abs() < 1e-9);
}

#[test]
fn custom_gaussian_initial_state() {
    let mut spec = ProtocolSpec::new(Trap::circular(OMEGA), Corrections::NONE);
    spec.initial = oam_ring::protocol::InitialState::Gaussian { width: 0.2 };
    spec.imprint = ImprintSpec::left_half(0.0, PI / 3.0, ImprintProfile::Uniform);
    let r = run_protocol(&spec).unwrap();
    assert!((r.imbalance.imbalance + 0.5).abs() < 1e-6);
    assert!(gaussian_packet(0.0, 0.01, 128).is_err());
}
