//! Closed-form metrology estimates: gauge flux from physical fields, phases
//! imprinted by gravity and by interactions, and field sensitivity.
//!
//! Everything here is in SI units.

use std::f64::consts::PI;

use crate::constants::CODATA;
use crate::error::{Error, Result};
use crate::spectrum::TrapSpec;

/// Source of the gauge potential `γA` felt by the atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeScenario {
    /// Charge `q` (C) in a uniform field `B` (T) through the ring.
    ChargedMagnetic { charge: f64, field: f64 },
    /// Magnetic moment `m₀` (J/T) around a line charge with radial field
    /// `E₀` (V/m) at the ring.
    AharonovCasher { moment: f64, field: f64 },
    /// Electric dipole `p` (C·m) in a uniform magnetic field `B` (T).
    ElectricDipoleMagnetic { dipole: f64, field: f64 },
    /// Frame rotating at `ω` (rad/s) about the trap centre.
    RotatingFrame { rate: f64 },
}

impl GaugeScenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ChargedMagnetic { .. } => "charged-magnetic",
            Self::AharonovCasher { .. } => "aharonov-casher",
            Self::ElectricDipoleMagnetic { .. } => "electric-dipole-magnetic",
            Self::RotatingFrame { .. } => "rotating-frame",
        }
    }

    fn parameters(&self) -> [f64; 2] {
        match *self {
            Self::ChargedMagnetic { charge, field } => [charge, field],
            Self::AharonovCasher { moment, field } => [moment, field],
            Self::ElectricDipoleMagnetic { dipole, field } => [dipole, field],
            Self::RotatingFrame { rate } => [rate, 0.0],
        }
    }
}

/// Flux `γΦ = ∮ γA·dl` around the ring, in J·s.
pub fn flux_action(scenario: &GaugeScenario, trap: &TrapSpec) -> Result<f64> {
    if scenario.parameters().iter().any(|p| !p.is_finite()) {
        return Err(Error::Configuration(format!(
            "{} parameters must be finite",
            scenario.name()
        )));
    }
    let r = trap.radius;
    let c2 = CODATA.speed_of_light.powi(2);
    Ok(match *scenario {
        GaugeScenario::ChargedMagnetic { charge, field } => charge * field * PI * r * r,
        GaugeScenario::AharonovCasher { moment, field } => 2.0 * PI * r * field * moment / c2,
        // |p × B| is tangential and uniform along the ring
        GaugeScenario::ElectricDipoleMagnetic { dipole, field } => 2.0 * PI * r * dipole * field,
        GaugeScenario::RotatingFrame { rate } => 2.0 * PI * trap.mass * r * r * rate,
    })
}

/// Rotation of the revived packet per revival, `γΦ/ħ` in rad.
pub fn rotation_angle(scenario: &GaugeScenario, trap: &TrapSpec) -> Result<f64> {
    Ok(flux_action(scenario, trap)? / CODATA.hbar)
}

/// `t_d = 1/ω⊥`, the lifetime of the revival, in s.
pub fn dispersion_time(trap: &TrapSpec) -> f64 {
    trap.omega_perp.recip()
}

/// `φ_g = 2mgR t_d sin θ / ħ` for a ring tilted by `θ` during a pulse of
/// length `t_d` (default [`dispersion_time`]).
pub fn gravitational_phase(tilt: f64, trap: &TrapSpec, pulse: Option<f64>) -> Result<f64> {
    if tilt.abs() > 0.5 * PI {
        return Err(Error::InvalidParameter(format!(
            "tilt {tilt} rad exceeds π/2"
        )));
    }
    let t_d = positive_duration(pulse.unwrap_or_else(|| dispersion_time(trap)))?;
    Ok(
        2.0 * trap.mass * CODATA.gravitational_acceleration * trap.radius * t_d * tilt.sin()
            / CODATA.hbar,
    )
}

/// `φ_a = 4πħ a n t_d / m` for scattering length `a` (m) and density `n`
/// (m⁻³).
pub fn scattering_phase(
    scattering_length: f64,
    density: f64,
    trap: &TrapSpec,
    pulse: Option<f64>,
) -> Result<f64> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "density must be positive, got {density}"
        )));
    }
    let t_d = positive_duration(pulse.unwrap_or_else(|| dispersion_time(trap)))?;
    Ok(4.0 * PI * CODATA.hbar * scattering_length * density * t_d / trap.mass)
}

fn positive_duration(t: f64) -> Result<f64> {
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(Error::InvalidParameter(format!(
            "pulse duration must be positive, got {t}"
        )))
    }
}

/// Peak density `N/(π^{3/2} σ³)` of `N` atoms in the ground state of an
/// isotropic harmonic trap at `ω⊥`, with `σ = √(ħ/mω⊥)`.
pub fn peak_density(atoms: f64, trap: &TrapSpec) -> f64 {
    atoms / (PI.powf(1.5) * trap.transverse_width().powi(3))
}

/// Density-weighted mean `∫n²/∫n` of the same cloud, `2^{-3/2}` of the peak.
pub fn mean_density(atoms: f64, trap: &TrapSpec) -> f64 {
    peak_density(atoms, trap) / 2f64.powf(1.5)
}

/// Smallest field `B = ħ δ/(qπR²)` that rotates the revival by the angular
/// resolution `δ`.
pub fn min_detectable_field(resolution: f64, charge: f64, trap: &TrapSpec) -> Result<f64> {
    if charge == 0.0 {
        return Err(Error::NotApplicable(
            "a neutral particle does not couple to the magnetic flux".into(),
        ));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    Ok(CODATA.hbar * resolution / (charge.abs() * PI * trap.radius.powi(2)))
}

/// Scattering-length change that shifts the phase by `resolution`, given the
/// phase per unit scattering length at `density`.
pub fn scattering_length_resolution(
    resolution: f64,
    density: f64,
    trap: &TrapSpec,
    pulse: Option<f64>,
) -> Result<f64> {
    let per_metre = scattering_phase(1.0, density, trap, pulse)?;
    Ok(resolution / per_metre)
}
