//! Physical constants and the dimensionless unit system.
//!
//! Internal computations use units in which the reduced Planck constant, the
//! particle mass and the ring radius are all one. Energies are then measured
//! in `ħ²/mR²`, times in `mR²/ħ` and lengths in `R`, so the ideal revival time
//! is exactly `2π`.

use crate::error::{Error, Result};

/// CODATA 2018 values, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Atomic mass unit, kg.
    pub atomic_mass_unit: f64,
    /// Bohr radius, m.
    pub bohr_radius: f64,
    /// Elementary charge, C.
    pub elementary_charge: f64,
    /// Standard gravitational acceleration, m/s².
    pub gravitational_acceleration: f64,
    /// Speed of light in vacuum, m/s.
    pub speed_of_light: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    atomic_mass_unit: 1.660_539_066_60e-27,
    bohr_radius: 5.291_772_109_03e-11,
    elementary_charge: 1.602_176_634e-19,
    gravitational_acceleration: 9.806_65,
    speed_of_light: 299_792_458.0,
};

/// Mass of ³⁹K in atomic mass units.
pub const POTASSIUM_39_MASS_U: f64 = 38.963_706_68;

/// Parameters of the ³⁹K ring-trap scenario.
pub mod k39 {
    use super::{CODATA, POTASSIUM_39_MASS_U};

    pub fn mass() -> f64 {
        POTASSIUM_39_MASS_U * CODATA.atomic_mass_unit
    }

    /// Ring radius, m.
    pub const RADIUS: f64 = 5.9e-6;
    /// Transverse trap frequency, rad/s.
    pub const OMEGA_PERP: f64 = 6.4e3;
    pub const ATOM_NUMBER: f64 = 2.0e4;

    /// Scattering length of the interacting scenario (one Bohr radius), m.
    pub fn scattering_length() -> f64 {
        CODATA.bohr_radius
    }
}

/// Scales between SI and internal units for a particle of mass `m` on a ring
/// of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    mass: f64,
    hbar: f64,
    /// `ħ²/mR²`, J.
    pub energy_unit: f64,
    /// `mR²/ħ`, s.
    pub time_unit: f64,
    /// `R`, m.
    pub length_unit: f64,
}

impl UnitSystem {
    /// Unit system for an arbitrary value of `ħ` (useful when the inputs are
    /// already dimensionless).
    pub fn with_hbar(mass: f64, radius: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("radius", radius), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let time_unit = mass * radius * radius / hbar;
        Ok(Self {
            mass,
            hbar,
            energy_unit: hbar / time_unit,
            time_unit,
            length_unit: radius,
        })
    }

    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        Self::with_hbar(mass, radius, CODATA.hbar)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn time_to_internal(&self, seconds: f64) -> f64 {
        seconds / self.time_unit
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time_unit
    }

    pub fn energy_to_internal(&self, joules: f64) -> f64 {
        joules / self.energy_unit
    }

    pub fn energy_to_si(&self, e: f64) -> f64 {
        e * self.energy_unit
    }

    pub fn length_to_internal(&self, metres: f64) -> f64 {
        metres / self.length_unit
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.length_unit
    }

    /// Angular frequency (rad/s) to internal units.
    pub fn frequency_to_internal(&self, omega: f64) -> f64 {
        omega * self.time_unit
    }

    pub fn frequency_to_si(&self, w: f64) -> f64 {
        w / self.time_unit
    }

    /// Action (J s) in units of `ħ`; the result is an angle.
    pub fn action_to_internal(&self, action: f64) -> f64 {
        action / self.hbar
    }

    pub fn action_to_si(&self, a: f64) -> f64 {
        a * self.hbar
    }

    /// One-dimensional coupling constant (J m) in units of `ħ²/mR² × R`.
    pub fn coupling_to_internal(&self, g: f64) -> f64 {
        g / (self.energy_unit * self.length_unit)
    }

    pub fn coupling_to_si(&self, g: f64) -> f64 {
        g * self.energy_unit * self.length_unit
    }

    /// Ideal revival time `2πmR²/ħ` in seconds.
    pub fn revival_time_si(&self) -> f64 {
        std::f64::consts::TAU * self.time_unit
    }
}
