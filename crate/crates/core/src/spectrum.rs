//! Ring dispersion relations `E(ℓ)`: the ideal rotor spectrum plus the
//! perturbative corrections of a realistic torus trap (tilt potential,
//! centrifugal distortion, ellipticity).
//!
//! Everything below [`TrapSpec`] works in internal units (`ħ = m = R = 1`).

use std::f64::consts::PI;

use crate::constants::{UnitSystem, CODATA};
use crate::error::{Error, Result};

/// Thresholds beyond which the perturbative formulas are flagged.
pub const MAX_ECCENTRICITY: f64 = 0.5;
pub const MAX_TILT_AMPLITUDE: f64 = 0.1;
pub const MAX_TRANSVERSE_RATIO: f64 = 0.2;

/// Physical trap parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    /// kg
    pub mass: f64,
    /// m; the semimajor axis when the ring is elliptical.
    pub radius: f64,
    /// Transverse angular frequency, rad/s.
    pub omega_perp: f64,
    pub eccentricity: f64,
    /// Amplitude `V₀` of the tilt potential `V₀ cos(α - α₀)`, J.
    pub tilt_amplitude: f64,
    /// `α₀`, rad.
    pub tilt_phase: f64,
    /// Gauge flux `γΦ`, J s.
    pub flux_action: f64,
}

impl TrapSpec {
    /// An ideal circular trap without tilt or flux.
    pub fn circular(mass: f64, radius: f64, omega_perp: f64) -> Self {
        Self {
            mass,
            radius,
            omega_perp,
            eccentricity: 0.0,
            tilt_amplitude: 0.0,
            tilt_phase: 0.0,
            flux_action: 0.0,
        }
    }

    pub fn units(&self) -> Result<UnitSystem> {
        UnitSystem::new(self.mass, self.radius)
    }

    /// Transverse ground-state width `σ_u = √(ħ/mω⊥)`, m.
    pub fn transverse_width(&self) -> f64 {
        (CODATA.hbar / (self.mass * self.omega_perp)).sqrt()
    }

    /// Converts to internal units, rejecting unphysical parameters.
    pub fn reduce(&self) -> Result<(UnitSystem, Trap)> {
        let units = self.units()?;
        if !(self.omega_perp.is_finite() && self.omega_perp > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transverse frequency must be positive, got {}",
                self.omega_perp
            )));
        }
        let trap = Trap {
            omega_perp: units.frequency_to_internal(self.omega_perp),
            eccentricity: self.eccentricity,
            tilt_amplitude: units.energy_to_internal(self.tilt_amplitude),
            tilt_phase: self.tilt_phase,
            flux_angle: units.action_to_internal(self.flux_action),
        };
        trap.check()?;
        Ok((units, trap))
    }
}

/// Trap parameters in internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trap {
    /// `ω⊥ mR²/ħ`.
    pub omega_perp: f64,
    pub eccentricity: f64,
    /// `V₀ mR²/ħ²`.
    pub tilt_amplitude: f64,
    pub tilt_phase: f64,
    /// `γΦ/ħ`, the rotation of the revival per revival time.
    pub flux_angle: f64,
}

impl Trap {
    pub fn circular(omega_perp: f64) -> Self {
        Self {
            omega_perp,
            eccentricity: 0.0,
            tilt_amplitude: 0.0,
            tilt_phase: 0.0,
            flux_angle: 0.0,
        }
    }

    /// Hard constraints; soft ones are reported by [`Trap::warnings`].
    pub fn check(&self) -> Result<()> {
        if !(self.omega_perp.is_finite() && self.omega_perp > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transverse frequency must be positive, got {}",
                self.omega_perp
            )));
        }
        if !(self.eccentricity >= 0.0 && self.eccentricity < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eccentricity must lie in [0, 1), got {}",
                self.eccentricity
            )));
        }
        if !(self.tilt_amplitude >= 0.0 && self.tilt_amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tilt amplitude must be non-negative, got {}",
                self.tilt_amplitude
            )));
        }
        if !self.flux_angle.is_finite() || !self.tilt_phase.is_finite() {
            return Err(Error::InvalidParameter(
                "flux and tilt phase must be finite".into(),
            ));
        }
        Ok(())
    }

    /// `σ_u/R = 1/√ω⊥` in internal units.
    pub fn transverse_ratio(&self) -> f64 {
        self.omega_perp.sqrt().recip()
    }

    pub fn warnings(&self) -> Vec<ValidityWarning> {
        let mut w = Vec::new();
        if self.eccentricity > MAX_ECCENTRICITY {
            w.push(ValidityWarning::Eccentricity(self.eccentricity));
        }
        if self.tilt_amplitude >= MAX_TILT_AMPLITUDE {
            w.push(ValidityWarning::TiltAmplitude(self.tilt_amplitude));
        }
        let ratio = self.transverse_ratio();
        if ratio >= MAX_TRANSVERSE_RATIO {
            w.push(ValidityWarning::TransverseWidth(ratio));
        }
        w
    }
}

/// A parameter outside the regime where the perturbative corrections hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    Eccentricity(f64),
    /// Dimensionless `V₀`.
    TiltAmplitude(f64),
    /// `σ_u/R`.
    TransverseWidth(f64),
}

impl std::fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Eccentricity(e) => write!(f, "eccentricity {e} exceeds {MAX_ECCENTRICITY}"),
            Self::TiltAmplitude(v) => write!(
                f,
                "tilt amplitude {v} ħ²/mR² is not below {MAX_TILT_AMPLITUDE}"
            ),
            Self::TransverseWidth(r) => {
                write!(f, "σ_u/R = {r} is not below {MAX_TRANSVERSE_RATIO}")
            }
        }
    }
}

/// Which corrections enter the dispersion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Corrections {
    pub tilt: bool,
    pub centrifugal: bool,
    pub ellipticity: bool,
}

impl Corrections {
    pub const NONE: Corrections = Corrections {
        tilt: false,
        centrifugal: false,
        ellipticity: false,
    };
    pub const ALL: Corrections = Corrections {
        tilt: true,
        centrifugal: true,
        ellipticity: true,
    };
    pub const CENTRIFUGAL: Corrections = Corrections {
        tilt: false,
        centrifugal: true,
        ellipticity: false,
    };

    pub fn is_empty(&self) -> bool {
        *self == Self::NONE
    }
}

/// Tabulated energies `E(ℓ)` for `ℓ = -L..=L`, in units of `ħ²/mR²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    cutoff: usize,
    energies: Vec<f64>,
    corrections: Corrections,
    warnings: Vec<ValidityWarning>,
}

impl DispersionModel {
    /// An arbitrary tabulated dispersion; `energies[i]` belongs to
    /// `ℓ = i - cutoff`.
    pub fn tabulated(cutoff: usize, energies: Vec<f64>) -> Result<Self> {
        if energies.len() != 2 * cutoff + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} energies for cutoff {cutoff}",
                2 * cutoff + 1
            )));
        }
        Ok(Self {
            cutoff,
            energies,
            corrections: Corrections::NONE,
            warnings: Vec::new(),
        })
    }

    pub fn from_fn(cutoff: usize, f: impl Fn(i64) -> f64) -> Self {
        let l = cutoff as i64;
        Self {
            cutoff,
            energies: (-l..=l).map(f).collect(),
            corrections: Corrections::NONE,
            warnings: Vec::new(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `E(ℓ)`; `None` outside the table.
    pub fn energy(&self, ell: i64) -> Option<f64> {
        let idx = ell + self.cutoff as i64;
        (idx >= 0)
            .then(|| self.energies.get(idx as usize).copied())
            .flatten()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn corrections(&self) -> Corrections {
        self.corrections
    }

    pub fn warnings(&self) -> &[ValidityWarning] {
        &self.warnings
    }
}

/// `T_rev = 2πmR²/ħ`, s.
pub fn revival_time(trap: &TrapSpec) -> Result<f64> {
    Ok(trap.units()?.revival_time_si())
}

/// `E(ℓ) = ℓ²/2`.
pub fn ideal_dispersion(cutoff: usize) -> DispersionModel {
    DispersionModel::from_fn(cutoff, ideal_energy)
}

pub fn ideal_energy(ell: i64) -> f64 {
    let l = ell as f64;
    0.5 * l * l
}

fn ell_sq_minus_quarter(ell: i64) -> f64 {
    let l = ell as f64;
    l * l - 0.25
}

/// Second-order energy shift from `V₀ cos(α - α₀)`:
/// `ΔE = (V₀²/4) / (ℓ² - 1/4)`, negative for `ℓ = 0`.
pub fn tilt_shift(ell: i64, trap: &Trap) -> f64 {
    let v = trap.tilt_amplitude;
    0.25 * v * v / ell_sq_minus_quarter(ell)
}

/// Outward displacement `u_ℓ = (ℓ² - 1/4)/ω⊥²` of the transverse potential
/// minimum, in units of `R`.
pub fn centrifugal_displacement(ell: i64, trap: &Trap) -> f64 {
    ell_sq_minus_quarter(ell) / (trap.omega_perp * trap.omega_perp)
}

/// Transverse energy of radial level `k` in the centrifugally shifted well:
/// `ω⊥(k + 1/2) - (ℓ² - 1/4)²/(2ω⊥²)`.
pub fn centrifugal_shift(ell: i64, k: i64, trap: &Trap) -> Result<f64> {
    if k < 0 {
        return Err(Error::InvalidParameter(format!(
            "transverse quantum number must be non-negative, got {k}"
        )));
    }
    let w = trap.omega_perp;
    let q = ell_sq_minus_quarter(ell);
    Ok(w * (k as f64 + 0.5) - q * q / (2.0 * w * w))
}

/// First-order eccentricity shift
/// `ε²/(8π) (1 + 3u_ℓ) (ℓ² - 1/4)`.
pub fn ellipticity_shift(ell: i64, trap: &Trap) -> f64 {
    let e = trap.eccentricity;
    let u = centrifugal_displacement(ell, trap);
    e * e / (8.0 * PI) * (1.0 + 3.0 * u) * ell_sq_minus_quarter(ell)
}

/// Per-term breakdown of a corrected energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub ideal: f64,
    pub tilt: f64,
    pub centrifugal: f64,
    pub ellipticity: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.ideal + self.tilt + self.centrifugal + self.ellipticity
    }
}

/// The individual terms of `E(ℓ)`; deselected terms are zero. The
/// centrifugal term is that of the transverse ground state `k = 0` and so
/// includes the zero-point energy `ω⊥/2`.
pub fn energy_terms(ell: i64, trap: &Trap, corrections: Corrections) -> EnergyTerms {
    EnergyTerms {
        ideal: ideal_energy(ell),
        tilt: if corrections.tilt {
            tilt_shift(ell, trap)
        } else {
            0.0
        },
        centrifugal: if corrections.centrifugal {
            centrifugal_shift(ell, 0, trap).expect("k = 0 is valid")
        } else {
            0.0
        },
        ellipticity: if corrections.ellipticity {
            ellipticity_shift(ell, trap)
        } else {
            0.0
        },
    }
}

/// `E(ℓ) = ℓ²/2` plus the selected corrections, with the transverse motion in
/// its ground state.
pub fn corrected_dispersion(
    trap: &Trap,
    cutoff: usize,
    corrections: Corrections,
) -> Result<DispersionModel> {
    trap.check()?;
    let mut model =
        DispersionModel::from_fn(cutoff, |l| energy_terms(l, trap, corrections).total());
    model.corrections = corrections;
    model.warnings = trap
        .warnings()
        .into_iter()
        .filter(|w| match w {
            ValidityWarning::Eccentricity(_) => corrections.ellipticity,
            ValidityWarning::TiltAmplitude(_) => corrections.tilt,
            ValidityWarning::TransverseWidth(_) => {
                corrections.centrifugal || corrections.ellipticity
            }
        })
        .collect();
    Ok(model)
}
