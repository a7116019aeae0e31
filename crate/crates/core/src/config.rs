//! Flat `key = value` scenario files.
//!
//! Every physical quantity carries its unit in the key name (`radius_um`,
//! `omega_perp_krad_s`, `phase_rad`, ...). Blank lines and `#` comments are
//! ignored; unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::constants::UnitSystem;
use crate::constants::CODATA;
use crate::observables::{Readout, Weight};
use crate::propagator::{FluxSpec, InteractionSpec};
use crate::protocol::{
    ImprintProfile, ImprintSpec, InitialState, ProtocolSpec, RevivalSearch, Solver,
};
use crate::spectrum::{Corrections, Trap, TrapSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Syntax { line: usize, message: String },
    UnknownKey(String),
    DuplicateKey(String),
    MissingKey(String),
    InvalidValue { key: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Syntax { line, message } => write!(f, "line {line}: {message}"),
            Self::UnknownKey(k) => write!(f, "unknown key `{k}`"),
            Self::DuplicateKey(k) => write!(f, "key `{k}` given more than once"),
            Self::MissingKey(k) => write!(f, "missing required key `{k}`"),
            Self::InvalidValue { key, message } => {
                write!(f, "invalid value for `{key}`: {message}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

type Parsed<T> = std::result::Result<T, ConfigError>;

/// Recognized keys and their defaults; `None` marks keys without a default.
const KEYS: &[(&str, Option<&str>)] = &[
    ("mass_u", None),
    ("radius_um", None),
    ("omega_perp_krad_s", None),
    ("omega_perp_khz", None),
    ("eccentricity", Some("0")),
    ("tilt_amplitude_hz", Some("0")),
    ("tilt_phase_rad", Some("0")),
    ("flux_rad", Some("0")),
    ("flux_turn_on_ms", Some("0")),
    ("scattering_length_a0", Some("0")),
    ("atom_number", Some("20000")),
    ("corrections", Some("none")),
    ("center_rad", Some("0")),
    ("initial_width_rad", None),
    ("imprint_phase_rad", Some("0")),
    ("imprint_profile", Some("cos2")),
    ("imprint_duration_us", Some("0")),
    ("imprint_offset_us", Some("0")),
    ("readout_offset_us", Some("0")),
    ("readout_weight", Some("cos2")),
    ("solver", Some("auto")),
    ("dt_trev", Some("5e-6")),
    ("cutoff", Some("128")),
    ("grid", Some("512")),
    ("search_lo_trev", Some("0.97")),
    ("search_hi_trev", Some("1.03")),
    ("search_resolution_ns", Some("2")),
    ("revival_samples", Some("201")),
    ("sweep_points", Some("25")),
    ("sweep_phases_rad", None),
    ("sweep_variants", Some("ideal,noninteracting,interacting")),
    ("timing_offsets_us", Some("0,50,150,500")),
    ("spectrum_max_l", Some("32")),
    ("sense_field_t", Some("1e-7")),
    ("sense_charge_e", Some("1")),
    ("sense_resolution_rad", None),
    ("sense_moment_j_t", Some("9.2740100783e-24")),
    ("sense_line_field_v_m", Some("1e6")),
    ("sense_dipole_c_m", Some("1e-30")),
    ("sense_rotation_rad_s", Some("1e-3")),
    ("sense_tilt_rad", Some("1e-4")),
    ("sense_phase_resolution_rad", Some("0.3")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Linear,
    SplitStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    /// Unperturbed spectrum, uniform imprint.
    Ideal,
    /// Configured spectrum and imprint, no interactions.
    Noninteracting,
    /// Configured spectrum, imprint and interactions.
    Interacting,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::Noninteracting => "noninteracting",
            Self::Interacting => "interacting",
        }
    }
}

/// A parsed scenario in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub trap: TrapSpec,
    pub interaction: InteractionSpec,
    pub corrections: Corrections,
    /// Flux rotation per revival, rad.
    pub flux_angle: f64,
    pub flux_turn_on: f64,
    pub center: f64,
    pub initial_width: Option<f64>,
    pub imprint_phase: f64,
    pub imprint_profile: ImprintProfile,
    pub imprint_duration: f64,
    pub imprint_offset: f64,
    pub readout_offset: f64,
    pub readout_weight: Weight,
    pub solver: SolverChoice,
    /// Split step as a fraction of the ideal revival time.
    pub dt_fraction: f64,
    pub cutoff: usize,
    pub grid: usize,
    pub search_lo: f64,
    pub search_hi: f64,
    pub search_resolution: f64,
    pub revival_samples: usize,
    pub sweep_phases: Vec<f64>,
    pub sweep_variants: Vec<Variant>,
    pub timing_offsets: Vec<f64>,
    pub spectrum_max_l: i64,
    pub sense: SenseInputs,
    /// SHA-256 of the raw file contents.
    pub hash: String,
}

/// Inputs of the `sense` subcommand, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SenseInputs {
    pub field: f64,
    pub charge: f64,
    /// Angular resolution; defaults to the packet size `σ_u/R`.
    pub resolution: f64,
    pub moment: f64,
    pub line_field: f64,
    pub dipole: f64,
    pub rotation_rate: f64,
    pub tilt: f64,
    pub phase_resolution: f64,
}

struct Table {
    values: BTreeMap<&'static str, String>,
}

impl Table {
    fn parse(text: &str) -> Parsed<Self> {
        let mut given: BTreeMap<&'static str, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            let key = KEYS
                .iter()
                .find(|(name, _)| *name == k)
                .map(|(name, _)| *name)
                .ok_or_else(|| ConfigError::UnknownKey(k.to_string()))?;
            if given.insert(key, v.to_string()).is_some() {
                return Err(ConfigError::DuplicateKey(k.to_string()));
            }
        }
        let mut values = given;
        for (k, default) in KEYS {
            if let Some(d) = default {
                values.entry(k).or_insert_with(|| d.to_string());
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Parsed<f64> {
        self.get(key)
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
            .and_then(|v| number(key, v))
    }

    fn f64(&self, key: &str) -> Parsed<f64> {
        number(key, self.get(key).expect("key with default"))
    }

    fn optional(&self, key: &str) -> Parsed<Option<f64>> {
        self.get(key).map(|v| number(key, v)).transpose()
    }

    fn usize(&self, key: &str) -> Parsed<usize> {
        let v = self.get(key).expect("key with default");
        v.parse()
            .map_err(|_| invalid(key, format!("`{v}` is not a non-negative integer")))
    }

    fn list(&self, key: &str) -> Parsed<Vec<f64>> {
        self.get(key)
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| number(key, s))
            .collect()
    }

    fn word(&self, key: &str) -> &str {
        self.get(key).expect("key with default")
    }
}

fn invalid(key: &str, message: String) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        message,
    }
}

fn number(key: &str, v: &str) -> Parsed<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| invalid(key, format!("`{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(key, format!("`{v}` is not finite")))
    }
}

fn positive(key: &str, x: f64) -> Parsed<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(key, format!("must be positive, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Parsed<Self> {
        let t = Table::parse(text)?;
        let mass = positive("mass_u", t.required("mass_u")?)? * CODATA.atomic_mass_unit;
        let radius = positive("radius_um", t.required("radius_um")?)? * 1e-6;
        let omega_perp = match (
            t.optional("omega_perp_krad_s")?,
            t.optional("omega_perp_khz")?,
        ) {
            (Some(w), None) => positive("omega_perp_krad_s", w)? * 1e3,
            (None, Some(f)) => positive("omega_perp_khz", f)? * 1e3 * TAU,
            (None, None) => return Err(ConfigError::MissingKey("omega_perp_krad_s".into())),
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "omega_perp_khz",
                    "give either omega_perp_krad_s or omega_perp_khz, not both".into(),
                ))
            }
        };
        let trap = TrapSpec {
            mass,
            radius,
            omega_perp,
            eccentricity: t.f64("eccentricity")?,
            tilt_amplitude: t.f64("tilt_amplitude_hz")? * TAU * CODATA.hbar,
            tilt_phase: t.f64("tilt_phase_rad")?,
            flux_action: 0.0,
        };
        let atom_number = t.f64("atom_number")?;
        if atom_number < 0.0 {
            return Err(invalid(
                "atom_number",
                format!("must be non-negative, got {atom_number}"),
            ));
        }
        let interaction = InteractionSpec {
            scattering_length: t.f64("scattering_length_a0")? * CODATA.bohr_radius,
            atom_number,
        };

        let corrections = parse_corrections(t.word("corrections"))?;
        let imprint_profile = match t.word("imprint_profile") {
            "uniform" => ImprintProfile::Uniform,
            "cos2" => ImprintProfile::Cos2,
            other => {
                return Err(invalid(
                    "imprint_profile",
                    format!("expected uniform or cos2, got `{other}`"),
                ))
            }
        };
        let readout_weight = match t.word("readout_weight") {
            "uniform" => Weight::Uniform,
            "cos2" => Weight::Cos2,
            other => {
                return Err(invalid(
                    "readout_weight",
                    format!("expected uniform or cos2, got `{other}`"),
                ))
            }
        };
        let solver = match t.word("solver") {
            "auto" => SolverChoice::Auto,
            "linear" => SolverChoice::Linear,
            "split-step" => SolverChoice::SplitStep,
            other => {
                return Err(invalid(
                    "solver",
                    format!("expected auto, linear or split-step, got `{other}`"),
                ))
            }
        };
        let imprint_duration = t.f64("imprint_duration_us")? * 1e-6;
        if imprint_duration < 0.0 {
            return Err(invalid(
                "imprint_duration_us",
                "must be non-negative".into(),
            ));
        }

        let mut sweep_phases = t.list("sweep_phases_rad")?;
        if sweep_phases.is_empty() {
            let n = t.usize("sweep_points")?;
            if n < 2 {
                return Err(invalid("sweep_points", format!("need at least 2, got {n}")));
            }
            sweep_phases = (0..n).map(|i| TAU * i as f64 / (n - 1) as f64).collect();
        }
        sweep_phases.sort_by(f64::total_cmp);
        let mut sweep_variants = t
            .word("sweep_variants")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "ideal" => Ok(Variant::Ideal),
                "noninteracting" => Ok(Variant::Noninteracting),
                "interacting" => Ok(Variant::Interacting),
                other => Err(invalid(
                    "sweep_variants",
                    format!("unknown variant `{other}`"),
                )),
            })
            .collect::<Parsed<Vec<_>>>()?;
        sweep_variants.sort();
        sweep_variants.dedup();

        let sense_resolution = match t.optional("sense_resolution_rad")? {
            Some(r) => positive("sense_resolution_rad", r)?,
            None => trap.transverse_width() / radius,
        };
        let sense = SenseInputs {
            field: t.f64("sense_field_t")?,
            charge: t.f64("sense_charge_e")? * CODATA.elementary_charge,
            resolution: sense_resolution,
            moment: t.f64("sense_moment_j_t")?,
            line_field: t.f64("sense_line_field_v_m")?,
            dipole: t.f64("sense_dipole_c_m")?,
            rotation_rate: t.f64("sense_rotation_rad_s")?,
            tilt: t.f64("sense_tilt_rad")?,
            phase_resolution: positive(
                "sense_phase_resolution_rad",
                t.f64("sense_phase_resolution_rad")?,
            )?,
        };

        let cfg = Self {
            trap,
            interaction,
            corrections,
            flux_angle: t.f64("flux_rad")?,
            flux_turn_on: t.f64("flux_turn_on_ms")? * 1e-3,
            center: t.f64("center_rad")?,
            initial_width: t.optional("initial_width_rad")?,
            imprint_phase: t.f64("imprint_phase_rad")?,
            imprint_profile,
            imprint_duration,
            imprint_offset: t.f64("imprint_offset_us")? * 1e-6,
            readout_offset: t.f64("readout_offset_us")? * 1e-6,
            readout_weight,
            solver,
            dt_fraction: positive("dt_trev", t.f64("dt_trev")?)?,
            cutoff: t.usize("cutoff")?,
            grid: t.usize("grid")?,
            search_lo: t.f64("search_lo_trev")?,
            search_hi: t.f64("search_hi_trev")?,
            search_resolution: positive("search_resolution_ns", t.f64("search_resolution_ns")?)?
                * 1e-9,
            revival_samples: t.usize("revival_samples")?,
            sweep_phases,
            sweep_variants,
            timing_offsets: t
                .list("timing_offsets_us")?
                .into_iter()
                .map(|x| x * 1e-6)
                .collect(),
            spectrum_max_l: t.usize("spectrum_max_l")? as i64,
            sense,
            hash: hex_digest(text),
        };
        cfg.reduce().map_err(|e| invalid("mass_u", e.to_string()))?;
        Ok(cfg)
    }

    /// Unit system and internal trap parameters.
    pub fn reduce(&self) -> crate::Result<(UnitSystem, Trap)> {
        self.trap.reduce()
    }

    /// Dimensionless coupling of the condensate.
    pub fn coupling(&self) -> crate::Result<f64> {
        self.interaction.coupling(&self.trap)
    }

    /// Protocol for one variant. The solver is split stepping when
    /// interactions are on, unless overridden.
    pub fn protocol(&self, variant: Variant) -> crate::Result<ProtocolSpec> {
        let (units, trap) = self.reduce()?;
        let (trap, corrections, coupling, profile) = match variant {
            Variant::Ideal => (
                Trap::circular(trap.omega_perp),
                Corrections::NONE,
                0.0,
                ImprintProfile::Uniform,
            ),
            Variant::Noninteracting => (trap, self.corrections, 0.0, self.imprint_profile),
            Variant::Interacting => (
                trap,
                self.corrections,
                self.coupling()?,
                self.imprint_profile,
            ),
        };
        let split = match self.solver {
            SolverChoice::Auto => coupling != 0.0,
            SolverChoice::Linear => false,
            SolverChoice::SplitStep => true,
        };
        let mut spec = ProtocolSpec::new(trap, corrections);
        spec.coupling = coupling;
        spec.solver = if split {
            Solver::SplitStep {
                dt: TAU * self.dt_fraction,
            }
        } else {
            Solver::LinearSpectral
        };
        spec.center = self.center;
        if let Some(width) = self.initial_width {
            spec.initial = InitialState::Gaussian { width };
        }
        spec.imprint = ImprintSpec::left_half(self.center, self.imprint_phase, profile);
        spec.imprint.duration = units.time_to_internal(self.imprint_duration);
        spec.readout = Readout::halves(self.center, self.readout_weight);
        spec.imprint_offset = units.time_to_internal(self.imprint_offset);
        spec.readout_offset = units.time_to_internal(self.readout_offset);
        if variant != Variant::Ideal && self.flux_angle != 0.0 {
            spec.flux = Some(FluxSpec {
                angle: self.flux_angle,
                turn_on: units.time_to_internal(self.flux_turn_on),
            });
        }
        spec.cutoff = self.cutoff;
        spec.grid_size = self.grid;
        spec.search = RevivalSearch {
            lo: self.search_lo * TAU,
            hi: self.search_hi * TAU,
            resolution: units.time_to_internal(self.search_resolution),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_corrections(v: &str) -> Parsed<Corrections> {
    let mut c = Corrections::NONE;
    for word in v.split(',').map(str::trim) {
        match word {
            "none" => {}
            "all" => c = Corrections::ALL,
            "tilt" => c.tilt = true,
            "centrifugal" => c.centrifugal = true,
            "ellipticity" => c.ellipticity = true,
            other => {
                return Err(invalid(
                    "corrections",
                    format!("unknown correction `{other}`"),
                ))
            }
        }
    }
    Ok(c)
}

fn hex_digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
