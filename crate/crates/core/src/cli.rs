//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, ScenarioConfig, Variant};
use crate::constants::CODATA;
use crate::error::Error;
use crate::observables::{circular_centroid, fidelity, population_imbalance};
use crate::protocol::{
    find_revival_time, initial_state, run_protocol_sampled, sweep_phase, timing_sensitivity,
    ProtocolSpec, Solver,
};
use crate::sensing::{
    flux_action, gravitational_phase, min_detectable_field, peak_density,
    scattering_length_resolution, scattering_phase, GaugeScenario,
};
use crate::spectrum::{corrected_dispersion, energy_terms};
use crate::state::{rotate, to_spectral};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "oam-ring",
    version,
    about = "Matter-wave interference in ring traps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Number of density snapshots written by `revival`.
    #[arg(long, global = true, default_value_t = 0)]
    pub snapshots: usize,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Optimize the revival time and write a time series.
    Revival,
    /// Population imbalance against imprinted phase.
    SweepPhase,
    /// Per-term dispersion table.
    Spectrum,
    /// Gauge-flux and phase sensitivity estimates.
    Sense,
    /// Fidelity for delayed imprint and readout.
    Timing,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Configuration(_) => Self::Config(e.to_string()),
            _ => Self::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ScenarioConfig::parse(&text)?;
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", cli.out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Revival => revival(&cfg, &cli.out, cli.snapshots),
        Command::SweepPhase => sweep(&cfg, &cli.out),
        Command::Spectrum => spectrum(&cfg, &cli.out),
        Command::Sense => sense(&cfg, &cli.out),
        Command::Timing => timing(&cfg, &cli.out),
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `#` metadata block shared by all outputs.
fn header(cfg: &ScenarioConfig, command: &str, spec: Option<&ProtocolSpec>) -> CliResult<String> {
    let (units, trap) = cfg.reduce()?;
    let mut h = String::new();
    let _ = writeln!(h, "# oam-ring {command}");
    let _ = writeln!(h, "# config_sha256 = {}", cfg.hash);
    let _ = writeln!(h, "# time_unit_s = {}", num(units.time_unit));
    let _ = writeln!(h, "# energy_unit_j = {}", num(units.energy_unit));
    let _ = writeln!(h, "# omega_perp = {}", num(trap.omega_perp));
    let _ = writeln!(h, "# transverse_ratio = {}", num(trap.transverse_ratio()));
    let _ = writeln!(h, "# coupling = {}", num(cfg.coupling()?));
    if let Some(s) = spec {
        let solver = match s.solver {
            Solver::LinearSpectral => "linear".to_string(),
            Solver::SplitStep { dt } => format!("split-step dt = {}", num(dt)),
        };
        let _ = writeln!(h, "# solver = {solver}");
        let _ = writeln!(h, "# cutoff = {} grid = {}", s.cutoff, s.grid_size);
        let _ = writeln!(
            h,
            "# corrections = tilt:{} centrifugal:{} ellipticity:{}",
            s.corrections.tilt, s.corrections.centrifugal, s.corrections.ellipticity
        );
    }
    Ok(h)
}

fn write(out: &Path, name: &str, body: &str) -> CliResult<()> {
    let path = out.join(name);
    fs::write(&path, body)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn revival(cfg: &ScenarioConfig, out: &Path, snapshots: usize) -> CliResult<()> {
    let variant = if cfg.coupling()? != 0.0 {
        Variant::Interacting
    } else {
        Variant::Noninteracting
    };
    let mut spec = cfg.protocol(variant)?;
    let (units, _) = cfg.reduce()?;
    let t_rev = find_revival_time(&spec)?;
    spec.revival_time = Some(t_rev);
    let end = t_rev + spec.readout_offset;
    let n = cfg.revival_samples.max(2);
    let times: Vec<f64> = (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect();
    let result = run_protocol_sampled(&spec, &times)?;
    let target = rotate(&initial_state(&spec)?, std::f64::consts::PI);

    let mut csv = header(cfg, "revival", Some(&spec))?;
    let _ = writeln!(csv, "# revival_time_s = {}", num(units.time_to_si(t_rev)));
    let _ = writeln!(
        csv,
        "# fidelity: overlap with the initial packet rotated by pi"
    );
    csv.push_str("t_s,fidelity,imbalance,centroid_rad\n");
    for s in &result.snapshots {
        let spectral = to_spectral(&s.state, target.cutoff())?;
        let f = fidelity(&target, &spectral)?;
        let imb = population_imbalance(&s.state, &spec.readout).map_or(f64::NAN, |r| r.imbalance);
        let c = circular_centroid(&s.state).unwrap_or(f64::NAN);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            num(units.time_to_si(s.time)),
            num(f),
            num(imb),
            num(c)
        );
    }
    write(out, "revival.csv", &csv)?;

    if snapshots > 0 {
        let mut d = header(cfg, "revival snapshots", Some(&spec))?;
        d.push_str("t_s,alpha_rad,density_per_rad\n");
        let k = snapshots.min(result.snapshots.len());
        for i in 0..k {
            let idx = if k == 1 {
                0
            } else {
                i * (result.snapshots.len() - 1) / (k - 1)
            };
            let s = &result.snapshots[idx];
            let t = num(units.time_to_si(s.time));
            for (a, rho) in s.state.angles().zip(s.state.density()) {
                let _ = writeln!(d, "{t},{},{}", num(a), num(rho));
            }
        }
        write(out, "revival_snapshots.csv", &d)?;
    }
    println!("T_rev = {:.6} ms", units.time_to_si(t_rev) * 1e3);
    Ok(())
}

fn sweep(cfg: &ScenarioConfig, out: &Path) -> CliResult<()> {
    for &variant in &cfg.sweep_variants {
        if variant == Variant::Interacting && cfg.coupling()? == 0.0 {
            eprintln!("skipping interacting variant: scattering length is zero");
            continue;
        }
        let spec = cfg.protocol(variant)?;
        let points = sweep_phase(&spec, &cfg.sweep_phases)?;
        let mut csv = header(cfg, &format!("sweep-phase {}", variant.name()), Some(&spec))?;
        csv.push_str("phi_rad,imbalance\n");
        for p in &points {
            let _ = writeln!(csv, "{},{}", num(p.phase), num(p.imbalance));
        }
        write(out, &format!("sweep_{}.csv", variant.name()), &csv)?;
        println!("{}: {} points", variant.name(), points.len());
    }
    Ok(())
}

fn spectrum(cfg: &ScenarioConfig, out: &Path) -> CliResult<()> {
    let (units, trap) = cfg.reduce()?;
    let model = corrected_dispersion(&trap, cfg.spectrum_max_l as usize, cfg.corrections)?;
    for w in model.warnings() {
        eprintln!("warning: {w}");
    }
    let mut csv = header(cfg, "spectrum", None)?;
    csv.push_str("ell,energy_j,ideal_j,tilt_j,centrifugal_j,ellipticity_j\n");
    let j = |e: f64| num(units.energy_to_si(e));
    for ell in -cfg.spectrum_max_l..=cfg.spectrum_max_l {
        let t = energy_terms(ell, &trap, cfg.corrections);
        let _ = writeln!(
            csv,
            "{ell},{},{},{},{},{}",
            j(t.total()),
            j(t.ideal),
            j(t.tilt),
            j(t.centrifugal),
            j(t.ellipticity)
        );
    }
    write(out, "spectrum.csv", &csv)
}

fn sense(cfg: &ScenarioConfig, out: &Path) -> CliResult<()> {
    let s = cfg.sense;
    let trap = &cfg.trap;
    let scenarios = [
        GaugeScenario::ChargedMagnetic {
            charge: s.charge,
            field: s.field,
        },
        GaugeScenario::AharonovCasher {
            moment: s.moment,
            field: s.line_field,
        },
        GaugeScenario::ElectricDipoleMagnetic {
            dipole: s.dipole,
            field: s.field,
        },
        GaugeScenario::RotatingFrame {
            rate: s.rotation_rate,
        },
    ];
    let mut csv = header(cfg, "sense", None)?;
    let _ = writeln!(
        csv,
        "# inputs: field_t = {} charge_c = {} moment_j_t = {} line_field_v_m = {} dipole_c_m = {} rotation_rad_s = {}",
        num(s.field),
        num(s.charge),
        num(s.moment),
        num(s.line_field),
        num(s.dipole),
        num(s.rotation_rate)
    );
    csv.push_str("scenario,flux_action_js,rotation_rad,displacement_m\n");
    println!(
        "{:<26} {:>14} {:>14} {:>14}",
        "scenario", "flux (J s)", "rotation (rad)", "arc (m)"
    );
    for sc in &scenarios {
        let phi = flux_action(sc, trap)?;
        let rot = phi / CODATA.hbar;
        let arc = rot * trap.radius;
        let _ = writeln!(csv, "{},{},{},{}", sc.name(), num(phi), num(rot), num(arc));
        println!(
            "{:<26} {:>14.6e} {:>14.6e} {:>14.6e}",
            sc.name(),
            phi,
            rot,
            arc
        );
    }
    write(out, "sense_flux.csv", &csv)?;

    let density = peak_density(cfg.interaction.atom_number, trap);
    let rows = [
        (
            "gravitational_phase_rad",
            gravitational_phase(s.tilt, trap, None)?,
        ),
        (
            "scattering_phase_rad",
            scattering_phase(cfg.interaction.scattering_length, density, trap, None)?,
        ),
        (
            "phase_per_bohr_radius_rad",
            scattering_phase(CODATA.bohr_radius, density, trap, None)?,
        ),
        (
            "scattering_length_resolution_a0",
            scattering_length_resolution(s.phase_resolution, density, trap, None)?
                / CODATA.bohr_radius,
        ),
        ("peak_density_m3", density),
        (
            "min_detectable_field_t",
            min_detectable_field(s.resolution, s.charge, trap)?,
        ),
    ];
    let mut csv = header(cfg, "sense", None)?;
    let _ = writeln!(
        csv,
        "# inputs: tilt_rad = {} dispersion_time_s = {} atoms = {} angular_resolution_rad = {} phase_resolution_rad = {}",
        num(s.tilt),
        num(trap.omega_perp.recip()),
        num(cfg.interaction.atom_number),
        num(s.resolution),
        num(s.phase_resolution)
    );
    csv.push_str("quantity,value\n");
    for (name, value) in rows {
        let _ = writeln!(csv, "{name},{}", num(value));
        println!("{name:<34} {value:.6e}");
    }
    write(out, "sense_phases.csv", &csv)
}

fn timing(cfg: &ScenarioConfig, out: &Path) -> CliResult<()> {
    let variant = if cfg.coupling()? != 0.0 {
        Variant::Interacting
    } else {
        Variant::Noninteracting
    };
    let spec = cfg.protocol(variant)?;
    let (units, _) = cfg.reduce()?;
    let offsets: Vec<f64> = cfg
        .timing_offsets
        .iter()
        .map(|&t| units.time_to_internal(t))
        .collect();
    let points = timing_sensitivity(&spec, &offsets)?;
    let mut csv = header(cfg, "timing", Some(&spec))?;
    csv.push_str("offset_s,fidelity,imbalance\n");
    for (p, &t) in points.iter().zip(&cfg.timing_offsets) {
        let _ = writeln!(csv, "{},{},{}", num(t), num(p.fidelity), num(p.imbalance));
    }
    write(out, "timing.csv", &csv)
}
