//! The interference experiment: prepare a localized packet, evolve for half a
//! revival, imprint a phase on one side of the ring, evolve for another half
//! revival and read out the weighted population imbalance.
//!
//! All times are in internal units (`mR²/ħ`). The packet starts on the
//! "right" side of the ring; with no imprinted phase it revives on the left,
//! so the ideal signal is `imbalance(φ) = -cos φ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{
    circular_centroid, fidelity, population_imbalance, ImbalanceReading, Readout, Weight, Window,
};
use crate::propagator::{evolve_linear_from, evolve_split, ground_state_imaginary_time, FluxSpec};
use crate::spectrum::{corrected_dispersion, Corrections, DispersionModel, Trap};
use crate::state::{
    gaussian_packet, grid_angle, harmonic_ground_packet, rotate, to_grid_with, to_spectral_with,
    GridState, RingFft, SpectralState,
};

/// Fidelity below which no revival is reported.
pub const REVIVAL_THRESHOLD: f64 = 0.1;

/// Energy-change tolerance for preparing interacting initial states.
pub const GROUND_STATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    /// Exact propagation in the `ℓ` basis; requires zero coupling.
    LinearSpectral,
    /// Strang split stepping with steps no longer than `dt`.
    SplitStep { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Ground state of the harmonic loading trap of frequency `ω⊥`
    /// (interacting when the coupling is non-zero).
    LoadingGroundState,
    /// [`gaussian_packet`] of the given width.
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImprintProfile {
    Uniform,
    /// `φ cos²(α - origin)`.
    Cos2,
}

/// Phase imprinted on one window of the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprintSpec {
    pub phase: f64,
    pub profile: ImprintProfile,
    pub window: Window,
    /// Origin of the `cos²` profile.
    pub origin: f64,
    /// Zero for an instantaneous phase; otherwise the phase is spread over a
    /// potential pulse of this length.
    pub duration: f64,
}

impl ImprintSpec {
    /// Phase on the half ring opposite to `center`.
    pub fn left_half(center: f64, phase: f64, profile: ImprintProfile) -> Self {
        Self {
            phase,
            profile,
            window: Window {
                start: center + FRAC_PI_2,
                length: PI,
            },
            origin: center,
            duration: 0.0,
        }
    }

    /// `φ w(α_j)` on an `n`-point grid.
    pub fn phase_profile(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| {
                let a = grid_angle(j, n);
                if !self.window.contains(a) {
                    return 0.0;
                }
                match self.profile {
                    ImprintProfile::Uniform => self.phase,
                    ImprintProfile::Cos2 => self.phase * (a - self.origin).cos().powi(2),
                }
            })
            .collect()
    }

    fn rotated(&self, angle: f64) -> Self {
        Self {
            window: self.window.rotated(angle),
            origin: self.origin + angle,
            ..*self
        }
    }
}

/// Search window and resolution for [`find_revival_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalSearch {
    pub lo: f64,
    pub hi: f64,
    pub resolution: f64,
}

impl Default for RevivalSearch {
    fn default() -> Self {
        Self {
            lo: 0.97 * TAU,
            hi: 1.03 * TAU,
            resolution: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub trap: Trap,
    pub corrections: Corrections,
    /// Dimensionless 1D coupling multiplying `|ψ(α)|²`.
    pub coupling: f64,
    pub flux: Option<FluxSpec>,
    pub center: f64,
    pub initial: InitialState,
    pub imprint: ImprintSpec,
    pub readout: Readout,
    /// Shift of the imprint time away from half the revival time.
    pub imprint_offset: f64,
    /// Shift of the readout time away from the full revival time.
    pub readout_offset: f64,
    pub solver: Solver,
    pub cutoff: usize,
    pub grid_size: usize,
    pub search: RevivalSearch,
    /// Skips the search when set.
    pub revival_time: Option<f64>,
}

impl ProtocolSpec {
    /// Linear solver, packet at `α = 0`, no imprinted phase, `cos²` readout.
    pub fn new(trap: Trap, corrections: Corrections) -> Self {
        Self {
            trap,
            corrections,
            coupling: 0.0,
            flux: None,
            center: 0.0,
            initial: InitialState::LoadingGroundState,
            imprint: ImprintSpec::left_half(0.0, 0.0, ImprintProfile::Uniform),
            readout: Readout::halves(0.0, Weight::Cos2),
            imprint_offset: 0.0,
            readout_offset: 0.0,
            solver: Solver::LinearSpectral,
            cutoff: 128,
            grid_size: 512,
            search: RevivalSearch::default(),
            revival_time: None,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.imprint.phase = phase;
        self
    }

    /// The whole scenario (packet, imprint window, readout) rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            center: self.center + angle,
            imprint: self.imprint.rotated(angle),
            readout: self.readout.rotated(angle),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.trap.check()?;
        if self.solver == Solver::LinearSpectral && self.coupling != 0.0 {
            return Err(Error::Configuration(
                "the linear spectral solver requires zero interaction coupling".into(),
            ));
        }
        if let Solver::SplitStep { dt } = self.solver {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Configuration(format!(
                    "time step must be positive, got {dt}"
                )));
            }
        }
        if !self.imprint.phase.is_finite() {
            return Err(Error::Configuration("imprint phase must be finite".into()));
        }
        if self.imprint.duration < 0.0 {
            return Err(Error::Configuration(
                "imprint duration must be non-negative".into(),
            ));
        }
        if !(self.grid_size.is_power_of_two() && self.grid_size >= 2 * self.cutoff + 2) {
            return Err(Error::Configuration(format!(
                "grid size {} must be a power of two of at least 2L + 2 = {}",
                self.grid_size,
                2 * self.cutoff + 2
            )));
        }
        let s = self.search;
        if !(s.lo >= 0.0 && s.hi > s.lo && s.resolution > 0.0) {
            return Err(Error::Configuration(format!(
                "invalid revival search window [{}, {}] with resolution {}",
                s.lo, s.hi, s.resolution
            )));
        }
        Ok(())
    }

    /// Revival lifetime `t_d = 1/ω⊥`.
    pub fn dispersion_time(&self) -> f64 {
        self.trap.omega_perp.recip()
    }

    fn model(&self) -> Result<DispersionModel> {
        corrected_dispersion(&self.trap, self.grid_size / 2, self.corrections)
    }

    /// Cutoff of the spectral representation used for overlaps.
    fn overlap_cutoff(&self) -> usize {
        match self.solver {
            Solver::LinearSpectral => self.cutoff,
            Solver::SplitStep { .. } => self.grid_size / 2 - 1,
        }
    }
}

/// A state recorded during the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: GridState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub final_spectral: SpectralState,
    pub final_grid: GridState,
    pub imbalance: ImbalanceReading,
    /// Overlap with the ideal interferometer output
    /// `cos(φ/2)|ψ_π⟩ - sin(φ/2)|ψ₀⟩`, rotated by the accumulated flux.
    pub fidelity: f64,
    /// Optimized full revival time.
    pub revival_time: f64,
    pub readout_time: f64,
    /// `None` when the final density is too uniform.
    pub centroid: Option<f64>,
    pub snapshots: Vec<Snapshot>,
}

/// Time evolution in whichever representation the solver uses.
#[derive(Debug, Clone)]
struct Evolver {
    state: Repr,
    time: f64,
    model: DispersionModel,
    coupling: f64,
    flux: Option<FluxSpec>,
    fft: RingFft,
    cutoff: usize,
}

#[derive(Debug, Clone)]
enum Repr {
    Spectral(SpectralState),
    Grid { state: GridState, dt: f64 },
}

impl Evolver {
    fn new(spec: &ProtocolSpec, flux: Option<FluxSpec>) -> Result<Self> {
        let fft = RingFft::new(spec.grid_size);
        let model = spec.model()?;
        let state = match spec.solver {
            Solver::LinearSpectral => Repr::Spectral(initial_spectral(spec)?),
            Solver::SplitStep { dt } => Repr::Grid {
                state: initial_grid(spec, &fft)?,
                dt,
            },
        };
        Ok(Self {
            state,
            time: 0.0,
            model,
            coupling: spec.coupling,
            flux,
            fft,
            cutoff: spec.cutoff,
        })
    }

    /// Advances to `time + duration`, splitting at the flux turn-on.
    fn advance(&mut self, duration: f64, potential: Option<&[f64]>) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let end = self.time + duration;
        if let Some(f) = self.flux {
            if f.turn_on > self.time && f.turn_on < end {
                self.advance_uniform(f.turn_on - self.time, potential)?;
                return self.advance_uniform(end - self.time, potential);
            }
        }
        self.advance_uniform(duration, potential)
    }

    fn flux_rate_now(&self) -> f64 {
        match self.flux {
            Some(f) if self.time >= f.turn_on => f.rate(),
            _ => 0.0,
        }
    }

    fn advance_uniform(&mut self, duration: f64, potential: Option<&[f64]>) -> Result<()> {
        let rate = self.flux_rate_now();
        match &mut self.state {
            Repr::Spectral(s) if potential.is_none() => {
                *s = evolve_linear_from(s, self.time, duration, &self.model, self.flux.as_ref())?;
            }
            Repr::Spectral(s) => {
                // a finite imprint pulse is stepped on the grid
                let mut g = to_grid_with(s, &self.fft)?;
                let dt = duration / 1000.0;
                evolve_split(
                    &mut g,
                    duration,
                    dt,
                    &self.model,
                    0.0,
                    potential.map(<[f64]>::to_vec),
                    rate,
                )?;
                *s = to_spectral_with(&g, self.cutoff, &self.fft)?;
            }
            Repr::Grid { state, dt } => {
                evolve_split(
                    state,
                    duration,
                    *dt,
                    &self.model,
                    self.coupling,
                    potential.map(<[f64]>::to_vec),
                    rate,
                )?;
            }
        }
        self.time += duration;
        Ok(())
    }

    fn multiply_phase(&mut self, phase: &[f64]) -> Result<()> {
        let apply = |g: &mut GridState| {
            g.amplitudes_mut()
                .iter_mut()
                .zip(phase)
                .for_each(|(c, p)| *c *= Complex64::from_polar(1.0, *p));
        };
        match &mut self.state {
            Repr::Spectral(s) => {
                let mut g = to_grid_with(s, &self.fft)?;
                apply(&mut g);
                *s = to_spectral_with(&g, self.cutoff, &self.fft)?;
            }
            Repr::Grid { state, .. } => apply(state),
        }
        Ok(())
    }

    /// Applies an instantaneous imprint. A spectral state is first rotated so
    /// the imprint origin sits at zero, which keeps the grid sampling of the
    /// profile independent of where the scenario is placed on the ring.
    fn imprint(&mut self, imprint: &ImprintSpec, n: usize) -> Result<()> {
        match &mut self.state {
            Repr::Spectral(s) => {
                let origin = imprint.origin;
                let profile = imprint.rotated(-origin).phase_profile(n);
                *s = rotate(s, -origin);
                self.multiply_phase(&profile)?;
                if let Repr::Spectral(s) = &mut self.state {
                    *s = rotate(s, origin);
                }
                Ok(())
            }
            Repr::Grid { .. } => self.multiply_phase(&imprint.phase_profile(n)),
        }
    }

    /// Population imbalance, evaluated in the frame of the readout center for
    /// spectral states (see [`Evolver::imprint`]).
    fn read_out(&self, readout: &Readout) -> Result<ImbalanceReading> {
        match &self.state {
            Repr::Spectral(s) => {
                let g = to_grid_with(&rotate(s, -readout.center), &self.fft)?;
                population_imbalance(&g, &readout.rotated(-readout.center))
            }
            Repr::Grid { state, .. } => population_imbalance(state, readout),
        }
    }

    fn grid(&self) -> Result<GridState> {
        match &self.state {
            Repr::Spectral(s) => to_grid_with(s, &self.fft),
            Repr::Grid { state, .. } => Ok(state.clone()),
        }
    }

    fn spectral(&self, cutoff: usize) -> Result<SpectralState> {
        match &self.state {
            Repr::Spectral(s) => s.with_cutoff(cutoff),
            Repr::Grid { state, .. } => to_spectral_with(state, cutoff, &self.fft),
        }
    }
}

fn initial_spectral(spec: &ProtocolSpec) -> Result<SpectralState> {
    match spec.initial {
        InitialState::LoadingGroundState => {
            harmonic_ground_packet(spec.center, spec.trap.transverse_ratio(), spec.cutoff)
        }
        InitialState::Gaussian { width } => gaussian_packet(spec.center, width, spec.cutoff),
    }
}

fn initial_grid(spec: &ProtocolSpec, fft: &RingFft) -> Result<GridState> {
    if spec.coupling != 0.0 && spec.initial == InitialState::LoadingGroundState {
        return ground_state_imaginary_time(
            spec.trap.omega_perp,
            spec.center,
            spec.coupling,
            spec.grid_size,
            GROUND_STATE_TOLERANCE,
        );
    }
    to_grid_with(&initial_spectral(spec)?, fft)
}

/// The prepared initial state in the spectral representation used for
/// overlaps.
pub fn initial_state(spec: &ProtocolSpec) -> Result<SpectralState> {
    let fft = RingFft::new(spec.grid_size);
    match spec.solver {
        Solver::LinearSpectral => initial_spectral(spec),
        Solver::SplitStep { .. } => {
            to_spectral_with(&initial_grid(spec, &fft)?, spec.overlap_cutoff(), &fft)
        }
    }
}

/// Finds the time in `spec.search` that maximizes the overlap of the freely
/// evolved packet with its π-rotated initial state: a coarse scan with pitch
/// `t_d/4` followed by golden-section refinement.
///
/// The flux is left out: it only rotates the revival.
pub fn find_revival_time(spec: &ProtocolSpec) -> Result<f64> {
    spec.validate()?;
    let cutoff = spec.overlap_cutoff();
    let target = rotate(&initial_state(spec)?, PI);
    let RevivalSearch { lo, hi, resolution } = spec.search;
    let pitch = 0.25 * spec.dispersion_time();
    let points = ((hi - lo) / pitch).ceil().max(2.0) as usize;
    let pitch = (hi - lo) / points as f64;

    let score = |e: &Evolver| -> Result<f64> { fidelity(&target, &e.spectral(cutoff)?) };

    let mut evolver = Evolver::new(spec, None)?;
    evolver.advance(lo, None)?;
    let mut best = (score(&evolver)?, 0usize, evolver.clone());
    for i in 1..=points {
        let checkpoint = evolver.clone();
        evolver.advance(lo + i as f64 * pitch - evolver.time, None)?;
        let f = score(&evolver)?;
        if f > best.0 {
            best = (f, i, checkpoint);
        }
    }
    if best.0 < REVIVAL_THRESHOLD {
        return Err(Error::RevivalNotFound {
            lo,
            hi,
            best: best.0,
            threshold: REVIVAL_THRESHOLD,
        });
    }

    // bracket [t_{i-1}, t_{i+1}] clipped to the window; `base` sits at its
    // left end
    let (i, base) = (best.1, best.2);
    let (mut a, base) = if i == 0 {
        (lo, evolver_at(spec, lo)?)
    } else {
        (lo + (i - 1) as f64 * pitch, base)
    };
    let mut b = (lo + (i + 1) as f64 * pitch).min(hi);
    let eval = |t: f64| -> Result<f64> {
        let mut e = base.clone();
        e.advance(t - e.time, None)?;
        score(&e)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    while b - a > resolution {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

fn evolver_at(spec: &ProtocolSpec, t: f64) -> Result<Evolver> {
    let mut e = Evolver::new(spec, None)?;
    e.advance(t, None)?;
    Ok(e)
}

fn resolve_revival_time(spec: &ProtocolSpec) -> Result<f64> {
    match spec.revival_time {
        Some(t) if t > 0.0 => Ok(t),
        Some(t) => Err(Error::Configuration(format!(
            "revival time must be positive, got {t}"
        ))),
        None => find_revival_time(spec),
    }
}

struct Timeline {
    revival: f64,
    imprint: f64,
    readout: f64,
}

fn timeline(spec: &ProtocolSpec, revival: f64) -> Result<Timeline> {
    let imprint = 0.5 * revival + spec.imprint_offset;
    let readout = revival + spec.readout_offset;
    if imprint < 0.0 || readout < imprint + spec.imprint.duration {
        return Err(Error::Configuration(format!(
            "imprint at {imprint} (duration {}) does not precede readout at {readout}",
            spec.imprint.duration
        )));
    }
    Ok(Timeline {
        revival,
        imprint,
        readout,
    })
}

/// Ideal interferometer output for an imprinted phase `φ`:
/// `cos(φ/2) ψ_π - sin(φ/2) ψ₀`, up to a global phase.
pub fn ideal_output(initial: &SpectralState, phase: f64) -> SpectralState {
    let pi = rotate(initial, PI);
    let (s, c) = (0.5 * phase).sin_cos();
    SpectralState::from_fn(initial.cutoff(), |ell| {
        c * pi.amplitude(ell) - s * initial.amplitude(ell)
    })
    .expect("cutoff of an existing state")
}

/// Runs the experiment once.
pub fn run_protocol(spec: &ProtocolSpec) -> Result<ProtocolResult> {
    run_protocol_sampled(spec, &[])
}

/// Runs the experiment, also recording the grid state at each of
/// `sample_times` (clipped to the protocol duration).
pub fn run_protocol_sampled(spec: &ProtocolSpec, sample_times: &[f64]) -> Result<ProtocolResult> {
    spec.validate()?;
    let revival = resolve_revival_time(spec)?;
    let tl = timeline(spec, revival)?;
    let mut evolver = Evolver::new(spec, spec.flux)?;
    let initial = evolver.spectral(spec.overlap_cutoff())?;
    let snapshots = advance_through(&mut evolver, spec, &tl, sample_times, true)?;
    measure(spec, &evolver, &initial, &tl, snapshots)
}

/// Walks the evolver from its current time to the readout, applying the
/// imprint on the way.
fn advance_through(
    evolver: &mut Evolver,
    spec: &ProtocolSpec,
    tl: &Timeline,
    sample_times: &[f64],
    do_imprint: bool,
) -> Result<Vec<Snapshot>> {
    let n = spec.grid_size;
    let profile = spec.imprint.phase_profile(n);
    let pulse_end = tl.imprint + spec.imprint.duration;
    let pulse: Option<Vec<f64>> = (spec.imprint.duration > 0.0)
        .then(|| profile.iter().map(|p| -p / spec.imprint.duration).collect());

    let mut marks: Vec<f64> = sample_times
        .iter()
        .copied()
        .filter(|t| *t >= evolver.time && *t <= tl.readout)
        .collect();
    if do_imprint {
        marks.push(tl.imprint);
        marks.push(pulse_end);
    }
    marks.push(tl.readout);
    marks.sort_by(f64::total_cmp);
    marks.dedup();

    let mut snapshots = Vec::new();
    let mut imprinted = !do_imprint;
    let mut sample_iter = {
        let mut s: Vec<f64> = sample_times.to_vec();
        s.sort_by(f64::total_cmp);
        s.into_iter().peekable()
    };
    // samples before the current time are taken now
    while let Some(&t) = sample_iter.peek() {
        if t < evolver.time {
            sample_iter.next();
        } else {
            break;
        }
    }
    for mark in marks {
        let in_pulse =
            do_imprint && pulse.is_some() && evolver.time >= tl.imprint && mark <= pulse_end;
        let potential = if in_pulse { pulse.as_deref() } else { None };
        evolver.advance(mark - evolver.time, potential)?;
        if !imprinted && pulse.is_none() && mark == tl.imprint {
            evolver.imprint(&spec.imprint, n)?;
            imprinted = true;
        }
        while let Some(&t) = sample_iter.peek() {
            if t <= mark {
                snapshots.push(Snapshot {
                    time: t,
                    state: evolver.grid()?,
                });
                sample_iter.next();
            } else {
                break;
            }
        }
    }
    Ok(snapshots)
}

fn measure(
    spec: &ProtocolSpec,
    evolver: &Evolver,
    initial: &SpectralState,
    tl: &Timeline,
    snapshots: Vec<Snapshot>,
) -> Result<ProtocolResult> {
    let final_grid = evolver.grid()?;
    let final_spectral = evolver.spectral(spec.overlap_cutoff())?;
    let imbalance = evolver.read_out(&spec.readout)?;
    let flux_rotation = spec.flux.map_or(0.0, |f| f.rotation(0.0, tl.readout));
    let target = rotate(&ideal_output(initial, spec.imprint.phase), flux_rotation);
    Ok(ProtocolResult {
        fidelity: fidelity(&target, &final_spectral)?,
        centroid: circular_centroid(&final_spectral).ok(),
        final_spectral,
        final_grid,
        imbalance,
        revival_time: tl.revival,
        readout_time: tl.readout,
        snapshots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub phase: f64,
    pub imbalance: f64,
    pub fidelity: f64,
}

/// Runs the protocol for each imprinted phase. The evolution up to the
/// imprint is shared; the remaining runs are distributed over the rayon pool
/// and returned in input order.
pub fn sweep_phase(spec: &ProtocolSpec, phases: &[f64]) -> Result<Vec<PhasePoint>> {
    spec.validate()?;
    if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!("phase {p} is not finite")));
    }
    let revival = resolve_revival_time(spec)?;
    let tl = timeline(spec, revival)?;
    let mut shared = Evolver::new(spec, spec.flux)?;
    let initial = shared.spectral(spec.overlap_cutoff())?;
    shared.advance(tl.imprint, None)?;
    phases
        .par_iter()
        .map(|&phase| {
            let spec = spec.clone().with_phase(phase);
            let mut e = shared.clone();
            let n = spec.grid_size;
            if spec.imprint.duration > 0.0 {
                let pulse: Vec<f64> = spec
                    .imprint
                    .phase_profile(n)
                    .iter()
                    .map(|p| -p / spec.imprint.duration)
                    .collect();
                e.advance(spec.imprint.duration, Some(&pulse))?;
            } else {
                e.imprint(&spec.imprint, n)?;
            }
            advance_through(&mut e, &spec, &tl, &[], false)?;
            let r = measure(&spec, &e, &initial, &tl, Vec::new())?;
            Ok(PhasePoint {
                phase,
                imbalance: r.imbalance.imbalance,
                fidelity: r.fidelity,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingPoint {
    pub offset: f64,
    pub fidelity: f64,
    pub imbalance: f64,
}

/// Re-runs the protocol with both the imprint and the readout delayed by each
/// offset. The revival time is optimized once.
pub fn timing_sensitivity(spec: &ProtocolSpec, offsets: &[f64]) -> Result<Vec<TimingPoint>> {
    spec.validate()?;
    let revival = resolve_revival_time(spec)?;
    offsets
        .par_iter()
        .map(|&offset| {
            let mut s = spec.clone();
            s.revival_time = Some(revival);
            s.imprint_offset = spec.imprint_offset + offset;
            s.readout_offset = spec.readout_offset + offset;
            let r = run_protocol(&s)?;
            Ok(TimingPoint {
                offset,
                fidelity: r.fidelity,
                imbalance: r.imbalance.imbalance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal_spec() -> ProtocolSpec {
        ProtocolSpec::new(Trap::circular(136.68), Corrections::NONE)
    }

    #[test]
    fn ideal_revival_time() {
        let t = find_revival_time(&ideal_spec()).unwrap();
        assert!((t - TAU).abs() < 1e-6, "{t}");
    }

    #[test]
    fn zero_phase_gives_pi_rotation() {
        let mut spec = ideal_spec();
        spec.revival_time = Some(TAU);
        let r = run_protocol(&spec).unwrap();
        assert!((r.imbalance.imbalance + 1.0).abs() < 1e-12);
        assert!(r.fidelity > 1.0 - 1e-6);
        assert!((r.centroid.unwrap().abs() - PI).abs() < 1e-9);
    }

    #[test]
    fn uniform_imprint_follows_cosine() {
        let mut spec = ideal_spec();
        spec.revival_time = Some(TAU);
        for phi in [0.3, 1.0, FRAC_PI_2, 2.5] {
            let r = run_protocol(&spec.clone().with_phase(phi)).unwrap();
            assert!((r.imbalance.imbalance + phi.cos()).abs() < 1e-6, "{phi}");
            assert!(r.fidelity > 1.0 - 1e-9);
        }
    }

    #[test]
    fn sweep_matches_single_runs() {
        let mut spec = ideal_spec();
        spec.revival_time = Some(TAU);
        let phases = [0.0, 1.0, 2.0, 4.0];
        let sweep = sweep_phase(&spec, &phases).unwrap();
        for p in &sweep {
            let single = run_protocol(&spec.clone().with_phase(p.phase)).unwrap();
            assert!((p.imbalance - single.imbalance.imbalance).abs() < 1e-12);
        }
        assert_eq!(sweep.iter().map(|p| p.phase).collect::<Vec<_>>(), phases);
    }

    #[test]
    fn linear_solver_rejects_interactions() {
        let mut spec = ideal_spec();
        spec.coupling = 1.0;
        assert!(matches!(run_protocol(&spec), Err(Error::Configuration(_))));
    }

    #[test]
    fn revival_not_found_while_spreading() {
        let mut spec = ideal_spec();
        spec.search = RevivalSearch {
            lo: 0.05,
            hi: 0.1,
            resolution: 1e-6,
        };
        assert!(matches!(
            find_revival_time(&spec),
            Err(Error::RevivalNotFound { .. })
        ));
    }

    #[test]
    fn imprint_is_pure_phase() {
        let spec = ideal_spec().with_phase(1.3);
        let mut e = Evolver::new(&spec, None).unwrap();
        e.advance(PI, None).unwrap();
        let before = e.grid().unwrap().density();
        let mut g = e.grid().unwrap();
        let profile = spec.imprint.phase_profile(spec.grid_size);
        g.amplitudes_mut()
            .iter_mut()
            .zip(&profile)
            .for_each(|(c, p)| *c *= Complex64::from_polar(1.0, *p));
        for (a, b) in before.iter().zip(g.density()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_run_records_snapshots() {
        let mut spec = ideal_spec();
        spec.revival_time = Some(TAU);
        let r = run_protocol_sampled(&spec, &[0.0, 1.0, PI, TAU, 7.0]).unwrap();
        let times: Vec<f64> = r.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 1.0, PI, TAU]);
        assert!((r.snapshots[0].state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mistimed_readout_rejected() {
        let mut spec = ideal_spec();
        spec.revival_time = Some(TAU);
        spec.readout_offset = -4.0;
        assert!(matches!(run_protocol(&spec), Err(Error::Configuration(_))));
    }
}
