//! Time evolution on the ring.
//!
//! Linear evolution is diagonal in `ℓ` and applied exactly. Interacting
//! condensates are propagated with a symmetric (Strang) split step: half a
//! local step on the grid, a full kinetic step in the `ℓ` basis, another half
//! local step. Times are in units of `mR²/ħ`, so the ideal revival time is
//! `2π`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::constants::CODATA;
use crate::error::{Error, Result};
use crate::spectrum::{ideal_dispersion, DispersionModel, TrapSpec};
use crate::state::{bin_momentum, wrap_angle, GridState, RingFft, SpectralState};

/// Largest local phase `(V + g|ψ|²)·dt/2` accepted in one half step, rad.
pub const MAX_LOCAL_PHASE: f64 = 0.1;

/// Gauge flux threading the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSpec {
    /// `γΦ/ħ`: rotation of the revival per ideal revival time.
    pub angle: f64,
    /// Time from which the flux is present.
    pub turn_on: f64,
}

impl FluxSpec {
    pub fn new(angle: f64) -> Self {
        Self {
            angle,
            turn_on: 0.0,
        }
    }

    /// Rotation rate, rad per unit time.
    pub fn rate(&self) -> f64 {
        self.angle / TAU
    }

    /// Rotation accumulated during `[start, start + duration]`.
    pub fn rotation(&self, start: f64, duration: f64) -> f64 {
        let active = (start + duration - start.max(self.turn_on)).max(0.0);
        self.rate() * active
    }
}

/// Contact interactions of an `N`-atom condensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSpec {
    /// s-wave scattering length, m. Negative values are attractive.
    pub scattering_length: f64,
    pub atom_number: f64,
}

impl InteractionSpec {
    pub const NONE: InteractionSpec = InteractionSpec {
        scattering_length: 0.0,
        atom_number: 0.0,
    };

    pub fn is_attractive(&self) -> bool {
        self.scattering_length < 0.0
    }

    /// One-dimensional coupling `g₁ = 2ħω⊥aN`, J m, from integrating the 3D
    /// contact coupling over a Gaussian transverse ground state.
    pub fn coupling_si(&self, trap: &TrapSpec) -> f64 {
        2.0 * CODATA.hbar * trap.omega_perp * self.scattering_length * self.atom_number
    }

    /// `g₁` in internal units; multiplies `|ψ(α)|²` directly.
    pub fn coupling(&self, trap: &TrapSpec) -> Result<f64> {
        Ok(trap.units()?.coupling_to_internal(self.coupling_si(trap)))
    }
}

fn check_model(model: &DispersionModel, cutoff: usize) -> Result<()> {
    if model.cutoff() < cutoff {
        return Err(Error::InvalidParameter(format!(
            "dispersion cutoff {} is below the state cutoff {cutoff}",
            model.cutoff()
        )));
    }
    Ok(())
}

/// Exact linear evolution from time zero.
pub fn evolve_linear(
    state: &SpectralState,
    duration: f64,
    model: &DispersionModel,
    flux: Option<&FluxSpec>,
) -> Result<SpectralState> {
    evolve_linear_from(state, 0.0, duration, model, flux)
}

/// Exact linear evolution over `[start, start + duration]`:
/// `c_ℓ → e^{-iE(ℓ)t} e^{-iℓθ} c_ℓ` with `θ` the flux rotation accumulated in
/// the interval. The gauge is symmetric, so only the flux enters.
pub fn evolve_linear_from(
    state: &SpectralState,
    start: f64,
    duration: f64,
    model: &DispersionModel,
    flux: Option<&FluxSpec>,
) -> Result<SpectralState> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    check_model(model, state.cutoff())?;
    let theta = flux.map_or(0.0, |f| f.rotation(start, duration));
    Ok(state.map_diagonal(|l| {
        let e = model.energy(l).expect("model covers the state cutoff");
        Complex64::from_polar(1.0, -e * duration - l as f64 * theta)
    }))
}

/// Free evolution for half the ideal revival time, which equals
/// `e^{-iπ/4}(1 + i e^{iπL_z/ħ})/√2`: a balanced superposition of the input
/// and its π-rotated copy.
pub fn half_revival_superposition(state: &SpectralState) -> SpectralState {
    let model = ideal_dispersion(state.cutoff());
    evolve_linear(state, PI, &model, None).expect("ideal model matches the state")
}

/// One Strang splitting scheme for a fixed step, grid and Hamiltonian.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    fft: RingFft,
    dt: f64,
    kinetic: Vec<Complex64>,
    coupling: f64,
    potential: Option<Vec<f64>>,
    buf: Vec<Complex64>,
}

impl SplitStepper {
    /// `flux_rate` is the rotation rate in rad per unit time (zero for no
    /// flux); `potential` is sampled on the grid.
    pub fn new(
        n: usize,
        dt: f64,
        model: &DispersionModel,
        coupling: f64,
        potential: Option<Vec<f64>>,
        flux_rate: f64,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two, got {n}"
            )));
        }
        check_model(model, n / 2)?;
        if let Some(v) = &potential {
            if v.len() != n {
                return Err(Error::InvalidParameter(
                    "potential length differs from grid".into(),
                ));
            }
        }
        let kinetic = (0..n)
            .map(|k| {
                let l = bin_momentum(k, n);
                let e = model.energy(l).expect("checked above");
                Complex64::from_polar(1.0 / n as f64, -(e + l as f64 * flux_rate) * dt)
            })
            .collect();
        Ok(Self {
            fft: RingFft::new(n),
            dt,
            kinetic,
            coupling,
            potential,
            buf: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid_size(&self) -> usize {
        self.fft.len()
    }

    fn local_half(&self, psi: &mut [Complex64]) -> Result<()> {
        let half = 0.5 * self.dt;
        let mut worst: f64 = 0.0;
        for (j, c) in psi.iter_mut().enumerate() {
            let v = self.potential.as_ref().map_or(0.0, |p| p[j]);
            let phase = (v + self.coupling * c.norm_sqr()) * half;
            worst = worst.max(phase.abs());
            *c *= Complex64::from_polar(1.0, -phase);
        }
        if worst > MAX_LOCAL_PHASE {
            return Err(Error::StepSize {
                phase: worst,
                limit: MAX_LOCAL_PHASE,
            });
        }
        Ok(())
    }

    pub fn step(&mut self, state: &mut GridState) -> Result<()> {
        if state.len() != self.fft.len() {
            return Err(Error::InvalidParameter(
                "state and stepper grids differ".into(),
            ));
        }
        let psi = state.amplitudes_mut();
        self.local_half(psi)?;
        self.buf.copy_from_slice(psi);
        self.fft.forward(&mut self.buf);
        self.buf
            .iter_mut()
            .zip(&self.kinetic)
            .for_each(|(b, k)| *b *= k);
        self.fft.inverse(&mut self.buf);
        psi.copy_from_slice(&self.buf);
        self.local_half(psi)
    }

    pub fn run(&mut self, state: &mut GridState, steps: usize) -> Result<()> {
        (0..steps).try_for_each(|_| self.step(state))
    }
}

/// One split step of size `dt` for `V(α) + g|ψ|²` on top of the dispersion.
pub fn step_nonlinear(
    state: &GridState,
    dt: f64,
    model: &DispersionModel,
    coupling: f64,
    potential: Option<&[f64]>,
) -> Result<GridState> {
    let mut stepper = SplitStepper::new(
        state.len(),
        dt,
        model,
        coupling,
        potential.map(<[f64]>::to_vec),
        0.0,
    )?;
    let mut out = state.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// Evolves `state` for `duration` with steps no longer than `max_dt`; the
/// interval is divided into equal steps so it is covered exactly.
pub fn evolve_split(
    state: &mut GridState,
    duration: f64,
    max_dt: f64,
    model: &DispersionModel,
    coupling: f64,
    potential: Option<Vec<f64>>,
    flux_rate: f64,
) -> Result<()> {
    if duration <= 0.0 {
        return Ok(());
    }
    let steps = (duration / max_dt).ceil().max(1.0) as usize;
    let mut stepper = SplitStepper::new(
        state.len(),
        duration / steps as f64,
        model,
        coupling,
        potential,
        flux_rate,
    )?;
    stepper.run(state, steps)
}

/// Step budget per relaxation stage of [`ground_state_imaginary_time`].
pub const IMAGINARY_TIME_BUDGET: usize = 100_000;

/// Mean-field energy `⟨-½∂²⟩ + ⟨V⟩ + (g/2)∫|ψ|⁴`.
pub fn mean_field_energy(
    state: &GridState,
    potential: &[f64],
    coupling: f64,
    fft: &RingFft,
) -> f64 {
    let n = state.len();
    let h = state.measure();
    let mut buf = state.amplitudes().to_vec();
    fft.forward(&mut buf);
    // Parseval: Σ_j |ψ_j|² h = (2π/N²) Σ_k |ψ̂_k|²
    let kinetic: f64 = buf
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let l = bin_momentum(k, n) as f64;
            0.5 * l * l * c.norm_sqr()
        })
        .sum::<f64>()
        * h
        / n as f64;
    let local: f64 = state
        .amplitudes()
        .iter()
        .zip(potential)
        .map(|(c, v)| {
            let d = c.norm_sqr();
            v * d + 0.5 * coupling * d * d
        })
        .sum::<f64>()
        * h;
    kinetic + local
}

/// Lowest state of `-½∂²_α + ½ω²(α - center)² + g|ψ|²` (wrapped harmonic
/// well, internal units) by norm-preserving imaginary-time split stepping.
///
/// Relaxation runs in stages of decreasing step; the final stage stops once
/// the energy changes by less than `tolerance` in one step.
pub fn ground_state_imaginary_time(
    well: f64,
    center: f64,
    coupling: f64,
    n: usize,
    tolerance: f64,
) -> Result<GridState> {
    if !(well > 0.0 && well.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "well frequency must be positive, got {well}"
        )));
    }
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "grid size must be a power of two, got {n}"
        )));
    }
    let fft = RingFft::new(n);
    let sigma = well.sqrt().recip();
    let potential: Vec<f64> = (0..n)
        .map(|j| {
            let d = wrap_angle(crate::state::grid_angle(j, n) - center);
            0.5 * well * well * d * d
        })
        .collect();
    let mut psi = GridState::from_fn(n, |a| {
        let d = wrap_angle(a - center);
        Complex64::new((-0.5 * d * d / (sigma * sigma)).exp(), 0.0)
    })?;
    psi.normalize()?;

    let mut energy = mean_field_energy(&psi, &potential, coupling, &fft);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for scale in [1e-1, 1e-2, 1e-3] {
        let dt = scale / well;
        let kinetic: Vec<f64> = (0..n)
            .map(|k| {
                let l = bin_momentum(k, n) as f64;
                (-0.5 * l * l * dt).exp() / n as f64
            })
            .collect();
        let local = |psi: &mut GridState| {
            for (c, v) in psi.amplitudes_mut().iter_mut().zip(&potential) {
                *c *= (-(v + coupling * c.norm_sqr()) * 0.5 * dt).exp();
            }
        };
        let mut converged = false;
        let mut change = f64::INFINITY;
        for _ in 0..IMAGINARY_TIME_BUDGET {
            local(&mut psi);
            buf.copy_from_slice(psi.amplitudes());
            fft.forward(&mut buf);
            buf.iter_mut().zip(&kinetic).for_each(|(b, k)| *b *= k);
            fft.inverse(&mut buf);
            psi.amplitudes_mut().copy_from_slice(&buf);
            local(&mut psi);
            psi.normalize()?;
            let e = mean_field_energy(&psi, &potential, coupling, &fft);
            change = (e - energy).abs();
            energy = e;
            if change < tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                steps: IMAGINARY_TIME_BUDGET,
                last_change: change,
            });
        }
    }
    // fix the global phase: real and positive at the well centre
    let j0 = ((center.rem_euclid(TAU)) / TAU * n as f64).round() as usize % n;
    let phase = psi.amplitudes()[j0].conj() / psi.amplitudes()[j0].norm();
    psi.amplitudes_mut().iter_mut().for_each(|c| *c *= phase);
    Ok(psi)
}
