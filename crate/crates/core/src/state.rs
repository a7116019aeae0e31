//! Wavefunctions on the ring in the angular-momentum basis and on a uniform
//! angular grid, and the transforms between them.
//!
//! The two representations are related by
//! `ψ(α) = Σ_ℓ c_ℓ e^{iℓα} / √(2π)`, and both are normalized so that
//! `Σ|c_ℓ|² = (2π/N) Σ_j |ψ(α_j)|² = 1`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Amplitudes `c_ℓ` for `ℓ = -L..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl SpectralState {
    /// `amps[i]` is the amplitude of `ℓ = i - cutoff`.
    pub fn new(cutoff: usize, amps: Vec<Complex64>) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be positive".into()));
        }
        if amps.len() != 2 * cutoff + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes for cutoff {cutoff}, got {}",
                2 * cutoff + 1,
                amps.len()
            )));
        }
        Ok(Self { cutoff, amps })
    }

    pub fn from_fn(cutoff: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        let l = cutoff as i64;
        Self::new(cutoff, (-l..=l).map(&mut f).collect())
    }

    /// The single angular-momentum eigenstate `|ℓ⟩`.
    pub fn eigenstate(cutoff: usize, ell: i64) -> Result<Self> {
        if ell.unsigned_abs() as usize > cutoff {
            return Err(Error::InvalidParameter(format!(
                "ℓ = {ell} outside cutoff {cutoff}"
            )));
        }
        Self::from_fn(cutoff, |l| {
            if l == ell {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Iterates over `(ℓ, c_ℓ)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let l = self.cutoff as i64;
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 - l, *c))
    }

    /// `c_ℓ`, zero outside the cutoff.
    pub fn amplitude(&self, ell: i64) -> Complex64 {
        let idx = ell + self.cutoff as i64;
        if idx < 0 || idx as usize >= self.amps.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[idx as usize]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(
                "cannot normalize a null state".into(),
            ));
        }
        self.amps.iter_mut().for_each(|c| *c /= n);
        Ok(self)
    }

    /// Largest of `|c_L|²` and `|c_{-L}|²`.
    pub fn edge_occupation(&self) -> f64 {
        self.amps[0]
            .norm_sqr()
            .max(self.amps[2 * self.cutoff].norm_sqr())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpectralState) -> Result<Complex64> {
        if self.cutoff != other.cutoff {
            return Err(Error::InvalidParameter(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff, other.cutoff
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies each amplitude by `f(ℓ)`.
    pub fn map_diagonal(&self, mut f: impl FnMut(i64) -> Complex64) -> SpectralState {
        let l = self.cutoff as i64;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, c)| c * f(i as i64 - l))
            .collect();
        SpectralState {
            cutoff: self.cutoff,
            amps,
        }
    }

    /// Same state with a larger or smaller cutoff; truncated amplitudes are
    /// dropped.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<SpectralState> {
        SpectralState::from_fn(cutoff, |l| self.amplitude(l))
    }
}

/// Wrapped Gaussian packet centred at `center`, built as
/// `c_ℓ ∝ exp(-ℓ²w²/4 - iℓ·center)`.
///
/// The density of the resulting state is proportional to
/// `exp(-2(α - center)²/w²)`. The harmonic-oscillator ground state of angular
/// width `σ` corresponds to `w = √2 σ` (see [`harmonic_ground_packet`]).
pub fn gaussian_packet(center: f64, width: f64, cutoff: usize) -> Result<SpectralState> {
    if !(width > 0.0 && width < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "packet width must lie in (0, 1) rad, got {width}"
        )));
    }
    let required = (4.0 / width).ceil() as usize;
    if cutoff < required {
        return Err(Error::CutoffInsufficient {
            cutoff,
            width,
            required,
        });
    }
    SpectralState::from_fn(cutoff, |l| {
        let l = l as f64;
        Complex64::from_polar((-l * l * width * width / 4.0).exp(), -l * center)
    })?
    .normalized()
}

/// Ground state `ψ(α) ∝ exp(-(α - center)²/2σ²)` of a harmonic angular well,
/// with `σ = 1/√ω` for well frequency `ω` in internal units.
pub fn harmonic_ground_packet(center: f64, sigma: f64, cutoff: usize) -> Result<SpectralState> {
    gaussian_packet(center, std::f64::consts::SQRT_2 * sigma, cutoff)
}

/// Rotates the state by `angle`: `ψ(α) → ψ(α - angle)`, i.e.
/// `c_ℓ → e^{-iℓ·angle} c_ℓ`. A positive angle moves the density towards
/// positive `α`. For the π-rotation `e^{iπL_z/ħ}` both signs agree.
pub fn rotate(state: &SpectralState, angle: f64) -> SpectralState {
    state.map_diagonal(|l| Complex64::from_polar(1.0, -(l as f64) * angle))
}

/// Amplitudes `ψ(α_j)` at `α_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    amps: Vec<Complex64>,
}

impl GridState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        Ok(Self { amps })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = (0..n).map(|j| f(grid_angle(j, n))).collect();
        Self::new(amps)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> {
        let n = self.amps.len();
        (0..n).map(move |j| grid_angle(j, n))
    }

    /// Quadrature weight `2π/N`.
    pub fn measure(&self) -> f64 {
        TAU / self.amps.len() as f64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.measure() * self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(
                "cannot normalize a null state".into(),
            ));
        }
        self.amps.iter_mut().for_each(|c| *c /= n);
        Ok(())
    }

    /// `|ψ(α_j)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `⟨self|other⟩` by rectangle quadrature.
    pub fn inner(&self, other: &GridState) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::InvalidParameter(format!(
                "grid size mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let s: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.measure())
    }
}

pub fn grid_angle(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Angular momentum carried by FFT bin `k` of an `n`-point grid.
pub fn bin_momentum(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Forward and inverse FFT plans for one grid size.
#[derive(Clone)]
pub struct RingFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RingFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RingFft").field("n", &self.n).finish()
    }
}

impl RingFft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized `Σ_j x_j e^{-2πijk/N}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unnormalized `Σ_k x_k e^{+2πijk/N}`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

fn check_aliasing(cutoff: usize, n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "grid size must be a power of two, got {n}"
        )));
    }
    if n < 2 * cutoff + 2 {
        return Err(Error::InvalidParameter(format!(
            "grid of {n} points aliases cutoff {cutoff} (need N >= {})",
            2 * cutoff + 2
        )));
    }
    Ok(())
}

/// Synthesizes `ψ(α_j) = Σ_ℓ c_ℓ e^{iℓα_j}/√(2π)` on an `n`-point grid.
pub fn to_grid(state: &SpectralState, n: usize) -> Result<GridState> {
    check_aliasing(state.cutoff, n)?;
    to_grid_with(state, &RingFft::new(n))
}

pub fn to_grid_with(state: &SpectralState, fft: &RingFft) -> Result<GridState> {
    let n = fft.len();
    check_aliasing(state.cutoff, n)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (l, c) in state.iter() {
        buf[l.rem_euclid(n as i64) as usize] = c;
    }
    fft.inverse(&mut buf);
    let scale = 1.0 / TAU.sqrt();
    buf.iter_mut().for_each(|x| *x *= scale);
    GridState::new(buf)
}

/// Projects a grid state onto `ℓ = -L..=L`. Content beyond the cutoff is
/// discarded.
pub fn to_spectral(state: &GridState, cutoff: usize) -> Result<SpectralState> {
    check_aliasing(cutoff, state.len())?;
    to_spectral_with(state, cutoff, &RingFft::new(state.len()))
}

pub fn to_spectral_with(state: &GridState, cutoff: usize, fft: &RingFft) -> Result<SpectralState> {
    let n = state.len();
    if fft.len() != n {
        return Err(Error::InvalidParameter("FFT plan size mismatch".into()));
    }
    check_aliasing(cutoff, n)?;
    let mut buf = state.amps.clone();
    fft.forward(&mut buf);
    let scale = TAU.sqrt() / n as f64;
    SpectralState::from_fn(cutoff, |l| buf[l.rem_euclid(n as i64) as usize] * scale)
}
