//! Measurements on ring states: density, fidelity, weighted population
//! imbalance and the circular centroid.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{grid_angle, GridState, SpectralState};

/// Common interface of the spectral and grid representations.
pub trait RingWavefunction {
    fn overlap(&self, other: &Self) -> Result<Complex64>;

    /// `∫ e^{iα} |ψ(α)|² dα`.
    fn circular_moment(&self) -> Complex64;
}

impl RingWavefunction for SpectralState {
    fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.inner(other)
    }

    fn circular_moment(&self) -> Complex64 {
        self.iter()
            .map(|(l, c)| self.amplitude(l + 1).conj() * c)
            .sum()
    }
}

impl RingWavefunction for GridState {
    fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.inner(other)
    }

    fn circular_moment(&self) -> Complex64 {
        let s: Complex64 = self
            .amplitudes()
            .iter()
            .zip(self.angles())
            .map(|(c, a)| Complex64::from_polar(c.norm_sqr(), a))
            .sum();
        s * self.measure()
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity<S: RingWavefunction>(a: &S, b: &S) -> Result<f64> {
    Ok(a.overlap(b)?.norm_sqr().min(1.0))
}

/// Resultant lengths below this leave the centroid undefined.
pub const MIN_RESULTANT: f64 = 1e-6;

/// `arg ∫ e^{iα} n(α) dα`, in `(-π, π]`.
pub fn circular_centroid<S: RingWavefunction>(state: &S) -> Result<f64> {
    let m = state.circular_moment();
    if m.norm() < MIN_RESULTANT {
        return Err(Error::CentroidUndefined(m.norm()));
    }
    Ok(m.arg())
}

/// Sampled density `n(α_j) = |ψ(α_j)|²`, normalized to `∫ n dα = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub angles: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityProfile {
    pub fn from_grid(state: &GridState) -> Self {
        Self {
            angles: state.angles().collect(),
            density: state.density(),
        }
    }

    pub fn integral(&self) -> f64 {
        TAU / self.density.len() as f64 * self.density.iter().sum::<f64>()
    }
}

/// Atom-count weighting inside the readout windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `cos²(α - center)`.
    Cos2,
    Uniform,
}

/// An open arc `(start, start + length)` on the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub length: f64,
}

impl Window {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length < TAU) || !start.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "window must be a proper sub-arc, got start {start}, length {length}"
            )));
        }
        Ok(Self { start, length })
    }

    /// Window centred on `mid` with the given full width.
    pub fn centered(mid: f64, width: f64) -> Result<Self> {
        Self::new(mid - 0.5 * width, width)
    }

    pub fn contains(&self, alpha: f64) -> bool {
        let d = (alpha - self.start).rem_euclid(TAU);
        d > 0.0 && d < self.length
    }

    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            start: self.start + angle,
            length: self.length,
        }
    }

    fn overlaps(&self, other: &Window) -> bool {
        const SLACK: f64 = 1e-12;
        let d = (other.start - self.start).rem_euclid(TAU);
        let d = if TAU - d < SLACK { 0.0 } else { d };
        d < self.length - SLACK || d + other.length > TAU + SLACK
    }

    /// Distance from each edge to the nearest grid point of an `n`-point grid,
    /// maximized over both edges.
    fn snap_distance(&self, n: usize) -> f64 {
        let h = TAU / n as f64;
        [self.start, self.start + self.length]
            .iter()
            .map(|e| {
                let r = e.rem_euclid(h);
                r.min(h - r)
            })
            .fold(0.0, f64::max)
    }
}

/// Right/left readout geometry for the population imbalance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readout {
    /// Origin of the weight function; the initial packet position.
    pub center: f64,
    pub weight: Weight,
    pub right: Window,
    pub left: Window,
}

impl Readout {
    /// Right half `(center - π/2, center + π/2)`, left half the remainder.
    pub fn halves(center: f64, weight: Weight) -> Self {
        Self {
            center,
            weight,
            right: Window {
                start: center - FRAC_PI_2,
                length: PI,
            },
            left: Window {
                start: center + FRAC_PI_2,
                length: PI,
            },
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            center: self.center + angle,
            weight: self.weight,
            right: self.right.rotated(angle),
            left: self.left.rotated(angle),
        }
    }

    fn weight_at(&self, alpha: f64) -> f64 {
        match self.weight {
            Weight::Cos2 => (alpha - self.center).cos().powi(2),
            Weight::Uniform => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImbalanceReading {
    /// `(N_R - N_L)/(N_R + N_L)`.
    pub imbalance: f64,
    pub right: f64,
    pub left: f64,
    /// Largest distance between a window edge and the nearest grid point.
    pub snap_distance: f64,
}

/// Weighted population imbalance `(N_R - N_L)/(N_R + N_L)` by rectangle
/// quadrature over the grid points inside each window.
pub fn population_imbalance(state: &GridState, readout: &Readout) -> Result<ImbalanceReading> {
    if readout.right.overlaps(&readout.left) {
        return Err(Error::InvalidParameter("readout windows overlap".into()));
    }
    let n = state.len();
    let h = state.measure();
    let (mut right, mut left) = (0.0, 0.0);
    for (j, c) in state.amplitudes().iter().enumerate() {
        let a = grid_angle(j, n);
        let w = readout.weight_at(a) * c.norm_sqr() * h;
        if readout.right.contains(a) {
            right += w;
        } else if readout.left.contains(a) {
            left += w;
        }
    }
    let total = right + left;
    if total < 1e-12 {
        return Err(Error::IndeterminateImbalance(total));
    }
    Ok(ImbalanceReading {
        imbalance: ((right - left) / total).clamp(-1.0, 1.0),
        right,
        left,
        snap_distance: readout
            .right
            .snap_distance(n)
            .max(readout.left.snap_distance(n)),
    })
}
