//! Static lattice description and Hamiltonian assembly.
//!
//! Energies are measured in the pump frequency ω_p (or the bare hopping scale
//! J for undriven runs, numerically the same thing since ε = 1). Times are
//! measured in periods `T_p = 2π / ω_p`, so one period is `TAU` in natural
//! units.

use std::f64::consts::{PI, TAU};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Natural-time length of one drive period.
pub const PERIOD: f64 = TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyUnit {
    #[default]
    PumpFrequency,
    BareHopping,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Unit cells N; the chain has 2N sites.
    pub n_cells: usize,
    pub epsilon: f64,
    pub gamma: f64,
    /// Optical lattice depth V0.
    pub v0: f64,
    /// Ratio μ/k² of reduced mass to squared wavenumber.
    pub mu_k2: f64,
    pub energy_unit: EnergyUnit,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            n_cells: 20,
            epsilon: 1.0,
            gamma: 0.0,
            v0: 0.125,
            mu_k2: 0.25,
            energy_unit: EnergyUnit::PumpFrequency,
        }
    }
}

impl LatticeParams {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n_cells == 0 {
            return Err(Error::InvalidParams("n_cells must be at least 1".into()));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!("gamma must be >= 0 (got {})", self.gamma)));
        }
        if !(self.v0 > 0.0) || !self.v0.is_finite() {
            return Err(Error::InvalidParams(format!("v0 must be > 0 (got {})", self.v0)));
        }
        if !(self.mu_k2 > 0.0) || !self.mu_k2.is_finite() {
            return Err(Error::InvalidParams(format!("mu_k2 must be > 0 (got {})", self.mu_k2)));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParams("epsilon must be finite".into()));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    /// Same lattice with the dissipation removed.
    pub fn hermitian(self) -> Self {
        self.with_gamma(0.0)
    }

    pub fn with_cells(self, n_cells: usize) -> Self {
        Self { n_cells, ..self }
    }
}

/// Couplings derived from the optical lattice at a given phase α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoppingSet {
    pub j1: f64,
    pub j2: f64,
    pub omega_vib: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Harmonic-approximation hopping amplitudes of the three-beam optical
/// lattice at relative laser phase `alpha` (radians, in `[0, π]`).
pub fn hopping_amplitudes(alpha: f64, params: &LatticeParams) -> Result<HoppingSet> {
    params.validate()?;
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let c = alpha.cos();
    let shape = 4.0 - c * c;
    let omega_vib = (8.0 * params.v0 / params.mu_k2 * shape).sqrt();
    let scale = (8.0 * params.v0 * params.mu_k2 * shape).powf(0.25);
    // Δ2(α) = Δ1(π − α) and cos(π − α) = −cos α.
    let delta1 = (0.5 * c).clamp(-1.0, 1.0).acos() * scale;
    let delta2 = (-0.5 * c).clamp(-1.0, 1.0).acos() * scale;
    let overlap = |d: f64| 0.5 * omega_vib * (-d * d).exp() * (d * d + 0.5);
    Ok(HoppingSet {
        j1: overlap(delta1),
        j2: overlap(delta2),
        omega_vib,
        delta1,
        delta2,
    })
}

/// Bond amplitude between site `k` and `k + 1` (0-based): even bonds lie
/// inside a unit cell.
#[inline]
pub(crate) fn bond(h: &HoppingSet, k: usize) -> f64 {
    if k.is_multiple_of(2) {
        h.j1
    } else {
        h.j2
    }
}

/// Real symmetric hopping matrix plus ε on the diagonal, i.e. the
/// Hamiltonian with the uniform −iγ shift removed.
pub fn hermitian_part(hoppings: &HoppingSet, params: &LatticeParams) -> Array2<f64> {
    let m = params.n_sites();
    let mut h = Array2::zeros((m, m));
    for k in 0..m {
        h[[k, k]] = params.epsilon;
    }
    for k in 0..m - 1 {
        let j = bond(hoppings, k);
        h[[k, k + 1]] = j;
        h[[k + 1, k]] = j;
    }
    h
}

/// Full (generally non-Hermitian) lattice Hamiltonian in the site order
/// (1,A), (1,B), …, (N,B) with open boundaries.
pub fn build_hamiltonian(hoppings: &HoppingSet, params: &LatticeParams) -> Array2<Complex64> {
    let shift = Complex64::new(0.0, -params.gamma);
    hermitian_part(hoppings, params).mapv(Complex64::from) + Array2::from_diag_elem(params.n_sites(), shift)
}

/// Piecewise-constant laser phase: `alpha_initial` on `[0, t_a]`,
/// `alpha_mid` on `(t_a, t_b]`, `alpha_final` afterwards. Times in periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSchedule {
    pub alpha_initial: f64,
    pub alpha_mid: f64,
    pub alpha_final: f64,
    pub t_a: f64,
    pub t_b: f64,
}

impl QuenchSchedule {
    pub fn new(alpha_initial: f64, alpha_mid: f64, alpha_final: f64, t_a: f64, t_b: f64) -> Result<Self> {
        let s = Self {
            alpha_initial,
            alpha_mid,
            alpha_final,
            t_a,
            t_b,
        };
        s.validate()?;
        Ok(s)
    }

    /// Topological → gapless → topological with switches at 10 and 30 periods.
    pub fn standard() -> Self {
        Self {
            alpha_initial: 0.75 * PI,
            alpha_mid: 0.5 * PI,
            alpha_final: 0.75 * PI,
            t_a: 10.0,
            t_b: 30.0,
        }
    }

    /// Topological → trivial → topological variant.
    pub fn trivial_quench() -> Self {
        Self {
            alpha_mid: 0.25 * PI,
            ..Self::standard()
        }
    }

    /// No quench: the same phase throughout.
    pub fn constant(alpha: f64) -> Self {
        Self {
            alpha_initial: alpha,
            alpha_mid: alpha,
            alpha_final: alpha,
            t_a: 0.0,
            t_b: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_a >= 0.0 && self.t_a <= self.t_b && self.t_b.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "need 0 <= t_a <= t_b (got t_a = {}, t_b = {})",
                self.t_a, self.t_b
            )));
        }
        for a in [self.alpha_initial, self.alpha_mid, self.alpha_final] {
            if !(0.0..=PI).contains(&a) {
                return Err(Error::AlphaOutOfRange(a));
            }
        }
        Ok(())
    }

    pub fn alpha_at(&self, t: f64) -> f64 {
        if t <= self.t_a {
            self.alpha_initial
        } else if t <= self.t_b {
            self.alpha_mid
        } else {
            self.alpha_final
        }
    }

    /// The three constant-phase intervals clipped to `[0, t_end]`, as
    /// `(start, end, alpha)`. Empty intervals are dropped except that the
    /// first interval always starts at zero.
    pub fn intervals(&self, t_end: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(3);
        let a = self.t_a.min(t_end);
        let b = self.t_b.min(t_end);
        out.push((0.0, a, self.alpha_initial));
        if b > a {
            out.push((a, b, self.alpha_mid));
        }
        if t_end > b {
            out.push((b, t_end, self.alpha_final));
        }
        out
    }
}
