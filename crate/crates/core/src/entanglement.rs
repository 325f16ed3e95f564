//! Free-fermion entanglement from two-point correlation matrices
//! `C_mn = ⟨c_m† c_n⟩`.
//!
//! Entropies use natural logarithms; divide by `ln 2` for bits.

use std::ops::Range;

use ndarray::Array2;
use num_complex::Complex64;

use crate::dynamics::PumpConfig;
use crate::eigensolver::{eig_selfadjoint, eigvals_hermitian, lattice_eigen};
use crate::error::{Error, Result};
use crate::model::{hermitian_part, hopping_amplitudes, LatticeParams, PERIOD};

/// Eigenvalues of a correlation matrix may stray this far outside `[0, 1]`
/// before they are treated as an error rather than rounding.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub entries: Array2<Complex64>,
    /// Chain site (0-based) of each row/column.
    pub sites: Vec<usize>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().iter().map(|z| z.re).sum()
    }

    /// Sum of `|ψ⟩⟨ψ|` over the first `filled` orbitals (columns of `orbitals`).
    pub fn from_orbitals(orbitals: &Array2<f64>, filled: usize) -> Self {
        let m = orbitals.nrows();
        let occ = orbitals.slice(ndarray::s![.., ..filled]);
        let c = occ.dot(&occ.t());
        Self {
            entries: c.mapv(Complex64::from),
            sites: (0..m).collect(),
        }
    }
}

/// Four contiguous blocks in spatial order A, B, D, C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: [Range<usize>; 4],
}

impl Partition {
    pub fn new(lengths: [usize; 4]) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(Error::InvalidPartition(format!("empty block in {lengths:?}")));
        }
        let mut start = 0;
        let blocks = lengths.map(|l| {
            let r = start..start + l;
            start += l;
            r
        });
        Ok(Self { blocks })
    }

    /// Equal blocks of `n_sites / 4`; needs an even number of unit cells.
    pub fn even(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || !n_sites.is_multiple_of(4) {
            return Err(Error::InvalidPartition(format!(
                "{n_sites} sites cannot be split into four equal blocks"
            )));
        }
        let q = n_sites / 4;
        Self::new([q; 4])
    }

    pub fn n_sites(&self) -> usize {
        self.blocks[3].end
    }

    pub fn a(&self) -> Vec<usize> {
        self.blocks[0].clone().collect()
    }

    pub fn b(&self) -> Vec<usize> {
        self.blocks[1].clone().collect()
    }

    pub fn d(&self) -> Vec<usize> {
        self.blocks[2].clone().collect()
    }

    pub fn c(&self) -> Vec<usize> {
        self.blocks[3].clone().collect()
    }

    pub fn ab(&self) -> Vec<usize> {
        [self.a(), self.b()].concat()
    }

    pub fn bc(&self) -> Vec<usize> {
        [self.b(), self.c()].concat()
    }

    pub fn abc(&self) -> Vec<usize> {
        [self.a(), self.b(), self.c()].concat()
    }
}

/// Ground state at half filling (N particles on 2N sites). A degenerate
/// midgap pair is filled with its mirror-symmetric member.
pub fn ground_state_correlation(params: &LatticeParams, alpha: f64) -> Result<CorrelationMatrix> {
    if params.gamma != 0.0 {
        return Err(Error::DissipativeModel(params.gamma));
    }
    let decomp = lattice_eigen(params, alpha)?;
    Ok(CorrelationMatrix::from_orbitals(&decomp.vectors, params.n_cells))
}

/// Principal submatrix on the given chain sites.
pub fn restrict_correlation(c: &CorrelationMatrix, sites: &[usize]) -> Result<CorrelationMatrix> {
    let pos: Vec<usize> = sites
        .iter()
        .map(|s| {
            c.sites
                .iter()
                .position(|x| x == s)
                .ok_or(Error::SiteOutOfRange { site: *s, len: c.dim() })
        })
        .collect::<Result<_>>()?;
    let mut entries = Array2::zeros((pos.len(), pos.len()));
    for (i, &pi) in pos.iter().enumerate() {
        for (j, &pj) in pos.iter().enumerate() {
            entries[[i, j]] = c.entries[[pi, pj]];
        }
    }
    Ok(CorrelationMatrix {
        entries,
        sites: sites.to_vec(),
    })
}

/// `−Σ [ζ ln ζ + (1−ζ) ln(1−ζ)]` over correlation eigenvalues `ζ`.
pub fn binary_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &z in eigenvalues {
        if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&z) {
            return Err(Error::UnphysicalCorrelation(z));
        }
        let z = z.clamp(0.0, 1.0);
        if z > 0.0 {
            s -= z * z.ln();
        }
        if z < 1.0 {
            s -= (1.0 - z) * (-z).ln_1p();
        }
    }
    Ok(s)
}

pub fn entropy_from_correlation(c: &CorrelationMatrix) -> Result<f64> {
    binary_entropy(&eigvals_hermitian(&c.entries)?)
}

fn subsystem_entropy(c: &CorrelationMatrix, sites: &[usize]) -> Result<f64> {
    entropy_from_correlation(&restrict_correlation(c, sites)?)
}

/// `S_AB + S_BC − S_ABC − S_B` of a full-chain correlation matrix.
pub fn disconnected_entropy_of(c: &CorrelationMatrix, partition: &Partition) -> Result<f64> {
    if partition.n_sites() != c.dim() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} sites, correlation matrix {}",
            partition.n_sites(),
            c.dim()
        )));
    }
    Ok(subsystem_entropy(c, &partition.ab())? + subsystem_entropy(c, &partition.bc())?
        - subsystem_entropy(c, &partition.abc())?
        - subsystem_entropy(c, &partition.b())?)
}

pub fn disconnected_entropy(params: &LatticeParams, alpha: f64, partition: &Partition) -> Result<f64> {
    disconnected_entropy_of(&ground_state_correlation(params, alpha)?, partition)
}

/// Single-particle propagator `U(t) = e^{−iHt}` of a fixed Hermitian lattice
/// Hamiltonian, reused across many times.
pub struct CorrelationPropagator {
    vectors: Array2<f64>,
    values: Vec<f64>,
}

impl CorrelationPropagator {
    pub fn new(params: &LatticeParams, alpha: f64) -> Result<Self> {
        if params.gamma != 0.0 {
            return Err(Error::DissipativeModel(params.gamma));
        }
        let hop = hopping_amplitudes(alpha, params)?;
        let d = eig_selfadjoint(&hermitian_part(&hop, params))?;
        Ok(Self {
            vectors: d.vectors,
            values: d.values.to_vec(),
        })
    }

    fn propagator(&self, t: f64) -> Array2<Complex64> {
        let tn = t * PERIOD;
        let m = self.values.len();
        let phased = Array2::from_shape_fn((m, m), |(i, k)| {
            self.vectors[[i, k]] * Complex64::from_polar(1.0, -self.values[k] * tn)
        });
        phased.dot(&self.vectors.t().mapv(Complex64::from))
    }

    /// `⟨c_m†(t) c_n(t)⟩ = (U* C0 Uᵀ)_mn` for `t` in periods.
    pub fn evolve(&self, c0: &CorrelationMatrix, t: f64) -> Result<CorrelationMatrix> {
        let m = self.values.len();
        if c0.dim() != m || c0.sites.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(Error::NotFullChain { got: c0.dim(), expected: m });
        }
        let u = self.propagator(t);
        let entries = u.mapv(|z| z.conj()).dot(&c0.entries).dot(&u.t());
        Ok(CorrelationMatrix {
            entries,
            sites: c0.sites.clone(),
        })
    }
}

/// Heisenberg evolution of a full-chain correlation matrix under the
/// undriven, lossless Hamiltonian at `alpha_post` for `t` periods.
pub fn evolve_correlation(
    c0: &CorrelationMatrix,
    alpha_post: f64,
    t: f64,
    params: &LatticeParams,
    pump: &PumpConfig,
) -> Result<CorrelationMatrix> {
    if !pump.is_off() {
        return Err(Error::DrivenModel);
    }
    CorrelationPropagator::new(params, alpha_post)?.evolve(c0, t)
}

/// `S^D(t)` after a sudden quench from the ground state at `alpha_pre` to the
/// Hamiltonian at `alpha_post`, as `(t, S^D)` pairs.
pub fn sd_dynamics(
    params: &LatticeParams,
    alpha_pre: f64,
    alpha_post: f64,
    times: &[f64],
    partition: &Partition,
) -> Result<Vec<(f64, f64)>> {
    let c0 = ground_state_correlation(params, alpha_pre)?;
    let prop = CorrelationPropagator::new(params, alpha_post)?;
    times
        .iter()
        .map(|&t| Ok((t, disconnected_entropy_of(&prop.evolve(&c0, t)?, partition)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::f64::consts::{LN_2, PI};

    fn diag(values: &[f64]) -> CorrelationMatrix {
        let n = values.len();
        let mut e = Array2::zeros((n, n));
        for (i, v) in values.iter().enumerate() {
            e[[i, i]] = Complex64::from(*v);
        }
        CorrelationMatrix {
            entries: e,
            sites: (0..n).collect(),
        }
    }

    #[test]
    fn pure_and_mixed_modes() {
        assert_eq!(entropy_from_correlation(&diag(&[0.0, 1.0])).unwrap(), 0.0);
        assert!((entropy_from_correlation(&diag(&[0.5])).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn clamping_and_rejection() {
        assert_eq!(binary_entropy(&[-5e-10, 1.0 + 5e-10]).unwrap(), 0.0);
        assert!(matches!(binary_entropy(&[-1e-6]), Err(Error::UnphysicalCorrelation(_))));
        assert!(matches!(binary_entropy(&[1.1]), Err(Error::UnphysicalCorrelation(_))));
    }

    #[test]
    fn ground_state_is_half_filled_projector() {
        let p = LatticeParams::default();
        for alpha in [0.25 * PI, 0.5 * PI, 0.75 * PI] {
            let c = ground_state_correlation(&p, alpha).unwrap();
            assert!((c.trace() - 20.0).abs() < 1e-10);
            let sq = c.entries.dot(&c.entries) - &c.entries;
            assert!(sq.iter().fold(0.0f64, |a, z| a.max(z.norm())) < 1e-8);
            assert!(c.entries.diag().iter().all(|z| z.re >= -1e-12 && z.re <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_dissipation_and_drive() {
        let p = LatticeParams::default().with_gamma(0.0025);
        assert!(matches!(ground_state_correlation(&p, 1.0), Err(Error::DissipativeModel(_))));
        let c0 = ground_state_correlation(&p.hermitian(), 2.0).unwrap();
        assert!(matches!(
            evolve_correlation(&c0, 1.5, 1.0, &p, &PumpConfig::off()),
            Err(Error::DissipativeModel(_))
        ));
        assert!(matches!(
            evolve_correlation(&c0, 1.5, 1.0, &p.hermitian(), &PumpConfig::standard()),
            Err(Error::DrivenModel)
        ));
    }

    #[test]
    fn restriction() {
        let c = ground_state_correlation(&LatticeParams::default(), 0.6 * PI).unwrap();
        let all: Vec<usize> = (0..40).collect();
        assert_eq!(restrict_correlation(&c, &all).unwrap(), c);
        let one = restrict_correlation(&c, &[7]).unwrap();
        assert_eq!(one.entries, array![[c.entries[[7, 7]]]]);
        assert!(matches!(
            restrict_correlation(&c, &[40]),
            Err(Error::SiteOutOfRange { site: 40, .. })
        ));
        let block = restrict_correlation(&c, &(5..17).collect::<Vec<_>>()).unwrap();
        for z in eigvals_hermitian(&block.entries).unwrap() {
            assert!((-1e-9..=1.0 + 1e-9).contains(&z));
        }
    }

    #[test]
    fn partitions() {
        let p = Partition::even(40).unwrap();
        assert_eq!(p.a(), (0..10).collect::<Vec<_>>());
        assert_eq!(p.c(), (30..40).collect::<Vec<_>>());
        assert_eq!(p.bc(), [(10..20).collect::<Vec<_>>(), (30..40).collect()].concat());
        assert!(Partition::even(6).is_err());
        assert!(Partition::new([1, 0, 2, 3]).is_err());
        assert_eq!(Partition::new([2, 1, 1, 2]).unwrap().n_sites(), 6);
    }

    #[test]
    fn evolution_preserves_trace_and_identity_at_zero() {
        let p = LatticeParams::default();
        let c0 = ground_state_correlation(&p, 0.75 * PI).unwrap();
        let prop = CorrelationPropagator::new(&p, 0.5 * PI).unwrap();
        let same = prop.evolve(&c0, 0.0).unwrap();
        let diff = &same.entries - &c0.entries;
        assert!(diff.iter().fold(0.0f64, |a, z| a.max(z.norm())) < 1e-13);
        for t in [0.5, 3.0, 17.0] {
            let c = prop.evolve(&c0, t).unwrap();
            assert!((c.trace() - c0.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn evolve_requires_full_chain() {
        let p = LatticeParams::default();
        let c0 = ground_state_correlation(&p, 0.75 * PI).unwrap();
        let part = restrict_correlation(&c0, &[0, 1, 2]).unwrap();
        assert!(matches!(
            evolve_correlation(&part, 0.5 * PI, 1.0, &p, &PumpConfig::off()),
            Err(Error::NotFullChain { .. })
        ));
    }
}
