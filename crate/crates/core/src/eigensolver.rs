//! Dense self-adjoint eigendecomposition (cyclic Jacobi) and the spectral
//! analyses built on it: α sweeps, edge-state detection and eigenstate
//! superpositions.
//!
//! The dissipation enters the Hamiltonian only as a uniform `−iγ` shift, so
//! every spectral quantity here is computed for the Hermitian part.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{hermitian_part, hopping_amplitudes, HoppingSet, LatticeParams};

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this are treated as one degenerate cluster when
/// resolving lattice eigenvectors by mirror parity.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues (within a resolved degenerate cluster the order
    /// follows mirror parity instead, see [`lattice_eigen`]).
    pub values: Array1<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Array2<f64>,
    pub alpha: Option<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, index: usize) -> Result<Array1<f64>> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange { index, dim: self.dim() });
        }
        Ok(self.vectors.column(index).to_owned())
    }
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(())
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Rotation `(c, s)` that annihilates `a_pq` of a symmetric 2×2 block with
/// diagonal `(app, aqq)` and real off-diagonal `apq`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    (c, t * c)
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues come back ascending; each eigenvector is scaled so that its
/// largest-magnitude component is positive (ties go to the highest site
/// index). Identical inputs give bit-identical outputs.
pub fn eig_selfadjoint(matrix: &Array2<f64>) -> Result<EigenDecomposition> {
    let (rows, cols) = matrix.dim();
    check_square(rows, cols)?;
    let n = rows;
    let asym = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[[i, j]] - matrix[[j, i]]).abs())
        .fold(0.0, f64::max);
    let scale = frobenius(matrix).max(1.0);
    if asym > SYMMETRY_TOL * scale || asym.is_nan() {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = matrix.clone();
    let mut v = Array2::<f64>::eye(n);
    let tol = 1e-18 * frobenius(matrix);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.abs() <= tol {
                    continue;
                }
                // Off-diagonal already negligible against both diagonal entries.
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                if app.abs() + apq.abs() * 100.0 == app.abs() && aqq.abs() + apq.abs() * 100.0 == aqq.abs() {
                    a[[p, q]] = 0.0;
                    a[[q, p]] = 0.0;
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(app, aqq, apq);
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let values = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut vectors = v.select(Axis(1), &order);
    for mut col in vectors.columns_mut() {
        if fix_phase(&col.to_vec()) {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        alpha: None,
    })
}

/// Whether the vector must be negated to make its dominant component positive.
fn fix_phase(v: &[f64]) -> bool {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return false;
    }
    let pivot = v
        .iter()
        .rposition(|x| x.abs() >= max * (1.0 - 1e-9))
        .expect("max attained");
    v[pivot] < 0.0
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn eigvals_hermitian(matrix: &Array2<Complex64>) -> Result<Vec<f64>> {
    let (rows, cols) = matrix.dim();
    check_square(rows, cols)?;
    let n = rows;
    let norm = matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let asym = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[[i, j]] - matrix[[j, i]].conj()).norm())
        .fold(0.0, f64::max);
    if asym > 1e-10 * norm.max(1.0) || asym.is_nan() {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = matrix.clone();
    let tol = 1e-18 * norm;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r <= tol {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                if app.abs() + r * 100.0 == app.abs() && aqq.abs() + r * 100.0 == aqq.abs() {
                    a[[p, q]] = Complex64::new(0.0, 0.0);
                    a[[q, p]] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                // Rephase column/row q so that a_pq becomes real and positive.
                let d = apq.conj() / r;
                for k in 0..n {
                    a[[k, q]] *= d;
                }
                for k in 0..n {
                    a[[q, k]] *= d.conj();
                }
                let (c, s) = jacobi_rotation(app, aqq, r);
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s;
                    a[[k, q]] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s;
                    a[[q, k]] = apk * s + aqk * c;
                }
                a[[p, q]] = Complex64::new(0.0, 0.0);
                a[[q, p]] = Complex64::new(0.0, 0.0);
                a[[p, p]].im = 0.0;
                a[[q, q]].im = 0.0;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

/// Overlap `⟨v|P v⟩` with the site-reflection operator `P`.
pub fn mirror_overlap(v: &[f64]) -> f64 {
    v.iter().zip(v.iter().rev()).map(|(a, b)| a * b).sum()
}

pub fn mirror_parity(v: &[f64]) -> Parity {
    if mirror_overlap(v) >= 0.0 {
        Parity::Symmetric
    } else {
        Parity::Antisymmetric
    }
}

/// Rotates every cluster of (numerically) degenerate eigenvectors onto
/// eigenvectors of the site-reflection operator, symmetric members first.
/// Values inside a cluster are replaced by Rayleigh quotients with `h`.
fn resolve_mirror_degeneracies(decomp: &mut EigenDecomposition, h: &Array2<f64>) -> Result<()> {
    let n = decomp.dim();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && decomp.values[end] - decomp.values[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let idx: Vec<usize> = (start..end).collect();
            let sub = decomp.vectors.select(Axis(1), &idx);
            let reflected = sub.slice(ndarray::s![..;-1, ..]).to_owned();
            let mut p_sub = sub.t().dot(&reflected);
            // symmetrize against rounding
            let p_t = p_sub.t().to_owned();
            p_sub = (&p_sub + &p_t) * 0.5;
            let inner = eig_selfadjoint(&p_sub)?;
            // eigenvalues of P are ±1 ascending: take +1 members first
            let rotation = inner.vectors.slice(ndarray::s![.., ..;-1]).to_owned();
            let resolved = sub.dot(&rotation);
            for (k, col) in resolved.columns().into_iter().enumerate() {
                let hv = h.dot(&col);
                decomp.values[start + k] = col.dot(&hv) / col.dot(&col);
                decomp.vectors.column_mut(start + k).assign(&col);
            }
        }
        start = end;
    }
    for mut col in decomp.vectors.columns_mut() {
        if fix_phase(&col.to_vec()) {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok(())
}

/// Eigendecomposition of the lattice Hamiltonian at phase `alpha` with the
/// dissipation stripped. Degenerate clusters (splitting below
/// [`DEGENERACY_TOL`]) are resolved by mirror parity, symmetric first.
pub fn lattice_eigen(params: &LatticeParams, alpha: f64) -> Result<EigenDecomposition> {
    let hop = hopping_amplitudes(alpha, params)?;
    let h = hermitian_part(&hop, params);
    let mut decomp = eig_selfadjoint(&h)?;
    resolve_mirror_degeneracies(&mut decomp, &h)?;
    decomp.alpha = Some(alpha);
    Ok(decomp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub values: Vec<f64>,
}

/// One Hermitian spectrum per grid point (γ is ignored).
pub fn spectrum_sweep(alphas: &[f64], params: &LatticeParams) -> Result<Vec<SpectrumRow>> {
    let params = params.hermitian();
    alphas
        .iter()
        .map(|&alpha| {
            let d = lattice_eigen(&params, alpha)?;
            Ok(SpectrumRow {
                alpha,
                values: d.values.to_vec(),
            })
        })
        .collect()
}

/// Indices of eigenvalues lying inside the infinite-chain bulk gap
/// `|E − ε| < |J1 − J2|`, shrunk by half to stay clear of finite-size band
/// edges.
pub fn in_gap_states(values: &[f64], epsilon: f64, hoppings: &HoppingSet) -> Vec<usize> {
    let half_gap = 0.5 * (hoppings.j1 - hoppings.j2).abs();
    values
        .iter()
        .enumerate()
        .filter(|(_, e)| (*e - epsilon).abs() < half_gap)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStateReport {
    pub midgap_indices: (usize, usize),
    pub splitting: f64,
    /// Mean weight of the pair on the two end sites.
    pub edge_weight: f64,
    pub parity: [Parity; 2],
}

fn end_weight(v: &[f64]) -> f64 {
    v[0] * v[0] + v[v.len() - 1] * v[v.len() - 1]
}

/// Reports the two states closest to `epsilon`. Fails with
/// [`Error::NoMidgapPair`] when they are not localized on the chain ends.
pub fn classify_edge_states(decomp: &EigenDecomposition, epsilon: f64) -> Result<EdgeStateReport> {
    let n = decomp.dim();
    if n < 2 {
        return Err(Error::IndexOutOfRange { index: 1, dim: n });
    }
    let mut by_distance: Vec<usize> = (0..n).collect();
    by_distance.sort_by(|&i, &j| {
        (decomp.values[i] - epsilon)
            .abs()
            .total_cmp(&(decomp.values[j] - epsilon).abs())
            .then(i.cmp(&j))
    });
    let (a, b) = {
        let (x, y) = (by_distance[0], by_distance[1]);
        (x.min(y), x.max(y))
    };
    let va = decomp.vectors.column(a).to_vec();
    let vb = decomp.vectors.column(b).to_vec();
    let edge_weight = 0.5 * (end_weight(&va) + end_weight(&vb));
    if edge_weight < 0.5 {
        return Err(Error::NoMidgapPair { edge_weight });
    }
    Ok(EdgeStateReport {
        midgap_indices: (a, b),
        splitting: (decomp.values[a] - decomp.values[b]).abs(),
        edge_weight,
        parity: [mirror_parity(&va), mirror_parity(&vb)],
    })
}

/// Bulk gap around `epsilon`, ignoring a detected midgap pair.
pub fn bulk_gap(decomp: &EigenDecomposition, epsilon: f64) -> f64 {
    let skip = classify_edge_states(decomp, epsilon)
        .map(|r| vec![r.midgap_indices.0, r.midgap_indices.1])
        .unwrap_or_default();
    let rest = || {
        decomp
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, e)| *e)
    };
    let above = rest().filter(|e| *e >= epsilon).fold(f64::INFINITY, f64::min);
    let below = rest().filter(|e| *e < epsilon).fold(f64::NEG_INFINITY, f64::max);
    above - below
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `(ψ_i ± ψ_j)/√2` for two distinct 0-based state indices.
pub fn superpose_states(decomp: &EigenDecomposition, i: usize, j: usize, sign: Sign) -> Result<Array1<f64>> {
    if i == j {
        return Err(Error::SameState(i));
    }
    let a = decomp.vector(i)?;
    let b = decomp.vector(j)?;
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let mut out = (&a + &(b * s)) * std::f64::consts::FRAC_1_SQRT_2;
    let norm = out.dot(&out).sqrt();
    out /= norm;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use std::f64::consts::PI;

    fn residual(m: &Array2<f64>, d: &EigenDecomposition) -> f64 {
        let r = m.dot(&d.vectors) - &d.vectors * &d.values;
        r.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn pauli_x() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let d = eig_selfadjoint(&m).unwrap();
        assert_relative_eq!(d.values[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(d.values[1], 1.0, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(d.vectors[[0, 1]].abs(), h, epsilon = 1e-15);
        assert_relative_eq!(d.vectors[[0, 1]], d.vectors[[1, 1]], epsilon = 1e-15);
        assert_relative_eq!(d.vectors[[0, 0]], -d.vectors[[1, 0]], epsilon = 1e-15);
    }

    #[test]
    fn identity() {
        let d = eig_selfadjoint(&Array2::eye(4)).unwrap();
        assert!(d.values.iter().all(|&v| v == 1.0));
        assert_eq!(d.vectors, Array2::<f64>::eye(4));
    }

    #[test]
    fn rejects_asymmetric_and_nonsquare() {
        let m = array![[0.0, 1.0], [0.5, 0.0]];
        assert!(matches!(eig_selfadjoint(&m), Err(Error::NotSymmetric(_))));
        let m = Array2::<f64>::zeros((2, 3));
        assert!(matches!(eig_selfadjoint(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix() {
        let d = eig_selfadjoint(&Array2::zeros((3, 3))).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_chain_closed_form() {
        // Open chain of 40 sites: E_m = ε + 2J cos(mπ/41).
        let j = 0.50330;
        let m = 40;
        let mut h = Array2::zeros((m, m));
        for k in 0..m {
            h[[k, k]] = 1.0;
            if k + 1 < m {
                h[[k, k + 1]] = j;
                h[[k + 1, k]] = j;
            }
        }
        let d = eig_selfadjoint(&h).unwrap();
        for (idx, mode) in (1..=40).rev().enumerate() {
            let exact = 1.0 + 2.0 * j * (mode as f64 * PI / 41.0).cos();
            assert!((d.values[idx] - exact).abs() < 1e-8);
        }
        assert!(residual(&h, &d) < 1e-8);
        let gram = d.vectors.t().dot(&d.vectors) - Array2::<f64>::eye(m);
        assert!(gram.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let p = LatticeParams::default();
        let a = lattice_eigen(&p, 0.6 * PI).unwrap();
        let b = lattice_eigen(&p, 0.6 * PI).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn hermitian_values_match_real_path() {
        let m = array![[2.0, 1.0, 0.0], [1.0, 3.0, -0.5], [0.0, -0.5, 1.0]];
        let real = eig_selfadjoint(&m).unwrap();
        let complex = eigvals_hermitian(&m.mapv(Complex64::from)).unwrap();
        for (a, b) in real.values.iter().zip(&complex) {
            assert_relative_eq!(*a, *b, epsilon = 1e-13);
        }
        // σ_y has eigenvalues ±1.
        let sy = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]
        ];
        let v = eigvals_hermitian(&sy).unwrap();
        assert_relative_eq!(v[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(v[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_convention() {
        let p = LatticeParams::default();
        let d = lattice_eigen(&p, 0.3 * PI).unwrap();
        for col in d.vectors.columns() {
            let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let pivot = col.iter().rposition(|x| x.abs() >= max * (1.0 - 1e-9)).unwrap();
            assert!(col[pivot] > 0.0);
        }
    }

    #[test]
    fn same_state_superposition_rejected() {
        let d = lattice_eigen(&LatticeParams::default(), 0.5 * PI).unwrap();
        assert!(matches!(superpose_states(&d, 19, 19, Sign::Plus), Err(Error::SameState(19))));
        assert!(matches!(
            superpose_states(&d, 19, 40, Sign::Plus),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn trivial_phase_has_no_pair() {
        let d = lattice_eigen(&LatticeParams::default(), 0.25 * PI).unwrap();
        assert!(matches!(classify_edge_states(&d, 1.0), Err(Error::NoMidgapPair { .. })));
    }
}
