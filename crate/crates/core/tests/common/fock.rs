//! Exact many-body reference for small free-fermion chains.
//!
//! Basis states are bit strings over modes `0..L`; `|s⟩` is built by applying
//! creation operators in ascending mode order to the vacuum.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub struct FockSector {
    pub n_modes: usize,
    pub states: Vec<u32>,
}

impl FockSector {
    pub fn new(n_modes: usize, particles: u32) -> Self {
        let states = (0u32..1 << n_modes).filter(|s| s.count_ones() == particles).collect();
        Self { n_modes, states }
    }

    fn index(&self, s: u32) -> usize {
        self.states.binary_search(&s).expect("state outside sector")
    }

    /// `c_i† c_j |s⟩` as `(sign, s')`.
    pub fn hop(i: usize, j: usize, s: u32) -> Option<(f64, u32)> {
        if s & (1 << j) == 0 {
            return None;
        }
        let below = |m: usize, x: u32| (x & ((1u32 << m) - 1)).count_ones();
        let mut sign = if below(j, s) % 2 == 0 { 1.0 } else { -1.0 };
        let t = s ^ (1 << j);
        if t & (1 << i) != 0 {
            return None;
        }
        if below(i, t) % 2 == 1 {
            sign = -sign;
        }
        Some((sign, t | (1 << i)))
    }

    /// `Σ h_ij c_i† c_j` restricted to the sector.
    pub fn hamiltonian(&self, h: &[Vec<f64>]) -> DMatrix<f64> {
        let d = self.states.len();
        let mut m = DMatrix::zeros(d, d);
        for (col, &s) in self.states.iter().enumerate() {
            for (i, row) in h.iter().enumerate() {
                for (j, &hij) in row.iter().enumerate() {
                    if hij == 0.0 {
                        continue;
                    }
                    if let Some((sign, t)) = Self::hop(i, j, s) {
                        m[(self.index(t), col)] += sign * hij;
                    }
                }
            }
        }
        m
    }

    pub fn ground_state(&self, h: &[Vec<f64>]) -> DVector<Complex64> {
        let eig = SymmetricEigen::new(self.hamiltonian(h));
        let k = eig.eigenvalues.imin();
        let sorted: Vec<f64> = {
            let mut v = eig.eigenvalues.iter().copied().collect::<Vec<_>>();
            v.sort_by(f64::total_cmp);
            v
        };
        assert!(sorted[1] - sorted[0] > 1e-6, "degenerate many-body ground state");
        eig.eigenvectors.column(k).map(Complex64::from)
    }

    /// `e^{−iHt} ψ` with `t` in natural units.
    pub fn evolve(&self, h: &[Vec<f64>], psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let eig = SymmetricEigen::new(self.hamiltonian(h));
        let v = eig.eigenvectors.map(Complex64::from);
        let mut coeff = v.adjoint() * psi;
        for (c, e) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        v * coeff
    }

    /// `⟨c_m† c_n⟩`.
    pub fn correlation(&self, psi: &DVector<Complex64>) -> DMatrix<Complex64> {
        let l = self.n_modes;
        let mut c = DMatrix::zeros(l, l);
        for m in 0..l {
            for n in 0..l {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &s) in self.states.iter().enumerate() {
                    if let Some((sign, t)) = Self::hop(m, n, s) {
                        acc += psi[self.index(t)].conj() * psi[col] * sign;
                    }
                }
                c[(m, n)] = acc;
            }
        }
        c
    }

    /// Von Neumann entropy of the reduced state on `region`.
    pub fn entropy(&self, psi: &DVector<Complex64>, region: &[usize]) -> f64 {
        let l = self.n_modes;
        let rest: Vec<usize> = (0..l).filter(|m| !region.contains(m)).collect();
        // new position of each original mode: region first, then the rest
        let order: Vec<usize> = region.iter().chain(&rest).copied().collect();
        let mut new_pos = vec![0; l];
        for (p, &m) in order.iter().enumerate() {
            new_pos[m] = p;
        }
        let nx = region.len();
        let mut amp = DMatrix::<Complex64>::zeros(1 << nx, 1 << (l - nx));
        for (col, &s) in self.states.iter().enumerate() {
            let occ: Vec<usize> = (0..l).filter(|m| s & (1 << m) != 0).collect();
            let mut inversions = 0;
            for a in 0..occ.len() {
                for b in a + 1..occ.len() {
                    if new_pos[occ[a]] > new_pos[occ[b]] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let (mut x, mut y) = (0usize, 0usize);
            for &m in &occ {
                let p = new_pos[m];
                if p < nx {
                    x |= 1 << p;
                } else {
                    y |= 1 << (p - nx);
                }
            }
            amp[(x, y)] += psi[col] * sign;
        }
        let rho = &amp * amp.adjoint();
        SymmetricEigen::new(rho)
            .eigenvalues
            .iter()
            .filter(|&&p| p > 1e-300)
            .map(|&p| -p * p.ln())
            .sum()
    }
}
