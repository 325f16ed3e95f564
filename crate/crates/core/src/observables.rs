//! Occupation observables derived from trajectories.

use ndarray::{s, Array2, Axis};

use crate::dynamics::{StateVector, Trajectory};
use crate::error::{Error, Result};

/// Per-site populations `|x_n(t)|²` (rows: samples, columns: sites) and
/// their row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationField {
    pub times: Vec<f64>,
    pub site_pop: Array2<f64>,
    pub total: Vec<f64>,
}

impl OccupationField {
    pub fn n_sites(&self) -> usize {
        self.site_pop.ncols()
    }

    /// Sub-field restricted to samples with `start <= t <= end`.
    pub fn window(&self, start: f64, end: f64) -> OccupationField {
        let idx: Vec<usize> = self
            .times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= start - 1e-12 && t <= end + 1e-12)
            .map(|(i, _)| i)
            .collect();
        OccupationField {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            site_pop: self.site_pop.select(Axis(0), &idx),
            total: idx.iter().map(|&i| self.total[i]).collect(),
        }
    }

    /// Index of the sample closest to `t`.
    pub fn sample_at(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
    }

    /// Trapezoid-rule time average of each site's population.
    pub fn time_average(&self) -> Vec<f64> {
        let n = self.times.len();
        let m = self.n_sites();
        if n == 0 {
            return vec![0.0; m];
        }
        if n == 1 {
            return self.site_pop.row(0).to_vec();
        }
        let span = self.times[n - 1] - self.times[0];
        let mut acc = vec![0.0; m];
        for k in 0..n - 1 {
            let h = self.times[k + 1] - self.times[k];
            for (site, a) in acc.iter_mut().enumerate() {
                *a += 0.5 * h * (self.site_pop[[k, site]] + self.site_pop[[k + 1, site]]);
            }
        }
        acc.into_iter().map(|a| a / span).collect()
    }
}

pub fn site_populations(traj: &Trajectory) -> Result<OccupationField> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let site_pop = traj.amplitudes().mapv(|z| z.norm_sqr());
    let total = site_pop.sum_axis(Axis(1)).to_vec();
    Ok(OccupationField {
        times: traj.times.clone(),
        site_pop,
        total,
    })
}

/// Splits columns by the parity of the 1-based site index: odd sites
/// (sublattice A) first, even sites (sublattice B) second.
pub fn sublattice_populations(field: &OccupationField) -> (Array2<f64>, Array2<f64>) {
    let odd = field.site_pop.slice(s![.., 0..;2]).to_owned();
    let even = field.site_pop.slice(s![.., 1..;2]).to_owned();
    (odd, even)
}

/// Fraction of the population on the two end sites; zero for an empty state.
pub fn edge_weight(state: &StateVector) -> f64 {
    let total = state.norm_sqr();
    if total == 0.0 {
        return 0.0;
    }
    let m = state.amps.len();
    (state.amps[0].norm_sqr() + state.amps[m - 1].norm_sqr()) / total
}

/// Largest deviation from reflection symmetry `|P(n) − P(2N+1−n)|` over all
/// samples.
pub fn mirror_asymmetry(field: &OccupationField) -> f64 {
    let m = field.n_sites();
    field
        .site_pop
        .rows()
        .into_iter()
        .flat_map(|row| (0..m / 2).map(move |k| (row[k] - row[m - 1 - k]).abs()))
        .fold(0.0, f64::max)
}

/// Mean of `total` over samples with `t >= start`.
pub fn mean_total_after(field: &OccupationField, start: f64) -> f64 {
    let vals: Vec<f64> = field
        .times
        .iter()
        .zip(&field.total)
        .filter(|(t, _)| **t >= start - 1e-12)
        .map(|(_, p)| *p)
        .collect();
    vals.iter().sum::<f64>() / vals.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{InitialCondition, RunSpec};
    use ndarray::{array, Array1};
    use num_complex::Complex64;

    fn field(rows: Array2<f64>) -> OccupationField {
        let total = rows.sum_axis(Axis(1)).to_vec();
        OccupationField {
            times: (0..rows.nrows()).map(|k| k as f64).collect(),
            site_pop: rows,
            total,
        }
    }

    #[test]
    fn empty_trajectory_rejected() {
        let traj = Trajectory {
            times: vec![],
            states: vec![],
            protocol: RunSpec::standard().protocol,
        };
        assert!(matches!(site_populations(&traj), Err(Error::EmptyTrajectory)));
    }

    #[test]
    fn initial_both_edges() {
        let s = InitialCondition::BothEdges.state(20);
        let traj = Trajectory {
            times: vec![0.0],
            states: vec![s.clone()],
            protocol: RunSpec::standard().protocol,
        };
        let f = site_populations(&traj).unwrap();
        assert_eq!(f.total, vec![2.0]);
        for n in 0..40 {
            let expected = if n == 0 || n == 39 { 1.0 } else { 0.0 };
            assert_eq!(f.site_pop[[0, n]], expected);
        }
        assert_eq!(edge_weight(&s), 1.0);
    }

    #[test]
    fn edge_weight_uniform_and_zero() {
        let s = StateVector::new(Array1::from_elem(40, Complex64::new(0.3, -0.1)), 0.0);
        assert!((edge_weight(&s) - 0.05).abs() < 1e-15);
        assert_eq!(edge_weight(&InitialCondition::Vacuum.state(20)), 0.0);
    }

    #[test]
    fn sublattice_split_sums_to_total() {
        let f = field(array![[1.0, 2.0, 3.0, 4.0], [0.5, 0.0, 0.25, 1.0]]);
        let (odd, even) = sublattice_populations(&f);
        assert_eq!(odd, array![[1.0, 3.0], [0.5, 0.25]]);
        assert_eq!(even, array![[2.0, 4.0], [0.0, 1.0]]);
        let sum = odd.sum_axis(Axis(1)) + even.sum_axis(Axis(1));
        for (a, b) in sum.iter().zip(&f.total) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_asymmetry_cases() {
        assert_eq!(mirror_asymmetry(&field(Array2::zeros((3, 4)))), 0.0);
        assert_eq!(mirror_asymmetry(&field(array![[1.0, 2.0, 2.0, 1.0]])), 0.0);
        assert_eq!(mirror_asymmetry(&field(array![[1.0, 2.0, 2.5, 0.0]])), 1.0);
    }

    #[test]
    fn trapezoid_average() {
        let f = field(array![[0.0, 1.0], [2.0, 1.0], [0.0, 1.0]]);
        assert_eq!(f.time_average(), vec![1.0, 1.0]);
        let w = f.window(1.0, 2.0);
        assert_eq!(w.times, vec![1.0, 2.0]);
        assert_eq!(w.time_average(), vec![1.0, 1.0]);
        assert_eq!(f.sample_at(1.2), Some(1));
    }
}
