#![allow(dead_code)]

pub mod fock;

use sshq::model::{hopping_amplitudes, LatticeParams};

/// Dense single-particle matrix rebuilt from the hopping amplitudes alone.
pub fn chain_matrix(params: &LatticeParams, alpha: f64) -> Vec<Vec<f64>> {
    let hop = hopping_amplitudes(alpha, params).unwrap();
    let m = params.n_sites();
    let mut h = vec![vec![0.0; m]; m];
    for (k, row) in h.iter_mut().enumerate() {
        row[k] = params.epsilon;
    }
    for k in 0..m - 1 {
        let j = if k % 2 == 0 { hop.j1 } else { hop.j2 };
        h[k][k + 1] = j;
        h[k + 1][k] = j;
    }
    h
}
