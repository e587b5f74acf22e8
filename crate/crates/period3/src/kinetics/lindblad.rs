//! Brute-force steady state of the full master equation
//! dρ/dτ = (i/λ)[ρ, ĝ] − κ𝒟[a]ρ in a small Fock truncation.
//!
//! Both ĝ (which couples n to n ± 3) and the damping (which shifts n and m
//! together) preserve n − m mod 3, and the steady state lives in the block
//! n ≡ m (mod 3). Only that block is solved for.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectrum::{coupling_element, diagonal_element, WannierBasis};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub const MAX_TRUNCATION: usize = 80;

#[derive(Debug, Clone)]
pub struct LindbladState {
    pub n_max: usize,
    /// Full density matrix in the truncated Fock basis.
    pub rho: DMatrix<Complex64>,
    pub trace: f64,
    pub purity: f64,
    /// max |dρ/dτ| entry at the solution.
    pub residual: f64,
}

impl LindbladState {
    /// ⟨ψ|ρ|ψ⟩ for Fock coefficients ψ (truncated to n_max).
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let n = self.n_max.min(psi.len());
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += psi[i].conj() * self.rho[(i, j)] * psi[j];
            }
        }
        s.re
    }

    /// Total population of each of the first `count` Wannier levels,
    /// summed over the three symmetric wells.
    pub fn wannier_populations(&self, wb: &WannierBasis, count: usize) -> Vec<f64> {
        (0..count.min(wb.len())).map(|l| (0..3).map(|nu| self.expectation(&wb.coefficients(nu, l))).sum()).collect()
    }
}

struct Block {
    index: Vec<Vec<Option<usize>>>,
    pairs: Vec<(usize, usize)>,
}

impl Block {
    fn new(n: usize) -> Self {
        let mut index = vec![vec![None; n]; n];
        let mut pairs = Vec::new();
        for (i, row) in index.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                if (i + 3 * n - j).is_multiple_of(3) {
                    *slot = Some(pairs.len());
                    pairs.push((i, j));
                }
            }
        }
        Self { index, pairs }
    }

    fn at(&self, i: i64, j: i64) -> Option<usize> {
        let n = self.index.len() as i64;
        if i < 0 || j < 0 || i >= n || j >= n {
            return None;
        }
        self.index[i as usize][j as usize]
    }
}

/// Generator restricted to the block, as a dense complex matrix.
fn generator(m: &ModelParams, n: usize, block: &Block) -> DMatrix<Complex64> {
    let size = block.pairs.len();
    let mut l = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    let diag: Vec<f64> = (0..n).map(|k| diagonal_element(m, k)).collect();
    // ⟨k|ĝ|k+3⟩ = ⟨k+3|ĝ|k⟩ = c_k
    let g_el = |a: i64, b: i64| -> f64 {
        if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
            return 0.0;
        }
        if a == b {
            diag[a as usize]
        } else if (a - b).abs() == 3 {
            coupling_element(m, a.min(b) as usize)
        } else {
            0.0
        }
    };
    let ih = Complex64::new(0.0, 1.0 / m.lambda);
    let g1 = m.kappa * (m.nbar + 1.0);
    let g2 = m.kappa * m.nbar;
    let raise = |k: usize| if k + 1 < n { (k + 1) as f64 } else { 0.0 };
    for (row, &(i, j)) in block.pairs.iter().enumerate() {
        let (ii, jj) = (i as i64, j as i64);
        let mut add = |col: Option<usize>, v: Complex64| {
            if let Some(c) = col {
                l[(row, c)] += v;
            }
        };
        // (i/λ)(ρĝ − ĝρ)_{ij}
        for d in [-3i64, 0, 3] {
            add(block.at(ii, jj + d), ih * g_el(jj + d, jj));
            add(block.at(ii + d, jj), -ih * g_el(ii, ii + d));
        }
        // emission: −κ(n̄+1)[(a†aρ + ρa†a) − 2aρa†]
        add(block.at(ii, jj), Complex64::new(-g1 * (i + j) as f64, 0.0));
        add(block.at(ii + 1, jj + 1), Complex64::new(2.0 * g1 * (((i + 1) * (j + 1)) as f64).sqrt(), 0.0));
        // absorption: −κn̄[(aa†ρ + ρaa†) − 2a†ρa]
        if g2 > 0.0 {
            add(block.at(ii, jj), Complex64::new(-g2 * (raise(i) + raise(j)), 0.0));
            add(block.at(ii - 1, jj - 1), Complex64::new(2.0 * g2 * ((i * j) as f64).sqrt(), 0.0));
        }
    }
    l
}

pub fn lindblad_steady_state(m: &ModelParams, n_max_small: usize) -> Result<LindbladState> {
    m.validate()?;
    if n_max_small > MAX_TRUNCATION {
        return Err(Error::InvalidParameter(format!("truncation {n_max_small} exceeds {MAX_TRUNCATION}")));
    }
    if n_max_small < 3 {
        return Err(Error::InvalidParameter("truncation below 3".into()));
    }
    let n = n_max_small;
    let block = Block::new(n);
    let l = generator(m, n, &block);
    // replace the equation for ρ_00 by the trace condition
    let mut a = l.clone();
    let size = block.pairs.len();
    let row0 = block.index[0][0].expect("ρ_00 is in the block");
    for c in 0..size {
        a[(row0, c)] = Complex64::new(0.0, 0.0);
    }
    for k in 0..n {
        a[(row0, block.index[k][k].expect("diagonal is in the block"))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = DVector::from_element(size, Complex64::new(0.0, 0.0));
    rhs[row0] = Complex64::new(1.0, 0.0);
    let x = a.lu().solve(&rhs).ok_or_else(|| Error::Reducible("singular Lindblad generator".into()))?;
    let residual = (&l * &x).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut rho = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (k, &(i, j)) in block.pairs.iter().enumerate() {
        rho[(i, j)] = x[k];
    }
    // enforce exact hermiticity against round-off
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = (0..n).map(|k| rho[(k, k)].re).sum();
    let purity = (&rho * &rho).trace().re;
    Ok(LindbladState { n_max: n, rho, trace, purity, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undriven_oscillator_relaxes_to_vacuum() {
        let m = ModelParams::new(0.0, 0.04, 0.01, 0.0, 1.0).unwrap();
        let s = lindblad_steady_state(&m, 30).unwrap();
        assert!((s.rho[(0, 0)].re - 1.0).abs() < 1e-10);
        assert!((s.purity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_state_without_drive() {
        let m = ModelParams::new(0.0, 0.04, 0.01, 0.2, 1.0).unwrap();
        let s = lindblad_steady_state(&m, 45).unwrap();
        assert!((s.trace - 1.0).abs() < 1e-10);
        for k in 0..5 {
            let expect = (0.2f64 / 1.2).powi(k as i32) / 1.2;
            assert!((s.rho[(k, k)].re / expect - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn size_guard() {
        let m = ModelParams::new(1.0, 0.04, 0.01, 0.0, 1.0).unwrap();
        assert!(lindblad_steady_state(&m, 81).is_err());
    }
}
