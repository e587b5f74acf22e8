//! Quasienergy spectrum of the scaled Hamiltonian in the Fock basis,
//! tunnel-split triplets, and Wannier-type intrawell states.
//!
//! The operator ĝ couples Fock states n and n ± 3 only, so it splits into
//! three tridiagonal blocks labelled by the residue k = n mod 3. The residue
//! coincides with the eigenvalue label of the 2π/3 phase-space rotation.

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;
use twofloat::TwoFloat;

/// Block of ĝ restricted to Fock states n ≡ r (mod 3), n < n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    pub residue: usize,
    pub n_max: usize,
    pub fock: Vec<usize>,
    pub diag: Vec<f64>,
    /// Coupling between `fock[j]` and `fock[j + 1]`.
    pub offdiag3: Vec<f64>,
    lambda: f64,
    f: f64,
    sign_delta: f64,
}

/// Diagonal element ⟨n|ĝ|n⟩.
pub fn diagonal_element(m: &ModelParams, n: usize) -> f64 {
    let (l, nf) = (m.lambda, n as f64);
    l * (-m.sign_delta * (nf + 0.5) + l * nf * (nf + 1.0)) + 0.25 * (1.0 + l * l)
}

/// Matrix element ⟨n+3|ĝ|n⟩.
pub fn coupling_element(m: &ModelParams, n: usize) -> f64 {
    let nf = n as f64;
    -m.lambda * (m.f / 3.0) * (2.0 * m.lambda).sqrt() * ((nf + 1.0) * (nf + 2.0) * (nf + 3.0)).sqrt()
}

pub fn build_sector_matrix(m: &ModelParams, r: usize, n_max: usize) -> Result<SectorMatrix> {
    m.validate()?;
    if r > 2 {
        return Err(Error::InvalidParameter(format!("residue {r} not in 0..3")));
    }
    if n_max < 30 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} below 30")));
    }
    let fock: Vec<usize> = (r..n_max).step_by(3).collect();
    let diag = fock.iter().map(|&n| diagonal_element(m, n)).collect();
    let offdiag3 = fock.iter().take(fock.len() - 1).map(|&n| coupling_element(m, n)).collect();
    Ok(SectorMatrix { residue: r, n_max, fock, diag, offdiag3, lambda: m.lambda, f: m.f, sign_delta: m.sign_delta })
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.fock.len()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::from_diagonal(&DVector::from_vec(self.diag.clone()));
        for (j, &c) in self.offdiag3.iter().enumerate() {
            h[(j, j + 1)] = c;
            h[(j + 1, j)] = c;
        }
        debug_assert_eq!(h.nrows(), n);
        h
    }

    fn dd_entries(&self) -> (Vec<TwoFloat>, Vec<TwoFloat>) {
        let l = TwoFloat::from(self.lambda);
        let s = TwoFloat::from(self.sign_delta);
        let quarter = TwoFloat::from(0.25);
        let diag = self
            .fock
            .iter()
            .map(|&n| {
                let nf = TwoFloat::from(n as f64);
                l * (-(s * (nf + TwoFloat::from(0.5))) + l * nf * (nf + TwoFloat::from(1.0)))
                    + quarter * (TwoFloat::from(1.0) + l * l)
            })
            .collect();
        let pref = -(l * dd_div(TwoFloat::from(self.f), TwoFloat::from(3.0)) * (TwoFloat::from(2.0) * l).sqrt());
        let off = self.fock[..self.dim() - 1]
            .iter()
            .map(|&n| {
                let nf = n as f64;
                // (n+1)(n+2)(n+3) is an exact integer in f64 for the sizes used here
                pref * TwoFloat::from((nf + 1.0) * (nf + 2.0) * (nf + 3.0)).sqrt()
            })
            .collect();
        (diag, off)
    }
}

/// Eigenpairs of one residue block, ascending.
#[derive(Debug, Clone)]
pub struct Sector {
    pub matrix: SectorMatrix,
    pub values: Vec<f64>,
    /// Column j is the eigenvector of `values[j]` in the compressed basis.
    pub vectors: DMatrix<f64>,
}

impl Sector {
    /// Eigenvector j expanded over the full Fock basis 0..n_max.
    pub fn fock_vector(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.matrix.n_max];
        for (i, &n) in self.matrix.fock.iter().enumerate() {
            v[n] = self.vectors[(i, j)];
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct QuasienergySpectrum {
    pub sectors: [Sector; 3],
    pub lambda: f64,
    pub f: f64,
    pub sign_delta: f64,
    pub n_max: usize,
    /// Set when a below-saddle eigenvector carries visible weight at the
    /// truncation edge.
    pub truncation_warning: bool,
}

/// Truncation: the disk containing every point where g ≤ g_s + (g_s − g_min)/2
/// has radius R; states below the saddle live inside it. n_max is twice the
/// Fock index of that radius plus a fixed margin.
pub fn auto_n_max(m: &ModelParams) -> Result<usize> {
    let fp = model::wells(m)?;
    let target = fp.g_s + 0.5 * (fp.g_s - fp.g_min);
    // min over the angle of g at radius R is ¼(R²−s)² − fR³/3
    let ring = |r: f64| 0.25 * (r * r - m.sign_delta).powi(2) - m.f * r.powi(3) / 3.0 - target;
    let mut hi = fp.q0.max(1.0);
    while ring(hi) < 0.0 {
        hi *= 1.5;
    }
    let r = crate::numerics::brent(fp.q0, hi, 1e-12, ring)?;
    let n = (2.0 * r * r / (2.0 * m.lambda)).ceil() as usize + 60;
    Ok(n.max(60).div_ceil(3) * 3)
}

pub fn diagonalize(m: &ModelParams, n_max: usize) -> Result<QuasienergySpectrum> {
    let sector = |r: usize| -> Result<Sector> {
        let matrix = build_sector_matrix(m, r, n_max)?;
        let eig = SymmetricEigen::try_new(matrix.dense(), 1e-15, 10_000)
            .ok_or_else(|| Error::Eigen(format!("no convergence in sector {r}, dim {}", matrix.dim())))?;
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(matrix.dim(), matrix.dim());
        for (c, &i) in idx.iter().enumerate() {
            let mut col = eig.eigenvectors.column(i).into_owned();
            // deterministic sign: largest component positive
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(c, &col);
        }
        Ok(Sector { matrix, values, vectors })
    };
    let sectors = [sector(0)?, sector(1)?, sector(2)?];
    let truncation_warning = match model::fixed_points(m) {
        Some(fp) => sectors.iter().any(|s| {
            let d = s.matrix.dim();
            s.values
                .iter()
                .enumerate()
                .take_while(|(_, &v)| v < fp.g_s)
                .any(|(j, _)| (d.saturating_sub(3)..d).any(|i| s.vectors[(i, j)].abs() > 1e-12))
        }),
        None => false,
    };
    Ok(QuasienergySpectrum { sectors, lambda: m.lambda, f: m.f, sign_delta: m.sign_delta, n_max, truncation_warning })
}

/// One tunnel-split triple of levels, one per sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    /// Position in each sector's ascending list.
    pub index: usize,
    pub energies: [f64; 3],
    pub mean: f64,
    pub deviations: [f64; 3],
    /// max − min within the triple.
    pub splitting: f64,
    /// Tight-binding |J| from the spread, g^{(k)} = ḡ − 2|J|cos(2πk/3 + θ).
    pub j_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletTable {
    pub triplets: Vec<Triplet>,
    /// Triples whose levels fall inside the guard band below the saddle.
    pub excluded: Vec<Triplet>,
    pub guard: f64,
}

impl TripletTable {
    pub fn means(&self) -> Vec<f64> {
        self.triplets.iter().map(|t| t.mean).collect()
    }
}

fn make_triplet(index: usize, e: [f64; 3]) -> Triplet {
    let mean = (e[0] + e[1] + e[2]) / 3.0;
    let deviations = [e[0] - mean, e[1] - mean, e[2] - mean];
    let hi = e.iter().cloned().fold(f64::MIN, f64::max);
    let lo = e.iter().cloned().fold(f64::MAX, f64::min);
    let j_abs = (deviations.iter().map(|d| d * d).sum::<f64>() / 6.0).sqrt();
    Triplet { index, energies: e, mean, deviations, splitting: hi - lo, j_abs }
}

/// Group the three sectors' below-saddle levels into triples and drop the
/// ones within three local level spacings of the saddle.
pub fn classify_triplets(spec: &QuasienergySpectrum, g_s: f64) -> TripletTable {
    let counts: Vec<usize> = spec.sectors.iter().map(|s| s.values.iter().take_while(|&&v| v < g_s).count()).collect();
    let n = *counts.iter().min().unwrap_or(&0);
    let all: Vec<Triplet> = (0..n)
        .map(|i| make_triplet(i, [spec.sectors[0].values[i], spec.sectors[1].values[i], spec.sectors[2].values[i]]))
        .collect();
    let guard = if n >= 2 { 3.0 * (all[n - 1].mean - all[n - 2].mean) } else { 0.0 };
    let (triplets, excluded) = all.into_iter().partition(|t| t.energies.iter().all(|&e| e < g_s - guard));
    TripletTable { triplets, excluded, guard }
}

/// Numerical precision used for the lowering matrix elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// Eigenvectors refined by inverse iteration in double-double arithmetic.
    /// Needed once the elements fall below ~1e-15 of the diagonal, where the
    /// sums over Fock states cancel beyond f64 resolution.
    DoubleDouble,
}

/// Sign choice and level data of one Wannier triple.
#[derive(Debug, Clone, PartialEq)]
pub struct WannierLevel {
    pub index: usize,
    pub g: f64,
    /// Global signs of the three sector eigenvectors, s₀ = +1.
    pub signs: [f64; 3],
    /// ⟨ψ₀|Q|ψ₀⟩ for the chosen signs.
    pub centroid_q: f64,
}

#[derive(Debug, Clone)]
pub struct WannierBasis {
    pub spectrum: QuasienergySpectrum,
    pub levels: Vec<WannierLevel>,
}

/// ⟨φ^{(k−1)}_{i}|a|φ^{(k)}_{j}⟩ in f64 for compressed sector vectors.
fn sector_lowering(spec: &QuasienergySpectrum, k: usize, i: usize, j: usize) -> f64 {
    let lo = &spec.sectors[(k + 2) % 3];
    let up = &spec.sectors[k];
    let mut acc = 0.0;
    for (jj, &nf) in up.matrix.fock.iter().enumerate() {
        if nf == 0 {
            continue;
        }
        // Fock state nf − 1 sits at compressed index jj in sector k−1 (k > 0), jj − 1 for k = 0
        let ii = if k == 0 { jj - 1 } else { jj };
        if ii >= lo.matrix.dim() {
            continue;
        }
        acc += lo.vectors[(ii, i)] * (nf as f64).sqrt() * up.vectors[(jj, j)];
    }
    acc
}

/// Wannier states ψ_ν = 3^{−1/2} Σ_k s_k φ^{(k)} e^{2πiνk/3}. The signs s_k
/// are those that push the well-0 state furthest toward the well-0 minimum,
/// i.e. maximize ⟨ψ₀|Q|ψ₀⟩.
pub fn build_wannier(spec: &QuasienergySpectrum, table: &TripletTable) -> Result<WannierBasis> {
    let scale = (2.0 * spec.lambda).sqrt();
    let mut levels = Vec::with_capacity(table.triplets.len());
    for t in &table.triplets {
        let n = t.index;
        let o: Vec<f64> = (0..3).map(|k| sector_lowering(spec, k, n, n)).collect();
        let mut best: Vec<([f64; 3], f64)> = [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [1.0, -1.0, -1.0]]
            .iter()
            .map(|s| {
                let c = (s[2] * s[0] * o[0] + s[0] * s[1] * o[1] + s[1] * s[2] * o[2]) / 3.0;
                (*s, scale * c)
            })
            .collect();
        best.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (signs, q) = best[0];
        if !(q > 0.0) || (q - best[1].1) < 1e-3 * q.abs() {
            return Err(Error::WannierSign(n));
        }
        levels.push(WannierLevel { index: n, g: t.mean, signs, centroid_q: q });
    }
    Ok(WannierBasis { spectrum: spec.clone(), levels })
}

impl WannierBasis {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.g).collect()
    }

    /// Fock coefficients of ψ_{ν;W}(n).
    pub fn coefficients(&self, nu: usize, level: usize) -> Vec<Complex64> {
        let lv = &self.levels[level];
        let mut c = vec![Complex64::new(0.0, 0.0); self.spectrum.n_max];
        let norm = 1.0 / 3f64.sqrt();
        for k in 0..3 {
            let s = &self.spectrum.sectors[k];
            let phase = Complex64::from_polar(norm * lv.signs[k], 2.0 * PI * (nu * k) as f64 / 3.0);
            for (i, &nf) in s.matrix.fock.iter().enumerate() {
                c[nf] = phase * s.vectors[(i, lv.index)];
            }
        }
        c
    }

    /// Real Fock coefficients of the well-0 state.
    pub fn real_coefficients(&self, level: usize) -> Vec<f64> {
        self.coefficients(0, level).into_iter().map(|z| z.re).collect()
    }

    fn refined_vectors(&self) -> [Vec<Vec<TwoFloat>>; 3] {
        let wanted: Vec<usize> = self.levels.iter().map(|l| l.index).collect();
        let refine = |k: usize| -> Vec<Vec<TwoFloat>> {
            let s = &self.spectrum.sectors[k];
            let (d, e) = s.matrix.dd_entries();
            wanted.iter().map(|&j| inverse_iteration_dd(&d, &e, s.values[j], s.vectors.column(j).as_slice())).collect()
        };
        [refine(0), refine(1), refine(2)]
    }
}

/// Double-double quotient. The `Div` impl of `TwoFloat` returns only the
/// leading f64 of the quotient, so the remainder is corrected by hand.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * TwoFloat::from(q1);
    let q2 = r.hi() / b.hi();
    let r = r - b * TwoFloat::from(q2);
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + TwoFloat::from(q2) + TwoFloat::from(q3)
}

/// Inverse iteration for one eigenvector of a symmetric tridiagonal matrix
/// in double-double arithmetic, started from the f64 eigenpair.
fn inverse_iteration_dd(d: &[TwoFloat], e: &[TwoFloat], mu: f64, start: &[f64]) -> Vec<TwoFloat> {
    let n = d.len();
    let zero = TwoFloat::from(0.0);
    let mu = TwoFloat::from(mu);
    // LU of (T − μ) with partial pivoting (LAPACK gttrf layout)
    let mut dd: Vec<TwoFloat> = d.iter().map(|&x| x - mu).collect();
    let mut dl: Vec<TwoFloat> = e.to_vec();
    let mut du: Vec<TwoFloat> = e.to_vec();
    let mut du2 = vec![zero; n.saturating_sub(2)];
    let mut swap = vec![false; n.saturating_sub(1)];
    let tiny = TwoFloat::from(1e-300);
    for i in 0..n.saturating_sub(1) {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == zero {
                dd[i] = tiny;
            }
            let fact = dd_div(dl[i], dd[i]);
            dl[i] = fact;
            dd[i + 1] -= fact * du[i];
        } else {
            let fact = dd_div(dd[i], dl[i]);
            dd[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = temp - fact * dd[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -(fact * du[i + 1]);
            }
            swap[i] = true;
        }
    }
    if dd[n - 1] == zero {
        dd[n - 1] = tiny;
    }
    let solve = |b: &mut Vec<TwoFloat>| {
        for i in 0..n - 1 {
            if swap[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - dl[i] * b[i];
            }
        }
        b[n - 1] = dd_div(b[n - 1], dd[n - 1]);
        if n >= 2 {
            b[n - 2] = dd_div(b[n - 2] - du[n - 2] * b[n - 1], dd[n - 2]);
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = dd_div(b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2], dd[i]);
        }
    };
    let mut x: Vec<TwoFloat> = start.iter().map(|&v| TwoFloat::from(v)).collect();
    for _ in 0..3 {
        solve(&mut x);
        let norm = x.iter().fold(zero, |acc, &v| acc + v * v).sqrt();
        for v in x.iter_mut() {
            *v = dd_div(*v, norm);
        }
    }
    let dot = x.iter().zip(start).fold(zero, |acc, (&a, &b)| acc + a * TwoFloat::from(b));
    if dot < zero {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
    x
}

/// ⟨n′|a|n⟩ between well-0 Wannier states, element `(n′, n)`.
pub fn lowering_elements(wb: &WannierBasis, precision: Precision) -> DMatrix<f64> {
    let l = wb.len();
    let spec = &wb.spectrum;
    let mut out = DMatrix::zeros(l, l);
    match precision {
        Precision::Double => {
            for (b, lb) in wb.levels.iter().enumerate() {
                for (a, la) in wb.levels.iter().enumerate() {
                    let mut acc = 0.0;
                    for k in 0..3 {
                        acc += la.signs[(k + 2) % 3] * lb.signs[k] * sector_lowering(spec, k, la.index, lb.index);
                    }
                    out[(a, b)] = acc / 3.0;
                }
            }
        }
        Precision::DoubleDouble => {
            let vecs = wb.refined_vectors();
            let sqrt: Vec<TwoFloat> = (0..spec.n_max).map(|n| TwoFloat::from(n as f64).sqrt()).collect();
            let mut acc = vec![TwoFloat::from(0.0); l * l];
            for k in 0..3 {
                let up = &spec.sectors[k].matrix;
                let lo_dim = spec.sectors[(k + 2) % 3].matrix.dim();
                // scaled upper vectors: √F φ^{(k)}(F), stored per level
                let pairs: Vec<(usize, usize, usize)> = up
                    .fock
                    .iter()
                    .enumerate()
                    .filter(|(_, &nf)| nf > 0)
                    .map(|(jj, &nf)| (jj, if k == 0 { jj - 1 } else { jj }, nf))
                    .filter(|&(_, ii, _)| ii < lo_dim)
                    .collect();
                for b in 0..l {
                    let scaled: Vec<TwoFloat> = pairs.iter().map(|&(jj, _, nf)| sqrt[nf] * vecs[k][b][jj]).collect();
                    let sb = wb.levels[b].signs[k];
                    for a in 0..l {
                        let lower = &vecs[(k + 2) % 3][a];
                        let mut s = TwoFloat::from(0.0);
                        for (p, &(_, ii, _)) in pairs.iter().enumerate() {
                            s += lower[ii] * scaled[p];
                        }
                        let sign = wb.levels[a].signs[(k + 2) % 3] * sb;
                        acc[a * l + b] += s * TwoFloat::from(sign);
                    }
                }
            }
            for a in 0..l {
                for b in 0..l {
                    out[(a, b)] = f64::from(dd_div(acc[a * l + b], TwoFloat::from(3.0)));
                }
            }
        }
    }
    out
}
