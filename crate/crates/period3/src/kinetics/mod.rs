//! Intrawell relaxation kinetics: transition rates between quasienergy
//! states, their stationary distribution, the eikonal slope R′(g), locality
//! breakdown, detailed-balance tests and the quantum activation energy.

pub mod lindblad;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::numerics::{self, tail_sum};
use crate::orbits::{self, ClassicalOrbit};
use crate::spectrum::{self, Precision, WannierBasis};
use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use lindblad::{lindblad_steady_state, LindbladState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Quantum,
    Semiclassical,
}

/// `w[(n, n′)]` is the rate of |n⟩ → |n′⟩; states ordered by increasing g.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    pub w: DMatrix<f64>,
    pub g: Vec<f64>,
    pub provenance: Provenance,
    pub kappa: f64,
    pub nbar: f64,
}

impl RateMatrix {
    pub fn size(&self) -> usize {
        self.g.len()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { w: &self.w * factor, kappa: self.kappa * factor, ..self.clone() }
    }
}

/// Semiclassical transition rates out of a state with quasienergy g.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub g: f64,
    pub omega: f64,
    pub tau_inf: f64,
    pub kappa: f64,
    pub nbar: f64,
    /// Rates up to this |m| come from the Fourier table; beyond it the
    /// large-|m| asymptotic forms take over.
    pub m_direct: usize,
    up: Vec<f64>,
    down: Vec<f64>,
    /// |a_k| ≈ amp_pos·k^{−2/3}e^{−kωτ_∞}, |a_{−k}| ≈ amp_neg·k^{−1/3}e^{−kωτ_∞}.
    amp_pos: f64,
    amp_neg: f64,
}

impl RateRow {
    /// W_{n,n+m}.
    pub fn rate(&self, m: i64) -> f64 {
        let k = m.unsigned_abs() as usize;
        if k == 0 {
            return 0.0;
        }
        if k <= self.m_direct {
            return if m > 0 { self.up[k - 1] } else { self.down[k - 1] };
        }
        let (p, n) = self.tail_amplitudes(k as f64);
        let (emit, absorb) = if m > 0 { (p, n) } else { (n, p) };
        2.0 * self.kappa * ((self.nbar + 1.0) * emit * emit + self.nbar * absorb * absorb)
    }

    fn tail_amplitudes(&self, k: f64) -> (f64, f64) {
        let d = (-k * self.omega * self.tau_inf).exp();
        (self.amp_pos * k.powf(-2.0 / 3.0) * d, self.amp_neg * k.powf(-1.0 / 3.0) * d)
    }

    /// e^{−2ωτ_∞}: below this ξ the influx from distant lower states diverges.
    pub fn xi_critical(&self) -> f64 {
        (-2.0 * self.omega * self.tau_inf).exp()
    }

    /// Σ_m W_{n+m,n}(ξ^m − 1)/(1 − ξ) in the local approximation
    /// W_{n+m,n} ≈ W_{n,n−m}, with the trivial root ξ = 1 divided out.
    pub fn eikonal_function(&self, xi: f64) -> f64 {
        let ln_xi = xi.ln();
        let mut v = 0.0;
        let mut geom = 0.0;
        let mut pow = 1.0;
        for k in 1..=self.m_direct {
            // geom = (1 − ξ^k)/(1 − ξ)
            geom += pow;
            pow *= xi;
            let d = self.down[k - 1];
            let u = self.up[k - 1];
            v += d * geom;
            if u > 0.0 {
                v -= (u.ln() - k as f64 * ln_xi).exp() * geom;
            }
        }
        let m = self.m_direct;
        let e0 = 2.0 * self.omega * self.tau_inf;
        let cp2 = self.amp_pos.powi(2);
        let cn2 = self.amp_neg.powi(2);
        let s = |p: f64, eps: f64| tail_sum(p, eps, m);
        // weight·(S(p, ε₁) − S(p, ε₂)), dropped when the weight vanishes so a
        // divergent sum at ξ_c does not turn into 0·∞
        let term = |w: f64, p: f64, e1: f64, e2: f64| if w > 0.0 { w * (s(p, e1) - s(p, e2)) } else { 0.0 };
        let nb = self.nbar;
        let one_minus = 1.0 - xi;
        let up_tail = term((nb + 1.0) * cp2, 4.0 / 3.0, e0 + ln_xi, e0) + term(nb * cn2, 2.0 / 3.0, e0 + ln_xi, e0);
        let down_tail = term((nb + 1.0) * cn2, 2.0 / 3.0, e0, e0 - ln_xi) + term(nb * cp2, 4.0 / 3.0, e0, e0 - ln_xi);
        v + 2.0 * self.kappa * (down_tail - up_tail) / one_minus
    }
}

/// Default number of directly summed |m|: the shifted transform stays above
/// round-off up to about |m|ωτ_∞ ≈ 60.
fn default_m_direct(omega: f64, tau_inf: f64, table: &orbits::FourierTable) -> usize {
    let by_scale = ((50.0 / (omega * tau_inf)) as usize).clamp(8, 64);
    by_scale.min(table.reliable_pos).min(table.reliable_neg).max(2)
}

pub fn semiclassical_rates(m: &ModelParams, g: f64, m_range: Option<usize>) -> Result<RateRow> {
    let orbit = orbits::orbit_solve(m, g)?;
    semiclassical_rates_from_orbit(m, &orbit, m_range)
}

pub fn semiclassical_rates_from_orbit(
    m: &ModelParams,
    orbit: &ClassicalOrbit,
    m_range: Option<usize>,
) -> Result<RateRow> {
    let table = orbits::fourier_coefficients(orbit, m.lambda, 64)?;
    let omega = orbit.omega;
    let tau_inf = table.tau_inf;
    let md = m_range.unwrap_or_else(|| default_m_direct(omega, tau_inf, &table)).min(64);
    let nb = m.nbar;
    let rate = |emit: f64, absorb: f64| 2.0 * m.kappa * ((nb + 1.0) * emit * emit + nb * absorb * absorb);
    let up = (1..=md as i64).map(|k| rate(table.abs(k), table.abs(-k))).collect();
    let down = (1..=md as i64).map(|k| rate(table.abs(-k), table.abs(k))).collect();
    let mf = md as f64;
    let lift = (mf * omega * tau_inf).exp();
    Ok(RateRow {
        g: orbit.g,
        omega,
        tau_inf,
        kappa: m.kappa,
        nbar: nb,
        m_direct: md,
        up,
        down,
        amp_pos: table.abs(md as i64) * mf.powf(2.0 / 3.0) * lift,
        amp_neg: table.abs(-(md as i64)) * mf.powf(1.0 / 3.0) * lift,
    })
}

/// Semiclassical rate matrix on a ladder of levels, each row evaluated at
/// its own g.
pub fn semiclassical_rate_matrix(m: &ModelParams, levels: &[f64]) -> Result<RateMatrix> {
    let n = levels.len();
    let mut w = DMatrix::zeros(n, n);
    for (i, &g) in levels.iter().enumerate() {
        let row = semiclassical_rates(m, g, None)?;
        for j in 0..n {
            if j != i {
                w[(i, j)] = row.rate(j as i64 - i as i64);
            }
        }
    }
    Ok(RateMatrix { w, g: levels.to_vec(), provenance: Provenance::Semiclassical, kappa: m.kappa, nbar: m.nbar })
}

/// Rates between the retained well-0 Wannier states.
pub fn quantum_rate_matrix(wb: &WannierBasis, m: &ModelParams) -> RateMatrix {
    quantum_rate_matrix_with(wb, m, Precision::DoubleDouble)
}

pub fn quantum_rate_matrix_with(wb: &WannierBasis, m: &ModelParams, precision: Precision) -> RateMatrix {
    let a = spectrum::lowering_elements(wb, precision);
    let n = wb.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[(i, j)] = 2.0 * m.kappa * ((m.nbar + 1.0) * a[(j, i)].powi(2) + m.nbar * a[(i, j)].powi(2));
            }
        }
    }
    RateMatrix { w, g: wb.energies(), provenance: Provenance::Quantum, kappa: m.kappa, nbar: m.nbar }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    /// −λ ln ρ_n.
    pub r: Vec<f64>,
    /// (g_n, R′_n) from the centered difference over n ± 1.
    pub rprime: Vec<(f64, f64)>,
    /// max_n |in − out|/out.
    pub residual: f64,
    pub monotone: bool,
}

pub fn stationary_solve(w: &RateMatrix, lambda: f64) -> Result<StationaryDistribution> {
    let rho = numerics::gth_stationary(&w.w)?;
    let n = rho.len();
    if rho.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Reducible("stationary vector has empty states".into()));
    }
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let out: f64 = rho[i] * (0..n).filter(|&j| j != i).map(|j| w.w[(i, j)]).sum::<f64>();
        let inflow: f64 = (0..n).filter(|&j| j != i).map(|j| rho[j] * w.w[(j, i)]).sum();
        residual = residual.max((inflow - out).abs() / out);
    }
    let r: Vec<f64> = rho.iter().map(|p| -lambda * p.ln()).collect();
    let rprime = (1..n.saturating_sub(1))
        .map(|i| (w.g[i], -lambda * (rho[i + 1] / rho[i - 1]).ln() / (w.g[i + 1] - w.g[i - 1])))
        .collect();
    let monotone = rho.windows(2).all(|p| p[1] <= p[0]);
    Ok(StationaryDistribution { rho, g: w.g.clone(), r, rprime, residual, monotone })
}

/// Spectrum, Wannier basis, quantum rates and their stationary solution.
#[derive(Debug, Clone)]
pub struct QuantumKinetics {
    pub basis: WannierBasis,
    /// Levels dropped by the guard band below g_s.
    pub excluded: usize,
    pub rates: RateMatrix,
    pub stationary: StationaryDistribution,
}

/// Full quantum pipeline; `n_max` defaults to [`spectrum::auto_n_max`]. The
/// stationary distribution does not depend on κ, so κ = 0 is replaced by 1.
pub fn quantum_kinetics(m: &ModelParams, n_max: Option<usize>) -> Result<QuantumKinetics> {
    let fp = model::wells(m)?;
    let n_max = match n_max {
        Some(n) => n,
        None => spectrum::auto_n_max(m)?,
    };
    let spec = spectrum::diagonalize(m, n_max)?;
    let table = spectrum::classify_triplets(&spec, fp.g_s);
    let excluded = table.excluded.len();
    let basis = spectrum::build_wannier(&spec, &table)?;
    let mk = if m.kappa > 0.0 { *m } else { m.with_kappa(1.0) };
    let rates = quantum_rate_matrix(&basis, &mk);
    let stationary = stationary_solve(&rates, m.lambda)?;
    Ok(QuantumKinetics { basis, excluded, rates, stationary })
}

/// Near-bottom Boltzmann-like distribution of the squeezed quasi-oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicDistribution {
    pub n_eff: f64,
    /// λω_min/T_eff = ln((n_eff + 1)/n_eff); +∞ when n_eff = 0.
    pub ratio: f64,
    pub zero_temperature: bool,
}

impl HarmonicDistribution {
    /// ρ_n up to normalization.
    pub fn rho(&self, n: usize) -> f64 {
        if self.zero_temperature {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (-(n as f64) * self.ratio).exp()
    }
}

pub fn harmonic_distribution(m: &ModelParams) -> Result<HarmonicDistribution> {
    let geo = model::well_geometry(m)?;
    let n_eff = m.nbar + (2.0 * m.nbar + 1.0) * geo.phi_star.sinh().powi(2);
    if n_eff == 0.0 {
        return Ok(HarmonicDistribution { n_eff, ratio: f64::INFINITY, zero_temperature: true });
    }
    Ok(HarmonicDistribution { n_eff, ratio: ((n_eff + 1.0) / n_eff).ln(), zero_temperature: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalPoint {
    pub g: f64,
    pub omega: f64,
    pub tau_inf: f64,
    pub xi: Option<f64>,
    pub rprime: Option<f64>,
    /// 2τ_∞ − R′ > 0.
    pub local: bool,
    pub m_direct: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EikonalSolution {
    pub points: Vec<EikonalPoint>,
}

impl EikonalSolution {
    pub fn g(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.g).collect()
    }

    /// R(g) = ∫R′dg from the first grid point by the trapezoid rule, over the
    /// leading run of solved points.
    pub fn r_integral(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for p in &self.points {
            let Some(r) = p.rprime else { break };
            if let Some((g0, r0)) = prev {
                acc += 0.5 * (r + r0) * (p.g - g0);
            }
            out.push((p.g, acc));
            prev = Some((p.g, r));
        }
        out
    }
}

/// Root ξ ∈ (max(ξ_c, 1e-8), 1 − 1e-6) of the eikonal function by bisection.
pub fn eikonal_root(row: &RateRow) -> Option<f64> {
    // the asymptotic tails diverge below ξ_c; without them the full range is open
    let has_tail = row.amp_pos > 0.0 || row.amp_neg > 0.0;
    let lo = if has_tail { row.xi_critical().max(1e-8) } else { 1e-8 };
    let hi = 1.0 - 1e-6;
    let h_lo = row.eikonal_function(lo);
    let h_hi = row.eikonal_function(hi);
    if !(h_lo < 0.0 && h_hi > 0.0) {
        return None;
    }
    numerics::bisect(lo, hi, 1e-10, |x| row.eikonal_function(x)).ok()
}

pub fn eikonal_point(m: &ModelParams, g: f64) -> Result<EikonalPoint> {
    let row = semiclassical_rates(m, g, None)?;
    let xi = eikonal_root(&row);
    let rprime = xi.map(|x| -x.ln() / row.omega);
    let local = rprime.is_some_and(|r| 2.0 * row.tau_inf - r > 0.0);
    Ok(EikonalPoint { g, omega: row.omega, tau_inf: row.tau_inf, xi, rprime, local, m_direct: row.m_direct })
}

pub fn eikonal_solve(m: &ModelParams, g_grid: &[f64]) -> Result<EikonalSolution> {
    let points = g_grid.iter().map(|&g| eikonal_point(m, g)).collect::<Result<Vec<_>>>()?;
    Ok(EikonalSolution { points })
}

/// R′ = 2M/[(2n̄+1)N] with M the enclosed area and N = ½∬∇²g.
pub fn classical_limit(m: &ModelParams, g: f64) -> Result<f64> {
    let o = orbits::orbit_solve(m, g)?;
    Ok(classical_limit_from_orbit(m, &o))
}

pub fn classical_limit_from_orbit(m: &ModelParams, o: &ClassicalOrbit) -> f64 {
    let area = o.area();
    let n = 2.0 * o.r2_moment() - m.sign_delta * area;
    2.0 * area / ((2.0 * m.nbar + 1.0) * n)
}

/// Large-|m| part of the influx from lower states, relative to ρ_n, for
/// |m| > m_direct: vacuum ∝ (n̄+1)Σk^{−4/3}e^{−εk}, thermal ∝ n̄Σk^{−2/3}e^{−εk}
/// with ε = ω(2τ_∞ − R′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub vacuum: f64,
    pub thermal: f64,
    pub epsilon: f64,
    /// ε ≤ 0 and n̄ > 0: the thermal sum diverges.
    pub divergent: bool,
}

pub fn influx_tail_from_row(row: &RateRow, rprime: f64) -> TailSum {
    let eps = row.omega * (2.0 * row.tau_inf - rprime);
    let m = row.m_direct;
    let k2 = 2.0 * row.kappa;
    let vacuum = if eps >= 0.0 {
        k2 * (row.nbar + 1.0) * row.amp_pos.powi(2) * tail_sum(4.0 / 3.0, eps, m)
    } else {
        f64::INFINITY
    };
    let divergent = eps <= 0.0 && row.nbar > 0.0;
    let thermal = if row.nbar == 0.0 {
        0.0
    } else if divergent {
        f64::INFINITY
    } else {
        k2 * row.nbar * row.amp_neg.powi(2) * tail_sum(2.0 / 3.0, eps, m)
    };
    TailSum { vacuum, thermal, epsilon: eps, divergent }
}

pub fn influx_tail(m: &ModelParams, g: f64, rprime: f64) -> Result<TailSum> {
    Ok(influx_tail_from_row(&semiclassical_rates(m, g, None)?, rprime))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalityReport {
    pub g_nl: Option<f64>,
    pub dg_nl: Option<f64>,
    pub nbar: f64,
    pub f: f64,
}

/// Eikonal function at the divergence edge ξ_c; positive means no root with
/// R′ < 2τ_∞.
fn edge_value(m: &ModelParams, g: f64) -> Result<f64> {
    let row = semiclassical_rates(m, g, None)?;
    Ok(row.eikonal_function(row.xi_critical().max(1e-8)))
}

/// Top of the retained part of the well, 3 local level spacings λω below
/// g_s, as Δg.
pub fn retained_top(m: &ModelParams) -> Result<f64> {
    let fp = model::wells(m)?;
    let mut top = fp.g_at(0.99);
    for _ in 0..6 {
        let w = orbits::orbit_solve(m, top)?.omega;
        top = (fp.g_s - 3.0 * m.lambda * w).max(fp.g_at(0.5));
    }
    Ok(fp.delta_g(top))
}

pub fn detect_nonlocality(m: &ModelParams) -> Result<NonlocalityReport> {
    detect_nonlocality_on(m, 64)
}

/// Scan `grid` points of Δg up to [`retained_top`], then bisect the first
/// sign change of the edge value.
pub fn detect_nonlocality_on(m: &ModelParams, grid: usize) -> Result<NonlocalityReport> {
    let fp = model::wells(m)?;
    let none = NonlocalityReport { g_nl: None, dg_nl: None, nbar: m.nbar, f: m.f };
    if m.nbar > 0.0 {
        // the thermal tail diverges at ξ_c, so a local root always exists
        return Ok(none);
    }
    let top = retained_top(m)?;
    let lo = 1e-3;
    let mut prev = (lo, edge_value(m, fp.g_at(lo))?);
    for i in 1..=grid {
        let dg = lo + (top - lo) * i as f64 / grid as f64;
        let v = edge_value(m, fp.g_at(dg))?;
        if prev.1 < 0.0 && v >= 0.0 {
            let d = numerics::bisect(prev.0, dg, 1e-7, |x| edge_value(m, fp.g_at(x)).unwrap_or(f64::NAN))?;
            return Ok(NonlocalityReport { g_nl: Some(fp.g_at(d)), dg_nl: Some(d), ..none });
        }
        prev = (dg, v);
    }
    Ok(none)
}

/// Largest edge value per unit κ over the retained well at n̄ = 0; positive
/// iff locality breaks down there.
pub fn nonlocality_strength(m: &ModelParams, grid: usize) -> Result<f64> {
    let fp = model::wells(m)?;
    let m0 = m.with_nbar(0.0);
    let top = retained_top(&m0)?;
    let val = |x: f64| edge_value(&m0, fp.g_at(x)).map(|v| v / m.kappa).unwrap_or(f64::NEG_INFINITY);
    let lo = 1e-3;
    let h = (top - lo) / grid as f64;
    let (mut best, mut arg) = (f64::NEG_INFINITY, top);
    for i in 0..=grid {
        let dg = lo + h * i as f64;
        let v = val(dg);
        if v > best {
            best = v;
            arg = dg;
        }
    }
    // golden-section polish around the best grid point
    let (mut a, mut b) = ((arg - h).max(lo), (arg + h).min(top));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..30 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if val(c) > val(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(best.max(val(0.5 * (a + b))))
}

/// Edges (f_lo, f_hi) of the drive range where locality breaks down at
/// n̄ = 0, by bisection on the sign of [`nonlocality_strength`].
pub fn nonlocality_window(lambda: f64, lo_bracket: (f64, f64), hi_bracket: (f64, f64)) -> Result<(f64, f64)> {
    let s = |f: f64| nonlocality_strength(&ModelParams::positive(f, lambda).with_kappa(1.0), 32).unwrap_or(f64::NAN);
    let lo = numerics::bisect(lo_bracket.0, lo_bracket.1, 2e-3, s)?;
    let hi = numerics::bisect(hi_bracket.0, hi_bracket.1, 2e-3, s)?;
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub max_violation: f64,
    pub tested: usize,
    pub skipped: usize,
}

/// Kolmogorov three-cycle test of detailed balance.
pub fn detailed_balance_residual(w: &RateMatrix) -> CycleReport {
    let n = w.size();
    let mut rep = CycleReport { max_violation: 0.0, tested: 0, skipped: 0 };
    let check = |i: usize, j: usize, k: usize, rep: &mut CycleReport| {
        let fwd = [w.w[(i, j)], w.w[(j, k)], w.w[(k, i)]];
        let bwd = [w.w[(i, k)], w.w[(k, j)], w.w[(j, i)]];
        if fwd.iter().chain(&bwd).any(|&x| !(x > 0.0)) {
            rep.skipped += 1;
            return;
        }
        let v: f64 = fwd.iter().map(|x| x.ln()).sum::<f64>() - bwd.iter().map(|x| x.ln()).sum::<f64>();
        rep.max_violation = rep.max_violation.max(v.abs());
        rep.tested += 1;
    };
    if n <= 30 {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    check(i, j, k, &mut rep);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6b6f_6c6d);
        let mut drawn = 0;
        while drawn < 10_000 {
            let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if i == j || j == k || i == k {
                continue;
            }
            check(i, j, k, &mut rep);
            drawn += 1;
        }
    }
    rep
}

/// `F[(n′, n)] = ρ_{n′}W_{n′n} / max_{n′} ρ_{n′}W_{n′n}`.
pub fn flux_matrix(rho: &[f64], w: &RateMatrix) -> DMatrix<f64> {
    let n = rho.len();
    let mut f = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut mx: f64 = 0.0;
        for src in 0..n {
            if src != col {
                f[(src, col)] = rho[src] * w.w[(src, col)];
                mx = mx.max(f[(src, col)]);
            }
        }
        if mx > 0.0 {
            for src in 0..n {
                f[(src, col)] /= mx;
            }
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivationEnergy {
    pub r_a: f64,
    /// R′ < 2|τ_tun| at every grid point.
    pub condition_ok: bool,
    /// (g, R′) samples used.
    pub samples: Vec<(f64, f64)>,
    /// Where eikonal and stationary-solve segments meet, if spliced.
    pub splice: Option<f64>,
    /// R_A change when the splice moves by ±2 levels.
    pub splice_sensitivity: Option<(f64, f64)>,
}

const RA_NODES: usize = 32;

/// R_A = ∫R′dg over the well. Where locality holds R′ comes from the
/// eikonal equation; past g_NL (n̄ = 0) it is taken from the stationary
/// solution of the quantum rates, which must then be supplied.
pub fn activation_energy(m: &ModelParams, quantum: Option<&StationaryDistribution>) -> Result<ActivationEnergy> {
    let fp = model::wells(m)?;
    let depth = fp.g_s - fp.g_min;
    let report = detect_nonlocality(m)?;
    let (x, wts) = numerics::gauss_legendre(RA_NODES);
    let node = |lo: f64, hi: f64, i: usize| (0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i], 0.5 * (hi - lo) * wts[i]);
    let eik = |g: f64| -> Result<f64> {
        eikonal_point(m, g)?.rprime.ok_or_else(|| Error::MissingSegment(format!("no eikonal root at g = {g}")))
    };
    let mut samples = Vec::new();
    let mut cond = true;
    let mut tally = |g: f64, r: f64, samples: &mut Vec<(f64, f64)>| -> Result<()> {
        if r >= 2.0 * orbits::tau_tunnel(m, g)?.abs() {
            cond = false;
        }
        samples.push((g, r));
        Ok(())
    };
    let Some(g_nl) = report.g_nl else {
        let mut r_a = 0.0;
        for i in 0..RA_NODES {
            let (g, wt) = node(fp.g_min, fp.g_s, i);
            let r = eik(g)?;
            tally(g, r, &mut samples)?;
            r_a += wt * r;
        }
        return Ok(ActivationEnergy { r_a, condition_ok: cond, samples, splice: None, splice_sensitivity: None });
    };
    let q = quantum
        .ok_or_else(|| Error::MissingSegment(format!("nonlocal above g_NL = {g_nl}; stationary R′ required")))?;
    let qr: Vec<(f64, f64)> = q.rprime.iter().copied().filter(|p| p.1.is_finite()).collect();
    let last = qr.last().map(|p| p.0).unwrap_or(f64::NEG_INFINITY);
    if qr.is_empty() || qr[0].0 > g_nl || fp.g_s - last > 0.05 * depth {
        return Err(Error::MissingSegment(format!(
            "stationary R′ spans [{:.5}, {last:.5}], need [{g_nl:.5}, {:.5}]",
            qr.first().map(|p| p.0).unwrap_or(f64::NAN),
            fp.g_s
        )));
    }
    let mut eik_part = 0.0;
    for i in 0..RA_NODES {
        let (g, wt) = node(fp.g_min, g_nl, i);
        let r = eik(g)?;
        tally(g, r, &mut samples)?;
        eik_part += wt * r;
    }
    let splice_index = qr.iter().position(|p| p.0 >= g_nl).unwrap_or(qr.len() - 1);
    let quantum_from = |start: usize| -> f64 {
        // trapezoid from g_NL through the quantum points, flat to g_s
        let mut acc = 0.0;
        let mut prev = (g_nl, interp(&qr, g_nl));
        for p in &qr[start..] {
            acc += 0.5 * (p.1 + prev.1) * (p.0 - prev.0);
            prev = *p;
        }
        acc + prev.1 * (fp.g_s - prev.0)
    };
    for p in &qr[splice_index..] {
        tally(p.0, p.1, &mut samples)?;
    }
    let r_a = eik_part + quantum_from(splice_index);
    let shifted = |delta: i64| -> Result<f64> {
        let idx = (splice_index as i64 + delta).clamp(1, qr.len() as i64 - 1) as usize;
        let gs = qr[idx].0;
        let mut part = 0.0;
        for i in 0..RA_NODES {
            let (g, wt) = node(fp.g_min, gs, i);
            part += wt * eik(g).unwrap_or_else(|_| interp(&qr, g));
        }
        let mut acc = 0.0;
        let mut prev = qr[idx];
        for p in &qr[idx + 1..] {
            acc += 0.5 * (p.1 + prev.1) * (p.0 - prev.0);
            prev = *p;
        }
        Ok(part + acc + prev.1 * (fp.g_s - prev.0))
    };
    let sens = (shifted(-2)? - r_a, shifted(2)? - r_a);
    Ok(ActivationEnergy { r_a, condition_ok: cond, samples, splice: Some(g_nl), splice_sensitivity: Some(sens) })
}

fn interp(pts: &[(f64, f64)], x: f64) -> f64 {
    if x <= pts[0].0 {
        return pts[0].1;
    }
    for w in pts.windows(2) {
        if x <= w[1].0 {
            let t = (x - w[0].0) / (w[1].0 - w[0].0);
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    pts[pts.len() - 1].1
}

/// ∫R′dg of the classical limit times (2n̄ + 1), i.e. at n̄ = 0.
pub fn classical_activation_energy(m: &ModelParams) -> Result<f64> {
    let fp = model::wells(m)?;
    let m0 = m.with_nbar(0.0);
    let (x, w) = numerics::gauss_legendre(RA_NODES);
    let (lo, hi) = (fp.g_min, fp.g_s);
    let mut s = 0.0;
    for i in 0..RA_NODES {
        let g = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i];
        s += 0.5 * (hi - lo) * w[i] * classical_limit(&m0, g)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> RateMatrix {
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            w[(i, i + 1)] = 0.3 + 0.01 * i as f64;
            w[(i + 1, i)] = 1.0 + 0.1 * i as f64;
        }
        RateMatrix {
            w,
            g: (0..n).map(|i| i as f64).collect(),
            provenance: Provenance::Semiclassical,
            kappa: 1.0,
            nbar: 0.0,
        }
    }

    #[test]
    fn two_state_balance() {
        let w = RateMatrix {
            w: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 3.0, 0.0]),
            g: vec![0.0, 1.0],
            provenance: Provenance::Semiclassical,
            kappa: 1.0,
            nbar: 0.0,
        };
        let s = stationary_solve(&w, 1.0).unwrap();
        assert!((s.rho[0] - 0.75).abs() < 1e-15 && (s.rho[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn chains_and_gradient_rates_balance() {
        assert!(detailed_balance_residual(&chain(12)).max_violation <= 1e-12);
        let e: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let mut w = DMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    w[(i, j)] = (-(e[j] - e[i]) / 2.0).exp();
                }
            }
        }
        let rm = RateMatrix { w, g: e, provenance: Provenance::Semiclassical, kappa: 1.0, nbar: 0.0 };
        let rep = detailed_balance_residual(&rm);
        assert!(rep.max_violation <= 1e-12 && rep.tested == 56);
    }

    #[test]
    fn harmonic_examples() {
        let h = harmonic_distribution(&ModelParams::positive(0.5, 0.004)).unwrap();
        assert!((h.n_eff - 0.006333).abs() < 1e-6, "{}", h.n_eff);
        assert!((h.ratio - 5.068).abs() < 1e-3, "{}", h.ratio);
        let h = harmonic_distribution(&ModelParams::positive(0.5f64.sqrt(), 0.004).with_nbar(0.3)).unwrap();
        assert!((h.n_eff - 0.3).abs() < 1e-10);
        assert!(harmonic_distribution(&ModelParams::positive(0.5f64.sqrt(), 0.004)).unwrap().zero_temperature);
    }

    #[test]
    fn nearest_neighbour_eikonal_root() {
        let m = ModelParams::positive(0.5, 0.004).with_kappa(1.0);
        let fp = model::wells(&m).unwrap();
        let row = semiclassical_rates(&m, fp.g_at(0.3), Some(1)).unwrap();
        let mut nn = row.clone();
        nn.amp_pos = 0.0;
        nn.amp_neg = 0.0;
        let xi = eikonal_root(&nn).unwrap();
        assert!((xi - nn.up[0] / nn.down[0]).abs() < 1e-9);
    }

    #[test]
    fn classical_limit_at_the_bottom() {
        let m = ModelParams::positive(0.5, 0.004);
        let fp = model::wells(&m).unwrap();
        let r = classical_limit(&m, fp.g_at(1e-6)).unwrap();
        assert!((r - 0.87690).abs() < 1e-4, "{r}");
        let r1 = classical_limit(&m.with_nbar(1.0), fp.g_at(0.4)).unwrap();
        let r0 = classical_limit(&m, fp.g_at(0.4)).unwrap();
        assert!((r0 / r1 - 3.0).abs() < 1e-12);
    }
}
