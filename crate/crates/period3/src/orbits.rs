//! Classical intrawell orbits of g(Q,P): turning points, frequency, Fourier
//! components of a(τ) = (Q+iP)/√(2λ), the distance τ_∞ to the nearest
//! complex-time singularity, and the imaginary tunneling time and action.
//!
//! On the ν = 0 orbit with energy g, P²(Q) = A(Q) ± √B(Q) with
//! A = s − Q² − 2fQ and B = 4fQ[(4/3)Q² + fQ − s] + 4g, and Q̇ = P√B on the
//! branch P² = A + √B. The product of the two branches is
//! A² − B = 4[g(Q,0) − g], which lets every near-endpoint difference be
//! evaluated without cancellation.

use crate::error::{Error, Result};
use crate::model::{self, g_value, hamiltonian_vector_field, ModelParams, PhasePoint};
use crate::numerics::{self, rk4, rk4_step, C2};
use num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    Elliptic,
    Horseshoe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub q_min: f64,
    pub q_max: f64,
    /// Real roots of B(Q) in ascending order; `b_roots[1]` is Q_fin and
    /// `b_roots[2]` is Q_B.
    pub b_roots: [f64; 3],
    pub orbit_class: OrbitClass,
}

fn a_of(m: &ModelParams, q: f64) -> f64 {
    m.sign_delta - q * q - 2.0 * m.f * q
}

fn b_of(m: &ModelParams, g: f64, q: f64) -> f64 {
    4.0 * m.f * q * ((4.0 / 3.0) * q * q + m.f * q - m.sign_delta) + 4.0 * g
}

/// g(Q,0) − g.
fn axis_gap(m: &ModelParams, g: f64, q: f64) -> f64 {
    g_value(PhasePoint::new(q, 0.0), m) - g
}

/// (g(Q,0) − g)/(Q − root) by synthetic division of the quartic.
fn axis_gap_quotient(m: &ModelParams, g: f64, root: f64, q: f64) -> f64 {
    let c4 = 0.25;
    let c3 = -m.f / 3.0;
    let c2 = -0.5 * m.sign_delta;
    let _c0 = 0.25 - g;
    let r3 = c4;
    let r2 = c3 + root * r3;
    let r1 = c2 + root * r2;
    let r0 = root * r1;
    ((r3 * q + r2) * q + r1) * q + r0
}

fn check_range(fp: &model::FixedPointSet, g: f64) -> Result<()> {
    if !(g > fp.g_min && g < fp.g_s) {
        return Err(Error::OutOfRange(format!("g = {g} outside ({}, {})", fp.g_min, fp.g_s)));
    }
    Ok(())
}

pub fn turning_points(m: &ModelParams, g: f64) -> Result<TurningPoints> {
    let fp = model::wells(m)?;
    check_range(&fp, g)?;
    let tol = 1e-15;
    // g(Q,0) decreases monotonically on (0, Q0) and increases beyond Q0
    let q_min = numerics::brent(0.0, fp.q0, tol, |q| axis_gap(m, g, q))?;
    let mut hi = 2.0 * fp.q0 + 2.0;
    while axis_gap(m, g, hi) < 0.0 {
        hi *= 2.0;
    }
    let q_max = numerics::brent(fp.q0, hi, tol, |q| axis_gap(m, g, q))?;

    // B is a cubic with positive leading coefficient; bracket its roots by its critical points
    let f = m.f;
    let disc = 64.0 * f.powi(4) + 256.0 * f * f * m.sign_delta;
    if disc <= 0.0 {
        return Err(Error::RootFinding("B has no critical points".into()));
    }
    let c_lo = (-8.0 * f * f - disc.sqrt()) / (32.0 * f);
    let c_hi = (-8.0 * f * f + disc.sqrt()) / (32.0 * f);
    let bq = |q: f64| b_of(m, g, q);
    if !(bq(c_lo) > 0.0 && bq(c_hi) < 0.0) {
        return Err(Error::RootFinding(format!("B(Q) at g = {g} does not have three real roots")));
    }
    let mut lo = c_lo - 1.0;
    while bq(lo) > 0.0 {
        lo -= 2.0 * (c_lo - lo);
    }
    let mut up = c_hi + 1.0;
    while bq(up) < 0.0 {
        up += 2.0 * (up - c_hi);
    }
    let b1 = numerics::brent(lo, c_lo, tol, bq)?;
    let b2 = numerics::brent(c_lo, c_hi, tol, bq)?;
    let b3 = numerics::brent(c_hi, up, tol, bq)?;
    let geo = model::well_geometry(m)?;
    Ok(TurningPoints {
        q_min,
        q_max,
        b_roots: [b1, b2, b3],
        orbit_class: if g > geo.g_cr { OrbitClass::Horseshoe } else { OrbitClass::Elliptic },
    })
}

/// Integration settings for one orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    /// Uniform samples over one period.
    pub samples: usize,
    /// RK4 steps between consecutive samples.
    pub substeps: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { samples: 4096, substeps: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalOrbit {
    pub model: ModelParams,
    pub g: f64,
    pub omega: f64,
    pub period: f64,
    pub tau: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub turning: TurningPoints,
    /// |end − start| after integrating exactly one period.
    pub closure_error: f64,
    /// max |g(Q,P) − g| over the samples.
    pub energy_drift: f64,
}

fn real_field(m: &ModelParams) -> impl Fn([f64; 2]) -> [f64; 2] + '_ {
    move |y: [f64; 2]| {
        let (a, b) = hamiltonian_vector_field(PhasePoint::new(y[0], y[1]), m);
        [a, b]
    }
}

/// Vector field continued to complex Q, P.
fn complex_field(m: &ModelParams) -> impl Fn(C2) -> C2 + '_ {
    move |y: C2| {
        let (q, p) = (y[0], y[1]);
        let u = q * q + p * p - m.sign_delta;
        [p * u + q * p * (2.0 * m.f), -(q * u) + (q * q - p * p) * m.f]
    }
}

pub fn orbit_solve(m: &ModelParams, g: f64) -> Result<ClassicalOrbit> {
    orbit_solve_with(m, g, OrbitOptions::default())
}

/// One period from (Q_max, 0), located by the P = 0, Q > Q0 section.
pub fn orbit_solve_with(m: &ModelParams, g: f64, opts: OrbitOptions) -> Result<ClassicalOrbit> {
    let fp = model::wells(m)?;
    let turning = turning_points(m, g)?;
    let geo = model::well_geometry(m)?;
    let field = real_field(m);
    let y0 = [turning.q_max, 0.0];

    let h0 = 2.0 * PI / (geo.omega_min * opts.samples as f64);
    let mut y = y0;
    let mut t = 0.0;
    let mut seen_positive = false;
    let max_steps = 2000 * opts.samples;
    let mut period = None;
    for _ in 0..max_steps {
        let next = rk4_step(y, h0, &field);
        if next[1] > 0.0 {
            seen_positive = true;
        }
        if seen_positive && y[1] >= 0.0 && next[1] < 0.0 && next[0] > fp.q0 {
            // Newton on the sub-step length for P = 0
            let mut dt = h0 * y[1] / (y[1] - next[1]);
            for _ in 0..8 {
                let z = rk4_step(y, dt, &field);
                let pdot = field(z)[1];
                let step = z[1] / pdot;
                dt -= step;
                if step.abs() < 1e-16 * (t + h0) {
                    break;
                }
            }
            period = Some(t + dt);
            break;
        }
        y = next;
        t += h0;
    }
    let period = period.ok_or(Error::Period(g))?;

    let n = opts.samples;
    let h = period / (n * opts.substeps) as f64;
    let mut q = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    let mut y = y0;
    for _ in 0..n {
        q.push(y[0]);
        p.push(y[1]);
        y = rk4(y, h, opts.substeps, &field);
    }
    let closure_error = ((y[0] - y0[0]).powi(2) + (y[1] - y0[1]).powi(2)).sqrt();
    let energy_drift =
        q.iter().zip(&p).map(|(&a, &b)| (g_value(PhasePoint::new(a, b), m) - g).abs()).fold(0.0, f64::max);
    let tau = (0..n).map(|j| j as f64 * period / n as f64).collect();
    Ok(ClassicalOrbit {
        model: *m,
        g,
        omega: 2.0 * PI / period,
        period,
        tau,
        q,
        p,
        turning,
        closure_error,
        energy_drift,
    })
}

impl ClassicalOrbit {
    /// ∮ F(Q,P) dP along the orbit, by the periodic trapezoid rule.
    fn loop_integral<F: Fn(f64, f64) -> f64>(&self, integrand: F) -> f64 {
        let field = real_field(&self.model);
        let dt = self.period / self.q.len() as f64;
        self.q.iter().zip(&self.p).map(|(&q, &p)| integrand(q, p) * field([q, p])[1]).sum::<f64>() * dt
    }

    /// Phase-space area enclosed by the orbit.
    pub fn area(&self) -> f64 {
        self.loop_integral(|q, _| q).abs()
    }

    /// ∬ (Q² + P²) dQ dP over the enclosed region, via Green's theorem.
    pub fn r2_moment(&self) -> f64 {
        self.loop_integral(|q, p| q * q * q / 3.0 + q * p * p).abs()
    }

    /// Action I = (1/2π)∮P dQ.
    pub fn action(&self) -> f64 {
        self.area() / (2.0 * PI)
    }

    /// Time average of Q² + P².
    pub fn mean_r2(&self) -> f64 {
        self.q.iter().zip(&self.p).map(|(q, p)| q * q + p * p).sum::<f64>() / self.q.len() as f64
    }
}

/// τ_∞: imaginary time from the real orbit at Q_max to the pole at Q → ∞.
pub fn tau_infinity(m: &ModelParams, g: f64) -> Result<f64> {
    let tp = turning_points(m, g)?;
    let qm = tp.q_max;
    // Q = Q_max + u², u = t/(1 − t)
    let integrand = |t: f64| {
        let u = t / (1.0 - t);
        let q = qm + u * u;
        let sb = b_of(m, g, q).sqrt();
        let r = axis_gap_quotient(m, g, qm, q);
        let v = (sb - a_of(m, q)).sqrt() / (r.sqrt() * sb);
        v / ((1.0 - t) * (1.0 - t))
    };
    let v = numerics::integrate(&integrand, 0.0, 1.0, 1e-12)?;
    if !(v > 0.0) {
        return Err(Error::Quadrature(format!("tau_inf({g}) = {v}")));
    }
    Ok(v)
}

/// Fourier components of a(τ) = (Q + iP)/√(2λ) over one period.
#[derive(Debug, Clone)]
pub struct FourierTable {
    pub g: f64,
    pub lambda: f64,
    pub omega: f64,
    pub tau_inf: f64,
    pub m_max: usize,
    /// `coeffs[m_max + m]` holds a_m for m ∈ [−m_max, m_max].
    pub coeffs: Vec<Complex64>,
    /// Largest m > 0 (and |m| for m < 0) whose value is above the
    /// round-off floor of the contour-shifted transform.
    pub reliable_pos: usize,
    pub reliable_neg: usize,
}

impl FourierTable {
    pub fn get(&self, m: i64) -> Complex64 {
        self.coeffs[(self.m_max as i64 + m) as usize]
    }

    pub fn abs(&self, m: i64) -> f64 {
        self.get(m).norm()
    }

    /// 2λ Σ|a_m|².
    pub fn parseval_sum(&self) -> f64 {
        2.0 * self.lambda * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.into_iter().map(|c| c / n as f64).collect()
}

/// Plain transform of the real orbit for |m| where it is accurate, and the
/// transform of the orbit displaced by ∓iσ in complex time for the rest:
/// a(τ ∓ iσ) has coefficients a_m e^{±mωσ}, which lifts the exponentially
/// small ones far above round-off. σ = 0.6 τ_∞ keeps the displaced orbit
/// clear of the singularity.
pub fn fourier_coefficients(orbit: &ClassicalOrbit, lambda: f64, m_max: usize) -> Result<FourierTable> {
    let n = orbit.q.len();
    if 2 * m_max + 1 > n {
        return Err(Error::InvalidParameter(format!("m_max = {m_max} aliases with {n} samples")));
    }
    let m = &orbit.model;
    let norm = 1.0 / (2.0 * lambda).sqrt();
    let plain: Vec<Complex64> = orbit.q.iter().zip(&orbit.p).map(|(&q, &p)| Complex64::new(q, p) * norm).collect();
    let plain = dft(&plain);

    let tau_inf = tau_infinity(m, orbit.g)?;
    let sigma = 0.6 * tau_inf;
    let cfield = complex_field(m);
    let substeps = 8;
    let h = orbit.period / (n * substeps) as f64;
    let shifted = |dir: f64| -> Vec<Complex64> {
        let y0 = [Complex64::new(orbit.turning.q_max, 0.0), Complex64::new(0.0, 0.0)];
        let leg = 1000;
        let hi = Complex64::new(0.0, -dir * sigma / leg as f64);
        let mut y = rk4(y0, hi, leg, &cfield);
        let hr = Complex64::new(h, 0.0);
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            z.push((y[0] + Complex64::i() * y[1]) * norm);
            y = rk4(y, hr, substeps, &cfield);
        }
        dft(&z)
    };
    let down = shifted(1.0);
    let up = shifted(-1.0);
    let omega = orbit.omega;
    let floor = 1e-13;
    let max_down = down.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let max_up = up.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut reliable_pos = 0;
    let mut reliable_neg = 0;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m_max + 1];
    coeffs[m_max] = plain[0];
    let plain_floor = 1e-9 * plain[0].norm().max(plain.iter().map(|c| c.norm()).fold(0.0, f64::max));
    for k in 1..=m_max {
        let kf = k as f64;
        let dpos = down[k];
        let dneg = up[n - k];
        if dpos.norm() > floor * max_down {
            reliable_pos = k;
        }
        if dneg.norm() > floor * max_up {
            reliable_neg = k;
        }
        let damp = (-kf * omega * sigma).exp();
        coeffs[m_max + k] = if plain[k].norm() > plain_floor { plain[k] } else { dpos * damp };
        coeffs[m_max - k] = if plain[n - k].norm() > plain_floor { plain[n - k] } else { dneg * damp };
    }
    Ok(FourierTable { g: orbit.g, lambda, omega, tau_inf, m_max, coeffs, reliable_pos, reliable_neg })
}

/// Large-|m| asymptotic magnitude of a_m and whether |m|ωτ_∞ < 3 makes it
/// unreliable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticElement {
    pub value: f64,
    pub low_order: bool,
}

pub fn asymptotic_element(m: &ModelParams, omega: f64, tau_inf: f64, lambda: f64, mm: i64) -> AsymptoticElement {
    let k = mm.unsigned_abs() as f64;
    let decay = (-k * omega * tau_inf).exp();
    let pref = 1.0 / (2.0 * PI * lambda.sqrt());
    let value = if mm < 0 {
        1.5f64.powf(1.0 / 6.0) * gamma(1.0 / 3.0) * pref * (omega * omega / (k * m.f)).cbrt() * decay
    } else {
        (2.0f64 / 3.0).powf(1.0 / 6.0) * gamma(2.0 / 3.0) * pref * (m.f * omega / (k * k)).cbrt() * decay
    };
    AsymptoticElement { value, low_order: k * omega * tau_inf < 3.0 }
}

/// Same as [`asymptotic_element`] with ω and τ_∞ computed at g.
pub fn asymptotic_elements(m: &ModelParams, g: f64, lambda: f64, mm: i64) -> Result<AsymptoticElement> {
    let orbit = orbit_solve(m, g)?;
    Ok(asymptotic_element(m, orbit.omega, tau_infinity(m, g)?, lambda, mm))
}

/// Imaginary tunneling time τ_tun(g) < 0 through the forbidden region
/// separating well 0 from its neighbours.
pub fn tau_tunnel(m: &ModelParams, g: f64) -> Result<f64> {
    let fp = model::wells(m)?;
    if g == fp.g_s {
        return tau_tunnel_at_saddle(m);
    }
    let tp = turning_points(m, g)?;
    let [b1, b2, b3] = tp.b_roots;
    let c = 16.0 * m.f / 3.0;
    // first region Q ∈ (Q_fin, Q_B) where B < 0; Q = mid + half·sinθ turns
    // dQ/√|B| into dθ/√(c(Q − b1))
    let (mid, half) = (0.5 * (b2 + b3), 0.5 * (b3 - b2));
    let first = |th: f64| {
        let q = mid + half * th.sin();
        let a = a_of(m, q);
        let babs = c * (q - b1) * half * half * th.cos().powi(2);
        let modp2 = (a * a + babs).sqrt();
        let re_p = -((modp2 + a) / 2.0).max(0.0).sqrt();
        re_p / (modp2 * (c * (q - b1)).sqrt())
    };
    let mut total = numerics::integrate(&first, -PI / 2.0, PI / 2.0, 1e-11)?;

    let geo = model::well_geometry(m)?;
    if g < geo.g_cr && tp.q_min > b3 {
        // second region Q ∈ (Q_B, Q_min) with P = −i|A + √B|^{1/2}
        let (mid2, half2) = (0.5 * (b3 + tp.q_min), 0.5 * (tp.q_min - b3));
        let second = |th: f64| {
            let q = mid2 + half2 * th.sin();
            let sb = (c * (q - b1) * (q - b2) * half2 * (1.0 + th.sin())).max(0.0).sqrt();
            let r = axis_gap_quotient(m, g, tp.q_min, q);
            -(sb - a_of(m, q)).sqrt() / (2.0 * (c * (q - b1) * (q - b2) * (-r)).sqrt())
        };
        total += numerics::integrate(&second, -PI / 2.0, PI / 2.0, 1e-11)?;
    }
    Ok(total)
}

/// Limit of τ_tun as g → g_s, where Q_fin and Q_B merge at −Q_s/2.
fn tau_tunnel_at_saddle(m: &ModelParams) -> Result<f64> {
    let fp = model::wells(m)?;
    let q = -fp.qs / 2.0;
    let b1 = -0.75 * m.f - 2.0 * q;
    let a = a_of(m, q);
    if a <= 0.0 {
        return Err(Error::DegenerateWell("A < 0 at the merging roots".into()));
    }
    Ok(-PI / (a.sqrt() * (16.0 * m.f / 3.0 * (q - b1)).sqrt()))
}

/// Closed form −π[3f√(f²+4)Q_s²]^{−1/2} for the saddle limit of τ_tun.
pub fn tau_tunnel_saddle_closed_form(m: &ModelParams) -> Result<f64> {
    let fp = model::wells(m)?;
    Ok(-PI / (3.0 * m.f * (m.f * m.f + 4.0).sqrt() * fp.qs * fp.qs).sqrt())
}

/// S_tun(g) = ∫_{g_s}^{g} τ_tun dg′ ≥ 0.
pub fn tunneling_action(m: &ModelParams, g: f64) -> Result<f64> {
    let fp = model::wells(m)?;
    if !(g > fp.g_min && g <= fp.g_s) {
        return Err(Error::OutOfRange(format!("g = {g}")));
    }
    if g == fp.g_s {
        return Ok(0.0);
    }
    let geo = model::well_geometry(m)?;
    let integrand = |x: f64| {
        if x >= fp.g_s {
            tau_tunnel_at_saddle(m).unwrap_or(f64::NAN).abs()
        } else {
            tau_tunnel(m, x).map(f64::abs).unwrap_or(f64::NAN)
        }
    };
    let mut pieces = vec![g];
    if geo.g_cr > g && geo.g_cr < fp.g_s {
        pieces.push(geo.g_cr);
    }
    pieces.push(fp.g_s);
    let mut s = 0.0;
    for w in pieces.windows(2) {
        s += numerics::integrate(&integrand, w[0], w[1], 1e-10)?;
    }
    Ok(s)
}

/// τ_∞, τ_tun and S_tun at one g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingData {
    pub tau_inf: f64,
    pub tau_tun: f64,
    pub s_tun: f64,
    /// τ_∞ < |τ_tun| − τ_∞: the pole at Q → ∞ is the nearest singularity.
    pub nearest_is_pole: bool,
}

pub fn tunneling_data(m: &ModelParams, g: f64) -> Result<TunnelingData> {
    let tau_inf = tau_infinity(m, g)?;
    let tau_tun = tau_tunnel(m, g)?;
    Ok(TunnelingData {
        tau_inf,
        tau_tun,
        s_tun: tunneling_action(m, g)?,
        nearest_is_pole: tau_inf < tau_tun.abs() - tau_inf,
    })
}

/// One semiclassical level from I(g_n) = λ(n + ½).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsLevel {
    pub n: usize,
    pub g: f64,
    pub omega: f64,
}

/// Classical action of the orbit at g.
pub fn action(m: &ModelParams, g: f64) -> Result<f64> {
    Ok(orbit_solve(m, g)?.action())
}

pub fn bohr_sommerfeld(m: &ModelParams, lambda: f64) -> Result<Vec<BsLevel>> {
    let fp = model::wells(m)?;
    let top = fp.g_at(1.0 - 1e-6);
    let i_top = action(m, top)?;
    let mut levels = Vec::new();
    let mut lo = fp.g_at(1e-9);
    let mut n = 0;
    while lambda * (n as f64 + 0.5) < i_top {
        let target = lambda * (n as f64 + 0.5);
        let g = numerics::brent(lo, top, 1e-13, |x| action(m, x).map(|i| i - target).unwrap_or(f64::NAN))?;
        let omega = orbit_solve(m, g)?.omega;
        levels.push(BsLevel { n, g, omega });
        lo = g;
        n += 1;
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m05() -> ModelParams {
        ModelParams::positive(0.5, 0.004)
    }

    #[test]
    fn turning_point_examples() {
        let m = m05();
        let fp = model::wells(&m).unwrap();
        let tp = turning_points(&m, fp.g_min + 1e-6).unwrap();
        assert!((tp.q_min - 1.28078).abs() < 1e-3 && (tp.q_max - 1.28078).abs() < 1e-3);
        assert_eq!(turning_points(&m, 0.10).unwrap().orbit_class, OrbitClass::Horseshoe);
        assert_eq!(turning_points(&m, 0.0).unwrap().orbit_class, OrbitClass::Elliptic);
        for g in [-0.2, 0.0, 0.1] {
            let tp = turning_points(&m, g).unwrap();
            assert!(axis_gap(&m, g, tp.q_min).abs() < 1e-10 && axis_gap(&m, g, tp.q_max).abs() < 1e-10);
        }
        assert!(turning_points(&m, 0.2).is_err());
    }

    #[test]
    fn orbit_closes_and_conserves_energy() {
        let m = m05();
        let o = orbit_solve(&m, -0.1).unwrap();
        assert!(o.closure_error < 1e-8, "{}", o.closure_error);
        assert!(o.energy_drift < 1e-9, "{}", o.energy_drift);
        assert!((o.omega - 1.86427).abs() < 1e-4);
    }

    #[test]
    fn tau_inf_example_value() {
        // imaginary-time blow-up of the orbit started at Q_max, integrated independently
        assert!((tau_infinity(&m05(), -0.1).unwrap() - 0.6931743).abs() < 1e-6);
    }

    #[test]
    fn shifted_and_plain_transforms_agree_at_small_m() {
        let m = m05();
        let o = orbit_solve(&m, -0.1).unwrap();
        let t = fourier_coefficients(&o, 0.004, 40).unwrap();
        let norm = 1.0 / (0.008f64).sqrt();
        let plain = dft(&o.q.iter().zip(&o.p).map(|(&q, &p)| Complex64::new(q, p) * norm).collect::<Vec<_>>());
        for k in 1..6 {
            assert!((t.abs(k) / plain[k as usize].norm() - 1.0).abs() < 1e-8);
            assert!((t.abs(-k) / plain[o.q.len() - k as usize].norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn saddle_limit_of_tunnel_time() {
        let m = m05();
        let closed = tau_tunnel_saddle_closed_form(&m).unwrap();
        assert!((closed + 2.2881).abs() < 1e-4);
        assert!((tau_tunnel_at_saddle(&m).unwrap() / closed - 1.0).abs() < 1e-10);
    }
}
