//! Classical damped motion in the rotating frame near the saddle-node
//! bifurcation where the period-3 states disappear.
//!
//! The noiseless equations are Q̇ = ∂g/∂P − κQ, Ṗ = −∂g/∂Q − κP. Quantum
//! noise enters as white forces with ⟨ξ(τ)ξ(τ')⟩ = λκ(2n̄+1)δ(τ−τ') in each
//! quadrature. In complex form x = Q + iP the drift is
//! ẋ = −i(|x|²−s)x + i f x*² − κx.

use crate::error::{Error, Result};
use crate::model::{hamiltonian_vector_field, ModelParams, PhasePoint};
use crate::numerics::{parallel_map, rk4};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Damped drift (Q̇, Ṗ) without noise.
pub fn damped_field(m: &ModelParams, kappa: f64, pt: PhasePoint) -> (f64, f64) {
    let (dq, dp) = hamiltonian_vector_field(pt, m);
    (dq - kappa * pt.q, dp - kappa * pt.p)
}

/// Jacobian of [`damped_field`].
pub fn jacobian(m: &ModelParams, kappa: f64, pt: PhasePoint) -> [[f64; 2]; 2] {
    let (q, p, f) = (pt.q, pt.p, m.f);
    let u = q * q + p * p - m.sign_delta;
    [
        [2.0 * q * p + 2.0 * f * p - kappa, u + 2.0 * p * p + 2.0 * f * q],
        [-(u + 2.0 * q * q - 2.0 * f * q), -2.0 * q * p - 2.0 * f * p - kappa],
    ]
}

fn eigenvalues(j: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    [tr / 2.0 + disc, tr / 2.0 - disc]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub point: PhasePoint,
    pub eigenvalues: [Complex64; 2],
}

impl FixedPoint {
    fn at(m: &ModelParams, kappa: f64, point: PhasePoint) -> Self {
        Self { point, eigenvalues: eigenvalues(jacobian(m, kappa, point)) }
    }

    pub fn radius(&self) -> f64 {
        self.point.r2().sqrt()
    }

    pub fn is_stable(&self) -> bool {
        self.eigenvalues.iter().all(|l| l.re < 0.0)
    }

    /// Real eigenvalues of opposite sign.
    pub fn is_saddle(&self) -> bool {
        let [a, b] = self.eigenvalues;
        a.im.abs() < 1e-12 && b.im.abs() < 1e-12 && a.re * b.re < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryStateSet {
    pub kappa: f64,
    pub f: f64,
    pub sign_delta: f64,
    pub origin: FixedPoint,
    /// Radius r₊, empty above threshold.
    pub stable: Vec<FixedPoint>,
    /// Radius r₋, empty above threshold.
    pub saddles: Vec<FixedPoint>,
    /// κ ≥ κ_B: only the origin exists.
    pub above_threshold: bool,
}

/// Squared radii (r₊², r₋²) of the period-3 states, if they exist.
pub fn state_radii2(m: &ModelParams, kappa: f64) -> Option<(f64, f64)> {
    let (s, f2) = (m.sign_delta, m.f * m.f);
    let disc = f2 * s + f2 * f2 / 4.0 - kappa * kappa;
    if disc < 0.0 || m.f == 0.0 {
        return None;
    }
    let (hi, lo) = (s + f2 / 2.0 + disc.sqrt(), s + f2 / 2.0 - disc.sqrt());
    (lo > 0.0).then_some((hi, lo))
}

/// The three states of radius r: e^{3iφ} = f r / (r² − s − iκ).
fn states_on_circle(m: &ModelParams, kappa: f64, r2: f64) -> [Complex64; 3] {
    let r = r2.sqrt();
    let base = (Complex64::new(m.f * r, 0.0) / Complex64::new(r2 - m.sign_delta, -kappa)).arg() / 3.0;
    std::array::from_fn(|k| Complex64::from_polar(r, base + 2.0 * PI * k as f64 / 3.0))
}

fn to_point(x: Complex64) -> PhasePoint {
    PhasePoint::new(x.re, x.im)
}

pub fn classical_fixed_points(m: &ModelParams, kappa: f64) -> Result<StationaryStateSet> {
    m.validate()?;
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter("kappa must be finite and >= 0".into()));
    }
    let origin = FixedPoint::at(m, kappa, PhasePoint::new(0.0, 0.0));
    let mut set = StationaryStateSet {
        kappa,
        f: m.f,
        sign_delta: m.sign_delta,
        origin,
        stable: Vec::new(),
        saddles: Vec::new(),
        above_threshold: true,
    };
    if let Some((hi, lo)) = state_radii2(m, kappa) {
        if hi - lo > 0.0 {
            set.stable =
                states_on_circle(m, kappa, hi).iter().map(|&x| FixedPoint::at(m, kappa, to_point(x))).collect();
            set.saddles =
                states_on_circle(m, kappa, lo).iter().map(|&x| FixedPoint::at(m, kappa, to_point(x))).collect();
            set.above_threshold = false;
        }
    }
    Ok(set)
}

/// κ_B = [f²s + f⁴/4]^{1/2}; zero when no period-3 states exist at any damping.
pub fn kappa_b(f: f64, sign_delta: f64) -> f64 {
    let f2 = f * f;
    (f2 * sign_delta + f2 * f2 / 4.0).max(0.0).sqrt()
}

/// Threshold drive at damping κ: f_B² = 2[(1+κ²)^{1/2} − s].
pub fn f_b(kappa: f64, sign_delta: f64) -> f64 {
    (2.0 * ((1.0 + kappa * kappa).sqrt() - sign_delta)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationPoint {
    pub kappa_b: f64,
    /// f_B(κ_B), equal to f up to round-off.
    pub f_round_trip: f64,
    /// f²/κ_B, the rescaled drive of the threshold curve.
    pub f2_scaled: f64,
}

pub fn bifurcation_point(m: &ModelParams) -> BifurcationPoint {
    let kb = kappa_b(m.f, m.sign_delta);
    BifurcationPoint { kappa_b: kb, f_round_trip: f_b(kb, m.sign_delta), f2_scaled: m.f * m.f / kb }
}

/// Threshold curve in rescaled variables: (1/κ, f_B²/κ) for each κ.
pub fn scaled_threshold_curve(kappas: &[f64], sign_delta: f64) -> Vec<(f64, f64)> {
    kappas.iter().map(|&k| (1.0 / k, f_b(k, sign_delta).powi(2) / k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationData {
    pub kappa_b: f64,
    pub f_b: f64,
    pub x_b: Complex64,
    pub phi_b: f64,
    pub a_b: f64,
    pub b_b: f64,
    pub k_ad: f64,
    pub r_b: f64,
}

/// Slow-mode coefficients at one of the merging states. The rotation angle
/// is defined mod π; the branch with b_B > 0 is taken.
fn reduce_at(f: f64, s: f64, kb: f64, x_b: Complex64) -> (f64, f64, f64, f64) {
    let i = Complex64::i();
    let e2 = -i * (x_b * x_b - 2.0 * f * x_b.conj()) / Complex64::new(kb, -(2.0 * x_b.norm_sqr() - s));
    let mut phi = e2.arg() / 2.0;
    if (x_b * Complex64::from_polar(1.0, -phi)).re < 0.0 {
        phi += PI;
    }
    let k = -(s + f * f) / kb;
    let xx = x_b * Complex64::from_polar(1.0, -phi);
    let one_ik = Complex64::new(1.0, k);
    let a =
        (one_ik * one_ik * (xx.conj() + f * Complex64::from_polar(1.0, 3.0 * phi))).im + 2.0 * (1.0 + k * k) * xx.im;
    (phi, a, xx.re, k)
}

pub fn slow_mode_reduction(m: &ModelParams) -> Result<BifurcationData> {
    m.validate()?;
    let s = m.sign_delta;
    let kb = kappa_b(m.f, s);
    if kb <= 0.0 {
        return Err(Error::NoWells);
    }
    let r2 = s + m.f * m.f / 2.0;
    let states = states_on_circle(m, kb, r2);
    let reduced: Vec<_> = states.iter().map(|&x| reduce_at(m.f, s, kb, x)).collect();
    let (phi, a, b, k) = reduced[0];
    for &(_, a2, b2, _) in &reduced[1..] {
        if (a2 - a).abs() > 1e-8 * (1.0 + a.abs()) || (b2 - b).abs() > 1e-8 * (1.0 + b.abs()) {
            return Err(Error::DegenerateWell(format!(
                "slow-mode coefficients differ between states: ({a}, {b}) vs ({a2}, {b2})"
            )));
        }
    }
    Ok(BifurcationData {
        kappa_b: kb,
        f_b: f_b(kb, s),
        x_b: states[0],
        phi_b: phi,
        a_b: a,
        b_b: b,
        k_ad: k,
        r_b: r2.sqrt(),
    })
}

/// Noise intensity λκ(2n̄+1) of the white forces.
pub fn noise_intensity(m: &ModelParams, kappa: f64) -> f64 {
    m.lambda * kappa * (2.0 * m.nbar + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sde2dOptions {
    pub dt: f64,
    pub tau_max: f64,
    /// Keep every `record_every`-th point of the trajectory.
    pub record_every: usize,
    /// Drop the noise (deterministic Euler).
    pub noiseless: bool,
}

impl Default for Sde2dOptions {
    fn default() -> Self {
        Self { dt: 0.005, tau_max: 100.0, record_every: 100, noiseless: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tau: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn last(&self) -> PhasePoint {
        *self.points.last().expect("trajectory has the initial point")
    }
}

fn check_step(dt: f64, kappa: f64) -> Result<()> {
    let max = 0.01 / kappa.max(1.0);
    if !(dt > 0.0 && dt <= max * (1.0 + 1e-12)) {
        return Err(Error::StepSize(format!("dt = {dt} must lie in (0, {max}]")));
    }
    Ok(())
}

fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Euler–Maruyama integration of the two-quadrature Langevin equations.
pub fn simulate_2d(
    m: &ModelParams,
    kappa: f64,
    start: PhasePoint,
    seed: u64,
    opts: &Sde2dOptions,
) -> Result<Trajectory> {
    m.validate()?;
    check_step(opts.dt, kappa)?;
    let mut rng = trajectory_rng(seed, 0);
    let sigma = if opts.noiseless { 0.0 } else { (noise_intensity(m, kappa) * opts.dt).sqrt() };
    let steps = (opts.tau_max / opts.dt).ceil() as usize;
    let every = opts.record_every.max(1);
    let mut out = Trajectory { tau: vec![0.0], points: vec![start] };
    let mut pt = start;
    for step in 1..=steps {
        let (vq, vp) = damped_field(m, kappa, pt);
        pt.q += vq * opts.dt;
        pt.p += vp * opts.dt;
        if sigma > 0.0 {
            let (nq, np): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            pt.q += sigma * nq;
            pt.p += sigma * np;
        }
        if step % every == 0 || step == steps {
            out.tau.push(step as f64 * opts.dt);
            out.points.push(pt);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attractor {
    Origin,
    /// Index into [`StationaryStateSet::stable`].
    State(usize),
}

/// Attractor reached by the noiseless flow from `pt` after τ = 50/κ.
pub fn basin_of(m: &ModelParams, set: &StationaryStateSet, pt: PhasePoint) -> Attractor {
    let kappa = set.kappa;
    let tau = 50.0 / kappa.max(1e-3);
    let h = 0.02;
    let field = |y: [f64; 2]| {
        let (a, b) = damped_field(m, kappa, PhasePoint::new(y[0], y[1]));
        [a, b]
    };
    let y = rk4([pt.q, pt.p], h, (tau / h).ceil() as usize, &field);
    let end = PhasePoint::new(y[0], y[1]);
    let d = |p: &PhasePoint| (p.q - end.q).hypot(p.p - end.p);
    let mut best = (d(&set.origin.point), Attractor::Origin);
    for (j, st) in set.stable.iter().enumerate() {
        let dj = d(&st.point);
        if dj < best.0 {
            best = (dj, Attractor::State(j));
        }
    }
    best.1
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeStatistics {
    pub trajectories: usize,
    /// Trajectories that escaped before the time cap; the mean is over these.
    pub escaped: usize,
    pub mfpt: f64,
    pub std_error: f64,
    pub seed: u64,
    /// Damping; κ − κ_B for a bare normal form.
    pub kappa: f64,
    pub dt: f64,
    pub noise_intensity: f64,
}

fn summarize(times: &[Option<f64>], seed: u64, kappa: f64, dt: f64, noise: f64) -> Result<EscapeStatistics> {
    let t: Vec<f64> = times.iter().flatten().copied().collect();
    if t.is_empty() {
        return Err(Error::NoMetastableState("no trajectory escaped within the time cap".into()));
    }
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let var = if t.len() > 1 { t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(EscapeStatistics {
        trajectories: times.len(),
        escaped: t.len(),
        mfpt: mean,
        std_error: (var / n).sqrt(),
        seed,
        kappa,
        dt,
        noise_intensity: noise,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escape2dOptions {
    pub trajectories: usize,
    pub dt: f64,
    pub tau_max: f64,
    /// Basin membership is checked every `check_interval` of τ.
    pub check_interval: f64,
}

/// First-exit times from the basin of stable state 0 in the full 2D model.
pub fn escape_2d(m: &ModelParams, kappa: f64, seed: u64, opts: &Escape2dOptions) -> Result<EscapeStatistics> {
    check_step(opts.dt, kappa)?;
    let set = classical_fixed_points(m, kappa)?;
    if set.above_threshold {
        return Err(Error::NoMetastableState(format!("kappa = {kappa} is above threshold")));
    }
    let sigma = (noise_intensity(m, kappa) * opts.dt).sqrt();
    let start = set.stable[0].point;
    let check = ((opts.check_interval / opts.dt).round() as usize).max(1);
    let steps = (opts.tau_max / opts.dt).ceil() as usize;
    let times = parallel_map(opts.trajectories, |i| {
        let mut rng = trajectory_rng(seed, i as u64);
        let mut pt = start;
        for step in 1..=steps {
            let (vq, vp) = damped_field(m, kappa, pt);
            let (nq, np): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            pt.q += vq * opts.dt + sigma * nq;
            pt.p += vp * opts.dt + sigma * np;
            if step % check == 0 && basin_of(m, &set, pt) != Attractor::State(0) {
                return Some(step as f64 * opts.dt);
            }
        }
        None
    });
    summarize(&times, seed, kappa, opts.dt, noise_intensity(m, kappa))
}

/// Normal form ż = a z² − b δκ + ξ, ⟨ξξ⟩ = intensity·δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowMode {
    pub a: f64,
    pub b: f64,
    pub dkappa: f64,
    pub intensity: f64,
}

impl SlowMode {
    /// Leading order in κ − κ_B: the noise intensity is taken at κ_B.
    pub fn new(bd: &BifurcationData, m: &ModelParams, kappa: f64) -> Result<Self> {
        let sm = Self { a: bd.a_b, b: bd.b_b, dkappa: kappa - bd.kappa_b, intensity: noise_intensity(m, bd.kappa_b) };
        sm.z_st()?;
        Ok(sm)
    }

    /// z_st = [b δκ / a]^{1/2}.
    pub fn z_st(&self) -> Result<f64> {
        let r = self.b * self.dkappa / self.a;
        if !(r > 0.0) {
            return Err(Error::NoMetastableState(format!("b·δκ/a = {r} has no real fixed points")));
        }
        Ok(r.sqrt())
    }

    pub fn stable_point(&self) -> f64 {
        -self.z_st().unwrap_or(0.0) * self.a.signum()
    }

    pub fn saddle_point(&self) -> f64 {
        self.z_st().unwrap_or(0.0) * self.a.signum()
    }

    /// U(z) with ż = −U′(z).
    pub fn potential(&self, z: f64) -> f64 {
        -self.a * z * z * z / 3.0 + self.b * self.dkappa * z
    }

    /// Barrier ΔU between saddle and stable point.
    pub fn barrier(&self) -> f64 {
        self.potential(self.saddle_point()) - self.potential(self.stable_point())
    }

    /// Diffusion coefficient D = intensity/2.
    pub fn diffusion(&self) -> f64 {
        self.intensity / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowModeOptions {
    pub trajectories: usize,
    /// Step; `None` chooses 0.05 of the relaxation time at the stable point.
    pub dt: Option<f64>,
    /// Absorbing boundary at `boundary_factor`·z_st past the saddle.
    pub boundary_factor: f64,
    pub tau_max: f64,
}

impl Default for SlowModeOptions {
    fn default() -> Self {
        Self { trajectories: 2500, dt: None, boundary_factor: 3.0, tau_max: 1e7 }
    }
}

pub const NORMAL_FORM_WINDOW: f64 = 0.2;

pub fn simulate_slow_mode(bd: &BifurcationData, m: &ModelParams, kappa: f64, seed: u64) -> Result<EscapeStatistics> {
    simulate_slow_mode_with(bd, m, kappa, seed, &SlowModeOptions::default())
}

pub fn simulate_slow_mode_with(
    bd: &BifurcationData,
    m: &ModelParams,
    kappa: f64,
    seed: u64,
    opts: &SlowModeOptions,
) -> Result<EscapeStatistics> {
    if kappa >= bd.kappa_b {
        return Err(Error::NoMetastableState(format!("kappa = {kappa} >= kappa_B = {}", bd.kappa_b)));
    }
    if (kappa - bd.kappa_b).abs() > NORMAL_FORM_WINDOW * bd.kappa_b {
        return Err(Error::OutOfRange(format!("|kappa - kappa_B| exceeds {NORMAL_FORM_WINDOW} kappa_B")));
    }
    let sm = SlowMode::new(bd, m, kappa)?;
    let mut stats = simulate_normal_form(&sm, seed, opts)?;
    stats.kappa = kappa;
    Ok(stats)
}

/// Ensemble of first passages for an explicit normal form.
pub fn simulate_normal_form(sm: &SlowMode, seed: u64, opts: &SlowModeOptions) -> Result<EscapeStatistics> {
    let zs = sm.z_st()?;
    let relax = 2.0 * sm.a.abs() * zs;
    let dt = opts.dt.unwrap_or(0.05 / relax);
    if !(dt > 0.0 && dt * relax <= 0.2) {
        return Err(Error::StepSize(format!("dt = {dt} too coarse for relaxation rate {relax}")));
    }
    // orient so that escape runs towards negative w
    let orient = -sm.a.signum();
    let (a, c) = (sm.a * orient, sm.b * sm.dkappa);
    let w0 = zs;
    let wb = -opts.boundary_factor * zs;
    let sigma = (sm.intensity * dt).sqrt();
    let steps = (opts.tau_max / dt).ceil() as u64;
    let times = parallel_map(opts.trajectories, |i| {
        let mut rng = trajectory_rng(seed, i as u64);
        let mut w = w0;
        for step in 1..=steps {
            // in w = orient·z the drift reads orient·(a z² − c) = (orient a) w² − orient c
            let n: f64 = StandardNormal.sample(&mut rng);
            w += (a * w * w - orient * c) * dt + sigma * n;
            if w <= wb {
                return Some(step as f64 * dt);
            }
        }
        None
    });
    summarize(&times, seed, sm.dkappa, dt, sm.intensity)
}

/// Exact mean first-passage time of the 1D normal form from the stable
/// point to the absorbing boundary, by the double-integral formula with a
/// reflecting wall where the potential has risen by 40 D.
pub fn mfpt_quadrature(sm: &SlowMode, boundary_factor: f64) -> Result<f64> {
    let zs = sm.z_st()?;
    let d = sm.diffusion();
    // orient: stable at +zs, escape towards −boundary_factor·zs
    let orient = -sm.a.signum();
    let u = |w: f64| sm.potential(orient * w);
    let u0 = u(zs);
    let mut top = zs;
    let step = zs.max(1e-3) * 0.1;
    while u(top) - u0 < 40.0 * d {
        top += step;
    }
    let lo = -boundary_factor * zs;
    let n = 40_000usize;
    let h = (top - lo) / n as f64;
    let uu: Vec<f64> = (0..=n).map(|k| u(lo + k as f64 * h)).collect();
    let scale = uu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // inner(y) = ∫_y^top e^{−(U−u0)/D}, accumulated downwards
    let mut inner = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let (fa, fb) = ((-(uu[k] - u0) / d).exp(), (-(uu[k + 1] - u0) / d).exp());
        inner[k] = inner[k + 1] + 0.5 * h * (fa + fb);
    }
    let k0 = ((zs - lo) / h).round() as usize;
    let mut outer = 0.0;
    for k in 0..k0 {
        let ga = ((uu[k] - scale) / d).exp() * inner[k];
        let gb = ((uu[k + 1] - scale) / d).exp() * inner[k + 1];
        outer += 0.5 * h * (ga + gb);
    }
    Ok(outer / d * ((scale - u0) / d).exp())
}

/// Escape exponent ln W = −(2/3)|b δκ|^{3/2} / [|a|^{1/2} κ_B λ(2n̄+1)].
pub fn kramers_exponent(bd: &BifurcationData, m: &ModelParams, kappa: f64) -> f64 {
    let dk = kappa - bd.kappa_b;
    -(2.0 / 3.0) * (bd.b_b * dk).abs().powf(1.5) / (bd.a_b.abs().sqrt() * bd.kappa_b * m.lambda * (2.0 * m.nbar + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersComparison {
    pub exponent: f64,
    /// −ΔU/D from the normal form with D = λκ(2n̄+1)/2.
    pub standard: f64,
    pub ratio: f64,
}

pub fn kramers_comparison(bd: &BifurcationData, m: &ModelParams, kappa: f64) -> Result<KramersComparison> {
    let sm = SlowMode::new(bd, m, kappa)?;
    let exponent = kramers_exponent(bd, m, kappa);
    let standard = -sm.barrier() / sm.diffusion();
    Ok(KramersComparison { exponent, standard, ratio: standard / exponent })
}
