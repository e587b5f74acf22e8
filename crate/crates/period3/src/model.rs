//! Scaled rotating-frame Hamiltonian, parameter scalings, fixed points and
//! the local geometry of the wells.
//!
//! Everything downstream works in scaled units. [`PhysicalParams`] exists only
//! to be converted.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Laboratory-frame parameters of the driven Duffing oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub omega0: f64,
    pub omega_f: f64,
    /// Quartic nonlinearity, must be positive.
    pub gamma: f64,
    /// Amplitude of the cubic drive.
    pub f0: f64,
    /// Amplitude decay rate.
    pub big_gamma: f64,
    pub nbar: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    /// Detuning of a third of the drive frequency from the eigenfrequency.
    pub fn detuning(&self) -> f64 {
        self.omega_f / 3.0 - self.omega0
    }
}

/// Dimensionless parameters of the scaled problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub f: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub nbar: f64,
    /// Sign of the detuning, +1 or -1.
    pub sign_delta: f64,
}

impl ModelParams {
    pub fn new(f: f64, lambda: f64, kappa: f64, nbar: f64, sign_delta: f64) -> Result<Self> {
        let m = Self { f, lambda, kappa, nbar, sign_delta };
        m.validate()?;
        Ok(m)
    }

    /// Positive detuning with the given drive and Planck constant; no damping, zero temperature.
    pub fn positive(f: f64, lambda: f64) -> Self {
        Self { f, lambda, kappa: 0.0, nbar: 0.0, sign_delta: 1.0 }
    }

    pub fn with_nbar(mut self, nbar: f64) -> Self {
        self.nbar = nbar;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.f.is_finite() && self.f >= 0.0) {
            return bad("f must be finite and >= 0");
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad("lambda must be finite and > 0");
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad("kappa must be finite and >= 0");
        }
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return bad("nbar must be finite and >= 0");
        }
        if self.sign_delta != 1.0 && self.sign_delta != -1.0 {
            return bad("sign_delta must be +1 or -1");
        }
        Ok(())
    }
}

/// Scaling that stays regular on exact resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeScaling {
    pub lambda_prime: f64,
    pub zeta_prime: f64,
}

impl AlternativeScaling {
    /// Three stable vibrational states require ζ′ > −1/4.
    pub fn tristable(&self) -> bool {
        self.zeta_prime > -0.25
    }
}

/// Result of converting laboratory parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub model: ModelParams,
    /// Absent when the drive vanishes (λ′ is then unbounded).
    pub alternative: Option<AlternativeScaling>,
}

fn check_physical(p: &PhysicalParams) -> Result<()> {
    if !(p.gamma > 0.0) {
        return Err(Error::InvalidParameter("gamma must be > 0".into()));
    }
    if !(p.f0 >= 0.0) || !(p.big_gamma >= 0.0) || !(p.nbar >= 0.0) || !(p.hbar > 0.0) {
        return Err(Error::InvalidParameter("F0, Gamma, nbar must be >= 0 and hbar > 0".into()));
    }
    if !(p.omega0 > 0.0 && p.omega_f > 0.0) {
        return Err(Error::InvalidParameter("frequencies must be > 0".into()));
    }
    Ok(())
}

/// Alternative scaling; defined on exact resonance but not for zero drive.
pub fn alternative_scaling(p: &PhysicalParams) -> Result<AlternativeScaling> {
    check_physical(p)?;
    if p.f0 == 0.0 {
        return Err(Error::InvalidParameter("alternative scaling needs F0 > 0".into()));
    }
    let f2 = p.f0 * p.f0;
    Ok(AlternativeScaling {
        lambda_prime: 9.0 * p.hbar * p.gamma * p.gamma / (4.0 * p.omega0 * f2),
        zeta_prime: 24.0 * p.omega0 * p.gamma * p.detuning() / f2,
    })
}

/// Convert laboratory parameters to the scaled (f, λ, κ, n̄, sgn δω).
pub fn scale_physical(p: &PhysicalParams) -> Result<Scaled> {
    check_physical(p)?;
    let dw = p.detuning();
    if dw == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let adw = dw.abs();
    let model = ModelParams {
        f: p.f0 / (8.0 * p.omega_f * p.gamma * adw).sqrt(),
        lambda: 27.0 * p.gamma * p.hbar / (8.0 * p.omega_f * p.omega_f * adw),
        kappa: p.big_gamma / adw,
        nbar: p.nbar,
        sign_delta: dw.signum(),
    };
    let alternative = if p.f0 > 0.0 { Some(alternative_scaling(p)?) } else { None };
    Ok(Scaled { model, alternative })
}

/// A point of the scaled phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    pub fn r2(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    pub fn rotate(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { q: c * self.q - s * self.p, p: s * self.q + c * self.p }
    }
}

/// g(Q,P) = ¼(Q²+P²−s)² − (f/3)(Q³−3QP²).
pub fn g_value(pt: PhasePoint, m: &ModelParams) -> f64 {
    let (q, p) = (pt.q, pt.p);
    let u = q * q + p * p - m.sign_delta;
    0.25 * u * u - m.f / 3.0 * (q * q * q - 3.0 * q * p * p)
}

/// (∂g/∂P, −∂g/∂Q).
pub fn hamiltonian_vector_field(pt: PhasePoint, m: &ModelParams) -> (f64, f64) {
    let (q, p) = (pt.q, pt.p);
    let u = q * q + p * p - m.sign_delta;
    (p * u + 2.0 * m.f * q * p, -q * u + m.f * (q * q - p * p))
}

/// Gradient (∂g/∂Q, ∂g/∂P).
pub fn g_gradient(pt: PhasePoint, m: &ModelParams) -> (f64, f64) {
    let (dq, dp) = hamiltonian_vector_field(pt, m);
    (-dp, dq)
}

/// Kind of extremum of g at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginKind {
    LocalMax,
    LocalMin,
}

/// Minima and saddles of g off the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSet {
    pub minima: [PhasePoint; 3],
    pub saddles: [PhasePoint; 3],
    pub origin_kind: OriginKind,
    pub g_min: f64,
    pub g_s: f64,
    pub q0: f64,
    pub qs: f64,
}

impl FixedPointSet {
    /// Scaled distance below the saddle, (g − g_min)/(g_s − g_min).
    pub fn delta_g(&self, g: f64) -> f64 {
        (g - self.g_min) / (self.g_s - self.g_min)
    }

    /// Inverse of [`Self::delta_g`].
    pub fn g_at(&self, dg: f64) -> f64 {
        self.g_min + dg * (self.g_s - self.g_min)
    }
}

fn triangle(pt: PhasePoint) -> [PhasePoint; 3] {
    [pt, pt.rotate(2.0 * PI / 3.0), pt.rotate(-2.0 * PI / 3.0)]
}

/// Closed-form fixed points. `None` when g has no wells off the origin.
pub fn fixed_points(m: &ModelParams) -> Option<FixedPointSet> {
    let s = m.sign_delta;
    let f = m.f;
    let disc = f * f + 4.0 * s;
    if f <= 0.0 || (s < 0.0 && f <= 2.0) || disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let q0 = 0.5 * (f + root);
    let qs = 0.5 * (f - root);
    let g_of = |x: f64| -f * x * (x * x + 3.0 * s) / 12.0;
    Some(FixedPointSet {
        minima: triangle(PhasePoint::new(q0, 0.0)),
        saddles: triangle(PhasePoint::new(qs, 0.0)),
        origin_kind: if s > 0.0 { OriginKind::LocalMax } else { OriginKind::LocalMin },
        g_min: g_of(q0),
        g_s: g_of(qs),
        q0,
        qs,
    })
}

/// Like [`fixed_points`] but treats the absence of wells as an error.
pub fn wells(m: &ModelParams) -> Result<FixedPointSet> {
    fixed_points(m).ok_or(Error::NoWells)
}

/// Curvatures and squeezing at the bottom of the ν = 0 well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellGeometry {
    pub g_pp: f64,
    pub g_qq: f64,
    pub omega_min: f64,
    pub phi_star: f64,
    pub q_cr: f64,
    pub g_cr: f64,
}

impl WellGeometry {
    pub fn sinh2_phi(&self) -> f64 {
        self.phi_star.sinh().powi(2)
    }
}

pub fn well_geometry(m: &ModelParams) -> Result<WellGeometry> {
    let fp = wells(m)?;
    let (f, s) = (m.f, m.sign_delta);
    let g_pp = 3.0 * f * fp.q0;
    let g_qq = f * fp.q0 + 2.0 * s;
    if g_pp * g_qq <= 0.0 {
        return Err(Error::DegenerateWell(format!("gPP*gQQ = {}", g_pp * g_qq)));
    }
    let (a, b) = (g_qq.abs().sqrt(), g_pp.abs().sqrt());
    let q_cr = -f + (f * f + 1.0).sqrt();
    Ok(WellGeometry {
        g_pp,
        g_qq,
        omega_min: (g_pp * g_qq).sqrt(),
        phi_star: ((a - b) / (a + b)).atanh(),
        q_cr,
        g_cr: g_value(PhasePoint::new(q_cr, 0.0), m),
    })
}
