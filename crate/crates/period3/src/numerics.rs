//! Small numerical building blocks: complex-capable RK4, quadrature
//! wrappers, bracketed roots, tail sums and the GTH stationary solver.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul};

/// One classical RK4 step for a two-component system over any field type
/// closed under addition and scaling by the step (real or complex time).
pub fn rk4_step<T, F>(y: [T; 2], h: T, field: &F) -> [T; 2]
where
    T: Copy + Add<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
    F: Fn([T; 2]) -> [T; 2],
{
    let k1 = field(y);
    let y2 = [y[0] + h * k1[0] * 0.5, y[1] + h * k1[1] * 0.5];
    let k2 = field(y2);
    let y3 = [y[0] + h * k2[0] * 0.5, y[1] + h * k2[1] * 0.5];
    let k3 = field(y3);
    let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
    let k4 = field(y4);
    let s = |i: usize| (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (1.0 / 6.0);
    [y[0] + h * s(0), y[1] + h * s(1)]
}

/// `n` RK4 steps of size `h`.
pub fn rk4<T, F>(mut y: [T; 2], h: T, n: usize, field: &F) -> [T; 2]
where
    T: Copy + Add<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
    F: Fn([T; 2]) -> [T; 2],
{
    for _ in 0..n {
        y = rk4_step(y, h, field);
    }
    y
}

/// Complex-time version convenience alias.
pub type C2 = [Complex64; 2];

/// Adaptive tanh-sinh quadrature on a finite interval. Panels are bisected
/// until each reports an error below its share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
        let out = quadrature::double_exponential::integrate(f, a, b, tol);
        if out.error_estimate <= tol || !out.integral.is_finite() {
            if !out.integral.is_finite() {
                return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
            }
            return Ok(out.integral);
        }
        if depth == 0 {
            if out.error_estimate <= 1e3 * tol {
                return Ok(out.integral);
            }
            return Err(Error::Quadrature(format!(
                "error estimate {:e} above {:e} on [{a}, {b}]",
                out.error_estimate, tol
            )));
        }
        let mid = 0.5 * (a + b);
        Ok(rec(f, a, mid, 0.5 * tol, depth - 1)? + rec(f, mid, b, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    rec(f, a, b, abs_tol, 12)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Brent root of `f` on a sign-changing bracket.
pub fn brent<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> Result<f64> {
    let mut conv = roots::SimpleConvergency { eps: tol, max_iter: 200 };
    roots::find_root_brent(a, b, f, &mut conv).map_err(|e| Error::RootFinding(format!("brent on [{a}, {b}]: {e:?}")))
}

/// Plain bisection for functions with only a sign to trust.
pub fn bisect<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Ok(m);
        }
        let fm = f(m);
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// ∫_a^∞ x^{−p} e^{−εx} dx via upper incomplete gamma functions.
fn tail_integral(p: f64, eps: f64, a: f64) -> f64 {
    use statrs::function::gamma::{gamma, gamma_ur};
    if eps <= 0.0 {
        return if p > 1.0 { a.powf(1.0 - p) / (p - 1.0) } else { f64::INFINITY };
    }
    let x = eps * a;
    let s = 1.0 - p;
    let upper = |s: f64, x: f64| gamma(s) * gamma_ur(s, x);
    // Γ(s, x) for s < 0 from Γ(s+1, x) = sΓ(s, x) + x^s e^{−x}
    if s > 0.0 {
        eps.powf(p - 1.0) * upper(s, x)
    } else if s < 0.0 && s > -1.0 {
        // ε^{p−1}Γ(s,εa) = [a^s e^{−εa} − ε^{−s}Γ(s+1,εa)]/(−s)
        (a.powf(s) * (-x).exp() - eps.powf(-s) * upper(s + 1.0, x)) / (-s)
    } else {
        f64::NAN
    }
}

/// Σ_{k>m} k^{−p} e^{−εk}: 400 direct terms, then the midpoint integral
/// for the remainder with its first Euler–Maclaurin correction.
pub fn tail_sum(p: f64, eps: f64, m: usize) -> f64 {
    const DIRECT: usize = 400;
    let mut s = 0.0;
    for k in (m + 1..=m + DIRECT).rev() {
        let kf = k as f64;
        s += kf.powf(-p) * (-eps * kf).exp();
    }
    let a = (m + DIRECT) as f64 + 0.5;
    let fa = a.powf(-p) * (-eps * a).exp();
    let dfa = -(p / a + eps) * fa;
    s + tail_integral(p, eps, a) + dfa / 24.0
}

/// Stationary distribution of a continuous-time chain by the
/// Grassmann–Taksar–Heyman elimination. `rates[(i, j)]` is the rate i → j;
/// the diagonal is ignored. No subtractions are performed, so tiny
/// populations keep full relative accuracy.
pub fn gth_stationary(rates: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = rates.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut p = rates.clone();
    for i in 0..n {
        p[(i, i)] = 0.0;
    }
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| p[(k, j)]).sum();
        if !(s > 0.0) {
            return Err(Error::Reducible(format!("state {k} has no outflow to lower states")));
        }
        for i in 0..k {
            p[(i, k)] /= s;
        }
        for i in 0..k {
            let pik = p[(i, k)];
            if pik == 0.0 {
                continue;
            }
            for j in 0..k {
                p[(i, j)] += pik * p[(k, j)];
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * p[(i, k)]).sum();
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / total).collect())
}

/// Least-squares line y = a + b x; returns (a, b, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}

/// Worker count for independent tasks: `PERIOD3_THREADS` if set, else the
/// available parallelism.
pub fn worker_threads() -> usize {
    std::env::var("PERIOD3_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// `f(0..n)` evaluated on scoped threads; results come back in index order.
pub fn parallel_map<T: Send, F: Fn(usize) -> T + Sync>(n: usize, f: F) -> Vec<T> {
    let threads = worker_threads().min(n.max(1));
    if threads <= 1 {
        return (0..n).map(&f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    std::thread::scope(|sc| {
        let handles: Vec<_> = (0..threads)
            .map(|t| sc.spawn(move || (t * chunk..((t + 1) * chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gth_two_state() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 3.0, 0.0]);
        let pi = gth_stationary(&w).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-15 && (pi[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gth_tiny_populations_keep_relative_accuracy() {
        // birth-death chain with ratio 1e-8 per step: pi_k ∝ 1e-8^k
        let n = 12;
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            w[(i, i + 1)] = 1e-8;
            w[(i + 1, i)] = 1.0;
        }
        let pi = gth_stationary(&w).unwrap();
        for k in 1..n {
            assert!((pi[k] / pi[k - 1] / 1e-8 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_sum_matches_brute_force() {
        for &(p, eps, m) in
            &[(2.0 / 3.0, 0.01, 0usize), (4.0 / 3.0, 0.0, 10), (4.0 / 3.0, 0.3, 64), (2.0 / 3.0, 1e-4, 64)]
        {
            let brute: f64 = (m + 1..m + 4_000_000).map(|k| (k as f64).powf(-p) * (-eps * k as f64).exp()).sum();
            let tail = if eps > 0.0 || p > 1.0 { tail_integral(p, eps, (m + 4_000_000) as f64 - 0.5) } else { 0.0 };
            let exact = brute + tail;
            assert!((tail_sum(p, eps, m) / exact - 1.0).abs() < 1e-9, "p={p} eps={eps}");
        }
    }

    #[test]
    fn quadrature_with_endpoint_singularity() {
        let v = integrate(&|x: f64| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-11);
        let v = integrate(&|x: f64| x.powf(-1.0 / 3.0) * (-x).exp(), 0.0, 2.0, 1e-12).unwrap();
        let exact = statrs::function::gamma::gamma(2.0 / 3.0) * statrs::function::gamma::gamma_lr(2.0 / 3.0, 2.0);
        // nodes stop ~1e-16 from the endpoint, which costs ~δ^{2/3} here
        assert!((v - exact).abs() < 1e-9, "{v} {exact}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn rk4_complex_exponential() {
        let field = |y: C2| [y[1], -y[0]];
        let h = Complex64::new(0.0, 1e-3);
        let y = rk4([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], h, 1000, &field);
        assert!((y[0] - Complex64::new(1.0f64.cosh(), 0.0)).norm() < 1e-10);
    }
}
