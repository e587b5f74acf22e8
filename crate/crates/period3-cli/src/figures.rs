//! Datasets behind each figure. Default parameters live in [`DEFAULTS`].

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::CliError;
use period3::{bifurcation, kinetics, model, orbits, spectrum, ModelParams};

/// (id, f, lambda, kappa, nbar, g_points, f_points, kappa_points, summary).
type FigureDefaults = (&'static str, f64, f64, f64, f64, usize, usize, usize, &'static str);

/// Frozen defaults per figure.
pub const DEFAULTS: [FigureDefaults; 11] = [
    ("fig1d", 0.0, 0.04, 0.0, 0.0, 12, 41, 2, "lowest eigenvalues g_n^(k) per sector vs f"),
    ("fig3", 0.5, 0.004, 0.0, 0.0, 40, 2, 2, "omega*tau_inf vs scaled energy for f in {0.1, 0.5, 2}"),
    ("fig4", 0.5, 0.004, 0.0, 0.0, 2, 30, 2, "harmonic inverse temperature vs f for nbar in {0, 0.01, 0.1, 1}"),
    ("fig5", 0.5, 0.004, 0.0, 0.0, 40, 2, 2, "omega*(2 tau_inf - R') vs scaled energy for f in {0.1, 0.5, 1, 2}"),
    ("fig6", 0.5, 0.004, 0.0, 0.0, 2, 34, 2, "scaled nonlocality onset vs f at nbar = 0"),
    ("fig7", 0.5, 0.004, 0.0, 0.0, 40, 2, 2, "R' from the eikonal equation and from the Wannier solve"),
    ("fig8", 0.5, 0.004, 0.0, 0.0, 20, 2, 2, "|tau_tun| and tau_inf vs scaled energy for f in {0.1, 0.5, 2}"),
    (
        "fig9",
        0.5,
        0.004,
        0.0,
        0.0,
        2,
        20,
        2,
        "activation energy vs f for nbar in {0.01, 0.1, 1} and the classical limit",
    ),
    ("fig10", 0.5, 0.004, 1.0, 0.0, 2, 2, 2, "normalized flux matrices at nbar in {0, 0.05}"),
    ("fig12", 0.5, 0.004, 0.0, 0.0, 2, 2, 2, "|a_m| numeric vs asymptotic at g = -0.1"),
    ("fig13", 0.5, 0.004, 0.0, 0.0, 2, 2, 60, "rescaled threshold drive vs 1/kappa"),
];

pub fn defaults(id: &str) -> Option<RunConfig> {
    DEFAULTS.iter().find(|d| d.0 == id).map(|&(_, f, lambda, kappa, nbar, gp, fp, kp, _)| RunConfig {
        f: Some(f),
        lambda: Some(lambda),
        kappa: Some(kappa),
        nbar: Some(nbar),
        sign_delta: Some(1.0),
        g_points: Some(gp),
        f_points: Some(fp),
        kappa_points: Some(kp),
        ..RunConfig::default()
    })
}

fn numeric(context: &str) -> impl FnOnce(period3::Error) -> CliError + '_ {
    move |source| CliError::Numeric { context: context.to_string(), source }
}

/// `n` points evenly spaced on [a, b].
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// A curve family, or just the user's f if one was given.
fn family(user: &RunConfig, set: &[f64]) -> Vec<f64> {
    user.f.map(|f| vec![f]).unwrap_or_else(|| set.to_vec())
}

/// Runs figure `id`. `user` holds only what the caller set; `cfg` has the
/// figure defaults filled in.
pub fn run_figure(id: &str, user: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let base = defaults(id).ok_or_else(|| CliError::UnknownFigure(id.into()))?;
    let cfg = user.clone().with_defaults(&base);
    let m = cfg.model()?;
    let gp = cfg.g_points.unwrap_or(40);
    let fpts = cfg.f_points.unwrap_or(20);
    match id {
        "fig1d" => fig1d(&m, gp, &user.f.map(|f| vec![f]).unwrap_or_else(|| linspace(0.0, 2.0, fpts)), cfg.n_max),
        "fig3" => fig3(&m, &family(user, &[0.1, 0.5, 2.0]), gp),
        "fig4" => fig4(&m, fpts),
        "fig5" => fig5(&m, &family(user, &[0.1, 0.5, 1.0, 2.0]), gp),
        "fig6" => fig6(&m, fpts),
        "fig7" => fig7(&m, gp, cfg.n_max),
        "fig8" => fig8(&m, &family(user, &[0.1, 0.5, 2.0]), gp),
        "fig9" => fig9(&m, fpts),
        "fig10" => fig10(&m, cfg.n_max),
        "fig12" => fig12(&m),
        "fig13" => fig13(&m, cfg.kappa_points.unwrap_or(60)),
        _ => Err(CliError::UnknownFigure(id.into())),
    }
}

/// One truncation for the whole sweep, sized for the largest drive; without
/// wells (f = 0) a fixed 120 keeps the lowest levels converged.
fn fig1d(m: &ModelParams, levels: usize, fs: &[f64], n_max: Option<usize>) -> Result<Vec<Dataset>, CliError> {
    let f_top = fs.iter().copied().fold(0.0, f64::max);
    let n_max = n_max.unwrap_or_else(|| spectrum::auto_n_max(&ModelParams { f: f_top, ..*m }).unwrap_or(120).max(120));
    let mut d = Dataset::new("fig1d", &["f", "k", "n", "g"]);
    d.note("n_max", n_max);
    for &f in fs {
        let mf = ModelParams { f, ..*m };
        let spec = spectrum::diagonalize(&mf, n_max).map_err(numeric("diagonalization"))?;
        for (k, sector) in spec.sectors.iter().enumerate() {
            for (n, &g) in sector.values.iter().take(levels).enumerate() {
                d.push(&[f, k as f64, n as f64, g]);
            }
        }
    }
    Ok(vec![d])
}

fn fig3(m: &ModelParams, fs: &[f64], gp: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig3", &["f", "dg", "g", "omega", "tau_inf", "omega_tau_inf"]);
    for &f in fs {
        let mf = ModelParams { f, ..*m };
        let fp = model::wells(&mf).map_err(numeric("wells"))?;
        for dg in linspace(0.01, 0.99, gp) {
            let g = fp.g_at(dg);
            let o = orbits::orbit_solve(&mf, g).map_err(numeric("orbit"))?;
            let t = orbits::tau_infinity(&mf, g).map_err(numeric("tau_inf"))?;
            d.push(&[f, dg, g, o.omega, t, o.omega * t]);
        }
    }
    Ok(vec![d])
}

fn fig4(m: &ModelParams, fpts: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig4", &["nbar", "f", "n_eff", "inverse_temperature"]);
    let mut dots = Dataset::new("fig4_eikonal", &["nbar", "f", "inverse_temperature"]);
    dots.note("method", "omega*R' of the eikonal root at scaled energy 1e-3");
    for nbar in [0.0, 0.01, 0.1, 1.0] {
        for f in linspace(0.05, 1.5, fpts) {
            let h = kinetics::harmonic_distribution(&ModelParams { f, nbar, ..*m }).map_err(numeric("harmonic"))?;
            d.push(&[nbar, f, h.n_eff, h.ratio]);
        }
        for f in [0.25, 0.5, 1.0, 1.5] {
            let mf = ModelParams { f, nbar, ..*m }.with_kappa(1.0);
            let fp = model::wells(&mf).map_err(numeric("wells"))?;
            let p = kinetics::eikonal_point(&mf, fp.g_at(1e-3)).map_err(numeric("eikonal"))?;
            dots.push(&[nbar, f, p.rprime.map(|r| r * p.omega).unwrap_or(f64::NAN)]);
        }
    }
    Ok(vec![d, dots])
}

fn fig5(m: &ModelParams, fs: &[f64], gp: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig5", &["f", "dg", "g", "omega_2tau_minus_rprime", "local"]);
    for &f in fs {
        let mf = ModelParams { f, ..*m }.with_kappa(1.0);
        let fp = model::wells(&mf).map_err(numeric("wells"))?;
        let top = kinetics::retained_top(&mf).map_err(numeric("retained range"))?;
        for dg in linspace(0.01, top, gp) {
            let p = kinetics::eikonal_point(&mf, fp.g_at(dg)).map_err(numeric("eikonal"))?;
            let v = p.rprime.map(|r| p.omega * (2.0 * p.tau_inf - r)).unwrap_or(f64::NAN);
            d.push(&[f, dg, p.g, v, if p.local { 1.0 } else { 0.0 }]);
        }
    }
    Ok(vec![d])
}

fn fig6(m: &ModelParams, fpts: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig6", &["f", "dg_nl"]);
    d.note("nan", "no locality breakdown below the retained top of the well");
    let fs = linspace(0.15, 1.8, fpts);
    let rows = period3::numerics::parallel_map(fs.len(), |i| {
        let mf = ModelParams { f: fs[i], nbar: 0.0, ..*m }.with_kappa(1.0);
        kinetics::detect_nonlocality(&mf).map(|r| r.dg_nl.unwrap_or(f64::NAN))
    });
    for (f, r) in fs.iter().zip(rows) {
        d.push(&[*f, r.map_err(numeric("nonlocality"))?]);
    }
    Ok(vec![d])
}

fn fig7(m: &ModelParams, gp: usize, n_max: Option<usize>) -> Result<Vec<Dataset>, CliError> {
    let mk = m.with_kappa(1.0);
    let fp = model::wells(&mk).map_err(numeric("wells"))?;
    let report = kinetics::detect_nonlocality(&mk).map_err(numeric("nonlocality"))?;
    let top = kinetics::retained_top(&mk).map_err(numeric("retained range"))?;
    // the root is lost exactly at g_NL, so stop just short of it
    let end = report.dg_nl.map(|d| d - 1e-4).unwrap_or(top);
    let mut eik = Dataset::new("fig7_eikonal", &["dg", "g", "rprime", "two_tau_inf", "local"]);
    eik.note("dg_nl", report.dg_nl.map(|x| x.to_string()).unwrap_or_else(|| "none".into()));
    for dg in linspace(0.01, end, gp) {
        let p = kinetics::eikonal_point(&mk, fp.g_at(dg)).map_err(numeric("eikonal"))?;
        if report.g_nl.is_some_and(|gnl| p.g > gnl) {
            continue;
        }
        eik.push(&[dg, p.g, p.rprime.unwrap_or(f64::NAN), 2.0 * p.tau_inf, if p.local { 1.0 } else { 0.0 }]);
    }
    let q = kinetics::quantum_kinetics(&mk, n_max).map_err(numeric("quantum kinetics"))?;
    let mut wan = Dataset::new("fig7_wannier", &["dg", "g", "rprime", "two_tau_inf"]);
    wan.note("levels", q.basis.len()).note("excluded", q.excluded);
    for &(g, r) in &q.stationary.rprime {
        let t = orbits::tau_infinity(&mk, g).map_err(numeric("tau_inf"))?;
        wan.push(&[fp.delta_g(g), g, r, 2.0 * t]);
    }
    Ok(vec![eik, wan])
}

fn fig8(m: &ModelParams, fs: &[f64], gp: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig8", &["f", "dg", "g", "tau_inf", "abs_tau_tun"]);
    for &f in fs {
        let mf = ModelParams { f, ..*m };
        let fp = model::wells(&mf).map_err(numeric("wells"))?;
        for dg in linspace(0.02, 0.98, gp) {
            let g = fp.g_at(dg);
            let t = orbits::tunneling_data(&mf, g).map_err(numeric("tunneling"))?;
            d.push(&[f, dg, g, t.tau_inf, t.tau_tun.abs()]);
        }
    }
    Ok(vec![d])
}

fn fig9(m: &ModelParams, fpts: usize) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig9", &["f", "nbar", "r_a", "scaled_r_a", "classical"]);
    d.note("scaled_r_a", "(2 nbar + 1) R_A, to compare with the classical column");
    let fs = linspace(0.1, 2.0, fpts);
    let rows = period3::numerics::parallel_map(fs.len(), |i| -> period3::Result<Vec<[f64; 5]>> {
        let mf = ModelParams { f: fs[i], ..*m }.with_kappa(1.0);
        let cl = kinetics::classical_activation_energy(&mf)?;
        [0.01, 0.1, 1.0]
            .iter()
            .map(|&nbar| {
                let ra = kinetics::activation_energy(&mf.with_nbar(nbar), None)?.r_a;
                Ok([fs[i], nbar, ra, (2.0 * nbar + 1.0) * ra, cl])
            })
            .collect()
    });
    for r in rows {
        for row in r.map_err(numeric("activation energy"))? {
            d.push(&row);
        }
    }
    Ok(vec![d])
}

fn fig10(m: &ModelParams, n_max: Option<usize>) -> Result<Vec<Dataset>, CliError> {
    let mut d = Dataset::new("fig10", &["nbar", "from", "to", "g_from", "g_to", "flux"]);
    d.note("normalization", "each column (destination) scaled by its largest incoming flux");
    for nbar in [0.0, 0.05] {
        let q = kinetics::quantum_kinetics(&m.with_nbar(nbar), n_max).map_err(numeric("quantum kinetics"))?;
        let fm = kinetics::flux_matrix(&q.stationary.rho, &q.rates);
        let g = &q.rates.g;
        for i in 0..g.len() {
            for j in 0..g.len() {
                d.push(&[nbar, i as f64, j as f64, g[i], g[j], fm[(i, j)]]);
            }
        }
    }
    Ok(vec![d])
}

fn fig12(m: &ModelParams) -> Result<Vec<Dataset>, CliError> {
    let g = -0.1;
    let o = orbits::orbit_solve(m, g).map_err(numeric("orbit"))?;
    let table = orbits::fourier_coefficients(&o, m.lambda, 30).map_err(numeric("fourier"))?;
    let mut d = Dataset::new("fig12", &["m", "abs_numeric", "abs_asymptotic", "reliable"]);
    d.note("g", g).note("omega", o.omega).note("tau_inf", table.tau_inf);
    for k in -30i64..=30 {
        if k == 0 {
            continue;
        }
        let a = orbits::asymptotic_element(m, o.omega, table.tau_inf, m.lambda, k);
        let limit = if k > 0 { table.reliable_pos } else { table.reliable_neg };
        d.push(&[k as f64, table.abs(k), a.value, if k.unsigned_abs() as usize <= limit { 1.0 } else { 0.0 }]);
    }
    Ok(vec![d])
}

fn fig13(m: &ModelParams, kp: usize) -> Result<Vec<Dataset>, CliError> {
    let kappas: Vec<f64> = (0..kp).map(|i| 10f64.powf(-1.3 + 2.6 * i as f64 / (kp - 1).max(1) as f64)).collect();
    let mut d = Dataset::new("fig13", &["inv_kappa", "ftilde_sq_B"]);
    d.note("relation", "ftilde^2 = 2[(1+kappa^2)^(1/2) - sign_delta]/kappa");
    for (x, y) in bifurcation::scaled_threshold_curve(&kappas, m.sign_delta) {
        d.push(&[x, y]);
    }
    Ok(vec![d])
}
