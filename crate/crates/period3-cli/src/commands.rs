//! Non-figure subcommands and the parameter sweep.

use crate::config::RunConfig;
use crate::dataset::{num, Dataset};
use crate::CliError;
use period3::bifurcation::{self as bf, SlowMode, SlowModeOptions};
use period3::{kinetics, model, orbits, spectrum, ModelParams};

fn numeric(context: &str) -> impl FnOnce(period3::Error) -> CliError + '_ {
    move |source| CliError::Numeric { context: context.to_string(), source }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// Quasienergy levels per sector and the below-saddle triplets.
pub fn spectrum_cmd(cfg: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let m = cfg.model()?;
    let n_max = match cfg.n_max {
        Some(n) => n,
        None => spectrum::auto_n_max(&m).map_err(numeric("truncation"))?,
    };
    let spec = spectrum::diagonalize(&m, n_max).map_err(numeric("diagonalization"))?;
    let mut levels = Dataset::new("spectrum_levels", &["k", "n", "g"]);
    levels.note("n_max", n_max).note("truncation_warning", spec.truncation_warning);
    for (k, s) in spec.sectors.iter().enumerate() {
        for (n, &g) in s.values.iter().enumerate() {
            levels.push(&[k as f64, n as f64, g]);
        }
    }
    let mut out = vec![levels];
    if let Ok(fp) = model::wells(&m) {
        let table = spectrum::classify_triplets(&spec, fp.g_s);
        let mut t = Dataset::new("spectrum_triplets", &["index", "mean", "dg", "splitting", "g0", "g1", "g2"]);
        t.note("g_s", fp.g_s).note("g_min", fp.g_min).note("excluded_near_saddle", table.excluded.len());
        for tr in &table.triplets {
            t.push(&[
                tr.index as f64,
                tr.mean,
                fp.delta_g(tr.mean),
                tr.splitting,
                tr.energies[0],
                tr.energies[1],
                tr.energies[2],
            ]);
        }
        out.push(t);
    }
    Ok(out)
}

/// Orbit frequency, singularity distance and tunneling data over the well.
pub fn orbits_cmd(cfg: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let m = cfg.model()?;
    let fp = model::wells(&m).map_err(numeric("wells"))?;
    let mut d = Dataset::new(
        "orbits",
        &["dg", "g", "omega", "period", "tau_inf", "tau_tun", "s_tun", "closure_error", "energy_drift"],
    );
    for dg in grid(0.02, 0.98, cfg.g_points.unwrap_or(25)) {
        let g = fp.g_at(dg);
        let o = orbits::orbit_solve(&m, g).map_err(numeric("orbit"))?;
        let t = orbits::tunneling_data(&m, g).map_err(numeric("tunneling"))?;
        d.push(&[dg, g, o.omega, o.period, t.tau_inf, t.tau_tun, t.s_tun, o.closure_error, o.energy_drift]);
    }
    Ok(vec![d])
}

/// Quantum stationary distribution, the eikonal slope and R_A.
pub fn kinetics_cmd(cfg: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let m = cfg.model()?;
    let mk = if m.kappa > 0.0 { m } else { m.with_kappa(1.0) };
    let fp = model::wells(&mk).map_err(numeric("wells"))?;
    let q = kinetics::quantum_kinetics(&mk, cfg.n_max).map_err(numeric("quantum kinetics"))?;
    let st = &q.stationary;
    let mut dist = Dataset::new("kinetics_stationary", &["level", "g", "dg", "rho", "r"]);
    let db = kinetics::detailed_balance_residual(&q.rates);
    dist.note("levels", q.basis.len())
        .note("excluded", q.excluded)
        .note("balance_residual", st.residual)
        .note("monotone", st.monotone)
        .note("cycle_violation", db.max_violation);
    for (i, (&g, &rho)) in st.g.iter().zip(&st.rho).enumerate() {
        dist.push(&[i as f64, g, fp.delta_g(g), rho, st.r[i]]);
    }
    let report = kinetics::detect_nonlocality(&mk).map_err(numeric("nonlocality"))?;
    let top = kinetics::retained_top(&mk).map_err(numeric("retained range"))?;
    let mut eik = Dataset::new("kinetics_eikonal", &["dg", "g", "rprime_eikonal", "two_tau_inf", "local"]);
    eik.note("dg_nl", report.dg_nl.map(|x| x.to_string()).unwrap_or_else(|| "none".into()));
    for dg in grid(0.01, top, cfg.g_points.unwrap_or(40)) {
        let p = kinetics::eikonal_point(&mk, fp.g_at(dg)).map_err(numeric("eikonal"))?;
        eik.push(&[dg, p.g, p.rprime.unwrap_or(f64::NAN), 2.0 * p.tau_inf, if p.local { 1.0 } else { 0.0 }]);
    }
    let ra = kinetics::activation_energy(&mk, Some(st)).map_err(numeric("activation energy"))?;
    let mut summary =
        Dataset::new("kinetics_summary", &["r_a", "condition_ok", "splice_g", "sensitivity_minus", "sensitivity_plus"]);
    let (sm, sp) = ra.splice_sensitivity.unwrap_or((f64::NAN, f64::NAN));
    summary.push(&[ra.r_a, if ra.condition_ok { 1.0 } else { 0.0 }, ra.splice.unwrap_or(f64::NAN), sm, sp]);
    Ok(vec![dist, eik, summary])
}

fn escape_row(m: &ModelParams, kappa: f64, seed: u64, trajectories: usize) -> period3::Result<[f64; 11]> {
    let bd = bf::slow_mode_reduction(m)?;
    let opts = SlowModeOptions { trajectories, ..SlowModeOptions::default() };
    let stats = bf::simulate_slow_mode_with(&bd, m, kappa, seed, &opts)?;
    let sm = SlowMode::new(&bd, m, kappa)?;
    let oracle = bf::mfpt_quadrature(&sm, opts.boundary_factor)?;
    let k = bf::kramers_comparison(&bd, m, kappa)?;
    Ok([
        kappa,
        kappa - bd.kappa_b,
        stats.mfpt,
        stats.std_error,
        stats.escaped as f64,
        stats.trajectories as f64,
        stats.dt,
        oracle,
        k.exponent,
        k.standard,
        k.ratio,
    ])
}

const ESCAPE_COLUMNS: [&str; 11] = [
    "kappa",
    "dkappa",
    "mfpt",
    "std_error",
    "escaped",
    "trajectories",
    "dt",
    "mfpt_quadrature",
    "kramers_exponent",
    "barrier_over_d",
    "ratio",
];

/// Slow-mode escape near the bifurcation at the configured κ.
pub fn escape_cmd(cfg: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let m = cfg.model()?;
    let mut d = Dataset::new("escape", &ESCAPE_COLUMNS);
    d.note("seed", cfg.seed());
    let row =
        escape_row(&m, m.kappa, cfg.seed(), cfg.trajectories.unwrap_or(2500)).map_err(numeric("slow-mode escape"))?;
    d.push(&row);
    Ok(vec![d])
}

/// Stationary states at κ and the slow-mode reduction at κ_B.
pub fn bifurcation_cmd(cfg: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let m = cfg.model()?;
    let set = bf::classical_fixed_points(&m, m.kappa).map_err(numeric("fixed points"))?;
    let mut fps = Dataset::new(
        "bifurcation_states",
        &["kind", "index", "q", "p", "r", "eig1_re", "eig1_im", "eig2_re", "eig2_im"],
    );
    fps.note("above_threshold", set.above_threshold);
    let mut add = |kind: &str, i: usize, p: &bf::FixedPoint| {
        let e = p.eigenvalues;
        let mut row = vec![kind.to_string(), i.to_string()];
        row.extend([p.point.q, p.point.p, p.radius(), e[0].re, e[0].im, e[1].re, e[1].im].map(num));
        fps.push_cells(row);
    };
    add("origin", 0, &set.origin);
    for (i, p) in set.stable.iter().enumerate() {
        add("stable", i, p);
    }
    for (i, p) in set.saddles.iter().enumerate() {
        add("saddle", i, p);
    }
    let mut red =
        Dataset::new("bifurcation_reduction", &["kappa_b", "f_b", "q_b", "p_b", "phi_b", "a_b", "b_b", "k_ad", "r_b"]);
    match bf::slow_mode_reduction(&m) {
        Ok(b) => red.push(&[b.kappa_b, b.f_b, b.x_b.re, b.x_b.im, b.phi_b, b.a_b, b.b_b, b.k_ad, b.r_b]),
        Err(e) => {
            red.note("status", format!("no bifurcation: {e}"));
        }
    }
    Ok(vec![fps, red])
}

/// One sweep point: named operation → values, or an error message.
fn sweep_point(op: &str, m: &ModelParams, seed: u64, trajectories: usize) -> period3::Result<Vec<f64>> {
    let mk = if m.kappa > 0.0 { *m } else { m.with_kappa(1.0) };
    match op {
        "activation_energy" => {
            let a = kinetics::activation_energy(&mk, None)?;
            Ok(vec![a.r_a, if a.condition_ok { 1.0 } else { 0.0 }])
        }
        "nonlocality" => {
            let r = kinetics::detect_nonlocality(&mk)?;
            Ok(vec![r.dg_nl.unwrap_or(f64::NAN), kinetics::nonlocality_strength(&mk, 64)?])
        }
        "harmonic" => {
            let h = kinetics::harmonic_distribution(m)?;
            Ok(vec![h.n_eff, h.ratio])
        }
        "kappa_b" => {
            let b = bf::bifurcation_point(m);
            Ok(vec![b.kappa_b, b.f_round_trip])
        }
        "slow_mode" => {
            let r = escape_row(m, m.kappa, seed, trajectories)?;
            Ok(vec![r[2], r[3]])
        }
        _ => unreachable!("operation names are validated by the config parser"),
    }
}

fn sweep_columns(op: &str) -> [&'static str; 2] {
    match op {
        "activation_energy" => ["r_a", "condition_ok"],
        "nonlocality" => ["dg_nl", "strength"],
        "harmonic" => ["n_eff", "inverse_temperature"],
        "kappa_b" => ["kappa_b", "f_round_trip"],
        _ => ["mfpt", "std_error"],
    }
}

/// Cartesian sweep over f × nbar × kappa; failed points are kept as rows.
pub fn sweep_cmd(cfg: &RunConfig) -> Result<(Vec<Dataset>, usize), CliError> {
    let op = cfg.sweep_op.clone().ok_or_else(|| crate::config::ConfigError::Missing("sweep_op".into()))?;
    let need = |v: Option<f64>, k: &str| v.ok_or_else(|| crate::config::ConfigError::Missing(k.into()));
    let fs = match &cfg.sweep_f {
        Some(v) => v.clone(),
        None => vec![need(cfg.f, "f")?],
    };
    let ns = match &cfg.sweep_nbar {
        Some(v) => v.clone(),
        None => vec![need(cfg.nbar, "nbar")?],
    };
    let ks = match &cfg.sweep_kappa {
        Some(v) => v.clone(),
        None => vec![need(cfg.kappa, "kappa")?],
    };
    let lambda = need(cfg.lambda, "lambda")?;
    let s = cfg.sign_delta.unwrap_or(1.0);
    let mut points = Vec::new();
    for &f in &fs {
        for &nbar in &ns {
            for &kappa in &ks {
                points.push((f, nbar, kappa));
            }
        }
    }
    let seed = cfg.seed();
    let traj = cfg.trajectories.unwrap_or(500);
    let results = period3::numerics::parallel_map(points.len(), |i| {
        let (f, nbar, kappa) = points[i];
        ModelParams::new(f, lambda, kappa, nbar, s)
            .and_then(|m| sweep_point(&op, &m, seed.wrapping_add(i as u64), traj))
    });
    let [c1, c2] = sweep_columns(&op);
    let mut d = Dataset::new(&format!("sweep_{op}"), &["f", "nbar", "kappa", "status", c1, c2, "message"]);
    d.note("operation", &op).note("seed", seed);
    let mut failed = 0;
    for (&(f, nbar, kappa), r) in points.iter().zip(results) {
        let mut row = vec![num(f), num(nbar), num(kappa)];
        match r {
            Ok(v) => {
                row.push("ok".into());
                row.extend(v.iter().map(|&x| num(x)));
                row.push(String::new());
            }
            Err(e) => {
                failed += 1;
                row.extend(["failed".to_string(), "nan".into(), "nan".into(), e.to_string()]);
            }
        }
        d.push_cells(row);
    }
    Ok((vec![d], failed))
}
