//! Dispatch from a configuration to the computations.

use super::bundle::{Metadata, ResultBundle, Series, Table};
use super::config::{RunConfig, Subcommand};
use crate::coupling::{coefficient_integrals, compute_g};
use crate::crossover::{crossover_scan, fit_slope};
use crate::gap::low_density_scan;
use crate::gp::gp_minimize;
use crate::semiclassics::{semiclassical_report, LatticeSpec};
use crate::twobody::{solve_ground_state, BoundState};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::time::Instant;

const PROFILE_POINTS: usize = 400;

struct Output {
    tables: Vec<Table>,
    series: Vec<Series>,
    summary: Vec<String>,
}

fn series(name: &str, x: &str, y: &str, xs: &[f64], ys: &[f64], loglog: bool) -> Series {
    Series {
        name: name.into(),
        x: x.into(),
        y: y.into(),
        points: xs.iter().copied().zip(ys.iter().copied()).collect(),
        loglog,
    }
}

pub fn run(cfg: &RunConfig) -> Result<ResultBundle> {
    cfg.validate()?;
    let sub = cfg.subcommand.ok_or_else(|| Error::ConfigParse("no subcommand given".into()))?;
    let start = Instant::now();
    log::info!("running {} (d = {})", sub.name(), cfg.potential.dim);
    let out = match sub {
        Subcommand::BoundState => bound_state(cfg)?,
        Subcommand::Coupling => coupling(cfg)?,
        Subcommand::Gp => gp(cfg)?,
        Subcommand::Gap => gap(cfg)?,
        Subcommand::Semiclassical => semiclassical(cfg)?,
        Subcommand::Crossover => crossover(cfg)?,
    };
    Ok(ResultBundle {
        tables: out.tables,
        series: out.series,
        summary: out.summary,
        metadata: Metadata {
            subcommand: sub.name().into(),
            config_hash: cfg.hash()?,
            version: env!("CARGO_PKG_VERSION").into(),
            parallel: cfg.execution.is_parallel(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

fn bound(cfg: &RunConfig) -> Result<BoundState> {
    solve_ground_state(&cfg.potential, &cfg.grid_spec())
}

fn bound_state(cfg: &RunConfig) -> Result<Output> {
    let bs = bound(cfg)?;
    let kappa = bs.binding_energy.sqrt();
    let r_max = (30.0 / kappa).min(if bs.box_radius.is_finite() { bs.box_radius } else { f64::INFINITY });
    let q_max = if bs.q_max.is_finite() { bs.q_max } else { 50.0 * kappa };
    let mut pos = Table::new("alpha0", &["r", "alpha0"]);
    let mut mom = Table::new("alpha0_hat", &["q", "alpha0_hat", "t"]);
    for i in 0..PROFILE_POINTS {
        let r = r_max * (i as f64 + 0.5) / PROFILE_POINTS as f64;
        pos.push(vec![r, bs.alpha0_at(r)]);
        let q = q_max * i as f64 / (PROFILE_POINTS - 1) as f64;
        mom.push(vec![q, bs.alpha0_hat(q), bs.t(q)]);
    }
    let s = vec![
        series("alpha0", "r", "alpha0", &pos.column("r").unwrap(), &pos.column("alpha0").unwrap(), false),
        series("alpha0_hat", "q", "alpha0_hat", &mom.column("q").unwrap(), &mom.column("alpha0_hat").unwrap(), false),
    ];
    let summary = vec![
        format!("binding_energy = {:.16e}", bs.binding_energy),
        format!("residual = {:.3e}", bs.residual),
        format!("normalization_error = {:.3e}", bs.normalization_error),
        format!("box_radius = {}", bs.box_radius),
        format!("q_max = {} (tail truncated: {})", bs.q_max, bs.tail_truncated),
    ];
    Ok(Output { tables: vec![pos, mom], series: s, summary })
}

fn coupling(cfg: &RunConfig) -> Result<Output> {
    let bs = bound(cfg)?;
    let g = compute_g(&bs)?;
    let mu = cfg.coupling.mu.unwrap_or(-bs.binding_energy);
    let c = coefficient_integrals(&bs, mu)?;
    let d = c.dim;
    let mut cols = vec!["mu".to_string(), "g".into(), "g_abs_error".into(), "i1".into(), "i2".into(), "i3".into()];
    for j in 0..d {
        for k in 0..d {
            cols.push(format!("i{}{}", j + 1, k + 1));
        }
    }
    let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let mut t = Table::new("coefficients", &refs);
    let mut row = vec![mu, g.value, g.abs_error, c.i1, c.i2, c.i3];
    row.extend(&c.ijk);
    t.push(row);
    let mut summary = vec![
        format!("binding_energy = {:.16e}", bs.binding_energy),
        format!("g = {:.16e} (quadrature error {:.1e})", g.value, g.abs_error),
        format!("i1 = {:.16e}, i2 = {:.16e}, i3 = {:.16e}", c.i1, c.i2, c.i3),
    ];
    if (mu + bs.binding_energy).abs() <= 1e-12 * bs.binding_energy {
        summary.push(format!("|i2 - 4| = {:.3e}, |i3/(16 g) - 1| = {:.3e}", (c.i2 - 4.0).abs(), (c.i3 / (16.0 * g.value) - 1.0).abs()));
    }
    if let crate::twobody::Potential::PointInteraction { scattering_length } = cfg.potential.potential {
        let want = 2.0 * PI * scattering_length;
        summary.push(format!("point interaction: |g - 2 pi a_s| = {:.3e}", (g.value - want).abs()));
    }
    Ok(Output { tables: vec![t], series: Vec::new(), summary })
}

fn gp(cfg: &RunConfig) -> Result<Output> {
    let d = cfg.potential.dim;
    let fields = cfg.fields.build(d)?;
    let g = match cfg.gp.g {
        Some(g) => g,
        None => compute_g(&bound(cfg)?)?.value,
    };
    let m = gp_minimize(&fields, g, &cfg.minimize_options())?;
    let mut cols: Vec<String> = (0..d).map(|j| format!("n{}", j + 1)).collect();
    cols.extend(["re".into(), "im".into()]);
    let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let mut modes = Table::new("psi_modes", &refs);
    for i in 0..m.psi.len() {
        let mut row: Vec<f64> = m.psi.mode(i).iter().map(|n| *n as f64).collect();
        row.extend([m.psi.coeffs[i].re, m.psi.coeffs[i].im]);
        modes.push(row);
    }
    let mut starts = Table::new("starts", &["start", "energy", "grad_norm", "iterations", "converged"]);
    for (k, s) in m.starts.iter().enumerate() {
        starts.push(vec![k as f64, s.energy, s.grad_norm, s.iterations as f64, if s.converged { 1.0 } else { 0.0 }]);
    }
    let mut tables = vec![modes, starts];
    let mut series_out = Vec::new();
    if d == 1 {
        let n = cfg.gp.profile_points;
        let mut prof = Table::new("profile", &["x", "density"]);
        for i in 0..n {
            let x = i as f64 / n as f64;
            prof.push(vec![x, m.psi.eval(&[x]).norm_sqr()]);
        }
        series_out.push(series("density", "x", "density", &prof.column("x").unwrap(), &prof.column("density").unwrap(), false));
        tables.push(prof);
    }
    let mut summary = vec![
        format!("g = {g:.16e}"),
        format!("energy = {:.16e}", m.energy),
        format!("gradient_norm = {:.3e}", m.grad_norm),
        format!("density_integral = {:.16e}", m.psi.norm2()),
    ];
    for s in &m.starts {
        summary.push(format!("start {}: energy {:.16e}, {} iterations", s.label, s.energy, s.iterations));
    }
    Ok(Output { tables, series: series_out, summary })
}

fn gap(cfg: &RunConfig) -> Result<Output> {
    let bs = bound(cfg)?;
    let eps: Vec<f64> = cfg.gap.eps_over_eb.iter().map(|e| e * bs.binding_energy).collect();
    let scan = low_density_scan(&bs, &eps, &cfg.gap.options)?;
    let mut t = Table::new(
        "scan",
        &["eps", "mu", "energy_density", "rho", "c_local", "energy_per_particle", "predicted_epp", "iterations"],
    );
    for r in &scan.rows {
        t.push(vec![r.eps, r.mu, r.energy_density, r.rho, r.c_local, r.energy_per_particle, r.predicted_epp, r.iterations as f64]);
    }
    let minus_f: Vec<f64> = scan.rows.iter().map(|r| -r.energy_density).collect();
    let s = vec![series("energy", "eps", "minus_energy_density", &eps, &minus_f, true)];
    let summary = vec![
        format!("binding_energy = {:.16e} (grid {:.16e})", scan.binding_energy, scan.grid_binding_energy),
        format!("g = {:.16e}", scan.g),
        format!("c_fit = {:.16e}, |4 g c - 1| = {:.3e}", scan.c_fit, scan.c_rel_error),
    ];
    Ok(Output { tables: vec![t], series: s, summary })
}

fn semiclassical(cfg: &RunConfig) -> Result<Output> {
    let bs = bound(cfg)?;
    let d = cfg.potential.dim;
    let fields = cfg.fields.build(d)?;
    let sc = &cfg.semiclassical;
    let psi = sc.psi.to_field(d, 0)?;
    let mu = sc.mu.unwrap_or(-bs.binding_energy);
    let mut t = Table::new(
        "scan",
        &[
            "h",
            "n_modes",
            "trace",
            "prediction",
            "e1",
            "e2",
            "residual",
            "scaled_residual",
            "particle_hole_defect",
            "smallest_abs_eigenvalue",
            "pairing_residual",
            "scaled_pairing_residual",
            "trial_energy",
            "trial_direct",
        ],
    );
    for &h in &sc.h {
        log::info!("lattice at h = {h}");
        let spec = LatticeSpec { h, mu, n_modes: sc.n_modes, theta_samples: sc.theta_samples };
        let r = semiclassical_report(&psi, &fields, &bs, &spec, sc.trial, cfg.execution)?;
        let (te, td) = r.trial.as_ref().map_or((f64::NAN, f64::NAN), |t| (t.total, t.direct));
        t.push(vec![
            h,
            r.n_modes as f64,
            r.trace,
            r.prediction,
            r.e1,
            r.e2,
            r.residual,
            r.scaled_residual,
            r.particle_hole_defect,
            r.smallest_abs_eigenvalue,
            r.pairing_residual,
            r.scaled_pairing_residual,
            te,
            td,
        ]);
    }
    let hs = t.column("h").unwrap();
    let slope = |col: &str| {
        let ys = t.column(col).unwrap();
        fit_slope(&hs.iter().zip(&ys).filter(|(_, y)| **y > 0.0).map(|(h, y)| (h.ln(), y.ln())).collect::<Vec<_>>())
    };
    let summary = vec![
        format!("binding_energy = {:.16e}", bs.binding_energy),
        format!("trace residual slope = {:.6}", slope("residual")),
        format!("scaled trace residual slope = {:.6}", slope("scaled_residual")),
        format!("pairing residual slope = {:.6}", slope("pairing_residual")),
        format!("scaled pairing residual slope = {:.6}", slope("scaled_pairing_residual")),
    ];
    let s = vec![
        series("trace_residual", "h", "residual", &hs, &t.column("residual").unwrap(), true),
        series("pairing_residual", "h", "pairing_residual", &hs, &t.column("pairing_residual").unwrap(), true),
    ];
    Ok(Output { tables: vec![t], series: s, summary })
}

fn crossover(cfg: &RunConfig) -> Result<Output> {
    let bs = bound(cfg)?;
    let c = &cfg.crossover;
    let rep = crossover_scan(&bs, c.delta_mu, &c.h, &cfg.gap.options, cfg.execution)?;
    let mut t = Table::new(
        "scan",
        &["h", "E_bcs_over_h", "E_gp", "e", "fitted_exponent", "iterations", "gap_residual", "converged"],
    );
    for r in &rep.rows {
        let conv = if r.outcome == crate::gap::GapOutcome::Converged { 1.0 } else { 0.0 };
        t.push(vec![r.h, r.e_bcs_scaled, r.e_gp, r.e, rep.decay_exponent, r.iterations as f64, r.gap_residual, conv]);
    }
    let mut dens = Table::new("density", &["h", "N", "rho"]);
    for r in &rep.density {
        dens.push(vec![r.h, r.n, r.rho]);
    }
    let hs = t.column("h").unwrap();
    let abs_e: Vec<f64> = rep.rows.iter().map(|r| r.e.abs()).collect();
    let s = vec![series("error", "h", "abs_e", &hs, &abs_e, true)];
    let summary = vec![
        format!("g = {:.16e}, E_gp = {:.16e}", rep.g, rep.e_gp),
        format!("fitted exponent of |e(h)| = {:.6}", rep.decay_exponent),
        format!("|e(h)| strictly decreasing: {}", rep.e_decreasing),
        "E_bcs = h^-d F_ti(-E_b + h^2 delta_mu); E_bcs_over_h = E_bcs / h^(4-d)".into(),
    ];
    Ok(Output { tables: vec![t, dens], series: s, summary })
}
