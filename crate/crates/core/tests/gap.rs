mod common;

use bcs2gp::coupling::compute_g;
use bcs2gp::gap::{low_density_scan, observables, solve_gap_equation, GapGrid, GapGridSpec, GapOptions, GapOutcome};
use bcs2gp::twobody::{solve_ground_state, BoundState, GridSpec, PotentialSpec};
use common::bfgs;

fn well() -> BoundState {
    let v = PotentialSpec::gaussian(3, 4.0, 1.0);
    solve_ground_state(&v, &GridSpec::for_potential(&v)).unwrap()
}

fn small_grid() -> GapOptions {
    GapOptions { grid: GapGridSpec { order: 6, panels: Some(10) }, ..Default::default() }
}

/// Direct minimisation of the reduced energy over `γ = sin²(θ/2)`,
/// `α = ½ sin θ`, which saturates `γ(1 - γ) = α²`.
fn direct_minimum(grid: &GapGrid, mu: f64, start: &[f64]) -> f64 {
    let n = grid.len();
    let m = &grid.measure;
    let xi: Vec<f64> = grid.p.iter().map(|p| p * p - mu).collect();
    // symmetric form of the kernel, K_ij = m_j k_ij
    let k: Vec<f64> = (0..n * n).map(|ij| grid.kernel[(ij / n, ij % n)] / m[ij % n]).collect();
    let f = |th: &[f64]| {
        let alpha: Vec<f64> = th.iter().map(|t| 0.5 * t.sin()).collect();
        let mut e = 0.0;
        let mut grad = vec![0.0; n];
        for i in 0..n {
            let ka: f64 = (0..n).map(|j| k[i * n + j] * m[j] * alpha[j]).sum();
            e += m[i] * (xi[i] * (0.5 * th[i]).sin().powi(2) + alpha[i] * ka);
            grad[i] = m[i] * (xi[i] * 0.5 * th[i].sin() + 2.0 * ka * 0.5 * th[i].cos());
        }
        (e, grad)
    };
    bfgs(&f, start, 20_000, 1e-18).1
}

#[test]
fn fixed_point_matches_direct_minimisation() {
    let bs = well();
    let opts = small_grid();
    let grid = GapGrid::new(&bs, &opts.grid).unwrap();
    assert_eq!(grid.len(), 60);
    let mu = -bs.binding_energy + 0.01 * bs.binding_energy;
    let gs = solve_gap_equation(&bs, mu, &opts).unwrap();
    assert_eq!(gs.outcome, GapOutcome::Converged);
    let start: Vec<f64> = grid.p.iter().map(|p| -0.05 / (1.0 + p * p)).collect();
    let direct = direct_minimum(&grid, mu, &start);
    assert!((gs.energy_density / direct - 1.0).abs() < 1e-4, "{} vs {direct}", gs.energy_density);
}

#[test]
fn states_are_admissible() {
    let bs = well();
    let gs = solve_gap_equation(&bs, -0.98 * bs.binding_energy, &small_grid()).unwrap();
    for (g, a) in gs.gamma.iter().zip(&gs.alpha) {
        assert!((0.0..=1.0).contains(g));
        assert!((g * (1.0 - g) - a * a).abs() < 1e-8);
    }
    assert!(gs.residual < 1e-8);
}

#[test]
fn below_threshold_collapses_to_normal_state() {
    let bs = well();
    let gs = solve_gap_equation(&bs, -1.1 * bs.binding_energy, &small_grid()).unwrap();
    assert_eq!(gs.outcome, GapOutcome::CollapsedToNormal);
    assert_eq!(gs.energy_density, 0.0);
    assert!(observables(&gs, 1.0, bs.binding_energy).is_err());
}

#[test]
fn low_density_coefficient_is_quarter_inverse_coupling() {
    let bs = well();
    let eb = bs.binding_energy;
    let scan = low_density_scan(&bs, &[0.04 * eb, 0.02 * eb], &GapOptions::default()).unwrap();
    let g = compute_g(&bs).unwrap().value;
    assert_eq!(scan.g, g);
    assert!(scan.c_rel_error < 0.1, "{}", scan.c_rel_error);
    assert!((scan.grid_binding_energy / eb - 1.0).abs() < 1e-6);
    for r in &scan.rows {
        assert!(r.energy_density < 0.0 && r.rho > 0.0);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let bs = well();
    assert!(low_density_scan(&bs, &[], &GapOptions::default()).is_err());
    assert!(low_density_scan(&bs, &[-0.1], &GapOptions::default()).is_err());
    let bad = GapOptions { grid: GapGridSpec { order: 0, panels: None }, ..Default::default() };
    assert!(solve_gap_equation(&bs, -0.9 * bs.binding_energy, &bad).is_err());
    let point = BoundState::point_interaction(1.0).unwrap();
    assert!(solve_gap_equation(&point, -0.9, &GapOptions::default()).is_err());
}
