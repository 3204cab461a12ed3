mod common;

use bcs2gp::twobody::{solve_ground_state, BoundState, GridSpec, Potential, PotentialSpec};
use bcs2gp::Error;
use common::numerov_extrapolated;
use std::f64::consts::PI;

fn solve(v: &PotentialSpec) -> BoundState {
    solve_ground_state(v, &GridSpec::for_potential(v)).unwrap()
}

#[test]
fn gaussian_well_matches_numerov_in_three_dimensions() {
    let v = PotentialSpec::gaussian(3, 4.0, 1.0);
    let bs = solve(&v);
    let oracle = numerov_extrapolated(&|r| -4.0 * (-r * r).exp(), true, 40.0, 40_000, 4.0);
    assert!((bs.binding_energy / oracle - 1.0).abs() < 1e-8, "{} vs {oracle}", bs.binding_energy);
    assert!(bs.residual < 1e-8);
}

#[test]
fn gaussian_well_matches_numerov_in_one_dimension() {
    let v = PotentialSpec::gaussian(1, 8.0, 1.0);
    let bs = solve(&v);
    let oracle = numerov_extrapolated(&|r| -8.0 * (-r * r).exp(), false, 20.0, 20_000, 8.0);
    assert!((bs.binding_energy / oracle - 1.0).abs() < 1e-8, "{} vs {oracle}", bs.binding_energy);
}

#[test]
fn square_well_matches_transcendental_equation() {
    // k cot(k R) = -κ with k² = V0 - κ², R = 1
    let (v0, r) = (4.0, 1.0);
    let f = |e: f64| {
        let k = (v0 - e).sqrt();
        k / (k * r).tan() + e.sqrt()
    };
    let (mut lo, mut hi) = (1e-12, v0 - (PI / 2.0).powi(2) - 1e-12);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if (f(m) > 0.0) == (f(lo) > 0.0) { lo = m } else { hi = m }
    }
    let exact = 0.5 * (lo + hi);
    let bs = solve(&PotentialSpec::square(3, v0, r));
    // the discontinuity limits the DVR to second order in the spacing
    assert!((bs.binding_energy / exact - 1.0).abs() < 1e-2, "{} vs {exact}", bs.binding_energy);
}

#[test]
fn point_interaction_binding_energy() {
    let bs = BoundState::point_interaction(0.5).unwrap();
    assert!((bs.binding_energy - 4.0).abs() < 1e-14);
    assert!((bs.t(0.0) - bs.t(30.0)).abs() < 1e-12);
}

#[test]
fn momentum_normalization_and_kernel() {
    for v in [PotentialSpec::gaussian(3, 4.0, 1.0), PotentialSpec::gaussian(1, 4.0, 1.0)] {
        let bs = solve(&v);
        assert!(bs.normalization_error < 1e-10);
        let norm = bs.momentum_integral(&|q| bs.alpha0_hat(q).powi(2), 1e-12).unwrap().value;
        assert!((norm - 1.0).abs() < 1e-9, "norm {norm}");
        for q in [0.0, 0.5, 1.5, 3.0] {
            let (a, b) = (bs.t(q), bs.t_from_potential(q));
            assert!((a - b).abs() < 1e-7 * a.abs().max(1.0), "t({q}) = {a} vs {b}");
        }
    }
}

#[test]
fn shallow_one_dimensional_well_still_binds() {
    let bs = solve(&PotentialSpec::gaussian(1, 0.2, 1.0));
    assert!(bs.binding_energy > 0.0);
}

#[test]
fn repulsive_potential_has_no_bound_state() {
    let v = PotentialSpec { dim: 3, potential: Potential::GaussianWell { depth: -1.0, range: 1.0 } };
    assert!(matches!(
        solve_ground_state(&v, &GridSpec::for_potential(&v)),
        Err(Error::NoBoundState { .. }) | Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn too_shallow_three_dimensional_well_has_no_bound_state() {
    let v = PotentialSpec::gaussian(3, 1.0, 1.0);
    assert!(matches!(solve_ground_state(&v, &GridSpec::for_potential(&v)), Err(Error::NoBoundState { .. })));
}

#[test]
fn rescaling_scales_every_representation() {
    let bs = solve(&PotentialSpec::gaussian(1, 4.0, 1.0));
    let s = bs.rescaled(2.0);
    assert!(!s.is_normalized());
    for q in [0.0, 1.0, 4.0] {
        assert!((s.alpha0_hat(q) - 2.0 * bs.alpha0_hat(q)).abs() < 1e-13);
    }
    assert!((s.alpha0_at(0.3) - 2.0 * bs.alpha0_at(0.3)).abs() < 1e-13);
}
