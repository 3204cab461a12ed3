mod common;

use bcs2gp::gp::{
    gauge_transform, gp_energy, gp_minimize, translation_invariant_gp, ExternalFields, GpFunctional, MinimizeOptions,
    PeriodicField,
};
use common::{bfgs, gp_energy_cosine, nelder_mead};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn cosine_potential() -> ExternalFields {
    ExternalFields::scalar(PeriodicField::real_trig_1d(1, -1.0, &[0.5], &[]).unwrap())
}

#[test]
fn constant_potential_has_closed_form_minimum() {
    let g = 2.0 * PI;
    let fields = ExternalFields::scalar(PeriodicField::constant(1, 0, -1.0));
    let m = gp_minimize(&fields, g, &MinimizeOptions::default()).unwrap();
    assert!((m.energy + 1.0 / (8.0 * PI)).abs() < 1e-6, "{}", m.energy);
    assert!((m.psi.norm2() - 1.0 / (4.0 * PI)).abs() < 1e-6);
    let (rho, e) = translation_invariant_gp(1.0, g).unwrap();
    assert!((rho - 1.0 / (4.0 * PI)).abs() < 1e-15 && (e + 1.0 / (8.0 * PI)).abs() < 1e-15);
}

#[test]
fn three_dimensional_constant_potential() {
    let fields = ExternalFields::scalar(PeriodicField::constant(3, 0, -0.5));
    let opts = MinimizeOptions { cutoff: 2, ..Default::default() };
    let m = gp_minimize(&fields, 3.0, &opts).unwrap();
    assert!((m.energy + 0.25 / 12.0).abs() < 1e-9, "{}", m.energy);
}

#[test]
fn minimizer_matches_direct_search_over_cosines() {
    let (g, w) = (1.0, |x: f64| -1.0 + 0.5 * (2.0 * PI * x).cos());
    let f = |a: &[f64]| gp_energy_cosine(a, &w, g, 64);
    let mut start = vec![0.0; 9];
    start[0] = 0.7;
    let (a, _) = nelder_mead(&f, &start, 0.1, 20_000);
    let fd = |x: &[f64]| {
        let e = f(x);
        let grad = (0..x.len())
            .map(|i| {
                let (mut p, mut m) = (x.to_vec(), x.to_vec());
                p[i] += 1e-6;
                m[i] -= 1e-6;
                (f(&p) - f(&m)) / 2e-6
            })
            .collect();
        (e, grad)
    };
    let (_, oracle) = bfgs(&fd, &a, 500, 1e-10);
    let opts = MinimizeOptions { cutoff: 8, tol: 1e-10, ..Default::default() };
    let m = gp_minimize(&cosine_potential(), g, &opts).unwrap();
    assert!((m.energy - oracle).abs() < 1e-8, "{} vs {oracle}", m.energy);
    assert!(m.psi.reality_defect() < 1e-6);
}

fn random_field(rng: &mut ChaCha8Rng, cutoff: usize) -> PeriodicField {
    let mut f = PeriodicField::zeros(1, cutoff);
    for c in f.coeffs.iter_mut() {
        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.3;
    }
    f
}

#[test]
fn gradient_agrees_with_finite_differences() {
    let a = PeriodicField::real_trig_1d(2, 0.0, &[0.3, 0.1], &[0.2]).unwrap();
    let fields = ExternalFields::new(PeriodicField::real_trig_1d(2, -1.0, &[0.5, 0.2], &[]).unwrap(), vec![a]).unwrap();
    let f = GpFunctional::new(&fields, 1.5, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let psi = random_field(&mut rng, 4);
        let dir = random_field(&mut rng, 4);
        let (_, grad) = f.energy_and_gradient(&psi).unwrap();
        let eps = 1e-5;
        let fd = (f.energy(&psi.add_scaled(eps, &dir)).unwrap() - f.energy(&psi.add_scaled(-eps, &dir)).unwrap())
            / (2.0 * eps);
        let an = grad.inner(&dir).re;
        assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3), "{fd} vs {an}");
    }
}

#[test]
fn line_restriction_is_exact() {
    let fields = cosine_potential();
    let f = GpFunctional::new(&fields, 2.0, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_field(&mut rng, 3);
    let dir = random_field(&mut rng, 3);
    let line = f.line(&psi, &dir).unwrap();
    for s in [-1.3, 0.0, 0.4, 2.0] {
        let e = f.energy(&psi.add_scaled(s, &dir)).unwrap();
        assert!((line.value(s) - e).abs() < 1e-12 * e.abs().max(1.0));
    }
}

#[test]
fn energy_is_gauge_covariant() {
    let a = PeriodicField::real_trig_1d(2, 0.1, &[0.3], &[0.2]).unwrap();
    let fields = ExternalFields::new(PeriodicField::real_trig_1d(2, -1.0, &[0.5], &[]).unwrap(), vec![a]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let psi = random_field(&mut rng, 3);
    let chi = PeriodicField::real_trig_1d(2, 0.0, &[0.05, 0.02], &[0.03]).unwrap();
    let (psi2, fields2) = gauge_transform(&psi, &fields, &chi, 40).unwrap();
    let e1 = gp_energy(&psi, &fields, 1.0).unwrap();
    let e2 = gp_energy(&psi2, &fields2, 1.0).unwrap();
    assert!((e1 - e2).abs() < 1e-8, "{e1} vs {e2}");
}

#[test]
fn zero_coupling_and_negative_coupling() {
    let fields = ExternalFields::scalar(PeriodicField::constant(1, 0, 1.0));
    let m = gp_minimize(&fields, 0.0, &MinimizeOptions::default()).unwrap();
    assert_eq!(m.energy, 0.0);
    assert!(gp_minimize(&fields, -1.0, &MinimizeOptions::default()).is_err());
    let attractive = ExternalFields::scalar(PeriodicField::constant(1, 0, -1.0));
    assert!(gp_minimize(&attractive, 0.0, &MinimizeOptions::default()).is_err());
}

#[test]
fn minimization_is_deterministic() {
    let opts = MinimizeOptions { cutoff: 6, ..Default::default() };
    let a = gp_minimize(&cosine_potential(), 1.0, &opts).unwrap();
    let b = gp_minimize(&cosine_potential(), 1.0, &opts).unwrap();
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    assert_eq!(a.psi, b.psi);
}
