//! Gross–Pitaevskii theory on the periodic cell.

pub mod field;
pub mod functional;
pub mod minimize;

pub use field::{ExternalFields, FftGrid, PeriodicField};
pub use functional::{gauge_transform, gp_energy, translation_invariant_gp, GpFunctional, LineQuartic};
pub use minimize::{gp_minimize, GpMinimum, MinimizeOptions, StartReport};

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn w_cos() -> ExternalFields {
        ExternalFields::scalar(PeriodicField::real_trig_1d(1, -1.0, &[0.5], &[]).unwrap())
    }

    #[test]
    fn plane_wave_kinetic_energy() {
        let psi = PeriodicField::from_modes(1, 2, &[(vec![1], Complex64::ONE)]).unwrap();
        let e = gp_energy(&psi, &ExternalFields::zero(1), 0.0).unwrap();
        assert!((e - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = GpFunctional::new(&w_cos(), 0.7, 3).unwrap();
        let psi = PeriodicField::from_modes(
            1,
            3,
            &[(vec![0], Complex64::new(0.8, 0.1)), (vec![2], Complex64::new(-0.2, 0.3))],
        )
        .unwrap();
        let h = PeriodicField::from_modes(
            1,
            3,
            &[(vec![1], Complex64::new(0.3, -0.4)), (vec![-3], Complex64::new(0.1, 0.2))],
        )
        .unwrap();
        let (e0, g) = f.energy_and_gradient(&psi).unwrap();
        let eps = 1e-6;
        let ep = f.energy(&psi.add_scaled(eps, &h)).unwrap();
        let em = f.energy(&psi.add_scaled(-eps, &h)).unwrap();
        let fd = (ep - em) / (2.0 * eps);
        assert!((fd - g.inner(&h).re).abs() < 1e-8, "{fd} vs {}", g.inner(&h).re);
        let line = f.line(&psi, &h).unwrap();
        for s in [0.0, 0.3, -1.1] {
            let direct = f.energy(&psi.add_scaled(s, &h)).unwrap();
            assert!((line.value(s) - direct).abs() < 1e-12);
        }
        assert!((line.value(0.0) - e0).abs() < 1e-14);
    }

    #[test]
    fn constant_potential_gives_uniform_minimiser() {
        let fields = ExternalFields::scalar(PeriodicField::constant(1, 0, -1.0));
        let m = gp_minimize(&fields, 1.0, &MinimizeOptions::default()).unwrap();
        let (rho, e) = translation_invariant_gp(1.0, 1.0).unwrap();
        assert!((m.energy - e).abs() < 1e-12);
        assert!((m.psi.norm2() - rho).abs() < 1e-8);
    }

    #[test]
    fn zero_coupling_with_attraction_is_unbounded() {
        let r = gp_minimize(&w_cos(), 0.0, &MinimizeOptions::default());
        assert!(matches!(r, Err(crate::Error::Unbounded(_))));
    }
}
