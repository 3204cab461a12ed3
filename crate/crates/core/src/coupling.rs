//! Coupling constant and the momentum integrals that enter the semiclassical
//! expansion of the BCS trace.

use crate::quad::{self, Estimate};
use crate::twobody::BoundState;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

const REL_TOL: f64 = 1e-12;

/// `g = ∫ |α̂₀|⁴ (q² + E_b) dq/(2π)^d`.
pub fn compute_g(bs: &BoundState) -> Result<Estimate> {
    let e = bs.binding_energy;
    bs.momentum_integral(&|q| bs.alpha0_hat(q).powi(4) * (q * q + e), REL_TOL)
}

/// Signed integrals `I1, I2, I3` and the tensor `I_jk` at chemical potential `mu`.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientSet {
    pub dim: usize,
    pub mu: f64,
    pub g: f64,
    /// `∫ t²/(q² - μ)`; infinite for the point interaction in d = 3.
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// Row-major `d × d`.
    pub ijk: Vec<f64>,
    /// Largest absolute quadrature error estimate among the integrals.
    pub abs_error: f64,
}

impl CoefficientSet {
    pub fn ijk(&self, j: usize, k: usize) -> f64 {
        self.ijk[j * self.dim + k]
    }
}

/// `(1/4π) ∫ q̂_j q̂_k dΩ` by a product rule on the sphere.
pub fn angular_moments() -> [[f64; 3]; 3] {
    let (x, w) = quad::gauss_legendre(24);
    let nphi = 48;
    let mut m = [[0.0; 3]; 3];
    for (c, wc) in x.iter().zip(&w) {
        let s = (1.0 - c * c).sqrt();
        for ip in 0..nphi {
            let phi = 2.0 * PI * ip as f64 / nphi as f64;
            let n = [s * phi.cos(), s * phi.sin(), *c];
            let wt = wc * 2.0 * PI / nphi as f64 / (4.0 * PI);
            for j in 0..3 {
                for k in 0..3 {
                    m[j][k] += wt * n[j] * n[k];
                }
            }
        }
    }
    m
}

pub fn coefficient_integrals(bs: &BoundState, mu: f64) -> Result<CoefficientSet> {
    if !(mu < 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be negative")));
    }
    let d = bs.dim();
    let g = compute_g(bs)?;
    let den = |q: f64| q * q - mu;
    let mut err = g.abs_error;
    let mut run = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let e = bs.momentum_integral(f, REL_TOL)?;
        err = err.max(e.abs_error);
        Ok(e.value)
    };
    let i1 = if bs.is_point_interaction() {
        f64::INFINITY
    } else {
        run(&|q| bs.t(q).powi(2) / den(q))?
    };
    let i2 = run(&|q| bs.t(q).powi(2) / den(q).powi(2))?;
    let i3 = run(&|q| bs.t(q).powi(4) / den(q).powi(3))?;
    let a = run(&|q| {
        let (t, _, t2) = bs.t_derivs(q);
        t * t2 / den(q)
    })?;
    let ijk = if d == 1 {
        vec![a]
    } else {
        let b = run(&|q| {
            let (t, t1, _) = bs.t_derivs(q);
            t * t1 / q / den(q)
        })?;
        let m = angular_moments();
        let mut v = vec![0.0; 9];
        for j in 0..3 {
            for k in 0..3 {
                let delta = if j == k { 1.0 } else { 0.0 };
                v[3 * j + k] = a * m[j][k] + b * (delta - m[j][k]);
            }
        }
        v
    };
    let set = CoefficientSet { dim: d, mu, g: g.value, i1, i2, i3, ijk, abs_error: err };
    if (mu + bs.binding_energy).abs() <= 1e-12 * bs.binding_energy && bs.is_normalized() {
        check_identities(&set)?;
    }
    Ok(set)
}

/// At `μ = -E_b`: `I2 = 4` and `I3 = 16 g`.
pub fn check_identities(set: &CoefficientSet) -> Result<()> {
    let d2 = (set.i2 - 4.0).abs();
    let d3 = (set.i3 - 16.0 * set.g).abs() / (16.0 * set.g);
    if d2 > 1e-6 || d3 > 1e-5 {
        return Err(Error::QuadratureFailure(format!(
            "identities violated: |I2 - 4| = {d2:e}, |I3/16g - 1| = {d3:e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_are_isotropic() {
        let m = angular_moments();
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == k { 1.0 / 3.0 } else { 0.0 };
                assert!((m[j][k] - want).abs() < 1e-14, "{j}{k}: {}", m[j][k]);
            }
        }
    }

    #[test]
    fn point_interaction_g() {
        let bs = BoundState::point_interaction(1.0).unwrap();
        let g = compute_g(&bs).unwrap();
        assert!((g.value - 2.0 * PI).abs() < 1e-9, "{g:?}");
    }
}
