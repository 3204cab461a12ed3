//! All Floquet fibers of `H_Δ` together: traces per unit volume and the
//! semiclassical prediction for them.

use super::lattice::{build_bdg_operator, BdgLattice, LatticeSpec};
use crate::coupling::CoefficientSet;
use crate::gp::{ExternalFields, GpFunctional, PeriodicField};
use crate::twobody::BoundState;
use crate::{Error, Execution, Result};
use nalgebra::SymmetricEigen;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct BdgFamily {
    pub spec: LatticeSpec,
    pub thetas: Vec<f64>,
    pub fibers: Vec<BdgLattice>,
}

impl BdgFamily {
    pub fn build(
        psi: &PeriodicField,
        fields: &ExternalFields,
        bs: &BoundState,
        spec: &LatticeSpec,
        exec: Execution,
    ) -> Result<Self> {
        if spec.theta_samples == 0 {
            return Err(Error::InvalidParameter("need at least one Floquet sample".into()));
        }
        let thetas = spec.thetas();
        let n = spec.modes();
        let fibers = exec.try_map(&thetas, |&th| build_bdg_operator(psi, fields, bs, spec.mu, spec.h, n, th))?;
        Ok(BdgFamily { spec: *spec, thetas, fibers })
    }

    /// Largest mismatch between `spec H(θ)` and `-spec H(-θ)`.
    pub fn particle_hole_defect(&self) -> f64 {
        let m = self.fibers.len();
        let mut worst = 0.0f64;
        for j in 0..m {
            let a = self.fibers[j].spectrum();
            let mut b: Vec<f64> = self.fibers[m - 1 - j].spectrum().iter().map(|x| -x).collect();
            b.sort_by(f64::total_cmp);
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    pub fn smallest_abs_eigenvalue(&self) -> f64 {
        self.fibers.iter().map(|f| f.smallest_abs_eigenvalue()).fold(f64::INFINITY, f64::min)
    }
}

/// `Tr[H_Δ]₋ - Tr[H₀]₋` on one fiber, with `[X]₋ = -X 1(X < 0)`.
fn fiber_trace_difference(lat: &BdgLattice) -> f64 {
    let mut total = 0.0;
    for c in lat.components.iter().filter(|c| c.paired) {
        let mut neg: Vec<f64> = c.eigenvalues.iter().filter(|x| **x < 0.0).map(|x| -x).collect();
        neg.sort_by(f64::total_cmp);
        let with_pairing: f64 = neg.iter().sum();
        let free: f64 = if lat.w_bound < -lat.mu {
            // k and k̄ are positive, so [H₀]₋ is k̄ on the hole modes
            c.holes.iter().map(|&j| -lat.hole(j, j).re).sum()
        } else {
            let mut parts = Vec::new();
            let np = c.particles.len();
            let m = lat.component_matrix(&c.particles, &c.holes);
            let mut free = m.clone();
            for r in 0..free.nrows() {
                for s in 0..free.ncols() {
                    if (r < np) != (s < np) {
                        free[(r, s)] = num_complex::Complex64::ZERO;
                    }
                }
            }
            parts.extend(SymmetricEigen::new(free).eigenvalues.iter().filter(|x| **x < 0.0).map(|x| -x));
            parts.sort_by(f64::total_cmp);
            parts.iter().sum()
        };
        total += with_pairing - free;
    }
    total
}

/// `Trs([H_Δ]₋ - [H₀]₋)`, the θ-average of the fiber traces.
pub fn negative_part_trace_difference(family: &BdgFamily) -> f64 {
    let s: f64 = family.fibers.iter().map(fiber_trace_difference).sum();
    s / family.fibers.len() as f64
}

/// `(E1, E2)` of the semiclassical expansion, from cell integrals that are
/// exact for finite-mode fields.
pub fn semiclassical_prediction(
    psi: &PeriodicField,
    fields: &ExternalFields,
    coeffs: &CoefficientSet,
) -> Result<(f64, f64)> {
    let d = psi.dim;
    if d != coeffs.dim || fields.dim() != d {
        return Err(Error::CutoffMismatch(format!(
            "dimensions: psi {d}, fields {}, coefficients {}",
            fields.dim(),
            coeffs.dim
        )));
    }
    let f = GpFunctional::new(fields, 0.0, psi.cutoff)?;
    let (kin, wterm, quartic) = f.parts(psi)?;
    let norm2 = psi.norm2();
    let mut grad = 0.0;
    for i in 0..psi.len() {
        let n = psi.mode(i);
        let w = psi.coeffs[i].norm_sqr() * 4.0 * PI * PI;
        for j in 0..d {
            for k in 0..d {
                grad += w * (n[j] * n[k]) as f64 * coeffs.ijk(j, k);
            }
        }
    }
    let e1 = -0.5 * norm2 * coeffs.i1;
    let e2 = -0.125 * grad + (0.5 * kin + 0.5 * wterm) * coeffs.i2 + 0.125 * quartic * coeffs.i3;
    Ok((e1, e2))
}
