//! Minimisation of the GP functional by preconditioned nonlinear conjugate
//! gradients with exact line searches along the quartic restriction.

use super::field::{ExternalFields, PeriodicField};
use super::functional::GpFunctional;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    /// Mode cutoff of the order parameter.
    pub cutoff: usize,
    /// Stop once the L² norm of the gradient is below this value.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { cutoff: 8, tol: 1e-8, max_iter: 5000, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartReport {
    pub label: String,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct GpMinimum {
    pub psi: PeriodicField,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub starts: Vec<StartReport>,
}

struct Run {
    psi: PeriodicField,
    energy: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

fn precondition(g: &PeriodicField, shift: f64) -> PeriodicField {
    let mut z = g.clone();
    for i in 0..z.len() {
        let n2: i64 = g.mode(i).iter().map(|x| x * x).sum();
        z.coeffs[i] /= 2.0 * PI * PI * n2 as f64 + shift;
    }
    z
}

fn descend(f: &GpFunctional, start: PeriodicField, shift: f64, opts: &MinimizeOptions) -> Result<Run> {
    let mut psi = start;
    let (mut e, mut grad) = f.energy_and_gradient(&psi)?;
    let mut z = precondition(&grad, shift);
    let mut dir = z.scale(-1.0);
    let mut stalls = 0;
    let mut done = opts.max_iter;
    for it in 0..opts.max_iter {
        let gn = grad.norm2().sqrt();
        if gn <= opts.tol {
            return Ok(Run { psi, energy: e, grad_norm: gn, iterations: it, converged: true });
        }
        let line = f.line(&psi, &dir)?;
        let s = line.argmin().ok_or_else(|| Error::Unbounded("energy decreases without bound".into()))?;
        if s == 0.0 {
            stalls += 1;
            if stalls > 3 {
                done = it;
                break;
            }
            dir = z.scale(-1.0);
            continue;
        }
        stalls = 0;
        psi = psi.add_scaled(s, &dir);
        let (e2, g2) = f.energy_and_gradient(&psi)?;
        let z2 = precondition(&g2, shift);
        let num = g2.inner(&z2).re - g2.inner(&z).re;
        let den = grad.inner(&z).re;
        let beta = if (it + 1) % 50 == 0 || den <= 0.0 { 0.0 } else { (num / den).max(0.0) };
        dir = z2.scale(-1.0).add_scaled(beta, &dir);
        if g2.inner(&dir).re >= 0.0 {
            dir = z2.scale(-1.0);
        }
        e = e2;
        grad = g2;
        z = z2;
    }
    let gn = grad.norm2().sqrt();
    Ok(Run { psi, energy: e, grad_norm: gn, iterations: done, converged: gn <= opts.tol })
}

/// Smallest eigenvalue of the quadratic part of the functional.
fn quadratic_floor(f: &GpFunctional, cutoff: usize, dim: usize) -> Result<f64> {
    let basis = PeriodicField::zeros(dim, cutoff);
    let n = basis.len();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut e = basis.clone();
        e.coeffs[j] = Complex64::ONE;
        let (_, g) = f.energy_and_gradient(&e)?;
        for i in 0..n {
            h[(i, j)] = 0.5 * g.coeffs[i];
        }
    }
    let h = (&h + h.adjoint()).scale(0.5);
    Ok(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Global minimiser of the GP functional over the mode box, taking the best
/// of several deterministic starts.
pub fn gp_minimize(fields: &ExternalFields, g: f64, opts: &MinimizeOptions) -> Result<GpMinimum> {
    if !(g >= 0.0) {
        return Err(Error::InvalidParameter(format!("g = {g} must be non-negative")));
    }
    let d = fields.dim();
    let f = GpFunctional::new(fields, g, opts.cutoff)?;
    let zero = PeriodicField::zeros(d, opts.cutoff);
    let zero_report = StartReport {
        label: "zero".into(),
        energy: 0.0,
        grad_norm: 0.0,
        iterations: 0,
        converged: true,
    };
    if g == 0.0 {
        let floor = quadratic_floor(&f, opts.cutoff, d)?;
        if floor < -1e-12 {
            return Err(Error::Unbounded(format!("quadratic part has eigenvalue {floor:e}")));
        }
        return Ok(GpMinimum { psi: zero, energy: 0.0, grad_norm: 0.0, iterations: 0, starts: vec![zero_report] });
    }
    let (w_sum, _) = fields.summability();
    let shift = 1.0 + 2.0 * w_sum;
    let dmu = -fields.w.get(&vec![0; d]).re;
    let amp = (dmu.max(w_sum).max(1e-3) / (2.0 * g)).sqrt();
    let mut starts: Vec<(String, PeriodicField)> = Vec::new();
    if dmu > 0.0 {
        starts.push(("uniform".into(), PeriodicField::constant(d, opts.cutoff, (dmu / (2.0 * g)).sqrt())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random = PeriodicField::zeros(d, opts.cutoff);
    for i in 0..random.len() {
        let n2: i64 = random.mode(i).iter().map(|x| x * x).sum();
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        random.coeffs[i] = c * amp / (1.0 + n2 as f64);
    }
    starts.push(("random".into(), random));

    let mut reports = vec![zero_report];
    let mut best: Option<Run> = None;
    let mut total = 0;
    for (label, s) in starts {
        let run = descend(&f, s, shift, opts)?;
        total += run.iterations;
        reports.push(StartReport {
            label,
            energy: run.energy,
            grad_norm: run.grad_norm,
            iterations: run.iterations,
            converged: run.converged,
        });
        if run.converged && best.as_ref().is_none_or(|b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    match best {
        Some(b) if b.energy < 0.0 => Ok(GpMinimum {
            psi: b.psi,
            energy: b.energy,
            grad_norm: b.grad_norm,
            iterations: total,
            starts: reports,
        }),
        Some(_) => Ok(GpMinimum { psi: zero, energy: 0.0, grad_norm: 0.0, iterations: total, starts: reports }),
        None => {
            let worst = reports.iter().map(|r| r.grad_norm).fold(0.0, f64::max);
            Err(Error::NotConverged { iterations: total, residual: worst })
        }
    }
}
