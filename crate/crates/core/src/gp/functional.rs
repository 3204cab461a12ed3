//! The Gross–Pitaevskii functional
//! `E(ψ) = ∫_C ¼|(-i∇ + 2A)ψ|² + W|ψ|² + g|ψ|⁴`, evaluated exactly on a
//! sufficiently fine FFT grid.

use super::field::{fft_size, ExternalFields, FftGrid, PeriodicField};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Functional for order parameters with a fixed mode cutoff.
#[derive(Debug, Clone)]
pub struct GpFunctional {
    pub dim: usize,
    pub cutoff: usize,
    pub g: f64,
    grid: FftGrid,
    w: Vec<f64>,
    a: Vec<Vec<f64>>,
    freq: Vec<Vec<f64>>,
}

/// Coefficients of `E(ψ + s d) = Σ_k c_k s^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineQuartic(pub [f64; 5]);

impl LineQuartic {
    pub fn value(&self, s: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// `value(s) - value(0)` without the rounding of the constant term.
    fn change(&self, s: f64) -> f64 {
        let c = self.0;
        s * (c[1] + s * (c[2] + s * (c[3] + s * c[4])))
    }

    fn slope(&self, s: f64) -> f64 {
        let c = self.0;
        c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * 4.0 * c[4]))
    }

    /// Global minimiser over `s >= 0`, or `None` if unbounded.
    pub fn argmin(&self) -> Option<f64> {
        let c = self.0;
        if c[4] <= 0.0 {
            if c[3] != 0.0 {
                return None;
            }
            if c[2] > 0.0 {
                return Some((-c[1] / (2.0 * c[2])).max(0.0));
            }
            return if c[1] < 0.0 { None } else { Some(0.0) };
        }
        // the slope is a cubic; its critical points split [0, hi] into
        // intervals on which it is monotone, and hi is the Cauchy bound
        let a = 4.0 * c[4];
        let hi = 1.0 + [c[1], 2.0 * c[2], 3.0 * c[3]].iter().map(|x| (x / a).abs()).fold(0.0, f64::max);
        let mut knots = vec![0.0];
        let (qa, qb, qc) = (12.0 * c[4], 6.0 * c[3], 2.0 * c[2]);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            for r in [q / qa, if q != 0.0 { qc / q } else { f64::NAN }] {
                if r.is_finite() && r > 0.0 && r < hi {
                    knots.push(r);
                }
            }
        }
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        let mut best = (0.0, 0.0);
        for w in knots.windows(2) {
            let (mut lo, mut up) = (w[0], w[1]);
            if !(self.slope(lo) < 0.0 && self.slope(up) >= 0.0) {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (lo + up);
                if m <= lo || m >= up {
                    break;
                }
                if self.slope(m) < 0.0 { lo = m } else { up = m }
            }
            let root = 0.5 * (lo + up);
            let v = self.change(root);
            if v < best.1 {
                best = (root, v);
            }
        }
        Some(best.0)
    }
}

impl GpFunctional {
    pub fn new(fields: &ExternalFields, g: f64, cutoff: usize) -> Result<Self> {
        fields.validate()?;
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidParameter(format!("g = {g} must be non-negative")));
        }
        let d = fields.dim();
        let ma = fields.a_cutoff();
        let mw = fields.w.cutoff;
        let need = (4 * cutoff).max(2 * cutoff + 2 * ma).max(2 * cutoff + mw) + 1;
        let grid = FftGrid::new(d, fft_size(need));
        let w = grid.to_grid(&fields.w).iter().map(|c| c.re).collect();
        let a = fields.a.iter().map(|f| grid.to_grid(f).iter().map(|c| c.re).collect()).collect();
        let freq = (0..d)
            .map(|j| {
                grid.slot_modes().iter().map(|n| 2.0 * PI * n[j] as f64).collect()
            })
            .collect();
        Ok(GpFunctional { dim: d, cutoff, g, grid, w, a, freq })
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len
    }

    fn check(&self, psi: &PeriodicField) -> Result<()> {
        if psi.dim != self.dim {
            return Err(Error::CutoffMismatch(format!(
                "order parameter has dimension {}, fields {}",
                psi.dim, self.dim
            )));
        }
        if psi.cutoff != self.cutoff {
            return Err(Error::CutoffMismatch(format!(
                "order parameter cutoff {} differs from functional cutoff {}",
                psi.cutoff, self.cutoff
            )));
        }
        Ok(())
    }

    /// Grid samples of `ψ` and of `D_j ψ = (-i∂_j + 2A_j)ψ`.
    fn samples(&self, psi: &PeriodicField) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let x = self.grid.to_grid(psi);
        let d = (0..self.dim)
            .map(|j| {
                let mut dj = psi.clone();
                for i in 0..dj.len() {
                    dj.coeffs[i] *= 2.0 * PI * psi.mode(i)[j] as f64;
                }
                let mut s = self.grid.to_grid(&dj);
                s.iter_mut().zip(&x).zip(&self.a[j]).for_each(|((s, p), a)| *s += 2.0 * a * p);
                s
            })
            .collect();
        (x, d)
    }

    /// The three cell integrals `(¼‖Dψ‖², ∫W|ψ|², ∫|ψ|⁴)`.
    pub fn parts(&self, psi: &PeriodicField) -> Result<(f64, f64, f64)> {
        self.check(psi)?;
        let (x, d) = self.samples(psi);
        let n = x.len() as f64;
        let kin: f64 = d.iter().flatten().map(|c| c.norm_sqr()).sum();
        let w: f64 = x.iter().zip(&self.w).map(|(p, w)| w * p.norm_sqr()).sum();
        let q: f64 = x.iter().map(|p| p.norm_sqr().powi(2)).sum();
        Ok((0.25 * kin / n, w / n, q / n))
    }

    pub fn energy(&self, psi: &PeriodicField) -> Result<f64> {
        self.check(psi)?;
        let (x, d) = self.samples(psi);
        Ok(self.energy_from_samples(&x, &d))
    }

    fn energy_from_samples(&self, x: &[Complex64], d: &[Vec<Complex64>]) -> f64 {
        let n = x.len() as f64;
        let kin: f64 = d.iter().flatten().map(|c| c.norm_sqr()).sum();
        let pot: f64 = x
            .iter()
            .zip(&self.w)
            .map(|(p, w)| {
                let r = p.norm_sqr();
                w * r + self.g * r * r
            })
            .sum();
        (0.25 * kin + pot) / n
    }

    /// Energy and gradient `G = ½ D·Dψ + 2Wψ + 4g|ψ|²ψ`, normalised so that
    /// `E(ψ + εh) = E(ψ) + ε Re⟨G, h⟩ + O(ε²)`.
    pub fn energy_and_gradient(&self, psi: &PeriodicField) -> Result<(f64, PeriodicField)> {
        self.check(psi)?;
        let (x, d) = self.samples(psi);
        let e = self.energy_from_samples(&x, &d);
        let mut g: Vec<Complex64> = x
            .iter()
            .zip(&self.w)
            .map(|(p, w)| (2.0 * w + 4.0 * self.g * p.norm_sqr()) * p)
            .collect();
        for j in 0..self.dim {
            let mut spec = self.grid.spectrum(&d[j]);
            spec.iter_mut().zip(&self.freq[j]).for_each(|(c, k)| *c *= *k);
            let p = self.grid.inverse_spectrum(&spec);
            for i in 0..g.len() {
                g[i] += 0.5 * (p[i] + 2.0 * self.a[j][i] * d[j][i]);
            }
        }
        Ok((e, self.grid.from_grid(&g, self.cutoff)))
    }

    /// Exact restriction of the functional to the line `ψ + s dir`.
    pub fn line(&self, psi: &PeriodicField, dir: &PeriodicField) -> Result<LineQuartic> {
        self.check(psi)?;
        self.check(dir)?;
        let (x, dx) = self.samples(psi);
        let (y, dy) = self.samples(dir);
        let n = x.len() as f64;
        let mut c = [0.0; 5];
        for j in 0..self.dim {
            for (a, b) in dx[j].iter().zip(&dy[j]) {
                c[0] += 0.25 * a.norm_sqr();
                c[1] += 0.5 * (a.conj() * b).re;
                c[2] += 0.25 * b.norm_sqr();
            }
        }
        for i in 0..x.len() {
            let a0 = x[i].norm_sqr();
            let a1 = 2.0 * (x[i].conj() * y[i]).re;
            let a2 = y[i].norm_sqr();
            let w = self.w[i];
            let g = self.g;
            c[0] += w * a0 + g * a0 * a0;
            c[1] += w * a1 + 2.0 * g * a0 * a1;
            c[2] += w * a2 + g * (a1 * a1 + 2.0 * a0 * a2);
            c[3] += 2.0 * g * a1 * a2;
            c[4] += g * a2 * a2;
        }
        c.iter_mut().for_each(|v| *v /= n);
        Ok(LineQuartic(c))
    }
}

/// `E^GP(ψ)` for fields and coupling `g`; the grid is sized from the cutoffs.
pub fn gp_energy(psi: &PeriodicField, fields: &ExternalFields, g: f64) -> Result<f64> {
    if fields.dim() != psi.dim {
        return Err(Error::CutoffMismatch(format!(
            "order parameter dimension {} vs fields {}",
            psi.dim,
            fields.dim()
        )));
    }
    GpFunctional::new(fields, g, psi.cutoff)?.energy(psi)
}

/// Minimiser among constant order parameters when `W ≡ -δμ`:
/// returns `(|ψ|², energy) = (δμ/2g, -δμ²/4g)`, or zeros for `δμ <= 0`.
pub fn translation_invariant_gp(delta_mu: f64, g: f64) -> Result<(f64, f64)> {
    if !(g > 0.0) || !delta_mu.is_finite() {
        return Err(Error::InvalidParameter(format!("need g > 0 (g = {g}) and finite δμ")));
    }
    if delta_mu <= 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((delta_mu / (2.0 * g), -delta_mu * delta_mu / (4.0 * g)))
}

/// Gauge transform `ψ → e^{-2iχ}ψ`, `A → A + ∇χ`, which leaves the energy
/// unchanged. The new order parameter keeps `extra` additional modes.
pub fn gauge_transform(
    psi: &PeriodicField,
    fields: &ExternalFields,
    chi: &PeriodicField,
    extra: usize,
) -> Result<(PeriodicField, ExternalFields)> {
    if chi.dim != psi.dim || fields.dim() != psi.dim {
        return Err(Error::CutoffMismatch("gauge function dimension".into()));
    }
    if chi.reality_defect() > 1e-12 * chi.norm2().sqrt().max(1.0) {
        return Err(Error::AdmissibilityViolation("gauge function must be real".into()));
    }
    let cutoff = psi.cutoff + extra;
    let grid = FftGrid::new(psi.dim, fft_size(4 * (cutoff + chi.cutoff) + 1));
    let x = grid.to_grid(psi);
    let c = grid.to_grid(chi);
    let y: Vec<Complex64> =
        x.iter().zip(&c).map(|(p, c)| p * Complex64::from_polar(1.0, -2.0 * c.re)).collect();
    let psi2 = grid.from_grid(&y, cutoff);
    let a = fields
        .a
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let mut n = a.add_scaled(1.0, &chi.derivative(j));
            n.real = true;
            n
        })
        .collect();
    Ok((psi2, ExternalFields { w: fields.w.clone(), a }))
}
