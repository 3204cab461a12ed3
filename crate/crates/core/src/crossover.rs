//! BCS to Gross–Pitaevskii crossover: the energy comparison
//! `E^BCS = h^{4-d}(E^GP(g) + e)`, order-parameter extraction from pair
//! kernels, and the density laws.
//!
//! For translation-invariant states the macroscopic functional reduces to
//! microscopic momenta: with `p = hq`,
//! `Tr[(-h²Δ - μ)γ] = h^{-d} ∫ (p² - μ) γ̂(p) dp/(2π)^d` per unit volume,
//! and the interaction term scales the same way, so
//! `E^BCS(μ) = h^{-d} F_ti(μ)`. [`bridge_check`] verifies this on a d = 1
//! lattice.

use crate::coupling::compute_g;
use crate::gap::{solve_gap_equation, solve_gap_on_grid, GapGrid, GapOptions, GapOutcome};
use crate::gp::{ExternalFields, PeriodicField};
use crate::semiclassics::{
    relative_profiles, trial_state_energy, BdgFamily, LatticeOperator, LatticeSpec, TrialEnergy,
};
use crate::twobody::BoundState;
use crate::{Error, Execution, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest `α₀` mass allowed outside the relative-coordinate window.
pub const WINDOW_MASS_TOL: f64 = 1e-8;

/// A pair kernel `α(y + r, y)` of a periodic d = 1 operator on a uniform
/// cell grid `y_j = j/ny` times a uniform relative grid `r_s`.
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub h: f64,
    pub y: Vec<f64>,
    pub r: Vec<f64>,
    pub dr: f64,
    /// Row-major: `values[j * r.len() + s] = α(y_j + r_s, y_j)`.
    pub values: Vec<Complex64>,
}

fn window_grid(h: f64, window: f64, nr: usize) -> Result<(Vec<f64>, f64)> {
    if nr < 2 || !(window > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidGrid("relative grid needs a positive window and two points".into()));
    }
    let half = (nr / 2).max(1);
    let dr = window / half as f64;
    Ok(((0..=2 * half).map(|s| (s as f64 - half as f64) * dr).collect(), dr))
}

fn cell_grid(ny: usize) -> Result<Vec<f64>> {
    if ny == 0 {
        return Err(Error::InvalidGrid("cell grid is empty".into()));
    }
    Ok((0..ny).map(|j| j as f64 / ny as f64).collect())
}

impl PairKernel {
    pub fn zeros(h: f64, window: f64, ny: usize, nr: usize) -> Result<Self> {
        let (r, dr) = window_grid(h, window, nr)?;
        let y = cell_grid(ny)?;
        let values = vec![Complex64::ZERO; y.len() * r.len()];
        Ok(PairKernel { h, y, r, dr, values })
    }

    pub fn get(&self, j: usize, s: usize) -> Complex64 {
        self.values[j * self.r.len() + s]
    }

    /// `(2π)^{-1/2} α₀(r/h) ψ(y)`, the leading term with the order
    /// parameter at the centre-of-mass end only.
    pub fn leading_term(psi: &PeriodicField, bs: &BoundState, h: f64, window: f64, ny: usize, nr: usize) -> Result<Self> {
        Self::leading(psi, bs, h, window, ny, nr, false)
    }

    /// `(2π)^{-1/2} α₀(r/h) (ψ(y + r) + ψ(y))/2`, the kernel of
    /// `(h/2)(ψ α̂₀(-ih∇) + α̂₀(-ih∇) ψ)`.
    pub fn symmetric_leading_term(
        psi: &PeriodicField,
        bs: &BoundState,
        h: f64,
        window: f64,
        ny: usize,
        nr: usize,
    ) -> Result<Self> {
        Self::leading(psi, bs, h, window, ny, nr, true)
    }

    fn leading(psi: &PeriodicField, bs: &BoundState, h: f64, window: f64, ny: usize, nr: usize, sym: bool) -> Result<Self> {
        check_d1(psi, bs)?;
        let mut k = Self::zeros(h, window, ny, nr)?;
        let a0 = alpha0_samples(bs, &k.r, h);
        let pref = (2.0 * PI).powf(-0.5);
        let nrr = k.r.len();
        for (j, &y) in k.y.iter().enumerate() {
            let py = psi.eval(&[y]);
            for s in 0..nrr {
                let p = if sym { 0.5 * (psi.eval(&[y + k.r[s]]) + py) } else { py };
                k.values[j * nrr + s] = pref * a0[s] * p;
            }
        }
        Ok(k)
    }

    /// Samples the kernel of a lattice operator. The relative grid keeps
    /// every `stride`-th point of the operator's natural resolution.
    pub fn from_operator(op: &LatticeOperator, window: f64, ny: usize, stride: usize) -> Result<Self> {
        let prof = relative_profiles(op, window)?;
        let stride = stride.max(1);
        let centre = prof.r.len() / 2;
        let half = centre / stride;
        let idx: Vec<usize> = (0..=2 * half).map(|k| centre - half * stride + k * stride).collect();
        let y = cell_grid(ny)?;
        let r: Vec<f64> = idx.iter().map(|&s| prof.r[s]).collect();
        let mut values = Vec::with_capacity(y.len() * r.len());
        for &yj in &y {
            for &s in &idx {
                values.push(prof.kernel(yj, s));
            }
        }
        Ok(PairKernel { h: op.h, y, r, dr: prof.dr * stride as f64, values })
    }

    /// `∫_C dy ∫ dr |α(y + r, y)|²`.
    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dr / self.y.len() as f64
    }
}

fn check_d1(psi: &PeriodicField, bs: &BoundState) -> Result<()> {
    if psi.dim != 1 || bs.dim() != 1 {
        return Err(Error::InvalidParameter("pair kernels are implemented for d = 1".into()));
    }
    Ok(())
}

fn alpha0_samples(bs: &BoundState, r: &[f64], h: f64) -> Vec<f64> {
    r.iter().map(|x| bs.alpha0_at((x / h).abs())).collect()
}

fn check_window(kernel: &PairKernel, bs: &BoundState) -> Result<()> {
    let w = kernel.r.last().copied().unwrap_or(0.0) / kernel.h;
    let outside = bs.mass_outside(w);
    if outside > WINDOW_MASS_TOL {
        return Err(Error::WindowTooSmall { outside });
    }
    Ok(())
}

/// `ψ(y) = (2π)^{-1/2} h^{-1} ∫ α₀(r/h) α(y + r, y) dr`, returned with
/// Fourier modes `|n| <= cutoff`.
pub fn extract_order_parameter(kernel: &PairKernel, bs: &BoundState, cutoff: usize) -> Result<PeriodicField> {
    if bs.dim() != 1 {
        return Err(Error::InvalidParameter("pair kernels are implemented for d = 1".into()));
    }
    check_window(kernel, bs)?;
    let ny = kernel.y.len();
    if 2 * cutoff + 1 > ny {
        return Err(Error::CutoffMismatch(format!("cutoff {cutoff} needs at least {} cell samples", 2 * cutoff + 1)));
    }
    let h = kernel.h;
    let a0 = alpha0_samples(bs, &kernel.r, h);
    let pref = (2.0 * PI).powf(-0.5) / h * kernel.dr;
    let samples: Vec<Complex64> = (0..ny)
        .map(|j| (0..kernel.r.len()).map(|s| a0[s] * kernel.get(j, s)).sum::<Complex64>() * pref)
        .collect();
    let modes: Vec<(Vec<i64>, Complex64)> = (-(cutoff as i64)..=cutoff as i64)
        .map(|n| {
            let c: Complex64 = samples
                .iter()
                .zip(&kernel.y)
                .map(|(v, y)| v * Complex64::from_polar(1.0, -2.0 * PI * n as f64 * y))
                .sum();
            (vec![n], c / ny as f64)
        })
        .collect();
    PeriodicField::from_modes(1, cutoff, &modes)
}

/// `(‖σ‖², ‖α_lead‖²)` with `σ = α - α_lead` and `α_lead` the symmetric
/// leading term built from `psi`.
pub fn decompose_alpha(kernel: &PairKernel, psi: &PeriodicField, bs: &BoundState) -> Result<(f64, f64)> {
    check_d1(psi, bs)?;
    check_window(kernel, bs)?;
    let h = kernel.h;
    let a0 = alpha0_samples(bs, &kernel.r, h);
    let pref = (2.0 * PI).powf(-0.5);
    let (mut sig, mut lead) = (0.0, 0.0);
    for (j, &y) in kernel.y.iter().enumerate() {
        let py = psi.eval(&[y]);
        for (s, &r) in kernel.r.iter().enumerate() {
            let l = pref * a0[s] * 0.5 * (psi.eval(&[y + r]) + py);
            sig += (kernel.get(j, s) - l).norm_sqr();
            lead += l.norm_sqr();
        }
    }
    let w = kernel.dr / kernel.y.len() as f64;
    Ok((sig * w, lead * w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub h: f64,
    /// Particles per unit cell, `(2/h) ∫_C |ψ|²`.
    pub n: f64,
    /// `h^d N`.
    pub rho: f64,
}

pub fn density_report(psi: &PeriodicField, h: f64) -> DensityRow {
    let n = 2.0 / h * psi.norm2();
    DensityRow { h, n, rho: h.powi(psi.dim as i32) * n }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverRow {
    pub h: f64,
    pub mu: f64,
    /// `h^{-d} F_ti(-E_b + h²δμ)`.
    pub e_bcs: f64,
    /// `E_bcs / h^{4-d}`.
    pub e_bcs_scaled: f64,
    pub e_gp: f64,
    /// `E_bcs / h^{4-d} - E^GP`.
    pub e: f64,
    pub iterations: usize,
    pub gap_residual: f64,
    pub outcome: GapOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverReport {
    pub dim: usize,
    pub delta_mu: f64,
    pub g: f64,
    pub binding_energy: f64,
    /// `-δμ²/(4g)`.
    pub e_gp: f64,
    pub rows: Vec<CrossoverRow>,
    /// Least-squares slope of `log|e|` against `log h`.
    pub decay_exponent: f64,
    pub e_decreasing: bool,
    pub density: Vec<DensityRow>,
}

/// Translation-invariant crossover scan with `W ≡ -δμ`, `A = 0`.
pub fn crossover_scan(
    bs: &BoundState,
    delta_mu: f64,
    h_list: &[f64],
    opts: &GapOptions,
    exec: Execution,
) -> Result<CrossoverReport> {
    if !(delta_mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta_mu = {delta_mu} must be non-negative")));
    }
    if h_list.is_empty() || h_list.windows(2).any(|w| !(w[1] < w[0])) || h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidParameter("h list must be positive and strictly decreasing".into()));
    }
    let d = bs.dim() as i32;
    let g = compute_g(bs)?.value;
    let e_b = bs.binding_energy;
    let e_gp = -delta_mu * delta_mu / (4.0 * g);
    let rows = exec.try_map(h_list, |&h| {
        let mu = -e_b + h * h * delta_mu;
        let gs = solve_gap_equation(bs, mu, opts)?;
        let e_bcs = h.powi(-d) * gs.energy_density;
        let e_bcs_scaled = e_bcs / h.powi(4 - d);
        Ok(CrossoverRow {
            h,
            mu,
            e_bcs,
            e_bcs_scaled,
            e_gp,
            e: e_bcs_scaled - e_gp,
            iterations: gs.iterations,
            gap_residual: gs.residual,
            outcome: gs.outcome,
        })
    })?;
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.e != 0.0).map(|r| (r.h.ln(), r.e.abs().ln())).collect();
    let decay_exponent = fit_slope(&pts);
    let e_decreasing = rows.windows(2).all(|w| w[1].e.abs() < w[0].e.abs());
    let psi2 = if delta_mu > 0.0 { delta_mu / (2.0 * g) } else { 0.0 };
    let psi = PeriodicField::constant(bs.dim(), 0, psi2.sqrt());
    let density = h_list.iter().map(|&h| density_report(&psi, h)).collect();
    Ok(CrossoverReport { dim: bs.dim(), delta_mu, g, binding_energy: e_b, e_gp, rows, decay_exponent, e_decreasing, density })
}

/// Least-squares slope through `(x, y)` points; `NaN` for fewer than two.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Energies per unit cell of three translation-invariant d = 1 states at
/// `μ = -E_b + h²δμ`.
#[derive(Debug, Clone, Serialize)]
pub struct BridgeCheck {
    pub h: f64,
    /// `h^{-1} F_ti` from the continuum gap equation.
    pub continuum: f64,
    /// Self-consistent minimum over lattice momenta.
    pub lattice_minimum: f64,
    /// Lattice trial state `Γ_Δ` built from the GP minimizer.
    pub trial: TrialEnergy,
}

pub fn bridge_check(
    bs: &BoundState,
    delta_mu: f64,
    spec: &LatticeSpec,
    opts: &GapOptions,
    exec: Execution,
) -> Result<BridgeCheck> {
    if bs.dim() != 1 {
        return Err(Error::InvalidParameter("the lattice bridge is implemented for d = 1".into()));
    }
    let h = spec.h;
    let e_b = bs.binding_energy;
    let mu = -e_b + h * h * delta_mu;
    let continuum = solve_gap_equation(bs, mu, opts)?.energy_density / h;
    let grid = GapGrid::lattice(bs, h, spec.modes(), spec.theta_samples)?;
    let lattice_minimum = solve_gap_on_grid(bs, grid, mu, opts)?.energy_density / h;
    let g = compute_g(bs)?.value;
    let psi = PeriodicField::constant(1, 0, (delta_mu / (2.0 * g)).sqrt());
    let fields = ExternalFields::scalar(PeriodicField::constant(1, 0, -delta_mu));
    let trial_spec = LatticeSpec { mu: -e_b, ..*spec };
    let family = BdgFamily::build(&psi, &fields, bs, &trial_spec, exec)?;
    let trial = trial_state_energy(&family, &psi, bs)?;
    Ok(BridgeCheck { h, continuum, lattice_minimum, trial })
}
