//! Translation-invariant zero-temperature BCS problem in microscopic momentum
//! variables: `ξ = p² - μ`, `Δ = -2 V̂ ⋆ α̂`, `γ̂ = ½(1 - ξ/E)`, `α̂ = Δ/2E`.

use crate::coupling::compute_g;
use crate::quad::{self, Rule};
use crate::twobody::BoundState;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Composite Gauss–Legendre radial grid. With `panels = None` the panels
/// follow the scales of the bound state; otherwise the count is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapGridSpec {
    pub order: usize,
    pub panels: Option<usize>,
}

impl Default for GapGridSpec {
    fn default() -> Self {
        GapGridSpec { order: 8, panels: None }
    }
}

/// Radial momentum nodes with measure weights and the convolution matrix.
#[derive(Debug, Clone)]
pub struct GapGrid {
    pub dim: usize,
    pub p: Vec<f64>,
    /// `∫ f dq/(2π)^d ≈ Σ m_i f(p_i)` for radial `f`.
    pub measure: Vec<f64>,
    /// `(V̂ ⋆ f)(p_i) ≈ Σ_j K_ij f_j`.
    pub kernel: DMatrix<f64>,
}

impl GapGrid {
    pub fn new(bs: &BoundState, spec: &GapGridSpec) -> Result<Self> {
        if bs.is_point_interaction() {
            return Err(Error::InvalidParameter("gap equation needs a finite-range potential".into()));
        }
        if spec.order == 0 {
            return Err(Error::InvalidGrid("quadrature order must be positive".into()));
        }
        let k = bs.binding_energy.sqrt();
        let breaks = match spec.panels {
            None => bs.momentum_breaks(bs.q_max),
            Some(p) if p >= 5 => {
                let width = (bs.q_max - k) / (p - 4) as f64 / k;
                quad::radial_breaks(k, bs.q_max, 3, width)
            }
            Some(p) => return Err(Error::InvalidGrid(format!("{p} panels; need at least 5"))),
        };
        let rule = Rule::composite(&breaks, spec.order);
        let v = &bs.potential;
        let d = bs.dim();
        let n = rule.len();
        let p = rule.nodes.clone();
        let measure: Vec<f64> = if d == 3 {
            rule.nodes.iter().zip(&rule.weights).map(|(q, w)| w * q * q / (2.0 * PI * PI)).collect()
        } else {
            rule.weights.iter().map(|w| w / PI).collect()
        };
        let kernel = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (p[i], p[j]);
            if d == 3 {
                measure[j] * v.angular_kernel(a, b) / (4.0 * PI)
            } else {
                0.5 * measure[j] * (v.fourier(a - b) + v.fourier(a + b))
            }
        });
        Ok(GapGrid { dim: d, p, measure, kernel })
    }

    /// Positive momenta `h(2πn + θ)` of a d = 1 Floquet lattice with the
    /// symmetric quasimomentum grid, restricted to `p <= q_max`. Sums over
    /// this grid are the lattice traces per unit volume, times `h`.
    pub fn lattice(bs: &BoundState, h: f64, n_modes: usize, theta_samples: usize) -> Result<Self> {
        if bs.dim() != 1 || bs.is_point_interaction() {
            return Err(Error::InvalidParameter("lattice gap grids need a finite-range d = 1 potential".into()));
        }
        if theta_samples == 0 || !(h > 0.0) {
            return Err(Error::InvalidGrid("need h > 0 and at least one Floquet sample".into()));
        }
        let m = theta_samples as f64;
        let mut p: Vec<f64> = (0..=n_modes)
            .flat_map(|n| {
                (0..theta_samples).map(move |j| h * (2.0 * PI * n as f64 - PI + 2.0 * PI * (j as f64 + 0.5) / m))
            })
            .filter(|&p| p > 0.0 && p <= bs.q_max)
            .collect();
        p.sort_by(f64::total_cmp);
        let measure = vec![2.0 * h / m; p.len()];
        let v = &bs.potential;
        let kernel = DMatrix::from_fn(p.len(), p.len(), |i, j| {
            0.5 * measure[j] * (v.fourier(p[i] - p[j]) + v.fourier(p[i] + p[j]))
        });
        Ok(GapGrid { dim: 1, p, measure, kernel })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.measure.iter().zip(f).map(|(m, f)| m * f).sum()
    }

    pub fn convolve(&self, f: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(f);
        (&self.kernel * v).iter().copied().collect()
    }

    /// Binding energy of `p² + V̂⋆` on this grid.
    pub fn binding_energy(&self) -> f64 {
        let n = self.len();
        let s: Vec<f64> = self.measure.iter().map(|m| m.sqrt()).collect();
        let h = DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { self.p[i] * self.p[i] } else { 0.0 };
            diag + s[i] * self.kernel[(i, j)] / self.measure[j] * s[j]
        });
        let h = (&h + h.transpose()) * 0.5;
        -SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `∫ ξ γ̂ + ∫∫ α̂ V̂ α̂` per unit volume.
pub fn reduced_energy(grid: &GapGrid, mu: f64, gamma: &[f64], alpha: &[f64]) -> f64 {
    let kin: f64 = grid.p.iter().zip(gamma).zip(&grid.measure).map(|((p, g), m)| m * (p * p - mu) * g).sum();
    kin + grid.integrate(&alpha.iter().zip(grid.convolve(alpha)).map(|(a, k)| a * k).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapOptions {
    pub grid: GapGridSpec,
    /// Relative tolerance on the distance to the fixed point.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new iterate in the linear mixing.
    pub mixing: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { grid: GapGridSpec::default(), tol: 1e-11, max_iter: 200_000, mixing: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapOutcome {
    Converged,
    CollapsedToNormal,
}

#[derive(Debug, Clone)]
pub struct GapState {
    pub mu: f64,
    pub grid: GapGrid,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub energy_density: f64,
    pub iterations: usize,
    pub outcome: GapOutcome,
    /// `sup |Δ - (-2 V̂⋆α̂)|` at the returned state.
    pub residual: f64,
}

fn occupations(grid: &GapGrid, mu: f64, delta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    grid.p
        .iter()
        .zip(delta)
        .map(|(p, d)| {
            let xi = p * p - mu;
            let e = xi.hypot(*d);
            if e == 0.0 {
                return (0.5, 0.0);
            }
            // ½(1 - ξ/E) written without cancellation for ξ > 0
            let g = if xi > 0.0 { 0.5 * d * d / (e * (e + xi)) } else { 0.5 * (1.0 - xi / e) };
            (g, d / (2.0 * e))
        })
        .unzip()
}

fn normal_state(grid: GapGrid, mu: f64) -> GapState {
    let n = grid.len();
    let gamma: Vec<f64> = grid.p.iter().map(|p| if p * p < mu { 1.0 } else { 0.0 }).collect();
    let alpha = vec![0.0; n];
    let energy_density = reduced_energy(&grid, mu, &gamma, &alpha);
    GapState {
        mu,
        grid,
        delta: vec![0.0; n],
        gamma,
        alpha,
        energy_density,
        iterations: 0,
        outcome: GapOutcome::CollapsedToNormal,
        residual: 0.0,
    }
}

/// Solves the gap equation by damped fixed-point iteration starting from
/// `Δ₀ = √(ε/2g) t` with `ε = μ + E_b`. For `μ <= -E_b` the normal state is
/// returned with [`GapOutcome::CollapsedToNormal`].
pub fn solve_gap_equation(bs: &BoundState, mu: f64, opts: &GapOptions) -> Result<GapState> {
    solve_gap_on_grid(bs, GapGrid::new(bs, &opts.grid)?, mu, opts)
}

/// [`solve_gap_equation`] on a caller-supplied momentum grid.
pub fn solve_gap_on_grid(bs: &BoundState, grid: GapGrid, mu: f64, opts: &GapOptions) -> Result<GapState> {
    if !mu.is_finite() {
        return Err(Error::InvalidParameter("mu must be finite".into()));
    }
    if !(opts.mixing > 0.0 && opts.mixing <= 1.0) {
        return Err(Error::InvalidParameter(format!("mixing {} outside (0, 1]", opts.mixing)));
    }
    let eps = mu + bs.binding_energy;
    if eps <= 0.0 {
        return Ok(normal_state(grid, mu));
    }
    let g = compute_g(bs)?.value;
    let s = (eps / (2.0 * g)).sqrt();
    let mut delta: Vec<f64> = grid.p.iter().map(|&p| s * bs.t(p)).collect();
    let scale0 = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mut prev_step = f64::INFINITY;
    let mut rate = 0.0f64;
    for it in 1..=opts.max_iter {
        let (_, alpha) = occupations(&grid, mu, &delta);
        let target: Vec<f64> = grid.convolve(&alpha).iter().map(|k| -2.0 * k).collect();
        let mut step = 0.0f64;
        let mut size = 0.0f64;
        for (d, t) in delta.iter_mut().zip(&target) {
            let nd = (1.0 - opts.mixing) * *d + opts.mixing * t;
            step = step.max((nd - *d).abs());
            size = size.max(nd.abs());
            *d = nd;
        }
        if size <= 1e-14 * scale0 {
            let mut st = normal_state(grid, mu);
            st.iterations = it;
            return Ok(st);
        }
        if prev_step.is_finite() && prev_step > 0.0 {
            rate = (step / prev_step).min(0.999_999);
        }
        prev_step = step;
        if it > 2 && step / (1.0 - rate) <= opts.tol * size {
            let (gamma, alpha) = occupations(&grid, mu, &delta);
            let check: Vec<f64> = grid.convolve(&alpha).iter().map(|k| -2.0 * k).collect();
            let residual = delta.iter().zip(&check).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let energy_density = reduced_energy(&grid, mu, &gamma, &alpha);
            return Ok(GapState {
                mu,
                grid,
                delta,
                gamma,
                alpha,
                energy_density,
                iterations: it,
                outcome: GapOutcome::Converged,
                residual,
            });
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iter, residual: prev_step })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    /// `2 ∫ γ̂`.
    pub rho: f64,
    /// `F/ρ + μ/2`.
    pub energy_per_particle: f64,
    /// `-E_b/2 + gρ/2`.
    pub predicted_epp: f64,
    /// `-E_b/2 + gρ/4`, the value implied by `F ≈ -ε²/4g` and `ρ ≈ ε/g`.
    pub thermodynamic_epp: f64,
}

pub fn observables(gs: &GapState, g: f64, e_b: f64) -> Result<Observables> {
    let rho = 2.0 * gs.grid.integrate(&gs.gamma);
    if !(rho > 0.0) {
        return Err(Error::ZeroDensity);
    }
    Ok(Observables {
        rho,
        energy_per_particle: gs.energy_density / rho + 0.5 * gs.mu,
        predicted_epp: -0.5 * e_b + 0.5 * g * rho,
        thermodynamic_epp: -0.5 * e_b + 0.25 * g * rho,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub mu: f64,
    pub energy_density: f64,
    pub rho: f64,
    /// `-F/ε²` at this `ε`.
    pub c_local: f64,
    pub energy_per_particle: f64,
    pub predicted_epp: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowDensityScan {
    pub g: f64,
    pub binding_energy: f64,
    pub grid_binding_energy: f64,
    pub rows: Vec<ScanRow>,
    /// `c` from the least-squares fit `F/ε² = -c + bε`.
    pub c_fit: f64,
    /// `|4gc - 1|`.
    pub c_rel_error: f64,
}

/// Solves at `μ = -E_b + ε` for each `ε` and fits `F ≈ -c ε²`.
pub fn low_density_scan(bs: &BoundState, eps_list: &[f64], opts: &GapOptions) -> Result<LowDensityScan> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("eps list must be non-empty and positive".into()));
    }
    let g = compute_g(bs)?.value;
    let e_b = bs.binding_energy;
    let grid_binding_energy = GapGrid::new(bs, &opts.grid)?.binding_energy();
    let rows = crate::Execution::Parallel.try_map(eps_list, |&eps| {
        let mu = -e_b + eps;
        let gs = solve_gap_equation(bs, mu, opts)?;
        let ob = observables(&gs, g, e_b)?;
        Ok(ScanRow {
            eps,
            mu,
            energy_density: gs.energy_density,
            rho: ob.rho,
            c_local: -gs.energy_density / (eps * eps),
            energy_per_particle: ob.energy_per_particle,
            predicted_epp: ob.predicted_epp,
            iterations: gs.iterations,
        })
    })?;
    let c_fit = if rows.len() == 1 {
        rows[0].c_local
    } else {
        let n = rows.len() as f64;
        let sx: f64 = rows.iter().map(|r| r.eps).sum();
        let sy: f64 = rows.iter().map(|r| -r.c_local).sum();
        let sxx: f64 = rows.iter().map(|r| r.eps * r.eps).sum();
        let sxy: f64 = rows.iter().map(|r| -r.c_local * r.eps).sum();
        let b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        -(sy - b * sx) / n
    };
    Ok(LowDensityScan {
        g,
        binding_energy: e_b,
        grid_binding_energy,
        rows,
        c_fit,
        c_rel_error: (4.0 * g * c_fit - 1.0).abs(),
    })
}
