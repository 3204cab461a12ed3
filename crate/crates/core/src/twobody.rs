//! Radial two-body ground state and its momentum-space data.
//!
//! The relative-motion Hamiltonian `-Δ + V` is discretised in a sine (d = 3,
//! reduced radial function `u = r α₀`) or half-odd cosine (d = 1, even sector)
//! discrete variable representation on `[0, R]`. Both are spectrally accurate
//! for smooth potentials.

use crate::quad::{self, Estimate};
use crate::special::{j0, j0_prime, j0_second};
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Shape of a radial pair potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `-depth * exp(-r^2 / range^2)`
    GaussianWell { depth: f64, range: f64 },
    /// `-depth` for `r < range`, zero outside.
    SquareWell { depth: f64, range: f64 },
    /// Linear interpolation of `(r, v)` samples, zero beyond the last radius.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
    /// Zero-range interaction with scattering length `a_s` (d = 3 only).
    PointInteraction { scattering_length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub potential: Potential,
}

impl PotentialSpec {
    pub fn gaussian(dim: usize, depth: f64, range: f64) -> Self {
        PotentialSpec { dim, potential: Potential::GaussianWell { depth, range } }
    }

    pub fn square(dim: usize, depth: f64, range: f64) -> Self {
        PotentialSpec { dim, potential: Potential::SquareWell { depth, range } }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension {} not supported (use 1 or 3)",
                self.dim
            )));
        }
        let ok = match &self.potential {
            Potential::GaussianWell { depth, range } | Potential::SquareWell { depth, range } => {
                depth.is_finite() && range.is_finite() && *range > 0.0
            }
            Potential::Tabulated { r, v } => {
                r.len() >= 2
                    && r.len() == v.len()
                    && r[0] >= 0.0
                    && r.windows(2).all(|p| p[1] > p[0])
                    && v.iter().all(|x| x.is_finite())
            }
            Potential::PointInteraction { scattering_length } => {
                self.dim == 3 && *scattering_length > 0.0 && scattering_length.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("malformed potential {:?}", self.potential)))
        }
    }

    /// Length scale of the potential.
    pub fn range(&self) -> f64 {
        match &self.potential {
            Potential::GaussianWell { range, .. } | Potential::SquareWell { range, .. } => *range,
            Potential::Tabulated { r, .. } => r[r.len() - 1],
            Potential::PointInteraction { scattering_length } => *scattering_length,
        }
    }

    /// Radius beyond which the potential is numerically zero.
    pub fn support(&self) -> f64 {
        match &self.potential {
            Potential::GaussianWell { range, .. } => 6.5 * range,
            _ => self.range(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.potential {
            Potential::GaussianWell { depth, range } => -depth * (-(r / range).powi(2)).exp(),
            Potential::SquareWell { depth, range } => {
                if r < *range {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::Tabulated { r: rs, v } => {
                if r < rs[0] {
                    return v[0];
                }
                match rs.partition_point(|&x| x <= r) {
                    k if k >= rs.len() => 0.0,
                    k => {
                        let s = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
                        v[k - 1] + s * (v[k] - v[k - 1])
                    }
                }
            }
            Potential::PointInteraction { .. } => 0.0,
        }
    }

    /// Plain Fourier transform `∫ V(x) e^{-ik·x} dx` at `|k|`.
    pub fn fourier(&self, k: f64) -> f64 {
        let k = k.abs();
        let d = self.dim;
        match &self.potential {
            Potential::GaussianWell { depth, range: s } => {
                let e = (-0.25 * k * k * s * s).exp();
                if d == 1 {
                    -depth * s * PI.sqrt() * e
                } else {
                    -depth * PI.powf(1.5) * s * s * s * e
                }
            }
            Potential::SquareWell { depth, range: s } => {
                let x = k * s;
                if d == 1 {
                    -2.0 * depth * s * if x < 1e-8 { 1.0 } else { x.sin() / x }
                } else {
                    let f = if x < 1e-2 {
                        let x2 = x * x;
                        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0
                    } else {
                        (x.sin() - x * x.cos()) / (x * x * x)
                    };
                    -4.0 * PI * depth * s * s * s * f
                }
            }
            Potential::Tabulated { .. } => {
                let f = |r: f64| {
                    if d == 1 {
                        2.0 * self.value(r) * (k * r).cos()
                    } else {
                        4.0 * PI * r * r * self.value(r) * j0(k * r)
                    }
                };
                self.table_rule().integrate(f)
            }
            Potential::PointInteraction { .. } => 0.0,
        }
    }

    fn table_rule(&self) -> quad::Rule {
        match &self.potential {
            Potential::Tabulated { r, .. } => {
                let mut b = vec![0.0];
                b.extend(r.iter().copied().filter(|&x| x > 0.0));
                quad::Rule::composite(&b, 8)
            }
            _ => unreachable!(),
        }
    }

    /// Angular integral `∫ dΩ_q V̂(|p - q|)` for d = 3 with `|p| = p`, `|q| = q`.
    pub fn angular_kernel(&self, p: f64, q: f64) -> f64 {
        let pq = p * q;
        match &self.potential {
            Potential::GaussianWell { depth, range: s } => {
                let a = 0.25 * s * s;
                let pre = -depth * PI.powf(1.5) * s * s * s;
                let x = 4.0 * a * pq;
                let ang = if x < 1e-12 { 2.0 } else { -(-x).exp_m1() / (2.0 * a * pq) };
                2.0 * PI * pre * (-a * (p - q).powi(2)).exp() * ang
            }
            Potential::SquareWell { depth, range: s } if pq > 1e-6 * (p * p + q * q) => {
                let f = |k: f64| {
                    if k * s < 1e-10 {
                        4.0 * PI * depth * s
                    } else {
                        4.0 * PI * depth * (k * s).sin() / k
                    }
                };
                2.0 * PI / pq * (f(p + q) - f((p - q).abs()))
            }
            Potential::Tabulated { .. } => {
                let f = |r: f64| 16.0 * PI * PI * r * r * self.value(r) * j0(p * r) * j0(q * r);
                self.table_rule().integrate(f)
            }
            _ => {
                let (x, w) = quad::gauss_legendre(48);
                2.0 * PI
                    * x.iter()
                        .zip(&w)
                        .map(|(c, wi)| {
                            wi * self.fourier((p * p + q * q - 2.0 * pq * c).max(0.0).sqrt())
                        })
                        .sum::<f64>()
            }
        }
    }
}

/// Position-space discretisation. `radius = None` chooses the box from the
/// decay of the bound state so that `exp(-sqrt(E_b) R) < 1e-14`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: f64,
    #[serde(default)]
    pub radius: Option<f64>,
}

impl GridSpec {
    /// Default resolution: a tenth of the potential range.
    pub fn for_potential(v: &PotentialSpec) -> Self {
        GridSpec { spacing: 0.1 * v.range(), radius: None }
    }
}

const MAX_POINTS: usize = 4000;
const TAIL_DECADES: f64 = 32.23619130191664; // ln(1e14)
const T_CUTOFF: f64 = 1e-10;

/// Normalised two-body ground state `α₀` with `∫|α̂₀|² dq/(2π)^d = 1`.
#[derive(Debug, Clone)]
pub struct BoundState {
    pub potential: PotentialSpec,
    pub binding_energy: f64,
    /// Radial nodes (d = 3) or non-negative half-line nodes (d = 1).
    pub r: Vec<f64>,
    /// `α₀` on `r`.
    pub alpha0: Vec<f64>,
    /// Uniform quadrature weight of the radial grid.
    pub weight: f64,
    pub box_radius: f64,
    /// `t` is set to zero for momenta above this value.
    pub q_max: f64,
    /// `|∫|α̂₀|² - 1|` before the momentum-space rescaling.
    pub normalization_error: f64,
    /// Relative residual of the discrete Schrödinger equation.
    pub residual: f64,
    /// True when `t` had not decayed to the cutoff level below the grid's
    /// resolvable momentum.
    pub tail_truncated: bool,
    coeffs: Vec<f64>,
    amplitude: f64,
    normalization_scale: f64,
}

impl BoundState {
    pub fn dim(&self) -> usize {
        self.potential.dim
    }

    pub fn is_point_interaction(&self) -> bool {
        matches!(self.potential.potential, Potential::PointInteraction { .. })
    }

    /// Reference state of the zero-range interaction in d = 3:
    /// `E_b = a⁻²`, `α̂₀ = √(8π) E_b^{1/4} / (q² + E_b)`.
    pub fn point_interaction(scattering_length: f64) -> Result<Self> {
        let potential = PotentialSpec {
            dim: 3,
            potential: Potential::PointInteraction { scattering_length },
        };
        potential.validate()?;
        Ok(BoundState {
            binding_energy: scattering_length.powi(-2),
            potential,
            r: Vec::new(),
            alpha0: Vec::new(),
            weight: 0.0,
            box_radius: f64::INFINITY,
            q_max: f64::INFINITY,
            normalization_error: 0.0,
            residual: 0.0,
            tail_truncated: false,
            coeffs: Vec::new(),
            amplitude: 1.0,
            normalization_scale: 1.0,
        })
    }

    /// Copy with `α̂₀` (and hence `t`) multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        let mut b = self.clone();
        b.normalization_scale *= c;
        if b.is_point_interaction() {
            b.amplitude *= c;
        }
        b.alpha0.iter_mut().for_each(|a| *a *= c);
        b.coeffs.iter_mut().for_each(|a| *a *= c);
        b
    }

    /// False for copies produced by [`BoundState::rescaled`] with `c != 1`.
    pub fn is_normalized(&self) -> bool {
        self.normalization_scale == 1.0
    }

    fn kappa(&self) -> f64 {
        self.binding_energy.sqrt()
    }

    /// `α̂₀(q)` and its first two radial derivatives.
    pub fn alpha0_hat_derivs(&self, q: f64) -> (f64, f64, f64) {
        let q = q.abs();
        let e = self.binding_energy;
        if q > self.q_max {
            return (0.0, 0.0, 0.0);
        }
        if self.is_point_interaction() {
            let c = (8.0 * PI).sqrt() * e.powf(0.25) * self.amplitude;
            let den = q * q + e;
            return (c / den, -2.0 * c * q / (den * den), c * (6.0 * q * q - 2.0 * e) / den.powi(3));
        }
        let (mut a, mut a1, mut a2) = (0.0, 0.0, 0.0);
        if self.dim() == 3 {
            for (&r, &f) in self.r.iter().zip(&self.alpha0) {
                let x = q * r;
                let r2f = r * r * f;
                a += r2f * j0(x);
                a1 += r2f * r * j0_prime(x);
                a2 += r2f * r * r * j0_second(x);
            }
            let c = self.weight * 4.0 * PI * (2.0 * PI).powf(-1.5) * self.amplitude;
            (c * a, c * a1, c * a2)
        } else {
            for (&x, &f) in self.r.iter().zip(&self.alpha0) {
                let (s, co) = (q * x).sin_cos();
                a += f * co;
                a1 -= f * x * s;
                a2 -= f * x * x * co;
            }
            let c = self.weight * 2.0 * (2.0 * PI).powf(-0.5) * self.amplitude;
            (c * a, c * a1, c * a2)
        }
    }

    /// Momentum-space ground state; zero above `q_max`, where the grid
    /// transform would alias.
    pub fn alpha0_hat(&self, q: f64) -> f64 {
        let q = q.abs();
        if q > self.q_max {
            return 0.0;
        }
        if self.is_point_interaction() {
            let e = self.binding_energy;
            return (8.0 * PI).sqrt() * e.powf(0.25) * self.amplitude / (q * q + e);
        }
        let mut a = 0.0;
        if self.dim() == 3 {
            for (&r, &f) in self.r.iter().zip(&self.alpha0) {
                a += r * r * f * j0(q * r);
            }
            a * self.weight * 4.0 * PI * (2.0 * PI).powf(-1.5) * self.amplitude
        } else {
            for (&x, &f) in self.r.iter().zip(&self.alpha0) {
                a += f * (q * x).cos();
            }
            a * self.weight * 2.0 * (2.0 * PI).powf(-0.5) * self.amplitude
        }
    }

    /// Gap kernel `t(q) = 2 (q² + E_b) α̂₀(q)`, zero above `q_max`.
    pub fn t(&self, q: f64) -> f64 {
        let q = q.abs();
        if q > self.q_max {
            return 0.0;
        }
        2.0 * (q * q + self.binding_energy) * self.alpha0_hat(q)
    }

    /// `(t, t', t'')` as functions of the radial momentum.
    pub fn t_derivs(&self, q: f64) -> (f64, f64, f64) {
        let qa = q.abs();
        if qa > self.q_max {
            return (0.0, 0.0, 0.0);
        }
        if self.is_point_interaction() {
            return (self.t(qa), 0.0, 0.0);
        }
        let (a, a1, a2) = self.alpha0_hat_derivs(qa);
        let s = qa * qa + self.binding_energy;
        let t1 = 4.0 * qa * a + 2.0 * s * a1;
        let t2 = 4.0 * a + 8.0 * qa * a1 + 2.0 * s * a2;
        (2.0 * s * a, if q < 0.0 { -t1 } else { t1 }, t2)
    }

    /// Cross-check of `t` as `-2 (Vα₀)^(q)`; agrees with [`BoundState::t`] up to
    /// the discretisation error of the Schrödinger equation.
    pub fn t_from_potential(&self, q: f64) -> f64 {
        let q = q.abs();
        if self.is_point_interaction() {
            return self.t(q);
        }
        let v = &self.potential;
        let mut s = 0.0;
        if self.dim() == 3 {
            for (&r, &f) in self.r.iter().zip(&self.alpha0) {
                s += r * r * v.value(r) * f * j0(q * r);
            }
            -2.0 * s * self.weight * 4.0 * PI * (2.0 * PI).powf(-1.5) * self.amplitude
        } else {
            for (&x, &f) in self.r.iter().zip(&self.alpha0) {
                s += v.value(x) * f * (q * x).cos();
            }
            -2.0 * s * self.weight * 2.0 * (2.0 * PI).powf(-0.5) * self.amplitude
        }
    }

    /// `α₀` at an arbitrary radius (or signed coordinate in d = 1).
    pub fn alpha0_at(&self, r: f64) -> f64 {
        let r = r.abs();
        if self.is_point_interaction() {
            let k = self.kappa();
            let c = (2.0 * PI).powf(1.5) * (8.0 * PI).sqrt() * k.sqrt() / (4.0 * PI) * self.amplitude;
            return if r < 1e-300 { f64::INFINITY } else { c * (-k * r).exp() / r };
        }
        if r >= self.box_radius {
            return 0.0;
        }
        let w = PI / self.box_radius;
        if self.dim() == 3 {
            if r < 1e-12 {
                return self.coeffs.iter().enumerate().map(|(k, a)| a * (k + 1) as f64 * w).sum();
            }
            let u: f64 = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * ((k + 1) as f64 * w * r).sin())
                .sum();
            u / r
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * ((k as f64 + 0.5) * w * r).cos())
                .sum()
        }
    }

    /// `∫_{|x| > ρ} |α₀|² dx / (2π)^d`.
    pub fn mass_outside(&self, rho: f64) -> f64 {
        if self.is_point_interaction() {
            return (-2.0 * self.kappa() * rho).exp();
        }
        let shell = if self.dim() == 3 { 4.0 * PI } else { 2.0 };
        let s: f64 = self
            .r
            .iter()
            .zip(&self.alpha0)
            .filter(|(r, _)| **r > rho)
            .map(|(r, a)| if self.dim() == 3 { r * r * a * a } else { a * a })
            .sum();
        s * shell * self.weight / (2.0 * PI).powi(self.dim() as i32)
    }

    /// Panel edges adapted to the scales of `α̂₀` on `[0, q_max]`.
    pub fn momentum_breaks(&self, upper: f64) -> Vec<f64> {
        let k = self.kappa();
        let width = (0.5 / self.potential.range().max(1e-300)).max(k).min(upper);
        let mut b = quad::radial_breaks(k.min(width), upper, 8, width / k.min(width));
        b.retain(|x| x.is_finite());
        b
    }

    /// `∫ f(|q|) dq/(2π)^d` over `|q| <= q_max` (or all of momentum space for
    /// the point interaction).
    pub fn momentum_integral(&self, f: &dyn Fn(f64) -> f64, rel_tol: f64) -> Result<Estimate> {
        let d = self.dim();
        let shell = if d == 3 { 4.0 * PI / (2.0 * PI).powi(3) } else { 2.0 / (2.0 * PI) };
        let g = |q: f64| shell * if d == 3 { q * q * f(q) } else { f(q) };
        if self.q_max.is_infinite() {
            quad::integrate_half_line(&g, self.kappa(), 1e-300, rel_tol)
        } else {
            quad::integrate_adaptive(&g, &self.momentum_breaks(self.q_max), 1e-300, rel_tol)
        }
    }
}

fn dvr_kinetic(dim: usize, n: usize, radius: f64) -> DMatrix<f64> {
    let c = (PI / radius).powi(2) / n as f64;
    if dim == 3 {
        let m = n - 1;
        let s: Vec<f64> = (0..2 * n)
            .map(|j| {
                (1..n)
                    .map(|k| (k * k) as f64 * (PI * ((k * j) % (2 * n)) as f64 / n as f64).cos())
                    .sum()
            })
            .collect();
        DMatrix::from_fn(m, m, |i, j| {
            let (i, j) = (i + 1, j + 1);
            c * (s[i.abs_diff(j)] - s[i + j])
        })
    } else {
        let s: Vec<f64> = (0..2 * n)
            .map(|j| {
                (1..=n)
                    .map(|k| {
                        let kk = k as f64 - 0.5;
                        kk * kk * (PI * kk * j as f64 / n as f64).cos()
                    })
                    .sum()
            })
            .collect();
        DMatrix::from_fn(n, n, |i, j| c * (s[i.abs_diff(j)] + s[i + j + 1]))
    }
}

struct RawSolution {
    energy: f64,
    r: Vec<f64>,
    u: Vec<f64>,
    residual: f64,
}

/// Potential on the DVR node `x`; a square well is averaged over the cell
/// of width `h`, which keeps its edge from costing an order of accuracy.
fn cell_value(v: &PotentialSpec, x: f64, h: f64) -> f64 {
    match v.potential {
        Potential::SquareWell { depth, range } => -depth * ((range - (x - 0.5 * h)) / h).clamp(0.0, 1.0),
        _ => v.value(x),
    }
}

fn solve_box(v: &PotentialSpec, n: usize, radius: f64) -> Result<RawSolution> {
    let h = radius / n as f64;
    let r: Vec<f64> = if v.dim == 3 {
        (1..n).map(|i| i as f64 * h).collect()
    } else {
        (0..n).map(|i| (i as f64 + 0.5) * h).collect()
    };
    let mut ham = dvr_kinetic(v.dim, n, radius);
    for (i, &x) in r.iter().enumerate() {
        ham[(i, i)] += cell_value(v, x, h);
    }
    let eig = SymmetricEigen::new(ham.clone());
    let (k, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidGrid("empty grid".into()))?;
    let mut u: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    let peak = u.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if peak < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let uv = nalgebra::DVector::from_column_slice(&u);
    let residual = (&ham * &uv - energy * &uv).norm() / uv.norm().max(1e-300);
    Ok(RawSolution { energy, r, u, residual })
}

/// Lowest bound state of `-Δ + V` in the s-wave (d = 3) or even (d = 1) sector.
pub fn solve_ground_state(v: &PotentialSpec, grid: &GridSpec) -> Result<BoundState> {
    v.validate()?;
    if let Potential::PointInteraction { scattering_length } = v.potential {
        return BoundState::point_interaction(scattering_length);
    }
    if !(grid.spacing.is_finite() && grid.spacing > 0.0) {
        return Err(Error::InvalidGrid(format!("spacing {}", grid.spacing)));
    }
    let points = |radius: f64| (radius / grid.spacing).round() as usize;
    let mut radius = grid.radius.unwrap_or(4.0 * v.support().max(v.range()));
    if radius <= v.support() || points(radius) < 8 {
        return Err(Error::InvalidGrid(format!(
            "box radius {radius} must exceed the potential support and hold at least 8 nodes"
        )));
    }
    let mut sol;
    loop {
        let n = points(radius);
        if n > MAX_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{n} nodes needed for radius {radius:.3}; increase the spacing or fix the radius"
            )));
        }
        sol = solve_box(v, n, n as f64 * grid.spacing)?;
        if sol.energy >= 0.0 {
            return Err(Error::NoBoundState { lowest: sol.energy });
        }
        let need = v.support() + TAIL_DECADES / (-sol.energy).sqrt();
        if grid.radius.is_some() || need <= radius {
            radius = n as f64 * grid.spacing;
            break;
        }
        radius = need * 1.05;
    }
    finish(v, sol, radius)
}

fn finish(v: &PotentialSpec, sol: RawSolution, radius: f64) -> Result<BoundState> {
    let n_int = sol.r.len() + usize::from(v.dim == 3);
    let h = radius / n_int as f64;
    let e_b = -sol.energy;
    let dim = v.dim;
    let shell = if dim == 3 { 4.0 * PI } else { 2.0 };
    let norm2: f64 = sol.u.iter().map(|u| u * u).sum::<f64>() * h * shell;
    let c = ((2.0 * PI).powi(dim as i32) / norm2).sqrt();
    let alpha0: Vec<f64> = if dim == 3 {
        sol.u.iter().zip(&sol.r).map(|(u, r)| c * u / r).collect()
    } else {
        sol.u.iter().map(|u| c * u).collect()
    };
    let nf = n_int as f64;
    let coeffs: Vec<f64> = if dim == 3 {
        (1..n_int)
            .map(|k| {
                (2.0 / nf)
                    * sol
                        .u
                        .iter()
                        .enumerate()
                        .map(|(i, u)| c * u * (PI * (k * (i + 1)) as f64 / nf).sin())
                        .sum::<f64>()
            })
            .collect()
    } else {
        (0..n_int)
            .map(|k| {
                (2.0 / nf)
                    * sol
                        .u
                        .iter()
                        .enumerate()
                        .map(|(i, u)| {
                            c * u * (PI * (k as f64 + 0.5) * (i as f64 + 0.5) / nf).cos()
                        })
                        .sum::<f64>()
            })
            .collect()
    };
    let mut bs = BoundState {
        potential: v.clone(),
        binding_energy: e_b,
        r: sol.r,
        alpha0,
        weight: h,
        box_radius: radius,
        q_max: 0.5 * PI / h,
        normalization_error: 0.0,
        residual: sol.residual / e_b,
        tail_truncated: false,
        coeffs,
        amplitude: 1.0,
        normalization_scale: 1.0,
    };
    // locate the momentum above which t stays below the cutoff
    let resolvable = bs.q_max;
    let steps = 4000;
    let dq = resolvable / steps as f64;
    let ts: Vec<f64> = (0..=steps).map(|i| bs.t(i as f64 * dq).abs()).collect();
    let peak = ts.iter().copied().fold(0.0, f64::max);
    match ts.iter().rposition(|&t| t > T_CUTOFF * peak) {
        Some(i) if i < steps => bs.q_max = ((i + 1) as f64 * dq).min(resolvable),
        _ => bs.tail_truncated = true,
    }
    let norm = bs.momentum_integral(&|q| bs.alpha0_hat(q).powi(2), 1e-13)?;
    bs.normalization_error = (norm.value - 1.0).abs();
    let s = norm.value.sqrt().recip();
    bs.alpha0.iter_mut().for_each(|a| *a *= s);
    bs.coeffs.iter_mut().for_each(|a| *a *= s);
    Ok(bs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_matrix_reproduces_box_levels() {
        let t = dvr_kinetic(3, 64, 1.0);
        let e = SymmetricEigen::new(t).eigenvalues;
        let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((lo - PI * PI).abs() < 1e-9);
        let t = dvr_kinetic(1, 64, 1.0);
        let e = SymmetricEigen::new(t).eigenvalues;
        let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((lo - 0.25 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn gaussian_well_d3() {
        let v = PotentialSpec::gaussian(3, 4.0, 1.0);
        let bs = solve_ground_state(&v, &GridSpec { spacing: 0.1, radius: None }).unwrap();
        assert!((bs.binding_energy - 0.150864851306).abs() < 1e-9, "{}", bs.binding_energy);
        assert!(bs.normalization_error < 1e-8);
        assert!(!bs.tail_truncated);
        let q = 0.7;
        assert!((bs.t(q) - bs.t_from_potential(q)).abs() < 1e-8 * bs.t(0.0).abs());
    }

    #[test]
    fn interpolated_alpha0_matches_nodes() {
        for dim in [1, 3] {
            let v = PotentialSpec::gaussian(dim, 4.0, 1.0);
            let bs = solve_ground_state(&v, &GridSpec::for_potential(&v)).unwrap();
            for i in [0, 5, 17] {
                assert!((bs.alpha0_at(bs.r[i]) - bs.alpha0[i]).abs() < 1e-10);
            }
        }
    }
}
