//! Blocks of the projector `Γ_Δ = 1(H_Δ < 0)` and the trial-state energy
//! built from them.

use super::family::{negative_part_trace_difference, BdgFamily};
use super::lattice::BdgLattice;
use crate::gp::PeriodicField;
use crate::twobody::{BoundState, PotentialSpec};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// One fiber of a periodic operator, given on the rows `rows` and columns
/// `cols`; entries outside are zero.
#[derive(Debug, Clone)]
pub struct FiberOperator {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub data: DMatrix<Complex64>,
}

/// A periodic operator on `L²(ℝ)` stored fiberwise in the plane-wave basis
/// of the lattice.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    pub h: f64,
    pub n_modes: usize,
    pub thetas: Vec<f64>,
    pub fibers: Vec<FiberOperator>,
}

impl LatticeOperator {
    pub fn q(&self, fiber: usize, i: usize) -> f64 {
        2.0 * PI * (i as f64 - self.n_modes as f64) + self.thetas[fiber]
    }

    /// `self - other` for operators on identical block layouts.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.fibers.len() != other.fibers.len() || self.n_modes != other.n_modes {
            return Err(Error::CutoffMismatch("operators live on different lattices".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.fibers.iter_mut().zip(&other.fibers) {
            if a.rows != b.rows || a.cols != b.cols {
                return Err(Error::CutoffMismatch("operators have different block layouts".into()));
            }
            a.data -= &b.data;
        }
        Ok(out)
    }

    /// `Trs |O|²`, the squared Hilbert–Schmidt norm per unit volume.
    pub fn hs_norm2(&self) -> f64 {
        let s: f64 = self.fibers.iter().map(|f| f.data.iter().map(|c| c.norm_sqr()).sum::<f64>()).sum();
        s / self.fibers.len() as f64
    }
}

/// `‖O‖²_{H¹} = Trs[O† (1 - h²Δ) O]`.
pub fn operator_h1_norm(op: &LatticeOperator) -> f64 {
    let h2 = op.h * op.h;
    let mut s = 0.0;
    for (f, fib) in op.fibers.iter().enumerate() {
        for (r, &i) in fib.rows.iter().enumerate() {
            let w = 1.0 + h2 * op.q(f, i).powi(2);
            for c in 0..fib.cols.len() {
                s += w * fib.data[(r, c)].norm_sqr();
            }
        }
    }
    s / op.fibers.len() as f64
}

fn projector_blocks(lat: &BdgLattice, want_pairing: bool) -> FiberOperator {
    let paired: Vec<_> = lat.components.iter().filter(|c| c.paired).collect();
    let rows: Vec<usize> = paired.iter().flat_map(|c| c.particles.iter().copied()).collect();
    let cols: Vec<usize> = if want_pairing {
        paired.iter().flat_map(|c| c.holes.iter().copied()).collect()
    } else {
        rows.clone()
    };
    let mut data = DMatrix::zeros(rows.len(), cols.len());
    let (mut r0, mut c0) = (0, 0);
    for c in paired {
        let np = c.particles.len();
        let neg: Vec<usize> = (0..c.eigenvalues.len()).filter(|&k| c.eigenvalues[k] < 0.0).collect();
        let v = c.eigenvectors.select_columns(&neg);
        let (off, nc) = if want_pairing { (np, c.holes.len()) } else { (0, np) };
        let left = v.rows(0, np);
        let right = v.rows(off, nc);
        let block = left * right.adjoint();
        data.view_mut((r0, c0), (np, nc)).copy_from(&block);
        r0 += np;
        c0 += nc;
    }
    FiberOperator { rows, cols, data }
}

fn collect(family: &BdgFamily, f: impl Fn(&BdgLattice) -> FiberOperator) -> LatticeOperator {
    LatticeOperator {
        h: family.spec.h,
        n_modes: family.spec.modes(),
        thetas: family.thetas.clone(),
        fibers: family.fibers.iter().map(f).collect(),
    }
}

/// `α_Δ`, the particle-row, hole-column block of `Γ_Δ`.
pub fn alpha_delta_block(family: &BdgFamily) -> LatticeOperator {
    collect(family, |l| projector_blocks(l, true))
}

/// `γ_Δ`, the particle-particle block of `Γ_Δ`.
pub fn density_block(family: &BdgFamily) -> LatticeOperator {
    collect(family, |l| projector_blocks(l, false))
}

/// `½ h (ψ(x) φ(-ih∇) + φ(-ih∇) ψ(x))` on the layout of `α_Δ`, with
/// `φ = t / (2(q² - μ))`.
pub fn pairing_ansatz(family: &BdgFamily) -> LatticeOperator {
    collect(family, |l| {
        let base = projector_blocks(l, true);
        let data = DMatrix::from_fn(base.rows.len(), base.cols.len(), |r, c| {
            let (i, j) = (base.rows[r], base.cols[c]);
            let m = i as i64 - j as i64;
            0.5 * l.h * l.coeffs.psi.get(&[m]) * (l.phi(i) + l.phi(j))
        });
        FiberOperator { data, ..base }
    })
}

/// Relative-coordinate profiles `f_m(r)` of an operator kernel,
/// `O(y + r, y) = Σ_m e^{2πimy} f_m(r)`, sampled on `|r| <= window`.
#[derive(Debug, Clone)]
pub struct RelativeProfiles {
    pub dr: f64,
    /// Sample positions, ascending.
    pub r: Vec<f64>,
    pub m: Vec<i64>,
    /// `values[k][s] = f_{m[k]}(r[s])`.
    pub values: Vec<Vec<Complex64>>,
}

impl RelativeProfiles {
    /// `O(y + r_s, y)`.
    pub fn kernel(&self, y: f64, s: usize) -> Complex64 {
        self.m
            .iter()
            .zip(&self.values)
            .map(|(&m, v)| Complex64::from_polar(1.0, 2.0 * PI * m as f64 * y) * v[s])
            .sum()
    }
}

/// Quasimomentum samples must be the symmetric uniform grid for the
/// plane-wave sums to be one uniform momentum grid.
fn check_theta_grid(thetas: &[f64]) -> Result<()> {
    let m = thetas.len() as f64;
    for (j, th) in thetas.iter().enumerate() {
        let want = -PI + 2.0 * PI * (j as f64 + 0.5) / m;
        if (th - want).abs() > 1e-12 {
            return Err(Error::InvalidParameter("quasimomenta are not the uniform symmetric grid".into()));
        }
    }
    Ok(())
}

pub fn relative_profiles(op: &LatticeOperator, window: f64) -> Result<RelativeProfiles> {
    check_theta_grid(&op.thetas)?;
    let mt = op.thetas.len();
    let mut by_m: std::collections::BTreeMap<i64, Vec<(usize, Complex64)>> = Default::default();
    let mut total = 0.0;
    for (f, fib) in op.fibers.iter().enumerate() {
        for (r, &i) in fib.rows.iter().enumerate() {
            for (c, &j) in fib.cols.iter().enumerate() {
                let v = fib.data[(r, c)];
                if v != Complex64::ZERO {
                    total += v.norm_sqr();
                    by_m.entry(i as i64 - j as i64).or_default().push((i * mt + f, v));
                }
            }
        }
    }
    let span = (2 * op.n_modes + 1) * mt;
    let len = crate::gp::field::fft_size(3 * span);
    let dr = mt as f64 / len as f64;
    let q0 = op.q(0, 0);
    let half = ((window / dr).floor() as usize).min(len / 2 - 1);
    let r: Vec<f64> = (0..=2 * half).map(|s| (s as f64 - half as f64) * dr).collect();
    let fft = FftPlanner::new().plan_fft_inverse(len);
    let (mut ms, mut values) = (Vec::new(), Vec::new());
    for (m, entries) in by_m {
        let weight: f64 = entries.iter().map(|e| e.1.norm_sqr()).sum();
        if weight <= 1e-30 * total {
            continue;
        }
        let mut buf = vec![Complex64::ZERO; len];
        for (l, v) in entries {
            buf[l] += v;
        }
        fft.process(&mut buf);
        let vals = r
            .iter()
            .enumerate()
            .map(|(s, &x)| {
                let k = (s + len - half) % len;
                Complex64::from_polar(1.0 / mt as f64, q0 * x) * buf[k]
            })
            .collect();
        ms.push(m);
        values.push(vals);
    }
    Ok(RelativeProfiles { dr, r, m: ms, values })
}

/// `∫∫ V((x - y)/h) |O(x, y)|² dx dy` per unit cell.
pub fn v_weighted_norm(op: &LatticeOperator, v: &PotentialSpec) -> Result<f64> {
    if v.dim != 1 {
        return Err(Error::InvalidParameter("lattice operators are implemented for d = 1".into()));
    }
    if !v.support().is_finite() {
        return Err(Error::InvalidParameter("the weighted norm needs a potential with finite support".into()));
    }
    let p = relative_profiles(op, v.support() * op.h)?;
    let mut s = 0.0;
    for vals in &p.values {
        for (x, f) in p.r.iter().zip(vals) {
            s += v.value((x / op.h).abs()) * f.norm_sqr();
        }
    }
    Ok(s * p.dr)
}

/// `Tr[(-h²Δ - μ + h²W) γ]` per unit cell.
pub fn kinetic_trace(family: &BdgFamily, gamma: &LatticeOperator) -> f64 {
    let mut s = 0.0;
    for (lat, fib) in family.fibers.iter().zip(&gamma.fibers) {
        for (r, &i) in fib.rows.iter().enumerate() {
            for (c, &j) in fib.cols.iter().enumerate() {
                s += (lat.particle(j, i) * fib.data[(r, c)]).re;
            }
        }
    }
    s / family.fibers.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialEnergy {
    /// Sum of the three pieces below.
    pub total: f64,
    /// `-½ Trs([H_Δ]₋ - [H₀]₋)`.
    pub trace_term: f64,
    /// `-∫V|α_ans|²`, evaluated as a momentum integral.
    pub ansatz_term: f64,
    /// `∫V|α_Δ - α_ans|²`.
    pub remainder_term: f64,
    /// `Tr[kγ_Δ] + ∫V|α_Δ|²`, computed directly.
    pub direct: f64,
}

/// Energy of the trial state `Γ_Δ` at `μ = -E_b`.
pub fn trial_state_energy(family: &BdgFamily, psi: &PeriodicField, bs: &BoundState) -> Result<TrialEnergy> {
    let e_b = bs.binding_energy;
    if (family.spec.mu + e_b).abs() > 1e-12 * e_b.max(1.0) {
        return Err(Error::InvalidParameter("the trial state is defined at mu = -E_b".into()));
    }
    let h = family.spec.h;
    let alpha = alpha_delta_block(family);
    let ans = pairing_ansatz(family);
    let rest = alpha.difference(&ans)?;
    let trace_term = -0.5 * negative_part_trace_difference(family);
    let mut ansatz_term = 0.0;
    for i in 0..psi.len() {
        let c2 = psi.coeffs[i].norm_sqr();
        if c2 == 0.0 {
            continue;
        }
        let hp = h * 2.0 * PI * psi.mode(i)[0] as f64;
        let f = |q: f64| bs.t(q) / (q * q + e_b) * (2.0 * bs.t(q) + bs.t(q - hp) + bs.t(q + hp));
        ansatz_term += c2 * bs.momentum_integral(&f, 1e-12)?.value;
    }
    ansatz_term *= h / 16.0;
    let remainder_term = v_weighted_norm(&rest, &bs.potential)?;
    let gamma = density_block(family);
    let direct = kinetic_trace(family, &gamma) + v_weighted_norm(&alpha, &bs.potential)?;
    Ok(TrialEnergy {
        total: trace_term + ansatz_term + remainder_term,
        trace_term,
        ansatz_term,
        remainder_term,
        direct,
    })
}
