//! Periodic fields on the unit cell `[0,1)^d`, stored as Fourier coefficients
//! `f(x) = Σ_n c_n e^{2πi n·x}` over the box `|n_j| <= cutoff`.

use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicField {
    pub dim: usize,
    pub cutoff: usize,
    /// Row-major over `(n_1, ..., n_d)`, each index running from `-cutoff`.
    pub coeffs: Vec<Complex64>,
    /// Declared real-valued; enforced by the real constructors.
    pub real: bool,
}

impl PeriodicField {
    pub fn zeros(dim: usize, cutoff: usize) -> Self {
        let side = 2 * cutoff + 1;
        PeriodicField { dim, cutoff, coeffs: vec![Complex64::ZERO; side.pow(dim as u32)], real: false }
    }

    pub fn constant(dim: usize, cutoff: usize, c: f64) -> Self {
        let mut f = Self::zeros(dim, cutoff);
        f.set(&vec![0; dim], Complex64::new(c, 0.0));
        f.real = true;
        f
    }

    /// Field with the listed `(mode, coefficient)` pairs.
    pub fn from_modes(dim: usize, cutoff: usize, modes: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut f = Self::zeros(dim, cutoff);
        for (n, c) in modes {
            if n.len() != dim || n.iter().any(|x| x.unsigned_abs() as usize > cutoff) {
                return Err(Error::CutoffMismatch(format!("mode {n:?} outside cutoff {cutoff}")));
            }
            let i = f.index(n);
            f.coeffs[i] += c;
        }
        Ok(f)
    }

    /// Real field from one side of each conjugate pair of modes; the partner
    /// `-n` receives the conjugate coefficient.
    pub fn real_from_modes(dim: usize, cutoff: usize, modes: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut full = Vec::with_capacity(2 * modes.len());
        for (n, c) in modes {
            if n.iter().all(|&x| x == 0) {
                full.push((n.clone(), Complex64::new(c.re, 0.0)));
            } else {
                full.push((n.clone(), *c));
                full.push((n.iter().map(|x| -x).collect(), c.conj()));
            }
        }
        let mut f = Self::from_modes(dim, cutoff, &full)?;
        f.real = true;
        Ok(f)
    }

    /// `a0 + Σ_k a_k cos(2π k·x) + b_k sin(2π k·x)` in d = 1.
    pub fn real_trig_1d(cutoff: usize, a0: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        let mut modes = vec![(vec![0], Complex64::new(a0, 0.0))];
        for k in 0..cos.len().max(sin.len()) {
            let a = cos.get(k).copied().unwrap_or(0.0);
            let b = sin.get(k).copied().unwrap_or(0.0);
            modes.push((vec![k as i64 + 1], Complex64::new(0.5 * a, -0.5 * b)));
        }
        Self::real_from_modes(1, cutoff, &modes)
    }

    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn index(&self, n: &[i64]) -> usize {
        let side = self.side();
        n.iter().fold(0, |acc, &x| acc * side + (x + self.cutoff as i64) as usize)
    }

    /// Mode vector of flat index `i`.
    pub fn mode(&self, mut i: usize) -> Vec<i64> {
        let side = self.side();
        let mut n = vec![0; self.dim];
        for j in (0..self.dim).rev() {
            n[j] = (i % side) as i64 - self.cutoff as i64;
            i /= side;
        }
        n
    }

    pub fn modes(&self) -> Vec<Vec<i64>> {
        (0..self.len()).map(|i| self.mode(i)).collect()
    }

    pub fn get(&self, n: &[i64]) -> Complex64 {
        if n.iter().any(|x| x.unsigned_abs() as usize > self.cutoff) {
            return Complex64::ZERO;
        }
        self.coeffs[self.index(n)]
    }

    pub fn set(&mut self, n: &[i64], c: Complex64) {
        let i = self.index(n);
        self.coeffs[i] = c;
    }

    /// Same field truncated or zero-padded to a new cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut f = Self::zeros(self.dim, cutoff);
        f.real = self.real;
        for i in 0..self.len() {
            let n = self.mode(i);
            if n.iter().all(|x| x.unsigned_abs() as usize <= cutoff) {
                f.set(&n, self.coeffs[i]);
            }
        }
        f
    }

    /// Largest `|n_j|` carrying a coefficient above `tol`.
    pub fn effective_cutoff(&self, tol: f64) -> usize {
        (0..self.len())
            .filter(|&i| self.coeffs[i].norm() > tol)
            .map(|i| self.mode(i).iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Largest violation of `c_{-n} = conj(c_n)`.
    pub fn reality_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let n: Vec<i64> = self.mode(i).iter().map(|x| -x).collect();
                (self.coeffs[i] - self.get(&n).conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `∫_C |f|²`.
    pub fn norm2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨f, g⟩ = Σ conj(f_n) g_n` over the common modes.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!((self.dim, self.cutoff), (other.dim, other.cutoff));
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// `∂_j f`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut f = self.clone();
        f.real = self.real;
        for i in 0..f.len() {
            let n = self.mode(i)[j];
            f.coeffs[i] *= Complex64::new(0.0, 2.0 * PI * n as f64);
        }
        f
    }

    /// `Σ_j ∫ |∂_j f|²`.
    pub fn gradient_norm2(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let n2: i64 = self.mode(i).iter().map(|x| x * x).sum();
                4.0 * PI * PI * n2 as f64 * self.coeffs[i].norm_sqr()
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut f = self.clone();
        f.coeffs.iter_mut().for_each(|c| *c *= s);
        f
    }

    /// `self + s * other` on the larger of the two cutoffs.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        let cutoff = self.cutoff.max(other.cutoff);
        let mut f = self.with_cutoff(cutoff);
        let o = other.with_cutoff(cutoff);
        f.coeffs.iter_mut().zip(&o.coeffs).for_each(|(a, b)| *a += s * b);
        f.real = self.real && other.real;
        f
    }

    /// Value at a point of the cell.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (0..self.len())
            .map(|i| {
                let n = self.mode(i);
                let ph: f64 = n.iter().zip(x).map(|(n, x)| *n as f64 * x).sum();
                self.coeffs[i] * Complex64::from_polar(1.0, 2.0 * PI * ph)
            })
            .sum()
    }
}

/// Smallest integer of the form `2^a 3^b` that is at least `n`.
pub fn fft_size(n: usize) -> usize {
    let mut best = usize::MAX;
    let mut p3 = 1;
    while p3 < 2 * n.max(1) {
        let mut s = p3;
        while s < n {
            s *= 2;
        }
        best = best.min(s);
        p3 *= 3;
    }
    best
}

/// Uniform grid of `len^dim` points on the cell with cached FFT plans.
#[derive(Clone)]
pub struct FftGrid {
    pub dim: usize,
    pub len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftGrid({}^{})", self.len, self.dim)
    }
}

impl FftGrid {
    pub fn new(dim: usize, len: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftGrid { dim, len, fwd: planner.plan_fft_forward(len), inv: planner.plan_fft_inverse(len) }
    }

    pub fn points(&self) -> usize {
        self.len.pow(self.dim as u32)
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inv } else { &self.fwd };
        let l = self.len;
        let total = data.len();
        let mut line = vec![Complex64::ZERO; l];
        for axis in 0..self.dim {
            let stride = l.pow((self.dim - 1 - axis) as u32);
            for start in 0..total {
                if (start / stride) % l != 0 {
                    continue;
                }
                for k in 0..l {
                    line[k] = data[start + k * stride];
                }
                plan.process(&mut line);
                for k in 0..l {
                    data[start + k * stride] = line[k];
                }
            }
        }
    }

    fn slot(&self, n: &[i64]) -> usize {
        let l = self.len as i64;
        n.iter().fold(0, |acc, &x| acc * self.len + x.rem_euclid(l) as usize)
    }

    /// Signed frequency of grid slot `k` along one axis.
    pub fn frequency(&self, k: usize) -> i64 {
        if k <= self.len / 2 { k as i64 } else { k as i64 - self.len as i64 }
    }

    /// Real-space samples of `f` at `x_k = k / len`.
    pub fn to_grid(&self, f: &PeriodicField) -> Vec<Complex64> {
        assert!(2 * f.cutoff < self.len, "grid too small for field");
        let mut data = vec![Complex64::ZERO; self.points()];
        for i in 0..f.len() {
            data[self.slot(&f.mode(i))] = f.coeffs[i];
        }
        self.transform(&mut data, true);
        data
    }

    /// Fourier coefficients of all grid frequencies.
    pub fn spectrum(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut data = samples.to_vec();
        self.transform(&mut data, false);
        let s = 1.0 / self.points() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    pub fn inverse_spectrum(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut data = spec.to_vec();
        self.transform(&mut data, true);
        data
    }

    /// Projects a spectrum onto the modes of a field with `cutoff`.
    pub fn gather(&self, spec: &[Complex64], cutoff: usize) -> PeriodicField {
        let mut f = PeriodicField::zeros(self.dim, cutoff);
        for i in 0..f.len() {
            f.coeffs[i] = spec[self.slot(&f.mode(i))];
        }
        f
    }

    pub fn from_grid(&self, samples: &[Complex64], cutoff: usize) -> PeriodicField {
        self.gather(&self.spectrum(samples), cutoff)
    }

    /// Signed frequency vector of every slot.
    pub fn slot_modes(&self) -> Vec<Vec<i64>> {
        (0..self.points())
            .map(|mut s| {
                let mut n = vec![0; self.dim];
                for j in (0..self.dim).rev() {
                    n[j] = self.frequency(s % self.len);
                    s /= self.len;
                }
                n
            })
            .collect()
    }
}

/// External potential `W` and vector potential `A` on the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalFields {
    pub w: PeriodicField,
    pub a: Vec<PeriodicField>,
}

impl ExternalFields {
    pub fn zero(dim: usize) -> Self {
        ExternalFields { w: PeriodicField::zeros(dim, 0), a: vec![PeriodicField::zeros(dim, 0); dim] }
    }

    pub fn scalar(w: PeriodicField) -> Self {
        let d = w.dim;
        ExternalFields { w, a: vec![PeriodicField::zeros(d, 0); d] }
    }

    pub fn new(w: PeriodicField, a: Vec<PeriodicField>) -> Result<Self> {
        let f = ExternalFields { w, a };
        f.validate()?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.w.dim
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.w.dim;
        if self.a.len() != d || self.a.iter().any(|a| a.dim != d) {
            return Err(Error::CutoffMismatch(format!(
                "vector potential needs {d} components of dimension {d}"
            )));
        }
        for f in std::iter::once(&self.w).chain(&self.a) {
            let scale = f.norm2().sqrt().max(1.0);
            if f.reality_defect() > 1e-12 * scale {
                return Err(Error::AdmissibilityViolation("external fields must be real".into()));
            }
            if f.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::AdmissibilityViolation("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn a_cutoff(&self) -> usize {
        self.a.iter().map(|a| a.cutoff).max().unwrap_or(0)
    }

    pub fn is_magnetic(&self) -> bool {
        self.a.iter().any(|a| a.coeffs.iter().any(|c| c.norm() > 0.0))
    }

    /// `(Σ|Ŵ_n|, Σ|Â_n|(1 + 2π|n|))`, the summability norms of the fields.
    pub fn summability(&self) -> (f64, f64) {
        let w = self.w.coeffs.iter().map(|c| c.norm()).sum();
        let a = self
            .a
            .iter()
            .map(|a| {
                (0..a.len())
                    .map(|i| {
                        let n: f64 = a.mode(i).iter().map(|x| (x * x) as f64).sum::<f64>().sqrt();
                        a.coeffs[i].norm() * (1.0 + 2.0 * PI * n)
                    })
                    .sum::<f64>()
            })
            .sum();
        (w, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_2d() {
        let f = PeriodicField::from_modes(
            2,
            2,
            &[(vec![1, -2], Complex64::new(0.3, 0.1)), (vec![0, 1], Complex64::new(-1.0, 0.0))],
        )
        .unwrap();
        let g = FftGrid::new(2, 8);
        let back = g.from_grid(&g.to_grid(&f), 2);
        for (a, b) in f.coeffs.iter().zip(&back.coeffs) {
            assert!((a - b).norm() < 1e-14);
        }
        let x = [3.0 / 8.0, 5.0 / 8.0];
        let s = g.to_grid(&f)[3 * 8 + 5];
        assert!((s - f.eval(&x)).norm() < 1e-13);
    }

    #[test]
    fn sizes_are_smooth() {
        assert_eq!(fft_size(17), 18);
        assert_eq!(fft_size(64), 64);
        assert_eq!(fft_size(65), 72);
    }

    #[test]
    fn trig_constructor_is_real() {
        let f = PeriodicField::real_trig_1d(3, 1.0, &[0.4], &[0.2]).unwrap();
        assert!(f.reality_defect() < 1e-15);
        let x = 0.3f64;
        let want = 1.0 + 0.4 * (2.0 * PI * x).cos() + 0.2 * (2.0 * PI * x).sin();
        assert!((f.eval(&[x]).re - want).abs() < 1e-14);
    }
}
