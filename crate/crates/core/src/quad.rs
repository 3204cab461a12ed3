//! Gauss–Legendre quadrature helpers: fixed composite rules and an adaptive
//! integrator with a bisection error estimate.

use crate::{Error, Result};
use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// A fixed quadrature rule on some interval: `sum_i w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss–Legendre rule of order `order` on the panels between
    /// consecutive `breaks`.
    pub fn composite(breaks: &[f64], order: usize) -> Rule {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * breaks.len());
        let mut weights = Vec::with_capacity(order * breaks.len());
        for p in breaks.windows(2) {
            let (a, b) = (p[0], p[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Panel edges for a radial momentum integral: geometric refinement towards
/// the origin below `scale`, then panels of width `scale` up to `upper`.
pub fn radial_breaks(scale: f64, upper: f64, levels: usize, tail_width: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    for k in (0..levels).rev() {
        let x = scale * 0.5f64.powi(k as i32 + 1);
        if x < upper {
            b.push(x);
        }
    }
    let width = (tail_width * scale).max(f64::MIN_POSITIVE);
    let mut x = scale.min(upper);
    while x < upper {
        b.push(x);
        x += width;
    }
    b.push(upper);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * upper.abs().max(1.0));
    b
}

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

const ADAPT_ORDER: usize = 16;
const MAX_DEPTH: usize = 40;

/// Adaptive Gauss–Legendre integration over the panels given by `breaks`.
///
/// Each panel is compared against the sum over its two halves and bisected
/// until the difference drops below its share of `max(abs_tol, rel_tol |I|)`.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    if breaks.len() < 2 {
        return Err(Error::QuadratureFailure("need at least one panel".into()));
    }
    let (x, w) = gauss_legendre(ADAPT_ORDER);
    let panel = |a: f64, b: f64| -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
    };
    let first: Vec<(f64, f64, f64)> = breaks
        .windows(2)
        .map(|p| (p[0], p[1], panel(p[0], p[1])))
        .collect();
    let rough: f64 = first.iter().map(|p| p.2).sum();
    if !rough.is_finite() {
        return Err(Error::QuadratureFailure("integrand is not finite".into()));
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    let tol = abs_tol.max(rel_tol * rough.abs());
    let mut value = 0.0;
    let mut err = 0.0;
    let mut stack: Vec<(f64, f64, f64, usize)> =
        first.into_iter().rev().map(|(a, b, v)| (a, b, v, 0)).collect();
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = panel(a, m);
        let right = panel(m, b);
        let diff = (left + right - whole).abs();
        let share = tol * (b - a) / span;
        if diff <= share.max(1e-15 * (left.abs() + right.abs())) || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && diff > share {
                return Err(Error::QuadratureFailure(format!(
                    "no convergence on [{a}, {b}]"
                )));
            }
            value += left + right;
            err += diff;
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    if !value.is_finite() {
        return Err(Error::QuadratureFailure("integral is not finite".into()));
    }
    Ok(Estimate { value, abs_error: err })
}

/// Adaptive integral over `[0, inf)` through the map `q = s x / (1 - x)`.
pub fn integrate_half_line(
    f: &dyn Fn(f64) -> f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let g = |x: f64| {
        if x >= 1.0 {
            return 0.0;
        }
        let q = scale * x / (1.0 - x);
        let jac = scale / ((1.0 - x) * (1.0 - x));
        let v = f(q) * jac;
        if v.is_finite() { v } else { 0.0 }
    };
    let breaks: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
    integrate_adaptive(&g, &breaks, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn composite_rule_on_gaussian() {
        let r = Rule::composite(&radial_breaks(1.0, 12.0, 4, 1.0), 12);
        let s = r.integrate(|x| (-x * x).exp());
        assert!((s - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_kink() {
        let f = |x: f64| (x - 0.3).abs();
        let e = integrate_adaptive(&f, &[0.0, 1.0], 1e-12, 1e-12).unwrap();
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-11, "{e:?}");
    }

    #[test]
    fn half_line_lorentzian() {
        let f = |q: f64| 1.0 / (1.0 + q * q);
        let e = integrate_half_line(&f, 1.0, 1e-13, 1e-12).unwrap();
        assert!((e.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }
}
