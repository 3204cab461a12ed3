//! Independent reference solvers shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Ground-state binding energy of `-u'' + V u = -E u` on the half line by
/// Numerov shooting with node counting: for `E` above the ground-state
/// binding energy the outward solution has no node. `odd = true` imposes
/// `u(0) = 0` (the s-wave of d = 3), otherwise `u'(0) = 0`.
pub fn numerov_binding_energy(v: &dyn Fn(f64) -> f64, odd: bool, radius: f64, steps: usize, depth: f64) -> f64 {
    let h = radius / steps as f64;
    let k = h * h / 12.0;
    let nodeless = |e: f64| -> bool {
        let f = |r: f64| v(r) + e;
        let (mut u0, mut u1) = if odd {
            (0.0, h)
        } else {
            // Taylor start of the even solution, u'' = f u
            (1.0, 1.0 + 0.5 * h * h * f(0.0) + h.powi(4) / 24.0 * f(0.0).powi(2))
        };
        let (mut f0, mut f1) = (f(0.0), f(h));
        for i in 1..steps {
            let f2 = f((i + 1) as f64 * h);
            let u2 = (2.0 * u1 * (1.0 + 5.0 * k * f1) - u0 * (1.0 - k * f0)) / (1.0 - k * f2);
            if u2 * u1 < 0.0 || u2 == 0.0 {
                return false;
            }
            if u2.abs() > 1e100 {
                return true;
            }
            (u0, u1, f0, f1) = (u1, u2, f1, f2);
        }
        true
    };
    let (mut lo, mut hi) = (0.0, depth);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nodeless(mid) { hi = mid } else { lo = mid }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Richardson-extrapolated Numerov energy (fourth-order scheme).
pub fn numerov_extrapolated(v: &dyn Fn(f64) -> f64, odd: bool, radius: f64, steps: usize, depth: f64) -> f64 {
    let coarse = numerov_binding_energy(v, odd, radius, steps, depth);
    let fine = numerov_binding_energy(v, odd, radius, 2 * steps, depth);
    fine + (fine - coarse) / 15.0
}

/// Nelder–Mead simplex minimisation.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let centroid: Vec<f64> = (0..n).map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (pts[n][k] - centroid[k])).collect() };
        let r = along(-1.0);
        let fr = f(&r);
        if fr < vals[0] {
            let e = along(-2.0);
            let fe = f(&e);
            if fe < fr {
                pts[n] = e;
                vals[n] = fe;
            } else {
                pts[n] = r;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = r;
            vals[n] = fr;
        } else {
            let c = if fr < vals[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&c);
            if fc < vals[n].min(fr) {
                pts[n] = c;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    pts[i] = (0..n).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best].clone(), vals[best])
}

/// BFGS with a backtracking Armijo line search.
pub fn bfgs(f: &dyn Fn(&[f64]) -> (f64, Vec<f64>), start: &[f64], iters: usize, gtol: f64) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut x = start.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut hinv: Vec<f64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    for _ in 0..iters {
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < gtol {
            break;
        }
        let d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<f64>()).collect();
        let slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        let d = if slope < 0.0 { d } else { g.iter().map(|v| -v).collect() };
        let slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let (xn, fxn, gnw) = loop {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let (fv, gv) = f(&xn);
            if fv <= fx + 1e-4 * t * slope || t < 1e-20 {
                break (xn, fv, gv);
            }
            t *= 0.5;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnw.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i * n + j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        x = xn;
        fx = fxn;
        g = gnw;
    }
    (x, fx)
}

/// `E(ψ)` for a real even `ψ = Σ_k a_k cos(2πkx)` in d = 1 with `A = 0`,
/// by the trapezoid rule on `points` samples (exact for trigonometric
/// polynomials of degree below `points`).
pub fn gp_energy_cosine(a: &[f64], w: &dyn Fn(f64) -> f64, g: f64, points: usize) -> f64 {
    let mut e = 0.0;
    for i in 0..points {
        let x = i as f64 / points as f64;
        let (mut p, mut dp) = (0.0, 0.0);
        for (k, c) in a.iter().enumerate() {
            let q = 2.0 * PI * k as f64;
            p += c * (q * x).cos();
            dp -= c * q * (q * x).sin();
        }
        e += 0.25 * dp * dp + w(x) * p * p + g * p.powi(4);
    }
    e / points as f64
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
