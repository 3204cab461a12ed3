//! Bogoliubov–de Gennes operator `H_Δ = [[k, Δ], [Δ†, -k̄]]` on one Floquet
//! fiber of the unit cell in d = 1, with plane waves `e^{i(2πn+θ)x}`, `|n| <= N`.
//!
//! The fiber matrix is split into the connected components of its sparsity
//! graph. Components that carry pairing are diagonalised densely; uncoupled
//! plane waves are eigenvectors on their own.

use crate::gp::{ExternalFields, FftGrid, PeriodicField};
use crate::twobody::BoundState;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest dense block the lattice will diagonalise.
pub const MAX_BLOCK: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeSpec {
    pub h: f64,
    pub mu: f64,
    /// Mode cutoff `N`; `None` selects `ceil(40/h)`.
    pub n_modes: Option<usize>,
    pub theta_samples: usize,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec { h: 0.1, mu: -1.0, n_modes: None, theta_samples: 16 }
    }
}

impl LatticeSpec {
    pub fn modes(&self) -> usize {
        self.n_modes.unwrap_or((40.0 / self.h).ceil() as usize)
    }

    /// Symmetric quasimomentum grid `θ_j = -π + 2π(j + ½)/M`, closed under `θ → -θ`.
    pub fn thetas(&self) -> Vec<f64> {
        let m = self.theta_samples as f64;
        (0..self.theta_samples).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / m).collect()
    }
}

/// Fourier data of the fields entering the fiber matrices.
#[derive(Debug, Clone)]
pub(crate) struct Coefficients {
    pub psi: PeriodicField,
    pub w: PeriodicField,
    pub a: PeriodicField,
    pub a2: PeriodicField,
}

impl Coefficients {
    pub fn new(psi: &PeriodicField, fields: &ExternalFields) -> Result<Self> {
        fields.validate()?;
        if psi.dim != 1 || fields.dim() != 1 {
            return Err(Error::InvalidParameter("lattice operators are implemented for d = 1".into()));
        }
        let a = fields.a[0].clone();
        let grid = FftGrid::new(1, crate::gp::field::fft_size(4 * a.cutoff + 1));
        let x: Vec<Complex64> = grid.to_grid(&a).iter().map(|c| Complex64::new(c.re * c.re, 0.0)).collect();
        let a2 = grid.from_grid(&x, 2 * a.cutoff);
        Ok(Coefficients { psi: psi.clone(), w: fields.w.clone(), a, a2 })
    }

    fn k_offsets(&self) -> Vec<i64> {
        let m = self.w.cutoff.max(self.a2.cutoff) as i64;
        (-m..=m)
            .filter(|&m| {
                m != 0
                    && (self.w.get(&[m]).norm() > 0.0
                        || self.a.get(&[m]).norm() > 0.0
                        || self.a2.get(&[m]).norm() > 0.0)
            })
            .collect()
    }

    fn psi_offsets(&self) -> Vec<i64> {
        let m = self.psi.cutoff as i64;
        (-m..=m).filter(|&m| self.psi.get(&[m]).norm() > 0.0).collect()
    }
}

/// One diagonalised component of a fiber matrix.
#[derive(Debug, Clone)]
pub struct Component {
    /// Particle mode indices, ascending.
    pub particles: Vec<usize>,
    /// Hole mode indices, ascending.
    pub holes: Vec<usize>,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors in the ordering `particles ++ holes`.
    pub eigenvectors: DMatrix<Complex64>,
    /// Whether some pairing matrix element couples this component.
    pub paired: bool,
}

/// Fiber `θ` of `H_Δ`.
#[derive(Debug, Clone)]
pub struct BdgLattice {
    pub h: f64,
    pub mu: f64,
    pub theta: f64,
    pub n_modes: usize,
    /// `q_i = 2π(i - N) + θ`.
    pub q: Vec<f64>,
    /// `t(h q_i)`.
    pub t: Vec<f64>,
    pub components: Vec<Component>,
    /// Modes not coupled to anything, `(index, is_particle, eigenvalue)`.
    pub isolated: Vec<(usize, bool, f64)>,
    /// Lower bound on `|λ|` for components left undiagonalised.
    pub passive_gap: f64,
    pub binding_energy: f64,
    /// `h² Σ|Ŵ_n|`, which bounds `h²W` in operator norm.
    pub w_bound: f64,
    pub(crate) coeffs: Coefficients,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl BdgLattice {
    pub fn size(&self) -> usize {
        self.q.len()
    }

    pub(crate) fn particle(&self, i: usize, j: usize) -> Complex64 {
        let h2 = self.h * self.h;
        let m = i as i64 - j as i64;
        let c = &self.coeffs;
        let mut v = h2
            * ((self.q[i] + self.q[j]) * c.a.get(&[m]) + c.a2.get(&[m]) + c.w.get(&[m]));
        if i == j {
            v += h2 * self.q[i] * self.q[i] - self.mu;
        }
        v
    }

    /// Lower-right block `-k̄`.
    pub(crate) fn hole(&self, i: usize, j: usize) -> Complex64 {
        let h2 = self.h * self.h;
        let m = i as i64 - j as i64;
        let c = &self.coeffs;
        let mut v = h2
            * (-(self.q[i] + self.q[j]) * c.a.get(&[m]) + c.a2.get(&[m]) + c.w.get(&[m]));
        if i == j {
            v += h2 * self.q[i] * self.q[i] - self.mu;
        }
        -v
    }

    /// Pairing block: particle row `i`, hole column `j`.
    pub(crate) fn pairing(&self, i: usize, j: usize) -> Complex64 {
        let m = i as i64 - j as i64;
        -0.5 * self.h * self.coeffs.psi.get(&[m]) * (self.t[i] + self.t[j])
    }

    /// `φ(h q_i) = ½ t(h q_i) / (h² q_i² - μ)`.
    pub fn phi(&self, i: usize) -> f64 {
        0.5 * self.t[i] / (self.h * self.h * self.q[i] * self.q[i] - self.mu)
    }

    /// Dense matrix of a component in the ordering `particles ++ holes`.
    pub fn component_matrix(&self, particles: &[usize], holes: &[usize]) -> DMatrix<Complex64> {
        let np = particles.len();
        let n = np + holes.len();
        DMatrix::from_fn(n, n, |r, c| match (r < np, c < np) {
            (true, true) => self.particle(particles[r], particles[c]),
            (false, false) => self.hole(holes[r - np], holes[c - np]),
            (true, false) => self.pairing(particles[r], holes[c - np]),
            (false, true) => self.pairing(particles[c], holes[r - np]).conj(),
        })
    }

    /// Every computed eigenvalue, ascending. Undiagonalised passive
    /// components are omitted.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .components
            .iter()
            .flat_map(|c| c.eigenvalues.iter().copied())
            .chain(self.isolated.iter().map(|x| x.2))
            .collect();
        s.sort_by(f64::total_cmp);
        s
    }

    pub fn smallest_abs_eigenvalue(&self) -> f64 {
        self.spectrum().iter().map(|x| x.abs()).fold(self.passive_gap, f64::min)
    }
}

/// Assembles and diagonalises fiber `θ` of `H_Δ`.
pub fn build_bdg_operator(
    psi: &PeriodicField,
    fields: &ExternalFields,
    bs: &BoundState,
    mu: f64,
    h: f64,
    n_modes: usize,
    theta: f64,
) -> Result<BdgLattice> {
    if !(mu < 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be negative")));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!("h = {h} must lie in (0, 1)")));
    }
    if bs.dim() != 1 {
        return Err(Error::InvalidParameter("lattice operators need a d = 1 bound state".into()));
    }
    let coeffs = Coefficients::new(psi, fields)?;
    let widest = psi.cutoff.max(fields.w.cutoff).max(coeffs.a2.cutoff);
    if 2 * widest > n_modes {
        return Err(Error::CutoffMismatch(format!(
            "field cutoff {widest} exceeds half of the basis cutoff {n_modes}"
        )));
    }
    let nb = 2 * n_modes + 1;
    let q: Vec<f64> = (0..nb).map(|i| 2.0 * PI * (i as f64 - n_modes as f64) + theta).collect();
    let t: Vec<f64> = q.iter().map(|&q| bs.t(h * q)).collect();
    let mut lat = BdgLattice {
        h,
        mu,
        theta,
        n_modes,
        q,
        t,
        components: Vec::new(),
        isolated: Vec::new(),
        passive_gap: f64::INFINITY,
        binding_energy: bs.binding_energy,
        w_bound: 0.0,
        coeffs,
    };
    let k_off = lat.coeffs.k_offsets();
    let p_off = lat.coeffs.psi_offsets();
    let mut uf = UnionFind((0..2 * nb).collect());
    let mut paired = vec![false; 2 * nb];
    for i in 0..nb {
        for &m in &k_off {
            let j = i as i64 - m;
            if (0..nb as i64).contains(&j) {
                uf.union(i, j as usize);
                uf.union(nb + i, nb + j as usize);
            }
        }
        for &m in &p_off {
            let j = i as i64 - m;
            if (0..nb as i64).contains(&j) && lat.t[i] + lat.t[j as usize] != 0.0 {
                uf.union(i, nb + j as usize);
                paired[i] = true;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; 2 * nb];
    for v in 0..2 * nb {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    let w_bound = h * h * lat.coeffs.w.coeffs.iter().map(|c| c.norm()).sum::<f64>();
    lat.w_bound = w_bound;
    for grp in groups {
        if grp.len() == 1 {
            let v = grp[0];
            let (i, is_p) = if v < nb { (v, true) } else { (v - nb, false) };
            let e = if is_p { lat.particle(i, i).re } else { lat.hole(i, i).re };
            lat.isolated.push((i, is_p, e));
            continue;
        }
        let is_paired = grp.iter().any(|&v| v < nb && paired[v]);
        if !is_paired && w_bound < -mu {
            lat.passive_gap = lat.passive_gap.min(-mu - w_bound);
            continue;
        }
        if grp.len() > MAX_BLOCK {
            return Err(Error::InvalidParameter(format!(
                "coupled block of size {} exceeds {MAX_BLOCK}; lower the mode cutoff",
                grp.len()
            )));
        }
        let particles: Vec<usize> = grp.iter().copied().filter(|&v| v < nb).collect();
        let holes: Vec<usize> = grp.iter().copied().filter(|&v| v >= nb).map(|v| v - nb).collect();
        let mat = lat.component_matrix(&particles, &holes);
        let eig = SymmetricEigen::new(mat);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = eig.eigenvectors.select_columns(&order);
        lat.components.push(Component { particles, holes, eigenvalues, eigenvectors, paired: is_paired });
    }
    let smallest = lat.smallest_abs_eigenvalue();
    if smallest < 1e-8 {
        return Err(Error::GapClosed { smallest, theta });
    }
    Ok(lat)
}
