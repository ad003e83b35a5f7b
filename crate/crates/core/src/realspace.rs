//! Real-space fermion picture of the chain and correlation-matrix entanglement.
//!
//! After the Jordan-Wigner map `S^z = 1/2 - n` the Hamiltonian is the
//! number-conserving quadratic form `sum_ij t_ij a_i^+ a_j + const` on `2N`
//! sites ordered `(n,1), (n,2), (n+1,1), ...`. Exchange terms become
//! hoppings: `-J1/2` inside a cell, `-J2/2` between cells, `-J13/4` and
//! `-J23/4` across one site, `-J14/8` across two. The on-site energy of
//! sublattice `s` is `H mu_s` and the constant is `-H (mu1 + mu2) / 2` per cell.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};
use crate::model::ZERO_ENERGY_TOL;
use crate::params::{GeneralCouplings, ReducedParams};

/// Boundary condition of the fermion hopping problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Open,
    /// Bonds crossing the end of the chain are multiplied by `twist`
    /// (`+1` periodic, `-1` antiperiodic fermions).
    Periodic { twist: f64 },
}

/// A bond `(site i, site j, amplitude)` of the spin/fermion problem, with the
/// sites strictly increasing along the chain before wrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Bond {
    pub sites: Vec<usize>,
    /// Exchange coupling multiplying `-(S^x..S^x + S^y..S^y)` with `S^z` in between.
    pub coupling: f64,
    pub wraps: bool,
}

/// Exchange bonds of the Hamiltonian on `cells` cells, each listed as the
/// ordered site sequence `(first, middle..., last)`.
pub fn exchange_bonds(g: &GeneralCouplings, cells: usize, periodic: bool) -> Vec<Bond> {
    let l = 2 * cells;
    let mut out = Vec::new();
    for n in 0..cells {
        let a = 2 * n;
        let raw: [(f64, Vec<usize>); 5] = [
            (g.j1, vec![a, a + 1]),
            (g.j2, vec![a + 1, a + 2]),
            (g.j13, vec![a, a + 1, a + 2]),
            (g.j23, vec![a + 1, a + 2, a + 3]),
            (g.j14, vec![a, a + 1, a + 2, a + 3]),
        ];
        for (c, sites) in raw {
            if c == 0.0 {
                continue;
            }
            let wraps = sites.iter().any(|&s| s >= l);
            if wraps && !periodic {
                continue;
            }
            out.push(Bond { sites: sites.iter().map(|s| s % l).collect(), coupling: c, wraps });
        }
    }
    out
}

/// Single-particle matrix and constant energy shift.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix {
    pub cells: usize,
    pub matrix: Array2<f64>,
    pub constant: f64,
    pub boundary: Boundary,
}

pub fn build_hopping(g: &GeneralCouplings, cells: usize, boundary: Boundary) -> Result<HoppingMatrix> {
    g.validate()?;
    if cells == 0 {
        return Err(Error::InvalidParameter("cell count must be positive".into()));
    }
    let l = 2 * cells;
    let mut m = Array2::<f64>::zeros((l, l));
    for n in 0..cells {
        m[[2 * n, 2 * n]] = g.field * g.mu1;
        m[[2 * n + 1, 2 * n + 1]] = g.field * g.mu2;
    }
    let (periodic, twist) = match boundary {
        Boundary::Open => (false, 1.0),
        Boundary::Periodic { twist } => (true, twist),
    };
    for b in exchange_bonds(g, cells, periodic) {
        let (i, j) = (b.sites[0], *b.sites.last().expect("bond has two ends"));
        let scale = 2f64.powi(b.sites.len() as i32 - 1);
        let t = -b.coupling / scale * if b.wraps { twist } else { 1.0 };
        m[[i, j]] += t;
        m[[j, i]] += t;
    }
    let constant = -0.5 * g.field * (g.mu1 + g.mu2) * cells as f64;
    Ok(HoppingMatrix { cells, matrix: m, constant, boundary })
}

pub fn build_hopping_reduced(p: &ReducedParams, boundary: Boundary) -> Result<HoppingMatrix> {
    p.validate()?;
    build_hopping(&p.to_general(), p.n, boundary)
}

/// Eigen-decomposition with orbitals in ascending energy.
#[derive(Debug, Clone)]
pub struct Orbitals {
    pub energies: Array1<f64>,
    pub vectors: Array2<f64>,
}

impl HoppingMatrix {
    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn orbitals(&self) -> Result<Orbitals> {
        let (energies, vectors) = self.matrix.eigh(UPLO::Lower)?;
        Ok(Orbitals { energies, vectors })
    }

    /// Single-particle energies, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.orbitals()?.energies.to_vec())
    }

    /// Lowest energy with exactly `particles` fermions.
    pub fn sector_energy(&self, particles: usize) -> Result<f64> {
        let e = self.spectrum()?;
        if particles > e.len() {
            return Err(Error::InvalidParameter(format!("{particles} particles on {} sites", e.len())));
        }
        Ok(e[..particles].iter().sum::<f64>() + self.constant)
    }

    /// Ground energy with every negative orbital filled.
    pub fn ground_energy(&self) -> Result<f64> {
        let e = self.spectrum()?;
        Ok(e.iter().filter(|&&x| x < -ZERO_ENERGY_TOL).sum::<f64>() + self.constant)
    }
}

/// `<a_i^+ a_j>` restricted to a set of consecutive sites.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub c: Array2<f64>,
    /// Whether an orbital within the zero-energy tolerance was left empty.
    pub flagged: bool,
}

impl CorrelationMatrix {
    pub fn occupations(&self) -> Result<Vec<f64>> {
        Ok(self.c.eigh(UPLO::Lower)?.0.to_vec())
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_from_occupations(&self.occupations()?))
    }
}

/// Ground-state correlation matrix on sites `start..end`.
pub fn correlation_matrix(hop: &HoppingMatrix, start: usize, end: usize) -> Result<CorrelationMatrix> {
    if start > end || end > hop.sites() {
        return Err(Error::InvalidParameter(format!("subsystem {start}..{end} outside the chain")));
    }
    let orb = hop.orbitals()?;
    let occ: Vec<usize> = (0..orb.energies.len()).filter(|&i| orb.energies[i] < -ZERO_ENERGY_TOL).collect();
    let flagged = orb.energies.iter().any(|e| e.abs() <= ZERO_ENERGY_TOL);
    let sub = orb.vectors.slice(s![start..end, ..]);
    let mut v = Array2::<f64>::zeros((end - start, occ.len()));
    for (c, &i) in occ.iter().enumerate() {
        v.column_mut(c).assign(&sub.column(i));
    }
    Ok(CorrelationMatrix { c: v.dot(&v.t()), flagged })
}

/// `-sum [nu ln nu + (1 - nu) ln(1 - nu)]` with occupations clamped to `[0, 1]`.
pub fn entropy_from_occupations(nu: &[f64]) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    nu.iter().map(|&x| x.clamp(0.0, 1.0)).map(|x| f(x) + f(1.0 - x)).sum()
}

/// Entanglement entropy result of the free-fermion ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entanglement {
    pub entropy: f64,
    pub flagged: bool,
}

/// Entropy of the first `cut` sites of the open chain.
pub fn ee_correlation(g: &GeneralCouplings, cells: usize, cut: usize) -> Result<Entanglement> {
    let hop = build_hopping(g, cells, Boundary::Open)?;
    let c = correlation_matrix(&hop, 0, cut)?;
    Ok(Entanglement { entropy: c.entropy()?, flagged: c.flagged })
}

/// Entropy at the central bond (`cells` sites on the left).
pub fn ee_center(g: &GeneralCouplings, cells: usize) -> Result<Entanglement> {
    ee_correlation(g, cells, cells)
}
