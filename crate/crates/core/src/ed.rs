//! Exact diagonalisation of the spin Hamiltonian in the `S^z` basis.
//!
//! Basis states are bit strings with site 0 as the most significant bit; a set
//! bit marks a down spin. The total number of down spins is conserved and
//! every sector is solved separately.

use ndarray::Array2;
use ndarray_linalg::{Eigh, SVD, UPLO};

use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpair, LanczosConfig};
use crate::params::GeneralCouplings;
use crate::realspace::{exchange_bonds, Bond};

pub const MAX_SPINS: usize = 14;

const DENSE_LIMIT: usize = 400;

/// Boundary of the spin chain; `sign` multiplies every bond that wraps around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinBoundary {
    Open,
    Periodic { sign: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdResult {
    pub energy: f64,
    /// Number of down spins in the ground sector.
    pub sector: usize,
    /// Lowest energy per down-spin count `0..=2N`.
    pub sector_energies: Vec<f64>,
    /// Another sector lies within `1e-10` of the ground energy.
    pub degenerate: bool,
    /// Entropy of the left `N` sites.
    pub entropy: f64,
    /// `sum <mu1 S1^z + mu2 S2^z> / (N (mu1 + mu2) / 2)`.
    pub magnetization: f64,
    pub state: Vec<f64>,
}

struct SpinModel {
    spins: usize,
    onsite: Vec<f64>,
    bonds: Vec<(Bond, f64)>,
}

impl SpinModel {
    fn new(g: &GeneralCouplings, cells: usize, boundary: SpinBoundary) -> Result<Self> {
        g.validate()?;
        let spins = 2 * cells;
        if cells == 0 {
            return Err(Error::InvalidParameter("cell count must be positive".into()));
        }
        if spins > MAX_SPINS {
            return Err(Error::SizeCap { spins, max: MAX_SPINS });
        }
        let (periodic, sign) = match boundary {
            SpinBoundary::Open => (false, 1.0),
            SpinBoundary::Periodic { sign } => {
                if cells < 2 {
                    return Err(Error::InvalidParameter("periodic chain needs at least 2 cells".into()));
                }
                (true, sign)
            }
        };
        let onsite = (0..spins).map(|i| -g.field * if i % 2 == 0 { g.mu1 } else { g.mu2 }).collect();
        let bonds = exchange_bonds(g, cells, periodic)
            .into_iter()
            .map(|b| {
                let s = if b.wraps { sign } else { 1.0 };
                (b, s)
            })
            .collect();
        Ok(SpinModel { spins, onsite, bonds })
    }

    #[inline]
    fn bit(&self, state: usize, site: usize) -> usize {
        (state >> (self.spins - 1 - site)) & 1
    }

    #[inline]
    fn sz(&self, state: usize, site: usize) -> f64 {
        0.5 - self.bit(state, site) as f64
    }

    fn diagonal(&self, state: usize) -> f64 {
        (0..self.spins).map(|i| self.onsite[i] * self.sz(state, i)).sum()
    }

    /// Off-diagonal images `(state', amplitude)` of a basis state.
    fn flips(&self, state: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        for (b, sign) in &self.bonds {
            let a = b.sites[0];
            let c = *b.sites.last().expect("bond has two ends");
            if self.bit(state, a) == self.bit(state, c) {
                continue;
            }
            let mid: f64 = b.sites[1..b.sites.len() - 1].iter().map(|&m| self.sz(state, m)).product();
            let mask = (1 << (self.spins - 1 - a)) | (1 << (self.spins - 1 - c));
            out.push((state ^ mask, -0.5 * b.coupling * sign * mid));
        }
    }
}

struct Sector {
    states: Vec<usize>,
    index: Vec<u32>,
}

impl Sector {
    fn new(spins: usize, down: usize) -> Self {
        let states: Vec<usize> = (0..1usize << spins).filter(|s| s.count_ones() as usize == down).collect();
        let mut index = vec![u32::MAX; 1 << spins];
        for (i, &s) in states.iter().enumerate() {
            index[s] = i as u32;
        }
        Sector { states, index }
    }
}

fn sector_matrix(model: &SpinModel, sec: &Sector) -> Array2<f64> {
    let d = sec.states.len();
    let mut h = Array2::<f64>::zeros((d, d));
    let mut buf = Vec::new();
    for (i, &s) in sec.states.iter().enumerate() {
        h[[i, i]] += model.diagonal(s);
        model.flips(s, &mut buf);
        for &(t, amp) in &buf {
            h[[sec.index[t] as usize, i]] += amp;
        }
    }
    h
}

fn start_vector(d: usize) -> Vec<f64> {
    let mut x: u64 = 0x9E37_79B9_7F4A_7C15;
    (0..d)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn sector_ground(model: &SpinModel, sec: &Sector) -> Result<(f64, Vec<f64>)> {
    let d = sec.states.len();
    if d <= DENSE_LIMIT {
        let (vals, vecs) = sector_matrix(model, sec).eigh(UPLO::Lower)?;
        return Ok((vals[0], vecs.column(0).to_vec()));
    }
    let diag: Vec<f64> = sec.states.iter().map(|&s| model.diagonal(s)).collect();
    let offd: Vec<Vec<(u32, f64)>> = sec
        .states
        .iter()
        .map(|&s| {
            let mut buf = Vec::new();
            model.flips(s, &mut buf);
            buf.into_iter().map(|(t, a)| (sec.index[t], a)).collect()
        })
        .collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..d {
            y[i] = diag[i] * x[i];
        }
        for (i, row) in offd.iter().enumerate() {
            for &(j, a) in row {
                y[j as usize] += a * x[i];
            }
        }
    };
    let cfg = LanczosConfig { krylov_dim: 60, tol: 1e-11, max_restarts: 500 };
    let e = lowest_eigenpair(apply, &start_vector(d), &cfg)?;
    Ok((e.value, e.vector))
}

/// Lowest energy in the sector with `down` down spins.
pub fn sector_ground_energy(g: &GeneralCouplings, cells: usize, boundary: SpinBoundary, down: usize) -> Result<f64> {
    let model = SpinModel::new(g, cells, boundary)?;
    if down > model.spins {
        return Err(Error::InvalidParameter(format!("{down} down spins on {} sites", model.spins)));
    }
    Ok(sector_ground(&model, &Sector::new(model.spins, down))?.0)
}

/// Schmidt entropy of the first `left` sites of a full state vector.
pub fn schmidt_entropy(state: &[f64], spins: usize, left: usize) -> Result<f64> {
    let rows = 1usize << left;
    let cols = 1usize << (spins - left);
    let m = Array2::from_shape_vec((rows, cols), state.to_vec())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let (_, sv, _) = m.svd(false, false)?;
    let p: Vec<f64> = sv.iter().map(|s| s * s).collect();
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum())
}

pub fn exact_diag(g: &GeneralCouplings, cells: usize, boundary: SpinBoundary) -> Result<EdResult> {
    let model = SpinModel::new(g, cells, boundary)?;
    let spins = model.spins;
    let mut best: Option<(f64, usize, Vec<f64>, Sector)> = None;
    let mut sector_energies = Vec::with_capacity(spins + 1);
    for down in 0..=spins {
        let sec = Sector::new(spins, down);
        let (e, v) = sector_ground(&model, &sec)?;
        sector_energies.push(e);
        if best.as_ref().is_none_or(|b| e < b.0) {
            best = Some((e, down, v, sec));
        }
    }
    let (energy, sector, vec, sec) = best.expect("at least one sector");
    let degenerate = sector_energies
        .iter()
        .enumerate()
        .any(|(m, &e)| m != sector && (e - energy).abs() < 1e-10);
    let mut state = vec![0.0; 1 << spins];
    for (&s, &a) in sec.states.iter().zip(&vec) {
        state[s] = a;
    }
    let entropy = schmidt_entropy(&state, spins, cells)?;
    let mut mz = 0.0;
    for (&s, &a) in sec.states.iter().zip(&vec) {
        let w = a * a;
        let m: f64 = (0..spins).map(|i| if i % 2 == 0 { g.mu1 } else { g.mu2 } * model.sz(s, i)).sum();
        mz += w * m;
    }
    let magnetization = mz / (cells as f64 * g.moment_norm());
    Ok(EdResult { energy, sector, sector_energies, degenerate, entropy, magnetization, state })
}

/// Full `2^L x 2^L` Hamiltonian matrix (for operator cross-checks).
pub fn hamiltonian_matrix(g: &GeneralCouplings, cells: usize, boundary: SpinBoundary) -> Result<Array2<f64>> {
    let model = SpinModel::new(g, cells, boundary)?;
    let dim = 1usize << model.spins;
    let mut h = Array2::<f64>::zeros((dim, dim));
    let mut buf = Vec::new();
    for s in 0..dim {
        h[[s, s]] += model.diagonal(s);
        model.flips(s, &mut buf);
        for &(t, a) in &buf {
            h[[t, s]] += a;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn decoupled_spins_in_a_field() {
        let g = GeneralCouplings::three_spin(0.8, 0.0, 0.0, 0.0);
        let r = exact_diag(&g, 1, SpinBoundary::Open).unwrap();
        assert_abs_diff_eq!(r.energy, -0.8, epsilon = 1e-14);
        assert_eq!(r.sector, 0);
        assert_abs_diff_eq!(r.entropy, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.magnetization, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn xy_dimer_singlet_like_state() {
        // -J (SxSx + SySy) on two spins: ground (|ud> + |du>)/sqrt2 at -J/2
        let g = GeneralCouplings::three_spin(0.0, 1.0, 0.0, 0.0);
        let r = exact_diag(&g, 1, SpinBoundary::Open).unwrap();
        assert_abs_diff_eq!(r.energy, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.entropy, 2f64.ln(), epsilon = 1e-12);
        let h = hamiltonian_matrix(&g, 1, SpinBoundary::Open).unwrap();
        assert_abs_diff_eq!(h[[1, 2]], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn size_cap() {
        let g = GeneralCouplings::three_spin(0.0, 1.0, 1.0, 0.0);
        assert_eq!(exact_diag(&g, 8, SpinBoundary::Open).unwrap_err(), Error::SizeCap { spins: 16, max: 14 });
    }
}
