//! Two-site finite-size DMRG.
//!
//! Environments are stored as one `[bra, ket]` matrix per MPO bond index and
//! each MPO tensor as its list of nonzero entries, so every contraction is a
//! sequence of dense matrix products on contiguous blocks.

use std::collections::BTreeMap;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, Array3, Array4, Array5, ArrayView2, Axis};
use ndarray_linalg::{Eigh, UPLO};
use spinchain::lanczos::{lowest_eigenpair_best_effort, LanczosConfig};
use spinchain::{Error, Result};

use crate::mpo::Mpo;
use crate::mps::{svd, Mps};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub chi_max: usize,
    /// Largest discarded weight `sum s^2` (relative) per truncation.
    pub svd_cutoff: f64,
    /// Convergence threshold on the energy change over a full sweep.
    pub energy_tol: f64,
    pub max_sweeps: usize,
    /// Residual tolerance of the local eigensolver.
    pub lanczos_tol: f64,
    /// Bond dimension of the random starting state.
    pub init_chi: usize,
    /// Weight of the density-matrix perturbation that lets truncated
    /// directions re-enter the basis.
    pub mixing: f64,
    /// Number of initial sweeps that use the perturbation; convergence is
    /// only tested on sweeps after these.
    pub mixing_sweeps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            chi_max: 300,
            svd_cutoff: 1e-10,
            energy_tol: 1e-9,
            max_sweeps: 20,
            lanczos_tol: 1e-10,
            init_chi: 8,
            mixing: 1e-4,
            mixing_sweeps: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DmrgResult {
    pub energy: f64,
    pub mps: Mps,
    /// Energy after every half sweep.
    pub half_sweep_energies: Vec<f64>,
    /// Largest discarded weight in the final sweep.
    pub truncation: f64,
    pub seed: u64,
}

impl DmrgResult {
    pub fn sweeps(&self) -> usize {
        self.half_sweep_energies.len() / 2
    }
}

/// `E[w]` is the `[bra, ket]` block for MPO bond index `w`.
type Env = Vec<Array2<f64>>;

/// Nonzero `W[wl, out, inp, wr]`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    wl: usize,
    wr: usize,
    out: usize,
    inp: usize,
    val: f64,
}

#[derive(Debug, Clone)]
struct SiteOp {
    wl: usize,
    wr: usize,
    entries: Vec<Entry>,
}

impl SiteOp {
    fn new(w: &Array4<f64>) -> Self {
        let entries = w
            .indexed_iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|((wl, out, inp, wr), &val)| Entry { wl, wr, out, inp, val })
            .collect();
        SiteOp { wl: w.shape()[0], wr: w.shape()[3], entries }
    }
}

fn phys(a: &Array3<f64>, s: usize) -> ArrayView2<'_, f64> {
    a.slice(s![.., s, ..])
}

fn unit_env() -> Env {
    vec![Array2::ones((1, 1))]
}

/// Add site `a` with operator `op` to a left environment.
fn grow_left(env: &Env, a: &Array3<f64>, op: &SiteOp) -> Env {
    let (dl, _, dr) = a.dim();
    let mut cache: BTreeMap<(usize, usize), Array2<f64>> = BTreeMap::new();
    let mut acc: Vec<[Option<Array2<f64>>; 2]> = vec![[None, None]; op.wr];
    for e in &op.entries {
        let t = cache.entry((e.wl, e.inp)).or_insert_with(|| env[e.wl].dot(&phys(a, e.inp)));
        let slot = acc[e.wr][e.out].get_or_insert_with(|| Array2::zeros((dl, dr)));
        slot.scaled_add(e.val, t);
    }
    acc.into_iter()
        .map(|pair| {
            let mut out = Array2::zeros((dr, dr));
            for (s, m) in pair.iter().enumerate() {
                if let Some(m) = m {
                    general_mat_mul(1.0, &phys(a, s).t(), m, 1.0, &mut out);
                }
            }
            out
        })
        .collect()
}

/// Add site `b` with operator `op` to a right environment.
fn grow_right(env: &Env, b: &Array3<f64>, op: &SiteOp) -> Env {
    let (dl, _, dr) = b.dim();
    let mut cache: BTreeMap<(usize, usize), Array2<f64>> = BTreeMap::new();
    let mut acc: Vec<[Option<Array2<f64>>; 2]> = vec![[None, None]; op.wl];
    for e in &op.entries {
        let t = cache.entry((e.wr, e.inp)).or_insert_with(|| env[e.wr].dot(&phys(b, e.inp).t()));
        let slot = acc[e.wl][e.out].get_or_insert_with(|| Array2::zeros((dr, dl)));
        slot.scaled_add(e.val, t);
    }
    acc.into_iter()
        .map(|pair| {
            let mut out = Array2::zeros((dl, dl));
            for (s, m) in pair.iter().enumerate() {
                if let Some(m) = m {
                    general_mat_mul(1.0, &phys(b, s), m, 1.0, &mut out);
                }
            }
            out
        })
        .collect()
}

/// Effective two-site Hamiltonian acting on `theta[a, s1 s2 b]`.
struct TwoSite<'a> {
    left: &'a Env,
    right: &'a Env,
    op1: &'a SiteOp,
    op2: &'a SiteOp,
    /// `(w_left, w_right, M[(s1 s2)_out][(s1 s2)_in])` summed over the
    /// middle index.
    pairs: Vec<(usize, usize, [[f64; 4]; 4])>,
    a: usize,
    b: usize,
}

impl<'a> TwoSite<'a> {
    fn new(left: &'a Env, op1: &'a SiteOp, op2: &'a SiteOp, right: &'a Env, a: usize, b: usize) -> Self {
        let mut m: BTreeMap<(usize, usize), [[f64; 4]; 4]> = BTreeMap::new();
        for e1 in &op1.entries {
            for e2 in op2.entries.iter().filter(|e2| e2.wl == e1.wr) {
                let blk = m.entry((e1.wl, e2.wr)).or_insert([[0.0; 4]; 4]);
                blk[e1.out * 2 + e2.out][e1.inp * 2 + e2.inp] += e1.val * e2.val;
            }
        }
        TwoSite { left, right, op1, op2, pairs: m.into_iter().map(|((l, r), x)| (l, r, x)).collect(), a, b }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (a, b) = (self.a, self.b);
        let theta = ArrayView2::from_shape((a, 4 * b), x).expect("theta shape");
        let mut xs: BTreeMap<usize, Array2<f64>> = BTreeMap::new();
        let mut ys: BTreeMap<usize, Array2<f64>> = BTreeMap::new();
        for (wl, wr, m) in &self.pairs {
            let xw = xs.entry(*wl).or_insert_with(|| self.left[*wl].dot(&theta));
            let yw = ys.entry(*wr).or_insert_with(|| Array2::zeros((a, 4 * b)));
            for (so, row) in m.iter().enumerate() {
                for (si, &c) in row.iter().enumerate() {
                    if c != 0.0 {
                        yw.slice_mut(s![.., so * b..(so + 1) * b]).scaled_add(c, &xw.slice(s![.., si * b..(si + 1) * b]));
                    }
                }
            }
        }
        let mut out = ndarray::ArrayViewMut2::from_shape((a, 4 * b), y).expect("output shape");
        out.fill(0.0);
        for (wr, yw) in &ys {
            let r = self.right[*wr].t();
            for so in 0..4 {
                let blk = yw.slice(s![.., so * b..(so + 1) * b]);
                general_mat_mul(1.0, &blk, &r, 1.0, &mut out.slice_mut(s![.., so * b..(so + 1) * b]));
            }
        }
    }

    /// `(L W1) theta` as a matrix `[a' s1', w' s2 b]`.
    fn left_expand(&self, theta: &Array2<f64>) -> Array2<f64> {
        let (a, b) = (self.a, self.b);
        let mut p = Array5::<f64>::zeros((a, 2, self.op1.wr, 2, b));
        let t = theta.view().into_shape_with_order((a, 4 * b)).expect("contiguous");
        let mut xs: BTreeMap<usize, Array3<f64>> = BTreeMap::new();
        for e in &self.op1.entries {
            let xw = xs
                .entry(e.wl)
                .or_insert_with(|| self.left[e.wl].dot(&t).into_shape_with_order((a, 4, b)).expect("contiguous"));
            for s2 in 0..2 {
                p.slice_mut(s![.., e.out, e.wr, s2, ..]).scaled_add(e.val, &xw.slice(s![.., e.inp * 2 + s2, ..]));
            }
        }
        p.into_shape_with_order((a * 2, self.op1.wr * 2 * b)).expect("contiguous")
    }

    /// `(W2 R) theta` as a matrix `[a s1 w', s2' b']`.
    fn right_expand(&self, theta: &Array2<f64>) -> Array2<f64> {
        let (a, b) = (self.a, self.b);
        let t = theta.view().into_shape_with_order((a * 4, b)).expect("contiguous");
        let mut q = Array5::<f64>::zeros((a, 2, self.op2.wl, 2, b));
        let mut zs: BTreeMap<usize, Array3<f64>> = BTreeMap::new();
        for e in &self.op2.entries {
            let zw = zs
                .entry(e.wr)
                .or_insert_with(|| t.dot(&self.right[e.wr].t()).into_shape_with_order((a * 2, 2, b)).expect("contiguous"));
            for s1 in 0..2 {
                let src = zw.slice(s![.., e.inp, ..]);
                let src = src.slice(s![s1..;2, ..]);
                q.slice_mut(s![.., s1, e.wl, e.out, ..]).scaled_add(e.val, &src);
            }
        }
        q.into_shape_with_order((a * 2 * self.op2.wl, 2 * b)).expect("contiguous")
    }
}

/// Keep the largest singular values so that the discarded relative weight
/// stays below `cutoff`, with at most `chi_max` and at least one kept.
fn truncation_rank(sv: &[f64], chi_max: usize, cutoff: f64) -> (usize, f64) {
    let total: f64 = sv.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return (1, 0.0);
    }
    let mut tail = 0.0;
    let mut keep = sv.len();
    while keep > 1 {
        let next = tail + sv[keep - 1] * sv[keep - 1];
        if next > cutoff * total {
            break;
        }
        tail = next;
        keep -= 1;
    }
    while keep > chi_max {
        tail += sv[keep - 1] * sv[keep - 1];
        keep -= 1;
    }
    (keep, tail / total)
}

/// Factors `theta ~ left right`, the factor on the side the centre leaves
/// orthonormal, with the normalised kept Schmidt values and discarded weight.
type Split = (Array2<f64>, Array2<f64>, Vec<f64>, f64);

struct Sweeper<'a> {
    ops: Vec<SiteOp>,
    mps: Mps,
    left: Vec<Option<Env>>,
    right: Vec<Option<Env>>,
    cfg: SweepConfig,
    lanczos: LanczosConfig,
    _mpo: &'a Mpo,
}

impl Sweeper<'_> {
    fn split(&self, theta: &Array2<f64>, rightward: bool) -> Result<Split> {
        let (u, sv, vt) = svd(theta)?;
        let (k, discarded) = truncation_rank(&sv, self.cfg.chi_max, self.cfg.svd_cutoff);
        let norm = sv[..k].iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = Array1::from_iter(sv[..k].iter().map(|x| x / norm));
        let (u, vt) = (u.slice(s![.., ..k]).to_owned(), vt.slice(s![..k, ..]).to_owned());
        Ok(if rightward {
            (u, Array2::from_diag(&s).dot(&vt), s.to_vec(), discarded)
        } else {
            (u.dot(&Array2::from_diag(&s)), vt, s.to_vec(), discarded)
        })
    }

    /// As [`Self::split`], but the kept basis diagonalises the perturbed
    /// density matrix `rho + mixing P P^T / tr(P P^T)`, where `P` is the
    /// two-site state with one environment block applied.
    fn split_mixed(&self, theta: &Array2<f64>, noise: &Array2<f64>, mixing: f64, rightward: bool) -> Result<Split> {
        let (rho, pert) = if rightward { (theta.dot(&theta.t()), noise.dot(&noise.t())) } else { (theta.t().dot(theta), noise.t().dot(noise)) };
        let tr = pert.diag().sum();
        let rho = if tr > 0.0 { rho + pert * (mixing / tr) } else { rho };
        let (vals, vecs) = rho.eigh(UPLO::Lower)?;
        let order: Vec<usize> = (0..vals.len()).rev().collect();
        let weights: Vec<f64> = order.iter().map(|&j| vals[j].max(0.0).sqrt()).collect();
        let (k, discarded) = truncation_rank(&weights, self.cfg.chi_max, self.cfg.svd_cutoff);
        let basis = vecs.select(Axis(1), &order[..k]);
        let projected = if rightward { basis.t().dot(theta) } else { theta.dot(&basis) };
        let n = projected.iter().map(|x| x * x).sum::<f64>().sqrt();
        let projected = projected / n;
        let (_, sv, _) = svd(&projected)?;
        Ok(if rightward { (basis, projected, sv, discarded) } else { (projected, basis.t().to_owned(), sv, discarded) })
    }

    /// Optimise sites `i, i + 1` and move the centre to `i + 1` (`rightward`)
    /// or `i`. Returns the energy and discarded weight.
    fn step(&mut self, i: usize, rightward: bool, mixing: f64) -> Result<(f64, f64)> {
        let (dl, _, dm) = self.mps.tensors[i].dim();
        let (_, _, dr) = self.mps.tensors[i + 1].dim();
        let theta = self.mps.tensors[i]
            .view()
            .into_shape_with_order((dl * 2, dm))
            .expect("contiguous")
            .dot(&self.mps.tensors[i + 1].view().into_shape_with_order((dm, 2 * dr)).expect("contiguous"));
        let left = self.left[i].as_ref().expect("left environment");
        let right = self.right[i + 2].as_ref().expect("right environment");
        let op = TwoSite::new(left, &self.ops[i], &self.ops[i + 1], right, dl, dr);
        let v0: Vec<f64> = theta.iter().copied().collect();
        // an unconverged local solve still lowers the energy; the sweeps continue from it
        let (pair, _) = lowest_eigenpair_best_effort(|x, y| op.apply(x, y), &v0, &self.lanczos)?;
        let theta = Array2::from_shape_vec((dl * 2, 2 * dr), pair.vector).expect("theta shape");
        let (l, r, sv, discarded) = if mixing > 0.0 {
            let noise = if rightward { op.left_expand(&theta) } else { op.right_expand(&theta) };
            self.split_mixed(&theta, &noise, mixing, rightward)?
        } else {
            self.split(&theta, rightward)?
        };
        let k = l.ncols();
        self.mps.tensors[i] = l.as_standard_layout().into_owned().into_shape_with_order((dl, 2, k)).expect("contiguous");
        self.mps.tensors[i + 1] = r.as_standard_layout().into_owned().into_shape_with_order((k, 2, dr)).expect("contiguous");
        if rightward {
            self.mps.center = i + 1;
            let env = grow_left(self.left[i].as_ref().expect("left environment"), &self.mps.tensors[i], &self.ops[i]);
            self.left[i + 1] = Some(env);
            self.right[i + 1] = None;
        } else {
            self.mps.center = i;
            let env = grow_right(self.right[i + 2].as_ref().expect("right environment"), &self.mps.tensors[i + 1], &self.ops[i + 1]);
            self.right[i + 1] = Some(env);
            self.left[i + 1] = None;
        }
        self.mps.singular_values[i] = sv;
        Ok((pair.value, discarded))
    }
}

/// Ground state of `mpo` from a random start seeded by `seed`.
pub fn dmrg_ground(mpo: &Mpo, cfg: &SweepConfig, seed: u64) -> Result<DmrgResult> {
    let l = mpo.len();
    if l < 4 {
        return Err(Error::InvalidParameter(format!("DMRG needs at least 4 sites (got {l})")));
    }
    if cfg.chi_max == 0 {
        return Err(Error::InvalidParameter("chi_max must be positive".into()));
    }
    let mps = Mps::random(l, cfg.init_chi.min(cfg.chi_max), seed)?;
    let mut sw = Sweeper {
        ops: mpo.tensors.iter().map(SiteOp::new).collect(),
        mps,
        left: vec![None; l + 1],
        right: vec![None; l + 1],
        cfg: *cfg,
        lanczos: LanczosConfig { krylov_dim: 30, tol: cfg.lanczos_tol, max_restarts: 20 },
        _mpo: mpo,
    };
    sw.left[0] = Some(unit_env());
    sw.right[l] = Some(unit_env());
    for i in (2..l).rev() {
        let env = grow_right(sw.right[i + 1].as_ref().expect("right environment"), &sw.mps.tensors[i], &sw.ops[i]);
        sw.right[i] = Some(env);
    }
    let mut energies = Vec::new();
    let mut previous = f64::INFINITY;
    for sweep in 0..cfg.max_sweeps {
        let mixing = if sweep < cfg.mixing_sweeps { cfg.mixing } else { 0.0 };
        let mut truncation = 0.0f64;
        let mut e = 0.0;
        for i in 0..l - 1 {
            let (ei, d) = sw.step(i, true, mixing)?;
            e = ei;
            truncation = truncation.max(d);
        }
        energies.push(e);
        for i in (0..l - 1).rev() {
            let (ei, d) = sw.step(i, false, mixing)?;
            e = ei;
            truncation = truncation.max(d);
        }
        energies.push(e);
        if mixing == 0.0 && (previous - e).abs() < cfg.energy_tol {
            return Ok(DmrgResult { energy: e, mps: sw.mps, half_sweep_energies: energies, truncation, seed });
        }
        previous = e;
    }
    let n = energies.len();
    Err(Error::NotConverged(format!(
        "DMRG after {} sweeps: last sweep changed the energy by {:e}",
        cfg.max_sweeps,
        energies[n - 1] - energies[n.saturating_sub(3)]
    )))
}

/// Run one DMRG per seed and keep the lowest energy. Also returns every
/// seed's energy, which differ noticeably near level crossings.
pub fn dmrg_ground_seeds(mpo: &Mpo, cfg: &SweepConfig, seeds: &[u64]) -> Result<(DmrgResult, Vec<f64>)> {
    let mut best: Option<DmrgResult> = None;
    let mut all = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let r = dmrg_ground(mpo, cfg, seed)?;
        all.push(r.energy);
        if best.as_ref().is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    best.map(|b| (b, all)).ok_or_else(|| Error::InvalidParameter("no seeds given".into()))
}

/// `<psi|H|psi> / <psi|psi>`.
pub fn expectation(mpo: &Mpo, mps: &Mps) -> f64 {
    let mut env = unit_env();
    for (a, w) in mps.tensors.iter().zip(&mpo.tensors) {
        env = grow_left(&env, a, &SiteOp::new(w));
    }
    env[0][[0, 0]] / mps.norm().powi(2)
}
