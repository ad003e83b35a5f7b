//! Open-boundary matrix product states in mixed canonical form.

use ndarray::{s, Array2, Array3, Axis};
use ndarray_linalg::SVDDC;
use ndarray_linalg::JobSvd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinchain::{Error, Result};

/// Site tensors `A[left, s, right]` with a single orthogonality centre: sites
/// left of `center` are left-orthonormal, sites right of it right-orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct Mps {
    pub tensors: Vec<Array3<f64>>,
    pub center: usize,
    /// Schmidt values recorded on each of the `len - 1` bonds by the last
    /// decomposition that touched it.
    pub singular_values: Vec<Vec<f64>>,
}

/// Thin SVD `m = u diag(s) vt` with singular values in descending order.
pub(crate) fn svd(m: &Array2<f64>) -> Result<(Array2<f64>, Vec<f64>, Array2<f64>)> {
    let (u, s, vt) = m.svddc(JobSvd::Some)?;
    match (u, vt) {
        (Some(u), Some(vt)) => Ok((u, s.to_vec(), vt)),
        _ => Err(Error::Linalg("SVD returned no singular vectors".into())),
    }
}

pub(crate) fn entropy_of(sv: &[f64]) -> f64 {
    let norm: f64 = sv.iter().map(|x| x * x).sum();
    sv.iter()
        .map(|x| x * x / norm)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum()
}

fn reshape3(m: Array2<f64>, shape: (usize, usize, usize)) -> Array3<f64> {
    m.as_standard_layout().into_owned().into_shape_with_order(shape).expect("contiguous")
}

fn reshape2(t: &Array3<f64>, shape: (usize, usize)) -> Array2<f64> {
    t.as_standard_layout().into_owned().into_shape_with_order(shape).expect("contiguous")
}

impl Mps {
    /// Random state of bond dimension at most `chi`, right-canonical with the
    /// centre on site 0.
    pub fn random(sites: usize, chi: usize, seed: u64) -> Result<Self> {
        if sites < 2 || chi == 0 {
            return Err(Error::InvalidParameter(format!("random MPS needs >= 2 sites and chi > 0 (got {sites}, {chi})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = |b: usize| -> usize {
            // bond b sits left of site b
            let edge = b.min(sites - b).min(30) as u32;
            (1usize << edge).min(chi)
        };
        let tensors = (0..sites)
            .map(|i| Array3::from_shape_fn((dim(i), 2, dim(i + 1)), |_| rng.random_range(-1.0..1.0)))
            .collect();
        let mut mps = Mps { tensors, center: sites - 1, singular_values: vec![Vec::new(); sites - 1] };
        mps.move_center(0)?;
        let n = mps.tensors[0].iter().map(|x| x * x).sum::<f64>().sqrt();
        mps.tensors[0].mapv_inplace(|x| x / n);
        Ok(mps)
    }

    /// Product state; `states[i] = 0` is spin up.
    pub fn product(states: &[usize]) -> Result<Self> {
        if states.len() < 2 || states.iter().any(|&s| s > 1) {
            return Err(Error::InvalidParameter("product state needs >= 2 sites with local index 0 or 1".into()));
        }
        let tensors = states
            .iter()
            .map(|&s| {
                let mut a = Array3::zeros((1, 2, 1));
                a[[0, s, 0]] = 1.0;
                a
            })
            .collect();
        Ok(Mps { tensors, center: 0, singular_values: vec![vec![1.0]; states.len() - 1] })
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.len() - 1].iter().map(|a| a.shape()[2]).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Shift the orthogonality centre without truncation.
    pub fn move_center(&mut self, to: usize) -> Result<()> {
        if to >= self.len() {
            return Err(Error::InvalidParameter(format!("centre {to} outside a {}-site state", self.len())));
        }
        while self.center < to {
            let i = self.center;
            let (dl, _, dr) = self.tensors[i].dim();
            let (u, sv, vt) = svd(&reshape2(&self.tensors[i], (dl * 2, dr)))?;
            let k = sv.len();
            self.tensors[i] = reshape3(u, (dl, 2, k));
            let carry = Array2::from_diag(&ndarray::Array1::from(sv.clone())).dot(&vt);
            let next = &self.tensors[i + 1];
            let (_, _, dr2) = next.dim();
            let merged = carry.dot(&reshape2(next, (dr, 2 * dr2)));
            self.tensors[i + 1] = reshape3(merged, (k, 2, dr2));
            self.singular_values[i] = sv;
            self.center += 1;
        }
        while self.center > to {
            let i = self.center;
            let (dl, _, dr) = self.tensors[i].dim();
            let (u, sv, vt) = svd(&reshape2(&self.tensors[i], (dl, 2 * dr)))?;
            let k = sv.len();
            self.tensors[i] = reshape3(vt, (k, 2, dr));
            let carry = u.dot(&Array2::from_diag(&ndarray::Array1::from(sv.clone())));
            let prev = &self.tensors[i - 1];
            let (dl0, _, _) = prev.dim();
            let merged = reshape2(prev, (dl0 * 2, dl)).dot(&carry);
            self.tensors[i - 1] = reshape3(merged, (dl0, 2, k));
            self.singular_values[i - 1] = sv;
            self.center -= 1;
        }
        Ok(())
    }

    /// Exact Schmidt values across bond `bond` (between sites `bond` and
    /// `bond + 1`), normalised to unit total weight.
    pub fn schmidt_values(&self, bond: usize) -> Result<Vec<f64>> {
        if bond + 1 >= self.len() {
            return Err(Error::InvalidParameter(format!("bond {bond} outside a {}-site state", self.len())));
        }
        let mut m = self.clone();
        m.move_center(bond)?;
        let (dl, _, dr) = m.tensors[bond].dim();
        let (_, sv, _) = svd(&reshape2(&m.tensors[bond], (dl * 2, dr)))?;
        let norm = sv.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(sv.into_iter().map(|x| x / norm).collect())
    }

    /// Von Neumann entropy (natural log) across `bond`.
    pub fn entropy(&self, bond: usize) -> Result<f64> {
        Ok(entropy_of(&self.schmidt_values(bond)?))
    }

    /// Entropy of the left half of the chain.
    pub fn ee_center(&self) -> Result<f64> {
        self.entropy(self.len() / 2 - 1)
    }

    pub fn norm(&self) -> f64 {
        self.tensors[self.center].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest deviation of `A^T A` (left of the centre) and `B B^T` (right of
    /// it) from the identity.
    pub fn canonical_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.tensors.iter().enumerate() {
            let (dl, _, dr) = a.dim();
            let gram = if i < self.center {
                let m = reshape2(a, (dl * 2, dr));
                m.t().dot(&m)
            } else if i > self.center {
                let m = reshape2(a, (dl, 2 * dr));
                m.dot(&m.t())
            } else {
                continue;
            };
            for ((r, c), x) in gram.indexed_iter() {
                worst = worst.max((x - if r == c { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// Dense amplitudes with site 0 most significant (small chains only).
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.len() > 24 {
            return Err(Error::SizeCap { spins: self.len(), max: 24 });
        }
        let mut acc = Array2::<f64>::ones((1, 1));
        for a in &self.tensors {
            let (dl, _, dr) = a.dim();
            let rows = acc.nrows();
            let next = acc.dot(&reshape2(a, (dl, 2 * dr)));
            acc = next.into_shape_with_order((rows * 2, dr)).expect("contiguous");
        }
        Ok(acc.index_axis(Axis(1), 0).to_vec())
    }

    /// Expectation of `S^z` on every site.
    pub fn sz_profile(&self) -> Result<Vec<f64>> {
        let mut m = self.clone();
        (0..self.len())
            .map(|i| {
                m.move_center(i)?;
                let a = &m.tensors[i];
                let up: f64 = a.slice(s![.., 0, ..]).iter().map(|x| x * x).sum();
                let down: f64 = a.slice(s![.., 1, ..]).iter().map(|x| x * x).sum();
                Ok(0.5 * (up - down) / (up + down))
            })
            .collect()
    }
}
