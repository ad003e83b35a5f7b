//! Matrix product operators compiled from operator strings by a finite-state
//! automaton.
//!
//! On every bond the automaton state is either "nothing placed yet" (0),
//! "term complete" (1), or a partially placed term identified by its factors so
//! far. Terms sharing a prefix share the state.

use std::collections::{HashMap, HashSet};

use ndarray::{Array2, Array4};
use spinchain::{Error, Result};

use crate::operator::{merge, OperatorString, RealOp, IDENTITY};

/// Longest string the compiler accepts.
pub const MAX_SPAN: usize = 4;

/// Site tensors `W[w_left, s_out, s_in, w_right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mpo {
    pub tensors: Vec<Array4<f64>>,
}

impl Mpo {
    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Dimensions of the `len - 1` inner bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.len().saturating_sub(1)].iter().map(|w| w.shape()[3]).collect()
    }

    /// Full matrix in the basis with site 0 most significant and local index
    /// `0 = up`.
    pub fn to_dense(&self) -> Result<Array2<f64>> {
        if self.len() > 14 {
            return Err(Error::SizeCap { spins: self.len(), max: 14 });
        }
        // acc[(out, in), w]
        let mut acc = Array2::<f64>::ones((1, 1));
        let mut dim = 1usize;
        for w in &self.tensors {
            let (wl, wr) = (w.shape()[0], w.shape()[3]);
            let mut next = Array2::<f64>::zeros((dim * 2 * dim * 2, wr));
            for o in 0..dim {
                for i in 0..dim {
                    let row = acc.row(o * dim + i);
                    for so in 0..2 {
                        for si in 0..2 {
                            let idx = (o * 2 + so) * (dim * 2) + (i * 2 + si);
                            for a in 0..wl {
                                let x = row[a];
                                if x == 0.0 {
                                    continue;
                                }
                                for b in 0..wr {
                                    next[[idx, b]] += x * w[[a, so, si, b]];
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            dim *= 2;
        }
        Ok(acc.into_shape_with_order((dim, dim)).map_err(|e| Error::Linalg(e.to_string()))?)
    }
}

type Prefix = Vec<(usize, RealOp)>;

pub fn compile_mpo(strings: &[OperatorString], sites: usize) -> Result<Mpo> {
    if sites == 0 {
        return Err(Error::InvalidParameter("MPO needs at least one site".into()));
    }
    let terms = merge(strings)?;
    let mut states: Vec<HashMap<Prefix, usize>> = vec![HashMap::new(); sites.saturating_sub(1)];
    // (site, left, right, op, coefficient, final)
    let mut moves: Vec<(usize, usize, usize, Option<RealOp>, f64, bool)> = Vec::new();
    for t in &terms {
        let (first, last) = match (t.factors.first(), t.factors.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => continue,
        };
        if last >= sites {
            return Err(Error::InvalidParameter(format!("operator on site {last} of a {sites}-site chain")));
        }
        if t.span() > MAX_SPAN {
            return Err(Error::Unsupported(format!("string spans {} sites (max {MAX_SPAN})", t.span())));
        }
        let mut placed: Prefix = Vec::new();
        let mut left = 0;
        for x in first..=last {
            let op = t.factors.iter().find(|f| f.0 == x).map(|f| f.1);
            if let Some(o) = op {
                placed.push((x, o));
            }
            if x == last {
                moves.push((x, left, 1, op, t.coefficient, true));
            } else {
                let map = &mut states[x];
                let n = map.len();
                let right = *map.entry(placed.clone()).or_insert(n + 2);
                moves.push((x, left, right, op, 1.0, false));
                left = right;
            }
        }
    }
    let dims: Vec<usize> = states.iter().map(|m| m.len() + 2).collect();
    let mut tensors: Vec<Array4<f64>> = (0..sites)
        .map(|x| {
            let wl = if x == 0 { 2 } else { dims[x - 1] };
            let wr = if x + 1 == sites { 2 } else { dims[x] };
            let mut w = Array4::<f64>::zeros((wl, 2, 2, wr));
            for s in 0..2 {
                w[[0, s, s, 0]] = 1.0;
                w[[1, s, s, 1]] = 1.0;
            }
            w
        })
        .collect();
    let mut seen = HashSet::new();
    for (x, l, r, op, c, last) in moves {
        if !last && !seen.insert((x, l, r)) {
            continue;
        }
        let m = op.map_or(IDENTITY, RealOp::matrix);
        for so in 0..2 {
            for si in 0..2 {
                tensors[x][[l, so, si, r]] += c * m[so][si];
            }
        }
    }
    // open ends: start in state 0, finish in state 1
    tensors[0] = tensors[0].slice(ndarray::s![0..1, .., .., ..]).to_owned();
    let last = sites - 1;
    tensors[last] = tensors[last].slice(ndarray::s![.., .., .., 1..2]).to_owned();
    Ok(Mpo { tensors })
}
