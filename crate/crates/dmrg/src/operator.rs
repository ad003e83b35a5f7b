//! Products of single-site spin operators and their rewrite into real
//! ladder-operator form.

use std::collections::BTreeMap;

use spinchain::{Error, Result};

/// Single-site spin-1/2 operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalOp {
    Id,
    Sx,
    Sy,
    Sz,
    Sp,
    Sm,
}

impl LocalOp {
    pub fn from_label(label: &str) -> Result<Self> {
        Ok(match label {
            "Id" | "I" => LocalOp::Id,
            "Sx" => LocalOp::Sx,
            "Sy" => LocalOp::Sy,
            "Sz" => LocalOp::Sz,
            "S+" | "Sp" => LocalOp::Sp,
            "S-" | "Sm" => LocalOp::Sm,
            other => return Err(Error::Unsupported(format!("operator label {other:?}"))),
        })
    }
}

/// Operator with real matrix elements in the `(up, down)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RealOp {
    Sz,
    Sp,
    Sm,
}

impl RealOp {
    /// `m[out][in]`.
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            RealOp::Sz => [[0.5, 0.0], [0.0, -0.5]],
            RealOp::Sp => [[0.0, 1.0], [0.0, 0.0]],
            RealOp::Sm => [[0.0, 0.0], [1.0, 0.0]],
        }
    }
}

pub const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// `coefficient * prod_i op_i(site_i)` on distinct sites.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorString {
    pub coefficient: f64,
    pub factors: Vec<(usize, LocalOp)>,
}

/// Real term on strictly increasing sites.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTerm {
    pub coefficient: f64,
    pub factors: Vec<(usize, RealOp)>,
}

impl RealTerm {
    pub fn span(&self) -> usize {
        match (self.factors.first(), self.factors.last()) {
            (Some(a), Some(b)) => b.0 - a.0 + 1,
            _ => 0,
        }
    }
}

impl OperatorString {
    pub fn new(coefficient: f64, factors: Vec<(usize, LocalOp)>) -> Self {
        OperatorString { coefficient, factors }
    }

    /// Expand `Sx = (S+ + S-)/2` and `Sy = (S+ - S-)/(2i)`. The result is real
    /// only for an even number of `Sy`; an odd count is rejected.
    pub fn rewrite(&self) -> Result<Vec<RealTerm>> {
        let mut factors: Vec<(usize, LocalOp)> = self.factors.iter().copied().filter(|f| f.1 != LocalOp::Id).collect();
        factors.sort_by_key(|f| f.0);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("operator string repeats a site".into()));
        }
        let ny = factors.iter().filter(|f| f.1 == LocalOp::Sy).count();
        if ny % 2 == 1 {
            return Err(Error::Unsupported("odd number of Sy factors gives an imaginary string".into()));
        }
        // (-i)^ny with ny even
        let phase = if (ny / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut terms = vec![RealTerm { coefficient: self.coefficient * phase, factors: Vec::with_capacity(factors.len()) }];
        for &(site, op) in &factors {
            let options: &[(RealOp, f64)] = match op {
                LocalOp::Sz => &[(RealOp::Sz, 1.0)],
                LocalOp::Sp => &[(RealOp::Sp, 1.0)],
                LocalOp::Sm => &[(RealOp::Sm, 1.0)],
                LocalOp::Sx => &[(RealOp::Sp, 0.5), (RealOp::Sm, 0.5)],
                LocalOp::Sy => &[(RealOp::Sp, 0.5), (RealOp::Sm, -0.5)],
                LocalOp::Id => unreachable!("identities were removed"),
            };
            terms = terms
                .into_iter()
                .flat_map(|t| {
                    options.iter().map(move |&(r, c)| {
                        let mut f = t.factors.clone();
                        f.push((site, r));
                        RealTerm { coefficient: t.coefficient * c, factors: f }
                    })
                })
                .collect();
        }
        Ok(terms)
    }
}

/// Rewrite all strings and sum terms with identical factors, dropping those
/// that cancel.
pub fn merge(strings: &[OperatorString]) -> Result<Vec<RealTerm>> {
    let mut acc: BTreeMap<Vec<(usize, RealOp)>, f64> = BTreeMap::new();
    let mut scale = 0.0f64;
    for s in strings {
        for t in s.rewrite()? {
            scale = scale.max(t.coefficient.abs());
            *acc.entry(t.factors).or_insert(0.0) += t.coefficient;
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| c.abs() > 1e-14 * scale)
        .map(|(factors, coefficient)| RealTerm { coefficient, factors })
        .collect())
}
