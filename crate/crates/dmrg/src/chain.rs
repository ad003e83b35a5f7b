//! The two-sublattice chain Hamiltonian as operator strings.

use spinchain::realspace::exchange_bonds;
use spinchain::{Error, GeneralCouplings, Result};

use crate::mpo::{compile_mpo, Mpo};
use crate::operator::{LocalOp, OperatorString};

/// `-J (S^x S^z.. S^x + S^y S^z.. S^y)` for every open-chain bond and
/// `-field mu_s S^z` on every site.
pub fn chain_strings(g: &GeneralCouplings, cells: usize) -> Vec<OperatorString> {
    let mut out = Vec::new();
    for bond in exchange_bonds(g, cells, false) {
        let last = bond.sites.len() - 1;
        for end in [LocalOp::Sx, LocalOp::Sy] {
            let factors = bond.sites.iter().enumerate().map(|(i, &s)| (s, if i == 0 || i == last { end } else { LocalOp::Sz })).collect();
            out.push(OperatorString::new(-bond.coupling, factors));
        }
    }
    for site in 0..2 * cells {
        let mu = if site % 2 == 0 { g.mu1 } else { g.mu2 };
        if g.field * mu != 0.0 {
            out.push(OperatorString::new(-g.field * mu, vec![(site, LocalOp::Sz)]));
        }
    }
    out
}

pub fn chain_mpo(g: &GeneralCouplings, cells: usize) -> Result<Mpo> {
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("DMRG chain needs at least 2 cells (got {cells})")));
    }
    compile_mpo(&chain_strings(g, cells), 2 * cells)
}
