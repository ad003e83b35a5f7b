use crate::error::{Error, Result};

/// Couplings of the full two-sublattice Hamiltonian.
///
/// `field` is the external field H; the Zeeman term of sublattice s is
/// `-field * mu_s * S^z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralCouplings {
    pub mu1: f64,
    pub mu2: f64,
    pub field: f64,
    pub j1: f64,
    pub j2: f64,
    pub j13: f64,
    pub j23: f64,
    pub j14: f64,
    pub j24: f64,
}

impl GeneralCouplings {
    /// Three-spin model: unit magnetons, `J13 = J23 = J3`, no four-spin terms.
    pub fn three_spin(field: f64, j1: f64, j2: f64, j3: f64) -> Self {
        GeneralCouplings {
            mu1: 1.0,
            mu2: 1.0,
            field,
            j1,
            j2,
            j13: j3,
            j23: j3,
            j14: 0.0,
            j24: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu1, self.mu2, self.field, self.j1, self.j2, self.j13, self.j23, self.j14,
            self.j24,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        if self.j24 != 0.0 {
            return Err(Error::Unsupported(format!("J24 = {} (only J24 = 0 is supported)", self.j24)));
        }
        Ok(())
    }

    /// Zeeman normalisation so that the saturated state has magnetisation 1 per cell.
    pub(crate) fn moment_norm(&self) -> f64 {
        let s = 0.5 * (self.mu1 + self.mu2);
        if s.abs() > 1e-300 {
            s
        } else {
            1.0
        }
    }
}

/// Working point `(h, J, J3)` of the reduced model on `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub h: f64,
    pub j: f64,
    pub j3: f64,
    pub n: usize,
}

impl ReducedParams {
    /// Point with the default `J = 1`.
    pub fn new(h: f64, j3: f64, n: usize) -> Self {
        ReducedParams { h, j: 1.0, j3, n }
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_j3(mut self, j3: f64) -> Self {
        self.j3 = j3;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.j.is_finite() && self.j3.is_finite()) {
            return Err(Error::InvalidParameter("h, J, J3 must be finite".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("cell count must be positive".into()));
        }
        if self.j == 0.0 {
            return Err(Error::DegenerateGap);
        }
        Ok(())
    }

    /// `mu1 = 3mu, mu2 = mu, mu H = h/2, J1 = 2J, J2 = -1, J13 = 5J3, J23 = J3, J14 = 4`,
    /// expressed with `mu = 1`.
    pub fn to_general(&self) -> GeneralCouplings {
        GeneralCouplings {
            mu1: 3.0,
            mu2: 1.0,
            field: 0.5 * self.h,
            j1: 2.0 * self.j,
            j2: -1.0,
            j13: 5.0 * self.j3,
            j23: self.j3,
            j14: 4.0,
            j24: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_mapping() {
        let g = ReducedParams::new(0.8, 0.3, 5).with_j(1.5).to_general();
        assert!((g.mu1 * g.field - 1.2).abs() < 1e-15);
        assert!((g.mu2 * g.field - 0.4).abs() < 1e-15);
        assert_eq!((g.j1, g.j2, g.j13, g.j23, g.j14, g.j24), (3.0, -1.0, 1.5, 0.3, 4.0, 0.0));
        assert_eq!(g.moment_norm(), 2.0);
    }

    #[test]
    fn rejects_j24_and_zero_j() {
        let mut g = GeneralCouplings::three_spin(0.0, 1.2, 0.8, 0.5);
        assert!(g.validate().is_ok());
        g.j24 = 0.1;
        assert!(matches!(g.validate(), Err(Error::Unsupported(_))));
        assert_eq!(ReducedParams::new(1.0, 0.0, 3).with_j(0.0).validate(), Err(Error::DegenerateGap));
        assert!(ReducedParams::new(f64::NAN, 0.0, 3).validate().is_err());
    }
}
