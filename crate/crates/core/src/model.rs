//! Two-band quasiparticle model: dispersion, critical lines and ground-state
//! structure of the reduced Hamiltonian.
//!
//! In momentum space each mode `k` carries a 2x2 block
//!
//! ```text
//! [ 3h/2 - 5J3/2 cos k     -(J + i sin k) ]
//! [ -(J - i sin k)         h/2 - J3/2 cos k ]
//! ```
//!
//! whose eigenvalues are `E_{1,2} = (h - 3J3/2 cos k) -/+ Lambda_k`. The
//! ground state fills every negative level. A mode is *active* when exactly
//! its lower level is filled; only active modes respond to changes of `h`
//! and `J3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric;
use crate::params::ReducedParams;

/// Levels with `|E|` below this are treated as empty and flagged.
pub const ZERO_ENERGY_TOL: f64 = 1e-12;

/// Periodic momentum grid `k = 2 pi lambda / N`.
///
/// For odd `N`, `lambda` runs over `-(N-1)/2 ..= (N-1)/2`; for even `N` the
/// range is `-(N/2 - 1) ..= N/2` so that `k = pi` is included once.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    n: usize,
    k: Vec<f64>,
}

impl ModeGrid {
    pub fn new(n: usize) -> Self {
        let lo = -(((n as i64) - 1) / 2);
        let hi = (n as i64) / 2;
        let k = (lo..=hi).map(|l| 2.0 * PI * l as f64 / n as f64).collect();
        ModeGrid { n, k }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Integer label of grid point `i`.
    pub fn lambda(&self, i: usize) -> i64 {
        i as i64 - ((self.n as i64) - 1) / 2
    }
}

/// Bogoliubov data of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiParticle {
    pub k: f64,
    pub lambda: f64,
    /// Bogoliubov angle in `[0, pi]`, `cos theta = (h/2 - J3 cos k) / Lambda`.
    pub theta: f64,
    pub u: f64,
    pub v: f64,
    /// `e^{-i phi} = (J - i sin k) / sqrt(J^2 + sin^2 k)`.
    pub phi: f64,
    pub e1: f64,
    pub e2: f64,
}

#[inline]
pub(crate) fn quasi(h: f64, j: f64, j3: f64, k: f64) -> QuasiParticle {
    let (s, c) = k.sin_cos();
    let a = 0.5 * h - j3 * c;
    let b = (j * j + s * s).sqrt();
    let lambda = a.hypot(b);
    let theta = b.atan2(a);
    let mid = h - 1.5 * j3 * c;
    QuasiParticle {
        k,
        lambda,
        theta,
        u: (0.5 * theta).cos(),
        v: (0.5 * theta).sin(),
        phi: s.atan2(j),
        e1: mid - lambda,
        e2: mid + lambda,
    }
}

/// Lower and upper branch energies at momentum `k`.
#[inline]
pub fn branch_energies(h: f64, j: f64, j3: f64, k: f64) -> (f64, f64) {
    let c = k.cos();
    let s = k.sin();
    let a = 0.5 * h - j3 * c;
    let lambda = (a * a + j * j + s * s).sqrt();
    let mid = h - 1.5 * j3 * c;
    (mid - lambda, mid + lambda)
}

/// Bogoliubov angle `theta_k`.
#[inline]
pub fn theta(h: f64, j: f64, j3: f64, k: f64) -> f64 {
    let b = (j * j + k.sin().powi(2)).sqrt();
    b.atan2(0.5 * h - j3 * k.cos())
}

/// Analytic `(d theta / d h, d theta / d J3)`.
#[inline]
pub fn theta_derivs(h: f64, j: f64, j3: f64, k: f64) -> (f64, f64) {
    let c = k.cos();
    let b2 = j * j + k.sin().powi(2);
    let a = 0.5 * h - j3 * c;
    let l2 = a * a + b2;
    let b = b2.sqrt();
    (-0.5 * b / l2, b * c / l2)
}

pub fn dispersion(p: &ReducedParams, k: f64) -> Result<QuasiParticle> {
    p.validate()?;
    if !(-PI..=PI).contains(&k) {
        return Err(Error::InvalidParameter(format!("momentum {k} outside [-pi, pi]")));
    }
    Ok(quasi(p.h, p.j, p.j3, k))
}

/// Critical lines of the three-spin model (no four-spin term).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeSpinLines {
    pub hc1: f64,
    pub hc2: f64,
    pub hs: f64,
    /// `J3` where the zero-field first-order line starts, `J1 - J2`.
    pub first_order_onset: f64,
    /// `J3` where `Hc2` meets the zero-field line, `J1 + J2`.
    pub intersection: f64,
}

/// Band-edge lines of the three-spin model with unit magnetons.
///
/// With `J1 = 2, J2 = 1` these are `Hc1 = (1 - J3)/2`, `Hc2 = (J3 - 3)/2`,
/// `Hs = (J3 + 3)/2`.
pub fn three_spin_lines(j1: f64, j2: f64, j3: f64) -> ThreeSpinLines {
    ThreeSpinLines {
        hc1: 0.5 * (j1 - j2 - j3),
        hc2: 0.5 * (j3 - j1 - j2),
        hs: 0.5 * (j3 + j1 + j2),
        first_order_onset: j1 - j2,
        intersection: j1 + j2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLines {
    pub j: f64,
    pub j3: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h13: f64,
    /// Momentum maximising the lower-branch zero field.
    pub k_m: f64,
    /// Whether `k_m` came from the closed form (false: numerical maximisation).
    pub k_m_closed_form: bool,
    /// Lines of the three-spin model at the same `J3` (with `J1 = 2, J2 = 1`).
    pub three_spin: ThreeSpinLines,
}

/// Field at which the lower branch vanishes at momentum `k`.
pub fn lower_zero_field(j: f64, j3: f64, k: f64) -> f64 {
    let (s, c) = k.sin_cos();
    (4.0 * j3 * c + (j3 * j3 * c * c + 12.0 * j * j + 12.0 * s * s).sqrt()) / 3.0
}

/// Closed-form `|k_m|`; `None` when the radicands leave the real domain.
///
/// The expression is written for `J = 1` in its `(J^2 + 1)` factor.
pub fn k_m_closed_form(j: f64, j3: f64) -> Option<f64> {
    let j2 = j * j;
    let t2 = j3 * j3;
    let t4 = t2 * t2;
    let a = -64.0 * j2 * t2 + 5.0 * t4 - 120.0 * t2 - 48.0;
    let inner = (j2 + 1.0) * (56.0 * t4 + 48.0 * t2 - 5.0 * t4 * t2);
    if inner < 0.0 {
        return None;
    }
    let b = 16.0 * inner.sqrt();
    let c = 64.0 * j2 * t2 + 5.0 * t4 + 8.0 * t2 - 48.0;
    let ratio = (a + b) / c;
    if !ratio.is_finite() || ratio < 0.0 {
        return None;
    }
    Some((2.0 * ratio.sqrt().atan()).abs())
}

/// `J3` at which `h13` meets `h1` tangentially (curvature of the zero-field
/// curve at `k = 0` vanishes): root of `15 t^2 + (192 J^2 + 24) t - 144 = 0`
/// in `t = J3^2`.
pub fn h13_tangency(j: f64) -> f64 {
    let b = 192.0 * j * j + 24.0;
    let t = (-b + (b * b + 4.0 * 15.0 * 144.0).sqrt()) / 30.0;
    t.sqrt()
}

pub fn critical_fields(j: f64, j3: f64) -> Result<CriticalLines> {
    if !(j.is_finite() && j3.is_finite()) {
        return Err(Error::InvalidParameter("J and J3 must be finite".into()));
    }
    if j == 0.0 {
        return Err(Error::DegenerateGap);
    }
    if j3 < 0.0 {
        return Err(Error::InvalidParameter(format!("J3 = {j3} must be non-negative")));
    }
    let r = (12.0 * j * j + j3 * j3).sqrt();
    let h1 = (r + 4.0 * j3) / 3.0;
    let h2 = (4.0 * j3 - r) / 3.0;
    let h3 = (r - 4.0 * j3) / 3.0;

    let (k_m, closed) = match k_m_closed_form(j, j3).filter(|_| (j.abs() - 1.0).abs() < 1e-15) {
        Some(k) => (k, true),
        None => (numeric::golden_max(|k| lower_zero_field(j, j3, k), 0.0, PI, 1e-10), false),
    };
    let mut h13 = lower_zero_field(j, j3, k_m);
    // the maximiser can sit on the boundary k = 0 (h13 = h1)
    h13 = h13.max(h1);
    Ok(CriticalLines {
        j,
        j3,
        h1,
        h2,
        h3,
        h13,
        k_m,
        k_m_closed_form: closed,
        three_spin: three_spin_lines(2.0, 1.0, j3),
    })
}

/// Roots of `E_1 E_2 = 0` in `cos k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalMomenta {
    /// `arccos` of the smaller root; `None` if it falls outside `[-1, 1]`.
    pub kc1: Option<f64>,
    /// `arccos` of the larger root; `None` if it falls outside `[-1, 1]`.
    pub kc2: Option<f64>,
    pub radicand: f64,
}

fn cos_roots(h: f64, j: f64, j3: f64) -> (f64, f64, f64) {
    let den = 5.0 * j3 * j3 + 4.0;
    let rad = h * h * j3 * j3 - 12.0 * h * h + 20.0 * j * j * j3 * j3 + 16.0 * j * j + 20.0 * j3 * j3 + 16.0;
    let sq = rad.max(0.0).sqrt();
    ((4.0 * h * j3 - sq) / den, (4.0 * h * j3 + sq) / den, rad)
}

pub fn critical_momenta(p: &ReducedParams) -> Result<CriticalMomenta> {
    p.validate()?;
    let (lo, hi, rad) = cos_roots(p.h, p.j, p.j3);
    if rad < 0.0 {
        return Err(Error::NoGaplessPoints { radicand: rad });
    }
    let ac = |c: f64| if (-1.0..=1.0).contains(&c) { Some(c.acos()) } else { None };
    Ok(CriticalMomenta { kc1: ac(lo), kc2: ac(hi), radicand: rad })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
        };
        f.write_str(s)
    }
}

/// Continuum filling pattern on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filling {
    /// Intervals of `[0, pi]` where `E_1 < 0`.
    pub lower: Vec<(f64, f64)>,
    /// Intervals of `[0, pi]` where `E_2 < 0`.
    pub upper: Vec<(f64, f64)>,
}

impl Filling {
    pub fn region(&self) -> Region {
        let full = |iv: &[(f64, f64)]| iv.len() == 1 && iv[0].0 == 0.0 && iv[0].1 == PI;
        if !self.upper.is_empty() {
            return Region::IV;
        }
        match self.lower.as_slice() {
            [] => Region::V,
            iv if full(iv) => Region::I,
            [(a, b)] if *a > 0.0 && *b < PI => Region::III,
            _ => Region::II,
        }
    }

    /// Active intervals: lower level filled, upper empty.
    pub fn active(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(a, b) in &self.lower {
            let mut segs = vec![(a, b)];
            for &(c, d) in &self.upper {
                segs = segs
                    .into_iter()
                    .flat_map(|(x, y)| {
                        let mut v = Vec::new();
                        if c > x {
                            v.push((x, c.min(y)));
                        }
                        if d < y {
                            v.push((d.max(x), y));
                        }
                        v
                    })
                    .filter(|(x, y)| y > x)
                    .collect();
            }
            out.extend(segs);
        }
        out
    }
}

/// Sign structure of both branches over `[0, pi]`.
pub fn filling(h: f64, j: f64, j3: f64) -> Filling {
    let (lo, hi, rad) = cos_roots(h, j, j3);
    let mut cuts = vec![0.0, PI];
    if rad > 0.0 {
        for c in [lo, hi] {
            if c > -1.0 && c < 1.0 {
                cuts.push(c.acos());
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lower: Vec<(f64, f64)> = Vec::new();
    let mut upper: Vec<(f64, f64)> = Vec::new();
    let push = |set: &mut Vec<(f64, f64)>, a: f64, b: f64| match set.last_mut() {
        Some(last) if last.1 == a => last.1 = b,
        _ => set.push((a, b)),
    };
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (e1, e2) = branch_energies(h, j, j3, 0.5 * (a + b));
        if e1 < 0.0 {
            push(&mut lower, a, b);
        }
        if e2 < 0.0 {
            push(&mut upper, a, b);
        }
    }
    Filling { lower, upper }
}

pub fn region_of(h: f64, j: f64, j3: f64) -> Region {
    filling(h, j, j3).region()
}

/// Phase label and grid occupation of a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub region: Region,
    /// Grid indices with `E_1 < 0`.
    pub occupied1: Vec<usize>,
    /// Grid indices with `E_2 < 0`.
    pub occupied2: Vec<usize>,
    /// Upper edge of the lower-branch filled interval.
    pub kc1: Option<f64>,
    /// Lower edge of the annulus (region III) or upper-branch Fermi momentum (region IV).
    pub kc2: Option<f64>,
    /// Grid indices with a level inside the zero-energy tolerance.
    pub boundary_modes: Vec<usize>,
}

impl PhasePoint {
    /// Grid indices with exactly the lower level filled.
    pub fn active(&self) -> Vec<usize> {
        self.occupied1.iter().copied().filter(|i| self.occupied2.binary_search(i).is_err()).collect()
    }

    pub fn lambda_c1(&self, n: usize) -> Option<f64> {
        self.kc1.map(|k| n as f64 * k / (2.0 * PI))
    }

    pub fn on_boundary(&self) -> bool {
        !self.boundary_modes.is_empty()
    }
}

/// Filling of each grid mode: `(lower filled, upper filled, on boundary)`.
pub(crate) fn grid_filling(h: f64, j: f64, j3: f64, k: f64) -> (bool, bool, bool) {
    let (e1, e2) = branch_energies(h, j, j3, k);
    let b = e1.abs() < ZERO_ENERGY_TOL || e2.abs() < ZERO_ENERGY_TOL;
    (e1 < -ZERO_ENERGY_TOL, e2 < -ZERO_ENERGY_TOL, b)
}

/// Momenta of the active modes on the `N`-point grid.
pub fn active_momenta(h: f64, j: f64, j3: f64, n: usize) -> Vec<f64> {
    ModeGrid::new(n)
        .k()
        .iter()
        .copied()
        .filter(|&k| {
            let (a, b, _) = grid_filling(h, j, j3, k);
            a && !b
        })
        .collect()
}

pub fn classify(p: &ReducedParams) -> Result<PhasePoint> {
    p.validate()?;
    let fill = filling(p.h, p.j, p.j3);
    let region = fill.region();
    let grid = ModeGrid::new(p.n);
    let mut occupied1 = Vec::new();
    let mut occupied2 = Vec::new();
    let mut boundary_modes = Vec::new();
    for (i, &k) in grid.k().iter().enumerate() {
        let (a, b, edge) = grid_filling(p.h, p.j, p.j3, k);
        if a {
            occupied1.push(i);
        }
        if b {
            occupied2.push(i);
        }
        if edge {
            boundary_modes.push(i);
        }
    }
    let (kc1, kc2) = match region {
        Region::I | Region::V => (None, None),
        Region::II => (fill.lower.first().map(|iv| if iv.0 == 0.0 { iv.1 } else { iv.0 }), None),
        Region::III => (Some(fill.lower[0].1), Some(fill.lower[0].0)),
        Region::IV => (
            fill.lower.first().map(|iv| iv.1).filter(|&b| b < PI),
            fill.upper.first().map(|iv| iv.1).filter(|&b| b < PI),
        ),
    };
    Ok(PhasePoint { region, occupied1, occupied2, kc1, kc2, boundary_modes })
}

/// `sum_{occupied} E + sum_{occupied} E - N h`.
pub fn ground_energy(p: &ReducedParams) -> Result<f64> {
    p.validate()?;
    let grid = ModeGrid::new(p.n);
    let filled: f64 = grid
        .k()
        .iter()
        .map(|&k| {
            let (e1, e2) = branch_energies(p.h, p.j, p.j3, k);
            let mut s = 0.0;
            if e1 < -ZERO_ENERGY_TOL {
                s += e1;
            }
            if e2 < -ZERO_ENERGY_TOL {
                s += e2;
            }
            s
        })
        .sum();
    Ok(filled - p.n as f64 * p.h)
}

#[inline]
fn de_dh(h: f64, j: f64, j3: f64, k: f64) -> (f64, f64) {
    let q = quasi(h, j, j3, k);
    let a = 0.5 * h - j3 * k.cos();
    let d = 0.5 * a / q.lambda;
    (1.0 - d, 1.0 + d)
}

/// Magnetisation per cell on the finite grid, `1 - (1/N) sum_occ dE/dh`.
pub fn magnetization(p: &ReducedParams) -> Result<f64> {
    p.validate()?;
    let grid = ModeGrid::new(p.n);
    let s: f64 = grid
        .k()
        .iter()
        .map(|&k| {
            let (a, b, _) = grid_filling(p.h, p.j, p.j3, k);
            let (d1, d2) = de_dh(p.h, p.j, p.j3, k);
            (if a { d1 } else { 0.0 }) + (if b { d2 } else { 0.0 })
        })
        .sum();
    Ok(1.0 - s / p.n as f64)
}

/// Thermodynamic-limit magnetisation per cell.
pub fn magnetization_thermo(h: f64, j: f64, j3: f64) -> Result<f64> {
    if j == 0.0 {
        return Err(Error::DegenerateGap);
    }
    let fill = filling(h, j, j3);
    let mut s = 0.0;
    for &(a, b) in &fill.lower {
        s += numeric::integrate(|k| de_dh(h, j, j3, k).0, a, b, 1e-12, 1e-14)?;
    }
    for &(a, b) in &fill.upper {
        s += numeric::integrate(|k| de_dh(h, j, j3, k).1, a, b, 1e-12, 1e-14)?;
    }
    // integrand is even in k
    Ok(1.0 - s / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dispersion_examples() {
        let q = dispersion(&ReducedParams::new(0.0, 0.0, 3), 0.0).unwrap();
        assert_abs_diff_eq!(q.lambda, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.e1, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.e2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.theta, PI / 2.0, epsilon = 1e-15);

        let q = dispersion(&ReducedParams::new(2.0, 1.0, 3), PI / 2.0).unwrap();
        assert_abs_diff_eq!(q.lambda, 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(q.e1, 2.0 - 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(q.e2, 2.0 + 3f64.sqrt(), epsilon = 1e-14);

        // h = 2 J3 cos k
        let k: f64 = 0.7;
        let q = dispersion(&ReducedParams::new(2.0 * 0.4 * k.cos(), 0.4, 3), k).unwrap();
        assert_abs_diff_eq!(q.theta, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.u, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.v, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn dispersion_rejects_bad_input() {
        assert_eq!(dispersion(&ReducedParams::new(1.0, 0.0, 3).with_j(0.0), 0.1), Err(Error::DegenerateGap));
        assert!(dispersion(&ReducedParams::new(1.0, 0.0, 3), 4.0).is_err());
    }

    #[test]
    fn phase_of_bogoliubov_rotation() {
        let q = dispersion(&ReducedParams::new(0.3, 0.2, 3).with_j(0.7), 1.1).unwrap();
        let norm = (0.49 + 1.1f64.sin().powi(2)).sqrt();
        assert_abs_diff_eq!(q.phi.cos(), 0.7 / norm, epsilon = 1e-15);
        assert_abs_diff_eq!(-q.phi.sin(), -1.1f64.sin() / norm, epsilon = 1e-15);
    }

    #[test]
    fn grid_layout() {
        let g = ModeGrid::new(5);
        assert_eq!(g.len(), 5);
        assert_abs_diff_eq!(g.k()[0], -4.0 * PI / 5.0, epsilon = 1e-15);
        assert_eq!(g.k()[2], 0.0);
        assert_eq!(g.lambda(0), -2);
        let g = ModeGrid::new(4);
        assert_abs_diff_eq!(*g.k().last().unwrap(), PI, epsilon = 1e-15);
        assert_eq!(ModeGrid::new(1).k(), &[0.0]);
    }

    #[test]
    fn critical_field_examples() {
        let c = critical_fields(1.0, 2.0 / 5f64.sqrt()).unwrap();
        assert_abs_diff_eq!(c.h3, 0.0, epsilon = 1e-12);
        let c = critical_fields(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(c.h1, (13f64.sqrt() + 4.0) / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.h2, (4.0 - 13f64.sqrt()) / 3.0, epsilon = 1e-14);
        let c = critical_fields(1.0, 0.76).unwrap();
        assert!((c.h13 - c.h1).abs() < 1e-3);
        let c = critical_fields(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(c.h1, 2.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.h3, c.h1, epsilon = 1e-14);
        assert_abs_diff_eq!(c.h2, -c.h1, epsilon = 1e-14);
        assert!(critical_fields(1.0, -0.1).is_err());
        assert_eq!(critical_fields(0.0, 0.1), Err(Error::DegenerateGap));
    }

    #[test]
    fn k_m_falls_back_beyond_tangency() {
        let c = critical_fields(1.0, 0.5).unwrap();
        assert!(c.k_m_closed_form);
        let c = critical_fields(1.0, 1.2).unwrap();
        assert!(!c.k_m_closed_form);
        assert!(c.k_m < 1e-4);
        assert_abs_diff_eq!(c.h13, c.h1, epsilon = 1e-12);
        // J != 1 always goes through the numerical maximiser
        assert!(!critical_fields(0.8, 0.3).unwrap().k_m_closed_form);
    }

    #[test]
    fn tangency_point() {
        let t = h13_tangency(1.0);
        assert_abs_diff_eq!(15.0 * t.powi(4) + 216.0 * t * t - 144.0, 0.0, epsilon = 1e-12);
        assert!((t - 0.7989).abs() < 1e-4);
    }

    #[test]
    fn critical_momenta_example() {
        let p = ReducedParams::new(1.2, 2.0, 51);
        let m = critical_momenta(&p).unwrap();
        let kc1 = m.kc1.unwrap();
        assert!((kc1 - 1.7312).abs() < 1e-4);
        let lc = 51.0 * kc1 / (2.0 * PI);
        assert!((lc - 14.05).abs() < 0.01);
        assert_eq!(lc.floor(), 14.0);
        assert!(branch_energies(1.2, 1.0, 2.0, kc1).0.abs() < 1e-10);
        assert!(m.kc2.unwrap() <= kc1);
        // gapped region: no real roots
        let p = ReducedParams::new(10.0, 0.1, 51);
        assert!(matches!(critical_momenta(&p), Err(Error::NoGaplessPoints { .. })));
    }

    #[test]
    fn classify_examples() {
        let pp = classify(&ReducedParams::new(10.0, 0.5, 51)).unwrap();
        assert_eq!(pp.region, Region::V);
        assert!(pp.occupied1.is_empty() && pp.occupied2.is_empty());

        let pp = classify(&ReducedParams::new(0.5, 0.2, 51)).unwrap();
        assert_eq!(pp.region, Region::I);
        assert_eq!(pp.occupied1.len(), 51);
        assert!(pp.occupied2.is_empty());

        // h = 1.2 lies below h2(2) = 4/3, so the upper branch dips below zero
        // around k = 0; the lower-branch Fermi momentum is the paper's k_c1.
        let pp = classify(&ReducedParams::new(1.2, 2.0, 51)).unwrap();
        assert_eq!(pp.region, Region::IV);
        assert_eq!(pp.lambda_c1(51).unwrap().floor(), 14.0);
        assert_eq!(pp.occupied1.len(), 2 * 14 + 1);

        let pp = classify(&ReducedParams::new(2.0, 1.5, 51)).unwrap();
        assert_eq!(pp.region, Region::II);
        let pp = classify(&ReducedParams::new(1.5, 0.2, 51)).unwrap();
        assert_eq!(pp.region, Region::III);
        assert!(pp.kc2.unwrap() < pp.kc1.unwrap());
        assert!(!pp.active().contains(&25));
    }

    #[test]
    fn ground_energy_and_magnetization_limits() {
        let p = ReducedParams::new(10.0, 0.5, 7);
        assert_eq!(ground_energy(&p).unwrap(), -70.0);
        assert_eq!(magnetization(&p).unwrap(), 1.0);
        assert_eq!(magnetization_thermo(10.0, 1.0, 0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(magnetization(&ReducedParams::new(0.0, 0.0, 51)).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(magnetization_thermo(0.0, 1.0, 0.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn three_spin_line_examples() {
        let l = three_spin_lines(2.0, 1.0, 1.0);
        assert_eq!(l.hc1, 0.0);
        let l = three_spin_lines(1.2, 0.8, 0.0);
        assert_abs_diff_eq!(l.first_order_onset, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(l.intersection, 2.0, epsilon = 1e-15);
        for j3 in [0.0, 0.3, 1.7, 4.0] {
            let l = three_spin_lines(2.0, 1.0, j3);
            assert_abs_diff_eq!(l.hs - l.hc2, 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(l.hc1, (1.0 - j3) / 2.0, epsilon = 1e-15);
        }
    }
}
