//! Nielsen complexity and Loschmidt echo after sudden field quenches.
//!
//! A singly occupied mode is a two-level system. In the frame of angle
//! `theta` its ground vector is `(sin theta/2, cos theta/2)` and its excited
//! vector `(-cos theta/2, sin theta/2)`. Moving from a frame `theta_old` to
//! `theta_new` with `Omega = (theta_old - theta_new)/2` maps amplitudes as
//!
//! ```text
//! ground'  =  cos Omega * ground + sin Omega * excited
//! excited' = -sin Omega * ground + cos Omega * excited
//! ```
//!
//! Empty and doubly occupied modes are eigenstates of every block and drop out
//! of both the complexity and the echo.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{self, branch_energies, theta, ModeGrid};
use crate::params::ReducedParams;

/// Momenta entering the static complexity sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeRange {
    #[default]
    Full,
    /// Modes singly occupied in the target ground state.
    TargetActive,
}

/// Static complexity `sum_k ((theta_k^T - theta_k^R)/2)^2`.
pub fn static_nc(reference: &ReducedParams, target: &ReducedParams, range: ModeRange) -> Result<f64> {
    reference.validate()?;
    target.validate()?;
    if reference.n != target.n {
        return Err(Error::InvalidParameter("reference and target must share N".into()));
    }
    let momenta = match range {
        ModeRange::Full => ModeGrid::new(reference.n).k().to_vec(),
        ModeRange::TargetActive => model::active_momenta(target.h, target.j, target.j3, target.n),
    };
    Ok(momenta
        .iter()
        .map(|&k| {
            let d = theta(target.h, target.j, target.j3, k) - theta(reference.h, reference.j, reference.j3, k);
            0.25 * d * d
        })
        .sum())
}

/// `Omega_k = (theta_k(h) - theta_k(h + delta)) / 2` on the grid.
pub fn quench_angles(p: &ReducedParams, delta: f64) -> Result<Vec<f64>> {
    p.validate()?;
    Ok(ModeGrid::new(p.n)
        .k()
        .iter()
        .map(|&k| 0.5 * (theta(p.h, p.j, p.j3, k) - theta(p.h + delta, p.j, p.j3, k)))
        .collect())
}

/// Per-mode `s_k = sin^2(2 Omega_k) sin^2(Lambda_k(h + delta) t)` over the modes
/// active at `h`.
pub fn transition_weights(p: &ReducedParams, delta: f64, t: f64) -> Result<Vec<f64>> {
    p.validate()?;
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time {t} must be non-negative")));
    }
    let hq = p.h + delta;
    Ok(model::active_momenta(p.h, p.j, p.j3, p.n)
        .into_iter()
        .map(|k| {
            let om = 0.5 * (theta(p.h, p.j, p.j3, k) - theta(hq, p.j, p.j3, k));
            let q = model::quasi(hq, p.j, p.j3, k);
            (2.0 * om).sin().powi(2) * (q.lambda * t).sin().powi(2)
        })
        .collect())
}

/// Complexity after a single quench `h -> h + delta`, closed form.
pub fn nc_of_t(p: &ReducedParams, delta: f64, t: f64) -> Result<f64> {
    Ok(transition_weights(p, delta, t)?.into_iter().map(|s| (1.0 - s).max(0.0).sqrt().acos().powi(2)).sum())
}

/// Loschmidt echo after a single quench, closed form.
pub fn loschmidt(p: &ReducedParams, delta: f64, t: f64) -> Result<f64> {
    Ok(transition_weights(p, delta, t)?.into_iter().map(|s| 1.0 - s).product())
}

/// A two-level-per-mode model driven by a field.
pub trait TwoLevelModel: Sync {
    /// Momenta of the modes that take part in the dynamics.
    fn modes(&self, h0: f64) -> Result<Vec<f64>>;
    /// Frame angle at field `h`.
    fn angle(&self, h: f64, k: f64) -> f64;
    /// `(ground, excited)` energies at field `h`.
    fn energies(&self, h: f64, k: f64) -> (f64, f64);
}

/// The reduced chain at fixed `(J, J3)` on `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel {
    pub j: f64,
    pub j3: f64,
    pub n: usize,
}

impl TwoLevelModel for ChainModel {
    fn modes(&self, h0: f64) -> Result<Vec<f64>> {
        ReducedParams::new(h0, self.j3, self.n).with_j(self.j).validate()?;
        Ok(model::active_momenta(h0, self.j, self.j3, self.n))
    }

    fn angle(&self, h: f64, k: f64) -> f64 {
        theta(h, self.j, self.j3, k)
    }

    fn energies(&self, h: f64, k: f64) -> (f64, f64) {
        branch_energies(h, self.j, self.j3, k)
    }
}

/// Transverse-field XY chain with anisotropy `gamma` on `n` sites; modes
/// `k = 2 pi m / n`, `m = 1..=(n-1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyModel {
    pub gamma: f64,
    pub n: usize,
}

/// XY Bogoliubov angle, `cos theta = (h - cos k) / sqrt((h - cos k)^2 + gamma^2 sin^2 k)`.
pub fn xy_mode_angle(h: f64, gamma: f64, k: f64) -> Result<f64> {
    if gamma.abs() > 1.0 {
        return Err(Error::InvalidParameter(format!("|gamma| = {} exceeds 1", gamma.abs())));
    }
    let a = h - k.cos();
    let b = gamma * k.sin();
    if a.hypot(b) < 1e-14 {
        return Err(Error::GaplessMode { h, gamma, k });
    }
    Ok(b.atan2(a))
}

impl XyModel {
    pub fn validate(&self, h: f64) -> Result<()> {
        for k in self.momenta() {
            xy_mode_angle(h, self.gamma, k)?;
        }
        Ok(())
    }

    fn momenta(&self) -> Vec<f64> {
        (1..=(self.n.saturating_sub(1)) / 2).map(|m| 2.0 * PI * m as f64 / self.n as f64).collect()
    }
}

impl TwoLevelModel for XyModel {
    fn modes(&self, h0: f64) -> Result<Vec<f64>> {
        self.validate(h0)?;
        Ok(self.momenta())
    }

    fn angle(&self, h: f64, k: f64) -> f64 {
        let a = h - k.cos();
        (self.gamma * k.sin()).atan2(a)
    }

    fn energies(&self, h: f64, k: f64) -> (f64, f64) {
        let e = 2.0 * (h - k.cos()).hypot(self.gamma * k.sin());
        (-e, e)
    }
}

/// Piecewise-constant field `h0 + delta_i` held for `duration_i`; the last
/// segment lasts forever.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchProtocol {
    pub h0: f64,
    pub segments: Vec<(f64, f64)>,
}

impl QuenchProtocol {
    pub fn single(h0: f64, delta: f64) -> Self {
        QuenchProtocol { h0, segments: vec![(delta, f64::INFINITY)] }
    }

    /// `n_cycles` of `(delta, period)` then `(0, period)`, then `delta` held.
    pub fn cycles(h0: f64, delta: f64, period: f64, n_cycles: usize) -> Self {
        let mut segments = Vec::with_capacity(2 * n_cycles + 1);
        for _ in 0..n_cycles {
            segments.push((delta, period));
            segments.push((0.0, period));
        }
        segments.push((delta, f64::INFINITY));
        QuenchProtocol { h0, segments }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidParameter("protocol has no segments".into()));
        }
        if let Some(&(_, d)) = self.segments.iter().find(|s| !(s.1 >= 0.0)) {
            return Err(Error::InvalidParameter(format!("segment duration {d} is negative")));
        }
        if self.segments.iter().any(|s| !s.0.is_finite()) {
            return Err(Error::InvalidParameter("segment shift must be finite".into()));
        }
        Ok(())
    }

    /// Segment start times.
    pub fn starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let t0 = t;
                t += s.1;
                t0
            })
            .collect()
    }
}

/// Amplitudes of one mode in the frame of the segment it is in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub k: f64,
    pub ground: Complex64,
    pub excited: Complex64,
}

impl ModeState {
    pub fn norm_sqr(&self) -> f64 {
        self.ground.norm_sqr() + self.excited.norm_sqr()
    }

    fn rotate(&mut self, omega: f64) {
        let (s, c) = omega.sin_cos();
        let g = self.ground * c + self.excited * s;
        let e = -self.ground * s + self.excited * c;
        self.ground = g;
        self.excited = e;
    }

    fn advance(&mut self, e: (f64, f64), t: f64) {
        self.ground *= Complex64::from_polar(1.0, -e.0 * t);
        self.excited *= Complex64::from_polar(1.0, -e.1 * t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcRecord {
    pub t: f64,
    pub complexity: f64,
    pub echo: f64,
}

struct ModeHistory {
    theta0: f64,
    angles: Vec<f64>,
    energies: Vec<(f64, f64)>,
    /// State at the start of each segment, in that segment's frame.
    starts: Vec<ModeState>,
}

fn history<M: TwoLevelModel>(m: &M, proto: &QuenchProtocol, k: f64) -> ModeHistory {
    let theta0 = m.angle(proto.h0, k);
    let angles: Vec<f64> = proto.segments.iter().map(|s| m.angle(proto.h0 + s.0, k)).collect();
    let energies: Vec<(f64, f64)> = proto.segments.iter().map(|s| m.energies(proto.h0 + s.0, k)).collect();
    let mut st = ModeState { k, ground: Complex64::new(1.0, 0.0), excited: Complex64::new(0.0, 0.0) };
    let mut prev = theta0;
    let mut starts = Vec::with_capacity(angles.len());
    for (i, &th) in angles.iter().enumerate() {
        st.rotate(0.5 * (prev - th));
        starts.push(st);
        if proto.segments[i].1.is_finite() {
            st.advance(energies[i], proto.segments[i].1);
        }
        prev = th;
    }
    ModeHistory { theta0, angles, energies, starts }
}

impl ModeHistory {
    /// Mode state at `t` and the amplitudes `(ground, excited)` in the
    /// initial frame.
    fn at(&self, seg_starts: &[f64], t: f64) -> (ModeState, (f64, f64)) {
        let i = seg_starts.partition_point(|&s| s <= t).saturating_sub(1);
        let mut st = self.starts[i];
        st.advance(self.energies[i], t - seg_starts[i]);
        let mut back = st;
        back.rotate(0.5 * (self.angles[i] - self.theta0));
        (st, (back.ground.norm(), back.excited.norm()))
    }
}

/// `Phi_k = atan2(|excited|, |ground|)`, accurate where `arccos` of an overlap
/// near one is not.
fn record(t: f64, amps: impl Iterator<Item = (f64, f64)>) -> NcRecord {
    let mut c = 0.0;
    let mut l = 1.0;
    for (g, e) in amps {
        c += e.atan2(g).powi(2);
        l *= g * g;
    }
    NcRecord { t, complexity: c, echo: l.min(1.0) }
}

/// Mode states and `(C_N, L)` at time `t` under a protocol.
pub fn evolve<M: TwoLevelModel>(m: &M, proto: &QuenchProtocol, t: f64) -> Result<(Vec<ModeState>, NcRecord)> {
    proto.validate()?;
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time {t} must be non-negative")));
    }
    let starts = proto.starts();
    let res: Vec<(ModeState, (f64, f64))> =
        m.modes(proto.h0)?.par_iter().map(|&k| history(m, proto, k).at(&starts, t)).collect();
    let rec = record(t, res.iter().map(|r| r.1));
    Ok((res.into_iter().map(|r| r.0).collect(), rec))
}

/// `(C_N, L)` at each of `times`.
pub fn evolve_series<M: TwoLevelModel>(m: &M, proto: &QuenchProtocol, times: &[f64]) -> Result<Vec<NcRecord>> {
    proto.validate()?;
    if times.iter().any(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("times must be non-negative".into()));
    }
    let starts = proto.starts();
    let hist: Vec<ModeHistory> = m.modes(proto.h0)?.par_iter().map(|&k| history(m, proto, k)).collect();
    Ok(times
        .par_iter()
        .map(|&t| record(t, hist.iter().map(|hm| hm.at(&starts, t).1)))
        .collect())
}

/// Uniform sample times `0, dt, ..., <= t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// Time series of the cycled protocol of [`QuenchProtocol::cycles`].
pub fn multi_quench_scan(
    p: &ReducedParams,
    delta: f64,
    period: f64,
    n_cycles: usize,
    t_max: f64,
    dt: f64,
) -> Result<Vec<NcRecord>> {
    if n_cycles == 0 || !(period > 0.0) {
        return Err(Error::InvalidParameter("need at least one cycle of positive period".into()));
    }
    let chain = ChainModel { j: p.j, j3: p.j3, n: p.n };
    evolve_series(&chain, &QuenchProtocol::cycles(p.h, delta, period, n_cycles), &time_grid(t_max, dt))
}
