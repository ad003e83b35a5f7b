//! Quantum information metric on the `(h, J3)` plane and its geometry.
//!
//! Each active mode contributes `(1/4) d_a theta_k d_b theta_k`. The metric is
//! smooth inside a fixed active set and jumps when a mode enters or leaves it,
//! so derivatives are always taken with the active set of the evaluation
//! point held fixed ([`ModeMetric`]).

use crate::error::{Error, Result};
use crate::model::{self, branch_energies, theta_derivs};
use crate::numeric;
use crate::params::ReducedParams;

/// Determinant below which the metric counts as degenerate.
pub const DET_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSize {
    Cells(usize),
    /// Per-cell metric of the infinite chain.
    Thermodynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor2 {
    pub g_hh: f64,
    pub g_hj3: f64,
    pub g_j3j3: f64,
    pub h: f64,
    pub j3: f64,
    pub size: SystemSize,
}

impl MetricTensor2 {
    pub fn components(&self) -> [f64; 3] {
        [self.g_hh, self.g_hj3, self.g_j3j3]
    }

    pub fn det(&self) -> f64 {
        det(&self.components())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let [a, b, c] = self.components();
        let m = 0.5 * (a + c);
        let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        (m - r, m + r)
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.g_hh *= s;
        self.g_hj3 *= s;
        self.g_j3j3 *= s;
        self
    }
}

#[inline]
fn det(g: &[f64; 3]) -> f64 {
    g[0] * g[2] - g[1] * g[1]
}

#[inline]
fn inverse(g: &[f64; 3]) -> [f64; 3] {
    let d = det(g);
    [g[2] / d, -g[1] / d, g[0] / d]
}

#[inline]
fn quad(g: &[f64; 3], x: [f64; 2], y: [f64; 2]) -> f64 {
    g[0] * x[0] * y[0] + g[1] * (x[0] * y[1] + x[1] * y[0]) + g[2] * x[1] * y[1]
}

#[inline]
fn lower(g: &[f64; 3], v: [f64; 2]) -> [f64; 2] {
    [g[0] * v[0] + g[1] * v[1], g[1] * v[0] + g[2] * v[1]]
}

#[inline]
fn mode_metric(h: f64, j: f64, j3: f64, k: f64) -> [f64; 3] {
    let (th, tj) = theta_derivs(h, j, j3, k);
    [0.25 * th * th, 0.25 * th * tj, 0.25 * tj * tj]
}

/// Mode metric and its `(d/dh, d/dJ3)` derivatives.
#[inline]
fn mode_metric_grad(h: f64, j: f64, j3: f64, k: f64) -> ([f64; 3], [[f64; 3]; 2]) {
    let c = k.cos();
    let b2 = j * j + k.sin().powi(2);
    let b = b2.sqrt();
    let a = 0.5 * h - j3 * c;
    let l2 = a * a + b2;
    let l4 = l2 * l2;
    let th = -0.5 * b / l2;
    let tj = b * c / l2;
    let thh = 0.5 * a * b / l4;
    let thj = -a * b * c / l4;
    let tjj = 2.0 * a * b * c * c / l4;
    let g = [0.25 * th * th, 0.25 * th * tj, 0.25 * tj * tj];
    let dh = [0.5 * th * thh, 0.25 * (thh * tj + th * thj), 0.5 * tj * thj];
    let dj = [0.5 * th * thj, 0.25 * (thj * tj + th * tjj), 0.5 * tj * tjj];
    (g, [dh, dj])
}

/// Finite-size metric summed over the active modes of `p`.
pub fn qim(p: &ReducedParams) -> Result<MetricTensor2> {
    p.validate()?;
    let mut g = [0.0; 3];
    for k in model::active_momenta(p.h, p.j, p.j3, p.n) {
        let m = mode_metric(p.h, p.j, p.j3, k);
        (0..3).for_each(|i| g[i] += m[i]);
    }
    Ok(MetricTensor2 { g_hh: g[0], g_hj3: g[1], g_j3j3: g[2], h: p.h, j3: p.j3, size: SystemSize::Cells(p.n) })
}

/// Per-cell metric of the infinite chain by adaptive quadrature over the
/// active intervals.
pub fn qim_thermo(h: f64, j: f64, j3: f64) -> Result<MetricTensor2> {
    ReducedParams::new(h, j3, 1).with_j(j).validate()?;
    let [g_hh, g_hj3, g_j3j3] = thermo_components(h, j, j3, 1e-10)?;
    Ok(MetricTensor2 { g_hh, g_hj3, g_j3j3, h, j3, size: SystemSize::Thermodynamic })
}

fn thermo_components(h: f64, j: f64, j3: f64, rel: f64) -> Result<[f64; 3]> {
    let fill = model::filling(h, j, j3);
    let mut g = [0.0; 3];
    for (a, b) in fill.active() {
        for (i, gi) in g.iter_mut().enumerate() {
            *gi += numeric::integrate(|k| mode_metric(h, j, j3, k)[i], a, b, rel, 1e-300)?;
        }
    }
    // even integrand: (1/2pi) over (-pi, pi) equals (1/pi) over (0, pi)
    Ok(g.map(|x| x / std::f64::consts::PI))
}

/// A smooth metric on a coordinate patch `(h, J3)`.
pub trait MetricField {
    fn components(&self, h: f64, j3: f64) -> [f64; 3];

    /// `[d/dh, d/dJ3]` of the components; central differences by default.
    fn gradient(&self, h: f64, j3: f64) -> [[f64; 3]; 2] {
        let s = 1e-5;
        let (hp, hm) = (self.components(h + s, j3), self.components(h - s, j3));
        let (jp, jm) = (self.components(h, j3 + s), self.components(h, j3 - s));
        let mut out = [[0.0; 3]; 2];
        for i in 0..3 {
            out[0][i] = (hp[i] - hm[i]) / (2.0 * s);
            out[1][i] = (jp[i] - jm[i]) / (2.0 * s);
        }
        out
    }
}

/// Metric from a fixed list of momenta (an active set frozen at one point).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMetric {
    pub j: f64,
    pub momenta: Vec<f64>,
    /// `1` for the total metric, `1/N` per cell.
    pub scale: f64,
}

impl ModeMetric {
    pub fn frozen_at(h: f64, j: f64, j3: f64, n: usize, per_cell: bool) -> Self {
        let scale = if per_cell { 1.0 / n as f64 } else { 1.0 };
        ModeMetric { j, momenta: model::active_momenta(h, j, j3, n), scale }
    }

    fn value_and_gradient(&self, h: f64, j3: f64) -> ([f64; 3], [[f64; 3]; 2]) {
        let mut g = [0.0; 3];
        let mut d = [[0.0; 3]; 2];
        for &k in &self.momenta {
            let (m, md) = mode_metric_grad(h, self.j, j3, k);
            for i in 0..3 {
                g[i] += m[i] * self.scale;
                d[0][i] += md[0][i] * self.scale;
                d[1][i] += md[1][i] * self.scale;
            }
        }
        (g, d)
    }
}

impl MetricField for ModeMetric {
    fn components(&self, h: f64, j3: f64) -> [f64; 3] {
        let mut g = [0.0; 3];
        for &k in &self.momenta {
            let m = mode_metric(h, self.j, j3, k);
            (0..3).for_each(|i| g[i] += m[i] * self.scale);
        }
        g
    }

    fn gradient(&self, h: f64, j3: f64) -> [[f64; 3]; 2] {
        self.value_and_gradient(h, j3).1
    }
}

/// Mode sum replaced by `N/(2 pi)` times the integral over the active
/// intervals. Smooth inside each region, with the interval ends moving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumMetric {
    pub j: f64,
    /// `N` for the total metric, `1` per cell.
    pub scale: f64,
}

impl MetricField for ContinuumMetric {
    fn components(&self, h: f64, j3: f64) -> [f64; 3] {
        thermo_components(h, self.j, j3, 1e-13).map_or([f64::NAN; 3], |g| g.map(|x| x * self.scale))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMetric(pub [f64; 3]);

impl MetricField for ConstantMetric {
    fn components(&self, _h: f64, _j3: f64) -> [f64; 3] {
        self.0
    }
}

/// Metric given by a closure.
pub struct FnMetric<F>(pub F);

impl<F: Fn(f64, f64) -> [f64; 3]> MetricField for FnMetric<F> {
    fn components(&self, h: f64, j3: f64) -> [f64; 3] {
        (self.0)(h, j3)
    }
}

/// Finite-difference scheme for the curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciScheme {
    pub step: f64,
    pub richardson: bool,
}

impl Default for RicciScheme {
    fn default() -> Self {
        RicciScheme { step: 1e-4, richardson: true }
    }
}

/// Metric derivatives needed by the Brioschi formula.
#[derive(Debug, Clone, Copy)]
struct Jet {
    eu: f64,
    ev: f64,
    fu: f64,
    fv: f64,
    gu: f64,
    gv: f64,
    evv: f64,
    fuv: f64,
    guu: f64,
}

fn jet<M: MetricField + ?Sized>(m: &M, u: f64, v: f64, s: f64) -> Jet {
    let c = m.components(u, v);
    let up = m.components(u + s, v);
    let um = m.components(u - s, v);
    let vp = m.components(u, v + s);
    let vm = m.components(u, v - s);
    let pp = m.components(u + s, v + s);
    let pm = m.components(u + s, v - s);
    let mp = m.components(u - s, v + s);
    let mm = m.components(u - s, v - s);
    let d1 = |p: [f64; 3], q: [f64; 3], i: usize| (p[i] - q[i]) / (2.0 * s);
    Jet {
        eu: d1(up, um, 0),
        ev: d1(vp, vm, 0),
        fu: d1(up, um, 1),
        fv: d1(vp, vm, 1),
        gu: d1(up, um, 2),
        gv: d1(vp, vm, 2),
        evv: (vp[0] - 2.0 * c[0] + vm[0]) / (s * s),
        guu: (up[2] - 2.0 * c[2] + um[2]) / (s * s),
        fuv: (pp[1] - pm[1] - mp[1] + mm[1]) / (4.0 * s * s),
    }
}

fn richardson(a: Jet, b: Jet) -> Jet {
    let r = |x: f64, y: f64| (4.0 * y - x) / 3.0;
    Jet {
        eu: r(a.eu, b.eu),
        ev: r(a.ev, b.ev),
        fu: r(a.fu, b.fu),
        fv: r(a.fv, b.fv),
        gu: r(a.gu, b.gu),
        gv: r(a.gv, b.gv),
        evv: r(a.evv, b.evv),
        fuv: r(a.fuv, b.fuv),
        guu: r(a.guu, b.guu),
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Ricci scalar `R = 2K` of a metric field at `(h, J3)` (Brioschi formula).
pub fn ricci_scalar<M: MetricField + ?Sized>(m: &M, h: f64, j3: f64, scheme: RicciScheme) -> Result<f64> {
    let [e, f, g] = m.components(h, j3);
    let d = e * g - f * f;
    if d.abs() < DET_FLOOR || !d.is_finite() {
        return Err(Error::CurvatureUndefined { h, j3, det: d });
    }
    let mut t = jet(m, h, j3, scheme.step);
    if scheme.richardson {
        t = richardson(t, jet(m, h, j3, 0.5 * scheme.step));
    }
    let a = [
        [-0.5 * t.evv + t.fuv - 0.5 * t.guu, 0.5 * t.eu, t.fu - 0.5 * t.ev],
        [t.fv - 0.5 * t.gu, e, f],
        [0.5 * t.gv, f, g],
    ];
    let b = [[0.0, 0.5 * t.ev, 0.5 * t.gu], [0.5 * t.ev, e, f], [0.5 * t.gu, f, g]];
    let k = (det3(a) - det3(b)) / (d * d);
    Ok(2.0 * k)
}

/// Ricci scalar of the chain metric with the active set of `p` held fixed.
pub fn ricci(p: &ReducedParams, per_cell: bool, scheme: RicciScheme) -> Result<f64> {
    p.validate()?;
    let field = ModeMetric::frozen_at(p.h, p.j, p.j3, p.n, per_cell);
    ricci_scalar(&field, p.h, p.j3, scheme)
}

/// Ricci scalar of the continuum metric. The stencil is shrunk until every
/// point lies in the region of `(h, J3)`.
pub fn ricci_continuum(p: &ReducedParams, per_cell: bool, scheme: RicciScheme) -> Result<f64> {
    p.validate()?;
    let region = model::region_of(p.h, p.j, p.j3);
    let inside = |s: f64| {
        [(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)]
            .iter()
            .all(|&(a, b)| model::region_of(p.h + a * s, p.j, p.j3 + b * s) == region)
    };
    let mut step = scheme.step;
    while !inside(step) {
        step *= 0.5;
        if step < 1e-9 {
            return Err(Error::CurvatureUndefined { h: p.h, j3: p.j3, det: 0.0 });
        }
    }
    let field = ContinuumMetric { j: p.j, scale: if per_cell { 1.0 } else { p.n as f64 } };
    ricci_scalar(&field, p.h, p.j3, RicciScheme { step, ..scheme })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub h: f64,
    pub j3: f64,
    pub dh: f64,
    pub dj3: f64,
    pub tau: f64,
}

impl GeodesicState {
    fn x(&self) -> [f64; 2] {
        [self.h, self.j3]
    }

    fn v(&self) -> [f64; 2] {
        [self.dh, self.dj3]
    }

    pub fn reversed(mut self) -> Self {
        self.dh = -self.dh;
        self.dj3 = -self.dj3;
        self
    }
}

/// `g(v, v)` at the state.
pub fn speed_squared<M: MetricField + ?Sized>(m: &M, s: &GeodesicState) -> f64 {
    quad(&m.components(s.h, s.j3), s.v(), s.v())
}

/// Solve `g(v, v) = 1` for a non-negative `dh` given `dj3`.
pub fn normalized_dh<M: MetricField + ?Sized>(m: &M, h: f64, j3: f64, dj3: f64) -> Result<f64> {
    let [a, b, c] = m.components(h, j3);
    // a x^2 + 2 b dj3 x + c dj3^2 - 1 = 0
    let disc = b * b * dj3 * dj3 - a * (c * dj3 * dj3 - 1.0);
    if a <= 0.0 || disc < 0.0 {
        return Err(Error::InvalidParameter(format!("no unit-speed velocity at (h={h}, J3={j3})")));
    }
    Ok((-b * dj3 + disc.sqrt()) / a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub h: (f64, f64),
    pub j3: (f64, f64),
}

impl Default for Domain {
    fn default() -> Self {
        Domain { h: (-20.0, 20.0), j3: (0.0, 20.0) }
    }
}

impl Domain {
    fn contains(&self, h: f64, j3: f64) -> bool {
        h >= self.h.0 && h <= self.h.1 && j3 >= self.j3.0 && j3 <= self.j3.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicConfig {
    pub dtau: f64,
    pub steps: usize,
    /// Largest coordinate displacement per RK4 substep.
    pub max_displacement: f64,
    pub domain: Domain,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig { dtau: 1e-3, steps: 10_000, max_displacement: 1e-3, domain: Domain::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Completed,
    DomainExit { tau: f64 },
    Degenerate { tau: f64, det: f64 },
    /// No mode remains active beyond the current point.
    EmptyActiveSet { tau: f64 },
    /// The active set changed on a path that does not handle interfaces.
    ActiveSetChanged { tau: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    pub stop: StopReason,
    /// Active-set changes crossed by refraction.
    pub refractions: usize,
    pub reflections: usize,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("trajectory holds the start state")
    }
}

fn acceleration<M: MetricField + ?Sized>(m: &M, x: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    let g = m.components(x[0], x[1]);
    let dg = m.gradient(x[0], x[1]);
    let gi = inverse(&g);
    // component (i, j) of the metric derivative along coordinate c
    let gd = |c: usize, i: usize, j: usize| dg[c][i + j];
    // Gamma_{l j k} v^j v^k with Gamma_{ljk} = (d_j g_lk + d_k g_lj - d_l g_jk) / 2
    let mut low = [0.0; 2];
    for (l, lw) in low.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                s += 0.5 * (gd(j, l, k) + gd(k, l, j) - gd(l, j, k)) * v[j] * v[k];
            }
        }
        *lw = s;
    }
    let up = lower(&gi, low);
    [-up[0], -up[1]]
}

fn rk4<M: MetricField + ?Sized>(m: &M, s: &GeodesicState, dt: f64) -> GeodesicState {
    let x = s.x();
    let v = s.v();
    let add = |a: [f64; 2], b: [f64; 2], c: f64| [a[0] + c * b[0], a[1] + c * b[1]];
    let a1 = acceleration(m, x, v);
    let (x2, v2) = (add(x, v, 0.5 * dt), add(v, a1, 0.5 * dt));
    let a2 = acceleration(m, x2, v2);
    let (x3, v3) = (add(x, v2, 0.5 * dt), add(v, a2, 0.5 * dt));
    let a3 = acceleration(m, x3, v3);
    let (x4, v4) = (add(x, v3, dt), add(v, a3, dt));
    let a4 = acceleration(m, x4, v4);
    let w = dt / 6.0;
    GeodesicState {
        h: x[0] + w * (v[0] + 2.0 * v2[0] + 2.0 * v3[0] + v4[0]),
        j3: x[1] + w * (v[1] + 2.0 * v2[1] + 2.0 * v3[1] + v4[1]),
        dh: v[0] + w * (a1[0] + 2.0 * a2[0] + 2.0 * a3[0] + a4[0]),
        dj3: v[1] + w * (a1[1] + 2.0 * a2[1] + 2.0 * a3[1] + a4[1]),
        tau: s.tau + dt,
    }
}

fn substeps(s: &GeodesicState, cfg: &GeodesicConfig) -> usize {
    let disp = s.dh.hypot(s.dj3) * cfg.dtau;
    ((disp / cfg.max_displacement).ceil() as usize).max(1)
}

/// Geodesic of a smooth metric field (no active-set bookkeeping).
pub fn geodesic_in<M: MetricField + ?Sized>(m: &M, start: GeodesicState, cfg: &GeodesicConfig) -> Trajectory {
    let mut states = vec![start];
    let mut s = start;
    for _ in 0..cfg.steps {
        let n = substeps(&s, cfg);
        let dt = cfg.dtau / n as f64;
        let mut next = s;
        for _ in 0..n {
            next = rk4(m, &next, dt);
        }
        if !cfg.domain.contains(next.h, next.j3) {
            return Trajectory { states, stop: StopReason::DomainExit { tau: s.tau }, refractions: 0, reflections: 0 };
        }
        let d = det(&m.components(next.h, next.j3));
        if d < DET_FLOOR {
            return Trajectory { states, stop: StopReason::Degenerate { tau: s.tau, det: d }, refractions: 0, reflections: 0 };
        }
        s = next;
        states.push(s);
    }
    Trajectory { states, stop: StopReason::Completed, refractions: 0, reflections: 0 }
}

/// Geometry of the chain metric on `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainGeometry {
    pub j: f64,
    pub n: usize,
    pub per_cell: bool,
}

impl ChainGeometry {
    pub fn frozen_at(&self, h: f64, j3: f64) -> ModeMetric {
        ModeMetric::frozen_at(h, self.j, j3, self.n, self.per_cell)
    }

    /// Start state with unit speed and `dh >= 0`.
    pub fn start(&self, h: f64, j3: f64, dj3: f64) -> Result<GeodesicState> {
        let dh = normalized_dh(&self.frozen_at(h, j3), h, j3, dj3)?;
        Ok(GeodesicState { h, j3, dh, dj3, tau: 0.0 })
    }
}

/// Gradient of the branch energy whose sign differs between the two points,
/// for the first momentum that changed its filling.
fn interface_normal(j: f64, k: f64, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let (e1a, _) = branch_energies(a[0], j, a[1], k);
    let (e1b, _) = branch_energies(b[0], j, b[1], k);
    let lower_changed = (e1a < 0.0) != (e1b < 0.0);
    let (h, j3) = (b[0], b[1]);
    let c = k.cos();
    let aa = 0.5 * h - j3 * c;
    let lam = (aa * aa + j * j + k.sin().powi(2)).sqrt();
    if lower_changed {
        [1.0 - 0.5 * aa / lam, -1.5 * c + aa * c / lam]
    } else {
        [1.0 + 0.5 * aa / lam, -1.5 * c - aa * c / lam]
    }
}

fn symmetric_difference(a: &[f64], b: &[f64]) -> Option<f64> {
    let near = |x: f64, set: &[f64]| set.iter().any(|&y| (x - y).abs() < 1e-12);
    a.iter().chain(b).copied().find(|&k| !(near(k, a) && near(k, b)))
}

/// Geodesic of the chain metric.
///
/// Inside a fixed active set the metric is smooth and RK4 applies. When a
/// substep changes the active set, the covector `p = g v` keeps its components
/// tangent to the interface (`p' = p + beta n`, `n` the gradient of the
/// crossing level) and `beta` restores unit speed in the new metric. Without
/// a forward solution the velocity is reflected in the old metric. Integration
/// stops without accepting a step that leaves no active mode or a degenerate
/// metric.
pub fn geodesic(geo: &ChainGeometry, start: GeodesicState, cfg: &GeodesicConfig) -> Result<Trajectory> {
    ReducedParams::new(start.h, start.j3, geo.n).with_j(geo.j).validate()?;
    let mut states = vec![start];
    let mut s = start;
    let mut field = geo.frozen_at(s.h, s.j3);
    let (mut refractions, mut reflections) = (0, 0);
    let done = |states, stop, r1, r2| Ok(Trajectory { states, stop, refractions: r1, reflections: r2 });
    if field.momenta.is_empty() {
        return done(states, StopReason::EmptyActiveSet { tau: s.tau }, 0, 0);
    }
    for _ in 0..cfg.steps {
        let n = substeps(&s, cfg);
        let dt = cfg.dtau / n as f64;
        let mut cur = s;
        for i in 0..n {
            let mut next = rk4(&field, &cur, dt);
            if i + 1 == n {
                next.tau = s.tau + cfg.dtau;
            }
            if !cfg.domain.contains(next.h, next.j3) {
                return done(states, StopReason::DomainExit { tau: cur.tau }, refractions, reflections);
            }
            let active = model::active_momenta(next.h, geo.j, next.j3, geo.n);
            if let Some(k) = symmetric_difference(&field.momenta, &active) {
                if active.is_empty() {
                    return done(states, StopReason::EmptyActiveSet { tau: cur.tau }, refractions, reflections);
                }
                let new_field = ModeMetric { j: geo.j, momenta: active, scale: field.scale };
                let gn = new_field.components(next.h, next.j3);
                if det(&gn) < DET_FLOOR {
                    return done(states, StopReason::Degenerate { tau: cur.tau, det: det(&gn) }, refractions, reflections);
                }
                let nrm = interface_normal(geo.j, k, cur.x(), next.x());
                let go = field.components(next.h, next.j3);
                let p = lower(&go, next.v());
                let gi = inverse(&gn);
                let a = quad(&gi, nrm, nrm);
                let b = quad(&gi, nrm, p);
                let c = quad(&gi, p, p) - 1.0;
                let disc = b * b - a * c;
                let side = quad(&inverse(&go), nrm, p).signum();
                let forward = if disc >= 0.0 {
                    let r = disc.sqrt();
                    let mut roots = [(-b + r) / a, (-b - r) / a];
                    roots.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
                    roots.into_iter().find(|&beta| (b + beta * a).signum() == side)
                } else {
                    None
                };
                match forward {
                    Some(beta) => {
                        let pn = [p[0] + beta * nrm[0], p[1] + beta * nrm[1]];
                        let v = lower(&gi, pn);
                        next.dh = v[0];
                        next.dj3 = v[1];
                        field = new_field;
                        refractions += 1;
                    }
                    None => {
                        let gc = field.components(cur.h, cur.j3);
                        let gci = inverse(&gc);
                        let pc = lower(&gc, cur.v());
                        let beta = -2.0 * quad(&gci, nrm, pc) / quad(&gci, nrm, nrm);
                        let v = lower(&gci, [pc[0] + beta * nrm[0], pc[1] + beta * nrm[1]]);
                        next = GeodesicState { dh: v[0], dj3: v[1], tau: next.tau, ..cur };
                        reflections += 1;
                    }
                }
            }
            cur = next;
        }
        s = cur;
        states.push(s);
    }
    done(states, StopReason::Completed, refractions, reflections)
}

/// Unit-speed geodesic of the induced metric `g_hh dh^2` on a line of fixed
/// `J3`: `h'' = -(d_h g_hh) / (2 g_hh) h'^2`.
pub fn geodesic_fixed_j3(geo: &ChainGeometry, h0: f64, j3: f64, cfg: &GeodesicConfig) -> Result<Trajectory> {
    ReducedParams::new(h0, j3, geo.n).with_j(geo.j).validate()?;
    let field = geo.frozen_at(h0, j3);
    let g0 = field.components(h0, j3)[0];
    if g0 <= 0.0 {
        return Err(Error::CurvatureUndefined { h: h0, j3, det: g0 });
    }
    let rhs = |h: f64, v: f64| {
        let (g, d) = field.value_and_gradient(h, j3);
        -d[0][0] / (2.0 * g[0]) * v * v
    };
    let mut s = GeodesicState { h: h0, j3, dh: 1.0 / g0.sqrt(), dj3: 0.0, tau: 0.0 };
    let mut states = vec![s];
    for _ in 0..cfg.steps {
        let dt = cfg.dtau;
        let (h, v) = (s.h, s.dh);
        let (k1h, k1v) = (v, rhs(h, v));
        let (k2h, k2v) = (v + 0.5 * dt * k1v, rhs(h + 0.5 * dt * k1h, v + 0.5 * dt * k1v));
        let (k3h, k3v) = (v + 0.5 * dt * k2v, rhs(h + 0.5 * dt * k2h, v + 0.5 * dt * k2v));
        let (k4h, k4v) = (v + dt * k3v, rhs(h + dt * k3h, v + dt * k3v));
        let next = GeodesicState {
            h: h + dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h),
            dh: v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            tau: s.tau + dt,
            ..s
        };
        if !cfg.domain.contains(next.h, j3) {
            return Ok(Trajectory { states, stop: StopReason::DomainExit { tau: s.tau }, refractions: 0, reflections: 0 });
        }
        if symmetric_difference(&field.momenta, &model::active_momenta(next.h, geo.j, j3, geo.n)).is_some() {
            return Ok(Trajectory {
                states,
                stop: StopReason::ActiveSetChanged { tau: s.tau },
                refractions: 0,
                reflections: 0,
            });
        }
        s = next;
        states.push(s);
    }
    Ok(Trajectory { states, stop: StopReason::Completed, refractions: 0, reflections: 0 })
}

/// Fubini-Study complexity reached at a target field along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FscPoint {
    pub h: f64,
    pub tau: f64,
    /// Geodesic length from the start (unit speed: `tau - tau_0`).
    pub complexity: f64,
    /// `dC/dh = 1 / (dh/dtau)`.
    pub dc_dh: f64,
}

fn hermite(s0: &GeodesicState, s1: &GeodesicState, tau: f64) -> (f64, f64) {
    let dt = s1.tau - s0.tau;
    let t = (tau - s0.tau) / dt;
    let (t2, t3) = (t * t, t * t * t);
    let h = (2.0 * t3 - 3.0 * t2 + 1.0) * s0.h
        + (t3 - 2.0 * t2 + t) * dt * s0.dh
        + (-2.0 * t3 + 3.0 * t2) * s1.h
        + (t3 - t2) * dt * s1.dh;
    let dh = ((6.0 * t2 - 6.0 * t) * s0.h + (6.0 * t - 6.0 * t2) * s1.h) / dt
        + (3.0 * t2 - 4.0 * t + 1.0) * s0.dh
        + (3.0 * t2 - 2.0 * t) * s1.dh;
    (h, dh)
}

/// Invert `h(tau)` on the leading monotone part of the trajectory.
pub fn fsc(traj: &Trajectory, h_target: f64) -> Result<FscPoint> {
    let st = &traj.states;
    let s0 = st[0];
    if h_target == s0.h {
        return Ok(FscPoint { h: h_target, tau: s0.tau, complexity: 0.0, dc_dh: 1.0 / s0.dh });
    }
    let dir = (h_target - s0.h).signum();
    for w in st.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if (b.h - a.h) * dir <= 0.0 || a.dh * dir <= 0.0 {
            return Err(Error::NonMonotone);
        }
        if (b.h - h_target) * dir >= 0.0 {
            let f = |tau: f64| hermite(a, b, tau).0 - h_target;
            let mut lo = a.tau;
            let mut hi = b.tau;
            let mut tau = 0.5 * (lo + hi);
            for _ in 0..200 {
                tau = 0.5 * (lo + hi);
                let v = f(tau);
                if v.abs() < 1e-12 || hi - lo < 1e-15 {
                    break;
                }
                if (v > 0.0) == (dir > 0.0) {
                    hi = tau;
                } else {
                    lo = tau;
                }
            }
            if f(tau).abs() > 1e-10 {
                return Err(Error::NotConverged(format!("inverting h(tau) at h = {h_target}")));
            }
            let (_, dh) = hermite(a, b, tau);
            return Ok(FscPoint { h: h_target, tau, complexity: tau - s0.tau, dc_dh: 1.0 / dh });
        }
    }
    Err(Error::OutOfRange(h_target))
}
