use clap::ValueEnum;
use rayon::prelude::*;
use spinchain::geometry::{
    self, fsc, geodesic, geodesic_fixed_j3, qim, qim_thermo, ChainGeometry, GeodesicConfig, MetricField, RicciScheme,
    StopReason, Trajectory,
};
use spinchain::model::{branch_energies, critical_fields, region_of, theta, ModeGrid};
use spinchain::quench::{
    evolve_series, loschmidt, multi_quench_scan, nc_of_t, static_nc, time_grid, ModeRange, NcRecord, QuenchProtocol,
    XyModel,
};
use spinchain::realspace::ee_center;
use spinchain::{Error, GeneralCouplings, ReducedParams};
use spinchain_dmrg::{chain_mpo, dmrg_ground, SweepConfig};

use crate::args::*;
use crate::table::{Cell, Table};
use crate::CliError;

/// Largest number of points a scan axis may have.
const MAX_POINTS: usize = 10_000_000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `min, min + step, ...` up to `max` (inclusive within rounding).
pub(crate) fn axis(name: &str, min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(usage(format!("{name} step must be positive, got {step}")));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(usage(format!("{name} range needs min < max, got [{min}, {max}]")));
    }
    let n = ((max - min) / step + 1e-9).floor();
    if n >= MAX_POINTS as f64 {
        return Err(usage(format!("{name} axis would have more than {MAX_POINTS} points")));
    }
    Ok((0..=n as usize).map(|i| min + i as f64 * step).collect())
}

fn times(t_max: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    if !(dt > 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(usage(format!("need dt > 0 and t-max >= 0, got dt = {dt}, t-max = {t_max}")));
    }
    if t_max / dt >= MAX_POINTS as f64 {
        return Err(usage(format!("time grid would have more than {MAX_POINTS} points")));
    }
    Ok(time_grid(t_max, dt))
}

/// Evaluate `f` on every point in parallel; rows keep the input order and the
/// first failing point (in that order) decides the error.
fn scan<T, F>(points: &[f64], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    let res: Vec<Result<T, CliError>> = points.par_iter().map(|&x| f(x)).collect();
    res.into_iter().collect()
}

fn at(what: &str, x: f64, e: Error) -> CliError {
    match CliError::from(e) {
        CliError::Numerical(m) => CliError::Numerical(format!("{what} = {x}: {m}")),
        CliError::Usage(m) => CliError::Usage(format!("{what} = {x}: {m}")),
        other => other,
    }
}

fn scale(norm: Normalization, n: usize) -> f64 {
    match norm {
        Normalization::Total => 1.0,
        Normalization::PerCell => 1.0 / n as f64,
    }
}

pub fn dispatch(cmd: &Command) -> Result<Table, CliError> {
    match cmd {
        Command::PhaseDiagram(a) => phase_diagram(a),
        Command::Dispersion(a) => dispersion(a),
        Command::Metric(a) => metric(a),
        Command::Ricci(a) => ricci(a),
        Command::Geodesic(a) => geodesic_table(a),
        Command::Fsc(a) => fsc_table(a),
        Command::NcStatic(a) => nc_static(a),
        Command::Quench(a) => quench(a),
        Command::MultiQuench(a) => multi_quench(a),
        Command::EeCorr(a) => ee_corr(a),
        Command::EeDmrg(a) => ee_dmrg(a),
        Command::XyQuench(a) => xy_quench(a),
    }
}

fn phase_diagram(a: &PhaseDiagram) -> Result<Table, CliError> {
    let js = axis("J3", a.axis.j3_min, a.axis.j3_max, a.axis.step)?;
    let mut t = Table::new(vec!["J3", "h1", "h2", "h3", "h13"]);
    for row in scan(&js, |j3| {
        let c = critical_fields(a.j, j3).map_err(|e| at("J3", j3, e))?;
        Ok(vec![j3.into(), c.h1.into(), c.h2.into(), c.h3.into(), c.h13.into()])
    })? {
        t.push(row);
    }
    Ok(t)
}

fn dispersion(a: &Dispersion) -> Result<Table, CliError> {
    ReducedParams::new(a.h, a.j3, a.n).with_j(a.j).validate()?;
    let mut t = Table::new(vec!["k", "E1", "E2", "theta"]);
    for &k in ModeGrid::new(a.n).k() {
        let (e1, e2) = branch_energies(a.h, a.j, a.j3, k);
        t.push(vec![k.into(), e1.into(), e2.into(), theta(a.h, a.j, a.j3, k).into()]);
    }
    Ok(t)
}

fn metric(a: &MetricArgs) -> Result<Table, CliError> {
    let hs = axis("h", a.axis.h_min, a.axis.h_max, a.axis.step)?;
    let mut t = Table::new(vec!["h", "region", "g_hh", "g_hJ3", "g_J3J3"]);
    for row in scan(&hs, |h| {
        let g = if a.thermo {
            qim_thermo(h, a.j, a.j3)
        } else {
            qim(&ReducedParams::new(h, a.j3, a.n).with_j(a.j)).map(|g| g.scaled(scale(a.normalization, a.n)))
        }
        .map_err(|e| at("h", h, e))?;
        Ok(vec![
            h.into(),
            Cell::Text(region_of(h, a.j, a.j3).to_string()),
            g.g_hh.into(),
            g.g_hj3.into(),
            g.g_j3j3.into(),
        ])
    })? {
        t.push(row);
    }
    Ok(t)
}

fn ricci(a: &RicciArgs) -> Result<Table, CliError> {
    let hs = axis("h", a.axis.h_min, a.axis.h_max, a.axis.step)?;
    if !(a.fd_step > 0.0) {
        return Err(usage("fd-step must be positive"));
    }
    let scheme = RicciScheme { step: a.fd_step, ..RicciScheme::default() };
    let per_cell = a.normalization == Normalization::PerCell;
    let mut t = Table::new(vec!["h", "R"]);
    for r in scan(&hs, |h| {
        let p = ReducedParams::new(h, a.j3, a.n).with_j(a.j);
        match a.metric {
            MetricKind::Modes => geometry::ricci(&p, per_cell, scheme),
            MetricKind::Continuum => geometry::ricci_continuum(&p, per_cell, scheme),
        }
        .map_err(|e| at("h", h, e))
    })?
    .into_iter()
    .zip(&hs)
    {
        t.push(vec![(*r.1).into(), r.0.into()]);
    }
    Ok(t)
}

fn trajectory(a: &GeodesicArgs) -> Result<(ChainGeometry, Trajectory), CliError> {
    if !(a.dtau > 0.0) {
        return Err(usage("dtau must be positive"));
    }
    let geo = ChainGeometry { j: a.j, n: a.n, per_cell: a.normalization == Normalization::PerCell };
    let cfg = GeodesicConfig { dtau: a.dtau, steps: a.steps, ..GeodesicConfig::default() };
    let traj = if a.fixed_j3 {
        geodesic_fixed_j3(&geo, a.h0, a.j3, &cfg)?
    } else {
        geodesic(&geo, geo.start(a.h0, a.j3, a.dj3)?, &cfg)?
    };
    // a trajectory that ends on a degenerate metric is kept up to that point;
    // only a start without a single step counts as a failure
    match traj.stop {
        StopReason::Degenerate { det, .. } if traj.states.len() == 1 => {
            return Err(CliError::Numerical(format!("metric degenerate at the start point (det = {det:e})")));
        }
        StopReason::Completed => {}
        stop => eprintln!("note: integration stopped early: {stop:?}"),
    }
    Ok((geo, traj))
}

fn geodesic_table(a: &GeodesicArgs) -> Result<Table, CliError> {
    let (geo, traj) = trajectory(a)?;
    let mut t = Table::new(vec!["tau", "h", "J3", "dh", "dJ3", "speed2"]);
    for s in &traj.states {
        let speed = geometry::speed_squared(&geo.frozen_at(s.h, s.j3), s);
        t.push(vec![s.tau.into(), s.h.into(), s.j3.into(), s.dh.into(), s.dj3.into(), speed.into()]);
    }
    Ok(t)
}

fn fsc_table(a: &FscArgs) -> Result<Table, CliError> {
    if !(a.h_step > 0.0) {
        return Err(usage("h-step must be positive"));
    }
    let (geo, traj) = trajectory(&a.geodesic)?;
    let dir = if traj.states[0].dh >= 0.0 { 1.0 } else { -1.0 };
    let mut t = Table::new(vec!["h", "J3", "tau", "C_FS", "dC_FS_dh", "sqrt_g_hh"]);
    for i in 0.. {
        let h = a.geodesic.h0 + dir * a.h_step * i as f64;
        let p = match fsc(&traj, h) {
            Ok(p) => p,
            Err(Error::OutOfRange(_) | Error::NonMonotone) => break,
            Err(e) => return Err(at("h", h, e)),
        };
        // J3 at the crossing, interpolated between the bracketing states
        let j = traj.states.partition_point(|s| s.tau < p.tau).min(traj.states.len() - 1);
        let j3 = if j == 0 {
            traj.states[0].j3
        } else {
            let (s0, s1) = (&traj.states[j - 1], &traj.states[j]);
            s0.j3 + (s1.j3 - s0.j3) * (p.tau - s0.tau) / (s1.tau - s0.tau)
        };
        let g = geo.frozen_at(h, j3).components(h, j3)[0];
        t.push(vec![h.into(), j3.into(), p.tau.into(), p.complexity.into(), p.dc_dh.into(), g.max(0.0).sqrt().into()]);
    }
    Ok(t)
}

fn nc_static(a: &NcStatic) -> Result<Table, CliError> {
    let hs = axis("h", a.axis.h_min, a.axis.h_max, a.axis.step)?;
    if !(a.dh > 0.0) {
        return Err(usage("dh must be positive"));
    }
    let reference = ReducedParams::new(a.h_ref, a.j3_ref, a.n);
    let range = match a.modes {
        Modes::Full => ModeRange::Full,
        Modes::TargetActive => ModeRange::TargetActive,
    };
    let c = |h: f64| static_nc(&reference, &ReducedParams::new(h, a.j3, a.n), range);
    let mut t = Table::new(vec!["h", "C_N", "dC_N_dh"]);
    for row in scan(&hs, |h| {
        let v = c(h).map_err(|e| at("h", h, e))?;
        let d = (c(h + a.dh)? - c(h - a.dh)?) / (2.0 * a.dh);
        Ok(vec![h.into(), v.into(), d.into()])
    })? {
        t.push(row);
    }
    Ok(t)
}

fn echo_rows(t: &mut Table, records: &[NcRecord], n: usize) {
    for r in records {
        let n = n as f64;
        t.push(vec![r.t.into(), (r.complexity / n).into(), r.echo.into(), ((0.0 - r.echo.ln()) / n).into()]);
    }
}

const ECHO_COLUMNS: [&str; 4] = ["t", "C_N_over_N", "L", "minus_lnL_over_N"];

fn quench(a: &QuenchArgs) -> Result<Table, CliError> {
    let ts = times(a.t_max, a.dt)?;
    let p = ReducedParams::new(a.h, a.j3, a.n);
    p.validate()?;
    ReducedParams::new(a.h + a.delta, a.j3, a.n).validate()?;
    let records = scan(&ts, |t| {
        Ok(NcRecord {
            t,
            complexity: nc_of_t(&p, a.delta, t).map_err(|e| at("t", t, e))?,
            echo: loschmidt(&p, a.delta, t).map_err(|e| at("t", t, e))?,
        })
    })?;
    let mut t = Table::new(ECHO_COLUMNS.to_vec());
    echo_rows(&mut t, &records, a.n);
    Ok(t)
}

fn multi_quench(a: &MultiQuench) -> Result<Table, CliError> {
    times(a.t_max, a.dt)?;
    let p = ReducedParams::new(a.h0, a.j3, a.n);
    let records = multi_quench_scan(&p, a.delta, a.period, a.cycles, a.t_max, a.dt)?;
    let mut t = Table::new(ECHO_COLUMNS.to_vec());
    echo_rows(&mut t, &records, a.n);
    Ok(t)
}

fn xy_quench(a: &XyQuench) -> Result<Table, CliError> {
    let ts = times(a.t_max, a.dt)?;
    let xy = XyModel { gamma: a.gamma, n: a.n };
    xy.validate(a.h + a.delta)?;
    let records = evolve_series(&xy, &QuenchProtocol::single(a.h, a.delta), &ts)?;
    let mut t = Table::new(ECHO_COLUMNS.to_vec());
    echo_rows(&mut t, &records, a.n);
    Ok(t)
}

impl Couplings {
    /// Couplings at three-spin strength `j3` on `cells` cells.
    fn at(&self, j3: f64, cells: usize) -> Result<GeneralCouplings, CliError> {
        let model = self.model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("model {model} needs --{flag}")));
        let forbid = |v: Option<f64>, flag: &str| match v {
            Some(_) => Err(usage(format!("--{flag} does not apply to model {model}"))),
            None => Ok(()),
        };
        match self.model {
            Model::Reduced => {
                forbid(self.field, "H")?;
                forbid(self.j1, "J1")?;
                forbid(self.j2, "J2")?;
                let p = ReducedParams::new(need(self.h, "h")?, j3, cells).with_j(self.j.unwrap_or(1.0));
                p.validate()?;
                Ok(p.to_general())
            }
            Model::ThreeSpin => {
                forbid(self.h, "h")?;
                forbid(self.j, "J")?;
                let g = GeneralCouplings::three_spin(need(self.field, "H")?, need(self.j1, "J1")?, need(self.j2, "J2")?, j3);
                g.validate()?;
                Ok(g)
            }
        }
    }
}

fn ee_corr(a: &EeCorr) -> Result<Table, CliError> {
    let js = axis("J3", a.axis.j3_min, a.axis.j3_max, a.axis.step)?;
    a.couplings.at(js[0], a.cells)?;
    let mut t = Table::new(vec!["J3", "S", "zero_mode"]);
    for row in scan(&js, |j3| {
        let e = ee_center(&a.couplings.at(j3, a.cells)?, a.cells).map_err(|e| at("J3", j3, e))?;
        Ok(vec![j3.into(), e.entropy.into(), e.flagged.into()])
    })? {
        t.push(row);
    }
    Ok(t)
}

fn ee_dmrg(a: &EeDmrg) -> Result<Table, CliError> {
    let js = axis("J3", a.axis.j3_min, a.axis.j3_max, a.axis.step)?;
    a.couplings.at(js[0], a.cells)?;
    if a.chi == 0 || a.max_sweeps == 0 {
        return Err(usage("chi and max-sweeps must be positive"));
    }
    let cfg = SweepConfig {
        chi_max: a.chi,
        svd_cutoff: a.cutoff,
        energy_tol: a.energy_tol,
        max_sweeps: a.max_sweeps,
        ..SweepConfig::default()
    };
    let seed = a.common.seed;
    let mut t = Table::new(vec!["J3", "S", "energy", "bond_dim", "sweeps"]);
    for row in scan(&js, |j3| {
        let mpo = chain_mpo(&a.couplings.at(j3, a.cells)?, a.cells).map_err(|e| at("J3", j3, e))?;
        let r = dmrg_ground(&mpo, &cfg, seed).map_err(|e| at("J3", j3, e))?;
        let s = r.mps.ee_center().map_err(|e| at("J3", j3, e))?;
        Ok(vec![j3.into(), s.into(), r.energy.into(), r.mps.max_bond().into(), r.sweeps().into()])
    })? {
        t.push(row);
    }
    Ok(t)
}
