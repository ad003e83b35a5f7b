//! Quench dynamics against closed forms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinchain::model::{self, active_momenta, critical_fields, dispersion, theta};
use spinchain::quench::*;
use spinchain::ReducedParams;

fn omega(h: f64, delta: f64, j3: f64, k: f64) -> f64 {
    0.5 * (theta(h, 1.0, j3, k) - theta(h + delta, 1.0, j3, k))
}

/// Single quench: `Phi_k = arccos sqrt(1 - sin^2(2 Omega) sin^2(Lambda t))`.
fn single_closed_form(h: f64, delta: f64, j3: f64, n: usize, t: f64) -> (f64, f64) {
    let mut c = 0.0;
    let mut l = 1.0;
    for k in active_momenta(h, 1.0, j3, n) {
        let lam = dispersion(&ReducedParams::new(h + delta, j3, n), k).unwrap().lambda;
        let s = (2.0 * omega(h, delta, j3, k)).sin().powi(2) * (lam * t).sin().powi(2);
        c += (1.0 - s).sqrt().acos().powi(2);
        l *= 1.0 - s;
    }
    (c, l)
}

/// Quench for `t1`, return to `h` for any time: `C = sum arccos^2 |Y_k|` with
/// `Y_k = e^{-i E2 t1} cos^2 Omega + e^{-i E1 t1} sin^2 Omega` at `h + delta`.
fn two_segment_closed_form(h: f64, delta: f64, j3: f64, n: usize, t1: f64) -> f64 {
    active_momenta(h, 1.0, j3, n)
        .into_iter()
        .map(|k| {
            let (e1, e2) = model::branch_energies(h + delta, 1.0, j3, k);
            let om = omega(h, delta, j3, k);
            let y = Complex64::from_polar(om.cos().powi(2), -e2 * t1) + Complex64::from_polar(om.sin().powi(2), -e1 * t1);
            y.norm().min(1.0).acos().powi(2)
        })
        .sum()
}

#[test]
fn one_segment_engine_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (h, delta, j3) = (rng.random_range(-1.0..4.0), rng.random_range(-0.5..0.5), rng.random_range(0.0..2.0));
        let n = 2 * rng.random_range(2..40) + 1;
        let t = rng.random_range(0.0..60.0);
        let chain = ChainModel { j: 1.0, j3, n };
        let (_, rec) = evolve(&chain, &QuenchProtocol::single(h, delta), t).unwrap();
        let (c, l) = single_closed_form(h, delta, j3, n, t);
        assert!((rec.complexity - c).abs() < 1e-12 * c.max(1.0), "{h} {delta} {j3} {n} {t}: {} vs {c}", rec.complexity);
        assert!((rec.echo - l).abs() < 1e-12);
        let p = ReducedParams::new(h, j3, n);
        assert!((nc_of_t(&p, delta, t).unwrap() - c).abs() < 1e-12 * c.max(1.0));
        assert!((loschmidt(&p, delta, t).unwrap() - l).abs() < 1e-12);
    }
}

#[test]
fn two_segment_engine_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let (h, delta, j3) = (rng.random_range(-1.0..4.0), rng.random_range(-0.5..0.5), rng.random_range(0.0..2.0));
        let n = 2 * rng.random_range(2..40) + 1;
        let (t1, t2) = (rng.random_range(0.0..30.0), rng.random_range(0.0..30.0));
        let proto = QuenchProtocol { h0: h, segments: vec![(delta, t1), (0.0, f64::INFINITY)] };
        let (_, rec) = evolve(&ChainModel { j: 1.0, j3, n }, &proto, t1 + t2).unwrap();
        let want = two_segment_closed_form(h, delta, j3, n, t1);
        assert!((rec.complexity - want).abs() < 1e-12 * want.max(1.0), "{} vs {want}", rec.complexity);
    }
}

#[test]
fn amplitudes_stay_normalised_and_angles_bound_phi() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let h0 = rng.random_range(-1.0..4.0);
        let j3 = rng.random_range(0.0..2.0);
        let segments = (0..6).map(|_| (rng.random_range(-0.6..0.6), rng.random_range(0.0..20.0))).collect();
        let proto = QuenchProtocol { h0, segments };
        let (modes, rec) = evolve(&ChainModel { j: 1.0, j3, n: 41 }, &proto, 150.0).unwrap();
        assert!(modes.iter().all(|m| (m.norm_sqr() - 1.0).abs() < 1e-12));
        assert!(rec.complexity >= 0.0 && (0.0..=1.0).contains(&rec.echo));
    }
    let p = ReducedParams::new(1.0, 0.2, 101);
    for t in [0.3, 2.0, 17.0] {
        let s = transition_weights(&p, 0.3, t).unwrap();
        for (k, sk) in active_momenta(1.0, 1.0, 0.2, 101).into_iter().zip(s) {
            let phi = (1.0 - sk).sqrt().acos();
            assert!(phi <= (2.0 * omega(1.0, 0.3, 0.2, k)).abs() + 1e-15);
        }
    }
}

#[test]
fn complexity_keeps_oscillating() {
    let p = ReducedParams::new(0.5, 0.2, 101);
    let c: Vec<f64> = time_grid(200.0, 0.05).iter().map(|&t| nc_of_t(&p, 0.1, t).unwrap() / 101.0).collect();
    let late = &c[c.len() / 2..];
    let spread = late.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - late.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(c[1] < c[20]);
    assert!(spread > 0.1 * late.iter().cloned().fold(0.0, f64::max));
}

#[test]
fn echo_and_complexity_agree_to_first_order() {
    for h in [0.5, 1.0, 1.4] {
        let p = ReducedParams::new(h, 0.2, 101);
        for t in time_grid(50.0, 0.05) {
            let s = transition_weights(&p, 0.1, t).unwrap();
            let bound: f64 = s.iter().map(|x| x * x).sum();
            let gap = (-loschmidt(&p, 0.1, t).unwrap().ln() - nc_of_t(&p, 0.1, t).unwrap()).abs();
            assert!(gap <= bound + 1e-15, "h = {h}, t = {t}: {gap} > {bound}");
        }
    }
}

#[test]
fn complexity_is_frozen_between_quenches() {
    let p = ReducedParams::new(1.0, 1.5, 501);
    let period = 15.0;
    let r = multi_quench_scan(&p, -0.2, period, 4, 130.0, 0.05).unwrap();
    for cycle in 0..4 {
        let (a, b) = ((2 * cycle + 1) as f64 * period, (2 * cycle + 2) as f64 * period);
        let seg: Vec<f64> = r.iter().filter(|x| x.t >= a + 1e-9 && x.t < b - 1e-9).map(|x| x.complexity).collect();
        let first = seg[0];
        assert!(seg.iter().all(|c| (c - first).abs() < 1e-10), "cycle {cycle}");
        assert!(first > 0.0);
    }
}

/// Peak-to-peak spread of `C_N` in `[a, b)`.
fn spread(r: &[NcRecord], a: f64, b: f64) -> f64 {
    let v: Vec<f64> = r.iter().filter(|x| x.t >= a && x.t < b).map(|x| x.complexity).collect();
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn late_oscillations_settle_to_a_plateau() {
    let p = ReducedParams::new(1.0, 1.5, 501);
    let period = 15.0;
    let r = multi_quench_scan(&p, -0.2, period, 4, 600.0, 0.05).unwrap();
    let hold = 8.0 * period;
    let first = spread(&r, hold, hold + period);
    let last = spread(&r, 600.0 - period, 600.0 + 1.0);
    let ratio = last / first;
    assert!((0.1..1.0).contains(&ratio), "{ratio}");
    // the decay levels off: the final windows differ far less than the first ones
    let w = |i: f64| spread(&r, hold + i * period, hold + (i + 1.0) * period);
    assert!((w(28.0) - w(30.0)).abs() < 0.2 * (w(0.0) - w(2.0)).abs());
}

/// Largest second difference of `C_N` inside segments on a grid of spacing `dt`.
fn max_curvature(proto: &QuenchProtocol, n: usize, j3: f64, dt: f64) -> f64 {
    let starts = proto.starts();
    let ts = time_grid(120.0, dt);
    let r = evolve_series(&ChainModel { j: 1.0, j3, n }, proto, &ts).unwrap();
    let near_switch = |t: f64| starts.iter().any(|&s| (t - s).abs() <= 2.0 * dt);
    r.windows(3)
        .filter(|w| !near_switch(w[1].t))
        .map(|w| ((w[2].complexity - 2.0 * w[1].complexity + w[0].complexity) / (dt * dt)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn quench_onto_h1_stays_smooth() {
    // lands just below h1 = 3.2583
    assert!((critical_fields(1.0, 1.5).unwrap().h1 - 3.2).abs() < 0.06);
    let proto = QuenchProtocol::cycles(3.0, 0.2, 15.0, 4);
    let a = max_curvature(&proto, 501, 1.5, 0.02);
    let b = max_curvature(&proto, 501, 1.5, 0.01);
    assert!(a.is_finite() && (a / b - 1.0).abs() < 0.05, "{a} {b}");
}

#[test]
fn xy_chain_runs_through_the_same_engine() {
    let xy = XyModel { gamma: 1.0, n: 101 };
    let proto = QuenchProtocol::cycles(0.5, 0.0, 10.0, 3);
    assert!(evolve_series(&xy, &proto, &time_grid(80.0, 0.5)).unwrap().iter().all(|r| r.complexity == 0.0));
    let (modes, rec) = evolve(&xy, &QuenchProtocol::cycles(1.5, -0.5, 10.0, 2), 55.0).unwrap();
    assert_eq!(modes.len(), 50);
    assert!(rec.complexity > 0.0 && rec.echo < 1.0);
    assert!(XyModel { gamma: 1.5, n: 101 }.validate(1.0).is_err());
}

fn static_slope(hr: f64, ht: f64) -> f64 {
    let d = 1e-7;
    let f = |h: f64| {
        static_nc(&ReducedParams::new(hr, 0.1, 101), &ReducedParams::new(h, 0.3, 101), ModeRange::TargetActive).unwrap()
    };
    (f(ht + d) - f(ht - d)) / (2.0 * d)
}

#[test]
fn static_complexity_slope_is_finite_and_vanishes_at_h13() {
    let c = critical_fields(1.0, 0.3).unwrap();
    for hr in [0.2, 1.05, 1.06] {
        let hs: Vec<f64> = (0..=400).map(|i| c.h13 - 2.0 + 2.0 * i as f64 / 400.0 + 1.3e-4).collect();
        let d: Vec<f64> = hs.iter().map(|&h| static_slope(hr, h)).collect();
        assert!(d.iter().all(|x| x.is_finite() && x.abs() < 50.0));
        // steps where a mode enters or leaves
        let jumps = d.windows(2).filter(|w| (w[1] - w[0]).abs() > 0.02).count();
        assert!(jumps > 5);
        // the last field with an active mode next to h13
        let last = (0..2000)
            .map(|i| c.h13 - 1e-5 * i as f64)
            .find(|&h| !active_momenta(h, 1.0, 0.3, 101).is_empty())
            .unwrap();
        let early = static_slope(hr, c.h13 - 0.3 * (c.h13 - c.h1));
        assert!(static_slope(hr, last).abs() < 0.1 * early.abs(), "{hr}");
    }
}
