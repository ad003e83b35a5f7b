//! Metric, curvature and geodesics of the ground-state manifold.

use approx::assert_abs_diff_eq;
use ndarray::{s, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinchain::geometry::*;
use spinchain::model::{self, critical_fields, region_of, Region};
use spinchain::realspace::{build_hopping_reduced, Boundary};
use spinchain::ReducedParams;

/// Occupied and empty orbitals of the periodic real-space fermion chain.
fn orbitals(h: f64, j3: f64, n: usize) -> (Array2<f64>, Array2<f64>, f64) {
    let hop = build_hopping_reduced(&ReducedParams::new(h, j3, n), Boundary::Periodic { twist: 1.0 }).unwrap();
    let (e, v) = hop.matrix.eigh(UPLO::Lower).unwrap();
    let filled = e.iter().filter(|&&x| x < 0.0).count();
    let gap = e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    (v.slice(s![.., ..filled]).to_owned(), v.slice(s![.., filled..]).to_owned(), gap)
}

/// `1 - |<a|b>|^2` for two Slater determinants, from the principal angles
/// between the occupied subspaces (`sin` of each angle is a singular value of
/// the empty-occupied overlap, so no cancellation occurs).
fn infidelity(a: (f64, f64), b: (f64, f64), n: usize) -> f64 {
    let (_, empty_a, _) = orbitals(a.0, a.1, n);
    let (occ_b, _, _) = orbitals(b.0, b.1, n);
    let (_, sv, _) = empty_a.t().dot(&occ_b).svd(false, false).unwrap();
    let log_f: f64 = sv.iter().map(|s| (1.0 - s * s).ln()).sum();
    -log_f.exp_m1()
}

/// Fidelity susceptibility along direction `d` from states at `x -+ eps/2`
/// (even in `eps`), Richardson-extrapolated.
fn susceptibility(h: f64, j3: f64, d: (f64, f64), n: usize) -> f64 {
    let at = |eps: f64| {
        let (a, b) = (0.5 * eps * d.0, 0.5 * eps * d.1);
        infidelity((h - a, j3 - b), (h + a, j3 + b), n) / (eps * eps)
    };
    let eps = 1e-4;
    (4.0 * at(eps / 2.0) - at(eps)) / 3.0
}

fn oracle_metric(h: f64, j3: f64, n: usize) -> [f64; 3] {
    let e = susceptibility(h, j3, (1.0, 0.0), n);
    let g = susceptibility(h, j3, (0.0, 1.0), n);
    let diag = susceptibility(h, j3, (1.0, 1.0), n);
    [e, 0.5 * (diag - e - g), g]
}

fn stable_active_set(h: f64, j3: f64, n: usize) -> bool {
    let base = model::active_momenta(h, 1.0, j3, n);
    [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3), (1e-3, 1e-3), (-1e-3, -1e-3)]
        .iter()
        .all(|&(a, b)| model::active_momenta(h + a, 1.0, j3 + b, n) == base)
}

#[test]
fn metric_matches_fidelity_at_reference_point() {
    let g = qim(&ReducedParams::new(0.5, 0.2, 101)).unwrap();
    let o = oracle_metric(0.5, 0.2, 101);
    assert!((g.g_hh - o[0]).abs() < 1e-6 * o[0], "{} vs {}", g.g_hh, o[0]);
}

#[test]
fn metric_matches_fidelity_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = [0usize; 4];
    let mut checked = 0;
    while checked < 24 {
        let j3 = rng.random_range(0.0..2.5);
        let h = rng.random_range(-1.0..3.0);
        let region = region_of(h, 1.0, j3);
        let slot = match region {
            Region::I => 0,
            Region::II => 1,
            Region::III => 2,
            Region::IV => 3,
            Region::V => continue,
        };
        // fill regions evenly; skip gapless grids and points next to a mode change
        if seen[slot] >= 6 || !stable_active_set(h, j3, 101) || orbitals(h, j3, 101).2 < 1e-3 {
            continue;
        }
        let g = qim(&ReducedParams::new(h, j3, 101)).unwrap().components();
        let o = oracle_metric(h, j3, 101);
        let scale = o[0].abs().max(o[2].abs());
        for i in 0..3 {
            assert!((g[i] - o[i]).abs() < 1e-6 * scale, "({h}, {j3}) {region} component {i}: {g:?} vs {o:?}");
        }
        seen[slot] += 1;
        checked += 1;
    }
}

#[test]
fn thermodynamic_metric_is_large_chain_limit() {
    for (h, j3) in [(0.5, 0.2), (0.3, 0.5)] {
        let t = qim_thermo(h, 1.0, j3).unwrap().components();
        let f = qim(&ReducedParams::new(h, j3, 4001)).unwrap().scaled(1.0 / 4001.0).components();
        for i in 0..3 {
            assert!((t[i] - f[i]).abs() <= 1e-4 * t[i].abs().max(1e-12), "{t:?} vs {f:?}");
        }
    }
    assert_eq!(qim_thermo(8.0, 1.0, 0.2).unwrap().components(), [0.0; 3]);
}

#[test]
fn g_hh_vanishes_below_h1_at_large_j3() {
    let h1 = critical_fields(1.0, 1.5).unwrap().h1;
    let vals: Vec<f64> = [1e-1, 1e-3, 1e-5, 1e-7].iter().map(|d| qim_thermo(h1 - d, 1.0, 1.5).unwrap().g_hh).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals[3] < 1e-2 * vals[0], "{vals:?}");
}

#[test]
fn ricci_is_step_invariant_at_regular_points() {
    let coarse = RicciScheme::default();
    let fine = RicciScheme { step: 5e-5, ..coarse };
    for (h, j3) in [(0.3, 0.5), (0.8, 0.5), (1.5, 0.2), (2.0, 1.5)] {
        let p = ReducedParams::new(h, j3, 101);
        let (a, b) = (ricci(&p, true, coarse).unwrap(), ricci(&p, true, fine).unwrap());
        assert!((a - b).abs() < 1e-2 * a.abs(), "mode sum at ({h}, {j3}): {a} vs {b}");
        let (a, b) = (ricci_continuum(&p, true, coarse).unwrap(), ricci_continuum(&p, true, fine).unwrap());
        assert!((a - b).abs() < 1e-2 * a.abs(), "continuum at ({h}, {j3}): {a} vs {b}");
    }
}

#[test]
fn continuum_ricci_is_bounded_in_region_one_and_diverges_at_h13() {
    let c = critical_fields(1.0, 0.5).unwrap();
    let r: Vec<f64> = (0..=40)
        .map(|i| c.h3 * (0.4 + 0.6 * i as f64 / 40.0) - 1e-6)
        .map(|h| ricci_continuum(&ReducedParams::new(h, 0.5, 1001), false, RicciScheme::default()).unwrap())
        .collect();
    let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x.abs()), b.max(x.abs())));
    assert!(hi < 2.0 * lo, "{lo} {hi}");

    let c = critical_fields(1.0, 0.2).unwrap();
    let width = c.h13 - c.h1;
    let at = |f: f64| ricci_continuum(&ReducedParams::new(c.h13 - f * width, 0.2, 101), false, RicciScheme::default()).unwrap();
    assert!(at(0.001).abs() > 10.0 * at(0.05).abs());
}

#[test]
fn region_two_jumps_follow_critical_mode_index() {
    let n = 51;
    let c = critical_fields(1.0, 0.5).unwrap();
    let hs: Vec<f64> = (0..=600).map(|i| c.h3 + 1e-3 + (c.h1 - c.h3 - 2e-3) * i as f64 / 600.0).collect();
    let g: Vec<f64> = hs.iter().map(|&h| qim(&ReducedParams::new(h, 0.5, n)).unwrap().g_hh).collect();
    let lc: Vec<i64> = hs
        .iter()
        .map(|&h| {
            let pp = model::classify(&ReducedParams::new(h, 0.5, n)).unwrap();
            assert_eq!(pp.region, Region::II);
            pp.lambda_c1(n).unwrap().floor() as i64
        })
        .collect();
    let diffs: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut sorted = diffs.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut jumps = 0;
    for (i, d) in diffs.iter().enumerate() {
        let changed = lc[i] != lc[i + 1];
        assert_eq!(*d > 20.0 * median, changed, "h = {}", hs[i]);
        jumps += changed as usize;
    }
    assert!(jumps > 3);
}

#[test]
fn geodesic_conserves_norm_over_ten_thousand_steps() {
    // crosses many mode interfaces on the way
    let geo = ChainGeometry { j: 1.0, n: 1001, per_cell: false };
    let start = geo.start(0.2, 0.3, 0.05).unwrap();
    let t = geodesic(&geo, start, &GeodesicConfig::default()).unwrap();
    assert_eq!(t.stop, StopReason::Completed);
    assert_eq!(t.states.len(), 10_001);
    for s in &t.states {
        assert!((speed_squared(&geo.frozen_at(s.h, s.j3), s) - 1.0).abs() < 1e-6, "{s:?}");
    }
}

#[test]
fn geodesic_retraces_when_reversed() {
    let geo = ChainGeometry { j: 1.0, n: 1001, per_cell: false };
    let start = geo.start(0.1, 0.2, -0.1).unwrap();
    let cfg = GeodesicConfig { steps: 1500, ..Default::default() };
    let fwd = geodesic(&geo, start, &cfg).unwrap();
    assert_eq!((fwd.refractions, fwd.reflections), (0, 0));
    let back = geodesic(&geo, fwd.last().reversed(), &cfg).unwrap();
    let end = back.last();
    assert_abs_diff_eq!(end.h, start.h, epsilon = 1e-6);
    assert_abs_diff_eq!(end.j3, start.j3, epsilon = 1e-6);
    assert_abs_diff_eq!(-end.dh, start.dh, epsilon = 1e-6);
    assert_abs_diff_eq!(-end.dj3, start.dj3, epsilon = 1e-6);
}

#[test]
fn geodesic_from_region_four_never_crosses_h1() {
    let geo = ChainGeometry { j: 1.0, n: 51, per_cell: true };
    let start = geo.start(1.0, 1.0, 0.04).unwrap();
    let t = geodesic(&geo, start, &GeodesicConfig { steps: 20_000, ..Default::default() }).unwrap();
    for s in &t.states {
        assert!(s.h < critical_fields(1.0, s.j3).unwrap().h1, "{s:?}");
    }
    // the complexity stops growing with h as the boundary is approached
    let hmax = t.states.iter().map(|s| s.h).fold(f64::NEG_INFINITY, f64::max);
    let near = fsc(&t, start.h + 0.99 * (hmax - start.h)).unwrap();
    let early = fsc(&t, start.h + 0.1 * (hmax - start.h)).unwrap();
    assert!(near.dc_dh < 0.1 * early.dc_dh, "{near:?} {early:?}");
}

#[test]
fn complexity_on_constant_j3_line() {
    let geo = ChainGeometry { j: 1.0, n: 101, per_cell: true };
    let t = geodesic_fixed_j3(&geo, 0.1, 0.5, &GeodesicConfig { steps: 800, ..Default::default() }).unwrap();
    assert!(t.states.windows(2).all(|w| w[1].tau > w[0].tau));
    let h_end = t.last().h;
    for i in 1..8 {
        let h = 0.1 + (h_end - 0.1) * i as f64 / 8.0;
        let d = 1e-4;
        let slope = (fsc(&t, h + d).unwrap().tau - fsc(&t, h - d).unwrap().tau) / (2.0 * d);
        let g = qim(&ReducedParams::new(h, 0.5, 101)).unwrap().scaled(1.0 / 101.0).g_hh;
        assert!((slope - g.sqrt()).abs() < 1e-4, "h = {h}: {slope} vs {}", g.sqrt());
        assert!((fsc(&t, h).unwrap().dc_dh - g.sqrt()).abs() < 1e-4);
    }
}

proptest! {
    #[test]
    fn metric_is_positive_semidefinite(h in -2.0f64..8.0, j3 in 0.0f64..3.0, half in 1usize..80) {
        let p = ReducedParams::new(h, j3, 2 * half + 1);
        let g = qim(&p).unwrap();
        let (lo, _) = g.eigenvalues();
        prop_assert!(lo >= -1e-10);
        if region_of(h, 1.0, j3) == Region::V {
            prop_assert_eq!(g.components(), [0.0; 3]);
        }
        let (lo, _) = qim_thermo(h, 1.0, j3).unwrap().eigenvalues();
        prop_assert!(lo >= -1e-10);
    }
}
