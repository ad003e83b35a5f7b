use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use spinchain::model::*;
use spinchain::ReducedParams;

/// All field roots of `E_1(k) E_2(k) = 0` in `[-20, 20]` by scan and bisection.
fn field_roots(j3: f64, k: f64) -> Vec<f64> {
    let f = |h: f64| {
        let (a, b) = branch_energies(h, 1.0, j3, k);
        a * b
    };
    let mut out = Vec::new();
    let n = 40_000;
    for i in 0..n {
        let (mut a, mut b) = (-20.0 + 40.0 * i as f64 / n as f64, -20.0 + 40.0 * (i + 1) as f64 / n as f64);
        if f(a) * f(b) > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

fn brute_max_zero_field(j3: f64) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=20_000 {
        let k = PI * i as f64 / 20_000.0;
        let v = lower_zero_field(1.0, j3, k);
        if v > best.0 {
            best = (v, k);
        }
    }
    // refine by ternary search around the best grid point
    let (mut a, mut b) = ((best.1 - 2e-4f64).max(0.0), (best.1 + 2e-4).min(PI));
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if lower_zero_field(1.0, j3, m1) < lower_zero_field(1.0, j3, m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    lower_zero_field(1.0, j3, 0.5 * (a + b)).max(best.0)
}

#[test]
fn critical_lines_are_band_edge_zeros() {
    for i in 0..=30 {
        let j3 = 0.1 * i as f64;
        let c = critical_fields(1.0, j3).unwrap();
        let at0 = field_roots(j3, 0.0);
        let atpi = field_roots(j3, PI);
        let near = |x: f64, set: &[f64]| set.iter().any(|&y| (x - y).abs() < 1e-9);
        assert!(near(c.h1, &at0) && near(c.h2, &at0), "J3={j3}: {at0:?}");
        assert!(near(c.h3, &atpi), "J3={j3}: {atpi:?}");
    }
}

#[test]
fn h13_matches_direct_maximisation() {
    for i in 0..=30 {
        let j3 = 0.1 * i as f64;
        let c = critical_fields(1.0, j3).unwrap();
        assert_abs_diff_eq!(c.h13, brute_max_zero_field(j3), epsilon = 1e-6);
    }
}

#[test]
fn zero_j3_and_axis_crossing() {
    let c = critical_fields(1.0, 0.0).unwrap();
    assert_abs_diff_eq!(c.h1, 2.0 / 3f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(c.h3, 2.0 / 3f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(c.h2, -2.0 / 3f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(critical_fields(1.0, 2.0 / 5f64.sqrt()).unwrap().h3, 0.0, epsilon = 1e-12);
}

#[test]
fn h13_meets_h1_near_tangency() {
    let first = (0..=200)
        .map(|i| 0.6 + 0.001 * i as f64)
        .find(|&j3| {
            let c = critical_fields(1.0, j3).unwrap();
            (c.h13 - c.h1).abs() < 1e-3
        })
        .unwrap();
    assert!((first - 0.76).abs() <= 0.01, "{first}");
    assert!(h13_tangency(1.0) > first);
}

#[test]
fn phase_diagram_topology() {
    for i in 0..=30 {
        let j3 = 0.1 * i as f64;
        let c = critical_fields(1.0, j3).unwrap();
        let top = c.h1.max(c.h13);
        assert_eq!(region_of(top + 1e-6, 1.0, j3), Region::V);
        assert_eq!(region_of(top + 3.0, 1.0, j3), Region::V);
        assert_ne!(region_of(top - 1e-3, 1.0, j3), Region::V);
    }
    for j3 in [0.0, 0.1, 0.2, 0.3] {
        let c = critical_fields(1.0, j3).unwrap();
        assert_eq!(region_of(0.5 * c.h3, 1.0, j3), Region::I);
        assert_eq!(region_of(c.h3 - 1e-6, 1.0, j3), Region::I);
    }
}

#[test]
fn finite_magnetisation_converges_to_thermodynamic_limit() {
    for (h, j3) in [(0.5, 0.2), (1.5, 0.2), (2.0, 1.5), (1.2, 2.0)] {
        let m = magnetization_thermo(h, 1.0, j3).unwrap();
        let mn = magnetization(&ReducedParams::new(h, j3, 20_001)).unwrap();
        assert_abs_diff_eq!(m, mn, epsilon = 1e-3);
        assert!((0.0..=1.0).contains(&m));
    }
}

#[test]
fn magnetisation_in_region_one_is_ferrimagnetic_and_continuous() {
    let c = critical_fields(1.0, 0.2).unwrap();
    let mut prev: Option<f64> = None;
    for i in 1..200 {
        let h = c.h3 * i as f64 / 200.0;
        let m = magnetization_thermo(h, 1.0, 0.2).unwrap();
        assert!(m > 0.0 && m < 1.0, "h={h}: {m}");
        if let Some(p) = prev {
            assert!((m - p).abs() < 0.02);
        }
        prev = Some(m);
    }
}

proptest! {
    #[test]
    fn bogoliubov_identities(h in -3.0f64..6.0, j3 in 0.0f64..3.0, j in 0.2f64..2.0, n in 1usize..60) {
        for &k in ModeGrid::new(2 * n + 1).k() {
            let q = dispersion(&ReducedParams::new(h, j3, 2 * n + 1).with_j(j), k).unwrap();
            prop_assert!((q.u * q.u + q.v * q.v - 1.0).abs() < 1e-12);
            prop_assert!((q.e2 - q.e1 - 2.0 * q.lambda).abs() < 1e-12);
            prop_assert!(q.lambda >= j.abs() - 1e-15);
            prop_assert!((0.0..=PI).contains(&q.theta));
        }
    }

    #[test]
    fn occupation_is_inversion_symmetric(h in -1.0f64..6.0, j3 in 0.0f64..3.0, half in 1usize..60) {
        let n = 2 * half + 1;
        let pp = classify(&ReducedParams::new(h, j3, n)).unwrap();
        for set in [&pp.occupied1, &pp.occupied2] {
            for &i in set.iter() {
                prop_assert!(set.contains(&(n - 1 - i)));
            }
        }
        match pp.region {
            Region::V => prop_assert!(pp.occupied1.is_empty() && pp.occupied2.is_empty()),
            Region::I => prop_assert!(pp.occupied1.len() == n && pp.occupied2.is_empty()),
            _ => {}
        }
    }

    #[test]
    fn ground_energy_does_not_increase_with_field(h in 0.0f64..6.0, dh in 0.0f64..0.5, j3 in 0.0f64..3.0) {
        let a = ground_energy(&ReducedParams::new(h, j3, 41)).unwrap();
        let b = ground_energy(&ReducedParams::new(h + dh, j3, 41)).unwrap();
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn critical_momenta_are_lower_branch_zeros(h in 0.0f64..5.0, j3 in 0.0f64..3.0) {
        let p = ReducedParams::new(h, j3, 51);
        if let Ok(m) = critical_momenta(&p) {
            for k in [m.kc1, m.kc2].into_iter().flatten() {
                let (e1, e2) = branch_energies(h, 1.0, j3, k);
                prop_assert!(e1.abs().min(e2.abs()) < 1e-10);
                prop_assert!((0.0..=PI).contains(&k));
            }
            if let (Some(a), Some(b)) = (m.kc1, m.kc2) {
                prop_assert!(b <= a);
            }
        }
    }
}
