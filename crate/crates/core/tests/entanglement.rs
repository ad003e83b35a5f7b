//! Entanglement across the chain centre from the correlation matrix.

use approx::assert_abs_diff_eq;
use spinchain::model::critical_fields;
use spinchain::numeric::bisect;
use spinchain::realspace::ee_center;
use spinchain::{GeneralCouplings, ReducedParams};

/// Jump positions (interval midpoints) of the `count` largest steps of `S(J3)`
/// on `J3 = 0, 0.01, ..., 3`, with the median step size.
fn dominant_jumps(count: usize, couplings: impl Fn(f64) -> GeneralCouplings) -> (Vec<(f64, f64)>, f64) {
    let js: Vec<f64> = (0..=300).map(|i| 0.01 * i as f64).collect();
    let s: Vec<f64> = js.iter().map(|&j| ee_center(&couplings(j), 51).unwrap().entropy).collect();
    let mut steps: Vec<(f64, f64)> = s.windows(2).zip(js.windows(2)).map(|(a, j)| ((a[1] - a[0]).abs(), 0.5 * (j[0] + j[1]))).collect();
    let mut sizes: Vec<f64> = steps.iter().map(|x| x.0).collect();
    sizes.sort_by(f64::total_cmp);
    let median = sizes[sizes.len() / 2];
    steps.sort_by(|a, b| b.0.total_cmp(&a.0));
    steps.truncate(count);
    steps.sort_by(|a, b| a.1.total_cmp(&b.1));
    (steps, median)
}

fn assert_jumps_at(found: &[(f64, f64)], median: f64, expected: &[f64], tol: f64) {
    assert_eq!(found.len(), expected.len());
    for (&(size, at), &want) in found.iter().zip(expected) {
        assert!((at - want).abs() <= tol, "jump at {at}, expected {want}");
        assert!(size > 5.0 * median, "{size} vs median {median}");
    }
}

#[test]
fn predicted_lines_at_quarter_field() {
    // h3(J3) = 0.25 and h2(J3) = 0.25 from the closed-form lines
    let a = bisect(|j3| critical_fields(1.0, j3).unwrap().h3 - 0.25, 0.0, 1.0, 1e-12).unwrap();
    let b = bisect(|j3| critical_fields(1.0, j3).unwrap().h2 - 0.25, 0.5, 2.0, 1e-12).unwrap();
    assert_abs_diff_eq!(a, 0.6958, epsilon = 1e-4);
    assert_abs_diff_eq!(b, 1.0958, epsilon = 1e-4);
    let c = bisect(|j3| critical_fields(1.0, j3).unwrap().h1 - 2.5, 0.0, 2.0, 1e-12).unwrap();
    assert_abs_diff_eq!(c, 0.9753, epsilon = 1e-4);
}

#[test]
fn entropy_jumps_at_quarter_field() {
    let (found, median) = dominant_jumps(2, |j3| ReducedParams::new(0.25, j3, 51).to_general());
    assert_jumps_at(&found, median, &[0.6958, 1.0958], 0.01);
}

#[test]
fn entropy_jumps_at_high_field() {
    let (found, median) = dominant_jumps(1, |j3| ReducedParams::new(2.5, j3, 51).to_general());
    assert_jumps_at(&found, median, &[0.9753], 0.01);
}

#[test]
fn three_spin_entropy_jumps() {
    let (found, median) = dominant_jumps(2, |j3| GeneralCouplings::three_spin(0.0, 1.2, 0.8, j3));
    assert_jumps_at(&found, median, &[0.4, 2.0], 0.02);
}

#[test]
fn saturated_chain_carries_no_entanglement() {
    for j3 in [0.0, 0.5, 2.0] {
        let h = critical_fields(1.0, j3).unwrap();
        let e = ee_center(&ReducedParams::new(h.h1.max(h.h13) + 1.0, j3, 51).to_general(), 51).unwrap();
        assert!(e.entropy.abs() < 1e-10);
    }
}
