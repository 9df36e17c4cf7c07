//! Stationary profiles against an independent quadrature of the first
//! integral `½h'² + ½h² - ln h = const`.

use std::f64::consts::PI;

use csf_core::al_profile::{build_profile, shoot_half_period, solve_class};
use csf_core::functionals::{instability_coefficient, stationary_entropies};
use csf_core::{CurveClass, Grid};

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn potential(h: f64) -> f64 {
    0.5 * h * h - h.ln()
}

/// Trough value: the root of `V(h) = V(h_max)` below 1.
fn trough(h_max: f64) -> f64 {
    let target = potential(h_max);
    let (mut lo, mut hi) = (1e-12, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if potential(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫ f(h) dθ` over half a period, as `∫ f(h) dh / |h'|` with
/// `h = c - r cos φ` removing the endpoint singularities.
fn half_period_integral(h_max: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h_min = trough(h_max);
    let c = 0.5 * (h_max + h_min);
    let r = 0.5 * (h_max - h_min);
    let e = potential(h_max);
    gauss_legendre(96)
        .into_iter()
        .map(|(x, w)| {
            let phi = 0.5 * PI * (x + 1.0);
            let h = c - r * phi.cos();
            let speed = (2.0 * (e - potential(h))).sqrt();
            0.5 * PI * w * f(h) * r * phi.sin() / speed
        })
        .sum()
}

fn oracle_tip(target: f64) -> f64 {
    // The half period decreases from π/√2 towards π/2 as the tip grows.
    let (mut lo, mut hi) = (1.0 + 1e-9, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if half_period_integral(mid, |_| 1.0) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn quadrature_agrees_with_shooting() {
    for h_max in [1.1, 1.5, 2.0, 3.0] {
        let shot = shoot_half_period(h_max).unwrap();
        let oracle = half_period_integral(h_max, |_| 1.0);
        assert!(
            (shot.half_period - oracle).abs() < 1e-10,
            "{h_max}: {} vs {oracle}",
            shot.half_period
        );
        assert!((shot.h_min - trough(h_max)).abs() < 1e-10);
    }
}

#[test]
fn class_tips_match_oracle() {
    for (m, n) in [(2, 3), (3, 5), (4, 7), (5, 8)] {
        let class = CurveClass::new(m, n).unwrap();
        let solved = solve_class(class, 1e-13).unwrap();
        let oracle = oracle_tip(class.half_period());
        assert!(
            (solved.h_max - oracle).abs() < 1e-8,
            "({m}, {n}): {} vs {oracle}",
            solved.h_max
        );
    }
}

#[test]
fn two_three_constants() {
    // Frozen from the quadrature oracle above.
    const H_MAX: f64 = 1.933_597_070_915_4;
    const LENGTH: f64 = 14.935_492_552_293_5;
    const COEFFICIENT: f64 = -4.239_681_318_9;

    let tip = oracle_tip(2.0 * PI / 3.0);
    assert!((tip - H_MAX).abs() < 1e-9);
    // L = ∫ 1/κ dθ = ∫ 1/h dθ over 2n half periods.
    let length = 6.0 * half_period_integral(tip, |h| 1.0 / h);
    assert!((length - LENGTH).abs() < 1e-9);
    let coefficient = 6.0 * half_period_integral(tip, |h| h * h - 1.0 / (h * h));
    assert!((coefficient - COEFFICIENT).abs() < 1e-8);

    let base = build_profile(CurveClass::new(2, 3).unwrap(), &Grid::new(2, 512).unwrap()).unwrap();
    assert!((base.shooting().h_max - H_MAX).abs() < 1e-9);
    assert!((base.arc_length() - LENGTH).abs() < 1e-9);
    let ic = instability_coefficient(&base);
    assert!((ic.coefficient - COEFFICIENT).abs() < 1e-8);
    assert!(ic.coefficient < ic.poincare_bound && ic.poincare_bound < 0.0);
    // κ = h, so both entropies agree on the stationary curve.
    let (e, f) = stationary_entropies(&base).unwrap();
    assert!((e - f).abs() < 1e-10);
}

#[test]
fn other_classes_have_negative_coefficient() {
    for ((m, n), len) in [((3, 5), 2048), ((5, 8), 2048)] {
        let class = CurveClass::new(m, n).unwrap();
        let base = build_profile(class, &Grid::new(m, len).unwrap()).unwrap();
        let tip = base.shooting().h_max;
        let oracle = 2.0 * f64::from(n) * half_period_integral(tip, |h| h * h - 1.0 / (h * h));
        let ic = instability_coefficient(&base);
        assert!(
            (ic.coefficient - oracle).abs() < 1e-6 * oracle.abs(),
            "({m}, {n})"
        );
        assert!(ic.coefficient < 0.0);
    }
}
