//! Leaf geometry against polygonal oracles.

use csf_core::al_profile::{build_profile, perturb};
use csf_core::geometry::{find_leaf, point_at, LeafGeometry};
use csf_core::{CurveClass, Grid, PeriodicProfile};

fn base_23() -> csf_core::ALProfile {
    build_profile(CurveClass::new(2, 3).unwrap(), &Grid::new(2, 512).unwrap()).unwrap()
}

/// Shoelace area of the polygon through `γ(θ)` on `[-θ_c, θ_c]`, closed by
/// the chord back to the start.
fn polygon_leaf_area(h: &PeriodicProfile, theta_c: f64, samples: usize) -> f64 {
    let interp = h.interpolant();
    let pts: Vec<[f64; 2]> = (0..=samples)
        .map(|i| {
            point_at(
                &interp,
                -theta_c + 2.0 * theta_c * i as f64 / samples as f64,
            )
        })
        .collect();
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn segment_crossing(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> Option<(f64, f64)> {
    let d1 = [q[0] - p[0], q[1] - p[1]];
    let d2 = [s[0] - r[0], s[1] - r[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den == 0.0 {
        return None;
    }
    let w = [r[0] - p[0], r[1] - p[1]];
    let a = (w[0] * d2[1] - w[1] * d2[0]) / den;
    let b = (w[0] * d1[1] - w[1] * d1[0]) / den;
    ((0.0..1.0).contains(&a) && (0.0..1.0).contains(&b)).then_some((a, b))
}

/// Smallest `θ > 0` at which the polyline on `[0, θ]` meets its mirror
/// image on `[-θ, 0]`, found by brute force over segment pairs.
fn polyline_self_crossing(h: &PeriodicProfile, limit: f64, samples: usize) -> Option<f64> {
    let interp = h.interpolant();
    let step = limit / samples as f64;
    let upper: Vec<[f64; 2]> = (0..=samples)
        .map(|i| point_at(&interp, i as f64 * step))
        .collect();
    let lower: Vec<[f64; 2]> = upper.iter().map(|p| [p[0], -p[1]]).collect();
    for j in 1..samples {
        for i in 1..j {
            if let Some((_, b)) = segment_crossing(upper[j], upper[j + 1], lower[i], lower[i + 1]) {
                return Some((i as f64 + b) * step);
            }
        }
        // A crossing of the mirror pair at the same parameter lies on the
        // x-axis.
        if upper[j][1].signum() != upper[j + 1][1].signum() {
            if let Some((a, _)) = segment_crossing(upper[j], upper[j + 1], lower[j], lower[j + 1]) {
                return Some((j as f64 + a) * step);
            }
            return Some((j as f64 + 0.5) * step);
        }
    }
    None
}

fn check_leaf(h: &PeriodicProfile, leaf: &LeafGeometry) {
    let polygon = polygon_leaf_area(h, leaf.theta_c, 10_000);
    assert!(
        (polygon - leaf.area).abs() < 1e-6,
        "{polygon} vs {}",
        leaf.area
    );
    let crossing = polyline_self_crossing(h, leaf.theta_c * 1.2, 2_000).unwrap();
    assert!(
        (crossing - leaf.theta_c).abs() < 5e-3,
        "{crossing} vs {}",
        leaf.theta_c
    );
}

#[test]
fn stationary_leaf_matches_polygon() {
    let base = base_23();
    let leaf = find_leaf(base.profile(), 3).unwrap();
    check_leaf(base.profile(), &leaf);
    // h (h + h_θθ) = 1 on the stationary curve.
    assert!((leaf.area - leaf.theta_c).abs() < 1e-9);
    assert!(leaf.closing_point[0] < leaf.tip[0]);
}

#[test]
fn perturbed_leaves_match_polygon() {
    let base = base_23();
    for eps in [-0.05, -0.01, 0.02, 0.05] {
        let p = perturb(&base, eps).unwrap();
        let leaf = find_leaf(&p.profile, 3).unwrap();
        check_leaf(&p.profile, &leaf);
    }
}
