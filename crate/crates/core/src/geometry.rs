//! Planar curves from support functions, and leaf areas.
//!
//! The point with normal angle `θ` is
//! `γ(θ) = h(θ) (cos θ, sin θ) + h_θ(θ) (-sin θ, cos θ)`, so
//! `γ'(θ) = (h + h_θθ)(-sin θ, cos θ)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::DiagnosticsRecord;
use crate::spectral::{Interpolant, PeriodicProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub theta: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// `1/(h + h_θθ)` at each node, unchecked.
    pub curvature: Vec<f64>,
}

impl CurveSample {
    pub const CSV_HEADER: &'static str = "theta,x,y,kappa";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for ((t, p), k) in self.theta.iter().zip(&self.points).zip(&self.curvature) {
            let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e},{k:.16e}", p[0], p[1]);
        }
        out
    }

    /// `½ Σ (x_i y_{i+1} - x_{i+1} y_i)` over the closed polygon.
    pub fn shoelace_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[(i + 1) % n];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }
}

fn point(h: f64, hp: f64, theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [h * c - hp * s, h * s + hp * c]
}

pub fn reconstruct(h: &PeriodicProfile) -> CurveSample {
    let d1 = h.differentiate(1);
    let d2 = h.differentiate(2);
    let theta: Vec<f64> = h.grid().nodes().collect();
    let points = theta
        .iter()
        .zip(h.values().iter().zip(d1.values()))
        .map(|(&t, (&v, &dv))| point(v, dv, t))
        .collect();
    let curvature = h
        .values()
        .iter()
        .zip(d2.values())
        .map(|(v, dd)| (v + dd).recip())
        .collect();
    CurveSample {
        theta,
        points,
        curvature,
    }
}

/// `γ(θ)` from the trigonometric interpolant of `h`.
pub fn point_at(interp: &Interpolant, theta: f64) -> [f64; 2] {
    point(interp.value(theta), interp.derivative(theta, 1), theta)
}

/// The loop `θ ∈ [-θ_c, θ_c]` around the tip at `θ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafGeometry {
    pub theta_c: f64,
    pub closing_point: [f64; 2],
    pub area: f64,
    pub tip: [f64; 2],
}

fn y_at(interp: &Interpolant, theta: f64) -> f64 {
    point_at(interp, theta)[1]
}

/// Finds the leaf of an even profile with tip at `θ = 0` whose `n`-fold
/// symmetry is given by `fold`.
///
/// By the mirror symmetry a self-crossing `γ(θ_c) = γ(-θ_c)` lies on the
/// x-axis, so `θ_c` is the first transversal root of `y(θ)` in
/// `(0, 2mπ/fold)`. Roots where the tangent directions at `±θ_c` agree
/// (`2θ_c ≡ 0 mod 2π`) are tangential overlaps of a multiply covered curve,
/// not crossings, and are skipped, as are roots on the far side of the tip.
pub fn find_leaf(h: &PeriodicProfile, fold: u32) -> Result<LeafGeometry> {
    let grid = h.grid();
    let window = grid.period() / f64::from(fold.max(1));
    let interp = h.interpolant();
    let tip = point_at(&interp, 0.0);
    let spacing = grid.spacing();
    // Nodal values of y are exact for the interpolant; only the bracketed
    // root needs off-grid evaluation.
    let curve = reconstruct(h);
    let last = ((window / spacing).ceil() as usize).min(grid.len());
    let y_node = |i: usize| {
        if i as f64 * spacing >= window {
            y_at(&interp, window)
        } else {
            curve.points[i][1]
        }
    };
    let mut prev = y_node(1);
    for i in 2..=last {
        let hi = (i as f64 * spacing).min(window);
        let lo = (i - 1) as f64 * spacing;
        let y_hi = y_node(i);
        if prev.signum() != y_hi.signum() && prev != 0.0 {
            let root = bisect(|t| y_at(&interp, t), lo, hi, prev);
            let crossing = point_at(&interp, root);
            let turn = (2.0 * root).rem_euclid(2.0 * PI);
            let tangential = turn.min(2.0 * PI - turn) < 1e-6;
            if !tangential && crossing[0] < tip[0] {
                return Ok(LeafGeometry {
                    theta_c: root,
                    closing_point: [crossing[0], 0.0],
                    area: sector_area(h, root),
                    tip,
                });
            }
        }
        prev = y_hi;
    }
    Err(Error::NoCrossing)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `½ ∫_{-θ_c}^{θ_c} h (h + h_θθ) dθ`.
pub fn sector_area(h: &PeriodicProfile, theta_c: f64) -> f64 {
    let d2 = h.differentiate(2);
    let density = h.zip_map(&d2, |a, b| a * (a + b));
    0.5 * density.interpolant().integral(-theta_c, theta_c)
}

/// Least-squares slope of `leaf_area` against time over the leading records
/// that carry a leaf area and have `min_h > 0`.
pub fn leaf_area_rate(records: &[DiagnosticsRecord]) -> Result<f64> {
    let window: Vec<(f64, f64)> = records
        .iter()
        .map_while(|r| r.leaf_area.filter(|_| r.min_h > 0.0).map(|a| (r.time, a)))
        .collect();
    if window.len() < 3 {
        return Err(Error::InsufficientRecords {
            needed: 3,
            found: window.len(),
        });
    }
    let n = window.len() as f64;
    let mean_t = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_a = window.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = window.iter().fold((0.0, 0.0), |(sxy, sxx), &(t, a)| {
        let dt = t - mean_t;
        (sxy + dt * (a - mean_a), sxx + dt * dt)
    });
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, ProfileKind};

    #[test]
    fn circle_reconstruction() {
        let g = Grid::new(1, 64).unwrap();
        let c = reconstruct(&PeriodicProfile::constant(&g, ProfileKind::Support, 2.0));
        for (p, t) in c.points.iter().zip(&c.theta) {
            assert!((p[0] - 2.0 * t.cos()).abs() < 1e-13);
            assert!((p[1] - 2.0 * t.sin()).abs() < 1e-13);
        }
        assert!(c.curvature.iter().all(|k| (k - 0.5).abs() < 1e-14));
        let polygon = 32.0 * 4.0 * (2.0 * PI / 64.0).sin();
        assert!((c.shoelace_area() - polygon).abs() < 1e-12);
        assert!(c.to_csv().starts_with("theta,x,y,kappa\n"));
    }

    #[test]
    fn embedded_and_doubled_circles_have_no_leaf() {
        let g = Grid::new(1, 64).unwrap();
        let h = PeriodicProfile::constant(&g, ProfileKind::Support, 1.0);
        assert_eq!(find_leaf(&h, 1), Err(Error::NoCrossing));
        let g = Grid::new(2, 64).unwrap();
        let h = PeriodicProfile::constant(&g, ProfileKind::Support, 1.0);
        assert_eq!(find_leaf(&h, 3), Err(Error::NoCrossing));
    }

    #[test]
    fn rate_needs_three_records() {
        assert!(matches!(
            leaf_area_rate(&[]),
            Err(Error::InsufficientRecords {
                needed: 3,
                found: 0
            })
        ));
    }
}
