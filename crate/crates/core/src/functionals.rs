//! Monitored quantities: algebraic area, arc length, the entropies
//! `𝓔 = ∫ log κ` and `𝓕 = ∫ log h`, the dissipation functional
//! `u = ∫ κ (κ + κ_θθ)`, the leaf width `W`, and the second-variation
//! coefficient of `𝓔 + 𝓕` at a stationary profile.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::al_profile::ALProfile;
use crate::error::{Error, Result};
use crate::flow::{curvature_of, FlowState, Representation};
use crate::geometry;
use crate::spectral::PeriodicProfile;

/// `A(h) = ½ ∫ h (h + h_θθ) dθ`.
pub fn algebraic_area(h: &PeriodicProfile) -> f64 {
    let d2 = h.differentiate(2);
    0.5 * h.zip_map(&d2, |a, b| a * (a + b)).integrate()
}

/// `½ ∫ (h² - h_θ²) dθ`, the integrated-by-parts form of [`algebraic_area`].
pub fn algebraic_area_by_parts(h: &PeriodicProfile) -> f64 {
    let d1 = h.differentiate(1);
    0.5 * h.zip_map(&d1, |a, b| a * a - b * b).integrate()
}

/// `L = ∫ h dθ = ∫ (h + h_θθ) dθ`.
pub fn arc_length(h: &PeriodicProfile) -> f64 {
    h.integrate()
}

pub fn entropy_e(kappa: &PeriodicProfile) -> Result<f64> {
    let min = kappa.min();
    if min <= 0.0 {
        return Err(Error::NonPositiveCurvature(min));
    }
    Ok(kappa.map(f64::ln).integrate())
}

/// `∫ log h`, absent once `min h <= 0`.
pub fn entropy_f(h: &PeriodicProfile) -> Option<f64> {
    (h.min() > 0.0).then(|| h.map(f64::ln).integrate())
}

/// `u = ∫ (κ² - κ_θ²)`.
pub fn u_functional(kappa: &PeriodicProfile) -> f64 {
    let d1 = kappa.differentiate(1);
    kappa.zip_map(&d1, |k, dk| k * k - dk * dk).integrate()
}

/// `∫ κ (κ + κ_θθ)`, the literal form of [`u_functional`].
pub fn u_functional_literal(kappa: &PeriodicProfile) -> f64 {
    let d2 = kappa.differentiate(2);
    kappa.zip_map(&d2, |k, d| k * (k + d)).integrate()
}

/// Leaf width `h(π/2) + h(-π/2)` across the tip axis `θ = 0`.
pub fn width_w(h: &PeriodicProfile) -> f64 {
    h.eval_at(FRAC_PI_2) + h.eval_at(-FRAC_PI_2)
}

/// Second ε-derivative of `𝓔 + 𝓕` at a stationary profile, with the pieces
/// of its Poincaré bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstabilityCoefficient {
    /// `2mπ (⨍h² - ⨍1/h²)`.
    pub coefficient: f64,
    pub mean_h2: f64,
    pub mean_inv_h2: f64,
    /// `⨍h² - 2⨍h_θ² + ⨍h_θθ²`, equal to `⨍1/h²` when `h + h_θθ = 1/h`.
    pub mean_inv_h2_expanded: f64,
    /// `∫ h_θ²`.
    pub dirichlet: f64,
    /// `(2 - n²/m²) ∫ h_θ²`.
    pub poincare_bound: f64,
}

impl InstabilityCoefficient {
    pub fn decomposition_defect(&self) -> f64 {
        (self.mean_inv_h2 - self.mean_inv_h2_expanded).abs()
    }
}

pub fn instability_coefficient(base: &ALProfile) -> InstabilityCoefficient {
    let h = base.profile();
    let d1 = h.differentiate(1);
    let d2 = h.differentiate(2);
    let period = h.grid().period();
    let mean_h2 = h.map(|v| v * v).mean();
    let mean_inv_h2 = h.map(|v| 1.0 / (v * v)).mean();
    let mean_hp2 = d1.map(|v| v * v).mean();
    let mean_hpp2 = d2.map(|v| v * v).mean();
    let class = base.class();
    let ratio = f64::from(class.n()) / f64::from(class.m());
    InstabilityCoefficient {
        coefficient: period * (mean_h2 - mean_inv_h2),
        mean_h2,
        mean_inv_h2,
        mean_inv_h2_expanded: mean_h2 - 2.0 * mean_hp2 + mean_hpp2,
        dirichlet: period * mean_hp2,
        poincare_bound: (2.0 - ratio * ratio) * period * mean_hp2,
    }
}

/// What to report in the `leaf_area` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafMode {
    #[default]
    Off,
    /// Area of the tip-0 leaf of an `n`-leaf curve.
    Leaf { fold: u32 },
    /// The whole curve counted as one leaf (embedded curves).
    WholeCurve,
}

/// One time slice of every monitored functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub area: f64,
    pub arc_length: f64,
    pub entropy_e: f64,
    pub entropy_f: Option<f64>,
    pub u: f64,
    pub width: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub min_k: f64,
    pub max_k: f64,
    pub zero_count: usize,
    pub leaf_area: Option<f64>,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "time,A,L,E,F,u,W,min_h,max_h,min_k,max_k,zero_count,leaf_area";

    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut row = String::new();
        let _ = write!(
            row,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.time,
            self.area,
            self.arc_length,
            self.entropy_e,
            opt(self.entropy_f),
            self.u,
            self.width,
            self.min_h,
            self.max_h,
            self.min_k,
            self.max_k,
            self.zero_count,
            opt(self.leaf_area),
        );
        row
    }

    /// `𝓔'(τ)` predicted by the dissipation identity, `u - 2mπ`.
    pub fn entropy_rate(&self, period: f64) -> f64 {
        self.u - period
    }
}

/// Evaluates every functional on a support-function state.
pub fn record(state: &FlowState, leaf: LeafMode) -> Result<DiagnosticsRecord> {
    if state.representation != Representation::Support {
        return Err(Error::StateMismatch(
            "diagnostics need the support representation".into(),
        ));
    }
    let h = &state.profile;
    let kappa = curvature_of(h)?;
    let (_, min_h) = h.refine_extremum(h.argmin());
    let (_, max_h) = h.refine_extremum(h.argmax());
    let (_, min_k) = kappa.refine_extremum(kappa.argmin());
    let (_, max_k) = kappa.refine_extremum(kappa.argmax());
    let leaf_area = match leaf {
        LeafMode::Off => None,
        LeafMode::Leaf { fold } => geometry::find_leaf(h, fold).ok().map(|l| l.area),
        LeafMode::WholeCurve => Some(algebraic_area(h)),
    };
    Ok(DiagnosticsRecord {
        time: state.time,
        area: algebraic_area(h),
        arc_length: arc_length(h),
        entropy_e: entropy_e(&kappa)?,
        entropy_f: entropy_f(h),
        u: u_functional(&kappa),
        width: width_w(h),
        min_h,
        max_h,
        min_k,
        max_k,
        zero_count: h.differentiate(1).count_sign_changes(),
        leaf_area,
    })
}

/// `(𝓔 + 𝓕)` of a support profile, `∫ log κ + ∫ log h`.
pub fn entropy_sum(h: &PeriodicProfile) -> Result<f64> {
    let kappa = curvature_of(h)?;
    let f = entropy_f(h).ok_or(Error::NonPositiveCurvature(h.min()))?;
    Ok(entropy_e(&kappa)? + f)
}

/// Convenience: the curvature profile of a stationary profile is the
/// profile itself, so `𝓔 = 𝓕` there.
pub fn stationary_entropies(base: &ALProfile) -> Result<(f64, f64)> {
    let e = entropy_e(&base.curvature())?;
    let f = entropy_f(base.profile()).ok_or(Error::NonPositiveCurvature(base.profile().min()))?;
    Ok((e, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::al_profile::{build_profile, CurveClass};
    use crate::flow::Frame;
    use crate::spectral::{Grid, ProfileKind};
    use std::f64::consts::PI;

    fn support(grid: &Grid, f: impl Fn(f64) -> f64) -> PeriodicProfile {
        PeriodicProfile::from_fn(grid, ProfileKind::Support, f)
    }

    #[test]
    fn area_examples() {
        let g2 = Grid::new(2, 64).unwrap();
        assert!((algebraic_area(&support(&g2, |_| 1.0)) - 2.0 * PI).abs() < 1e-12);
        let g1 = Grid::new(1, 64).unwrap();
        let h = support(&g1, |t| 1.0 + 0.3 * t.cos());
        assert!((algebraic_area(&h) - PI).abs() < 1e-12);
        assert!((algebraic_area_by_parts(&h) - PI).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let g = Grid::new(2, 64).unwrap();
        let one = PeriodicProfile::constant(&g, ProfileKind::Curvature, 1.0);
        assert!(entropy_e(&one).unwrap().abs() < 1e-14);
        let c = PeriodicProfile::constant(&g, ProfileKind::Curvature, 3.0);
        assert!((entropy_e(&c).unwrap() - 4.0 * PI * 3f64.ln()).abs() < 1e-12);
        assert!(entropy_e(&c.map(|v| v - 3.0)).is_err());
        assert_eq!(entropy_f(&support(&g, |_| 1.0)), Some(0.0));
        assert_eq!(entropy_f(&support(&g, |t| t.cos())), None);
    }

    #[test]
    fn u_examples() {
        let g2 = Grid::new(2, 64).unwrap();
        let one = PeriodicProfile::constant(&g2, ProfileKind::Curvature, 1.0);
        assert!((u_functional(&one) - 4.0 * PI).abs() < 1e-12);
        let g1 = Grid::new(1, 64).unwrap();
        let k =
            PeriodicProfile::from_fn(&g1, ProfileKind::Curvature, |t| 1.0 + 0.1 * (2.0 * t).cos());
        let exact = 2.0 * PI - 0.03 * PI;
        assert!((u_functional(&k) - exact).abs() < 1e-12);
        assert!((u_functional_literal(&k) - exact).abs() < 1e-12);
    }

    #[test]
    fn width_examples() {
        let g = Grid::new(2, 128).unwrap();
        assert!((width_w(&support(&g, |_| 1.0)) - 2.0).abs() < 1e-12);
        let h = support(&g, |t| 1.0 + 0.2 * (1.5 * t).cos());
        assert!((width_w(&h) - 2.0 * h.eval_at(FRAC_PI_2)).abs() < 1e-12);
    }

    #[test]
    fn circle_coefficient_vanishes() {
        // A constant profile is not an ALProfile, but the formula is what matters.
        let g = Grid::new(2, 64).unwrap();
        let h = support(&g, |_| 1.0);
        let coef = g.period() * (h.map(|v| v * v).mean() - h.map(|v| 1.0 / (v * v)).mean());
        assert_eq!(coef, 0.0);
    }

    #[test]
    fn record_of_m_circle() {
        let g = Grid::new(2, 128).unwrap();
        let state = FlowState::support(support(&g, |_| 1.0), Frame::Normalized, 0.0).unwrap();
        let r = record(&state, LeafMode::Off).unwrap();
        assert!((r.area - 2.0 * PI).abs() < 1e-12);
        assert!((r.arc_length - 4.0 * PI).abs() < 1e-12);
        assert!(r.entropy_e.abs() < 1e-12);
        assert_eq!(r.entropy_f, Some(0.0));
        assert!((r.u - 4.0 * PI).abs() < 1e-12);
        assert!((r.width - 2.0).abs() < 1e-12);
        assert_eq!(r.zero_count, 0);
        let row = r.to_csv_row();
        assert_eq!(row.split(',').count(), 13);
        assert!(row.ends_with(','));
    }

    #[test]
    fn stationary_record_has_zero_entropy_rate() {
        let class = CurveClass::new(2, 3).unwrap();
        let base = build_profile(class, &Grid::new(2, 512).unwrap()).unwrap();
        let state = FlowState::support(base.profile().clone(), Frame::Normalized, 0.0).unwrap();
        let r = record(&state, LeafMode::Leaf { fold: 3 }).unwrap();
        assert!(r.entropy_rate(class.period()).abs() < 1e-8);
        assert!(r.leaf_area.unwrap() > 0.0);
        assert_eq!(r.zero_count, 6);
        let (e, f) = stationary_entropies(&base).unwrap();
        assert!((e - f).abs() < 1e-10);
        let k = base.curvature();
        assert!((u_functional(&k) - u_functional_literal(&k)).abs() < 1e-10);
        let ic = instability_coefficient(&base);
        assert!(ic.decomposition_defect() < 1e-8);
        assert!(ic.coefficient < 0.0);
    }
}
