use csf_core::al_profile::{build_profile, perturb};
use csf_core::flow::{from_normalized, to_normalized, Integrator, Representation};
use csf_core::functionals::{algebraic_area, entropy_sum, instability_coefficient};
use csf_core::spectral::ProfileKind;
use csf_core::{ALProfile, CurveClass, FlowState, Frame, Grid, PeriodicProfile, RunConfig};
use proptest::prelude::*;

fn base_23(len: usize) -> ALProfile {
    build_profile(CurveClass::new(2, 3).unwrap(), &Grid::new(2, len).unwrap()).unwrap()
}

fn unpinned() -> RunConfig {
    RunConfig {
        pin_area: false,
        ..RunConfig::default()
    }
}

#[test]
fn frames_agree_before_blowup() {
    let base = base_23(256);
    let p = perturb(&base, -0.02).unwrap();
    let cfg = unpinned();
    let mut plain = Integrator::new(
        FlowState::support(p.profile.clone(), Frame::Unnormalized, -0.02).unwrap(),
        &cfg,
    )
    .unwrap();
    let mut scaled = Integrator::new(
        FlowState::support(p.profile, Frame::Normalized, -0.02).unwrap(),
        &cfg,
    )
    .unwrap();
    for t in [0.1, 0.25, 0.4, 0.45] {
        plain.advance_to(t).unwrap();
        let tau = -0.5 * (1.0 - 2.0 * t).ln();
        scaled.advance_to(tau).unwrap();
        let mapped = to_normalized(&plain.state()).unwrap();
        assert!((mapped.time - tau).abs() < 1e-12);
        let diff = mapped.profile.max_abs_diff(&scaled.state().profile);
        assert!(diff < 1e-6, "t = {t}: {diff}");
    }
}

#[test]
fn area_law_without_pinning() {
    // dA/dt = -2mπ for a curve of turning number m.
    let base = base_23(256);
    let p = perturb(&base, 0.03).unwrap();
    let a0 = algebraic_area(&p.profile);
    let mut it = Integrator::new(
        FlowState::support(p.profile, Frame::Unnormalized, 0.03).unwrap(),
        &unpinned(),
    )
    .unwrap();
    it.advance_to(0.2).unwrap();
    let a = algebraic_area(&it.state().profile);
    assert!((a - (a0 - 4.0 * std::f64::consts::PI * 0.2)).abs() < 1e-9);
}

fn symmetry_defect(h: &PeriodicProfile, fold: u32) -> f64 {
    let interp = h.interpolant();
    let shift = h.grid().period() / f64::from(fold);
    (0..200)
        .map(|i| 0.0317 * i as f64)
        .map(|t| {
            let v = interp.value(t);
            (v - interp.value(-t))
                .abs()
                .max((v - interp.value(t + shift)).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn symmetry_survives_without_projection() {
    let base = base_23(256);
    let p = perturb(&base, -0.03).unwrap();
    assert!(symmetry_defect(&p.profile, 3) < 1e-12);
    let cfg = RunConfig {
        symmetry_fold: None,
        ..RunConfig::default()
    };
    let mut it = Integrator::new(
        FlowState::support(p.profile, Frame::Normalized, -0.03).unwrap(),
        &cfg,
    )
    .unwrap();
    it.advance_to(0.5).unwrap();
    assert!(symmetry_defect(&it.state().profile, 3) < 1e-9);
}

#[test]
fn second_variation_matches_finite_difference() {
    let base = base_23(512);
    let d = 1e-3;
    let f = |eps: f64| entropy_sum(&perturb(&base, eps).unwrap().profile).unwrap();
    let fd = (f(d) - 2.0 * f(0.0) + f(-d)) / (d * d);
    let coefficient = instability_coefficient(&base).coefficient;
    assert!(
        (fd - coefficient).abs() < 1e-4 * coefficient.abs(),
        "{fd} vs {coefficient}"
    );
}

proptest! {
    #[test]
    fn frame_maps_round_trip(t in 0.0..0.499f64, scale in 0.2..5.0f64, curvature in any::<bool>()) {
        let g = Grid::new(1, 64).unwrap();
        let (kind, repr) = if curvature {
            (ProfileKind::Curvature, Representation::Curvature)
        } else {
            (ProfileKind::Support, Representation::Support)
        };
        let profile = PeriodicProfile::from_fn(&g, kind, |th| scale * (1.0 + 0.1 * th.cos()));
        let state = FlowState::new(profile, t, Frame::Unnormalized, repr, 0.0).unwrap();
        let there = to_normalized(&state).unwrap();
        let back = from_normalized(&there).unwrap();
        prop_assert!((back.time - t).abs() < 1e-12);
        prop_assert!(back.profile.max_abs_diff(&state.profile) < 1e-12 * scale);
        let factor = (1.0 - 2.0 * t).sqrt();
        let expect = if curvature { factor } else { 1.0 / factor };
        prop_assert!((there.profile.values()[0] - expect * state.profile.values()[0]).abs()
            < 1e-12 * expect * scale);
    }
}
