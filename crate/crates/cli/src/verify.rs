//! The acceptance criteria, evaluated at a configurable resolution.
//!
//! Expensive runs (the ε = ±0.05 normalized runs, the unnormalized runs and
//! the stationary profiles) are computed once and shared between criteria.

use std::cell::OnceCell;
use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use csf_core::al_profile::perturb;
use csf_core::flow::{
    cross_check, curvature_of, run_observed, FlowState, Frame, Integrator, Representation,
    RunConfig, RunOutcome, Verdict,
};
use csf_core::functionals::{self, instability_coefficient, DiagnosticsRecord, LeafMode};
use csf_core::geometry::leaf_area_rate;
use csf_core::spectral::ProfileKind;
use csf_core::{ALProfile, CurveClass, Grid, PeriodicProfile};

use crate::experiment::{self, build_resolved, class_config, half_area, perturbed_state};

/// Criteria whose literal statement cannot be met by any faithful
/// implementation; see the README section on known results.
pub const KNOWN_UNATTAINABLE: &[u8] = &[6, 10];

pub const TEST_CLASSES: [(u32, u32); 4] = [(2, 3), (3, 5), (4, 7), (5, 8)];
pub const SWEEP_EPS: [f64; 6] = [-0.05, -0.02, -0.01, 0.01, 0.02, 0.05];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub class: (u32, u32),
    pub grid_n: usize,
    pub run: RunConfig,
    pub jobs: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            class: (2, 3),
            grid_n: 512,
            run: RunConfig::default(),
            jobs: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

fn check(label: &str, passed: bool, detail: String) -> Check {
    Check {
        label: label.to_string(),
        passed,
        detail,
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let failing: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.label.as_str())
            .collect();
        let mut line = format!("[{status}] {:>2}. {}", self.id, self.title);
        if let Some(e) = &self.error {
            let _ = write!(line, " (error: {e})");
        } else if !failing.is_empty() {
            let _ = write!(line, " (failing: {})", failing.join("; "));
        }
        line
    }
}

pub fn format_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}", r.summary_line());
        for c in &r.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "        {mark} {}: {}", c.label, c.detail);
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed}/{} criteria passed", reports.len());
    out
}

struct PositiveRun {
    outcome: RunOutcome,
    /// Largest distance, in grid cells, of the leaf-window extrema of
    /// `h̃` and `κ̃` from `θ = 0` and `θ = mπ/n`.
    worst_offset_cells: f64,
}

type Lazy<T> = OnceCell<std::result::Result<T, String>>;

fn get<T>(cell: &Lazy<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    cell.get_or_init(|| init().map_err(|e| format!("{e:#}")))
        .as_ref()
        .map_err(|e| anyhow!("{e}"))
}

struct Context<'a> {
    cfg: &'a VerifyConfig,
    class: CurveClass,
    run_cfg: RunConfig,
    base: Lazy<ALProfile>,
    class_profiles: Lazy<Vec<ALProfile>>,
    positive: Lazy<PositiveRun>,
    negative: Lazy<RunOutcome>,
    unnormalized: Lazy<(RunOutcome, RunOutcome)>,
    stationary: Lazy<(Vec<DiagnosticsRecord>, f64, Verdict)>,
}

fn extremum_offsets(p: &PeriodicProfile, half: f64) -> f64 {
    let spacing = p.grid().spacing();
    let tip = p.grid().node(p.argbest_in(0.0, half, true));
    let trough = p.grid().node(p.argbest_in(0.0, half, false));
    (tip.abs() / spacing).max((trough - half).abs() / spacing)
}

impl<'a> Context<'a> {
    fn new(cfg: &'a VerifyConfig) -> Result<Self> {
        let class = CurveClass::new(cfg.class.0, cfg.class.1)?;
        Ok(Self {
            cfg,
            class,
            run_cfg: class_config(class, &cfg.run),
            base: OnceCell::new(),
            class_profiles: OnceCell::new(),
            positive: OnceCell::new(),
            negative: OnceCell::new(),
            unnormalized: OnceCell::new(),
            stationary: OnceCell::new(),
        })
    }

    fn base(&self) -> Result<&ALProfile> {
        get(&self.base, || {
            let grid = Grid::new(self.class.m(), self.cfg.grid_n)?;
            Ok(csf_core::al_profile::build_profile(self.class, &grid)?)
        })
    }

    fn class_profiles(&self) -> Result<&Vec<ALProfile>> {
        get(&self.class_profiles, || {
            TEST_CLASSES
                .iter()
                .map(|&(m, n)| build_resolved(CurveClass::new(m, n)?, self.cfg.grid_n))
                .collect()
        })
    }

    fn positive(&self) -> Result<&PositiveRun> {
        get(&self.positive, || {
            let base = self.base()?;
            let state = perturbed_state(base, 0.05, Frame::Normalized)?;
            let half = self.class.half_period();
            let mut worst = 0.0_f64;
            let outcome = run_observed(state, &self.run_cfg, |s| {
                worst = worst.max(extremum_offsets(&s.profile, half));
                if let Ok(k) = curvature_of(&s.profile) {
                    worst = worst.max(extremum_offsets(&k, half));
                } else {
                    worst = f64::INFINITY;
                }
            })?;
            Ok(PositiveRun {
                outcome,
                worst_offset_cells: worst,
            })
        })
    }

    fn negative(&self) -> Result<&RunOutcome> {
        get(&self.negative, || {
            experiment::evolve(self.base()?, -0.05, Frame::Normalized, &self.cfg.run)
        })
    }

    fn unnormalized(&self) -> Result<&(RunOutcome, RunOutcome)> {
        get(&self.unnormalized, || {
            let cfg = RunConfig {
                horizon: 1.0,
                ..self.cfg.run.clone()
            };
            let base = self.base()?;
            Ok((
                experiment::evolve(base, 0.05, Frame::Unnormalized, &cfg)?,
                experiment::evolve(base, -0.05, Frame::Unnormalized, &cfg)?,
            ))
        })
    }

    /// Records of the ε = 0 normalized flow over `τ ∈ [0, 1]`, the largest
    /// deviation from `h_{m,n}`, and the verdict of the full run controller.
    fn stationary(&self) -> Result<&(Vec<DiagnosticsRecord>, f64, Verdict)> {
        get(&self.stationary, || {
            let base = self.base()?;
            let state = perturbed_state(base, 0.0, Frame::Normalized)?;
            let mut integ = Integrator::new(state.clone(), &self.run_cfg)?;
            let mut records = vec![functionals::record(&state, LeafMode::Off)?];
            let mut worst = 0.0_f64;
            let steps = (1.0 / self.run_cfg.record_every).round() as u64;
            for k in 1..=steps {
                integ.advance_to(k as f64 * self.run_cfg.record_every)?;
                let s = integ.state();
                worst = worst.max(s.profile.max_abs_diff(base.profile()));
                records.push(functionals::record(&s, LeafMode::Off)?);
            }
            let verdict = csf_core::flow::run(state, &self.run_cfg)?.verdict;
            Ok((records, worst, verdict))
        })
    }
}

fn fmt_e(v: f64) -> String {
    format!("{v:.3e}")
}

fn c1_stationary(ctx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (&(m, n), base) in TEST_CLASSES.iter().zip(ctx.class_profiles()?) {
        let started = std::time::Instant::now();
        let rebuilt = build_resolved(CurveClass::new(m, n)?, base.grid().len())?;
        let elapsed = started.elapsed().as_secs_f64();
        let h = rebuilt.profile();
        let grid = h.grid();
        let len = grid.len();
        // Evaluated from the cosine series at the nodes; FFT differentiation
        // carries O(N²ε) rounding that exceeds the tolerance at N = 8192.
        let residual = rebuilt.residual();
        let area = functionals::algebraic_area(h);
        let even = (1..len)
            .map(|i| (h.values()[i] - h.values()[len - i]).abs())
            .fold(0.0_f64, f64::max);
        let interp = h.interpolant();
        let shift = 2.0 * f64::from(m) * PI / f64::from(n);
        let periodic = (0..len)
            .step_by((len / 64).max(1))
            .map(|i| (interp.value(grid.node(i) + shift) - h.values()[i]).abs())
            .fold(0.0_f64, f64::max);
        let e = functionals::entropy_e(&rebuilt.curvature())?;
        let f = functionals::entropy_f(h).ok_or_else(|| anyhow!("profile not positive"))?;
        let tag = format!("({m},{n}) N={len}");
        checks.push(check(
            &format!("{tag} residual"),
            residual <= 1e-8,
            format!("max|h(h+h'')-1| = {}", fmt_e(residual)),
        ));
        checks.push(check(
            &format!("{tag} area"),
            (area - f64::from(m) * PI).abs() <= 1e-9,
            format!("|A - mπ| = {}", fmt_e((area - f64::from(m) * PI).abs())),
        ));
        checks.push(check(
            &format!("{tag} symmetry"),
            even <= 1e-10 && periodic <= 1e-10,
            format!("even {} periodic {}", fmt_e(even), fmt_e(periodic)),
        ));
        checks.push(check(
            &format!("{tag} E = F"),
            (e - f).abs() <= 1e-10,
            format!("|E - F| = {}", fmt_e((e - f).abs())),
        ));
        checks.push(check(
            &format!("{tag} runtime"),
            elapsed < 10.0,
            format!("{elapsed:.2} s"),
        ));
    }
    Ok(checks)
}

fn c2_circle(ctx: &Context) -> Result<Vec<Check>> {
    let grid = Grid::new(1, ctx.cfg.grid_n)?;
    let cfg = RunConfig {
        symmetry_fold: None,
        leaf: LeafMode::Off,
        ..ctx.cfg.run.clone()
    };
    let h0 = PeriodicProfile::constant(&grid, ProfileKind::Support, 1.0);
    let mut support = Integrator::new(FlowState::support(h0, Frame::Unnormalized, 0.0)?, &cfg)?;
    support.advance_to(0.4)?;
    let k0 = PeriodicProfile::constant(&grid, ProfileKind::Curvature, 1.0);
    let state = FlowState::new(k0, 0.0, Frame::Unnormalized, Representation::Curvature, 0.0)?;
    let mut curvature = Integrator::new(state, &cfg)?;
    curvature.advance_to(0.4)?;
    let r = 0.2_f64.sqrt();
    let h_err = support.state().profile.map(|v| v - r).max_abs();
    let k_err = curvature.state().profile.map(|v| v - 1.0 / r).max_abs();
    let k_from_h = curvature_of(&support.state().profile)?
        .map(|v| v - 1.0 / r)
        .max_abs();
    Ok(vec![
        check("h(0.4) = √0.2", h_err <= 1e-8, fmt_e(h_err)),
        check("evolved κ(0.4) = 1/√0.2", k_err <= 1e-8, fmt_e(k_err)),
        check("κ from h(0.4)", k_from_h <= 1e-8, fmt_e(k_from_h)),
    ])
}

fn c3_area(ctx: &Context) -> Result<Vec<Check>> {
    let (plus, minus) = ctx.unnormalized()?;
    let m_pi = half_area(ctx.class);
    let law = |o: &RunOutcome| {
        o.records
            .iter()
            .map(|r| (r.area - m_pi * (1.0 - 2.0 * r.time)).abs())
            .fold(0.0_f64, f64::max)
    };
    let pinned = |o: &RunOutcome| {
        o.records
            .iter()
            .map(|r| (r.area - m_pi).abs())
            .fold(0.0_f64, f64::max)
    };
    let (lp, lm) = (law(plus), law(minus));
    let pos = &ctx.positive()?.outcome;
    let neg = ctx.negative()?;
    let (np, nm) = (pinned(pos), pinned(neg));
    Ok(vec![
        check(
            "unnormalized ε=+0.05 area law",
            lp <= 1e-6 && plus.records.len() > 2,
            format!("{} over {} records", fmt_e(lp), plus.records.len()),
        ),
        check(
            "unnormalized ε=-0.05 area law",
            lm <= 1e-6 && minus.records.len() > 2,
            format!("{} over {} records", fmt_e(lm), minus.records.len()),
        ),
        check("normalized ε=+0.05 A = mπ", np <= 1e-6, fmt_e(np)),
        check("normalized ε=-0.05 A = mπ", nm <= 1e-6, fmt_e(nm)),
    ])
}

fn c4_stationarity(ctx: &Context) -> Result<Vec<Check>> {
    let (records, worst, verdict) = ctx.stationary()?;
    let period = ctx.class.period();
    let u0 = (records[0].u - period).abs();
    Ok(vec![
        check("‖h̃ - h_mn‖ on [0, 1]", *worst <= 1e-5, fmt_e(*worst)),
        check("u(0) = 2mπ", u0 <= 1e-8, fmt_e(u0)),
        check(
            "verdict",
            *verdict == Verdict::ConvergedToStationary,
            verdict.as_str().into(),
        ),
    ])
}

fn entropy_monotone(records: &[DiagnosticsRecord]) -> f64 {
    records
        .windows(2)
        .map(|w| w[1].entropy_e - w[0].entropy_e)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn c5_outward(ctx: &Context) -> Result<Vec<Check>> {
    let run = ctx.positive()?;
    let out = &run.outcome;
    let dist = experiment::distance_to_circle(out);
    let rise = entropy_monotone(&out.records);
    let period = ctx.class.period();
    let u_max = out
        .records
        .iter()
        .map(|r| r.u)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        check(
            "verdict",
            out.verdict == Verdict::ConvergedToCircle,
            format!(
                "{} at τ = {}",
                out.verdict.as_str(),
                out.converged_time.map_or("-".into(), |t| format!("{t:.2}"))
            ),
        ),
        check("final ‖h̃ - 1‖", dist <= 1e-3, fmt_e(dist)),
        check(
            "E non-increasing",
            rise <= 1e-8,
            format!("largest rise {}", fmt_e(rise)),
        ),
        check(
            "u ≤ 2mπ",
            u_max <= period + 1e-6,
            format!("max u - 2mπ = {}", fmt_e(u_max - period)),
        ),
        check(
            "extrema pinned",
            run.worst_offset_cells <= 1.0,
            format!("worst offset {} cells", run.worst_offset_cells),
        ),
    ])
}

fn c6_inward(ctx: &Context) -> Result<Vec<Check>> {
    let out = ctx.negative()?;
    let mut checks = Vec::new();
    let touch = out.touch_time;
    let touch_min = out
        .touch_state
        .as_ref()
        .map(|s| csf_core::flow::refined_min(&s.profile));
    let before_positive = out
        .records
        .iter()
        .filter(|r| touch.is_some_and(|t| r.time < t))
        .all(|r| r.min_h > 0.0);
    checks.push(check(
        "τ₁ located",
        touch.is_some() && touch_min.is_some_and(|v| v.abs() <= 1e-4) && before_positive,
        format!(
            "τ₁ = {} with min h̃ = {} (bracket {:e})",
            touch.map_or("-".into(), |t| format!("{t:.6}")),
            touch_min.map_or("-".into(), fmt_e),
            csf_core::flow::TOUCH_RESOLUTION
        ),
    ));
    let blow = out.blowup;
    checks.push(check(
        "blowup reached",
        out.verdict == Verdict::TouchedOriginThenBlowup,
        format!(
            "{}; t_blow = {}",
            out.verdict.as_str(),
            blow.map_or("-".into(), |b| format!("{:.10}", b.unnormalized_t))
        ),
    ));
    checks.push(check(
        "max κ̃ > 1e3 at finite τ",
        blow.is_some_and(|b| b.tau.is_some() && b.max_curvature > ctx.cfg.run.kappa_cap),
        format!(
            "τ_blow = {}",
            blow.and_then(|b| b.tau)
                .map_or("none (t_blow ≥ 1/2)".into(), |t| format!("{t:.6}"))
        ),
    ));
    let all_records = out.records.len() + out.continuation.len();
    let f_mismatch = out
        .records
        .iter()
        .chain(&out.continuation)
        .filter(|r| r.entropy_f.is_some() != (r.min_h > 0.0))
        .count();
    checks.push(check(
        "F defined iff min h̃ > 0",
        f_mismatch == 0,
        format!("{f_mismatch} mismatches in {all_records} records"),
    ));
    let before: Vec<f64> = out
        .records
        .iter()
        .filter(|r| touch.is_some_and(|t| r.time < t))
        .map(|r| r.leaf_area.unwrap_or(f64::NEG_INFINITY))
        .collect();
    let smallest = before.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(check(
        "leaf area > 0 before τ₁",
        !before.is_empty() && smallest > 0.0,
        format!("smallest {} over {} records", fmt_e(smallest), before.len()),
    ));
    let (_, minus) = ctx.unnormalized()?;
    let rate = leaf_area_rate(&minus.records)?;
    checks.push(check(
        "leaf-area rate ≤ -π + 0.05",
        rate <= -PI + 0.05,
        format!("{rate:.6}"),
    ));
    Ok(checks)
}

fn sturm(records: &[DiagnosticsRecord], expected_start: usize) -> (bool, String) {
    let counts: Vec<usize> = records.iter().map(|r| r.zero_count).collect();
    let monotone = counts.windows(2).all(|w| w[1] <= w[0]);
    let start = counts.first().copied();
    (
        monotone && start == Some(expected_start),
        format!(
            "start {}, end {}, monotone {monotone}",
            start.map_or("-".into(), |c| c.to_string()),
            counts.last().map_or("-".into(), |c| c.to_string())
        ),
    )
}

fn c7_sturm(ctx: &Context) -> Result<Vec<Check>> {
    let two_n = 2 * ctx.class.n() as usize;
    let (stat, _, _) = ctx.stationary()?;
    let pos = &ctx.positive()?.outcome;
    let neg = ctx.negative()?;
    let mut neg_all = neg.records.clone();
    neg_all.extend(neg.continuation.iter().cloned());
    let mut checks = Vec::new();
    for (label, recs) in [
        ("ε = 0", stat),
        ("ε = +0.05", &pos.records),
        ("ε = -0.05", &neg_all),
    ] {
        let (ok, detail) = sturm(recs, two_n);
        checks.push(check(label, ok, detail));
    }
    Ok(checks)
}

fn entropy_sum(p: &PeriodicProfile) -> Result<f64> {
    Ok(functionals::entropy_sum(p)?)
}

fn c8_instability(ctx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for base in ctx.class_profiles()? {
        let class = base.class();
        let ic = instability_coefficient(base);
        let eps = 1e-3;
        let e0 = entropy_sum(base.profile())?;
        let ep = entropy_sum(&perturb(base, eps)?.profile)?;
        let em = entropy_sum(&perturb(base, -eps)?.profile)?;
        let fd = (ep + em - 2.0 * e0) / (eps * eps);
        let rel = ((fd - ic.coefficient) / ic.coefficient).abs();
        let tag = format!("({},{})", class.m(), class.n());
        checks.push(check(
            &format!("{tag} negative"),
            ic.coefficient < 0.0,
            format!("{:.10}", ic.coefficient),
        ));
        checks.push(check(
            &format!("{tag} second difference"),
            rel <= 1e-3,
            format!("fd {fd:.10}, relative gap {}", fmt_e(rel)),
        ));
        checks.push(check(
            &format!("{tag} Poincaré bound"),
            ic.coefficient <= ic.poincare_bound + 1e-8,
            format!("bound {:.6}", ic.poincare_bound),
        ));
        checks.push(check(
            &format!("{tag} decomposition"),
            ic.decomposition_defect() <= 1e-8,
            fmt_e(ic.decomposition_defect()),
        ));
    }
    Ok(checks)
}

fn c9_expansions(ctx: &Context) -> Result<Vec<Check>> {
    let base = ctx.base()?;
    let (dh, dk) = csf_core::al_profile::predicted_variations(base);
    let kappa = base.curvature();
    let errors = |eps: f64| -> Result<(f64, f64)> {
        let p = perturb(base, eps)?.profile;
        let k = curvature_of(&p)?;
        let eh = p
            .zip_map(base.profile(), |a, b| (a - b) / eps)
            .max_abs_diff(&dh);
        let ek = k.zip_map(&kappa, |a, b| (a - b) / eps).max_abs_diff(&dk);
        Ok((eh, ek))
    };
    let (h1, k1) = errors(1e-2)?;
    let (h2, k2) = errors(5e-3)?;
    let (rh, rk) = (h2 / h1, k2 / k1);
    let mut checks = vec![
        check(
            "h_ε first-order ratio",
            (rh - 0.5).abs() <= 0.1,
            format!("{rh:.4}"),
        ),
        check(
            "κ_ε first-order ratio",
            (rk - 0.5).abs() <= 0.1,
            format!("{rk:.4}"),
        ),
    ];
    let trough = ctx.class.half_period();
    let interp_h = base.profile().interpolant();
    let interp_k = kappa.interpolant();
    for eps in [1e-3, -1e-3] {
        let p = perturb(base, eps)?.profile;
        let k = curvature_of(&p)?;
        let (pi, ki) = (p.interpolant(), k.interpolant());
        let s = eps.signum();
        let ok = s * (pi.value(0.0) - interp_h.value(0.0)) < 0.0
            && s * (pi.value(trough) - interp_h.value(trough)) > 0.0
            && s * (ki.value(0.0) - interp_k.value(0.0)) < 0.0
            && s * (ki.value(trough) - interp_k.value(trough)) > 0.0;
        checks.push(check(
            &format!("comparison signs at ε = {eps:+}"),
            ok,
            format!(
                "Δh(0) {:+.3e}, Δh(mπ/n) {:+.3e}, Δκ(0) {:+.3e}, Δκ(mπ/n) {:+.3e}",
                pi.value(0.0) - interp_h.value(0.0),
                pi.value(trough) - interp_h.value(trough),
                ki.value(0.0) - interp_k.value(0.0),
                ki.value(trough) - interp_k.value(trough)
            ),
        ));
    }
    Ok(checks)
}

fn c10_cross(ctx: &Context) -> Result<Vec<Check>> {
    let cfg = RunConfig {
        horizon: 0.5,
        leaf: LeafMode::Off,
        ..ctx.run_cfg.clone()
    };
    let discrepancy = |len: usize, cfl: f64| -> Result<f64> {
        let base = if len == ctx.cfg.grid_n {
            ctx.base()?.clone()
        } else {
            csf_core::al_profile::build_profile(ctx.class, &Grid::new(ctx.class.m(), len)?)?
        };
        let state = perturbed_state(&base, 0.05, Frame::Normalized)?;
        Ok(cross_check(&state, &RunConfig { cfl, ..cfg.clone() })?)
    };
    let n = ctx.cfg.grid_n;
    let coarse = discrepancy(n, cfg.cfl)?;
    let fine = discrepancy(2 * n, cfg.cfl)?;
    let half_cfl = discrepancy(n, 0.5 * cfg.cfl)?;
    Ok(vec![
        check(&format!("N = {n}"), coarse <= 1e-5, fmt_e(coarse)),
        check(
            &format!("shrinks ≥ 8× at N = {}", 2 * n),
            coarse / fine >= 8.0,
            format!("{} (ratio {:.3})", fmt_e(fine), coarse / fine),
        ),
        check(
            "halved cfl",
            half_cfl <= 1e-5,
            format!("{} (ratio {:.3})", fmt_e(half_cfl), coarse / half_cfl),
        ),
    ])
}

fn c11_sweep(ctx: &Context) -> Result<Vec<Check>> {
    let base = ctx.base()?;
    let remaining: Vec<f64> = SWEEP_EPS
        .iter()
        .copied()
        .filter(|e| e.abs() != 0.05)
        .collect();
    let mut rows = experiment::sweep(
        std::slice::from_ref(base),
        &remaining,
        &ctx.run_cfg,
        ctx.cfg.jobs,
    )?;
    for (eps, out) in [(0.05, &ctx.positive()?.outcome), (-0.05, ctx.negative()?)] {
        rows.push(experiment::SweepRow {
            m: ctx.class.m(),
            n: ctx.class.n(),
            eps,
            verdict: Some(out.verdict),
            error: None,
            touch_time: out.touch_time,
            converged_time: out.converged_time,
            final_entropy: out.records.last().map(|r| r.entropy_e),
        });
    }
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    Ok(rows
        .iter()
        .map(|r| {
            check(
                &format!("ε = {:+}", r.eps),
                r.sign_correct(),
                r.verdict
                    .map(|v| v.as_str().to_string())
                    .or_else(|| r.error.clone())
                    .unwrap_or_default(),
            )
        })
        .collect())
}

fn c12_entropy_rate(ctx: &Context) -> Result<Vec<Check>> {
    let recs = &ctx.positive()?.outcome.records;
    let period = ctx.class.period();
    let dt = ctx.run_cfg.record_every;
    let max_du = recs
        .windows(2)
        .map(|w| ((w[1].u - w[0].u) / (w[1].time - w[0].time)).abs())
        .fold(0.0_f64, f64::max);
    let worst = recs
        .windows(2)
        .map(|w| {
            let h = w[1].time - w[0].time;
            let discrete = (w[1].entropy_e - w[0].entropy_e) / h;
            let mid = 0.5 * (w[0].u + w[1].u) - period;
            (discrete - mid).abs()
        })
        .fold(0.0_f64, f64::max);
    let bound = 5.0 * dt * dt * max_du;
    Ok(vec![check(
        "dE/dτ = u - 2mπ",
        worst <= bound,
        format!("worst {} vs bound {}", fmt_e(worst), fmt_e(bound)),
    )])
}

type Criterion = fn(&Context) -> Result<Vec<Check>>;

const CRITERIA: [(u8, &str, Criterion); 12] = [
    (1, "stationary construction", c1_stationary),
    (2, "exact-circle oracle", c2_circle),
    (3, "area laws", c3_area),
    (4, "stationarity", c4_stationarity),
    (5, "outward branch", c5_outward),
    (6, "inward branch", c6_inward),
    (7, "Sturm monotonicity", c7_sturm),
    (8, "instability coefficient", c8_instability),
    (9, "expansion fidelity", c9_expansions),
    (10, "cross-representation consistency", c10_cross),
    (11, "saddle sweep", c11_sweep),
    (12, "entropy rate identity", c12_entropy_rate),
];

/// Evaluates the criteria whose ids are in `only` (all when empty).
pub fn run_selected(cfg: &VerifyConfig, only: &[u8]) -> Vec<CriterionReport> {
    let ctx = match Context::new(cfg) {
        Ok(ctx) => ctx,
        Err(e) => {
            return CRITERIA
                .iter()
                .filter(|c| only.is_empty() || only.contains(&c.0))
                .map(|&(id, title, _)| CriterionReport {
                    id,
                    title,
                    checks: vec![],
                    error: Some(format!("{e:#}")),
                })
                .collect()
        }
    };
    CRITERIA
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.0))
        .map(|&(id, title, f)| match f(&ctx) {
            Ok(checks) => CriterionReport {
                id,
                title,
                checks,
                error: None,
            },
            Err(e) => CriterionReport {
                id,
                title,
                checks: vec![],
                error: Some(format!("{e:#}")),
            },
        })
        .collect()
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionReport> {
    run_selected(cfg, &[])
}
