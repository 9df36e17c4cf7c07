//! Method-of-lines integration of the four evolution equations
//!
//! | frame        | support                 | curvature                     |
//! |--------------|-------------------------|-------------------------------|
//! | unnormalized | `h_t = -κ`              | `κ_t = κ² (κ_θθ + κ)`         |
//! | normalized   | `h̃_τ = h̃ - κ̃`          | `κ̃_τ = κ̃² (κ̃_θθ + κ̃) - κ̃`   |
//!
//! with `κ = 1/(h + h_θθ)`, plus the maps between the `t` and `τ` frames and
//! the run controller that classifies how a run ends.
//!
//! Time stepping is classical RK4 with the parabolic step
//! `dt = cfl · Δθ² / max κ²`. Two pieces of conditioning are applied after
//! every step when enabled in [`RunConfig`]:
//!
//! * projection onto even, `2mπ/n`-periodic profiles, which the exact flow
//!   preserves but which round-off would otherwise excite through the
//!   unstable non-symmetric modes of the `m`-circle;
//! * (normalized support runs only) rescaling to algebraic area `mπ`. The
//!   normalized flow obeys `dA/dτ = 2 (A - mπ)`, so `A = mπ` is exact but
//!   repelling.
//!
//! Once `min h̃` reaches zero the normalized run hands off to the unnormalized
//! equation started from `h̃(τ₁)`, which is where the leaf collapse is
//! resolved; see [`run`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, DiagnosticsRecord, LeafMode};
use crate::spectral::{PeriodicProfile, ProfileKind, SpectralWorkspace};

/// Default floor on `h + h_θθ` below which `κ` is declared singular.
pub const DELTA_KAPPA: f64 = 1e-8;
/// Steps shorter than this abort the integration.
pub const MIN_STEP: f64 = 1e-14;
/// Width of the final bracket around `τ₁`.
pub const TOUCH_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Unnormalized,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Support,
    Curvature,
}

impl Representation {
    fn kind(self) -> ProfileKind {
        match self {
            Representation::Support => ProfileKind::Support,
            Representation::Curvature => ProfileKind::Curvature,
        }
    }
}

/// A profile together with its clock. `time` is `t` in the unnormalized
/// frame and `τ` in the normalized one.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub profile: PeriodicProfile,
    pub time: f64,
    pub frame: Frame,
    pub representation: Representation,
    pub eps: f64,
}

impl FlowState {
    pub fn new(
        profile: PeriodicProfile,
        time: f64,
        frame: Frame,
        representation: Representation,
        eps: f64,
    ) -> Result<Self> {
        let profile = profile.with_kind(representation.kind());
        let state = Self {
            profile,
            time,
            frame,
            representation,
            eps,
        };
        state.validate()?;
        Ok(state)
    }

    /// Support-function state at time zero.
    pub fn support(profile: PeriodicProfile, frame: Frame, eps: f64) -> Result<Self> {
        Self::new(profile, 0.0, frame, Representation::Support, eps)
    }

    /// Checks the state invariants. The unnormalized clock must stay below
    /// `1/2` only while the algebraic area is positive.
    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() {
            return Err(Error::InvalidTime(self.time));
        }
        match self.representation {
            Representation::Support => {
                curvature_of(&self.profile)?;
                if self.frame == Frame::Unnormalized
                    && self.time >= 0.5
                    && functionals::algebraic_area(&self.profile) > 0.0
                {
                    return Err(Error::InvalidTime(self.time));
                }
            }
            Representation::Curvature => {
                let min = self.profile.min();
                if min <= 0.0 {
                    return Err(Error::NonPositiveCurvature(min));
                }
                if self.frame == Frame::Unnormalized && self.time >= 0.5 {
                    return Err(Error::InvalidTime(self.time));
                }
            }
        }
        Ok(())
    }

    pub fn curvature(&self) -> Result<PeriodicProfile> {
        match self.representation {
            Representation::Support => curvature_of(&self.profile),
            Representation::Curvature => Ok(self.profile.clone()),
        }
    }
}

/// `κ = 1/(h + h_θθ)` with the default floor [`DELTA_KAPPA`].
pub fn curvature_of(h: &PeriodicProfile) -> Result<PeriodicProfile> {
    curvature_with_floor(h, DELTA_KAPPA)
}

pub fn curvature_with_floor(h: &PeriodicProfile, delta: f64) -> Result<PeriodicProfile> {
    let radius = h.zip_map(&h.differentiate(2), |a, b| a + b);
    let min = radius.min();
    if min <= delta {
        return Err(Error::CurvatureBlowup { min_radius: min });
    }
    Ok(radius.map(f64::recip).with_kind(ProfileKind::Curvature))
}

/// Run-control parameters. `horizon` is `t_max` or `τ_max` depending on the
/// frame of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cfl: f64,
    pub horizon: f64,
    pub kappa_cap: f64,
    pub conv_tol: f64,
    pub record_every: f64,
    pub delta_kappa: f64,
    /// Project onto even, `2mπ/fold`-periodic profiles after every step.
    pub symmetry_fold: Option<u32>,
    /// Hold the algebraic area at `mπ` in normalized support runs.
    pub pin_area: bool,
    pub leaf: LeafMode,
    /// Length of the unnormalized continuation after origin touching, in
    /// units of the continuation clock.
    pub continuation_horizon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cfl: 0.2,
            horizon: 100.0,
            kappa_cap: 1e3,
            conv_tol: 1e-7,
            record_every: 0.01,
            delta_kappa: DELTA_KAPPA,
            symmetry_fold: None,
            pin_area: true,
            leaf: LeafMode::Off,
            continuation_horizon: 1.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cfl", self.cfl),
            ("horizon", self.horizon),
            ("kappa_cap", self.kappa_cap),
            ("conv_tol", self.conv_tol),
            ("record_every", self.record_every),
            ("delta_kappa", self.delta_kappa),
            ("continuation_horizon", self.continuation_horizon),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.cfl > 0.5 {
            return Err(Error::InvalidConfig(format!(
                "cfl must be at most 0.5, got {}",
                self.cfl
            )));
        }
        if self.symmetry_fold == Some(0) {
            return Err(Error::InvalidConfig(
                "symmetry fold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Writes the time derivative of `values` into `out` and returns `max κ`.
fn rhs_into(
    ws: &mut SpectralWorkspace,
    frame: Frame,
    representation: Representation,
    delta: f64,
    values: &[f64],
    d2: &mut [f64],
    out: &mut [f64],
) -> Result<f64> {
    ws.derivative_into(values, 2, d2);
    let normalized = frame == Frame::Normalized;
    let mut max_kappa = 0.0_f64;
    match representation {
        Representation::Support => {
            for ((o, &h), &hpp) in out.iter_mut().zip(values).zip(d2.iter()) {
                let radius = h + hpp;
                if radius <= delta || !radius.is_finite() {
                    return Err(Error::CurvatureBlowup { min_radius: radius });
                }
                let kappa = radius.recip();
                max_kappa = max_kappa.max(kappa);
                *o = if normalized { h - kappa } else { -kappa };
            }
        }
        Representation::Curvature => {
            for ((o, &k), &kpp) in out.iter_mut().zip(values).zip(d2.iter()) {
                if k <= 0.0 || !k.is_finite() {
                    return Err(Error::NonPositiveCurvature(k));
                }
                max_kappa = max_kappa.max(k);
                let diffusion = k * k * (kpp + k);
                *o = if normalized { diffusion - k } else { diffusion };
            }
        }
    }
    Ok(max_kappa)
}

/// Time derivative of a state in its own frame and representation.
pub fn rhs(state: &FlowState) -> Result<PeriodicProfile> {
    let grid = state.profile.grid();
    let mut ws = SpectralWorkspace::new(grid);
    let mut d2 = vec![0.0; grid.len()];
    let mut out = vec![0.0; grid.len()];
    rhs_into(
        &mut ws,
        state.frame,
        state.representation,
        DELTA_KAPPA,
        state.profile.values(),
        &mut d2,
        &mut out,
    )?;
    PeriodicProfile::new(grid.clone(), out, state.representation.kind())
}

/// RK4 stepper with reusable buffers.
pub struct Integrator {
    state: FlowState,
    cfg: RunConfig,
    ws: SpectralWorkspace,
    values: Vec<f64>,
    stage: Vec<f64>,
    k: Vec<f64>,
    acc: Vec<f64>,
    d2: Vec<f64>,
    target_area: Option<f64>,
    start_max_kappa: f64,
    steps: u64,
}

impl Integrator {
    pub fn new(state: FlowState, cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        state.validate()?;
        let grid = state.profile.grid().clone();
        let len = grid.len();
        let target_area = (cfg.pin_area
            && state.frame == Frame::Normalized
            && state.representation == Representation::Support)
            .then(|| f64::from(grid.m()) * PI);
        Ok(Self {
            values: state.profile.values().to_vec(),
            ws: SpectralWorkspace::new(&grid),
            stage: vec![0.0; len],
            k: vec![0.0; len],
            acc: vec![0.0; len],
            d2: vec![0.0; len],
            target_area,
            start_max_kappa: 0.0,
            steps: 0,
            cfg: cfg.clone(),
            state,
        })
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// `max κ` of the state at the start of the most recent step.
    pub fn last_max_curvature(&self) -> f64 {
        self.start_max_kappa
    }

    pub fn state(&self) -> FlowState {
        let mut state = self.state.clone();
        state.profile = PeriodicProfile::new(
            state.profile.grid().clone(),
            self.values.clone(),
            state.representation.kind(),
        )
        .expect("integrator values stay finite");
        state
    }

    fn eval(&mut self, from_stage: bool) -> Result<f64> {
        let src = if from_stage {
            &self.stage
        } else {
            &self.values
        };
        rhs_into(
            &mut self.ws,
            self.state.frame,
            self.state.representation,
            self.cfg.delta_kappa,
            src,
            &mut self.d2,
            &mut self.k,
        )
    }

    /// The CFL step `cfl · Δθ² / max κ²` for the current state.
    pub fn stable_dt(&mut self) -> Result<f64> {
        let max_kappa = self.eval(false)?;
        Ok(self.cfl_dt(max_kappa))
    }

    fn cfl_dt(&self, max_kappa: f64) -> f64 {
        let dx = self.state.profile.grid().spacing();
        self.cfg.cfl * dx * dx / (max_kappa * max_kappa)
    }

    /// One RK4 step of length `min(cfl dt, dt_cap)`; returns the length.
    pub fn step(&mut self, dt_cap: f64) -> Result<f64> {
        let max_kappa = self.eval(false)?;
        self.start_max_kappa = max_kappa;
        let dt_cfl = self.cfl_dt(max_kappa);
        if dt_cfl < MIN_STEP {
            return Err(Error::StepUnderflow {
                dt: dt_cfl,
                time: self.state.time,
            });
        }
        let dt = dt_cfl.min(dt_cap);
        // acc accumulates k1 + 2 k2 + 2 k3 + k4.
        self.acc.copy_from_slice(&self.k);
        for (weight, frac) in [(2.0, 0.5), (2.0, 0.5), (1.0, 1.0)] {
            for ((s, &v), &k) in self.stage.iter_mut().zip(&self.values).zip(&self.k) {
                *s = v + frac * dt * k;
            }
            self.eval(true)?;
            for (a, &k) in self.acc.iter_mut().zip(&self.k) {
                *a += weight * k;
            }
        }
        for (v, &a) in self.values.iter_mut().zip(&self.acc) {
            *v += dt / 6.0 * a;
        }
        if self.cfg.symmetry_fold.is_some() || self.target_area.is_some() {
            self.ws
                .condition(&mut self.values, self.cfg.symmetry_fold, self.target_area);
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.state.time += dt;
        self.steps += 1;
        Ok(dt)
    }

    /// Steps until `target`, landing on it exactly.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        self.advance_capped(target, f64::INFINITY).map(|_| ())
    }

    /// Steps until `target` or until the state entering a step has
    /// `max κ > cap`. Returns `false` in the second case.
    fn advance_capped(&mut self, target: f64, cap: f64) -> Result<bool> {
        while self.state.time < target {
            let remaining = target - self.state.time;
            let dt = self.step(remaining)?;
            if self.start_max_kappa > cap {
                return Ok(false);
            }
            if dt >= remaining {
                self.state.time = target;
            }
        }
        Ok(true)
    }
}

/// One step of the run's integrator from `state`.
pub fn step(state: &FlowState, cfg: &RunConfig) -> Result<FlowState> {
    let mut integrator = Integrator::new(state.clone(), cfg)?;
    integrator.step(f64::INFINITY)?;
    Ok(integrator.state())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergedToCircle,
    ConvergedToStationary,
    TouchedOriginThenBlowup,
    Blowup,
    TimeLimit,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConvergedToCircle => "converged_to_circle",
            Verdict::ConvergedToStationary => "converged_to_stationary",
            Verdict::TouchedOriginThenBlowup => "touched_origin_then_blowup",
            Verdict::Blowup => "blowup",
            Verdict::TimeLimit => "time_limit",
        }
    }
}

/// When and where the curvature cap was crossed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupTime {
    /// Clock of the integration that hit the cap (the continuation clock `s`
    /// after a hand-off).
    pub frame_time: f64,
    /// The same instant on the unnormalized clock of the original run.
    pub unnormalized_t: f64,
    /// The same instant on the normalized clock, when `t < 1/2`.
    pub tau: Option<f64>,
    pub max_curvature: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub frame: Frame,
    /// First time `min h̃ = 0` (`τ₁`, or `t₁` for unnormalized runs).
    pub touch_time: Option<f64>,
    /// State at the upper end of the final `τ₁` bracket.
    pub touch_state: Option<FlowState>,
    pub blowup: Option<BlowupTime>,
    pub converged_time: Option<f64>,
    pub records: Vec<DiagnosticsRecord>,
    /// Records of the unnormalized continuation, on its own clock `s`.
    pub continuation: Vec<DiagnosticsRecord>,
    pub final_state: FlowState,
    pub steps: u64,
}

impl RunOutcome {
    pub fn is_clean(&self) -> bool {
        self.verdict != Verdict::TimeLimit
    }
}

/// Minimum of the interpolant near the smallest sample.
pub fn refined_min(p: &PeriodicProfile) -> f64 {
    let i = p.argmin();
    let spacing = p.grid().spacing();
    let interp = p.interpolant();
    let (_, value) = interp.refine_critical_point(p.grid().node(i), spacing);
    value.min(p.values()[i])
}

fn is_numerical_breakdown(e: &Error) -> bool {
    matches!(
        e,
        Error::CurvatureBlowup { .. }
            | Error::NonPositiveCurvature(_)
            | Error::NonFinite
            | Error::StepUnderflow { .. }
    )
}

enum Segment {
    Reached,
    Capped(f64),
    Broke,
}

fn advance_segment(integ: &mut Integrator, target: f64, cap: f64) -> Result<Segment> {
    match integ.advance_capped(target, cap) {
        Ok(true) => Ok(Segment::Reached),
        Ok(false) => Ok(Segment::Capped(integ.last_max_curvature())),
        Err(e) if is_numerical_breakdown(&e) => Ok(Segment::Broke),
        Err(e) => Err(e),
    }
}

fn blowup_time(frame: Frame, time: f64, max_curvature: f64) -> BlowupTime {
    match frame {
        Frame::Unnormalized => BlowupTime {
            frame_time: time,
            unnormalized_t: time,
            tau: (time < 0.5).then(|| -0.5 * (1.0 - 2.0 * time).ln()),
            max_curvature,
        },
        Frame::Normalized => BlowupTime {
            frame_time: time,
            unnormalized_t: 0.5 * (1.0 - (-2.0 * time).exp()),
            tau: Some(time),
            max_curvature,
        },
    }
}

/// Locates the zero of `min h` inside `(lo, hi)` by re-integrating from the
/// state saved at `lo`. Returns the final bracket's upper state.
fn bisect_touch(saved: &FlowState, hi: f64, cfg: &RunConfig) -> Result<FlowState> {
    let mut lo_t = saved.time;
    let mut hi_t = hi;
    let mut lo_state = saved.clone();
    let mut hi_state = None;
    while hi_t - lo_t > TOUCH_RESOLUTION {
        let mid = 0.5 * (lo_t + hi_t);
        let mut integ = Integrator::new(lo_state.clone(), cfg)?;
        integ.advance_to(mid)?;
        let state = integ.state();
        if refined_min(&state.profile) > 0.0 {
            lo_t = mid;
            lo_state = state;
        } else {
            hi_t = mid;
            hi_state = Some(state);
        }
    }
    match hi_state {
        Some(state) => Ok(state),
        None => {
            let mut integ = Integrator::new(lo_state, cfg)?;
            integ.advance_to(hi_t)?;
            Ok(integ.state())
        }
    }
}

/// Runs a flow until a verdict is reached.
///
/// * Convergence (normalized frame): `max|∂_τ| < conv_tol` at a record;
///   classified as the circle when `‖profile - 1‖_∞ < 10 conv_tol`.
/// * Origin touching (support runs): `min h` changes sign between records;
///   the crossing time is bisected to [`TOUCH_RESOLUTION`]. A normalized run
///   then continues on the unnormalized equation from `h̃(τ₁)` with its own
///   clock `s`, so `t = t₁ + s e^{-2τ₁}`.
/// * Blowup: `max κ > kappa_cap`, or the step controller breaking down.
/// * Otherwise the horizon is reached.
pub fn run(initial: FlowState, cfg: &RunConfig) -> Result<RunOutcome> {
    run_observed(initial, cfg, |_| {})
}

/// [`run`], calling `observe` on the state at every record time (including
/// the initial state) of the primary run.
pub fn run_observed(
    initial: FlowState,
    cfg: &RunConfig,
    mut observe: impl FnMut(&FlowState),
) -> Result<RunOutcome> {
    let frame = initial.frame;
    let is_support = initial.representation == Representation::Support;
    let mut integ = Integrator::new(initial, cfg)?;
    let mut saved = integ.state();
    let mut prev_min = refined_min(&saved.profile);
    let mut out = RunOutcome {
        verdict: Verdict::TimeLimit,
        frame,
        touch_time: None,
        touch_state: None,
        blowup: None,
        converged_time: None,
        records: Vec::new(),
        continuation: Vec::new(),
        final_state: saved.clone(),
        steps: 0,
    };
    if is_support {
        out.records.push(functionals::record(&saved, cfg.leaf)?);
    }
    observe(&saved);
    let start = saved.time;
    let end = start + cfg.horizon;
    let mut k = 1_u64;
    loop {
        let target = (start + k as f64 * cfg.record_every).min(end);
        k += 1;
        let capped = match advance_segment(&mut integ, target, cfg.kappa_cap)? {
            Segment::Reached => None,
            Segment::Capped(kappa) => Some(kappa),
            Segment::Broke => Some(integ.last_max_curvature()),
        };
        out.steps = integ.steps();
        if let Some(kappa) = capped {
            out.verdict = if out.touch_time.is_some() {
                Verdict::TouchedOriginThenBlowup
            } else {
                Verdict::Blowup
            };
            out.blowup = Some(blowup_time(frame, integ.time(), kappa));
            out.final_state = integ.state();
            return Ok(out);
        }
        let state = integ.state();
        if is_support {
            out.records.push(functionals::record(&state, cfg.leaf)?);
        }
        observe(&state);
        let min_now = refined_min(&state.profile);
        if is_support && out.touch_time.is_none() && prev_min > 0.0 && min_now <= 0.0 {
            let touched = bisect_touch(&saved, state.time, cfg)?;
            let tau1 = touched.time;
            out.touch_time = Some(tau1);
            out.touch_state = Some(touched.clone());
            if frame == Frame::Normalized {
                let cont = continue_unnormalized(touched, cfg)?;
                out.steps += cont.steps;
                out.continuation = cont.records;
                out.final_state = cont.final_state;
                out.verdict = match cont.blowup {
                    Some(_) => Verdict::TouchedOriginThenBlowup,
                    None => Verdict::TimeLimit,
                };
                // The continuation clock s maps to t = t₁ + s e^{-2τ₁}.
                out.blowup = cont.blowup.map(|b| BlowupTime {
                    frame_time: b.frame_time,
                    unnormalized_t: 0.5 + (-2.0 * tau1).exp() * (b.frame_time - 0.5),
                    tau: (b.frame_time < 0.5).then(|| tau1 - 0.5 * (1.0 - 2.0 * b.frame_time).ln()),
                    max_curvature: b.max_curvature,
                });
                return Ok(out);
            }
        }
        prev_min = min_now;
        saved = state;
        if frame == Frame::Normalized && rhs_max_abs(&mut integ)? < cfg.conv_tol {
            let deviation = saved.profile.map(|v| v - 1.0).max_abs();
            out.verdict = if deviation < 10.0 * cfg.conv_tol {
                Verdict::ConvergedToCircle
            } else {
                Verdict::ConvergedToStationary
            };
            out.converged_time = Some(saved.time);
            out.final_state = saved;
            return Ok(out);
        }
        if target >= end {
            out.final_state = saved;
            return Ok(out);
        }
    }
}

fn rhs_max_abs(integ: &mut Integrator) -> Result<f64> {
    integ.eval(false)?;
    Ok(integ.k.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

struct Continuation {
    blowup: Option<BlowupTime>,
    records: Vec<DiagnosticsRecord>,
    final_state: FlowState,
    steps: u64,
}

/// Unnormalized support run from the touching state, on a fresh clock.
fn continue_unnormalized(touched: FlowState, cfg: &RunConfig) -> Result<Continuation> {
    let state = FlowState::new(
        touched.profile,
        0.0,
        Frame::Unnormalized,
        Representation::Support,
        touched.eps,
    )?;
    let cont_cfg = RunConfig {
        horizon: cfg.continuation_horizon,
        pin_area: false,
        ..cfg.clone()
    };
    let mut integ = Integrator::new(state, &cont_cfg)?;
    let mut records = vec![functionals::record(&integ.state(), cfg.leaf)?];
    let mut k = 1_u64;
    loop {
        let target = (k as f64 * cfg.record_every).min(cont_cfg.horizon);
        k += 1;
        let capped = match advance_segment(&mut integ, target, cfg.kappa_cap)? {
            Segment::Reached => None,
            Segment::Capped(kappa) => Some(kappa),
            Segment::Broke => Some(integ.last_max_curvature()),
        };
        if let Some(kappa) = capped {
            return Ok(Continuation {
                blowup: Some(blowup_time(Frame::Unnormalized, integ.time(), kappa)),
                records,
                final_state: integ.state(),
                steps: integ.steps(),
            });
        }
        let state = integ.state();
        // Records may fail once the profile nears the singular regime.
        if let Ok(rec) = functionals::record(&state, cfg.leaf) {
            records.push(rec);
        }
        if target >= cont_cfg.horizon {
            return Ok(Continuation {
                blowup: None,
                records,
                final_state: state,
                steps: integ.steps(),
            });
        }
    }
}

/// `τ = -½ ln(1 - 2t)`, `h̃ = h / √(1 - 2t)` (and `κ̃ = κ √(1 - 2t)`).
pub fn to_normalized(state: &FlowState) -> Result<FlowState> {
    if state.frame != Frame::Unnormalized {
        return Err(Error::StateMismatch(
            "expected an unnormalized state".into(),
        ));
    }
    let t = state.time;
    if t.is_nan() || t >= 0.5 {
        return Err(Error::InvalidTime(t));
    }
    let root = (1.0 - 2.0 * t).sqrt();
    let factor = match state.representation {
        Representation::Support => root.recip(),
        Representation::Curvature => root,
    };
    Ok(FlowState {
        profile: state.profile.map(|v| v * factor),
        time: -0.5 * (1.0 - 2.0 * t).ln(),
        frame: Frame::Normalized,
        representation: state.representation,
        eps: state.eps,
    })
}

/// `t = ½ (1 - e^{-2τ})`, `h = h̃ e^{-τ}` (and `κ = κ̃ e^{τ}`).
pub fn from_normalized(state: &FlowState) -> Result<FlowState> {
    if state.frame != Frame::Normalized {
        return Err(Error::StateMismatch("expected a normalized state".into()));
    }
    let tau = state.time;
    let factor = match state.representation {
        Representation::Support => (-tau).exp(),
        Representation::Curvature => tau.exp(),
    };
    Ok(FlowState {
        profile: state.profile.map(|v| v * factor),
        time: 0.5 * (1.0 - (-2.0 * tau).exp()),
        frame: Frame::Unnormalized,
        representation: state.representation,
        eps: state.eps,
    })
}

/// Evolves the support equation and, separately, the curvature equation
/// from `curvature_of(h(·, 0))`, over `cfg.horizon`. Returns the largest
/// `‖curvature_of(h) - κ_evolved‖_∞` over the record times.
pub fn cross_check(initial_support: &FlowState, cfg: &RunConfig) -> Result<f64> {
    if initial_support.representation != Representation::Support {
        return Err(Error::StateMismatch(
            "cross_check starts from a support state".into(),
        ));
    }
    let cfg = RunConfig {
        pin_area: false,
        ..cfg.clone()
    };
    let kappa0 = curvature_of(&initial_support.profile)?;
    let curv_state = FlowState::new(
        kappa0,
        initial_support.time,
        initial_support.frame,
        Representation::Curvature,
        initial_support.eps,
    )?;
    let mut support = Integrator::new(initial_support.clone(), &cfg)?;
    let mut curvature = Integrator::new(curv_state, &cfg)?;
    let start = initial_support.time;
    let end = start + cfg.horizon;
    let mut worst = 0.0_f64;
    let mut k = 1_u64;
    loop {
        let target = (start + k as f64 * cfg.record_every).min(end);
        k += 1;
        support.advance_to(target)?;
        curvature.advance_to(target)?;
        let from_h = curvature_of(&support.state().profile)?;
        worst = worst.max(from_h.max_abs_diff(&curvature.state().profile));
        if target >= end {
            return Ok(worst);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn circle(m: u32, len: usize, r: f64, frame: Frame) -> FlowState {
        let g = Grid::new(m, len).unwrap();
        FlowState::support(
            PeriodicProfile::constant(&g, ProfileKind::Support, r),
            frame,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn curvature_examples() {
        let g = Grid::new(1, 64).unwrap();
        let k = curvature_of(&PeriodicProfile::constant(&g, ProfileKind::Support, 2.0)).unwrap();
        assert!(k.values().iter().all(|v| (v - 0.5).abs() < 1e-14));
        let h = PeriodicProfile::from_fn(&g, ProfileKind::Support, |t| 1.0 + 0.1 * t.cos());
        assert!(curvature_of(&h)
            .unwrap()
            .values()
            .iter()
            .all(|v| (v - 1.0).abs() < 1e-13));
        let bad = PeriodicProfile::from_fn(&g, ProfileKind::Support, |t| 0.5 * (2.0 * t).cos());
        assert!(matches!(
            curvature_of(&bad),
            Err(Error::CurvatureBlowup { .. })
        ));
    }

    #[test]
    fn rhs_examples() {
        let s = circle(2, 64, 1.0, Frame::Normalized);
        assert!(rhs(&s).unwrap().max_abs() < 1e-14);
        let s = circle(1, 64, 2.0, Frame::Unnormalized);
        assert!(rhs(&s)
            .unwrap()
            .values()
            .iter()
            .all(|v| (v + 0.5).abs() < 1e-14));
    }

    #[test]
    fn shrinking_circle_is_exact() {
        let cfg = RunConfig::default();
        let mut integ = Integrator::new(circle(1, 64, 1.0, Frame::Unnormalized), &cfg).unwrap();
        integ.advance_to(0.4).unwrap();
        let exact = 0.2_f64.sqrt();
        let err = integ.state().profile.map(|v| v - exact).max_abs();
        assert!(err <= 1e-8, "{err:e}");
    }

    #[test]
    fn step_length_scales_with_inverse_square_curvature() {
        let cfg = RunConfig::default();
        let mut a = Integrator::new(circle(1, 64, 1.0, Frame::Unnormalized), &cfg).unwrap();
        let mut b = Integrator::new(circle(1, 64, 0.5, Frame::Unnormalized), &cfg).unwrap();
        let ratio = a.stable_dt().unwrap() / b.stable_dt().unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn frame_maps() {
        let s = circle(1, 64, 1.0, Frame::Unnormalized);
        let n = to_normalized(&s).unwrap();
        assert_eq!(n.time, 0.0);
        assert_eq!(n.profile, s.profile);
        let mut s4 = s.clone();
        s4.time = 0.4;
        let n4 = to_normalized(&s4).unwrap();
        assert!((n4.time - 0.804_719).abs() < 1e-6);
        assert!((n4.profile.values()[0] - 2.236_068).abs() < 1e-6);
        let back = from_normalized(&n4).unwrap();
        assert!((back.time - 0.4).abs() < 1e-14);
        assert!(back.profile.max_abs_diff(&s4.profile) < 1e-14);
        s4.time = 0.5;
        assert!(matches!(to_normalized(&s4), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            cfl: 1.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            record_every: 0.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn circle_run_converges_immediately() {
        let cfg = RunConfig {
            horizon: 1.0,
            ..RunConfig::default()
        };
        let out = run(circle(2, 64, 1.0, Frame::Normalized), &cfg).unwrap();
        assert_eq!(out.verdict, Verdict::ConvergedToCircle);
        assert_eq!(out.records.len(), 2);
    }

    #[test]
    fn unnormalized_circle_blows_up_near_half() {
        let cfg = RunConfig {
            horizon: 1.0,
            record_every: 0.05,
            ..RunConfig::default()
        };
        let out = run(circle(1, 64, 1.0, Frame::Unnormalized), &cfg).unwrap();
        assert_eq!(out.verdict, Verdict::Blowup);
        let b = out.blowup.unwrap();
        // κ = 1/√(1 - 2t) reaches 1e3 at t = ½ - 5e-7.
        assert!((b.unnormalized_t - 0.5).abs() < 1e-5, "{b:?}");
        assert!(b.max_curvature > 1e3);
    }

    #[test]
    fn curvature_circle_matches_closed_form() {
        let g = Grid::new(1, 64).unwrap();
        let k0 = PeriodicProfile::constant(&g, ProfileKind::Curvature, 1.0);
        let state =
            FlowState::new(k0, 0.0, Frame::Unnormalized, Representation::Curvature, 0.0).unwrap();
        let mut integ = Integrator::new(state, &RunConfig::default()).unwrap();
        integ.advance_to(0.4).unwrap();
        let exact = 1.0 / 0.2_f64.sqrt();
        assert!(integ.state().profile.map(|v| v - exact).max_abs() < 1e-8);
    }
}
