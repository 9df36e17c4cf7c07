//! Run builders shared by the commands and the verification suite.

use std::f64::consts::PI;

use anyhow::{Context, Result};
use csf_core::al_profile::{build_profile, perturb};
use csf_core::flow::{self, FlowState, Frame, RunConfig, RunOutcome, Verdict};
use csf_core::functionals::LeafMode;
use csf_core::{ALProfile, CurveClass, Error, Grid};
use rayon::prelude::*;
use serde::Serialize;

/// Largest grid tried by [`build_resolved`].
pub const MAX_GRID: usize = 16384;

/// Builds `h_{m,n}` on `N` nodes, doubling `N` while the profile is
/// under-resolved.
pub fn build_resolved(class: CurveClass, grid_n: usize) -> Result<ALProfile> {
    let mut len = grid_n;
    loop {
        let grid = Grid::new(class.m(), len)?;
        match build_profile(class, &grid) {
            Err(Error::UnderResolved(_)) if len < MAX_GRID => len *= 2,
            other => {
                return other.with_context(|| {
                    format!(
                        "building the ({}, {}) profile on N = {len}",
                        class.m(),
                        class.n()
                    )
                })
            }
        }
    }
}

/// The run configuration used for perturbations of `class`: symmetric
/// projection with fold `n` and the tip-0 leaf tracked.
pub fn class_config(class: CurveClass, base: &RunConfig) -> RunConfig {
    RunConfig {
        symmetry_fold: Some(class.n()),
        leaf: LeafMode::Leaf { fold: class.n() },
        ..base.clone()
    }
}

pub fn perturbed_state(base: &ALProfile, eps: f64, frame: Frame) -> Result<FlowState> {
    let p = perturb(base, eps)?;
    Ok(FlowState::support(p.profile, frame, eps)?)
}

pub fn evolve(base: &ALProfile, eps: f64, frame: Frame, cfg: &RunConfig) -> Result<RunOutcome> {
    let state = perturbed_state(base, eps, frame)?;
    Ok(flow::run(state, &class_config(base.class(), cfg))?)
}

/// `‖h̃ - 1‖_∞` of the final state of a support run.
pub fn distance_to_circle(outcome: &RunOutcome) -> f64 {
    outcome.final_state.profile.map(|v| v - 1.0).max_abs()
}

/// The verdict the saddle picture predicts for a perturbation of sign `eps`.
pub fn expected_verdicts(eps: f64) -> &'static [Verdict] {
    if eps > 0.0 {
        &[Verdict::ConvergedToCircle]
    } else if eps < 0.0 {
        &[Verdict::TouchedOriginThenBlowup, Verdict::Blowup]
    } else {
        &[Verdict::ConvergedToStationary]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub m: u32,
    pub n: u32,
    pub eps: f64,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
    pub touch_time: Option<f64>,
    pub converged_time: Option<f64>,
    pub final_entropy: Option<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "m,n,eps,verdict,tau1,converged_tau,final_E,error";

    pub fn sign_correct(&self) -> bool {
        self.verdict
            .is_some_and(|v| expected_verdicts(self.eps).contains(&v))
    }

    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        format!(
            "{},{},{:.16e},{},{},{},{},{}",
            self.m,
            self.n,
            self.eps,
            self.verdict.map(Verdict::as_str).unwrap_or(""),
            opt(self.touch_time),
            opt(self.converged_time),
            opt(self.final_entropy),
            self.error.as_deref().unwrap_or("").replace(',', ";"),
        )
    }
}

fn sweep_row(base: &ALProfile, eps: f64, cfg: &RunConfig) -> SweepRow {
    let class = base.class();
    let mut row = SweepRow {
        m: class.m(),
        n: class.n(),
        eps,
        verdict: None,
        error: None,
        touch_time: None,
        converged_time: None,
        final_entropy: None,
    };
    let cfg = RunConfig {
        leaf: LeafMode::Off,
        ..cfg.clone()
    };
    match evolve(base, eps, Frame::Normalized, &cfg) {
        Ok(out) => {
            row.verdict = Some(out.verdict);
            row.touch_time = out.touch_time;
            row.converged_time = out.converged_time;
            row.final_entropy = out.records.last().map(|r| r.entropy_e);
        }
        Err(e) => row.error = Some(format!("{e:#}")),
    }
    row
}

/// Runs every `(class, ε)` pair on a pool of `jobs` threads. The rows come
/// back sorted by `(m, n, ε)` whatever the completion order.
pub fn sweep(
    bases: &[ALProfile],
    eps: &[f64],
    cfg: &RunConfig,
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(&ALProfile, f64)> = bases
        .iter()
        .flat_map(|b| eps.iter().map(move |&e| (b, e)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().context("building the sweep worker pool")?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(b, e)| sweep_row(b, e, cfg))
            .collect()
    });
    rows.sort_by(|a, b| (a.m, a.n).cmp(&(b.m, b.n)).then(a.eps.total_cmp(&b.eps)));
    Ok(rows)
}

/// `mπ` for a class.
pub fn half_area(class: CurveClass) -> f64 {
    f64::from(class.m()) * PI
}
