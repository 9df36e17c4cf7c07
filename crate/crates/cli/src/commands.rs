//! The four scenarios. Each returns the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use csf_core::al_profile::{build_profile, perturb};
use csf_core::flow::{Frame, RunOutcome, Verdict};
use csf_core::functionals::{self, DiagnosticsRecord};
use csf_core::geometry::{find_leaf, reconstruct};
use csf_core::{CurveClass, Error, Grid};

use crate::config::ExperimentConfig;
use crate::experiment::{self, class_config, distance_to_circle};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;
pub const EXIT_TIME_LIMIT: i32 = 3;
pub const EXIT_DICHOTOMY: i32 = 4;

/// Flat `key = value` summary with 17 significant digits for reals.
#[derive(Debug, Default)]
pub struct Summary(String);

impl Summary {
    pub fn real(&mut self, key: &str, v: f64) -> &mut Self {
        let _ = writeln!(self.0, "{key} = {v:.16e}");
        self
    }

    pub fn opt(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        match v {
            Some(v) => self.real(key, v),
            None => self.text(key, "none"),
        }
    }

    pub fn int(&mut self, key: &str, v: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.0, "{key} = {v}");
        self
    }

    pub fn text(&mut self, key: &str, v: &str) -> &mut Self {
        let _ = writeln!(self.0, "{key} = {v}");
        self
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn records_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(DiagnosticsRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

fn class_of(cfg: &ExperimentConfig) -> Result<CurveClass, i32> {
    CurveClass::new(cfg.m, cfg.n).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_FAILURE
    })
}

pub fn cmd_profile(cfg: &ExperimentConfig) -> Result<i32> {
    let class = match class_of(cfg) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let grid = Grid::new(class.m(), cfg.grid_n)?;
    let base = match build_profile(class, &grid) {
        Ok(b) => b,
        Err(e @ Error::UnderResolved(_)) => {
            eprintln!("error: {e}; increase --grid-n");
            return Ok(EXIT_UNRESOLVED);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_FAILURE);
        }
    };
    fs::create_dir_all(&cfg.out)?;
    let h = base.profile();
    let record = base.to_record();
    write(&cfg.out.join("profile.txt"), &record.to_text())?;
    write(
        &cfg.out.join("profile.json"),
        &serde_json::to_string_pretty(&record)?,
    )?;
    write(&cfg.out.join("curve.csv"), &reconstruct(h).to_csv())?;
    let ic = functionals::instability_coefficient(&base);
    let leaf = find_leaf(h, class.n()).ok();
    let mut s = Summary::default();
    s.int("m", class.m())
        .int("n", class.n())
        .int("N", grid.len())
        .real("h_max", base.shooting().h_max)
        .real("h_min", base.shooting().h_min)
        .real("residual", base.residual())
        .real("L", base.arc_length())
        .real("A", functionals::algebraic_area(h))
        .real("E", functionals::entropy_e(&base.curvature())?)
        .opt("F", functionals::entropy_f(h))
        .real("u", functionals::u_functional(&base.curvature()))
        .real("W", functionals::width_w(h))
        .opt("leaf_theta_c", leaf.map(|l| l.theta_c))
        .opt("leaf_area", leaf.map(|l| l.area))
        .real("instability_coefficient", ic.coefficient)
        .real("poincare_bound", ic.poincare_bound);
    write(&cfg.out.join("profile_summary.txt"), s.as_str())?;
    print!("{}", s.as_str());
    Ok(if base.residual() <= csf_core::al_profile::RESIDUAL_TOL {
        EXIT_OK
    } else {
        EXIT_UNRESOLVED
    })
}

fn eps_tag(eps: f64) -> String {
    format!("eps{eps:+}")
}

fn evolve_summary(cfg: &ExperimentConfig, eps: f64, out: &RunOutcome) -> Summary {
    let mut s = Summary::default();
    let last = out.records.last();
    s.int("m", cfg.m)
        .int("n", cfg.n)
        .int("N", cfg.grid_n)
        .real("eps", eps)
        .text("verdict", out.verdict.as_str())
        .opt("tau1", out.touch_time)
        .opt("converged_tau", out.converged_time)
        .opt("blowup_t", out.blowup.map(|b| b.unnormalized_t))
        .opt("blowup_tau", out.blowup.and_then(|b| b.tau))
        .opt("blowup_continuation_s", out.blowup.map(|b| b.frame_time))
        .opt("blowup_max_kappa", out.blowup.map(|b| b.max_curvature))
        .real("final_time", out.final_state.time)
        .real("final_distance_to_circle", distance_to_circle(out))
        .opt("final_min_h", last.map(|r| r.min_h))
        .opt("final_max_h", last.map(|r| r.max_h))
        .opt("final_E", last.map(|r| r.entropy_e))
        .int("records", out.records.len())
        .int("continuation_records", out.continuation.len())
        .int("steps", out.steps);
    s
}

pub fn cmd_evolve(cfg: &ExperimentConfig) -> Result<i32> {
    let class = match class_of(cfg) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let eps_list = if cfg.eps.is_empty() {
        vec![0.0]
    } else {
        cfg.eps.clone()
    };
    let base = match experiment::build_resolved(class, cfg.grid_n) {
        Ok(b) if b.grid().len() == cfg.grid_n => b,
        Ok(b) => {
            eprintln!(
                "error: class ({}, {}) needs at least N = {}",
                class.m(),
                class.n(),
                b.grid().len()
            );
            return Ok(EXIT_FAILURE);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_FAILURE);
        }
    };
    for &eps in &eps_list {
        if let Err(e) = perturb(&base, eps) {
            eprintln!("error: {e}");
            return Ok(EXIT_FAILURE);
        }
    }
    fs::create_dir_all(&cfg.out)?;
    let run_cfg = class_config(class, &cfg.run);
    let mut code = EXIT_OK;
    for &eps in &eps_list {
        let out = experiment::evolve(&base, eps, Frame::Normalized, &run_cfg)?;
        let tag = eps_tag(eps);
        write(
            &cfg.out.join(format!("diagnostics_{tag}.csv")),
            &records_csv(&out.records),
        )?;
        if !out.continuation.is_empty() {
            write(
                &cfg.out.join(format!("continuation_{tag}.csv")),
                &records_csv(&out.continuation),
            )?;
        }
        let summary = evolve_summary(cfg, eps, &out);
        write(
            &cfg.out.join(format!("summary_{tag}.txt")),
            summary.as_str(),
        )?;
        println!("ε = {eps:+}: {}", out.verdict.as_str());
        if out.verdict == Verdict::TimeLimit {
            code = EXIT_TIME_LIMIT;
        }
    }
    Ok(code)
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<i32> {
    let vcfg = VerifyConfig {
        class: (cfg.m, cfg.n),
        grid_n: cfg.grid_n,
        run: cfg.run.clone(),
        jobs: cfg.jobs,
    };
    let reports = verify::run_all(&vcfg);
    let table = verify::format_table(&reports);
    fs::create_dir_all(&cfg.out)?;
    write(&cfg.out.join("verify.txt"), &table)?;
    print!("{table}");
    Ok(if reports.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<i32> {
    let class = match class_of(cfg) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let eps_list = if cfg.eps.is_empty() {
        verify::SWEEP_EPS.to_vec()
    } else {
        cfg.eps.clone()
    };
    let base = match experiment::build_resolved(class, cfg.grid_n) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_FAILURE);
        }
    };
    let rows = experiment::sweep(&[base], &eps_list, &class_config(class, &cfg.run), cfg.jobs)?;
    fs::create_dir_all(&cfg.out)?;
    let mut table = String::from(experiment::SweepRow::CSV_HEADER);
    table.push('\n');
    for r in &rows {
        table.push_str(&r.to_csv_row());
        table.push('\n');
        println!(
            "ε = {:+}: {}",
            r.eps,
            r.verdict
                .map(Verdict::as_str)
                .or(r.error.as_deref())
                .unwrap_or("")
        );
    }
    write(&cfg.out.join("sweep.csv"), &table)?;
    Ok(if rows.iter().all(|r| r.sign_correct()) {
        EXIT_OK
    } else {
        EXIT_DICHOTOMY
    })
}

pub fn dispatch(cfg: &ExperimentConfig) -> Result<i32> {
    use crate::config::Command;
    match cfg.scenario {
        Command::Profile => cmd_profile(cfg),
        Command::Evolve => cmd_evolve(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}
