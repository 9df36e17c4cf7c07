//! Construction of the Abresch-Langer stationary profiles `h_{m,n}` and the
//! area-preserving perturbation `h_ε`.
//!
//! A stationary profile of the normalized flow satisfies `κ = h`, i.e.
//! `h (h + h_θθ) = 1`, equivalently `h'' = 1/h - h`. It is even about its tip
//! at `θ = 0`, reaches its minimum at `θ = mπ/n` and is `2mπ/n`-periodic.
//!
//! The construction runs in two stages. A shooting pass picks the tip value
//! `h(0)` whose half-period (tip to trough) equals `mπ/n`. The shot trajectory
//! then seeds a Newton iteration on the collocation residual, posed on the
//! cosine series `h(θ) = Σ_j a_j cos(j n θ / m)`, which spans exactly the even,
//! `2mπ/n`-periodic profiles with the tip at `θ = 0`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::spectral::{Grid, PeriodicProfile, ProfileKind};

/// Upper end of the tip-value scan used to bracket the half-period.
pub const H_CAP: f64 = 50.0;
/// Relative/absolute tolerance of the shooting integrator.
pub const SHOOTING_TOL: f64 = 1e-12;
/// Required max-norm of `h (h + h_θθ) - 1` after the Newton polish.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// The pair `(m, n)`: rotation index and number of leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    m: u32,
    n: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CurveClass {
    /// Accepts coprime `(m, n)` with `1/2 < m/n < 1/√2`.
    pub fn new(m: u32, n: u32) -> Result<Self> {
        let reject = |reason: &str| Error::InadmissibleClass {
            m,
            n,
            reason: reason.to_string(),
        };
        if m == 0 || n == 0 {
            return Err(reject("m and n must be positive"));
        }
        if gcd(m, n) != 1 {
            return Err(reject("m and n must be coprime"));
        }
        // 1/2 < m/n  <=>  n < 2m;   m/n < 1/√2  <=>  2m² < n²
        if n >= 2 * m {
            return Err(reject("m/n must exceed 1/2"));
        }
        if 2 * u64::from(m).pow(2) >= u64::from(n).pow(2) {
            return Err(reject("m/n must be below 1/sqrt(2)"));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Tip-to-trough distance `mπ/n`.
    pub fn half_period(&self) -> f64 {
        f64::from(self.m) * PI / f64::from(self.n)
    }

    /// Angular period of one leaf, `2mπ/n`.
    pub fn leaf_period(&self) -> f64 {
        2.0 * self.half_period()
    }

    /// `2mπ`.
    pub fn period(&self) -> f64 {
        2.0 * PI * f64::from(self.m)
    }
}

/// Outcome of one shot of `h'' = 1/h - h` from the tip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub h_max: f64,
    pub h_min: f64,
    pub half_period: f64,
    /// Relative change of `½h'² + ½h² - ln h` between tip and trough.
    pub energy_drift: f64,
    /// `|half_period - mπ/n|` once a target class is known.
    pub period_residual: Option<f64>,
}

fn stationary_rhs(y: &[f64; 2]) -> [f64; 2] {
    [y[1], 1.0 / y[0] - y[0]]
}

fn energy(y: &[f64; 2]) -> f64 {
    0.5 * y[1] * y[1] + 0.5 * y[0] * y[0] - y[0].ln()
}

/// Integrates from `(h, h') = (h_max, 0)` to the next zero of `h'`.
pub fn shoot_half_period(h_max: f64) -> Result<ShootingResult> {
    if !(h_max > 1.0 && h_max.is_finite()) {
        return Err(Error::IntegrationFailure {
            theta: 0.0,
            reason: format!("tip value must exceed 1, got {h_max}"),
        });
    }
    let solver = Dopri5::new(stationary_rhs, SHOOTING_TOL);
    let y0 = [h_max, 0.0];
    let mut t = 0.0;
    let mut y = y0;
    let mut h = 1e-3;
    loop {
        if t > 10.0 {
            return Err(Error::IntegrationFailure {
                theta: t,
                reason: "no turning point found".into(),
            });
        }
        let (dt, next) = solver.step(t, &y, &mut h, 0.25)?;
        if y[0] <= 0.0 || next[0] <= 0.0 {
            return Err(Error::IntegrationFailure {
                theta: t,
                reason: "trajectory reached h <= 0".into(),
            });
        }
        if t > 0.0 && y[1] < 0.0 && next[1] >= 0.0 {
            // Newton on the sub-step length s so that h'(t + s) = 0.
            let mut s = dt * (-y[1]) / (next[1] - y[1]);
            let mut at = next;
            for _ in 0..50 {
                at = solver.trial(&y, s).0;
                let slope = stationary_rhs(&at)[1];
                let ds = at[1] / slope;
                s = (s - ds).clamp(0.0, dt);
                if ds.abs() <= 1e-15 * (t + s) {
                    at = solver.trial(&y, s).0;
                    break;
                }
            }
            let e0 = energy(&y0);
            return Ok(ShootingResult {
                h_max,
                h_min: at[0],
                half_period: t + s,
                energy_drift: ((energy(&at) - e0) / e0).abs(),
                period_residual: None,
            });
        }
        t += dt;
        y = next;
    }
}

/// Finds the tip value whose half-period equals `target`, by geometric
/// bracketing on `(1, H_CAP]` followed by bisection.
pub fn solve_half_period(target: f64, tol: f64) -> Result<ShootingResult> {
    let defect = |h_max: f64| shoot_half_period(h_max).map(|r| (r.half_period - target, r));
    let fail = Error::BracketingFailure { target, cap: H_CAP };

    let mut lo = 1.0 + 1e-3;
    let (f_lo, _) = defect(lo)?;
    if f_lo <= 0.0 {
        return Err(fail);
    }
    let mut step = 1e-3;
    let mut hi;
    loop {
        step *= 2.0;
        hi = 1.0 + step;
        if hi > H_CAP {
            return Err(fail);
        }
        match defect(hi) {
            Ok((f, _)) if f < 0.0 => break,
            Ok(_) => lo = hi,
            // Tip values this extreme underflow the trough; nothing beyond helps.
            Err(_) => return Err(fail),
        }
    }
    let mut best = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (f, r) = defect(mid)?;
        best = Some(r);
        if f.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = best.expect("bisection ran at least once");
    r.period_residual = Some((r.half_period - target).abs());
    Ok(r)
}

/// Tip amplitude of the class, with `|half_period - mπ/n| <= tol`.
pub fn solve_class(class: CurveClass, tol: f64) -> Result<ShootingResult> {
    solve_half_period(class.half_period(), tol)
}

/// A polished stationary profile `h_{m,n}` sampled on a full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ALProfile {
    class: CurveClass,
    profile: PeriodicProfile,
    arc_length: f64,
    residual: f64,
    shooting: ShootingResult,
    coefficients: Vec<f64>,
}

/// `cos(2π r / len)` for `r = 0..len`.
fn cos_table(len: usize) -> Vec<f64> {
    (0..len)
        .map(|r| (2.0 * PI * r as f64 / len as f64).cos())
        .collect()
}

impl ALProfile {
    pub fn class(&self) -> CurveClass {
        self.class
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    pub fn grid(&self) -> &Grid {
        self.profile.grid()
    }

    /// `L = ∫ h dθ`, the arc length of the curve.
    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    /// Max-norm of `h (h + h_θθ) - 1` on the grid.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn shooting(&self) -> &ShootingResult {
        &self.shooting
    }

    /// Coefficients `a_j` of `h(θ) = Σ_j a_j cos(j n θ / m)`.
    pub fn cosine_coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Exact off-grid evaluation of the cosine series.
    pub fn value_at(&self, theta: f64) -> f64 {
        let ratio = f64::from(self.class.n) / f64::from(self.class.m);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, a)| a * (j as f64 * ratio * theta).cos())
            .sum()
    }

    /// `κ_{m,n} = 1/(h + h_θθ)`; equals the profile itself up to the residual.
    pub fn curvature(&self) -> PeriodicProfile {
        let d2 = self.profile.differentiate(2);
        self.profile
            .zip_map(&d2, |h, hpp| 1.0 / (h + hpp))
            .with_kind(ProfileKind::Curvature)
    }

    pub fn to_record(&self) -> ProfileRecord {
        let grid = self.grid();
        ProfileRecord {
            m: self.class.m,
            n: self.class.n,
            samples: grid.len(),
            arc_length: self.arc_length,
            residual: self.residual,
            theta: grid.nodes().collect(),
            values: self.profile.values().to_vec(),
        }
    }
}

/// Builds `h_{m,n}` on `grid` (shooting seed, then collocation Newton).
pub fn build_profile(class: CurveClass, grid: &Grid) -> Result<ALProfile> {
    if grid.m() != class.m {
        return Err(Error::InvalidGrid(format!(
            "grid rotation index {} does not match class m = {}",
            grid.m(),
            class.m
        )));
    }
    let n = class.n as usize;
    if grid.len() < 16 * n {
        return Err(Error::UnderResolved(format!(
            "{} samples give fewer than 16 per leaf period for n = {n}",
            grid.len()
        )));
    }
    let shooting = solve_class(class, 1e-13)?;
    let modes = grid.len() / (2 * n);
    let unknowns = modes + 1;
    let ratio = class.n as f64 / class.m as f64;
    let q: Vec<f64> = (0..unknowns).map(|j| j as f64 * ratio).collect();

    // Collocation points φ_l = l·(mπ/n)/J, where q_j φ_l = π j l / J.
    let phi_cos = cos_table(2 * modes);
    let basis = DMatrix::from_fn(unknowns, unknowns, |l, j| phi_cos[(j * l) % (2 * modes)]);
    let basis_dd = DMatrix::from_fn(unknowns, unknowns, |l, j| -q[j] * q[j] * basis[(l, j)]);

    // Seed from the shot trajectory.
    let solver = Dopri5::new(stationary_rhs, SHOOTING_TOL);
    let mut seed = Vec::with_capacity(unknowns);
    let mut y = [shooting.h_max, 0.0];
    let mut t = 0.0;
    let mut step = 1e-3;
    for l in 0..unknowns {
        let target = l as f64 * class.half_period() / modes as f64;
        y = solver.integrate_to(t, y, target, &mut step)?;
        t = target;
        seed.push(y[0]);
    }
    let mut coeffs =
        basis
            .clone()
            .lu()
            .solve(&DVector::from_vec(seed))
            .ok_or(Error::NewtonDivergence {
                residual: f64::NAN,
                iterations: 0,
            })?;

    let mut last = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let h = &basis * &coeffs;
        let hdd = &basis_dd * &coeffs;
        let residual = DVector::from_fn(unknowns, |l, _| h[l] * (h[l] + hdd[l]) - 1.0);
        let norm = residual.amax();
        if !norm.is_finite() || norm > 10.0 * last.max(1e-6) {
            return Err(Error::NewtonDivergence {
                residual: norm,
                iterations,
            });
        }
        if norm <= 1e-13 || (norm <= 1e-10 && norm >= 0.5 * last) {
            break;
        }
        if iterations >= 40 {
            return Err(Error::NewtonDivergence {
                residual: norm,
                iterations,
            });
        }
        let jac = DMatrix::from_fn(unknowns, unknowns, |l, j| {
            (2.0 * h[l] + hdd[l]) * basis[(l, j)] + h[l] * basis_dd[(l, j)]
        });
        let delta = jac.lu().solve(&residual).ok_or(Error::NewtonDivergence {
            residual: norm,
            iterations,
        })?;
        coeffs -= delta;
        last = norm;
        iterations += 1;
    }

    // Sample the series and its second derivative on the grid:
    // q_j θ_i = 2π j n i / N. Summing the series directly keeps the residual
    // free of the O(N²ε) rounding that FFT differentiation adds at large N.
    let len = grid.len();
    let grid_cos = cos_table(len);
    let (values, residual) = (0..len).fold(
        (Vec::with_capacity(len), 0.0_f64),
        |(mut values, worst), i| {
            let (mut h, mut d) = (0.0, 0.0);
            for (j, a) in coeffs.iter().enumerate() {
                let c = grid_cos[(j * n * i) % len];
                h += a * c;
                d -= a * q[j] * q[j] * c;
            }
            values.push(h);
            (values, worst.max((h * (h + d) - 1.0).abs()))
        },
    );
    let profile = PeriodicProfile::new(grid.clone(), values, ProfileKind::Support)?;

    // The grid nodes can coincide with the collocation points, which would hide
    // an unresolved series; probe the residual halfway between nodes as well.
    let half_cos = cos_table(2 * len);
    let probes = len / (2 * n) + 1;
    let off_grid = (0..probes)
        .map(|i| {
            let (mut h, mut d) = (0.0, 0.0);
            for (j, a) in coeffs.iter().enumerate() {
                let c = half_cos[(j * n * (2 * i + 1)) % (2 * len)];
                h += a * c;
                d -= a * q[j] * q[j] * c;
            }
            (h * (h + d) - 1.0).abs()
        })
        .fold(0.0_f64, f64::max);

    if residual > RESIDUAL_TOL || off_grid > RESIDUAL_TOL {
        return Err(Error::UnderResolved(format!(
            "stationary residual {:.3e} on grid, {:.3e} between nodes, with N = {len} for class ({}, {})",
            residual, off_grid, class.m, class.n
        )));
    }
    let arc_length = profile.integrate();
    Ok(ALProfile {
        class,
        profile,
        arc_length,
        residual,
        shooting,
        coefficients: coeffs.iter().copied().collect(),
    })
}

/// `h_ε = λ^{-1/2} (h_{m,n} + ε)` with `λ = 1 + (L/mπ) ε + ε²`.
#[derive(Debug, Clone)]
pub struct PerturbedProfile<'a> {
    pub base: &'a ALProfile,
    pub eps: f64,
    pub lambda: f64,
    pub profile: PeriodicProfile,
}

pub fn perturb(base: &ALProfile, eps: f64) -> Result<PerturbedProfile<'_>> {
    let m_pi = f64::from(base.class.m) * PI;
    let lambda = 1.0 + base.arc_length / m_pi * eps + eps * eps;
    if !eps.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidEpsilon {
            eps,
            reason: format!("scale factor 1 + (L/mπ)ε + ε² = {lambda} is not positive"),
        });
    }
    if base.profile.min() + eps <= 0.0 {
        return Err(Error::InvalidEpsilon {
            eps,
            reason: format!(
                "h_mn + ε must stay positive (min h_mn = {})",
                base.profile.min()
            ),
        });
    }
    let scale = lambda.sqrt().recip();
    Ok(PerturbedProfile {
        base,
        eps,
        lambda,
        profile: base.profile.map(|h| scale * (h + eps)),
    })
}

/// First-order variation fields of `h_ε` and `κ_ε` at `ε = 0`:
/// `1 - (L/2mπ) h_{m,n}` and `κ_{m,n} (L/2mπ - κ_{m,n})`.
pub fn predicted_variations(base: &ALProfile) -> (PeriodicProfile, PeriodicProfile) {
    let c = base.arc_length / base.class.period();
    let dh = base.profile.map(|h| 1.0 - c * h);
    let dk = base
        .profile
        .map(|k| k * (c - k))
        .with_kind(ProfileKind::Curvature);
    (dh, dk)
}

/// Serializable form of a stationary profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub m: u32,
    pub n: u32,
    pub samples: usize,
    pub arc_length: f64,
    pub residual: f64,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl ProfileRecord {
    /// Header line `# m=.. n=.. N=.. L=.. residual=..`, then `θ_i value_i` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# m={} n={} N={} L={:.16e} residual={:.16e}\n",
            self.m, self.n, self.samples, self.arc_length, self.residual
        );
        for (t, v) in self.theta.iter().zip(&self.values) {
            let _ = writeln!(out, "{t:.16e} {v:.16e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let mut fields = std::collections::HashMap::new();
        for token in header.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header token {token:?}")))?;
            fields.insert(k, v);
        }
        fn get<T: std::str::FromStr>(
            fields: &std::collections::HashMap<&str, &str>,
            key: &str,
        ) -> Result<T> {
            fields
                .get(key)
                .ok_or_else(|| Error::Parse(format!("header lacks {key}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("header field {key} is malformed")))
        }
        let mut record = ProfileRecord {
            m: get(&fields, "m")?,
            n: get(&fields, "n")?,
            samples: get(&fields, "N")?,
            arc_length: get(&fields, "L")?,
            residual: get(&fields, "residual")?,
            theta: Vec::new(),
            values: Vec::new(),
        };
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("short row {line:?}")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number in {line:?}")))
            };
            record.theta.push(next()?);
            record.values.push(next()?);
        }
        if record.values.len() != record.samples {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                record.samples,
                record.values.len()
            )));
        }
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class23() -> CurveClass {
        CurveClass::new(2, 3).unwrap()
    }

    #[test]
    fn admissible_band() {
        assert!(CurveClass::new(2, 3).is_ok());
        assert!(CurveClass::new(3, 5).is_ok());
        assert!(CurveClass::new(4, 7).is_ok());
        assert!(CurveClass::new(5, 8).is_ok());
        assert!(CurveClass::new(1, 2).is_err());
        assert!(CurveClass::new(3, 4).is_err());
        assert!(CurveClass::new(4, 6).is_err());
        assert!(CurveClass::new(1, 1).is_err());
        assert!(CurveClass::new(0, 3).is_err());
    }

    #[test]
    fn harmonic_limit_of_half_period() {
        let r = shoot_half_period(1.0 + 1e-6).unwrap();
        assert!((r.half_period - PI / 2f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn shot_conserves_energy() {
        let r = shoot_half_period(1.5).unwrap();
        assert!(r.energy_drift <= 1e-10, "drift {}", r.energy_drift);
        assert!(r.h_min < 1.0 && r.h_min > 0.0);
    }

    #[test]
    fn shooting_rejects_tip_below_equilibrium() {
        assert!(shoot_half_period(0.9).is_err());
        assert!(shoot_half_period(1.0).is_err());
    }

    #[test]
    fn bracket_fails_outside_band() {
        // m/n = 3/4 lies above 1/√2; m/n = 2/5 lies below 1/2.
        assert!(matches!(
            solve_half_period(3.0 * PI / 4.0, 1e-12),
            Err(Error::BracketingFailure { .. })
        ));
        assert!(matches!(
            solve_half_period(2.0 * PI / 5.0, 1e-12),
            Err(Error::BracketingFailure { .. })
        ));
    }

    #[test]
    fn class_target_and_solution() {
        let c = class23();
        assert!((c.half_period() - 2.0 * PI / 3.0).abs() < 1e-15);
        let r = solve_class(c, 1e-13).unwrap();
        assert!(r.period_residual.unwrap() <= 1e-13);
        assert!(r.h_min < 1.0 && r.h_max > 1.0);
    }

    #[test]
    fn build_rejects_mismatched_or_coarse_grids() {
        let c = class23();
        assert!(build_profile(c, &Grid::new(1, 128).unwrap()).is_err());
        let coarse = CurveClass::new(5, 8).unwrap();
        assert!(matches!(
            build_profile(coarse, &Grid::new(5, 64).unwrap()),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn perturbation_basics() {
        let base = build_profile(class23(), &Grid::new(2, 256).unwrap()).unwrap();
        let zero = perturb(&base, 0.0).unwrap();
        assert_eq!(zero.profile, *base.profile());
        assert!(perturb(&base, -0.5).is_err());
        assert!(perturb(&base, f64::NAN).is_err());
    }

    #[test]
    fn text_record_round_trip() {
        let base = build_profile(class23(), &Grid::new(2, 256).unwrap()).unwrap();
        let rec = base.to_record();
        let back = ProfileRecord::from_text(&rec.to_text()).unwrap();
        assert_eq!(rec, back);
        assert!(ProfileRecord::from_text("m=2\n").is_err());
    }
}
