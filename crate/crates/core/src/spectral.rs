//! Periodic-grid calculus on `[0, 2mπ]`.
//!
//! Samples live on the uniform grid `θ_i = i·2mπ/N`. Because the period is
//! `2mπ` rather than `2π`, FFT bin `k` carries the angular wavenumber `k/m`.
//! Differentiation and interpolation go through the trigonometric interpolant
//! of the samples; quadrature is the uniform-node rule, which is spectrally
//! accurate for smooth periodic integrands.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, 2mπ)` with `N` nodes.
#[derive(Clone)]
pub struct Grid {
    m: u32,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub const MIN_SAMPLES: usize = 64;

    pub fn new(m: u32, len: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGrid(
                "rotation index m must be positive".into(),
            ));
        }
        if len < Self::MIN_SAMPLES || !len.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "sample count must be even and at least {}, got {len}",
                Self::MIN_SAMPLES
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `2mπ`.
    pub fn period(&self) -> f64 {
        2.0 * PI * f64::from(self.m)
    }

    pub fn spacing(&self) -> f64 {
        self.period() / self.len as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.node(i))
    }

    /// Signed FFT index of bin `k` (`-N/2` for the Nyquist bin is reported as `N/2`).
    pub(crate) fn signed_index(&self, k: usize) -> i64 {
        if k <= self.len / 2 {
            k as i64
        } else {
            k as i64 - self.len as i64
        }
    }

    /// Angular wavenumber of FFT bin `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 / f64::from(self.m)
    }

    /// Largest resolved wavenumber, `N / (2m)`.
    pub fn max_wavenumber(&self) -> f64 {
        self.len as f64 / (2.0 * f64::from(self.m))
    }

    fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.len == other.len
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("m", &self.m)
            .field("len", &self.len)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Support,
    Curvature,
}

/// Multiplier `(i q)^order` applied to a Fourier coefficient.
fn derivative_factor(q: f64, order: u32) -> Complex64 {
    let mag = q.powi(order as i32);
    match order % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// Reusable FFT buffers for the hot loops of the time stepper.
pub struct SpectralWorkspace {
    grid: Grid,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    // -q_k^2 / N per bin: second derivative and inverse-FFT scaling in one pass.
    second: Vec<f64>,
}

impl SpectralWorkspace {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            buf: vec![Complex64::default(); grid.len()],
            scratch: vec![Complex64::default(); grid.scratch_len()],
            second: (0..grid.len())
                .map(|k| -grid.wavenumber(k).powi(2) / grid.len() as f64)
                .collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn load(&mut self, values: &[f64]) {
        for (b, &v) in self.buf.iter_mut().zip(values) {
            *b = Complex64::new(v, 0.0);
        }
        self.grid.forward(&mut self.buf, &mut self.scratch);
    }

    fn store(&mut self, out: &mut [f64]) {
        self.grid.inverse(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / self.grid.len() as f64;
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * scale;
        }
    }

    /// Writes the `order`-th derivative of the interpolant of `values` into `out`.
    pub fn derivative_into(&mut self, values: &[f64], order: u32, out: &mut [f64]) {
        assert_eq!(values.len(), self.grid.len());
        assert_eq!(out.len(), self.grid.len());
        if order == 0 {
            out.copy_from_slice(values);
            return;
        }
        self.load(values);
        if order == 2 {
            for (b, &f) in self.buf.iter_mut().zip(&self.second) {
                *b *= f;
            }
            self.grid.inverse(&mut self.buf, &mut self.scratch);
            for (o, b) in out.iter_mut().zip(&self.buf) {
                *o = b.re;
            }
            return;
        }
        let nyquist = self.grid.len() / 2;
        for k in 0..self.grid.len() {
            if k == nyquist && order % 2 == 1 {
                self.buf[k] = Complex64::default();
            } else {
                self.buf[k] *= derivative_factor(self.grid.wavenumber(k), order);
            }
        }
        self.store(out);
    }

    /// Projects `values` onto profiles that are even about `θ = 0` and
    /// `2mπ/fold`-periodic: only cosine modes with wavenumber a multiple of
    /// `fold/m` survive.
    pub fn project_symmetric(&mut self, values: &mut [f64], fold: u32) {
        assert_eq!(values.len(), self.grid.len());
        self.load(values);
        let fold = i64::from(fold.max(1));
        for k in 0..self.grid.len() {
            if self.grid.signed_index(k) % fold == 0 {
                self.buf[k] = Complex64::new(self.buf[k].re, 0.0);
            } else {
                self.buf[k] = Complex64::default();
            }
        }
        self.store(values);
    }

    /// Post-step conditioning of a support function: optional symmetric
    /// projection (as in [`Self::project_symmetric`]) followed by a uniform
    /// rescaling that sets the algebraic area `½∫ h (h + h_θθ)` to
    /// `target_area`. Both act on a single spectrum. Returns the area before
    /// rescaling.
    pub fn condition(
        &mut self,
        values: &mut [f64],
        fold: Option<u32>,
        target_area: Option<f64>,
    ) -> f64 {
        assert_eq!(values.len(), self.grid.len());
        self.load(values);
        if let Some(fold) = fold {
            let fold = i64::from(fold.max(1));
            for k in 0..self.grid.len() {
                self.buf[k] = if self.grid.signed_index(k) % fold == 0 {
                    Complex64::new(self.buf[k].re, 0.0)
                } else {
                    Complex64::default()
                };
            }
        }
        let len = self.grid.len() as f64;
        let area = 0.5 * self.grid.period() / (len * len)
            * (0..self.grid.len())
                .map(|k| {
                    let q = self.grid.wavenumber(k);
                    (1.0 - q * q) * self.buf[k].norm_sqr()
                })
                .sum::<f64>();
        if let Some(target) = target_area {
            if area > 0.0 {
                let s = (target / area).sqrt();
                for b in &mut self.buf {
                    *b *= s;
                }
            }
        }
        self.store(values);
        area
    }

    /// Half spectrum `c_0 .. c_{N/2}` normalized so that the interpolant is
    /// `c_0 + 2 Re Σ c_k e^{i q_k θ} + c_{N/2} cos(q_{N/2} θ)`.
    fn half_spectrum(&mut self, values: &[f64]) -> Vec<Complex64> {
        self.load(values);
        let scale = 1.0 / self.grid.len() as f64;
        self.buf[..=self.grid.len() / 2]
            .iter()
            .map(|c| c * scale)
            .collect()
    }
}

/// Trigonometric interpolant of a sampled profile, for off-grid evaluation.
#[derive(Debug, Clone)]
pub struct Interpolant {
    m: f64,
    coeffs: Vec<Complex64>,
}

impl Interpolant {
    /// Value of the `order`-th derivative at `theta`.
    pub fn derivative(&self, theta: f64, order: u32) -> f64 {
        let nyquist = self.coeffs.len() - 1;
        let mut sum = if order == 0 { self.coeffs[0].re } else { 0.0 };
        for (k, c) in self.coeffs.iter().enumerate().take(nyquist).skip(1) {
            let q = k as f64 / self.m;
            let (s, co) = (q * theta).sin_cos();
            let z = c * derivative_factor(q, order) * Complex64::new(co, s);
            sum += 2.0 * z.re;
        }
        if order.is_multiple_of(2) {
            let q = nyquist as f64 / self.m;
            let sign = if order.is_multiple_of(4) { 1.0 } else { -1.0 };
            sum += sign * q.powi(order as i32) * self.coeffs[nyquist].re * (q * theta).cos();
        }
        sum
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.derivative(theta, 0)
    }

    /// Exact integral of the interpolant over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let nyquist = self.coeffs.len() - 1;
        let mut sum = self.coeffs[0].re * (b - a);
        for (k, c) in self.coeffs.iter().enumerate().take(nyquist).skip(1) {
            let q = k as f64 / self.m;
            let (sb, cb) = (q * b).sin_cos();
            let (sa, ca) = (q * a).sin_cos();
            let diff = Complex64::new(cb - ca, sb - sa);
            sum += 2.0 * (c * diff / Complex64::new(0.0, q)).re;
        }
        let q = nyquist as f64 / self.m;
        sum += self.coeffs[nyquist].re * ((q * b).sin() - (q * a).sin()) / q;
        sum
    }

    /// Newton refinement of a critical point of the interpolant starting at
    /// `theta0`, confined to `theta0 ± max_shift`.
    pub fn refine_critical_point(&self, theta0: f64, max_shift: f64) -> (f64, f64) {
        let mut theta = theta0;
        for _ in 0..30 {
            let d1 = self.derivative(theta, 1);
            let d2 = self.derivative(theta, 2);
            if d2 == 0.0 {
                break;
            }
            let next = (theta - d1 / d2).clamp(theta0 - max_shift, theta0 + max_shift);
            let done = (next - theta).abs() < 1e-15 * (1.0 + theta.abs());
            theta = next;
            if done {
                break;
            }
        }
        (theta, self.value(theta))
    }
}

/// A sampled `2mπ`-periodic function (support function or curvature).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    grid: Grid,
    values: Vec<f64>,
    kind: ProfileKind,
}

impl PeriodicProfile {
    pub fn new(grid: Grid, values: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values, kind })
    }

    pub fn from_fn(grid: &Grid, kind: ProfileKind, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self {
            grid: grid.clone(),
            values,
            kind,
        }
    }

    pub fn constant(grid: &Grid, kind: ProfileKind, c: f64) -> Self {
        Self::from_fn(grid, kind, |_| c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    /// Pointwise map; the result keeps this profile's grid and kind.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            kind: self.kind,
        }
    }

    /// Pointwise combination with a profile on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "profiles live on different grids");
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            kind: self.kind,
        }
    }

    /// Samples of the `order`-th derivative of the trigonometric interpolant.
    pub fn differentiate(&self, order: u32) -> Self {
        let mut out = vec![0.0; self.values.len()];
        SpectralWorkspace::new(&self.grid).derivative_into(&self.values, order, &mut out);
        Self {
            grid: self.grid.clone(),
            values: out,
            kind: self.kind,
        }
    }

    /// `∫₀^{2mπ} p dθ` by the uniform-node rule.
    pub fn integrate(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    /// Average over the period, `integrate / 2mπ`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn interpolant(&self) -> Interpolant {
        Interpolant {
            m: f64::from(self.grid.m()),
            coeffs: SpectralWorkspace::new(&self.grid).half_spectrum(&self.values),
        }
    }

    /// Value of the interpolant at `theta` (taken mod `2mπ`).
    pub fn eval_at(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(self.grid.period());
        let h = self.grid.spacing();
        let idx = (theta / h).round() as usize % self.grid.len();
        if (theta - idx as f64 * h).abs() < 1e-14 * self.grid.period() {
            return self.values[idx];
        }
        self.interpolant().value(theta)
    }

    /// Cyclic sign changes over one period, ignoring entries inside the
    /// dead-band `1e-9 · max|values|`.
    pub fn count_sign_changes(&self) -> usize {
        let band = 1e-9 * self.max_abs();
        let signs: Vec<bool> = self
            .values
            .iter()
            .filter(|v| v.abs() > band)
            .map(|&v| v > 0.0)
            .collect();
        if signs.len() < 2 {
            return 0;
        }
        let inner = signs.windows(2).filter(|w| w[0] != w[1]).count();
        inner + usize::from(signs[0] != signs[signs.len() - 1])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// `max_i |p_i - q_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn argmin(&self) -> usize {
        argbest(&self.values, |a, b| a < b)
    }

    pub fn argmax(&self) -> usize {
        argbest(&self.values, |a, b| a > b)
    }

    /// Index of the extremum restricted to nodes `θ_i ∈ [lo, hi]`.
    pub fn argbest_in(&self, lo: f64, hi: f64, want_max: bool) -> usize {
        let h = self.grid.spacing();
        let first = (lo / h).ceil().max(0.0) as usize;
        let last = ((hi / h).floor() as usize).min(self.grid.len() - 1);
        let mut best = first;
        for i in first..=last {
            let better = if want_max {
                self.values[i] > self.values[best]
            } else {
                self.values[i] < self.values[best]
            };
            if better {
                best = i;
            }
        }
        best
    }

    /// Quadratic refinement through node `i` and its cyclic neighbours.
    /// Returns `(θ, value)` of the parabola's vertex.
    pub fn refine_extremum(&self, i: usize) -> (f64, f64) {
        let n = self.values.len();
        let f0 = self.values[i];
        let fm = self.values[(i + n - 1) % n];
        let fp = self.values[(i + 1) % n];
        let curv = fm - 2.0 * f0 + fp;
        if curv == 0.0 {
            return (self.grid.node(i), f0);
        }
        let delta = (0.5 * (fm - fp) / curv).clamp(-0.5, 0.5);
        (
            self.grid.node(i) + delta * self.grid.spacing(),
            f0 - 0.25 * (fm - fp) * delta,
        )
    }
}

fn argbest(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(m: u32, n: usize) -> Grid {
        Grid::new(m, n).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(1, 63).is_err());
        assert!(Grid::new(1, 66 + 1).is_err());
        assert!(Grid::new(1, 32).is_err());
        assert!(Grid::new(0, 128).is_err());
        let g = grid(3, 96);
        assert_eq!(g.node(0), 0.0);
        assert!((g.period() - 6.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_cosine() {
        let g = grid(1, 128);
        let p = PeriodicProfile::from_fn(&g, ProfileKind::Support, f64::cos);
        let d = p.differentiate(1);
        for (th, v) in g.nodes().zip(d.values()) {
            assert!((v + th.sin()).abs() <= 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(2, 64);
        let p = PeriodicProfile::constant(&g, ProfileKind::Support, 3.5);
        for order in 1..=3 {
            assert!(p.differentiate(order).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn half_integer_wavenumber_second_derivative() {
        let g = grid(2, 128);
        let p = PeriodicProfile::from_fn(&g, ProfileKind::Support, |t| (1.5 * t).cos());
        let d2 = p.differentiate(2);
        for (th, v) in g.nodes().zip(d2.values()) {
            assert!((v + 2.25 * (1.5 * th).cos()).abs() <= 1e-11);
        }
    }

    #[test]
    fn quadrature_examples() {
        let g2 = grid(2, 64);
        let one = PeriodicProfile::constant(&g2, ProfileKind::Support, 1.0);
        assert!((one.integrate() - 4.0 * PI).abs() <= 1e-12);
        let g1 = grid(1, 64);
        let c = PeriodicProfile::from_fn(&g1, ProfileKind::Support, f64::cos);
        assert!(c.integrate().abs() <= 1e-12);
        let c2 = PeriodicProfile::from_fn(&g1, ProfileKind::Support, |t| t.cos().powi(2));
        assert!((c2.integrate() - PI).abs() <= 1e-12);
    }

    #[test]
    fn interpolation() {
        let g = grid(1, 64);
        let s = PeriodicProfile::from_fn(&g, ProfileKind::Support, f64::sin);
        assert!((s.eval_at(PI / 2.0) - 1.0).abs() <= 1e-12);
        assert!((s.eval_at(PI / 2.0 + 2.0 * PI) - 1.0).abs() <= 1e-12);
        assert!((s.interpolant().value(0.3) - 0.3_f64.sin()).abs() <= 1e-12);
        assert!((s.interpolant().derivative(0.3, 3) + 0.3_f64.cos()).abs() <= 1e-11);
        let exact = 0.3_f64.cos() - 2.0_f64.cos();
        assert!((s.interpolant().integral(0.3, 2.0) - exact).abs() <= 1e-12);
        let c = PeriodicProfile::constant(&g, ProfileKind::Support, 5.0);
        assert_eq!(c.eval_at(1.234), 5.0);
    }

    #[test]
    fn sign_changes() {
        let g = grid(1, 128);
        assert_eq!(
            PeriodicProfile::constant(&g, ProfileKind::Support, 1.0).count_sign_changes(),
            0
        );
        let s = PeriodicProfile::from_fn(&g, ProfileKind::Support, f64::sin);
        assert_eq!(s.count_sign_changes(), 2);
        let g2 = grid(2, 128);
        let c = PeriodicProfile::from_fn(&g2, ProfileKind::Support, |t| (1.5 * t).sin());
        assert_eq!(c.count_sign_changes(), 6);
    }

    #[test]
    fn symmetric_projection_keeps_admissible_modes() {
        let g = grid(2, 128);
        let keep = |t: f64| 1.0 + 0.2 * (1.5 * t).cos() + 0.1 * (3.0 * t).cos();
        let p = PeriodicProfile::from_fn(&g, ProfileKind::Support, |t| {
            keep(t) + 0.3 * (0.5 * t).cos() + 0.2 * (1.5 * t).sin()
        });
        let mut v = p.values().to_vec();
        SpectralWorkspace::new(&g).project_symmetric(&mut v, 3);
        for (th, x) in g.nodes().zip(&v) {
            assert!((x - keep(th)).abs() < 1e-13);
        }
    }

    #[test]
    fn quadratic_refinement_recovers_parabola_vertex() {
        let g = grid(1, 256);
        let p = PeriodicProfile::from_fn(&g, ProfileKind::Support, |t| (t - 1.0).cos());
        let (th, v) = p.refine_extremum(p.argmax());
        assert!((th - 1.0).abs() < 1e-5);
        assert!((v - 1.0).abs() < 1e-7);
        let (th2, v2) = p
            .interpolant()
            .refine_critical_point(g.node(p.argmax()), g.spacing());
        assert!((th2 - 1.0).abs() < 1e-12);
        assert!((v2 - 1.0).abs() < 1e-14);
    }

    fn smooth_profile(g: &Grid, a: &[f64]) -> PeriodicProfile {
        let m = f64::from(g.m());
        PeriodicProfile::from_fn(g, ProfileKind::Support, |t| {
            a.iter()
                .enumerate()
                .map(|(k, c)| {
                    c * ((k as f64 + 1.0) * t / m).cos() + 0.5 * c * ((k as f64) * t / m).sin()
                })
                .sum::<f64>()
                + 2.0
        })
    }

    proptest! {
        #[test]
        fn calculus_identities(m in 1u32..4, a in prop::collection::vec(-1.0f64..1.0, 1..6)) {
            let g = Grid::new(m, 128).unwrap();
            let p = smooth_profile(&g, &a);
            let d1 = p.differentiate(1);
            let d11 = d1.differentiate(1);
            let d2 = p.differentiate(2);
            prop_assert!(d11.max_abs_diff(&d2) <= 1e-10);
            prop_assert!(d1.integrate().abs() <= 1e-10);
            let sum = p.zip_map(&d2, |x, y| x + y);
            prop_assert!((sum.integrate() - p.integrate()).abs() <= 1e-10);
            for i in (0..g.len()).step_by(7) {
                prop_assert!((p.interpolant().value(g.node(i)) - p.values()[i]).abs() <= 1e-12);
            }
        }

        #[test]
        fn sign_changes_scale_invariant(scale in 1e-6f64..1e6, a in prop::collection::vec(-1.0f64..1.0, 1..6)) {
            let g = Grid::new(2, 128).unwrap();
            let p = smooth_profile(&g, &a).differentiate(1);
            let q = p.map(|v| v * scale);
            prop_assert_eq!(p.count_sign_changes(), q.count_sign_changes());
        }
    }
}
