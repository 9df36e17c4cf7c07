//! Adaptive Dormand-Prince 5(4) integrator for small autonomous systems.
//!
//! Only autonomous right-hand sides are needed here, so the stage nodes
//! `c_i` never appear.

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Differences between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) type State = [f64; 2];

pub(crate) struct Dopri5<F> {
    rhs: F,
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..2 {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<F: Fn(&State) -> State> Dopri5<F> {
    pub fn new(rhs: F, tol: f64) -> Self {
        Self {
            rhs,
            rtol: tol,
            atol: tol,
            h_min: 1e-14,
        }
    }

    /// One trial step; returns the 5th-order solution and the error norm.
    pub fn trial(&self, y: &State, h: f64) -> (State, f64) {
        let k1 = (self.rhs)(y);
        let k2 = (self.rhs)(&axpy(y, &[(A21, &k1)], h));
        let k3 = (self.rhs)(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = (self.rhs)(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = (self.rhs)(&axpy(
            y,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            h,
        ));
        let k6 = (self.rhs)(&axpy(
            y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ));
        let y5 = axpy(
            y,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            h,
        );
        let k7 = (self.rhs)(&y5);
        let mut err = 0.0_f64;
        for i in 0..2 {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }
        (y5, err)
    }

    /// Takes one accepted adaptive step of at most `h_max`, starting from the
    /// proposal `*h`. Returns `(step_taken, new_state)` and updates `*h`.
    pub fn step(&self, t: f64, y: &State, h: &mut f64, h_max: f64) -> Result<(f64, State)> {
        let mut trial_h = h.min(h_max);
        loop {
            if trial_h < self.h_min {
                return Err(Error::IntegrationFailure {
                    theta: t,
                    reason: format!("step size underflow ({trial_h:e})"),
                });
            }
            let (y5, err) = self.trial(y, trial_h);
            let finite = y5.iter().all(|v| v.is_finite());
            if finite && err <= 1.0 {
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                *h = trial_h * factor;
                return Ok((trial_h, y5));
            }
            let factor = if finite {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            trial_h *= factor;
        }
    }

    /// Integrates from `t0` to exactly `t1`.
    pub fn integrate_to(&self, t0: f64, y0: State, t1: f64, h: &mut f64) -> Result<State> {
        let mut t = t0;
        let mut y = y0;
        while t < t1 {
            let remaining = t1 - t;
            let (dt, next) = self.step(t, &y, h, remaining)?;
            y = next;
            t = if dt >= remaining { t1 } else { t + dt };
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_full_period() {
        let solver = Dopri5::new(|y: &State| [y[1], -y[0]], 1e-12);
        let mut h = 1e-3;
        let y = solver
            .integrate_to(0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, &mut h)
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }
}
