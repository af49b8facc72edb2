use crate::error::{Error, Result};

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N]> {
    let axpy = |a: &[f64; N], s: f64, b: &[f64; N]| std::array::from_fn(|i| a[i] + s * b[i]);
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Adaptive Dormand–Prince 5(4) integrator.
#[derive(Clone, Copy, Debug)]
pub struct Rk45 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Rk45 {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

/// Result of advancing to a target time.
#[derive(Clone, Copy, Debug)]
pub struct StepOutcome<const N: usize> {
    pub y: [f64; N],
    /// Step size suggested for the next call.
    pub next_h: f64,
    pub steps: usize,
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Rk45 {
    /// Integrates from `t0` to `t1` starting with step `h`.
    pub fn advance<const N: usize>(
        &self,
        f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
        t0: f64,
        y0: &[f64; N],
        t1: f64,
        h: f64,
    ) -> Result<StepOutcome<N>> {
        let span = t1 - t0;
        let dir = span.signum();
        let mut t = t0;
        let mut y = *y0;
        let mut h = h.abs().max(1e-6 * span.abs()).min(span.abs()) * dir;
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y)?;
        let mut steps = 0;
        let mut suggested = h;
        while (t1 - t) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::IntegrationFailure(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            let last = (t + h - t1) * dir >= 0.0;
            let h_try = if last { t1 - t } else { h };
            for s in 0..6 {
                let ys: [f64; N] = std::array::from_fn(|i| {
                    y[i] + h_try * (0..=s).map(|j| A[s][j] * k[j][i]).sum::<f64>()
                });
                k[s + 1] = f(t + C[s] * h_try, &ys)?;
            }
            let y_new: [f64; N] = std::array::from_fn(|i| {
                y[i] + h_try * (0..6).map(|j| A[5][j] * k[j][i]).sum::<f64>()
            });
            let mut err = 0.0;
            for i in 0..N {
                let e = h_try * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::IntegrationFailure(format!(
                    "non-finite state near t = {t}"
                )));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { t1 } else { t + h_try };
                y = y_new;
                k[0] = k[6];
                steps += 1;
                if !last {
                    suggested = h_try * factor;
                }
                h = h_try * factor;
            } else {
                h = h_try * factor;
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::IntegrationFailure(format!(
                        "step size underflow at t = {t}"
                    )));
                }
            }
        }
        Ok(StepOutcome {
            y,
            next_h: suggested,
            steps,
        })
    }
}
