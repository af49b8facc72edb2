//! Gauge-fixed effective equations of motion for the physical variables, their
//! integration, and the classical reference trajectory.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, MomentState, Var};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::{rk4_step, Rk45};
use crate::reduction::{check_admissible, energy_dual, Admissibility, ReducedState, Sign};

const PHYSICAL: [Var; 5] = [Var::Q, Var::P, Var::Dq2, Var::Dqp, Var::Dp2];

/// Time derivative of `[q, p, dq2, dqp, dp2]`; `dt/dtime = 1` throughout.
pub type Derivative = [f64; 5];

/// Right-hand side generated by the bracket engine: `Ẋ = ±{X, E}` with `E`
/// the order-ħ expanded energy, evaluated through the Poisson tensor and the
/// gradient of `E`.
pub fn effective_rhs(model: &ModelSpec, r: &ReducedState, sign: Sign) -> Result<Derivative> {
    let e = energy_dual(model, r, true)?;
    let mut point = MomentState::zeros(AlgebraContext::default());
    for (v, x) in PHYSICAL.iter().zip(r.physical()) {
        point.set(*v, x);
    }
    let tensor = point.poisson_tensor();
    let orientation = sign.pm();
    Ok(std::array::from_fn(|i| {
        let row = &tensor[PHYSICAL[i].index()];
        let sum: f64 = row.iter().zip(&e.grad).map(|(pab, g)| (pab * g).re).sum();
        orientation * sum
    }))
}

/// Closed-form effective equations of the quadratic potential on the positive
/// frequency branch.
pub fn effective_rhs_closed_form(model: &ModelSpec, r: &ReducedState) -> Result<Derivative> {
    let ModelSpec::QuadraticPotential { m } = *model else {
        return Err(Error::InvalidParameter(format!(
            "closed-form equations exist only for the quadratic potential, not {}",
            model.name()
        )));
    };
    let ReducedState {
        q,
        p,
        dq2,
        dqp,
        dp2,
        ..
    } = *r;
    let m2 = m * m;
    let r2 = p * p + q * q + m2;
    if !(r2 > 0.0) {
        return Err(Error::Domain("classical radicand vanishes".into()));
    }
    let rr = r2.sqrt();
    let r3 = r2 * rr;
    let r5 = r3 * r2;
    let dq = p / rr
        + (p * dq2 * (2.0 * q * q - p * p - m2) + q * dqp * (4.0 * p * p - 2.0 * q * q - 2.0 * m2)
            - 3.0 * p * dp2 * (q * q + m2))
            / (2.0 * r5);
    let dp = -q / rr
        + (3.0 * q * dq2 * (p * p + m2)
            - p * dqp * (4.0 * q * q - 2.0 * p * p - 2.0 * m2)
            - q * dp2 * (2.0 * p * p - q * q - m2))
            / (2.0 * r5);
    let ddq2 = (2.0 * dqp * (q * q + m2) - 2.0 * dq2 * q * p) / r3;
    let ddp2 = (2.0 * dp2 * q * p - 2.0 * dqp * (p * p + m2)) / r3;
    let ddqp = (dp2 * (q * q + m2) - dq2 * (p * p + m2)) / r3;
    Ok([dq, dp, ddq2, ddqp, ddp2])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    FixedRk4,
    AdaptiveRk45,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownPolicy {
    Stop,
    #[default]
    FlagAndContinue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Fixed step; defaults to 1/5000 of the time span.
    pub step: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of recorded samples; defaults to every step (fixed) or 1/1000
    /// of the span (adaptive).
    pub output_interval: Option<f64>,
    pub breakdown: BreakdownPolicy,
    /// A sample is flagged once a moment exceeds this multiple of the squared
    /// classical scale `max(|q|, |p|, m)`.
    pub breakdown_ratio: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            method: Method::FixedRk4,
            step: None,
            rtol: 1e-9,
            atol: 1e-12,
            output_interval: None,
            breakdown: BreakdownPolicy::FlagAndContinue,
            breakdown_ratio: 0.1,
        }
    }
}

impl IntegratorOptions {
    pub fn rk4(step: f64) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {x}"
                )))
            }
        };
        if let Some(h) = self.step {
            positive("step", h)?;
        }
        if let Some(dt) = self.output_interval {
            positive("output_interval", dt)?;
        }
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        positive("breakdown_ratio", self.breakdown_ratio)
    }
}

/// Per-sample diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SampleFlags {
    pub breakdown: bool,
    pub violation: Option<Admissibility>,
}

impl SampleFlags {
    pub fn is_clean(&self) -> bool {
        !self.breakdown && self.violation.is_none()
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.breakdown {
            parts.push("breakdown".to_string());
        }
        if let Some(v) = self.violation {
            parts.push(format!("{v:?}").to_lowercase());
        }
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join(";")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub state: ReducedState,
    pub energy: f64,
    pub flags: SampleFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub model: ModelSpec,
    pub sign: Sign,
    pub options: IntegratorOptions,
    pub samples: Vec<Sample>,
    /// Set when the breakdown policy ended the run before the final time.
    pub stopped_at: Option<f64>,
}

pub const CSV_HEADER: &str = "t,q,p,dq2,dqp,dp2,E,flags";

/// One CSV line in the shared trajectory schema.
pub fn csv_line(r: &ReducedState, energy: f64, flags: &str) -> String {
    let f = crate::csv_float;
    format!(
        "{},{},{},{},{},{},{},{}",
        f(r.t),
        f(r.q),
        f(r.p),
        f(r.dq2),
        f(r.dqp),
        f(r.dp2),
        f(energy),
        flags
    )
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 160);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(out, "{}", csv_line(&s.state, s.energy, &s.flags.render()));
        }
        out
    }

    pub fn first_breakdown(&self) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| !s.flags.is_clean())
            .map(|s| s.state.t)
    }

    pub fn max_relative_drift(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let f0 = f(first);
        self.samples
            .iter()
            .map(|s| ((f(s) - f0) / f0).abs())
            .fold(0.0, f64::max)
    }
}

fn flags_for(model: &ModelSpec, r: &ReducedState, ctx: &AlgebraContext, ratio: f64) -> SampleFlags {
    let adm = check_admissible(r, ctx);
    let scale = r.q.abs().max(r.p.abs()).max(model.mass());
    SampleFlags {
        breakdown: r.largest_moment() > ratio * scale * scale,
        violation: (!adm.is_admissible()).then_some(adm),
    }
}

/// Integrates the effective equations from `r0.t` to `t_end`.
pub fn integrate(
    model: &ModelSpec,
    r0: &ReducedState,
    t_end: f64,
    sign: Sign,
    opts: &IntegratorOptions,
    ctx: &AlgebraContext,
) -> Result<Trajectory> {
    model.validate()?;
    opts.validate()?;
    let t0 = r0.t;
    if !(t_end > t0) {
        return Err(Error::InvalidParameter(format!(
            "time span [{t0}, {t_end}] is empty"
        )));
    }
    let adm = check_admissible(r0, ctx);
    if !adm.is_admissible() {
        return Err(Error::InvalidParameter(format!(
            "initial state is not admissible: {adm:?}"
        )));
    }
    let span = t_end - t0;
    let mut rhs =
        |t: f64, y: &[f64; 5]| effective_rhs(model, &ReducedState::from_physical(t, y), sign);
    let record = |r: ReducedState| -> Result<Sample> {
        let energy = energy_dual(model, &r, true)?.re();
        Ok(Sample {
            state: r,
            energy,
            flags: flags_for(model, &r, ctx, opts.breakdown_ratio),
        })
    };

    let mut traj = Trajectory {
        model: model.clone(),
        sign,
        options: *opts,
        samples: Vec::new(),
        stopped_at: None,
    };
    traj.samples.push(record(*r0)?);
    let mut y = r0.physical();
    let mut t = t0;
    if opts.breakdown == BreakdownPolicy::Stop && !traj.samples[0].flags.is_clean() {
        traj.stopped_at = Some(t0);
        return Ok(traj);
    }

    match opts.method {
        Method::FixedRk4 => {
            let h = opts.step.unwrap_or(span / 5000.0);
            let n = (span / h).ceil() as usize;
            let every = opts
                .output_interval
                .map(|dt| ((dt / h).round() as usize).max(1))
                .unwrap_or(1);
            for i in 1..=n {
                let t_next = if i == n { t_end } else { t0 + i as f64 * h };
                y = rk4_step(&mut rhs, t, &y, t_next - t)?;
                t = t_next;
                if y.iter().any(|x| !x.is_finite()) {
                    return Err(Error::IntegrationFailure(format!(
                        "non-finite state at t = {t}"
                    )));
                }
                if i % every == 0 || i == n {
                    let s = record(ReducedState::from_physical(t, &y))?;
                    let stop = !s.flags.is_clean() && opts.breakdown == BreakdownPolicy::Stop;
                    traj.samples.push(s);
                    if stop {
                        traj.stopped_at = Some(t);
                        break;
                    }
                }
            }
        }
        Method::AdaptiveRk45 => {
            let solver = Rk45 {
                rtol: opts.rtol,
                atol: opts.atol,
                ..Rk45::default()
            };
            let dt = opts.output_interval.unwrap_or(span / 1000.0);
            let n = (span / dt).ceil() as usize;
            let mut h = opts.step.unwrap_or(dt / 10.0);
            for i in 1..=n {
                let t_next = if i == n { t_end } else { t0 + i as f64 * dt };
                let out = solver.advance(&mut rhs, t, &y, t_next, h)?;
                y = out.y;
                h = out.next_h;
                t = t_next;
                let s = record(ReducedState::from_physical(t, &y))?;
                let stop = !s.flags.is_clean() && opts.breakdown == BreakdownPolicy::Stop;
                traj.samples.push(s);
                if stop {
                    traj.stopped_at = Some(t);
                    break;
                }
            }
        }
    }
    Ok(traj)
}

/// Classical solution `q = A sin(t/H) + B cos(t/H)`, `p = A cos(t/H) − B sin(t/H)`
/// with `H = √(A² + B² + m²)`.
pub fn classical_trajectory(
    model: &ModelSpec,
    a: f64,
    b: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let ModelSpec::QuadraticPotential { m } = *model else {
        return Err(Error::InvalidParameter(format!(
            "classical circle applies to the quadratic potential, not {}",
            model.name()
        )));
    };
    let h = (a * a + b * b + m * m).sqrt();
    if !(h > 0.0) {
        return Err(Error::Domain("classical Hamiltonian vanishes".into()));
    }
    Ok(times
        .iter()
        .map(|t| {
            let (s, c) = (t / h).sin_cos();
            (a * s + b * c, a * c - b * s)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> ModelSpec {
        ModelSpec::QuadraticPotential { m: 0.7 }
    }

    #[test]
    fn engine_and_printed_rhs_agree() {
        let r = ReducedState::new(1.3, -0.4, 0.05, 0.01, 0.08);
        let a = effective_rhs(&quad(), &r, Sign::Plus).unwrap();
        let b = effective_rhs_closed_form(&quad(), &r).unwrap();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-13 * y.abs().max(1.0), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn classical_limit_without_moments() {
        let r = ReducedState::new(0.6, 0.8, 0.0, 0.0, 0.0);
        let d = effective_rhs(&quad(), &r, Sign::Plus).unwrap();
        let h = (1.0f64 + 0.49).sqrt();
        assert!((d[0] - 0.8 / h).abs() < 1e-15);
        assert!((d[1] + 0.6 / h).abs() < 1e-15);
    }

    #[test]
    fn dq2_rate_at_origin() {
        let model = ModelSpec::QuadraticPotential { m: 1.0 };
        let r = ReducedState::new(0.0, 0.0, 0.3, 0.2, 0.4);
        let d = effective_rhs(&model, &r, Sign::Plus).unwrap();
        assert!((d[2] - 2.0 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn massless_moments_are_frozen() {
        let r = ReducedState::new(0.2, 1.5, 0.3, 0.1, 0.4);
        let d = effective_rhs(&ModelSpec::Massless, &r, Sign::Plus).unwrap();
        assert_eq!(&d[2..], &[0.0, 0.0, 0.0]);
        assert_eq!(d[0], 1.0);
    }

    #[test]
    fn minus_branch_reverses_the_flow() {
        let r = ReducedState::new(1.0, 0.5, 0.1, 0.0, 0.1);
        let a = effective_rhs(&quad(), &r, Sign::Plus).unwrap();
        let b = effective_rhs(&quad(), &r, Sign::Minus).unwrap();
        for (x, y) in a.iter().zip(b) {
            assert_eq!(*x, -y);
        }
    }

    #[test]
    fn rk45_and_rk4_agree() {
        let r = ReducedState::coherent(2.0, 0.0, 0.1);
        let ctx = AlgebraContext::new(0.1).unwrap();
        let a = integrate(
            &quad(),
            &r,
            5.0,
            Sign::Plus,
            &IntegratorOptions::rk4(1e-3),
            &ctx,
        )
        .unwrap();
        let opts = IntegratorOptions {
            method: Method::AdaptiveRk45,
            ..Default::default()
        };
        let b = integrate(&quad(), &r, 5.0, Sign::Plus, &opts, &ctx).unwrap();
        let (ya, yb) = (
            a.samples.last().unwrap().state,
            b.samples.last().unwrap().state,
        );
        assert_eq!(ya.t, 5.0);
        assert_eq!(yb.t, 5.0);
        assert!((ya.q - yb.q).abs() < 1e-8);
        assert!((ya.dp2 - yb.dp2).abs() < 1e-8);
    }

    #[test]
    fn stop_policy_ends_the_run() {
        let ctx = AlgebraContext::default();
        let r = ReducedState::coherent(1.0, 0.0, 1.0);
        let opts = IntegratorOptions {
            breakdown: BreakdownPolicy::Stop,
            ..IntegratorOptions::rk4(0.01)
        };
        let traj = integrate(&quad(), &r, 10.0, Sign::Plus, &opts, &ctx).unwrap();
        assert_eq!(traj.stopped_at, Some(0.0));
        assert_eq!(traj.samples.len(), 1);
        assert!(traj.samples[0].flags.breakdown);

        let r = ReducedState::coherent(3.0, 0.0, 0.01);
        let ctx = AlgebraContext::new(0.01).unwrap();
        let opts = IntegratorOptions {
            breakdown_ratio: 1e-3,
            ..opts
        };
        let traj = integrate(&quad(), &r, 200.0, Sign::Plus, &opts, &ctx).unwrap();
        let t_stop = traj.stopped_at.expect("moments outgrow the threshold");
        assert!(t_stop > 0.0 && t_stop < 200.0);
        assert_eq!(traj.samples.last().unwrap().state.t, t_stop);
    }

    #[test]
    fn classical_circle() {
        let pts = classical_trajectory(&quad(), 0.0, 3.0, &[0.0, 1.0, 7.5]).unwrap();
        assert_eq!(pts[0], (3.0, 0.0));
        for (q, p) in pts {
            assert!((q * q + p * p - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_uses_shared_header() {
        let r = ReducedState::coherent(2.0, 0.0, 0.1);
        let ctx = AlgebraContext::new(0.1).unwrap();
        let traj = integrate(
            &quad(),
            &r,
            0.1,
            Sign::Plus,
            &IntegratorOptions::rk4(0.05),
            &ctx,
        )
        .unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 3);
    }
}
