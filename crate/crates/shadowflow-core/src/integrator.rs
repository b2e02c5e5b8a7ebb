//! Adaptive embedded Runge-Kutta integration of a configuration derivative
//! field in `(ln alpha, ln lambda, a)` coordinates.
//!
//! The stepper is the Dormand-Prince 5(4) pair with standard PI-free step
//! control; integrating the logs makes amplitude and scale positivity
//! unconditional and removes the stiffness a blowing-up scale would cause in
//! linear coordinates. Dense output between accepted steps is cubic Hermite,
//! used to localize event crossings.
//!
//! An explicit perturbation channel injects the error terms the reduced
//! model drops: a magnitude profile `pert(t)` with a closed-form time
//! integral (the budget handed to the monotonicity checks) and a sign policy,
//! either adversarial (a fixed sign chosen by the scenario to oppose the
//! monitored claim) or pseudo-random per unit time bucket.

use crate::chart::{self, Point};
use crate::diagnostics::DiagnosticSample;
use crate::dynamics::{DynError, StateDerivative};
use crate::kernel::BubbleState;
use crate::rng::hashed_sign;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step size underflow at t = {t} (h = {h}); the field is too stiff here; state: {state_dump}")]
    Stiffness { t: f64, h: f64, state_dump: String },
    #[error("right-hand side returned a non-finite derivative at t = {t}")]
    NanRhs { t: f64 },
    #[error("right-hand side failed at t = {t}: {source}")]
    Rhs { t: f64, source: DynError },
    #[error("step budget of {0} accepted steps exhausted")]
    MaxSteps(usize),
}

/// Time profile of the injected error magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PertFamily {
    Off,
    /// `c e^{-beta t}`, budget `c/beta`.
    ExpDecay {
        c: f64,
        beta: f64,
    },
    /// `c (1+t)^{-(1+s)}`, budget `c/s` for `s > 0`.
    Power {
        c: f64,
        s: f64,
    },
    /// `c / (1+t)`: diverging budget, negative-test family only.
    NonIntegrable {
        c: f64,
    },
}

/// Sign of the injected error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignPolicy {
    /// Fixed sign supplied by the scenario (the direction opposing the
    /// monitored claim).
    Adversarial { sign: f64 },
    /// Deterministic pseudo-random sign per unit time bucket.
    Random { seed: u64 },
}

/// Which derivative channels receive the injected error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TargetChannels {
    pub log_alpha: bool,
    pub log_lambda: bool,
    pub position: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationModel {
    pub family: PertFamily,
    pub sign: SignPolicy,
    pub channels: TargetChannels,
}

impl PerturbationModel {
    pub fn off() -> Self {
        PerturbationModel {
            family: PertFamily::Off,
            sign: SignPolicy::Adversarial { sign: -1.0 },
            channels: TargetChannels::default(),
        }
    }

    pub fn magnitude(&self, t: f64) -> f64 {
        match self.family {
            PertFamily::Off => 0.0,
            PertFamily::ExpDecay { c, beta } => c * (-beta * t).exp(),
            PertFamily::Power { c, s } => c * (1.0 + t).powf(-(1.0 + s)),
            PertFamily::NonIntegrable { c } => c / (1.0 + t),
        }
    }

    pub fn integrable(&self) -> bool {
        !matches!(self.family, PertFamily::NonIntegrable { .. })
    }

    /// Closed-form `int_{t0}^{t1} pert(t) dt`; `t1` may be infinite.
    pub fn budget(&self, t0: f64, t1: f64) -> f64 {
        assert!(t1 >= t0, "budget needs t1 >= t0");
        match self.family {
            PertFamily::Off => 0.0,
            PertFamily::ExpDecay { c, beta } => {
                let upper = if t1.is_infinite() {
                    0.0
                } else {
                    (-beta * t1).exp()
                };
                c / beta * ((-beta * t0).exp() - upper)
            }
            PertFamily::Power { c, s } => {
                let upper = if t1.is_infinite() {
                    0.0
                } else {
                    (1.0 + t1).powf(-s)
                };
                c / s * ((1.0 + t0).powf(-s) - upper)
            }
            PertFamily::NonIntegrable { c } => {
                if t1.is_infinite() {
                    f64::INFINITY
                } else {
                    c * ((1.0 + t1) / (1.0 + t0)).ln()
                }
            }
        }
    }

    fn sign_at(&self, t: f64, channel: u64) -> f64 {
        match self.sign {
            SignPolicy::Adversarial { sign } => sign,
            SignPolicy::Random { seed } => hashed_sign(seed, t.floor() as u64, channel),
        }
    }

    /// Adds the injected error to a packed derivative. Scale and amplitude
    /// channels receive `sign * pert(t)` directly; position channels receive
    /// an inward/outward radial contribution of magnitude `pert(t)` in the
    /// `lambda a'` normalization, i.e. `sign * pert(t) e_a / lambda`.
    fn apply(&self, t: f64, state: &BubbleState, deriv: &mut [f64], coords: &Coords) {
        let m = self.magnitude(t);
        if m == 0.0 {
            return;
        }
        for i in 0..coords.p {
            let base = coords.offset(i);
            if self.channels.log_alpha {
                deriv[base] += self.sign_at(t, 3 * i as u64) * m;
            }
            if self.channels.log_lambda {
                deriv[base + 1] += self.sign_at(t, 3 * i as u64 + 1) * m;
            }
            if self.channels.position {
                let a = state.center(i);
                let an = chart::norm(a);
                if an > 0.0 {
                    let s = self.sign_at(t, 3 * i as u64 + 2) * m / (an * state.lambda(i));
                    for c in 0..coords.dim {
                        deriv[base + 2 + c] += s * a[c];
                    }
                }
            }
        }
    }
}

/// Spec of the budget integral as a free function.
pub fn pert_budget(pert: &PerturbationModel, t0: f64, t1: f64) -> f64 {
    pert.budget(t0, t1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventAction {
    /// Terminate the run at the crossing.
    Stop,
    /// Record the crossing and keep integrating.
    Mark,
}

/// Continuous event functions; an event fires on the upcrossing of zero.
#[derive(Clone, Copy, Debug)]
pub enum EventKind {
    LambdaMaxAbove(f64),
    LambdaMinBelow(f64),
    /// `max_i lambda_i |a_i|^2` crossing above the threshold.
    LambdaA2Above(f64),
    /// `min_i lambda_i |a_i|^2` crossing below the threshold.
    LambdaA2Below(f64),
    /// Any pairwise interaction coefficient above the threshold (collision).
    PairEpsAbove(f64),
    /// Any center leaving the ball of the given radius.
    ChartExitAbove(f64),
}

#[derive(Clone, Debug)]
pub struct EventSpec {
    pub name: &'static str,
    pub kind: EventKind,
    pub action: EventAction,
    /// Needed only for `PairEpsAbove`.
    pub kernel: Option<crate::kernel::GreenKernelModel>,
}

impl EventSpec {
    pub fn stop(name: &'static str, kind: EventKind) -> Self {
        EventSpec {
            name,
            kind,
            action: EventAction::Stop,
            kernel: None,
        }
    }

    pub fn mark(name: &'static str, kind: EventKind) -> Self {
        EventSpec {
            name,
            kind,
            action: EventAction::Mark,
            kernel: None,
        }
    }

    fn value(&self, state: &BubbleState) -> f64 {
        match self.kind {
            EventKind::LambdaMaxAbove(th) => {
                let m = (0..state.p())
                    .map(|i| state.bubbles[i].log_lambda)
                    .fold(f64::NEG_INFINITY, f64::max);
                m - th.ln()
            }
            EventKind::LambdaMinBelow(th) => {
                let m = (0..state.p())
                    .map(|i| state.bubbles[i].log_lambda)
                    .fold(f64::INFINITY, f64::min);
                th.ln() - m
            }
            EventKind::LambdaA2Above(th) => {
                let m = (0..state.p())
                    .map(|i| state.lambda(i) * chart::norm2(state.center(i)))
                    .fold(f64::NEG_INFINITY, f64::max);
                m - th
            }
            EventKind::LambdaA2Below(th) => {
                let m = (0..state.p())
                    .map(|i| state.lambda(i) * chart::norm2(state.center(i)))
                    .fold(f64::INFINITY, f64::min);
                th - m
            }
            EventKind::PairEpsAbove(th) => {
                let kernel = self
                    .kernel
                    .as_ref()
                    .expect("collision event needs a kernel");
                let mut m = f64::NEG_INFINITY;
                for i in 0..state.p() {
                    for j in i + 1..state.p() {
                        m = m.max(crate::kernel::eps(state, kernel, i, j));
                    }
                }
                m - th
            }
            EventKind::ChartExitAbove(radius) => {
                let m = (0..state.p())
                    .map(|i| chart::norm(state.center(i)))
                    .fold(f64::NEG_INFINITY, f64::max);
                m - radius
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EventHit {
    pub name: &'static str,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    TEnd,
    Event(&'static str),
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub state: BubbleState,
    pub diag: DiagnosticSample,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub h_min: f64,
    pub h_max: f64,
}

/// Time-stamped states with diagnostics, event hits and step statistics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventHit>,
    pub termination: Termination,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn final_state(&self) -> &BubbleState {
        &self.samples.last().expect("trajectory has samples").state
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().expect("trajectory has samples").t
    }

    /// Extracts one scalar channel from the samples.
    pub fn channel<F: Fn(&Sample) -> f64>(&self, f: F) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }
}

pub struct IntegrateOpts<'a> {
    /// Relative local error tolerance (also the absolute floor).
    pub tol: f64,
    pub t_end: f64,
    pub pert: PerturbationModel,
    pub events: &'a [EventSpec],
    /// Post-step state projection (e.g. re-slaving amplitudes).
    pub project: Option<&'a dyn Fn(&mut BubbleState)>,
    pub max_steps: usize,
}

impl<'a> IntegrateOpts<'a> {
    pub fn new(t_end: f64) -> Self {
        IntegrateOpts {
            tol: 1e-8,
            t_end,
            pert: PerturbationModel::off(),
            events: &[],
            project: None,
            max_steps: 2_000_000,
        }
    }
}

/// Flat coordinate layout: per bubble `[ln alpha, ln lambda, a_0.. a_{dim-1}]`.
struct Coords {
    p: usize,
    dim: usize,
}

impl Coords {
    fn len(&self) -> usize {
        self.p * (2 + self.dim)
    }

    fn offset(&self, i: usize) -> usize {
        i * (2 + self.dim)
    }

    fn pack(&self, s: &BubbleState, out: &mut [f64]) {
        for i in 0..self.p {
            let b = self.offset(i);
            out[b] = s.bubbles[i].log_alpha;
            out[b + 1] = s.bubbles[i].log_lambda;
            out[b + 2..b + 2 + self.dim].copy_from_slice(&s.bubbles[i].center[..self.dim]);
        }
    }

    fn unpack(&self, y: &[f64], proto: &BubbleState) -> BubbleState {
        let mut s = proto.clone();
        for i in 0..self.p {
            let b = self.offset(i);
            s.bubbles[i].log_alpha = y[b];
            s.bubbles[i].log_lambda = y[b + 1];
            let mut c: Point = chart::ZERO;
            c[..self.dim].copy_from_slice(&y[b + 2..b + 2 + self.dim]);
            s.bubbles[i].center = c;
        }
        s
    }

    fn pack_deriv(&self, d: &StateDerivative, out: &mut [f64]) {
        for i in 0..self.p {
            let b = self.offset(i);
            out[b] = d.dlog_alpha[i];
            out[b + 1] = d.dlog_lambda[i];
            out[b + 2..b + 2 + self.dim].copy_from_slice(&d.da[i][..self.dim]);
        }
    }
}

// Dormand-Prince 5(4) tableau.
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
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights coincide with the last A row (FSAL); the embedded
// 4th-order weights follow.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type RhsFn<'a> = dyn Fn(&BubbleState) -> Result<StateDerivative, DynError> + 'a;
type DiagFn<'a> = dyn Fn(f64, &BubbleState) -> DiagnosticSample + 'a;

/// Integrates the derivative field from `y0` at `t = 0` until `t_end` or the
/// first stop event; diagnostics are sampled at every accepted step.
pub fn integrate(
    rhs: &RhsFn<'_>,
    y0: &BubbleState,
    dim: usize,
    opts: &IntegrateOpts<'_>,
    diag: &DiagFn<'_>,
) -> Result<Trajectory, IntegrateError> {
    let coords = Coords { p: y0.p(), dim };
    let nv = coords.len();
    let mut state = y0.clone();
    if let Some(project) = opts.project {
        project(&mut state);
    }
    let mut y = vec![0.0; nv];
    coords.pack(&state, &mut y);
    let mut t = 0.0;

    let mut stats = StepStats {
        h_min: f64::INFINITY,
        ..Default::default()
    };

    let eval = |t: f64,
                y: &[f64],
                out: &mut [f64],
                stats: &mut StepStats|
     -> Result<BubbleState, IntegrateError> {
        let s = coords.unpack(y, y0);
        let d = rhs(&s).map_err(|source| IntegrateError::Rhs { t, source })?;
        coords.pack_deriv(&d, out);
        opts.pert.apply(t, &s, out, &coords);
        stats.rhs_evals += 1;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(IntegrateError::NanRhs { t });
        }
        Ok(s)
    };

    let mut f0 = vec![0.0; nv];
    eval(t, &y, &mut f0, &mut stats)?;

    let mut samples = Vec::new();
    let mut events = Vec::new();
    samples.push(Sample {
        t,
        state: state.clone(),
        diag: diag(t, &state),
    });

    // Event bookkeeping: previous values; events true at the start are
    // recorded once (stop events abort immediately).
    let mut prev_ev: Vec<f64> = opts.events.iter().map(|e| e.value(&state)).collect();
    for (k, ev) in opts.events.iter().enumerate() {
        if prev_ev[k] >= 0.0 {
            events.push(EventHit { name: ev.name, t });
            if ev.action == EventAction::Stop {
                return Ok(Trajectory {
                    samples,
                    events,
                    termination: Termination::Event(ev.name),
                    stats,
                });
            }
        }
    }

    // Initial step: cover the whole horizon when the field vanishes,
    // otherwise a conservative scale from the first derivative.
    let f0_norm = f0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut h = if f0_norm == 0.0 {
        opts.t_end
    } else {
        (1e-2 / f0_norm).min(opts.t_end)
    };

    let mut k_stages = vec![vec![0.0; nv]; 7];
    k_stages[0].copy_from_slice(&f0);
    let mut y_stage = vec![0.0; nv];
    let mut y_new = vec![0.0; nv];

    while t < opts.t_end {
        if stats.accepted >= opts.max_steps {
            return Err(IntegrateError::MaxSteps(opts.max_steps));
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(IntegrateError::Stiffness {
                t,
                h,
                state_dump: alloc::format!("{:?}", coords.unpack(&y, y0)),
            });
        }
        if t + h > opts.t_end {
            h = opts.t_end - t;
        }

        // Stages 2..7 (FSAL: stage 7 is the derivative at the new point).
        let mut failed = None;
        for s in 0..6 {
            for (idx, ys) in y_stage.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k_stages.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[idx];
                }
                *ys = y[idx] + h * acc;
            }
            let (head, tail) = k_stages.split_at_mut(s + 1);
            let _ = head;
            match eval(t + C[s] * h, &y_stage, &mut tail[0], &mut stats) {
                Ok(_) => {}
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            // A stage left the admissible region; retry with a smaller step
            // unless the step is already microscopic.
            if h > 1e-12 * t.abs().max(1.0) {
                h *= 0.25;
                stats.rejected += 1;
                continue;
            }
            return Err(e);
        }

        // 5th-order solution is the last stage's argument (FSAL property):
        // y_new = y + h * sum A[5][j] k_j, already formed in y_stage.
        y_new.copy_from_slice(&y_stage);

        // Embedded error estimate.
        let mut err_norm2 = 0.0;
        for idx in 0..nv {
            let mut e4 = 0.0;
            for (j, kj) in k_stages.iter().enumerate() {
                let b5 = if j < 6 { A[5][j] } else { 0.0 };
                e4 += (b5 - B4[j]) * kj[idx];
            }
            let err = h * e4;
            // Absolute control in (ln alpha, ln lambda, a) is relative
            // control for the amplitudes and scales; the safety factor keeps
            // the accumulated global error well inside the nominal tolerance.
            let sc = 0.25 * opts.tol;
            err_norm2 += (err / sc) * (err / sc);
        }
        let err_norm = (err_norm2 / nv as f64).sqrt();

        if err_norm <= 1.0 {
            let t_new = t + h;
            let mut new_state = coords.unpack(&y_new, y0);
            let f_old = k_stages[0].clone();
            let f_new = k_stages[6].clone();

            // Event handling on the accepted segment.
            let mut stop: Option<(&'static str, f64)> = None;
            for (k, ev) in opts.events.iter().enumerate() {
                let v_new = ev.value(&new_state);
                if prev_ev[k] < 0.0 && v_new >= 0.0 {
                    let t_hit =
                        locate_crossing(ev, t, &y, &f_old, t_new, &y_new, &f_new, &coords, y0);
                    events.push(EventHit {
                        name: ev.name,
                        t: t_hit,
                    });
                    if ev.action == EventAction::Stop {
                        match stop {
                            Some((_, t0)) if t0 <= t_hit => {}
                            _ => stop = Some((ev.name, t_hit)),
                        }
                    }
                }
                prev_ev[k] = v_new;
            }

            if let Some((name, t_hit)) = stop {
                let y_hit = hermite(t, &y, &f_old, t_new, &y_new, &f_new, t_hit);
                let mut hit_state = coords.unpack(&y_hit, y0);
                if let Some(project) = opts.project {
                    project(&mut hit_state);
                }
                samples.push(Sample {
                    t: t_hit,
                    state: hit_state.clone(),
                    diag: diag(t_hit, &hit_state),
                });
                stats.accepted += 1;
                return Ok(Trajectory {
                    samples,
                    events,
                    termination: Termination::Event(name),
                    stats,
                });
            }

            if let Some(project) = opts.project {
                project(&mut new_state);
                coords.pack(&new_state, &mut y_new);
                // The projection moved the state: refresh the FSAL slot.
                eval(t_new, &y_new, &mut k_stages[6], &mut stats)?;
            }

            t = t_new;
            y.copy_from_slice(&y_new);
            let k_last = k_stages[6].clone();
            k_stages[0].copy_from_slice(&k_last);
            state = new_state;
            samples.push(Sample {
                t,
                state: state.clone(),
                diag: diag(t, &state),
            });
            stats.accepted += 1;
            stats.h_min = stats.h_min.min(h);
            stats.h_max = stats.h_max.max(h);

            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    Ok(Trajectory {
        samples,
        events,
        termination: Termination::TEnd,
        stats,
    })
}

/// Cubic Hermite interpolation between the two ends of an accepted step.
fn hermite(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    y0.iter()
        .zip(y1)
        .zip(f0.iter().zip(f1))
        .map(|((&a, &b), (&fa, &fb))| h00 * a + h01 * b + h * (h10 * fa + h11 * fb))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn locate_crossing(
    ev: &EventSpec,
    t0: f64,
    y0v: &[f64],
    f0: &[f64],
    t1: f64,
    y1v: &[f64],
    f1: &[f64],
    coords: &Coords,
    proto: &BubbleState,
) -> f64 {
    let mut lo = t0;
    let mut hi = t1;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let ym = hermite(t0, y0v, f0, t1, y1v, f1, mid);
        let v = ev.value(&coords.unpack(&ym, proto));
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * t1.abs().max(1.0) {
            break;
        }
    }
    hi
}
