//! Generic AMP iteration engine.
//!
//! An [`AmpSchedule`] supplies the per-coordinate nonlinearities (f_t, F_t)
//! as opaque scalar callables plus a declared Lipschitz constant ζ; the
//! engine never introspects them. One step computes
//!
//!   U^t = [F_t(A(·, f_t(U^0..U^{t−1})), U^0..U^{t−1})]_M
//!
//! with f_t and F_t applied coordinate-wise across the history and the
//! result truncated to [−M, M]. After the final step the iterate is projected
//! onto the hypercube [−1, 1]^N.

mod rounding;

pub use rounding::{sign_round, RoundingResult};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{cast, norm_l2, to_f64, Scalar};
use crate::tensor::{CouplingTensor, Provenance};

/// f_t: maps a coordinate's history (U^0_i..U^{t−1}_i) to a scalar.
/// The step index t is passed first since the family is t-dependent.
pub type HistoryMap<T> = Arc<dyn Fn(usize, &[T]) -> T + Send + Sync>;

/// F_t: maps (t, contraction value y_i, history) to the next value.
pub type UpdateMap<T> = Arc<dyn Fn(usize, T, &[T]) -> T + Send + Sync>;

/// M-truncation x ↦ max(−M, min(x, M)). Idempotent and 1-Lipschitz.
#[inline]
pub fn truncate<T: Scalar>(x: T, m: T) -> T {
    x.max(-m).min(m)
}

/// Coordinate-wise projection onto the hypercube [−1, 1]^N.
pub fn project_hypercube<T: Scalar>(u: &[T]) -> Vec<T> {
    let one = T::one();
    u.iter().map(|&x| truncate(x, one)).collect()
}

/// A pluggable (f_t, F_t) family with horizon, truncation level and declared
/// Lipschitz constant.
#[derive(Clone)]
pub struct AmpSchedule<T: Scalar> {
    name: String,
    horizon: usize,
    truncation_m: T,
    zeta: f64,
    history_map: HistoryMap<T>,
    update: UpdateMap<T>,
}

impl<T: Scalar> AmpSchedule<T> {
    /// Build a schedule; probes f_t(0,…,0) = 0 for every step at
    /// construction (Assumption-1 side condition).
    pub fn new(
        name: impl Into<String>,
        horizon: usize,
        truncation_m: T,
        zeta: f64,
        history_map: HistoryMap<T>,
        update: UpdateMap<T>,
    ) -> Result<Self> {
        if truncation_m < T::one() {
            return Err(Error::invalid("truncation level M must be >= 1"));
        }
        if !zeta.is_finite() || zeta <= 0.0 {
            return Err(Error::invalid("declared zeta must be positive"));
        }
        for t in 1..=horizon {
            let zeros = vec![T::zero(); t];
            let at_zero = to_f64((history_map)(t, &zeros)).abs();
            if at_zero > 1e-12 {
                return Err(Error::invalid(format!(
                    "schedule violates f_t(0)=0 at t={t}: |f_t(0)| = {at_zero:e}"
                )));
            }
        }
        Ok(AmpSchedule {
            name: name.into(),
            horizon,
            truncation_m,
            zeta,
            history_map,
            update,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn truncation_m(&self) -> T {
        self.truncation_m
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn apply_history_map(&self, t: usize, history: &[T]) -> T {
        (self.history_map)(t, history)
    }

    pub fn apply_update(&self, t: usize, y: T, history: &[T]) -> T {
        (self.update)(t, y, history)
    }
}

impl<T: Scalar> std::fmt::Debug for AmpSchedule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmpSchedule")
            .field("name", &self.name)
            .field("horizon", &self.horizon)
            .field("zeta", &self.zeta)
            .finish()
    }
}

/// Full iterate sequence U^0..U^T plus the hypercube projection V of U^T.
#[derive(Clone, Debug, Serialize)]
pub struct IterationTrace<T> {
    pub schedule_name: String,
    pub tensor_provenance: Option<Provenance>,
    /// U^0..U^T, every coordinate within [−M, M].
    pub u_steps: Vec<Vec<T>>,
    /// Projection of U^T onto [−1, 1]^N.
    pub v: Vec<T>,
    /// ‖U^t‖₂ for t = 0..T.
    pub step_norms: Vec<f64>,
}

impl<T: Scalar> IterationTrace<T> {
    /// Final iterate U^T.
    pub fn last_u(&self) -> &[T] {
        self.u_steps.last().expect("trace holds at least U^0")
    }

    /// ‖V − sign(V)‖₂, how far the projected output sits from the binary cube.
    pub fn v_distance_to_binary(&self) -> f64 {
        let mut acc = 0.0f64;
        for &x in &self.v {
            let x = to_f64(x);
            let s = if x < 0.0 { -1.0 } else { 1.0 };
            acc += (x - s) * (x - s);
        }
        acc.sqrt()
    }
}

/// Run the iteration for the schedule's full horizon from the given U^0.
pub fn run_iterations<T: Scalar>(
    tensor: &CouplingTensor<T>,
    schedule: &AmpSchedule<T>,
    u0: &[T],
) -> Result<IterationTrace<T>> {
    let n = tensor.dim();
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u0.len(),
        });
    }
    let m = schedule.truncation_m();
    for (i, &x) in u0.iter().enumerate() {
        if !x.is_finite() || x < -m || x > m {
            return Err(Error::invalid(format!(
                "U^0 coordinate {i} = {x} outside [-M, M] with M = {m}"
            )));
        }
    }

    let mut u_steps: Vec<Vec<T>> = Vec::with_capacity(schedule.horizon() + 1);
    u_steps.push(u0.to_vec());
    let mut history = Vec::with_capacity(schedule.horizon());

    for t in 1..=schedule.horizon() {
        let mut w = vec![T::zero(); n];
        for (i, wi) in w.iter_mut().enumerate() {
            history.clear();
            history.extend(u_steps.iter().take(t).map(|step| step[i]));
            *wi = schedule.apply_history_map(t, &history);
            if !wi.is_finite() {
                return Err(Error::NonFinite { step: t, coord: i });
            }
        }
        let y = tensor.contract_marginal(&w)?;
        let mut next = vec![T::zero(); n];
        for (i, out) in next.iter_mut().enumerate() {
            if !y[i].is_finite() {
                return Err(Error::NonFinite { step: t, coord: i });
            }
            history.clear();
            history.extend(u_steps.iter().take(t).map(|step| step[i]));
            let raw = schedule.apply_update(t, y[i], &history);
            if !raw.is_finite() {
                return Err(Error::NonFinite { step: t, coord: i });
            }
            *out = truncate(raw, m);
        }
        u_steps.push(next);
    }

    let v = project_hypercube(u_steps.last().expect("nonempty"));
    let step_norms = u_steps.iter().map(|u| to_f64(norm_l2(u))).collect();
    Ok(IterationTrace {
        schedule_name: schedule.name().to_string(),
        tensor_provenance: tensor.provenance().cloned(),
        u_steps,
        v,
        step_norms,
    })
}

/// One row of the Assumption-1 probe: worst sampled difference quotients for
/// f_t and F_t plus |f_t(0)|.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub t: usize,
    pub max_quotient_f: f64,
    pub max_quotient_big_f: f64,
    pub f_at_zero: f64,
}

/// Outcome of [`verify_schedule`]. A violated declaration is reported, not
/// raised: callers decide what to do with an undeclared-Lipschitz schedule.
#[derive(Clone, Debug, Serialize)]
pub struct ScheduleProbeReport {
    pub schedule_name: String,
    pub zeta_declared: f64,
    pub tolerance: f64,
    pub samples_per_probe: u32,
    pub rows: Vec<ProbeRow>,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Sample difference quotients of every f_t and F_t on their declared
/// domains and compare against (1+tol)·ζ. `samples` counts pairs per
/// function per step; half the pairs are adversarial local perturbations.
pub fn verify_schedule<T: Scalar>(
    schedule: &AmpSchedule<T>,
    samples: u32,
    tol: f64,
    seed: u64,
) -> Result<ScheduleProbeReport> {
    if samples < 1 {
        return Err(Error::invalid("verify_schedule requires samples >= 1"));
    }
    let m = to_f64(schedule.truncation_m());
    let zeta = schedule.zeta();
    let limit = (1.0 + tol) * zeta;
    let mut rows = Vec::new();
    let mut violations = Vec::new();

    for t in 1..=schedule.horizon() {
        let mut stream = Stream::derived(seed, &[rng::tag("verify"), t as u64]);
        let zeros = vec![T::zero(); t];
        let f_at_zero = to_f64(schedule.apply_history_map(t, &zeros)).abs();

        let mut max_f = 0.0f64;
        let mut max_big_f = 0.0f64;
        for k in 0..samples {
            let u: Vec<T> = stream.uniform_vec(t, -m, m);
            let v: Vec<T> = sample_partner(&mut stream, &u, m, k);
            let du = to_f64(crate::scalar::dist_l2(&u, &v));
            if du > 0.0 {
                let q = (to_f64(schedule.apply_history_map(t, &u))
                    - to_f64(schedule.apply_history_map(t, &v)))
                .abs()
                    / du;
                max_f = max_f.max(q);
            }

            let hu: Vec<T> = stream.uniform_vec(t, -m, m);
            let hv: Vec<T> = sample_partner(&mut stream, &hu, m, k);
            let yu = stream.uniform_in(-5.0 * m, 5.0 * m);
            let yv = if k % 2 == 1 {
                yu + stream.uniform_in(-1e-3 * m, 1e-3 * m)
            } else {
                stream.uniform_in(-5.0 * m, 5.0 * m)
            };
            let dh = to_f64(crate::scalar::dist_l2(&hu, &hv));
            let dist = ((yu - yv) * (yu - yv) + dh * dh).sqrt();
            if dist > 0.0 {
                let q = (to_f64(schedule.apply_update(t, cast(yu), &hu))
                    - to_f64(schedule.apply_update(t, cast(yv), &hv)))
                .abs()
                    / dist;
                max_big_f = max_big_f.max(q);
            }
        }

        if max_f > limit {
            violations.push(format!(
                "f_{t}: sampled quotient {max_f} exceeds (1+tol)*zeta = {limit}"
            ));
        }
        if max_big_f > limit {
            violations.push(format!(
                "F_{t}: sampled quotient {max_big_f} exceeds (1+tol)*zeta = {limit}"
            ));
        }
        if f_at_zero > 1e-9 {
            violations.push(format!("f_{t}(0) = {f_at_zero:e} is not zero"));
        }
        rows.push(ProbeRow {
            t,
            max_quotient_f: max_f,
            max_quotient_big_f: max_big_f,
            f_at_zero,
        });
    }

    Ok(ScheduleProbeReport {
        schedule_name: schedule.name().to_string(),
        zeta_declared: zeta,
        tolerance: tol,
        samples_per_probe: samples,
        passed: violations.is_empty(),
        rows,
        violations,
    })
}

fn sample_partner<T: Scalar>(stream: &mut Stream, u: &[T], m: f64, k: u32) -> Vec<T> {
    let mb = cast::<T>(m);
    if k % 2 == 1 {
        u.iter()
            .map(|&x| truncate(x + cast::<T>(stream.uniform_in(-1e-3 * m, 1e-3 * m)), mb))
            .collect()
    } else {
        stream.uniform_vec(u.len(), -m, m)
    }
}
