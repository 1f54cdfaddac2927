//! Concrete AMP schedules and the TAP free-energy machinery.
//!
//! The TAP iteration U^t = tanh(β·A(·,U^{t−1}) + a_{t−2}·U^{t−2}) with
//! U^0 = q·1_N and U^{−1} = 0, and discretized gradient descent
//! u^t = u^{t−1} ∓ η_{t−1}∇A(u^{t−1}), are both expressed as engine
//! schedules. Alongside them sit the Bernoulli entropy S, the correction
//! f_β, the free energy F_β and the TAP fixed-point residual.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amp::{run_iterations, truncate, AmpSchedule, IterationTrace};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{cast, norm_l2, to_f64, Scalar};
use crate::tensor::CouplingTensor;

fn default_m() -> f64 {
    2.0
}

/// TAP iteration parameters. `a` is the correction sequence
/// (a_{−1}, a_0, …, a_{T−2}); a_{−1} never acts (U^{−1} = 0) and is kept for
/// index alignment. A single-element list broadcasts to every step, matching
/// the constant choice a_t = 2f′(q_*).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TapConfig {
    pub beta: f64,
    /// Initialization level: U^0 = q·1_N, q ∈ (0, 1].
    pub q: f64,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(alias = "T")]
    pub t: usize,
    #[serde(alias = "M", default = "default_m")]
    pub m: f64,
    /// Replace a_t by the data-driven coefficient 2f′_β(‖U^t‖²/N); runs
    /// through [`run_tap_data_driven`] instead of the generic engine.
    #[serde(default)]
    pub data_driven: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GdDirection {
    /// u − η∇A (minimization; the default).
    #[default]
    Descent,
    /// u + η∇A as displayed in the source iteration.
    Ascent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum U0Init {
    #[default]
    Zeros,
    /// i.i.d. uniform on [−1, 1] from the run seed.
    Uniform,
}

/// Gradient-descent schedule parameters. `eta` is η_0..η_{T−1}; a
/// single-element list broadcasts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GdConfig {
    pub eta: Vec<f64>,
    #[serde(default)]
    pub direction: GdDirection,
    #[serde(alias = "T")]
    pub t: usize,
    #[serde(alias = "M", default = "default_m")]
    pub m: f64,
    #[serde(default)]
    pub u0: U0Init,
}

/// Tagged schedule configuration as carried by harness config files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "lowercase")]
pub enum ScheduleConfig {
    Tap(TapConfig),
    Gd(GdConfig),
}

impl ScheduleConfig {
    pub fn horizon(&self) -> usize {
        match self {
            ScheduleConfig::Tap(c) => c.t,
            ScheduleConfig::Gd(c) => c.t,
        }
    }

    pub fn truncation_m(&self) -> f64 {
        match self {
            ScheduleConfig::Tap(c) => c.m,
            ScheduleConfig::Gd(c) => c.m,
        }
    }
}

fn broadcast(seq: &[f64], len: usize, what: &str) -> Result<Vec<f64>> {
    if seq.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("{what} entries must be finite")));
    }
    if seq.len() == 1 && len > 1 {
        return Ok(vec![seq[0]; len]);
    }
    if seq.len() < len {
        return Err(Error::invalid(format!(
            "{what} needs {len} entries (or a single broadcast value), got {}",
            seq.len()
        )));
    }
    Ok(seq[..len].to_vec())
}

/// Build the TAP schedule plus its initialization U^0 = q·1_N.
///
/// f_t returns the latest iterate; F_t(y, history) = tanh(β·y + a_{t−2}·U^{t−2})
/// with the t = 1 correction term read as zero. Declared
/// ζ = max(1, √(β² + sup|a_t|²))·(1+1e−3): tanh is 1-Lipschitz, so the
/// gradient of F_t is bounded by √(β² + a²).
pub fn tap_schedule<T: Scalar>(cfg: &TapConfig, n: usize) -> Result<(AmpSchedule<T>, Vec<T>)> {
    if !cfg.beta.is_finite() || cfg.beta < 0.0 {
        return Err(Error::invalid("beta must be finite and >= 0"));
    }
    if !(cfg.q > 0.0 && cfg.q <= 1.0) {
        return Err(Error::invalid(format!("q must be in (0, 1], got {}", cfg.q)));
    }
    if cfg.t >= 2 && cfg.a.is_empty() {
        return Err(Error::invalid(
            "TAP with T >= 2 needs correction coefficients a (a_{-1}..a_{T-2})",
        ));
    }
    let a = if cfg.t >= 2 {
        broadcast(&cfg.a, cfg.t, "TAP coefficients a")?
    } else {
        vec![0.0]
    };
    let a_sup = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let zeta = 1.0f64.max(cfg.beta.hypot(a_sup)) * (1.0 + 1e-3);

    let beta_t = cast::<T>(cfg.beta);
    let a_t: Vec<T> = a.iter().map(|&x| cast::<T>(x)).collect();
    let history_map = Arc::new(move |_t: usize, hist: &[T]| *hist.last().unwrap());
    let update = Arc::new(move |t: usize, y: T, hist: &[T]| {
        let correction = if t >= 2 {
            a_t[t - 1] * hist[t - 2]
        } else {
            T::zero()
        };
        (beta_t * y + correction).tanh()
    });
    let schedule = AmpSchedule::new(
        format!("tap(beta={}, q={}, T={})", cfg.beta, cfg.q, cfg.t),
        cfg.t,
        cast::<T>(cfg.m),
        zeta,
        history_map,
        update,
    )?;
    let u0 = vec![cast::<T>(cfg.q); n];
    Ok((schedule, u0))
}

/// Build the gradient-descent schedule for tensors of the given order.
///
/// The marginal contraction is (p−1)-homogeneous, so f_t scales the latest
/// iterate by p_eff = p^{1/(p−1)}; then A(·, f_t(u)) = p·Ā(·,u) on a
/// symmetric tensor and F_t(y, history) = u^{t−1} ∓ η_{t−1}·y is exactly one
/// gradient step. Run this schedule on the symmetrized tensor (see
/// [`run_gradient_descent`]).
pub fn gd_schedule<T: Scalar>(cfg: &GdConfig, order: usize) -> Result<AmpSchedule<T>> {
    if order < 2 {
        return Err(Error::invalid("tensor order must be >= 2"));
    }
    let eta = broadcast(&cfg.eta, cfg.t, "GD step sizes eta")?;
    let eta_sup = eta.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let p_eff = (order as f64).powf(1.0 / (order as f64 - 1.0));
    let zeta = p_eff.max((1.0 + eta_sup * eta_sup).sqrt()) * (1.0 + 1e-3);

    let p_eff_t = cast::<T>(p_eff);
    let eta_t: Vec<T> = eta.iter().map(|&x| cast::<T>(x)).collect();
    let direction = cfg.direction;
    let history_map = Arc::new(move |_t: usize, hist: &[T]| p_eff_t * *hist.last().unwrap());
    let update = Arc::new(move |t: usize, y: T, hist: &[T]| {
        let prev = hist[t - 1];
        match direction {
            GdDirection::Descent => prev - eta_t[t - 1] * y,
            GdDirection::Ascent => prev + eta_t[t - 1] * y,
        }
    });
    AmpSchedule::new(
        format!("gd(T={}, direction={:?})", cfg.t, cfg.direction),
        cfg.t,
        cast::<T>(cfg.m),
        zeta,
        history_map,
        update,
    )
}

/// Resolve a schedule config into (schedule, U^0) for an order-p tensor on
/// R^n. TAP supplies its own U^0; GD initializes per its `u0` field, with
/// uniform draws taken from the run seed.
pub fn build_schedule<T: Scalar>(
    cfg: &ScheduleConfig,
    order: usize,
    n: usize,
    seed: u64,
) -> Result<(AmpSchedule<T>, Vec<T>)> {
    match cfg {
        ScheduleConfig::Tap(tap) => {
            if tap.data_driven {
                return Err(Error::invalid(
                    "data-driven TAP coefficients depend on a global norm of the \
                     history and cannot run through the per-coordinate engine; \
                     use run_tap_data_driven",
                ));
            }
            tap_schedule(tap, n)
        }
        ScheduleConfig::Gd(gd) => {
            let schedule = gd_schedule(gd, order)?;
            let u0 = match gd.u0 {
                U0Init::Zeros => vec![T::zero(); n],
                U0Init::Uniform => {
                    Stream::derived(seed, &[rng::tag("u0")]).uniform_vec(n, -1.0, 1.0)
                }
            };
            Ok((schedule, u0))
        }
    }
}

/// Run gradient descent on the symmetrized tensor from the given start.
pub fn run_gradient_descent<T: Scalar>(
    tensor: &CouplingTensor<T>,
    cfg: &GdConfig,
    u0: &[T],
) -> Result<IterationTrace<T>> {
    let schedule = gd_schedule::<T>(cfg, tensor.order())?;
    if tensor.is_symmetric() {
        run_iterations(tensor, &schedule, u0)
    } else {
        run_iterations(&tensor.symmetrize(), &schedule, u0)
    }
}

/// TAP iteration with the data-driven Onsager coefficient
/// 2f′_β(‖U^{t−2}‖²/N) in place of a_{t−2}. The coefficient depends on a
/// global statistic of the history, so this variant runs as a direct loop
/// rather than through the per-coordinate engine interface.
pub fn run_tap_data_driven<T: Scalar>(
    tensor: &CouplingTensor<T>,
    cfg: &TapConfig,
) -> Result<IterationTrace<T>> {
    if !cfg.beta.is_finite() || cfg.beta < 0.0 {
        return Err(Error::invalid("beta must be finite and >= 0"));
    }
    if !(cfg.q > 0.0 && cfg.q <= 1.0) {
        return Err(Error::invalid(format!("q must be in (0, 1], got {}", cfg.q)));
    }
    let n = tensor.dim();
    let p = tensor.order();
    let beta = cast::<T>(cfg.beta);
    let m = cast::<T>(cfg.m);
    if m < T::one() {
        return Err(Error::invalid("truncation level M must be >= 1"));
    }
    let nf = cast::<T>(n as f64);
    let two = cast::<T>(2.0);

    let mut u_steps: Vec<Vec<T>> = vec![vec![cast::<T>(cfg.q); n]];
    for t in 1..=cfg.t {
        let prev = &u_steps[t - 1];
        let y = tensor.contract_marginal(prev)?;
        let correction: Option<(T, &Vec<T>)> = if t >= 2 {
            let back = &u_steps[t - 2];
            let q_level = {
                let nb = norm_l2(back);
                (nb * nb) / nf
            };
            let coeff = two * onsager_derivative(beta, p, q_level.min(T::one()))?;
            Some((coeff, back))
        } else {
            None
        };
        let mut next = vec![T::zero(); n];
        for i in 0..n {
            if !y[i].is_finite() {
                return Err(Error::NonFinite { step: t, coord: i });
            }
            let corr = match &correction {
                Some((c, back)) => *c * back[i],
                None => T::zero(),
            };
            next[i] = truncate((beta * y[i] + corr).tanh(), m);
        }
        u_steps.push(next);
    }
    let v = crate::amp::project_hypercube(u_steps.last().unwrap());
    let step_norms = u_steps.iter().map(|u| to_f64(norm_l2(u))).collect();
    Ok(IterationTrace {
        schedule_name: format!("tap-data-driven(beta={}, q={}, T={})", cfg.beta, cfg.q, cfg.t),
        tensor_provenance: tensor.provenance().cloned(),
        u_steps,
        v,
        step_norms,
    })
}

/// TAP residual norm ‖x − tanh(β∇A(x) + 2f′_β(q)x)‖₂ for every iterate of a
/// trace, each projected onto the hypercube first.
pub fn residual_norms<T: Scalar>(
    tensor: &CouplingTensor<T>,
    beta: T,
    trace: &IterationTrace<T>,
) -> Result<Vec<f64>> {
    trace
        .u_steps
        .iter()
        .map(|u| {
            let x = crate::amp::project_hypercube(u);
            Ok(to_f64(norm_l2(&tap_residual(tensor, beta, &x)?)))
        })
        .collect()
}

/// Bernoulli entropy S(x) = ½(1+x)log(1+x) + ½(1−x)log(1−x) on [−1, 1],
/// with the limit convention 0·log 0 = 0. Even, S(0) = 0, S(±1) = log 2.
pub fn bernoulli_entropy<T: Scalar>(x: T) -> Result<T> {
    let one = T::one();
    if !x.is_finite() || x < -one || x > one {
        return Err(Error::domain(format!("entropy argument {x} outside [-1, 1]")));
    }
    let half = cast::<T>(0.5);
    let term = |y: T| if y > T::zero() { y * y.ln() } else { T::zero() };
    Ok(half * (term(one + x) + term(one - x)))
}

/// Onsager-type correction f_β(x) = (β²/2)(1 − x^p − p·x^{p−1}(1−x)) on [0, 1].
/// Nonnegative, f_β(0) = β²/2, f_β(1) = 0.
pub fn onsager_correction<T: Scalar>(beta: T, p: usize, x: T) -> Result<T> {
    if p < 2 {
        return Err(Error::invalid("order p must be >= 2"));
    }
    let one = T::one();
    if !x.is_finite() || x < T::zero() || x > one {
        return Err(Error::domain(format!("correction argument {x} outside [0, 1]")));
    }
    let half = cast::<T>(0.5);
    let pf = cast::<T>(p as f64);
    Ok(half * beta * beta * (one - x.powi(p as i32) - pf * x.powi(p as i32 - 1) * (one - x)))
}

/// Derivative f′_β(q) = −(β²/2)·p(p−1)·q^{p−2}(1−q). The q = 0 edge falls
/// out of powi (0^0 = 1): −β² at p = 2, zero for p ≥ 3; f′_β(1) = 0.
pub fn onsager_derivative<T: Scalar>(beta: T, p: usize, q: T) -> Result<T> {
    if p < 2 {
        return Err(Error::invalid("order p must be >= 2"));
    }
    let one = T::one();
    if !q.is_finite() || q < T::zero() || q > one {
        return Err(Error::domain(format!("derivative argument {q} outside [0, 1]")));
    }
    let half = cast::<T>(0.5);
    let coeff = cast::<T>((p * (p - 1)) as f64);
    Ok(-(half * beta * beta) * coeff * q.powi(p as i32 - 2) * (one - q))
}

/// Free energy F_β(x) = β·A(x) − Σ_i S(x_i) + N·f_β(‖x‖²/N) on the
/// hypercube. The entropy is summed over coordinates and the correction
/// carries the factor N, the reading whose gradient yields the TAP fixed
/// point; on the binary cube the value is β·A(x) − N·log 2 exactly.
pub fn free_energy<T: Scalar>(tensor: &CouplingTensor<T>, beta: T, x: &[T]) -> Result<T> {
    let n = tensor.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mut entropy = T::zero();
    for &xi in x {
        entropy += bernoulli_entropy(xi)?;
    }
    let nf = cast::<T>(n as f64);
    let q = {
        let nx = norm_l2(x);
        ((nx * nx) / nf).min(T::one())
    };
    let a_val = tensor.contract_full(x)?;
    Ok(beta * a_val - entropy + nf * onsager_correction(beta, tensor.order(), q)?)
}

/// TAP fixed-point residual r(x) = x − tanh(β∇A(x) + 2f′_β(‖x‖²/N)·x);
/// ‖r‖ = 0 exactly at critical points of F_β.
pub fn tap_residual<T: Scalar>(tensor: &CouplingTensor<T>, beta: T, x: &[T]) -> Result<Vec<T>> {
    let n = tensor.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let one = T::one();
    for (i, &xi) in x.iter().enumerate() {
        if !xi.is_finite() || xi < -one || xi > one {
            return Err(Error::domain(format!(
                "residual argument coordinate {i} = {xi} outside [-1, 1]"
            )));
        }
    }
    let grad = tensor.gradient(x)?;
    let nf = cast::<T>(n as f64);
    let q = {
        let nx = norm_l2(x);
        ((nx * nx) / nf).min(one)
    };
    let coeff = cast::<T>(2.0) * onsager_derivative(beta, tensor.order(), q)?;
    Ok(x.iter()
        .zip(grad.iter())
        .map(|(&xi, &gi)| xi - (beta * gi + coeff * xi).tanh())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn entropy_hand_values() {
        assert_eq!(bernoulli_entropy(0.0f64).unwrap(), 0.0);
        assert!((bernoulli_entropy(1.0f64).unwrap() - LN2).abs() < 1e-15);
        assert!((bernoulli_entropy(-1.0f64).unwrap() - LN2).abs() < 1e-15);
        // S(0.5) = 0.75·log 1.5 + 0.25·log 0.5
        let expect = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((bernoulli_entropy(0.5f64).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.130812).abs() < 1e-6);
        assert!(bernoulli_entropy(1.0000001f64).is_err());
    }

    #[test]
    fn entropy_is_even() {
        for &x in &[0.1f64, 0.37, 0.99] {
            assert_eq!(
                bernoulli_entropy(x).unwrap(),
                bernoulli_entropy(-x).unwrap()
            );
        }
    }

    #[test]
    fn correction_hand_values() {
        for p in [2usize, 3, 4] {
            for &beta in &[0.5f64, 1.0, 2.0] {
                assert_eq!(onsager_correction(beta, p, 1.0).unwrap(), 0.0);
                let at0 = onsager_correction(beta, p, 0.0).unwrap();
                assert!((at0 - beta * beta / 2.0).abs() < 1e-15);
            }
        }
        let v = onsager_correction(1.0f64, 4, 0.5).unwrap();
        assert!((v - 0.34375).abs() < 1e-15);
        assert!(onsager_correction(1.0f64, 4, 1.5).is_err());
    }

    #[test]
    fn derivative_edges() {
        // q=0: −β² at p=2, zero at p>=3; q=1: zero for all p.
        assert_eq!(onsager_derivative(1.5f64, 2, 0.0).unwrap(), -2.25);
        assert_eq!(onsager_derivative(1.5f64, 3, 0.0).unwrap(), 0.0);
        assert_eq!(onsager_derivative(1.5f64, 4, 0.0).unwrap(), 0.0);
        for p in [2usize, 3, 4] {
            assert_eq!(onsager_derivative(0.9f64, p, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn free_energy_special_points() {
        let n = 6;
        let t = CouplingTensor::<f64>::sample_gaussian(4, n, 31).unwrap();
        let beta = 1.3f64;
        // all-zeros: N·β²/2
        let at_zero = free_energy(&t, beta, &vec![0.0; n]).unwrap();
        assert!((at_zero - n as f64 * beta * beta / 2.0).abs() < 1e-12);
        // binary point: β·A(σ) − N·log 2
        let sigma = vec![1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let expect = beta * t.contract_full(&sigma).unwrap() - n as f64 * LN2;
        assert!((free_energy(&t, beta, &sigma).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn residual_zero_tensor_origin_fixed_point() {
        let z = CouplingTensor::<f64>::zeros(4, 5).unwrap();
        let r = tap_residual(&z, 2.0, &[0.0; 5]).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tap_schedule_zero_cases() {
        // beta = 0: U^1 = tanh(0) = 0 and all later iterates stay 0.
        let cfg = TapConfig {
            beta: 0.0,
            q: 0.5,
            a: vec![0.0],
            t: 3,
            m: 2.0,
            data_driven: false,
        };
        let t = CouplingTensor::<f64>::sample_gaussian(3, 6, 4).unwrap();
        let (schedule, u0) = tap_schedule::<f64>(&cfg, 6).unwrap();
        let trace = run_iterations(&t, &schedule, &u0).unwrap();
        for step in &trace.u_steps[1..] {
            assert!(step.iter().all(|&x| x == 0.0));
        }
        // zero tensor, beta > 0: U^1 = tanh(0) = 0.
        let cfg2 = TapConfig { beta: 1.0, ..cfg };
        let z = CouplingTensor::<f64>::zeros(3, 6).unwrap();
        let (s2, u0) = tap_schedule::<f64>(&cfg2, 6).unwrap();
        let trace = run_iterations(&z, &s2, &u0).unwrap();
        assert!(trace.u_steps[1].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tap_requires_coefficients_for_long_horizons() {
        let cfg = TapConfig {
            beta: 1.0,
            q: 0.5,
            a: vec![],
            t: 2,
            m: 2.0,
            data_driven: false,
        };
        assert!(tap_schedule::<f64>(&cfg, 4).is_err());
    }

    #[test]
    fn gd_zero_step_and_zero_tensor_are_stationary() {
        let cfg = GdConfig {
            eta: vec![0.0],
            direction: GdDirection::Descent,
            t: 3,
            m: 2.0,
            u0: U0Init::Zeros,
        };
        let t = CouplingTensor::<f64>::sample_gaussian(2, 4, 9).unwrap().symmetrize();
        let u0 = vec![0.25, -0.5, 0.75, 0.1];
        let trace = run_gradient_descent(&t, &cfg, &u0).unwrap();
        for step in &trace.u_steps {
            assert_eq!(step, &u0);
        }
        let z = CouplingTensor::<f64>::zeros(2, 4).unwrap();
        let cfg2 = GdConfig { eta: vec![0.3], ..cfg };
        let trace = run_gradient_descent(&z, &cfg2, &u0).unwrap();
        for step in &trace.u_steps {
            assert_eq!(step, &u0);
        }
    }

    #[test]
    fn gd_single_step_matches_matrix_formula() {
        // p=2 symmetric: one step is U^0 − η·2A U^0 before truncation.
        let raw = CouplingTensor::<f64>::sample_gaussian(2, 4, 21).unwrap();
        let sym = raw.symmetrize();
        let eta = 0.05;
        let cfg = GdConfig {
            eta: vec![eta],
            direction: GdDirection::Descent,
            t: 1,
            m: 4.0,
            u0: U0Init::Zeros,
        };
        let u0 = vec![0.4, -0.2, 0.9, 0.05];
        let trace = run_gradient_descent(&sym, &cfg, &u0).unwrap();
        let au0 = sym.contract_marginal(&u0).unwrap();
        for i in 0..4 {
            let expect = u0[i] - eta * 2.0 * au0[i];
            assert!(
                (trace.u_steps[1][i] - expect).abs() < 1e-12,
                "coordinate {i}"
            );
        }
    }

    #[test]
    fn tap_runs_generically_over_f32() {
        let t = crate::CouplingTensor32::sample_gaussian(3, 6, 88).unwrap();
        let cfg = TapConfig {
            beta: 1.0,
            q: 0.5,
            a: vec![0.2],
            t: 3,
            m: 2.0,
            data_driven: false,
        };
        let (schedule, u0) = tap_schedule::<f32>(&cfg, 6).unwrap();
        let trace = run_iterations(&t, &schedule, &u0).unwrap();
        assert_eq!(trace.u_steps.len(), 4);
        assert!(trace.v.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn data_driven_tap_stays_in_tanh_range() {
        let t = CouplingTensor::<f64>::sample_gaussian(4, 8, 77).unwrap();
        let cfg = TapConfig {
            beta: 1.0,
            q: 0.5,
            a: vec![0.3],
            t: 4,
            m: 2.0,
            data_driven: true,
        };
        let trace = run_tap_data_driven(&t, &cfg).unwrap();
        assert_eq!(trace.u_steps.len(), 5);
        for step in &trace.u_steps[1..] {
            assert!(step.iter().all(|&x| x.abs() < 1.0));
        }
    }
}
