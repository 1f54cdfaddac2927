//! Experiment runners: perturbation stability, τ-path overlaps, Monte Carlo
//! concentration, and OGP scans with persistence-ready records.
//!
//! Runners work on the f64 aliases. Replicas, pairs and grid points derive
//! child seed streams from (master seed, experiment tag, index), so parallel
//! execution order never affects the draws, and aggregation is positional.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amp::{project_hypercube, run_iterations};
use crate::error::{Error, Result};
use crate::oracle::{
    brute_force_ground_state, ogp_scan, null_overlap_model, overlap, OgpReport,
};
use crate::rng::{self, derive_seed};
use crate::scalar::dist_l2;
use crate::schedules::{build_schedule, ScheduleConfig};
use crate::tensor::{frobenius_distance, CouplingTensor};

/// Deviation bookkeeping for one perturbation pair at one step.
///
/// `bound` is the horizon bound K^T·‖B̂−B‖·(ζM√(NT))^{p−1} with
/// K = (1+ζ²)(1+ζ·ĉ₂)+1; `bound_alt` carries the exponent-p variant, and
/// deviations are asserted against the larger of the two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub pair: usize,
    pub t: usize,
    /// β_N(t) = √(Σ_{s≤t} ‖U^s − Û^s‖²).
    pub beta_n_t: f64,
    /// ‖V̂^t − V^t‖₂ of the hypercube-projected iterates.
    pub v_dev_t: f64,
    /// ‖B̂ − B‖ Frobenius: certified upper bound on the operator distance.
    pub op_dist: f64,
    pub bound: f64,
    pub bound_alt: f64,
    pub k: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub p: usize,
    pub n: usize,
    pub schedule: ScheduleConfig,
    pub pair_count: usize,
    /// None: B̂ is an independent draw. Some(τ): B̂ = interpolate(B, fresh, τ).
    pub tau_small: Option<f64>,
    pub seed: u64,
    #[serde(default = "default_c2_samples")]
    pub c2_samples: u32,
}

fn default_c2_samples() -> u32 {
    32
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityOutcome {
    pub records: Vec<StabilityRecord>,
    /// Bound or ordering violations, each naming pair and step. Non-empty
    /// output signals either a ζ/c₂ underestimate or an engine bug.
    pub violations: Vec<String>,
}

/// Run the engine on perturbation pairs (B, B̂) from a shared U^0 and check
/// the observed deviations against the recorded bound.
pub fn run_stability(cfg: &StabilityConfig) -> Result<StabilityOutcome> {
    if cfg.pair_count == 0 {
        return Err(Error::invalid("stability run needs pair_count >= 1"));
    }
    let horizon = cfg.schedule.horizon();
    let m = cfg.schedule.truncation_m();

    let per_pair: Vec<(Vec<StabilityRecord>, Vec<String>)> = (0..cfg.pair_count)
        .into_par_iter()
        .map(|pair| -> Result<(Vec<StabilityRecord>, Vec<String>)> {
            let base = [rng::tag("stability"), pair as u64];
            let b = CouplingTensor::<f64>::sample_gaussian(
                cfg.p,
                cfg.n,
                derive_seed(cfg.seed, &[base[0], base[1], 0]),
            )?;
            let fresh = CouplingTensor::<f64>::sample_gaussian(
                cfg.p,
                cfg.n,
                derive_seed(cfg.seed, &[base[0], base[1], 1]),
            )?;
            let bhat = match cfg.tau_small {
                Some(tau) => b.interpolate(&fresh, tau)?,
                None => fresh,
            };

            let (schedule, u0) = build_schedule::<f64>(
                &cfg.schedule,
                cfg.p,
                cfg.n,
                derive_seed(cfg.seed, &[base[0], base[1], 2]),
            )?;
            let trace = run_iterations(&b, &schedule, &u0)?;
            let trace_hat = run_iterations(&bhat, &schedule, &u0)?;

            let c2_hat = bhat
                .estimate_c2(m, cfg.c2_samples, derive_seed(cfg.seed, &[base[0], base[1], 3]))?
                .c2_hat;
            let zeta = schedule.zeta();
            let k = (1.0 + zeta * zeta) * (1.0 + zeta * c2_hat) + 1.0;
            let op_dist = frobenius_distance(&b, &bhat)?;
            let radius = zeta * m * ((cfg.n * horizon) as f64).sqrt();
            let bound = k.powi(horizon as i32) * op_dist * radius.powi(cfg.p as i32 - 1);
            let bound_alt = k.powi(horizon as i32) * op_dist * radius.powi(cfg.p as i32);

            let mut records = Vec::new();
            let mut violations = Vec::new();
            let mut cum_sq = 0.0f64;
            let steps: Vec<usize> = if horizon == 0 { vec![0] } else { (1..=horizon).collect() };
            for t in steps {
                let dev = dist_l2(&trace.u_steps[t], &trace_hat.u_steps[t]);
                cum_sq += dev * dev;
                let beta_n_t = cum_sq.sqrt();
                let v_dev_t = dist_l2(
                    &project_hypercube(&trace.u_steps[t]),
                    &project_hypercube(&trace_hat.u_steps[t]),
                );
                if v_dev_t > beta_n_t + 1e-12 {
                    violations.push(format!(
                        "pair {pair} step {t}: v deviation {v_dev_t} exceeds beta_N {beta_n_t}"
                    ));
                }
                if v_dev_t > bound.max(bound_alt) {
                    violations.push(format!(
                        "pair {pair} step {t}: v deviation {v_dev_t} exceeds bound {}",
                        bound.max(bound_alt)
                    ));
                }
                records.push(StabilityRecord {
                    pair,
                    t,
                    beta_n_t,
                    v_dev_t,
                    op_dist,
                    bound,
                    bound_alt,
                    k,
                });
            }
            Ok((records, violations))
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut violations = Vec::new();
    for (r, v) in per_pair {
        records.extend(r);
        violations.extend(v);
    }
    Ok(StabilityOutcome { records, violations })
}

/// Median of ‖V(A_τ) − V(A)‖₂/√N over fresh seeds, one value per τ.
/// The sweep behind the smaller-perturbation ⇒ smaller-deviation trend check.
pub fn stability_tau_sweep(
    cfg: &StabilityConfig,
    taus: &[f64],
    seeds: &[u64],
) -> Result<Vec<f64>> {
    let mut medians = Vec::with_capacity(taus.len());
    for &tau in taus {
        let mut devs: Vec<f64> = seeds
            .par_iter()
            .map(|&seed| -> Result<f64> {
                let b = CouplingTensor::<f64>::sample_gaussian(
                    cfg.p,
                    cfg.n,
                    derive_seed(seed, &[rng::tag("sweep"), 0]),
                )?;
                let fresh = CouplingTensor::<f64>::sample_gaussian(
                    cfg.p,
                    cfg.n,
                    derive_seed(seed, &[rng::tag("sweep"), 1]),
                )?;
                let bhat = b.interpolate(&fresh, tau)?;
                let (schedule, u0) = build_schedule::<f64>(
                    &cfg.schedule,
                    cfg.p,
                    cfg.n,
                    derive_seed(seed, &[rng::tag("sweep"), 2]),
                )?;
                let va = run_iterations(&b, &schedule, &u0)?.v;
                let vb = run_iterations(&bhat, &schedule, &u0)?.v;
                Ok(dist_l2(&va, &vb) / (cfg.n as f64).sqrt())
            })
            .collect::<Result<_>>()?;
        devs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        medians.push(devs[devs.len() / 2]);
    }
    Ok(medians)
}

/// One τ-grid point of an overlap path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub n: usize,
    pub tau_n: f64,
    /// Overlap of V^{τ_n} with V^0; exactly 1 at n = 0.
    pub overlap_n: f64,
    /// A_{τ_n}(V^{τ_n})/N, the energy under the point's own tensor.
    pub energy_n: f64,
    pub jump_n: f64,
    /// Only set when the μ probe is enabled and the brute-force budget
    /// admits the enumeration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_optimal: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathConfig {
    pub p: usize,
    pub n: usize,
    pub schedule: ScheduleConfig,
    /// Grid spacing; 1/δ must be an integer.
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub mu_probe: Option<f64>,
}

/// Run AMP on A_{τ_n} for τ_n = n·δ from a shared U^0 and record the overlap
/// of each output with the τ = 0 output. Tensors are drawn from the config
/// seed; use [`run_overlap_path_with_tensors`] to inject instances.
pub fn run_overlap_path(cfg: &PathConfig) -> Result<Vec<PathRecord>> {
    let a = CouplingTensor::<f64>::sample_gaussian(
        cfg.p,
        cfg.n,
        derive_seed(cfg.seed, &[rng::tag("path"), 0]),
    )?;
    let ahat = CouplingTensor::<f64>::sample_gaussian(
        cfg.p,
        cfg.n,
        derive_seed(cfg.seed, &[rng::tag("path"), 1]),
    )?;
    run_overlap_path_with_tensors(cfg, &a, &ahat)
}

/// Overlap path over caller-supplied endpoint tensors.
pub fn run_overlap_path_with_tensors(
    cfg: &PathConfig,
    a: &CouplingTensor<f64>,
    ahat: &CouplingTensor<f64>,
) -> Result<Vec<PathRecord>> {
    if !(cfg.delta > 0.0 && cfg.delta <= 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1]"));
    }
    let inv = 1.0 / cfg.delta;
    let steps = inv.round();
    if (inv - steps).abs() > 1e-9 {
        return Err(Error::invalid(format!("1/delta = {inv} is not an integer")));
    }
    let steps = steps as usize;

    let (schedule, u0) = build_schedule::<f64>(
        &cfg.schedule,
        cfg.p,
        cfg.n,
        derive_seed(cfg.seed, &[rng::tag("path"), 2]),
    )?;

    let probe_feasible = crate::oracle::enumeration_cost(cfg.p, cfg.n)
        <= crate::oracle::EnumerationBudget::default().max_work;
    let outputs: Vec<(f64, Vec<f64>, f64, Option<bool>)> = (0..=steps)
        .into_par_iter()
        .map(|i| -> Result<(f64, Vec<f64>, f64, Option<bool>)> {
            let tau = ((i as f64) * cfg.delta).min(1.0);
            let a_tau = a.interpolate(ahat, tau)?;
            let trace = run_iterations(&a_tau, &schedule, &u0)?;
            let energy = a_tau.energy(&trace.v)?;
            let near_optimal = match cfg.mu_probe {
                Some(mu) if probe_feasible => {
                    let gs = brute_force_ground_state(&a_tau)?;
                    Some(energy <= gs.eta_n + mu)
                }
                _ => None,
            };
            Ok((tau, trace.v, energy, near_optimal))
        })
        .collect::<Result<_>>()?;

    let v0 = outputs[0].1.clone();
    let mut records = Vec::with_capacity(steps + 1);
    let mut prev_overlap = 1.0f64;
    for (i, (tau, v, energy, near_optimal)) in outputs.into_iter().enumerate() {
        // at n = 0 the vectors are bitwise equal, so this is exactly 1
        let ov = overlap(&v0, &v)?;
        records.push(PathRecord {
            n: i,
            tau_n: tau,
            overlap_n: ov,
            energy_n: energy,
            jump_n: if i == 0 { 0.0 } else { (ov - prev_overlap).abs() },
            near_optimal,
        });
        prev_overlap = ov;
    }
    Ok(records)
}

/// Which scalar an ensemble concentrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Brute-force ground-state energy η_N.
    EtaN,
    /// A(V)/N of the AMP output.
    AOfV,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRecord {
    pub quantity: Quantity,
    pub n: usize,
    pub replicas: u32,
    pub empirical_mean: f64,
    /// Sample standard deviation (n−1 denominator); 0 for a single replica.
    pub empirical_std: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub quantity: Quantity,
    pub p: usize,
    pub n_list: Vec<usize>,
    pub replicas: u32,
    pub seed: u64,
    /// Required for [`Quantity::AOfV`].
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
}

/// Monte Carlo over independent tensors (and independent U^0 per the
/// schedule's initialization); mean and standard deviation per N.
pub fn run_concentration(cfg: &ConcentrationConfig) -> Result<Vec<ConcentrationRecord>> {
    if cfg.replicas == 0 {
        return Err(Error::invalid("concentration run needs replicas >= 1"));
    }
    if matches!(cfg.quantity, Quantity::AOfV) && cfg.schedule.is_none() {
        return Err(Error::invalid("A_of_V concentration needs a schedule config"));
    }
    let mut records = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let values: Vec<f64> = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let child = derive_seed(cfg.seed, &[rng::tag("concentration"), n as u64, r as u64]);
                let tensor = CouplingTensor::<f64>::sample_gaussian(
                    cfg.p,
                    n,
                    derive_seed(child, &[0]),
                )?;
                match cfg.quantity {
                    Quantity::EtaN => Ok(brute_force_ground_state(&tensor)?.eta_n),
                    Quantity::AOfV => {
                        let schedule_cfg = cfg.schedule.as_ref().expect("validated");
                        let (schedule, u0) = build_schedule::<f64>(
                            schedule_cfg,
                            cfg.p,
                            n,
                            derive_seed(child, &[1]),
                        )?;
                        let trace = run_iterations(&tensor, &schedule, &u0)?;
                        tensor.energy(&trace.v)
                    }
                }
            })
            .collect::<Result<_>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (values.len() - 1) as f64)
                .sqrt()
        };
        records.push(ConcentrationRecord {
            quantity: cfg.quantity,
            n,
            replicas: cfg.replicas,
            empirical_mean: mean,
            empirical_std: std,
            values,
        });
    }
    Ok(records)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OgpExperimentConfig {
    pub p: usize,
    pub n: usize,
    pub seed_a: u64,
    pub seed_ahat: u64,
    pub tau_grid: Vec<f64>,
    pub mu: f64,
    #[serde(default = "default_min_width")]
    pub min_width: f64,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
}

fn default_min_width() -> f64 {
    0.05
}

fn default_bin_width() -> f64 {
    0.02
}

/// Thin orchestration over [`ogp_scan`]: sample both tensors from their
/// seeds and scan the grid.
pub fn run_ogp_experiment(cfg: &OgpExperimentConfig) -> Result<OgpReport> {
    let a = CouplingTensor::<f64>::sample_gaussian(cfg.p, cfg.n, cfg.seed_a)?;
    let ahat = CouplingTensor::<f64>::sample_gaussian(cfg.p, cfg.n, cfg.seed_ahat)?;
    ogp_scan(&a, &ahat, &cfg.tau_grid, cfg.mu, cfg.min_width, cfg.bin_width)
}

/// The null-model threshold shipped for chaos/path comparisons.
pub fn chaos_null_threshold(n: usize, experiment_pairs: u32, seed: u64) -> f64 {
    null_overlap_model(n, experiment_pairs, 20_000, seed).threshold
}
