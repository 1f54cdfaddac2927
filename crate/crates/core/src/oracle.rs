//! Exact desk-scale ground truth over the binary cube.
//!
//! Enumeration walks all 2^N spin configurations in Gray-code order, so each
//! step flips a single spin and the energy updates through an O(p·N^{p−1})
//! incremental delta instead of a full O(N^p) contraction. Whenever a state
//! is a candidate minimizer (or near-optimal member) the energy is recomputed
//! fresh, so reported values and membership decisions carry no accumulated
//! drift and match a naive state-by-state re-evaluation exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{cast, to_f64, Scalar};
use crate::tensor::{spins_to_vec, CouplingTensor};

/// Work-unit ceiling for exhaustive enumeration: 2^N states, p·N^{p−1}
/// multiply-adds per single-flip delta. The default admits roughly N ≤ 24 at
/// p = 2 and N ≤ 14 at p = 4.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    pub max_work: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_work: 2_000_000_000 }
    }
}

/// Estimated enumeration cost in multiply-adds.
pub fn enumeration_cost(order: usize, dim: usize) -> u128 {
    let states = 1u128 << dim.min(127);
    let flip = (order as u128) * (dim as u128).pow(order as u32 - 1);
    states.saturating_mul(flip)
}

fn check_budget(order: usize, dim: usize, budget: EnumerationBudget, what: &str) -> Result<()> {
    let cost = enumeration_cost(order, dim);
    if cost > budget.max_work {
        return Err(Error::BudgetExceeded(format!(
            "{what} at p={order}, N={dim} needs ~{cost} multiply-adds, budget is {}",
            budget.max_work
        )));
    }
    Ok(())
}

/// Exhaustive minimum of A(σ)/N over {−1,+1}^N.
#[derive(Clone, Debug, Serialize)]
pub struct GroundStateResult<T> {
    pub order: usize,
    pub dim: usize,
    /// Exact minimum of A(σ)/N.
    pub eta_n: T,
    /// Every σ achieving the minimum, sorted lexicographically. For even p
    /// the list is closed under the global sign flip; see
    /// [`GroundStateResult::deduplicated_minimizers`].
    pub minimizers: Vec<Vec<i8>>,
    pub states_evaluated: u64,
}

impl<T: Scalar> GroundStateResult<T> {
    /// Minimizers with ±σ pairs collapsed to one representative when p is
    /// even (the objective is sign-symmetric there); odd p keeps both.
    pub fn deduplicated_minimizers(&self) -> Vec<Vec<i8>> {
        if !self.order.is_multiple_of(2) {
            return self.minimizers.clone();
        }
        let mut reps: Vec<Vec<i8>> = self
            .minimizers
            .iter()
            .map(|s| {
                let flipped: Vec<i8> = s.iter().map(|&x| -x).collect();
                if flipped < *s {
                    flipped
                } else {
                    s.clone()
                }
            })
            .collect();
        reps.sort();
        reps.dedup();
        reps
    }

    /// Energy-minimal, lexicographically-smallest minimizer.
    pub fn representative(&self) -> &[i8] {
        &self.minimizers[0]
    }
}

/// All configurations within μ of the ground-state energy.
#[derive(Clone, Debug, Serialize)]
pub struct NearOptimalSet<T> {
    pub mu: T,
    pub eta_n: T,
    /// (σ, A(σ)/N) with energy ≤ η_N + μ, sorted by energy then lex σ.
    pub members: Vec<(Vec<i8>, T)>,
}

/// Walk all 2^N states in Gray-code order; the callback sees the spin
/// configuration and the running raw value A(σ).
fn gray_scan<T: Scalar>(
    tensor: &CouplingTensor<T>,
    mut visit: impl FnMut(&[i8], &[T], T),
) -> Result<u64> {
    let n = tensor.dim();
    let mut sigma_i: Vec<i8> = vec![1; n];
    let mut sigma_t: Vec<T> = vec![T::one(); n];
    let mut energy = tensor.contract_full(&sigma_t)?;
    visit(&sigma_i, &sigma_t, energy);

    let total: u64 = 1u64 << n;
    for step in 1..total {
        let k = step.trailing_zeros() as usize;
        let delta =
            -cast::<T>(2.0) * sigma_t[k] * odd_flip_sum(tensor.entries(), n, tensor.order(), &sigma_t, k);
        energy += delta;
        sigma_i[k] = -sigma_i[k];
        sigma_t[k] = -sigma_t[k];
        visit(&sigma_i, &sigma_t, energy);
    }
    Ok(total)
}

/// D_k = Σ over index tuples containing k an odd number of times of
/// A_idx · Π_{slots ≠ k} σ. Flipping spin k changes A(σ) by −2·σ_k·D_k.
/// Tuples are enumerated once each by their first k slot.
fn odd_flip_sum<T: Scalar>(entries: &[T], n: usize, p: usize, sigma: &[T], k: usize) -> T {
    let mut acc = T::zero();
    for first in 0..p {
        odd_rec(entries, n, p, sigma, k, first, 0, 0, T::one(), 0, &mut acc);
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn odd_rec<T: Scalar>(
    entries: &[T],
    n: usize,
    p: usize,
    sigma: &[T],
    k: usize,
    first: usize,
    depth: usize,
    offset: usize,
    prod: T,
    kcount: u32,
    acc: &mut T,
) {
    if depth == p - 1 {
        let base = offset * n;
        if depth == first {
            // slot is forced to k, adding one occurrence
            if kcount.is_multiple_of(2) {
                *acc += entries[base + k] * prod;
            }
        } else if depth > first {
            if kcount % 2 == 1 {
                for i in 0..n {
                    if i != k {
                        *acc += entries[base + i] * prod * sigma[i];
                    }
                }
            } else {
                *acc += entries[base + k] * prod;
            }
        } else {
            // depth < first: slot must avoid k and parity must already be odd
            // (it cannot be: k only appears from `first` onward), so nothing
            // contributes here. Unreachable because first <= p-1 ensures
            // depth == p-1 >= first.
            unreachable!("first occurrence slot beyond final depth");
        }
        return;
    }
    if depth == first {
        odd_rec(entries, n, p, sigma, k, first, depth + 1, offset * n + k, prod, kcount + 1, acc);
    } else if depth < first {
        for i in 0..n {
            if i == k {
                continue;
            }
            odd_rec(
                entries,
                n,
                p,
                sigma,
                k,
                first,
                depth + 1,
                offset * n + i,
                prod * sigma[i],
                kcount,
                acc,
            );
        }
    } else {
        for i in 0..n {
            if i == k {
                odd_rec(entries, n, p, sigma, k, first, depth + 1, offset * n + k, prod, kcount + 1, acc);
            } else {
                odd_rec(
                    entries,
                    n,
                    p,
                    sigma,
                    k,
                    first,
                    depth + 1,
                    offset * n + i,
                    prod * sigma[i],
                    kcount,
                    acc,
                );
            }
        }
    }
}

/// Worst relative drift between the running Gray-code energy and a fresh
/// contraction at `checkpoints` randomly chosen states. Diagnostic for the
/// incremental-delta path.
pub fn gray_drift_check<T: Scalar>(
    tensor: &CouplingTensor<T>,
    checkpoints: usize,
    seed: u64,
) -> Result<f64> {
    check_budget(tensor.order(), tensor.dim(), EnumerationBudget::default(), "drift check")?;
    let total = 1u64 << tensor.dim();
    let mut stream = Stream::derived(seed, &[rng::tag("gray-drift")]);
    let mut marks: Vec<u64> = (0..checkpoints)
        .map(|_| (stream.uniform_in(0.0, total as f64) as u64).min(total - 1))
        .collect();
    marks.sort_unstable();
    marks.dedup();

    let mut worst = 0.0f64;
    let mut state: u64 = 0;
    let mut next_mark = 0usize;
    gray_scan(tensor, |_, sigma_t, running| {
        if next_mark < marks.len() && marks[next_mark] == state {
            let fresh = to_f64(tensor.contract_full(sigma_t).expect("validated"));
            let drift = (to_f64(running) - fresh).abs() / (1.0 + fresh.abs());
            if drift > worst {
                worst = drift;
            }
            next_mark += 1;
        }
        state += 1;
    })?;
    Ok(worst)
}

/// Exact ground state via Gray-code enumeration with incremental deltas.
pub fn brute_force_ground_state<T: Scalar>(
    tensor: &CouplingTensor<T>,
) -> Result<GroundStateResult<T>> {
    brute_force_ground_state_with_budget(tensor, EnumerationBudget::default())
}

pub fn brute_force_ground_state_with_budget<T: Scalar>(
    tensor: &CouplingTensor<T>,
    budget: EnumerationBudget,
) -> Result<GroundStateResult<T>> {
    check_budget(tensor.order(), tensor.dim(), budget, "ground-state enumeration")?;
    let mut best: Option<T> = None;
    let mut minimizers: Vec<Vec<i8>> = Vec::new();
    // Running deltas drift by rounding; candidates within this relative guard
    // are recomputed fresh so ties and minima are decided on exact values.
    let guard = |b: T| cast::<T>(1e-7) * (T::one() + b.abs());

    let states = gray_scan(tensor, |sigma_i, sigma_t, running| {
        let is_candidate = match best {
            None => true,
            Some(b) => running <= b + guard(b),
        };
        if is_candidate {
            let fresh = tensor
                .contract_full(sigma_t)
                .expect("validated dimensions");
            match best {
                Some(b) if fresh > b => {}
                Some(b) if fresh == b => minimizers.push(sigma_i.to_vec()),
                _ => {
                    best = Some(fresh);
                    minimizers.clear();
                    minimizers.push(sigma_i.to_vec());
                }
            }
        }
    })?;

    minimizers.sort();
    Ok(GroundStateResult {
        order: tensor.order(),
        dim: tensor.dim(),
        eta_n: best.expect("at least one state") / cast::<T>(tensor.dim() as f64),
        minimizers,
        states_evaluated: states,
    })
}

/// All σ with A(σ)/N ≤ η_N + μ, membership decided on fresh contractions.
pub fn near_optimal_set<T: Scalar>(tensor: &CouplingTensor<T>, mu: T) -> Result<NearOptimalSet<T>> {
    near_optimal_set_with_budget(tensor, mu, EnumerationBudget::default())
}

pub fn near_optimal_set_with_budget<T: Scalar>(
    tensor: &CouplingTensor<T>,
    mu: T,
    budget: EnumerationBudget,
) -> Result<NearOptimalSet<T>> {
    if mu < T::zero() || !mu.is_finite() {
        return Err(Error::invalid("mu must be finite and >= 0"));
    }
    let ground = brute_force_ground_state_with_budget(tensor, budget)?;
    let threshold = ground.eta_n + mu;
    let nf = cast::<T>(tensor.dim() as f64);
    let guard = cast::<T>(1e-7) * (T::one() + threshold.abs());

    let mut members: Vec<(Vec<i8>, T)> = Vec::new();
    gray_scan(tensor, |sigma_i, sigma_t, running| {
        if running / nf <= threshold + guard {
            let fresh = tensor
                .contract_full(sigma_t)
                .expect("validated dimensions")
                / nf;
            if fresh <= threshold {
                members.push((sigma_i.to_vec(), fresh));
            }
        }
    })?;

    members.sort_by(|(sa, ea), (sb, eb)| {
        ea.partial_cmp(eb)
            .expect("finite energies")
            .then_with(|| sa.cmp(sb))
    });
    Ok(NearOptimalSet {
        mu,
        eta_n: ground.eta_n,
        members,
    })
}

/// Normalized absolute overlap |⟨u,v⟩| / (‖u‖₂‖v‖₂) ∈ [0, 1].
pub fn overlap<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::invalid("overlap arguments must be finite"));
    }
    let nu = crate::scalar::norm_l2(u);
    let nv = crate::scalar::norm_l2(v);
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::ZeroVector);
    }
    if u == v {
        return Ok(T::one());
    }
    let raw = crate::scalar::dot(u, v).abs() / (nu * nv);
    // Cauchy-Schwarz up to the last ulp
    Ok(raw.min(T::one()))
}

/// Widest empty open interval between consecutive observed overlap values,
/// subject to width ≥ min_width and 0 < ν₁ < ν₂ < 1. Ties break toward the
/// smaller ν₁; `None` when no interval qualifies.
pub fn detect_gap(overlaps: &[f64], min_width: f64) -> Result<Option<(f64, f64)>> {
    if overlaps.is_empty() {
        return Err(Error::invalid("empty overlap multiset"));
    }
    let mut sorted: Vec<f64> = overlaps.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite overlaps"));
    sorted.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a <= 0.0 || b >= 1.0 {
            continue;
        }
        let width = b - a;
        if width >= min_width {
            let replace = match best {
                None => true,
                Some((ba, bb)) => width > bb - ba,
            };
            if replace {
                best = Some((a, b));
            }
        }
    }
    Ok(best)
}

/// Binned overlap counts; the last bin is closed so 1.0 lands inside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width <= 1.0) {
            return Err(Error::invalid("bin width must be in (0, 1]"));
        }
        let bins = (1.0 / bin_width).ceil() as usize;
        let mut counts = vec![0u64; bins.max(1)];
        for &v in values {
            let idx = ((v / bin_width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Histogram { bin_width, counts })
    }
}

/// One cross-pair row of an OGP scan, as exported to CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapPairRow {
    pub tau_i: f64,
    pub tau_j: f64,
    pub energy_i: f64,
    pub energy_j: f64,
    pub overlap: f64,
}

/// Outcome of an interpolated-family overlap scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OgpReport {
    pub order: usize,
    pub dim: usize,
    pub tau_grid: Vec<f64>,
    pub mu: f64,
    pub min_width: f64,
    pub eta_per_tau: Vec<f64>,
    pub set_sizes: Vec<usize>,
    /// Sorted multiset of overlaps over all unordered cross pairs.
    pub overlap_values: Vec<f64>,
    pub gap: Option<(f64, f64)>,
    pub histogram: Histogram,
    pub pairs: Vec<OverlapPairRow>,
}

/// Enumerate μ-near-optimal sets of A_τ = √(1−τ)A + √τÂ for every τ in the
/// grid and collect overlaps over all unordered pairs from the union
/// (same-τ pairs included, self-pairs excluded).
pub fn ogp_scan<T: Scalar>(
    a: &CouplingTensor<T>,
    ahat: &CouplingTensor<T>,
    tau_grid: &[f64],
    mu: f64,
    min_width: f64,
    bin_width: f64,
) -> Result<OgpReport> {
    ogp_scan_with_budget(a, ahat, tau_grid, mu, min_width, bin_width, EnumerationBudget::default())
}

#[allow(clippy::too_many_arguments)]
pub fn ogp_scan_with_budget<T: Scalar>(
    a: &CouplingTensor<T>,
    ahat: &CouplingTensor<T>,
    tau_grid: &[f64],
    mu: f64,
    min_width: f64,
    bin_width: f64,
    budget: EnumerationBudget,
) -> Result<OgpReport> {
    if tau_grid.is_empty() {
        return Err(Error::invalid("tau grid must be nonempty"));
    }
    if tau_grid.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::invalid("tau grid values must lie in [0, 1]"));
    }
    let per_tau = enumeration_cost(a.order(), a.dim());
    if per_tau.saturating_mul(tau_grid.len() as u128) > budget.max_work {
        return Err(Error::BudgetExceeded(format!(
            "ogp scan needs ~{} multiply-adds over {} grid points, budget is {}",
            per_tau.saturating_mul(tau_grid.len() as u128),
            tau_grid.len(),
            budget.max_work
        )));
    }

    let sets: Vec<NearOptimalSet<T>> = tau_grid
        .par_iter()
        .map(|&tau| {
            let a_tau = a.interpolate(ahat, cast::<T>(tau))?;
            near_optimal_set_with_budget(&a_tau, cast::<T>(mu), budget)
        })
        .collect::<Result<_>>()?;

    // Flatten the union with τ labels; enumeration order is deterministic.
    let mut members: Vec<(f64, &[i8], f64)> = Vec::new();
    for (gi, set) in sets.iter().enumerate() {
        for (sigma, energy) in &set.members {
            members.push((tau_grid[gi], sigma, to_f64(*energy)));
        }
    }

    let n = a.dim() as f64;
    let mut pairs = Vec::with_capacity(members.len().saturating_sub(1) * members.len() / 2);
    let mut values = Vec::with_capacity(pairs.capacity());
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let (ti, si, ei) = members[i];
            let (tj, sj, ej) = members[j];
            let dot: f64 = si
                .iter()
                .zip(sj.iter())
                .map(|(&x, &y)| (x as i32 * y as i32) as f64)
                .sum();
            let ov = (dot.abs() / n).min(1.0);
            values.push(ov);
            pairs.push(OverlapPairRow {
                tau_i: ti,
                tau_j: tj,
                energy_i: ei,
                energy_j: ej,
                overlap: ov,
            });
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite overlaps"));

    let gap = if values.is_empty() {
        None
    } else {
        detect_gap(&values, min_width)?
    };
    let histogram = Histogram::from_values(&values, bin_width)?;
    Ok(OgpReport {
        order: a.order(),
        dim: a.dim(),
        tau_grid: tau_grid.to_vec(),
        mu,
        min_width,
        eta_per_tau: sets.iter().map(|s| to_f64(s.eta_n)).collect(),
        set_sizes: sets.iter().map(|s| s.members.len()).collect(),
        overlap_values: values,
        gap,
        histogram,
        pairs,
    })
}

/// Ground-state overlaps across independent tensor pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    pub order: usize,
    pub dim: usize,
    pub pairs: u32,
    pub seed: u64,
    /// Context only: the representative is always the ground state
    /// (energy-minimal, lex-smallest), regardless of μ.
    pub mu: f64,
    pub mean_abs_overlap: f64,
    pub max_abs_overlap: f64,
    pub overlaps: Vec<f64>,
}

/// Draw independent tensor pairs, take the ground-state representative of
/// each side, and record the normalized overlaps.
pub fn chaos_check<T: Scalar>(
    order: usize,
    dim: usize,
    pairs: u32,
    mu: f64,
    seed: u64,
) -> Result<ChaosReport> {
    chaos_check_with_budget::<T>(order, dim, pairs, mu, seed, EnumerationBudget::default())
}

pub fn chaos_check_with_budget<T: Scalar>(
    order: usize,
    dim: usize,
    pairs: u32,
    mu: f64,
    seed: u64,
    budget: EnumerationBudget,
) -> Result<ChaosReport> {
    if pairs < 1 {
        return Err(Error::invalid("chaos check needs pairs >= 1"));
    }
    check_budget(order, dim, budget, "chaos enumeration")?;
    let overlaps: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let seed_a = rng::derive_seed(seed, &[rng::tag("chaos"), k as u64, 0]);
            let seed_b = rng::derive_seed(seed, &[rng::tag("chaos"), k as u64, 1]);
            let ta = CouplingTensor::<T>::sample_gaussian(order, dim, seed_a)?;
            let tb = CouplingTensor::<T>::sample_gaussian(order, dim, seed_b)?;
            let ga = brute_force_ground_state_with_budget(&ta, budget)?;
            let gb = brute_force_ground_state_with_budget(&tb, budget)?;
            let sa = spins_to_vec::<T>(ga.representative());
            let sb = spins_to_vec::<T>(gb.representative());
            Ok(to_f64(overlap(&sa, &sb)?))
        })
        .collect::<Result<_>>()?;
    let mean = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
    let max = overlaps.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(ChaosReport {
        order,
        dim,
        pairs,
        seed,
        mu,
        mean_abs_overlap: mean,
        max_abs_overlap: max,
        overlaps,
    })
}

/// Null model for overlap magnitudes: random independent uniform ±1 pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullOverlapModel {
    pub dim: usize,
    pub simulated_pairs: u32,
    pub null_mean: f64,
    pub null_std: f64,
    /// null_mean + 3·null_std/√(experiment pairs): the bar an experiment's
    /// mean overlap must stay below to be consistent with the null.
    pub threshold: f64,
}

/// Simulate the null model and derive the comparison threshold for an
/// experiment that will average `experiment_pairs` overlaps.
pub fn null_overlap_model(
    dim: usize,
    experiment_pairs: u32,
    simulated_pairs: u32,
    seed: u64,
) -> NullOverlapModel {
    let mut stream = Stream::derived(seed, &[rng::tag("null-model")]);
    let mut values = Vec::with_capacity(simulated_pairs as usize);
    for _ in 0..simulated_pairs {
        let a = stream.sign_vec(dim);
        let b = stream.sign_vec(dim);
        let dot: i64 = a.iter().zip(b.iter()).map(|(&x, &y)| (x as i64) * (y as i64)).sum();
        values.push((dot.abs() as f64) / dim as f64);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    let std = var.sqrt();
    NullOverlapModel {
        dim,
        simulated_pairs,
        null_mean: mean,
        null_std: std,
        threshold: mean + 3.0 * std / (experiment_pairs as f64).sqrt(),
    }
}
