//! Independent reference implementations used as oracles by the integration
//! and acceptance tests. Everything here evaluates tensors by decoding the
//! linear index per entry and looping, deliberately different code paths
//! from the library kernels they check.

#![allow(dead_code)]

use pspin_core::tensor::{spins_to_vec, CouplingTensor};

/// Decode a linear offset into its multi-index.
pub fn decode(mut lin: usize, order: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0usize; order];
    for d in (0..order).rev() {
        idx[d] = lin % dim;
        lin /= dim;
    }
    idx
}

/// Nested-loop full contraction Σ A_idx Π u.
pub fn naive_contract_full(tensor: &CouplingTensor<f64>, u: &[f64]) -> f64 {
    let (p, n) = (tensor.order(), tensor.dim());
    let mut acc = 0.0;
    for (lin, &a) in tensor.entries().iter().enumerate() {
        let idx = decode(lin, p, n);
        let mut term = a;
        for &i in &idx {
            term *= u[i];
        }
        acc += term;
    }
    acc
}

/// Nested-loop marginal: y_i = Σ A_{i,rest} Π u over the trailing slots.
pub fn naive_contract_marginal(tensor: &CouplingTensor<f64>, u: &[f64]) -> Vec<f64> {
    let (p, n) = (tensor.order(), tensor.dim());
    let mut y = vec![0.0; n];
    for (lin, &a) in tensor.entries().iter().enumerate() {
        let idx = decode(lin, p, n);
        let mut term = a;
        for &i in &idx[1..] {
            term *= u[i];
        }
        y[idx[0]] += term;
    }
    y
}

/// Nested-loop multilinear form with one vector per slot.
pub fn naive_contract_multi(tensor: &CouplingTensor<f64>, us: &[&[f64]]) -> f64 {
    let (p, n) = (tensor.order(), tensor.dim());
    let mut acc = 0.0;
    for (lin, &a) in tensor.entries().iter().enumerate() {
        let idx = decode(lin, p, n);
        let mut term = a;
        for (slot, &i) in idx.iter().enumerate() {
            term *= us[slot][i];
        }
        acc += term;
    }
    acc
}

/// Central finite differences of a scalar function.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, point: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(point.len());
    let mut work = point.to_vec();
    for i in 0..point.len() {
        work[i] = point[i] + h;
        let plus = f(&work);
        work[i] = point[i] - h;
        let minus = f(&work);
        work[i] = point[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

/// Spin configuration for a state index: bit b set means σ_b = −1.
pub fn state_to_spins(state: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|b| if (state >> b) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Ground state by evaluating every configuration fresh (no deltas), using
/// the library contraction so that exact-tie semantics agree.
pub fn naive_ground_state(tensor: &CouplingTensor<f64>) -> (f64, Vec<Vec<i8>>) {
    let n = tensor.dim();
    let mut best = f64::INFINITY;
    let mut minimizers: Vec<Vec<i8>> = Vec::new();
    for state in 0..(1u64 << n) {
        let sigma = state_to_spins(state, n);
        let v = spins_to_vec::<f64>(&sigma);
        let e = tensor.contract_full(&v).unwrap();
        if e < best {
            best = e;
            minimizers.clear();
            minimizers.push(sigma);
        } else if e == best {
            minimizers.push(sigma);
        }
    }
    minimizers.sort();
    (best / n as f64, minimizers)
}

/// μ-near-optimal set by filtering every configuration fresh.
pub fn naive_near_optimal(tensor: &CouplingTensor<f64>, mu: f64) -> (f64, Vec<(Vec<i8>, f64)>) {
    let n = tensor.dim();
    let (eta, _) = naive_ground_state(tensor);
    let threshold = eta + mu;
    let mut members: Vec<(Vec<i8>, f64)> = Vec::new();
    for state in 0..(1u64 << n) {
        let sigma = state_to_spins(state, n);
        let v = spins_to_vec::<f64>(&sigma);
        let e = tensor.contract_full(&v).unwrap() / n as f64;
        if e <= threshold {
            members.push((sigma, e));
        }
    }
    members.sort_by(|(sa, ea), (sb, eb)| ea.partial_cmp(eb).unwrap().then_with(|| sa.cmp(sb)));
    (eta, members)
}

/// Quadratic-scan gap reference: every pair of distinct observed values with
/// an empty open interior, interior endpoints, and width ≥ min_width; widest
/// wins, ties to the smaller left endpoint.
pub fn quadratic_gap_scan(values: &[f64], min_width: f64) -> Option<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            let (a, b) = (sorted[i], sorted[j]);
            if sorted.iter().any(|&v| v > a && v < b) {
                continue;
            }
            if a <= 0.0 || b >= 1.0 || b - a < min_width {
                continue;
            }
            let take = match best {
                None => true,
                Some((ba, bb)) => b - a > bb - ba || ((b - a) == (bb - ba) && a < ba),
            };
            if take {
                best = Some((a, b));
            }
        }
    }
    best
}

/// Direct TAP iteration U^t = tanh(β·A(·,U^{t−1}) + a_{t−2}·U^{t−2}) with
/// U^0 = q·1 and U^{−1} = 0, built on the decode-based marginal. `a` is
/// aligned as (a_{−1}, a_0, …).
pub fn reference_tap_steps(
    tensor: &CouplingTensor<f64>,
    beta: f64,
    q: f64,
    a: &[f64],
    horizon: usize,
    m: f64,
) -> Vec<Vec<f64>> {
    let n = tensor.dim();
    let mut steps = vec![vec![q; n]];
    for t in 1..=horizon {
        let y = naive_contract_marginal(tensor, &steps[t - 1]);
        let mut next = vec![0.0; n];
        for i in 0..n {
            let corr = if t >= 2 { a[t - 1] * steps[t - 2][i] } else { 0.0 };
            next[i] = (beta * y[i] + corr).tanh().clamp(-m, m);
        }
        steps.push(next);
    }
    steps
}

/// Step-by-step sign rounding reference: multipliers enumerated by explicit
/// index tuples with a distinctness filter.
pub fn reference_sign_round(tensor: &CouplingTensor<f64>, v: &[f64]) -> (Vec<i8>, Vec<f64>) {
    let sym = tensor.symmetrize();
    let (p, n) = (sym.order(), sym.dim());
    let mut z = v.to_vec();
    let mut sigma = vec![0i8; n];
    let mut multipliers = Vec::with_capacity(n);
    for j in 0..n {
        let mut m_j = 0.0;
        let tuples = n.pow(p as u32 - 1);
        for t in 0..tuples {
            let idx = decode(t, p - 1, n);
            if idx.contains(&j) {
                continue;
            }
            let mut distinct = true;
            for a in 0..idx.len() {
                for b in (a + 1)..idx.len() {
                    if idx[a] == idx[b] {
                        distinct = false;
                    }
                }
            }
            if !distinct {
                continue;
            }
            let mut full = vec![j];
            full.extend_from_slice(&idx);
            let mut term = sym.get(&full);
            for &i in &idx {
                term *= z[i];
            }
            m_j += term;
        }
        let s = if m_j > 0.0 { -1.0 } else { 1.0 };
        multipliers.push(m_j);
        z[j] = s;
        sigma[j] = s as i8;
    }
    (sigma, multipliers)
}

/// Monolithic naive OGP reference. Mirrors the report fields that the
/// scanner produces, computed with the naive enumeration path end to end.
pub struct NaiveOgp {
    pub eta_per_tau: Vec<f64>,
    pub set_sizes: Vec<usize>,
    pub overlap_values: Vec<f64>,
    pub gap: Option<(f64, f64)>,
    pub histogram_counts: Vec<u64>,
    pub pair_rows: Vec<(f64, f64, f64, f64, f64)>,
}

pub fn naive_ogp(
    a: &CouplingTensor<f64>,
    ahat: &CouplingTensor<f64>,
    tau_grid: &[f64],
    mu: f64,
    min_width: f64,
    bin_width: f64,
) -> NaiveOgp {
    let n = a.dim();
    let mut eta_per_tau = Vec::new();
    let mut set_sizes = Vec::new();
    let mut members: Vec<(f64, Vec<i8>, f64)> = Vec::new();
    for &tau in tau_grid {
        // independent entrywise interpolation
        let entries: Vec<f64> = a
            .entries()
            .iter()
            .zip(ahat.entries().iter())
            .map(|(&x, &y)| (1.0 - tau).sqrt() * x + tau.sqrt() * y)
            .collect();
        let a_tau = CouplingTensor::from_entries(a.order(), n, entries, false).unwrap();
        let (eta, set) = naive_near_optimal(&a_tau, mu);
        eta_per_tau.push(eta);
        set_sizes.push(set.len());
        for (sigma, e) in set {
            members.push((tau, sigma, e));
        }
    }
    let mut overlap_values = Vec::new();
    let mut pair_rows = Vec::new();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let dot: f64 = members[i]
                .1
                .iter()
                .zip(members[j].1.iter())
                .map(|(&x, &y)| (x as i32 * y as i32) as f64)
                .sum();
            let ov = (dot.abs() / n as f64).min(1.0);
            overlap_values.push(ov);
            pair_rows.push((members[i].0, members[j].0, members[i].2, members[j].2, ov));
        }
    }
    overlap_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let gap = if overlap_values.is_empty() {
        None
    } else {
        quadratic_gap_scan(&overlap_values, min_width)
    };
    let bins = (1.0 / bin_width).ceil() as usize;
    let mut histogram_counts = vec![0u64; bins];
    for &v in &overlap_values {
        histogram_counts[((v / bin_width) as usize).min(bins - 1)] += 1;
    }
    NaiveOgp {
        eta_per_tau,
        set_sizes,
        overlap_values,
        gap,
        histogram_counts,
        pair_rows,
    }
}

/// Pairwise-distinct-index part of the objective: Σ over tuples with no
/// repeated coordinate of A_idx Π z.
pub fn distinct_index_part(tensor: &CouplingTensor<f64>, z: &[f64]) -> f64 {
    let (p, n) = (tensor.order(), tensor.dim());
    let mut acc = 0.0;
    for (lin, &a) in tensor.entries().iter().enumerate() {
        let idx = decode(lin, p, n);
        let mut distinct = true;
        for i in 0..p {
            for j in (i + 1)..p {
                if idx[i] == idx[j] {
                    distinct = false;
                }
            }
        }
        if !distinct {
            continue;
        }
        let mut term = a;
        for &i in &idx {
            term *= z[i];
        }
        acc += term;
    }
    acc
}

/// Relative-error helper: |a − b| ≤ tol·(1 + |b|).
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
