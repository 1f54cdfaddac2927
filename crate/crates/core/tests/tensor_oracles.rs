//! Tensor operations against independent nested-loop oracles and
//! finite-difference checks.

mod common;

use common::*;
use pspin_core::rng::{derive_seed, Stream};
use pspin_core::scalar::{dot, norm_l2};
use pspin_core::tensor::CouplingTensor;

fn random_instance(p: usize, n: usize, seed: u64) -> (CouplingTensor<f64>, Vec<f64>) {
    let t = CouplingTensor::sample_gaussian(p, n, seed).unwrap();
    let u: Vec<f64> = Stream::derived(seed, &[999]).uniform_vec(n, -1.0, 1.0);
    (t, u)
}

#[test]
fn sampled_moments_match_declared_variance() {
    // p=4, N=8: 4096 entries with variance 8^{-3}.
    let t = CouplingTensor::<f64>::sample_gaussian(4, 8, 2024).unwrap();
    let entries = t.entries();
    let m = entries.len() as f64;
    let mean = entries.iter().sum::<f64>() / m;
    let var = entries.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / m;
    let sigma2 = 8.0f64.powi(-3);
    let stderr = sigma2.sqrt() / m.sqrt();
    assert!(mean.abs() <= 4.0 * stderr, "mean {mean}, 4*stderr {}", 4.0 * stderr);
    assert!((var - sigma2).abs() <= 0.1 * sigma2, "var {var} vs {sigma2}");
}

#[test]
fn contractions_match_nested_loop_oracle() {
    let mut seeds = Stream::new(11);
    for k in 0..60 {
        let p = 2 + (k % 3);
        let n = 2 + (seeds.uniform_in(0.0, 9.0) as usize).min(8);
        let (t, u) = random_instance(p, n, derive_seed(11, &[k as u64]));
        let full = t.contract_full(&u).unwrap();
        let full_ref = naive_contract_full(&t, &u);
        assert!(close_rel(full, full_ref, 1e-12), "full p={p} n={n}: {full} vs {full_ref}");
        let marg = t.contract_marginal(&u).unwrap();
        let marg_ref = naive_contract_marginal(&t, &u);
        for (a, b) in marg.iter().zip(marg_ref.iter()) {
            assert!(close_rel(*a, *b, 1e-12), "marginal p={p} n={n}");
        }
    }
}

#[test]
fn multi_contraction_matches_oracle_and_is_multilinear() {
    for k in 0..20u64 {
        let p = 2 + (k as usize % 3);
        let n = 4;
        let t = CouplingTensor::<f64>::sample_gaussian(p, n, derive_seed(5, &[k])).unwrap();
        let mut s = Stream::derived(5, &[k, 7]);
        let us: Vec<Vec<f64>> = (0..p).map(|_| s.uniform_vec(n, -1.0, 1.0)).collect();
        let refs: Vec<&[f64]> = us.iter().map(|v| v.as_slice()).collect();
        let got = t.contract_multi(&refs).unwrap();
        let expect = naive_contract_multi(&t, &refs);
        assert!(close_rel(got, expect, 1e-12));

        // additivity in slot 0
        let extra: Vec<f64> = s.uniform_vec(n, -1.0, 1.0);
        let summed: Vec<f64> = us[0].iter().zip(extra.iter()).map(|(a, b)| a + b).collect();
        let mut refs_sum = refs.clone();
        refs_sum[0] = &summed;
        let mut refs_extra = refs.clone();
        refs_extra[0] = &extra;
        let lhs = t.contract_multi(&refs_sum).unwrap();
        let rhs = t.contract_multi(&refs).unwrap() + t.contract_multi(&refs_extra).unwrap();
        assert!(close_rel(lhs, rhs, 1e-10), "additivity p={p}: {lhs} vs {rhs}");
    }
}

#[test]
fn symmetrization_preserves_contraction_value() {
    for k in 0..40u64 {
        let p = 2 + (k as usize % 3);
        let n = 3 + (k as usize % 10);
        let (t, u) = random_instance(p, n, derive_seed(21, &[k]));
        let bar = t.symmetrize();
        assert!(bar.probe_symmetry(16, k, 1e-12));
        let direct = naive_contract_full(&t, &u);
        let symmetrized = bar.contract_full(&u).unwrap();
        assert!(
            (symmetrized - direct).abs() <= 1e-9 * (1.0 + direct.abs()),
            "p={p} n={n}: {symmetrized} vs {direct}"
        );
    }
}

#[test]
fn gradient_matches_central_differences() {
    for k in 0..30u64 {
        let p = 2 + (k as usize % 3);
        let n = 3 + (k as usize % 8);
        let (t, u) = random_instance(p, n, derive_seed(31, &[k]));
        let grad = t.gradient(&u).unwrap();
        let fd = fd_gradient(|x| naive_contract_full(&t, x), &u, 1e-5);
        let diff: f64 = grad
            .iter()
            .zip(fd.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = 1.0 + fd.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(diff / scale <= 1e-6, "p={p} n={n}: fd mismatch {diff}");
    }
}

#[test]
fn inner_product_identity_on_symmetrized() {
    for k in 0..40u64 {
        let p = 2 + (k as usize % 3);
        let n = 3 + (k as usize % 6);
        let (t, u) = random_instance(p, n, derive_seed(41, &[k]));
        let bar = t.symmetrize();
        let lhs = dot(&u, &bar.contract_marginal(&u).unwrap());
        let rhs = bar.contract_full(&u).unwrap();
        assert!(close_rel(lhs, rhs, 1e-10), "p={p} n={n}: {lhs} vs {rhs}");
    }
}

#[test]
fn interpolation_preserves_marginal_variance() {
    // coefficients satisfy (1−τ)+τ = 1, so A_τ keeps the entry variance
    let p = 2;
    let n = 64; // 4096 entries
    let a = CouplingTensor::<f64>::sample_gaussian(p, n, 51).unwrap();
    let b = CouplingTensor::<f64>::sample_gaussian(p, n, 52).unwrap();
    for &tau in &[0.3, 0.7] {
        let mixed = a.interpolate(&b, tau).unwrap();
        let entries = mixed.entries();
        let m = entries.len() as f64;
        let mean = entries.iter().sum::<f64>() / m;
        let var = entries.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / m;
        let expect = (n as f64).powi(-(p as i32 - 1));
        assert!((var - expect).abs() <= 0.1 * expect, "tau={tau}: var {var} vs {expect}");
    }
}

#[test]
fn sampling_is_bit_identical_within_build() {
    let a = CouplingTensor::<f64>::sample_gaussian(3, 7, 33).unwrap();
    let b = CouplingTensor::<f64>::sample_gaussian(3, 7, 33).unwrap();
    let bits_a: Vec<u64> = a.entries().iter().map(|x| x.to_bits()).collect();
    let bits_b: Vec<u64> = b.entries().iter().map(|x| x.to_bits()).collect();
    assert_eq!(bits_a, bits_b);
    let c = CouplingTensor::<f64>::sample_gaussian(3, 7, 34).unwrap();
    assert_ne!(a.entries(), c.entries());
}

#[test]
fn op_norm_lower_bound_matches_sphere_grid_at_n3() {
    // Symmetric order-4 tensor on R^3: the operator norm equals the max of
    // |A(u,u,u,u)| over the unit sphere (symmetric multilinear forms attain
    // their norm on the diagonal), which a fine angular grid approximates.
    let t = CouplingTensor::<f64>::sample_gaussian(4, 3, 61)
        .unwrap()
        .symmetrize();
    let mut grid_max = 0.0f64;
    let (n_theta, n_phi) = (180, 360);
    for it in 0..=n_theta {
        let theta = std::f64::consts::PI * it as f64 / n_theta as f64;
        for ip in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_phi as f64;
            let u = [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ];
            grid_max = grid_max.max(naive_contract_full(&t, &u).abs());
        }
    }
    let rep = t.norms(6, 60, 3).unwrap();
    assert!(
        (rep.op_lower - grid_max).abs() <= 0.01 * grid_max,
        "op_lower {} vs grid {grid_max}",
        rep.op_lower
    );
    assert!(rep.op_lower <= rep.op_upper);
}

#[test]
fn norm_bracket_ordering_at_larger_sizes() {
    let t = CouplingTensor::<f64>::sample_gaussian(4, 8, 62).unwrap();
    let rep = t.norms(3, 20, 4).unwrap();
    assert!(rep.op_lower <= rep.op_upper);
    assert!(rep.op_upper <= rep.frobenius * (1.0 + 1e-15));
}

#[test]
fn c2_estimate_respects_triangle_inequality_bound() {
    // ĉ₂ ≤ (p−1)·‖A‖_op-upper·(M√N)^{p−2}
    let p = 4;
    let n = 6;
    let m = 2.0;
    let t = CouplingTensor::<f64>::sample_gaussian(p, n, 63).unwrap();
    let est = t.estimate_c2(m, 200, 5).unwrap();
    let rep = t.norms(2, 10, 6).unwrap();
    let bound = (p as f64 - 1.0) * rep.op_upper * (m * (n as f64).sqrt()).powi(p as i32 - 2);
    assert!(
        est.c2_hat <= bound * (1.0 + 1e-9),
        "c2 {} vs bound {bound}",
        est.c2_hat
    );
}

#[test]
fn energy_is_normalized_contraction() {
    let (t, u) = random_instance(3, 7, 71);
    let e = t.energy(&u).unwrap();
    let full = t.contract_full(&u).unwrap();
    assert_eq!(e, full / 7.0);
    assert!(norm_l2(&u) > 0.0);
}
