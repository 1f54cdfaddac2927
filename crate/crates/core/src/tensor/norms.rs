//! Norm brackets and Lipschitz-constant estimation.
//!
//! The exact operator norm of an order-p tensor is intractable for p ≥ 3, so
//! [`CouplingTensor::norms`] reports a bracket: alternating maximization of
//! the multilinear Rayleigh value gives a feasible lower bound, and the
//! Frobenius norm is a certified upper bound (Cauchy-Schwarz).

use serde::{Deserialize, Serialize};

use super::contract;
use super::CouplingTensor;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{cast, norm_l2, to_f64, Scalar};

/// Frobenius norm plus an operator-norm bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub frobenius: f64,
    /// Best feasible multilinear Rayleigh value found (certified lower bound).
    pub op_lower: f64,
    /// Certified upper bound; equals the Frobenius norm.
    pub op_upper: f64,
    /// op_lower·N^{p/2−1}: the empirical scaling constant for random
    /// tensors, whose theoretical value is left implicit.
    pub op_lower_scaled: f64,
    pub restarts_used: u32,
}

/// Sampled lower estimate of c₂(A) = sup ‖A(·,u)−A(·,v)‖₂/‖u−v‖₂ over the
/// box [−M,M]^N. An estimate, not a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub c2_hat: f64,
    pub samples: u32,
    pub box_bound_m: f64,
}

impl<T: Scalar> CouplingTensor<T> {
    /// Operator-norm bracket via random-restart alternating maximization.
    pub fn norms(&self, restarts: u32, iters: u32, seed: u64) -> Result<NormReport> {
        if restarts < 1 || iters < 1 {
            return Err(Error::invalid("norms requires restarts >= 1 and iters >= 1"));
        }
        let frobenius = to_f64(self.frobenius());
        let p = self.order();
        let n = self.dim();
        let mut best = 0.0f64;
        for r in 0..restarts {
            let mut stream = Stream::derived(seed, &[rng::tag("op-norm"), r as u64]);
            let mut us: Vec<Vec<T>> = Vec::with_capacity(p);
            for _ in 0..p {
                let mut v: Vec<T> = stream.normal_vec(n, 1.0);
                let nv = norm_l2(&v);
                if nv > T::zero() {
                    for x in &mut v {
                        *x /= nv;
                    }
                }
                us.push(v);
            }
            for _ in 0..iters {
                for slot in 0..p {
                    let refs: Vec<&[T]> = us.iter().map(|u| u.as_slice()).collect();
                    let y = contract::slot_marginal(self.entries(), n, p, slot, &refs);
                    let ny = norm_l2(&y);
                    if ny > T::zero() {
                        us[slot] = y.iter().map(|&x| x / ny).collect();
                    }
                }
            }
            let refs: Vec<&[T]> = us.iter().map(|u| u.as_slice()).collect();
            let val = to_f64(self.contract_multi(&refs)?).abs();
            if val > best {
                best = val;
            }
        }
        let op_lower = best.min(frobenius);
        Ok(NormReport {
            frobenius,
            // keep the bracket ordered even when maximization hits the
            // Frobenius value up to rounding (rank-one tensors)
            op_lower,
            op_upper: frobenius,
            op_lower_scaled: op_lower * (n as f64).powf(p as f64 / 2.0 - 1.0),
            restarts_used: restarts,
        })
    }

    /// Sampled estimate of c₂ over [−M,M]^N, alternating independent pairs
    /// with adversarial local pairs v = u + ε·direction.
    pub fn estimate_c2(&self, m: f64, samples: u32, seed: u64) -> Result<LipschitzEstimate> {
        if m <= 0.0 {
            return Err(Error::invalid("box bound M must be positive"));
        }
        if samples < 1 {
            return Err(Error::invalid("estimate_c2 requires samples >= 1"));
        }
        let n = self.dim();
        let mut stream = Stream::derived(seed, &[rng::tag("c2")]);
        let eps = 1e-3 * m;
        let mbound = cast::<T>(m);
        let mut c2_hat = 0.0f64;
        for k in 0..samples {
            let u: Vec<T> = stream.uniform_vec(n, -m, m);
            let v: Vec<T> = if k % 2 == 1 {
                let dir: Vec<f64> = {
                    let raw: Vec<f64> = (0..n).map(|_| stream.standard_normal()).collect();
                    let nn = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                    raw.iter().map(|x| x / nn.max(f64::MIN_POSITIVE)).collect()
                };
                u.iter()
                    .zip(dir.iter())
                    .map(|(&ui, &d)| {
                        let x = ui + cast::<T>(eps * d);
                        x.max(-mbound).min(mbound)
                    })
                    .collect()
            } else {
                stream.uniform_vec(n, -m, m)
            };
            let du = crate::scalar::dist_l2(&u, &v);
            if du <= T::zero() {
                continue;
            }
            let yu = self.contract_marginal(&u)?;
            let yv = self.contract_marginal(&v)?;
            let dy = crate::scalar::dist_l2(&yu, &yv);
            let q = to_f64(dy / du);
            if q > c2_hat {
                c2_hat = q;
            }
        }
        Ok(LipschitzEstimate {
            c2_hat,
            samples,
            box_bound_m: m,
        })
    }
}
