//! Dense order-p coupling tensors.
//!
//! A [`CouplingTensor`] holds all N^p couplings in a row-major array with no
//! symmetry compression; at desk scale the memory cost is small and the
//! contraction code stays simple. Values are immutable after construction, so
//! every operation here is a pure function that is safe to call concurrently
//! on shared tensors.

mod contract;
mod io;
mod norms;

pub use io::{load_tensor, save_tensor};
pub use norms::{LipschitzEstimate, NormReport};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{cast, to_f64, Scalar};

/// Refuse to materialize tensors above this many entries unless the caller
/// raises the budget explicitly.
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 31;

/// How a tensor's entries came to be; enough to regenerate sampled tensors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Sampled {
        seed: u64,
        generator_id: String,
        variance: f64,
    },
    /// √(1−τ)·A + √τ·Â of two parents, identified by their seeds when known.
    Interpolated {
        seed_a: Option<u64>,
        seed_b: Option<u64>,
        tau: f64,
    },
}

/// Dense order-p coupling tensor over R^N.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTensor<T> {
    order: usize,
    dim: usize,
    entries: Vec<T>,
    is_symmetric: bool,
    provenance: Option<Provenance>,
}

fn entry_count(order: usize, dim: usize, budget: usize) -> Result<usize> {
    let total = (dim as u128)
        .checked_pow(order as u32)
        .ok_or_else(|| Error::invalid(format!("{dim}^{order} overflows")))?;
    if total > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "tensor needs {total} entries, budget is {budget}"
        )));
    }
    Ok(total as usize)
}

fn validate_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {order}")));
    }
    if dim < 1 {
        return Err(Error::invalid("tensor dimension must be >= 1"));
    }
    Ok(())
}

impl<T: Scalar> CouplingTensor<T> {
    /// Build from explicit entries in row-major lexicographic index order.
    pub fn from_entries(
        order: usize,
        dim: usize,
        entries: Vec<T>,
        is_symmetric: bool,
    ) -> Result<Self> {
        validate_shape(order, dim)?;
        let expected = entry_count(order, dim, usize::MAX)?;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(CouplingTensor {
            order,
            dim,
            entries,
            is_symmetric,
            provenance: None,
        })
    }

    /// All-zero tensor (symmetric by construction).
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        validate_shape(order, dim)?;
        let total = entry_count(order, dim, DEFAULT_ENTRY_BUDGET)?;
        Ok(CouplingTensor {
            order,
            dim,
            entries: vec![T::zero(); total],
            is_symmetric: true,
            provenance: None,
        })
    }

    /// Sample i.i.d. centered Gaussian couplings with variance N^{−(p−1)}.
    ///
    /// Deterministic in (p, N, seed) for a fixed build; the pipeline is
    /// recorded as [`rng::GENERATOR_ID`] in the provenance.
    pub fn sample_gaussian(order: usize, dim: usize, seed: u64) -> Result<Self> {
        Self::sample_gaussian_with_budget(order, dim, seed, DEFAULT_ENTRY_BUDGET)
    }

    pub fn sample_gaussian_with_budget(
        order: usize,
        dim: usize,
        seed: u64,
        budget: usize,
    ) -> Result<Self> {
        validate_shape(order, dim)?;
        let total = entry_count(order, dim, budget)?;
        let variance = (dim as f64).powi(-(order as i32 - 1));
        let sigma = variance.sqrt();
        let mut stream = Stream::derived(seed, &[rng::tag("tensor"), order as u64, dim as u64]);
        let entries = stream.normal_vec(total, sigma);
        Ok(CouplingTensor {
            order,
            dim,
            entries,
            is_symmetric: false,
            provenance: Some(Provenance::Sampled {
                seed,
                generator_id: rng::GENERATOR_ID.to_string(),
                variance,
            }),
        })
    }

    /// Regenerate a sampled tensor from its recorded provenance.
    pub fn from_provenance(order: usize, dim: usize, provenance: &Provenance) -> Result<Self> {
        match provenance {
            Provenance::Sampled { seed, generator_id, .. } => {
                if generator_id != rng::GENERATOR_ID {
                    return Err(Error::invalid(format!(
                        "unknown generator id {generator_id} (this build provides {})",
                        rng::GENERATOR_ID
                    )));
                }
                Self::sample_gaussian(order, dim, *seed)
            }
            Provenance::Interpolated { .. } => Err(Error::invalid(
                "cannot regenerate an interpolated tensor from provenance alone",
            )),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub(crate) fn with_provenance(mut self, provenance: Option<Provenance>) -> Self {
        self.provenance = provenance;
        self
    }

    pub(crate) fn mark_symmetric(mut self) -> Self {
        self.is_symmetric = true;
        self
    }

    /// Linear offset of a multi-index.
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Entry at a multi-index.
    pub fn get(&self, idx: &[usize]) -> T {
        self.entries[self.linear_index(idx)]
    }

    fn check_vector(&self, u: &[T]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("vector entries must be finite"));
        }
        Ok(())
    }

    /// Full inner tensor product A(u) = Σ A_{i₁..i_p} u_{i₁}···u_{i_p}.
    pub fn contract_full(&self, u: &[T]) -> Result<T> {
        self.check_vector(u)?;
        Ok(contract::full_contraction(&self.entries, u, self.order))
    }

    /// Marginal vector A(·,u): y_i = Σ A_{i,i₂..i_p} u_{i₂}···u_{i_p}.
    pub fn contract_marginal(&self, u: &[T]) -> Result<Vec<T>> {
        self.check_vector(u)?;
        let factors = vec![u; self.order - 1];
        let w = contract::outer_weight(&factors);
        Ok(contract::marginal_with_weight(&self.entries, self.dim, &w))
    }

    /// Marginal with distinct vectors in slots 2..p.
    pub fn contract_marginal_multi(&self, us: &[&[T]]) -> Result<Vec<T>> {
        if us.len() != self.order - 1 {
            return Err(Error::invalid(format!(
                "need {} slot vectors, got {}",
                self.order - 1,
                us.len()
            )));
        }
        for u in us {
            self.check_vector(u)?;
        }
        let w = contract::outer_weight(us);
        Ok(contract::marginal_with_weight(&self.entries, self.dim, &w))
    }

    /// Full multilinear form A(u₁,…,u_p).
    pub fn contract_multi(&self, us: &[&[T]]) -> Result<T> {
        if us.len() != self.order {
            return Err(Error::invalid(format!(
                "need {} slot vectors, got {}",
                self.order,
                us.len()
            )));
        }
        for u in us {
            self.check_vector(u)?;
        }
        Ok(contract::multi_contraction(&self.entries, us))
    }

    /// Normalized objective A(u)/N.
    pub fn energy(&self, u: &[T]) -> Result<T> {
        Ok(self.contract_full(u)? / cast::<T>(self.dim as f64))
    }

    /// Symmetrized tensor Ā with Ā_idx = (1/p!) Σ_π A_{π(idx)}.
    ///
    /// Ā(u) = A(u) for every u. Tensors already flagged symmetric are
    /// returned as-is so the fixed point is exact.
    pub fn symmetrize(&self) -> Self {
        if self.is_symmetric {
            return self.clone();
        }
        let perms: Vec<Vec<usize>> = (0..self.order).permutations(self.order).collect();
        let factorial = cast::<T>(perms.len() as f64);
        let mut out = vec![T::zero(); self.entries.len()];
        let mut idx = vec![0usize; self.order];
        for slot in out.iter_mut() {
            let mut sum = T::zero();
            for perm in &perms {
                let lin = perm.iter().fold(0, |acc, &k| acc * self.dim + idx[k]);
                sum += self.entries[lin];
            }
            *slot = sum / factorial;
            // advance the odometer
            for d in (0..self.order).rev() {
                idx[d] += 1;
                if idx[d] < self.dim {
                    break;
                }
                idx[d] = 0;
            }
        }
        CouplingTensor {
            order: self.order,
            dim: self.dim,
            entries: out,
            is_symmetric: true,
            provenance: self.provenance.clone(),
        }
    }

    /// Spot-check the symmetry invariant with random permuted-index probes.
    pub fn probe_symmetry(&self, probes: usize, seed: u64, tol: f64) -> bool {
        let mut stream = Stream::derived(seed, &[rng::tag("symmetry-probe")]);
        let perms: Vec<Vec<usize>> = (0..self.order).permutations(self.order).collect();
        for _ in 0..probes {
            let idx: Vec<usize> = (0..self.order)
                .map(|_| (stream.uniform_in(0.0, self.dim as f64) as usize).min(self.dim - 1))
                .collect();
            let base = to_f64(self.get(&idx));
            for perm in &perms {
                let pidx: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
                if (to_f64(self.get(&pidx)) - base).abs() > tol * (1.0 + base.abs()) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact gradient of u ↦ A(u); equals p·Ā(·,u) for the symmetrized Ā.
    ///
    /// For unsymmetrized tensors the p slot marginals are summed directly,
    /// which is the same value without materializing Ā.
    pub fn gradient(&self, u: &[T]) -> Result<Vec<T>> {
        self.check_vector(u)?;
        if self.is_symmetric {
            let mut y = self.contract_marginal(u)?;
            let pf = cast::<T>(self.order as f64);
            for v in &mut y {
                *v *= pf;
            }
            Ok(y)
        } else {
            let us: Vec<&[T]> = vec![u; self.order];
            let mut acc = vec![T::zero(); self.dim];
            for slot in 0..self.order {
                let ys = contract::slot_marginal(&self.entries, self.dim, self.order, slot, &us);
                for (a, b) in acc.iter_mut().zip(ys) {
                    *a += b;
                }
            }
            Ok(acc)
        }
    }

    /// Interpolated tensor A_τ = √(1−τ)·A + √τ·other, entrywise.
    pub fn interpolate(&self, other: &Self, tau: T) -> Result<Self> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::invalid("interpolation requires equal shapes"));
        }
        let zero = T::zero();
        let one = T::one();
        if tau < zero || tau > one {
            return Err(Error::invalid(format!("tau must be in [0,1], got {tau}")));
        }
        let ca = (one - tau).sqrt();
        let cb = tau.sqrt();
        let entries: Vec<T> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| ca * a + cb * b)
            .collect();
        let seed_of = |t: &Self| match t.provenance {
            Some(Provenance::Sampled { seed, .. }) => Some(seed),
            _ => None,
        };
        Ok(CouplingTensor {
            order: self.order,
            dim: self.dim,
            entries,
            is_symmetric: self.is_symmetric && other.is_symmetric,
            provenance: Some(Provenance::Interpolated {
                seed_a: seed_of(self),
                seed_b: seed_of(other),
                tau: to_f64(tau),
            }),
        })
    }

    /// Frobenius norm ‖A‖₂.
    pub fn frobenius(&self) -> T {
        let mut acc = T::zero();
        for &a in &self.entries {
            acc += a * a;
        }
        acc.sqrt()
    }
}

/// Frobenius norm of the difference ‖A − B‖₂ (a certified upper bound on the
/// operator norm of the difference).
pub fn frobenius_distance<T: Scalar>(a: &CouplingTensor<T>, b: &CouplingTensor<T>) -> Result<T> {
    if a.order != b.order || a.dim != b.dim {
        return Err(Error::invalid("frobenius distance requires equal shapes"));
    }
    let mut acc = T::zero();
    for (&x, &y) in a.entries.iter().zip(b.entries.iter()) {
        let d = x - y;
        acc += d * d;
    }
    Ok(acc.sqrt())
}

/// Convert a ±1 spin vector into scalars for contraction.
pub fn spins_to_vec<T: Scalar>(sigma: &[i8]) -> Vec<T> {
    sigma.iter().map(|&s| cast::<T>(s as f64)).collect()
}
