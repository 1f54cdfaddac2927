//! Contraction kernels over a dense row-major entry slice.
//!
//! Every kernel sums in a fixed order (lexicographic in the multi-index),
//! so results are reproducible run to run and independent of thread count:
//! the only parallel split is over the free output coordinate, and each
//! coordinate's inner sum stays sequential.

use rayon::prelude::*;

use crate::scalar::Scalar;

/// Work size above which the marginal contraction splits rows across threads.
const PAR_THRESHOLD: usize = 1 << 15;

/// Full contraction Σ A_{i₁..i_p} u_{i₁}···u_{i_p}, lexicographic order.
pub(crate) fn full_contraction<T: Scalar>(entries: &[T], u: &[T], order: usize) -> T {
    let mut acc = T::zero();
    full_rec(entries, u, order, T::one(), &mut acc);
    acc
}

fn full_rec<T: Scalar>(block: &[T], u: &[T], depth_left: usize, prefix: T, acc: &mut T) {
    if depth_left == 1 {
        for (&a, &ui) in block.iter().zip(u.iter()) {
            *acc += prefix * a * ui;
        }
        return;
    }
    let chunk = block.len() / u.len();
    for (sub, &ui) in block.chunks_exact(chunk).zip(u.iter()) {
        full_rec(sub, u, depth_left - 1, prefix * ui, acc);
    }
}

/// Multilinear form Σ A_{i₁..i_p} u¹_{i₁}···u^p_{i_p} with one vector per slot.
pub(crate) fn multi_contraction<T: Scalar>(entries: &[T], us: &[&[T]]) -> T {
    let mut acc = T::zero();
    multi_rec(entries, us, 0, T::one(), &mut acc);
    acc
}

fn multi_rec<T: Scalar>(block: &[T], us: &[&[T]], depth: usize, prefix: T, acc: &mut T) {
    if depth == us.len() - 1 {
        for (&a, &ui) in block.iter().zip(us[depth].iter()) {
            *acc += prefix * a * ui;
        }
        return;
    }
    let chunk = block.len() / us[depth].len();
    for (sub, &ui) in block.chunks_exact(chunk).zip(us[depth].iter()) {
        multi_rec(sub, us, depth + 1, prefix * ui, acc);
    }
}

/// Row-major outer product of the given factor vectors:
/// w[lin(i₁..i_k)] = f¹_{i₁}···f^k_{i_k}.
pub(crate) fn outer_weight<T: Scalar>(factors: &[&[T]]) -> Vec<T> {
    let mut w = vec![T::one()];
    for f in factors {
        let mut next = Vec::with_capacity(w.len() * f.len());
        for &wj in &w {
            for &fi in f.iter() {
                next.push(wj * fi);
            }
        }
        w = next;
    }
    w
}

/// Marginal y_i = ⟨row_i, w⟩ where row_i is the slab with first index i.
/// Rows may be processed in parallel; each dot product is sequential.
pub(crate) fn marginal_with_weight<T: Scalar>(entries: &[T], dim: usize, w: &[T]) -> Vec<T> {
    let stride = w.len();
    let dot_row = |row: &[T]| {
        let mut acc = T::zero();
        for (&a, &wj) in row.iter().zip(w.iter()) {
            acc += a * wj;
        }
        acc
    };
    if entries.len() >= PAR_THRESHOLD {
        (0..dim)
            .into_par_iter()
            .map(|i| dot_row(&entries[i * stride..(i + 1) * stride]))
            .collect()
    } else {
        (0..dim)
            .map(|i| dot_row(&entries[i * stride..(i + 1) * stride]))
            .collect()
    }
}

/// Contraction leaving slot `slot` free:
/// out[k] = Σ over indices with i_slot = k of A_idx Π_{j≠slot} us[j]_{i_j}.
pub(crate) fn slot_marginal<T: Scalar>(
    entries: &[T],
    dim: usize,
    order: usize,
    slot: usize,
    us: &[&[T]],
) -> Vec<T> {
    debug_assert!(slot < order);
    debug_assert_eq!(us.len(), order);
    let mut out = vec![T::zero(); dim];
    slot_rec(entries, dim, order, slot, us, 0, T::one(), 0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn slot_rec<T: Scalar>(
    block: &[T],
    dim: usize,
    order: usize,
    slot: usize,
    us: &[&[T]],
    depth: usize,
    prefix: T,
    out_idx: usize,
    out: &mut [T],
) {
    if depth == order - 1 {
        if slot == depth {
            for (k, &a) in block.iter().enumerate() {
                out[k] += prefix * a;
            }
        } else {
            let f = us[depth];
            for (&a, &fi) in block.iter().zip(f.iter()) {
                out[out_idx] += prefix * a * fi;
            }
        }
        return;
    }
    let chunk = block.len() / dim;
    for (i, sub) in block.chunks_exact(chunk).enumerate() {
        if slot == depth {
            slot_rec(sub, dim, order, slot, us, depth + 1, prefix, i, out);
        } else {
            slot_rec(
                sub,
                dim,
                order,
                slot,
                us,
                depth + 1,
                prefix * us[depth][i],
                out_idx,
                out,
            );
        }
    }
}
