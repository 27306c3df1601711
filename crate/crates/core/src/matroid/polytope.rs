use super::Matroid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::ElementSet;

/// Largest ground set accepted by the subset enumeration.
pub const MAX_POLYTOPE_ELEMENTS: usize = 20;

/// `min_S rank(S) - x(S)` over all subsets; nonnegative iff `x` is in the
/// matroid polytope.
///
/// Each subset extends the greedy basis of the subset without its highest
/// element, so the whole table costs one oracle call per subset.
pub fn polytope_slack<M, S>(m: &M, x: &[S]) -> Result<S>
where
    M: Matroid + ?Sized,
    S: Scalar,
{
    let n = m.ground_size();
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if n > MAX_POLYTOPE_ELEMENTS {
        return Err(Error::Unsupported(format!(
            "polytope membership enumerates subsets; {n} elements exceeds {MAX_POLYTOPE_ELEMENTS}"
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_unit_interval()) {
        return Err(Error::InvalidArgument(format!(
            "coordinate {i} is {:?}, outside [0, 1]",
            x[i]
        )));
    }
    let mut basis = vec![0u32; 1 << n];
    let mut sums: Vec<S> = Vec::with_capacity(1 << n);
    sums.push(S::zero());
    let mut slack = S::zero();
    for mask in 1usize..1 << n {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let candidate = basis[rest] | 1 << top;
        basis[mask] = if m.independent(&ElementSet::from_mask(n, u64::from(candidate))) {
            candidate
        } else {
            basis[rest]
        };
        let sum = sums[rest].clone() + x[top].clone();
        let gap = S::from_count(basis[mask].count_ones() as usize) - sum.clone();
        if gap < slack {
            slack = gap;
        }
        sums.push(sum);
    }
    Ok(slack)
}

/// Exact membership of `x` in `{x : x(S) <= rank(S) for all S}`.
pub fn in_polytope<M, S>(m: &M, x: &[S]) -> Result<bool>
where
    M: Matroid + ?Sized,
    S: Scalar,
{
    Ok(polytope_slack(m, x)? >= S::zero())
}
