// SPDX-License-Identifier: Apache-2.0

//! Ordered parallel evaluation with a fixed reduction tree.
//!
//! Work items are evaluated on the rayon pool but their partial results are
//! combined pairwise in index order, so float sums do not depend on the
//! number of workers.

use rayon::prelude::*;

use crate::error::Result;

/// Evaluates `f(0..items)` in parallel, preserving order.
pub(crate) fn ordered_map<T, F>(items: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..items).into_par_iter().map(f).collect()
}

/// Pairwise reduction in a fixed tree shape.
pub(crate) fn tree_reduce<T: Clone>(mut values: Vec<T>, zero: T, add: impl Fn(T, T) -> T) -> T {
    if values.is_empty() {
        return zero;
    }
    while values.len() > 1 {
        let mut next = Vec::with_capacity(values.len().div_ceil(2));
        let mut it = values.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(add(a, b)),
                None => next.push(a),
            }
        }
        values = next;
    }
    values.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_shape_is_fixed() {
        let v: Vec<f64> = (0..11).map(|i| 0.1 * i as f64).collect();
        let a = tree_reduce(v.clone(), 0.0, |x, y| x + y);
        let b = tree_reduce(v, 0.0, |x, y| x + y);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(tree_reduce(Vec::<i32>::new(), 0, |x, y| x + y), 0);
        let m = ordered_map(5, |i| Ok(i * 2)).unwrap();
        assert_eq!(m, vec![0, 2, 4, 6, 8]);
    }
}
