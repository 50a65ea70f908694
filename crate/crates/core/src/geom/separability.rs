// SPDX-License-Identifier: Apache-2.0

//! Hull separability and maximum-margin separators.
//!
//! Both reduce to the minimum-norm point of the Minkowski difference
//! `CH(R) - CH(B)`, found with Wolfe's active-set method. Exact scalars
//! first try a float pass to guess the active set and then confirm it
//! exactly; if confirmation fails the exact method runs from scratch.

use crate::geom::{Hyperplane, Point};
use crate::linalg;
use crate::scalar::Scalar;

/// Linear minimization oracle over a compact convex set.
pub(crate) trait Support<S> {
    type Key: Clone + PartialEq;

    fn dimension(&self) -> usize;

    /// Some point of the set.
    fn start(&self) -> (Self::Key, Vec<S>);

    /// A point of the set minimizing `dir . p`.
    fn support(&self, dir: &[S]) -> (Self::Key, Vec<S>);

    /// Scale used for float stopping tests.
    fn scale(&self) -> f64;
}

pub(crate) struct MinNorm<S, K> {
    /// Active vertices with their convex weights.
    pub active: Vec<(K, S, Vec<S>)>,
}

/// Affine minimizer of `|sum a_i p_i|` subject to `sum a_i = 1`.
fn affine_minimizer<S: Scalar>(pts: &[Vec<S>]) -> Option<Vec<S>> {
    let k = pts.len();
    if k == 1 {
        return Some(vec![S::one()]);
    }
    let p0 = &pts[0];
    let v: Vec<Vec<S>> = pts[1..].iter().map(|p| linalg::sub(p, p0)).collect();
    let gram: Vec<Vec<S>> = v
        .iter()
        .map(|a| v.iter().map(|b| linalg::dot(a, b)).collect())
        .collect();
    let rhs: Vec<S> = v.iter().map(|a| -linalg::dot(a, p0)).collect();
    let mu = linalg::solve(gram, rhs)?;
    let rest = mu.iter().fold(S::zero(), |acc, m| acc + m.clone());
    let mut alpha = Vec::with_capacity(k);
    alpha.push(S::one() - rest);
    alpha.extend(mu);
    Some(alpha)
}

fn combine<S: Scalar>(weights: &[S], pts: &[Vec<S>], d: usize) -> Vec<S> {
    let mut x = vec![S::zero(); d];
    for (w, p) in weights.iter().zip(pts) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi = xi.clone() + w.clone() * pi.clone();
        }
    }
    x
}

fn positive<S: Scalar>(v: &S) -> bool {
    if S::EXACT {
        v.is_positive()
    } else {
        v.to_f64() > 1e-14
    }
}

/// Wolfe's minimum-norm-point method.
pub(crate) fn wolfe<S: Scalar, O: Support<S>>(oracle: &O) -> MinNorm<S, O::Key> {
    let d = oracle.dimension();
    let (k0, p0) = oracle.start();
    let mut keys = vec![k0];
    let mut pts = vec![p0];
    let mut lambda = vec![S::one()];
    let mut x = pts[0].clone();
    let scale2 = oracle.scale().powi(2).max(1e-300);
    let max_iter = if S::EXACT { usize::MAX } else { 10_000 };
    let mut iter = 0;
    'major: loop {
        iter += 1;
        if iter > max_iter {
            break;
        }
        let xx = linalg::dot(&x, &x);
        if xx.is_zero() {
            break;
        }
        let (kj, pj) = oracle.support(&x);
        let gap = xx.clone() - linalg::dot(&x, &pj);
        if S::EXACT {
            if !gap.is_positive() {
                break;
            }
        } else if gap.to_f64() <= 1e-15 * scale2 || xx.to_f64() <= 1e-30 * scale2 {
            break;
        }
        if keys.contains(&kj) {
            break;
        }
        keys.push(kj);
        pts.push(pj);
        lambda.push(S::zero());
        let newest = keys.len() - 1;
        loop {
            let Some(alpha) = affine_minimizer(&pts) else {
                // numerically dependent active set (float only)
                keys.pop();
                pts.pop();
                lambda.pop();
                break 'major;
            };
            if alpha.iter().all(positive) {
                lambda = alpha;
                x = combine(&lambda, &pts, d);
                break;
            }
            let mut theta: Option<(S, usize)> = None;
            for (i, (a, l)) in alpha.iter().zip(&lambda).enumerate() {
                if positive(a) {
                    continue;
                }
                let t = l.clone() / (l.clone() - a.clone());
                if theta.as_ref().is_none_or(|(best, _)| t < *best) {
                    theta = Some((t, i));
                }
            }
            let (theta, arg) = theta.expect("some non-positive coefficient");
            if !S::EXACT && arg == newest && theta.to_f64() <= 1e-14 {
                // no progress possible in float
                keys.pop();
                pts.pop();
                lambda.pop();
                break 'major;
            }
            let one_minus = S::one() - theta.clone();
            lambda = alpha
                .iter()
                .zip(&lambda)
                .map(|(a, l)| theta.clone() * a.clone() + one_minus.clone() * l.clone())
                .collect();
            let mut i = 0;
            let mut removed_arg = false;
            while i < keys.len() {
                let drop = (!removed_arg && i == arg) || !positive(&lambda[i]);
                if drop {
                    if i == arg {
                        removed_arg = true;
                    }
                    keys.remove(i);
                    pts.remove(i);
                    lambda.remove(i);
                } else {
                    i += 1;
                }
            }
            if keys.is_empty() {
                // cannot happen in exact arithmetic; restart defensively
                let (k, p) = oracle.start();
                keys.push(k);
                pts.push(p);
                lambda.push(S::one());
            }
            let total = lambda.iter().fold(S::zero(), |a, b| a + b.clone());
            lambda = lambda.into_iter().map(|l| l / total.clone()).collect();
        }
    }
    MinNorm {
        active: keys
            .into_iter()
            .zip(lambda)
            .zip(pts)
            .map(|((k, l), p)| (k, l, p))
            .collect(),
    }
}

/// Minkowski difference `CH(reds) - CH(blues)`; keys are (red, blue) index pairs.
struct Difference<'a, S> {
    reds: &'a [Point<S>],
    blues: &'a [Point<S>],
}

impl<S: Scalar> Support<S> for Difference<'_, S> {
    type Key = (usize, usize);

    fn dimension(&self) -> usize {
        self.reds[0].len()
    }

    fn start(&self) -> ((usize, usize), Vec<S>) {
        ((0, 0), linalg::sub(&self.reds[0], &self.blues[0]))
    }

    fn support(&self, dir: &[S]) -> ((usize, usize), Vec<S>) {
        let argext = |set: &[Point<S>], want_min: bool| {
            let mut best = 0;
            let mut best_v = linalg::dot(dir, &set[0]);
            for (i, p) in set.iter().enumerate().skip(1) {
                let v = linalg::dot(dir, p);
                if (want_min && v < best_v) || (!want_min && v > best_v) {
                    best = i;
                    best_v = v;
                }
            }
            best
        };
        let i = argext(self.reds, true);
        let j = argext(self.blues, false);
        ((i, j), linalg::sub(&self.reds[i], &self.blues[j]))
    }

    fn scale(&self) -> f64 {
        self.reds
            .iter()
            .chain(self.blues)
            .flat_map(|p| p.iter().map(|v| v.to_f64().abs()))
            .fold(1.0, f64::max)
    }
}

/// Closest points of the two hulls.
pub struct ClosestPair<S> {
    pub red: Point<S>,
    pub blue: Point<S>,
    /// `|red - blue|^2`.
    pub distance_sq: S,
}

fn to_f64_points<S: Scalar>(pts: &[Point<S>]) -> Vec<Point<f64>> {
    pts.iter()
        .map(|p| p.iter().map(Scalar::to_f64).collect())
        .collect()
}

fn pair_from_active<S: Scalar>(
    reds: &[Point<S>],
    blues: &[Point<S>],
    active: &[((usize, usize), S)],
) -> ClosestPair<S> {
    let d = reds[0].len();
    let mut r = vec![S::zero(); d];
    let mut b = vec![S::zero(); d];
    for ((i, j), w) in active {
        for k in 0..d {
            r[k] = r[k].clone() + w.clone() * reds[*i][k].clone();
            b[k] = b[k].clone() + w.clone() * blues[*j][k].clone();
        }
    }
    let diff = linalg::sub(&r, &b);
    ClosestPair {
        distance_sq: linalg::dot(&diff, &diff),
        red: r,
        blue: b,
    }
}

/// Exact confirmation of a guessed active set.
fn confirm<S: Scalar>(
    oracle: &Difference<'_, S>,
    keys: &[(usize, usize)],
) -> Option<Vec<((usize, usize), S)>> {
    let pts: Vec<Vec<S>> = keys
        .iter()
        .map(|&(i, j)| linalg::sub(&oracle.reds[i], &oracle.blues[j]))
        .collect();
    let alpha = affine_minimizer(&pts)?;
    if alpha.iter().any(|a| a.is_negative()) {
        return None;
    }
    let x = combine(&alpha, &pts, oracle.dimension());
    let xx = linalg::dot(&x, &x);
    if !xx.is_zero() {
        let (_, p) = oracle.support(&x);
        if linalg::dot(&x, &p) < xx {
            return None;
        }
    }
    Some(keys.iter().cloned().zip(alpha).collect())
}

/// Closest pair between `CH(reds)` and `CH(blues)`; both must be nonempty.
pub fn closest_pair<S: Scalar>(reds: &[Point<S>], blues: &[Point<S>]) -> ClosestPair<S> {
    assert!(!reds.is_empty() && !blues.is_empty());
    let oracle = Difference { reds, blues };
    if S::EXACT {
        let fr = to_f64_points(reds);
        let fb = to_f64_points(blues);
        let guess = wolfe(&Difference {
            reds: &fr,
            blues: &fb,
        });
        let keys: Vec<_> = guess.active.iter().map(|(k, _, _)| *k).collect();
        if let Some(active) = confirm(&oracle, &keys) {
            return pair_from_active(reds, blues, &active);
        }
    }
    let result = wolfe(&oracle);
    let active: Vec<_> = result.active.into_iter().map(|(k, w, _)| (k, w)).collect();
    pair_from_active(reds, blues, &active)
}

fn distance_is_zero<S: Scalar>(dist_sq: &S, reds: &[Point<S>], blues: &[Point<S>]) -> bool {
    if S::EXACT {
        return dist_sq.is_zero();
    }
    let scale = reds
        .iter()
        .chain(blues)
        .flat_map(|p| p.iter().map(|v| v.to_f64().abs()))
        .fold(1.0, f64::max);
    dist_sq.to_f64().sqrt() <= crate::scalar::FLOAT_TOLERANCE * scale
}

/// Whether a strong separator exists; returns the closest-pair bisector as witness.
pub fn check_separable<S: Scalar>(
    reds: &[Point<S>],
    blues: &[Point<S>],
) -> (bool, Option<Hyperplane<S>>) {
    if reds.is_empty() || blues.is_empty() {
        return (true, None);
    }
    let cp = closest_pair(reds, blues);
    if distance_is_zero(&cp.distance_sq, reds, blues) {
        return (false, None);
    }
    (true, Some(bisector(&cp.red, &cp.blue)))
}

/// Perpendicular bisector of `r b`, oriented with `r` on the negative side.
pub fn bisector<S: Scalar>(r: &[S], b: &[S]) -> Hyperplane<S> {
    let normal = linalg::sub(b, r);
    let mid: Vec<S> = linalg::add(r, b)
        .into_iter()
        .map(|v| v * S::half())
        .collect();
    let offset = linalg::dot(&normal, &mid);
    Hyperplane { normal, offset }
}

#[derive(Clone, Debug)]
pub struct MarginResult<S> {
    /// Reds lie on the negative side.
    pub separator: Hyperplane<S>,
    pub margin: f64,
    /// Exact when the scalar is exact.
    pub margin_sq: S,
    pub closest_pair: (Point<S>, Point<S>),
    /// Indices of reds (resp. blues) at distance exactly `margin` from the separator.
    pub support_reds: Vec<usize>,
    pub support_blues: Vec<usize>,
}

impl<S: Scalar> MarginResult<S> {
    pub fn support_len(&self) -> usize {
        self.support_reds.len() + self.support_blues.len()
    }
}

/// Maximum-margin separator; `None` when either color is empty or the instance is inseparable.
pub fn max_margin_separator<S: Scalar>(
    reds: &[Point<S>],
    blues: &[Point<S>],
) -> Option<MarginResult<S>> {
    if reds.is_empty() || blues.is_empty() {
        return None;
    }
    let cp = closest_pair(reds, blues);
    if distance_is_zero(&cp.distance_sq, reds, blues) {
        return None;
    }
    let separator = bisector(&cp.red, &cp.blue);
    let n = &separator.normal;
    let level_r = linalg::dot(n, &cp.red);
    let level_b = linalg::dot(n, &cp.blue);
    let nn = cp.distance_sq.to_f64();
    let on_level = |p: &Point<S>, level: &S| {
        let v = linalg::dot(n, p) - level.clone();
        if S::EXACT {
            v.is_zero()
        } else {
            v.to_f64().abs() <= 1e-9 * nn.sqrt().max(1.0)
        }
    };
    let support_reds = (0..reds.len())
        .filter(|&i| on_level(&reds[i], &level_r))
        .collect();
    let support_blues = (0..blues.len())
        .filter(|&i| on_level(&blues[i], &level_b))
        .collect();
    let margin_sq = cp.distance_sq.clone() / S::from_i64(4);
    Some(MarginResult {
        margin: margin_sq.to_f64().sqrt(),
        margin_sq,
        separator,
        closest_pair: (cp.red, cp.blue),
        support_reds,
        support_blues,
    })
}

fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) <= max {
            out.push((0..n).filter(|&i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Squared hull distance by exhaustive enumeration of simplex-pair features.
///
/// Independent of the active-set method; intended for small inputs and tests.
pub fn closest_pair_exhaustive<S: Scalar>(reds: &[Point<S>], blues: &[Point<S>]) -> S {
    assert!(!reds.is_empty() && !blues.is_empty());
    let d = reds[0].len();
    let mut best: Option<S> = None;
    for a in subsets_up_to(reds.len(), d + 1) {
        for b in subsets_up_to(blues.len(), d + 2 - a.len().min(d + 1)) {
            if a.len() + b.len() > d + 2 {
                continue;
            }
            let base = linalg::sub(&reds[a[0]], &blues[b[0]]);
            let mut dirs: Vec<Vec<S>> = Vec::new();
            for &i in &a[1..] {
                dirs.push(linalg::sub(&reds[i], &reds[a[0]]));
            }
            for &j in &b[1..] {
                dirs.push(linalg::sub(&blues[b[0]], &blues[j]));
            }
            let coeffs = if dirs.is_empty() {
                Some(vec![])
            } else {
                let gram = dirs
                    .iter()
                    .map(|u| dirs.iter().map(|v| linalg::dot(u, v)).collect())
                    .collect();
                let rhs = dirs.iter().map(|u| -linalg::dot(u, &base)).collect();
                linalg::solve(gram, rhs)
            };
            let Some(mu) = coeffs else { continue };
            let (mu_a, mu_b) = mu.split_at(a.len() - 1);
            let feasible = |m: &[S]| {
                let s = m.iter().fold(S::zero(), |acc, v| acc + v.clone());
                m.iter().all(|v| !v.is_negative()) && s <= S::one()
            };
            if !feasible(mu_a) || !feasible(mu_b) {
                continue;
            }
            let mut y = base.clone();
            for (m, dir) in mu.iter().zip(&dirs) {
                y = linalg::add(&y, &linalg::scale(dir, m));
            }
            let dist = linalg::dot(&y, &y);
            if best.as_ref().is_none_or(|b| dist < *b) {
                best = Some(dist);
            }
        }
    }
    best.expect("single-vertex pairs are always feasible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn pts(c: &[&[i64]]) -> Vec<Point<BigRational>> {
        c.iter()
            .map(|p| p.iter().map(|&v| rational(v, 1)).collect())
            .collect()
    }

    #[test]
    fn separability_examples() {
        let (sep, h) = check_separable(&pts(&[&[0, 0], &[1, 0]]), &pts(&[&[0, 1], &[1, 1]]));
        assert!(sep);
        let h = h.unwrap();
        assert_eq!(h.normal, pts(&[&[0, 1]])[0]);
        assert_eq!(h.offset, rational(1, 2));
        let (sep, _) = check_separable(&pts(&[&[0, 0], &[2, 2]]), &pts(&[&[0, 2], &[2, 0]]));
        assert!(!sep);
        assert!(check_separable(&pts(&[]), &pts(&[&[1, 1]])).0);
    }

    #[test]
    fn margin_examples() {
        let m = max_margin_separator(&pts(&[&[0, 0]]), &pts(&[&[2, 0]])).unwrap();
        assert_eq!(m.margin, 1.0);
        assert_eq!(m.separator.eval(&pts(&[&[1, 7]])[0]), rational(0, 1));
        let m = max_margin_separator(&pts(&[&[0, 0]]), &pts(&[&[3, 4]])).unwrap();
        assert_eq!(m.margin, 2.5);
        assert_eq!(m.margin_sq, rational(25, 4));
        assert!(max_margin_separator(&pts(&[&[0, 0], &[2, 2]]), &pts(&[&[0, 2], &[2, 0]])).is_none());
    }

    #[test]
    fn support_set_of_parallel_planes() {
        let m = max_margin_separator(&pts(&[&[0, 0]]), &pts(&[&[2, 0], &[2, 2]])).unwrap();
        assert_eq!(m.margin, 1.0);
        assert_eq!(m.support_reds, vec![0]);
        assert_eq!(m.support_blues, vec![0, 1]);
    }

    #[test]
    fn float_instance_agrees() {
        let reds = vec![vec![0.0, 0.0], vec![1.0, 0.5]];
        let blues = vec![vec![3.0, 1.0], vec![2.5, -1.0]];
        let m = max_margin_separator(&reds, &blues).unwrap();
        let ex = closest_pair_exhaustive(&reds, &blues);
        assert!((m.margin_sq * 4.0 - ex).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_matches_active_set() {
        let reds = pts(&[&[0, 0, 0], &[4, 1, 0], &[1, 3, 1]]);
        let blues = pts(&[&[5, 5, 5], &[6, 0, 4], &[0, 6, 3]]);
        let cp = closest_pair(&reds, &blues);
        assert_eq!(cp.distance_sq, closest_pair_exhaustive(&reds, &blues));
    }
}
