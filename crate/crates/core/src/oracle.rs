// SPDX-License-Identifier: Apache-2.0

//! Brute-force ground truth by instance enumeration.
//!
//! Instances come from the dependence units directly (one factor per unit),
//! so multipoint and polytope datasets need no special handling. Per-instance
//! geometry is memoized over location subsets: a set is separable iff all its
//! subsets of size `d + 2` are, and the hull distance of a separable set is
//! attained by a subset of at most `d + 1` locations. Both facts turn the
//! table for a set into a fold over the sets with one location removed.


use crate::dataset::{Color, Dataset, Locations, UnitKind};
use crate::error::{Error, Result};
use crate::geom::separability::max_margin_separator;
use crate::geom::Point;
use crate::linalg;
use crate::objects::{ball_separability_check, check_ball_dimension, hull_distance, BallSet};
use crate::parallel::{ordered_map, tree_reduce};
use crate::scalar::Scalar;

/// Default size guard: about four million instances.
pub const MAX_ORACLE_LOCATIONS: usize = 22;
/// Hard cap, even with `force`, set by the subset tables.
pub const HARD_ORACLE_LOCATIONS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<S> {
    pub present: Vec<usize>,
    pub probability: S,
}

/// Distinct separation margins over all instances.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginCensus {
    /// Sorted increasing.
    pub margins: Vec<f64>,
    /// Squared margins as rationals, when compared exactly.
    pub margins_sq: Option<Vec<num_rational::BigRational>>,
    pub kappa: usize,
    /// `"exact"` or `"float"`.
    pub tier: &'static str,
}

fn guard(m: usize, force: bool) -> Result<()> {
    let limit = if force { HARD_ORACLE_LOCATIONS } else { MAX_ORACLE_LOCATIONS };
    if m > limit {
        return Err(Error::GuardRail {
            what: "oracle locations",
            value: m as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// Every instance with positive probability as `(bitmask, probability)`.
fn instance_masks<S: Scalar>(locs: &Locations<S>) -> Vec<(u32, S)> {
    let mut out = vec![(0u32, S::one())];
    for unit in &locs.units {
        let mut options: Vec<(u32, S)> = Vec::new();
        let bit = |i: usize| 1u32 << i;
        match unit.kind {
            UnitKind::Independent | UnitKind::AllOrNone => {
                let p = unit.probs[0].clone();
                let all = unit.members.iter().fold(0, |a, &i| a | bit(i));
                options.push((0, S::one() - p.clone()));
                options.push((all, p));
            }
            UnitKind::Exclusive => {
                let total = unit.probs.iter().fold(S::zero(), |a, p| a + p.clone());
                options.push((0, S::one() - total));
                for (&i, p) in unit.members.iter().zip(&unit.probs) {
                    options.push((bit(i), p.clone()));
                }
            }
        }
        options.retain(|(_, p)| !p.is_zero());
        let mut next = Vec::with_capacity(out.len() * options.len());
        for (mask, p) in &out {
            for (m, q) in &options {
                next.push((mask | m, p.clone() * q.clone()));
            }
        }
        out = next;
    }
    out
}

/// All instances with positive probability.
pub fn instances<S: Scalar>(locs: &Locations<S>, force: bool) -> Result<Vec<Instance<S>>> {
    guard(locs.len(), force)?;
    Ok(instance_masks(locs)
        .into_iter()
        .map(|(mask, probability)| Instance {
            present: (0..locs.len()).filter(|&i| mask & (1 << i) != 0).collect(),
            probability,
        })
        .collect())
}

fn split<S: Clone>(coords: &[Point<S>], colors: &[Color], mask: u32) -> (Vec<Point<S>>, Vec<Point<S>>) {
    let mut reds = Vec::new();
    let mut blues = Vec::new();
    for (i, (c, col)) in coords.iter().zip(colors).enumerate() {
        if mask & (1 << i) != 0 {
            match col {
                Color::Red => reds.push(c.clone()),
                Color::Blue => blues.push(c.clone()),
            }
        }
    }
    (reds, blues)
}

/// Table over all location subsets: direct values up to `base_size`, then
/// the fold of `join` over one-smaller subsets.
fn subset_table<T, B, J>(m: usize, base_size: usize, base: B, join: J) -> Result<Vec<T>>
where
    T: Clone + Send,
    B: Fn(u32) -> T + Sync + Send,
    J: Fn(&T, &T) -> T,
{
    let small: Vec<u32> = (0..1u32 << m)
        .filter(|mask| mask.count_ones() as usize <= base_size)
        .collect();
    let values = ordered_map(small.len(), |i| Ok(base(small[i])))?;
    let mut table: Vec<Option<T>> = vec![None; 1 << m];
    for (mask, v) in small.into_iter().zip(values) {
        table[mask as usize] = Some(v);
    }
    for mask in 0..1u32 << m {
        if table[mask as usize].is_some() {
            continue;
        }
        let mut acc: Option<T> = None;
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            let sub = table[(mask ^ bit) as usize].as_ref().expect("smaller subsets first");
            acc = Some(match acc {
                None => sub.clone(),
                Some(a) => join(&a, sub),
            });
        }
        table[mask as usize] = acc;
    }
    Ok(table.into_iter().map(|v| v.expect("filled")).collect())
}

/// Coordinates scaled per axis to integers; affine dependences are unchanged.
fn integer_coords<S: Scalar>(locs: &Locations<S>) -> Option<Vec<Vec<i128>>> {
    use num_integer::Integer;
    let exact: Vec<Vec<num_rational::BigRational>> = locs
        .coords
        .iter()
        .map(|p| p.iter().map(|v| v.to_rational()).collect::<Option<_>>())
        .collect::<Option<_>>()?;
    let d = locs.dimension;
    let mut out = vec![vec![0i128; d]; exact.len()];
    for k in 0..d {
        let lcm = exact
            .iter()
            .fold(num_bigint::BigInt::from(1), |a, p| a.lcm(p[k].denom()));
        for (row, p) in out.iter_mut().zip(&exact) {
            let v = p[k].numer() * (&lcm / p[k].denom());
            let v = i64::try_from(v).ok()?;
            row[k] = i128::from(v);
        }
    }
    Some(out)
}

/// Rank of an integer matrix by fraction-free elimination; `None` on overflow.
fn integer_rank(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = m[rank][c].checked_mul(m[r][k])?.checked_sub(m[r][c].checked_mul(m[rank][k])?)?;
                m[r][k] = v / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
    }
    Some(rank)
}

fn integer_det(m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut m = m;
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| m[r][c] != 0) else {
            return Some(0);
        };
        if p != c {
            m.swap(c, p);
            sign = -sign;
        }
        for r in c + 1..n {
            for k in c + 1..n {
                let v = m[c][c].checked_mul(m[r][k])?.checked_sub(m[r][c].checked_mul(m[c][k])?)?;
                m[r][k] = v / prev;
            }
            m[r][c] = 0;
        }
        prev = m[c][c];
    }
    Some(sign * m[n - 1][n - 1])
}

/// Integer version of [`small_separable`]; `None` when it cannot decide.
fn small_separable_int(ints: &[Vec<i128>], colors: &[Color], ids: &[usize], d: usize) -> Option<bool> {
    let k = ids.len();
    let column = |i: usize| -> Vec<i128> {
        let mut c = ints[i].clone();
        c.push(1);
        c
    };
    // matrix with one row per point: rank k means affinely independent
    let by_point: Vec<Vec<i128>> = ids.iter().map(|&i| column(i)).collect();
    if k <= d + 1 {
        return (integer_rank(by_point)? == k).then_some(true);
    }
    if k != d + 2 {
        return None;
    }
    // lambda_i = (-1)^i det of the points without i
    let mut lambda = Vec::with_capacity(k);
    for skip in 0..k {
        let sub: Vec<Vec<i128>> = (0..k).filter(|&j| j != skip).map(|j| by_point[j].clone()).collect();
        let det = integer_det(sub)?;
        lambda.push(if skip % 2 == 0 { det.signum() } else { -det.signum() });
    }
    if lambda.iter().all(|&l| l == 0) {
        return None;
    }
    let fits = |c: i128| {
        ids.iter().zip(&lambda).all(|(&i, &l)| match colors[i] {
            Color::Red => c * l >= 0,
            Color::Blue => c * l <= 0,
        })
    };
    Some(!(fits(1) || fits(-1)))
}

/// Separability of a small set through its affine dependences: with a single
/// dependence `lambda`, the hulls meet iff `lambda` (or `-lambda`) is
/// nonnegative on the reds and nonpositive on the blues.
fn small_separable<S: Scalar>(locs: &Locations<S>, ints: Option<&[Vec<i128>]>, mask: u32) -> bool {
    let ids: Vec<usize> = (0..locs.len()).filter(|&i| mask & (1 << i) != 0).collect();
    let red = |i: usize| locs.colors[i] == Color::Red;
    if ids.iter().all(|&i| red(i)) || ids.iter().all(|&i| !red(i)) {
        return true;
    }
    let d = locs.dimension;
    if let Some(answer) = ints.and_then(|ints| small_separable_int(ints, &locs.colors, &ids, d)) {
        return answer;
    }
    // rows are coordinates plus the all-ones row; columns are points
    let mut rows: Vec<Vec<S>> = (0..d)
        .map(|k| ids.iter().map(|&i| locs.coords[i][k].clone()).collect())
        .collect();
    rows.push(vec![S::one(); ids.len()]);
    let ker = linalg::kernel(rows, ids.len());
    match ker.len() {
        0 => true,
        1 => {
            let lambda = &ker[0];
            let fits = |c: i8| {
                ids.iter().zip(lambda).all(|(&i, l)| {
                    let s = c * l.sign();
                    if red(i) {
                        s >= 0
                    } else {
                        s <= 0
                    }
                })
            };
            !(fits(1) || fits(-1))
        }
        _ => {
            let (r, b) = split(&locs.coords, &locs.colors, mask);
            max_margin_separator(&r, &b).is_some()
        }
    }
}

/// Separability of every location subset.
fn separable_table<S: Scalar>(locs: &Locations<S>) -> Result<Vec<bool>> {
    let ints = integer_coords(locs);
    subset_table(
        locs.len(),
        locs.dimension + 2,
        |mask| small_separable(locs, ints.as_deref(), mask),
        |a, b| *a && *b,
    )
}

/// Squared separation margin of every subset: `None` for one-color subsets,
/// zero for inseparable ones.
fn margin_table<S: Scalar>(locs: &Locations<S>) -> Result<Vec<Option<S>>> {
    subset_table(
        locs.len(),
        locs.dimension + 2,
        |mask| {
            let (r, b) = split(&locs.coords, &locs.colors, mask);
            if r.is_empty() || b.is_empty() {
                return None;
            }
            Some(max_margin_separator(&r, &b).map_or_else(S::zero, |m| m.margin_sq))
        },
        |a, b| match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => Some(if x < y { x.clone() } else { y.clone() }),
        },
    )
}

fn sum<S: Scalar>(values: Vec<S>) -> S {
    tree_reduce(values, S::zero(), |a, b| a + b)
}

/// Probability that the existent locations are strongly separable.
pub fn brute_sp<S: Scalar>(locs: &Locations<S>, force: bool) -> Result<S> {
    guard(locs.len(), force)?;
    let table = separable_table(locs)?;
    Ok(sum(instance_masks(locs)
        .into_iter()
        .filter(|(mask, _)| table[*mask as usize])
        .map(|(_, p)| p)
        .collect()))
}

/// Total probability of the inseparable instances.
pub fn brute_inseparable<S: Scalar>(locs: &Locations<S>, force: bool) -> Result<S> {
    guard(locs.len(), force)?;
    let table = separable_table(locs)?;
    Ok(sum(instance_masks(locs)
        .into_iter()
        .filter(|(mask, _)| !table[*mask as usize])
        .map(|(_, p)| p)
        .collect()))
}

/// `sum Pr(I) Mar(I)` in float; inseparable and one-color instances count zero.
pub fn brute_esm<S: Scalar>(locs: &Locations<S>, force: bool) -> Result<f64> {
    guard(locs.len(), force)?;
    let table = margin_table(locs)?;
    Ok(sum(instance_masks(locs)
        .into_iter()
        .filter_map(|(mask, p)| {
            let m = table[mask as usize].as_ref()?;
            Some(p.to_f64() * m.to_f64().sqrt())
        })
        .collect()))
}

/// Distinct positive margins over all instances with positive probability.
pub fn enumerate_margins<S: Scalar>(locs: &Locations<S>, force: bool) -> Result<MarginCensus> {
    guard(locs.len(), force)?;
    let table = margin_table(locs)?;
    let mut values: Vec<S> = instance_masks(locs)
        .into_iter()
        .filter_map(|(mask, _)| table[mask as usize].clone())
        .filter(|m| !m.is_zero())
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("comparable margins"));
    if S::EXACT {
        values.dedup();
        let margins_sq: Vec<_> = values.iter().map(|v| v.to_rational().expect("exact")).collect();
        Ok(MarginCensus {
            margins: values.iter().map(|v| v.to_f64().sqrt()).collect(),
            kappa: values.len(),
            margins_sq: Some(margins_sq),
            tier: "exact",
        })
    } else {
        let mut margins: Vec<f64> = Vec::new();
        for v in values.iter().map(|v| v.to_f64().sqrt()) {
            if margins.last().is_none_or(|&l| (v - l).abs() > 1e-12 * v.abs().max(l.abs())) {
                margins.push(v);
            }
        }
        Ok(MarginCensus {
            kappa: margins.len(),
            margins,
            margins_sq: None,
            tier: "float",
        })
    }
}

fn ball_instances(set: &BallSet, force: bool) -> Result<Vec<(u32, f64)>> {
    check_ball_dimension(set.dimension())?;
    guard(set.len(), force)?;
    Ok(instance_masks(&set.locs))
}

fn ball_split(set: &BallSet, mask: u32) -> (Vec<crate::objects::FloatBall>, Vec<crate::objects::FloatBall>) {
    let ids: Vec<usize> = (0..set.len()).filter(|&i| mask & (1 << i) != 0).collect();
    (set.balls_of(&ids, Color::Red), set.balls_of(&ids, Color::Blue))
}

/// Ball separable probability by instance enumeration.
pub fn brute_ball_sp(ds: &Dataset, force: bool) -> Result<f64> {
    let set = BallSet::from_dataset(ds);
    let masks = ball_instances(&set, force)?;
    let terms = ordered_map(masks.len(), |i| {
        let (mask, p) = masks[i];
        let (r, b) = ball_split(&set, mask);
        Ok(if ball_separability_check(&r, &b)? { p } else { 0.0 })
    })?;
    Ok(sum(terms))
}

/// Ball expected margin: half the distance between the two hulls per instance.
pub fn brute_ball_esm(ds: &Dataset, force: bool) -> Result<f64> {
    let set = BallSet::from_dataset(ds);
    let masks = ball_instances(&set, force)?;
    let terms = ordered_map(masks.len(), |i| {
        let (mask, p) = masks[i];
        let (r, b) = ball_split(&set, mask);
        if r.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let h = hull_distance(&r, &b);
        Ok(if h.separable { p * h.distance / 2.0 } else { 0.0 })
    })?;
    Ok(sum(terms))
}

/// Direct hull queries over the instances of a one-color point set `A`.
pub mod hull {
    use super::*;
    use crate::geom::separability::closest_pair_exhaustive;

    fn present<S: Scalar>(a: &Locations<S>, mask: u32) -> Vec<Point<S>> {
        (0..a.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| a.coords[i].clone())
            .collect()
    }

    /// Squared distance from the hull of `q` to the hull of each instance; `None` for empty instances.
    fn distances<S: Scalar>(a: &Locations<S>, q: &[Point<S>], force: bool) -> Result<Vec<(Option<S>, S)>> {
        guard(a.len(), force)?;
        let masks = instance_masks(a);
        ordered_map(masks.len(), |i| {
            let (mask, p) = masks[i].clone();
            let pts = present(a, mask);
            let dist = (!pts.is_empty()).then(|| closest_pair_exhaustive(q, &pts));
            Ok((dist, p))
        })
    }

    /// `Pr(q in CH(A))`.
    pub fn membership<S: Scalar>(a: &Locations<S>, q: &[S], force: bool) -> Result<S> {
        intersection(a, &[q.to_vec()], force)
    }

    /// `Pr(CH(A) meets CH(Q))`.
    pub fn intersection<S: Scalar>(a: &Locations<S>, q: &[Point<S>], force: bool) -> Result<S> {
        let terms = distances(a, q, force)?
            .into_iter()
            .filter(|(d, _)| d.as_ref().is_some_and(|d| d.sign() == 0))
            .map(|(_, p)| p)
            .collect();
        Ok(sum(terms))
    }

    /// `Pr(dist(q, CH(A)) > eps)`, counting the empty hull as infinitely far.
    pub fn farther_than<S: Scalar>(a: &Locations<S>, q: &[S], eps: &S, force: bool) -> Result<S> {
        let e2 = eps.clone() * eps.clone();
        let terms = distances(a, &[q.to_vec()], force)?
            .into_iter()
            .filter(|(d, _)| d.as_ref().is_none_or(|d| (d.clone() - e2.clone()).sign() > 0))
            .map(|(_, p)| p)
            .collect();
        Ok(sum(terms))
    }

    /// `E[dist(q, CH(A))]`, with the empty hull contributing zero.
    pub fn expected_distance<S: Scalar>(a: &Locations<S>, q: &[S], force: bool) -> Result<f64> {
        let terms = distances(a, &[q.to_vec()], force)?
            .into_iter()
            .filter_map(|(d, p)| d.map(|d| p.to_f64() * d.to_f64().sqrt()))
            .collect();
        Ok(sum(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::json::parse_dataset;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn locs(doc: &str) -> Locations<BigRational> {
        parse_dataset(doc.as_bytes()).unwrap().locations().unwrap()
    }

    fn line(points: &str) -> Locations<BigRational> {
        locs(&format!(r#"{{"version":1,"dimension":1,"model":"unipoint","points":[{points}]}}"#))
    }

    #[test]
    fn sp_on_a_line() {
        let l = line(
            r#"{"color":"red","coords":[0],"prob":"1/2"},{"color":"red","coords":[2],"prob":"1/2"},
               {"color":"blue","coords":[1],"prob":"1"}"#,
        );
        assert_eq!(brute_sp(&l, false).unwrap(), rational(3, 4));
        assert_eq!(brute_inseparable(&l, false).unwrap(), rational(1, 4));
        assert_eq!(instances(&l, false).unwrap().len(), 4);
    }

    #[test]
    fn esm_and_margins() {
        let l = line(
            r#"{"color":"red","coords":[0],"prob":"1"},{"color":"blue","coords":[1],"prob":"1/2"},
               {"color":"blue","coords":[3],"prob":"1"}"#,
        );
        assert!((brute_esm(&l, false).unwrap() - 1.0).abs() < 1e-12);
        let l = line(
            r#"{"color":"red","coords":[0],"prob":"1/2"},{"color":"blue","coords":[1],"prob":"1/2"},
               {"color":"blue","coords":[3],"prob":"1/2"}"#,
        );
        let c = enumerate_margins(&l, false).unwrap();
        assert_eq!(c.kappa, 2);
        assert_eq!(c.margins_sq.unwrap(), vec![rational(1, 4), rational(9, 4)]);
        let mono = line(r#"{"color":"red","coords":[0],"prob":"1/2"}"#);
        assert_eq!(enumerate_margins(&mono, false).unwrap().kappa, 0);
        assert_eq!(brute_esm(&mono, false).unwrap(), 0.0);
    }

    #[test]
    fn plane_distance() {
        let l = locs(
            r#"{"version":1,"dimension":2,"model":"unipoint","points":[
                {"color":"red","coords":[0,0],"prob":"1"},{"color":"blue","coords":[3,4],"prob":"1"}]}"#,
        );
        assert!((brute_esm(&l, false).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn multipoint_groups_are_exclusive() {
        let l = locs(
            r#"{"version":1,"dimension":1,"model":"multipoint","uncertain_points":[
                {"color":"red","locations":[{"coords":[0],"prob":"1/2"},{"coords":[2],"prob":"1/4"}]},
                {"color":"blue","locations":[{"coords":[1],"prob":"1"}]}]}"#,
        );
        assert_eq!(brute_sp(&l, false).unwrap(), rational(1, 1));
        assert_eq!(instances(&l, false).unwrap().len(), 3);
    }

    #[test]
    fn subset_table_matches_direct_checks() {
        let l = locs(
            r#"{"version":1,"dimension":2,"model":"unipoint","points":[
                {"color":"red","coords":[0,0],"prob":"1/2"},{"color":"red","coords":[4,0],"prob":"1/2"},
                {"color":"red","coords":[0,4],"prob":"1/2"},{"color":"blue","coords":[1,1],"prob":"1/2"},
                {"color":"blue","coords":[5,5],"prob":"1/2"},{"color":"blue","coords":[-3,1],"prob":"1/3"}]}"#,
        );
        let table = separable_table(&l).unwrap();
        let margins = margin_table(&l).unwrap();
        for mask in 0..1u32 << l.len() {
            let (r, b) = split(&l.coords, &l.colors, mask);
            let direct = max_margin_separator(&r, &b);
            let mono = r.is_empty() || b.is_empty();
            assert_eq!(table[mask as usize], mono || direct.is_some(), "mask {mask:b}");
            match &margins[mask as usize] {
                None => assert!(mono),
                Some(m) => assert_eq!(*m, direct.map_or_else(BigRational::zero, |d| d.margin_sq)),
            }
        }
    }

    #[test]
    fn guard_rail() {
        let pts: Vec<String> = (0..23)
            .map(|i| format!(r#"{{"color":"red","coords":[{i}],"prob":"1/2"}}"#))
            .collect();
        let l = line(&pts.join(","));
        assert!(matches!(brute_sp(&l, false), Err(Error::GuardRail { .. })));
    }

    #[test]
    fn hull_queries() {
        let a = locs(
            r#"{"version":1,"dimension":2,"model":"unipoint","points":[
                {"color":"blue","coords":[0,0],"prob":"1/2"},{"color":"blue","coords":[4,0],"prob":"1/2"},
                {"color":"blue","coords":[0,4],"prob":"1/2"}]}"#,
        );
        let q = vec![rational(1, 1), rational(1, 1)];
        assert_eq!(hull::membership(&a, &q, false).unwrap(), rational(1, 8));
        let far = hull::farther_than(&a, &q, &rational(0, 1), false).unwrap();
        assert_eq!(far, rational(7, 8));
    }
}
