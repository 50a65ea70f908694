// SPDX-License-Identifier: Apache-2.0

//! Expected separation-margin.
//!
//! Every separable two-colored instance has a unique support set `C` and
//! support planes `h_r`, `h_b`. The engine enumerates every set that can be
//! a support set and sums `xi(C) * Mar(C)`, where `xi(C)` is the probability
//! that the support set of the existent locations is exactly `C`.
//!
//! Sets of size at most `d` are kept when they are their own support set.
//! Larger sets are represented by their `d + 1` smallest ids: the tuple fixes
//! the plane pair, the remaining members are other on-plane locations with
//! larger ids.

use itertools::Itertools;

use crate::dataset::{Color, Locations, ScenarioTracker};
use crate::error::{Error, Result};
use crate::geom::position::Level;
use crate::geom::separability::max_margin_separator;
use crate::geom::{Hyperplane, Point};
use crate::linalg;
use crate::parallel::{ordered_map, tree_reduce};
use crate::scalar::Scalar;
use crate::sp::is_bichromatic;

/// A possible support set with its planes.
///
/// `h_r` is `w . x = beta_r` and `h_b` is `w . x = beta_b` with `beta_r < beta_b`;
/// reds lie on `w . x <= beta_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportConfig<S> {
    /// Location ids in increasing order.
    pub members: Vec<usize>,
    pub w: Vec<S>,
    pub beta_r: S,
    pub beta_b: S,
    pub margin_sq: S,
    pub margin: f64,
    pub xi: S,
}

impl<S: Scalar> SupportConfig<S> {
    pub fn h_r(&self) -> Hyperplane<S> {
        Hyperplane {
            normal: self.w.clone(),
            offset: self.beta_r.clone(),
        }
    }

    pub fn h_b(&self) -> Hyperplane<S> {
        Hyperplane {
            normal: self.w.clone(),
            offset: self.beta_b.clone(),
        }
    }

    /// The separator midway between the support planes.
    pub fn separator(&self) -> Hyperplane<S> {
        Hyperplane {
            normal: self.w.clone(),
            offset: (self.beta_r.clone() + self.beta_b.clone()) * S::half(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EsmResult<S> {
    pub emar: f64,
    pub configs: usize,
    pub xi_sum: S,
    /// Float mode only: side tests that landed close to the zero band.
    pub near_ties: usize,
}

fn split_colors<S: Scalar>(locs: &Locations<S>, ids: &[usize]) -> (Vec<Point<S>>, Vec<Point<S>>) {
    let pick = |c: Color| {
        ids.iter()
            .filter(|&&i| locs.colors[i] == c)
            .map(|&i| locs.coords[i].clone())
            .collect()
    };
    (pick(Color::Red), pick(Color::Blue))
}

fn config<S: Scalar>(members: Vec<usize>, w: Vec<S>, beta_r: S, beta_b: S) -> SupportConfig<S> {
    let gap = beta_b.clone() - beta_r.clone();
    let margin_sq = gap.clone() * gap / (S::from_i64(4) * linalg::dot(&w, &w));
    SupportConfig {
        members,
        margin: margin_sq.to_f64().sqrt(),
        margin_sq,
        w,
        beta_r,
        beta_b,
        xi: S::zero(),
    }
}

/// Whether `ids` is its own support set; returns its planes.
fn self_supporting<S: Scalar>(locs: &Locations<S>, ids: &[usize]) -> Option<SupportConfig<S>> {
    let (reds, blues) = split_colors(locs, ids);
    let m = max_margin_separator(&reds, &blues)?;
    if m.support_len() != ids.len() {
        return None;
    }
    let (r, b) = &m.closest_pair;
    let w = linalg::sub(b, r);
    let beta_r = linalg::dot(&w, r);
    let beta_b = linalg::dot(&w, b);
    Some(config(ids.to_vec(), w, beta_r, beta_b))
}

/// Plane pair through the red and blue parts of a `(d + 1)`-tuple.
fn tuple_planes<S: Scalar>(locs: &Locations<S>, tuple: &[usize]) -> Result<Option<(Vec<S>, S, S)>> {
    let d = locs.dimension;
    // unknowns (w, beta_r, beta_b)
    let rows: Vec<Vec<S>> = tuple
        .iter()
        .map(|&i| {
            let mut row = locs.coords[i].clone();
            let red = locs.colors[i] == Color::Red;
            row.push(if red { -S::one() } else { S::zero() });
            row.push(if red { S::zero() } else { -S::one() });
            row
        })
        .collect();
    let ker = linalg::kernel(rows, d + 2);
    if ker.len() != 1 {
        return Err(degenerate(d, tuple));
    }
    let mut k = ker.into_iter().next().unwrap();
    let gap = k[d + 1].clone() - k[d].clone();
    match gap.sign() {
        0 => return Ok(None),
        -1 => k.iter_mut().for_each(|v| *v = -v.clone()),
        _ => {}
    }
    let beta_b = k.pop().unwrap();
    let beta_r = k.pop().unwrap();
    Ok(Some((k, beta_r, beta_b)))
}

fn degenerate(d: usize, ids: &[usize]) -> Error {
    crate::sp::degenerate(Level::Gp, 0, d, ids)
}

/// Every possible support set whose smallest id is `first` (xi left at zero).
fn configs_from<S: Scalar>(locs: &Locations<S>, first: usize) -> Result<Vec<SupportConfig<S>>> {
    let d = locs.dimension;
    let m = locs.len();
    let mut out = Vec::new();
    for size in 2..=d.min(m) {
        for rest in (first + 1..m).combinations(size - 1) {
            let mut ids = vec![first];
            ids.extend(rest);
            if is_bichromatic(&locs.colors, &ids) {
                if let Some(c) = self_supporting(locs, &ids) {
                    out.push(c);
                }
            }
        }
    }
    for rest in (first + 1..m).combinations(d) {
        let mut tuple = vec![first];
        tuple.extend(rest);
        if !is_bichromatic(&locs.colors, &tuple) {
            continue;
        }
        let Some((w, beta_r, beta_b)) = tuple_planes(locs, &tuple)? else {
            continue;
        };
        // larger sets keep `tuple` as their smallest ids
        let last = *tuple.last().unwrap();
        let extras = on_plane_after(locs, &w, &beta_r, &beta_b, &tuple, last);
        let base = config(tuple.clone(), w, beta_r, beta_b);
        for k in 0..=extras.len() {
            for extra in extras.iter().combinations(k) {
                let mut ids = tuple.clone();
                ids.extend(extra.into_iter().copied());
                ids.sort_unstable();
                let mut c = base.clone();
                c.members = ids;
                if valid_support(locs, &c) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn on_plane_after<S: Scalar>(
    locs: &Locations<S>,
    w: &[S],
    beta_r: &S,
    beta_b: &S,
    tuple: &[usize],
    last: usize,
) -> Vec<usize> {
    (last + 1..locs.len())
        .filter(|x| !tuple.contains(x))
        .filter(|&x| {
            let level = match locs.colors[x] {
                Color::Red => beta_r,
                Color::Blue => beta_b,
            };
            (linalg::dot(w, &locs.coords[x]) - level.clone()).sign() == 0
        })
        .collect()
}

/// The planes of `c` are the maximum-margin planes of its members.
fn valid_support<S: Scalar>(locs: &Locations<S>, c: &SupportConfig<S>) -> bool {
    let (reds, blues) = split_colors(locs, &c.members);
    match max_margin_separator(&reds, &blues) {
        Some(m) => {
            m.support_len() == c.members.len() && (m.margin_sq.clone() - c.margin_sq.clone()).sign() == 0
        }
        None => false,
    }
}

/// All possible support sets in id order, `xi` unset.
pub fn enumerate_support_configs<S: Scalar>(locs: &Locations<S>) -> Result<Vec<SupportConfig<S>>> {
    let parts = ordered_map(locs.len(), |first| configs_from(locs, first))?;
    Ok(parts.into_iter().flatten().collect())
}

/// Locations that must be absent for `c` to be the support set.
pub fn xi_forbidden<S: Scalar>(locs: &Locations<S>, c: &SupportConfig<S>) -> Vec<usize> {
    (0..locs.len())
        .filter(|i| !c.members.contains(i))
        .filter(|&i| {
            let v = linalg::dot(&c.w, &locs.coords[i]);
            match locs.colors[i] {
                Color::Red => (v - c.beta_r.clone()).sign() >= 0,
                Color::Blue => (v - c.beta_b.clone()).sign() <= 0,
            }
        })
        .collect()
}

/// Probability that the support set of the existent locations is exactly `c`.
pub fn xi<S: Scalar>(locs: &Locations<S>, c: &SupportConfig<S>) -> S {
    let mut t = ScenarioTracker::new(locs);
    for &i in &c.members {
        t.add_present(i);
    }
    for i in xi_forbidden(locs, c) {
        t.add_absent(i);
    }
    t.probability()
}

fn near_ties<S: Scalar>(locs: &Locations<S>, c: &SupportConfig<S>) -> usize {
    if S::EXACT {
        return 0;
    }
    let wn = linalg::dot(&c.w, &c.w).to_f64().sqrt();
    (0..locs.len())
        .filter(|i| !c.members.contains(i))
        .filter(|&i| {
            let v = linalg::dot(&c.w, &locs.coords[i]).to_f64();
            let level = match locs.colors[i] {
                Color::Red => c.beta_r.to_f64(),
                Color::Blue => c.beta_b.to_f64(),
            };
            let gap = (v - level).abs() / wn.max(1e-300);
            gap > 0.0 && gap < 1e-7
        })
        .count()
}

/// Support configurations with their `xi` filled in.
pub fn support_configs_with_xi<S: Scalar>(locs: &Locations<S>) -> Result<Vec<SupportConfig<S>>> {
    let parts = ordered_map(locs.len(), |first| {
        let mut cs = configs_from(locs, first)?;
        for c in &mut cs {
            c.xi = xi(locs, c);
        }
        Ok(cs)
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// `sum xi(C) Mar(C)` over all possible support sets.
pub fn expected_separation_margin<S: Scalar>(locs: &Locations<S>) -> Result<EsmResult<S>> {
    let report = locs.validate(Level::Gp);
    if !report.passes() {
        return Err(Error::Degenerate(Box::new(report)));
    }
    let parts = ordered_map(locs.len(), |first| {
        let cs = configs_from(locs, first)?;
        let mut emar = 0.0;
        let mut xi_sum = S::zero();
        let mut ties = 0;
        for c in &cs {
            let x = xi(locs, c);
            emar += x.to_f64() * c.margin;
            xi_sum = xi_sum + x;
            ties += near_ties(locs, c);
        }
        Ok((emar, xi_sum, cs.len(), ties))
    })?;
    let (emar, xi_sum, configs, near_ties) = tree_reduce(
        parts,
        (0.0, S::zero(), 0, 0),
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
    );
    Ok(EsmResult {
        emar,
        configs,
        xi_sum,
        near_ties,
    })
}

/// Number of possible support sets.
pub fn margin_census_hint<S: Scalar>(locs: &Locations<S>) -> Result<usize> {
    Ok(enumerate_support_configs(locs)?.len())
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

    fn line(points: &[(&str, i64, &str)]) -> Locations<BigRational> {
        let body: Vec<String> = points
            .iter()
            .map(|(c, x, p)| format!(r#"{{"color":"{c}","coords":[{x}],"prob":"{p}"}}"#))
            .collect();
        locs(&format!(
            r#"{{"version":1,"dimension":1,"model":"unipoint","points":[{}]}}"#,
            body.join(",")
        ))
    }

    #[test]
    fn one_red_two_blues_on_a_line() {
        let l = line(&[("red", 0, "1"), ("blue", 1, "1/2"), ("blue", 3, "1")]);
        let cs = support_configs_with_xi(&l).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].members, vec![0, 1]);
        assert_eq!(cs[0].margin_sq, rational(1, 4));
        assert_eq!(cs[0].xi, rational(1, 2));
        assert_eq!(cs[1].members, vec![0, 2]);
        assert_eq!(cs[1].margin_sq, rational(9, 4));
        assert_eq!(cs[1].xi, rational(1, 2));
        let r = expected_separation_margin(&l).unwrap();
        assert!((r.emar - 1.0).abs() < 1e-12);
        assert_eq!(margin_census_hint(&l).unwrap(), 2);
    }

    #[test]
    fn trivial_margins() {
        let l = line(&[("red", 0, "1"), ("blue", 1, "1")]);
        assert!((expected_separation_margin(&l).unwrap().emar - 0.5).abs() < 1e-12);
        let l = line(&[("red", 0, "1"), ("red", 2, "1"), ("blue", 1, "1")]);
        assert_eq!(expected_separation_margin(&l).unwrap().emar, 0.0);
        let l = line(&[("red", 0, "1"), ("red", 2, "1")]);
        assert_eq!(margin_census_hint(&l).unwrap(), 0);
    }

    #[test]
    fn vertical_planes_in_the_plane() {
        let l = locs(
            r#"{"version":1,"dimension":2,"model":"unipoint","points":[
            {"color":"red","coords":[0,0],"prob":"1"},
            {"color":"blue","coords":[2,0],"prob":"1"},
            {"color":"blue","coords":[2,2],"prob":"1"}]}"#,
        );
        let cs = support_configs_with_xi(&l).unwrap();
        let hit: Vec<_> = cs.iter().filter(|c| !c.xi.is_zero()).collect();
        assert_eq!(hit.len(), 1);
        let c = hit[0];
        assert_eq!(c.members, vec![0, 1, 2]);
        assert_eq!(c.margin_sq, rational(1, 1));
        assert!(c.w[1].is_zero());
    }
}
