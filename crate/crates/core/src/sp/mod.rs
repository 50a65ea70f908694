// SPDX-License-Identifier: Apache-2.0

//! Separable-probability engine.
//!
//! Every separable instance is charged to exactly one extreme separator.
//! At a level of dimension `D >= 3` the candidates are hyperplanes through a
//! bichromatic `D`-subset; instances not charged there are passed to the
//! projection that drops the first two coordinates. The bottom level is
//! either the plane (pairs only) or the line (sorted sweep).

mod base;
mod extreme;
mod radial;

use itertools::Itertools;
use serde::Serialize;

use crate::dataset::{Color, Locations, Scenario, ScenarioTracker};
use crate::error::{Error, Result};
use crate::geom::position::{Level, PositionReport, Violation};
use crate::geom::{span_hyperplane, Hyperplane, Point};
use crate::linalg;
use crate::parallel::{ordered_map, tree_reduce};
use crate::scalar::Scalar;

pub use base::sp_base_1d;
pub use extreme::{charges, extreme_separator, Charge, ChargeTable, ExtremeSeparator, SeparatorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One full pass over the locations per candidate.
    Scan,
    /// Fix `D - 1` locations, sort the rest radially and slide a window.
    Radial,
}

/// Contribution of one recursion level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTerms<S> {
    pub dimension: usize,
    /// Nonzero only at the bottom level.
    pub trivial: S,
    pub tau_sum: S,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpResult<S> {
    pub sp: S,
    pub per_level: Vec<LevelTerms<S>>,
    pub strategy: Strategy,
}

/// A candidate extreme separator at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSeparator<S> {
    /// Location ids spanning the hyperplane.
    pub on_set: Vec<usize>,
    pub hyperplane: Hyperplane<S>,
    /// `(a, b)` with `a n_1 + b n_2 = 0`.
    pub aux: (S, S),
    pub witness: Option<(Point<S>, Point<S>)>,
    pub indicator: Option<Point<S>>,
}

/// `P(no red) + P(no blue) - P(nothing)`.
pub fn trivial_term<S: Scalar>(locs: &Locations<S>) -> S {
    let absent = |ids: Vec<usize>| {
        let mut t = ScenarioTracker::new(locs);
        for id in ids {
            t.add_absent(id);
        }
        t.probability()
    };
    absent(locs.ids_of(Color::Red)) + absent(locs.ids_of(Color::Blue))
        - absent((0..locs.len()).collect())
}

pub(crate) fn degenerate(level: Level, first_coord: usize, d: usize, ids: &[usize]) -> Error {
    let mut tuple: Vec<usize> = ids.iter().map(|i| i + 1).collect();
    tuple.sort_unstable();
    Error::Degenerate(Box::new(PositionReport {
        violations: vec![Violation {
            level,
            projection: (first_coord + 1..=d).collect(),
            tuple,
        }],
        truncated: false,
    }))
}

pub(crate) fn is_bichromatic(colors: &[Color], ids: &[usize]) -> bool {
    ids.iter().any(|&i| colors[i] == Color::Red) && ids.iter().any(|&i| colors[i] == Color::Blue)
}

/// Convex coefficients making the trailing `D - 2` coordinates of the red and blue
/// combinations coincide; `(r_hat, b_hat)`.
pub fn coincidence_witness<S: Scalar>(
    reds: &[Point<S>],
    blues: &[Point<S>],
) -> Option<(Point<S>, Point<S>)> {
    let d = reds.first()?.len();
    let k = reds.len() + blues.len();
    if blues.is_empty() || k != d {
        return None;
    }
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(d);
    let mut rhs = Vec::with_capacity(d);
    let mut row = vec![S::zero(); k];
    for v in row.iter_mut().take(reds.len()) {
        *v = S::one();
    }
    rows.push(row);
    rhs.push(S::one());
    let mut row = vec![S::zero(); k];
    for v in row.iter_mut().skip(reds.len()) {
        *v = S::one();
    }
    rows.push(row);
    rhs.push(S::one());
    for j in 2..d {
        let row = reds
            .iter()
            .map(|r| r[j].clone())
            .chain(blues.iter().map(|b| -b[j].clone()))
            .collect();
        rows.push(row);
        rhs.push(S::zero());
    }
    let coeffs = linalg::solve(rows, rhs)?;
    if coeffs.iter().any(|c| c.sign() < 0) {
        return None;
    }
    let (alpha, beta) = coeffs.split_at(reds.len());
    let mix = |w: &[S], pts: &[Point<S>]| {
        let mut x = vec![S::zero(); d];
        for (wi, p) in w.iter().zip(pts) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi = xi.clone() + wi.clone() * pi.clone();
            }
        }
        x
    };
    Some((mix(alpha, reds), mix(beta, blues)))
}

/// The point `o` whose side of the candidate tells which side reds must avoid.
pub fn orientation_indicator<S: Scalar>(r_hat: &[S], b_hat: &[S]) -> Point<S> {
    let mut o = r_hat.to_vec();
    o[0] = r_hat[0].clone() + (b_hat[1].clone() - r_hat[1].clone());
    o[1] = r_hat[1].clone() + (r_hat[0].clone() - b_hat[0].clone());
    o
}

/// Witness and indicator for an on-set given by ids into `level` (coordinates of one level).
pub(crate) fn witness_for<S: Scalar>(
    level: &Locations<S>,
    on_set: &[usize],
) -> Option<(Point<S>, Point<S>, Point<S>)> {
    let reds: Vec<Point<S>> = on_set
        .iter()
        .filter(|&&i| level.colors[i] == Color::Red)
        .map(|&i| level.coords[i].clone())
        .collect();
    let blues: Vec<Point<S>> = on_set
        .iter()
        .filter(|&&i| level.colors[i] == Color::Blue)
        .map(|&i| level.coords[i].clone())
        .collect();
    let (r, b) = coincidence_witness(&reds, &blues)?;
    let o = orientation_indicator(&r, &b);
    Some((r, b, o))
}

/// Builds the candidate spanned by `on_set` in the coordinates of `level`.
pub fn candidate<S: Scalar>(level: &Locations<S>, on_set: &[usize]) -> Result<CandidateSeparator<S>> {
    let pts: Vec<Point<S>> = on_set.iter().map(|&i| level.coords[i].clone()).collect();
    let hyperplane = span_hyperplane(&pts).map_err(|_| degenerate(Level::Gp, 0, level.dimension, on_set))?;
    let aux = (-hyperplane.normal[1].clone(), hyperplane.normal[0].clone());
    let w = witness_for(level, on_set);
    Ok(CandidateSeparator {
        on_set: on_set.to_vec(),
        aux,
        witness: w.as_ref().map(|(r, b, _)| (r.clone(), b.clone())),
        indicator: w.map(|(_, _, o)| o),
        hyperplane,
    })
}

/// Bichromatic `D`-subsets of a level, each with its candidate data (`D >= 2`).
pub fn enumerate_candidates<S: Scalar>(level: &Locations<S>) -> Result<Vec<CandidateSeparator<S>>> {
    let d = level.dimension;
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    (0..level.len())
        .combinations(d)
        .filter(|e| is_bichromatic(&level.colors, e))
        .map(|e| candidate(level, &e))
        .collect()
}

/// Ids that must be absent for the candidate to be the extreme separator.
///
/// Errors if a location outside the on-set lies on the hyperplane.
pub fn forbidden_ids<S: Scalar>(level: &Locations<S>, c: &CandidateSeparator<S>) -> Result<Option<Vec<usize>>> {
    let Some(o) = &c.indicator else {
        return Ok(None);
    };
    let sigma = c.hyperplane.eval(o).sign();
    let mut out = Vec::new();
    for id in 0..level.len() {
        if c.on_set.contains(&id) {
            continue;
        }
        let s = c.hyperplane.eval(&level.coords[id]).sign();
        if s == 0 {
            let mut ids = c.on_set.clone();
            ids.push(id);
            return Err(degenerate(Level::Sgpp, 0, level.dimension, &ids));
        }
        let bad = match level.colors[id] {
            Color::Red => s == -sigma,
            Color::Blue => s == sigma,
        };
        if bad {
            out.push(id);
        }
    }
    Ok(Some(out))
}

/// Probability that the candidate is the extreme separator of the existent points.
pub fn tau<S: Scalar>(level: &Locations<S>, c: &CandidateSeparator<S>) -> Result<S> {
    match forbidden_ids(level, c)? {
        None => Ok(S::zero()),
        Some(absent) => {
            crate::dataset::scenario_probability(level, &Scenario::new(c.on_set.clone(), absent))
        }
    }
}

fn scan_level<S: Scalar>(level: &Locations<S>) -> Result<(S, u64)> {
    let d = level.dimension;
    let m = level.len();
    let parts = ordered_map(m, |first| {
        let mut sum = S::zero();
        let mut count = 0u64;
        for rest in (first + 1..m).combinations(d - 1) {
            let mut e = Vec::with_capacity(d);
            e.push(first);
            e.extend(rest);
            if !is_bichromatic(&level.colors, &e) {
                continue;
            }
            count += 1;
            let c = candidate(level, &e)?;
            sum = sum + tau(level, &c)?;
        }
        Ok((sum, count))
    })?;
    Ok(tree_reduce(parts, (S::zero(), 0), |a, b| (a.0 + b.0, a.1 + b.1)))
}

/// Number of bichromatic `k`-subsets of `r` reds and `b` blues.
pub fn bichromatic_subsets(r: u64, b: u64, k: u64) -> u64 {
    binomial(r + b, k) - binomial(r, k) - binomial(b, k)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Total candidate count over all levels, for guard rails.
pub fn candidate_budget(r: u64, b: u64, d: usize) -> u64 {
    let mut total = 0u64;
    let mut dim = d;
    while dim >= 2 {
        total = total.saturating_add(bichromatic_subsets(r, b, dim as u64));
        if dim == 2 {
            break;
        }
        dim -= 2;
    }
    total
}

/// Separable-probability of a location set in SGPP.
pub fn separable_probability<S: Scalar>(locs: &Locations<S>, strategy: Strategy) -> Result<SpResult<S>> {
    let d = locs.dimension;
    if d < 1 {
        return Err(Error::UnsupportedDimension(d));
    }
    let report = locs.validate(Level::Sgpp);
    if !report.passes() {
        return Err(Error::Degenerate(Box::new(report)));
    }
    let mut per_level = Vec::new();
    let mut dim = d;
    loop {
        let level = locs.drop_leading(d - dim);
        if dim == 1 {
            let base = sp_base_1d(&level)?;
            per_level.push(LevelTerms {
                dimension: 1,
                trivial: trivial_term(locs),
                tau_sum: base,
                candidates: level.len() as u64,
            });
            break;
        }
        let (tau_sum, candidates) = match strategy {
            Strategy::Scan => scan_level(&level)?,
            Strategy::Radial => radial::radial_level(&level)?,
        };
        let bottom = dim == 2;
        per_level.push(LevelTerms {
            dimension: dim,
            trivial: if bottom { trivial_term(locs) } else { S::zero() },
            tau_sum,
            candidates,
        });
        if bottom {
            break;
        }
        dim -= 2;
    }
    let sp = per_level
        .iter()
        .fold(S::zero(), |acc, l| acc + l.trivial.clone() + l.tau_sum.clone());
    Ok(SpResult {
        sp,
        per_level,
        strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::json::parse_dataset;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn locs(doc: &str) -> Locations<BigRational> {
        parse_dataset(doc.as_bytes()).unwrap().locations().unwrap()
    }

    const LINE: &str = r#"{"version":1,"dimension":1,"model":"unipoint","points":[
        {"color":"red","coords":[0],"prob":"1/2"},
        {"color":"red","coords":[2],"prob":"1/2"},
        {"color":"blue","coords":[1],"prob":"1"}]}"#;

    const TRIANGLE: &str = r#"{"version":1,"dimension":2,"model":"unipoint","points":[
        {"color":"red","coords":[0,0],"prob":"1/2"},
        {"color":"blue","coords":[2,0],"prob":"1/2"},
        {"color":"blue","coords":[1,1],"prob":"1/2"}]}"#;

    #[test]
    fn line_example() {
        let l = locs(LINE);
        for s in [Strategy::Scan, Strategy::Radial] {
            assert_eq!(separable_probability(&l, s).unwrap().sp, rational(3, 4));
        }
        let f = separable_probability(&l.to_scalar::<f64>(), Strategy::Scan).unwrap();
        assert!((f.sp - 0.75).abs() < 1e-12);
    }

    #[test]
    fn triangle_decomposition() {
        let l = locs(TRIANGLE);
        let r = separable_probability(&l, Strategy::Scan).unwrap();
        assert_eq!(r.sp, rational(1, 1));
        assert_eq!(r.per_level.len(), 1);
        assert_eq!(r.per_level[0].trivial, rational(5, 8));
        assert_eq!(r.per_level[0].tau_sum, rational(3, 8));
        assert_eq!(r.per_level[0].candidates, 2);
        let c = enumerate_candidates(&l).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(tau(&l, &c[0]).unwrap(), rational(1, 4));
        assert_eq!(tau(&l, &c[1]).unwrap(), rational(1, 8));
        assert_eq!(c[0].indicator.as_ref().unwrap(), &vec![rational(0, 1), rational(-2, 1)]);
        assert_eq!(separable_probability(&l, Strategy::Radial).unwrap().sp, rational(1, 1));
    }

    #[test]
    fn trivial_term_examples() {
        let l = locs(
            r#"{"version":1,"dimension":1,"model":"unipoint","points":[
            {"color":"red","coords":[0],"prob":"1/2"},{"color":"blue","coords":[1],"prob":"1/2"}]}"#,
        );
        assert_eq!(trivial_term(&l), rational(3, 4));
        let l = locs(
            r#"{"version":1,"dimension":1,"model":"unipoint","points":[
            {"color":"red","coords":[0],"prob":"1"},{"color":"blue","coords":[1],"prob":"1"}]}"#,
        );
        assert_eq!(trivial_term(&l), rational(0, 1));
        let l = locs(r#"{"version":1,"dimension":2,"model":"unipoint"}"#);
        assert_eq!(trivial_term(&l), rational(1, 1));
    }

    #[test]
    fn witness_examples() {
        let p = |c: &[i64]| c.iter().map(|&v| rational(v, 1)).collect::<Vec<_>>();
        let (r, b) = coincidence_witness(&[p(&[0, 0])], &[p(&[2, 0])]).unwrap();
        assert_eq!((r, b), (p(&[0, 0]), p(&[2, 0])));
        assert!(coincidence_witness(&[p(&[0, 0, 0])], &[p(&[1, 0, 1]), p(&[0, 1, 2])]).is_none());
        let (_, b) = coincidence_witness(&[p(&[0, 0, 1])], &[p(&[1, 0, 0]), p(&[0, 1, 2])]).unwrap();
        assert_eq!(b, vec![rational(1, 2), rational(1, 2), rational(1, 1)]);
        assert_eq!(orientation_indicator(&p(&[0, 0]), &p(&[1, 1])), p(&[1, -1]));
    }

    #[test]
    fn candidate_counts() {
        let l = locs(
            r#"{"version":1,"dimension":3,"model":"unipoint","points":[
            {"color":"red","coords":[0,0,0],"prob":"1"},{"color":"red","coords":[1,0,0],"prob":"1"},
            {"color":"blue","coords":[0,1,0],"prob":"1"},{"color":"blue","coords":[0,0,1],"prob":"1"}]}"#,
        );
        assert_eq!(enumerate_candidates(&l).unwrap().len(), 4);
        assert_eq!(bichromatic_subsets(3, 10, 3), 286 - 1 - 120);
    }

    #[test]
    fn one_color_gives_one() {
        let l = locs(
            r#"{"version":1,"dimension":2,"model":"unipoint","points":[
            {"color":"blue","coords":[0,0],"prob":"1/3"},{"color":"blue","coords":[1,0],"prob":"1/2"}]}"#,
        );
        assert_eq!(separable_probability(&l, Strategy::Radial).unwrap().sp, rational(1, 1));
        assert!(enumerate_candidates(&l).unwrap().is_empty());
    }
}
