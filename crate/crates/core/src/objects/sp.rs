// SPDX-License-Identifier: Apache-2.0

//! Separable probability of ball datasets through critical sets.
//!
//! The critical set of an instance is the set of balls tangent to its
//! extreme separator. It has at most `d` balls, contains both colors and
//! determines the separator. In the plane it is one red and one blue ball;
//! in space it has three balls, or two when one radius is positive and the
//! contact points agree in the third coordinate.

use itertools::Itertools;

use crate::dataset::{Color, Dataset, ScenarioTracker};
use crate::error::{Error, Result};
use crate::geom::position::Level;
use crate::linalg;
use crate::objects::{check_ball_dimension, require_ball_position, BallSet};
use crate::parallel::{ordered_map, tree_reduce};
use crate::sp::{coincidence_witness, degenerate, is_bichromatic, orientation_indicator, trivial_term};

/// Directly defined extreme separator `normal . x = offset` of a small ball set;
/// reds lie on the negative side.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSeparator {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// `(a, b)` with `a n_1 + b n_2 = 0`.
    pub aux: (f64, f64),
    /// Tangency point of every ball of the set, in the order given.
    pub contacts: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallSpResult {
    pub sp: f64,
    pub trivial: f64,
    /// Line-level term (space only).
    pub base: f64,
    pub lambda_sum: f64,
    pub critical_sets: u64,
}

fn side(red: bool) -> f64 {
    if red {
        1.0
    } else {
        -1.0
    }
}

fn roots(a: f64, b: f64, c: f64, ids: &[usize], d: usize) -> Result<Vec<f64>> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(1e-300);
    if disc.abs() <= 1e-12 * scale {
        return Err(degenerate(Level::Sgpp, 0, d, ids));
    }
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let s = disc.sqrt();
    Ok(vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)])
}

/// Unit normals `n` with `n . c_i + s_i r_i` equal for every ball, `|set| = d`.
fn tangent_normals(set: &BallSet, ids: &[usize]) -> Result<Vec<Vec<f64>>> {
    let d = set.dimension();
    let c0 = &set.locs.coords[ids[0]];
    let s = |i: usize| side(set.locs.colors[i] == Color::Red) * set.radii[i];
    let rows: Vec<Vec<f64>> = ids[1..]
        .iter()
        .map(|&i| linalg::sub(&set.locs.coords[i], c0))
        .collect();
    let rhs: Vec<f64> = ids[1..].iter().map(|&i| s(ids[0]) - s(i)).collect();
    let k = linalg::cross(&rows, d);
    if linalg::dot(&k, &k) == 0.0 {
        return Err(degenerate(Level::Gp, 0, d, ids));
    }
    // minimum-norm particular solution rows^T (rows rows^T)^-1 rhs
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| linalg::dot(a, b)).collect())
        .collect();
    let y = linalg::solve(gram, rhs).ok_or_else(|| degenerate(Level::Gp, 0, d, ids))?;
    let mut p = vec![0.0; d];
    for (yi, row) in y.iter().zip(&rows) {
        for (pj, rj) in p.iter_mut().zip(row) {
            *pj += yi * rj;
        }
    }
    let ts = roots(linalg::dot(&k, &k), 2.0 * linalg::dot(&p, &k), linalg::dot(&p, &p) - 1.0, ids, d)?;
    Ok(ts
        .into_iter()
        .map(|t| p.iter().zip(&k).map(|(pi, ki)| pi + t * ki).collect())
        .collect())
}

/// Unit normals for one red and one blue ball in space whose contacts share the third coordinate.
fn pair_normals(set: &BallSet, ids: &[usize]) -> Result<Vec<Vec<f64>>> {
    let (r, b) = if set.locs.colors[ids[0]] == Color::Red {
        (ids[0], ids[1])
    } else {
        (ids[1], ids[0])
    };
    let total = set.radii[r] + set.radii[b];
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let dv = linalg::sub(&set.locs.coords[b], &set.locs.coords[r]);
    let n3 = dv[2] / total;
    if n3.abs() >= 1.0 {
        return Ok(Vec::new());
    }
    let rho = (1.0 - n3 * n3).sqrt();
    let len = (dv[0] * dv[0] + dv[1] * dv[1]).sqrt();
    if len == 0.0 {
        return Err(degenerate(Level::Sgpp, 0, 3, ids));
    }
    let along = (total - n3 * dv[2]) / len;
    let across2 = rho * rho - along * along;
    if across2.abs() <= 1e-12 {
        return Err(degenerate(Level::Sgpp, 0, 3, ids));
    }
    if across2 < 0.0 {
        return Ok(Vec::new());
    }
    let across = across2.sqrt();
    let (ux, uy) = (dv[0] / len, dv[1] / len);
    Ok([across, -across]
        .into_iter()
        .map(|a| vec![along * ux - a * uy, along * uy + a * ux, n3])
        .collect())
}

/// The extreme separator of the balls `ids` when it is directly defined and
/// tangent to all of them; `None` otherwise.
pub fn critical_extreme_separator(set: &BallSet, ids: &[usize]) -> Result<Option<CriticalSeparator>> {
    let d = set.dimension();
    check_ball_dimension(d)?;
    if ids.len() > d {
        return Err(Error::InvalidIndexSet(format!(
            "critical sets have at most {d} balls, got {}",
            ids.len()
        )));
    }
    if !is_bichromatic(&set.locs.colors, ids) {
        return Err(Error::InvalidIndexSet("critical sets need both colors".into()));
    }
    let normals = if ids.len() == d {
        tangent_normals(set, ids)?
    } else if d == 3 && ids.len() == 2 {
        pair_normals(set, ids)?
    } else {
        Vec::new()
    };
    let mut found: Option<CriticalSeparator> = None;
    for n in normals {
        let red = |i: usize| set.locs.colors[i] == Color::Red;
        let offset = linalg::dot(&n, &set.locs.coords[ids[0]]) + side(red(ids[0])) * set.radii[ids[0]];
        let contacts: Vec<Vec<f64>> = ids
            .iter()
            .map(|&i| {
                let k = side(red(i)) * set.radii[i];
                set.locs.coords[i].iter().zip(&n).map(|(c, ni)| c + k * ni).collect()
            })
            .collect();
        let pick = |want: bool| -> Vec<Vec<f64>> {
            ids.iter()
                .zip(&contacts)
                .filter(|(&i, _)| red(i) == want)
                .map(|(_, p)| p.clone())
                .collect()
        };
        let witness = if ids.len() == d {
            coincidence_witness(&pick(true), &pick(false))
        } else {
            // a pair in space: the contacts share the third coordinate by construction
            Some((pick(true).remove(0), pick(false).remove(0)))
        };
        let Some((r_hat, b_hat)) = witness else {
            continue;
        };
        let o = orientation_indicator(&r_hat, &b_hat);
        let sigma = linalg::dot(&n, &o) - offset;
        if sigma.abs() <= 1e-12 * set.scale() {
            return Err(degenerate(Level::Sgpp, 0, d, ids));
        }
        if sigma < 0.0 {
            if found.is_some() {
                return Err(degenerate(Level::Sgpp, 0, d, ids));
            }
            found = Some(CriticalSeparator {
                aux: (-n[1], n[0]),
                normal: n,
                offset,
                contacts,
            });
        }
    }
    Ok(found)
}

/// Balls that must be absent for `sep` to be the extreme separator with critical set `ids`.
pub fn lambda_forbidden(set: &BallSet, ids: &[usize], sep: &CriticalSeparator) -> Vec<usize> {
    (0..set.len())
        .filter(|i| !ids.contains(i))
        .filter(|&i| {
            let v = linalg::dot(&sep.normal, &set.locs.coords[i]) - sep.offset;
            let r = set.radii[i];
            match set.locs.colors[i] {
                Color::Red => v + r >= 0.0,
                Color::Blue => v - r <= 0.0,
            }
        })
        .collect()
}

/// Probability that the critical set of the existent balls is `ids`.
pub fn lambda_critical(set: &BallSet, ids: &[usize], sep: &CriticalSeparator) -> f64 {
    let mut t = ScenarioTracker::new(&set.locs);
    for &i in ids {
        t.add_present(i);
    }
    for i in lambda_forbidden(set, ids, sep) {
        t.add_absent(i);
    }
    t.probability()
}

/// Line-level term for the intervals `[c - r, c + r]` of the last coordinate.
fn interval_base(set: &BallSet) -> Result<f64> {
    let last = set.dimension() - 1;
    let lo = |i: usize| set.locs.coords[i][last] - set.radii[i];
    let hi = |i: usize| set.locs.coords[i][last] + set.radii[i];
    let mut total = 0.0;
    for p in 0..set.len() {
        let c = set.locs.colors[p];
        let mut with = ScenarioTracker::new(&set.locs);
        with.add_present(p);
        for q in 0..set.len() {
            if q == p {
                continue;
            }
            if set.locs.colors[q] == c {
                if hi(q) == hi(p) {
                    return Err(degenerate(Level::Sgpp, last, set.dimension(), &[p, q]));
                }
                if hi(q) > hi(p) {
                    with.add_absent(q);
                }
            } else if lo(q) <= hi(p) {
                with.add_absent(q);
            }
        }
        let mut without = with.clone();
        for q in 0..set.len() {
            if set.locs.colors[q] != c && lo(q) > hi(p) {
                without.add_absent(q);
            }
        }
        total += with.probability() - without.probability();
    }
    Ok(total)
}

/// Bichromatic subsets that can be critical sets.
fn critical_candidates(set: &BallSet, first: usize) -> Vec<Vec<usize>> {
    let d = set.dimension();
    let m = set.len();
    let mut out = Vec::new();
    let sizes: &[usize] = if d == 3 { &[2, 3] } else { &[2] };
    for &k in sizes {
        for rest in (first + 1..m).combinations(k - 1) {
            let mut ids = vec![first];
            ids.extend(rest);
            if is_bichromatic(&set.locs.colors, &ids) {
                out.push(ids);
            }
        }
    }
    out
}

/// `Sep(S) = Sep(projection) + sum of lambda over critical sets`, in float.
pub fn ball_sp_of_set(set: &BallSet) -> Result<BallSpResult> {
    let d = set.dimension();
    check_ball_dimension(d)?;
    let parts = ordered_map(set.len(), |first| {
        let mut sum = 0.0;
        let mut count = 0u64;
        for ids in critical_candidates(set, first) {
            count += 1;
            if let Some(sep) = critical_extreme_separator(set, &ids)? {
                sum += lambda_critical(set, &ids, &sep);
            }
        }
        Ok((sum, count))
    })?;
    let (lambda_sum, critical_sets) = tree_reduce(parts, (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let trivial = trivial_term(&set.locs);
    let base = if d == 3 { interval_base(set)? } else { 0.0 };
    Ok(BallSpResult {
        sp: trivial + base + lambda_sum,
        trivial,
        base,
        lambda_sum,
        critical_sets,
    })
}

/// Separable probability of a dataset with balls (points and polytopes allowed).
pub fn ball_separable_probability(ds: &Dataset) -> Result<BallSpResult> {
    check_ball_dimension(ds.dimension)?;
    require_ball_position(ds, Level::Sgpp)?;
    ball_sp_of_set(&BallSet::from_dataset(ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::json::parse_dataset;

    fn ds(d: usize, objects: &str) -> Dataset {
        let doc = format!(r#"{{"version":1,"dimension":{d},"model":"unipoint","objects":[{objects}]}}"#);
        parse_dataset(doc.as_bytes()).unwrap()
    }

    fn ball(color: &str, prob: &str, c: &str, r: &str) -> String {
        format!(r#"{{"color":"{color}","prob":"{prob}","shape":{{"type":"ball","center":{c},"radius":"{r}"}}}}"#)
    }

    #[test]
    fn overlapping_disk_must_be_absent() {
        let d = ds(
            2,
            &[
                ball("red", "1", "[0,0]", "1/2"),
                ball("blue", "1/2", r#"["3/5","1/10"]"#, "1/2"),
                ball("blue", "1", "[3,0]", "1/2"),
            ]
            .join(","),
        );
        let r = ball_separable_probability(&d).unwrap();
        assert!((r.sp - 0.5).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn two_disks() {
        let apart = ds(2, &[ball("red", "1", "[0,0]", "1"), ball("blue", "1", "[4,1]", "1")].join(","));
        assert!((ball_separable_probability(&apart).unwrap().sp - 1.0).abs() < 1e-12);
        let overlap = ds(2, &[ball("red", "1", "[0,0]", "1"), ball("blue", "1", "[1,1]", "1")].join(","));
        assert!(ball_separable_probability(&overlap).unwrap().sp.abs() < 1e-12);
    }

    #[test]
    fn inner_tangent_is_the_critical_separator() {
        let d = ds(2, &[ball("red", "1", "[0,0]", "1"), ball("blue", "1", "[4,0]", "1")].join(","));
        let set = BallSet::from_dataset(&d);
        let sep = critical_extreme_separator(&set, &[0, 1]).unwrap().unwrap();
        // tangent to both disks, reds on the negative side
        let dist = |i: usize| linalg::dot(&sep.normal, &set.locs.coords[i]) - sep.offset;
        assert!((dist(0) + 1.0).abs() < 1e-12);
        assert!((dist(1) - 1.0).abs() < 1e-12);
        // the normal is the center direction rotated counterclockwise by 60 degrees
        assert!((sep.normal[0] - 0.5).abs() < 1e-12);
        assert!((sep.normal[1] - 0.75f64.sqrt()).abs() < 1e-12);
    }
}
