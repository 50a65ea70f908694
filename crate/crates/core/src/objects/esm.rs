// SPDX-License-Identifier: Apache-2.0

//! Expected separation-margin of ball datasets.
//!
//! Same decomposition as for points: every separable instance has a unique
//! support set, and the engine sums `xi(C) * Mar(C)` over the sets that can
//! be one. A support plane is tangent to each of its balls; the margin is half
//! the distance between the two hulls.

use itertools::Itertools;

use crate::dataset::{Color, Dataset, ScenarioTracker};
use crate::error::Result;
use crate::geom::position::Level;
use crate::linalg;
use crate::objects::{check_ball_dimension, hull_distance, require_ball_position, BallSet};
use crate::parallel::{ordered_map, tree_reduce};
use crate::sp::{degenerate, is_bichromatic};

/// A possible support set of balls. Reds lie on `normal . x <= beta_r`,
/// blues on `normal . x >= beta_b`, and `normal` is a unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSupportConfig {
    pub members: Vec<usize>,
    pub normal: Vec<f64>,
    pub beta_r: f64,
    pub beta_b: f64,
    pub margin: f64,
    pub xi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallEsmResult {
    pub emar: f64,
    pub configs: Vec<BallSupportConfig>,
    pub xi_sum: f64,
}

// GJK normals carry square-root error, so tangency is judged loosely
fn contact_tolerance(set: &BallSet) -> f64 {
    1e-7 * set.scale()
}

fn red(set: &BallSet, i: usize) -> bool {
    set.locs.colors[i] == Color::Red
}

/// Signed slack of ball `i` against its support plane; zero when tangent,
/// negative when it crosses into the gap.
fn slack(set: &BallSet, i: usize, n: &[f64], beta_r: f64, beta_b: f64) -> f64 {
    let v = linalg::dot(n, &set.locs.coords[i]);
    if red(set, i) {
        beta_r - (v + set.radii[i])
    } else {
        (v - set.radii[i]) - beta_b
    }
}

fn planes_of(set: &BallSet, ids: &[usize]) -> Option<(f64, Vec<f64>, f64, f64)> {
    let reds = set.balls_of(ids, Color::Red);
    let blues = set.balls_of(ids, Color::Blue);
    let h = hull_distance(&reds, &blues);
    if !h.separable {
        return None;
    }
    let n = h.normal;
    let beta_r = reds
        .iter()
        .map(|(c, r)| linalg::dot(&n, c) + r)
        .fold(f64::NEG_INFINITY, f64::max);
    let beta_b = blues
        .iter()
        .map(|(c, r)| linalg::dot(&n, c) - r)
        .fold(f64::INFINITY, f64::min);
    Some((h.distance, n, beta_r, beta_b))
}

/// Sets of at most `d` balls that are their own support set.
fn small_configs(set: &BallSet, first: usize) -> Vec<BallSupportConfig> {
    let d = set.dimension();
    let tol = contact_tolerance(set);
    let mut out = Vec::new();
    for k in 2..=d {
        for rest in (first + 1..set.len()).combinations(k - 1) {
            let mut ids = vec![first];
            ids.extend(rest);
            if !is_bichromatic(&set.locs.colors, &ids) {
                continue;
            }
            let Some((dist, n, beta_r, beta_b)) = planes_of(set, &ids) else {
                continue;
            };
            if ids.iter().all(|&i| slack(set, i, &n, beta_r, beta_b).abs() <= tol) {
                out.push(BallSupportConfig {
                    members: ids,
                    normal: n,
                    beta_r,
                    beta_b,
                    margin: dist / 2.0,
                    xi: 0.0,
                });
            }
        }
    }
    out
}

/// Plane pairs tangent to the `d + 1` balls of `tuple` with the gap open.
fn tuple_planes(set: &BallSet, tuple: &[usize]) -> Result<Vec<(Vec<f64>, f64, f64)>> {
    let d = set.dimension();
    let cols = d + 2;
    let mut rows = Vec::with_capacity(tuple.len());
    let mut rhs = Vec::with_capacity(tuple.len());
    for &i in tuple {
        let mut row = set.locs.coords[i].clone();
        row.extend([0.0, 0.0]);
        if red(set, i) {
            row[d] = -1.0;
            rhs.push(-set.radii[i]);
        } else {
            row[d + 1] = -1.0;
            rhs.push(set.radii[i]);
        }
        rows.push(row);
    }
    let ker = linalg::kernel(rows.clone(), cols);
    if ker.len() != 1 {
        return Err(degenerate(Level::Gp, 0, d, tuple));
    }
    let k = &ker[0];
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| linalg::dot(a, b)).collect())
        .collect();
    let y = linalg::solve(gram, rhs).ok_or_else(|| degenerate(Level::Gp, 0, d, tuple))?;
    let mut p = vec![0.0; cols];
    for (yi, row) in y.iter().zip(&rows) {
        for (pj, rj) in p.iter_mut().zip(row) {
            *pj += yi * rj;
        }
    }
    let (pn, kn) = (&p[..d], &k[..d]);
    let a = linalg::dot(kn, kn);
    let b = 2.0 * linalg::dot(pn, kn);
    let c = linalg::dot(pn, pn) - 1.0;
    let disc = b * b - 4.0 * a * c;
    if a == 0.0 || disc < 0.0 {
        return Ok(Vec::new());
    }
    let s = disc.sqrt();
    let mut out = Vec::new();
    for t in [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)] {
        let u: Vec<f64> = p.iter().zip(k).map(|(pi, ki)| pi + t * ki).collect();
        if u[d + 1] - u[d] > 0.0 {
            out.push((u[..d].to_vec(), u[d], u[d + 1]));
        }
    }
    Ok(out)
}

/// Support sets of more than `d` balls whose `d + 1` smallest ids start at `first`.
fn large_configs(set: &BallSet, first: usize) -> Result<Vec<BallSupportConfig>> {
    let d = set.dimension();
    let tol = contact_tolerance(set);
    let mut out = Vec::new();
    for rest in (first + 1..set.len()).combinations(d) {
        let mut tuple = vec![first];
        tuple.extend(rest);
        if !is_bichromatic(&set.locs.colors, &tuple) {
            continue;
        }
        let last = *tuple.last().unwrap();
        for (n, beta_r, beta_b) in tuple_planes(set, &tuple)? {
            let extras: Vec<usize> = (last + 1..set.len())
                .filter(|&i| slack(set, i, &n, beta_r, beta_b).abs() <= tol)
                .collect();
            for k in 0..=extras.len() {
                for more in extras.iter().copied().combinations(k) {
                    let mut ids = tuple.clone();
                    ids.extend(more);
                    let Some((dist, _, _, _)) = planes_of(set, &ids) else {
                        continue;
                    };
                    if (dist - (beta_b - beta_r)).abs() > tol {
                        continue;
                    }
                    out.push(BallSupportConfig {
                        members: ids,
                        normal: n.clone(),
                        beta_r,
                        beta_b,
                        margin: (beta_b - beta_r) / 2.0,
                        xi: 0.0,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every possible support set, in order of smallest member.
pub fn ball_support_configs(set: &BallSet) -> Result<Vec<BallSupportConfig>> {
    check_ball_dimension(set.dimension())?;
    let parts = ordered_map(set.len(), |first| {
        let mut v = small_configs(set, first);
        v.extend(large_configs(set, first)?);
        Ok(v)
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Probability that the support set of the existent balls is `cfg.members`.
pub fn ball_xi(set: &BallSet, cfg: &BallSupportConfig) -> f64 {
    let tol = contact_tolerance(set);
    let mut t = ScenarioTracker::new(&set.locs);
    for &i in &cfg.members {
        t.add_present(i);
    }
    for i in (0..set.len()).filter(|i| !cfg.members.contains(i)) {
        if slack(set, i, &cfg.normal, cfg.beta_r, cfg.beta_b) <= tol {
            t.add_absent(i);
        }
    }
    t.probability()
}

pub fn ball_esm_of_set(set: &BallSet) -> Result<BallEsmResult> {
    let mut configs = ball_support_configs(set)?;
    let xs = ordered_map(configs.len(), |i| Ok(ball_xi(set, &configs[i])))?;
    for (c, x) in configs.iter_mut().zip(&xs) {
        c.xi = *x;
    }
    let terms: Vec<(f64, f64)> = configs.iter().map(|c| (c.xi * c.margin, c.xi)).collect();
    let (emar, xi_sum) = tree_reduce(terms, (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(BallEsmResult { emar, configs, xi_sum })
}

/// Expected separation-margin of a dataset with balls; inseparable and
/// single-colored instances count as margin zero.
pub fn ball_expected_margin(ds: &Dataset) -> Result<BallEsmResult> {
    check_ball_dimension(ds.dimension)?;
    require_ball_position(ds, Level::Gp)?;
    ball_esm_of_set(&BallSet::from_dataset(ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::json::parse_dataset;

    fn ds(d: usize, objects: &[String]) -> Dataset {
        let doc = format!(
            r#"{{"version":1,"dimension":{d},"model":"unipoint","objects":[{}]}}"#,
            objects.join(",")
        );
        parse_dataset(doc.as_bytes()).unwrap()
    }

    fn ball(color: &str, prob: &str, c: &str, r: &str) -> String {
        format!(r#"{{"color":"{color}","prob":"{prob}","shape":{{"type":"ball","center":{c},"radius":"{r}"}}}}"#)
    }

    #[test]
    fn two_disks() {
        let d = ds(2, &[ball("red", "1", "[0,0]", "1/2"), ball("blue", "1", "[3,0]", "1/2")]);
        let r = ball_expected_margin(&d).unwrap();
        assert!((r.emar - 1.0).abs() < 1e-12, "{r:?}");
        let d = ds(2, &[ball("red", "1", "[0,0]", "1/2"), ball("blue", "1/2", "[3,0]", "1/2")]);
        let r = ball_expected_margin(&d).unwrap();
        assert!((r.emar - 0.5).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn support_pair_and_triple() {
        // two red disks stacked against a far blue disk: the triple is a support set
        let d = ds(
            2,
            &[
                ball("red", "1", "[0,1]", "1"),
                ball("red", "1", r#"["1/10",-1]"#, "1"),
                ball("blue", "1/2", "[5,0]", "1/2"),
                ball("blue", "1", "[9,1]", "1/4"),
            ],
        );
        let set = BallSet::from_dataset(&d);
        let r = ball_esm_of_set(&set).unwrap();
        // exactly one support set is realized in each of the two instances
        assert!((r.xi_sum - 1.0).abs() < 1e-9, "{r:?}");
        let near = r.configs.iter().find(|c| c.members.contains(&2) && c.xi > 0.0).unwrap();
        let far = r.configs.iter().find(|c| !c.members.contains(&2) && c.xi > 0.0).unwrap();
        let expect = |ids: &[usize]| {
            let h = hull_distance(&set.balls_of(ids, Color::Red), &set.balls_of(ids, Color::Blue));
            h.distance / 2.0
        };
        assert!((near.margin - expect(&[0, 1, 2])).abs() < 1e-9);
        assert!((far.margin - expect(&[0, 1, 3])).abs() < 1e-9);
        assert!((r.emar - 0.5 * near.margin - 0.5 * far.margin).abs() < 1e-9);
    }
}
