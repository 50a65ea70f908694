// SPDX-License-Identifier: Apache-2.0

//! Radial-order strategy.
//!
//! For a fixed `(D - 1)`-subset `F`, every candidate through `F` and one more
//! location `p` is a hyperplane of the pencil around `aff(F)`. In the 2-D
//! quotient by `aff(F)` the remaining locations become planar vectors; after
//! folding them into the upper half-plane and sorting by angle, the side of
//! `x` relative to `span(F, p)` depends only on the fold signs and on whether
//! `x` precedes or follows `p`. Two trackers, one per orientation of the
//! forbidden pattern, slide along the sorted order.

use std::cmp::Ordering;

use itertools::Itertools;

use crate::dataset::{Color, Locations, ScenarioTracker};
use crate::error::Result;
use crate::geom::position::Level;
use crate::linalg;
use crate::parallel::{ordered_map, tree_reduce};
use crate::scalar::Scalar;
use crate::sp::{degenerate, is_bichromatic, witness_for};

fn unit<S: Scalar>(d: usize, i: usize) -> Vec<S> {
    let mut e = vec![S::zero(); d];
    e[i] = S::one();
    e
}

fn det_with<S: Scalar>(w: &[Vec<S>], y: Vec<S>, z: Vec<S>) -> S {
    let mut m = w.to_vec();
    m.push(y);
    m.push(z);
    linalg::determinant(m)
}

fn cross2<S: Scalar>(a: &(S, S), b: &(S, S)) -> S {
    a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone()
}

struct Fan<S> {
    sum: S,
    count: u64,
}

fn fan<S: Scalar>(level: &Locations<S>, f: &[usize]) -> Result<Fan<S>> {
    let d = level.dimension;
    let m = level.len();
    let max_f = *f.last().unwrap();
    let f_colors: Vec<Color> = f.iter().map(|&i| level.colors[i]).collect();
    let has = |c: Color| f_colors.contains(&c);
    let wanted = |c: Color| has(c.opposite()) || (has(Color::Red) && has(Color::Blue));
    if !(max_f + 1..m).any(|p| wanted(level.colors[p])) {
        return Ok(Fan {
            sum: S::zero(),
            count: 0,
        });
    }
    let f0 = &level.coords[f[0]];
    let w: Vec<Vec<S>> = f[1..]
        .iter()
        .map(|&i| linalg::sub(&level.coords[i], f0))
        .collect();
    let mut basis = None;
    'search: for a in 0..d {
        for b in a + 1..d {
            let k = det_with(&w, unit(d, a), unit(d, b));
            if k.sign() != 0 {
                basis = Some((a, b, k.sign()));
                break 'search;
            }
        }
    }
    let Some((ga, gb, kappa)) = basis else {
        return Err(degenerate(Level::Gp, 0, d, f));
    };
    let u: Vec<S> = (0..d).map(|i| det_with(&w, unit(d, i), unit(d, gb))).collect();
    let v: Vec<S> = (0..d).map(|i| det_with(&w, unit(d, i), unit(d, ga))).collect();

    let others: Vec<usize> = (0..m).filter(|i| !f.contains(i)).collect();
    let mut folded: Vec<(usize, (S, S), i8)> = Vec::with_capacity(others.len());
    for &x in &others {
        let rel = linalg::sub(&level.coords[x], f0);
        let q = (linalg::dot(&u, &rel), -linalg::dot(&v, &rel));
        let (sx, sy) = (q.0.sign(), q.1.sign());
        if sx == 0 && sy == 0 {
            let mut ids = f.to_vec();
            ids.push(x);
            return Err(degenerate(Level::Gp, 0, d, &ids));
        }
        let s: i8 = if sy > 0 || (sy == 0 && sx > 0) { 1 } else { -1 };
        let q = if s > 0 { q } else { (-q.0, -q.1) };
        folded.push((x, q, s));
    }
    folded.sort_by(|a, b| match cross2(&a.1, &b.1).sign() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    });
    for pair in folded.windows(2) {
        if cross2(&pair[0].1, &pair[1].1).sign() == 0 {
            let mut ids = f.to_vec();
            ids.push(pair[0].0);
            ids.push(pair[1].0);
            return Err(degenerate(Level::Sgpp, 0, d, &ids));
        }
    }
    let a_of = |x: usize, s: i8| -> i8 {
        match level.colors[x] {
            Color::Red => s,
            Color::Blue => -s,
        }
    };
    // trackers[0] for rho = +1, trackers[1] for rho = -1
    let mut trackers = [ScenarioTracker::new(level), ScenarioTracker::new(level)];
    for t in trackers.iter_mut() {
        for &id in f {
            t.add_present(id);
        }
    }
    let rho_of = |k: usize| if k == 0 { 1i8 } else { -1i8 };
    for &(x, _, s) in folded.iter().skip(1) {
        for (k, t) in trackers.iter_mut().enumerate() {
            if a_of(x, s) == -rho_of(k) {
                t.add_absent(x);
            }
        }
    }
    let mut sum = S::zero();
    let mut count = 0u64;
    let mut on_set = f.to_vec();
    on_set.push(0);
    for i in 0..folded.len() {
        let (p, _, sp) = folded[i];
        *on_set.last_mut().unwrap() = p;
        if p > max_f && is_bichromatic(&level.colors, &on_set) {
            count += 1;
            if let Some((_, _, o)) = witness_for(level, &on_set) {
                let side_o = det_with(&w, linalg::sub(&level.coords[p], f0), linalg::sub(&o, f0)).sign();
                if side_o == 0 {
                    return Err(degenerate(Level::Sgpp, 0, d, &on_set));
                }
                let rho = side_o * kappa * sp;
                let t = &mut trackers[if rho > 0 { 0 } else { 1 }];
                t.add_present(p);
                sum = sum + t.probability();
                t.remove_present(p);
            }
        }
        if i + 1 == folded.len() {
            break;
        }
        let (next, _, snext) = folded[i + 1];
        for (k, t) in trackers.iter_mut().enumerate() {
            let rho = rho_of(k);
            if a_of(p, sp) == rho {
                t.add_absent(p);
            }
            if a_of(next, snext) == -rho {
                t.remove_absent(next);
            }
        }
    }
    Ok(Fan { sum, count })
}

/// Sum of tau over one level with the radial strategy; returns `(sum, candidates)`.
pub(crate) fn radial_level<S: Scalar>(level: &Locations<S>) -> Result<(S, u64)> {
    let d = level.dimension;
    let m = level.len();
    let parts = ordered_map(m, |first| {
        let mut sum = S::zero();
        let mut count = 0u64;
        for rest in (first + 1..m).combinations(d - 2) {
            let mut f = Vec::with_capacity(d - 1);
            f.push(first);
            f.extend(rest);
            let r = fan(level, &f)?;
            sum = sum + r.sum;
            count += r.count;
        }
        Ok((sum, count))
    })?;
    Ok(tree_reduce(parts, (S::zero(), 0), |a, b| (a.0 + b.0, a.1 + b.1)))
}
