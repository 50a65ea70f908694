// SPDX-License-Identifier: Apache-2.0

//! One-dimensional base case.
//!
//! A separable instance on the line with both colors present has a smallest
//! weak separator: the rightmost point of the color lying on the left. That
//! point `p` is charged when every same-colored location to its right and
//! every opposite-colored location to its left is absent and at least one
//! opposite-colored location to its right exists.

use crate::dataset::{Color, Locations, ScenarioTracker};
use crate::error::Result;
use crate::geom::position::Level;
use crate::scalar::Scalar;
use crate::sp::degenerate;

fn color_index(c: Color) -> usize {
    match c {
        Color::Red => 0,
        Color::Blue => 1,
    }
}

/// Sum of the base-case charges, excluding the trivial term.
pub fn sp_base_1d<S: Scalar>(locs: &Locations<S>) -> Result<S> {
    let m = locs.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        locs.coords[a][0]
            .partial_cmp(&locs.coords[b][0])
            .expect("comparable coordinates")
    });
    for w in order.windows(2) {
        let gap = locs.coords[w[1]][0].clone() - locs.coords[w[0]][0].clone();
        if gap.sign() == 0 {
            return Err(degenerate(Level::Gp, 0, locs.dimension, w));
        }
    }
    // per color of p: [same color right + opposite left absent, everything right + opposite left absent]
    let mut trackers: Vec<[ScenarioTracker<'_, S>; 2]> = (0..2)
        .map(|_| [ScenarioTracker::new(locs), ScenarioTracker::new(locs)])
        .collect();
    for (c, pair) in [Color::Red, Color::Blue].into_iter().zip(trackers.iter_mut()) {
        for &id in order.iter().skip(1) {
            if locs.colors[id] == c {
                pair[0].add_absent(id);
            }
            pair[1].add_absent(id);
        }
    }
    let mut total = S::zero();
    for i in 0..m {
        let p = order[i];
        let pair = &mut trackers[color_index(locs.colors[p])];
        pair[0].add_present(p);
        pair[1].add_present(p);
        total = total + pair[0].probability() - pair[1].probability();
        pair[0].remove_present(p);
        pair[1].remove_present(p);
        if i + 1 == m {
            break;
        }
        let next = order[i + 1];
        for (c, pair) in [Color::Red, Color::Blue].into_iter().zip(trackers.iter_mut()) {
            if locs.colors[p] != c {
                pair[0].add_absent(p);
                pair[1].add_absent(p);
            }
            if locs.colors[next] == c {
                pair[0].remove_absent(next);
            }
            pair[1].remove_absent(next);
        }
    }
    Ok(total)
}
