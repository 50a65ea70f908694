// SPDX-License-Identifier: Apache-2.0

//! Distance between convex hulls of balls.
//!
//! Gilbert's iteration on the Minkowski difference `CH(reds) - CH(blues)`,
//! which is the hull of the balls `B(c_r - c_b, d_r + d_b)`. The inner
//! simplex problem is solved by trying every face, which is cheap for the
//! small dimensions the ball engines support.

use crate::linalg;

/// A ball as `(center, radius)` in float coordinates.
pub type FloatBall = (Vec<f64>, f64);

#[derive(Clone, Debug)]
pub struct HullDistance {
    /// Certified by a strictly separating direction.
    pub separable: bool,
    pub distance: f64,
    /// Closest point of the red hull.
    pub red_point: Vec<f64>,
    pub blue_point: Vec<f64>,
    /// Unit normal pointing from the red hull towards the blue hull.
    pub normal: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    linalg::dot(v, v).sqrt()
}

/// Point of `balls` minimizing (`sign = 1`) or maximizing (`sign = -1`) `u . p`.
fn extreme(balls: &[FloatBall], u: &[f64], sign: f64) -> Vec<f64> {
    let un = norm(u);
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (i, (c, r)) in balls.iter().enumerate() {
        let v = sign * linalg::dot(u, c) - r * un;
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    let (c, r) = &balls[best];
    if un == 0.0 {
        return c.clone();
    }
    c.iter().zip(u).map(|(ci, ui)| ci - sign * r * ui / un).collect()
}

/// Minimum-norm point of the hull of `pts` as convex weights.
fn min_norm_weights(pts: &[Vec<f64>]) -> Vec<f64> {
    let k = pts.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<&Vec<f64>> = idx.iter().map(|&i| &pts[i]).collect();
        let p0 = sub[0];
        let v: Vec<Vec<f64>> = sub[1..].iter().map(|p| linalg::sub(p, p0)).collect();
        let gram: Vec<Vec<f64>> = v
            .iter()
            .map(|a| v.iter().map(|b| linalg::dot(a, b)).collect())
            .collect();
        let rhs: Vec<f64> = v.iter().map(|a| -linalg::dot(a, p0)).collect();
        let mu = if v.is_empty() {
            Vec::new()
        } else {
            match linalg::solve(gram, rhs) {
                Some(mu) => mu,
                None => continue,
            }
        };
        let first = 1.0 - mu.iter().sum::<f64>();
        if first < -1e-12 || mu.iter().any(|m| *m < -1e-12) {
            continue;
        }
        let mut w = vec![0.0; k];
        w[idx[0]] = first.max(0.0);
        for (j, m) in mu.iter().enumerate() {
            w[idx[j + 1]] = m.max(0.0);
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let x = combine(&w, pts);
        let nn = linalg::dot(&x, &x);
        if best.as_ref().is_none_or(|(b, _)| nn < *b) {
            best = Some((nn, w));
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| {
        let mut w = vec![0.0; k];
        w[0] = 1.0;
        w
    })
}

fn combine(w: &[f64], pts: &[Vec<f64>]) -> Vec<f64> {
    let d = pts[0].len();
    let mut x = vec![0.0; d];
    for (wi, p) in w.iter().zip(pts) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += wi * pi;
        }
    }
    x
}

/// Distance between the hulls of two nonempty ball sets.
pub fn hull_distance(reds: &[FloatBall], blues: &[FloatBall]) -> HullDistance {
    let d = reds[0].0.len();
    let scale = reds
        .iter()
        .chain(blues)
        .flat_map(|(c, r)| c.iter().map(|v| v.abs()).chain(std::iter::once(*r)))
        .fold(1.0, f64::max);
    // simplex vertices as (difference, red point, blue point)
    let mut simplex: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut x = linalg::sub(&reds[0].0, &blues[0].0);
    if norm(&x) == 0.0 {
        x = vec![0.0; d];
        x[0] = 1.0;
    }
    let mut lower = f64::NEG_INFINITY;
    let mut have_point = false;
    for _ in 0..10_000 {
        let a = extreme(reds, &x, 1.0);
        let b = extreme(blues, &x, -1.0);
        let s = linalg::sub(&a, &b);
        let xx = linalg::dot(&x, &x);
        let xs = linalg::dot(&x, &s);
        let xn = xx.sqrt();
        if xn > 0.0 {
            lower = lower.max(xs / xn);
        }
        if have_point && (xx - xs <= 1e-15 * xx.max(1e-300) || xx <= 1e-28 * scale * scale) {
            break;
        }
        if simplex.iter().any(|(p, _, _)| p == &s) {
            break;
        }
        simplex.push((s, a, b));
        let pts: Vec<Vec<f64>> = simplex.iter().map(|(p, _, _)| p.clone()).collect();
        let w = min_norm_weights(&pts);
        let next = combine(&w, &pts);
        let kept: Vec<_> = simplex
            .iter()
            .zip(&w)
            .filter(|(_, wi)| **wi > 1e-14)
            .map(|(v, _)| v.clone())
            .collect();
        let improved = !have_point || linalg::dot(&next, &next) < xx;
        simplex = kept;
        if !improved && have_point {
            break;
        }
        x = next;
        have_point = true;
        if simplex.len() > d + 1 {
            // numerical safety; the simplex of a minimum-norm face has at most d + 1 vertices
            simplex.truncate(d + 1);
        }
    }
    let pts: Vec<Vec<f64>> = simplex.iter().map(|(p, _, _)| p.clone()).collect();
    let w = if pts.is_empty() { Vec::new() } else { min_norm_weights(&pts) };
    let (red_point, blue_point) = if pts.is_empty() {
        (reds[0].0.clone(), blues[0].0.clone())
    } else {
        let rp: Vec<Vec<f64>> = simplex.iter().map(|(_, a, _)| a.clone()).collect();
        let bp: Vec<Vec<f64>> = simplex.iter().map(|(_, _, b)| b.clone()).collect();
        (combine(&w, &rp), combine(&w, &bp))
    };
    let gap = linalg::sub(&blue_point, &red_point);
    let distance = norm(&gap);
    let separable = lower > 1e-12 * scale;
    let normal = if distance > 0.0 {
        gap.iter().map(|g| g / distance).collect()
    } else {
        vec![0.0; d]
    };
    HullDistance {
        separable,
        distance: if separable { distance } else { 0.0 },
        red_point,
        blue_point,
        normal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disks_and_points() {
        let r = vec![(vec![0.0, 0.0], 0.5)];
        let b = vec![(vec![2.0, 0.0], 0.5)];
        let h = hull_distance(&r, &b);
        assert!(h.separable);
        assert!((h.distance - 1.0).abs() < 1e-12);
        assert!((h.normal[0] - 1.0).abs() < 1e-12);
        let b = vec![(vec![0.6, 0.0], 0.5)];
        assert!(!hull_distance(&r, &b).separable);
        // square vs point inside
        let r: Vec<FloatBall> = [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]
            .iter()
            .map(|p| (p.to_vec(), 0.0))
            .collect();
        assert!(!hull_distance(&r, &[(vec![1.0, 1.0], 0.0)]).separable);
        let h = hull_distance(&r, &[(vec![3.0, 5.0], 0.0)]);
        assert!((h.distance - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hull_of_two_disks() {
        // distance from (3, 0) to the hull of two unit disks at (0, 1) and (0, -1)
        let r = vec![(vec![0.0, 1.0], 1.0), (vec![0.0, -1.0], 1.0)];
        let h = hull_distance(&r, &[(vec![3.0, 0.0], 0.0)]);
        assert!((h.distance - 2.0).abs() < 1e-9, "{}", h.distance);
        // unequal disks: compare with the support-function maximum over a dense sweep
        let r = vec![(vec![0.0, 0.0], 1.0), (vec![0.0, 4.0], 2.0)];
        let q = (vec![5.0, 2.0], 0.5);
        let h = hull_distance(&r, std::slice::from_ref(&q));
        // the optimum sits at a kink, so refine the sweep around the coarse maximum
        let gap = |t: f64| {
            let u = [t.cos(), t.sin()];
            let hr = r
                .iter()
                .map(|(c, rad)| u[0] * c[0] + u[1] * c[1] + rad)
                .fold(f64::NEG_INFINITY, f64::max);
            u[0] * q.0[0] + u[1] * q.0[1] - q.1 - hr
        };
        let step = std::f64::consts::TAU / 200_000.0;
        let coarse = (0..200_000).map(|i| i as f64 * step).max_by(|a, b| gap(*a).total_cmp(&gap(*b))).unwrap();
        let best = (0..200_000)
            .map(|i| gap(coarse - step + 2.0 * step * i as f64 / 200_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((h.distance - best).abs() < 1e-8, "{} vs {}", h.distance, best);
    }
}
