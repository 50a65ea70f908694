// SPDX-License-Identifier: Apache-2.0

//! Deterministic orthogonal transform that puts a GP point set into SGPP.
//!
//! Rows are chosen two at a time by shrinking an open ball away from every
//! forbidden subspace, then orthonormalized. The float matrix is finally
//! snapped to a nearby rational orthogonal matrix through the Cayley
//! transform, so exact datasets stay exact and distances are preserved.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::position::{validate_points, Level};
use crate::geom::Point;
use crate::linalg;

/// Row-orthonormal `d x d` matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl OrthoMatrix {
    pub fn identity(d: usize) -> Self {
        Self {
            rows: (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// Largest entry of `|A A^T - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.rows.len();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let v: f64 = self.rows[i].iter().zip(&self.rows[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Exact rational orthogonal transform together with its float rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct SgppTransform {
    pub matrix: OrthoMatrix,
    pub exact: Vec<Vec<BigRational>>,
}

impl SgppTransform {
    pub fn identity(d: usize) -> Self {
        Self {
            matrix: OrthoMatrix::identity(d),
            exact: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.exact.len())
    }

    pub fn apply(&self, p: &[BigRational]) -> Vec<BigRational> {
        self.exact.iter().map(|row| linalg::dot(row, p)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormal_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = dot(&w, &w).sqrt();
        let scale = dot(v, v).sqrt().max(1e-300);
        if n > 1e-10 * scale {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

fn distance_to_span(x: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut w = x.to_vec();
    for b in basis {
        let c = dot(&w, b);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= c * bi;
        }
    }
    dot(&w, &w).sqrt()
}

/// Shrinks the ball `B((1,..,1), 1/2)` away from each subspace; returns its final center.
fn shrink_ball(d: usize, subspaces: impl Iterator<Item = Vec<Vec<f64>>>) -> Vec<f64> {
    let mut c = vec![1.0; d];
    let mut r = 0.5;
    for spanning in subspaces {
        let basis = orthonormal_basis(&spanning);
        let dist = distance_to_span(&c, &basis);
        if dist > 1e-12 {
            r = f64::min(r, dist);
        } else {
            let w = (0..d)
                .map(|i| {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    e
                })
                .find(|e| distance_to_span(e, &basis) > 1e-9)
                .expect("a proper subspace misses some basis vector");
            let step = r / 2.0;
            for (ci, wi) in c.iter_mut().zip(&w) {
                *ci += step * wi;
            }
            r = f64::min(distance_to_span(&c, &basis), r - step);
        }
    }
    c
}

fn append_orthonormal(rows: &mut Vec<Vec<f64>>, candidate: Vec<f64>) {
    let mut all = rows.clone();
    all.push(candidate);
    let basis = orthonormal_basis(&all);
    assert_eq!(basis.len(), rows.len() + 1, "candidate fell into the span of previous rows");
    rows.push(basis.last().cloned().unwrap());
}

/// Float rows of the orthogonal matrix built by ball shrinking.
fn float_rows(points: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let m = points.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let pairs = (d - 1) / 2;
    for k in 0..pairs {
        let tuple_len = d - 2 * k - 1;
        for _ in 0..2 {
            let fixed = rows.clone();
            let subspaces = (0..m).combinations(tuple_len.min(m)).map(|t| {
                let mut span = fixed.clone();
                for &i in &t[1..] {
                    span.push(points[t[0]].iter().zip(&points[i]).map(|(a, b)| a - b).collect());
                }
                span
            });
            let candidate = shrink_ball(d, subspaces);
            append_orthonormal(&mut rows, candidate);
        }
    }
    for i in 0..d {
        if rows.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let mut all = rows.clone();
        all.push(e);
        let basis = orthonormal_basis(&all);
        if basis.len() > rows.len() {
            rows.push(basis.last().cloned().unwrap());
        }
    }
    rows
}

fn det_f64(m: Vec<Vec<f64>>) -> f64 {
    linalg::determinant(m)
}

fn round_to_grid(x: f64, bits: u32) -> BigRational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round() as i64;
    BigRational::new(BigInt::from(n), BigInt::from(1u64 << bits))
}

/// Cayley map `(I - K)(I + K)^{-1}` of a skew-symmetric rational matrix.
fn cayley(k: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let d = k.len();
    let id = |i: usize, j: usize| if i == j { BigRational::one() } else { BigRational::zero() };
    let plus: Vec<Vec<BigRational>> = (0..d)
        .map(|i| (0..d).map(|j| id(i, j) + k[i][j].clone()).collect())
        .collect();
    let minus: Vec<Vec<BigRational>> = (0..d)
        .map(|i| (0..d).map(|j| id(i, j) - k[i][j].clone()).collect())
        .collect();
    // columns of (I + K)^{-1}
    let inv_cols: Vec<Vec<BigRational>> = (0..d)
        .map(|j| {
            let e = (0..d).map(|i| id(i, j)).collect();
            linalg::solve(plus.clone(), e).expect("I + K is invertible for skew-symmetric K")
        })
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| linalg::dot(&minus[i], &inv_cols[j]))
                .collect()
        })
        .collect()
}

/// Rational orthogonal matrices near `rows`, from coarse to fine.
fn rational_candidates(rows: &[Vec<f64>]) -> Vec<Vec<Vec<BigRational>>> {
    let d = rows.len();
    // pick row signs (det +1) keeping I + A well conditioned
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for mask in 0u32..(1 << d) {
        let a: Vec<Vec<f64>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let s = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                r.iter().map(|v| s * v).collect()
            })
            .collect();
        if det_f64(a.clone()) <= 0.0 {
            continue;
        }
        let plus: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| a[i][j] + if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let quality = det_f64(plus).abs();
        if best.as_ref().is_none_or(|(q, _)| quality > *q) {
            best = Some((quality, a));
        }
    }
    let (_, a) = best.expect("some sign pattern has positive determinant");
    let plus: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| a[i][j] + if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let minus: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 } - a[i][j]).collect())
        .collect();
    // K = (I + A)^{-1} (I - A); computed column by column
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let rhs = (0..d).map(|i| minus[i][j]).collect();
            linalg::solve(plus.clone(), rhs).unwrap_or_else(|| vec![0.0; d])
        })
        .collect();
    let k: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| 0.5 * (cols[j][i] - cols[i][j])).collect())
        .collect();
    [6u32, 10, 16, 24, 40]
        .iter()
        .map(|&bits| {
            let kq: Vec<Vec<BigRational>> = (0..d)
                .map(|i| (0..d).map(|j| round_to_grid(k[i][j], bits)).collect())
                .collect();
            cayley(&kq)
        })
        .collect()
}

/// Computes an orthogonal transform taking GP `points` into SGPP.
pub fn sgpp_transform_points(points: &[Point<BigRational>]) -> Result<SgppTransform> {
    let Some(d) = points.first().map(|p| p.len()) else {
        return Ok(SgppTransform::identity(0));
    };
    let report = validate_points(points, Level::Gp);
    if !report.passes() {
        return Err(Error::Degenerate(Box::new(report)));
    }
    if d <= 2 {
        return Ok(SgppTransform::identity(d));
    }
    let fpoints: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().map(crate::scalar::Scalar::to_f64).collect())
        .collect();
    let rows = float_rows(&fpoints, d);
    for exact in rational_candidates(&rows) {
        let moved: Vec<Point<BigRational>> = points
            .iter()
            .map(|p| exact.iter().map(|row| linalg::dot(row, p)).collect())
            .collect();
        if validate_points(&moved, Level::Sgpp).passes() {
            let matrix = OrthoMatrix {
                rows: exact
                    .iter()
                    .map(|r| r.iter().map(crate::scalar::Scalar::to_f64).collect())
                    .collect(),
            };
            return Ok(SgppTransform { matrix, exact });
        }
    }
    Err(Error::DegenerateConfig(
        "could not certify an SGPP transform for this point set".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn pts(c: &[&[i64]]) -> Vec<Point<BigRational>> {
        c.iter()
            .map(|p| p.iter().map(|&v| rational(v, 1)).collect())
            .collect()
    }

    #[test]
    fn low_dimensions_use_identity() {
        let t = sgpp_transform_points(&pts(&[&[0], &[3], &[1]])).unwrap();
        assert!(t.is_identity());
        let t = sgpp_transform_points(&pts(&[&[0, 0], &[3, 1], &[1, 5]])).unwrap();
        assert!(t.is_identity());
    }

    #[test]
    fn repairs_equal_third_coordinates() {
        let p = pts(&[&[0, 0, 5], &[1, 0, 5], &[0, 1, 2], &[3, 2, 1], &[2, 7, 3]]);
        assert!(!validate_points(&p, Level::Sgpp).passes());
        let t = sgpp_transform_points(&p).unwrap();
        assert!(t.matrix.orthogonality_error() < 1e-12);
        let moved: Vec<_> = p.iter().map(|x| t.apply(x)).collect();
        assert!(validate_points(&moved, Level::Sgpp).passes());
        // exactly orthogonal
        for i in 0..3 {
            for j in 0..3 {
                let v = linalg::dot(&t.exact[i], &t.exact[j]);
                assert_eq!(v, if i == j { rational(1, 1) } else { rational(0, 1) });
            }
        }
    }

    #[test]
    fn rejects_non_gp_input() {
        let p = pts(&[&[0, 0, 0], &[1, 1, 1], &[2, 2, 2]]);
        assert!(matches!(sgpp_transform_points(&p), Err(Error::Degenerate(_))));
    }
}
