// SPDX-License-Identifier: Apache-2.0

//! Affine predicates, hyperplanes and coordinate projections.

pub mod position;
pub mod separability;
pub mod transform;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// A point of R^d, stored as its coordinate vector.
pub type Point<S> = Vec<S>;

/// Oriented affine hyperplane `{x : normal . x = offset}`; the positive side is `normal . x > offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Hyperplane<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Result<Self> {
        if normal.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidArgument("zero hyperplane normal".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    /// Signed value `normal . x - offset`.
    pub fn eval(&self, x: &[S]) -> S {
        linalg::dot(&self.normal, x) - self.offset.clone()
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: self.normal.iter().map(|v| -v.clone()).collect(),
            offset: -self.offset.clone(),
        }
    }

    /// Makes the first nonzero normal coordinate positive.
    pub fn canonical(self) -> Self {
        match self.normal.iter().find(|v| !v.is_zero()) {
            Some(v) if v.is_negative() => self.flipped(),
            _ => self,
        }
    }

    pub fn to_f64(&self) -> Hyperplane<f64> {
        Hyperplane {
            normal: self.normal.iter().map(Scalar::to_f64).collect(),
            offset: self.offset.to_f64(),
        }
    }
}

/// Sorted, 1-based subset of coordinate indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionIndexSet(Vec<usize>);

impl ProjectionIndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidIndexSet("empty".into()));
        }
        if indices[0] == 0 {
            return Err(Error::InvalidIndexSet("indices are 1-based".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet("indices must be strictly increasing".into()));
        }
        Ok(Self(indices))
    }

    /// `{from, from + 1, ..., to}`.
    pub fn range(from: usize, to: usize) -> Result<Self> {
        Self::new((from..=to).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_dims<S>(points: &[Point<S>], d: usize) -> Result<()> {
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
    }
    Ok(())
}

/// Orientation of `d + 1` points in R^d: sign of `det[p_1 - p_0, ..., p_d - p_0]`.
pub fn orient<S: Scalar>(points: &[Point<S>]) -> Result<i8> {
    let d = points.len().saturating_sub(1);
    if points.is_empty() || points[0].len() != d {
        return Err(Error::DimensionMismatch {
            expected: points.len().saturating_sub(1),
            found: points.first().map_or(0, |p| p.len()),
        });
    }
    check_dims(points, d)?;
    let rows = points[1..]
        .iter()
        .map(|p| linalg::sub(p, &points[0]))
        .collect();
    Ok(linalg::determinant(rows).sign())
}

/// The hyperplane through `d` affinely independent points of R^d, canonically oriented.
pub fn span_hyperplane<S: Scalar>(points: &[Point<S>]) -> Result<Hyperplane<S>> {
    let d = points.first().map_or(0, |p| p.len());
    if d == 0 {
        return Err(Error::InvalidArgument("no points".into()));
    }
    check_dims(points, d)?;
    if points.len() != d {
        return Err(Error::InvalidArgument(format!(
            "a hyperplane of R^{d} is spanned by {d} points, got {}",
            points.len()
        )));
    }
    let diffs: Vec<Vec<S>> = points[1..]
        .iter()
        .map(|p| linalg::sub(p, &points[0]))
        .collect();
    let normal = linalg::cross(&diffs, d);
    if normal.iter().all(|v| v.is_negligible()) {
        return Err(Error::AffinelyDependent);
    }
    let offset = linalg::dot(&normal, &points[0]);
    Ok(Hyperplane { normal, offset }.canonical())
}

/// Side of `x` relative to `h`: sign of `n . x - c`.
pub fn side_of<S: Scalar>(h: &Hyperplane<S>, x: &[S]) -> Result<i8> {
    if x.len() != h.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            found: x.len(),
        });
    }
    Ok(h.eval(x).sign())
}

/// Coordinate projection onto the index set `set`.
pub fn project<S: Scalar>(points: &[Point<S>], set: &ProjectionIndexSet) -> Result<Vec<Point<S>>> {
    points
        .iter()
        .map(|p| {
            set.indices()
                .iter()
                .map(|&i| {
                    p.get(i - 1).cloned().ok_or(Error::IndexOutOfRange {
                        index: i,
                        dimension: p.len(),
                    })
                })
                .collect()
        })
        .collect()
}

/// Whether the given points are affinely independent.
pub fn affinely_independent<S: Scalar>(points: &[Point<S>]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let d = points[0].len();
    if points.len() > d + 1 {
        return false;
    }
    let rows: Vec<Vec<S>> = points[1..]
        .iter()
        .map(|p| linalg::sub(p, &points[0]))
        .collect();
    if rows.len() == d {
        return !linalg::determinant(rows).is_negligible();
    }
    linalg::rank(rows, d) == points.len() - 1
}
