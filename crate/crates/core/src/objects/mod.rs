// SPDX-License-Identifier: Apache-2.0

//! Balls and polytopes.
//!
//! Polytopes are replaced by their vertices, which exist together. Balls run
//! through float engines: tangency and unit normals are irrational in
//! general, so exact arithmetic stops at the input.

pub mod esm;
pub mod hull;
pub mod sp;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dataset::{Color, Dataset, Locations};
use crate::error::{Error, Result};
use crate::geom::position::{validate_points, Level, PositionReport, Violation, MAX_RECORDED};
use crate::geom::separability::check_separable;
use crate::geom::Point;
use crate::linalg;
use crate::scalar::Scalar;

pub use esm::{ball_expected_margin, ball_support_configs, BallEsmResult, BallSupportConfig};
pub use hull::{hull_distance, FloatBall, HullDistance};
pub use sp::{
    ball_separable_probability, critical_extreme_separator, lambda_critical, BallSpResult,
    CriticalSeparator,
};

/// Relative tolerance for tangency in validation.
pub const TANGENCY_TOLERANCE: f64 = 1e-9;

/// Locations with radii; polytope vertices and points have radius zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSet {
    pub locs: Locations<f64>,
    pub radii: Vec<f64>,
}

impl BallSet {
    pub fn from_dataset(ds: &Dataset) -> Self {
        let (locs, radii) = reduce_polytopes(ds);
        BallSet {
            locs: locs.to_scalar(),
            radii: radii.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.locs.dimension
    }

    pub fn len(&self) -> usize {
        self.locs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locs.is_empty()
    }

    pub fn ball(&self, i: usize) -> FloatBall {
        (self.locs.coords[i].clone(), self.radii[i])
    }

    pub fn balls_of(&self, ids: &[usize], color: Color) -> Vec<FloatBall> {
        ids.iter()
            .filter(|&&i| self.locs.colors[i] == color)
            .map(|&i| self.ball(i))
            .collect()
    }

    pub fn scale(&self) -> f64 {
        self.locs
            .coords
            .iter()
            .flat_map(|c| c.iter().map(|v| v.abs()))
            .chain(self.radii.iter().copied())
            .fold(1.0, f64::max)
    }

    /// Drops the first `k` coordinates; radii are kept.
    pub fn drop_leading(&self, k: usize) -> BallSet {
        BallSet {
            locs: self.locs.drop_leading(k),
            radii: self.radii.clone(),
        }
    }
}

/// Each polytope becomes its vertices in one all-or-none unit (independent
/// when the polytope has probability one); points and balls pass through.
pub fn reduce_polytopes(ds: &Dataset) -> (Locations<BigRational>, Vec<BigRational>) {
    ds.ball_view()
}

pub(crate) fn check_ball_dimension(d: usize) -> Result<()> {
    if (2..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Whether the hulls of the red balls and the blue balls are disjoint.
pub fn ball_separability_check(reds: &[FloatBall], blues: &[FloatBall]) -> Result<bool> {
    let d = reds.iter().chain(blues).map(|b| b.0.len()).next().unwrap_or(2);
    check_ball_dimension(d)?;
    if reds.is_empty() || blues.is_empty() {
        return Ok(true);
    }
    if reds.iter().chain(blues).all(|b| b.1 == 0.0) {
        let exact = |set: &[FloatBall]| -> Vec<Point<BigRational>> {
            set.iter()
                .map(|(c, _)| c.iter().map(|v| BigRational::from_float(*v).unwrap()).collect())
                .collect()
        };
        return Ok(check_separable(&exact(reds), &exact(blues)).0);
    }
    Ok(hull_distance(reds, blues).separable)
}

/// Whether some hyperplane is tangent to every ball of `tuple` (`dim + 1` balls).
fn common_tangent(coords: &[&[f64]], radii: &[f64], scale: f64) -> bool {
    let k = coords.len();
    let d = coords[0].len();
    let c0 = coords[0];
    let rows: Vec<Vec<f64>> = coords[1..].iter().map(|c| linalg::sub(c, c0)).collect();
    for signs in 0u32..(1 << (k - 1)) {
        // sign of ball i is bit i - 1; ball 0 is +1
        let s = |i: usize| if i == 0 || signs & (1 << (i - 1)) == 0 { 1.0 } else { -1.0 };
        let rhs: Vec<f64> = (1..k).map(|i| s(i) * radii[i] - radii[0]).collect();
        if rows.len() != d {
            continue;
        }
        if let Some(n) = linalg::solve(rows.clone(), rhs) {
            let nn = linalg::dot(&n, &n);
            if (nn - 1.0).abs() <= TANGENCY_TOLERANCE * (1.0 + scale) {
                return true;
            }
        }
    }
    false
}

/// Whether two balls touch from outside or inside (points excepted).
fn touching(a: &[BigRational], b: &[BigRational], ra: &BigRational, rb: &BigRational) -> bool {
    if ra.is_zero() && rb.is_zero() {
        return false;
    }
    let diff = linalg::sub(a, b);
    let dd = linalg::dot(&diff, &diff);
    let outer = ra + rb;
    let inner = ra - rb;
    dd == outer.clone() * outer || dd == inner.clone() * inner
}

/// Ball general position at every projection level: centers in general
/// position, no `D + 1` balls with a common tangent hyperplane in the
/// `D`-dimensional projections, and zero-radius locations with SGPP.
pub fn validate_balls(ds: &Dataset) -> Result<PositionReport> {
    ball_report(ds, Level::Sgpp)
}

/// Ball general position without the projection levels: centers in general
/// position and no `d + 1` balls with a common tangent hyperplane.
pub fn validate_balls_gp(ds: &Dataset) -> Result<PositionReport> {
    ball_report(ds, Level::Gp)
}

fn ball_report(ds: &Dataset, depth: Level) -> Result<PositionReport> {
    let set = BallSet::from_dataset(ds);
    let (exact_locs, radii) = reduce_polytopes(ds);
    let d = set.dimension();
    let mut report = validate_points(&exact_locs.coords, Level::Gp);
    let zero: Vec<usize> = (0..radii.len()).filter(|&i| radii[i].is_zero()).collect();
    let zero_pts: Vec<Point<BigRational>> = zero.iter().map(|&i| exact_locs.coords[i].clone()).collect();
    let zr = validate_points(&zero_pts, depth);
    for v in zr.violations {
        let mut tuple: Vec<usize> = v.tuple.iter().map(|&t| zero[t - 1] + 1).collect();
        tuple.sort_unstable();
        let v = Violation { tuple, ..v };
        if !report.violations.contains(&v) {
            push(&mut report, v);
        }
    }
    report.truncated |= zr.truncated;
    let scale = set.scale();
    let mut dim = d;
    let mut first = 0;
    loop {
        let level = if first == 0 { Level::Gp } else { Level::Sgpp };
        for (i, j) in (0..set.len()).tuple_combinations() {
            if touching(&exact_locs.coords[i][first..], &exact_locs.coords[j][first..], &radii[i], &radii[j]) {
                push(
                    &mut report,
                    Violation {
                        level,
                        projection: (first + 1..=d).collect(),
                        tuple: vec![i + 1, j + 1],
                    },
                );
            }
        }
        for tuple in (0..set.len()).combinations(dim + 1) {
            if tuple.iter().all(|&i| set.radii[i] == 0.0) {
                continue;
            }
            let coords: Vec<&[f64]> = tuple.iter().map(|&i| &set.locs.coords[i][first..]).collect();
            let r: Vec<f64> = tuple.iter().map(|&i| set.radii[i]).collect();
            if common_tangent(&coords, &r, scale) {
                push(
                    &mut report,
                    Violation {
                        level,
                        projection: (first + 1..=d).collect(),
                        tuple: tuple.iter().map(|i| i + 1).collect(),
                    },
                );
            }
        }
        if dim <= 2 || depth == Level::Gp {
            break;
        }
        dim -= 2;
        first += 2;
    }
    Ok(report)
}

fn push(report: &mut PositionReport, v: Violation) {
    if report.violations.len() < MAX_RECORDED {
        report.violations.push(v);
    } else {
        report.truncated = true;
    }
}

pub(crate) fn require_ball_position(ds: &Dataset, depth: Level) -> Result<()> {
    let report = ball_report(ds, depth)?;
    if report.passes() {
        Ok(())
    } else {
        Err(Error::Degenerate(Box::new(report)))
    }
}
