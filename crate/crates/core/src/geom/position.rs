// SPDX-License-Identifier: Apache-2.0

//! General-position and strong-general-position validation.
//!
//! GP asks every `(d + 1)`-subset of locations to be affinely independent.
//! SGPP additionally asks the same of the projections onto coordinates
//! `{2k + 1, ..., d}` for every `k >= 1` with `2k < d`.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::geom::{affinely_independent, Point};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Gp,
    Sgpp,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Gp => "GP",
            Level::Sgpp => "SGPP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub level: Level,
    /// 1-based coordinate indices of the projection; the full space for GP violations.
    pub projection: Vec<usize>,
    /// 1-based location labels.
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PositionReport {
    pub violations: Vec<Violation>,
    /// Set when more violations exist than were recorded.
    pub truncated: bool,
}

impl PositionReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for PositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.violations.first() {
            None => f.write_str("no violations"),
            Some(v) => {
                write!(
                    f,
                    "{} violation {{{}}} in coordinates {{{}}}",
                    v.level,
                    v.tuple.iter().join(","),
                    v.projection.iter().join(",")
                )?;
                if self.violations.len() > 1 {
                    write!(f, " and {} more", self.violations.len() - 1)?;
                }
                Ok(())
            }
        }
    }
}

/// Cap on recorded violations per report.
pub const MAX_RECORDED: usize = 100;

fn check_space<S: Scalar>(
    points: &[Point<S>],
    first_coord: usize,
    level: Level,
    report: &mut PositionReport,
) {
    let d = points.first().map_or(0, |p| p.len());
    let dim = d - first_coord;
    let m = points.len();
    if m < 2 {
        return;
    }
    let projected: Vec<Point<S>> = points.iter().map(|p| p[first_coord..].to_vec()).collect();
    let k = (dim + 1).min(m);
    for tuple in (0..m).combinations(k) {
        let sub: Vec<Point<S>> = tuple.iter().map(|&i| projected[i].clone()).collect();
        if !affinely_independent(&sub) {
            if report.violations.len() == MAX_RECORDED {
                report.truncated = true;
                return;
            }
            report.violations.push(Violation {
                level,
                projection: (first_coord + 1..=d).collect(),
                tuple: tuple.iter().map(|i| i + 1).collect(),
            });
        }
    }
}

/// Validates the given locations at `level`.
pub fn validate_points<S: Scalar>(points: &[Point<S>], level: Level) -> PositionReport {
    let mut report = PositionReport::default();
    let Some(d) = points.first().map(|p| p.len()) else {
        return report;
    };
    check_space(points, 0, Level::Gp, &mut report);
    if level == Level::Sgpp {
        let mut first = 2;
        while first < d {
            check_space(points, first, Level::Sgpp, &mut report);
            first += 2;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn pts(c: &[&[i64]]) -> Vec<Point<BigRational>> {
        c.iter()
            .map(|p| p.iter().map(|&v| rational(v, 1)).collect())
            .collect()
    }

    #[test]
    fn collinear_triple_is_reported() {
        let r = validate_points(&pts(&[&[0, 0], &[1, 1], &[2, 2]]), Level::Gp);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].tuple, vec![1, 2, 3]);
        assert_eq!(r.violations[0].level, Level::Gp);
    }

    #[test]
    fn equal_third_coordinate_breaks_sgpp_only() {
        let p = pts(&[&[0, 0, 5], &[1, 0, 5], &[0, 1, 2], &[3, 2, 1]]);
        assert!(validate_points(&p, Level::Gp).passes());
        let r = validate_points(&p, Level::Sgpp);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].level, Level::Sgpp);
        assert_eq!(r.violations[0].projection, vec![3]);
        assert_eq!(r.violations[0].tuple, vec![1, 2]);
    }

    #[test]
    fn simplex_passes() {
        let p = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert!(validate_points(&p, Level::Gp).passes());
        assert!(validate_points(&p, Level::Sgpp).passes());
    }

    #[test]
    fn coincident_pair_is_reported() {
        let r = validate_points(&pts(&[&[1, 2], &[1, 2]]), Level::Gp);
        assert!(!r.passes());
    }
}
