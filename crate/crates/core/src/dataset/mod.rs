// SPDX-License-Identifier: Apache-2.0

//! Stochastic datasets and the location-level view the engines work on.

pub mod generate;
pub mod json;
mod scenario;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::position::{validate_points, Level, PositionReport};
use crate::geom::transform::{sgpp_transform_points, SgppTransform};
use crate::geom::Point;
use crate::scalar::Scalar;

pub use scenario::{scenario_probability, Scenario, ScenarioTracker};

/// Upper bound on polytope vertex counts.
pub const MAX_POLYTOPE_VERTICES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Unipoint,
    Multipoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StochasticPoint {
    pub coords: Point<BigRational>,
    pub color: Color,
    pub prob: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UncertainPoint {
    pub color: Color,
    /// Mutually exclusive locations with their probabilities.
    pub locations: Vec<(Point<BigRational>, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Ball {
        center: Point<BigRational>,
        radius: BigRational,
    },
    Polytope {
        vertices: Vec<Point<BigRational>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StochasticObject {
    pub color: Color,
    pub prob: BigRational,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub dimension: usize,
    pub model: Model,
    pub points: Vec<StochasticPoint>,
    pub uncertain_points: Vec<UncertainPoint>,
    pub objects: Vec<StochasticObject>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitKind {
    /// One location with its own existence probability.
    Independent,
    /// Locations of one uncertain point; at most one exists.
    Exclusive,
    /// Vertices of one polytope; all exist or none does.
    AllOrNone,
}

/// A set of locations whose existence is jointly distributed.
#[derive(Clone, Debug, PartialEq)]
pub struct Unit<S> {
    pub kind: UnitKind,
    pub members: Vec<usize>,
    /// One entry per member for `Exclusive`; a single entry otherwise.
    pub probs: Vec<S>,
}

/// Flat list of locations with colors and dependence units, ids in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct Locations<S> {
    pub dimension: usize,
    pub coords: Vec<Point<S>>,
    pub colors: Vec<Color>,
    pub unit_of: Vec<usize>,
    pub units: Vec<Unit<S>>,
}

impl<S: Scalar> Locations<S> {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn ids_of(&self, color: Color) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.colors[i] == color).collect()
    }

    pub fn count(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }

    /// `(n, N)`: the smaller and larger color class sizes.
    pub fn sizes(&self) -> (usize, usize) {
        let r = self.count(Color::Red);
        let b = self.count(Color::Blue);
        (r.min(b), r.max(b))
    }

    pub fn map_scalar<T: Scalar>(&self) -> Locations<T>
    where
        S: Into<BigRational> + Clone,
    {
        let conv = |v: &S| T::from_rational(&v.clone().into());
        Locations {
            dimension: self.dimension,
            coords: self.coords.iter().map(|p| p.iter().map(conv).collect()).collect(),
            colors: self.colors.clone(),
            unit_of: self.unit_of.clone(),
            units: self
                .units
                .iter()
                .map(|u| Unit {
                    kind: u.kind,
                    members: u.members.clone(),
                    probs: u.probs.iter().map(conv).collect(),
                })
                .collect(),
        }
    }

    /// Same locations restricted to the trailing `dimension - k` coordinates.
    pub fn drop_leading(&self, k: usize) -> Locations<S> {
        Locations {
            dimension: self.dimension - k,
            coords: self.coords.iter().map(|p| p[k..].to_vec()).collect(),
            ..self.clone()
        }
    }

    pub fn swap_colors(&self) -> Locations<S> {
        Locations {
            colors: self.colors.iter().map(|c| c.opposite()).collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self, level: Level) -> PositionReport {
        validate_points(&self.coords, level)
    }
}

impl Locations<BigRational> {
    /// Converts to another scalar type.
    pub fn to_scalar<T: Scalar>(&self) -> Locations<T> {
        self.map_scalar()
    }
}

fn check_prob(p: &BigRational) -> Result<()> {
    if p.is_zero() || p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::ProbOutOfRange(crate::scalar::format_rational(p)));
    }
    Ok(())
}

impl Dataset {
    pub fn new(dimension: usize, model: Model) -> Self {
        Self {
            dimension,
            model,
            points: Vec::new(),
            uncertain_points: Vec::new(),
            objects: Vec::new(),
        }
    }

    /// Checks probabilities, sums and dimensions.
    pub fn check(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        let dim = |p: &Point<BigRational>| {
            if p.len() != d {
                Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                })
            } else {
                Ok(())
            }
        };
        for p in &self.points {
            dim(&p.coords)?;
            check_prob(&p.prob)?;
        }
        if self.model == Model::Unipoint && !self.uncertain_points.is_empty() {
            return Err(Error::Malformed(
                "uncertain points require the multipoint model".into(),
            ));
        }
        for u in &self.uncertain_points {
            if u.locations.is_empty() {
                return Err(Error::Malformed("uncertain point without locations".into()));
            }
            let mut sum = BigRational::zero();
            for (c, p) in &u.locations {
                dim(c)?;
                check_prob(p)?;
                sum += p.clone();
            }
            if sum > BigRational::one() {
                return Err(Error::SumExceedsOne(crate::scalar::format_rational(&sum)));
            }
        }
        for o in &self.objects {
            check_prob(&o.prob)?;
            match &o.shape {
                Shape::Ball { center, radius } => {
                    dim(center)?;
                    if radius < &BigRational::zero() {
                        return Err(Error::Malformed("negative ball radius".into()));
                    }
                }
                Shape::Polytope { vertices } => {
                    if vertices.is_empty() {
                        return Err(Error::Malformed("empty polytope".into()));
                    }
                    if vertices.len() > MAX_POLYTOPE_VERTICES {
                        return Err(Error::Malformed(format!(
                            "polytope with {} vertices exceeds the limit of {MAX_POLYTOPE_VERTICES}",
                            vertices.len()
                        )));
                    }
                    for v in vertices {
                        dim(v)?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn has_balls(&self) -> bool {
        self.objects
            .iter()
            .any(|o| matches!(o.shape, Shape::Ball { .. }))
    }

    pub fn has_polytopes(&self) -> bool {
        self.objects
            .iter()
            .any(|o| matches!(o.shape, Shape::Polytope { .. }))
    }

    /// Location view: points, then uncertain-point locations, then polytope vertices.
    ///
    /// Balls have no location view; use the objects engine for them.
    pub fn locations(&self) -> Result<Locations<BigRational>> {
        if self.has_balls() {
            return Err(Error::NotAPointDataset("balls"));
        }
        Ok(self.ball_view().0)
    }

    /// Location view with one radius per location: points, uncertain-point
    /// locations, then objects in file order (a ball is its center, a polytope
    /// its vertices with radius zero).
    pub fn ball_view(&self) -> (Locations<BigRational>, Vec<BigRational>) {
        let mut radii: Vec<BigRational> = Vec::new();
        let mut out = Locations {
            dimension: self.dimension,
            coords: Vec::new(),
            colors: Vec::new(),
            unit_of: Vec::new(),
            units: Vec::new(),
        };
        let push_unit = |out: &mut Locations<BigRational>,
                             kind: UnitKind,
                             color: Color,
                             locs: Vec<(Point<BigRational>, BigRational)>,
                             group_prob: Option<BigRational>| {
            let u = out.units.len();
            let mut members = Vec::new();
            let mut probs = Vec::new();
            for (c, p) in locs {
                members.push(out.coords.len());
                out.coords.push(c);
                out.colors.push(color);
                out.unit_of.push(u);
                probs.push(p);
            }
            out.units.push(Unit {
                kind,
                members,
                probs: group_prob.map_or(probs, |g| vec![g]),
            });
        };
        for p in &self.points {
            push_unit(
                &mut out,
                UnitKind::Independent,
                p.color,
                vec![(p.coords.clone(), p.prob.clone())],
                None,
            );
        }
        for u in &self.uncertain_points {
            push_unit(&mut out, UnitKind::Exclusive, u.color, u.locations.clone(), None);
        }
        radii.resize(out.len(), BigRational::zero());
        for o in &self.objects {
            if let Shape::Ball { center, radius } = &o.shape {
                push_unit(
                    &mut out,
                    UnitKind::Independent,
                    o.color,
                    vec![(center.clone(), o.prob.clone())],
                    None,
                );
                radii.push(radius.clone());
            }
            if let Shape::Polytope { vertices } = &o.shape {
                if o.prob.is_one() {
                    for v in vertices {
                        push_unit(
                            &mut out,
                            UnitKind::Independent,
                            o.color,
                            vec![(v.clone(), o.prob.clone())],
                            None,
                        );
                    }
                } else {
                    push_unit(
                        &mut out,
                        UnitKind::AllOrNone,
                        o.color,
                        vertices.iter().map(|v| (v.clone(), o.prob.clone())).collect(),
                        Some(o.prob.clone()),
                    );
                }
                radii.resize(out.len(), BigRational::zero());
            }
        }
        (out, radii)
    }

    /// Every coordinate vector of the dataset in id order.
    fn all_coords(&self) -> Vec<Point<BigRational>> {
        let mut v: Vec<Point<BigRational>> = self.points.iter().map(|p| p.coords.clone()).collect();
        for u in &self.uncertain_points {
            v.extend(u.locations.iter().map(|(c, _)| c.clone()));
        }
        for o in &self.objects {
            match &o.shape {
                Shape::Ball { center, .. } => v.push(center.clone()),
                Shape::Polytope { vertices } => v.extend(vertices.iter().cloned()),
            }
        }
        v
    }

    /// Validates locations (ball centers included) at the given level.
    pub fn validate(&self, level: Level) -> PositionReport {
        validate_points(&self.all_coords(), level)
    }

    /// Applies `t` to every coordinate vector.
    pub fn transformed(&self, t: &SgppTransform) -> Dataset {
        let mut out = self.clone();
        for p in &mut out.points {
            p.coords = t.apply(&p.coords);
        }
        for u in &mut out.uncertain_points {
            for (c, _) in &mut u.locations {
                *c = t.apply(c);
            }
        }
        for o in &mut out.objects {
            match &mut o.shape {
                Shape::Ball { center, .. } => *center = t.apply(center),
                Shape::Polytope { vertices } => {
                    for v in vertices {
                        *v = t.apply(v);
                    }
                }
            }
        }
        out
    }

    /// Orthogonal transform into SGPP together with the transformed dataset.
    pub fn sgpp_transform(&self) -> Result<(SgppTransform, Dataset)> {
        let t = sgpp_transform_points(&self.all_coords())?;
        let moved = self.transformed(&t);
        Ok((t, moved))
    }

    /// Like [`Dataset::sgpp_transform`] but keeps the identity when the input already has SGPP.
    pub fn ensure_sgpp(&self) -> Result<(SgppTransform, Dataset)> {
        if self.validate(Level::Sgpp).passes() {
            return Ok((SgppTransform::identity(self.dimension), self.clone()));
        }
        self.sgpp_transform()
    }

    /// Same dataset with red and blue exchanged.
    pub fn swap_colors(&self) -> Dataset {
        let mut out = self.clone();
        for p in &mut out.points {
            p.color = p.color.opposite();
        }
        for u in &mut out.uncertain_points {
            u.color = u.color.opposite();
        }
        for o in &mut out.objects {
            o.color = o.color.opposite();
        }
        out
    }

    /// Applies `x -> m x + t` to every coordinate vector (radii scale by `radius_scale`).
    pub fn map_affine(
        &self,
        m: &[Vec<BigRational>],
        t: &[BigRational],
        radius_scale: &BigRational,
    ) -> Dataset {
        let f = |p: &Point<BigRational>| -> Point<BigRational> {
            m.iter()
                .zip(t)
                .map(|(row, ti)| crate::linalg::dot(row, p) + ti.clone())
                .collect()
        };
        let mut out = self.clone();
        for p in &mut out.points {
            p.coords = f(&p.coords);
        }
        for u in &mut out.uncertain_points {
            for (c, _) in &mut u.locations {
                *c = f(c);
            }
        }
        for o in &mut out.objects {
            match &mut o.shape {
                Shape::Ball { center, radius } => {
                    *center = f(center);
                    *radius = radius.clone() * radius_scale.clone();
                }
                Shape::Polytope { vertices } => {
                    for v in vertices {
                        *v = f(v);
                    }
                }
            }
        }
        out
    }

    /// Multipoint rendering in which every point becomes a single-location uncertain point.
    pub fn as_multipoint(&self) -> Dataset {
        let mut out = Dataset::new(self.dimension, Model::Multipoint);
        for p in &self.points {
            out.uncertain_points.push(UncertainPoint {
                color: p.color,
                locations: vec![(p.coords.clone(), p.prob.clone())],
            });
        }
        out.uncertain_points.extend(self.uncertain_points.iter().cloned());
        out.objects = self.objects.clone();
        out
    }

    /// Total number of locations (ball centers and polytope vertices included).
    pub fn location_count(&self) -> usize {
        self.all_coords().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn polytope_reduction_builds_groups() {
        let mut ds = Dataset::new(2, Model::Unipoint);
        ds.objects.push(StochasticObject {
            color: Color::Red,
            prob: q(7, 10),
            shape: Shape::Polytope {
                vertices: vec![vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]],
            },
        });
        ds.objects.push(StochasticObject {
            color: Color::Blue,
            prob: q(1, 1),
            shape: Shape::Polytope {
                vertices: vec![vec![q(3, 1), q(0, 1)], vec![q(3, 1), q(2, 1)]],
            },
        });
        let l = ds.locations().unwrap();
        assert_eq!(l.len(), 5);
        assert_eq!(l.units.len(), 3);
        assert_eq!(l.units[0].kind, UnitKind::AllOrNone);
        assert_eq!(l.units[0].members, vec![0, 1, 2]);
        assert_eq!(l.units[0].probs, vec![q(7, 10)]);
        assert_eq!(l.units[1].kind, UnitKind::Independent);
    }

    #[test]
    fn check_rejects_bad_probabilities() {
        let mut ds = Dataset::new(1, Model::Multipoint);
        ds.uncertain_points.push(UncertainPoint {
            color: Color::Red,
            locations: vec![(vec![q(0, 1)], q(7, 10)), (vec![q(1, 1)], q(1, 2))],
        });
        assert!(matches!(ds.check(), Err(Error::SumExceedsOne(_))));
        let mut ds = Dataset::new(1, Model::Unipoint);
        ds.points.push(StochasticPoint {
            coords: vec![q(0, 1)],
            color: Color::Red,
            prob: q(3, 2),
        });
        assert!(matches!(ds.check(), Err(Error::ProbOutOfRange(_))));
    }
}
