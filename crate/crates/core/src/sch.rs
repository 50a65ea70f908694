// SPDX-License-Identifier: Apache-2.0

//! Stochastic convex hull queries.
//!
//! Each query becomes a two-colored dataset: the query object is red with
//! probability one and the stochastic points of `A` are blue. The hull of the
//! existent points avoids the query exactly when the instance is separable.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dataset::{Color, Dataset, Shape, StochasticObject, StochasticPoint};
use crate::error::{Error, Result};
use crate::esm::expected_separation_margin;
use crate::geom::Point;
use crate::objects::ball_separable_probability;
use crate::scalar::Scalar;
use crate::sp::{separable_probability, Strategy};

/// `A` recolored blue with the red query points added at probability one.
pub fn query_dataset(a: &Dataset, query: &[Point<BigRational>]) -> Result<Dataset> {
    if !a.objects.is_empty() {
        return Err(Error::NotAPointDataset("objects"));
    }
    for q in query {
        if q.len() != a.dimension {
            return Err(Error::DimensionMismatch {
                expected: a.dimension,
                found: q.len(),
            });
        }
    }
    let mut s = a.clone();
    s.points.iter_mut().for_each(|p| p.color = Color::Blue);
    s.uncertain_points.iter_mut().for_each(|u| u.color = Color::Blue);
    let reds = query.iter().map(|q| StochasticPoint {
        coords: q.clone(),
        color: Color::Red,
        prob: BigRational::one(),
    });
    s.points.splice(0..0, reds);
    s.check()?;
    Ok(s)
}

fn miss_probability<S: Scalar>(s: &Dataset, strategy: Strategy) -> Result<S> {
    let (_, moved) = s.ensure_sgpp()?;
    let locs = moved.locations()?.to_scalar::<S>();
    Ok(separable_probability(&locs, strategy)?.sp)
}

/// `Pr(q in CH(A))`.
pub fn sch_membership_probability<S: Scalar>(a: &Dataset, q: &[BigRational], strategy: Strategy) -> Result<S> {
    sch_intersection_probability(a, &[q.to_vec()], strategy)
}

/// `Pr(CH(A) meets Q)` for a polytope `Q` given by its vertices.
pub fn sch_intersection_probability<S: Scalar>(
    a: &Dataset,
    q_vertices: &[Point<BigRational>],
    strategy: Strategy,
) -> Result<S> {
    if q_vertices.is_empty() {
        return Err(Error::InvalidArgument("the query polytope has no vertices".into()));
    }
    let s = query_dataset(a, q_vertices)?;
    Ok(S::one() - miss_probability::<S>(&s, strategy)?)
}

/// `Pr(dist(q, CH(A)) > eps)`; the empty hull counts as far away.
pub fn sch_epsilon_distant_probability(a: &Dataset, q: &[BigRational], eps: &BigRational) -> Result<f64> {
    if eps < &BigRational::zero() {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    if eps.is_zero() {
        let s = query_dataset(a, &[q.to_vec()])?;
        return Ok(miss_probability::<BigRational>(&s, Strategy::Radial)?.to_f64());
    }
    if !(2..=3).contains(&a.dimension) {
        return Err(Error::UnsupportedDimension(a.dimension));
    }
    let mut s = query_dataset(a, &[])?;
    s.objects.push(StochasticObject {
        color: Color::Red,
        prob: BigRational::one(),
        shape: Shape::Ball {
            center: q.to_vec(),
            radius: eps.clone(),
        },
    });
    let (_, moved) = s.ensure_sgpp()?;
    Ok(ball_separable_probability(&moved)?.sp)
}

/// `E[dist(q, CH(A))]` with the empty hull contributing zero. The margin of
/// `{q}` against a hull is half the distance, hence the factor two.
pub fn sch_expected_distance<S: Scalar>(a: &Dataset, q: &[BigRational]) -> Result<f64> {
    let s = query_dataset(a, &[q.to_vec()])?;
    let locs = s.locations()?.to_scalar::<S>();
    Ok(2.0 * expected_separation_margin(&locs)?.emar)
}
