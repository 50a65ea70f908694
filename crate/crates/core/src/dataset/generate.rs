// SPDX-License-Identifier: Apache-2.0

//! Seeded dataset generators.
//!
//! Coordinates are small-denominator rationals so exact runs stay cheap.
//! Draws that would break the requested position level are rejected and
//! redrawn; nothing is perturbed after the fact.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{
    Color, Dataset, Model, Shape, StochasticObject, StochasticPoint, UncertainPoint,
};
use crate::error::{Error, Result};
use crate::geom::position::Level;
use crate::geom::{affinely_independent, Point};
use crate::scalar::rational;

/// Distribution of existence probabilities.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbLaw {
    /// `j / 20` with `j` uniform in `1..=20`.
    Uniform,
    /// `j / k` with `j` uniform in `1..=k`.
    Grid(u32),
    Constant(BigRational),
}

impl ProbLaw {
    fn draw(&self, rng: &mut ChaCha8Rng) -> BigRational {
        match self {
            ProbLaw::Uniform => rational(rng.gen_range(1..=20), 20),
            ProbLaw::Grid(k) => rational(rng.gen_range(1..=*k) as i64, *k as i64),
            ProbLaw::Constant(p) => p.clone(),
        }
    }
}

/// Coordinates are `k / GRID` with `|k| <= GRID * BOX`.
const GRID: i64 = 16;
const BOX: i64 = 4;
const MAX_ATTEMPTS: usize = 10_000;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_box_point(rng: &mut ChaCha8Rng, d: usize) -> Point<BigRational> {
    (0..d)
        .map(|_| rational(rng.gen_range(-GRID * BOX..=GRID * BOX), GRID))
        .collect()
}

/// Whether adding `candidate` to `existing` keeps the requested position level.
pub(crate) fn keeps_position(
    existing: &[Point<BigRational>],
    candidate: &Point<BigRational>,
    level: Level,
) -> bool {
    let d = candidate.len();
    let mut first = 0;
    loop {
        let dim = d - first;
        let proj = |p: &Point<BigRational>| p[first..].to_vec();
        let m = existing.len() + 1;
        let k = (dim + 1).min(m);
        if k >= 2 {
            for combo in (0..existing.len()).combinations(k - 1) {
                let mut pts: Vec<Point<BigRational>> =
                    combo.iter().map(|&i| proj(&existing[i])).collect();
                pts.push(proj(candidate));
                if !affinely_independent(&pts) {
                    return false;
                }
            }
        }
        if level == Level::Gp {
            return true;
        }
        first += 2;
        if first >= d {
            return true;
        }
    }
}

fn draw_positioned(
    rng: &mut ChaCha8Rng,
    existing: &[Point<BigRational>],
    level: Level,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Point<BigRational>,
) -> Point<BigRational> {
    for _ in 0..MAX_ATTEMPTS {
        let p = draw(rng);
        if keeps_position(existing, &p, level) {
            return p;
        }
    }
    panic!("could not draw a point in general position; the grid is too coarse for this size")
}

fn colors(n_red: usize, n_blue: usize) -> Vec<Color> {
    let mut c = vec![Color::Red; n_red];
    c.extend(std::iter::repeat_n(Color::Blue, n_blue));
    c
}

/// Unipoint dataset with coordinates uniform on a grid in `[-4, 4]^d`, in GP.
pub fn gen_random(n_red: usize, n_blue: usize, d: usize, law: &ProbLaw, seed: u64) -> Dataset {
    gen_random_at(n_red, n_blue, d, law, seed, Level::Gp)
}

/// Like [`gen_random`] with an explicit position level.
pub fn gen_random_at(
    n_red: usize,
    n_blue: usize,
    d: usize,
    law: &ProbLaw,
    seed: u64,
    level: Level,
) -> Dataset {
    let mut rng = rng_for(seed);
    let mut ds = Dataset::new(d, Model::Unipoint);
    let mut placed: Vec<Point<BigRational>> = Vec::new();
    for color in colors(n_red, n_blue) {
        let p = draw_positioned(&mut rng, &placed, level, |r| draw_box_point(r, d));
        placed.push(p.clone());
        ds.points.push(StochasticPoint {
            coords: p,
            color,
            prob: law.draw(&mut rng),
        });
    }
    ds
}

/// Multipoint dataset; each uncertain point has between 1 and `max_locations` locations.
pub fn gen_multipoint(
    n_red: usize,
    n_blue: usize,
    max_locations: usize,
    d: usize,
    seed: u64,
    level: Level,
) -> Dataset {
    assert!(max_locations >= 1);
    let mut rng = rng_for(seed);
    let mut ds = Dataset::new(d, Model::Multipoint);
    let mut placed: Vec<Point<BigRational>> = Vec::new();
    for color in colors(n_red, n_blue) {
        let count = rng.gen_range(1..=max_locations);
        // positive integer weights out of 20 with total at most 20
        let total = rng.gen_range(count as i64..=20);
        let mut cuts: Vec<i64> = (1..total).collect();
        let mut chosen = Vec::new();
        for _ in 0..count - 1 {
            let k = rng.gen_range(0..cuts.len());
            chosen.push(cuts.swap_remove(k));
        }
        chosen.sort_unstable();
        let mut weights = Vec::new();
        let mut prev = 0;
        for c in chosen.into_iter().chain(std::iter::once(total)) {
            weights.push(c - prev);
            prev = c;
        }
        let mut locations = Vec::new();
        for w in weights {
            let p = draw_positioned(&mut rng, &placed, level, |r| draw_box_point(r, d));
            placed.push(p.clone());
            locations.push((p, rational(w, 20)));
        }
        ds.uncertain_points.push(UncertainPoint { color, locations });
    }
    ds
}

/// Clustered dataset: `n` reds near the origin and `big_n / d` blues near each `e_i`,
/// all drawn from `eps`-balls, every probability `1/2`.
pub fn gen_cluster_stress(
    n: usize,
    big_n: usize,
    d: usize,
    eps: &BigRational,
    seed: u64,
) -> Result<Dataset> {
    if d == 0 || !big_n.is_multiple_of(d) {
        return Err(Error::InvalidArgument(format!(
            "N = {big_n} is not a multiple of d = {d}"
        )));
    }
    if eps <= &BigRational::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    const STEPS: i64 = 256;
    let mut rng = rng_for(seed);
    let mut ds = Dataset::new(d, Model::Unipoint);
    let mut placed: Vec<Point<BigRational>> = Vec::new();
    let in_ball = |rng: &mut ChaCha8Rng, center: &Point<BigRational>| loop {
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-STEPS..=STEPS)).collect();
        if k.iter().map(|v| v * v).sum::<i64>() < STEPS * STEPS {
            return center
                .iter()
                .zip(&k)
                .map(|(c, &v)| c.clone() + eps.clone() * rational(v, STEPS))
                .collect::<Point<BigRational>>();
        }
    };
    let half = rational(1, 2);
    let origin = vec![BigRational::zero(); d];
    let mut push = |ds: &mut Dataset, rng: &mut ChaCha8Rng, center: &Point<BigRational>, color| {
        let p = draw_positioned(rng, &placed, Level::Gp, |r| in_ball(r, center));
        placed.push(p.clone());
        ds.points.push(StochasticPoint {
            coords: p,
            color,
            prob: half.clone(),
        });
    };
    for _ in 0..n {
        push(&mut ds, &mut rng, &origin, Color::Red);
    }
    for i in 0..d {
        let mut c = origin.clone();
        c[i] = BigRational::one();
        for _ in 0..big_n / d {
            push(&mut ds, &mut rng, &c, Color::Blue);
        }
    }
    Ok(ds)
}

/// Ball dataset; a fraction `zero_radius` of the balls (on average) are points.
///
/// Centers are in GP and the draw is repeated until the balls themselves are
/// in general position.
pub fn gen_balls(
    n_red: usize,
    n_blue: usize,
    d: usize,
    law: &ProbLaw,
    zero_radius: f64,
    seed: u64,
) -> Dataset {
    let mut attempt = 0u64;
    loop {
        let mut rng = rng_for(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        attempt += 1;
        let mut ds = Dataset::new(d, Model::Unipoint);
        let mut placed: Vec<Point<BigRational>> = Vec::new();
        for color in colors(n_red, n_blue) {
            let center = draw_positioned(&mut rng, &placed, Level::Gp, |r| draw_box_point(r, d));
            placed.push(center.clone());
            let radius = if rng.gen_bool(zero_radius.clamp(0.0, 1.0)) {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::from(rng.gen_range(1..=8)), BigInt::from(16))
            };
            ds.objects.push(StochasticObject {
                color,
                prob: law.draw(&mut rng),
                shape: Shape::Ball { center, radius },
            });
        }
        if crate::objects::validate_balls(&ds).map(|r| r.passes()).unwrap_or(false) {
            return ds;
        }
        assert!(attempt < 1000, "could not draw balls in general position");
    }
}

/// Moves every coordinate by an independent offset `magnitude * k / 1024` with
/// `k` uniform in `-1024..=1024`. Radii and probabilities are kept. This is the
/// explicit escape hatch for degenerate inputs; no engine calls it.
pub fn jitter(ds: &Dataset, magnitude: &BigRational, seed: u64) -> Dataset {
    let mut rng = rng_for(seed);
    let mut nudge = |p: &mut Point<BigRational>| {
        for c in p.iter_mut() {
            *c += magnitude * rational(rng.gen_range(-1024..=1024), 1024);
        }
    };
    let mut out = ds.clone();
    out.points.iter_mut().for_each(|p| nudge(&mut p.coords));
    for u in &mut out.uncertain_points {
        u.locations.iter_mut().for_each(|(c, _)| nudge(c));
    }
    for o in &mut out.objects {
        match &mut o.shape {
            Shape::Ball { center, .. } => nudge(center),
            Shape::Polytope { vertices } => vertices.iter_mut().for_each(&mut nudge),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic_and_in_gp() {
        let a = gen_random(2, 3, 2, &ProbLaw::Uniform, 42);
        let b = gen_random(2, 3, 2, &ProbLaw::Uniform, 42);
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 5);
        assert!(a.validate(Level::Gp).passes());
        let c = gen_random(0, 3, 2, &ProbLaw::Uniform, 1);
        assert!(c.points.iter().all(|p| p.color == Color::Blue));
        let e = gen_random(4, 4, 3, &ProbLaw::Constant(BigRational::one()), 3);
        assert!(e.points.iter().all(|p| p.prob.is_one()));
    }

    #[test]
    fn jitter_breaks_collinearity() {
        let mut ds = Dataset::new(2, Model::Unipoint);
        for x in 0..3 {
            ds.points.push(StochasticPoint {
                coords: vec![rational(x, 1), rational(x, 1)],
                color: Color::Red,
                prob: BigRational::one(),
            });
        }
        assert!(!ds.validate(Level::Gp).passes());
        let moved = jitter(&ds, &rational(1, 100), 5);
        assert_eq!(moved, jitter(&ds, &rational(1, 100), 5));
        assert!(moved.validate(Level::Gp).passes());
    }

    #[test]
    fn sgpp_level_is_respected() {
        let ds = gen_random_at(5, 5, 4, &ProbLaw::Uniform, 9, Level::Sgpp);
        assert!(ds.validate(Level::Sgpp).passes());
    }

    #[test]
    fn multipoint_probabilities_are_valid() {
        let ds = gen_multipoint(3, 3, 3, 2, 5, Level::Gp);
        ds.check().unwrap();
        assert!(ds.validate(Level::Gp).passes());
    }

    #[test]
    fn cluster_stress_layout() {
        let eps = rational(1, 100);
        let ds = gen_cluster_stress(2, 4, 2, &eps, 7).unwrap();
        assert_eq!(ds.points.len(), 6);
        assert!(ds.points.iter().all(|p| p.prob == rational(1, 2)));
        let near = |p: &Point<BigRational>, c: [i64; 2]| {
            p.iter()
                .zip(c)
                .all(|(v, ci)| (v.clone() - rational(ci, 1)) < eps && (rational(ci, 1) - v.clone()) < eps)
        };
        assert!(near(&ds.points[0].coords, [0, 0]) && near(&ds.points[1].coords, [0, 0]));
        assert!(near(&ds.points[2].coords, [1, 0]) && near(&ds.points[3].coords, [1, 0]));
        assert!(near(&ds.points[4].coords, [0, 1]) && near(&ds.points[5].coords, [0, 1]));
        assert_eq!(gen_cluster_stress(1, 2, 2, &eps, 1).unwrap().points.len(), 3);
        assert!(gen_cluster_stress(2, 3, 2, &eps, 1).is_err());
    }
}
