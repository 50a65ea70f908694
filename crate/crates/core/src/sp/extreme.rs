// SPDX-License-Identifier: Apache-2.0

//! Extreme separators of deterministic instances and the charge each instance
//! receives from the probability decomposition.

use crate::dataset::{Color, Locations, Unit, UnitKind};
use crate::error::{Error, Result};
use crate::geom::separability::check_separable;
use crate::geom::{Hyperplane, Point};
use crate::scalar::Scalar;
use crate::sp::{enumerate_candidates, forbidden_ids};

#[derive(Clone, Debug, PartialEq)]
pub enum SeparatorKind<S> {
    /// One color is missing.
    AtInfinity,
    Hyperplane {
        hyperplane: Hyperplane<S>,
        on_set: Vec<usize>,
        aux: (S, S),
    },
    /// Line level: the location that is the smallest weak separator.
    Point { id: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeSeparator<S> {
    /// Number of two-coordinate projections applied.
    pub level: usize,
    /// Dimension of the space the separator lives in.
    pub dimension: usize,
    pub kind: SeparatorKind<S>,
}

/// A term of the decomposition that counts an instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Charge {
    Trivial,
    Candidate { dimension: usize, on_set: Vec<usize> },
    Base { id: usize },
}

impl<S: Scalar> ExtremeSeparator<S> {
    pub fn charge(&self) -> Charge {
        match &self.kind {
            SeparatorKind::AtInfinity => Charge::Trivial,
            SeparatorKind::Hyperplane { on_set, .. } => Charge::Candidate {
                dimension: self.dimension,
                on_set: on_set.clone(),
            },
            SeparatorKind::Point { id } => Charge::Base { id: *id },
        }
    }
}

fn both_colors(colors: &[Color], present: &[bool]) -> bool {
    let has = |c| colors.iter().zip(present).any(|(&k, &p)| p && k == c);
    has(Color::Red) && has(Color::Blue)
}

/// Candidates of every level with their forbidden sets, for per-instance charge lookup.
pub struct ChargeTable {
    colors: Vec<Color>,
    line: Option<Vec<usize>>,
    candidates: Vec<(usize, Vec<usize>, Vec<usize>)>,
}

impl ChargeTable {
    pub fn new<S: Scalar>(locs: &Locations<S>) -> Result<Self> {
        let d = locs.dimension;
        let mut candidates = Vec::new();
        let mut dim = d;
        let mut line = None;
        loop {
            let level = locs.drop_leading(d - dim);
            if dim == 1 {
                let mut order: Vec<usize> = (0..level.len()).collect();
                order.sort_by(|&a, &b| level.coords[a][0].partial_cmp(&level.coords[b][0]).unwrap());
                line = Some(order);
                break;
            }
            for c in enumerate_candidates(&level)? {
                if let Some(forbidden) = forbidden_ids(&level, &c)? {
                    candidates.push((dim, c.on_set, forbidden));
                }
            }
            if dim == 2 {
                break;
            }
            dim -= 2;
        }
        Ok(Self {
            colors: locs.colors.clone(),
            line,
            candidates,
        })
    }

    /// Every term whose indicator is one on the instance `present`.
    pub fn charges(&self, present: &[bool]) -> Vec<Charge> {
        let mut out = Vec::new();
        if !both_colors(&self.colors, present) {
            out.push(Charge::Trivial);
        }
        for (dim, on_set, forbidden) in &self.candidates {
            if on_set.iter().all(|&i| present[i]) && forbidden.iter().all(|&i| !present[i]) {
                out.push(Charge::Candidate {
                    dimension: *dim,
                    on_set: on_set.clone(),
                });
            }
        }
        if let Some(order) = &self.line {
            for (pos, &p) in order.iter().enumerate() {
                if !present[p] {
                    continue;
                }
                let c = self.colors[p];
                let right_same = order[pos + 1..].iter().any(|&x| present[x] && self.colors[x] == c);
                let left_opp = order[..pos].iter().any(|&x| present[x] && self.colors[x] != c);
                let right_opp = order[pos + 1..].iter().any(|&x| present[x] && self.colors[x] != c);
                if !right_same && !left_opp && right_opp {
                    out.push(Charge::Base { id: p });
                }
            }
        }
        out
    }
}

/// Charges received by one instance; see [`ChargeTable`] for repeated queries.
pub fn charges<S: Scalar>(locs: &Locations<S>, present: &[bool]) -> Result<Vec<Charge>> {
    Ok(ChargeTable::new(locs)?.charges(present))
}

/// The extreme separator of the instance formed by the `present` locations.
pub fn extreme_separator<S: Scalar>(locs: &Locations<S>, present: &[bool]) -> Result<ExtremeSeparator<S>> {
    let ids: Vec<usize> = (0..locs.len()).filter(|&i| present[i]).collect();
    let pick = |c: Color| -> Vec<Point<S>> {
        ids.iter()
            .filter(|&&i| locs.colors[i] == c)
            .map(|&i| locs.coords[i].clone())
            .collect()
    };
    let (reds, blues) = (pick(Color::Red), pick(Color::Blue));
    if reds.is_empty() || blues.is_empty() {
        return Ok(ExtremeSeparator {
            level: 0,
            dimension: locs.dimension,
            kind: SeparatorKind::AtInfinity,
        });
    }
    if !check_separable(&reds, &blues).0 {
        return Err(Error::Inseparable);
    }
    // the instance as its own deterministic location set
    let instance = Locations {
        dimension: locs.dimension,
        coords: ids.iter().map(|&i| locs.coords[i].clone()).collect(),
        colors: ids.iter().map(|&i| locs.colors[i]).collect(),
        unit_of: (0..ids.len()).collect(),
        units: (0..ids.len())
            .map(|i| Unit {
                kind: UnitKind::Independent,
                members: vec![i],
                probs: vec![S::one()],
            })
            .collect(),
    };
    let d = locs.dimension;
    let mut dim = d;
    let mut level_index = 0;
    loop {
        let level = instance.drop_leading(d - dim);
        if dim == 1 {
            let mut order: Vec<usize> = (0..level.len()).collect();
            order.sort_by(|&a, &b| level.coords[a][0].partial_cmp(&level.coords[b][0]).unwrap());
            let left = level.colors[order[0]];
            let last = *order
                .iter()
                .rev()
                .find(|&&i| level.colors[i] == left)
                .unwrap();
            return Ok(ExtremeSeparator {
                level: level_index,
                dimension: 1,
                kind: SeparatorKind::Point { id: ids[last] },
            });
        }
        for c in enumerate_candidates(&level)? {
            if let Some(forbidden) = forbidden_ids(&level, &c)? {
                if forbidden.is_empty() {
                    return Ok(ExtremeSeparator {
                        level: level_index,
                        dimension: dim,
                        kind: SeparatorKind::Hyperplane {
                            hyperplane: c.hyperplane,
                            on_set: c.on_set.iter().map(|&i| ids[i]).collect(),
                            aux: c.aux,
                        },
                    });
                }
            }
        }
        if dim == 2 {
            return Err(Error::DegenerateConfig(
                "separable planar instance without an extreme separator".into(),
            ));
        }
        dim -= 2;
        level_index += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::json::parse_dataset;
    use crate::scalar::rational;

    #[test]
    fn triangle_instances() {
        let doc = br#"{"version":1,"dimension":2,"model":"unipoint","points":[
            {"color":"red","coords":[0,0],"prob":"1/2"},
            {"color":"blue","coords":[2,0],"prob":"1/2"},
            {"color":"blue","coords":[1,1],"prob":"1/2"}]}"#;
        let l = parse_dataset(doc).unwrap().locations().unwrap();
        let e = extreme_separator(&l, &[true, true, true]).unwrap();
        assert_eq!(e.level, 0);
        match &e.kind {
            SeparatorKind::Hyperplane { on_set, hyperplane, .. } => {
                assert_eq!(on_set, &vec![0, 1]);
                assert_eq!(hyperplane.normal, vec![rational(0, 1), rational(2, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = extreme_separator(&l, &[false, true, true]).unwrap();
        assert_eq!(e.kind, SeparatorKind::AtInfinity);
        let table = ChargeTable::new(&l).unwrap();
        assert_eq!(table.charges(&[true, true, true]), vec![e_charge(&[0, 1])]);
        assert_eq!(table.charges(&[true, false, true]), vec![e_charge(&[0, 2])]);
    }

    fn e_charge(ids: &[usize]) -> Charge {
        Charge::Candidate {
            dimension: 2,
            on_set: ids.to_vec(),
        }
    }

    #[test]
    fn line_separator_is_max_of_left_color() {
        let doc = br#"{"version":1,"dimension":1,"model":"unipoint","points":[
            {"color":"red","coords":[0],"prob":"1"},
            {"color":"blue","coords":[1],"prob":"1"},
            {"color":"blue","coords":[3],"prob":"1"}]}"#;
        let l = parse_dataset(doc).unwrap().locations().unwrap();
        let e = extreme_separator(&l, &[true, true, true]).unwrap();
        assert_eq!(e.kind, SeparatorKind::Point { id: 0 });
        assert_eq!(e.charge(), Charge::Base { id: 0 });
    }
}
