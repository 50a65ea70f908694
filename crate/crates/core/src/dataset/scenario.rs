// SPDX-License-Identifier: Apache-2.0

//! Probability that some locations exist and others do not.
//!
//! The probability factorizes over dependence units. [`ScenarioTracker`]
//! keeps that product up to date under single-location edits, which is what
//! the sliding-window strategies need.

use crate::dataset::{Locations, UnitKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Required-present and required-absent location ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub present: Vec<usize>,
    pub absent: Vec<usize>,
}

impl Scenario {
    pub fn new(present: Vec<usize>, absent: Vec<usize>) -> Self {
        Self { present, absent }
    }
}

#[derive(Clone, Debug)]
struct UnitState<S> {
    present: u32,
    absent: u32,
    conflicts: u32,
    present_sum: S,
    absent_sum: S,
    factor: S,
    factor_zero: bool,
}

/// Incrementally maintained scenario probability.
#[derive(Clone, Debug)]
pub struct ScenarioTracker<'a, S> {
    locs: &'a Locations<S>,
    present: Vec<u32>,
    absent: Vec<u32>,
    units: Vec<UnitState<S>>,
    product: S,
    zeros: usize,
}

fn is_zero_factor<S: Scalar>(v: &S) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.to_f64().abs() <= 1e-12
    }
}

impl<'a, S: Scalar> ScenarioTracker<'a, S> {
    pub fn new(locs: &'a Locations<S>) -> Self {
        let units = locs
            .units
            .iter()
            .map(|_| UnitState {
                present: 0,
                absent: 0,
                conflicts: 0,
                present_sum: S::zero(),
                absent_sum: S::zero(),
                factor: S::one(),
                factor_zero: false,
            })
            .collect();
        Self {
            locs,
            present: vec![0; locs.len()],
            absent: vec![0; locs.len()],
            units,
            product: S::one(),
            zeros: 0,
        }
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.locs);
    }

    fn member_prob(&self, id: usize) -> S {
        let unit = &self.locs.units[self.locs.unit_of[id]];
        match unit.kind {
            UnitKind::Exclusive => {
                let k = unit.members.iter().position(|&m| m == id).unwrap();
                unit.probs[k].clone()
            }
            _ => unit.probs[0].clone(),
        }
    }

    fn refresh(&mut self, u: usize) {
        let unit = &self.locs.units[u];
        let st = &self.units[u];
        let factor = if st.conflicts > 0 {
            S::zero()
        } else {
            match unit.kind {
                UnitKind::Independent | UnitKind::AllOrNone => {
                    let p = unit.probs[0].clone();
                    match (st.present > 0, st.absent > 0) {
                        (true, true) => S::zero(),
                        (true, false) => p,
                        (false, true) => S::one() - p,
                        (false, false) => S::one(),
                    }
                }
                UnitKind::Exclusive => match st.present {
                    0 => S::one() - st.absent_sum.clone(),
                    1 => st.present_sum.clone(),
                    _ => S::zero(),
                },
            }
        };
        let zero = is_zero_factor(&factor);
        let st = &mut self.units[u];
        if st.factor_zero {
            self.zeros -= 1;
        } else {
            self.product = self.product.clone() / st.factor.clone();
        }
        if zero {
            self.zeros += 1;
        } else {
            self.product = self.product.clone() * factor.clone();
        }
        st.factor = factor;
        st.factor_zero = zero;
    }

    fn edit(&mut self, id: usize, as_present: bool, add: bool) {
        let u = self.locs.unit_of[id];
        let prob = self.member_prob(id);
        let (mine, other) = if as_present {
            (self.present[id], self.absent[id])
        } else {
            (self.absent[id], self.present[id])
        };
        let before_active = mine > 0;
        let new_count = if add { mine + 1 } else { mine.checked_sub(1).expect("removing an absent entry") };
        let after_active = new_count > 0;
        if as_present {
            self.present[id] = new_count;
        } else {
            self.absent[id] = new_count;
        }
        if before_active != after_active {
            let st = &mut self.units[u];
            let delta_conflict = other > 0;
            if after_active {
                if as_present {
                    st.present += 1;
                    st.present_sum = st.present_sum.clone() + prob;
                } else {
                    st.absent += 1;
                    st.absent_sum = st.absent_sum.clone() + prob;
                }
                if delta_conflict {
                    st.conflicts += 1;
                }
            } else {
                if as_present {
                    st.present -= 1;
                    st.present_sum = st.present_sum.clone() - prob;
                } else {
                    st.absent -= 1;
                    st.absent_sum = st.absent_sum.clone() - prob;
                }
                if delta_conflict {
                    st.conflicts -= 1;
                }
            }
            self.refresh(u);
        }
    }

    pub fn add_present(&mut self, id: usize) {
        self.edit(id, true, true);
    }

    pub fn remove_present(&mut self, id: usize) {
        self.edit(id, true, false);
    }

    pub fn add_absent(&mut self, id: usize) {
        self.edit(id, false, true);
    }

    pub fn remove_absent(&mut self, id: usize) {
        self.edit(id, false, false);
    }

    pub fn probability(&self) -> S {
        if self.zeros > 0 {
            S::zero()
        } else {
            self.product.clone()
        }
    }
}

/// Probability that every id of `s.present` exists and no id of `s.absent` does.
pub fn scenario_probability<S: Scalar>(locs: &Locations<S>, s: &Scenario) -> Result<S> {
    for &id in s.present.iter().chain(&s.absent) {
        if id >= locs.len() {
            return Err(Error::UnknownId(id));
        }
    }
    let mut t = ScenarioTracker::new(locs);
    for &id in &s.present {
        t.add_present(id);
    }
    for &id in &s.absent {
        t.add_absent(id);
    }
    Ok(t.probability())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Color, Dataset, Model, UncertainPoint};
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn multipoint() -> Locations<BigRational> {
        let mut ds = Dataset::new(1, Model::Multipoint);
        ds.uncertain_points.push(UncertainPoint {
            color: Color::Red,
            locations: vec![
                (vec![rational(0, 1)], rational(3, 10)),
                (vec![rational(1, 1)], rational(2, 5)),
            ],
        });
        ds.locations().unwrap()
    }

    #[test]
    fn exclusive_unit_rules() {
        let l = multipoint();
        let p = |pr: Vec<usize>, ab: Vec<usize>| scenario_probability(&l, &Scenario::new(pr, ab)).unwrap();
        assert_eq!(p(vec![0], vec![]), rational(3, 10));
        assert_eq!(p(vec![], vec![0, 1]), rational(3, 10));
        assert_eq!(p(vec![0, 1], vec![]), rational(0, 1));
        assert_eq!(p(vec![0], vec![1]), rational(3, 10));
        assert_eq!(p(vec![0], vec![0]), rational(0, 1));
        assert_eq!(p(vec![], vec![]), rational(1, 1));
        assert!(scenario_probability(&l, &Scenario::new(vec![7], vec![])).is_err());
    }

    #[test]
    fn tracker_edits_are_reversible() {
        let l = multipoint();
        let mut t = ScenarioTracker::new(&l);
        t.add_present(0);
        t.add_present(1);
        assert_eq!(t.probability(), rational(0, 1));
        t.remove_present(1);
        assert_eq!(t.probability(), rational(3, 10));
        t.add_absent(1);
        t.add_absent(1);
        t.remove_absent(1);
        assert_eq!(t.probability(), rational(3, 10));
        t.remove_present(0);
        assert_eq!(t.probability(), rational(3, 5));
    }
}
