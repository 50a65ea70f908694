// SPDX-License-Identifier: Apache-2.0

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use proptest::strategy::Strategy as _;

use stochsep::dataset::generate::{gen_multipoint, gen_random_at, ProbLaw};
use stochsep::dataset::json::{parse_dataset, to_json_string};
use stochsep::dataset::{Color, Dataset};
use stochsep::esm::expected_separation_margin;
use stochsep::geom::position::Level;
use stochsep::geom::separability::check_separable;
use stochsep::oracle::{brute_esm, brute_inseparable, brute_sp};
use stochsep::sch;
use stochsep::sp::{separable_probability, Strategy};
use stochsep::{Exact, Scalar};

/// Seeded dataset with `2..=max` locations and both colors present.
fn dataset(max: usize, dims: std::ops::RangeInclusive<usize>) -> impl proptest::strategy::Strategy<Value = Dataset> {
    (dims, 1..max, any::<u64>()).prop_flat_map(move |(d, reds, seed)| {
        (1..=(max - reds)).prop_map(move |blues| gen_random_at(reds, blues, d, &ProbLaw::Uniform, seed, Level::Sgpp))
    })
}

fn sp(ds: &Dataset) -> Exact {
    separable_probability(&ds.locations().unwrap(), Strategy::Radial).unwrap().sp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_probabilities_are_complementary(ds in dataset(9, 1..=3)) {
        let l = ds.locations().unwrap();
        let p = brute_sp(&l, false).unwrap();
        prop_assert!(p >= Exact::zero() && p <= Exact::one());
        prop_assert_eq!(p + brute_inseparable(&l, false).unwrap(), Exact::one());
    }

    #[test]
    fn engine_matches_oracle(ds in dataset(9, 1..=3)) {
        let l = ds.locations().unwrap();
        let truth = brute_sp(&l, false).unwrap();
        prop_assert_eq!(separable_probability(&l, Strategy::Scan).unwrap().sp, truth.clone());
        prop_assert_eq!(separable_probability(&l, Strategy::Radial).unwrap().sp, truth);
    }

    #[test]
    fn swapping_colors_keeps_sp(ds in dataset(10, 2..=4)) {
        prop_assert_eq!(sp(&ds), sp(&ds.swap_colors()));
    }

    #[test]
    fn certain_points_give_zero_or_one(ds in dataset(9, 2..=3)) {
        let mut certain = ds.clone();
        certain.points.iter_mut().for_each(|p| p.prob = BigRational::one());
        let pick = |c: Color| -> Vec<Vec<Exact>> {
            certain.points.iter().filter(|p| p.color == c).map(|p| p.coords.clone()).collect()
        };
        let separable = check_separable(&pick(Color::Red), &pick(Color::Blue)).0;
        let expect = if separable { Exact::one() } else { Exact::zero() };
        prop_assert_eq!(sp(&certain), expect);
    }

    #[test]
    fn esm_matches_oracle_and_is_bounded(ds in dataset(8, 1..=3)) {
        let l = ds.locations().unwrap();
        let e = expected_separation_margin(&l).unwrap();
        let t = brute_esm(&l, false).unwrap();
        prop_assert!((e.emar - t).abs() < 1e-9, "{} vs {}", e.emar, t);
        prop_assert!(e.emar >= 0.0);
        let f = expected_separation_margin(&l.to_scalar::<f64>()).unwrap();
        prop_assert!((f.emar - e.emar).abs() < 1e-9);
    }

    #[test]
    fn json_round_trips(ds in dataset(10, 1..=4)) {
        let text = to_json_string(&ds);
        prop_assert_eq!(parse_dataset(text.as_bytes()).unwrap(), ds);
    }

    #[test]
    fn multipoint_matches_oracle(seed in any::<u64>(), d in 1usize..=2) {
        let ds = gen_multipoint(2, 1, 3, d, seed, Level::Sgpp);
        let l = ds.locations().unwrap();
        prop_assert_eq!(sp(&ds), brute_sp(&l, false).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hull_membership_and_distance_are_consistent(seed in any::<u64>(), n in 3usize..7) {
        let mut a = gen_random_at(1, n, 2, &ProbLaw::Uniform, seed, Level::Sgpp);
        let q = a.points.remove(0).coords;
        let inside: Exact = sch::sch_membership_probability(&a, &q, Strategy::Radial).unwrap();
        let far = sch::sch_epsilon_distant_probability(&a, &q, &BigRational::zero()).unwrap();
        prop_assert!((inside.to_f64() + far - 1.0).abs() < 1e-12);
        let dist = sch::sch_expected_distance::<Exact>(&a, &q).unwrap();
        prop_assert!(dist >= 0.0);
        // a strictly positive expected distance needs some instance that misses q
        prop_assert!(dist == 0.0 || far > 0.0);
    }
}
