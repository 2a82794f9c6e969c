use kdescent_core::oracle::descent_set;
use kdescent_core::{
    build_triangle, count_with_set, discrete_order_stat, enumerate_table, parametrized_count,
    parametrized_row, BigInt, DescentSpec, GeneralTable, OrderStatSpec, PatternQuery, PhiEvaluator,
    PhiMode,
};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = (usize, usize, Vec<usize>)> {
    (2usize..=4, 1usize..=8).prop_flat_map(|(k, n)| {
        let slots = (n + 1).saturating_sub(k).max(1);
        (
            Just(k),
            Just(n),
            proptest::collection::btree_set(1..=slots, 0..=3).prop_map(|s| s.into_iter().collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_matches_brute_force((k, n, set) in spec_strategy()) {
        let spec = DescentSpec::new(k, set.iter().copied()).unwrap();
        let expected = if n < k {
            let all: u64 = (1..=n as u64).product();
            if set.is_empty() { all } else { 0 }
        } else {
            enumerate_table(&PatternQuery::k_descent(k, n).unwrap()).unwrap().by_set(&set)
        };
        prop_assert_eq!(count_with_set(&spec, n), BigInt::from(expected));
    }

    #[test]
    fn first_entry_split_sums((k, n, set) in spec_strategy()) {
        let spec = DescentSpec::new(k, set).unwrap();
        let row = parametrized_row(&spec, n);
        let total: BigInt = row.iter().sum();
        prop_assert_eq!(total, count_with_set(&spec, n));
        for m in 1..=n {
            prop_assert_eq!(&parametrized_count(&spec, m, n).unwrap(), &row[m - 1]);
        }
    }

    #[test]
    fn reverse_complement_symmetry((k, n, set) in spec_strategy()) {
        let spec = DescentSpec::new(k, set).unwrap();
        prop_assume!(spec.fits(n));
        let mirrored = spec.reversed(n).unwrap();
        prop_assert_eq!(count_with_set(&spec, n), count_with_set(&mirrored, n));
    }

    #[test]
    fn descent_set_of_reverse_complement(w in Just((1..=8).collect::<Vec<usize>>()).prop_shuffle(), k in 2usize..=4) {
        let n = w.len();
        let rc: Vec<usize> = w.iter().rev().map(|&v| n + 1 - v).collect();
        let mut expected: Vec<usize> = descent_set(&w, k).iter().map(|&i| n + 2 - k - i).collect();
        expected.sort_unstable();
        prop_assert_eq!(descent_set(&rc, k), expected);
    }

    #[test]
    fn table_rows_match_dp(k in 2usize..=4, first in 1usize..=4, gap in 1usize..=4) {
        let spec = DescentSpec::new(k, [first, first + k + gap]).unwrap();
        let table = GeneralTable::build(&spec, 30).unwrap();
        prop_assert_eq!(table, GeneralTable::build_by_dp(&spec, 30).unwrap());
    }

    #[test]
    fn phi_modes_agree(x in 0.0f64..=1.0, k in 3usize..=8) {
        let series = PhiEvaluator::new(k, PhiMode::Series).unwrap();
        let roots = PhiEvaluator::new(k, PhiMode::RootsOfUnity).unwrap();
        prop_assert!((series.eval(x).unwrap() - roots.eval(x).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn order_stat_pmf_is_a_distribution(n in 1usize..=25, t in 1usize..=25, s in 1usize..=25) {
        prop_assume!(t <= n && s <= t);
        let d = discrete_order_stat(OrderStatSpec::new(n, t, s).unwrap());
        let total: BigRational = d.pmf.iter().sum();
        prop_assert!(total.is_one());
        prop_assert!(d.identities_hold());
    }
}

#[test]
fn triangle_rows_sum_to_set_free_counts() {
    for k in 2..=5 {
        let t = build_triangle(k, 30).unwrap();
        let spec = DescentSpec::new(k, []).unwrap();
        for n in 1..=30 {
            assert_eq!(t.f_total(n).unwrap(), &count_with_set(&spec, n));
        }
        assert!(t.rows_monotone());
    }
}

#[test]
fn realizable_sets_partition_all_permutations() {
    for (k, n) in [(2, 7), (3, 8), (4, 8)] {
        let slots = n + 1 - k;
        let total: BigInt = (0u32..1 << slots)
            .map(|mask| {
                let set = (0..slots).filter(|b| mask >> b & 1 == 1).map(|b| b + 1);
                count_with_set(&DescentSpec::new(k, set).unwrap(), n)
            })
            .sum();
        assert_eq!(total, (1..=n).map(BigInt::from).product::<BigInt>());
    }
}
