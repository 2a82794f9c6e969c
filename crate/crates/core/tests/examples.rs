use kdescent_core::asymptotics::{denominator, phi3_closed_form};
use kdescent_core::oracle::descent_set;
use kdescent_core::{
    build_triangle, c_constant, count_with_set, dasy_integral_direct, discrete_order_stat,
    equidist_constant, growth_rate, joint_counts, order_stat_density, parametrized_count, theta,
    BigInt, DescentSpec, OrderStatSpec, PhiEvaluator,
};
use num_rational::BigRational;

fn spec(k: usize, set: &[usize]) -> DescentSpec {
    DescentSpec::new(k, set.iter().copied()).unwrap()
}

#[test]
fn triangle_values() {
    let t = build_triangle(3, 8).unwrap();
    assert_eq!(t.f_total(7).unwrap(), &BigInt::from(2017));
    assert_eq!(t.f_total(3).unwrap(), &BigInt::from(5));
    assert_eq!(t.f_total(1).unwrap(), &BigInt::from(1));
    assert_eq!(t.fmn_alternating(4, 4).unwrap(), BigInt::from(3));
    assert_eq!(t.fmn_alternating(3, 5).unwrap(), BigInt::from(15));
    assert_eq!(t.fmn_alternating(1, 6).unwrap(), BigInt::from(70));
    assert_eq!(t.g3(3).unwrap(), &BigInt::from(3));
    assert_eq!(t.g3(6).unwrap(), &BigInt::from(189));
    let two = build_triangle(2, 2).unwrap();
    assert_eq!(two.row(2).unwrap(), &[BigInt::from(1), BigInt::from(0)]);
}

#[test]
fn set_counts() {
    assert_eq!(count_with_set(&spec(3, &[]), 7), BigInt::from(2017));
    assert_eq!(count_with_set(&spec(3, &[1]), 3), BigInt::from(1));
    assert_eq!(count_with_set(&spec(3, &[1]), 4), BigInt::from(3));
    assert_eq!(count_with_set(&spec(3, &[2]), 4), BigInt::from(3));
    assert_eq!(count_with_set(&spec(2, &[1, 2]), 3), BigInt::from(1));
    assert_eq!(
        parametrized_count(&spec(3, &[]), 5, 5).unwrap(),
        BigInt::from(9)
    );
    assert_eq!(
        parametrized_count(&spec(3, &[1]), 3, 3).unwrap(),
        BigInt::from(1)
    );
    assert_eq!(
        parametrized_count(&spec(3, &[1]), 1, 3).unwrap(),
        BigInt::from(0)
    );
    assert_eq!(
        parametrized_count(&spec(3, &[1]), 4, 4).unwrap(),
        BigInt::from(2)
    );
    assert_eq!(descent_set(&[6, 3, 8, 5, 4, 1, 9, 7, 2], 3), vec![3, 4, 7]);
}

#[test]
fn joint_bounds_contain_brute_force() {
    let t = build_triangle(3, 5).unwrap();
    let j = joint_counts(3, 5, 11).unwrap();
    for (m1, m2) in [(1, 2), (2, 5)] {
        let (lo, hi) = t.sandwich_bounds(m1, m2, 5).unwrap();
        let v = BigInt::from(j.get(m1, m2));
        assert!(lo <= v && v <= hi, "({m1},{m2}): {lo} <= {v} <= {hi}");
    }
}

#[test]
fn growth_and_phi() {
    assert!((growth_rate(3, 1e-14).unwrap().x1 - 1.209199576).abs() < 1e-8);
    assert!((growth_rate(4, 1e-14).unwrap().x1 - 1.038415637).abs() < 1e-8);
    assert!((growth_rate(5, 1e-14).unwrap().x1 - 1.007187547786).abs() < 1e-9);
    assert_eq!(denominator(3, 0.0), 1.0);
    let root = 2.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
    assert!(denominator(3, root).abs() < 1e-12);
    assert!(denominator(6, 1.0) > 0.0);
    let phi = PhiEvaluator::series(3).unwrap();
    assert!((phi.eval(0.0).unwrap() - 1.209199576).abs() < 1e-8);
    assert!((phi.eval(1.0).unwrap() - 0.6606).abs() < 1e-4);
    assert!((phi.eval(0.5).unwrap() - 1.0320).abs() < 1e-4);
    assert!((phi3_closed_form(0.5) - phi.eval(0.5).unwrap()).abs() < 1e-12);
}

#[test]
fn order_statistics_and_gaps() {
    assert_eq!(order_stat_density(1, 1, 0.3).unwrap(), 1.0);
    assert!((order_stat_density(2, 1, 0.25).unwrap() - 1.5).abs() < 1e-15);
    assert!((order_stat_density(3, 2, 0.5).unwrap() - 1.5).abs() < 1e-15);
    let u = discrete_order_stat(OrderStatSpec::new(5, 1, 1).unwrap());
    assert_eq!(u.mean, BigRational::from_integer(3.into()));
    assert_eq!(u.variance, BigRational::from_integer(2.into()));
    let d = discrete_order_stat(OrderStatSpec::new(10, 4, 2).unwrap());
    assert_eq!(d.mean, BigRational::new(22.into(), 5.into()));
    assert_eq!(theta(3, 0.0, 0.0).unwrap(), 1.0);
    assert_eq!(theta(4, 0.0, 1.0).unwrap(), 0.0);
    assert_eq!(theta(3, 0.5, 0.5).unwrap(), 0.75);
}

#[test]
fn limit_constants() {
    let one = spec(3, &[1]);
    let c = c_constant(&one).unwrap();
    let x1 = growth_rate(3, 1e-14).unwrap().x1;
    assert!((c.value - (x1 - 1.0)).abs() < 1e-10);
    let direct = dasy_integral_direct(&one).unwrap();
    assert!((c.value - direct.value).abs() < 1e-9);
    let block = equidist_constant(3, 1, 200_000, 5).unwrap();
    let sigmas = block.agreement_sigmas().unwrap();
    assert!(
        sigmas < 4.0,
        "Monte Carlo and quadrature differ by {sigmas} sigma"
    );
    assert_eq!(equidist_constant(3, 0, 0, 0).unwrap().value(), 1.0);
}
