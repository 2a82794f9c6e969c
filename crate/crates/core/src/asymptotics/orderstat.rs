//! Order statistics: the continuous density `Φ_s^t` and the exact discrete law
//! of the `s`-th smallest of a uniform `t`-subset of `[n]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combin::{binom, binom_f64};
use crate::error::{ensure, Result};

/// `Φ_s^t(y) = t!/((s-1)!(t-s)!) y^{s-1} (1-y)^{t-s}`, the Beta(s, t-s+1) density.
pub fn order_stat_density(t: usize, s: usize, y: f64) -> Result<f64> {
    ensure!(
        1 <= s && s <= t,
        Parameter,
        "need 1 <= s <= t, got s = {s}, t = {t}"
    );
    ensure!((0.0..=1.0).contains(&y), Range, "y = {y} outside [0, 1]");
    Ok(density_unchecked(t, s, y))
}

pub(crate) fn density_unchecked(t: usize, s: usize, y: f64) -> f64 {
    t as f64
        * binom_f64(t as i64 - 1, s as i64 - 1)
        * y.powi(s as i32 - 1)
        * (1.0 - y).powi((t - s) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderStatSpec {
    n: usize,
    t: usize,
    s: usize,
}

impl OrderStatSpec {
    pub fn new(n: usize, t: usize, s: usize) -> Result<Self> {
        ensure!(
            1 <= s && s <= t && t <= n,
            Parameter,
            "need 1 <= s <= t <= n, got n = {n}, t = {t}, s = {s}"
        );
        Ok(OrderStatSpec { n, t, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOrderStat {
    pub spec: OrderStatSpec,
    /// `pmf[ℓ - 1] = P(Y_s = ℓ)` for `ℓ = 1..=n`.
    pub pmf: Vec<BigRational>,
    pub mean: BigRational,
    pub variance: BigRational,
}

fn int(v: usize) -> BigInt {
    BigInt::from(v)
}

impl DiscreteOrderStat {
    /// `s (n+1) / (t+1)`.
    pub fn mean_formula(&self) -> BigRational {
        let OrderStatSpec { n, t, s } = self.spec;
        BigRational::new(int(s) * int(n + 1), int(t + 1))
    }

    /// `s (t-s+1) (n+1) (n-t) / ((t+1)^2 (t+2))`.
    pub fn variance_formula(&self) -> BigRational {
        let OrderStatSpec { n, t, s } = self.spec;
        BigRational::new(
            int(s) * int(t - s + 1) * int(n + 1) * int(n - t),
            int(t + 1) * int(t + 1) * int(t + 2),
        )
    }

    /// `n^2 / t`.
    pub fn variance_bound(&self) -> BigRational {
        let OrderStatSpec { n, t, .. } = self.spec;
        BigRational::new(int(n) * int(n), int(t))
    }

    pub fn identities_hold(&self) -> bool {
        self.pmf.iter().sum::<BigRational>().is_one()
            && self.mean == self.mean_formula()
            && self.variance == self.variance_formula()
            && self.variance <= self.variance_bound()
    }
}

/// Exact law via `P(Y_s = ℓ) = C(ℓ-1, s-1) C(n-ℓ, t-s) / C(n, t)`.
pub fn discrete_order_stat(spec: OrderStatSpec) -> DiscreteOrderStat {
    let OrderStatSpec { n, t, s } = spec;
    let total = binom(n as i64, t as i64);
    let pmf: Vec<BigRational> = (1..=n)
        .map(|l| {
            let ways = binom(l as i64 - 1, s as i64 - 1) * binom((n - l) as i64, (t - s) as i64);
            BigRational::new(ways, total.clone())
        })
        .collect();
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for (i, p) in pmf.iter().enumerate() {
        let l = BigRational::from_integer(int(i + 1));
        let lp = &l * p;
        second += &lp * &l;
        mean += lp;
    }
    let variance = second - &mean * &mean;
    DiscreteOrderStat {
        spec,
        pmf,
        mean,
        variance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn density_examples() {
        assert_eq!(order_stat_density(1, 1, 0.37).unwrap(), 1.0);
        assert!((order_stat_density(2, 1, 0.25).unwrap() - 1.5).abs() < 1e-15);
        assert!((order_stat_density(3, 2, 0.5).unwrap() - 1.5).abs() < 1e-15);
        assert!(order_stat_density(3, 4, 0.5).is_err());
        assert!(order_stat_density(3, 1, 1.5).is_err());
        for (t, s) in [(1, 1), (5, 2), (12, 7), (20, 20)] {
            let v = integrate(|y| density_unchecked(t, s, y), 0.0, 1.0, 1e-14).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_examples() {
        let u = discrete_order_stat(OrderStatSpec::new(5, 1, 1).unwrap());
        assert_eq!(u.mean, q(3, 1));
        assert_eq!(u.variance, q(2, 1));
        let d = discrete_order_stat(OrderStatSpec::new(3, 2, 1).unwrap());
        assert_eq!(d.pmf, vec![q(2, 3), q(1, 3), q(0, 1)]);
        assert_eq!(d.mean, q(4, 3));
        let e = discrete_order_stat(OrderStatSpec::new(10, 4, 2).unwrap());
        assert_eq!(e.mean, q(22, 5));
        assert!(OrderStatSpec::new(3, 4, 1).is_err());
    }

    #[test]
    fn closed_forms_small_range() {
        for n in 1..=12 {
            for t in 1..=n {
                for s in 1..=t {
                    let d = discrete_order_stat(OrderStatSpec::new(n, t, s).unwrap());
                    assert!(d.identities_hold(), "n={n} t={t} s={s}");
                }
            }
        }
    }
}
