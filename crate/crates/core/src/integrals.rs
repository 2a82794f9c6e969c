//! Limit constants of `d_k(I, n) / f_k(n)`.
//!
//! For a fixed set `I` with `t = max(I) + k - 1`,
//! `c_{I,k} = (1/(t! r^t)) ∫_0^1 φ(x) ∫_0^x Σ_s a_s Φ_s^t(y) dy dx`
//! where `a_s` counts permutations of `[t]` with `k`-descent set `I` ending in `s`.
//! The inner integral is `Σ_s a_s P(Beta(s, t-s+1) <= x)`, a polynomial with
//! integer Bernstein coefficients, so only the outer integral is numeric.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::growth::growth_rate;
use crate::asymptotics::orderstat::density_unchecked;
use crate::asymptotics::phi::PhiEvaluator;
use crate::asymptotics::theta::theta_flank_unchecked;
use crate::combin::{binom, factorial_f64, ratio_f64};
use crate::descent::{count_with_set, parametrized_row, DescentSpec};
use crate::error::{ensure, Result};
use crate::oracle::{enumerate_table, PatternQuery};
use crate::quadrature::{integrate, integrate_split};
use crate::sampling::{latin_hypercube, stream_rng};

pub const MAX_T_EXACT: usize = 20;
pub const MAX_T_ORACLE: usize = 10;
pub const MIN_SAMPLES: usize = 100_000;

const OUTER_TOL: f64 = 1e-12;
const INNER_TOL: f64 = 1e-13;
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AdaptiveNested,
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstantInputs {
    Set {
        k: usize,
        #[serde(rename = "I")]
        set: Vec<usize>,
    },
    Blocks {
        k: usize,
        a: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantResult {
    pub value: f64,
    pub estimated_error: f64,
    pub method: Method,
    pub inputs: ConstantInputs,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl ConstantResult {
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::to_value(&self.inputs).expect("plain data");
        let map = obj.as_object_mut().expect("inputs serialize to an object");
        map.insert("value".into(), self.value.into());
        map.insert("error".into(), self.estimated_error.into());
        map.insert(
            "method".into(),
            serde_json::to_value(self.method).expect("plain data"),
        );
        map.insert("samples".into(), self.samples.into());
        map.insert("seed".into(), self.seed.into());
        obj
    }
}

/// `a_s = d_k(r_t(I), t+1-s, t)` for `s = 1..=t`.
pub fn last_entry_weights(spec: &DescentSpec) -> Result<Vec<BigInt>> {
    ensure!(!spec.set().is_empty(), Parameter, "I must be nonempty");
    let t = spec.t();
    let row = parametrized_row(&spec.reversed(t)?, t);
    Ok((1..=t).map(|s| row[t - s].clone()).collect())
}

/// Bernstein coefficients `B_j = C(t, j) Σ_{s<=j} a_s`, so that
/// `∫_0^x Σ_s a_s Φ_s^t = Σ_j B_j x^j (1-x)^{t-j}`.
pub fn inner_bernstein(weights: &[BigInt]) -> Vec<BigInt> {
    let t = weights.len();
    let mut partial = BigInt::zero();
    let mut out = vec![BigInt::zero(); t + 1];
    for j in 1..=t {
        partial += &weights[j - 1];
        out[j] = &partial * binom(t as i64, j as i64);
    }
    out
}

fn bernstein_eval(coeffs: &[f64], x: f64) -> f64 {
    let t = coeffs.len() - 1;
    let y = 1.0 - x;
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| c * x.powi(j as i32) * y.powi((t - j) as i32))
        .sum()
}

/// `c_{I,k}` by the regrouped formula with exact coefficients.
pub fn c_constant(spec: &DescentSpec) -> Result<ConstantResult> {
    let t = spec.t();
    ensure!(!spec.set().is_empty(), Parameter, "I must be nonempty");
    ensure!(
        t <= MAX_T_EXACT,
        CapExceeded,
        "t = {t} exceeds the exact-coefficient guard {MAX_T_EXACT}"
    );
    let phi = PhiEvaluator::series(spec.k())?;
    let weights = last_entry_weights(spec)?;
    let scale: BigInt = weights.iter().sum();
    ensure!(
        !scale.is_zero(),
        Numerical,
        "no permutation of [{t}] has this descent set"
    );
    let coeffs: Vec<f64> = inner_bernstein(&weights)
        .iter()
        .map(|b| ratio_f64(b, &scale))
        .collect();
    let q = integrate(
        |x| phi.eval_unchecked(x) * bernstein_eval(&coeffs, x),
        0.0,
        1.0,
        OUTER_TOL,
    )?;
    let x1 = phi.profile().x1;
    let factor =
        x1.powi(t as i32) / factorial_f64(t as u64) * scale.to_f64().unwrap_or(f64::INFINITY);
    Ok(ConstantResult {
        value: factor * q.value,
        estimated_error: factor * q.error,
        method: Method::AdaptiveNested,
        inputs: ConstantInputs::Set {
            k: spec.k(),
            set: spec.set().to_vec(),
        },
        samples: None,
        seed: None,
    })
}

/// `c_{I,k}` from the unregrouped sum over `τ ∈ D_k(I, t)`, with `τ(t)` tallied by
/// brute force and both integrals done numerically.
pub fn dasy_integral_direct(spec: &DescentSpec) -> Result<ConstantResult> {
    let t = spec.t();
    ensure!(!spec.set().is_empty(), Parameter, "I must be nonempty");
    ensure!(
        t <= MAX_T_ORACLE,
        CapExceeded,
        "t = {t} exceeds the oracle guard {MAX_T_ORACLE}"
    );
    let table = enumerate_table(&PatternQuery::k_descent(spec.k(), t)?.with_cap(MAX_T_ORACLE))?;
    let by_last: Vec<f64> = (1..=t)
        .map(|s| (1..=t).map(|m| table.joint(spec.set(), m, s)).sum::<u64>() as f64)
        .collect();
    let scale: f64 = by_last.iter().sum();
    ensure!(
        scale > 0.0,
        Numerical,
        "no permutation of [{t}] has this descent set"
    );
    let phi = PhiEvaluator::series(spec.k())?;
    let mut failure = None;
    let mut inner = |x: f64| -> f64 {
        let q = integrate(
            |y| {
                by_last
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, w)| w / scale * density_unchecked(t, i + 1, y))
                    .sum()
            },
            0.0,
            x,
            INNER_TOL,
        );
        match q {
            Ok(q) => q.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let outer = integrate(|x| phi.eval_unchecked(x) * inner(x), 0.0, 1.0, OUTER_TOL);
    if let Some(e) = failure {
        return Err(e);
    }
    let q = outer?;
    let factor = phi.profile().x1.powi(t as i32) / factorial_f64(t as u64) * scale;
    Ok(ConstantResult {
        value: factor * q.value,
        estimated_error: factor * (q.error + INNER_TOL),
        method: Method::AdaptiveNested,
        inputs: ConstantInputs::Set {
            k: spec.k(),
            set: spec.set().to_vec(),
        },
        samples: None,
        seed: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub k: usize,
    pub a: usize,
    pub monte_carlo: ConstantResult,
    /// Nested quadrature, available for `a = 1`.
    pub quadrature: Option<ConstantResult>,
    /// `c_k^a / (k! r_k^{ak})`.
    pub prefactor_single: f64,
    /// `c_k^a / ((k!)^a r_k^{ak})`.
    pub prefactor_power: f64,
}

impl EquidistReport {
    /// `|MC - quadrature|` in units of the combined standard error.
    pub fn agreement_sigmas(&self) -> Option<f64> {
        self.quadrature.as_ref().map(|q| {
            let mc = &self.monte_carlo;
            let spread = (mc.estimated_error.powi(2) + q.estimated_error.powi(2)).sqrt();
            (mc.value - q.value).abs() / spread.max(f64::MIN_POSITIVE)
        })
    }

    /// The best available value of `C_{k,a}`.
    pub fn value(&self) -> f64 {
        self.quadrature.as_ref().unwrap_or(&self.monte_carlo).value
    }

    /// Predicted `d_k(I, n)/f_k(n)` for a sparse `|I| = a` under each prefactor.
    pub fn predictions(&self) -> (f64, f64) {
        let c = self.value();
        (self.prefactor_single * c, self.prefactor_power * c)
    }
}

/// `C_{k,a} = ∫ φ(x_1) φ(1-y_1) θ(y_1, x_2) φ(x_2) ⋯ φ(1-y_{a+1})` over `[0,1]^{2(a+1)}`,
/// with `θ` the flank probability.
pub fn equidist_constant(k: usize, a: usize, samples: usize, seed: u64) -> Result<EquidistReport> {
    let profile = growth_rate(k, 1e-14)?;
    let kf = factorial_f64(k as u64);
    let scaled = profile.c_k.powi(a as i32) * profile.x1.powi((a * k) as i32);
    let prefactor_single = scaled / kf;
    let prefactor_power = scaled / kf.powi(a as i32);
    let inputs = ConstantInputs::Blocks { k, a };
    if a == 0 {
        let exact = ConstantResult {
            value: 1.0,
            estimated_error: 0.0,
            method: Method::Exact,
            inputs,
            samples: None,
            seed: None,
        };
        return Ok(EquidistReport {
            k,
            a,
            monte_carlo: exact,
            quadrature: None,
            prefactor_single,
            prefactor_power,
        });
    }
    ensure!(
        samples >= MIN_SAMPLES,
        Parameter,
        "need at least {MIN_SAMPLES} samples"
    );
    let phi = PhiEvaluator::series(k)?;
    let monte_carlo = block_monte_carlo(&phi, a, samples, seed, inputs.clone());
    let quadrature = if a == 1 {
        Some(block_quadrature(&phi, inputs)?)
    } else {
        None
    };
    Ok(EquidistReport {
        k,
        a,
        monte_carlo,
        quadrature,
        prefactor_single,
        prefactor_power,
    })
}

fn block_integrand(phi: &PhiEvaluator, a: usize, p: &[f64]) -> f64 {
    // p = (x_1, y_1, x_2, y_2, ..., x_{a+1}, y_{a+1})
    let k = phi.k();
    let mut v = 1.0;
    for j in 0..=a {
        let (x, y) = (p[2 * j], p[2 * j + 1]);
        v *= phi.eval_unchecked(x) * phi.eval_unchecked(1.0 - y);
        if j < a {
            v *= theta_flank_unchecked(k, y, p[2 * j + 2]);
        }
    }
    v
}

fn block_monte_carlo(
    phi: &PhiEvaluator,
    a: usize,
    samples: usize,
    seed: u64,
    inputs: ConstantInputs,
) -> ConstantResult {
    let batches = samples.div_ceil(BATCH);
    let dims = 2 * (a + 1);
    let sums: Vec<(f64, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let size = samples / batches + usize::from(b < samples % batches);
            let mut rng = stream_rng(seed, b as u64);
            let design = latin_hypercube(&mut rng, size, dims);
            let total: f64 = design.iter().map(|p| block_integrand(phi, a, p)).sum();
            (total, size)
        })
        .collect();
    let value = sums.iter().map(|s| s.0).sum::<f64>() / samples as f64;
    let means: Vec<f64> = sums.iter().map(|(s, n)| s / *n as f64).collect();
    let spread = if means.len() > 1 {
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        (var / means.len() as f64).sqrt()
    } else {
        f64::INFINITY
    };
    ConstantResult {
        value,
        estimated_error: spread,
        method: Method::MonteCarlo,
        inputs,
        samples: Some(samples),
        seed: Some(seed),
    }
}

fn block_quadrature(phi: &PhiEvaluator, inputs: ConstantInputs) -> Result<ConstantResult> {
    let k = phi.k();
    let first = integrate(|x| phi.eval_unchecked(x), 0.0, 1.0, OUTER_TOL)?;
    let last = integrate(|y| phi.eval_unchecked(1.0 - y), 0.0, 1.0, OUTER_TOL)?;
    let mut failure = None;
    let mut inner_error = 0.0f64;
    let middle = integrate(
        |y1| {
            let q = integrate_split(
                |x2| theta_flank_unchecked(k, y1, x2) * phi.eval_unchecked(x2),
                0.0,
                1.0,
                &[y1],
                INNER_TOL,
            );
            match q {
                Ok(q) => {
                    inner_error = inner_error.max(q.error);
                    phi.eval_unchecked(1.0 - y1) * q.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        OUTER_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let middle = middle?;
    let value = first.value * middle.value * last.value;
    Ok(ConstantResult {
        value,
        estimated_error: middle.error + 2.0 * inner_error + first.error + last.error,
        method: Method::AdaptiveNested,
        inputs,
        samples: None,
        seed: None,
    })
}

/// `d_k(I, n) / f_k(n)` from exact counts.
pub fn exact_ratio(spec: &DescentSpec, n: usize) -> Result<f64> {
    let all = count_with_set(&DescentSpec::empty(spec.k())?, n);
    ensure!(!all.is_zero(), Parameter, "n must be at least 1");
    Ok(ratio_f64(&count_with_set(spec, n), &all))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub ratio_exact: f64,
    pub constant: f64,
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub spec: DescentSpec,
    pub constant: ConstantResult,
    pub rows: Vec<ConvergenceRow>,
    /// Relative gaps below this are indistinguishable from rounding and quadrature error.
    pub noise_floor: f64,
}

impl ConvergenceReport {
    /// Each gap is smaller than the previous one, or both are at the noise floor.
    pub fn gaps_shrinking(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].rel_gap < w[0].rel_gap
                || (w[1].rel_gap <= self.noise_floor && w[0].rel_gap <= self.noise_floor)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio_exact,constant,rel_gap\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.n, r.ratio_exact, r.constant, r.rel_gap
            )
            .expect("writing to a String");
        }
        out
    }
}

pub fn convergence_report(spec: &DescentSpec, n_list: &[usize]) -> Result<ConvergenceReport> {
    ensure!(!n_list.is_empty(), Parameter, "n list is empty");
    let constant = c_constant(spec)?;
    let c = constant.value;
    let rows = n_list
        .par_iter()
        .map(|&n| {
            ensure!(spec.fits(n), Parameter, "n = {n} is too small for {spec}");
            let ratio = exact_ratio(spec, n)?;
            Ok(ConvergenceRow {
                n,
                ratio_exact: ratio,
                constant: c,
                rel_gap: (ratio - c).abs() / c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let noise_floor = (constant.estimated_error / c).max(64.0 * f64::EPSILON);
    Ok(ConvergenceReport {
        spec: spec.clone(),
        constant,
        rows,
        noise_floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuduRow {
    pub i: usize,
    pub constant: f64,
    /// `c_{{i},k} / c_{{i+1},k}`.
    pub ratio_to_next: Option<f64>,
}

/// `c_{{i},k}` for `i = 1..=max_i` and the ratios of neighbours.
pub fn dudu_table(k: usize, max_i: usize) -> Result<Vec<DuduRow>> {
    ensure!(max_i >= 1, Parameter, "max_i must be at least 1");
    let values = (1..=max_i)
        .into_par_iter()
        .map(|i| Ok(c_constant(&DescentSpec::new(k, [i])?)?.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok((0..max_i)
        .map(|j| DuduRow {
            i: j + 1,
            constant: values[j],
            ratio_to_next: values.get(j + 1).map(|next| values[j] / next),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, set: &[usize]) -> DescentSpec {
        DescentSpec::new(k, set.iter().copied()).unwrap()
    }

    #[test]
    fn weights_for_first_position() {
        let w = last_entry_weights(&spec(3, &[1])).unwrap();
        assert_eq!(w, vec![BigInt::from(1), BigInt::zero(), BigInt::zero()]);
        assert_eq!(inner_bernstein(&w), [0, 3, 3, 1].map(BigInt::from).to_vec());
    }

    #[test]
    fn first_position_constant() {
        let c = c_constant(&spec(3, &[1])).unwrap();
        let x1 = growth_rate(3, 1e-14).unwrap().x1;
        assert!((c.value - (x1 - 1.0)).abs() < 1e-12);
        assert!(c.estimated_error < 1e-7);
    }

    #[test]
    fn regrouping_agrees() {
        for (k, set) in [(3, &[1usize][..]), (3, &[2]), (4, &[1]), (3, &[1, 4])] {
            let s = spec(k, set);
            let a = c_constant(&s).unwrap().value;
            let b = dasy_integral_direct(&s).unwrap().value;
            assert!((a - b).abs() < 1e-9, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn dudu_shape() {
        let rows = dudu_table(3, 4).unwrap();
        let c: Vec<f64> = rows.iter().map(|r| r.constant).collect();
        assert!(c[0] > c[1] && c[1] < c[2] && c[2] > c[3]);
        assert!((rows[0].ratio_to_next.unwrap() - 1.132101).abs() < 1e-3);
        assert!((rows[1].ratio_to_next.unwrap() - 0.826993).abs() < 1e-3);
        assert!(rows[3].ratio_to_next.is_none());
    }

    #[test]
    fn guards() {
        assert!(c_constant(&spec(3, &[19])).is_err());
        assert!(dasy_integral_direct(&spec(3, &[9])).is_err());
        assert!(c_constant(&DescentSpec::empty(3).unwrap()).is_err());
        assert!(equidist_constant(3, 1, 10, 0).is_err());
    }

    #[test]
    fn block_constant_a0_and_a1() {
        let r0 = equidist_constant(3, 0, 0, 0).unwrap();
        assert_eq!(r0.value(), 1.0);
        let r = equidist_constant(3, 1, 200_000, 5).unwrap();
        let q = r.quadrature.as_ref().unwrap().value;
        assert!(q > 0.0 && q <= 1.0);
        assert!(r.agreement_sigmas().unwrap() < 3.0, "{r:?}");
        assert_eq!(r.prefactor_single, r.prefactor_power);
    }

    #[test]
    fn convergence_rows() {
        let rep = convergence_report(&spec(3, &[2]), &[20, 30, 40]).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.gaps_shrinking());
        assert!(rep
            .to_csv()
            .starts_with("n,ratio_exact,constant,rel_gap\n20,"));
    }

    #[test]
    fn json_shape() {
        let c = c_constant(&spec(3, &[2])).unwrap().to_json();
        assert_eq!(c["k"], 3);
        assert_eq!(c["I"], serde_json::json!([2]));
        assert_eq!(c["method"], "adaptive_nested");
        assert!(c["samples"].is_null());
        let e = equidist_constant(3, 0, 0, 0).unwrap().monte_carlo.to_json();
        assert_eq!(e["a"], 0);
    }
}
