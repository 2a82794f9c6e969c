//! Gap functions for an isolated `k`-descent block.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::{binom, ratio_f64};
use crate::error::{ensure, Result};
use crate::sampling::stream_rng;

fn check_unit(x: f64, y: f64) -> Result<()> {
    ensure!(
        (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y),
        Range,
        "θ needs x, y in [0, 1], got ({x}, {y})"
    );
    Ok(())
}

/// `1 - x^k - y^k + 1_{x>y} (x-y)^k`.
pub fn theta(k: usize, x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    let k = k as i32;
    let mut v = 1.0 - x.powi(k) - y.powi(k);
    if x > y {
        v += (x - y).powi(k);
    }
    Ok(v)
}

/// `P(max > x and min <= y)` for `k` uniform points:
/// `1 - x^k - (1-y)^k + 1_{x>y} (x-y)^k`.
///
/// With `x` the value just before a decreasing block and `y` the value just
/// after it, this is the probability that the block is entered and left by ascents.
pub fn theta_flank(k: usize, x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    Ok(theta_flank_unchecked(k, x, y))
}

#[inline]
pub(crate) fn theta_flank_unchecked(k: usize, x: f64, y: f64) -> f64 {
    let k = k as i32;
    let mut v = 1.0 - x.powi(k) - (1.0 - y).powi(k);
    if x > y {
        v += (x - y).powi(k);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaCheck {
    pub estimate: f64,
    pub stderr: f64,
    /// `1 - C(l2,k)/C(n,k) - C(n-l1,k)/C(n,k) + 1_{l2>l1} C(l2-l1,k)/C(n,k)`.
    pub exact: f64,
    /// `theta_flank(k, l2/n, l1/n)`.
    pub limit: f64,
    /// `theta(k, l2/n, l1/n)`, for comparison.
    pub theta_raw: f64,
}

const CHUNK: usize = 1 << 14;

/// Monte Carlo estimate of `P(max > l2 and min <= l1)` for a uniform `k`-subset of `[n]`.
pub fn theta_mc_check(
    k: usize,
    n: usize,
    l1: usize,
    l2: usize,
    samples: usize,
    seed: u64,
) -> Result<ThetaCheck> {
    ensure!(k >= 1 && k <= n, Parameter, "need 1 <= k <= n");
    ensure!(l1 <= n && l2 <= n, Parameter, "l1, l2 must lie in 0..=n");
    ensure!(samples >= 2, Parameter, "need at least two samples");
    let chunks = samples.div_ceil(CHUNK);
    let hits: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let size = CHUNK.min(samples - c * CHUNK);
            let mut hits = 0u64;
            for _ in 0..size {
                let picked = sample(&mut rng, n, k);
                let (mut lo, mut hi) = (usize::MAX, 0);
                for v in picked.iter() {
                    lo = lo.min(v + 1);
                    hi = hi.max(v + 1);
                }
                if hi > l2 && lo <= l1 {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    let p = hits.iter().sum::<u64>() as f64 / samples as f64;
    let total = binom(n as i64, k as i64);
    let part = |a: usize| ratio_f64(&binom(a as i64, k as i64), &total);
    let mut exact = 1.0 - part(l2) - part(n - l1);
    if l2 > l1 {
        exact += part(l2 - l1);
    }
    let (x, y) = (l2 as f64 / n as f64, l1 as f64 / n as f64);
    Ok(ThetaCheck {
        estimate: p,
        stderr: (p * (1.0 - p) / (samples as f64 - 1.0)).sqrt(),
        exact,
        limit: theta_flank_unchecked(k, x, y),
        theta_raw: theta(k, x, y)?,
    })
}
