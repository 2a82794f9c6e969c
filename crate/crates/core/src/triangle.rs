//! The number triangle `f_k(m, n)`: permutations of `[n]` that avoid
//! `k` consecutive decreasing entries and start with `m`.
//!
//! Rows `1..=k` are seeded from factorials. Every later row `n + k` is the
//! `k`-fold antidifference of row `n`, so the whole triangle up to `N` costs
//! `O(k N^2)` big-integer additions.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combin::{binom, factorial};
use crate::error::{ensure, Error, Result};

/// `Δ(a_1, ..., a_n) = (a_2 - a_1, ..., a_n - a_{n-1})`; empty for `n <= 1`.
pub fn difference(seq: &[BigInt]) -> Vec<BigInt> {
    seq.windows(2).map(|w| &w[1] - &w[0]).collect()
}

pub fn kth_difference(seq: &[BigInt], k: usize) -> Vec<BigInt> {
    let mut cur = seq.to_vec();
    for _ in 0..k {
        cur = difference(&cur);
    }
    cur
}

/// Builds the row whose `k`-th difference is `base`.
///
/// The first antidifference ends in `0`, antidifferences `2..k` start with
/// `0`, and the `k`-th starts with `first`. These are the boundary values
/// satisfied by any row of the triangle (and by the rows of a
/// [`GeneralTable`](crate::descent::GeneralTable)).
pub(crate) fn antidifference_row(base: &[BigInt], k: usize, first: &BigInt) -> Vec<BigInt> {
    let len = base.len();
    let mut below: Vec<BigInt> = base.to_vec();
    let mut scratch: Vec<BigInt> = Vec::with_capacity(len + k);

    // level 1: filled backwards from a trailing zero
    scratch.clear();
    scratch.resize(len + 1, BigInt::zero());
    for i in (0..len).rev() {
        scratch[i] = &scratch[i + 1] - &below[i];
    }
    std::mem::swap(&mut below, &mut scratch);

    for level in 2..=k {
        let cur_len = below.len() + 1;
        scratch.clear();
        scratch.reserve(cur_len);
        scratch.push(if level == k {
            first.clone()
        } else {
            BigInt::zero()
        });
        for i in 0..below.len() {
            let next = &scratch[i] + &below[i];
            scratch.push(next);
        }
        std::mem::swap(&mut below, &mut scratch);
    }
    below
}

/// Exact table of `f_k(m, n)` for `1 <= m <= n <= max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTriangle {
    k: usize,
    max_n: usize,
    // row n occupies cells[offset(n) .. offset(n) + n]
    cells: Vec<BigInt>,
    sums: Vec<BigInt>,
}

#[inline]
fn offset(n: usize) -> usize {
    n * (n - 1) / 2
}

impl CountTriangle {
    pub fn build(k: usize, max_n: usize) -> Result<Self> {
        ensure!(k >= 2, Parameter, "k must be at least 2, got {k}");
        ensure!(max_n >= 1, Parameter, "N must be at least 1, got {max_n}");

        let mut cells = Vec::with_capacity(offset(max_n + 1));
        let mut sums = Vec::with_capacity(max_n + 1);
        sums.push(BigInt::one()); // f_k(0) = 1

        for n in 1..=max_n.min(k) {
            let fact = factorial(n as u64 - 1);
            for m in 1..=n {
                if m == k && n == k {
                    cells.push(&fact - 1u32);
                } else {
                    cells.push(fact.clone());
                }
            }
            let s: BigInt = cells[offset(n)..].iter().sum();
            sums.push(s);
        }
        for n in (k + 1)..=max_n {
            let base_n = n - k;
            let base = &cells[offset(base_n)..offset(base_n) + base_n];
            let row = antidifference_row(base, k, &sums[n - 1]);
            debug_assert_eq!(row.len(), n);
            let s: BigInt = row.iter().sum();
            cells.extend(row);
            sums.push(s);
        }
        Ok(CountTriangle {
            k,
            max_n,
            cells,
            sums,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn row(&self, n: usize) -> Result<&[BigInt]> {
        ensure!(
            (1..=self.max_n).contains(&n),
            Range,
            "row {n} outside 1..={}",
            self.max_n
        );
        Ok(&self.cells[offset(n)..offset(n) + n])
    }

    /// `f_k(m, n)`.
    pub fn entry(&self, m: usize, n: usize) -> Result<&BigInt> {
        let row = self.row(n)?;
        ensure!((1..=n).contains(&m), Range, "m = {m} outside 1..={n}");
        Ok(&row[m - 1])
    }

    /// `f_k(n)`, the row sum.
    pub fn f_total(&self, n: usize) -> Result<&BigInt> {
        ensure!(
            (1..=self.max_n).contains(&n),
            Range,
            "n = {n} outside 1..={}",
            self.max_n
        );
        Ok(&self.sums[n])
    }

    /// `f_k(j)` extended by `f_k(0) = 1` and `f_k(j) = 0` for `j < 0`.
    pub fn total_extended(&self, j: i64) -> Result<BigInt> {
        if j < 0 {
            return Ok(BigInt::zero());
        }
        let j = j as usize;
        ensure!(
            j <= self.max_n,
            Range,
            "n = {j} beyond triangle size {}",
            self.max_n
        );
        Ok(self.sums[j].clone())
    }

    /// Alternating binomial expansion
    /// `Σ_j [binom(m-1, jk) f(n-1-jk) - binom(m-1, jk+k-1) f(n-jk-k)]`,
    /// which must reproduce `f_k(m, n)`.
    pub fn fmn_alternating(&self, m: usize, n: usize) -> Result<BigInt> {
        ensure!(
            m >= 1 && m <= n,
            Parameter,
            "need 1 <= m <= n, got m = {m}, n = {n}"
        );
        ensure!(
            n - 1 <= self.max_n,
            Range,
            "triangle must cover n - 1 = {}",
            n - 1
        );
        let k = self.k as i64;
        let (m, n) = (m as i64, n as i64);
        let mut acc = BigInt::zero();
        let mut j = 0i64;
        loop {
            let plus = j * k;
            let minus = j * k + k - 1;
            if plus > m - 1 {
                break;
            }
            acc += binom(m - 1, plus) * self.total_extended(n - 1 - plus)?;
            if minus < m {
                acc -= binom(m - 1, minus) * self.total_extended(n - 1 - minus)?;
            }
            j += 1;
        }
        Ok(acc)
    }

    /// `f_k(m, n)` extended with `f_k(m, 0) = 0`, used inside the joint bounds.
    fn entry_or_zero(&self, m: i64, n: i64) -> Result<BigInt> {
        if n <= 0 || m < 1 || m > n {
            return Ok(BigInt::zero());
        }
        Ok(self.entry(m as usize, n as usize)?.clone())
    }

    /// Lower and upper bounds on the joint count `f_k(m1, m2, n)` of
    /// avoiding permutations with first entry `m1` and last entry `m2`.
    pub fn sandwich_bounds(&self, m1: usize, m2: usize, n: usize) -> Result<(BigInt, BigInt)> {
        ensure!(m1 >= 1, Parameter, "m1 must be positive");
        ensure!(
            m1 <= m2,
            Parameter,
            "bounds need m1 <= m2, got m1 = {m1}, m2 = {m2}"
        );
        ensure!(m2 <= n, Parameter, "m2 = {m2} exceeds n = {n}");
        ensure!(n <= self.max_n, Range, "triangle must cover n = {n}");
        let k = self.k as i64;
        let (m1, m2, n) = (m1 as i64, m2 as i64, n as i64);

        let mut lower = BigInt::zero();
        let mut upper = BigInt::zero();
        for l in 1..=m1 {
            let tight = self.entry_or_zero((n - l).min(n + 1 - m2), n - l)?;
            let loose = self.entry_or_zero((n - l + 1 - m2).max(1), n - l)?;
            if l % k == 1 {
                lower += binom(m1 - 2, l - 1) * &tight;
                upper += binom(m1 - 1, l - 1) * &loose;
            }
            if l % k == 0 && l >= k {
                lower -= binom(m1 - 1, l - 1) * &loose;
                upper -= binom(m1 - 2, l - 1) * &tight;
            }
        }
        Ok((lower, upper))
    }

    /// `g_3(n) = f_3(n + 1, n + 1)`: avoiders of length `n` with no initial descent.
    pub fn g3(&self, n: usize) -> Result<&BigInt> {
        ensure!(
            self.k == 3,
            Parameter,
            "g_3 needs the k = 3 triangle, got k = {}",
            self.k
        );
        ensure!(n >= 1, Parameter, "g_3 is indexed from 1");
        self.entry(n + 1, n + 1)
    }

    /// Checks `f_3(n-1, n) = g_3(n-1) + g_3(n-2)` and
    /// `f_3(n-2, n) = g_3(n-1) + 2 g_3(n-2)` at a given `n >= 4`.
    pub fn g3_identities_hold(&self, n: usize) -> Result<bool> {
        ensure!(n >= 4, Parameter, "identity check needs n >= 4");
        let a = self.g3(n - 1)?;
        let b = self.g3(n - 2)?;
        let first = self.entry(n - 1, n)? == &(a + b);
        let second = self.entry(n - 2, n)? == &(a + b * 2u32);
        Ok(first && second && self.entry(n, n)? == a)
    }

    /// Overwrites one cell. Only meant for fault-injection tests of the
    /// verification suite.
    #[doc(hidden)]
    pub fn corrupt_cell(&mut self, m: usize, n: usize) -> Result<()> {
        self.entry(m, n)?;
        self.cells[offset(n) + m - 1] += 1u32;
        Ok(())
    }

    /// CSV with header `k,n,m,value`, one line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n,m,value\n");
        for n in 1..=self.max_n {
            for (i, v) in self.cells[offset(n)..offset(n) + n].iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", self.k, n, i + 1, v);
            }
        }
        out
    }

    /// JSON array mirroring the CSV schema, values as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Cell {
            k: usize,
            n: usize,
            m: usize,
            value: String,
        }
        let mut cells = Vec::with_capacity(self.cells.len());
        for n in 1..=self.max_n {
            for (i, v) in self.cells[offset(n)..offset(n) + n].iter().enumerate() {
                cells.push(Cell {
                    k: self.k,
                    n,
                    m: i + 1,
                    value: v.to_string(),
                });
            }
        }
        serde_json::to_value(cells).expect("plain data serializes")
    }

    /// Returns the first `(n, m)` where the `k`-th difference of row `n + k`
    /// differs from row `n`, scanning all `n <= max_n - k`.
    pub fn first_recurrence_violation(&self) -> Option<(usize, usize)> {
        for n in 1..=self.max_n.saturating_sub(self.k) {
            let upper = self.row(n + self.k).ok()?;
            let lower = self.row(n).ok()?;
            let diff = kth_difference(upper, self.k);
            if let Some(i) = diff.iter().zip(lower).position(|(a, b)| a != b) {
                return Some((n, i + 1));
            }
        }
        None
    }

    /// True if every row is weakly decreasing and nonnegative.
    pub fn rows_monotone(&self) -> bool {
        (1..=self.max_n).all(|n| {
            let row = &self.cells[offset(n)..offset(n) + n];
            row.windows(2).all(|w| w[0] >= w[1]) && row.iter().all(|v| !v.is_negative())
        })
    }
}

impl From<CountTriangle> for Vec<Vec<BigInt>> {
    fn from(t: CountTriangle) -> Self {
        (1..=t.max_n)
            .map(|n| t.cells[offset(n)..offset(n) + n].to_vec())
            .collect()
    }
}

/// Builds the triangle and reports a parameter error for bad `k` or `N`.
pub fn build_triangle(k: usize, max_n: usize) -> Result<CountTriangle> {
    CountTriangle::build(k, max_n)
}

impl std::str::FromStr for CountTriangle {
    type Err = Error;

    /// Parses `k,n,m,value` CSV as written by [`CountTriangle::to_csv`].
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        ensure!(
            lines.next().map(str::trim) == Some("k,n,m,value"),
            Parameter,
            "missing CSV header"
        );
        let mut k = None;
        let mut cells = Vec::new();
        let mut max_n = 0;
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            ensure!(
                parts.len() == 4,
                Parameter,
                "line {}: expected 4 fields",
                lineno + 2
            );
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parameter(format!("line {}: {e}", lineno + 2)))
            };
            let (kk, n, m) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            let v: BigInt = parts[3]
                .trim()
                .parse()
                .map_err(|e| Error::Parameter(format!("line {}: {e}", lineno + 2)))?;
            if *k.get_or_insert(kk) != kk {
                return Err(Error::Parameter("mixed k values".into()));
            }
            ensure!(
                n >= 1 && m >= 1 && m <= n && cells.len() == offset(n) + m - 1,
                Parameter,
                "line {}: cells must be listed row by row",
                lineno + 2
            );
            cells.push(v);
            max_n = n;
        }
        ensure!(
            cells.len() == offset(max_n + 1),
            Parameter,
            "incomplete last row"
        );
        let k = k.ok_or_else(|| Error::Parameter("empty triangle".into()))?;
        let mut sums = vec![BigInt::one()];
        for n in 1..=max_n {
            sums.push(cells[offset(n)..offset(n) + n].iter().sum());
        }
        Ok(CountTriangle {
            k,
            max_n,
            cells,
            sums,
        })
    }
}
