//! Counting permutations with a prescribed `k`-descent set.
//!
//! The workhorse is a left-to-right insertion DP whose state is the relative
//! rank of the last entry together with the length of the decreasing run
//! ending there, capped at `k`. Appending an entry of relative rank `r'`
//! after one of rank `r` continues the run iff `r' <= r`. Prefix and suffix
//! sums over the previous ranks make each step `O(n k)` additions.
//!
//! Conditioning on the *first* entry goes through the reverse-complement
//! `rc(w)(i) = n + 1 - w(n + 1 - i)`, which maps the descent set `I` to its
//! `n`-reverse `r_n(I)` and the first entry `m` to a last entry `n + 1 - m`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::triangle::{antidifference_row, kth_difference};

/// A `k` together with a set `I` of prescribed `k`-descent starting positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DescentSpec {
    k: usize,
    set: Vec<usize>,
}

impl DescentSpec {
    /// Accepts the positions in any order; rejects zeros and duplicates.
    pub fn new(k: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        ensure!(k >= 2, Parameter, "k must be at least 2, got {k}");
        let mut set: Vec<usize> = positions.into_iter().collect();
        set.sort_unstable();
        ensure!(
            set.first().is_none_or(|&i| i >= 1),
            Parameter,
            "descent positions are 1-based"
        );
        ensure!(
            set.windows(2).all(|w| w[0] < w[1]),
            Parameter,
            "descent positions must be distinct"
        );
        Ok(DescentSpec { k, set })
    }

    pub fn empty(k: usize) -> Result<Self> {
        Self::new(k, [])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    /// `max(I) + k - 1`, the end of the last prescribed descent; `0` for `I = ∅`.
    pub fn t(&self) -> usize {
        self.set.last().map_or(0, |&i| i + self.k - 1)
    }

    /// True iff some permutation of length `n` can have exactly this set.
    pub fn fits(&self, n: usize) -> bool {
        self.set.last().is_none_or(|&i| i + self.k - 1 <= n)
    }

    /// `r_n(I) = { n + 2 - k - i : i ∈ I }`, defined for `n >= max(I) + k - 1`.
    pub fn reversed(&self, n: usize) -> Result<Self> {
        ensure!(
            self.fits(n),
            Parameter,
            "r_n(I) needs n >= max(I) + k - 1 = {}, got n = {n}",
            self.t()
        );
        Self::new(self.k, self.set.iter().map(|&i| n + 2 - self.k - i))
    }

    /// Bitmask with bit `i - 1` set for each `i ∈ I` (positions up to 64).
    pub fn mask(&self) -> u64 {
        self.set.iter().fold(0, |acc, &i| acc | 1u64 << (i - 1))
    }
}

impl fmt::Display for DescentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} I={{", self.k)?;
        for (j, i) in self.set.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// DP state for one length: `counts[run - 1][rank - 1]` with `run` in
/// `1..=k` (value `k` meaning "at least `k`").
struct RunRankState {
    k: usize,
    len: usize,
    counts: Vec<Vec<BigInt>>,
}

impl RunRankState {
    fn start(k: usize, capacity: usize) -> Self {
        let mut counts = vec![vec![BigInt::zero(); capacity]; k];
        counts[0][0] = BigInt::from(1u32);
        RunRankState { k, len: 1, counts }
    }

    /// Appends one entry, writing the new distribution into `next`.
    fn step_into(&self, next: &mut RunRankState) {
        let k = self.k;
        let i = self.len;
        next.len = i + 1;

        // suffix sums per run length, walking new rank r' from i+1 down to 1
        let mut acc = vec![BigInt::zero(); k];
        for rp in (1..=i + 1).rev() {
            if rp <= i {
                for (a, row) in acc.iter_mut().zip(&self.counts) {
                    *a += &row[rp - 1];
                }
            }
            for run in 2..k {
                next.counts[run - 1][rp - 1].clone_from(&acc[run - 2]);
            }
            let top = &mut next.counts[k - 1][rp - 1];
            top.clone_from(&acc[k - 2]);
            *top += &acc[k - 1];
        }

        // ascents: every previous rank strictly below r'
        let mut below = BigInt::zero();
        for rp in 1..=i + 1 {
            next.counts[0][rp - 1].clone_from(&below);
            if rp <= i {
                for row in &self.counts {
                    below += &row[rp - 1];
                }
            }
        }
    }

    /// Enforces "(run at position p) >= k  iff  p - k + 1 ∈ I".
    fn constrain(&mut self, required: bool) {
        let k = self.k;
        let len = self.len;
        if required {
            for row in &mut self.counts[..k - 1] {
                row[..len].iter_mut().for_each(|v| v.set_zero());
            }
        } else {
            self.counts[k - 1][..len]
                .iter_mut()
                .for_each(|v| v.set_zero());
        }
    }

    fn by_last_rank(&self) -> Vec<BigInt> {
        (0..self.len)
            .map(|r| self.counts.iter().map(|row| &row[r]).sum())
            .collect()
    }
}

/// `d_k(I, w(n) = v, n)` for `v = 1..=n` (index `v - 1`).
pub fn last_value_distribution(spec: &DescentSpec, n: usize) -> Vec<BigInt> {
    if n == 0 {
        return Vec::new();
    }
    if !spec.fits(n) {
        return vec![BigInt::zero(); n];
    }
    let k = spec.k;
    let mut cur = RunRankState::start(k, n);
    let mut next = RunRankState::start(k, n);
    let mut idx = 0;
    let positions = spec.set();
    for p in 2..=n {
        cur.step_into(&mut next);
        std::mem::swap(&mut cur, &mut next);
        if p >= k {
            let start = p + 1 - k;
            while idx < positions.len() && positions[idx] < start {
                idx += 1;
            }
            let required = positions.get(idx) == Some(&start);
            cur.constrain(required);
        }
    }
    cur.by_last_rank()
}

/// `d_k(I, n)`: permutations of `[n]` whose `k`-descent set is exactly `I`.
pub fn count_with_set(spec: &DescentSpec, n: usize) -> BigInt {
    last_value_distribution(spec, n).into_iter().sum()
}

/// `d_k(I, m, n) for m = 1..=n` (index `m - 1`).
pub fn parametrized_row(spec: &DescentSpec, n: usize) -> Vec<BigInt> {
    if !spec.fits(n) {
        return vec![BigInt::zero(); n];
    }
    let reversed = spec.reversed(n).expect("fits(n) checked");
    let mut by_last = last_value_distribution(&reversed, n);
    // first entry m of w  <->  last entry n + 1 - m of rc(w)
    by_last.reverse();
    by_last
}

/// `d_k(I, m, n)`: as [`count_with_set`], additionally requiring `w(1) = m`.
pub fn parametrized_count(spec: &DescentSpec, m: usize, n: usize) -> Result<BigInt> {
    ensure!(
        m >= 1 && m <= n,
        Parameter,
        "need 1 <= m <= n, got m = {m}, n = {n}"
    );
    Ok(parametrized_row(spec, n).swap_remove(m - 1))
}

/// Rows `(d_k(r_n(I), m, n))_{m=1..n}` for `n = 1..=max_n`.
///
/// Row `n` is stored as all zeros when `n < max(I) + k - 1`. Rows from the
/// threshold on are produced either entirely by the DP, or by seeding `k`
/// rows with the DP and then advancing with `k`-fold antidifferences.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralTable {
    spec: DescentSpec,
    rows: Vec<Vec<BigInt>>,
}

impl GeneralTable {
    /// Seeds `k` rows with the DP, then applies the difference recurrence.
    pub fn build(spec: &DescentSpec, max_n: usize) -> Result<Self> {
        ensure!(max_n >= 1, Parameter, "N must be at least 1");
        let k = spec.k;
        let start = spec.t().max(1);
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n);
        for n in 1..=max_n {
            let row = if n < start {
                vec![BigInt::zero(); n]
            } else if n < start + k {
                Self::dp_row(spec, n)
            } else {
                let base = &rows[n - k - 1];
                let anchor: BigInt = rows[n - 2].iter().sum();
                antidifference_row(base, k, &anchor)
            };
            rows.push(row);
        }
        Ok(GeneralTable {
            spec: spec.clone(),
            rows,
        })
    }

    /// Every row straight from the DP; the independent route for cross-checks.
    pub fn build_by_dp(spec: &DescentSpec, max_n: usize) -> Result<Self> {
        ensure!(max_n >= 1, Parameter, "N must be at least 1");
        let rows = (1..=max_n).map(|n| Self::dp_row(spec, n)).collect();
        Ok(GeneralTable {
            spec: spec.clone(),
            rows,
        })
    }

    fn dp_row(spec: &DescentSpec, n: usize) -> Vec<BigInt> {
        let mut by_last = last_value_distribution(spec, n);
        by_last.reverse();
        by_last
    }

    pub fn spec(&self) -> &DescentSpec {
        &self.spec
    }

    pub fn max_n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, n: usize) -> Result<&[BigInt]> {
        ensure!(
            (1..=self.rows.len()).contains(&n),
            Range,
            "row {n} outside 1..={}",
            self.rows.len()
        );
        Ok(&self.rows[n - 1])
    }

    /// `d_k(r_n(I), m, n)`.
    pub fn entry(&self, m: usize, n: usize) -> Result<&BigInt> {
        let row = self.row(n)?;
        ensure!((1..=n).contains(&m), Range, "m = {m} outside 1..={n}");
        Ok(&row[m - 1])
    }

    /// `d_k(I, n)` for rows at or past the threshold.
    pub fn row_sum(&self, n: usize) -> Result<BigInt> {
        Ok(self.row(n)?.iter().sum())
    }

    /// Whether `Δ^k(row n + k) = row n` holds at this particular `n`.
    pub fn recurrence_holds_at(&self, n: usize) -> Result<bool> {
        let k = self.spec.k;
        let upper = self.row(n + k)?;
        let lower = self.row(n)?;
        Ok(kth_difference(upper, k).as_slice() == lower)
    }

    /// First `n >= from` (with `n + k <= max_n`) where the recurrence fails.
    pub fn first_violation_from(&self, from: usize) -> Option<usize> {
        let k = self.spec.k;
        (from.max(1)..=self.max_n().saturating_sub(k))
            .find(|&n| !self.recurrence_holds_at(n).unwrap_or(false))
    }
}

impl TryFrom<(&DescentSpec, usize)> for GeneralTable {
    type Error = Error;

    fn try_from((spec, max_n): (&DescentSpec, usize)) -> Result<Self> {
        GeneralTable::build(spec, max_n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::build_triangle;

    fn spec(k: usize, set: &[usize]) -> DescentSpec {
        DescentSpec::new(k, set.iter().copied()).unwrap()
    }

    /// Direct enumeration over S_n, kept here as a local oracle.
    fn brute(k: usize, set: &[usize], n: usize) -> (u64, Vec<u64>) {
        fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for v in 1..=n {
                if !used[v] {
                    used[v] = true;
                    prefix.push(v);
                    rec(prefix, used, n, out);
                    prefix.pop();
                    used[v] = false;
                }
            }
        }
        let mut all = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n + 1], n, &mut all);
        let mut total = 0;
        let mut by_first = vec![0; n];
        for w in all {
            let d: Vec<usize> = (0..n.saturating_sub(k - 1))
                .filter(|&i| (0..k - 1).all(|j| w[i + j] > w[i + j + 1]))
                .map(|i| i + 1)
                .collect();
            if d == set {
                total += 1;
                by_first[w[0] - 1] += 1;
            }
        }
        (total, by_first)
    }

    #[test]
    fn spec_validation() {
        assert!(DescentSpec::new(1, [1]).is_err());
        assert!(DescentSpec::new(3, [0]).is_err());
        assert!(DescentSpec::new(3, [2, 2]).is_err());
        let s = spec(3, &[4, 1]);
        assert_eq!(s.set(), &[1, 4]);
        assert_eq!(s.t(), 6);
        assert_eq!(DescentSpec::empty(3).unwrap().t(), 0);
        assert_eq!(s.reversed(6).unwrap().set(), &[1, 4]);
        assert_eq!(spec(3, &[1]).reversed(5).unwrap().set(), &[3]);
        assert!(s.reversed(5).is_err());
        assert_eq!(s.to_string(), "k=3 I={1,4}");
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_with_set(&spec(3, &[]), 7), BigInt::from(2017));
        assert_eq!(count_with_set(&spec(3, &[1]), 3), BigInt::from(1));
        assert_eq!(count_with_set(&spec(3, &[1]), 4), BigInt::from(3));
        assert_eq!(count_with_set(&spec(3, &[2]), 4), BigInt::from(3));
        // positions past n - k + 1 cannot occur
        assert_eq!(count_with_set(&spec(3, &[3]), 4), BigInt::zero());
        assert_eq!(count_with_set(&spec(2, &[]), 1), BigInt::from(1));
    }

    #[test]
    fn parametrized_examples() {
        let empty = spec(3, &[]);
        assert_eq!(parametrized_count(&empty, 5, 5).unwrap(), BigInt::from(9));
        let one = spec(3, &[1]);
        assert_eq!(parametrized_count(&one, 3, 3).unwrap(), BigInt::from(1));
        assert_eq!(parametrized_count(&one, 1, 3).unwrap(), BigInt::zero());
        assert_eq!(parametrized_count(&one, 2, 3).unwrap(), BigInt::zero());
        assert_eq!(parametrized_count(&one, 4, 4).unwrap(), BigInt::from(2));
        assert!(parametrized_count(&one, 5, 4).is_err());
    }

    #[test]
    fn agrees_with_local_brute_force() {
        for k in 2..=4 {
            for n in 1usize..=7 {
                let max_start = n.saturating_sub(k - 1);
                for mask in 0u32..(1 << max_start) {
                    let set: Vec<usize> = (0..max_start)
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| b + 1)
                        .collect();
                    let s = spec(k, &set);
                    let (total, by_first) = brute(k, &set, n);
                    assert_eq!(count_with_set(&s, n), BigInt::from(total), "{s} n={n}");
                    let row: Vec<BigInt> = by_first.into_iter().map(BigInt::from).collect();
                    assert_eq!(parametrized_row(&s, n), row, "{s} n={n}");
                }
            }
        }
    }

    #[test]
    fn empty_set_reproduces_triangle() {
        for k in 2..=5 {
            let tri = build_triangle(k, 30).unwrap();
            let s = DescentSpec::empty(k).unwrap();
            for n in 1..=30 {
                assert_eq!(parametrized_row(&s, n).as_slice(), tri.row(n).unwrap());
            }
        }
    }

    #[test]
    fn general_table_recurrence_matches_dp() {
        for set in [&[1usize][..], &[2], &[1, 4], &[3, 5]] {
            let s = spec(3, set);
            let fast = GeneralTable::build(&s, 24).unwrap();
            let slow = GeneralTable::build_by_dp(&s, 24).unwrap();
            assert_eq!(fast, slow, "{s}");
            assert_eq!(fast.first_violation_from(s.t()), None);
            for n in s.t()..=24 {
                assert_eq!(fast.row_sum(n).unwrap(), count_with_set(&s, n));
            }
        }
    }

    #[test]
    fn reversal_preserves_counts() {
        let s = spec(3, &[1, 4]);
        for n in s.t()..=14 {
            assert_eq!(
                count_with_set(&s, n),
                count_with_set(&s.reversed(n).unwrap(), n)
            );
        }
    }
}
