//! Brute-force enumeration of `S_n` for ground truth.
//!
//! Permutations are visited in lexicographic order. After each step only the
//! suffix starting at the pivot has changed, so only the windows touching it
//! are re-examined. Work is split across threads by the first entry.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

pub const DEFAULT_CAP: usize = 11;

/// How counts are aggregated in an [`OracleReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    BySet,
    BySetAndFirst,
    BySetAndFirstAndLast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternQuery {
    pattern: Vec<usize>,
    n: usize,
    grouping: Grouping,
    cap: usize,
}

impl PatternQuery {
    /// Consecutive pattern `pattern` (a permutation of `1..=k` in one-line notation).
    pub fn new(pattern: Vec<usize>, n: usize) -> Result<Self> {
        let k = pattern.len();
        ensure!(k >= 2, Parameter, "pattern must have length at least 2");
        let mut seen = vec![false; k + 1];
        for &v in &pattern {
            ensure!(
                (1..=k).contains(&v) && !seen[v],
                Parameter,
                "pattern {pattern:?} is not a permutation of 1..={k}"
            );
            seen[v] = true;
        }
        ensure!(n >= k, Parameter, "need n >= k, got n = {n}, k = {k}");
        Ok(PatternQuery {
            pattern,
            n,
            grouping: Grouping::BySet,
            cap: DEFAULT_CAP,
        })
    }

    /// The decreasing pattern `k, k-1, ..., 1`.
    pub fn k_descent(k: usize, n: usize) -> Result<Self> {
        Self::new((1..=k).rev().collect(), n)
    }

    pub fn with_grouping(mut self, grouping: Grouping) -> Self {
        self.grouping = grouping;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn pattern(&self) -> &[usize] {
        &self.pattern
    }

    pub fn k(&self) -> usize {
        self.pattern.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grouping(&self) -> Grouping {
        self.grouping
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn is_decreasing(&self) -> bool {
        self.pattern.windows(2).all(|w| w[0] > w[1])
    }
}

/// Positions `i` (1-based) where a `k`-descent starts, read off the decreasing runs.
pub fn descent_set(w: &[usize], k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut run = 0usize;
    for p in 0..w.len() {
        run = if p > 0 && w[p - 1] > w[p] { run + 1 } else { 1 };
        if run >= k {
            out.push(p + 2 - k);
        }
    }
    out
}

/// Starting positions (1-based) of consecutive occurrences of `pattern` in `w`.
pub fn pattern_occurrences(w: &[usize], pattern: &[usize]) -> Vec<usize> {
    let order = value_order(pattern);
    let k = pattern.len();
    (0..=w.len().saturating_sub(k))
        .filter(|&s| w.len() >= k && matches_at(w, s, &order))
        .map(|s| s + 1)
        .collect()
}

// offsets of the pattern sorted by value
fn value_order(pattern: &[usize]) -> Vec<usize> {
    let mut order = vec![0; pattern.len()];
    for (offset, &v) in pattern.iter().enumerate() {
        order[v - 1] = offset;
    }
    order
}

#[inline]
fn matches_at(w: &[usize], s: usize, order: &[usize]) -> bool {
    order.windows(2).all(|o| w[s + o[0]] < w[s + o[1]])
}

enum Matcher {
    Decreasing { k: usize, run: Vec<usize> },
    General { order: Vec<usize> },
}

impl Matcher {
    fn new(query: &PatternQuery) -> Self {
        if query.is_decreasing() {
            Matcher::Decreasing {
                k: query.k(),
                run: vec![0; query.n],
            }
        } else {
            Matcher::General {
                order: value_order(&query.pattern),
            }
        }
    }

    /// Refreshes occurrence bits for every window that meets `w[from..]`.
    #[inline]
    fn refresh(&mut self, w: &[usize], from: usize, mask: &mut u64) {
        let n = w.len();
        match self {
            Matcher::Decreasing { k, run } => {
                let k = *k;
                for p in from..n {
                    run[p] = if p > 0 && w[p - 1] > w[p] {
                        run[p - 1] + 1
                    } else {
                        1
                    };
                }
                let first = (from + 1).saturating_sub(k);
                *mask &= low_bits(first);
                for s in first..=n - k {
                    if run[s + k - 1] >= k {
                        *mask |= 1 << s;
                    }
                }
            }
            Matcher::General { order } => {
                let k = order.len();
                let first = (from + 1).saturating_sub(k);
                *mask &= low_bits(first);
                for s in first..=n - k {
                    if matches_at(w, s, order) {
                        *mask |= 1 << s;
                    }
                }
            }
        }
    }
}

#[inline]
fn low_bits(count: usize) -> u64 {
    if count >= 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

/// Lexicographic successor of `a`; returns the pivot index, or `None` at the end.
fn next_permutation(a: &mut [usize]) -> Option<usize> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let pivot = i - 1;
    let mut j = n - 1;
    while a[j] <= a[pivot] {
        j -= 1;
    }
    a.swap(pivot, j);
    a[i..].reverse();
    Some(pivot)
}

/// Raw counts indexed by `(occurrence mask, first entry, last entry)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    k: usize,
    n: usize,
    counts: Vec<u64>,
}

impl OracleTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, mask: u64, first: usize, last: usize) -> usize {
        (mask as usize * self.n + first - 1) * self.n + last - 1
    }

    fn masks(&self) -> usize {
        1 << (self.n + 1 - self.k)
    }

    fn mask_of(&self, set: &[usize]) -> Option<u64> {
        let top = self.n + 1 - self.k;
        set.iter().try_fold(0u64, |acc, &i| {
            ((1..=top).contains(&i)).then(|| acc | 1 << (i - 1))
        })
    }

    /// Number of `w` with occurrence set `set`, first entry `m1`, last entry `m2`.
    pub fn joint(&self, set: &[usize], m1: usize, m2: usize) -> u64 {
        let n = self.n;
        match self.mask_of(set) {
            Some(mask) if (1..=n).contains(&m1) && (1..=n).contains(&m2) => {
                self.counts[self.index(mask, m1, m2)]
            }
            _ => 0,
        }
    }

    pub fn by_first(&self, set: &[usize], m: usize) -> u64 {
        (1..=self.n).map(|last| self.joint(set, m, last)).sum()
    }

    pub fn by_set(&self, set: &[usize]) -> u64 {
        (1..=self.n).map(|m| self.by_first(set, m)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// All occurrence sets that occur, in mask order.
    pub fn occurring_sets(&self) -> Vec<Vec<usize>> {
        let block = self.n * self.n;
        (0..self.masks())
            .filter(|&mask| {
                self.counts[mask * block..(mask + 1) * block]
                    .iter()
                    .any(|&c| c > 0)
            })
            .map(|mask| {
                (0..64)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| b + 1)
                    .collect()
            })
            .collect()
    }

    pub fn report(&self, grouping: Grouping) -> OracleReport {
        let mut counts = BTreeMap::new();
        for set in self.occurring_sets() {
            match grouping {
                Grouping::BySet => {
                    counts.insert(OracleKey::set(set.clone()), self.by_set(&set));
                }
                Grouping::BySetAndFirst => {
                    for m in 1..=self.n {
                        let c = self.by_first(&set, m);
                        if c > 0 {
                            counts.insert(
                                OracleKey {
                                    set: set.clone(),
                                    first: Some(m),
                                    last: None,
                                },
                                c,
                            );
                        }
                    }
                }
                Grouping::BySetAndFirstAndLast => {
                    for m1 in 1..=self.n {
                        for m2 in 1..=self.n {
                            let c = self.joint(&set, m1, m2);
                            if c > 0 {
                                counts.insert(
                                    OracleKey {
                                        set: set.clone(),
                                        first: Some(m1),
                                        last: Some(m2),
                                    },
                                    c,
                                );
                            }
                        }
                    }
                }
            }
        }
        OracleReport {
            n: self.n,
            grouping,
            counts,
        }
    }
}

/// Enumerates `S_n`, tallying every permutation by its occurrence set and end values.
pub fn enumerate_table(query: &PatternQuery) -> Result<OracleTable> {
    let n = query.n;
    let k = query.k();
    ensure!(
        n <= query.cap,
        CapExceeded,
        "oracle refuses n = {n}: cap is {} ({}! permutations would be enumerated)",
        query.cap,
        n
    );
    ensure!(n - k < 24, CapExceeded, "too many occurrence positions");
    let masks = 1usize << (n + 1 - k);
    let partials: Vec<Vec<u64>> = (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut local = vec![0u64; masks * n];
            let mut w: Vec<usize> = std::iter::once(first)
                .chain((1..=n).filter(|&v| v != first))
                .collect();
            let mut matcher = Matcher::new(query);
            let mut mask = 0u64;
            matcher.refresh(&w, 0, &mut mask);
            loop {
                local[mask as usize * n + w[n - 1] - 1] += 1;
                match next_permutation(&mut w[1..]) {
                    Some(pivot) => matcher.refresh(&w, pivot + 1, &mut mask),
                    None => break,
                }
            }
            local
        })
        .collect();

    let mut counts = vec![0u64; masks * n * n];
    for (f, local) in partials.iter().enumerate() {
        for mask in 0..masks {
            for last in 0..n {
                counts[(mask * n + f) * n + last] = local[mask * n + last];
            }
        }
    }
    Ok(OracleTable { k, n, counts })
}

pub fn enumerate(query: &PatternQuery) -> Result<OracleReport> {
    Ok(enumerate_table(query)?.report(query.grouping))
}

/// `f_k(m1, m2, n)` for all `m1, m2`: `k`-descent-avoiding, `w(1) = m1`, `w(n) = m2`.
pub fn joint_counts(k: usize, n: usize, cap: usize) -> Result<JointTable> {
    ensure!(k >= 2 && n >= 1, Parameter, "need k >= 2 and n >= 1");
    if n < k {
        // nothing can contain a k-descent: (n-2)! permutations per off-diagonal pair
        let free: u64 = (1..=n.saturating_sub(2) as u64).product();
        let counts = (1..=n)
            .flat_map(|m1| (1..=n).map(move |m2| (m1, m2)))
            .map(|(m1, m2)| if n == 1 || m1 != m2 { free } else { 0 })
            .collect();
        return Ok(JointTable { k, n, counts });
    }
    let table = enumerate_table(&PatternQuery::k_descent(k, n)?.with_cap(cap))?;
    let counts = (1..=n)
        .flat_map(|m1| (1..=n).map(move |m2| (m1, m2)))
        .map(|(m1, m2)| table.joint(&[], m1, m2))
        .collect();
    Ok(JointTable { k, n, counts })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    k: usize,
    n: usize,
    counts: Vec<u64>,
}

impl JointTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, m1: usize, m2: usize) -> u64 {
        assert!((1..=self.n).contains(&m1) && (1..=self.n).contains(&m2));
        self.counts[(m1 - 1) * self.n + m2 - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleKey {
    pub set: Vec<usize>,
    pub first: Option<usize>,
    pub last: Option<usize>,
}

impl OracleKey {
    pub fn set(set: Vec<usize>) -> Self {
        OracleKey {
            set,
            first: None,
            last: None,
        }
    }
}

impl fmt::Display for OracleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.set.iter().map(|i| i.to_string()).collect();
        write!(f, "I=[{}]", items.join(","))?;
        match (self.first, self.last) {
            (Some(m1), Some(m2)) => write!(f, ";m1={m1};m2={m2}"),
            (Some(m), None) => write!(f, ";m={m}"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub n: usize,
    pub grouping: Grouping,
    pub counts: BTreeMap<OracleKey, u64>,
}

impl OracleReport {
    pub fn get(&self, key: &OracleKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> BigInt {
        self.counts.values().map(|&c| BigInt::from(c)).sum()
    }

    /// Canonical-key JSON object with counts as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(key, c)| (key.to_string(), serde_json::Value::String(c.to_string())))
            .collect();
        serde_json::json!({
            "n": self.n,
            "grouping": self.grouping,
            "counts": map,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn factorial(n: usize) -> u64 {
        (1..=n as u64).product()
    }

    #[test]
    fn descent_set_example() {
        let w = [6, 3, 8, 5, 4, 1, 9, 7, 2];
        assert_eq!(descent_set(&w, 3), vec![3, 4, 7]);
        assert_eq!(pattern_occurrences(&w, &[3, 2, 1]), vec![3, 4, 7]);
        assert_eq!(descent_set(&w, 2), vec![1, 3, 4, 5, 7, 8]);
    }

    #[test]
    fn successor_visits_everything_once() {
        let mut a = vec![1, 2, 3, 4];
        let mut seen = vec![a.clone()];
        while next_permutation(&mut a).is_some() {
            seen.push(a.clone());
        }
        assert_eq!(seen.len(), 24);
        assert!(seen.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn small_counts() {
        let q = PatternQuery::k_descent(3, 4).unwrap();
        let t = enumerate_table(&q).unwrap();
        assert_eq!(t.by_set(&[]), 17);
        assert_eq!(t.by_set(&[1]), 3);
        assert_eq!(t.by_set(&[2]), 3);
        assert_eq!(t.by_first(&[1], 4), 2);
        let t2 = enumerate_table(&PatternQuery::k_descent(2, 3).unwrap()).unwrap();
        assert_eq!(t2.by_set(&[1, 2]), 1);
        assert_eq!(t2.by_set(&[3]), 0);
    }

    #[test]
    fn totals_are_factorials() {
        for n in 2..=8 {
            for k in 2..=n.min(4) {
                let t = enumerate_table(&PatternQuery::k_descent(k, n).unwrap()).unwrap();
                assert_eq!(t.total(), factorial(n));
            }
        }
        let q = PatternQuery::new(vec![1, 3, 2], 7).unwrap();
        assert_eq!(enumerate(&q).unwrap().total(), BigInt::from(5040));
    }

    #[test]
    fn incremental_matches_direct_scan() {
        for pattern in [vec![3, 2, 1], vec![1, 3, 2], vec![2, 4, 1, 3]] {
            let n = 7;
            let q = PatternQuery::new(pattern.clone(), n).unwrap();
            let t = enumerate_table(&q).unwrap();
            let mut direct: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
            let mut w: Vec<usize> = (1..=n).collect();
            loop {
                *direct.entry(pattern_occurrences(&w, &pattern)).or_default() += 1;
                if next_permutation(&mut w).is_none() {
                    break;
                }
            }
            for (set, c) in direct {
                assert_eq!(t.by_set(&set), c, "{pattern:?} {set:?}");
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        let up = enumerate_table(&PatternQuery::new(vec![1, 2, 3], 7).unwrap()).unwrap();
        let down = enumerate_table(&PatternQuery::k_descent(3, 7).unwrap()).unwrap();
        for set in down.occurring_sets() {
            assert_eq!(up.by_set(&set), down.by_set(&set));
        }
    }

    #[test]
    fn joint_small() {
        let j = joint_counts(3, 2, DEFAULT_CAP).unwrap();
        assert_eq!(j.get(1, 2), 1);
        assert_eq!(j.get(2, 1), 1);
        assert_eq!(j.get(1, 1), 0);
        let j5 = joint_counts(3, 5, DEFAULT_CAP).unwrap();
        let row5: Vec<u64> = (1..=5)
            .map(|m1| (1..=5).map(|m2| j5.get(m1, m2)).sum())
            .collect();
        assert_eq!(row5, vec![17, 17, 15, 12, 9]);
    }

    #[test]
    fn cap_and_pattern_validation() {
        let q = PatternQuery::k_descent(3, 12).unwrap();
        assert!(matches!(enumerate(&q), Err(Error::CapExceeded(_))));
        assert!(PatternQuery::new(vec![1, 1, 2], 5).is_err());
        assert!(PatternQuery::new(vec![1, 2, 3], 2).is_err());
        assert!(enumerate(&PatternQuery::k_descent(3, 7).unwrap().with_cap(6)).is_err());
    }

    #[test]
    fn report_keys_and_json() {
        let q = PatternQuery::k_descent(3, 4)
            .unwrap()
            .with_grouping(Grouping::BySetAndFirst);
        let r = enumerate(&q).unwrap();
        let key = OracleKey {
            set: vec![1],
            first: Some(4),
            last: None,
        };
        assert_eq!(key.to_string(), "I=[1];m=4");
        assert_eq!(r.get(&key), 2);
        assert_eq!(r.total(), BigInt::from(24));
        let json = r.to_json();
        assert_eq!(json["counts"]["I=[];m=1"], "5");
        let joint = OracleKey {
            set: vec![],
            first: Some(1),
            last: Some(2),
        };
        assert_eq!(joint.to_string(), "I=[];m1=1;m2=2");
    }
}
