//! Deterministic coloring families for color coding.
//!
//! A family of colorings `λ: {0..n} → {0..c}` is *k-perfect* when for every
//! k distinct elements and every choice of k target colors some member
//! realizes all k targets at once. Colors are stored zero-based.
//!
//! [`coloring_family`] builds a k-perfect family in two stages: the
//! multiplicative hash `x ↦ ((a·(x+1)) mod p) mod k²` for the least prime
//! `p > n` and every `a ∈ 1..p`, followed by every assignment of colors to
//! the `k²` buckets. For any k-set the pairs colliding under a given `a`
//! number fewer than `p-1` in total over all `a`, so some `a` separates the
//! set and the second stage then supplies every target tuple. When `c^n`
//! is no larger than that family, all `c^n` colorings are used instead.
//!
//! Families are enumerated on demand; each member is handed out as an
//! explicit table of `n` colors.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// All `c^n` colorings, in odometer order (element 0 varies fastest).
    Exhaustive,
    /// Hash into `buckets` buckets, then color the buckets every possible way.
    Hashed { prime: usize, buckets: usize },
    /// An explicit list of tables.
    Explicit(Vec<Vec<u8>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringFamily {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub construction: Construction,
}

/// A `(elements, colors)` pair that no member of a family realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectnessViolation {
    pub elements: Vec<usize>,
    pub colors: Vec<u8>,
}

fn least_prime_above(n: usize) -> usize {
    let is_prime = |m: usize| m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| m % d != 0);
    (n + 1..).find(|&m| is_prime(m)).expect("primes are unbounded")
}

fn checked_power(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(u32::try_from(exp).ok()?)
}

/// A k-perfect family of colorings of `n` elements with `c` colors.
pub fn coloring_family(n: usize, k: usize, c: usize) -> Result<ColoringFamily> {
    if n == 0 || k == 0 || c == 0 {
        return Err(Error::InvalidArgument(format!(
            "coloring family needs n, k, c >= 1 (got n={n}, k={k}, c={c})"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot separate {k} elements out of {n}"
        )));
    }
    if c > u8::MAX as usize + 1 {
        return Err(Error::InvalidArgument(format!("{c} colors do not fit a byte")));
    }
    let prime = least_prime_above(n);
    let buckets = k * k;
    let hashed = checked_power(c, buckets).and_then(|s| s.checked_mul(prime as u128 - 1));
    let exhaustive = checked_power(c, n);
    let construction = match (exhaustive, hashed) {
        (Some(all), Some(h)) if all > h => Construction::Hashed { prime, buckets },
        (None, _) => Construction::Hashed { prime, buckets },
        _ => Construction::Exhaustive,
    };
    Ok(ColoringFamily { n, k, c, construction })
}

/// A family in which every `t`-subset of `0..n` is colored injectively by
/// some member (a perfect hash family).
///
/// Greedy over the linear hashes `x ↦ ((a·(x+1) + b) mod p) mod c`, keeping a
/// hash whenever it separates a subset not yet separated; any subset still
/// left over gets a dedicated coloring that numbers its elements.
pub fn perfect_hash_family(n: usize, t: usize, c: usize) -> Result<ColoringFamily> {
    if n == 0 || t == 0 || t > n || t > c || c > u8::MAX as usize + 1 {
        return Err(Error::InvalidArgument(format!(
            "perfect hash family needs 1 <= t <= min(n, c), c <= 256 (got n={n}, t={t}, c={c})"
        )));
    }
    let subsets = k_subsets(n, t);
    let mut covered = vec![false; subsets.len()];
    let mut left = subsets.len();
    let mut tables = Vec::new();
    let injective_on = |table: &[u8], s: &[usize]| {
        let mut hits = [false; 256];
        s.iter().all(|&x| !std::mem::replace(&mut hits[table[x] as usize], true))
    };
    let prime = least_prime_above(n.max(c));
    'hashes: for a in 1..prime {
        for b in 0..prime {
            if left == 0 {
                break 'hashes;
            }
            let table: Vec<u8> = (0..n).map(|x| (((a * (x + 1) + b) % prime) % c) as u8).collect();
            let mut useful = false;
            for (i, s) in subsets.iter().enumerate() {
                if !covered[i] && injective_on(&table, s) {
                    covered[i] = true;
                    left -= 1;
                    useful = true;
                }
            }
            if useful {
                tables.push(table);
            }
        }
    }
    for i in 0..subsets.len() {
        if covered[i] {
            continue;
        }
        let mut table = vec![0u8; n];
        for (rank, &x) in subsets[i].iter().enumerate() {
            table[x] = rank as u8;
        }
        for (j, s) in subsets.iter().enumerate().skip(i) {
            if !covered[j] && injective_on(&table, s) {
                covered[j] = true;
            }
        }
        tables.push(table);
    }
    Ok(ColoringFamily {
        n,
        k: t,
        c,
        construction: Construction::Explicit(tables),
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

impl ColoringFamily {
    /// Number of members, or `None` if it does not fit in a `u128`.
    pub fn len(&self) -> Option<u128> {
        match &self.construction {
            Construction::Exhaustive => checked_power(self.c, self.n),
            Construction::Hashed { prime, buckets } => {
                checked_power(self.c, *buckets)?.checked_mul(*prime as u128 - 1)
            }
            Construction::Explicit(tables) => Some(tables.len() as u128),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Feeds every member, in family order, to `visit` until it breaks.
    pub fn for_each<T>(&self, mut visit: impl FnMut(&[u8]) -> ControlFlow<T>) -> Option<T> {
        let c = self.c as u8;
        match &self.construction {
            Construction::Exhaustive => {
                let mut table = vec![0u8; self.n];
                loop {
                    if let ControlFlow::Break(t) = visit(&table) {
                        return Some(t);
                    }
                    if !odometer_step(&mut table, c) {
                        return None;
                    }
                }
            }
            Construction::Hashed { prime, buckets } => {
                let mut table = vec![0u8; self.n];
                for a in 1..*prime {
                    let bucket: Vec<usize> =
                        (0..self.n).map(|x| (a * (x + 1) % prime) % buckets).collect();
                    let mut assignment = vec![0u8; *buckets];
                    loop {
                        for (slot, &b) in table.iter_mut().zip(&bucket) {
                            *slot = assignment[b];
                        }
                        if let ControlFlow::Break(t) = visit(&table) {
                            return Some(t);
                        }
                        if !odometer_step(&mut assignment, c) {
                            break;
                        }
                    }
                }
                None
            }
            Construction::Explicit(tables) => tables.iter().find_map(|t| visit(t).break_value()),
        }
    }

    /// Materializes every member. Only sensible for small families.
    pub fn tables(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        self.for_each::<()>(|t| {
            out.push(t.to_vec());
            ControlFlow::Continue(())
        });
        out
    }
}

/// Advances a base-`c` counter with digit 0 least significant. Returns
/// false after wrapping around to all zeros.
fn odometer_step(digits: &mut [u8], c: u8) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < c {
            return true;
        }
        *d = 0;
    }
    false
}

/// Exhaustive check that `family` is `family.k`-perfect.
pub fn is_k_perfect(family: &ColoringFamily) -> Result<(), PerfectnessViolation> {
    check_perfect(family, family.k)
}

/// Exhaustive check that `family` is `k`-perfect for the given `k`. On
/// failure reports the least element tuple, and for it the least target
/// tuple, that no member realizes.
pub fn check_perfect(family: &ColoringFamily, k: usize) -> Result<(), PerfectnessViolation> {
    let (n, c) = (family.n, family.c);
    assert!(k >= 1 && k <= n, "perfectness is checked for 1 <= k <= n");
    let targets = c.checked_pow(k as u32).expect("target space fits in usize");
    let subsets = k_subsets(n, k);
    let mut covered = vec![false; subsets.len() * targets];
    let mut left = covered.len();
    family.for_each(|table| {
        for (i, s) in subsets.iter().enumerate() {
            let idx = s.iter().fold(0, |acc, &x| acc * c + table[x] as usize);
            let slot = &mut covered[i * targets + idx];
            if !*slot {
                *slot = true;
                left -= 1;
            }
        }
        if left == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    match covered.iter().position(|&hit| !hit) {
        None => Ok(()),
        Some(slot) => {
            let (i, mut idx) = (slot / targets, slot % targets);
            let mut colors = vec![0u8; k];
            for col in colors.iter_mut().rev() {
                *col = (idx % c) as u8;
                idx /= c;
            }
            Err(PerfectnessViolation {
                elements: subsets[i].clone(),
                colors,
            })
        }
    }
}

/// Exhaustive check that every `t`-subset is colored injectively by some
/// member; reports the least subset that is not.
pub fn check_perfect_hash(family: &ColoringFamily, t: usize) -> Result<(), Vec<usize>> {
    let subsets = k_subsets(family.n, t);
    let mut covered = vec![false; subsets.len()];
    family.for_each::<()>(|table| {
        for (i, s) in subsets.iter().enumerate() {
            if !covered[i] {
                let mut cols: Vec<u8> = s.iter().map(|&x| table[x]).collect();
                cols.sort_unstable();
                cols.dedup();
                covered[i] = cols.len() == s.len();
            }
        }
        ControlFlow::Continue(())
    });
    match covered.iter().position(|&hit| !hit) {
        None => Ok(()),
        Some(i) => Err(subsets[i].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_is_one_perfect_for_one_color() {
        let f = coloring_family(4, 1, 1).unwrap();
        assert_eq!(f.tables(), vec![vec![0u8; 4]]);
        assert_eq!(is_k_perfect(&f), Ok(()));
    }

    #[test]
    fn all_colorings_are_perfect() {
        let f = ColoringFamily { n: 4, k: 3, c: 2, construction: Construction::Exhaustive };
        assert_eq!(f.len(), Some(16));
        assert_eq!(is_k_perfect(&f), Ok(()));
    }

    #[test]
    fn constant_family_misses_second_color() {
        let f = ColoringFamily {
            n: 3,
            k: 1,
            c: 2,
            construction: Construction::Explicit(vec![vec![0; 3]]),
        };
        assert_eq!(
            is_k_perfect(&f),
            Err(PerfectnessViolation { elements: vec![0], colors: vec![1] })
        );
    }

    #[test]
    fn small_generated_families_are_perfect() {
        for (n, k, c) in [(6, 2, 2), (10, 3, 3), (8, 2, 3)] {
            let f = coloring_family(n, k, c).unwrap();
            assert_eq!(is_k_perfect(&f), Ok(()), "(n={n}, k={k}, c={c})");
        }
    }

    #[test]
    fn hashed_construction_is_chosen_when_smaller() {
        let f = coloring_family(12, 2, 3).unwrap();
        assert_eq!(f.construction, Construction::Hashed { prime: 13, buckets: 4 });
        assert_eq!(f.len(), Some(12 * 81));
        assert_eq!(coloring_family(5, 3, 2).unwrap().construction, Construction::Exhaustive);
    }

    #[test]
    fn perfect_for_smaller_supports() {
        let f = coloring_family(7, 3, 2).unwrap();
        for k in 1..=3 {
            assert_eq!(check_perfect(&f, k), Ok(()));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(coloring_family(3, 4, 2).is_err());
        assert!(coloring_family(0, 1, 1).is_err());
        assert!(perfect_hash_family(5, 3, 2).is_err());
    }

    #[test]
    fn perfect_hash_families_separate_every_subset() {
        for n in 1..=10 {
            for t in 1..=n.min(8) {
                for c in t..=8 {
                    let f = perfect_hash_family(n, t, c).unwrap();
                    assert_eq!(check_perfect_hash(&f, t), Ok(()), "(n={n}, t={t}, c={c})");
                }
            }
        }
    }
}
