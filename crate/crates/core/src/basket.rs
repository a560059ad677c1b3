//! Reid baskets: virtual orbifold point data (r, b), the index multiset
//! R_X with its Gorenstein index, and enumeration of index multisets under
//! the Euler-characteristic budget.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::integer::{gcd, lcm};
use serde::{Serialize, Serializer};

use crate::arith::{r_minus_inv, Rational};
use crate::error::{Error, Result};

/// One virtual orbifold point of type 1/r(1,-1,b) with 0 < b <= r/2 and
/// gcd(b, r) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasketEntry {
    r: u64,
    b: u64,
}

impl BasketEntry {
    pub fn new(r: u64, b: u64) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidBasketEntry {
                r,
                b,
                reason: "local index r must be at least 2",
            });
        }
        if b == 0 || 2 * b > r {
            return Err(Error::InvalidBasketEntry {
                r,
                b,
                reason: "weight must satisfy 0 < b <= r/2",
            });
        }
        if gcd(b, r) != 1 {
            return Err(Error::InvalidBasketEntry {
                r,
                b,
                reason: "weight must be coprime to the local index",
            });
        }
        Ok(BasketEntry { r, b })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn b(&self) -> u64 {
        self.b
    }
}

impl fmt::Display for BasketEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.r, self.b)
    }
}

/// Multiset of local indices r_i, canonically sorted ascending.
///
/// The empty multiset is the Gorenstein case.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexMultiset {
    values: Vec<u64>,
}

impl IndexMultiset {
    pub fn new(mut values: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| v < 2) {
            return Err(Error::InvalidIndexValue(bad));
        }
        values.sort_unstable();
        Ok(IndexMultiset { values })
    }

    pub fn empty() -> Self {
        IndexMultiset::default()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// lcm of the local indices; 1 for the empty (Gorenstein) multiset.
    pub fn gorenstein_index(&self) -> u64 {
        self.values.iter().fold(1, |acc, &r| lcm(acc, r))
    }

    /// Exact sum of r - 1/r over the multiset.
    pub fn sum_r_minus_inv(&self) -> Rational {
        self.values.iter().map(|&r| r_minus_inv(r)).sum()
    }

    /// c_2 c_1 derived from the Euler-characteristic identity: 24 minus the
    /// basket sum. Signals a non-Fano budget when the sum reaches 24.
    pub fn c2c1(&self) -> Result<Rational> {
        let sum = self.sum_r_minus_inv();
        let total = Rational::integer(24);
        if sum >= total {
            return Err(Error::NonFanoBudget { sum });
        }
        Ok(total - sum)
    }
}

impl Ord for IndexMultiset {
    /// Canonical order: cardinality first, then lexicographic on the sorted
    /// values. This matches the table row order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.values
            .len()
            .cmp(&other.values.len())
            .then_with(|| self.values.cmp(&other.values))
    }
}

impl PartialOrd for IndexMultiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IndexMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Reid basket: a multiset of entries, stored canonically sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Basket {
    entries: Vec<BasketEntry>,
}

impl Basket {
    pub fn new(mut entries: Vec<BasketEntry>) -> Self {
        entries.sort_unstable();
        Basket { entries }
    }

    pub fn empty() -> Self {
        Basket::default()
    }

    pub fn entries(&self) -> &[BasketEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_multiset(&self) -> IndexMultiset {
        IndexMultiset::new(self.entries.iter().map(|e| e.r()).collect())
            .expect("entries carry validated indices")
    }
}

impl fmt::Display for Basket {
    /// Compact form `r:b,r:b,...`; the empty basket prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for Basket {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Basket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "-" || t.is_empty() {
            return Ok(Basket::empty());
        }
        let mut entries = Vec::new();
        for piece in t.split(',') {
            let (r, b) = piece.split_once(':').ok_or(Error::Parse {
                input: piece.to_string(),
                what: "basket entry r:b",
            })?;
            let r: u64 = r.trim().parse().map_err(|_| Error::Parse {
                input: piece.to_string(),
                what: "basket entry r:b",
            })?;
            let b: u64 = b.trim().parse().map_err(|_| Error::Parse {
                input: piece.to_string(),
                what: "basket entry r:b",
            })?;
            entries.push(BasketEntry::new(r, b)?);
        }
        Ok(Basket::new(entries))
    }
}

/// Admissible weights for a local index: 0 < b <= r/2 coprime to r.
pub fn admissible_b_values(r: u64) -> Vec<u64> {
    (1..=r / 2).filter(|&b| gcd(b, r) == 1).collect()
}

/// All baskets over a given index multiset: the product over each r of its
/// admissible weights, deduplicated as multisets.
pub fn baskets_for_r(r: &IndexMultiset) -> Vec<Basket> {
    let mut acc: Vec<Vec<BasketEntry>> = vec![Vec::new()];
    for &idx in r.values() {
        let choices: Vec<BasketEntry> = admissible_b_values(idx)
            .into_iter()
            .map(|b| BasketEntry::new(idx, b).expect("admissible by construction"))
            .collect();
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for partial in &acc {
            for &entry in &choices {
                let mut ext = partial.clone();
                ext.push(entry);
                next.push(ext);
            }
        }
        acc = next;
    }
    let mut baskets: Vec<Basket> = acc.into_iter().map(Basket::new).collect();
    baskets.sort_unstable();
    baskets.dedup();
    baskets
}

/// All nonempty index multisets whose basket sum stays strictly below
/// `budget`, in canonical (cardinality, lexicographic) order.
///
/// The empty multiset is excluded by convention: the Gorenstein case is
/// treated by its own branch of the analysis.
pub fn enumerate_r_multisets(budget: Rational) -> Vec<IndexMultiset> {
    let mut out = Vec::new();
    let mut current: Vec<u64> = Vec::new();
    fn walk(
        start: u64,
        sum: Rational,
        budget: Rational,
        current: &mut Vec<u64>,
        out: &mut Vec<IndexMultiset>,
    ) {
        let mut r = start;
        loop {
            let next = sum + r_minus_inv(r);
            if next >= budget {
                // r - 1/r is increasing in r, so no larger index fits either.
                break;
            }
            current.push(r);
            out.push(IndexMultiset::new(current.clone()).expect("indices >= 2"));
            walk(r, next, budget, current, out);
            current.pop();
            r += 1;
        }
    }
    walk(2, Rational::zero(), budget, &mut current, &mut out);
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ms(values: &[u64]) -> IndexMultiset {
        IndexMultiset::new(values.to_vec()).unwrap()
    }

    #[test]
    fn entry_validation() {
        assert!(BasketEntry::new(2, 1).is_ok());
        assert!(BasketEntry::new(5, 2).is_ok());
        assert!(BasketEntry::new(4, 2).is_err()); // gcd(2,4) = 2
        assert!(BasketEntry::new(3, 2).is_err()); // 2b > r
        assert!(BasketEntry::new(2, 0).is_err());
        assert!(BasketEntry::new(1, 1).is_err());
    }

    #[test]
    fn gorenstein_index_examples() {
        assert_eq!(IndexMultiset::empty().gorenstein_index(), 1);
        assert_eq!(ms(&[2, 3]).gorenstein_index(), 6);
        assert_eq!(ms(&[2, 4]).gorenstein_index(), 4);
    }

    #[test]
    fn basket_sum_examples() {
        assert_eq!(IndexMultiset::empty().sum_r_minus_inv(), Rational::zero());
        assert_eq!(ms(&[2]).sum_r_minus_inv(), rat(3, 2));
        assert_eq!(ms(&[2, 2, 3]).sum_r_minus_inv(), rat(17, 3));
    }

    #[test]
    fn c2c1_examples() {
        assert_eq!(IndexMultiset::empty().c2c1().unwrap(), Rational::integer(24));
        assert_eq!(ms(&[2]).c2c1().unwrap(), rat(45, 2));
        assert_eq!(ms(&[2, 3]).c2c1().unwrap(), rat(119, 6));
        // Sixteen half-points exhaust the budget exactly.
        let heavy = ms(&[2; 16]);
        assert_eq!(
            heavy.c2c1(),
            Err(Error::NonFanoBudget { sum: rat(24, 1) })
        );
    }

    #[test]
    fn multiset_enumeration_matches_case_list() {
        let got = enumerate_r_multisets(Rational::integer(6));
        let want: Vec<IndexMultiset> = [
            vec![2],
            vec![3],
            vec![4],
            vec![5],
            vec![6],
            vec![2, 2],
            vec![2, 3],
            vec![2, 4],
            vec![3, 3],
            vec![2, 2, 2],
            vec![2, 2, 3],
        ]
        .into_iter()
        .map(|v| IndexMultiset::new(v).unwrap())
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn multiset_enumeration_edges() {
        assert!(enumerate_r_multisets(rat(3, 2)).is_empty());
        assert_eq!(enumerate_r_multisets(Rational::integer(2)), vec![ms(&[2])]);
    }

    #[test]
    fn baskets_for_r_examples() {
        let b5 = baskets_for_r(&ms(&[5]));
        assert_eq!(b5.len(), 2);
        assert_eq!(b5[0].to_string(), "5:1");
        assert_eq!(b5[1].to_string(), "5:2");

        let b2 = baskets_for_r(&ms(&[2]));
        assert_eq!(b2.len(), 1);
        assert_eq!(b2[0].to_string(), "2:1");

        let b23 = baskets_for_r(&ms(&[2, 3]));
        assert_eq!(b23.len(), 1);
        assert_eq!(b23[0].to_string(), "2:1,3:1");

        // Two identical indices produce multiset-distinct baskets only.
        let b55 = baskets_for_r(&ms(&[5, 5]));
        let strings: Vec<String> = b55.iter().map(|b| b.to_string()).collect();
        assert_eq!(strings, vec!["5:1,5:1", "5:1,5:2", "5:2,5:2"]);
    }

    #[test]
    fn basket_string_roundtrip() {
        for s in ["-", "2:1", "2:1,5:2"] {
            let b: Basket = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
        assert!("2:2".parse::<Basket>().is_err());
        assert!("2".parse::<Basket>().is_err());
    }

    #[test]
    fn canonical_order_is_cardinality_then_lex() {
        let mut v = vec![ms(&[2, 2]), ms(&[6]), ms(&[2, 2, 3]), ms(&[3, 3])];
        v.sort();
        assert_eq!(v, vec![ms(&[6]), ms(&[2, 2]), ms(&[3, 3]), ms(&[2, 2, 3])]);
    }
}
