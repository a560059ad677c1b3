//! Anticanonical orbifold Riemann-Roch and enumeration of degrees
//! compatible with integrality of h^0(-K).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::Rational;
use crate::basket::{baskets_for_r, Basket, BasketEntry, IndexMultiset};
use crate::error::{Error, Result};

/// Anticanonical degree carried in the scaled integral form N = r_X c_1^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeScaled {
    n: u64,
    r_x: u64,
}

impl DegreeScaled {
    pub fn new(n: u64, r_x: u64) -> Result<Self> {
        if n == 0 || r_x == 0 {
            return Err(Error::InvalidDegree(format!(
                "both N and r_X must be positive, got N={n}, r_X={r_x}"
            )));
        }
        Ok(DegreeScaled { n, r_x })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r_x(&self) -> u64 {
        self.r_x
    }

    /// The underlying degree c_1^3 = N / r_X.
    pub fn degree(&self) -> Rational {
        Rational::from(self.n) / Rational::from(self.r_x)
    }
}

impl fmt::Display for DegreeScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.n, self.r_x)
    }
}

impl Serialize for DegreeScaled {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Local Riemann-Roch correction b(r-b)/(2r) of one orbifold point.
pub fn local_rr_term(entry: BasketEntry) -> Rational {
    let r = entry.r() as i64;
    let b = entry.b() as i64;
    Rational::new(b * (r - b), 2 * r)
}

/// h^0(-K) by orbifold Riemann-Roch: c_1^3/2 + 3 minus the local
/// corrections. The caller checks membership in the nonnegative integers.
pub fn h0_anticanonical(c1_cubed: Rational, basket: &Basket) -> Rational {
    let base = c1_cubed / Rational::integer(2) + Rational::integer(3);
    let correction: Rational = basket.entries().iter().map(|&e| local_rr_term(e)).sum();
    base - correction
}

/// All scaled degrees N with `lower <= N/r_X < upper` such that some basket
/// over `r` makes h^0(-K) a nonnegative integer. Sorted, duplicate-free.
pub fn candidate_degrees(
    r: &IndexMultiset,
    lower_inclusive: Rational,
    upper_exclusive: Rational,
) -> Vec<DegreeScaled> {
    let r_x = r.gorenstein_index();
    let baskets = baskets_for_r(r);
    let lower_scaled = lower_inclusive * Rational::from(r_x);
    let upper_scaled = upper_exclusive * Rational::from(r_x);
    let mut out = Vec::new();
    let mut n = lower_scaled.ceil().max(1) as u64;
    while Rational::from(n) < upper_scaled {
        let degree = Rational::from(n) / Rational::from(r_x);
        let admissible = baskets.iter().any(|b| {
            let h0 = h0_anticanonical(degree, b);
            h0.is_integer() && !h0.is_negative()
        });
        if admissible {
            out.push(DegreeScaled::new(n, r_x).expect("positive by construction"));
        }
        n += 1;
    }
    out
}
