//! Fano-index divisibility criteria, the ADE transversal-singularity data
//! (e_C, g_C, j_C), and the two index-budget filters.

use std::fmt;

use crate::arith::{rat, sigma_j, Rational};
use crate::error::{Error, Result};
use crate::rr::DegreeScaled;

/// Du Val type transverse to a singular curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityClass {
    A(u64),
    D(u64),
    E6,
    E7,
    E8,
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityClass::A(n) => write!(f, "A{n}"),
            SingularityClass::D(m) => write!(f, "D{m}"),
            SingularityClass::E6 => write!(f, "E6"),
            SingularityClass::E7 => write!(f, "E7"),
            SingularityClass::E8 => write!(f, "E8"),
        }
    }
}

/// (e_C, g_C, j_C): exceptional-curve count plus one, local fundamental
/// group order, and local class group order of the transverse Du Val type.
pub fn egj(class: SingularityClass) -> Result<(u64, u64, u64)> {
    match class {
        SingularityClass::A(n) => {
            if n < 1 {
                return Err(Error::InvalidSingularityClass(
                    "type A requires n >= 1".into(),
                ));
            }
            Ok((n + 1, n + 1, n + 1))
        }
        SingularityClass::D(m) => {
            if m < 4 {
                return Err(Error::InvalidSingularityClass(
                    "type D requires m >= 4".into(),
                ));
            }
            Ok((m + 1, 4 * m - 8, 4))
        }
        SingularityClass::E6 => Ok((7, 24, 3)),
        SingularityClass::E7 => Ok((8, 48, 2)),
        SingularityClass::E8 => Ok((9, 120, 1)),
    }
}

/// Exact check of j_C - 1/j_C <= e_C - 1/g_C.
pub fn check_j_bound(class: SingularityClass) -> Result<bool> {
    let (e, g, j) = egj(class)?;
    let lhs = Rational::from(j) - rat(1, j as i64);
    let rhs = Rational::from(e) - rat(1, g as i64);
    Ok(lhs <= rhs)
}

/// Divisibility criterion: J_A r_X^{dim-2} (-K)^dim / q^2 is a positive
/// integer. For 3-folds this is q^2 | J_A N with N = r_X c_1^3.
pub fn integrality_holds(ja: u64, degree: &DegreeScaled, q: u64, dim: u32) -> bool {
    assert!(ja >= 1 && q >= 1 && dim >= 2, "positive inputs required");
    let mut value = Rational::from(ja) * degree.degree()
        / (Rational::from(q) * Rational::from(q));
    for _ in 0..(dim - 2) {
        value = value * Rational::from(degree.r_x());
    }
    value.is_integer() && value.is_positive()
}

/// Linear-equivalence criterion: q divides the scaled degree N.
pub fn weil_divisibility(q: u64, degree: &DegreeScaled) -> bool {
    assert!(q >= 1, "q must be positive");
    degree.n().is_multiple_of(q)
}

/// Budget of the strict index filter: r_X c_2 c_1 - N/4.
pub fn budget_j1(rx_c2c1: u64, n_scaled: u64) -> Rational {
    Rational::from(rx_c2c1) - Rational::from(n_scaled) / Rational::integer(4)
}

/// Budget of the refined index filter for q >= 6:
/// r_X c_2 c_1 - (q^2 + 2q - 4) N / (4 q^2).
pub fn budget_j2(rx_c2c1: u64, n_scaled: u64, q: u64) -> Result<Rational> {
    if q < 6 {
        return Err(Error::BudgetRequiresLargeQ(q));
    }
    let q = q as i64;
    let factor = Rational::new(q * q + 2 * q - 4, 4 * q * q);
    Ok(Rational::from(rx_c2c1) - factor * Rational::from(n_scaled))
}

/// Strict comparison sigma_j(J_A) < budget.
pub fn passes_j1(ja: u64, budget: Rational) -> bool {
    sigma_j(ja) < budget
}

/// Non-strict comparison sigma_j(J_A) <= budget.
pub fn passes_j2(ja: u64, budget: Rational) -> bool {
    sigma_j(ja) <= budget
}
