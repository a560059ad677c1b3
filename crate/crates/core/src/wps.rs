//! Weighted projective 3-space oracle for the named example spaces and the
//! degree-72 equality cases.

use std::fmt;
use std::str::FromStr;

use num::integer::gcd;

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Weights (a_0, ..., a_3) of a weighted projective 3-space, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WpsWeights {
    weights: [u64; 4],
}

impl WpsWeights {
    pub fn new(weights: [u64; 4]) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::MalformedWeights("weights must be positive".into()));
        }
        let mut sorted = weights;
        sorted.sort_unstable();
        Ok(WpsWeights { weights: sorted })
    }

    pub fn weights(&self) -> [u64; 4] {
        self.weights
    }

    /// Well-formed iff every three of the four weights are coprime.
    pub fn well_formed(&self) -> bool {
        let w = &self.weights;
        (0..4).all(|skip| {
            let triple: Vec<u64> = (0..4).filter(|&i| i != skip).map(|i| w[i]).collect();
            triple.iter().fold(0, |acc, &x| gcd(acc, x)) == 1
        })
    }

    fn require_well_formed(&self) -> Result<()> {
        if self.well_formed() {
            Ok(())
        } else {
            Err(Error::MalformedWeights(format!(
                "three of the weights {self} share a common factor"
            )))
        }
    }

    /// Weil-Fano index: the sum of the weights.
    pub fn weil_index(&self) -> Result<u64> {
        self.require_well_formed()?;
        Ok(self.weights.iter().sum())
    }

    /// Anticanonical degree (sum of weights)^3 / (product of weights).
    pub fn degree(&self) -> Result<Rational> {
        self.require_well_formed()?;
        let sum: u64 = self.weights.iter().sum();
        let product: u64 = self.weights.iter().product();
        Ok(Rational::from(sum * sum * sum) / Rational::from(product))
    }
}

impl fmt::Display for WpsWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for WpsWeights {
    type Err = Error;

    /// Parses the form `a0,a1,a2,a3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse {
                input: s.to_string(),
                what: "four comma-separated weights",
            });
        }
        let mut weights = [0u64; 4];
        for (slot, part) in weights.iter_mut().zip(&parts) {
            *slot = part.trim().parse().map_err(|_| Error::Parse {
                input: s.to_string(),
                what: "four comma-separated weights",
            })?;
        }
        WpsWeights::new(weights)
    }
}
