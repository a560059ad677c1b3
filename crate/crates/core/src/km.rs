//! Kawamata-Miyaoka coefficient arithmetic and a brute-force verifier of
//! the Harder-Narasimhan case analysis behind the 3-fold coefficient.
//!
//! Only slope data enters: a filtration of the tangent sheaf is reduced to
//! its ranks r_i and the integers q_i with c_1(F_i) = q_i A. The deficit
//!
//!   D = sum_{i<j} r_i r_j (q_i/r_i - q_j/r_j)^2
//!
//! bounds c_1^3 / (c2hat c_1) by 6 / (2 - D/q^2), and the verifier checks
//! that the claimed piecewise coefficient dominates every admissible profile.

use std::fmt;

use rayon::prelude::*;

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};

/// Ranks and slope numerators of a Harder-Narasimhan filtration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HNProfile {
    ranks: Vec<u64>,
    slope_numerators: Vec<u64>,
}

impl HNProfile {
    pub fn new(ranks: Vec<u64>, slope_numerators: Vec<u64>) -> Result<Self> {
        if ranks.is_empty() || ranks.len() != slope_numerators.len() {
            return Err(Error::InvalidProfile(
                "ranks and slope numerators must be nonempty lists of equal length".into(),
            ));
        }
        if ranks.len() > 3 {
            return Err(Error::InvalidProfile(
                "at most three graded pieces on a 3-fold".into(),
            ));
        }
        if ranks.contains(&0) || slope_numerators.contains(&0) {
            return Err(Error::InvalidProfile(
                "ranks and slope numerators must be positive".into(),
            ));
        }
        let profile = HNProfile {
            ranks,
            slope_numerators,
        };
        let slopes = profile.slopes();
        if slopes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidProfile(
                "slopes q_i/r_i must be strictly decreasing".into(),
            ));
        }
        Ok(profile)
    }

    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn slope_numerators(&self) -> &[u64] {
        &self.slope_numerators
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total_rank(&self) -> u64 {
        self.ranks.iter().sum()
    }

    /// Sum of the slope numerators; equals the ambient Q-Fano index.
    pub fn total_index(&self) -> u64 {
        self.slope_numerators.iter().sum()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.ranks
            .iter()
            .zip(&self.slope_numerators)
            .map(|(&r, &q)| Rational::from(q) / Rational::from(r))
            .collect()
    }

    /// D = sum_{i<j} r_i r_j (mu_i - mu_j)^2.
    pub fn deficit(&self) -> Rational {
        let slopes = self.slopes();
        let mut total = Rational::zero();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let diff = slopes[i] - slopes[j];
                total += Rational::from(self.ranks[i]) * Rational::from(self.ranks[j]) * diff * diff;
            }
        }
        total
    }
}

impl fmt::Display for HNProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        let qs: Vec<String> = self.slope_numerators.iter().map(|q| q.to_string()).collect();
        write!(f, "r=({}) q=({})", ranks.join(","), qs.join(","))
    }
}

/// The epsilon-lc coefficient 2(1+eps)/eps; canonical singularities are the
/// case eps = 1 with coefficient 4.
pub fn epsilon_coefficient(eps: Rational) -> Result<Rational> {
    if !eps.is_positive() || eps > Rational::integer(1) {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(Rational::integer(2) * (Rational::integer(1) + eps) / eps)
}

/// Piecewise 3-fold coefficient: 16/5 for q <= 5, else 4q^2/(q^2 + 2q - 4).
pub fn threefold_coefficient(q: u64) -> Rational {
    assert!(q >= 1, "threefold_coefficient requires q >= 1");
    if q <= 5 {
        rat(16, 5)
    } else {
        let q = q as i64;
        Rational::new(4 * q * q, q * q + 2 * q - 4)
    }
}

/// All slope profiles compatible with the three-case analysis at index q:
///
/// * ranks (1,2): 3 q_1 > q (slope order) and 2 q_1 <= q (rank-one bound);
/// * ranks (2,1): 3 q_1 > 2q and q_1 <= q - 1;
/// * ranks (1,1,1): q_1 > q_2 > q_3 >= 1 and 2 q_1 <= q.
pub fn admissible_profiles(q: u64) -> Vec<HNProfile> {
    let mut out = Vec::new();
    // Case ranks (1,2): leading rank-one piece.
    for q1 in 1..q {
        let q2 = q - q1;
        if 3 * q1 > q && 2 * q1 <= q && q2 >= 1 {
            out.push(HNProfile::new(vec![1, 2], vec![q1, q2]).expect("admissible by construction"));
        }
    }
    // Case ranks (2,1): leading rank-two piece.
    for q1 in 1..q {
        let q2 = q - q1;
        if 3 * q1 > 2 * q && q1 < q && q2 >= 1 {
            out.push(HNProfile::new(vec![2, 1], vec![q1, q2]).expect("admissible by construction"));
        }
    }
    // Case ranks (1,1,1): fully split filtration.
    for q1 in 1..q {
        if 2 * q1 > q {
            continue;
        }
        for q2 in 1..q1 {
            if q1 + q2 >= q {
                continue;
            }
            let q3 = q - q1 - q2;
            if q3 >= 1 && q2 > q3 {
                out.push(
                    HNProfile::new(vec![1, 1, 1], vec![q1, q2, q3])
                        .expect("admissible by construction"),
                );
            }
        }
    }
    out
}

/// Upper bound for c_1^3/(c2hat c_1) implied by one profile: 6/(2 - D/q^2).
/// Signals when the deficit reaches 2q^2 and no bound follows.
pub fn profile_coefficient(profile: &HNProfile, q: u64) -> Result<Rational> {
    assert!(q >= 1, "profile_coefficient requires q >= 1");
    let deficit = profile.deficit();
    let q_sq = Rational::from(q) * Rational::from(q);
    let denominator = Rational::integer(2) - deficit / q_sq;
    if !denominator.is_positive() {
        return Err(Error::UnboundedProfile { deficit, q });
    }
    Ok(Rational::integer(6) / denominator)
}

/// One row of the coefficient verification scan.
#[derive(Debug, Clone)]
pub struct CoefficientCheck {
    pub q: u64,
    /// Worst (largest) bound over the semistable case and all admissible
    /// profiles.
    pub worst: Rational,
    /// Profile attaining the worst bound; `None` when the semistable value 3
    /// is already maximal.
    pub witness: Option<HNProfile>,
    pub claimed: Rational,
    pub ok: bool,
}

/// Brute-force comparison of the claimed piecewise coefficient against every
/// admissible profile for each q up to `q_max`. A failed comparison is
/// reported in the record, never dropped.
pub fn verify_threefold_coefficient(q_max: u64) -> Vec<CoefficientCheck> {
    (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let mut worst = Rational::integer(3); // semistable tangent sheaf
            let mut witness = None;
            for profile in admissible_profiles(q) {
                let bound = profile_coefficient(&profile, q)
                    .expect("admissible profiles have deficit below 2q^2");
                if bound > worst {
                    worst = bound;
                    witness = Some(profile);
                }
            }
            let claimed = threefold_coefficient(q);
            CoefficientCheck {
                q,
                worst,
                witness,
                claimed,
                ok: worst <= claimed,
            }
        })
        .collect()
}

/// Verifies r^2 (mu_max - mu)(mu - mu_min) >= sum_{i<j} r_i r_j (mu_i - mu_j)^2
/// for a filtration with the given ranks and strictly decreasing slopes.
pub fn hn_slope_inequality_check(ranks: &[u64], slopes: &[Rational]) -> bool {
    assert_eq!(ranks.len(), slopes.len(), "mismatched profile data");
    if ranks.is_empty() {
        return true;
    }
    let r: Rational = ranks.iter().map(|&x| Rational::from(x)).sum();
    let weighted: Rational = ranks
        .iter()
        .zip(slopes)
        .map(|(&ri, &mu)| Rational::from(ri) * mu)
        .sum();
    let mu = weighted / r;
    let mu_max = slopes[0];
    let mu_min = slopes[slopes.len() - 1];
    let lhs = r * r * (mu_max - mu) * (mu - mu_min);
    let mut rhs = Rational::zero();
    for i in 0..ranks.len() {
        for j in (i + 1)..ranks.len() {
            let diff = slopes[i] - slopes[j];
            rhs += Rational::from(ranks[i]) * Rational::from(ranks[j]) * diff * diff;
        }
    }
    lhs >= rhs
}

/// Invariants of the cone over a rational normal curve of degree d,
/// normalized by c_1(O(1))^2 = 1/d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeInvariants {
    pub epsilon: Rational,
    pub c1_sq: Rational,
    pub c2_hat: Rational,
    /// (d+2) - (1 + 2/d) d, the slack of the rank-one slope bound; zero for
    /// every d, so the bound is sharp on this family.
    pub nef_slack: Rational,
}

pub fn cone_surface_invariants(d: u64) -> ConeInvariants {
    assert!(d >= 1, "cone_surface_invariants requires d >= 1");
    let d_rat = Rational::from(d);
    let epsilon = Rational::integer(2) / d_rat;
    let c1_sq = (d_rat + Rational::integer(2)) * (d_rat + Rational::integer(2)) / d_rat;
    let c2_hat = (Rational::integer(2) * d_rat + Rational::integer(1)) / d_rat;
    let nef_slack = d_rat + Rational::integer(2) - (Rational::integer(1) + epsilon) * d_rat;
    ConeInvariants {
        epsilon,
        c1_sq,
        c2_hat,
        nef_slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(ranks: &[u64], qs: &[u64]) -> HNProfile {
        HNProfile::new(ranks.to_vec(), qs.to_vec()).unwrap()
    }

    #[test]
    fn epsilon_coefficient_examples() {
        assert_eq!(epsilon_coefficient(Rational::integer(1)).unwrap(), Rational::integer(4));
        assert_eq!(epsilon_coefficient(rat(1, 2)).unwrap(), Rational::integer(6));
        // The cone family has eps = 2/d; at d = 4 the coefficient is 6 again.
        assert_eq!(epsilon_coefficient(rat(2, 4)).unwrap(), Rational::integer(6));
        assert!(epsilon_coefficient(Rational::zero()).is_err());
        assert!(epsilon_coefficient(Rational::integer(2)).is_err());
        assert!(epsilon_coefficient(rat(-1, 2)).is_err());
    }

    #[test]
    fn threefold_coefficient_examples() {
        assert_eq!(threefold_coefficient(5), rat(16, 5));
        assert_eq!(threefold_coefficient(6), rat(36, 11));
        assert_eq!(threefold_coefficient(7), rat(196, 59));
        assert_eq!(threefold_coefficient(1), rat(16, 5));
    }

    #[test]
    fn profile_validation() {
        assert!(HNProfile::new(vec![1, 2], vec![2, 3]).is_ok());
        // slopes 1 and 1 are not strictly decreasing
        assert!(HNProfile::new(vec![1, 2], vec![1, 2]).is_err());
        assert!(HNProfile::new(vec![1], vec![]).is_err());
        assert!(HNProfile::new(vec![0, 1], vec![1, 1]).is_err());
        assert!(HNProfile::new(vec![1, 1, 1, 1], vec![4, 3, 2, 1]).is_err());
    }

    #[test]
    fn admissible_profiles_at_small_q() {
        let p6 = admissible_profiles(6);
        assert!(p6.contains(&profile(&[1, 1, 1], &[3, 2, 1])));

        let p5 = admissible_profiles(5);
        let rank12: Vec<_> = p5.iter().filter(|p| p.ranks() == [1, 2]).collect();
        assert_eq!(rank12.len(), 1);
        assert_eq!(rank12[0].slope_numerators(), [2, 3]);
        let rank21: Vec<_> = p5.iter().filter(|p| p.ranks() == [2, 1]).collect();
        assert_eq!(rank21.len(), 1);
        assert_eq!(rank21[0].slope_numerators(), [4, 1]);
        assert!(p5.iter().all(|p| p.ranks() != [1, 1, 1]));

        assert!(admissible_profiles(1).is_empty());
    }

    #[test]
    fn profile_coefficient_examples() {
        let split = profile(&[1, 1, 1], &[3, 2, 1]);
        assert_eq!(split.deficit(), Rational::integer(6));
        assert_eq!(profile_coefficient(&split, 6).unwrap(), rat(36, 11));

        let p = profile(&[1, 2], &[3, 3]);
        assert_eq!(profile_coefficient(&p, 6).unwrap(), rat(16, 5));

        let semistable = profile(&[3], &[6]);
        assert_eq!(profile_coefficient(&semistable, 6).unwrap(), Rational::integer(3));

        // Mismatched ambient index: deficit 6 reaches 2q^2 = 2 at q = 1.
        let err = profile_coefficient(&split, 1);
        assert_eq!(
            err,
            Err(Error::UnboundedProfile {
                deficit: Rational::integer(6),
                q: 1
            })
        );
    }

    #[test]
    fn verifier_spot_values() {
        let checks = verify_threefold_coefficient(8);
        let c6 = &checks[5];
        assert_eq!(c6.q, 6);
        assert_eq!(c6.worst, rat(36, 11));
        assert_eq!(c6.claimed, rat(36, 11));
        assert_eq!(c6.witness.as_ref().unwrap(), &profile(&[1, 1, 1], &[3, 2, 1]));
        assert!(c6.ok);

        let c7 = &checks[6];
        assert_eq!(c7.worst, rat(49, 15));
        assert_eq!(c7.claimed, rat(196, 59));
        assert_eq!(c7.witness.as_ref().unwrap(), &profile(&[2, 1], &[6, 1]));
        assert!(c7.ok);

        // Even q >= 6 attains the claimed bound exactly via (q/2, q/2 - 1, 1).
        let c8 = &checks[7];
        assert_eq!(c8.worst, c8.claimed);
        assert_eq!(c8.witness.as_ref().unwrap(), &profile(&[1, 1, 1], &[4, 3, 1]));
    }

    #[test]
    fn slope_inequality_spot_checks() {
        assert!(hn_slope_inequality_check(&[3], &[rat(5, 2)]));
        assert!(hn_slope_inequality_check(
            &[1, 2],
            &[Rational::integer(3), rat(3, 2)]
        ));
    }

    #[test]
    fn cone_invariants() {
        let plane = cone_surface_invariants(1);
        assert_eq!(plane.c1_sq, Rational::integer(9));
        assert_eq!(plane.c2_hat, Rational::integer(3));

        let quadric_cone = cone_surface_invariants(2);
        assert_eq!(quadric_cone.c1_sq, Rational::integer(8));
        assert_eq!(quadric_cone.c2_hat, rat(5, 2));
        assert_eq!(quadric_cone.epsilon, Rational::integer(1));

        let d12 = cone_surface_invariants(12);
        assert_eq!(d12.c1_sq / d12.c2_hat, rat(196, 25));
        assert!(d12.c1_sq / d12.c2_hat > Rational::integer(4));

        for d in 1..=20 {
            assert!(cone_surface_invariants(d).nef_slack.is_zero());
        }
    }
}
