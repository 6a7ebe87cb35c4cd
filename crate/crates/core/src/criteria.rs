//! Tests that rule out non-trivial involutions from point counts and the
//! shape of the Jacobian splitting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::SquarefreeLevel;
use crate::error::{Error, Result};
use crate::frobenius::{degree_n_places, FrobeniusData};
use crate::genus::{delta_2n, genus_x0_star};
use crate::nfdata::NewformOrbit;

pub const DEFAULT_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
pub const DEFAULT_MAX_EXPONENT: usize = 6;
pub const DEFAULT_K_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    ParityPlaces,
    BigFactor,
    FreeInvolutionParity,
    Dominance,
    Restrict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `sum_{odd m <= 2k+1} m P_p(m)` against `2g + 2`.
    PartialSum { p: u64, k: usize, sum: u64, bound: u64, parities: Vec<u8> },
    BigFactor { max_dim: usize, genus: u64, window: (u64, u64), fitting: Vec<u64> },
    OddCount { p: u64, k: usize, count: i64 },
    Dominance { p: u64, n: usize, full: i64, candidate: i64 },
    Restrict { prime: u64, g_quotient: u64, genus: u64 },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionVerdict {
    pub level: u64,
    pub criterion: Criterion,
    pub excluded: bool,
    pub witness: Witness,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::InvalidArgument(format!("point count {x} out of range")))
}

fn good_prime(n: &SquarefreeLevel, p: u64) -> Result<()> {
    if n.value() % p == 0 {
        return Err(Error::BadReduction { p, level: n.value() });
    }
    Ok(())
}

/// Parity of the number of places of degree `m` for odd `m <= 2 k_max + 1`.
pub fn odd_place_parities(orbits: &[&NewformOrbit], p: u64, k_max: usize) -> Result<Vec<u8>> {
    let data = FrobeniusData::new(orbits, p, 2 * k_max + 1)?;
    (0..=k_max)
        .map(|j| {
            let m = 2 * j + 1;
            let places = degree_n_places(&data, m)?;
            Ok(u8::from(places.is_odd()))
        })
        .collect()
}

/// An involution on a genus-`g` curve has at most `2g + 2` fixed points, and
/// the places of odd degree it does not fix pair up; too many odd-degree
/// places with odd multiplicity leave no room for it.
pub fn parity_places(n: &SquarefreeLevel, orbits: &[&NewformOrbit], p: u64, k_max: usize) -> Result<ExclusionVerdict> {
    good_prime(n, p)?;
    let g: u64 = orbits.iter().map(|o| o.dim as u64).sum();
    if g <= 2 {
        return Err(Error::Precondition(format!("genus {g} of level {n} is at most 2")));
    }
    let parities = odd_place_parities(orbits, p, k_max)?;
    let bound = 2 * g + 2;
    let mut sum = 0u64;
    for (j, &par) in parities.iter().enumerate() {
        sum += (2 * j as u64 + 1) * u64::from(par);
        if sum > bound {
            return Ok(ExclusionVerdict {
                level: n.value(),
                criterion: Criterion::ParityPlaces,
                excluded: true,
                witness: Witness::PartialSum { p, k: j, sum, bound, parities: parities[..=j].to_vec() },
            });
        }
    }
    Ok(ExclusionVerdict {
        level: n.value(),
        criterion: Criterion::ParityPlaces,
        excluded: false,
        witness: Witness::PartialSum { p, k: k_max, sum, bound, parities },
    })
}

/// Admissible genera of a quotient by an involution: Riemann-Hurwitz gives
/// `g_u <= (g + 1)/2`, and at most 12 fixed points for odd levels gives
/// `g_u >= (g - 5)/2`. Quotients of genus 0 or 1 would make the curve
/// hyperelliptic or bielliptic, which is settled separately for `g > 3`.
pub fn genus_window(g: u64, odd: bool) -> (u64, u64) {
    let lo = if odd { g.saturating_sub(5).div_ceil(2).max(2) } else { 2 };
    (lo, (g + 1) / 2)
}

/// Sums of sub-multisets of `dims`, ascending.
pub fn subset_sums(dims: &[usize]) -> Vec<u64> {
    let total: usize = dims.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in dims {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach.iter().enumerate().filter(|(_, &r)| r).map(|(s, _)| s as u64).collect()
}

/// A quotient Jacobian is a sum of simple factors, so some set of orbit
/// dimensions must add up to a genus in the window. In particular a factor
/// of dimension above `(g + 5)/2` fits neither the quotient nor its complement.
pub fn big_factor(n: &SquarefreeLevel, orbits: &[&NewformOrbit]) -> Result<ExclusionVerdict> {
    if !n.is_odd() {
        return Err(Error::Precondition(format!("big factor test needs an odd level, got {n}")));
    }
    let genus: u64 = orbits.iter().map(|o| o.dim as u64).sum();
    let max_dim = orbits.iter().map(|o| o.dim).max().unwrap_or(0);
    let window = genus_window(genus, true);
    let fitting: Vec<u64> = subset_sums(&orbits.iter().map(|o| o.dim).collect::<Vec<_>>())
        .into_iter()
        .filter(|&s| s >= window.0 && s <= window.1)
        .collect();
    Ok(ExclusionVerdict {
        level: n.value(),
        criterion: Criterion::BigFactor,
        excluded: 2 * max_dim as u64 > genus + 5 || fitting.is_empty(),
        witness: Witness::BigFactor { max_dim, genus, window, fitting },
    })
}

/// When `g*(2N) = 2 g*(N) - 1` the involution is unramified, so point counts
/// of `X0*(2N)` must be even. `orbits` are the orbits of `2N`.
pub fn free_involution_parity(
    n: &SquarefreeLevel,
    orbits: &[&NewformOrbit],
    p: u64,
    k: usize,
) -> Result<ExclusionVerdict> {
    let delta = delta_2n(n)?;
    if delta != -1 {
        return Err(Error::Precondition(format!("delta({n}) = {delta}, expected -1")));
    }
    if p == 2 {
        return Err(Error::BadReduction { p, level: 2 * n.value() });
    }
    good_prime(n, p)?;
    let count = to_i64(&FrobeniusData::new(orbits, p, k)?.count(k))?;
    Ok(ExclusionVerdict {
        level: n.value(),
        criterion: Criterion::FreeInvolutionParity,
        excluded: count % 2 != 0,
        witness: Witness::OddCount { p, k, count },
    })
}

/// `(p, n)` pairs of the default schedule for a level.
pub fn default_schedule(n: &SquarefreeLevel) -> Vec<(u64, usize)> {
    DEFAULT_PRIMES
        .iter()
        .filter(|&&p| n.value() % p != 0)
        .flat_map(|&p| (1..=DEFAULT_MAX_EXPONENT).map(move |e| (p, e)))
        .collect()
}

/// A degree-2 map to `X_u` forces `|X(F_{p^n})| <= 2 |X_u(F_{p^n})|`.
pub fn dominance(
    n: &SquarefreeLevel,
    full: &[&NewformOrbit],
    candidate: &[&NewformOrbit],
    schedule: &[(u64, usize)],
) -> Result<ExclusionVerdict> {
    let mut last = Witness::None;
    for &(p, e) in schedule {
        good_prime(n, p)?;
        let f = to_i64(&FrobeniusData::new(full, p, e)?.count(e))?;
        let c = to_i64(&FrobeniusData::new(candidate, p, e)?.count(e))?;
        last = Witness::Dominance { p, n: e, full: f, candidate: c };
        if f > 2 * c {
            return Ok(ExclusionVerdict {
                level: n.value(),
                criterion: Criterion::Dominance,
                excluded: true,
                witness: last,
            });
        }
    }
    Ok(ExclusionVerdict {
        level: n.value(),
        criterion: Criterion::Dominance,
        excluded: false,
        witness: last,
    })
}

/// Outcome of the restriction argument through the level `N/p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Restriction {
    Inapplicable { reason: String },
    /// Every candidate quotient must contain the `J0*(N/p)` blocks.
    Forced { prime: u64, quotient_level: u64 },
    Excluded(ExclusionVerdict),
}

/// Preconditions on `X0*(N/p)` that the caller has established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientFacts {
    pub aut_trivial: bool,
    pub non_hyperelliptic_mod_p: bool,
}

/// If `Aut X0*(N/p)` is trivial and `X0*(N/p)/F_p` is not hyperelliptic, an
/// involution of `X0*(N)` descends so that its quotient contains `J0*(N/p)`,
/// which needs `g*(N/p) <= (g*(N) + 1)/2`.
pub fn restrict_filter(n: &SquarefreeLevel, p: u64, facts: QuotientFacts) -> Result<Restriction> {
    let Some(m) = n.without(p) else {
        return Err(Error::InvalidArgument(format!("{p} does not divide {n}")));
    };
    if m.value() == 1 {
        return Ok(Restriction::Inapplicable { reason: "N/p = 1".into() });
    }
    let gm = genus_x0_star(&m)?;
    let g = genus_x0_star(n)?;
    if gm <= 2 {
        return Ok(Restriction::Inapplicable { reason: format!("g*({m}) = {gm} <= 2") });
    }
    if !facts.aut_trivial {
        return Ok(Restriction::Inapplicable { reason: format!("Aut X0*({m}) not known trivial") });
    }
    if !facts.non_hyperelliptic_mod_p {
        return Ok(Restriction::Inapplicable {
            reason: format!("X0*({m}) mod {p} not certified non-hyperelliptic"),
        });
    }
    if 2 * gm > g + 1 {
        return Ok(Restriction::Excluded(ExclusionVerdict {
            level: n.value(),
            criterion: Criterion::Restrict,
            excluded: true,
            witness: Witness::Restrict { prime: p, g_quotient: gm, genus: g },
        }));
    }
    Ok(Restriction::Forced { prime: p, quotient_level: m.value() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(n: u64) -> SquarefreeLevel {
        SquarefreeLevel::new(n).unwrap()
    }

    #[test]
    fn restrict_inapplicable_for_small_quotient() {
        let facts = QuotientFacts { aut_trivial: true, non_hyperelliptic_mod_p: true };
        // g*(15) = 0
        let r = restrict_filter(&lvl(645), 43, facts).unwrap();
        assert!(matches!(r, Restriction::Inapplicable { .. }));
        assert!(restrict_filter(&lvl(645), 7, facts).is_err());
    }

    #[test]
    fn window_and_sums() {
        assert_eq!(genus_window(5, true), (2, 3));
        assert_eq!(genus_window(15, true), (5, 8));
        assert_eq!(genus_window(8, false), (2, 4));
        assert_eq!(subset_sums(&[1, 4]), vec![0, 1, 4, 5]);
        assert_eq!(subset_sums(&[2, 2]), vec![0, 2, 4]);
    }

    #[test]
    fn schedule_skips_bad_primes() {
        let s = default_schedule(&lvl(645));
        assert!(s.iter().all(|&(p, _)| p != 3 && p != 5));
        assert_eq!(s.len(), 4 * DEFAULT_MAX_EXPONENT);
    }
}
