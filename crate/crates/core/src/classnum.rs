//! Class numbers of imaginary quadratic orders and Atkin-Lehner fixed points.
//!
//! `h(D)` counts reduced primitive positive-definite forms `[a, b, c]` of
//! discriminant `D`. The fixed-point count `nu(M, d)` of `w_d` on `X0(M)` is
//! assembled from class numbers and local factors `1 + (-d/p)` at the primes
//! of `M/d`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{kronecker_at_prime, SquarefreeLevel};
use crate::error::{Error, Result};

/// Discriminant of an imaginary quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value >= 0 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

/// Number of reduced primitive forms: `|b| <= a <= c`, `b >= 0` when
/// `|b| = a` or `a = c`, `gcd(a, b, c) = 1`.
pub fn count_reduced_forms(d: Discriminant) -> u64 {
    let disc = d.value();
    let abs = -disc;
    let mut count = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= abs {
        for b in (-a + 1)..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// Thread-safe memo of class numbers keyed by discriminant.
#[derive(Debug, Default)]
pub struct ClassNumberCache {
    map: RwLock<HashMap<i64, u64>>,
}

impl ClassNumberCache {
    pub fn global() -> &'static ClassNumberCache {
        static CACHE: OnceLock<ClassNumberCache> = OnceLock::new();
        CACHE.get_or_init(ClassNumberCache::default)
    }

    pub fn get(&self, d: Discriminant) -> u64 {
        if let Some(&h) = self.map.read().expect("class number cache poisoned").get(&d.value()) {
            return h;
        }
        let h = count_reduced_forms(d);
        self.map
            .write()
            .expect("class number cache poisoned")
            .insert(d.value(), h);
        h
    }

    /// Entries sorted by discriminant, for persistence.
    pub fn snapshot(&self) -> Vec<(i64, u64)> {
        let mut v: Vec<_> = self
            .map
            .read()
            .expect("class number cache poisoned")
            .iter()
            .map(|(&k, &v)| (k, v))
            .collect();
        v.sort_unstable();
        v
    }

    /// Seeds the cache; entries with an invalid discriminant are ignored.
    pub fn extend(&self, entries: impl IntoIterator<Item = (i64, u64)>) {
        let mut map = self.map.write().expect("class number cache poisoned");
        for (d, h) in entries {
            if Discriminant::new(d).is_ok() {
                map.insert(d, h);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("class number cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("class number cache poisoned").clear();
    }
}

/// `h(D)` through the process-wide cache.
pub fn class_number(d: Discriminant) -> u64 {
    ClassNumberCache::global().get(d)
}

fn h(disc: i64) -> u64 {
    class_number(Discriminant::new(disc).expect("internal discriminant is valid"))
}

/// `nu(d, d)` (untwisted) or `nu(2d, d)` (twisted) for odd square-free `d >= 5`.
pub fn nu_self(d: u64, twisted: bool) -> Result<u64> {
    if d < 5 || d % 2 == 0 {
        return Err(Error::UnsupportedFixedPoint {
            level: if twisted { 2 * d } else { d },
            d,
            reason: "nu_self needs an odd d >= 5",
        });
    }
    let di = d as i64;
    let mut n = h(-4 * di);
    if d % 4 == 3 {
        n += if twisted { 3 } else { 1 } * h(-di);
    }
    Ok(n)
}

/// Fixed points of `w_d` on `X0(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointCount {
    pub level: u64,
    pub d: u64,
    pub count: u64,
}

fn local_product(m: u64, level: &SquarefreeLevel, minus_disc: i64) -> u64 {
    level
        .primes()
        .iter()
        .filter(|&&p| p != 2 && m % p == 0)
        .map(|&p| (1 + kronecker_at_prime(minus_disc, p)) as u64)
        .product()
}

/// `nu(M, d)` for square-free `M`, `d | M`, `d > 1`.
///
/// With `M = 2^s N`, `N` odd:
/// * `d = 2`: `prod (1 + (-1/p)) + prod (1 + (-2/p))` over `p | N`;
/// * `d = 3`: `2 prod_{p | N/3} (1 + (-3/p))`;
/// * odd `d >= 5`: `prod_{p | N/d} (1 + (-d/p)) * nu_self(d, s = 1)`;
/// * `d = 2e`, `e > 1` odd: `prod_{p | N/e} (1 + (-2e/p)) * h(-8e)`.
pub fn nu(m: &SquarefreeLevel, d: u64) -> Result<FixedPointCount> {
    let level = m.value();
    if d <= 1 {
        return Err(Error::UnsupportedFixedPoint {
            level,
            d,
            reason: "d must exceed 1",
        });
    }
    if level % d != 0 {
        return Err(Error::UnsupportedFixedPoint {
            level,
            d,
            reason: "d does not divide the level",
        });
    }
    let twisted = level % 2 == 0;
    let odd = if twisted { level / 2 } else { level };
    let count = if d == 2 {
        local_product(odd, m, 1) + local_product(odd, m, 2)
    } else if d % 2 == 1 {
        let rest = odd / d;
        if d == 3 {
            2 * local_product(rest, m, 3)
        } else {
            local_product(rest, m, d as i64) * nu_self(d, twisted)?
        }
    } else {
        let e = d / 2;
        let rest = odd / e;
        local_product(rest, m, 2 * e as i64) * h(-8 * e as i64)
    };
    Ok(FixedPointCount { level, d, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(n: u64) -> SquarefreeLevel {
        SquarefreeLevel::new(n).unwrap()
    }

    #[test]
    fn class_number_examples() {
        let h = |d| class_number(Discriminant::new(d).unwrap());
        assert_eq!(h(-3), 1);
        assert_eq!(h(-4), 1);
        assert_eq!(h(-23), 3);
        assert_eq!(h(-20), 2);
        assert_eq!(h(-12), 1);
    }

    #[test]
    fn invalid_discriminants() {
        assert!(Discriminant::new(5).is_err());
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(0).is_err());
        assert!(Discriminant::new(-8).is_ok());
    }

    #[test]
    fn nu_self_examples() {
        assert_eq!(nu_self(5, false).unwrap(), 2);
        assert_eq!(nu_self(7, false).unwrap(), 2);
        assert_eq!(nu_self(7, true).unwrap(), 4);
        assert!(nu_self(3, false).is_err());
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(&lvl(10), 2).unwrap().count, 2);
        assert!(nu(&lvl(10), 3).is_err());
        assert!(nu(&lvl(10), 1).is_err());
        // (-7/5) = (3/5) = -1 kills nu(35, 7)
        assert_eq!(nu(&lvl(35), 7).unwrap().count, 0);
        // w_2 on X0(2) and w_3 on X0(3): genus 0, two fixed points each
        assert_eq!(nu(&lvl(2), 2).unwrap().count, 2);
        assert_eq!(nu(&lvl(3), 3).unwrap().count, 2);
    }

    #[test]
    fn cache_roundtrip() {
        let cache = ClassNumberCache::default();
        assert!(cache.is_empty());
        assert_eq!(cache.get(Discriminant::new(-23).unwrap()), 3);
        let snap = cache.snapshot();
        assert_eq!(snap, vec![(-23, 3)]);
        let other = ClassNumberCache::default();
        other.extend(snap.into_iter().chain([(7, 1)]));
        assert_eq!(other.len(), 1);
    }
}
