//! Elementary multiplicative number theory on machine integers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division factorisation, ascending primes with multiplicities.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// Primes `p <= bound` (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor(n).iter().all(|&(_, e)| e == 1)
}

/// Möbius function; `n` must be at least 1.
pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1, "moebius is defined for n >= 1");
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn three_adic_valuation(mut n: u64) -> u32 {
    assert!(n > 0);
    let mut v = 0;
    while n % 3 == 0 {
        n /= 3;
        v += 1;
    }
    v
}

/// Legendre symbol `(-d / p)` for an odd prime `p`.
pub fn kronecker_at_prime(d: i64, p: u64) -> i8 {
    debug_assert!(p % 2 == 1 && is_prime(p));
    let p_i = p as i128;
    let a = (-(d as i128)).rem_euclid(p_i) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// A square-free positive integer together with its prime factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct SquarefreeLevel {
    value: u64,
    primes: Vec<u64>,
}

impl SquarefreeLevel {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidLevel(0, "level must be positive"));
        }
        let f = factor(value);
        if f.iter().any(|&(_, e)| e > 1) {
            return Err(Error::NotSquarefree(value));
        }
        Ok(Self {
            value,
            primes: f.into_iter().map(|(p, _)| p).collect(),
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.primes.len() as u32
    }

    pub fn is_odd(&self) -> bool {
        self.value % 2 == 1
    }

    pub fn divides(&self, m: u64) -> bool {
        m % self.value == 0
    }

    /// Divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &p in &self.primes {
            let len = out.len();
            for i in 0..len {
                out.push(out[i] * p);
            }
        }
        out.sort_unstable();
        out
    }

    /// The level `value / p` for a prime `p` dividing it.
    pub fn without(&self, p: u64) -> Option<Self> {
        if self.value % p != 0 || !self.primes.contains(&p) {
            return None;
        }
        Some(Self {
            value: self.value / p,
            primes: self.primes.iter().copied().filter(|&q| q != p).collect(),
        })
    }

    /// Odd part of the level.
    pub fn odd_part(&self) -> Self {
        self.without(2).unwrap_or_else(|| self.clone())
    }
}

impl TryFrom<u64> for SquarefreeLevel {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SquarefreeLevel> for u64 {
    fn from(l: SquarefreeLevel) -> u64 {
        l.value
    }
}

impl fmt::Display for SquarefreeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dedekind psi: `n * prod_{p | n} (1 + 1/p)`.
pub fn dedekind_psi(n: &SquarefreeLevel) -> u64 {
    n.primes().iter().fold(n.value(), |acc, &p| acc / p * (p + 1))
}
