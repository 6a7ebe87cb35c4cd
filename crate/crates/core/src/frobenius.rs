//! Frobenius characteristic polynomials and point counts via Eichler-Shimura.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::moebius;
use crate::error::{Error, Result};
use crate::nfdata::{weil_interval, NewformOrbit, OrbitId};
use crate::poly::{all_roots_in, zpoly_to_q, PolyRing, Ring, ZPoly, ZZ};

fn check_good(orbits: &[&NewformOrbit], p: u64) -> Result<()> {
    match orbits.iter().find(|o| o.level.value() % p == 0) {
        Some(o) => Err(Error::BadReduction { p, level: o.level.value() }),
        None => Ok(()),
    }
}

/// `prod_a (x^2 - a x + p)` over the roots `a` of a monic `A`, written as
/// `x^n A(x + p/x)`; this equals `Res_y(A(y), x^2 - y x + p)`.
pub fn orbit_charpoly(ap: &ZPoly, p: u64) -> ZPoly {
    let zx = PolyRing::new(ZZ);
    let n = ap.len() - 1;
    let x2p = vec![BigInt::from(p), BigInt::zero(), BigInt::one()];
    let mut out = Vec::new();
    let mut pow = zx.one();
    for (k, c) in ap.iter().enumerate() {
        let term = zx.mul(&zx.scale(&pow, c), &zx.monomial(BigInt::one(), n - k));
        out = zx.add(&out, &term);
        pow = zx.mul(&pow, &x2p);
    }
    out
}

/// Characteristic polynomial of Frobenius at `p` on the product of the orbits' abelian varieties.
pub fn frob_charpoly(orbits: &[&NewformOrbit], p: u64) -> Result<ZPoly> {
    check_good(orbits, p)?;
    let zx = PolyRing::new(ZZ);
    let mut acc = zx.one();
    for o in orbits {
        acc = zx.mul(&acc, &orbit_charpoly(o.ap(p)?, p));
    }
    Ok(acc)
}

/// Power sums `s_1..s_k` of the roots of a monic polynomial (Newton's identities).
pub fn power_sums(poly: &ZPoly, k: usize) -> Vec<BigInt> {
    let m = poly.len() - 1;
    // a_i = coefficient of x^{m-i}
    let a = |i: usize| &poly[m - i];
    let mut s: Vec<BigInt> = Vec::with_capacity(k);
    for j in 1..=k {
        let mut v = BigInt::zero();
        for i in 1..j.min(m + 1) {
            v -= a(i) * &s[j - i - 1];
        }
        if j <= m {
            v -= BigInt::from(j) * a(j);
        }
        s.push(v);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusData {
    pub orbit_set: Vec<OrbitId>,
    pub p: u64,
    pub charpoly: ZPoly,
    pub power_sums: Vec<BigInt>,
}

impl FrobeniusData {
    pub fn new(orbits: &[&NewformOrbit], p: u64, k: usize) -> Result<Self> {
        let charpoly = FrobeniusCache::global().charpoly(orbits, p)?;
        let power_sums = power_sums(&charpoly, k);
        Ok(Self {
            orbit_set: orbits.iter().map(|o| o.id).collect(),
            p,
            charpoly,
            power_sums,
        })
    }

    pub fn genus(&self) -> usize {
        (self.charpoly.len() - 1) / 2
    }

    /// `|X(F_{p^n})| = p^n + 1 - s_n`.
    pub fn count(&self, n: usize) -> BigInt {
        assert!(n >= 1 && n <= self.power_sums.len(), "power sum not computed");
        BigInt::from(self.p).pow(n as u32) + 1 - &self.power_sums[n - 1]
    }
}

/// Memo of Frobenius charpolys keyed by orbit set and prime.
#[derive(Debug, Default)]
pub struct FrobeniusCache {
    map: RwLock<HashMap<(Vec<OrbitId>, u64), ZPoly>>,
}

impl FrobeniusCache {
    pub fn global() -> &'static FrobeniusCache {
        static CACHE: OnceLock<FrobeniusCache> = OnceLock::new();
        CACHE.get_or_init(FrobeniusCache::default)
    }

    pub fn charpoly(&self, orbits: &[&NewformOrbit], p: u64) -> Result<ZPoly> {
        let mut key: Vec<OrbitId> = orbits.iter().map(|o| o.id).collect();
        key.sort_unstable();
        let key = (key, p);
        if let Some(c) = self.map.read().expect("frobenius cache poisoned").get(&key) {
            return Ok(c.clone());
        }
        let c = frob_charpoly(orbits, p)?;
        self.map.write().expect("frobenius cache poisoned").insert(key, c.clone());
        Ok(c)
    }

    /// Entries as `(orbit ids, p, coefficients as decimal strings)`, sorted.
    pub fn snapshot(&self) -> Vec<(Vec<OrbitId>, u64, Vec<String>)> {
        let mut v: Vec<_> = self
            .map
            .read()
            .expect("frobenius cache poisoned")
            .iter()
            .map(|((ids, p), c)| (ids.clone(), *p, c.iter().map(ToString::to_string).collect()))
            .collect();
        v.sort();
        v
    }

    /// Seeds the cache; malformed entries are skipped.
    pub fn extend(&self, entries: impl IntoIterator<Item = (Vec<OrbitId>, u64, Vec<String>)>) {
        let mut map = self.map.write().expect("frobenius cache poisoned");
        for (mut ids, p, coeffs) in entries {
            let Ok(c) = coeffs.iter().map(|s| s.parse()).collect::<Result<ZPoly, _>>() else {
                continue;
            };
            ids.sort_unstable();
            map.insert((ids, p), c);
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("frobenius cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("frobenius cache poisoned").clear();
    }
}

/// `|X(F_{p^n})|` for the curve whose Jacobian is isogenous to the orbits' product.
pub fn point_count(orbits: &[&NewformOrbit], p: u64, n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    Ok(FrobeniusData::new(orbits, p, n)?.count(n))
}

/// Number of closed points of degree `n`: `(sum_{d | n} mu(n/d) |X(F_{p^d})|) / n`.
pub fn degree_n_places(data: &FrobeniusData, n: usize) -> Result<BigInt> {
    let mut sum = BigInt::zero();
    for d in crate::arith::divisors(n as u64) {
        let mu = moebius(n as u64 / d);
        if mu != 0 {
            sum += BigInt::from(mu) * data.count(d as usize);
        }
    }
    let (q, r) = sum.div_rem(&BigInt::from(n));
    if !r.is_zero() || q.is_negative() {
        return Err(Error::Contradiction(format!(
            "non-integral place count at p = {}, n = {n}",
            data.p
        )));
    }
    Ok(q)
}

/// Weil checks: the functional equation `x^{2g} P(p/x) = p^g P(x)` and every
/// `a_p` conjugate in `[-2 sqrt p, 2 sqrt p]` (tolerance `1e-6`), which puts
/// every root on `|x| = sqrt p`.
pub fn weil_check(orbits: &[&NewformOrbit], p: u64) -> Result<bool> {
    let c = frob_charpoly(orbits, p)?;
    let g = (c.len() - 1) / 2;
    let pb = BigInt::from(p);
    for k in 0..=g {
        if c[2 * g - k].clone() * pb.pow((g - k) as u32) != c[k] {
            return Ok(false);
        }
    }
    let (lo, hi) = weil_interval(p);
    for o in orbits {
        if !all_roots_in(&zpoly_to_q(o.ap(p)?), &lo, &hi) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn dim_one_charpoly() {
        assert_eq!(orbit_charpoly(&z(&[0, 1]), 5), z(&[5, 0, 1]));
        assert_eq!(orbit_charpoly(&z(&[2, 1]), 2), z(&[2, 2, 1]));
    }

    #[test]
    fn matches_resultant() {
        // A(y) = y^2 - 2
        let ap = z(&[-2, 0, 1]);
        let zx = PolyRing::new(ZZ);
        let zxy = PolyRing::new(zx);
        let a: Vec<ZPoly> = ap.iter().map(|c| zx.constant(c.clone())).collect();
        let b = vec![z(&[3, 0, 1]), z(&[0, -1])];
        assert_eq!(orbit_charpoly(&ap, 3), zxy.resultant(&a, &b));
    }

    #[test]
    fn newton_power_sums() {
        // (x-1)(x-2)(x-3): s_1 = 6, s_2 = 14, s_3 = 36, s_4 = 98
        let s = power_sums(&z(&[-6, 11, -6, 1]), 4);
        assert_eq!(s, z(&[6, 14, 36, 98]));
        // x^2 + 5: s_n = (i sqrt5)^n + (-i sqrt5)^n
        assert_eq!(power_sums(&z(&[5, 0, 1]), 4), z(&[0, -10, 0, 50]));
    }

    #[test]
    fn elliptic_curve_11a_count() {
        // y^2 + y = x^3 - x^2 - 10x - 20 has 5 points over F_2 (a_2 = -2)
        let data = FrobeniusData {
            orbit_set: vec![],
            p: 2,
            charpoly: orbit_charpoly(&z(&[2, 1]), 2),
            power_sums: power_sums(&orbit_charpoly(&z(&[2, 1]), 2), 3),
        };
        assert_eq!(data.count(1), BigInt::from(5));
        assert_eq!(degree_n_places(&data, 2).unwrap(), BigInt::from(0));
    }
}
