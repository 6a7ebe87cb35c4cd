//! Coefficient rings and dense univariate polynomials.
//!
//! Rings are passed as context values so that `F_p` (runtime modulus) and
//! nested polynomial rings share one set of algorithms.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

pub trait Ring {
    type E: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn from_i64(&self, n: i64) -> Self::E;
    /// `a / b` when `b` divides `a` exactly.
    fn exact_div(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;

    fn pow(&self, a: &Self::E, mut e: u32) -> Self::E {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::E) -> Option<Self::E>;

    fn div(&self, a: &Self::E, b: &Self::E) -> Option<Self::E> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// The integers.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZZ;

impl Ring for ZZ {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn from_i64(&self, n: i64) -> BigInt {
        n.into()
    }
    fn exact_div(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        if b.is_zero() {
            return None;
        }
        let (q, r) = a.div_rem(b);
        r.is_zero().then_some(q)
    }
}

/// The rationals.
#[derive(Debug, Clone, Copy, Default)]
pub struct QQ;

impl Ring for QQ {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn exact_div(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        self.div(a, b)
    }
}

impl Field for QQ {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

/// The prime field `F_p`, `p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 31), "modulus out of range");
        Self { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().expect("reduced residue fits")
    }

    /// Reduction of `a/b`; `None` when `p` divides the denominator.
    pub fn from_rational(&self, x: &BigRational) -> Option<u64> {
        let d = self.from_bigint(x.denom());
        self.inv(&d).map(|di| self.mul(&self.from_bigint(x.numer()), &di))
    }
}

impl Ring for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn exact_div(&self, a: &u64, b: &u64) -> Option<u64> {
        self.div(a, b)
    }
}

impl Field for Fp {
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a % self.p != 0).then(|| crate::arith::pow_mod(*a, self.p - 2, self.p))
    }
}

/// Dense polynomials over `R`, coefficients ascending, no trailing zeros.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyRing<R> {
    pub base: R,
}

pub type ZPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        Self { base }
    }

    pub fn trim(&self, mut a: Vec<R::E>) -> Vec<R::E> {
        while a.last().is_some_and(|c| self.base.is_zero(c)) {
            a.pop();
        }
        a
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self, a: &[R::E]) -> Option<usize> {
        a.iter().rposition(|c| !self.base.is_zero(c))
    }

    pub fn constant(&self, c: R::E) -> Vec<R::E> {
        self.trim(vec![c])
    }

    pub fn monomial(&self, c: R::E, k: usize) -> Vec<R::E> {
        let mut v = vec![self.base.zero(); k + 1];
        v[k] = c;
        self.trim(v)
    }

    pub fn scale(&self, a: &[R::E], c: &R::E) -> Vec<R::E> {
        self.trim(a.iter().map(|x| self.base.mul(x, c)).collect())
    }

    pub fn eval(&self, a: &[R::E], x: &R::E) -> R::E {
        a.iter()
            .rev()
            .fold(self.base.zero(), |acc, c| self.base.add(&self.base.mul(&acc, x), c))
    }

    pub fn derivative(&self, a: &[R::E]) -> Vec<R::E> {
        self.trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.base.mul(c, &self.base.from_i64(i as i64)))
                .collect(),
        )
    }

    /// `a(b(x))`.
    pub fn compose(&self, a: &[R::E], b: &[R::E]) -> Vec<R::E> {
        let b = b.to_vec();
        a.iter().rev().fold(Vec::new(), |acc, c| {
            let prod = self.mul(&acc, &b);
            self.add(&prod, &self.constant(c.clone()))
        })
    }

    /// Remainder and quotient when the leading coefficient of `b` divides
    /// every leading coefficient met along the way.
    pub fn exact_div_rem(&self, a: &[R::E], b: &[R::E]) -> Option<(Vec<R::E>, Vec<R::E>)> {
        let db = self.degree(b)?;
        let lb = &b[db];
        let mut r = self.trim(a.to_vec());
        let mut q = vec![self.base.zero(); r.len().saturating_sub(db).max(1)];
        while let Some(dr) = self.degree(&r) {
            if dr < db {
                break;
            }
            let c = self.base.exact_div(&r[dr], lb)?;
            let shift = dr - db;
            for (i, bc) in b.iter().enumerate().take(db + 1) {
                r[shift + i] = self.base.sub(&r[shift + i], &self.base.mul(&c, bc));
            }
            q[shift] = c;
            r = self.trim(r);
        }
        Some((self.trim(q), r))
    }

    /// Determinant of a square matrix by Bareiss fraction-free elimination.
    pub fn determinant(base: &R, mut m: Vec<Vec<R::E>>) -> R::E {
        let n = m.len();
        if n == 0 {
            return base.one();
        }
        let mut sign = false;
        let mut prev = base.one();
        for k in 0..n - 1 {
            if base.is_zero(&m[k][k]) {
                match (k + 1..n).find(|&i| !base.is_zero(&m[i][k])) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = !sign;
                    }
                    None => return base.zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = base.sub(
                        &base.mul(&m[i][j], &m[k][k]),
                        &base.mul(&m[i][k], &m[k][j]),
                    );
                    m[i][j] = base.exact_div(&t, &prev).expect("Bareiss division is exact");
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign {
            base.neg(&d)
        } else {
            d
        }
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, a: &[R::E], b: &[R::E]) -> R::E {
        let (Some(m), Some(n)) = (self.degree(a), self.degree(b)) else {
            return self.base.zero();
        };
        if m == 0 && n == 0 {
            return self.base.one();
        }
        let size = m + n;
        let mut rows = Vec::with_capacity(size);
        for i in 0..n {
            let mut row = vec![self.base.zero(); size];
            for (j, c) in a.iter().enumerate().take(m + 1) {
                row[i + m - j] = c.clone();
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![self.base.zero(); size];
            for (j, c) in b.iter().enumerate().take(n + 1) {
                row[i + n - j] = c.clone();
            }
            rows.push(row);
        }
        Self::determinant(&self.base, rows)
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type E = Vec<R::E>;

    fn zero(&self) -> Self::E {
        Vec::new()
    }
    fn one(&self) -> Self::E {
        vec![self.base.one()]
    }
    fn is_zero(&self, a: &Self::E) -> bool {
        self.degree(a).is_none()
    }
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E {
        let n = a.len().max(b.len());
        let z = self.base.zero();
        self.trim(
            (0..n)
                .map(|i| self.base.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        let n = a.len().max(b.len());
        let z = self.base.zero();
        self.trim(
            (0..n)
                .map(|i| self.base.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        self.trim(out)
    }
    fn neg(&self, a: &Self::E) -> Self::E {
        a.iter().map(|c| self.base.neg(c)).collect()
    }
    fn from_i64(&self, n: i64) -> Self::E {
        self.constant(self.base.from_i64(n))
    }
    fn exact_div(&self, a: &Self::E, b: &Self::E) -> Option<Self::E> {
        let (q, r) = self.exact_div_rem(a, b)?;
        self.is_zero(&r).then_some(q)
    }
}

impl<F: Field> PolyRing<F> {
    pub fn div_rem(&self, a: &[F::E], b: &[F::E]) -> (Vec<F::E>, Vec<F::E>) {
        self.exact_div_rem(a, b).expect("division by a nonzero polynomial over a field")
    }

    pub fn rem(&self, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
        self.div_rem(a, b).1
    }

    pub fn monic(&self, a: &[F::E]) -> Vec<F::E> {
        match self.degree(a) {
            None => Vec::new(),
            Some(d) => {
                let inv = self.base.inv(&a[d]).expect("leading coefficient is nonzero");
                self.scale(a, &inv)
            }
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
        let mut x = self.trim(a.to_vec());
        let mut y = self.trim(b.to_vec());
        while !self.is_zero(&y) {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `s a + t b = g` monic.
    pub fn xgcd(&self, a: &[F::E], b: &[F::E]) -> (Vec<F::E>, Vec<F::E>, Vec<F::E>) {
        let (mut r0, mut r1) = (self.trim(a.to_vec()), self.trim(b.to_vec()));
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !self.is_zero(&r1) {
            let (q, r) = self.div_rem(&r0, &r1);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            let t = self.sub(&t0, &self.mul(&q, &t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        match self.degree(&r0) {
            None => (r0, s0, t0),
            Some(d) => {
                let inv = self.base.inv(&r0[d]).expect("nonzero");
                (self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv))
            }
        }
    }

    /// Product of the distinct irreducible factors, monic. Characteristic zero
    /// or degree below the characteristic.
    pub fn squarefree_part(&self, a: &[F::E]) -> Vec<F::E> {
        let g = self.gcd(a, &self.derivative(a));
        let (q, _) = self.div_rem(a, &g);
        self.monic(&q)
    }
}

pub fn zpoly_to_q(a: &[BigInt]) -> QPoly {
    a.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

/// Primitive integer multiple of a rational polynomial.
pub fn qpoly_to_primitive_z(a: &[BigRational]) -> ZPoly {
    let den = a.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = a.iter().map(|c| (c * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Vec::new();
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Sign of `a(n/d)` for `d > 0`, evaluated as the integer `d^deg a(n/d)`.
fn sign_at(a: &[BigInt], x: &BigRational) -> i8 {
    let (n, d) = (x.numer(), x.denom());
    let mut v = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in a.iter().rev() {
        v = v * n + c * &dpow;
        dpow *= d;
    }
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_changes(seq: &[ZPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| sign_at(p, x)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn primitive(a: ZPoly) -> ZPoly {
    let g = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() || g.is_one() {
        return a;
    }
    a.into_iter().map(|c| c / &g).collect()
}

/// Sturm sequence of a nonconstant integer polynomial, each term scaled by a
/// positive constant. The last term is `gcd(a, a')` up to a constant.
fn sturm_sequence(a: &[BigInt]) -> Vec<ZPoly> {
    let ring = PolyRing::new(ZZ);
    let mut seq = vec![primitive(ring.trim(a.to_vec())), primitive(ring.derivative(a))];
    loop {
        let n = seq.len();
        let (x, y) = (&seq[n - 2], &seq[n - 1]);
        let (dx, dy) = (ring.degree(x).unwrap_or(0), ring.degree(y).unwrap_or(0));
        if dy == 0 {
            break;
        }
        let lc = y[dy].abs();
        let scaled = ring.scale(x, &Pow::pow(&lc, (dx - dy + 1) as u32));
        let (_, r) = ring.exact_div_rem(&scaled, y).expect("pseudo-division is exact");
        if ring.is_zero(&r) {
            break;
        }
        seq.push(primitive(ring.neg(&r)));
    }
    seq
}

/// Number of distinct real roots of `a` in the half-open interval `(lo, hi]`,
/// by Sturm's theorem.
pub fn count_real_roots(a: &[BigRational], lo: &BigRational, hi: &BigRational) -> usize {
    let z = qpoly_to_primitive_z(a);
    if PolyRing::new(ZZ).degree(&z).unwrap_or(0) == 0 {
        return 0;
    }
    let seq = sturm_sequence(&z);
    sign_changes(&seq, lo) - sign_changes(&seq, hi)
}

/// True when every complex root of `a` is real and lies in `[lo, hi]`.
pub fn all_roots_in(a: &[BigRational], lo: &BigRational, hi: &BigRational) -> bool {
    let ring = PolyRing::new(ZZ);
    let z = qpoly_to_primitive_z(a);
    let Some(d) = ring.degree(&z) else { return false };
    if d == 0 {
        return true;
    }
    let seq = sturm_sequence(&z);
    let distinct = d - ring.degree(seq.last().expect("nonempty")).unwrap_or(0);
    let at_lo = usize::from(sign_at(&z, lo) == 0);
    sign_changes(&seq, lo) - sign_changes(&seq, hi) + at_lo == distinct
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn q(v: &[i64]) -> QPoly {
        zpoly_to_q(&z(v))
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn resultant_of_linear_factors() {
        let ring = PolyRing::new(ZZ);
        // Res(x - 2, x - 5) = -3, Res(x^2 - 1, x - 3) = 8
        assert_eq!(ring.resultant(&z(&[-2, 1]), &z(&[-5, 1])), BigInt::from(-3));
        assert_eq!(ring.resultant(&z(&[-1, 0, 1]), &z(&[-3, 1])), BigInt::from(8));
        // common root gives zero
        assert_eq!(ring.resultant(&z(&[-1, 0, 1]), &z(&[1, 1])), BigInt::zero());
    }

    #[test]
    fn gcd_and_squarefree() {
        let ring = PolyRing::new(QQ);
        let a = ring.mul(&q(&[-1, 1]), &q(&[-1, 1]));
        let a = ring.mul(&a, &q(&[2, 1]));
        assert_eq!(ring.squarefree_part(&a), ring.mul(&q(&[-1, 1]), &q(&[2, 1])));
        assert_eq!(ring.gcd(&a, &q(&[1, 1])), q(&[1]));
        let (g, s, t) = ring.xgcd(&q(&[-1, 0, 1]), &q(&[-2, 1]));
        assert_eq!(g, q(&[1]));
        let comb = ring.add(&ring.mul(&s, &q(&[-1, 0, 1])), &ring.mul(&t, &q(&[-2, 1])));
        assert_eq!(comb, g);
    }

    #[test]
    fn sturm_counts() {
        // (x^2 - 2)(x - 3)
        let a = PolyRing::new(QQ).mul(&q(&[-2, 0, 1]), &q(&[-3, 1]));
        assert_eq!(count_real_roots(&a, &r(-10, 1), &r(10, 1)), 3);
        assert_eq!(count_real_roots(&a, &r(0, 1), &r(2, 1)), 1);
        assert!(all_roots_in(&a, &r(-2, 1), &r(3, 1)));
        assert!(!all_roots_in(&a, &r(-1, 1), &r(3, 1)));
        assert!(!all_roots_in(&q(&[1, 0, 1]), &r(-5, 1), &r(5, 1)));
    }

    #[test]
    fn fp_arithmetic() {
        let f = Fp::new(7);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.from_rational(&r(1, 2)), Some(4));
        assert_eq!(Fp::new(2).from_rational(&r(1, 2)), None);
    }

    #[test]
    fn nested_resultant() {
        // Res_y(y^2 - 2, x^2 - y x + 3) = (x^2 + 3)^2 - 2x^2 = x^4 + 4x^2 + 9
        let zx = PolyRing::new(ZZ);
        let zxy = PolyRing::new(zx);
        let a = vec![z(&[-2]), vec![], z(&[1])];
        let b = vec![z(&[3, 0, 1]), z(&[0, -1])];
        assert_eq!(zxy.resultant(&a, &b), z(&[9, 0, 4, 0, 1]));
    }
}
