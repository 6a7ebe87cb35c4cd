//! Truncated Laurent series in `q` over a coefficient ring.

use crate::poly::{Field, Ring};

/// `sum_{i} coeffs[i] q^{val + i} + O(q^prec)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<E> {
    pub val: i64,
    pub coeffs: Vec<E>,
    pub prec: i64,
}

impl<E: Clone> Laurent<E> {
    /// Power series `sum c_j q^{j + shift}` known to `O(q^{len + shift})`.
    pub fn from_coeffs(coeffs: Vec<E>, shift: i64) -> Self {
        let prec = shift + coeffs.len() as i64;
        Self { val: shift, coeffs, prec }
    }

    pub fn coeff<R: Ring<E = E>>(&self, r: &R, n: i64) -> E {
        assert!(n < self.prec, "coefficient beyond the known precision");
        if n < self.val {
            return r.zero();
        }
        self.coeffs.get((n - self.val) as usize).cloned().unwrap_or_else(|| r.zero())
    }
}

/// Series arithmetic over the ring `R`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesRing<R> {
    pub base: R,
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R) -> Self {
        Self { base }
    }

    /// Strips leading and trailing zeros and terms at or beyond the precision.
    pub fn normalize(&self, mut s: Laurent<R::E>) -> Laurent<R::E> {
        while s.coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            s.coeffs.pop();
        }
        let lead = s.coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        s.coeffs.drain(..lead);
        s.val += lead as i64;
        if s.coeffs.is_empty() {
            s.val = s.prec;
        }
        let keep = (s.prec - s.val).max(0) as usize;
        s.coeffs.truncate(keep);
        s
    }

    pub fn is_zero(&self, s: &Laurent<R::E>) -> bool {
        s.coeffs.iter().all(|c| self.base.is_zero(c))
    }

    /// Valuation, `None` when no nonzero term is known.
    pub fn valuation(&self, s: &Laurent<R::E>) -> Option<i64> {
        s.coeffs
            .iter()
            .position(|c| !self.base.is_zero(c))
            .map(|i| s.val + i as i64)
    }

    pub fn add(&self, a: &Laurent<R::E>, b: &Laurent<R::E>) -> Laurent<R::E> {
        self.combine(a, b, false)
    }

    pub fn sub(&self, a: &Laurent<R::E>, b: &Laurent<R::E>) -> Laurent<R::E> {
        self.combine(a, b, true)
    }

    fn combine(&self, a: &Laurent<R::E>, b: &Laurent<R::E>, minus: bool) -> Laurent<R::E> {
        let prec = a.prec.min(b.prec);
        let val = a.val.min(b.val).min(prec);
        let coeffs = (val..prec)
            .map(|n| {
                let x = if n >= a.val { a.coeff(&self.base, n) } else { self.base.zero() };
                let y = if n >= b.val { b.coeff(&self.base, n) } else { self.base.zero() };
                if minus {
                    self.base.sub(&x, &y)
                } else {
                    self.base.add(&x, &y)
                }
            })
            .collect();
        self.normalize(Laurent { val, coeffs, prec })
    }

    pub fn scale(&self, a: &Laurent<R::E>, c: &R::E) -> Laurent<R::E> {
        self.normalize(Laurent {
            val: a.val,
            coeffs: a.coeffs.iter().map(|x| self.base.mul(x, c)).collect(),
            prec: a.prec,
        })
    }

    pub fn neg(&self, a: &Laurent<R::E>) -> Laurent<R::E> {
        Laurent {
            val: a.val,
            coeffs: a.coeffs.iter().map(|x| self.base.neg(x)).collect(),
            prec: a.prec,
        }
    }

    pub fn shift(&self, a: &Laurent<R::E>, k: i64) -> Laurent<R::E> {
        Laurent {
            val: a.val + k,
            coeffs: a.coeffs.clone(),
            prec: a.prec + k,
        }
    }

    /// Product; the relative precision is the smaller of the two.
    pub fn mul(&self, a: &Laurent<R::E>, b: &Laurent<R::E>) -> Laurent<R::E> {
        let a = self.normalize(a.clone());
        let b = self.normalize(b.clone());
        let val = a.val + b.val;
        let prec = (a.prec + b.val).min(b.prec + a.val);
        let len = (prec - val).max(0) as usize;
        let mut coeffs = vec![self.base.zero(); len];
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = self.base.add(&coeffs[i + j], &self.base.mul(x, y));
            }
        }
        self.normalize(Laurent { val, coeffs, prec })
    }

    pub fn pow(&self, a: &Laurent<R::E>, e: u32) -> Laurent<R::E> {
        let mut acc = Laurent { val: 0, coeffs: vec![self.base.one()], prec: i64::MAX / 4 };
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `q d/dq`.
    pub fn theta(&self, a: &Laurent<R::E>) -> Laurent<R::E> {
        self.normalize(Laurent {
            val: a.val,
            coeffs: a
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| self.base.mul(c, &self.base.from_i64(a.val + i as i64)))
                .collect(),
            prec: a.prec,
        })
    }
}

impl<F: Field> SeriesRing<F> {
    /// Multiplicative inverse; `None` when no nonzero term is known.
    pub fn inv(&self, a: &Laurent<F::E>) -> Option<Laurent<F::E>> {
        let a = self.normalize(a.clone());
        if a.coeffs.is_empty() {
            return None;
        }
        let n = (a.prec - a.val) as usize;
        let c0 = self.base.inv(&a.coeffs[0])?;
        let mut out = Vec::with_capacity(n);
        out.push(c0.clone());
        for k in 1..n {
            let mut s = self.base.zero();
            for j in 1..=k.min(a.coeffs.len() - 1) {
                s = self.base.add(&s, &self.base.mul(&a.coeffs[j], &out[k - j]));
            }
            out.push(self.base.neg(&self.base.mul(&s, &c0)));
        }
        Some(self.normalize(Laurent {
            val: -a.val,
            coeffs: out,
            prec: -a.val + n as i64,
        }))
    }

    pub fn div(&self, a: &Laurent<F::E>, b: &Laurent<F::E>) -> Option<Laurent<F::E>> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// Product of two integer power series truncated to `len` terms.
pub fn mul_trunc<R: Ring>(r: &R, a: &[R::E], b: &[R::E], len: usize) -> Vec<R::E> {
    let mut out = vec![r.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if r.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = r.add(&out[i + j], &r.mul(x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Fp, QQ};
    use num_rational::BigRational;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
    }

    #[test]
    fn geometric_inverse() {
        let s = SeriesRing::new(QQ);
        let one_minus_q = Laurent::from_coeffs(q(&[1, -1, 0, 0, 0, 0]), 0);
        let inv = s.inv(&one_minus_q).unwrap();
        assert_eq!(inv.coeffs, q(&[1, 1, 1, 1, 1, 1]));
        let prod = s.mul(&inv, &one_minus_q);
        assert_eq!(prod.coeffs, q(&[1]));
        assert_eq!(prod.prec, 6);
    }

    #[test]
    fn laurent_quotient() {
        let s = SeriesRing::new(QQ);
        // (q + q^2) / q^2 = q^{-1} + 1
        let a = Laurent::from_coeffs(q(&[1, 1, 0, 0]), 1);
        let b = Laurent::from_coeffs(q(&[1, 0, 0, 0]), 2);
        let c = s.div(&a, &b).unwrap();
        assert_eq!(c.val, -1);
        assert_eq!(c.coeffs, q(&[1, 1]));
        assert_eq!(c.prec, 3);
        let t = s.theta(&c);
        assert_eq!(t.coeffs, q(&[-1]));
    }

    #[test]
    fn fp_series() {
        let f = Fp::new(5);
        let s = SeriesRing::new(f);
        let a = Laurent::from_coeffs(vec![2, 3, 0, 1], 0);
        let inv = s.inv(&a).unwrap();
        let one = s.mul(&a, &inv);
        assert_eq!(one.coeffs, vec![1]);
        assert_eq!(one.prec, 4);
    }

    #[test]
    fn truncated_product() {
        let r = crate::poly::ZZ;
        let a: Vec<_> = [1, 1].iter().map(|&c: &i64| c.into()).collect();
        let sq = mul_trunc(&r, &a, &a, 2);
        assert_eq!(sq, vec![1.into(), 2.into()]);
    }
}
