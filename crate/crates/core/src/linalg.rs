//! Dense linear algebra over exact fields and lattice saturation.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::{Field, Fp, Ring};

pub type Matrix<E> = Vec<Vec<E>>;

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Matrix<F::E>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(&m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut().skip(c) {
            *x = f.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::E>) -> usize {
    rref(f, &mut m.clone()).len()
}

/// Basis of `{ v : m v = 0 }`, returned as rows in reduced echelon form.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::E>, cols: usize) -> Matrix<F::E> {
    let mut a = m.clone();
    let pivots = rref(f, &mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = f.neg(&row[free]);
        }
        basis.push(v);
    }
    rref(f, &mut basis);
    basis
}

/// Basis of `{ x : x m = 0 }`.
pub fn left_kernel<F: Field>(f: &F, m: &Matrix<F::E>) -> Matrix<F::E> {
    kernel(f, &transpose(f, m), m.len())
}

pub fn transpose<R: Ring>(r: &R, m: &Matrix<R::E>) -> Matrix<R::E> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row.get(j).cloned().unwrap_or_else(|| r.zero())).collect())
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve<F: Field>(f: &F, m: &Matrix<F::E>, b: &[F::E]) -> Option<Vec<F::E>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Matrix<F::E> = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![f.zero(); cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[cols].clone();
    }
    Some(x)
}

/// True when `v` lies in the row span of a matrix already in RREF with the given pivots.
pub fn in_row_span<F: Field>(f: &F, echelon: &Matrix<F::E>, pivots: &[usize], v: &[F::E]) -> bool {
    let mut w = v.to_vec();
    for (row, &pc) in echelon.iter().zip(pivots) {
        if f.is_zero(&w[pc]) {
            continue;
        }
        let c = w[pc].clone();
        for (x, y) in w.iter_mut().zip(row) {
            *x = f.sub(x, &f.mul(&c, y));
        }
    }
    w.iter().all(|x| f.is_zero(x))
}

/// Replaces an integer row basis by a basis of its `p`-saturation
/// `(span_Q L) ∩ Z_(p)^n`, by repeatedly dividing `p`-divisible combinations.
pub fn p_saturate(mut rows: Matrix<BigInt>, p: u64) -> Matrix<BigInt> {
    let fp = Fp::new(p);
    let pb = BigInt::from(p);
    loop {
        let reduced: Matrix<u64> = rows
            .iter()
            .map(|r| r.iter().map(|x| fp.from_bigint(x)).collect())
            .collect();
        let deps = left_kernel(&fp, &reduced);
        let Some(dep) = deps.first() else { return rows };
        // leading coefficient of an RREF row is 1, so row k can be swapped out
        let k = dep.iter().position(|&c| c != 0).expect("nonzero dependency");
        let cols = rows[0].len();
        let mut combo = vec![BigInt::zero(); cols];
        for (c, row) in dep.iter().zip(&rows) {
            if *c == 0 {
                continue;
            }
            let cb = BigInt::from(*c);
            for (x, y) in combo.iter_mut().zip(row) {
                *x += &cb * y;
            }
        }
        debug_assert!(combo.iter().all(|x| (x % &pb).is_zero()));
        rows[k] = combo.into_iter().map(|x| x / &pb).collect();
    }
}
