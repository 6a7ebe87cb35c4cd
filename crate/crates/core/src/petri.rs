//! Forms vanishing on the canonical embedding and the diagonal involution search.
//!
//! Variables `x_1..x_g` stand for the block basis `omega_1..omega_g` of a
//! [`StarBasis`](crate::nfdata::StarBasis); an involution acting diagonally
//! with signs `eps` must map every space `L_i` into itself.

use std::collections::HashMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::criteria::dominance;
use crate::error::{Error, Result};
use crate::hypermodel::{genus2_coordinates, genus2_quotient_model};
use crate::linalg::{in_row_span, kernel, left_kernel, rref, Matrix};
use crate::arith::SquarefreeLevel;
use crate::nfdata::NewformOrbit;
use crate::points::{count_projective_points, restrict, Form};
use crate::poly::{QQ, ZZ};
use crate::series::mul_trunc;

/// Extra q-coefficients checked beyond the certifying bound.
pub const GUARD_TERMS: usize = 4;

/// Exponent vectors of degree `degree` in `nvars` variables, lexicographically descending.
pub fn monomials(nvars: usize, degree: u8) -> Vec<Vec<u8>> {
    fn go(nvars: usize, left: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            go(nvars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        go(nvars, degree, &mut Vec::new(), &mut out);
    }
    out
}

/// Number of q-coefficients that certify vanishing of a degree-`i` form.
pub fn required_terms(g: usize, i: usize) -> usize {
    i * (2 * g - 2) + 1
}

/// `(g - 2)(g - 3) / 2`, the dimension of `L_2` for a non-trigonal curve.
pub fn expected_quadric_dim(g: usize) -> usize {
    if g < 3 {
        0
    } else {
        (g - 2) * (g - 3) / 2
    }
}

/// A space `L_i` of degree-`i` forms, basis in reduced row echelon form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricSpace {
    pub genus: usize,
    pub degree: u8,
    pub monomials: Vec<Vec<u8>>,
    pub basis: Matrix<BigRational>,
    pub pivots: Vec<usize>,
}

impl QuadricSpace {
    fn from_rows(genus: usize, degree: u8, monomials: Vec<Vec<u8>>, mut rows: Matrix<BigRational>) -> Self {
        let pivots = rref(&QQ, &mut rows);
        Self { genus, degree, monomials, basis: rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        in_row_span(&QQ, &self.basis, &self.pivots, v)
    }

    /// Basis forms as sparse exponent/coefficient lists.
    pub fn forms(&self) -> Vec<Form> {
        self.basis
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.monomials)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, e)| (e.clone(), c.clone()))
                    .collect()
            })
            .collect()
    }

    /// Basis forms rendered like `6*x1^2 + 5*x1*x2 - x3*x4`.
    pub fn display_forms(&self) -> Vec<String> {
        self.forms().iter().map(|f| format_form(f)).collect()
    }

    /// The coefficient vector of `Q(eps_1 x_1, ..., eps_g x_g)`.
    pub fn apply_signs(&self, row: &[BigRational], eps: &[i8]) -> Vec<BigRational> {
        row.iter()
            .zip(&self.monomials)
            .map(|(c, e)| if monomial_sign(e, eps) < 0 { -c.clone() } else { c.clone() })
            .collect()
    }

    /// Whether every basis form is mapped into the space by the signs.
    pub fn is_invariant(&self, eps: &[i8]) -> bool {
        self.basis.iter().all(|row| self.contains(&self.apply_signs(row, eps)))
    }
}

fn monomial_sign(e: &[u8], eps: &[i8]) -> i8 {
    e.iter()
        .zip(eps)
        .fold(1, |s, (&k, &x)| if x < 0 && k % 2 == 1 { -s } else { s })
}

pub fn format_form(f: &Form) -> String {
    let mut out = String::new();
    for (e, c) in f {
        let mono: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
            .collect();
        let abs = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if abs != BigRational::from_integer(1.into()) || mono.is_empty() {
            out.push_str(&abs.to_string());
            if !mono.is_empty() {
                out.push('*');
            }
        }
        out.push_str(&mono.join("*"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `L_i`: degree-`i` forms `Q` with `Q(omega_1, ..., omega_g) = 0`.
///
/// `series[k][j]` is the coefficient of `q^{j+1}` in `omega_k`. The kernel is
/// exact once `i(2g-2)+1` coefficients of the product are checked, since a
/// section of `K^i` vanishing at the cusp to higher order is zero.
pub fn vanishing_forms(series: &[Vec<BigInt>], degree: u8) -> Result<QuadricSpace> {
    let g = series.len();
    if g < 2 {
        return Err(Error::InvalidArgument(format!("need at least two differentials, got {g}")));
    }
    let need = required_terms(g, degree as usize);
    let have = series.iter().map(Vec::len).min().unwrap_or(0);
    if have < need {
        return Err(Error::Precision { need, have });
    }
    let len = have.min(need + GUARD_TERMS);
    let mons = monomials(g, degree);
    // product of the omega_k / q, built one factor at a time
    let mut cache: HashMap<Vec<u8>, Vec<BigInt>> = HashMap::new();
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(mons.len());
    for e in &mons {
        columns.push(monomial_series(e, series, len, &mut cache));
    }
    let matrix: Matrix<BigRational> = (0..len)
        .map(|r| columns.iter().map(|c| BigRational::from_integer(c[r].clone())).collect())
        .collect();
    let basis = kernel(&QQ, &matrix, mons.len());
    Ok(QuadricSpace::from_rows(g, degree, mons, basis))
}

fn monomial_series(
    e: &[u8],
    series: &[Vec<BigInt>],
    len: usize,
    cache: &mut HashMap<Vec<u8>, Vec<BigInt>>,
) -> Vec<BigInt> {
    if let Some(s) = cache.get(e) {
        return s.clone();
    }
    let k = e.iter().position(|&x| x > 0).expect("positive degree");
    let mut rest = e.to_vec();
    rest[k] -= 1;
    let s = if rest.iter().all(|&x| x == 0) {
        series[k][..len].to_vec()
    } else {
        let r = monomial_series(&rest, series, len, cache);
        mul_trunc(&ZZ, &r, &series[k][..len], len)
    };
    cache.insert(e.to_vec(), s.clone());
    s
}

/// `L_2^{ns}`: the forms of `L_2` without square monomials.
pub fn nonsquare_subspace(l2: &QuadricSpace) -> Result<QuadricSpace> {
    if l2.degree != 2 {
        return Err(Error::InvalidArgument(format!("expected quadrics, got degree {}", l2.degree)));
    }
    let squares: Vec<usize> = (0..l2.monomials.len()).filter(|&j| l2.monomials[j].contains(&2)).collect();
    let restricted: Matrix<BigRational> = l2
        .basis
        .iter()
        .map(|row| squares.iter().map(|&j| row[j].clone()).collect())
        .collect();
    let combos = if squares.is_empty() || l2.basis.is_empty() {
        (0..l2.dim())
            .map(|i| (0..l2.dim()).map(|j| BigRational::from_integer(i64::from(i == j).into())).collect())
            .collect()
    } else {
        left_kernel(&QQ, &restricted)
    };
    let rows = combos
        .iter()
        .map(|c| {
            let mut v = vec![BigRational::zero(); l2.monomials.len()];
            for (a, row) in c.iter().zip(&l2.basis) {
                if a.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(row) {
                    *x += a * y;
                }
            }
            v
        })
        .collect();
    Ok(QuadricSpace::from_rows(l2.genus, 2, l2.monomials.clone(), rows))
}

/// The spaces the sign search must preserve for a curve of genus `g`.
pub fn search_spaces(series: &[Vec<BigInt>]) -> Result<Vec<QuadricSpace>> {
    match series.len() {
        3 => Ok(vec![vanishing_forms(series, 4)?]),
        4 => Ok(vec![vanishing_forms(series, 2)?, vanishing_forms(series, 3)?]),
        _ => Ok(vec![vanishing_forms(series, 2)?]),
    }
}

/// A block-constant diagonal sign action `omega_k -> eps_k omega_k`, up to global sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    /// Signs with the first block at `+1`.
    pub epsilons: Vec<i8>,
    /// Blocks carrying `-1` in `epsilons`.
    pub minus_blocks: Vec<usize>,
    /// Block sets that may be the `+1` eigenspace: the window and forced blocks allow them.
    pub orientations: Vec<Vec<usize>>,
}

/// Every block-constant sign action preserving all `spaces`, with at least one
/// orientation whose plus-set dimension lies in `window` and contains `forced`.
pub fn sign_pattern_search(
    spaces: &[QuadricSpace],
    blocks: &[Range<usize>],
    window: (u64, u64),
    forced: &[usize],
) -> Vec<SignPattern> {
    let nb = blocks.len();
    let g = blocks.last().map_or(0, |b| b.end);
    let dim = |set: &[usize]| set.iter().map(|&b| blocks[b].len() as u64).sum::<u64>();
    let admissible = |plus: &[usize]| {
        let d = dim(plus);
        window.0 <= d && d <= window.1 && forced.iter().all(|f| plus.contains(f))
    };
    let mut out = Vec::new();
    if nb < 2 {
        return out;
    }
    // block 0 fixed at +1; mask ranges over the other blocks' minus choices
    for mask in 1u64..(1u64 << (nb - 1)) {
        let minus: Vec<usize> = (1..nb).filter(|b| mask >> (b - 1) & 1 == 1).collect();
        let plus: Vec<usize> = (0..nb).filter(|b| !minus.contains(b)).collect();
        let orientations: Vec<Vec<usize>> = [plus.clone(), minus.clone()]
            .into_iter()
            .filter(|s| admissible(s))
            .collect();
        if orientations.is_empty() {
            continue;
        }
        let mut eps = vec![1i8; g];
        for &b in &minus {
            for k in blocks[b].clone() {
                eps[k] = -1;
            }
        }
        if spaces.iter().all(|s| s.is_invariant(&eps)) {
            out.push(SignPattern { epsilons: eps, minus_blocks: minus, orientations });
        }
    }
    out
}

/// How a pattern's orientation was decided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Resolution {
    Resolved {
        g_u: usize,
        plus_blocks: Vec<usize>,
        /// Fixed points of the involution, when they were counted.
        fixed_points: Option<usize>,
        /// Set when the quotient differentials had to be tested directly.
        by_quotient_check: bool,
    },
    /// No orientation is consistent: the pattern is not an involution of the curve.
    Rejected { reason: String },
    Unresolved { reason: String },
}

/// Input for [`resolve_sign`].
pub struct SignContext<'a> {
    pub level: &'a SquarefreeLevel,
    pub blocks: &'a [Range<usize>],
    pub orbits: &'a [&'a NewformOrbit],
    /// `omega_1..omega_g` in block order.
    pub series: &'a [Vec<BigInt>],
    /// Equations cutting out the canonical curve.
    pub equations: &'a [Form],
    pub schedule: &'a [(u64, usize)],
}

/// Decides which side of a pattern is the `+1` eigenspace of `u^*`.
///
/// Orientations violating Hurwitz (`2g + 2 - 4 g_u < 0`) or the dominance
/// bound are dropped. If two remain, the fixed points on both eigenspaces are
/// counted and `g_u = (2g + 2 - #Fix) / 4` must match. A tie left after that
/// (both sides of the same dimension) is broken by asking the candidate
/// quotient differentials to behave like those of a curve of genus `g_u`.
pub fn resolve_sign(pattern: &SignPattern, ctx: &SignContext) -> Result<Resolution> {
    let g = ctx.blocks.last().map_or(0, |b| b.end);
    let dim = |set: &[usize]| set.iter().map(|&b| ctx.blocks[b].len()).sum::<usize>();
    let mut alive = Vec::new();
    for plus in &pattern.orientations {
        let g_u = dim(plus);
        if 4 * g_u > 2 * g + 2 {
            continue;
        }
        let candidate: Vec<&NewformOrbit> = plus.iter().map(|&b| ctx.orbits[b]).collect();
        if dominance(ctx.level, ctx.orbits, &candidate, ctx.schedule)?.excluded {
            continue;
        }
        alive.push(plus.clone());
    }
    if alive.is_empty() {
        return Ok(Resolution::Rejected {
            reason: "no orientation passes the Hurwitz and dominance tests".into(),
        });
    }
    let mut fixed = None;
    if countable(pattern, ctx.blocks) {
        let fix = fixed_points(pattern, ctx.equations, g)?;
        if 2 * g + 2 < fix || (2 * g + 2 - fix) % 4 != 0 {
            return Ok(Resolution::Rejected {
                reason: format!("{fix} fixed points is incompatible with Hurwitz for genus {g}"),
            });
        }
        let g_u = (2 * g + 2 - fix) / 4;
        alive.retain(|s| dim(s) == g_u);
        if alive.is_empty() {
            return Ok(Resolution::Rejected {
                reason: format!("{fix} fixed points give g_u = {g_u}, matching no orientation"),
            });
        }
        fixed = Some(fix);
    }
    let mut by_quotient_check = false;
    if alive.len() > 1 {
        by_quotient_check = true;
        let mut kept = Vec::new();
        for plus in alive {
            if quotient_consistent(ctx, &plus)? {
                kept.push(plus);
            }
        }
        alive = kept;
    }
    match alive.len() {
        0 => Ok(Resolution::Rejected {
            reason: "no orientation gives differentials of a quotient curve".into(),
        }),
        1 => Ok(Resolution::Resolved {
            g_u: dim(&alive[0]),
            plus_blocks: alive.remove(0),
            fixed_points: fixed,
            by_quotient_check,
        }),
        _ => Ok(Resolution::Unresolved {
            reason: "both orientations remain consistent".into(),
        }),
    }
}

/// Whether the plus-set differentials look like those of a genus-`g_u` curve:
/// a genus-2 model for `g_u = 2`, the canonical-ideal dimension for `g_u >= 3`.
fn quotient_consistent(ctx: &SignContext, plus: &[usize]) -> Result<bool> {
    let rows: Vec<Vec<BigInt>> = plus
        .iter()
        .flat_map(|&b| ctx.series[ctx.blocks[b].clone()].iter().cloned())
        .collect();
    let g = ctx.blocks.last().map_or(0, |b| b.end);
    match rows.len() {
        0 | 1 => Ok(true),
        2 => {
            let q: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
                .collect();
            let orbit = (plus.len() == 1).then(|| ctx.orbits[plus[0]]);
            Ok(match genus2_coordinates(&q, orbit) {
                Some((num, den)) => genus2_quotient_model(&num, &den, g).is_ok(),
                None => false,
            })
        }
        _ => Ok(quotient_petri_probe(&rows)?.0),
    }
}

fn countable(pattern: &SignPattern, blocks: &[Range<usize>]) -> bool {
    let g = blocks.last().map_or(0, |b| b.end);
    let minus = pattern.epsilons.iter().filter(|&&e| e < 0).count();
    minus <= 3 && g - minus <= 3
}

/// Points of the curve on the two eigenspaces of the pattern.
pub fn fixed_points(pattern: &SignPattern, equations: &[Form], g: usize) -> Result<usize> {
    let plus: Vec<usize> = (0..g).filter(|&k| pattern.epsilons[k] > 0).collect();
    let minus: Vec<usize> = (0..g).filter(|&k| pattern.epsilons[k] < 0).collect();
    Ok(subspace_points(equations, &plus)? + subspace_points(equations, &minus)?)
}

/// Points of `V(equations)` with the coordinates in `zero` equal to 0.
pub fn subspace_points(equations: &[Form], zero: &[usize]) -> Result<usize> {
    let g = equations
        .iter()
        .find_map(|f| f.first().map(|(e, _)| e.len()))
        .ok_or_else(|| Error::Precondition("no equations".into()))?;
    let restricted: Vec<Form> = equations.iter().map(|f| restrict(f, zero)).collect();
    count_projective_points(&restricted, g - zero.len())
}

/// Probe: does the candidate quotient basis have the `L_2`
/// (for `g_u = 3`, `L_4`) dimension of a canonical curve of genus `g_u`?
pub fn quotient_petri_probe(rows: &[Vec<BigInt>]) -> Result<(bool, usize)> {
    let g_u = rows.len();
    if g_u < 3 {
        return Err(Error::InvalidArgument(format!("quotient genus must be at least 3, got {g_u}")));
    }
    if g_u == 3 {
        let d = vanishing_forms(rows, 4)?.dim();
        return Ok((d == 1, d));
    }
    let d = vanishing_forms(rows, 2)?.dim();
    Ok((d == expected_quadric_dim(g_u), d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order() {
        let m = monomials(3, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0], vec![2, 0, 0]);
        assert_eq!(m[1], vec![1, 1, 0]);
        assert_eq!(m[5], vec![0, 0, 2]);
        assert_eq!(monomials(4, 3).len(), 20);
    }

    #[test]
    fn plane_conic_has_one_quadric() {
        // (t, t^2, t^3)/q style: omega = q, q^2, q^3 gives x1 x3 = x2^2; genus 2 is
        // never a canonical curve, so only the linear algebra is exercised here
        let rows: Vec<Vec<BigInt>> = (0..3)
            .map(|k| (0..20).map(|j| BigInt::from(i64::from(j == k))).collect())
            .collect();
        let l2 = vanishing_forms(&rows, 2).unwrap();
        assert_eq!(l2.dim(), 1);
        assert_eq!(l2.display_forms(), vec!["x1*x3 - x2^2".to_string()]);
        let ns = nonsquare_subspace(&l2).unwrap();
        assert_eq!(ns.dim(), 0);
        assert!(l2.is_invariant(&[1, -1, 1]));
        assert!(!l2.is_invariant(&[1, 1, -1]));
    }

    #[test]
    fn precision_is_enforced() {
        let rows: Vec<Vec<BigInt>> = (0..5).map(|_| vec![BigInt::from(1); 10]).collect();
        assert!(matches!(vanishing_forms(&rows, 2), Err(Error::Precision { need: 17, have: 10 })));
    }
}
