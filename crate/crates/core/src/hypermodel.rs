//! Hyperelliptic detection from q-expansions of differentials and model fitting.
//!
//! With an echelon basis `f_1, ..., f_g` of the differentials (`f_i dq/q`),
//! put `x = f_{g-1}/f_g` and `y = q dx/dq / f_g`. The curve is hyperelliptic
//! exactly when the leading exponents are `1..g` or `1, 3, ..., 2g-1` and
//! `y^2 = P(x)` for a squarefree `P` of degree `2g+2` or `2g+1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::criteria::{parity_places, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::frobenius::point_count;
use crate::genus::hyp2_candidates;
use crate::linalg::{p_saturate, rref, solve, Matrix};
use crate::nfdata::{FixtureStore, NewformOrbit};
use crate::arith::SquarefreeLevel;
use crate::poly::{Field, Fp, PolyRing, QQ};
use crate::series::{Laurent, SeriesRing};

/// Coefficient field of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", content = "p", rename_all = "lowercase")]
pub enum Base {
    Rational,
    Prime(u64),
}

/// `y^2 = P(x)`; `poly[k]` is the coefficient of `x^k` (reduced residues over `F_p`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticModel {
    pub base: Base,
    pub poly: Vec<BigRational>,
    pub genus: usize,
    pub weierstrass_at_infinity: bool,
}

impl HyperellipticModel {
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// `X^6 - 6*X^5 + ...` with descending powers.
    pub fn display(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.poly.iter().enumerate().rev() {
            if c == &BigRational::from_integer(0.into()) {
                continue;
            }
            let neg = c < &BigRational::from_integer(0.into());
            let abs = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let one = abs == BigRational::from_integer(1.into());
            match k {
                0 => out.push_str(&abs.to_string()),
                _ => {
                    if !one {
                        out.push_str(&format!("{abs}*"));
                    }
                    out.push('X');
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        out
    }
}

/// Result of [`hyp_test_modp`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum HypOutcome {
    Hyperelliptic { model: HyperellipticModel },
    NotHyperelliptic { reason: String },
}

impl HypOutcome {
    pub fn is_hyperelliptic(&self) -> bool {
        matches!(self, HypOutcome::Hyperelliptic { .. })
    }
}

/// Ambient q-terms needed before a fitted relation counts as proved.
pub fn model_precision(g: usize) -> usize {
    8 * g + 8
}

/// Leading exponents `(1..g)` give `false`, `(1, 3, .., 2g-1)` give `true`.
fn gap_shape(leading: &[usize]) -> Option<bool> {
    if leading.iter().enumerate().all(|(i, &e)| e == i + 1) {
        Some(false)
    } else if leading.iter().enumerate().all(|(i, &e)| e == 2 * i + 1) {
        Some(true)
    } else {
        None
    }
}

/// Fits `y^2 = sum c_k x^k`, `k <= deg_max`, with `x = num/den`, `y = q dx/dq / den`.
/// Rows are coefficients of `q^1, q^2, ...`. Returns `None` when no relation holds
/// on all known coefficients.
fn fit<F: Field + Clone>(f: &F, num: &[F::E], den: &[F::E], deg_max: usize) -> Option<Vec<F::E>> {
    let s = SeriesRing::new(f.clone());
    let a = Laurent::from_coeffs(num.to_vec(), 1);
    let b = Laurent::from_coeffs(den.to_vec(), 1);
    let x = s.div(&a, &b)?;
    let y = s.div(&s.theta(&x), &b)?;
    let y2 = s.mul(&y, &y);
    let mut powers = vec![Laurent { val: 0, coeffs: vec![f.one()], prec: x.prec - x.val }];
    for _ in 0..deg_max {
        let last = powers.last().expect("nonempty");
        powers.push(s.mul(last, &x));
    }
    let lo = powers.iter().map(|p| p.val).chain([y2.val]).min()?;
    let hi = powers.iter().map(|p| p.prec).chain([y2.prec]).min()?;
    if hi <= lo {
        return None;
    }
    let rows: Matrix<F::E> = (lo..hi)
        .map(|n| powers.iter().map(|p| if n < p.val { f.zero() } else { p.coeff(f, n) }).collect())
        .collect();
    let rhs: Vec<F::E> = (lo..hi).map(|n| if n < y2.val { f.zero() } else { y2.coeff(f, n) }).collect();
    // more equations than unknowns by a margin, or the relation proves nothing
    if rows.len() < deg_max + 1 + 4 {
        return None;
    }
    solve(f, &rows, &rhs).map(|c| PolyRing::new(f.clone()).trim(c))
}

fn squarefree<F: Field + Clone>(f: &F, p: &[F::E]) -> bool {
    let r = PolyRing::new(f.clone());
    r.degree(&r.gcd(p, &r.derivative(p))) == Some(0)
}

/// Hyperelliptic test of the reduction mod an odd prime `p`.
///
/// `rows` is an integral basis of the differentials; it is `p`-saturated first
/// so that its reduction spans the differentials of the curve over `F_p`.
pub fn hyp_test_modp(rows: &[Vec<BigInt>], p: u64) -> Result<HypOutcome> {
    if p == 2 {
        return Err(Error::InvalidArgument("the hyperelliptic test needs odd characteristic".into()));
    }
    let g = rows.len();
    if g < 2 {
        return Err(Error::InvalidArgument(format!("genus must be at least 2, got {g}")));
    }
    let have = rows.iter().map(Vec::len).min().unwrap_or(0);
    if have < model_precision(g) {
        return Err(Error::Precision { need: model_precision(g), have });
    }
    let fp = Fp::new(p);
    let sat = p_saturate(rows.to_vec(), p);
    let mut m: Matrix<u64> = sat.iter().map(|r| r.iter().map(|x| fp.from_bigint(x)).collect()).collect();
    let pivots = rref(&fp, &mut m);
    if pivots.len() < g {
        return Err(Error::Precondition(format!("basis has rank {} < {g} mod {p}", pivots.len())));
    }
    let leading: Vec<usize> = pivots.iter().map(|c| c + 1).collect();
    let Some(weierstrass) = gap_shape(&leading) else {
        return Ok(HypOutcome::NotHyperelliptic { reason: format!("leading exponents {leading:?}") });
    };
    let Some(c) = fit(&fp, &m[g - 2], &m[g - 1], 2 * g + 2) else {
        return Ok(HypOutcome::NotHyperelliptic { reason: "no relation y^2 = P(x)".into() });
    };
    let want = if weierstrass { 2 * g + 1 } else { 2 * g + 2 };
    if c.len() != want + 1 || !squarefree(&fp, &c) {
        return Ok(HypOutcome::NotHyperelliptic {
            reason: format!("relation of degree {} is not a squarefree degree-{want} model", c.len().saturating_sub(1)),
        });
    }
    Ok(HypOutcome::Hyperelliptic {
        model: HyperellipticModel {
            base: Base::Prime(p),
            poly: c.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
            genus: g,
            weierstrass_at_infinity: weierstrass,
        },
    })
}

/// Necessary condition for a hyperelliptic reduction: `|X(F_{p^n})| <= 2 p^n + 2`
/// for `n = 1..=max_n`. Returns the first violating `n`.
pub fn hyperelliptic_prefilter(orbits: &[&NewformOrbit], p: u64, max_n: usize) -> Result<Option<usize>> {
    for n in 1..=max_n {
        let c = point_count(orbits, p, n)?;
        if c > BigInt::from(2) * BigInt::from(p).pow(n as u32) + 2 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `Y^2 = P(X)` over `Q` for a genus-2 quotient with differentials `num, den`,
/// `X = num/den`, `Y = q dX/dq / den`.
pub fn genus2_quotient_model(num: &[BigRational], den: &[BigRational], ambient_genus: usize) -> Result<HyperellipticModel> {
    let need = model_precision(ambient_genus).max(model_precision(2));
    let have = num.len().min(den.len());
    if have < need {
        return Err(Error::Precision { need, have });
    }
    let c = fit(&QQ, num, den, 6).ok_or_else(|| Error::Contradiction("no sextic relation between the quotient differentials".into()))?;
    let deg = c.len().saturating_sub(1);
    if !(deg == 5 || deg == 6) || !squarefree(&QQ, &c) {
        return Err(Error::Contradiction(format!("fitted relation of degree {deg} is not a genus-2 model")));
    }
    Ok(HyperellipticModel {
        base: Base::Rational,
        poly: c,
        genus: 2,
        weierstrass_at_infinity: deg == 5,
    })
}

/// Rows of `q^1, q^2, ...` in reduced echelon form with leading exponents 1 and 2.
pub fn echelon_pair(rows: &[Vec<BigRational>]) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    if rows.len() != 2 {
        return None;
    }
    let mut m = rows.to_vec();
    let pivots = rref(&QQ, &mut m);
    if pivots != [0, 1] {
        return None;
    }
    let den = m.pop()?;
    Some((m.pop()?, den))
}

/// The pair `(X numerator, X denominator)` for a genus-2 quotient spanned by `rows`.
///
/// When `rows` are the lifts of one two-dimensional orbit's echelon basis
/// `b1 = q + O(q^3)`, `b2 = q^2 + ...`, the newform is `b1 + a_2 b2` and the
/// numerator is the lift of half its Galois trace `b1 + (t/2) b2`, `t = tr a_2`.
/// Otherwise the echelon form of the rows is used.
pub fn genus2_coordinates(rows: &[Vec<BigRational>], orbit: Option<&NewformOrbit>) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let half_trace = orbit
        .filter(|o| o.dim == 2 && rows.len() == 2 && o.level.value() % 2 != 0)
        .filter(|o| o.q_basis[0].get(..2) == Some(&[BigInt::from(1), BigInt::from(0)][..]))
        .and_then(|o| o.ap_charpoly.get(&2))
        .map(|c| BigRational::new(-c[1].clone(), BigInt::from(2)));
    match half_trace {
        Some(h) => {
            let num = rows[0].iter().zip(&rows[1]).map(|(x, y)| x + &h * y).collect();
            Some((num, rows[1].clone()))
        }
        None => echelon_pair(rows),
    }
}

/// Largest `m` tried when looking for too many points over `F_{2^m}`.
pub const MOD2_MAX_M: u32 = 6;

/// One row of the mod-2 screen over the Ogg-bound candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mod2Row {
    pub level: u64,
    /// First `m` with `A = |X(F_{2^m})| - 2 (2^m + 1) > 0`, and that `A`.
    pub excess: Option<(u32, i64)>,
    /// Set when no excess was found and the parity criterion at 2 fires.
    pub parity_excluded: bool,
}

/// Mod-2 screen of a single odd level with `g* > 2`.
///
/// A double cover of the line has at most `2 (2^m + 1)` points over `F_{2^m}`;
/// a level with no involution mod 2 (parity criterion) is cleared as well.
pub fn mod2_screen_level(level: &SquarefreeLevel, orbits: &[&NewformOrbit]) -> Result<Mod2Row> {
    let mut excess = None;
    for m in 1..=MOD2_MAX_M {
        let count = point_count(orbits, 2, m as usize)?;
        let bound = BigInt::from(2) * (BigInt::from(2).pow(m) + 1);
        if count > bound {
            let a: i64 = (count - bound)
                .try_into()
                .map_err(|_| Error::Contradiction("point count overflow".into()))?;
            excess = Some((m, a));
            break;
        }
    }
    let parity_excluded = excess.is_none() && parity_places(level, orbits, 2, DEFAULT_K_MAX)?.excluded;
    Ok(Mod2Row { level: level.value(), excess, parity_excluded })
}

impl Mod2Row {
    pub fn survives(&self) -> bool {
        self.excess.is_none() && !self.parity_excluded
    }
}

/// Levels whose reduction mod 2 may be hyperelliptic, with the per-level record.
pub fn mod2_hyperelliptic_screen(store: &FixtureStore) -> Result<(Vec<u64>, Vec<Mod2Row>)> {
    let mut rows = Vec::new();
    let mut survivors = Vec::new();
    for n in hyp2_candidates()? {
        let level = SquarefreeLevel::new(n)?;
        let orbits = store.load_orbits(&level)?;
        let refs: Vec<&NewformOrbit> = orbits.iter().collect();
        let row = mod2_screen_level(&level, &refs)?;
        if row.survives() {
            survivors.push(n);
        }
        rows.push(row);
    }
    Ok((survivors, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
    }

    /// Differentials `dx/y, x dx/y` of `y^2 = P(x)` in the parameter `t = 1/x` at a
    /// non-Weierstrass point at infinity, with `q = t` after rescaling: returns
    /// rows for `f_1 = x dx/y`, `f_2 = dx/y` as coefficients of `t^1, t^2, ...`.
    fn genus2_rows(p: &[i64], len: usize) -> (Vec<BigRational>, Vec<BigRational>) {
        // y = x^3 sqrt(P(x)/x^6) = t^{-3} s(t), s(t)^2 = sum p_k t^{6-k}, s(0) = 1
        let r = QQ;
        let mut u = vec![BigRational::from_integer(0.into()); len + 2];
        for (k, &c) in p.iter().enumerate() {
            u[6 - k] = BigRational::from_integer(c.into());
        }
        // s = sqrt(u) with u(0) = 1
        let mut s = vec![BigRational::from_integer(0.into()); len + 2];
        s[0] = BigRational::from_integer(1.into());
        for n in 1..len + 2 {
            let mut acc = u[n].clone();
            for i in 1..n {
                acc -= &s[i] * &s[n - i];
            }
            s[n] = acc / BigRational::from_integer(2.into());
        }
        // dx/y = -t^{-2} dt / (t^{-3} s) = -t / s dt = -(t^2 / s) dt/t
        let inv = SeriesRing::new(r).inv(&Laurent::from_coeffs(s.clone(), 0)).unwrap();
        let mut den = vec![BigRational::from_integer(0.into()); len];
        for (i, c) in inv.coeffs.iter().enumerate() {
            if i + 1 < len {
                den[i + 1] = -c.clone();
            }
        }
        // x dx/y = -(t / s) dt/t
        let mut num = vec![BigRational::from_integer(0.into()); len];
        for (i, c) in inv.coeffs.iter().enumerate() {
            if i < len {
                num[i] = -c.clone();
            }
        }
        (num, den)
    }

    #[test]
    fn recovers_a_sextic() {
        // with q = t: x = f_1/f_2 = 1/t, y = q dx/dq / f_2 = (-1/t) / (-t^2/s) ... = s / t^3
        let p = [4, 12, 20, 0, 8, 0, 1];
        let (num, den) = genus2_rows(&p, 40);
        let m = genus2_quotient_model(&num, &den, 2).unwrap();
        assert_eq!(m.poly, qv(&p));
        assert!(!m.weierstrass_at_infinity);
        assert_eq!(m.display(), "X^6 + 8*X^4 + 20*X^2 + 12*X + 4");
    }

    #[test]
    fn gap_shapes() {
        assert_eq!(gap_shape(&[1, 2, 3]), Some(false));
        assert_eq!(gap_shape(&[1, 3, 5]), Some(true));
        assert_eq!(gap_shape(&[1, 2, 4]), None);
    }

    #[test]
    fn modp_rejects_two() {
        assert!(hyp_test_modp(&[vec![BigInt::from(1)]], 2).is_err());
    }
}
