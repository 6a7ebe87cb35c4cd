//! Counting the common zeros over an algebraic closure of `Q` of homogeneous
//! forms in at most three variables.
//!
//! Two-variable affine systems are solved by projecting to `y` with a
//! resultant and computing gcds in `x` over `Q[y]/(T)`, splitting `T`
//! whenever a leading coefficient is a zero divisor.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{PolyRing, QPoly, Ring, QQ};

/// Sparse homogeneous form: exponent vectors with coefficients.
pub type Form = Vec<(Vec<u8>, BigRational)>;

/// Polynomial in `x` with coefficients in `Q[y]`.
type Bivar = Vec<QPoly>;

fn qq() -> PolyRing<QQ> {
    PolyRing::new(QQ)
}

fn qxy() -> PolyRing<PolyRing<QQ>> {
    PolyRing::new(qq())
}

/// Sets the variables in `zero` to 0 and drops them, keeping the order of the rest.
pub fn restrict(form: &Form, zero: &[usize]) -> Form {
    let mut out: Form = Vec::new();
    for (e, c) in form {
        if zero.iter().any(|&z| e[z] != 0) || c.is_zero() {
            continue;
        }
        let kept: Vec<u8> = e.iter().enumerate().filter(|(i, _)| !zero.contains(i)).map(|(_, &x)| x).collect();
        match out.iter_mut().find(|(k, _)| *k == kept) {
            Some((_, acc)) => *acc += c,
            None => out.push((kept, c.clone())),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

fn dehomogenize_binary(form: &Form) -> QPoly {
    // x^a y^b -> x^a at y = 1
    let mut p = Vec::new();
    for (e, c) in form {
        let a = e[0] as usize;
        if p.len() <= a {
            p.resize(a + 1, BigRational::zero());
        }
        p[a] += c;
    }
    qq().trim(p)
}

fn to_bivar(form: &Form) -> Bivar {
    // x^a y^b z^c -> x^a y^b at z = 1
    let r = qq();
    let mut p: Bivar = Vec::new();
    for (e, c) in form {
        let (a, b) = (e[0] as usize, e[1] as usize);
        if p.len() <= a {
            p.resize(a + 1, Vec::new());
        }
        p[a] = r.add(&p[a], &r.monomial(c.clone(), b));
    }
    qxy().trim(p)
}

/// Number of distinct common zeros in `P^{n-1}`, `n = nvars <= 3`.
pub fn count_projective_points(forms: &[Form], nvars: usize) -> Result<usize> {
    let forms: Vec<Form> = forms.iter().filter(|f| !f.is_empty()).cloned().collect();
    match nvars {
        0 => Ok(0),
        1 => Ok(usize::from(forms.iter().all(|f| f.iter().all(|(_, c)| c.is_zero())))),
        2 => count_p1(&forms),
        3 => {
            let at_infinity: Vec<Form> = forms.iter().map(|f| restrict(f, &[2])).collect();
            Ok(count_affine_plane(&forms)? + count_p1(&at_infinity)?)
        }
        _ => Err(Error::InvalidArgument(format!(
            "point counting supports at most 3 variables, got {nvars}"
        ))),
    }
}

fn count_p1(forms: &[Form]) -> Result<usize> {
    let forms: Vec<&Form> = forms.iter().filter(|f| !f.is_empty()).collect();
    if forms.is_empty() {
        return Err(Error::Precondition("no equations on a projective line".into()));
    }
    let r = qq();
    let mut g: QPoly = Vec::new();
    for f in &forms {
        g = r.gcd(&g, &dehomogenize_binary(f));
    }
    let affine = r.degree(&r.squarefree_part(&g)).unwrap_or(0);
    // (1 : 0) is a zero when no form contains a pure power of x
    let infinity = forms.iter().all(|f| {
        let d: u32 = f[0].0.iter().map(|&x| u32::from(x)).sum();
        f.iter().all(|(e, _)| u32::from(e[0]) != d)
    });
    if r.is_zero(&g) {
        return Err(Error::Precondition("forms vanish on the whole line".into()));
    }
    Ok(affine + usize::from(infinity))
}

/// Distinct common zeros in the affine chart `z = 1`.
fn count_affine_plane(forms: &[Form]) -> Result<usize> {
    let polys: Vec<Bivar> = forms.iter().map(to_bivar).filter(|p| !p.is_empty()).collect();
    if polys.is_empty() {
        return Err(Error::Precondition("no equations in the plane".into()));
    }
    if polys.iter().any(|p| p.len() == 1 && qq().degree(&p[0]) == Some(0)) {
        return Ok(0);
    }
    let t = projection(&polys)?;
    if qq().degree(&t).unwrap_or(0) == 0 {
        return Ok(0);
    }
    let mut total = 0;
    for (tk, gk) in gcd_mod(t, polys) {
        if qxy().degree(&gk).unwrap_or(0) == 0 {
            continue;
        }
        let dg = derivative_x(&gk);
        for (tj, hj) in gcd_mod(tk.clone(), vec![gk.clone(), dg]) {
            let distinct = qxy().degree(&gk).unwrap_or(0) - qxy().degree(&hj).unwrap_or(0);
            total += qq().degree(&tj).unwrap_or(0) * distinct;
        }
    }
    Ok(total)
}

fn derivative_x(p: &Bivar) -> Bivar {
    let r = qq();
    qxy().trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| r.scale(c, &BigRational::from_integer((i as i64).into())))
            .collect(),
    )
}

/// Squarefree polynomial in `y` vanishing at the `y`-coordinate of every common zero.
fn projection(polys: &[Bivar]) -> Result<QPoly> {
    let r = qq();
    let rx = qxy();
    let combos: Vec<Bivar> = if polys.len() == 1 {
        vec![polys[0].clone()]
    } else {
        // two fixed integer combinations with distinct weights
        let mut a: Bivar = Vec::new();
        let mut b: Bivar = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            let wa = r.constant(BigRational::from_integer(((i + 1) as i64).into()));
            let wb = r.constant(BigRational::from_integer((((i + 2) * (i + 2) + 3 * i) as i64).into()));
            a = rx.add(&a, &rx.scale(p, &wa));
            b = rx.add(&b, &rx.scale(p, &wb));
        }
        vec![a, b]
    };
    if combos.len() == 1 {
        return Err(Error::Precondition("a single plane curve has infinitely many points".into()));
    }
    let mut res = resultant_x(&combos[0], &combos[1]);
    if r.is_zero(&res) {
        // the curves share a component unless some other pair separates them
        let mut found = None;
        'outer: for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let c = resultant_x(&polys[i], &polys[j]);
                if !r.is_zero(&c) {
                    found = Some(c);
                    break 'outer;
                }
            }
        }
        match found {
            Some(c) => res = c,
            None => return Err(Error::Precondition("system is not zero-dimensional".into())),
        }
    }
    // zeros where both leading coefficients in x vanish are kept; extras are filtered later
    Ok(r.squarefree_part(&res))
}

fn resultant_x(a: &Bivar, b: &Bivar) -> QPoly {
    let rx = qxy();
    let (da, db) = (rx.degree(a), rx.degree(b));
    match (da, db) {
        (None, _) | (_, None) => Vec::new(),
        (Some(0), Some(0)) => qq().one(),
        (Some(0), Some(n)) => qq().pow(&a[0], n as u32),
        (Some(m), Some(0)) => qq().pow(&b[0], m as u32),
        _ => rx.resultant(a, b),
    }
}

fn reduce(t: &QPoly, p: &Bivar) -> Bivar {
    let r = qq();
    qxy().trim(p.iter().map(|c| r.rem(c, t)).collect())
}

enum Lead {
    Unit(QPoly),
    Zero,
    Split(QPoly, QPoly),
}

/// Classifies `c` modulo the squarefree `t`: invertible (with inverse), zero, or a zero divisor.
fn classify(t: &QPoly, c: &QPoly) -> Lead {
    let r = qq();
    let c = r.rem(c, t);
    if r.is_zero(&c) {
        return Lead::Zero;
    }
    let (g, s, _) = r.xgcd(&c, t);
    if r.degree(&g) == Some(0) {
        return Lead::Unit(r.rem(&s, t));
    }
    let (other, _) = r.div_rem(t, &g);
    Lead::Split(g, other)
}

/// Gcd in `x` of `polys` over `Q[y]/(t)`, one monic result per factor of `t` found.
fn gcd_mod(t: QPoly, polys: Vec<Bivar>) -> Vec<(QPoly, Bivar)> {
    let r = qq();
    let rx = qxy();
    let mut out = Vec::new();
    let mut stack = vec![(t, polys)];
    'task: while let Some((t, polys)) = stack.pop() {
        if r.degree(&t).unwrap_or(0) == 0 {
            continue;
        }
        let mut polys: Vec<Bivar> = polys.iter().map(|p| reduce(&t, p)).collect();
        let mut g: Bivar = Vec::new();
        while let Some(next) = polys.pop() {
            let mut a = g;
            let mut b = next;
            loop {
                // make the leading coefficient of b a unit
                let inv = loop {
                    let Some(d) = rx.degree(&b) else { break None };
                    match classify(&t, &b[d]) {
                        Lead::Unit(inv) => break Some(inv),
                        Lead::Zero => {
                            b.truncate(d);
                            b = rx.trim(b);
                        }
                        Lead::Split(t1, t2) => {
                            let mut rest = polys.clone();
                            rest.push(a.clone());
                            rest.push(b.clone());
                            stack.push((t1, rest.clone()));
                            stack.push((t2, rest));
                            continue 'task;
                        }
                    }
                };
                let Some(inv) = inv else { break };
                b = reduce(&t, &rx.scale(&b, &inv));
                // a mod b with b monic
                let db = rx.degree(&b).expect("nonzero");
                let mut rem = a.clone();
                while let Some(da) = rx.degree(&rem) {
                    if da < db {
                        break;
                    }
                    let c = rem[da].clone();
                    for (i, bc) in b.iter().enumerate() {
                        rem[da - db + i] = r.rem(&r.sub(&rem[da - db + i], &r.mul(&c, bc)), &t);
                    }
                    rem = rx.trim(rem);
                }
                a = b;
                b = rem;
                // strip leading coefficients that vanish mod t before the next division
                b = reduce(&t, &b);
                if rx.is_zero(&b) {
                    break;
                }
            }
            g = a;
        }
        out.push((t, g));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(terms: &[(&[u8], i64)]) -> Form {
        terms
            .iter()
            .map(|(e, c)| (e.to_vec(), BigRational::from_integer((*c).into())))
            .collect()
    }

    #[test]
    fn two_conics_meet_in_four_points() {
        // x^2 - z^2, y^2 - 4 z^2: (+-1, +-2, 1)
        let a = f(&[(&[2, 0, 0], 1), (&[0, 0, 2], -1)]);
        let b = f(&[(&[0, 2, 0], 1), (&[0, 0, 2], -4)]);
        assert_eq!(count_projective_points(&[a, b], 3).unwrap(), 4);
    }

    #[test]
    fn irrational_and_infinite_points() {
        // x^2 - 2 z^2 and y z: y = 0 gives (+-sqrt 2, 0, 1); z = 0 gives (0, 1, 0)
        let a = f(&[(&[2, 0, 0], 1), (&[0, 0, 2], -2)]);
        let b = f(&[(&[0, 1, 1], 1)]);
        assert_eq!(count_projective_points(&[a, b], 3).unwrap(), 3);
    }

    #[test]
    fn tangent_conics_count_distinct() {
        // y z - x^2 and y^2 meet only at (0 : 0 : 1), with multiplicity 4
        let a = f(&[(&[0, 1, 1], 1), (&[2, 0, 0], -1)]);
        let b = f(&[(&[0, 2, 0], 1)]);
        assert_eq!(count_projective_points(&[a, b], 3).unwrap(), 1);
    }

    #[test]
    fn zero_divisor_splitting() {
        // y^2 = z^2 and x y z - x z^2 + x^2 y + x^2 z: affine (0, 1), (0, -1); at infinity (1 : 0 : 0)
        let a = f(&[(&[0, 2, 0], 1), (&[0, 0, 2], -1)]);
        let b = f(&[(&[1, 1, 1], 1), (&[1, 0, 2], -1), (&[2, 1, 0], 1), (&[2, 0, 1], 1)]);
        assert_eq!(count_projective_points(&[a, b], 3).unwrap(), 3);
    }

    #[test]
    fn binary_forms() {
        // x y (x - y) and x y: points (1:0), (0:1)
        let a = f(&[(&[2, 1], 1), (&[1, 2], -1)]);
        let b = f(&[(&[1, 1], 1)]);
        assert_eq!(count_projective_points(&[a, b], 2).unwrap(), 2);
        // x^2 + y^2 alone: two conjugate points
        let c = f(&[(&[2, 0], 1), (&[0, 2], 1)]);
        assert_eq!(count_projective_points(&[c], 2).unwrap(), 2);
        assert!(count_projective_points(&[], 4).is_err());
    }

    #[test]
    fn restriction_drops_variables() {
        let q = f(&[(&[1, 1, 0], 2), (&[0, 1, 1], 3), (&[0, 0, 2], 1)]);
        let r = restrict(&q, &[0]);
        assert_eq!(r, f(&[(&[1, 1], 3), (&[0, 2], 1)]));
    }
}
