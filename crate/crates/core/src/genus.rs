//! Genus formulas for X0(N) and X0*(N), the comparison of X0*(N) with
//! X0*(2N), and the level enumerations driven by point-count bounds.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{dedekind_psi, is_prime, primes_up_to, three_adic_valuation, SquarefreeLevel};
use crate::classnum::nu;
use crate::error::{Error, Result};

type Q64 = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusPair {
    pub level: SquarefreeLevel,
    pub g: u64,
    pub g_star: u64,
}

impl GenusPair {
    pub fn new(level: &SquarefreeLevel) -> Result<Self> {
        Ok(Self {
            level: level.clone(),
            g: genus_x0(level)?,
            g_star: genus_x0_star(level)?,
        })
    }
}

fn exact_nonneg(level: u64, r: Q64) -> Result<u64> {
    if !r.is_integer() || r.is_negative() {
        return Err(Error::Contradiction(format!(
            "genus formula for level {level} produced {r}"
        )));
    }
    Ok(r.to_integer() as u64)
}

fn genus_x0_rational(n: &SquarefreeLevel) -> Result<Q64> {
    if n.value() == 1 {
        return Err(Error::InvalidLevel(1, "genus formulas need N > 1"));
    }
    let odd = n.odd_part();
    let primes = odd.primes();
    let k = primes.len() as u32;
    let psi = dedekind_psi(&odd) as i64;
    let nu2 = if primes.iter().any(|&p| p % 4 == 3) { 0 } else { 1i64 << k };
    let g = if n.is_odd() {
        let v3 = three_adic_valuation(n.value());
        let nu3 = if primes.iter().any(|&p| p % 3 == 2) { 0 } else { 1i64 << (k - v3) };
        Q64::from_integer(1) + Q64::new(psi, 12) - Q64::new(nu2, 4) - Q64::new(nu3, 3)
            - Q64::new(1i64 << k, 2)
    } else {
        Q64::from_integer(1) + Q64::new(psi, 4) - Q64::new(nu2, 4) - Q64::from_integer(1i64 << k)
    };
    Ok(g)
}

/// Genus of X0(N), with separate odd and even branches.
pub fn genus_x0(n: &SquarefreeLevel) -> Result<u64> {
    exact_nonneg(n.value(), genus_x0_rational(n)?)
}

/// Sum of `nu(N, d)` over the divisors `1 < d | N`.
pub fn fixed_point_sum(n: &SquarefreeLevel) -> Result<u64> {
    n.divisors()
        .into_iter()
        .filter(|&d| d > 1)
        .map(|d| nu(n, d).map(|c| c.count))
        .sum()
}

/// Genus of X0*(N) = X0(N)/B(N) by Riemann-Hurwitz over the whole group.
pub fn genus_x0_star(n: &SquarefreeLevel) -> Result<u64> {
    let g = genus_x0_rational(n)?;
    let k = n.omega();
    let total = fixed_point_sum(n)? as i64;
    let gs = Q64::one() + (g - Q64::one()) / Q64::from_integer(1i64 << k)
        - Q64::new(total, 1i64 << (k + 1));
    exact_nonneg(n.value(), gs)
}

/// `g*(2N) - 2 g*(N)` for odd `N > 1`.
pub fn delta_2n(n: &SquarefreeLevel) -> Result<i64> {
    if !n.is_odd() {
        return Err(Error::InvalidLevel(n.value(), "delta_2n needs an odd level"));
    }
    if n.value() == 1 {
        return Err(Error::InvalidLevel(1, "delta_2n needs N > 1"));
    }
    let two_n = SquarefreeLevel::new(2 * n.value())?;
    Ok(genus_x0_star(&two_n)? as i64 - 2 * genus_x0_star(n)? as i64)
}

/// Odd square-free levels `N > 2` with `g*(N) > 2`, split by `g*(2N) - 2 g*(N)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaLists {
    pub minus_one: Vec<u64>,
    pub zero: Vec<u64>,
    pub plus_one: Vec<u64>,
    pub plus_two: Vec<u64>,
    /// Levels with delta above 2 (must stay empty).
    pub above_two: Vec<u64>,
}

/// Scans odd square-free `N <= limit` with `g*(N) > min_genus`.
pub fn delta_lists(limit: u64, min_genus: u64) -> Result<DeltaLists> {
    let mut out = DeltaLists::default();
    for n in (3..=limit).step_by(2) {
        let Ok(level) = SquarefreeLevel::new(n) else { continue };
        if genus_x0_star(&level)? <= min_genus {
            continue;
        }
        match delta_2n(&level)? {
            -1 => out.minus_one.push(n),
            0 => out.zero.push(n),
            1 => out.plus_one.push(n),
            2 => out.plus_two.push(n),
            d if d > 2 => out.above_two.push(n),
            _ => {}
        }
    }
    Ok(out)
}

/// Closed rational interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    /// Product of two intervals of positive numbers.
    fn mul_pos(&self, o: &Self) -> Self {
        debug_assert!(self.lo.is_positive() && o.lo.is_positive());
        Self {
            lo: &self.lo * &o.lo,
            hi: &self.hi * &o.hi,
        }
    }

    fn scale(&self, c: &BigRational) -> Self {
        debug_assert!(c.is_positive());
        Self {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }
}

/// Outward-rounded enclosure of `sqrt(x)` for `x >= 0`, with denominator `10^digits`.
pub fn sqrt_enclosure(x: &Interval, digits: u32) -> Interval {
    let scale = BigInt::from(10u32).pow(digits);
    let s2 = &scale * &scale;
    let lo_num = (x.lo.numer() * &s2) / x.lo.denom(); // floor for x >= 0
    let lo = lo_num.sqrt();
    let hi_num = (x.hi.numer() * &s2 + x.hi.denom() - 1u32) / x.hi.denom(); // ceil
    let mut hi = hi_num.sqrt();
    if &hi * &hi < hi_num {
        hi += 1u32;
    }
    Interval {
        lo: BigRational::new(lo, scale.clone()),
        hi: BigRational::new(hi, scale),
    }
}

/// Rational enclosure of `1/pi`, width below `1e-9`.
pub fn inv_pi_enclosure() -> Interval {
    // 103993/33102 < pi < 104348/33215
    Interval {
        lo: BigRational::new(33215.into(), 104348.into()),
        hi: BigRational::new(33102.into(), 103993.into()),
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Enclosure of `(10/(3 pi)) (prod (2 + p^{3/4})/(1+p) + 3 prod (2 + p^{1/2})/(1+p)) - 1/12`.
pub fn search_bound_enclosure(primes: &[u64], digits: u32) -> Interval {
    let mut a = Interval::point(BigRational::one());
    let mut b = Interval::point(BigRational::one());
    for &p in primes {
        let pi = Interval::point(BigRational::from_integer(p.into()));
        let r2 = sqrt_enclosure(&pi, digits);
        let r4 = sqrt_enclosure(&pi.mul_pos(&r2), digits);
        let two = Interval::point(rat(2, 1));
        let inv = rat(1, p as i64 + 1);
        a = a.mul_pos(&two.add(&r4).scale(&inv));
        b = b.mul_pos(&two.add(&r2).scale(&inv));
    }
    let sum = a.add(&b.scale(&rat(3, 1)));
    let lhs = sum.mul_pos(&inv_pi_enclosure()).scale(&rat(10, 3));
    Interval {
        lo: lhs.lo - rat(1, 12),
        hi: lhs.hi - rat(1, 12),
    }
}

/// True iff the search-bound inequality is certified to hold (the enclosure
/// lies strictly below zero) for the distinct odd primes `primes`.
pub fn delta_search_bound(primes: &[u64]) -> Result<bool> {
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("repeated prime".into()));
    }
    if sorted.iter().any(|&p| p % 2 == 0 || !is_prime(p)) {
        return Err(Error::InvalidArgument("primes must be odd primes".into()));
    }
    let tol = rat(1, 1_000_000);
    for digits in [12u32, 24, 48] {
        let e = search_bound_enclosure(&sorted, digits);
        if e.hi.is_negative() {
            return Ok(true);
        }
        if !e.lo.is_negative() {
            return Ok(false);
        }
        if e.width() < tol && digits >= 48 {
            break;
        }
    }
    Ok(false)
}

/// The partial order on odd square-free integers: fewer primes, each no larger.
pub fn precedes(n: &SquarefreeLevel, m: &SquarefreeLevel) -> bool {
    let (a, b) = (n.primes(), m.primes());
    a.len() <= b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// One of the eight `omega`-by-`omega` clauses that certify the bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundClause {
    pub omega: usize,
    /// Certified when the smallest prime is at least this.
    pub min_smallest: Option<u64>,
    /// Certified when the largest prime exceeds this.
    pub largest_above: Option<u64>,
    /// Minimal elements under [`precedes`] at which the inequality was checked.
    pub witnesses: Vec<Vec<u64>>,
    pub certified: bool,
}

/// The clauses `omega >= 8`, `omega = 7: p1 >= 5 or p7 > 73`, …, `omega = 1: p1 > 54277`.
pub const BOUND_CLAUSES: [(usize, Option<u64>, Option<u64>); 8] = [
    (8, None, None),
    (7, Some(5), Some(73)),
    (6, Some(7), Some(569)),
    (5, Some(13), Some(3373)),
    (4, Some(23), Some(16573)),
    (3, Some(53), Some(37993)),
    (2, Some(269), Some(63737)),
    (1, None, Some(54277)),
];

fn odd_primes_from(start: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = start.max(3);
    while out.len() < count {
        if is_prime(p) {
            out.push(p);
        }
        p += 1;
    }
    out
}

/// Checks every clause at its minimal elements. By monotonicity of
/// `(2 + x^a)/(1 + x)` for `x >= 3` the inequality then holds above them.
pub fn certify_bound_clauses() -> Result<Vec<BoundClause>> {
    let mut out = Vec::new();
    for (omega, min_smallest, largest_above) in BOUND_CLAUSES {
        let mut witnesses = Vec::new();
        if min_smallest.is_none() && largest_above.is_none() {
            witnesses.push(odd_primes_from(3, omega));
        }
        if let Some(a) = min_smallest {
            witnesses.push(odd_primes_from(a, omega));
        }
        if let Some(b) = largest_above {
            let mut w = odd_primes_from(3, omega - 1);
            w.extend(odd_primes_from(b + 1, 1));
            witnesses.push(w);
        }
        let mut certified = true;
        for w in &witnesses {
            certified &= delta_search_bound(w)?;
        }
        out.push(BoundClause {
            omega,
            min_smallest,
            largest_above,
            witnesses,
            certified,
        });
    }
    Ok(out)
}

/// True when some clause covers `n`, i.e. `delta_2n(n) < -1` follows from the bound.
pub fn covered_by_bound_clauses(n: &SquarefreeLevel) -> bool {
    let ps = n.primes();
    let omega = ps.len();
    if omega == 0 {
        return false;
    }
    BOUND_CLAUSES.iter().any(|&(w, a, b)| {
        if w == 8 {
            return omega >= 8;
        }
        omega == w
            && (a.is_some_and(|a| ps[0] >= a) || b.is_some_and(|b| ps[omega - 1] > b))
    })
}

/// Odd square-free `N >= 3` with `psi(N) <= 2^omega(N) * factor`.
fn odd_levels_under_psi_bound(factor: u64) -> Vec<SquarefreeLevel> {
    // psi(N) / 2^omega = prod (p+1)/2 with each factor >= 2, so omega and N are bounded
    let mut max_omega = 0u32;
    let mut prod = 1u64;
    for p in primes_up_to(1000).into_iter().skip(1) {
        if prod * (p + 1) / 2 > factor {
            break;
        }
        prod = prod * (p + 1) / 2;
        max_omega += 1;
    }
    let limit = factor << max_omega;
    (3..=limit)
        .step_by(2)
        .filter_map(|n| SquarefreeLevel::new(n).ok())
        .filter(|l| dedekind_psi(l) <= factor << l.omega())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GonalityCandidates {
    /// All odd square-free levels passing the bound.
    pub raw: Vec<u64>,
    /// `raw` minus primes and levels with `g* <= 3`.
    pub filtered: Vec<u64>,
}

/// Odd levels allowed by `psi(N) <= 2^omega(N) * 348`.
pub fn gonality_candidates() -> Result<GonalityCandidates> {
    let raw = odd_levels_under_psi_bound(348);
    let mut filtered = Vec::new();
    for l in &raw {
        if l.omega() > 1 && genus_x0_star(l)? > 3 {
            filtered.push(l.value());
        }
    }
    Ok(GonalityCandidates {
        raw: raw.iter().map(SquarefreeLevel::value).collect(),
        filtered,
    })
}

/// Odd levels with `psi(N) <= 2^omega(N) * 108` and `g*(N) > 2`.
pub fn hyp2_candidates() -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for l in odd_levels_under_psi_bound(108) {
        if genus_x0_star(&l)? > 2 {
            out.push(l.value());
        }
    }
    Ok(out)
}

/// True when `N` odd passes the gonality bound `psi(N) <= 2^omega * 348`.
pub fn passes_gonality_bound(n: &SquarefreeLevel) -> bool {
    dedekind_psi(n) <= 348u64 << n.omega()
}
