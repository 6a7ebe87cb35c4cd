//! Newform orbit fixtures and the block basis of S2*(N).
//!
//! A fixture file `N=<M>.jsonl` holds one JSON record per Galois orbit of
//! weight-2 newforms of level exactly `M`. Only rational data is stored: a
//! basis of the orbit's span of q-expansions and the characteristic
//! polynomials of the Hecke eigenvalues `a_p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, SquarefreeLevel};
use crate::genus::{sqrt_enclosure, Interval};
use crate::poly::{all_roots_in, zpoly_to_q, ZPoly};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the fixture root directory.
pub const DATA_ENV: &str = "X0STAR_DATA";

/// `(level, position in the fixture file)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitId {
    pub level: u64,
    pub index: usize,
}

impl fmt::Display for OrbitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.level, self.index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewformOrbit {
    pub id: OrbitId,
    pub level: SquarefreeLevel,
    pub dim: usize,
    pub al_signs: BTreeMap<u64, i8>,
    /// Monic, ascending coefficients, degree `dim`.
    pub ap_charpoly: BTreeMap<u64, ZPoly>,
    /// `dim` rows; entry `j` is the coefficient of `q^{j+1}`.
    pub q_basis: Vec<Vec<BigInt>>,
    pub precision: usize,
}

impl NewformOrbit {
    pub fn ap(&self, p: u64) -> Result<&ZPoly> {
        self.ap_charpoly.get(&p).ok_or(Error::MissingAp { id: self.id.to_string(), p })
    }

    pub fn all_plus(&self) -> bool {
        self.al_signs.values().all(|&s| s == 1)
    }
}

/// One fixture line as written on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRecord {
    pub schema: u32,
    pub level: u64,
    pub dim: usize,
    pub al: BTreeMap<String, i64>,
    pub ap: BTreeMap<String, Vec<serde_json::Number>>,
    pub qexp: Vec<Vec<serde_json::Number>>,
    pub prec: usize,
}

fn big(n: &serde_json::Number) -> std::result::Result<BigInt, String> {
    n.to_string().parse().map_err(|_| format!("{n} is not an integer"))
}

fn key(s: &str) -> std::result::Result<u64, String> {
    s.parse().map_err(|_| format!("{s:?} is not a prime key"))
}

/// Parses and validates one record; `index` is its position in the file.
pub fn parse_record(line: &str, index: usize) -> std::result::Result<NewformOrbit, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.schema != SCHEMA_VERSION {
        return Err(format!("schema {} (expected {SCHEMA_VERSION})", raw.schema));
    }
    let level = SquarefreeLevel::new(raw.level).map_err(|e| e.to_string())?;
    if raw.dim == 0 {
        return Err("dim must be positive".into());
    }
    let mut al_signs = BTreeMap::new();
    for (k, &v) in &raw.al {
        let q = key(k)?;
        if !level.primes().contains(&q) {
            return Err(format!("Atkin-Lehner prime {q} does not divide {}", raw.level));
        }
        if v != 1 && v != -1 {
            return Err(format!("Atkin-Lehner sign {v} at {q}"));
        }
        al_signs.insert(q, v as i8);
    }
    if al_signs.len() != level.primes().len() {
        return Err("Atkin-Lehner signs missing for some prime".into());
    }
    let mut ap_charpoly = BTreeMap::new();
    for (k, coeffs) in &raw.ap {
        let p = key(k)?;
        if !is_prime(p) || raw.level % p == 0 {
            return Err(format!("a_p key {p} is not a good prime"));
        }
        let poly: ZPoly = coeffs.iter().map(big).collect::<std::result::Result<_, _>>()?;
        if poly.len() != raw.dim + 1 || !poly[raw.dim].is_one() {
            return Err(format!("a_{p} charpoly is not monic of degree {}", raw.dim));
        }
        ap_charpoly.insert(p, poly);
    }
    if raw.qexp.len() != raw.dim {
        return Err(format!("{} q-expansion rows for dim {}", raw.qexp.len(), raw.dim));
    }
    let q_basis: Vec<Vec<BigInt>> = raw
        .qexp
        .iter()
        .map(|row| row.iter().map(big).collect())
        .collect::<std::result::Result<_, _>>()?;
    if q_basis.iter().any(|r| r.len() != raw.prec) {
        return Err(format!("q-expansion rows must have length prec = {}", raw.prec));
    }
    Ok(NewformOrbit {
        id: OrbitId { level: raw.level, index },
        level,
        dim: raw.dim,
        al_signs,
        ap_charpoly,
        q_basis,
        precision: raw.prec,
    })
}

fn leading(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|c| !c.is_zero())
}

/// `[-2 sqrt(p) - 1e-6, 2 sqrt(p) + 1e-6]` with outward rounding.
pub fn weil_interval(p: u64) -> (BigRational, BigRational) {
    let four_p = Interval::point(BigRational::from_integer(BigInt::from(4 * p)));
    let hi = sqrt_enclosure(&four_p, 12).hi + BigRational::new(1.into(), 1_000_000.into());
    (-hi.clone(), hi)
}

/// Structural invariants of an orbit: echelon basis with positive pivots,
/// and every `a_p` conjugate inside the Weil interval.
pub fn check_orbit(orbit: &NewformOrbit) -> Result<()> {
    let fail = |msg: String| Error::OrbitInvariant { id: orbit.id.to_string(), msg };
    let mut last = None;
    for row in &orbit.q_basis {
        let Some(l) = leading(row) else { return Err(fail("zero basis row".into())) };
        if last.is_some_and(|prev| l <= prev) {
            return Err(fail("q-basis is not in echelon form".into()));
        }
        if !row[l].is_positive() {
            return Err(fail("non-positive pivot".into()));
        }
        last = Some(l);
    }
    for (&p, poly) in &orbit.ap_charpoly {
        let (lo, hi) = weil_interval(p);
        if !all_roots_in(&zpoly_to_q(poly), &lo, &hi) {
            return Err(fail(format!("a_{p} charpoly violates the Weil bound")));
        }
    }
    Ok(())
}

/// Parses a whole fixture file, validating each record.
pub fn parse_fixture(text: &str, path: &str) -> Result<Vec<NewformOrbit>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let orbit = parse_record(line, out.len()).map_err(|msg| Error::Schema {
            path: path.to_string(),
            line: i + 1,
            msg,
        })?;
        check_orbit(&orbit)?;
        out.push(orbit);
    }
    Ok(out)
}

/// Read-through cache of fixture files under a root directory.
#[derive(Debug)]
pub struct FixtureStore {
    root: PathBuf,
    files: RwLock<HashMap<u64, Arc<Vec<NewformOrbit>>>>,
}

impl FixtureStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), files: RwLock::default() }
    }

    /// Root from `X0STAR_DATA`, else `default`.
    pub fn from_env_or(default: impl Into<PathBuf>) -> Self {
        match std::env::var_os(DATA_ENV) {
            Some(v) => Self::new(v),
            None => Self::new(default),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, level: u64) -> PathBuf {
        self.root.join(format!("N={level}.jsonl"))
    }

    pub fn has(&self, level: u64) -> bool {
        self.path_for(level).is_file()
    }

    /// Orbits of level exactly `m`, all Atkin-Lehner signs included.
    pub fn file(&self, m: u64) -> Result<Arc<Vec<NewformOrbit>>> {
        if let Some(v) = self.files.read().expect("fixture cache poisoned").get(&m) {
            return Ok(v.clone());
        }
        let path = self.path_for(m);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::MissingFixture(path))
            }
            Err(e) => return Err(e.into()),
        };
        let orbits = parse_fixture(&text, &path.display().to_string())?;
        if let Some(bad) = orbits.iter().find(|o| o.level.value() != m) {
            return Err(Error::OrbitInvariant {
                id: bad.id.to_string(),
                msg: format!("record of level {} in file for {m}", bad.level),
            });
        }
        let arc = Arc::new(orbits);
        self.files.write().expect("fixture cache poisoned").insert(m, arc.clone());
        Ok(arc)
    }

    /// Orbits spanning S2*(N): every all-plus orbit of level `M | N`, `M > 1`,
    /// ordered by ascending level, then file order.
    pub fn load_orbits(&self, n: &SquarefreeLevel) -> Result<Vec<NewformOrbit>> {
        let mut out = Vec::new();
        for m in n.divisors().into_iter().filter(|&m| m > 1) {
            out.extend(self.file(m)?.iter().filter(|o| o.all_plus()).cloned());
        }
        Ok(out)
    }

    /// Fixture files missing for the divisors of `n`.
    pub fn missing(&self, n: &SquarefreeLevel) -> Vec<PathBuf> {
        n.divisors()
            .into_iter()
            .filter(|&m| m > 1 && !self.has(m))
            .map(|m| self.path_for(m))
            .collect()
    }
}

/// `sum_{d | N/M} d g(q^d)` for every basis row `g` of the orbit, to `prec` terms.
pub fn lift_to_star(orbit: &NewformOrbit, n: &SquarefreeLevel, prec: usize) -> Result<Vec<Vec<BigInt>>> {
    let m = orbit.level.value();
    if n.value() % m != 0 {
        return Err(Error::Precondition(format!("orbit level {m} does not divide {n}")));
    }
    if orbit.precision < prec {
        return Err(Error::Precision { need: prec, have: orbit.precision });
    }
    let ds = SquarefreeLevel::new(n.value() / m)?.divisors();
    Ok(orbit
        .q_basis
        .iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); prec];
            for &d in &ds {
                let d = d as usize;
                let db = BigInt::from(d);
                // coefficient of q^{j+1} of g(q^d) is a_{(j+1)/d}
                let mut k = 1;
                while k * d <= prec {
                    out[k * d - 1] += &db * &row[k - 1];
                    k += 1;
                }
            }
            out
        })
        .collect())
}

/// An orbit together with its lifted q-expansions at the ambient level.
#[derive(Debug, Clone)]
pub struct Block {
    pub orbit: NewformOrbit,
    pub rows: Vec<Vec<BigInt>>,
}

/// Block basis of S2*(N): the differentials `omega_1, ..., omega_g`.
#[derive(Debug, Clone)]
pub struct StarBasis {
    pub level: SquarefreeLevel,
    pub blocks: Vec<Block>,
    pub precision: usize,
}

/// Default working precision `max(4g-3, 8g+8) + 4`.
pub fn default_precision(g: usize) -> usize {
    (4 * g).saturating_sub(3).max(8 * g + 8) + 4
}

impl StarBasis {
    pub fn new(level: &SquarefreeLevel, orbits: Vec<NewformOrbit>, precision: usize) -> Result<Self> {
        let blocks = orbits
            .into_iter()
            .map(|orbit| {
                let rows = lift_to_star(&orbit, level, precision)?;
                Ok(Block { orbit, rows })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { level: level.clone(), blocks, precision })
    }

    pub fn load(store: &FixtureStore, level: &SquarefreeLevel, precision: Option<usize>) -> Result<Self> {
        let orbits = store.load_orbits(level)?;
        let g = orbits.iter().map(|o| o.dim).sum();
        Self::new(level, orbits, precision.unwrap_or_else(|| default_precision(g)))
    }

    pub fn genus(&self) -> usize {
        self.blocks.iter().map(|b| b.orbit.dim).sum()
    }

    /// All rows `omega_1..omega_g` in block order.
    pub fn series(&self) -> Vec<Vec<BigInt>> {
        self.blocks.iter().flat_map(|b| b.rows.iter().cloned()).collect()
    }

    /// Index ranges of the blocks inside [`StarBasis::series`].
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|b| {
                let r = start..start + b.orbit.dim;
                start = r.end;
                r
            })
            .collect()
    }

    pub fn orbits(&self) -> Vec<NewformOrbit> {
        self.blocks.iter().map(|b| b.orbit.clone()).collect()
    }
}

/// Sorted `(level, dim)` pairs of the orbits.
pub fn splitting_signature(orbits: &[NewformOrbit]) -> Vec<(u64, usize)> {
    let mut v: Vec<_> = orbits.iter().map(|o| (o.level.value(), o.dim)).collect();
    v.sort_unstable();
    v
}

/// Renders a signature as `1_43+1_129+...`.
pub fn format_signature(sig: &[(u64, usize)]) -> String {
    sig.iter().map(|(l, d)| format!("{d}_{l}")).collect::<Vec<_>>().join("+")
}
