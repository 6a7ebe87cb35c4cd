//! Per-level decision of whether `Aut X0*(N)` is trivial.
//!
//! Order of the steps: genus gate and known low-genus tables, the gonality
//! bound for odd levels, point-count criteria, restriction through `N/p` for
//! even levels, then the sign-pattern search on the quadrics through the
//! canonical curve, sign resolution and, for genus-2 quotients, a model.

use std::collections::HashMap;
use std::sync::Mutex;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use x0star::arith::{dedekind_psi, SquarefreeLevel};
use x0star::criteria::{
    big_factor, default_schedule, free_involution_parity, genus_window, parity_places, restrict_filter,
    ExclusionVerdict, QuotientFacts, Restriction, DEFAULT_K_MAX, DEFAULT_PRIMES,
};
use x0star::genus::{delta_2n, genus_x0_star, passes_gonality_bound};
use x0star::hypermodel::{
    genus2_coordinates, genus2_quotient_model, hyp_test_modp, hyperelliptic_prefilter, mod2_screen_level,
    HypOutcome, HyperellipticModel,
};
use x0star::nfdata::{format_signature, splitting_signature, FixtureStore, NewformOrbit, StarBasis};
use x0star::petri::{resolve_sign, search_spaces, sign_pattern_search, Resolution, SignContext, SignPattern};
use x0star::Error;

use crate::error::{CliError, Result};

/// Levels with `g* = 2` whose automorphism group has order 2 (the others of
/// genus 2 have the Klein group).
pub const GENUS_TWO_ORDER_TWO: [u64; 30] = [
    67, 73, 85, 93, 103, 107, 115, 133, 134, 146, 154, 161, 165, 167, 170, 177, 186, 191, 205, 206, 209,
    213, 221, 230, 266, 285, 286, 287, 299, 357,
];

/// Bielliptic levels as `(level, g*)`. For `g* = 3` these are exactly the
/// levels with non-trivial automorphisms.
pub const BIELLIPTIC: [(u64, u64); 19] = [
    (106, 2), (122, 2), (129, 2), (158, 2), (166, 2), (215, 2), (390, 2),
    (178, 3), (183, 3), (246, 3), (249, 3), (258, 3), (290, 3), (303, 3), (318, 3), (430, 3), (455, 3), (510, 3),
    (370, 4),
];

/// Odd primes tried for the unramified-involution parity test, and the largest exponent.
const FREE_PARITY_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const FREE_PARITY_MAX_K: usize = 8;
/// Exponents used to look for too many points on a putative hyperelliptic reduction.
const PREFILTER_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Trivial,
    OrderTwo { g_u: usize },
    Hyperelliptic,
    Bielliptic,
    OutOfScope,
    Unresolved { reason: String },
}

impl Verdict {
    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Verdict::OrderTwo { .. } | Verdict::Bielliptic | Verdict::Hyperelliptic)
    }
}

/// A genus-2 model with exact coefficients, ascending, as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReport {
    pub equation: String,
    pub coefficients: Vec<String>,
    pub weierstrass_at_infinity: bool,
}

impl From<&HyperellipticModel> for ModelReport {
    fn from(m: &HyperellipticModel) -> Self {
        Self {
            equation: format!("Y^2 = {}", m.display()),
            coefficients: m.poly.iter().map(ToString::to_string).collect(),
            weierstrass_at_infinity: m.weierstrass_at_infinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Evidence {
    /// A fact taken from the classification of small genus or of prime levels.
    Known { fact: String },
    GonalityBound { psi: u64, bound: u64 },
    Exclusion { verdict: ExclusionVerdict },
    Restriction { prime: u64, quotient_level: u64, outcome: Restriction },
    SignSearch {
        space_dims: Vec<usize>,
        window: (u64, u64),
        forced_blocks: Vec<usize>,
        patterns: Vec<SignPattern>,
    },
    Resolution { minus_blocks: Vec<usize>, resolution: Resolution },
    Model { plus_blocks: Vec<usize>, model: ModelReport },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub level: u64,
    pub genus: u64,
    pub signature: Option<String>,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

impl ClassificationReport {
    /// The model attached to an order-2 verdict, if any.
    pub fn model(&self) -> Option<&ModelReport> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::Model { model, .. } => Some(model),
            _ => None,
        })
    }
}

/// Runs the pipeline, remembering the verdicts it needed for smaller levels.
pub struct Classifier {
    store: FixtureStore,
    memo: Mutex<HashMap<u64, ClassificationReport>>,
}

fn known(fact: impl Into<String>) -> Evidence {
    Evidence::Known { fact: fact.into() }
}

impl Classifier {
    pub fn new(store: FixtureStore) -> Self {
        Self { store, memo: Mutex::new(HashMap::new()) }
    }

    pub fn store(&self) -> &FixtureStore {
        &self.store
    }

    /// In scope: `g* > 3` and not bielliptic.
    pub fn in_scope(n: u64) -> Result<bool> {
        let level = SquarefreeLevel::new(n)?;
        Ok(n > 1 && genus_x0_star(&level)? > 3 && !BIELLIPTIC.iter().any(|&(m, _)| m == n))
    }

    pub fn classify(&self, n: u64) -> Result<ClassificationReport> {
        if let Some(r) = self.memo.lock().expect("memo poisoned").get(&n) {
            return Ok(r.clone());
        }
        let report = self.run(n)?;
        self.memo.lock().expect("memo poisoned").insert(n, report.clone());
        Ok(report)
    }

    fn run(&self, n: u64) -> Result<ClassificationReport> {
        let level = SquarefreeLevel::new(n)?;
        if n == 1 {
            return Err(Error::InvalidLevel(1, "X0*(1) has genus 0").into());
        }
        let genus = genus_x0_star(&level)?;
        let mut report = ClassificationReport { level: n, genus, signature: None, verdict: Verdict::OutOfScope, evidence: vec![] };
        if let Some(&(_, g)) = BIELLIPTIC.iter().find(|&&(m, _)| m == n) {
            report.evidence.push(known(format!("X0*({n}) is bielliptic of genus {g}")));
            report.verdict = if genus == 2 { Verdict::Hyperelliptic } else { Verdict::Bielliptic };
            return Ok(report);
        }
        match genus {
            0 | 1 => return Ok(report),
            2 => {
                report.evidence.push(known("genus 2 curves are hyperelliptic"));
                report.verdict = Verdict::Hyperelliptic;
                return Ok(report);
            }
            3 => {
                report.evidence.push(known("in genus 3 the automorphism group is non-trivial exactly for bielliptic levels"));
                return Ok(report);
            }
            _ => {}
        }
        let missing = self.store.missing(&level);
        if !missing.is_empty() {
            return Err(CliError::MissingData { level: n, paths: missing });
        }
        let orbits = self.store.load_orbits(&level)?;
        report.signature = Some(format_signature(&splitting_signature(&orbits)));
        report.verdict = self.decide(&level, genus, orbits, &mut report.evidence)?;
        Ok(report)
    }

    fn decide(&self, level: &SquarefreeLevel, genus: u64, orbits: Vec<NewformOrbit>, ev: &mut Vec<Evidence>) -> Result<Verdict> {
        let n = level.value();
        let refs: Vec<&NewformOrbit> = orbits.iter().collect();
        if level.omega() == 1 {
            ev.push(known("prime levels with g* > 2 have trivial automorphism group"));
            return Ok(Verdict::Trivial);
        }
        if level.is_odd() && !passes_gonality_bound(level) {
            ev.push(Evidence::GonalityBound { psi: dedekind_psi(level), bound: 348 << level.omega() });
            return Ok(Verdict::Trivial);
        }
        for p in DEFAULT_PRIMES.into_iter().filter(|p| n % p != 0) {
            let v = parity_places(level, &refs, p, DEFAULT_K_MAX)?;
            if v.excluded {
                ev.push(Evidence::Exclusion { verdict: v });
                return Ok(Verdict::Trivial);
            }
        }
        if level.is_odd() {
            let v = big_factor(level, &refs)?;
            if v.excluded {
                ev.push(Evidence::Exclusion { verdict: v });
                return Ok(Verdict::Trivial);
            }
        }
        let mut forced_levels = Vec::new();
        if !level.is_odd() {
            for &p in level.primes() {
                let Some(m) = level.without(p) else { continue };
                if m.value() == 1 || genus_x0_star(&m)? <= 2 {
                    continue;
                }
                let aut_trivial = self.aut_trivial(&m)?;
                let non_hyperelliptic_mod_p = aut_trivial && self.non_hyperelliptic_mod(&m, p)?;
                let outcome = restrict_filter(level, p, QuotientFacts { aut_trivial, non_hyperelliptic_mod_p })?;
                let excluded = matches!(outcome, Restriction::Excluded(_));
                if let Restriction::Forced { quotient_level, .. } = outcome {
                    forced_levels.push(quotient_level);
                }
                ev.push(Evidence::Restriction { prime: p, quotient_level: m.value(), outcome });
                if excluded {
                    return Ok(Verdict::Trivial);
                }
            }
            let half = n / 2;
            if forced_levels.contains(&half) {
                let odd = SquarefreeLevel::new(half)?;
                if delta_2n(&odd)? == -1 {
                    for p in FREE_PARITY_PRIMES.into_iter().filter(|p| n % p != 0) {
                        for k in 1..=FREE_PARITY_MAX_K {
                            let v = free_involution_parity(&odd, &refs, p, k)?;
                            if v.excluded {
                                ev.push(Evidence::Exclusion { verdict: v });
                                return Ok(Verdict::Trivial);
                            }
                        }
                    }
                }
            }
        }
        self.petri(level, genus, orbits, &forced_levels, ev)
    }

    fn petri(
        &self,
        level: &SquarefreeLevel,
        genus: u64,
        orbits: Vec<NewformOrbit>,
        forced_levels: &[u64],
        ev: &mut Vec<Evidence>,
    ) -> Result<Verdict> {
        let basis = StarBasis::new(level, orbits, x0star::nfdata::default_precision(genus as usize))?;
        let series = basis.series();
        let blocks = basis.block_ranges();
        let forced: Vec<usize> = basis
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| forced_levels.iter().any(|m| m % b.orbit.level.value() == 0))
            .map(|(i, _)| i)
            .collect();
        let window = genus_window(genus, level.is_odd());
        // with no quadric constraint at all, an empty search needs no equations
        let spaces = if sign_pattern_search(&[], &blocks, window, &forced).is_empty() {
            Vec::new()
        } else {
            search_spaces(&series)?
        };
        let patterns = sign_pattern_search(&spaces, &blocks, window, &forced);
        ev.push(Evidence::SignSearch {
            space_dims: spaces.iter().map(|s| s.dim()).collect(),
            window,
            forced_blocks: forced,
            patterns: patterns.clone(),
        });
        if patterns.is_empty() {
            return Ok(Verdict::Trivial);
        }
        let orbits = basis.orbits();
        let refs: Vec<&NewformOrbit> = orbits.iter().collect();
        let equations: Vec<_> = spaces.iter().flat_map(|s| s.forms()).collect();
        let schedule = default_schedule(level);
        let ctx = SignContext { level, blocks: &blocks, orbits: &refs, series: &series, equations: &equations, schedule: &schedule };
        let mut resolved = Vec::new();
        for pattern in &patterns {
            let resolution = resolve_sign(pattern, &ctx)?;
            ev.push(Evidence::Resolution { minus_blocks: pattern.minus_blocks.clone(), resolution: resolution.clone() });
            match resolution {
                Resolution::Resolved { g_u, plus_blocks, .. } => resolved.push((g_u, plus_blocks)),
                Resolution::Rejected { .. } => {}
                Resolution::Unresolved { reason } => return Ok(Verdict::Unresolved { reason }),
            }
        }
        match resolved.as_slice() {
            [] => Ok(Verdict::Trivial),
            [(g_u, plus)] => {
                if *g_u == 2 {
                    let rows: Vec<Vec<BigRational>> = plus
                        .iter()
                        .flat_map(|&b| basis.blocks[b].rows.iter())
                        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
                        .collect();
                    let single = (plus.len() == 1).then(|| &orbits[plus[0]]);
                    let (num, den) = genus2_coordinates(&rows, single)
                        .ok_or_else(|| Error::Contradiction("quotient differentials are not in echelon shape".into()))?;
                    let model = genus2_quotient_model(&num, &den, genus as usize)?;
                    ev.push(Evidence::Model { plus_blocks: plus.clone(), model: ModelReport::from(&model) });
                }
                Ok(Verdict::OrderTwo { g_u: *g_u })
            }
            _ => Ok(Verdict::Unresolved { reason: format!("{} candidate involutions survive", resolved.len()) }),
        }
    }

    /// Whether `Aut X0*(M)` is known to be trivial.
    pub fn aut_trivial(&self, m: &SquarefreeLevel) -> Result<bool> {
        let g = genus_x0_star(m)?;
        if g <= 2 || BIELLIPTIC.iter().any(|&(l, _)| l == m.value()) {
            return Ok(false);
        }
        if g == 3 || m.omega() == 1 {
            return Ok(true);
        }
        Ok(self.classify(m.value())?.verdict == Verdict::Trivial)
    }

    /// Whether the reduction of `X0*(M)` mod `p` is certified non-hyperelliptic.
    pub fn non_hyperelliptic_mod(&self, m: &SquarefreeLevel, p: u64) -> Result<bool> {
        if p == 2 {
            if !m.is_odd() {
                return Ok(false);
            }
            // outside the Ogg bound psi <= 2^n 108 there are too many points over F_4
            if dedekind_psi(m) > 108 << m.omega() {
                return Ok(true);
            }
            let orbits = self.store.load_orbits(m)?;
            let refs: Vec<&NewformOrbit> = orbits.iter().collect();
            return Ok(!mod2_screen_level(m, &refs)?.survives());
        }
        let orbits = self.store.load_orbits(m)?;
        let refs: Vec<&NewformOrbit> = orbits.iter().collect();
        if hyperelliptic_prefilter(&refs, p, PREFILTER_MAX_N)?.is_some() {
            return Ok(true);
        }
        let basis = StarBasis::load(&self.store, m, None)?;
        Ok(matches!(hyp_test_modp(&basis.series(), p)?, HypOutcome::NotHyperelliptic { .. }))
    }
}

/// Square-free levels in scope whose fixture files are all present, ascending.
pub fn levels_with_fixtures(store: &FixtureStore, max: u64) -> Vec<u64> {
    (2..=max)
        .filter(|&n| {
            SquarefreeLevel::new(n).is_ok_and(|l| l.divisors().iter().all(|&d| d == 1 || store.has(d)))
        })
        .collect()
}
