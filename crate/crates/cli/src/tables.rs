//! Golden tables and their regeneration from fixtures.
//!
//! Each table is a JSON file of rows `{key, expected}` transcribed from print,
//! optionally with an `erratum` (the value the printed entry evidently means)
//! or a `reading` (another key to compute when the printed key cannot be).

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use x0star::arith::{is_squarefree, SquarefreeLevel};
use x0star::criteria::{big_factor, parity_places, DEFAULT_K_MAX};
use x0star::frobenius::point_count;
use x0star::genus::{genus_x0_star, gonality_candidates, hyp2_candidates, delta_lists, GonalityCandidates, DeltaLists};
use x0star::hypermodel::mod2_hyperelliptic_screen;
use x0star::nfdata::{format_signature, splitting_signature, NewformOrbit};

use crate::error::{CliError, Result};
use crate::pipeline::{Classifier, Verdict, BIELLIPTIC};

pub const TABLES: [(&str, &str); 9] = [
    ("genus", include_str!("../golden/genus.json")),
    ("delta-lists", include_str!("../golden/delta-lists.json")),
    ("candidates", include_str!("../golden/candidates.json")),
    ("mod2-excess", include_str!("../golden/mod2-excess.json")),
    ("r-table", include_str!("../golden/r-table.json")),
    ("discards", include_str!("../golden/discards.json")),
    ("odd-splittings", include_str!("../golden/odd-splittings.json")),
    ("even-splittings", include_str!("../golden/even-splittings.json")),
    ("even-lists", include_str!("../golden/even-lists.json")),
];

/// Levels scanned for the genus comparisons of odd `N` with `2N`.
pub const SCAN_LIMIT: u64 = 3000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenRow {
    pub key: Value,
    pub expected: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erratum: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenTable {
    pub id: String,
    pub version: u32,
    pub location: String,
    pub rows: Vec<GoldenRow>,
}

/// Parses and validates a golden table: non-empty id, object keys, no duplicates.
pub fn parse_golden(text: &str) -> std::result::Result<GoldenTable, String> {
    let t: GoldenTable = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if t.id.is_empty() {
        return Err("empty table id".into());
    }
    let mut seen = BTreeSet::new();
    for r in &t.rows {
        if !r.key.is_object() {
            return Err(format!("row key {} is not an object", r.key));
        }
        if !seen.insert(r.key.to_string()) {
            return Err(format!("duplicate row key {}", r.key));
        }
    }
    Ok(t)
}

pub fn golden(id: &str) -> Result<GoldenTable> {
    let (_, text) = TABLES.iter().find(|(k, _)| *k == id).ok_or_else(|| CliError::UnknownTable(id.into()))?;
    parse_golden(text).map_err(|e| CliError::Golden { id: id.into(), source: serde::de::Error::custom(e) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    /// Differs from print but equals the recorded erratum.
    Erratum,
    Mismatch,
    /// Fixture gap or a key that cannot be evaluated.
    Unverifiable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub key: Value,
    pub expected: Value,
    pub computed: Option<Value>,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub id: String,
    pub version: u32,
    pub location: String,
    pub rows: Vec<RowResult>,
}

impl TableReport {
    pub fn count(&self, s: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == s).count()
    }

    /// 0 when every row matches (errata included), 1 on a mismatch, 2 when only fixture gaps remain.
    pub fn exit_code(&self) -> i32 {
        if self.count(RowStatus::Mismatch) > 0 {
            1
        } else if self.count(RowStatus::Unverifiable) > 0 {
            2
        } else {
            0
        }
    }
}

enum Computed {
    Value(Value),
    Unverifiable(String),
}

/// Sorted numeric arrays and `d_level` sums are compared as multisets.
fn normalize(v: &Value) -> Value {
    match v {
        Value::Array(a) if a.iter().all(Value::is_u64) => {
            let mut s: Vec<u64> = a.iter().filter_map(Value::as_u64).collect();
            s.sort_unstable();
            json!(s)
        }
        Value::String(s) if s.contains('_') => {
            let mut terms: Vec<(u64, u64)> = s
                .split('+')
                .filter_map(|t| {
                    let (d, l) = t.trim().split_once('_')?;
                    Some((l.parse().ok()?, d.parse().ok()?))
                })
                .collect();
            terms.sort_unstable();
            json!(format_signature(&terms.iter().map(|&(l, d)| (l, d as usize)).collect::<Vec<_>>()))
        }
        _ => v.clone(),
    }
}

fn key_u64(key: &Value, field: &str) -> Option<u64> {
    key.get(field).and_then(Value::as_u64)
}

fn missing_key(key: &Value) -> Computed {
    Computed::Unverifiable(format!("row key {key} is not understood"))
}

/// Lazily computed whole-table inputs shared by rows.
pub struct Reproducer<'a> {
    classifier: &'a Classifier,
    deltas: OnceLock<DeltaLists>,
    gonality: OnceLock<GonalityCandidates>,
    mod2: OnceLock<std::result::Result<Vec<u64>, String>>,
}

impl<'a> Reproducer<'a> {
    pub fn new(classifier: &'a Classifier) -> Self {
        Self { classifier, deltas: OnceLock::new(), gonality: OnceLock::new(), mod2: OnceLock::new() }
    }

    pub fn reproduce(&self, id: &str) -> Result<TableReport> {
        let table = golden(id)?;
        let mut rows = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            rows.push(self.row(id, row)?);
        }
        Ok(TableReport { id: table.id, version: table.version, location: table.location, rows })
    }

    fn row(&self, id: &str, row: &GoldenRow) -> Result<RowResult> {
        let mut note = None;
        let mut computed = self.compute(id, &row.key)?;
        if let (Computed::Unverifiable(why), Some(reading)) = (&computed, &row.reading) {
            note = Some(format!("{why}; computed at {reading} instead"));
            computed = match self.compute(id, reading)? {
                Computed::Value(v) => {
                    return Ok(RowResult {
                        key: row.key.clone(),
                        expected: row.expected.clone(),
                        computed: Some(v),
                        status: RowStatus::Mismatch,
                        note,
                    })
                }
                other => other,
            };
        }
        Ok(match computed {
            Computed::Unverifiable(why) => RowResult {
                key: row.key.clone(),
                expected: row.expected.clone(),
                computed: None,
                status: RowStatus::Unverifiable,
                note: Some(note.unwrap_or(why)),
            },
            Computed::Value(v) => {
                let status = if normalize(&v) == normalize(&row.expected) {
                    RowStatus::Match
                } else if row.erratum.as_ref().is_some_and(|e| normalize(e) == normalize(&v)) {
                    RowStatus::Erratum
                } else {
                    RowStatus::Mismatch
                };
                RowResult { key: row.key.clone(), expected: row.expected.clone(), computed: Some(v), status, note }
            }
        })
    }

    fn orbits(&self, n: u64) -> Result<std::result::Result<Vec<NewformOrbit>, String>> {
        let level = SquarefreeLevel::new(n)?;
        let store = self.classifier.store();
        let missing = store.missing(&level);
        if !missing.is_empty() {
            return Ok(Err(format!("missing fixtures: {}", missing.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))));
        }
        Ok(Ok(store.load_orbits(&level)?))
    }

    fn deltas(&self) -> Result<&DeltaLists> {
        if let Some(p) = self.deltas.get() {
            return Ok(p);
        }
        let lists = delta_lists(SCAN_LIMIT, 2)?;
        Ok(self.deltas.get_or_init(|| lists))
    }

    fn gonality(&self) -> Result<&GonalityCandidates> {
        if let Some(g) = self.gonality.get() {
            return Ok(g);
        }
        let c = gonality_candidates()?;
        Ok(self.gonality.get_or_init(|| c))
    }

    fn mod2(&self) -> &std::result::Result<Vec<u64>, String> {
        self.mod2.get_or_init(|| {
            mod2_hyperelliptic_screen(self.classifier.store()).map(|(s, _)| s).map_err(|e| e.to_string())
        })
    }

    fn compute(&self, id: &str, key: &Value) -> Result<Computed> {
        match id {
            "genus" => {
                let Some(n) = key_u64(key, "level") else { return Ok(missing_key(key)) };
                Ok(Computed::Value(json!(genus_x0_star(&SquarefreeLevel::new(n)?)?)))
            }
            "delta-lists" => {
                let Some(d) = key.get("delta").and_then(Value::as_i64) else { return Ok(missing_key(key)) };
                let p = self.deltas()?;
                let v = match d {
                    -1 => &p.minus_one,
                    0 => &p.zero,
                    1 => &p.plus_one,
                    2 => &p.plus_two,
                    _ => return Ok(missing_key(key)),
                };
                Ok(Computed::Value(json!(v)))
            }
            "candidates" => self.candidates(key),
            "mod2-excess" => {
                let (Some(n), Some(m)) = (key_u64(key, "level"), key_u64(key, "m")) else { return Ok(missing_key(key)) };
                if !is_squarefree(n) || n % 2 == 0 {
                    return Ok(Computed::Unverifiable(format!("{n} is not an odd square-free level")));
                }
                let orbits = match self.orbits(n)? {
                    Ok(o) => o,
                    Err(why) => return Ok(Computed::Unverifiable(why)),
                };
                let refs: Vec<&NewformOrbit> = orbits.iter().collect();
                let count = point_count(&refs, 2, m as usize)?;
                let a = count - BigInt::from(2) * (BigInt::from(2).pow(m as u32) + 1);
                Ok(Computed::Value(json!(i64::try_from(a).map_err(|_| x0star::Error::Contradiction("A overflow".into()))?)))
            }
            "r-table" => {
                let (Some(n), Some(p), Some(k)) = (key_u64(key, "level"), key_u64(key, "p"), key_u64(key, "k")) else {
                    return Ok(missing_key(key));
                };
                let orbits = match self.orbits(2 * n)? {
                    Ok(o) => o,
                    Err(why) => return Ok(Computed::Unverifiable(why)),
                };
                let refs: Vec<&NewformOrbit> = orbits.iter().collect();
                let count = point_count(&refs, p, k as usize)?;
                Ok(Computed::Value(serde_json::from_str(&count.to_string()).map_err(|e| CliError::Golden { id: id.into(), source: e })?))
            }
            "discards" => self.discards(key),
            "odd-splittings" | "even-splittings" => {
                let Some(n) = key_u64(key, "level") else { return Ok(missing_key(key)) };
                Ok(match self.orbits(n)? {
                    Ok(o) => Computed::Value(json!(format_signature(&splitting_signature(&o)))),
                    Err(why) => Computed::Unverifiable(why),
                })
            }
            "even-lists" => self.even_list(key),
            _ => Err(CliError::UnknownTable(id.into())),
        }
    }

    fn candidates(&self, key: &Value) -> Result<Computed> {
        if let Some(c) = key.get("count").and_then(Value::as_str) {
            let g = self.gonality()?;
            return Ok(Computed::Value(match c {
                "gonality-raw" => json!(g.raw.len()),
                "gonality-max" => json!(g.raw.iter().max()),
                "gonality-filtered" => json!(g.filtered.len()),
                _ => return Ok(missing_key(key)),
            }));
        }
        match key.get("list").and_then(Value::as_str) {
            Some("gonality-filtered") => Ok(Computed::Value(json!(self.gonality()?.filtered))),
            Some("hyp2") => Ok(Computed::Value(json!(hyp2_candidates()?))),
            Some("mod2-survivors") => Ok(match self.mod2() {
                Ok(s) => Computed::Value(json!(s)),
                Err(why) => Computed::Unverifiable(why.clone()),
            }),
            _ => Ok(missing_key(key)),
        }
    }

    /// The listed levels for which the criterion fires.
    fn discards(&self, key: &Value) -> Result<Computed> {
        let Some(criterion) = key.get("criterion").and_then(Value::as_str) else { return Ok(missing_key(key)) };
        let table = golden("discards")?;
        let Some(row) = table.rows.iter().find(|r| &r.key == key) else { return Ok(missing_key(key)) };
        let levels: Vec<u64> = row.expected.as_array().into_iter().flatten().filter_map(Value::as_u64).collect();
        let mut fired = Vec::new();
        let mut gaps = Vec::new();
        for n in levels {
            let level = SquarefreeLevel::new(n)?;
            let orbits = match self.orbits(n)? {
                Ok(o) => o,
                Err(_) => {
                    gaps.push(n);
                    continue;
                }
            };
            let refs: Vec<&NewformOrbit> = orbits.iter().collect();
            let hit = match (criterion, key_u64(key, "p")) {
                ("parity" | "parity-even", Some(p)) => parity_places(&level, &refs, p, DEFAULT_K_MAX)?.excluded,
                ("big-factor", _) => big_factor(&level, &refs)?.excluded,
                _ => return Ok(missing_key(key)),
            };
            if hit {
                fired.push(n);
            }
        }
        if !gaps.is_empty() {
            return Ok(Computed::Unverifiable(format!("no fixtures for {gaps:?}")));
        }
        Ok(Computed::Value(json!(fired)))
    }

    fn even_list(&self, key: &Value) -> Result<Computed> {
        let Some(i) = key_u64(key, "list") else { return Ok(missing_key(key)) };
        let p = self.deltas()?;
        let l2 = match self.mod2() {
            Ok(s) => s.clone(),
            Err(why) => return Ok(Computed::Unverifiable(why.clone())),
        };
        let without = |v: Vec<u64>, drop: &[u64]| -> Vec<u64> {
            let mut v: Vec<u64> = v.into_iter().filter(|n| !drop.contains(n)).collect();
            v.sort_unstable();
            v
        };
        let v = match i {
            1 => {
                let mut out = Vec::new();
                for n in (3..=SCAN_LIMIT).step_by(2) {
                    let Ok(l) = SquarefreeLevel::new(n) else { continue };
                    if genus_x0_star(&l)? <= 2 && genus_x0_star(&SquarefreeLevel::new(2 * n)?)? > 3 {
                        out.push(n);
                    }
                }
                out
            }
            2 => l2,
            3 => match self.odd_nontrivial()? {
                Ok(v) => without(v, &l2),
                Err(why) => return Ok(Computed::Unverifiable(why)),
            },
            4 => without([p.minus_one.clone(), p.zero.clone()].concat(), &l2),
            5 => match self.odd_nontrivial()? {
                Ok(l3) => {
                    let l3 = without(l3, &l2);
                    without([p.plus_one.clone(), p.plus_two.clone()].concat(), &l3)
                }
                Err(why) => return Ok(Computed::Unverifiable(why)),
            },
            _ => return Ok(missing_key(key)),
        };
        Ok(Computed::Value(json!(v)))
    }

    /// Odd levels with `g* > 2` and non-trivial automorphisms: the bielliptic
    /// ones of genus 3 and those the pipeline finds among the gonality candidates.
    fn odd_nontrivial(&self) -> Result<std::result::Result<Vec<u64>, String>> {
        let mut out: Vec<u64> = BIELLIPTIC.iter().filter(|&&(n, g)| n % 2 == 1 && g == 3).map(|&(n, _)| n).collect();
        for &n in &self.gonality()?.filtered {
            match self.classifier.classify(n) {
                Ok(r) if matches!(r.verdict, Verdict::Trivial) => {}
                Ok(r) if r.verdict.is_nontrivial() => out.push(n),
                Ok(r) => return Ok(Err(format!("level {n}: {:?}", r.verdict))),
                Err(CliError::MissingData { level, .. }) => return Ok(Err(format!("no fixtures for {level}"))),
                Err(e) => return Err(e),
            }
        }
        out.sort_unstable();
        Ok(Ok(out))
    }
}
