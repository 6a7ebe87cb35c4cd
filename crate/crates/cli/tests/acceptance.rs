//! One PASS/FAIL line per acceptance criterion.
//!
//! Run with `cargo test -p x0star-cli --test acceptance`.
//! Criteria that fail for documented reasons are pinned in `KNOWN_FAILURES`;
//! the test fails if that set changes in either direction.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use x0star::arith::{dedekind_psi, divisors, is_squarefree, moebius, SquarefreeLevel};
use x0star::classnum::{class_number, Discriminant};
use x0star::criteria::genus_window;
use x0star::frobenius::weil_check;
use x0star::genus::{delta_2n, genus_x0, genus_x0_star};
use x0star::hypermodel::genus2_coordinates;
use x0star::nfdata::{FixtureStore, NewformOrbit, StarBasis};
use x0star::petri::{monomials, nonsquare_subspace, quotient_petri_probe, search_spaces, sign_pattern_search, vanishing_forms, Resolution};
use x0star_cli::pipeline::{levels_with_fixtures, Classifier, Evidence, Verdict};
use x0star_cli::tables::{golden, Reproducer, RowStatus, TableReport};

/// Criteria expected to fail, each analysed in the project notes:
/// 4 (printed A_{391,1} and R(302, 3) disagree with the counts),
/// 5 (715 survives the big-factor test), 6 (1378 quotient probes give 8 and 14).
const KNOWN_FAILURES: [u8; 3] = [4, 5, 6];

const DELTA_BUDGET: Duration = Duration::from_secs(120);
const WEIL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn store() -> FixtureStore {
    FixtureStore::new(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/orbits"))
}

fn lvl(n: u64) -> SquarefreeLevel {
    SquarefreeLevel::new(n).unwrap()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn table_summary(r: &TableReport) -> String {
    let bad: Vec<String> = r
        .rows
        .iter()
        .filter(|row| matches!(row.status, RowStatus::Mismatch | RowStatus::Unverifiable))
        .map(|row| format!("{} expected {} computed {}", row.key, row.expected, row.computed.as_ref().map_or("-".into(), Value::to_string)))
        .collect();
    format!(
        "{}: {} rows, {} ok, {} errata, {} mismatches, {} unverifiable{}{}",
        r.id,
        r.rows.len(),
        r.count(RowStatus::Match),
        r.count(RowStatus::Erratum),
        r.count(RowStatus::Mismatch),
        r.count(RowStatus::Unverifiable),
        if bad.is_empty() { "" } else { "; " },
        bad.join("; ")
    )
}

fn row_status(r: &TableReport, key: &Value) -> Option<RowStatus> {
    r.rows.iter().find(|row| &row.key == key).map(|row| row.status)
}

fn c1_genus(rep: &Reproducer) -> Outcome {
    let r = rep.reproduce("genus").unwrap();
    let hyp = r.rows.iter().filter(|row| row.key["table"] == "hyperelliptic").count();
    let ex = [(370u64, 4u64), (303, 3)].iter().all(|&(n, g)| genus_x0_star(&lvl(n)).unwrap() == g);
    outcome(r.exit_code() == 0 && hyp == 30 && ex, table_summary(&r))
}

fn c2_deltas(rep: &Reproducer) -> Outcome {
    let start = Instant::now();
    let r = rep.reproduce("delta-lists").unwrap();
    let mut above_two = Vec::new();
    let mut late = Vec::new();
    for n in (3..=3000u64).step_by(2) {
        if !is_squarefree(n) {
            continue;
        }
        let l = lvl(n);
        let d = delta_2n(&l).unwrap();
        if d > 2 {
            above_two.push(n);
        }
        if n > 1239 && genus_x0_star(&l).unwrap() > 2 && d >= -1 {
            late.push(n);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        r.exit_code() == 0 && above_two.is_empty() && late.is_empty() && elapsed < DELTA_BUDGET,
        format!("{}; delta > 2 at {above_two:?}; delta >= -1 past 1239 at {late:?}; {:.1?}", table_summary(&r), elapsed),
    )
}

fn c3_candidates(rep: &Reproducer) -> Outcome {
    let r = rep.reproduce("candidates").unwrap();
    let hyp2 = r.rows.iter().find(|row| row.key["list"] == "hyp2").unwrap();
    let n59 = hyp2.computed.as_ref().and_then(Value::as_array).map_or(0, Vec::len);
    outcome(r.exit_code() == 0 && n59 == 59, format!("{}; {n59} candidates below the mod-2 bound", table_summary(&r)))
}

fn c4_point_counts(rep: &Reproducer) -> Outcome {
    let a = rep.reproduce("mod2-excess").unwrap();
    let r = rep.reproduce("r-table").unwrap();
    // the (592, 2) row is computed at 595 and always reported
    let key592: Value = serde_json::json!({"level": 592, "m": 2});
    let row592 = a.rows.iter().find(|row| row.key == key592).unwrap();
    let reading_ok = row592.computed == Some(row592.expected.clone());
    let other_bad = a.rows.iter().filter(|row| row.key != key592 && row.status == RowStatus::Mismatch).count();
    let ex = [((109, 3, 3), 21), ((1131, 5, 7), 75993)].iter().all(|&((n, p, k), v)| {
        row_status(&r, &serde_json::json!({"level": n, "p": p, "k": k})) == Some(RowStatus::Match) && v > 0
    });
    outcome(
        reading_ok && other_bad == 0 && r.exit_code() == 0 && ex,
        format!("{} | {}", table_summary(&a), table_summary(&r)),
    )
}

fn c5_discards(rep: &Reproducer) -> Outcome {
    let r = rep.reproduce("discards").unwrap();
    let parity: usize = r
        .rows
        .iter()
        .filter(|row| row.key["criterion"] == "parity")
        .filter(|row| row.status == RowStatus::Match)
        .map(|row| row.expected.as_array().map_or(0, Vec::len))
        .sum();
    let p5 = r.rows.iter().find(|row| row.key == serde_json::json!({"criterion": "parity-even", "p": 5})).unwrap();
    let has382 = p5.computed.as_ref().and_then(Value::as_array).is_some_and(|v| v.contains(&Value::from(382)));
    outcome(
        r.exit_code() == 0 && parity == 248 && has382,
        format!("{}; parity total {parity}; 2*191 at p = 5: {has382}", table_summary(&r)),
    )
}

/// Sparse quadric from `(coefficient, i, j)` with 1-based variables.
fn quadric(g: usize, terms: &[(i64, usize, usize)]) -> Vec<BigRational> {
    let monos = monomials(g, 2);
    let mut v = vec![BigRational::zero(); monos.len()];
    for &(c, i, j) in terms {
        let mut e = vec![0u8; g];
        e[i - 1] += 1;
        e[j - 1] += 1;
        let k = monos.iter().position(|m| m == &e).unwrap();
        v[k] += q(c);
    }
    v
}

fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    let mut r = 0;
    let cols = m.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn c6_petri(store: &FixtureStore) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let b645 = StarBasis::load(store, &lvl(645), None).unwrap();
    let l2 = vanishing_forms(&b645.series(), 2).unwrap();
    let ns = nonsquare_subspace(&l2).unwrap();
    let printed = [
        quadric(5, &[(6, 1, 1), (5, 1, 2), (7, 1, 3), (-11, 2, 3), (-9, 3, 3), (2, 4, 4), (48, 4, 5), (16, 5, 5)]),
        quadric(5, &[(2, 1, 2), (3, 2, 2), (-2, 1, 3), (4, 2, 3), (-3, 3, 3), (-4, 4, 4), (16, 5, 5)]),
        quadric(5, &[(1, 2, 4), (-1, 3, 4), (-2, 1, 5), (1, 2, 5), (1, 3, 5)]),
    ];
    let spans = rank(&printed) == 3 && printed.iter().all(|f| l2.contains(f));
    let q3_ns = ns.dim() == 1 && ns.contains(&printed[2]);
    pass &= l2.dim() == 3 && ns.dim() == 1 && spans && q3_ns;
    notes.push(format!("645: L2 {} ns {} printed basis {}", l2.dim(), ns.dim(), if spans { "row-equivalent" } else { "NOT row-equivalent" }));

    let odd: Vec<u64> = golden("odd-splittings").unwrap().rows.iter().filter_map(|r| r.key["level"].as_u64()).collect();
    let mut g4 = Vec::new();
    let mut with_patterns = Vec::new();
    for &n in odd.iter().chain([715u64].iter()) {
        let b = StarBasis::load(store, &lvl(n), None).unwrap();
        let series = b.series();
        let spaces = search_spaces(&series).unwrap();
        if b.genus() == 4 {
            let ns = nonsquare_subspace(&spaces[0]).unwrap();
            if spaces[0].dim() != 1 || ns.dim() != 0 {
                pass = false;
                notes.push(format!("{n}: L2 {} ns {}", spaces[0].dim(), ns.dim()));
            }
            g4.push(n);
        }
        let window = genus_window(b.genus() as u64, true);
        let pats = sign_pattern_search(&spaces, &b.block_ranges(), window, &[]);
        if !pats.is_empty() {
            with_patterns.push((n, pats.len()));
        }
    }
    pass &= with_patterns == [(645, 1)];
    notes.push(format!("genus-4 levels {g4:?}; levels with patterns {with_patterns:?} over {} survivors + 715", odd.len()));

    let probes: [(u64, &[u64], usize); 4] = [(957, &[319], 0), (705, &[235], 0), (1378, &[689], 1), (1378, &[689, 106], 1)];
    for (n, ms, want) in probes {
        let b = StarBasis::load(store, &lvl(n), None).unwrap();
        let rows: Vec<Vec<BigInt>> = b
            .blocks
            .iter()
            .filter(|bl| ms.iter().any(|m| m % bl.orbit.level.value() == 0))
            .flat_map(|bl| bl.rows.clone())
            .collect();
        let (_, dim) = quotient_petri_probe(&rows).unwrap();
        pass &= dim == want;
        notes.push(format!("probe {n} via {ms:?}: {} rows, dim {dim} (printed {want})", rows.len()));
    }
    outcome(pass, notes.join("; "))
}

/// `(q num' den - num q den')^2 - sum c_k num^k den^(6-k)` vanishes through `q^len`.
fn series_identity(num: &[BigRational], den: &[BigRational], c: &[BigRational]) -> bool {
    let len = num.len().min(den.len());
    // index = exponent of q; inputs start at q^1
    let shift = |v: &[BigRational]| {
        let mut out = vec![BigRational::zero()];
        out.extend(v[..len].iter().cloned());
        out
    };
    let (a, b) = (shift(num), shift(den));
    let top = len + 1;
    let mul = |x: &[BigRational], y: &[BigRational]| {
        let mut out = vec![BigRational::zero(); top];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().take(top - i) {
                out[i + j] += xi * yj;
            }
        }
        out
    };
    let mut d = vec![BigRational::zero(); top];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(top - i) {
            d[i + j] += q(i as i64 - j as i64) * ai * bj;
        }
    }
    let lhs = mul(&d, &d);
    let mut rhs = vec![BigRational::zero(); top];
    for (k, ck) in c.iter().enumerate() {
        let mut t = vec![BigRational::zero(); top];
        t[0] = BigRational::one();
        for _ in 0..k {
            t = mul(&t, &a);
        }
        for _ in k..6 {
            t = mul(&t, &b);
        }
        for (r, x) in rhs.iter_mut().zip(t) {
            *r += ck * x;
        }
    }
    lhs == rhs
}

/// `gcd(P, P')` is constant.
fn squarefree(c: &[BigRational]) -> bool {
    let trim = |mut v: Vec<BigRational>| {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    let mut a = trim(c.to_vec());
    let mut b = trim(c.iter().enumerate().skip(1).map(|(k, x)| q(k as i64) * x).collect());
    while !b.is_empty() {
        while a.len() >= b.len() {
            let f = a.last().unwrap() / b.last().unwrap();
            let off = a.len() - b.len();
            for (i, y) in b.iter().enumerate() {
                a[off + i] -= &f * y;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}

struct ModelCheck {
    level: u64,
    coefficients: Vec<BigRational>,
    fixed_points: Option<usize>,
    squarefree: bool,
    identity: bool,
}

fn model_check(classifier: &Classifier, store: &FixtureStore, n: u64) -> Option<ModelCheck> {
    let report = classifier.classify(n).unwrap();
    let model = report.model()?;
    let coefficients: Vec<BigRational> = model.coefficients.iter().map(|s| s.parse().unwrap()).collect();
    let (plus, fixed_points) = report.evidence.iter().find_map(|e| match e {
        Evidence::Resolution { resolution: Resolution::Resolved { plus_blocks, fixed_points, .. }, .. } => {
            Some((plus_blocks.clone(), *fixed_points))
        }
        _ => None,
    })?;
    let genus = report.genus as usize;
    let basis = StarBasis::load(store, &lvl(n), Some(x0star::nfdata::default_precision(genus))).unwrap();
    let orbits = basis.orbits();
    let rows: Vec<Vec<BigRational>> = plus
        .iter()
        .flat_map(|&b| basis.blocks[b].rows.iter())
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let single = (plus.len() == 1).then(|| &orbits[plus[0]]);
    let (num, den) = genus2_coordinates(&rows, single)?;
    Some(ModelCheck {
        level: n,
        squarefree: squarefree(&coefficients),
        identity: series_identity(&num, &den, &coefficients),
        coefficients,
        fixed_points,
    })
}

fn c7_models(classifier: &Classifier, store: &FixtureStore) -> Outcome {
    let want: [(u64, [i64; 7]); 2] = [(645, [4, 12, 20, 0, 8, 0, 1]), (366, [4, -24, 53, -42, 23, -6, 1])];
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, c) in want {
        match model_check(classifier, store, n) {
            Some(m) => {
                let exact = m.coefficients == c.iter().map(|&x| q(x)).collect::<Vec<_>>();
                pass &= exact;
                if n == 645 {
                    pass &= m.fixed_points == Some(4);
                }
                notes.push(format!(
                    "{n}: [{}] {}, fixed points {:?}",
                    m.coefficients.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                    if exact { "exact" } else { "DIFFERS" },
                    m.fixed_points
                ));
            }
            None => {
                pass = false;
                notes.push(format!("{n}: no model"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

fn c8_classify(classifier: &Classifier) -> Outcome {
    let start = Instant::now();
    let levels: Vec<u64> = levels_with_fixtures(classifier.store(), 3003)
        .into_iter()
        .filter(|&n| Classifier::in_scope(n).unwrap())
        .collect();
    let mut nontrivial = Vec::new();
    let mut other = Vec::new();
    for &n in &levels {
        match classifier.classify(n) {
            Ok(r) => match r.verdict {
                Verdict::Trivial => {}
                Verdict::OrderTwo { g_u } => nontrivial.push((n, g_u)),
                v => other.push(format!("{n}: {v:?}")),
            },
            Err(e) => other.push(format!("{n}: {e}")),
        }
    }
    outcome(
        nontrivial == [(366, 2), (645, 2)] && other.is_empty() && levels.len() > 400,
        format!("{} levels; order two at {nontrivial:?}; other {other:?}; {:.1?}", levels.len(), start.elapsed()),
    )
}

/// `h(D)` by exhaustive reduction of every form with `a, |b|, c <= |D|`.
fn class_number_oracle(d: i64) -> u64 {
    let abs = -d;
    let mut classes = BTreeSet::new();
    for a in 1..=abs {
        for b in -abs..=abs {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c > abs || gcd(gcd(a, b.abs()), c) != 1 {
                continue;
            }
            classes.insert(reduce(a, b, c));
        }
    }
    classes.len() as u64
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
    loop {
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            let nb = b + 2 * k * a;
            c += k * (b + k * a);
            b = nb;
        } else if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        } else {
            if a == c && b < 0 {
                b = -b;
            }
            return (a, b, c);
        }
    }
}

/// Genus of X0(N) from brute-force counts of elliptic points and cusps.
fn genus_x0_oracle(n: u64) -> i64 {
    let psi: u64 = divisors(n).iter().filter(|&&d| moebius(d) != 0).map(|&d| n / d).sum();
    let nu2 = (0..n).filter(|x| (x * x + 1) % n == 0).count() as i64;
    let nu3 = (0..n).filter(|x| (x * x + x + 1) % n == 0).count() as i64;
    let cusps = divisors(n).len() as i64;
    let twelve_g = 12 + psi as i64 - 3 * nu2 - 4 * nu3 - 6 * cusps;
    assert_eq!(twelve_g % 12, 0, "level {n}");
    twelve_g / 12
}

fn c9_properties() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mobius_ok = (1..=3000u64).all(|n| {
        let s: i64 = divisors(n).iter().map(|&d| moebius(d) as i64).sum();
        s == i64::from(n == 1)
    });
    let psi_ok = (2..=3000u64).filter(|&n| is_squarefree(n)).all(|n| {
        let sigma: u64 = divisors(n).iter().sum();
        dedekind_psi(&lvl(n)) == sigma
    });
    pass &= mobius_ok && psi_ok;
    notes.push(format!("moebius sums {mobius_ok}, psi = sigma on square-free {psi_ok}"));

    let mut class_bad = Vec::new();
    for d in (-500i64..0).filter(|d| d.rem_euclid(4) <= 1) {
        if class_number(Discriminant::new(d).unwrap()) != class_number_oracle(d) {
            class_bad.push(d);
        }
    }
    let mut cox_bad = Vec::new();
    for d in (7..=1000u64).filter(|&d| d % 4 == 3 && is_squarefree(d)) {
        let h = |x: i64| class_number(Discriminant::new(x).unwrap());
        let factor = if d % 8 == 7 { 1 } else { 3 };
        if h(-4 * d as i64) != factor * h(-(d as i64)) {
            cox_bad.push(d);
        }
    }
    pass &= class_bad.is_empty() && cox_bad.is_empty();
    notes.push(format!("class-number oracle mismatches {class_bad:?}, Cox failures {cox_bad:?}"));

    let mut genus_bad = Vec::new();
    let mut count = 0;
    for n in (2..=3000u64).filter(|&n| is_squarefree(n)) {
        let l = lvl(n);
        let ok = genus_x0_star(&l).is_ok() && genus_x0(&l).ok().map(|g| g as i64) == Some(genus_x0_oracle(n));
        if !ok {
            genus_bad.push(n);
        }
        count += 1;
    }
    pass &= genus_bad.is_empty();
    notes.push(format!("genus integral and non-negative at {count} levels, failures {genus_bad:?}"));
    outcome(pass, notes.join("; "))
}

fn c10_guards(classifier: &Classifier, store: &FixtureStore) -> Outcome {
    let mut charpolys = 0;
    let mut weil_bad = Vec::new();
    for n in levels_with_fixtures(store, 6006) {
        let orbits: Vec<NewformOrbit> = store.load_orbits(&lvl(n)).unwrap();
        let refs: Vec<&NewformOrbit> = orbits.iter().collect();
        for p in WEIL_PRIMES.into_iter().filter(|p| n % p != 0) {
            charpolys += 1;
            if !weil_check(&refs, p).unwrap() {
                weil_bad.push((n, p));
            }
        }
    }
    let models: Vec<ModelCheck> = [645u64, 366].iter().filter_map(|&n| model_check(classifier, store, n)).collect();
    let models_ok = models.len() == 2 && models.iter().all(|m| m.squarefree && m.identity);
    outcome(
        weil_bad.is_empty() && charpolys > 1000 && models_ok,
        format!(
            "{charpolys} charpolys, Weil failures {weil_bad:?}; models {:?}",
            models.iter().map(|m| (m.level, m.squarefree, m.identity)).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let store = store();
    let classifier = Classifier::new(self::store());
    let rep = Reproducer::new(&classifier);
    let criteria: Vec<(u8, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "genus goldens", Box::new(|| c1_genus(&rep))),
        (2, "genus comparison lists", Box::new(|| c2_deltas(&rep))),
        (3, "candidate enumerations", Box::new(|| c3_candidates(&rep))),
        (4, "point-count goldens", Box::new(|| c4_point_counts(&rep))),
        (5, "discard battery", Box::new(|| c5_discards(&rep))),
        (6, "quadric suite", Box::new(|| c6_petri(&store))),
        (7, "model extraction", Box::new(|| c7_models(&classifier, &store))),
        (8, "end-to-end classification", Box::new(|| c8_classify(&classifier))),
        (9, "fixture-free properties", Box::new(c9_properties)),
        (10, "numerical guards", Box::new(|| c10_guards(&classifier, &store))),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in &criteria {
        let o = run();
        println!("criterion {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*id);
        }
    }
    if failed != KNOWN_FAILURES {
        eprintln!("failing criteria changed: {failed:?}, pinned {KNOWN_FAILURES:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} of {} criteria pass; failing set matches the pinned {KNOWN_FAILURES:?}", criteria.len() - failed.len(), criteria.len());
}
