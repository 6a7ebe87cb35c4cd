use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use x0star::arith::SquarefreeLevel;
use x0star::criteria::{genus_window, parity_places, DEFAULT_K_MAX};
use x0star::genus::{delta_2n, gonality_candidates, hyp2_candidates, GenusPair};
use x0star::nfdata::{format_signature, splitting_signature, FixtureStore, NewformOrbit, StarBasis, DATA_ENV};
use x0star::petri::{nonsquare_subspace, search_spaces, sign_pattern_search};

use x0star_cli::pipeline::{levels_with_fixtures, Classifier, ClassificationReport, Verdict};
use x0star_cli::tables::{Reproducer, RowStatus, TableReport, TABLES};
use x0star_cli::{cache, Result};

#[derive(Parser)]
#[command(name = "x0star", version, about = "Automorphisms of the modular curves X0*(N), N square-free")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Fixture root with one N=<M>.jsonl file per level.
    #[arg(long, global = true, env = DATA_ENV, default_value = "data/orbits")]
    data: PathBuf,
    /// Directory of the class-number and Frobenius cache.
    #[arg(long, global = true, default_value = ".cache")]
    cache_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CandidateSet {
    Odd,
    Hyp2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    Show,
    Clear,
}

#[derive(Subcommand)]
enum Command {
    /// Genera of X0(N) and X0*(N).
    Genus { levels: Vec<u64> },
    /// g*(2N) - 2 g*(N) for odd N.
    Delta { levels: Vec<u64> },
    /// Odd levels allowed by the gonality bound, or by the mod-2 hyperelliptic bound.
    Candidates { set: CandidateSet },
    /// Parity-of-places test for X0*(N) over F_p.
    Discard {
        level: u64,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
    },
    /// Splitting of J0*(N) into newform orbits.
    Splitting { level: u64 },
    /// Quadrics through the canonical curve and the sign-pattern search.
    Petri { level: u64 },
    /// Full decision for each level, or for every in-scope level with fixtures.
    Classify {
        levels: Vec<u64>,
        #[arg(long)]
        all: bool,
        /// Upper bound for --all.
        #[arg(long, default_value_t = 3003)]
        max: u64,
    },
    /// Regenerate a golden table and diff it; `list` prints the table ids.
    ReproduceTable { id: String },
    /// Inspect or delete the on-disk cache.
    Cache { action: CacheAction },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    let out = if json {
        serde_json::to_string_pretty(value).expect("report serializes") + "\n"
    } else {
        text()
    };
    // a reader that went away (`| head`) is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn level(n: u64) -> Result<SquarefreeLevel> {
    Ok(SquarefreeLevel::new(n)?)
}

fn verdict_line(r: &ClassificationReport) -> String {
    let v = match &r.verdict {
        Verdict::Trivial => "trivial".to_string(),
        Verdict::OrderTwo { g_u } => format!("order 2, quotient genus {g_u}"),
        Verdict::Hyperelliptic => "hyperelliptic".to_string(),
        Verdict::Bielliptic => "bielliptic".to_string(),
        Verdict::OutOfScope => "out of scope (g* <= 3)".to_string(),
        Verdict::Unresolved { reason } => format!("unresolved: {reason}"),
    };
    let mut s = format!("N = {}  g* = {}  {}\n", r.level, r.genus, v);
    if let Some(sig) = &r.signature {
        s += &format!("  J0* ~ {sig}\n");
    }
    for e in &r.evidence {
        s += &format!("  {}\n", serde_json::to_string(e).expect("evidence serializes"));
    }
    if let Some(m) = r.model() {
        s += &format!("  {}\n", m.equation);
    }
    s
}

fn table_text(t: &TableReport) -> String {
    let mut s = format!("{} (v{}): {}\n", t.id, t.version, t.location);
    for r in &t.rows {
        let status = match r.status {
            RowStatus::Match => "ok",
            RowStatus::Erratum => "erratum",
            RowStatus::Mismatch => "MISMATCH",
            RowStatus::Unverifiable => "unverifiable",
        };
        let computed = r.computed.as_ref().map_or("-".to_string(), ToString::to_string);
        s += &format!("  {:<12} {}  expected {}  computed {}", status, r.key, r.expected, computed);
        if let Some(n) = &r.note {
            s += &format!("  ({n})");
        }
        s.push('\n');
    }
    s += &format!(
        "  {} rows: {} ok, {} errata, {} mismatches, {} unverifiable\n",
        t.rows.len(),
        t.count(RowStatus::Match),
        t.count(RowStatus::Erratum),
        t.count(RowStatus::Mismatch),
        t.count(RowStatus::Unverifiable)
    );
    s
}

fn run(cli: &Cli) -> Result<i32> {
    let store = FixtureStore::new(cli.data.clone());
    let json = cli.json;
    match &cli.command {
        Command::Genus { levels } => {
            let pairs = levels.iter().map(|&n| Ok(GenusPair::new(&level(n)?)?)).collect::<Result<Vec<_>>>()?;
            let rows: Vec<_> = pairs.iter().map(|p| json!({"level": p.level.value(), "g0": p.g, "g_star": p.g_star})).collect();
            emit(json, &rows, || pairs.iter().map(|p| format!("N = {}  g0 = {}  g* = {}\n", p.level, p.g, p.g_star)).collect());
        }
        Command::Delta { levels } => {
            let rows = levels.iter().map(|&n| Ok((n, delta_2n(&level(n)?)?))).collect::<Result<Vec<_>>>()?;
            let out: Vec<_> = rows.iter().map(|(n, d)| json!({"level": n, "delta": d})).collect();
            emit(json, &out, || rows.iter().map(|(n, d)| format!("N = {n}  g*(2N) - 2g*(N) = {d}\n")).collect());
        }
        Command::Candidates { set } => match set {
            CandidateSet::Odd => {
                let c = gonality_candidates()?;
                emit(json, &c, || {
                    format!(
                        "{} odd levels pass the gonality bound (max {}), {} after removing primes and g* <= 3:\n{:?}\n",
                        c.raw.len(),
                        c.raw.iter().max().unwrap_or(&0),
                        c.filtered.len(),
                        c.filtered
                    )
                });
            }
            CandidateSet::Hyp2 => {
                let c = hyp2_candidates()?;
                emit(json, &c, || format!("{} levels:\n{:?}\n", c.len(), c));
            }
        },
        Command::Discard { level: n, prime, k_max } => {
            let l = level(*n)?;
            let orbits = store.load_orbits(&l)?;
            let refs: Vec<&NewformOrbit> = orbits.iter().collect();
            let v = parity_places(&l, &refs, *prime, *k_max)?;
            emit(json, &v, || format!("N = {n}, p = {prime}: {}\n  {:?}\n", if v.excluded { "excluded" } else { "not excluded" }, v.witness));
        }
        Command::Splitting { level: n } => {
            let orbits = store.load_orbits(&level(*n)?)?;
            let sig = splitting_signature(&orbits);
            emit(json, &sig, || format!("J0*({n}) ~ {}\n", format_signature(&sig)));
        }
        Command::Petri { level: n } => {
            let l = level(*n)?;
            let basis = StarBasis::load(&store, &l, None)?;
            let series = basis.series();
            let spaces = search_spaces(&series)?;
            let ns = if basis.genus() >= 4 { Some(nonsquare_subspace(&spaces[0])?) } else { None };
            let window = genus_window(basis.genus() as u64, l.is_odd());
            let patterns = sign_pattern_search(&spaces, &basis.block_ranges(), window, &[]);
            let out = json!({
                "level": n,
                "genus": basis.genus(),
                "blocks": basis.blocks.iter().map(|b| json!({"level": b.orbit.level.value(), "dim": b.orbit.dim})).collect::<Vec<_>>(),
                "spaces": spaces.iter().map(|s| json!({"degree": s.degree, "dim": s.dim(), "forms": s.display_forms()})).collect::<Vec<_>>(),
                "nonsquare_dim": ns.as_ref().map(|s| s.dim()),
                "nonsquare_forms": ns.as_ref().map(|s| s.display_forms()),
                "window": window,
                "patterns": patterns,
            });
            emit(json, &out, || {
                let mut s = format!("N = {n}  g* = {}\n", basis.genus());
                for sp in &spaces {
                    s += &format!("  L{}: dim {}\n", sp.degree, sp.dim());
                    for f in sp.display_forms() {
                        s += &format!("    {f}\n");
                    }
                }
                if let Some(ns) = &ns {
                    s += &format!("  L2 without squares: dim {}\n", ns.dim());
                    for f in ns.display_forms() {
                        s += &format!("    {f}\n");
                    }
                }
                s += &format!("  quotient genus window {window:?}: {} sign pattern(s)\n", patterns.len());
                for p in &patterns {
                    s += &format!("    minus blocks {:?}, orientations {:?}\n", p.minus_blocks, p.orientations);
                }
                s
            });
        }
        Command::Classify { levels, all, max } => {
            let classifier = Classifier::new(store);
            let mut todo = levels.clone();
            if *all {
                for n in levels_with_fixtures(classifier.store(), *max) {
                    if Classifier::in_scope(n)? {
                        todo.push(n);
                    }
                }
            }
            todo.sort_unstable();
            todo.dedup();
            let reports = todo.par_iter().map(|&n| classifier.classify(n)).collect::<Result<Vec<_>>>()?;
            emit(json, &reports, || reports.iter().map(verdict_line).collect());
            if reports.iter().any(|r| matches!(r.verdict, Verdict::Unresolved { .. })) {
                return Ok(3);
            }
        }
        Command::ReproduceTable { id } => {
            if id == "list" {
                let ids: Vec<&str> = TABLES.iter().map(|(k, _)| *k).collect();
                emit(json, &ids, || ids.iter().map(|k| format!("{k}\n")).collect());
                return Ok(0);
            }
            let ids: Vec<&str> = if id == "all" { TABLES.iter().map(|(k, _)| *k).collect() } else { vec![id.as_str()] };
            let classifier = Classifier::new(store);
            let rep = Reproducer::new(&classifier);
            let reports = ids.iter().map(|k| rep.reproduce(k)).collect::<Result<Vec<_>>>()?;
            emit(json, &reports, || reports.iter().map(table_text).collect());
            return Ok(reports.iter().map(TableReport::exit_code).max().unwrap_or(0));
        }
        Command::Cache { action } => match action {
            CacheAction::Show => {
                let file = cache::read(&cli.cache_dir)?;
                let out = json!({
                    "path": cache::path(&cli.cache_dir),
                    "schema": cache::CACHE_SCHEMA,
                    "class_numbers": file.as_ref().map_or(0, |f| f.class_numbers.len()),
                    "frobenius": file.as_ref().map_or(0, |f| f.frobenius.len()),
                });
                emit(json, &out, || {
                    format!(
                        "{}: {} class numbers, {} Frobenius charpolys\n",
                        cache::path(&cli.cache_dir).display(),
                        out["class_numbers"],
                        out["frobenius"]
                    )
                });
            }
            CacheAction::Clear => {
                let removed = cache::clear(&cli.cache_dir)?;
                emit(json, &json!({ "removed": removed }), || {
                    if removed { "cache cleared\n".into() } else { "no cache file\n".into() }
                });
            }
        },
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let uses_cache = !matches!(cli.command, Command::Cache { .. });
    if uses_cache {
        if let Err(e) = cache::load(&cli.cache_dir) {
            eprintln!("warning: ignoring cache: {e}");
        }
    }
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if uses_cache {
        if let Err(e) = cache::save(&cli.cache_dir) {
            eprintln!("warning: cache not written: {e}");
        }
    }
    ExitCode::from(code as u8)
}

