//! `coxsub`: classify Coxeter diagrams, enumerate reflection subgroups,
//! check the reference tables and compute indices of chambers.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use coxeter_subgroups::affine::build_alcove;
use coxeter_subgroups::diagram::{self, CoxeterDiagram, DiagramClass};
use coxeter_subgroups::json;
use coxeter_subgroups::rootsys::CartanType;
use coxeter_subgroups::subgroups::{self, Index, SubgroupRecord};
use coxeter_subgroups::subsystems;
use coxeter_subgroups::verify::{self, Check, Report, Status};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

/// Environment variable capping the worker threads.
const THREADS_VAR: &str = "COXETER_SUBGROUPS_THREADS";

#[derive(Parser)]
#[command(name = "coxsub", version, about = "Reflection subgroups of Euclidean reflection groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the components of a Coxeter diagram given as an edge list
    /// `i j m; ...` (`m` may be `inf`).
    Classify {
        /// Inline edge list, e.g. "1 2 3; 2 3 3; 3 1 3".
        spec: Option<String>,
        /// Read the edge list from a file instead.
        #[arg(long, conflicts_with = "spec")]
        file: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        dot: bool,
    },
    /// Enumerate reflection subgroups of an affine type (`tG2`) up to a
    /// bound on the index, or of a finite type (`F4`).
    Enumerate {
        #[arg(value_name = "TYPE")]
        ty: String,
        /// Largest index listed (affine types).
        #[arg(long, default_value_t = 24)]
        max_index: u128,
        /// Identify finite subgroups under diagram automorphisms as well
        /// (affine records are always up to tiling automorphisms).
        #[arg(long)]
        up_to_aut: bool,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        /// Graphviz diagrams of the subgroups (affine types).
        #[arg(long)]
        dot: bool,
    },
    /// Check the reference tables and lemmas. Without selectors, runs
    /// every table and lemma except `embedding`, and `--fig1`.
    Verify {
        /// Comma-separated table numbers: 2, 3, 5.
        #[arg(long, value_delimiter = ',')]
        tables: Vec<u32>,
        /// Comma-separated lemmas: kn, divisibility, embedding, infinite, chains.
        #[arg(long, value_delimiter = ',')]
        lemmas: Vec<String>,
        #[arg(long)]
        fig1: bool,
        /// Index bound for the embedding lemma.
        #[arg(long, default_value_t = 64)]
        embedding_max_index: u128,
        #[arg(long)]
        json: bool,
    },
    /// Index of a chamber (a subgroup or chamber JSON file) in the group of
    /// an affine type.
    Index {
        host: String,
        chamber: std::path::PathBuf,
        /// Also count the alcoves inside the chamber.
        #[arg(long)]
        oracle: bool,
        /// Give up counting after this many alcoves.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).with_context(|| format!("{THREADS_VAR} must be an integer >= 1, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// `tG2` -> affine `G2`; `G2` -> finite.
fn parse_type(s: &str) -> Result<(CartanType, bool)> {
    let (affine, rest) = match s.strip_prefix('t') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let t: CartanType = rest.parse().with_context(|| format!("illegal type {s:?}"))?;
    if affine && !diagram::is_legal_affine(t) {
        bail!("illegal affine type {s:?}");
    }
    Ok((t, affine))
}

fn classify(out: &mut String, spec: Option<String>, file: Option<std::path::PathBuf>, as_json: bool, dot: bool) -> Result<ExitCode> {
    let text = match (spec, file) {
        (Some(s), None) => s,
        (None, Some(p)) => std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?,
        _ => bail!("give an edge list or --file"),
    };
    let d = CoxeterDiagram::parse(&text)?;
    let mut listing = String::new();
    let mut unknown = 0;
    let mut classes = Vec::new();
    for (comp, pos) in diagram::decompose(&d).iter().zip(diagram::component_positions(&d)) {
        let ids: Vec<String> = pos.iter().map(|&p| d.nodes[p].to_string()).collect();
        let c = diagram::classify_connected(comp)?;
        let kind = match c {
            DiagramClass::Elliptic(_) => "elliptic",
            DiagramClass::Parabolic(_) => "parabolic",
            DiagramClass::NeitherOrUnknown => {
                unknown += 1;
                "neither/unknown"
            }
        };
        writeln!(listing, "{{{}}}: {kind} {c}", ids.join(","))?;
        classes.push(c);
    }
    classes.sort();
    let special = diagram::special_positions(&d);
    if as_json {
        writeln!(out, "{}", json::emit_diagram(&d, &classes, &special))?;
    } else if dot {
        write!(out, "{}", d.to_dot(&diagram::format_classes(&classes), &special))?;
    } else {
        out.push_str(&listing);
    }
    if unknown > 0 {
        eprintln!("warning: {unknown} component(s) not in the elliptic/parabolic catalog");
    }
    Ok(ExitCode::SUCCESS)
}

fn summary(counts: &BTreeMap<u128, usize>) -> String {
    counts.iter().map(|(i, n)| format!("{i}:{n}")).collect::<Vec<_>>().join(", ")
}

fn enumerate(out: &mut String, ty: &str, max_index: u128, up_to_aut: bool, as_json: bool, dot: bool) -> Result<ExitCode> {
    let (t, affine) = parse_type(ty)?;
    if affine {
        let recs = subgroups::enumerate_subgroups(t, max_index)?;
        print_affine(out, &recs, as_json, dot)?;
        if !as_json && !dot {
            let mut counts = BTreeMap::new();
            for r in &recs {
                *counts.entry(r.index.finite().unwrap_or(0)).or_default() += 1;
            }
            writeln!(out, "{} subgroups of index <= {max_index} (index:count {})", recs.len(), summary(&counts))?;
        }
    } else {
        if dot {
            bail!("--dot applies to affine types");
        }
        let recs = subsystems::enumerate_reflection_subgroups(t, up_to_aut)?;
        if as_json {
            let items: Vec<String> = recs.iter().map(json::emit_finite_subgroup).collect();
            writeln!(out, "[\n{}\n]", items.join(",\n"))?;
        } else {
            let mut counts = BTreeMap::new();
            for r in &recs {
                let roots = r.simple_roots.iter().map(|v| format!("({})", v.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect::<Vec<_>>().join(" ");
                writeln!(out, "{:>6}  {:<14} {}", r.index_in_host, r.label_string(), roots)?;
                *counts.entry(r.rank() as u128).or_default() += 1;
            }
            writeln!(out, "{} classes of reflection subgroups (rank:count {})", recs.len(), summary(&counts))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_affine(out: &mut String, recs: &[SubgroupRecord], as_json: bool, dot: bool) -> std::fmt::Result {
    if as_json {
        let items: Vec<String> = recs.iter().map(json::emit_subgroup).collect();
        return writeln!(out, "[\n{}\n]", items.join(",\n"));
    }
    for (k, r) in recs.iter().enumerate() {
        if dot {
            let name = format!("{} {} #{}", r.label(), r.index, k + 1);
            write!(out, "{}", r.sub_diagram.to_dot(&name, &diagram::special_positions(&r.sub_diagram)))?;
        } else {
            let cuts: Vec<String> = r.trace.iter().map(|s| format!("{}:{}", s.component, s.cut)).collect();
            writeln!(out, "{:>6}  {:<14} {}", r.index.to_string(), r.label(), cuts.join(" "))?;
        }
    }
    Ok(())
}

fn verify_cmd(out: &mut String, tables: Vec<u32>, lemmas: Vec<String>, fig1: bool, emb_max: u128, as_json: bool) -> Result<ExitCode> {
    let all = tables.is_empty() && lemmas.is_empty() && !fig1;
    let tables = if all { vec![2, 3, 5] } else { tables };
    let lemmas: Vec<String> = if all { ["kn", "divisibility", "infinite", "chains"].map(String::from).to_vec() } else { lemmas };
    let fig1 = all || fig1;
    for t in &tables {
        if ![2, 3, 5].contains(t) {
            bail!("unknown table {t} (expected 2, 3 or 5)");
        }
    }
    for l in &lemmas {
        if !["kn", "divisibility", "embedding", "infinite", "chains"].contains(&l.as_str()) {
            bail!("unknown lemma {l:?}");
        }
    }

    let mut checks: Vec<Check> = Vec::new();
    let mut records: Vec<SubgroupRecord> = Vec::new();
    fn take(checks: &mut Vec<Check>, records: &mut Vec<SubgroupRecord>, (c, r): (Vec<Check>, Vec<SubgroupRecord>)) {
        checks.extend(c);
        records.extend(r);
    }
    for t in &tables {
        let part = match t {
            2 => verify::table2(),
            3 => verify::table3(),
            _ => verify::table5(),
        };
        take(&mut checks, &mut records, part);
    }
    if lemmas.iter().any(|l| l == "kn") {
        take(&mut checks, &mut records, verify::lemma_kn());
    }
    if fig1 {
        take(&mut checks, &mut records, verify::fig1());
    }
    if lemmas.iter().any(|l| l == "embedding") {
        take(&mut checks, &mut records, verify::lemma_embedding(4, emb_max));
    }
    if lemmas.iter().any(|l| l == "divisibility") {
        if records.is_empty() {
            // records to test: the homothety grid
            records = verify::lemma_kn().1;
        }
        checks.extend(verify::lemma_divisibility(&records));
    }
    if lemmas.iter().any(|l| l == "infinite") {
        checks.extend(verify::infinite_pairs());
    }
    if lemmas.iter().any(|l| l == "chains") {
        checks.extend(verify::chains());
    }

    let report = Report { checks };
    if as_json {
        writeln!(out, "{}", json::emit_report(&report))?;
    } else {
        for c in &report.checks {
            writeln!(out, "{c}")?;
        }
        writeln!(
            out,
            "{} checks: {} pass, {} fail, {} discrepancy",
            report.checks.len(),
            report.count(Status::Pass),
            report.count(Status::Fail),
            report.count(Status::Discrepancy)
        )?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn index_cmd(out: &mut String, host: &str, path: &std::path::Path, oracle: bool, cap: usize) -> Result<ExitCode> {
    let (t, affine) = parse_type(host)?;
    if !affine {
        bail!("index needs an affine host such as t{host}");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let chamber = json::parse_chamber_file(&text)?;
    let f = build_alcove(t)?;
    if chamber.ambient_dim != f.ambient_dim {
        bail!("chamber lives in dimension {}, host {host} in {}", chamber.ambient_dim, f.ambient_dim);
    }
    if !chamber.is_bounded() {
        writeln!(out, "{}", Index::Infinite)?;
        return Ok(ExitCode::SUCCESS);
    }
    let idx = subgroups::subgroup_index(&f, &chamber)?;
    if oracle {
        let n = subgroups::tiling_index_oracle(&f, &chamber, cap)?;
        let verdict = if n == idx { "AGREE" } else { "DISAGREE" };
        writeln!(out, "{idx} {n} {verdict}")?;
        return Ok(if n == idx { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    writeln!(out, "{idx}")?;
    Ok(ExitCode::SUCCESS)
}

/// Runs the command, collecting its standard output in `out`.
fn run(out: &mut String) -> Result<ExitCode> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.cmd {
        Cmd::Classify { spec, file, json, dot } => classify(out, spec, file, json, dot),
        Cmd::Enumerate { ty, max_index, up_to_aut, json, dot } => enumerate(out, &ty, max_index, up_to_aut, json, dot),
        Cmd::Verify { tables, lemmas, fig1, embedding_max_index, json } => verify_cmd(out, tables, lemmas, fig1, embedding_max_index, json),
        Cmd::Index { host, chamber, oracle, cap } => index_cmd(out, &host, &chamber, oracle, cap),
    }
}

fn main() -> ExitCode {
    let mut out = String::new();
    let code = match run(&mut out) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    };
    // a closed pipe (`| head`) is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    code
}
