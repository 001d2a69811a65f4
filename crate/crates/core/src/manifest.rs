//! Reference tables shipped with the crate (`data/manifest.toml`).
//!
//! Rows may be templates over the rank `n` (and a split `k`); the
//! accessors here expand them into concrete rows.

use crate::error::{Error, Result};
use serde::Deserialize;
use std::sync::OnceLock;

const SOURCE: &str = include_str!("../data/manifest.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct ExceptionalRow {
    pub host: String,
    pub numbering: Vec<String>,
    pub word: String,
    pub dropped: usize,
    pub index: u128,
}

#[derive(Clone, Debug, Deserialize)]
struct IndecomposableTemplate {
    host: String,
    ranks: Option<[usize; 2]>,
    numbering: Vec<String>,
    word: String,
    dropped: String,
    sub: String,
    index: String,
}

#[derive(Clone, Debug, Deserialize)]
struct DecomposableTemplate {
    finite_host: String,
    ranks: Option<[usize; 2]>,
    kmin: Option<usize>,
    finite_sub: String,
    finite_index: String,
    affine_index: String,
    #[serde(default)]
    known_discrepancy: bool,
}

#[derive(Clone, Debug, Deserialize)]
struct InfiniteIndex {
    pairs: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
struct ChainTemplate {
    diagrams: Vec<String>,
    ranks: Option<[usize; 2]>,
    index: String,
}

#[derive(Clone, Debug, Deserialize)]
struct Raw {
    exceptional: Vec<ExceptionalRow>,
    indecomposable: Vec<IndecomposableTemplate>,
    decomposable: Vec<DecomposableTemplate>,
    infinite_index: InfiniteIndex,
    chains: Vec<ChainTemplate>,
}

/// A word row with a different subgroup diagram, for one rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndecomposableRow {
    pub host: String,
    pub numbering: Vec<String>,
    pub word: String,
    pub dropped: usize,
    pub sub: String,
    pub index: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposableRow {
    pub finite_host: String,
    pub finite_sub: String,
    pub finite_index: u128,
    pub affine_index: u128,
    /// The printed finite index is known to disagree with the computation.
    pub known_discrepancy: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub diagrams: Vec<String>,
    pub index: u128,
    /// Rank parameter for template rows.
    pub rank: Option<usize>,
}

fn raw() -> Result<&'static Raw> {
    static RAW: OnceLock<std::result::Result<Raw, String>> = OnceLock::new();
    RAW.get_or_init(|| toml::from_str(SOURCE).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Manifest(e.clone()))
}

/// Substitute `{n}`, `{k}` and simple offsets like `{n-1}`, `{n+2}`,
/// `{n-k}`, `{n-1-k}`.
pub fn substitute(s: &str, n: usize, k: usize) -> Result<String> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| Error::Manifest(format!("unclosed brace in {s}")))? + open;
        out.push_str(&eval_expr(&rest[open + 1..close], n, k)?.to_string());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn eval_expr(e: &str, n: usize, k: usize) -> Result<i64> {
    let mut total = 0i64;
    let mut sign = 1i64;
    let mut tok = String::new();
    let flush = |tok: &mut String, sign: i64, total: &mut i64| -> Result<()> {
        let v = match tok.as_str() {
            "n" => n as i64,
            "k" => k as i64,
            t => t.parse::<i64>().map_err(|_| Error::Manifest(format!("bad term {t:?}")))?,
        };
        *total += sign * v;
        tok.clear();
        Ok(())
    };
    for c in e.chars().filter(|c| !c.is_whitespace()) {
        match c {
            '+' | '-' => {
                flush(&mut tok, sign, &mut total)?;
                sign = if c == '+' { 1 } else { -1 };
            }
            _ => tok.push(c),
        }
    }
    flush(&mut tok, sign, &mut total)?;
    Ok(total)
}

/// Expand `x2..x5` tokens into `x2 x3 x4 x5` (after substitution).
pub fn expand_ranges(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        if let Some((a, b)) = tok.split_once("..") {
            let split = |t: &str| {
                let p = t.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::Manifest(format!("bad range {tok}")))?;
                let v: usize = t[p..].parse().map_err(|_| Error::Manifest(format!("bad range {tok}")))?;
                Ok::<_, Error>((t[..p].to_string(), v))
            };
            let (pa, x) = split(a)?;
            let (pb, y) = split(b)?;
            if pa != pb {
                return Err(Error::Manifest(format!("bad range {tok}")));
            }
            out.extend((x..=y).map(|i| format!("{pa}{i}")));
        } else {
            out.push(tok.to_string());
        }
    }
    Ok(out)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Evaluate index expressions: `c`, `cC(n,k)`, `c2^{e}`.
pub fn eval_index(s: &str, n: usize, k: usize) -> Result<u128> {
    let s = substitute(s, n, k)?;
    let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
    let rest = &s[digits.len()..];
    if rest.is_empty() {
        return digits.parse().map_err(|_| Error::Manifest(format!("bad index {s}")));
    }
    let coeff: u128 = if digits.is_empty() { 1 } else { digits.parse().unwrap() };
    if rest == "C(n,k)" {
        return Ok(coeff * binomial(n as u128, k as u128));
    }
    if let Some(e) = rest.strip_prefix('^') {
        let e: u32 = e.parse().map_err(|_| Error::Manifest(format!("bad exponent in {s}")))?;
        return Ok(coeff.pow(e));
    }
    Err(Error::Manifest(format!("bad index {s}")))
}

fn rank_range(r: Option<[usize; 2]>) -> Vec<Option<usize>> {
    match r {
        Some([a, b]) => (a..=b).map(Some).collect(),
        None => vec![None],
    }
}

pub fn exceptional_rows() -> Result<Vec<ExceptionalRow>> {
    Ok(raw()?.exceptional.clone())
}

pub fn indecomposable_rows() -> Result<Vec<IndecomposableRow>> {
    let mut out = Vec::new();
    for t in &raw()?.indecomposable {
        for n in rank_range(t.ranks) {
            let n0 = n.unwrap_or(0);
            let sub = |s: &str| substitute(s, n0, 0);
            let mut numbering = Vec::new();
            for x in &t.numbering {
                numbering.extend(expand_ranges(&sub(x)?)?);
            }
            let (head, src) = t.word.split_once('(').ok_or_else(|| Error::Manifest(format!("bad word {}", t.word)))?;
            let word = format!("{} ({}", expand_ranges(&sub(head)?)?.join(" "), sub(src)?);
            out.push(IndecomposableRow {
                host: sub(&t.host)?,
                numbering,
                word,
                dropped: sub(&t.dropped)?.parse().map_err(|_| Error::Manifest(format!("bad drop {}", t.dropped)))?,
                sub: sub(&t.sub)?,
                index: eval_index(&t.index, n0, 0)?,
            });
        }
    }
    Ok(out)
}

pub fn decomposable_rows() -> Result<Vec<DecomposableRow>> {
    let mut out = Vec::new();
    for t in &raw()?.decomposable {
        for n in rank_range(t.ranks) {
            match n {
                None => out.push(DecomposableRow {
                    finite_host: t.finite_host.clone(),
                    finite_sub: t.finite_sub.clone(),
                    finite_index: eval_index(&t.finite_index, 0, 0)?,
                    affine_index: eval_index(&t.affine_index, 0, 0)?,
                    known_discrepancy: t.known_discrepancy,
                }),
                Some(n) => {
                    for k in t.kmin.unwrap_or(1)..=n / 2 {
                        out.push(DecomposableRow {
                            finite_host: substitute(&t.finite_host, n, k)?,
                            finite_sub: substitute(&t.finite_sub, n, k)?,
                            finite_index: eval_index(&t.finite_index, n, k)?,
                            affine_index: eval_index(&t.affine_index, n, k)?,
                            known_discrepancy: t.known_discrepancy,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Pairs `(host, sub)` for a given host rank `n`, with `k` expanded.
pub fn infinite_index_pairs(n: usize) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for [h, s] in &raw()?.infinite_index.pairs {
        let ks: Vec<usize> = if s.contains("{k}") || s.contains("-k}") { (0..n).collect() } else { vec![0] };
        for k in ks {
            out.push((substitute(h, n, k)?, substitute(s, n, k)?));
        }
    }
    Ok(out)
}

pub fn chain_rows() -> Result<Vec<ChainRow>> {
    let mut out = Vec::new();
    for t in &raw()?.chains {
        for n in rank_range(t.ranks) {
            let n0 = n.unwrap_or(0);
            out.push(ChainRow {
                diagrams: t.diagrams.iter().map(|d| substitute(d, n0, 0)).collect::<Result<_>>()?,
                index: eval_index(&t.index, n0, 0)?,
                rank: n,
            });
        }
    }
    Ok(out)
}
