//! JSON schema v1: `{"schema_version": 1, "kind": ..., "payload": ...}`.
//!
//! Kinds are `diagram`, `subgroup`, `verification-report`, `chamber` and
//! `finite-subgroup` (emit only). Rationals
//! are `"p/q"` strings, type strings use the `t` prefix for affine types,
//! indices are integers (`null` for infinite index). Emission is
//! deterministic, so emit -> parse -> emit is byte-identical.

use crate::affine::{AffineRoot, ChamberComponent, ComponentKind, FundamentalChamber, Halfspace};
use crate::diagram::{self, parse_classes, CoxeterDiagram, DiagramClass, Label};
use crate::error::{Error, Result};
use crate::linalg::{format_q, parse_q, Vector, Q};
use crate::rootsys::CartanType;
use crate::subgroups::{Cut, Index, SubgroupRecord, TraceStep};
use crate::subsystems::SubsystemRecord;
use crate::verify::Report;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonRecord {
    pub schema_version: u32,
    pub kind: String,
    pub payload: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub i: usize,
    pub j: usize,
    /// `"3"`, `"4"`, `"6"`, ... or `"inf"`.
    pub m: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub nodes: Vec<usize>,
    pub edges: Vec<EdgeJson>,
    /// Per-component classes (`"tF4"`, `"A2"`, `"?"`).
    #[serde(default)]
    pub classes: Vec<String>,
    /// Positions of special nodes.
    #[serde(default)]
    pub special: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub normal: Vec<String>,
    pub offset: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub kind: String,
    pub halfspaces: Vec<HalfspaceJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberJson {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<String>>,
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineRootJson {
    pub finite_part: Vec<String>,
    pub level: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub component: String,
    pub simple_roots: Vec<Vec<String>>,
    pub cut: String,
    pub beta: Option<AffineRootJson>,
    pub word: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupJson {
    pub host: String,
    pub label: String,
    pub index: Option<u128>,
    pub host_diagram: DiagramJson,
    pub sub_diagram: DiagramJson,
    pub sub_classes: Vec<String>,
    pub chamber: ChamberJson,
    pub trace: Vec<TraceJson>,
}

/// A reflection subgroup of a finite reflection group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSubgroupJson {
    pub host: String,
    /// Raw labels, e.g. `"D3+B1"`.
    pub label: String,
    pub types: Vec<String>,
    pub index: u128,
    pub is_root_subsystem: bool,
    pub simple_roots: Vec<Vec<String>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn rat(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| bad(format!("bad rational {s:?}")))
}

fn vec_out(v: &Vector) -> Vec<String> {
    v.0.iter().map(format_q).collect()
}

fn vec_in(v: &[String]) -> Result<Vector> {
    Ok(Vector(v.iter().map(|s| rat(s)).collect::<Result<_>>()?))
}

pub fn diagram_to_json(d: &CoxeterDiagram, classes: &[DiagramClass], special: &[usize]) -> DiagramJson {
    DiagramJson {
        nodes: d.nodes.clone(),
        edges: d.edges().map(|(i, j, m)| EdgeJson { i, j, m: m.to_string() }).collect(),
        classes: classes.iter().map(|c| c.to_string()).collect(),
        special: special.to_vec(),
    }
}

pub fn diagram_from_json(j: &DiagramJson) -> Result<CoxeterDiagram> {
    let mut d = CoxeterDiagram::with_ids(j.nodes.clone());
    for e in &j.edges {
        if e.i >= j.nodes.len() || e.j >= j.nodes.len() || e.i == e.j {
            return Err(bad(format!("bad edge {} {}", e.i, e.j)));
        }
        let m = match e.m.as_str() {
            "inf" => Label::Infinite,
            s => Label::Finite(s.parse().map_err(|_| bad(format!("bad label {s:?}")))?),
        };
        d.set(e.i, e.j, m);
    }
    Ok(d)
}

fn class_from_str(s: &str) -> Result<DiagramClass> {
    if s == "?" {
        return Ok(DiagramClass::NeitherOrUnknown);
    }
    match parse_classes(s)?.as_slice() {
        [c] => Ok(*c),
        _ => Err(bad(format!("expected one class, got {s:?}"))),
    }
}

pub fn chamber_to_json(c: &FundamentalChamber) -> ChamberJson {
    ChamberJson {
        ambient_dim: c.ambient_dim,
        basis: c.basis.iter().map(vec_out).collect(),
        components: c
            .components
            .iter()
            .map(|k| ComponentJson {
                kind: match k.kind {
                    ComponentKind::Simplex => "simplex".into(),
                    ComponentKind::Cone => "cone".into(),
                },
                halfspaces: k.halfspaces.iter().map(|h| HalfspaceJson { normal: vec_out(&h.normal), offset: format_q(&h.offset) }).collect(),
            })
            .collect(),
    }
}

/// Parse and validate a chamber.
pub fn chamber_from_json(j: &ChamberJson) -> Result<FundamentalChamber> {
    let components = j
        .components
        .iter()
        .map(|k| {
            let kind = match k.kind.as_str() {
                "simplex" => ComponentKind::Simplex,
                "cone" => ComponentKind::Cone,
                s => return Err(bad(format!("bad component kind {s:?}"))),
            };
            let halfspaces = k
                .halfspaces
                .iter()
                .map(|h| Ok(Halfspace { normal: vec_in(&h.normal)?, offset: rat(&h.offset)? }))
                .collect::<Result<_>>()?;
            Ok(ChamberComponent { halfspaces, kind })
        })
        .collect::<Result<_>>()?;
    let c = FundamentalChamber { components, ambient_dim: j.ambient_dim, basis: j.basis.iter().map(|b| vec_in(b)).collect::<Result<_>>()? };
    if c.basis.iter().any(|b| b.dim() != c.ambient_dim) {
        return Err(bad("basis dimension mismatch"));
    }
    c.validate()?;
    Ok(c)
}

fn cut_from_str(s: &str) -> Result<Cut> {
    let k = |rest: &str| -> Result<u32> { rest.strip_suffix("delta").and_then(|x| x.parse().ok()).ok_or_else(|| bad(format!("bad cut {s:?}"))) };
    if s == "none" {
        Ok(Cut::None)
    } else if let Some(r) = s.strip_prefix("theta'+") {
        Ok(Cut::ThetaPrime(k(r)?))
    } else if let Some(r) = s.strip_prefix("theta+") {
        Ok(Cut::Lowest(k(r)?))
    } else {
        Err(bad(format!("bad cut {s:?}")))
    }
}

pub fn subgroup_to_json(r: &SubgroupRecord) -> SubgroupJson {
    SubgroupJson {
        host: format!("t{}", r.host),
        label: r.label(),
        index: r.index.finite(),
        host_diagram: diagram_to_json(&r.host_diagram, &[DiagramClass::Parabolic(r.host)], &diagram::special_positions(&r.host_diagram)),
        sub_diagram: diagram_to_json(&r.sub_diagram, &r.sub_classes, &diagram::special_positions(&r.sub_diagram)),
        sub_classes: r.sub_classes.iter().map(|c| c.to_string()).collect(),
        chamber: chamber_to_json(&r.chamber),
        trace: r
            .trace
            .iter()
            .map(|t| TraceJson {
                component: t.component.to_string(),
                simple_roots: t.simple_roots.iter().map(vec_out).collect(),
                cut: t.cut.to_string(),
                beta: t.beta.as_ref().map(|b| AffineRootJson { finite_part: vec_out(&b.finite_part), level: format_q(&b.level) }),
                word: t.word.clone(),
            })
            .collect(),
    }
}

pub fn subgroup_from_json(j: &SubgroupJson) -> Result<SubgroupRecord> {
    let host: CartanType = j.host.strip_prefix('t').ok_or_else(|| bad(format!("host {:?} is not affine", j.host)))?.parse()?;
    Ok(SubgroupRecord {
        host,
        host_diagram: diagram_from_json(&j.host_diagram)?,
        sub_diagram: diagram_from_json(&j.sub_diagram)?,
        sub_classes: j.sub_classes.iter().map(|s| class_from_str(s)).collect::<Result<_>>()?,
        chamber: chamber_from_json(&j.chamber)?,
        index: j.index.map_or(Index::Infinite, Index::Finite),
        trace: j
            .trace
            .iter()
            .map(|t| {
                Ok(TraceStep {
                    component: t.component.parse()?,
                    simple_roots: t.simple_roots.iter().map(|v| vec_in(v)).collect::<Result<_>>()?,
                    cut: cut_from_str(&t.cut)?,
                    beta: t.beta.as_ref().map(|b| Ok::<_, Error>(AffineRoot { finite_part: vec_in(&b.finite_part)?, level: rat(&b.level)? })).transpose()?,
                    word: t.word.clone(),
                })
            })
            .collect::<Result<_>>()?,
    })
}

fn wrap<T: Serialize>(kind: &str, payload: &T) -> String {
    let rec = JsonRecord { schema_version: SCHEMA_VERSION, kind: kind.into(), payload: serde_json::to_value(payload).expect("serializable") };
    serde_json::to_string_pretty(&rec).expect("serializable")
}

/// Parse the envelope, checking version and kind.
pub fn unwrap_record(text: &str, kind: &str) -> Result<serde_json::Value> {
    let rec: JsonRecord = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if rec.schema_version != SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema_version {}", rec.schema_version)));
    }
    if rec.kind != kind {
        return Err(bad(format!("expected kind {kind:?}, got {:?}", rec.kind)));
    }
    Ok(rec.payload)
}

fn payload<T: for<'de> Deserialize<'de>>(text: &str, kind: &str) -> Result<T> {
    serde_json::from_value(unwrap_record(text, kind)?).map_err(|e| bad(e.to_string()))
}

pub fn emit_diagram(d: &CoxeterDiagram, classes: &[DiagramClass], special: &[usize]) -> String {
    wrap("diagram", &diagram_to_json(d, classes, special))
}

pub fn parse_diagram(text: &str) -> Result<(CoxeterDiagram, Vec<DiagramClass>, Vec<usize>)> {
    let j: DiagramJson = payload(text, "diagram")?;
    Ok((diagram_from_json(&j)?, j.classes.iter().map(|s| class_from_str(s)).collect::<Result<_>>()?, j.special))
}

pub fn emit_subgroup(r: &SubgroupRecord) -> String {
    wrap("subgroup", &subgroup_to_json(r))
}

pub fn parse_subgroup(text: &str) -> Result<SubgroupRecord> {
    subgroup_from_json(&payload(text, "subgroup")?)
}

pub fn emit_report(r: &Report) -> String {
    wrap("verification-report", r)
}

pub fn parse_report(text: &str) -> Result<Report> {
    payload(text, "verification-report")
}

/// Chamber file for the `index` command: a bare chamber payload under
/// kind `subgroup` is not required; either a full subgroup record or a
/// `{"schema_version":1,"kind":"chamber","payload":...}` envelope works.
pub fn parse_chamber_file(text: &str) -> Result<FundamentalChamber> {
    let rec: JsonRecord = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    match rec.kind.as_str() {
        "subgroup" => Ok(parse_subgroup(text)?.chamber),
        "chamber" => {
            if rec.schema_version != SCHEMA_VERSION {
                return Err(bad(format!("unsupported schema_version {}", rec.schema_version)));
            }
            chamber_from_json(&serde_json::from_value(rec.payload).map_err(|e| bad(e.to_string()))?)
        }
        k => Err(bad(format!("kind {k:?} carries no chamber"))),
    }
}

pub fn emit_chamber(c: &FundamentalChamber) -> String {
    wrap("chamber", &chamber_to_json(c))
}

pub fn finite_subgroup_to_json(r: &SubsystemRecord) -> FiniteSubgroupJson {
    FiniteSubgroupJson {
        host: r.host.to_string(),
        label: r.label_string(),
        types: r.types.iter().map(|t| t.to_string()).collect(),
        index: r.index_in_host,
        is_root_subsystem: r.is_root_subsystem,
        simple_roots: r.simple_roots.iter().map(vec_out).collect(),
    }
}

pub fn emit_finite_subgroup(r: &SubsystemRecord) -> String {
    wrap("finite-subgroup", &finite_subgroup_to_json(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroups::{exceptional_subgroups, homothety_subgroup, maximal_decomposable_subgroups};

    #[test]
    fn subgroup_round_trip() {
        let recs = [
            exceptional_subgroups("F4".parse().unwrap()).unwrap(),
            homothety_subgroup("A2".parse().unwrap(), 3).unwrap(),
            maximal_decomposable_subgroups("G2".parse().unwrap()).unwrap().remove(0),
        ];
        for r in recs {
            let s = emit_subgroup(&r);
            let back = parse_subgroup(&s).unwrap();
            assert_eq!(back, r);
            assert_eq!(emit_subgroup(&back), s);
        }
    }

    #[test]
    fn rationals_are_fractions() {
        let r = homothety_subgroup("C2".parse().unwrap(), 1).unwrap();
        let s = emit_subgroup(&r);
        assert!(s.contains("\"0/1\""));
        assert!(!s.contains('.'));
    }

    #[test]
    fn rejects_bad_envelopes() {
        let d = CoxeterDiagram::parse("1 2 3").unwrap();
        let s = emit_diagram(&d, &[], &[]);
        assert!(parse_subgroup(&s).is_err());
        assert!(parse_diagram(&s.replace("\"schema_version\": 1", "\"schema_version\": 2")).is_err());
        let (d2, _, _) = parse_diagram(&s).unwrap();
        assert_eq!(d2, d);
    }

    #[test]
    fn chamber_file() {
        let r = exceptional_subgroups("C2".parse().unwrap()).unwrap();
        let c = parse_chamber_file(&emit_chamber(&r.chamber)).unwrap();
        assert_eq!(c, r.chamber);
        assert_eq!(parse_chamber_file(&emit_subgroup(&r)).unwrap(), r.chamber);
    }
}
