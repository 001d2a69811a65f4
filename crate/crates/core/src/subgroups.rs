//! Reflection subgroups of affine Weyl groups.
//!
//! A finite-index subgroup is built from a vertex `U` of the alcove, a
//! maximal-rank reflection subgroup of the stabilizer of `U`, and for each
//! irreducible component one extra mirror cutting its cone into a simplex:
//! `theta + k delta` (the lowest root) or, for `B`, `C`, `F4`, `G2`, the
//! additional root `theta' + k delta`. Indices are volume ratios.

use crate::affine::{build_alcove, chamber_volume, AffineRoot, ComponentKind, FundamentalChamber, Volume};
use crate::diagram::{self, CoxeterDiagram, DiagramClass};
use crate::error::{Error, Result};
use crate::linalg::{coordinates_in, format_q, q, qf, Vector, Q};
use crate::rootsys::{self, cartan_matrix_of, classify_cartan_matrix, CartanType, Family};
use crate::subsystems::{self, SubsystemRecord};
use crate::manifest;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

/// Extra mirror for one component of the finite part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    /// Leave the cone unbounded.
    None,
    /// `theta + k delta`, `theta` the lowest root of the component.
    Lowest(u32),
    /// `theta' + k delta` with `theta'` the additional root of the component.
    ThetaPrime(u32),
}

impl Cut {
    pub fn k(self) -> Option<u32> {
        match self {
            Cut::None => None,
            Cut::Lowest(k) | Cut::ThetaPrime(k) => Some(k),
        }
    }

    fn with_k(self, k: u32) -> Cut {
        match self {
            Cut::None => Cut::None,
            Cut::Lowest(_) => Cut::Lowest(k),
            Cut::ThetaPrime(_) => Cut::ThetaPrime(k),
        }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::None => write!(f, "none"),
            Cut::Lowest(k) => write!(f, "theta+{k}delta"),
            Cut::ThetaPrime(k) => write!(f, "theta'+{k}delta"),
        }
    }
}

/// Reflection subgroup of the stabilizer of `vertex`: simple roots per
/// irreducible component (finite parts; every mirror passes through
/// `vertex`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePart {
    pub vertex: Vector,
    pub components: Vec<Vec<Vector>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Finite(u128),
    Infinite,
}

impl Index {
    pub fn finite(self) -> Option<u128> {
        match self {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "inf"),
        }
    }
}

/// How one component of the subgroup chamber was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub component: CartanType,
    pub simple_roots: Vec<Vector>,
    pub cut: Cut,
    /// The added facet root, if any.
    pub beta: Option<AffineRoot>,
    /// Reflection word producing `beta`, for word-built chambers.
    pub word: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupRecord {
    pub host: CartanType,
    pub host_diagram: CoxeterDiagram,
    pub sub_diagram: CoxeterDiagram,
    pub sub_classes: Vec<DiagramClass>,
    pub chamber: FundamentalChamber,
    pub index: Index,
    pub trace: Vec<TraceStep>,
}

impl SubgroupRecord {
    /// Class string of the subgroup diagram, e.g. `2tA1`.
    pub fn label(&self) -> String {
        compact_classes(&self.sub_classes)
    }

    /// Index of the linear part `[W : W']`, `W'` generated by the linear
    /// parts of the chamber's reflections.
    pub fn linear_index(&self) -> Result<u128> {
        linear_part_index(self.host, &self.chamber.inward_normals())
    }

    fn from_chamber(host: CartanType, f: &FundamentalChamber, chamber: FundamentalChamber, trace: Vec<TraceStep>) -> Result<Self> {
        let sub_diagram = chamber.diagram()?;
        let sub_classes = diagram::classify(&sub_diagram)?;
        let index = if chamber.is_bounded() { Index::Finite(subgroup_index(f, &chamber)?) } else { Index::Infinite };
        Ok(SubgroupRecord { host, host_diagram: f.diagram()?, sub_diagram, sub_classes, chamber, index, trace })
    }
}

/// `2tA1+tC2`-style string with multiplicities.
pub fn compact_classes(classes: &[DiagramClass]) -> String {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for c in classes {
        *counts.entry(c.to_string()).or_default() += 1;
    }
    if counts.is_empty() {
        return "0".into();
    }
    counts
        .iter()
        .map(|(s, &m)| if m == 1 { s.clone() } else { format!("{m}{s}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// Diagram class of the affine extension of a finite component
/// (`B1`, `C1` give `A~1`, `B2` gives `C~2`, `D2` gives `2A~1`, `D3` gives `A~3`).
pub fn affine_classes_of(t: CartanType) -> Vec<DiagramClass> {
    t.normalized()
        .into_iter()
        .map(|t| match (t.family, t.rank) {
            (Family::B, 2) => DiagramClass::Parabolic(CartanType::c(2)),
            _ => DiagramClass::Parabolic(t),
        })
        .collect()
}

/// Parse affine labels leniently: `tD3` is `tA3`, `tA0` is empty,
/// multiplicities like `2tA1` expand.
pub fn parse_affine(s: &str) -> Result<Vec<DiagramClass>> {
    let mut out = Vec::new();
    for part in s.split('+').map(str::trim) {
        let digits: String = part.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mult: usize = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| Error::IllegalType(part.into()))? };
        let body = part[digits.len()..].strip_prefix('t').ok_or_else(|| Error::IllegalType(part.into()))?;
        if body.len() >= 2 && body[1..].parse::<usize>() == Ok(0) {
            continue;
        }
        let t: CartanType = body.parse()?;
        for _ in 0..mult {
            out.extend(affine_classes_of(t));
        }
    }
    out.sort();
    Ok(out)
}

fn linear_part_index(host: CartanType, normals: &[Vector]) -> Result<u128> {
    let mut roots = rootsys::reflection_closure(normals);
    roots.sort();
    roots.dedup();
    let report = rootsys::identify_type(&roots)?;
    Ok(host.weyl_order() / rootsys::weyl_order(&report.normalized))
}

/// Type and Bourbaki-ordered simple roots of an irreducible simple system.
fn classify_component(simple: &[Vector]) -> Result<(CartanType, Vec<Vector>)> {
    let (t, p) = classify_cartan_matrix(&cartan_matrix_of(simple)).ok_or(Error::Decomposable)?;
    Ok((t, p.iter().map(|&i| simple[i].clone()).collect()))
}

/// Lowest root relative to the given simple roots.
fn lowest_relative(simple: &[Vector]) -> Vector {
    rootsys::reflection_closure(simple)
        .into_iter()
        .filter_map(|r| {
            let c = coordinates_in(simple, &r)?;
            c.0.iter().all(|x| !x.is_positive()).then(|| (c.0.iter().sum::<Q>(), r))
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .map(|(_, r)| r)
        .expect("nonempty root system")
}

/// Whether a component type admits the additional root `theta'`.
pub fn has_theta_prime(t: CartanType) -> bool {
    match t.family {
        Family::B | Family::C => t.rank >= 2,
        Family::F | Family::G => true,
        _ => false,
    }
}

/// The additional root `theta'` of an irreducible component given by its
/// Bourbaki-ordered simple roots `gamma`:
/// `B_l`: `(theta - gamma_1)/2`; `C_l` (`l >= 3`): `gamma_1 + theta`;
/// `C_2`: `gamma_1 + theta` with `gamma_1` the short simple root;
/// `G_2`: `gamma_1 + gamma_2 + theta`; `F_4`: `gamma_1 + gamma_2 + gamma_3 + theta`.
/// The result is checked to be a root of the component making no acute
/// angle with any `gamma_i`.
pub fn theta_prime(t: CartanType, gamma: &[Vector]) -> Result<Vector> {
    let theta = lowest_relative(gamma);
    let v = match (t.family, t.rank) {
        (Family::B | Family::C, 2) => {
            let short = if gamma[0].norm2() < gamma[1].norm2() { &gamma[0] } else { &gamma[1] };
            short.add(&theta)
        }
        (Family::B, l) if l >= 3 => theta.sub(&gamma[0]).scale(&qf(1, 2)),
        (Family::C, l) if l >= 3 => gamma[0].add(&theta),
        (Family::G, _) => gamma[0].add(&gamma[1]).add(&theta),
        (Family::F, _) => gamma[0].add(&gamma[1]).add(&gamma[2]).add(&theta),
        _ => return Err(Error::BadThetaPrime(t.to_string())),
    };
    let roots = rootsys::reflection_closure(gamma);
    if !roots.contains(&v) {
        return Err(Error::BadThetaPrime(t.to_string()));
    }
    for (i, g) in gamma.iter().enumerate() {
        if v.dot(g).is_positive() {
            return Err(Error::AcuteAngle(format!("simple root {} of {t}", i + 1)));
        }
    }
    Ok(v)
}

fn integral(x: &Q) -> bool {
    x.is_integer()
}

/// Build the subgroup chamber from a finite part and one cut per
/// component.
pub fn construct_subgroup(host: CartanType, fp: &FinitePart, cuts: &[Cut]) -> Result<SubgroupRecord> {
    let f = build_alcove(host)?;
    let sys = rootsys::build_root_system(host)?;
    if cuts.len() != fp.components.len() {
        return Err(Error::DegenerateChamber(format!("{} cuts for {} components", cuts.len(), fp.components.len())));
    }
    for (i, a) in fp.components.iter().enumerate() {
        for b in &fp.components[i + 1..] {
            if a.iter().any(|x| b.iter().any(|y| !x.dot(y).is_zero())) {
                return Err(Error::NotOrthogonal);
            }
        }
    }
    let mut groups = Vec::new();
    let mut trace = Vec::new();
    for (gam, &cut) in fp.components.iter().zip(cuts) {
        for g in gam {
            if !sys.is_root(g) || !integral(&g.dot(&fp.vertex)) {
                return Err(Error::NotHostRoot);
            }
        }
        let (t, gam) = classify_component(gam)?;
        let mut roots: Vec<AffineRoot> = gam.iter().map(|g| AffineRoot::new(g.clone(), -g.dot(&fp.vertex))).collect::<Result<_>>()?;
        let dir = match cut {
            Cut::None => None,
            Cut::Lowest(_) => Some(lowest_relative(&gam)),
            Cut::ThetaPrime(_) => {
                if !has_theta_prime(t) {
                    return Err(Error::BadThetaPrime(t.to_string()));
                }
                Some(theta_prime(t, &gam)?)
            }
        };
        let beta = match (dir, cut.k()) {
            (Some(d), Some(k)) => {
                if k == 0 {
                    return Err(Error::DegenerateChamber("cut parameter k must be positive".into()));
                }
                for (i, g) in gam.iter().enumerate() {
                    if d.dot(g).is_positive() {
                        return Err(Error::AcuteAngle(format!("simple root {} of {t}", i + 1)));
                    }
                }
                let level = -d.dot(&fp.vertex) + q(k as i128);
                let b = AffineRoot::new(d, level)?;
                roots.push(b.clone());
                Some(b)
            }
            _ => None,
        };
        groups.push(roots);
        trace.push(TraceStep { component: t, simple_roots: gam, cut, beta, word: None });
    }
    let chamber = FundamentalChamber::from_affine_roots(&groups, f.basis.clone())?;
    SubgroupRecord::from_chamber(host, &f, chamber, trace)
}

/// `[G_F : G_P] = Vol(P) / Vol(F)`, required to be an integer.
pub fn subgroup_index(f: &FundamentalChamber, p: &FundamentalChamber) -> Result<u128> {
    if !p.is_bounded() {
        return Err(Error::UnboundedChamber);
    }
    let mut p = p.clone();
    p.basis = f.basis.clone();
    let (Volume::Finite(vp), Volume::Finite(vf)) = (chamber_volume(&p)?, chamber_volume(f)?) else {
        return Err(Error::UnboundedChamber);
    };
    let r = vp / vf;
    if !r.is_integer() || !r.is_positive() {
        return Err(Error::NonIntegerRatio(format_q(&r)));
    }
    Ok(r.to_integer() as u128)
}

/// An alcove with its facets (same order as the fundamental alcove) and
/// vertices (vertex `j` opposite facet `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alcove {
    pub facets: Vec<AffineRoot>,
    pub vertices: Vec<Vector>,
}

impl Alcove {
    pub fn fundamental(f: &FundamentalChamber) -> Result<Self> {
        if f.components.len() != 1 || f.components[0].kind != ComponentKind::Simplex {
            return Err(Error::NotSimplex);
        }
        Ok(Alcove { facets: f.facet_roots(), vertices: f.simplex_vertices(0)? })
    }

    /// Neighbor across facet `i`.
    pub fn reflect(&self, i: usize) -> Alcove {
        let h = &self.facets[i];
        let mut vertices = self.vertices.clone();
        vertices[i] = h.reflect_point(&self.vertices[i]);
        Alcove { facets: self.facets.iter().map(|r| h.reflect_root(r)).collect(), vertices }
    }

    /// Sum of the vertices (a scaled centroid, used as a key).
    pub fn key(&self) -> Vector {
        self.vertices.iter().fold(Vector::zeros(self.vertices[0].dim()), |a, v| a.add(v))
    }

    pub fn centroid(&self) -> Vector {
        self.key().scale(&(Q::one() / q(self.vertices.len() as i128)))
    }
}

/// Alcoves tiling a bounded chamber `p`, found by walking from `F` to an
/// interior point of `p` and flooding across facets. Fails once more than
/// `cap` alcoves are visited.
pub fn alcoves_in(f: &FundamentalChamber, p: &FundamentalChamber, cap: usize) -> Result<Vec<Alcove>> {
    if !p.is_bounded() {
        return Err(Error::UnboundedChamber);
    }
    let target = p.centroid()?;
    let mut cur = Alcove::fundamental(f)?;
    let mut steps = 0usize;
    while let Some(i) = cur.facets.iter().position(|r| r.eval(&target).is_negative()) {
        cur = cur.reflect(i);
        steps += 1;
        if steps > 100 * cap + 1000 {
            return Err(Error::CapExceeded(cap));
        }
    }
    let inside = |a: &Alcove| p.contains(&a.centroid(), true);
    if !inside(&cur) {
        return Err(Error::DegenerateChamber("chamber is not a union of alcoves".into()));
    }
    let mut seen: HashSet<Vector> = HashSet::from([cur.key()]);
    let mut queue = VecDeque::from([cur]);
    let mut out = Vec::new();
    while let Some(a) = queue.pop_front() {
        for i in 0..a.facets.len() {
            let b = a.reflect(i);
            if seen.insert(b.key()) && inside(&b) {
                queue.push_back(b);
            }
        }
        out.push(a);
        if out.len() > cap {
            return Err(Error::CapExceeded(cap));
        }
    }
    Ok(out)
}

/// Count host alcoves inside `p` (an independent check of
/// [`subgroup_index`]).
pub fn tiling_index_oracle(f: &FundamentalChamber, p: &FundamentalChamber, cap: usize) -> Result<u128> {
    Ok(alcoves_in(f, p, cap)?.len() as u128)
}

/// Alcove dilated by `k` about the origin (a special vertex).
pub fn homothety_subgroup(host: CartanType, k: u32) -> Result<SubgroupRecord> {
    let sys = rootsys::build_root_system(host)?;
    let fp = FinitePart { vertex: Vector::zeros(sys.ambient_dim), components: vec![sys.simple_roots.clone()] };
    construct_subgroup(host, &fp, &[Cut::Lowest(k)])
}

/// A reflection word `r_{i1} ... r_{im} (xi_s)`: the facet root with label
/// `s`, reflected in the facets with labels `im`, ..., `i1` (rightmost
/// first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<usize>,
    pub source: usize,
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "r{l} ")?;
        }
        write!(f, "(xi{})", self.source)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Grammar: `("r" N)* "(" "xi" N ")"`, whitespace-separated letters,
    /// optional `_` after `r`/`xi`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |col: usize, m: &str| Error::Parse { line: 1, column: col + 1, message: m.to_string() };
        let b = s.as_bytes();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < b.len() && b[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let number = |i: &mut usize| -> Result<usize> {
            if *i < b.len() && b[*i] == b'_' {
                *i += 1;
            }
            let st = *i;
            while *i < b.len() && b[*i].is_ascii_digit() {
                *i += 1;
            }
            let v: usize = s[st..*i].parse().map_err(|_| err(st, "expected a label"))?;
            if v == 0 {
                return Err(err(st, "labels start at 1"));
            }
            Ok(v)
        };
        let mut letters = Vec::new();
        loop {
            skip_ws(&mut i);
            match b.get(i) {
                Some(b'r') => {
                    i += 1;
                    letters.push(number(&mut i)?);
                }
                Some(b'(') => break,
                Some(_) => return Err(err(i, "expected 'r' or '('")),
                None => return Err(err(i, "missing '(xi..)'")),
            }
        }
        i += 1;
        skip_ws(&mut i);
        if !s[i..].starts_with("xi") {
            return Err(err(i, "expected 'xi'"));
        }
        i += 2;
        let source = number(&mut i)?;
        skip_ws(&mut i);
        if b.get(i) != Some(&b')') {
            return Err(err(i, "expected ')'"));
        }
        i += 1;
        skip_ws(&mut i);
        if i != b.len() {
            return Err(err(i, "trailing input"));
        }
        Ok(Word { letters, source })
    }
}

/// Facet index in [`build_alcove`] order for a facet name: `a<i>` is
/// simple root `i`, `t` the lowest-root facet.
pub fn facet_by_name(host: CartanType, name: &str) -> Result<usize> {
    if name == "t" {
        return Ok(host.rank);
    }
    let i: usize = name
        .strip_prefix('a')
        .and_then(|x| x.parse().ok())
        .filter(|&i| (1..=host.rank).contains(&i))
        .ok_or_else(|| Error::Manifest(format!("bad facet name {name} for {host}")))?;
    Ok(i - 1)
}

/// Evaluate a word on the fundamental alcove; `numbering[l - 1]` is the
/// facet with label `l`.
pub fn apply_word(f: &FundamentalChamber, numbering: &[usize], w: &Word) -> Result<AffineRoot> {
    let roots = f.facet_roots();
    let facet = |l: usize| -> Result<&AffineRoot> {
        numbering.get(l.wrapping_sub(1)).and_then(|&i| roots.get(i)).ok_or(Error::UnknownNode(l))
    };
    let mut rho = facet(w.source)?.clone();
    for &l in w.letters.iter().rev() {
        rho = facet(l)?.reflect_root(&rho);
    }
    Ok(rho)
}

/// Replace the facet labelled `dropped` by the image of a word.
pub fn word_subgroup(host: CartanType, numbering: &[String], word: &str, dropped: usize) -> Result<SubgroupRecord> {
    let f = build_alcove(host)?;
    let numbering: Vec<usize> = numbering.iter().map(|n| facet_by_name(host, n)).collect::<Result<_>>()?;
    let w: Word = word.parse()?;
    let rho = apply_word(&f, &numbering, &w)?;
    let roots = f.facet_roots();
    let mut facets: Vec<AffineRoot> = (1..=numbering.len()).filter(|&l| l != dropped).map(|l| roots[numbering[l - 1]].clone()).collect();
    for r in &facets {
        if r.finite_part.dot(&rho.finite_part).is_positive() {
            return Err(Error::AcuteAngle(format!("word image {w}")));
        }
    }
    facets.push(rho.clone());
    let chamber = FundamentalChamber::from_affine_roots(&[facets], f.basis.clone())?;
    let t = diagram::classify_connected(&chamber.diagram()?)?;
    let component = match t {
        DiagramClass::Parabolic(t) => t,
        _ => return Err(Error::NotParabolic),
    };
    let trace = vec![TraceStep { component, simple_roots: vec![], cut: Cut::None, beta: Some(rho), word: Some(w.to_string()) }];
    SubgroupRecord::from_chamber(host, &f, chamber, trace)
}

fn host_key(t: CartanType) -> String {
    format!("t{t}")
}

/// The self-similar subgroup that is not homothetic to the host.
pub fn exceptional_subgroups(t: CartanType) -> Result<SubgroupRecord> {
    let row = manifest::exceptional_rows()?
        .into_iter()
        .find(|r| r.host == host_key(t))
        .ok_or_else(|| Error::NotExceptionalType(host_key(t)))?;
    word_subgroup(t, &row.numbering, &row.word, row.dropped)
}


fn affine_map(a: &Alcove, fa: &Alcove, sigma: &[usize]) -> impl Fn(&Vector) -> Option<Vector> {
    let edges: Vec<Vector> = a.vertices[1..].iter().map(|v| v.sub(&a.vertices[0])).collect();
    let base = fa.vertices[sigma[0]].clone();
    let images: Vec<Vector> = (1..sigma.len()).map(|j| fa.vertices[sigma[j]].sub(&base)).collect();
    let origin = a.vertices[0].clone();
    move |x: &Vector| {
        let c = coordinates_in(&edges, &x.sub(&origin))?;
        Some(images.iter().zip(&c.0).fold(base.clone(), |acc, (e, s)| acc.axpy(s, e)))
    }
}

/// Canonical form of a bounded subgroup chamber under the automorphisms of
/// the host tiling: over every alcove `A` inside the chamber and every
/// diagram automorphism, map `A` onto the fundamental alcove and take the
/// least sorted vertex list of the image. Two chambers have equal keys
/// iff an automorphism of the host tiling carries one onto the other.
pub fn canonical_key(r: &SubgroupRecord) -> Result<Vec<Vector>> {
    let idx = r.index.finite().ok_or(Error::UnboundedChamber)?;
    let f = build_alcove(r.host)?;
    let fa = Alcove::fundamental(&f)?;
    let d = f.diagram()?;
    let auts = diagram::isomorphisms(&d, &d);
    let verts = r.chamber.vertices()?;
    let mut best: Option<Vec<Vector>> = None;
    for a in alcoves_in(&f, &r.chamber, idx as usize)? {
        for s in &auts {
            let g = affine_map(&a, &fa, s);
            let mut img: Vec<Vector> = verts.iter().map(|v| g(v).ok_or_else(|| Error::DegenerateChamber("vertex outside span".into()))).collect::<Result<_>>()?;
            img.sort();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.ok_or(Error::UnboundedChamber)
}

/// Whether an automorphism of the host tiling carries one subgroup
/// chamber onto the other (both bounded).
pub fn are_equivalent(a: &SubgroupRecord, b: &SubgroupRecord) -> Result<bool> {
    if a.host != b.host {
        return Err(Error::HostMismatch);
    }
    if a.index != b.index || a.sub_classes != b.sub_classes {
        return Ok(false);
    }
    Ok(canonical_key(a)? == canonical_key(b)?)
}

/// Maximal-rank reflection subgroups of the irreducible system with
/// Bourbaki simple roots `gam`, up to conjugacy, as simple roots per
/// component.
fn max_rank_classes(t: CartanType, gam: &[Vector]) -> Result<Vec<Vec<Vec<Vector>>>> {
    let std = rootsys::standard_simple_roots(t);
    let map = |r: &Vector| -> Vector {
        let c = coordinates_in(&std, r).expect("root in span");
        gam.iter().zip(&c.0).fold(Vector::zeros(gam[0].dim()), |acc, (g, s)| acc.axpy(s, g))
    };
    Ok(subsystems::enumerate_reflection_subgroups(t, false)?
        .into_iter()
        .filter(|r| r.rank() == t.rank)
        .map(|r| r.components.iter().map(|c| c.simple_roots.iter().map(&map).collect()).collect())
        .collect())
}

/// Irreducible components (by non-orthogonality) of a set of simple roots.
fn split_components(simple: &[Vector]) -> Vec<Vec<Vector>> {
    let n = simple.len();
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<Vector>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut stack = vec![s];
        let mut g = Vec::new();
        while let Some(i) = stack.pop() {
            g.push(i);
            for j in 0..n {
                if comp[j] == usize::MAX && !simple[i].dot(&simple[j]).is_zero() {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        g.sort();
        out.push(g.into_iter().map(|i| simple[i].clone()).collect());
    }
    out
}

/// Maximal-rank finite parts at every vertex of the alcove.
pub fn finite_parts(host: CartanType) -> Result<Vec<FinitePart>> {
    let f = build_alcove(host)?;
    let verts = f.simplex_vertices(0)?;
    let normals = f.inward_normals();
    let mut out = Vec::new();
    for (j, u) in verts.iter().enumerate() {
        let gens: Vec<Vector> = normals.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.clone()).collect();
        let mut choices: Vec<Vec<Vec<Vec<Vector>>>> = Vec::new();
        for c in split_components(&gens) {
            let (t, gam) = classify_component(&c)?;
            choices.push(max_rank_classes(t, &gam)?);
        }
        let mut acc: Vec<Vec<Vec<Vector>>> = vec![vec![]];
        for ch in &choices {
            acc = acc.iter().flat_map(|a| ch.iter().map(move |c| a.iter().chain(c).cloned().collect())).collect();
        }
        out.extend(acc.into_iter().map(|components| FinitePart { vertex: u.clone(), components }));
    }
    Ok(out)
}

/// Cut vectors with `base * prod k_i^{d_i} <= bound`.
fn k_vectors(dims: &[usize], base: u128, bound: u128) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn go(dims: &[usize], i: usize, cur: &mut Vec<u32>, prod: u128, bound: u128, out: &mut Vec<Vec<u32>>) {
        if i == dims.len() {
            out.push(cur.clone());
            return;
        }
        let mut k = 1u32;
        loop {
            let p = prod * (k as u128).pow(dims[i] as u32);
            if p > bound {
                break;
            }
            cur.push(k);
            go(dims, i + 1, cur, p, bound, out);
            cur.pop();
            k += 1;
        }
    }
    go(dims, 0, &mut Vec::new(), base, bound, &mut out);
    out
}

/// All finite-index reflection subgroups of index at most `max_index`, one
/// per orbit of the automorphism group of the host tiling, sorted by
/// index and label.
pub fn enumerate_subgroups(host: CartanType, max_index: u128) -> Result<Vec<SubgroupRecord>> {
    if max_index == 0 {
        return Err(Error::DegenerateChamber("max_index must be positive".into()));
    }
    let parts = finite_parts(host)?;
    let mut jobs: Vec<(FinitePart, Vec<Cut>)> = Vec::new();
    for fp in parts {
        let mut kinds: Vec<Vec<Cut>> = vec![vec![]];
        for c in &fp.components {
            let (t, _) = classify_component(c)?;
            let opts = if has_theta_prime(t) { vec![Cut::Lowest(1), Cut::ThetaPrime(1)] } else { vec![Cut::Lowest(1)] };
            kinds = kinds.iter().flat_map(|k| opts.iter().map(move |o| k.iter().copied().chain([*o]).collect())).collect();
        }
        jobs.extend(kinds.into_iter().map(|k| (fp.clone(), k)));
    }
    let records: Vec<SubgroupRecord> = jobs
        .par_iter()
        .map(|(fp, cuts)| -> Result<Vec<SubgroupRecord>> {
            let base = construct_subgroup(host, fp, cuts)?;
            let b = base.index.finite().ok_or(Error::UnboundedChamber)?;
            let dims: Vec<usize> = fp.components.iter().map(|c| c.len()).collect();
            k_vectors(&dims, b, max_index)
                .into_iter()
                .map(|ks| {
                    let cuts: Vec<Cut> = cuts.iter().zip(&ks).map(|(c, &k)| c.with_k(k)).collect();
                    construct_subgroup(host, fp, &cuts)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    dedupe(records)
}

/// Keep one record per equivalence class, sorted by index, label, key.
pub fn dedupe(records: Vec<SubgroupRecord>) -> Result<Vec<SubgroupRecord>> {
    let keyed: Vec<(Vec<Vector>, SubgroupRecord)> = records
        .into_par_iter()
        .map(|r| Ok((canonical_key(&r)?, r)))
        .collect::<Result<_>>()?;
    let mut seen: BTreeMap<(Index, String, Vec<Vector>), SubgroupRecord> = BTreeMap::new();
    for (k, r) in keyed {
        seen.entry((r.index, r.label(), k)).or_insert(r);
    }
    Ok(seen.into_values().collect())
}

/// The subgroup generated by all host mirrors parallel to mirrors of a
/// finite reflection subgroup (taken at the origin).
pub fn g_extension(host: CartanType, finite_sub: &SubsystemRecord) -> Result<SubgroupRecord> {
    if finite_sub.host != host {
        return Err(Error::HostMismatch);
    }
    let sys = rootsys::build_root_system(host)?;
    let fp = FinitePart {
        vertex: Vector::zeros(sys.ambient_dim),
        components: finite_sub.components.iter().map(|c| c.simple_roots.clone()).collect(),
    };
    let cuts = vec![Cut::Lowest(1); fp.components.len()];
    construct_subgroup(host, &fp, &cuts)
}

/// Extensions of the decomposable maximal-rank maximal finite subgroups.
pub fn maximal_decomposable_subgroups(t: CartanType) -> Result<Vec<SubgroupRecord>> {
    subsystems::maximal_finite_subgroups(t)?
        .iter()
        .filter(|r| r.rank() == t.rank && r.components.len() > 1)
        .map(|r| g_extension(t, r))
        .collect()
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Apply the self-similar word of `t` to the chamber of `e` (similar to
/// the alcove), giving a subgroup of `G_e`.
#[cfg(test)]
fn exceptional_inside(t: CartanType, e: &SubgroupRecord) -> Result<SubgroupRecord> {
    let row = manifest::exceptional_rows()?
        .into_iter()
        .find(|r| r.host == host_key(t))
        .ok_or_else(|| Error::NotExceptionalType(host_key(t)))?;
    let f = build_alcove(t)?;
    let df = f.diagram()?;
    let de = e.chamber.diagram()?;
    let iso = diagram::isomorphisms(&df, &de).into_iter().next().ok_or(Error::NotSimplex)?;
    let roots = e.chamber.facet_roots();
    let numbering: Vec<usize> = row.numbering.iter().map(|n| facet_by_name(t, n).map(|i| iso[i])).collect::<Result<_>>()?;
    let w: Word = row.word.parse()?;
    let mut rho = roots[numbering[w.source - 1]].clone();
    for &l in w.letters.iter().rev() {
        rho = roots[numbering[l - 1]].reflect_root(&rho);
    }
    let mut facets: Vec<AffineRoot> = (1..=numbering.len()).filter(|&l| l != row.dropped).map(|l| roots[numbering[l - 1]].clone()).collect();
    facets.push(rho);
    let chamber = FundamentalChamber::from_affine_roots(&[facets], f.basis.clone())?;
    SubgroupRecord::from_chamber(t, &f, chamber, vec![])
}

/// Primes `p` whose homothety subgroup is not maximal: `p^n` is the index
/// of a cycle of maximal non-homothetic steps from `t` back to `t` (the
/// self-similar subgroup taken twice, or `B~n < C~n < B~n`). The composite
/// is similar to the host, so by uniqueness it is the homothety.
pub fn non_maximal_homothety_primes(t: CartanType) -> Result<Vec<u32>> {
    let mut steps: Vec<(CartanType, CartanType, u128)> = indecomposable_steps()?.to_vec();
    for row in manifest::exceptional_rows()? {
        let h: CartanType = row.host.trim_start_matches('t').parse()?;
        steps.push((h, h, row.index));
    }
    let n = t.rank as u32;
    let bound = 1u128 << 30;
    let mut out = BTreeSet::new();
    let mut stack = vec![(t, 1u128, 0usize)];
    while let Some((cur, idx, len)) = stack.pop() {
        if cur == t && len > 0 {
            if let Some(p) = (2..=idx as u32).find(|&p| (p as u128).pow(n) >= idx).filter(|&p| (p as u128).pow(n) == idx && is_prime(p)) {
                out.insert(p);
            }
        }
        for &(h, s, i) in &steps {
            if h == cur && idx * i <= bound && len < 6 {
                stack.push((s, idx * i, len + 1));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Indecomposable maximal subgroups: the word rows changing the diagram,
/// the self-similar subgroup (for `C~2`, `G~2`, `F~4`), and homotheties
/// with prime ratio up to `max_prime`.
pub fn maximal_indecomposable_subgroups(t: CartanType, max_prime: u32) -> Result<Vec<SubgroupRecord>> {
    let mut out = Vec::new();
    for row in manifest::indecomposable_rows()?.iter().filter(|r| r.host == host_key(t)) {
        out.push(word_subgroup(t, &row.numbering, &row.word, row.dropped)?);
    }
    if let Ok(e) = exceptional_subgroups(t) {
        out.push(e);
    }
    let skip = non_maximal_homothety_primes(t)?;
    for p in (2..=max_prime).filter(|&p| is_prime(p) && !skip.contains(&p)) {
        out.push(homothety_subgroup(t, p)?);
    }
    out.sort_by(|a, b| a.index.cmp(&b.index).then_with(|| a.label().cmp(&b.label())));
    Ok(out)
}

/// Whether some simplex `T` with diagram `sub` gives a subgroup of `G_F`:
/// the finite Coxeter type of `sub` must occur among the reflection
/// subgroups of the linear part of the host (so `B~l` and `C~l` are
/// interchangeable).
pub fn embedding_exists(sub: &[DiagramClass], host: CartanType) -> Result<bool> {
    let mut want = Vec::new();
    for c in sub {
        match c {
            DiagramClass::Parabolic(t) => want.push(t.coxeter_label()),
            _ => return Ok(false),
        }
    }
    want.sort();
    if want.iter().map(|t| t.rank).sum::<usize>() > host.rank {
        return Ok(false);
    }
    Ok(subsystems::enumerate_reflection_subgroups(host, false)?.iter().any(|r| {
        let mut have: Vec<CartanType> = r.types.iter().map(|t| t.coxeter_label()).collect();
        have.sort();
        have == want
    }))
}

/// Diagram-changing maximal steps `(host, sub, index)` from the word rows.
pub fn indecomposable_steps() -> Result<&'static [(CartanType, CartanType, u128)]> {
    static STEPS: std::sync::OnceLock<std::result::Result<Vec<(CartanType, CartanType, u128)>, Error>> = std::sync::OnceLock::new();
    STEPS
        .get_or_init(|| {
            manifest::indecomposable_rows()?
                .par_iter()
                .map(|row| {
                    let h: CartanType = row.host.trim_start_matches('t').parse()?;
                    let r = word_subgroup(h, &row.numbering, &row.word, row.dropped)?;
                    let s = match r.sub_classes.as_slice() {
                        [DiagramClass::Parabolic(s)] => *s,
                        _ => return Err(Error::NotParabolic),
                    };
                    Ok((h, s, r.index.finite().ok_or(Error::UnboundedChamber)?))
                })
                .collect()
        })
        .as_ref()
        .map(|v| v.as_slice())
        .map_err(|e| e.clone())
}

/// A chain `sub = S_q < ... < S_1 = host` of diagram-changing maximal
/// steps with no repeated diagram, and `[G_{T_1} : G_P]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chain {
    /// From the subgroup up to the host.
    pub diagrams: Vec<CartanType>,
    pub index: u128,
}

/// All admissible chains from `host` down to `sub` (affine types by their
/// finite parts).
pub fn admissible_sequences(sub: CartanType, host: CartanType) -> Result<Vec<Chain>> {
    let steps = indecomposable_steps()?;
    let mut out = Vec::new();
    fn go(cur: CartanType, target: CartanType, path: &mut Vec<CartanType>, idx: u128, steps: &[(CartanType, CartanType, u128)], out: &mut Vec<Chain>) {
        if cur == target && path.len() > 1 {
            let mut d = path.clone();
            d.reverse();
            out.push(Chain { diagrams: d, index: idx });
            return;
        }
        for &(h, s, i) in steps {
            if h == cur && !path.contains(&s) {
                path.push(s);
                go(s, target, path, idx * i, steps, out);
                path.pop();
            }
        }
    }
    go(host, sub, &mut vec![host], 1, steps, &mut out);
    out.sort();
    Ok(out)
}

/// Maximal subgroups of infinite index: extensions of the maximal finite
/// subgroups of non-maximal rank, as `(host, subgroup)` diagram classes.
pub fn infinite_index_maximal_pairs(t: CartanType) -> Result<Vec<(DiagramClass, Vec<DiagramClass>)>> {
    if !diagram::is_legal_affine(t) {
        return Err(Error::IllegalType(host_key(t)));
    }
    let mut out = BTreeSet::new();
    for r in subsystems::maximal_finite_subgroups(t)?.iter().filter(|r| r.rank() < t.rank) {
        let g = g_extension(t, r)?;
        out.insert((DiagramClass::Parabolic(t), g.sub_classes));
    }
    Ok(out.into_iter().collect())
}

/// `[G'_F : G'_P]` divides `[G_F : G_P]`.
pub fn index_divisibility_check(r: &SubgroupRecord) -> bool {
    match (r.index, r.linear_index()) {
        (Index::Finite(i), Ok(l)) => l > 0 && i % l == 0,
        _ => false,
    }
}
