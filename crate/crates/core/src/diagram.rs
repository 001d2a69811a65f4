//! Coxeter diagrams: catalog classification, components, special nodes,
//! isomorphisms and canonical forms.
//!
//! Labels are the Coxeter exponents `m_ij`; absent pairs mean `m = 2`.
//! The Gram data `g_ij = -cos(pi/m_ij)` is kept in the squared integer form
//! `4 cos^2(pi/m)`, see [`GramWeights`].

use crate::error::{Error, Result};
use crate::linalg::{q, Matrix, Vector};
use crate::rootsys::{self, CartanType, Family};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Finite(u32),
    Infinite,
}

impl Label {
    /// `4 cos^2(pi/m)` for crystallographic labels.
    pub fn weight(self) -> Option<u8> {
        match self {
            Label::Finite(2) => Some(0),
            Label::Finite(3) => Some(1),
            Label::Finite(4) => Some(2),
            Label::Finite(6) => Some(3),
            Label::Infinite => Some(4),
            Label::Finite(_) => None,
        }
    }

    pub fn from_weight(w: u8) -> Option<Label> {
        Some(match w {
            0 => Label::Finite(2),
            1 => Label::Finite(3),
            2 => Label::Finite(4),
            3 => Label::Finite(6),
            4 => Label::Infinite,
            _ => return None,
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinite => write!(f, "inf"),
        }
    }
}

/// Finite labeled graph. Nodes carry external ids; edges are stored by
/// position and only for labels other than 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterDiagram {
    pub nodes: Vec<usize>,
    edges: BTreeMap<(usize, usize), Label>,
}

impl CoxeterDiagram {
    pub fn empty(n: usize) -> Self {
        CoxeterDiagram { nodes: (0..n).collect(), edges: BTreeMap::new() }
    }

    pub fn with_ids(ids: Vec<usize>) -> Self {
        CoxeterDiagram { nodes: ids, edges: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Set the label between positions `i` and `j`.
    pub fn set(&mut self, i: usize, j: usize, m: Label) {
        assert!(i != j && i < self.len() && j < self.len());
        let key = (i.min(j), i.max(j));
        if m == Label::Finite(2) {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, m);
        }
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(Label::Finite(2))
    }

    /// Edges `(i, j, m)` with `i < j` and `m != 2`, by position.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        self.edges.iter().map(|(&(i, j), &m)| (i, j, m))
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == id)
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.label(i, j) != Label::Finite(2)
    }

    /// Diagram of a set of (inward or outward) facet normals.
    pub fn from_normals(normals: &[Vector]) -> Result<Self> {
        let mut d = Self::empty(normals.len());
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                let (a, b) = (&normals[i], &normals[j]);
                let ip = a.dot(b);
                if ip > q(0) {
                    return Err(Error::AcuteAngle(format!("{a:?} / {b:?}")));
                }
                let w = q(4) * ip * ip / (a.norm2() * b.norm2());
                if !w.is_integer() || w > q(4) {
                    return Err(Error::DegenerateChamber(format!("non-crystallographic angle between {a:?} and {b:?}")));
                }
                let l = Label::from_weight(w.to_integer() as u8).unwrap();
                d.set(i, j, l);
            }
        }
        Ok(d)
    }

    /// Induced subdiagram on the given positions (ids are kept).
    pub fn induced(&self, positions: &[usize]) -> Self {
        let mut d = Self::with_ids(positions.iter().map(|&p| self.nodes[p]).collect());
        for (a, &i) in positions.iter().enumerate() {
            for (b, &j) in positions.iter().enumerate().skip(a + 1) {
                d.set(a, b, self.label(i, j));
            }
        }
        d
    }

    /// Disjoint union; ids of `other` are shifted past ours.
    pub fn union(&self, other: &CoxeterDiagram) -> Self {
        let shift = self.nodes.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut ids = self.nodes.clone();
        ids.extend(other.nodes.iter().map(|x| x + shift));
        let mut d = Self::with_ids(ids);
        d.edges = self.edges.clone();
        let n = self.len();
        for (i, j, m) in other.edges() {
            d.set(i + n, j + n, m);
        }
        d
    }

    /// Renumber ids to `0..n`.
    pub fn relabeled(&self) -> Self {
        CoxeterDiagram { nodes: (0..self.len()).collect(), edges: self.edges.clone() }
    }

    pub fn gram_weights(&self) -> Option<GramWeights> {
        let n = self.len();
        let mut w = vec![vec![0u8; n]; n];
        for (i, row) in w.iter_mut().enumerate() {
            row[i] = 4;
        }
        for (i, j, m) in self.edges() {
            let x = m.weight()?;
            w[i][j] = x;
            w[j][i] = x;
        }
        Some(GramWeights { weights: w })
    }

    /// Parse an edge list such as `1 2 3; 2 3 3; 3 1 3`.
    ///
    /// Entries are separated by `;` or newlines; each entry is `i j m`
    /// (`m` may be `inf`) or a lone node id. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut raw_edges = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let content = line.split('#').next().unwrap_or("");
            let mut col = 0usize;
            for entry in content.split(';') {
                let start = col;
                col += entry.len() + 1;
                let mut toks = Vec::new();
                let mut pos = start;
                for part in entry.split(' ') {
                    if !part.trim().is_empty() {
                        let lead = part.len() - part.trim_start().len();
                        toks.push((pos + lead + 1, part.trim()));
                    }
                    pos += part.len() + 1;
                }
                let err = |c: usize, m: String| Error::Parse { line: line_no, column: c, message: m };
                let node = |(c, t): (usize, &str)| -> Result<usize> {
                    t.parse::<usize>().map_err(|_| err(c, format!("expected node id, found `{t}`")))
                };
                match toks.len() {
                    0 => {}
                    1 => {
                        ids.insert(node(toks[0])?);
                    }
                    3 => {
                        let i = node(toks[0])?;
                        let j = node(toks[1])?;
                        if i == j {
                            return Err(err(toks[1].0, "self-edge".into()));
                        }
                        let (c, t) = toks[2];
                        let m = match t {
                            "inf" | "oo" | "∞" => Label::Infinite,
                            _ => match t.parse::<u32>() {
                                Ok(m) if m >= 2 => Label::Finite(m),
                                _ => return Err(err(c, format!("expected label >= 2 or `inf`, found `{t}`"))),
                            },
                        };
                        ids.insert(i);
                        ids.insert(j);
                        raw_edges.push((i, j, m, line_no, c));
                    }
                    _ => {
                        let c = toks.get(1).map(|t| t.0).unwrap_or(start + 1);
                        return Err(err(c, format!("expected `i j m`, found {} tokens", toks.len())));
                    }
                }
            }
        }
        let mut d = Self::with_ids(ids.into_iter().collect());
        for (i, j, m, line, column) in raw_edges {
            let (a, b) = (d.position(i).unwrap(), d.position(j).unwrap());
            let old = d.label(a, b);
            if old != Label::Finite(2) && old != m {
                return Err(Error::Parse { line, column, message: format!("conflicting labels for edge {i}-{j}") });
            }
            d.set(a, b, m);
        }
        Ok(d)
    }

    /// Edge-list text accepted by [`CoxeterDiagram::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let touched: BTreeSet<usize> = self.edges().flat_map(|(i, j, _)| [i, j]).collect();
        for (p, &id) in self.nodes.iter().enumerate() {
            if !touched.contains(&p) {
                parts.push(id.to_string());
            }
        }
        for (i, j, m) in self.edges() {
            parts.push(format!("{} {} {}", self.nodes[i], self.nodes[j], m));
        }
        parts.join("; ")
    }

    /// Graphviz rendering. Special nodes are drawn as double circles;
    /// labels 4 and 6 as double and triple strokes, infinity in bold.
    pub fn to_dot(&self, name: &str, special: &[usize]) -> String {
        let mut s = format!("graph \"{name}\" {{\n  node [shape=circle, label=\"\"];\n");
        for (p, id) in self.nodes.iter().enumerate() {
            let shape = if special.contains(&p) { "doublecircle" } else { "circle" };
            s.push_str(&format!("  n{id} [shape={shape}, xlabel=\"{id}\"];\n"));
        }
        for (i, j, m) in self.edges() {
            let style = match m {
                Label::Finite(3) => String::new(),
                Label::Finite(4) => " [color=\"black:black\"]".into(),
                Label::Finite(6) => " [color=\"black:black:black\"]".into(),
                Label::Infinite => " [style=bold, penwidth=3, label=\"inf\"]".into(),
                Label::Finite(m) => format!(" [label=\"{m}\"]"),
            };
            s.push_str(&format!("  n{} -- n{}{};\n", self.nodes[i], self.nodes[j], style));
        }
        s.push_str("}\n");
        s
    }
}

/// Integer Gram data `w_ij = 4 cos^2(pi/m_ij)`, diagonal 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramWeights {
    pub weights: Vec<Vec<u8>>,
}

impl GramWeights {
    pub fn to_diagram(&self) -> Option<CoxeterDiagram> {
        let n = self.weights.len();
        let mut d = CoxeterDiagram::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                d.set(i, j, Label::from_weight(self.weights[i][j])?);
            }
        }
        Some(d)
    }
}

/// Catalog class of a connected diagram. Parabolic types are stored by
/// their finite part (`Parabolic(B3)` is the diagram of type B~3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagramClass {
    Elliptic(CartanType),
    Parabolic(CartanType),
    NeitherOrUnknown,
}

impl fmt::Display for DiagramClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramClass::Elliptic(t) => write!(f, "{t}"),
            DiagramClass::Parabolic(t) => write!(f, "t{t}"),
            DiagramClass::NeitherOrUnknown => write!(f, "?"),
        }
    }
}

fn path(n: usize) -> CoxeterDiagram {
    let mut d = CoxeterDiagram::empty(n);
    for i in 0..n.saturating_sub(1) {
        d.set(i, i + 1, Label::Finite(3));
    }
    d
}

/// Hand-written elliptic diagram, nodes in Bourbaki order. `C_n` shares
/// the `B_n` diagram.
pub fn elliptic_diagram(t: CartanType) -> CoxeterDiagram {
    let n = t.rank;
    let mut d = path(n);
    match t.family {
        Family::A => {}
        Family::B | Family::C => {
            if n >= 2 {
                d.set(n - 2, n - 1, Label::Finite(4));
            }
        }
        Family::D => {
            d = CoxeterDiagram::empty(n);
            for i in 0..n.saturating_sub(2) {
                d.set(i, i + 1, Label::Finite(3));
            }
            if n >= 3 {
                d.set(n - 3, n - 1, Label::Finite(3));
            }
        }
        Family::E => {
            d = CoxeterDiagram::empty(n);
            d.set(0, 2, Label::Finite(3));
            d.set(1, 3, Label::Finite(3));
            for i in 2..n - 1 {
                d.set(i, i + 1, Label::Finite(3));
            }
        }
        Family::F => d.set(1, 2, Label::Finite(4)),
        Family::G => d.set(0, 1, Label::Finite(6)),
    }
    d
}

/// Hand-written parabolic diagram of type `T~`: the elliptic diagram of
/// `T` with the extending node appended as the last node.
pub fn parabolic_diagram(t: CartanType) -> CoxeterDiagram {
    let n = t.rank;
    let base = elliptic_diagram(t);
    let mut d = CoxeterDiagram::empty(n + 1);
    for (i, j, m) in base.edges() {
        d.set(i, j, m);
    }
    let ext = n;
    match t.family {
        Family::A if n == 1 => d.set(0, ext, Label::Infinite),
        Family::A => {
            d.set(0, ext, Label::Finite(3));
            d.set(n - 1, ext, Label::Finite(3));
        }
        Family::B | Family::D => d.set(1, ext, Label::Finite(3)),
        Family::C => d.set(0, ext, Label::Finite(4)),
        Family::E => match n {
            6 => d.set(1, ext, Label::Finite(3)),
            7 => d.set(0, ext, Label::Finite(3)),
            _ => d.set(7, ext, Label::Finite(3)),
        },
        Family::F => d.set(0, ext, Label::Finite(3)),
        Family::G => d.set(1, ext, Label::Finite(3)),
    }
    d
}

/// Elliptic catalog types on `n` nodes (one per diagram).
pub fn elliptic_types(n: usize) -> Vec<CartanType> {
    let mut v = vec![CartanType::a(n)];
    if n >= 2 {
        v.push(CartanType::b(n));
    }
    if n >= 4 {
        v.push(CartanType::d(n));
    }
    if (6..=8).contains(&n) {
        v.push(CartanType::e(n));
    }
    if n == 4 {
        v.push(CartanType::f4());
    }
    if n == 2 {
        v.push(CartanType::g2());
    }
    v
}

/// Affine (parabolic) catalog types of rank `n` (`n + 1` nodes).
pub fn parabolic_types(n: usize) -> Vec<CartanType> {
    let mut v = vec![CartanType::a(n)];
    if n >= 3 {
        v.push(CartanType::b(n));
    }
    if n >= 2 {
        v.push(CartanType::c(n));
    }
    if n >= 4 {
        v.push(CartanType::d(n));
    }
    if (6..=8).contains(&n) {
        v.push(CartanType::e(n));
    }
    if n == 4 {
        v.push(CartanType::f4());
    }
    if n == 2 {
        v.push(CartanType::g2());
    }
    v
}

/// Whether `t` names a legal affine type (`B~1`, `B~2`, `C~1`, `D~2`,
/// `D~3` are excluded).
pub fn is_legal_affine(t: CartanType) -> bool {
    parabolic_types(t.rank).contains(&t)
}

fn invariant(d: &CoxeterDiagram, i: usize) -> (usize, Vec<Label>) {
    let mut ls: Vec<Label> = (0..d.len()).filter(|&j| d.adjacent(i, j)).map(|j| d.label(i, j)).collect();
    ls.sort();
    (ls.len(), ls)
}

/// All label-preserving bijections `d1 -> d2` (as position maps), in
/// lexicographic order.
pub fn isomorphisms(d1: &CoxeterDiagram, d2: &CoxeterDiagram) -> Vec<Vec<usize>> {
    let n = d1.len();
    if n != d2.len() || d1.edges.len() != d2.edges.len() {
        return vec![];
    }
    let inv1: Vec<_> = (0..n).map(|i| invariant(d1, i)).collect();
    let inv2: Vec<_> = (0..n).map(|i| invariant(d2, i)).collect();
    let mut s1 = inv1.clone();
    let mut s2 = inv2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        d1: &CoxeterDiagram,
        d2: &CoxeterDiagram,
        inv1: &[(usize, Vec<Label>)],
        inv2: &[(usize, Vec<Label>)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == map.len() {
            out.push(map.clone());
            return;
        }
        for c in 0..map.len() {
            if used[c] || inv1[i] != inv2[c] {
                continue;
            }
            if (0..i).all(|j| d1.label(i, j) == d2.label(c, map[j])) {
                used[c] = true;
                map[i] = c;
                go(i + 1, d1, d2, inv1, inv2, map, used, out);
                used[c] = false;
                map[i] = usize::MAX;
            }
        }
    }
    go(0, d1, d2, &inv1, &inv2, &mut map, &mut used, &mut out);
    out
}

/// Connected components (adjacency = label other than 2), ordered by
/// smallest position.
pub fn decompose(d: &CoxeterDiagram) -> Vec<CoxeterDiagram> {
    component_positions(d).iter().map(|c| d.induced(c)).collect()
}

/// Positions of the connected components, each sorted.
pub fn component_positions(d: &CoxeterDiagram) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = vec![];
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && d.adjacent(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

struct CatalogEntry {
    class: DiagramClass,
    diagram: CoxeterDiagram,
    /// Marks of the nodes (parabolic only), computed on first use.
    marks: OnceLock<Vec<i128>>,
}

fn catalog() -> &'static HashMap<usize, Vec<CatalogEntry>> {
    static CAT: OnceLock<HashMap<usize, Vec<CatalogEntry>>> = OnceLock::new();
    CAT.get_or_init(|| {
        let mut m: HashMap<usize, Vec<CatalogEntry>> = HashMap::new();
        for n in 1..=9 {
            for t in elliptic_types(n) {
                m.entry(n).or_default().push(CatalogEntry { class: DiagramClass::Elliptic(t), diagram: elliptic_diagram(t), marks: OnceLock::new() });
            }
        }
        for n in 1..=8 {
            for t in parabolic_types(n) {
                m.entry(n + 1).or_default().push(CatalogEntry {
                    class: DiagramClass::Parabolic(t),
                    diagram: parabolic_diagram(t),
                    marks: OnceLock::new(),
                });
            }
        }
        m
    })
}

/// Marks `a_i` of `delta = sum a_i alpha_i` for the affine type `T~`, in
/// the node order of [`parabolic_diagram`] (extending node last, mark 1):
/// the primitive positive kernel vector of the generalized Cartan matrix.
pub fn affine_marks(t: CartanType) -> Vec<i128> {
    let sys = rootsys::build_root_system(t).expect("legal type");
    let mut normals = sys.simple_roots.clone();
    normals.push(rootsys::lowest_root(&sys).expect("indecomposable"));
    let n = normals.len();
    let mut cm = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // column j holds the coroot pairings of alpha_j
            cm.set(i, j, q(2) * normals[i].dot(&normals[j]) / normals[i].norm2());
        }
    }
    let k = cm.kernel();
    assert_eq!(k.len(), 1, "affine Cartan matrix has corank 1");
    let v = k[0].primitive();
    let sign = if v.0[n - 1] < q(0) { -1 } else { 1 };
    v.0.iter().map(|x| sign * x.to_integer()).collect()
}

fn find_in_catalog(d: &CoxeterDiagram) -> Option<(&'static CatalogEntry, Vec<usize>)> {
    let entries = catalog().get(&d.len())?;
    for e in entries {
        let iso = isomorphisms(d, &e.diagram);
        if let Some(m) = iso.into_iter().next() {
            return Some((e, m));
        }
    }
    None
}

/// Classify a connected diagram against the catalog of connected
/// elliptic and parabolic crystallographic diagrams.
///
/// The only parabolic diagram with an infinite label is `A~1`; any other
/// infinite label is rejected.
pub fn classify_connected(d: &CoxeterDiagram) -> Result<DiagramClass> {
    if d.is_empty() || component_positions(d).len() != 1 {
        return Err(Error::Disconnected);
    }
    if d.edges().any(|(_, _, m)| m == Label::Infinite) && d.len() != 2 {
        return Err(Error::InfiniteLabel);
    }
    if d.edges().any(|(_, _, m)| m.weight().is_none()) {
        return Ok(DiagramClass::NeitherOrUnknown);
    }
    Ok(find_in_catalog(d).map(|(e, _)| e.class).unwrap_or(DiagramClass::NeitherOrUnknown))
}

/// Classes of all components, sorted.
pub fn classify(d: &CoxeterDiagram) -> Result<Vec<DiagramClass>> {
    let mut v = decompose(d).iter().map(classify_connected).collect::<Result<Vec<_>>>()?;
    v.sort();
    Ok(v)
}

/// Marks of a connected parabolic diagram, by position.
pub fn marks(d: &CoxeterDiagram) -> Result<Vec<i128>> {
    match classify_connected(d)? {
        DiagramClass::Parabolic(_) => {}
        _ => return Err(Error::NotParabolic),
    }
    let (e, map) = find_in_catalog(d).ok_or(Error::NotParabolic)?;
    let DiagramClass::Parabolic(t) = e.class else { return Err(Error::NotParabolic) };
    let m = e.marks.get_or_init(|| affine_marks(t));
    Ok(map.iter().map(|&c| m[c]).collect())
}

/// Special nodes (mark 1) of a connected parabolic diagram, by position.
pub fn special_nodes(d: &CoxeterDiagram) -> Result<Vec<usize>> {
    Ok(marks(d)?.iter().enumerate().filter(|(_, &m)| m == 1).map(|(i, _)| i).collect())
}

/// Special node positions of every parabolic component of `d`.
pub fn special_positions(d: &CoxeterDiagram) -> Vec<usize> {
    let mut out = Vec::new();
    for (comp, pos) in decompose(d).iter().zip(component_positions(d)) {
        if let Ok(s) = special_nodes(comp) {
            out.extend(s.iter().map(|&i| pos[i]));
        }
    }
    out.sort();
    out
}

/// Delete the node with id `v`.
pub fn remove_node(d: &CoxeterDiagram, v: usize) -> Result<CoxeterDiagram> {
    let p = d.position(v).ok_or(Error::UnknownNode(v))?;
    let keep: Vec<usize> = (0..d.len()).filter(|&i| i != p).collect();
    Ok(d.induced(&keep))
}

/// Canonical form: the sorted component classes, with an explicit
/// minimal adjacency encoding for components outside the catalog.
pub fn canonical_form(d: &CoxeterDiagram) -> String {
    let mut parts: Vec<String> = decompose(d)
        .iter()
        .map(|c| match classify_connected(c) {
            Ok(DiagramClass::NeitherOrUnknown) | Err(_) => format!("[{}]", min_encoding(c)),
            Ok(cls) => cls.to_string(),
        })
        .collect();
    parts.sort();
    if parts.is_empty() {
        return "0".into();
    }
    parts.join("+")
}

/// Lexicographically least adjacency encoding over all node orders,
/// explored with invariant refinement and prefix pruning.
fn min_encoding(d: &CoxeterDiagram) -> String {
    let n = d.len();
    let code = |l: Label| -> u32 {
        match l {
            Label::Finite(m) => m,
            Label::Infinite => u32::MAX,
        }
    };
    let inv: Vec<_> = (0..n).map(|i| invariant(d, i)).collect();
    let mut best: Option<Vec<(usize, Vec<Label>, Vec<u32>)>> = None;
    let mut order = Vec::new();
    let mut cur: Vec<(usize, Vec<Label>, Vec<u32>)> = Vec::new();
    fn go(
        d: &CoxeterDiagram,
        inv: &[(usize, Vec<Label>)],
        code: &dyn Fn(Label) -> u32,
        order: &mut Vec<usize>,
        cur: &mut Vec<(usize, Vec<Label>, Vec<u32>)>,
        best: &mut Option<Vec<(usize, Vec<Label>, Vec<u32>)>>,
    ) {
        let n = d.len();
        if order.len() == n {
            if best.as_ref().is_none_or(|b| *cur < *b) {
                *best = Some(cur.clone());
            }
            return;
        }
        for c in 0..n {
            if order.contains(&c) {
                continue;
            }
            let row: Vec<u32> = order.iter().map(|&j| code(d.label(c, j))).collect();
            let item = (inv[c].0, inv[c].1.clone(), row);
            cur.push(item);
            let prune = best.as_ref().is_some_and(|b| cur[..] > b[..cur.len()]);
            if !prune {
                order.push(c);
                go(d, inv, code, order, cur, best);
                order.pop();
            }
            cur.pop();
        }
    }
    go(d, &inv, &code, &mut order, &mut cur, &mut best);
    let best = best.unwrap_or_default();
    best.iter()
        .map(|(_, _, r)| r.iter().map(|x| if *x == u32::MAX { "i".to_string() } else { x.to_string() }).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

/// Type string of a multiset of classes, e.g. `tA1+tA1`.
pub fn format_classes(classes: &[DiagramClass]) -> String {
    let mut v: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
    v.sort();
    if v.is_empty() {
        "0".into()
    } else {
        v.join("+")
    }
}

/// Parse `tB4`, `A3`, `2tA1+tC2` into classes (multiplicity prefixes
/// expand).
pub fn parse_classes(s: &str) -> Result<Vec<DiagramClass>> {
    let mut out = Vec::new();
    for part in s.split('+') {
        let part = part.trim();
        let digits: String = part.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mult: usize = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| Error::IllegalType(part.into()))? };
        let rest = &part[digits.len()..];
        let class = if let Some(r) = rest.strip_prefix('t') {
            let t: CartanType = r.parse()?;
            if !is_legal_affine(t) {
                return Err(Error::IllegalType(part.into()));
            }
            DiagramClass::Parabolic(t)
        } else {
            DiagramClass::Elliptic(rest.parse()?)
        };
        for _ in 0..mult {
            out.push(class);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(n: usize) -> CoxeterDiagram {
        let mut d = path(n);
        d.set(0, n - 1, Label::Finite(3));
        d
    }

    #[test]
    fn classify_paths_and_cycles() {
        for n in 1..=8 {
            assert_eq!(classify_connected(&path(n)).unwrap(), DiagramClass::Elliptic(CartanType::a(n)));
        }
        for n in 3..=9 {
            assert_eq!(classify_connected(&cycle(n)).unwrap(), DiagramClass::Parabolic(CartanType::a(n - 1)));
        }
        let mut five = CoxeterDiagram::empty(2);
        five.set(0, 1, Label::Finite(5));
        assert_eq!(classify_connected(&five).unwrap(), DiagramClass::NeitherOrUnknown);
        assert_eq!(classify_connected(&CoxeterDiagram::empty(2)), Err(Error::Disconnected));
    }

    #[test]
    fn infinite_labels() {
        let mut a1 = CoxeterDiagram::empty(2);
        a1.set(0, 1, Label::Infinite);
        assert_eq!(classify_connected(&a1).unwrap(), DiagramClass::Parabolic(CartanType::a(1)));
        let mut bad = path(3);
        bad.set(0, 1, Label::Infinite);
        assert_eq!(classify_connected(&bad), Err(Error::InfiniteLabel));
    }

    #[test]
    fn decompose_examples() {
        assert!(decompose(&CoxeterDiagram::empty(0)).is_empty());
        let f4 = parabolic_diagram(CartanType::f4());
        assert_eq!(decompose(&f4).len(), 1);
        assert_eq!(decompose(&f4)[0].len(), 5);
        let two = path(2).union(&path(2));
        assert_eq!(decompose(&two).len(), 2);
    }

    #[test]
    fn special_node_examples() {
        let a3 = parabolic_diagram(CartanType::a(3));
        assert_eq!(special_nodes(&a3).unwrap().len(), 4);
        let f4 = parabolic_diagram(CartanType::f4());
        assert_eq!(special_nodes(&f4).unwrap(), vec![4]);
        for n in 2..=6 {
            let c = parabolic_diagram(CartanType::c(n));
            assert_eq!(special_nodes(&c).unwrap(), vec![n - 1, n]);
        }
        assert_eq!(special_nodes(&path(3)), Err(Error::NotParabolic));
    }

    #[test]
    fn marks_sum_to_coxeter_number() {
        // sum of marks is the Coxeter number h
        let h = |t: CartanType| -> i128 {
            let n = t.rank as i128;
            match t.family {
                Family::A => n + 1,
                Family::B | Family::C => 2 * n,
                Family::D => 2 * n - 2,
                Family::E => [12, 18, 30][t.rank - 6],
                Family::F => 12,
                Family::G => 6,
            }
        };
        for n in 1..=8 {
            for t in parabolic_types(n) {
                assert_eq!(affine_marks(t).iter().sum::<i128>(), h(t), "{t}");
            }
        }
    }

    #[test]
    fn remove_node_examples() {
        let a2 = parabolic_diagram(CartanType::a(2));
        for v in 0..3 {
            let r = remove_node(&a2, v).unwrap();
            assert_eq!(classify_connected(&r).unwrap(), DiagramClass::Elliptic(CartanType::a(2)));
        }
        let f4 = parabolic_diagram(CartanType::f4());
        let r = remove_node(&f4, 4).unwrap();
        assert_eq!(classify_connected(&r).unwrap(), DiagramClass::Elliptic(CartanType::f4()));
        for n in 3..=8 {
            let b = parabolic_diagram(CartanType::b(n));
            for s in special_nodes(&b).unwrap() {
                let r = remove_node(&b, b.nodes[s]).unwrap();
                assert_eq!(classify_connected(&r).unwrap(), DiagramClass::Elliptic(CartanType::b(n)));
            }
        }
        assert_eq!(remove_node(&f4, 17), Err(Error::UnknownNode(17)));
    }

    #[test]
    fn isomorphism_examples() {
        let a2 = parabolic_diagram(CartanType::a(2));
        assert_eq!(isomorphisms(&a2, &a2).len(), 6);
        let c2 = parabolic_diagram(CartanType::c(2));
        assert_eq!(isomorphisms(&c2, &c2).len(), 2);
        assert!(isomorphisms(&path(2), &CoxeterDiagram::empty(2)).is_empty());
    }

    #[test]
    fn special_nodes_maximize_stabilizer_order() {
        // independent check: deleting a special node leaves the largest
        // finite Weyl group among all single-node deletions
        for n in 1..=8 {
            for t in parabolic_types(n) {
                let d = parabolic_diagram(t);
                let order = |p: usize| -> u128 {
                    let r = remove_node(&d, d.nodes[p]).unwrap();
                    classify(&r)
                        .unwrap()
                        .iter()
                        .map(|c| match c {
                            DiagramClass::Elliptic(t) => t.weyl_order(),
                            _ => panic!("not elliptic"),
                        })
                        .product()
                };
                let orders: Vec<u128> = (0..d.len()).map(order).collect();
                let max = *orders.iter().max().unwrap();
                let sp: Vec<usize> = (0..d.len()).filter(|&p| orders[p] == max).collect();
                assert_eq!(special_nodes(&d).unwrap(), sp, "{t}");
                assert!(!sp.is_empty());
            }
        }
    }

    #[test]
    fn automorphisms_form_group() {
        for n in 1..=6 {
            let mut ds: Vec<CoxeterDiagram> = elliptic_types(n).into_iter().map(elliptic_diagram).collect();
            ds.extend(parabolic_types(n).into_iter().filter(|t| t.rank < 6).map(parabolic_diagram));
            for d in ds {
                let auts = isomorphisms(&d, &d);
                let id: Vec<usize> = (0..d.len()).collect();
                assert!(auts.contains(&id));
                for a in &auts {
                    let mut inv = vec![0; a.len()];
                    for (i, &x) in a.iter().enumerate() {
                        inv[x] = i;
                    }
                    assert!(auts.contains(&inv));
                    for b in &auts {
                        let comp: Vec<usize> = (0..a.len()).map(|i| a[b[i]]).collect();
                        assert!(auts.contains(&comp));
                    }
                }
            }
        }
    }

    #[test]
    fn alcove_normals_match_catalog() {
        for n in 1..=8 {
            for t in parabolic_types(n) {
                let sys = rootsys::build_root_system(t).unwrap();
                let mut normals = sys.simple_roots.clone();
                normals.push(rootsys::lowest_root(&sys).unwrap());
                let d = CoxeterDiagram::from_normals(&normals).unwrap();
                assert_eq!(classify_connected(&d).unwrap(), DiagramClass::Parabolic(t), "{t}");
                assert_eq!(d, parabolic_diagram(t), "{t}");
            }
        }
    }

    #[test]
    fn parse_and_errors() {
        let d = CoxeterDiagram::parse("1 2 3; 2 3 3; 3 1 3").unwrap();
        assert_eq!(classify_connected(&d).unwrap(), DiagramClass::Parabolic(CartanType::a(2)));
        match CoxeterDiagram::parse("1 2 3\n2 x 3") {
            Err(Error::Parse { line: 2, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(CoxeterDiagram::parse("1 2").is_err());
        let back = CoxeterDiagram::parse(&d.to_edge_list()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn class_strings() {
        let c = parse_classes("2tA1+tC2").unwrap();
        assert_eq!(format_classes(&c), "tA1+tA1+tC2");
        assert!(parse_classes("tB2").is_err());
        assert!(parse_classes("tD3").is_err());
    }

    #[test]
    fn canonical_form_is_isomorphism_invariant() {
        let mut d = CoxeterDiagram::empty(4);
        d.set(0, 1, Label::Finite(5));
        d.set(1, 2, Label::Finite(3));
        d.set(2, 3, Label::Finite(3));
        let mut e = CoxeterDiagram::empty(4);
        e.set(3, 2, Label::Finite(5));
        e.set(2, 0, Label::Finite(3));
        e.set(0, 1, Label::Finite(3));
        assert_eq!(canonical_form(&d), canonical_form(&e));
        assert_eq!(canonical_form(&path(2).union(&path(1))), "A1+A2");
    }

    proptest! {
        #[test]
        fn gram_weights_round_trip(ws in proptest::collection::vec(0u8..5, 0..21)) {
            let n = 7;
            let mut d = CoxeterDiagram::empty(n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if k < ws.len() {
                        d.set(i, j, Label::from_weight(ws[k]).unwrap());
                    }
                    k += 1;
                }
            }
            let back = d.gram_weights().unwrap().to_diagram().unwrap();
            prop_assert_eq!(back, d);
        }

        #[test]
        fn canonical_form_under_relabeling(perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(), which in 0usize..4) {
            let base = [parabolic_diagram(CartanType::b(5)), parabolic_diagram(CartanType::d(5)), elliptic_diagram(CartanType::e(6)), parabolic_diagram(CartanType::c(5))][which].clone();
            let n = base.len();
            let p: Vec<usize> = perm.into_iter().filter(|&x| x < n).collect();
            let mut d = CoxeterDiagram::empty(n);
            for (i, j, m) in base.edges() {
                d.set(p[i], p[j], m);
            }
            prop_assert_eq!(canonical_form(&d), canonical_form(&base));
            prop_assert_eq!(isomorphisms(&d, &base).is_empty(), false);
        }
    }
}
