//! Finite crystallographic root systems in standard integer and
//! half-integer realizations.

use crate::error::{Error, Result};
use crate::linalg::{coordinates_in, q, qf, Vector, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

/// A root is a nonzero exact vector of the ambient space.
pub type Root = Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

/// Classification label of a connected elliptic diagram (or, read with a
/// tilde, of its parabolic extension).
///
/// Raw labels `B1`, `C1`, `D2`, `D3` are legal and kept distinct; see
/// [`CartanType::normalized`] for the aliases `A1`, `2A1`, `A3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A | Family::B | Family::C => rank >= 1,
            Family::D => rank >= 2,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(Error::IllegalType(format!("{}{}", family.letter(), rank)))
        }
    }

    pub fn a(n: usize) -> Self {
        Self::new(Family::A, n).unwrap()
    }
    pub fn b(n: usize) -> Self {
        Self::new(Family::B, n).unwrap()
    }
    pub fn c(n: usize) -> Self {
        Self::new(Family::C, n).unwrap()
    }
    pub fn d(n: usize) -> Self {
        Self::new(Family::D, n).unwrap()
    }
    pub fn e(n: usize) -> Self {
        Self::new(Family::E, n).unwrap()
    }
    pub fn f4() -> Self {
        Self::new(Family::F, 4).unwrap()
    }
    pub fn g2() -> Self {
        Self::new(Family::G, 2).unwrap()
    }

    /// Apply `B1 = C1 = A1`, `D2 = 2A1`, `D3 = A3`.
    pub fn normalized(self) -> Vec<CartanType> {
        match (self.family, self.rank) {
            (Family::B | Family::C, 1) => vec![Self::a(1)],
            (Family::D, 2) => vec![Self::a(1), Self::a(1)],
            (Family::D, 3) => vec![Self::a(3)],
            _ => vec![self],
        }
    }

    pub fn is_indecomposable(self) -> bool {
        !(self.family == Family::D && self.rank == 2)
    }

    /// Label of the Coxeter diagram: `C_n` and `B_n` share one.
    pub fn coxeter_label(self) -> CartanType {
        let n = self.normalized();
        let t = if n.len() == 1 { n[0] } else { return self };
        match t.family {
            Family::C => Self::b(t.rank),
            Family::B if t.rank == 1 => Self::a(1),
            _ => t,
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
            || (matches!(self.family, Family::B | Family::C) && self.rank == 1)
    }

    pub fn num_roots(self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1),
            Family::B | Family::C => 2 * n * n,
            Family::D => 2 * n * (n - 1),
            Family::E => match n {
                6 => 72,
                7 => 126,
                _ => 240,
            },
            Family::F => 48,
            Family::G => 12,
        }
    }

    pub fn weyl_order(self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.family {
            Family::A => fact(n + 1),
            Family::B | Family::C => (1u128 << n) * fact(n),
            Family::D => (1u128 << (n - 1)) * fact(n),
            Family::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
            Family::G => 12,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::IllegalType(s.to_string()))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::IllegalType(s.to_string()))?;
        CartanType::new(fam, rank)
    }
}

/// Order of the Weyl group of a multiset of types.
pub fn weyl_order(types: &[CartanType]) -> u128 {
    types.iter().map(|t| t.weyl_order()).product()
}

/// Format a multiset of types as `A1+A1+B2` (sorted).
pub fn format_types(types: &[CartanType]) -> String {
    let mut v = types.to_vec();
    v.sort();
    if v.is_empty() {
        return "0".to_string();
    }
    v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+")
}

/// Reflection of `v` in the hyperplane orthogonal to `mirror`.
pub fn reflect(mirror: &Vector, v: &Vector) -> Result<Vector> {
    let n2 = mirror.norm2();
    if n2.is_zero() {
        return Err(Error::ZeroMirror);
    }
    let c = q(2) * v.dot(mirror) / n2;
    Ok(v.axpy(&-c, mirror))
}

pub(crate) fn reflect_unchecked(mirror: &Vector, v: &Vector) -> Vector {
    let c = q(2) * v.dot(mirror) / mirror.norm2();
    v.axpy(&-c, mirror)
}

/// An irreducible component of a root system, with simple roots in
/// Bourbaki order for its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub cartan: CartanType,
    pub simple_roots: Vec<Root>,
    pub roots: Vec<Root>,
}

impl Component {
    pub fn lowest_root(&self) -> Root {
        lowest_of(&self.simple_roots, &self.roots)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRootSystem {
    /// Irreducible types (normalized, lengths kept: `B_n` vs `C_n`).
    pub types: Vec<CartanType>,
    /// Raw structural labels; see [`identify_type`].
    pub raw_types: Vec<CartanType>,
    pub simple_roots: Vec<Root>,
    pub roots: Vec<Root>,
    pub components: Vec<Component>,
    pub ambient_dim: usize,
}

impl FiniteRootSystem {
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn is_root(&self, v: &Vector) -> bool {
        self.roots.binary_search(v).is_ok()
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots.iter().filter(|r| r.lex_positive()).cloned().collect()
    }

    /// Coefficients of `v` in the simple roots.
    pub fn simple_coordinates(&self, v: &Vector) -> Option<Vector> {
        coordinates_in(&self.simple_roots, v)
    }

    /// Build a root system from a reflection-closed set of roots.
    pub fn from_roots(roots: &[Root]) -> Result<Self> {
        let report = identify_type(roots)?;
        let mut all: Vec<Root> = roots.to_vec();
        all.sort();
        all.dedup();
        let simple_roots = report
            .components
            .iter()
            .flat_map(|c| c.simple_roots.iter().cloned())
            .collect();
        Ok(FiniteRootSystem {
            types: report.normalized,
            raw_types: report.raw,
            simple_roots,
            roots: all,
            ambient_dim: roots.first().map(|r| r.dim()).unwrap_or(0),
            components: report.components,
        })
    }
}

fn half(v: &[i128]) -> Vector {
    Vector(v.iter().map(|&x| qf(x, 2)).collect())
}

/// Standard simple roots for a type, Bourbaki order.
pub fn standard_simple_roots(t: CartanType) -> Vec<Root> {
    let n = t.rank;
    let e = |dim: usize, i: usize, j: Option<(usize, i128)>, a: i128| {
        let mut v = vec![0i128; dim];
        v[i] = a;
        if let Some((j, b)) = j {
            v[j] = b;
        }
        Vector::from_ints(&v)
    };
    match t.family {
        Family::A => (0..n).map(|i| e(n + 1, i, Some((i + 1, -1)), 1)).collect(),
        Family::B | Family::C | Family::D => {
            let mut s: Vec<Root> = (0..n.saturating_sub(1))
                .map(|i| e(n, i, Some((i + 1, -1)), 1))
                .collect();
            s.push(match t.family {
                Family::B => e(n, n - 1, None, 1),
                Family::C => e(n, n - 1, None, 2),
                _ => e(n, n - 2, Some((n - 1, 1)), 1),
            });
            s
        }
        Family::G => vec![Vector::from_ints(&[1, -1, 0]), Vector::from_ints(&[-2, 1, 1])],
        Family::F => vec![
            Vector::from_ints(&[0, 1, -1, 0]),
            Vector::from_ints(&[0, 0, 1, -1]),
            Vector::from_ints(&[0, 0, 0, 1]),
            half(&[1, -1, -1, -1]),
        ],
        Family::E => {
            let mut s = vec![
                half(&[1, -1, -1, -1, -1, -1, -1, 1]),
                Vector::from_ints(&[1, 1, 0, 0, 0, 0, 0, 0]),
            ];
            for i in 0..6 {
                s.push(e(8, i + 1, Some((i, -1)), 1));
            }
            s.truncate(n);
            s
        }
    }
}

/// All roots generated from `simple` by reflections (sorted).
pub fn reflection_closure(simple: &[Root]) -> Vec<Root> {
    let mut seen: HashSet<Root> = simple.iter().cloned().collect();
    let mut queue: VecDeque<Root> = simple.iter().cloned().collect();
    while let Some(r) = queue.pop_front() {
        for s in simple {
            let img = reflect_unchecked(s, &r);
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    let mut v: Vec<Root> = seen.into_iter().collect();
    v.sort();
    v
}

/// Standard realization of an irreducible (or `D2`) root system.
pub fn build_root_system(t: CartanType) -> Result<FiniteRootSystem> {
    let t = CartanType::new(t.family, t.rank)?;
    let simple = standard_simple_roots(t);
    let roots = reflection_closure(&simple);
    let mut sys = FiniteRootSystem::from_roots(&roots)?;
    // keep the Bourbaki simple roots of the standard realization
    if t.is_indecomposable() {
        sys.simple_roots = simple.clone();
        sys.components = vec![Component { cartan: sys.types[0], simple_roots: simple, roots: sys.roots.clone() }];
    }
    Ok(sys)
}

/// Build a (possibly decomposable) system as an orthogonal direct sum.
pub fn build_product(types: &[CartanType]) -> Result<FiniteRootSystem> {
    let parts: Vec<Vec<Root>> = types.iter().map(|&t| Ok(standard_simple_roots(CartanType::new(t.family, t.rank)?))).collect::<Result<_>>()?;
    let dim: usize = parts.iter().map(|p| p[0].dim()).sum();
    let mut simple = Vec::new();
    let mut off = 0;
    for p in &parts {
        for r in p {
            let mut v = Vector::zeros(dim);
            v.0[off..off + r.dim()].clone_from_slice(&r.0);
            simple.push(v);
        }
        off += p[0].dim();
    }
    FiniteRootSystem::from_roots(&reflection_closure(&simple))
}

fn lowest_of(simple: &[Root], roots: &[Root]) -> Root {
    let height = |r: &Root| -> Q {
        coordinates_in(simple, r).expect("root in span").0.iter().sum()
    };
    roots
        .iter()
        .min_by(|a, b| height(a).cmp(&height(b)).then_with(|| a.cmp(b)))
        .expect("nonempty")
        .clone()
}

/// Lowest root (negative of the highest root) of an indecomposable system.
pub fn lowest_root(sys: &FiniteRootSystem) -> Result<Root> {
    if sys.components.len() != 1 {
        return Err(Error::Decomposable);
    }
    Ok(lowest_of(&sys.simple_roots, &sys.roots))
}

/// Marks: coefficients of the highest root in the simple roots.
pub fn highest_root_marks(sys: &FiniteRootSystem) -> Result<Vec<i128>> {
    let th = lowest_root(sys)?;
    let c = sys.simple_coordinates(&th).expect("in span");
    Ok(c.0.iter().map(|x| -x.to_integer()).collect())
}

/// Result of classifying a closed root set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeReport {
    /// Structural labels distinguishing `D2`/`2A1`, `D3`/`A3`, `B1`/`A1`.
    pub raw: Vec<CartanType>,
    /// Irreducible types, sorted.
    pub normalized: Vec<CartanType>,
    pub components: Vec<Component>,
}

/// Cartan integer `2(a,b)/(b,b)`.
fn cartan_entry(a: &Vector, b: &Vector) -> i128 {
    (q(2) * a.dot(b) / b.norm2()).to_integer()
}

fn cartan_matrix(simple: &[Root]) -> Vec<Vec<i128>> {
    simple
        .iter()
        .map(|a| simple.iter().map(|b| cartan_entry(a, b)).collect())
        .collect()
}

/// Find a permutation `p` with `m[p[i]][p[j]] == target[i][j]`.
fn match_cartan(m: &[Vec<i128>], target: &[Vec<i128>]) -> Option<Vec<usize>> {
    fn go(m: &[Vec<i128>], t: &[Vec<i128>], perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = perm.len();
        if i == t.len() {
            return true;
        }
        for c in 0..m.len() {
            if used[c] {
                continue;
            }
            if (0..i).all(|j| m[c][perm[j]] == t[i][j] && m[perm[j]][c] == t[j][i]) {
                used[c] = true;
                perm.push(c);
                if go(m, t, perm, used) {
                    return true;
                }
                perm.pop();
                used[c] = false;
            }
        }
        false
    }
    let mut perm = Vec::new();
    let mut used = vec![false; m.len()];
    go(m, target, &mut perm, &mut used).then_some(perm)
}

fn candidate_types(n: usize) -> Vec<CartanType> {
    let mut v = vec![CartanType::a(n)];
    if n >= 2 {
        v.push(CartanType::b(n));
    }
    if n >= 3 {
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

/// Type of an irreducible Cartan matrix and the permutation `p` such that
/// `m[p[i]][p[j]]` is the standard (Bourbaki) matrix.
pub fn classify_cartan_matrix(m: &[Vec<i128>]) -> Option<(CartanType, Vec<usize>)> {
    static TARGETS: std::sync::OnceLock<Vec<(CartanType, Vec<Vec<i128>>)>> = std::sync::OnceLock::new();
    let targets = TARGETS.get_or_init(|| {
        (1..=8)
            .flat_map(candidate_types)
            .map(|t| (t, cartan_matrix(&standard_simple_roots(t))))
            .collect()
    });
    for (t, target) in targets.iter().filter(|(t, _)| t.rank == m.len()) {
        if let Some(p) = match_cartan(m, target) {
            return Some((*t, p));
        }
    }
    None
}

/// Identify an irreducible simple system and reorder it in Bourbaki order.
fn classify_simple(simple: &[Root]) -> Option<(CartanType, Vec<Root>)> {
    let (t, p) = classify_cartan_matrix(&cartan_matrix(simple))?;
    Some((t, p.iter().map(|&i| simple[i].clone()).collect()))
}

/// Simple roots of a closed root set: lexicographically positive roots
/// that are not sums of two positive roots.
pub fn simple_system(roots: &[Root]) -> Vec<Root> {
    let set: HashSet<&Root> = roots.iter().collect();
    let pos: Vec<&Root> = roots.iter().filter(|r| r.lex_positive()).collect();
    let mut decomposable = HashSet::new();
    for (i, a) in pos.iter().enumerate() {
        for b in &pos[i + 1..] {
            let s = a.add(b);
            if set.contains(&s) {
                decomposable.insert(s);
            }
        }
    }
    let mut simple: Vec<Root> = pos.into_iter().filter(|r| !decomposable.contains(*r)).cloned().collect();
    simple.sort();
    simple
}

/// Classify a set of roots closed under its own reflections.
pub fn identify_type(roots: &[Root]) -> Result<TypeReport> {
    let set: HashSet<&Root> = roots.iter().collect();
    if roots.iter().any(|r| r.is_zero()) {
        return Err(Error::NotClosed);
    }
    for a in roots {
        for b in roots {
            if !set.contains(&reflect_unchecked(a, b)) {
                return Err(Error::NotClosed);
            }
        }
    }
    let simple = simple_system(roots);
    // components by non-orthogonality
    let n = simple.len();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut g = vec![];
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
        groups.push(g);
    }
    let mut components = Vec::new();
    for g in &groups {
        let s: Vec<Root> = g.iter().map(|&i| simple[i].clone()).collect();
        let (t, ordered) = classify_simple(&s).ok_or(Error::NotClosed)?;
        let croots: Vec<Root> = roots
            .iter()
            .filter(|r| coordinates_in(&ordered, r).is_some())
            .cloned()
            .collect();
        components.push(Component { cartan: t, simple_roots: ordered, roots: croots });
    }
    components.sort_by(|a, b| a.cartan.cmp(&b.cartan).then_with(|| a.simple_roots.cmp(&b.simple_roots)));
    let mut normalized: Vec<CartanType> = components.iter().map(|c| c.cartan).collect();
    normalized.sort();
    let mut raw = raw_labels(&components);
    raw.sort();
    Ok(TypeReport { raw, normalized, components })
}

fn support(roots: &[Root]) -> BTreeSet<usize> {
    roots
        .iter()
        .flat_map(|r| r.0.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i))
        .collect()
}

/// `{±e_i ± e_j : i < j in S}` up to a common scale.
fn is_d_block(roots: &[&Root], s: &BTreeSet<usize>) -> bool {
    let k = s.len();
    if k < 2 || roots.len() != 2 * k * (k - 1) {
        return false;
    }
    let scale = roots[0].0.iter().find(|x| !x.is_zero()).map(|x| x.abs()).unwrap();
    roots.iter().all(|r| {
        let nz: Vec<&Q> = r.0.iter().filter(|x| !x.is_zero()).collect();
        nz.len() == 2 && nz.iter().all(|x| x.abs() == scale)
    })
}

fn raw_labels(components: &[Component]) -> Vec<CartanType> {
    let supports: Vec<BTreeSet<usize>> = components.iter().map(|c| support(&c.roots)).collect();
    let n = components.len();
    let mut block = (0..n).collect::<Vec<_>>();
    fn find(b: &mut Vec<usize>, i: usize) -> usize {
        if b[i] != i {
            let r = find(b, b[i]);
            b[i] = r;
        }
        b[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if !supports[i].is_disjoint(&supports[j]) {
                let (a, b2) = (find(&mut block, i), find(&mut block, j));
                block[a] = b2;
            }
        }
    }
    let mut out = Vec::new();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let root = find(&mut block, i);
        let members: Vec<usize> = (0..n).filter(|&j| find(&mut block, j) == root).collect();
        for &j in &members {
            done[j] = true;
        }
        let roots: Vec<&Root> = members.iter().flat_map(|&j| components[j].roots.iter()).collect();
        let s: BTreeSet<usize> = members.iter().flat_map(|&j| supports[j].iter().copied()).collect();
        if members.len() <= 2 && is_d_block(&roots, &s) && (members.len() == 2 || s.len() >= 3) {
            out.push(CartanType::d(s.len()));
            continue;
        }
        for &j in &members {
            let c = &components[j];
            if c.cartan == CartanType::a(1) && supports[j].len() == 1 {
                let n2 = c.simple_roots[0].norm2();
                out.push(if n2 <= q(1) { CartanType::b(1) } else { CartanType::c(1) });
            } else if c.cartan == CartanType::b(2) {
                // long roots on one coordinate: the C_2 realization
                let nz = c.simple_roots[0].0.iter().filter(|x| !x.is_zero()).count();
                out.push(if nz == 1 { CartanType::c(2) } else { CartanType::b(2) });
            } else {
                out.push(c.cartan);
            }
        }
    }
    out
}

/// Cartan matrix of an ordered simple system (`2(a_i,a_j)/(a_j,a_j)`).
pub fn cartan_matrix_of(simple: &[Root]) -> Vec<Vec<i128>> {
    cartan_matrix(simple)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_types() -> Vec<CartanType> {
        let mut v = vec![];
        for n in 1..=8 {
            v.extend(candidate_types(n));
        }
        v
    }

    #[test]
    fn root_counts_match_classical() {
        for t in all_types() {
            let s = build_root_system(t).unwrap();
            assert_eq!(s.roots.len(), t.num_roots(), "{t}");
            assert_eq!(s.rank(), t.rank);
        }
    }

    #[test]
    fn g2_lengths() {
        let s = build_root_system(CartanType::g2()).unwrap();
        let short = s.roots.iter().filter(|r| r.norm2() == q(2)).count();
        let long = s.roots.iter().filter(|r| r.norm2() == q(6)).count();
        assert_eq!((short, long), (6, 6));
    }

    #[test]
    fn b3_roots() {
        let s = build_root_system(CartanType::b(3)).unwrap();
        let short = s.roots.iter().filter(|r| r.norm2() == q(1)).count();
        assert_eq!((s.roots.len(), short), (18, 6));
    }

    #[test]
    fn illegal_types_rejected() {
        assert!(CartanType::new(Family::E, 5).is_err());
        assert!(CartanType::new(Family::F, 3).is_err());
        assert!(CartanType::new(Family::G, 3).is_err());
        assert!(CartanType::new(Family::D, 1).is_err());
        assert!("X3".parse::<CartanType>().is_err());
        assert_eq!("E7".parse::<CartanType>().unwrap(), CartanType::e(7));
    }

    #[test]
    fn reflect_examples() {
        let a = Vector::from_ints(&[1, -1]);
        assert_eq!(reflect(&a, &a).unwrap(), a.neg());
        let v = Vector::from_ints(&[1, 1]);
        assert_eq!(reflect(&a, &v).unwrap(), v);
        assert_eq!(reflect(&a, &Vector::from_ints(&[1, 0])).unwrap(), Vector::from_ints(&[0, 1]));
        assert_eq!(reflect(&Vector::zeros(2), &v), Err(Error::ZeroMirror));
    }

    #[test]
    fn lowest_roots() {
        let a1 = build_root_system(CartanType::a(1)).unwrap();
        assert_eq!(lowest_root(&a1).unwrap(), a1.simple_roots[0].neg());
        let g2 = build_root_system(CartanType::g2()).unwrap();
        let th = lowest_root(&g2).unwrap();
        let expect = g2.simple_roots[0].scale(&q(-3)).axpy(&q(-2), &g2.simple_roots[1]);
        assert_eq!(th, expect);
        let e8 = build_root_system(CartanType::e(8)).unwrap();
        let c = e8.simple_coordinates(&lowest_root(&e8).unwrap()).unwrap();
        assert_eq!(c.0.iter().sum::<Q>(), q(-29));
        let d2 = build_root_system(CartanType::d(2)).unwrap();
        assert_eq!(lowest_root(&d2), Err(Error::Decomposable));
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order(&[CartanType::a(1)]), 2);
        assert_eq!(weyl_order(&[CartanType::f4()]), 1152);
        assert_eq!(weyl_order(&[CartanType::a(5), CartanType::a(2)]), 4320);
    }

    #[test]
    fn identify_examples() {
        let g2 = build_root_system(CartanType::g2()).unwrap();
        let long: Vec<Root> = g2.roots.iter().filter(|r| r.norm2() == q(6)).cloned().collect();
        assert_eq!(identify_type(&long).unwrap().normalized, vec![CartanType::a(2)]);
        let b3 = build_root_system(CartanType::b(3)).unwrap();
        assert_eq!(identify_type(&b3.roots).unwrap().normalized, vec![CartanType::b(3)]);
        let d2: Vec<Root> = build_root_system(CartanType::b(4))
            .unwrap()
            .roots
            .into_iter()
            .filter(|r| r.0[2].is_zero() && r.0[3].is_zero() && !r.0[0].is_zero() && !r.0[1].is_zero())
            .collect();
        let rep = identify_type(&d2).unwrap();
        assert_eq!(rep.raw, vec![CartanType::d(2)]);
        assert_eq!(rep.normalized, vec![CartanType::a(1), CartanType::a(1)]);
        let not_closed = vec![Vector::from_ints(&[1, 0]), Vector::from_ints(&[-1, 0]), Vector::from_ints(&[1, 1]), Vector::from_ints(&[-1, -1])];
        assert_eq!(identify_type(&not_closed), Err(Error::NotClosed));
    }

    #[test]
    fn raw_labels_distinguish_a3_d3_b1() {
        let b4 = build_root_system(CartanType::b(4)).unwrap();
        let pick = |f: &dyn Fn(&Root) -> bool| -> Vec<Root> { b4.roots.iter().filter(|r| f(r)).cloned().collect() };
        let d3 = pick(&|r: &Root| r.0[3].is_zero() && r.0.iter().filter(|x| !x.is_zero()).count() == 2);
        assert_eq!(identify_type(&d3).unwrap().raw, vec![CartanType::d(3)]);
        let a3 = pick(&|r: &Root| r.0.iter().sum::<Q>().is_zero() && r.0.iter().filter(|x| !x.is_zero()).count() == 2);
        assert_eq!(identify_type(&a3).unwrap().raw, vec![CartanType::a(3)]);
        let b1 = pick(&|r: &Root| r.0[0].is_zero() && r.0[1].is_zero() && r.0[2].is_zero());
        assert_eq!(identify_type(&b1).unwrap().raw, vec![CartanType::b(1)]);
    }

    #[test]
    fn identify_roundtrip_all_types() {
        for t in all_types() {
            let s = build_root_system(t).unwrap();
            let rep = identify_type(&s.roots).unwrap();
            let mut expect = t.normalized();
            // B2 and C2 are the same system up to relabeling
            if t == CartanType::c(2) {
                expect = vec![CartanType::b(2)];
            }
            if t.family == Family::C && t.rank == 1 {
                expect = vec![CartanType::a(1)];
            }
            assert_eq!(rep.normalized, expect, "{t}");
        }
    }

    #[test]
    fn closure_and_lowest_root_property() {
        for t in all_types() {
            let s = build_root_system(t).unwrap();
            assert_eq!(reflection_closure(&s.simple_roots), s.roots);
            if t.is_indecomposable() {
                let th = lowest_root(&s).unwrap();
                for a in &s.simple_roots {
                    assert!(!s.is_root(&th.sub(a)), "{t}");
                }
            }
        }
    }

    #[test]
    fn reflect_is_isometric_involution() {
        for t in [CartanType::b(3), CartanType::c(3), CartanType::f4(), CartanType::g2(), CartanType::d(4)] {
            let s = build_root_system(t).unwrap();
            for a in &s.roots {
                for b in &s.roots {
                    let r = reflect(a, b).unwrap();
                    assert_eq!(r.norm2(), b.norm2());
                    assert_eq!(reflect(a, &r).unwrap(), *b);
                    assert!(s.is_root(&r));
                }
            }
        }
    }
}
