//! Affine roots, alcoves and chambers with exact vertices and volumes.
//!
//! An affine root `(alpha, n)` is the affine function `x -> (alpha, x) + n`;
//! its mirror is the zero set. A chamber is a product of simplices and
//! simplicial cones, each given by halfspaces `(xi, x) <= c` with outward
//! normal `xi`.

use crate::diagram::{self, CoxeterDiagram, DiagramClass};
use crate::error::{Error, Result};
use crate::linalg::{coordinates_in, q, Matrix, Vector, Q};
use crate::rootsys::{self, reflect_unchecked, CartanType};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    pub finite_part: Vector,
    pub level: Q,
}

impl AffineRoot {
    pub fn new(finite_part: Vector, level: Q) -> Result<Self> {
        if finite_part.is_zero() {
            return Err(Error::ZeroMirror);
        }
        Ok(AffineRoot { finite_part, level })
    }

    pub fn eval(&self, x: &Vector) -> Q {
        self.finite_part.dot(x) + self.level
    }

    /// Reflection of a point in the mirror `(alpha, x) + n = 0`.
    pub fn reflect_point(&self, x: &Vector) -> Vector {
        let c = q(2) * self.eval(x) / self.finite_part.norm2();
        x.axpy(&-c, &self.finite_part)
    }

    /// Image of another affine root under this reflection.
    pub fn reflect_root(&self, other: &AffineRoot) -> AffineRoot {
        let a = &self.finite_part;
        let k = q(2) * a.dot(&other.finite_part) / a.norm2();
        AffineRoot { finite_part: other.finite_part.axpy(&-k, a), level: other.level - k * self.level }
    }

    pub fn to_halfspace(&self) -> Halfspace {
        Halfspace { normal: self.finite_part.neg(), offset: self.level }
    }
}

/// `k * delta`; never vanishes, so it has no mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImaginaryRoot {
    pub multiple: i128,
}

impl ImaginaryRoot {
    pub fn has_mirror(&self) -> bool {
        false
    }
}

/// Reflection of `x` across the mirror of `h`.
pub fn affine_reflect(h: &AffineRoot, x: &Vector) -> Vector {
    h.reflect_point(x)
}

/// `{x : (normal, x) <= offset}`; `normal` points outward.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: Q,
}

impl Halfspace {
    pub fn to_affine_root(&self) -> AffineRoot {
        AffineRoot { finite_part: self.normal.neg(), level: self.offset }
    }

    pub fn slack(&self, x: &Vector) -> Q {
        self.offset - self.normal.dot(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    Simplex,
    Cone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberComponent {
    pub halfspaces: Vec<Halfspace>,
    pub kind: ComponentKind,
}

impl ChamberComponent {
    /// Inward normals (finite parts of the facet roots).
    pub fn inward_normals(&self) -> Vec<Vector> {
        self.halfspaces.iter().map(|h| h.normal.neg()).collect()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ComponentKind::Simplex => self.halfspaces.len() - 1,
            ComponentKind::Cone => self.halfspaces.len(),
        }
    }

    pub fn diagram(&self) -> Result<CoxeterDiagram> {
        CoxeterDiagram::from_normals(&self.inward_normals())
    }
}

/// Product of pairwise orthogonal simplices and simplicial cones.
///
/// `basis` is a lattice basis of the span in which volumes are measured
/// (for chambers built here, the simple roots of the host system), so
/// that volumes are rational: the parallelepiped of `basis` has volume 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalChamber {
    pub components: Vec<ChamberComponent>,
    pub ambient_dim: usize,
    pub basis: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Volume {
    Finite(Q),
    Infinite,
}

/// Primitive dependency `sum a_j n_j = 0` of `d + 1` vectors spanning a
/// `d`-space, normalized so that the last nonzero entry is positive.
fn dependency(normals: &[Vector]) -> Option<Vector> {
    let m = Matrix::from_rows(normals);
    // kernel of the transpose: coefficients on rows
    let mut t = Matrix::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            t.set(j, i, m.get(i, j));
        }
    }
    let k = t.kernel();
    if k.len() != 1 {
        return None;
    }
    let v = k[0].primitive();
    let last = v.0.iter().rev().find(|x| !x.is_zero()).copied().unwrap_or(Q::one());
    Some(if last.is_negative() { v.neg() } else { v })
}

/// Rank of a family of vectors.
pub fn span_rank(vs: &[Vector]) -> usize {
    if vs.is_empty() {
        0
    } else {
        Matrix::from_rows(vs).rank()
    }
}

impl FundamentalChamber {
    /// Build from per-component facet roots; the kind of each component
    /// is inferred (independent normals: cone; one dependency: simplex).
    pub fn from_affine_roots(groups: &[Vec<AffineRoot>], basis: Vec<Vector>) -> Result<Self> {
        let ambient_dim = basis.first().map(|b| b.dim()).or_else(|| groups.iter().flatten().next().map(|r| r.finite_part.dim())).unwrap_or(0);
        let mut components = Vec::new();
        for g in groups {
            let normals: Vec<Vector> = g.iter().map(|r| r.finite_part.clone()).collect();
            let r = span_rank(&normals);
            let kind = if r == normals.len() {
                ComponentKind::Cone
            } else if r + 1 == normals.len() {
                ComponentKind::Simplex
            } else {
                return Err(Error::DegenerateChamber(format!("{} facets span rank {}", normals.len(), r)));
            };
            components.push(ChamberComponent { halfspaces: g.iter().map(|r| r.to_halfspace()).collect(), kind });
        }
        let c = FundamentalChamber { components, ambient_dim, basis };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                for x in &a.halfspaces {
                    for y in &b.halfspaces {
                        if !x.normal.dot(&y.normal).is_zero() {
                            return Err(Error::NotOrthogonal);
                        }
                    }
                }
            }
            let normals = a.inward_normals();
            match a.kind {
                ComponentKind::Cone => {
                    if span_rank(&normals) != normals.len() {
                        return Err(Error::DegenerateChamber("dependent cone normals".into()));
                    }
                }
                ComponentKind::Simplex => {
                    let dep = dependency(&normals).ok_or_else(|| Error::DegenerateChamber("simplex normals not corank one".into()))?;
                    if dep.0.iter().any(|x| !x.is_positive()) {
                        return Err(Error::UnboundedChamber);
                    }
                    let s: Q = dep.0.iter().zip(&a.halfspaces).map(|(x, h)| x * h.offset).sum();
                    if !s.is_positive() {
                        return Err(Error::DegenerateChamber("empty interior".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// All facets as affine roots, component by component.
    pub fn facet_roots(&self) -> Vec<AffineRoot> {
        self.components.iter().flat_map(|c| c.halfspaces.iter().map(|h| h.to_affine_root())).collect()
    }

    /// Inward normals of all facets, component by component.
    pub fn inward_normals(&self) -> Vec<Vector> {
        self.components.iter().flat_map(|c| c.inward_normals()).collect()
    }

    /// Diagram computed from pairwise facet angles.
    pub fn diagram(&self) -> Result<CoxeterDiagram> {
        CoxeterDiagram::from_normals(&self.inward_normals())
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.dim()).sum()
    }

    pub fn is_bounded(&self) -> bool {
        self.components.iter().all(|c| c.kind == ComponentKind::Simplex) && self.dim() == self.basis.len()
    }

    /// Vertices of simplex component `i`; vertex `j` is opposite facet `j`
    /// and lies in the span of the component's normals.
    pub fn simplex_vertices(&self, i: usize) -> Result<Vec<Vector>> {
        let c = &self.components[i];
        if c.kind != ComponentKind::Simplex {
            return Err(Error::NotSimplex);
        }
        let normals: Vec<Vector> = c.halfspaces.iter().map(|h| h.normal.clone()).collect();
        (0..normals.len())
            .map(|j| {
                let others: Vec<&Vector> = normals.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v).collect();
                let owned: Vec<Vector> = others.iter().map(|v| (*v).clone()).collect();
                let g = Matrix::gram(&owned);
                let rhs = Vector(c.halfspaces.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, h)| h.offset).collect());
                let y = g.solve(&rhs).ok_or_else(|| Error::DegenerateChamber("singular vertex system".into()))?;
                Ok(owned.iter().zip(&y.0).fold(Vector::zeros(self.ambient_dim), |acc, (v, s)| acc.axpy(s, v)))
            })
            .collect()
    }

    /// Apex of a cone component (in the span of its normals).
    pub fn cone_apex(&self, i: usize) -> Result<Vector> {
        let c = &self.components[i];
        let normals: Vec<Vector> = c.halfspaces.iter().map(|h| h.normal.clone()).collect();
        let rhs = Vector(c.halfspaces.iter().map(|h| h.offset).collect());
        let y = Matrix::gram(&normals).solve(&rhs).ok_or_else(|| Error::DegenerateChamber("singular cone".into()))?;
        Ok(normals.iter().zip(&y.0).fold(Vector::zeros(self.ambient_dim), |acc, (v, s)| acc.axpy(s, v)))
    }

    /// All vertices of a bounded chamber (sums over components), sorted.
    pub fn vertices(&self) -> Result<Vec<Vector>> {
        let mut acc = vec![Vector::zeros(self.ambient_dim)];
        for i in 0..self.components.len() {
            let vs = self.simplex_vertices(i)?;
            acc = acc.iter().flat_map(|a| vs.iter().map(move |v| a.add(v))).collect();
        }
        acc.sort();
        Ok(acc)
    }

    /// Barycenter of a bounded chamber.
    pub fn centroid(&self) -> Result<Vector> {
        let mut x = Vector::zeros(self.ambient_dim);
        for i in 0..self.components.len() {
            let vs = self.simplex_vertices(i)?;
            let k = q(vs.len() as i128);
            for v in &vs {
                x = x.axpy(&(Q::one() / k), v);
            }
        }
        Ok(x)
    }

    /// `x` satisfies every facet inequality (`strict`: none with equality).
    pub fn contains(&self, x: &Vector, strict: bool) -> bool {
        self.components.iter().flat_map(|c| &c.halfspaces).all(|h| {
            let s = h.slack(x);
            if strict {
                s.is_positive()
            } else {
                !s.is_negative()
            }
        })
    }

    /// Image under an affine reflection.
    pub fn reflected(&self, h: &AffineRoot) -> FundamentalChamber {
        let comps = self
            .components
            .iter()
            .map(|c| ChamberComponent {
                halfspaces: c.halfspaces.iter().map(|s| h.reflect_root(&s.to_affine_root()).to_halfspace()).collect(),
                kind: c.kind,
            })
            .collect();
        FundamentalChamber { components: comps, ambient_dim: self.ambient_dim, basis: self.basis.clone() }
    }
}

/// Fundamental alcove of the affine Weyl group of type `T~`: facets
/// `(alpha_i, x) >= 0` followed by `(theta, x) + 1 >= 0`.
pub fn build_alcove(t: CartanType) -> Result<FundamentalChamber> {
    if !diagram::is_legal_affine(t) {
        return Err(Error::IllegalType(format!("t{t}")));
    }
    let sys = rootsys::build_root_system(t)?;
    let mut roots: Vec<AffineRoot> = sys.simple_roots.iter().map(|a| AffineRoot::new(a.clone(), q(0)).unwrap()).collect();
    roots.push(AffineRoot::new(rootsys::lowest_root(&sys)?, q(1))?);
    FundamentalChamber::from_affine_roots(&[roots], sys.simple_roots.clone())
}

/// Volume of a chamber in units of the basis parallelepiped.
///
/// A simplex with edge vectors `e_1..e_d` has volume `|det E| / d!`
/// where `E` holds the coordinates of the edges in `basis`; for a product
/// of orthogonal simplices the edge families are concatenated.
pub fn chamber_volume(c: &FundamentalChamber) -> Result<Volume> {
    c.validate()?;
    if !c.is_bounded() {
        return Ok(Volume::Infinite);
    }
    let mut edges = Vec::new();
    let mut fact = Q::one();
    for i in 0..c.components.len() {
        let vs = c.simplex_vertices(i)?;
        for v in &vs[1..] {
            edges.push(v.sub(&vs[0]));
        }
        fact *= q((1..vs.len() as i128).product::<i128>());
    }
    let rows: Vec<Vector> = edges
        .iter()
        .map(|e| coordinates_in(&c.basis, e).ok_or_else(|| Error::DegenerateChamber("edge outside basis span".into())))
        .collect::<Result<_>>()?;
    let det = Matrix::from_rows(&rows).determinant();
    if det.is_zero() {
        return Err(Error::DegenerateChamber("zero volume".into()));
    }
    Ok(Volume::Finite(det.abs() / fact))
}

/// Special vertices of simplex component `i` of parabolic type.
pub fn special_vertices_of_chamber(c: &FundamentalChamber, i: usize) -> Result<Vec<Vector>> {
    let comp = c.components.get(i).ok_or(Error::NotSimplex)?;
    if comp.kind != ComponentKind::Simplex {
        return Err(Error::NotSimplex);
    }
    let d = comp.diagram()?;
    let special = diagram::special_nodes(&d)?;
    let vs = c.simplex_vertices(i)?;
    Ok(special.into_iter().map(|j| vs[j].clone()).collect())
}

/// Geometric test: the vertex opposite facet `v` is special iff the
/// direction of facet `v` occurs among the roots generated by the other
/// facets through that vertex.
pub fn is_special_facet_geometric(normals: &[Vector], v: usize) -> bool {
    let others: Vec<Vector> = normals.iter().enumerate().filter(|(k, _)| *k != v).map(|(_, x)| x.clone()).collect();
    let mut seen: HashSet<Vector> = others.iter().cloned().collect();
    let mut queue = others.clone();
    while let Some(r) = queue.pop() {
        for s in &others {
            let img = reflect_unchecked(s, &r);
            if seen.insert(img.clone()) {
                queue.push(img);
            }
        }
    }
    seen.iter().any(|r| r.parallel_factor(&normals[v]).is_some())
}

/// Facets through a special vertex: the finite diagram and its normals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub diagram: CoxeterDiagram,
    pub class: Vec<DiagramClass>,
    pub normals: Vec<Vector>,
    pub vertex: Vector,
}

/// Stabilizer data at vertex `vertex` of simplex component `i`.
pub fn stabilizer_at(c: &FundamentalChamber, i: usize, vertex: &Vector) -> Result<Stabilizer> {
    let vs = c.simplex_vertices(i)?;
    let comp = &c.components[i];
    let j = vs.iter().position(|v| v == vertex).ok_or(Error::NotSpecial)?;
    let d = comp.diagram()?;
    let special = diagram::special_nodes(&d)?;
    if !special.contains(&j) {
        return Err(Error::NotSpecial);
    }
    let keep: Vec<usize> = (0..d.len()).filter(|&k| k != j).collect();
    let sub = d.induced(&keep);
    let normals = keep.iter().map(|&k| comp.halfspaces[k].normal.neg()).collect();
    Ok(Stabilizer { class: diagram::classify(&sub)?, diagram: sub, normals, vertex: vertex.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parabolic_types, Label};
    use crate::linalg::qf;
    use proptest::prelude::*;

    fn all_affine() -> Vec<CartanType> {
        (1..=8).flat_map(parabolic_types).collect()
    }

    #[test]
    fn alcove_a1_is_unit_segment() {
        let c = build_alcove(CartanType::a(1)).unwrap();
        let vs = c.simplex_vertices(0).unwrap();
        // (alpha, x) ranges over [0, 1]
        let a = Vector::from_ints(&[1, -1]);
        let mut vals: Vec<Q> = vs.iter().map(|v| a.dot(v)).collect();
        vals.sort();
        assert_eq!(vals, vec![q(0), q(1)]);
        assert_eq!(chamber_volume(&c).unwrap(), Volume::Finite(qf(1, 2)));
    }

    #[test]
    fn rank_two_angles() {
        let g = build_alcove(CartanType::g2()).unwrap().diagram().unwrap();
        let mut ls: Vec<Label> = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| g.label(i, j)).collect();
        ls.sort();
        assert_eq!(ls, vec![Label::Finite(2), Label::Finite(3), Label::Finite(6)]);
        let c = build_alcove(CartanType::c(2)).unwrap().diagram().unwrap();
        let mut ls: Vec<Label> = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| c.label(i, j)).collect();
        ls.sort();
        assert_eq!(ls, vec![Label::Finite(2), Label::Finite(4), Label::Finite(4)]);
    }

    #[test]
    fn alcove_diagrams_round_trip() {
        for t in all_affine() {
            let c = build_alcove(t).unwrap();
            assert_eq!(c.components[0].halfspaces.len(), t.rank + 1);
            assert_eq!(diagram::classify_connected(&c.diagram().unwrap()).unwrap(), DiagramClass::Parabolic(t));
            assert!(c.simplex_vertices(0).unwrap().contains(&Vector::zeros(c.ambient_dim)));
        }
    }

    #[test]
    fn special_vertex_counts_match_marks() {
        for t in all_affine() {
            let c = build_alcove(t).unwrap();
            let marks = diagram::affine_marks(t);
            let sv = special_vertices_of_chamber(&c, 0).unwrap();
            assert_eq!(sv.len(), marks.iter().filter(|&&m| m == 1).count(), "{t}");
            let normals = c.inward_normals();
            for (j, &m) in marks.iter().enumerate() {
                assert_eq!(is_special_facet_geometric(&normals, j), m == 1, "{t} node {j}");
            }
        }
        let f4 = build_alcove(CartanType::f4()).unwrap();
        assert_eq!(special_vertices_of_chamber(&f4, 0).unwrap(), vec![Vector::zeros(4)]);
    }

    #[test]
    fn stabilizers() {
        let c = build_alcove(CartanType::c(3)).unwrap();
        let o = Vector::zeros(3);
        let s = stabilizer_at(&c, 0, &o).unwrap();
        assert_eq!(s.class, vec![DiagramClass::Elliptic(CartanType::b(3))]);
        let g = build_alcove(CartanType::g2()).unwrap();
        assert_eq!(stabilizer_at(&g, 0, &Vector::zeros(3)).unwrap().class, vec![DiagramClass::Elliptic(CartanType::g2())]);
        let vs = g.simplex_vertices(0).unwrap();
        assert_eq!(stabilizer_at(&g, 0, &vs[0]), Err(Error::NotSpecial));
        let a = build_alcove(CartanType::a(3)).unwrap();
        for v in a.simplex_vertices(0).unwrap() {
            assert_eq!(stabilizer_at(&a, 0, &v).unwrap().class, vec![DiagramClass::Elliptic(CartanType::a(3))]);
        }
    }

    #[test]
    fn reflections() {
        let a = AffineRoot::new(Vector::from_ints(&[1, -1]), q(0)).unwrap();
        let o = Vector::zeros(2);
        assert_eq!(affine_reflect(&a, &o), o);
        let b = AffineRoot::new(Vector::from_ints(&[1, -1]), q(1)).unwrap();
        let x = Vector(vec![qf(1, 3), qf(1, 5)]);
        let t = affine_reflect(&b, &affine_reflect(&a, &x));
        // translation by -2 * coroot
        let coroot = Vector::from_ints(&[1, -1]);
        assert_eq!(t.sub(&x), coroot.scale(&q(-1)));
        // Ã1: the wall theta + delta sends the origin to the other special vertex's mirror image
        let theta = AffineRoot::new(Vector::from_ints(&[-1, 1]), q(1)).unwrap();
        let img = affine_reflect(&theta, &o);
        assert_eq!(Vector::from_ints(&[1, -1]).dot(&img), q(2));
        assert_eq!(AffineRoot::new(Vector::zeros(2), q(1)), Err(Error::ZeroMirror));
    }

    #[test]
    fn degenerate_rejected() {
        let basis = vec![Vector::from_ints(&[1])];
        let r = |a: i128, n: i128| AffineRoot::new(Vector::from_ints(&[a]), q(n)).unwrap();
        // x >= 0 and -x - 1 >= 0: empty
        assert!(matches!(FundamentalChamber::from_affine_roots(&[vec![r(1, 0), r(-1, -1)]], basis.clone()), Err(Error::DegenerateChamber(_))));
        assert_eq!(FundamentalChamber::from_affine_roots(&[vec![r(1, 0), r(1, 1)]], basis.clone()), Err(Error::UnboundedChamber));
        let seg = FundamentalChamber::from_affine_roots(&[vec![r(1, 0), r(-1, 1)]], basis).unwrap();
        assert_eq!(chamber_volume(&seg).unwrap(), Volume::Finite(q(1)));
    }

    #[test]
    fn product_volume() {
        let basis = vec![Vector::from_ints(&[1, 0]), Vector::from_ints(&[0, 1])];
        let r = |a: [i128; 2], n: i128| AffineRoot::new(Vector::from_ints(&a), q(n)).unwrap();
        let sq = FundamentalChamber::from_affine_roots(&[vec![r([1, 0], 0), r([-1, 0], 1)], vec![r([0, 1], 0), r([0, -1], 1)]], basis.clone()).unwrap();
        assert_eq!(chamber_volume(&sq).unwrap(), Volume::Finite(q(1)));
        let cone = FundamentalChamber::from_affine_roots(&[vec![r([1, 0], 0), r([-1, 0], 1)], vec![r([0, 1], 0)]], basis).unwrap();
        assert_eq!(chamber_volume(&cone).unwrap(), Volume::Infinite);
        assert_eq!(sq.diagram().unwrap().label(0, 1), Label::Infinite);
    }

    #[test]
    fn adjacent_alcoves_do_not_overlap() {
        for t in [CartanType::a(1), CartanType::a(2), CartanType::c(2), CartanType::g2(), CartanType::a(3), CartanType::b(3), CartanType::c(3)] {
            let c = build_alcove(t).unwrap();
            let x = c.centroid().unwrap();
            for h in c.facet_roots() {
                let img = c.reflected(&h);
                assert!(!c.contains(&img.centroid().unwrap(), true));
                assert!(!img.contains(&x, true));
                assert_eq!(chamber_volume(&img).unwrap(), chamber_volume(&c).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn affine_reflection_is_isometric_involution(
            a in proptest::collection::vec(-3i128..4, 3),
            n in -3i128..4,
            x in proptest::collection::vec(-20i128..20, 3),
            y in proptest::collection::vec(-20i128..20, 3),
        ) {
            prop_assume!(a.iter().any(|&v| v != 0));
            let h = AffineRoot::new(Vector::from_ints(&a), q(n)).unwrap();
            let x = Vector(x.iter().map(|&v| qf(v, 7)).collect());
            let y = Vector(y.iter().map(|&v| qf(v, 5)).collect());
            let rx = h.reflect_point(&x);
            prop_assert_eq!(h.reflect_point(&rx), x.clone());
            prop_assert_eq!(h.reflect_point(&y).sub(&rx).norm2(), y.sub(&x).norm2());
            prop_assert_eq!(h.eval(&rx), -h.eval(&x));
        }
    }
}
