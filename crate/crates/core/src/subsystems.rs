//! Reflection subgroups of finite crystallographic reflection groups.
//!
//! A reflection subgroup of `W(Delta)` is determined by the set of roots
//! whose reflections it contains; that set is closed under its own
//! reflections. Subsets are handled as bitsets over the host's root list
//! with precomputed reflection and addition tables.
//!
//! Enumeration descends from the full system through three kinds of
//! steps on one irreducible component at a time: deleting a simple root,
//! deleting a node of the extended diagram, and deleting a node of the
//! extended diagram of the dual (coroot) system. Every reflection
//! subgroup is reached this way: a maximal subgroup of non-maximal rank
//! lies in a maximal parabolic one, and maximal-rank ones come from the
//! extended diagrams of the system or its dual.

use crate::error::{Error, Result};
use crate::linalg::{q, Matrix, Vector, Q};
use crate::rootsys::{self, classify_cartan_matrix, CartanType, Component, Family, FiniteRootSystem};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

const NONE: u16 = u16::MAX;

/// Set of root indices (at most 256 roots; E8 has 240).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSet(pub [u64; 4]);

impl RootSet {
    pub fn insert(&mut self, i: u16) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let had = self.0[w] >> b & 1 == 1;
        self.0[w] |= 1 << b;
        !had
    }
    pub fn contains(&self, i: u16) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        self.0[w] >> b & 1 == 1
    }
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }
    pub fn union(&self, o: &RootSet) -> RootSet {
        RootSet([self.0[0] | o.0[0], self.0[1] | o.0[1], self.0[2] | o.0[2], self.0[3] | o.0[3]])
    }
    pub fn minus(&self, o: &RootSet) -> RootSet {
        RootSet([self.0[0] & !o.0[0], self.0[1] & !o.0[1], self.0[2] & !o.0[2], self.0[3] & !o.0[3]])
    }
    pub fn is_subset(&self, o: &RootSet) -> bool {
        self.minus(o).is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        (0..256u16).filter(move |&i| self.contains(i))
    }
}

impl FromIterator<u16> for RootSet {
    fn from_iter<I: IntoIterator<Item = u16>>(it: I) -> Self {
        let mut s = RootSet::default();
        for i in it {
            s.insert(i);
        }
        s
    }
}

/// Permutation of root indices induced by an isometry (or similarity).
pub type Perm = Vec<u16>;

/// Precomputed data about a host root system.
pub struct HostContext {
    pub host: CartanType,
    pub sys: FiniteRootSystem,
    index: HashMap<Vector, u16>,
    n: usize,
    refl: Vec<u16>,
    sum: Vec<u16>,
    cartan: Vec<i8>,
    neg: Vec<u16>,
    positive: Vec<bool>,
    norm2: Vec<Q>,
    support: Vec<u32>,
    pair_like: Vec<bool>,
    groups: OnceLock<(Vec<Perm>, Vec<Perm>)>,
}

/// Shared context for a host type (cached).
pub fn context(host: CartanType) -> Result<Arc<HostContext>> {
    static CACHE: OnceLock<Mutex<HashMap<CartanType, Arc<HostContext>>>> = OnceLock::new();
    let host = CartanType::new(host.family, host.rank)?;
    if host.rank > 8 {
        return Err(Error::RankTooLarge(host.rank));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&host) {
        return Ok(c.clone());
    }
    let ctx = Arc::new(HostContext::new(host)?);
    cache.lock().unwrap().insert(host, ctx.clone());
    Ok(ctx)
}

/// Irreducible component of an analyzed subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comp {
    pub cartan: CartanType,
    /// Simple roots in Bourbaki order.
    pub simple: Vec<u16>,
    pub roots: RootSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub set: RootSet,
    pub components: Vec<Comp>,
    pub raw: Vec<CartanType>,
    pub normalized: Vec<CartanType>,
}

impl Analysis {
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.cartan.rank).sum()
    }
}

/// Equivalence key of a subsystem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsystemKey {
    /// Minimal image of the root set under the acting group.
    Orbit(RootSet),
    /// Type multiset (raw labels for `B`/`C` hosts, normalized otherwise).
    Labels(Vec<CartanType>),
}

impl HostContext {
    fn new(host: CartanType) -> Result<Self> {
        let sys = rootsys::build_root_system(host)?;
        let roots = sys.roots.clone();
        let n = roots.len();
        let index: HashMap<Vector, u16> = roots.iter().enumerate().map(|(i, r)| (r.clone(), i as u16)).collect();
        let norm2: Vec<Q> = roots.iter().map(|r| r.norm2()).collect();
        let mut refl = vec![NONE; n * n];
        let mut sum = vec![NONE; n * n];
        let mut cartan = vec![0i8; n * n];
        for a in 0..n {
            for b in 0..n {
                let ip = roots[a].dot(&roots[b]);
                let k = q(2) * ip / norm2[a];
                refl[a * n + b] = index[&roots[b].axpy(&-k, &roots[a])];
                cartan[a * n + b] = (q(2) * ip / norm2[b]).to_integer() as i8;
                if let Some(&s) = index.get(&roots[a].add(&roots[b])) {
                    sum[a * n + b] = s;
                }
            }
        }
        let neg = roots.iter().map(|r| index[&r.neg()]).collect();
        let positive = roots.iter().map(|r| r.lex_positive()).collect();
        let support = roots
            .iter()
            .map(|r| r.0.iter().enumerate().filter(|(_, x)| !x.is_zero()).fold(0u32, |m, (i, _)| m | 1 << i))
            .collect();
        let pair_like = roots
            .iter()
            .map(|r| {
                let nz: Vec<Q> = r.0.iter().filter(|x| !x.is_zero()).map(|x| if *x < q(0) { -*x } else { *x }).collect();
                nz.len() == 2 && nz[0] == nz[1]
            })
            .collect();
        Ok(HostContext { host, sys, index, n, refl, sum, cartan, neg, positive, norm2, support, pair_like, groups: OnceLock::new() })
    }

    pub fn num_roots(&self) -> usize {
        self.n
    }

    pub fn root(&self, i: u16) -> &Vector {
        &self.sys.roots[i as usize]
    }

    pub fn index_of(&self, v: &Vector) -> Option<u16> {
        self.index.get(v).copied()
    }

    pub fn full(&self) -> RootSet {
        (0..self.n as u16).collect()
    }

    pub fn reflect(&self, a: u16, b: u16) -> u16 {
        self.refl[a as usize * self.n + b as usize]
    }

    /// Reflection closure of a set of generators (with negatives).
    pub fn closure(&self, gens: &[u16]) -> RootSet {
        let mut set = RootSet::default();
        let mut members: Vec<u16> = Vec::new();
        for &g in gens {
            for x in [g, self.neg[g as usize]] {
                if set.insert(x) {
                    members.push(x);
                }
            }
        }
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for j in 0..=i {
                let y = members[j];
                for z in [self.reflect(x, y), self.reflect(y, x)] {
                    if set.insert(z) {
                        members.push(z);
                    }
                }
            }
            i += 1;
        }
        set
    }

    /// Whether `set` is closed under its own reflections.
    pub fn is_closed(&self, set: &RootSet) -> bool {
        let m: Vec<u16> = set.iter().collect();
        m.iter().all(|&a| m.iter().all(|&b| set.contains(self.reflect(a, b))))
    }

    /// Simple roots (unordered) of a closed subset.
    fn simple_of(&self, set: &RootSet) -> Vec<u16> {
        let pos: Vec<u16> = set.iter().filter(|&i| self.positive[i as usize]).collect();
        let mut dec = RootSet::default();
        for (k, &a) in pos.iter().enumerate() {
            for &b in &pos[k + 1..] {
                let s = self.sum[a as usize * self.n + b as usize];
                if s != NONE && set.contains(s) {
                    dec.insert(s);
                }
            }
        }
        pos.into_iter().filter(|&i| !dec.contains(i)).collect()
    }

    /// Decompose and classify a closed subset.
    pub fn analyze(&self, set: &RootSet) -> Analysis {
        let simple = self.simple_of(set);
        let k = simple.len();
        let mut comp_id = vec![usize::MAX; k];
        let mut groups: Vec<Vec<usize>> = vec![];
        for s in 0..k {
            if comp_id[s] != usize::MAX {
                continue;
            }
            let id = groups.len();
            comp_id[s] = id;
            let mut stack = vec![s];
            let mut g = vec![];
            while let Some(i) = stack.pop() {
                g.push(i);
                for j in 0..k {
                    if comp_id[j] == usize::MAX && self.cartan[simple[i] as usize * self.n + simple[j] as usize] != 0 {
                        comp_id[j] = id;
                        stack.push(j);
                    }
                }
            }
            g.sort();
            groups.push(g);
        }
        let mut components: Vec<Comp> = groups
            .iter()
            .map(|g| {
                let s: Vec<u16> = g.iter().map(|&i| simple[i]).collect();
                let m: Vec<Vec<i128>> = s
                    .iter()
                    .map(|&a| s.iter().map(|&b| self.cartan[a as usize * self.n + b as usize] as i128).collect())
                    .collect();
                let (t, p) = classify_cartan_matrix(&m).expect("closed subsets are root systems");
                let ordered: Vec<u16> = p.iter().map(|&i| s[i]).collect();
                Comp { cartan: t, roots: self.closure(&ordered), simple: ordered }
            })
            .collect();
        components.sort_by(|a, b| a.cartan.cmp(&b.cartan).then_with(|| a.simple.cmp(&b.simple)));
        let mut normalized: Vec<CartanType> = components.iter().map(|c| c.cartan).collect();
        normalized.sort();
        let mut raw = self.raw_labels(&components);
        raw.sort();
        Analysis { set: *set, components, raw, normalized }
    }

    /// Structural labels: coordinate blocks `{±e_i ± e_j}` are `D_s`, and
    /// single-coordinate rank-one components are `B_1` (short) or `C_1`.
    fn raw_labels(&self, comps: &[Comp]) -> Vec<CartanType> {
        let supp: Vec<u32> = comps.iter().map(|c| c.roots.iter().fold(0, |m, r| m | self.support[r as usize])).collect();
        let n = comps.len();
        let mut block: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                if supp[i] & supp[j] != 0 {
                    let (bi, bj) = (block[i], block[j]);
                    for b in block.iter_mut() {
                        if *b == bj {
                            *b = bi;
                        }
                    }
                }
            }
        }
        let mut out = vec![];
        let mut done = vec![false; n];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&j| block[j] == block[i]).collect();
            for &j in &members {
                done[j] = true;
            }
            let s = members.iter().fold(0u32, |m, &j| m | supp[j]).count_ones() as usize;
            let roots = members.iter().fold(RootSet::default(), |acc, &j| acc.union(&comps[j].roots));
            let scale_ok = {
                let norms: HashSet<&Q> = roots.iter().map(|r| &self.norm2[r as usize]).collect();
                norms.len() == 1
            };
            let d_block = s >= 2
                && members.len() <= 2
                && (members.len() == 2 || s >= 3)
                && roots.len() == 2 * s * (s - 1)
                && scale_ok
                && roots.iter().all(|r| self.pair_like[r as usize]);
            if d_block {
                out.push(CartanType::d(s));
                continue;
            }
            for &j in &members {
                let c = &comps[j];
                if c.cartan == CartanType::a(1) && supp[j].count_ones() == 1 {
                    let n2 = self.norm2[c.simple[0] as usize];
                    out.push(if n2 <= q(1) { CartanType::b(1) } else { CartanType::c(1) });
                } else if c.cartan == CartanType::b(2) {
                    // long roots on one coordinate: the C_2 realization
                    let long = c.simple[0];
                    let single = self.support[long as usize].count_ones() == 1;
                    out.push(if single { CartanType::c(2) } else { CartanType::b(2) });
                } else {
                    out.push(c.cartan);
                }
            }
        }
        out
    }

    /// Coefficients of roots of a component in its simple roots.
    fn coefficients(&self, simple: &[u16], roots: &RootSet) -> Vec<(u16, Vec<Q>)> {
        let sv: Vec<Vector> = simple.iter().map(|&i| self.root(i).clone()).collect();
        let g = Matrix::gram(&sv);
        let k = sv.len();
        let inv: Vec<Vector> = (0..k).map(|i| g.solve(&Vector::unit(k, i)).expect("simple roots independent")).collect();
        roots
            .iter()
            .map(|r| {
                let rhs: Vec<Q> = sv.iter().map(|s| s.dot(self.root(r))).collect();
                let c = (0..k).map(|i| inv[i].0.iter().zip(&rhs).map(|(a, b)| a * b).sum()).collect();
                (r, c)
            })
            .collect()
    }

    /// Lowest root of a component.
    pub fn lowest(&self, c: &Comp) -> u16 {
        self.coefficients(&c.simple, &c.roots)
            .into_iter()
            .min_by(|a, b| a.1.iter().sum::<Q>().cmp(&b.1.iter().sum::<Q>()).then(a.0.cmp(&b.0)))
            .unwrap()
            .0
    }

    /// Root whose coroot is the lowest root of the dual system.
    pub fn dual_lowest(&self, c: &Comp) -> u16 {
        let n2: Vec<Q> = c.simple.iter().map(|&s| self.norm2[s as usize]).collect();
        let h = |(r, co): &(u16, Vec<Q>)| -> Q { co.iter().zip(&n2).map(|(m, l)| m * l).sum::<Q>() / self.norm2[*r as usize] };
        self.coefficients(&c.simple, &c.roots)
            .into_iter()
            .min_by(|a, b| h(a).cmp(&h(b)).then(a.0.cmp(&b.0)))
            .unwrap()
            .0
    }

    /// Marks (coefficients of the highest root) of a component, and of the
    /// highest coroot in the simple coroots.
    pub fn marks(&self, c: &Comp) -> (Vec<i128>, Vec<i128>) {
        let co = self.coefficients(&c.simple, &c.roots);
        let find = |r: u16| co.iter().find(|x| x.0 == r).unwrap().1.clone();
        let m: Vec<i128> = find(self.lowest(c)).iter().map(|x| -x.to_integer()).collect();
        let d = self.dual_lowest(c);
        let dm: Vec<i128> = find(d)
            .iter()
            .zip(&c.simple)
            .map(|(x, &s)| -(x * self.norm2[s as usize] / self.norm2[d as usize]).to_integer())
            .collect();
        (m, dm)
    }

    /// One-step descendants of an analyzed subset. `rank_preserving`
    /// restricts to the extended-diagram steps.
    pub fn children(&self, a: &Analysis, rank_preserving: bool) -> Vec<RootSet> {
        let mut out = Vec::new();
        for (ci, c) in a.components.iter().enumerate() {
            let rest = a.components.iter().enumerate().filter(|(j, _)| *j != ci).fold(RootSet::default(), |acc, (_, x)| acc.union(&x.roots));
            let mut push = |gens: Vec<u16>| {
                let s = self.closure(&gens);
                if s != c.roots {
                    out.push(rest.union(&s));
                }
            };
            if !rank_preserving {
                for j in 0..c.simple.len() {
                    push(c.simple.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect());
                }
            }
            let mut extra = vec![self.lowest(c)];
            if !c.cartan.is_simply_laced() {
                extra.push(self.dual_lowest(c));
            }
            for th in extra {
                for j in 0..c.simple.len() {
                    let mut gens: Vec<u16> = c.simple.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect();
                    gens.push(th);
                    push(gens);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Whether `host` keys are exact orbit keys (rank at most 4).
    pub fn exact(&self) -> bool {
        self.host.rank <= 4
    }

    /// Weyl group and arrangement automorphism group as root permutations.
    pub fn groups(&self) -> &(Vec<Perm>, Vec<Perm>) {
        self.groups.get_or_init(|| {
            let simple: Vec<u16> = self.sys.simple_roots.iter().map(|r| self.index[r]).collect();
            let gens: Vec<Perm> = simple.iter().map(|&s| (0..self.n as u16).map(|b| self.reflect(s, b)).collect()).collect();
            let w = perm_closure(&gens, self.n);
            let mut agens = gens.clone();
            agens.extend(self.diagram_automorphisms());
            let aut = perm_closure(&agens, self.n);
            (w, aut)
        })
    }

    /// Similarities permuting simple root directions according to the
    /// automorphisms of the Coxeter diagram; simple roots are rescaled by
    /// `max(1, |a_i|^2/|a_s(i)|^2)` so that lengths swap consistently.
    fn diagram_automorphisms(&self) -> Vec<Perm> {
        let simple = &self.sys.simple_roots;
        let k = simple.len();
        let d = crate::diagram::CoxeterDiagram::from_normals(simple).expect("simple roots");
        let mut out = Vec::new();
        for sigma in crate::diagram::isomorphisms(&d, &d) {
            if sigma.iter().enumerate().all(|(i, &s)| i == s) {
                continue;
            }
            let img: Vec<Vector> = (0..k)
                .map(|i| {
                    let f = self.norm2[self.index[&simple[i]] as usize] / self.norm2[self.index[&simple[sigma[i]]] as usize];
                    simple[sigma[i]].scale(&if f > Q::one() { f } else { Q::one() })
                })
                .collect();
            // similarity check: Gram matrices proportional
            let g0 = Matrix::gram(simple);
            let g1 = Matrix::gram(&img);
            let lambda = g1.get(0, 0) / g0.get(0, 0);
            if (0..k).any(|i| (0..k).any(|j| g1.get(i, j) != lambda * g0.get(i, j))) {
                continue;
            }
            let perm: Option<Perm> = self
                .sys
                .roots
                .iter()
                .map(|r| {
                    let c = self.sys.simple_coordinates(r)?;
                    let v = img.iter().zip(&c.0).fold(Vector::zeros(r.dim()), |acc, (b, x)| acc.axpy(x, b));
                    // the host root in the same direction
                    [Q::one(), q(2), q(3), Q::new(1, 2), Q::new(1, 3)].iter().find_map(|s| self.index.get(&v.scale(s)).copied())
                })
                .collect();
            if let Some(p) = perm {
                out.push(p);
            }
        }
        out
    }

    /// Equivalence key of a closed subset.
    pub fn key(&self, a: &Analysis, up_to_aut: bool) -> SubsystemKey {
        if self.exact() {
            let (w, aut) = self.groups();
            let g = if up_to_aut { aut } else { w };
            let best = g.iter().map(|p| a.set.iter().map(|i| p[i as usize]).collect::<RootSet>()).min().unwrap();
            SubsystemKey::Orbit(best)
        } else if matches!(self.host.family, Family::B | Family::C) {
            SubsystemKey::Labels(a.raw.clone())
        } else {
            SubsystemKey::Labels(a.normalized.clone())
        }
    }

    /// Record for an analyzed subset.
    pub fn record(&self, a: &Analysis, up_to_aut: bool) -> SubsystemRecord {
        let components: Vec<Component> = a
            .components
            .iter()
            .map(|c| Component {
                cartan: c.cartan,
                simple_roots: c.simple.iter().map(|&i| self.root(i).clone()).collect(),
                roots: c.roots.iter().map(|i| self.root(i).clone()).collect(),
            })
            .collect();
        let simple_roots: Vec<Vector> = components.iter().flat_map(|c| c.simple_roots.iter().cloned()).collect();
        let is_root_subsystem = condition_star_star(&simple_roots, &self.sys);
        SubsystemRecord {
            host: self.host,
            component_labels: a.raw.clone(),
            types: a.normalized.clone(),
            simple_roots,
            components,
            is_root_subsystem,
            index_in_host: self.host.weyl_order() / rootsys::weyl_order(&a.normalized),
            key: self.key(a, up_to_aut),
        }
    }

    /// Root set of a record (its roots must be host roots).
    pub fn set_of(&self, r: &SubsystemRecord) -> Result<RootSet> {
        r.components.iter().flat_map(|c| c.roots.iter()).map(|v| self.index_of(v).ok_or(Error::NotHostRoot)).collect()
    }
}

fn perm_closure(gens: &[Perm], n: usize) -> Vec<Perm> {
    let id: Perm = (0..n as u16).collect();
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let c: Perm = p.iter().map(|&i| g[i as usize]).collect();
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    let mut v: Vec<Perm> = seen.into_iter().collect();
    v.sort();
    v
}

fn condition_star_star(simple: &[Vector], host: &FiniteRootSystem) -> bool {
    simple.iter().enumerate().all(|(i, a)| simple.iter().enumerate().all(|(j, b)| i == j || !host.is_root(&a.sub(b))))
}

/// A reflection subgroup of a finite reflection group with a concrete
/// simple system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemRecord {
    pub host: CartanType,
    /// Raw structural labels (distinguishing `A3`/`D3`, `A1`/`B1`, `D2`).
    pub component_labels: Vec<CartanType>,
    /// Irreducible types.
    pub types: Vec<CartanType>,
    pub simple_roots: Vec<Vector>,
    pub components: Vec<Component>,
    pub is_root_subsystem: bool,
    pub index_in_host: u128,
    pub key: SubsystemKey,
}

impl SubsystemRecord {
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn roots(&self) -> Vec<Vector> {
        let mut v: Vec<Vector> = self.components.iter().flat_map(|c| c.roots.iter().cloned()).collect();
        v.sort();
        v
    }

    pub fn label_string(&self) -> String {
        rootsys::format_types(&self.component_labels)
    }
}

/// Condition `alpha_i - alpha_j` not a root, for a simple system of a
/// reflection subgroup.
pub fn is_root_subsystem(simple: &[Vector], host: &FiniteRootSystem) -> Result<bool> {
    if simple.iter().any(|r| !host.is_root(r)) {
        return Err(Error::NotHostRoot);
    }
    Ok(condition_star_star(simple, host))
}

/// Record for a reflection-closed set of host roots.
pub fn record_from_roots(host: CartanType, roots: &[Vector], up_to_aut: bool) -> Result<SubsystemRecord> {
    let ctx = context(host)?;
    let set: RootSet = roots.iter().map(|v| ctx.index_of(v).ok_or(Error::NotHostRoot)).collect::<Result<_>>()?;
    if !ctx.is_closed(&set) {
        return Err(Error::NotClosed);
    }
    Ok(ctx.record(&ctx.analyze(&set), up_to_aut))
}

/// Search all descendants of `start`, deduplicated by key.
fn explore(ctx: &HostContext, start: RootSet, up_to_aut: bool, rank_preserving: bool) -> BTreeMap<SubsystemKey, Analysis> {
    let a0 = ctx.analyze(&start);
    let mut seen: BTreeMap<SubsystemKey, Analysis> = BTreeMap::new();
    seen.insert(ctx.key(&a0, up_to_aut), a0.clone());
    let mut frontier = vec![a0];
    while !frontier.is_empty() {
        let produced: Vec<Vec<(SubsystemKey, Analysis)>> = frontier
            .par_iter()
            .map(|a| {
                ctx.children(a, rank_preserving)
                    .into_iter()
                    .map(|s| {
                        let an = ctx.analyze(&s);
                        (ctx.key(&an, up_to_aut), an)
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (k, a) in produced.into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(k) {
                e.insert(a.clone());
                next.push(a);
            }
        }
        frontier = next;
    }
    seen
}

/// All reflection subgroups of `W(host)` up to conjugacy, or up to
/// automorphisms of the mirror arrangement when `up_to_aut`.
///
/// Classes are exact at rank at most 4; above that, classes are keyed by
/// type multisets (raw labels for `B_n`/`C_n`).
pub fn enumerate_reflection_subgroups(host: CartanType, up_to_aut: bool) -> Result<Vec<SubsystemRecord>> {
    let ctx = context(host)?;
    let found = explore(&ctx, ctx.full(), up_to_aut, false);
    let mut out: Vec<SubsystemRecord> = found.values().map(|a| ctx.record(a, up_to_aut)).collect();
    sort_records(&mut out);
    Ok(out)
}

fn sort_records(v: &mut [SubsystemRecord]) {
    v.sort_by(|a, b| {
        a.index_in_host
            .cmp(&b.index_in_host)
            .then_with(|| a.component_labels.cmp(&b.component_labels))
            .then_with(|| a.key.cmp(&b.key))
    });
}

/// Maximal proper reflection subgroups, one per automorphism class.
///
/// Non-maximal-rank ones delete a simple root with mark 1 for both the
/// system and its dual; maximal-rank candidates delete a node of prime
/// mark from the extended diagram of the system or of its dual, and are
/// kept only when no other candidate contains them.
pub fn maximal_finite_subgroups(host: CartanType) -> Result<Vec<SubsystemRecord>> {
    let ctx = context(host)?;
    let full = ctx.analyze(&ctx.full());
    let c = &full.components[0];
    let (marks, dual_marks) = ctx.marks(c);
    let is_prime = |m: i128| m >= 2 && (2..m).all(|d| m % d != 0);
    let mut levi = BTreeMap::new();
    for j in 0..c.simple.len() {
        if marks[j] == 1 && dual_marks[j] == 1 {
            let gens: Vec<u16> = c.simple.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect();
            let a = ctx.analyze(&ctx.closure(&gens));
            levi.insert(ctx.key(&a, true), a);
        }
    }
    let mut cands: BTreeMap<SubsystemKey, Analysis> = BTreeMap::new();
    for (th, ms) in [(ctx.lowest(c), &marks), (ctx.dual_lowest(c), &dual_marks)] {
        for j in 0..c.simple.len() {
            if !is_prime(ms[j]) {
                continue;
            }
            let mut gens: Vec<u16> = c.simple.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect();
            gens.push(th);
            let a = ctx.analyze(&ctx.closure(&gens));
            cands.entry(ctx.key(&a, true)).or_insert(a);
        }
    }
    let keys: Vec<SubsystemKey> = cands.keys().cloned().collect();
    let contained: Vec<bool> = keys
        .par_iter()
        .map(|k1| {
            let a1 = &cands[k1];
            let o1 = rootsys::weyl_order(&a1.normalized);
            keys.iter().filter(|k2| *k2 != k1).any(|k2| {
                let a2 = &cands[k2];
                let o2 = rootsys::weyl_order(&a2.normalized);
                o2 > o1 && o2.is_multiple_of(o1) && explore(&ctx, a2.set, true, true).contains_key(k1)
            })
        })
        .collect();
    let mut out: Vec<SubsystemRecord> = keys
        .iter()
        .zip(&contained)
        .filter(|(_, &c)| !c)
        .map(|(k, _)| ctx.record(&cands[k], true))
        .chain(levi.values().map(|a| ctx.record(a, true)))
        .collect();
    sort_records(&mut out);
    Ok(out)
}

/// Equivalence of two subgroups of the same host under automorphisms.
///
/// For `B_n`/`C_n` with `n >= 3` this is equality of raw label multisets;
/// otherwise exact orbit equality at rank at most 4 (automorphisms include
/// the length-swapping similarities of `B_2`, `G_2`, `F_4`), and type
/// equality above.
pub fn are_aut_equivalent(r1: &SubsystemRecord, r2: &SubsystemRecord) -> Result<bool> {
    if r1.host != r2.host {
        return Err(Error::HostMismatch);
    }
    let host = r1.host;
    if matches!(host.family, Family::B | Family::C) && host.rank >= 3 {
        return Ok(r1.component_labels == r2.component_labels);
    }
    let ctx = context(host)?;
    let a1 = ctx.analyze(&ctx.set_of(r1)?);
    let a2 = ctx.analyze(&ctx.set_of(r2)?);
    Ok(ctx.key(&a1, true) == ctx.key(&a2, true))
}

/// Shorthand used by tests and the verifier: the lowest root of the
/// component, as a vector.
pub fn component_lowest(c: &Component) -> Vector {
    c.lowest_root()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn types_of(v: &[SubsystemRecord]) -> Vec<String> {
        v.iter().map(|r| r.label_string()).collect()
    }

    #[test]
    fn root_subsystem_condition() {
        let a3 = rootsys::build_root_system(CartanType::a(3)).unwrap();
        assert!(is_root_subsystem(&a3.simple_roots, &a3).unwrap());
        let b2 = rootsys::build_root_system(CartanType::b(2)).unwrap();
        let e1 = Vector::from_ints(&[1, 0]);
        let e2 = Vector::from_ints(&[0, 1]);
        assert!(!is_root_subsystem(&[e1.clone(), e2], &b2).unwrap());
        assert_eq!(is_root_subsystem(&[Vector::from_ints(&[2, 0])], &b2), Err(Error::NotHostRoot));
        let _ = e1;
    }

    #[test]
    fn g2_classes() {
        let v = enumerate_reflection_subgroups(CartanType::g2(), false).unwrap();
        let rank2: Vec<String> = v.iter().filter(|r| r.rank() == 2).map(|r| r.label_string()).collect();
        assert_eq!(rank2, vec!["G2", "A2", "A2", "A1+A1"]);
        // A2 from long roots is a root subsystem, A2 from short roots is not
        let a2: Vec<bool> = v.iter().filter(|r| r.label_string() == "A2").map(|r| r.is_root_subsystem).collect();
        assert_eq!(a2.len(), 2);
        assert!(a2.contains(&true) && a2.contains(&false));
        // up to the length swap they merge
        let w = enumerate_reflection_subgroups(CartanType::g2(), true).unwrap();
        assert_eq!(w.iter().filter(|r| r.label_string() == "A2").count(), 1);
    }

    #[test]
    fn f4_contains_2b2() {
        let v = enumerate_reflection_subgroups(CartanType::f4(), true).unwrap();
        let b2b2: Vec<&SubsystemRecord> = v.iter().filter(|r| r.types == vec![CartanType::b(2), CartanType::b(2)]).collect();
        assert_eq!(b2b2.len(), 1);
        assert!(!b2b2[0].is_root_subsystem);
    }

    #[test]
    fn maximal_examples() {
        let b4 = maximal_finite_subgroups(CartanType::b(4)).unwrap();
        let mut t = types_of(&b4);
        t.sort();
        assert_eq!(t, vec!["B1+B3", "B2+B2", "D4"]);
        let f4 = maximal_finite_subgroups(CartanType::f4()).unwrap();
        let got: Vec<(String, u128)> = f4.iter().map(|r| (r.label_string(), r.index_in_host)).collect();
        assert_eq!(got, vec![("B4".to_string(), 3), ("A2+A2".to_string(), 32)]);
        let e6 = maximal_finite_subgroups(CartanType::e(6)).unwrap();
        assert!(e6.iter().any(|r| r.label_string() == "A1+A5" && r.index_in_host == 36));
        let g2 = maximal_finite_subgroups(CartanType::g2()).unwrap();
        let mut t = types_of(&g2);
        t.sort();
        assert_eq!(t, vec!["A1+A1", "A2"]);
    }

    #[test]
    fn aut_equivalence_b7() {
        let ctx = context(CartanType::b(7)).unwrap();
        let e = |i: usize| Vector::unit(7, i);
        let rs = |vs: Vec<Vector>| -> Vec<u16> { vs.iter().map(|v| ctx.index_of(v).unwrap()).collect() };
        // A3 + D2 versus D3 + 2A1
        let a3d2 = rs(vec![e(0).sub(&e(1)), e(1).sub(&e(2)), e(2).sub(&e(3)), e(4).sub(&e(5)), e(4).add(&e(5))]);
        let d3a1a1 = rs(vec![e(0).sub(&e(1)), e(1).sub(&e(2)), e(1).add(&e(2)), e(3).sub(&e(4)), e(5).sub(&e(6))]);
        let r1 = ctx.record(&ctx.analyze(&ctx.closure(&a3d2)), true);
        let r2 = ctx.record(&ctx.analyze(&ctx.closure(&d3a1a1)), true);
        assert_eq!(r1.types, r2.types);
        assert!(!are_aut_equivalent(&r1, &r2).unwrap());
        assert!(are_aut_equivalent(&r1, &r1).unwrap());
        let other = enumerate_reflection_subgroups(CartanType::a(2), false).unwrap();
        assert_eq!(are_aut_equivalent(&r1, &other[0]), Err(Error::HostMismatch));
    }

    #[test]
    fn raw_labels_match_exact_aut_classes_for_b() {
        // at rank 3 and 4 the exact automorphism classes are the raw-label classes
        for host in [CartanType::b(3), CartanType::b(4), CartanType::c(3), CartanType::c(4)] {
            let v = enumerate_reflection_subgroups(host, true).unwrap();
            let labels: HashSet<Vec<CartanType>> = v.iter().map(|r| r.component_labels.clone()).collect();
            assert_eq!(labels.len(), v.len(), "{host}");
        }
    }

    #[test]
    fn indices_are_positive_and_one_only_for_full() {
        for host in [CartanType::a(3), CartanType::b(3), CartanType::g2(), CartanType::d(4)] {
            for r in enumerate_reflection_subgroups(host, false).unwrap() {
                assert!(r.index_in_host >= 1);
                assert_eq!(r.index_in_host == 1, r.types == vec![host.normalized()[0]].into_iter().collect::<Vec<_>>() || (r.rank() == host.rank && r.index_in_host == 1));
                if !r.is_root_subsystem {
                    assert!(matches!(host.family, Family::B | Family::C | Family::F | Family::G));
                }
            }
        }
    }

    #[test]
    fn b_type_grammar() {
        for n in 2..=6 {
            for r in enumerate_reflection_subgroups(CartanType::b(n), true).unwrap() {
                let used: usize = r
                    .component_labels
                    .iter()
                    .map(|t| match t.family {
                        Family::A => t.rank + 1,
                        Family::B | Family::D => t.rank,
                        _ => panic!("unexpected {t} in B{n}"),
                    })
                    .sum();
                assert!(used <= n);
            }
        }
    }
}
