//! Test-side oracles, independent of the library's enumeration and
//! volume code.

#![allow(dead_code)]

use coxeter_subgroups::linalg::{q, Vector, Q};
use coxeter_subgroups::rootsys::{build_root_system, CartanType};
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, HashSet, VecDeque};

pub fn t(s: &str) -> CartanType {
    s.parse().unwrap()
}

fn reflect(a: &Vector, b: &Vector) -> Vector {
    let c = q(2) * a.dot(b) / a.norm2();
    b.axpy(&-c, a)
}

/// Roots of a finite type with the reflection action as a lookup table.
pub struct Host {
    pub roots: Vec<Vector>,
    /// `refl[a][b]` = index of `s_a(b)`.
    pub refl: Vec<Vec<usize>>,
    pub simple: Vec<usize>,
}

impl Host {
    pub fn new(ty: CartanType) -> Host {
        let sys = build_root_system(ty).unwrap();
        let roots = sys.roots.clone();
        assert!(roots.len() <= 64, "bitmask oracle needs at most 64 roots");
        let idx = |v: &Vector| roots.iter().position(|r| r == v).expect("closed");
        let refl = roots.iter().map(|a| roots.iter().map(|b| idx(&reflect(a, b))).collect()).collect();
        let simple = sys.simple_roots.iter().map(idx).collect();
        Host { roots, refl, simple }
    }

    fn close(&self, mut m: u64) -> u64 {
        loop {
            let mut next = m;
            for a in 0..self.roots.len() {
                if m >> a & 1 == 0 {
                    continue;
                }
                for b in 0..self.roots.len() {
                    if m >> b & 1 == 1 {
                        next |= 1 << self.refl[a][b];
                    }
                }
            }
            if next == m {
                return m;
            }
            m = next;
        }
    }

    /// Root sets of all reflection subgroups, by brute-force closure.
    pub fn all_reflection_subgroups(&self) -> HashSet<u64> {
        let mut seen = HashSet::from([0u64]);
        let mut queue = VecDeque::from([0u64]);
        while let Some(m) = queue.pop_front() {
            for r in 0..self.roots.len() {
                if m >> r & 1 == 0 {
                    let n = self.close(m | 1 << r);
                    if seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
        }
        seen
    }

    /// The Weyl group as permutations of root indices.
    pub fn weyl_group(&self) -> Vec<Vec<usize>> {
        let id: Vec<usize> = (0..self.roots.len()).collect();
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut out = Vec::new();
        while let Some(w) = queue.pop_front() {
            for &s in &self.simple {
                let n: Vec<usize> = w.iter().map(|&i| self.refl[s][i]).collect();
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
            out.push(w);
        }
        out
    }

    pub fn mask(&self, roots: &[Vector]) -> u64 {
        roots.iter().fold(0, |m, r| m | 1 << self.roots.iter().position(|x| x == r).expect("host root"))
    }

    /// Least image of a root set under the Weyl group.
    pub fn canonical(&self, w: &[Vec<usize>], m: u64) -> u64 {
        w.iter()
            .map(|p| (0..self.roots.len()).filter(|&i| m >> i & 1 == 1).fold(0u64, |a, i| a | 1 << p[i]))
            .min()
            .unwrap()
    }

    pub fn canonical_classes(&self) -> BTreeSet<u64> {
        let w = self.weyl_group();
        self.all_reflection_subgroups().into_iter().map(|m| self.canonical(&w, m)).collect()
    }
}

/// Determinant by fraction-exact elimination.
pub fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return q(0) };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    d
}

/// Squared volume (up to a constant) of the simplex on the given vertices,
/// from the Gram determinant of its edges.
pub fn simplex_vol2(vs: &[Vector]) -> Q {
    let e: Vec<Vector> = vs[1..].iter().map(|v| v.sub(&vs[0])).collect();
    det(e.iter().map(|a| e.iter().map(|b| a.dot(b)).collect()).collect())
}

/// Integer square root of an exact rational, if it is a perfect square.
pub fn exact_sqrt(x: Q) -> Option<u128> {
    if x.is_negative() || !x.is_integer() {
        return None;
    }
    let n = x.to_integer() as u128;
    let r = (n as f64).sqrt().round() as u128;
    (r.saturating_sub(2)..=r + 2).find(|s| s * s == n)
}

/// Number of host mirrors `(alpha, x) in Z` through a point.
pub fn mirrors_through(roots: &[Vector], x: &Vector) -> usize {
    roots.iter().filter(|a| a.dot(x).is_integer()).count() / 2
}

/// Invariant of a bounded chamber under isometries of the host tiling:
/// sorted squared vertex distances and sorted mirror counts at vertices.
pub fn tiling_invariant(roots: &[Vector], verts: &[Vector]) -> (Vec<Q>, Vec<usize>) {
    let mut d = Vec::new();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            d.push(verts[i].sub(&verts[j]).norm2());
        }
    }
    d.sort();
    let mut m: Vec<usize> = verts.iter().map(|v| mirrors_through(roots, v)).collect();
    m.sort();
    (d, m)
}
