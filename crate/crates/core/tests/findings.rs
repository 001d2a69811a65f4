//! Computed facts that go beyond the reference tables, each confirmed by
//! an independent test-side invariant.

mod common;

use common::*;
use coxeter_subgroups::affine::build_alcove;
use coxeter_subgroups::rootsys::build_root_system;
use coxeter_subgroups::subgroups::*;
use coxeter_subgroups::subsystems::enumerate_reflection_subgroups;
use std::collections::{BTreeMap, BTreeSet};

/// Indecomposable `(diagram, index)` pairs carried by more than one
/// class, at rank <= 4 and index <= 48.
#[test]
fn non_unique_indecomposable_pairs() {
    let mut found = BTreeSet::new();
    for h in ["A1", "A2", "C2", "G2", "A3", "B3", "C3", "A4", "B4", "C4", "D4", "F4"] {
        let recs = enumerate_subgroups(t(h), 48).unwrap();
        let roots = build_root_system(t(h)).unwrap().roots;
        let mut groups: BTreeMap<(String, Index), Vec<&SubgroupRecord>> = BTreeMap::new();
        for r in recs.iter().filter(|r| r.sub_classes.len() == 1) {
            groups.entry((r.label(), r.index)).or_default().push(r);
        }
        for ((label, idx), g) in groups {
            if g.len() > 1 {
                // independent confirmation that the classes really differ
                let inv: BTreeSet<_> = g.iter().map(|r| tiling_invariant(&roots, &r.chamber.vertices().unwrap())).collect();
                assert_eq!(inv.len(), g.len(), "t{h} {label} {idx}: classes not separated by the invariant");
                found.insert(format!("t{h} > {label} [{idx}]"));
            }
        }
    }
    let want: BTreeSet<String> =
        ["tG2 > tA2 [18]", "tB3 > tA3 [16]", "tB4 > tD4 [32]", "tF4 > tB4 [48]", "tF4 > tC4 [24]"].iter().map(|s| s.to_string()).collect();
    assert_eq!(found, want);
}

/// The long/short swap of `F4` does not extend to the affine group: the
/// extension of `C4` is a `C~4` of index 6, maximal since `B~4` (the only
/// subgroup of index 2 or 3) contains no `C~4` of index 2.
#[test]
fn f4_has_c4_of_index_six() {
    let f4 = t("F4");
    let c4 = enumerate_reflection_subgroups(f4, false).unwrap().into_iter().find(|r| r.component_labels == [t("C4")]).unwrap();
    let g = g_extension(f4, &c4).unwrap();
    assert_eq!((g.label().as_str(), g.index), ("tC4", Index::Finite(6)));
    let f = build_alcove(f4).unwrap();
    assert_eq!(tiling_index_oracle(&f, &g.chamber, 100).unwrap(), 6);

    let small = enumerate_subgroups(f4, 3).unwrap();
    let mid: Vec<String> = small.iter().filter(|r| matches!(r.index, Index::Finite(2) | Index::Finite(3))).map(|r| r.label()).collect();
    assert_eq!(mid, ["tB4"]);
    let b4 = enumerate_subgroups(t("B4"), 2).unwrap();
    assert!(b4.iter().all(|r| r.label() != "tC4"));
}
