//! Python bindings. Records cross the boundary as JSON strings (schema v1).

use coxeter_subgroups::affine::build_alcove;
use coxeter_subgroups::diagram::{self, CoxeterDiagram};
use coxeter_subgroups::rootsys::CartanType;
use coxeter_subgroups::{json, subgroups, subsystems, verify};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Affine type string such as `"tG2"`.
fn affine(s: &str) -> PyResult<CartanType> {
    let t: CartanType = s.strip_prefix('t').ok_or_else(|| err(format!("{s:?} is not an affine type (expected e.g. \"tG2\")")))?.parse().map_err(err)?;
    if !diagram::is_legal_affine(t) {
        return Err(err(format!("illegal affine type {s:?}")));
    }
    Ok(t)
}

fn array(items: Vec<String>) -> String {
    format!("[\n{}\n]", items.join(",\n"))
}

/// Classes of the components of a diagram given as an edge list
/// (`"1 2 3; 2 3 3; 3 1 3"`), e.g. `["tA2"]`; `"?"` for unknown ones.
#[pyfunction]
fn classify(edges: &str) -> PyResult<Vec<String>> {
    let d = CoxeterDiagram::parse(edges).map_err(err)?;
    Ok(diagram::classify(&d).map_err(err)?.iter().map(|c| c.to_string()).collect())
}

/// Subgroups of an affine group up to `max_index`, as a JSON array.
#[pyfunction]
fn enumerate_subgroups(host: &str, max_index: u128) -> PyResult<String> {
    let recs = subgroups::enumerate_subgroups(affine(host)?, max_index).map_err(err)?;
    Ok(array(recs.iter().map(json::emit_subgroup).collect()))
}

/// Reflection subgroups of a finite group (`"F4"`), as a JSON array.
#[pyfunction]
#[pyo3(signature = (host, up_to_aut = false))]
fn enumerate_finite(host: &str, up_to_aut: bool) -> PyResult<String> {
    let t: CartanType = host.parse().map_err(err)?;
    let recs = subsystems::enumerate_reflection_subgroups(t, up_to_aut).map_err(err)?;
    Ok(array(recs.iter().map(json::emit_finite_subgroup).collect()))
}

#[pyfunction]
fn homothety_subgroup(host: &str, k: u32) -> PyResult<String> {
    Ok(json::emit_subgroup(&subgroups::homothety_subgroup(affine(host)?, k).map_err(err)?))
}

/// The non-homothetic self-similar subgroup of `tC2`, `tG2` or `tF4`.
#[pyfunction]
fn exceptional_subgroup(host: &str) -> PyResult<String> {
    Ok(json::emit_subgroup(&subgroups::exceptional_subgroups(affine(host)?).map_err(err)?))
}

/// Exact index of a chamber (subgroup or chamber JSON) by volume ratio.
#[pyfunction]
fn subgroup_index(host: &str, chamber_json: &str) -> PyResult<u128> {
    let f = build_alcove(affine(host)?).map_err(err)?;
    let c = json::parse_chamber_file(chamber_json).map_err(err)?;
    subgroups::subgroup_index(&f, &c).map_err(err)
}

/// Number of alcoves inside a chamber, counted by flooding.
#[pyfunction]
#[pyo3(signature = (host, chamber_json, cap = 1_000_000))]
fn tiling_index(host: &str, chamber_json: &str, cap: usize) -> PyResult<u128> {
    let f = build_alcove(affine(host)?).map_err(err)?;
    let c = json::parse_chamber_file(chamber_json).map_err(err)?;
    subgroups::tiling_index_oracle(&f, &c, cap).map_err(err)
}

/// Whether two subgroup records are equivalent under the host tiling.
#[pyfunction]
fn are_equivalent(a: &str, b: &str) -> PyResult<bool> {
    let a = json::parse_subgroup(a).map_err(err)?;
    let b = json::parse_subgroup(b).map_err(err)?;
    subgroups::are_equivalent(&a, &b).map_err(err)
}

/// Verification report (JSON) for table 2, 3 or 5.
#[pyfunction]
fn verify_table(table: u32) -> PyResult<String> {
    let (checks, _) = match table {
        2 => verify::table2(),
        3 => verify::table3(),
        5 => verify::table5(),
        _ => return Err(err(format!("unknown table {table}"))),
    };
    Ok(json::emit_report(&verify::Report { checks }))
}

#[pymodule]
fn coxeter_subgroups_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", json::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_subgroups, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_finite, m)?)?;
    m.add_function(wrap_pyfunction!(homothety_subgroup, m)?)?;
    m.add_function(wrap_pyfunction!(exceptional_subgroup, m)?)?;
    m.add_function(wrap_pyfunction!(subgroup_index, m)?)?;
    m.add_function(wrap_pyfunction!(tiling_index, m)?)?;
    m.add_function(wrap_pyfunction!(are_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(verify_table, m)?)?;
    Ok(())
}
