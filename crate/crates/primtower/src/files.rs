//! On-disk formats for Lie data and level-one objects (JSON with exact
//! scalars as strings).
//!
//! Lie file: `{ "char": c, "dim": d, "names": [...],
//! "brackets": [[i, j, [[k, "scalar"], ...]], ...] }` with `i < j`; missing
//! pairs have zero bracket. In characteristic p an optional
//! `"p_operation": [[i, [[k, "scalar"], ...]], ...]` gives the p-th powers
//! of basis elements (missing entries are zero).
//!
//! Level-one object file: `{ "char": c, "dim": d, "names": [...], "cap": D,
//! "mu0": [{ "weight": n, "basis_index": i, "value": ["scalar"; d] }, ...] }`.
//! Values are given on the canonical echelon primitive basis per weight for
//! weights `2..=D`; omitted entries are zero and the weight-one block is the
//! identity, as the unit law requires.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lie::LieData;
use crate::linalg::SparseVec;
use crate::scalar::FieldSpec;
use crate::tower::B1Object;

/// Sparse coordinates on the wire: `[index, "scalar"]` pairs.
type WireVector = Vec<(usize, String)>;

#[derive(Deserialize)]
struct LieFile {
    #[serde(rename = "char")]
    characteristic: u64,
    dim: usize,
    names: Vec<String>,
    #[serde(default)]
    brackets: Vec<(usize, usize, WireVector)>,
    #[serde(default)]
    p_operation: Option<Vec<(usize, WireVector)>>,
}

#[derive(Deserialize)]
struct B1File {
    #[serde(rename = "char")]
    characteristic: u64,
    dim: usize,
    names: Vec<String>,
    cap: u32,
    #[serde(default)]
    mu0: Vec<Mu0Entry>,
}

#[derive(Deserialize)]
struct Mu0Entry {
    weight: u32,
    basis_index: usize,
    value: Vec<String>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("cannot parse {}: {e}", path.display())))
}

fn parse_vector(field: FieldSpec, dim: usize, entries: &[(usize, String)]) -> Result<SparseVec> {
    let mut out = Vec::with_capacity(entries.len());
    for (k, text) in entries {
        if *k >= dim {
            return Err(Error::InvalidInput(format!(
                "coordinate index {k} out of range for dimension {dim}"
            )));
        }
        out.push((*k, field.parse(text)?));
    }
    Ok(SparseVec::from_entries(out))
}

pub fn load_lie(path: &Path) -> Result<LieData> {
    let file: LieFile = read_json(path)?;
    let field = FieldSpec::new(file.characteristic)?;
    if file.names.len() != file.dim {
        return Err(Error::InvalidInput(format!(
            "dim is {} but {} names are given",
            file.dim,
            file.names.len()
        )));
    }
    let mut upper = Vec::new();
    for (i, j, entries) in &file.brackets {
        upper.push((*i, *j, parse_vector(field, file.dim, entries)?));
    }
    let p_op = match file.p_operation {
        None => {
            if field.characteristic() > 0 {
                Some(Vec::new()) // zero p-operation by default
            } else {
                None
            }
        }
        Some(entries) => {
            let mut table = Vec::new();
            for (i, e) in &entries {
                table.push((*i, parse_vector(field, file.dim, e)?));
            }
            Some(table)
        }
    };
    LieData::new(field, file.names, upper, p_op)
}

pub fn load_b1(path: &Path) -> Result<B1Object> {
    let file: B1File = read_json(path)?;
    let field = FieldSpec::new(file.characteristic)?;
    if file.names.len() != file.dim {
        return Err(Error::InvalidInput(format!(
            "dim is {} but {} names are given",
            file.dim,
            file.names.len()
        )));
    }
    let mut entries = Vec::new();
    for e in &file.mu0 {
        if e.value.len() != file.dim {
            return Err(Error::InvalidInput(format!(
                "mu0 value at weight {} index {} has {} coordinates, expected {}",
                e.weight,
                e.basis_index,
                e.value.len(),
                file.dim
            )));
        }
        let dense: Vec<(usize, String)> = e
            .value
            .iter()
            .enumerate()
            .map(|(k, s)| (k, s.clone()))
            .collect();
        entries.push((
            e.weight,
            e.basis_index,
            parse_vector(field, file.dim, &dense)?,
        ));
    }
    B1Object::from_entries(field, file.names, file.cap, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn lie_file_round_trip() {
        let f = write_temp(
            r#"{ "char": 0, "dim": 2, "names": ["x", "y"],
                 "brackets": [[0, 1, [[1, "1"]]]] }"#,
        );
        let lie = load_lie(f.path()).unwrap();
        assert_eq!(lie.dim(), 2);
        assert_eq!(
            lie.bracket_basis(0, 1),
            &SparseVec::unit(1, FieldSpec::rationals())
        );
        // missing pairs default to zero and the table is antisymmetric
        assert_eq!(
            lie.bracket_basis(1, 0),
            &SparseVec::unit(1, FieldSpec::rationals()).neg()
        );
    }

    #[test]
    fn restricted_lie_file() {
        let f = write_temp(
            r#"{ "char": 2, "dim": 1, "names": ["x"],
                 "p_operation": [[0, [[0, "1"]]]] }"#,
        );
        let lie = load_lie(f.path()).unwrap();
        assert!(lie.has_p_operation());
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(lie.p_operation_basis(0).unwrap(), &SparseVec::unit(0, f2));
        // characteristic p without an explicit table gets the zero operation
        let g = write_temp(r#"{ "char": 3, "dim": 1, "names": ["x"] }"#);
        let lie = load_lie(g.path()).unwrap();
        assert!(lie.has_p_operation());
        assert!(lie.p_operation_basis(0).unwrap().is_zero());
    }

    #[test]
    fn b1_file_loads_with_identity_weight_one() {
        let f = write_temp(
            r#"{ "char": 0, "dim": 2, "names": ["x", "y"], "cap": 3,
                 "mu0": [ { "weight": 2, "basis_index": 0, "value": ["0", "1"] } ] }"#,
        );
        let obj = load_b1(f.path()).unwrap();
        let q = FieldSpec::rationals();
        assert_eq!(obj.mu0_value(1, 0), &SparseVec::unit(0, q));
        assert_eq!(obj.mu0_value(2, 0), &SparseVec::unit(1, q));
        // weight-one entries are rejected: the unit law fixes that block
        let bad = write_temp(
            r#"{ "char": 0, "dim": 1, "names": ["x"], "cap": 2,
                 "mu0": [ { "weight": 1, "basis_index": 0, "value": ["1"] } ] }"#,
        );
        assert!(load_b1(bad.path()).is_err());
    }

    #[test]
    fn malformed_files_error() {
        let f = write_temp(r#"{ "char": 4, "dim": 1, "names": ["x"] }"#);
        assert!(matches!(load_lie(f.path()), Err(Error::NotPrime(4))));
        let f = write_temp(r#"{ "char": 0, "dim": 2, "names": ["x"] }"#);
        assert!(load_lie(f.path()).is_err());
        let f = write_temp(r#"not json"#);
        assert!(load_lie(f.path()).is_err());
        // scalar outside the prime field
        let f = write_temp(
            r#"{ "char": 3, "dim": 1, "names": ["x"], "p_operation": [[0, [[0, "5"]]]] }"#,
        );
        assert!(load_lie(f.path()).is_err());
    }
}
