//! Sparse exact linear algebra with explicit named bases.
//!
//! Vectors and matrices are sparse lists of `(index, scalar)` pairs with no
//! explicit zeros; subspaces are kept in reduced row-echelon form with
//! strictly increasing pivot columns, so every subspace has exactly one
//! representation and all downstream echelon data is canonical.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{FieldSpec, Scalar};

/// An ordered list of distinct opaque labels with positional lookup.
#[derive(Clone, Debug)]
pub struct Basis {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Basis {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Basis { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}
impl Eq for Basis {}

/// Sparse vector: entries sorted by index, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn unit(i: usize, field: FieldSpec) -> Self {
        SparseVec {
            entries: vec![(i, field.one())],
        }
    }

    /// Canonicalizing constructor: sorts, merges duplicate indices, drops zeros.
    pub fn from_entries(entries: Vec<(usize, Scalar)>) -> Self {
        let mut entries = entries;
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc = acc.add(&c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SparseVec { entries: out }
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        if c.is_zero() {
            SparseVec::zero()
        } else {
            SparseVec {
                entries: vec![(i, c)],
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, a)| (*i, a.mul(c))).collect(),
        }
    }

    /// `self + c * other`, merged exactly.
    pub fn add_scaled(&self, other: &SparseVec, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y.mul(c)));
                        b.next();
                    } else {
                        let s = x.add(&y.mul(c));
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y.mul(c)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let one = match (self.entries.first(), other.entries.first()) {
            (_, None) => return self.clone(),
            (None, Some((_, c))) => c.field().one(),
            (Some((_, c)), _) => c.field().one(),
        };
        self.add_scaled(other, &one)
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, c)| (*i, c.neg())).collect(),
        }
    }

    fn field(&self) -> Option<FieldSpec> {
        self.entries.first().map(|(_, c)| c.field())
    }
}

/// A sparse matrix given by rows over one field.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseMatrix {
    field: FieldSpec,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(field: FieldSpec, ncols: usize, rows: Vec<SparseVec>) -> Result<Self> {
        for row in &rows {
            for (i, c) in row.iter() {
                if c.field() != field {
                    return Err(Error::MixedFields(field.to_string(), c.field().to_string()));
                }
                if i >= ncols {
                    return Err(Error::DimensionMismatch(format!(
                        "row entry at column {i} but matrix has {ncols} columns"
                    )));
                }
            }
        }
        Ok(SparseMatrix { field, ncols, rows })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rref().0.rows.len()
    }

    /// Unique reduced row-echelon form together with the strictly increasing
    /// pivot column list. Pivot choice is the leftmost nonzero column, first
    /// nonzero row, so the result is deterministic.
    pub fn rref(&self) -> (SparseMatrix, Vec<usize>) {
        let mut work: Vec<SparseVec> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut reduced: Vec<SparseVec> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        loop {
            // leftmost leading column among remaining rows; first row wins ties
            let mut best: Option<(usize, usize)> = None; // (col, row index)
            for (r, row) in work.iter().enumerate() {
                if let Some((c, _)) = row.leading() {
                    if best.is_none_or(|(bc, _)| c < bc) {
                        best = Some((c, r));
                    }
                }
            }
            let Some((col, r)) = best else { break };
            let mut pivot_row = work.swap_remove(r);
            let lead = pivot_row.leading().unwrap().1.clone();
            pivot_row = pivot_row.scale(&lead.inverse().expect("leading coefficient is nonzero"));
            for row in work.iter_mut() {
                if let Some(c) = row.get(col).cloned() {
                    *row = row.add_scaled(&pivot_row, &c.neg());
                }
            }
            for row in reduced.iter_mut() {
                if let Some(c) = row.get(col).cloned() {
                    *row = row.add_scaled(&pivot_row, &c.neg());
                }
            }
            reduced.push(pivot_row);
            pivots.push(col);
            work.retain(|r| !r.is_zero());
        }
        // sort rows by pivot column for the canonical presentation
        let mut paired: Vec<(usize, SparseVec)> = pivots.into_iter().zip(reduced).collect();
        paired.sort_by_key(|(c, _)| *c);
        let (pivots, rows): (Vec<usize>, Vec<SparseVec>) = paired.into_iter().unzip();
        (
            SparseMatrix {
                field: self.field,
                ncols: self.ncols,
                rows,
            },
            pivots,
        )
    }
}

/// A linear map with explicit domain and codomain bases; column `j` is the
/// image of domain label `j`.
#[derive(Clone, PartialEq, Debug)]
pub struct LinearMap {
    field: FieldSpec,
    domain: Basis,
    codomain: Basis,
    columns: Vec<SparseVec>,
}

impl LinearMap {
    pub fn new(
        field: FieldSpec,
        domain: Basis,
        codomain: Basis,
        columns: Vec<SparseVec>,
    ) -> Result<Self> {
        if columns.len() != domain.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for a domain of dimension {}",
                columns.len(),
                domain.len()
            )));
        }
        for col in &columns {
            if let Some(f) = col.field() {
                if f != field {
                    return Err(Error::MixedFields(field.to_string(), f.to_string()));
                }
            }
            if let Some(m) = col.max_index() {
                if m >= codomain.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "column entry at row {m} but codomain has dimension {}",
                        codomain.len()
                    )));
                }
            }
        }
        Ok(LinearMap {
            field,
            domain,
            codomain,
            columns,
        })
    }

    pub fn identity(field: FieldSpec, basis: Basis) -> Self {
        let columns = (0..basis.len())
            .map(|i| SparseVec::unit(i, field))
            .collect();
        LinearMap {
            field,
            domain: basis.clone(),
            codomain: basis,
            columns,
        }
    }

    pub fn zero(field: FieldSpec, domain: Basis, codomain: Basis) -> Self {
        let columns = vec![SparseVec::zero(); domain.len()];
        LinearMap {
            field,
            domain,
            codomain,
            columns,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn domain(&self) -> &Basis {
        &self.domain
    }

    pub fn codomain(&self) -> &Basis {
        &self.codomain
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::zero();
        for (i, c) in v.iter() {
            acc = acc.add_scaled(&self.columns[i], c);
        }
        acc
    }

    /// The matrix with rows indexed by the codomain (transpose of the column list).
    pub fn row_matrix(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.codomain.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.iter() {
                rows[i].push((j, c.clone()));
            }
        }
        SparseMatrix {
            field: self.field,
            ncols: self.domain.len(),
            rows: rows.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.row_matrix().rank()
    }
}

/// Composition `f . g` (apply `g` first). The codomain of `g` must equal the
/// domain of `f` as a labelled basis.
pub fn compose(f: &LinearMap, g: &LinearMap) -> Result<LinearMap> {
    if f.field != g.field {
        return Err(Error::MixedFields(f.field.to_string(), g.field.to_string()));
    }
    if f.domain != g.codomain {
        return Err(Error::BasisMismatch(
            "compose: codomain of the inner map differs from domain of the outer map".into(),
        ));
    }
    let columns = g.columns.iter().map(|col| f.apply(col)).collect();
    LinearMap::new(f.field, g.domain.clone(), f.codomain.clone(), columns)
}

/// A subspace of the span of an ambient basis, stored as canonical reduced
/// row-echelon spanning vectors.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace {
    field: FieldSpec,
    ambient: Basis,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient: Basis) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_spanning(
        field: FieldSpec,
        ambient: Basis,
        vectors: Vec<SparseVec>,
    ) -> Result<Self> {
        let mat = SparseMatrix::new(field, ambient.len(), vectors)?;
        let (rref, pivots) = mat.rref();
        Ok(Subspace {
            field,
            ambient,
            rows: rref.rows,
            pivots,
        })
    }

    /// Wraps rows that are already in canonical reduced echelon form.
    pub(crate) fn from_rref_rows(
        field: FieldSpec,
        ambient: Basis,
        rows: Vec<SparseVec>,
        pivots: Vec<usize>,
    ) -> Self {
        debug_assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        Subspace {
            field,
            ambient,
            rows,
            pivots,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient(&self) -> &Basis {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        matches!(self.coords_of(v), Ok(Some(_)))
    }

    /// Coordinates of `v` with respect to the echelon rows, if `v` lies in
    /// the subspace.
    pub fn coords_of(&self, v: &SparseVec) -> Result<Option<Vec<Scalar>>> {
        if let Some(m) = v.max_index() {
            if m >= self.ambient.len() {
                return Err(Error::DimensionMismatch(format!(
                    "vector entry at index {m} but ambient has dimension {}",
                    self.ambient.len()
                )));
            }
        }
        if let Some(f) = v.field() {
            if f != self.field {
                return Err(Error::MixedFields(self.field.to_string(), f.to_string()));
            }
        }
        let mut coords = vec![self.field.zero(); self.rows.len()];
        let mut rest = v.clone();
        for (r, (&pivot, row)) in self.pivots.iter().zip(&self.rows).enumerate() {
            if let Some(c) = rest.get(pivot).cloned() {
                coords[r] = c.clone();
                rest = rest.add_scaled(row, &c.neg());
            }
        }
        if rest.is_zero() {
            Ok(Some(coords))
        } else {
            Ok(None)
        }
    }
}

/// Kernel of a map as a canonical subspace of its domain span.
pub fn kernel_basis(map: &LinearMap) -> Subspace {
    let (rref, pivots) = map.row_matrix().rref();
    let n = map.domain.len();
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; n];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let mut vectors = Vec::new();
    for free in (0..n).filter(|j| !pivot_set[*j]) {
        let mut entries = vec![(free, map.field.one())];
        for (r, &p) in pivots.iter().enumerate() {
            if let Some(c) = rref.rows[r].get(free) {
                entries.push((p, c.neg()));
            }
        }
        vectors.push(SparseVec::from_entries(entries));
    }
    Subspace::from_spanning(map.field, map.domain.clone(), vectors)
        .expect("kernel vectors live in the domain span")
}

/// Column space of a map as a canonical subspace of its codomain span.
pub fn image_basis(map: &LinearMap) -> Subspace {
    Subspace::from_spanning(map.field, map.codomain.clone(), map.columns.clone())
        .expect("columns live in the codomain span")
}

/// Coordinates of `v` in the echelon rows of `s`, or `None` when `v` is
/// outside the subspace. Errors on dimension or field mismatch.
pub fn membership_coords(v: &SparseVec, s: &Subspace) -> Result<Option<Vec<Scalar>>> {
    s.coords_of(v)
}

/// Quotient of the ambient span by a subspace: the representatives are the
/// non-pivot ambient labels, and the projection sends each ambient label to
/// its normal form modulo the subspace, expressed in representative
/// coordinates. The projection restricted to representatives is the identity.
pub fn quotient_basis(ambient: &Basis, s: &Subspace) -> Result<(Vec<String>, LinearMap)> {
    if s.ambient() != ambient {
        return Err(Error::BasisMismatch(
            "quotient_basis: subspace ambient differs from the given basis".into(),
        ));
    }
    let n = ambient.len();
    let mut is_pivot = vec![false; n];
    for &p in &s.pivots {
        is_pivot[p] = true;
    }
    let reps: Vec<usize> = (0..n).filter(|j| !is_pivot[*j]).collect();
    let rep_labels: Vec<String> = reps.iter().map(|&j| ambient.label(j).to_string()).collect();
    let rep_pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let rep_basis = Basis::new(rep_labels.clone())?;
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        if let Some(&k) = rep_pos.get(&j) {
            columns.push(SparseVec::unit(k, s.field));
        } else {
            let r = s.pivots.iter().position(|&p| p == j).expect("pivot column");
            // row = e_j + tail  =>  e_j = -tail (mod s), tail supported on non-pivots
            let entries = s.rows[r]
                .iter()
                .filter(|(i, _)| *i != j)
                .map(|(i, c)| (rep_pos[&i], c.neg()))
                .collect();
            columns.push(SparseVec::from_entries(entries));
        }
    }
    let proj = LinearMap::new(s.field, ambient.clone(), rep_basis, columns)?;
    Ok((rep_labels, proj))
}

/// Solves `map(x) = target` for one exact solution (free coordinates set to
/// zero); `None` when the system is inconsistent.
pub fn solve(map: &LinearMap, target: &SparseVec) -> Option<Vec<Scalar>> {
    let n = map.domain.len();
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); map.codomain.len()];
    for (j, col) in map.columns.iter().enumerate() {
        for (i, c) in col.iter() {
            rows[i].push((j, c.clone()));
        }
    }
    for (i, c) in target.iter() {
        rows[i].push((n, c.clone()));
    }
    let mat = SparseMatrix {
        field: map.field,
        ncols: n + 1,
        rows: rows.into_iter().map(SparseVec::from_entries).collect(),
    };
    let (rref, pivots) = mat.rref();
    let mut x = vec![map.field.zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        if p == n {
            return None; // pivot in the augmented column
        }
        if let Some(c) = rref.rows[r].get(n) {
            x[p] = c.clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn vec_of(field: FieldSpec, dense: &[i64]) -> SparseVec {
        SparseVec::from_entries(
            dense
                .iter()
                .enumerate()
                .map(|(i, &n)| (i, field.from_i64(n)))
                .collect(),
        )
    }

    fn mat_of(field: FieldSpec, ncols: usize, rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::new(
            field,
            ncols,
            rows.iter().map(|r| vec_of(field, r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rref_duplicate_row() {
        let m = mat_of(q(), 2, &[&[1, 2], &[2, 4]]);
        let (r, pivots) = m.rref();
        assert_eq!(r.rows().len(), 1);
        assert_eq!(r.rows()[0], vec_of(q(), &[1, 2]));
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_identity() {
        let m = mat_of(q(), 3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let (r, pivots) = m.rref();
        assert_eq!(r, m);
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_mod_two() {
        let f2 = FieldSpec::prime(2).unwrap();
        let m = mat_of(f2, 2, &[&[1, 1], &[1, 0]]);
        let (r, pivots) = m.rref();
        assert_eq!(r.rows()[0], vec_of(f2, &[1, 0]));
        assert_eq!(r.rows()[1], vec_of(f2, &[0, 1]));
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn rref_rejects_mixed_fields() {
        let f2 = FieldSpec::prime(2).unwrap();
        let rows = vec![SparseVec::from_entries(vec![(0, q().one()), (1, f2.one())])];
        assert!(SparseMatrix::new(q(), 2, rows).is_err());
    }

    fn map_of(field: FieldSpec, dom: &[&str], cod: &[&str], cols: &[&[i64]]) -> LinearMap {
        LinearMap::new(
            field,
            Basis::new(dom.iter().copied()).unwrap(),
            Basis::new(cod.iter().copied()).unwrap(),
            cols.iter().map(|c| vec_of(field, c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let zero = LinearMap::zero(
            q(),
            Basis::new(["a", "b"]).unwrap(),
            Basis::new(["u"]).unwrap(),
        );
        assert_eq!(kernel_basis(&zero).dim(), 2);
        let id = LinearMap::identity(q(), Basis::new(["a", "b"]).unwrap());
        assert_eq!(kernel_basis(&id).dim(), 0);
    }

    #[test]
    fn kernel_of_sum_map() {
        // map [[1,1]] : Q^2 -> Q, kernel = span{(1,-1)}
        let m = map_of(q(), &["a", "b"], &["u"], &[&[1], &[1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 1);
        assert_eq!(k.rows()[0], vec_of(q(), &[1, -1]));
    }

    #[test]
    fn image_examples() {
        let id = LinearMap::identity(q(), Basis::new(["a", "b"]).unwrap());
        assert_eq!(image_basis(&id).dim(), 2);
        let zero = LinearMap::zero(
            q(),
            Basis::new(["a"]).unwrap(),
            Basis::new(["u", "v"]).unwrap(),
        );
        assert_eq!(image_basis(&zero).dim(), 0);
        // single column (1,1)
        let m = map_of(q(), &["a"], &["u", "v"], &[&[1, 1]]);
        let im = image_basis(&m);
        assert_eq!(im.dim(), 1);
        assert_eq!(im.rows()[0], vec_of(q(), &[1, 1]));
    }

    #[test]
    fn membership_examples() {
        let amb = Basis::new(["u", "v"]).unwrap();
        let s = Subspace::from_spanning(q(), amb.clone(), vec![vec_of(q(), &[1, 1])]).unwrap();
        assert_eq!(
            membership_coords(&vec_of(q(), &[1, 1]), &s).unwrap(),
            Some(vec![q().one()])
        );
        assert_eq!(membership_coords(&vec_of(q(), &[1, 0]), &s).unwrap(), None);
        let s2 = Subspace::from_spanning(q(), amb, vec![vec_of(q(), &[1, -1])]).unwrap();
        assert_eq!(
            membership_coords(&vec_of(q(), &[2, -2]), &s2).unwrap(),
            Some(vec![q().from_i64(2)])
        );
        // dimension mismatch errors out
        let bad = SparseVec::from_entries(vec![(5, q().one())]);
        assert!(membership_coords(&bad, &s2).is_err());
    }

    #[test]
    fn quotient_examples() {
        let amb = Basis::new(["u", "v"]).unwrap();
        // by the zero subspace: both labels survive, identity projection
        let z = Subspace::zero(q(), amb.clone());
        let (reps, proj) = quotient_basis(&amb, &z).unwrap();
        assert_eq!(reps, vec!["u".to_string(), "v".to_string()]);
        assert_eq!(proj.apply(&vec_of(q(), &[3, 4])), vec_of(q(), &[3, 4]));
        // by the full space: nothing survives
        let full = Subspace::from_spanning(
            q(),
            amb.clone(),
            vec![vec_of(q(), &[1, 0]), vec_of(q(), &[0, 1])],
        )
        .unwrap();
        let (reps, proj) = quotient_basis(&amb, &full).unwrap();
        assert!(reps.is_empty());
        assert!(proj.apply(&vec_of(q(), &[1, 2])).is_zero());
        // Q^2 / span{(1,-1)}: one representative, second label is the class of the first
        let s = Subspace::from_spanning(q(), amb.clone(), vec![vec_of(q(), &[1, -1])]).unwrap();
        let (reps, proj) = quotient_basis(&amb, &s).unwrap();
        assert_eq!(reps, vec!["v".to_string()]);
        assert_eq!(
            proj.apply(&SparseVec::unit(0, q())),
            SparseVec::unit(0, q())
        );
        assert_eq!(
            proj.apply(&SparseVec::unit(1, q())),
            SparseVec::unit(0, q())
        );
        // projection . inclusion of representatives = identity
        assert_eq!(proj.column(1), &SparseVec::unit(0, q()));
    }

    #[test]
    fn compose_examples() {
        let f = map_of(q(), &["a"], &["u"], &[&[2]]);
        let g = map_of(q(), &["s"], &["a"], &[&[3]]);
        let fg = compose(&f, &g).unwrap();
        assert_eq!(fg.column(0), &vec_of(q(), &[6]));
        let id = LinearMap::identity(q(), Basis::new(["a"]).unwrap());
        assert_eq!(compose(&f, &id).unwrap(), f);
        let zero = LinearMap::zero(q(), Basis::new(["u"]).unwrap(), Basis::new(["w"]).unwrap());
        let zf = compose(&zero, &f).unwrap();
        assert!(zf.column(0).is_zero());
        // basis mismatch
        let h = map_of(q(), &["x"], &["y"], &[&[1]]);
        assert!(compose(&f, &h).is_err());
    }

    #[test]
    fn solve_finds_column_combinations() {
        let m = map_of(q(), &["a", "b"], &["u", "v"], &[&[1, 0], &[1, 1]]);
        let x = solve(&m, &vec_of(q(), &[3, 2])).unwrap();
        // 3*(1,0) + ... columns are (1,0),(1,1): a + b = 3, b = 2 -> a = 1
        assert_eq!(x, vec![q().from_i64(1), q().from_i64(2)]);
        assert!(solve(
            &map_of(q(), &["a"], &["u", "v"], &[&[1, 0]]),
            &vec_of(q(), &[0, 1])
        )
        .is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rref_is_idempotent(rows in proptest::collection::vec(
            proptest::collection::vec(-4i64..5, 1..8), 1..8)) {
            let ncols = rows.iter().map(|r| r.len()).max().unwrap();
            let rows: Vec<SparseVec> = rows.iter().map(|r| {
                SparseVec::from_entries(
                    r.iter().enumerate().map(|(i, &n)| (i, q().from_i64(n))).collect())
            }).collect();
            let m = SparseMatrix::new(q(), ncols, rows).unwrap();
            let (r1, p1) = m.rref();
            let (r2, p2) = r1.rref();
            prop_assert_eq!(r1, r2);
            prop_assert_eq!(p1, p2);
        }

        #[test]
        fn rank_nullity(cols in proptest::collection::vec(
            proptest::collection::vec(-3i64..4, 5), 1..40)) {
            let dom_labels: Vec<String> = (0..cols.len()).map(|i| format!("d{i}")).collect();
            let cod_labels: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
            let map = LinearMap::new(
                q(),
                Basis::new(dom_labels).unwrap(),
                Basis::new(cod_labels).unwrap(),
                cols.iter().map(|c| {
                    SparseVec::from_entries(
                        c.iter().enumerate().map(|(i, &n)| (i, q().from_i64(n))).collect())
                }).collect(),
            ).unwrap();
            prop_assert_eq!(map.rank() + kernel_basis(&map).dim(), map.domain().len());
        }

        #[test]
        fn membership_iff_solvable(cols in proptest::collection::vec(
            proptest::collection::vec(-3i64..4, 4), 1..6),
            target in proptest::collection::vec(-3i64..4, 4)) {
            let dom_labels: Vec<String> = (0..cols.len()).map(|i| format!("d{i}")).collect();
            let map = LinearMap::new(
                q(),
                Basis::new(dom_labels).unwrap(),
                Basis::new(["c0", "c1", "c2", "c3"]).unwrap(),
                cols.iter().map(|c| {
                    SparseVec::from_entries(
                        c.iter().enumerate().map(|(i, &n)| (i, q().from_i64(n))).collect())
                }).collect(),
            ).unwrap();
            let v = SparseVec::from_entries(
                target.iter().enumerate().map(|(i, &n)| (i, q().from_i64(n))).collect());
            let im = image_basis(&map);
            let via_membership = membership_coords(&v, &im).unwrap().is_some();
            let via_solve = solve(&map, &v).is_some();
            prop_assert_eq!(via_membership, via_solve);
        }
    }
}
