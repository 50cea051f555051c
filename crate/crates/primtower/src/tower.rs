//! The adjunction tower over the primitives functor, truncated at degree D.
//!
//! Level-one objects are vector spaces `V0` equipped with a structure map
//! `mu0` from the primitives of the tensor bialgebra on `V0` back to `V0`.
//! The module checks the algebra laws for such objects, builds the quotient
//! bialgebra presented by the coequalizer ideal `(z - b(z))`, verifies that
//! the coproduct descends, computes primitives of the quotient, and decides
//! whether the level-one unit is an isomorphism onto them. Every statement
//! is made on the degree window `<= D` and reported as such.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{image_basis, kernel_basis, Basis, LinearMap, SparseVec, Subspace};
use crate::scalar::{FieldSpec, Scalar};
use crate::tensor::{words_up_to, Alphabet, NCPoly, PrimitiveSpace, Word};
use std::sync::Arc;

/// Marker for the braiding used throughout: the canonical flip.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct CanonicalFlip;

/// A level-one object: `V0` together with `mu0` given on the canonical
/// echelon primitive basis of each weight `1..=cap`.
#[derive(Clone)]
pub struct B1Object {
    field: FieldSpec,
    names: Vec<String>,
    cap: u32,
    alphabet: Arc<Alphabet>,
    prim: Arc<PrimitiveSpace>,
    /// `mu0[n-1][i]` is the value on the i-th weight-n echelon primitive,
    /// as a vector over the letters of `V0`.
    mu0: Vec<Vec<SparseVec>>,
}

impl B1Object {
    /// Raw constructor taking the full block family, including weight 1.
    pub fn from_blocks(
        field: FieldSpec,
        names: Vec<String>,
        cap: u32,
        mu0: Vec<Vec<SparseVec>>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(field, names.iter().map(|n| (n.clone(), 1u32)), cap)?;
        let prim = Arc::new(PrimitiveSpace::compute(&alphabet, cap)?);
        Self::assemble(field, names, cap, alphabet, prim, mu0)
    }

    /// Loader-facing constructor: the weight-1 block is the identity (the
    /// unit law determines it) and entries give values on weights `2..=cap`;
    /// omitted entries are zero.
    pub fn from_entries<I>(
        field: FieldSpec,
        names: Vec<String>,
        cap: u32,
        entries: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, usize, SparseVec)>,
    {
        let alphabet = Alphabet::new(field, names.iter().map(|n| (n.clone(), 1u32)), cap)?;
        let prim = Arc::new(PrimitiveSpace::compute(&alphabet, cap)?);
        let mut mu0: Vec<Vec<SparseVec>> = (1..=cap)
            .map(|n| vec![SparseVec::zero(); prim.dim(n)])
            .collect();
        for (i, slot) in mu0[0].iter_mut().enumerate() {
            *slot = SparseVec::unit(i, field);
        }
        for (n, i, v) in entries {
            if n < 2 || n > cap {
                return Err(Error::InvalidInput(format!(
                    "structure-map entry at weight {n}: entries are given on weights 2..={cap}"
                )));
            }
            if i >= prim.dim(n) {
                return Err(Error::InvalidInput(format!(
                    "basis index {i} out of range at weight {n} (dimension {})",
                    prim.dim(n)
                )));
            }
            mu0[(n - 1) as usize][i] = v;
        }
        Self::assemble(field, names, cap, alphabet, prim, mu0)
    }

    fn assemble(
        field: FieldSpec,
        names: Vec<String>,
        cap: u32,
        alphabet: Arc<Alphabet>,
        prim: Arc<PrimitiveSpace>,
        mu0: Vec<Vec<SparseVec>>,
    ) -> Result<Self> {
        if mu0.len() != cap as usize {
            return Err(Error::DimensionMismatch(format!(
                "{} structure-map blocks for cap {cap}",
                mu0.len()
            )));
        }
        for (n0, block) in mu0.iter().enumerate() {
            let n = n0 as u32 + 1;
            if block.len() != prim.dim(n) {
                return Err(Error::DimensionMismatch(format!(
                    "weight-{n} block has {} columns but the primitive space has dimension {}",
                    block.len(),
                    prim.dim(n)
                )));
            }
            for v in block {
                if let Some(m) = v.max_index() {
                    if m >= names.len() {
                        return Err(Error::DimensionMismatch(format!(
                            "structure-map value touches coordinate {m} but dim is {}",
                            names.len()
                        )));
                    }
                }
                for (_, c) in v.iter() {
                    if c.field() != field {
                        return Err(Error::MixedFields(field.to_string(), c.field().to_string()));
                    }
                }
            }
        }
        Ok(B1Object {
            field,
            names,
            cap,
            alphabet,
            prim,
            mu0,
        })
    }

    /// Copy with a single value replaced (used by corruption injectors).
    pub fn with_mu0_value(&self, weight: u32, idx: usize, value: SparseVec) -> B1Object {
        let mut mu0 = self.mu0.clone();
        mu0[(weight - 1) as usize][idx] = value;
        B1Object {
            mu0,
            ..self.clone()
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn primitive_space(&self) -> &PrimitiveSpace {
        &self.prim
    }

    pub fn v0_basis(&self) -> Basis {
        self.alphabet.letter_basis()
    }

    pub fn mu0_value(&self, weight: u32, idx: usize) -> &SparseVec {
        &self.mu0[(weight - 1) as usize][idx]
    }

    pub fn mu0_block(&self, weight: u32) -> &[SparseVec] {
        &self.mu0[(weight - 1) as usize]
    }

    /// `mu0` applied to an arbitrary primitive polynomial, converting to the
    /// echelon coordinates first. Errors when the argument is not primitive.
    pub fn apply_mu0(&self, poly: &NCPoly) -> Result<SparseVec> {
        let coords = self.prim.coords(poly)?;
        let mut acc = SparseVec::zero();
        for (global, c) in coords.iter() {
            let (n, i) = self.locate(global);
            acc = acc.add_scaled(&self.mu0[(n - 1) as usize][i], c);
        }
        Ok(acc)
    }

    fn locate(&self, global: usize) -> (u32, usize) {
        let mut offset = 0;
        for n in 1..=self.cap {
            let d = self.prim.dim(n);
            if global < offset + d {
                return (n, global - offset);
            }
            offset += d;
        }
        unreachable!("index beyond the concatenated primitive basis")
    }

    /// The vector `v` as a weight-one polynomial.
    pub fn vector_poly(&self, v: &SparseVec) -> NCPoly {
        NCPoly::from_terms(
            self.alphabet.clone(),
            v.iter()
                .map(|(i, c)| (Word::single(&self.alphabet, i), c.clone())),
        )
        .expect("letters are within the cap")
    }

    /// Unit of the base adjunction: each letter as a weight-one primitive.
    pub fn eta0(&self) -> LinearMap {
        let cod = self.prim.concatenated_basis();
        let off = self.prim.block_offset(1);
        let columns = (0..self.dim())
            .map(|i| SparseVec::unit(off + i, self.field))
            .collect();
        LinearMap::new(self.field, self.v0_basis(), cod, columns)
            .expect("weight-one primitives are the letters")
    }

    /// The restriction of `mu0` to the higher primitives `EV0` (weights
    /// `2..=cap`), with the canonical flip recorded as the braiding.
    pub fn bracket_map(&self) -> BracketMapB {
        let mut labels = Vec::new();
        let mut columns = Vec::new();
        for n in 2..=self.cap {
            for i in 0..self.prim.dim(n) {
                labels.push(format!("p{n}.{i}"));
                columns.push(self.mu0[(n - 1) as usize][i].clone());
            }
        }
        let domain = Basis::new(labels).expect("distinct primitive labels");
        BracketMapB {
            b: LinearMap::new(self.field, domain, self.v0_basis(), columns)
                .expect("bracket values live in V0"),
            braiding: CanonicalFlip,
        }
    }

    /// Generators of the coequalizer ideal: `z - b(z)` for every echelon
    /// primitive `z` of weight `2..=cap`. The weight-one primitives
    /// contribute nothing because of the unit law.
    pub fn s_generators(&self) -> Vec<NCPoly> {
        let mut out = Vec::new();
        for n in 2..=self.cap {
            for i in 0..self.prim.dim(n) {
                let z = self.prim.poly(n, i);
                let b = self.vector_poly(&self.mu0[(n - 1) as usize][i]);
                out.push(z.sub(&b).expect("same alphabet"));
            }
        }
        out
    }
}

/// `mu0` restricted to the primitives of homogeneous weight above one.
pub struct BracketMapB {
    pub b: LinearMap,
    pub braiding: CanonicalFlip,
}

/// Model of the tensor bialgebra on the primitives of `T(V0)`: a weighted
/// alphabet with one generator per echelon primitive, plus the evaluation
/// back into `T(V0)`.
pub struct GeneratorModel {
    alphabet: Arc<Alphabet>,
    gen_polys: Vec<NCPoly>,
    gen_weights: Vec<u32>,
}

impl GeneratorModel {
    pub fn build(obj: &B1Object) -> Result<Self> {
        let mut letters = Vec::new();
        let mut gen_polys = Vec::new();
        let mut gen_weights = Vec::new();
        for n in 1..=obj.cap() {
            for i in 0..obj.prim.dim(n) {
                letters.push((format!("p{n}_{i}"), n));
                gen_polys.push(obj.prim.poly(n, i));
                gen_weights.push(n);
            }
        }
        let alphabet = Alphabet::new(obj.field(), letters, obj.cap())?;
        Ok(GeneratorModel {
            alphabet,
            gen_polys,
            gen_weights,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn generator_count(&self) -> usize {
        self.gen_polys.len()
    }

    pub fn generator_poly(&self, i: usize) -> &NCPoly {
        &self.gen_polys[i]
    }

    pub fn generator_weight(&self, i: usize) -> u32 {
        self.gen_weights[i]
    }

    /// Evaluation: the algebra map sending each generator to the primitive
    /// it denotes. Weight preserving, so it never truncates within the cap.
    pub fn evaluate(&self, poly: &NCPoly) -> Result<NCPoly> {
        if !poly.alphabet().same_content(&self.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let base = self.gen_polys[0].alphabet().clone();
        let mut out = NCPoly::zero(base.clone());
        for (w, c) in poly.terms() {
            let mut prod = NCPoly::one(base.clone());
            for &g in w.letters() {
                prod = prod.concat_mul(&self.gen_polys[g as usize])?;
            }
            debug_assert!(!prod.truncated());
            out = out.add(&prod.scale(c))?;
        }
        Ok(out)
    }

    /// The structure map as a letter map: generator `(n, i)` goes to the
    /// vector `mu0(n, i)` in the letter span of `V0`.
    pub fn mu0_letter_map(&self, obj: &B1Object) -> LinearMap {
        let mut columns = Vec::with_capacity(self.generator_count());
        let mut k = 0;
        for n in 1..=obj.cap() {
            for i in 0..obj.prim.dim(n) {
                debug_assert_eq!(self.gen_weights[k], n);
                columns.push(obj.mu0_value(n, i).clone());
                k += 1;
            }
        }
        LinearMap::new(
            obj.field(),
            self.alphabet.letter_basis(),
            obj.v0_basis(),
            columns,
        )
        .expect("structure values live in V0")
    }
}

/// Evaluation of a polynomial over the generator alphabet into `T(V0)`.
pub fn epsilon0_on_t(model: &GeneratorModel, poly: &NCPoly) -> Result<NCPoly> {
    model.evaluate(poly)
}

/// One checked statement with an optional witness.
#[derive(Clone, Debug)]
pub struct CheckItem {
    pub label: String,
    pub pass: bool,
    pub detail: String,
    pub witness: Option<String>,
}

impl CheckItem {
    fn pass(label: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckItem {
            label: label.into(),
            pass: true,
            detail: detail.into(),
            witness: None,
        }
    }

    fn fail(label: impl Into<String>, detail: impl Into<String>, witness: String) -> Self {
        CheckItem {
            label: label.into(),
            pass: false,
            detail: detail.into(),
            witness: Some(witness),
        }
    }
}

/// Outcome of a multi-part verification step.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub items: Vec<CheckItem>,
}

impl StepReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.pass)
    }
}

/// Checks the algebra laws of a level-one object: the unit law on weight
/// one, and the action law `mu0 . P(T mu0) = mu0 . P(eval)` on an echelon
/// spanning set of the primitives of the generator bialgebra, weight by
/// weight up to the cap.
pub fn check_b1_axioms(obj: &B1Object) -> Result<StepReport> {
    if obj.cap() < 2 {
        return Err(Error::CapTooSmall {
            cap: obj.cap(),
            reason: "the action law needs weight at least 2".into(),
        });
    }
    let mut items = Vec::new();
    // unit law: mu0 restricted to weight one is the identity on letters
    let mut unit_witness = None;
    for i in 0..obj.dim() {
        let got = obj.mu0_value(1, i);
        if got != &SparseVec::unit(i, obj.field()) {
            let img = obj.vector_poly(got);
            unit_witness = Some(format!("mu0({}) = {}", obj.names()[i], img.text()));
            break;
        }
    }
    items.push(match unit_witness {
        None => CheckItem::pass("unit", "mu0 . eta0 = id on V0"),
        Some(w) => CheckItem::fail("unit", "mu0 . eta0 differs from the identity", w),
    });

    let model = GeneratorModel::build(obj)?;
    let gen_prims = PrimitiveSpace::compute(model.alphabet(), obj.cap())?;
    let letter_map = model.mu0_letter_map(obj);
    for n in 1..=obj.cap() {
        let mut weight_witness = None;
        for i in 0..gen_prims.dim(n) {
            let zeta = gen_prims.poly(n, i);
            let lhs_poly = zeta.apply_letter_map(&letter_map, obj.alphabet())?;
            let lhs = obj.apply_mu0(&lhs_poly).map_err(|e| {
                Error::Internal(format!("image of a primitive is not primitive: {e}"))
            })?;
            let rhs_poly = model.evaluate(&zeta)?;
            let rhs = obj.apply_mu0(&rhs_poly).map_err(|e| {
                Error::Internal(format!("evaluation of a primitive is not primitive: {e}"))
            })?;
            if lhs != rhs {
                let defect = obj
                    .vector_poly(&lhs)
                    .sub(&obj.vector_poly(&rhs))
                    .expect("same alphabet");
                weight_witness = Some(format!(
                    "on {}: mu0(T mu0) - mu0(eval) = {}",
                    zeta.text(),
                    defect.text()
                ));
                break;
            }
        }
        items.push(match weight_witness {
            None => CheckItem::pass(
                format!("associativity.weight{n}"),
                format!(
                    "action law holds on {} spanning primitives",
                    gen_prims.dim(n)
                ),
            ),
            Some(w) => CheckItem::fail(format!("associativity.weight{n}"), "action law fails", w),
        });
    }
    Ok(StepReport { items })
}

// ---------------------------------------------------------------------------
// Filtered ideal elimination
// ---------------------------------------------------------------------------

type Row = Vec<(u32, Scalar)>;

/// Echelon state over a fixed descending word order. Column 0 is the
/// highest word, so leading entries are the highest words of rows and the
/// echelon is adapted to the weight filtration.
struct FilteredElim {
    weights: Vec<u32>,
    pivot_rows: HashMap<u32, usize>,
    rows: Vec<Row>,
}

impl FilteredElim {
    fn new(weights: Vec<u32>) -> Self {
        FilteredElim {
            weights,
            pivot_rows: HashMap::new(),
            rows: Vec::new(),
        }
    }

    fn axpy(dst: &Row, src: &Row, c: &Scalar) -> Row {
        let mut out = Vec::with_capacity(dst.len() + src.len());
        let (mut a, mut b) = (dst.iter().peekable(), src.iter().peekable());
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
        out
    }

    /// Forward-reduces a row against the current echelon and inserts it if
    /// anything survives.
    fn insert(&mut self, mut row: Row) {
        loop {
            let Some(&(col, ref lead)) = row.first() else {
                return;
            };
            match self.pivot_rows.get(&col) {
                Some(&r) => {
                    let c = lead.neg();
                    row = Self::axpy(&row, &self.rows[r], &c);
                }
                None => {
                    let inv = lead.inverse().expect("leading coefficient is nonzero");
                    for (_, c) in row.iter_mut() {
                        *c = c.mul(&inv);
                    }
                    self.pivot_rows.insert(col, self.rows.len());
                    self.rows.push(row);
                    return;
                }
            }
        }
    }

    /// Canonical fully reduced rows whose pivot weight is at most `d`,
    /// sorted by pivot column. Their tails only touch non-pivot words of
    /// weight at most `d`, so they form the canonical echelon basis of the
    /// degree-`d` filtration piece of the row space.
    fn canonical_rows_up_to(&self, d: u32) -> Vec<Row> {
        let mut picked: Vec<Row> = Vec::new();
        let mut cols: Vec<u32> = self
            .pivot_rows
            .keys()
            .copied()
            .filter(|&c| self.weights[c as usize] <= d)
            .collect();
        // back-substitute lowest words first so one pass fully reduces
        cols.sort_unstable_by(|a, b| b.cmp(a));
        let mut reduced: HashMap<u32, Row> = HashMap::new();
        for col in cols.iter().copied() {
            let mut row = self.rows[self.pivot_rows[&col]].clone();
            let mut k = 1;
            while k < row.len() {
                let (c, coef) = row[k].clone();
                if let Some(done) = reduced.get(&c) {
                    // entries before k are untouched: the merged-in tail only
                    // has columns past c
                    row = Self::axpy(&row, done, &coef.neg());
                } else {
                    k += 1;
                }
            }
            reduced.insert(col, row);
        }
        cols.sort_unstable();
        for col in cols {
            picked.push(reduced.remove(&col).unwrap());
        }
        picked
    }
}

/// Everything the quotient needs from one ideal computation.
pub(crate) struct IdealData {
    /// Words of weight <= D in descending order (the quotient ambient).
    pub words_desc: Vec<Word>,
    /// Canonical echelon rows of the ideal filtration piece, indexed into
    /// `words_desc`, pivots strictly increasing.
    pub rows: Vec<Row>,
}

impl IdealData {
    pub fn pivot_weights(&self) -> Vec<u32> {
        self.rows
            .iter()
            .map(|r| self.words_desc[r[0].0 as usize].weight())
            .collect()
    }

    /// Ideal dimension of the degree-`d` piece.
    pub fn dim_up_to(&self, d: u32) -> usize {
        self.pivot_weights().iter().filter(|&&w| w <= d).count()
    }
}

/// Spans the two-sided ideal generated by `gens` inside the degree window:
/// all products `u * g * v` with `deg u + topdeg g + deg v <= d + slack`,
/// eliminated in the filtration-adapted order, then intersected with the
/// degree-`d` piece.
pub(crate) fn ideal_rows(
    alphabet: &Arc<Alphabet>,
    gens: &[NCPoly],
    d: u32,
    slack: u32,
) -> Result<IdealData> {
    if slack < 1 {
        return Err(Error::InvalidInput("slack must be at least 1".into()));
    }
    let bound = d + slack;
    let ext = alphabet.with_cap(bound)?;
    // descending word order over the extended window
    let mut all_words = words_up_to(&ext, bound);
    all_words.reverse();
    let index: HashMap<Word, u32> = all_words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let weights: Vec<u32> = all_words.iter().map(|w| w.weight()).collect();
    let mut by_weight: Vec<Vec<Word>> = vec![Vec::new(); bound as usize + 1];
    for w in words_up_to(&ext, bound) {
        by_weight[w.weight() as usize].push(w);
    }
    let mut elim = FilteredElim::new(weights);
    for g in gens {
        let g = g.embed(&ext)?;
        if g.is_zero() {
            continue;
        }
        let top = g.max_weight();
        if top > bound {
            return Err(Error::WeightOutOfRange {
                weight: top,
                cap: bound,
            });
        }
        let room = bound - top;
        for wu in 0..=room {
            for u in &by_weight[wu as usize] {
                for wv in 0..=(room - wu) {
                    for v in &by_weight[wv as usize] {
                        let mut row: Row = g
                            .terms()
                            .map(|(t, c)| {
                                let word = u.concat(t).concat(v);
                                (index[&word], c.clone())
                            })
                            .collect();
                        row.sort_unstable_by_key(|(i, _)| *i);
                        elim.insert(row);
                    }
                }
            }
        }
    }
    let canonical = elim.canonical_rows_up_to(d);
    // reindex into the degree-<=d window
    let mut words_desc = words_up_to(alphabet, d);
    words_desc.reverse();
    let offset = all_words.len() - words_desc.len();
    let rows = canonical
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|(c, s)| ((c as usize - offset) as u32, s))
                .collect()
        })
        .collect();
    Ok(IdealData { words_desc, rows })
}

/// Per-filtration-degree canonical subspaces of the ideal generated by
/// `gens`, computed with the given slack. Entry `d` holds the canonical
/// echelon rows whose top word has weight exactly `d`, as a subspace of the
/// descending word span of weight `<= d`; the union of the entries up to
/// `d` spans the full degree-`d` filtration piece.
pub fn ideal_span(
    alphabet: &Arc<Alphabet>,
    gens: &[NCPoly],
    d: u32,
    slack: u32,
) -> Result<Vec<Subspace>> {
    let data = ideal_rows(alphabet, gens, d, slack)?;
    let field = alphabet.field();
    let mut out = Vec::with_capacity(d as usize + 1);
    for deg in 0..=d {
        let mut words = words_up_to(alphabet, deg);
        words.reverse();
        let ncols = words.len();
        let offset = data.words_desc.len() - ncols;
        let basis = Basis::new(words.iter().map(|w| w.text(alphabet)))?;
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for r in &data.rows {
            let pivot_word = &data.words_desc[r[0].0 as usize];
            if pivot_word.weight() == deg {
                let entries: Vec<(usize, Scalar)> = r
                    .iter()
                    .map(|(c, s)| (*c as usize - offset, s.clone()))
                    .collect();
                pivots.push(entries[0].0);
                rows.push(SparseVec::from_entries(entries));
            }
        }
        out.push(Subspace::from_rref_rows(field, basis, rows, pivots));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The quotient bialgebra
// ---------------------------------------------------------------------------

/// The filtered quotient of the tensor bialgebra by the coequalizer ideal,
/// with a normal-form basis per filtration degree.
pub struct QuotientBialgebra {
    field: FieldSpec,
    alphabet: Arc<Alphabet>,
    cap: u32,
    slack: u32,
    /// Normal-form words (non-pivot), ascending canonical order.
    normal_words: Vec<Word>,
    normal_pos: HashMap<Word, usize>,
    /// Pivot word -> its normal form (over normal indices).
    reduction: HashMap<Word, SparseVec>,
    /// Canonical echelon rows of the ideal as polynomials, with pivot weights.
    ideal_polys: Vec<(u32, NCPoly)>,
}

impl QuotientBialgebra {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn slack(&self) -> u32 {
        self.slack
    }

    pub fn normal_words(&self) -> &[Word] {
        &self.normal_words
    }

    pub fn ideal_rows(&self) -> &[(u32, NCPoly)] {
        &self.ideal_polys
    }

    /// Cumulative dimensions of the filtration pieces, degrees `0..=cap`.
    pub fn filtration_dims(&self) -> Vec<usize> {
        (0..=self.cap)
            .map(|d| self.normal_words.iter().filter(|w| w.weight() <= d).count())
            .collect()
    }

    pub fn normal_words_of_weight(&self, n: u32) -> Vec<usize> {
        self.normal_words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.weight() == n)
            .map(|(i, _)| i)
            .collect()
    }

    /// Class of a word in normal-form coordinates.
    pub fn project_word(&self, w: &Word) -> Result<SparseVec> {
        if w.weight() > self.cap {
            return Err(Error::WeightOutOfRange {
                weight: w.weight(),
                cap: self.cap,
            });
        }
        if let Some(red) = self.reduction.get(w) {
            Ok(red.clone())
        } else {
            let i = self
                .normal_pos
                .get(w)
                .ok_or_else(|| Error::Internal("word missing from the quotient window".into()))?;
            Ok(SparseVec::unit(*i, self.field))
        }
    }

    /// Class of a polynomial in normal-form coordinates.
    pub fn project(&self, poly: &NCPoly) -> Result<SparseVec> {
        let mut acc = SparseVec::zero();
        for (w, c) in poly.terms() {
            acc = acc.add_scaled(&self.project_word(w)?, c);
        }
        Ok(acc)
    }

    /// Representative polynomial of a normal-form coordinate vector.
    pub fn section(&self, coords: &SparseVec) -> NCPoly {
        NCPoly::from_terms(
            self.alphabet.clone(),
            coords
                .iter()
                .map(|(i, c)| (self.normal_words[i].clone(), c.clone())),
        )
        .expect("normal words are within the cap")
    }

    /// Product of two normal-form classes; errors past the cap.
    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> Result<SparseVec> {
        let mut acc = SparseVec::zero();
        for (i, ca) in a.iter() {
            for (j, cb) in b.iter() {
                let w = self.normal_words[i].concat(&self.normal_words[j]);
                if w.weight() > self.cap {
                    return Err(Error::WeightOutOfRange {
                        weight: w.weight(),
                        cap: self.cap,
                    });
                }
                acc = acc.add_scaled(&self.project_word(&w)?, &ca.mul(cb));
            }
        }
        Ok(acc)
    }

    pub fn unit_coords(&self) -> SparseVec {
        let i = self.normal_pos[&Word::empty()];
        SparseVec::unit(i, self.field)
    }

    /// Basis of the weight-`n` normal-form span, labelled by word texts.
    pub fn weight_basis(&self, n: u32) -> (Vec<usize>, Basis) {
        let ids = self.normal_words_of_weight(n);
        let basis = Basis::new(
            ids.iter()
                .map(|&i| self.normal_words[i].text(&self.alphabet)),
        )
        .expect("word texts are distinct");
        (ids, basis)
    }
}

/// Builds the level-one quotient of a level-one object: the tensor algebra
/// on `V0` modulo the ideal generated by `z - b(z)`. Dimensions must agree
/// between `slack` and `slack + 1`; otherwise the computation reports that
/// the slack is too small rather than return a possibly short ideal.
pub fn build_l1(obj: &B1Object, slack: u32) -> Result<QuotientBialgebra> {
    let gens = obj.s_generators();
    let d = obj.cap();
    let data = ideal_rows(obj.alphabet(), &gens, d, slack)?;
    let check = ideal_rows(obj.alphabet(), &gens, d, slack + 1)?;
    for deg in 0..=d {
        let (a, b) = (data.dim_up_to(deg), check.dim_up_to(deg));
        if a != b {
            return Err(Error::SlackNotStabilized {
                slack,
                detail: format!(
                    "degree-{deg} ideal dimension {a} at slack {slack} vs {b} at slack {}",
                    slack + 1
                ),
            });
        }
    }
    finish_quotient(obj, data, slack)
}

fn finish_quotient(obj: &B1Object, data: IdealData, slack: u32) -> Result<QuotientBialgebra> {
    let field = obj.field();
    let cap = obj.cap();
    let pivot_cols: std::collections::HashSet<u32> = data.rows.iter().map(|r| r[0].0).collect();
    let mut normal_words: Vec<Word> = data
        .words_desc
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivot_cols.contains(&(*i as u32)))
        .map(|(_, w)| w.clone())
        .collect();
    normal_words.sort();
    let normal_pos: HashMap<Word, usize> = normal_words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let mut reduction = HashMap::new();
    let mut ideal_polys = Vec::new();
    for r in &data.rows {
        let pivot_word = data.words_desc[r[0].0 as usize].clone();
        // row = pivot + tail over normal words; the class of the pivot is -tail
        let entries: Vec<(usize, Scalar)> = r[1..]
            .iter()
            .map(|(c, s)| {
                let w = &data.words_desc[*c as usize];
                (normal_pos[w], s.neg())
            })
            .collect();
        reduction.insert(pivot_word.clone(), SparseVec::from_entries(entries));
        let poly = NCPoly::from_terms(
            obj.alphabet().clone(),
            r.iter()
                .map(|(c, s)| (data.words_desc[*c as usize].clone(), s.clone())),
        )?;
        ideal_polys.push((pivot_word.weight(), poly));
    }
    let q = QuotientBialgebra {
        field,
        alphabet: obj.alphabet().clone(),
        cap,
        slack,
        normal_words,
        normal_pos,
        reduction,
        ideal_polys,
    };
    // the projection must kill every in-window multiple of every generator
    let gens = obj.s_generators();
    let mut by_weight: Vec<Vec<Word>> = vec![Vec::new(); cap as usize + 1];
    for w in words_up_to(obj.alphabet(), cap) {
        by_weight[w.weight() as usize].push(w);
    }
    for g in &gens {
        if g.is_zero() {
            continue;
        }
        let top = g.max_weight();
        for wu in 0..=(cap - top) {
            for u in &by_weight[wu as usize] {
                for wv in 0..=(cap - top - wu) {
                    for v in &by_weight[wv as usize] {
                        let mut acc = SparseVec::zero();
                        for (t, c) in g.terms() {
                            let w = u.concat(t).concat(v);
                            acc = acc.add_scaled(&q.project_word(&w)?, c);
                        }
                        if !acc.is_zero() {
                            return Err(Error::Internal(format!(
                                "quotient does not kill {} * ({}) * {}",
                                u.text(obj.alphabet()),
                                g.text(),
                                v.text(obj.alphabet())
                            )));
                        }
                    }
                }
            }
        }
    }
    // associativity and unit on normal forms within the window
    let unit = q.unit_coords();
    let positive: Vec<usize> = (0..q.normal_words.len())
        .filter(|&i| q.normal_words[i].weight() >= 1)
        .collect();
    for &i in &positive {
        let e = SparseVec::unit(i, field);
        if q.multiply(&unit, &e)? != e || q.multiply(&e, &unit)? != e {
            return Err(Error::Internal("quotient unit law failed".into()));
        }
        for &j in &positive {
            let wij = q.normal_words[i].weight() + q.normal_words[j].weight();
            if wij > cap {
                continue;
            }
            for &k in &positive {
                if wij + q.normal_words[k].weight() > cap {
                    continue;
                }
                let ej = SparseVec::unit(j, field);
                let ek = SparseVec::unit(k, field);
                let left = q.multiply(&q.multiply(&e, &ej)?, &ek)?;
                let right = q.multiply(&e, &q.multiply(&ej, &ek)?)?;
                if left != right {
                    return Err(Error::Internal(format!(
                        "quotient product not associative on ({}, {}, {})",
                        q.normal_words[i].text(&q.alphabet),
                        q.normal_words[j].text(&q.alphabet),
                        q.normal_words[k].text(&q.alphabet)
                    )));
                }
            }
        }
    }
    Ok(q)
}

/// Verifies that the coproduct descends to the quotient: on every canonical
/// ideal row `r`, the counit vanishes and `(pi (x) pi)(Delta r) = 0`, which
/// is exactly membership of `Delta r` in `(S) (x) T + T (x) (S)`.
pub fn quotient_coproduct_check(q: &QuotientBialgebra) -> StepReport {
    let mut items = Vec::new();
    let mut witness: Option<String> = None;
    let mut eps_witness: Option<String> = None;
    for (_, poly) in q.ideal_rows() {
        if !poly.counit_eval().is_zero() {
            eps_witness.get_or_insert_with(|| poly.text());
        }
        let delta = poly.coproduct();
        let mut acc: std::collections::BTreeMap<(usize, usize), Scalar> =
            std::collections::BTreeMap::new();
        let mut broke = false;
        for ((l, r), c) in delta.terms() {
            let (pl, pr) = match (q.project_word(l), q.project_word(r)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    broke = true;
                    break;
                }
            };
            for (i, a) in pl.iter() {
                for (j, b) in pr.iter() {
                    let entry = acc.entry((i, j)).or_insert_with(|| q.field().zero());
                    *entry = entry.add(&a.mul(b).mul(c));
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        if broke || !acc.is_empty() {
            witness.get_or_insert_with(|| {
                let ((i, j), _) = acc
                    .iter()
                    .next()
                    .map(|(k, v)| (*k, v.clone()))
                    .unwrap_or(((0, 0), q.field().zero()));
                format!(
                    "Delta({}) survives in the quotient square at {}(x){}",
                    poly.text(),
                    q.normal_words()[i].text(q.alphabet()),
                    q.normal_words()[j].text(q.alphabet())
                )
            });
        }
        if witness.is_some() {
            break;
        }
    }
    items.push(match &eps_witness {
        None => CheckItem::pass("counit-vanishes", "counit kills every ideal row"),
        Some(w) => CheckItem::fail(
            "counit-vanishes",
            "counit does not vanish on the ideal",
            w.clone(),
        ),
    });
    items.push(match witness {
        None => CheckItem::pass(
            "coproduct-descends",
            format!(
                "Delta maps all {} ideal rows into (S)(x)T + T(x)(S)",
                q.ideal_rows().len()
            ),
        ),
        Some(w) => CheckItem::fail("coproduct-descends", "coproduct does not descend", w),
    });
    StepReport { items }
}

/// Verifies the coequalizer identity on the quotient: the projection
/// composed with the two parallel maps agrees on an echelon spanning set of
/// the generator bialgebra, and equivalently the right-hand form
/// `P(pi) . eta0 . mu0 = P(pi)` holds on the primitives of `T(V0)`.
pub fn coequalizer_check(obj: &B1Object, q: &QuotientBialgebra) -> Result<StepReport> {
    let model = GeneratorModel::build(obj)?;
    let letter_map = model.mu0_letter_map(obj);
    let mut items = Vec::new();
    // left form: pi . T(mu0) = pi . eval on all generator words within the cap
    let mut left_witness = None;
    for w in words_up_to(model.alphabet(), obj.cap()) {
        let poly = NCPoly::monomial(model.alphabet().clone(), w.clone(), obj.field().one())?;
        let via_mu = poly.apply_letter_map(&letter_map, obj.alphabet())?;
        let via_eval = model.evaluate(&poly)?;
        if q.project(&via_mu)? != q.project(&via_eval)? {
            left_witness = Some(format!(
                "generator word {} separates pi.T(mu0) from pi.eval",
                w.text(model.alphabet())
            ));
            break;
        }
    }
    items.push(match left_witness {
        None => CheckItem::pass(
            "coequalizer.left",
            "pi . T(mu0) = pi . eval on the generator bialgebra",
        ),
        Some(w) => CheckItem::fail("coequalizer.left", "coequalizer identity fails", w),
    });
    // right form: P(pi) . eta0 . mu0 = P(pi) on the primitives of T(V0)
    let mut right_witness = None;
    'outer: for n in 1..=obj.cap() {
        for i in 0..obj.primitive_space().dim(n) {
            let z = obj.primitive_space().poly(n, i);
            let mu_z = obj.vector_poly(obj.mu0_value(n, i));
            if q.project(&mu_z)? != q.project(&z)? {
                right_witness = Some(format!("primitive {} separates the two sides", z.text()));
                break 'outer;
            }
        }
    }
    items.push(match right_witness {
        None => CheckItem::pass(
            "coequalizer.right",
            "P(pi) . eta0 . mu0 = P(pi) on primitives",
        ),
        Some(w) => CheckItem::fail("coequalizer.right", "right-hand form fails", w),
    });
    Ok(StepReport { items })
}

/// Kernel of the induced reduced coproduct on the degree-`n` normal forms.
/// Safe for `1 <= n <= cap - 1`.
pub fn quotient_primitives(q: &QuotientBialgebra, n: u32) -> Result<Subspace> {
    if n < 1 || n + 1 > q.cap() {
        return Err(Error::DegreeOutOfWindow {
            n,
            max: q.cap().saturating_sub(1),
        });
    }
    let (ids, basis) = q.weight_basis(n);
    let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut columns = Vec::with_capacity(ids.len());
    for &i in &ids {
        let w = &q.normal_words()[i];
        let poly = NCPoly::monomial(q.alphabet().clone(), w.clone(), q.field().one())?;
        let red = poly.reduced_coproduct();
        let mut col: Vec<(usize, Scalar)> = Vec::new();
        for ((l, r), c) in red.terms() {
            let (pl, pr) = (q.project_word(l)?, q.project_word(r)?);
            for (a, ca) in pl.iter() {
                for (b, cb) in pr.iter() {
                    let next = pair_index.len();
                    let row = *pair_index.entry((a, b)).or_insert(next);
                    col.push((row, ca.mul(cb).mul(c)));
                }
            }
        }
        columns.push(SparseVec::from_entries(col));
    }
    let pair_basis = Basis::new((0..pair_index.len()).map(|i| format!("t{i}")))?;
    let map = LinearMap::new(q.field(), basis, pair_basis, columns)?;
    Ok(kernel_basis(&map))
}

/// The level-one unit evaluated on this object, with the isomorphism
/// verdict on the window `degrees <= cap - 1`.
pub struct Eta1Result {
    /// The map from `V0` into the weight-one normal-form span.
    pub map: LinearMap,
    pub iso: bool,
    /// Quotient primitive dimensions per degree `1..=cap-1`.
    pub primitive_dims: Vec<(u32, usize)>,
    pub witness: Option<String>,
}

/// Computes the unit `V0 -> P(L1 V1)` (a letter goes to its class) and
/// decides whether it is an isomorphism onto the computed primitives:
/// injective, surjective onto the degree-one primitives, with no quotient
/// primitives in degrees `2..=cap-1`.
pub fn eta1(obj: &B1Object, q: &QuotientBialgebra) -> Result<Eta1Result> {
    let (ids, basis) = q.weight_basis(1);
    let reindex: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut columns = Vec::with_capacity(obj.dim());
    for i in 0..obj.dim() {
        let w = Word::single(obj.alphabet(), i);
        let class = q.project_word(&w)?;
        let entries: Vec<(usize, Scalar)> = class
            .iter()
            .map(|(j, c)| {
                let w = &q.normal_words()[j];
                debug_assert_eq!(w.weight(), 1, "class of a letter has pure weight one");
                (reindex[&j], c.clone())
            })
            .collect();
        columns.push(SparseVec::from_entries(entries));
    }
    let map = LinearMap::new(obj.field(), obj.v0_basis(), basis, columns)?;
    let mut witness = None;
    // injectivity
    let ker = kernel_basis(&map);
    if ker.dim() > 0 {
        let row = &ker.rows()[0];
        let poly = obj.vector_poly(row);
        witness = Some(format!("eta1 kills {}", poly.text()));
    }
    // degree-one primitives = image
    let mut primitive_dims = Vec::new();
    let p1 = quotient_primitives(q, 1)?;
    primitive_dims.push((1, p1.dim()));
    if witness.is_none() && p1 != image_basis(&map) {
        witness = Some(format!(
            "degree-1 quotient primitives have dimension {} but the unit image has rank {}",
            p1.dim(),
            map.rank()
        ));
    }
    // no primitives above degree one inside the window
    for n in 2..q.cap() {
        let pn = quotient_primitives(q, n)?;
        primitive_dims.push((n, pn.dim()));
        if pn.dim() > 0 && witness.is_none() {
            let excess = q.section(&expand_in_weight(q, n, &pn.rows()[0]));
            witness = Some(format!("excess degree-{n} primitive {}", excess.text()));
        }
    }
    Ok(Eta1Result {
        iso: witness.is_none(),
        map,
        primitive_dims,
        witness,
    })
}

/// Rewrites a vector over the weight-`n` normal basis into full
/// normal-form coordinates.
fn expand_in_weight(q: &QuotientBialgebra, n: u32, v: &SparseVec) -> SparseVec {
    let ids = q.normal_words_of_weight(n);
    SparseVec::from_entries(v.iter().map(|(k, c)| (ids[k], c.clone())).collect())
}

/// A certified level-two object: the quotient, the unit, and (when the
/// unit is an isomorphism) its inverse as the level-two structure map.
pub struct B2Certificate {
    pub object: B1Object,
    pub quotient: QuotientBialgebra,
    pub eta1: Eta1Result,
    /// `mu1 = eta1^{-1}` on the degree-one primitive coordinates; present
    /// exactly when the certificate holds.
    pub mu1: Option<LinearMap>,
}

impl B2Certificate {
    pub fn certified(&self) -> bool {
        self.mu1.is_some()
    }
}

/// Runs the level-one quotient and the unit computation; when the unit is
/// an isomorphism onto the computed primitives, stores its inverse.
pub fn check_b2(obj: &B1Object, slack: u32) -> Result<B2Certificate> {
    let quotient = build_l1(obj, slack)?;
    let eta = eta1(obj, &quotient)?;
    certify_b2(obj, quotient, eta)
}

/// Same as [`check_b2`] but reuses an already computed quotient and unit.
pub fn certify_b2(
    obj: &B1Object,
    quotient: QuotientBialgebra,
    eta: Eta1Result,
) -> Result<B2Certificate> {
    let mu1 = if eta.iso {
        let p1 = quotient_primitives(&quotient, 1)?;
        // coordinates of each eta1 column in the echelon rows of P(L1)
        let prim_basis = Basis::new((0..p1.dim()).map(|i| format!("prim1.{i}")))?;
        let mut eta_cols_in_p = Vec::with_capacity(obj.dim());
        for i in 0..obj.dim() {
            let coords = p1
                .coords_of(eta.map.column(i))?
                .ok_or_else(|| Error::Internal("unit image escaped the primitive space".into()))?;
            eta_cols_in_p.push(SparseVec::from_entries(
                coords.into_iter().enumerate().collect(),
            ));
        }
        let eta_in_p = LinearMap::new(
            obj.field(),
            obj.v0_basis(),
            prim_basis.clone(),
            eta_cols_in_p,
        )?;
        // invert: solve eta_in_p(x) = e_i for each primitive basis vector
        let mut inv_cols = Vec::with_capacity(p1.dim());
        for i in 0..p1.dim() {
            let target = SparseVec::unit(i, obj.field());
            let x = crate::linalg::solve(&eta_in_p, &target)
                .ok_or_else(|| Error::Internal("certified unit failed to invert".into()))?;
            inv_cols.push(SparseVec::from_entries(x.into_iter().enumerate().collect()));
        }
        let mu1 = LinearMap::new(obj.field(), prim_basis.clone(), obj.v0_basis(), inv_cols)?;
        // both composites must be identities
        let back = crate::linalg::compose(&mu1, &eta_in_p)?;
        let forth = crate::linalg::compose(&eta_in_p, &mu1)?;
        if back != LinearMap::identity(obj.field(), obj.v0_basis())
            || forth != LinearMap::identity(obj.field(), prim_basis)
        {
            return Err(Error::Internal(
                "mu1 is not a two-sided inverse of eta1".into(),
            ));
        }
        Some(mu1)
    } else {
        None
    };
    Ok(B2Certificate {
        object: obj.clone(),
        quotient,
        eta1: eta,
        mu1,
    })
}
