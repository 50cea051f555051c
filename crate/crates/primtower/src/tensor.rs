//! The degree-truncated tensor bialgebra on a weighted alphabet.
//!
//! Words are monomials, concatenation is the product, and the coproduct is
//! the unshuffle making every letter primitive. All arithmetic is capped at
//! a total weight `D`; any operation that drops terms beyond the cap flags
//! the result as truncated, and axiom checks only assert equality on
//! untruncated values.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Basis, LinearMap, SparseVec, Subspace};
use crate::scalar::{FieldSpec, Scalar};

/// A named generator with a positive weight. Unweighted alphabets use
/// weight 1 everywhere; higher weights let a single letter stand for a
/// homogeneous element of that degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Letter {
    pub name: String,
    pub weight: u32,
}

/// Ground field, ordered letters, and the global degree cap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    field: FieldSpec,
    letters: Vec<Letter>,
    cap: u32,
}

impl Alphabet {
    pub fn new<I, S>(field: FieldSpec, letters: I, cap: u32) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let letters: Vec<Letter> = letters
            .into_iter()
            .map(|(name, weight)| Letter {
                name: name.into(),
                weight,
            })
            .collect();
        if cap < 1 {
            return Err(Error::BadAlphabet("cap must be at least 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &letters {
            if l.weight < 1 {
                return Err(Error::BadAlphabet(format!(
                    "letter {:?} has weight 0",
                    l.name
                )));
            }
            if l.name.is_empty()
                || l.name == "1"
                || l.name.contains('.')
                || l.name.contains(char::is_whitespace)
            {
                return Err(Error::BadAlphabet(format!(
                    "letter name {:?} (names must be nonempty, not \"1\", without '.' or spaces)",
                    l.name
                )));
            }
            if !seen.insert(l.name.clone()) {
                return Err(Error::BadAlphabet(format!("duplicate letter {:?}", l.name)));
            }
        }
        Ok(Arc::new(Alphabet {
            field,
            letters,
            cap,
        }))
    }

    /// `k` weight-one letters named x, y, z, then x4, x5, ...
    pub fn unweighted(field: FieldSpec, k: usize, cap: u32) -> Result<Arc<Self>> {
        let names = standard_names(k);
        Alphabet::new(field, names.into_iter().map(|n| (n, 1)), cap)
    }

    /// Same letters, different cap.
    pub fn with_cap(self: &Arc<Self>, cap: u32) -> Result<Arc<Self>> {
        Alphabet::new(
            self.field,
            self.letters.iter().map(|l| (l.name.clone(), l.weight)),
            cap,
        )
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_weight(&self, i: usize) -> u32 {
        self.letters[i].weight
    }

    pub fn letter_name(&self, i: usize) -> &str {
        &self.letters[i].name
    }

    /// Basis of the letter span, labelled by letter names.
    pub fn letter_basis(&self) -> Basis {
        Basis::new(self.letters.iter().map(|l| l.name.clone())).expect("letter names are distinct")
    }

    /// In characteristic p with cap < p, p-th-power primitives are invisible.
    pub fn char_exceeds_cap(&self) -> bool {
        let p = self.field.characteristic();
        p > 0 && (self.cap as u64) < p
    }

    /// Structural equality; distinct `Arc`s with the same content interoperate.
    pub fn same_content(&self, other: &Alphabet) -> bool {
        self == other
    }
}

pub fn standard_names(k: usize) -> Vec<String> {
    let base = ["x", "y", "z"];
    (0..k)
        .map(|i| {
            if i < base.len() {
                base[i].to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect()
}

/// A monomial: a finite sequence of letter indices with its total weight.
/// The derived order is weight-first, then lexicographic on the indices,
/// which is the canonical word order everywhere in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Word {
    weight: u32,
    letters: Vec<u32>,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            weight: 0,
            letters: Vec::new(),
        }
    }

    pub fn from_letters(alphabet: &Alphabet, letters: Vec<u32>) -> Self {
        let weight = letters
            .iter()
            .map(|&i| alphabet.letter_weight(i as usize))
            .sum();
        Word { weight, letters }
    }

    pub fn single(alphabet: &Alphabet, i: usize) -> Self {
        Word {
            weight: alphabet.letter_weight(i),
            letters: vec![i as u32],
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            weight: self.weight + other.weight,
            letters,
        }
    }

    /// Subword at the bit positions set in `mask`, paired with the
    /// complementary subword.
    fn split(&self, alphabet: &Alphabet, mask: u64) -> (Word, Word) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (pos, &l) in self.letters.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                left.push(l);
            } else {
                right.push(l);
            }
        }
        (
            Word::from_letters(alphabet, left),
            Word::from_letters(alphabet, right),
        )
    }

    /// Dotted text form; the empty word prints as `1`.
    pub fn text(&self, alphabet: &Alphabet) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|&i| alphabet.letter_name(i as usize))
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A noncommutative polynomial within the cap: a sparse map from words to
/// nonzero scalars, plus a sticky flag recording whether truncation ever
/// dropped terms on the way to this value.
#[derive(Clone, Debug)]
pub struct NCPoly {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, Scalar>,
    truncated: bool,
}

impl PartialEq for NCPoly {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet.same_content(&other.alphabet) && self.terms == other.terms
    }
}
impl Eq for NCPoly {}

impl NCPoly {
    pub fn zero(alphabet: Arc<Alphabet>) -> Self {
        NCPoly {
            alphabet,
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn one(alphabet: Arc<Alphabet>) -> Self {
        let one = alphabet.field().one();
        NCPoly {
            alphabet,
            terms: BTreeMap::from([(Word::empty(), one)]),
            truncated: false,
        }
    }

    pub fn letter(alphabet: Arc<Alphabet>, i: usize) -> Self {
        let one = alphabet.field().one();
        let w = Word::single(&alphabet, i);
        NCPoly {
            alphabet,
            terms: BTreeMap::from([(w, one)]),
            truncated: false,
        }
    }

    pub fn monomial(alphabet: Arc<Alphabet>, word: Word, coef: Scalar) -> Result<Self> {
        if word.weight() > alphabet.cap() {
            return Err(Error::WeightOutOfRange {
                weight: word.weight(),
                cap: alphabet.cap(),
            });
        }
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(word, coef);
        }
        Ok(NCPoly {
            alphabet,
            terms,
            truncated: false,
        })
    }

    pub fn from_terms<I>(alphabet: Arc<Alphabet>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut map: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (w, c) in terms {
            if w.weight() > alphabet.cap() {
                return Err(Error::WeightOutOfRange {
                    weight: w.weight(),
                    cap: alphabet.cap(),
                });
            }
            let entry = map.entry(w).or_insert_with(|| alphabet.field().zero());
            *entry = entry.add(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(NCPoly {
            alphabet,
            terms: map,
            truncated: false,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn field(&self) -> FieldSpec {
        self.alphabet.field()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether truncation occurred anywhere in the history of this value.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| self.field().zero())
    }

    /// Coefficient of the empty word.
    pub fn counit_eval(&self) -> Scalar {
        self.coefficient(&Word::empty())
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |w| w.weight())
    }

    /// The weight-`n` homogeneous component.
    pub fn weight_component(&self, n: u32) -> NCPoly {
        NCPoly {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.weight() == n)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn occupied_weights(&self) -> Vec<u32> {
        let mut ws: Vec<u32> = self.terms.keys().map(|w| w.weight()).collect();
        ws.dedup();
        ws
    }

    fn check_alphabet(&self, other: &NCPoly) -> Result<()> {
        if self.alphabet.same_content(&other.alphabet) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    pub fn add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_alphabet(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let entry = terms
                .entry(w.clone())
                .or_insert_with(|| self.field().zero());
            *entry = entry.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(NCPoly {
            alphabet: self.alphabet.clone(),
            terms,
            truncated: self.truncated || other.truncated,
        })
    }

    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        if c.is_zero() {
            let mut z = NCPoly::zero(self.alphabet.clone());
            z.truncated = self.truncated;
            return z;
        }
        NCPoly {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), a.mul(c)))
                .collect(),
            truncated: self.truncated,
        }
    }

    /// Bilinear concatenation product, truncated at the cap. Dropped terms
    /// set the truncation flag on the result.
    pub fn concat_mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_alphabet(other)?;
        let cap = self.alphabet.cap();
        let mut terms: BTreeMap<Word, Scalar> = BTreeMap::new();
        let mut dropped = false;
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.weight() + v.weight() > cap {
                    dropped = true;
                    continue;
                }
                let w = u.concat(v);
                let c = a.mul(b);
                let entry = terms.entry(w).or_insert_with(|| self.field().zero());
                *entry = entry.add(&c);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(NCPoly {
            alphabet: self.alphabet.clone(),
            terms,
            truncated: self.truncated || other.truncated || dropped,
        })
    }

    pub fn pow(&self, e: u32) -> Result<NCPoly> {
        let mut acc = NCPoly::one(self.alphabet.clone());
        for _ in 0..e {
            acc = acc.concat_mul(self)?;
        }
        Ok(acc)
    }

    /// Unshuffle coproduct: each word splits over all subsets of its letter
    /// positions. Within the cap both sides of every pair stay within the
    /// cap, so the coproduct itself never truncates.
    pub fn coproduct(&self) -> Tensor2 {
        let mut out = Tensor2::zero(self.alphabet.clone());
        out.truncated = self.truncated;
        for (w, c) in &self.terms {
            debug_assert!(w.len() < 64);
            for mask in 0..(1u64 << w.len()) {
                let (l, r) = w.split(&self.alphabet, mask);
                out.accumulate(l, r, c.clone());
            }
        }
        out
    }

    /// Reduced coproduct: the coproduct minus `a (x) 1 + 1 (x) a`, restricted
    /// to pairs in which both sides have positive weight.
    pub fn reduced_coproduct(&self) -> Tensor2 {
        let mut full = self.coproduct();
        full.terms
            .retain(|(l, r), _| l.weight() >= 1 && r.weight() >= 1);
        full
    }

    /// Weight-one projection to the letter span: the coefficients of the
    /// single-letter words, i.e. the degree-one part of the grading by
    /// tensor degree.
    pub fn degree_one_projection(&self) -> SparseVec {
        SparseVec::from_entries(
            self.terms
                .iter()
                .filter(|(w, _)| w.len() == 1)
                .map(|(w, c)| (w.letters()[0] as usize, c.clone()))
                .collect(),
        )
    }

    /// Applies the bialgebra map induced by a linear map on letter spans:
    /// `f` tensors over every letter of every word. The domain labels of
    /// `f` must be this alphabet's letter names and the codomain labels the
    /// target's. Truncation at the target cap is flagged.
    pub fn apply_letter_map(&self, f: &LinearMap, target: &Arc<Alphabet>) -> Result<NCPoly> {
        if f.domain() != &self.alphabet.letter_basis() {
            return Err(Error::BasisMismatch(
                "letter map domain differs from the source letters".into(),
            ));
        }
        if f.codomain() != &target.letter_basis() {
            return Err(Error::BasisMismatch(
                "letter map codomain differs from the target letters".into(),
            ));
        }
        if f.field() != target.field() || self.field() != target.field() {
            return Err(Error::MixedFields(
                self.field().to_string(),
                target.field().to_string(),
            ));
        }
        let letter_images: Vec<NCPoly> = (0..self.alphabet.len())
            .map(|i| {
                NCPoly::from_terms(
                    target.clone(),
                    f.column(i)
                        .iter()
                        .map(|(j, c)| (Word::single(target, j), c.clone())),
                )
            })
            .collect::<Result<_>>()?;
        let mut out = NCPoly::zero(target.clone());
        out.truncated = self.truncated;
        for (w, c) in &self.terms {
            let mut prod = NCPoly::one(target.clone());
            for &l in w.letters() {
                prod = prod.concat_mul(&letter_images[l as usize])?;
            }
            out = out.add(&prod.scale(c))?;
        }
        Ok(out)
    }

    /// Re-embeds this polynomial into an alphabet with the same letters and
    /// a cap at least as large.
    pub fn embed(&self, target: &Arc<Alphabet>) -> Result<NCPoly> {
        if self.alphabet.letters() != target.letters() || self.field() != target.field() {
            return Err(Error::AlphabetMismatch);
        }
        if target.cap() < self.max_weight() {
            return Err(Error::WeightOutOfRange {
                weight: self.max_weight(),
                cap: target.cap(),
            });
        }
        Ok(NCPoly {
            alphabet: target.clone(),
            terms: self.terms.clone(),
            truncated: self.truncated,
        })
    }

    /// Canonical text form, e.g. `1*x.y + -1*y.x`; zero prints as `0`.
    pub fn text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("{}*{}", c, w.text(&self.alphabet)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// The vector of weight-`n` coefficients in the weight-`n` word span
    /// (coordinates follow `words_of_weight`).
    pub fn weight_vector(&self, n: u32, index: &WordIndex) -> Result<SparseVec> {
        let mut entries = Vec::new();
        for (w, c) in self.terms.iter().filter(|(w, _)| w.weight() == n) {
            let i = index
                .position(w)
                .ok_or_else(|| Error::Internal(format!("word {:?} missing from index", w)))?;
            entries.push((i, c.clone()));
        }
        Ok(SparseVec::from_entries(entries))
    }
}

impl std::fmt::Display for NCPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.text())
    }
}

/// An element of the two-fold tensor square, sparse over word pairs.
#[derive(Clone, Debug)]
pub struct Tensor2 {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<(Word, Word), Scalar>,
    truncated: bool,
}

impl PartialEq for Tensor2 {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet.same_content(&other.alphabet) && self.terms == other.terms
    }
}

impl Tensor2 {
    pub fn zero(alphabet: Arc<Alphabet>) -> Self {
        Tensor2 {
            alphabet,
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    fn accumulate(&mut self, l: Word, r: Word, c: Scalar) {
        use std::collections::btree_map::Entry;
        match self.terms.entry((l, r)) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Tensor2) -> Tensor2 {
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for ((l, r), c) in &other.terms {
            out.accumulate(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Tensor2) -> Tensor2 {
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for ((l, r), c) in &other.terms {
            out.accumulate(l.clone(), r.clone(), c.neg());
        }
        out
    }

    /// Componentwise product `(u1 (x) u2)(v1 (x) v2) = u1 v1 (x) u2 v2`,
    /// truncated when either side exceeds the cap.
    pub fn mul(&self, other: &Tensor2) -> Tensor2 {
        let cap = self.alphabet.cap();
        let mut out = Tensor2::zero(self.alphabet.clone());
        out.truncated = self.truncated || other.truncated;
        for ((ul, ur), a) in &self.terms {
            for ((vl, vr), b) in &other.terms {
                if ul.weight() + vl.weight() > cap || ur.weight() + vr.weight() > cap {
                    out.truncated = true;
                    continue;
                }
                out.accumulate(ul.concat(vl), ur.concat(vr), a.mul(b));
            }
        }
        out
    }

    pub fn text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|((l, r), c)| {
                format!(
                    "{}*{}(x){}",
                    c,
                    l.text(&self.alphabet),
                    r.text(&self.alphabet)
                )
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// All words of exact weight `n`, in the canonical order.
pub fn words_of_weight(alphabet: &Alphabet, n: u32) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    fn rec(alphabet: &Alphabet, remaining: u32, stack: &mut Vec<u32>, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word::from_letters(alphabet, stack.clone()));
            return;
        }
        for i in 0..alphabet.len() {
            let w = alphabet.letter_weight(i);
            if w <= remaining {
                stack.push(i as u32);
                rec(alphabet, remaining - w, stack, out);
                stack.pop();
            }
        }
    }
    rec(alphabet, n, &mut stack, &mut out);
    out.sort();
    out
}

/// All words of weight at most `n` (including the empty word), ascending.
pub fn words_up_to(alphabet: &Alphabet, n: u32) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for w in 1..=n {
        out.extend(words_of_weight(alphabet, w));
    }
    out
}

/// Positional index over a fixed word list.
pub struct WordIndex {
    words: Vec<Word>,
    index: std::collections::HashMap<Word, usize>,
}

impl WordIndex {
    pub fn new(words: Vec<Word>) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        WordIndex { words, index }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn basis(&self, alphabet: &Alphabet) -> Basis {
        Basis::new(self.words.iter().map(|w| w.text(alphabet))).expect("word texts are distinct")
    }
}

/// The weight-`n` word span as a labelled basis.
pub fn weight_basis(alphabet: &Alphabet, n: u32) -> (WordIndex, Basis) {
    let index = WordIndex::new(words_of_weight(alphabet, n));
    let basis = index.basis(alphabet);
    (index, basis)
}

/// The canonical subspace of weight-`n` primitives: the kernel of the
/// reduced coproduct on the weight-`n` word span.
pub fn primitives(alphabet: &Arc<Alphabet>, n: u32) -> Result<Subspace> {
    if n < 1 || n > alphabet.cap() {
        return Err(Error::WeightOutOfRange {
            weight: n,
            cap: alphabet.cap(),
        });
    }
    let (index, basis) = weight_basis(alphabet, n);
    let mut pair_index: std::collections::HashMap<(Word, Word), usize> =
        std::collections::HashMap::new();
    let mut columns: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(index.len());
    for w in index.words() {
        let poly = NCPoly::monomial(alphabet.clone(), w.clone(), alphabet.field().one())?;
        let red = poly.reduced_coproduct();
        let mut col = Vec::new();
        for ((l, r), c) in red.terms() {
            let next = pair_index.len();
            let row = *pair_index.entry((l.clone(), r.clone())).or_insert(next);
            col.push((row, c.clone()));
        }
        columns.push(col);
    }
    let pair_basis = Basis::new((0..pair_index.len()).map(|i| format!("t{i}")))?;
    let map = LinearMap::new(
        alphabet.field(),
        basis,
        pair_basis,
        columns.into_iter().map(SparseVec::from_entries).collect(),
    )?;
    Ok(kernel_basis(&map))
}

/// Per-weight primitive subspaces of the truncated tensor bialgebra,
/// computed once and shared; behaves as a pure table.
pub struct PrimitiveSpace {
    alphabet: Arc<Alphabet>,
    by_weight: Vec<(WordIndex, Subspace)>, // entry n-1 holds weight n
}

impl PrimitiveSpace {
    pub fn compute(alphabet: &Arc<Alphabet>, max_weight: u32) -> Result<Self> {
        let mut by_weight = Vec::new();
        for n in 1..=max_weight {
            let (index, _) = weight_basis(alphabet, n);
            let sub = primitives(alphabet, n)?;
            by_weight.push((index, sub));
        }
        Ok(PrimitiveSpace {
            alphabet: alphabet.clone(),
            by_weight,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn max_weight(&self) -> u32 {
        self.by_weight.len() as u32
    }

    pub fn subspace(&self, n: u32) -> &Subspace {
        &self.by_weight[(n - 1) as usize].1
    }

    pub fn word_index(&self, n: u32) -> &WordIndex {
        &self.by_weight[(n - 1) as usize].0
    }

    pub fn dim(&self, n: u32) -> usize {
        self.subspace(n).dim()
    }

    pub fn total_dim(&self) -> usize {
        self.by_weight.iter().map(|(_, s)| s.dim()).sum()
    }

    /// Labels `p<weight>.<index>` for the concatenated echelon basis.
    pub fn concatenated_basis(&self) -> Basis {
        let mut labels = Vec::new();
        for n in 1..=self.max_weight() {
            for i in 0..self.dim(n) {
                labels.push(format!("p{n}.{i}"));
            }
        }
        Basis::new(labels).expect("primitive labels are distinct")
    }

    /// Offset of the weight-`n` block inside the concatenated basis.
    pub fn block_offset(&self, n: u32) -> usize {
        (1..n).map(|m| self.dim(m)).sum()
    }

    /// The `i`-th echelon basis primitive of weight `n` as a polynomial.
    pub fn poly(&self, n: u32, i: usize) -> NCPoly {
        let (index, sub) = &self.by_weight[(n - 1) as usize];
        NCPoly::from_terms(
            self.alphabet.clone(),
            sub.rows()[i]
                .iter()
                .map(|(j, c)| (index.word(j).clone(), c.clone())),
        )
        .expect("echelon rows stay within the cap")
    }

    /// Coordinates of a primitive polynomial with respect to the
    /// concatenated echelon basis; errors when some component is not
    /// primitive (with the offending weight in the message).
    pub fn coords(&self, poly: &NCPoly) -> Result<SparseVec> {
        if !poly.counit_eval().is_zero() {
            return Err(Error::NotPrimitive(format!(
                "nonzero constant term in {}",
                poly.text()
            )));
        }
        let mut entries = Vec::new();
        for n in poly.occupied_weights() {
            if n == 0 {
                continue;
            }
            if n > self.max_weight() {
                return Err(Error::WeightOutOfRange {
                    weight: n,
                    cap: self.max_weight(),
                });
            }
            let comp = poly.weight_component(n);
            let vec = comp.weight_vector(n, self.word_index(n))?;
            match self.subspace(n).coords_of(&vec)? {
                Some(coords) => {
                    let off = self.block_offset(n);
                    for (i, c) in coords.into_iter().enumerate() {
                        if !c.is_zero() {
                            entries.push((off + i, c));
                        }
                    }
                }
                None => {
                    return Err(Error::NotPrimitive(format!(
                        "weight-{n} component {} is outside the primitive space",
                        comp.text()
                    )));
                }
            }
        }
        Ok(SparseVec::from_entries(entries))
    }
}
