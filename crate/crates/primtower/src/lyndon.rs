//! Lyndon words and their standard bracketings: an independent oracle for
//! the primitive spaces of the free tensor bialgebra.
//!
//! In characteristic 0 the bracketings of the Lyndon words of length `n`
//! span the weight-`n` primitives; in characteristic `p` the spanning set
//! also takes `p^j`-th powers of bracketings of length `n / p^j`. The
//! per-degree dimensions are the Witt numbers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{LinearMap, SparseVec, Subspace};
use crate::scalar::Scalar;
use crate::tensor::{weight_basis, Alphabet, NCPoly};

/// All Lyndon words of length exactly `n` over `k` letters, in lexicographic
/// order (Duval's generation).
pub fn lyndon_words(k: usize, n: usize) -> Vec<Vec<u32>> {
    assert!(k >= 1 && n >= 1);
    let mut out = Vec::new();
    let mut w = vec![0u32];
    loop {
        if w.len() == n {
            out.push(w.clone());
        }
        // extend periodically to full length, then trim and increment
        let len = w.len();
        while w.len() < n {
            let c = w[w.len() - len];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == (k - 1) as u32 {
                w.pop();
            } else {
                break;
            }
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().unwrap() += 1;
    }
    out
}

/// A word is Lyndon when it is strictly smaller than each of its proper
/// suffixes.
pub fn is_lyndon(w: &[u32]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| w < &w[i..])
}

/// Standard (Chen-Fox-Lyndon) factorization `w = u v` with `v` the
/// lexicographically least proper suffix; both factors are Lyndon.
pub fn standard_factorization(w: &[u32]) -> (Vec<u32>, Vec<u32>) {
    debug_assert!(w.len() >= 2 && is_lyndon(w));
    let split = (1..w.len())
        .min_by(|&i, &j| w[i..].cmp(&w[j..]))
        .expect("word has a proper suffix");
    (w[..split].to_vec(), w[split..].to_vec())
}

/// Expands the standard bracketing of a Lyndon word as a polynomial; the
/// leading word of the expansion is the word itself with coefficient 1.
pub fn lyndon_bracket(alphabet: &Arc<Alphabet>, w: &[u32]) -> Result<NCPoly> {
    if !is_lyndon(w) || w.iter().any(|&l| l as usize >= alphabet.len()) {
        let text = w
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        return Err(Error::NotLyndon(text));
    }
    fn rec(alphabet: &Arc<Alphabet>, w: &[u32]) -> Result<NCPoly> {
        if w.len() == 1 {
            return Ok(NCPoly::letter(alphabet.clone(), w[0] as usize));
        }
        let (u, v) = standard_factorization(w);
        let a = rec(alphabet, &u)?;
        let b = rec(alphabet, &v)?;
        a.concat_mul(&b)?.sub(&b.concat_mul(&a)?)
    }
    rec(alphabet, w)
}

/// One spanning element of the oracle: the `p^j`-th power of the standard
/// bracketing of a Lyndon word (`j = 0` in characteristic 0).
pub struct OracleGenerator {
    pub word: Vec<u32>,
    pub power_exponent: u32, // j, the power is p^j
    pub poly: NCPoly,
}

/// The oracle basis of weight-`n` primitives for an unweighted alphabet.
pub struct LyndonOracle {
    pub generators: Vec<OracleGenerator>,
    pub subspace: Subspace,
    map: LinearMap,
}

impl LyndonOracle {
    pub fn compute(alphabet: &Arc<Alphabet>, n: u32) -> Result<Self> {
        if alphabet.letters().iter().any(|l| l.weight != 1) {
            return Err(Error::BadAlphabet(
                "the Lyndon oracle requires an unweighted alphabet".into(),
            ));
        }
        if n < 1 || n > alphabet.cap() {
            return Err(Error::WeightOutOfRange {
                weight: n,
                cap: alphabet.cap(),
            });
        }
        let k = alphabet.len();
        let p = alphabet.field().characteristic();
        let mut generators = Vec::new();
        // (m, j) with m * p^j = n; characteristic 0 only allows j = 0
        let mut decompositions = vec![(n, 0u32)];
        if p > 0 {
            let mut q = p;
            let mut j = 1;
            while q <= n as u64 {
                if (n as u64).is_multiple_of(q) {
                    decompositions.push(((n as u64 / q) as u32, j));
                }
                q *= p;
                j += 1;
            }
        }
        for (m, j) in decompositions {
            for word in lyndon_words(k, m as usize) {
                let base = lyndon_bracket(alphabet, &word)?;
                let poly = if j == 0 {
                    base
                } else {
                    base.pow(p.pow(j) as u32)?
                };
                generators.push(OracleGenerator {
                    word,
                    power_exponent: j,
                    poly,
                });
            }
        }
        let (index, basis) = weight_basis(alphabet, n);
        let columns: Vec<SparseVec> = generators
            .iter()
            .map(|g| g.poly.weight_vector(n, &index))
            .collect::<Result<_>>()?;
        let gen_basis = crate::linalg::Basis::new((0..generators.len()).map(|i| format!("g{i}")))?;
        let map = LinearMap::new(alphabet.field(), gen_basis, basis.clone(), columns)?;
        let subspace = crate::linalg::image_basis(&map);
        Ok(LyndonOracle {
            generators,
            subspace,
            map,
        })
    }

    /// Coordinates of a weight-homogeneous vector over the oracle
    /// generators; `None` when it is outside their span.
    pub fn generator_coords(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        crate::linalg::solve(&self.map, v)
    }
}

/// Canonical subspace spanned by the oracle generators; must agree with the
/// kernel-computed primitives.
pub fn lyndon_primitive_oracle(alphabet: &Arc<Alphabet>, n: u32) -> Result<Subspace> {
    Ok(LyndonOracle::compute(alphabet, n)?.subspace)
}

/// Witt number: the dimension of the weight-`n` part of the free Lie
/// algebra on `k` generators, `(1/n) sum_{d|n} mu(d) k^{n/d}`.
pub fn witt(k: u64, n: u64) -> u64 {
    assert!(n >= 1);
    let mut total: i128 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += i128::from(moebius(d)) * (k as i128).pow((n / d) as u32);
        }
    }
    debug_assert!(total >= 0 && total % n as i128 == 0);
    (total / n as i128) as u64
}

/// Expected primitive dimension at weight `n`: the Witt number in
/// characteristic 0, and the sum over `m p^j = n` in characteristic `p`.
pub fn primitive_dim(k: u64, n: u64, characteristic: u64) -> u64 {
    if characteristic == 0 {
        return witt(k, n);
    }
    let p = characteristic;
    let mut total = witt(k, n);
    let mut q = p;
    while q <= n {
        if n.is_multiple_of(q) {
            total += witt(k, n / q);
        }
        q *= p;
    }
    total
}

fn moebius(mut n: u64) -> i64 {
    let mut primes = 0;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0; // square factor
            }
            primes += 1;
        }
        d += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}
