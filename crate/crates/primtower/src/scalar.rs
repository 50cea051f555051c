//! Exact scalars over the rationals or a prime field.
//!
//! Every scalar is kept in a unique canonical form: reduced fraction with
//! positive denominator over `char 0`, least non-negative residue over
//! `char p`. Rational values small enough for machine words stay on an
//! `i64` fast path and promote to `BigRational` only when they must, so
//! arithmetic is exact at every size.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The ground field: characteristic 0 (rationals) or a prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec { characteristic: 0 }
    }

    /// Builds a field spec, rejecting characteristics that are neither 0 nor prime.
    pub fn new(characteristic: u64) -> Result<Self> {
        if characteristic == 0 || is_prime(characteristic) {
            Ok(FieldSpec { characteristic })
        } else {
            Err(Error::NotPrime(characteristic))
        }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec { characteristic: p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(&self) -> Scalar {
        if self.is_rational() {
            Scalar::Q(0, 1)
        } else {
            Scalar::Fp(0, self.characteristic)
        }
    }

    pub fn one(&self) -> Scalar {
        if self.is_rational() {
            Scalar::Q(1, 1)
        } else {
            Scalar::Fp(1 % self.characteristic, self.characteristic)
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        if self.is_rational() {
            Scalar::Q(n, 1)
        } else {
            let p = self.characteristic as i128;
            Scalar::Fp((((n as i128) % p + p) % p) as u64, self.characteristic)
        }
    }

    /// Parses the canonical serialization: `a` or `a/b` over the rationals,
    /// a decimal residue in `[0, p)` over a prime field.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let bad = || Error::BadScalar {
            text: text.to_string(),
            field: self.to_string(),
        };
        let text = text.trim();
        if self.is_rational() {
            let (num_s, den_s) = match text.split_once('/') {
                Some((n, d)) => (n, d),
                None => (text, "1"),
            };
            let num: BigInt = num_s.parse().map_err(|_| bad())?;
            let den: BigInt = den_s.parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::from_big(BigRational::new(num, den)))
        } else {
            let v: u64 = text.parse().map_err(|_| bad())?;
            if v >= self.characteristic {
                return Err(bad());
            }
            Ok(Scalar::Fp(v, self.characteristic))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "Q")
        } else {
            write!(f, "F{}", self.characteristic)
        }
    }
}

/// An exact field element in canonical form.
///
/// `Q(n, d)` holds a reduced fraction with `d > 0`; `QBig` is used only when
/// the value does not fit the small form, so equality of representations is
/// equality of field elements. `Fp(v, p)` holds the least residue `v < p`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Q(i64, i64),
    QBig(Box<BigRational>),
    Fp(u64, u64),
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Q(..) | Scalar::QBig(_) => FieldSpec::rationals(),
            Scalar::Fp(_, p) => FieldSpec { characteristic: *p },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(n, _) => *n == 0,
            Scalar::QBig(_) => false, // canonical big values are never small enough to be 0
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(n, d) => *n == 1 && *d == 1,
            Scalar::QBig(_) => false,
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    /// Canonicalizes a big rational, demoting to the small form when it fits.
    fn from_big(r: BigRational) -> Scalar {
        // BigRational::new already reduces and fixes the sign of the denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Scalar::Q(n, d)
        } else {
            Scalar::QBig(Box::new(r))
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Scalar::Q(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Scalar::QBig(r) => (**r).clone(),
            Scalar::Fp(..) => unreachable!("to_big on a prime-field scalar"),
        }
    }

    fn check_same_field(&self, other: &Scalar) {
        let (a, b) = (self.field(), other.field());
        assert!(
            a == b,
            "scalar arithmetic across fields: {a} vs {b} (callers must validate inputs)"
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other);
        match (self, other) {
            (Scalar::Q(an, ad), Scalar::Q(bn, bd)) => {
                let n = (*an as i128) * (*bd as i128) + (*bn as i128) * (*ad as i128);
                let d = (*ad as i128) * (*bd as i128);
                q_from_i128(n, d)
            }
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => {
                let s = (*a as u128 + *b as u128) % (*p as u128);
                Scalar::Fp(s as u64, *p)
            }
            _ => Scalar::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(n, d) => Scalar::Q(-n, *d),
            Scalar::QBig(r) => Scalar::from_big(-(**r).clone()),
            Scalar::Fp(v, p) => Scalar::Fp(if *v == 0 { 0 } else { p - v }, *p),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other);
        match (self, other) {
            (Scalar::Q(an, ad), Scalar::Q(bn, bd)) => {
                let n = (*an as i128) * (*bn as i128);
                let d = (*ad as i128) * (*bd as i128);
                q_from_i128(n, d)
            }
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => {
                let m = (*a as u128 * *b as u128) % (*p as u128);
                Scalar::Fp(m as u64, *p)
            }
            _ => Scalar::from_big(self.to_big() * other.to_big()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(n, d) => {
                if *n > 0 {
                    Scalar::Q(*d, *n)
                } else {
                    Scalar::Q(-d, -n)
                }
            }
            Scalar::QBig(r) => Scalar::from_big((**r).recip()),
            Scalar::Fp(v, p) => Scalar::Fp(mod_inverse(*v, *p), *p),
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.inverse().map(|inv| self.mul(&inv))
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Reduce an i128 fraction to canonical form, demoting to i64 when possible.
fn q_from_i128(mut n: i128, mut d: i128) -> Scalar {
    debug_assert!(d != 0);
    if n == 0 {
        return Scalar::Q(0, 1);
    }
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.abs().gcd(&d);
    n /= g;
    d /= g;
    if let (Ok(n64), Ok(d64)) = (i64::try_from(n), i64::try_from(d)) {
        Scalar::Q(n64, d64)
    } else {
        Scalar::QBig(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d))))
    }
}

fn mod_inverse(v: u64, p: u64) -> u64 {
    // extended Euclid on (v, p); p prime and v != 0 mod p
    let (mut r0, mut r1) = (p as i128, v as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse of a non-unit mod {p}");
    (((t0 % p as i128) + p as i128) % p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(n, 1) => write!(f, "{n}"),
            Scalar::Q(n, d) => write!(f, "{n}/{d}"),
            Scalar::QBig(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

/// Deterministic Miller-Rabin for u64 (the listed witnesses decide primality
/// for every 64-bit integer).
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let pow_mod = |b: u64, mut e: u64| -> u64 {
        let m = n as u128;
        let mut acc: u128 = 1;
        let mut base = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u64
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
