//! Exact arithmetic over a prime field GF(p).
//!
//! Matrices and chains store raw residues (`u32`) and do their arithmetic
//! through a shared [`PrimeField`] context. [`FieldScalar`] is the
//! self-describing, checked value type for callers that mix moduli.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest modulus accepted. Keeps `a + b` inside `u32` and `a * b` inside `u64`.
pub const MAX_MODULUS: u32 = 1 << 31;

/// Inverses are tabulated for moduli below this bound.
const INVERSE_TABLE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported maximum")]
    ModulusTooLarge(u32),
    #[error("modulus mismatch: GF({left}) vs GF({right})")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("value {value} is not a residue mod {modulus}")]
    OutOfRange { value: u32, modulus: u32 },
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let p = p as u64;
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse of `a` modulo `p` by the extended Euclidean algorithm.
fn euclid_inverse(a: u32, p: u32) -> u32 {
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u32
}

/// Arithmetic context for GF(p). Cheap to clone; read-only after construction.
#[derive(Clone)]
pub struct PrimeField {
    p: u32,
    inverses: Option<Arc<[u32]>>,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let inverses = (p < INVERSE_TABLE_LIMIT).then(|| {
            (0..p)
                .map(|a| if a == 0 { 0 } else { euclid_inverse(a, p) })
                .collect::<Vec<_>>()
                .into()
        });
        Ok(Self { p, inverses })
    }

    /// GF(2), the default coefficient field.
    pub fn gf2() -> Self {
        Self::new(2).expect("2 is prime")
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Reduce a signed integer into `{0, …, p-1}`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.p) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.inverses {
            Some(table) => table[a as usize],
            None => euclid_inverse(a, self.p),
        })
    }

    /// The scalar `v mod p`.
    pub fn element(&self, v: u32) -> FieldScalar {
        FieldScalar {
            value: v % self.p,
            modulus: self.p,
        }
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::gf2()
    }
}

/// An element of GF(p) that carries its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    modulus: u32,
}

impl FieldScalar {
    pub fn new(value: u32, modulus: u32) -> Result<Self, FieldError> {
        if !is_prime(modulus) || modulus >= MAX_MODULUS {
            return Err(FieldError::NotPrime(modulus));
        }
        if value >= modulus {
            return Err(FieldError::OutOfRange { value, modulus });
        }
        Ok(Self { value, modulus })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Self) -> Result<u64, FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(self.modulus as u64)
    }

    pub fn add(self, other: Self) -> Result<Self, FieldError> {
        let p = self.check(other)?;
        Ok(Self {
            value: ((self.value as u64 + other.value as u64) % p) as u32,
            modulus: self.modulus,
        })
    }

    pub fn mul(self, other: Self) -> Result<Self, FieldError> {
        let p = self.check(other)?;
        Ok(Self {
            value: ((self.value as u64 * other.value as u64) % p) as u32,
            modulus: self.modulus,
        })
    }

    pub fn inverse(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self {
            value: euclid_inverse(self.value, self.modulus),
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
