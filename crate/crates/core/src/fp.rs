//! Arithmetic in prime fields `F_p` with `p = 4 * l_1 * ... * l_n - 1`.
//!
//! Elements carry a shared handle to their modulus so that mixing fields is
//! detected instead of silently producing garbage. Values are always kept in
//! canonical form `0 <= value < p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::random::{sample_below, width_bytes};

/// Moduli below this bound are certified by trial division.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 40;
/// Miller-Rabin rounds for moduli above 64 bits.
const MILLER_RABIN_ROUNDS: usize = 64;

/// A CSIDH-shaped prime `p = 4 * prod(l_i) - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeModulus {
    p: BigUint,
    ells: Vec<u64>,
    half_p_minus_1: BigUint,
}

impl PrimeModulus {
    /// Builds `p = 4 * prod(ells) - 1` and validates primality.
    pub fn from_ells(ells: &[u64]) -> Result<Self> {
        if ells.is_empty() {
            return Err(Error::InvalidModulus("empty prime list".into()));
        }
        let mut sorted = ells.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ells.len() {
            return Err(Error::InvalidModulus("repeated small prime".into()));
        }
        for &l in ells {
            if l < 3 || l % 2 == 0 || !is_prime(&BigUint::from(l)) {
                return Err(Error::InvalidModulus(format!("{l} is not an odd prime")));
            }
        }
        let p = ells.iter().fold(BigUint::from(4u32), |acc, &l| acc * l) - 1u32;
        if !is_prime(&p) {
            return Err(Error::InvalidModulus(format!("4*prod(l_i) - 1 = {p} is not prime")));
        }
        Ok(Self::assemble(p, ells.to_vec()))
    }

    /// Validates a stored `(p, ells)` pair, checking the product relation exactly.
    pub fn with_value(p: BigUint, ells: &[u64]) -> Result<Self> {
        let built = Self::from_ells(ells)?;
        if built.p != p {
            return Err(Error::InvalidModulus("p != 4*prod(l_i) - 1".into()));
        }
        Ok(built)
    }

    fn assemble(p: BigUint, ells: Vec<u64>) -> Self {
        let half_p_minus_1 = (&p - 1u32) >> 1;
        PrimeModulus { p, ells, half_p_minus_1 }
    }

    pub fn value(&self) -> &BigUint {
        &self.p
    }

    /// The small odd primes `l_1..l_n` (the factor 4 is implicit).
    pub fn ells(&self) -> &[u64] {
        &self.ells
    }

    /// `p + 1`, the order of every supersingular curve over `F_p`.
    pub fn curve_order(&self) -> BigUint {
        &self.p + 1u32
    }

    /// Width of the canonical big-endian encoding of an element.
    pub fn byte_len(&self) -> usize {
        width_bytes(&self.p)
    }

    pub fn bits(&self) -> u64 {
        self.p.bits()
    }

    /// The value as a machine word when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.p.to_u64()
    }
}

impl fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeModulus({})", self.p)
    }
}

/// Shared handle to a modulus.
pub type Modulus = Arc<PrimeModulus>;

/// An element of `F_p` in canonical form.
#[derive(Clone)]
pub struct FieldElement {
    value: BigUint,
    modulus: Modulus,
}

impl FieldElement {
    /// Reduces `value` modulo `p`.
    pub fn new(value: BigUint, modulus: &Modulus) -> Self {
        FieldElement { value: value % &modulus.p, modulus: modulus.clone() }
    }

    pub fn from_u64(value: u64, modulus: &Modulus) -> Self {
        Self::new(BigUint::from(value), modulus)
    }

    pub fn zero(modulus: &Modulus) -> Self {
        FieldElement { value: BigUint::zero(), modulus: modulus.clone() }
    }

    pub fn one(modulus: &Modulus) -> Self {
        FieldElement { value: BigUint::one(), modulus: modulus.clone() }
    }

    /// Parses a canonical encoding: exactly `modulus.byte_len()` big-endian
    /// bytes holding a value below `p`.
    pub fn from_bytes(bytes: &[u8], modulus: &Modulus) -> Result<Self> {
        if bytes.len() != modulus.byte_len() {
            return Err(Error::Encoding(format!("field element is {} bytes, expected {}", bytes.len(), modulus.byte_len())));
        }
        let value = BigUint::from_bytes_be(bytes);
        if value >= modulus.p {
            return Err(Error::Encoding("field element not reduced".into()));
        }
        Ok(FieldElement { value, modulus: modulus.clone() })
    }

    /// Fixed-width big-endian encoding (`modulus.byte_len()` bytes).
    pub fn to_bytes(&self) -> Vec<u8> {
        left_pad(&self.value.to_bytes_be(), self.modulus.byte_len())
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus.p == other.modulus.p {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    fn with_value(&self, value: BigUint) -> Self {
        FieldElement { value, modulus: self.modulus.clone() }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let mut v = &self.value + &rhs.value;
        if v >= self.modulus.p {
            v -= &self.modulus.p;
        }
        Ok(self.with_value(v))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let v = if self.value >= rhs.value {
            &self.value - &rhs.value
        } else {
            &self.value + &self.modulus.p - &rhs.value
        };
        Ok(self.with_value(v))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self.with_value((&self.value * &rhs.value) % &self.modulus.p))
    }

    pub fn square(&self) -> Self {
        self.with_value((&self.value * &self.value) % &self.modulus.p)
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        self.with_value(self.value.modpow(exp, &self.modulus.p))
    }

    /// Multiplicative inverse via Fermat; zero is an error.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(&(&self.modulus.p - 2u32)))
    }

    /// Legendre symbol by Euler's criterion: 0, +1 or -1.
    pub fn legendre(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.pow(&self.modulus.half_p_minus_1).value.is_one() {
            1
        } else {
            -1
        }
    }

    /// Uniform element of `F_p`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, modulus: &Modulus) -> Result<Self> {
        Ok(FieldElement { value: sample_below(rng, &modulus.p)?, modulus: modulus.clone() })
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.modulus.p == other.modulus.p
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mismatched moduli; the `try_*` forms report it.
macro_rules! impl_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field elements from different moduli")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, try_add);
impl_binop!(Sub, sub, try_sub);
impl_binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        if self.is_zero() {
            self.clone()
        } else {
            self.with_value(&self.modulus.p - &self.value)
        }
    }
}

pub(crate) fn left_pad(bytes: &[u8], width: usize) -> Vec<u8> {
    debug_assert!(bytes.len() <= width);
    let mut out = vec![0u8; width - bytes.len()];
    out.extend_from_slice(bytes);
    out
}

/// Primality: exact trial division below 2^40, deterministic Miller-Rabin up
/// to 2^64, and 64 rounds of Miller-Rabin with derived bases beyond.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_LIMIT {
            return trial_division(small);
        }
        const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
        return BASES.iter().all(|&a| miller_rabin_round(n, &BigUint::from(a)));
    }
    if n.is_even() {
        return false;
    }
    // Bases come from a generator keyed on n so the verdict is reproducible.
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&Sha256::digest(n.to_bytes_be()));
    let mut rng = ChaCha20Rng::from_seed(seed);
    let range = n - 3u32;
    (0..MILLER_RABIN_ROUNDS).all(|_| {
        let a = sample_below(&mut rng, &range).expect("chacha never fails") + 2u32;
        miller_rabin_round(n, &a)
    })
}

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn miller_rabin_round(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - 1u32;
    let a = a % n;
    if a.is_zero() {
        return true;
    }
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}
