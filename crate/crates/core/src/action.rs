//! The free and transitive action `[a]E` of a cyclic group `Z_N` on a set.
//!
//! Two backends realize it:
//!
//! * **toy isogeny**: the class group of `Z[sqrt(-p)]` acting on supersingular
//!   Montgomery curves over a small CSIDH-shaped prime. The orbit of the base
//!   curve under a generating ideal is walked once with real Vélu isogenies and
//!   stored, after which `[a]E` is a table lookup. UNSAFE-TOY: no security.
//! * **mock additive**: `Z_N` acting on itself by addition, at production
//!   parameter widths. Exercises the protocol and encodings, nothing else.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::fp::{left_pad, FieldElement, Modulus, PrimeModulus};
use crate::montgomery::{MontgomeryCurve, Side};
use crate::random::{sample_below, width_bytes};

/// Default bound on orbit walks.
pub const DEFAULT_MAX_ORBIT: usize = 1 << 20;

/// An exponent `a` in `Z_N`, naming the group element `g^a`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(pub BigUint);

impl Scalar {
    pub fn from_u64(v: u64) -> Self {
        Scalar(BigUint::from(v))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponents of the prime ideals above `l_1..l_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<i32>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// The unit vector selecting the ideal above the `i`-th small prime.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExponentVector(e)
    }

    pub fn negated(&self) -> Self {
        ExponentVector(self.0.iter().map(|e| -e).collect())
    }
}

/// Backend selector, also the profile byte of serialized artifacts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    ToyIsogeny,
    MockAdditive,
}

impl BackendKind {
    pub fn to_byte(self) -> u8 {
        match self {
            BackendKind::ToyIsogeny => 1,
            BackendKind::MockAdditive => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(BackendKind::ToyIsogeny),
            2 => Some(BackendKind::MockAdditive),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::ToyIsogeny => "toy-isogeny",
            BackendKind::MockAdditive => "mock-additive",
        }
    }
}

/// An element of the set acted upon.
#[derive(Clone, PartialEq, Eq)]
pub enum SetElement {
    Curve(MontgomeryCurve),
    Residue(BigUint),
}

impl fmt::Debug for SetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetElement::Curve(c) => write!(f, "{c:?}"),
            SetElement::Residue(r) => write!(f, "R[{r}]"),
        }
    }
}

/// Applies `prod l_i^{e_i}` to `curve`, one isogeny of degree `l_i` per unit of
/// `|e_i|`: kernels on the curve for positive exponents, on the twist for
/// negative ones.
pub fn act_ideal_vector<R: RngCore + ?Sized>(
    curve: &MontgomeryCurve,
    e: &ExponentVector,
    rng: &mut R,
) -> Result<MontgomeryCurve> {
    let ells = curve.modulus().ells().to_vec();
    if e.0.len() != ells.len() {
        return Err(Error::ExponentLength { expected: ells.len(), got: e.0.len() });
    }
    let mut current = curve.clone();
    for (&ell, &exp) in ells.iter().zip(&e.0) {
        let side = if exp > 0 { Side::Curve } else { Side::Twist };
        for _ in 0..exp.unsigned_abs() {
            let kernel = current.sample_point_of_order(ell, side, rng)?;
            current = current.velu_isogeny(&kernel, ell)?;
        }
    }
    Ok(current)
}

/// Walks `base, g*base, g^2*base, ...` until it returns to `base`.
///
/// Returns the cycle length and the table of visited curves.
pub fn build_orbit<R: RngCore + ?Sized>(
    base: &SetElement,
    generator: &ExponentVector,
    max_steps: usize,
    rng: &mut R,
) -> Result<(usize, Vec<MontgomeryCurve>)> {
    let SetElement::Curve(base) = base else {
        return Err(Error::BackendMismatch);
    };
    let mut table = vec![base.clone()];
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    seen.insert(base.coefficient().value().clone(), 0);
    let mut current = base.clone();
    loop {
        if table.len() > max_steps {
            return Err(Error::OrbitTooLong(max_steps));
        }
        current = act_ideal_vector(&current, generator, rng)?;
        if current == *base {
            return Ok((table.len(), table));
        }
        if seen.insert(current.coefficient().value().clone(), table.len()).is_some() {
            return Err(Error::OrbitNotFree(table.len()));
        }
        table.push(current.clone());
    }
}

/// Class number of `Z[sqrt(-p)]`, by counting reduced primitive forms of
/// discriminant `-4p`.
///
/// For `p = 3 mod 8` this is the size of the set of supersingular Montgomery
/// curves over `F_p`, so it certifies that an orbit is the whole set.
pub fn class_number(p: u64) -> u64 {
    let d = 4 * p as i128; // |disc|
    let mut count = 0u64;
    let mut a: i128 = 1;
    while 3 * a * a <= d {
        // b has the parity of the discriminant (even)
        let mut b = -a + 1;
        while b <= a {
            if b % 2 == 0 {
                let num = b * b + d;
                if num % (4 * a) == 0 {
                    let c = num / (4 * a);
                    let reduced = c >= a && !(b < 0 && (a == c || -b == a));
                    if reduced && a.gcd(&b.abs()).gcd(&c) == 1 {
                        count += 1;
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    count
}

/// Toy isogeny backend: a small prime, a base curve and the full orbit
/// under a generating ideal.
#[derive(Clone)]
pub struct ToyBackend {
    modulus: Modulus,
    generator: ExponentVector,
    orbit: Vec<MontgomeryCurve>,
    index: HashMap<BigUint, usize>,
}

impl ToyBackend {
    /// Builds the backend from the small primes, picking a generator.
    ///
    /// Tries the ideals above `l_1, l_2, ..` and then products of pairs, and
    /// keeps the first whose orbit has the full class number as length.
    pub fn generate<R: RngCore + ?Sized>(ells: &[u64], base_a: u64, rng: &mut R) -> Result<Self> {
        let modulus = Arc::new(PrimeModulus::from_ells(ells)?);
        let p = modulus
            .to_u64()
            .ok_or_else(|| Error::InvalidParams("toy modulus exceeds 64 bits".into()))?;
        let base = Self::validated_base(&modulus, base_a)?;
        let target = class_number(p);
        let n = ells.len();
        let mut candidates: Vec<ExponentVector> = (0..n).map(|i| ExponentVector::unit(n, i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let mut e = ExponentVector::unit(n, i);
                e.0[j] = 1;
                candidates.push(e);
            }
        }
        for generator in candidates {
            let (len, orbit) = build_orbit(&SetElement::Curve(base.clone()), &generator, DEFAULT_MAX_ORBIT, rng)?;
            if len as u64 == target {
                return Ok(Self::assemble(modulus, generator, orbit));
            }
        }
        Err(Error::NoGenerator { class_number: target })
    }

    /// Rebuilds the backend from stored data and checks the frozen order.
    pub fn from_parts<R: RngCore + ?Sized>(
        modulus: Modulus,
        base_a: u64,
        generator: ExponentVector,
        expected_order: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if generator.0.len() != modulus.ells().len() {
            return Err(Error::ExponentLength { expected: modulus.ells().len(), got: generator.0.len() });
        }
        let base = Self::validated_base(&modulus, base_a)?;
        let (len, orbit) = build_orbit(&SetElement::Curve(base), &generator, DEFAULT_MAX_ORBIT, rng)?;
        if len != expected_order {
            return Err(Error::InvalidParams(format!("orbit length {len} != stored order {expected_order}")));
        }
        Ok(Self::assemble(modulus, generator, orbit))
    }

    fn validated_base(modulus: &Modulus, base_a: u64) -> Result<MontgomeryCurve> {
        let base = MontgomeryCurve::new(FieldElement::from_u64(base_a, modulus))?;
        if !base.is_supersingular() {
            return Err(Error::NotSupersingular);
        }
        Ok(base)
    }

    fn assemble(modulus: Modulus, generator: ExponentVector, orbit: Vec<MontgomeryCurve>) -> Self {
        let index = orbit
            .iter()
            .enumerate()
            .map(|(k, c)| (c.coefficient().value().clone(), k))
            .collect();
        ToyBackend { modulus, generator, orbit, index }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn generator(&self) -> &ExponentVector {
        &self.generator
    }

    pub fn orbit(&self) -> &[MontgomeryCurve] {
        &self.orbit
    }

    /// Position of a curve in the orbit table.
    pub fn position(&self, curve: &MontgomeryCurve) -> Option<usize> {
        if curve.modulus().value() != self.modulus.value() {
            return None;
        }
        self.index.get(curve.coefficient().value()).copied()
    }
}

/// Mock additive backend: `Z_N` acting on residues mod `N` by translation.
///
/// `modulus` only fixes the width public keys are serialized at.
#[derive(Clone, Debug)]
pub struct MockBackend {
    order: BigUint,
    modulus: Modulus,
    base: BigUint,
}

impl MockBackend {
    pub fn new(order: BigUint, modulus: Modulus, base: BigUint) -> Result<Self> {
        if order < BigUint::from(2u32) {
            return Err(Error::InvalidParams("mock order N must be at least 2".into()));
        }
        if base >= order {
            return Err(Error::InvalidParams("mock base element not reduced mod N".into()));
        }
        if width_bytes(&order) > modulus.byte_len() {
            return Err(Error::InvalidParams("mock residues wider than the field encoding".into()));
        }
        Ok(MockBackend { order, modulus, base })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }
}

/// The group-action backend that everything above the arithmetic layer uses.
#[derive(Clone)]
pub enum ActionBackend {
    Toy(ToyBackend),
    Mock(MockBackend),
}

impl fmt::Debug for ActionBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionBackend::Toy(t) => write!(f, "Toy(p={}, N={})", t.modulus.value(), t.orbit.len()),
            ActionBackend::Mock(m) => write!(f, "Mock(N={})", m.order),
        }
    }
}

impl ActionBackend {
    pub fn kind(&self) -> BackendKind {
        match self {
            ActionBackend::Toy(_) => BackendKind::ToyIsogeny,
            ActionBackend::Mock(_) => BackendKind::MockAdditive,
        }
    }

    /// Group order `N`.
    pub fn order(&self) -> BigUint {
        match self {
            ActionBackend::Toy(t) => BigUint::from(t.orbit.len()),
            ActionBackend::Mock(m) => m.order.clone(),
        }
    }

    pub fn modulus(&self) -> &Modulus {
        match self {
            ActionBackend::Toy(t) => &t.modulus,
            ActionBackend::Mock(m) => &m.modulus,
        }
    }

    /// The base element `E_0`.
    pub fn base(&self) -> SetElement {
        match self {
            ActionBackend::Toy(t) => SetElement::Curve(t.orbit[0].clone()),
            ActionBackend::Mock(m) => SetElement::Residue(m.base.clone()),
        }
    }

    /// Byte width of scalars (`z_i`, secret keys).
    pub fn scalar_len(&self) -> usize {
        width_bytes(&self.order())
    }

    /// Byte width of set elements inside the transcript hash.
    pub fn transcript_element_len(&self) -> usize {
        match self {
            ActionBackend::Toy(t) => t.modulus.byte_len(),
            ActionBackend::Mock(_) => self.scalar_len(),
        }
    }

    /// Byte width of set elements in public keys: one element of `F_p`.
    pub fn public_element_len(&self) -> usize {
        self.modulus().byte_len()
    }

    pub fn check_scalar(&self, a: &Scalar) -> Result<()> {
        if a.0 < self.order() {
            Ok(())
        } else {
            Err(Error::ScalarOutOfRange)
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % self.order())
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let n = self.order();
        Scalar((&a.0 % &n + &n - &b.0 % &n) % &n)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.sub(&Scalar(BigUint::zero()), a)
    }

    /// Uniform scalar in `[0, N)`.
    pub fn sample_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<Scalar> {
        sample_below(rng, &self.order()).map(Scalar)
    }

    /// Membership test: is `x` a valid element of the acted-upon set?
    pub fn contains(&self, x: &SetElement) -> bool {
        match (self, x) {
            (ActionBackend::Toy(t), SetElement::Curve(c)) => t.position(c).is_some(),
            (ActionBackend::Mock(m), SetElement::Residue(r)) => r < &m.order,
            _ => false,
        }
    }

    /// `[a]E`.
    pub fn act(&self, a: &Scalar, x: &SetElement) -> Result<SetElement> {
        self.check_scalar(a)?;
        match (self, x) {
            (ActionBackend::Toy(t), SetElement::Curve(c)) => {
                let k = t.position(c).ok_or(Error::ForeignElement)?;
                let n = t.orbit.len();
                let shift = a.0.to_usize().expect("a < N fits in usize");
                Ok(SetElement::Curve(t.orbit[(k + shift) % n].clone()))
            }
            (ActionBackend::Mock(m), SetElement::Residue(r)) => {
                if r >= &m.order {
                    return Err(Error::ForeignElement);
                }
                Ok(SetElement::Residue((r + &a.0) % &m.order))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// The unique `a` with `[a]E = target`, by exhaustive search over the
    /// orbit. Only meaningful at toy scale or on the mock backend.
    pub fn gaip_bruteforce(&self, x: &SetElement, target: &SetElement) -> Result<Scalar> {
        match (self, x, target) {
            (ActionBackend::Toy(t), SetElement::Curve(c), SetElement::Curve(c_target)) => {
                let n = t.orbit.len();
                let start = t.position(c).ok_or(Error::ForeignElement)?;
                (0..n)
                    .find(|&a| t.orbit[(start + a) % n] == *c_target)
                    .map(|a| Scalar(BigUint::from(a)))
                    .ok_or(Error::ForeignElement)
            }
            (ActionBackend::Mock(m), SetElement::Residue(r), SetElement::Residue(r_target)) => {
                if r >= &m.order || r_target >= &m.order {
                    return Err(Error::ForeignElement);
                }
                Ok(Scalar((r_target + &m.order - r) % &m.order))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Fixed-width encoding of an element for the transcript hash.
    pub fn transcript_bytes(&self, x: &SetElement) -> Result<Vec<u8>> {
        self.element_bytes(x, self.transcript_element_len())
    }

    /// Fixed-width encoding of an element for public keys.
    pub fn public_bytes(&self, x: &SetElement) -> Result<Vec<u8>> {
        self.element_bytes(x, self.public_element_len())
    }

    fn element_bytes(&self, x: &SetElement, width: usize) -> Result<Vec<u8>> {
        if !self.contains(x) {
            return Err(Error::ForeignElement);
        }
        let value = match x {
            SetElement::Curve(c) => c.coefficient().value(),
            SetElement::Residue(r) => r,
        };
        Ok(left_pad(&value.to_bytes_be(), width))
    }

    /// Inverse of [`ActionBackend::public_bytes`]; rejects non-members.
    pub fn element_from_public_bytes(&self, bytes: &[u8]) -> Result<SetElement> {
        if bytes.len() != self.public_element_len() {
            return Err(Error::Encoding("set element width".into()));
        }
        let el = match self {
            ActionBackend::Toy(t) => {
                let a = FieldElement::from_bytes(bytes, &t.modulus)?;
                SetElement::Curve(MontgomeryCurve::new(a).map_err(|_| Error::ForeignElement)?)
            }
            ActionBackend::Mock(_) => SetElement::Residue(BigUint::from_bytes_be(bytes)),
        };
        if !self.contains(&el) {
            return Err(Error::ForeignElement);
        }
        Ok(el)
    }
}

/// The 74 small primes of the CSIDH-512 parameter set: the 73 smallest odd
/// primes followed by 587. Used only to fix production widths.
pub fn csidh512_ells() -> Vec<u64> {
    let mut ells: Vec<u64> = (3u64..)
        .step_by(2)
        .filter(|&n| (3..n).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .take(73)
        .collect();
    ells.push(587);
    ells
}
