//! x-only arithmetic on Montgomery curves `y^2 = x^3 + A x^2 + x` and the
//! odd-degree Vélu isogenies that move between them.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fp::{FieldElement, Modulus};

/// Moduli below this bound are point-counted exhaustively.
pub const EXHAUSTIVE_COUNT_LIMIT: u64 = 1 << 20;
/// Random points checked by the probabilistic supersingularity test.
const SUPERSINGULAR_PROBES: usize = 24;
/// Draws allowed when looking for a point of order `l`.
pub const POINT_RETRY_BUDGET: usize = 128;

/// Which quadratic twist a sampled x-coordinate lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x^3 + A x^2 + x` is a nonzero square: the point is on the curve.
    Curve,
    /// `x^3 + A x^2 + x` is a non-square: the point is on the twist.
    Twist,
}

impl Side {
    fn legendre(self) -> i8 {
        match self {
            Side::Curve => 1,
            Side::Twist => -1,
        }
    }
}

/// A nonsingular Montgomery curve, identified by its coefficient `A`.
#[derive(Clone)]
pub struct MontgomeryCurve {
    a: FieldElement,
    a24: FieldElement,
}

/// A point of the x-line in projective coordinates; `Z = 0` is the identity.
#[derive(Clone, Debug)]
pub struct XOnlyPoint {
    pub x: FieldElement,
    pub z: FieldElement,
}

impl XOnlyPoint {
    pub fn identity(modulus: &Modulus) -> Self {
        XOnlyPoint { x: FieldElement::one(modulus), z: FieldElement::zero(modulus) }
    }

    pub fn from_affine(x: FieldElement) -> Self {
        let z = FieldElement::one(x.modulus());
        XOnlyPoint { x, z }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    /// Affine x-coordinate, `None` at the identity.
    pub fn affine_x(&self) -> Option<FieldElement> {
        self.z.inv().ok().map(|zi| &self.x * &zi)
    }

    /// Projective equality on the x-line.
    pub fn same_x(&self, other: &Self) -> bool {
        match (self.is_identity(), other.is_identity()) {
            (true, true) => true,
            (false, false) => &self.x * &other.z == &other.x * &self.z,
            _ => false,
        }
    }
}

impl MontgomeryCurve {
    pub fn new(a: FieldElement) -> Result<Self> {
        let m = a.modulus().clone();
        let four = FieldElement::from_u64(4, &m);
        if a.square() == four {
            return Err(Error::SingularCurve);
        }
        let a24 = &(&a + &FieldElement::from_u64(2, &m)) * &four.inv()?;
        Ok(MontgomeryCurve { a, a24 })
    }

    pub fn coefficient(&self) -> &FieldElement {
        &self.a
    }

    pub fn modulus(&self) -> &Modulus {
        self.a.modulus()
    }

    /// `x^3 + A x^2 + x`.
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        let x2 = x.square();
        &(&(&x2 * x) + &(&self.a * &x2)) + x
    }

    pub fn xdbl(&self, p: &XOnlyPoint) -> XOnlyPoint {
        let sum = (&p.x + &p.z).square();
        let diff = (&p.x - &p.z).square();
        let t = &sum - &diff;
        XOnlyPoint { x: &sum * &diff, z: &t * &(&diff + &(&self.a24 * &t)) }
    }

    /// Differential addition: `x(P + Q)` from `x(P)`, `x(Q)` and `x(P - Q)`.
    pub fn xadd(p: &XOnlyPoint, q: &XOnlyPoint, diff: &XOnlyPoint) -> XOnlyPoint {
        let u = &(&p.x - &p.z) * &(&q.x + &q.z);
        let v = &(&p.x + &p.z) * &(&q.x - &q.z);
        XOnlyPoint { x: &diff.z * &(&u + &v).square(), z: &diff.x * &(&u - &v).square() }
    }

    /// `x([k]P)` by the Montgomery ladder.
    pub fn ladder(&self, k: &BigUint, p: &XOnlyPoint) -> XOnlyPoint {
        let m = self.modulus();
        if p.is_identity() || k.is_zero() {
            return XOnlyPoint::identity(m);
        }
        // (0, 0) has order 2 and breaks differential addition.
        if p.x.is_zero() {
            return if k.bit(0) { p.clone() } else { XOnlyPoint::identity(m) };
        }
        let mut r0 = XOnlyPoint::identity(m);
        let mut r1 = p.clone();
        for i in (0..k.bits()).rev() {
            if k.bit(i) {
                r0 = Self::xadd(&r0, &r1, p);
                r1 = self.xdbl(&r1);
            } else {
                r1 = Self::xadd(&r0, &r1, p);
                r0 = self.xdbl(&r0);
            }
        }
        r0
    }

    pub fn ladder_u64(&self, k: u64, p: &XOnlyPoint) -> XOnlyPoint {
        self.ladder(&BigUint::from(k), p)
    }

    /// Number of `F_p`-points, by summing Legendre symbols. Small moduli only.
    pub fn count_points(&self) -> Option<BigUint> {
        let p = self.modulus().to_u64()?;
        if p >= EXHAUSTIVE_COUNT_LIMIT {
            return None;
        }
        let m = self.modulus();
        // identity + one point per root of the rhs + two per nonzero square
        let mut count: i64 = 1;
        for x in 0..p {
            count += 1 + i64::from(self.rhs(&FieldElement::from_u64(x, m)).legendre());
        }
        Some(BigUint::from(count as u64))
    }

    /// Whether `#E(F_p) = p + 1`.
    ///
    /// Exact for `p < 2^20`. Above that, checks `[p+1]P = O` for points drawn
    /// on both the curve and its twist from a generator keyed on `A`.
    pub fn is_supersingular(&self) -> bool {
        if let Some(count) = self.count_points() {
            return count == self.modulus().curve_order();
        }
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&Sha256::digest(self.a.to_bytes()));
        let mut rng = ChaCha20Rng::from_seed(seed);
        let order = self.modulus().curve_order();
        let mut probed = 0;
        while probed < SUPERSINGULAR_PROBES {
            let x = FieldElement::random(&mut rng, self.modulus()).expect("chacha never fails");
            if self.rhs(&x).is_zero() {
                continue;
            }
            if !self.ladder(&order, &XOnlyPoint::from_affine(x)).is_identity() {
                return false;
            }
            probed += 1;
        }
        true
    }

    /// Random x-only point of exact order `ell` on the requested side.
    pub fn sample_point_of_order<R: RngCore + ?Sized>(
        &self,
        ell: u64,
        side: Side,
        rng: &mut R,
    ) -> Result<XOnlyPoint> {
        let order = self.modulus().curve_order();
        let ell_big = BigUint::from(ell);
        if ell < 3 || !(&order % &ell_big).is_zero() {
            return Err(Error::PrimeNotInCurveOrder { ell });
        }
        let cofactor = &order / &ell_big;
        for _ in 0..POINT_RETRY_BUDGET {
            let x = FieldElement::random(rng, self.modulus())?;
            if self.rhs(&x).legendre() != side.legendre() {
                continue;
            }
            let q = self.ladder(&cofactor, &XOnlyPoint::from_affine(x));
            if q.is_identity() {
                continue;
            }
            if !self.ladder(&ell_big, &q).is_identity() {
                return Err(Error::NotSupersingular);
            }
            return Ok(q);
        }
        Err(Error::PointSamplingExhausted { ell, attempts: POINT_RETRY_BUDGET })
    }

    /// Codomain of the isogeny with kernel `<kernel_gen>`, of odd prime degree `ell`.
    ///
    /// With `x_1..x_d` the affine x-coordinates of `K, 2K, .., dK`, `d = (ell-1)/2`:
    /// `A' = pi^2 (A - 6 sigma)`, `pi = prod x_i`, `sigma = sum (x_i - 1/x_i)`.
    pub fn velu_isogeny(&self, kernel_gen: &XOnlyPoint, ell: u64) -> Result<MontgomeryCurve> {
        if ell < 3 || ell.is_multiple_of(2) || kernel_gen.is_identity() {
            return Err(Error::BadKernel { ell });
        }
        if !self.ladder_u64(ell, kernel_gen).is_identity() {
            return Err(Error::BadKernel { ell });
        }
        let m = self.modulus();
        let d = (ell - 1) / 2;
        let mut multiples = Vec::with_capacity(d as usize);
        multiples.push(kernel_gen.clone());
        if d >= 2 {
            multiples.push(self.xdbl(kernel_gen));
        }
        while (multiples.len() as u64) < d {
            let n = multiples.len();
            multiples.push(Self::xadd(&multiples[n - 1], kernel_gen, &multiples[n - 2]));
        }
        let mut pi = FieldElement::one(m);
        let mut sigma = FieldElement::zero(m);
        for point in &multiples {
            // Odd order: no multiple below ell is the identity or (0, 0).
            let x = point.affine_x().ok_or(Error::BadKernel { ell })?;
            let x_inv = x.inv().map_err(|_| Error::BadKernel { ell })?;
            pi = &pi * &x;
            sigma = &sigma + &(&x - &x_inv);
        }
        let six_sigma = &FieldElement::from_u64(6, m) * &sigma;
        MontgomeryCurve::new(&pi.square() * &(&self.a - &six_sigma))
    }
}

impl PartialEq for MontgomeryCurve {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

impl Eq for MontgomeryCurve {}

impl fmt::Debug for MontgomeryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E[A={}]", self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::PrimeModulus;
    use std::sync::Arc;

    fn f419() -> Modulus {
        Arc::new(PrimeModulus::from_ells(&[3, 5, 7]).unwrap())
    }

    fn curve(a: u64, m: &Modulus) -> MontgomeryCurve {
        MontgomeryCurve::new(FieldElement::from_u64(a, m)).unwrap()
    }

    #[test]
    fn singular_rejected() {
        let m = f419();
        assert_eq!(MontgomeryCurve::new(FieldElement::from_u64(2, &m)).unwrap_err(), Error::SingularCurve);
        assert_eq!(MontgomeryCurve::new(FieldElement::from_u64(417, &m)).unwrap_err(), Error::SingularCurve);
    }

    #[test]
    fn base_curve_has_p_plus_one_points() {
        let m = f419();
        let e0 = curve(0, &m);
        assert_eq!(e0.count_points(), Some(BigUint::from(420u32)));
        assert!(e0.is_supersingular());
    }

    #[test]
    fn ladder_identity_and_order() {
        let m = f419();
        let e0 = curve(0, &m);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = XOnlyPoint::from_affine(FieldElement::random(&mut rng, &m).unwrap());
            assert!(e0.ladder_u64(1, &p).same_x(&p));
            assert!(e0.ladder_u64(0, &p).is_identity());
            assert!(e0.ladder_u64(420, &p).is_identity());
        }
    }

    #[test]
    fn order_two_point() {
        let m = f419();
        let e0 = curve(0, &m);
        let t = XOnlyPoint::from_affine(FieldElement::zero(&m));
        assert!(e0.ladder_u64(2, &t).is_identity());
        assert!(e0.ladder_u64(7, &t).same_x(&t));
    }

    #[test]
    fn sampling_order_three() {
        let m = f419();
        let e0 = curve(0, &m);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for side in [Side::Curve, Side::Twist] {
            let q = e0.sample_point_of_order(3, side, &mut rng).unwrap();
            assert!(!q.is_identity());
            assert!(e0.ladder_u64(3, &q).is_identity());
        }
        assert_eq!(
            e0.sample_point_of_order(11, Side::Curve, &mut rng).unwrap_err(),
            Error::PrimeNotInCurveOrder { ell: 11 }
        );
    }

    #[test]
    fn velu_rejects_identity_and_wrong_order() {
        let m = f419();
        let e0 = curve(0, &m);
        assert_eq!(e0.velu_isogeny(&XOnlyPoint::identity(&m), 3).unwrap_err(), Error::BadKernel { ell: 3 });
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let q5 = e0.sample_point_of_order(5, Side::Curve, &mut rng).unwrap();
        assert!(e0.velu_isogeny(&q5, 3).is_err());
    }

    #[test]
    fn velu_independent_of_generator_choice() {
        let m = f419();
        let e0 = curve(0, &m);
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for ell in [3u64, 5, 7] {
            for side in [Side::Curve, Side::Twist] {
                let k = e0.sample_point_of_order(ell, side, &mut rng).unwrap();
                let a = e0.velu_isogeny(&k, ell).unwrap();
                let b = e0.velu_isogeny(&e0.xdbl(&k), ell).unwrap();
                assert_eq!(a, b);
                assert!(a.is_supersingular());
            }
        }
    }
}
