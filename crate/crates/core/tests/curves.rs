//! Montgomery arithmetic and isogenies against schoolbook references in
//! plain machine-word arithmetic mod 419.

use std::sync::Arc;

use csisdvs::fp::{FieldElement, Modulus, PrimeModulus};
use csisdvs::montgomery::{MontgomeryCurve, Side, XOnlyPoint};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const P: u64 = 419;

fn m419() -> Modulus {
    Arc::new(PrimeModulus::from_ells(&[3, 5, 7]).unwrap())
}

fn curve(a: u64, m: &Modulus) -> MontgomeryCurve {
    MontgomeryCurve::new(FieldElement::from_u64(a, m)).unwrap()
}

// ---- reference arithmetic mod P ----

fn md(x: i128) -> u64 {
    x.rem_euclid(P as i128) as u64
}

fn mul(a: u64, b: u64) -> u64 {
    a * b % P
}

fn pw(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    assert_ne!(a % P, 0);
    pw(a, P - 2)
}

fn is_square(a: u64) -> bool {
    a.is_multiple_of(P) || pw(a, (P - 1) / 2) == 1
}

fn sqrt(a: u64) -> Option<u64> {
    (0..P).find(|r| mul(*r, *r) == a % P)
}

fn mont_rhs(a: u64, x: u64) -> u64 {
    (mul(mul(x, x), x) + mul(a, mul(x, x)) + x) % P
}

fn count_montgomery(a: u64) -> u64 {
    // point at infinity plus affine points
    1 + (0..P)
        .map(|x| {
            let r = mont_rhs(a, x);
            if r == 0 { 1 } else if is_square(r) { 2 } else { 0 }
        })
        .sum::<u64>()
}

/// Affine doubling on y^2 = x^3 + A x^2 + x, needing only y^2.
fn affine_double_x(a: u64, x: u64) -> Option<u64> {
    let y2 = mont_rhs(a, x);
    if y2 == 0 {
        return None;
    }
    let num = (3 * mul(x, x) + 2 * mul(a, x) + 1) % P;
    let slope2 = mul(mul(num, num), inv(mul(4, y2)));
    Some(md(slope2 as i128 - a as i128 - 2 * x as i128))
}

// short Weierstrass y^2 = x^3 + a x + b, affine points, None is infinity
type Pt = Option<(u64, u64)>;

fn w_add(a: u64, p: Pt, q: Pt) -> Pt {
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return p.or(q);
    };
    let l = if x1 == x2 {
        if (y1 + y2) % P == 0 {
            return None;
        }
        mul((3 * mul(x1, x1) + a) % P, inv(2 * y1 % P))
    } else {
        mul(md(y2 as i128 - y1 as i128), inv(md(x2 as i128 - x1 as i128)))
    };
    let x3 = md(mul(l, l) as i128 - x1 as i128 - x2 as i128);
    let y3 = md(mul(l, md(x1 as i128 - x3 as i128)) as i128 - y1 as i128);
    Some((x3, y3))
}

fn w_mul(a: u64, k: u64, p: Pt) -> Pt {
    (0..k).fold(None, |acc, _| w_add(a, acc, p))
}

/// Schoolbook odd-degree Velu on the short Weierstrass model of the
/// Montgomery curve `A`, mapped back to every Montgomery coefficient of
/// the codomain with `B = 1`.
fn weierstrass_velu(a_mont: u64, ell: u64) -> Vec<u64> {
    let i3 = inv(3);
    let a = md(1 - mul(mul(a_mont, a_mont), i3) as i128);
    let b = md(mul(mul(2, pw(a_mont, 3)), inv(27)) as i128 - mul(a_mont, i3) as i128);
    let points: Vec<(u64, u64)> = (0..P)
        .flat_map(|x| {
            let r = (mul(mul(x, x), x) + mul(a, x) + b) % P;
            sqrt(r).into_iter().flat_map(move |y| [(x, y), (x, (P - y) % P)])
        })
        .collect();
    let gen = points
        .iter()
        .copied()
        .find(|&q| w_mul(a, ell, Some(q)).is_none())
        .expect("rational point of order ell");
    let (mut v, mut w) = (0u64, 0u64);
    for k in 1..=(ell - 1) / 2 {
        let (xq, yq) = w_mul(a, k, Some(gen)).unwrap();
        let vq = mul(2, (3 * mul(xq, xq) + a) % P);
        let uq = mul(4, mul(yq, yq));
        v = (v + vq) % P;
        w = (w + uq + mul(xq, vq)) % P;
    }
    let a2 = md(a as i128 - 5 * v as i128);
    let b2 = md(b as i128 - 7 * w as i128);
    let mut out = Vec::new();
    for alpha in 0..P {
        if !(mul(mul(alpha, alpha), alpha) + mul(a2, alpha) + b2).is_multiple_of(P) {
            continue;
        }
        let c2 = (3 * mul(alpha, alpha) + a2) % P;
        for c in (1..P).filter(|c| mul(*c, *c) == c2 && is_square(*c)) {
            out.push(mul(3 * alpha % P, inv(c)));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

// ---- tests ----

#[test]
fn weierstrass_reference_agrees_with_montgomery_velu() {
    let m = m419();
    let e0 = curve(0, &m);
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for (ell, frozen) in [(3u64, 158u64), (5, 199), (7, 75)] {
        assert_eq!(weierstrass_velu(0, ell), vec![frozen], "reference for l={ell}");
        let k = e0.sample_point_of_order(ell, Side::Curve, &mut rng).unwrap();
        let image = e0.velu_isogeny(&k, ell).unwrap();
        assert_eq!(image.coefficient().value(), &BigUint::from(frozen), "l={ell}");
        assert!(image.is_supersingular());
    }
}

#[test]
fn velu_reference_on_other_domains() {
    let m = m419();
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    for a in [158u64, 75, 410] {
        let e = curve(a, &m);
        assert!(e.is_supersingular());
        for ell in [3u64, 5, 7] {
            let k = e.sample_point_of_order(ell, Side::Curve, &mut rng).unwrap();
            let image: u64 = e.velu_isogeny(&k, ell).unwrap().coefficient().value().try_into().unwrap();
            assert_eq!(weierstrass_velu(a, ell), vec![image], "A={a} l={ell}");
        }
    }
}

#[test]
fn supersingular_set_by_exhaustive_count() {
    let m = m419();
    let mut ss = Vec::new();
    for a in 0..P {
        if a == 2 || a == P - 2 {
            assert!(MontgomeryCurve::new(FieldElement::from_u64(a, &m)).is_err());
            continue;
        }
        let count = count_montgomery(a);
        let c = curve(a, &m);
        assert_eq!(c.count_points(), Some(BigUint::from(count)), "A={a}");
        assert_eq!(c.is_supersingular(), count == P + 1, "A={a}");
        if count == P + 1 {
            ss.push(a);
        }
    }
    assert_eq!(ss.len(), 27);
    assert!(!ss.contains(&1));
}

#[test]
fn ladder_doubling_matches_affine_formula() {
    let m = m419();
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let coeffs = [0u64, 158, 199, 75, 1, 100];
    let mut checked = 0;
    while checked < 1000 {
        let a = coeffs[rng.gen_range(0..coeffs.len())];
        let x = rng.gen_range(0..P);
        let Some(expected) = affine_double_x(a, x) else { continue };
        let c = curve(a, &m);
        let got = c.ladder_u64(2, &XOnlyPoint::from_affine(FieldElement::from_u64(x, &m)));
        match got.affine_x() {
            Some(gx) => assert_eq!(gx.value(), &BigUint::from(expected), "A={a} x={x}"),
            None => panic!("doubling of a non-2-torsion point gave infinity"),
        }
        checked += 1;
    }
}

#[test]
fn ordinary_curve_detected() {
    let m = m419();
    assert_ne!(count_montgomery(1), P + 1);
    assert!(!curve(1, &m).is_supersingular());
}

#[test]
fn sampled_points_have_exact_order() {
    let m = m419();
    let e = curve(0, &m);
    let mut rng = ChaCha20Rng::seed_from_u64(14);
    for i in 0..1000 {
        let ell = [3u64, 5, 7][i % 3];
        let side = if i % 2 == 0 { Side::Curve } else { Side::Twist };
        let q = e.sample_point_of_order(ell, side, &mut rng).unwrap();
        assert!(!q.is_identity());
        assert!(e.ladder_u64(ell, &q).is_identity());
        let x = q.affine_x().unwrap();
        let expected = if side == Side::Curve { 1 } else { -1 };
        assert_eq!(e.rhs(&x).legendre(), expected);
    }
}

proptest! {
    #[test]
    fn ladder_is_a_homomorphism(x in 0u64..P, j in 0u64..500, k in 0u64..500) {
        let m = m419();
        let e = curve(0, &m);
        let pt = XOnlyPoint::from_affine(FieldElement::from_u64(x, &m));
        let lhs = e.ladder_u64(j, &e.ladder_u64(k, &pt));
        let rhs = e.ladder_u64(j * k, &pt);
        prop_assert!(lhs.same_x(&rhs));
        // every point of E_0 or its twist is killed by p + 1
        prop_assert!(e.ladder_u64(P + 1, &pt).is_identity());
        prop_assert!(e.ladder_u64(1, &pt).same_x(&pt));
    }
}
