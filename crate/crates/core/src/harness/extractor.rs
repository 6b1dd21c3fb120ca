//! The extraction identity `[-z_i]Y_i = [s_i + v_i]E_0`.
//!
//! A forger that answers the same commitment under two hashes reveals
//! `s_i + v_i`; that argument rests on this identity, which holds for real
//! signatures (`Y_i = [b_i]Ê_i`, `z_i = b_i - s_i`) and simulated ones
//! (`Y_i = [r_i]E_i`, `z_i = r_i - v_i`) alike.

use num_bigint::BigUint;
use rand::RngCore;

use crate::action::{Scalar, SetElement};
use crate::error::{Error, Result};
use crate::sdvs::{hazmat, sig_keygen, ver_keygen, PublicParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureSource {
    Real,
    Simulated,
}

/// Checks `[-z_i]Y_i = [s_i + v_i]E_0` for every index.
pub fn extraction_identity(
    pp: &PublicParams,
    sk_s: &[Scalar],
    sk_v: &[Scalar],
    z: &[BigUint],
    y: &[SetElement],
) -> Result<bool> {
    let n = pp.eta;
    if sk_s.len() != n || sk_v.len() != n || z.len() != n || y.len() != n {
        return Err(Error::Shape { expected: n, got: z.len().min(y.len()).min(sk_s.len()).min(sk_v.len()) });
    }
    let b = &pp.backend;
    let e0 = pp.base();
    for i in 0..n {
        let lhs = b.act(&b.neg(&Scalar(&z[i] % pp.order())), &y[i])?;
        let rhs = b.act(&b.add(&sk_s[i], &sk_v[i]), &e0)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signs or simulates a random message under fresh keys, recomputes each
/// `Y_i` from the nonces and checks the identity.
pub fn extractor_check<R: RngCore + ?Sized>(pp: &PublicParams, source: SignatureSource, rng: &mut R) -> Result<bool> {
    let signer = sig_keygen(pp, rng)?;
    let verifier = ver_keygen(pp, rng)?;
    let mut m = [0u8; 32];
    rng.fill_bytes(&mut m);
    let (t, committed_to) = match source {
        SignatureSource::Real => (hazmat::sign_with_nonces(pp, &signer.sk, &verifier.pk, &m, rng)?, &verifier.pk),
        SignatureSource::Simulated => (hazmat::simulate_with_nonces(pp, &verifier.sk, &signer.pk, &m, rng)?, &signer.pk),
    };
    let y = t
        .nonces
        .iter()
        .zip(committed_to)
        .map(|(k, x)| pp.backend.act(k, x))
        .collect::<Result<Vec<_>>>()?;
    if y != t.y {
        return Ok(false);
    }
    extraction_identity(pp, &signer.sk, &verifier.sk, &t.signature.z, &y)
}
