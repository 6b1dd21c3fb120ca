//! Non-transferability: can anyone but the verifier tell a real signature
//! from one the verifier simulated?
//!
//! Each trial signs and simulates the distinguisher's message, hands over one
//! of the two at random and scores the guess. Bit 0 is the real signature.

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha20Rng;

use super::{count_successes, Expectation, Experiment, ExperimentVerdict};
use crate::action::{Scalar, SetElement};
use crate::encoding::encode_signature;
use crate::error::Result;
use crate::random::trial_rng;
use crate::sdvs::{hash_transcript, sig_keygen, sign, simulate, ver_keygen, verify, KeyPair, PublicParams, Signature, Transcript};

/// What a distinguisher sees. `sk_v` is only filled for strategies that ask
/// for it.
pub struct NtView<'a> {
    pub pp: &'a PublicParams,
    pub pk_s: &'a [SetElement],
    pub pk_v: &'a [SetElement],
    pub sk_v: Option<&'a [Scalar]>,
}

pub trait NtDistinguisher: Sync {
    fn name(&self) -> String;

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn needs_verifier_key(&self) -> bool {
        false
    }

    fn choose_message(&self, rng: &mut ChaCha20Rng) -> Vec<u8> {
        let mut m = vec![0u8; 16];
        rng.fill_bytes(&mut m);
        m
    }

    fn guess(&self, view: &NtView<'_>, m: &[u8], sig: &Signature, rng: &mut ChaCha20Rng) -> Result<u8>;
}

#[derive(Clone, Copy, Debug)]
pub struct NtConfig {
    pub trials: u64,
    pub seed: [u8; 32],
    /// Generate new keys every trial instead of once per run.
    pub fresh_keys: bool,
}

fn keypairs(pp: &PublicParams, rng: &mut ChaCha20Rng) -> Result<(KeyPair, KeyPair)> {
    Ok((sig_keygen(pp, rng)?, ver_keygen(pp, rng)?))
}

pub fn run_nt(pp: &PublicParams, dist: &dyn NtDistinguisher, config: NtConfig) -> Result<ExperimentVerdict> {
    let fixed = if config.fresh_keys { None } else { Some(keypairs(pp, &mut trial_rng(config.seed, u64::MAX))?) };
    let successes = count_successes(config.trials, config.seed, |crng, arng| {
        let owned;
        let (signer, verifier) = match &fixed {
            Some((s, v)) => (s, v),
            None => {
                owned = keypairs(pp, crng)?;
                (&owned.0, &owned.1)
            }
        };
        let m = dist.choose_message(arng);
        let real = sign(pp, &signer.sk, &verifier.pk, &m, crng)?;
        let simulated = simulate(pp, &verifier.sk, &signer.pk, &m, crng)?;
        let b: u8 = crng.gen_range(0..2);
        let challenge = if b == 0 { real } else { simulated };
        let view = NtView {
            pp,
            pk_s: &signer.pk,
            pk_v: &verifier.pk,
            sk_v: dist.needs_verifier_key().then_some(verifier.sk.as_slice()),
        };
        Ok(dist.guess(&view, &m, &challenge, arng)? == b)
    })?;
    Ok(ExperimentVerdict::judge(Experiment::Nt, dist.name(), config.trials, successes, dist.expectation(), pp.lambda))
}

fn low_bit(v: &BigUint) -> u8 {
    u8::from(v.is_odd())
}

pub struct Constant(pub u8);

impl NtDistinguisher for Constant {
    fn name(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn guess(&self, _: &NtView<'_>, _: &[u8], _: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(self.0)
    }
}

/// Parity of the first response.
pub struct ZParity;

impl NtDistinguisher for ZParity {
    fn name(&self) -> String {
        "z-parity".into()
    }

    fn guess(&self, _: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(low_bit(&sig.z[0]))
    }
}

/// Whether the first response lies in the upper half of `Z_N`.
pub struct ZThreshold;

impl NtDistinguisher for ZThreshold {
    fn name(&self) -> String {
        "z-threshold".into()
    }

    fn guess(&self, view: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(u8::from(sig.z[0] >= (view.pp.order() >> 1)))
    }
}

pub struct HashParity;

impl NtDistinguisher for HashParity {
    fn name(&self) -> String {
        "hash-parity".into()
    }

    fn guess(&self, _: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(sig.h.last().map_or(0, |b| b & 1))
    }
}

pub struct ZHashXor;

impl NtDistinguisher for ZHashXor {
    fn name(&self) -> String {
        "z-hash-xor".into()
    }

    fn guess(&self, _: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        let z = sig.z.iter().fold(0u8, |acc, z| acc ^ low_bit(z));
        Ok(z ^ (sig.h[0] & 1))
    }
}

pub struct ZModThree;

impl NtDistinguisher for ZModThree {
    fn name(&self) -> String {
        "z-mod-three".into()
    }

    fn guess(&self, _: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(u8::from((&sig.z[0] % 3u32) == BigUint::from(0u32)))
    }
}

/// Recomputes `H([z_i]E_i || m)` from public data and guesses "real" when it
/// matches `h`.
pub struct PublicRecompute;

impl NtDistinguisher for PublicRecompute {
    fn name(&self) -> String {
        "public-recompute".into()
    }

    fn guess(&self, view: &NtView<'_>, m: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        let y = sig
            .z
            .iter()
            .zip(view.pk_s)
            .map(|(z, e)| view.pp.backend.act(&Scalar(z.clone()), e))
            .collect::<Result<Vec<_>>>()?;
        let h = hash_transcript(view.pp, &Transcript { y: &y, m })?;
        Ok(u8::from(h != sig.h))
    }
}

/// Holds the verifier key and reports the verification bit.
pub struct VerifyBit;

impl NtDistinguisher for VerifyBit {
    fn name(&self) -> String {
        "verify-bit".into()
    }

    fn needs_verifier_key(&self) -> bool {
        true
    }

    fn guess(&self, view: &NtView<'_>, m: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        let sk_v = view.sk_v.expect("verifier key requested");
        Ok(1 - verify(view.pp, sk_v, view.pk_s, m, sig).bit())
    }
}

/// Parity of all bytes of the serialized signature.
pub struct EncodedByteParity;

impl NtDistinguisher for EncodedByteParity {
    fn name(&self) -> String {
        "encoded-byte-parity".into()
    }

    fn guess(&self, view: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> Result<u8> {
        Ok(encode_signature(view.pp, sig)?.iter().fold(0, |acc, b| acc ^ b).count_ones() as u8 & 1)
    }
}

/// The ten fixed strategies run by default.
pub fn builtin_nt_distinguishers() -> Vec<Box<dyn NtDistinguisher>> {
    vec![
        Box::new(Constant(0)),
        Box::new(Constant(1)),
        Box::new(ZParity),
        Box::new(ZThreshold),
        Box::new(HashParity),
        Box::new(ZHashXor),
        Box::new(ZModThree),
        Box::new(PublicRecompute),
        Box::new(VerifyBit),
        Box::new(EncodedByteParity),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::mock_params;

    #[test]
    fn ten_distinct_strategies() {
        let all = builtin_nt_distinguishers();
        let mut names: Vec<_> = all.iter().map(|d| d.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 10);
    }

    #[test]
    fn constant_guess_scores_near_half() {
        let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
        let config = NtConfig { trials: 2000, seed: [9; 32], fresh_keys: true };
        let v = run_nt(&pp, &Constant(0), config).unwrap();
        assert!(v.pass, "{}", v.report_line());
        assert_eq!(v.trials, 2000);
    }

    #[test]
    fn runs_are_reproducible() {
        let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
        let config = NtConfig { trials: 300, seed: [4; 32], fresh_keys: false };
        let a = run_nt(&pp, &ZParity, config).unwrap();
        let b = run_nt(&pp, &ZParity, config).unwrap();
        assert_eq!(a.successes, b.successes);
    }
}
