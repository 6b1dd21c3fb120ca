//! Strong unforgeability under chosen-message attack.
//!
//! The challenger answers signing, simulation and verification queries,
//! records every `(m, sigma)` it hands out, and counts a forgery only when it
//! verifies and is not one of those pairs.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha20Rng;

use super::{count_successes, Expectation, Experiment, ExperimentVerdict, HashRecord, QueryLog};
use crate::action::{Scalar, SetElement};
use crate::error::{Error, Result};
use crate::sdvs::{hash_transcript, hazmat, sig_keygen, ver_keygen, verify, KeyPair, PublicParams, Signature, Transcript};

/// What the adversary is given at setup.
pub struct SufView<'a> {
    pub pp: &'a PublicParams,
    pub pk_s: &'a [SetElement],
    pub pk_v: &'a [SetElement],
}

/// Challenger-side oracles for one run.
pub struct SufOracles<'a, R: RngCore> {
    pp: &'a PublicParams,
    signer: &'a KeyPair,
    verifier: &'a KeyPair,
    rng: &'a mut R,
    log: QueryLog,
    budget: usize,
    used: usize,
}

impl<'a, R: RngCore> SufOracles<'a, R> {
    pub fn new(pp: &'a PublicParams, signer: &'a KeyPair, verifier: &'a KeyPair, rng: &'a mut R, budget: usize) -> Self {
        SufOracles { pp, signer, verifier, rng, log: QueryLog::default(), budget, used: 0 }
    }

    fn charge(&mut self) -> Result<()> {
        if self.used == self.budget {
            return Err(Error::QueryBudgetExceeded(self.budget));
        }
        self.used += 1;
        Ok(())
    }

    /// `[z_i]E_i` for an answer the challenger produced itself.
    fn aux(&self, sig: &Signature) -> Result<Vec<SetElement>> {
        sig.z
            .iter()
            .zip(&self.signer.pk)
            .map(|(z, e)| self.pp.backend.act(&Scalar(z.clone()), e))
            .collect()
    }

    fn answer(&mut self, m: &[u8], t: hazmat::Transcribed) -> Result<Signature> {
        self.log.record_pair(self.pp, m, &t.signature)?;
        let aux = self.aux(&t.signature)?;
        self.log.record_hash(HashRecord { m: m.to_vec(), y: t.y, h: t.signature.h.clone(), aux: Some(aux) });
        Ok(t.signature)
    }

    pub fn sign(&mut self, m: &[u8]) -> Result<Signature> {
        self.charge()?;
        let t = hazmat::sign_with_nonces(self.pp, &self.signer.sk, &self.verifier.pk, m, self.rng)?;
        self.answer(m, t)
    }

    pub fn simulate(&mut self, m: &[u8]) -> Result<Signature> {
        self.charge()?;
        let t = hazmat::simulate_with_nonces(self.pp, &self.verifier.sk, &self.signer.pk, m, self.rng)?;
        self.answer(m, t)
    }

    pub fn verify(&mut self, m: &[u8], sig: &Signature) -> Result<bool> {
        self.charge()?;
        Ok(verify(self.pp, &self.verifier.sk, &self.signer.pk, m, sig).is_accept())
    }

    /// The hash oracle. Free of charge; plain queries are logged without aux.
    pub fn hash(&mut self, y: &[SetElement], m: &[u8]) -> Result<Vec<u8>> {
        let h = hash_transcript(self.pp, &Transcript { y, m })?;
        self.log.record_hash(HashRecord { m: m.to_vec(), y: y.to_vec(), h: h.clone(), aux: None });
        Ok(h)
    }

    pub fn queries_used(&self) -> usize {
        self.used
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }
}

/// A forger. `rng` is the adversary's own randomness.
pub trait SufAdversary: Sync {
    fn name(&self) -> String;
    fn expectation(&self) -> Expectation;
    fn forge(
        &self,
        view: &SufView<'_>,
        oracles: &mut SufOracles<'_, ChaCha20Rng>,
        rng: &mut ChaCha20Rng,
    ) -> Result<(Vec<u8>, Signature)>;
}

#[derive(Clone, Copy, Debug)]
pub struct SufConfig {
    pub trials: u64,
    pub query_budget: usize,
    pub seed: [u8; 32],
}

/// Plays the game `config.trials` times with fresh keys each time.
pub fn run_suf_cma(pp: &PublicParams, adversary: &dyn SufAdversary, config: SufConfig) -> Result<ExperimentVerdict> {
    let successes = count_successes(config.trials, config.seed, |crng, arng| {
        let signer = sig_keygen(pp, crng)?;
        let verifier = ver_keygen(pp, crng)?;
        let view = SufView { pp, pk_s: &signer.pk, pk_v: &verifier.pk };
        let mut oracles = SufOracles::new(pp, &signer, &verifier, crng, config.query_budget);
        let (m, sig) = adversary.forge(&view, &mut oracles, arng)?;
        let fresh = !oracles.log().contains_pair(pp, &m, &sig);
        Ok(fresh && verify(pp, &verifier.sk, &signer.pk, &m, &sig).is_accept())
    })?;
    Ok(ExperimentVerdict::judge(
        Experiment::SufCma,
        adversary.name(),
        config.trials,
        successes,
        adversary.expectation(),
        pp.lambda,
    ))
}

fn random_message(rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut m = vec![0u8; 16];
    rng.fill_bytes(&mut m);
    m
}

/// Returns a queried pair verbatim, alternating between the two oracles.
pub struct Replay;

impl SufAdversary for Replay {
    fn name(&self) -> String {
        "replay".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::NoSuccess
    }

    fn forge(&self, _: &SufView<'_>, o: &mut SufOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<(Vec<u8>, Signature)> {
        let m = random_message(rng);
        let sig = if rng.gen() { o.sign(&m)? } else { o.simulate(&m)? };
        Ok((m, sig))
    }
}

/// Uniform `h` and `z` on a fresh message, no queries.
pub struct RandomForgery;

impl SufAdversary for RandomForgery {
    fn name(&self) -> String {
        "random-forgery".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::CollisionBudget
    }

    fn forge(&self, view: &SufView<'_>, _: &mut SufOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<(Vec<u8>, Signature)> {
        let pp = view.pp;
        let mut h = vec![0u8; pp.hash_len()];
        rng.fill_bytes(&mut h);
        let z = (0..pp.eta)
            .map(|_| pp.backend.sample_scalar(rng).map(|s| s.0))
            .collect::<Result<_>>()?;
        Ok((random_message(rng), Signature { h, z }))
    }
}

/// Adds one to a single response of a queried signature.
pub struct Rerandomize;

impl SufAdversary for Rerandomize {
    fn name(&self) -> String {
        "rerandomize".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::CollisionBudget
    }

    fn forge(&self, view: &SufView<'_>, o: &mut SufOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<(Vec<u8>, Signature)> {
        let pp = view.pp;
        let m = random_message(rng);
        let mut sig = o.sign(&m)?;
        let i = rng.gen_range(0..pp.eta);
        sig.z[i] = pp.backend.add(&Scalar(sig.z[i].clone()), &Scalar::from_u64(1)).0;
        Ok((m, sig))
    }
}

/// Presents a signature on one message as a signature on another.
pub struct MessageSwap;

impl SufAdversary for MessageSwap {
    fn name(&self) -> String {
        "message-swap".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::CollisionBudget
    }

    fn forge(&self, _: &SufView<'_>, o: &mut SufOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<(Vec<u8>, Signature)> {
        let m = random_message(rng);
        let sig = o.simulate(&m)?;
        let mut other = m;
        other[0] ^= 1;
        Ok((other, sig))
    }
}

pub fn builtin_suf_adversaries() -> Vec<Box<dyn SufAdversary>> {
    vec![Box::new(Replay), Box::new(RandomForgery), Box::new(Rerandomize), Box::new(MessageSwap)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::mock_params;
    use crate::random::trial_rng;
    use crate::sdvs::sign;
    use num_bigint::BigUint;

    struct Greedy;

    impl SufAdversary for Greedy {
        fn name(&self) -> String {
            "greedy".into()
        }

        fn expectation(&self) -> Expectation {
            Expectation::NoSuccess
        }

        fn forge(&self, _: &SufView<'_>, o: &mut SufOracles<'_, ChaCha20Rng>, _: &mut ChaCha20Rng) -> Result<(Vec<u8>, Signature)> {
            loop {
                o.sign(b"again")?;
            }
        }
    }

    fn config(trials: u64) -> SufConfig {
        SufConfig { trials, query_budget: 8, seed: [3; 32] }
    }

    #[test]
    fn oracle_answers_match_direct_signing() {
        let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
        let mut rng = trial_rng([1; 32], 0);
        let signer = sig_keygen(&pp, &mut rng).unwrap();
        let verifier = ver_keygen(&pp, &mut rng).unwrap();
        let mut direct_rng = rng.clone();
        let mut o = SufOracles::new(&pp, &signer, &verifier, &mut rng, 4);
        let via_oracle = o.sign(b"msg").unwrap();
        let direct = sign(&pp, &signer.sk, &verifier.pk, b"msg", &mut direct_rng).unwrap();
        assert_eq!(via_oracle, direct);
        assert!(o.log().contains_pair(&pp, b"msg", &direct));
        assert_eq!(o.log().hlist().len(), 1);
        assert!(o.log().hlist()[0].aux.is_some());
    }

    #[test]
    fn budget_is_enforced() {
        let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
        assert_eq!(run_suf_cma(&pp, &Greedy, config(1)).unwrap_err(), Error::QueryBudgetExceeded(8));
    }

    #[test]
    fn replay_never_wins() {
        let pp = mock_params(2, 16, BigUint::from(97u32)).unwrap();
        let v = run_suf_cma(&pp, &Replay, config(500)).unwrap();
        assert_eq!(v.successes, 0);
        assert!(v.pass);
    }
}
