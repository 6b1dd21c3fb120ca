//! Privacy of the signer's identity: given a signature for a known verifier,
//! which of two signers produced it?
//!
//! The distinguisher receives both signer key pairs and the verifier's public
//! key. Before the challenge it may query simulation and verification under
//! either signer. After the challenge only verification remains, and a guess
//! does not count if the challenge pair was ever submitted for verification.

use std::collections::HashSet;

use num_integer::Integer;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha20Rng;

use super::{count_successes, Expectation, Experiment, ExperimentVerdict};
use crate::action::{Scalar, SetElement};
use crate::encoding::encode_signature;
use crate::error::{Error, Result};
use crate::sdvs::{hash_transcript, sig_keygen, sign, simulate, ver_keygen, verify, KeyPair, PublicParams, Signature, Transcript};

/// Setup material handed to the distinguisher.
pub struct PsiView<'a> {
    pub pp: &'a PublicParams,
    pub sk_s0: &'a [Scalar],
    pub pk_s0: &'a [SetElement],
    pub sk_s1: &'a [Scalar],
    pub pk_s1: &'a [SetElement],
    pub pk_v: &'a [SetElement],
    /// Only for the white-box reference strategy.
    pub sk_v: Option<&'a [Scalar]>,
}

impl PsiView<'_> {
    pub fn pk_s(&self, bit: u8) -> &[SetElement] {
        if bit == 0 { self.pk_s0 } else { self.pk_s1 }
    }

    pub fn sk_s(&self, bit: u8) -> &[Scalar] {
        if bit == 0 { self.sk_s0 } else { self.sk_s1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Query,
    Challenged,
}

pub struct PsiOracles<'a, R: RngCore> {
    pp: &'a PublicParams,
    signers: [&'a KeyPair; 2],
    verifier: &'a KeyPair,
    rng: &'a mut R,
    b: u8,
    phase: Phase,
    budget: usize,
    used: usize,
    /// Canonical `(m, sigma)` encodings submitted to verification, any bit.
    submitted: HashSet<(Vec<u8>, Vec<u8>)>,
    challenge: Option<(Vec<u8>, Signature)>,
}

impl<'a, R: RngCore> PsiOracles<'a, R> {
    pub fn new(pp: &'a PublicParams, signers: [&'a KeyPair; 2], verifier: &'a KeyPair, rng: &'a mut R, budget: usize) -> Self {
        let b = rng.gen_range(0..2);
        PsiOracles { pp, signers, verifier, rng, b, phase: Phase::Query, budget, used: 0, submitted: HashSet::new(), challenge: None }
    }

    fn charge(&mut self) -> Result<()> {
        if self.used == self.budget {
            return Err(Error::QueryBudgetExceeded(self.budget));
        }
        self.used += 1;
        Ok(())
    }

    fn signer(&self, bit: u8) -> Result<&'a KeyPair> {
        match bit {
            0 | 1 => Ok(self.signers[bit as usize]),
            _ => Err(Error::InvalidParams("signer bit must be 0 or 1".into())),
        }
    }

    /// `Simul(sk_V, pk_S_bit, m)`. Only before the challenge.
    pub fn simulate(&mut self, m: &[u8], bit: u8) -> Result<Signature> {
        if self.phase != Phase::Query {
            return Err(Error::PhaseViolation("simulation query after the challenge"));
        }
        self.charge()?;
        let signer = self.signer(bit)?;
        simulate(self.pp, &self.verifier.sk, &signer.pk, m, self.rng)
    }

    /// `Verify(sk_V, pk_S_bit, sigma, m)`.
    pub fn verify(&mut self, m: &[u8], sig: &Signature, bit: u8) -> Result<bool> {
        self.charge()?;
        let signer = self.signer(bit)?;
        if let Ok(bytes) = encode_signature(self.pp, sig) {
            self.submitted.insert((m.to_vec(), bytes));
        }
        Ok(verify(self.pp, &self.verifier.sk, &signer.pk, m, sig).is_accept())
    }

    /// Signs `m` under both signers and returns the one selected by the
    /// hidden bit. Callable once.
    pub fn challenge(&mut self, m: &[u8]) -> Result<Signature> {
        if self.phase != Phase::Query {
            return Err(Error::PhaseViolation("second challenge"));
        }
        self.phase = Phase::Challenged;
        let s0 = sign(self.pp, &self.signers[0].sk, &self.verifier.pk, m, self.rng)?;
        let s1 = sign(self.pp, &self.signers[1].sk, &self.verifier.pk, m, self.rng)?;
        let chosen = if self.b == 0 { s0 } else { s1 };
        self.challenge = Some((m.to_vec(), chosen.clone()));
        Ok(chosen)
    }

    /// Scores a final guess.
    fn settle(&self, guess: u8) -> Result<bool> {
        let (m, sig) = self.challenge.as_ref().ok_or(Error::PhaseViolation("no challenge was requested"))?;
        let fresh = !self.submitted.contains(&(m.clone(), encode_signature(self.pp, sig)?));
        Ok(guess == self.b && fresh)
    }
}

pub trait PsiDistinguisher: Sync {
    fn name(&self) -> String;
    fn expectation(&self) -> Expectation;

    fn needs_verifier_key(&self) -> bool {
        false
    }

    fn distinguish(&self, view: &PsiView<'_>, oracles: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8>;
}

#[derive(Clone, Copy, Debug)]
pub struct PsiConfig {
    pub trials: u64,
    pub query_budget: usize,
    pub seed: [u8; 32],
}

pub fn run_psi(pp: &PublicParams, dist: &dyn PsiDistinguisher, config: PsiConfig) -> Result<ExperimentVerdict> {
    let successes = count_successes(config.trials, config.seed, |crng, arng| {
        let s0 = sig_keygen(pp, crng)?;
        let s1 = sig_keygen(pp, crng)?;
        let v = ver_keygen(pp, crng)?;
        let view = PsiView {
            pp,
            sk_s0: &s0.sk,
            pk_s0: &s0.pk,
            sk_s1: &s1.sk,
            pk_s1: &s1.pk,
            pk_v: &v.pk,
            sk_v: dist.needs_verifier_key().then_some(v.sk.as_slice()),
        };
        let mut oracles = PsiOracles::new(pp, [&s0, &s1], &v, crng, config.query_budget);
        let guess = dist.distinguish(&view, &mut oracles, arng)?;
        oracles.settle(guess)
    })?;
    Ok(ExperimentVerdict::judge(Experiment::Psi, dist.name(), config.trials, successes, dist.expectation(), pp.lambda))
}

fn random_message(rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut m = vec![0u8; 16];
    rng.fill_bytes(&mut m);
    m
}

/// Checks `h = H([k_i]X_i || m)` for the given scalars and elements.
fn hash_matches(pp: &PublicParams, k: &[Scalar], x: &[SetElement], m: &[u8], sig: &Signature) -> Result<bool> {
    let y = k.iter().zip(x).map(|(k, x)| pp.backend.act(k, x)).collect::<Result<Vec<_>>>()?;
    Ok(hash_transcript(pp, &Transcript { y: &y, m })? == sig.h)
}

fn responses(sig: &Signature) -> Vec<Scalar> {
    sig.z.iter().cloned().map(Scalar).collect()
}

/// Recomputes `[v_i][z_i]E_i^(j)` for both signers with the given verifier
/// scalars; falls back to a coin when neither or both match.
fn recompute_with(view: &PsiView<'_>, v: &[Scalar], m: &[u8], sig: &Signature, rng: &mut ChaCha20Rng) -> Result<u8> {
    let pp = view.pp;
    let z = responses(sig);
    let mut hits = [false; 2];
    for j in 0..2u8 {
        let x = z.iter().zip(view.pk_s(j)).map(|(z, e)| pp.backend.act(z, e)).collect::<Result<Vec<_>>>()?;
        hits[j as usize] = hash_matches(pp, v, &x, m, sig)?;
    }
    Ok(match hits {
        [true, false] => 0,
        [false, true] => 1,
        _ => rng.gen_range(0..2),
    })
}

pub struct ConstantGuess(pub u8);

impl PsiDistinguisher for ConstantGuess {
    fn name(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, _: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        o.challenge(&random_message(rng))?;
        Ok(self.0)
    }
}

/// The recomputation attack with a uniformly guessed verifier key.
pub struct GuessedVerifierKey;

impl PsiDistinguisher for GuessedVerifierKey {
    fn name(&self) -> String {
        "guessed-verifier-key".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, view: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let m = random_message(rng);
        let sig = o.challenge(&m)?;
        let guess = (0..view.pp.eta).map(|_| view.pp.backend.sample_scalar(rng)).collect::<Result<Vec<_>>>()?;
        recompute_with(view, &guess, &m, &sig, rng)
    }
}

/// Checks `h` against `[z_i]E_i^(j)` directly, as if no verifier key were
/// involved.
pub struct PublicRecompute;

impl PsiDistinguisher for PublicRecompute {
    fn name(&self) -> String {
        "public-recompute".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, view: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let m = random_message(rng);
        let sig = o.challenge(&m)?;
        let zero = vec![Scalar::from_u64(0); view.pp.eta];
        let z = responses(&sig);
        let mut hits = [false; 2];
        for j in 0..2u8 {
            let x = z.iter().zip(view.pk_s(j)).map(|(z, e)| view.pp.backend.act(z, e)).collect::<Result<Vec<_>>>()?;
            hits[j as usize] = hash_matches(view.pp, &zero, &x, &m, &sig)?;
        }
        Ok(if hits[1] && !hits[0] { 1 } else if hits[0] && !hits[1] { 0 } else { rng.gen_range(0..2) })
    }
}

pub struct ZParity;

impl PsiDistinguisher for ZParity {
    fn name(&self) -> String {
        "z-parity".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, _: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let sig = o.challenge(&random_message(rng))?;
        Ok(u8::from(sig.z[0].is_odd()))
    }
}

/// Simulates the challenge message under both signers first and guesses the
/// signer whose simulated hash shares the low bit of the challenge hash.
pub struct SimulationProbe;

impl PsiDistinguisher for SimulationProbe {
    fn name(&self) -> String {
        "simulation-probe".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, _: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let m = random_message(rng);
        let sim0 = o.simulate(&m, 0)?;
        let sim1 = o.simulate(&m, 1)?;
        let sig = o.challenge(&m)?;
        let bit = |s: &Signature| s.h[0] & 1;
        Ok(match (bit(&sim0) == bit(&sig), bit(&sim1) == bit(&sig)) {
            (true, false) => 0,
            (false, true) => 1,
            _ => rng.gen_range(0..2),
        })
    }
}

/// Asks the verification oracle about the challenge itself. Always right,
/// never counted.
pub struct OracleCheater;

impl PsiDistinguisher for OracleCheater {
    fn name(&self) -> String {
        "oracle-cheater".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::NoSuccess
    }

    fn distinguish(&self, _: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let m = random_message(rng);
        let sig = o.challenge(&m)?;
        Ok(if o.verify(&m, &sig, 0)? { 0 } else { 1 })
    }
}

/// Reference strategy holding the verifier key: the recomputation attack
/// with the true `v_i`.
pub struct WhiteBox;

impl PsiDistinguisher for WhiteBox {
    fn name(&self) -> String {
        "white-box-verifier-key".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::Winnable { min_advantage: 0.45 }
    }

    fn needs_verifier_key(&self) -> bool {
        true
    }

    fn distinguish(&self, view: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let m = random_message(rng);
        let sig = o.challenge(&m)?;
        recompute_with(view, view.sk_v.expect("verifier key requested"), &m, &sig, rng)
    }
}

/// Uses the signer secrets that the game hands out: a real signature from
/// signer `j` has `Y_i = [z_i + s_i^(j)]Ê_i`, which needs only `pk_V`.
///
/// This wins every trial, so signer privacy in this game holds only when the
/// signer secret keys stay hidden from the distinguisher.
pub struct SignerKeyRecompute;

impl PsiDistinguisher for SignerKeyRecompute {
    fn name(&self) -> String {
        "signer-key-recompute".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::Winnable { min_advantage: 0.45 }
    }

    fn distinguish(&self, view: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, rng: &mut ChaCha20Rng) -> Result<u8> {
        let pp = view.pp;
        let m = random_message(rng);
        let sig = o.challenge(&m)?;
        let z = responses(&sig);
        let mut hits = [false; 2];
        for j in 0..2u8 {
            let b: Vec<Scalar> = z.iter().zip(view.sk_s(j)).map(|(z, s)| pp.backend.add(z, s)).collect();
            hits[j as usize] = hash_matches(pp, &b, view.pk_v, &m, &sig)?;
        }
        Ok(match hits {
            [true, false] => 0,
            [false, true] => 1,
            _ => rng.gen_range(0..2),
        })
    }
}

/// Strategies that use no secret beyond what a third party could hold. Each
/// must stay within the fair-coin band.
pub fn builtin_psi_distinguishers() -> Vec<Box<dyn PsiDistinguisher>> {
    vec![
        Box::new(ConstantGuess(0)),
        Box::new(ConstantGuess(1)),
        Box::new(GuessedVerifierKey),
        Box::new(PublicRecompute),
        Box::new(ZParity),
        Box::new(SimulationProbe),
        Box::new(OracleCheater),
    ]
}

/// Strategies that hold a secret key and are expected to win.
pub fn reference_psi_distinguishers() -> Vec<Box<dyn PsiDistinguisher>> {
    vec![Box::new(WhiteBox), Box::new(SignerKeyRecompute)]
}
