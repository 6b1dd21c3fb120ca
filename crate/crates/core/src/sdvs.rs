//! Strong designated verifier signatures over a group action.
//!
//! A signer holding `s_i` with public `E_i = [s_i]E_0` signs for a verifier
//! whose public key is `Ê_i = [v_i]E_0`:
//!
//! ```text
//! Y_i = [b_i]Ê_i,   h = H(Y_1 || .. || Y_eta || m),   z_i = b_i - s_i mod N
//! ```
//!
//! Only the verifier can recompute `Y_i = [v_i + z_i]E_i`, and the verifier
//! can produce identically distributed signatures itself by starting from
//! `Y_i = [r_i]E_i` and setting `z_i = r_i - v_i`. That makes the signature
//! convincing to the verifier and worthless to anyone else.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::action::{ActionBackend, BackendKind, Scalar, SetElement};
use crate::error::{Error, Result};

/// Domain-separation tag prefixed to every transcript hash input.
pub const TRANSCRIPT_TAG: &[u8] = b"CSI-SDVS-v1";

/// Security levels accepted by [`setup`]. The 16-bit profile is UNSAFE-TOY
/// and exists so that hash-collision rates are measurable.
pub const TOY_LAMBDA: u32 = 16;
pub const STANDARD_LAMBDA: u32 = 128;

/// The hash function `H: {0,1}* -> {0,1}^lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HashId {
    /// SHA-256 truncated to the leading `lambda` bits.
    Sha256Trunc,
}

impl HashId {
    pub fn to_byte(self) -> u8 {
        match self {
            HashId::Sha256Trunc => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(HashId::Sha256Trunc),
            _ => None,
        }
    }

    pub fn output_bits(self) -> u32 {
        match self {
            HashId::Sha256Trunc => 256,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HashId::Sha256Trunc => "sha256-trunc",
        }
    }
}

/// Public parameters shared by all parties.
#[derive(Clone, Debug)]
pub struct PublicParams {
    pub backend: Arc<ActionBackend>,
    pub eta: usize,
    pub lambda: u32,
    pub hash_id: HashId,
}

impl PublicParams {
    pub fn order(&self) -> BigUint {
        self.backend.order()
    }

    pub fn base(&self) -> SetElement {
        self.backend.base()
    }

    pub fn hash_len(&self) -> usize {
        (self.lambda / 8) as usize
    }

    /// Whether artifacts made under these parameters must carry the
    /// UNSAFE-TOY marker.
    pub fn is_unsafe(&self) -> bool {
        self.lambda < STANDARD_LAMBDA || self.backend.kind() == BackendKind::ToyIsogeny
    }
}

/// Assembles and validates public parameters around an already-built backend.
pub fn setup(backend: ActionBackend, eta: usize, lambda: u32, hash_id: HashId) -> Result<PublicParams> {
    if eta == 0 {
        return Err(Error::InvalidParams("eta must be at least 1".into()));
    }
    if lambda != TOY_LAMBDA && lambda != STANDARD_LAMBDA {
        return Err(Error::InvalidParams(format!("lambda must be {TOY_LAMBDA} or {STANDARD_LAMBDA}, got {lambda}")));
    }
    if lambda > hash_id.output_bits() {
        return Err(Error::InvalidParams("hash output narrower than lambda".into()));
    }
    if !backend.contains(&backend.base()) {
        return Err(Error::InvalidParams("base element not in the acted-upon set".into()));
    }
    Ok(PublicParams { backend: Arc::new(backend), eta, lambda, hash_id })
}

/// `eta` secret scalars and the matching public set elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub sk: Vec<Scalar>,
    pub pk: Vec<SetElement>,
}

/// Key pair of a signer: `(s_i, E_i = [s_i]E_0)`.
pub type SignerKeyPair = KeyPair;
/// Key pair of a designated verifier: `(v_i, Ê_i = [v_i]E_0)`.
pub type VerifierKeyPair = KeyPair;

fn keygen<R: RngCore + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<KeyPair> {
    let e0 = pp.base();
    let mut sk = Vec::with_capacity(pp.eta);
    let mut pk = Vec::with_capacity(pp.eta);
    for _ in 0..pp.eta {
        let s = pp.backend.sample_scalar(rng)?;
        pk.push(pp.backend.act(&s, &e0)?);
        sk.push(s);
    }
    Ok(KeyPair { sk, pk })
}

pub fn sig_keygen<R: RngCore + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<SignerKeyPair> {
    keygen(pp, rng)
}

pub fn ver_keygen<R: RngCore + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<VerifierKeyPair> {
    keygen(pp, rng)
}

/// A designated verifier signature `(h, z)`.
///
/// `z` holds the values exactly as received; range checks against `N`
/// happen in [`verify`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub h: Vec<u8>,
    pub z: Vec<BigUint>,
}

/// Hash input `Y_1 || .. || Y_eta || m`.
#[derive(Clone, Debug)]
pub struct Transcript<'a> {
    pub y: &'a [SetElement],
    pub m: &'a [u8],
}

/// `H(Y_1 || .. || Y_eta || m)` over the canonical encoding
/// `tag || kind || eta (u32 BE) || Y_1 .. Y_eta (fixed width) || m`,
/// truncated to `lambda` bits.
pub fn hash_transcript(pp: &PublicParams, t: &Transcript<'_>) -> Result<Vec<u8>> {
    if t.y.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: t.y.len() });
    }
    let mut hasher = Sha256::new();
    hasher.update(TRANSCRIPT_TAG);
    hasher.update([pp.backend.kind().to_byte()]);
    hasher.update((pp.eta as u32).to_be_bytes());
    for y in t.y {
        hasher.update(pp.backend.transcript_bytes(y)?);
    }
    hasher.update(t.m);
    let digest = hasher.finalize();
    Ok(digest[..pp.hash_len()].to_vec())
}

/// Why a signature was rejected without evaluating the hash.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Malformed {
    HashLength { expected: usize, got: usize },
    ResponseCount { expected: usize, got: usize },
    ResponseOutOfRange { index: usize },
    KeyShape,
    ForeignKey,
}

/// Outcome of [`verify`]. Beyond the accept/reject bit it reports
/// malformed inputs, which are always rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    Malformed(Malformed),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn is_malformed(&self) -> bool {
        matches!(self, Verdict::Malformed(_))
    }

    /// The decision bit.
    pub fn bit(&self) -> u8 {
        u8::from(self.is_accept())
    }
}

fn check_key_shapes(pp: &PublicParams, sk: &[Scalar], pk: &[SetElement]) -> Result<()> {
    if sk.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: sk.len() });
    }
    if pk.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: pk.len() });
    }
    Ok(())
}

/// Shared core of signing and simulation: `Y_i = [n_i]X_i`, `z_i = n_i - k_i`.
fn respond(
    pp: &PublicParams,
    own_sk: &[Scalar],
    other_pk: &[SetElement],
    m: &[u8],
    nonces: &[Scalar],
) -> Result<(Signature, Vec<SetElement>)> {
    let y = nonces
        .iter()
        .zip(other_pk)
        .map(|(n, x)| pp.backend.act(n, x))
        .collect::<Result<Vec<_>>>()?;
    let h = hash_transcript(pp, &Transcript { y: &y, m })?;
    let z = nonces
        .iter()
        .zip(own_sk)
        .map(|(n, k)| pp.backend.sub(n, k).0)
        .collect();
    Ok((Signature { h, z }, y))
}

fn fresh_nonces<R: RngCore + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<Vec<Scalar>> {
    (0..pp.eta).map(|_| pp.backend.sample_scalar(rng)).collect()
}

/// Signs `m` for the verifier holding `pk_v`.
pub fn sign<R: RngCore + ?Sized>(
    pp: &PublicParams,
    sk_s: &[Scalar],
    pk_v: &[SetElement],
    m: &[u8],
    rng: &mut R,
) -> Result<Signature> {
    hazmat::sign_with_nonces(pp, sk_s, pk_v, m, rng).map(|t| t.signature)
}

/// Produces a signature on `m` that verifies under `pk_s`, using only the
/// verifier's secret.
pub fn simulate<R: RngCore + ?Sized>(
    pp: &PublicParams,
    sk_v: &[Scalar],
    pk_s: &[SetElement],
    m: &[u8],
    rng: &mut R,
) -> Result<Signature> {
    hazmat::simulate_with_nonces(pp, sk_v, pk_s, m, rng).map(|t| t.signature)
}

/// Checks a signature with the verifier's secret key. Never fails: shape and
/// range problems come back as [`Verdict::Malformed`].
pub fn verify(pp: &PublicParams, sk_v: &[Scalar], pk_s: &[SetElement], m: &[u8], sig: &Signature) -> Verdict {
    if check_key_shapes(pp, sk_v, pk_s).is_err() {
        return Verdict::Malformed(Malformed::KeyShape);
    }
    if sig.h.len() != pp.hash_len() {
        return Verdict::Malformed(Malformed::HashLength { expected: pp.hash_len(), got: sig.h.len() });
    }
    if sig.z.len() != pp.eta {
        return Verdict::Malformed(Malformed::ResponseCount { expected: pp.eta, got: sig.z.len() });
    }
    let n = pp.order();
    if let Some(index) = sig.z.iter().position(|z| z >= &n) {
        return Verdict::Malformed(Malformed::ResponseOutOfRange { index });
    }
    let mut y = Vec::with_capacity(pp.eta);
    for ((v, z), e) in sk_v.iter().zip(&sig.z).zip(pk_s) {
        let y_i = pp.backend.add(v, &Scalar(z.clone()));
        match pp.backend.act(&y_i, e) {
            Ok(el) => y.push(el),
            Err(_) => return Verdict::Malformed(Malformed::ForeignKey),
        }
    }
    match hash_transcript(pp, &Transcript { y: &y, m }) {
        Ok(h) if h == sig.h => Verdict::Accept,
        Ok(_) => Verdict::Reject,
        Err(_) => Verdict::Malformed(Malformed::ForeignKey),
    }
}

/// Signing and simulation with the ephemeral nonces exposed.
///
/// The nonces are as sensitive as the secret keys: anyone holding `b_i`
/// for one signature recovers `s_i = b_i - z_i`. These entry points exist for
/// the algebraic-identity checks and the security harness.
pub mod hazmat {
    use super::*;

    /// A signature together with the values that produced it.
    #[derive(Clone, Debug)]
    pub struct Transcribed {
        pub signature: Signature,
        /// `b_i` for real signatures, `r_i` for simulated ones.
        pub nonces: Vec<Scalar>,
        /// The committed elements `Y_i`.
        pub y: Vec<SetElement>,
    }

    pub fn sign_with_nonces<R: RngCore + ?Sized>(
        pp: &PublicParams,
        sk_s: &[Scalar],
        pk_v: &[SetElement],
        m: &[u8],
        rng: &mut R,
    ) -> Result<Transcribed> {
        check_key_shapes(pp, sk_s, pk_v)?;
        let nonces = fresh_nonces(pp, rng)?;
        let (signature, y) = respond(pp, sk_s, pk_v, m, &nonces)?;
        Ok(Transcribed { signature, nonces, y })
    }

    pub fn simulate_with_nonces<R: RngCore + ?Sized>(
        pp: &PublicParams,
        sk_v: &[Scalar],
        pk_s: &[SetElement],
        m: &[u8],
        rng: &mut R,
    ) -> Result<Transcribed> {
        check_key_shapes(pp, sk_v, pk_s)?;
        let nonces = fresh_nonces(pp, rng)?;
        let (signature, y) = respond(pp, sk_v, pk_s, m, &nonces)?;
        Ok(Transcribed { signature, nonces, y })
    }

    /// Deterministic signing with caller-chosen nonces.
    pub fn sign_with(
        pp: &PublicParams,
        sk_s: &[Scalar],
        pk_v: &[SetElement],
        m: &[u8],
        nonces: &[Scalar],
    ) -> Result<Signature> {
        check_key_shapes(pp, sk_s, pk_v)?;
        check_nonces(pp, nonces)?;
        respond(pp, sk_s, pk_v, m, nonces).map(|(s, _)| s)
    }

    /// Deterministic simulation with caller-chosen nonces.
    pub fn simulate_with(
        pp: &PublicParams,
        sk_v: &[Scalar],
        pk_s: &[SetElement],
        m: &[u8],
        nonces: &[Scalar],
    ) -> Result<Signature> {
        check_key_shapes(pp, sk_v, pk_s)?;
        check_nonces(pp, nonces)?;
        respond(pp, sk_v, pk_s, m, nonces).map(|(s, _)| s)
    }

    fn check_nonces(pp: &PublicParams, nonces: &[Scalar]) -> Result<()> {
        if nonces.len() != pp.eta {
            return Err(Error::Shape { expected: pp.eta, got: nonces.len() });
        }
        nonces.iter().try_for_each(|n| pp.backend.check_scalar(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::MockBackend;
    use crate::fp::PrimeModulus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mock_pp(n: u64, eta: usize, lambda: u32) -> PublicParams {
        let m = Arc::new(PrimeModulus::from_ells(&[3, 5, 7]).unwrap());
        let b = MockBackend::new(BigUint::from(n), m, BigUint::from(0u32)).unwrap();
        setup(ActionBackend::Mock(b), eta, lambda, HashId::Sha256Trunc).unwrap()
    }

    fn keys(pp: &PublicParams, sk: &[u64]) -> KeyPair {
        let sk: Vec<Scalar> = sk.iter().map(|&s| Scalar::from_u64(s)).collect();
        let pk = sk.iter().map(|s| pp.backend.act(s, &pp.base()).unwrap()).collect();
        KeyPair { sk, pk }
    }

    #[test]
    fn setup_rejects_bad_shapes() {
        let m = Arc::new(PrimeModulus::from_ells(&[3, 5, 7]).unwrap());
        let b = ActionBackend::Mock(MockBackend::new(BigUint::from(97u32), m, BigUint::from(0u32)).unwrap());
        assert!(setup(b.clone(), 0, 16, HashId::Sha256Trunc).is_err());
        assert!(setup(b.clone(), 1, 64, HashId::Sha256Trunc).is_err());
        assert!(setup(b, 1, 128, HashId::Sha256Trunc).is_ok());
    }

    #[test]
    fn fixed_nonce_responses() {
        let pp = mock_pp(97, 1, 128);
        let signer = keys(&pp, &[10]);
        let verifier = keys(&pp, &[20]);
        let sig = hazmat::sign_with(&pp, &signer.sk, &verifier.pk, b"m", &[Scalar::from_u64(3)]).unwrap();
        assert_eq!(sig.z, vec![BigUint::from(90u32)]);
        assert!(verify(&pp, &verifier.sk, &signer.pk, b"m", &sig).is_accept());
        let sim = hazmat::simulate_with(&pp, &verifier.sk, &signer.pk, b"m", &[Scalar::from_u64(5)]).unwrap();
        assert_eq!(sim.z, vec![BigUint::from(82u32)]);
        assert!(verify(&pp, &verifier.sk, &signer.pk, b"m", &sim).is_accept());
    }

    #[test]
    fn hash_contract() {
        let pp = mock_pp(97, 2, 16);
        let y = vec![pp.base(), pp.base()];
        let h = hash_transcript(&pp, &Transcript { y: &y, m: b"" }).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h, hash_transcript(&pp, &Transcript { y: &y, m: b"" }).unwrap());
        assert!(matches!(
            hash_transcript(&pp, &Transcript { y: &y[..1], m: b"" }),
            Err(Error::Shape { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn malformed_inputs_are_flagged() {
        let pp = mock_pp(97, 1, 16);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let s = sig_keygen(&pp, &mut rng).unwrap();
        let v = ver_keygen(&pp, &mut rng).unwrap();
        let sig = sign(&pp, &s.sk, &v.pk, b"hello", &mut rng).unwrap();

        let mut big = sig.clone();
        big.z[0] = &big.z[0] + 97u32;
        assert_eq!(
            verify(&pp, &v.sk, &s.pk, b"hello", &big),
            Verdict::Malformed(Malformed::ResponseOutOfRange { index: 0 })
        );
        let mut short = sig.clone();
        short.h.pop();
        assert!(verify(&pp, &v.sk, &s.pk, b"hello", &short).is_malformed());
        let mut extra = sig.clone();
        extra.z.push(BigUint::from(1u32));
        assert!(verify(&pp, &v.sk, &s.pk, b"hello", &extra).is_malformed());
        assert!(verify(&pp, &v.sk, &[], b"hello", &sig).is_malformed());
        assert_eq!(verify(&pp, &v.sk, &s.pk, b"hello", &sig).bit(), 1);
        assert_eq!(verify(&pp, &v.sk, &s.pk, b"hellO", &sig).bit(), 0);
    }

    #[test]
    fn signing_checks_key_shape() {
        let pp = mock_pp(97, 2, 16);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let s = sig_keygen(&pp, &mut rng).unwrap();
        let v = ver_keygen(&pp, &mut rng).unwrap();
        assert!(sign(&pp, &s.sk[..1], &v.pk, b"", &mut rng).is_err());
        assert!(simulate(&pp, &v.sk, &s.pk[..1], b"", &mut rng).is_err());
    }
}
