//! Self-describing on-disk container for parameters, keys and signatures.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "CSISDVS1"
//! 8       1     kind     (1 params, 2 signer-sk, 3 signer-pk, 4 verifier-sk,
//!                         5 verifier-pk, 6 signature)
//! 9       1     profile  (1 toy-isogeny, 2 mock-additive)
//! 10      1     flags    (bit 0: UNSAFE-TOY marker)
//! 11      4     payload length, big-endian
//! 15      n     payload
//! 15+n    4     first 4 bytes of SHA-256 over bytes [0, 15+n)
//! ```
//!
//! Real and simulated signatures share one kind; nothing on disk tells them apart.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::action::BackendKind;
use crate::encoding;
use crate::error::Error;
use crate::sdvs::{KeyPair, PublicParams, Signature};

pub const MAGIC: &[u8; 8] = b"CSISDVS1";
pub const UNSAFE_FLAG: u8 = 0x01;
const HEADER_LEN: usize = 15;
const CHECKSUM_LEN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Params,
    SignerSecretKey,
    SignerPublicKey,
    VerifierSecretKey,
    VerifierPublicKey,
    Signature,
}

impl ArtifactKind {
    pub fn to_byte(self) -> u8 {
        match self {
            ArtifactKind::Params => 1,
            ArtifactKind::SignerSecretKey => 2,
            ArtifactKind::SignerPublicKey => 3,
            ArtifactKind::VerifierSecretKey => 4,
            ArtifactKind::VerifierPublicKey => 5,
            ArtifactKind::Signature => 6,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            1 => ArtifactKind::Params,
            2 => ArtifactKind::SignerSecretKey,
            3 => ArtifactKind::SignerPublicKey,
            4 => ArtifactKind::VerifierSecretKey,
            5 => ArtifactKind::VerifierPublicKey,
            6 => ArtifactKind::Signature,
            _ => return None,
        })
    }

    pub fn is_secret(self) -> bool {
        matches!(self, ArtifactKind::SignerSecretKey | ArtifactKind::VerifierSecretKey)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArtifactError {
    #[error("file too short")]
    Truncated,
    #[error("bad magic")]
    BadMagic,
    #[error("checksum mismatch")]
    Checksum,
    #[error("unknown artifact kind {0}")]
    UnknownKind(u8),
    #[error("unknown profile {0}")]
    UnknownProfile(u8),
    #[error("payload length field disagrees with file size")]
    Length,
    #[error("expected a {expected:?} artifact, found {found:?}")]
    WrongKind { expected: ArtifactKind, found: ArtifactKind },
    #[error("artifact profile {found} does not match parameters ({expected})")]
    ProfileMismatch { expected: &'static str, found: &'static str },
    #[error("UNSAFE-TOY marker inconsistent with parameters")]
    Marker,
    #[error(transparent)]
    Payload(#[from] Error),
}

/// A parsed container. Construction through [`ArtifactFile::new`] or
/// [`ArtifactFile::from_bytes`] guarantees a consistent header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtifactFile {
    pub kind: ArtifactKind,
    pub profile: BackendKind,
    pub unsafe_marker: bool,
    pub payload: Vec<u8>,
}

fn checksum(bytes: &[u8]) -> [u8; CHECKSUM_LEN] {
    let d = Sha256::digest(bytes);
    [d[0], d[1], d[2], d[3]]
}

impl ArtifactFile {
    pub fn new(kind: ArtifactKind, pp: &PublicParams, payload: Vec<u8>) -> Self {
        ArtifactFile { kind, profile: pp.backend.kind(), unsafe_marker: pp.is_unsafe(), payload }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len() + CHECKSUM_LEN);
        out.extend_from_slice(MAGIC);
        out.push(self.kind.to_byte());
        out.push(self.profile.to_byte());
        out.push(if self.unsafe_marker { UNSAFE_FLAG } else { 0 });
        out.extend((self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        let c = checksum(&out);
        out.extend(c);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ArtifactError> {
        if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
            return Err(ArtifactError::Truncated);
        }
        if &bytes[..8] != MAGIC {
            return Err(ArtifactError::BadMagic);
        }
        let (body, sum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        if checksum(body) != sum {
            return Err(ArtifactError::Checksum);
        }
        let kind = ArtifactKind::from_byte(bytes[8]).ok_or(ArtifactError::UnknownKind(bytes[8]))?;
        let profile = BackendKind::from_byte(bytes[9]).ok_or(ArtifactError::UnknownProfile(bytes[9]))?;
        let flags = bytes[10];
        if flags & !UNSAFE_FLAG != 0 {
            return Err(ArtifactError::Marker);
        }
        let len = u32::from_be_bytes(bytes[11..15].try_into().unwrap()) as usize;
        if HEADER_LEN + len != body.len() {
            return Err(ArtifactError::Length);
        }
        Ok(ArtifactFile { kind, profile, unsafe_marker: flags & UNSAFE_FLAG != 0, payload: body[HEADER_LEN..].to_vec() })
    }

    fn expect(&self, kind: ArtifactKind) -> Result<(), ArtifactError> {
        if self.kind != kind {
            return Err(ArtifactError::WrongKind { expected: kind, found: self.kind });
        }
        Ok(())
    }

    /// Checks that this artifact was made under `pp`'s profile and safety level.
    fn expect_context(&self, kind: ArtifactKind, pp: &PublicParams) -> Result<(), ArtifactError> {
        self.expect(kind)?;
        if self.profile != pp.backend.kind() {
            return Err(ArtifactError::ProfileMismatch { expected: pp.backend.kind().name(), found: self.profile.name() });
        }
        if self.unsafe_marker != pp.is_unsafe() {
            return Err(ArtifactError::Marker);
        }
        Ok(())
    }

    // ---- typed constructors and accessors ----

    pub fn params(pp: &PublicParams) -> Self {
        Self::new(ArtifactKind::Params, pp, encoding::encode_params(pp))
    }

    pub fn to_params(&self) -> Result<PublicParams, ArtifactError> {
        self.expect(ArtifactKind::Params)?;
        let pp = encoding::decode_params(&self.payload)?;
        if pp.backend.kind() != self.profile {
            return Err(ArtifactError::ProfileMismatch { expected: self.profile.name(), found: pp.backend.kind().name() });
        }
        if pp.is_unsafe() != self.unsafe_marker {
            return Err(ArtifactError::Marker);
        }
        Ok(pp)
    }

    pub fn secret_key(pp: &PublicParams, kind: ArtifactKind, keys: &KeyPair) -> Result<Self, ArtifactError> {
        Ok(Self::new(kind, pp, encoding::encode_secret_key(pp, &keys.sk)?))
    }

    pub fn public_key(pp: &PublicParams, kind: ArtifactKind, keys: &KeyPair) -> Result<Self, ArtifactError> {
        Ok(Self::new(kind, pp, encoding::encode_public_key(pp, &keys.pk)?))
    }

    pub fn signature(pp: &PublicParams, sig: &Signature) -> Result<Self, ArtifactError> {
        Ok(Self::new(ArtifactKind::Signature, pp, encoding::encode_signature(pp, sig)?))
    }

    pub fn to_secret_key(&self, pp: &PublicParams, kind: ArtifactKind) -> Result<Vec<crate::action::Scalar>, ArtifactError> {
        self.expect_context(kind, pp)?;
        Ok(encoding::decode_secret_key(pp, &self.payload)?)
    }

    pub fn to_public_key(&self, pp: &PublicParams, kind: ArtifactKind) -> Result<Vec<crate::action::SetElement>, ArtifactError> {
        self.expect_context(kind, pp)?;
        Ok(encoding::decode_public_key(pp, &self.payload)?)
    }

    pub fn to_signature(&self, pp: &PublicParams) -> Result<Signature, ArtifactError> {
        self.expect_context(ArtifactKind::Signature, pp)?;
        Ok(encoding::decode_signature(pp, &self.payload)?)
    }
}
