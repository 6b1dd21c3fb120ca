//! Strong designated verifier signatures from a class-group action on
//! supersingular curves, with a toy isogeny backend, a mock backend at
//! production widths, and executable security experiments.

pub mod action;
pub mod artifact;
pub mod encoding;
pub mod error;
pub mod fp;
pub mod harness;
pub mod montgomery;
pub mod profiles;
pub mod random;
pub mod sdvs;

pub use action::{ActionBackend, BackendKind, ExponentVector, Scalar, SetElement};
pub use error::{Error, Result};
pub use sdvs::{
    hash_transcript, setup, sig_keygen, sign, simulate, ver_keygen, verify, HashId, KeyPair, PublicParams,
    Signature, Transcript, Verdict,
};
