//! Fixed-width payload encodings of parameters, keys and signatures.
//!
//! Scalars are `ceil(log2 N / 8)` bytes big-endian, public set elements are
//! one `F_p` element (`ceil(log2 p / 8)` bytes), and the hash is `lambda / 8`
//! bytes. With `N = 2^(2 lambda)` this gives the sizes
//!
//! ```text
//! secret key   eta * log2 N        bits
//! public key   eta * log2 p        bits
//! signature    (2 eta + 1) lambda  bits
//! ```

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::action::{ActionBackend, BackendKind, ExponentVector, MockBackend, Scalar, SetElement, ToyBackend};
use crate::error::{Error, Result};
use crate::fp::{left_pad, PrimeModulus};
use crate::sdvs::{setup, HashId, PublicParams, Signature};

/// Payload bit-lengths for one parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PayloadSizes {
    pub secret_key_bits: usize,
    pub public_key_bits: usize,
    pub signature_bits: usize,
}

pub fn payload_sizes(pp: &PublicParams) -> PayloadSizes {
    PayloadSizes {
        secret_key_bits: 8 * secret_key_len(pp),
        public_key_bits: 8 * public_key_len(pp),
        signature_bits: 8 * signature_len(pp),
    }
}

pub fn secret_key_len(pp: &PublicParams) -> usize {
    pp.eta * pp.backend.scalar_len()
}

pub fn public_key_len(pp: &PublicParams) -> usize {
    pp.eta * pp.backend.public_element_len()
}

pub fn signature_len(pp: &PublicParams) -> usize {
    pp.hash_len() + pp.eta * pp.backend.scalar_len()
}

fn scalar_bytes(pp: &PublicParams, v: &BigUint) -> Result<Vec<u8>> {
    let width = pp.backend.scalar_len();
    let raw = v.to_bytes_be();
    if raw.len() > width {
        return Err(Error::Encoding("scalar wider than the encoding".into()));
    }
    Ok(left_pad(&raw, width))
}

pub fn encode_secret_key(pp: &PublicParams, sk: &[Scalar]) -> Result<Vec<u8>> {
    if sk.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: sk.len() });
    }
    let mut out = Vec::with_capacity(secret_key_len(pp));
    for s in sk {
        pp.backend.check_scalar(s)?;
        out.extend(scalar_bytes(pp, &s.0)?);
    }
    Ok(out)
}

pub fn decode_secret_key(pp: &PublicParams, bytes: &[u8]) -> Result<Vec<Scalar>> {
    if bytes.len() != secret_key_len(pp) {
        return Err(Error::Encoding(format!("secret key is {} bytes, expected {}", bytes.len(), secret_key_len(pp))));
    }
    bytes
        .chunks(pp.backend.scalar_len())
        .map(|c| {
            let s = Scalar(BigUint::from_bytes_be(c));
            pp.backend.check_scalar(&s).map(|_| s)
        })
        .collect()
}

pub fn encode_public_key(pp: &PublicParams, pk: &[SetElement]) -> Result<Vec<u8>> {
    if pk.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: pk.len() });
    }
    let mut out = Vec::with_capacity(public_key_len(pp));
    for x in pk {
        out.extend(pp.backend.public_bytes(x)?);
    }
    Ok(out)
}

pub fn decode_public_key(pp: &PublicParams, bytes: &[u8]) -> Result<Vec<SetElement>> {
    if bytes.len() != public_key_len(pp) {
        return Err(Error::Encoding(format!("public key is {} bytes, expected {}", bytes.len(), public_key_len(pp))));
    }
    bytes
        .chunks(pp.backend.public_element_len())
        .map(|c| pp.backend.element_from_public_bytes(c))
        .collect()
}

/// `h || z_1 || .. || z_eta`. Responses `>= N` that still fit the width are
/// encoded as-is so that tampered signatures stay representable.
pub fn encode_signature(pp: &PublicParams, sig: &Signature) -> Result<Vec<u8>> {
    if sig.h.len() != pp.hash_len() {
        return Err(Error::Encoding("hash length".into()));
    }
    if sig.z.len() != pp.eta {
        return Err(Error::Shape { expected: pp.eta, got: sig.z.len() });
    }
    let mut out = sig.h.clone();
    for z in &sig.z {
        out.extend(scalar_bytes(pp, z)?);
    }
    Ok(out)
}

/// Parses a signature payload. Only the length is checked here; the range of
/// each `z_i` is judged by verification.
pub fn decode_signature(pp: &PublicParams, bytes: &[u8]) -> Result<Signature> {
    if bytes.len() != signature_len(pp) {
        return Err(Error::Encoding(format!("signature is {} bytes, expected {}", bytes.len(), signature_len(pp))));
    }
    let (h, rest) = bytes.split_at(pp.hash_len());
    let z = rest.chunks(pp.backend.scalar_len()).map(BigUint::from_bytes_be).collect();
    Ok(Signature { h: h.to_vec(), z })
}

// ---- parameters ----

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Encoding("truncated parameters".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn big(&mut self) -> Result<BigUint> {
        let n = self.u16()? as usize;
        Ok(BigUint::from_bytes_be(self.take(n)?))
    }

    fn ells(&mut self) -> Result<Vec<u64>> {
        let n = self.u16()? as usize;
        (0..n).map(|_| self.u32().map(u64::from)).collect()
    }

    fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Encoding("trailing bytes after parameters".into()))
        }
    }
}

fn put_big(out: &mut Vec<u8>, v: &BigUint) {
    let b = v.to_bytes_be();
    out.extend((b.len() as u16).to_be_bytes());
    out.extend(b);
}

fn put_ells(out: &mut Vec<u8>, ells: &[u64]) {
    out.extend((ells.len() as u16).to_be_bytes());
    for &l in ells {
        out.extend((l as u32).to_be_bytes());
    }
}

/// Serializes public parameters. The toy orbit table is not stored; its
/// length `N` is, and is re-certified on load.
pub fn encode_params(pp: &PublicParams) -> Vec<u8> {
    let mut out = Vec::new();
    out.push(pp.backend.kind().to_byte());
    out.extend((pp.eta as u32).to_be_bytes());
    out.extend((pp.lambda as u16).to_be_bytes());
    out.push(pp.hash_id.to_byte());
    match pp.backend.as_ref() {
        ActionBackend::Toy(t) => {
            put_big(&mut out, t.modulus().value());
            put_ells(&mut out, t.modulus().ells());
            put_big(&mut out, t.orbit()[0].coefficient().value());
            for &e in &t.generator().0 {
                out.extend(e.to_be_bytes());
            }
            out.extend((t.orbit().len() as u64).to_be_bytes());
        }
        ActionBackend::Mock(m) => {
            put_big(&mut out, &pp.order());
            put_big(&mut out, m.modulus().value());
            put_ells(&mut out, m.modulus().ells());
            let SetElement::Residue(base) = pp.base() else { unreachable!() };
            put_big(&mut out, &base);
        }
    }
    out
}

/// Parses and fully revalidates public parameters (primality, supersingular
/// base, orbit length).
pub fn decode_params(bytes: &[u8]) -> Result<PublicParams> {
    let mut r = Reader { buf: bytes };
    let kind = BackendKind::from_byte(r.u8()?).ok_or_else(|| Error::Encoding("unknown backend".into()))?;
    let eta = r.u32()? as usize;
    let lambda = u32::from(r.u16()?);
    let hash_id = HashId::from_byte(r.u8()?).ok_or_else(|| Error::Encoding("unknown hash".into()))?;
    let backend = match kind {
        BackendKind::ToyIsogeny => {
            let p = r.big()?;
            let ells = r.ells()?;
            let modulus = Arc::new(PrimeModulus::with_value(p, &ells)?);
            let base_a = r.big()?.to_u64().ok_or_else(|| Error::Encoding("toy base".into()))?;
            let generator = ExponentVector(
                (0..ells.len())
                    .map(|_| r.u32().map(|v| v as i32))
                    .collect::<Result<_>>()?,
            );
            let order = usize::try_from(r.u64()?).map_err(|_| Error::Encoding("toy order".into()))?;
            // Isogeny codomains do not depend on which kernel points are drawn.
            let mut rng = ChaCha20Rng::seed_from_u64(0);
            ActionBackend::Toy(ToyBackend::from_parts(modulus, base_a, generator, order, &mut rng)?)
        }
        BackendKind::MockAdditive => {
            let order = r.big()?;
            let p = r.big()?;
            let ells = r.ells()?;
            let modulus = Arc::new(PrimeModulus::with_value(p, &ells)?);
            let base = r.big()?;
            ActionBackend::Mock(MockBackend::new(order, modulus, base)?)
        }
    };
    r.finish()?;
    setup(backend, eta, lambda, hash_id)
}
