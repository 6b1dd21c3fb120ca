use std::sync::OnceLock;

use csisdvs::artifact::{ArtifactError, ArtifactFile, ArtifactKind};
use csisdvs::encoding::{
    decode_params, decode_public_key, decode_secret_key, decode_signature, encode_params, encode_public_key,
    encode_secret_key, encode_signature, payload_sizes, PayloadSizes,
};
use csisdvs::profiles::{mock_params, production_order, toy_params};
use csisdvs::{sig_keygen, sign, ver_keygen, PublicParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn toy() -> PublicParams {
    static PP: OnceLock<PublicParams> = OnceLock::new();
    PP.get_or_init(|| toy_params(2, 16, &mut ChaCha20Rng::seed_from_u64(0)).unwrap()).clone()
}

#[test]
fn production_sizes() {
    let pp = mock_params(1, 128, production_order(128)).unwrap();
    assert_eq!(pp.backend.modulus().bits(), 511);
    assert_eq!(
        payload_sizes(&pp),
        PayloadSizes { secret_key_bits: 256, public_key_bits: 512, signature_bits: 384 }
    );
    let pp3 = mock_params(3, 128, production_order(128)).unwrap();
    assert_eq!(
        payload_sizes(&pp3),
        PayloadSizes { secret_key_bits: 768, public_key_bits: 1536, signature_bits: 896 }
    );
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let s = sig_keygen(&pp3, &mut rng).unwrap();
    let v = ver_keygen(&pp3, &mut rng).unwrap();
    let sig = sign(&pp3, &s.sk, &v.pk, b"sizes", &mut rng).unwrap();
    assert_eq!(encode_signature(&pp3, &sig).unwrap().len() * 8, 896);
    assert_eq!(encode_secret_key(&pp3, &s.sk).unwrap().len() * 8, 768);
    assert_eq!(encode_public_key(&pp3, &s.pk).unwrap().len() * 8, 1536);
}

#[test]
fn toy_sizes() {
    let pp = toy();
    // N = 27 fits one byte, p = 419 needs two, h is 16 bits
    assert_eq!(
        payload_sizes(&pp),
        PayloadSizes { secret_key_bits: 16, public_key_bits: 32, signature_bits: 32 }
    );
}

#[test]
fn params_roundtrip() {
    for pp in [toy(), mock_params(3, 128, production_order(128)).unwrap()] {
        let bytes = encode_params(&pp);
        let back = decode_params(&bytes).unwrap();
        assert_eq!(encode_params(&back), bytes);
        assert_eq!(back.order(), pp.order());
        assert_eq!(back.base(), pp.base());
        let file = ArtifactFile::params(&pp);
        let raw = file.to_bytes();
        let reread = ArtifactFile::from_bytes(&raw).unwrap();
        assert_eq!(reread.to_bytes(), raw);
        assert_eq!(encode_params(&reread.to_params().unwrap()), bytes);
    }
}

#[test]
fn params_reject_tampering() {
    let bytes = encode_params(&toy());
    let mut wrong_order = bytes.clone();
    let last = wrong_order.len() - 1;
    wrong_order[last] ^= 1;
    assert!(decode_params(&wrong_order).is_err());
    assert!(decode_params(&bytes[..bytes.len() - 1]).is_err());
    let mut trailing = bytes.clone();
    trailing.push(0);
    assert!(decode_params(&trailing).is_err());
}

#[test]
fn cross_profile_artifacts_rejected() {
    let toy = toy();
    let mock = mock_params(2, 16, production_order(16)).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let keys = sig_keygen(&mock, &mut rng).unwrap();
    let file = ArtifactFile::public_key(&mock, ArtifactKind::SignerPublicKey, &keys).unwrap();
    assert!(matches!(
        file.to_public_key(&toy, ArtifactKind::SignerPublicKey),
        Err(ArtifactError::ProfileMismatch { .. })
    ));
    assert!(matches!(
        file.to_public_key(&mock, ArtifactKind::VerifierPublicKey),
        Err(ArtifactError::WrongKind { .. })
    ));
    let safe = mock_params(2, 128, production_order(128)).unwrap();
    assert!(matches!(file.to_public_key(&safe, ArtifactKind::SignerPublicKey), Err(ArtifactError::Marker)));
}

#[test]
fn unsafe_marker_set_for_toy_and_small_lambda() {
    assert!(ArtifactFile::params(&toy()).unsafe_marker);
    assert!(ArtifactFile::params(&mock_params(1, 16, production_order(16)).unwrap()).unsafe_marker);
    assert!(!ArtifactFile::params(&mock_params(1, 128, production_order(128)).unwrap()).unsafe_marker);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn keys_and_signatures_roundtrip(seed in any::<u64>(), m in proptest::collection::vec(any::<u8>(), 0..40), use_toy in any::<bool>()) {
        let pp = if use_toy { toy() } else { mock_params(2, 128, production_order(128)).unwrap() };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let s = sig_keygen(&pp, &mut rng).unwrap();
        let v = ver_keygen(&pp, &mut rng).unwrap();
        let sig = sign(&pp, &s.sk, &v.pk, &m, &mut rng).unwrap();

        let sk_bytes = encode_secret_key(&pp, &s.sk).unwrap();
        prop_assert_eq!(decode_secret_key(&pp, &sk_bytes).unwrap(), s.sk.clone());
        let pk_bytes = encode_public_key(&pp, &s.pk).unwrap();
        prop_assert_eq!(decode_public_key(&pp, &pk_bytes).unwrap(), s.pk.clone());
        let sig_bytes = encode_signature(&pp, &sig).unwrap();
        prop_assert_eq!(decode_signature(&pp, &sig_bytes).unwrap(), sig.clone());

        for file in [
            ArtifactFile::secret_key(&pp, ArtifactKind::SignerSecretKey, &s).unwrap(),
            ArtifactFile::public_key(&pp, ArtifactKind::VerifierPublicKey, &v).unwrap(),
            ArtifactFile::signature(&pp, &sig).unwrap(),
        ] {
            let raw = file.to_bytes();
            prop_assert_eq!(ArtifactFile::from_bytes(&raw).unwrap().to_bytes(), raw);
        }
    }
}
