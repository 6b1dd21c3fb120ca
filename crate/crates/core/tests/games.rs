use csisdvs::harness::nt::{Constant, VerifyBit};
use csisdvs::harness::psi::{GuessedVerifierKey, SignerKeyRecompute};
use csisdvs::harness::suf::Replay;
use csisdvs::harness::{
    run_nt, run_psi, run_suf_cma, Expectation, Experiment, ExperimentVerdict, NtConfig, PsiConfig, PsiDistinguisher,
    PsiOracles, PsiView, SufConfig, SufOracles,
};
use csisdvs::profiles::mock_params;
use csisdvs::random::trial_rng;
use csisdvs::{sig_keygen, ver_keygen, Error};
use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;

#[test]
fn verify_bit_carries_no_information() {
    let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
    let config = NtConfig { trials: 3000, seed: [1; 32], fresh_keys: true };
    let a = run_nt(&pp, &VerifyBit, config).unwrap();
    let b = run_nt(&pp, &Constant(0), config).unwrap();
    assert_eq!(a.successes, b.successes);
    assert!(a.pass);
}

#[test]
fn hash_list_records_the_verifier_relation() {
    let pp = mock_params(2, 16, BigUint::from(1u64 << 20)).unwrap();
    let mut rng = trial_rng([2; 32], 0);
    let s = sig_keygen(&pp, &mut rng).unwrap();
    let v = ver_keygen(&pp, &mut rng).unwrap();
    let mut o = SufOracles::new(&pp, &s, &v, &mut rng, 3);
    let sig = o.sign(b"a").unwrap();
    o.simulate(b"b").unwrap();
    assert!(o.verify(b"a", &sig).unwrap());
    assert_eq!(o.sign(b"c").unwrap_err(), Error::QueryBudgetExceeded(3));
    assert_eq!(o.queries_used(), 3);
    o.hash(&[pp.base(), pp.base()], b"free").unwrap();

    let log = o.log();
    assert_eq!(log.pair_count(), 2);
    assert_eq!(log.hlist().len(), 3);
    for rec in &log.hlist()[..2] {
        let aux = rec.aux.as_ref().unwrap();
        // Y_i = [v_i]([z_i]E_i)
        for ((y, x), vi) in rec.y.iter().zip(aux).zip(&v.sk) {
            assert_eq!(&pp.backend.act(vi, x).unwrap(), y);
        }
    }
    assert!(log.hlist()[2].aux.is_none());
}

#[test]
fn replay_of_reencoded_signature_still_caught() {
    let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
    let v = run_suf_cma(&pp, &Replay, SufConfig { trials: 1000, query_budget: 2, seed: [3; 32] }).unwrap();
    assert_eq!(v.successes, 0);
    assert_eq!(v.advantage, 0.0);
}

#[test]
fn guessed_key_attack_is_a_coin() {
    let pp = mock_params(1, 16, BigUint::from(1u64 << 32)).unwrap();
    let v = run_psi(&pp, &GuessedVerifierKey, PsiConfig { trials: 4000, query_budget: 4, seed: [4; 32] }).unwrap();
    assert!(v.pass, "{}", v.report_line());
}

#[test]
fn signer_keys_reveal_the_signer() {
    let pp = mock_params(2, 128, BigUint::from(1u64 << 32)).unwrap();
    let v = run_psi(&pp, &SignerKeyRecompute, PsiConfig { trials: 2000, query_budget: 4, seed: [5; 32] }).unwrap();
    assert_eq!(v.successes, 2000);
}

struct Chatty;

impl PsiDistinguisher for Chatty {
    fn name(&self) -> String {
        "chatty".into()
    }

    fn expectation(&self) -> Expectation {
        Expectation::FairCoin
    }

    fn distinguish(&self, _: &PsiView<'_>, o: &mut PsiOracles<'_, ChaCha20Rng>, _: &mut ChaCha20Rng) -> csisdvs::Result<u8> {
        for i in 0..10u8 {
            o.simulate(&[i], i & 1)?;
        }
        Ok(0)
    }
}

#[test]
fn psi_budget_enforced() {
    let pp = mock_params(1, 16, BigUint::from(97u32)).unwrap();
    let err = run_psi(&pp, &Chatty, PsiConfig { trials: 1, query_budget: 5, seed: [6; 32] }).unwrap_err();
    assert_eq!(err, Error::QueryBudgetExceeded(5));
}

#[test]
fn verdict_arithmetic() {
    let v = ExperimentVerdict::judge(Experiment::Nt, "x".into(), 10_000, 5_200, Expectation::FairCoin, 16);
    assert!((v.advantage - 0.02).abs() < 1e-12);
    assert!(!v.pass);
    let v = ExperimentVerdict::judge(Experiment::SufCma, "y".into(), 10_000, 1, Expectation::CollisionBudget, 16);
    assert!(v.pass);
    let v = ExperimentVerdict::judge(Experiment::SufCma, "y".into(), 10_000, 2, Expectation::CollisionBudget, 16);
    assert!(!v.pass);
    let v = ExperimentVerdict::judge(Experiment::Psi, "z".into(), 100, 97, Expectation::Winnable { min_advantage: 0.45 }, 16);
    assert!(v.pass);
}
