use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use csisdvs::artifact::{ArtifactFile, ArtifactKind};
use csisdvs::encoding::payload_sizes;
use csisdvs::harness::{
    builtin_nt_distinguishers, builtin_psi_distinguishers, builtin_suf_adversaries, reference_psi_distinguishers,
    run_nt, run_psi, run_suf_cma, ExperimentVerdict, NtConfig, NtDistinguisher, NtView, PsiConfig, SufConfig,
};
use csisdvs::profiles::{mock_params, production_order, toy_params};
use csisdvs::random::seed_bytes;
use csisdvs::sdvs::Verdict;
use csisdvs::{sig_keygen, sign, simulate, ver_keygen, verify, Error, PublicParams, Signature};
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::files::{read_artifact, read_bytes, write_artifact, CliError};
use crate::{
    BenchArgs, Command, ExperimentName, GameArgs, KeygenArgs, ParamgenArgs, Profile, ProfileArgs, Role, SignArgs,
    SimulateArgs, VerifyArgs, DEFAULT_PARAMS_PATH, EXIT_INVALID, EXIT_OK, PARAMS_ENV,
};

type CmdResult = Result<i32, CliError>;

pub fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Paramgen(a) => paramgen(a, out, err),
        Command::Keygen(a) => keygen(a, out, err),
        Command::Sign(a) => sign_cmd(a, out, err),
        Command::Verify(a) => verify_cmd(a, out, err),
        Command::Simulate(a) => simulate_cmd(a, out, err),
        Command::Game(a) => game(a, out, err),
        Command::Bench(a) => bench(a, out, err),
    }
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn say(stream: &mut dyn Write, line: std::fmt::Arguments<'_>) {
    // a closed pipe is not worth failing a command over
    let _ = stream.write_fmt(line);
    let _ = stream.write_all(b"\n");
}

fn warn_if_unsafe(pp: &PublicParams, err: &mut dyn Write) {
    if pp.is_unsafe() {
        say(err, format_args!("WARNING: UNSAFE-TOY parameters (toy backend or lambda < 128), not for real use"));
    }
}

fn parse_order(text: &str) -> Result<BigUint, CliError> {
    let bad = || CliError::Usage(format!("invalid --order {text:?}: expected a decimal integer or 2^k"));
    if let Some(k) = text.strip_prefix("2^") {
        let k: usize = k.parse().map_err(|_| bad())?;
        return Ok(BigUint::from(1u32) << k);
    }
    text.parse().map_err(|_| bad())
}

/// Setup errors are the caller's fault at this layer.
fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn malformed(e: Error) -> CliError {
    CliError::Malformed(e.to_string())
}

fn build_params(profile: Profile, eta: usize, lambda: u32, order: Option<&str>, seed: Option<u64>) -> Result<PublicParams, CliError> {
    if eta == 0 {
        return Err(CliError::Usage("--eta must be at least 1".into()));
    }
    match profile {
        Profile::Toy => {
            if order.is_some() {
                return Err(CliError::Usage("--order applies to the mock profile only".into()));
            }
            toy_params(eta, lambda, &mut rng_from(seed.or(Some(0)))).map_err(usage)
        }
        Profile::Mock => {
            let order = match order {
                Some(text) => parse_order(text)?,
                None => production_order(lambda),
            };
            mock_params(eta, lambda, order).map_err(usage)
        }
    }
}

fn params_path(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(PARAMS_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_PARAMS_PATH))
}

fn load_params(explicit: Option<PathBuf>, err: &mut dyn Write) -> Result<PublicParams, CliError> {
    let path = params_path(explicit);
    let pp = read_artifact(&path)?.to_params().map_err(|e| CliError::artifact(&path, e))?;
    warn_if_unsafe(&pp, err);
    Ok(pp)
}

fn load_secret_key(pp: &PublicParams, path: &Path, kind: ArtifactKind) -> Result<Vec<csisdvs::Scalar>, CliError> {
    read_artifact(path)?.to_secret_key(pp, kind).map_err(|e| CliError::artifact(path, e))
}

fn load_public_key(pp: &PublicParams, path: &Path, kind: ArtifactKind) -> Result<Vec<csisdvs::SetElement>, CliError> {
    read_artifact(path)?.to_public_key(pp, kind).map_err(|e| CliError::artifact(path, e))
}

fn load_signature(pp: &PublicParams, path: &Path) -> Result<Signature, CliError> {
    read_artifact(path)?.to_signature(pp).map_err(|e| CliError::artifact(path, e))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn describe(pp: &PublicParams, out: &mut dyn Write) {
    let sizes = payload_sizes(pp);
    say(out, format_args!("profile  {}", pp.backend.kind().name()));
    say(out, format_args!("N        {}", pp.order()));
    say(out, format_args!("p        {} ({} bits)", pp.backend.modulus().value(), pp.backend.modulus().bits()));
    say(out, format_args!("eta      {}", pp.eta));
    say(out, format_args!("lambda   {}", pp.lambda));
    say(
        out,
        format_args!(
            "sizes    sk {} bits, pk {} bits, sig {} bits",
            sizes.secret_key_bits, sizes.public_key_bits, sizes.signature_bits
        ),
    );
}

fn paramgen(a: ParamgenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let ProfileArgs { profile, eta, lambda, order } = a.profile;
    let pp = build_params(profile, eta, lambda, order.as_deref(), a.seed)?;
    warn_if_unsafe(&pp, err);
    write_artifact(&a.out, &ArtifactFile::params(&pp))?;
    describe(&pp, out);
    Ok(EXIT_OK)
}

fn keygen(a: KeygenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let pp = load_params(a.params, err)?;
    let mut rng = rng_from(a.seed);
    let (keys, sk_kind, pk_kind) = match a.role {
        Role::Signer => (sig_keygen(&pp, &mut rng), ArtifactKind::SignerSecretKey, ArtifactKind::SignerPublicKey),
        Role::Verifier => (ver_keygen(&pp, &mut rng), ArtifactKind::VerifierSecretKey, ArtifactKind::VerifierPublicKey),
    };
    let keys = keys.map_err(malformed)?;
    let sk_path = with_suffix(&a.out_prefix, ".sk");
    let pk_path = with_suffix(&a.out_prefix, ".pk");
    let to_cli = |e| CliError::Malformed(format!("{e}"));
    write_artifact(&sk_path, &ArtifactFile::secret_key(&pp, sk_kind, &keys).map_err(to_cli)?)?;
    write_artifact(&pk_path, &ArtifactFile::public_key(&pp, pk_kind, &keys).map_err(to_cli)?)?;
    say(out, format_args!("wrote {} and {}", sk_path.display(), pk_path.display()));
    Ok(EXIT_OK)
}

fn sign_cmd(a: SignArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let pp = load_params(a.params, err)?;
    let sk = load_secret_key(&pp, &a.sk, ArtifactKind::SignerSecretKey)?;
    let pk = load_public_key(&pp, &a.pk, ArtifactKind::VerifierPublicKey)?;
    let m = read_bytes(&a.message)?;
    let sig = sign(&pp, &sk, &pk, &m, &mut rng_from(a.seed)).map_err(malformed)?;
    let file = ArtifactFile::signature(&pp, &sig).map_err(|e| CliError::Malformed(e.to_string()))?;
    write_artifact(&a.out, &file)?;
    say(out, format_args!("wrote {}", a.out.display()));
    Ok(EXIT_OK)
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let pp = load_params(a.params, err)?;
    let sk = load_secret_key(&pp, &a.sk, ArtifactKind::VerifierSecretKey)?;
    let pk = load_public_key(&pp, &a.pk, ArtifactKind::SignerPublicKey)?;
    let m = read_bytes(&a.message)?;
    let sig = simulate(&pp, &sk, &pk, &m, &mut rng_from(a.seed)).map_err(malformed)?;
    let file = ArtifactFile::signature(&pp, &sig).map_err(|e| CliError::Malformed(e.to_string()))?;
    write_artifact(&a.out, &file)?;
    say(out, format_args!("wrote {}", a.out.display()));
    Ok(EXIT_OK)
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let pp = load_params(a.params, err)?;
    let sk = load_secret_key(&pp, &a.sk, ArtifactKind::VerifierSecretKey)?;
    let pk = load_public_key(&pp, &a.pk, ArtifactKind::SignerPublicKey)?;
    let m = read_bytes(&a.message)?;
    let sig = load_signature(&pp, &a.signature)?;
    match verify(&pp, &sk, &pk, &m, &sig) {
        Verdict::Accept => {
            say(out, format_args!("VALID"));
            Ok(EXIT_OK)
        }
        Verdict::Reject => {
            say(out, format_args!("INVALID"));
            Ok(EXIT_INVALID)
        }
        Verdict::Malformed(why) => Err(CliError::Malformed(format!("{}: malformed signature ({why:?})", a.signature.display()))),
    }
}

/// Guesses from one bit of the serialized signature file, header and
/// checksum included.
struct ArtifactBit {
    name: &'static str,
    pick: fn(&[u8]) -> u8,
}

impl NtDistinguisher for ArtifactBit {
    fn name(&self) -> String {
        self.name.into()
    }

    fn guess(&self, view: &NtView<'_>, _: &[u8], sig: &Signature, _: &mut ChaCha20Rng) -> csisdvs::Result<u8> {
        let file = ArtifactFile::signature(view.pp, sig).map_err(|e| Error::Encoding(e.to_string()))?;
        Ok((self.pick)(&file.to_bytes()) & 1)
    }
}

fn file_level_distinguishers() -> Vec<Box<dyn NtDistinguisher>> {
    vec![
        Box::new(ArtifactBit { name: "file-checksum-bit", pick: |b| b[b.len() - 1] }),
        Box::new(ArtifactBit { name: "file-payload-top-bit", pick: |b| b[15] >> 7 }),
        Box::new(ArtifactBit { name: "file-length-parity", pick: |b| b.len() as u8 }),
    ]
}

fn run_suite(pp: &PublicParams, a: &GameArgs, seed: [u8; 32], out: &mut dyn Write) -> Result<Vec<ExperimentVerdict>, CliError> {
    let mut verdicts = Vec::new();
    match a.experiment {
        ExperimentName::Suf => {
            let config = SufConfig { trials: a.trials, query_budget: a.query_budget, seed };
            for adv in builtin_suf_adversaries() {
                verdicts.push(run_suf_cma(pp, adv.as_ref(), config).map_err(usage)?);
            }
        }
        ExperimentName::Nt => {
            let config = NtConfig { trials: a.trials, seed, fresh_keys: true };
            for d in builtin_nt_distinguishers().into_iter().chain(file_level_distinguishers()) {
                verdicts.push(run_nt(pp, d.as_ref(), config).map_err(usage)?);
            }
        }
        ExperimentName::Psi => {
            let config = PsiConfig { trials: a.trials, query_budget: a.query_budget, seed };
            for d in builtin_psi_distinguishers().into_iter().chain(reference_psi_distinguishers()) {
                verdicts.push(run_psi(pp, d.as_ref(), config).map_err(usage)?);
            }
        }
    }
    for v in &verdicts {
        say(out, format_args!("{}", v.report_line()));
    }
    if a.experiment == ExperimentName::Psi {
        say(
            out,
            format_args!(
                "note: signer-key-recompute holds both signer secret keys, which this game reveals; \
                 its win shows signer privacy rests on keeping signer keys secret"
            ),
        );
    }
    Ok(verdicts)
}

fn game(a: GameArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let pp = match a.profile {
        Some(profile) => {
            let pp = build_params(profile, a.eta, a.lambda, a.order.as_deref(), None)?;
            warn_if_unsafe(&pp, err);
            pp
        }
        None => load_params(a.params.clone(), err)?,
    };
    let seed = seed_bytes(a.seed.unwrap_or_else(|| rand::rngs::OsRng.next_u64()));
    let verdicts = run_suite(&pp, &a, seed, out)?;
    if let Some(path) = &a.report {
        let summary = serde_json::json!({
            "experiment": format!("{:?}", a.experiment).to_lowercase(),
            "profile": pp.backend.kind().name(),
            "eta": pp.eta,
            "lambda": pp.lambda,
            "order": pp.order().to_string(),
            "trials": a.trials,
            "verdicts": verdicts,
        });
        let text = serde_json::to_string_pretty(&summary).expect("verdicts serialize");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    say(out, format_args!("{} of {} verdicts passed", verdicts.len() - failed, verdicts.len()));
    if failed > 0 {
        return Err(CliError::GameFailed(failed));
    }
    Ok(EXIT_OK)
}

fn bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.iterations == 0 {
        return Err(CliError::Usage("--iterations must be positive".into()));
    }
    let pp = load_params(a.params, err)?;
    let mut rng = rng_from(a.seed);
    let n = a.iterations;
    let per_op = |start: Instant| start.elapsed().as_secs_f64() * 1e6 / f64::from(n);

    let start = Instant::now();
    let mut keys = Vec::with_capacity(n as usize);
    for _ in 0..n {
        keys.push((sig_keygen(&pp, &mut rng).map_err(malformed)?, ver_keygen(&pp, &mut rng).map_err(malformed)?));
    }
    let keygen_us = per_op(start) / 2.0;

    let m = b"benchmark message";
    let start = Instant::now();
    let mut sigs = Vec::with_capacity(n as usize);
    for (s, v) in &keys {
        sigs.push(sign(&pp, &s.sk, &v.pk, m, &mut rng).map_err(malformed)?);
    }
    let sign_us = per_op(start);

    let start = Instant::now();
    for (s, v) in &keys {
        simulate(&pp, &v.sk, &s.pk, m, &mut rng).map_err(malformed)?;
    }
    let simulate_us = per_op(start);

    let start = Instant::now();
    let mut accepted = 0;
    for ((s, v), sig) in keys.iter().zip(&sigs) {
        accepted += u32::from(verify(&pp, &v.sk, &s.pk, m, sig).is_accept());
    }
    let verify_us = per_op(start);

    say(out, format_args!("profile {} eta {} lambda {} iterations {n}", pp.backend.kind().name(), pp.eta, pp.lambda));
    say(out, format_args!("keygen    {keygen_us:>10.2} us/op"));
    say(out, format_args!("sign      {sign_us:>10.2} us/op"));
    say(out, format_args!("simulate  {simulate_us:>10.2} us/op"));
    say(out, format_args!("verify    {verify_us:>10.2} us/op ({accepted}/{n} accepted)"));
    Ok(EXIT_OK)
}
