//! Executable security experiments: challengers for strong unforgeability,
//! non-transferability and signer privacy, with pluggable adversaries and
//! statistical verdicts.
//!
//! "Negligible" has no number at desk scale, so each strategy carries an
//! [`Expectation`] and the verdict is a hypothesis test against it.

use std::collections::HashSet;
use std::fmt;

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::encode_signature;
use crate::error::Result;
use crate::random::trial_rng;
use crate::sdvs::{PublicParams, Signature};
use crate::SetElement;

pub mod extractor;
pub mod nt;
pub mod psi;
pub mod stats;
pub mod suf;

pub use extractor::{extraction_identity, extractor_check, SignatureSource};
pub use nt::{builtin_nt_distinguishers, run_nt, NtConfig, NtDistinguisher, NtView};
pub use psi::{builtin_psi_distinguishers, reference_psi_distinguishers, run_psi, PsiConfig, PsiDistinguisher, PsiOracles, PsiView};
pub use suf::{builtin_suf_adversaries, run_suf_cma, SufAdversary, SufConfig, SufOracles, SufView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Experiment {
    #[serde(rename = "SUF-CMA")]
    SufCma,
    #[serde(rename = "NT")]
    Nt,
    #[serde(rename = "PSI")]
    Psi,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::SufCma => "SUF-CMA",
            Experiment::Nt => "NT",
            Experiment::Psi => "PSI",
        })
    }
}

impl Experiment {
    /// Success rate of a strategy with no information.
    pub fn baseline(self) -> f64 {
        match self {
            Experiment::SufCma => 0.0,
            Experiment::Nt | Experiment::Psi => 0.5,
        }
    }
}

/// What a strategy is expected to achieve, which decides its verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expectation {
    /// Must never win (replays, freshness violations).
    NoSuccess,
    /// Wins only through hash collisions of probability `2^-lambda` per trial.
    CollisionBudget,
    /// Success rate within the three-sigma band around 1/2.
    FairCoin,
    /// A reference strategy holding a secret; must reach this advantage.
    Winnable { min_advantage: f64 },
}

/// Result of running one strategy for many trials.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentVerdict {
    pub experiment: Experiment,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    /// `|successes / trials - baseline|`.
    pub advantage: f64,
    /// The threshold the verdict was judged against (meaning depends on the
    /// expectation: a rate bound, a band half-width, or a minimum advantage).
    pub bound: f64,
    pub pass: bool,
}

impl ExperimentVerdict {
    pub fn judge(experiment: Experiment, strategy: String, trials: u64, successes: u64, expectation: Expectation, lambda: u32) -> Self {
        let rate = successes as f64 / trials as f64;
        let advantage = (rate - experiment.baseline()).abs();
        let (bound, pass) = match expectation {
            Expectation::NoSuccess => (0.0, successes == 0),
            Expectation::CollisionBudget => {
                let bound = stats::collision_rate_bound(2f64.powi(-(lambda as i32)), trials);
                (bound, rate <= bound)
            }
            Expectation::FairCoin => {
                let bound = stats::fair_coin_band(trials);
                (bound, advantage <= bound)
            }
            Expectation::Winnable { min_advantage } => (min_advantage, advantage >= min_advantage),
        };
        ExperimentVerdict { experiment, strategy, trials, successes, advantage, bound, pass }
    }

    /// One line of the text report.
    pub fn report_line(&self) -> String {
        format!(
            "{} {:<7} {:<28} trials={} successes={} advantage={:.5} bound={:.5}",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment.to_string(),
            self.strategy,
            self.trials,
            self.successes,
            self.advantage,
            self.bound
        )
    }
}

/// One hash-list record: `(m, Y, h, aux)`, where `aux` holds `[z_i]E_i` for
/// answers the challenger produced itself and is absent for plain hash queries.
#[derive(Clone, Debug)]
pub struct HashRecord {
    pub m: Vec<u8>,
    pub y: Vec<SetElement>,
    pub h: Vec<u8>,
    pub aux: Option<Vec<SetElement>>,
}

/// Append-only bookkeeping of one experiment run. Pairs are compared on their
/// canonical encodings.
#[derive(Clone, Debug, Default)]
pub struct QueryLog {
    pairs: HashSet<(Vec<u8>, Vec<u8>)>,
    hlist: Vec<HashRecord>,
}

impl QueryLog {
    pub fn record_pair(&mut self, pp: &PublicParams, m: &[u8], sig: &Signature) -> Result<()> {
        self.pairs.insert((m.to_vec(), encode_signature(pp, sig)?));
        Ok(())
    }

    /// Exact membership of `(m, sig)`. Signatures that cannot be encoded at all
    /// are never members.
    pub fn contains_pair(&self, pp: &PublicParams, m: &[u8], sig: &Signature) -> bool {
        match encode_signature(pp, sig) {
            Ok(bytes) => self.pairs.contains(&(m.to_vec(), bytes)),
            Err(_) => false,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn record_hash(&mut self, record: HashRecord) {
        self.hlist.push(record);
    }

    pub fn hlist(&self) -> &[HashRecord] {
        &self.hlist
    }
}

/// Runs `trials` independent trials in parallel and counts successes.
///
/// Trial `i` hands the challenger stream `2i` and the adversary stream `2i+1`
/// of `seed`, so the adversary's coins never perturb the challenger's.
pub(crate) fn count_successes<F>(trials: u64, seed: [u8; 32], trial: F) -> Result<u64>
where
    F: Fn(&mut ChaCha20Rng, &mut ChaCha20Rng) -> Result<bool> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut trial_rng(seed, 2 * i), &mut trial_rng(seed, 2 * i + 1)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}
