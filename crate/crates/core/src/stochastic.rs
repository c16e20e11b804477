//! Monte Carlo self-play of probabilistic DUPOC agents.
//!
//! Each agent has already verified, by the Loebian argument on `p := []p`,
//! that its opponent cooperates with probability at least `q`; what remains
//! random is the pair of runtime coin flips, whose joint law is a
//! [`CouplingMode`].

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gl::{evaluate_system, FixedPointSystem};
use crate::modal::Name;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StochasticError {
    #[error("{what} must be in {range}, got {value}")]
    Domain {
        what: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("unknown coupling mode `{0}` (expected independent, comonotone or anti-comonotone)")]
    UnknownMode(String),
    #[error("the self-fulfilling cooperation check failed")]
    Unverified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    Independent,
    Comonotone,
    AntiComonotone,
}

impl CouplingMode {
    pub const ALL: [CouplingMode; 3] = [
        CouplingMode::Independent,
        CouplingMode::Comonotone,
        CouplingMode::AntiComonotone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CouplingMode::Independent => "independent",
            CouplingMode::Comonotone => "comonotone",
            CouplingMode::AntiComonotone => "anti-comonotone",
        }
    }
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CouplingMode {
    type Err = StochasticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "independent" => Ok(CouplingMode::Independent),
            "comonotone" => Ok(CouplingMode::Comonotone),
            "anti-comonotone" | "anticomonotone" => Ok(CouplingMode::AntiComonotone),
            _ => Err(StochasticError::UnknownMode(s.to_string())),
        }
    }
}

fn check_probability(q: f64) -> Result<(), StochasticError> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(StochasticError::Domain {
            what: "q",
            range: "[0, 1]",
            value: q,
        })
    }
}

/// Probability of mutual cooperation when each agent cooperates with
/// probability `q` and the coin flips are coupled by `mode`.
pub fn coop_bound(q: f64, mode: CouplingMode) -> Result<f64, StochasticError> {
    check_probability(q)?;
    Ok(match mode {
        CouplingMode::AntiComonotone => (2.0 * q - 1.0).max(0.0),
        CouplingMode::Independent => q * q,
        CouplingMode::Comonotone => q,
    })
}

/// Standard deviation of a Bernoulli(`p`) frequency over `n` trials.
pub fn frequency_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JointFrequency {
    pub cc: u64,
    pub cd: u64,
    pub dc: u64,
    pub dd: u64,
    pub n: u64,
    pub seed: u64,
}

impl JointFrequency {
    pub fn cc_frequency(&self) -> f64 {
        self.cc as f64 / self.n as f64
    }

    pub fn cd_frequency(&self) -> f64 {
        self.cd as f64 / self.n as f64
    }

    pub fn dc_frequency(&self) -> f64 {
        self.dc as f64 / self.n as f64
    }

    fn add(mut self, other: Counts) -> Self {
        self.cc += other[0];
        self.cd += other[1];
        self.dc += other[2];
        self.dd += other[3];
        self
    }
}

type Counts = [u64; 4];

/// Trials per independently positioned block of the random stream.
const BLOCK: u64 = 4096;
/// Every trial consumes exactly two 64-bit draws, i.e. four 32-bit words.
const WORDS_PER_TRIAL: u128 = 4;

fn sample_block(q: f64, mode: CouplingMode, seed: u64, start: u64, end: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(start as u128 * WORDS_PER_TRIAL);
    let mut counts = [0; 4];
    for _ in start..end {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let (row, col) = match mode {
            CouplingMode::Independent => (u < q, v < q),
            CouplingMode::Comonotone => (u < q, u < q),
            CouplingMode::AntiComonotone => (u < q, u >= 1.0 - q),
        };
        counts[usize::from(!row) * 2 + usize::from(!col)] += 1;
    }
    counts
}

/// Whether `p := []p` settles true, the fact each agent's verification rests on.
fn cooperation_is_self_fulfilling() -> bool {
    let p = Name::new("p").expect("valid name");
    let system = FixedPointSystem::parse("p := []p").expect("valid system");
    evaluate_system(&system).is_ok_and(|r| r.value(&p) == Some(true))
}

/// Plays `n` self-play games of the probabilistic DUPOC with cooperation
/// probability `q`. Trial `i` always draws from the same position of the
/// seeded stream, so the result does not depend on scheduling.
pub fn sample_pdupoc_selfplay(
    q: f64,
    mode: CouplingMode,
    n: u64,
    seed: u64,
) -> Result<JointFrequency, StochasticError> {
    check_probability(q)?;
    if n == 0 {
        return Err(StochasticError::Domain {
            what: "n",
            range: "[1, inf)",
            value: 0.0,
        });
    }
    if !cooperation_is_self_fulfilling() {
        return Err(StochasticError::Unverified);
    }
    let blocks = n.div_ceil(BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| sample_block(q, mode, seed, b * BLOCK, ((b + 1) * BLOCK).min(n)))
        .reduce(|| [0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
    let empty = JointFrequency {
        cc: 0,
        cd: 0,
        dc: 0,
        dd: 0,
        n,
        seed,
    };
    Ok(empty.add(counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub q: f64,
    pub mode: CouplingMode,
    pub n: u64,
    pub seed: u64,
    pub cc: u64,
    pub cd: u64,
    pub dc: u64,
    pub dd: u64,
}

impl SampleRecord {
    pub fn new(q: f64, mode: CouplingMode, freq: &JointFrequency) -> Self {
        SampleRecord {
            q,
            mode,
            n: freq.n,
            seed: freq.seed,
            cc: freq.cc,
            cd: freq.cd,
            dc: freq.dc,
            dd: freq.dd,
        }
    }
}

/// Writes records as CSV with header `q,mode,n,seed,cc,cd,dc,dd`.
pub fn write_csv<W: io::Write>(records: &[SampleRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
