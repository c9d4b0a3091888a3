//! Access-sequence generators. All randomness is seeded ChaCha8.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Zipf};
use serde::{Deserialize, Serialize};

use crate::arboral::BSTree;
use crate::error::{Error, Result};
use crate::model::{AccessSequence, Element};

/// Probability that a window draw reuses a recent key.
pub const WINDOW_REUSE: f64 = 0.9;

/// `⟨1, 2, ..., n⟩`.
pub fn gen_sequential(n: usize) -> Result<AccessSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    AccessSequence::new(n, (1..=n as u32).map(Element::new).collect())
}

/// Number of keys in the complete tree of height `k`: `2^(k+1) - 1`.
pub fn bit_reversal_universe(k: u32) -> Result<usize> {
    if !(1..=30).contains(&k) {
        return Err(Error::InvalidParameter(format!("height {k} outside 1..=30")));
    }
    Ok((1usize << (k + 1)) - 1)
}

/// One round: the `2^k` leaves (odd keys) in bit-reversed index order.
pub fn bit_reversal_round(k: u32) -> Result<Vec<Element>> {
    bit_reversal_universe(k)?;
    Ok((0..1u32 << k).map(|i| Element::new(2 * (i.reverse_bits() >> (32 - k)) + 1)).collect())
}

/// `rounds` repetitions of the bit-reversal round, with the balanced tree it
/// is meant to start from.
pub fn gen_bit_reversal(k: u32, rounds: usize) -> Result<(AccessSequence, BSTree)> {
    let n = bit_reversal_universe(k)?;
    let round = bit_reversal_round(k)?;
    let searches = round.iter().copied().cycle().take(round.len() * rounds).collect();
    Ok((AccessSequence::new(n, searches)?, BSTree::balanced(n)))
}

/// The key distribution of [`gen_random`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    Uniform,
    /// Key `k` drawn with probability proportional to `k^-theta`.
    Zipf(f64),
    /// With probability [`WINDOW_REUSE`], one of the `width` most recently
    /// used distinct keys; otherwise uniform.
    WorkingSetWindow(usize),
}

/// `m` keys from `1..=n`, reproducible from `seed`.
pub fn gen_random(n: usize, m: usize, dist: Distribution, seed: u64) -> Result<AccessSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<u32> = match dist {
        Distribution::Uniform => (0..m).map(|_| rng.gen_range(1..=n as u32)).collect(),
        Distribution::Zipf(theta) if !(theta.is_finite() && theta >= 0.0) => {
            return Err(Error::InvalidParameter(format!("zipf exponent {theta} must be finite and >= 0")));
        }
        Distribution::Zipf(0.0) => (0..m).map(|_| rng.gen_range(1..=n as u32)).collect(),
        Distribution::Zipf(theta) => {
            let z = Zipf::new(n as u64, theta).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..m).map(|_| z.sample(&mut rng) as u32).collect()
        }
        Distribution::WorkingSetWindow(0) => {
            return Err(Error::InvalidParameter("window width must be at least 1".into()));
        }
        Distribution::WorkingSetWindow(width) => {
            // most recent first
            let mut recent: Vec<u32> = Vec::new();
            (0..m)
                .map(|_| {
                    let k = if !recent.is_empty() && rng.gen_bool(WINDOW_REUSE) {
                        recent[rng.gen_range(0..width.min(recent.len()))]
                    } else {
                        rng.gen_range(1..=n as u32)
                    };
                    if let Some(pos) = recent.iter().position(|&r| r == k) {
                        recent.remove(pos);
                    }
                    recent.insert(0, k);
                    recent.truncate(width);
                    k
                })
                .collect()
        }
    };
    AccessSequence::from_keys(n, &keys)
}

/// Generator names as they appear on the command line and in trace files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Sequential,
    Bitreversal,
    Uniform,
    Zipf,
    Wswindow,
    /// Written by hand or by another tool.
    Manual,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Sequential => "sequential",
            Pattern::Bitreversal => "bitreversal",
            Pattern::Uniform => "uniform",
            Pattern::Zipf => "zipf",
            Pattern::Wswindow => "wswindow",
            Pattern::Manual => "manual",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sequential" => Pattern::Sequential,
            "bitreversal" => Pattern::Bitreversal,
            "uniform" => Pattern::Uniform,
            "zipf" => Pattern::Zipf,
            "wswindow" => Pattern::Wswindow,
            "manual" => Pattern::Manual,
            _ => return Err(Error::InvalidParameter(format!("unknown pattern `{s}`"))),
        })
    }
}
