//! Multinomial draws from exact outcome distributions.

use std::collections::BTreeMap;

use ifm_core::{OutcomeDistribution, TerminalEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

/// Recorded in every report so runs can be reproduced elsewhere.
pub const GENERATOR: &str = "ChaCha20Rng::seed_from_u64 (rand_chacha 0.9), sequential binomial";

pub type Counts = BTreeMap<TerminalEvent, u64>;

/// Draws `shots` outcomes with a generator seeded from `seed`.
pub fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<Counts> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sample_with(dist, shots, &mut rng)
}

/// Conditional-binomial multinomial: each event takes a binomial share of the
/// shots left, with its probability renormalized over the events not yet
/// visited. The last event absorbs the remainder.
pub fn sample_with<R: Rng + ?Sized>(dist: &OutcomeDistribution, shots: u64, rng: &mut R) -> Result<Counts> {
    if shots == 0 {
        return Err(HarnessError::BadParam("shots must be at least 1".into()));
    }
    if dist.is_empty() {
        return Err(HarnessError::BadParam("empty distribution".into()));
    }
    let mut left = shots;
    let mut mass = dist.total();
    let mut counts = Counts::new();
    let n = dist.len();
    for (i, (event, p)) in dist.iter().enumerate() {
        let k = if i + 1 == n || left == 0 {
            left
        } else {
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
            Binomial::new(left, q)
                .map_err(|e| HarnessError::BadParam(e.to_string()))?
                .sample(rng)
        };
        counts.insert(event.clone(), k);
        left -= k;
        mass -= p;
    }
    Ok(counts)
}

/// One independent draw per task. Task `i` uses stream `i` of the generator
/// seeded with `master`, so results do not depend on thread scheduling.
pub fn sample_tasks(dist: &OutcomeDistribution, shots: u64, master: u64, tasks: usize) -> Result<Vec<Counts>> {
    (0..tasks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(master);
            rng.set_stream(i as u64);
            sample_with(dist, shots, &mut rng)
        })
        .collect()
}

pub fn standard_error(p: f64, shots: u64) -> f64 {
    (p * (1.0 - p) / shots as f64).sqrt()
}
