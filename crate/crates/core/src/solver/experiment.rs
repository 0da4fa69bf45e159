//! Uniform random 3-colourings of tournaments.
//!
//! Trial `t` draws its colours from ChaCha8 seeded with `seed` on stream `t`,
//! so a trial's outcome does not depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::verify::Colouring;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub bad_counts: Vec<usize>,
    /// First trial attaining the minimum.
    pub best_trial: usize,
    pub best_bad_count: usize,
    pub mean_bad_count: f64,
    pub best_colouring: Vec<usize>,
}

fn trial_colours(n: usize, seed: u64, trial: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    (0..n).map(|_| rng.random_range(0..3u8)).collect()
}

/// The colouring drawn by `trial` of an experiment seeded with `seed`.
pub fn trial_colouring(n: usize, seed: u64, trial: usize) -> Colouring {
    let colours = trial_colours(n, seed, trial)
        .into_iter()
        .map(usize::from)
        .collect();
    Colouring::new(colours, 3).expect("colours are below 3")
}

fn count_bad(t: &Digraph, colours: &[u8]) -> usize {
    (0..t.n())
        .filter(|&v| {
            let own = colours[v];
            let same = t
                .out_neighbours(v)
                .iter()
                .filter(|&&w| colours[w] == own)
                .count();
            2 * same > t.out_degree(v)
        })
        .count()
}

/// Runs `trials` independent uniform 3-colourings of the tournament `t` and
/// records the number of bad vertices in each.
pub fn random_three_colouring(t: &Digraph, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if !t.is_tournament() {
        return Err(Error::NotATournament);
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = t.n();
    let bad_counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|trial| count_bad(t, &trial_colours(n, seed, trial)))
        .collect();
    let (best_trial, &best_bad_count) = bad_counts
        .iter()
        .enumerate()
        .min_by_key(|&(i, &c)| (c, i))
        .unwrap();
    let mean_bad_count = bad_counts.iter().sum::<usize>() as f64 / trials as f64;
    Ok(ExperimentReport {
        n,
        trials,
        seed,
        best_trial,
        best_bad_count,
        mean_bad_count,
        best_colouring: trial_colouring(n, seed, best_trial).colours().to_vec(),
        bad_counts,
    })
}
