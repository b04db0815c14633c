use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::partition::{check_shape, parity};
use crate::error::{Error, Result};

/// Integer tallies over Monte Carlo trials. Summation is exact, so the
/// result does not depend on how trials are split across threads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub trials: u64,
    pub duplicates: u64,
    /// `R(W)` in `[1/4, 3/4]`.
    pub risk_in_band: u64,
    /// Duplicate-free trials with `r_S` outside `{0, 1}`.
    pub nonbinary_empirical: u64,
    /// `R(W)` in `[1/4, 3/4]` and `r_S` in `{0, 1}`.
    pub proof_event: u64,
    /// `R(W) - r_S(W) >= 1/4`.
    pub gap_at_least_quarter: u64,
    /// `|R(W) - r_S(W)| >= 1/4`.
    pub abs_gap_at_least_quarter: u64,
    /// Sum of gap numerators over `N * n`.
    pub gap_sum: i128,
    /// Sum of squared gap numerators over `(N * n)^2`.
    pub gap_sq_sum: i128,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.duplicates += o.duplicates;
        self.risk_in_band += o.risk_in_band;
        self.nonbinary_empirical += o.nonbinary_empirical;
        self.proof_event += o.proof_event;
        self.gap_at_least_quarter += o.gap_at_least_quarter;
        self.abs_gap_at_least_quarter += o.abs_gap_at_least_quarter;
        self.gap_sum += o.gap_sum;
        self.gap_sq_sum += o.gap_sq_sum;
        self
    }
}

struct Scratch {
    bits: Vec<u8>,
    free: Vec<u32>,
    sample: Vec<u32>,
    sorted: Vec<u32>,
}

/// One draw of `(S, W)`: returns `(duplicate, odd blocks, sum of S losses)`.
fn trial(rng: &mut ChaCha8Rng, big_n: u32, n: u32, sc: &mut Scratch) -> (bool, u32, u32) {
    sc.sample.clear();
    for _ in 0..n {
        sc.sample.push(rng.random_range(0..big_n));
    }
    sc.sorted.clone_from(&sc.sample);
    sc.sorted.sort_unstable();
    let dup = sc.sorted.windows(2).any(|w| w[0] == w[1]);
    sc.free.clear();
    if dup {
        sc.free.extend(0..big_n);
    } else {
        let sorted = &sc.sorted;
        sc.free.extend((0..big_n).filter(|z| sorted.binary_search(z).is_err()));
    }
    sc.free.shuffle(rng);
    sc.bits.clear();
    sc.bits.extend(sc.free.chunks(n as usize).map(parity));
    let mut odd: u32 = sc.bits.iter().map(|&b| b as u32).sum();
    let mut emp = 0u32;
    if dup {
        for &z in &sc.sample {
            let pos = sc.free.iter().position(|&x| x == z).expect("every element is placed");
            emp += sc.bits[pos / n as usize] as u32;
        }
    } else {
        let p = parity(&sc.sorted) as u32;
        odd += p;
        emp += n * p;
    }
    (dup, odd, emp)
}

/// Run `trials` independent draws of `(S, W)` at cube dimension `d` and
/// training-set size `n`. Trial `t` uses its own ChaCha8 stream `t` under
/// `seed`.
pub fn simulate(d: u32, n: u32, trials: u64, seed: u64) -> Result<Tally> {
    let big_n = check_shape(d, n)?;
    if n == big_n {
        return Err(Error::InvalidArgument("need n < 2^d".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one trial".into()));
    }
    const CHUNK: u64 = 4096;
    let chunks = trials.div_ceil(CHUNK);
    let (nn, bn) = (n as i128, big_n as i128);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sc = Scratch { bits: Vec::new(), free: Vec::new(), sample: Vec::new(), sorted: Vec::new() };
            let mut t = Tally::default();
            let mut base = ChaCha8Rng::seed_from_u64(seed);
            for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                base.set_stream(i);
                base.set_word_pos(0);
                let (dup, odd, emp) = trial(&mut base, big_n, n, &mut sc);
                t.trials += 1;
                t.duplicates += dup as u64;
                let band = 4 * n * odd >= big_n && 4 * n * odd <= 3 * big_n;
                let binary = emp == 0 || emp == n;
                t.risk_in_band += band as u64;
                t.nonbinary_empirical += (!dup && !binary) as u64;
                t.proof_event += (band && binary) as u64;
                // gap = (n^2 odd - N emp) / (N n)
                let g = nn * nn * odd as i128 - bn * emp as i128;
                t.gap_at_least_quarter += (4 * g >= bn * nn) as u64;
                t.abs_gap_at_least_quarter += (4 * g.abs() >= bn * nn) as u64;
                t.gap_sum += g;
                t.gap_sq_sum += g * g;
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally)
}
