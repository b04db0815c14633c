//! A learning algorithm on `Z = {0,1}^d` with `n = 2^r` examples that hides
//! nothing from single examples yet generalizes badly.
//!
//! Hypotheses are partitions of `Z` into blocks of size `n`, the loss of `w`
//! at `z` is the parity of the block of `w` holding `z`, and the algorithm
//! outputs a uniform partition having `S` as a block (uniform over all
//! partitions when `S` repeats an element).

mod montecarlo;
mod partition;

pub use montecarlo::{simulate, Tally};
pub use partition::{
    bitstring, check_shape, containing_count, draw_hypothesis, enumerate_partitions, loss_eval,
    parity, parse_bitstring, partition_count, partitions_containing, sample_hypothesis, Partition,
    PartitionSpace, MAX_DIM,
};

use num::bigint::BigUint;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::probcore::rational::{ln_biguint, ratio_u128, rational_from_i64, serde_rational};
use crate::probcore::{kl, FiniteDist, Prob, Rational};
use crate::setting::{GapOptions, LearningSetting, LossTable};

/// `1 - N (N-1) ... (N-n+1) / N^n`.
pub fn duplicate_prob(n: u32, d: u32) -> Result<Prob> {
    let big_n = check_shape(d, n)?;
    let mut falling = BigUint::one();
    for i in 0..n {
        falling *= BigUint::from(big_n - i);
    }
    let all = num::pow(BigUint::from(big_n), n as usize);
    let free = Rational::new(falling.into(), all.into());
    Prob::new(Rational::one() - free)
}

/// `log(|W| / |W_S|) = log C(N-1, n-1)`: the divergence between the kernel
/// at a duplicate-free `S` and the uniform marginal of `W`.
pub fn kl_support_formula(d: u32, n: u32) -> Result<f64> {
    let big_n = check_shape(d, n)?;
    let mut c = BigUint::one();
    for i in 0..n - 1 {
        c = c * BigUint::from(big_n - 1 - i) / BigUint::from(i + 1);
    }
    Ok(ln_biguint(&c))
}

/// `n log(N-n+1) - (n-1) log n - log N`, a lower bound on
/// [`kl_support_formula`].
pub fn kl_lower_bound(d: u32, n: u32) -> Result<f64> {
    let big_n = check_shape(d, n)? as f64;
    let n = n as f64;
    Ok(n * (big_n - n + 1.0).ln() - (n - 1.0) * n.ln() - big_n.ln())
}

/// The counterexample as a generic finite setting over an enumerated space.
pub fn counterexample_setting(space: &PartitionSpace) -> Result<LearningSetting> {
    let (d, n, big_n) = (space.d(), space.n() as usize, space.cube_size());
    let rows = (big_n as u128).checked_pow(n as u32).filter(|&r| r <= 1 << 24).ok_or_else(|| {
        Error::GuardExceeded { what: "kernel rows".into(), needed: u128::MAX, cap: 1 << 24 }
    })? as usize;
    let mut kernel = Vec::with_capacity(rows);
    let mut s = vec![0u32; n];
    for idx in 0..rows {
        let mut x = idx;
        for slot in s.iter_mut().rev() {
            *slot = (x % big_n as usize) as u32;
            x /= big_n as usize;
        }
        kernel.push(space.kernel(&s)?);
    }
    let num: Vec<u64> = space
        .partitions()
        .iter()
        .flat_map(|w| (0..big_n).map(move |z| loss_eval(w, z).expect("partition covers the cube") as u64))
        .collect();
    LearningSetting::new(
        (0..big_n).map(|z| bitstring(z, d)).collect(),
        FiniteDist::uniform(big_n as usize),
        n,
        space.partitions().iter().map(|p| p.label()).collect(),
        kernel,
        LossTable::from_integers(num, 1, big_n as usize)?,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug)]
pub struct CEParams {
    /// `n = 2^r`.
    pub r: u32,
    pub d: u32,
    pub delta: Prob,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
}

impl CEParams {
    pub fn new(r: u32, d: u32, mode: Mode) -> Self {
        CEParams { r, d, delta: Prob::from_ratio(1, 2), mode, trials: 100_000, seed: 0 }
    }

    pub fn n(&self) -> u32 {
        1 << self.r
    }

    pub fn validate(&self) -> Result<()> {
        if self.r >= 31 || self.d <= self.r {
            return Err(Error::InvalidArgument(format!("need d > r, got d = {}, r = {}", self.d, self.r)));
        }
        check_shape(self.d, self.n())?;
        if self.delta.is_zero() {
            return Err(Error::InvalidArgument("delta must be positive".into()));
        }
        if self.mode == Mode::MonteCarlo && self.trials == 0 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least one trial".into()));
        }
        Ok(())
    }
}

/// A probability that is either exact or a Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Prob>,
    pub stderr: f64,
}

impl Estimate {
    fn exact(p: Prob) -> Self {
        Estimate { value: p.to_f64(), exact: Some(p), stderr: 0.0 }
    }

    fn proportion(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        Estimate { value: p, exact: None, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
    }

    /// `value >= target - 3 stderr`.
    pub fn clears(&self, target: f64) -> bool {
        self.value >= target - 3.0 * self.stderr
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropA {
    /// `KL(Q(W|S) || P_W)` at a duplicate-free `S`, from support counts.
    pub kl_duplicate_free: f64,
    /// Smallest and largest enumerated value over duplicate-free `S`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_enumerated: Option<(f64, f64)>,
    /// Largest enumerated value over `S` with a repeated element.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_duplicate: Option<f64>,
    pub kl_lower_bound: f64,
    pub threshold: f64,
    pub duplicate_prob: Prob,
    pub delta: Prob,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropB {
    pub per_sample_mi: Vec<f64>,
    pub max_sample_mi: f64,
    /// `P(W, Z_i) = P(W) P(Z_i)` checked exactly for every `i`.
    pub independent: bool,
    pub marginal_uniform: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropC {
    #[serde(with = "crate::probcore::rational::serde_option_rational")]
    pub expected_gap: Option<Rational>,
    pub estimate: f64,
    pub stderr: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropD {
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    /// `P(R - r_S >= 1/4)`.
    pub one_sided: Estimate,
    /// `P(|R - r_S| >= 1/4)`.
    pub absolute: Estimate,
    /// `P(R in [1/4, 3/4])`.
    pub risk_in_band: Estimate,
    /// `P(R in [1/4, 3/4] and r_S in {0, 1})`.
    pub proof_event: Estimate,
    /// Duplicate-free draws whose empirical risk is not 0 or 1.
    pub nonbinary_empirical: u64,
    /// `risk_in_band` clears 1/2 and no duplicate-free draw is non-binary.
    pub holds: bool,
    /// `one_sided` clears 1/2; recorded, never asserted.
    pub one_sided_clears_half: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Method {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CEReport {
    pub n: u32,
    pub d: u32,
    pub cube_size: u32,
    pub hypotheses: String,
    pub prop_a: PropA,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prop_b: Option<PropB>,
    pub prop_c: PropC,
    pub prop_d: PropD,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(with = "crate::probcore::rational::serde_option_rational")]
    pub expected_squared_gap: Option<Rational>,
    pub method: Method,
    /// Properties whose failure makes the report fail.
    pub asserted: Vec<String>,
    pub ok: bool,
}

impl CEReport {
    fn finish(mut self) -> Self {
        let flag = |p: &str| match p {
            "a" => self.prop_a.holds,
            "b" => self.prop_b.as_ref().is_some_and(|b| b.holds),
            "c" => self.prop_c.holds,
            _ => self.prop_d.holds,
        };
        self.ok = self.asserted.iter().all(|p| flag(p));
        self
    }
}

fn quarter() -> Rational {
    rational_from_i64(1, 4)
}

fn prop_a_base(p: &CEParams) -> Result<PropA> {
    let (d, n) = (p.d, p.n());
    let kl_duplicate_free = kl_support_formula(d, n)?;
    let duplicate_prob = duplicate_prob(n, d)?;
    let threshold = (n - 1) as f64;
    Ok(PropA {
        kl_duplicate_free,
        kl_enumerated: None,
        kl_duplicate: None,
        kl_lower_bound: kl_lower_bound(d, n)?,
        threshold,
        holds: kl_duplicate_free >= threshold && duplicate_prob <= p.delta,
        duplicate_prob,
        delta: p.delta.clone(),
    })
}

/// Certify properties (a) through (d) of the construction.
///
/// Exact mode enumerates the joint law of `(S, W)` and asserts (a), (b) and
/// (c). Monte Carlo mode samples `(S, W)` and asserts (a) and the band event
/// behind (d).
pub fn verify_properties(p: &CEParams, limits: &Limits) -> Result<CEReport> {
    p.validate()?;
    match p.mode {
        Mode::Exact => verify_exact(p, limits),
        Mode::MonteCarlo => verify_mc(p),
    }
}

fn verify_exact(p: &CEParams, limits: &Limits) -> Result<CEReport> {
    let (d, n) = (p.d, p.n());
    let space = PartitionSpace::new(d, n, limits)?;
    let big_n = space.cube_size();
    let setting = counterexample_setting(&space)?;
    let joint = setting.build_joint(limits)?;
    let opts = GapOptions { thresholds: vec![quarter()], max_moment: 2 };
    let stats = setting.gap_stats_from_joint(&joint, &opts)?;

    let pw = joint.marginal_dist("W")?;
    let marginal_uniform = pw.same_law(&FiniteDist::uniform(space.len()));
    let mut a = prop_a_base(p)?;
    let (mut lo, mut hi, mut dup_hi) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (si, row) in setting.kernel_rows().iter().enumerate() {
        let s = setting.decode_sample(si);
        let v = kl(row, &pw)?.0;
        if space.containing(&s).is_ok() {
            lo = lo.min(v);
            hi = hi.max(v);
        } else {
            dup_hi = dup_hi.max(v);
        }
    }
    a.kl_enumerated = Some((lo, hi));
    a.kl_duplicate = Some(dup_hi);
    a.holds = a.holds
        && (lo - a.kl_duplicate_free).abs() <= 1e-12
        && (hi - a.kl_duplicate_free).abs() <= 1e-12;

    let mut independent = true;
    for i in 0..n as usize {
        independent &= joint.is_independent(&["W"], &[LearningSetting::sample_axis(i).as_str()])?;
    }
    let max_sample_mi = stats.per_sample_mi.iter().cloned().fold(0.0, f64::max);
    let b = PropB {
        per_sample_mi: stats.per_sample_mi.clone(),
        max_sample_mi,
        independent,
        marginal_uniform,
        holds: independent && max_sample_mi == 0.0,
    };

    let c = PropC {
        estimate: crate::probcore::rational::to_f64(&stats.expected_gap),
        holds: stats.expected_gap.is_zero() && stats.expected_gap == stats.expected_gap_via_risks,
        expected_gap: Some(stats.expected_gap.clone()),
        stderr: 0.0,
    };

    // Band and binary-risk events over the exact joint.
    let wcount = space.len() as u64;
    let odd: Vec<u32> = space.partitions().iter().map(|w| w.odd_blocks() as u32).collect();
    let (mut band_w, mut event_w, mut nonbinary) = (0u128, 0u128, 0u64);
    for (key, weight) in joint.entries().iter().copied() {
        let (si, w) = ((key / wcount) as usize, (key % wcount) as usize);
        let s = setting.decode_sample(si);
        let emp: u64 = s.iter().map(|&z| setting.loss_table().num(w, z as usize)).sum();
        let band = 4 * n * odd[w] >= big_n && 4 * n * odd[w] <= 3 * big_n;
        let binary = emp == 0 || emp == n as u64;
        if band {
            band_w += weight;
            if binary {
                event_w += weight;
            }
        }
        if !binary && space.containing(&s).is_ok() {
            nonbinary += 1;
        }
    }
    let total = joint.total();
    let tail = &stats.tails[0];
    let risk_in_band = Estimate::exact(Prob::from_ratio(band_w, total));
    let half = ratio_u128(1, 2);
    let dprop = PropD {
        threshold: quarter(),
        one_sided_clears_half: *tail.one_sided.value() >= half,
        one_sided: Estimate::exact(tail.one_sided.clone()),
        absolute: Estimate::exact(tail.absolute.clone()),
        holds: ratio_u128(band_w, total) >= half && nonbinary == 0,
        risk_in_band,
        proof_event: Estimate::exact(Prob::from_ratio(event_w, total)),
        nonbinary_empirical: nonbinary,
    };

    Ok(CEReport {
        n,
        d,
        cube_size: big_n,
        hypotheses: space.len().to_string(),
        prop_a: a,
        prop_b: Some(b),
        prop_c: c,
        prop_d: dprop,
        expected_squared_gap: Some(stats.expected_squared_gap),
        method: Method { mode: Mode::Exact, trials: None, seed: None },
        asserted: vec!["a".into(), "b".into(), "c".into()],
        ok: false,
    }
    .finish())
}

fn verify_mc(p: &CEParams) -> Result<CEReport> {
    let (d, n) = (p.d, p.n());
    let big_n = 1u32 << d;
    let t = simulate(d, n, p.trials, p.seed)?;
    let trials = t.trials as f64;
    let scale = (big_n as f64) * (n as f64);
    let mean = t.gap_sum as f64 / trials / scale;
    let second = t.gap_sq_sum as f64 / trials / (scale * scale);
    let var = (second - mean * mean).max(0.0);
    let stderr = (var / trials).sqrt();
    let one_sided = Estimate::proportion(t.gap_at_least_quarter, t.trials);
    let risk_in_band = Estimate::proportion(t.risk_in_band, t.trials);
    let dprop = PropD {
        threshold: quarter(),
        one_sided_clears_half: one_sided.clears(0.5),
        one_sided,
        absolute: Estimate::proportion(t.abs_gap_at_least_quarter, t.trials),
        holds: risk_in_band.clears(0.5) && t.nonbinary_empirical == 0,
        risk_in_band,
        proof_event: Estimate::proportion(t.proof_event, t.trials),
        nonbinary_empirical: t.nonbinary_empirical,
    };
    Ok(CEReport {
        n,
        d,
        cube_size: big_n,
        hypotheses: partition_count(d, n)?.to_string(),
        prop_a: prop_a_base(p)?,
        prop_b: None,
        prop_c: PropC { expected_gap: None, estimate: mean, stderr, holds: mean.abs() <= 3.0 * stderr },
        prop_d: dprop,
        expected_squared_gap: None,
        method: Method { mode: Mode::MonteCarlo, trials: Some(p.trials), seed: Some(p.seed) },
        asserted: vec!["a".into(), "d".into()],
        ok: false,
    }
    .finish())
}
