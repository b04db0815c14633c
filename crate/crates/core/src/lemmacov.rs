//! Parities of the groups of a uniformly random ordered partition of
//! `N0` zero bits and `N1` one bits into groups of size `n`.
//!
//! `Y_i` is the parity of group `i`. The closed forms below give
//! `P(Y_1 = 1, Y_2 = 1)` and `P(Y_1 = 1)` as double and single sums of
//! binomials; [`brute_force_parity_dist`] enumerates every arrangement.

use num::bigint::{BigInt, BigUint};
use num::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probcore::rational::{serde_rational, to_f64};
use crate::probcore::{Axis, JointDist, Prob, Rational};

/// Cap on the number of bit arrangements the brute-force oracle visits.
pub const BRUTE_FORCE_CAP: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParityEnsemble {
    pub n0: u32,
    pub n1: u32,
    pub n: u32,
}

impl ParityEnsemble {
    pub fn new(n0: u32, n1: u32, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("group size must be positive".into()));
        }
        if !(n0 + n1).is_multiple_of(n) {
            return Err(Error::InvalidArgument(format!("n = {n} does not divide N0 + N1 = {}", n0 + n1)));
        }
        Ok(ParityEnsemble { n0, n1, n })
    }

    pub fn total(&self) -> u32 {
        self.n0 + self.n1
    }

    /// Number of groups.
    pub fn k(&self) -> u32 {
        self.total() / self.n
    }

    fn need_groups(&self, k: u32) -> Result<()> {
        if self.k() < k {
            return Err(Error::InvalidArgument(format!(
                "need at least {k} groups, have {} (N0 = {}, N1 = {}, n = {})",
                self.k(),
                self.n0,
                self.n1,
                self.n
            )));
        }
        Ok(())
    }
}

/// `C(a, b)`, zero when `a < 0`, `b < 0` or `b > a`.
pub fn binom(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc = acc * BigUint::from((a - i) as u64) / BigUint::from((i + 1) as u64);
    }
    acc
}

fn ratio(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Summands of the joint and product-of-marginals sums, with their
/// denominators `M` and `M'`.
struct Terms {
    q: Vec<BigUint>,
    q_prime: Vec<BigUint>,
    m: BigUint,
    m_prime: BigUint,
}

fn terms(e: &ParityEnsemble) -> Terms {
    let (n0, n1, n) = (e.n0 as i64, e.n1 as i64, e.n as i64);
    let top = (n - 1) / 2;
    let mut q = Vec::new();
    let mut q_prime = Vec::new();
    for u in 0..=top {
        for v in 0..=top {
            let first = binom(n1, 2 * u + 1) * binom(n0, n - 2 * u - 1);
            q.push(&first * binom(n1 - 2 * u - 1, 2 * v + 1) * binom(n0 - n + 2 * u + 1, n - 2 * v - 1));
            q_prime.push(first * binom(n1, 2 * v + 1) * binom(n0, n - 2 * v - 1));
        }
    }
    let total = n0 + n1;
    Terms {
        q,
        q_prime,
        m: binom(total, n) * binom(total - n, n),
        m_prime: binom(total, n) * binom(total, n),
    }
}

/// `P(Y_1 = 1, Y_2 = 1)`.
pub fn joint_parity_prob(e: &ParityEnsemble) -> Result<Prob> {
    e.need_groups(2)?;
    let t = terms(e);
    let sum: BigUint = t.q.iter().sum();
    Prob::new(ratio(sum, t.m))
}

/// `P(Y_1 = 1)`.
pub fn marginal_parity_prob(e: &ParityEnsemble) -> Result<Prob> {
    e.need_groups(1)?;
    let (n0, n1, n) = (e.n0 as i64, e.n1 as i64, e.n as i64);
    let sum: BigUint = (0..=(n - 1) / 2).map(|u| binom(n1, 2 * u + 1) * binom(n0, n - 2 * u - 1)).sum();
    Prob::new(ratio(sum, binom(n0 + n1, n)))
}

/// `Cov[Y_1, Y_2] = P(Y_1 = 1, Y_2 = 1) - P(Y_1 = 1)^2`.
pub fn covariance(e: &ParityEnsemble) -> Result<Rational> {
    let pj = joint_parity_prob(e)?.into_inner();
    let pm = marginal_parity_prob(e)?.into_inner();
    Ok(pj - &pm * &pm)
}

/// Largest ratio `q_{u,v} / q'_{u,v}` over summands with `q' > 0`.
pub fn ratio_max(e: &ParityEnsemble) -> Result<Option<Rational>> {
    e.need_groups(2)?;
    let t = terms(e);
    Ok(t.q
        .iter()
        .zip(&t.q_prime)
        .filter(|(_, qp)| !qp.is_zero())
        .map(|(q, qp)| ratio(q * &t.m_prime, qp * &t.m))
        .max())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovReport {
    pub n0: u32,
    pub n1: u32,
    pub n: u32,
    pub p_joint: Prob,
    pub p_marg: Prob,
    #[serde(with = "serde_rational")]
    pub p_marg_sq: Rational,
    #[serde(with = "serde_rational")]
    pub cov: Rational,
    /// `cov / P(Y_1 = 1)^2`, absent when `P(Y_1 = 1) = 0`.
    pub cov_ratio: Option<f64>,
    #[serde(with = "crate::probcore::rational::serde_option_rational")]
    pub ratio_max: Option<Rational>,
}

impl CovReport {
    /// `cov <= delta * P(Y_1 = 1)^2`, exactly.
    pub fn within(&self, delta: &Rational) -> bool {
        self.cov <= delta * &self.p_marg_sq
    }
}

pub fn cov_report(e: &ParityEnsemble) -> Result<CovReport> {
    let p_joint = joint_parity_prob(e)?;
    let p_marg = marginal_parity_prob(e)?;
    let p_marg_sq = p_marg.value() * p_marg.value();
    let cov = p_joint.value() - &p_marg_sq;
    let cov_ratio = (!p_marg.is_zero()).then(|| to_f64(&(&cov / &p_marg_sq)));
    Ok(CovReport {
        n0: e.n0,
        n1: e.n1,
        n: e.n,
        ratio_max: ratio_max(e)?,
        p_joint,
        p_marg,
        p_marg_sq,
        cov,
        cov_ratio,
    })
}

/// Every ensemble on `1 <= N0, N1 <= cap` with `n | N0 + N1` and at least
/// two groups, row-major in `N0`.
pub fn cov_grid(n: u32, cap: u32) -> Result<Vec<CovReport>> {
    let mut out = Vec::new();
    for n0 in 1..=cap {
        for n1 in 1..=cap {
            if n > 0 && (n0 + n1) % n == 0 && (n0 + n1) / n >= 2 {
                out.push(cov_report(&ParityEnsemble::new(n0, n1, n)?)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum NPrime {
    /// Every grid ensemble with `min(N0, N1) >= n_prime` satisfies the bound.
    Found { n_prime: u32, cap: u32, violations: usize },
    /// Violations reach `min(N0, N1) = cap`; nothing past the grid is claimed.
    NotFound { cap: u32, violations: usize },
}

/// Smallest `N'` such that `Cov[Y_1, Y_2] <= delta P(Y_1 = 1)^2` for every
/// grid ensemble (see [`cov_grid`]) with `min(N0, N1) >= N'`.
pub fn find_nprime(n: u32, delta: &Rational, cap: u32) -> Result<NPrime> {
    if *delta <= Rational::zero() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    if n == 0 || cap == 0 {
        return Err(Error::InvalidArgument("n and cap must be positive".into()));
    }
    let grid = cov_grid(n, cap)?;
    let bad: Vec<u32> = grid.iter().filter(|r| !r.within(delta)).map(|r| r.n0.min(r.n1)).collect();
    let n_prime = bad.iter().max().map_or(1, |&m| m + 1);
    Ok(if n_prime > cap {
        NPrime::NotFound { cap, violations: bad.len() }
    } else {
        NPrime::Found { n_prime, cap, violations: bad.len() }
    })
}

/// `ratio_max` along `N0 = N1 = m` for each `m` in `range` where `n | 2m`.
pub fn diagonal_ratio_max(n: u32, range: std::ops::RangeInclusive<u32>) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::new();
    for m in range {
        if n > 0 && (2 * m) % n == 0 && 2 * m / n >= 2 {
            if let Some(r) = ratio_max(&ParityEnsemble::new(m, m, n)?)? {
                out.push((m, to_f64(&r)));
            }
        }
    }
    Ok(out)
}

/// Exact law of `(Y_1, ..., Y_k)` by visiting every arrangement of the bits
/// over the `N0 + N1` slots; groups are consecutive runs of `n` slots.
pub fn brute_force_parity_dist(e: &ParityEnsemble) -> Result<JointDist> {
    e.need_groups(1)?;
    let total = e.total();
    let count = binom(total as i64, e.n1 as i64);
    if total > 63 || count.to_u128().is_none_or(|c| c > BRUTE_FORCE_CAP) {
        return Err(Error::GuardExceeded {
            what: "parity brute force arrangements".into(),
            needed: count.to_u128().unwrap_or(u128::MAX),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let k = e.k() as usize;
    let group_masks: Vec<u64> = (0..k).map(|g| ((1u64 << e.n) - 1) << (g as u32 * e.n)).collect();
    let mut counts = vec![0u128; 1 << k];
    let full: u64 = if total == 0 { 0 } else { (1u64 << total) - 1 };
    let mut mask: u64 = if e.n1 == 0 { 0 } else { (1u64 << e.n1) - 1 };
    loop {
        let key = group_masks
            .iter()
            .fold(0usize, |acc, &g| (acc << 1) | ((mask & g).count_ones() & 1) as usize);
        counts[key] += 1;
        if mask == 0 {
            break;
        }
        // Next integer with the same number of set bits.
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        let next = (((ripple ^ mask) >> 2) / low) | ripple;
        if next & !full != 0 || next <= mask {
            break;
        }
        mask = next;
    }
    let axes = (1..=k).map(|i| Axis::new(format!("Y{i}"), 2)).collect();
    let cells = counts.into_iter().enumerate().filter(|(_, c)| *c > 0).map(|(key, c)| (key as u64, c)).collect();
    JointDist::from_keyed(axes, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::rational::rational_from_i64;

    fn e(n0: u32, n1: u32, n: u32) -> ParityEnsemble {
        ParityEnsemble::new(n0, n1, n).unwrap()
    }

    #[test]
    fn binomials_are_total() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert!(binom(3, 4).is_zero());
        assert!(binom(3, -1).is_zero());
        assert!(binom(-2, 0).is_zero());
        assert_eq!(binom(0, 0), BigUint::one());
    }

    #[test]
    fn small_values() {
        let x = e(2, 2, 2);
        assert_eq!(joint_parity_prob(&x).unwrap().to_string(), "2/3");
        assert_eq!(marginal_parity_prob(&x).unwrap().to_string(), "2/3");
        assert_eq!(covariance(&x).unwrap(), rational_from_i64(2, 9));
        let y = e(4, 2, 2);
        assert_eq!(joint_parity_prob(&y).unwrap().to_string(), "4/15");
        assert_eq!(marginal_parity_prob(&y).unwrap().to_string(), "8/15");
        assert_eq!(covariance(&y).unwrap(), rational_from_i64(-4, 225));
    }

    #[test]
    fn degenerate_ensembles() {
        assert!(joint_parity_prob(&e(6, 0, 2)).unwrap().is_zero());
        assert!(marginal_parity_prob(&e(6, 0, 2)).unwrap().is_zero());
        assert_eq!(marginal_parity_prob(&e(0, 3, 3)).unwrap().to_string(), "1/1");
        assert!(marginal_parity_prob(&e(0, 4, 4)).unwrap().is_zero());
        assert!(joint_parity_prob(&e(1, 1, 2)).is_err());
        assert!(ParityEnsemble::new(2, 1, 2).is_err());
    }

    #[test]
    fn brute_force_small() {
        let j = brute_force_parity_dist(&e(2, 2, 2)).unwrap();
        assert_eq!(j.total(), 6);
        assert_eq!(j.prob(&[1, 1]).unwrap().to_string(), "2/3");
        assert_eq!(j.marginal_dist("Y1").unwrap().mass(1).to_string(), "2/3");
        let z = brute_force_parity_dist(&e(6, 0, 2)).unwrap();
        assert_eq!(z.prob(&[0, 0, 0]).unwrap().to_string(), "1/1");
        let ones = brute_force_parity_dist(&e(0, 6, 3)).unwrap();
        assert_eq!(ones.prob(&[1, 1]).unwrap().to_string(), "1/1");
    }

    #[test]
    fn brute_force_guard() {
        assert!(matches!(
            brute_force_parity_dist(&e(14, 14, 2)),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn large_balanced_case() {
        let r = cov_report(&e(64, 64, 4)).unwrap();
        assert!(r.within(&rational_from_i64(1, 20)));
        assert_eq!(r.cov, Rational::new(127744.into(), 1250249515625u64.into()));
    }

    #[test]
    fn nprime_values() {
        let half = rational_from_i64(1, 2);
        let tenth = rational_from_i64(1, 10);
        let hundredth = rational_from_i64(1, 100);
        let found = |n, d: &Rational| match find_nprime(n, d, 64).unwrap() {
            NPrime::Found { n_prime, .. } => n_prime,
            other => panic!("{other:?}"),
        };
        assert_eq!(found(2, &half), 1);
        assert_eq!(found(2, &tenth), 4);
        assert_eq!(found(4, &half), 5);
        assert_eq!(found(4, &tenth), 5);
        assert_eq!(found(2, &hundredth), 8);
        assert_eq!(found(2, &rational_from_i64(1000, 1)), 1);
        assert!(matches!(
            find_nprime(2, &rational_from_i64(1, 1_000_000), 8).unwrap(),
            NPrime::NotFound { cap: 8, .. }
        ));
    }

    #[test]
    fn diagonal_ratio_decreases() {
        let seq = diagonal_ratio_max(2, 2..=11).unwrap();
        assert_eq!(seq.len(), 10);
        assert!((seq[0].1 - 1.5).abs() < 1e-15);
        assert!(seq.windows(2).all(|w| w[1].1 < w[0].1 && w[1].1 >= 1.0));
    }
}
