use num::{One, Zero};

use super::rational::{checked_lcm, ln_ratio, ratio_u128, to_u128_parts, Nats, Prob, Rational};
use crate::error::{Error, Result};

/// A finite distribution over outcomes `0..len`, stored as non-negative
/// integer weights over one common denominator.
#[derive(Clone, Debug)]
pub struct FiniteDist {
    weights: Vec<u128>,
    total: u128,
}

/// Equality of laws: `[1, 1]` and `[2, 2]` are the same distribution.
impl PartialEq for FiniteDist {
    fn eq(&self, other: &Self) -> bool {
        self.same_law(other)
    }
}

impl Eq for FiniteDist {}

impl FiniteDist {
    pub fn from_weights(weights: Vec<u128>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty outcome space".into()));
        }
        let mut total: u128 = 0;
        for &w in &weights {
            total = total
                .checked_add(w)
                .ok_or(Error::Overflow("summing distribution weights"))?;
        }
        if total == 0 {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        Ok(FiniteDist { weights, total })
    }

    /// Masses must be non-negative and sum to exactly one.
    pub fn from_probs(masses: &[Rational]) -> Result<Self> {
        let sum: Rational = masses.iter().cloned().sum();
        if sum != Rational::one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {} instead of 1",
                super::fmt_rational(&sum)
            )));
        }
        let parts = masses.iter().map(to_u128_parts).collect::<Result<Vec<_>>>()?;
        let mut den = 1u128;
        for &(_, d) in &parts {
            den = checked_lcm(den, d)?;
        }
        let weights = parts
            .iter()
            .map(|&(n, d)| n.checked_mul(den / d).ok_or(Error::Overflow("scaling masses")))
            .collect::<Result<Vec<_>>>()?;
        FiniteDist::from_weights(weights)
    }

    pub fn uniform(len: usize) -> Self {
        FiniteDist::from_weights(vec![1; len]).expect("uniform over a nonempty space")
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len);
        let mut weights = vec![0; len];
        weights[at] = 1;
        FiniteDist { weights, total: 1 }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[u128] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u128 {
        self.weights[i]
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn mass(&self, i: usize) -> Prob {
        Prob::new(ratio_u128(self.weights[i], self.total)).expect("weight <= total")
    }

    pub fn probs(&self) -> Vec<Prob> {
        (0..self.len()).map(|i| self.mass(i)).collect()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0).map(|(i, _)| i)
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    /// Same distribution with weights scaled to the given total.
    pub(crate) fn weights_over(&self, total: u128) -> Result<Vec<u128>> {
        debug_assert_eq!(total % self.total, 0);
        let k = total / self.total;
        self.weights
            .iter()
            .map(|&w| w.checked_mul(k).ok_or(Error::Overflow("rescaling weights")))
            .collect()
    }

    /// Exact equality of the underlying laws, regardless of denominators.
    pub fn same_law(&self, other: &FiniteDist) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| ratio_u128(a, self.total) == ratio_u128(b, other.total))
    }

    pub fn expectation(&self, f: impl Fn(usize) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for i in self.support() {
            acc += ratio_u128(self.weights[i], self.total) * f(i);
        }
        acc
    }
}

/// `KL(p || q)` in nats. `+inf` when `p` puts mass where `q` has none.
pub fn kl(p: &FiniteDist, q: &FiniteDist) -> Result<Nats> {
    if p.len() != q.len() {
        return Err(Error::SpaceMismatch { left: p.len(), right: q.len() });
    }
    let mut acc = 0.0;
    for i in p.support() {
        let wq = q.weights[i];
        if wq == 0 {
            return Ok(Nats::INFINITY);
        }
        let wp = p.weights[i];
        let term = ln_ratio(wp, q.total, p.total, wq);
        acc += (wp as f64 / p.total as f64) * term;
    }
    // Rounding can leave a tiny negative residue for nearly equal laws.
    Ok(Nats(acc.max(0.0)))
}
