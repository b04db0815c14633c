//! Exact finite probability and the information measures built on it.
//!
//! Masses are exact rationals (integer weights over a shared denominator).
//! Logarithms are taken only at the very end, in `f64`, and a ratio that is
//! exactly one contributes exactly `0.0`, so independence is never blurred
//! into a small positive number.

mod dist;
mod joint;
pub mod rational;

pub use dist::{kl, FiniteDist};
pub use joint::{Axis, JointDist, Slice};
pub use rational::{fmt_rational, parse_rational, Nats, Prob, Rational};

use crate::error::Result;

/// `I(A; B)` between two disjoint axis groups.
pub fn mutual_information(joint: &JointDist, a: &[&str], b: &[&str]) -> Result<Nats> {
    joint.mutual_information(a, b)
}

/// `I^{C=c}(A; B)`: information between `A` and `B` under `P(. | C = c)`.
pub fn disintegrated_mi(
    joint: &JointDist,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    value: &[u32],
) -> Result<Nats> {
    joint.disintegrated_mi(a, b, c, value)
}

/// `log P(x, y) / (P(x) P(y))`.
pub fn information_density(joint: &JointDist, a: &[&str], b: &[&str], x: &[u32], y: &[u32]) -> Result<f64> {
    joint.information_density(a, b, x, y)
}
