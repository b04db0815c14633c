use std::collections::HashMap;
use std::fmt;

use num::bigint::BigUint;
use num::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::probcore::rational::ratio_u128;
use crate::probcore::{FiniteDist, Rational};

/// Largest cube dimension accepted anywhere in this module.
pub const MAX_DIM: u32 = 16;

/// XOR of all bits of all elements.
pub fn parity(elems: &[u32]) -> u8 {
    (elems.iter().fold(0u32, |acc, &z| acc ^ z.count_ones()) & 1) as u8
}

/// `z` written as `d` bits, most significant first.
pub fn bitstring(z: u32, d: u32) -> String {
    (0..d).rev().map(|b| if (z >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Result<u32> {
    if s.is_empty() || s.len() > MAX_DIM as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Parse(format!("`{s}` is not a bit string")));
    }
    Ok(u32::from_str_radix(s, 2).expect("validated bits"))
}

/// Validate a cube dimension and block size: `n` divides `N = 2^d`.
pub fn check_shape(d: u32, n: u32) -> Result<u32> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::InvalidArgument(format!("d must be in 1..={MAX_DIM}, got {d}")));
    }
    let big_n = 1u32 << d;
    if n == 0 || !n.is_power_of_two() || n > big_n {
        return Err(Error::InvalidArgument(format!(
            "block size n = {n} must be a power of two dividing 2^{d}"
        )));
    }
    Ok(big_n)
}

fn factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn set_partition_count(elems: u32, n: u32) -> BigUint {
    let k = elems / n;
    factorial(elems) / (num::pow(factorial(n), k as usize) * factorial(k))
}

/// `N! / ((n!)^(N/n) (N/n)!)`: partitions of the cube into blocks of size `n`.
pub fn partition_count(d: u32, n: u32) -> Result<BigUint> {
    let big_n = check_shape(d, n)?;
    Ok(set_partition_count(big_n, n))
}

/// `(N-n)! / ((n!)^(N/n-1) (N/n-1)!)`: partitions having a given block.
pub fn containing_count(d: u32, n: u32) -> Result<BigUint> {
    let big_n = check_shape(d, n)?;
    Ok(set_partition_count(big_n - n, n))
}

/// A partition of `{0,1}^d` into blocks of equal size, in canonical form:
/// elements ascending inside blocks, blocks ordered by their minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    d: u32,
    blocks: Vec<Vec<u32>>,
}

impl Partition {
    pub fn new(d: u32, mut blocks: Vec<Vec<u32>>) -> Result<Self> {
        let n = blocks.first().map(|b| b.len()).unwrap_or(0) as u32;
        let big_n = check_shape(d, n)?;
        let mut seen = vec![false; big_n as usize];
        for b in &mut blocks {
            if b.len() as u32 != n {
                return Err(Error::InvalidArgument("blocks must all have the same size".into()));
            }
            b.sort_unstable();
            for &z in b.iter() {
                if z >= big_n || seen[z as usize] {
                    return Err(Error::InvalidArgument(format!(
                        "element {z} is out of range or appears twice"
                    )));
                }
                seen[z as usize] = true;
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::InvalidArgument("blocks do not cover the cube".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { d, blocks })
    }

    fn from_canonical(d: u32, blocks: Vec<Vec<u32>>) -> Self {
        debug_assert!(blocks.windows(2).all(|w| w[0][0] < w[1][0]));
        Partition { d, blocks }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.blocks[0].len() as u32
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// `[z]_w`, the block holding `z`.
    pub fn block_of(&self, z: u32) -> Option<&[u32]> {
        self.blocks.iter().find(|b| b.binary_search(&z).is_ok()).map(|b| b.as_slice())
    }

    pub fn has_block(&self, set: &[u32]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.blocks.contains(&s)
    }

    pub fn odd_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| parity(b) == 1).count()
    }

    /// `R(w) = (n/N) * #{odd blocks}` under uniform data.
    pub fn risk(&self) -> Rational {
        ratio_u128(self.n() as u128 * self.odd_blocks() as u128, 1u128 << self.d)
    }

    /// Blocks as bit strings, e.g. `{00,11}|{01,10}`.
    pub fn label(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(|&z| bitstring(z, self.d)).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<String>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&z| bitstring(z, self.d)).collect())
            .collect();
        blocks.serialize(s)
    }
}

/// Parity of the block of `w` that holds `z`.
pub fn loss_eval(w: &Partition, z: u32) -> Result<u8> {
    w.block_of(z)
        .map(parity)
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not covered by the partition", bitstring(z, w.d))))
}

fn enumerate_into(rest: &[u32], n: usize, current: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
    if rest.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = rest[0];
    let others = &rest[1..];
    let mut pick: Vec<usize> = (0..n - 1).collect();
    loop {
        let mut block = Vec::with_capacity(n);
        block.push(first);
        block.extend(pick.iter().map(|&i| others[i]));
        let mut remaining: Vec<u32> = Vec::with_capacity(others.len() + 1 - n);
        let mut p = 0;
        for (i, &z) in others.iter().enumerate() {
            if p < pick.len() && pick[p] == i {
                p += 1;
            } else {
                remaining.push(z);
            }
        }
        current.push(block);
        enumerate_into(&remaining, n, current, out);
        current.pop();
        // Next (n-1)-combination of `others` in lexicographic order.
        let (k, m) = (pick.len(), others.len());
        let Some(i) = (0..k).rev().find(|&i| pick[i] < m - k + i) else {
            return;
        };
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn partitions_of(elems: Vec<u32>, n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    enumerate_into(&elems, n, &mut Vec::new(), &mut out);
    out
}

/// Every partition of `{0,1}^d` into blocks of size `n`, canonical and in
/// lexicographic order.
pub fn enumerate_partitions(d: u32, n: u32, limits: &Limits) -> Result<Vec<Partition>> {
    let big_n = check_shape(d, n)?;
    let count = partition_count(d, n)?;
    limits
        .check_partitions("partition enumeration (use Monte Carlo mode)", count.to_u128())?;
    Ok(partitions_of((0..big_n).collect(), n as usize)
        .into_iter()
        .map(|b| Partition::from_canonical(d, b))
        .collect())
}

fn distinct_block(d: u32, s: &[u32]) -> Result<Vec<u32>> {
    let big_n = check_shape(d, s.len() as u32)?;
    let mut block = s.to_vec();
    block.sort_unstable();
    if block.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateSample);
    }
    if block.last().is_some_and(|&z| z >= big_n) {
        return Err(Error::InvalidArgument("sample element outside the cube".into()));
    }
    Ok(block)
}

fn insert_block(mut blocks: Vec<Vec<u32>>, block: Vec<u32>) -> Vec<Vec<u32>> {
    let at = blocks.partition_point(|b| b[0] < block[0]);
    blocks.insert(at, block);
    blocks
}

/// `W_S`: the partitions having the elements of `s` as one block.
pub fn partitions_containing(d: u32, s: &[u32], limits: &Limits) -> Result<Vec<Partition>> {
    let block = distinct_block(d, s)?;
    let n = block.len() as u32;
    limits.check_partitions(
        "partition enumeration (use Monte Carlo mode)",
        containing_count(d, n)?.to_u128(),
    )?;
    let rest: Vec<u32> = (0..1u32 << d).filter(|z| block.binary_search(z).is_err()).collect();
    Ok(partitions_of(rest, n as usize)
        .into_iter()
        .map(|b| Partition::from_canonical(d, insert_block(b, block.clone())))
        .collect())
}

/// Cut a shuffled sequence into consecutive blocks of `n`.
fn cut(d: u32, elems: &[u32], n: usize, fixed: Option<Vec<u32>>) -> Partition {
    let mut blocks: Vec<Vec<u32>> = elems
        .chunks(n)
        .map(|c| {
            let mut b = c.to_vec();
            b.sort_unstable();
            b
        })
        .collect();
    blocks.extend(fixed);
    blocks.sort_unstable_by_key(|b| b[0]);
    Partition::from_canonical(d, blocks)
}

/// Uniform draw from `W_S` when `s` is duplicate free, otherwise from all
/// partitions: shuffle the free elements and cut them into blocks.
pub fn draw_hypothesis<R: Rng + ?Sized>(rng: &mut R, d: u32, n: u32, s: &[u32]) -> Result<Partition> {
    let big_n = check_shape(d, n)?;
    match distinct_block(d, s) {
        Ok(block) if block.len() as u32 == n => {
            let mut rest: Vec<u32> = (0..big_n).filter(|z| block.binary_search(z).is_err()).collect();
            rest.shuffle(rng);
            Ok(cut(d, &rest, n as usize, Some(block)))
        }
        Ok(_) => Err(Error::InvalidArgument(format!("sample must have {n} elements"))),
        Err(Error::DuplicateSample) => {
            let mut all: Vec<u32> = (0..big_n).collect();
            all.shuffle(rng);
            Ok(cut(d, &all, n as usize, None))
        }
        Err(e) => Err(e),
    }
}

/// Uniform draw from `W_S` for a duplicate-free `s`, reproducible from `seed`.
pub fn sample_hypothesis(d: u32, s: &[u32], seed: u64) -> Result<Partition> {
    use rand::SeedableRng;
    distinct_block(d, s)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    draw_hypothesis(&mut rng, d, s.len() as u32, s)
}

/// All partitions of one cube, with an index from blocks to the partitions
/// holding them.
#[derive(Clone, Debug)]
pub struct PartitionSpace {
    d: u32,
    n: u32,
    partitions: Vec<Partition>,
    by_block: HashMap<Vec<u32>, Vec<u32>>,
}

impl PartitionSpace {
    pub fn new(d: u32, n: u32, limits: &Limits) -> Result<Self> {
        let partitions = enumerate_partitions(d, n, limits)?;
        let mut by_block: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for (i, p) in partitions.iter().enumerate() {
            for b in p.blocks() {
                by_block.entry(b.clone()).or_default().push(i as u32);
            }
        }
        Ok(PartitionSpace { d, n, partitions, by_block })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cube_size(&self) -> u32 {
        1 << self.d
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.binary_search(p).ok()
    }

    /// Indices of the partitions in `W_S`.
    pub fn containing(&self, s: &[u32]) -> Result<&[u32]> {
        let block = distinct_block(self.d, s)?;
        if block.len() as u32 != self.n {
            return Err(Error::InvalidArgument(format!("sample must have {} elements", self.n)));
        }
        Ok(self.by_block.get(&block).map(|v| v.as_slice()).unwrap_or(&[]))
    }

    /// `Q(W | S = s)`: uniform over all partitions if `s` has a repeated
    /// element, uniform over `W_S` otherwise.
    pub fn kernel(&self, s: &[u32]) -> Result<FiniteDist> {
        match self.containing(s) {
            Ok(idx) => {
                let mut w = vec![0u128; self.len()];
                for &i in idx {
                    w[i as usize] = 1;
                }
                FiniteDist::from_weights(w)
            }
            Err(Error::DuplicateSample) => Ok(FiniteDist::uniform(self.len())),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_examples() {
        assert_eq!(parity(&[0b0000]), 0);
        assert_eq!(parity(&[0b01, 0b10]), 0);
        assert_eq!(parity(&[0b00, 0b01]), 1);
        assert_eq!(parity(&[]), 0);
    }

    #[test]
    fn loss_examples() {
        let w = Partition::new(2, vec![vec![0b00, 0b11], vec![0b01, 0b10]]).unwrap();
        assert_eq!(loss_eval(&w, 0b00).unwrap(), 0);
        let v = Partition::new(2, vec![vec![0b10, 0b11], vec![0b00, 0b01]]).unwrap();
        assert_eq!(loss_eval(&v, 0b11).unwrap(), 1);
        assert_eq!(loss_eval(&v, 0b10).unwrap(), loss_eval(&v, 0b11).unwrap());
        assert_eq!(w.risk(), Rational::from_integer(0.into()));
        assert_eq!(v.risk(), Rational::from_integer(1.into()));
        assert_eq!(v.label(), "{00,01}|{10,11}");
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(2, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1, 2], vec![3]]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let lim = Limits::default();
        assert_eq!(enumerate_partitions(2, 2, &lim).unwrap().len(), 3);
        assert_eq!(enumerate_partitions(3, 2, &lim).unwrap().len(), 105);
        assert_eq!(enumerate_partitions(2, 4, &lim).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(3, 4, &lim).unwrap().len(), 35);
        assert_eq!(enumerate_partitions(4, 8, &lim).unwrap().len(), 6435);
        let all = enumerate_partitions(3, 2, &lim).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(partition_count(4, 2).unwrap(), BigUint::from(2_027_025u32));
        assert_eq!(containing_count(4, 2).unwrap(), BigUint::from(135_135u32));
    }

    #[test]
    fn enumeration_guard() {
        let err = enumerate_partitions(4, 2, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { needed: 2_027_025, .. }));
    }

    #[test]
    fn containing_counts() {
        let lim = Limits::default();
        assert_eq!(partitions_containing(2, &[0b00, 0b11], &lim).unwrap().len(), 1);
        let w = partitions_containing(3, &[5, 2], &lim).unwrap();
        assert_eq!(w.len(), 15);
        assert!(w.iter().all(|p| p.has_block(&[2, 5])));
        assert_eq!(partitions_containing(4, &[0, 9], &lim).unwrap().len(), 135_135);
        assert!(matches!(partitions_containing(3, &[1, 1], &lim), Err(Error::DuplicateSample)));
    }

    #[test]
    fn kernel_rows() {
        let sp = PartitionSpace::new(2, 2, &Limits::default()).unwrap();
        assert!(sp.kernel(&[1, 1]).unwrap().same_law(&FiniteDist::uniform(3)));
        assert_eq!(sp.kernel(&[0, 3]).unwrap().support_size(), 1);
        let sp3 = PartitionSpace::new(3, 2, &Limits::default()).unwrap();
        let row = sp3.kernel(&[6, 1]).unwrap();
        assert_eq!(row.support_size(), 15);
        assert_eq!(row.total(), 15);
    }

    #[test]
    fn sampling_is_reproducible_and_valid() {
        let a = sample_hypothesis(4, &[3, 12], 99).unwrap();
        assert_eq!(a, sample_hypothesis(4, &[3, 12], 99).unwrap());
        assert!(a.has_block(&[3, 12]));
        assert_eq!(Partition::new(4, a.blocks().to_vec()).unwrap(), a);
        let only = sample_hypothesis(2, &[0, 3], 7).unwrap();
        assert_eq!(only.label(), "{00,11}|{01,10}");
        assert!(matches!(sample_hypothesis(3, &[2, 2], 1), Err(Error::DuplicateSample)));
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring(5, 4), "0101");
        assert_eq!(parse_bitstring("0101").unwrap(), 5);
        assert!(parse_bitstring("012").is_err());
    }
}
