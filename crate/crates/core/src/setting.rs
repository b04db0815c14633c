//! Finite learning settings: data law, training-set size, kernel `Q(W|S)`,
//! bounded loss table, and the exact gap functionals of the induced joint.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::probcore::rational::{
    checked_lcm, fmt_rational, parse_rational, ratio_u128, serde_rational, to_u128_parts,
};
use crate::probcore::{Axis, FiniteDist, JointDist, Prob, Rational};

/// Loss values as integer numerators over one denominator, row-major in `w`.
#[derive(Clone, Debug)]
pub struct LossTable {
    num: Vec<u64>,
    den: u64,
    data_size: usize,
}

/// Equality of loss values, whatever the common denominator.
impl PartialEq for LossTable {
    fn eq(&self, other: &Self) -> bool {
        self.data_size == other.data_size
            && self.num.len() == other.num.len()
            && self
                .num
                .iter()
                .zip(&other.num)
                .all(|(&a, &b)| a as u128 * other.den as u128 == b as u128 * self.den as u128)
    }
}

impl Eq for LossTable {}

impl LossTable {
    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        let data_size = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut den: u128 = 1;
        for row in rows {
            if row.len() != data_size {
                return Err(Error::InvalidSetting("loss rows have different lengths".into()));
            }
            for v in row {
                if v.is_negative() || *v > Rational::one() {
                    return Err(Error::LossRange(fmt_rational(v)));
                }
                den = checked_lcm(den, to_u128_parts(v)?.1)?;
            }
        }
        let den64 = u64::try_from(den).map_err(|_| Error::Overflow("building the loss table"))?;
        let mut num = Vec::with_capacity(rows.len() * data_size);
        for row in rows {
            for v in row {
                let (a, b) = to_u128_parts(v)?;
                num.push((a * (den / b)) as u64);
            }
        }
        Ok(LossTable { num, den: den64, data_size })
    }

    /// Integer losses `num[w][z] / den`.
    pub fn from_integers(num: Vec<u64>, den: u64, data_size: usize) -> Result<Self> {
        if den == 0 || num.iter().any(|&x| x > den) {
            return Err(Error::LossRange("numerator above denominator".into()));
        }
        Ok(LossTable { num, den, data_size })
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    #[inline]
    pub fn num(&self, w: usize, z: usize) -> u64 {
        self.num[w * self.data_size + z]
    }

    pub fn value(&self, w: usize, z: usize) -> Rational {
        ratio_u128(self.num(w, z) as u128, self.den as u128)
    }
}

/// A finite learning problem: `Z`, `P_Z`, `n`, `W`, `Q(W|S)` and `loss`.
///
/// Training sets are ordered tuples in `Z^n`; tuple `(s_1, ..., s_n)` has
/// index `sum_i s_i * |Z|^(n-i)`, which is also the row of its kernel entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearningSetting {
    data_labels: Vec<String>,
    pz: FiniteDist,
    n: usize,
    hypothesis_labels: Vec<String>,
    kernel: Vec<FiniteDist>,
    loss: LossTable,
}

impl LearningSetting {
    pub fn new(
        data_labels: Vec<String>,
        pz: FiniteDist,
        n: usize,
        hypothesis_labels: Vec<String>,
        kernel: Vec<FiniteDist>,
        loss: LossTable,
    ) -> Result<Self> {
        let z = data_labels.len();
        let w = hypothesis_labels.len();
        if z == 0 || w == 0 {
            return Err(Error::InvalidSetting("data and hypothesis spaces must be nonempty".into()));
        }
        if n == 0 {
            return Err(Error::InvalidSetting("training-set size must be positive".into()));
        }
        if pz.len() != z {
            return Err(Error::InvalidSetting(format!("P_Z has {} outcomes for |Z| = {z}", pz.len())));
        }
        let rows = (z as u128)
            .checked_pow(n as u32)
            .filter(|&r| r <= usize::MAX as u128)
            .ok_or(Error::Overflow("counting training sets"))?;
        if kernel.len() as u128 != rows {
            return Err(Error::InvalidSetting(format!(
                "kernel has {} rows but |Z|^n = {rows}",
                kernel.len()
            )));
        }
        if let Some(i) = kernel.iter().position(|r| r.len() != w) {
            return Err(Error::InvalidSetting(format!("kernel row {i} does not span {w} hypotheses")));
        }
        if loss.num.len() != w * z || loss.data_size != z {
            return Err(Error::InvalidSetting("loss table must be |W| x |Z|".into()));
        }
        Ok(LearningSetting { data_labels, pz, n, hypothesis_labels, kernel, loss })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data_size(&self) -> usize {
        self.data_labels.len()
    }

    pub fn hypothesis_count(&self) -> usize {
        self.hypothesis_labels.len()
    }

    pub fn data_labels(&self) -> &[String] {
        &self.data_labels
    }

    pub fn hypothesis_labels(&self) -> &[String] {
        &self.hypothesis_labels
    }

    pub fn pz(&self) -> &FiniteDist {
        &self.pz
    }

    pub fn loss_table(&self) -> &LossTable {
        &self.loss
    }

    pub fn loss(&self, w: usize, z: usize) -> Rational {
        self.loss.value(w, z)
    }

    pub fn kernel_rows(&self) -> &[FiniteDist] {
        &self.kernel
    }

    pub fn kernel_row(&self, s: &[u32]) -> &FiniteDist {
        &self.kernel[self.encode_sample(s)]
    }

    pub fn sample_count(&self) -> usize {
        self.kernel.len()
    }

    pub fn encode_sample(&self, s: &[u32]) -> usize {
        debug_assert_eq!(s.len(), self.n);
        s.iter().fold(0usize, |acc, &x| acc * self.data_size() + x as usize)
    }

    pub fn decode_sample(&self, mut idx: usize) -> Vec<u32> {
        let z = self.data_size();
        let mut s = vec![0u32; self.n];
        for slot in s.iter_mut().rev() {
            *slot = (idx % z) as u32;
            idx /= z;
        }
        s
    }

    /// Axis names used by [`LearningSetting::build_joint`]: `Z1..Zn`, `W`.
    pub fn sample_axis(i: usize) -> String {
        format!("Z{}", i + 1)
    }

    /// Common denominator of all kernel rows.
    pub(crate) fn kernel_denominator(&self) -> Result<u128> {
        let mut k = 1u128;
        for row in &self.kernel {
            k = checked_lcm(k, row.total())?;
        }
        Ok(k)
    }

    /// `P_Z(z)` weight over `pz().total()`.
    #[inline]
    pub(crate) fn pz_weight(&self, z: u32) -> u128 {
        self.pz.weight(z as usize)
    }

    /// Exact joint `P_{S,W} = P_Z^n x Q(W|S)` on axes `Z1..Zn, W`.
    pub fn build_joint(&self, limits: &Limits) -> Result<JointDist> {
        let z = self.data_size() as u128;
        let needed = z
            .checked_pow(self.n as u32)
            .and_then(|r| r.checked_mul(self.hypothesis_count() as u128));
        limits.check_states("joint of (S, W)", needed)?;
        let k = self.kernel_denominator()?;
        let mut axes: Vec<Axis> = (0..self.n)
            .map(|i| Axis::new(Self::sample_axis(i), self.data_size() as u32))
            .collect();
        axes.push(Axis::new("W", self.hypothesis_count() as u32));
        let wcount = self.hypothesis_count() as u64;
        let mut cells = Vec::new();
        for (si, row) in self.kernel.iter().enumerate() {
            let s = self.decode_sample(si);
            let mut ps: u128 = 1;
            for &x in &s {
                ps = ps
                    .checked_mul(self.pz_weight(x))
                    .ok_or(Error::Overflow("weighting training sets"))?;
            }
            if ps == 0 {
                continue;
            }
            let row_w = row.weights_over(k)?;
            for (w, &q) in row_w.iter().enumerate() {
                if q > 0 {
                    let weight = ps.checked_mul(q).ok_or(Error::Overflow("weighting (S, W) cells"))?;
                    cells.push((si as u64 * wcount + w as u64, weight));
                }
            }
        }
        JointDist::from_keyed(axes, cells)
    }

    /// `R(w) = E_{Z ~ P_Z}[loss(w, Z)]`.
    pub fn population_risk(&self, w: usize) -> Rational {
        let num: u128 = (0..self.data_size())
            .map(|z| self.pz.weight(z) * self.loss.num(w, z) as u128)
            .sum();
        ratio_u128(num, self.pz.total() * self.loss.den as u128)
    }

    /// `r_s(w) = (1/n) sum_i loss(w, s_i)`.
    pub fn empirical_risk(&self, w: usize, s: &[u32]) -> Rational {
        let num: u128 = s.iter().map(|&z| self.loss.num(w, z as usize) as u128).sum();
        ratio_u128(num, s.len() as u128 * self.loss.den as u128)
    }

    /// Gap `R(w) - r_s(w)` as an integer numerator over [`Self::gap_denominator`].
    pub(crate) fn gap_numerator(&self, risk_num: &[i128], w: usize, s: &[u32]) -> i128 {
        let emp: i128 = s.iter().map(|&z| self.loss.num(w, z as usize) as i128).sum();
        risk_num[w] * self.n as i128 - emp * self.pz.total() as i128
    }

    pub(crate) fn risk_numerators(&self) -> Vec<i128> {
        (0..self.hypothesis_count())
            .map(|w| {
                (0..self.data_size())
                    .map(|z| (self.pz.weight(z) * self.loss.num(w, z) as u128) as i128)
                    .sum()
            })
            .collect()
    }

    pub(crate) fn gap_denominator(&self) -> u128 {
        self.pz.total() * self.loss.den as u128 * self.n as u128
    }

    /// Law of the generalization gap over `P_{S,W}`: distinct gap values with
    /// their probabilities, ascending.
    pub fn gap_distribution(&self, joint: &JointDist) -> Vec<(Rational, Prob)> {
        let risk = self.risk_numerators();
        let wcount = self.hypothesis_count() as u64;
        let mut by_gap: HashMap<i128, u128> = HashMap::new();
        for &(key, weight) in joint.entries() {
            let (si, w) = ((key / wcount) as usize, (key % wcount) as usize);
            let g = self.gap_numerator(&risk, w, &self.decode_sample(si));
            *by_gap.entry(g).or_insert(0) += weight;
        }
        law_from_numerators(by_gap, self.gap_denominator(), joint.total())
    }

    /// Every exact gap functional plus per-example and pairwise information.
    pub fn gap_stats(&self, limits: &Limits, opts: &GapOptions) -> Result<GapStats> {
        let joint = self.build_joint(limits)?;
        self.gap_stats_from_joint(&joint, opts)
    }

    pub fn gap_stats_from_joint(&self, joint: &JointDist, opts: &GapOptions) -> Result<GapStats> {
        let law = self.gap_distribution(joint);
        let mut stats = GapStats::from_law(&law, opts);

        // Second route: E_W[R(W)] - E_{S,W}[r_S(W)].
        let pw = joint.marginal_dist("W")?;
        let e_pop = pw.expectation(|w| self.population_risk(w));
        let wcount = self.hypothesis_count() as u64;
        let mut emp_num = BigInt::zero();
        for &(key, weight) in joint.entries() {
            let s = self.decode_sample((key / wcount) as usize);
            let w = (key % wcount) as usize;
            let l: u128 = s.iter().map(|&z| self.loss.num(w, z as usize) as u128).sum();
            emp_num += BigInt::from(weight) * BigInt::from(l);
        }
        let e_emp = Rational::new(
            emp_num,
            BigInt::from(joint.total()) * BigInt::from(self.n as u128 * self.loss.den as u128),
        );
        stats.expected_gap_via_risks = e_pop - e_emp;

        let names: Vec<String> = (0..self.n).map(Self::sample_axis).collect();
        for name in &names {
            stats.per_sample_mi.push(joint.mutual_information(&["W"], &[name.as_str()])?.0);
        }
        for i in 0..self.n {
            for k in i + 1..self.n {
                let mi = joint.mutual_information(&["W"], &[names[i].as_str(), names[k].as_str()])?;
                stats.pair_mi.push(PairMi { i: i + 1, k: k + 1, mi: mi.0 });
            }
        }
        Ok(stats)
    }
}

pub(crate) fn law_from_numerators(
    by_gap: HashMap<i128, u128>,
    gap_den: u128,
    total: u128,
) -> Vec<(Rational, Prob)> {
    let mut law: Vec<(i128, u128)> = by_gap.into_iter().collect();
    law.sort_unstable_by_key(|&(g, _)| g);
    law.into_iter()
        .map(|(g, w)| {
            (
                Rational::new(BigInt::from(g), BigInt::from(gap_den)),
                Prob::new(ratio_u128(w, total)).expect("weight <= total"),
            )
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GapOptions {
    pub thresholds: Vec<Rational>,
    pub max_moment: u32,
}

impl Default for GapOptions {
    fn default() -> Self {
        let q = |a: i64| Rational::new(BigInt::from(a), BigInt::from(4));
        GapOptions { thresholds: vec![q(1), q(2), q(3), q(4)], max_moment: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moment {
    pub k: u32,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tail {
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    /// `P(R - r_S >= t)`.
    pub one_sided: Prob,
    /// `P(|R - r_S| >= t)`.
    pub absolute: Prob,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairMi {
    pub i: usize,
    pub k: usize,
    pub mi: f64,
}

/// Exact moments and tails of the generalization gap, with the information
/// terms that sample-wise and pairwise bounds consume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStats {
    #[serde(with = "serde_rational")]
    pub expected_gap: Rational,
    #[serde(with = "serde_rational")]
    pub expected_gap_via_risks: Rational,
    #[serde(with = "serde_rational")]
    pub expected_squared_gap: Rational,
    pub moments: Vec<Moment>,
    pub tails: Vec<Tail>,
    pub gap_is_constant: bool,
    pub per_sample_mi: Vec<f64>,
    pub pair_mi: Vec<PairMi>,
}

impl GapStats {
    pub(crate) fn from_law(law: &[(Rational, Prob)], opts: &GapOptions) -> GapStats {
        let moment = |k: u32| -> Rational {
            law.iter()
                .map(|(g, p)| num::pow(g.clone(), k as usize) * p.value())
                .fold(Rational::zero(), |a, b| a + b)
        };
        let tails = opts
            .thresholds
            .iter()
            .map(|t| {
                let sum = |pred: &dyn Fn(&Rational) -> bool| -> Prob {
                    let v = law
                        .iter()
                        .filter(|(g, _)| pred(g))
                        .fold(Rational::zero(), |a, (_, p)| a + p.value());
                    Prob::new(v).expect("tail mass in [0, 1]")
                };
                Tail {
                    threshold: t.clone(),
                    one_sided: sum(&|g| g >= t),
                    absolute: sum(&|g| g.abs() >= *t),
                }
            })
            .collect();
        let expected_gap = moment(1);
        GapStats {
            expected_gap_via_risks: expected_gap.clone(),
            expected_gap,
            expected_squared_gap: moment(2),
            moments: (1..=opts.max_moment.max(2)).map(|k| Moment { k, value: moment(k) }).collect(),
            tails,
            gap_is_constant: law.len() <= 1,
            per_sample_mi: Vec::new(),
            pair_mi: Vec::new(),
        }
    }

    pub fn moment(&self, k: u32) -> Option<&Rational> {
        self.moments.iter().find(|m| m.k == k).map(|m| &m.value)
    }
}

/// Upper limits on the sizes drawn by [`random_setting`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCaps {
    pub max_data: usize,
    pub max_n: usize,
    pub max_hypotheses: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps { max_data: 4, max_n: 3, max_hypotheses: 5 }
    }
}

fn composition(rng: &mut ChaCha8Rng, balls: u32, bins: usize) -> Vec<u128> {
    let mut w = vec![0u128; bins];
    for _ in 0..balls {
        w[rng.random_range(0..bins)] += 1;
    }
    w
}

/// A reproducible random finite setting. Masses and losses are random
/// rationals on small per-setting grids, so exact arithmetic stays in range.
pub fn random_setting(seed: u64, caps: SizeCaps) -> LearningSetting {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = rng.random_range(1..=caps.max_data.max(1));
    let n = rng.random_range(1..=caps.max_n.max(1));
    let w = rng.random_range(1..=caps.max_hypotheses.max(1));

    let pz_grain = rng.random_range(1..=(2 * z as u32 + 2));
    let pz = FiniteDist::from_weights(composition(&mut rng, pz_grain, z)).expect("positive grain");

    const KERNEL_GRAINS: [u32; 5] = [1, 2, 3, 4, 6];
    let grain = KERNEL_GRAINS[rng.random_range(0..KERNEL_GRAINS.len())];
    let rows = z.pow(n as u32);
    let kernel = (0..rows)
        .map(|_| FiniteDist::from_weights(composition(&mut rng, grain, w)).expect("positive grain"))
        .collect();

    let den = rng.random_range(1..=4u64);
    let num = (0..w * z).map(|_| rng.random_range(0..=den)).collect();
    let loss = LossTable::from_integers(num, den, z).expect("losses within [0, 1]");

    LearningSetting::new(
        (0..z).map(|i| format!("z{i}")).collect(),
        pz,
        n,
        (0..w).map(|i| format!("w{i}")).collect(),
        kernel,
        loss,
    )
    .expect("generated setting is valid")
}

/// JSON interchange document for a [`LearningSetting`]. Probabilities and
/// losses are `"num/den"` strings; kernel rows follow training-set index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingDoc {
    pub data_space: Vec<String>,
    pub pz: Vec<String>,
    pub n: usize,
    pub hypotheses: Vec<String>,
    pub kernel: Vec<Vec<String>>,
    pub loss: Vec<Vec<String>>,
}

impl SettingDoc {
    pub fn from_setting(s: &LearningSetting) -> Self {
        let probs = |d: &FiniteDist| d.probs().iter().map(|p| p.to_string()).collect();
        SettingDoc {
            data_space: s.data_labels.clone(),
            pz: probs(&s.pz),
            n: s.n,
            hypotheses: s.hypothesis_labels.clone(),
            kernel: s.kernel.iter().map(probs).collect(),
            loss: (0..s.hypothesis_count())
                .map(|w| (0..s.data_size()).map(|z| fmt_rational(&s.loss(w, z))).collect())
                .collect(),
        }
    }

    pub fn into_setting(self) -> Result<LearningSetting> {
        let parse_row = |row: &[String]| -> Result<Vec<Rational>> {
            row.iter().map(|x| parse_rational(x)).collect()
        };
        let pz = FiniteDist::from_probs(&parse_row(&self.pz)?)?;
        let kernel = self
            .kernel
            .iter()
            .enumerate()
            .map(|(i, row)| {
                FiniteDist::from_probs(&parse_row(row)?)
                    .map_err(|e| Error::InvalidSetting(format!("kernel row {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let loss_rows = self.loss.iter().map(|r| parse_row(r)).collect::<Result<Vec<_>>>()?;
        if loss_rows.len() != self.hypotheses.len() {
            return Err(Error::InvalidSetting("loss table needs one row per hypothesis".into()));
        }
        let loss = LossTable::from_rationals(&loss_rows)?;
        LearningSetting::new(self.data_space, pz, self.n, self.hypotheses, kernel, loss)
    }
}

impl LearningSetting {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SettingDoc::from_setting(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SettingDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_setting()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::rational::rational_from_i64;

    fn r(a: i64, b: i64) -> Rational {
        rational_from_i64(a, b)
    }

    /// Two data points, n = 2, kernel outputs w = s_1 (memorizes the first example).
    fn memorizer() -> LearningSetting {
        let kernel = (0..4).map(|s| FiniteDist::point_mass(2, s / 2)).collect();
        let loss = LossTable::from_rationals(&[vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap();
        LearningSetting::new(
            vec!["a".into(), "b".into()],
            FiniteDist::uniform(2),
            2,
            vec!["wa".into(), "wb".into()],
            kernel,
            loss,
        )
        .unwrap()
    }

    fn constant_kernel(loss_value: Rational) -> LearningSetting {
        let kernel = (0..9).map(|_| FiniteDist::point_mass(2, 1)).collect();
        let loss = LossTable::from_rationals(&[vec![loss_value.clone(); 3], vec![loss_value; 3]]).unwrap();
        LearningSetting::new(
            vec!["a".into(), "b".into(), "c".into()],
            FiniteDist::from_probs(&[r(1, 2), r(1, 3), r(1, 6)]).unwrap(),
            2,
            vec!["w0".into(), "w1".into()],
            kernel,
            loss,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_kernel_gives_point_mass_w() {
        let s = constant_kernel(r(1, 3));
        let j = s.build_joint(&Limits::default()).unwrap();
        assert!(j.marginal_dist("W").unwrap().same_law(&FiniteDist::point_mass(2, 1)));
        assert_eq!(j.mutual_information(&["W"], &["Z1", "Z2"]).unwrap().0, 0.0);
        let st = s.gap_stats_from_joint(&j, &GapOptions::default()).unwrap();
        assert!(st.expected_gap.is_zero());
        assert!(st.gap_is_constant);
    }

    #[test]
    fn risks() {
        let s = constant_kernel(Rational::zero());
        assert!(s.population_risk(0).is_zero());
        let c = constant_kernel(r(2, 5));
        assert_eq!(c.empirical_risk(1, &[0, 2]), r(2, 5));
        let m = memorizer();
        assert_eq!(m.empirical_risk(0, &[0, 1]), r(1, 2));
        assert_eq!(m.population_risk(0), r(1, 2));
    }

    #[test]
    fn memorizer_gap_stats() {
        let m = memorizer();
        let st = m.gap_stats(&Limits::default(), &GapOptions::default()).unwrap();
        // w = s_1 so loss on s_1 is 0; r_S = loss(s_1, s_2)/2, R = 1/2.
        // gap = 1/2 when s_2 = s_1, 0 otherwise.
        assert_eq!(st.expected_gap, r(1, 4));
        assert_eq!(st.expected_gap_via_risks, r(1, 4));
        assert_eq!(st.expected_squared_gap, r(1, 8));
        assert!((st.per_sample_mi[0] - 2f64.ln()).abs() < 1e-15);
        assert_eq!(st.per_sample_mi[1], 0.0);
        assert_eq!(st.tails[1].one_sided.to_string(), "1/2");
    }

    #[test]
    fn guard_is_enforced() {
        let m = memorizer();
        let tight = Limits { max_states: 7, ..Limits::default() };
        assert!(matches!(m.build_joint(&tight), Err(Error::GuardExceeded { needed: 8, .. })));
    }

    #[test]
    fn invalid_settings_rejected() {
        let loss = LossTable::from_rationals(&[vec![r(0, 1)]]).unwrap();
        let bad_rows = LearningSetting::new(
            vec!["a".into()],
            FiniteDist::uniform(1),
            2,
            vec!["w".into()],
            vec![],
            loss,
        );
        assert!(bad_rows.is_err());
        assert!(matches!(
            LossTable::from_rationals(&[vec![r(3, 2)]]),
            Err(Error::LossRange(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = memorizer();
        let back = LearningSetting::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(LearningSetting::from_json("{").is_err());
    }

    #[test]
    fn random_setting_is_reproducible() {
        let caps = SizeCaps::default();
        assert_eq!(random_setting(17, caps), random_setting(17, caps));
        let tiny = random_setting(3, SizeCaps { max_data: 1, max_n: 1, max_hypotheses: 1 });
        let st = tiny.gap_stats(&Limits::default(), &GapOptions::default()).unwrap();
        assert!(st.expected_gap.is_zero());
        assert!(st.expected_squared_gap.is_zero());
    }
}
