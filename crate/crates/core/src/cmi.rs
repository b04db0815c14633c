//! The supersample setting: `2n` i.i.d. examples `Zt` in `n` pairs, a uniform
//! mask `J` picking one example from each pair as the training set, and the
//! conditional and evaluated-loss information bounds built on it.
//!
//! Axis names: `Zt{i}_{c}` for pair `i` (from 1) and column `c` in `{0, 1}`,
//! `J{i}`, `W`, and in the loss view `L{i}`, the pair of losses of `W` on
//! pair `i` encoded as `l0 * (den + 1) + l1` in units of the loss
//! denominator.

use num::bigint::BigInt;
use num::Signed;
use serde::Serialize;

use crate::bounds::{BoundReport, Term, LHS_ABS_GAP, LHS_G2};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::probcore::rational::serde_rational;
use crate::probcore::{Axis, JointDist, Rational};
use crate::setting::LearningSetting;

pub fn zt_axis(i: usize, c: u32) -> String {
    format!("Zt{}_{}", i + 1, c)
}

pub fn j_axis(i: usize) -> String {
    format!("J{}", i + 1)
}

pub fn l_axis(i: usize) -> String {
    format!("L{}", i + 1)
}

/// Exact law of `(Zt, J, W)` plus its pushforward onto `(Zt, J, Lambda)`.
#[derive(Clone, Debug)]
pub struct SupersampleJoint<'a> {
    base: &'a LearningSetting,
    joint: JointDist,
    losses: JointDist,
    expected_gap: Rational,
    expected_squared_gap: Rational,
}

/// Build the supersample joint. The guard covers `|Z|^(2n) 2^n |W|` states.
pub fn build_cmi_joint<'a>(setting: &'a LearningSetting, limits: &Limits) -> Result<SupersampleJoint<'a>> {
    let n = setting.n();
    let z = setting.data_size();
    let wc = setting.hypothesis_count();
    let needed = (z as u128)
        .checked_pow(2 * n as u32)
        .and_then(|x| x.checked_mul(1u128 << n))
        .and_then(|x| x.checked_mul(wc as u128));
    limits.check_states("supersample joint of (Zt, J, W)", needed)?;
    let k = setting.kernel_denominator()?;
    let rows: Vec<Vec<u128>> = setting
        .kernel_rows()
        .iter()
        .map(|r| r.weights_over(k))
        .collect::<Result<_>>()?;

    let mut axes = Vec::new();
    for i in 0..n {
        axes.push(Axis::new(zt_axis(i, 0), z as u32));
        axes.push(Axis::new(zt_axis(i, 1), z as u32));
    }
    for i in 0..n {
        axes.push(Axis::new(j_axis(i), 2));
    }
    axes.push(Axis::new("W", wc as u32));

    let zt_count = z.pow(2 * n as u32);
    let masks = 1usize << n;
    let risk = setting.risk_numerators();
    let mut cells = Vec::new();
    let mut zt = vec![0u32; 2 * n];
    let mut s = vec![0u32; n];
    let (mut gap_sum, mut gap_sq) = (0i128, 0i128);
    for zi in 0..zt_count {
        let mut x = zi;
        for slot in zt.iter_mut().rev() {
            *slot = (x % z) as u32;
            x /= z;
        }
        let mut pz: u128 = 1;
        for &v in &zt {
            pz = pz.checked_mul(setting.pz_weight(v)).ok_or(Error::Overflow("weighting supersamples"))?;
        }
        if pz == 0 {
            continue;
        }
        for j in 0..masks {
            for (i, slot) in s.iter_mut().enumerate() {
                let bit = (j >> (n - 1 - i)) & 1;
                *slot = zt[2 * i + bit];
            }
            let row = &rows[setting.encode_sample(&s)];
            for (w, &q) in row.iter().enumerate() {
                if q == 0 {
                    continue;
                }
                let weight = pz.checked_mul(q).ok_or(Error::Overflow("weighting (Zt, J, W) cells"))?;
                let key = ((zi * masks + j) * wc + w) as u64;
                cells.push((key, weight));
                let g = setting.gap_numerator(&risk, w, &s);
                let wi = i128::try_from(weight).map_err(|_| Error::Overflow("gap moments"))?;
                gap_sum = g
                    .checked_mul(wi)
                    .and_then(|t| gap_sum.checked_add(t))
                    .ok_or(Error::Overflow("gap moments"))?;
                gap_sq = g
                    .checked_mul(g)
                    .and_then(|t| t.checked_mul(wi))
                    .and_then(|t| gap_sq.checked_add(t))
                    .ok_or(Error::Overflow("gap moments"))?;
            }
        }
    }
    let joint = JointDist::from_keyed(axes, cells)?;
    let den = BigInt::from(setting.gap_denominator());
    let total = BigInt::from(joint.total());
    let expected_gap = Rational::new(BigInt::from(gap_sum), &den * &total);
    let expected_squared_gap = Rational::new(BigInt::from(gap_sq), &den * &den * &total);

    let lt = setting.loss_table();
    let base = lt.den() as u32 + 1;
    let mut laxes: Vec<Axis> = joint.axes()[..3 * n].to_vec();
    for i in 0..n {
        laxes.push(Axis::new(l_axis(i), base * base));
    }
    let losses = joint.map(laxes, |t| {
        let w = t[3 * n] as usize;
        let mut out = t[..3 * n].to_vec();
        for i in 0..n {
            let l0 = lt.num(w, t[2 * i] as usize) as u32;
            let l1 = lt.num(w, t[2 * i + 1] as usize) as u32;
            out.push(l0 * base + l1);
        }
        out
    })?;
    Ok(SupersampleJoint { base: setting, joint, losses, expected_gap, expected_squared_gap })
}

fn names(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

/// `E_C[sqrt(2 I^C(A; B))]`, or `sqrt(2 I(A; B))` when `C` is empty.
fn expected_sqrt(joint: &JointDist, a: &[String], b: &[String], c: &[String]) -> Result<f64> {
    let t = joint.total() as f64;
    Ok(joint
        .disintegration(&names(a), &names(b), &names(c))?
        .iter()
        .map(|s| (s.weight as f64 / t) * (2.0 * s.mi.0).sqrt())
        .sum())
}

fn cond_mi(joint: &JointDist, a: &[String], b: &[String], c: &[String]) -> Result<f64> {
    Ok(joint.conditional_mi(&names(a), &names(b), &names(c))?.0)
}

impl<'a> SupersampleJoint<'a> {
    pub fn base(&self) -> &LearningSetting {
        self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn joint(&self) -> &JointDist {
        &self.joint
    }

    /// Law of `(Zt, J, L_1, ..., L_n)`.
    pub fn loss_view(&self) -> &JointDist {
        &self.losses
    }

    pub fn expected_gap(&self) -> &Rational {
        &self.expected_gap
    }

    /// `G2` computed under the supersample law.
    pub fn expected_squared_gap(&self) -> &Rational {
        &self.expected_squared_gap
    }

    fn zt_all(&self) -> Vec<String> {
        (0..self.n()).flat_map(|i| [zt_axis(i, 0), zt_axis(i, 1)]).collect()
    }

    fn zt_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().flat_map(|&i| [zt_axis(i, 0), zt_axis(i, 1)]).collect()
    }

    fn js(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| j_axis(i)).collect()
    }

    fn ls(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| l_axis(i)).collect()
    }

    fn w() -> Vec<String> {
        vec!["W".to_string()]
    }

    /// `I(W; J | Zt)`.
    pub fn cmi(&self) -> Result<f64> {
        let all: Vec<usize> = (0..self.n()).collect();
        cond_mi(&self.joint, &Self::w(), &self.js(&all), &self.zt_all())
    }

    /// `I(W; J_i | Zt)`.
    pub fn cmi_i(&self, i: usize) -> Result<f64> {
        cond_mi(&self.joint, &Self::w(), &self.js(&[i]), &self.zt_all())
    }

    /// The training sample `S_i = Zt_{i, J_i}` has law `P_Z^n`.
    pub fn sample_marginal_consistent(&self) -> Result<bool> {
        let n = self.n();
        let axes: Vec<Axis> = (0..n)
            .map(|i| Axis::new(LearningSetting::sample_axis(i), self.base.data_size() as u32))
            .collect();
        let s_law = self.joint.map(axes.clone(), |t| (0..n).map(|i| t[2 * i + t[2 * n + i] as usize]).collect())?;
        let rows = self.base.sample_count();
        let product = JointDist::new(
            axes,
            (0..rows).map(|si| {
                let s = self.base.decode_sample(si);
                let w = s.iter().map(|&z| self.base.pz_weight(z)).product::<u128>();
                (s, w)
            }),
        )?;
        Ok(s_law.same_law(&product))
    }

    /// Per-example terms used by the sample-wise bounds.
    pub fn per_example(&self) -> Result<Vec<PerExample>> {
        let zt = self.zt_all();
        (0..self.n())
            .map(|i| {
                let pair = self.zt_of(&[i]);
                let (j, l) = (self.js(&[i]), self.ls(&[i]));
                Ok(PerExample {
                    i: i + 1,
                    cmi_given_zt: cond_mi(&self.joint, &Self::w(), &j, &zt)?,
                    strong_cmi: expected_sqrt(&self.joint, &Self::w(), &j, &pair)?,
                    weak_cmi: expected_sqrt(&self.joint, &Self::w(), &j, &zt)?,
                    ecmi_unconditional: expected_sqrt(&self.losses, &l, &j, &[])?,
                    ecmi_strong: expected_sqrt(&self.losses, &l, &j, &pair)?,
                    ecmi_weak: expected_sqrt(&self.losses, &l, &j, &zt)?,
                    ecmi_inside: [
                        cond_mi(&self.losses, &l, &j, &[])?,
                        cond_mi(&self.losses, &l, &j, &pair)?,
                        cond_mi(&self.losses, &l, &j, &zt)?,
                    ],
                    strong_cmi_zero: self.joint.independent_slices(&["W"], &names(&j), &names(&pair))?,
                    ecmi_unconditional_zero: self.losses.is_independent(&names(&l), &names(&j))?,
                    ecmi_strong_zero: self.losses.independent_slices(&names(&l), &names(&j), &names(&pair))?,
                })
            })
            .collect()
    }

    /// Per ordered pair `(i, k)`, `i != k`, the five information terms.
    pub fn per_pair(&self) -> Result<Vec<PerPair>> {
        let zt = self.zt_all();
        let mut out = Vec::new();
        for i in 0..self.n() {
            for k in i + 1..self.n() {
                let idx = [i, k];
                let (pair, j, l) = (self.zt_of(&idx), self.js(&idx), self.ls(&idx));
                let p = PerPair {
                    i: i + 1,
                    k: k + 1,
                    ecmi_unconditional: expected_sqrt(&self.losses, &l, &j, &[])?,
                    ecmi_pair: expected_sqrt(&self.losses, &l, &j, &pair)?,
                    ecmi_supersample: expected_sqrt(&self.losses, &l, &j, &zt)?,
                    cmi_pair: expected_sqrt(&self.joint, &Self::w(), &j, &pair)?,
                    cmi_supersample: expected_sqrt(&self.joint, &Self::w(), &j, &zt)?,
                    inside: [
                        cond_mi(&self.losses, &l, &j, &[])?,
                        cond_mi(&self.losses, &l, &j, &pair)?,
                        cond_mi(&self.losses, &l, &j, &zt)?,
                        cond_mi(&self.joint, &Self::w(), &j, &pair)?,
                        cond_mi(&self.joint, &Self::w(), &j, &zt)?,
                    ],
                };
                out.push(p);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerExample {
    pub i: usize,
    /// `I(W; J_i | Zt)`, at most `log 2`.
    pub cmi_given_zt: f64,
    /// `E_{Zt_i}[sqrt(2 I^{Zt_i}(W; J_i))]`.
    pub strong_cmi: f64,
    /// `E_{Zt}[sqrt(2 I^{Zt}(W; J_i))]`.
    pub weak_cmi: f64,
    /// `sqrt(2 I(L_i; J_i))`.
    pub ecmi_unconditional: f64,
    /// `E_{Zt_i}[sqrt(2 I^{Zt_i}(L_i; J_i))]`.
    pub ecmi_strong: f64,
    /// `E_{Zt}[sqrt(2 I^{Zt}(L_i; J_i))]`.
    pub ecmi_weak: f64,
    /// `I(L_i; J_i)`, `I(L_i; J_i | Zt_i)`, `I(L_i; J_i | Zt)`.
    pub ecmi_inside: [f64; 3],
    /// `W` and `J_i` independent on every slice of `Zt_i`, exactly.
    pub strong_cmi_zero: bool,
    pub ecmi_unconditional_zero: bool,
    pub ecmi_strong_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerPair {
    pub i: usize,
    pub k: usize,
    pub ecmi_unconditional: f64,
    pub ecmi_pair: f64,
    pub ecmi_supersample: f64,
    pub cmi_pair: f64,
    pub cmi_supersample: f64,
    /// The five information terms with the expectation inside the root, in
    /// the order above.
    pub inside: [f64; 5],
}

fn lhs_gap(sj: &SupersampleJoint) -> Rational {
    sj.expected_gap.abs()
}

/// `|E[R - r_S]| <= sqrt((2/n) I(W; J | Zt))`.
pub fn cmi_bound(sj: &SupersampleJoint) -> Result<BoundReport> {
    let i = sj.cmi()?;
    let rhs = (2.0 / sj.n() as f64 * i).sqrt();
    Ok(BoundReport::new("cmi", LHS_ABS_GAP, &lhs_gap(sj), rhs, None, vec![Term::new("I(W;J|Zt)", i)]))
}

fn samplewise(
    name: &str,
    sj: &SupersampleJoint,
    per: &[PerExample],
    label: &str,
    pick: impl Fn(&PerExample) -> f64,
) -> BoundReport {
    let n = sj.n() as f64;
    let terms: Vec<Term> = per.iter().map(|p| Term::new(format!("{label}[{}]", p.i), pick(p))).collect();
    let rhs = terms.iter().map(|t| t.value).sum::<f64>() / n;
    BoundReport::new(name, LHS_ABS_GAP, &lhs_gap(sj), rhs, None, terms)
}

/// Strong and weak sample-wise CMI bounds.
pub fn samplewise_cmi_bounds(sj: &SupersampleJoint) -> Result<(BoundReport, BoundReport)> {
    let per = sj.per_example()?;
    Ok(samplewise_cmi_from(sj, &per))
}

fn samplewise_cmi_from(sj: &SupersampleJoint, per: &[PerExample]) -> (BoundReport, BoundReport) {
    (
        samplewise("cmi-samplewise-strong", sj, per, "E sqrt(2 I^{Zt_i}(W;J_i))", |p| p.strong_cmi),
        samplewise("cmi-samplewise-weak", sj, per, "E sqrt(2 I^{Zt}(W;J_i))", |p| p.weak_cmi),
    )
}

/// Sample-wise e-CMI bounds: unconditional, given `Zt_i`, given `Zt`.
pub fn ecmi_bounds(sj: &SupersampleJoint) -> Result<[BoundReport; 3]> {
    let per = sj.per_example()?;
    Ok(ecmi_from(sj, &per))
}

fn ecmi_from(sj: &SupersampleJoint, per: &[PerExample]) -> [BoundReport; 3] {
    [
        samplewise("ecmi-unconditional", sj, per, "sqrt(2 I(L_i;J_i))", |p| p.ecmi_unconditional),
        samplewise("ecmi-strong", sj, per, "E sqrt(2 I^{Zt_i}(L_i;J_i))", |p| p.ecmi_strong),
        samplewise("ecmi-weak", sj, per, "E sqrt(2 I^{Zt}(L_i;J_i))", |p| p.ecmi_weak),
    ]
}

/// `G2 <= 5/(2n) + (2/n) sum_i E_{Zt}[sqrt(2 I^{Zt}(W; J_i))]`.
pub fn g2_weak_samplewise_bound(sj: &SupersampleJoint) -> Result<BoundReport> {
    let per = sj.per_example()?;
    Ok(g2_weak_from(sj, &per))
}

fn g2_weak_from(sj: &SupersampleJoint, per: &[PerExample]) -> BoundReport {
    let n = sj.n() as f64;
    let mut terms = vec![Term::new("constant", 5.0 / (2.0 * n))];
    let mut rhs = 5.0 / (2.0 * n);
    for p in per {
        terms.push(Term::new(format!("E sqrt(2 I^{{Zt}}(W;J_{}))", p.i), p.weak_cmi));
        rhs += 2.0 / n * p.weak_cmi;
    }
    BoundReport::new("g2-cmi-samplewise-weak", LHS_G2, &sj.expected_squared_gap, rhs, None, terms)
}

pub const PAIRWISE_NAMES: [&str; 5] = [
    "g2-pairwise-ecmi-unconditional",
    "g2-pairwise-ecmi-pair",
    "g2-pairwise-ecmi-supersample",
    "g2-pairwise-cmi-pair",
    "g2-pairwise-cmi-supersample",
];

/// The five pairwise squared-gap bounds
/// `G2 <= 5/(2n) + (2/n^2) sum_{i != k} X_{i,k}`.
pub fn g2_pairwise_cmi_bounds(sj: &SupersampleJoint) -> Result<[BoundReport; 5]> {
    let pairs = sj.per_pair()?;
    Ok(g2_pairwise_from(sj, &pairs))
}

fn g2_pairwise_from(sj: &SupersampleJoint, pairs: &[PerPair]) -> [BoundReport; 5] {
    let n = sj.n() as f64;
    let pick = |p: &PerPair, v: usize| match v {
        0 => p.ecmi_unconditional,
        1 => p.ecmi_pair,
        2 => p.ecmi_supersample,
        3 => p.cmi_pair,
        _ => p.cmi_supersample,
    };
    std::array::from_fn(|v| {
        let mut terms = vec![Term::new("constant", 5.0 / (2.0 * n))];
        let mut rhs = 5.0 / (2.0 * n);
        for p in pairs {
            let x = pick(p, v);
            terms.push(Term::new(format!("pair({},{})", p.i, p.k), x));
            // (i, k) and (k, i) contribute equally.
            rhs += 2.0 * 2.0 / (n * n) * x;
        }
        BoundReport::new(PAIRWISE_NAMES[v], LHS_G2, &sj.expected_squared_gap, rhs, None, terms)
    })
}

/// An inequality between two computed quantities, with whether it holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderCheck {
    pub claim: String,
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

impl OrderCheck {
    pub fn new(claim: impl Into<String>, left: f64, right: f64) -> Self {
        OrderCheck { claim: claim.into(), left, right, holds: left <= right + crate::bounds::TOLERANCE }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificates {
    /// Every `I^{Zt_i}(W; J_i)` is zero by exact independence.
    pub strong_cmi_zero: bool,
    /// Every `I(L_i; J_i)` is zero by exact independence.
    pub ecmi_unconditional_zero: bool,
    /// Every `I^{Zt_i}(L_i; J_i)` is zero by exact independence.
    pub ecmi_strong_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separations {
    pub strong_samplewise_rhs: f64,
    pub weak_samplewise_rhs: f64,
    pub ecmi_weak_rhs: f64,
    pub cmi: f64,
    pub strong_below_weak: bool,
    pub ecmi_weak_below_weak: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmiReport {
    #[serde(with = "serde_rational")]
    pub expected_gap: Rational,
    #[serde(with = "serde_rational")]
    pub expected_squared_gap: Rational,
    pub sample_marginal_consistent: bool,
    pub cmi: f64,
    pub per_example: Vec<PerExample>,
    pub per_pair: Vec<PerPair>,
    pub bounds: Vec<BoundReport>,
    pub certificates: Certificates,
    pub separations: Separations,
    /// Consequences of data processing and of `J` being independent of `Zt`;
    /// these must hold.
    pub orderings_inside: Vec<OrderCheck>,
    /// The same chains with the expectation outside the root; recorded only.
    pub orderings_outside: Vec<OrderCheck>,
}

impl CmiReport {
    /// Every bound holds, every per-example CMI is at most `log 2`, and every
    /// inside-the-root ordering holds.
    pub fn ok(&self) -> bool {
        self.sample_marginal_consistent
            && self.bounds.iter().all(|b| b.holds)
            && self.orderings_inside.iter().all(|o| o.holds)
            && self.per_example.iter().all(|p| p.cmi_given_zt <= std::f64::consts::LN_2 + crate::bounds::TOLERANCE)
    }
}

/// Every quantity and bound of the supersample setting in one pass.
pub fn cmi_report(sj: &SupersampleJoint) -> Result<CmiReport> {
    let per = sj.per_example()?;
    let pairs = sj.per_pair()?;
    let cmi = sj.cmi()?;
    let mut bounds = vec![cmi_bound(sj)?];
    let (strong, weak) = samplewise_cmi_from(sj, &per);
    let ecmi = ecmi_from(sj, &per);
    let sep = Separations {
        strong_samplewise_rhs: strong.rhs,
        weak_samplewise_rhs: weak.rhs,
        ecmi_weak_rhs: ecmi[2].rhs,
        cmi,
        strong_below_weak: strong.rhs < weak.rhs,
        ecmi_weak_below_weak: ecmi[2].rhs < weak.rhs,
    };
    bounds.push(strong);
    bounds.push(weak);
    bounds.extend(ecmi);
    bounds.push(g2_weak_from(sj, &per));
    bounds.extend(g2_pairwise_from(sj, &pairs));

    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for p in &per {
        let [u, s, w] = p.ecmi_inside;
        inside.push(OrderCheck::new(format!("I(L_{0};J_{0}) <= I(L_{0};J_{0}|Zt_{0})", p.i), u, s));
        inside.push(OrderCheck::new(format!("I(L_{0};J_{0}|Zt_{0}) <= I(L_{0};J_{0}|Zt)", p.i), s, w));
        inside.push(OrderCheck::new(format!("I(L_{0};J_{0}|Zt) <= I(W;J_{0}|Zt)", p.i), w, p.cmi_given_zt));
        outside.push(OrderCheck::new(format!("ecmi-unconditional[{}] <= ecmi-strong", p.i), p.ecmi_unconditional, p.ecmi_strong));
        outside.push(OrderCheck::new(format!("ecmi-strong[{}] <= ecmi-weak", p.i), p.ecmi_strong, p.ecmi_weak));
        outside.push(OrderCheck::new(format!("ecmi-weak[{}] <= cmi-weak", p.i), p.ecmi_weak, p.weak_cmi));
    }
    for p in &pairs {
        let [u, ep, es, cp, cs] = p.inside;
        let tag = format!("({},{})", p.i, p.k);
        inside.push(OrderCheck::new(format!("ecmi-unconditional{tag} <= ecmi-pair (inside)"), u, ep));
        inside.push(OrderCheck::new(format!("ecmi-pair{tag} <= ecmi-supersample (inside)"), ep, es));
        inside.push(OrderCheck::new(format!("ecmi-pair{tag} <= cmi-pair (inside)"), ep, cp));
        inside.push(OrderCheck::new(format!("ecmi-supersample{tag} <= cmi-supersample (inside)"), es, cs));
        outside.push(OrderCheck::new(format!("ecmi-unconditional{tag} <= ecmi-pair"), p.ecmi_unconditional, p.ecmi_pair));
        outside.push(OrderCheck::new(format!("ecmi-pair{tag} <= ecmi-supersample"), p.ecmi_pair, p.ecmi_supersample));
        outside.push(OrderCheck::new(format!("ecmi-pair{tag} <= cmi-pair"), p.ecmi_pair, p.cmi_pair));
        outside.push(OrderCheck::new(format!("ecmi-supersample{tag} <= cmi-supersample"), p.ecmi_supersample, p.cmi_supersample));
    }

    Ok(CmiReport {
        expected_gap: sj.expected_gap.clone(),
        expected_squared_gap: sj.expected_squared_gap.clone(),
        sample_marginal_consistent: sj.sample_marginal_consistent()?,
        cmi,
        certificates: Certificates {
            strong_cmi_zero: per.iter().all(|p| p.strong_cmi_zero),
            ecmi_unconditional_zero: per.iter().all(|p| p.ecmi_unconditional_zero),
            ecmi_strong_zero: per.iter().all(|p| p.ecmi_strong_zero),
        },
        per_example: per,
        per_pair: pairs,
        bounds,
        separations: sep,
        orderings_inside: inside,
        orderings_outside: outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::rational::rational_from_i64;
    use crate::probcore::FiniteDist;
    use crate::setting::{random_setting, LossTable, SizeCaps};
    use num::Zero;

    fn ignoring(n: usize) -> LearningSetting {
        let r = |a, b| rational_from_i64(a, b);
        LearningSetting::new(
            vec!["a".into(), "b".into()],
            FiniteDist::from_weights(vec![1, 3]).unwrap(),
            n,
            vec!["u".into(), "v".into(), "x".into()],
            vec![FiniteDist::from_weights(vec![1, 1, 2]).unwrap(); 1 << n],
            LossTable::from_rationals(&[vec![r(0, 1), r(1, 1)], vec![r(1, 2), r(1, 4)], vec![r(1, 1), r(1, 1)]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn smallest_case() {
        let s = ignoring(1);
        let sj = build_cmi_joint(&s, &Limits::default()).unwrap();
        assert_eq!(sj.joint().axis_names(), vec!["Zt1_0", "Zt1_1", "J1", "W"]);
        assert!(sj.sample_marginal_consistent().unwrap());
        assert_eq!(sj.cmi().unwrap(), 0.0);
    }

    #[test]
    fn independent_kernel_terms_vanish() {
        let s = ignoring(2);
        let sj = build_cmi_joint(&s, &Limits::default()).unwrap();
        let rep = cmi_report(&sj).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.bounds[0].rhs, 0.0);
        assert_eq!((rep.bounds[1].rhs, rep.bounds[2].rhs), (0.0, 0.0));
        let g2_weak = rep.bounds.iter().find(|b| b.name == "g2-cmi-samplewise-weak").unwrap();
        assert_eq!(g2_weak.rhs, 5.0 / 4.0);
        assert!(rep.expected_gap.is_zero());
    }

    #[test]
    fn n1_pairwise_is_constant() {
        let s = ignoring(1);
        let sj = build_cmi_joint(&s, &Limits::default()).unwrap();
        for b in g2_pairwise_cmi_bounds(&sj).unwrap() {
            assert_eq!(b.rhs, 2.5);
            assert!(b.holds);
        }
    }

    #[test]
    fn supersample_gap_matches_direct() {
        for seed in 0..20 {
            let s = random_setting(seed, SizeCaps { max_data: 3, max_n: 2, max_hypotheses: 3 });
            let sj = build_cmi_joint(&s, &Limits::default()).unwrap();
            let st = s.gap_stats(&Limits::default(), &Default::default()).unwrap();
            assert_eq!(sj.expected_gap(), &st.expected_gap);
            assert_eq!(sj.expected_squared_gap(), &st.expected_squared_gap);
            assert!(sj.sample_marginal_consistent().unwrap());
        }
    }

    #[test]
    fn guard() {
        let s = ignoring(2);
        let lim = Limits { max_states: 10, ..Limits::default() };
        assert!(matches!(build_cmi_joint(&s, &lim), Err(Error::GuardExceeded { .. })));
    }
}
