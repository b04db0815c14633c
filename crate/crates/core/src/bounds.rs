//! Information-theoretic bounds on the expected gap and the expected squared
//! gap, each evaluated against the exact gap functional it bounds.

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::probcore::rational::{fmt_rational, to_f64};
use crate::probcore::{JointDist, Rational};
use crate::setting::{GapOptions, GapStats, LearningSetting};

/// Absolute slack allowed when comparing an exact left side with a
/// floating-point right side.
pub const TOLERANCE: f64 = 1e-12;

pub const LHS_ABS_GAP: &str = "|E[R - r_S]|";
pub const LHS_G2: &str = "E[(R - r_S)^2]";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

impl Term {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Term { label: label.into(), value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs_label: String,
    pub lhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_exact: Option<String>,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    pub terms: Vec<Term>,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        lhs_label: &str,
        lhs_exact: &Rational,
        rhs: f64,
        sigma: Option<&Rational>,
        terms: Vec<Term>,
    ) -> Self {
        let lhs = to_f64(lhs_exact);
        BoundReport {
            name: name.into(),
            lhs_label: lhs_label.to_string(),
            lhs,
            lhs_exact: Some(fmt_rational(lhs_exact)),
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + TOLERANCE,
            sigma: sigma.map(fmt_rational),
            terms,
        }
    }
}

/// Default subgaussian constant for losses in `[0, 1]`.
pub fn default_sigma() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn check_sigma(sigma: &Rational) -> Result<f64> {
    if !sigma.is_positive() {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    Ok(to_f64(sigma))
}

/// All `m`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        out.push(pick.clone());
        let Some(i) = (0..m).rev().find(|&i| pick[i] < n - m + i) else {
            return out;
        };
        pick[i] += 1;
        for j in i + 1..m {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// A setting together with its exact `(S, W)` law and gap functionals.
#[derive(Clone, Debug)]
pub struct Analysis<'a> {
    pub setting: &'a LearningSetting,
    pub joint: JointDist,
    pub stats: GapStats,
}

impl<'a> Analysis<'a> {
    pub fn new(setting: &'a LearningSetting, limits: &Limits) -> Result<Self> {
        let joint = setting.build_joint(limits)?;
        let stats = setting.gap_stats_from_joint(&joint, &GapOptions::default())?;
        Ok(Analysis { setting, joint, stats })
    }

    pub fn n(&self) -> usize {
        self.setting.n()
    }

    /// `I(W; Z_U)` for a set of example indices.
    pub fn subset_mi(&self, u: &[usize]) -> Result<f64> {
        let names: Vec<String> = u.iter().map(|&i| LearningSetting::sample_axis(i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Ok(self.joint.mutual_information(&["W"], &refs)?.0)
    }

    pub fn abs_gap(&self) -> Rational {
        self.stats.expected_gap.abs()
    }
}

/// `|E[R - r_S]| <= sqrt(2 sigma^2 I(W; S) / n)`.
pub fn xu_raginsky(a: &Analysis, sigma: &Rational) -> Result<BoundReport> {
    let s = check_sigma(sigma)?;
    let all: Vec<usize> = (0..a.n()).collect();
    let i = a.subset_mi(&all)?;
    let rhs = (2.0 * s * s * i / a.n() as f64).sqrt();
    Ok(BoundReport::new("xu-raginsky", LHS_ABS_GAP, &a.abs_gap(), rhs, Some(sigma), vec![Term::new("I(W;S)", i)]))
}

/// `|E[R - r_S]| <= (1/n) sum_i sqrt(2 sigma^2 I(W; Z_i))`.
pub fn bu_samplewise(a: &Analysis, sigma: &Rational) -> Result<BoundReport> {
    let s = check_sigma(sigma)?;
    let n = a.n() as f64;
    let mut terms = Vec::new();
    let mut rhs = 0.0;
    for (i, &mi) in a.stats.per_sample_mi.iter().enumerate() {
        terms.push(Term::new(format!("I(W;Z{})", i + 1), mi));
        rhs += (2.0 * s * s * mi).sqrt() / n;
    }
    Ok(BoundReport::new("bu-samplewise", LHS_ABS_GAP, &a.abs_gap(), rhs, Some(sigma), terms))
}

fn subset_label(u: &[usize]) -> String {
    let inner: Vec<String> = u.iter().map(|i| format!("Z{}", i + 1)).collect();
    format!("I(W;{})", inner.join(","))
}

/// `|E[R - r_S]| <= E_U[sqrt(2 sigma^2 I^U(W; S_U) / m)]`, `U` uniform over
/// `m`-subsets.
pub fn random_subset(a: &Analysis, sigma: &Rational, m: usize) -> Result<BoundReport> {
    let s = check_sigma(sigma)?;
    if m == 0 || m > a.n() {
        return Err(Error::InvalidArgument(format!("subset size m = {m} must be in 1..={}", a.n())));
    }
    let us = subsets(a.n(), m);
    let mut terms = Vec::new();
    let mut rhs = 0.0;
    for u in &us {
        let mi = a.subset_mi(u)?;
        terms.push(Term::new(subset_label(u), mi));
        rhs += (2.0 * s * s * mi / m as f64).sqrt();
    }
    rhs /= us.len() as f64;
    Ok(BoundReport::new(format!("random-subset(m={m})"), LHS_ABS_GAP, &a.abs_gap(), rhs, Some(sigma), terms))
}

/// `G2 <= 1/n + (1/n^2) sum_{i != k} sqrt(2 I(W; Z_i, Z_k))`.
pub fn g2_pairwise(a: &Analysis) -> Result<BoundReport> {
    let n = a.n() as f64;
    let mut terms = vec![Term::new("diagonal", 1.0 / n)];
    let mut rhs = 1.0 / n;
    for p in &a.stats.pair_mi {
        let c = (2.0 * p.mi).sqrt() / (n * n);
        // Each unordered pair appears twice in the sum over i != k.
        terms.push(Term::new(format!("I(W;Z{},Z{})", p.i, p.k), p.mi));
        rhs += 2.0 * c;
    }
    Ok(BoundReport::new("g2-pairwise", LHS_G2, &a.stats.expected_squared_gap, rhs, None, terms))
}

/// `G2 <= 1/n + 2 E_U[sqrt(I^U(W; S_U) / m)]` for `m >= 2`.
pub fn g2_subset(a: &Analysis, m: usize) -> Result<BoundReport> {
    if m < 2 {
        return Err(Error::InvalidArgument(
            "m must be at least 2: no bound on the expected squared gap can rest on \
             single-example information (the partition construction has I(W;Z_i) = 0 \
             with a positive squared gap)"
                .into(),
        ));
    }
    if m > a.n() {
        return Err(Error::InvalidArgument(format!("subset size m = {m} exceeds n = {}", a.n())));
    }
    let n = a.n() as f64;
    let us = subsets(a.n(), m);
    let mut terms = vec![Term::new("diagonal", 1.0 / n)];
    let mut avg = 0.0;
    for u in &us {
        let mi = a.subset_mi(u)?;
        terms.push(Term::new(subset_label(u), mi));
        avg += (mi / m as f64).sqrt();
    }
    let rhs = 1.0 / n + 2.0 * avg / us.len() as f64;
    Ok(BoundReport::new(format!("g2-subset(m={m})"), LHS_G2, &a.stats.expected_squared_gap, rhs, None, terms))
}

/// `g2rhs / t^2`: Markov's inequality applied to the squared gap.
pub fn markov_tail(g2rhs: f64, t: f64) -> Result<f64> {
    if t <= 0.0 || t.is_nan() {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    Ok(g2rhs / (t * t))
}

/// `P(|R - r_S| >= t) <= G2 / t^2` with both sides exact.
pub fn markov_tail_check(a: &Analysis, t: &Rational) -> Result<BoundReport> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    let law = a.setting.gap_distribution(&a.joint);
    let tail = law
        .iter()
        .filter(|(g, _)| g.abs() >= *t)
        .fold(Rational::zero(), |acc, (_, p)| acc + p.value());
    let bound = &a.stats.expected_squared_gap / (t * t);
    let mut r = BoundReport::new(
        format!("markov-tail(t={})", fmt_rational(t)),
        "P(|R - r_S| >= t)",
        &tail,
        to_f64(&bound),
        None,
        vec![Term::new("G2", to_f64(&a.stats.expected_squared_gap))],
    );
    r.holds = tail <= bound;
    Ok(r)
}

/// Decoupling check: `|E_P f - E_{P_X P_Y} f| <= sqrt(2 sigma^2 I(X; Y))`.
pub fn dv_lemma_check(
    joint: &JointDist,
    x: &[&str],
    y: &[&str],
    f: impl Fn(&[u32], &[u32]) -> Rational,
    sigma: &Rational,
) -> Result<BoundReport> {
    let s = check_sigma(sigma)?;
    let mi = joint.mutual_information(x, y)?.0;
    let mut names: Vec<&str> = x.to_vec();
    names.extend_from_slice(y);
    let xy = joint.marginal(&names)?;
    let px: Vec<(Vec<u32>, u128)> = joint.marginal(x)?.cells().collect();
    let py: Vec<(Vec<u32>, u128)> = joint.marginal(y)?.cells().collect();
    let split = x.len();
    let e_joint = xy.expectation(|t| f(&t[..split], &t[split..]));
    let mut e_prod = Rational::zero();
    for (a, wa) in &px {
        for (b, wb) in &py {
            e_prod += Rational::new((*wa).into(), 1.into()) * Rational::new((*wb).into(), 1.into()) * f(a, b);
        }
    }
    let t = Rational::new(joint.total().into(), 1.into());
    e_prod /= &t * &t;
    let lhs = (e_joint - e_prod).abs();
    let rhs = (2.0 * s * s * mi).sqrt();
    Ok(BoundReport::new("dv-lemma", "|E_P f - E_{P_X P_Y} f|", &lhs, rhs, Some(sigma), vec![Term::new("I(X;Y)", mi)]))
}

/// Every bound of this module for one setting, with `sigma` where relevant.
pub fn all_bounds(a: &Analysis, sigma: &Rational) -> Result<Vec<BoundReport>> {
    let n = a.n();
    let mut out = vec![xu_raginsky(a, sigma)?, bu_samplewise(a, sigma)?];
    for m in 1..=n {
        out.push(random_subset(a, sigma, m)?);
    }
    out.push(g2_pairwise(a)?);
    for m in 2..=n {
        out.push(g2_subset(a, m)?);
    }
    for t in &a.stats.tails {
        out.push(markov_tail_check(a, &t.threshold)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::rational::rational_from_i64;
    use crate::probcore::{Axis, FiniteDist};
    use crate::setting::{random_setting, LossTable, SizeCaps};

    fn r(a: i64, b: i64) -> Rational {
        rational_from_i64(a, b)
    }

    fn ignoring_kernel() -> LearningSetting {
        let row = FiniteDist::from_weights(vec![1, 2]).unwrap();
        let loss = LossTable::from_rationals(&[vec![r(0, 1), r(1, 1), r(1, 2)], vec![r(1, 3), r(1, 1), r(0, 1)]]).unwrap();
        LearningSetting::new(
            vec!["a".into(), "b".into(), "c".into()],
            FiniteDist::from_weights(vec![1, 1, 2]).unwrap(),
            2,
            vec!["u".into(), "v".into()],
            vec![row; 9],
            loss,
        )
        .unwrap()
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn independent_kernel_bounds() {
        let s = ignoring_kernel();
        let a = Analysis::new(&s, &Limits::default()).unwrap();
        let sig = default_sigma();
        let xr = xu_raginsky(&a, &sig).unwrap();
        assert_eq!((xr.lhs, xr.rhs), (0.0, 0.0));
        assert!(xr.holds);
        assert_eq!(bu_samplewise(&a, &sig).unwrap().rhs, 0.0);
        let g2 = g2_pairwise(&a).unwrap();
        assert_eq!(g2.rhs, 0.5);
        assert!(g2.lhs <= 1.0 / 8.0 + 1e-15);
    }

    #[test]
    fn subset_bound_endpoints() {
        let s = random_setting(5, SizeCaps { max_data: 3, max_n: 3, max_hypotheses: 3 });
        let a = Analysis::new(&s, &Limits::default()).unwrap();
        let sig = default_sigma();
        let n = a.n();
        let full = random_subset(&a, &sig, n).unwrap();
        assert!((full.rhs - xu_raginsky(&a, &sig).unwrap().rhs).abs() < 1e-15);
        let one = random_subset(&a, &sig, 1).unwrap();
        assert!((one.rhs - bu_samplewise(&a, &sig).unwrap().rhs).abs() < 1e-12);
        assert!(random_subset(&a, &sig, 0).is_err());
        assert!(random_subset(&a, &sig, n + 1).is_err());
    }

    #[test]
    fn g2_subset_rejects_singletons() {
        let s = ignoring_kernel();
        let a = Analysis::new(&s, &Limits::default()).unwrap();
        let e = g2_subset(&a, 1).unwrap_err().to_string();
        assert!(e.contains("at least 2"), "{e}");
        assert!(g2_subset(&a, 2).unwrap().holds);
    }

    #[test]
    fn markov() {
        assert_eq!(markov_tail(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(markov_tail(1.0 / 16.0, 1.0).unwrap(), 1.0 / 16.0);
        assert!(markov_tail(1.0, 0.0).is_err());
    }

    #[test]
    fn dv_lemma_examples() {
        let x = FiniteDist::from_weights(vec![1, 3]).unwrap();
        let y = FiniteDist::from_weights(vec![2, 1, 1]).unwrap();
        let prod = JointDist::product("X", &x, "Y", &y).unwrap();
        let f = |a: &[u32], b: &[u32]| r((a[0] + b[0]) as i64, 3);
        let rep = dv_lemma_check(&prod, &["X"], &["Y"], f, &default_sigma()).unwrap();
        assert_eq!(rep.lhs, 0.0);
        let diag = JointDist::new(
            vec![Axis::new("X", 2), Axis::new("Y", 2)],
            vec![(vec![0, 0], 1), (vec![1, 1], 1)],
        )
        .unwrap();
        let g = |a: &[u32], b: &[u32]| if a[0] == b[0] { r(1, 1) } else { r(0, 1) };
        let rep = dv_lemma_check(&diag, &["X"], &["Y"], g, &default_sigma()).unwrap();
        assert_eq!(rep.lhs_exact.as_deref(), Some("1/2"));
        assert!(rep.holds);
        let c = dv_lemma_check(&diag, &["X"], &["Y"], |_, _| r(1, 3), &default_sigma()).unwrap();
        assert_eq!(c.lhs, 0.0);
    }
}
