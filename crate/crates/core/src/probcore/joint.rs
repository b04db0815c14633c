use std::collections::HashMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::dist::FiniteDist;
use super::rational::{checked_lcm, ln_ratio, ratio_u128, to_u128_parts, Nats, Prob, Rational};
use crate::error::{Error, Result};

/// A named finite coordinate of a joint distribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: u32,
}

impl Axis {
    pub fn new(name: impl Into<String>, size: u32) -> Self {
        Axis { name: name.into(), size }
    }
}

/// Exact joint law over a product of named finite axes.
///
/// Outcome tuples are packed into a mixed-radix key (first axis most
/// significant). Only cells with positive weight are stored, sorted by key,
/// and every mass is `weight / total`. Marginals keep the same `total`, which
/// turns every information ratio into a product of integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDist {
    axes: Vec<Axis>,
    strides: Vec<u64>,
    entries: Vec<(u64, u128)>,
    total: u128,
}

/// One slice of a disintegration: the conditioning value, its weight in the
/// parent joint, and the information between the two groups on that slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub value: Vec<u32>,
    pub weight: u128,
    pub mi: Nats,
}

fn strides_for(axes: &[Axis]) -> Result<(Vec<u64>, u64)> {
    let mut strides = vec![0u64; axes.len()];
    let mut acc: u64 = 1;
    for (i, ax) in axes.iter().enumerate().rev() {
        if ax.size == 0 {
            return Err(Error::InvalidDistribution(format!("axis `{}` is empty", ax.name)));
        }
        strides[i] = acc;
        acc = acc
            .checked_mul(ax.size as u64)
            .ok_or(Error::Overflow("packing outcome tuples into 64-bit keys"))?;
    }
    Ok((strides, acc))
}

/// Sum weights of equal keys; output sorted by key, zero weights dropped.
pub(crate) fn accumulate(
    cells: impl IntoIterator<Item = (u64, u128)>,
    space: u64,
    hint: usize,
) -> Vec<(u64, u128)> {
    const DENSE_LIMIT: u64 = 1 << 22;
    if space <= DENSE_LIMIT && (space as usize) <= hint.saturating_mul(8).max(1 << 12) {
        let mut dense = vec![0u128; space as usize];
        for (k, w) in cells {
            dense[k as usize] += w;
        }
        dense
            .into_iter()
            .enumerate()
            .filter(|(_, w)| *w > 0)
            .map(|(k, w)| (k as u64, w))
            .collect()
    } else {
        let mut map: HashMap<u64, u128> = HashMap::with_capacity(hint);
        for (k, w) in cells {
            *map.entry(k).or_insert(0) += w;
        }
        let mut out: Vec<_> = map.into_iter().filter(|(_, w)| *w > 0).collect();
        out.sort_unstable_by_key(|&(k, _)| k);
        out
    }
}

/// Mutual information of a two-way table given as `(a, b, weight)` cells
/// whose weights sum to `slice_total`.
pub(crate) fn mi_of_cells(cells: &[(u64, u64, u128)], slice_total: u128) -> f64 {
    if cells.len() <= 1 {
        return 0.0;
    }
    let mut wa: HashMap<u64, u128> = HashMap::new();
    let mut wb: HashMap<u64, u128> = HashMap::new();
    for &(a, b, w) in cells {
        *wa.entry(a).or_insert(0) += w;
        *wb.entry(b).or_insert(0) += w;
    }
    if wa.len() == 1 || wb.len() == 1 {
        return 0.0;
    }
    let t = slice_total as f64;
    let mut acc = 0.0;
    for &(a, b, w) in cells {
        let r = ln_ratio(w, slice_total, wa[&a], wb[&b]);
        acc += (w as f64 / t) * r;
    }
    acc.max(0.0)
}

#[derive(Clone, Debug)]
struct Projector {
    parts: Vec<(u64, u64, u64)>,
    space: u64,
}

impl Projector {
    fn project(&self, key: u64) -> u64 {
        let mut out = 0;
        for &(stride, size, dst) in &self.parts {
            out += ((key / stride) % size) * dst;
        }
        out
    }
}

impl JointDist {
    /// Build from explicit `(tuple, weight)` cells; repeated tuples add up.
    pub fn new(axes: Vec<Axis>, cells: impl IntoIterator<Item = (Vec<u32>, u128)>) -> Result<Self> {
        let (strides, space) = strides_for(&axes)?;
        let mut keyed = Vec::new();
        for (tuple, w) in cells {
            if tuple.len() != axes.len() {
                return Err(Error::InvalidDistribution(format!(
                    "tuple of length {} for {} axes",
                    tuple.len(),
                    axes.len()
                )));
            }
            let mut key = 0u64;
            for (i, &v) in tuple.iter().enumerate() {
                if v >= axes[i].size {
                    return Err(Error::InvalidDistribution(format!(
                        "value {v} out of range for axis `{}`",
                        axes[i].name
                    )));
                }
                key += v as u64 * strides[i];
            }
            keyed.push((key, w));
        }
        let hint = keyed.len();
        let entries = accumulate(keyed, space, hint);
        Self::assemble(axes, strides, entries)
    }

    /// Build from exact rational masses that sum to one.
    pub fn from_probs(axes: Vec<Axis>, cells: Vec<(Vec<u32>, Rational)>) -> Result<Self> {
        let sum: Rational = cells.iter().map(|(_, p)| p.clone()).sum();
        if sum != Rational::one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {} instead of 1",
                super::fmt_rational(&sum)
            )));
        }
        let mut den = 1u128;
        let mut parts = Vec::with_capacity(cells.len());
        for (t, p) in cells {
            let (n, d) = to_u128_parts(&p)?;
            den = checked_lcm(den, d)?;
            parts.push((t, n, d));
        }
        let cells = parts
            .into_iter()
            .map(|(t, n, d)| {
                n.checked_mul(den / d)
                    .map(|w| (t, w))
                    .ok_or(Error::Overflow("scaling masses"))
            })
            .collect::<Result<Vec<_>>>()?;
        JointDist::new(axes, cells)
    }

    pub(crate) fn from_keyed(axes: Vec<Axis>, cells: Vec<(u64, u128)>) -> Result<Self> {
        let (strides, space) = strides_for(&axes)?;
        let hint = cells.len();
        let entries = accumulate(cells, space, hint);
        Self::assemble(axes, strides, entries)
    }

    fn assemble(axes: Vec<Axis>, strides: Vec<u64>, entries: Vec<(u64, u128)>) -> Result<Self> {
        let mut total: u128 = 0;
        for &(_, w) in &entries {
            total = total.checked_add(w).ok_or(Error::Overflow("summing joint weights"))?;
        }
        if total == 0 {
            return Err(Error::InvalidDistribution("joint has no mass".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidDistribution(format!("duplicate axis `{}`", a.name)));
            }
        }
        Ok(JointDist { axes, strides, entries, total })
    }

    pub fn from_dist(name: &str, d: &FiniteDist) -> Self {
        let axes = vec![Axis::new(name, d.len() as u32)];
        let cells = d.weights().iter().enumerate().map(|(i, &w)| (i as u64, w)).collect();
        JointDist::from_keyed(axes, cells).expect("valid distribution")
    }

    /// Independent product `P_X x P_Y` on axes `(x_name, y_name)`.
    pub fn product(x_name: &str, x: &FiniteDist, y_name: &str, y: &FiniteDist) -> Result<Self> {
        let axes = vec![Axis::new(x_name, x.len() as u32), Axis::new(y_name, y.len() as u32)];
        let mut cells = Vec::new();
        for i in x.support() {
            for j in y.support() {
                let w = x
                    .weight(i)
                    .checked_mul(y.weight(j))
                    .ok_or(Error::Overflow("forming a product law"))?;
                cells.push(((i * y.len() + j) as u64, w));
            }
        }
        JointDist::from_keyed(axes, cells)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis_names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// Number of outcome tuples with positive mass.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn entries(&self) -> &[(u64, u128)] {
        &self.entries
    }

    pub fn decode(&self, key: u64) -> Vec<u32> {
        self.axes
            .iter()
            .zip(&self.strides)
            .map(|(a, &s)| ((key / s) % a.size as u64) as u32)
            .collect()
    }

    pub fn encode(&self, tuple: &[u32]) -> Result<u64> {
        if tuple.len() != self.axes.len() {
            return Err(Error::InvalidArgument(format!(
                "tuple of length {} for {} axes",
                tuple.len(),
                self.axes.len()
            )));
        }
        let mut key = 0;
        for ((&v, a), &s) in tuple.iter().zip(&self.axes).zip(&self.strides) {
            if v >= a.size {
                return Err(Error::InvalidArgument(format!(
                    "value {v} out of range for axis `{}`",
                    a.name
                )));
            }
            key += v as u64 * s;
        }
        Ok(key)
    }

    /// Support cells as `(tuple, weight)`, in key order.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<u32>, u128)> + '_ {
        self.entries.iter().map(move |&(k, w)| (self.decode(k), w))
    }

    pub fn weight_of(&self, tuple: &[u32]) -> Result<u128> {
        let key = self.encode(tuple)?;
        Ok(self
            .entries
            .binary_search_by_key(&key, |&(k, _)| k)
            .map(|i| self.entries[i].1)
            .unwrap_or(0))
    }

    pub fn prob(&self, tuple: &[u32]) -> Result<Prob> {
        Ok(Prob::new(ratio_u128(self.weight_of(tuple)?, self.total)).expect("weight <= total"))
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.axis_index(n)?;
            if out.contains(&i) {
                return Err(Error::OverlappingAxes(n.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    fn disjoint(&self, groups: &[&[&str]]) -> Result<Vec<Vec<usize>>> {
        let mut seen: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for g in groups {
            let idx = self.indices(g)?;
            for &i in &idx {
                if seen.contains(&i) {
                    return Err(Error::OverlappingAxes(self.axes[i].name.clone()));
                }
                seen.push(i);
            }
            out.push(idx);
        }
        Ok(out)
    }

    fn projector(&self, idx: &[usize]) -> Projector {
        let mut parts = Vec::with_capacity(idx.len());
        let mut dst: u64 = 1;
        for &i in idx.iter().rev() {
            let size = self.axes[i].size as u64;
            parts.push((self.strides[i], size, dst));
            dst *= size;
        }
        parts.reverse();
        Projector { parts, space: dst }
    }

    /// Marginal on the named axes, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointDist> {
        if names.is_empty() {
            return Err(Error::InvalidArgument("marginal needs at least one axis".into()));
        }
        let idx = self.indices(names)?;
        let p = self.projector(&idx);
        let entries = accumulate(
            self.entries.iter().map(|&(k, w)| (p.project(k), w)),
            p.space,
            self.entries.len(),
        );
        let axes: Vec<Axis> = idx.iter().map(|&i| self.axes[i].clone()).collect();
        let (strides, _) = strides_for(&axes)?;
        Ok(JointDist { axes, strides, entries, total: self.total })
    }

    /// Single-axis marginal as a `FiniteDist`.
    pub fn marginal_dist(&self, name: &str) -> Result<FiniteDist> {
        let m = self.marginal(&[name])?;
        let mut w = vec![0u128; m.axes[0].size as usize];
        for &(k, x) in &m.entries {
            w[k as usize] = x;
        }
        FiniteDist::from_weights(w)
    }

    /// Condition on `axis = value`. The axis is kept and becomes a point mass.
    pub fn conditional(&self, axis: &str, value: u32) -> Result<JointDist> {
        self.conditional_on(&[(axis, value)])
    }

    pub fn conditional_on(&self, event: &[(&str, u32)]) -> Result<JointDist> {
        let mut checks = Vec::with_capacity(event.len());
        for &(name, v) in event {
            let i = self.axis_index(name)?;
            if v >= self.axes[i].size {
                return Err(Error::InvalidArgument(format!("value {v} out of range for axis `{name}`")));
            }
            checks.push((self.strides[i], self.axes[i].size as u64, v as u64));
        }
        let entries: Vec<(u64, u128)> = self
            .entries
            .iter()
            .copied()
            .filter(|&(k, _)| checks.iter().all(|&(s, n, v)| (k / s) % n == v))
            .collect();
        let total: u128 = entries.iter().map(|&(_, w)| w).sum();
        if total == 0 {
            return Err(Error::ZeroMassEvent);
        }
        Ok(JointDist { axes: self.axes.clone(), strides: self.strides.clone(), entries, total })
    }

    /// Cells regrouped as `(c, a, b, weight)`, sorted by `(c, a, b)`.
    fn regroup(&self, c: &[usize], a: &[usize], b: &[usize]) -> Vec<(u64, u64, u64, u128)> {
        let pc = self.projector(c);
        let pa = self.projector(a);
        let pb = self.projector(b);
        let ab = pa.space * pb.space;
        let space = pc.space * ab;
        let acc = accumulate(
            self.entries.iter().map(|&(k, w)| {
                (pc.project(k) * ab + pa.project(k) * pb.space + pb.project(k), w)
            }),
            space,
            self.entries.len(),
        );
        acc.into_iter()
            .map(|(key, w)| (key / ab, (key % ab) / pb.space, key % pb.space, w))
            .collect()
    }

    /// `I(A; B)` in nats.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<Nats> {
        Ok(self.disintegration(a, b, &[])?.pop().map(|s| s.mi).unwrap_or(Nats::ZERO))
    }

    /// `I^{C=c}(A; B)` for every conditioning value `c` with positive mass,
    /// in key order of `c`. With `C` empty this is a single slice.
    pub fn disintegration(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<Vec<Slice>> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidArgument("information needs two nonempty axis groups".into()));
        }
        let g = self.disjoint(&[a, b, c])?;
        let cells = self.regroup(&g[2], &g[0], &g[1]);
        let pc = self.projector(&g[2]);
        let mut out = Vec::new();
        let mut start = 0;
        let mut buf: Vec<(u64, u64, u128)> = Vec::new();
        while start < cells.len() {
            let cv = cells[start].0;
            let mut end = start;
            let mut wsum: u128 = 0;
            buf.clear();
            while end < cells.len() && cells[end].0 == cv {
                buf.push((cells[end].1, cells[end].2, cells[end].3));
                wsum += cells[end].3;
                end += 1;
            }
            let value = decode_parts(&pc, cv);
            out.push(Slice { value, weight: wsum, mi: Nats(mi_of_cells(&buf, wsum)) });
            start = end;
        }
        Ok(out)
    }

    /// Disintegrated information `I^{C=c}(A; B)` at one conditioning value.
    pub fn disintegrated_mi(&self, a: &[&str], b: &[&str], c: &[&str], value: &[u32]) -> Result<Nats> {
        if value.len() != c.len() {
            return Err(Error::InvalidArgument("conditioning value has the wrong arity".into()));
        }
        let event: Vec<(&str, u32)> = c.iter().copied().zip(value.iter().copied()).collect();
        let cond = self.conditional_on(&event)?;
        cond.mutual_information(a, b)
    }

    /// `I(A; B | C) = E_C[I^C(A; B)]`.
    pub fn conditional_mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<Nats> {
        let t = self.total as f64;
        Ok(Nats(
            self.disintegration(a, b, c)?
                .iter()
                .map(|s| (s.weight as f64 / t) * s.mi.0)
                .sum(),
        ))
    }

    /// `log P(a, b) / (P(a) P(b))` at one point; `-inf` where the joint is zero.
    pub fn information_density(&self, a: &[&str], b: &[&str], x: &[u32], y: &[u32]) -> Result<f64> {
        let g = self.disjoint(&[a, b])?;
        if x.len() != g[0].len() || y.len() != g[1].len() {
            return Err(Error::InvalidArgument("point has the wrong arity".into()));
        }
        let pa = self.projector(&g[0]);
        let pb = self.projector(&g[1]);
        let xa = encode_parts(&pa, x, &g[0], &self.axes)?;
        let yb = encode_parts(&pb, y, &g[1], &self.axes)?;
        let (mut wx, mut wy, mut wxy) = (0u128, 0u128, 0u128);
        for &(k, w) in &self.entries {
            let (ka, kb) = (pa.project(k), pb.project(k));
            if ka == xa {
                wx += w;
                if kb == yb {
                    wxy += w;
                }
            }
            if kb == yb {
                wy += w;
            }
        }
        if wx == 0 || wy == 0 {
            return Err(Error::ZeroMassEvent);
        }
        if wxy == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(ln_ratio(wxy, self.total, wx, wy))
    }

    /// Exact test of `P(A, B) = P(A) P(B)`.
    pub fn is_independent(&self, a: &[&str], b: &[&str]) -> Result<bool> {
        self.independent_slices(a, b, &[])
    }

    /// Exact test that `A` and `B` are independent on every slice of `C`.
    pub fn independent_slices(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<bool> {
        let g = self.disjoint(&[a, b, c])?;
        let cells = self.regroup(&g[2], &g[0], &g[1]);
        let mut start = 0;
        while start < cells.len() {
            let cv = cells[start].0;
            let mut end = start;
            let mut wa: HashMap<u64, u128> = HashMap::new();
            let mut wb: HashMap<u64, u128> = HashMap::new();
            let mut tot: u128 = 0;
            while end < cells.len() && cells[end].0 == cv {
                let (_, x, y, w) = cells[end];
                *wa.entry(x).or_insert(0) += w;
                *wb.entry(y).or_insert(0) += w;
                tot += w;
                end += 1;
            }
            if end - start != wa.len() * wb.len() {
                return Ok(false);
            }
            for &(_, x, y, w) in &cells[start..end] {
                if ln_ratio(w, tot, wa[&x], wb[&y]) != 0.0 {
                    return Ok(false);
                }
            }
            start = end;
        }
        Ok(true)
    }

    /// Push the law forward through `f`, which maps each support tuple to a
    /// tuple over `axes`.
    pub fn map(&self, axes: Vec<Axis>, mut f: impl FnMut(&[u32]) -> Vec<u32>) -> Result<JointDist> {
        let cells: Vec<(Vec<u32>, u128)> = self
            .entries
            .iter()
            .map(|&(k, w)| (f(&self.decode(k)), w))
            .collect();
        let out = JointDist::new(axes, cells)?;
        debug_assert_eq!(out.total, self.total);
        Ok(out)
    }

    /// `E[f]` over the joint, exact.
    pub fn expectation(&self, mut f: impl FnMut(&[u32]) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for &(k, w) in &self.entries {
            acc += ratio_u128(w, 1) * f(&self.decode(k));
        }
        acc / ratio_u128(self.total, 1)
    }

    /// `sum_{cells} P(cell) * f(cell)` in floating point, in key order.
    pub fn expectation_f64(&self, mut f: impl FnMut(&[u32]) -> f64) -> f64 {
        let t = self.total as f64;
        self.entries
            .iter()
            .map(|&(k, w)| (w as f64 / t) * f(&self.decode(k)))
            .sum()
    }

    /// Exact equality of laws, allowing different common denominators.
    pub fn same_law(&self, other: &JointDist) -> bool {
        self.axes == other.axes
            && self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(&(k1, w1), &(k2, w2))| {
                k1 == k2 && ln_ratio(w1, other.total, w2, self.total) == 0.0
            })
    }
}

fn decode_parts(p: &Projector, key: u64) -> Vec<u32> {
    p.parts.iter().map(|&(_, size, dst)| ((key / dst) % size) as u32).collect()
}

fn encode_parts(p: &Projector, v: &[u32], idx: &[usize], axes: &[Axis]) -> Result<u64> {
    let mut key = 0;
    for ((&(_, size, dst), &x), &i) in p.parts.iter().zip(v).zip(idx) {
        if x as u64 >= size {
            return Err(Error::InvalidArgument(format!(
                "value {x} out of range for axis `{}`",
                axes[i].name
            )));
        }
        key += x as u64 * dst;
    }
    Ok(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::rational::rational_from_i64;

    fn r(a: i64, b: i64) -> Rational {
        rational_from_i64(a, b)
    }

    fn correlated(k: u32) -> JointDist {
        JointDist::new(
            vec![Axis::new("X", k), Axis::new("Y", k)],
            (0..k).map(|i| (vec![i, i], 1)),
        )
        .unwrap()
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let px = FiniteDist::from_probs(&[r(1, 3), r(2, 3)]).unwrap();
        let py = FiniteDist::from_probs(&[r(1, 4), r(1, 4), r(1, 2)]).unwrap();
        let j = JointDist::product("X", &px, "Y", &py).unwrap();
        assert!(j.marginal_dist("X").unwrap().same_law(&px));
        assert!(j.marginal_dist("Y").unwrap().same_law(&py));
        assert!(j.marginal(&["X", "Y"]).unwrap().same_law(&j));
        let swapped = j.marginal(&["Y", "X"]).unwrap();
        assert_eq!(swapped.prob(&[2, 1]).unwrap().to_string(), "1/3");
    }

    #[test]
    fn marginal_errors() {
        let j = correlated(2);
        assert_eq!(j.marginal(&["Q"]).unwrap_err(), Error::UnknownAxis("Q".into()));
        assert!(j.marginal(&[]).is_err());
        assert!(j.marginal(&["X", "X"]).is_err());
    }

    #[test]
    fn conditional_of_product_keeps_factor() {
        let px = FiniteDist::from_probs(&[r(1, 5), r(4, 5)]).unwrap();
        let py = FiniteDist::uniform(3);
        let j = JointDist::product("X", &px, "Y", &py).unwrap();
        let c = j.conditional("Y", 2).unwrap();
        assert!(c.marginal_dist("X").unwrap().same_law(&px));
        assert!(c.marginal_dist("Y").unwrap().same_law(&FiniteDist::point_mass(3, 2)));
    }

    #[test]
    fn conditional_on_zero_mass_fails() {
        let j = correlated(3);
        let c = j.conditional("X", 1).unwrap();
        assert_eq!(c.conditional("Y", 0).unwrap_err(), Error::ZeroMassEvent);
        let point = JointDist::from_dist("X", &FiniteDist::point_mass(3, 1));
        assert!(point.conditional("X", 1).unwrap().same_law(&point));
    }

    #[test]
    fn mi_basic_cases() {
        let px = FiniteDist::from_probs(&[r(1, 3), r(2, 3)]).unwrap();
        let j = JointDist::product("X", &px, "Y", &FiniteDist::uniform(4)).unwrap();
        assert_eq!(j.mutual_information(&["X"], &["Y"]).unwrap(), Nats(0.0));
        assert!(j.is_independent(&["X"], &["Y"]).unwrap());
        for k in 1..7 {
            let c = correlated(k);
            let mi = c.mutual_information(&["X"], &["Y"]).unwrap().0;
            assert!((mi - (k as f64).ln()).abs() < 1e-14, "k={k}");
            assert_eq!(c.is_independent(&["X"], &["Y"]).unwrap(), k == 1);
        }
        assert!(matches!(
            correlated(2).mutual_information(&["X"], &["X"]),
            Err(Error::OverlappingAxes(_))
        ));
    }

    #[test]
    fn independence_needs_full_product_support() {
        // Marginals uniform, cells equal on support, but a product cell is missing.
        let j = JointDist::new(
            vec![Axis::new("X", 2), Axis::new("Y", 2)],
            vec![(vec![0, 0], 1), (vec![1, 1], 1)],
        )
        .unwrap();
        assert!(!j.is_independent(&["X"], &["Y"]).unwrap());
    }

    #[test]
    fn disintegration_with_uninformative_condition() {
        let xy = correlated(3);
        let pc = FiniteDist::from_probs(&[r(1, 2), r(1, 6), r(1, 3)]).unwrap();
        let mut cells = Vec::new();
        for (t, w) in xy.cells() {
            for c in pc.support() {
                cells.push((vec![t[0], t[1], c as u32], w * pc.weight(c)));
            }
        }
        let j = JointDist::new(vec![Axis::new("X", 3), Axis::new("Y", 3), Axis::new("C", 3)], cells)
            .unwrap();
        let direct = xy.mutual_information(&["X"], &["Y"]).unwrap().0;
        for s in j.disintegration(&["X"], &["Y"], &["C"]).unwrap() {
            assert!((s.mi.0 - direct).abs() < 1e-14);
        }
        let one = j.disintegrated_mi(&["X"], &["Y"], &["C"], &[1]).unwrap().0;
        assert!((one - direct).abs() < 1e-14);
        assert!((j.conditional_mi(&["X"], &["Y"], &["C"]).unwrap().0 - direct).abs() < 1e-14);
    }

    #[test]
    fn information_density_points() {
        let c = correlated(4);
        assert!((c.information_density(&["X"], &["Y"], &[2], &[2]).unwrap() - 4f64.ln()).abs() < 1e-14);
        assert_eq!(c.information_density(&["X"], &["Y"], &[2], &[1]).unwrap(), f64::NEG_INFINITY);
        let j = JointDist::product("X", &FiniteDist::uniform(2), "Y", &FiniteDist::point_mass(2, 0))
            .unwrap();
        assert_eq!(j.information_density(&["X"], &["Y"], &[1], &[0]).unwrap(), 0.0);
        assert_eq!(
            j.information_density(&["X"], &["Y"], &[1], &[1]).unwrap_err(),
            Error::ZeroMassEvent
        );
    }

    #[test]
    fn from_probs_checks_sum() {
        let axes = vec![Axis::new("X", 2)];
        assert!(JointDist::from_probs(axes.clone(), vec![(vec![0], r(1, 2))]).is_err());
        let j = JointDist::from_probs(axes, vec![(vec![0], r(1, 3)), (vec![1], r(2, 3))]).unwrap();
        assert_eq!(j.total(), 3);
    }
}
