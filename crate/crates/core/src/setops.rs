//! Product-set arithmetic: products, inverses, powers, growth ratios, Ruzsa
//! distance, covering numbers and Plünnecke–Ruzsa certificates.
//!
//! All cardinality comparisons are exact; logarithms only appear as
//! convenience values in reports.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Elem;
use crate::rational::{ser_pair, Rational};
use crate::set::GroupSet;

/// `XY = {xy : x ∈ X, y ∈ Y}`.
///
/// Iterates the smaller operand against the larger one and stops early once
/// the product fills the group.
pub fn product(x: &GroupSet, y: &GroupSet) -> Result<GroupSet> {
    x.check_same_group(y)?;
    let g = x.group();
    let n = g.order();
    let mut out = GroupSet::empty(g);
    if x.is_empty() || y.is_empty() {
        return Ok(out);
    }
    let ys: Vec<Elem> = y.to_vec();
    let xs: Vec<Elem> = x.to_vec();
    let mut count = 0usize;
    if xs.len() <= ys.len() {
        for &a in &xs {
            let row = g.row(a);
            for &b in &ys {
                let v = row[b as usize];
                if !out.contains(v) {
                    out.insert(v);
                    count += 1;
                }
            }
            if count == n {
                break;
            }
        }
    } else {
        for &b in &ys {
            for &a in &xs {
                let v = g.mul(a, b);
                if !out.contains(v) {
                    out.insert(v);
                    count += 1;
                }
            }
            if count == n {
                break;
            }
        }
    }
    Ok(out)
}

/// `X⁻¹`.
pub fn inverse(x: &GroupSet) -> GroupSet {
    let g = x.group();
    let mut out = GroupSet::empty(g);
    for e in x.iter() {
        out.insert(g.inv(e));
    }
    out
}

/// `Xᵏ`, with `X⁰ = {1}`. Uses binary powering and stops once the powers
/// stabilize.
pub fn power(x: &GroupSet, k: u64) -> GroupSet {
    let g = x.group();
    let mut acc = GroupSet::identity(g);
    if k == 0 {
        return acc;
    }
    if x.is_empty() {
        return GroupSet::empty(g);
    }
    // Sequential powering detects stabilization X^{j+1} = X^j cheaply when
    // the set contains the identity.
    if x.contains(0) {
        let mut cur = x.clone();
        let mut j = 1;
        while j < k {
            let next = product(&cur, x).expect("same group");
            if next == cur {
                return cur;
            }
            cur = next;
            j += 1;
            if j * 2 <= k {
                // jump by squaring while it keeps us at or below k
                let sq = product(&cur, &cur).expect("same group");
                if sq == cur {
                    return cur;
                }
                cur = sq;
                j *= 2;
            }
        }
        return cur;
    }
    let mut base = x.clone();
    let mut e = k;
    let mut first = true;
    while e > 0 {
        if e & 1 == 1 {
            acc = if first { base.clone() } else { product(&acc, &base).expect("same group") };
            first = false;
        }
        e >>= 1;
        if e > 0 {
            base = product(&base, &base).expect("same group");
        }
    }
    acc
}

/// `X̄ = X ∪ X⁻¹ ∪ {1}`.
pub fn bar_closure(x: &GroupSet) -> GroupSet {
    let mut out = x.union(&inverse(x));
    out.insert(0);
    out
}

pub fn is_symmetric(x: &GroupSet) -> bool {
    x.contains(0) && inverse(x) == *x
}

/// The subgroup `⟨X⟩` obtained by powering `X̄` until it stabilizes, together
/// with the number of steps `m` at which `X̄ᵐ = ⟨X⟩`.
pub fn generated_by_powers(x: &GroupSet) -> (GroupSet, u64) {
    let b = bar_closure(x);
    let mut cur = b.clone();
    let mut m = 1;
    loop {
        let next = product(&cur, &b).expect("same group");
        if next == cur {
            return (cur, m);
        }
        cur = next;
        m += 1;
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GrowthProfile {
    pub size: usize,
    #[serde(serialize_with = "ser_pair")]
    pub doubling: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub tripling: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub alternation: Rational,
    pub square_size: usize,
    pub cube_size: usize,
    pub alternation_size: usize,
}

/// Exact ratios `|X²|/|X|`, `|X³|/|X|` and `|XX⁻¹X|/|X|`.
pub fn growth_profile(x: &GroupSet) -> Result<GrowthProfile> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = x.len() as i64;
    let sq = product(x, x)?;
    let cube = product(&sq, x)?;
    let alt = product(&product(x, &inverse(x))?, x)?;
    Ok(GrowthProfile {
        size: x.len(),
        doubling: Rational::new(sq.len() as i64, n),
        tripling: Rational::new(cube.len() as i64, n),
        alternation: Rational::new(alt.len() as i64, n),
        square_size: sq.len(),
        cube_size: cube.len(),
        alternation_size: alt.len(),
    })
}

/// Ruzsa distance `d(X, Y) = log(|XY⁻¹| / (|X|^{1/2} |Y|^{1/2}))` in exact
/// integer form, with the logarithm as a convenience value.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct RuzsaDistance {
    pub quotient_size: usize,
    pub x_size: usize,
    pub y_size: usize,
    pub log_value: f64,
}

pub fn ruzsa_distance(x: &GroupSet, y: &GroupSet) -> Result<RuzsaDistance> {
    x.check_same_group(y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    let q = product(x, &inverse(y))?.len();
    let (a, b) = (x.len(), y.len());
    Ok(RuzsaDistance {
        quotient_size: q,
        x_size: a,
        y_size: b,
        log_value: (q as f64).ln() - 0.5 * ((a as f64).ln() + (b as f64).ln()),
    })
}

/// The triangle inequality `d(X,Z) ≤ d(X,Y) + d(Y,Z)` in the integer form
/// `|XZ⁻¹|·|Y| ≤ |XY⁻¹|·|YZ⁻¹|`.
pub fn ruzsa_triangle_holds(xz: &RuzsaDistance, xy: &RuzsaDistance, yz: &RuzsaDistance) -> bool {
    (xz.quotient_size as u128) * (xy.y_size as u128)
        <= (xy.quotient_size as u128) * (yz.quotient_size as u128)
}

/// Minimum (exact) or greedy number of translates `gY`, `g ∈ pool`, needed to
/// cover `X`.
pub fn covering_number(x: &GroupSet, y: &GroupSet, pool: &GroupSet, exact: bool) -> Result<usize> {
    Ok(covering(x, y, pool, exact)?.len())
}

/// The covering translates themselves, in selection order.
pub fn covering(x: &GroupSet, y: &GroupSet, pool: &GroupSet, exact: bool) -> Result<Vec<Elem>> {
    x.check_same_group(y)?;
    x.check_same_group(pool)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    // Only translates that meet X matter; keep the smallest g for each
    // distinct trace.
    let mut candidates: Vec<(Elem, GroupSet)> = Vec::new();
    let mut by_trace: HashMap<GroupSet, usize> = HashMap::new();
    for g in pool.iter() {
        let t = y.translate_left(g).intersection(x);
        if t.is_empty() || by_trace.contains_key(&t) {
            continue;
        }
        by_trace.insert(t.clone(), candidates.len());
        candidates.push((g, t));
    }
    let mut reach = GroupSet::empty(x.group());
    for (_, t) in &candidates {
        reach.union_with(t);
    }
    if !x.is_subset(&reach) {
        return Err(Error::NotCoverable);
    }
    let greedy = greedy_cover(x, &candidates);
    if !exact {
        return Ok(greedy);
    }
    let mut solver = ExactCover {
        candidates: &candidates,
        best: greedy,
        chosen: Vec::new(),
    };
    solver.search(x.clone());
    Ok(solver.best)
}

fn greedy_cover(x: &GroupSet, candidates: &[(Elem, GroupSet)]) -> Vec<Elem> {
    let mut uncovered = x.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        // most newly covered elements; ties go to the smallest g
        let (g, t) = candidates
            .iter()
            .max_by(|a, b| {
                a.1.intersection_len(&uncovered)
                    .cmp(&b.1.intersection_len(&uncovered))
                    .then(b.0.cmp(&a.0))
            })
            .expect("coverable");
        chosen.push(*g);
        uncovered = uncovered.difference(t);
    }
    chosen
}

struct ExactCover<'a> {
    candidates: &'a [(Elem, GroupSet)],
    best: Vec<Elem>,
    chosen: Vec<Elem>,
}

impl ExactCover<'_> {
    fn search(&mut self, uncovered: GroupSet) {
        if uncovered.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let max_gain = self
            .candidates
            .iter()
            .map(|(_, t)| t.intersection_len(&uncovered))
            .max()
            .unwrap_or(0);
        if max_gain == 0 {
            return;
        }
        let lower = self.chosen.len() + uncovered.len().div_ceil(max_gain);
        if lower >= self.best.len() {
            return;
        }
        // branch on the translates covering the first uncovered element
        let pivot = uncovered.first().unwrap();
        let mut options: Vec<&(Elem, GroupSet)> =
            self.candidates.iter().filter(|(_, t)| t.contains(pivot)).collect();
        options.sort_by_key(|(g, t)| (std::cmp::Reverse(t.intersection_len(&uncovered)), *g));
        for (g, t) in options {
            self.chosen.push(*g);
            self.search(uncovered.difference(t));
            self.chosen.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMode {
    Tripling,
    Alternation,
}

impl std::str::FromStr for GrowthMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tripling" => Ok(GrowthMode::Tripling),
            "alternation" => Ok(GrowthMode::Alternation),
            _ => Err(Error::parse(0, format!("unknown mode {s:?}"))),
        }
    }
}

/// One checked inequality `|W| ≤ k^e |X|` (or `k^e |XX⁻¹|`).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WordBound {
    /// The word as a sign pattern, `+` for X and `-` for X⁻¹.
    pub word: String,
    pub size: usize,
    /// Exponent of `k` in the bound, when one was derived.
    pub bound_exponent: Option<u32>,
    /// `log(|W|/|base|) / log k`; absent when `k = 1`.
    pub measured_exponent: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PlunneckeCertificate {
    pub mode: GrowthMode,
    #[serde(serialize_with = "ser_pair")]
    pub k: Rational,
    pub set_size: usize,
    pub bounds: Vec<WordBound>,
    pub all_hold: bool,
}

/// Checks the Plünnecke–Ruzsa type bounds for `X`.
///
/// Alternation mode, `k = |XX⁻¹X|/|X|`: `|(XX⁻¹)²| ≤ k²|XX⁻¹|` and
/// `|(XX⁻¹)³| ≤ k⁵|X|`. Tripling mode, `k = |X³|/|X|`: every word of length
/// at most 6 in `X, X⁻¹` against the exponent obtained by chaining Ruzsa's
/// triangle inequality (see [`triangle_word_exponents`]).
pub fn plunnecke_check(x: &GroupSet, mode: GrowthMode) -> Result<PlunneckeCertificate> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let xi = inverse(x);
    let n = x.len();
    match mode {
        GrowthMode::Alternation => {
            let xxi = product(x, &xi)?;
            let alt = product(&xxi, x)?;
            let k = Rational::new(alt.len() as i64, n as i64);
            let sq = product(&xxi, &xxi)?;
            let cube = product(&sq, &xxi)?;
            let b1 = word_bound("+-+-", sq.len(), xxi.len(), k, 2);
            let b2 = word_bound("+-+-+-", cube.len(), n, k, 5);
            let all_hold = b1.holds && b2.holds;
            Ok(PlunneckeCertificate {
                mode,
                k,
                set_size: n,
                bounds: vec![b1, b2],
                all_hold,
            })
        }
        GrowthMode::Tripling => {
            let cube = power(x, 3);
            let k = Rational::new(cube.len() as i64, n as i64);
            let exps = triangle_word_exponents(MAX_WORD_LEN);
            let mut bounds = Vec::new();
            let mut cache: HashMap<Vec<bool>, GroupSet> = HashMap::new();
            for (word, e) in &exps {
                let w = word_set(x, &xi, word, &mut cache)?;
                bounds.push(word_bound(&word_string(word), w.len(), n, k, e.unwrap_or(u32::MAX)));
                if e.is_none() {
                    let last = bounds.last_mut().unwrap();
                    last.bound_exponent = None;
                    last.holds = true;
                }
            }
            let all_hold = bounds.iter().all(|b| b.holds);
            Ok(PlunneckeCertificate {
                mode,
                k,
                set_size: n,
                bounds,
                all_hold,
            })
        }
    }
}

const MAX_WORD_LEN: usize = 6;

fn word_string(word: &[bool]) -> String {
    word.iter().map(|&p| if p { '+' } else { '-' }).collect()
}

fn word_set(
    x: &GroupSet,
    xi: &GroupSet,
    word: &[bool],
    cache: &mut HashMap<Vec<bool>, GroupSet>,
) -> Result<GroupSet> {
    if let Some(s) = cache.get(word) {
        return Ok(s.clone());
    }
    let last = if word[word.len() - 1] { x } else { xi };
    let s = if word.len() == 1 {
        last.clone()
    } else {
        product(&word_set(x, xi, &word[..word.len() - 1], cache)?, last)?
    };
    cache.insert(word.to_vec(), s.clone());
    Ok(s)
}

fn word_bound(word: &str, size: usize, base: usize, k: Rational, exp: u32) -> WordBound {
    // |W| ≤ (p/q)^e · base  ⇔  |W| · q^e ≤ p^e · base
    let holds = if exp == u32::MAX {
        true
    } else {
        let p = BigInt::from(*k.numer());
        let q = BigInt::from(*k.denom());
        BigInt::from(size) * num_traits::pow(q, exp as usize)
            <= num_traits::pow(p, exp as usize) * BigInt::from(base)
    };
    let kf = crate::rational::to_f64(k);
    let measured = if k > Rational::one() {
        Some(((size as f64) / (base as f64)).ln() / kf.ln())
    } else {
        None
    };
    WordBound {
        word: word.to_string(),
        size,
        bound_exponent: Some(exp),
        measured_exponent: measured,
        holds,
    }
}

/// Exponents `e(w)` with `|w(X)| ≤ kᵉ|X|` whenever `|X³| ≤ k|X|`, for every
/// word `w` of length `1..=max_len` in `X` (`true`) and `X⁻¹` (`false`).
///
/// Derived by a shortest-path fixpoint over these rules, each a valid
/// inequality for nonempty `X`:
/// * `|X| = |X⁻¹|`, `|X²| ≤ |X³| ≤ k|X|` (hypothesis);
/// * `|w| = |w⁻¹|` where `w⁻¹` reverses and flips the word;
/// * `|u| ≤ |w|` when `u` is a contiguous subword of `w`;
/// * Ruzsa's triangle inequality `|uv⁻¹|·|y| ≤ |uy⁻¹|·|yv⁻¹|` with `|y| ≥ |X|`,
///   giving `e(uv⁻¹) ≤ e(uy⁻¹) + e(yv⁻¹)`.
///
/// Words never reached keep `None`.
pub fn triangle_word_exponents(max_len: usize) -> Vec<(Vec<bool>, Option<u32>)> {
    let mut words: Vec<Vec<bool>> = Vec::new();
    for len in 1..=max_len {
        for mask in 0..(1u32 << len) {
            words.push((0..len).map(|i| mask >> i & 1 == 1).collect());
        }
    }
    let index: HashMap<Vec<bool>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut e: Vec<Option<u32>> = vec![None; words.len()];
    let inv_word = |w: &[bool]| -> Vec<bool> { w.iter().rev().map(|&b| !b).collect() };
    let set = |e: &mut Vec<Option<u32>>, i: usize, v: u32| -> bool {
        if e[i].map_or(true, |old| v < old) {
            e[i] = Some(v);
            true
        } else {
            false
        }
    };
    for w in [vec![true], vec![false]] {
        e[index[&w]] = Some(0);
    }
    for w in [vec![true, true], vec![true, true, true]] {
        let i = index[&w];
        e[i] = Some(1);
        let j = index[&inv_word(&w)];
        e[j] = Some(1);
    }
    loop {
        let mut changed = false;
        for (wi, w) in words.iter().enumerate() {
            // inversion
            if let Some(v) = e[index[&inv_word(w)]] {
                changed |= set(&mut e, wi, v);
            }
            // subword monotonicity: bound w by any longer word containing it
            for (li, long) in words.iter().enumerate() {
                if long.len() > w.len() {
                    if let Some(v) = e[li] {
                        if long.windows(w.len()).any(|win| win == w.as_slice()) {
                            changed |= set(&mut e, wi, v);
                        }
                    }
                }
            }
            // triangle: w = u · v⁻¹ with both parts nonempty
            for split in 1..w.len() {
                let u = &w[..split];
                let v = inv_word(&w[split..]);
                for y in &words {
                    let mut uy: Vec<bool> = u.to_vec();
                    uy.extend(inv_word(y));
                    let mut yv: Vec<bool> = y.clone();
                    yv.extend(inv_word(&v));
                    if uy.len() > max_len || yv.len() > max_len {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (e[index[&uy]], e[index[&yv]]) {
                        changed |= set(&mut e, wi, a + b);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    words.into_iter().zip(e).collect()
}

/// Exact density `|X| / |A|`, the normalized counting measure relative to `A`.
pub fn relative_measure(x: &GroupSet, a: &GroupSet) -> Result<Rational> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(Rational::new(x.len() as i64, a.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, BuildOptions, Group, GroupSpec, Subgroup};
    use std::sync::Arc;

    fn build(spec: GroupSpec) -> Arc<Group> {
        build_group(&spec, &BuildOptions::default()).unwrap()
    }

    fn set(g: &Arc<Group>, xs: &[i64]) -> GroupSet {
        GroupSet::from_indices(g, xs.iter().copied()).unwrap()
    }

    #[test]
    fn product_examples() {
        let z8 = build(GroupSpec::Cyclic(8));
        let a = set(&z8, &[0, 1, 2]);
        assert_eq!(product(&a, &a).unwrap().to_vec(), vec![0, 1, 2, 3, 4]);
        let empty = GroupSet::empty(&z8);
        assert!(product(&empty, &a).unwrap().is_empty());
        let h = Subgroup::generated_by(&z8, &[2]);
        assert_eq!(&product(h.members(), h.members()).unwrap(), h.members());
        let other = build(GroupSpec::Cyclic(8));
        assert!(matches!(
            product(&a, &GroupSet::full(&other)),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn power_and_closure_examples() {
        let z8 = build(GroupSpec::Cyclic(8));
        assert_eq!(power(&set(&z8, &[0, 1]), 3).to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(power(&set(&z8, &[1]), 0).to_vec(), vec![0]);
        assert_eq!(power(&set(&z8, &[1]), 5).to_vec(), vec![5]);
        assert_eq!(power(&set(&z8, &[1, 2]), 3).to_vec(), vec![3, 4, 5, 6]);
        assert_eq!(bar_closure(&set(&z8, &[1, 3])).to_vec(), vec![0, 1, 3, 5, 7]);
        let sym = set(&z8, &[0, 1, 7]);
        assert_eq!(inverse(&sym), sym);
    }

    #[test]
    fn power_matches_repeated_products() {
        let s4 = build(GroupSpec::Symmetric(4));
        let x = set(&s4, &[1, 5, 9]);
        let mut acc = GroupSet::identity(&s4);
        for k in 0..8 {
            assert_eq!(power(&x, k), acc, "k = {k}");
            acc = product(&acc, &x).unwrap();
        }
        let with_id = set(&s4, &[0, 3]);
        let mut acc = GroupSet::identity(&s4);
        for k in 0..8 {
            assert_eq!(power(&with_id, k), acc, "k = {k}");
            acc = product(&acc, &with_id).unwrap();
        }
    }

    #[test]
    fn growth_examples() {
        let z8 = build(GroupSpec::Cyclic(8));
        let p = growth_profile(&set(&z8, &[0, 1, 2])).unwrap();
        assert_eq!(p.tripling, Rational::new(7, 3));
        let h = Subgroup::generated_by(&z8, &[4]);
        let p = growth_profile(h.members()).unwrap();
        assert_eq!(p.doubling, Rational::one());
        assert_eq!(p.tripling, Rational::one());
        assert_eq!(p.alternation, Rational::one());
        assert!(matches!(growth_profile(&GroupSet::empty(&z8)), Err(Error::EmptySet)));
    }

    #[test]
    fn ruzsa_examples() {
        let z8 = build(GroupSpec::Cyclic(8));
        let d = ruzsa_distance(&set(&z8, &[0, 1]), &set(&z8, &[0, 4])).unwrap();
        assert_eq!(d.quotient_size, 4);
        assert!((d.log_value - 2f64.ln()).abs() < 1e-12);
        let h = Subgroup::generated_by(&z8, &[2]);
        let d = ruzsa_distance(h.members(), h.members()).unwrap();
        assert_eq!(d.quotient_size, h.order());
        assert!(d.log_value.abs() < 1e-12);
    }

    #[test]
    fn covering_examples() {
        let z8 = build(GroupSpec::Cyclic(8));
        let full = GroupSet::full(&z8);
        let h = Subgroup::generated_by(&z8, &[2]);
        assert_eq!(covering_number(&full, h.members(), &full, true).unwrap(), 2);
        assert_eq!(covering_number(&full, h.members(), &full, false).unwrap(), 2);
        let x = set(&z8, &[0, 1, 5]);
        assert_eq!(covering_number(&x, &x, &full, true).unwrap(), 1);
        let x = set(&z8, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(covering_number(&x, &set(&z8, &[0, 1]), &full, true).unwrap(), 3);
        let pool = set(&z8, &[0]);
        assert!(matches!(
            covering_number(&x, &set(&z8, &[0, 1]), &pool, true),
            Err(Error::NotCoverable)
        ));
    }

    #[test]
    fn plunnecke_examples() {
        let z16 = build(GroupSpec::Cyclic(16));
        let cert = plunnecke_check(&set(&z16, &[0, 1, 2]), GrowthMode::Tripling).unwrap();
        assert_eq!(cert.k, Rational::new(7, 3));
        assert!(cert.all_hold);
        let cube = cert.bounds.iter().find(|b| b.word == "+-+-+-").unwrap();
        assert_eq!(cube.size, 13);
        let alt = plunnecke_check(&set(&z16, &[0, 1, 2]), GrowthMode::Alternation).unwrap();
        assert_eq!(alt.bounds[1].size, 13);
        assert!(alt.all_hold);
        let h = Subgroup::generated_by(&z16, &[4]);
        for mode in [GrowthMode::Tripling, GrowthMode::Alternation] {
            let cert = plunnecke_check(h.members(), mode).unwrap();
            assert_eq!(cert.k, Rational::one());
            assert!(cert.bounds.iter().all(|b| b.holds && b.size == h.order()));
        }
    }

    #[test]
    fn triangle_exponents_cover_short_words() {
        let exps = triangle_word_exponents(6);
        let get = |w: &str| {
            let v: Vec<bool> = w.chars().map(|c| c == '+').collect();
            exps.iter().find(|(x, _)| *x == v).unwrap().1
        };
        assert_eq!(get("+"), Some(0));
        assert_eq!(get("++"), Some(1));
        assert_eq!(get("+++"), Some(1));
        // |XX⁻¹| ≤ k²|X| from |XX⁻¹||X| ≤ |XX|·|XX|
        assert!(get("+-").unwrap() <= 2);
        // every word up to length 6 gets some exponent
        assert!(exps.iter().all(|(_, e)| e.is_some()), "{exps:?}");
    }
}
