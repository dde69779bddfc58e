//! VC-dimension of translate families, ε-stabilizers and the Haussler
//! packing bound.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, Group};
use crate::rational::{big, big_int, ser_big_pair, ser_pair, BigRational, Rational, Surd};
use crate::set::GroupSet;
use crate::setops::inverse;

pub const DEFAULT_VC_CAP: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(Error::parse(0, format!("side must be left or right, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VcResult {
    /// Largest shattered size found, never above the cap.
    pub dim: usize,
    /// True when a set of size `cap` was shattered, so the true value may be larger.
    pub cap_hit: bool,
    pub cap: usize,
    /// Lexicographically first shattered set of size `dim` containing the identity.
    pub witness: Vec<Elem>,
}

impl VcResult {
    pub fn conclusive(&self) -> bool {
        !self.cap_hit
    }
}

/// VC-dimension of `{gA : g ∈ G}`.
///
/// Since `hX` is shattered whenever `X` is, only sets containing the identity
/// are searched. Sets are grown in increasing index order and a branch is
/// dropped as soon as its prefix stops being shattered. For each prefix the
/// translates are kept partitioned by their trace on it; adding `x` splits
/// every cell by membership of `x`, and both halves must be nonempty.
pub fn vc_dimension(a: &GroupSet, cap: usize) -> VcResult {
    let g = a.group();
    let n = g.order();
    let empty = VcResult {
        dim: 0,
        cap_hit: cap == 0,
        cap,
        witness: vec![],
    };
    if cap == 0 || a.is_empty() || a.is_full() {
        return empty;
    }
    // hits[x] = {g : x ∈ gA} = x·A⁻¹, as flat words
    let ainv = inverse(a);
    let w = ainv.words().len();
    let mut hits = Vec::with_capacity(n * w);
    for x in 0..n as Elem {
        hits.extend_from_slice(ainv.translate_left(x).words());
    }
    let hits = Hits { w, data: hits };
    let root = Cells {
        w,
        data: ainv.words().iter().chain(ainv.complement().words()).copied().collect(),
        sizes: vec![a.len(), n - a.len()],
    };
    let mut best = VcResult {
        dim: 1,
        cap_hit: cap == 1,
        cap,
        witness: vec![0],
    };
    for d in 2..=cap {
        if (1usize << d) > n {
            break;
        }
        let firsts: Vec<Elem> = (1..n as Elem).filter(|&x| root.splits(hits.row(x))).collect();
        let found = (0..firsts.len()).into_par_iter().find_map_first(|i| {
            let x = firsts[i];
            let cells = root.split(hits.row(x));
            let cands = refine(g, &hits, &cells, &firsts[i + 1..], x, x);
            let mut chosen = vec![0, x];
            search(g, &hits, &cells, &cands, &mut chosen, d).then_some(chosen)
        });
        match found {
            Some(w) => {
                best = VcResult {
                    dim: d,
                    cap_hit: d == cap,
                    cap,
                    witness: w,
                }
            }
            None => break,
        }
    }
    best
}

struct Hits {
    w: usize,
    data: Vec<u64>,
}

impl Hits {
    fn row(&self, x: Elem) -> &[u64] {
        &self.data[x as usize * self.w..(x as usize + 1) * self.w]
    }
}

/// A partition of the translates into cells, stored as consecutive bit rows.
struct Cells {
    w: usize,
    data: Vec<u64>,
    sizes: Vec<usize>,
}

impl Cells {
    fn rows(&self) -> impl Iterator<Item = (&[u64], usize)> {
        self.data.chunks_exact(self.w).zip(self.sizes.iter().copied())
    }

    fn min_size(&self) -> usize {
        self.sizes.iter().copied().min().unwrap_or(0)
    }

    /// Whether `hit` cuts every cell into two nonempty parts.
    fn splits(&self, hit: &[u64]) -> bool {
        self.rows().all(|(c, size)| {
            let k: usize = c.iter().zip(hit).map(|(a, b)| (a & b).count_ones() as usize).sum();
            k > 0 && k < size
        })
    }

    fn split(&self, hit: &[u64]) -> Cells {
        let mut data = Vec::with_capacity(self.data.len() * 2);
        let mut sizes = Vec::with_capacity(self.sizes.len() * 2);
        for (c, size) in self.rows() {
            let mut k = 0;
            for (a, b) in c.iter().zip(hit) {
                data.push(a & !b);
            }
            for (a, b) in c.iter().zip(hit) {
                let v = a & b;
                k += v.count_ones() as usize;
                data.push(v);
            }
            sizes.push(size - k);
            sizes.push(k);
        }
        Cells { w: self.w, data, sizes }
    }
}

/// Elements `y` of `cands` that split every cell and keep the chosen set in
/// canonical position: `x⁻¹y` and `y⁻¹x` must not fall below `x1`, the
/// smallest nonzero element. Every shattered set has a translate through the
/// identity whose smallest nonzero element is its least quotient `xᵢ⁻¹xⱼ`, so
/// only those translates are searched.
fn refine(g: &Group, hits: &Hits, cells: &Cells, cands: &[Elem], x: Elem, x1: Elem) -> Vec<Elem> {
    let xi = g.inv(x);
    cands
        .iter()
        .copied()
        .filter(|&y| g.mul(xi, y) >= x1 && g.mul(g.inv(y), x) >= x1 && cells.splits(hits.row(y)))
        .collect()
}

/// `cands` are the admissible elements above the last chosen one; a finer
/// partition can only shrink that list.
fn search(
    g: &Group,
    hits: &Hits,
    cells: &Cells,
    cands: &[Elem],
    chosen: &mut Vec<Elem>,
    target: usize,
) -> bool {
    if chosen.len() == target {
        return true;
    }
    let need = target - chosen.len();
    // every cell must be able to split `need` more times
    if cands.len() < need || cells.min_size() < (1usize << need) {
        return false;
    }
    let x1 = chosen[1];
    for (i, &x) in cands.iter().enumerate() {
        if cands.len() - i < need {
            break;
        }
        let next = cells.split(hits.row(x));
        if next.min_size() < (1usize << (need - 1)) {
            continue;
        }
        let rest = if need > 1 {
            refine(g, hits, &next, &cands[i + 1..], x, x1)
        } else {
            Vec::new()
        };
        chosen.push(x);
        if search(g, hits, &next, &rest, chosen, target) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Naive oracle: tries every subset of each size, no pruning, no translation
/// reduction. Only for small groups.
pub fn vc_dimension_naive(a: &GroupSet, cap: usize) -> usize {
    let g = a.group();
    let n = g.order();
    let translates: Vec<GroupSet> = (0..n as Elem).map(|x| a.translate_left(x)).collect();
    let mut best = 0;
    for d in 1..=cap.min(n) {
        let mut idx: Vec<usize> = (0..d).collect();
        let mut found = false;
        loop {
            let mut seen = vec![false; 1 << d];
            for t in &translates {
                let mut mask = 0usize;
                for (i, &x) in idx.iter().enumerate() {
                    if t.contains(x as Elem) {
                        mask |= 1 << i;
                    }
                }
                seen[mask] = true;
            }
            if seen.iter().all(|&s| s) {
                found = true;
                break;
            }
            // next combination
            let mut i = d;
            while i > 0 && idx[i - 1] == n - d + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
        if !found {
            break;
        }
        best = d;
    }
    best
}

/// `|xA △ A|` for every `x` (or `|Ax △ A|` on the right).
pub fn symmetric_difference_profile(a: &GroupSet, side: Side) -> Vec<usize> {
    let g = a.group();
    let m = a.len();
    (0..g.order() as Elem)
        .map(|x| {
            let overlap = match side {
                Side::Left => a.translate_overlap(x, a),
                Side::Right => a.translate_right(x).intersection_len(a),
            };
            2 * (m - overlap)
        })
        .collect()
}

/// `{x : |xA △ A| ≤ threshold}` for an integer threshold.
pub fn stabilizer_with_threshold(a: &GroupSet, threshold: usize, side: Side) -> GroupSet {
    let profile = symmetric_difference_profile(a, side);
    GroupSet::from_predicate(a.group(), |x| profile[x as usize] <= threshold)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StabilizerProfile {
    #[serde(serialize_with = "ser_pair")]
    pub epsilon: Rational,
    pub side: Side,
    /// Largest `|xA△A|` admitted, `⌊ε|G|⌋`.
    pub threshold: usize,
    #[serde(skip)]
    pub stabilizer: GroupSet,
    pub stabilizer_size: usize,
    #[serde(serialize_with = "ser_pair")]
    pub density: Rational,
}

/// `Stab_ε(A) = {x ∈ G : |xA △ A| ≤ ε|G|}`.
pub fn stabilizer(a: &GroupSet, epsilon: Rational) -> Result<StabilizerProfile> {
    stabilizer_side(a, epsilon, Side::Left)
}

pub fn stabilizer_side(a: &GroupSet, epsilon: Rational, side: Side) -> Result<StabilizerProfile> {
    if epsilon < Rational::zero() {
        return Err(Error::InvalidParameter("ε must be nonnegative".into()));
    }
    let n = a.group().order();
    let threshold = (epsilon * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let s = stabilizer_with_threshold(a, threshold, side);
    Ok(StabilizerProfile {
        epsilon,
        side,
        threshold,
        stabilizer_size: s.len(),
        density: Rational::new(s.len() as i64, n as i64),
        stabilizer: s,
    })
}

/// `⌊δ·n⌋` for a real δ given exactly.
pub fn surd_threshold(delta: &Surd, n: usize) -> usize {
    let t = delta.mul_rational(&big_int(n)).floor();
    usize::try_from(t).unwrap_or(usize::MAX)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HausslerReport {
    pub vc: VcResult,
    #[serde(serialize_with = "ser_pair")]
    pub delta: Rational,
    /// `(30/δ)^d`.
    #[serde(serialize_with = "ser_big_pair")]
    pub k: BigRational,
    pub stabilizer_size: usize,
    /// `|G|/k`.
    #[serde(serialize_with = "ser_big_pair")]
    pub bound: BigRational,
    pub group_order: usize,
    /// `None` when the VC search hit its cap.
    pub pass: Option<bool>,
}

/// Checks `|Stab_δ(A)| ≥ |G|/k` with `k = (30/δ)^d`.
pub fn haussler_check(a: &GroupSet, delta: Rational, cap: usize) -> Result<HausslerReport> {
    if delta <= Rational::zero() || delta > Rational::one() {
        return Err(Error::InvalidParameter("δ must lie in (0, 1]".into()));
    }
    let vc = vc_dimension(a, cap);
    let n = a.group().order();
    let k = num_traits::pow(big(Rational::from_integer(30) / delta), vc.dim);
    let stab = stabilizer(a, delta)?;
    let bound = big_int(n) / &k;
    let pass = vc
        .conclusive()
        .then(|| big_int(stab.stabilizer_size) >= bound);
    Ok(HausslerReport {
        vc,
        delta,
        k,
        stabilizer_size: stab.stabilizer_size,
        bound,
        group_order: n,
        pass,
    })
}

/// Report shape used on the command line.
#[derive(Clone, Debug, Serialize)]
pub struct VcReport {
    pub vc_dim: usize,
    pub cap_hit: bool,
    pub witness: Vec<Elem>,
    pub stabilizer_size: Option<usize>,
    #[serde(serialize_with = "crate::rational::ser_opt_pair")]
    pub epsilon: Option<Rational>,
    pub group: String,
    pub set_digest: String,
}
