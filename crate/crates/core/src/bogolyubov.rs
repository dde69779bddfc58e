//! Constructive pipelines: the Croot–Sisask–Sanders ladder, subgroup
//! discovery inside symmetric sets, Bogolyubov-type statements for bounded
//! exponent, coset structure and the stabilizer-based regularity
//! decomposition.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{normal_core_in, Elem, Subgroup, SubgroupSummary};
use crate::rational::{big, big_int, big_to_f64, ser_big_pair, ser_pair, BigRational, Rational, Surd};
use crate::rng::SeedTree;
use crate::set::GroupSet;
use crate::setops::{bar_closure, covering, generated_by_powers, inverse, power, product, GrowthMode};
use crate::vcdim::{stabilizer_with_threshold, surd_threshold, symmetric_difference_profile, vc_dimension, Side};

// ---------------------------------------------------------------------------
// Mode sets

/// `V`, `W` and `Σ = ⟨V⟩` for a set `A` in a given growth mode.
#[derive(Clone, Debug)]
pub struct ModeSets {
    pub mode: GrowthMode,
    pub a: GroupSet,
    /// `(AA⁻¹)^m` or `Ā^m`.
    pub v: GroupSet,
    /// `(AA⁻¹)²`, or the four-fold intersection in tripling mode.
    pub w: GroupSet,
    pub m: u64,
    pub sigma: Subgroup,
    /// Least `j` with `V^j = ⟨V⟩`.
    pub generation_steps: u64,
}

/// `(XX⁻¹)², X²X⁻², (X⁻¹X)², X⁻²X²`.
pub fn four_targets(x: &GroupSet) -> Result<[GroupSet; 4]> {
    let xi = inverse(x);
    let xxi = product(x, &xi)?;
    let xix = product(&xi, x)?;
    let x2 = product(x, x)?;
    let xi2 = product(&xi, &xi)?;
    Ok([
        product(&xxi, &xxi)?,
        product(&x2, &xi2)?,
        product(&xix, &xix)?,
        product(&xi2, &x2)?,
    ])
}

pub fn mode_sets(a: &GroupSet, mode: GrowthMode, m: u64) -> Result<ModeSets> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = m.max(1);
    let xxi = product(a, &inverse(a))?;
    let (v, w) = match mode {
        GrowthMode::Alternation => (power(&xxi, m), product(&xxi, &xxi)?),
        GrowthMode::Tripling => {
            let [p1, p2, p3, p4] = four_targets(a)?;
            (
                power(&bar_closure(a), m),
                p1.intersection(&p2).intersection(&p3).intersection(&p4),
            )
        }
    };
    let (sigma, steps) = generated_by_powers(&v);
    Ok(ModeSets {
        mode,
        a: a.clone(),
        v,
        w,
        m,
        sigma: Subgroup::trusted(sigma),
        generation_steps: steps,
    })
}

// ---------------------------------------------------------------------------
// Croot–Sisask ladder

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BStrategy {
    /// Grow `B` one element at a time, each time minimizing `|BZ|`.
    #[default]
    Greedy,
    /// Always `B = X`.
    Whole,
    /// Best of greedy and `tries` uniformly random subsets of the right size.
    RandomRestart { tries: usize, seed: u64 },
}

impl std::str::FromStr for BStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<BStrategy> {
        match s {
            "greedy" => Ok(BStrategy::Greedy),
            "whole" => Ok(BStrategy::Whole),
            _ => {
                let rest = s
                    .strip_prefix("random:")
                    .ok_or_else(|| Error::parse(0, format!("unknown strategy {s:?}")))?;
                let tries = rest
                    .parse()
                    .map_err(|_| Error::parse(7, "expected random:<tries>"))?;
                Ok(BStrategy::RandomRestart { tries, seed: 0 })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rung {
    #[serde(serialize_with = "ser_big_pair")]
    pub t: BigRational,
    pub t_approx: f64,
    pub b_size: usize,
    /// `|BZ| / |X|` for the chosen `B`, an upper estimate of `f(t)`.
    #[serde(serialize_with = "ser_pair")]
    pub f_estimate: Rational,
    /// `(t²/2ℓ)|X|`.
    #[serde(serialize_with = "ser_big_pair")]
    pub threshold: BigRational,
    pub y_size: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CsTrace {
    /// `1` for `(XX⁻¹)²`, `2` for `X²X⁻²`, `3`/`4` for the same on `X⁻¹`.
    pub target: u8,
    pub exponent: u64,
    /// `|VX| / |X|`.
    #[serde(serialize_with = "ser_pair")]
    pub ell: Rational,
    pub ladder: Vec<Rung>,
    pub chosen_rung: Option<usize>,
    pub chosen_b: Vec<Elem>,
    pub y_star: Vec<Elem>,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct CsResult {
    pub mode: GrowthMode,
    pub n: u64,
    pub y: GroupSet,
    pub sets: ModeSets,
    pub traces: Vec<CsTrace>,
    /// `Yⁿ ⊆ W`, recomputed from scratch.
    pub verified: bool,
    pub degenerate: bool,
    /// Greedy number of `V`-translates of `Y` covering `V`.
    pub covering_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CsSummary {
    pub mode: GrowthMode,
    pub n: u64,
    pub m: u64,
    pub y: Vec<Elem>,
    pub y_size: usize,
    pub v_size: usize,
    pub w_size: usize,
    pub verified: bool,
    pub degenerate: bool,
    pub covering_count: usize,
    pub traces: Vec<CsTrace>,
}

impl CsResult {
    pub fn summary(&self) -> CsSummary {
        CsSummary {
            mode: self.mode,
            n: self.n,
            m: self.sets.m,
            y: self.y.to_vec(),
            y_size: self.y.len(),
            v_size: self.sets.v.len(),
            w_size: self.sets.w.len(),
            verified: self.verified,
            degenerate: self.degenerate,
            covering_count: self.covering_count,
            traces: self.traces.clone(),
        }
    }
}

/// Runs the `t ← t²/2ℓ` ladder and returns a symmetric `Y ∋ 1` with
/// `Yⁿ ⊆ W`, verified directly.
///
/// In alternation mode there is one target. In tripling mode each of the
/// four targets is run with exponent `4n`, targets 3 and 4 on `X⁻¹`, and
/// `Y` is the intersection of the squares.
pub fn croot_sisask(x: &GroupSet, mode: GrowthMode, n: u64, m: u64, strategy: BStrategy) -> Result<CsResult> {
    let sets = mode_sets(x, mode, m)?;
    let n = n.max(1);
    let g = x.group();
    let (y, traces) = match mode {
        GrowthMode::Alternation => {
            let w = sets.w.clone();
            let (y, trace) = single_target(x, &inverse(x), &sets.v, &w, n, 1, strategy)?;
            (y, vec![trace])
        }
        GrowthMode::Tripling => {
            let xi = inverse(x);
            let targets = four_targets(x)?;
            let mut y = GroupSet::full(g);
            let mut traces = Vec::new();
            for (c, (base, z)) in [
                (x.clone(), xi.clone()),
                (x.clone(), x.clone()),
                (xi.clone(), x.clone()),
                (xi.clone(), xi.clone()),
            ]
            .into_iter()
            .enumerate()
            {
                let (yc, trace) =
                    single_target(&base, &z, &sets.v, &targets[c], 4 * n, c as u8 + 1, strategy)?;
                y = y.intersection(&product(&yc, &yc)?);
                traces.push(trace);
            }
            (y, traces)
        }
    };
    let verified = power(&y, n).is_subset(&sets.w) && y.contains(0) && inverse(&y) == y;
    if !verified {
        return Err(Error::TheoremViolation(
            "Croot–Sisask output failed its containment check".into(),
        ));
    }
    let covering_count = covering(&sets.v, &y, &sets.v, false)?.len();
    Ok(CsResult {
        mode,
        n,
        degenerate: y.len() == 1,
        y,
        sets,
        traces,
        verified,
        covering_count,
    })
}

/// One target `W = BZZ⁻¹B⁻¹`-type set: walks `t ← t²/2ℓ` and accepts the
/// first `Y_*` with `Y_*ⁿ ⊆ W`.
fn single_target(
    x: &GroupSet,
    z: &GroupSet,
    v: &GroupSet,
    w: &GroupSet,
    n: u64,
    target: u8,
    strategy: BStrategy,
) -> Result<(GroupSet, CsTrace)> {
    let g = x.group();
    let xs = x.len();
    let vx = product(v, x)?;
    let ell = Rational::new(vx.len() as i64, xs as i64);
    let two_ell = big(ell) * big_int(2);
    let v2 = product(v, v)?;
    let t_min = BigRational::new(BigInt::one(), BigInt::from(xs));
    let zs: Vec<GroupSet> = x.iter().map(|e| z.translate_left(e)).collect();
    let x_elems = x.to_vec();
    let mut t = BigRational::one();
    let mut ladder = Vec::new();
    let mut chosen = None;
    let mut chosen_b = Vec::new();
    let mut y_star = GroupSet::identity(g);
    const MAX_RUNGS: usize = 64;
    while t >= t_min && ladder.len() < MAX_RUNGS {
        let need = crate::rational::ceil_usize(&(&t * big_int(xs))).max(1);
        let b = choose_b(&x_elems, &zs, need, strategy, ladder.len());
        let bset = GroupSet::from_indices(g, b.iter().copied())?;
        let bz = product(&bset, z)?;
        let t_next = &t * &t / &two_ell;
        let threshold = &t_next * big_int(xs);
        let y = GroupSet::from_predicate(g, |e| {
            v2.contains(e) && big_int(bset.translate_overlap(e, &bset)) >= threshold
        });
        let accepted = power(&y, n).is_subset(w);
        ladder.push(Rung {
            t_approx: big_to_f64(&t),
            t: t.clone(),
            b_size: bset.len(),
            f_estimate: Rational::new(bz.len() as i64, xs as i64),
            threshold,
            y_size: y.len(),
            accepted,
        });
        if accepted {
            chosen = Some(ladder.len() - 1);
            chosen_b = b;
            y_star = y;
            break;
        }
        t = t_next;
    }
    let degenerate = chosen.is_none();
    Ok((
        y_star.clone(),
        CsTrace {
            target,
            exponent: n,
            ell,
            ladder,
            chosen_rung: chosen,
            chosen_b,
            y_star: y_star.to_vec(),
            degenerate,
        },
    ))
}

fn choose_b(xs: &[Elem], zs: &[GroupSet], need: usize, strategy: BStrategy, rung: usize) -> Vec<Elem> {
    if need >= xs.len() || matches!(strategy, BStrategy::Whole) {
        return xs.to_vec();
    }
    let greedy = greedy_b(xs, zs, need);
    match strategy {
        BStrategy::RandomRestart { tries, seed } => {
            let size = |b: &[usize]| {
                let mut u = zs[b[0]].clone();
                for &i in &b[1..] {
                    u.union_with(&zs[i]);
                }
                u.len()
            };
            let mut best_idx: Vec<usize> = greedy.iter().map(|e| xs.binary_search(e).unwrap()).collect();
            let mut best = size(&best_idx);
            let mut rng = SeedTree::new(seed).indexed("b-restart", rung).stream("b");
            let mut pool: Vec<usize> = (0..xs.len()).collect();
            for _ in 0..tries {
                pool.shuffle(&mut rng);
                let mut cand = pool[..need].to_vec();
                cand.sort_unstable();
                let s = size(&cand);
                if s < best {
                    best = s;
                    best_idx = cand;
                }
            }
            let mut out: Vec<Elem> = best_idx.into_iter().map(|i| xs[i]).collect();
            out.sort_unstable();
            out
        }
        _ => greedy,
    }
}

fn greedy_b(xs: &[Elem], zs: &[GroupSet], need: usize) -> Vec<Elem> {
    let mut used = vec![false; xs.len()];
    let mut union: Option<GroupSet> = None;
    let mut out = Vec::with_capacity(need);
    for _ in 0..need {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..xs.len() {
            if used[i] {
                continue;
            }
            let grow = match &union {
                None => zs[i].len(),
                Some(u) => zs[i].len() - zs[i].intersection_len(u),
            };
            if best.map_or(true, |(_, b)| grow < b) {
                best = Some((i, grow));
            }
        }
        let (i, _) = best.expect("enough elements");
        used[i] = true;
        match &mut union {
            None => union = Some(zs[i].clone()),
            Some(u) => u.union_with(&zs[i]),
        }
        out.push(xs[i]);
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// Subgroup oracle

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Exhaustive,
    Heuristic,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Only subgroups of at most this index in the ambient group are wanted.
    pub max_index: Option<usize>,
    /// Search nodes before falling back to seeded closures.
    pub node_budget: usize,
    pub heuristic_trials: usize,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_index: None,
            node_budget: 200_000,
            heuristic_trials: 2_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubgroupWitness {
    pub subgroup: Subgroup,
    pub container: GroupSet,
    pub ambient: Subgroup,
    /// `[ambient : H]`.
    pub index: usize,
    pub cover_count: Option<usize>,
    pub normalized: bool,
    pub method: OracleMethod,
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupWitnessSummary {
    pub subgroup: SubgroupSummary,
    pub ambient_order: usize,
    pub index: usize,
    pub cover_count: Option<usize>,
    pub normalized: bool,
    pub method: OracleMethod,
    pub contained: bool,
    pub nodes: usize,
}

impl SubgroupWitness {
    pub fn summary(&self) -> SubgroupWitnessSummary {
        SubgroupWitnessSummary {
            subgroup: self.subgroup.summary(),
            ambient_order: self.ambient.order(),
            index: self.index,
            cover_count: self.cover_count,
            normalized: self.normalized,
            method: self.method,
            contained: self.subgroup.members().is_subset(&self.container),
            nodes: self.nodes,
        }
    }
}

/// `{g ∈ ambient : gW = W}`, a subgroup inside `W` whenever `1 ∈ W`.
pub fn left_symmetry_group(w: &GroupSet, ambient: &Subgroup) -> Subgroup {
    let s = GroupSet::from_predicate(w.group(), |g| {
        ambient.contains(g) && w.translate_overlap(g, w) == w.len()
    });
    Subgroup::trusted(s)
}

/// The largest subgroup of `ambient` contained in `w`.
///
/// Branch and bound over subgroups inside `w`: a node `H` is extended by
/// elements `g` with `⟨H, g⟩ ⊆ w`. Every subgroup inside `w` that contains
/// `H` lies in `U = ⟨H, all such g⟩`, so `|U ∩ w|` (rounded down to an
/// admissible order) bounds the branch, and `U` itself closes the branch
/// whenever `U ⊆ w`. If the node budget runs out the best subgroup seen so
/// far is improved by seeded random closures and flagged heuristic.
pub fn largest_subgroup_inside(w: &GroupSet, ambient: &Subgroup, opts: &OracleOptions) -> Result<SubgroupWitness> {
    w.check_same_group(ambient.members())?;
    if !w.contains(0) {
        return Err(Error::InvalidParameter("container must contain the identity".into()));
    }
    let g = w.group();
    let amb_order = ambient.order();
    let inside = w.intersection(ambient.members());
    // elements whose cyclic subgroup stays inside w
    let cands: Vec<Elem> = inside
        .iter()
        .filter(|&x| {
            let mut y = x;
            while y != 0 {
                if !inside.contains(y) {
                    return false;
                }
                y = g.mul(y, x);
            }
            true
        })
        .collect();
    let min_order = opts.max_index.map_or(1, |k| amb_order.div_ceil(k.max(1)));
    let mut best = left_symmetry_group(&inside, ambient).into_members();
    let mut nodes = 0usize;
    let mut visited: HashSet<Vec<u64>> = HashSet::new();
    // a child's admissible extensions are among its parent's
    let mut stack: Vec<(GroupSet, Vec<Elem>, Arc<Vec<Elem>>)> =
        vec![(GroupSet::identity(g), vec![], Arc::new(cands.clone()))];
    let mut complete = true;
    while let Some((h, gens, node_cands)) = stack.pop() {
        nodes += 1;
        if nodes > opts.node_budget {
            complete = false;
            break;
        }
        let mut children: Vec<(GroupSet, Vec<Elem>)> = Vec::new();
        let mut ext: Vec<Elem> = Vec::new();
        for &c in node_cands.iter() {
            if h.contains(c) || !h.translate_left(c).is_subset(&inside) {
                continue;
            }
            if let Some(joined) = join_inside(&h, &gens, c, &inside) {
                let mut cg = gens.clone();
                cg.push(c);
                ext.push(c);
                children.push((joined, cg));
            }
        }
        let ext = Arc::new(ext);
        let mut ug = gens.clone();
        ug.extend(ext.iter());
        let u = crate::group::generate(g, &ug);
        if u.is_subset(&inside) {
            if u.len() > best.len() {
                best = u;
            }
            continue;
        }
        let bound = admissible_order(u.intersection_len(&inside), h.len(), amb_order);
        if bound <= best.len() || bound < min_order {
            continue;
        }
        if h.len() > best.len() {
            best = h.clone();
        }
        // larger children first, pushed last
        children.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(b.1.cmp(&a.1)));
        for (c, cg) in children {
            if visited.insert(c.words().to_vec()) {
                stack.push((c, cg, ext.clone()));
            }
        }
    }
    let method = if complete {
        OracleMethod::Exhaustive
    } else {
        let mut rng = SeedTree::new(opts.seed).stream("subgroup-oracle");
        for _ in 0..opts.heuristic_trials {
            if cands.is_empty() {
                break;
            }
            let k = rng.gen_range(1..=3usize.min(cands.len()));
            let mut gens: Vec<Elem> = (0..k).map(|_| *cands.choose(&mut rng).unwrap()).collect();
            let mut s = crate::group::generate(g, &gens);
            if !s.is_subset(&inside) {
                continue;
            }
            // extend greedily to a maximal subgroup inside w
            let mut order: Vec<Elem> = cands.clone();
            order.shuffle(&mut rng);
            for c in order {
                if s.contains(c) {
                    continue;
                }
                gens.push(c);
                let t = crate::group::generate(g, &gens);
                if t.is_subset(&inside) {
                    s = t;
                } else {
                    gens.pop();
                }
            }
            if s.len() > best.len() {
                best = s;
            }
        }
        OracleMethod::Heuristic
    };
    let subgroup = Subgroup::from_set(best)?;
    Ok(SubgroupWitness {
        index: amb_order / subgroup.order(),
        subgroup,
        container: w.clone(),
        ambient: ambient.clone(),
        cover_count: None,
        normalized: false,
        method,
        nodes,
    })
}

/// `⟨H, c⟩` if it stays inside `inside`, abandoning the closure as soon as
/// it leaves.
fn join_inside(h: &GroupSet, gens: &[Elem], c: Elem, inside: &GroupSet) -> Option<GroupSet> {
    let g = h.group();
    let mut all = gens.to_vec();
    all.push(c);
    let mut s = h.clone();
    let mut queue: Vec<Elem> = h.iter().collect();
    while let Some(x) = queue.pop() {
        for &y in &all {
            let z = g.mul(x, y);
            if !s.contains(z) {
                if !inside.contains(z) {
                    return None;
                }
                s.insert(z);
                queue.push(z);
            }
        }
    }
    Some(s)
}

/// Largest `m·h ≤ bound` with `m·h` dividing `order`.
fn admissible_order(bound: usize, h: usize, order: usize) -> usize {
    let mut best = h;
    let mut k = h;
    while k <= bound {
        if order % k == 0 {
            best = k;
        }
        k += h;
    }
    best
}

/// Independent oracle: scans every subgroup of the ambient group.
pub fn largest_subgroup_inside_naive(w: &GroupSet, ambient: &Subgroup) -> Result<Subgroup> {
    let (h, embed) = ambient.as_group();
    let subs = crate::group::enumerate_subgroups(&h, None)?;
    let mut best: Option<GroupSet> = None;
    for s in subs {
        let lifted = GroupSet::from_indices(w.group(), s.members().iter().map(|i| embed[i as usize]))?;
        if lifted.is_subset(w) && best.as_ref().map_or(true, |b| lifted.len() > b.len()) {
            best = Some(lifted);
        }
    }
    Subgroup::from_set(best.unwrap_or_else(|| GroupSet::identity(w.group())))
}

/// Number of left cosets `gH` meeting `x`, which is the exact minimum number
/// of left translates of `H` covering `x`.
pub fn coset_cover_count(x: &GroupSet, h: &Subgroup) -> usize {
    h.left_cosets().iter().filter(|c| !c.is_disjoint(x)).count()
}

// ---------------------------------------------------------------------------
// Bounded exponent

#[derive(Clone, Debug, Serialize)]
pub struct BogolyubovReport {
    pub mode: GrowthMode,
    pub m: u64,
    pub a_size: usize,
    pub group_order: usize,
    pub exponent: usize,
    pub sigma_order: usize,
    pub generation_steps: u64,
    pub w_size: usize,
    pub croot_sisask: CsSummary,
    pub witness: SubgroupWitnessSummary,
    /// `H ⊆ W`.
    pub contained_in_w: bool,
    /// `H ⊆ (AA⁻¹)²`, reported separately for the normal variant.
    pub contained_in_square: bool,
    /// Index of the normal core when `normalize` was requested.
    pub core_index: Option<usize>,
    /// `[G:H] ≤ r^{α⁻²}` with `α = |A|/|G|`, checked exactly.
    pub effective_bound_holds: bool,
    pub verified: bool,
}

/// Croot–Sisask with `n = 4`, then the subgroup oracle on `W` inside `Σ`;
/// optionally replaces `H` by its normal core in `Σ`.
pub fn bogolyubov_bounded_exponent(
    a: &GroupSet,
    mode: GrowthMode,
    m: u64,
    normalize: bool,
    opts: &OracleOptions,
) -> Result<(SubgroupWitness, BogolyubovReport)> {
    let cs = croot_sisask(a, mode, 4, m, BStrategy::Greedy)?;
    let sets = &cs.sets;
    let mut wit = largest_subgroup_inside(&sets.w, &sets.sigma, opts)?;
    let mut core_index = None;
    if normalize {
        let core = normal_core_in(&wit.subgroup, &sets.sigma);
        core_index = Some(sets.sigma.order() / core.order());
        wit.index = sets.sigma.order() / core.order();
        wit.subgroup = core;
        wit.normalized = true;
    }
    let h = &wit.subgroup;
    let vm = power(&sets.v, m.max(1));
    wit.cover_count = Some(coset_cover_count(&vm, h));
    let xxi = product(a, &inverse(a))?;
    let sq = product(&xxi, &xxi)?;
    let contained_in_w = h.members().is_subset(&sets.w);
    let contained_in_square = h.members().is_subset(&sq);
    let g = a.group();
    let n = g.order();
    // [G:H] ≤ r^{(n/|A|)²}  ⇔  [G:H]^{|A|²} ≤ r^{n²}
    let index_g = n / h.order();
    let r = g.exponent();
    let lhs_exp = a.len() * a.len();
    let rhs_exp = n * n;
    let effective_bound_holds =
        big_int_pow(index_g, lhs_exp) <= big_int_pow(r, rhs_exp);
    let verified = if normalize { contained_in_square } else { contained_in_w } && cs.verified;
    let report = BogolyubovReport {
        mode,
        m: sets.m,
        a_size: a.len(),
        group_order: n,
        exponent: r,
        sigma_order: sets.sigma.order(),
        generation_steps: sets.generation_steps,
        w_size: sets.w.len(),
        croot_sisask: cs.summary(),
        witness: wit.summary(),
        contained_in_w,
        contained_in_square,
        core_index,
        effective_bound_holds,
        verified,
    };
    Ok((wit, report))
}

fn big_int_pow(base: usize, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), e)
}

// ---------------------------------------------------------------------------
// Coset structure and regularity

/// `D = ⋃{C : |C ∩ A| ≥ |H|/2}` over right cosets `C = Hx`, and `|A △ D|/|G|`.
pub fn coset_structure(a: &GroupSet, h: &Subgroup) -> Result<(GroupSet, Rational)> {
    coset_structure_side(a, h, Side::Right)
}

pub fn coset_structure_side(a: &GroupSet, h: &Subgroup, side: Side) -> Result<(GroupSet, Rational)> {
    a.check_same_group(h.members())?;
    let cosets = match side {
        Side::Right => h.right_cosets(),
        Side::Left => h.left_cosets(),
    };
    let mut d = GroupSet::empty(a.group());
    for c in &cosets {
        if 2 * c.intersection_len(a) >= h.order() {
            d.union_with(c);
        }
    }
    let defect = Rational::new(a.symmetric_difference(&d).len() as i64, a.group().order() as i64);
    Ok((d, defect))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularSide {
    /// `|C ∖ A| ≤ ε^{1/4}|H|`.
    MostlyInside,
    /// `|C ∩ A| ≤ ε^{1/4}|H|`.
    MostlyOutside,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CosetRow {
    /// Smallest element of the coset.
    pub representative: Elem,
    pub inside: usize,
    pub outside: usize,
    pub in_z: bool,
    pub regular_side: Option<RegularSide>,
}

/// `Z = ⋃{C : |C∩A|·|C∖A| > ε^{1/2}|H|²}` and the per-coset table.
pub fn coset_regularity(a: &GroupSet, h: &Subgroup, eps: Rational) -> Result<(GroupSet, Vec<CosetRow>)> {
    coset_regularity_side(a, h, eps, Side::Right)
}

pub fn coset_regularity_side(
    a: &GroupSet,
    h: &Subgroup,
    eps: Rational,
    side: Side,
) -> Result<(GroupSet, Vec<CosetRow>)> {
    a.check_same_group(h.members())?;
    if eps <= Rational::zero() {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    let cosets = match side {
        Side::Right => h.right_cosets(),
        Side::Left => h.left_cosets(),
    };
    let eps_b = big(eps);
    let h4 = big_int(h.order()).pow(4);
    let mut z = GroupSet::empty(a.group());
    let mut rows = Vec::with_capacity(cosets.len());
    for c in &cosets {
        let inside = c.intersection_len(a);
        let outside = c.len() - inside;
        // (|C∩A||C∖A|)² > ε|H|⁴
        let pc = big_int(inside * outside);
        let in_z = &pc * &pc > &eps_b * &h4;
        if in_z {
            z.union_with(c);
        }
        let small = |k: usize| big_int(k).pow(4) <= &eps_b * &h4;
        let regular_side = if small(outside) {
            Some(RegularSide::MostlyInside)
        } else if small(inside) {
            Some(RegularSide::MostlyOutside)
        } else {
            None
        };
        rows.push(CosetRow {
            representative: c.first().unwrap(),
            inside,
            outside,
            in_z,
            regular_side,
        });
    }
    Ok((z, rows))
}

/// `|Z| < ½ε^{1/2}|G|`, i.e. `4|Z|² < ε|G|²`.
pub fn z_bound_holds(z_size: usize, eps: Rational, n: usize) -> bool {
    big_int(4 * z_size * z_size) < big(eps) * big_int(n * n)
}

/// Every coset of `H` is a union of... checks that `d` is a union of cosets.
pub fn is_union_of_cosets(d: &GroupSet, h: &Subgroup, side: Side) -> bool {
    let cosets = match side {
        Side::Right => h.right_cosets(),
        Side::Left => h.left_cosets(),
    };
    cosets.iter().all(|c| c.is_subset(d) || c.is_disjoint(d))
}

// ---------------------------------------------------------------------------
// Regularity pipeline

#[derive(Clone, Copy, Debug)]
pub struct RegularityOptions {
    pub vc_cap: usize,
    pub oracle: OracleOptions,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions {
            vc_cap: crate::vcdim::DEFAULT_VC_CAP,
            oracle: OracleOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EscalationStep {
    pub i: u32,
    pub size: usize,
    pub next_size: usize,
    pub stops: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityFlags {
    pub haussler: bool,
    pub escalation_within_bound: bool,
    pub h_inside_b4: bool,
    pub chain_bound: bool,
    pub h_inside_stabilizer: bool,
    pub d_union_of_cosets: bool,
    pub structure_defect: bool,
    pub z_bound: bool,
    pub dichotomy: bool,
}

impl RegularityFlags {
    pub fn all(&self) -> bool {
        self.haussler
            && self.escalation_within_bound
            && self.h_inside_b4
            && self.chain_bound
            && self.h_inside_stabilizer
            && self.d_union_of_cosets
            && self.structure_defect
            && self.z_bound
            && self.dichotomy
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    #[serde(serialize_with = "ser_pair")]
    pub epsilon: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub nu: Rational,
    pub d: usize,
    pub r: usize,
    pub group_order: usize,
    pub a_size: usize,
    /// `δ = (ε/4)^{(d+ν)/d} / 30^{ν/d}`.
    pub delta: Surd,
    /// `⌊δ|G|⌋`.
    pub delta_threshold: usize,
    /// `k = (30/δ)^d = (120/ε)^{d+ν}`.
    pub k: Surd,
    #[serde(serialize_with = "ser_pair")]
    pub p: Rational,
    pub t: u32,
    pub escalation: Vec<EscalationStep>,
    pub s_size: usize,
    pub b_size: usize,
    pub b4_size: usize,
    pub h: SubgroupWitnessSummary,
    pub index: usize,
    pub retried_oracle: bool,
    pub d_set: Vec<Elem>,
    #[serde(serialize_with = "ser_pair")]
    pub structure_defect: Rational,
    pub z: Vec<Elem>,
    #[serde(serialize_with = "ser_pair")]
    pub z_density: Rational,
    pub cosets: Vec<CosetRow>,
    pub flags: RegularityFlags,
    pub success: bool,
}

/// Runs the stabilizer pipeline: VC-dimension, `δ, k, p`, `S = Stab_δ(A)`,
/// the escalation `S^{3^i}`, a subgroup `H ⊆ B⁴`, then `D` and `Z` from the
/// right cosets of `H`. Every flag in the report is recomputed from the final
/// objects.
pub fn regularity_decompose(
    a: &GroupSet,
    eps: Rational,
    nu: Rational,
    opts: &RegularityOptions,
) -> Result<(Subgroup, RegularityReport)> {
    if eps <= Rational::zero() || nu <= Rational::zero() {
        return Err(Error::InvalidParameter("ε and ν must be positive".into()));
    }
    let g = a.group();
    let n = g.order();
    let vc = vc_dimension(a, opts.vc_cap);
    if vc.cap_hit {
        return Err(Error::VcCapHit(opts.vc_cap));
    }
    // d = 0 only for ∅ and G; the formulas need d ≥ 1 and any d' ≥ d is a
    // valid VC bound.
    let d = vc.dim.max(1);
    let (nu_a, nu_b) = (*nu.numer() as u32, *nu.denom() as u32);
    let e4 = big(eps / Rational::from_integer(4));
    // δ^{d·b} = (ε/4)^{d·b + a} / 30^a
    let root = d as u32 * nu_b;
    let delta = Surd::new(
        e4.pow((d as u32 * nu_b + nu_a) as i32) / BigRational::from_integer(30.into()).pow(nu_a as i32),
        root,
    );
    // k^b = (120/ε)^{d·b + a}
    let k = Surd::new(
        (BigRational::from_integer(120.into()) / big(eps)).pow((d as u32 * nu_b + nu_a) as i32),
        nu_b,
    );
    let p = Rational::from_integer(d as i64) * (Rational::from_integer(d as i64) + nu) / nu;
    let threshold = surd_threshold(&delta, n);
    let s = stabilizer_with_threshold(a, threshold, Side::Left);
    // |S| ≥ |G|/k  ⇔  |S|^b · k^b ≥ |G|^b
    let haussler = big_int(s.len()).pow(nu_b as i32) * &k.base >= big_int(n).pow(nu_b as i32);

    // escalation: stop at the first i with |S^{3^{i+1}}| ≤ 3^p |S^{3^i}|
    let (pn, pd) = (*p.numer() as u32, *p.denom() as u32);
    let three = BigRational::from_integer(3.into());
    let mut cur = s.clone();
    let mut escalation = Vec::new();
    let mut i = 0u32;
    let b = loop {
        let next = power(&cur, 3);
        // (next/cur)^{pd} ≤ 3^{pn}
        let ratio = BigRational::new(BigInt::from(next.len()), BigInt::from(cur.len()));
        let stops = ratio.pow(pd as i32) <= three.pow(pn as i32);
        escalation.push(EscalationStep {
            i,
            size: cur.len(),
            next_size: next.len(),
            stops,
        });
        if stops {
            break cur;
        }
        cur = next;
        i += 1;
        if i > 64 {
            return Err(Error::TheoremViolation("escalation did not stop".into()));
        }
    };
    let t = i;
    // t ≤ log_{3^p} k  ⇔  3^{p t} ≤ k  ⇔  3^{pn·t·b} ≤ k^{b·pd}
    let escalation_within_bound =
        three.pow((pn * t * nu_b) as i32) <= k.base.pow(pd as i32);
    let b4 = power(&b, 4);
    let whole = Subgroup::whole(g);
    let stab_eps_threshold = (eps * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let profile = symmetric_difference_profile(a, Side::Left);
    let stab_eps = GroupSet::from_predicate(g, |x| profile[x as usize] <= stab_eps_threshold);
    let mut wit = largest_subgroup_inside(&b4, &whole, &opts.oracle)?;
    let mut retried = false;
    if !wit.subgroup.members().is_subset(&stab_eps) {
        retried = true;
        wit = largest_subgroup_inside(&b4.intersection(&stab_eps), &whole, &opts.oracle)?;
        wit.container = b4.clone();
    }
    let h = wit.subgroup.clone();
    wit.cover_count = Some(coset_cover_count(&b, &h));
    // 4·3^t·δ ≤ ε  ⇔  δ^{root} ≤ (ε / (4·3^t))^{root}
    let chain_bound = delta.le(&(big(eps) / (big_int(4) * three.pow(t as i32))));

    let (dset, defect) = coset_structure(a, &h)?;
    let (z, rows) = coset_regularity(a, &h, eps)?;
    let eps_b = big(eps);
    let h4 = big_int(h.order()).pow(4);
    let dichotomy = rows
        .iter()
        .all(|r| r.in_z || r.regular_side.is_some())
        && rows.iter().all(|r| {
            let pc = big_int(r.inside * r.outside);
            r.in_z == (&pc * &pc > &eps_b * &h4)
        });
    let flags = RegularityFlags {
        haussler,
        escalation_within_bound,
        h_inside_b4: h.members().is_subset(&b4),
        chain_bound,
        h_inside_stabilizer: h.members().is_subset(&stab_eps),
        d_union_of_cosets: is_union_of_cosets(&dset, &h, Side::Right),
        structure_defect: defect <= eps,
        z_bound: z_bound_holds(z.len(), eps, n),
        dichotomy,
    };
    let success = flags.all();
    let report = RegularityReport {
        epsilon: eps,
        nu,
        d: vc.dim,
        r: g.exponent(),
        group_order: n,
        a_size: a.len(),
        delta,
        delta_threshold: threshold,
        k,
        p,
        t,
        escalation,
        s_size: s.len(),
        b_size: b.len(),
        b4_size: b4.len(),
        h: wit.summary(),
        index: n / h.order(),
        retried_oracle: retried,
        d_set: dset.to_vec(),
        structure_defect: defect,
        z_density: Rational::new(z.len() as i64, n as i64),
        z: z.to_vec(),
        cosets: rows,
        flags,
        success,
    };
    Ok((h, report))
}

// ---------------------------------------------------------------------------
// Saturation

#[derive(Clone, Debug, Serialize)]
pub struct SaturationReport {
    pub group_order: usize,
    pub sizes: Vec<usize>,
    /// `(name, size, equals G)` for each product set checked.
    pub products: Vec<(String, usize, bool)>,
    pub all_equal: bool,
}

/// Exact checks of `G = (AA⁻¹)² = (A⁻¹A)² = A²A⁻² = A⁻²A²`, or `G = ABC`.
pub fn dense_saturation_check(sets: &[GroupSet]) -> Result<SaturationReport> {
    let first = sets.first().ok_or(Error::EmptySet)?;
    for s in sets {
        first.check_same_group(s)?;
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
    }
    let n = first.group().order();
    let products: Vec<(String, GroupSet)> = match sets {
        [a] => {
            let [p1, p2, p3, p4] = four_targets(a)?;
            vec![
                ("(AA^-1)^2".into(), p1),
                ("A^2A^-2".into(), p2),
                ("(A^-1A)^2".into(), p3),
                ("A^-2A^2".into(), p4),
            ]
        }
        [a, b, c] => vec![("ABC".into(), product(&product(a, b)?, c)?)],
        _ => {
            return Err(Error::InvalidParameter(
                "saturation takes one set or three sets".into(),
            ))
        }
    };
    let products: Vec<(String, usize, bool)> =
        products.into_iter().map(|(k, s)| (k, s.len(), s.len() == n)).collect();
    Ok(SaturationReport {
        group_order: n,
        sizes: sets.iter().map(|s| s.len()).collect(),
        all_equal: products.iter().all(|p| p.2),
        products,
    })
}

#[allow(dead_code)]
fn to_usize(x: &BigInt) -> usize {
    x.to_usize().unwrap_or(usize::MAX)
}
