//! Bohr neighborhoods, δ-homomorphisms and their approximate Bohr sets, and
//! search-based rounding of approximate maps to exact ones.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{CharacterTable, Elem, Subgroup, SubgroupSummary};
use crate::rational::{big, big_int, ser_pair, Rational};
use crate::set::GroupSet;
use crate::setops::product;
use crate::torus::{torus_distance, Metric, TorusMap, TorusMapSummary};

fn check_domain(h: &Subgroup, f: &TorusMap) -> Result<()> {
    if f.domain() != h {
        return Err(Error::InvalidParameter("map is not defined on the given subgroup".into()));
    }
    Ok(())
}

/// `B = {x ∈ H : d_n(0, τ(x)) < δ}` for an exact `τ`.
pub fn bohr_set(h: &Subgroup, tau: &TorusMap, delta: Rational) -> Result<GroupSet> {
    bohr_set_with(h, tau, delta, Metric::Sup)
}

pub fn bohr_set_with(h: &Subgroup, tau: &TorusMap, delta: Rational, metric: Metric) -> Result<GroupSet> {
    check_domain(h, tau)?;
    if !tau.is_exact() {
        return Err(Error::NotExact(tau.defect().to_string()));
    }
    if delta <= Rational::zero() {
        return Err(Error::InvalidParameter("δ must be positive".into()));
    }
    Ok(sublevel(tau, delta, metric))
}

fn sublevel(f: &TorusMap, eps: Rational, metric: Metric) -> GroupSet {
    let mut out = GroupSet::empty(f.domain().group());
    for (&x, v) in f.members().iter().zip(f.values()) {
        if v.norm(metric) < eps {
            out.insert(x);
        }
    }
    out
}

/// Largest `d_n(f(xy), f(x) + f(y))` over all pairs.
pub fn hom_defect(f: &TorusMap) -> Result<Rational> {
    if !f.value(0).map_or(false, |v| v.is_zero()) {
        return Err(Error::IdentityNotZero);
    }
    Ok(f.defect())
}

/// `{x ∈ H : d_n(f(x), 0) < ε}`, with no homomorphism requirement on `f`.
pub fn approx_bohr_set(h: &Subgroup, f: &TorusMap, eps: Rational) -> Result<GroupSet> {
    check_domain(h, f)?;
    if !f.value(0).map_or(false, |v| v.is_zero()) {
        return Err(Error::IdentityNotZero);
    }
    Ok(sublevel(f, eps, Metric::Sup))
}

/// `|B| ≥ δⁿ|H|`, exactly.
pub fn size_bound_holds(bohr_size: usize, delta: Rational, n: usize, h_order: usize) -> bool {
    let d = big(delta.min(Rational::one()));
    big_int(bohr_size) >= num_traits::pow(d, n) * big_int(h_order)
}

/// `B² ⊆ B^n_{τ,2δ}`.
pub fn nesting_holds(h: &Subgroup, tau: &TorusMap, delta: Rational) -> Result<bool> {
    let b = bohr_set(h, tau, delta)?;
    let b2 = bohr_set(h, tau, delta * Rational::from_integer(2))?;
    Ok(product(&b, &b)?.is_subset(&b2))
}

#[derive(Clone, Debug)]
pub enum Rounding {
    Found {
        tau: TorusMap,
        characters: Vec<usize>,
        bohr_set: GroupSet,
        distance: Rational,
    },
    NotFound {
        characters: Vec<usize>,
        best_distance: Rational,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundingSummary {
    pub found: bool,
    pub characters: Vec<usize>,
    #[serde(serialize_with = "ser_pair")]
    pub distance: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub defect: Rational,
    #[serde(serialize_with = "ser_pair")]
    pub delta: Rational,
    pub bohr_set: Option<Vec<Elem>>,
    pub contained_in_approx_set: Option<bool>,
}

/// Looks for an exact `τ` with `sup_x d_n(τ(x), f(x)) ≤ 2δ`, built from
/// characters of `H`.
///
/// Under the sup metric the distance splits over coordinates, so each
/// coordinate is matched independently against every character; the best
/// character per coordinate is therefore globally optimal. Ties go to the
/// smallest character index. On success `B = bohr_set(H, τ, δ)` is checked to
/// lie inside `approx_bohr_set(H, f, 3δ)` before returning.
pub fn round_to_homomorphism(f: &TorusMap, delta: Rational) -> Result<Rounding> {
    let defect = hom_defect(f)?;
    if defect >= delta {
        return Err(Error::InvalidParameter(format!(
            "defect {defect} is not below δ = {delta}"
        )));
    }
    let h = f.domain();
    let table = CharacterTable::new(h);
    let (chosen, worst) = nearest_in_table(&table, f);
    if worst > delta * Rational::from_integer(2) {
        return Ok(Rounding::NotFound {
            characters: chosen,
            best_distance: worst,
        });
    }
    let tau = table.tuple_map(&chosen);
    debug_assert!(f
        .members()
        .iter()
        .all(|&x| torus_distance(tau.value(x).unwrap(), f.value(x).unwrap()).unwrap() <= worst));
    let b = bohr_set(h, &tau, delta)?;
    let approx = approx_bohr_set(h, f, delta * Rational::from_integer(3))?;
    if !b.is_subset(&approx) {
        return Err(Error::TheoremViolation(
            "rounded Bohr set escapes the 3δ approximate Bohr set".into(),
        ));
    }
    Ok(Rounding::Found {
        tau,
        characters: chosen,
        bohr_set: b,
        distance: worst,
    })
}

/// Per coordinate, the character of `H` closest to `f` in sup distance, and
/// the resulting overall distance.
pub fn nearest_characters(f: &TorusMap) -> (Vec<usize>, Rational) {
    nearest_in_table(&CharacterTable::new(f.domain()), f)
}

fn nearest_in_table(table: &CharacterTable, f: &TorusMap) -> (Vec<usize>, Rational) {
    let e = table.exponent() as i64;
    let cols: Vec<Vec<Rational>> = (0..table.len())
        .map(|k| {
            table
                .numerators(k)
                .into_iter()
                .map(|c| Rational::new(c as i64, e))
                .collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(f.dim());
    let mut worst = Rational::zero();
    for i in 0..f.dim() {
        let target: Vec<Rational> = f.values().iter().map(|v| v.coords()[i]).collect();
        let (k, d) = cols
            .par_iter()
            .enumerate()
            .map(|(k, col)| {
                let d = col
                    .iter()
                    .zip(&target)
                    .map(|(&a, &b)| crate::rational::dist_to_int(a - b))
                    .max()
                    .unwrap_or_else(Rational::zero);
                (k, d)
            })
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("at least the trivial character");
        chosen.push(k);
        worst = worst.max(d);
    }
    (chosen, worst)
}

impl Rounding {
    pub fn summary(&self, f: &TorusMap, delta: Rational) -> RoundingSummary {
        match self {
            Rounding::Found {
                characters,
                bohr_set,
                distance,
                ..
            } => RoundingSummary {
                found: true,
                characters: characters.clone(),
                distance: *distance,
                defect: f.defect(),
                delta,
                bohr_set: Some(bohr_set.to_vec()),
                contained_in_approx_set: Some(true),
            },
            Rounding::NotFound {
                characters,
                best_distance,
            } => RoundingSummary {
                found: false,
                characters: characters.clone(),
                distance: *best_distance,
                defect: f.defect(),
                delta,
                bohr_set: None,
                contained_in_approx_set: None,
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct BohrWitness {
    pub subgroup: Subgroup,
    pub tau: TorusMap,
    pub characters: Vec<usize>,
    pub delta: Rational,
    pub n: usize,
    pub bohr_set: GroupSet,
    pub container: GroupSet,
    pub size_bound_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BohrWitnessSummary {
    pub subgroup: SubgroupSummary,
    pub tau: TorusMapSummary,
    pub characters: Vec<usize>,
    #[serde(serialize_with = "ser_pair")]
    pub delta: Rational,
    pub n: usize,
    pub bohr_set: Vec<Elem>,
    pub bohr_size: usize,
    pub contained: bool,
    pub size_bound_holds: bool,
}

impl BohrWitness {
    pub fn summary(&self) -> BohrWitnessSummary {
        BohrWitnessSummary {
            subgroup: self.subgroup.summary(),
            tau: self.tau.summary(),
            characters: self.characters.clone(),
            delta: self.delta,
            n: self.n,
            bohr_set: self.bohr_set.to_vec(),
            bohr_size: self.bohr_set.len(),
            contained: self.bohr_set.is_subset(&self.container),
            size_bound_holds: self.size_bound_holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Candidate {
    size: usize,
    delta_rank: usize,
    ks: Vec<usize>,
}

impl Candidate {
    /// Better first: larger set, then larger δ, then fewer coordinates, then
    /// lexicographically smaller character list.
    fn better(&self, other: &Candidate) -> bool {
        let ord = other
            .size
            .cmp(&self.size)
            .then(self.delta_rank.cmp(&other.delta_rank))
            .then(self.ks.len().cmp(&other.ks.len()))
            .then(self.ks.cmp(&other.ks));
        ord == Ordering::Less
    }
}

/// Searches tuples of at most `n_max` nontrivial characters of `H` (in
/// increasing index order) and every δ on the grid for a Bohr set inside
/// `container`, returning the one with the most elements.
pub fn bohr_witness_search(
    container: &GroupSet,
    h: &Subgroup,
    n_max: usize,
    delta_grid: &[Rational],
) -> Result<Option<BohrWitness>> {
    container.check_same_group(h.members())?;
    if !container.contains(0) {
        return Ok(None);
    }
    let mut grid: Vec<Rational> = delta_grid.iter().copied().filter(|d| *d > Rational::zero()).collect();
    grid.sort_by(|a, b| b.cmp(a));
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty δ grid".into()));
    }
    let table = CharacterTable::new(h);
    let m = table.len();
    let e = table.exponent() as i64;
    let members = h.members().to_vec();
    let g = h.group();
    let mut best: Option<Candidate> = None;
    for (rank, &delta) in grid.iter().enumerate() {
        // single-character Bohr sets at this δ
        let singles: Vec<GroupSet> = (0..m)
            .into_par_iter()
            .map(|k| {
                let nums = table.numerators(k);
                let mut s = GroupSet::empty(g);
                for (&x, &c) in members.iter().zip(&nums) {
                    let c = c as i64;
                    if Rational::new(c.min(e - c), e) < delta {
                        s.insert(x);
                    }
                }
                s
            })
            .collect();
        let whole = h.members().clone();
        if whole.is_subset(container) {
            consider(&mut best, Candidate { size: whole.len(), delta_rank: rank, ks: vec![] });
            continue;
        }
        if n_max == 0 {
            continue;
        }
        let floor = best.as_ref().map_or(0, |b| b.size);
        let local: Option<Candidate> = (1..m)
            .into_par_iter()
            .map(|k| {
                let mut local = None;
                let mut ks = vec![k];
                dfs(&singles, container, &singles[k], &mut ks, n_max, rank, floor, &mut local);
                local
            })
            .reduce(|| None, |a, b| match (a, b) {
                (Some(a), Some(b)) => Some(if b.better(&a) { b } else { a }),
                (a, None) => a,
                (None, b) => b,
            });
        if let Some(c) = local {
            consider(&mut best, c);
        }
    }
    let Some(best) = best else { return Ok(None) };
    let delta = grid[best.delta_rank];
    let tau = table.tuple_map(&best.ks);
    let b = bohr_set(h, &tau, delta)?;
    if !b.is_subset(container) || b.len() != best.size {
        return Err(Error::TheoremViolation("Bohr witness failed re-verification".into()));
    }
    let n = best.ks.len();
    Ok(Some(BohrWitness {
        subgroup: h.clone(),
        size_bound_holds: size_bound_holds(b.len(), delta, n, h.order()),
        tau,
        characters: best.ks,
        delta,
        n,
        bohr_set: b,
        container: container.clone(),
    }))
}

fn consider(best: &mut Option<Candidate>, c: Candidate) {
    if best.as_ref().map_or(true, |b| c.better(b)) {
        *best = Some(c);
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    singles: &[GroupSet],
    container: &GroupSet,
    current: &GroupSet,
    ks: &mut Vec<usize>,
    n_max: usize,
    rank: usize,
    floor: usize,
    best: &mut Option<Candidate>,
) {
    // extensions only shrink the set
    let bar = best.as_ref().map_or(floor, |b| b.size.max(floor));
    if current.len() < bar {
        return;
    }
    if current.is_subset(container) {
        consider(
            best,
            Candidate {
                size: current.len(),
                delta_rank: rank,
                ks: ks.clone(),
            },
        );
        return;
    }
    if ks.len() == n_max {
        return;
    }
    let last = *ks.last().unwrap();
    for k in last + 1..singles.len() {
        let next = current.intersection(&singles[k]);
        if next.len() < bar {
            continue;
        }
        ks.push(k);
        dfs(singles, container, &next, ks, n_max, rank, floor, best);
        ks.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, BuildOptions, Group};
    use crate::torus::TorusVec;
    use std::sync::Arc;

    fn g(spec: &str) -> Arc<Group> {
        build_group(&spec.parse().unwrap(), &BuildOptions::default()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn map1(h: &Subgroup, vals: &[Rational]) -> TorusMap {
        TorusMap::new(h.clone(), 1, vals.iter().map(|&v| TorusVec::new(vec![v])).collect()).unwrap()
    }

    #[test]
    fn bohr_set_examples() {
        let z8 = g("cyclic:8");
        let h = Subgroup::whole(&z8);
        let tau = CharacterTable::new(&h).torus_map(1);
        assert_eq!(bohr_set(&h, &tau, q(1, 4)).unwrap().to_vec(), vec![0, 1, 7]);
        assert!(bohr_set(&h, &tau, q(3, 5)).unwrap().is_full());
        let trivial = CharacterTable::new(&h).torus_map(0);
        assert!(bohr_set(&h, &trivial, q(1, 100)).unwrap().is_full());
        let bad = map1(&h, &[q(0, 1), q(1, 8), q(1, 4), q(3, 8), q(1, 2), q(5, 8), q(3, 4), q(7, 10)]);
        assert!(matches!(bohr_set(&h, &bad, q(1, 4)), Err(Error::NotExact(_))));
    }

    #[test]
    fn defect_examples() {
        let z4 = g("cyclic:4");
        let h = Subgroup::whole(&z4);
        let f = map1(&h, &[q(0, 1), q(1, 4), q(1, 2), q(7, 10)]);
        assert_eq!(hom_defect(&f).unwrap(), q(1, 10));
        let zero = map1(&h, &[q(0, 1); 4]);
        assert_eq!(hom_defect(&zero).unwrap(), q(0, 1));
        let moved = map1(&h, &[q(1, 3), q(0, 1), q(0, 1), q(0, 1)]);
        assert!(matches!(hom_defect(&moved), Err(Error::IdentityNotZero)));
    }

    #[test]
    fn approx_set_is_sublevel() {
        let z8 = g("cyclic:8");
        let h = Subgroup::whole(&z8);
        let vals: Vec<Rational> = (0..8).map(|x| q(x, 8) + if x == 0 { q(0, 1) } else { q(1, 20) }).collect();
        let f = map1(&h, &vals);
        // f(1) = 7/40, f(6) = 4/5 (distance 1/5), f(7) = 37/40 are below 1/4;
        // f(2) = 3/10 and f(5) = 27/40 are not
        assert_eq!(approx_bohr_set(&h, &f, q(1, 4)).unwrap().to_vec(), vec![0, 1, 6, 7]);
        assert!(approx_bohr_set(&h, &f, q(3, 5)).unwrap().is_full());
    }

    #[test]
    fn rounding_recovers_character() {
        let z8 = g("cyclic:8");
        let h = Subgroup::whole(&z8);
        let vals: Vec<Rational> = (0..8)
            .map(|x| if x == 0 { q(0, 1) } else { q(x, 8) + q(if x % 2 == 0 { 1 } else { -1 }, 40) })
            .collect();
        let f = map1(&h, &vals);
        assert!(f.defect() < q(1, 8));
        match round_to_homomorphism(&f, q(1, 8)).unwrap() {
            Rounding::Found { characters, bohr_set, distance, .. } => {
                assert_eq!(characters, vec![1]);
                assert_eq!(distance, q(1, 40));
                assert_eq!(bohr_set.to_vec(), vec![0]);
            }
            other => panic!("{other:?}"),
        }
        let exact = CharacterTable::new(&h).torus_map(3);
        match round_to_homomorphism(&exact, q(1, 4)).unwrap() {
            Rounding::Found { characters, distance, .. } => {
                assert_eq!(characters, vec![3]);
                assert_eq!(distance, q(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rounding_precondition_and_nearest_character() {
        // On F₂⁴ a map equal to 1/6 off the identity has defect 1/3.
        let ea = g("ea:2^4");
        let h = Subgroup::whole(&ea);
        let vals: Vec<Rational> = (0..16).map(|x| if x == 0 { q(0, 1) } else { q(1, 6) }).collect();
        let f = map1(&h, &vals);
        assert_eq!(f.defect(), q(1, 3));
        assert!(round_to_homomorphism(&f, q(1, 8)).is_err());
        let (ks, d) = nearest_characters(&f);
        assert_eq!(ks, vec![0]);
        assert_eq!(d, q(1, 6));
    }

    #[test]
    fn witness_search_examples() {
        let z16 = g("cyclic:16");
        let h = Subgroup::whole(&z16);
        let grid = [q(1, 2), q(1, 4), q(1, 8), q(1, 16)];
        let w = bohr_witness_search(&GroupSet::full(&z16), &h, 2, &grid).unwrap().unwrap();
        assert!(w.bohr_set.is_full());
        assert_eq!(w.n, 0);
        // (A−A)+(A−A) for A = {0..3} is {−6..6}
        let c = GroupSet::from_indices(&z16, (-6i64..=6).map(|x| x.rem_euclid(16))).unwrap();
        let w = bohr_witness_search(&c, &h, 2, &grid).unwrap().unwrap();
        assert!(w.bohr_set.is_subset(&c));
        assert!(w.size_bound_holds);
        assert!(w.bohr_set.len() >= 7);
        let missing = GroupSet::from_indices(&z16, [1, 2]).unwrap();
        assert!(bohr_witness_search(&missing, &h, 2, &grid).unwrap().is_none());
    }

    #[test]
    fn size_bound_and_nesting() {
        let z12 = g("cyclic:12");
        let h = Subgroup::whole(&z12);
        let t = CharacterTable::new(&h);
        for k in 0..12 {
            for d in [q(1, 12), q(1, 5), q(1, 3)] {
                let tau = t.torus_map(k);
                let b = bohr_set(&h, &tau, d).unwrap();
                assert!(size_bound_holds(b.len(), d, 1, 12));
                assert!(nesting_holds(&h, &tau, d).unwrap());
            }
        }
    }
}
