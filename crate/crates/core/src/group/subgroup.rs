use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::{Elem, Group};
use crate::error::{Error, Result};
use crate::set::GroupSet;

/// Unbounded enumeration is refused above this order.
pub const UNBOUNDED_ENUMERATION_LIMIT: usize = 512;
/// Hard cap on the number of subgroups a single enumeration may produce.
pub const SUBGROUP_COUNT_BUDGET: usize = 200_000;

/// A verified subgroup of its parent group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: GroupSet,
    index: usize,
    is_normal: bool,
}

impl Subgroup {
    /// Checks closure (identity, products, inverses) and computes index and
    /// normality.
    pub fn from_set(members: GroupSet) -> Result<Subgroup> {
        let g = members.group().clone();
        if !members.contains(0) {
            return Err(Error::InvalidParameter("subgroup must contain the identity".into()));
        }
        let elems = members.to_vec();
        for &x in &elems {
            if !members.contains(g.inv(x)) {
                return Err(Error::InvalidParameter(format!("not closed under inverse at {x}")));
            }
            for &y in &elems {
                if !members.contains(g.mul(x, y)) {
                    return Err(Error::InvalidParameter(format!(
                        "not closed under products at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(Self::trusted(members))
    }

    /// For sets produced by a closure computation.
    pub(crate) fn trusted(members: GroupSet) -> Subgroup {
        let g = members.group().clone();
        let size = members.len();
        let is_normal = is_normal_in_set(&g, &members, &GroupSet::full(&g));
        Subgroup {
            index: g.order() / size,
            members,
            is_normal,
        }
    }

    pub fn whole(group: &Arc<Group>) -> Subgroup {
        Subgroup {
            members: GroupSet::full(group),
            index: 1,
            is_normal: true,
        }
    }

    pub fn trivial(group: &Arc<Group>) -> Subgroup {
        Subgroup {
            members: GroupSet::identity(group),
            index: group.order(),
            is_normal: true,
        }
    }

    /// The subgroup generated by `gens`.
    pub fn generated_by(group: &Arc<Group>, gens: &[Elem]) -> Subgroup {
        Self::trusted(generate(group, gens))
    }

    pub fn group(&self) -> &Arc<Group> {
        self.members.group()
    }

    pub fn members(&self) -> &GroupSet {
        &self.members
    }

    pub fn into_members(self) -> GroupSet {
        self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Index in the parent group.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_normal(&self) -> bool {
        self.is_normal
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.members.contains(x)
    }

    /// Whether `gHg⁻¹ = H` for every `g` in `ambient`.
    pub fn is_normal_in(&self, ambient: &Subgroup) -> bool {
        is_normal_in_set(self.group(), &self.members, ambient.members())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The subgroup as a group in its own right. Members are renumbered in
    /// increasing order, so the identity stays at index 0; the returned vector
    /// maps new indices back to parent indices.
    pub fn as_group(&self) -> (Arc<Group>, Vec<Elem>) {
        let g = self.group();
        let members = self.members.to_vec();
        if members.len() == g.order() {
            return (g.clone(), members);
        }
        let mut pos = vec![Elem::MAX; g.order()];
        for (i, &m) in members.iter().enumerate() {
            pos[m as usize] = i as Elem;
        }
        let k = members.len();
        let mut mult = Vec::with_capacity(k * k);
        for &a in &members {
            for &b in &members {
                mult.push(pos[g.mul(a, b) as usize]);
            }
        }
        let h = Group::from_table_unchecked(format!("subgroup of {}", g.label()), k, mult)
            .expect("subgroup table is a group");
        (h, members)
    }

    /// Left cosets `gH` as sets, ordered by smallest representative.
    pub fn left_cosets(&self) -> Vec<GroupSet> {
        self.cosets(true)
    }

    /// Right cosets `Hg` as sets, ordered by smallest representative.
    pub fn right_cosets(&self) -> Vec<GroupSet> {
        self.cosets(false)
    }

    fn cosets(&self, left: bool) -> Vec<GroupSet> {
        let g = self.group();
        let mut covered = GroupSet::empty(g);
        let mut out = Vec::with_capacity(self.index);
        for x in 0..g.order() as Elem {
            if covered.contains(x) {
                continue;
            }
            let c = if left {
                self.members.translate_left(x)
            } else {
                self.members.translate_right(x)
            };
            covered.union_with(&c);
            out.push(c);
        }
        out
    }

    /// Serializable view: sorted member indices plus index and normality.
    pub fn summary(&self) -> SubgroupSummary {
        SubgroupSummary {
            members: self.members.to_vec(),
            order: self.order(),
            index: self.index,
            is_normal: self.is_normal,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SubgroupSummary {
    pub members: Vec<Elem>,
    pub order: usize,
    pub index: usize,
    pub is_normal: bool,
}

fn is_normal_in_set(g: &Group, h: &GroupSet, ambient: &GroupSet) -> bool {
    let hs = h.to_vec();
    ambient
        .iter()
        .all(|a| hs.iter().all(|&x| h.contains(g.conj(a, x))))
}

/// Sorted members of `⟨gens⟩`.
pub(crate) fn closure_members(g: &Group, gens: &[Elem]) -> Vec<Elem> {
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut out = vec![0];
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `⟨gens⟩` as a set. In a finite group closing under right multiplication
/// by the generators already yields the subgroup.
pub fn generate(group: &Arc<Group>, gens: &[Elem]) -> GroupSet {
    let mut s = GroupSet::identity(group);
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = group.mul(x, g);
            if !s.contains(y) {
                s.insert(y);
                queue.push_back(y);
            }
        }
    }
    s
}

/// `⟨S ∪ {g}⟩` for a subgroup `S`, growing from the existing members.
pub(crate) fn extend_subgroup(base: &GroupSet, gens: &[Elem], g: Elem) -> GroupSet {
    let group = base.group();
    let mut all_gens = gens.to_vec();
    all_gens.push(g);
    let mut s = base.clone();
    let mut queue: VecDeque<Elem> = base.iter().collect();
    while let Some(x) = queue.pop_front() {
        for &h in &all_gens {
            let y = group.mul(x, h);
            if !s.contains(y) {
                s.insert(y);
                queue.push_back(y);
            }
        }
    }
    s
}

/// Every subgroup of `g` with index at most `max_index`.
///
/// Starts from the cyclic subgroups and repeatedly joins each discovered
/// subgroup with every cyclic subgroup not already inside it; the resulting
/// lattice is deduplicated by member bit vector. Output is sorted by order,
/// then by member list.
pub fn enumerate_subgroups(g: &Arc<Group>, max_index: Option<usize>) -> Result<Vec<Subgroup>> {
    if max_index.is_none() && g.order() > UNBOUNDED_ENUMERATION_LIMIT {
        return Err(Error::Infeasible(format!(
            "unbounded subgroup enumeration needs |G| ≤ {UNBOUNDED_ENUMERATION_LIMIT}, got {}",
            g.order()
        )));
    }
    // cyclic subgroups, one generator each
    let mut cyclic: Vec<(GroupSet, Elem)> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for x in 0..g.order() as Elem {
        let c = generate(g, &[x]);
        if seen.insert(c.words().to_vec()) {
            cyclic.push((c, x));
        }
    }
    let mut found: Vec<(GroupSet, Vec<Elem>)> = cyclic
        .iter()
        .map(|(c, x)| (c.clone(), if *x == 0 { vec![] } else { vec![*x] }))
        .collect();
    let mut cursor = 0;
    while cursor < found.len() {
        let (base, gens) = found[cursor].clone();
        cursor += 1;
        for (c, x) in &cyclic {
            if c.is_subset(&base) {
                continue;
            }
            let joined = extend_subgroup(&base, &gens, *x);
            if seen.insert(joined.words().to_vec()) {
                let mut jg = gens.clone();
                jg.push(*x);
                found.push((joined, jg));
                if found.len() > SUBGROUP_COUNT_BUDGET {
                    return Err(Error::BudgetExhausted(format!(
                        "more than {SUBGROUP_COUNT_BUDGET} subgroups"
                    )));
                }
            }
        }
    }
    let mut out: Vec<Subgroup> = found
        .into_iter()
        .map(|(s, _)| s)
        .filter(|s| max_index.map_or(true, |m| g.order() / s.len() <= m))
        .map(Subgroup::trusted)
        .collect();
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.members().to_vec().cmp(&b.members().to_vec()))
    });
    Ok(out)
}

/// Largest normal subgroup of `G` inside `h`: `⋂_g g h g⁻¹`.
pub fn normal_core(h: &Subgroup) -> Subgroup {
    normal_core_in(h, &Subgroup::whole(h.group()))
}

/// Largest subgroup of `h` normalized by `ambient`: `⋂_{g ∈ ambient} g h g⁻¹`.
pub fn normal_core_in(h: &Subgroup, ambient: &Subgroup) -> Subgroup {
    let g = h.group();
    let mut core = h.members().clone();
    for a in ambient.members().iter() {
        let conj = GroupSet::from_predicate(g, |x| h.contains(g.conj(g.inv(a), x)));
        core = core.intersection(&conj);
    }
    Subgroup::trusted(core)
}
