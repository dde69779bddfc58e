//! Finite groups as dense Cayley tables.
//!
//! Elements are indices `0..n` with the identity always at index 0. All
//! derived data (element orders, exponent, commutator subgroup, cyclic
//! decomposition of the abelianization) is computed lazily and cached.

mod abelian;
mod families;
mod subgroup;

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use abelian::{abelianization, characters, Abelianization, CharacterTable};
pub use families::{build_group, BuildOptions, GroupSpec, DEFAULT_SIZE_BUDGET};
pub use subgroup::{
    enumerate_subgroups, generate, normal_core, normal_core_in, Subgroup, SubgroupSummary,
    SUBGROUP_COUNT_BUDGET, UNBOUNDED_ENUMERATION_LIMIT,
};

/// Tables up to this order get the full `n^3` associativity check.
pub const FULL_ASSOC_LIMIT: usize = 512;
const SAMPLED_ASSOC_TRIPLES: usize = 1_000_000;

pub type Elem = u32;

pub struct Group {
    order: usize,
    mult: Vec<Elem>,
    inv: Vec<Elem>,
    label: String,
    elem_orders: OnceLock<Vec<usize>>,
    commutator: OnceLock<Vec<Elem>>,
    ab_data: OnceLock<abelian::CyclicDecomposition>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish()
    }
}

impl Group {
    /// Builds a group from a row-major multiplication table, checking every
    /// group axiom (associativity is sampled above [`FULL_ASSOC_LIMIT`]).
    pub fn from_table(label: impl Into<String>, order: usize, mult: Vec<Elem>) -> Result<Arc<Group>> {
        let g = Self::from_table_unchecked(label, order, mult)?;
        g.validate()?;
        Ok(g)
    }

    /// Builds a group without the associativity check. Latin-square shape,
    /// identity at 0 and inverses are still required.
    pub(crate) fn from_table_unchecked(
        label: impl Into<String>,
        order: usize,
        mult: Vec<Elem>,
    ) -> Result<Arc<Group>> {
        if order == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if mult.len() != order * order {
            return Err(Error::MalformedCayley(format!(
                "expected {} entries, found {}",
                order * order,
                mult.len()
            )));
        }
        if let Some(&bad) = mult.iter().find(|&&v| v as usize >= order) {
            return Err(Error::MalformedCayley(format!("entry {bad} out of range")));
        }
        for x in 0..order {
            if mult[x] as usize != x || mult[x * order] as usize != x {
                return Err(Error::NotAGroup(format!(
                    "index 0 is not a two-sided identity at element {x}"
                )));
            }
        }
        let mut inv = vec![Elem::MAX; order];
        for x in 0..order {
            let row = &mult[x * order..(x + 1) * order];
            match row.iter().position(|&v| v == 0) {
                Some(y) => {
                    if mult[y * order + x] != 0 {
                        return Err(Error::NotAGroup(format!("element {x} has no two-sided inverse")));
                    }
                    inv[x] = y as Elem;
                }
                None => return Err(Error::NotAGroup(format!("element {x} has no inverse"))),
            }
        }
        Ok(Arc::new(Group {
            order,
            mult,
            inv,
            label: label.into(),
            elem_orders: OnceLock::new(),
            commutator: OnceLock::new(),
            ab_data: OnceLock::new(),
        }))
    }

    /// Latin-square, identity, inverse and associativity checks.
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        let mut seen = vec![0u32; n];
        for x in 0..n {
            let stamp = x as u32 + 1;
            for y in 0..n {
                let v = self.mult[x * n + y] as usize;
                if seen[v] == stamp {
                    return Err(Error::NotAGroup(format!("row {x} is not a permutation")));
                }
                seen[v] = stamp;
            }
        }
        seen.iter_mut().for_each(|s| *s = 0);
        for y in 0..n {
            let stamp = y as u32 + 1;
            for x in 0..n {
                let v = self.mult[x * n + y] as usize;
                if seen[v] == stamp {
                    return Err(Error::NotAGroup(format!("column {y} is not a permutation")));
                }
                seen[v] = stamp;
            }
        }
        for x in 0..n {
            let i = self.inv[x] as usize;
            if self.mult[x * n + i] != 0 || self.mult[i * n + x] != 0 {
                return Err(Error::NotAGroup(format!("bad inverse for {x}")));
            }
        }
        let assoc_fail = |x: usize, y: usize, z: usize| {
            Error::NotAGroup(format!("associativity fails on ({x}, {y}, {z})"))
        };
        if n <= FULL_ASSOC_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    let xy = self.mult[x * n + y] as usize;
                    for z in 0..n {
                        let yz = self.mult[y * n + z] as usize;
                        if self.mult[xy * n + z] != self.mult[x * n + yz] {
                            return Err(assoc_fail(x, y, z));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6173_736f_6369_6174);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(x as Elem, y as Elem), z as Elem)
                    != self.mul(x as Elem, self.mul(y as Elem, z as Elem))
                {
                    return Err(assoc_fail(x, y, z));
                }
            }
        }
        Ok(())
    }

    /// Reads the text Cayley format: `n` on the first line, then `n` rows of
    /// `n` space-separated indices.
    pub fn from_cayley_str(label: impl Into<String>, text: &str) -> Result<Arc<Group>> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::MalformedCayley("empty file".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::MalformedCayley("first line must be the order".into()))?;
        let mut mult = Vec::with_capacity(n * n);
        for row in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::MalformedCayley(format!("missing row {row}")))?;
            let before = mult.len();
            for tok in line.split_whitespace() {
                let v: Elem = tok
                    .parse()
                    .map_err(|_| Error::MalformedCayley(format!("bad entry {tok:?} in row {row}")))?;
                mult.push(v);
            }
            if mult.len() - before != n {
                return Err(Error::MalformedCayley(format!(
                    "row {row} has {} entries, expected {n}",
                    mult.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::MalformedCayley("trailing rows".into()));
        }
        Self::from_table(label, n, mult)
    }

    pub fn from_cayley_file(path: &Path) -> Result<Arc<Group>> {
        let text = std::fs::read_to_string(path)?;
        Self::from_cayley_str(format!("file:{}", path.display()), &text)
    }

    pub fn to_cayley_string(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for row in self.mult.chunks(self.order) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mult[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    #[inline]
    pub(crate) fn row(&self, a: Elem) -> &[Elem] {
        &self.mult[a as usize * self.order..(a as usize + 1) * self.order]
    }

    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut base = a;
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))
    }

    pub fn element_orders(&self) -> &[usize] {
        self.elem_orders.get_or_init(|| {
            (0..self.order as Elem)
                .map(|x| {
                    let mut k = 1;
                    let mut y = x;
                    while y != 0 {
                        y = self.mul(y, x);
                        k += 1;
                    }
                    k
                })
                .collect()
        })
    }

    pub fn element_order(&self, x: Elem) -> usize {
        self.element_orders()[x as usize]
    }

    /// Least `r` with `x^r = 1` for all `x`: the lcm of the element orders.
    pub fn exponent(&self) -> usize {
        self.element_orders().iter().fold(1, |acc, &o| acc.lcm(&o))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order;
        (0..n).all(|x| (x + 1..n).all(|y| self.mult[x * n + y] == self.mult[y * n + x]))
    }

    /// Sorted members of the commutator subgroup `[G, G]`.
    pub fn commutator_subgroup(&self) -> &[Elem] {
        self.commutator.get_or_init(|| {
            let n = self.order as Elem;
            let mut gens: Vec<Elem> = Vec::new();
            let mut seen = vec![false; self.order];
            for x in 0..n {
                for y in 0..n {
                    let c = self.commutator(x, y);
                    if !seen[c as usize] {
                        seen[c as usize] = true;
                        gens.push(c);
                    }
                }
            }
            // The subgroup generated by all commutators is already normal.
            subgroup::closure_members(self, &gens)
        })
    }

    pub(crate) fn cyclic_decomposition(&self) -> &abelian::CyclicDecomposition {
        self.ab_data.get_or_init(|| abelian::decompose(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> Arc<Group> {
        build_group(&GroupSpec::Cyclic(n), &BuildOptions::default()).unwrap()
    }

    #[test]
    fn cayley_round_trip() {
        let g = build_group(&GroupSpec::Dihedral(3), &BuildOptions::default()).unwrap();
        let text = g.to_cayley_string();
        let h = Group::from_cayley_str("copy", &text).unwrap();
        assert_eq!(h.order(), 6);
        assert_eq!(h.mult, g.mult);
    }

    #[test]
    fn rejects_non_groups() {
        // identity not at index 0
        assert!(Group::from_cayley_str("bad", "2\n1 0\n0 1\n").is_err());
        // not a Latin square
        assert!(Group::from_cayley_str("bad", "2\n0 1\n1 1\n").is_err());
        // wrong row length
        assert!(matches!(
            Group::from_cayley_str("bad", "2\n0 1\n1\n"),
            Err(Error::MalformedCayley(_))
        ));
        // a loop of order 5 that is a Latin square with identity and inverses
        // but is not associative
        let loop5 = "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
        assert!(matches!(
            Group::from_cayley_str("loop", loop5),
            Err(Error::NotAGroup(_))
        ));
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(z(8).exponent(), 8);
        let ea = build_group(&GroupSpec::ElementaryAbelian { p: 2, k: 4 }, &BuildOptions::default()).unwrap();
        assert_eq!(ea.order(), 16);
        assert_eq!(ea.exponent(), 2);
        let d4 = build_group(&GroupSpec::Dihedral(4), &BuildOptions::default()).unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.exponent(), 4);
        let s4 = build_group(&GroupSpec::Symmetric(4), &BuildOptions::default()).unwrap();
        assert_eq!(s4.exponent(), 12);
    }

    #[test]
    fn exponent_divides_order_and_kills_everything() {
        for spec in [
            GroupSpec::Cyclic(12),
            GroupSpec::Dihedral(6),
            GroupSpec::Symmetric(4),
            GroupSpec::Alternating(5),
            GroupSpec::Product(vec![GroupSpec::Cyclic(4), GroupSpec::Symmetric(3)]),
        ] {
            let g = build_group(&spec, &BuildOptions::default()).unwrap();
            let e = g.exponent();
            assert_eq!(g.order() % e, 0);
            for x in 0..g.order() as Elem {
                assert_eq!(g.pow(x, e as u64), 0);
            }
        }
    }

    #[test]
    fn commutator_subgroups() {
        assert_eq!(z(6).commutator_subgroup(), &[0]);
        let s3 = build_group(&GroupSpec::Symmetric(3), &BuildOptions::default()).unwrap();
        assert_eq!(s3.commutator_subgroup().len(), 3);
        let a5 = build_group(&GroupSpec::Alternating(5), &BuildOptions::default()).unwrap();
        assert_eq!(a5.commutator_subgroup().len(), 60);
    }
}
