//! Abelianization `G/[G,G]`, its cyclic decomposition, and the characters
//! `G → 𝕋¹` (which all factor through the abelianization).

use std::sync::Arc;

use super::{Elem, Group, Subgroup};
use crate::rational::Rational;
use crate::torus::{TorusMap, TorusVec};

pub struct Abelianization {
    pub quotient: Arc<Group>,
    /// `projection[x]` is the coset of `x` in the quotient.
    pub projection: Vec<Elem>,
}

/// Cyclic decomposition of the abelianization: generators of orders
/// `orders[0] ≥ …` (each dividing the first) and, for every element of `G`,
/// its exponent vector with respect to those generators.
#[derive(Debug)]
pub(crate) struct CyclicDecomposition {
    pub quotient: Arc<Group>,
    pub projection: Vec<Elem>,
    pub orders: Vec<usize>,
    /// Indexed by quotient element.
    pub coords: Vec<Vec<u32>>,
}

pub(crate) fn decompose(g: &Group) -> CyclicDecomposition {
    let n = g.order();
    let comm = g.commutator_subgroup();
    let (quotient, projection) = quotient_by(g, comm);
    let (orders, coords) = decompose_abelian(&quotient);
    debug_assert_eq!(projection.len(), n);
    CyclicDecomposition {
        quotient,
        projection,
        orders,
        coords,
    }
}

/// Quotient by a normal subgroup with sorted members `normal`. Cosets are
/// numbered by their smallest element, so the identity coset is 0.
fn quotient_by(g: &Group, normal: &[Elem]) -> (Arc<Group>, Vec<Elem>) {
    let n = g.order();
    let mut label = vec![Elem::MAX; n];
    let mut reps: Vec<Elem> = Vec::new();
    for x in 0..n as Elem {
        if label[x as usize] != Elem::MAX {
            continue;
        }
        let id = reps.len() as Elem;
        reps.push(x);
        for &k in normal {
            label[g.mul(x, k) as usize] = id;
        }
    }
    let m = reps.len();
    let mut mult = Vec::with_capacity(m * m);
    for &a in &reps {
        for &b in &reps {
            mult.push(label[g.mul(a, b) as usize]);
        }
    }
    let q = Group::from_table_unchecked(format!("{}/N", g.label()), m, mult)
        .expect("quotient by a normal subgroup is a group");
    (q, label)
}

/// Greedy peeling: split off the cyclic subgroup generated by an element of
/// maximal order, decompose the quotient, then lift each quotient generator
/// to an element of the same order.
fn decompose_abelian(q: &Group) -> (Vec<usize>, Vec<Vec<u32>>) {
    let n = q.order();
    if n == 1 {
        return (vec![], vec![vec![]]);
    }
    let orders_all = q.element_orders();
    let (g1, &e) = orders_all
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    let g1 = g1 as Elem;
    // powers of g1
    let mut cyc = Vec::with_capacity(e);
    let mut log = vec![u32::MAX; n];
    let mut y = 0;
    for i in 0..e {
        log[y as usize] = i as u32;
        cyc.push(y);
        y = q.mul(y, g1);
    }
    let mut sorted_cyc = cyc.clone();
    sorted_cyc.sort_unstable();
    let (sub, proj) = quotient_by(q, &sorted_cyc);
    let (sub_orders, sub_coords) = decompose_abelian(&sub);

    // lift generators of the quotient
    let sub_gens = generators_from_coords(&sub_coords, sub_orders.len());
    let mut gens = vec![g1];
    for (j, &hq) in sub_gens.iter().enumerate() {
        let o = sub_orders[j];
        let h = (0..n as Elem).find(|&x| proj[x as usize] == hq).unwrap();
        let s = log[q.pow(h, o as u64) as usize] as usize;
        debug_assert_eq!(s % o, 0, "lifting lemma: order divides the discrete log");
        let correction = q.pow(g1, ((e - s / o) % e) as u64);
        gens.push(q.mul(h, correction));
    }
    let mut orders = vec![e];
    orders.extend(&sub_orders);

    // exponent vectors for every element by walking all tuples
    let mut coords = vec![Vec::new(); n];
    let mut tuple = vec![0u32; orders.len()];
    let mut filled = 0;
    loop {
        let mut x = 0;
        for (i, &t) in tuple.iter().enumerate() {
            x = q.mul(x, q.pow(gens[i], t as u64));
        }
        debug_assert!(coords[x as usize].is_empty(), "decomposition is not direct");
        coords[x as usize] = tuple.clone();
        filled += 1;
        if !advance(&mut tuple, &orders) {
            break;
        }
    }
    assert_eq!(filled, n, "cyclic decomposition must cover the group");
    (orders, coords)
}

/// Recovers generator elements (coordinate unit vectors) from a coordinate table.
fn generators_from_coords(coords: &[Vec<u32>], rank: usize) -> Vec<Elem> {
    (0..rank)
        .map(|i| {
            coords
                .iter()
                .position(|c| c.iter().enumerate().all(|(j, &v)| v == u32::from(i == j)))
                .unwrap() as Elem
        })
        .collect()
}

/// Mixed-radix increment, first coordinate fastest. Returns false on wrap.
fn advance(tuple: &mut [u32], radices: &[usize]) -> bool {
    for (t, &r) in tuple.iter_mut().zip(radices) {
        *t += 1;
        if (*t as usize) < r {
            return true;
        }
        *t = 0;
    }
    false
}

pub fn abelianization(g: &Arc<Group>) -> Abelianization {
    let d = g.cyclic_decomposition();
    Abelianization {
        quotient: d.quotient.clone(),
        projection: d.projection.clone(),
    }
}

/// The dual of a (sub)group's abelianization in integer form: character `k`
/// sends `x` to `numerator(k, x) / exponent`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    domain: Subgroup,
    exponent: usize,
    orders: Vec<usize>,
    /// Per member of the domain (in sorted order), scaled coordinates
    /// `c_i(x) · exponent / orders[i]`.
    scaled: Vec<Vec<usize>>,
    positions: Vec<u32>,
}

impl CharacterTable {
    pub fn new(domain: &Subgroup) -> CharacterTable {
        let (h, embed) = domain.as_group();
        let d = h.cyclic_decomposition();
        let exponent = d.orders.first().copied().unwrap_or(1);
        let scaled = (0..h.order())
            .map(|x| {
                let c = &d.coords[d.projection[x] as usize];
                c.iter()
                    .zip(&d.orders)
                    .map(|(&ci, &oi)| ci as usize * (exponent / oi))
                    .collect()
            })
            .collect();
        let mut positions = vec![u32::MAX; domain.group().order()];
        for (i, &m) in embed.iter().enumerate() {
            positions[m as usize] = i as u32;
        }
        CharacterTable {
            domain: domain.clone(),
            exponent,
            orders: d.orders.clone(),
            scaled,
            positions,
        }
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    /// Number of characters, `|H/[H,H]|`.
    pub fn len(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Common denominator of all character values.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn cyclic_orders(&self) -> &[usize] {
        &self.orders
    }

    /// Mixed-radix digits of character `k` (first factor fastest).
    pub fn digits(&self, mut k: usize) -> Vec<usize> {
        self.orders
            .iter()
            .map(|&o| {
                let d = k % o;
                k /= o;
                d
            })
            .collect()
    }

    /// Numerator of `χ_k(x)` over [`CharacterTable::exponent`]; `x` must be
    /// in the domain.
    pub fn numerator(&self, k: usize, x: Elem) -> usize {
        let p = self.positions[x as usize];
        assert!(p != u32::MAX, "element outside the character domain");
        self.numerator_at(k, p as usize)
    }

    fn numerator_at(&self, k: usize, pos: usize) -> usize {
        let mut k = k;
        let mut acc = 0;
        for (&o, &c) in self.orders.iter().zip(&self.scaled[pos]) {
            acc += (k % o) * c;
            k /= o;
        }
        acc % self.exponent
    }

    /// Numerators for every member of the domain, in sorted member order.
    pub fn numerators(&self, k: usize) -> Vec<usize> {
        (0..self.scaled.len()).map(|p| self.numerator_at(k, p)).collect()
    }

    pub fn value(&self, k: usize, x: Elem) -> Rational {
        Rational::new(self.numerator(k, x) as i64, self.exponent as i64)
    }

    /// Character `k` as an exact one-dimensional torus map.
    pub fn torus_map(&self, k: usize) -> TorusMap {
        self.tuple_map(&[k])
    }

    /// The exact map `x ↦ (χ_{k_1}(x), …, χ_{k_n}(x))`.
    pub fn tuple_map(&self, ks: &[usize]) -> TorusMap {
        let e = self.exponent as i64;
        let cols: Vec<Vec<usize>> = ks.iter().map(|&k| self.numerators(k)).collect();
        let values = (0..self.scaled.len())
            .map(|p| TorusVec::new(cols.iter().map(|c| Rational::new(c[p] as i64, e)).collect()))
            .collect();
        TorusMap::exact_unchecked(self.domain.clone(), ks.len(), values)
    }
}

/// All characters `G → 𝕋¹` as exact one-dimensional torus maps, trivial first.
pub fn characters(g: &Arc<Group>) -> Vec<TorusMap> {
    let table = CharacterTable::new(&Subgroup::whole(g));
    (0..table.len()).map(|k| table.torus_map(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, BuildOptions, GroupSpec};
    use num_traits::Zero;

    fn build(spec: GroupSpec) -> Arc<Group> {
        build_group(&spec, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn abelianization_examples() {
        let z6 = build(GroupSpec::Cyclic(6));
        let ab = abelianization(&z6);
        assert_eq!(ab.quotient.order(), 6);
        assert_eq!(ab.projection, (0..6).collect::<Vec<_>>());
        let s3 = build(GroupSpec::Symmetric(3));
        assert_eq!(abelianization(&s3).quotient.order(), 2);
        let a5 = build(GroupSpec::Alternating(5));
        assert_eq!(abelianization(&a5).quotient.order(), 1);
        let d4 = build(GroupSpec::Dihedral(4));
        assert_eq!(abelianization(&d4).quotient.order(), 4);
    }

    #[test]
    fn projection_is_a_homomorphism() {
        for spec in [GroupSpec::Symmetric(4), GroupSpec::Dihedral(5), GroupSpec::Alternating(4)] {
            let g = build(spec);
            let ab = abelianization(&g);
            for x in 0..g.order() as Elem {
                for y in 0..g.order() as Elem {
                    let p = &ab.projection;
                    assert_eq!(p[g.mul(x, y) as usize], ab.quotient.mul(p[x as usize], p[y as usize]));
                }
            }
        }
    }

    #[test]
    fn cyclic_characters() {
        let n = 8;
        let chars = characters(&build(GroupSpec::Cyclic(n)));
        assert_eq!(chars.len(), n);
        for (k, chi) in chars.iter().enumerate() {
            for x in 0..n {
                let expected = crate::rational::mod_one(Rational::new((k * x) as i64, n as i64));
                assert_eq!(chi.value(x as Elem).unwrap().coords(), &[expected]);
            }
        }
    }

    #[test]
    fn perfect_group_has_only_trivial_character() {
        let chars = characters(&build(GroupSpec::Alternating(5)));
        assert_eq!(chars.len(), 1);
        assert!(chars[0].values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn klein_four_characters() {
        let chars = characters(&build(GroupSpec::ElementaryAbelian { p: 2, k: 2 }));
        assert_eq!(chars.len(), 4);
        let half = Rational::new(1, 2);
        for chi in &chars {
            for v in chi.values() {
                assert!(v.coords()[0].is_zero() || v.coords()[0] == half);
            }
        }
    }

    #[test]
    fn characters_are_exact_and_distinct() {
        for spec in [
            GroupSpec::Product(vec![GroupSpec::Cyclic(4), GroupSpec::Cyclic(6)]),
            GroupSpec::Symmetric(4),
            GroupSpec::Dihedral(6),
            GroupSpec::ElementaryAbelian { p: 3, k: 2 },
            GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(4), GroupSpec::Cyclic(8)]),
        ] {
            let g = build(spec);
            let chars = characters(&g);
            assert_eq!(chars.len(), abelianization(&g).quotient.order());
            for chi in &chars {
                let rebuilt = TorusMap::new(chi.domain().clone(), 1, chi.values().to_vec()).unwrap();
                assert!(rebuilt.defect().is_zero());
            }
            for i in 0..chars.len() {
                for j in i + 1..chars.len() {
                    assert_ne!(chars[i].values(), chars[j].values());
                }
            }
        }
    }

    #[test]
    fn subgroup_character_table() {
        let g = build(GroupSpec::Cyclic(12));
        let h = Subgroup::generated_by(&g, &[3]); // {0,3,6,9}
        let t = CharacterTable::new(&h);
        assert_eq!(t.len(), 4);
        assert_eq!(t.exponent(), 4);
        // character 1 sends the generator 3 to 1/4
        assert_eq!(t.value(1, 3), Rational::new(1, 4));
    }
}
