//! Exact arithmetic on the torus `𝕋ⁿ = (ℝ/ℤ)ⁿ` and maps from a subgroup into it.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, Subgroup};
use crate::rational::{dist_to_int, mod_one, Rational};

/// Default bound on the lcm of coordinate denominators accepted from input.
pub const DEFAULT_DENOMINATOR_LIMIT: i64 = 1_000_000;

/// Product metric on `𝕋ⁿ` built from the circle distance to the nearest
/// integer. `Sup` is the default everywhere; `Sum` is available for
/// experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Sup,
    Sum,
}

/// A point of `𝕋ⁿ` with coordinates reduced into `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusVec(Vec<Rational>);

impl TorusVec {
    pub fn new(coords: Vec<Rational>) -> TorusVec {
        TorusVec(coords.into_iter().map(mod_one).collect())
    }

    /// Like [`TorusVec::new`], rejecting denominators whose lcm exceeds `limit`.
    pub fn with_limit(coords: Vec<Rational>, limit: i64) -> Result<TorusVec> {
        let v = Self::new(coords);
        let l = v.0.iter().fold(1i64, |acc, q| acc.lcm(q.denom()));
        if l > limit {
            return Err(Error::InvalidParameter(format!(
                "denominator lcm {l} exceeds the limit {limit}"
            )));
        }
        Ok(v)
    }

    pub fn zero(n: usize) -> TorusVec {
        TorusVec(vec![Rational::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|q| q.is_zero())
    }

    pub fn add(&self, other: &TorusVec) -> Result<TorusVec> {
        check_dims(self, other)?;
        Ok(TorusVec(
            self.0.iter().zip(&other.0).map(|(a, b)| mod_one(a + b)).collect(),
        ))
    }

    pub fn neg(&self) -> TorusVec {
        TorusVec(self.0.iter().map(|q| mod_one(-q)).collect())
    }

    /// Distance from the origin.
    pub fn norm(&self, metric: Metric) -> Rational {
        let parts = self.0.iter().map(|&q| dist_to_int(q));
        match metric {
            Metric::Sup => parts.max().unwrap_or_else(Rational::zero),
            Metric::Sum => parts.fold(Rational::zero(), |a, b| a + b),
        }
    }
}

fn check_dims(a: &TorusVec, b: &TorusVec) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.dim(), b.dim()))
    }
}

/// `d_n(u, v)` under the sup metric: the largest per-coordinate distance of
/// `u − v` to the nearest integer.
pub fn torus_distance(u: &TorusVec, v: &TorusVec) -> Result<Rational> {
    torus_distance_with(u, v, Metric::Sup)
}

pub fn torus_distance_with(u: &TorusVec, v: &TorusVec, metric: Metric) -> Result<Rational> {
    check_dims(u, v)?;
    let diff = TorusVec(u.0.iter().zip(&v.0).map(|(a, b)| a - b).collect());
    Ok(diff.norm(metric))
}

/// A map `f: H → 𝕋ⁿ` given by its value table on the members of `H`.
#[derive(Clone, Debug)]
pub struct TorusMap {
    domain: Subgroup,
    dim: usize,
    members: Vec<Elem>,
    positions: Vec<u32>,
    values: Vec<TorusVec>,
    exact: bool,
    defect: Rational,
}

impl TorusMap {
    /// Builds a map and measures its homomorphism defect (an `O(|H|² n)` scan).
    /// `values[i]` is the image of the `i`-th smallest member of `domain`.
    pub fn new(domain: Subgroup, dim: usize, values: Vec<TorusVec>) -> Result<TorusMap> {
        let mut map = Self::assemble(domain, dim, values)?;
        map.defect = map.measure_defect();
        map.exact = map.defect.is_zero();
        Ok(map)
    }

    /// For maps known to be homomorphisms by construction (characters and
    /// their tuples).
    pub(crate) fn exact_unchecked(domain: Subgroup, dim: usize, values: Vec<TorusVec>) -> TorusMap {
        let mut map = Self::assemble(domain, dim, values).expect("well-formed character table");
        map.exact = true;
        map
    }

    fn assemble(domain: Subgroup, dim: usize, values: Vec<TorusVec>) -> Result<TorusMap> {
        let members = domain.members().to_vec();
        if values.len() != members.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                members.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, v.dim()));
        }
        let mut positions = vec![u32::MAX; domain.group().order()];
        for (i, &m) in members.iter().enumerate() {
            positions[m as usize] = i as u32;
        }
        Ok(TorusMap {
            domain,
            dim,
            members,
            positions,
            values,
            exact: false,
            defect: Rational::zero(),
        })
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Homomorphism defect measured at construction (0 for exact maps).
    pub fn defect(&self) -> Rational {
        self.defect
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn values(&self) -> &[TorusVec] {
        &self.values
    }

    /// `f(x)`, or `None` outside the domain.
    pub fn value(&self, x: Elem) -> Option<&TorusVec> {
        match self.positions[x as usize] {
            u32::MAX => None,
            p => Some(&self.values[p as usize]),
        }
    }

    pub fn image(&self) -> Vec<TorusVec> {
        let mut img = self.values.clone();
        img.sort_by(|a, b| a.0.cmp(&b.0));
        img.dedup();
        img
    }

    fn measure_defect(&self) -> Rational {
        let g = self.domain.group();
        let mut worst = Rational::zero();
        for (i, &x) in self.members.iter().enumerate() {
            for (j, &y) in self.members.iter().enumerate() {
                let xy = self.positions[g.mul(x, y) as usize] as usize;
                let sum = self.values[i].add(&self.values[j]).expect("uniform dimension");
                let d = torus_distance(&self.values[xy], &sum).expect("uniform dimension");
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Coordinate-wise concatenation `(f, g): H → 𝕋^{n+m}`.
    pub fn concat(&self, other: &TorusMap) -> Result<TorusMap> {
        if self.domain != other.domain {
            return Err(Error::InvalidParameter("maps have different domains".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| TorusVec(a.0.iter().chain(&b.0).copied().collect()))
            .collect();
        let mut out = Self::assemble(self.domain.clone(), self.dim + other.dim, values)?;
        out.exact = self.exact && other.exact;
        out.defect = self.defect.max(other.defect);
        if !out.exact {
            out.defect = out.measure_defect();
        }
        Ok(out)
    }

    /// Serializable view: values as `[[num, den], ...]` per member.
    pub fn summary(&self) -> TorusMapSummary {
        TorusMapSummary {
            n: self.dim,
            domain_subgroup: self.members.clone(),
            values: self
                .values
                .iter()
                .map(|v| v.0.iter().map(|q| (*q.numer(), *q.denom())).collect())
                .collect(),
            exact: self.exact,
            defect: (*self.defect.numer(), *self.defect.denom()),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TorusMapSummary {
    pub n: usize,
    pub domain_subgroup: Vec<Elem>,
    pub values: Vec<Vec<(i64, i64)>>,
    pub exact: bool,
    pub defect: (i64, i64),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn distance_examples() {
        let zero1 = TorusVec::zero(1);
        assert_eq!(torus_distance(&zero1, &zero1).unwrap(), q(0, 1));
        assert_eq!(torus_distance(&zero1, &TorusVec::new(vec![q(3, 4)])).unwrap(), q(1, 4));
        let u = TorusVec::zero(2);
        let v = TorusVec::new(vec![q(1, 4), q(2, 5)]);
        assert_eq!(torus_distance(&u, &v).unwrap(), q(2, 5));
        assert_eq!(torus_distance_with(&u, &v, Metric::Sum).unwrap(), q(1, 4) + q(2, 5));
        assert!(matches!(
            torus_distance(&zero1, &u),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn denominators_are_bounded_on_input() {
        assert!(TorusVec::with_limit(vec![q(1, 1000), q(1, 999)], DEFAULT_DENOMINATOR_LIMIT).is_ok());
        assert!(TorusVec::with_limit(vec![q(1, 1009), q(1, 1013)], DEFAULT_DENOMINATOR_LIMIT).is_err());
    }

    #[test]
    fn reduction_into_unit_interval() {
        let v = TorusVec::new(vec![q(7, 5), q(-1, 3)]);
        assert_eq!(v.coords(), &[q(2, 5), q(2, 3)]);
        assert_eq!(v.add(&v.neg()).unwrap(), TorusVec::zero(2));
    }
}
