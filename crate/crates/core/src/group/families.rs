use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use super::{Elem, Group};
use crate::error::{Error, Result};

pub const DEFAULT_SIZE_BUDGET: usize = 4096;

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub size_budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            size_budget: DEFAULT_SIZE_BUDGET,
        }
    }
}

/// Families of groups the laboratory can tabulate.
///
/// Text form (used on the command line): `cyclic:8`, `ea:2^6`,
/// `dihedral:4` (order 8), `sym:4`, `alt:5`, `product:[cyclic:2,sym:3]`,
/// `file:path/to/table.txt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    ElementaryAbelian { p: usize, k: usize },
    /// Dihedral group of the `n`-gon, of order `2n`.
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Product(Vec<GroupSpec>),
    CayleyFile(PathBuf),
}

impl GroupSpec {
    /// Order of the group described, or `None` for files (unknown until read).
    pub fn order(&self) -> Option<usize> {
        Some(match self {
            GroupSpec::Cyclic(n) => *n,
            GroupSpec::ElementaryAbelian { p, k } => p.checked_pow(*k as u32)?,
            GroupSpec::Dihedral(n) => 2 * n,
            GroupSpec::Symmetric(n) => (1..=*n).product(),
            GroupSpec::Alternating(n) => ((1..=*n).product::<usize>() / 2).max(1),
            GroupSpec::Product(fs) => {
                let mut acc: usize = 1;
                for f in fs {
                    acc = acc.checked_mul(f.order()?)?;
                }
                acc
            }
            GroupSpec::CayleyFile(_) => return None,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::ElementaryAbelian { p, k } => write!(f, "ea:{p}^{k}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "sym:{n}"),
            GroupSpec::Alternating(n) => write!(f, "alt:{n}"),
            GroupSpec::Product(fs) => {
                write!(f, "product:[")?;
                for (i, s) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
            GroupSpec::CayleyFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = SpecParser { text: s, pos: 0 };
        let spec = p.spec()?;
        if p.pos != s.len() {
            return Err(Error::parse(p.pos, "trailing input after group spec"));
        }
        Ok(spec)
    }
}

struct SpecParser<'a> {
    text: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn number(&mut self) -> Result<usize> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(Error::parse(self.pos, "expected a number"));
        }
        let v = self.rest()[..digits]
            .parse()
            .map_err(|_| Error::parse(self.pos, "number too large"))?;
        self.pos += digits;
        Ok(v)
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected {c:?}")))
        }
    }

    fn spec(&mut self) -> Result<GroupSpec> {
        let colon = self
            .rest()
            .find(':')
            .ok_or_else(|| Error::parse(self.pos, "expected family:parameters"))?;
        let family = self.rest()[..colon].to_ascii_lowercase();
        self.pos += colon + 1;
        Ok(match family.as_str() {
            "cyclic" | "z" => GroupSpec::Cyclic(self.number()?),
            "ea" | "elementary_abelian" => {
                let p = self.number()?;
                self.eat('^')?;
                let k = self.number()?;
                GroupSpec::ElementaryAbelian { p, k }
            }
            "dihedral" | "d" => GroupSpec::Dihedral(self.number()?),
            "sym" | "symmetric" | "s" => GroupSpec::Symmetric(self.number()?),
            "alt" | "alternating" | "a" => GroupSpec::Alternating(self.number()?),
            "product" => {
                self.eat('[')?;
                let mut factors = vec![self.spec()?];
                while self.rest().starts_with(',') {
                    self.pos += 1;
                    factors.push(self.spec()?);
                }
                self.eat(']')?;
                GroupSpec::Product(factors)
            }
            "file" => {
                let path = self.rest().to_string();
                self.pos = self.text.len();
                GroupSpec::CayleyFile(PathBuf::from(path))
            }
            other => {
                return Err(Error::parse(
                    self.pos - colon - 1,
                    format!("unknown group family {other:?}"),
                ))
            }
        })
    }
}

/// Tabulates the group described by `spec`. Element orderings are fixed per
/// family so that reports are reproducible.
pub fn build_group(spec: &GroupSpec, opts: &BuildOptions) -> Result<Arc<Group>> {
    if let Some(order) = spec.order() {
        if order > opts.size_budget {
            return Err(Error::SizeBudget {
                order,
                budget: opts.size_budget,
            });
        }
    } else if !matches!(spec, GroupSpec::CayleyFile(_)) {
        return Err(Error::SizeBudget {
            order: usize::MAX,
            budget: opts.size_budget,
        });
    }
    let label = spec.to_string();
    match spec {
        GroupSpec::Cyclic(n) => {
            let n = positive(*n, "cyclic order")?;
            let mult = table(n, |a, b| (a + b) % n);
            Group::from_table_unchecked(label, n, mult)
        }
        GroupSpec::ElementaryAbelian { p, k } => {
            let p = *p;
            if p < 2 || !is_prime(p) {
                return Err(Error::BadGroupSpec(format!("{p} is not prime")));
            }
            let n = p.pow(*k as u32);
            let k = *k;
            let mult = table(n, |a, b| {
                // digit-wise addition in base p
                let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
                for _ in 0..k {
                    out += ((a % p + b % p) % p) * place;
                    a /= p;
                    b /= p;
                    place *= p;
                }
                out
            });
            Group::from_table_unchecked(label, n, mult)
        }
        GroupSpec::Dihedral(n) => {
            let n = positive(*n, "dihedral parameter")?;
            // index i + n*f stands for r^i s^f
            let mult = table(2 * n, |a, b| {
                let (i, f) = (a % n, a / n);
                let (j, g) = (b % n, b / n);
                let rot = if f == 0 { (i + j) % n } else { (i + n - j) % n };
                rot + n * ((f + g) % 2)
            });
            Group::from_table_unchecked(label, 2 * n, mult)
        }
        GroupSpec::Symmetric(n) => {
            if *n > 5 {
                return Err(Error::BadGroupSpec("symmetric groups are limited to n ≤ 5".into()));
            }
            permutation_group(label, permutations(*n))
        }
        GroupSpec::Alternating(n) => {
            if *n > 6 {
                return Err(Error::BadGroupSpec("alternating groups are limited to n ≤ 6".into()));
            }
            let even = permutations(*n).into_iter().filter(|p| is_even(p)).collect();
            permutation_group(label, even)
        }
        GroupSpec::Product(factors) => {
            if factors.is_empty() {
                return Err(Error::BadGroupSpec("empty direct product".into()));
            }
            let groups = factors
                .iter()
                .map(|f| build_group(f, opts))
                .collect::<Result<Vec<_>>>()?;
            let n: usize = groups.iter().map(|g| g.order()).product();
            if n > opts.size_budget {
                return Err(Error::SizeBudget {
                    order: n,
                    budget: opts.size_budget,
                });
            }
            // mixed radix with the first factor varying fastest
            let mult = table(n, |a, b| {
                let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
                for g in &groups {
                    let m = g.order();
                    out += g.mul((a % m) as Elem, (b % m) as Elem) as usize * place;
                    a /= m;
                    b /= m;
                    place *= m;
                }
                out
            });
            Group::from_table_unchecked(label, n, mult)
        }
        GroupSpec::CayleyFile(path) => {
            let g = Group::from_cayley_file(path)?;
            if g.order() > opts.size_budget {
                return Err(Error::SizeBudget {
                    order: g.order(),
                    budget: opts.size_budget,
                });
            }
            Ok(g)
        }
    }
}

fn positive(n: usize, what: &str) -> Result<usize> {
    if n == 0 {
        Err(Error::BadGroupSpec(format!("{what} must be positive")))
    } else {
        Ok(n)
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn table(n: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Elem> {
    let mut mult = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mult.push(f(a, b) as Elem);
        }
    }
    mult
}

/// All permutations of `0..n` in lexicographic order (identity first).
fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn is_even(p: &[u8]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Composition `(στ)(x) = σ(τ(x))`.
fn permutation_group(label: String, perms: Vec<Vec<u8>>) -> Result<Arc<Group>> {
    use std::collections::HashMap;
    let index: HashMap<&[u8], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let n = perms.len();
    let mut mult = Vec::with_capacity(n * n);
    let mut buf = vec![0u8; perms.first().map_or(0, |p| p.len())];
    for s in &perms {
        for t in &perms {
            for (x, slot) in buf.iter_mut().enumerate() {
                *slot = s[t[x] as usize];
            }
            mult.push(index[buf.as_slice()] as Elem);
        }
    }
    Group::from_table_unchecked(label, n, mult)
}
