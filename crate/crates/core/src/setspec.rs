//! Text syntax for subsets of a group.
//!
//! ```text
//! elems:[0,1,2]                       explicit indices (negative wraps in cyclic groups)
//! interval:a..b                       {a, a+1, ..., b} in a cyclic group, inclusive
//! random:density=1/2,seed=7           each element kept independently with probability ρ
//! random:size=12,seed=7               uniformly random subset of exactly that size
//! hamming:r                           Hamming ball of radius r about 0 in ea:2^k
//! cosets:H=<g1,g2>,reps=[r1,r2]       union of left cosets rH (side=right for Hr)
//! hex:0f3a                            bit vector as produced by GroupSet::to_hex
//! file:path                           whitespace/comma separated index list
//! all | identity | empty
//! ```
//!
//! `H` in `cosets:` is either `<gens>` (the generated subgroup) or `[members]`.
//! A missing `seed=` falls back to the stream supplied by the caller.

use std::path::Path;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Elem, Group, GroupSpec, Subgroup};
use crate::rational::{parse_rational, Rational};
use crate::rng::SeedTree;
use crate::set::GroupSet;

/// Parses a set spec. `seeds` supplies randomness for `random:` specs without
/// an explicit seed.
pub fn parse_set_spec(text: &str, group: &Arc<Group>, seeds: &SeedTree) -> Result<GroupSet> {
    let text = text.trim();
    match text {
        "all" => return Ok(GroupSet::full(group)),
        "identity" => return Ok(GroupSet::identity(group)),
        "empty" => return Ok(GroupSet::empty(group)),
        _ => {}
    }
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| Error::parse(0, "expected kind:arguments"))?;
    let off = kind.len() + 1;
    match kind {
        "elems" => {
            let (xs, end) = index_list(body, off)?;
            expect_end(body, end, off)?;
            elems(group, &xs, off)
        }
        "interval" => interval(group, body, off),
        "random" => random(group, body, off, seeds),
        "hamming" => hamming(group, body, off),
        "cosets" => cosets(group, body, off),
        "hex" => GroupSet::from_hex(group, body),
        "file" => {
            let text = std::fs::read_to_string(Path::new(body))?;
            let xs = text
                .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<i64>().map_err(|_| Error::parse(0, format!("bad index {t:?} in {body}"))))
                .collect::<Result<Vec<_>>>()?;
            elems(group, &xs, off)
        }
        other => Err(Error::parse(0, format!("unknown set kind {other:?}"))),
    }
}

fn family(group: &Group) -> Option<GroupSpec> {
    group.label().parse().ok()
}

fn expect_end(body: &str, end: usize, off: usize) -> Result<()> {
    if body[end..].trim().is_empty() {
        Ok(())
    } else {
        Err(Error::parse(off + end, "trailing input"))
    }
}

/// Parses `[i, j, ...]` at the start of `body`; returns the values and the
/// byte offset just past `]`.
fn index_list(body: &str, off: usize) -> Result<(Vec<i64>, usize)> {
    if !body.starts_with('[') {
        return Err(Error::parse(off, "expected '['"));
    }
    let close = body
        .find(']')
        .ok_or_else(|| Error::parse(off + body.len(), "expected ']'"))?;
    let inner = &body[1..close];
    let mut xs = Vec::new();
    let mut pos = 1;
    for tok in inner.split(',') {
        let t = tok.trim();
        if !t.is_empty() {
            xs.push(
                t.parse::<i64>()
                    .map_err(|_| Error::parse(off + pos, format!("bad index {t:?}")))?,
            );
        }
        pos += tok.len() + 1;
    }
    Ok((xs, close + 1))
}

fn elems(group: &Arc<Group>, xs: &[i64], off: usize) -> Result<GroupSet> {
    let n = group.order() as i64;
    let cyclic = matches!(family(group), Some(GroupSpec::Cyclic(_)));
    let mapped = xs.iter().map(|&x| if cyclic && x < 0 && x >= -n { x + n } else { x });
    GroupSet::from_indices(group, mapped).map_err(|e| match e {
        Error::OutOfRange { .. } => Error::parse(off, e.to_string()),
        e => e,
    })
}

fn interval(group: &Arc<Group>, body: &str, off: usize) -> Result<GroupSet> {
    let Some(GroupSpec::Cyclic(n)) = family(group) else {
        return Err(Error::parse(0, "interval: requires a cyclic group"));
    };
    let (a, b) = body
        .split_once("..")
        .ok_or_else(|| Error::parse(off, "expected a..b"))?;
    let a: i64 = a.trim().parse().map_err(|_| Error::parse(off, "bad interval start"))?;
    let b: i64 = b
        .trim()
        .parse()
        .map_err(|_| Error::parse(off + body.find("..").unwrap() + 2, "bad interval end"))?;
    if b < a {
        return Ok(GroupSet::empty(group));
    }
    let n = n as i64;
    let len = (b - a + 1).min(n);
    Ok(GroupSet::from_indices(group, (0..len).map(|i| (a + i).rem_euclid(n)))?)
}

/// `key=value` pairs separated by commas, where values may be bracketed.
fn key_values(body: &str, off: usize) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < body.len() {
        let start = i;
        let eq = body[i..]
            .find('=')
            .ok_or_else(|| Error::parse(off + i, "expected key=value"))?
            + i;
        let key = body[start..eq].trim().to_string();
        i = eq + 1;
        let vstart = i;
        let mut depth = 0i32;
        while i < body.len() {
            match bytes[i] {
                b'[' | b'<' => depth += 1,
                b']' | b'>' => depth -= 1,
                b',' if depth == 0 => break,
                _ => {}
            }
            i += 1;
        }
        if depth != 0 {
            return Err(Error::parse(off + vstart, "unbalanced brackets"));
        }
        out.push((key, body[vstart..i].trim().to_string(), off + vstart));
        i += 1;
    }
    Ok(out)
}

fn random(group: &Arc<Group>, body: &str, off: usize, seeds: &SeedTree) -> Result<GroupSet> {
    let mut density: Option<Rational> = None;
    let mut size: Option<usize> = None;
    let mut seed: Option<u64> = None;
    for (k, v, pos) in key_values(body, off)? {
        match k.as_str() {
            "density" => {
                density = Some(parse_rational(&v).map_err(|_| Error::parse(pos, "bad density"))?)
            }
            "size" => size = Some(v.parse().map_err(|_| Error::parse(pos, "bad size"))?),
            "seed" => seed = Some(v.parse().map_err(|_| Error::parse(pos, "bad seed"))?),
            _ => return Err(Error::parse(pos, format!("unknown key {k:?}"))),
        }
    }
    let tree = seed.map(SeedTree::new).unwrap_or(*seeds);
    let mut rng = tree.stream("random-set");
    let n = group.order();
    match (density, size) {
        (Some(rho), None) => {
            if rho < Rational::from_integer(0) || rho > Rational::from_integer(1) {
                return Err(Error::parse(off, "density must lie in [0, 1]"));
            }
            Ok(bernoulli_set(group, rho, &mut rng))
        }
        (None, Some(m)) => {
            if m > n {
                return Err(Error::parse(off, format!("size {m} exceeds the group order {n}")));
            }
            Ok(GroupSet::from_indices(group, sample(&mut rng, n, m).into_iter())?)
        }
        _ => Err(Error::parse(off, "random: needs exactly one of density= or size=")),
    }
}

/// Keeps each element independently with probability `rho`, compared in
/// integers so the result does not depend on float rounding.
pub fn bernoulli_set<R: Rng>(group: &Arc<Group>, rho: Rational, rng: &mut R) -> GroupSet {
    let (num, den) = (*rho.numer() as u64, *rho.denom() as u64);
    GroupSet::from_predicate(group, |_| rng.gen_range(0..den) < num)
}

fn hamming(group: &Arc<Group>, body: &str, off: usize) -> Result<GroupSet> {
    match family(group) {
        Some(GroupSpec::ElementaryAbelian { p: 2, .. }) => {}
        _ => return Err(Error::parse(0, "hamming: requires an ea:2^k group")),
    }
    let r: u32 = body.trim().parse().map_err(|_| Error::parse(off, "bad radius"))?;
    Ok(GroupSet::from_predicate(group, |x| x.count_ones() <= r))
}

fn cosets(group: &Arc<Group>, body: &str, off: usize) -> Result<GroupSet> {
    let mut h: Option<Subgroup> = None;
    let mut reps: Option<Vec<i64>> = None;
    let mut right = false;
    for (k, v, pos) in key_values(body, off)? {
        match k.as_str() {
            "H" | "h" => {
                h = Some(if let Some(inner) = v.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
                    let (gens, _) = index_list(&format!("[{inner}]"), pos)?;
                    let gens = elems(group, &gens, pos)?.to_vec();
                    Subgroup::generated_by(group, &gens)
                } else {
                    let (xs, _) = index_list(&v, pos)?;
                    Subgroup::from_set(elems(group, &xs, pos)?)
                        .map_err(|_| Error::parse(pos, "listed elements do not form a subgroup"))?
                })
            }
            "reps" => reps = Some(index_list(&v, pos)?.0),
            "side" => {
                right = match v.as_str() {
                    "left" => false,
                    "right" => true,
                    _ => return Err(Error::parse(pos, "side must be left or right")),
                }
            }
            _ => return Err(Error::parse(pos, format!("unknown key {k:?}"))),
        }
    }
    let h = h.ok_or_else(|| Error::parse(off, "cosets: missing H="))?;
    let reps = reps.ok_or_else(|| Error::parse(off, "cosets: missing reps="))?;
    let reps = elems(group, &reps, off)?;
    let mut out = GroupSet::empty(group);
    for r in reps.iter() {
        out.union_with(&if right {
            h.members().translate_right(r)
        } else {
            h.members().translate_left(r)
        });
    }
    Ok(out)
}

/// The `elems:[...]` form of a set, which parses back to an equal set.
pub fn format_set_spec(x: &GroupSet) -> String {
    let items: Vec<String> = x.iter().map(|e: Elem| e.to_string()).collect();
    format!("elems:[{}]", items.join(","))
}
