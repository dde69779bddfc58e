//! Randomized exact-theorem suites.
//!
//! Each trial draws from its own labeled stream (`suite` → `trial#i`), trials
//! run on a rayon pool of the requested size and are collected in index
//! order, so a report depends only on the seed and the trial count.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bogolyubov::{
    coset_regularity, coset_structure, croot_sisask, dense_saturation_check, is_union_of_cosets,
    largest_subgroup_inside, regularity_decompose, z_bound_holds, BStrategy, OracleOptions, RegularityOptions,
};
use crate::bohr::{bohr_set, nesting_holds, size_bound_holds};
use crate::error::{Error, Result};
use crate::group::{build_group, BuildOptions, CharacterTable, Group, GroupSpec, Subgroup};
use crate::rational::{big_int, Rational};
use crate::report::{sha256_hex, to_canonical_json};
use crate::rng::{SeedTree, StreamRng};
use crate::set::GroupSet;
use crate::setops::{growth_profile, inverse, power, product, GrowthMode};
use crate::setspec::{bernoulli_set, format_set_spec, parse_set_spec};
use crate::vcdim::{haussler_check, stabilizer, vc_dimension, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Ruzsa,
    Plunnecke,
    BohrSize,
    CosetRegularity,
    Haussler,
    Regression,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Ruzsa,
        Suite::Plunnecke,
        Suite::BohrSize,
        Suite::CosetRegularity,
        Suite::Haussler,
        Suite::Regression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ruzsa => "ruzsa",
            Suite::Plunnecke => "plunnecke",
            Suite::BohrSize => "bohr-size",
            Suite::CosetRegularity => "lemma82",
            Suite::Haussler => "haussler",
            Suite::Regression => "regression",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Ruzsa => 1000,
            Suite::Plunnecke => 200,
            Suite::BohrSize => 100,
            Suite::CosetRegularity => 100,
            Suite::Haussler => 50,
            Suite::Regression => REGRESSION_CASES.len(),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// `None` uses the suite default.
    pub trials: Option<usize>,
    /// Worker threads; `0` means rayon's default.
    pub jobs: usize,
    /// Include every trial record, not just failures.
    pub records: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            trials: None,
            jobs: 0,
            records: false,
        }
    }
}

/// One trial: enough to reproduce it, plus every check performed.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TrialRecord {
    pub index: usize,
    pub group: String,
    pub sets: Vec<String>,
    pub params: BTreeMap<String, String>,
    pub checks: BTreeMap<String, bool>,
    /// Trials that could not be set up as required (for example a VC search
    /// hitting its cap) are skipped, not failed.
    pub skipped: bool,
    pub pass: bool,
}

impl TrialRecord {
    fn new(index: usize, group: &Group) -> TrialRecord {
        TrialRecord {
            index,
            group: group.label().to_string(),
            sets: Vec::new(),
            params: BTreeMap::new(),
            checks: BTreeMap::new(),
            skipped: false,
            pass: true,
        }
    }

    fn set(&mut self, x: &GroupSet) {
        self.sets.push(format_set_spec(x));
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.params.insert(k.to_string(), v.to_string());
    }

    fn check(&mut self, k: &str, ok: bool) {
        self.checks.insert(k.to_string(), ok);
        self.pass &= ok;
    }

    fn skip(mut self) -> TrialRecord {
        self.skipped = true;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub all_pass: bool,
    /// SHA-256 of the canonical JSON of all trial records.
    pub records_digest: String,
    pub failures: Vec<TrialRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<TrialRecord>>,
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let trials = opts.trials.unwrap_or_else(|| suite.default_trials());
    let tree = SeedTree::new(opts.seed).child(suite.name());
    let ctx = Context::new(suite)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| ctx.trial(suite, i, tree.indexed("trial", i)))
            .collect::<Result<Vec<_>>>()
    })?;
    let digest = sha256_hex(to_canonical_json(&records)?.as_bytes());
    let skipped = records.iter().filter(|r| r.skipped).count();
    let failures: Vec<TrialRecord> = records.iter().filter(|r| !r.skipped && !r.pass).cloned().collect();
    let failed = failures.len();
    Ok(SuiteReport {
        suite,
        seed: opts.seed,
        trials,
        passed: trials - failed - skipped,
        failed,
        skipped,
        all_pass: failed == 0,
        records_digest: digest,
        failures,
        records: opts.records.then_some(records),
    })
}

struct Context {
    groups: Vec<Arc<Group>>,
}

fn build(spec: &str) -> Result<Arc<Group>> {
    build_group(&spec.parse::<GroupSpec>()?, &BuildOptions::default())
}

impl Context {
    fn new(suite: Suite) -> Result<Context> {
        let specs: Vec<String> = match suite {
            Suite::Ruzsa | Suite::Plunnecke => {
                let mut v: Vec<String> = (1..=64).map(|n| format!("cyclic:{n}")).collect();
                v.extend((1..=8).map(|k| format!("ea:2^{k}")));
                v.extend((1..=8).map(|k| format!("dihedral:{k}")));
                v.push("sym:4".into());
                v
            }
            Suite::BohrSize => {
                let mut v: Vec<String> = [2, 3, 5, 7, 8, 12, 16, 30, 64, 97, 128, 210, 256]
                    .iter()
                    .map(|n| format!("cyclic:{n}"))
                    .collect();
                v.extend(["ea:2^4", "ea:2^8", "ea:3^3", "ea:3^5", "ea:5^2"].map(String::from));
                v.extend(
                    ["product:[cyclic:4,cyclic:6]", "product:[cyclic:2,cyclic:8,cyclic:8]", "product:[ea:3^2,cyclic:9]"]
                        .map(String::from),
                );
                v
            }
            Suite::CosetRegularity => ["cyclic:24", "cyclic:60", "ea:2^5", "ea:2^6", "ea:3^3", "dihedral:8", "dihedral:12", "sym:4"]
                .map(String::from)
                .to_vec(),
            Suite::Haussler => vec!["ea:2^8".into()],
            Suite::Regression => Vec::new(),
        };
        let groups = specs.iter().map(|s| build(s)).collect::<Result<Vec<_>>>()?;
        Ok(Context { groups })
    }

    fn pick(&self, rng: &mut StreamRng) -> Arc<Group> {
        self.groups.choose(rng).expect("suite has groups").clone()
    }

    fn trial(&self, suite: Suite, i: usize, seeds: SeedTree) -> Result<TrialRecord> {
        let mut rng = seeds.stream("draw");
        match suite {
            Suite::Ruzsa => self.ruzsa(i, &mut rng),
            Suite::Plunnecke => self.plunnecke(i, &mut rng),
            Suite::BohrSize => self.bohr_size(i, &mut rng),
            Suite::CosetRegularity => self.coset_regularity(i, &mut rng, seeds),
            Suite::Haussler => self.haussler(i, &mut rng),
            Suite::Regression => regression_case(i),
        }
    }

    fn ruzsa(&self, i: usize, rng: &mut StreamRng) -> Result<TrialRecord> {
        let g = self.pick(rng);
        let mut rec = TrialRecord::new(i, &g);
        let sets: Vec<GroupSet> = (0..3).map(|_| random_nonempty(&g, rng)).collect();
        let (x, y, z) = (&sets[0], &sets[1], &sets[2]);
        for s in &sets {
            rec.set(s);
        }
        let xz = product(x, &inverse(z))?.len() as u128;
        let xy = product(x, &inverse(y))?.len() as u128;
        let yz = product(y, &inverse(z))?.len() as u128;
        rec.check("triangle", xz * y.len() as u128 <= xy * yz);
        Ok(rec)
    }

    fn plunnecke(&self, i: usize, rng: &mut StreamRng) -> Result<TrialRecord> {
        let g = self.pick(rng);
        let mut rec = TrialRecord::new(i, &g);
        let x = random_nonempty(&g, rng);
        rec.set(&x);
        let xi = inverse(&x);
        let q = product(&x, &xi)?;
        let qx = product(&q, &x)?.len();
        let q2 = power(&q, 2).len();
        let q3 = power(&q, 3).len();
        let n = x.len();
        rec.param("k", Rational::new(qx as i64, n as i64));
        // |(XX⁻¹)²| ≤ k²|XX⁻¹|, |(XX⁻¹)³| ≤ k⁵|X| with k = |XX⁻¹X|/|X|
        rec.check("square", big_int(q2) * big_int(n).pow(2) <= big_int(qx).pow(2) * big_int(q.len()));
        rec.check("cube", big_int(q3) * big_int(n).pow(5) <= big_int(qx).pow(5) * big_int(n));
        Ok(rec)
    }

    fn bohr_size(&self, i: usize, rng: &mut StreamRng) -> Result<TrialRecord> {
        let g = self.pick(rng);
        let mut rec = TrialRecord::new(i, &g);
        let h = if rng.gen_bool(0.5) {
            Subgroup::whole(&g)
        } else {
            let k = rng.gen_range(1..=2);
            let gens: Vec<_> = (0..k).map(|_| rng.gen_range(0..g.order() as u32)).collect();
            Subgroup::generated_by(&g, &gens)
        };
        let table = CharacterTable::new(&h);
        let n = rng.gen_range(1..=3usize);
        let ks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..table.len())).collect();
        let tau = table.tuple_map(&ks);
        let delta = Rational::new(rng.gen_range(1..=12), rng.gen_range(12..=48));
        rec.set(h.members());
        rec.param("characters", format!("{ks:?}"));
        rec.param("delta", delta);
        let b = bohr_set(&h, &tau, delta)?;
        rec.param("bohr_size", b.len());
        rec.check("size_bound", size_bound_holds(b.len(), delta, n, h.order()));
        rec.check("nesting", nesting_holds(&h, &tau, delta)?);
        rec.check("symmetric", inverse(&b) == b && b.contains(0));
        Ok(rec)
    }

    fn coset_regularity(&self, i: usize, rng: &mut StreamRng, seeds: SeedTree) -> Result<TrialRecord> {
        let g = self.pick(rng);
        let mut rec = TrialRecord::new(i, &g);
        let a = if rng.gen_bool(0.5) {
            random_nonempty(&g, rng)
        } else {
            perturbed_cosets(&g, rng)
        };
        let eps = *[
            Rational::new(1, 16),
            Rational::new(1, 8),
            Rational::new(1, 4),
            Rational::new(1, 3),
            Rational::new(1, 2),
            Rational::new(3, 4),
            Rational::new(1, 1),
        ]
        .choose(rng)
        .unwrap();
        rec.set(&a);
        rec.param("epsilon", eps);
        let stab = stabilizer(&a, eps)?.stabilizer;
        let opts = OracleOptions {
            seed: seeds.child("oracle").seed(),
            ..OracleOptions::default()
        };
        let big_h = largest_subgroup_inside(&stab, &Subgroup::whole(&g), &opts)?.subgroup;
        // sometimes a random subgroup of it instead
        let h = if rng.gen_bool(0.5) || big_h.order() == 1 {
            big_h
        } else {
            let m = big_h.members().to_vec();
            Subgroup::generated_by(&g, &[*m.choose(rng).unwrap()])
        };
        rec.set(h.members());
        rec.check("h_inside_stabilizer", h.members().is_subset(&stab));
        let (d, defect) = coset_structure(&a, &h)?;
        let (z, rows) = coset_regularity(&a, &h, eps)?;
        rec.check("d_union_of_cosets", is_union_of_cosets(&d, &h, Side::Right));
        rec.check("structure_defect", defect <= eps);
        rec.check("z_bound", z_bound_holds(z.len(), eps, g.order()));
        rec.check("dichotomy", rows.iter().all(|r| r.in_z || r.regular_side.is_some()));
        Ok(rec)
    }

    fn haussler(&self, i: usize, rng: &mut StreamRng) -> Result<TrialRecord> {
        let g = self.pick(rng);
        let mut rec = TrialRecord::new(i, &g);
        // up to 20 draws for a set with conclusive VC ≤ 4
        for _ in 0..20 {
            let a = low_vc_candidate(&g, rng);
            let delta = Rational::new(rng.gen_range(1..=10), 10);
            let rep = haussler_check(&a, delta, 5)?;
            if rep.pass.is_none() || rep.vc.dim > 4 {
                continue;
            }
            rec.set(&a);
            rec.param("delta", delta);
            rec.param("d", rep.vc.dim);
            rec.param("stabilizer_size", rep.stabilizer_size);
            rec.check("bound", rep.pass == Some(true));
            return Ok(rec);
        }
        Ok(rec.skip())
    }
}

fn random_nonempty(g: &Arc<Group>, rng: &mut StreamRng) -> GroupSet {
    let rho = Rational::new(rng.gen_range(1..=15), 16);
    let mut x = bernoulli_set(g, rho, rng);
    if x.is_empty() {
        x.insert(rng.gen_range(0..g.order() as u32));
    }
    x
}

/// A union of cosets of a random cyclic-generated subgroup, with a few
/// points toggled.
fn perturbed_cosets(g: &Arc<Group>, rng: &mut StreamRng) -> GroupSet {
    let k = rng.gen_range(1..=2);
    let gens: Vec<_> = (0..k).map(|_| rng.gen_range(0..g.order() as u32)).collect();
    let h = Subgroup::generated_by(g, &gens);
    let mut a = GroupSet::empty(g);
    for c in h.right_cosets() {
        if rng.gen_bool(0.5) {
            a.union_with(&c);
        }
    }
    for _ in 0..rng.gen_range(0..=3) {
        a.toggle(rng.gen_range(0..g.order() as u32));
    }
    if a.is_empty() {
        a.insert(0);
    }
    a
}

fn low_vc_candidate(g: &Arc<Group>, rng: &mut StreamRng) -> GroupSet {
    match rng.gen_range(0..4) {
        0 => {
            let rho = Rational::new(1, rng.gen_range(16..=48));
            bernoulli_set(g, rho, rng)
        }
        1 => {
            let r = rng.gen_range(0..=3u32);
            let mask = rng.gen_range(0..g.order() as u32);
            GroupSet::from_predicate(g, |x| (x ^ mask).count_ones() <= r)
        }
        2 => perturbed_cosets(g, rng),
        _ => {
            let k = rng.gen_range(1..=6);
            let gens: Vec<_> = (0..k).map(|_| rng.gen_range(0..g.order() as u32)).collect();
            Subgroup::generated_by(g, &gens).into_members()
        }
    }
}

// ---------------------------------------------------------------------------
// Regression cases: fixed inputs with independently known answers.

const REGRESSION_CASES: [&str; 12] = [
    "interval-tripling",
    "hamming-ball",
    "ruzsa-interval",
    "oracle-cyclic6",
    "oracle-cyclic5",
    "coset-structure",
    "balanced-coset",
    "saturation-cyclic7",
    "bohr-cyclic8",
    "croot-sisask-subgroup",
    "regularity-cosets",
    "vc-subgroup",
];

fn regression_case(i: usize) -> Result<TrialRecord> {
    let name = REGRESSION_CASES
        .get(i)
        .ok_or_else(|| Error::InvalidParameter(format!("regression has {} cases", REGRESSION_CASES.len())))?;
    let seeds = SeedTree::new(0);
    let parse = |g: &Arc<Group>, s: &str| parse_set_spec(s, g, &seeds);
    let g = build(match *name {
        "interval-tripling" | "bohr-cyclic8" => "cyclic:8",
        "hamming-ball" => "ea:2^4",
        "ruzsa-interval" => "cyclic:64",
        "oracle-cyclic6" => "cyclic:6",
        "oracle-cyclic5" => "cyclic:5",
        "coset-structure" | "balanced-coset" => "cyclic:16",
        "saturation-cyclic7" => "cyclic:7",
        "croot-sisask-subgroup" => "cyclic:12",
        "regularity-cosets" | "vc-subgroup" => "ea:2^6",
        _ => unreachable!(),
    })?;
    let mut rec = TrialRecord::new(i, &g);
    rec.param("case", name);
    let whole = Subgroup::whole(&g);
    match *name {
        "interval-tripling" => {
            let x = parse(&g, "interval:0..2")?;
            let p = growth_profile(&x)?;
            rec.check("tripling_7_3", p.tripling == Rational::new(7, 3));
        }
        "hamming-ball" => {
            rec.check("size_5", parse(&g, "hamming:1")?.len() == 5);
        }
        "ruzsa-interval" => {
            let x = parse(&g, "interval:0..2")?;
            let q = product(&x, &inverse(&x))?;
            rec.check("difference_set", q == parse(&g, "interval:-2..2")?);
            rec.check("square", power(&q, 2) == parse(&g, "interval:-4..4")?);
        }
        "oracle-cyclic6" => {
            let w = parse(&g, "elems:[0,2,3,4]")?;
            let h = largest_subgroup_inside(&w, &whole, &OracleOptions::default())?;
            rec.check("subgroup_024", h.subgroup.members().to_vec() == vec![0, 2, 4]);
        }
        "oracle-cyclic5" => {
            let w = parse(&g, "elems:[0,1,-1]")?;
            let h = largest_subgroup_inside(&w, &whole, &OracleOptions::default())?;
            rec.check("trivial", h.subgroup.order() == 1);
        }
        "coset-structure" => {
            let h = Subgroup::generated_by(&g, &[2]);
            let a = parse(&g, "elems:[0,2,6,8,10,12,14]")?;
            let (d, defect) = coset_structure(&a, &h)?;
            rec.check("d_is_h", &d == h.members());
            rec.check("defect_1_16", defect == Rational::new(1, 16));
        }
        "balanced-coset" => {
            let h = Subgroup::generated_by(&g, &[2]);
            let a = parse(&g, "elems:[0,2,4,6]")?;
            let (z, _) = coset_regularity(&a, &h, Rational::new(1, 20))?;
            rec.check("coset_in_z", h.members().is_subset(&z));
        }
        "saturation-cyclic7" => {
            let r = dense_saturation_check(&[parse(&g, "elems:[0,1]")?])?;
            rec.check("size_5", r.products[0].1 == 5);
            rec.check("not_saturated", !r.all_equal);
        }
        "bohr-cyclic8" => {
            let table = CharacterTable::new(&whole);
            let b = bohr_set(&whole, &table.torus_map(1), Rational::new(1, 4))?;
            // |x/8| < 1/4 on the circle: x ∈ {−1, 0, 1}
            rec.check("interval", b == parse(&g, "interval:-1..1")?);
        }
        "croot-sisask-subgroup" => {
            let h = Subgroup::generated_by(&g, &[3]);
            let r = croot_sisask(h.members(), GrowthMode::Alternation, 5, 1, BStrategy::Greedy)?;
            rec.check("y_is_h", &r.y == h.members());
        }
        "regularity-cosets" => {
            let a = parse(&g, "cosets:H=<1,2,4,8>,reps=[0,16]")?;
            let k = Subgroup::generated_by(&g, &[1, 2, 4, 8]);
            let (h, rep) = regularity_decompose(&a, Rational::new(1, 4), Rational::one(), &RegularityOptions::default())?;
            rec.check("success", rep.success);
            rec.check("h_contains_k", k.is_subgroup_of(&h));
            rec.check("defect_0", rep.structure_defect == Rational::new(0, 1));
            rec.check("z_empty", rep.z.is_empty());
        }
        "vc-subgroup" => {
            let a = Subgroup::generated_by(&g, &[1, 2]).into_members();
            // translates of a subgroup form a partition: VC-dimension 1
            rec.check("dim_1", vc_dimension(&a, 6).dim == 1);
        }
        _ => unreachable!(),
    }
    Ok(rec)
}
