use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ablab_core::bogolyubov::{
    bogolyubov_bounded_exponent, croot_sisask, dense_saturation_check, regularity_decompose, BStrategy, CosetRow,
    OracleMethod, OracleOptions, RegularityOptions,
};
use ablab_core::bohr::bohr_witness_search;
use ablab_core::group::{enumerate_subgroups, DEFAULT_SIZE_BUDGET};
use ablab_core::rational::parse_rational;
use ablab_core::report::{group_digest, set_digest, to_canonical_json, to_canonical_value};
use ablab_core::rng::SeedTree;
use ablab_core::setops::{growth_profile, inverse, plunnecke_check, power, product, GrowthMode};
use ablab_core::setspec::parse_set_spec;
use ablab_core::suites::{run_suite, Suite, SuiteOptions};
use ablab_core::vcdim::{stabilizer_side, vc_dimension, Side, DEFAULT_VC_CAP};
use ablab_core::{build_group, BuildOptions, Error, Group, GroupSet, GroupSpec, Rational, Subgroup};

/// Exact additive combinatorics in finite groups.
#[derive(Parser)]
#[command(name = "ablab", version)]
struct Cli {
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Never changes a report.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Search budget: subgroup-oracle nodes.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Largest group order that may be tabulated.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_BUDGET)]
    max_order: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Target {
    /// Group spec, e.g. cyclic:8, ea:2^6, dihedral:4, sym:4, file:table.txt
    #[arg(long)]
    group: String,
    /// Set spec, e.g. interval:0..2, elems:[0,1], random:density=1/2
    #[arg(long)]
    set: String,
}

#[derive(Subcommand)]
enum Command {
    /// Build a group and describe it.
    Group {
        #[arg(long)]
        group: String,
        /// Also enumerate subgroups (small groups only).
        #[arg(long)]
        subgroups: bool,
        /// Print the Cayley table instead of a report.
        #[arg(long)]
        cayley: bool,
    },
    /// Growth ratios, Plünnecke certificates, VC-dimension and a stabilizer.
    Diagnose {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, default_value = "left")]
        side: String,
        #[arg(long, default_value_t = DEFAULT_VC_CAP)]
        vc_cap: usize,
    },
    /// Run the Croot–Sisask ladder.
    CrootSisask {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "alternation")]
        mode: String,
        #[arg(long, default_value_t = 4)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// greedy, whole or random:<tries>
        #[arg(long, default_value = "greedy")]
        strategy: String,
    },
    /// Find a large subgroup inside the Bogolyubov target set.
    Bogolyubov {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "alternation")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Replace H by its normal core in ⟨V⟩.
        #[arg(long)]
        normalize: bool,
        /// Only consider subgroups of at most this index.
        #[arg(long)]
        max_index: Option<usize>,
    },
    /// Stabilizer-based regularity decomposition.
    Regularity {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, default_value = "1")]
        nu: String,
        #[arg(long, default_value_t = DEFAULT_VC_CAP)]
        vc_cap: usize,
        /// Write the per-coset table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search for a Bohr set inside (AA⁻¹)² (or inside A itself).
    BohrSearch {
        #[command(flatten)]
        target: Target,
        /// Container: square for (AA⁻¹)², set for A.
        #[arg(long, default_value = "square")]
        container: String,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        #[arg(long, default_value = "1/2,1/4,1/8,1/16")]
        deltas: String,
    },
    /// Exact product-set saturation checks.
    Saturation {
        #[arg(long)]
        group: String,
        /// One set (four products) or three sets (ABC).
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
    },
    /// Run a randomized exact-theorem suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Include every trial record in the report.
        #[arg(long)]
        records: bool,
    },
}

/// Outcome of a command: a report and whether every verification held.
struct Outcome {
    report: Value,
    verified: bool,
    /// A budget or cap was hit but a partial report exists.
    partial: bool,
    csv: Option<(PathBuf, String)>,
}

impl Outcome {
    fn new(report: Value, verified: bool) -> Outcome {
        Outcome {
            report,
            verified,
            partial: false,
            csv: None,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeBudget { .. } | Error::VcCapHit(_) | Error::BudgetExhausted(_) | Error::Infeasible(_) => 3,
        Error::TheoremViolation(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // ignore failure: the pool may already exist
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if !out.verified {
                eprintln!("error: a verification flag is false; reproduce with: {}", argv());
                ExitCode::from(4)
            } else if out.partial {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            let dump = json!({ "error": e.to_string(), "exit_code": code, "reproducer": argv() });
            eprintln!("{}", serde_json::to_string_pretty(&dump).unwrap_or_default());
            ExitCode::from(code)
        }
    }
}

fn argv() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn emit(cli: &Cli, out: &Outcome) -> Result<(), Error> {
    let text = if let Value::String(s) = &out.report {
        s.clone()
    } else {
        to_canonical_json(&out.report)?
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let Some((p, csv)) = &out.csv {
        std::fs::write(p, csv)?;
    }
    Ok(())
}

fn group(cli: &Cli, spec: &str) -> Result<Arc<Group>, Error> {
    let spec: GroupSpec = spec.parse()?;
    build_group(&spec, &BuildOptions { size_budget: cli.max_order })
}

fn set(cli: &Cli, g: &Arc<Group>, spec: &str, i: usize) -> Result<GroupSet, Error> {
    parse_set_spec(spec, g, &SeedTree::new(cli.seed).indexed("set", i))
}

fn oracle(cli: &Cli, max_index: Option<usize>) -> OracleOptions {
    let mut o = OracleOptions {
        max_index,
        seed: SeedTree::new(cli.seed).child("oracle").seed(),
        ..OracleOptions::default()
    };
    if let Some(b) = cli.budget {
        o.node_budget = b;
    }
    o
}

/// Common envelope: command, group identity, seed and input digests.
fn envelope(cli: &Cli, command: &str, g: &Group, sets: &[&GroupSet], body: impl Serialize) -> Result<Value, Error> {
    let mut m = BTreeMap::new();
    m.insert("command", json!(command));
    m.insert("group", json!(g.label()));
    m.insert("group_order", json!(g.order()));
    m.insert("group_digest", json!(group_digest(g)));
    m.insert("seed", json!(cli.seed));
    m.insert(
        "set_digests",
        json!(sets.iter().map(|s| set_digest(s)).collect::<Vec<_>>()),
    );
    m.insert("report", to_canonical_value(&body)?);
    Ok(to_canonical_value(&m)?)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Group {
            group: spec,
            subgroups,
            cayley,
        } => {
            let g = group(cli, spec)?;
            if *cayley {
                return Ok(Outcome::new(Value::String(g.to_cayley_string()), true));
            }
            let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
            for &o in g.element_orders() {
                *hist.entry(o).or_default() += 1;
            }
            let mut body = json!({
                "abelian": g.is_abelian(),
                "exponent": g.exponent(),
                "element_order_counts": hist.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
                "commutator_subgroup_order": g.commutator_subgroup().len(),
            });
            if *subgroups {
                let subs = enumerate_subgroups(&g, None)?;
                body["subgroups"] = json!(subs.iter().map(Subgroup::summary).collect::<Vec<_>>());
            }
            Ok(Outcome::new(envelope(cli, "group", &g, &[], body)?, true))
        }
        Command::Diagnose {
            target,
            eps,
            side,
            vc_cap,
        } => {
            let g = group(cli, &target.group)?;
            let a = set(cli, &g, &target.set, 0)?;
            let eps = parse_rational(eps)?;
            let side: Side = side.parse()?;
            let growth = growth_profile(&a)?;
            let alt = plunnecke_check(&a, GrowthMode::Alternation)?;
            let tri = plunnecke_check(&a, GrowthMode::Tripling)?;
            let vc = vc_dimension(&a, *vc_cap);
            let stab = stabilizer_side(&a, eps, side)?;
            let verified = alt.all_hold && tri.all_hold;
            let partial = vc.cap_hit;
            let body = json!({
                "growth": to_canonical_value(&growth)?,
                "plunnecke_alternation": to_canonical_value(&alt)?,
                "plunnecke_tripling": to_canonical_value(&tri)?,
                "vc": to_canonical_value(&vc)?,
                "stabilizer": to_canonical_value(&stab)?,
                "stabilizer_members": stab.stabilizer.to_vec(),
            });
            let mut out = Outcome::new(envelope(cli, "diagnose", &g, &[&a], body)?, verified);
            out.partial = partial;
            Ok(out)
        }
        Command::CrootSisask {
            target,
            mode,
            n,
            m,
            strategy,
        } => {
            let g = group(cli, &target.group)?;
            let a = set(cli, &g, &target.set, 0)?;
            let mode: GrowthMode = mode.parse()?;
            let mut strategy: BStrategy = strategy.parse()?;
            if let BStrategy::RandomRestart { seed, .. } = &mut strategy {
                *seed = SeedTree::new(cli.seed).child("b-strategy").seed();
            }
            let r = croot_sisask(&a, mode, *n, *m, strategy)?;
            let s = r.summary();
            Ok(Outcome::new(envelope(cli, "croot-sisask", &g, &[&a], &s)?, s.verified))
        }
        Command::Bogolyubov {
            target,
            mode,
            m,
            normalize,
            max_index,
        } => {
            let g = group(cli, &target.group)?;
            let a = set(cli, &g, &target.set, 0)?;
            let mode: GrowthMode = mode.parse()?;
            let (wit, rep) = bogolyubov_bounded_exponent(&a, mode, *m, *normalize, &oracle(cli, *max_index))?;
            let mut out = Outcome::new(envelope(cli, "bogolyubov", &g, &[&a], &rep)?, rep.verified);
            out.partial = wit.method == OracleMethod::Heuristic;
            Ok(out)
        }
        Command::Regularity {
            target,
            eps,
            nu,
            vc_cap,
            csv,
        } => {
            let g = group(cli, &target.group)?;
            let a = set(cli, &g, &target.set, 0)?;
            let opts = RegularityOptions {
                vc_cap: *vc_cap,
                oracle: oracle(cli, None),
            };
            let (_, rep) = regularity_decompose(&a, parse_rational(eps)?, parse_rational(nu)?, &opts)?;
            let mut out = Outcome::new(envelope(cli, "regularity", &g, &[&a], &rep)?, rep.success);
            out.partial = rep.h.method == OracleMethod::Heuristic;
            out.csv = csv.clone().map(|p| (p, coset_csv(&rep.cosets)));
            Ok(out)
        }
        Command::BohrSearch {
            target,
            container,
            n_max,
            deltas,
        } => {
            let g = group(cli, &target.group)?;
            if !g.is_abelian() {
                return Err(Error::InvalidParameter("bohr-search needs an abelian group".into()));
            }
            let a = set(cli, &g, &target.set, 0)?;
            let w = match container.as_str() {
                "square" => power(&product(&a, &inverse(&a))?, 2),
                "set" => a.clone(),
                other => return Err(Error::InvalidParameter(format!("unknown container {other:?}"))),
            };
            let grid = deltas
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<Rational>, _>>()?;
            let found = bohr_witness_search(&w, &Subgroup::whole(&g), *n_max, &grid)?;
            let summary = found.as_ref().map(|b| b.summary());
            let verified = summary.as_ref().map_or(true, |s| s.contained && s.size_bound_holds);
            let body = json!({
                "container": container,
                "container_size": w.len(),
                "witness": to_canonical_value(&summary)?,
            });
            Ok(Outcome::new(envelope(cli, "bohr-search", &g, &[&a], body)?, verified))
        }
        Command::Saturation { group: spec, sets } => {
            let g = group(cli, spec)?;
            let xs = sets
                .iter()
                .enumerate()
                .map(|(i, s)| set(cli, &g, s, i))
                .collect::<Result<Vec<_>, _>>()?;
            let rep = dense_saturation_check(&xs)?;
            let refs: Vec<&GroupSet> = xs.iter().collect();
            Ok(Outcome::new(envelope(cli, "saturation", &g, &refs, &rep)?, true))
        }
        Command::Verify { suite, trials, records } => {
            let suite: Suite = suite.parse()?;
            let rep = run_suite(
                suite,
                &SuiteOptions {
                    seed: cli.seed,
                    trials: *trials,
                    jobs: cli.jobs,
                    records: *records,
                },
            )?;
            Ok(Outcome::new(to_canonical_value(&rep)?, rep.all_pass))
        }
    }
}

fn coset_csv(rows: &[CosetRow]) -> String {
    let mut s = String::from("representative,inside,outside,in_z,regular_side\n");
    for r in rows {
        let side = match r.regular_side {
            Some(x) => serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            None => String::new(),
        };
        s.push_str(&format!("{},{},{},{},{}\n", r.representative, r.inside, r.outside, r.in_z, side));
    }
    s
}
