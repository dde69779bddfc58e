use std::sync::Arc;

use ablab_core::bogolyubov::{
    bogolyubov_bounded_exponent, dense_saturation_check, is_union_of_cosets, regularity_decompose, OracleOptions,
    RegularityOptions,
};
use ablab_core::rng::SeedTree;
use ablab_core::setops::{growth_profile, inverse, power, product, GrowthMode};
use ablab_core::setspec::parse_set_spec;
use ablab_core::suites::{run_suite, Suite, SuiteOptions};
use ablab_core::vcdim::Side;
use ablab_core::{build_group, BuildOptions, Group, GroupSet, Rational, Subgroup};

fn group(spec: &str) -> Arc<Group> {
    build_group(&spec.parse().unwrap(), &BuildOptions::default()).unwrap()
}

fn set(g: &Arc<Group>, spec: &str) -> GroupSet {
    parse_set_spec(spec, g, &SeedTree::new(1)).unwrap()
}

#[test]
fn interval_growth_in_cyclic_group() {
    let g = group("cyclic:64");
    let a = set(&g, "interval:0..2");
    let p = growth_profile(&a).unwrap();
    assert_eq!(p.size, 3);
    assert_eq!(p.square_size, 5);
    assert_eq!(p.cube_size, 7);
    assert_eq!(p.tripling, Rational::new(7, 3));
}

#[test]
fn sumset_of_interval_matches_hand_count() {
    let g = group("cyclic:16");
    let a = set(&g, "interval:0..3");
    let d = product(&a, &inverse(&a)).unwrap();
    let dd = product(&d, &d).unwrap();
    assert_eq!(dd, set(&g, "interval:-6..6"));
    assert_eq!(dd.len(), 13);
}

#[test]
fn union_of_cosets_is_perfectly_regular() {
    let g = group("ea:2^6");
    let a = set(&g, "cosets:H=<1,2,4>,reps=[0,8,24]");
    let (h, r) = regularity_decompose(&a, Rational::new(1, 4), Rational::from_integer(1), &RegularityOptions::default()).unwrap();
    assert!(r.success, "{:?}", r.flags);
    assert!(r.flags.all());
    assert!(r.z.is_empty());
    assert!(is_union_of_cosets(&a, &h, Side::Right));
    let k = Subgroup::generated_by(&g, &[1, 2, 4]);
    assert!(k.is_subgroup_of(&h));
}

#[test]
fn regularity_on_a_nonabelian_group() {
    let g = group("dihedral:8");
    let a = set(&g, "elems:[0,1,2,3,8]");
    let (h, r) = regularity_decompose(&a, Rational::new(1, 2), Rational::from_integer(1), &RegularityOptions::default()).unwrap();
    assert!(r.flags.all(), "{:?}", r.flags);
    assert_eq!(r.index, g.order() / h.order());
}

#[test]
fn regularity_rejects_bad_parameters() {
    let g = group("cyclic:8");
    let a = set(&g, "interval:0..2");
    assert!(regularity_decompose(&a, Rational::from_integer(0), Rational::from_integer(1), &RegularityOptions::default()).is_err());
}

#[test]
fn bogolyubov_on_dense_set_in_exponent_two_group() {
    let g = group("ea:2^5");
    let a = set(&g, "hamming:2");
    let (wit, rep) = bogolyubov_bounded_exponent(&a, GrowthMode::Alternation, 1, false, &OracleOptions::default()).unwrap();
    let d = product(&a, &inverse(&a)).unwrap();
    assert!(wit.subgroup.members().is_subset(&power(&d, 2)));
    assert!(serde_json::to_value(&rep).is_ok());
}

#[test]
fn alternating_group_saturates() {
    let g = group("alt:5");
    let a = set(&g, "random:density=1/2,seed=3");
    let r = dense_saturation_check(&[a]).unwrap();
    assert!(r.all_equal);
    assert_eq!(r.products.len(), 4);
}

#[test]
fn saturation_rejects_empty_sets() {
    let g = group("cyclic:5");
    assert!(dense_saturation_check(&[set(&g, "empty")]).is_err());
    assert!(dense_saturation_check(&[]).is_err());
}

#[test]
fn suites_pass_and_are_reproducible() {
    for suite in [Suite::Ruzsa, Suite::Plunnecke, Suite::BohrSize, Suite::CosetRegularity, Suite::Regression] {
        let trials = if suite == Suite::Regression { None } else { Some(20) };
        let opts = SuiteOptions { seed: 5, trials, jobs: 1, records: false };
        let a = run_suite(suite, &opts).unwrap();
        let b = run_suite(suite, &SuiteOptions { jobs: 2, ..opts.clone() }).unwrap();
        assert!(a.all_pass, "{suite:?}: {:?}", a.failures);
        assert_eq!(a.records_digest, b.records_digest);
    }
}

#[test]
fn suite_names_round_trip() {
    for s in ["ruzsa", "plunnecke", "bohr-size", "lemma82", "haussler", "regression"] {
        let suite: Suite = s.parse().unwrap();
        assert_eq!(suite.name(), s);
    }
    assert!("nope".parse::<Suite>().is_err());
}
