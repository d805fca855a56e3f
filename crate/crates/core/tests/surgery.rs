mod common;

use rand::Rng;
use rfm_core::surgery::derive_null_homotopy;
use rfm_core::{
    build_reeb, combine, decompose, euler_characteristic, from_bundle, isomorphic, Error, FoldEvent, ManifoldExpr,
    Twist,
};

#[test]
fn combine_adds_the_second_tree_at_the_site() {
    let f1 = from_bundle(&common::s(4), 3, Twist::label("a"), None).unwrap();
    let f2 = from_bundle(&common::s(4), 3, Twist::label("b"), None).unwrap();
    let site = f1.core().unwrap().ids().next().unwrap().clone();
    let c = combine(&f1, &site, &f2, false).unwrap();
    assert_eq!(c.descriptor.l(), f1.l() + f2.l() - 1);
    let h = build_reeb(&c.descriptor).unwrap().homology().unwrap();
    assert_eq!(h.rank(3), 2);
    assert_eq!(
        euler_characteristic(&c.descriptor).unwrap(),
        euler_characteristic(&f1).unwrap() + euler_characteristic(&f2).unwrap() - rfm_core::expr::sphere_euler(f1.m)
    );
}

#[test]
fn decompose_inverts_combine() {
    let mut rng = common::rng(11);
    for _ in 0..40 {
        let (m, n) = common::dims(&mut rng);
        let (l1, l2) = (rng.random_range(1..5), rng.random_range(1..5));
        let f1 = common::sphere_tree(&mut rng, m, n, l1);
        let f2 = common::sphere_tree(&mut rng, m, n, l2);
        let sites: Vec<_> = f1.core().unwrap().ids().cloned().collect();
        let site = &sites[rng.random_range(0..sites.len())];
        let c = combine(&f1, site, &f2, false).unwrap();
        let region = f1.l();
        let d = decompose(&c.descriptor, region, site, false).unwrap();
        assert!(isomorphic(&d.outer, &f1), "outer differs at {site}");
        assert!(isomorphic(&d.inner, &f2), "inner differs at {site}");
    }
}

#[test]
fn combine_rejects_bad_sites() {
    let f = common::sphere_tree(&mut common::rng(1), 7, 3, 2);
    assert!(matches!(combine(&f, "nope", &f, false), Err(Error::Site(_))));
    let g = common::sphere_tree(&mut common::rng(1), 8, 3, 2);
    assert!(matches!(combine(&f, "c2", &g, false), Err(Error::Argument(_))));
}

#[test]
fn low_codimension_is_refused() {
    let f = common::sphere_tree(&mut common::rng(2), 5, 3, 2);
    assert!(matches!(combine(&f, "c2", &f, false), Err(Error::Hypothesis(_))));
}

#[test]
fn null_homotopy_needs_a_witness_or_an_assumption() {
    let torus = ManifoldExpr::product(vec![common::s(1), common::s(4)]);
    let f = from_bundle(&common::s(5), 3, Twist::Trivial, None).unwrap();
    assert!(derive_null_homotopy(&f).is_some());
    let mut g = f.clone();
    if let FoldEvent::Birth { fiber, .. } = &mut g.events[0] {
        *fiber = torus;
    }
    let site = f.core().unwrap().ids().next().unwrap().clone();
    assert!(combine(&f, &site, &g, false).is_err());
}

#[test]
fn isomorphism_ignores_component_names() {
    let f = common::sphere_tree(&mut common::rng(5), 9, 3, 4);
    let renamed = f.events.iter().map(|e| e.rename(&mut |id| format!("z_{id}"))).collect();
    let g = rfm_core::RoundFoldDescriptor { events: renamed, ..f.clone() };
    assert!(isomorphic(&f, &g));
    let h = common::sphere_tree(&mut common::rng(6), 9, 3, 3);
    assert!(!isomorphic(&f, &h));
}
