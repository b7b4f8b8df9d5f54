// temporary smoke checks; superseded by the acceptance suite
use kov_core::classify::*;
use kov_core::param::ParamTable;
use kov_core::poly::rat_i;

#[test]
fn families_verify() {
    for (id, seed) in [(FamilyId::P4_0, 11), (FamilyId::P4_1, 12), (FamilyId::P4_2, 13)] {
        let fam = DeformationFamily::default_instance(id, 2, seed);
        let table = ParamTable::new();
        let v = verify_deformation(&fam, &table).unwrap();
        for o in &v.outcomes {
            eprintln!(
                "{:?} {}: maximal={} params={} orbit={} obstructed={}",
                id,
                o.label,
                o.verdict.maximal,
                o.verdict.param_count_in_coeffs,
                o.verdict.orbit_dim,
                !o.verdict.obstruction_free
            );
        }
        assert!(v.passed, "{id:?} failed");
    }
}

#[test]
fn degenerations_match() {
    for (id, n) in [(FamilyId::P4_0, 2), (FamilyId::P4_1, 2), (FamilyId::P4_2, 2), (FamilyId::P4_0, 3)] {
        let table = ParamTable::new();
        let out = degenerate_to_p2(id, n, &table).unwrap();
        eprintln!("{:?} -> {:?}: matched={} constraint={}", id, out.target, out.matched, out.constraint_holds);
        assert!(out.matched && out.constraint_holds, "{id:?} at n={n}");
    }
    let table = ParamTable::new();
    assert!(scalar_degeneration(&table).unwrap());
}

#[test]
fn reductions_hold() {
    for (id, seed) in [(FamilyId::P4_1, 21), (FamilyId::P4_2, 22)] {
        let fam = DeformationFamily::default_instance(id, 2, seed);
        let sys = fam.system().unwrap();
        assert!(reduce_second_order_check(&sys, 20, 99).unwrap(), "{id:?}");
    }
}

#[test]
fn resonance_conditions_full_solution() {
    let table = ParamTable::new();
    let rep = verify_resonance_conditions(ResonanceConstraint::FullySolved { violate: false }, &table).unwrap();
    for (t, s) in &rep.per_type {
        eprintln!("type {t}: obstructions at {:?}", s.obstructions.iter().map(|(k, v)| (k, v.len())).collect::<Vec<_>>());
    }
    assert!(rep.all_vanish);

    let table = ParamTable::new();
    let rep = verify_resonance_conditions(ResonanceConstraint::FullySolved { violate: true }, &table).unwrap();
    assert!(!rep.all_vanish, "violated constraints must leave an obstruction");

    let table = ParamTable::new();
    let rep = verify_resonance_conditions(ResonanceConstraint::TypeTwoSolved, &table).unwrap();
    let t2 = &rep.per_type[1];
    let k1_obs: Vec<_> = t2.1.obstructions.iter().filter(|(k, _)| *k <= 1).collect();
    assert!(k1_obs.is_empty(), "type-2 order-1 conditions must be solved: {k1_obs:?}");
}

#[test]
fn scan_small_box() {
    let results = scan_sigma((-2, 0), (-3, 0), 2).unwrap();
    for r in &results {
        eprintln!("{:?}: types={:?} nc={} total={}", r.point, r.maximal_types, r.noncommuting_maximal, r.total_maximal);
    }
    let hits: Vec<_> = results.iter().filter(|r| r.total_maximal == 3).collect();
    // inside [-2,0] x [-3,0]: (-1,-1), (0,0), (0,-1), (0,-2), (0,-3), (-1,0), (-1,-2), (-2,0), (-2,-1), (-2,-2)
    assert_eq!(hits.len(), 10);
}
