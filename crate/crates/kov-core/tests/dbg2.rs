use kov_core::classify::*;
use kov_core::param::ParamTable;

#[test]
fn both_k1_type1_obstructions() {
    let table = ParamTable::new();
    let rep = verify_resonance_conditions(ResonanceConstraint::BothKOne, &table).unwrap();
    for (t, s) in &rep.per_type {
        eprintln!("== type {t}");
        for (k, polys) in &s.obstructions {
            for p in polys {
                eprintln!("  k={k}: {}", p.render(&table));
            }
        }
    }
}
