use kov_core::classify::*;
use kov_core::param::ParamTable;
use kov_core::poly::PolyQ;

#[test]
fn k2_diff() {
    let table = ParamTable::new();
    let rep = verify_resonance_conditions(ResonanceConstraint::BothKOne, &table).unwrap();
    for (idx, label) in [(1usize, "type2"), (2, "type3")] {
        let s = &rep.per_type[idx].1;
        let got: Vec<PolyQ> = s
            .obstructions
            .iter()
            .filter(|(k, _)| *k == 2)
            .flat_map(|(_, v)| v.clone())
            .collect();
        eprintln!("== {label} k=2 obstruction ({}):", got.len());
        for p in &got {
            eprintln!("  {}", p.render(&table));
        }
    }
}
