use kov_core::engine::*;
use kov_core::matrix::MatPoly;
use kov_core::model::*;
use kov_core::param::ParamTable;
use kov_core::poly::{rat_i, PolyQ};

// build the (-1,-1) system with c1 = -b2 + g1 I, c2 = -b1 + g2 I and all
// other tails zero; test the type-1 order-1 obstruction for
// [b1, b2] = sign * (g1+g2)/2 * (b1+b2)
fn run(sign: i64) -> bool {
    let table = ParamTable::new();
    let n = 2;
    // s = b1 + b2 = E21, [b1, s] = (d2-d1) E21 = sign * E21 (need (g1+g2)/2 = 1)
    let (g1, g2) = (rat_i(2), rat_i(0));
    let b1 = MatPoly::from_rat_rows(&[vec![0, 0], vec![0, sign]]);
    let s = MatPoly::from_rat_rows(&[vec![0, 0], vec![1, 0]]);
    let b2 = s.sub_ref(&b1);
    let zero = MatPoly::zero(n, n);
    let c1 = b2.neg_ref().add_ref(&MatPoly::scalar(n, PolyQ::constant(g1.clone())));
    let c2 = b1.neg_ref().add_ref(&MatPoly::scalar(n, PolyQ::constant(g2.clone())));
    let sys = SystemSpec::with_coeffs(
        n, rat_i(-1), rat_i(-1),
        [b1, b2, zero.clone(), zero.clone(), zero.clone()],
        [c1, c2, zero.clone(), zero.clone(), zero.clone()],
    ).unwrap();
    let pair = diag_residues(n, &ResidueShape::of_type(1, n)).unwrap();
    let series = expand_series(&sys, &pair, Some(1), &table).unwrap();
    let k1_clear = series.obstructions.iter().all(|(k, _)| *k != 1);
    eprintln!("sign {sign}: obstructions {:?}", series.obstructions.iter().map(|(k, v)| (*k, v.len())).collect::<Vec<_>>());
    k1_clear
}

#[test]
fn commutator_sign_experiment() {
    let plus = run(1);
    let minus = run(-1);
    eprintln!("plus-version k1-clear: {plus}, minus-version k1-clear: {minus}");
    assert!(plus != minus, "exactly one version should clear the order-1 conditions");
}
