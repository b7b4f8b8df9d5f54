//! The two-field quadratic matrix ODE system and its residue catalog.
//!
//! A system is
//!
//! ```text
//! u' = -u^2 + 2uv + alpha (uv - vu) - 2zu + b1 u + u b2 + b3 v + v b4 + b5
//! v' = -v^2 + 2vu + beta  (vu - uv) + 2zv + c1 v + v c2 + c3 u + u c4 + c5
//! ```
//!
//! with scalar `alpha`, `beta` and constant matrix coefficients; the
//! homogeneous variant keeps only the quadratic terms. Laurent solutions with
//! a simple pole have residues `(p, q)` solving
//!
//! ```text
//! -p^2 + 2pq + alpha [p,q] + p = 0,      -q^2 + 2qp + beta [q,p] + q = 0.
//! ```
//!
//! Commuting solutions are simultaneously diagonalizable and reduce to the
//! canonical partition form produced by [`diag_residues`]. Non-commuting ones
//! exist only at the twelve distinguished integer points of the parameter
//! plane and reduce to the block form produced by [`noncommuting_residues`],
//! driven by an embedded `(X, Y)` table.

use crate::linalg::QMatrix;
use crate::matrix::MatPoly;
use crate::poly::{rat_frac, rat_i, Rat};
use crate::{KovError, Result};
use num_traits::Zero;
use std::collections::BTreeSet;

/// Exact system data. Coefficient matrices may contain symbolic parameters.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub n: usize,
    pub alpha: Rat,
    pub beta: Rat,
    pub b: [MatPoly; 5],
    pub c: [MatPoly; 5],
    /// When set, the system is the principal homogeneous part: the `z` terms
    /// and all matrix coefficients are dropped.
    pub homogeneous: bool,
}

impl SystemSpec {
    pub fn homogeneous(n: usize, alpha: Rat, beta: Rat) -> Self {
        SystemSpec {
            n,
            alpha,
            beta,
            b: std::array::from_fn(|_| MatPoly::zero(n, n)),
            c: std::array::from_fn(|_| MatPoly::zero(n, n)),
            homogeneous: true,
        }
    }

    pub fn with_coeffs(
        n: usize,
        alpha: Rat,
        beta: Rat,
        b: [MatPoly; 5],
        c: [MatPoly; 5],
    ) -> Result<Self> {
        for m in b.iter().chain(c.iter()) {
            m.require_square(n)?;
        }
        Ok(SystemSpec {
            n,
            alpha,
            beta,
            b,
            c,
            homogeneous: false,
        })
    }

    pub fn alpha_beta_i64(&self) -> Option<(i64, i64)> {
        let to_int = |r: &Rat| {
            if r.is_integer() {
                r.numer().try_into().ok()
            } else {
                None
            }
        };
        Some((to_int(&self.alpha)?, to_int(&self.beta)?))
    }
}

/// Shape of a canonical residue pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResidueShape {
    /// `p = diag(-I_{k1}, I_{k2}, 0_{k3}, 0_{k4})`,
    /// `q = diag(-I_{k1}, 0_{k2}, I_{k3}, 0_{k4})`.
    Commuting { k: [usize; 4] },
    /// Two extra `m x m` blocks carrying the nilpotent commutator, then the
    /// commuting partition on the rest.
    NonCommuting { m: usize, k: [usize; 4] },
}

impl ResidueShape {
    pub fn commuting(k1: usize, k2: usize, k3: usize, k4: usize) -> Self {
        ResidueShape::Commuting { k: [k1, k2, k3, k4] }
    }

    /// The three maximal-candidate shapes: one of `k1`, `k2`, `k3` is 1 and
    /// the rest of the matrix sits in the zero block.
    pub fn of_type(t: u8, n: usize) -> Self {
        let mut k = [0usize; 4];
        k[(t - 1) as usize] = 1;
        k[3] = n - 1;
        ResidueShape::Commuting { k }
    }

    pub fn size(&self) -> usize {
        match self {
            ResidueShape::Commuting { k } => k.iter().sum(),
            ResidueShape::NonCommuting { m, k } => 2 * m + k.iter().sum::<usize>(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match self {
            ResidueShape::Commuting { .. } => self.size() == n,
            ResidueShape::NonCommuting { m, .. } => *m >= 1 && self.size() == n,
        };
        if ok {
            Ok(())
        } else {
            let ks = match self {
                ResidueShape::Commuting { k } => k.to_vec(),
                ResidueShape::NonCommuting { m, k } => {
                    let mut v = vec![*m];
                    v.extend_from_slice(k);
                    v
                }
            };
            Err(KovError::BadPartition(ks))
        }
    }
}

/// A residue pair together with its shape and optional type tag (1..3).
#[derive(Debug, Clone)]
pub struct ResiduePair {
    pub p: QMatrix,
    pub q: QMatrix,
    pub shape: ResidueShape,
    pub type_tag: Option<u8>,
}

/// `Delta = alpha^2 + beta^2 + alpha beta + 3 (alpha + beta + 1)`.
pub fn delta(alpha: &Rat, beta: &Rat) -> Rat {
    alpha * alpha + beta * beta + alpha * beta + (alpha + beta + rat_i(1)) * rat_i(3)
}

/// The four scalars with `p[p,q] = mu1 [p,q]`, `[p,q]p = mu2 [p,q]`,
/// `q[p,q] = mu3 [p,q]`, `[p,q]q = mu4 [p,q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuValues {
    pub mu: [Rat; 4],
    pub delta: Rat,
}

pub fn mu_values(alpha: &Rat, beta: &Rat) -> Result<MuValues> {
    let d = delta(alpha, beta);
    if d.is_zero() {
        return Err(KovError::DeltaZero);
    }
    let two_d = &d * rat_i(2);
    let s_ab = rat_i(3) + alpha + beta + beta; // 3 + alpha + 2 beta
    let s_ba = rat_i(3) + beta + alpha + alpha; // 3 + beta + 2 alpha
    let mu1 = -(alpha * &s_ab) / &two_d;
    let mu2 = -((alpha + rat_i(2)) * &s_ab) / &two_d;
    let mu3 = -(beta * &s_ba) / &two_d;
    let mu4 = -((beta + rat_i(2)) * &s_ba) / &two_d;
    Ok(MuValues {
        mu: [mu1, mu2, mu3, mu4],
        delta: d,
    })
}

/// The four consistency equations a non-commuting residue pair forces on the
/// mu-values; they hold exactly on the twelve distinguished points.
pub fn noncommuting_exists(alpha: &Rat, beta: &Rat) -> bool {
    let Ok(MuValues { mu, .. }) = mu_values(alpha, beta) else {
        return false;
    };
    let [m1, m2, m3, m4] = mu;
    let eq = |a: &Rat, b: &Rat| -> bool {
        // -a^2 + 2ab + a == 0
        (-(a * a) + a * b + a * b + a).is_zero()
    };
    eq(&m1, &m3) && eq(&m3, &m1) && eq(&m2, &m4) && eq(&m4, &m2)
}

/// Canonical diagonal residues for a commuting shape.
pub fn diag_residues(n: usize, shape: &ResidueShape) -> Result<ResiduePair> {
    let ResidueShape::Commuting { k } = shape else {
        return Err(KovError::BadPartition(vec![]));
    };
    shape.validate(n)?;
    let [k1, k2, k3, _k4] = *k;
    let mut p = QMatrix::zero(n, n);
    let mut q = QMatrix::zero(n, n);
    for i in 0..k1 {
        p.set(i, i, rat_i(-1));
        q.set(i, i, rat_i(-1));
    }
    for i in k1..k1 + k2 {
        p.set(i, i, rat_i(1));
    }
    for i in k1 + k2..k1 + k2 + k3 {
        q.set(i, i, rat_i(1));
    }
    let type_tag = match *k {
        [1, 0, 0, _] => Some(1),
        [0, 1, 0, _] => Some(2),
        [0, 0, 1, _] => Some(3),
        _ => None,
    };
    Ok(ResiduePair {
        p,
        q,
        shape: shape.clone(),
        type_tag,
    })
}

/// The `(X, Y)` normalization table for the twelve points admitting
/// non-commuting residues: `p12 = X I_m`, `q12 = Y I_m`.
const XY_TABLE: [((i64, i64), (i64, i64)); 12] = [
    ((1, -2), (-1, 0)),
    ((0, 0), (-1, 0)),
    ((0, -1), (0, 1)),
    ((0, -2), (-1, 0)),
    ((0, -3), (0, -1)),
    ((-1, 0), (-1, 0)),
    ((-1, -2), (1, 0)),
    ((-2, 1), (0, 1)),
    ((-2, 0), (1, 0)),
    ((-2, -1), (0, -1)),
    ((-2, -2), (1, 0)),
    ((-3, 0), (1, 0)),
];

pub fn xy_table_points() -> Vec<(i64, i64)> {
    XY_TABLE.iter().map(|(p, _)| *p).collect()
}

/// Canonical non-commuting residues in block form: diagonal blocks
/// `(mu1 I_m, mu2 I_m, -I_{k1}, I_{k2}, 0_{k3}, 0_{k4})` for `p` (and the
/// corresponding ones for `q`), with the single off-diagonal `(1,2)` block
/// from the `(X, Y)` table.
pub fn noncommuting_residues(alpha: &Rat, beta: &Rat, shape: &ResidueShape) -> Result<ResiduePair> {
    let ResidueShape::NonCommuting { m, k } = shape else {
        return Err(KovError::BadPartition(vec![]));
    };
    let n = shape.size();
    shape.validate(n)?;
    if !noncommuting_exists(alpha, beta) {
        return Err(KovError::NotInSigma0(
            crate::poly::rat_str(alpha),
            crate::poly::rat_str(beta),
        ));
    }
    let (x, y) = XY_TABLE
        .iter()
        .find(|((ta, tb), _)| rat_i(*ta) == *alpha && rat_i(*tb) == *beta)
        .map(|(_, xy)| *xy)
        .ok_or_else(|| {
            KovError::NotInSigma0(crate::poly::rat_str(alpha), crate::poly::rat_str(beta))
        })?;
    let MuValues { mu, .. } = mu_values(alpha, beta)?;
    let m = *m;
    let [k1, k2, k3, _k4] = *k;
    let mut p = QMatrix::zero(n, n);
    let mut q = QMatrix::zero(n, n);
    for i in 0..m {
        p.set(i, i, mu[0].clone());
        q.set(i, i, mu[2].clone());
        p.set(m + i, m + i, mu[1].clone());
        q.set(m + i, m + i, mu[3].clone());
        p.set(i, m + i, rat_i(x));
        q.set(i, m + i, rat_i(y));
    }
    let base = 2 * m;
    for i in base..base + k1 {
        p.set(i, i, rat_i(-1));
        q.set(i, i, rat_i(-1));
    }
    for i in base + k1..base + k1 + k2 {
        p.set(i, i, rat_i(1));
    }
    for i in base + k1 + k2..base + k1 + k2 + k3 {
        q.set(i, i, rat_i(1));
    }
    Ok(ResiduePair {
        p,
        q,
        shape: shape.clone(),
        type_tag: None,
    })
}

/// Check both residue equations exactly.
pub fn check_residue_equations(pair: &ResiduePair, alpha: &Rat, beta: &Rat) -> bool {
    let p = &pair.p;
    let q = &pair.q;
    let pq = p.mul_ref(q);
    let qp = q.mul_ref(p);
    // -p^2 + 2pq + alpha (pq - qp) + p
    let eq1 = p
        .mul_ref(p)
        .neg_ref()
        .add_ref(&pq.scale(&rat_i(2)))
        .add_ref(&pq.sub_ref(&qp).scale(alpha))
        .add_ref(p);
    // -q^2 + 2qp + beta (qp - pq) + q
    let eq2 = q
        .mul_ref(q)
        .neg_ref()
        .add_ref(&qp.scale(&rat_i(2)))
        .add_ref(&qp.sub_ref(&pq).scale(beta))
        .add_ref(q);
    eq1.is_zero() && eq2.is_zero()
}

/// Closure of `(alpha, beta)` under the three parameter involutions
/// `(a,b) -> (b,a)`, `(a,b) -> (-a-2, -b-2)`, `(a,b) -> (a, -a-b-3)`.
pub fn dihedral_orbit(alpha: &Rat, beta: &Rat) -> BTreeSet<(Rat, Rat)> {
    let mut orbit: BTreeSet<(Rat, Rat)> = BTreeSet::new();
    let mut stack = vec![(alpha.clone(), beta.clone())];
    while let Some((a, b)) = stack.pop() {
        if !orbit.insert((a.clone(), b.clone())) {
            continue;
        }
        let images = [
            (b.clone(), a.clone()),
            (-&a - rat_i(2), -&b - rat_i(2)),
            (a.clone(), -&a - &b - rat_i(3)),
        ];
        for im in images {
            if !orbit.contains(&im) {
                stack.push(im);
            }
        }
    }
    orbit
}

/// Dimension of the conjugation orbit of `(p, q)`: the rank of
/// `S -> ([S,p], [S,q])` on `n x n` matrices.
pub fn orbit_dimension(pair: &ResiduePair) -> usize {
    let n = pair.p.rows();
    let mut map = QMatrix::zero(2 * n * n, n * n);
    for bi in 0..n {
        for bj in 0..n {
            let col = bi * n + bj;
            let mut s = QMatrix::zero(n, n);
            s.set(bi, bj, rat_i(1));
            let cp = s.commutator(&pair.p);
            let cq = s.commutator(&pair.q);
            for i in 0..n {
                for j in 0..n {
                    map.set(i * n + j, col, cp.get(i, j).clone());
                    map.set(n * n + i * n + j, col, cq.get(i, j).clone());
                }
            }
        }
    }
    crate::linalg::rank(&map)
}

/// Helper: rational point from integers.
pub fn pt(a: i64, b: i64) -> (Rat, Rat) {
    (rat_i(a), rat_i(b))
}

/// Helper for readable fractions in tests and defaults.
pub fn fr(n: i64, d: i64) -> Rat {
    rat_frac(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        // independently evaluated from the defining quadratic
        let cases = [((-1, -1), 0), ((0, 0), 3), ((0, -3), 3), ((0, -2), 1)];
        for ((a, b), want) in cases {
            let (a, b) = pt(a, b);
            assert_eq!(delta(&a, &b), rat_i(want), "Delta({a}, {b})");
        }
    }

    #[test]
    fn mu_values_at_landmarks() {
        let (a, b) = pt(0, -3);
        let mv = mu_values(&a, &b).unwrap();
        assert_eq!(mv.mu, [rat_i(0), rat_i(1), rat_i(0), rat_i(0)]);

        let (a, b) = pt(0, 0);
        let mv = mu_values(&a, &b).unwrap();
        assert_eq!(mv.mu, [rat_i(0), rat_i(-1), rat_i(0), rat_i(-1)]);

        let (a, b) = pt(-1, -1);
        assert!(matches!(mu_values(&a, &b), Err(KovError::DeltaZero)));
    }

    #[test]
    fn sigma0_membership_matches_table() {
        // dual route: the mu-equations against the embedded (X, Y) table keys
        let table: BTreeSet<(i64, i64)> = xy_table_points().into_iter().collect();
        for a in -10..=10i64 {
            for b in -10..=10i64 {
                let (ar, br) = pt(a, b);
                assert_eq!(
                    noncommuting_exists(&ar, &br),
                    table.contains(&(a, b)),
                    "mismatch at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn diag_residue_examples() {
        let p1 = diag_residues(1, &ResidueShape::of_type(1, 1)).unwrap();
        assert_eq!(p1.p, QMatrix::from_i64_rows(&[vec![-1]]));
        assert_eq!(p1.q, QMatrix::from_i64_rows(&[vec![-1]]));
        assert_eq!(p1.type_tag, Some(1));

        let p2 = diag_residues(2, &ResidueShape::of_type(2, 2)).unwrap();
        assert_eq!(p2.p, QMatrix::from_i64_rows(&[vec![1, 0], vec![0, 0]]));
        assert_eq!(p2.q, QMatrix::zero(2, 2));

        let p4 = diag_residues(4, &ResidueShape::commuting(1, 1, 1, 1)).unwrap();
        assert_eq!(
            p4.p,
            QMatrix::from_i64_rows(&[
                vec![-1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 0]
            ])
        );
        assert_eq!(
            p4.q,
            QMatrix::from_i64_rows(&[
                vec![-1, 0, 0, 0],
                vec![0, 0, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 0]
            ])
        );

        assert!(diag_residues(3, &ResidueShape::commuting(1, 1, 1, 1)).is_err());
    }

    #[test]
    fn all_diag_residues_satisfy_equations() {
        // any commuting canonical pair solves the residue equations for any
        // (alpha, beta) since the commutator vanishes
        let (a, b) = (fr(5, 3), fr(-7, 2));
        for part in [[1, 1, 1, 1], [2, 0, 1, 0], [0, 3, 0, 1], [1, 0, 0, 2]] {
            let n: usize = part.iter().sum();
            let shape = ResidueShape::Commuting { k: part };
            let pair = diag_residues(n, &shape).unwrap();
            assert!(check_residue_equations(&pair, &a, &b));
            // cubes: p^3 = p, q^3 = q
            let p3 = pair.p.mul_ref(&pair.p).mul_ref(&pair.p);
            assert_eq!(p3, pair.p);
            let q3 = pair.q.mul_ref(&pair.q).mul_ref(&pair.q);
            assert_eq!(q3, pair.q);
        }
    }

    #[test]
    fn noncommuting_examples() {
        let (a, b) = pt(0, -3);
        let shape = ResidueShape::NonCommuting { m: 1, k: [0; 4] };
        let pair = noncommuting_residues(&a, &b, &shape).unwrap();
        assert_eq!(pair.p, QMatrix::from_i64_rows(&[vec![0, 0], vec![0, 1]]));
        assert_eq!(pair.q, QMatrix::from_i64_rows(&[vec![0, -1], vec![0, 0]]));
        assert!(check_residue_equations(&pair, &a, &b));

        let (a, b) = pt(-1, -2);
        let pair = noncommuting_residues(&a, &b, &shape).unwrap();
        assert_eq!(pair.p, QMatrix::from_i64_rows(&[vec![-1, 1], vec![0, 1]]));
        assert_eq!(pair.q, QMatrix::from_i64_rows(&[vec![-1, 0], vec![0, 0]]));
        assert!(check_residue_equations(&pair, &a, &b));

        let (a, b) = pt(-1, -1);
        assert!(noncommuting_residues(&a, &b, &shape).is_err());
    }

    #[test]
    fn noncommuting_catalog_satisfies_equations_and_nilpotency() {
        for (pnt, _) in XY_TABLE {
            let (a, b) = pt(pnt.0, pnt.1);
            for shape in [
                ResidueShape::NonCommuting { m: 1, k: [0; 4] },
                ResidueShape::NonCommuting { m: 1, k: [0, 0, 0, 2] },
                ResidueShape::NonCommuting { m: 1, k: [1, 1, 0, 0] },
                ResidueShape::NonCommuting { m: 2, k: [0, 0, 1, 0] },
            ] {
                let n = shape.size();
                let pair = noncommuting_residues(&a, &b, &shape).unwrap();
                assert!(
                    check_residue_equations(&pair, &a, &b),
                    "residue equations fail at {pnt:?} shape {shape:?}"
                );
                let comm = pair.p.commutator(&pair.q);
                assert!(!comm.is_zero(), "commutator must not vanish at {pnt:?}");
                assert!(comm.mul_ref(&comm).is_zero(), "[p,q]^2 != 0 at {pnt:?}");
                // the four scalar relations p[p,q] = mu1 [p,q], ...
                let MuValues { mu, .. } = mu_values(&a, &b).unwrap();
                assert_eq!(pair.p.mul_ref(&comm), comm.scale(&mu[0]));
                assert_eq!(comm.mul_ref(&pair.p), comm.scale(&mu[1]));
                assert_eq!(pair.q.mul_ref(&comm), comm.scale(&mu[2]));
                assert_eq!(comm.mul_ref(&pair.q), comm.scale(&mu[3]));
                assert_eq!(n, pair.p.rows());
            }
        }
    }

    #[test]
    fn perturbed_pair_fails_equations() {
        let (a, b) = pt(0, 0);
        let pair = ResiduePair {
            p: QMatrix::from_i64_rows(&[vec![2, 0], vec![0, 2]]),
            q: QMatrix::zero(2, 2),
            shape: ResidueShape::commuting(0, 2, 0, 0),
            type_tag: None,
        };
        assert!(!check_residue_equations(&pair, &a, &b));
        // the zero pair is a trivial solution
        let zero = ResiduePair {
            p: QMatrix::zero(2, 2),
            q: QMatrix::zero(2, 2),
            shape: ResidueShape::commuting(0, 0, 0, 2),
            type_tag: None,
        };
        assert!(check_residue_equations(&zero, &a, &b));
    }

    #[test]
    fn dihedral_orbits() {
        let (a, b) = pt(-1, -1);
        assert_eq!(dihedral_orbit(&a, &b).len(), 1);

        let (a, b) = pt(0, -3);
        let orbit = dihedral_orbit(&a, &b);
        assert_eq!(orbit.len(), 6);
        assert!(orbit.contains(&pt(0, 0)));
        let expected: BTreeSet<(Rat, Rat)> = [(0, -3), (-3, 0), (1, -2), (0, 0), (-2, -2), (-2, 1)]
            .into_iter()
            .map(|(x, y)| pt(x, y))
            .collect();
        assert_eq!(orbit, expected);

        let (a, b) = pt(1, -2);
        assert_eq!(dihedral_orbit(&a, &b).len(), 6);
    }

    #[test]
    fn dihedral_generators_are_involutions() {
        let probes = [pt(2, 5), pt(-4, 1), (fr(1, 2), fr(-3, 4))];
        for (a, b) in probes {
            let g1 = |x: &Rat, y: &Rat| (y.clone(), x.clone());
            let g2 = |x: &Rat, y: &Rat| (-x - rat_i(2), -y - rat_i(2));
            let g3 = |x: &Rat, y: &Rat| (x.clone(), -x - y - rat_i(3));
            for g in [&g1 as &dyn Fn(&Rat, &Rat) -> (Rat, Rat), &g2, &g3] {
                let (x1, y1) = g(&a, &b);
                let (x2, y2) = g(&x1, &y1);
                assert_eq!((x2, y2), (a.clone(), b.clone()));
            }
            assert!(dihedral_orbit(&a, &b).len() <= 12);
        }
    }

    #[test]
    fn orbit_dimension_formulas() {
        // diagonal shapes: n^2 - sum k_i^2
        for part in [[1usize, 0, 0, 1], [1, 1, 1, 1], [2, 1, 0, 1]] {
            let n: usize = part.iter().sum();
            let pair = diag_residues(n, &ResidueShape::Commuting { k: part }).unwrap();
            let expected = n * n - part.iter().map(|k| k * k).sum::<usize>();
            assert_eq!(orbit_dimension(&pair), expected);
        }
        // types 1..3: 2n - 2
        for t in 1..=3u8 {
            for n in 1..=4usize {
                let pair = diag_residues(n, &ResidueShape::of_type(t, n)).unwrap();
                assert_eq!(orbit_dimension(&pair), 2 * n - 2);
            }
        }
        // non-commuting m = 1, k4 = n - 2 at (0, -3): 3n - 3
        let (a, b) = pt(0, -3);
        for n in 2..=4usize {
            let shape = ResidueShape::NonCommuting { m: 1, k: [0, 0, 0, n - 2] };
            let pair = noncommuting_residues(&a, &b, &shape).unwrap();
            assert_eq!(orbit_dimension(&pair), 3 * n - 3);
        }
    }
}
