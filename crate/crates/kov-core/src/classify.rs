//! Plane classification, deformation families, second-order reduction and
//! degenerations to second-Painlevé-type matrix systems.

use crate::engine::{
    expand_series, maximality, possible_total, MaximalityVerdict, SeriesSolution,
};
use crate::jets::JetSampler;
use crate::linalg::QMatrix;
use crate::matrix::MatPoly;
use crate::model::{
    diag_residues, noncommuting_exists, noncommuting_residues, ResiduePair, ResidueShape,
    SystemSpec,
};
use crate::param::{ParamId, ParamTable};
use crate::poly::{rat_frac, rat_i, PolyQ, Rat};
use crate::{KovError, Result, EPS_ID};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeSet;

// ---- Plane classification ----

/// Classification verdict at one parameter point.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub point: (Rat, Rat),
    /// Types in 1..=3 whose commuting-residue series is maximal.
    pub maximal_types: Vec<u8>,
    /// Whether some `m = 1` non-commuting residue shape yields a maximal series.
    pub noncommuting_maximal: bool,
    pub total_maximal: usize,
}

/// All `m = 1` shapes at size `n` (partitions of `n - 2` over the four
/// commuting blocks).
fn m1_shapes(n: usize) -> Vec<ResidueShape> {
    let rest = n - 2;
    let mut shapes = Vec::new();
    for k1 in 0..=rest {
        for k2 in 0..=rest - k1 {
            for k3 in 0..=rest - k1 - k2 {
                let k4 = rest - k1 - k2 - k3;
                shapes.push(ResidueShape::NonCommuting {
                    m: 1,
                    k: [k1, k2, k3, k4],
                });
            }
        }
    }
    shapes
}

fn series_is_maximal(sys: &SystemSpec, pair: &ResiduePair) -> Result<bool> {
    // rank-level filter first: the expansion cannot beat the kernel count
    if possible_total(pair, &sys.alpha, &sys.beta) != 2 * sys.n * sys.n {
        return Ok(false);
    }
    let table = ParamTable::new();
    let series = expand_series(sys, pair, None, &table)?;
    Ok(maximality(&series).maximal)
}

/// Classify one point of the parameter plane for the homogeneous system.
pub fn classify_point(alpha: &Rat, beta: &Rat, n: usize) -> Result<ClassificationResult> {
    let sys = SystemSpec::homogeneous(n, alpha.clone(), beta.clone());
    let mut maximal_types = Vec::new();
    for t in 1..=3u8 {
        let pair = diag_residues(n, &ResidueShape::of_type(t, n))?;
        if series_is_maximal(&sys, &pair)? {
            maximal_types.push(t);
        }
    }
    let mut noncommuting_maximal = false;
    if n >= 2 && noncommuting_exists(alpha, beta) {
        for shape in m1_shapes(n) {
            let pair = noncommuting_residues(alpha, beta, &shape)?;
            if series_is_maximal(&sys, &pair)? {
                noncommuting_maximal = true;
                break;
            }
        }
    }
    let total_maximal = maximal_types.len() + usize::from(noncommuting_maximal);
    Ok(ClassificationResult {
        point: (alpha.clone(), beta.clone()),
        maximal_types,
        noncommuting_maximal,
        total_maximal,
    })
}

/// Scan an integer box of the parameter plane; results ordered by point.
pub fn scan_sigma(
    a_range: (i64, i64),
    b_range: (i64, i64),
    n: usize,
) -> Result<Vec<ClassificationResult>> {
    let mut points = Vec::new();
    for a in a_range.0..=a_range.1 {
        for b in b_range.0..=b_range.1 {
            points.push((a, b));
        }
    }
    points
        .par_iter()
        .map(|(a, b)| classify_point(&rat_i(*a), &rat_i(*b), n))
        .collect()
}

/// The thirteen distinguished integer points: the fixed point `(-1,-1)`
/// plus the twelve points carrying non-commuting residues.
pub fn sigma_points() -> BTreeSet<(i64, i64)> {
    let mut s: BTreeSet<(i64, i64)> = crate::model::xy_table_points().into_iter().collect();
    s.insert((-1, -1));
    s
}

// ---- Deformation families ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[allow(non_camel_case_types)]
pub enum FamilyId {
    P4_0,
    P4_1,
    P4_2,
}

impl FamilyId {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyId::P4_0 => "P4_0",
            FamilyId::P4_1 => "P4_1",
            FamilyId::P4_2 => "P4_2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "P4_0" | "p4_0" | "P4-0" | "P40" => Ok(FamilyId::P4_0),
            "P4_1" | "p4_1" | "P4-1" | "P41" => Ok(FamilyId::P4_1),
            "P4_2" | "p4_2" | "P4-2" | "P42" => Ok(FamilyId::P4_2),
            _ => Err(KovError::BadConfig(format!("unknown family `{s}`"))),
        }
    }

    pub fn underlying_point(&self) -> (Rat, Rat) {
        match self {
            FamilyId::P4_0 => (rat_i(-1), rat_i(-1)),
            FamilyId::P4_1 => (rat_i(0), rat_i(-2)),
            FamilyId::P4_2 => (rat_i(0), rat_i(-3)),
        }
    }
}

/// An instantiated deformation family.
///
/// The canonical systems are
///
/// ```text
/// P4_0 (alpha = beta = -1):  u' = -u^2 + uv + vu - 2zu + h u + gamma1 I
///                            v' = -v^2 + vu + uv + 2zv - v h + gamma2 I
/// P4_1 (alpha = 0, beta = -2): u' = -u^2 + 2uv - 2zu + h
///                              v' = -v^2 + 2uv + 2zv + h + gamma I
/// P4_2 (alpha = 0, beta = -3): u' = -u^2 + 2uv - 2zu + h2
///                              v' = -v^2 + 3uv - vu + 2zv + h1 u + 2 h2 + gamma I
/// ```
///
/// with `[h2, h1] = -2 h1` required in the last case.
#[derive(Debug, Clone)]
pub enum DeformationFamily {
    P40 {
        n: usize,
        h: MatPoly,
        gamma1: PolyQ,
        gamma2: PolyQ,
    },
    P41 {
        n: usize,
        h: MatPoly,
        gamma: PolyQ,
    },
    P42 {
        n: usize,
        h1: MatPoly,
        h2: MatPoly,
        gamma: PolyQ,
    },
}

impl DeformationFamily {
    pub fn id(&self) -> FamilyId {
        match self {
            DeformationFamily::P40 { .. } => FamilyId::P4_0,
            DeformationFamily::P41 { .. } => FamilyId::P4_1,
            DeformationFamily::P42 { .. } => FamilyId::P4_2,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DeformationFamily::P40 { n, .. }
            | DeformationFamily::P41 { n, .. }
            | DeformationFamily::P42 { n, .. } => *n,
        }
    }

    /// Shipped default instantiation: random rational matrices where the
    /// family allows arbitrary ones; `h2 = diag(1,-1,0,..)`, `h1 = E21`
    /// where the commutation constraint must hold.
    pub fn default_instance(id: FamilyId, n: usize, seed: u64) -> Self {
        let mut s = JetSampler::new(seed);
        match id {
            FamilyId::P4_0 => DeformationFamily::P40 {
                n,
                h: s.matrix(n).to_matpoly(),
                gamma1: PolyQ::constant(s.rat()),
                gamma2: PolyQ::constant(s.rat()),
            },
            FamilyId::P4_1 => DeformationFamily::P41 {
                n,
                h: s.matrix(n).to_matpoly(),
                gamma: PolyQ::constant(s.rat()),
            },
            FamilyId::P4_2 => DeformationFamily::P42 {
                n,
                h1: e_matrix(n, 1, 0),
                h2: ladder_diag(n),
                gamma: PolyQ::constant(s.rat()),
            },
        }
    }

    /// Check the family's commutation constraints exactly.
    pub fn validate(&self) -> Result<()> {
        if let DeformationFamily::P42 { h1, h2, .. } = self {
            let want = h1.scale_rat(&rat_i(-2));
            if h2.commutator(h1) != want {
                return Err(KovError::ConstraintViolated("[h2, h1] != -2 h1".into()));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<SystemSpec> {
        let n = self.n();
        let zero = MatPoly::zero(n, n);
        match self {
            DeformationFamily::P40 {
                h, gamma1, gamma2, ..
            } => SystemSpec::with_coeffs(
                n,
                rat_i(-1),
                rat_i(-1),
                [
                    h.clone(),
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    MatPoly::scalar(n, gamma1.clone()),
                ],
                [
                    zero.clone(),
                    h.neg_ref(),
                    zero.clone(),
                    zero.clone(),
                    MatPoly::scalar(n, gamma2.clone()),
                ],
            ),
            DeformationFamily::P41 { h, gamma, .. } => SystemSpec::with_coeffs(
                n,
                rat_i(0),
                rat_i(-2),
                [
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    h.clone(),
                ],
                [
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    h.add_ref(&MatPoly::scalar(n, gamma.clone())),
                ],
            ),
            DeformationFamily::P42 { h1, h2, gamma, .. } => SystemSpec::with_coeffs(
                n,
                rat_i(0),
                rat_i(-3),
                [
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    zero.clone(),
                    h2.clone(),
                ],
                [
                    zero.clone(),
                    zero.clone(),
                    h1.clone(),
                    zero.clone(),
                    h2.scale_rat(&rat_i(2))
                        .add_ref(&MatPoly::scalar(n, gamma.clone())),
                ],
            ),
        }
    }

    /// Residue candidates whose maximality the family must preserve: every
    /// maximal solution of the underlying homogeneous point.
    pub fn candidates(&self) -> Result<Vec<(String, ResiduePair)>> {
        let n = self.n();
        let (a, b) = self.id().underlying_point();
        let mut out = Vec::new();
        let types: &[u8] = match self.id() {
            FamilyId::P4_0 | FamilyId::P4_1 => &[1, 2, 3],
            FamilyId::P4_2 => &[1, 3],
        };
        for &t in types {
            out.push((
                format!("type{t}"),
                diag_residues(n, &ResidueShape::of_type(t, n))?,
            ));
        }
        if self.id() == FamilyId::P4_2 {
            let shape = ResidueShape::NonCommuting {
                m: 1,
                k: [0, 0, 0, n - 2],
            };
            out.push((
                "noncommuting".into(),
                noncommuting_residues(&a, &b, &shape)?,
            ));
        }
        Ok(out)
    }
}

fn e_matrix(n: usize, i: usize, j: usize) -> MatPoly {
    let mut m = MatPoly::zero(n, n);
    m.set(i, j, PolyQ::one());
    m
}

/// `diag(1, -1, 0, ..., 0)`.
fn ladder_diag(n: usize) -> MatPoly {
    let mut m = MatPoly::zero(n, n);
    m.set(0, 0, PolyQ::one());
    m.set(1, 1, PolyQ::int(-1));
    m
}

/// Outcome of testing one residue candidate against a deformed system.
#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    pub label: String,
    pub verdict: MaximalityVerdict,
    pub obstructions: Vec<(usize, Vec<PolyQ>)>,
    pub free_params: Vec<String>,
    /// The series stays maximal when the residues are replaced by exact
    /// conjugates, so counting the full residue orbit is legitimate.
    pub orbit_spot_checks_ok: bool,
}

#[derive(Debug, Clone)]
pub struct FamilyVerification {
    pub id: FamilyId,
    pub n: usize,
    pub outcomes: Vec<CandidateOutcome>,
    pub passed: bool,
}

fn conjugated_pair(pair: &ResiduePair, s: &QMatrix) -> ResiduePair {
    let s_inv = s.inverse().expect("conjugator must be invertible");
    ResiduePair {
        p: s.mul_ref(&pair.p).mul_ref(&s_inv),
        q: s.mul_ref(&pair.q).mul_ref(&s_inv),
        shape: pair.shape.clone(),
        type_tag: pair.type_tag,
    }
}

/// Conjugators covering several directions of the residue orbit: two
/// unipotent moves and one dense rational matrix.
fn orbit_conjugators(n: usize) -> Vec<QMatrix> {
    let mut low = QMatrix::identity(n);
    let mut up = QMatrix::identity(n);
    for i in 1..n {
        low.set(i, i - 1, rat_i(1));
        up.set(i - 1, i, rat_i(-2));
    }
    // Hilbert-style dense invertible matrix
    let dense = QMatrix::from_fn(n, n, |i, j| rat_frac(1, (i + j + 1) as i64));
    vec![low, up, dense]
}

/// Expand every candidate against the system; a candidate passes when its
/// canonical series is maximal without obstructions and stays so at
/// conjugated residues (the deformation breaks conjugation equivariance, so
/// orbit parameters only count if the whole orbit extends).
pub fn verify_candidates(
    sys: &SystemSpec,
    candidates: &[(String, ResiduePair)],
    table: &ParamTable,
) -> Result<Vec<CandidateOutcome>> {
    let mut outcomes = Vec::new();
    for (label, pair) in candidates {
        let series = expand_series(sys, pair, None, table)?;
        let verdict = maximality(&series);
        let mut spot_ok = true;
        if verdict.maximal && !sys.homogeneous {
            for s in orbit_conjugators(sys.n) {
                let conj = conjugated_pair(pair, &s);
                let conj_series = expand_series(sys, &conj, None, table)?;
                if !maximality(&conj_series).maximal {
                    spot_ok = false;
                    break;
                }
            }
        }
        outcomes.push(CandidateOutcome {
            label: label.clone(),
            verdict,
            obstructions: series.obstructions.clone(),
            free_params: series.free_param_names(),
            orbit_spot_checks_ok: spot_ok,
        });
    }
    Ok(outcomes)
}

/// Run every candidate of the family through the expansion and require zero
/// obstructions and full maximality, also at conjugated residues.
pub fn verify_deformation(
    family: &DeformationFamily,
    table: &ParamTable,
) -> Result<FamilyVerification> {
    family.validate()?;
    let sys = family.system()?;
    let outcomes = verify_candidates(&sys, &family.candidates()?, table)?;
    let passed = outcomes
        .iter()
        .all(|o| o.verdict.maximal && o.orbit_spot_checks_ok);
    Ok(FamilyVerification {
        id: family.id(),
        n: family.n(),
        outcomes,
        passed,
    })
}

// ---- Parametric resonance conditions at (-1, -1), n = 2 ----

/// How much of the solved constraint set to impose on the coefficient
/// matrices before expanding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceConstraint {
    /// Every entry of every `b_i`, `c_i` is a fresh parameter.
    FreeAll,
    /// The `c`-side constraints solving the type-2 conditions at order 1.
    TypeTwoSolved,
    /// The `b`-side constraints solving the type-3 conditions at order 1.
    TypeThreeSolved,
    /// Both order-1 constraint sets together; `b1`, `b2` stay free.
    BothKOne,
    /// The full solution including the order-2 relations
    /// (`gamma2 = -gamma1`, `gamma4 = -2 gamma3`, `delta4 = -2 delta3`)
    /// and a commuting pair `b2 = s I + t b1`; `violate` offsets the two
    /// gamma relations by 1 as a negative control.
    FullySolved { violate: bool },
}

fn param_matrix(table: &ParamTable, prefix: &str, n: usize) -> MatPoly {
    MatPoly::from_fn(n, n, |i, j| {
        PolyQ::var(table.intern(&format!("{prefix}_{}{}", i + 1, j + 1)))
    })
}

/// Build the `n = 2` system at `(-1, -1)` with the requested constraint
/// level imposed on its ten coefficient matrices.
pub fn constrained_system(mode: ResonanceConstraint, table: &ParamTable) -> Result<SystemSpec> {
    let n = 2;
    let b1 = param_matrix(table, "b1", n);
    let g = |name: &str| PolyQ::var(table.intern(name));
    let scalar = |p: PolyQ| MatPoly::scalar(n, p);
    let half = rat_frac(1, 2);

    let (b2, gamma2, gamma4, delta4): (MatPoly, PolyQ, PolyQ, PolyQ) = match mode {
        ResonanceConstraint::FullySolved { violate } => {
            let b2 = scalar(g("s")).add_ref(&b1.scale(&g("t")));
            let off = if violate { PolyQ::one() } else { PolyQ::zero() };
            (
                b2,
                g("gamma1").neg_ref().add_ref(&off),
                g("gamma3").scale(&rat_i(-2)).add_ref(&off),
                g("delta3").scale(&rat_i(-2)),
            )
        }
        _ => (
            param_matrix(table, "b2", n),
            g("gamma2"),
            g("gamma4"),
            g("delta4"),
        ),
    };

    let b12 = b1.add_ref(&b2);
    let use_c_constraints = !matches!(
        mode,
        ResonanceConstraint::FreeAll | ResonanceConstraint::TypeThreeSolved
    );
    let use_b_constraints = !matches!(
        mode,
        ResonanceConstraint::FreeAll | ResonanceConstraint::TypeTwoSolved
    );
    // c1, c2 are shared between the two order-1 constraint sets
    let use_c12 = !matches!(mode, ResonanceConstraint::FreeAll);

    let (c1, c2) = if use_c12 {
        (
            b2.neg_ref().add_ref(&scalar(g("gamma1"))),
            b1.neg_ref().add_ref(&scalar(gamma2.clone())),
        )
    } else {
        (param_matrix(table, "c1", n), param_matrix(table, "c2", n))
    };
    let (c3, c4, c5) = if use_c_constraints {
        let g3 = g("gamma3");
        let c3 = scalar(g3.clone());
        let c4 = scalar(g3.add_ref(&gamma4));
        let factor = g("gamma3").add_ref(&gamma4.scale(&half));
        let c5 = b12.scale(&factor.neg_ref()).add_ref(&scalar(g("gamma5")));
        (c3, c4, c5)
    } else {
        (
            param_matrix(table, "c3", n),
            param_matrix(table, "c4", n),
            param_matrix(table, "c5", n),
        )
    };
    let (b3, b4, b5) = if use_b_constraints {
        let d3 = g("delta3");
        let b3 = scalar(d3.clone());
        let b4 = scalar(d3.add_ref(&delta4));
        let factor = g("delta3").add_ref(&delta4.scale(&half));
        let b5 = b12.scale(&factor).add_ref(&scalar(g("delta5")));
        (b3, b4, b5)
    } else {
        (
            param_matrix(table, "b3", n),
            param_matrix(table, "b4", n),
            param_matrix(table, "b5", n),
        )
    };
    SystemSpec::with_coeffs(
        n,
        rat_i(-1),
        rat_i(-1),
        [b1, b2, b3, b4, b5],
        [c1, c2, c3, c4, c5],
    )
}

/// Obstruction polynomials per type for the constrained system at orders
/// 0, 1, 2 (all resonances of the three candidate types).
#[derive(Debug)]
pub struct ResonanceReport {
    pub mode: ResonanceConstraint,
    pub per_type: Vec<(u8, SeriesSolution)>,
    pub all_vanish: bool,
}

pub fn verify_resonance_conditions(
    mode: ResonanceConstraint,
    table: &ParamTable,
) -> Result<ResonanceReport> {
    let sys = constrained_system(mode, table)?;
    let mut per_type = Vec::new();
    let mut all_vanish = true;
    for t in 1..=3u8 {
        let pair = diag_residues(2, &ResidueShape::of_type(t, 2))?;
        let series = expand_series(&sys, &pair, Some(2), table)?;
        all_vanish &= series.obstruction_free();
        per_type.push((t, series));
    }
    Ok(ResonanceReport {
        mode,
        per_type,
        all_vanish,
    })
}

// ---- Second-order reduction ----

/// Coefficients of the reduced second-order matrix equation
///
/// ```text
/// y'' = (y' + k1) y^{-1} (y' + k2) / 2 + (3/2) y^3 + kappa [y', y]
///       + 4 z y^2 + y k3 y + k4 y + y k5 + 2 z^2 y
/// ```
#[derive(Debug, Clone)]
pub struct ReductionCoefficients {
    pub kappa: Rat,
    pub k1: QMatrix,
    pub k2: QMatrix,
    pub k3: QMatrix,
    pub k4: QMatrix,
    pub k5: QMatrix,
}

pub fn reduction_coefficients(sys: &SystemSpec) -> Result<ReductionCoefficients> {
    let n = sys.n;
    let b5 = sys.b[4]
        .as_rational()
        .ok_or_else(|| KovError::BadConfig("b5 must be rational for the reduction".into()))?;
    let c3 = sys.c[2]
        .as_rational()
        .ok_or_else(|| KovError::BadConfig("c3 must be rational for the reduction".into()))?;
    let c5 = sys.c[4]
        .as_rational()
        .ok_or_else(|| KovError::BadConfig("c5 must be rational for the reduction".into()))?;
    let kappa = &sys.beta + rat_frac(3, 2);
    let ident = QMatrix::identity(n);
    Ok(ReductionCoefficients {
        kappa: kappa.clone(),
        k1: b5.clone(),
        k2: b5.neg_ref(),
        k3: c3.scale(&rat_i(2)),
        k4: ident.scale(&rat_i(-2)).sub_ref(&b5.scale(&kappa)),
        k5: c5
            .scale(&rat_i(2))
            .add_ref(&b5.scale(&(&sys.beta + rat_frac(1, 2)))),
    })
}

/// Verify by exact random jets that eliminating `v` from the system yields
/// the reduced second-order equation with the stated coefficients.
///
/// Requires `alpha = 0` and `b3 = b4 = 0` so that `v` can be read off the
/// first equation.
pub fn reduce_second_order_check(sys: &SystemSpec, trials: usize, seed: u64) -> Result<bool> {
    if !sys.alpha.is_zero() {
        return Err(KovError::BadConfig("reduction requires alpha = 0".into()));
    }
    if !sys.b[2].is_zero() || !sys.b[3].is_zero() {
        return Err(KovError::BadConfig("reduction requires b3 = b4 = 0".into()));
    }
    let n = sys.n;
    let rat_mat = |m: &MatPoly, name: &str| -> Result<QMatrix> {
        m.as_rational()
            .ok_or_else(|| KovError::BadConfig(format!("{name} must be rational for jets")))
    };
    let b1 = rat_mat(&sys.b[0], "b1")?;
    let b2 = rat_mat(&sys.b[1], "b2")?;
    let b5 = rat_mat(&sys.b[4], "b5")?;
    let c = [
        rat_mat(&sys.c[0], "c1")?,
        rat_mat(&sys.c[1], "c2")?,
        rat_mat(&sys.c[2], "c3")?,
        rat_mat(&sys.c[3], "c4")?,
        rat_mat(&sys.c[4], "c5")?,
    ];
    let k = reduction_coefficients(sys)?;
    let beta = &sys.beta;
    let mut sampler = JetSampler::new(seed);
    let two = rat_i(2);
    for _ in 0..trials {
        let z = sampler.rat();
        let u = sampler.invertible(n)?;
        let up = sampler.matrix(n);
        let u_inv = u.inverse().expect("sampled invertible");
        // v from the first equation: 2uv = u' + u^2 + 2zu - b1 u - u b2 - b5
        let w = up
            .add_ref(&u.mul_ref(&u))
            .add_ref(&u.scale(&(&z * &two)))
            .sub_ref(&b1.mul_ref(&u))
            .sub_ref(&u.mul_ref(&b2))
            .sub_ref(&b5);
        let v = u_inv.mul_ref(&w).scale(&rat_frac(1, 2));
        // v' from the second equation
        let vu = v.mul_ref(&u);
        let uv = u.mul_ref(&v);
        let vp = v
            .mul_ref(&v)
            .neg_ref()
            .add_ref(&vu.scale(&two))
            .add_ref(&vu.sub_ref(&uv).scale(beta))
            .add_ref(&v.scale(&(&z * &two)))
            .add_ref(&c[0].mul_ref(&v))
            .add_ref(&v.mul_ref(&c[1]))
            .add_ref(&c[2].mul_ref(&u))
            .add_ref(&u.mul_ref(&c[3]))
            .add_ref(&c[4]);
        // u'' by differentiating the first equation
        let upp = up
            .mul_ref(&u)
            .add_ref(&u.mul_ref(&up))
            .neg_ref()
            .add_ref(&up.mul_ref(&v).add_ref(&u.mul_ref(&vp)).scale(&two))
            .sub_ref(&u.scale(&two))
            .sub_ref(&up.scale(&(&z * &two)))
            .add_ref(&b1.mul_ref(&up))
            .add_ref(&up.mul_ref(&b2));
        // the reduced equation's right-hand side
        let rhs = up
            .add_ref(&k.k1)
            .mul_ref(&u_inv)
            .mul_ref(&up.add_ref(&k.k2))
            .scale(&rat_frac(1, 2))
            .add_ref(&u.mul_ref(&u).mul_ref(&u).scale(&rat_frac(3, 2)))
            .add_ref(&up.commutator(&u).scale(&k.kappa))
            .add_ref(&u.mul_ref(&u).scale(&(&z * rat_i(4))))
            .add_ref(&u.mul_ref(&k.k3).mul_ref(&u))
            .add_ref(&k.k4.mul_ref(&u))
            .add_ref(&u.mul_ref(&k.k5))
            .add_ref(&u.scale(&(&z * &z * &two)));
        if upp != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scalar symbolic proof of the reduction identity: with `u`, `u'`, `z`,
/// `b5`, `c3`, `c5` symbolic and the remaining coefficients zero, both
/// sides multiplied by `4 u^2` agree as polynomials.
pub fn reduce_scalar_symbolic(table: &ParamTable) -> bool {
    let u = PolyQ::var(table.intern("u"));
    let up = PolyQ::var(table.intern("up"));
    let z = PolyQ::var(table.intern("z"));
    let b5 = PolyQ::var(table.intern("b5"));
    let c3 = PolyQ::var(table.intern("c3"));
    let c5 = PolyQ::var(table.intern("c5"));
    let two = rat_i(2);

    // V = u' + u^2 + 2zu - b5, so v = V / (2u)
    let vnum = up
        .add_ref(&u.pow(2))
        .add_ref(&z.mul_ref(&u).scale(&two))
        .sub_ref(&b5);
    // 4u^2 v' = -V^2 + 4u^2 V + 4zuV + 4 c3 u^3 + 4 c5 u^2
    let v4u2 = vnum
        .pow(2)
        .neg_ref()
        .add_ref(&u.pow(2).mul_ref(&vnum).scale(&rat_i(4)))
        .add_ref(&z.mul_ref(&u).mul_ref(&vnum).scale(&rat_i(4)))
        .add_ref(&c3.mul_ref(&u.pow(3)).scale(&rat_i(4)))
        .add_ref(&c5.mul_ref(&u.pow(2)).scale(&rat_i(4)));
    // 4u^2 u'' = -8u^3 u' + 4u u' V + 2u (4u^2 v') - 8u^3 - 8z u^2 u'
    let lhs = u
        .pow(3)
        .mul_ref(&up)
        .scale(&rat_i(-8))
        .add_ref(&u.mul_ref(&up).mul_ref(&vnum).scale(&rat_i(4)))
        .add_ref(&u.mul_ref(&v4u2).scale(&two))
        .sub_ref(&u.pow(3).scale(&rat_i(8)))
        .sub_ref(&z.mul_ref(&u.pow(2)).mul_ref(&up).scale(&rat_i(8)));
    // 4u^2 rhs = 2u (u'^2 - b5^2) + 6u^5 + 16z u^4 + 8 c3 u^4
    //            + 4 (-2 - b5 + 2 c5) u^3 + 8 z^2 u^3
    let k45 = PolyQ::int(-2).sub_ref(&b5).add_ref(&c5.scale(&two));
    let rhs = u
        .mul_ref(&up.pow(2).sub_ref(&b5.pow(2)))
        .scale(&two)
        .add_ref(&u.pow(5).scale(&rat_i(6)))
        .add_ref(&z.mul_ref(&u.pow(4)).scale(&rat_i(16)))
        .add_ref(&c3.mul_ref(&u.pow(4)).scale(&rat_i(8)))
        .add_ref(&k45.mul_ref(&u.pow(3)).scale(&rat_i(4)))
        .add_ref(&z.pow(2).mul_ref(&u.pow(3)).scale(&rat_i(8)));
    lhs == rhs
}

/// Scalar identification with the classical fourth-Painlevé form
/// `y'' = y'^2/(2y) + (3/2) y^3 + 4 z y^2 + 2 (z^2 - gamma) y + delta / y`
/// under `gamma = 1 + b5/2 - c5`, `delta = -b5^2/2` (with `c3 = 0`).
pub fn scalar_p4_form_identification(table: &ParamTable) -> bool {
    let u = PolyQ::var(table.intern("u"));
    let up = PolyQ::var(table.intern("up"));
    let z = PolyQ::var(table.intern("z"));
    let b5 = PolyQ::var(table.intern("b5"));
    let c5 = PolyQ::var(table.intern("c5"));
    let two = rat_i(2);
    // 2u * reduced RHS with c3 = 0
    let k45 = PolyQ::int(-2).sub_ref(&b5).add_ref(&c5.scale(&two));
    let lhs = up
        .pow(2)
        .sub_ref(&b5.pow(2))
        .add_ref(&u.pow(4).scale(&rat_i(3)))
        .add_ref(&z.mul_ref(&u.pow(3)).scale(&rat_i(8)))
        .add_ref(&k45.mul_ref(&u.pow(2)).scale(&two))
        .add_ref(&z.pow(2).mul_ref(&u.pow(2)).scale(&rat_i(4)));
    // 2u * classical RHS
    let gamma = PolyQ::one()
        .add_ref(&b5.scale(&rat_frac(1, 2)))
        .sub_ref(&c5);
    let delta = b5.pow(2).scale(&rat_frac(-1, 2));
    let rhs = up
        .pow(2)
        .add_ref(&u.pow(4).scale(&rat_i(3)))
        .add_ref(&z.mul_ref(&u.pow(3)).scale(&rat_i(8)))
        .add_ref(
            &z.pow(2)
                .sub_ref(&gamma)
                .mul_ref(&u.pow(2))
                .scale(&rat_i(4)),
        )
        .add_ref(&delta.scale(&two));
    lhs == rhs
}

// ---- Degenerations ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[allow(non_camel_case_types)]
pub enum P2Id {
    P2_0,
    P2_1,
    P2_2,
}

impl P2Id {
    pub fn as_str(&self) -> &'static str {
        match self {
            P2Id::P2_0 => "P2_0",
            P2Id::P2_1 => "P2_1",
            P2Id::P2_2 => "P2_2",
        }
    }
}

/// Symbolic generic matrices used to express transformed systems.
pub struct SymbolicFrame {
    pub n: usize,
    pub f: MatPoly,
    pub g: MatPoly,
    pub x: ParamId,
}

impl SymbolicFrame {
    pub fn new(n: usize, table: &ParamTable) -> Self {
        SymbolicFrame {
            n,
            f: param_matrix(table, "f", n),
            g: param_matrix(table, "g", n),
            x: table.intern("x"),
        }
    }
}

/// Apply the pole-rescaling change of variables
///
/// ```text
/// z = eps^{-3}/4 - eps x,   u = -eps^{-3}/4 I - eps^{-1} f,   v = -2 eps g,
/// ```
///
/// with the counterterm `b5 -> b5 - eps^{-6}/16 I`, and return the exact
/// right-hand sides of `f' = ...`, `g' = ...` as Laurent expressions in
/// `eps` over the generic matrices of `frame`.
pub fn transformed_system(sys: &SystemSpec, frame: &SymbolicFrame) -> (MatPoly, MatPoly) {
    let n = sys.n;
    let eps = |k: i32, c: Rat| PolyQ::term(c, EPS_ID, k);
    let u = MatPoly::scalar(n, eps(-3, rat_frac(-1, 4)))
        .add_ref(&frame.f.scale(&eps(-1, rat_i(-1))));
    let v = frame.g.scale(&eps(1, rat_i(-2)));
    let z = eps(-3, rat_frac(1, 4)).sub_ref(&PolyQ::var(EPS_ID).mul_ref(&PolyQ::var(frame.x)));
    let b5 = sys.b[4].add_ref(&MatPoly::scalar(n, eps(-6, rat_frac(-1, 16))));

    let uv = u.mul_ref(&v);
    let vu = v.mul_ref(&u);
    let rhs_u = u
        .mul_ref(&u)
        .neg_ref()
        .add_ref(&uv.scale_rat(&rat_i(2)))
        .add_ref(&uv.sub_ref(&vu).scale_rat(&sys.alpha))
        .sub_ref(&u.scale(&z.scale(&rat_i(2))))
        .add_ref(&sys.b[0].mul_ref(&u))
        .add_ref(&u.mul_ref(&sys.b[1]))
        .add_ref(&sys.b[2].mul_ref(&v))
        .add_ref(&v.mul_ref(&sys.b[3]))
        .add_ref(&b5);
    let rhs_v = v
        .mul_ref(&v)
        .neg_ref()
        .add_ref(&vu.scale_rat(&rat_i(2)))
        .add_ref(&vu.sub_ref(&uv).scale_rat(&sys.beta))
        .add_ref(&v.scale(&z.scale(&rat_i(2))))
        .add_ref(&sys.c[0].mul_ref(&v))
        .add_ref(&v.mul_ref(&sys.c[1]))
        .add_ref(&sys.c[2].mul_ref(&u))
        .add_ref(&u.mul_ref(&sys.c[3]))
        .add_ref(&sys.c[4]);

    // chain rule: dz = -eps dx, du = -eps^{-1} df, dv = -2 eps dg
    let f_prime = rhs_u.scale(&PolyQ::term(rat_i(1), EPS_ID, 2));
    let g_prime = rhs_v.scale_rat(&rat_frac(1, 2));
    (f_prime, g_prime)
}

/// Result of one degeneration run.
#[derive(Debug, Clone)]
pub struct DegenerationOutcome {
    pub family: FamilyId,
    pub target: P2Id,
    pub matched: bool,
    /// `kappa` of the target equation, from its system form.
    pub kappa: Rat,
    /// The side constraint `[a, b] = -2 b` where applicable.
    pub constraint_holds: bool,
}

/// Build the epsilon-scaled coefficients for the family's degeneration,
/// pass to the limit and compare against the target system exactly.
pub fn degenerate_to_p2(
    family: FamilyId,
    n: usize,
    table: &ParamTable,
) -> Result<DegenerationOutcome> {
    if n < 2 {
        return Err(KovError::BadConfig("degenerations are run at n >= 2".into()));
    }
    let frame = SymbolicFrame::new(n, table);
    let fm = &frame.f;
    let gm = &frame.g;
    let xp = PolyQ::var(frame.x);
    let zero = MatPoly::zero(n, n);
    let eps1 = PolyQ::var(EPS_ID);
    let half_x = MatPoly::scalar(n, xp.scale(&rat_frac(1, 2)));
    let b_sym = param_matrix(table, "bb", n);

    let (sys, target_f, target_g, target_id, kappa, constraint_holds) = match family {
        FamilyId::P4_0 => {
            // b1 = b2 = 2 eps b with b arbitrary (kept symbolic)
            let g1 = PolyQ::var(table.intern("gamma1"));
            let g2 = PolyQ::var(table.intern("gamma2"));
            let beps = b_sym.scale(&eps1.scale(&rat_i(2)));
            let sys = SystemSpec::with_coeffs(
                n,
                rat_i(-1),
                rat_i(-1),
                [
                    beps.clone(),
                    beps.clone(),
                    zero.clone(),
                    zero.clone(),
                    MatPoly::scalar(n, g1),
                ],
                [
                    beps.neg_ref(),
                    beps.neg_ref(),
                    zero.clone(),
                    zero.clone(),
                    MatPoly::scalar(n, g2.clone()),
                ],
            )?;
            // f' = -f^2 + g - x/2 - b ; g' = gf + fg + (gamma2/2) I
            let tf = fm
                .mul_ref(fm)
                .neg_ref()
                .add_ref(gm)
                .sub_ref(&half_x)
                .sub_ref(&b_sym);
            let tg = gm
                .mul_ref(fm)
                .add_ref(&fm.mul_ref(gm))
                .add_ref(&MatPoly::scalar(n, g2.scale(&rat_frac(1, 2))));
            (sys, tf, tg, P2Id::P2_0, rat_i(0), true)
        }
        FamilyId::P4_1 => {
            // h1 = 0, h2 carries eps^4, a = h3/2 with [h3, h2] = -2 h2
            let gam = PolyQ::var(table.intern("gamma"));
            let h3 = ladder_diag(n);
            let h2s = e_matrix(n, 1, 0).scale(&PolyQ::term(rat_i(1), EPS_ID, 4));
            let sys = SystemSpec::with_coeffs(
                n,
                rat_i(0),
                rat_i(-2),
                [
                    zero.clone(),
                    h2s.scale_rat(&rat_i(2)),
                    h2s.neg_ref(),
                    zero.clone(),
                    h3.add_ref(&MatPoly::scalar(n, gam)),
                ],
                [
                    h2s.scale_rat(&rat_i(-2)),
                    zero.clone(),
                    zero.clone(),
                    h2s.clone(),
                    h3.clone(),
                ],
            )?;
            let a = h3.scale_rat(&rat_frac(1, 2));
            // f' = -f^2 + g - x/2 ; g' = 2fg + a
            let tf = fm.mul_ref(fm).neg_ref().add_ref(gm).sub_ref(&half_x);
            let tg = fm.mul_ref(gm).scale_rat(&rat_i(2)).add_ref(&a);
            let holds =
                h3.commutator(&e_matrix(n, 1, 0)) == e_matrix(n, 1, 0).scale_rat(&rat_i(-2));
            (sys, tf, tg, P2Id::P2_1, rat_i(1), holds)
        }
        FamilyId::P4_2 => {
            // h2 = -(4/3) eps b with b = E21, h1 = h3 = 3 h2, h4 = diag(1,-1,0..)
            let gam = PolyQ::var(table.intern("gamma"));
            let b = e_matrix(n, 1, 0);
            let h4 = ladder_diag(n);
            let beps4 = b.scale(&eps1.scale(&rat_i(4)));
            let sys = SystemSpec::with_coeffs(
                n,
                rat_i(0),
                rat_i(-3),
                [
                    zero.clone(),
                    beps4.clone(),
                    b.scale(&eps1.scale(&rat_frac(-4, 3))),
                    zero.clone(),
                    h4.clone(),
                ],
                [
                    beps4.neg_ref(),
                    zero.clone(),
                    beps4.neg_ref(),
                    beps4.clone(),
                    h4.scale_rat(&rat_i(2))
                        .add_ref(
                            &b.mul_ref(&b)
                                .scale(&PolyQ::term(rat_frac(8, 3), EPS_ID, 2)),
                        )
                        .add_ref(&MatPoly::scalar(n, gam.clone())),
                ],
            )?;
            let a = h4.add_ref(&MatPoly::scalar(n, gam.scale(&rat_frac(1, 2))));
            // f' = -f^2 + g - x/2 - b ; g' = 3fg - gf - 2[f, b] + a
            let tf = fm
                .mul_ref(fm)
                .neg_ref()
                .add_ref(gm)
                .sub_ref(&half_x)
                .sub_ref(&b);
            let tg = fm
                .mul_ref(gm)
                .scale_rat(&rat_i(3))
                .sub_ref(&gm.mul_ref(fm))
                .sub_ref(&fm.commutator(&b).scale_rat(&rat_i(2)))
                .add_ref(&a);
            let holds = a.commutator(&b) == b.scale_rat(&rat_i(-2));
            (sys, tf, tg, P2Id::P2_2, rat_i(2), holds)
        }
    };

    let (fp, gp) = transformed_system(&sys, &frame);
    let limit_f = fp.epsilon_limit()?;
    let limit_g = gp.epsilon_limit()?;
    let matched = limit_f == target_f && limit_g == target_g;
    Ok(DegenerationOutcome {
        family,
        target: target_id,
        matched,
        kappa,
        constraint_holds,
    })
}

/// Scalar sanity case: the rescaled scalar system with constant `2 theta`
/// in the second equation converges to `f' = -f^2 + g - x/2`,
/// `g' = 2fg + theta`.
pub fn scalar_degeneration(table: &ParamTable) -> Result<bool> {
    let n = 1;
    let frame = SymbolicFrame::new(n, table);
    let theta = PolyQ::var(table.intern("theta"));
    let zero = MatPoly::zero(n, n);
    let sys = SystemSpec::with_coeffs(
        n,
        rat_i(0),
        rat_i(0),
        std::array::from_fn(|_| zero.clone()),
        [
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            MatPoly::scalar(n, theta.scale(&rat_i(2))),
        ],
    )?;
    let (fp, gp) = transformed_system(&sys, &frame);
    let limit_f = fp.epsilon_limit()?;
    let limit_g = gp.epsilon_limit()?;
    let fm = &frame.f;
    let gm = &frame.g;
    let target_f = fm.mul_ref(fm).neg_ref().add_ref(gm).sub_ref(&MatPoly::scalar(
        n,
        PolyQ::var(frame.x).scale(&rat_frac(1, 2)),
    ));
    let target_g = fm
        .mul_ref(gm)
        .scale_rat(&rat_i(2))
        .add_ref(&MatPoly::scalar(n, theta));
    Ok(limit_f == target_f && limit_g == target_g)
}

/// Map a second-Painlevé-type system to its equation coefficients:
/// `kappa = -1 - beta`, `b1 = c2 + (2 + beta) c1`, `b2 = c3 - beta c1`,
/// `a = c4 - I/2`.
pub fn p2_system_to_equation(beta: &Rat, c: &[QMatrix; 4]) -> (Rat, QMatrix, QMatrix, QMatrix) {
    let n = c[0].rows();
    let kappa = -rat_i(1) - beta;
    let b1 = c[1].add_ref(&c[0].scale(&(rat_i(2) + beta)));
    let b2 = c[2].sub_ref(&c[0].scale(beta));
    let a = c[3].sub_ref(&QMatrix::identity(n).scale(&rat_frac(1, 2)));
    (kappa, b1, b2, a)
}

/// Jet verification that the system form reproduces the second-order
/// equation with the mapped coefficients.
pub fn verify_p2_reduction(beta: &Rat, c: &[QMatrix; 4], trials: usize, seed: u64) -> Result<bool> {
    let n = c[0].rows();
    let (kappa, b1, b2, a) = p2_system_to_equation(beta, c);
    let mut sampler = JetSampler::new(seed);
    let two = rat_i(2);
    for _ in 0..trials {
        let x = sampler.rat();
        let f = sampler.matrix(n);
        let g = sampler.matrix(n);
        let half_x = QMatrix::identity(n).scale(&(&x * rat_frac(1, 2)));
        let fp = f
            .mul_ref(&f)
            .neg_ref()
            .add_ref(&g)
            .sub_ref(&half_x)
            .sub_ref(&c[0]);
        let gf = g.mul_ref(&f);
        let fg = f.mul_ref(&g);
        let gp = gf
            .scale(&two)
            .add_ref(&gf.sub_ref(&fg).scale(beta))
            .add_ref(&c[1].mul_ref(&f))
            .add_ref(&f.mul_ref(&c[2]))
            .add_ref(&c[3]);
        let fpp = fp
            .mul_ref(&f)
            .add_ref(&f.mul_ref(&fp))
            .neg_ref()
            .add_ref(&gp)
            .sub_ref(&QMatrix::identity(n).scale(&rat_frac(1, 2)));
        let rhs = f
            .commutator(&fp)
            .scale(&kappa)
            .add_ref(&f.mul_ref(&f).mul_ref(&f).scale(&two))
            .add_ref(&f.scale(&x))
            .add_ref(&b1.mul_ref(&f))
            .add_ref(&f.mul_ref(&b2))
            .add_ref(&a);
        if fpp != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verify at exact random jets that `w = g` of the system
/// `f' = -f^2 + g - x/2, g' = 2fg + a` satisfies
/// `w'' = (w' - a) w^{-1} (w' + a)/2 + 2 w^2 - x w`.
pub fn p34_check(a: &QMatrix, trials: usize, seed: u64) -> Result<bool> {
    p34_check_with_coeff(a, trials, seed, &rat_i(2))
}

/// Same as [`p34_check`] with the coefficient of `w^2` overridable for
/// negative controls.
pub fn p34_check_with_coeff(
    a: &QMatrix,
    trials: usize,
    seed: u64,
    w2_coeff: &Rat,
) -> Result<bool> {
    let n = a.rows();
    let mut sampler = JetSampler::new(seed);
    let two = rat_i(2);
    for _ in 0..trials {
        let x = sampler.rat();
        let f = sampler.matrix(n);
        let g = sampler.invertible(n)?;
        let g_inv = g.inverse().expect("invertible");
        let half_x = QMatrix::identity(n).scale(&(&x * rat_frac(1, 2)));
        let fp = f.mul_ref(&f).neg_ref().add_ref(&g).sub_ref(&half_x);
        let gp = f.mul_ref(&g).scale(&two).add_ref(a);
        let gpp = fp.mul_ref(&g).add_ref(&f.mul_ref(&gp)).scale(&two);
        let rhs = gp
            .sub_ref(a)
            .mul_ref(&g_inv)
            .mul_ref(&gp.add_ref(a))
            .scale(&rat_frac(1, 2))
            .add_ref(&g.mul_ref(&g).scale(w2_coeff))
            .sub_ref(&g.scale(&x));
        if gpp != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- Parameter-count formulas at the two base points ----

/// Closed-form possible-parameter counts (excluding the pole position) for
/// non-commuting shapes at `(0,-3)` and `(0,-2)`.
pub fn m_formula(point: (i64, i64), m: usize, k: [usize; 4]) -> Option<i64> {
    let n = (2 * m + k.iter().sum::<usize>()) as i64;
    let m = m as i64;
    let [k1, k2, k3, k4] = k.map(|v| v as i64);
    match point {
        (0, -3) => Some(
            2 * n * n
                - m * m
                - m * (k1 + 2 * k2 + k3)
                - k1 * k1
                - k2 * k2
                - k3 * k3
                - k2 * (k1 + k3 + k4),
        ),
        (0, -2) => Some(
            2 * n * n - 2 * m * m - 2 * m * (k2 + k3) - k1 * k1 - k2 * k2 - k3 * k3 - k2 * k3,
        ),
        _ => None,
    }
}

/// Engine-side possible count (excluding the pole position): kernel
/// dimensions over all nonnegative integer shifts plus the orbit dimension.
pub fn engine_possible_count(pair: &ResiduePair, alpha: &Rat, beta: &Rat) -> usize {
    possible_total(pair, alpha, beta) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_shape_enumeration() {
        assert_eq!(m1_shapes(2).len(), 1);
        assert_eq!(m1_shapes(3).len(), 4);
        assert_eq!(m1_shapes(4).len(), 10);
        for shape in m1_shapes(4) {
            assert_eq!(shape.size(), 4);
            assert!(shape.validate(4).is_ok());
        }
    }

    #[test]
    fn classify_landmark_points() {
        let r = classify_point(&rat_i(-1), &rat_i(-1), 2).unwrap();
        assert_eq!(r.maximal_types, vec![1, 2, 3]);
        assert!(!r.noncommuting_maximal);
        assert_eq!(r.total_maximal, 3);

        let r = classify_point(&rat_i(0), &rat_i(-3), 2).unwrap();
        assert_eq!(r.maximal_types, vec![1, 3]);
        assert!(r.noncommuting_maximal);
        assert_eq!(r.total_maximal, 3);

        let r = classify_point(&rat_i(1), &rat_i(1), 2).unwrap();
        assert_eq!(r.total_maximal, 0);

        // non-integer spot check: a rational point never reaches three
        let r = classify_point(&rat_frac(1, 2), &rat_i(-2), 2).unwrap();
        assert!(r.total_maximal < 3);
    }

    #[test]
    fn p42_constraint_validation() {
        let good = DeformationFamily::default_instance(FamilyId::P4_2, 2, 3);
        assert!(good.validate().is_ok());
        let bad = DeformationFamily::P42 {
            n: 2,
            h1: e_matrix(2, 0, 1),
            h2: ladder_diag(2),
            gamma: PolyQ::one(),
        };
        assert!(matches!(
            bad.validate(),
            Err(KovError::ConstraintViolated(_))
        ));
    }

    #[test]
    fn p34_negative_control() {
        let a = QMatrix::from_i64_rows(&[vec![1]]);
        assert!(p34_check(&a, 20, 5).unwrap());
        assert!(!p34_check_with_coeff(&a, 20, 5, &rat_i(3)).unwrap());
    }

    #[test]
    fn scalar_reduction_is_symbolic_identity() {
        let table = ParamTable::new();
        assert!(reduce_scalar_symbolic(&table));
        assert!(scalar_p4_form_identification(&table));
    }

    #[test]
    fn p2_equation_map_values() {
        let zero = QMatrix::zero(2, 2);
        let c = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
        let (kappa, _, _, a) = p2_system_to_equation(&rat_i(-1), &c);
        assert_eq!(kappa, rat_i(0));
        assert_eq!(a, QMatrix::identity(2).scale(&rat_frac(-1, 2)));
        let (kappa, _, _, _) = p2_system_to_equation(&rat_i(-2), &c);
        assert_eq!(kappa, rat_i(1));
        let (kappa, _, _, _) = p2_system_to_equation(&rat_i(-3), &c);
        assert_eq!(kappa, rat_i(2));
    }

    #[test]
    fn m_formula_frozen_values() {
        // evaluated by hand from the closed forms
        assert_eq!(m_formula((0, -3), 1, [0, 0, 0, 0]), Some(7)); // n = 2
        assert_eq!(m_formula((0, -2), 1, [0, 0, 0, 0]), Some(6)); // n = 2
        assert_eq!(m_formula((0, -3), 1, [0, 0, 0, 2]), Some(31)); // n = 4
    }

    #[test]
    fn landmark_orbit_decomposition() {
        let sigma = sigma_points();
        assert_eq!(sigma.len(), 13);
        let orbit1 = crate::model::dihedral_orbit(&rat_i(0), &rat_i(-3));
        let orbit2 = crate::model::dihedral_orbit(&rat_i(0), &rat_i(-2));
        assert_eq!(orbit1.len(), 6);
        assert_eq!(orbit2.len(), 6);
        let mut union: BTreeSet<(i64, i64)> = BTreeSet::new();
        union.insert((-1, -1));
        for (a, b) in orbit1.iter().chain(orbit2.iter()) {
            union.insert((
                i64::try_from(a.to_integer()).unwrap(),
                i64::try_from(b.to_integer()).unwrap(),
            ));
        }
        assert_eq!(union, sigma);
    }
}
