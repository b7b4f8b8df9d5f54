//! JSON report payloads (schema `kov-report/1`).
//!
//! All numeric values are exact rationals rendered as `num` or `num/den`
//! strings; polynomials appear in the canonical text form of
//! [`PolyQ::render`](crate::PolyQ::render). Field order is fixed by struct
//! declaration and every map is ordered, so identical runs serialize to
//! identical bytes.

use crate::classify::{
    ClassificationResult, DegenerationOutcome, FamilyVerification, ResonanceReport,
};
use crate::engine::{MaximalityVerdict, SeriesSolution, SpectrumTable};
use crate::matrix::MatPoly;
use crate::model::{ResiduePair, ResidueShape};
use crate::param::ParamTable;
use crate::poly::{rat_str, Rat};
use serde::Serialize;

pub const SCHEMA: &str = "kov-report/1";

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    pub payload: T,
}

pub fn render_report<T: Serialize>(command: &str, seed: u64, payload: T) -> String {
    let report = Report {
        schema: SCHEMA,
        command: command.to_string(),
        seed,
        payload,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serialization");
    s.push('\n');
    s
}

pub fn shape_label(shape: &ResidueShape) -> String {
    match shape {
        ResidueShape::Commuting { k } => format!("commuting({},{},{},{})", k[0], k[1], k[2], k[3]),
        ResidueShape::NonCommuting { m, k } => {
            format!("noncommuting(m={};{},{},{},{})", m, k[0], k[1], k[2], k[3])
        }
    }
}

pub fn matrix_strings(m: &MatPoly, table: &ParamTable) -> Vec<Vec<String>> {
    m.render(table)
}

pub fn qmatrix_strings(m: &crate::QMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| rat_str(m.get(i, j))).collect())
        .collect()
}

#[derive(Serialize)]
pub struct ResiduesPayload {
    pub alpha: String,
    pub beta: String,
    pub n: usize,
    pub shape: String,
    pub type_tag: Option<u8>,
    pub p: Vec<Vec<String>>,
    pub q: Vec<Vec<String>>,
    pub satisfies_residue_equations: bool,
    pub commutator_is_zero: bool,
    pub orbit_dim: usize,
}

pub fn residues_payload(pair: &ResiduePair, alpha: &Rat, beta: &Rat) -> ResiduesPayload {
    let comm = pair.p.commutator(&pair.q);
    ResiduesPayload {
        alpha: rat_str(alpha),
        beta: rat_str(beta),
        n: pair.p.rows(),
        shape: shape_label(&pair.shape),
        type_tag: pair.type_tag,
        p: qmatrix_strings(&pair.p),
        q: qmatrix_strings(&pair.q),
        satisfies_residue_equations: crate::model::check_residue_equations(pair, alpha, beta),
        commutator_is_zero: comm.is_zero(),
        orbit_dim: crate::model::orbit_dimension(pair),
    }
}

#[derive(Serialize)]
pub struct SpectrumPayload {
    pub alpha: String,
    pub beta: String,
    pub n: usize,
    pub shape: String,
    /// `(eigenvalue, dimension)` from the closed-form table.
    pub spectrum: Vec<(String, usize)>,
    /// `(k, nullity of L - kI)` over the scanned window.
    pub integer_nullities: Vec<(i64, usize)>,
    /// Formula table and rank computation agree at every integer point.
    pub formulas_match_ranks: bool,
}

pub fn spectrum_payload(
    alpha: &Rat,
    beta: &Rat,
    shape: &ResidueShape,
    table: &SpectrumTable,
    nullities: &std::collections::BTreeMap<i64, usize>,
    matched: bool,
) -> SpectrumPayload {
    SpectrumPayload {
        alpha: rat_str(alpha),
        beta: rat_str(beta),
        n: shape.size(),
        shape: shape_label(shape),
        spectrum: table
            .entries
            .iter()
            .map(|(l, d)| (rat_str(l), *d))
            .collect(),
        integer_nullities: nullities.iter().map(|(k, v)| (*k, *v)).collect(),
        formulas_match_ranks: matched,
    }
}

#[derive(Serialize)]
pub struct ObstructionEntry {
    pub k: usize,
    pub polynomials: Vec<String>,
}

fn obstruction_entries(
    obstructions: &[(usize, Vec<crate::PolyQ>)],
    table: &ParamTable,
) -> Vec<ObstructionEntry> {
    obstructions
        .iter()
        .map(|(k, polys)| ObstructionEntry {
            k: *k,
            polynomials: polys.iter().map(|p| p.render(table)).collect(),
        })
        .collect()
}

#[derive(Serialize)]
pub struct CoefficientEntry {
    pub k: usize,
    pub x: Vec<Vec<String>>,
    pub y: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct SeriesPayload {
    pub alpha: String,
    pub beta: String,
    pub n: usize,
    pub shape: String,
    pub depth: usize,
    pub resonances: Vec<(usize, usize)>,
    pub free_parameters: Vec<String>,
    pub obstructions: Vec<ObstructionEntry>,
    pub verdict: MaximalityVerdict,
    pub residual_ok: Option<bool>,
    pub coefficients: Vec<CoefficientEntry>,
}

pub fn series_payload(
    series: &SeriesSolution,
    table: &ParamTable,
    verdict: &MaximalityVerdict,
    residual_ok: Option<bool>,
) -> SeriesPayload {
    SeriesPayload {
        alpha: rat_str(&series.alpha),
        beta: rat_str(&series.beta),
        n: series.n,
        shape: shape_label(&series.pair.shape),
        depth: series.depth,
        resonances: series.resonances.clone(),
        free_parameters: series.free_param_names(),
        obstructions: obstruction_entries(&series.obstructions, table),
        verdict: verdict.clone(),
        residual_ok,
        coefficients: series
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, (x, y))| CoefficientEntry {
                k,
                x: matrix_strings(x, table),
                y: matrix_strings(y, table),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct ScanEntry {
    pub alpha: String,
    pub beta: String,
    pub maximal_types: Vec<u8>,
    pub noncommuting_maximal: bool,
    pub total_maximal: usize,
}

#[derive(Serialize)]
pub struct ScanPayload {
    pub n: usize,
    pub alpha_range: (i64, i64),
    pub beta_range: (i64, i64),
    pub distinguished_count: usize,
    pub distinguished_points: Vec<(String, String)>,
    pub results: Vec<ScanEntry>,
}

pub fn scan_payload(
    n: usize,
    a_range: (i64, i64),
    b_range: (i64, i64),
    results: &[ClassificationResult],
) -> ScanPayload {
    let distinguished: Vec<(String, String)> = results
        .iter()
        .filter(|r| r.total_maximal == 3)
        .map(|r| (rat_str(&r.point.0), rat_str(&r.point.1)))
        .collect();
    ScanPayload {
        n,
        alpha_range: a_range,
        beta_range: b_range,
        distinguished_count: distinguished.len(),
        distinguished_points: distinguished,
        results: results
            .iter()
            .map(|r| ScanEntry {
                alpha: rat_str(&r.point.0),
                beta: rat_str(&r.point.1),
                maximal_types: r.maximal_types.clone(),
                noncommuting_maximal: r.noncommuting_maximal,
                total_maximal: r.total_maximal,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct FamilyCandidateEntry {
    pub label: String,
    pub verdict: MaximalityVerdict,
    pub free_parameters: Vec<String>,
    pub obstructions: Vec<ObstructionEntry>,
}

#[derive(Serialize)]
pub struct FamilyPayload {
    pub family: String,
    pub n: usize,
    pub passed: bool,
    pub candidates: Vec<FamilyCandidateEntry>,
}

pub fn family_payload(v: &FamilyVerification, table: &ParamTable) -> FamilyPayload {
    FamilyPayload {
        family: v.id.as_str().to_string(),
        n: v.n,
        passed: v.passed,
        candidates: v
            .outcomes
            .iter()
            .map(|o| FamilyCandidateEntry {
                label: o.label.clone(),
                verdict: o.verdict.clone(),
                free_parameters: o.free_params.clone(),
                obstructions: obstruction_entries(&o.obstructions, table),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct TypeObstructions {
    pub series_type: u8,
    pub obstructions: Vec<ObstructionEntry>,
}

#[derive(Serialize)]
pub struct ResonancePayload {
    pub mode: String,
    pub all_vanish: bool,
    pub per_type: Vec<TypeObstructions>,
}

pub fn resonance_payload(rep: &ResonanceReport, table: &ParamTable) -> ResonancePayload {
    ResonancePayload {
        mode: format!("{:?}", rep.mode),
        all_vanish: rep.all_vanish,
        per_type: rep
            .per_type
            .iter()
            .map(|(t, s)| TypeObstructions {
                series_type: *t,
                obstructions: obstruction_entries(&s.obstructions, table),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct ReducePayload {
    pub family: String,
    pub n: usize,
    pub trials: usize,
    pub kappa: String,
    pub passed: bool,
    pub scalar_symbolic_identity: bool,
}

#[derive(Serialize)]
pub struct DegeneratePayload {
    pub family: String,
    pub n: usize,
    pub target: String,
    pub matched: bool,
    pub kappa: String,
    pub constraint_holds: bool,
}

pub fn degenerate_payload(out: &DegenerationOutcome, n: usize) -> DegeneratePayload {
    DegeneratePayload {
        family: out.family.as_str().to_string(),
        n,
        target: out.target.as_str().to_string(),
        matched: out.matched,
        kappa: rat_str(&out.kappa),
        constraint_holds: out.constraint_holds,
    }
}
