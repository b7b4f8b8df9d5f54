//! Sparse multivariate polynomials over exact rationals.
//!
//! One distinguished variable, `eps` (id 0), may carry negative exponents;
//! every other parameter is an ordinary polynomial variable. Terms are kept
//! in a canonical graded-lexicographic order with no zero coefficients, so
//! structural equality is mathematical equality.

use crate::param::{ParamId, ParamTable, EPS_ID};
use crate::{KovError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational scalar used everywhere in the crate.
pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Render a rational as `num` or `num/den` (denominator always positive).
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"3"`, `"-3"`, or `"3/4"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|_| KovError::BadConfig(format!("not a rational: `{s}`")))
}

/// A monomial: sorted `(param, exponent)` pairs, zero exponents omitted.
/// Only `eps` may have a negative exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    exps: SmallVec<[(ParamId, i32); 4]>,
}

impl Mono {
    pub fn one() -> Self {
        Mono::default()
    }

    pub fn var(id: ParamId) -> Self {
        Mono::var_pow(id, 1)
    }

    pub fn var_pow(id: ParamId, exp: i32) -> Self {
        assert!(id == EPS_ID || exp >= 0, "negative power on non-eps variable");
        let mut exps = SmallVec::new();
        if exp != 0 {
            exps.push((id, exp));
        }
        Mono { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[(ParamId, i32)] {
        &self.exps
    }

    pub fn exponent_of(&self, id: ParamId) -> i32 {
        self.exps
            .iter()
            .find(|(p, _)| *p == id)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|(_, e)| *e as i64).sum()
    }

    /// Merge-multiply two monomials.
    pub fn mul(&self, other: &Mono) -> Mono {
        let mut exps: SmallVec<[(ParamId, i32); 4]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (pa, ea) = self.exps[i];
            let (pb, eb) = other.exps[j];
            match pa.cmp(&pb) {
                Ordering::Less => {
                    exps.push((pa, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push((pb, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = ea + eb;
                    if e != 0 {
                        exps.push((pa, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Mono { exps }
    }

    /// Graded-lexicographic order: higher total degree first, ties broken by
    /// the exponent at the smallest differing parameter id.
    fn grlex_cmp(&self, other: &Mono) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(pa, ea)), Some(&(pb, eb))) => match pa.cmp(&pb) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grlex_cmp(other)
    }
}

/// Sparse multivariate polynomial over Q, Laurent in `eps`.
///
/// Terms are sorted in descending monomial order; no zero coefficient is
/// ever stored, so `PolyQ` equality is exact polynomial identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    terms: Vec<(Mono, Rat)>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ { terms: Vec::new() }
    }

    pub fn one() -> Self {
        PolyQ::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            PolyQ::zero()
        } else {
            PolyQ {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn int(n: i64) -> Self {
        PolyQ::constant(rat_i(n))
    }

    pub fn var(id: ParamId) -> Self {
        PolyQ {
            terms: vec![(Mono::var(id), Rat::one())],
        }
    }

    /// `c * id^exp`; `exp` may be negative only for `eps`.
    pub fn term(c: Rat, id: ParamId, exp: i32) -> Self {
        if c.is_zero() {
            PolyQ::zero()
        } else {
            PolyQ {
                terms: vec![(Mono::var_pow(id, exp), c)],
            }
        }
    }

    pub fn from_terms(terms: Vec<(Mono, Rat)>) -> Self {
        let mut acc: HashMap<Mono, Rat> = HashMap::new();
        for (m, c) in terms {
            if !c.is_zero() {
                *acc.entry(m).or_insert_with(Rat::zero) += c;
            }
        }
        Self::collect(acc)
    }

    fn collect(acc: HashMap<Mono, Rat>) -> Self {
        let mut terms: Vec<(Mono, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        PolyQ { terms }
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` iff the polynomial is the constant `c` (including 0).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> PolyQ {
        PolyQ::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> PolyQ {
        if c.is_zero() {
            return PolyQ::zero();
        }
        PolyQ {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn add_ref(&self, other: &PolyQ) -> PolyQ {
        // merge of two sorted term lists
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match mb.cmp(ma) {
                Ordering::Less => {
                    terms.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    terms.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        terms.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend(self.terms[i..].iter().cloned());
        terms.extend(other.terms[j..].iter().cloned());
        PolyQ { terms }
    }

    pub fn sub_ref(&self, other: &PolyQ) -> PolyQ {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> PolyQ {
        PolyQ {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul_ref(&self, other: &PolyQ) -> PolyQ {
        if self.is_zero() || other.is_zero() {
            return PolyQ::zero();
        }
        let mut acc: HashMap<Mono, Rat> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                let e = acc.entry(m).or_insert_with(Rat::zero);
                *e += c;
            }
        }
        Self::collect(acc)
    }

    pub fn pow(&self, e: u32) -> PolyQ {
        let mut result = PolyQ::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    /// Inverse of a single-term polynomial `c * eps^k`. Fails if the
    /// polynomial has several terms or involves a non-Laurent variable.
    fn monomial_inverse(&self, table: Option<&ParamTable>) -> Result<PolyQ> {
        if self.terms.len() != 1 {
            return Err(KovError::SubstitutionCreatesNegativePower {
                var: "<non-monomial value>".into(),
            });
        }
        let (m, c) = &self.terms[0];
        for (p, _) in m.exps() {
            if *p != EPS_ID {
                return Err(KovError::SubstitutionCreatesNegativePower {
                    var: table.map(|t| t.name(*p)).unwrap_or_else(|| p.to_string()),
                });
            }
        }
        let inv_exp = -m.exponent_of(EPS_ID);
        Ok(PolyQ::term(c.recip(), EPS_ID, inv_exp))
    }

    /// Exact substitution `param := value`, recanonicalized.
    pub fn substitute(&self, param: ParamId, value: &PolyQ) -> Result<PolyQ> {
        self.substitute_named(param, value, None)
    }

    pub fn substitute_named(
        &self,
        param: ParamId,
        value: &PolyQ,
        table: Option<&ParamTable>,
    ) -> Result<PolyQ> {
        // group by exponent of `param`, then assemble sum_e value^e * rest_e
        let mut by_exp: HashMap<i32, Vec<(Mono, Rat)>> = HashMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(param);
            let rest = Mono {
                exps: m
                    .exps()
                    .iter()
                    .copied()
                    .filter(|(p, _)| *p != param)
                    .collect(),
            };
            by_exp.entry(e).or_default().push((rest, c.clone()));
        }
        let mut exps: Vec<i32> = by_exp.keys().copied().collect();
        exps.sort_unstable();
        let mut result = PolyQ::zero();
        for e in exps {
            let part = PolyQ::from_terms(by_exp.remove(&e).unwrap());
            let factor = match e.cmp(&0) {
                Ordering::Equal => PolyQ::one(),
                Ordering::Greater => value.pow(e as u32),
                Ordering::Less => value.monomial_inverse(table)?.pow((-e) as u32),
            };
            result = result.add_ref(&part.mul_ref(&factor));
        }
        Ok(result)
    }

    /// Limit `eps -> 0`: drops terms of positive eps-degree and keeps the
    /// eps-free part. Errors if any pole in eps survives.
    pub fn epsilon_limit(&self) -> Result<PolyQ> {
        self.epsilon_limit_named(None)
    }

    pub fn epsilon_limit_named(&self, table: Option<&ParamTable>) -> Result<PolyQ> {
        let mut divergent: Vec<&(Mono, Rat)> = Vec::new();
        let mut kept: Vec<(Mono, Rat)> = Vec::new();
        for t in &self.terms {
            match t.0.exponent_of(EPS_ID).cmp(&0) {
                Ordering::Less => divergent.push(t),
                Ordering::Equal => kept.push(t.clone()),
                Ordering::Greater => {}
            }
        }
        if !divergent.is_empty() {
            let listing = divergent
                .iter()
                .map(|(m, c)| render_term(m, c, table, true))
                .collect::<Vec<_>>()
                .join(" + ");
            return Err(KovError::DivergentLimit { terms: listing });
        }
        Ok(PolyQ { terms: kept })
    }

    /// Evaluate with every parameter assigned an exact rational value.
    pub fn eval(&self, values: &HashMap<ParamId, Rat>) -> Result<Rat> {
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut acc = c.clone();
            for (p, e) in m.exps() {
                let v = values
                    .get(p)
                    .ok_or_else(|| KovError::MissingParamValue(p.to_string()))?;
                acc *= rat_pow(v, *e)?;
            }
            total += acc;
        }
        Ok(total)
    }

    /// Substitute exact rational values for a subset of parameters.
    pub fn instantiate(&self, values: &HashMap<ParamId, Rat>) -> Result<PolyQ> {
        let mut out = self.clone();
        for (p, v) in values {
            out = out.substitute(*p, &PolyQ::constant(v.clone()))?;
        }
        Ok(out)
    }

    /// If `self == lambda * other` for a nonzero rational `lambda`, return it.
    pub fn proportional_to(&self, other: &PolyQ) -> Option<Rat> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let lambda = &self.terms[0].1 / &other.terms[0].1;
        for ((ma, ca), (mb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if ma != mb || *ca != cb * &lambda {
                return None;
            }
        }
        Some(lambda)
    }

    /// Exact text form: a sum of `coeff*param^exp` products.
    pub fn render(&self, table: &ParamTable) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let piece = render_term(m, c, Some(table), i == 0);
            if i > 0 {
                if c.is_negative() {
                    out.push_str(" - ");
                } else {
                    out.push_str(" + ");
                }
            }
            out.push_str(&piece[if i > 0 && c.is_negative() { 1 } else { 0 }..]);
        }
        out
    }
}

fn render_term(m: &Mono, c: &Rat, table: Option<&ParamTable>, _leading: bool) -> String {
    let mut s = String::new();
    let one = c.abs().is_one();
    if m.is_one() || !one {
        s.push_str(&rat_str(c));
    } else if c.is_negative() {
        s.push('-');
    }
    for (k, (p, e)) in m.exps().iter().enumerate() {
        if k > 0 || (!m.is_one() && !one) {
            s.push('*');
        }
        match table {
            Some(t) => {
                let _ = write!(s, "{}", t.name(*p));
            }
            None => {
                let _ = write!(s, "p{}", p);
            }
        }
        if *e != 1 {
            let _ = write!(s, "^{}", e);
        }
    }
    s
}

fn rat_pow(v: &Rat, e: i32) -> Result<Rat> {
    if e == 0 {
        return Ok(Rat::one());
    }
    if v.is_zero() && e < 0 {
        return Err(KovError::EvalDivisionByZero);
    }
    let base = if e < 0 { v.recip() } else { v.clone() };
    let mut result = Rat::one();
    let mut b = base;
    let mut e = e.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    Ok(result)
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        self.add_ref(rhs)
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        self.sub_ref(rhs)
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        self.mul_ref(rhs)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ParamTable, ParamId, ParamId) {
        let t = ParamTable::new();
        let x = t.intern("x");
        let y = t.intern("y");
        (t, x, y)
    }

    #[test]
    fn difference_of_squares() {
        let (_t, x, _) = setup();
        let xp = PolyQ::var(x);
        let a = xp.add_ref(&PolyQ::one());
        let b = xp.sub_ref(&PolyQ::one());
        let prod = a.mul_ref(&b);
        let expected = xp.pow(2).sub_ref(&PolyQ::one());
        assert_eq!(prod, expected);
    }

    #[test]
    fn additive_identity() {
        let (_t, x, y) = setup();
        let p = PolyQ::var(x).mul_ref(&PolyQ::var(y)).add_ref(&PolyQ::int(7));
        assert_eq!(PolyQ::zero().add_ref(&p), p);
    }

    #[test]
    fn laurent_cancellation() {
        // (1/3) eps^-1 * 3 eps == 1
        let a = PolyQ::term(rat_frac(1, 3), EPS_ID, -1);
        let b = PolyQ::term(rat_i(3), EPS_ID, 1);
        assert_eq!(a.mul_ref(&b), PolyQ::one());
    }

    #[test]
    fn substitute_x_squared_with_eps_inverse() {
        let (_t, x, _) = setup();
        let p = PolyQ::var(x).pow(2);
        let einv = PolyQ::term(rat_i(1), EPS_ID, -1);
        let got = p.substitute(x, &einv).unwrap();
        assert_eq!(got, PolyQ::term(rat_i(1), EPS_ID, -2));
    }

    #[test]
    fn substitute_pole_shift() {
        // z := (1/4) eps^-3 - eps*x
        let (t, x, _) = setup();
        let z = t.intern("z");
        let value = PolyQ::term(rat_frac(1, 4), EPS_ID, -3)
            .sub_ref(&PolyQ::var(EPS_ID).mul_ref(&PolyQ::var(x)));
        let got = PolyQ::var(z).substitute(z, &value).unwrap();
        assert_eq!(got, value);
    }

    #[test]
    fn substitute_zero_kills_variable() {
        let (_t, x, y) = setup();
        let p = PolyQ::var(x).add_ref(&PolyQ::var(y));
        assert_eq!(p.substitute(y, &PolyQ::zero()).unwrap(), PolyQ::var(x));
    }

    #[test]
    fn substitute_negative_power_error() {
        let (t, x, y) = setup();
        // y appears with exponent -? no: eps^-1 substituted by x+1 fails
        let p = PolyQ::term(rat_i(1), EPS_ID, -1);
        let val = PolyQ::var(x).add_ref(&PolyQ::one());
        assert!(p.substitute(EPS_ID, &val).is_err());
        // eps^-1 := 2*y succeeds? no: inverse of 2y needs y^-1
        let err = p
            .substitute_named(EPS_ID, &PolyQ::var(y).scale(&rat_i(2)), Some(&t))
            .unwrap_err();
        match err {
            KovError::SubstitutionCreatesNegativePower { var } => assert_eq!(var, "y"),
            other => panic!("unexpected error {other:?}"),
        }
        // eps^-1 := (1/2) eps^2 is fine
        let ok = p
            .substitute(EPS_ID, &PolyQ::term(rat_frac(1, 2), EPS_ID, 2))
            .unwrap();
        assert_eq!(ok, PolyQ::term(rat_i(2), EPS_ID, -2));
    }

    #[test]
    fn epsilon_limit_examples() {
        let (t, _x, _) = setup();
        let theta = t.intern("theta");
        let g = t.intern("g");
        // 2 eps^2 g^2 + theta -> theta
        let p = PolyQ::term(rat_i(2), EPS_ID, 2)
            .mul_ref(&PolyQ::var(g).pow(2))
            .add_ref(&PolyQ::var(theta));
        assert_eq!(p.epsilon_limit().unwrap(), PolyQ::var(theta));
        // zero stays zero
        assert_eq!(PolyQ::zero().epsilon_limit().unwrap(), PolyQ::zero());
        // eps^-3 + 1 diverges
        let bad = PolyQ::term(rat_i(1), EPS_ID, -3).add_ref(&PolyQ::one());
        match bad.epsilon_limit() {
            Err(KovError::DivergentLimit { terms }) => assert!(terms.contains("eps^-3") || terms.contains("p0^-3")),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn eval_exactly() {
        let (_t, x, y) = setup();
        // (2/3) x^2 y - 5 at x = 3/2, y = -4 => (2/3)(9/4)(-4) - 5 = -11
        let p = PolyQ::term(rat_frac(2, 3), x, 2)
            .mul_ref(&PolyQ::var(y))
            .add_ref(&PolyQ::int(-5));
        let mut vals = HashMap::new();
        vals.insert(x, rat_frac(3, 2));
        vals.insert(y, rat_i(-4));
        assert_eq!(p.eval(&vals).unwrap(), rat_i(-11));
    }

    #[test]
    fn render_form() {
        let (t, x, y) = setup();
        let p = PolyQ::term(rat_frac(-3, 7), x, 2)
            .mul_ref(&PolyQ::var(y))
            .add_ref(&PolyQ::term(rat_i(1), EPS_ID, -1))
            .add_ref(&PolyQ::int(2));
        assert_eq!(p.render(&t), "-3/7*x^2*y + 2 + eps^-1");
    }
}
