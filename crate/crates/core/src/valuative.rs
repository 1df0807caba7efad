//! Laurent equations in `x` and `y = x'` over formal coefficient symbols.
//!
//! An equation `L = sum c x^a y^b` is stored with a left side `L` that is a
//! unit (non-zero rational constant term) and right-hand coefficients in the
//! ideal generated by the symbols. Every transformation acts on relations
//! `L - rhs` and is recorded as a [`Certificate`] that replays exactly.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{int, Indeterminate, Poly, Rational};
use crate::syntax;

/// A formal coefficient `base^(order)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CoeffSymbol {
    pub base: String,
    pub order: usize,
}

impl CoeffSymbol {
    pub fn new(base: impl Into<String>, order: usize) -> Self {
        CoeffSymbol {
            base: base.into(),
            order,
        }
    }
}

impl Indeterminate for CoeffSymbol {
    fn derivative(&self) -> Self {
        CoeffSymbol::new(self.base.clone(), self.order + 1)
    }

    fn order(&self) -> usize {
        self.order
    }
}

pub type CoeffPoly = Poly<CoeffSymbol>;

pub fn symbol(base: &str) -> CoeffPoly {
    CoeffPoly::var(CoeffSymbol::new(base, 0))
}

/// `y' = coeff * x^x_exp * y^y_exp`, i.e. a rule for `x''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRule {
    coeff: Rational,
    x_exp: i64,
    y_exp: i64,
}

impl LaurentRule {
    pub fn new(coeff: Rational, x_exp: i64, y_exp: i64) -> Self {
        LaurentRule { coeff, x_exp, y_exp }
    }

    /// `x'' = x'/x`.
    pub fn x_prime_over_x() -> Self {
        LaurentRule::new(int(1), -1, 1)
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn x_exp(&self) -> i64 {
        self.x_exp
    }

    pub fn y_exp(&self) -> i64 {
        self.y_exp
    }
}

impl fmt::Display for LaurentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::format_laurent_rule(self))
    }
}

/// One term `coeff * x^x_exp * y^y_exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTerm {
    pub coeff: CoeffPoly,
    pub x_exp: i64,
    pub y_exp: i64,
}

impl LaurentTerm {
    pub fn new(coeff: CoeffPoly, x_exp: i64, y_exp: i64) -> Self {
        LaurentTerm { coeff, x_exp, y_exp }
    }
}

/// A Laurent polynomial in `x`, `y` with [`CoeffPoly`] coefficients, keyed by
/// `(x_exp, y_exp)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(i64, i64), CoeffPoly>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(CoeffPoly::one())
    }

    pub fn constant(c: CoeffPoly) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: CoeffPoly, x_exp: i64, y_exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(x_exp, y_exp, &c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = LaurentTerm>) -> Self {
        let mut p = Self::zero();
        for t in terms {
            p.add_term(t.x_exp, t.y_exp, &t.coeff);
        }
        p
    }

    pub fn add_term(&mut self, x_exp: i64, y_exp: i64, c: &CoeffPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((x_exp, y_exp)) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let slot = e.get_mut();
                for (m, r) in c.terms() {
                    slot.add_term(m.clone(), r.clone());
                }
                if slot.is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, x_exp: i64, y_exp: i64) -> CoeffPoly {
        self.terms.get(&(x_exp, y_exp)).cloned().unwrap_or_default()
    }

    /// `(x_exp, y_exp, coeff)` in increasing key order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, &CoeffPoly)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    /// Display order: terms with the largest power of `y` (in numerator or
    /// denominator) first, then decreasing power of `x`.
    pub fn terms_descending(&self) -> impl Iterator<Item = (i64, i64, &CoeffPoly)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by_key(|&(a, b, _)| std::cmp::Reverse((b.abs(), b, a)));
        v.into_iter()
    }

    pub fn to_terms(&self) -> Vec<LaurentTerm> {
        self.terms()
            .map(|(a, b, c)| LaurentTerm::new(c.clone(), a, b))
            .collect()
    }

    pub fn mul_coeff(&self, c: &CoeffPoly) -> Self {
        let mut out = Self::zero();
        for (a, b, d) in self.terms() {
            out.add_term(a, b, &(d * c));
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.mul_coeff(&CoeffPoly::constant(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Inverse of a single term with a non-zero rational coefficient.
    pub fn monomial_inverse(&self) -> Option<Self> {
        let mut it = self.terms();
        match (it.next(), it.next()) {
            (Some((a, b, c)), None) if c.is_constant() => Some(Self::monomial(
                CoeffPoly::constant(c.constant_term().recip()),
                -a,
                -b,
            )),
            _ => None,
        }
    }

    /// Terms with `y_exp == 0`.
    pub fn y_free_part(&self) -> Self {
        self.filter(|_, b| b == 0)
    }

    pub fn filter(&self, mut keep: impl FnMut(i64, i64) -> bool) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, b), _)| keep(a, b))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Applies the derivation with `x' = y` and `y' = rule`.
    pub fn differentiate(&self, rule: &LaurentRule) -> Self {
        let mut out = Self::zero();
        for (a, b, c) in self.terms() {
            out.add_term(a, b, &c.differentiate());
            if a != 0 {
                out.add_term(a - 1, b + 1, &c.scale(&int(a)));
            }
            if b != 0 {
                out.add_term(a + rule.x_exp, b - 1 + rule.y_exp, &c.scale(&(int(b) * &rule.coeff)));
            }
        }
        out
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (a, b, c) in rhs.terms() {
            out.add_term(a, b, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &-rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, b, c) in self.terms() {
            for (d, e, f) in rhs.terms() {
                out.add_term(a + d, b + e, &(c * f));
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::format_laurent(self))
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&syntax::format_laurent(self))
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        syntax::parse_laurent(&text).map_err(serde::de::Error::custom)
    }
}

fn in_symbol_ideal(c: &CoeffPoly) -> bool {
    c.constant_term().is_zero()
}

/// `lhs = rhs` with `rhs` free of an `x^0 y^0` term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentEquation {
    lhs: CoeffPoly,
    rhs: LaurentPoly,
}

impl LaurentEquation {
    /// The equation `1 = sum terms`. A summand free of `x` and `y` is moved
    /// to the left, leaving the unit `1 - s` there.
    pub fn new(terms: impl IntoIterator<Item = LaurentTerm>) -> Result<Self> {
        let rhs = LaurentPoly::from_terms(terms);
        if let Some((a, b, _)) = rhs.terms().find(|(_, _, c)| !in_symbol_ideal(c)) {
            return Err(Error::InvalidEquation(format!(
                "coefficient of x^{a}*(x')^{b} has a non-zero rational part"
            )));
        }
        Ok(Self::from_relation(&LaurentPoly::one() - &rhs))
    }

    /// The equation whose relation `lhs - rhs` is `rel`.
    pub fn from_relation(rel: LaurentPoly) -> Self {
        let lhs = rel.coefficient(0, 0);
        let rhs = -&rel.filter(|a, b| (a, b) != (0, 0));
        LaurentEquation { lhs, rhs }
    }

    pub fn lhs(&self) -> &CoeffPoly {
        &self.lhs
    }

    pub fn rhs(&self) -> &LaurentPoly {
        &self.rhs
    }

    /// `lhs - rhs`.
    pub fn relation(&self) -> LaurentPoly {
        &LaurentPoly::constant(self.lhs.clone()) - &self.rhs
    }

    fn is_local(&self) -> bool {
        !self.lhs.constant_term().is_zero() && self.rhs.terms().all(|(_, _, c)| in_symbol_ideal(c))
    }

    /// `Some(u)` when every term is of type I; `u` is the largest power of `y`.
    pub fn type_i_degree(&self) -> Option<u32> {
        if !self.is_local() {
            return None;
        }
        let mut u = 0;
        for (a, b, _) in self.rhs.terms() {
            let ok = (b > 0 && b < -a) || (b == 0 && a <= 0);
            if !ok {
                return None;
            }
            u = u.max(b as u32);
        }
        Some(u)
    }

    /// `Some(t)` when every term is of type II; `t` is the largest power of
    /// `y` in a denominator.
    pub fn type_ii_degree(&self) -> Option<u32> {
        if !self.is_local() {
            return None;
        }
        let mut t = 0;
        for (a, b, _) in self.rhs.terms() {
            let ok = (b < 0 && a < -b) || (b == 0 && a <= 0);
            if !ok {
                return None;
            }
            t = t.max((-b) as u32);
        }
        Some(t)
    }

    /// True when `y` is absent and `x` occurs only in denominators.
    pub fn is_denominator_only(&self) -> bool {
        self.rhs.terms().all(|(a, b, _)| b == 0 && a <= 0)
    }
}

impl fmt::Display for LaurentEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::format_laurent_equation(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    TypeI { u: u32 },
    TypeII { t: u32 },
    Neither,
}

/// Type I is reported first, so a `y`-free equation classifies as type I
/// with `u = 0`; it is also of type II with `t = 0`.
pub fn classify(eq: &LaurentEquation) -> Classification {
    if let Some(u) = eq.type_i_degree() {
        Classification::TypeI { u }
    } else if let Some(t) = eq.type_ii_degree() {
        Classification::TypeII { t }
    } else {
        Classification::Neither
    }
}

/// One operation of a certificate. Each step appends a relation to the
/// working list; `of`, `left` and `right` index into that list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Input { index: usize },
    Differentiate { of: usize },
    Multiply { of: usize, by: LaurentPoly },
    Add { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "rule_text")]
    pub rule: LaurentRule,
    pub steps: Vec<Step>,
}

mod rule_text {
    use super::*;

    pub fn serialize<S: Serializer>(rule: &LaurentRule, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&syntax::format_laurent_rule(rule))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<LaurentRule, D::Error> {
        let text = String::deserialize(d)?;
        syntax::parse_laurent_rule(&text).map_err(serde::de::Error::custom)
    }
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedStep {
            index: 0,
            reason: e.to_string(),
        })
    }
}

/// Records steps while computing the relation each one produces.
struct Recorder {
    rule: LaurentRule,
    steps: Vec<Step>,
    rels: Vec<LaurentPoly>,
}

impl Recorder {
    fn new(rule: LaurentRule) -> Self {
        Recorder {
            rule,
            steps: Vec::new(),
            rels: Vec::new(),
        }
    }

    fn push(&mut self, step: Step, rel: LaurentPoly) -> usize {
        self.steps.push(step);
        self.rels.push(rel);
        self.rels.len() - 1
    }

    fn input(&mut self, index: usize, eq: &LaurentEquation) -> usize {
        self.push(Step::Input { index }, eq.relation())
    }

    fn differentiate(&mut self, of: usize) -> usize {
        let rel = self.rels[of].differentiate(&self.rule);
        self.push(Step::Differentiate { of }, rel)
    }

    fn multiply(&mut self, of: usize, by: LaurentPoly) -> usize {
        let rel = &self.rels[of] * &by;
        self.push(Step::Multiply { of, by }, rel)
    }

    fn add(&mut self, left: usize, right: usize) -> usize {
        let rel = &self.rels[left] + &self.rels[right];
        self.push(Step::Add { left, right }, rel)
    }

    fn equation(&self, index: usize) -> LaurentEquation {
        LaurentEquation::from_relation(self.rels[index].clone())
    }

    fn finish(self) -> Certificate {
        Certificate {
            rule: self.rule,
            steps: self.steps,
        }
    }
}

/// Replays `cert` on `inputs` and compares the final relation with the
/// relation of `output`. With no steps the first input is compared.
pub fn verify_certificate(inputs: &[LaurentEquation], cert: &Certificate, output: &LaurentEquation) -> Result<bool> {
    let mut rels: Vec<LaurentPoly> = Vec::with_capacity(cert.steps.len());
    for (i, step) in cert.steps.iter().enumerate() {
        let get = |k: usize| {
            rels.get(k).ok_or_else(|| Error::MalformedStep {
                index: i,
                reason: format!("refers to relation {k}, only {} available", rels.len()),
            })
        };
        let rel = match step {
            Step::Input { index } => inputs
                .get(*index)
                .ok_or_else(|| Error::MalformedStep {
                    index: i,
                    reason: format!("input {index} does not exist"),
                })?
                .relation(),
            Step::Differentiate { of } => get(*of)?.differentiate(&cert.rule),
            Step::Multiply { of, by } => get(*of)? * by,
            Step::Add { left, right } => get(*left)? + get(*right)?,
        };
        rels.push(rel);
    }
    let last = match rels.pop() {
        Some(r) => r,
        None => match inputs.first() {
            Some(eq) => eq.relation(),
            None => {
                return Err(Error::MalformedStep {
                    index: 0,
                    reason: "no steps and no inputs".into(),
                })
            }
        },
    };
    Ok(last == output.relation())
}

/// The result of [`combine`] with the `(u, t)` pair before each iteration
/// and after the last one.
#[derive(Clone, Debug)]
pub struct Combination {
    pub equation: LaurentEquation,
    pub certificate: Certificate,
    pub trace: Vec<(u32, u32)>,
}

/// Combines a type I and a type II equation into one with `y` absent and `x`
/// only in denominators.
pub fn combine(eq1: &LaurentEquation, eq2: &LaurentEquation) -> Result<Combination> {
    let mut u = eq1.type_i_degree().ok_or(Error::NotTypeI)?;
    let mut t = eq2.type_ii_degree().ok_or(Error::NotTypeII)?;
    let mut rec = Recorder::new(LaurentRule::x_prime_over_x());
    let mut i1 = rec.input(0, eq1);
    let mut i2 = rec.input(1, eq2);
    let mut e1 = eq1.clone();
    let mut e2 = eq2.clone();
    let mut trace = vec![(u, t)];
    while u > 0 && t > 0 {
        if u <= t {
            // (L1 - B1) = y^u * (...): multiply the type II equation by
            // L1 - B1 and trade its y^-s, s >= u, terms for type I terms
            let unit = &LaurentPoly::constant(e1.lhs.clone()) - &e1.rhs.y_free_part();
            let high = e2.rhs.filter(|_, b| -b >= u as i64);
            let a = rec.multiply(i2, unit);
            let b = rec.multiply(i1, high);
            i2 = rec.add(a, b);
            e2 = rec.equation(i2);
            t = e2.type_ii_degree().expect("type II is preserved");
        } else {
            let unit = &LaurentPoly::constant(e2.lhs.clone()) - &e2.rhs.y_free_part();
            let high = e1.rhs.filter(|_, b| b >= t as i64);
            let a = rec.multiply(i1, unit);
            let b = rec.multiply(i2, high);
            i1 = rec.add(a, b);
            e1 = rec.equation(i1);
            u = e1.type_i_degree().expect("type I is preserved");
        }
        trace.push((u, t));
    }
    let equation = if u == 0 { e1 } else { e2 };
    let last = if u == 0 { i1 } else { i2 };
    let mut certificate = rec.finish();
    certificate.steps.truncate(last + 1);
    Ok(Combination {
        equation,
        certificate,
        trace,
    })
}

/// `0 = ...`: the derivative of the relation of `eq` under `rule`.
pub fn differentiate_eq(eq: &LaurentEquation, rule: &LaurentRule) -> LaurentEquation {
    LaurentEquation::from_relation(eq.relation().differentiate(rule))
}

/// The result of [`derive_type2`] with the targeted `(y_exp, -x_exp)` of
/// each iteration.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub equation: LaurentEquation,
    pub certificate: Certificate,
    pub targets: Vec<(i64, i64)>,
}

/// Eliminates every positive power of `y = x'` from a type I equation using
/// `x'' = x'/x`, producing a type II equation.
pub fn derive_type2(eq: &LaurentEquation, rule: &LaurentRule) -> Result<Derivation> {
    if *rule != LaurentRule::x_prime_over_x() {
        return Err(Error::UnsupportedRule);
    }
    eq.type_i_degree().ok_or(Error::NotTypeI)?;
    let mut rec = Recorder::new(rule.clone());
    let mut cur = rec.input(0, eq);
    let mut e = eq.clone();
    let mut targets = Vec::new();
    while let Some((j, i)) = e
        .rhs
        .terms()
        .filter(|&(_, b, _)| b > 0)
        .map(|(a, b, _)| (b, -a))
        .max()
    {
        targets.push((j, i));
        // new = L*rel + (x/(I y)) * (L*d(rel) - L'*rel)
        let l = e.lhs.clone();
        let dl = l.differentiate();
        let step = LaurentPoly::monomial(CoeffPoly::constant(Rational::new(1.into(), i.into())), 1, -1);
        let by_rel = &LaurentPoly::constant(l.clone()) - &step.mul_coeff(&dl);
        let by_drel = step.mul_coeff(&l);
        let d = rec.differentiate(cur);
        let a = rec.multiply(cur, by_rel);
        let b = rec.multiply(d, by_drel);
        cur = rec.add(a, b);
        e = rec.equation(cur);
    }
    let certificate = rec.finish();
    debug_assert!(e.type_ii_degree().is_some());
    Ok(Derivation {
        equation: e,
        certificate,
        targets,
    })
}
