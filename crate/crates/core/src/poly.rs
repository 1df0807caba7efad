//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! [`Poly`] is generic over the indeterminate type so the same arithmetic
//! serves differential polynomials (indeterminates are [`DiffVar`]s) and the
//! coefficient-symbol algebra of the Laurent elimination module.
//!
//! [`DiffVar`]: crate::diffpoly::DiffVar

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Builds the rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `n / d`. Panics if `d == 0`.
/// `a * b` without a gcd when both are integers.
pub(crate) fn mul_rat(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

/// `*a += b` without a gcd when both are integers.
pub(crate) fn add_rat(a: &mut Rational, b: &Rational) {
    if a.is_integer() && b.is_integer() {
        *a = Rational::from_integer(a.numer() + b.numer());
    } else {
        *a += b;
    }
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// An indeterminate that a derivation acts on by raising its order.
pub trait Indeterminate: Clone + Ord + std::fmt::Debug {
    /// The indeterminate one derivation step higher.
    fn derivative(&self) -> Self;
    /// Number of derivations already applied.
    fn order(&self) -> usize;
}

/// A power product of indeterminates. Zero exponents are never stored, so the
/// empty map is the monomial `1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial<V: Ord>(BTreeMap<V, u32>);

impl<V: Ord> Default for Monomial<V> {
    fn default() -> Self {
        Monomial(BTreeMap::new())
    }
}

impl<V: Ord + Clone> Monomial<V> {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: V) -> Self {
        Self::power(v, 1)
    }

    pub fn power(v: V, e: u32) -> Self {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(v, e);
        }
        Monomial(m)
    }

    /// Builds a monomial from `(variable, exponent)` pairs, merging repeats.
    pub fn from_factors<I: IntoIterator<Item = (V, u32)>>(factors: I) -> Self {
        let mut m = Monomial::one();
        for (v, e) in factors {
            m.mul_var(v, e);
        }
        m
    }

    fn mul_var(&mut self, v: V, e: u32) {
        if e > 0 {
            *self.0.entry(v).or_insert(0) += e;
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, v: &V) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    /// Factors in ascending variable order.
    pub fn factors(&self) -> impl DoubleEndedIterator<Item = (&V, u32)> {
        self.0.iter().map(|(v, e)| (v, *e))
    }

    /// The largest variable present.
    pub fn max_var(&self) -> Option<&V> {
        self.0.keys().next_back()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (v, e) in &other.0 {
            out.mul_var(v.clone(), *e);
        }
        out
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `other / self`, if exact.
    pub fn divide_into(&self, other: &Self) -> Option<Self> {
        if !self.divides(other) {
            return None;
        }
        let mut out = other.clone();
        for (v, e) in &self.0 {
            let slot = out.0.get_mut(v).expect("divisibility checked");
            *slot -= e;
            if *slot == 0 {
                out.0.remove(v);
            }
        }
        Some(out)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        Monomial(
            self.0
                .iter()
                .filter_map(|(v, e)| {
                    let m = (*e).min(other.exponent(v));
                    (m > 0).then(|| (v.clone(), m))
                })
                .collect(),
        )
    }

    /// Removes `v` and returns its exponent together with the cofactor.
    pub fn split_off(&self, v: &V) -> (u32, Self) {
        let mut rest = self.clone();
        let e = rest.0.remove(v).unwrap_or(0);
        (e, rest)
    }

    pub fn map_vars<W: Ord + Clone>(&self, mut f: impl FnMut(&V) -> W) -> Monomial<W> {
        Monomial::from_factors(self.0.iter().map(|(v, e)| (f(v), *e)))
    }
}

/// Lexicographic order with variables compared from the largest down.
impl<V: Ord> Ord for Monomial<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => {
                    if va != vb {
                        return va.cmp(vb);
                    }
                    if ea != eb {
                        return ea.cmp(eb);
                    }
                }
            }
        }
    }
}

impl<V: Ord> PartialOrd for Monomial<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in canonical sparse form: no zero coefficients, terms keyed by
/// monomial. Structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<V: Ord> {
    terms: BTreeMap<Monomial<V>, Rational>,
}

impl<V: Ord> Default for Poly<V> {
    fn default() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }
}

impl<V: Ord + Clone> Poly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: V) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial<V>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial<V>, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, keeping the canonical form.
    pub fn add_term(&mut self, m: Monomial<V>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                add_rat(e.get_mut(), &c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for non-zero rational constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial `1`.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn coefficient(&self, m: &Monomial<V>) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial<V>, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial<V>, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn variables(&self) -> BTreeSet<V> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn max_var(&self) -> Option<V> {
        self.terms.keys().filter_map(|m| m.max_var()).max().cloned()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &V) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial<V>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to `v`.
    pub fn partial(&self, v: &V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == 0 {
                continue;
            }
            let m2 = rest.mul(&Monomial::power(v.clone(), e - 1));
            out.add_term(m2, c * int(e as i64));
        }
        out
    }

    /// Replaces every occurrence of `v` with `value`.
    pub fn substitute(&self, v: &V, value: &Self) -> Self {
        self.substitute_with_quotient(v, value).0
    }

    /// Returns `(q, Q)` with `self = q + (v - value) * Q` and `q` free of `v`.
    pub fn substitute_with_quotient(&self, v: &V, value: &Self) -> (Self, Self) {
        let mut grouped: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            grouped.entry(e).or_default().add_term(rest, c.clone());
        }
        let var = Self::var(v.clone());
        let mut result = Self::zero();
        let mut quotient = Self::zero();
        for (e, coeff) in grouped {
            if e == 0 {
                result = &result + &coeff;
                continue;
            }
            result = &result + &(&coeff * &value.pow(e));
            // (v^e - r^e) / (v - r) = sum_{k<e} v^k r^(e-1-k)
            let mut geo = Self::zero();
            for k in 0..e {
                geo = &geo + &(&var.pow(k) * &value.pow(e - 1 - k));
            }
            quotient = &quotient + &(&coeff * &geo);
        }
        (result, quotient)
    }

    /// Evaluates the variables for which `f` returns a value, keeping the rest.
    pub fn partial_eval(&self, mut f: impl FnMut(&V) -> Option<Rational>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Monomial::one();
            for (v, e) in m.factors() {
                match f(v) {
                    Some(val) => coeff *= pow_rational(&val, e),
                    None => kept.mul_var(v.clone(), e),
                }
            }
            out.add_term(kept, coeff);
        }
        out
    }

    pub fn map_vars<W: Ord + Clone>(&self, mut f: impl FnMut(&V) -> W) -> Poly<W> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&mut f), c.clone())))
    }

    /// Greatest common monomial divisor of all terms (`1` for zero).
    pub fn monomial_content(&self) -> Monomial<V> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Monomial<V>) -> Option<Self> {
        let mut out = Self::zero();
        for (n, c) in &self.terms {
            out.add_term(m.divide_into(n)?, c.clone());
        }
        Some(out)
    }
}

impl<V: Indeterminate> Poly<V> {
    /// Applies the derivation: each indeterminate maps to its next
    /// derivative, rational constants map to zero.
    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.factors() {
                let (_, rest) = m.split_off(v);
                let mut m2 = rest;
                m2.mul_var(v.clone(), e - 1);
                m2.mul_var(v.derivative(), 1);
                out.add_term(m2, c * int(e as i64));
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.differentiate())
    }

    /// Highest derivative order among the indeterminates (0 for constants).
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.factors().map(|(v, _)| v.order()))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn pow_rational(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Sign of the leading coefficient, or 0 for zero.
pub fn leading_sign<V: Ord + Clone>(p: &Poly<V>) -> i32 {
    match p.leading_term() {
        Some((_, c)) if c.is_positive() => 1,
        Some(_) => -1,
        None => 0,
    }
}

impl<'a, V: Ord + Clone> Add<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: &'a Poly<V>) -> Poly<V> {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl<'a, V: Ord + Clone> Sub<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: &'a Poly<V>) -> Poly<V> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, V: Ord + Clone> Mul<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: &'a Poly<V>) -> Poly<V> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), mul_rat(c1, c2));
            }
        }
        out
    }
}

impl<V: Ord + Clone> Neg for &Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<V: Ord + Clone> $tr<Poly<V>> for Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: Poly<V>) -> Poly<V> {
                (&self).$method(&rhs)
            }
        }
        impl<'a, V: Ord + Clone> $tr<&'a Poly<V>> for Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: &'a Poly<V>) -> Poly<V> {
                (&self).$method(rhs)
            }
        }
        impl<'a, V: Ord + Clone> $tr<Poly<V>> for &'a Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: Poly<V>) -> Poly<V> {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<V: Ord + Clone> Neg for Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        -&self
    }
}
