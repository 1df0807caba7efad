//! Ordinary differential polynomials over the rationals.
//!
//! Derivatives are ranked orderly: first by derivative order, then by
//! variable index. Leaders, separants and the lexicographic term order all
//! follow this ranking.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Indeterminate, Poly};

/// The `order`-th derivative of indeterminate number `var`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DiffVar {
    pub var: usize,
    pub order: usize,
}

impl DiffVar {
    pub const fn new(var: usize, order: usize) -> Self {
        DiffVar { var, order }
    }
}

impl Ord for DiffVar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.order, self.var).cmp(&(other.order, other.var))
    }
}

impl PartialOrd for DiffVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Indeterminate for DiffVar {
    fn derivative(&self) -> Self {
        DiffVar::new(self.var, self.order + 1)
    }

    fn order(&self) -> usize {
        self.order
    }
}

pub type DiffPoly = Poly<DiffVar>;

/// The polynomial consisting of the single derivative `var^(order)`.
pub fn dvar(var: usize, order: usize) -> DiffPoly {
    DiffPoly::var(DiffVar::new(var, order))
}

/// The highest-ranked derivative present in `p`.
pub fn leader(p: &DiffPoly) -> Result<DiffVar> {
    p.max_var().ok_or(Error::ConstantInput)
}

/// Partial derivative of `p` with respect to its leader.
pub fn separant(p: &DiffPoly) -> Result<DiffPoly> {
    let u = leader(p)?;
    Ok(p.partial(&u))
}

/// Largest index of any indeterminate occurring in `p`.
pub fn max_var_index(p: &DiffPoly) -> Option<usize> {
    p.variables().iter().map(|v| v.var).max()
}

/// A solved equation `lhs = rhs` used as a left-to-right rewrite, where `lhs`
/// is a single derivative and `rhs` is free of it and of every higher
/// derivative of the same indeterminate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    lhs: DiffVar,
    rhs: DiffPoly,
}

impl RewriteRule {
    pub fn new(lhs: DiffVar, rhs: DiffPoly) -> Result<Self> {
        if let Some(bad) = rhs
            .variables()
            .into_iter()
            .find(|v| v.var == lhs.var && v.order >= lhs.order)
        {
            return Err(Error::InvalidRule(format!(
                "right-hand side contains derivative of order {} of the solved variable",
                bad.order
            )));
        }
        Ok(RewriteRule { lhs, rhs })
    }

    pub fn lhs(&self) -> DiffVar {
        self.lhs
    }

    pub fn rhs(&self) -> &DiffPoly {
        &self.rhs
    }

    /// `lhs - rhs`, the differential polynomial the rule solves.
    pub fn relation(&self) -> DiffPoly {
        &DiffPoly::var(self.lhs) - &self.rhs
    }

    fn is_reducible(&self, v: &DiffVar) -> bool {
        v.var == self.lhs.var && v.order >= self.lhs.order
    }
}

/// Result of rewriting together with the witness that the difference lies in
/// the ideal of prolongations: `input - result = sum_k cofactors[k] * d^k(rule)`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub result: DiffPoly,
    pub cofactors: Vec<DiffPoly>,
}

struct Prolongation {
    rhs: DiffPoly,
    // v_j - rhs_j = sum_k combo[k] * d^k(relation)
    combo: Vec<DiffPoly>,
}

fn add_at(v: &mut Vec<DiffPoly>, k: usize, p: &DiffPoly) {
    if v.len() <= k {
        v.resize(k + 1, DiffPoly::zero());
    }
    v[k] = &v[k] + p;
}

fn extend_prolongations(rule: &RewriteRule, table: &mut Vec<Prolongation>, upto: usize) {
    while table.len() <= upto {
        let prev = table.last().expect("table seeded with the rule itself");
        let mut combo = Vec::new();
        for (k, a) in prev.combo.iter().enumerate() {
            add_at(&mut combo, k, &a.differentiate());
            add_at(&mut combo, k + 1, a);
        }
        let (rhs, quotient) = prev
            .rhs
            .differentiate()
            .substitute_with_quotient(&rule.lhs, &rule.rhs);
        add_at(&mut combo, 0, &quotient);
        table.push(Prolongation { rhs, combo });
    }
}

/// Rewrites every derivative of the rule's indeterminate of order at least
/// the rule's order, highest first, using the prolonged rule.
pub fn reduce(p: &DiffPoly, rule: &RewriteRule) -> DiffPoly {
    reduce_certified(p, rule).result
}

/// [`reduce`], additionally returning the cofactors of the prolongations.
pub fn reduce_certified(p: &DiffPoly, rule: &RewriteRule) -> Reduction {
    let mut table = vec![Prolongation {
        rhs: rule.rhs.clone(),
        combo: vec![DiffPoly::one()],
    }];
    let mut cur = p.clone();
    let mut cofactors: Vec<DiffPoly> = Vec::new();
    while let Some(v) = cur
        .variables()
        .into_iter()
        .rev()
        .find(|v| rule.is_reducible(v))
    {
        let j = v.order - rule.lhs.order;
        extend_prolongations(rule, &mut table, j);
        let (next, quotient) = cur.substitute_with_quotient(&v, &table[j].rhs);
        for (k, a) in table[j].combo.iter().enumerate() {
            add_at(&mut cofactors, k, &(&quotient * a));
        }
        cur = next;
    }
    while cofactors.last().is_some_and(DiffPoly::is_zero) {
        cofactors.pop();
    }
    Reduction {
        result: cur,
        cofactors,
    }
}
