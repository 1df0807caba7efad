//! Delta-homogenization and projective evaluation.
//!
//! Homogenizing substitutes `x_i -> x_i / x_h`, expands every derivative of
//! the quotient formally and clears denominators with the least power of
//! `x_h`. Homogeneity is tested against its definition by scaling with a
//! fresh differential indeterminate, so derivative cross terms are accounted
//! for exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::diffpoly::{max_var_index, DiffPoly, DiffVar};
use crate::error::{Error, Result};
use crate::poly::{int, Monomial, Rational};

/// A point of projective space with a constant representative: every
/// derivative of every coordinate is taken to be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePoint {
    coords: Vec<Rational>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::ZeroPoint);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub homogeneous: bool,
    /// The degree `d` with `f(lambda x) = lambda^d f(x)`, when homogeneous.
    pub degree: Option<u32>,
}

/// Delta-homogenization of `p` with respect to the new coordinate `hom_var`.
pub fn delta_homogenize(p: &DiffPoly, hom_var: usize) -> Result<DiffPoly> {
    delta_homogenize_with_degree(p, hom_var).map(|(q, _)| q)
}

/// Like [`delta_homogenize`], also returning the exponent of `x_h` used to
/// clear denominators, which is the homogeneity degree of the result.
pub fn delta_homogenize_with_degree(p: &DiffPoly, hom_var: usize) -> Result<(DiffPoly, u32)> {
    let vars = p.variables().iter().map(|v| v.var).collect();
    delta_homogenize_in(p, hom_var, &vars)
}

/// Homogenizes only the indeterminates in `affine_vars`; the others are
/// treated as coefficients. Returns the result and the clearing exponent.
pub fn delta_homogenize_in(
    p: &DiffPoly,
    hom_var: usize,
    affine_vars: &BTreeSet<usize>,
) -> Result<(DiffPoly, u32)> {
    if p.variables().iter().any(|v| v.var == hom_var) {
        return Err(Error::HomVarOccurs);
    }
    let h = DiffVar::new(hom_var, 0);
    let h_poly = DiffPoly::var(h);
    let h_prime = DiffPoly::var(DiffVar::new(hom_var, 1));

    // numerators[i][k]: d^k(x_i / h) = numerators[i][k] / h^(k+1)
    let mut numerators: BTreeMap<usize, Vec<DiffPoly>> = BTreeMap::new();
    for v in p.variables().into_iter().filter(|v| affine_vars.contains(&v.var)) {
        let table = numerators
            .entry(v.var)
            .or_insert_with(|| vec![DiffPoly::var(DiffVar::new(v.var, 0))]);
        while table.len() <= v.order {
            let k = table.len() - 1;
            let n = &table[k];
            let next = &(&n.differentiate() * &h_poly) - &(n * &h_prime).scale(&int(k as i64 + 1));
            table.push(next);
        }
    }

    let weight = |m: &Monomial<DiffVar>| -> u32 {
        m.factors()
            .filter(|(v, _)| affine_vars.contains(&v.var))
            .map(|(v, e)| e * (v.order as u32 + 1))
            .sum()
    };
    let top = p.terms().map(|(m, _)| weight(m)).max().unwrap_or(0);

    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        let mut term = DiffPoly::constant(c.clone());
        for (v, e) in m.factors() {
            let factor = match numerators.get(&v.var) {
                Some(table) => table[v.order].pow(e),
                None => DiffPoly::var(*v).pow(e),
            };
            term = &term * &factor;
        }
        term = term.mul_monomial(&int(1), &Monomial::power(h, top - weight(m)));
        out = &out + &term;
    }
    let common = out.monomial_content().exponent(&h);
    let out = out
        .div_monomial(&Monomial::power(h, common))
        .expect("common power divides every term");
    Ok((out, top - common))
}

/// Tests `f(lambda x) = lambda^d f(x)` with `lambda` a fresh differential
/// indeterminate, scaling every variable of `p`.
pub fn is_delta_homogeneous(p: &DiffPoly) -> HomogeneityReport {
    let vars = p.variables().iter().map(|v| v.var).collect();
    is_delta_homogeneous_in(p, &vars)
}

/// Homogeneity test where only the indeterminates in `proj_vars` are scaled.
pub fn is_delta_homogeneous_in(p: &DiffPoly, proj_vars: &BTreeSet<usize>) -> HomogeneityReport {
    if p.is_zero() {
        return HomogeneityReport {
            homogeneous: true,
            degree: Some(0),
        };
    }
    let lambda = max_var_index(p)
        .into_iter()
        .chain(proj_vars.iter().copied())
        .max()
        .unwrap_or(0)
        + 1;
    let scaled_var = |v: &DiffVar| -> DiffPoly {
        // d^k(lambda x) = sum_j C(k, j) lambda^(j) x^(k-j)
        let mut acc = DiffPoly::zero();
        let mut binom: i64 = 1;
        for j in 0..=v.order {
            let term = &DiffPoly::var(DiffVar::new(lambda, j)) * &DiffPoly::var(DiffVar::new(v.var, v.order - j));
            acc = &acc + &term.scale(&int(binom));
            binom = binom * (v.order - j) as i64 / (j as i64 + 1);
        }
        acc
    };

    let mut cache: BTreeMap<DiffVar, DiffPoly> = BTreeMap::new();
    let mut q = DiffPoly::zero();
    for (m, c) in p.terms() {
        let mut term = DiffPoly::constant(c.clone());
        for (v, e) in m.factors() {
            let factor = if proj_vars.contains(&v.var) {
                cache.entry(*v).or_insert_with(|| scaled_var(v)).pow(e)
            } else {
                DiffPoly::var(*v).pow(e)
            };
            term = &term * &factor;
        }
        q = &q + &term;
    }

    let lam0 = DiffVar::new(lambda, 0);
    let not_homogeneous = HomogeneityReport {
        homogeneous: false,
        degree: None,
    };
    let Some((lead, _)) = q.leading_term() else {
        return not_homogeneous;
    };
    if lead.factors().any(|(v, _)| v.var == lambda && v.order > 0) {
        return not_homogeneous;
    }
    let d = lead.exponent(&lam0);
    let expected = p.mul_monomial(&int(1), &Monomial::power(lam0, d));
    if q == expected {
        HomogeneityReport {
            homogeneous: true,
            degree: Some(d),
        }
    } else {
        not_homogeneous
    }
}

/// Value of `p` at a constant representative of `pt`.
pub fn evaluate_at(p: &DiffPoly, pt: &ProjectivePoint) -> Result<Rational> {
    let len = pt.coords.len();
    if let Some(v) = p.variables().into_iter().find(|v| v.var >= len) {
        return Err(Error::IndexOutOfRange { index: v.var, len });
    }
    let value = p.partial_eval(|v| {
        Some(if v.order == 0 {
            pt.coords[v.var].clone()
        } else {
            Rational::zero()
        })
    });
    Ok(value.constant_term())
}

/// Sets `hom_var` to `chart_value` and all of its derivatives to zero.
pub fn dehomogenize(p: &DiffPoly, hom_var: usize, chart_value: &Rational) -> DiffPoly {
    p.partial_eval(|v| {
        (v.var == hom_var).then(|| {
            if v.order == 0 {
                chart_value.clone()
            } else {
                Rational::zero()
            }
        })
    })
}
