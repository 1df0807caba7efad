//! Order-truncated differential elimination.
//!
//! Generators are prolonged up to an order bound, every derivative up to that
//! bound becomes an independent algebraic indeterminate, and a block
//! elimination order isolates the polynomials in the kept variables.
//!
//! Results are sound but not complete: every returned generator lies in the
//! differential elimination ideal, yet a finite bound may miss generators
//! that only appear after further prolongation.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::diffpoly::{DiffPoly, DiffVar};
use crate::error::{Error, Result};
use crate::groebner::{groebner, is_member, AlgebraicPoly, BlockOrder};
use crate::homogenize::is_delta_homogeneous_in;
use crate::poly::Monomial;

/// Generators of a differential ideal with a split into variables to
/// eliminate and variables to keep, plus the prolongation order bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    pub generators: Vec<DiffPoly>,
    pub eliminate: BTreeSet<usize>,
    pub keep: BTreeSet<usize>,
    pub order_bound: usize,
}

impl IdealPresentation {
    /// Builds and validates a presentation. Without an explicit bound the
    /// highest generator order plus one is used.
    pub fn new(
        generators: Vec<DiffPoly>,
        eliminate: BTreeSet<usize>,
        keep: BTreeSet<usize>,
        order_bound: Option<usize>,
    ) -> Result<Self> {
        let max_order = generators.iter().map(DiffPoly::order).max().unwrap_or(0);
        let pres = IdealPresentation {
            generators,
            eliminate,
            keep,
            order_bound: order_bound.unwrap_or(max_order + 1),
        };
        pres.validate()?;
        Ok(pres)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.eliminate.intersection(&self.keep).next() {
            return Err(Error::InvalidPresentation(format!(
                "variable {v} is both eliminated and kept"
            )));
        }
        for g in &self.generators {
            if let Some(v) = g
                .variables()
                .iter()
                .find(|v| !self.eliminate.contains(&v.var) && !self.keep.contains(&v.var))
            {
                return Err(Error::InvalidPresentation(format!(
                    "variable {} is neither eliminated nor kept",
                    v.var
                )));
            }
        }
        check_bound(&self.generators, self.order_bound)
    }

    fn all_vars(&self) -> BTreeSet<usize> {
        self.eliminate.union(&self.keep).copied().collect()
    }

    fn fresh_var(&self) -> usize {
        self.all_vars()
            .into_iter()
            .chain(self.generators.iter().flat_map(|g| g.variables().into_iter().map(|v| v.var)))
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Adds the inequation `g != 0` as `g t - 1` with a fresh eliminated
    /// variable `t`, returning the index of `t`.
    pub fn saturate(&mut self, g: &DiffPoly) -> usize {
        let t = self.fresh_var();
        self.generators.push(saturation_generator(g, t));
        self.eliminate.insert(t);
        t
    }
}

fn check_bound(gens: &[DiffPoly], bound: usize) -> Result<()> {
    let needed = gens.iter().map(DiffPoly::order).max().unwrap_or(0);
    if needed > bound {
        return Err(Error::BoundTooSmall { bound, needed });
    }
    Ok(())
}

/// The generators together with all their derivatives of order at most
/// `order_bound`.
pub fn prolong(gens: &[DiffPoly], order_bound: usize) -> Result<Vec<DiffPoly>> {
    check_bound(gens, order_bound)?;
    let mut out = Vec::new();
    for g in gens {
        let mut cur = g.clone();
        out.push(cur.clone());
        if g.is_constant() {
            continue;
        }
        for _ in g.order()..order_bound {
            cur = cur.differentiate();
            out.push(cur.clone());
        }
    }
    Ok(out)
}

/// Assigns one algebraic variable to each derivative in `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarLayout {
    vars: Vec<DiffVar>,
    index: BTreeMap<DiffVar, usize>,
}

impl VarLayout {
    pub fn new(vars: Vec<DiffVar>) -> Self {
        let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        VarLayout { vars, index }
    }

    /// All derivatives of the given indeterminates up to `bound`, highest
    /// ranked first.
    pub fn block(indices: &BTreeSet<usize>, bound: usize) -> Vec<DiffVar> {
        let mut vars: Vec<DiffVar> = indices
            .iter()
            .flat_map(|&i| (0..=bound).map(move |k| DiffVar::new(i, k)))
            .collect();
        vars.sort_by(|a, b| b.cmp(a));
        vars
    }

    pub fn vars(&self) -> &[DiffVar] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn encode(&self, p: &DiffPoly) -> Result<AlgebraicPoly> {
        let n = self.vars.len();
        let mut out = AlgebraicPoly::zero(n);
        for (m, c) in p.terms() {
            let mut e = vec![0u32; n];
            for (v, k) in m.factors() {
                let Some(&i) = self.index.get(v) else {
                    let bound = self.vars.iter().map(|v| v.order).max().unwrap_or(0);
                    return Err(Error::BoundTooSmall {
                        bound,
                        needed: v.order,
                    });
                };
                e[i] = k;
            }
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    pub fn decode(&self, p: &AlgebraicPoly) -> DiffPoly {
        DiffPoly::from_terms(p.terms().map(|(e, c)| {
            let m = Monomial::from_factors(
                e.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (self.vars[i], k)),
            );
            (m, c.clone())
        }))
    }
}

/// Renames derivatives to algebraic variables. The layout covers every
/// indeterminate occurring in `gens` at all orders up to `order_bound`.
pub fn to_algebraic(gens: &[DiffPoly], order_bound: usize) -> Result<(VarLayout, Vec<AlgebraicPoly>)> {
    check_bound(gens, order_bound)?;
    let indices: BTreeSet<usize> = gens
        .iter()
        .flat_map(|g| g.variables().into_iter().map(|v| v.var))
        .collect();
    let layout = VarLayout::new(VarLayout::block(&indices, order_bound));
    let polys = gens.iter().map(|g| layout.encode(g)).collect::<Result<_>>()?;
    Ok((layout, polys))
}

/// Inverse of [`to_algebraic`].
pub fn from_algebraic(layout: &VarLayout, polys: &[AlgebraicPoly]) -> Vec<DiffPoly> {
    polys.iter().map(|p| layout.decode(p)).collect()
}

/// Generators of a truncated elimination ideal, in kept variables only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElimResult {
    pub generators: Vec<DiffPoly>,
    pub order_bound_used: usize,
    pub has_unit: bool,
    keep_vars: BTreeSet<usize>,
    reduced_basis: bool,
}

impl ElimResult {
    /// Wraps an arbitrary list of generators, e.g. a hand-picked presentation
    /// of an elimination ideal.
    pub fn from_generators(generators: Vec<DiffPoly>, order_bound: usize) -> Self {
        let keep_vars = generators
            .iter()
            .flat_map(|g| g.variables().into_iter().map(|v| v.var))
            .collect();
        let has_unit = generators.iter().any(|g| g.is_constant() && !g.is_zero());
        ElimResult {
            generators,
            order_bound_used: order_bound,
            has_unit,
            keep_vars,
            reduced_basis: false,
        }
    }

    fn layout_for(&self, p: &DiffPoly) -> VarLayout {
        let mut indices = self.keep_vars.clone();
        indices.extend(p.variables().into_iter().map(|v| v.var));
        let bound = self.order_bound_used.max(p.order());
        VarLayout::new(VarLayout::block(&indices, bound))
    }

    /// Membership of `p` in the ideal generated by the result, decided by a
    /// normal form with respect to a Gröbner basis.
    pub fn contains(&self, p: &DiffPoly) -> bool {
        let layout = self.layout_for(p);
        let order = BlockOrder::grevlex(layout.len());
        let encoded: Vec<AlgebraicPoly> = self
            .generators
            .iter()
            .map(|g| layout.encode(g).expect("layout covers generators"))
            .collect();
        let standard = layout.vars() == VarLayout::block(&self.keep_vars, self.order_bound_used);
        let basis = if self.reduced_basis && standard {
            encoded
        } else {
            groebner(&encoded, &order)
        };
        is_member(&layout.encode(p).expect("layout covers p"), &basis, &order)
    }
}

fn elimination_layout(elim: Vec<DiffVar>, keep: Vec<DiffVar>) -> (VarLayout, BlockOrder) {
    let order = BlockOrder::elimination(elim.len(), keep.len());
    let mut vars = elim;
    vars.extend(keep);
    (VarLayout::new(vars), order)
}

/// Reduced basis elements that only involve the trailing keep block.
fn keep_part(gb: &[AlgebraicPoly], layout: &VarLayout, order: &BlockOrder) -> Vec<DiffPoly> {
    let keep = order.block(1);
    gb.iter()
        .filter(|g| g.only_uses(keep.clone()))
        .map(|g| layout.decode(g))
        .collect()
}

fn finish(generators: Vec<DiffPoly>, pres: &IdealPresentation) -> ElimResult {
    let has_unit = generators.iter().any(|g| g.is_constant() && !g.is_zero());
    ElimResult {
        generators,
        order_bound_used: pres.order_bound,
        has_unit,
        keep_vars: pres.keep.clone(),
        reduced_basis: true,
    }
}

/// Truncated elimination ideal of the prolonged presentation.
pub fn elim_ideal(pres: &IdealPresentation) -> Result<ElimResult> {
    pres.validate()?;
    let prolonged = prolong(&pres.generators, pres.order_bound)?;
    let (layout, order) = elimination_layout(
        VarLayout::block(&pres.eliminate, pres.order_bound),
        VarLayout::block(&pres.keep, pres.order_bound),
    );
    let polys: Vec<AlgebraicPoly> = prolonged
        .iter()
        .map(|g| layout.encode(g))
        .collect::<Result<_>>()?;
    let gb = groebner(&polys, &order);
    Ok(finish(keep_part(&gb, &layout, &order), pres))
}

/// `g t - 1`: a zero of this polynomial is a point where `g` is invertible.
pub fn saturation_generator(g: &DiffPoly, t: usize) -> DiffPoly {
    &(g * &DiffPoly::var(DiffVar::new(t, 0))) - &DiffPoly::one()
}

/// Truncated projective differential elimination ideal: the kept part of the
/// intersection over `proj_vars` of the saturations by each coordinate.
pub fn projective_elim_ideal(
    pres: &IdealPresentation,
    proj_vars: &BTreeSet<usize>,
) -> Result<ElimResult> {
    pres.validate()?;
    if proj_vars.is_empty() || !proj_vars.is_subset(&pres.eliminate) {
        return Err(Error::InvalidPresentation(
            "projective variables must be a non-empty subset of the eliminated ones".into(),
        ));
    }
    for g in &pres.generators {
        if !is_delta_homogeneous_in(g, proj_vars).homogeneous {
            return Err(Error::NotHomogeneous(format!("{g:?}")));
        }
    }
    let prolonged = prolong(&pres.generators, pres.order_bound)?;
    let fresh = pres.fresh_var();
    let sat = DiffVar::new(fresh, 0);
    let keep_vars = VarLayout::block(&pres.keep, pres.order_bound);

    // Elimination commutes with intersection, so each saturation is
    // eliminated on its own and the kept parts are intersected afterwards.
    let mut components: Vec<Vec<DiffPoly>> = Vec::new();
    for &i in proj_vars {
        let mut elim_vars = VarLayout::block(&pres.eliminate, pres.order_bound);
        elim_vars.insert(0, sat);
        let (layout, order) = elimination_layout(elim_vars, keep_vars.clone());
        let mut polys: Vec<AlgebraicPoly> = prolonged
            .iter()
            .map(|g| layout.encode(g))
            .collect::<Result<_>>()?;
        polys.push(layout.encode(&saturation_generator(
            &DiffPoly::var(DiffVar::new(i, 0)),
            fresh,
        ))?);
        let gb = groebner(&polys, &order);
        components.push(keep_part(&gb, &layout, &order));
    }

    let mut acc = components.remove(0);
    for next in components {
        acc = intersect(&acc, &next, sat, &keep_vars)?;
    }
    Ok(finish(acc, pres))
}

/// Intersection of two ideals via `t I + (1 - t) J`, eliminating `t`.
fn intersect(a: &[DiffPoly], b: &[DiffPoly], t: DiffVar, keep: &[DiffVar]) -> Result<Vec<DiffPoly>> {
    let (layout, order) = elimination_layout(vec![t], keep.to_vec());
    let tp = DiffPoly::var(t);
    let one_minus_t = &DiffPoly::one() - &tp;
    let mut polys = Vec::new();
    for g in a {
        polys.push(layout.encode(&(&tp * g))?);
    }
    for g in b {
        polys.push(layout.encode(&(&one_minus_t * g))?);
    }
    let gb = groebner(&polys, &order);
    Ok(keep_part(&gb, &layout, &order))
}

/// Whether some generator has a non-zero constant term. Since every ideal
/// element is a combination of generators, this decides whether the ideal
/// contains an element with non-zero constant term.
pub fn has_nonzero_constant_term(res: &ElimResult) -> bool {
    res.generators.iter().any(|g| !g.constant_term().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::dvar;
    use crate::poly::int;

    fn x(k: usize) -> DiffPoly {
        dvar(0, k)
    }
    fn y(k: usize) -> DiffPoly {
        dvar(1, k)
    }
    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn prolong_examples() {
        assert_eq!(prolong(&[x(1)], 3).unwrap(), vec![x(1), x(2), x(3)]);
        let g = &x(0).pow(2) - &DiffPoly::one();
        let p = prolong(std::slice::from_ref(&g), 2).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1], (&x(0) * &x(1)).scale(&int(2)));
        assert_eq!(p[2], &(&x(0) * &x(2)).scale(&int(2)) + &x(1).pow(2).scale(&int(2)));
        assert_eq!(
            prolong(&[x(2)], 1),
            Err(Error::BoundTooSmall { bound: 1, needed: 2 })
        );
    }

    #[test]
    fn algebraic_round_trip() {
        let g = &x(2) - &x(0).pow(2);
        let (layout, polys) = to_algebraic(std::slice::from_ref(&g), 2).unwrap();
        assert_eq!(layout.len(), 3);
        assert_eq!(from_algebraic(&layout, &polys), vec![g]);
        let w = &(&y(0) * &dvar(2, 0)) - &DiffPoly::one();
        let (layout, _) = to_algebraic(&[w], 0).unwrap();
        assert_eq!(layout.len(), 2);
    }

    #[test]
    fn inverse_gives_unit() {
        let pres = IdealPresentation::new(
            vec![x(0), saturation_generator(&x(0), 2)],
            set(&[0]),
            set(&[2]),
            Some(0),
        )
        .unwrap();
        let res = elim_ideal(&pres).unwrap();
        assert!(res.has_unit);
        assert!(has_nonzero_constant_term(&res));
    }

    #[test]
    fn empty_eliminate_returns_reduced_basis() {
        let pres = IdealPresentation::new(vec![&x(0).pow(2) - &x(0), x(0)], set(&[]), set(&[0]), Some(0)).unwrap();
        let res = elim_ideal(&pres).unwrap();
        assert_eq!(res.generators, vec![x(0)]);
    }

    #[test]
    fn presentation_validation() {
        assert!(IdealPresentation::new(vec![x(0)], set(&[0]), set(&[0]), None).is_err());
        assert!(IdealPresentation::new(vec![&x(0) * &y(0)], set(&[0]), set(&[]), None).is_err());
        assert!(matches!(
            IdealPresentation::new(vec![x(3)], set(&[0]), set(&[]), Some(2)),
            Err(Error::BoundTooSmall { .. })
        ));
        let p = IdealPresentation::new(vec![x(2)], set(&[0]), set(&[]), None).unwrap();
        assert_eq!(p.order_bound, 3);
    }

    #[test]
    fn saturation_generators() {
        assert_eq!(saturation_generator(&y(0), 2), &(&y(0) * &dvar(2, 0)) - &DiffPoly::one());
        assert_eq!(
            saturation_generator(&DiffPoly::one(), 2),
            &dvar(2, 0) - &DiffPoly::one()
        );
    }

    #[test]
    fn constant_term_checks() {
        let unit = ElimResult::from_generators(vec![DiffPoly::one()], 0);
        assert!(has_nonzero_constant_term(&unit));
        let flat = ElimResult::from_generators(vec![y(1)], 1);
        assert!(!has_nonzero_constant_term(&flat));
    }

    #[test]
    fn projective_requires_homogeneity() {
        let pres = IdealPresentation::new(vec![&x(1) + &x(0)], set(&[0]), set(&[]), None).unwrap();
        assert!(matches!(
            projective_elim_ideal(&pres, &set(&[0])),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn projective_unit_component() {
        // x0 = 0: saturating by x0 gives the unit ideal, saturating by x1
        // leaves nothing in y, so the intersection is the zero ideal.
        let pres = IdealPresentation::new(vec![x(0)], set(&[0, 1]), set(&[2]), Some(0)).unwrap();
        let res = projective_elim_ideal(&pres, &set(&[0, 1])).unwrap();
        assert!(res.generators.is_empty());
        assert!(!res.has_unit);
        assert!(!has_nonzero_constant_term(&res));
    }
}
