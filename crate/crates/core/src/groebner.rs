//! Buchberger's algorithm over the rationals with block elimination orders.
//!
//! Pairs are selected by sugar degree and pruned with the Gebauer-Möller
//! installation of Buchberger's product and chain criteria. The returned basis
//! is reduced, monic and sorted by leading monomial, so it is a canonical
//! description of the ideal for the given order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::{add_rat, mul_rat, Rational};

/// A polynomial over a fixed list of `nvars` algebraic variables, stored as a
/// canonical sparse map from exponent vectors to non-zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl AlgebraicPoly {
    pub fn zero(nvars: usize) -> Self {
        AlgebraicPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
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

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// True for non-zero constants.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, mul_rat(c1, c2));
            }
        }
        out
    }

    /// Leading exponent vector under `order`.
    pub fn leading_exponents(&self, order: &BlockOrder) -> Option<&Vec<u32>> {
        self.terms.keys().max_by(|a, b| order.cmp(a, b))
    }

    /// True when every variable with non-zero exponent lies in `range`.
    pub fn only_uses(&self, range: std::ops::Range<usize>) -> bool {
        self.terms.keys().all(|e| {
            e.iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || range.contains(&i))
        })
    }
}

/// Product order of graded reverse lexicographic blocks. Variables are laid
/// out block by block; the first block dominates, and within a block a lower
/// index is a larger variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockOrder {
    bounds: Vec<(usize, usize)>,
}

impl BlockOrder {
    pub fn new(block_sizes: &[usize]) -> Self {
        let mut start = 0;
        let bounds = block_sizes
            .iter()
            .map(|&s| {
                let b = (start, start + s);
                start += s;
                b
            })
            .collect();
        BlockOrder { bounds }
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self::new(&[nvars])
    }

    /// `eliminate` leading variables dominating the remaining `keep` ones.
    pub fn elimination(eliminate: usize, keep: usize) -> Self {
        Self::new(&[eliminate, keep])
    }

    pub fn nvars(&self) -> usize {
        self.bounds.last().map_or(0, |b| b.1)
    }

    /// The variable range of block `i`.
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        let (s, e) = self.bounds[i];
        s..e
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        for &(s, e) in &self.bounds {
            let da: u32 = a[s..e].iter().sum();
            let db: u32 = b[s..e].iter().sum();
            if da != db {
                return da.cmp(&db);
            }
            for i in (s..e).rev() {
                if a[i] != b[i] {
                    return b[i].cmp(&a[i]);
                }
            }
        }
        Ordering::Equal
    }
}

#[derive(Clone, Debug)]
struct Term {
    exps: Box<[u32]>,
    coeff: Rational,
}

/// Terms in ascending order; the leading term is last.
#[derive(Clone, Debug, Default)]
struct Sorted {
    terms: Vec<Term>,
}

fn divmask(e: &[u32]) -> u64 {
    e.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .fold(0u64, |m, (i, _)| m | (1 << (i % 64)))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Box<[u32]> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl Sorted {
    fn from_poly(p: &AlgebraicPoly, order: &BlockOrder) -> Self {
        let mut terms: Vec<Term> = p
            .terms
            .iter()
            .map(|(e, c)| Term {
                exps: e.clone().into_boxed_slice(),
                coeff: c.clone(),
            })
            .collect();
        terms.sort_by(|a, b| order.cmp(&a.exps, &b.exps));
        Sorted { terms }
    }

    fn to_poly(&self, nvars: usize) -> AlgebraicPoly {
        AlgebraicPoly::from_terms(
            nvars,
            self.terms.iter().map(|t| (t.exps.to_vec(), t.coeff.clone())),
        )
    }

    fn lead(&self) -> &Term {
        self.terms.last().expect("non-zero polynomial")
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        let inv = self.lead().coeff.recip();
        if !inv.is_one() {
            for t in &mut self.terms {
                t.coeff *= &inv;
            }
        }
    }

    fn tdeg(&self) -> u32 {
        self.terms.iter().map(|t| degree(&t.exps)).max().unwrap_or(0)
    }

    /// `self - c * x^shift * g`, merging the two ascending term lists.
    fn sub_scaled(&self, c: &Rational, shift: &[u32], g: &Sorted, order: &BlockOrder) -> Sorted {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let shifted = g.terms.iter().map(|t| Term {
            exps: t.exps.iter().zip(shift).map(|(a, b)| a + b).collect(),
            coeff: -(&t.coeff * c),
        });
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match order.cmp(&x.exps, &y.exps) {
                    Ordering::Less => out.push(a.next().unwrap()),
                    Ordering::Greater => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let mut t = a.next().unwrap();
                        t.coeff += b.next().unwrap().coeff;
                        if !t.coeff.is_zero() {
                            out.push(t);
                        }
                    }
                },
            }
        }
        Sorted { terms: out }
    }
}

struct Reducer<'a> {
    polys: &'a [Sorted],
    masks: &'a [u64],
    active: &'a [usize],
}

impl Reducer<'_> {
    fn find_divisor(&self, e: &[u32]) -> Option<usize> {
        let m = divmask(e);
        self.active
            .iter()
            .copied()
            .find(|&i| self.masks[i] & !m == 0 && divides(&self.polys[i].lead().exps, e))
    }

    /// Full normal form: every term is reduced, not only the leading one.
    fn normal_form(&self, p: Sorted, order: &BlockOrder) -> Sorted {
        let mut p = p;
        let mut rest: Vec<Term> = Vec::new();
        while let Some(lt) = p.terms.last() {
            match self.find_divisor(&lt.exps) {
                Some(i) => {
                    let g = &self.polys[i];
                    let shift: Vec<u32> = lt.exps.iter().zip(g.lead().exps.iter()).map(|(a, b)| a - b).collect();
                    let c = &lt.coeff / &g.lead().coeff;
                    p = p.sub_scaled(&c, &shift, g, order);
                }
                None => rest.push(p.terms.pop().unwrap()),
            }
        }
        rest.reverse();
        Sorted { terms: rest }
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Box<[u32]>,
    sugar: u32,
}

struct Engine<'o> {
    order: &'o BlockOrder,
    polys: Vec<Sorted>,
    masks: Vec<u64>,
    sugar: Vec<u32>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl<'o> Engine<'o> {
    fn new(order: &'o BlockOrder) -> Self {
        Engine {
            order,
            polys: Vec::new(),
            masks: Vec::new(),
            sugar: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
        }
    }

    fn lm(&self, i: usize) -> &[u32] {
        &self.polys[i].lead().exps
    }

    fn reduce(&self, p: Sorted) -> Sorted {
        Reducer {
            polys: &self.polys,
            masks: &self.masks,
            active: &self.active,
        }
        .normal_form(p, self.order)
    }

    /// Installs a new monic basis element, updating pairs with the
    /// Gebauer-Möller criteria.
    fn insert(&mut self, h: Sorted, sugar: u32) {
        let hi = self.polys.len();
        self.masks.push(divmask(&h.lead().exps));
        self.polys.push(h);
        self.sugar.push(sugar);
        let h_lm = self.lm(hi).to_vec();

        let cands: Vec<(usize, Box<[u32]>)> = self
            .active
            .iter()
            .map(|&g| (g, lcm(&h_lm, self.lm(g))))
            .collect();
        let mut kept: Vec<(usize, Box<[u32]>)> = Vec::new();
        for (k, (g, l)) in cands.iter().enumerate() {
            let keep = coprime(&h_lm, self.lm(*g))
                || (!cands[k + 1..].iter().any(|(_, l2)| divides(l2, l))
                    && !kept.iter().any(|(_, l2)| divides(l2, l)));
            if keep {
                kept.push((*g, l.clone()));
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !coprime(&h_lm, self.lm(*g)))
            .map(|(g, l)| {
                let s = self.pair_sugar(g, hi, &l);
                Pair {
                    i: g,
                    j: hi,
                    lcm: l,
                    sugar: s,
                }
            })
            .collect();

        let old = std::mem::take(&mut self.pairs);
        self.pairs = old
            .into_iter()
            .filter(|p| {
                !(divides(&h_lm, &p.lcm)
                    && *lcm(self.lm(p.i), &h_lm) != *p.lcm
                    && *lcm(self.lm(p.j), &h_lm) != *p.lcm)
            })
            .collect();
        self.pairs.extend(new_pairs);

        let polys = &self.polys;
        self.active
            .retain(|&g| !divides(&h_lm, &polys[g].lead().exps));
        self.active.push(hi);
    }

    fn pair_sugar(&self, i: usize, j: usize, l: &[u32]) -> u32 {
        let si = self.sugar[i] + degree(l) - degree(self.lm(i));
        let sj = self.sugar[j] + degree(l) - degree(self.lm(j));
        si.max(sj)
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let order = self.order;
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.sugar
                    .cmp(&b.sugar)
                    .then_with(|| order.cmp(&a.lcm, &b.lcm))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }

    fn s_poly(&self, p: &Pair) -> Sorted {
        let f = &self.polys[p.i];
        let g = &self.polys[p.j];
        let sf: Vec<u32> = p.lcm.iter().zip(f.lead().exps.iter()).map(|(a, b)| a - b).collect();
        let sg: Vec<u32> = p.lcm.iter().zip(g.lead().exps.iter()).map(|(a, b)| a - b).collect();
        // both inputs are monic
        let fs = Sorted::default().sub_scaled(&-Rational::one(), &sf, f, self.order);
        fs.sub_scaled(&Rational::one(), &sg, g, self.order)
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `order`.
///
/// The result is monic and sorted by ascending leading monomial. The unit
/// ideal yields `[1]` and the zero ideal yields an empty basis.
pub fn groebner(gens: &[AlgebraicPoly], order: &BlockOrder) -> Vec<AlgebraicPoly> {
    let nvars = order.nvars();
    let mut engine = Engine::new(order);
    let mut inputs: Vec<Sorted> = gens
        .iter()
        .inspect(|g| assert_eq!(g.nvars, nvars, "generator over a different variable list"))
        .filter(|g| !g.is_zero())
        .map(|g| Sorted::from_poly(g, order))
        .collect();
    inputs.sort_by(|a, b| order.cmp(&a.lead().exps, &b.lead().exps));

    for g in inputs {
        let s = g.tdeg();
        let mut h = engine.reduce(g);
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if degree(&h.lead().exps) == 0 {
            return vec![AlgebraicPoly::constant(nvars, Rational::one())];
        }
        engine.insert(h, s);
    }

    while let Some(pair) = engine.next_pair() {
        let s = engine.s_poly(&pair);
        let mut h = engine.reduce(s);
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if degree(&h.lead().exps) == 0 {
            return vec![AlgebraicPoly::constant(nvars, Rational::one())];
        }
        engine.insert(h, pair.sugar);
    }

    interreduce(engine, nvars)
}

fn interreduce(engine: Engine<'_>, nvars: usize) -> Vec<AlgebraicPoly> {
    let order = engine.order;
    let mut basis: Vec<Sorted> = engine
        .active
        .iter()
        .map(|&i| engine.polys[i].clone())
        .collect();
    basis.sort_by(|a, b| order.cmp(&a.lead().exps, &b.lead().exps));
    // Leading monomials of the active set are pairwise non-divisible, so each
    // element only needs its tail reduced by the others.
    for k in 0..basis.len() {
        let others: Vec<Sorted> = basis
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| p.clone())
            .collect();
        let masks: Vec<u64> = others.iter().map(|p| divmask(&p.lead().exps)).collect();
        let active: Vec<usize> = (0..others.len()).collect();
        let reducer = Reducer {
            polys: &others,
            masks: &masks,
            active: &active,
        };
        let mut p = basis[k].clone();
        let lead = p.terms.pop().expect("non-zero");
        let mut tail = reducer.normal_form(p, order);
        tail.terms.push(lead);
        tail.make_monic();
        basis[k] = tail;
    }
    basis.iter().map(|p| p.to_poly(nvars)).collect()
}

/// Remainder of `p` on division by `basis` (fully reduced).
pub fn normal_form(p: &AlgebraicPoly, basis: &[AlgebraicPoly], order: &BlockOrder) -> AlgebraicPoly {
    let polys: Vec<Sorted> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| Sorted::from_poly(b, order))
        .collect();
    let masks: Vec<u64> = polys.iter().map(|q| divmask(&q.lead().exps)).collect();
    let active: Vec<usize> = (0..polys.len()).collect();
    let reducer = Reducer {
        polys: &polys,
        masks: &masks,
        active: &active,
    };
    reducer
        .normal_form(Sorted::from_poly(p, order), order)
        .to_poly(p.nvars)
}

/// Ideal membership against a Gröbner basis for `order`.
pub fn is_member(p: &AlgebraicPoly, basis: &[AlgebraicPoly], order: &BlockOrder) -> bool {
    normal_form(p, basis, order).is_zero()
}
