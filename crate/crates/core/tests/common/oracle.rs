//! A deliberately naive Buchberger implementation under lex order: every
//! pair is completed, no criteria, no interreduction.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use deltapoly::groebner::AlgebraicPoly;
use deltapoly::{int, Rational};

pub type Naive = BTreeMap<Vec<u32>, Rational>;

pub fn from_algebraic(p: &AlgebraicPoly) -> Naive {
    p.terms().map(|(e, c)| (e.clone(), c.clone())).collect()
}

fn lead(p: &Naive) -> Option<(&Vec<u32>, &Rational)> {
    p.iter().next_back()
}

fn sub_multiple(p: &mut Naive, c: &Rational, shift: &[u32], f: &Naive) {
    for (e, d) in f {
        let key: Vec<u32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
        let v = p.remove(&key).unwrap_or_else(Rational::zero) - c * d;
        if !v.is_zero() {
            p.insert(key, v);
        }
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Remainder of multivariate division by `fs`.
pub fn remainder(p: &Naive, fs: &[Naive]) -> Naive {
    let mut p = p.clone();
    let mut rem = Naive::new();
    while let Some((e, c)) = lead(&p).map(|(e, c)| (e.clone(), c.clone())) {
        let divisor = fs.iter().find(|f| lead(f).is_some_and(|(le, _)| divides(le, &e)));
        match divisor {
            Some(f) => {
                let (le, lc) = lead(f).unwrap();
                let shift: Vec<u32> = e.iter().zip(le).map(|(a, b)| a - b).collect();
                let q = &c / lc;
                sub_multiple(&mut p, &q, &shift, f);
            }
            None => {
                p.remove(&e);
                rem.insert(e, c);
            }
        }
    }
    rem
}

fn s_poly(f: &Naive, g: &Naive) -> Naive {
    let (lf, cf) = lead(f).unwrap();
    let (lg, cg) = lead(g).unwrap();
    let lcm: Vec<u32> = lf.iter().zip(lg).map(|(a, b)| *a.max(b)).collect();
    let mut out = Naive::new();
    let sf: Vec<u32> = lcm.iter().zip(lf).map(|(a, b)| a - b).collect();
    let sg: Vec<u32> = lcm.iter().zip(lg).map(|(a, b)| a - b).collect();
    sub_multiple(&mut out, &-(cf.recip()), &sf, f);
    sub_multiple(&mut out, &cg.recip(), &sg, g);
    out
}

pub fn basis(gens: &[Naive]) -> Vec<Naive> {
    let mut g: Vec<Naive> = gens.iter().filter(|p| !p.is_empty()).cloned().collect();
    let mut pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let r = remainder(&s_poly(&g[i], &g[j]), &g);
        if !r.is_empty() {
            let k = g.len();
            g.push(r);
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    g
}

pub fn is_member(p: &Naive, basis: &[Naive]) -> bool {
    remainder(p, basis).is_empty()
}

pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: u32, max_terms: usize) -> AlgebraicPoly {
    let mut p = AlgebraicPoly::zero(nvars);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let mut e = vec![0u32; nvars];
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            e[rng.gen_range(0..nvars)] += 1;
        }
        p.add_term(e, int(rng.gen_range(-3..=3)));
    }
    p
}
