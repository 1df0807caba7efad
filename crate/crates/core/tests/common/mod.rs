//! Random inputs and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

pub mod oracle;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use deltapoly::poly::Monomial;
use deltapoly::valuative::{CoeffPoly, CoeffSymbol, LaurentEquation, LaurentTerm};
use deltapoly::{int, ratio, DiffPoly, DiffVar};

pub fn coeff() -> impl Strategy<Value = deltapoly::Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

/// Random differential polynomials in `nvars` indeterminates.
pub fn diffpoly(nvars: usize, max_order: usize, max_terms: usize) -> impl Strategy<Value = DiffPoly> {
    let factor = (0..nvars, 0..=max_order, 1u32..=3);
    let term = (coeff(), prop::collection::vec(factor, 0..=3));
    prop::collection::vec(term, 0..=max_terms).prop_map(|terms| {
        terms.into_iter().fold(DiffPoly::zero(), |acc, (c, factors)| {
            let m = Monomial::from_factors(factors.into_iter().map(|(v, k, e)| (DiffVar::new(v, k), e)));
            &acc + &DiffPoly::term(c, m)
        })
    })
}

const SYMBOLS: [&str; 1] = ["a"];

/// An integer multiple of a single symbol.
pub fn random_coeff(rng: &mut ChaCha8Rng) -> CoeffPoly {
    let sym = CoeffSymbol::new(SYMBOLS[rng.gen_range(0..SYMBOLS.len())], 0);
    let r = int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
    CoeffPoly::term(r, Monomial::from_factors([(sym, 1)]))
}

/// `1 = sum` of type I terms with exponents bounded by `max_exp`.
pub fn random_type_i(rng: &mut ChaCha8Rng, max_terms: usize, max_exp: i64) -> LaurentEquation {
    let n = rng.gen_range(1..=max_terms);
    let terms = (0..n).map(|_| {
        let (x, y) = if rng.gen_bool(0.7) {
            let y = rng.gen_range(1..max_exp);
            (-rng.gen_range(y + 1..=max_exp), y)
        } else {
            (-rng.gen_range(0..=max_exp), 0)
        };
        LaurentTerm::new(random_coeff(rng), x, y)
    });
    LaurentEquation::new(terms.collect::<Vec<_>>()).expect("coefficients lie in the symbol ideal")
}

/// `1 = sum` of type II terms with exponents bounded by `max_exp`.
pub fn random_type_ii(rng: &mut ChaCha8Rng, max_terms: usize, max_exp: i64) -> LaurentEquation {
    let n = rng.gen_range(1..=max_terms);
    let terms = (0..n).map(|_| {
        let (x, y) = if rng.gen_bool(0.7) {
            let s = rng.gen_range(1..=max_exp);
            (rng.gen_range(-max_exp..s.min(max_exp + 1)), -s)
        } else {
            (-rng.gen_range(0..=max_exp), 0)
        };
        LaurentTerm::new(random_coeff(rng), x, y)
    });
    LaurentEquation::new(terms.collect::<Vec<_>>()).expect("coefficients lie in the symbol ideal")
}
