//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracle;
use deltapoly::elim::{elim_ideal, has_nonzero_constant_term, saturation_generator, ElimResult, IdealPresentation};
use deltapoly::groebner::{groebner, is_member, AlgebraicPoly, BlockOrder};
use deltapoly::homogenize::{dehomogenize, delta_homogenize, evaluate_at, is_delta_homogeneous, ProjectivePoint};
use deltapoly::syntax::{
    format_diffpoly, format_laurent_equation, parse_diffpoly, parse_laurent_equation, VarNames,
};
use deltapoly::valuative::{combine, derive_type2, verify_certificate, LaurentEquation, LaurentRule};
use deltapoly::{int, reduce, DiffPoly, DiffVar, RewriteRule};

const LIMIT_QUARTIC: Duration = Duration::from_millis(1);
const LIMIT_FAMILY: Duration = Duration::from_millis(10);
const LIMIT_COFACTOR: Duration = Duration::from_millis(1);
const LIMIT_HOMOGENIZE: Duration = Duration::from_millis(10);
const LIMIT_INFINITY: Duration = Duration::from_millis(10);
const LIMIT_SATURATED: Duration = Duration::from_secs(60);
const LIMIT_WITNESS: Duration = Duration::from_secs(120);
const LIMIT_COMBINE: Duration = Duration::from_secs(10);
const LIMIT_DERIVE: Duration = Duration::from_secs(10);
const LIMIT_PROPERTIES: Duration = Duration::from_secs(60);

const CHAIN_DEGREE: u32 = 2;

type Outcome = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn names() -> VarNames {
    VarNames::new(["x", "y", "t"]).unwrap()
}

fn p(text: &str) -> DiffPoly {
    parse_diffpoly(text, &names()).unwrap()
}

fn x(k: usize) -> DiffPoly {
    deltapoly::dvar(0, k)
}

fn y(k: usize) -> DiffPoly {
    deltapoly::dvar(1, k)
}

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

fn quartic() -> Outcome {
    let f = &(&(&y(0) * &x(1).pow(2)) + &x(0).pow(4)) - &DiffPoly::one();
    let inner = &(&(&y(0) * &x(2)).scale(&int(2)) + &(&y(1) * &x(1))) + &x(0).pow(3).scale(&int(4));
    let expected = &x(1) * &inner;
    check(f.differentiate() == expected, "derivative differs from x'*(2*y*x'' + y'*x' + 4*x^3)")
}

fn family() -> Outcome {
    for n in 2u32..=6 {
        let h = &x(0).pow(n + 1).scale(&int(2)) - &x(1).pow(2).scale(&int(n as i64 + 1));
        let f = &(&y(0) * &h) - &DiffPoly::one();
        let rule = RewriteRule::new(DiffVar::new(0, 2), x(0).pow(n)).unwrap();
        let got = reduce(&f.differentiate(), &rule);
        check(got == &y(1) * &h, format!("n = {n}: got {got}"))?;
    }
    Ok(())
}

fn p_family() -> (DiffPoly, DiffPoly, DiffPoly) {
    let p2 = &(&-(&y(0) * &y(2)) + &y(1).pow(2).scale(&int(2))) - &y(0);
    let p3 = p2.differentiate();
    let p1 = &(&(&y(2).pow(2).scale(&int(3)) - &DiffPoly::one()) - &(&y(3) * &y(1)).scale(&int(2))) + &y(2).scale(&int(2));
    (p1, p2, p3)
}

fn cofactor() -> Outcome {
    let (p1, p2, p3) = p_family();
    check(
        p3 == (&(&(&y(1) * &y(2)).scale(&int(3)) - &(&y(0) * &y(3))) - &y(1)),
        "p3 is not 3y'y'' - yy''' - y'",
    )?;
    let lhs = &y(0) * &p1;
    let rhs = &(&(&DiffPoly::one() - &y(2).scale(&int(3))) * &p2) + &(&y(1).scale(&int(2)) * &p3);
    check(lhs == rhs, "y*p1 != (-3y'' + 1)*p2 + 2y'*p3")
}

fn homogenization() -> Outcome {
    let cases = [
        (p("x'"), p("y*x' - x*y'")),
        (p("x'' - x^2"), p("y^2*x'' - 2*y*y'*x' - y*y''*x + 2*(y')^2*x - y*x^2")),
    ];
    for (affine, expected) in cases {
        let h = delta_homogenize(&affine, 1).map_err(|e| e.to_string())?;
        check(h == expected, format!("homogenization of {affine} gave {h}"))?;
        check(is_delta_homogeneous(&h).homogeneous, format!("{h} not homogeneous"))?;
        check(dehomogenize(&h, 1, &int(1)) == affine, format!("{h} does not dehomogenize to {affine}"))?;
    }
    Ok(())
}

fn infinity() -> Outcome {
    let at_infinity = ProjectivePoint::new(vec![int(1), int(0)]).unwrap();
    for n in 2u32..=5 {
        let h = delta_homogenize(&(&x(2) - &x(0).pow(n)), 1).map_err(|e| e.to_string())?;
        let v = evaluate_at(&h, &at_infinity).map_err(|e| e.to_string())?;
        if n == 2 {
            check(v == int(0), format!("n = 2 gives {v}"))?;
        } else {
            check(v != int(0), format!("n = {n} vanishes at (1:0)"))?;
        }
    }
    Ok(())
}

fn saturated_elimination() -> Outcome {
    let (p1, p2, _) = p_family();
    let gens = vec![p2.clone(), saturation_generator(&y(0), 2)];
    let pres = IdealPresentation::new(gens, set(&[2]), set(&[1]), Some(3)).map_err(|e| e.to_string())?;
    let res = elim_ideal(&pres).map_err(|e| e.to_string())?;
    check(res.contains(&p1), "p1 not in the elimination ideal")?;
    let pair = ElimResult::from_generators(vec![p1, p2], 3);
    check(has_nonzero_constant_term(&pair), "constant-term test false on {p1, p2}")
}

fn witness() -> Outcome {
    let h = &x(0).pow(3).scale(&int(2)) - &x(1).pow(2).scale(&int(3));
    let gens = vec![&x(2) - &x(0).pow(2), &(&y(0) * &h) - &DiffPoly::one()];
    let pres = IdealPresentation::new(gens, set(&[0]), set(&[1]), Some(3)).map_err(|e| e.to_string())?;
    let res = elim_ideal(&pres).map_err(|e| e.to_string())?;
    check(res.contains(&y(1)), "y' not in the elimination ideal")?;
    check(!has_nonzero_constant_term(&res), "constant-term test true")
}

fn random_combine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for run in 0..100 {
        let e1 = common::random_type_i(&mut rng, 4, 5);
        let e2 = common::random_type_ii(&mut rng, 4, 5);
        let bound = (e1.type_i_degree().unwrap() + e2.type_ii_degree().unwrap()) as usize;
        let out = combine(&e1, &e2).map_err(|e| e.to_string())?;
        check(out.trace.len() - 1 <= bound, format!("run {run}: {} iterations", out.trace.len() - 1))?;
        check(out.equation.is_denominator_only(), format!("run {run}: {}", out.equation))?;
        let ok = verify_certificate(&[e1, e2], &out.certificate, &out.equation).map_err(|e| e.to_string())?;
        check(ok, format!("run {run}: certificate rejected"))?;
    }
    Ok(())
}

/// Chaining is skipped for inputs of degree above `chain_up_to` in `x'`.
fn derive_chain(e: &LaurentEquation, label: &str, chain_up_to: u32) -> Outcome {
    let rule = LaurentRule::x_prime_over_x();
    let d = derive_type2(e, &rule).map_err(|err| err.to_string())?;
    check(d.equation.type_ii_degree().is_some(), format!("{label}: {} is not type II", d.equation))?;
    let ok = verify_certificate(std::slice::from_ref(e), &d.certificate, &d.equation).map_err(|err| err.to_string())?;
    check(ok, format!("{label}: certificate rejected"))?;
    if e.type_i_degree().unwrap() > chain_up_to {
        return Ok(());
    }
    let c = combine(e, &d.equation).map_err(|err| err.to_string())?;
    check(c.equation.is_denominator_only(), format!("{label}: chained result {}", c.equation))?;
    let ok = verify_certificate(&[e.clone(), d.equation], &c.certificate, &c.equation).map_err(|err| err.to_string())?;
    check(ok, format!("{label}: chained certificate rejected"))
}

fn derive_kernel() -> Outcome {
    let e = parse_laurent_equation("1 = m*x'/x^2").unwrap();
    let d = derive_type2(&e, &LaurentRule::x_prime_over_x()).map_err(|err| err.to_string())?;
    let expected = parse_laurent_equation("1 = m'/(2*x) + m/(2*x^2)").unwrap();
    check(d.equation == expected, format!("got {}", format_laurent_equation(&d.equation)))?;
    derive_chain(&e, "example", u32::MAX)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for run in 0..50 {
        let e = common::random_type_i(&mut rng, 3, 4);
        derive_chain(&e, &format!("run {run}"), CHAIN_DEGREE)?;
    }
    Ok(())
}

const CORPUS: &[&str] = &[
    "y*(x')^2 + x^4 - 1",
    "x'*(2*y*x'' + y'*x' + 4*x^3)",
    "x'' - x^2",
    "x'' - x^3",
    "y*x' - x*y'",
    "y^2*x'' - 2*y*y'*x' - y*y''*x + 2*(y')^2*x - y*x^2",
    "-y''*y + 2*(y')^2 - y",
    "3*(y'')^2 - 1 - 2*y'''*y' + 2*y''",
    "3*y'*y'' - y*y''' - y'",
    "y*t - 1",
    "y*(2*x^3 - 3*(x')^2) - 1",
    "y'*(2*x^3 - 3*(x')^2)",
    "2*x^4 - 4*(x')^2",
    "3*x*(x')^2 + x' - x",
    "6*x*x' + 1",
    "x*x'' - x'",
    "x1*x0' - x0*x1'",
    "x^(4) + x^(5)*y'''",
];

const LAURENT_CORPUS: &[&str] = &[
    "1 = m*x'/x^2",
    "1 = m'/(2*x) + m/(2*x^2)",
    "1 = a*x'/x^2 + b/x",
    "1 = c*x/(x')^2 + d/x",
    "1 = c/(x*x') + d/x",
    "1 = b/x + d/x - d*b/x^2 + c*a/(x*x')",
];

fn properties() -> Outcome {
    let mut runner = TestRunner::new_with_rng(Config::default(), proptest::test_runner::TestRng::deterministic_rng(
        proptest::test_runner::RngAlgorithm::ChaCha,
    ));
    let strategy = common::diffpoly(3, 3, 5);
    for i in 0..1000 {
        let a = strategy.new_tree(&mut runner).unwrap().current();
        let b = strategy.new_tree(&mut runner).unwrap().current();
        check((&a + &b).differentiate() == &a.differentiate() + &b.differentiate(), format!("pair {i}: sum rule"))?;
        check(
            (&a * &b).differentiate() == &(&a.differentiate() * &b) + &(&a * &b.differentiate()),
            format!("pair {i}: product rule"),
        )?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for round in 0..50 {
        let nvars = rng.gen_range(1..=3);
        let gens: Vec<AlgebraicPoly> = (0..rng.gen_range(1..=3))
            .map(|_| oracle::random_poly(&mut rng, nvars, 3, 3))
            .collect();
        let naive = oracle::basis(&gens.iter().map(oracle::from_algebraic).collect::<Vec<_>>());
        let order = BlockOrder::grevlex(nvars);
        let gb = groebner(&gens, &order);
        let mut member = AlgebraicPoly::zero(nvars);
        for g in &gens {
            member = member.add(&g.mul(&oracle::random_poly(&mut rng, nvars, 2, 3)));
        }
        let mut probes = vec![member];
        probes.extend((0..5).map(|_| oracle::random_poly(&mut rng, nvars, 3, 3)));
        for q in &probes {
            let ours = is_member(q, &gb, &order);
            let theirs = oracle::is_member(&oracle::from_algebraic(q), &naive);
            check(ours == theirs, format!("ideal {round}: membership disagrees"))?;
        }
    }

    let printing = VarNames::new((0..4).map(deltapoly::syntax::default_name)).unwrap();
    let strategy = common::diffpoly(4, 5, 6);
    for i in 0..1000 {
        let q = strategy.new_tree(&mut runner).unwrap().current();
        let text = format_diffpoly(&q, &printing);
        let back = parse_diffpoly(&text, &printing).map_err(|e| format!("polynomial {i}: {e}"))?;
        check(back == q, format!("polynomial {i}: {text}"))?;
    }
    for text in CORPUS {
        let names = VarNames::infer([*text]).unwrap();
        let q = parse_diffpoly(text, &names).map_err(|e| format!("{text}: {e}"))?;
        let printed = format_diffpoly(&q, &names);
        check(parse_diffpoly(&printed, &names).as_ref() == Ok(&q), format!("{text} -> {printed}"))?;
    }
    for text in LAURENT_CORPUS {
        let e = parse_laurent_equation(text).map_err(|err| format!("{text}: {err}"))?;
        let printed = format_laurent_equation(&e);
        check(parse_laurent_equation(&printed).as_ref() == Ok(&e), format!("{text} -> {printed}"))?;
    }
    Ok(())
}

fn run(n: usize, name: &str, limit: Duration, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|()| check(elapsed <= limit, format!("took longer than {limit:?}")));
    match &outcome {
        Ok(()) => println!("PASS {n:>2} {name} ({elapsed:.2?}, limit {limit:?})"),
        Err(why) => println!("FAIL {n:>2} {name} ({elapsed:.2?}, limit {limit:?}): {why}"),
    }
    outcome.is_ok()
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("derivative of y(x')^2 + x^4 - 1", LIMIT_QUARTIC, quartic),
        ("reduced derivative of the witness family", LIMIT_FAMILY, family),
        ("cofactor identity y*p1", LIMIT_COFACTOR, cofactor),
        ("delta-homogenization", LIMIT_HOMOGENIZE, homogenization),
        ("points at infinity", LIMIT_INFINITY, infinity),
        ("saturated elimination", LIMIT_SATURATED, saturated_elimination),
        ("incompleteness witness elimination", LIMIT_WITNESS, witness),
        ("randomized combine", LIMIT_COMBINE, random_combine),
        ("derive_type2 kernel", LIMIT_DERIVE, derive_kernel),
        ("property suites", LIMIT_PROPERTIES, properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        if !run(i + 1, name, limit, f) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
