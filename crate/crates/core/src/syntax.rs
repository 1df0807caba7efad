//! Surface syntax for differential polynomials and Laurent equations.
//!
//! Identifiers are `[a-z][a-z0-9]*`, derivatives are written with postfix
//! primes (`x''`) or as `x^(k)`, and products need an explicit `*`.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::diffpoly::{DiffPoly, DiffVar};
use crate::error::{Error, Result};
use crate::poly::{Indeterminate, Monomial, Poly, Rational};

/// Display names for indeterminate indices. Indices without an explicit name
/// fall back to `x, y, z, x3, x4, ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
}

pub fn default_name(index: usize) -> String {
    match index {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        i => format!("x{i}"),
    }
}

impl VarNames {
    /// Names for `names.len()` indeterminates, index `i` named `names[i]`.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::InvalidPresentation(format!("`{n}` is not a valid variable name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidPresentation(format!("variable `{n}` listed twice")));
            }
        }
        Ok(VarNames { names })
    }

    /// `x, y, z` followed by every other identifier of `texts` in order of
    /// first appearance.
    pub fn infer<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut names: Vec<String> = (0..3).map(default_name).collect();
        for text in texts {
            for tok in lex(text)? {
                if let Tok::Ident(id) = tok.kind {
                    if !names.contains(&id) {
                        names.push(id);
                    }
                }
            }
        }
        Ok(VarNames { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> String {
        self.names.get(index).cloned().unwrap_or_else(|| default_name(index))
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Index one past every named variable.
    pub fn next_free(&self) -> usize {
        self.names.len()
    }

    pub fn push(&mut self, name: &str) -> usize {
        if let Some(i) = self.index(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.names.len() - 1
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(BigInt),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        let mut push = |kind| out.push(Token { kind, line: l, column: col });
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            'a'..='z' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_lowercase() || chars[i + 1].is_ascii_digit()) {
                    i += 1;
                }
                let id: String = chars[start..=i].iter().collect();
                column += i - start;
                push(Tok::Ident(id));
            }
            '0'..='9' => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..=i].iter().collect();
                column += i - start;
                push(Tok::Number(digits.parse().expect("ascii digits")));
            }
            '\'' | '′' => push(Tok::Prime),
            '″' => {
                push(Tok::Prime);
                push(Tok::Prime);
            }
            '+' => push(Tok::Plus),
            '-' | '−' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '/' => push(Tok::Slash),
            '^' => push(Tok::Caret),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '=' => push(Tok::Equals),
            other => {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
        column += 1;
    }
    out.push(Token {
        kind: Tok::End,
        line,
        column,
    });
    Ok(out)
}

// ---------------------------------------------------------------- parsing

/// The value domain a parse is evaluated in.
trait Algebra: Sized {
    fn number(n: Rational) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn neg(self) -> Self;
    fn div(self, rhs: Self) -> std::result::Result<Self, String>;
    fn pow(self, e: u32) -> Self;
    fn derive(self) -> std::result::Result<Self, String>;
}

struct Parser<'a, A> {
    toks: Vec<Token>,
    pos: usize,
    atom: &'a dyn Fn(&str, usize) -> std::result::Result<A, Error>,
}

impl<'a, A: Algebra> Parser<'a, A> {
    fn new(text: &str, atom: &'a dyn Fn(&str, usize) -> std::result::Result<A, Error>) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            atom,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].kind
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(&self.toks[self.pos], message)
    }

    fn expect(&mut self, kind: Tok, what: &str) -> Result<()> {
        if *self.peek() == kind {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<A> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    acc = acc.add(self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<A> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    acc = acc.mul(self.unary()?);
                }
                Tok::Slash => {
                    let tok = self.advance();
                    let rhs = self.unary()?;
                    acc = acc.div(rhs).map_err(|m| self.error_at(&tok, m))?;
                }
                Tok::Ident(_) | Tok::Number(_) | Tok::LParen => {
                    return Err(self.error("implicit multiplication is not allowed; use `*`"))
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<A> {
        match self.peek() {
            Tok::Minus => {
                self.advance();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<A> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.advance();
            let e = self.small_int("an exponent")?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn small_int(&mut self, what: &str) -> Result<u32> {
        let tok = self.advance();
        match tok.kind {
            Tok::Number(ref n) => n.to_u32().ok_or_else(|| self.error_at(&tok, format!("{what} is too large"))),
            _ => Err(self.error_at(&tok, format!("expected {what}"))),
        }
    }

    fn primary(&mut self) -> Result<A> {
        let tok = self.advance();
        match tok.kind {
            Tok::Number(ref n) => Ok(A::number(Rational::from_integer(n.clone()))),
            Tok::LParen => {
                let mut inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                while *self.peek() == Tok::Prime {
                    let prime = self.advance();
                    inner = inner.derive().map_err(|m| self.error_at(&prime, m))?;
                }
                Ok(inner)
            }
            Tok::Ident(ref name) => {
                let mut order = 0usize;
                while *self.peek() == Tok::Prime {
                    self.advance();
                    order += 1;
                }
                // `x^(k)` is derivative notation; `x^k` is a power
                if order == 0
                    && *self.peek() == Tok::Caret
                    && self.toks.get(self.pos + 1).map(|t| &t.kind) == Some(&Tok::LParen)
                {
                    self.advance();
                    self.advance();
                    order = self.small_int("a derivative order")? as usize;
                    self.expect(Tok::RParen, "`)`")?;
                }
                (self.atom)(name, order).map_err(|e| match e {
                    Error::Syntax { message, .. } => self.error_at(&tok, message),
                    other => other,
                })
            }
            Tok::End => Err(self.error_at(&tok, "unexpected end of input")),
            _ => Err(self.error_at(&tok, "expected a number, variable or `(`")),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

impl Algebra for DiffPoly {
    fn number(n: Rational) -> Self {
        DiffPoly::constant(n)
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn div(self, rhs: Self) -> std::result::Result<Self, String> {
        match rhs.is_constant().then(|| rhs.constant_term()) {
            Some(c) if !c.is_zero() => Ok(self.scale(&c.recip())),
            Some(_) => Err("division by zero".into()),
            None => Err("only division by a non-zero number is allowed".into()),
        }
    }
    fn pow(self, e: u32) -> Self {
        Poly::pow(&self, e)
    }
    fn derive(self) -> std::result::Result<Self, String> {
        Ok(self.differentiate())
    }
}

/// Parses `text`, resolving identifiers against `names`.
pub fn parse_diffpoly(text: &str, names: &VarNames) -> Result<DiffPoly> {
    let atom = |name: &str, order: usize| -> Result<DiffPoly> {
        let var = names.resolve(name)?;
        Ok(DiffPoly::var(DiffVar::new(var, order)))
    };
    let mut p = Parser::new(text, &atom)?;
    let out = p.expr()?;
    p.finish()?;
    Ok(out)
}

/// Parses `lhs = rhs` where `lhs` is a single derivative, e.g. `x'' = x^2`.
pub fn parse_rewrite_rule(text: &str, names: &VarNames) -> Result<crate::diffpoly::RewriteRule> {
    let Some((lhs, rhs)) = text.split_once('=') else {
        return Err(Error::InvalidRule("expected `lhs = rhs`".into()));
    };
    let lhs = parse_diffpoly(lhs, names)?;
    let rhs = parse_diffpoly(rhs, names)?;
    let v = match lhs.leading_term() {
        Some((m, c)) if lhs.len() == 1 && c.is_one() && m.degree() == 1 => *m.max_var().expect("degree one"),
        _ => return Err(Error::InvalidRule("left-hand side must be a single derivative".into())),
    };
    crate::diffpoly::RewriteRule::new(v, rhs)
}

// ---------------------------------------------------------------- formatting

fn write_derivative(out: &mut String, name: &str, order: usize, exp: u32) {
    let base = match order {
        0 => name.to_string(),
        1..=3 => format!("{name}{}", "'".repeat(order)),
        k => format!("{name}^({k})"),
    };
    match (exp, order) {
        (1, _) => out.push_str(&base),
        (e, 0) => write!(out, "{base}^{e}").unwrap(),
        (e, _) => write!(out, "({base})^{e}").unwrap(),
    }
}

fn write_rational(out: &mut String, c: &Rational) {
    if c.is_integer() {
        write!(out, "{}", c.numer()).unwrap();
    } else {
        write!(out, "{}/{}", c.numer(), c.denom()).unwrap();
    }
}

/// Writes `|c| * m` with the conventions `1*m = m` and `m = 1` shown as `|c|`.
fn write_scaled(out: &mut String, c: &Rational, factors: &str) {
    let a = c.abs();
    if factors.is_empty() {
        write_rational(out, &a);
    } else {
        if !a.is_one() {
            write_rational(out, &a);
            out.push('*');
        }
        out.push_str(factors);
    }
}

fn diff_monomial(m: &Monomial<DiffVar>, names: &VarNames) -> String {
    let mut factors: Vec<(&DiffVar, u32)> = m.factors().collect();
    factors.sort_by(|(a, _), (b, _)| b.var.cmp(&a.var).then(a.order.cmp(&b.order)));
    let mut out = String::new();
    for (i, (v, e)) in factors.into_iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_derivative(&mut out, &names.name(v.var), v.order, e);
    }
    out
}

fn write_signed_terms<'a>(out: &mut String, terms: impl Iterator<Item = (&'a Rational, String)>) {
    let mut first = true;
    for (c, factors) in terms {
        match (first, c.is_negative()) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        write_scaled(out, c, &factors);
        first = false;
    }
    if first {
        out.push('0');
    }
}

/// Canonical text: terms in descending monomial order.
pub fn format_diffpoly(p: &DiffPoly, names: &VarNames) -> String {
    let mut out = String::new();
    write_signed_terms(&mut out, p.terms().map(|(m, c)| (c, diff_monomial(m, names))));
    out
}

/// Pulls out the monomial content when there is more than one term, as in
/// `x'*(2*y*x'' + y'*x' + 4*x^3)`.
pub fn format_factored(p: &DiffPoly, names: &VarNames) -> String {
    let content = p.monomial_content();
    if p.len() < 2 || content.is_one() {
        return format_diffpoly(p, names);
    }
    let rest = p.div_monomial(&content).expect("content divides every term");
    format!("{}*({})", diff_monomial(&content, names), format_diffpoly(&rest, names))
}

impl fmt::Display for DiffVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_derivative(&mut s, &default_name(self.var), self.order, 1);
        f.write_str(&s)
    }
}

impl fmt::Display for Poly<DiffVar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_diffpoly(self, &VarNames::default()))
    }
}

// ---------------------------------------------------------------- Laurent syntax

use crate::valuative::{CoeffPoly, CoeffSymbol, LaurentEquation, LaurentPoly, LaurentRule};

impl Algebra for LaurentPoly {
    fn number(n: Rational) -> Self {
        LaurentPoly::constant(CoeffPoly::constant(n))
    }
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
    fn neg(self) -> Self {
        -&self
    }
    fn div(self, rhs: Self) -> std::result::Result<Self, String> {
        let inv = rhs
            .monomial_inverse()
            .ok_or("only division by a number times a power product of x and x' is allowed")?;
        Ok(&self * &inv)
    }
    fn pow(self, e: u32) -> Self {
        LaurentPoly::pow(&self, e)
    }
    fn derive(self) -> std::result::Result<Self, String> {
        Err("derivatives of Laurent expressions need a rule; differentiate the equation instead".into())
    }
}

fn laurent_atom(name: &str, order: usize) -> Result<LaurentPoly> {
    let syntax = |message: &str| Error::Syntax {
        line: 0,
        column: 0,
        message: message.into(),
    };
    if name == "x" {
        match order {
            0 => Ok(LaurentPoly::monomial(CoeffPoly::one(), 1, 0)),
            1 => Ok(LaurentPoly::monomial(CoeffPoly::one(), 0, 1)),
            _ => Err(syntax("derivatives of x above x' must be rewritten with the rule")),
        }
    } else {
        Ok(LaurentPoly::constant(CoeffPoly::var(CoeffSymbol::new(name, order))))
    }
}

pub fn parse_laurent(text: &str) -> Result<LaurentPoly> {
    let mut p = Parser::new(text, &laurent_atom)?;
    let out = p.expr()?;
    p.finish()?;
    Ok(out)
}

/// Parses `lhs = rhs`; both sides are Laurent expressions in `x` and `x'`.
pub fn parse_laurent_equation(text: &str) -> Result<LaurentEquation> {
    let mut p = Parser::new(text, &laurent_atom)?;
    let lhs = p.expr()?;
    p.expect(Tok::Equals, "`=`")?;
    let rhs = p.expr()?;
    p.finish()?;
    Ok(LaurentEquation::from_relation(&lhs - &rhs))
}

/// Parses a rule such as `x'' = x'/x`.
pub fn parse_laurent_rule(text: &str) -> Result<LaurentRule> {
    let bad = || Error::InvalidRule(format!("`{text}` is not of the form x'' = c*x^a*(x')^b"));
    let (lhs, rhs) = text.split_once('=').ok_or_else(bad)?;
    let lhs_names = VarNames::new(["x"])?;
    let l = parse_diffpoly(lhs, &lhs_names)?;
    if l != DiffPoly::var(DiffVar::new(0, 2)) {
        return Err(bad());
    }
    let r = parse_laurent(rhs)?;
    let mut terms = r.terms();
    match (terms.next(), terms.next()) {
        (Some((x_exp, y_exp, c)), None) if c.is_constant() && !c.is_zero() => {
            Ok(LaurentRule::new(c.constant_term(), x_exp, y_exp))
        }
        _ => Err(bad()),
    }
}

fn coeff_monomial(m: &Monomial<CoeffSymbol>) -> String {
    let mut out = String::new();
    for (i, (s, e)) in m.factors().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_derivative(&mut out, &s.base, s.order(), e);
    }
    out
}

pub fn format_coeff(c: &CoeffPoly) -> String {
    let mut out = String::new();
    write_signed_terms(&mut out, c.terms().map(|(m, r)| (r, coeff_monomial(m))));
    out
}

fn xy_factors(x_exp: i64, y_exp: i64) -> (Vec<String>, Vec<String>) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (exp, order) in [(x_exp, 0usize), (y_exp, 1)] {
        if exp == 0 {
            continue;
        }
        let mut s = String::new();
        write_derivative(&mut s, "x", order, exp.unsigned_abs() as u32);
        if exp > 0 {
            num.push(s);
        } else {
            den.push(s);
        }
    }
    (num, den)
}

/// Writes one Laurent term, returning whether it carries a leading minus.
fn laurent_term(c: &CoeffPoly, x_exp: i64, y_exp: i64) -> (bool, String) {
    let (num, den) = xy_factors(x_exp, y_exp);
    let mut out = String::new();
    let negative;
    if c.len() == 1 {
        let (m, r) = c.leading_term().expect("one term");
        negative = r.is_negative();
        let mut factors = coeff_monomial(m);
        for f in &num {
            if !factors.is_empty() {
                factors.push('*');
            }
            factors.push_str(f);
        }
        write_scaled(&mut out, r, &factors);
    } else {
        let lead_negative = c.leading_term().is_some_and(|(_, r)| r.is_negative());
        negative = lead_negative;
        let shown = if lead_negative { format_coeff(&-c) } else { format_coeff(c) };
        write!(out, "({shown})").unwrap();
        for f in &num {
            write!(out, "*{f}").unwrap();
        }
    }
    match den.len() {
        0 => {}
        1 => write!(out, "/{}", den[0]).unwrap(),
        _ => write!(out, "/({})", den.join("*")).unwrap(),
    }
    (negative, out)
}

pub fn format_laurent(p: &LaurentPoly) -> String {
    let mut out = String::new();
    let mut first = true;
    for (x_exp, y_exp, c) in p.terms_descending() {
        let (negative, body) = laurent_term(c, x_exp, y_exp);
        match (first, negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
        first = false;
    }
    if first {
        out.push('0');
    }
    out
}

pub fn format_laurent_equation(eq: &LaurentEquation) -> String {
    format!("{} = {}", format_coeff(eq.lhs()), format_laurent(eq.rhs()))
}

pub fn format_laurent_rule(rule: &LaurentRule) -> String {
    let image = LaurentPoly::monomial(CoeffPoly::constant(rule.coeff().clone()), rule.x_exp(), rule.y_exp());
    format!("x'' = {}", format_laurent(&image))
}
