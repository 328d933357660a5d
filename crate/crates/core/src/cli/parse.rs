//! Parser for observable expressions.
//!
//! ```text
//! observable := matrix | expr
//! matrix     := "[" row { "," row } "]"
//! row        := "[" expr { "," expr } "]"
//! expr       := [ "+" | "-" ] term { ( "+" | "-" ) term }
//! term       := unary { ( "*" | "/" ) unary }
//! unary      := "-" unary | power
//! power      := atom [ "^" [ "-" ] integer ]
//! atom       := integer | "(" expr ")" | "h" | "u" | "zeta" integer
//!             | "y" integer | "z" integer
//! ```
//!
//! Products are commutative products of symbols (the symbol of a normal
//! ordered element), not Moyal products. Division is only by constants.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exactnum::Cyclo;
use crate::model::Model;
use crate::weyl::{MatrixWeyl, Weyl};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Int(text.parse().expect("digits")), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_alphabetic() {
            // identifiers are letters followed by digits: y12, zeta3, h
            let s = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Ident(text), line: l0, col: c0 });
            continue;
        }
        if "+-*/^()[],".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            col += 1;
            i += 1;
            continue;
        }
        return Err(ParseError { line: l0, col: c0, msg: format!("unexpected character '{c}'") });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

/// Polynomial in the model variables with ħ- and u-powers.
#[derive(Clone, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<(Vec<u16>, i32, i32), Cyclo>,
}

impl Poly {
    fn constant(nvars: usize, c: Cyclo) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert((vec![0; nvars], 0, 0), c);
        }
        p
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            let nv = match out.terms.get(k) {
                Some(c) => c + v,
                None => v.clone(),
            };
            if nv.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), nv);
            }
        }
        out
    }

    fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::default();
        for ((ea, ha, ua), ca) in &self.terms {
            for ((eb, hb, ub), cb) in &o.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let t = Poly { terms: [((e, ha + hb, ua + ub), ca * cb)].into_iter().collect() };
                out = out.add(&t);
            }
        }
        out
    }

    /// The inverse of a single term without variables.
    fn invert(&self) -> Option<Poly> {
        if self.terms.len() != 1 {
            return None;
        }
        let ((e, h, u), c) = self.terms.iter().next()?;
        if e.iter().any(|x| *x != 0) {
            return None;
        }
        let inv = c.inv().ok()?;
        Some(Poly { terms: [((e.clone(), -h, -u), inv)].into_iter().collect() })
    }

    pub fn has_u(&self) -> bool {
        self.terms.keys().any(|(_, _, u)| *u != 0)
    }

    pub fn has_vars(&self) -> bool {
        self.terms.keys().any(|(e, _, _)| e.iter().any(|x| *x != 0))
    }
}

/// What identifiers resolve to.
#[derive(Clone, Debug)]
pub struct Scope {
    pub nvars: usize,
    pub k: usize,
    pub order: u32,
}

impl Scope {
    pub fn for_model(m: &Model) -> Scope {
        Scope { nvars: m.nvars(), k: m.k, order: m.order }
    }

    /// Constants only: no variables may appear.
    pub fn scalars(order: u32) -> Scope {
        Scope { nvars: 0, k: 0, order }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.err(&t, format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut neg = false;
        if self.is_sym('+') {
            self.next();
        } else if self.is_sym('-') {
            self.next();
            neg = true;
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.is_sym('+') {
                self.next();
                acc = acc.add(&self.term()?);
            } else if self.is_sym('-') {
                self.next();
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.next();
                acc = acc.mul(&self.unary()?);
            } else if self.is_sym('/') {
                self.next();
                let t = self.peek().clone();
                let d = self.unary()?;
                let Some(inv) = d.invert() else {
                    return self.err(&t, "division is only allowed by a nonzero constant or a power of h or u");
                };
                acc = acc.mul(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.is_sym('-') {
            self.next();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        self.next();
        let mut neg = false;
        if self.is_sym('-') {
            self.next();
            neg = true;
        }
        let t = self.next();
        let Tok::Int(n) = &t.tok else { return self.err(&t, "expected an integer exponent") };
        let Ok(n) = u32::try_from(n) else { return self.err(&t, "exponent too large") };
        let b = if neg {
            match base.invert() {
                Some(b) => b,
                None => return self.err(&t, "negative exponents are only allowed on constants, h and u"),
            }
        } else {
            base
        };
        let mut acc = Poly::constant(self.scope.nvars, Cyclo::one());
        for _ in 0..n {
            acc = acc.mul(&b);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let t = self.next();
        let nv = self.scope.nvars;
        match &t.tok {
            Tok::Int(v) => Ok(Poly::constant(nv, Cyclo::from_rational(BigRational::from_integer(v.clone())))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&t, name),
            Tok::End => self.err(&t, "unexpected end of input"),
            Tok::Sym(c) => self.err(&t, format!("unexpected '{c}'")),
        }
    }

    fn ident(&self, t: &Token, name: &str) -> Result<Poly, ParseError> {
        let nv = self.scope.nvars;
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (head, digits) = name.split_at(split);
        let idx: Option<usize> = if digits.is_empty() { None } else { digits.parse().ok() };
        let single = |e: Vec<u16>, h: i32, u: i32| Poly { terms: [((e, h, u), Cyclo::one())].into_iter().collect() };
        match (head, idx) {
            ("h", None) => Ok(single(vec![0; nv], 1, 0)),
            ("u", None) => Ok(single(vec![0; nv], 0, 1)),
            ("zeta", Some(d)) => {
                let nn = self.scope.order as usize;
                if d == 0 || nn % d != 0 {
                    return self.err(t, format!("zeta{d} is not available at group order {nn}"));
                }
                let c = Cyclo::zeta_pow(self.scope.order, (nn / d) as i64);
                Ok(Poly::constant(nv, c))
            }
            ("y" | "z", Some(i)) => {
                if nv == 0 {
                    return self.err(t, format!("variable {name} is not allowed here"));
                }
                let k2 = 2 * self.scope.k;
                let ok = match head {
                    "y" => i >= 1 && i <= k2,
                    _ => i > k2 && i <= nv,
                };
                if !ok {
                    let range = if head == "y" {
                        if k2 == 0 {
                            "there are no y-variables".to_string()
                        } else {
                            format!("expected y1..y{k2}")
                        }
                    } else if k2 == nv {
                        "there are no z-variables".to_string()
                    } else {
                        format!("expected z{}..z{nv}", k2 + 1)
                    };
                    return self.err(t, format!("variable {name} out of range: {range}"));
                }
                let mut e = vec![0u16; nv];
                e[i - 1] = 1;
                Ok(single(e, 0, 0))
            }
            _ => self.err(t, format!("unknown identifier '{name}'")),
        }
    }
}

/// Parses a polynomial expression.
pub fn parse_poly(src: &str, scope: &Scope) -> Result<Poly, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, scope };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses a constant: rationals, ζ-powers, h and u.
pub fn parse_scalar(src: &str, order: u32) -> Result<Poly, ParseError> {
    parse_poly(src, &Scope::scalars(order))
}

/// A parsed observable and any warnings produced on the way.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub value: MatrixWeyl,
    pub warnings: Vec<String>,
}

fn poly_to_weyl(m: &Model, p: &Poly, t: &Token, warnings: &mut Vec<String>) -> Result<Weyl, ParseError> {
    let mut w = Weyl::zero_for(m);
    for ((e, h, u), c) in &p.terms {
        if *u != 0 {
            return Err(ParseError { line: t.line, col: t.col, msg: "u may not appear in an observable".into() });
        }
        let wt = e.iter().map(|x| *x as i64).sum::<i64>() + 2 * *h as i64;
        if wt > m.weight_trunc || *h as i64 > m.hbar_trunc {
            warnings.push(format!(
                "line {}, column {}: term of weight {wt} and h-order {h} lies above the truncation and was dropped",
                t.line, t.col
            ));
            continue;
        }
        w.add_term(e.clone(), *h, c.clone());
    }
    Ok(w)
}

/// Parses an observable: a scalar expression (taken times the identity) or
/// a bracketed matrix of expressions.
pub fn parse_observable(src: &str, m: &Model) -> Result<Parsed, ParseError> {
    let scope = Scope::for_model(m);
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, scope: &scope };
    let mut warnings = Vec::new();
    let value = if p.is_sym('[') {
        let open = p.next();
        let mut rows: Vec<Vec<(Poly, Token)>> = Vec::new();
        loop {
            p.expect('[')?;
            let mut row = Vec::new();
            loop {
                let t = p.peek().clone();
                row.push((p.expr()?, t));
                if p.is_sym(',') {
                    p.next();
                } else {
                    break;
                }
            }
            p.expect(']')?;
            rows.push(row);
            if p.is_sym(',') {
                p.next();
            } else {
                break;
            }
        }
        p.expect(']')?;
        if rows.len() != m.r || rows.iter().any(|r| r.len() != m.r) {
            return p.err(&open, format!("matrix must be {}x{} to match the model rank", m.r, m.r));
        }
        let mut entries = Vec::new();
        for row in &rows {
            for (poly, t) in row {
                entries.push(poly_to_weyl(m, poly, t, &mut warnings)?);
            }
        }
        MatrixWeyl::from_entries(m.r, entries)
    } else {
        let t = p.peek().clone();
        let e = p.expr()?;
        MatrixWeyl::scalar(m, &poly_to_weyl(m, &e, &t, &mut warnings)?)
    };
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(Parsed { value, warnings })
}

/// Converts a variable-free polynomial to (u, h, coefficient) triples.
pub fn scalar_terms(p: &Poly) -> Vec<(i32, i32, Cyclo)> {
    p.terms.iter().map(|((_, h, u), c)| (*u, *h, c.clone())).collect()
}

/// Reads a constant with no h or u.
pub fn plain_constant(p: &Poly) -> Option<Cyclo> {
    let mut acc = Cyclo::zero();
    for ((e, h, u), c) in &p.terms {
        if *h != 0 || *u != 0 || e.iter().any(|x| *x != 0) {
            return None;
        }
        acc = &acc + c;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_expressions() {
        let p = parse_scalar("(3/2)*zeta3*h^-1*u^2", 3).unwrap();
        assert_eq!(scalar_terms(&p), vec![(2, -1, &Cyclo::frac(3, 2) * &Cyclo::zeta_pow(3, 1))]);
        assert_eq!(plain_constant(&parse_scalar("-1/3 + 1", 1).unwrap()), Some(Cyclo::frac(2, 3)));
        assert!(plain_constant(&parse_scalar("h", 1).unwrap()).is_none());
    }

    #[test]
    fn division() {
        assert_eq!(scalar_terms(&parse_scalar("2/h", 1).unwrap()), vec![(0, -1, Cyclo::from_int(2))]);
        let m = Model::build(1, 1, 1, 1, &[], None).unwrap();
        assert!(parse_observable("1/y1", &m).is_err());
        assert!(parse_scalar("1/0", 1).is_err());
    }

    #[test]
    fn u_is_not_an_observable() {
        let m = Model::build(1, 1, 1, 1, &[], None).unwrap();
        assert!(parse_observable("u*y1", &m).is_err());
    }

    #[test]
    fn matrices_must_match_rank() {
        let m = Model::build(1, 1, 2, 1, &[], None).unwrap();
        assert!(parse_observable("[[y1, 0], [0, y2]]", &m).is_ok());
        assert!(parse_observable("[[y1, 0]]", &m).is_err());
    }
}
