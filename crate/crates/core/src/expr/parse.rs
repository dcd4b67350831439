//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['-'] integer | '(' ['-'] integer ')' | exponent '^' exponent
//! primary := number | '(' expr ')' | ident ['(' jets ')'] ['[' jets ']']
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use super::{Coeff, Expr, FuncSym, JetVar};

/// Declared fields and function symbols that bare identifiers resolve to.
#[derive(Clone, Debug, Default)]
pub struct Context {
    fields: BTreeSet<Arc<str>>,
    funcs: BTreeMap<Arc<str>, FuncSym>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn with_fields<I, S>(fields: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut c = Context::new();
        for f in fields {
            c.declare_field(f.as_ref());
        }
        c
    }

    pub fn declare_field(&mut self, name: &str) {
        self.fields.insert(Arc::from(name));
    }

    /// Declares (or redeclares) a function symbol and returns its base atom.
    pub fn declare_func(&mut self, name: &str, deps: impl IntoIterator<Item = JetVar>) -> FuncSym {
        let f = FuncSym::new(name, deps);
        self.funcs.insert(f.name_arc().clone(), f.clone());
        f
    }

    pub fn insert_func(&mut self, f: FuncSym) {
        self.funcs.insert(f.name_arc().clone(), f.base());
    }

    pub fn is_field(&self, name: &str) -> bool {
        self.fields.contains(name)
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|s| s.as_ref())
    }

    pub fn func(&self, name: &str) -> Option<&FuncSym> {
        self.funcs.get(name)
    }

    pub fn funcs(&self) -> impl Iterator<Item = &FuncSym> {
        self.funcs.values()
    }

    /// Canonical field name, sharing the stored allocation.
    fn field_arc(&self, name: &str) -> Option<Arc<str>> {
        self.fields.get(name).cloned()
    }

    /// Merges another context; entries of `other` win on conflict.
    pub fn extend(&mut self, other: &Context) {
        self.fields.extend(other.fields.iter().cloned());
        for (k, v) in &other.funcs {
            self.funcs.insert(k.clone(), v.clone());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Undeclared,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Coeff),
    Ident(String, Option<(u32, u32)>),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn error(&self, line: usize, col: usize, message: String) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            line,
            col,
            message,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push((Tok::End, line, col));
                return Ok(out);
            };
            if c.is_ascii_digit() || c == b'.' {
                let start = self.pos;
                while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    self.bump();
                }
                let int_part = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                let mut frac_part = String::new();
                if self.peek() == Some(b'.') {
                    self.bump();
                    let fs = self.pos;
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.bump();
                    }
                    frac_part = std::str::from_utf8(&self.src[fs..self.pos]).unwrap().to_string();
                }
                if int_part.is_empty() && frac_part.is_empty() {
                    return Err(self.error(line, col, "malformed number".into()));
                }
                let digits = format!("{int_part}{frac_part}");
                let n: BigInt = digits.parse().unwrap();
                let d = num_traits::pow(BigInt::from(10), frac_part.len());
                out.push((Tok::Num(Coeff::new(n, d)), line, col));
            } else if c.is_ascii_alphabetic() {
                let start = self.pos;
                while matches!(self.peek(), Some(d) if d.is_ascii_alphanumeric()) {
                    self.bump();
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                let mut suffix = None;
                if self.peek() == Some(b'_') {
                    self.bump();
                    let (mut t, mut x) = (0u32, 0u32);
                    while self.peek() == Some(b't') {
                        self.bump();
                        t += 1;
                    }
                    while self.peek() == Some(b'x') {
                        self.bump();
                        x += 1;
                    }
                    if t + x == 0 || matches!(self.peek(), Some(d) if d.is_ascii_alphanumeric() || d == b'_') {
                        return Err(self.error(
                            self.line,
                            self.col,
                            format!("invalid jet suffix on `{name}`: expected t's followed by x's"),
                        ));
                    }
                    suffix = Some((t, x));
                }
                out.push((Tok::Ident(name, suffix), line, col));
            } else if b"+-*/^()[],".contains(&c) {
                self.bump();
                out.push((Tok::Op(c as char), line, col));
            } else {
                let ch = std::str::from_utf8(&self.src[self.pos..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                return Err(self.error(line, col, format!("unexpected character `{ch}`")));
            }
        }
    }
}

struct Parser<'c> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    ctx: &'c Context,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, message: String) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            kind,
            line,
            col,
            message,
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax, message.into())
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(c) => format!("number `{c}`"),
            Tok::Ident(n, _) => format!("identifier `{n}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`, found {}", Self::describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.next();
                    acc.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.next();
                    acc.push(-self.term()?);
                }
                _ => return Ok(Expr::sum(acc)),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.next();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = acc
                        .checked_div(&rhs)
                        .ok_or_else(|| self.syntax("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.next();
            return Ok(-self.unary()?);
        }
        if *self.peek() == Tok::Op('+') {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.next();
        let e = self.exponent()?;
        base.pow(e).ok_or_else(|| self.syntax("zero raised to a negative power"))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.next();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.next();
        }
        let v = match self.next() {
            Tok::Num(c) if c.is_integer() => {
                let n: i64 = c.to_integer().try_into().map_err(|_| self.syntax("exponent too large"))?;
                if n > 10_000 {
                    return Err(self.syntax("exponent too large"));
                }
                n as i32
            }
            t => {
                return Err(self.syntax(format!("expected integer exponent, found {}", Self::describe(&t))));
            }
        };
        if paren {
            self.expect(')')?;
        }
        let v = if neg { -v } else { v };
        if *self.peek() == Tok::Op('^') {
            self.next();
            let rest = self.exponent()?;
            if rest < 0 {
                return Err(self.syntax("negative exponent in a power tower"));
            }
            let r = (v as i64).checked_pow(rest as u32).filter(|r| r.abs() <= 10_000);
            return r.map(|r| r as i32).ok_or_else(|| self.syntax("exponent too large"));
        }
        Ok(v)
    }

    fn jet(&mut self) -> Result<JetVar, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Ident(name, suffix) => {
                let field = self.ctx.field_arc(&name).ok_or(ParseError {
                    kind: ParseErrorKind::Undeclared,
                    line,
                    col,
                    message: format!("undeclared field `{name}`"),
                })?;
                let (t, x) = suffix.unwrap_or((0, 0));
                Ok(JetVar::new(field, t, x))
            }
            t => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                line,
                col,
                message: format!("expected a jet variable, found {}", Self::describe(&t)),
            }),
        }
    }

    fn jet_list(&mut self, close: char) -> Result<Vec<JetVar>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Op(close) {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(self.jet()?);
            match self.next() {
                Tok::Op(',') => {}
                Tok::Op(c) if c == close => return Ok(out),
                t => {
                    self.pos -= 1;
                    return Err(self.syntax(format!("expected `,` or `{close}`, found {}", Self::describe(&t))));
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Num(c) => Ok(Expr::rational(c)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name, suffix) => {
                let explicit = if *self.peek() == Tok::Op('(') {
                    if suffix.is_some() {
                        return Err(self.syntax(format!("jet `{name}` cannot be applied to arguments")));
                    }
                    self.next();
                    Some(self.jet_list(')')?)
                } else {
                    None
                };
                let sym = match (explicit, suffix) {
                    (Some(deps), _) => FuncSym::new(name.as_str(), deps),
                    (None, Some((t, x))) => {
                        let Some(field) = self.ctx.field_arc(&name) else {
                            return Err(ParseError {
                                kind: ParseErrorKind::Undeclared,
                                line,
                                col,
                                message: format!("undeclared field `{name}`"),
                            });
                        };
                        return self.no_brackets(Expr::jet(JetVar::new(field, t, x)), &name);
                    }
                    (None, None) => {
                        if let Some(field) = self.ctx.field_arc(&name) {
                            return self.no_brackets(Expr::jet(JetVar::new(field, 0, 0)), &name);
                        }
                        match self.ctx.func(&name) {
                            Some(f) => f.clone(),
                            None => {
                                return Err(ParseError {
                                    kind: ParseErrorKind::Undeclared,
                                    line,
                                    col,
                                    message: format!("undeclared identifier `{name}`"),
                                })
                            }
                        }
                    }
                };
                let mut sym = sym;
                if *self.peek() == Tok::Op('[') {
                    self.next();
                    let (dl, dc) = self.here();
                    for v in self.jet_list(']')? {
                        sym = sym.differentiate(&v).ok_or(ParseError {
                            kind: ParseErrorKind::Undeclared,
                            line: dl,
                            col: dc,
                            message: format!("`{}` does not depend on `{v}`", sym.name()),
                        })?;
                    }
                }
                Ok(Expr::func(sym))
            }
            t => {
                self.pos = self.pos.saturating_sub(usize::from(t != Tok::End));
                Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    line,
                    col,
                    message: format!("unexpected {}", Self::describe(&t)),
                })
            }
        }
    }

    fn no_brackets(&self, e: Expr, name: &str) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('[') {
            return Err(self.syntax(format!("field `{name}` cannot carry derivative brackets")));
        }
        Ok(e)
    }
}

/// Parses `text` into normal form, resolving identifiers through `ctx`.
pub fn parse(text: &str, ctx: &Context) -> Result<Expr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0, ctx };
    if *p.peek() == Tok::End {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.syntax(format!("unexpected {}", Parser::describe(p.peek()))));
    }
    Ok(e)
}

/// Parses a single jet variable such as `rho_xx`.
pub fn parse_jet(text: &str, ctx: &Context) -> Result<JetVar, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0, ctx };
    let j = p.jet()?;
    if *p.peek() != Tok::End {
        return Err(p.syntax(format!("unexpected {}", Parser::describe(p.peek()))));
    }
    Ok(j)
}

/// Parses a dependency list body such as `rho, eps, rho_x` (no parentheses).
pub fn parse_jet_list(text: &str, ctx: &Context) -> Result<Vec<JetVar>, ParseError> {
    let body = format!("{text})");
    let toks = Lexer::new(&body).tokens()?;
    let mut p = Parser { toks, pos: 0, ctx };
    let out = p.jet_list(')')?;
    if *p.peek() != Tok::End {
        return Err(p.syntax(format!("unexpected {}", Parser::describe(p.peek()))));
    }
    Ok(out)
}

/// Parses `f[rho, eps]` or `f(rho)[rho]` (a function symbol, possibly a derivative).
pub fn parse_func(text: &str, ctx: &Context) -> Result<FuncSym, ParseError> {
    let e = parse(text, ctx)?;
    let atoms = e.atoms();
    if e.numer().len() == 1 && e.denom().is_one() && atoms.len() == 1 {
        let (m, c) = &e.numer().terms()[0];
        if c.is_one() && m.degree() == 1 {
            if let Some(f) = atoms.iter().next().unwrap().as_func() {
                return Ok(f.clone());
            }
        }
    }
    Err(ParseError {
        kind: ParseErrorKind::Syntax,
        line: 1,
        col: 1,
        message: format!("`{text}` is not a function symbol"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        let mut c = Context::with_fields(["rho", "v", "eps", "gamma", "a", "b"]);
        c.declare_func("s", [JetVar::field_var("rho"), JetVar::field_var("eps"), JetVar::new("rho", 0, 1)]);
        c
    }

    #[test]
    fn product_of_fields() {
        let e = parse("rho*v", &ctx()).unwrap();
        assert_eq!(e, Expr::jet(JetVar::field_var("rho")) * Expr::jet(JetVar::field_var("v")));
    }

    #[test]
    fn explicit_function_application() {
        let e = parse("rho_x^2 * s1(rho,gamma)", &ctx()).unwrap();
        let s1 = FuncSym::new("s1", [JetVar::field_var("rho"), JetVar::field_var("gamma")]);
        assert_eq!(e, Expr::jet(JetVar::new("rho", 0, 1)).pow(2).unwrap() * Expr::func(s1));
    }

    #[test]
    fn ring_identity_normalizes_to_zero() {
        assert!(parse("(a+b)^2 - a^2 - 2*a*b - b^2", &ctx()).unwrap().is_zero());
    }

    #[test]
    fn derivative_brackets() {
        let e = parse("s[rho_x, rho]", &ctx()).unwrap();
        let s = ctx().func("s").unwrap().clone();
        let d = s.differentiate(&JetVar::new("rho", 0, 1)).unwrap().differentiate(&JetVar::field_var("rho")).unwrap();
        assert_eq!(e, Expr::func(d));
        assert!(parse("s[v]", &ctx()).is_err());
    }

    #[test]
    fn decimals_and_precedence() {
        let c = ctx();
        assert_eq!(parse("0.5*a", &c).unwrap(), parse("a/2", &c).unwrap());
        assert_eq!(parse("-a^2", &c).unwrap(), -parse("a*a", &c).unwrap());
        assert_eq!(parse("a^2^2", &c).unwrap(), parse("a^4", &c).unwrap());
        assert_eq!(parse("a^-1", &c).unwrap(), parse("1/a", &c).unwrap());
        assert_eq!(parse("2/3*a", &c).unwrap(), parse("(2*a)/3", &c).unwrap());
        assert_eq!(parse("a - b - a", &c).unwrap(), -parse("b", &c).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let c = ctx();
        let e = parse("rho +\n  * v", &c).unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse("rho + zeta", &c).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Undeclared);
        assert_eq!((e.line, e.col), (1, 7));
        assert!(parse("rho_q", &c).is_err());
        assert!(parse("(rho", &c).is_err());
        assert!(parse("", &c).is_err());
        assert!(parse("rho^a", &c).is_err());
        assert!(parse("k(zeta)", &c).is_err());
    }

    #[test]
    fn constants_and_jets() {
        let c = ctx();
        let k = parse("k()", &c).unwrap();
        assert_eq!(k, Expr::func(FuncSym::new("k", [])));
        assert_eq!(parse_jet("rho_txx", &c).unwrap(), JetVar::new("rho", 1, 2));
        assert_eq!(parse_jet_list("rho, eps", &c).unwrap().len(), 2);
    }
}
