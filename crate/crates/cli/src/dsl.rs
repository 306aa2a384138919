//! The line-oriented input language.
//!
//! ```text
//! field 5
//! ring S vars x rel x^3
//! ring T vars y z rel y^2 y*z z^2
//! fiber R = S * T
//! module M over R coker [ x , y ; 0 , x^2 ]
//! resolve M len 8
//! tor M M max 6
//! scan theorems seed 42 count 200
//! verify dvr-example degree 12
//! ```
//!
//! One statement per line; `#` starts a comment.

use std::fmt;

/// A power product `v1^a1 * v2^a2 …` in the order written.
pub type Monomial = Vec<(String, u32)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub vars: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Field { p: u32 },
    Ring { name: String, vars: Vec<String>, rels: Vec<Monomial> },
    Fiber { name: String, left: String, right: String },
    Module { name: String, ring: String, rows: Vec<Vec<Poly>> },
    Resolve { module: String, length: usize },
    Tor { left: String, right: String, max: usize },
    Scan { seed: u64, count: usize },
    VerifyDvr { degree: usize },
}

/// A statement and where it starts; equality ignores the position.
#[derive(Debug, Clone)]
pub struct Located {
    pub line: usize,
    pub stmt: Statement,
}

impl PartialEq for Located {
    fn eq(&self, other: &Self) -> bool {
        self.stmt == other.stmt
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputModel {
    pub statements: Vec<Located>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

fn lex(line: &str, lineno: usize) -> Result<Vec<(usize, Tok)>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| Diagnostic {
                line: lineno,
                column: col,
                message: format!("integer `{text}` is too large"),
            })?;
            out.push((col, Tok::Int(n)));
        } else if "=*^+-,;[]".contains(c) {
            out.push((col, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Diagnostic {
                line: lineno,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn err<T>(&self, message: String) -> Result<T, Diagnostic> {
        let column = self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col);
        Err(Diagnostic {
            line: self.line,
            column,
            message,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn found(&self) -> String {
        self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of line".into())
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}, found {}", self.found())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`, found {}", self.found())),
        }
    }

    fn int(&mut self, what: &str) -> Result<u64, Diagnostic> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected {what}, found {}", self.found())),
        }
    }

    fn small(&mut self, what: &str) -> Result<usize, Diagnostic> {
        let n = self.int(what)?;
        usize::try_from(n).or_else(|_| self.err(format!("{what} is too large")))
    }

    fn sym(&mut self, c: char) -> Result<(), Diagnostic> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {}", self.found()))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected {} after the statement", self.found()))
        }
    }

    /// `factor ('*' factor)*` with integer factors folded into the coefficient.
    fn term(&mut self, sign: i64) -> Result<Term, Diagnostic> {
        let mut coeff = sign;
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = i64::try_from(*n).or_else(|_| self.err("coefficient is too large".into()))?;
                    coeff = coeff
                        .checked_mul(n)
                        .map_or_else(|| self.err("coefficient is too large".into()), Ok)?;
                    self.pos += 1;
                }
                Some(Tok::Ident(v)) => {
                    let v = v.clone();
                    self.pos += 1;
                    let e = if self.eat('^') {
                        let e = self.int("an exponent")?;
                        u32::try_from(e).or_else(|_| self.err("exponent is too large".into()))?
                    } else {
                        1
                    };
                    vars.push((v, e));
                }
                _ => return self.err(format!("expected a coefficient or variable, found {}", self.found())),
            }
            if !self.eat('*') {
                return Ok(Term { coeff, vars });
            }
        }
    }

    fn poly(&mut self) -> Result<Poly, Diagnostic> {
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') { -1 } else { 1 };
        loop {
            terms.push(self.term(sign)?);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(Poly { terms });
            }
        }
    }

    fn monomial(&mut self) -> Result<Monomial, Diagnostic> {
        let t = self.term(1)?;
        if t.coeff != 1 {
            return self.err("relations are monomials without coefficients".into());
        }
        Ok(t.vars)
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Poly>>, Diagnostic> {
        self.sym('[')?;
        let mut rows = Vec::new();
        if self.eat(']') {
            return Ok(rows);
        }
        let mut row = Vec::new();
        loop {
            row.push(self.poly()?);
            if self.eat(',') {
                continue;
            }
            if self.eat(';') {
                rows.push(std::mem::take(&mut row));
                continue;
            }
            self.sym(']')?;
            rows.push(row);
            break;
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return self.err("rows of the presentation have different lengths".into());
        }
        Ok(rows)
    }

    fn statement(&mut self) -> Result<Statement, Diagnostic> {
        let head = self.ident("a statement keyword")?;
        let stmt = match head.as_str() {
            "field" => {
                let p = self.int("a prime")?;
                Statement::Field {
                    p: u32::try_from(p).or_else(|_| self.err("modulus is too large".into()))?,
                }
            }
            "ring" => {
                let name = self.ident("a ring name")?;
                self.keyword("vars")?;
                let mut vars = Vec::new();
                while let Some(Tok::Ident(v)) = self.peek() {
                    if v == "rel" {
                        break;
                    }
                    vars.push(v.clone());
                    self.pos += 1;
                }
                if vars.is_empty() {
                    return self.err("a ring needs at least one variable".into());
                }
                self.keyword("rel")?;
                let mut rels = vec![self.monomial()?];
                while !self.at_end() {
                    rels.push(self.monomial()?);
                }
                Statement::Ring { name, vars, rels }
            }
            "fiber" => {
                let name = self.ident("a ring name")?;
                self.sym('=')?;
                let left = self.ident("a ring name")?;
                self.sym('*')?;
                let right = self.ident("a ring name")?;
                Statement::Fiber { name, left, right }
            }
            "module" => {
                let name = self.ident("a module name")?;
                self.keyword("over")?;
                let ring = self.ident("a ring name")?;
                self.keyword("coker")?;
                let rows = self.matrix()?;
                Statement::Module { name, ring, rows }
            }
            "resolve" => {
                let module = self.ident("a module name")?;
                self.keyword("len")?;
                Statement::Resolve {
                    module,
                    length: self.small("a length")?,
                }
            }
            "tor" => {
                let left = self.ident("a module name")?;
                let right = self.ident("a module name")?;
                self.keyword("max")?;
                Statement::Tor {
                    left,
                    right,
                    max: self.small("a degree")?,
                }
            }
            "scan" => {
                self.keyword("theorems")?;
                self.keyword("seed")?;
                let seed = self.int("a seed")?;
                self.keyword("count")?;
                Statement::Scan {
                    seed,
                    count: self.small("a count")?,
                }
            }
            "verify" => {
                self.keyword("dvr")?;
                self.sym('-')?;
                self.keyword("example")?;
                self.keyword("degree")?;
                Statement::VerifyDvr {
                    degree: self.small("a degree bound")?,
                }
            }
            other => {
                self.pos -= 1;
                return self.err(format!("unknown statement `{other}`"));
            }
        };
        self.end()?;
        Ok(stmt)
    }
}

pub fn parse(text: &str) -> Result<InputModel, Diagnostic> {
    let mut statements = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let toks = lex(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser {
            toks,
            pos: 0,
            line: lineno,
            end_col: line.chars().count() + 1,
        };
        let stmt = p.statement()?;
        statements.push(Located { line: lineno, stmt });
    }
    Ok(InputModel { statements })
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (k, (v, e)) in m.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        write!(f, "{v}")?;
        if *e != 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff < 0;
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = t.coeff.unsigned_abs();
            if t.vars.is_empty() {
                write!(f, "{c}")?;
            } else {
                if c != 1 {
                    write!(f, "{c}*")?;
                }
                write_monomial(f, &t.vars)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Field { p } => write!(f, "field {p}"),
            Statement::Ring { name, vars, rels } => {
                write!(f, "ring {name} vars {} rel", vars.join(" "))?;
                for r in rels {
                    write!(f, " ")?;
                    write_monomial(f, r)?;
                }
                Ok(())
            }
            Statement::Fiber { name, left, right } => write!(f, "fiber {name} = {left} * {right}"),
            Statement::Module { name, ring, rows } => {
                write!(f, "module {name} over {ring} coker [")?;
                for (k, row) in rows.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ;")?;
                    }
                    for (j, e) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, " ,")?;
                        }
                        write!(f, " {e}")?;
                    }
                }
                write!(f, " ]")
            }
            Statement::Resolve { module, length } => write!(f, "resolve {module} len {length}"),
            Statement::Tor { left, right, max } => write!(f, "tor {left} {right} max {max}"),
            Statement::Scan { seed, count } => write!(f, "scan theorems seed {seed} count {count}"),
            Statement::VerifyDvr { degree } => write!(f, "verify dvr-example degree {degree}"),
        }
    }
}

impl fmt::Display for InputModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.stmt)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_canonical_script() {
        let m = parse(
            "field 5\nring S vars x rel x^3\nring T vars y z rel y^2 y*z z^2 # square zero\n\nfiber R = S * T\nmodule M over R coker [ x , y ; 0 , 2*x^2 - z ]\ntor M M max 6\nverify dvr-example degree 12\n",
        )
        .unwrap();
        assert_eq!(m.statements.len(), 7);
        assert_eq!(m.statements[4].line, 6);
        match &m.statements[4].stmt {
            Statement::Module { rows, .. } => {
                assert_eq!(rows.len(), 2);
                assert_eq!(rows[1][1].terms[1], Term { coeff: -1, vars: vec![("z".into(), 1)] });
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("field 5\nring S vars x rel x^\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 21));
        let e = parse("module M over R coker [ x , y ; z ]").unwrap_err();
        assert!(e.message.contains("different lengths"));
        let e = parse("frobnicate").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse("field 5 $").unwrap_err();
        assert_eq!(e.column, 9);
    }

    #[test]
    fn pretty_print_round_trips() {
        let text = "field 7\nring S vars x u rel x^2 x*u u^3\nmodule M over S coker [ -x + 3*u^2 , 0 ; x*u , 1 ]\nmodule Z over S coker [ ]\nscan theorems seed 1 count 2\n";
        let m = parse(text).unwrap();
        assert_eq!(parse(&m.to_string()).unwrap(), m);
    }
}
