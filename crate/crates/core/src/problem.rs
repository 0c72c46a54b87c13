//! Problem files: polynomial expressions, the text format, degrees and
//! compilation to straight-line programs.
//!
//! ```text
//! vars x1 x2
//! matrix 2 3
//! x1 + 2*x2 - 1 | x1*x2 | x2^2 - 3
//! x1 - x2       | 2*x1  | x1^2 + x2
//! ```
//! followed by zero or more `eq <expr>` lines; `#` starts a comment.

use std::fmt;

use num_bigint::BigUint;

use crate::detstart::{DegreeProfile, DetProblem};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::ring::Ring;
use crate::slp::Slp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Syntactic degree: sums over products, maxima over sums.
    pub fn degree(&self) -> u32 {
        match self {
            Expr::Int(_) => 0,
            Expr::Var(_) => 1,
            Expr::Neg(a) => a.degree(),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree().max(b.degree()),
            Expr::Mul(a, b) => a.degree() + b.degree(),
            Expr::Pow(a, k) => a.degree() * k,
        }
    }

    pub fn eval<R: Ring>(&self, ring: &R, xs: &[R::Elem]) -> R::Elem {
        match self {
            Expr::Int(c) => ring.from_base(reduce(ring.base(), c)),
            Expr::Var(i) => xs[*i].clone(),
            Expr::Neg(a) => ring.neg(&a.eval(ring, xs)),
            Expr::Add(a, b) => ring.add(&a.eval(ring, xs), &b.eval(ring, xs)),
            Expr::Sub(a, b) => ring.sub(&a.eval(ring, xs), &b.eval(ring, xs)),
            Expr::Mul(a, b) => ring.mul(&a.eval(ring, xs), &b.eval(ring, xs)),
            Expr::Pow(a, k) => {
                let base = a.eval(ring, xs);
                let mut acc = ring.one();
                for bit in (0..32 - k.leading_zeros()).rev() {
                    acc = ring.mul(&acc, &acc);
                    if k >> bit & 1 == 1 {
                        acc = ring.mul(&acc, &base);
                    }
                }
                acc
            }
        }
    }

    fn write(&self, out: &mut fmt::Formatter<'_>, vars: &[String]) -> fmt::Result {
        let paren = |e: &Expr, out: &mut fmt::Formatter<'_>, wrap: bool| -> fmt::Result {
            if wrap {
                write!(out, "(")?;
                e.write(out, vars)?;
                write!(out, ")")
            } else {
                e.write(out, vars)
            }
        };
        let is_sum = |e: &Expr| matches!(e, Expr::Add(..) | Expr::Sub(..));
        match self {
            Expr::Int(c) => write!(out, "{c}"),
            Expr::Var(i) => write!(out, "{}", vars[*i]),
            Expr::Neg(a) => {
                write!(out, "-")?;
                paren(a, out, is_sum(a) || matches!(**a, Expr::Mul(..)))
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(out, vars)?;
                write!(out, "{}", if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                paren(b, out, is_sum(b))
            }
            Expr::Mul(a, b) => {
                paren(a, out, is_sum(a))?;
                write!(out, "*")?;
                paren(b, out, is_sum(b) || matches!(**b, Expr::Mul(..)))
            }
            Expr::Pow(a, k) => {
                paren(a, out, !matches!(**a, Expr::Int(_) | Expr::Var(_)))?;
                write!(out, "^{k}")
            }
        }
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Expr, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write(f, self.1)
            }
        }
        D(self, vars)
    }
}

fn reduce(f: &PrimeField, c: &BigUint) -> Fp {
    let r = c % f.prime();
    f.from_u64(u64::try_from(&r).expect("residue fits"))
}

/// A parsed problem: `rank F < p` and `G = 0` in the declared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub vars: Vec<String>,
    pub p: usize,
    pub q: usize,
    /// Row-major `p×q`.
    pub f: Vec<Expr>,
    pub g: Vec<Expr>,
}

impl ProblemSpec {
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn s(&self) -> usize {
        self.g.len()
    }

    pub fn check_dimension(&self) -> Result<()> {
        let expected = self.q as i64 - self.p as i64 + self.s() as i64 + 1;
        if self.n() as i64 != expected {
            return Err(Error::DimensionMismatch { n: self.n(), expected });
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<DegreeProfile> {
        self.check_dimension()?;
        let degs: Vec<u32> = self.f.iter().map(Expr::degree).collect();
        DegreeProfile::from_degrees(self.p, self.q, &degs, self.g.iter().map(Expr::degree).collect())
    }

    /// Program with outputs `F` (row-major) then `G`.
    pub fn compile(&self, f: &PrimeField) -> Result<DetProblem> {
        let fg = Slp::build(f, self.n(), |b, xs| {
            self.f.iter().chain(&self.g).map(|e| e.eval(b, xs)).collect()
        });
        DetProblem::new(self.n(), self.p, self.q, self.s(), fg)
    }

    pub fn parse(text: &str) -> Result<ProblemSpec> {
        Parser::default().run(text)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "vars {}", self.vars.join(" "))?;
        writeln!(out, "matrix {} {}", self.p, self.q)?;
        for row in self.f.chunks(self.q) {
            let cells: Vec<String> = row.iter().map(|e| e.display(&self.vars).to_string()).collect();
            writeln!(out, "{}", cells.join(" | "))?;
        }
        for g in &self.g {
            writeln!(out, "eq {}", g.display(&self.vars))?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Parser {
    vars: Option<Vec<String>>,
    dims: Option<(usize, usize)>,
    rows: Vec<Vec<Expr>>,
    g: Vec<Expr>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_ident(w: &str) -> bool {
    let mut cs = w.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Parser {
    fn run(mut self, text: &str) -> Result<ProblemSpec> {
        let mut last = 0;
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            last = ln;
            let line = raw.split('#').next().unwrap_or("");
            let body = line.trim_start();
            if body.trim().is_empty() {
                continue;
            }
            let indent = line.len() - body.len();
            let (word, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let rest_col = indent + word.len() + 2;
            let expecting_rows = self.dims.is_some_and(|(p, _)| self.rows.len() < p);
            match word {
                "vars" if !expecting_rows => self.vars_line(ln, rest, rest_col)?,
                "matrix" if !expecting_rows => self.matrix_line(ln, rest, rest_col, indent)?,
                "eq" if !expecting_rows => {
                    let vars = self.declared(ln, indent)?;
                    self.g.push(parse_expr(rest, vars, ln, rest_col)?);
                }
                _ if expecting_rows => self.row_line(ln, line)?,
                _ => return Err(err(ln, indent + 1, format!("expected 'vars', 'matrix' or 'eq', found '{word}'"))),
            }
        }
        let vars = self.vars.ok_or_else(|| err(last.max(1), 1, "missing 'vars' line"))?;
        let (p, q) = self.dims.ok_or_else(|| err(last.max(1), 1, "missing 'matrix' line"))?;
        if self.rows.len() < p {
            return Err(err(last + 1, 1, format!("expected {p} matrix rows, found {}", self.rows.len())));
        }
        let spec = ProblemSpec {
            vars,
            p,
            q,
            f: self.rows.into_iter().flatten().collect(),
            g: self.g,
        };
        spec.check_dimension()?;
        Ok(spec)
    }

    fn declared(&self, ln: usize, col: usize) -> Result<&[String]> {
        self.vars.as_deref().ok_or_else(|| err(ln, col + 1, "variables must be declared first"))
    }

    fn vars_line(&mut self, ln: usize, rest: &str, col: usize) -> Result<()> {
        if self.vars.is_some() {
            return Err(err(ln, 1, "duplicate 'vars' line"));
        }
        let mut vars: Vec<String> = Vec::new();
        for w in rest.split_whitespace() {
            let c = col + (w.as_ptr() as usize - rest.as_ptr() as usize);
            if !is_ident(w) {
                return Err(err(ln, c, format!("invalid variable name '{w}'")));
            }
            if vars.iter().any(|v| v == w) {
                return Err(err(ln, c, format!("variable '{w}' declared twice")));
            }
            vars.push(w.to_string());
        }
        if vars.is_empty() {
            return Err(err(ln, col, "no variables declared"));
        }
        self.vars = Some(vars);
        Ok(())
    }

    fn matrix_line(&mut self, ln: usize, rest: &str, col: usize, indent: usize) -> Result<()> {
        self.declared(ln, indent)?;
        if self.dims.is_some() {
            return Err(err(ln, indent + 1, "duplicate 'matrix' line"));
        }
        let nums: Vec<&str> = rest.split_whitespace().collect();
        let parse = |w: &str| w.parse::<usize>().ok().filter(|&x| x > 0);
        match nums.as_slice() {
            [a, b] => match (parse(a), parse(b)) {
                (Some(p), Some(q)) if p <= q => self.dims = Some((p, q)),
                (Some(_), Some(_)) => return Err(err(ln, col, "need p <= q")),
                _ => return Err(err(ln, col, "matrix dimensions must be positive integers")),
            },
            _ => return Err(err(ln, col, "expected 'matrix p q'")),
        }
        Ok(())
    }

    fn row_line(&mut self, ln: usize, line: &str) -> Result<()> {
        let (_, q) = self.dims.expect("inside matrix");
        let vars = self.vars.as_deref().expect("declared");
        let cells: Vec<&str> = line.split('|').collect();
        if cells.len() != q {
            return Err(err(ln, 1, format!("expected {q} entries separated by '|', found {}", cells.len())));
        }
        let mut row = Vec::with_capacity(q);
        let mut off = 0;
        for cell in cells {
            row.push(parse_expr(cell, vars, ln, off + 1)?);
            off += cell.len() + 1;
        }
        self.rows.push(row);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Sym(char),
}

/// Parses one expression; `col` is the 1-based column of `src[0]`.
pub fn parse_expr(src: &str, vars: &[String], line: usize, col: usize) -> Result<Expr> {
    let mut toks = Vec::new();
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < cs.len() {
        let (at, c) = cs[i];
        let pos = col + src[..at].chars().count();
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && cs[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = cs.get(j).map_or(src.len(), |x| x.0);
            toks.push((Tok::Int(src[at..end].parse().expect("digits")), pos));
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < cs.len() && (cs[j].1.is_ascii_alphanumeric() || cs[j].1 == '_') {
                j += 1;
            }
            let end = cs.get(j).map_or(src.len(), |x| x.0);
            toks.push((Tok::Ident(src[at..end].to_string()), pos));
            i = j;
        } else if "+-*^()".contains(c) {
            toks.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(err(line, pos, format!("unexpected character '{c}'")));
        }
    }
    let end = col + src.chars().count();
    let mut p = ExprParser {
        toks,
        at: 0,
        vars,
        line,
        end,
    };
    let e = p.sum()?;
    if let Some((t, c)) = p.toks.get(p.at) {
        return Err(err(line, *c, format!("unexpected {}", describe(t))));
    }
    Ok(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(x) => format!("number {x}"),
        Tok::Ident(s) => format!("name '{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
    }
}

struct ExprParser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [String],
    line: usize,
    end: usize,
}

impl ExprParser<'_> {
    fn peek_sym(&self) -> Option<char> {
        match self.toks.get(self.at) {
            Some((Tok::Sym(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.at += 1;
            let r = Box::new(self.product()?);
            e = if c == '+' { Expr::Add(Box::new(e), r) } else { Expr::Sub(Box::new(e), r) };
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.peek_sym() == Some('*') {
            self.at += 1;
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym() == Some('-') {
            self.at += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() != Some('^') {
            return Ok(base);
        }
        self.at += 1;
        match self.toks.get(self.at) {
            Some((Tok::Int(k), c)) => {
                let k = u32::try_from(k).map_err(|_| err(self.line, *c, "exponent too large"))?;
                self.at += 1;
                Ok(Expr::Pow(Box::new(base), k))
            }
            Some((t, c)) => Err(err(self.line, *c, format!("expected a nonnegative integer exponent, found {}", describe(t)))),
            None => Err(err(self.line, self.end, "expected an exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some((t, c)) = self.toks.get(self.at).cloned() else {
            return Err(err(self.line, self.end, "unexpected end of expression"));
        };
        self.at += 1;
        match t {
            Tok::Int(x) => Ok(Expr::Int(x)),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Expr::Var(i)),
                None => Err(err(self.line, c, format!("undeclared variable '{name}'"))),
            },
            Tok::Sym('(') => {
                let e = self.sum()?;
                if self.peek_sym() != Some(')') {
                    let c = self.toks.get(self.at).map_or(self.end, |x| x.1);
                    return Err(err(self.line, c, "expected ')'"));
                }
                self.at += 1;
                Ok(e)
            }
            t => Err(err(self.line, c, format!("unexpected {}", describe(&t)))),
        }
    }
}
