//! Recursive-descent parser for model files.
//!
//! Expressions are parsed to a small AST and then evaluated against the
//! declarations seen so far, either as differential polynomials or, inside
//! `operator` blocks, as operators (where `*` is composition).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::lexer::{tokenize, Pos, Tok, Token};
use super::model::Model;
use super::FrontendError;
use crate::jet::{DiffPoly, EvolutionSystem, Space};
use crate::operator::PseudoDiffOp;
use crate::ring::Rational;

#[derive(Clone, Debug)]
enum Kind {
    Num(BigInt),
    Name(String),
    /// `u{k}`
    Jet(String, usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug)]
struct Expr {
    kind: Kind,
    pos: Pos,
}

enum Value {
    Poly(DiffPoly),
    Op(PseudoDiffOp),
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    model: Model,
    declared: bool,
}

fn semantic(pos: Pos, message: impl Into<String>) -> FrontendError {
    FrontendError::Semantic {
        pos,
        message: message.into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let t = self.peek();
        FrontendError::Parse {
            pos: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<Pos, FrontendError> {
        if self.is_sym(c) {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[&format!("`{c}`")]))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Pos), FrontendError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), FrontendError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&[&format!("`{kw}`")])),
        }
    }

    fn expect_usize(&mut self) -> Result<usize, FrontendError> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                let pos = self.bump().pos;
                n.to_usize()
                    .ok_or_else(|| semantic(pos, "integer out of range"))
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn space(&self) -> Space {
        Space::new(self.model.depvars.len(), self.model.eps_order)
    }

    fn parse_model(&mut self) -> Result<(), FrontendError> {
        loop {
            let (word, pos) = match self.peek().tok.clone() {
                Tok::Eof => return Ok(()),
                Tok::Ident(w) => (w, self.peek().pos),
                _ => {
                    return Err(self.error(&[
                        "`set`",
                        "`depvars`",
                        "`system`",
                        "`operator`",
                        "`char`",
                        "`density`",
                    ]))
                }
            };
            match word.as_str() {
                "set" => self.parse_set()?,
                "depvars" => self.parse_depvars(pos)?,
                "system" => self.parse_system()?,
                "operator" => self.parse_operator()?,
                "char" => self.parse_char()?,
                "density" => self.parse_density()?,
                _ => {
                    return Err(self.error(&[
                        "`set`",
                        "`depvars`",
                        "`system`",
                        "`operator`",
                        "`char`",
                        "`density`",
                    ]))
                }
            }
        }
    }

    fn parse_set(&mut self) -> Result<(), FrontendError> {
        self.bump();
        let (key, pos) = self.expect_ident()?;
        self.expect_sym('=')?;
        let value = self.expect_usize()?;
        self.expect_sym(';')?;
        match key.as_str() {
            "eps_order" => {
                if self.declared {
                    return Err(semantic(
                        pos,
                        "eps_order must be set before any declaration",
                    ));
                }
                self.model.eps_order = value;
            }
            "max_jet_order" => self.model.max_jet_order = value,
            _ => {
                return Err(FrontendError::Parse {
                    pos,
                    expected: vec!["`eps_order`".into(), "`max_jet_order`".into()],
                    found: format!("identifier `{key}`"),
                })
            }
        }
        Ok(())
    }

    fn parse_depvars(&mut self, pos: Pos) -> Result<(), FrontendError> {
        self.bump();
        if self.declared {
            return Err(semantic(pos, "depvars must come before any declaration"));
        }
        let mut names = Vec::new();
        loop {
            let (name, npos) = self.expect_ident()?;
            if name.contains('_') || RESERVED.contains(&name.as_str()) {
                return Err(semantic(
                    npos,
                    format!("`{name}` cannot name a dependent variable"),
                ));
            }
            if names.contains(&name) {
                return Err(semantic(
                    npos,
                    format!("duplicate dependent variable `{name}`"),
                ));
            }
            names.push(name);
            if self.is_sym(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_sym(';')?;
        self.model.depvars = names;
        Ok(())
    }

    fn declare_name(&mut self) -> Result<(String, Pos), FrontendError> {
        self.bump();
        self.declared = true;
        let (name, pos) = self.expect_ident()?;
        if RESERVED.contains(&name.as_str()) || self.jet_of(&name).is_some() {
            return Err(semantic(pos, format!("`{name}` is reserved")));
        }
        Ok((name, pos))
    }

    fn parse_system(&mut self) -> Result<(), FrontendError> {
        let (name, pos) = self.declare_name()?;
        self.expect_sym('{')?;
        self.expect_keyword("rhs")?;
        self.expect_sym(':')?;
        let rhs = self.parse_poly_list()?;
        self.expect_sym(';')?;
        self.expect_sym('}')?;
        if rhs.len() != self.model.depvars.len() {
            return Err(semantic(
                pos,
                format!(
                    "system `{name}` has {} right-hand sides for {} dependent variables",
                    rhs.len(),
                    self.model.depvars.len()
                ),
            ));
        }
        let sys = EvolutionSystem::new(rhs).map_err(|e| semantic(pos, e.to_string()))?;
        if self.model.systems.insert(name.clone(), sys).is_some() {
            return Err(semantic(pos, format!("duplicate system `{name}`")));
        }
        Ok(())
    }

    fn parse_operator(&mut self) -> Result<(), FrontendError> {
        let (name, pos) = self.declare_name()?;
        if self.model.depvars.len() != 1 {
            return Err(semantic(
                pos,
                "operators require a single dependent variable",
            ));
        }
        self.expect_sym('{')?;
        let expr = self.parse_sum()?;
        if self.is_sym(';') {
            self.bump();
        }
        self.expect_sym('}')?;
        let op = match self.eval(&expr, true)? {
            Value::Op(op) => op,
            Value::Poly(p) => PseudoDiffOp::mult(p),
        };
        if self.model.operators.insert(name.clone(), op).is_some() {
            return Err(semantic(pos, format!("duplicate operator `{name}`")));
        }
        Ok(())
    }

    fn parse_char(&mut self) -> Result<(), FrontendError> {
        let (name, pos) = self.declare_name()?;
        self.expect_sym('=')?;
        let q = self.parse_poly_list()?;
        self.expect_sym(';')?;
        if q.len() != self.model.depvars.len() {
            return Err(semantic(
                pos,
                format!(
                    "characteristic `{name}` needs {} components",
                    self.model.depvars.len()
                ),
            ));
        }
        if self.model.characteristics.insert(name.clone(), q).is_some() {
            return Err(semantic(pos, format!("duplicate characteristic `{name}`")));
        }
        Ok(())
    }

    fn parse_density(&mut self) -> Result<(), FrontendError> {
        let (name, pos) = self.declare_name()?;
        self.expect_sym('=')?;
        let expr = self.parse_sum()?;
        let p = self.eval_poly(&expr)?;
        self.expect_sym(';')?;
        if self.model.densities.insert(name.clone(), p).is_some() {
            return Err(semantic(pos, format!("duplicate density `{name}`")));
        }
        Ok(())
    }

    fn parse_poly_list(&mut self) -> Result<Vec<DiffPoly>, FrontendError> {
        let mut out = Vec::new();
        loop {
            let expr = self.parse_sum()?;
            out.push(self.eval_poly(&expr)?);
            if self.is_sym(',') {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn parse_sum(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.parse_product()?;
        while self.is_sym('+') || self.is_sym('-') {
            let t = self.bump();
            let Tok::Sym(op) = t.tok else { unreachable!() };
            let rhs = self.parse_product()?;
            lhs = Expr {
                kind: Kind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos: t.pos,
            };
        }
        Ok(lhs)
    }

    fn parse_product(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.parse_unary()?;
        while self.is_sym('*') || self.is_sym('/') {
            let t = self.bump();
            let Tok::Sym(op) = t.tok else { unreachable!() };
            let rhs = self.parse_unary()?;
            lhs = Expr {
                kind: Kind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos: t.pos,
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, FrontendError> {
        if self.is_sym('-') {
            let pos = self.bump().pos;
            let inner = self.parse_unary()?;
            return Ok(Expr {
                kind: Kind::Neg(Box::new(inner)),
                pos,
            });
        }
        if self.is_sym('+') {
            self.bump();
            return self.parse_unary();
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, FrontendError> {
        let base = self.parse_atom()?;
        if self.is_sym('^') {
            let pos = self.bump().pos;
            let n = self.expect_usize()?;
            let n = u32::try_from(n).map_err(|_| semantic(pos, "exponent too large"))?;
            return Ok(Expr {
                kind: Kind::Pow(Box::new(base), n),
                pos,
            });
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr, FrontendError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr {
                    kind: Kind::Num(n),
                    pos: t.pos,
                })
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_sym('{') {
                    self.bump();
                    let k = self.expect_usize()?;
                    self.expect_sym('}')?;
                    return Ok(Expr {
                        kind: Kind::Jet(name, k),
                        pos: t.pos,
                    });
                }
                Ok(Expr {
                    kind: Kind::Name(name),
                    pos: t.pos,
                })
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.parse_sum()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            _ => Err(self.error(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    /// Jet variable named by `name`, e.g. `u_xx` -> (0, 2).
    fn jet_of(&self, name: &str) -> Option<(usize, usize)> {
        for (alpha, var) in self.model.depvars.iter().enumerate() {
            if name == var {
                return Some((alpha, 0));
            }
            if let Some(rest) = name
                .strip_prefix(var.as_str())
                .and_then(|r| r.strip_prefix('_'))
            {
                if !rest.is_empty() && rest.chars().all(|c| c == 'x') {
                    return Some((alpha, rest.len()));
                }
            }
        }
        None
    }

    fn eval_poly(&self, e: &Expr) -> Result<DiffPoly, FrontendError> {
        match self.eval(e, false)? {
            Value::Poly(p) => Ok(p),
            Value::Op(_) => Err(semantic(e.pos, "operator where an expression is expected")),
        }
    }

    fn eval_name(&self, name: &str, pos: Pos, allow_ops: bool) -> Result<Value, FrontendError> {
        let s = self.space();
        let value = match name {
            "x" => Value::Poly(s.x()),
            "t" => Value::Poly(s.t()),
            "eps" => Value::Poly(s.eps()),
            "Dx" | "Dxi" if !allow_ops => {
                return Err(semantic(pos, format!("`{name}` outside an operator block")))
            }
            "Dx" => Value::Op(PseudoDiffOp::dx(s)),
            "Dxi" => Value::Op(PseudoDiffOp::dxi(s)),
            _ => {
                if let Some((alpha, k)) = self.jet_of(name) {
                    return Ok(Value::Poly(s.jet(alpha, k)));
                }
                let op = self.model.operators.get(name);
                let ch = self.model.characteristics.get(name);
                let de = self.model.densities.get(name);
                let hits = [op.is_some(), ch.is_some(), de.is_some()]
                    .iter()
                    .filter(|&&b| b)
                    .count();
                if hits > 1 {
                    return Err(semantic(pos, format!("ambiguous reference `{name}`")));
                }
                if let Some(op) = op {
                    if !allow_ops {
                        return Err(semantic(
                            pos,
                            format!("operator `{name}` outside an operator block"),
                        ));
                    }
                    Value::Op(op.clone())
                } else if let Some(q) = ch {
                    match q.as_slice() {
                        [single] => Value::Poly(single.clone()),
                        _ => return Err(semantic(pos, format!("`{name}` has several components"))),
                    }
                } else if let Some(d) = de {
                    Value::Poly(d.clone())
                } else {
                    return Err(FrontendError::Name {
                        pos,
                        name: name.to_string(),
                    });
                }
            }
        };
        Ok(value)
    }

    fn eval(&self, e: &Expr, allow_ops: bool) -> Result<Value, FrontendError> {
        let s = self.space();
        let to_op = |v: Value| match v {
            Value::Op(op) => op,
            Value::Poly(p) => PseudoDiffOp::mult(p),
        };
        Ok(match &e.kind {
            Kind::Num(n) => Value::Poly(s.rational(Rational::from_integer(n.clone()))),
            Kind::Name(name) => self.eval_name(name, e.pos, allow_ops)?,
            Kind::Jet(name, k) => match self.model.depvars.iter().position(|v| v == name) {
                Some(alpha) => Value::Poly(s.jet(alpha, *k)),
                None => {
                    return Err(FrontendError::Name {
                        pos: e.pos,
                        name: format!("{name}{{{k}}}"),
                    })
                }
            },
            Kind::Neg(inner) => match self.eval(inner, allow_ops)? {
                Value::Poly(p) => Value::Poly(-p),
                Value::Op(op) => Value::Op(-op),
            },
            Kind::Pow(base, n) => match self.eval(base, allow_ops)? {
                Value::Poly(p) => Value::Poly(p.pow(*n)),
                Value::Op(op) => {
                    let mut acc = PseudoDiffOp::identity(s);
                    for _ in 0..*n {
                        acc = acc
                            .compose(&op)
                            .map_err(|err| semantic(e.pos, err.to_string()))?;
                    }
                    Value::Op(acc)
                }
            },
            Kind::Bin(op, a, b) => {
                let (va, vb) = (self.eval(a, allow_ops)?, self.eval(b, allow_ops)?);
                match (op, va, vb) {
                    ('/', va, Value::Poly(d)) => {
                        let c = constant_of(&d)
                            .filter(|c| !c.is_zero())
                            .ok_or_else(|| semantic(e.pos, "division by a non-constant or zero"))?;
                        let inv = c.recip();
                        match va {
                            Value::Poly(p) => Value::Poly(p.scale(&inv)),
                            Value::Op(o) => Value::Op(o.scale(&inv)),
                        }
                    }
                    ('/', _, Value::Op(_)) => {
                        return Err(semantic(e.pos, "division by an operator"))
                    }
                    ('+', Value::Poly(x), Value::Poly(y)) => Value::Poly(x + y),
                    ('-', Value::Poly(x), Value::Poly(y)) => Value::Poly(x - y),
                    ('*', Value::Poly(x), Value::Poly(y)) => Value::Poly(x * y),
                    ('+', x, y) => Value::Op(to_op(x) + to_op(y)),
                    ('-', x, y) => Value::Op(to_op(x) - to_op(y)),
                    (_, x, y) => Value::Op(
                        to_op(x)
                            .compose(&to_op(y))
                            .map_err(|err| semantic(e.pos, err.to_string()))?,
                    ),
                }
            }
        })
    }
}

fn constant_of(p: &DiffPoly) -> Option<Rational> {
    match p.num_terms() {
        0 => Some(Rational::zero()),
        1 => {
            let (m, c) = p.terms().next()?;
            if m.is_one() {
                c.as_constant().cloned()
            } else {
                None
            }
        }
        _ => None,
    }
}

const RESERVED: &[&str] = &[
    "x", "t", "eps", "Dx", "Dxi", "set", "depvars", "system", "operator", "char", "density", "rhs",
];

pub fn parse_model(src: &str) -> Result<Model, FrontendError> {
    let mut parser = Parser {
        toks: tokenize(src)?,
        at: 0,
        model: Model::default(),
        declared: false,
    };
    parser.parse_model()?;
    Ok(parser.model)
}
