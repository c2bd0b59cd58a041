use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Types are objects of the ambient topos, built from named objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type {
    Object(String),
    Unit,
    Omega,
    Product(Box<Type>, Box<Type>),
    Power(Box<Type>),
    /// `Exp(B, C)` is `B^C`.
    Exp(Box<Type>, Box<Type>),
}

impl Type {
    pub fn object(name: &str) -> Type {
        Type::Object(name.into())
    }

    pub fn product(a: Type, b: Type) -> Type {
        Type::Product(Box::new(a), Box::new(b))
    }

    pub fn power(a: Type) -> Type {
        Type::Power(Box::new(a))
    }

    pub fn exp(b: Type, c: Type) -> Type {
        Type::Exp(Box::new(b), Box::new(c))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Object(n) => write!(f, "{n}"),
            Type::Unit => write!(f, "1"),
            Type::Omega => write!(f, "Omega"),
            Type::Product(a, b) => write!(f, "(* {a} {b})"),
            Type::Power(a) => write!(f, "(P {a})"),
            Type::Exp(b, c) => write!(f, "(^ {b} {c})"),
        }
    }
}

/// Built-in causal predicates on the object of a registered model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalAtom {
    /// `V = v`.
    Value { var: String, value: String },
    /// `Y_x = y`.
    Outcome {
        var: String,
        value: String,
        intervention: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var {
        name: String,
        ty: Type,
    },
    Star,
    True,
    False,
    Pair(Box<Term>, Box<Term>),
    /// `Proj(1, t)` or `Proj(2, t)`.
    Proj(u8, Box<Term>),
    Eq(Box<Term>, Box<Term>),
    Apply {
        arrow: String,
        arg: Box<Term>,
    },
    /// `θ(σ)` for `θ: B^C`, `σ: C`.
    Eval(Box<Term>, Box<Term>),
    Member(Box<Term>, Box<Term>),
    Lambda {
        var: String,
        ty: Type,
        body: Box<Term>,
    },
    Comprehension {
        var: String,
        ty: Type,
        body: Box<Term>,
    },
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Not(Box<Term>),
    Forall {
        var: String,
        ty: Type,
        body: Box<Term>,
    },
    Exists {
        var: String,
        ty: Type,
        body: Box<Term>,
    },
    Causal {
        model: String,
        atom: CausalAtom,
        arg: Box<Term>,
    },
}

pub fn var(name: &str, ty: Type) -> Term {
    Term::Var {
        name: name.into(),
        ty,
    }
}

pub fn pair(a: Term, b: Term) -> Term {
    Term::Pair(Box::new(a), Box::new(b))
}

pub fn proj(i: u8, t: Term) -> Term {
    Term::Proj(i, Box::new(t))
}

pub fn eq(a: Term, b: Term) -> Term {
    Term::Eq(Box::new(a), Box::new(b))
}

pub fn apply(arrow: &str, arg: Term) -> Term {
    Term::Apply {
        arrow: arrow.into(),
        arg: Box::new(arg),
    }
}

pub fn eval(theta: Term, sigma: Term) -> Term {
    Term::Eval(Box::new(theta), Box::new(sigma))
}

pub fn member(a: Term, s: Term) -> Term {
    Term::Member(Box::new(a), Box::new(s))
}

pub fn lambda(v: &str, ty: Type, body: Term) -> Term {
    Term::Lambda {
        var: v.into(),
        ty,
        body: Box::new(body),
    }
}

pub fn comprehension(v: &str, ty: Type, body: Term) -> Term {
    Term::Comprehension {
        var: v.into(),
        ty,
        body: Box::new(body),
    }
}

pub fn and(a: Term, b: Term) -> Term {
    Term::And(Box::new(a), Box::new(b))
}

pub fn or(a: Term, b: Term) -> Term {
    Term::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Term, b: Term) -> Term {
    Term::Implies(Box::new(a), Box::new(b))
}

pub fn not(a: Term) -> Term {
    Term::Not(Box::new(a))
}

pub fn forall(v: &str, ty: Type, body: Term) -> Term {
    Term::Forall {
        var: v.into(),
        ty,
        body: Box::new(body),
    }
}

pub fn exists(v: &str, ty: Type, body: Term) -> Term {
    Term::Exists {
        var: v.into(),
        ty,
        body: Box::new(body),
    }
}

pub fn causal(model: &str, atom: CausalAtom, arg: Term) -> Term {
    Term::Causal {
        model: model.into(),
        atom,
        arg: Box::new(arg),
    }
}

impl Term {
    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var { .. } | Term::Star | Term::True | Term::False => vec![],
            Term::Proj(_, t) | Term::Not(t) => vec![t],
            Term::Apply { arg, .. } | Term::Causal { arg, .. } => vec![arg],
            Term::Lambda { body, .. }
            | Term::Comprehension { body, .. }
            | Term::Forall { body, .. }
            | Term::Exists { body, .. } => vec![body],
            Term::Pair(a, b)
            | Term::Eq(a, b)
            | Term::Eval(a, b)
            | Term::Member(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Implies(a, b) => vec![a, b],
        }
    }

    pub fn binder(&self) -> Option<(&str, &Type)> {
        match self {
            Term::Lambda { var, ty, .. }
            | Term::Comprehension { var, ty, .. }
            | Term::Forall { var, ty, .. }
            | Term::Exists { var, ty, .. } => Some((var, ty)),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Result<Vec<(String, Type)>> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<(String, Type)>) -> Result<()> {
            if let Term::Var { name, ty } = t {
                if !bound.contains(name) {
                    match out.iter().find(|(n, _)| n == name) {
                        Some((_, seen)) if seen != ty => {
                            return Err(Error::TypeMismatch {
                                term: name.clone(),
                                expected: seen.to_string(),
                                found: ty.to_string(),
                            })
                        }
                        Some(_) => {}
                        None => out.push((name.clone(), ty.clone())),
                    }
                }
                return Ok(());
            }
            let pushed = t.binder().map(|(v, _)| bound.push(v.to_string())).is_some();
            for c in t.children() {
                go(c, bound, out)?;
            }
            if pushed {
                bound.pop();
            }
            Ok(())
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let Term::Var { name, .. } = t {
                out.push(name.clone());
            }
            if let Some((v, _)) = t.binder() {
                out.push(v.to_string());
            }
            stack.extend(t.children());
        }
        out.sort();
        out.dedup();
        out
    }

    /// The prefix text form accepted by [`super::parse_term`].
    pub fn to_sexpr(&self) -> String {
        let mut s = String::new();
        self.write_sexpr(&mut s);
        s
    }

    fn write_sexpr(&self, s: &mut String) {
        use std::fmt::Write;
        let bin = |s: &mut String, op: &str, a: &Term, b: &Term| {
            let _ = write!(s, "({op} ");
            a.write_sexpr(s);
            s.push(' ');
            b.write_sexpr(s);
            s.push(')');
        };
        let binder = |s: &mut String, op: &str, v: &str, ty: &Type, body: &Term| {
            let _ = write!(s, "({op} ({v} {ty}) ");
            body.write_sexpr(s);
            s.push(')');
        };
        match self {
            Term::Var { name, .. } => s.push_str(name),
            Term::Star => s.push('*'),
            Term::True => s.push_str("true"),
            Term::False => s.push_str("false"),
            Term::Pair(a, b) => bin(s, "pair", a, b),
            Term::Proj(i, t) => {
                let _ = write!(s, "(proj{i} ");
                t.write_sexpr(s);
                s.push(')');
            }
            Term::Eq(a, b) => bin(s, "=", a, b),
            Term::Apply { arrow, arg } => {
                let _ = write!(s, "(app {arrow} ");
                arg.write_sexpr(s);
                s.push(')');
            }
            Term::Eval(a, b) => bin(s, "eval", a, b),
            Term::Member(a, b) => bin(s, "in", a, b),
            Term::Lambda { var, ty, body } => binder(s, "lambda", var, ty, body),
            Term::Comprehension { var, ty, body } => binder(s, "set", var, ty, body),
            Term::And(a, b) => bin(s, "and", a, b),
            Term::Or(a, b) => bin(s, "or", a, b),
            Term::Implies(a, b) => bin(s, "implies", a, b),
            Term::Not(a) => {
                s.push_str("(not ");
                a.write_sexpr(s);
                s.push(')');
            }
            Term::Forall { var, ty, body } => binder(s, "forall", var, ty, body),
            Term::Exists { var, ty, body } => binder(s, "exists", var, ty, body),
            Term::Causal { model, atom, arg } => {
                match atom {
                    CausalAtom::Value { var, value } => {
                        let _ = write!(s, "(value {model} {var} {value} ");
                    }
                    CausalAtom::Outcome {
                        var,
                        value,
                        intervention,
                    } => {
                        let dos: Vec<String> = intervention
                            .iter()
                            .map(|(k, v)| format!("({k} {v})"))
                            .collect();
                        let _ = write!(s, "(outcome {model} {var} {value} ({}) ", dos.join(" "));
                    }
                }
                arg.write_sexpr(s);
                s.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}
