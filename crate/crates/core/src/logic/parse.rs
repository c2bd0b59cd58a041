//! Prefix text syntax for terms and types.
//!
//! ```text
//! type := NAME | 1 | Omega | (* type type) | (P type) | (^ type type)
//! term := NAME | * | true | false
//!       | (pair t t) | (proj1 t) | (proj2 t) | (= t t) | (app ARROW t)
//!       | (eval t t) | (in t t) | (lambda (x type) t) | (set (x type) t)
//!       | (and t t ...) | (or t t ...) | (implies t t) | (not t)
//!       | (forall (x type) t) | (exists (x type) t)
//!       | (value MODEL VAR VALUE t) | (outcome MODEL VAR VALUE ((X x) ...) t)
//! ```
//! `;` starts a comment that runs to the end of the line.

use std::collections::BTreeMap;

use super::term::{self as tm, CausalAtom, Term, Type};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String, (usize, usize)),
    List(Vec<Sexp>, (usize, usize)),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err(pos: (usize, usize), msg: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.0,
        col: pos.1,
        msg: msg.into(),
    }
}

fn read(text: &str) -> Result<Sexp> {
    let mut stack: Vec<(Vec<Sexp>, (usize, usize))> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let push = |stack: &mut Vec<(Vec<Sexp>, (usize, usize))>,
                done: &mut Option<Sexp>,
                s: Sexp|
     -> Result<()> {
        match stack.last_mut() {
            Some((items, _)) => items.push(s),
            None if done.is_none() => *done = Some(s),
            None => return Err(err(s.pos(), "unexpected input after the expression")),
        }
        Ok(())
    };
    while let Some(&ch) = chars.peek() {
        let pos = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                col += 1;
                let (items, start) = stack.pop().ok_or_else(|| err(pos, "unbalanced `)`"))?;
                push(&mut stack, &mut done, Sexp::List(items, start))?;
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                push(&mut stack, &mut done, Sexp::Atom(atom, pos))?;
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(err(*start, "unclosed `(`"));
    }
    done.ok_or_else(|| err((line, col), "empty input"))
}

fn to_type(s: &Sexp) -> Result<Type> {
    match s {
        Sexp::Atom(a, _) => Ok(match a.as_str() {
            "1" => Type::Unit,
            "Omega" | "Ω" => Type::Omega,
            name => Type::object(name),
        }),
        Sexp::List(items, pos) => match items.as_slice() {
            [Sexp::Atom(op, _), a, b] if op == "*" => Ok(Type::product(to_type(a)?, to_type(b)?)),
            [Sexp::Atom(op, _), a] if op == "P" => Ok(Type::power(to_type(a)?)),
            [Sexp::Atom(op, _), b, c] if op == "^" => Ok(Type::exp(to_type(b)?, to_type(c)?)),
            _ => Err(err(*pos, "expected a type")),
        },
    }
}

pub fn parse_type(text: &str) -> Result<Type> {
    to_type(&read(text)?)
}

struct Scope<'c> {
    context: &'c [(String, Type)],
    bound: Vec<(String, Type)>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<&Type> {
        self.bound
            .iter()
            .rev()
            .chain(self.context.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    fn binder(&mut self, s: &Sexp) -> Result<(String, Type)> {
        match s {
            Sexp::List(items, _) if items.len() == 2 => match &items[0] {
                Sexp::Atom(v, _) => Ok((v.clone(), to_type(&items[1])?)),
                other => Err(err(other.pos(), "expected a variable name")),
            },
            other => Err(err(other.pos(), "expected a binder `(x Type)`")),
        }
    }

    fn under(&mut self, b: &Sexp, body: &Sexp) -> Result<(String, Type, Term)> {
        let (v, ty) = self.binder(b)?;
        self.bound.push((v.clone(), ty.clone()));
        let t = self.term(body);
        self.bound.pop();
        Ok((v, ty, t?))
    }

    fn atom<'s>(s: &'s Sexp, what: &str) -> Result<&'s str> {
        match s {
            Sexp::Atom(a, _) => Ok(a),
            other => Err(err(other.pos(), format!("expected {what}"))),
        }
    }

    fn fold(
        &mut self,
        op: fn(Term, Term) -> Term,
        args: &[Sexp],
        pos: (usize, usize),
    ) -> Result<Term> {
        if args.len() < 2 {
            return Err(err(pos, "expected at least two operands"));
        }
        let mut terms = args
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = terms.pop().expect("two operands");
        while let Some(t) = terms.pop() {
            acc = op(t, acc);
        }
        Ok(acc)
    }

    fn term(&mut self, s: &Sexp) -> Result<Term> {
        let (items, pos) = match s {
            Sexp::Atom(a, pos) => {
                return match a.as_str() {
                    "*" => Ok(Term::Star),
                    "true" => Ok(Term::True),
                    "false" => Ok(Term::False),
                    name => match self.lookup(name) {
                        Some(ty) => Ok(tm::var(name, ty.clone())),
                        None => Err(err(*pos, format!("unknown variable `{name}`"))),
                    },
                }
            }
            Sexp::List(items, pos) => (items, *pos),
        };
        let (head, args) = match items.split_first() {
            Some((Sexp::Atom(h, _), rest)) => (h.as_str(), rest),
            _ => return Err(err(pos, "expected an operator")),
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(
                    pos,
                    format!("`{head}` takes {n} argument(s), found {}", args.len()),
                ))
            }
        };
        match head {
            "pair" => {
                arity(2)?;
                Ok(tm::pair(self.term(&args[0])?, self.term(&args[1])?))
            }
            "proj1" | "proj2" => {
                arity(1)?;
                Ok(tm::proj(
                    if head == "proj1" { 1 } else { 2 },
                    self.term(&args[0])?,
                ))
            }
            "=" => {
                arity(2)?;
                Ok(tm::eq(self.term(&args[0])?, self.term(&args[1])?))
            }
            "app" => {
                arity(2)?;
                Ok(tm::apply(
                    Self::atom(&args[0], "an arrow name")?,
                    self.term(&args[1])?,
                ))
            }
            "eval" => {
                arity(2)?;
                Ok(tm::eval(self.term(&args[0])?, self.term(&args[1])?))
            }
            "in" => {
                arity(2)?;
                Ok(tm::member(self.term(&args[0])?, self.term(&args[1])?))
            }
            "and" => self.fold(tm::and, args, pos),
            "or" => self.fold(tm::or, args, pos),
            "implies" => {
                arity(2)?;
                Ok(tm::implies(self.term(&args[0])?, self.term(&args[1])?))
            }
            "not" => {
                arity(1)?;
                Ok(tm::not(self.term(&args[0])?))
            }
            "lambda" | "set" | "forall" | "exists" => {
                arity(2)?;
                let (v, ty, body) = self.under(&args[0], &args[1])?;
                Ok(match head {
                    "lambda" => tm::lambda(&v, ty, body),
                    "set" => tm::comprehension(&v, ty, body),
                    "forall" => tm::forall(&v, ty, body),
                    _ => tm::exists(&v, ty, body),
                })
            }
            "value" => {
                arity(4)?;
                let atom = CausalAtom::Value {
                    var: Self::atom(&args[1], "a variable")?.into(),
                    value: Self::atom(&args[2], "a value")?.into(),
                };
                Ok(tm::causal(
                    Self::atom(&args[0], "a model name")?,
                    atom,
                    self.term(&args[3])?,
                ))
            }
            "outcome" => {
                arity(5)?;
                let dos = match &args[3] {
                    Sexp::List(items, _) => items
                        .iter()
                        .map(|d| match d {
                            Sexp::List(kv, _) if kv.len() == 2 => Ok((
                                Self::atom(&kv[0], "a variable")?.to_string(),
                                Self::atom(&kv[1], "a value")?.to_string(),
                            )),
                            other => Err(err(other.pos(), "expected `(VAR VALUE)`")),
                        })
                        .collect::<Result<BTreeMap<_, _>>>()?,
                    other => return Err(err(other.pos(), "expected a list of `(VAR VALUE)`")),
                };
                let atom = CausalAtom::Outcome {
                    var: Self::atom(&args[1], "a variable")?.into(),
                    value: Self::atom(&args[2], "a value")?.into(),
                    intervention: dos,
                };
                Ok(tm::causal(
                    Self::atom(&args[0], "a model name")?,
                    atom,
                    self.term(&args[4])?,
                ))
            }
            other => Err(err(pos, format!("unknown operator `{other}`"))),
        }
    }
}

/// Parses a term whose free variables are declared in `context`.
pub fn parse_term(text: &str, context: &[(String, Type)]) -> Result<Term> {
    Scope {
        context,
        bound: Vec::new(),
    }
    .term(&read(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::*;

    #[test]
    fn parses_and_prints() {
        let ctx = vec![("x".to_string(), Type::object("M"))];
        let t = parse_term(
            "(forall (y M) ; every y\n  (or (= x y) (not (in y (set (z M) true)))))",
            &ctx,
        )
        .unwrap();
        let m = Type::object("M");
        let expected = forall(
            "y",
            m.clone(),
            or(
                eq(var("x", m.clone()), var("y", m.clone())),
                not(member(
                    var("y", m.clone()),
                    comprehension("z", m.clone(), Term::True),
                )),
            ),
        );
        assert_eq!(t, expected);
        assert_eq!(parse_term(&t.to_sexpr(), &ctx).unwrap(), t);
        assert_eq!(
            parse_type("(^ (P Omega) (* M 1))").unwrap(),
            Type::exp(Type::power(Type::Omega), Type::product(m, Type::Unit))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("(and true\n  (nope))", &[]) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_term("", &[]), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_term("(and true", &[]),
            Err(Error::Parse {
                line: 1,
                col: 1,
                ..
            })
        ));
        assert!(matches!(parse_term("x", &[]), Err(Error::Parse { .. })));
        let out = parse_term(
            "(outcome M C 1 ((B 1)) x)",
            &[("x".into(), Type::object("M"))],
        )
        .unwrap();
        assert_eq!(
            parse_term(&out.to_sexpr(), &[("x".into(), Type::object("M"))]).unwrap(),
            out
        );
    }
}
