//! Local set theory encodings of the logical connectives.

use super::term::{comprehension, eq, pair, var, Term, Type};

struct Desugar {
    used: Vec<String>,
    next: usize,
}

impl Desugar {
    fn fresh(&mut self) -> String {
        loop {
            let name = if self.next == 0 {
                "ω".to_string()
            } else {
                format!("ω{}", self.next)
            };
            self.next += 1;
            if !self.used.contains(&name) {
                self.used.push(name.clone());
                return name;
            }
        }
    }

    fn truth(&self) -> Term {
        eq(Term::Star, Term::Star)
    }

    fn and(&self, a: Term, b: Term) -> Term {
        eq(pair(a, b), pair(self.truth(), self.truth()))
    }

    fn implies(&self, a: Term, b: Term) -> Term {
        eq(self.and(a.clone(), b), a)
    }

    fn forall(&self, v: &str, ty: Type, body: Term) -> Term {
        eq(
            comprehension(v, ty.clone(), body),
            comprehension(v, ty, self.truth()),
        )
    }

    fn falsity(&mut self) -> Term {
        let w = self.fresh();
        self.forall(&w, Type::Omega, var(&w, Type::Omega))
    }

    fn term(&mut self, t: &Term) -> Term {
        let b = |d: &mut Self, t: &Term| Box::new(d.term(t));
        match t {
            Term::True => self.truth(),
            Term::False => self.falsity(),
            Term::And(x, y) => {
                let (x, y) = (self.term(x), self.term(y));
                self.and(x, y)
            }
            Term::Implies(x, y) => {
                let (x, y) = (self.term(x), self.term(y));
                self.implies(x, y)
            }
            Term::Not(x) => {
                let x = self.term(x);
                let f = self.falsity();
                self.implies(x, f)
            }
            Term::Forall { var, ty, body } => {
                let body = self.term(body);
                self.forall(var, ty.clone(), body)
            }
            Term::Or(x, y) => {
                let (x, y) = (self.term(x), self.term(y));
                let w = self.fresh();
                let om = var(&w, Type::Omega);
                let both = self.and(self.implies(x, om.clone()), self.implies(y, om.clone()));
                self.forall(&w, Type::Omega, self.implies(both, om))
            }
            Term::Exists { var: v, ty, body } => {
                let body = self.term(body);
                let w = self.fresh();
                let om = var(&w, Type::Omega);
                let inner = self.forall(v, ty.clone(), self.implies(body, om.clone()));
                self.forall(&w, Type::Omega, self.implies(inner, om))
            }
            Term::Var { .. } | Term::Star => t.clone(),
            Term::Pair(x, y) => Term::Pair(b(self, x), b(self, y)),
            Term::Proj(i, x) => Term::Proj(*i, b(self, x)),
            Term::Eq(x, y) => Term::Eq(b(self, x), b(self, y)),
            Term::Apply { arrow, arg } => Term::Apply {
                arrow: arrow.clone(),
                arg: b(self, arg),
            },
            Term::Eval(x, y) => Term::Eval(b(self, x), b(self, y)),
            Term::Member(x, y) => Term::Member(b(self, x), b(self, y)),
            Term::Lambda { var, ty, body } => Term::Lambda {
                var: var.clone(),
                ty: ty.clone(),
                body: b(self, body),
            },
            Term::Comprehension { var, ty, body } => Term::Comprehension {
                var: var.clone(),
                ty: ty.clone(),
                body: b(self, body),
            },
            Term::Causal { model, atom, arg } => Term::Causal {
                model: model.clone(),
                atom: atom.clone(),
                arg: b(self, arg),
            },
        }
    }
}

/// Rewrites `true`, `false`, the connectives and the quantifiers into
/// equality, pairing and comprehension, with `⟨α, β⟩ = ⟨true, true⟩` for `∧`.
pub fn desugar_lst(t: &Term) -> Term {
    Desugar {
        used: t.names(),
        next: 0,
    }
    .term(t)
}
