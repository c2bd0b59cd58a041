//! Lewis counterfactuals over neighborhood systems of possible worlds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::finset::FinSet;
use crate::tcm::{potential_outcome, Intervention, TcmObject};
use crate::{Error, Limits, Result};

/// Propositional formulas over named atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop {
    True,
    False,
    Atom(String),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl std::ops::Not for Prop {
    type Output = Prop;

    fn not(self) -> Prop {
        Prop::Not(Box::new(self))
    }
}

impl Prop {
    pub fn atom(name: impl Into<String>) -> Prop {
        Prop::Atom(name.into())
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    fn atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Prop::True | Prop::False => {}
            Prop::Atom(a) => out.push(a),
            Prop::Not(a) => a.atoms(out),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSystem {
    worlds: FinSet,
    neighborhoods: Vec<Vec<BTreeSet<usize>>>,
    valuation: BTreeMap<String, BTreeSet<usize>>,
}

impl NeighborhoodSystem {
    /// `neighborhoods[w]` lists the neighborhoods of world `w`.
    pub fn new(
        worlds: FinSet,
        neighborhoods: Vec<Vec<BTreeSet<usize>>>,
        valuation: BTreeMap<String, BTreeSet<usize>>,
    ) -> Result<Self> {
        let n = worlds.len();
        if neighborhoods.len() != n {
            return Err(Error::InvalidShape(format!(
                "{} neighborhood lists for {n} worlds",
                neighborhoods.len()
            )));
        }
        for (w, ns) in neighborhoods.iter().enumerate() {
            if let Some(bad) = ns.iter().flatten().find(|&&v| v >= n) {
                return Err(Error::UnknownWorld(format!(
                    "{bad} in a neighborhood of {}",
                    worlds.atom(w)
                )));
            }
        }
        for (atom, ws) in &valuation {
            if let Some(bad) = ws.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownWorld(format!(
                    "{bad} in the valuation of {atom}"
                )));
            }
        }
        Ok(NeighborhoodSystem {
            worlds,
            neighborhoods,
            valuation,
        })
    }

    pub fn from_atoms(
        worlds: FinSet,
        neighborhoods: &[(&str, Vec<Vec<&str>>)],
        valuation: &[(&str, Vec<&str>)],
    ) -> Result<Self> {
        let index = |a: &str| {
            worlds
                .index_of(a)
                .ok_or_else(|| Error::UnknownWorld(a.to_string()))
        };
        let mut ns = vec![Vec::new(); worlds.len()];
        for (w, list) in neighborhoods {
            let w = index(w)?;
            for n in list {
                ns[w].push(
                    n.iter()
                        .map(|a| index(a))
                        .collect::<Result<BTreeSet<_>>>()?,
                );
            }
        }
        let val = valuation
            .iter()
            .map(|(p, ws)| {
                Ok((
                    p.to_string(),
                    ws.iter()
                        .map(|a| index(a))
                        .collect::<Result<BTreeSet<_>>>()?,
                ))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        NeighborhoodSystem::new(worlds, ns, val)
    }

    pub fn worlds(&self) -> &FinSet {
        &self.worlds
    }

    pub fn neighborhoods(&self, w: usize) -> &[BTreeSet<usize>] {
        &self.neighborhoods[w]
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.valuation
    }

    /// Checks that every atom of `p` has a valuation.
    pub fn check(&self, p: &Prop) -> Result<()> {
        let mut atoms = Vec::new();
        p.atoms(&mut atoms);
        match atoms.into_iter().find(|a| !self.valuation.contains_key(*a)) {
            Some(a) => Err(Error::UnknownVariable(a.to_string())),
            None => Ok(()),
        }
    }

    pub fn satisfies(&self, w: usize, p: &Prop) -> bool {
        match p {
            Prop::True => true,
            Prop::False => false,
            Prop::Atom(a) => self.valuation.get(a).is_some_and(|ws| ws.contains(&w)),
            Prop::Not(a) => !self.satisfies(w, a),
            Prop::And(a, b) => self.satisfies(w, a) && self.satisfies(w, b),
            Prop::Or(a, b) => self.satisfies(w, a) || self.satisfies(w, b),
            Prop::Implies(a, b) => !self.satisfies(w, a) || self.satisfies(w, b),
        }
    }
}

/// `α □→ β` at world `u`.
pub fn lewis_counterfactual(
    sys: &NeighborhoodSystem,
    u: &str,
    alpha: &Prop,
    beta: &Prop,
) -> Result<bool> {
    let u = sys
        .worlds
        .index_of(u)
        .ok_or_else(|| Error::UnknownWorld(u.to_string()))?;
    sys.check(alpha)?;
    sys.check(beta)?;
    let ns = sys.neighborhoods(u);
    let vacuous = ns.iter().flatten().all(|&w| !sys.satisfies(w, alpha));
    let witnessed = ns.iter().any(|n| {
        n.iter().any(|&w| sys.satisfies(w, alpha))
            && n.iter()
                .all(|&v| !sys.satisfies(v, alpha) || sys.satisfies(v, beta))
    });
    Ok(vacuous || witnessed)
}

/// Atom name for `Y = y` under an intervention, e.g. `C=1 under do(B=1)`.
pub fn outcome_atom(y: &str, value: &str, intervention: &Intervention) -> String {
    if intervention.is_empty() {
        format!("{y}={value}")
    } else {
        format!("{y}={value} under {intervention}")
    }
}

/// A valuation over the exogenous tuples of `m`, one atom per query, computed
/// from potential outcomes.
pub fn outcome_valuation(
    m: &TcmObject,
    queries: &[(String, String, Intervention)],
    limits: &Limits,
) -> Result<BTreeMap<String, BTreeSet<usize>>> {
    let worlds = m.exogenous();
    let mut out = BTreeMap::new();
    for (y, value, i) in queries {
        let mut ws = BTreeSet::new();
        for (k, u) in worlds.elements().iter().enumerate() {
            if potential_outcome(m, y, i, u, limits)? == *value {
                ws.insert(k);
            }
        }
        out.insert(outcome_atom(y, value, i), ws);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(n_b: Vec<&str>) -> NeighborhoodSystem {
        let w = FinSet::ordered("W", ["u", "v", "w"]).unwrap();
        NeighborhoodSystem::from_atoms(
            w,
            &[("u", vec![vec!["u"], n_b])],
            &[("a", vec!["v", "w"]), ("b", vec!["v", "w"])],
        )
        .unwrap()
    }

    #[test]
    fn scan_examples() {
        let (a, b) = (Prop::atom("a"), Prop::atom("b"));
        let sys = system(vec!["v", "w"]);
        assert!(lewis_counterfactual(&sys, "u", &a, &b).unwrap());
        assert!(lewis_counterfactual(&sys, "u", &Prop::False, &b).unwrap());
        assert!(lewis_counterfactual(&sys, "u", &a, &a).unwrap());
        let sys = NeighborhoodSystem::from_atoms(
            sys.worlds().clone(),
            &[("u", vec![vec!["v", "w"]])],
            &[("a", vec!["v", "w"]), ("b", vec!["v"])],
        )
        .unwrap();
        assert!(!lewis_counterfactual(&sys, "u", &a, &b).unwrap());
        assert!(matches!(
            lewis_counterfactual(&sys, "z", &a, &b),
            Err(Error::UnknownWorld(_))
        ));
        assert!(matches!(
            lewis_counterfactual(&sys, "u", &Prop::atom("c"), &b),
            Err(Error::UnknownVariable(_))
        ));
    }
}
