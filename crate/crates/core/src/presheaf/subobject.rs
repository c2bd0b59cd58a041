use std::collections::BTreeSet;
use std::fmt;

use super::{Omega, Presheaf, PresheafMorphism};
use crate::closure::closed_subsets;
use crate::finset::{FinFunction, FinSet};
use crate::{Error, Limits, Result};

/// A restriction-closed family of subsets of a presheaf's stalks.
#[derive(Clone, PartialEq, Eq)]
pub struct SubPresheaf {
    parent: Presheaf,
    members: Vec<Vec<bool>>,
}

impl SubPresheaf {
    pub fn new(parent: Presheaf, members: Vec<BTreeSet<usize>>) -> Result<Self> {
        if members.len() != parent.base().object_count() {
            return Err(Error::InvalidPresheaf(
                "one member set per base object is required".into(),
            ));
        }
        let mut flags = Vec::with_capacity(members.len());
        for (c, m) in members.iter().enumerate() {
            let n = parent.at(c).len();
            if let Some(&bad) = m.iter().find(|&&x| x >= n) {
                return Err(Error::UnknownElement {
                    set: parent.at(c).name().to_string(),
                    atom: format!("#{bad}"),
                });
            }
            flags.push((0..n).map(|x| m.contains(&x)).collect());
        }
        let s = SubPresheaf {
            parent,
            members: flags,
        };
        s.check_closed()?;
        Ok(s)
    }

    /// Members given as atoms per base object.
    pub fn from_atoms<S: AsRef<str>>(parent: Presheaf, members: &[Vec<S>]) -> Result<Self> {
        let sets = members
            .iter()
            .enumerate()
            .map(|(c, atoms)| {
                atoms
                    .iter()
                    .map(|a| parent.at(c).require(a.as_ref()))
                    .collect::<Result<BTreeSet<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parent, sets)
    }

    pub(crate) fn from_parts(parent: Presheaf, members: Vec<Vec<bool>>) -> Self {
        SubPresheaf { parent, members }
    }

    fn check_closed(&self) -> Result<()> {
        let base = self.parent.base();
        for f in 0..base.arrow_count() {
            let (s, t) = (base.src(f), base.tgt(f));
            for x in 0..self.parent.at(t).len() {
                if self.members[t][x] && !self.members[s][self.parent.res(f, x)] {
                    return Err(Error::NotClosed(format!(
                        "{} ∈ S({}) but its restriction along {} is not",
                        self.parent.at(t).atom(x),
                        base.object_name(t),
                        base.arrow_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn full(parent: &Presheaf) -> Self {
        SubPresheaf {
            members: parent
                .stalks()
                .iter()
                .map(|s| vec![true; s.len()])
                .collect(),
            parent: parent.clone(),
        }
    }

    pub fn empty(parent: &Presheaf) -> Self {
        SubPresheaf {
            members: parent
                .stalks()
                .iter()
                .map(|s| vec![false; s.len()])
                .collect(),
            parent: parent.clone(),
        }
    }

    pub fn parent(&self) -> &Presheaf {
        &self.parent
    }

    pub fn contains(&self, c: usize, x: usize) -> bool {
        self.members[c][x]
    }

    pub fn flags(&self) -> &[Vec<bool>] {
        &self.members
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        self.members[c]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn member_atoms(&self, c: usize) -> Vec<&str> {
        self.members(c)
            .into_iter()
            .map(|x| self.parent.at(c).atom(x))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.members
            .iter()
            .map(|m| m.iter().filter(|&&b| b).count())
            .sum()
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|m| m.iter().all(|&b| b))
    }

    pub fn leq(&self, other: &SubPresheaf) -> Result<bool> {
        self.require_parent(other)?;
        Ok(self
            .members
            .iter()
            .zip(&other.members)
            .all(|(a, b)| a.iter().zip(b).all(|(&x, &y)| !x || y)))
    }

    fn require_parent(&self, other: &SubPresheaf) -> Result<()> {
        if self.parent == other.parent {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// The subobject as a presheaf in its own right, with its inclusion.
    pub fn to_presheaf(&self) -> (Presheaf, PresheafMorphism) {
        let base = self.parent.base().clone();
        let members: Vec<Vec<usize>> = (0..base.object_count()).map(|c| self.members(c)).collect();
        let at: Vec<FinSet> = members
            .iter()
            .enumerate()
            .map(|(c, m)| {
                FinSet::ordered(
                    format!("S({})", base.object_name(c)),
                    m.iter().map(|&x| self.parent.at(c).atom(x).to_string()),
                )
                .expect("distinct")
            })
            .collect();
        let restrict = (0..base.arrow_count())
            .map(|f| {
                let (s, t) = (base.src(f), base.tgt(f));
                let table = members[t]
                    .iter()
                    .map(|&x| {
                        members[s]
                            .binary_search(&self.parent.res(f, x))
                            .expect("closed")
                    })
                    .collect();
                FinFunction::new(at[t].clone(), at[s].clone(), table).expect("sub restriction")
            })
            .collect();
        let sub = Presheaf::from_parts(base, at, restrict);
        let inclusion = PresheafMorphism::from_parts(sub.clone(), self.parent.clone(), members);
        (sub, inclusion)
    }
}

impl fmt::Debug for SubPresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.parent.base();
        write!(f, "Sub[")?;
        for c in 0..base.object_count() {
            if c > 0 {
                write!(f, "; ")?;
            }
            write!(
                f,
                "{} ↦ {{{}}}",
                base.object_name(c),
                self.member_atoms(c).join(",")
            )?;
        }
        write!(f, "]")
    }
}

/// The characteristic map: `x` goes to the sieve of arrows along which it
/// restricts into `S`.
pub fn classify(s: &SubPresheaf, omega: &Omega) -> Result<PresheafMorphism> {
    let x = s.parent();
    x.require_same_base(omega.presheaf())?;
    let base = x.base();
    let components = (0..base.object_count())
        .map(|c| {
            let into = base.arrows_into(c);
            (0..x.at(c).len())
                .map(|e| {
                    let arrows: BTreeSet<usize> = into
                        .iter()
                        .copied()
                        .filter(|&f| s.contains(base.src(f), x.res(f, e)))
                        .collect();
                    omega
                        .index_of_arrows(c, &arrows)
                        .expect("restriction-closed sets give sieves")
                })
                .collect()
        })
        .collect();
    Ok(PresheafMorphism::from_parts(
        x.clone(),
        omega.presheaf().clone(),
        components,
    ))
}

/// Pullback of `true` along `chi: X → Ω`.
pub fn classified_subobject(chi: &PresheafMorphism, omega: &Omega) -> Result<SubPresheaf> {
    if chi.target() != omega.presheaf() {
        return Err(Error::DomainMismatch {
            expected: "Ω".into(),
            found: format!("{:?}", chi.target()),
        });
    }
    let members = (0..chi.components().len())
        .map(|c| {
            chi.component(c)
                .iter()
                .map(|&v| omega.is_top(c, v))
                .collect()
        })
        .collect();
    Ok(SubPresheaf::from_parts(chi.source().clone(), members))
}

/// Every subobject, in the order produced by the closure search.
pub fn subobjects(x: &Presheaf, limits: &Limits) -> Result<Vec<SubPresheaf>> {
    let base = x.base();
    let offsets = x.offsets();
    let total = *offsets.last().unwrap_or(&0);
    let mut implies = vec![Vec::new(); total];
    for f in 0..base.arrow_count() {
        let (s, t) = (base.src(f), base.tgt(f));
        for e in 0..x.at(t).len() {
            implies[offsets[t] + e].push(offsets[s] + x.res(f, e));
        }
    }
    let subsets = closed_subsets(total, &implies, limits.max_enum, "subobjects")?;
    Ok(subsets
        .into_iter()
        .map(|flat| {
            SubPresheaf::from_parts(
                x.clone(),
                offsets
                    .windows(2)
                    .map(|w| flat[w[0]..w[1]].to_vec())
                    .collect(),
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeytingOp {
    Meet,
    Join,
    Implies,
    Not,
}

pub fn heyting(op: HeytingOp, a: &SubPresheaf, b: Option<&SubPresheaf>) -> Result<SubPresheaf> {
    let empty;
    let b = match (op, b) {
        (HeytingOp::Not, _) => {
            empty = SubPresheaf::empty(a.parent());
            &empty
        }
        (_, Some(b)) => b,
        (_, None) => return Err(Error::InvalidPresheaf(format!("{op:?} needs two operands"))),
    };
    a.require_parent(b)?;
    let x = a.parent();
    let members = match op {
        HeytingOp::Meet => zip_flags(a, b, |p, q| p && q),
        HeytingOp::Join => zip_flags(a, b, |p, q| p || q),
        HeytingOp::Implies | HeytingOp::Not => {
            let base = x.base();
            (0..base.object_count())
                .map(|c| {
                    let into = base.arrows_into(c);
                    (0..x.at(c).len())
                        .map(|e| {
                            into.iter().all(|&f| {
                                let (d, r) = (base.src(f), x.res(f, e));
                                !a.contains(d, r) || b.contains(d, r)
                            })
                        })
                        .collect()
                })
                .collect()
        }
    };
    Ok(SubPresheaf::from_parts(x.clone(), members))
}

fn zip_flags(a: &SubPresheaf, b: &SubPresheaf, op: impl Fn(bool, bool) -> bool) -> Vec<Vec<bool>> {
    a.members
        .iter()
        .zip(&b.members)
        .map(|(p, q)| p.iter().zip(q).map(|(&x, &y)| op(x, y)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;
    use crate::presheaf::{homs, omega, yoneda};
    use std::sync::Arc;

    #[test]
    fn subobject_counts() {
        let limits = Limits::default();
        let one = Arc::new(shapes::terminal());
        assert_eq!(
            subobjects(&yoneda(&one, 0).unwrap(), &limits)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            subobjects(&crate::presheaf::initial(&one), &limits)
                .unwrap()
                .len(),
            1
        );

        let g = Arc::new(shapes::graph_base());
        let ye = yoneda(&g, g.object("E").unwrap()).unwrap();
        assert_eq!(subobjects(&ye, &limits).unwrap().len(), 5);
    }

    #[test]
    fn classify_round_trips_and_counts_match() {
        let limits = Limits::default();
        let base = Arc::new(shapes::interval());
        let om = omega(&base).unwrap();
        let x = yoneda(&base, 1).unwrap();
        let subs = subobjects(&x, &limits).unwrap();
        assert_eq!(
            subs.len() as u64,
            homs(&x, om.presheaf(), &limits).unwrap().len() as u64
        );
        for s in &subs {
            let chi = classify(s, &om).unwrap();
            assert!(PresheafMorphism::new(
                chi.source().clone(),
                chi.target().clone(),
                chi.components().to_vec()
            )
            .is_ok());
            assert_eq!(&classified_subobject(&chi, &om).unwrap(), s);
        }
        let full = classify(&SubPresheaf::full(&x), &om).unwrap();
        assert!((0..2).all(|c| full.component(c).iter().all(|&v| om.is_top(c, v))));
        let none = classify(&SubPresheaf::empty(&x), &om).unwrap();
        assert!((0..2).all(|c| none.component(c).iter().all(|&v| v == om.bottom(c))));
    }

    #[test]
    fn heyting_identities() {
        let limits = Limits::default();
        let base = Arc::new(shapes::interval());
        let x = yoneda(&base, 1).unwrap();
        let full = SubPresheaf::full(&x);
        for a in subobjects(&x, &limits).unwrap() {
            assert!(heyting(HeytingOp::Implies, &a, Some(&a)).unwrap().is_full());
            assert_eq!(heyting(HeytingOp::Meet, &a, Some(&full)).unwrap(), a);
        }
        assert!(heyting(HeytingOp::Meet, &full, None).is_err());
    }
}
