use std::collections::HashMap;

use super::{
    for_each_hom, product, subobjects, yoneda, yoneda_index, Presheaf, PresheafMorphism,
    PresheafProduct, SubPresheaf,
};
use crate::finset::{FinFunction, FinSet};
use crate::{Error, Limits, Result};

/// `G^F` with `(G^F)(c) = Nat(y(c) × F, G)` and its evaluation map.
#[derive(Clone, Debug)]
pub struct Exponential {
    pub presheaf: Presheaf,
    pub eval: PresheafMorphism,
    /// `G^F × F`, the domain of `eval`.
    pub eval_domain: PresheafProduct,
    exponent: Presheaf,
    target: Presheaf,
    stage_products: Vec<PresheafProduct>,
    representables: Vec<Presheaf>,
    families: Vec<Vec<Vec<Vec<usize>>>>,
    index: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

pub fn psh_exponential(f: &Presheaf, g: &Presheaf, limits: &Limits) -> Result<Exponential> {
    f.require_same_base(g)?;
    let base = f.base().clone();
    let n = base.object_count();
    let representables: Vec<Presheaf> = (0..n).map(|c| yoneda(&base, c)).collect::<Result<_>>()?;
    let stage_products: Vec<PresheafProduct> = representables
        .iter()
        .map(|y| product(y, f))
        .collect::<Result<_>>()?;
    let mut families = Vec::with_capacity(n);
    for p in &stage_products {
        // Raw candidate families: one function per stage, before the naturality filter.
        let per_stage = (0..n)
            .map(|d| {
                limits.checked_pow(
                    "exponential candidates",
                    g.at(d).len(),
                    p.presheaf.at(d).len(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let raw = per_stage.iter().fold(1u64, |acc, &k| acc.saturating_mul(k));
        if raw > limits.max_enum {
            return Err(Error::size_limit(
                "exponential candidates",
                raw,
                limits.max_enum,
            ));
        }
        let mut fam = Vec::new();
        for_each_hom(&p.presheaf, g, limits, |comps| {
            fam.push(comps.to_vec());
            true
        })?;
        families.push(fam);
    }
    let index: Vec<HashMap<Vec<Vec<usize>>, usize>> = families
        .iter()
        .map(|fam| {
            fam.iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i))
                .collect()
        })
        .collect();

    let at: Vec<FinSet> = (0..n)
        .map(|c| {
            let p = &stage_products[c].presheaf;
            let atoms = families[c].iter().map(|comps| {
                let parts: Vec<String> = (0..n)
                    .flat_map(|d| {
                        comps[d]
                            .iter()
                            .enumerate()
                            .map(move |(k, &y)| format!("{}->{}", p.at(d).atom(k), g.at(d).atom(y)))
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            });
            FinSet::ordered(
                format!(
                    "{}^{}({})",
                    g.at(c).name(),
                    f.at(c).name(),
                    base.object_name(c)
                ),
                atoms.collect::<Vec<_>>(),
            )
        })
        .collect::<Result<_>>()?;

    let restrict = (0..base.arrow_count())
        .map(|h| {
            let (d, c) = (base.src(h), base.tgt(h));
            let table = families[c]
                .iter()
                .map(|theta| {
                    let restricted: Vec<Vec<usize>> = (0..n)
                        .map(|e| {
                            let pd = &stage_products[d];
                            let pc = &stage_products[c];
                            let nf = f.at(e).len();
                            (0..pd.presheaf.at(e).len())
                                .map(|k| {
                                    let (gi, a) = (k / nf.max(1), k % nf.max(1));
                                    let g_arrow = super::yoneda_arrow(&representables[d], e, gi);
                                    let hg =
                                        yoneda_index(&representables[c], base.comp(h, g_arrow));
                                    theta[e][pc.pair(e, hg, a)]
                                })
                                .collect()
                        })
                        .collect();
                    index[d][&restricted]
                })
                .collect();
            FinFunction::new(at[c].clone(), at[d].clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    let presheaf = Presheaf::from_parts(base.clone(), at, restrict);

    let eval_domain = product(&presheaf, f)?;
    let eval_components = (0..n)
        .map(|c| {
            let id = yoneda_index(&representables[c], base.id(c));
            let nf = f.at(c).len();
            (0..eval_domain.presheaf.at(c).len())
                .map(|k| {
                    let (t, a) = (k / nf.max(1), k % nf.max(1));
                    families[c][t][c][stage_products[c].pair(c, id, a)]
                })
                .collect()
        })
        .collect();
    let eval =
        PresheafMorphism::from_parts(eval_domain.presheaf.clone(), g.clone(), eval_components);
    Ok(Exponential {
        presheaf,
        eval,
        eval_domain,
        exponent: f.clone(),
        target: g.clone(),
        stage_products,
        representables,
        families,
        index,
    })
}

impl Exponential {
    pub fn exponent(&self) -> &Presheaf {
        &self.exponent
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    /// The natural family `y(c) × F ⇒ G` behind element `i` of stage `c`.
    pub fn family(&self, c: usize, i: usize) -> &[Vec<usize>] {
        &self.families[c][i]
    }

    /// `θ_d(g, a)` for `θ` the `i`-th element at stage `c`, `g: d → c`, `a ∈ F(d)`.
    pub fn apply_family(&self, c: usize, i: usize, g: usize, a: usize) -> usize {
        let d = self.presheaf.base().src(g);
        let gi = yoneda_index(&self.representables[c], g);
        self.families[c][i][d][self.stage_products[c].pair(d, gi, a)]
    }

    /// `θ_c(id_c, a)`.
    pub fn evaluate(&self, c: usize, i: usize, a: usize) -> usize {
        self.apply_family(c, i, self.presheaf.base().id(c), a)
    }

    /// Index of the element at stage `c` whose family is given by
    /// `value(d, g, a)` for `g: d → c`, `a ∈ F(d)`.
    pub fn lookup(
        &self,
        c: usize,
        mut value: impl FnMut(usize, usize, usize) -> usize,
    ) -> Option<usize> {
        let base = self.presheaf.base();
        let p = &self.stage_products[c];
        let comps: Vec<Vec<usize>> = (0..base.object_count())
            .map(|d| {
                let nf = self.exponent.at(d).len();
                (0..p.presheaf.at(d).len())
                    .map(|k| {
                        let g = super::yoneda_arrow(&self.representables[c], d, k / nf.max(1));
                        value(d, g, k % nf.max(1))
                    })
                    .collect()
            })
            .collect();
        self.index[c].get(&comps).copied()
    }

    /// Transpose of `phi: A × F → G` along `prod = A × F`.
    pub fn curry(
        &self,
        phi: &PresheafMorphism,
        prod: &PresheafProduct,
    ) -> Result<PresheafMorphism> {
        let a = prod.proj1.target();
        if prod.proj2.target() != &self.exponent
            || phi.source() != &prod.presheaf
            || phi.target() != &self.target
        {
            return Err(Error::DomainMismatch {
                expected: "A × F → G".into(),
                found: format!("{:?}", phi.source()),
            });
        }
        let comps = (0..a.base().object_count())
            .map(|c| {
                (0..a.at(c).len())
                    .map(|x| {
                        self.lookup(c, |d, g, b| phi.apply(d, prod.pair(d, a.res(g, x), b)))
                            .ok_or_else(|| Error::NotCommuting("transpose is not natural".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PresheafMorphism::new(a.clone(), self.presheaf.clone(), comps)
    }
}

/// `P(A)` with `P(A)(c) = Sub(y(c) × A)` and the membership relation.
#[derive(Clone, Debug)]
pub struct PowerObject {
    pub presheaf: Presheaf,
    /// `A × P(A)`.
    pub membership_domain: PresheafProduct,
    /// `∈_A ⊆ A × P(A)`.
    pub membership: SubPresheaf,
    element: Presheaf,
    stage_products: Vec<PresheafProduct>,
    representables: Vec<Presheaf>,
    subsets: Vec<Vec<SubPresheaf>>,
    index: Vec<HashMap<Vec<Vec<bool>>, usize>>,
}

pub fn power_object(a: &Presheaf, limits: &Limits) -> Result<PowerObject> {
    let base = a.base().clone();
    let n = base.object_count();
    let representables: Vec<Presheaf> = (0..n).map(|c| yoneda(&base, c)).collect::<Result<_>>()?;
    let stage_products: Vec<PresheafProduct> = representables
        .iter()
        .map(|y| product(y, a))
        .collect::<Result<_>>()?;
    let subsets: Vec<Vec<SubPresheaf>> = stage_products
        .iter()
        .map(|p| subobjects(&p.presheaf, limits))
        .collect::<Result<_>>()?;
    let index: Vec<HashMap<Vec<Vec<bool>>, usize>> = subsets
        .iter()
        .map(|ss| {
            ss.iter()
                .enumerate()
                .map(|(i, s)| (s.flags().to_vec(), i))
                .collect()
        })
        .collect();
    let at: Vec<FinSet> = (0..n)
        .map(|c| {
            let p = &stage_products[c].presheaf;
            let atoms = subsets[c].iter().map(|s| {
                let parts: Vec<&str> = (0..n)
                    .flat_map(|d| s.members(d).into_iter().map(move |k| p.at(d).atom(k)))
                    .collect();
                format!("{{{}}}", parts.join(","))
            });
            FinSet::ordered(
                format!("P{}({})", a.at(c).name(), base.object_name(c)),
                atoms.collect::<Vec<_>>(),
            )
        })
        .collect::<Result<_>>()?;
    let restrict = (0..base.arrow_count())
        .map(|h| {
            let (d, c) = (base.src(h), base.tgt(h));
            let table = subsets[c]
                .iter()
                .map(|s| {
                    let flags: Vec<Vec<bool>> = (0..n)
                        .map(|e| {
                            let na = a.at(e).len();
                            (0..stage_products[d].presheaf.at(e).len())
                                .map(|k| {
                                    let g =
                                        super::yoneda_arrow(&representables[d], e, k / na.max(1));
                                    let hg = yoneda_index(&representables[c], base.comp(h, g));
                                    s.contains(e, stage_products[c].pair(e, hg, k % na.max(1)))
                                })
                                .collect()
                        })
                        .collect();
                    index[d][&flags]
                })
                .collect();
            FinFunction::new(at[c].clone(), at[d].clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    let presheaf = Presheaf::from_parts(base.clone(), at, restrict);
    let membership_domain = product(a, &presheaf)?;
    let members = (0..n)
        .map(|c| {
            let id = yoneda_index(&representables[c], base.id(c));
            let np = presheaf.at(c).len();
            (0..membership_domain.presheaf.at(c).len())
                .map(|k| {
                    let (x, s) = (k / np.max(1), k % np.max(1));
                    subsets[c][s].contains(c, stage_products[c].pair(c, id, x))
                })
                .collect()
        })
        .collect();
    let membership = SubPresheaf::from_parts(membership_domain.presheaf.clone(), members);
    Ok(PowerObject {
        presheaf,
        membership_domain,
        membership,
        element: a.clone(),
        stage_products,
        representables,
        subsets,
        index,
    })
}

impl PowerObject {
    pub fn element_type(&self) -> &Presheaf {
        &self.element
    }

    pub fn subset(&self, c: usize, i: usize) -> &SubPresheaf {
        &self.subsets[c][i]
    }

    /// Whether `(g, a)` lies in the `i`-th element at stage `c`, for `g: d → c`, `a ∈ A(d)`.
    pub fn holds(&self, c: usize, i: usize, g: usize, a: usize) -> bool {
        let d = self.presheaf.base().src(g);
        let gi = yoneda_index(&self.representables[c], g);
        self.subsets[c][i].contains(d, self.stage_products[c].pair(d, gi, a))
    }

    /// `a ∈ S` at stage `c`, i.e. `(id_c, a) ∈ S(c)`.
    pub fn is_member(&self, c: usize, a: usize, i: usize) -> bool {
        self.holds(c, i, self.presheaf.base().id(c), a)
    }

    /// The element at stage `c` holding exactly the `(g, a)` with `pred(d, g, a)`.
    /// `None` if that family is not restriction-closed.
    pub fn lookup(
        &self,
        c: usize,
        mut pred: impl FnMut(usize, usize, usize) -> bool,
    ) -> Option<usize> {
        let base = self.presheaf.base();
        let flags: Vec<Vec<bool>> = (0..base.object_count())
            .map(|d| {
                let na = self.element.at(d).len();
                (0..self.stage_products[c].presheaf.at(d).len())
                    .map(|k| {
                        pred(
                            d,
                            super::yoneda_arrow(&self.representables[c], d, k / na.max(1)),
                            k % na.max(1),
                        )
                    })
                    .collect()
            })
            .collect();
        self.index[c].get(&flags).copied()
    }
}
