use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Presheaf, PresheafMorphism};
use crate::closure::closed_subsets;
use crate::fincat::FinCategory;
use crate::finset::{FinFunction, FinSet};
use crate::{Error, Limits, Result};

/// A set of arrows into `on`, closed under precomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sieve {
    pub on: usize,
    pub arrows: BTreeSet<usize>,
}

impl Sieve {
    pub fn new(
        base: &FinCategory,
        on: usize,
        arrows: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let s = Sieve {
            on,
            arrows: arrows.into_iter().collect(),
        };
        for &f in &s.arrows {
            if base.tgt(f) != on {
                return Err(Error::CodomainMismatch {
                    left: base.arrow_name(f).to_string(),
                    right: base.object_name(on).to_string(),
                });
            }
            for g in base.arrows_into(base.src(f)) {
                if !s.arrows.contains(&base.comp(f, g)) {
                    return Err(Error::NotClosed(format!(
                        "{} ∈ S but {}∘{} ∉ S",
                        base.arrow_name(f),
                        base.arrow_name(f),
                        base.arrow_name(g)
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn from_names<S: AsRef<str>>(base: &FinCategory, on: usize, names: &[S]) -> Result<Self> {
        let arrows = names
            .iter()
            .map(|n| base.arrow(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, on, arrows)
    }

    pub fn maximal(base: &FinCategory, on: usize) -> Self {
        Sieve {
            on,
            arrows: base.arrows_into(on).into_iter().collect(),
        }
    }

    pub fn empty(on: usize) -> Self {
        Sieve {
            on,
            arrows: BTreeSet::new(),
        }
    }

    pub fn contains(&self, f: usize) -> bool {
        self.arrows.contains(&f)
    }

    pub fn is_maximal(&self, base: &FinCategory) -> bool {
        self.arrows.contains(&base.id(self.on))
    }

    fn sorted_names<'a>(&self, base: &'a FinCategory) -> Vec<&'a str> {
        let mut names: Vec<&str> = self.arrows.iter().map(|&f| base.arrow_name(f)).collect();
        names.sort_unstable();
        names
    }

    /// `{f,g}` with arrow names sorted; `{}` for the empty sieve.
    pub fn name(&self, base: &FinCategory) -> String {
        format!("{{{}}}", self.sorted_names(base).join(","))
    }
}

/// Every sieve on `x`, ordered by size and then by sorted arrow names.
pub fn sieves_on(base: &FinCategory, x: usize) -> Result<Vec<Sieve>> {
    if x >= base.object_count() {
        return Err(Error::UnknownObject(format!("#{x}")));
    }
    let into = base.arrows_into(x);
    let pos: HashMap<usize, usize> = into.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let implies: Vec<Vec<usize>> = into
        .iter()
        .map(|&f| {
            base.arrows_into(base.src(f))
                .into_iter()
                .map(|g| pos[&base.comp(f, g)])
                .collect()
        })
        .collect();
    let subsets = closed_subsets(into.len(), &implies, Limits::default().max_enum, "sieves")?;
    let mut sieves: Vec<Sieve> = subsets
        .into_iter()
        .map(|m| Sieve {
            on: x,
            arrows: m
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| into[i])
                .collect(),
        })
        .collect();
    sieves.sort_by(|a, b| {
        a.arrows
            .len()
            .cmp(&b.arrows.len())
            .then_with(|| a.sorted_names(base).cmp(&b.sorted_names(base)))
    });
    Ok(sieves)
}

/// `h*(S) = {g | cod g = dom h, h∘g ∈ S}`.
pub fn sieve_pullback(base: &FinCategory, h: usize, s: &Sieve) -> Result<Sieve> {
    if base.tgt(h) != s.on {
        return Err(Error::CodomainMismatch {
            left: base.arrow_name(h).to_string(),
            right: base.object_name(s.on).to_string(),
        });
    }
    let d = base.src(h);
    Ok(Sieve {
        on: d,
        arrows: base
            .arrows_into(d)
            .into_iter()
            .filter(|&g| s.contains(base.comp(h, g)))
            .collect(),
    })
}

/// The subobject classifier: `Ω(x)` is the set of sieves on `x`.
#[derive(Clone, Debug)]
pub struct Omega {
    presheaf: Presheaf,
    sieves: Vec<Vec<Sieve>>,
    index: Vec<HashMap<BTreeSet<usize>, usize>>,
    top: Vec<usize>,
    bottom: Vec<usize>,
    aliases: Option<Vec<Vec<&'static str>>>,
}

pub fn omega(base: &Arc<FinCategory>) -> Result<Omega> {
    let sieves: Vec<Vec<Sieve>> = (0..base.object_count())
        .map(|x| sieves_on(base, x))
        .collect::<Result<_>>()?;
    let index: Vec<HashMap<BTreeSet<usize>, usize>> = sieves
        .iter()
        .map(|ss| {
            ss.iter()
                .enumerate()
                .map(|(i, s)| (s.arrows.clone(), i))
                .collect()
        })
        .collect();
    let at: Vec<FinSet> = sieves
        .iter()
        .enumerate()
        .map(|(x, ss)| {
            FinSet::ordered(
                format!("Ω({})", base.object_name(x)),
                ss.iter().map(|s| s.name(base)),
            )
            .expect("sieve names are distinct")
        })
        .collect();
    let restrict = (0..base.arrow_count())
        .map(|h| {
            let (d, x) = (base.src(h), base.tgt(h));
            let table = sieves[x]
                .iter()
                .map(|s| index[d][&sieve_pullback(base, h, s).expect("h lands in x").arrows])
                .collect();
            FinFunction::new(at[x].clone(), at[d].clone(), table).expect("Ω restriction")
        })
        .collect();
    let top = (0..base.object_count())
        .map(|x| index[x][&Sieve::maximal(base, x).arrows])
        .collect();
    let bottom = (0..base.object_count())
        .map(|x| index[x][&BTreeSet::new()])
        .collect();
    let aliases = interval_aliases(base, &sieves);
    Ok(Omega {
        presheaf: Presheaf::from_parts(base.clone(), at, restrict),
        sieves,
        index,
        top,
        bottom,
        aliases,
    })
}

/// `0`, `1/2`, `1` on a base shaped like `a → b`.
fn interval_aliases(base: &FinCategory, sieves: &[Vec<Sieve>]) -> Option<Vec<Vec<&'static str>>> {
    if base.object_count() != 2 || base.arrow_count() != 3 {
        return None;
    }
    let u = (0..3).find(|&f| !base.is_identity(f))?;
    if base.src(u) == base.tgt(u) {
        return None;
    }
    let mut out = vec![Vec::new(), Vec::new()];
    for (x, ss) in sieves.iter().enumerate() {
        out[x] = ss
            .iter()
            .map(|s| match (s.arrows.len(), s.is_maximal(base)) {
                (0, _) => "0",
                (_, true) => "1",
                _ => "1/2",
            })
            .collect();
    }
    Some(out)
}

impl Omega {
    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.presheaf.base()
    }

    pub fn sieves(&self, c: usize) -> &[Sieve] {
        &self.sieves[c]
    }

    pub fn sieve(&self, c: usize, i: usize) -> &Sieve {
        &self.sieves[c][i]
    }

    pub fn len(&self, c: usize) -> usize {
        self.sieves[c].len()
    }

    pub fn index_of(&self, s: &Sieve) -> usize {
        self.index[s.on][&s.arrows]
    }

    pub fn index_of_arrows(&self, c: usize, arrows: &BTreeSet<usize>) -> Option<usize> {
        self.index[c].get(arrows).copied()
    }

    pub fn top(&self, c: usize) -> usize {
        self.top[c]
    }

    pub fn bottom(&self, c: usize) -> usize {
        self.bottom[c]
    }

    pub fn is_top(&self, c: usize, i: usize) -> bool {
        self.top[c] == i
    }

    /// `true: 1 → Ω`, picking the maximal sieve at every stage.
    pub fn true_point(&self) -> PresheafMorphism {
        let one = super::terminal(self.base());
        PresheafMorphism::from_parts(
            one,
            self.presheaf.clone(),
            self.top.iter().map(|&t| vec![t]).collect(),
        )
    }

    /// Alias (`0`, `1/2`, `1`) on an interval base, else the sieve name.
    pub fn label(&self, c: usize, i: usize) -> String {
        match &self.aliases {
            Some(a) => a[c][i].to_string(),
            None => self.presheaf.at(c).atom(i).to_string(),
        }
    }

    pub fn has_aliases(&self) -> bool {
        self.aliases.is_some()
    }

    /// Looks up a truth value by sieve name or alias.
    pub fn parse_value(&self, c: usize, text: &str) -> Option<usize> {
        self.presheaf.at(c).index_of(text).or_else(|| {
            self.aliases
                .as_ref()
                .and_then(|a| a[c].iter().position(|&l| l == text))
        })
    }

    pub fn restrict(&self, h: usize, i: usize) -> usize {
        self.presheaf.res(h, i)
    }

    pub fn meet(&self, c: usize, i: usize, j: usize) -> usize {
        let s: BTreeSet<usize> = self.sieves[c][i]
            .arrows
            .intersection(&self.sieves[c][j].arrows)
            .copied()
            .collect();
        self.index[c][&s]
    }

    pub fn join(&self, c: usize, i: usize, j: usize) -> usize {
        let s: BTreeSet<usize> = self.sieves[c][i]
            .arrows
            .union(&self.sieves[c][j].arrows)
            .copied()
            .collect();
        self.index[c][&s]
    }

    /// `{f | ∀g. f∘g ∈ S ⇒ f∘g ∈ T}`.
    pub fn implies(&self, c: usize, i: usize, j: usize) -> usize {
        let base = self.base();
        let (s, t) = (&self.sieves[c][i], &self.sieves[c][j]);
        let arrows = base
            .arrows_into(c)
            .into_iter()
            .filter(|&f| {
                base.arrows_into(base.src(f)).into_iter().all(|g| {
                    let fg = base.comp(f, g);
                    !s.contains(fg) || t.contains(fg)
                })
            })
            .collect();
        self.index[c][&arrows]
    }

    pub fn not(&self, c: usize, i: usize) -> usize {
        self.implies(c, i, self.bottom[c])
    }

    pub fn leq(&self, c: usize, i: usize, j: usize) -> bool {
        self.sieves[c][i]
            .arrows
            .is_subset(&self.sieves[c][j].arrows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn interval_sieves_and_omega() {
        let base = Arc::new(shapes::interval());
        let (a, b) = (base.object("a").unwrap(), base.object("b").unwrap());
        assert_eq!(sieves_on(&base, a).unwrap().len(), 2);
        let on_b: Vec<String> = sieves_on(&base, b)
            .unwrap()
            .iter()
            .map(|s| s.name(&base))
            .collect();
        assert_eq!(on_b, ["{}", "{u}", "{id_b,u}"]);

        let om = omega(&base).unwrap();
        assert_eq!(om.len(a), 2);
        assert_eq!(om.len(b), 3);
        let u = base.arrow("u").unwrap();
        let labels: Vec<String> = (0..3).map(|i| om.label(a, om.restrict(u, i))).collect();
        assert_eq!(labels, ["0", "1", "1"]);
        assert_eq!(om.label(b, 1), "1/2");
        assert_eq!(om.parse_value(b, "1/2"), Some(1));
    }

    #[test]
    fn pullback_of_middle_sieve_along_u_is_maximal() {
        let base = shapes::interval();
        let (a, b) = (base.object("a").unwrap(), base.object("b").unwrap());
        let u = base.arrow("u").unwrap();
        let mid = Sieve::from_names(&base, b, &["u"]).unwrap();
        assert!(sieve_pullback(&base, u, &mid).unwrap().is_maximal(&base));
        assert_eq!(sieve_pullback(&base, base.id(b), &mid).unwrap(), mid);
        assert_eq!(
            sieve_pullback(&base, u, &Sieve::maximal(&base, b)).unwrap(),
            Sieve::maximal(&base, a)
        );
        assert!(Sieve::from_names(&base, b, &["id_b"]).is_err());
    }

    #[test]
    fn graph_omega_sizes() {
        let base = Arc::new(shapes::graph_base());
        let om = omega(&base).unwrap();
        assert_eq!(om.len(base.object("V").unwrap()), 2);
        assert_eq!(om.len(base.object("E").unwrap()), 5);
        let one = Arc::new(shapes::terminal());
        assert_eq!(omega(&one).unwrap().len(0), 2);
    }

    #[test]
    fn sieve_heyting_operations() {
        let base = Arc::new(shapes::interval());
        let b = base.object("b").unwrap();
        let om = omega(&base).unwrap();
        let (zero, half, one) = (0, 1, 2);
        assert_eq!(om.not(b, half), zero);
        assert_eq!(om.not(b, zero), one);
        assert_eq!(om.implies(b, half, zero), zero);
        assert_eq!(om.join(b, half, om.not(b, half)), half);
        assert_eq!(om.meet(b, half, one), half);
    }
}
