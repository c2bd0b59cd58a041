use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{sieve_pullback, sieves_on, Presheaf, Sieve};
use crate::fincat::FinCategory;
use crate::{Error, Limits, Result};

/// Covering sieves for every base object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckTopology {
    base: Arc<FinCategory>,
    covers: Vec<BTreeSet<BTreeSet<usize>>>,
}

impl GrothendieckTopology {
    /// Takes the covering sieves as given; use [`check_topology`] for the axioms.
    pub fn new(base: Arc<FinCategory>, covers: Vec<Vec<Sieve>>) -> Result<Self> {
        if covers.len() != base.object_count() {
            return Err(Error::InvalidShape(
                "one list of covering sieves per object is required".into(),
            ));
        }
        let mut sets = Vec::with_capacity(covers.len());
        for (x, ss) in covers.into_iter().enumerate() {
            let mut set = BTreeSet::new();
            for s in ss {
                if s.on != x {
                    return Err(Error::CodomainMismatch {
                        left: s.name(&base),
                        right: base.object_name(x).to_string(),
                    });
                }
                set.insert(s.arrows);
            }
            sets.push(set);
        }
        Ok(GrothendieckTopology { base, covers: sets })
    }

    /// Only maximal sieves cover; every presheaf is a sheaf.
    pub fn trivial(base: &Arc<FinCategory>) -> Self {
        let covers = (0..base.object_count())
            .map(|x| BTreeSet::from([Sieve::maximal(base, x).arrows]))
            .collect();
        GrothendieckTopology {
            base: base.clone(),
            covers,
        }
    }

    /// Every sieve covers, the empty one included.
    pub fn degenerate(base: &Arc<FinCategory>) -> Result<Self> {
        let covers = (0..base.object_count())
            .map(|x| Ok(sieves_on(base, x)?.into_iter().map(|s| s.arrows).collect()))
            .collect::<Result<_>>()?;
        Ok(GrothendieckTopology {
            base: base.clone(),
            covers,
        })
    }

    /// On a poset of opens, `S` covers `U` when the opens in `S` jointly
    /// contain every point of `U`. `points[x]` lists the points of object `x`.
    pub fn open_cover(base: &Arc<FinCategory>, points: &[BTreeSet<String>]) -> Result<Self> {
        if points.len() != base.object_count() {
            return Err(Error::InvalidShape(
                "one point set per open is required".into(),
            ));
        }
        let covers = (0..base.object_count())
            .map(|x| {
                Ok(sieves_on(base, x)?
                    .into_iter()
                    .filter(|s| {
                        let covered: BTreeSet<&String> = s
                            .arrows
                            .iter()
                            .flat_map(|&f| points[base.src(f)].iter())
                            .collect();
                        points[x].iter().all(|p| covered.contains(p))
                    })
                    .map(|s| s.arrows)
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(GrothendieckTopology {
            base: base.clone(),
            covers,
        })
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.covers[s.on].contains(&s.arrows)
    }

    pub fn covering_sieves(&self, x: usize) -> Vec<Sieve> {
        self.covers[x]
            .iter()
            .map(|a| Sieve {
                on: x,
                arrows: a.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyViolation {
    NotASieve {
        object: String,
        sieve: String,
    },
    MissingMaximal {
        object: String,
    },
    /// `S` covers but its pullback along `arrow` does not.
    NotStable {
        object: String,
        sieve: String,
        arrow: String,
    },
    /// `R` pulls back to a cover along every arrow of the cover `S`, yet does not cover.
    NotTransitive {
        object: String,
        cover: String,
        sieve: String,
    },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::NotASieve { object, sieve } => {
                write!(f, "{sieve} on {object} is not a sieve")
            }
            TopologyViolation::MissingMaximal { object } => {
                write!(f, "maximal sieve on {object} does not cover")
            }
            TopologyViolation::NotStable {
                object,
                sieve,
                arrow,
            } => write!(
                f,
                "{sieve} covers {object} but its pullback along {arrow} does not"
            ),
            TopologyViolation::NotTransitive {
                object,
                cover,
                sieve,
            } => {
                write!(
                    f,
                    "{sieve} on {object} is locally covering along {cover} but does not cover"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopologyReport {
    pub violations: Vec<TopologyViolation>,
}

impl TopologyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_topology(j: &GrothendieckTopology) -> Result<TopologyReport> {
    let base = j.base();
    let mut violations = Vec::new();
    for x in 0..base.object_count() {
        for arrows in &j.covers[x] {
            if Sieve::new(base, x, arrows.iter().copied()).is_err() {
                violations.push(TopologyViolation::NotASieve {
                    object: base.object_name(x).into(),
                    sieve: Sieve {
                        on: x,
                        arrows: arrows.clone(),
                    }
                    .name(base),
                });
            }
        }
    }
    if !violations.is_empty() {
        return Ok(TopologyReport { violations });
    }
    for x in 0..base.object_count() {
        if !j.covers(&Sieve::maximal(base, x)) {
            violations.push(TopologyViolation::MissingMaximal {
                object: base.object_name(x).into(),
            });
        }
    }
    for x in 0..base.object_count() {
        for s in j.covering_sieves(x) {
            for h in base.arrows_into(x) {
                if !j.covers(&sieve_pullback(base, h, &s)?) {
                    violations.push(TopologyViolation::NotStable {
                        object: base.object_name(x).into(),
                        sieve: s.name(base),
                        arrow: base.arrow_name(h).into(),
                    });
                }
            }
        }
    }
    for x in 0..base.object_count() {
        let all = sieves_on(base, x)?;
        for s in j.covering_sieves(x) {
            for r in &all {
                if j.covers(r) {
                    continue;
                }
                let local = s.arrows.iter().all(|&h| {
                    sieve_pullback(base, h, r)
                        .map(|p| j.covers(&p))
                        .unwrap_or(false)
                });
                if local {
                    violations.push(TopologyViolation::NotTransitive {
                        object: base.object_name(x).into(),
                        cover: s.name(base),
                        sieve: r.name(base),
                    });
                }
            }
        }
    }
    Ok(TopologyReport { violations })
}

/// An element `x_f ∈ F(dom f)` for every arrow `f` of a sieve, as `(f, x_f)`.
pub type MatchingFamily = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafFailure {
    pub object: String,
    pub sieve: String,
    /// `(arrow, element)` atoms of the failing family.
    pub family: Vec<(String, String)>,
    /// Every amalgamation found; empty or with two or more entries.
    pub amalgamations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafReport {
    pub families_checked: u64,
    pub failure: Option<SheafFailure>,
}

impl SheafReport {
    pub fn is_sheaf(&self) -> bool {
        self.failure.is_none()
    }
}

/// Every matching family for `s`, by backtracking over the arrows of the sieve.
pub(crate) fn matching_families(
    f: &Presheaf,
    s: &Sieve,
    limits: &Limits,
    mut visit: impl FnMut(&MatchingFamily) -> bool,
) -> Result<()> {
    let base = f.base();
    let arrows: Vec<usize> = s.arrows.iter().copied().collect();
    let pos = |a: usize| {
        arrows
            .iter()
            .position(|&b| b == a)
            .expect("sieves are closed under precomposition")
    };
    // For a ∈ S and g into dom a: x_a · g = x_{a∘g}, checked at the later position.
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); arrows.len()];
    for (i, &a) in arrows.iter().enumerate() {
        for g in base.arrows_into(base.src(a)) {
            let k = pos(base.comp(a, g));
            checks[i.max(k)].push((i, k, g));
        }
    }
    let mut assign = vec![0usize; arrows.len()];
    let mut visited = 0u64;
    let mut stop = false;

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        f: &Presheaf,
        arrows: &[usize],
        checks: &[Vec<(usize, usize, usize)>],
        assign: &mut Vec<usize>,
        visited: &mut u64,
        cap: u64,
        stop: &mut bool,
        visit: &mut dyn FnMut(&MatchingFamily) -> bool,
    ) -> Result<()> {
        if i == arrows.len() {
            let fam: MatchingFamily = arrows.iter().copied().zip(assign.iter().copied()).collect();
            if !visit(&fam) {
                *stop = true;
            }
            return Ok(());
        }
        let base = f.base();
        for x in 0..f.at(base.src(arrows[i])).len() {
            *visited += 1;
            if *visited > cap {
                return Err(Error::size_limit("matching families", *visited, cap));
            }
            assign[i] = x;
            if checks[i]
                .iter()
                .all(|&(p, q, g)| f.res(g, assign[p]) == assign[q])
            {
                go(i + 1, f, arrows, checks, assign, visited, cap, stop, visit)?;
                if *stop {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
    go(
        0,
        f,
        &arrows,
        &checks,
        &mut assign,
        &mut visited,
        limits.max_enum,
        &mut stop,
        &mut visit,
    )
}

/// Every matching family on every covering sieve must have exactly one
/// amalgamation.
pub fn is_sheaf(f: &Presheaf, j: &GrothendieckTopology, limits: &Limits) -> Result<SheafReport> {
    if !(Arc::ptr_eq(f.base(), j.base()) || **f.base() == **j.base()) {
        return Err(Error::InvalidPresheaf(
            "presheaf and topology live on different bases".into(),
        ));
    }
    let base = f.base();
    let mut report = SheafReport {
        families_checked: 0,
        failure: None,
    };
    for c in 0..base.object_count() {
        for s in j.covering_sieves(c) {
            let mut failure = None;
            matching_families(f, &s, limits, |fam| {
                report.families_checked += 1;
                let amalgamations: Vec<usize> = (0..f.at(c).len())
                    .filter(|&x| fam.iter().all(|&(a, xa)| f.res(a, x) == xa))
                    .collect();
                if amalgamations.len() == 1 {
                    return true;
                }
                failure = Some(SheafFailure {
                    object: base.object_name(c).to_string(),
                    sieve: s.name(base),
                    family: fam
                        .iter()
                        .map(|&(a, xa)| {
                            (
                                base.arrow_name(a).to_string(),
                                f.at(base.src(a)).atom(xa).to_string(),
                            )
                        })
                        .collect(),
                    amalgamations: amalgamations
                        .iter()
                        .map(|&x| f.at(c).atom(x).to_string())
                        .collect(),
                });
                false
            })?;
            if failure.is_some() {
                report.failure = failure;
                return Ok(report);
            }
        }
    }
    Ok(report)
}
