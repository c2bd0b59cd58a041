//! Finite topos causal models.
//!
//! Everything here is computed over finite data: [`finset`] supplies the
//! category of finite sets, [`fincat`] finite shapes with limits and colimits,
//! [`presheaf`] the presheaf toposes over a finite base (subobject classifier,
//! Heyting algebra of subobjects, exponentials, Grothendieck topologies),
//! [`tcm`] structural causal models as objects of the arrow category,
//! [`graphtopos`] the topos of directed graphs, and [`logic`] the internal
//! language with Kripke-Joyal forcing.
//!
//! Every universal construction can be checked by exhaustive enumeration,
//! bounded by the caps in [`Limits`].

pub mod error;
pub mod fincat;
pub mod finset;
pub mod graphtopos;
pub mod logic;
pub mod presheaf;
pub mod tcm;

mod closure;

pub use error::{Error, Result};

/// Enumeration caps shared by every exhaustive construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on the number of candidates any single enumeration may visit.
    pub max_enum: u64,
    /// Largest candidate apex used when checking universality of a cone.
    pub cone_apex_bound: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: 1_000_000,
            cone_apex_bound: 3,
        }
    }
}

impl Limits {
    pub fn with_max_enum(max_enum: u64) -> Self {
        Limits {
            max_enum,
            ..Limits::default()
        }
    }

    /// `base^exp`, or an error once it passes `max_enum`.
    pub(crate) fn checked_pow(&self, what: &str, base: usize, exp: usize) -> Result<u64> {
        if base == 0 {
            return Ok(u64::from(exp == 0));
        }
        let mut acc: u64 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(base as u64);
            if acc > self.max_enum {
                return Err(Error::size_limit(
                    what,
                    format!("{base}^{exp}"),
                    self.max_enum,
                ));
            }
        }
        Ok(acc)
    }

    pub(crate) fn checked_product(
        &self,
        what: &str,
        sizes: impl IntoIterator<Item = usize>,
    ) -> Result<u64> {
        let sizes: Vec<usize> = sizes.into_iter().collect();
        if sizes.contains(&0) {
            return Ok(0);
        }
        let mut acc: u64 = 1;
        for s in sizes {
            acc = acc.saturating_mul(s as u64);
            if acc > self.max_enum {
                return Err(Error::size_limit(what, acc, self.max_enum));
            }
        }
        Ok(acc)
    }
}
