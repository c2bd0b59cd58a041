//! The internal language of a finite presheaf topos.
//!
//! Terms ([`term`]) are typechecked against a [`Topos`], interpreted as
//! presheaf morphisms out of their context, and forced at generalized
//! elements either directly ([`forces`]) or through the inductive clauses
//! ([`forces_by_clauses`]).

mod clauses;
mod eval;
mod lewis;
mod lst;
mod parse;
pub mod term;
mod topos;

pub use clauses::{forces_by_clauses, ClauseMode, ClauseOptions, ClauseResult, TraceNode};
pub use eval::{
    comprehension, comprehension_in, eval_at, forces, interpret, interpret_in, restrict_env,
    Binding, Context, Env, Evaluator, ForcingContext,
};
pub use lewis::{lewis_counterfactual, outcome_atom, outcome_valuation, NeighborhoodSystem, Prop};
pub use lst::desugar_lst;
pub use parse::{parse_term, parse_type};
pub use term::{CausalAtom, Term, Type};
pub use topos::{typecheck, Aux, NamedArrow, Resolved, Structure, Topos, Typed};
