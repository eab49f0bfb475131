//! Decision procedure and proof search for propositional BI, the logic of
//! bunched implications.
//!
//! Sequents are parsed ([`parse`]), their antecedents normalized to canonical
//! n-ary bunches ([`bunch`]), and decided by repetition-free backward search
//! ([`prover`]) over a contraction-free rule set ([`calculus`]) whose
//! termination is controlled by the weight measure ([`measure`]). Every
//! derivation can be re-checked independently ([`check`]) and compared
//! against a naive bounded prover ([`oracle`]).

pub mod bunch;
pub mod calculus;
pub mod check;
pub mod cli;
pub mod formula;
pub mod measure;
pub mod oracle;
pub mod parse;
pub mod prover;
pub mod render;

pub use bunch::{reduce, star, Bunch, NormalBunch, RawSequent, Sequent, StarBunch};
pub use calculus::{axioms, expand, expand_focused, preimage_variants, Position, Role, RuleApplication, RuleName, VariantDescriptor};
pub use check::check_instance;
pub use formula::Formula;
pub use measure::{critical_pairs, weight, CriticalPair, PairKind};
pub use parse::{parse_formula, parse_sequent, ParseError};
pub use prover::{decide, decide_text, search_bounds, verify, Derivation, Prover, SearchConfig, SearchStats, Verdict};
pub use render::{Render, Style};
