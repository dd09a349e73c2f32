//! Polytopological PDL over finite derivative spaces.
//!
//! Formulas of PDL with one derivative modality per agent are evaluated on
//! finite models where each agent's derivative is the preimage operator of
//! a weakly transitive relation. Around the evaluator sit the syntactic
//! translations, the model constructions used to transfer truth between
//! frame classes, PLTL on bijective and integer models, and a bounded
//! finite-model search that probes a formula with only infinite models.
//!
//! Runnable examples, one per capability:
//!
//! ```text
//! cargo run --example parse_and_print
//! cargo run --example model_check [model.json] [formula]
//! cargo run --example derivative_spaces
//! cargo run --example model_transformations
//! cargo run --example pltl_doubling
//! cargo run --release --example finite_model_search
//! cargo run --release --example nofmp -- 6 3
//! cargo run --release --example verify_suites -- [seed] [iterations]
//! ```

pub mod spaces;
pub mod syntax;
pub mod semantics;
pub mod pltl;
pub mod search;
pub mod generate;
pub mod verify;
pub mod cli;
