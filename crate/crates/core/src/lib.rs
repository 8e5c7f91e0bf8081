//! S-machines as rewriting systems over group alphabets.
//!
//! The crate builds machine hardware and rules, composes the machine tower
//! used for cubic-Dehn-function constructions, emits the associated group
//! presentations, realizes computations as van Kampen trapezia and disk
//! diagrams, and ships a desk-scale verification harness for the structural
//! lemmas the constructions rely on.

pub mod burnside;
pub mod computation;
pub mod diagram;
pub mod hardware;
pub mod machines;
pub mod presentation;
pub mod rules;
pub mod verify;

pub use hardware::{AdmissibleWord, Hardware, HardwareBuilder, LetterId, Measures, Token};
pub use machines::{Machine, Params, Tower};
pub use rules::{Domain, RuleTags, SRule, SignedRule};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hardware: {0}")]
    Hardware(String),

    #[error("word: {0}")]
    Word(String),

    #[error("rule: {0}")]
    Rule(String),

    #[error("machine: {0}")]
    Machine(String),

    #[error("rule {rule} not applicable at step {step}: {reason}")]
    Inapplicable {
        step: usize,
        rule: String,
        reason: String,
    },

    #[error("computation: {0}")]
    Computation(String),

    #[error("search exhausted: {0}")]
    Exhausted(String),

    #[error("presentation: {0}")]
    Presentation(String),

    #[error("burnside oracle: {0}")]
    Burnside(String),

    #[error("diagram: {0}")]
    Diagram(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
