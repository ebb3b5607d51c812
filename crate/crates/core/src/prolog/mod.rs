//! A small Prolog: reader, writer, clause database and solver.

mod arith;
pub mod builtins;
mod database;
mod error;
pub mod format;
pub mod lexer;
mod machine;
pub mod ops;
pub mod parser;
mod program;
mod subst;
mod term;

pub use arith::{eval_arith, Number};
pub use database::{ClauseStore, Database, Position};
pub use error::{EngineError, ErrorKind, Pos, ReadError};
pub use format::format_term;
pub use machine::{
    Foreign, NoForeign, Output, Session, Solution, SolveOutcome, DEFAULT_STEP_LIMIT,
};
pub use parser::{read_program, read_term, ProgramReader};
pub use program::{Clause, ProgramItem, Query};
pub use subst::{identical, unify, Substitution};
pub use term::{PredKey, Term, Var, CONS, NIL};
