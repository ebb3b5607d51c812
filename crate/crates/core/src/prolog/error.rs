use std::fmt;

use thiserror::Error;

use super::term::Term;

/// 1-based line and column of a character in source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Pos { line, column }
    }

    /// Translates a position relative to text that starts at `origin` into
    /// an absolute one.
    pub fn relative_to(self, origin: Pos) -> Pos {
        if self.line <= 1 {
            Pos::new(origin.line, origin.column + self.column - 1)
        } else {
            Pos::new(origin.line + self.line - 1, self.column)
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Failure to read Prolog source text.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ReadError {
    #[error("lexical error at {pos}: {message}")]
    Lexical { message: String, pos: Pos },
    #[error("syntax error at {pos}: {message}")]
    Syntax { message: String, pos: Pos },
    #[error("type error at {pos}: clause head {culprit} is not callable")]
    NotCallable { culprit: Term, pos: Pos },
}

impl ReadError {
    pub fn pos(&self) -> Pos {
        match self {
            ReadError::Lexical { pos, .. }
            | ReadError::Syntax { pos, .. }
            | ReadError::NotCallable { pos, .. } => *pos,
        }
    }

    pub fn relative_to(mut self, origin: Pos) -> Self {
        match &mut self {
            ReadError::Lexical { pos, .. }
            | ReadError::Syntax { pos, .. }
            | ReadError::NotCallable { pos, .. } => *pos = pos.relative_to(origin),
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Instantiation,
    Type,
    Existence,
    Arithmetic,
    Overflow,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Instantiation => "instantiation error",
            ErrorKind::Type => "type error",
            ErrorKind::Existence => "existence error",
            ErrorKind::Arithmetic => "arithmetic error",
            ErrorKind::Overflow => "integer overflow",
        })
    }
}

/// A runtime error raised while solving a goal.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind}: {detail} (in {culprit})")]
pub struct EngineError {
    pub kind: ErrorKind,
    pub culprit: Term,
    pub detail: String,
}

impl EngineError {
    pub fn new(kind: ErrorKind, culprit: Term, detail: impl Into<String>) -> Self {
        EngineError {
            kind,
            culprit,
            detail: detail.into(),
        }
    }

    pub fn instantiation(culprit: Term) -> Self {
        Self::new(ErrorKind::Instantiation, culprit, "argument is not sufficiently instantiated")
    }

    pub fn type_error(expected: &str, culprit: Term) -> Self {
        Self::new(ErrorKind::Type, culprit, format!("expected {expected}"))
    }
}
