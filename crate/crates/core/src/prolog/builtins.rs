//! The builtin predicate catalog.

use super::term::{PredKey, Term};

pub const CATALOG: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    (",", 2),
    (";", 2),
    ("->", 2),
    ("\\+", 1),
    ("call", 1),
    ("=", 2),
    ("\\=", 2),
    ("==", 2),
    ("\\==", 2),
    ("is", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("var", 1),
    ("nonvar", 1),
    ("atom", 1),
    ("number", 1),
    ("write", 1),
    ("nl", 0),
    ("assert", 1),
    ("asserta", 1),
    ("assertz", 1),
    ("retract", 1),
];

pub fn is_builtin(key: &PredKey) -> bool {
    CATALOG
        .iter()
        .any(|(name, arity)| *arity == key.arity && *name == &*key.name)
}

/// The predicate indicator term `Name/Arity`.
pub fn indicator(key: &PredKey) -> Term {
    Term::compound(
        "/",
        vec![Term::Atom(key.name.clone()), Term::Int(key.arity as i64)],
    )
}
