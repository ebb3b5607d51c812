use std::fmt;
use std::sync::Arc;

/// A Prolog value.
///
/// Lists are ordinary compounds with functor `'.'`/2 terminated by the atom
/// `[]`. A compound always has at least one argument; a zero-arity callable
/// is represented as an [`Term::Atom`].
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Atom(Arc<str>),
    Var(Var),
    Int(i64),
    Float(f64),
    Compound(Arc<str>, Arc<[Term]>),
}

/// A logic variable. Identity is the numeric id; the name is kept only for
/// diagnostics and answer reporting.
#[derive(Clone, Debug)]
pub struct Var {
    pub name: Arc<str>,
    pub id: usize,
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

/// Predicate indicator: functor name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Arc<str>,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        PredKey {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

impl Term {
    pub fn atom(name: impl Into<Arc<str>>) -> Term {
        Term::Atom(name.into())
    }

    pub fn var(name: impl Into<Arc<str>>, id: usize) -> Term {
        Term::Var(Var {
            name: name.into(),
            id,
        })
    }

    /// Builds a compound term, collapsing to an atom when `args` is empty.
    pub fn compound(functor: impl Into<Arc<str>>, args: Vec<Term>) -> Term {
        let functor = functor.into();
        if args.is_empty() {
            Term::Atom(functor)
        } else {
            Term::Compound(functor, args.into())
        }
    }

    pub fn nil() -> Term {
        Term::atom(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(CONS, vec![head, tail])
    }

    /// Builds a list from `items` ending in `tail` (use [`Term::nil`] for a
    /// proper list).
    pub fn list_with_tail(items: impl IntoIterator<Item = Term>, tail: Term) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(..))
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Term::Atom(a) if &**a == name)
    }

    /// Functor name and arguments of a callable term.
    pub fn as_callable(&self) -> Option<(&Arc<str>, &[Term])> {
        match self {
            Term::Atom(name) => Some((name, &[])),
            Term::Compound(name, args) => Some((name, args)),
            _ => None,
        }
    }

    pub fn pred_key(&self) -> Option<PredKey> {
        self.as_callable().map(|(name, args)| PredKey {
            name: name.clone(),
            arity: args.len(),
        })
    }

    /// Largest variable id occurring in the term, if any.
    pub fn max_var_id(&self) -> Option<usize> {
        match self {
            Term::Var(v) => Some(v.id),
            Term::Compound(_, args) => args.iter().filter_map(Term::max_var_id).max(),
            _ => None,
        }
    }

    /// Visits every variable occurrence, left to right.
    pub fn for_each_var(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::Compound(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
            _ => {}
        }
    }

    /// Shifts every variable id by `offset`. Used to give each clause
    /// activation its own variables.
    pub fn rename(&self, offset: usize) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var {
                name: v.name.clone(),
                id: v.id + offset,
            }),
            Term::Compound(f, args) if args.iter().any(Term::has_vars) => Term::Compound(
                f.clone(),
                args.iter().map(|a| a.rename(offset)).collect(),
            ),
            other => other.clone(),
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Compound(_, args) => args.iter().any(Term::has_vars),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::format_term(self, true))
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Term {
        Term::Int(n)
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Term {
        Term::atom(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_compound_is_atom() {
        assert_eq!(Term::compound("foo", vec![]), Term::atom("foo"));
    }

    #[test]
    fn list_sugar() {
        let l = Term::list([Term::Int(1), Term::Int(2)]);
        assert_eq!(
            l,
            Term::cons(Term::Int(1), Term::cons(Term::Int(2), Term::nil()))
        );
    }

    #[test]
    fn rename_shifts_ids_only() {
        let t = Term::compound("f", vec![Term::var("X", 0), Term::atom("a"), Term::var("Y", 1)]);
        let r = t.rename(10);
        assert_eq!(r.max_var_id(), Some(11));
        assert_eq!(t.rename(0), t);
    }
}
