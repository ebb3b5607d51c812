//! Variable bindings and unification.

use std::collections::HashSet;

use super::term::{Term, Var};

/// Bindings from variable ids to terms, with a trail so that bindings made
/// after a [`Substitution::mark`] can be undone.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    slots: Vec<Option<Term>>,
    trail: Vec<usize>,
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        let n = self.slots.len().max(other.slots.len());
        (0..n).all(|i| self.lookup(i) == other.lookup(i))
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, id: usize) -> Option<&Term> {
        self.slots.get(id).and_then(Option::as_ref)
    }

    /// Number of bound variables.
    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bound variables in id order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Term)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|t| (i, t)))
    }

    /// Binds an unbound variable.
    pub fn bind(&mut self, id: usize, value: Term) {
        if id >= self.slots.len() {
            self.slots.resize(id + 1, None);
        }
        debug_assert!(self.slots[id].is_none(), "rebinding variable {id}");
        self.slots[id] = Some(value);
        self.trail.push(id);
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    /// Removes every binding made since `mark`.
    pub fn undo_to(&mut self, mark: usize) {
        for id in self.trail.drain(mark..) {
            self.slots[id] = None;
        }
    }

    /// Follows variable bindings until an unbound variable or a non-variable.
    pub fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.lookup(v.id) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Applies the substitution throughout `t`.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.deref(t) {
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
            other => other.clone(),
        }
    }

    /// Whether variable `id` occurs in `t` under this substitution. Each
    /// binding is expanded once, so cyclic bindings terminate.
    pub fn occurs(&self, id: usize, t: &Term) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) if v.id == id => return true,
                Term::Var(v) => {
                    if let Some(bound) = self.lookup(v.id) {
                        if seen.insert(v.id) {
                            stack.push(bound);
                        }
                    }
                }
                Term::Compound(_, args) => stack.extend(args.iter()),
                _ => {}
            }
        }
        false
    }

    /// Unifies two terms in place. On failure some bindings may already
    /// have been made; the caller undoes them with [`Substitution::undo_to`].
    pub fn unify_in_place(&mut self, a: &Term, b: &Term, occurs_check: bool) -> bool {
        self.unify_in_place_exempting(a, b, occurs_check, &|_| false)
    }

    /// As [`Substitution::unify_in_place`], but binding a variable for which
    /// `exempt` holds skips the occurs check. The caller guarantees such
    /// variables cannot occur in the terms they are bound to.
    pub fn unify_in_place_exempting(
        &mut self,
        a: &Term,
        b: &Term,
        occurs_check: bool,
        exempt: &dyn Fn(usize) -> bool,
    ) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((a, b)) = stack.pop() {
            let a = self.deref(&a).clone();
            let b = self.deref(&b).clone();
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    if x.id != y.id {
                        // Bind the younger variable to the older one.
                        let (young, old) = if x.id > y.id { (x, y) } else { (y, x) };
                        self.bind(young.id, Term::Var(old));
                    }
                }
                (Term::Var(x), t) | (t, Term::Var(x)) => {
                    if occurs_check && !exempt(x.id) && self.occurs(x.id, &t) {
                        return false;
                    }
                    self.bind(x.id, t);
                }
                (Term::Atom(x), Term::Atom(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (Term::Int(x), Term::Int(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (Term::Float(x), Term::Float(y)) => {
                    if x.to_bits() != y.to_bits() {
                        return false;
                    }
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                }
                _ => return false,
            }
        }
        true
    }

    /// True if some bound variable reaches itself by dereferencing.
    pub fn has_cycle(&self) -> bool {
        self.iter().any(|(id, t)| self.occurs(id, t))
    }
}

/// Unifies `a` and `b` under `s` with the occurs check, returning the
/// extended substitution or `None` if they do not unify.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    out.unify_in_place(a, b, true).then_some(out)
}

/// Structural identity of two terms under `s` (the `==` test).
pub fn identical(s: &Substitution, a: &Term, b: &Term) -> bool {
    let mut stack = vec![(a, b)];
    while let Some((a, b)) = stack.pop() {
        match (s.deref(a), s.deref(b)) {
            (Term::Var(Var { id: x, .. }), Term::Var(Var { id: y, .. })) if x == y => {}
            (Term::Atom(x), Term::Atom(y)) if x == y => {}
            (Term::Int(x), Term::Int(y)) if x == y => {}
            (Term::Float(x), Term::Float(y)) if x.to_bits() == y.to_bits() => {}
            (Term::Compound(f, xs), Term::Compound(g, ys)) if f == g && xs.len() == ys.len() => {
                stack.extend(xs.iter().zip(ys.iter()));
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(f: &str, args: Vec<Term>) -> Term {
        Term::compound(f, args)
    }

    fn v(name: &str, id: usize) -> Term {
        Term::var(name, id)
    }

    #[test]
    fn textbook_case() {
        let s = unify(
            &c("f", vec![v("X", 0), Term::atom("b")]),
            &c("f", vec![Term::atom("a"), v("Y", 1)]),
            &Substitution::new(),
        )
        .unwrap();
        assert_eq!(s.lookup(0), Some(&Term::atom("a")));
        assert_eq!(s.lookup(1), Some(&Term::atom("b")));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn occurs_check_rejects_cyclic_binding() {
        let x = v("X", 0);
        assert!(unify(&x, &c("f", vec![x.clone()]), &Substitution::new()).is_none());
        let mut s = Substitution::new();
        assert!(s.unify_in_place(&x, &c("f", vec![x.clone()]), false));
        assert!(s.has_cycle());
    }

    #[test]
    fn binds_quoted_atom() {
        let s = unify(
            &c("msg", vec![v("X", 0)]),
            &c("msg", vec![Term::atom("Hello, World!")]),
            &Substitution::new(),
        )
        .unwrap();
        assert_eq!(s.resolve(&v("X", 0)), Term::atom("Hello, World!"));
    }

    #[test]
    fn clashes_fail() {
        let s = Substitution::new();
        assert!(unify(&Term::Int(1), &Term::Float(1.0), &s).is_none());
        assert!(unify(&c("f", vec![Term::Int(1)]), &c("g", vec![Term::Int(1)]), &s).is_none());
        assert!(unify(&c("f", vec![Term::Int(1)]), &c("f", vec![Term::Int(1), Term::Int(2)]), &s).is_none());
    }

    #[test]
    fn undo_restores_bindings() {
        let mut s = Substitution::new();
        s.bind(0, Term::atom("a"));
        let m = s.mark();
        assert!(s.unify_in_place(&v("Y", 1), &v("Z", 2), true));
        assert_eq!(s.len(), 2);
        s.undo_to(m);
        assert_eq!(s.len(), 1);
        assert_eq!(s.lookup(0), Some(&Term::atom("a")));
    }

    #[test]
    fn identical_respects_bindings() {
        let mut s = Substitution::new();
        s.bind(1, Term::atom("a"));
        assert!(identical(&s, &c("f", vec![v("Y", 1)]), &c("f", vec![Term::atom("a")])));
        assert!(!identical(&s, &v("X", 0), &v("Z", 2)));
        assert!(identical(&s, &v("X", 0), &v("X", 0)));
    }
}
