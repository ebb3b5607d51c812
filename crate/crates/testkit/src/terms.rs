use std::collections::HashMap;

use proptest::prelude::*;
use psp_core::prolog::Term;

fn var(id: usize) -> Term {
    Term::var(format!("X{id}"), id)
}

/// Terms over a small signature (a, b, c, 0..3, f/1, g/2, h/3) and five
/// variables, so that random pairs unify reasonably often.
pub fn unifiable_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::atom),
        (0i64..3).prop_map(Term::Int),
        (0usize..5).prop_map(var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Term::compound("f", vec![a])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::compound("g", vec![a, b])),
            (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| Term::compound("h", vec![a, b, c])),
        ]
    })
}

const ATOMS: &[&str] = &[
    "a", "foo", "bar_1", "[]", "!", ";", ",", "|", "+", "-", "*", "/", "//", "mod", "is", "=",
    ":-", "?-", "->", "\\+", "::", "-->", "hello world", "it's", "", "A", "_x", "a.b", "/*",
    "é", "{}", "[", "nl", "'",
];

fn finite_float() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        prop::sample::select(vec![0.0, -0.0, 1.0, -1.5, 1e-7, 2.5e300, 0.1]),
    ]
}

/// Arbitrary terms exercising operators, quoting, lists and number edge
/// cases, for reader/writer round trips.
pub fn syntax_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(ATOMS).prop_map(Term::atom),
        any::<i64>().prop_map(Term::Int),
        prop::sample::select(vec![0i64, -1, 1, i64::MIN, i64::MAX]).prop_map(Term::Int),
        finite_float().prop_map(Term::Float),
        (0usize..5).prop_map(var),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (prop::sample::select(ATOMS), prop::collection::vec(inner.clone(), 1..=3))
                .prop_map(|(f, args)| Term::compound(f, args)),
            (prop::collection::vec(inner.clone(), 0..=3), prop::option::of(inner))
                .prop_map(|(items, tail)| match tail {
                    Some(t) => Term::list_with_tail(items, t),
                    None => Term::list(items),
                }),
        ]
    })
}

/// Whether `a` and `b` are equal up to a consistent renaming of variables.
/// Floats compare by bit pattern.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    fn walk(a: &Term, b: &Term, fwd: &mut HashMap<usize, usize>, back: &mut HashMap<usize, usize>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                *fwd.entry(x.id).or_insert(y.id) == y.id && *back.entry(y.id).or_insert(x.id) == x.id
            }
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Float(x), Term::Float(y)) => x.to_bits() == y.to_bits(),
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| walk(x, y, fwd, back))
            }
            _ => false,
        }
    }
    walk(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// An idempotent substitution: no bound variable occurs in any binding.
pub type Mgu = HashMap<usize, Term>;

pub fn apply(t: &Term, s: &Mgu) -> Term {
    match t {
        Term::Var(v) => s.get(&v.id).cloned().unwrap_or_else(|| t.clone()),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| apply(a, s)).collect()),
        _ => t.clone(),
    }
}

fn occurs(id: usize, t: &Term) -> bool {
    match t {
        Term::Var(v) => v.id == id,
        Term::Compound(_, args) => args.iter().any(|a| occurs(id, a)),
        _ => false,
    }
}

/// Textbook unification by equation solving (Martelli–Montanari), kept
/// deliberately separate from the engine's trail-based algorithm.
pub fn reference_unify(a: &Term, b: &Term) -> Option<Mgu> {
    let mut solved: Mgu = HashMap::new();
    let mut equations = vec![(a.clone(), b.clone())];
    while let Some((l, r)) = equations.pop() {
        let l = apply(&l, &solved);
        let r = apply(&r, &solved);
        match (&l, &r) {
            (Term::Var(x), Term::Var(y)) if x.id == y.id => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs(x.id, t) {
                    return None;
                }
                let single: Mgu = HashMap::from([(x.id, t.clone())]);
                for value in solved.values_mut() {
                    *value = apply(value, &single);
                }
                solved.insert(x.id, t.clone());
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                equations.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            (Term::Float(x), Term::Float(y)) if x.to_bits() == y.to_bits() => {}
            _ if l == r && !matches!(l, Term::Float(_)) => {}
            _ => return None,
        }
    }
    Some(solved)
}
