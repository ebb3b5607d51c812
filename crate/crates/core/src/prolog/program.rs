use std::collections::HashMap;
use std::sync::Arc;

use super::error::EngineError;
use super::term::{PredKey, Term, Var};

/// A stored clause. Variables are numbered `0..var_count`.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub head: Term,
    pub body: Term,
    pub var_count: usize,
    /// Indexed by variable: true if it occurs exactly once in the head.
    /// Binding such a variable during head unification cannot create a
    /// cycle, so the occurs check is skipped for it.
    pub head_once: Vec<bool>,
}

impl Clause {
    /// Builds a clause from a fully resolved term `H :- B` or `H`,
    /// renumbering its variables from zero.
    pub fn from_term(term: &Term) -> Result<Clause, EngineError> {
        let (head, body) = match term {
            Term::Compound(f, args) if &**f == ":-" && args.len() == 2 => {
                (args[0].clone(), args[1].clone())
            }
            other => (other.clone(), Term::atom("true")),
        };
        match head {
            Term::Var(_) => return Err(EngineError::instantiation(term.clone())),
            Term::Int(_) | Term::Float(_) => {
                return Err(EngineError::type_error("callable", head.clone()))
            }
            _ => {}
        }
        if matches!(body, Term::Int(_) | Term::Float(_)) {
            return Err(EngineError::type_error("callable", body));
        }
        let mut ids = HashMap::new();
        let head = renumber(&head, &mut ids);
        let body = renumber(&body, &mut ids);
        let mut counts = vec![0u32; ids.len()];
        head.for_each_var(&mut |v| counts[v.id] += 1);
        Ok(Clause {
            head,
            body,
            var_count: ids.len(),
            head_once: counts.into_iter().map(|n| n == 1).collect(),
        })
    }

    pub fn key(&self) -> PredKey {
        self.head.pred_key().expect("clause heads are callable")
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_atom("true")
    }
}

fn renumber(term: &Term, ids: &mut HashMap<usize, usize>) -> Term {
    match term {
        Term::Var(v) => {
            let next = ids.len();
            let id = *ids.entry(v.id).or_insert(next);
            Term::Var(Var {
                name: v.name.clone(),
                id,
            })
        }
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| renumber(a, ids)).collect())
        }
        other => other.clone(),
    }
}

/// A goal read from source together with its named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub goal: Term,
    /// Source names of the goal's variables, excluding anonymous ones.
    pub var_names: Vec<(Arc<str>, usize)>,
}

/// One element of a program: a clause to assert or a query to solve.
#[derive(Clone, Debug, PartialEq)]
pub enum ProgramItem {
    Clause { clause: Clause, pos: super::Pos },
    Query { query: Query, pos: super::Pos },
}

impl ProgramItem {
    pub fn pos(&self) -> super::Pos {
        match self {
            ProgramItem::Clause { pos, .. } | ProgramItem::Query { pos, .. } => *pos,
        }
    }
}
