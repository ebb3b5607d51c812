//! Depth-first SLD resolution with chronological backtracking.
//!
//! The solver is an explicit machine: a continuation of pending goals (a
//! shared linked list) and a stack of choice points, each remembering the
//! trail mark to undo to and how to resume. Nothing recurses on the Rust
//! stack per resolution step, so deep recursion in Prolog programs is bounded
//! only by the step budget.

use std::rc::Rc;
use std::sync::Arc;

use super::arith::eval_arith;
use super::builtins;
use super::database::{Database, Position};
use super::error::{EngineError, ErrorKind};
use super::format::format_term;
use super::program::{Clause, Query};
use super::subst::{identical, Substitution};
use super::term::{PredKey, Term};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

/// Captured output of a session.
#[derive(Clone, Debug, Default)]
pub struct Output {
    bytes: Vec<u8>,
    started: bool,
}

impl Output {
    /// Appends bytes that do not count as predicate output (page literals).
    pub fn write_literal(&mut self, bytes: &[u8]) {
        self.bytes.extend_from_slice(bytes);
    }

    /// Appends bytes produced by an output predicate.
    pub fn write_output(&mut self, bytes: &[u8]) {
        if !bytes.is_empty() {
            self.started = true;
        }
        self.bytes.extend_from_slice(bytes);
    }

    /// Whether any output predicate has emitted a byte.
    pub fn started(&self) -> bool {
        self.started
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn take(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.bytes)
    }
}

/// Host-defined predicates, called with fully resolved arguments.
pub trait Foreign {
    fn is_defined(&self, key: &PredKey) -> bool;
    fn call(&mut self, key: &PredKey, args: &[Term], output: &Output) -> Result<bool, EngineError>;
}

/// No host predicates.
pub struct NoForeign;

impl Foreign for NoForeign {
    fn is_defined(&self, _: &PredKey) -> bool {
        false
    }

    fn call(&mut self, key: &PredKey, _: &[Term], _: &Output) -> Result<bool, EngineError> {
        unreachable!("{key} is not a foreign predicate")
    }
}

/// A successful answer.
#[derive(Clone, Debug)]
pub struct Solution {
    pub substitution: Substitution,
    names: Vec<(Arc<str>, usize)>,
}

impl Solution {
    /// The value bound to the named query variable.
    pub fn get(&self, name: &str) -> Option<Term> {
        self.names
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(n, id)| self.substitution.resolve(&Term::var(n.clone(), *id)))
    }

    pub fn bindings(&self) -> Vec<(Arc<str>, Term)> {
        self.names
            .iter()
            .map(|(n, id)| (n.clone(), self.substitution.resolve(&Term::var(n.clone(), *id))))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Success(Solution),
    Failure,
    BudgetExceeded,
    Error(EngineError),
}

impl SolveOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, SolveOutcome::Success(_))
    }
}

/// Everything one query execution needs: the database, the output sink and
/// the remaining step budget. The budget is shared by every query run in the
/// session.
#[derive(Clone, Debug)]
pub struct Session {
    pub db: Database,
    pub output: Output,
    pub occurs_check: bool,
    budget: u64,
}

impl Session {
    pub fn new(db: Database) -> Self {
        Session {
            db,
            output: Output::default(),
            occurs_check: true,
            budget: DEFAULT_STEP_LIMIT,
        }
    }

    pub fn with_budget(mut self, steps: u64) -> Self {
        self.budget = steps;
        self
    }

    pub fn with_occurs_check(mut self, on: bool) -> Self {
        self.occurs_check = on;
        self
    }

    pub fn set_budget(&mut self, steps: u64) {
        self.budget = steps;
    }

    /// Remaining steps.
    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Solves `goal` for its first solution.
    pub fn solve(&mut self, goal: &Term, foreign: &mut dyn Foreign) -> SolveOutcome {
        let mut names: Vec<(Arc<str>, usize)> = Vec::new();
        goal.for_each_var(&mut |v| {
            if &*v.name != "_" && !names.iter().any(|(_, id)| *id == v.id) {
                names.push((v.name.clone(), v.id));
            }
        });
        Machine::new(self, foreign).run(goal.clone(), names)
    }

    pub fn run_query(&mut self, query: &Query, foreign: &mut dyn Foreign) -> SolveOutcome {
        Machine::new(self, foreign).run(query.goal.clone(), query.var_names.clone())
    }

    /// Asserts a clause into the request layer, refusing builtin and host
    /// predicates.
    pub fn assert_clause(
        &mut self,
        clause: Clause,
        position: Position,
        foreign: &dyn Foreign,
    ) -> Result<(), EngineError> {
        let key = clause.key();
        if foreign.is_defined(&key) {
            return Err(EngineError::type_error("modifiable predicate", builtins::indicator(&key)));
        }
        self.db.assert_clause(clause, position)
    }
}

type Cont = Option<Rc<ContNode>>;

struct ContNode {
    frame: Frame,
    next: Cont,
}

enum Frame {
    Goal(Term),
    /// Drop every choice point above this height (if-then-else and `\+`).
    CutTo(usize),
}

impl Drop for ContNode {
    // Unlink iteratively; long continuations would otherwise recurse once per node.
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(node) = next {
            match Rc::try_unwrap(node) {
                Ok(mut n) => next = n.next.take(),
                Err(_) => break,
            }
        }
    }
}

fn push(frame: Frame, next: Cont) -> Cont {
    Some(Rc::new(ContNode { frame, next }))
}

fn goal(t: Term, next: Cont) -> Cont {
    push(Frame::Goal(t), next)
}

struct ChoicePoint {
    mark: usize,
    alt: Alternative,
}

enum Alternative {
    Resume(Cont),
    Clauses {
        goal: Term,
        clauses: Rc<[Arc<Clause>]>,
        next: usize,
        cont: Cont,
    },
    Retract {
        head: Term,
        body: Term,
        clauses: Rc<[Arc<Clause>]>,
        next: usize,
        cont: Cont,
    },
}

enum Flow {
    Continue(Cont),
    Backtrack,
}

enum Halt {
    Budget,
    Error(EngineError),
}

impl From<EngineError> for Halt {
    fn from(e: EngineError) -> Self {
        Halt::Error(e)
    }
}

struct Machine<'a> {
    session: &'a mut Session,
    foreign: &'a mut dyn Foreign,
    subst: Substitution,
    choices: Vec<ChoicePoint>,
    next_var: usize,
}

impl<'a> Machine<'a> {
    fn new(session: &'a mut Session, foreign: &'a mut dyn Foreign) -> Self {
        Machine {
            session,
            foreign,
            subst: Substitution::new(),
            choices: Vec::new(),
            next_var: 0,
        }
    }

    fn run(mut self, query: Term, names: Vec<(Arc<str>, usize)>) -> SolveOutcome {
        self.next_var = query.max_var_id().map_or(0, |m| m + 1);
        match self.drive(goal(query, None)) {
            Ok(true) => SolveOutcome::Success(Solution {
                substitution: self.subst,
                names,
            }),
            Ok(false) => SolveOutcome::Failure,
            Err(Halt::Budget) => SolveOutcome::BudgetExceeded,
            Err(Halt::Error(e)) => SolveOutcome::Error(e),
        }
    }

    fn tick(&mut self) -> Result<(), Halt> {
        if self.session.budget == 0 {
            return Err(Halt::Budget);
        }
        self.session.budget -= 1;
        Ok(())
    }

    fn drive(&mut self, mut cont: Cont) -> Result<bool, Halt> {
        loop {
            let Some(node) = cont else {
                return Ok(true);
            };
            self.tick()?;
            let next = node.next.clone();
            let flow = match &node.frame {
                Frame::CutTo(height) => {
                    self.choices.truncate(*height);
                    Flow::Continue(next)
                }
                Frame::Goal(g) => self.call(g, next)?,
            };
            cont = match flow {
                Flow::Continue(c) => c,
                Flow::Backtrack => match self.backtrack()? {
                    Some(c) => c,
                    None => return Ok(false),
                },
            };
        }
    }

    fn backtrack(&mut self) -> Result<Option<Cont>, Halt> {
        while let Some(cp) = self.choices.pop() {
            self.subst.undo_to(cp.mark);
            self.tick()?;
            let flow = match cp.alt {
                Alternative::Resume(cont) => Flow::Continue(cont),
                Alternative::Clauses {
                    goal,
                    clauses,
                    next,
                    cont,
                } => self.try_clauses(goal, clauses, next, cont),
                Alternative::Retract {
                    head,
                    body,
                    clauses,
                    next,
                    cont,
                } => self.try_retract(head, body, clauses, next, cont),
            };
            if let Flow::Continue(c) = flow {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    fn push_choice(&mut self, alt: Alternative) {
        self.choices.push(ChoicePoint {
            mark: self.subst.mark(),
            alt,
        });
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        self.subst.unify_in_place(a, b, self.session.occurs_check)
    }

    fn call(&mut self, g: &Term, cont: Cont) -> Result<Flow, Halt> {
        let g = self.subst.deref(g).clone();
        let (name, args) = match &g {
            Term::Var(_) => return Err(EngineError::instantiation(g).into()),
            Term::Int(_) | Term::Float(_) => {
                return Err(EngineError::type_error("callable", g).into())
            }
            Term::Atom(name) => (name.clone(), &[][..]),
            Term::Compound(name, args) => (name.clone(), &args[..]),
        };
        let flow = match (&*name, args.len()) {
            ("true", 0) => Flow::Continue(cont),
            ("fail", 0) => Flow::Backtrack,
            (",", 2) => Flow::Continue(goal(args[0].clone(), goal(args[1].clone(), cont))),
            (";", 2) => {
                let height = self.choices.len();
                self.push_choice(Alternative::Resume(goal(args[1].clone(), cont.clone())));
                match self.subst.deref(&args[0]) {
                    Term::Compound(f, ite) if &**f == "->" && ite.len() == 2 => {
                        let (cond, then) = (ite[0].clone(), ite[1].clone());
                        Flow::Continue(goal(
                            cond,
                            push(Frame::CutTo(height), goal(then, cont)),
                        ))
                    }
                    _ => Flow::Continue(goal(args[0].clone(), cont)),
                }
            }
            ("->", 2) => {
                let height = self.choices.len();
                Flow::Continue(goal(
                    args[0].clone(),
                    push(Frame::CutTo(height), goal(args[1].clone(), cont)),
                ))
            }
            ("\\+", 1) => {
                let height = self.choices.len();
                self.push_choice(Alternative::Resume(cont));
                Flow::Continue(goal(
                    args[0].clone(),
                    push(Frame::CutTo(height), goal(Term::atom("fail"), None)),
                ))
            }
            ("call", 1) => Flow::Continue(goal(args[0].clone(), cont)),
            ("retract", 1) => self.retract(&args[0], cont).map_err(|e| self.blame(e, &g))?,
            _ if builtins::is_builtin(&PredKey::new(name.clone(), args.len())) => {
                let ok = self
                    .deterministic(&name, args)
                    .map_err(|e| self.blame(e, &g))?;
                if ok {
                    Flow::Continue(cont)
                } else {
                    Flow::Backtrack
                }
            }
            _ => self.call_user(&g, name, args, cont)?,
        };
        Ok(flow)
    }

    /// Re-targets a builtin's error at the goal that raised it.
    fn blame(&self, mut e: EngineError, goal: &Term) -> EngineError {
        let goal = self.subst.resolve(goal);
        if e.culprit != goal {
            e.detail = format!("{} ({})", e.detail, e.culprit);
            e.culprit = goal;
        }
        e
    }

    fn call_user(
        &mut self,
        g: &Term,
        name: Arc<str>,
        args: &[Term],
        cont: Cont,
    ) -> Result<Flow, Halt> {
        let key = PredKey::new(name, args.len());
        if self.foreign.is_defined(&key) {
            let resolved: Vec<Term> = args.iter().map(|a| self.subst.resolve(a)).collect();
            let ok = self
                .foreign
                .call(&key, &resolved, &self.session.output)
                .map_err(|e| self.blame(e, g))?;
            return Ok(if ok { Flow::Continue(cont) } else { Flow::Backtrack });
        }
        let Some(clauses) = self.session.db.clauses(&key) else {
            return Err(EngineError::new(
                ErrorKind::Existence,
                self.subst.resolve(g),
                format!("unknown procedure {key}"),
            )
            .into());
        };
        Ok(self.try_clauses(g.clone(), clauses.into(), 0, cont))
    }

    /// Cheap first-argument test that rules a clause out without renaming.
    fn may_match(&self, goal: &Term, clause: &Clause) -> bool {
        let (Term::Compound(_, goal_args), Term::Compound(_, head_args)) = (goal, &clause.head)
        else {
            return true;
        };
        match (self.subst.deref(&goal_args[0]), &head_args[0]) {
            (Term::Atom(a), Term::Atom(b)) => a == b,
            (Term::Int(a), Term::Int(b)) => a == b,
            (Term::Atom(_), Term::Int(_) | Term::Float(_) | Term::Compound(..)) => false,
            (Term::Int(_), Term::Atom(_) | Term::Float(_) | Term::Compound(..)) => false,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => f == g && xs.len() == ys.len(),
            (Term::Compound(..), Term::Atom(_) | Term::Int(_) | Term::Float(_)) => false,
            _ => true,
        }
    }

    fn fresh_offset(&mut self, clause: &Clause) -> usize {
        let offset = self.next_var;
        self.next_var += clause.var_count;
        offset
    }

    fn try_clauses(
        &mut self,
        goal: Term,
        clauses: Rc<[Arc<Clause>]>,
        start: usize,
        cont: Cont,
    ) -> Flow {
        let goal_d = self.subst.deref(&goal).clone();
        for i in start..clauses.len() {
            let clause = &clauses[i];
            if !self.may_match(&goal_d, clause) {
                continue;
            }
            // Decided before unifying, which may bind the first argument.
            let more = clauses[i + 1..].iter().any(|c| self.may_match(&goal_d, c));
            let mark = self.subst.mark();
            let offset = self.fresh_offset(clause);
            let head = clause.head.rename(offset);
            let once = &clause.head_once;
            let exempt = |id: usize| id >= offset && once.get(id - offset) == Some(&true);
            let unified = self.subst.unify_in_place_exempting(
                &goal_d,
                &head,
                self.session.occurs_check,
                &exempt,
            );
            if !unified {
                self.subst.undo_to(mark);
                continue;
            }
            if more {
                self.choices.push(ChoicePoint {
                    mark,
                    alt: Alternative::Clauses {
                        goal,
                        clauses: clauses.clone(),
                        next: i + 1,
                        cont: cont.clone(),
                    },
                });
            }
            return if clause.is_fact() {
                Flow::Continue(cont)
            } else {
                Flow::Continue(push(Frame::Goal(clause.body.rename(offset)), cont))
            };
        }
        Flow::Backtrack
    }

    fn retract(&mut self, arg: &Term, cont: Cont) -> Result<Flow, EngineError> {
        let term = self.subst.resolve(arg);
        let (head, body) = match &term {
            Term::Compound(f, a) if &**f == ":-" && a.len() == 2 => (a[0].clone(), a[1].clone()),
            other => (other.clone(), Term::atom("true")),
        };
        let key = match &head {
            Term::Var(_) => return Err(EngineError::instantiation(head)),
            t => t
                .pred_key()
                .ok_or_else(|| EngineError::type_error("callable", head.clone()))?,
        };
        if builtins::is_builtin(&key) || self.foreign.is_defined(&key) {
            return Err(EngineError::type_error("modifiable predicate", builtins::indicator(&key)));
        }
        Ok(match self.session.db.clauses(&key) {
            None => Flow::Backtrack,
            Some(clauses) => self.try_retract(head, body, clauses.into(), 0, cont),
        })
    }

    fn try_retract(
        &mut self,
        head: Term,
        body: Term,
        clauses: Rc<[Arc<Clause>]>,
        start: usize,
        cont: Cont,
    ) -> Flow {
        for i in start..clauses.len() {
            let clause = &clauses[i];
            let mark = self.subst.mark();
            let offset = self.fresh_offset(clause);
            let matched = self.unify(&head, &clause.head.rename(offset))
                && self.unify(&body, &clause.body.rename(offset));
            if !matched || !self.session.db.remove(clause) {
                self.subst.undo_to(mark);
                continue;
            }
            if i + 1 < clauses.len() {
                self.choices.push(ChoicePoint {
                    mark,
                    alt: Alternative::Retract {
                        head,
                        body,
                        clauses: clauses.clone(),
                        next: i + 1,
                        cont: cont.clone(),
                    },
                });
            }
            return Flow::Continue(cont);
        }
        Flow::Backtrack
    }

    fn compare(&self, args: &[Term], test: fn(std::cmp::Ordering) -> bool) -> Result<bool, EngineError> {
        let a = eval_arith(&args[0], &self.subst)?;
        let b = eval_arith(&args[1], &self.subst)?;
        Ok(test(a.compare(b)))
    }

    fn assert(&mut self, arg: &Term, position: Position) -> Result<bool, EngineError> {
        let clause = Clause::from_term(&self.subst.resolve(arg))?;
        self.session.assert_clause(clause, position, &*self.foreign)?;
        Ok(true)
    }

    /// Builtins that succeed at most once.
    fn deterministic(&mut self, name: &str, args: &[Term]) -> Result<bool, EngineError> {
        use std::cmp::Ordering::*;
        Ok(match name {
            "=" => self.unify(&args[0], &args[1]),
            "\\=" => {
                let mark = self.subst.mark();
                let unified = self.unify(&args[0], &args[1]);
                self.subst.undo_to(mark);
                !unified
            }
            "==" => identical(&self.subst, &args[0], &args[1]),
            "\\==" => !identical(&self.subst, &args[0], &args[1]),
            "is" => {
                let value = eval_arith(&args[1], &self.subst)?.to_term();
                self.unify(&args[0], &value)
            }
            "<" => self.compare(args, |o| o == Less)?,
            ">" => self.compare(args, |o| o == Greater)?,
            "=<" => self.compare(args, |o| o != Greater)?,
            ">=" => self.compare(args, |o| o != Less)?,
            "=:=" => self.compare(args, |o| o == Equal)?,
            "=\\=" => self.compare(args, |o| o != Equal)?,
            "var" => matches!(self.subst.deref(&args[0]), Term::Var(_)),
            "nonvar" => !matches!(self.subst.deref(&args[0]), Term::Var(_)),
            "atom" => matches!(self.subst.deref(&args[0]), Term::Atom(_)),
            "number" => matches!(self.subst.deref(&args[0]), Term::Int(_) | Term::Float(_)),
            "write" => {
                let text = format_term(&self.subst.resolve(&args[0]), false);
                self.session.output.write_output(text.as_bytes());
                true
            }
            "nl" => {
                self.session.output.write_output(b"\n");
                true
            }
            "assert" | "assertz" => self.assert(&args[0], Position::Back)?,
            "asserta" => self.assert(&args[0], Position::Front)?,
            other => unreachable!("builtin {other} has no deterministic implementation"),
        })
    }
}
