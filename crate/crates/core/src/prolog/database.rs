//! Layered clause store: a shared immutable base under a per-request layer.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::builtins;
use super::error::EngineError;
use super::program::Clause;
use super::term::PredKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Front,
    Back,
}

/// Clauses keyed by predicate. A key present with no clauses marks a
/// declared (dynamic) predicate: calling it fails instead of raising an
/// existence error.
#[derive(Clone, Debug, Default)]
pub struct ClauseStore {
    preds: HashMap<PredKey, Vec<Arc<Clause>>>,
}

impl ClauseStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &PredKey) -> Option<&[Arc<Clause>]> {
        self.preds.get(key).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = &PredKey> {
        self.preds.keys()
    }

    pub fn clause_count(&self) -> usize {
        self.preds.values().map(Vec::len).sum()
    }

    fn insert(&mut self, clause: Arc<Clause>, position: Position) {
        let list = self.preds.entry(clause.key()).or_default();
        match position {
            Position::Front => list.insert(0, clause),
            Position::Back => list.push(clause),
        }
    }
}

/// The clause database seen by one session.
#[derive(Clone, Debug, Default)]
pub struct Database {
    base: Arc<ClauseStore>,
    request: ClauseStore,
    /// Base clauses retracted during this session, by address.
    hidden: HashSet<usize>,
}

fn addr(clause: &Arc<Clause>) -> usize {
    Arc::as_ptr(clause) as usize
}

impl Database {
    /// An empty database.
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh request layer over a shared base.
    pub fn with_base(base: Arc<ClauseStore>) -> Self {
        Database {
            base,
            request: ClauseStore::new(),
            hidden: HashSet::new(),
        }
    }

    pub fn base(&self) -> &Arc<ClauseStore> {
        &self.base
    }

    pub fn request_layer(&self) -> &ClauseStore {
        &self.request
    }

    pub fn is_defined(&self, key: &PredKey) -> bool {
        self.request.preds.contains_key(key) || self.base.preds.contains_key(key)
    }

    /// Marks a predicate as known so that calling it with no clauses fails.
    pub fn declare_dynamic(&mut self, key: PredKey) {
        self.request.preds.entry(key).or_default();
    }

    /// Clauses for `key` in resolution order: the request layer first, then
    /// the base, each in assertion order. `None` if the predicate is
    /// unknown.
    pub fn clauses(&self, key: &PredKey) -> Option<Vec<Arc<Clause>>> {
        let request = self.request.get(key);
        let base = self.base.get(key);
        if request.is_none() && base.is_none() {
            return None;
        }
        let mut out: Vec<Arc<Clause>> = request.unwrap_or_default().to_vec();
        out.extend(
            base.unwrap_or_default()
                .iter()
                .filter(|c| !self.hidden.contains(&addr(c)))
                .cloned(),
        );
        Some(out)
    }

    /// Adds a clause to the request layer.
    pub fn assert_clause(&mut self, clause: Clause, position: Position) -> Result<(), EngineError> {
        let key = clause.key();
        if builtins::is_builtin(&key) {
            return Err(EngineError::type_error(
                "modifiable predicate",
                builtins::indicator(&key),
            ));
        }
        self.request.insert(Arc::new(clause), position);
        Ok(())
    }

    /// Removes a specific clause previously returned by [`Database::clauses`].
    pub fn remove(&mut self, clause: &Arc<Clause>) -> bool {
        let key = clause.key();
        if let Some(list) = self.request.preds.get_mut(&key) {
            if let Some(i) = list.iter().position(|c| Arc::ptr_eq(c, clause)) {
                list.remove(i);
                return true;
            }
        }
        let in_base = self
            .base
            .get(&key)
            .is_some_and(|l| l.iter().any(|c| Arc::ptr_eq(c, clause)));
        if in_base {
            self.hidden.insert(addr(clause));
            // Keep the predicate known after its last clause goes.
            self.request.preds.entry(key).or_default();
        }
        in_base
    }

    /// Flattens both layers into a new store, in resolution order.
    pub fn freeze(self) -> ClauseStore {
        let keys: HashSet<PredKey> = self
            .request
            .preds
            .keys()
            .chain(self.base.preds.keys())
            .cloned()
            .collect();
        let mut store = ClauseStore::new();
        for key in keys {
            let clauses = self.clauses(&key).unwrap_or_default();
            store.preds.insert(key, clauses);
        }
        store
    }
}
