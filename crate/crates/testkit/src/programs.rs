use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use proptest::prelude::*;

pub const CONSTANTS: &[&str] = &["a", "b", "c"];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Literal {
    pub positive: bool,
    pub atom: GroundAtom,
}

#[derive(Clone, Debug)]
pub struct GroundClause {
    pub head: GroundAtom,
    pub body: Vec<Literal>,
}

/// A variable-free program whose predicate `pN` only calls predicates with a
/// larger index. The dependency graph is acyclic, so depth-first resolution
/// terminates and negation is stratified.
#[derive(Clone, Debug)]
pub struct GroundProgram {
    pub arities: Vec<usize>,
    pub clauses: Vec<GroundClause>,
}

fn pred_name(p: usize) -> String {
    format!("p{p}")
}

impl GroundAtom {
    pub fn to_source(&self) -> String {
        if self.args.is_empty() {
            pred_name(self.pred)
        } else {
            let args: Vec<&str> = self.args.iter().map(|&c| CONSTANTS[c]).collect();
            format!("{}({})", pred_name(self.pred), args.join(","))
        }
    }
}

impl GroundProgram {
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for clause in &self.clauses {
            out.push_str(&clause.head.to_source());
            if !clause.body.is_empty() {
                let body: Vec<String> = clause
                    .body
                    .iter()
                    .map(|l| {
                        if l.positive {
                            l.atom.to_source()
                        } else {
                            format!("\\+ {}", l.atom.to_source())
                        }
                    })
                    .collect();
                out.push_str(" :- ");
                out.push_str(&body.join(", "));
            }
            out.push_str(".\n");
        }
        out
    }

    /// `(name, arity)` of every predicate, whether or not it has clauses.
    pub fn signature(&self) -> Vec<(String, usize)> {
        self.arities
            .iter()
            .enumerate()
            .map(|(p, &n)| (pred_name(p), n))
            .collect()
    }

    /// Every ground atom over the program's predicates and constants.
    pub fn herbrand_base(&self) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for (pred, &arity) in self.arities.iter().enumerate() {
            let mut args = vec![0; arity];
            loop {
                out.push(GroundAtom { pred, args: args.clone() });
                let Some(i) = (0..arity).rev().find(|&i| args[i] + 1 < CONSTANTS.len()) else {
                    break;
                };
                args[i] += 1;
                args[i + 1..].fill(0);
            }
        }
        out
    }

    /// The least model, computed bottom-up one predicate at a time from the
    /// highest index down.
    pub fn model(&self) -> BTreeSet<GroundAtom> {
        let mut model = BTreeSet::new();
        for pred in (0..self.arities.len()).rev() {
            for clause in self.clauses.iter().filter(|c| c.head.pred == pred) {
                let holds = clause
                    .body
                    .iter()
                    .all(|l| model.contains(&l.atom) == l.positive);
                if holds {
                    model.insert(clause.head.clone());
                }
            }
        }
        model
    }
}

/// Upper bound on the node count of the depth-first search tree any query
/// in a generated program may explore.
pub const SEARCH_NODE_LIMIT: f64 = 50_000.0;

impl GroundProgram {
    /// Nodes in the complete depth-first search tree for `atom`: every call,
    /// every clause tried, and every re-entry into a conjunction's tail on
    /// backtracking. Negated calls are charged their full tree. Bounds the
    /// work of a first-solution search from above.
    pub fn search_nodes(&self, atom: &GroundAtom) -> f64 {
        let model = self.model();
        self.search(atom, &model, &mut HashMap::new()).0
    }

    /// The largest [`search_nodes`](Self::search_nodes) over the Herbrand base.
    pub fn max_search_nodes(&self) -> f64 {
        let model = self.model();
        let mut memo = HashMap::new();
        self.herbrand_base()
            .iter()
            .map(|a| self.search(a, &model, &mut memo).0)
            .fold(0.0, f64::max)
    }

    /// `(tree nodes, number of proofs)` for a call to `atom`.
    fn search(
        &self,
        atom: &GroundAtom,
        model: &BTreeSet<GroundAtom>,
        memo: &mut HashMap<GroundAtom, (f64, f64)>,
    ) -> (f64, f64) {
        if let Some(&known) = memo.get(atom) {
            return known;
        }
        let (mut nodes, mut proofs) = (1.0, 0.0);
        for clause in self.clauses.iter().filter(|c| &c.head == atom) {
            // Walk the body right to left: cost(L, rest) = cost(L) + proofs(L) * cost(rest).
            let (mut rest_nodes, mut rest_proofs) = (0.0, 1.0);
            for lit in clause.body.iter().rev() {
                let (lit_nodes, lit_proofs) = if lit.positive {
                    self.search(&lit.atom, model, memo)
                } else {
                    let inner = self.search(&lit.atom, model, memo).0;
                    (inner + 1.0, if model.contains(&lit.atom) { 0.0 } else { 1.0 })
                };
                rest_nodes = lit_nodes + lit_proofs * rest_nodes;
                rest_proofs *= lit_proofs;
            }
            nodes += 1.0 + rest_nodes;
            proofs += rest_proofs;
        }
        memo.insert(atom.clone(), (nodes, proofs));
        (nodes, proofs)
    }
}

fn atom_of(pred: usize, arity: usize) -> impl Strategy<Value = GroundAtom> {
    prop::collection::vec(0..CONSTANTS.len(), arity).prop_map(move |args| GroundAtom { pred, args })
}

/// Random programs of up to six predicates and 30 clauses. Programs whose
/// search tree exceeds [`SEARCH_NODE_LIMIT`] are rejected: acyclic programs
/// always terminate, but duplicated proofs multiply through conjunctions
/// and a failing query can have to enumerate every combination.
pub fn ground_program() -> impl Strategy<Value = GroundProgram> {
    prop::collection::vec(0usize..=2, 1..=6).prop_flat_map(|arities| {
        let n = arities.len();
        let ar = arities.clone();
        let clause = (0..n).prop_flat_map(move |head| {
            let ar2 = ar.clone();
            let literal = (head + 1..n.max(head + 2)).prop_flat_map(move |p| {
                let arity = ar2.get(p).copied().unwrap_or(0);
                (prop::bool::weighted(0.8), atom_of(p, arity))
                    .prop_map(|(positive, atom)| Literal { positive, atom })
            });
            let max_body = if head + 1 < n { 3 } else { 0 };
            (atom_of(head, ar[head]), prop::collection::vec(literal, 0..=max_body))
                .prop_map(|(head, body)| GroundClause { head, body })
        });
        prop::collection::vec(clause, 0..=30).prop_map(move |clauses| GroundProgram {
            arities: arities.clone(),
            clauses,
        })
    })
    .prop_filter("search tree too large to exhaust", |p| {
        p.max_search_nodes() <= SEARCH_NODE_LIMIT
    })
}

pub const GRAPH_NODES: usize = 8;

/// Edges `(i, j)` with `i < j` over nodes `0..GRAPH_NODES`.
pub fn dag() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..GRAPH_NODES - 1, 1..GRAPH_NODES), 0..16).prop_map(|pairs| {
        let mut edges: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(i, j)| (i.min(j), i.max(j)))
            .filter(|(i, j)| i != j)
            .collect();
        edges.dedup();
        edges
    })
}

/// Nodes reachable from `from` by one or more edges.
pub fn reachable(edges: &[(usize, usize)], from: usize) -> HashSet<usize> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        for &(_, to) in edges.iter().filter(|(f, _)| *f == n) {
            if seen.insert(to) {
                queue.push_back(to);
            }
        }
    }
    seen
}

pub fn node(n: usize) -> String {
    format!("n{n}")
}

pub fn path_program(edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for (i, j) in edges {
        out.push_str(&format!("edge({}, {}).\n", node(*i), node(*j)));
    }
    out.push_str("path(X, Y) :- edge(X, Y).\npath(X, Y) :- edge(X, Z), path(Z, Y).\n");
    out
}
