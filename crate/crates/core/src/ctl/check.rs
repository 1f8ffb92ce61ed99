//! Linear-time labelling algorithm.
//!
//! Subformulas are evaluated bottom-up and memoized by structural equality.
//! Each temporal operator costs O(n + m):
//!
//! * `EX`: one sweep over the predecessors of the argument's nodes;
//! * `EU`: backward breadth-first search from the `ψ` nodes through `φ` nodes;
//! * `EG`: strongly connected components of the `φ`-restricted graph, then
//!   backward reachability from nodes lying on a `φ`-cycle or at a sink;
//! * `A` forms via the usual dualities.
//!
//! Inverse operators run the same code with successor and predecessor lists
//! swapped.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::{CtlError, CtlFormula, Direction, Formula, LabelMap, Modality, NodeSet, Quantifier, SatSet};
use crate::network::Network;

/// Nodes of `net` satisfying `formula` under `labels`.
pub fn model_check(net: &Network, labels: &LabelMap, formula: &CtlFormula) -> Result<SatSet, CtlError> {
    assert_eq!(
        labels.node_count(),
        net.node_count(),
        "label map built for a different network"
    );
    let mut checker = Checker {
        net,
        labels,
        memo: HashMap::new(),
    };
    let result = checker.sat(formula)?;
    drop(checker);
    Ok(Rc::try_unwrap(result).unwrap_or_else(|rc| (*rc).clone()))
}

#[derive(Clone, Copy)]
pub(crate) struct Adjacency<'a> {
    net: &'a Network,
    dir: Direction,
}

impl<'a> Adjacency<'a> {
    pub(crate) fn new(net: &'a Network, dir: Direction) -> Self {
        Adjacency { net, dir }
    }

    pub(crate) fn succ(&self, v: usize) -> &'a [usize] {
        match self.dir {
            Direction::Forward => self.net.successor_indices(v),
            Direction::Inverse => self.net.predecessor_indices(v),
        }
    }

    pub(crate) fn pred(&self, v: usize) -> &'a [usize] {
        match self.dir {
            Direction::Forward => self.net.predecessor_indices(v),
            Direction::Inverse => self.net.successor_indices(v),
        }
    }

    fn n(&self) -> usize {
        self.net.node_count()
    }
}

struct Checker<'a> {
    net: &'a Network,
    labels: &'a LabelMap,
    memo: HashMap<&'a CtlFormula, Rc<NodeSet>>,
}

impl<'a> Checker<'a> {
    fn sat(&mut self, f: &'a CtlFormula) -> Result<Rc<NodeSet>, CtlError> {
        if let Some(hit) = self.memo.get(f) {
            return Ok(Rc::clone(hit));
        }
        let n = self.net.node_count();
        let set = match f {
            Formula::True => NodeSet::full(n),
            Formula::False => NodeSet::empty(n),
            Formula::Atom(p) => self
                .labels
                .extension(p)
                .cloned()
                .ok_or_else(|| CtlError::UnboundAtom(p.clone()))?,
            Formula::Not(x) => self.sat(x)?.complement(),
            Formula::And(a, b) => {
                let a = self.sat(a)?;
                a.intersection(&*self.sat(b)?)
            }
            Formula::Or(a, b) => {
                let a = self.sat(a)?;
                a.union(&*self.sat(b)?)
            }
            Formula::Modal(q, d, m, x) => {
                let adj = Adjacency::new(self.net, *d);
                let x = self.sat(x)?;
                match (q, m) {
                    (Quantifier::Exists, Modality::Next) => exists_next(adj, &x),
                    (Quantifier::All, Modality::Next) => exists_next(adj, &x.complement()).complement(),
                    (Quantifier::Exists, Modality::Eventually) => exists_until(adj, &NodeSet::full(n), &x),
                    (Quantifier::All, Modality::Eventually) => exists_globally(adj, &x.complement()).complement(),
                    (Quantifier::Exists, Modality::Globally) => exists_globally(adj, &x),
                    (Quantifier::All, Modality::Globally) => {
                        exists_until(adj, &NodeSet::full(n), &x.complement()).complement()
                    }
                }
            }
            Formula::Until(q, d, a, b) => {
                let adj = Adjacency::new(self.net, *d);
                let phi = self.sat(a)?;
                let psi = self.sat(b)?;
                match q {
                    Quantifier::Exists => exists_until(adj, &phi, &psi),
                    Quantifier::All => {
                        // AU(φ,ψ) = ¬EU(¬ψ, ¬φ∧¬ψ) ∧ ¬EG¬ψ
                        let not_psi = psi.complement();
                        let stuck = phi.complement().intersection(&not_psi);
                        exists_until(adj, &not_psi, &stuck)
                            .union(&exists_globally(adj, &not_psi))
                            .complement()
                    }
                }
            }
        };
        let set = Rc::new(set);
        self.memo.insert(f, Rc::clone(&set));
        Ok(set)
    }
}

pub(crate) fn exists_next(adj: Adjacency<'_>, target: &NodeSet) -> NodeSet {
    let mut out = NodeSet::empty(adj.n());
    for w in target.indices() {
        for &p in adj.pred(w) {
            out.insert(p);
        }
    }
    out
}

/// Least fixpoint Z = ψ ∪ (φ ∩ pre∃(Z)) by backward search.
pub(crate) fn exists_until(adj: Adjacency<'_>, phi: &NodeSet, psi: &NodeSet) -> NodeSet {
    let mut out = psi.clone();
    let mut queue: VecDeque<usize> = psi.indices().collect();
    while let Some(w) = queue.pop_front() {
        for &p in adj.pred(w) {
            if phi.contains(p) && out.insert(p) {
                queue.push_back(p);
            }
        }
    }
    out
}

/// Nodes with a maximal path staying inside `phi`: backward reachability,
/// within `phi`, from `phi` nodes that are sinks or lie on a `phi`-cycle.
pub(crate) fn exists_globally(adj: Adjacency<'_>, phi: &NodeSet) -> NodeSet {
    let n = adj.n();
    let on_cycle = cyclic_nodes(adj, phi);
    let mut out = NodeSet::empty(n);
    let mut queue = VecDeque::new();
    for v in phi.indices() {
        if adj.succ(v).is_empty() || on_cycle[v] {
            out.insert(v);
            queue.push_back(v);
        }
    }
    while let Some(w) = queue.pop_front() {
        for &p in adj.pred(w) {
            if phi.contains(p) && out.insert(p) {
                queue.push_back(p);
            }
        }
    }
    out
}

/// Marks nodes of the subgraph induced by `within` that belong to a
/// nontrivial strongly connected component or carry a self-loop.
/// Iterative Tarjan, so long chains do not exhaust the call stack.
fn cyclic_nodes(adj: Adjacency<'_>, within: &NodeSet) -> Vec<bool> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut calls: Vec<(usize, usize)> = Vec::new();
    let mut cyclic = vec![false; n];
    let mut counter = 0usize;

    for root in within.indices() {
        if index[root] != UNVISITED {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        calls.push((root, 0));

        while let Some(frame) = calls.last_mut() {
            let v = frame.0;
            let succs = adj.succ(v);
            if frame.1 < succs.len() {
                let w = succs[frame.1];
                frame.1 += 1;
                if !within.contains(w) {
                    continue;
                }
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let start = stack.iter().rposition(|&x| x == v).expect("root on stack");
                let component = stack.split_off(start);
                let nontrivial = component.len() > 1 || adj.succ(v).contains(&v);
                for &x in &component {
                    on_stack[x] = false;
                    cyclic[x] = nontrivial;
                }
            }
        }
    }
    cyclic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::PropId;
    use crate::network::NetworkBuilder;

    fn p() -> CtlFormula {
        Formula::atom(PropId::new("p"))
    }

    fn graph(directed: bool, nodes: &[&str], edges: &[(&str, &str)]) -> Network {
        let mut b = NetworkBuilder::new(directed);
        for k in nodes {
            b.node_with_content(k, "").unwrap();
        }
        for (x, y) in edges {
            b.edge(*x, *y, 1.0);
        }
        b.build().unwrap()
    }

    fn labels(net: &Network, prop: &str, at: &[&str]) -> LabelMap {
        let mut l = LabelMap::for_network(net);
        l.register(PropId::new(prop));
        for k in at {
            l.label_key(net, k, &PropId::new(prop)).unwrap();
        }
        l
    }

    fn keys(net: &Network, f: &CtlFormula, l: &LabelMap) -> Vec<String> {
        model_check(net, l, f)
            .unwrap()
            .keys(net)
            .into_iter()
            .map(str::to_owned)
            .collect()
    }

    #[test]
    fn sink_semantics() {
        let g = graph(true, &["v"], &[]);
        let l = labels(&g, "p", &["v"]);
        assert!(keys(&g, &Formula::ex(p()), &l).is_empty());
        assert_eq!(keys(&g, &Formula::ax(p()), &l), ["v"]);
        assert_eq!(keys(&g, &Formula::eg(p()), &l), ["v"]);
        assert_eq!(keys(&g, &Formula::af(p()), &l), ["v"]);
    }

    #[test]
    fn reachability_and_globally_on_a_chain() {
        let g = graph(true, &["a", "b"], &[("a", "b")]);
        let l = labels(&g, "p", &["b"]);
        assert_eq!(keys(&g, &Formula::ef(p()), &l), ["a", "b"]);
        assert_eq!(keys(&g, &Formula::eg(p()), &l), ["b"]);
        assert_eq!(keys(&g, &Formula::iex(p()), &l), Vec::<String>::new());
        assert_eq!(keys(&g, &Formula::ex(p()), &l), ["a"]);
    }

    #[test]
    fn globally_on_a_cycle() {
        let g = graph(true, &["a", "b"], &[("a", "b"), ("b", "a")]);
        let l = labels(&g, "p", &["a", "b"]);
        assert_eq!(keys(&g, &Formula::eg(p()), &l), ["a", "b"]);
        assert_eq!(keys(&g, &Formula::ag(p()), &l), ["a", "b"]);
    }

    #[test]
    fn self_loop_counts_as_cycle() {
        let g = graph(true, &["a", "b", "c"], &[("a", "a"), ("a", "b"), ("b", "c")]);
        let l = labels(&g, "p", &["a"]);
        assert_eq!(keys(&g, &Formula::eg(p()), &l), ["a"]);
        // a can loop forever, so AF ¬p fails there.
        assert_eq!(keys(&g, &Formula::af(Formula::not(p())), &l), ["b", "c"]);
    }

    #[test]
    fn unbound_atom() {
        let g = graph(true, &["a"], &[]);
        let l = LabelMap::for_network(&g);
        assert!(matches!(model_check(&g, &l, &p()), Err(CtlError::UnboundAtom(_))));
    }

    #[test]
    fn long_chain_does_not_overflow() {
        let n = 50_000;
        let names: Vec<String> = (0..n).map(|i| format!("n{i:06}")).collect();
        let mut b = NetworkBuilder::new(true);
        for k in &names {
            b.node_with_content(k, "").unwrap();
        }
        for w in names.windows(2) {
            b.edge(w[0].clone(), w[1].clone(), 1.0);
        }
        b.edge(names[n - 1].clone(), names[0].clone(), 1.0);
        let g = b.build().unwrap();
        let all: Vec<&str> = names.iter().map(String::as_str).collect();
        let l = labels(&g, "p", &all);
        assert_eq!(model_check(&g, &l, &Formula::eg(p())).unwrap().len(), n);
    }
}
