//! Exhaustive reference checker for small networks.
//!
//! Shares no code with the linear-time checker: it builds its own adjacency
//! matrix from the raw edge list, uses a transitive-closure matrix for
//! reachability, iterates the defining fixpoint equations for the until and
//! eventually forms, and decides `EG` by depth-first search for a sink or a
//! back edge inside the `φ` nodes.

use super::{CtlError, CtlFormula, Direction, Formula, LabelMap, Modality, NodeSet, Quantifier, SatSet};
use crate::network::Network;

pub const ORACLE_MAX_NODES: usize = 12;

type Matrix = Vec<Vec<bool>>;

struct Oracle<'a> {
    labels: &'a LabelMap,
    n: usize,
    forward: Matrix,
    inverse: Matrix,
    forward_reach: Matrix,
    inverse_reach: Matrix,
}

/// Reference satisfaction set; same contract as [`super::model_check`] for
/// networks with at most [`ORACLE_MAX_NODES`] nodes.
pub fn oracle_check(net: &Network, labels: &LabelMap, formula: &CtlFormula) -> Result<SatSet, CtlError> {
    let n = net.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(CtlError::SizeExceeded {
            n,
            max: ORACLE_MAX_NODES,
        });
    }
    let mut forward = vec![vec![false; n]; n];
    for e in net.edges() {
        forward[e.from][e.to] = true;
        if !net.is_directed() {
            forward[e.to][e.from] = true;
        }
    }
    let inverse: Matrix = (0..n).map(|i| (0..n).map(|j| forward[j][i]).collect()).collect();
    let oracle = Oracle {
        labels,
        n,
        forward_reach: reflexive_closure(&forward),
        inverse_reach: reflexive_closure(&inverse),
        forward,
        inverse,
    };
    Ok(NodeSet::from_bools(oracle.eval(formula)?))
}

fn reflexive_closure(adj: &Matrix) -> Matrix {
    let n = adj.len();
    let mut r = adj.clone();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        let via = r[k].clone();
        for row in r.iter_mut().filter(|row| row[k]) {
            for (cell, &step) in row.iter_mut().zip(&via) {
                *cell |= step;
            }
        }
    }
    r
}

impl Oracle<'_> {
    fn adj(&self, d: Direction) -> &Matrix {
        match d {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        }
    }

    fn reach(&self, d: Direction) -> &Matrix {
        match d {
            Direction::Forward => &self.forward_reach,
            Direction::Inverse => &self.inverse_reach,
        }
    }

    fn eval(&self, f: &CtlFormula) -> Result<Vec<bool>, CtlError> {
        let n = self.n;
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => {
                if !self.labels.is_registered(p) {
                    return Err(CtlError::UnboundAtom(p.clone()));
                }
                (0..n).map(|v| self.labels.holds(v, p)).collect()
            }
            Formula::Not(x) => self.eval(x)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                (0..n).map(|v| a[v] && b[v]).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                (0..n).map(|v| a[v] || b[v]).collect()
            }
            Formula::Modal(q, d, m, x) => {
                let x = self.eval(x)?;
                let adj = self.adj(*d);
                let reach = self.reach(*d);
                match (q, m) {
                    (Quantifier::Exists, Modality::Next) => (0..n).map(|u| (0..n).any(|v| adj[u][v] && x[v])).collect(),
                    (Quantifier::All, Modality::Next) => (0..n).map(|u| (0..n).all(|v| !adj[u][v] || x[v])).collect(),
                    (Quantifier::Exists, Modality::Eventually) => {
                        (0..n).map(|u| (0..n).any(|v| reach[u][v] && x[v])).collect()
                    }
                    (Quantifier::All, Modality::Globally) => {
                        (0..n).map(|u| (0..n).all(|v| !reach[u][v] || x[v])).collect()
                    }
                    (Quantifier::All, Modality::Eventually) => self.all_until(adj, &vec![true; n], &x),
                    (Quantifier::Exists, Modality::Globally) => {
                        (0..n).map(|u| self.has_maximal_path(adj, &x, u)).collect()
                    }
                }
            }
            Formula::Until(q, d, a, b) => {
                let (phi, psi) = (self.eval(a)?, self.eval(b)?);
                let adj = self.adj(*d);
                match q {
                    Quantifier::Exists => self.exists_until(adj, &phi, &psi),
                    Quantifier::All => self.all_until(adj, &phi, &psi),
                }
            }
        })
    }

    /// Iterates Z := ψ ∪ (φ ∩ pre∃(Z)) from the empty set.
    fn exists_until(&self, adj: &Matrix, phi: &[bool], psi: &[bool]) -> Vec<bool> {
        let n = self.n;
        let mut z = vec![false; n];
        loop {
            let next: Vec<bool> = (0..n)
                .map(|u| psi[u] || (phi[u] && (0..n).any(|v| adj[u][v] && z[v])))
                .collect();
            if next == z {
                return z;
            }
            z = next;
        }
    }

    /// Iterates Z := ψ ∪ (φ ∩ nonsink ∩ pre∀(Z)) from the empty set.
    fn all_until(&self, adj: &Matrix, phi: &[bool], psi: &[bool]) -> Vec<bool> {
        let n = self.n;
        let mut z = vec![false; n];
        loop {
            let next: Vec<bool> = (0..n)
                .map(|u| {
                    let has_succ = adj[u].iter().any(|&e| e);
                    psi[u] || (phi[u] && has_succ && (0..n).all(|v| !adj[u][v] || z[v]))
                })
                .collect();
            if next == z {
                return z;
            }
            z = next;
        }
    }

    /// Is there a maximal path from `start` whose nodes all satisfy `phi`?
    /// Depth-first search over `phi` nodes; succeeds on reaching a sink or
    /// on finding a back edge (a cycle among reachable `phi` nodes).
    fn has_maximal_path(&self, adj: &Matrix, phi: &[bool], start: usize) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        fn dfs(adj: &Matrix, phi: &[bool], u: usize, marks: &mut [Mark]) -> bool {
            marks[u] = Mark::Grey;
            let n = adj.len();
            if !(0..n).any(|v| adj[u][v]) {
                return true;
            }
            for v in 0..n {
                if !adj[u][v] || !phi[v] {
                    continue;
                }
                match marks[v] {
                    Mark::Grey => return true,
                    Mark::White => {
                        if dfs(adj, phi, v, marks) {
                            return true;
                        }
                    }
                    Mark::Black => {}
                }
            }
            marks[u] = Mark::Black;
            false
        }
        if !phi[start] {
            return false;
        }
        let mut marks = vec![Mark::White; self.n];
        dfs(adj, phi, start, &mut marks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::PropId;
    use crate::network::NetworkBuilder;

    #[test]
    fn refuses_large_networks() {
        let mut b = NetworkBuilder::new(true);
        for i in 0..13 {
            b.node_with_content(&format!("k{i:02}"), "").unwrap();
        }
        let g = b.build().unwrap();
        let l = LabelMap::for_network(&g);
        assert!(matches!(
            oracle_check(&g, &l, &Formula::True),
            Err(CtlError::SizeExceeded { n: 13, .. })
        ));
    }

    #[test]
    fn trivial_examples() {
        let mut b = NetworkBuilder::new(true);
        b.node_with_content("a", "").unwrap();
        b.node_with_content("b", "").unwrap();
        b.edge("a", "b", 1.0);
        let g = b.build().unwrap();
        let mut l = LabelMap::for_network(&g);
        let p = PropId::new("p");
        l.label_key(&g, "b", &p).unwrap();
        let p = Formula::atom(p);
        let keys = |f: &CtlFormula| oracle_check(&g, &l, f).unwrap().keys(&g).join(",");
        assert_eq!(keys(&Formula::ef(p.clone())), "a,b");
        assert_eq!(keys(&Formula::eg(p.clone())), "b");
        assert_eq!(keys(&Formula::ex(p.clone())), "a");
        assert_eq!(keys(&Formula::ax(p.clone())), "a,b");
        assert_eq!(keys(&Formula::iex(Formula::not(p.clone()))), "b");
        assert_eq!(keys(&Formula::af(p)), "a,b");
    }
}
