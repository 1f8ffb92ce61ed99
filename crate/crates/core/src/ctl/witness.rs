use std::collections::VecDeque;

use super::check::Adjacency;
use super::{model_check, CtlError, CtlFormula, Direction, Formula, LabelMap, Modality, NodeSet, Quantifier};
use crate::network::Network;

/// Evidence that a node satisfies a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// An edge-connected path starting at the queried node. For inverse
    /// operators (`inverse == true`) consecutive nodes are joined by edges
    /// of the transpose.
    Path { nodes: Vec<String>, inverse: bool },
    /// The node itself carries the property (atoms and `true`).
    Node(String),
    /// The top operator has no single-path witness (`EG`, `A` forms,
    /// boolean connectives).
    NoneAvailable,
}

/// Builds a witness for `key ⊨ formula`.
///
/// `EX` yields `[v, w]` with the smallest-key satisfying successor `w`;
/// `EF` and `EU` yield a shortest path to a target node whose interior
/// satisfies the left argument, ties broken by ascending key.
pub fn witness(net: &Network, labels: &LabelMap, formula: &CtlFormula, key: &str) -> Result<Witness, CtlError> {
    let v = net.index_of(key)?;
    let n = net.node_count();
    let not_satisfied = || CtlError::NotSatisfied(key.to_owned());
    match formula {
        Formula::True | Formula::False | Formula::Atom(_) => {
            if model_check(net, labels, formula)?.contains(v) {
                Ok(Witness::Node(key.to_owned()))
            } else {
                Err(not_satisfied())
            }
        }
        Formula::Modal(Quantifier::Exists, dir, Modality::Next, arg) => {
            let target = model_check(net, labels, arg)?;
            let adj = Adjacency::new(net, *dir);
            let w = adj
                .succ(v)
                .iter()
                .copied()
                .find(|&w| target.contains(w))
                .ok_or_else(not_satisfied)?;
            Ok(path_witness(net, vec![v, w], *dir))
        }
        Formula::Modal(Quantifier::Exists, dir, Modality::Eventually, arg) => {
            let target = model_check(net, labels, arg)?;
            let path =
                shortest_path(Adjacency::new(net, *dir), &NodeSet::full(n), &target, v).ok_or_else(not_satisfied)?;
            Ok(path_witness(net, path, *dir))
        }
        Formula::Until(Quantifier::Exists, dir, left, right) => {
            let through = model_check(net, labels, left)?;
            let target = model_check(net, labels, right)?;
            let path = shortest_path(Adjacency::new(net, *dir), &through, &target, v).ok_or_else(not_satisfied)?;
            Ok(path_witness(net, path, *dir))
        }
        _ => Ok(Witness::NoneAvailable),
    }
}

fn path_witness(net: &Network, path: Vec<usize>, dir: Direction) -> Witness {
    Witness::Path {
        nodes: path.into_iter().map(|i| net.key(i).to_owned()).collect(),
        inverse: dir == Direction::Inverse,
    }
}

/// Breadth-first search from `start` to the nearest `target` node, expanding
/// only nodes in `through`.
fn shortest_path(adj: Adjacency<'_>, through: &NodeSet, target: &NodeSet, start: usize) -> Option<Vec<usize>> {
    const NONE: usize = usize::MAX;
    let n = through.universe();
    let mut parent = vec![NONE; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        if target.contains(u) {
            let mut path = vec![u];
            let mut cur = u;
            while parent[cur] != NONE {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        if !through.contains(u) {
            continue;
        }
        for &w in adj.succ(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::PropId;
    use crate::network::NetworkBuilder;

    fn chain(keys: &[&str]) -> Network {
        let mut b = NetworkBuilder::new(true);
        for k in keys {
            b.node_with_content(k, "").unwrap();
        }
        for w in keys.windows(2) {
            b.edge(w[0], w[1], 1.0);
        }
        b.build().unwrap()
    }

    fn atom(s: &str) -> CtlFormula {
        Formula::atom(PropId::new(s))
    }

    fn path(nodes: &[&str], inverse: bool) -> Witness {
        Witness::Path {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            inverse,
        }
    }

    #[test]
    fn eventually_and_next() {
        let g = chain(&["a", "b"]);
        let mut l = LabelMap::for_network(&g);
        l.label_key(&g, "b", &PropId::new("p")).unwrap();
        assert_eq!(
            witness(&g, &l, &Formula::ef(atom("p")), "a").unwrap(),
            path(&["a", "b"], false)
        );
        assert_eq!(
            witness(&g, &l, &Formula::ef(atom("p")), "b").unwrap(),
            path(&["b"], false)
        );
        assert_eq!(
            witness(&g, &l, &Formula::ex(atom("p")), "a").unwrap(),
            path(&["a", "b"], false)
        );
        assert!(matches!(
            witness(&g, &l, &Formula::ex(atom("p")), "b"),
            Err(CtlError::NotSatisfied(_))
        ));
    }

    #[test]
    fn until_follows_left_argument() {
        let g = chain(&["a", "b", "c"]);
        let mut l = LabelMap::for_network(&g);
        l.label_key(&g, "c", &PropId::new("p")).unwrap();
        l.label_key(&g, "a", &PropId::new("q")).unwrap();
        l.label_key(&g, "b", &PropId::new("q")).unwrap();
        let f = Formula::eu(atom("q"), atom("p"));
        assert_eq!(witness(&g, &l, &f, "a").unwrap(), path(&["a", "b", "c"], false));
        let blocked = Formula::eu(Formula::not(atom("q")), atom("p"));
        assert!(witness(&g, &l, &blocked, "a").is_err());
    }

    #[test]
    fn inverse_paths_are_flagged() {
        let g = chain(&["a", "b", "c"]);
        let mut l = LabelMap::for_network(&g);
        l.label_key(&g, "a", &PropId::new("p")).unwrap();
        assert_eq!(
            witness(&g, &l, &Formula::ief(atom("p")), "c").unwrap(),
            path(&["c", "b", "a"], true)
        );
    }

    #[test]
    fn shortest_with_key_tie_break() {
        let mut b = NetworkBuilder::new(true);
        for k in ["s", "x", "y", "t"] {
            b.node_with_content(k, "").unwrap();
        }
        b.edge("s", "y", 1.0)
            .edge("s", "x", 1.0)
            .edge("x", "t", 1.0)
            .edge("y", "t", 1.0);
        let g = b.build().unwrap();
        let mut l = LabelMap::for_network(&g);
        l.label_key(&g, "t", &PropId::new("p")).unwrap();
        assert_eq!(
            witness(&g, &l, &Formula::ef(atom("p")), "s").unwrap(),
            path(&["s", "x", "t"], false)
        );
    }

    #[test]
    fn unwitnessable_operators() {
        let g = chain(&["a"]);
        let mut l = LabelMap::for_network(&g);
        l.label_key(&g, "a", &PropId::new("p")).unwrap();
        for f in [
            Formula::eg(atom("p")),
            Formula::ag(atom("p")),
            Formula::ax(atom("p")),
            Formula::and(atom("p"), Formula::True),
        ] {
            assert_eq!(witness(&g, &l, &f, "a").unwrap(), Witness::NoneAvailable);
        }
        assert_eq!(witness(&g, &l, &atom("p"), "a").unwrap(), Witness::Node("a".into()));
        assert!(matches!(witness(&g, &l, &atom("p"), "zz"), Err(CtlError::Network(_))));
    }
}
