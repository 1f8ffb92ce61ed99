#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;
use xplcheck::ctl::{CtlFormula, Direction, Formula, LabelMap, Modality, NodeSet, PropId, Quantifier};
use xplcheck::network::{Network, NetworkBuilder};
use xplcheck::xpath::{eval_filter, parse_filter, FilterExpr};
use xplcheck::xpl::XplFormula;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> Network {
    let bytes = std::fs::read(fixture(&format!("{name}.xml"))).unwrap();
    Network::parse(&bytes).unwrap()
}

pub fn key(i: usize) -> String {
    format!("n{i}")
}

/// Random graph with `n` nodes and independent edge probability `p`;
/// self-loops allowed.
pub fn random_graph(rng: &mut StdRng, n: usize, p: f64, directed: bool) -> Network {
    random_graph_with(rng, n, p, directed, |_, _| String::new())
}

pub fn random_graph_with(
    rng: &mut StdRng,
    n: usize,
    p: f64,
    directed: bool,
    mut payload: impl FnMut(&mut StdRng, usize) -> String,
) -> Network {
    let mut b = NetworkBuilder::new(directed);
    for i in 0..n {
        let content = payload(rng, i);
        b.node_with_content(&key(i), &content).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if !directed && j < i {
                continue;
            }
            if rng.gen_bool(p) {
                b.edge(key(i), key(j), 1.0);
            }
        }
    }
    b.build().unwrap()
}

pub const PROPS: [&str; 3] = ["p", "q", "r"];

pub fn random_labels(rng: &mut StdRng, n: usize) -> LabelMap {
    let mut labels = LabelMap::new(n);
    for p in PROPS {
        let bits = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        labels.set_extension(PropId::new(p), NodeSet::from_bools(bits));
    }
    labels
}

pub fn random_quantifier(rng: &mut StdRng) -> Quantifier {
    if rng.gen_bool(0.5) {
        Quantifier::Exists
    } else {
        Quantifier::All
    }
}

pub fn random_direction(rng: &mut StdRng) -> Direction {
    if rng.gen_bool(0.5) {
        Direction::Forward
    } else {
        Direction::Inverse
    }
}

/// Formula of depth at most `depth` over the whole operator alphabet,
/// with atoms drawn by `atom`.
pub fn random_formula<A: Clone>(rng: &mut StdRng, depth: usize, atom: &mut impl FnMut(&mut StdRng) -> A) -> Formula<A> {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(atom(rng)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula(rng, d, atom)),
        1 => Formula::and(random_formula(rng, d, atom), random_formula(rng, d, atom)),
        2 => Formula::or(random_formula(rng, d, atom), random_formula(rng, d, atom)),
        3 | 4 => {
            let m = match rng.gen_range(0..3) {
                0 => Modality::Next,
                1 => Modality::Eventually,
                _ => Modality::Globally,
            };
            Formula::Modal(
                random_quantifier(rng),
                random_direction(rng),
                m,
                Box::new(random_formula(rng, d, atom)),
            )
        }
        _ => Formula::Until(
            random_quantifier(rng),
            random_direction(rng),
            Box::new(random_formula(rng, d, atom)),
            Box::new(random_formula(rng, d, atom)),
        ),
    }
}

pub fn random_ctl(rng: &mut StdRng, depth: usize) -> CtlFormula {
    random_formula(rng, depth, &mut |r: &mut StdRng| {
        PropId::new(PROPS[r.gen_range(0..PROPS.len())])
    })
}

/// Small record payload: a numeric `v`, zero to two `tag` children and an
/// optional `flag` attribute.
pub fn random_payload(rng: &mut StdRng, _i: usize) -> String {
    let mut s = format!("<v>{}</v>", rng.gen_range(0..5));
    for _ in 0..rng.gen_range(0..3) {
        s.push_str(&format!("<tag>{}</tag>", ["a", "b", "ab"][rng.gen_range(0..3)]));
    }
    if rng.gen_bool(0.5) {
        s.push_str(&format!("<meta flag=\"{}\"/>", rng.gen_range(0..2)));
    }
    s
}

pub const FILTER_POOL: [&str; 10] = [
    "v = 1",
    "v > 2",
    "v <= 1 or tag = \"a\"",
    "count(tag) = 2",
    "contains(tag, \"b\")",
    "not(tag)",
    "meta/@flag = \"1\"",
    "tag = \"ab\" and v != 0",
    "count(tag) > 0 and not(meta)",
    "(v >= 3)",
];

pub fn random_filter(rng: &mut StdRng) -> FilterExpr {
    parse_filter(FILTER_POOL[rng.gen_range(0..FILTER_POOL.len())]).unwrap()
}

pub fn random_xpl(rng: &mut StdRng, depth: usize) -> XplFormula {
    random_formula(rng, depth, &mut random_filter)
}

/// Direct recursive semantics: filters are evaluated inline at each node
/// whenever an atom is reached, and temporal operators are computed as
/// naive fixpoints over adjacency lists built from the raw edge records.
pub struct InlineEvaluator<'a> {
    net: &'a Network,
    fwd: Vec<Vec<usize>>,
    inv: Vec<Vec<usize>>,
}

impl<'a> InlineEvaluator<'a> {
    pub fn new(net: &'a Network) -> Self {
        let n = net.node_count();
        let mut fwd = vec![Vec::new(); n];
        let mut inv = vec![Vec::new(); n];
        for e in net.edges() {
            fwd[e.from].push(e.to);
            inv[e.to].push(e.from);
            if !net.is_directed() {
                fwd[e.to].push(e.from);
                inv[e.from].push(e.to);
            }
        }
        InlineEvaluator { net, fwd, inv }
    }

    pub fn eval(&self, f: &XplFormula) -> Vec<bool> {
        let n = self.net.node_count();
        match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(filter) => (0..n)
                .map(|i| eval_filter(filter, self.net.payload(i).root()).unwrap())
                .collect(),
            Formula::Not(x) => self.eval(x).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip(self.eval(a), self.eval(b), |x, y| x && y),
            Formula::Or(a, b) => zip(self.eval(a), self.eval(b), |x, y| x || y),
            Formula::Modal(q, d, m, x) => {
                let x = self.eval(x);
                let adj = self.adj(*d);
                match (q, m) {
                    (Quantifier::Exists, Modality::Next) => (0..n).map(|u| adj[u].iter().any(|&v| x[v])).collect(),
                    (Quantifier::All, Modality::Next) => (0..n).map(|u| adj[u].iter().all(|&v| x[v])).collect(),
                    (Quantifier::Exists, Modality::Eventually) => self.eu(adj, &vec![true; n], &x),
                    (Quantifier::All, Modality::Eventually) => self.au(adj, &vec![true; n], &x),
                    (Quantifier::Exists, Modality::Globally) => self.eg(adj, &x),
                    (Quantifier::All, Modality::Globally) => {
                        let not_x: Vec<bool> = x.iter().map(|b| !b).collect();
                        self.eu(adj, &vec![true; n], &not_x).into_iter().map(|b| !b).collect()
                    }
                }
            }
            Formula::Until(q, d, a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                let adj = self.adj(*d);
                match q {
                    Quantifier::Exists => self.eu(adj, &a, &b),
                    Quantifier::All => self.au(adj, &a, &b),
                }
            }
        }
    }

    fn adj(&self, d: Direction) -> &[Vec<usize>] {
        match d {
            Direction::Forward => &self.fwd,
            Direction::Inverse => &self.inv,
        }
    }

    fn eu(&self, adj: &[Vec<usize>], a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut z = b.to_vec();
        loop {
            let next: Vec<bool> = (0..z.len())
                .map(|u| z[u] || (a[u] && adj[u].iter().any(|&v| z[v])))
                .collect();
            if next == z {
                return z;
            }
            z = next;
        }
    }

    fn au(&self, adj: &[Vec<usize>], a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut z = b.to_vec();
        loop {
            let next: Vec<bool> = (0..z.len())
                .map(|u| z[u] || (a[u] && !adj[u].is_empty() && adj[u].iter().all(|&v| z[v])))
                .collect();
            if next == z {
                return z;
            }
            z = next;
        }
    }

    /// Greatest fixpoint: Z := x ∩ (sink ∪ pre∃(Z)).
    fn eg(&self, adj: &[Vec<usize>], x: &[bool]) -> Vec<bool> {
        let mut z = x.to_vec();
        loop {
            let next: Vec<bool> = (0..z.len())
                .map(|u| z[u] && (adj[u].is_empty() || adj[u].iter().any(|&v| z[v])))
                .collect();
            if next == z {
                return z;
            }
            z = next;
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// All-pairs breadth-first distances on the undirected simple graph;
/// `None` for unreachable pairs.
pub fn all_pairs_bfs(net: &Network) -> Vec<Vec<Option<u64>>> {
    let n = net.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in net.edges() {
        if e.from != e.to {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
    }
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut frontier = vec![s];
            let mut d = 0;
            while !frontier.is_empty() {
                d += 1;
                let mut next = Vec::new();
                for u in frontier {
                    for &w in &adj[u] {
                        if dist[w].is_none() {
                            dist[w] = Some(d);
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            dist
        })
        .collect()
}

/// Tries every ordering and orientation of the edge records: exponential,
/// only for tiny multigraphs.
pub fn brute_force_eulerian(n: usize, edges: &[(usize, usize)]) -> bool {
    fn extend(edges: &[(usize, usize)], used: &mut [bool], at: usize, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        for i in 0..edges.len() {
            if used[i] {
                continue;
            }
            let (a, b) = edges[i];
            let next = if a == at {
                b
            } else if b == at {
                a
            } else {
                continue;
            };
            used[i] = true;
            if extend(edges, used, next, left - 1) {
                used[i] = false;
                return true;
            }
            used[i] = false;
        }
        false
    }
    if edges.is_empty() {
        return true;
    }
    let mut used = vec![false; edges.len()];
    (0..n).any(|s| extend(edges, &mut used, s, edges.len()))
}
