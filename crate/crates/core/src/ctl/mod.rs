//! CTL with forward and inverse path quantifiers over labelled networks.
//!
//! Paths are maximal: either infinite or ending at a node without
//! successors. At such a sink `EX φ` is false, `AX φ` is true, and
//! `EG φ`, `AF φ` hold exactly when `φ` holds at the sink.

mod check;
mod formula;
mod oracle;
mod witness;

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::network::{Network, NetworkError};

pub use check::model_check;
pub use formula::{AtomSyntax, Direction, Formula, Modality, Quantifier};
pub use oracle::{oracle_check, ORACLE_MAX_NODES};
pub use witness::{witness, Witness};

/// Name of an atomic proposition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropId(pub String);

impl PropId {
    pub fn new(name: impl Into<String>) -> Self {
        PropId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type CtlFormula = Formula<PropId>;

#[derive(Debug, Error)]
pub enum CtlError {
    #[error("atomic proposition `{0}` is not registered in the label map")]
    UnboundAtom(PropId),
    #[error("the reference checker handles at most {max} nodes, got {n}")]
    SizeExceeded { n: usize, max: usize },
    #[error("node `{0}` does not satisfy the formula")]
    NotSatisfied(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A set of nodes of one network, stored by node index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    bits: Vec<bool>,
}

/// The nodes satisfying a formula.
pub type SatSet = NodeSet;

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        NodeSet { bits: vec![true; n] }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        NodeSet { bits }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(n);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Size of the universe (the network's node count).
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn insert(&mut self, i: usize) -> bool {
        !std::mem::replace(&mut self.bits[i], true)
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.bits
    }

    /// Member indices, ascending (hence in ascending key order).
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn keys<'n>(&self, net: &'n Network) -> Vec<&'n str> {
        self.indices().map(|i| net.key(i)).collect()
    }

    pub fn complement(&self) -> Self {
        NodeSet {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.bits.len(), other.bits.len(), "node sets over different networks");
        NodeSet {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Which registered propositions hold at which nodes.
#[derive(Debug, Clone)]
pub struct LabelMap {
    n: usize,
    props: HashMap<PropId, NodeSet>,
}

impl LabelMap {
    /// An empty labelling for a network with `n` nodes.
    pub fn new(n: usize) -> Self {
        LabelMap {
            n,
            props: HashMap::new(),
        }
    }

    pub fn for_network(net: &Network) -> Self {
        Self::new(net.node_count())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Registers `prop` (holding nowhere yet). Idempotent.
    pub fn register(&mut self, prop: PropId) {
        let n = self.n;
        self.props.entry(prop).or_insert_with(|| NodeSet::empty(n));
    }

    /// Registers `prop` with exactly the given extension.
    pub fn set_extension(&mut self, prop: PropId, nodes: NodeSet) {
        assert_eq!(nodes.universe(), self.n, "extension over a different network");
        self.props.insert(prop, nodes);
    }

    /// Marks `prop` as holding at node index `i`, registering it if needed.
    pub fn label(&mut self, i: usize, prop: &PropId) {
        let n = self.n;
        self.props
            .entry(prop.clone())
            .or_insert_with(|| NodeSet::empty(n))
            .insert(i);
    }

    pub fn label_key(&mut self, net: &Network, key: &str, prop: &PropId) -> Result<(), NetworkError> {
        let i = net.index_of(key)?;
        self.label(i, prop);
        Ok(())
    }

    pub fn is_registered(&self, prop: &PropId) -> bool {
        self.props.contains_key(prop)
    }

    pub fn extension(&self, prop: &PropId) -> Option<&NodeSet> {
        self.props.get(prop)
    }

    pub fn holds(&self, i: usize, prop: &PropId) -> bool {
        self.props.get(prop).is_some_and(|s| s.contains(i))
    }

    /// Propositions holding at node `i`, sorted.
    pub fn labels_of(&self, i: usize) -> BTreeSet<&PropId> {
        self.props
            .iter()
            .filter(|(_, set)| set.contains(i))
            .map(|(p, _)| p)
            .collect()
    }
}
