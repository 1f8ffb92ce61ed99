//! CTL over XPath filters, checked in three stages.
//!
//! 1. Query evaluation: each distinct filter `F` is evaluated once against
//!    every node payload, and matching nodes get the proposition `p_F`.
//! 2. Formula replacement: filters are swapped for their propositions,
//!    giving a plain CTL formula of the same length.
//! 3. Model checking of that formula over the labelled network.

mod parse;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ctl::{self, AtomSyntax, CtlError, CtlFormula, Formula, LabelMap, NodeSet, PropId, SatSet, Witness};
use crate::network::Network;
use crate::xpath::{eval_filter, EvalError, FilterExpr};

pub use parse::parse_xpl;

pub type XplFormula = Formula<FilterExpr>;

impl AtomSyntax for FilterExpr {
    fn write_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at offset {offset}: {message}")]
pub struct XplSyntaxError {
    /// Zero-based character offset into the formula text.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum XplError {
    #[error(transparent)]
    Syntax(#[from] XplSyntaxError),
    #[error("evaluating filter [{filter}] at node `{key}`: {source}")]
    Type {
        key: String,
        filter: String,
        #[source]
        source: EvalError,
    },
    #[error("filter [{0}] has no registered proposition")]
    MissingFilter(String),
    #[error(transparent)]
    Ctl(#[from] CtlError),
}

/// Bijection between the distinct filters of a formula and generated
/// propositions `p_1, p_2, ...` (numbered by first occurrence).
#[derive(Debug, Clone, Default)]
pub struct FilterRegistry {
    entries: Vec<(PropId, FilterExpr)>,
    by_canonical: HashMap<String, usize>,
}

impl FilterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers every atom of `formula`; structurally equal filters share
    /// one proposition.
    pub fn from_formula(formula: &XplFormula) -> Self {
        let mut reg = Self::new();
        for atom in formula.atoms() {
            reg.register(atom);
        }
        reg
    }

    pub fn register(&mut self, filter: &FilterExpr) -> PropId {
        let canonical = filter.to_string();
        if let Some(&i) = self.by_canonical.get(&canonical) {
            return self.entries[i].0.clone();
        }
        let prop = PropId::new(format!("p_{}", self.entries.len() + 1));
        self.by_canonical.insert(canonical, self.entries.len());
        self.entries.push((prop.clone(), filter.clone()));
        prop
    }

    pub fn prop_for(&self, filter: &FilterExpr) -> Option<&PropId> {
        self.by_canonical.get(&filter.to_string()).map(|&i| &self.entries[i].0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PropId, &FilterExpr)> {
        self.entries.iter().map(|(p, f)| (p, f))
    }
}

/// Step 1: labels every node with the propositions of the filters its
/// payload satisfies. `threads > 1` splits the nodes across scoped threads;
/// the result does not depend on it.
pub fn label_step(net: &Network, formula: &XplFormula, threads: usize) -> Result<(LabelMap, FilterRegistry), XplError> {
    let registry = FilterRegistry::from_formula(formula);
    let mut labels = LabelMap::for_network(net);
    for (prop, filter) in registry.iter() {
        labels.set_extension(prop.clone(), evaluate_everywhere(net, filter, threads)?);
    }
    Ok((labels, registry))
}

fn evaluate_range(
    net: &Network,
    filter: &FilterExpr,
    range: std::ops::Range<usize>,
) -> Result<Vec<bool>, (usize, EvalError)> {
    range
        .map(|i| eval_filter(filter, net.payload(i).root()).map_err(|e| (i, e)))
        .collect()
}

fn evaluate_everywhere(net: &Network, filter: &FilterExpr, threads: usize) -> Result<NodeSet, XplError> {
    let n = net.node_count();
    let threads = threads.clamp(1, n.max(1));
    let result = if threads == 1 {
        evaluate_range(net, filter, 0..n)
    } else {
        let chunk = n.div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|start| s.spawn(move || evaluate_range(net, filter, start..(start + chunk).min(n))))
                .collect();
            let mut bits = Vec::with_capacity(n);
            // Chunks are joined in order, so the reported error is the one at
            // the smallest key, as in the sequential case.
            for h in handles {
                bits.extend(h.join().expect("labelling thread panicked")?);
            }
            Ok(bits)
        })
    };
    result.map(NodeSet::from_bools).map_err(|(i, source)| XplError::Type {
        key: net.key(i).to_owned(),
        filter: filter.to_string(),
        source,
    })
}

/// Step 2: replaces each filter by its proposition.
pub fn replace_step(formula: &XplFormula, registry: &FilterRegistry) -> Result<CtlFormula, XplError> {
    formula.try_map_atoms(&mut |f| {
        registry
            .prop_for(f)
            .cloned()
            .ok_or_else(|| XplError::MissingFilter(f.to_string()))
    })
}

/// A formula after the labelling and replacement steps, ready to be checked
/// and witnessed against the network it was labelled on.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub labels: LabelMap,
    pub registry: FilterRegistry,
    pub ctl: CtlFormula,
}

impl Prepared {
    pub fn new(net: &Network, formula: &XplFormula, threads: usize) -> Result<Self, XplError> {
        let (labels, registry) = label_step(net, formula, threads)?;
        let ctl = replace_step(formula, &registry)?;
        Ok(Prepared { labels, registry, ctl })
    }

    /// Step 3.
    pub fn satisfying(&self, net: &Network) -> Result<SatSet, XplError> {
        Ok(ctl::model_check(net, &self.labels, &self.ctl)?)
    }

    pub fn witness(&self, net: &Network, key: &str) -> Result<Witness, XplError> {
        Ok(ctl::witness(net, &self.labels, &self.ctl, key)?)
    }
}

/// Nodes of `net` satisfying `formula`.
pub fn check(net: &Network, formula: &XplFormula) -> Result<SatSet, XplError> {
    Prepared::new(net, formula, 1)?.satisfying(net)
}

/// Nodes whose payload satisfies `filter`: the `/network/node[F]` query.
pub fn query(net: &Network, filter: &FilterExpr, threads: usize) -> Result<SatSet, XplError> {
    evaluate_everywhere(net, filter, threads)
}
