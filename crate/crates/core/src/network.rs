//! Node-attributed networks and their XML file format.
//!
//! ```text
//! <network directed="true|false">
//!   <node key="K"> ...payload... </node>
//!   <edge from="K1" to="K2" weight="W"/>
//! </network>
//! ```
//!
//! Nodes are kept sorted by key; a node's index is its rank in that order,
//! so index order and key order agree everywhere.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::xml::{Document, XmlError};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("network format error: {0}")]
    Format(String),
    #[error("unknown node key `{0}`")]
    UnknownKey(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Network {
    directed: bool,
    keys: Vec<String>,
    index: HashMap<String, usize>,
    payloads: Vec<Document>,
    /// Sorted by (from, to, weight); undirected edges have from <= to.
    edges: Vec<Edge>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.keys == other.keys
            && self.payloads == other.payloads
            && self.edges == other.edges
    }
}

/// Incremental construction; validation happens in [`NetworkBuilder::build`].
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    directed: bool,
    nodes: Vec<(String, Document)>,
    edges: Vec<(String, String, f64)>,
}

impl NetworkBuilder {
    pub fn new(directed: bool) -> Self {
        NetworkBuilder {
            directed,
            ..Default::default()
        }
    }

    pub fn node(&mut self, key: impl Into<String>, payload: Document) -> &mut Self {
        self.nodes.push((key.into(), payload));
        self
    }

    /// Adds a node whose payload is `<node key="..."/>` plus the given inner XML.
    pub fn node_with_content(&mut self, key: &str, inner_xml: &str) -> Result<&mut Self, NetworkError> {
        let mut text = String::from("<node key=\"");
        for c in key.chars() {
            match c {
                '&' => text.push_str("&amp;"),
                '<' => text.push_str("&lt;"),
                '"' => text.push_str("&quot;"),
                _ => text.push(c),
            }
        }
        text.push_str("\">");
        text.push_str(inner_xml);
        text.push_str("</node>");
        let payload = Document::parse(&text)?;
        Ok(self.node(key, payload))
    }

    pub fn edge(&mut self, from: impl Into<String>, to: impl Into<String>, weight: f64) -> &mut Self {
        self.edges.push((from.into(), to.into(), weight));
        self
    }

    pub fn build(&mut self) -> Result<Network, NetworkError> {
        let mut nodes = std::mem::take(&mut self.nodes);
        nodes.sort_by(|a, b| a.0.cmp(&b.0));
        for w in nodes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(NetworkError::Format(format!("duplicate node key `{}`", w[0].0)));
            }
        }
        if let Some((k, _)) = nodes.iter().find(|(k, _)| k.is_empty()) {
            return Err(NetworkError::Format(format!("empty node key `{k}`")));
        }
        let (keys, payloads): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
        let index: HashMap<String, usize> = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (from, to, weight) in std::mem::take(&mut self.edges) {
            let lookup = |k: &str| {
                index
                    .get(k)
                    .copied()
                    .ok_or_else(|| NetworkError::Format(format!("edge endpoint `{k}` is not a declared node")))
            };
            let (mut a, mut b) = (lookup(&from)?, lookup(&to)?);
            if !(weight.is_finite() && weight > 0.0) {
                return Err(NetworkError::Format(format!(
                    "edge {from} -> {to}: weight must be a positive number, got {weight}"
                )));
            }
            if !self.directed && a > b {
                std::mem::swap(&mut a, &mut b);
            }
            edges.push(Edge { from: a, to: b, weight });
        }
        Ok(Network::from_parts(self.directed, keys, index, payloads, edges))
    }
}

impl Network {
    fn from_parts(
        directed: bool,
        keys: Vec<String>,
        index: HashMap<String, usize>,
        payloads: Vec<Document>,
        mut edges: Vec<Edge>,
    ) -> Network {
        edges.sort_by(|x, y| (x.from, x.to).cmp(&(y.from, y.to)).then(x.weight.total_cmp(&y.weight)));
        let n = keys.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for e in &edges {
            succ[e.from].push(e.to);
            pred[e.to].push(e.from);
            if !directed {
                succ[e.to].push(e.from);
                pred[e.from].push(e.to);
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Network {
            directed,
            keys,
            index,
            payloads,
            edges,
            succ,
            pred,
        }
    }

    /// Reads the network file format.
    pub fn parse(input: &[u8]) -> Result<Network, NetworkError> {
        let doc = Document::parse_bytes(input)?;
        let root = doc.root();
        if root.name() != "network" {
            return Err(NetworkError::Format(format!(
                "root element must be `network`, found `{}`",
                root.name()
            )));
        }
        let directed = match root.attribute("directed") {
            None | Some("true") => true,
            Some("false") => false,
            Some(other) => {
                return Err(NetworkError::Format(format!(
                    "`directed` must be \"true\" or \"false\", found {other:?}"
                )))
            }
        };
        let mut builder = NetworkBuilder::new(directed);
        for child in root.children() {
            let el = match child {
                crate::xml::XmlItem::Text(t) if t.trim().is_empty() => continue,
                crate::xml::XmlItem::Text(t) => {
                    return Err(NetworkError::Format(format!(
                        "unexpected text {:?} inside `network`",
                        t.trim()
                    )))
                }
                crate::xml::XmlItem::Element(el) => el,
            };
            match el.name() {
                "node" => {
                    let key = el
                        .attribute("key")
                        .ok_or_else(|| NetworkError::Format("`node` without a `key` attribute".into()))?;
                    builder.node(key, doc.subtree(el.id()));
                }
                "edge" => {
                    let attr = |name: &str| {
                        el.attribute(name)
                            .ok_or_else(|| NetworkError::Format(format!("`edge` without a `{name}` attribute")))
                    };
                    let (from, to) = (attr("from")?, attr("to")?);
                    let weight = match el.attribute("weight") {
                        None => 1.0,
                        Some(w) => w.trim().parse::<f64>().map_err(|_| {
                            NetworkError::Format(format!("edge {from} -> {to}: weight {w:?} is not a number"))
                        })?,
                    };
                    if el.children().next().is_some() {
                        return Err(NetworkError::Format(format!("edge {from} -> {to} must be empty")));
                    }
                    builder.edge(from, to, weight);
                }
                other => {
                    return Err(NetworkError::Format(format!(
                        "unknown element `{other}` inside `network`"
                    )))
                }
            }
        }
        builder.build()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    /// Number of edges, counting parallel edges separately.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Keys in ascending order; position = node index.
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key(&self, index: usize) -> &str {
        &self.keys[index]
    }

    pub fn index_of(&self, key: &str) -> Result<usize, NetworkError> {
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| NetworkError::UnknownKey(key.to_owned()))
    }

    /// The `node` element of this node, as its own document.
    pub fn payload(&self, index: usize) -> &Document {
        &self.payloads[index]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Deduplicated successor indices, ascending.
    pub fn successor_indices(&self, index: usize) -> &[usize] {
        &self.succ[index]
    }

    /// Deduplicated predecessor indices, ascending.
    pub fn predecessor_indices(&self, index: usize) -> &[usize] {
        &self.pred[index]
    }

    pub fn successors(&self, key: &str) -> Result<Vec<&str>, NetworkError> {
        let i = self.index_of(key)?;
        Ok(self.succ[i].iter().map(|&j| self.key(j)).collect())
    }

    pub fn predecessors(&self, key: &str) -> Result<Vec<&str>, NetworkError> {
        let i = self.index_of(key)?;
        Ok(self.pred[i].iter().map(|&j| self.key(j)).collect())
    }

    /// Number of edge records joining `from` to `to` (either way round when
    /// undirected).
    pub fn edge_multiplicity(&self, from: &str, to: &str) -> Result<usize, NetworkError> {
        let (mut a, mut b) = (self.index_of(from)?, self.index_of(to)?);
        if !self.directed && a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let start = self.edges.partition_point(|e| (e.from, e.to) < (a, b));
        Ok(self.edges[start..]
            .iter()
            .take_while(|e| (e.from, e.to) == (a, b))
            .count())
    }

    /// The same network with every directed edge reversed.
    pub fn transpose(&self) -> Network {
        if !self.directed {
            return self.clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: e.to,
                to: e.from,
                weight: e.weight,
            })
            .collect();
        Network::from_parts(
            true,
            self.keys.clone(),
            self.index.clone(),
            self.payloads.clone(),
            edges,
        )
    }

    /// Serializes back to the network file format.
    pub fn to_xml(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "<network directed=\"{}\">", self.directed)?;
        for payload in &self.payloads {
            writeln!(f, "  {payload}")?;
        }
        for e in &self.edges {
            let mut attrs = String::new();
            for (name, value) in [("from", self.key(e.from)), ("to", self.key(e.to))] {
                attrs.push_str(&format!(" {name}=\""));
                for c in value.chars() {
                    match c {
                        '&' => attrs.push_str("&amp;"),
                        '<' => attrs.push_str("&lt;"),
                        '"' => attrs.push_str("&quot;"),
                        _ => attrs.push(c),
                    }
                }
                attrs.push('"');
            }
            writeln!(f, "  <edge{attrs} weight=\"{}\"/>", e.weight)?;
        }
        writeln!(f, "</network>")
    }
}
