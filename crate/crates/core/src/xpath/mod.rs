//! Navigational XPath filters over node payloads.
//!
//! Filters are boolean combinations of location paths, comparisons,
//! `count(path)` and `contains(path, "s")`. The grammar is the navigational
//! core of XPath 1.0 without positional predicates, arithmetic, unions or
//! variables.

mod eval;
mod parse;

use std::fmt;

use thiserror::Error;

pub use eval::{eval_filter, eval_filter_at, eval_path, Item};
pub use parse::parse_filter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("filter syntax error at offset {offset}: {message}")]
pub struct FilterSyntaxError {
    /// Zero-based character offset into the filter text.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// A value had to be read as a number but was not one.
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Child,
    Descendant,
    DescendantOrSelf,
    Parent,
    Ancestor,
    SelfAxis,
    Attribute,
    FollowingSibling,
    PrecedingSibling,
}

impl Axis {
    pub fn from_name(name: &str) -> Option<Axis> {
        Some(match name {
            "child" => Axis::Child,
            "descendant" => Axis::Descendant,
            "descendant-or-self" => Axis::DescendantOrSelf,
            "parent" => Axis::Parent,
            "ancestor" => Axis::Ancestor,
            "self" => Axis::SelfAxis,
            "attribute" => Axis::Attribute,
            "following-sibling" => Axis::FollowingSibling,
            "preceding-sibling" => Axis::PrecedingSibling,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Child => "child",
            Axis::Descendant => "descendant",
            Axis::DescendantOrSelf => "descendant-or-self",
            Axis::Parent => "parent",
            Axis::Ancestor => "ancestor",
            Axis::SelfAxis => "self",
            Axis::Attribute => "attribute",
            Axis::FollowingSibling => "following-sibling",
            Axis::PrecedingSibling => "preceding-sibling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeTest {
    /// Element (or, on the attribute axis, attribute) with this exact name.
    Name(String),
    /// `*`
    AnyElement,
    /// `text()`
    TextNodes,
    /// `node()`; also what `.`, `..` and `//` expand to.
    AnyNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub axis: Axis,
    pub test: NodeTest,
    pub predicates: Vec<FilterExpr>,
}

impl Step {
    pub fn new(axis: Axis, test: NodeTest) -> Self {
        Step {
            axis,
            test,
            predicates: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationPath {
    /// Evaluation starts at the root of the context's tree instead of the
    /// context item.
    pub absolute: bool,
    pub steps: Vec<Step>,
}

impl LocationPath {
    /// `child::name`
    pub fn child(name: &str) -> Self {
        LocationPath {
            absolute: false,
            steps: vec![Step::new(Axis::Child, NodeTest::Name(name.to_owned()))],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Path(LocationPath),
    String(String),
    Number(f64),
    Count(LocationPath),
    Contains(LocationPath, String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterExpr {
    And(Box<FilterExpr>, Box<FilterExpr>),
    Or(Box<FilterExpr>, Box<FilterExpr>),
    Not(Box<FilterExpr>),
    Comparison(Operand, CmpOp, Operand),
    /// A bare path: true iff it selects something.
    Exists(LocationPath),
    Contains(LocationPath, String),
    /// A bare literal or `count(..)`, read as a boolean.
    Value(Operand),
}

impl FilterExpr {
    pub fn and(a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FilterExpr, b: FilterExpr) -> Self {
        FilterExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: FilterExpr) -> Self {
        FilterExpr::Not(Box::new(a))
    }
}

fn write_string_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if s.contains('"') {
        write!(f, "'{s}'")
    } else {
        write!(f, "\"{s}\"")
    }
}

impl fmt::Display for NodeTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeTest::Name(n) => f.write_str(n),
            NodeTest::AnyElement => f.write_str("*"),
            NodeTest::TextNodes => f.write_str("text()"),
            NodeTest::AnyNode => f.write_str("node()"),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.axis.name(), self.test)?;
        for p in &self.predicates {
            write!(f, "[{p}]")?;
        }
        Ok(())
    }
}

/// Unabbreviated form: `child::a/descendant-or-self::node()/child::b`.
impl fmt::Display for LocationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.absolute {
            f.write_str("/")?;
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Path(p) => write!(f, "{p}"),
            Operand::String(s) => write_string_literal(f, s),
            Operand::Number(n) => write!(f, "{n}"),
            Operand::Count(p) => write!(f, "count({p})"),
            Operand::Contains(p, s) => {
                write!(f, "contains({p}, ")?;
                write_string_literal(f, s)?;
                f.write_str(")")
            }
        }
    }
}

/// Canonical, fully parenthesized rendering. Two filters are structurally
/// equal exactly when their renderings are equal, and the rendering parses
/// back to the same tree.
impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::And(a, b) => write!(f, "({a} and {b})"),
            FilterExpr::Or(a, b) => write!(f, "({a} or {b})"),
            FilterExpr::Not(a) => write!(f, "not({a})"),
            FilterExpr::Comparison(l, op, r) => write!(f, "({l} {} {r})", op.symbol()),
            FilterExpr::Exists(p) => write!(f, "{p}"),
            FilterExpr::Contains(p, s) => {
                write!(f, "contains({p}, ")?;
                write_string_literal(f, s)?;
                f.write_str(")")
            }
            FilterExpr::Value(op) => write!(f, "{op}"),
        }
    }
}
