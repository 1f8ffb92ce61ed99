use super::{Axis, CmpOp, EvalError, FilterExpr, LocationPath, NodeTest, Operand, Step};
use crate::xml::{Document, Element, NodeId};

/// One item of a path result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Item {
    /// The virtual parent of the root element. Only absolute paths start
    /// here and it never appears in a result sequence.
    Root,
    /// An element or text node.
    Node(NodeId),
    /// Attribute `index` of the element.
    Attribute(NodeId, u32),
}

impl Item {
    /// Sort key realising document order: an element, then its attributes,
    /// then its descendants.
    fn order_key(self) -> (u64, u32) {
        match self {
            Item::Root => (0, 0),
            Item::Node(id) => (id.index() as u64 + 1, 0),
            Item::Attribute(id, i) => (id.index() as u64 + 1, i + 1),
        }
    }

    pub fn string_value(self, doc: &Document) -> String {
        match self {
            Item::Root => doc.string_value(doc.root_id()),
            Item::Node(id) => doc.string_value(id),
            Item::Attribute(id, i) => doc.attributes(id)[i as usize].value.clone(),
        }
    }
}

fn push_descendants(doc: &Document, id: NodeId, out: &mut Vec<Item>) {
    let mut stack: Vec<NodeId> = doc.children(id).iter().rev().copied().collect();
    while let Some(cur) = stack.pop() {
        out.push(Item::Node(cur));
        stack.extend(doc.children(cur).iter().rev());
    }
}

fn siblings(doc: &Document, id: NodeId) -> &[NodeId] {
    match doc.parent(id) {
        Some(p) => doc.children(p),
        None => &[],
    }
}

fn axis_items(doc: &Document, axis: Axis, item: Item, out: &mut Vec<Item>) {
    match (axis, item) {
        (Axis::SelfAxis, _) => out.push(item),
        (Axis::Child, Item::Root) => out.push(Item::Node(doc.root_id())),
        (Axis::Child, Item::Node(id)) => out.extend(doc.children(id).iter().map(|&c| Item::Node(c))),
        (Axis::Descendant | Axis::DescendantOrSelf, Item::Root) => {
            if axis == Axis::DescendantOrSelf {
                out.push(Item::Root);
            }
            out.push(Item::Node(doc.root_id()));
            push_descendants(doc, doc.root_id(), out);
        }
        (Axis::Descendant | Axis::DescendantOrSelf, Item::Node(id)) => {
            if axis == Axis::DescendantOrSelf {
                out.push(item);
            }
            push_descendants(doc, id, out);
        }
        (Axis::DescendantOrSelf, Item::Attribute(..)) => out.push(item),
        (Axis::Parent, Item::Node(id)) => out.extend(doc.parent(id).map(Item::Node)),
        (Axis::Parent, Item::Attribute(id, _)) => out.push(Item::Node(id)),
        (Axis::Ancestor, Item::Node(_) | Item::Attribute(..)) => {
            let mut cur = match item {
                Item::Node(id) => doc.parent(id),
                Item::Attribute(id, _) => Some(id),
                Item::Root => None,
            };
            while let Some(id) = cur {
                out.push(Item::Node(id));
                cur = doc.parent(id);
            }
        }
        (Axis::Attribute, Item::Node(id)) => {
            out.extend((0..doc.attributes(id).len() as u32).map(|i| Item::Attribute(id, i)))
        }
        (Axis::FollowingSibling, Item::Node(id)) => {
            let sibs = siblings(doc, id);
            let pos = sibs.iter().position(|&s| s == id).map_or(sibs.len(), |p| p + 1);
            out.extend(sibs[pos..].iter().map(|&s| Item::Node(s)));
        }
        (Axis::PrecedingSibling, Item::Node(id)) => {
            let sibs = siblings(doc, id);
            let pos = sibs.iter().position(|&s| s == id).unwrap_or(0);
            out.extend(sibs[..pos].iter().map(|&s| Item::Node(s)));
        }
        _ => {}
    }
}

fn matches_test(doc: &Document, axis: Axis, test: &NodeTest, item: Item) -> bool {
    match (test, item) {
        (NodeTest::AnyNode, _) => true,
        (_, Item::Root) => false,
        // The principal node type of the attribute axis is attribute.
        (NodeTest::Name(n), Item::Attribute(id, i)) => {
            axis == Axis::Attribute && doc.attributes(id)[i as usize].name == *n
        }
        (NodeTest::AnyElement, Item::Attribute(..)) => axis == Axis::Attribute,
        (NodeTest::TextNodes, Item::Attribute(..)) => false,
        (_, Item::Node(_)) if axis == Axis::Attribute => false,
        (NodeTest::Name(n), Item::Node(id)) => doc.name(id) == Some(n.as_str()),
        (NodeTest::AnyElement, Item::Node(id)) => doc.is_element(id),
        (NodeTest::TextNodes, Item::Node(id)) => !doc.is_element(id),
    }
}

fn sort_document_order(items: &mut Vec<Item>) {
    items.sort_unstable_by_key(|i| i.order_key());
    items.dedup();
}

fn eval_step(doc: &Document, step: &Step, context: &[Item]) -> Result<Vec<Item>, EvalError> {
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    for &ctx in context {
        scratch.clear();
        axis_items(doc, step.axis, ctx, &mut scratch);
        for &cand in &scratch {
            if !matches_test(doc, step.axis, &step.test, cand) {
                continue;
            }
            let mut keep = true;
            for pred in &step.predicates {
                if !eval_at(pred, doc, cand)? {
                    keep = false;
                    break;
                }
            }
            if keep {
                out.push(cand);
            }
        }
    }
    sort_document_order(&mut out);
    Ok(out)
}

/// Items reached by `path` from `context`, duplicate-free and in document
/// order. Fails only when a predicate inside the path raises a type error.
pub fn eval_path(path: &LocationPath, doc: &Document, context: Item) -> Result<Vec<Item>, EvalError> {
    let mut current = vec![if path.absolute { Item::Root } else { context }];
    for step in &path.steps {
        current = eval_step(doc, step, &current)?;
        if current.is_empty() {
            break;
        }
    }
    current.retain(|&i| i != Item::Root);
    Ok(current)
}

/// Evaluates `filter` with `element` as the context node.
pub fn eval_filter(filter: &FilterExpr, element: Element<'_>) -> Result<bool, EvalError> {
    eval_at(filter, element.document(), Item::Node(element.id()))
}

/// Evaluates `filter` at an arbitrary item of `doc`.
pub fn eval_filter_at(filter: &FilterExpr, doc: &Document, context: Item) -> Result<bool, EvalError> {
    eval_at(filter, doc, context)
}

enum Value {
    Items(Vec<Item>),
    Str(String),
    Num(f64),
    Bool(bool),
}

fn eval_at(filter: &FilterExpr, doc: &Document, ctx: Item) -> Result<bool, EvalError> {
    Ok(match filter {
        FilterExpr::And(a, b) => eval_at(a, doc, ctx)? && eval_at(b, doc, ctx)?,
        FilterExpr::Or(a, b) => eval_at(a, doc, ctx)? || eval_at(b, doc, ctx)?,
        FilterExpr::Not(a) => !eval_at(a, doc, ctx)?,
        FilterExpr::Exists(p) => !eval_path(p, doc, ctx)?.is_empty(),
        FilterExpr::Contains(p, s) => contains(p, s, doc, ctx)?,
        FilterExpr::Value(op) => to_bool(&operand_value(op, doc, ctx)?),
        FilterExpr::Comparison(l, op, r) => {
            let lv = operand_value(l, doc, ctx)?;
            let rv = operand_value(r, doc, ctx)?;
            compare(doc, &lv, *op, &rv)?
        }
    })
}

fn contains(path: &LocationPath, needle: &str, doc: &Document, ctx: Item) -> Result<bool, EvalError> {
    Ok(eval_path(path, doc, ctx)?
        .into_iter()
        .any(|i| i.string_value(doc).contains(needle)))
}

fn operand_value(op: &Operand, doc: &Document, ctx: Item) -> Result<Value, EvalError> {
    Ok(match op {
        Operand::Path(p) => Value::Items(eval_path(p, doc, ctx)?),
        Operand::String(s) => Value::Str(s.clone()),
        Operand::Number(n) => Value::Num(*n),
        Operand::Count(p) => Value::Num(eval_path(p, doc, ctx)?.len() as f64),
        Operand::Contains(p, s) => Value::Bool(contains(p, s, doc, ctx)?),
    })
}

fn to_bool(v: &Value) -> bool {
    match v {
        Value::Items(items) => !items.is_empty(),
        Value::Str(s) => !s.is_empty(),
        Value::Num(n) => *n != 0.0,
        Value::Bool(b) => *b,
    }
}

/// Reads a decimal number: optional sign, digits with at most one point,
/// surrounding XML whitespace ignored.
fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim_matches([' ', '\t', '\r', '\n']);
    let digits = t.strip_prefix('-').unwrap_or(t);
    let ok = !digits.is_empty()
        && digits.chars().all(|c| c.is_ascii_digit() || c == '.')
        && digits.matches('.').count() <= 1
        && digits.chars().any(|c| c.is_ascii_digit());
    if ok {
        t.parse().ok()
    } else {
        None
    }
}

fn coerce_number(text: &str) -> Result<f64, EvalError> {
    parse_number(text).ok_or_else(|| EvalError::Type(format!("cannot read {text:?} as a number")))
}

fn numbers(doc: &Document, v: &Value) -> Result<Vec<f64>, EvalError> {
    match v {
        Value::Items(items) => items.iter().map(|i| coerce_number(&i.string_value(doc))).collect(),
        Value::Str(s) => Ok(vec![coerce_number(s)?]),
        Value::Num(n) => Ok(vec![*n]),
        Value::Bool(b) => Ok(vec![if *b { 1.0 } else { 0.0 }]),
    }
}

fn strings(doc: &Document, v: &Value) -> Vec<String> {
    match v {
        Value::Items(items) => items.iter().map(|i| i.string_value(doc)).collect(),
        Value::Str(s) => vec![s.clone()],
        Value::Num(n) => vec![n.to_string()],
        Value::Bool(b) => vec![b.to_string()],
    }
}

fn compare(doc: &Document, l: &Value, op: CmpOp, r: &Value) -> Result<bool, EvalError> {
    let numeric = |a: f64, b: f64| match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    };
    let exists_pair = |ls: &[f64], rs: &[f64]| ls.iter().any(|&a| rs.iter().any(|&b| numeric(a, b)));
    match op {
        CmpOp::Eq | CmpOp::Ne => {
            if matches!(l, Value::Bool(_)) || matches!(r, Value::Bool(_)) {
                let (a, b) = (to_bool(l), to_bool(r));
                return Ok((a == b) == (op == CmpOp::Eq));
            }
            if matches!(l, Value::Num(_)) || matches!(r, Value::Num(_)) {
                return Ok(exists_pair(&numbers(doc, l)?, &numbers(doc, r)?));
            }
            let (ls, rs) = (strings(doc, l), strings(doc, r));
            let eq = op == CmpOp::Eq;
            Ok(ls.iter().any(|a| rs.iter().any(|b| (a == b) == eq)))
        }
        _ => Ok(exists_pair(&numbers(doc, l)?, &numbers(doc, r)?)),
    }
}
