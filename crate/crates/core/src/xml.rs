//! A small XML reader producing immutable, arena-backed document trees.
//!
//! The accepted language is a closed subset of XML 1.0: elements,
//! attributes, character data, comments, the five predefined entities and
//! numeric character references. Namespaces, CDATA sections, processing
//! instructions (other than a leading XML declaration) and DTDs are
//! rejected.
//!
//! Whitespace-only text that sits next to element children is treated as
//! indentation and dropped; every other piece of text is kept verbatim.
//! Node ids are allocated in document order, so comparing two [`NodeId`]s
//! of the same document compares their document positions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("XML syntax error at line {line}, column {column}: {message}")]
pub struct XmlError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Index of a node inside a [`Document`]. Ids grow in document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Element {
        name: String,
        attributes: Vec<Attribute>,
        children: Vec<NodeId>,
    },
    Text(String),
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    parent: Option<NodeId>,
}

/// An immutable XML tree. The root element always has id 0.
#[derive(Debug, Clone)]
pub struct Document {
    nodes: Vec<Node>,
}

/// Borrowed view of an element.
#[derive(Debug, Clone, Copy)]
pub struct Element<'a> {
    doc: &'a Document,
    id: NodeId,
}

/// Borrowed view of one child of an element.
#[derive(Debug, Clone, Copy)]
pub enum XmlItem<'a> {
    Element(Element<'a>),
    Text(&'a str),
}

impl Document {
    pub fn parse(input: &str) -> Result<Document, XmlError> {
        Parser::new(input).parse_document()
    }

    pub fn parse_bytes(input: &[u8]) -> Result<Document, XmlError> {
        let text = std::str::from_utf8(input).map_err(|e| {
            let (line, column) = line_col(&input[..e.valid_up_to()]);
            XmlError {
                line,
                column,
                message: "input is not valid UTF-8".into(),
            }
        })?;
        Self::parse(text)
    }

    pub fn root(&self) -> Element<'_> {
        Element {
            doc: self,
            id: NodeId(0),
        }
    }

    pub fn root_id(&self) -> NodeId {
        NodeId(0)
    }

    /// Number of nodes (elements and text items) in the tree.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn element(&self, id: NodeId) -> Option<Element<'_>> {
        match self.nodes.get(id.index())?.kind {
            NodeKind::Element { .. } => Some(Element { doc: self, id }),
            NodeKind::Text(_) => None,
        }
    }

    pub fn item(&self, id: NodeId) -> XmlItem<'_> {
        match &self.nodes[id.index()].kind {
            NodeKind::Element { .. } => XmlItem::Element(Element { doc: self, id }),
            NodeKind::Text(t) => XmlItem::Text(t),
        }
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn is_element(&self, id: NodeId) -> bool {
        matches!(self.nodes[id.index()].kind, NodeKind::Element { .. })
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id.index()].kind {
            NodeKind::Element { name, .. } => Some(name),
            NodeKind::Text(_) => None,
        }
    }

    pub fn text(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id.index()].kind {
            NodeKind::Text(t) => Some(t),
            NodeKind::Element { .. } => None,
        }
    }

    pub fn attributes(&self, id: NodeId) -> &[Attribute] {
        match &self.nodes[id.index()].kind {
            NodeKind::Element { attributes, .. } => attributes,
            NodeKind::Text(_) => &[],
        }
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        match &self.nodes[id.index()].kind {
            NodeKind::Element { children, .. } => children,
            NodeKind::Text(_) => &[],
        }
    }

    /// Concatenation of all text below `id` in document order.
    pub fn string_value(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.push_string_value(id, &mut out);
        out
    }

    fn push_string_value(&self, id: NodeId, out: &mut String) {
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            match &self.nodes[cur.index()].kind {
                NodeKind::Text(t) => out.push_str(t),
                NodeKind::Element { children, .. } => stack.extend(children.iter().rev()),
            }
        }
    }

    /// Copies the subtree rooted at element `id` into a fresh document whose
    /// root is that element.
    pub fn subtree(&self, id: NodeId) -> Document {
        assert!(self.is_element(id), "subtree root must be an element");
        let mut nodes = Vec::new();
        // (source id, parent in the new arena)
        let mut stack = vec![(id, None::<NodeId>)];
        while let Some((src, parent)) = stack.pop() {
            let new_id = NodeId(nodes.len() as u32);
            let kind = match &self.nodes[src.index()].kind {
                NodeKind::Text(t) => NodeKind::Text(t.clone()),
                NodeKind::Element { name, attributes, .. } => NodeKind::Element {
                    name: name.clone(),
                    attributes: attributes.clone(),
                    children: Vec::new(),
                },
            };
            nodes.push(Node { kind, parent });
            if let Some(p) = parent {
                if let NodeKind::Element { children, .. } = &mut nodes[p.index()].kind {
                    children.push(new_id);
                }
            }
            for &child in self.children(src).iter().rev() {
                stack.push((child, Some(new_id)));
            }
        }
        Document { nodes }
    }

    /// Structural equality: names, attributes (in order) and children.
    pub fn same_tree(&self, other: &Document) -> bool {
        fn eq(a: &Document, ai: NodeId, b: &Document, bi: NodeId) -> bool {
            match (&a.nodes[ai.index()].kind, &b.nodes[bi.index()].kind) {
                (NodeKind::Text(x), NodeKind::Text(y)) => x == y,
                (
                    NodeKind::Element {
                        name: n1,
                        attributes: a1,
                        children: c1,
                    },
                    NodeKind::Element {
                        name: n2,
                        attributes: a2,
                        children: c2,
                    },
                ) => n1 == n2 && a1 == a2 && c1.len() == c2.len() && c1.iter().zip(c2).all(|(&x, &y)| eq(a, x, b, y)),
                _ => false,
            }
        }
        eq(self, self.root_id(), other, other.root_id())
    }

    fn write_node(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id.index()].kind {
            NodeKind::Text(t) => escape_into(t, false, out),
            NodeKind::Element {
                name,
                attributes,
                children,
            } => {
                out.push('<');
                out.push_str(name);
                for attr in attributes {
                    out.push(' ');
                    out.push_str(&attr.name);
                    out.push_str("=\"");
                    escape_into(&attr.value, true, out);
                    out.push('"');
                }
                if children.is_empty() {
                    out.push_str("/>");
                } else {
                    out.push('>');
                    for &c in children {
                        self.write_node(c, out);
                    }
                    out.push_str("</");
                    out.push_str(name);
                    out.push('>');
                }
            }
        }
    }
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.same_tree(other)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write_node(self.root_id(), &mut out);
        f.write_str(&out)
    }
}

impl<'a> Element<'a> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn document(&self) -> &'a Document {
        self.doc
    }

    pub fn name(&self) -> &'a str {
        self.doc.name(self.id).expect("element view over a text node")
    }

    pub fn attributes(&self) -> &'a [Attribute] {
        self.doc.attributes(self.id)
    }

    pub fn attribute(&self, name: &str) -> Option<&'a str> {
        self.attributes()
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.value.as_str())
    }

    pub fn parent(&self) -> Option<Element<'a>> {
        self.doc.parent(self.id).and_then(|p| self.doc.element(p))
    }

    pub fn children(&self) -> impl Iterator<Item = XmlItem<'a>> + 'a {
        let doc = self.doc;
        doc.children(self.id).iter().map(move |&c| doc.item(c))
    }

    pub fn child_elements(&self) -> impl Iterator<Item = Element<'a>> + 'a {
        let doc = self.doc;
        doc.children(self.id).iter().filter_map(move |&c| doc.element(c))
    }

    pub fn string_value(&self) -> String {
        self.doc.string_value(self.id)
    }
}

impl XmlItem<'_> {
    pub fn string_value(&self) -> String {
        match self {
            XmlItem::Element(e) => e.string_value(),
            XmlItem::Text(t) => (*t).to_owned(),
        }
    }
}

/// Document-order concatenation of the text contained in `item`.
pub fn string_value(item: XmlItem<'_>) -> String {
    item.string_value()
}

fn escape_into(text: &str, attr: bool, out: &mut String) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            // Attribute-value normalization would otherwise turn these into spaces.
            '\n' if attr => out.push_str("&#10;"),
            '\t' if attr => out.push_str("&#9;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

fn line_col(consumed: &[u8]) -> (usize, usize) {
    let text = String::from_utf8_lossy(consumed);
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct OpenElement {
    id: NodeId,
    name: String,
    has_element_child: bool,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    nodes: Vec<Node>,
    text: String,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let src = src.strip_prefix('\u{feff}').unwrap_or(src);
        Parser {
            src,
            pos: 0,
            nodes: Vec::new(),
            text: String::new(),
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> XmlError {
        let (line, column) = line_col(&self.src.as_bytes()[..pos]);
        XmlError {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> XmlError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start_matches([' ', '\t', '\r', '\n']);
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, s: &str) -> Result<(), XmlError> {
        if self.starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn parse_name(&mut self) -> Result<String, XmlError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if is_name_start(c) => self.pos += c.len_utf8(),
            Some(':') => return Err(self.error("namespaces are not supported")),
            _ => return Err(self.error("expected a name")),
        }
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                self.pos += c.len_utf8();
            } else if c == ':' {
                return Err(self.error("namespaces are not supported"));
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_owned())
    }

    fn skip_comment(&mut self) -> Result<(), XmlError> {
        let start = self.pos;
        self.pos += "<!--".len();
        match self.rest().find("-->") {
            Some(end) => {
                self.pos += end + 3;
                Ok(())
            }
            None => Err(self.error_at(start, "unterminated comment")),
        }
    }

    /// Skips whitespace and comments outside the root element.
    fn skip_misc(&mut self) -> Result<(), XmlError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.skip_comment()?;
            } else {
                return Ok(());
            }
        }
    }

    fn parse_document(mut self) -> Result<Document, XmlError> {
        if self.starts_with("<?xml") {
            let start = self.pos;
            match self.rest().find("?>") {
                Some(end) => self.pos += end + 2,
                None => return Err(self.error_at(start, "unterminated XML declaration")),
            }
        }
        self.skip_misc()?;
        if self.pos == self.src.len() {
            return Err(self.error("no root element"));
        }
        if !self.starts_with("<") || self.starts_with("<!") || self.starts_with("<?") {
            return Err(self.unsupported_markup_or("text before the root element"));
        }
        self.parse_root()?;
        self.skip_misc()?;
        if self.pos < self.src.len() {
            return Err(
                if self.starts_with("<") && !self.starts_with("<!") && !self.starts_with("<?") {
                    self.error("multiple root elements")
                } else {
                    self.unsupported_markup_or("content after the root element")
                },
            );
        }
        Ok(Document { nodes: self.nodes })
    }

    fn unsupported_markup_or(&self, fallback: &str) -> XmlError {
        if self.starts_with("<![CDATA[") {
            self.error("CDATA sections are not supported")
        } else if self.starts_with("<!") {
            self.error("DTDs and declarations are not supported")
        } else if self.starts_with("<?") {
            self.error("processing instructions are not supported")
        } else {
            self.error(fallback)
        }
    }

    fn alloc(&mut self, kind: NodeKind, parent: Option<NodeId>) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { kind, parent });
        if let Some(p) = parent {
            if let NodeKind::Element { children, .. } = &mut self.nodes[p.index()].kind {
                children.push(id);
            }
        }
        id
    }

    /// Emits buffered character data as a text child of `open`. Pure
    /// whitespace is dropped once the element is known to hold elements.
    fn flush_text(&mut self, parent: NodeId, has_element_child: bool, before_element: bool) {
        if self.text.is_empty() {
            return;
        }
        let text = std::mem::take(&mut self.text);
        let blank = text.chars().all(|c| matches!(c, ' ' | '\t' | '\r' | '\n'));
        if blank && (before_element || has_element_child) {
            return;
        }
        self.alloc(NodeKind::Text(text), Some(parent));
    }

    /// Parses a start tag at `<`. Returns the element and whether it was
    /// self-closing.
    fn parse_start_tag(&mut self, parent: Option<NodeId>) -> Result<(OpenElement, bool), XmlError> {
        self.expect("<")?;
        let name = self.parse_name()?;
        let mut attributes: Vec<Attribute> = Vec::new();
        loop {
            let before_ws = self.pos;
            self.skip_ws();
            if self.starts_with("/>") {
                self.pos += 2;
                let id = self.alloc(
                    NodeKind::Element {
                        name: name.clone(),
                        attributes,
                        children: Vec::new(),
                    },
                    parent,
                );
                return Ok((
                    OpenElement {
                        id,
                        name,
                        has_element_child: false,
                    },
                    true,
                ));
            }
            if self.starts_with(">") {
                self.pos += 1;
                let id = self.alloc(
                    NodeKind::Element {
                        name: name.clone(),
                        attributes,
                        children: Vec::new(),
                    },
                    parent,
                );
                return Ok((
                    OpenElement {
                        id,
                        name,
                        has_element_child: false,
                    },
                    false,
                ));
            }
            if self.pos == self.src.len() {
                return Err(self.error(format!("unterminated start tag `<{name}`")));
            }
            if self.pos == before_ws {
                return Err(self.error("expected whitespace, `>` or `/>`"));
            }
            let attr_pos = self.pos;
            let attr_name = self.parse_name()?;
            self.skip_ws();
            self.expect("=")?;
            self.skip_ws();
            let value = self.parse_attr_value()?;
            if attributes.iter().any(|a| a.name == attr_name) {
                return Err(self.error_at(attr_pos, format!("duplicate attribute `{attr_name}`")));
            }
            attributes.push(Attribute { name: attr_name, value });
        }
    }

    fn parse_attr_value(&mut self) -> Result<String, XmlError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("attribute value must be quoted")),
        };
        let start = self.pos;
        self.pos += 1;
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(start, "unterminated attribute value")),
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(value);
                }
                Some('<') => return Err(self.error("`<` is not allowed in attribute values")),
                Some('&') => value.push(self.parse_reference()?),
                // Attribute-value normalization.
                Some(c @ ('\n' | '\t' | '\r')) => {
                    value.push(' ');
                    self.pos += c.len_utf8();
                }
                Some(c) => {
                    value.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }

    fn parse_reference(&mut self) -> Result<char, XmlError> {
        let start = self.pos;
        let end = match self.rest().find(';') {
            Some(e) if e <= 12 => e,
            _ => return Err(self.error("unterminated entity reference")),
        };
        let name = &self.src[start + 1..start + end];
        let c = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ if name.starts_with("#x") => u32::from_str_radix(&name[2..], 16).ok().and_then(char::from_u32),
            _ if name.starts_with('#') => name[1..].parse::<u32>().ok().and_then(char::from_u32),
            _ => return Err(self.error_at(start, format!("unknown entity `&{name};`"))),
        };
        match c {
            Some(c) => {
                self.pos += end + 1;
                Ok(c)
            }
            None => Err(self.error_at(start, format!("invalid character reference `&{name};`"))),
        }
    }

    fn parse_root(&mut self) -> Result<(), XmlError> {
        let (root, closed) = self.parse_start_tag(None)?;
        if closed {
            return Ok(());
        }
        let mut stack = vec![root];
        while let Some(top) = stack.last() {
            let top_name = top.name.clone();
            if self.pos >= self.src.len() {
                return Err(self.error(format!("unclosed element `<{top_name}>`")));
            }
            if self.starts_with("</") {
                let open = stack.pop().expect("nonempty stack");
                self.flush_text(open.id, open.has_element_child, false);
                let tag_pos = self.pos;
                self.pos += 2;
                let name = self.parse_name()?;
                if name != open.name {
                    return Err(self.error_at(
                        tag_pos,
                        format!("mismatched end tag: expected `</{}>`, found `</{name}>`", open.name),
                    ));
                }
                self.skip_ws();
                self.expect(">")?;
            } else if self.starts_with("<!--") {
                self.skip_comment()?;
            } else if self.starts_with("<!") || self.starts_with("<?") {
                return Err(self.unsupported_markup_or("unexpected markup"));
            } else if self.starts_with("<") {
                let parent = stack.last_mut().expect("nonempty stack");
                let parent_id = parent.id;
                let had_element = std::mem::replace(&mut parent.has_element_child, true);
                self.flush_text(parent_id, had_element, true);
                let (child, closed) = self.parse_start_tag(Some(parent_id))?;
                if !closed {
                    stack.push(child);
                }
            } else if self.starts_with("&") {
                let c = self.parse_reference()?;
                self.text.push(c);
            } else {
                let chunk_len = self.rest().find(['<', '&']).unwrap_or(self.rest().len());
                let chunk = &self.src[self.pos..self.pos + chunk_len];
                if let Some(off) = chunk.find("]]>") {
                    return Err(self.error_at(self.pos + off, "`]]>` is not allowed in text"));
                }
                self.text.push_str(chunk);
                self.pos += chunk_len;
            }
        }
        Ok(())
    }
}
