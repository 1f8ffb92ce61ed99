use super::{Axis, CmpOp, FilterExpr, FilterSyntaxError, LocationPath, NodeTest, Operand, Step};
use crate::xml::{is_name_char, is_name_start};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Str(String),
    Num(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Slash,
    DoubleSlash,
    At,
    Dot,
    DotDot,
    ColonColon,
    Star,
    Cmp(CmpOp),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Num(_) => "number".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::DoubleSlash => "`//`".into(),
            Tok::At => "`@`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::Star => "`*`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::End => "end of filter".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

fn char_offset(src: &str, byte: usize) -> usize {
    src[..byte].chars().count()
}

fn err(src: &str, byte: usize, message: impl Into<String>) -> FilterSyntaxError {
    FilterSyntaxError {
        offset: char_offset(src, byte),
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, FilterSyntaxError> {
        let mut lexer = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lexer.next_token()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek_char(&self, ahead: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(ahead)
    }

    fn next_token(&mut self) -> Result<(Tok, usize), FilterSyntaxError> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(c) = self.peek_char(0) else {
            return Ok((Tok::End, start));
        };
        let two = |s: &mut Self, tok| {
            s.pos += 2;
            Ok((tok, start))
        };
        let one = |s: &mut Self, tok| {
            s.pos += 1;
            Ok((tok, start))
        };
        match (c, self.peek_char(1)) {
            ('/', Some('/')) => two(self, Tok::DoubleSlash),
            ('/', _) => one(self, Tok::Slash),
            (':', Some(':')) => two(self, Tok::ColonColon),
            ('!', Some('=')) => two(self, Tok::Cmp(CmpOp::Ne)),
            ('<', Some('=')) => two(self, Tok::Cmp(CmpOp::Le)),
            ('>', Some('=')) => two(self, Tok::Cmp(CmpOp::Ge)),
            ('<', _) => one(self, Tok::Cmp(CmpOp::Lt)),
            ('>', _) => one(self, Tok::Cmp(CmpOp::Gt)),
            ('=', _) => one(self, Tok::Cmp(CmpOp::Eq)),
            ('(', _) => one(self, Tok::LParen),
            (')', _) => one(self, Tok::RParen),
            ('[', _) => one(self, Tok::LBracket),
            (']', _) => one(self, Tok::RBracket),
            (',', _) => one(self, Tok::Comma),
            ('@', _) => one(self, Tok::At),
            ('*', _) => one(self, Tok::Star),
            ('.', Some('.')) => two(self, Tok::DotDot),
            ('.', Some(d)) if d.is_ascii_digit() => self.number(start),
            ('.', _) => one(self, Tok::Dot),
            (q @ ('"' | '\''), _) => {
                let body = &self.src[self.pos + 1..];
                match body.find(q) {
                    Some(end) => {
                        self.pos += end + 2;
                        Ok((Tok::Str(body[..end].to_owned()), start))
                    }
                    None => Err(err(self.src, start, "unterminated string literal")),
                }
            }
            (d, _) if d.is_ascii_digit() => self.number(start),
            (c, _) if is_name_start(c) => {
                let len = self.src[self.pos..]
                    .find(|ch: char| !is_name_char(ch))
                    .unwrap_or(self.src.len() - self.pos);
                let name = &self.src[self.pos..self.pos + len];
                self.pos += len;
                Ok((Tok::Name(name.to_owned()), start))
            }
            (c, _) => Err(err(self.src, start, format!("unexpected character `{c}`"))),
        }
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), FilterSyntaxError> {
        let len = self.src[self.pos..]
            .find(|ch: char| !(is_name_char(ch)))
            .unwrap_or(self.src.len() - self.pos);
        let text = &self.src[self.pos..self.pos + len];
        let well_formed = text.chars().all(|c| c.is_ascii_digit() || c == '.')
            && text.matches('.').count() <= 1
            && text.chars().any(|c| c.is_ascii_digit());
        match text.parse::<f64>() {
            Ok(value) if well_formed => {
                self.pos += len;
                Ok((Tok::Num(value), start))
            }
            _ => Err(err(self.src, start, format!("malformed number `{text}`"))),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

/// Parses filter text into an AST.
///
/// Precedence from tightest: comparison, `not(..)`, `and`, `or`. A bare
/// path is an existence test.
pub fn parse_filter(text: &str) -> Result<FilterExpr, FilterSyntaxError> {
    let mut p = Parser {
        src: text,
        toks: Lexer::tokens(text)?,
        idx: 0,
    };
    let f = p.filter()?;
    match p.peek() {
        Tok::End => Ok(f),
        Tok::RParen => Err(p.error_here("unbalanced `)`")),
        Tok::RBracket => Err(p.error_here("unbalanced `]`")),
        other => Err(p.error_here(format!("unexpected {}", other.describe()))),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.idx + ahead).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        tok
    }

    fn error_here(&self, message: impl Into<String>) -> FilterSyntaxError {
        err(self.src, self.toks[self.idx].1, message)
    }

    fn expect(&mut self, tok: Tok, context: &str) -> Result<(), FilterSyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::End {
            Err(self.error_here(format!("missing {} {context}", tok.describe())))
        } else {
            Err(self.error_here(format!(
                "expected {} {context}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn filter(&mut self) -> Result<FilterExpr, FilterSyntaxError> {
        let mut lhs = self.and()?;
        while self.is_keyword("or") {
            self.bump();
            let rhs = self.and()?;
            lhs = FilterExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<FilterExpr, FilterSyntaxError> {
        let mut lhs = self.not()?;
        while self.is_keyword("and") {
            self.bump();
            let rhs = self.not()?;
            lhs = FilterExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<FilterExpr, FilterSyntaxError> {
        if self.is_keyword("not") && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let inner = self.filter()?;
            self.expect(Tok::RParen, "to close `not(`")?;
            return Ok(FilterExpr::not(inner));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<FilterExpr, FilterSyntaxError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.filter()?;
            self.expect(Tok::RParen, "to close `(`")?;
            return Ok(inner);
        }
        let lhs = self.operand()?;
        if let Tok::Cmp(op) = *self.peek() {
            self.bump();
            let rhs = self.operand()?;
            return Ok(FilterExpr::Comparison(lhs, op, rhs));
        }
        Ok(match lhs {
            Operand::Path(p) => FilterExpr::Exists(p),
            Operand::Contains(p, s) => FilterExpr::Contains(p, s),
            other => FilterExpr::Value(other),
        })
    }

    fn operand(&mut self) -> Result<Operand, FilterSyntaxError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Operand::String(s))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Operand::Number(n))
            }
            Tok::Name(n) if n == "count" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let path = self.path()?;
                self.expect(Tok::RParen, "to close `count(`")?;
                Ok(Operand::Count(path))
            }
            Tok::Name(n) if n == "contains" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let path = self.path()?;
                self.expect(Tok::Comma, "in `contains(path, string)`")?;
                let needle = match self.bump() {
                    Tok::Str(s) => s,
                    _ => {
                        self.idx -= 1;
                        return Err(self.error_here("`contains` expects a string literal as its second argument"));
                    }
                };
                self.expect(Tok::RParen, "to close `contains(`")?;
                Ok(Operand::Contains(path, needle))
            }
            Tok::End => Err(self.error_here("unexpected end of filter")),
            _ => Ok(Operand::Path(self.path()?)),
        }
    }

    fn path(&mut self) -> Result<LocationPath, FilterSyntaxError> {
        let mut steps = Vec::new();
        let absolute = match self.peek() {
            Tok::DoubleSlash => {
                self.bump();
                steps.push(Step::new(Axis::DescendantOrSelf, NodeTest::AnyNode));
                true
            }
            Tok::Slash => {
                self.bump();
                true
            }
            _ => false,
        };
        steps.push(self.step()?);
        loop {
            match self.peek() {
                Tok::Slash => {
                    self.bump();
                }
                Tok::DoubleSlash => {
                    self.bump();
                    steps.push(Step::new(Axis::DescendantOrSelf, NodeTest::AnyNode));
                }
                _ => return Ok(LocationPath { absolute, steps }),
            }
            steps.push(self.step()?);
        }
    }

    fn step(&mut self) -> Result<Step, FilterSyntaxError> {
        match self.peek().clone() {
            Tok::Dot => {
                self.bump();
                return Ok(Step::new(Axis::SelfAxis, NodeTest::AnyNode));
            }
            Tok::DotDot => {
                self.bump();
                return Ok(Step::new(Axis::Parent, NodeTest::AnyNode));
            }
            Tok::At => {
                self.bump();
                let test = match self.bump() {
                    Tok::Name(n) => NodeTest::Name(n),
                    Tok::Star => NodeTest::AnyElement,
                    _ => {
                        self.idx -= 1;
                        return Err(self.error_here("expected an attribute name after `@`"));
                    }
                };
                return Ok(Step::new(Axis::Attribute, test));
            }
            _ => {}
        }
        let axis = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Name(name), Tok::ColonColon) => match Axis::from_name(&name) {
                Some(axis) => {
                    self.bump();
                    self.bump();
                    axis
                }
                None => return Err(self.error_here(format!("unknown axis `{name}`"))),
            },
            _ => Axis::Child,
        };
        let test = self.node_test()?;
        let mut step = Step::new(axis, test);
        while *self.peek() == Tok::LBracket {
            self.bump();
            step.predicates.push(self.filter()?);
            self.expect(Tok::RBracket, "to close predicate")?;
        }
        Ok(step)
    }

    fn node_test(&mut self) -> Result<NodeTest, FilterSyntaxError> {
        match self.peek().clone() {
            Tok::Star => {
                self.bump();
                Ok(NodeTest::AnyElement)
            }
            Tok::Name(n) if (n == "text" || n == "node") && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                self.expect(Tok::RParen, &format!("after `{n}(`"))?;
                Ok(if n == "text" {
                    NodeTest::TextNodes
                } else {
                    NodeTest::AnyNode
                })
            }
            Tok::Name(n) => {
                self.bump();
                Ok(NodeTest::Name(n))
            }
            Tok::RBracket => Err(self.error_here("unbalanced `]`")),
            Tok::RParen => Err(self.error_here("unbalanced `)`")),
            other => Err(self.error_here(format!("expected a location step, found {}", other.describe()))),
        }
    }
}
