use super::{XplFormula, XplSyntaxError};
use crate::ctl::Formula;
use crate::xpath::parse_filter;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    /// Raw filter text between the brackets, and the offset of its first char.
    Filter(String, usize),
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Bang,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, XplSyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '!' => Tok::Bang,
            '[' => {
                // Find the matching bracket, skipping quoted strings.
                let mut depth = 1;
                let mut j = i + 1;
                let mut quote: Option<char> = None;
                while j < chars.len() {
                    let d = chars[j];
                    match quote {
                        Some(q) if d == q => quote = None,
                        Some(_) => {}
                        None => match d {
                            '"' | '\'' => quote = Some(d),
                            '[' => depth += 1,
                            ']' => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        },
                    }
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(XplSyntaxError {
                        offset: start,
                        message: "unterminated filter: missing `]`".into(),
                    });
                }
                let body: String = chars[i + 1..j].iter().collect();
                i = j + 1;
                out.push((Tok::Filter(body, start + 1), start));
                continue;
            }
            ']' => {
                return Err(XplSyntaxError {
                    offset: start,
                    message: "unbalanced `]`".into(),
                })
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j;
                out.push((Tok::Word(word), start));
                continue;
            }
            other => {
                return Err(XplSyntaxError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

/// Parses the combined language: CTL operators over bracketed filters.
///
/// ```text
/// EU([count(paper) > 100], [(first = "Paul") and (last = "Erdos")])
/// EX [name = "ATP"] | EX EX [name = "ATP"]
/// ```
pub fn parse_xpl(text: &str) -> Result<XplFormula, XplSyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        idx: 0,
    };
    let f = p.or()?;
    match p.peek() {
        Tok::End => Ok(f),
        Tok::RParen => Err(p.error("unbalanced `)`")),
        _ => Err(p.error("expected `&`, `|` or end of formula")),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> XplSyntaxError {
        XplSyntaxError {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), XplSyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn or(&mut self) -> Result<XplFormula, XplSyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<XplFormula, XplSyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<XplFormula, XplSyntaxError> {
        let at = self.offset();
        match self.bump() {
            Tok::Bang => Ok(Formula::not(self.unary()?)),
            Tok::LParen => {
                let inner = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Filter(body, body_offset) => parse_filter(&body).map(Formula::Atom).map_err(|e| XplSyntaxError {
                offset: body_offset + e.offset,
                message: format!("in filter opened at offset {}: {}", body_offset - 1, e.message),
            }),
            Tok::Word(w) => self.keyword(&w, at),
            Tok::End => Err(XplSyntaxError {
                offset: at,
                message: "unexpected end of formula".into(),
            }),
            other => Err(XplSyntaxError {
                offset: at,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn keyword(&mut self, word: &str, at: usize) -> Result<XplFormula, XplSyntaxError> {
        type Unary = fn(XplFormula) -> XplFormula;
        type Binary = fn(XplFormula, XplFormula) -> XplFormula;
        let unary: Option<Unary> = match word {
            "EX" => Some(Formula::ex),
            "AX" => Some(Formula::ax),
            "EF" => Some(Formula::ef),
            "AF" => Some(Formula::af),
            "EG" => Some(Formula::eg),
            "AG" => Some(Formula::ag),
            "IEX" => Some(Formula::iex),
            "IAX" => Some(Formula::iax),
            "IEF" => Some(Formula::ief),
            "IAF" => Some(Formula::iaf),
            "IEG" => Some(Formula::ieg),
            "IAG" => Some(Formula::iag),
            _ => None,
        };
        if let Some(build) = unary {
            return Ok(build(self.unary()?));
        }
        let binary: Option<Binary> = match word {
            "EU" => Some(Formula::eu),
            "AU" => Some(Formula::au),
            "IEU" => Some(Formula::ieu),
            "IAU" => Some(Formula::iau),
            _ => None,
        };
        if let Some(build) = binary {
            self.expect(Tok::LParen, &format!("`(` after `{word}`"))?;
            let a = self.or()?;
            self.expect(Tok::Comma, &format!("`,` between the arguments of `{word}`"))?;
            let b = self.or()?;
            self.expect(Tok::RParen, &format!("`)` closing `{word}(`"))?;
            return Ok(build(a, b));
        }
        match word {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ => Err(XplSyntaxError {
                offset: at,
                message: format!("unknown keyword `{word}` (filters must be enclosed in `[...]`)"),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Word(_) => "keyword",
        Tok::Filter(..) => "filter",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Comma => "`,`",
        Tok::Amp => "`&`",
        Tok::Bar => "`|`",
        Tok::Bang => "`!`",
        Tok::End => "end of formula",
    }
}
