use crate::error::{Error, Result};
use crate::multiset::Symbol;
use crate::semiring::Literal;

use super::Regex;

/// Parse the concrete syntax described in the module docs.
pub fn parse(text: &str) -> Result<Regex> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let r = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Regex> {
        let mut r = self.concat()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            r = Regex::union(r, self.concat()?);
        }
        Ok(r)
    }

    fn starts_prefix(c: u8) -> bool {
        c.is_ascii_alphabetic() || matches!(c, b'&' | b'0' | b'(' | b'[' | b'\\')
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut r = self.prefix()?;
        while let Some(c) = self.peek() {
            if !Self::starts_prefix(c) {
                break;
            }
            r = Regex::product(r, self.prefix()?);
        }
        Ok(r)
    }

    fn prefix(&mut self) -> Result<Regex> {
        if self.peek() == Some(b'[') {
            let start = self.pos;
            self.pos += 1;
            let close = self.src[self.pos..]
                .iter()
                .position(|&b| b == b']')
                .ok_or_else(|| Error::Syntax {
                    offset: start,
                    message: "unterminated weight".into(),
                })?;
            let raw = std::str::from_utf8(&self.src[self.pos..self.pos + close])
                .map_err(|_| self.error("weight is not UTF-8"))?
                .trim();
            let k: Literal = raw.parse().map_err(|_| Error::Syntax {
                offset: start + 1,
                message: format!("malformed weight literal `{raw}`"),
            })?;
            self.pos += close + 1;
            return Ok(Regex::scale(k, self.prefix()?));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'&') => {
                self.pos += 1;
                Ok(Regex::Epsilon)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Regex::Empty)
            }
            Some(b'(') => {
                self.pos += 1;
                let r = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some(b'\\') => {
                let what = self.src.get(self.pos + 1).map_or("end".to_string(), |&c| (c as char).to_string());
                Err(self.error(format!("unknown escape `\\{what}`")))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = (c as char).to_string();
                self.pos += 1;
                if self.src.get(self.pos) == Some(&b'\'') {
                    name.push('\'');
                    self.pos += 1;
                }
                Ok(Regex::Symbol(Symbol::new(name)?))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }
}
