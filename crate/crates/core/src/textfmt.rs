//! Helpers for the line-oriented `key=value` text formats used by model files.
//!
//! A record line is a leading tag followed by space-separated `key=value`
//! fields. Values that may contain spaces (feature and class names) are
//! written as JSON string literals.

use crate::error::{Error, Result};

pub fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

pub fn float(v: f64) -> String {
    format!("{v:?}")
}

pub fn float_list(values: &[f64]) -> String {
    values.iter().map(|v| float(*v)).collect::<Vec<_>>().join(",")
}

/// A parsed record line: tag plus ordered fields.
#[derive(Debug)]
pub struct Record {
    pub tag: String,
    pub fields: Vec<(String, String)>,
    pub line: usize,
}

impl Record {
    pub fn parse(text: &str, line: usize) -> Result<Record> {
        let text = text.trim();
        let (tag, mut rest) = match text.find(' ') {
            Some(i) => (&text[..i], text[i + 1..].trim_start()),
            None => (text, ""),
        };
        let mut fields = Vec::new();
        while !rest.is_empty() {
            let eq = rest
                .find('=')
                .ok_or_else(|| bad(line, format!("expected key=value in {rest:?}")))?;
            let key = rest[..eq].to_string();
            let after = &rest[eq + 1..];
            let (value, remaining) = if after.starts_with('"') {
                let end = closing_quote(after).ok_or_else(|| bad(line, "unterminated string"))?;
                let literal = &after[..=end];
                let value: String = serde_json::from_str(literal)
                    .map_err(|e| bad(line, format!("bad string literal: {e}")))?;
                (value, &after[end + 1..])
            } else {
                match after.find(' ') {
                    Some(i) => (after[..i].to_string(), &after[i..]),
                    None => (after.to_string(), ""),
                }
            };
            fields.push((key, value));
            rest = remaining.trim_start();
        }
        Ok(Record {
            tag: tag.to_string(),
            fields,
            line,
        })
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| bad(self.line, format!("missing field `{key}` on `{}`", self.tag)))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.parse()
            .map_err(|_| bad(self.line, format!("field `{key}`: {v:?} is not a count")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(self.get(key)?, self.line)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.get(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',').map(|s| parse_f64(s, self.line)).collect()
    }

    pub fn expect_tag(&self, tag: &str) -> Result<()> {
        if self.tag != tag {
            return Err(bad(
                self.line,
                format!("expected `{tag}` record, found `{}`", self.tag),
            ));
        }
        Ok(())
    }
}

fn closing_quote(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut i = 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return Some(i),
            _ => i += 1,
        }
    }
    None
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| bad(line, format!("{s:?} is not a number")))
}

pub fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("line {line}: {msg}"))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}
