//! Helpers for the whitespace-separated text formats used by dataset,
//! embedding, and model files.
//!
//! Free-form string fields (raw identifiers, type labels) are
//! percent-escaped so that a field never contains whitespace.

use crate::error::{PebgError, Result};

/// Escape `%` and whitespace so the field is a single token.
pub fn escape_field(s: &str) -> String {
    if s.is_empty() {
        return "%00".to_string();
    }
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'%' | b' ' | b'\t' | b'\r' | b'\n' => {
                out.push('%');
                out.push_str(&format!("{b:02X}"));
            }
            _ => out.push(b as char),
        }
    }
    out
}

/// Inverse of [`escape_field`].
pub fn unescape_field(s: &str) -> Result<String> {
    if s == "%00" {
        return Ok(String::new());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .ok_or_else(|| bad_escape(s))
                .and_then(|h| {
                    std::str::from_utf8(h)
                        .ok()
                        .and_then(|h| u8::from_str_radix(h, 16).ok())
                        .ok_or_else(|| bad_escape(s))
                })?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| bad_escape(s))
}

fn bad_escape(s: &str) -> PebgError {
    PebgError::Format {
        path: "<field>".to_string(),
        msg: format!("invalid escape in field '{s}'"),
    }
}

/// Token cursor over a text artifact, tracking position for error messages.
pub struct TokenReader<'a> {
    tokens: std::str::SplitWhitespace<'a>,
    path: String,
    consumed: usize,
}

impl<'a> TokenReader<'a> {
    pub fn new(content: &'a str, path: &str) -> Self {
        TokenReader {
            tokens: content.split_whitespace(),
            path: path.to_string(),
            consumed: 0,
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> PebgError {
        PebgError::Format {
            path: self.path.clone(),
            msg: format!("{} (near token {})", msg.into(), self.consumed),
        }
    }

    pub fn next_token(&mut self) -> Result<&'a str> {
        self.consumed += 1;
        self.tokens
            .next()
            .ok_or_else(|| self.shared_eof())
    }

    fn shared_eof(&self) -> PebgError {
        PebgError::Format {
            path: self.path.clone(),
            msg: format!("unexpected end of file after {} tokens", self.consumed),
        }
    }

    /// Consume a token and require it to equal `expected`.
    pub fn expect(&mut self, expected: &str) -> Result<()> {
        let tok = self.next_token()?;
        if tok != expected {
            return Err(self.err(format!("expected '{expected}', found '{tok}'")));
        }
        Ok(())
    }

    pub fn next_usize(&mut self) -> Result<usize> {
        let tok = self.next_token()?;
        tok.parse()
            .map_err(|_| self.err(format!("expected integer, found '{tok}'")))
    }

    pub fn next_u32(&mut self) -> Result<u32> {
        let tok = self.next_token()?;
        tok.parse()
            .map_err(|_| self.err(format!("expected integer, found '{tok}'")))
    }

    pub fn next_u64(&mut self) -> Result<u64> {
        let tok = self.next_token()?;
        tok.parse()
            .map_err(|_| self.err(format!("expected integer, found '{tok}'")))
    }

    pub fn next_f64(&mut self) -> Result<f64> {
        let tok = self.next_token()?;
        tok.parse()
            .map_err(|_| self.err(format!("expected float, found '{tok}'")))
    }

    pub fn next_field(&mut self) -> Result<String> {
        let tok = self.next_token()?;
        unescape_field(tok)
    }

    /// True when all tokens are consumed.
    pub fn at_end(&mut self) -> bool {
        self.tokens.clone().next().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escape_round_trip() {
        for s in ["plain", "with space", "tab\there", "100%", "", "a%20b"] {
            let esc = escape_field(s);
            assert!(!esc.contains(char::is_whitespace), "escaped: {esc}");
            assert_eq!(unescape_field(&esc).unwrap(), s);
        }
    }

    #[test]
    fn reader_reports_position() {
        let mut r = TokenReader::new("a b", "x.txt");
        r.next_token().unwrap();
        r.next_token().unwrap();
        let err = r.next_token().unwrap_err();
        assert!(err.to_string().contains("x.txt"));
    }
}
