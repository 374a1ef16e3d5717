//! A small byte cursor shared by every textual grammar in the crate.
//!
//! Whitespace is insignificant everywhere, so every primitive skips it
//! before looking at the next token.

use crate::error::{Error, Result};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Consumes `token` if the input continues with it.
    pub(crate) fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("'{token}'")))
        }
    }

    #[allow(dead_code)]
    pub(crate) fn looking_at(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(token)
    }

    /// A run of ASCII digits, returned verbatim.
    pub(crate) fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("a decimal number"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub(crate) fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        let text = self.digits()?;
        text.parse().map_err(|_| Error::Parse {
            pos: start,
            expected: "a number that fits in 64 bits".into(),
            found: text.into(),
        })
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    pub(crate) fn error(&mut self, expected: impl Into<String>) -> Error {
        self.skip_ws();
        let found = match self.rest().chars().next() {
            None => "end of input".to_string(),
            Some(_) => {
                let snippet: String = self.rest().chars().take(12).collect();
                format!("'{snippet}'")
            }
        };
        Error::Parse {
            pos: self.pos,
            expected: expected.into(),
            found,
        }
    }
}

/// Runs `f` over the whole of `src`, requiring that it consumes everything.
pub(crate) fn parse_all<T>(src: &str, f: impl FnOnce(&mut Cursor<'_>) -> Result<T>) -> Result<T> {
    let mut cur = Cursor::new(src);
    let value = f(&mut cur)?;
    cur.finish()?;
    Ok(value)
}
