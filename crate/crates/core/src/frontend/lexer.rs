//! Free-format MiniCOBOL tokenizer.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Upper-cased COBOL word (identifiers, verbs, keywords).
    Word(String),
    /// Alphanumeric literal, quotes stripped.
    Str(String),
    /// Unsigned numeric literal.
    Num(String),
    /// Raw picture string following `PIC`/`PICTURE`.
    Pic(String),
    /// Separator period (followed by whitespace or end of input).
    Period,
    /// A period embedded in a word sequence, e.g. `T.COL` inside SQL.
    Dot,
    LParen,
    RParen,
    Colon,
    /// A colon glued to the preceding word, e.g. the second colon of
    /// `:HOST:IND` (SQL indicator variable).
    GluedColon,
    Op(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
}

impl Token {
    pub fn word(&self) -> Option<&str> {
        match &self.tok {
            Tok::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_word(&self, w: &str) -> bool {
        self.word() == Some(w)
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out: Vec<Token> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u32 + 1;
        lex_line(raw, line, &mut out)?;
    }
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn lex_line(raw: &str, line: u32, out: &mut Vec<Token>) -> Result<()> {
    if raw.trim_start().starts_with('*') {
        return Ok(());
    }
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line });
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' || c == ';' {
            i += 1;
            continue;
        }
        if c == '*' && chars.get(i + 1) == Some(&'>') {
            break;
        }
        // Picture strings are lexed raw.
        let after_pic = matches!(out.last(), Some(t) if (t.is_word("PIC") || t.is_word("PICTURE")))
            || (matches!(out.last(), Some(t) if t.is_word("IS"))
                && out.len() >= 2
                && (out[out.len() - 2].is_word("PIC") || out[out.len() - 2].is_word("PICTURE")));
        if after_pic && !(c == 'I' && chars.get(i + 1) == Some(&'S') && chars.get(i + 2).is_none_or(|c| c.is_whitespace())) {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            let mut pic: String = chars[start..i].iter().collect();
            let mut period = false;
            if pic.ends_with('.') {
                pic.pop();
                period = true;
            }
            push(out, Tok::Pic(pic.to_ascii_uppercase()));
            if period {
                push(out, Tok::Period);
            }
            continue;
        }
        match c {
            '\'' | '"' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(Error::syntax(line, "unterminated literal")),
                        Some(&ch) if ch == quote => {
                            if chars.get(i + 1) == Some(&quote) {
                                s.push(quote);
                                i += 2;
                            } else {
                                i += 1;
                                break;
                            }
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                push(out, Tok::Str(s));
            }
            '.' => {
                let terminal = chars.get(i + 1).is_none_or(|c| c.is_whitespace());
                push(out, if terminal { Tok::Period } else { Tok::Dot });
                i += 1;
            }
            '(' => {
                push(out, Tok::LParen);
                i += 1;
            }
            ')' => {
                push(out, Tok::RParen);
                i += 1;
            }
            ':' => {
                let glued = i > 0 && is_word_char(chars[i - 1]);
                push(out, if glued { Tok::GluedColon } else { Tok::Colon });
                i += 1;
            }
            '>' | '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(out, Tok::Op(alloc::format!("{c}=")));
                    i += 2;
                } else {
                    push(out, Tok::Op(c.to_string()));
                    i += 1;
                }
            }
            '*' if chars.get(i + 1) == Some(&'*') => {
                push(out, Tok::Op("**".to_string()));
                i += 2;
            }
            '=' | '+' | '-' | '*' | '/' => {
                push(out, Tok::Op(c.to_string()));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                // decimal point followed by a digit belongs to the number
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let s = s.to_ascii_uppercase();
                if s.chars().all(|d| d.is_ascii_digit() || d == '.') {
                    push(out, Tok::Num(s));
                } else {
                    push(out, Tok::Word(s));
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                push(out, Tok::Word(s.to_ascii_uppercase()));
            }
            other => {
                return Err(Error::syntax(line, alloc::format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(())
}

/// Renders tokens back to source text; `tokenize(render(t))` yields `t`
/// modulo line numbers.
pub fn render(tokens: &[Token]) -> String {
    let mut s = String::new();
    let mut glue = false;
    for t in tokens {
        let piece = match &t.tok {
            Tok::Word(w) | Tok::Num(w) | Tok::Pic(w) | Tok::Op(w) => w.clone(),
            Tok::Str(v) => alloc::format!("'{}'", v.replace('\'', "''")),
            Tok::Period => ".".to_string(),
            Tok::Dot => {
                s.push('.');
                glue = true;
                continue;
            }
            Tok::LParen => "(".to_string(),
            Tok::RParen => ")".to_string(),
            Tok::GluedColon => {
                s.push(':');
                glue = true;
                continue;
            }
            Tok::Colon => {
                if !s.is_empty() && !glue {
                    s.push(' ');
                }
                s.push(':');
                glue = true;
                continue;
            }
        };
        if !s.is_empty() && !glue {
            s.push(' ');
        }
        glue = false;
        s.push_str(&piece);
    }
    s
}
