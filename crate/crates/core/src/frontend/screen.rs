//! Screen-map definitions: one field per line,
//! `NAME ROW r COL c LEN n IN|OUT|INOUT`, `*` starts a comment line.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Input,
    Output,
    Both,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Input => "input",
            Direction::Output => "output",
            Direction::Both => "both",
        }
    }

    pub fn is_input(self) -> bool {
        self != Direction::Output
    }

    pub fn is_output(self) -> bool {
        self != Direction::Input
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenField {
    pub name: String,
    pub direction: Direction,
    pub row: u32,
    pub col: u32,
    pub length: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenMap {
    /// Map name as used in `EXEC CICS SEND/RECEIVE MAP('name')`.
    pub name: String,
    pub fields: Vec<ScreenField>,
}

pub fn parse_screen_map(text: &str) -> Result<Vec<ScreenField>> {
    let mut fields: Vec<ScreenField> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u32 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let err = |m: &str| Error::MapSyntax { line, message: m.to_string() };
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        if words.len() != 8 {
            return Err(err("expected NAME ROW r COL c LEN n IN|OUT|INOUT"));
        }
        let number = |kw: &str, at: usize| -> Result<u32> {
            if !words[at].eq_ignore_ascii_case(kw) {
                return Err(err(&format!("expected {kw}")));
            }
            match words[at + 1].parse::<u32>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(err(&format!("{kw} needs a positive integer"))),
            }
        };
        let row = number("ROW", 1)?;
        let col = number("COL", 3)?;
        let length = number("LEN", 5)?;
        let direction = match words[7].to_ascii_uppercase().as_str() {
            "IN" => Direction::Input,
            "OUT" => Direction::Output,
            "INOUT" => Direction::Both,
            other => return Err(err(&format!("unknown direction {other}"))),
        };
        let name = words[0].to_ascii_uppercase();
        if fields.iter().any(|f| f.name == name) {
            return Err(err(&format!("duplicate field {name}")));
        }
        fields.push(ScreenField { name, direction, row, col, length });
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_input_field() {
        let f = parse_screen_map("ENP1CNO ROW 4 COL 10 LEN 10 IN\n").unwrap();
        assert_eq!(f, vec![ScreenField { name: "ENP1CNO".into(), direction: Direction::Input, row: 4, col: 10, length: 10 }]);
    }

    #[test]
    fn directions_and_comments() {
        let f = parse_screen_map("* header\nA ROW 1 COL 1 LEN 2 IN\nB ROW 2 COL 1 LEN 2 OUT\nC ROW 3 COL 1 LEN 2 INOUT\n").unwrap();
        let d: Vec<Direction> = f.iter().map(|f| f.direction).collect();
        assert_eq!(d, vec![Direction::Input, Direction::Output, Direction::Both]);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let e = parse_screen_map("A ROW 1 COL 1 LEN 2 IN\nB ROW x COL 1 LEN 2 IN\n").unwrap_err();
        assert!(matches!(e, Error::MapSyntax { line: 2, .. }));
        assert!(matches!(parse_screen_map("A ROW 1 COL 1 LEN 2 SIDEWAYS"), Err(Error::MapSyntax { line: 1, .. })));
    }
}
