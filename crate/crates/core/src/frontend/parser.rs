//! Recursive-descent parser for MiniCOBOL programs and copybooks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::data::{layout, DataDictionary, ItemId, Picture, RawEntry, Section, Usage};
use super::lexer::{render, tokenize, Tok, Token};
use super::screen::{Direction, ScreenMap};
use crate::{Error, Result};

const MAX_COPY_DEPTH: usize = 8;

const SQLCA_TEXT: &str = "01 SQLCA.\n   05 SQLCODE PIC S9(9) COMP.\n   05 SQLSTATE PIC X(5).\n";

/// Source of copybook text, looked up by upper-cased COPY operand.
pub trait CopybookResolver {
    fn resolve(&self, name: &str) -> Option<String>;
}

impl<F: Fn(&str) -> Option<String>> CopybookResolver for F {
    fn resolve(&self, name: &str) -> Option<String> {
        self(name)
    }
}

impl CopybookResolver for BTreeMap<String, String> {
    fn resolve(&self, name: &str) -> Option<String> {
        self.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.clone())
    }
}

/// Resolver for sources that use no copybooks.
pub struct NoCopybooks;

impl CopybookResolver for NoCopybooks {
    fn resolve(&self, _name: &str) -> Option<String> {
        None
    }
}

pub fn parse_source(text: &str, copybooks: &dyn CopybookResolver) -> Result<SourceUnit> {
    parse_source_with_maps(text, copybooks, &[])
}

/// Parses a program; screen maps decide which symbolic-map fields CICS
/// RECEIVE/SEND MAP statements touch.
pub fn parse_source_with_maps(text: &str, copybooks: &dyn CopybookResolver, maps: &[ScreenMap]) -> Result<SourceUnit> {
    let mut used = Vec::new();
    let tokens = expand(tokenize(text)?, copybooks, &mut Vec::new(), &mut used)?;
    let mut p = Parser::new(tokens, maps);
    let mut unit = p.program()?;
    unit.copybooks_used = used;
    unit.source_lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i as u32 + 1, l.to_string()))
        .collect();
    Ok(unit)
}

/// Parses a bare copybook (data description entries only). Entries at the
/// shallowest level are treated as level 01.
pub fn parse_copybook(text: &str, copybooks: &dyn CopybookResolver) -> Result<DataDictionary> {
    let tokens = expand(tokenize(text)?, copybooks, &mut Vec::new(), &mut Vec::new())?;
    let mut p = Parser::new(tokens, &[]);
    let mut entries = Vec::new();
    while !p.at_end() {
        entries.push(p.data_entry(Section::WorkingStorage)?);
    }
    // a copybook meant for inclusion under a group starts at level 05 or
    // deeper; its shallowest entries become the roots
    if let Some(top) = entries.iter().map(|e| e.level).filter(|&l| l != 77 && l != 88).min() {
        for e in entries.iter_mut().filter(|e| e.level == top) {
            e.level = 1;
        }
    }
    layout(entries)
}

fn expand(tokens: Vec<Token>, books: &dyn CopybookResolver, stack: &mut Vec<String>, used: &mut Vec<String>) -> Result<Vec<Token>> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let (name, next) = if t.is_word("COPY") {
            let name = match tokens.get(i + 1).map(|t| &t.tok) {
                Some(Tok::Word(w)) | Some(Tok::Str(w)) => w.to_ascii_uppercase(),
                _ => return Err(Error::syntax(t.line, "COPY needs a copybook name")),
            };
            let mut next = i + 2;
            if tokens.get(next).map(|t| &t.tok) == Some(&Tok::Period) {
                next += 1;
            }
            (name, next)
        } else if t.is_word("EXEC")
            && tokens.get(i + 1).is_some_and(|t| t.is_word("SQL"))
            && tokens.get(i + 2).is_some_and(|t| t.is_word("INCLUDE"))
        {
            let name = tokens.get(i + 3).and_then(|t| t.word()).ok_or_else(|| Error::syntax(t.line, "INCLUDE needs a name"))?;
            if !tokens.get(i + 4).is_some_and(|t| t.is_word("END-EXEC")) {
                return Err(Error::syntax(t.line, "expected END-EXEC after INCLUDE"));
            }
            let mut next = i + 5;
            if tokens.get(next).map(|t| &t.tok) == Some(&Tok::Period) {
                next += 1;
            }
            (name.to_string(), next)
        } else {
            out.push(t.clone());
            i += 1;
            continue;
        };
        let line = t.line;
        if stack.contains(&name) {
            let mut chain = stack.join(" -> ");
            chain.push_str(" -> ");
            chain.push_str(&name);
            return Err(Error::CopybookNesting(format!("cycle {chain}")));
        }
        if stack.len() >= MAX_COPY_DEPTH {
            return Err(Error::CopybookNesting(format!("depth exceeds {MAX_COPY_DEPTH} at {name}")));
        }
        let text = if name == "SQLCA" {
            SQLCA_TEXT.to_string()
        } else {
            books.resolve(&name).ok_or_else(|| Error::MissingCopybook(name.clone()))?
        };
        if !used.contains(&name) {
            used.push(name.clone());
        }
        let mut inner = tokenize(&text)?;
        for tk in &mut inner {
            tk.line = line;
        }
        stack.push(name);
        let inner = expand(inner, books, stack, used)?;
        stack.pop();
        out.extend(inner);
        i = next;
    }
    Ok(out)
}

const VERBS: &[&str] = &[
    "MOVE", "ADD", "SUBTRACT", "MULTIPLY", "DIVIDE", "COMPUTE", "IF", "EVALUATE", "PERFORM", "GO", "CALL", "EXEC", "DISPLAY",
    "ACCEPT", "INITIALIZE", "GOBACK", "STOP", "EXIT", "CONTINUE", "SET", "READ", "WRITE", "REWRITE", "OPEN", "CLOSE", "NEXT",
];

const TERMINATORS: &[&str] = &[
    "ELSE", "END-IF", "WHEN", "END-EVALUATE", "END-PERFORM", "END-CALL", "END-READ", "END-WRITE", "END-REWRITE",
    "END-COMPUTE", "END-ADD", "END-SUBTRACT", "END-MULTIPLY", "END-DIVIDE", "THEN", "END-EXEC",
];

const KEYWORDS: &[&str] = &[
    "TO", "FROM", "BY", "INTO", "GIVING", "REMAINDER", "ROUNDED", "USING", "UNTIL", "VARYING", "TIMES", "THRU", "THROUGH",
    "AND", "OR", "NOT", "IS", "OF", "IN", "UPON", "WITH", "TEST", "BEFORE", "AFTER", "TRUE", "FALSE", "OTHER", "REFERENCE",
    "CONTENT", "VALUE", "EQUAL", "GREATER", "LESS", "THAN", "NUMERIC", "ALPHABETIC", "POSITIVE", "NEGATIVE", "UP", "DOWN",
    "KEY", "RECORD", "CORRESPONDING", "CORR", "ADVANCING", "NO", "FUNCTION", "RETURNING", "ALSO",
];

const FIGURATIVE: &[(&str, &str)] = &[
    ("ZERO", "ZERO"),
    ("ZEROS", "ZERO"),
    ("ZEROES", "ZERO"),
    ("SPACE", "SPACE"),
    ("SPACES", "SPACE"),
    ("HIGH-VALUE", "HIGH-VALUE"),
    ("HIGH-VALUES", "HIGH-VALUE"),
    ("LOW-VALUE", "LOW-VALUE"),
    ("LOW-VALUES", "LOW-VALUE"),
    ("QUOTE", "QUOTE"),
    ("QUOTES", "QUOTE"),
    ("NULL", "NULL"),
    ("NULLS", "NULL"),
];

fn figurative(w: &str) -> Option<&'static str> {
    FIGURATIVE.iter().find(|(k, _)| *k == w).map(|(_, v)| *v)
}

fn is_reserved(w: &str) -> bool {
    VERBS.contains(&w) || TERMINATORS.contains(&w) || KEYWORDS.contains(&w) || figurative(w).is_some()
}

/// Accumulates the read/write effect of one statement.
#[derive(Default)]
struct Effects {
    reads: BTreeSet<ItemId>,
    writes: BTreeSet<ItemId>,
}

struct Parser<'m> {
    toks: Vec<Token>,
    pos: usize,
    maps: &'m [ScreenMap],
    data: DataDictionary,
    stmts: Vec<Option<Statement>>,
    paragraph: usize,
}

impl<'m> Parser<'m> {
    fn new(toks: Vec<Token>, maps: &'m [ScreenMap]) -> Self {
        Parser { toks, pos: 0, maps, data: DataDictionary::default(), stmts: Vec::new(), paragraph: 0 }
    }

    // ---- token helpers ----

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn peek_word(&self) -> Option<&str> {
        self.peek().and_then(|t| t.word())
    }

    fn line(&self) -> u32 {
        self.peek().or_else(|| self.toks.last()).map_or(0, |t| t.line)
    }

    fn prev_line(&self) -> u32 {
        self.toks.get(self.pos.saturating_sub(1)).map_or(0, |t| t.line)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_word(w)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {w}")))
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {what}")))
        }
    }

    fn unexpected(&self, msg: &str) -> Error {
        let found = match self.peek() {
            None => String::from("end of input"),
            Some(t) => render(core::slice::from_ref(t)),
        };
        Error::syntax(self.line(), format!("{msg}, found {found}"))
    }

    fn name(&mut self) -> Result<String> {
        match self.bump().map(|t| t.tok) {
            Some(Tok::Word(w)) | Some(Tok::Str(w)) => Ok(w.to_ascii_uppercase()),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("expected a name"))
            }
        }
    }

    fn text_from(&self, start: usize) -> String {
        render(&self.toks[start..self.pos])
    }

    // ---- program structure ----

    fn program(&mut self) -> Result<SourceUnit> {
        if !self.eat_word("IDENTIFICATION") && !self.eat_word("ID") {
            return Err(self.unexpected("expected IDENTIFICATION DIVISION"));
        }
        self.expect_word("DIVISION")?;
        self.expect(&Tok::Period, "'.'")?;
        self.expect_word("PROGRAM-ID")?;
        self.expect(&Tok::Period, "'.'")?;
        let program_id = self.name()?;
        self.eat(&Tok::Period);
        // skip AUTHOR etc. and the ENVIRONMENT DIVISION
        while !self.at_end() && !(self.peek_word().is_some_and(|w| w == "DATA" || w == "PROCEDURE") && self.peek_at(1).is_some_and(|t| t.is_word("DIVISION"))) {
            self.pos += 1;
        }
        let mut entries = Vec::new();
        if self.eat_word("DATA") {
            self.expect_word("DIVISION")?;
            self.expect(&Tok::Period, "'.'")?;
            loop {
                let section = match self.peek_word() {
                    Some("WORKING-STORAGE") => Section::WorkingStorage,
                    Some("LINKAGE") => Section::Linkage,
                    Some("PROCEDURE") => break,
                    _ => return Err(self.unexpected("expected WORKING-STORAGE or LINKAGE SECTION")),
                };
                self.pos += 1;
                self.expect_word("SECTION")?;
                self.expect(&Tok::Period, "'.'")?;
                while matches!(self.peek().map(|t| &t.tok), Some(Tok::Num(_))) {
                    entries.push(self.data_entry(section)?);
                }
            }
        }
        self.data = layout(entries)?;
        self.expect_word("PROCEDURE")?;
        self.expect_word("DIVISION")?;
        let mut using = Vec::new();
        if self.eat_word("USING") {
            while !self.eat(&Tok::Period) {
                if self.eat_word("BY") {
                    if !(self.eat_word("REFERENCE") || self.eat_word("VALUE")) {
                        return Err(self.unexpected("expected REFERENCE or VALUE"));
                    }
                    continue;
                }
                let line = self.line();
                let n = self.name()?;
                let id = self.data.resolve(&n, &[], line)?;
                if self.data.get(id).section != Section::Linkage {
                    return Err(Error::syntax(line, format!("USING parameter {n} is not in the LINKAGE SECTION")));
                }
                using.push(id);
            }
        } else {
            self.expect(&Tok::Period, "'.'")?;
        }
        let paragraphs = self.procedure()?;
        let statements: Vec<Statement> = core::mem::take(&mut self.stmts).into_iter().map(|s| s.expect("statement filled")).collect();
        Ok(SourceUnit {
            program_id,
            data: core::mem::take(&mut self.data),
            using,
            paragraphs,
            statements,
            copybooks_used: Vec::new(),
            source_lines: Vec::new(),
        })
    }

    fn literal(&mut self) -> Result<Literal> {
        let neg = if matches!(self.peek().map(|t| &t.tok), Some(Tok::Op(o)) if o == "-" || o == "+")
            && matches!(self.peek_at(1).map(|t| &t.tok), Some(Tok::Num(_)))
        {
            let t = self.bump().unwrap();
            matches!(t.tok, Tok::Op(ref o) if o == "-")
        } else {
            false
        };
        match self.bump().map(|t| t.tok) {
            Some(Tok::Str(s)) => Ok(Literal::Str(s)),
            Some(Tok::Num(n)) => Ok(Literal::Num(if neg { format!("-{n}") } else { n })),
            Some(Tok::Word(w)) if figurative(&w).is_some() => Ok(Literal::Figurative(figurative(&w).unwrap().to_string())),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("expected a literal"))
            }
        }
    }

    fn starts_literal(&self) -> bool {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Str(_)) | Some(Tok::Num(_)) => true,
            Some(Tok::Word(w)) => figurative(w).is_some(),
            Some(Tok::Op(o)) if o == "-" || o == "+" => matches!(self.peek_at(1).map(|t| &t.tok), Some(Tok::Num(_))),
            _ => false,
        }
    }

    fn data_entry(&mut self, section: Section) -> Result<RawEntry> {
        let line = self.line();
        let level: u8 = match self.bump().map(|t| t.tok) {
            Some(Tok::Num(n)) => n.parse().map_err(|_| Error::syntax(line, format!("bad level number {n}")))?,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("expected a level number"));
            }
        };
        if !(matches!(level, 1..=49 | 77 | 88)) {
            return Err(Error::syntax(line, format!("invalid level number {level}")));
        }
        let name = match self.peek().map(|t| &t.tok) {
            Some(Tok::Word(w)) if !matches!(w.as_str(), "PIC" | "PICTURE" | "OCCURS" | "REDEFINES" | "VALUE" | "VALUES" | "USAGE") => {
                let w = w.clone();
                self.pos += 1;
                w
            }
            Some(Tok::Period) | Some(Tok::Word(_)) => String::from("FILLER"),
            _ => return Err(self.unexpected("expected a data name")),
        };
        let mut e = RawEntry { line, level, name, picture: None, usage: Usage::Display, occurs: None, redefines: None, values: Vec::new(), section };
        loop {
            let Some(t) = self.bump() else {
                return Err(Error::syntax(line, "data entry not terminated by '.'"));
            };
            let w = match t.tok {
                Tok::Period => break,
                Tok::Word(w) => w,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("unexpected token in data entry"));
                }
            };
            match w.as_str() {
                "PIC" | "PICTURE" => {
                    self.eat_word("IS");
                    match self.bump().map(|t| t.tok) {
                        Some(Tok::Pic(p)) => e.picture = Some(Picture::parse(&p, line)?),
                        _ => return Err(Error::syntax(line, "expected a picture string")),
                    }
                }
                "OCCURS" => {
                    match self.bump().map(|t| t.tok) {
                        Some(Tok::Num(n)) => e.occurs = Some(n.parse().map_err(|_| Error::syntax(line, "bad OCCURS count"))?),
                        _ => return Err(Error::syntax(line, "expected OCCURS count")),
                    }
                    self.eat_word("TIMES");
                    if self.eat_word("INDEXED") {
                        self.eat_word("BY");
                        self.name()?;
                    }
                }
                "REDEFINES" => e.redefines = Some(self.name()?),
                "VALUE" | "VALUES" => {
                    let _ = self.eat_word("IS") || self.eat_word("ARE");
                    while self.starts_literal() {
                        e.values.push(self.literal()?);
                        if self.eat_word("THRU") || self.eat_word("THROUGH") {
                            e.values.push(self.literal()?);
                        }
                    }
                    if e.values.is_empty() {
                        return Err(Error::syntax(line, "VALUE needs a literal"));
                    }
                }
                "USAGE" => {
                    self.eat_word("IS");
                    let u = self.name()?;
                    e.usage = usage(&u).ok_or_else(|| Error::syntax(line, format!("unknown usage {u}")))?;
                }
                "SYNC" | "SYNCHRONIZED" | "JUST" | "JUSTIFIED" | "RIGHT" | "LEFT" => {}
                "SIGN" => {
                    self.eat_word("IS");
                    if !(self.eat_word("LEADING") || self.eat_word("TRAILING")) {
                        return Err(Error::syntax(line, "expected LEADING or TRAILING"));
                    }
                    if self.eat_word("SEPARATE") {
                        self.eat_word("CHARACTER");
                    }
                }
                other => match usage(other) {
                    Some(u) => e.usage = u,
                    None => return Err(Error::syntax(line, format!("unknown data clause {other}"))),
                },
            }
        }
        Ok(e)
    }

    fn is_paragraph_header(&self) -> bool {
        match (self.peek(), self.peek_at(1)) {
            (Some(a), Some(b)) => match (&a.tok, &b.tok) {
                (Tok::Word(w), Tok::Period) => !VERBS.contains(&w.as_str()) && !TERMINATORS.contains(&w.as_str()),
                (Tok::Word(_), Tok::Word(s)) => s == "SECTION" && self.peek_at(2).is_some_and(|t| t.tok == Tok::Period),
                (Tok::Num(_), Tok::Period) => true,
                _ => false,
            },
            _ => false,
        }
    }

    fn procedure(&mut self) -> Result<Vec<Paragraph>> {
        let mut paragraphs: Vec<Paragraph> = Vec::new();
        loop {
            if self.at_end() {
                break;
            }
            if self.peek().is_some_and(|t| t.is_word("END")) && self.peek_at(1).is_some_and(|t| t.is_word("PROGRAM")) {
                self.pos += 2;
                self.name()?;
                self.eat(&Tok::Period);
                if !self.at_end() {
                    return Err(self.unexpected("one program per source file"));
                }
                break;
            }
            if self.is_paragraph_header() {
                let line = self.line();
                let name = self.name()?;
                self.eat_word("SECTION");
                self.pos += 1;
                if paragraphs.iter().any(|p| p.name == name) {
                    return Err(Error::DuplicateParagraph(name));
                }
                self.paragraph = paragraphs.len();
                paragraphs.push(Paragraph { name, line, body: Vec::new(), first: StmtId(self.stmts.len() as u32), len: 0 });
                continue;
            }
            if self.eat(&Tok::Period) {
                continue;
            }
            let Some(para) = paragraphs.last_mut() else {
                return Err(self.unexpected("expected a paragraph name"));
            };
            let _ = para;
            let id = self.statement()?;
            let count = self.stmts.len() as u32;
            let para = paragraphs.last_mut().unwrap();
            para.body.push(id);
            para.len = count - para.first.0;
        }
        Ok(paragraphs)
    }

    // ---- statements ----

    fn is_block_end(&self) -> bool {
        match self.peek() {
            None => true,
            Some(t) => match &t.tok {
                Tok::Period => true,
                Tok::Word(w) => TERMINATORS.contains(&w.as_str()),
                _ => false,
            },
        }
    }

    fn block(&mut self) -> Result<Vec<StmtId>> {
        let mut v = Vec::new();
        while !self.is_block_end() {
            v.push(self.statement()?);
        }
        Ok(v)
    }

    fn alloc(&mut self) -> StmtId {
        self.stmts.push(None);
        StmtId(self.stmts.len() as u32 - 1)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(&mut self, id: StmtId, line: u32, kind: StmtKind, fx: Effects, form: Form, text: String) -> StmtId {
        let end_line = self.prev_line().max(line);
        self.stmts[id.index()] = Some(Statement {
            id,
            line,
            end_line,
            kind,
            reads: fx.reads,
            writes: fx.writes,
            call_target: None,
            dynamic_call: false,
            call_arguments: Vec::new(),
            form,
            sql: None,
            map_name: None,
            rewrite: false,
            paragraph: self.paragraph,
            text,
        });
        id
    }

    fn stmt_mut(&mut self, id: StmtId) -> &mut Statement {
        self.stmts[id.index()].as_mut().unwrap()
    }

    fn read(&self, fx: &mut Effects, id: ItemId) {
        let id = self.data.storage_item(id);
        fx.reads.extend(self.data.read_closure(id));
    }

    fn write(&self, fx: &mut Effects, id: ItemId) {
        let id = self.data.storage_item(id);
        fx.writes.extend(self.data.closure(id));
    }

    fn starts_identifier(&self) -> bool {
        matches!(self.peek().map(|t| &t.tok), Some(Tok::Word(w)) if !is_reserved(w))
    }

    /// identifier [OF|IN qualifier]... [(subscripts | refmod)]
    fn identifier(&mut self, fx: &mut Effects) -> Result<ItemId> {
        let line = self.line();
        let name = match self.bump().map(|t| t.tok) {
            Some(Tok::Word(w)) if !is_reserved(&w) => w,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("expected an identifier"));
            }
        };
        let mut quals = Vec::new();
        while self.peek().is_some_and(|t| t.is_word("OF") || t.is_word("IN")) {
            self.pos += 1;
            quals.push(self.name()?);
        }
        let id = self.data.resolve(&name, &quals, line)?;
        if self.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
            self.subscript(fx)?;
        }
        Ok(id)
    }

    fn subscript(&mut self, fx: &mut Effects) -> Result<()> {
        self.expect(&Tok::LParen, "'('")?;
        let mut depth = 1;
        while depth > 0 {
            if self.starts_identifier() {
                let id = self.identifier(fx)?;
                self.read(fx, id);
                continue;
            }
            match self.bump().map(|t| t.tok) {
                Some(Tok::LParen) => depth += 1,
                Some(Tok::RParen) => depth -= 1,
                Some(Tok::Period) | None => return Err(Error::syntax(self.prev_line(), "unbalanced parentheses")),
                _ => {}
            }
        }
        Ok(())
    }

    fn operand(&mut self, fx: &mut Effects) -> Result<Operand> {
        if self.starts_literal() {
            return Ok(Operand::Lit(self.literal()?));
        }
        if self.eat_word("FUNCTION") {
            self.name()?;
            if self.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
                self.subscript(fx)?;
            }
            return Ok(Operand::Opaque);
        }
        let id = self.identifier(fx)?;
        self.read(fx, id);
        Ok(Operand::Item(self.data.storage_item(id)))
    }

    fn targets(&mut self, fx: &mut Effects, read_too: bool) -> Result<Vec<ItemId>> {
        let mut v = Vec::new();
        while self.starts_identifier() || self.peek_word() == Some("ROUNDED") {
            if self.eat_word("ROUNDED") {
                continue;
            }
            let id = self.identifier(fx)?;
            if read_too {
                self.read(fx, id);
            }
            v.push(id);
        }
        if v.is_empty() {
            return Err(self.unexpected("expected a receiving identifier"));
        }
        Ok(v)
    }

    fn statement(&mut self) -> Result<StmtId> {
        let start = self.pos;
        let line = self.line();
        let verb = match self.peek().map(|t| &t.tok) {
            Some(Tok::Word(w)) => w.clone(),
            _ => return Err(self.unexpected("expected a statement")),
        };
        match verb.as_str() {
            "IF" => return self.if_stmt(),
            "EVALUATE" => return self.evaluate(),
            "PERFORM" => return self.perform(),
            "EXEC" => return self.exec(),
            _ => {}
        }
        self.pos += 1;
        let id = self.alloc();
        let mut fx = Effects::default();
        let mut form = Form::Simple;
        let kind = match verb.as_str() {
            "MOVE" => {
                let _ = self.eat_word("CORRESPONDING") || self.eat_word("CORR");
                let source = self.operand(&mut fx)?;
                self.expect_word("TO")?;
                let targets = self.targets(&mut fx, false)?;
                for &t in &targets {
                    self.write(&mut fx, t);
                }
                form = Form::Move { source, targets };
                StmtKind::Move
            }
            "ADD" | "SUBTRACT" | "MULTIPLY" | "DIVIDE" => {
                self.arithmetic(&verb, &mut fx)?;
                StmtKind::Arithmetic
            }
            "COMPUTE" => {
                let targets = self.targets(&mut fx, false)?;
                if !self.eat(&Tok::Op("=".into())) {
                    self.expect_word("EQUAL")?;
                }
                self.expression(&mut fx)?;
                for t in targets {
                    self.write(&mut fx, t);
                }
                self.eat_word("END-COMPUTE");
                StmtKind::Arithmetic
            }
            "GO" => {
                self.eat_word("TO");
                let target = self.name()?;
                form = Form::GoTo { target };
                StmtKind::GoTo
            }
            "CALL" => return self.call(id, start, line),
            "DISPLAY" => {
                while self.starts_identifier() || self.starts_literal() {
                    self.operand(&mut fx)?;
                }
                if self.eat_word("UPON") {
                    self.name()?;
                }
                if self.eat_word("WITH") {
                    self.expect_word("NO")?;
                    self.expect_word("ADVANCING")?;
                }
                StmtKind::Display
            }
            "ACCEPT" => {
                let t = self.identifier(&mut fx)?;
                self.write(&mut fx, t);
                if self.eat_word("FROM") {
                    self.name()?;
                }
                StmtKind::Accept
            }
            "INITIALIZE" => {
                for t in self.targets(&mut fx, false)? {
                    self.write(&mut fx, t);
                }
                StmtKind::Initialize
            }
            "GOBACK" => StmtKind::GoBack,
            "STOP" => {
                self.expect_word("RUN")?;
                StmtKind::StopRun
            }
            "EXIT" => {
                if self.eat_word("PROGRAM") {
                    StmtKind::GoBack
                } else {
                    let _ = self.eat_word("PARAGRAPH") || self.eat_word("SECTION");
                    StmtKind::Exit
                }
            }
            "CONTINUE" => StmtKind::Other,
            "NEXT" => {
                self.expect_word("SENTENCE")?;
                StmtKind::Other
            }
            "SET" => {
                let targets = self.targets(&mut fx, false)?;
                if self.eat_word("TO") {
                    if !(self.eat_word("TRUE") || self.eat_word("FALSE")) {
                        self.operand(&mut fx)?;
                    }
                    for t in targets {
                        self.write(&mut fx, t);
                    }
                } else if self.eat_word("UP") || self.eat_word("DOWN") {
                    self.expect_word("BY")?;
                    self.operand(&mut fx)?;
                    for t in targets {
                        self.read(&mut fx, t);
                        self.write(&mut fx, t);
                    }
                } else {
                    return Err(self.unexpected("expected TO, UP or DOWN"));
                }
                StmtKind::Other
            }
            "READ" => {
                self.name()?;
                self.eat_word("NEXT");
                self.eat_word("RECORD");
                if self.eat_word("INTO") {
                    let t = self.identifier(&mut fx)?;
                    self.write(&mut fx, t);
                }
                if self.eat_word("KEY") {
                    self.eat_word("IS");
                    let k = self.identifier(&mut fx)?;
                    self.read(&mut fx, k);
                }
                if matches!(self.peek_word(), Some("AT" | "INVALID")) {
                    return Err(self.unexpected("AT END / INVALID KEY clauses are not supported"));
                }
                self.eat_word("END-READ");
                StmtKind::FileRead
            }
            "WRITE" | "REWRITE" => {
                let rec = self.identifier(&mut fx)?;
                if self.eat_word("FROM") {
                    let src = self.identifier(&mut fx)?;
                    self.read(&mut fx, src);
                    self.write(&mut fx, rec);
                } else {
                    self.read(&mut fx, rec);
                }
                if matches!(self.peek_word(), Some("AT" | "INVALID")) {
                    return Err(self.unexpected("AT END / INVALID KEY clauses are not supported"));
                }
                let _ = self.eat_word("END-WRITE") || self.eat_word("END-REWRITE");
                let text = self.text_from(start);
                self.finish(id, line, StmtKind::FileWrite, fx, form, text);
                self.stmt_mut(id).rewrite = verb == "REWRITE";
                return Ok(id);
            }
            "OPEN" | "CLOSE" => {
                while matches!(self.peek().map(|t| &t.tok), Some(Tok::Word(w)) if !VERBS.contains(&w.as_str()) && !TERMINATORS.contains(&w.as_str())) {
                    self.pos += 1;
                }
                StmtKind::Other
            }
            other => {
                self.pos -= 1;
                return Err(Error::syntax(line, format!("unknown statement {other}")));
            }
        };
        let text = self.text_from(start);
        let goto_target = match &form {
            Form::GoTo { target } => Some(target.clone()),
            _ => None,
        };
        self.finish(id, line, kind, fx, form, text);
        self.stmt_mut(id).call_target = goto_target;
        Ok(id)
    }

    fn arithmetic(&mut self, verb: &str, fx: &mut Effects) -> Result<()> {
        let mut sources = 0;
        while self.starts_identifier() || self.starts_literal() {
            self.operand(fx)?;
            sources += 1;
        }
        if sources == 0 {
            return Err(self.unexpected("expected an operand"));
        }
        let connective = match verb {
            "ADD" => &["TO"][..],
            "SUBTRACT" => &["FROM"][..],
            "MULTIPLY" => &["BY"][..],
            _ => &["INTO", "BY"][..],
        };
        let mut receivers = Vec::new();
        if connective.iter().any(|c| self.eat_word(c)) {
            // these operands are both read and (absent GIVING) written
            receivers = self.targets(fx, true)?;
        }
        if self.eat_word("GIVING") {
            receivers = self.targets(fx, false)?;
        } else if receivers.is_empty() {
            return Err(self.unexpected("expected a receiving field"));
        }
        for r in receivers {
            self.write(fx, r);
        }
        if self.eat_word("REMAINDER") {
            let r = self.identifier(fx)?;
            self.write(fx, r);
        }
        if matches!(self.peek_word(), Some("ON" | "SIZE")) {
            return Err(self.unexpected("ON SIZE ERROR is not supported"));
        }
        let end = format!("END-{verb}");
        self.eat_word(&end);
        Ok(())
    }

    /// Arithmetic expression: records identifier reads.
    fn expression(&mut self, fx: &mut Effects) -> Result<()> {
        let mut any = false;
        loop {
            if self.starts_identifier() || self.starts_literal() || self.peek_word() == Some("FUNCTION") {
                self.operand(fx)?;
                any = true;
                continue;
            }
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Op(_)) | Some(Tok::LParen) | Some(Tok::RParen) => self.pos += 1,
                _ => break,
            }
        }
        if !any {
            return Err(self.unexpected("expected an expression"));
        }
        Ok(())
    }

    // ---- conditions ----

    fn condition(&mut self, fx: &mut Effects) -> Result<Cond> {
        let mut last: Option<(Operand, RelOp)> = None;
        self.cond_or(fx, &mut last)
    }

    fn cond_or(&mut self, fx: &mut Effects, last: &mut Option<(Operand, RelOp)>) -> Result<Cond> {
        let mut c = self.cond_and(fx, last)?;
        while self.eat_word("OR") {
            let r = self.cond_and(fx, last)?;
            c = Cond::Or(c.into(), r.into());
        }
        Ok(c)
    }

    fn cond_and(&mut self, fx: &mut Effects, last: &mut Option<(Operand, RelOp)>) -> Result<Cond> {
        let mut c = self.cond_not(fx, last)?;
        while self.eat_word("AND") {
            let r = self.cond_not(fx, last)?;
            c = Cond::And(c.into(), r.into());
        }
        Ok(c)
    }

    fn cond_not(&mut self, fx: &mut Effects, last: &mut Option<(Operand, RelOp)>) -> Result<Cond> {
        if self.eat_word("NOT") {
            let c = self.cond_not(fx, last)?;
            return Ok(Cond::Not(c.into()));
        }
        if self.eat(&Tok::LParen) {
            let c = self.cond_or(fx, last)?;
            self.expect(&Tok::RParen, "')'")?;
            return Ok(c);
        }
        self.relation(fx, last)
    }

    fn relop(&mut self) -> Option<(RelOp, bool)> {
        let save = self.pos;
        self.eat_word("IS");
        let negated = self.eat_word("NOT");
        let op = match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Op(o)) => {
                let op = match o.as_str() {
                    "=" => Some(RelOp::Eq),
                    ">" => Some(RelOp::Gt),
                    "<" => Some(RelOp::Lt),
                    ">=" => Some(RelOp::Ge),
                    "<=" => Some(RelOp::Le),
                    _ => None,
                };
                if op.is_some() {
                    self.pos += 1;
                }
                op
            }
            Some(Tok::Word(w)) if w == "EQUAL" => {
                self.pos += 1;
                self.eat_word("TO");
                Some(RelOp::Eq)
            }
            Some(Tok::Word(w)) if w == "GREATER" || w == "LESS" => {
                self.pos += 1;
                self.eat_word("THAN");
                let or_equal = self.peek_word() == Some("OR") && self.peek_at(1).is_some_and(|t| t.is_word("EQUAL"));
                if or_equal {
                    self.pos += 2;
                    self.eat_word("TO");
                }
                Some(match (w.as_str(), or_equal) {
                    ("GREATER", false) => RelOp::Gt,
                    ("GREATER", true) => RelOp::Ge,
                    (_, false) => RelOp::Lt,
                    (_, true) => RelOp::Le,
                })
            }
            _ => None,
        };
        match op {
            Some(op) => Some((op, negated)),
            None => {
                self.pos = save;
                None
            }
        }
    }

    fn negate(op: RelOp) -> RelOp {
        match op {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Lt => RelOp::Ge,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
            RelOp::Le => RelOp::Gt,
        }
    }

    fn cond_operand(&mut self, fx: &mut Effects) -> Result<Operand> {
        let first = self.operand(fx)?;
        let mut arithmetic = false;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Op(o)) if matches!(o.as_str(), "+" | "-" | "*" | "/" | "**")) {
            self.pos += 1;
            self.operand(fx)?;
            arithmetic = true;
        }
        Ok(if arithmetic { Operand::Opaque } else { first })
    }

    fn relation(&mut self, fx: &mut Effects, last: &mut Option<(Operand, RelOp)>) -> Result<Cond> {
        // abbreviated combined relation: `X = 'A' OR 'B'`, `X > 1 AND < 9`
        if let Some((lhs, op)) = last.clone() {
            if self.starts_literal() {
                let rhs = self.cond_operand(fx)?;
                return Ok(Cond::Rel { lhs, op, rhs });
            }
            let save = self.pos;
            if let Some((op, neg)) = self.relop() {
                let op = if neg { Self::negate(op) } else { op };
                let rhs = self.cond_operand(fx)?;
                *last = Some((lhs.clone(), op));
                return Ok(Cond::Rel { lhs, op, rhs });
            }
            self.pos = save;
        }
        // a bare identifier may be a condition name
        let save = self.pos;
        if self.starts_identifier() {
            let mut scratch = Effects::default();
            let id = self.identifier(&mut scratch)?;
            if self.data.get(id).is_condition() && self.relop().is_none() {
                let parent = self.data.storage_item(id);
                self.read(fx, id);
                fx.reads.extend(scratch.reads);
                return Ok(Cond::Condition { item: parent, values: self.data.get(id).values.clone() });
            }
            self.pos = save;
        }
        let lhs = self.cond_operand(fx)?;
        let save = self.pos;
        self.eat_word("IS");
        let neg = self.eat_word("NOT");
        if matches!(self.peek_word(), Some("NUMERIC" | "ALPHABETIC" | "POSITIVE" | "NEGATIVE" | "ZERO")) {
            self.pos += 1;
            let _ = neg;
            *last = None;
            return Ok(Cond::Opaque);
        }
        self.pos = save;
        let Some((op, neg)) = self.relop() else {
            if let Operand::Item(_) = lhs {
                // boolean-ish flag test we cannot model
                *last = None;
                return Ok(Cond::Opaque);
            }
            return Err(self.unexpected("expected a relational operator"));
        };
        let op = if neg { Self::negate(op) } else { op };
        let rhs = self.cond_operand(fx)?;
        *last = Some((lhs.clone(), op));
        Ok(Cond::Rel { lhs, op, rhs })
    }

    // ---- compound statements ----

    fn if_stmt(&mut self) -> Result<StmtId> {
        let line = self.line();
        let start = self.pos;
        self.pos += 1;
        let id = self.alloc();
        let mut fx = Effects::default();
        let cond = self.condition(&mut fx)?;
        let text = self.text_from(start);
        self.eat_word("THEN");
        let then_branch = self.block()?;
        let else_branch = if self.eat_word("ELSE") { Some(self.block()?) } else { None };
        self.eat_word("END-IF");
        Ok(self.finish(id, line, StmtKind::If, fx, Form::If { cond, then_branch, else_branch }, text))
    }

    fn evaluate(&mut self) -> Result<StmtId> {
        let line = self.line();
        let start = self.pos;
        self.pos += 1;
        let id = self.alloc();
        let mut fx = Effects::default();
        let subject = if self.eat_word("TRUE") { EvalSubject::True } else { EvalSubject::Operand(self.cond_operand(&mut fx)?) };
        if self.peek_word() == Some("ALSO") {
            return Err(self.unexpected("EVALUATE ... ALSO is not supported"));
        }
        let text = self.text_from(start);
        let mut arms = Vec::new();
        while self.peek_word() == Some("WHEN") {
            let arm_line = self.line();
            let mut texts = Vec::new();
            let mut values = Vec::new();
            while self.eat_word("WHEN") {
                let vstart = self.pos;
                let v = if self.eat_word("OTHER") {
                    WhenValue::Other
                } else if subject == EvalSubject::True {
                    WhenValue::Cond(self.condition(&mut fx)?)
                } else if self.starts_literal() {
                    let l = self.literal()?;
                    if self.eat_word("THRU") || self.eat_word("THROUGH") {
                        self.literal()?;
                        WhenValue::Cond(Cond::Opaque)
                    } else {
                        WhenValue::Lit(l)
                    }
                } else {
                    let id = self.identifier(&mut fx)?;
                    self.read(&mut fx, id);
                    WhenValue::Item(self.data.storage_item(id))
                };
                texts.push(self.text_from(vstart));
                values.push(v);
            }
            let body = self.block()?;
            arms.push(WhenArm { line: arm_line, texts, values, body });
        }
        if arms.is_empty() {
            return Err(self.unexpected("EVALUATE needs at least one WHEN"));
        }
        self.eat_word("END-EVALUATE");
        Ok(self.finish(id, line, StmtKind::EvaluateWhen, fx, Form::Evaluate { subject, arms }, text))
    }

    fn perform(&mut self) -> Result<StmtId> {
        let line = self.line();
        let start = self.pos;
        self.pos += 1;
        let id = self.alloc();
        let mut fx = Effects::default();
        let out_of_line = self.starts_identifier()
            && !self.peek_at(1).is_some_and(|t| t.is_word("TIMES"))
            && self.peek_word().is_some_and(|w| !matches!(w, "UNTIL" | "VARYING" | "WITH" | "TEST"));
        let target = if out_of_line {
            let from = self.name()?;
            let thru = if self.eat_word("THRU") || self.eat_word("THROUGH") { Some(self.name()?) } else { None };
            Some(PerformTarget { from, thru })
        } else {
            None
        };
        if self.eat_word("WITH") {
            self.expect_word("TEST")?;
            if !(self.eat_word("BEFORE") || self.eat_word("AFTER")) {
                return Err(self.unexpected("expected BEFORE or AFTER"));
            }
        }
        let until = if self.eat_word("UNTIL") {
            Some(self.condition(&mut fx)?)
        } else if self.eat_word("VARYING") {
            let v = self.identifier(&mut fx)?;
            self.write(&mut fx, v);
            self.expect_word("FROM")?;
            self.operand(&mut fx)?;
            self.expect_word("BY")?;
            self.operand(&mut fx)?;
            self.expect_word("UNTIL")?;
            let c = self.condition(&mut fx)?;
            if self.peek_word() == Some("AFTER") {
                return Err(self.unexpected("PERFORM VARYING ... AFTER is not supported"));
            }
            Some(c)
        } else if self.starts_identifier() || self.starts_literal() {
            self.operand(&mut fx)?;
            self.expect_word("TIMES")?;
            Some(Cond::Opaque)
        } else {
            None
        };
        let text = self.text_from(start);
        let body = if target.is_none() {
            let b = self.block()?;
            self.expect_word("END-PERFORM")?;
            b
        } else {
            Vec::new()
        };
        let call_target = target.as_ref().map(|t| t.from.clone());
        self.finish(id, line, StmtKind::Perform, fx, Form::Perform { target, until, body }, text);
        self.stmt_mut(id).call_target = call_target;
        Ok(id)
    }

    fn call(&mut self, id: StmtId, start: usize, line: u32) -> Result<StmtId> {
        let mut fx = Effects::default();
        let (target, dynamic) = match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                (s.to_ascii_uppercase(), false)
            }
            _ => {
                let t = self.identifier(&mut fx)?;
                self.read(&mut fx, t);
                (self.data.get(t).name.clone(), true)
            }
        };
        let mut args = Vec::new();
        if self.eat_word("USING") {
            loop {
                if self.eat_word("BY") {
                    if !(self.eat_word("REFERENCE") || self.eat_word("CONTENT") || self.eat_word("VALUE")) {
                        return Err(self.unexpected("expected REFERENCE, CONTENT or VALUE"));
                    }
                    continue;
                }
                if self.starts_literal() {
                    return Err(self.unexpected("literal CALL arguments are not supported"));
                }
                if !self.starts_identifier() {
                    break;
                }
                let a = self.identifier(&mut fx)?;
                args.push(self.data.storage_item(a));
            }
        }
        if matches!(self.peek_word(), Some("ON" | "RETURNING")) {
            return Err(self.unexpected("ON EXCEPTION / RETURNING are not supported"));
        }
        self.eat_word("END-CALL");
        let text = self.text_from(start);
        self.finish(id, line, StmtKind::Call, fx, Form::Simple, text);
        let s = self.stmt_mut(id);
        s.call_target = Some(target);
        s.dynamic_call = dynamic;
        s.call_arguments = args;
        Ok(id)
    }

    fn exec(&mut self) -> Result<StmtId> {
        let line = self.line();
        let start = self.pos;
        self.pos += 1;
        let id = self.alloc();
        let dialect = self.name()?;
        let body_start = self.pos;
        while !self.peek().is_some_and(|t| t.is_word("END-EXEC")) {
            if self.bump().is_none() {
                return Err(Error::syntax(line, "EXEC without END-EXEC"));
            }
        }
        let body: Vec<Token> = self.toks[body_start..self.pos].to_vec();
        self.pos += 1;
        let text = self.text_from(start);
        match dialect.as_str() {
            "SQL" => self.sql(id, line, body, text),
            "CICS" => self.cics(id, line, body, text),
            other => Err(Error::syntax(line, format!("unsupported EXEC {other}"))),
        }
    }

    fn resolve_tokens(&self, toks: &[Token], line: u32) -> Result<Option<ItemId>> {
        let mut words = toks.iter();
        let Some(first) = words.next().and_then(|t| t.word()) else {
            return Ok(None);
        };
        let mut quals = Vec::new();
        let rest: Vec<&Token> = words.collect();
        let mut i = 0;
        while i + 1 < rest.len() && (rest[i].is_word("OF") || rest[i].is_word("IN")) {
            quals.push(rest[i + 1].word().unwrap_or_default().to_string());
            i += 2;
        }
        Ok(Some(self.data.resolve(first, &quals, line)?))
    }

    fn sql(&mut self, id: StmtId, line: u32, body: Vec<Token>, text: String) -> Result<StmtId> {
        let mut fx = Effects::default();
        let verb = body.first().and_then(|t| t.word()).unwrap_or("").to_string();
        // host variables with the clause they appear in
        let mut clause = String::new();
        let mut into = Vec::new();
        let selects = matches!(verb.as_str(), "SELECT" | "FETCH");
        let mut columns: Vec<String> = Vec::new();
        let mut tables = Vec::new();
        let mut i = 0;
        while i < body.len() {
            let t = &body[i];
            match &t.tok {
                Tok::Colon => {
                    let mut j = i + 1;
                    let name = body.get(j).and_then(|t| t.word()).ok_or_else(|| Error::syntax(t.line, "expected host variable"))?.to_string();
                    j += 1;
                    let mut quals = Vec::new();
                    // :STRUCT.FIELD qualification
                    if body.get(j).map(|t| &t.tok) == Some(&Tok::Dot) {
                        if let Some(f) = body.get(j + 1).and_then(|t| t.word()) {
                            quals.push(name.clone());
                            let host = self.data.resolve(f, &quals, t.line)?;
                            j += 2;
                            self.host(&mut fx, host, &clause, &mut into);
                            i = j;
                            continue;
                        }
                    }
                    let host = self.data.resolve(&name, &quals, t.line)?;
                    self.host(&mut fx, host, &clause, &mut into);
                    // indicator variable
                    if body.get(j).map(|t| &t.tok) == Some(&Tok::GluedColon) {
                        if let Some(ind) = body.get(j + 1).and_then(|t| t.word()) {
                            let ind = self.data.resolve(ind, &[], t.line)?;
                            self.host(&mut fx, ind, &clause, &mut Vec::new());
                            j += 2;
                        }
                    }
                    i = j;
                    continue;
                }
                Tok::Word(w) => {
                    let prev_dot = i > 0 && body[i - 1].tok == Tok::Dot;
                    if matches!(w.as_str(), "SELECT" | "INTO" | "FROM" | "WHERE" | "SET" | "VALUES" | "ORDER" | "GROUP" | "HAVING" | "JOIN" | "ON" | "FETCH" | "UPDATE")
                        && !prev_dot
                    {
                        clause = if w == "INTO" && !selects { String::from("TABLE") } else { w.clone() };
                        if w == "UPDATE" && verb == "UPDATE" && i == 0 {
                            if let Some(tb) = body.get(1).and_then(|t| t.word()) {
                                tables.push(tb.to_string());
                            }
                        }
                        if w == "INTO" && verb == "INSERT" {
                            if let Some(tb) = body.get(i + 1).and_then(|t| t.word()) {
                                tables.push(tb.to_string());
                            }
                        }
                    } else if clause == "SELECT" && i > 0 {
                        if prev_dot {
                            if let Some(c) = columns.last_mut() {
                                c.push('.');
                                c.push_str(w);
                            }
                        } else if !matches!(w.as_str(), "DISTINCT" | "AS") {
                            columns.push(w.clone());
                        }
                    } else if (clause == "FROM" || clause == "JOIN") && !prev_dot && body.get(i + 1).map(|t| &t.tok) != Some(&Tok::Dot) {
                        // `FROM POLICY P`: a word right after a table that
                        // qualifies columns elsewhere is a correlation name
                        let after_table = body.get(i.wrapping_sub(1)).and_then(|t| t.word()).is_some_and(|p| tables.iter().any(|t| t == p));
                        let qualifier = body.windows(2).any(|pair| pair[0].word() == Some(w.as_str()) && pair[1].tok == Tok::Dot);
                        if !is_sql_keyword(w) && !tables.contains(w) && !(after_table && qualifier) {
                            tables.push(w.clone());
                        }
                    }
                }
                _ => {}
            }
            i += 1;
        }
        let kind = match verb.as_str() {
            "SELECT" | "FETCH" => StmtKind::SqlSelect,
            "INSERT" => StmtKind::SqlInsert,
            "UPDATE" => StmtKind::SqlUpdate,
            "DELETE" => StmtKind::SqlDelete,
            _ => StmtKind::Other,
        };
        if kind != StmtKind::Other || matches!(verb.as_str(), "OPEN" | "CLOSE" | "COMMIT" | "ROLLBACK") {
            if let Ok(code) = self.data.resolve("SQLCODE", &[], line) {
                self.write(&mut fx, code);
            }
        }
        if kind != StmtKind::SqlSelect {
            columns.clear();
        }
        self.finish(id, line, kind, fx, Form::Simple, text);
        if kind.is_sql() {
            self.stmt_mut(id).sql = Some(SqlInfo { columns, into, tables });
        }
        Ok(id)
    }

    fn host(&self, fx: &mut Effects, host: ItemId, clause: &str, into: &mut Vec<ItemId>) {
        if clause == "INTO" {
            into.push(host);
            self.write(fx, host);
        } else {
            self.read(fx, host);
        }
    }

    fn cics(&mut self, id: StmtId, line: u32, body: Vec<Token>, text: String) -> Result<StmtId> {
        let mut fx = Effects::default();
        let command = body.first().and_then(|t| t.word()).unwrap_or("").to_string();
        // OPTION or OPTION(args)
        let mut opts: Vec<(String, Vec<Token>)> = Vec::new();
        let mut i = 1;
        while i < body.len() {
            let Some(name) = body[i].word() else {
                return Err(Error::syntax(body[i].line, "malformed EXEC CICS option"));
            };
            let mut args = Vec::new();
            i += 1;
            if body.get(i).map(|t| &t.tok) == Some(&Tok::LParen) {
                let mut depth = 1;
                i += 1;
                while i < body.len() {
                    match body[i].tok {
                        Tok::LParen => depth += 1,
                        Tok::RParen => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    args.push(body[i].clone());
                    i += 1;
                }
                i += 1;
            }
            opts.push((name.to_string(), args));
        }
        let opt = |n: &str| opts.iter().find(|(k, _)| k == n).map(|(_, a)| a.as_slice());
        let literal_arg = |a: &[Token]| match a.first().map(|t| &t.tok) {
            Some(Tok::Str(s)) => Some(s.to_ascii_uppercase()),
            _ => None,
        };
        let has_map = opt("MAP").is_some();
        let kind = match command.as_str() {
            "RECEIVE" if has_map => StmtKind::CicsReceiveMap,
            "SEND" if has_map || opt("TEXT").is_some() => StmtKind::CicsSendMap,
            "LINK" => StmtKind::CicsLink,
            "RETURN" => StmtKind::CicsReturn,
            "READ" => StmtKind::FileRead,
            "WRITE" | "REWRITE" => StmtKind::FileWrite,
            "XCTL" => return Err(Error::syntax(line, "EXEC CICS XCTL is not supported")),
            _ => StmtKind::Other,
        };
        let map_name = opt("MAP").and_then(literal_arg);
        let mut handled: BTreeSet<&str> = BTreeSet::new();
        let mut call_target = None;
        let mut dynamic = false;
        let mut args = Vec::new();
        match kind {
            StmtKind::CicsReceiveMap => {
                handled.insert("INTO");
                let fields = self.map_fields(map_name.as_deref(), true);
                if !fields.is_empty() {
                    for f in fields {
                        self.write(&mut fx, f);
                    }
                } else if let Some(a) = opt("INTO") {
                    if let Some(t) = self.resolve_tokens(a, line)? {
                        self.write(&mut fx, t);
                    }
                }
            }
            StmtKind::CicsSendMap => {
                handled.insert("FROM");
                let fields = self.map_fields(map_name.as_deref(), false);
                if !fields.is_empty() {
                    for f in fields {
                        self.read(&mut fx, f);
                    }
                } else if let Some(a) = opt("FROM") {
                    if let Some(t) = self.resolve_tokens(a, line)? {
                        self.read(&mut fx, t);
                    }
                }
            }
            StmtKind::CicsLink => {
                handled.insert("PROGRAM");
                handled.insert("COMMAREA");
                let prog = opt("PROGRAM").ok_or_else(|| Error::syntax(line, "LINK needs PROGRAM"))?;
                match literal_arg(prog) {
                    Some(p) => call_target = Some(p),
                    None => {
                        let t = self.resolve_tokens(prog, line)?.ok_or_else(|| Error::syntax(line, "bad PROGRAM option"))?;
                        self.read(&mut fx, t);
                        call_target = Some(self.data.get(t).name.clone());
                        dynamic = true;
                    }
                }
                if let Some(a) = opt("COMMAREA") {
                    if let Some(t) = self.resolve_tokens(a, line)? {
                        args.push(self.data.storage_item(t));
                    }
                }
            }
            StmtKind::FileRead => {
                handled.insert("INTO");
                if let Some(t) = opt("INTO").map(|a| self.resolve_tokens(a, line)).transpose()?.flatten() {
                    self.write(&mut fx, t);
                }
            }
            _ => {}
        }
        for (name, a) in &opts {
            if handled.contains(name.as_str()) || a.is_empty() || literal_arg(a).is_some() {
                continue;
            }
            if matches!(name.as_str(), "MAP" | "MAPSET" | "TRANSID" | "FILE" | "DATASET" | "QUEUE") {
                continue;
            }
            if a.iter().any(|t| !matches!(t.tok, Tok::Word(_))) {
                continue;
            }
            if let Some(t) = self.resolve_tokens(a, line)? {
                if matches!(name.as_str(), "RESP" | "RESP2" | "SET" | "ABSTIME") {
                    self.write(&mut fx, t);
                } else {
                    self.read(&mut fx, t);
                }
            }
        }
        self.finish(id, line, kind, fx, Form::Simple, text);
        let s = self.stmt_mut(id);
        s.map_name = map_name;
        s.call_target = call_target;
        s.dynamic_call = dynamic;
        s.call_arguments = args;
        s.rewrite = command == "REWRITE";
        Ok(id)
    }

    /// Symbolic-map items for the input (`I` suffix) or output (`O` suffix)
    /// fields of a known screen map.
    fn map_fields(&self, map: Option<&str>, input: bool) -> Vec<ItemId> {
        let Some(map) = map.and_then(|m| self.maps.iter().find(|s| s.name.eq_ignore_ascii_case(m))) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for f in &map.fields {
            let wanted = match f.direction {
                Direction::Input => input,
                Direction::Output => !input,
                Direction::Both => true,
            };
            if !wanted {
                continue;
            }
            let suffixed = format!("{}{}", f.name, if input { "I" } else { "O" });
            if let Some(id) = self.data.by_name(&suffixed).next().or_else(|| self.data.by_name(&f.name).next()) {
                out.push(id);
            }
        }
        out
    }
}

fn usage(w: &str) -> Option<Usage> {
    match w {
        "DISPLAY" => Some(Usage::Display),
        "COMP" | "COMP-4" | "COMP-5" | "BINARY" | "COMPUTATIONAL" | "COMPUTATIONAL-4" | "COMPUTATIONAL-5" => Some(Usage::Binary),
        "COMP-3" | "PACKED-DECIMAL" | "COMPUTATIONAL-3" => Some(Usage::Packed),
        _ => None,
    }
}

fn is_sql_keyword(w: &str) -> bool {
    matches!(
        w,
        "SELECT" | "FROM" | "WHERE" | "AND" | "OR" | "NOT" | "INNER" | "LEFT" | "RIGHT" | "OUTER" | "JOIN" | "ON" | "AS" | "WITH" | "UR" | "FOR"
            | "FETCH" | "FIRST" | "ROW" | "ROWS" | "ONLY"
    )
}
