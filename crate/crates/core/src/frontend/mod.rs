//! MiniCOBOL frontend: lexing, copybook expansion, parsing, data layout and
//! per-statement read/write classification.

mod ast;
mod data;
mod lexer;
mod parser;
mod printer;
mod screen;

use alloc::collections::BTreeSet;

pub use ast::*;
pub use data::{DataDictionary, DataItem, ItemId, Picture, Section, Usage};
pub use lexer::{render, tokenize, Tok, Token};
pub use parser::{parse_copybook, parse_source, parse_source_with_maps, CopybookResolver, NoCopybooks};
pub use printer::{literal_text, to_source};
pub use screen::{parse_screen_map, Direction, ScreenField, ScreenMap};

/// The (reads, writes) sets of a statement as classified during parsing.
///
/// Group operands are expanded to their descendants, reads additionally
/// include storage overlapping through REDEFINES, and level-88 operands are
/// replaced by their parent item. CALL and LINK statements carry only the
/// reads of a dynamic target here; their argument effects depend on the
/// call-chain variant.
pub fn read_write_sets(stmt: &Statement) -> (BTreeSet<ItemId>, BTreeSet<ItemId>) {
    (stmt.reads.clone(), stmt.writes.clone())
}
