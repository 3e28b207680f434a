//! Re-serializes a parsed unit as MiniCOBOL text (copybooks inlined).

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::ast::{Form, Literal, SourceUnit, StmtId};
use super::data::{Section, Usage};

pub fn literal_text(l: &Literal) -> String {
    match l {
        Literal::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Literal::Num(n) => n.clone(),
        Literal::Figurative(f) => f.clone(),
    }
}

pub fn to_source(unit: &SourceUnit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "IDENTIFICATION DIVISION.\nPROGRAM-ID. {}.", unit.program_id);
    let data = &unit.data;
    if !data.is_empty() {
        out.push_str("DATA DIVISION.\n");
        let mut section = None;
        for (id, item) in data.iter() {
            if section != Some(item.section) {
                section = Some(item.section);
                out.push_str(match item.section {
                    Section::WorkingStorage => "WORKING-STORAGE SECTION.\n",
                    Section::Linkage => "LINKAGE SECTION.\n",
                });
            }
            let depth = data.ancestors(id).count();
            let _ = write!(out, "{}{:02} {}", "  ".repeat(depth + 1), item.level, item.name);
            if let Some(r) = item.redefines {
                let _ = write!(out, " REDEFINES {}", data.get(r).name);
            }
            if let Some(p) = &item.picture {
                let _ = write!(out, " PIC {}", p.text);
            }
            match item.usage {
                Usage::Display => {}
                Usage::Binary => out.push_str(" COMP"),
                Usage::Packed => out.push_str(" COMP-3"),
            }
            if let Some(n) = item.occurs {
                let _ = write!(out, " OCCURS {n}");
            }
            if !item.values.is_empty() {
                out.push_str(" VALUE");
                for v in &item.values {
                    out.push(' ');
                    out.push_str(&literal_text(v));
                }
            }
            out.push_str(".\n");
        }
    }
    out.push_str("PROCEDURE DIVISION");
    if !unit.using.is_empty() {
        out.push_str(" USING");
        for &u in &unit.using {
            out.push(' ');
            out.push_str(&data.get(u).name);
        }
    }
    out.push_str(".\n");
    for p in &unit.paragraphs {
        let _ = writeln!(out, "{}.", p.name);
        for &s in &p.body {
            print_stmt(unit, s, 1, &mut out);
        }
        out.push_str("    .\n");
    }
    out
}

fn print_stmt(unit: &SourceUnit, id: StmtId, depth: usize, out: &mut String) {
    let s = unit.stmt(id);
    let pad = "    ".repeat(depth);
    let block = |ids: &[StmtId], out: &mut String| {
        for &c in ids {
            print_stmt(unit, c, depth + 1, out);
        }
    };
    match &s.form {
        Form::If { then_branch, else_branch, .. } => {
            let _ = writeln!(out, "{pad}{}", s.text);
            block(then_branch, out);
            if let Some(e) = else_branch {
                let _ = writeln!(out, "{pad}ELSE");
                block(e, out);
            }
            let _ = writeln!(out, "{pad}END-IF");
        }
        Form::Evaluate { arms, .. } => {
            let _ = writeln!(out, "{pad}{}", s.text);
            for a in arms {
                for t in &a.texts {
                    let _ = writeln!(out, "{pad}  WHEN {t}");
                }
                block(&a.body, out);
            }
            let _ = writeln!(out, "{pad}END-EVALUATE");
        }
        Form::Perform { target: None, body, .. } => {
            let _ = writeln!(out, "{pad}{}", s.text);
            block(body, out);
            let _ = writeln!(out, "{pad}END-PERFORM");
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", s.text);
        }
    }
}
