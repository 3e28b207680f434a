use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontend::{parse_source, NoCopybooks, SourceUnit};

struct Gen {
    rng: ChaCha8Rng,
    vars: usize,
    lines: Vec<String>,
    /// Whether the program has a performable SUB-1 paragraph.
    sub: bool,
}

impl Gen {
    fn var(&mut self) -> String {
        format!("V{}", self.rng.random_range(1..=self.vars))
    }

    fn two_vars(&mut self) -> (String, String) {
        let a = self.rng.random_range(1..=self.vars);
        let mut b = self.rng.random_range(1..self.vars);
        if b >= a {
            b += 1;
        }
        (format!("V{a}"), format!("V{b}"))
    }

    fn small(&mut self) -> u32 {
        self.rng.random_range(0..4)
    }

    fn cond(&mut self) -> String {
        let v = self.var();
        let op = ["=", ">", "<", "NOT ="][self.rng.random_range(0..4)];
        format!("{v} {op} {}", self.small())
    }

    fn simple(&mut self, indent: &str, allow_perform: bool) {
        let line = match self.rng.random_range(0..if allow_perform && self.sub { 7 } else { 6 }) {
            0 | 1 => {
                let (a, b) = self.two_vars();
                format!("MOVE {a} TO {b}")
            }
            2 => format!("MOVE {} TO {}", self.small(), self.var()),
            3 => {
                let (a, b) = self.two_vars();
                format!("ADD {a} TO {b}")
            }
            4 => {
                let (a, b) = self.two_vars();
                let c = self.var();
                format!("COMPUTE {c} = {a} + {b}")
            }
            5 => format!("DISPLAY {}", self.var()),
            _ => String::from("PERFORM SUB-1"),
        };
        self.lines.push(format!("{indent}{line}"));
    }

    /// Emits exactly `budget` statements (nested ones included).
    fn block(&mut self, budget: usize, indent: &str, allow_perform: bool) {
        let mut left = budget;
        while left > 0 {
            let choice = if left >= 2 { self.rng.random_range(0..10) } else { 0 };
            let inner_indent = format!("{indent}    ");
            match choice {
                7 => {
                    let inner = self.rng.random_range(1..left);
                    let then_n = self.rng.random_range(1..=inner);
                    let c = self.cond();
                    self.lines.push(format!("{indent}IF {c}"));
                    self.block(then_n, &inner_indent, allow_perform);
                    if inner > then_n {
                        self.lines.push(format!("{indent}ELSE"));
                        self.block(inner - then_n, &inner_indent, allow_perform);
                    }
                    self.lines.push(format!("{indent}END-IF"));
                    left -= inner + 1;
                }
                8 => {
                    let inner = self.rng.random_range(1..left);
                    let v = self.var();
                    self.lines.push(format!("{indent}EVALUATE {v}"));
                    let mut rest = inner;
                    let mut k = 0;
                    while rest > 0 {
                        let take = self.rng.random_range(1..=rest);
                        if k > 0 && self.rng.random_bool(0.3) {
                            self.lines.push(format!("{indent}WHEN OTHER"));
                            self.block(rest, &inner_indent, allow_perform);
                            break;
                        }
                        let lit = self.small();
                        self.lines.push(format!("{indent}WHEN {lit}"));
                        self.block(take, &inner_indent, allow_perform);
                        rest -= take;
                        k += 1;
                    }
                    self.lines.push(format!("{indent}END-EVALUATE"));
                    left -= inner + 1;
                }
                9 => {
                    let inner = self.rng.random_range(1..left);
                    let c = self.cond();
                    self.lines.push(format!("{indent}PERFORM UNTIL {c}"));
                    self.block(inner, &inner_indent, allow_perform);
                    self.lines.push(format!("{indent}END-PERFORM"));
                    left -= inner + 1;
                }
                _ => {
                    self.simple(indent, allow_perform);
                    left -= 1;
                }
            }
        }
    }
}

/// Source text of a pseudo-random program with `size` statements over
/// `vars` PIC 9(4) variables (both clamped to at least 1 and 2, at most 30
/// and 10). The first statement is always a MOVE between two variables.
/// Some programs also get a SUB-1 paragraph, performed from the main one and
/// separated from it by a GOBACK that counts towards `size`.
pub fn random_program_text(seed: u64, size: usize, vars: usize) -> String {
    let size = size.clamp(1, 30);
    let vars = vars.clamp(2, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sub_size = if size >= 4 && rng.random_bool(0.5) { rng.random_range(1..=size / 3) } else { 0 };
    let mut g = Gen { rng, vars, lines: Vec::new(), sub: sub_size > 0 };
    let (a, b) = g.two_vars();
    g.lines.push(format!("    MOVE {a} TO {b}"));
    g.block(size - sub_size - 1 - usize::from(sub_size > 0), "    ", true);
    let mut text = String::from("IDENTIFICATION DIVISION.\nPROGRAM-ID. RANDOM.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n");
    for i in 1..=vars {
        text.push_str(&format!("01 V{i} PIC 9(4).\n"));
    }
    text.push_str("PROCEDURE DIVISION.\nMAIN-PARA.\n");
    let mut main = core::mem::take(&mut g.lines);
    if sub_size > 0 {
        main.push(String::from("    GOBACK"));
        g.block(sub_size, "    ", false);
    }
    let paragraph = |text: &mut String, lines: &[String]| {
        for l in lines {
            text.push_str(l);
            text.push('\n');
        }
        text.insert(text.len() - 1, '.');
    };
    paragraph(&mut text, &main);
    if sub_size > 0 {
        text.push_str("SUB-1.\n");
        paragraph(&mut text, &g.lines);
    }
    text
}

/// Parses [`random_program_text`].
pub fn random_program(seed: u64, size: usize, vars: usize) -> SourceUnit {
    parse_source(&random_program_text(seed, size, vars), &NoCopybooks).expect("generated programs follow the grammar")
}
