//! Graphviz DOT rendering of control-flow and call graphs (debug aid).

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{Branch, CallGraph, Cfg};
use crate::frontend::SourceUnit;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn cfg_to_dot(unit: &SourceUnit, cfg: &Cfg) -> String {
    let mut out = format!("digraph \"{}\" {{\n  node [shape=box fontname=monospace];\n", escape(&unit.program_id));
    for n in cfg.nodes() {
        let s = unit.stmt(n);
        let style = if cfg.is_reachable(n) { "" } else { " style=dashed" };
        let _ = writeln!(out, "  s{} [label=\"{}: {}\"{}];", n.0, s.line, escape(&s.text), style);
    }
    for n in cfg.nodes() {
        for &(t, br) in cfg.edges_from(n) {
            let label = match br {
                Branch::Seq => String::new(),
                Branch::Then => String::from(" [label=then]"),
                Branch::Else => String::from(" [label=else]"),
                Branch::Arm(i) => format!(" [label=\"when {}\"]", i + 1),
                Branch::NoMatch => String::from(" [label=nomatch]"),
                Branch::LoopBody => String::from(" [label=body]"),
                Branch::LoopExit => String::from(" [label=exit]"),
                Branch::Return => String::from(" [label=return style=dotted]"),
            };
            let _ = writeln!(out, "  s{} -> s{}{};", n.0, t.0, label);
        }
    }
    out.push_str("}\n");
    out
}

pub fn call_graph_to_dot(graph: &CallGraph) -> String {
    let mut out = String::from("digraph calls {\n");
    for n in &graph.nodes {
        let _ = writeln!(out, "  \"{}\";", escape(n));
    }
    for e in &graph.edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"line {}\"];", escape(&e.caller), escape(&e.callee), e.line);
    }
    for u in &graph.unresolved {
        let _ = writeln!(out, "  \"{}\" -> \"?{}\" [style=dashed label=\"line {}\"];", escape(&u.caller), escape(&u.target), u.line);
    }
    out.push_str("}\n");
    out
}
