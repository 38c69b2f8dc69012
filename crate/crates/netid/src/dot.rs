//! Graphviz rendering of a weighted adjacency matrix.
//!
//! `A[(i, j)] ≠ 0` is drawn as an edge `j → i`. Nodes are labelled from 1;
//! measured nodes get a dashed blue outline.

use std::fmt::Write;

use netid_core::model::is_present;
use netid_core::Matrix;

pub fn to_dot(name: &str, a: &Matrix, measured: &[usize], presence_threshold: f64) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\"")).unwrap();
    out.push_str("  node [shape=circle];\n");
    for i in 0..a.nrows() {
        let style = if measured.contains(&i) { " style=dashed color=blue penwidth=2" } else { "" };
        writeln!(out, "  n{i} [label=\"{}\"{style}];", i + 1).unwrap();
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let w = a[(i, j)];
            if is_present(w, presence_threshold) {
                writeln!(out, "  n{j} -> n{i} [label=\"{}\"];", short(w)).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

fn short(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}
