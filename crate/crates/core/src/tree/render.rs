//! Text renderings: s-expressions and Graphviz dot.

use std::fmt::Write;

use super::Tree;
use crate::error::{Error, Result};
use crate::shape::PathStack;

/// Parenthesized preorder text, e.g. `(ADD x (MUL y y))`.
pub fn to_sexpr(tree: &Tree) -> String {
    let prims = tree.primitives();
    let nt = prims.terminals().len() as u8;
    let mut out = String::with_capacity(tree.opcodes().len() * 3);
    let mut stack = PathStack::default();
    for (i, &op) in tree.opcodes().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let name = prims.name(op).unwrap_or("?");
        if op >= nt {
            out.push('(');
            out.push_str(name);
            stack.open();
        } else {
            out.push_str(name);
            for _ in 0..stack.close() {
                out.push(')');
            }
        }
    }
    out
}

pub const DEFAULT_DOT_LIMIT: u64 = 10_000;

/// Directed graph with one vertex per node and parent-to-child edges in
/// child order.
pub fn to_dot(tree: &Tree, node_limit: u64) -> Result<String> {
    if tree.size() > node_limit {
        return Err(Error::TooLarge {
            what: "tree size for dot output",
            value: tree.size(),
            limit: node_limit,
        });
    }
    let prims = tree.primitives();
    let nt = prims.terminals().len() as u8;
    let mut out = String::from("digraph tree {\n");
    // (vertex id, children still to attach)
    let mut parents: Vec<(usize, u8)> = Vec::new();
    for (id, &op) in tree.opcodes().iter().enumerate() {
        let name = prims.name(op).unwrap_or("?");
        let _ = writeln!(out, "  n{id} [label=\"{name}\"];");
        if let Some((parent, remaining)) = parents.last_mut() {
            let _ = writeln!(out, "  n{parent} -> n{id};");
            *remaining -= 1;
            if *remaining == 0 {
                parents.pop();
            }
        }
        if op >= nt {
            parents.push((id, 2));
        }
    }
    out.push_str("}\n");
    Ok(out)
}
