//! Primitive sets: named terminals (arity 0) and binary functions.
//!
//! Config text is one `name arity` pair per line. `#` starts a comment and
//! blank lines are ignored. Opcodes are dense: terminals first, in order of
//! appearance, then functions.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Terminal,
    Binary,
}

impl Arity {
    pub fn value(self) -> u8 {
        match self {
            Arity::Terminal => 0,
            Arity::Binary => 2,
        }
    }

    pub fn from_value(v: u8) -> Option<Arity> {
        match v {
            0 => Some(Arity::Terminal),
            2 => Some(Arity::Binary),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveSet {
    terminals: Vec<String>,
    functions: Vec<String>,
}

pub const MAX_PRIMITIVES: usize = 255;

impl PrimitiveSet {
    pub fn new<T, F>(terminals: T, functions: F) -> Result<Self>
    where
        T: IntoIterator,
        T::Item: Into<String>,
        F: IntoIterator,
        F::Item: Into<String>,
    {
        let terminals: Vec<String> = terminals.into_iter().map(Into::into).collect();
        let functions: Vec<String> = functions.into_iter().map(Into::into).collect();
        if terminals.is_empty() || functions.is_empty() {
            return Err(Error::IncompleteSet);
        }
        let total = terminals.len() + functions.len();
        if total > MAX_PRIMITIVES {
            return Err(Error::TooManyPrimitives(total));
        }
        let mut seen = HashSet::new();
        for name in terminals.iter().chain(&functions) {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(PrimitiveSet {
            terminals,
            functions,
        })
    }

    /// Terminals `x, y`; functions `ADD, SUB, MUL, DIV`.
    pub fn default_set() -> Self {
        PrimitiveSet::new(["x", "y"], ["ADD", "SUB", "MUL", "DIV"]).expect("valid default set")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut terminals = Vec::new();
        let mut functions = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (name, arity) = match (fields.next(), fields.next(), fields.next()) {
                (Some(n), Some(a), None) => (n, a),
                _ => {
                    return Err(Error::MalformedLine {
                        line: line_no,
                        text: raw.to_string(),
                    })
                }
            };
            let arity = match arity.parse::<u8>().ok().and_then(Arity::from_value) {
                Some(a) => a,
                None => {
                    return Err(Error::UnsupportedArity {
                        line: line_no,
                        name: name.to_string(),
                        arity: arity.to_string(),
                    })
                }
            };
            check_name(name)?;
            if !seen.insert(name.to_string()) {
                return Err(Error::DuplicateName(name.to_string()));
            }
            match arity {
                Arity::Terminal => terminals.push(name.to_string()),
                Arity::Binary => functions.push(name.to_string()),
            }
        }
        PrimitiveSet::new(terminals, functions)
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.terminals.len() + self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terminal_opcode(&self, i: usize) -> u8 {
        debug_assert!(i < self.terminals.len());
        i as u8
    }

    pub fn function_opcode(&self, i: usize) -> u8 {
        debug_assert!(i < self.functions.len());
        (self.terminals.len() + i) as u8
    }

    pub fn arity(&self, opcode: u8) -> Option<Arity> {
        let op = opcode as usize;
        if op < self.terminals.len() {
            Some(Arity::Terminal)
        } else if op < self.len() {
            Some(Arity::Binary)
        } else {
            None
        }
    }

    pub fn name(&self, opcode: u8) -> Option<&str> {
        let op = opcode as usize;
        self.terminals
            .get(op)
            .or_else(|| self.functions.get(op.wrapping_sub(self.terminals.len())))
            .map(String::as_str)
    }

    pub fn opcode_of(&self, name: &str) -> Option<u8> {
        self.iter().position(|(n, _)| n == name).map(|p| p as u8)
    }

    /// Primitives in opcode order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Arity)> {
        self.terminals
            .iter()
            .map(|n| (n.as_str(), Arity::Terminal))
            .chain(self.functions.iter().map(|n| (n.as_str(), Arity::Binary)))
    }
}

impl fmt::Display for PrimitiveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in self.iter() {
            writeln!(f, "{name} {}", arity.value())?;
        }
        Ok(())
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '#')
    {
        return Err(Error::MalformedLine {
            line: 0,
            text: format!("invalid primitive name {name:?}"),
        });
    }
    if name.len() > 255 {
        return Err(Error::NameTooLong(name.to_string()));
    }
    Ok(())
}
