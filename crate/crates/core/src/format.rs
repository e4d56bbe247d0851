//! Line-oriented text format for tripartite graphs.
//!
//! ```text
//! # comments run to end of line
//! tripartite N=3 h=1
//! e 1 0 2 1
//! ```
//!
//! Class indices are 1-based, offsets 0-based. `h=0` means "no tile size
//! recorded". The writer is canonical: edges with `ci < cj`, grouped by class
//! pair (1,2), (1,3), (2,3), each group sorted by `(u, v)`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Class, GraphError, TripartiteGraph, VertexRef};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `tripartite N=<int> h=<int>` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: TripartiteGraph,
    /// Tile size recorded in the header; `None` for `h=0`.
    pub h: Option<usize>,
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn keyed(line: usize, token: Option<&str>, key: &str) -> Result<usize, FormatError> {
    let token = token.ok_or_else(|| syntax(line, format!("expected {key}=<int>")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected {key}=<int>, found `{token}`")))?;
    value.parse().map_err(|_| syntax(line, format!("bad integer in `{token}`")))
}

fn number(line: usize, token: Option<&str>) -> Result<usize, FormatError> {
    let token = token.ok_or_else(|| syntax(line, "truncated edge line"))?;
    token.parse().map_err(|_| syntax(line, format!("bad integer `{token}`")))
}

fn class(line: usize, token: Option<&str>) -> Result<Class, FormatError> {
    let k = number(line, token)?;
    u8::try_from(k)
        .ok()
        .and_then(Class::from_number)
        .ok_or_else(|| syntax(line, format!("class index {k} not in 1..=3")))
}

pub fn parse(text: &str) -> Result<GraphFile, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("tripartite") if header.is_none() => {
                let n = keyed(line, tokens.next(), "N")?;
                let h = keyed(line, tokens.next(), "h")?;
                if tokens.next().is_some() {
                    return Err(syntax(line, "trailing tokens after header"));
                }
                if n == 0 {
                    return Err(FormatError::Graph { line, source: GraphError::EmptyClasses });
                }
                header = Some((n, h));
                builder = Some(crate::graph::GraphBuilder::new(n));
            }
            Some("tripartite") => return Err(syntax(line, "duplicate header")),
            Some("e") => {
                let b = builder.as_mut().ok_or(FormatError::MissingHeader)?;
                let ci = class(line, tokens.next())?;
                let u = number(line, tokens.next())?;
                let cj = class(line, tokens.next())?;
                let v = number(line, tokens.next())?;
                if tokens.next().is_some() {
                    return Err(syntax(line, "trailing tokens after edge"));
                }
                b.add_edge(VertexRef::new(ci, u), VertexRef::new(cj, v))
                    .map_err(|source| FormatError::Graph { line, source })?;
            }
            Some(other) => return Err(syntax(line, format!("unknown record `{other}`"))),
            None => unreachable!("empty lines are skipped"),
        }
    }
    let (_, h) = header.ok_or(FormatError::MissingHeader)?;
    let graph = builder
        .expect("header sets builder")
        .build()
        .map_err(|source| FormatError::Graph { line: 1, source })?;
    Ok(GraphFile { graph, h: (h > 0).then_some(h) })
}

/// Canonical serialization.
pub fn write(graph: &TripartiteGraph, h: Option<usize>) -> String {
    let mut out = String::new();
    writeln!(out, "tripartite N={} h={}", graph.n(), h.unwrap_or(0)).unwrap();
    for (u, v) in graph.edges() {
        writeln!(out, "e {} {} {} {}", u.class.number(), u.offset, v.class.number(), v.offset).unwrap();
    }
    out
}
