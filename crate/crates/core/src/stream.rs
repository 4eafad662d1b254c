//! Edge update events and the line-oriented stream file format.
//!
//! ```text
//! # optional comment lines
//! n 4
//! + 0 1
//! + 1 2
//! - 0 1
//! ```
//!
//! The header `n <count>` must be the first non-comment line. Every event
//! line is `+ u v` (insert) or `- u v` (delete) with single-space separators.
//! Parsing replays the events against an empty graph and rejects any event
//! whose precondition fails, reporting the 1-based line number.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DynamicGraph, GraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UpdateKind {
    Insert,
    Delete,
}

impl UpdateKind {
    pub fn symbol(self) -> char {
        match self {
            UpdateKind::Insert => '+',
            UpdateKind::Delete => '-',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UpdateKind::Insert => "+",
            UpdateKind::Delete => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UpdateEvent {
    pub kind: UpdateKind,
    pub u: VertexId,
    pub v: VertexId,
}

impl UpdateEvent {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        Self { kind: UpdateKind::Insert, u, v }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        Self { kind: UpdateKind::Delete, u, v }
    }

    /// Applies the event to `g`, enforcing the event's precondition.
    pub fn apply(&self, g: &mut DynamicGraph) -> Result<(), GraphError> {
        match self.kind {
            UpdateKind::Insert => g.insert_edge(self.u, self.v),
            UpdateKind::Delete => g.delete_edge(self.u, self.v),
        }
    }
}

impl fmt::Display for UpdateEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.kind.symbol(), self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UpdateStream {
    pub n: usize,
    pub events: Vec<UpdateEvent>,
}

impl UpdateStream {
    pub fn new(n: usize) -> Self {
        Self { n, events: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Replays every event on a fresh graph; returns the final graph or the
    /// index of the first event whose precondition fails.
    pub fn replay(&self) -> Result<DynamicGraph, (usize, GraphError)> {
        let mut g = DynamicGraph::new(self.n);
        for (i, e) in self.events.iter().enumerate() {
            e.apply(&mut g).map_err(|err| (i, err))?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("malformed line: {0:?}")]
    Malformed(String),
    #[error(transparent)]
    Replay(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number; 0 when the input ended before a header was found.
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn parse_index(tok: &str) -> Option<usize> {
    // Plain decimal digits only: reject signs, whitespace and empty tokens.
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    tok.parse().ok()
}

/// Parses and validates a stream file.
///
/// Comment lines (`#...`) and empty lines are skipped; they do not survive a
/// parse/serialize round trip.
pub fn parse_stream(text: &str) -> Result<UpdateStream, ParseError> {
    let mut graph: Option<DynamicGraph> = None;
    let mut stream = UpdateStream::default();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = || ParseError {
            line: line_no,
            kind: ParseErrorKind::Malformed(line.to_string()),
        };
        let toks: Vec<&str> = line.split(' ').collect();
        match graph.as_mut() {
            None => {
                let n = match toks.as_slice() {
                    ["n", count] => parse_index(count).ok_or_else(malformed)?,
                    _ => {
                        return Err(ParseError {
                            line: line_no,
                            kind: ParseErrorKind::MissingHeader,
                        })
                    }
                };
                stream.n = n;
                graph = Some(DynamicGraph::new(n));
            }
            Some(g) => {
                let event = match toks.as_slice() {
                    [op, u, v] => {
                        let u = parse_index(u).ok_or_else(malformed)?;
                        let v = parse_index(v).ok_or_else(malformed)?;
                        match *op {
                            "+" => UpdateEvent::insert(u, v),
                            "-" => UpdateEvent::delete(u, v),
                            _ => return Err(malformed()),
                        }
                    }
                    _ => return Err(malformed()),
                };
                event.apply(g).map_err(|e| ParseError {
                    line: line_no,
                    kind: e.into(),
                })?;
                stream.events.push(event);
            }
        }
    }
    if graph.is_none() {
        return Err(ParseError { line: 0, kind: ParseErrorKind::MissingHeader });
    }
    Ok(stream)
}

/// Canonical text form: header, one event per line, LF endings, trailing LF.
pub fn serialize_stream(stream: &UpdateStream) -> String {
    let mut out = String::with_capacity(8 + stream.events.len() * 12);
    let _ = writeln!(out, "n {}", stream.n);
    for e in &stream.events {
        let _ = writeln!(out, "{e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_stream() {
        let s = parse_stream("n 3\n+ 0 1\n- 0 1\n").unwrap();
        assert_eq!(s.n, 3);
        assert_eq!(s.events, vec![UpdateEvent::insert(0, 1), UpdateEvent::delete(0, 1)]);
    }

    #[test]
    fn rejects_delete_of_absent_edge() {
        let err = parse_stream("n 2\n- 0 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, ParseErrorKind::Replay(GraphError::MissingEdge(0, 1)));
    }

    #[test]
    fn rejects_self_loop() {
        let err = parse_stream("n 2\n+ 0 0\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, ParseErrorKind::Replay(GraphError::SelfLoop(0)));
    }

    #[test]
    fn rejects_duplicate_insert_and_bad_lines() {
        assert_eq!(parse_stream("n 3\n+ 0 1\n+ 1 0\n").unwrap_err().line, 3);
        assert_eq!(parse_stream("").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert_eq!(parse_stream("# only comment\n").unwrap_err().line, 0);
        assert_eq!(parse_stream("+ 0 1\n").unwrap_err().kind, ParseErrorKind::MissingHeader);
        for bad in ["n 3\n+ 0\n", "n 3\n* 0 1\n", "n 3\n+  0 1\n", "n 3\n+ -1 1\n", "n x\n"] {
            assert!(matches!(
                parse_stream(bad).unwrap_err().kind,
                ParseErrorKind::Malformed(_)
            ));
        }
        assert!(matches!(
            parse_stream("n 2\n+ 0 5\n").unwrap_err().kind,
            ParseErrorKind::Replay(GraphError::OutOfRange { v: 5, n: 2 })
        ));
    }

    #[test]
    fn comments_and_header_only() {
        let s = parse_stream("# hi\nn 4\n# mid\n+ 2 3\n").unwrap();
        assert_eq!(s.events.len(), 1);
        let s = parse_stream("n 2\n").unwrap();
        assert!(s.is_empty());
        assert_eq!(serialize_stream(&s), "n 2\n");
    }

    #[test]
    fn round_trip_without_trailing_newline() {
        let text = "n 3\n+ 0 1\n+ 1 2\n- 0 1";
        let s = parse_stream(text).unwrap();
        assert_eq!(serialize_stream(&s), format!("{text}\n"));
    }
}
