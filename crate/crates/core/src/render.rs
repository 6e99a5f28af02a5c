//! Labeled Bratteli diagrams as DOT and as aligned text.
//!
//! Nodes are summand dimensions per level; an edge from summand `j` of one
//! level to summand `i` of the next carries the multiplicity `E[i][j]`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ematrix::{EMatrix, ShapeVector};
use crate::error::{Error, Result};
use crate::symbol::FiniteSymbol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    #[serde(with = "crate::ematrix::decimal")]
    pub multiplicity: BigUint,
}

/// One level of the diagram together with the edges arriving from the
/// level above. Level 0 is the root and has no edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramLevel {
    pub index: usize,
    pub nodes: ShapeVector,
    pub edges: Vec<Edge>,
}

impl DiagramLevel {
    /// The embedding matrix rebuilt from the edge list, shaped
    /// `nodes × previous_width`.
    pub fn embedding(&self, previous_width: usize) -> Result<EMatrix> {
        let mut m = EMatrix::zeros(self.nodes.len(), previous_width);
        for e in &self.edges {
            if e.to >= self.nodes.len() || e.from >= previous_width {
                return Err(Error::InvalidShape(format!(
                    "edge {}→{} outside a {}×{previous_width} embedding",
                    e.from,
                    e.to,
                    self.nodes.len()
                )));
            }
            m.set(e.to, e.from, e.multiplicity.clone());
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    levels: Vec<DiagramLevel>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DotOptions {
    /// Print multiplicity-1 edge labels, which are omitted by default.
    pub show_unit: bool,
}

fn edges_of(e: &EMatrix) -> Vec<Edge> {
    let mut edges = Vec::new();
    for to in 0..e.rows() {
        for from in 0..e.cols() {
            let m = e.get(to, from);
            if !m.is_zero() {
                edges.push(Edge {
                    from,
                    to,
                    multiplicity: m.clone(),
                });
            }
        }
    }
    edges
}

impl Diagram {
    /// The single root node `C^{1×1}`.
    pub fn unit() -> Self {
        Diagram {
            levels: vec![DiagramLevel {
                index: 0,
                nodes: ShapeVector::unit(),
                edges: Vec::new(),
            }],
        }
    }

    /// Root, initial column, and one level per factor.
    pub fn from_symbol(fs: &FiniteSymbol) -> Result<Self> {
        let shapes = fs.shapes()?;
        let embeddings = fs.sequence();
        let mut levels = Vec::with_capacity(shapes.len());
        for (index, nodes) in shapes.into_iter().enumerate() {
            let edges = if index == 0 {
                Vec::new()
            } else {
                edges_of(&embeddings[index - 1])
            };
            levels.push(DiagramLevel { index, nodes, edges });
        }
        Ok(Diagram { levels })
    }

    /// Levels `0..=depth`.
    pub fn truncated(mut self, depth: usize) -> Self {
        self.levels.truncate(depth + 1);
        self
    }

    pub fn levels(&self) -> &[DiagramLevel] {
        &self.levels
    }

    pub fn shapes(&self) -> Vec<ShapeVector> {
        self.levels.iter().map(|l| l.nodes.clone()).collect()
    }

    /// Embedding matrices between consecutive levels; the first one is the
    /// initial column.
    pub fn embeddings(&self) -> Result<Vec<EMatrix>> {
        self.levels
            .windows(2)
            .map(|w| w[1].embedding(w[0].nodes.len()))
            .collect()
    }

    /// The finite symbol drawn by this diagram, if it has at least the
    /// initial column.
    pub fn to_symbol(&self) -> Result<Option<FiniteSymbol>> {
        let mut e = self.embeddings()?.into_iter();
        match e.next() {
            None => Ok(None),
            Some(col) => FiniteSymbol::new(col, e.collect()).map(Some),
        }
    }

    pub fn to_dot(&self, options: DotOptions) -> String {
        let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
        for level in &self.levels {
            out.push_str("  { rank=same;");
            for (k, d) in level.nodes.entries().iter().enumerate() {
                let _ = write!(out, " \"L{}_{k}\" [label=\"{d}\"];", level.index);
            }
            out.push_str(" }\n");
        }
        for level in self.levels.iter().skip(1) {
            for e in &level.edges {
                let _ = write!(
                    out,
                    "  \"L{}_{}\" -> \"L{}_{}\"",
                    level.index - 1,
                    e.from,
                    level.index,
                    e.to
                );
                if options.show_unit || !e.multiplicity.is_one() {
                    let _ = write!(out, " [label=\"{}\"]", e.multiplicity);
                }
                out.push_str(";\n");
            }
        }
        out.push_str("}\n");
        out
    }

    /// One row per level: right-aligned node dimensions, then `<-` and the
    /// embedding from the level above as `[a b; c d]`.
    pub fn to_text(&self) -> String {
        let width = self
            .levels
            .iter()
            .flat_map(|l| l.nodes.entries())
            .map(|d| d.to_string().len())
            .max()
            .unwrap_or(1);
        let dims: Vec<String> = self
            .levels
            .iter()
            .map(|l| {
                let cells: Vec<String> = l.nodes.entries().iter().map(|d| format!("{d:>width$}")).collect();
                cells.join(" ")
            })
            .collect();
        let dims_width = dims.iter().map(String::len).max().unwrap_or(0);
        let mut out = String::new();
        let mut prev_width = 0;
        for (level, row) in self.levels.iter().zip(&dims) {
            if level.index == 0 {
                out.push_str(row);
            } else {
                let e = level
                    .embedding(prev_width)
                    .expect("levels built from a symbol have consistent edges");
                let rows: Vec<String> = e
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                let _ = write!(out, "{row:<dims_width$}  <- [{}]", rows.join("; "));
            }
            out.push('\n');
            prev_width = level.nodes.len();
        }
        out
    }
}

pub fn to_dot(fs: &FiniteSymbol, options: DotOptions) -> Result<String> {
    Ok(Diagram::from_symbol(fs)?.to_dot(options))
}

pub fn to_text(fs: &FiniteSymbol) -> Result<String> {
    Ok(Diagram::from_symbol(fs)?.to_text())
}

fn parse_numbers(s: &str, line: usize) -> Result<Vec<BigUint>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("line {line}: {t:?} is not a non-negative integer")))
        })
        .collect()
}

/// Inverse of [`Diagram::to_text`]: dimensions are re-read from the rows
/// and checked against the embeddings.
pub fn parse_text(text: &str) -> Result<Diagram> {
    let mut levels: Vec<DiagramLevel> = Vec::new();
    for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let lineno = lineno + 1;
        let (dims, matrix) = match line.split_once("<-") {
            Some((d, m)) => (d, Some(m.trim())),
            None => (line, None),
        };
        let nodes = ShapeVector::new(parse_numbers(dims, lineno)?)?;
        let index = levels.len();
        let edges = match (index, matrix) {
            (0, None) => Vec::new(),
            (0, Some(_)) => return Err(Error::Parse("the root row has no embedding".into())),
            (_, None) => return Err(Error::Parse(format!("line {lineno}: missing embedding"))),
            (_, Some(m)) => {
                let inner = m
                    .strip_prefix('[')
                    .and_then(|m| m.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: embedding must be bracketed")))?;
                let rows = inner
                    .split(';')
                    .map(|r| parse_numbers(r, lineno))
                    .collect::<Result<Vec<_>>>()?;
                let e = EMatrix::from_rows(&rows)?;
                let prev = &levels[index - 1].nodes;
                if e.rows() != nodes.len() || e.apply_to_shape(prev)? != nodes {
                    return Err(Error::Parse(format!(
                        "line {lineno}: dimensions do not match the embedding of the level above"
                    )));
                }
                edges_of(&e)
            }
        };
        if index == 0 && nodes != ShapeVector::unit() {
            return Err(Error::Parse("the root row must be 1".into()));
        }
        levels.push(DiagramLevel { index, nodes, edges });
    }
    if levels.is_empty() {
        return Err(Error::Parse("empty diagram".into()));
    }
    Ok(Diagram { levels })
}
