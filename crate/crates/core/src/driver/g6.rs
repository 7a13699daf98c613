use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::DriverError;
use crate::graphset::{enumerate_levels, parse_graph6, read_graph6, write_graph6, Graph};

/// `n: u-v u-v ...`, the edge-list text used by `g6 encode` and `g6 decode`.
pub fn decode_line(line: &str) -> Result<String, DriverError> {
    let g = parse_graph6(line.trim())?;
    let mut pairs: Vec<(usize, usize)> = g.edges().collect();
    pairs.sort_unstable();
    let edges: Vec<String> = pairs.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    Ok(if edges.is_empty() {
        format!("{}:", g.n())
    } else {
        format!("{}: {}", g.n(), edges.join(" "))
    })
}

pub fn encode_line(line: &str) -> Result<String, DriverError> {
    let bad = || DriverError::Config(format!("expected `n: u-v ...`, got {line:?}"));
    let (n, rest) = line.trim().split_once(':').ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let mut edges = Vec::new();
    for tok in rest.split_whitespace() {
        let (u, v) = tok.split_once('-').ok_or_else(bad)?;
        edges.push((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?));
    }
    let g = Graph::from_edges(n, &edges).map_err(|e| DriverError::Config(e.to_string()))?;
    Ok(write_graph6(&g))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct G6Counts {
    pub per_n: BTreeMap<usize, u64>,
    pub total: u64,
}

/// Graphs per vertex count in a graph6 stream.
pub fn count_graph6<R: BufRead>(r: R) -> Result<G6Counts, DriverError> {
    let mut c = G6Counts::default();
    for g in read_graph6(r) {
        *c.per_n.entry(g?.n()).or_insert(0) += 1;
        c.total += 1;
    }
    Ok(c)
}

/// Writes every isomorphism class on `1..=n_max` vertices as graph6 lines.
pub fn write_levels<W: Write>(n_max: usize, mut w: W) -> Result<u64, DriverError> {
    let levels = enumerate_levels(n_max).map_err(|e| DriverError::Config(e.to_string()))?;
    let mut total = 0;
    for rep in levels.iter().flatten() {
        writeln!(w, "{}", write_graph6(&rep.graph))?;
        total += 1;
    }
    Ok(total)
}
