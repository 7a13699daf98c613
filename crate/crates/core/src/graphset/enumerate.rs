//! Orderly generation of non-isomorphic graphs by canonical augmentation.
//!
//! Every graph on `n` vertices is produced from exactly one canonical graph
//! on `n - 1` vertices by adding a vertex. A child is kept only when the
//! added vertex lies in the automorphism orbit of the child's canonical
//! deletion vertex: among the vertices of maximum degree, the one with the
//! largest canonical label.

use std::collections::HashSet;

use rayon::prelude::*;

use super::canon::{canonical_form, key_of, CanonicalKey};
use super::graph::{Graph, GraphError, MAX_VERTICES};

/// A canonical graph representative with its key.
#[derive(Debug, Clone)]
pub struct ClassRep {
    pub graph: Graph,
    pub key: CanonicalKey,
}

fn children(parent: &Graph) -> Vec<ClassRep> {
    let m = parent.n();
    let n = m + 1;
    let mut seen: HashSet<Graph> = HashSet::new();
    let mut out = Vec::new();
    for subset in 0u16..(1 << m) {
        let child = parent.with_vertex(subset).expect("n checked by caller");
        let new_deg = subset.count_ones();
        if (0..m).any(|v| child.degree(v) > new_deg) {
            continue;
        }
        let canon = canonical_form(&child);
        let max_deg = new_deg;
        let deletion = canon
            .labeling
            .iter()
            .rev()
            .map(|&v| v as usize)
            .find(|&v| child.degree(v) == max_deg)
            .expect("new vertex has max degree");
        if canon.orbits[deletion] != canon.orbits[n - 1] {
            continue;
        }
        if seen.insert(canon.graph) {
            out.push(ClassRep {
                key: key_of(&canon.graph, None),
                graph: canon.graph,
            });
        }
    }
    out
}

fn next_level(parents: &[ClassRep]) -> Vec<ClassRep> {
    let mut level: Vec<ClassRep> = parents.par_iter().flat_map_iter(|p| children(&p.graph)).collect();
    level.par_sort_unstable_by(|a, b| a.key.cmp(&b.key));
    level
}

fn check_n(n: usize) -> Result<(), GraphError> {
    if n == 0 || n > MAX_VERTICES {
        Err(GraphError::VertexCount(n))
    } else {
        Ok(())
    }
}

/// All classes for every vertex count `1..=n_max`; element `i` holds `n = i + 1`.
pub fn enumerate_levels(n_max: usize) -> Result<Vec<Vec<ClassRep>>, GraphError> {
    check_n(n_max)?;
    let single = Graph::empty(1)?;
    let mut levels = vec![vec![ClassRep {
        key: key_of(&single, None),
        graph: single,
    }]];
    while levels.len() < n_max {
        let next = next_level(levels.last().unwrap());
        levels.push(next);
    }
    Ok(levels)
}

/// One canonical representative per isomorphism class of graphs on `n`
/// vertices, sorted by canonical key.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    let mut levels = enumerate_levels(n)?;
    Ok(levels.pop().unwrap().into_iter().map(|c| c.graph).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let levels = enumerate_levels(6).unwrap();
        let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn single_vertex_graph_is_edgeless() {
        let g = enumerate_graphs(1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].edge_count(), 0);
    }

    #[test]
    fn range_checked() {
        assert_eq!(enumerate_graphs(0).unwrap_err(), GraphError::VertexCount(0));
        assert_eq!(enumerate_graphs(13).unwrap_err(), GraphError::VertexCount(13));
    }

    #[test]
    fn sorted_and_includes_extremes() {
        let level = &enumerate_levels(4).unwrap()[3];
        assert!(level.windows(2).all(|w| w[0].key < w[1].key));
        assert!(level.iter().any(|c| c.graph.edge_count() == 0));
        assert!(level.iter().any(|c| c.graph.edge_count() == 6));
    }
}
