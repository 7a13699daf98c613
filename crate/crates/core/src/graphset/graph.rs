use std::fmt;

use thiserror::Error;

/// Largest vertex count the graph type can hold.
pub const MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count {0} outside supported range 1..={MAX_VERTICES}")]
    VertexCount(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

/// Simple undirected graph on at most [`MAX_VERTICES`] vertices.
///
/// Adjacency is held as one bitmask row per vertex; the rows are kept
/// symmetric with an empty diagonal by every constructor.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    rows: [u16; MAX_VERTICES],
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::VertexCount(n));
        }
        Ok(Graph {
            n: n as u8,
            rows: [0; MAX_VERTICES],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from adjacency rows. Only the upper triangle of `rows`
    /// is read; the result is symmetrized.
    pub(crate) fn from_rows_upper(n: usize, rows: &[u16]) -> Self {
        let mut g = Graph {
            n: n as u8,
            rows: [0; MAX_VERTICES],
        };
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i] >> j & 1 == 1 {
                    g.rows[i] |= 1 << j;
                    g.rows[j] |= 1 << i;
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bitmask.
    #[inline]
    pub fn row(&self, v: usize) -> u16 {
        self.rows[v]
    }

    pub fn rows(&self) -> &[u16] {
        &self.rows[..self.n()]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        self.rows[v].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.rows().iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ordered by `v` then `u`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (1..n).flat_map(move |j| (0..j).filter(move |&i| self.has_edge(i, j)).map(move |i| (i, j)))
    }

    /// Upper-triangle adjacency bits in column order: (0,1), (0,2), (1,2), (0,3), ...
    pub fn upper_triangle(&self) -> Vec<bool> {
        let n = self.n();
        let mut bits = Vec::with_capacity(n * (n - 1) / 2);
        for j in 1..n {
            for i in 0..j {
                bits.push(self.has_edge(i, j));
            }
        }
        bits
    }

    /// Relabels vertices: vertex `v` of `self` becomes vertex `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.n();
        debug_assert_eq!(perm.len(), n);
        let mut out = Graph {
            n: self.n,
            rows: [0; MAX_VERTICES],
        };
        for u in 0..n {
            let mut row = self.rows[u];
            let mut new_row = 0u16;
            while row != 0 {
                let v = row.trailing_zeros() as usize;
                row &= row - 1;
                new_row |= 1 << perm[v];
            }
            out.rows[perm[u]] = new_row;
        }
        out
    }

    /// Graph with an extra vertex `n` joined to the vertices in `neighbours`.
    pub fn with_vertex(&self, neighbours: u16) -> Result<Graph, GraphError> {
        let n = self.n();
        if n + 1 > MAX_VERTICES {
            return Err(GraphError::VertexCount(n + 1));
        }
        let mut out = *self;
        out.n += 1;
        out.rows[n] = neighbours;
        for v in 0..n {
            if neighbours >> v & 1 == 1 {
                out.rows[v] |= 1 << n;
            }
        }
        Ok(out)
    }

    /// Connected components as vertex bitmasks, ordered by lowest vertex.
    pub fn components(&self) -> Vec<u16> {
        let n = self.n();
        let mut seen = 0u16;
        let mut out = Vec::new();
        for start in 0..n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u16 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0u16;
                let mut f = frontier;
                while f != 0 {
                    let v = f.trailing_zeros() as usize;
                    f &= f - 1;
                    next |= self.rows[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}
