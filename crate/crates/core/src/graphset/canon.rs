//! Canonical labelling by equitable partition refinement and a search tree
//! pruned with the automorphisms found along the way.
//!
//! The canonical form of a graph is the relabelling, among the leaves of the
//! search tree, whose adjacency rows are lexicographically greatest. Leaves
//! that produce the same relabelled graph as the first or best leaf yield
//! automorphisms; those generate the full automorphism group, so the orbit
//! partition reported alongside the canonical form is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{Graph, MAX_VERTICES};
use super::graph6;

/// Isomorphism-invariant encoding of a graph: vertex count, optional vertex
/// colours in canonical order, then the graph6 body of the canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// Result of canonical labelling.
#[derive(Debug, Clone)]
pub struct Canonical {
    /// The canonically relabelled graph.
    pub graph: Graph,
    /// `labeling[i]` is the original vertex that receives canonical label `i`.
    pub labeling: Vec<u8>,
    /// Smallest vertex of each vertex's automorphism orbit.
    pub orbits: Vec<u8>,
}

impl Canonical {
    /// Canonical position of original vertex `v`.
    pub fn position_of(&self, v: usize) -> usize {
        self.labeling.iter().position(|&x| x as usize == v).unwrap()
    }
}

type Rows = [u16; MAX_VERTICES];
type Lab = [u8; MAX_VERTICES];

#[derive(Clone, Copy)]
struct Partition {
    lab: Lab,
    /// Bit `i` set when position `i` starts a cell.
    starts: u16,
    n: u8,
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut lab = [0u8; MAX_VERTICES];
        for (i, l) in lab.iter_mut().enumerate().take(n) {
            *l = i as u8;
        }
        Partition { lab, starts: 1, n: n as u8 }
    }

    fn coloured(colours: &[u8]) -> Self {
        let n = colours.len();
        let mut p = Partition::unit(n);
        p.lab[..n].sort_by_key(|&v| (colours[v as usize], v));
        p.starts = 1;
        for i in 1..n {
            if colours[p.lab[i] as usize] != colours[p.lab[i - 1] as usize] {
                p.starts |= 1 << i;
            }
        }
        p
    }

    #[inline]
    fn cell_end(&self, start: usize) -> usize {
        let n = self.n as usize;
        let rest = (self.starts as u32) >> (start + 1);
        if rest == 0 {
            n
        } else {
            (start + 1 + rest.trailing_zeros() as usize).min(n)
        }
    }

    fn mask(&self, start: usize, end: usize) -> u16 {
        self.lab[start..end].iter().fold(0u16, |m, &v| m | 1 << v)
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n as usize;
        let mut start = 0;
        std::iter::from_fn(move || {
            if start >= n {
                return None;
            }
            let end = self.cell_end(start);
            let cell = (start, end);
            start = end;
            Some(cell)
        })
    }

    /// Splits cells until every cell has a uniform neighbour count into every
    /// other cell. Sub-cells are ordered by increasing count.
    fn refine(&mut self, g: &Graph) {
        'outer: loop {
            let cells: Vec<(usize, usize)> = self.cells().collect();
            for &(ws, we) in &cells {
                let wmask = self.mask(ws, we);
                for &(xs, xe) in &cells {
                    if xe - xs < 2 {
                        continue;
                    }
                    let mut counts = [0u8; MAX_VERTICES];
                    let mut uniform = true;
                    for i in xs..xe {
                        counts[i] = (g.row(self.lab[i] as usize) & wmask).count_ones() as u8;
                        uniform &= counts[i] == counts[xs];
                    }
                    if uniform {
                        continue;
                    }
                    // insertion sort keeps equal counts in place
                    for i in (xs + 1)..xe {
                        let mut j = i;
                        while j > xs && counts[j - 1] > counts[j] {
                            counts.swap(j - 1, j);
                            self.lab.swap(j - 1, j);
                            j -= 1;
                        }
                    }
                    for i in (xs + 1)..xe {
                        if counts[i] != counts[i - 1] {
                            self.starts |= 1 << i;
                        }
                    }
                    continue 'outer;
                }
            }
            break;
        }
    }

    fn first_nontrivial_cell(&self) -> Option<(usize, usize)> {
        self.cells().find(|&(s, e)| e - s > 1)
    }

    /// Puts `v` (at position `pos` inside the cell starting at `start`) into
    /// its own cell at the front.
    fn individualize(&self, start: usize, pos: usize) -> Partition {
        let mut p = *self;
        let v = p.lab[pos];
        p.lab.copy_within(start..pos, start + 1);
        p.lab[start] = v;
        p.starts |= 1 << (start + 1);
        p
    }
}

struct Search<'g> {
    g: &'g Graph,
    n: usize,
    first: Option<(Rows, Lab)>,
    best: Option<(Rows, Lab)>,
    generators: Vec<Lab>,
    prefix: Vec<u8>,
}

fn find(parent: &mut [u8], x: u8) -> u8 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut x = x;
    while parent[x as usize] != r {
        let next = parent[x as usize];
        parent[x as usize] = r;
        x = next;
    }
    r
}

fn orbit_roots<'a>(n: usize, gens: impl Iterator<Item = &'a Lab>) -> Lab {
    let mut parent = [0u8; MAX_VERTICES];
    for (i, p) in parent.iter_mut().enumerate().take(n) {
        *p = i as u8;
    }
    for gamma in gens {
        for v in 0..n {
            let a = find(&mut parent, v as u8);
            let b = find(&mut parent, gamma[v]);
            if a != b {
                // keep the smaller vertex as root
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    for v in 0..n {
        parent[v] = find(&mut parent, v as u8);
    }
    parent
}

impl<'g> Search<'g> {
    fn certificate(&self, lab: &Lab) -> Rows {
        let mut perm = [0usize; MAX_VERTICES];
        for (i, &v) in lab.iter().enumerate().take(self.n) {
            perm[v as usize] = i;
        }
        let mut rows = [0u16; MAX_VERTICES];
        for i in 0..self.n {
            let mut r = self.g.row(lab[i] as usize);
            let mut out = 0u16;
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                r &= r - 1;
                out |= 1 << perm[v];
            }
            rows[i] = out;
        }
        rows
    }

    fn record_automorphism(&mut self, lab: &Lab, target: &Lab) {
        let mut gamma = [0u8; MAX_VERTICES];
        for i in 0..self.n {
            gamma[lab[i] as usize] = target[i];
        }
        if (0..self.n).all(|v| gamma[v] as usize == v) {
            return;
        }
        if !self.generators.contains(&gamma) {
            self.generators.push(gamma);
        }
    }

    fn leaf(&mut self, p: &Partition) {
        let cert = self.certificate(&p.lab);
        let Some((first_cert, first_lab)) = self.first else {
            self.first = Some((cert, p.lab));
            self.best = Some((cert, p.lab));
            return;
        };
        if cert[..self.n] == first_cert[..self.n] {
            self.record_automorphism(&p.lab, &first_lab);
            return;
        }
        let (best_cert, best_lab) = self.best.unwrap();
        match cert[..self.n].cmp(&best_cert[..self.n]) {
            std::cmp::Ordering::Equal => self.record_automorphism(&p.lab, &best_lab),
            std::cmp::Ordering::Greater => self.best = Some((cert, p.lab)),
            std::cmp::Ordering::Less => {}
        }
    }

    fn explore(&mut self, mut p: Partition) {
        p.refine(self.g);
        let Some((start, end)) = p.first_nontrivial_cell() else {
            self.leaf(&p);
            return;
        };
        let mut cell: Vec<u8> = p.lab[start..end].to_vec();
        cell.sort_unstable();
        let mut explored: Vec<u8> = Vec::with_capacity(cell.len());
        for &v in &cell {
            if !explored.is_empty() {
                let prefix = &self.prefix;
                let fixing = self
                    .generators
                    .iter()
                    .filter(|gamma| prefix.iter().all(|&x| gamma[x as usize] == x));
                let roots = orbit_roots(self.n, fixing);
                let rv = roots[v as usize];
                if explored.iter().any(|&u| roots[u as usize] == rv) {
                    continue;
                }
            }
            let pos = start + p.lab[start..end].iter().position(|&x| x == v).unwrap();
            let child = p.individualize(start, pos);
            self.prefix.push(v);
            self.explore(child);
            self.prefix.pop();
            explored.push(v);
        }
    }
}

fn run(g: &Graph, initial: Partition) -> Canonical {
    let n = g.n();
    let mut search = Search {
        g,
        n,
        first: None,
        best: None,
        generators: Vec::new(),
        prefix: Vec::with_capacity(n),
    };
    search.explore(initial);
    let (rows, lab) = search.best.expect("search visits at least one leaf");
    let orbits = orbit_roots(n, search.generators.iter());
    Canonical {
        graph: Graph::from_rows_upper(n, &rows[..n]),
        labeling: lab[..n].to_vec(),
        orbits: orbits[..n].to_vec(),
    }
}

/// Canonical form, canonical labelling and automorphism orbits of `g`.
pub fn canonical_form(g: &Graph) -> Canonical {
    run(g, Partition::unit(g.n()))
}

/// Like [`canonical_form`], for a vertex-coloured graph. Automorphisms must
/// preserve colours; colours are ordered by value in the canonical labelling.
pub fn canonical_form_coloured(g: &Graph, colours: &[u8]) -> Canonical {
    assert_eq!(colours.len(), g.n(), "one colour per vertex");
    let c = run(g, Partition::coloured(colours));
    debug_assert!(c.labeling.windows(2).all(|w| colours[w[0] as usize] <= colours[w[1] as usize]));
    c
}

pub fn canonical_key(g: &Graph) -> CanonicalKey {
    key_of(&canonical_form(g).graph, None)
}

/// Key of a vertex-coloured graph; equal iff a colour-preserving isomorphism exists.
pub fn canonical_key_coloured(g: &Graph, colours: &[u8]) -> CanonicalKey {
    let c = canonical_form_coloured(g, colours);
    let ordered: Vec<u8> = c.labeling.iter().map(|&v| colours[v as usize]).collect();
    key_of(&c.graph, Some(&ordered))
}

/// Key of a graph already in canonical form.
pub(crate) fn key_of(canonical: &Graph, colours: Option<&[u8]>) -> CanonicalKey {
    let mut bytes = vec![canonical.n() as u8];
    if let Some(colours) = colours {
        bytes.extend_from_slice(colours);
    }
    bytes.extend(graph6::pack_bits(&canonical.upper_triangle()));
    CanonicalKey(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn relabelled_paths_share_a_key() {
        // a-b-c versus b-a-c
        let p1 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p2 = Graph::from_edges(3, &[(1, 0), (0, 2)]).unwrap();
        assert_eq!(canonical_key(&p1), canonical_key(&p2));
    }

    #[test]
    fn path_and_triangle_differ() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_ne!(canonical_key(&path), canonical_key(&tri));
    }

    #[test]
    fn all_labelings_of_three_path_agree() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let keys: std::collections::HashSet<_> =
            all_perms(3).iter().map(|p| canonical_key(&path.permuted(p))).collect();
        assert_eq!(keys.len(), 1);
    }

    #[test]
    fn orbits_of_a_path() {
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = canonical_form(&path);
        assert_eq!(c.orbits, vec![0, 1, 1, 0]);
    }

    #[test]
    fn orbits_of_symmetric_graphs() {
        let empty = Graph::empty(9).unwrap();
        assert!(canonical_form(&empty).orbits.iter().all(|&o| o == 0));
        let mut k = Graph::empty(9).unwrap();
        for u in 0..9 {
            for v in (u + 1)..9 {
                k.add_edge(u, v).unwrap();
            }
        }
        assert!(canonical_form(&k).orbits.iter().all(|&o| o == 0));
    }

    #[test]
    fn colours_break_symmetry() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let a = canonical_key_coloured(&path, &[1, 0, 0]);
        let b = canonical_key_coloured(&path, &[0, 0, 1]);
        let c = canonical_key_coloured(&path, &[0, 1, 0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let cf = canonical_form_coloured(&path, &[1, 0, 0]);
        assert_eq!(cf.orbits, vec![0, 1, 2]);
    }

    #[test]
    fn labelling_maps_to_canonical_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (2, 3)]).unwrap();
        let c = canonical_form(&g);
        let mut perm = vec![0; 5];
        for (i, &v) in c.labeling.iter().enumerate() {
            perm[v as usize] = i;
        }
        assert_eq!(g.permuted(&perm), c.graph);
    }
}
