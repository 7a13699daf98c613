//! Tail attachments and register-role assignments.
//!
//! Four semi-infinite tails hang off the graph. A [`TailMultiset`] records how
//! many tails each vertex carries; a [`PortAssignment`] says which tail plays
//! `0_in`, `1_in`, `0_out` and `1_out`. Tails on the same vertex are
//! physically interchangeable, so assignments are kept in a normal form where
//! slots on a vertex are handed out in register order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of tails attached to every scattering graph.
pub const TAILS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortError {
    #[error("tail counts sum to {0}, expected 4")]
    TailSum(usize),
    #[error("port ({vertex}, {slot}) is not a tail of the multiset")]
    NoSuchTail { vertex: u8, slot: u8 },
    #[error("ports are not distinct")]
    Duplicate,
    #[error("assignment does not use every tail of the multiset")]
    Mismatch,
}

/// Tail counts `M_v`, one per vertex, summing to four.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TailMultiset {
    counts: Vec<u8>,
}

impl TailMultiset {
    pub fn new(counts: Vec<u8>) -> Result<Self, PortError> {
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        if total != TAILS {
            return Err(PortError::TailSum(total));
        }
        Ok(TailMultiset { counts })
    }

    /// Multiset from the four attachment vertices (in any order).
    pub fn from_vertices(n: usize, vertices: [u8; 4]) -> Self {
        let mut counts = vec![0u8; n];
        for v in vertices {
            counts[v as usize] += 1;
        }
        TailMultiset { counts }
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, v: usize) -> u8 {
        self.counts[v]
    }

    /// Attachment vertices repeated by multiplicity, ascending.
    pub fn vertex_tuple(&self) -> [u8; 4] {
        let mut out = [0u8; 4];
        let mut k = 0;
        for (v, &c) in self.counts.iter().enumerate() {
            for _ in 0..c {
                out[k] = v as u8;
                k += 1;
            }
        }
        out
    }

    /// Distinct vertices carrying at least one tail, ascending.
    pub fn attachment_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.counts[v] > 0).collect()
    }

    /// Every tail as `(vertex, slot)`, in vertex order.
    pub fn tails(&self) -> Vec<Port> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| (0..c).map(move |slot| Port { vertex: v as u8, slot }))
            .collect()
    }
}

impl fmt::Display for TailMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All ways to attach four tails to `n` vertices, `C(n+3, 4)` of them, in
/// lexicographic order of the ascending attachment-vertex tuple.
pub fn enumerate_multisets(n: usize) -> Vec<TailMultiset> {
    let mut out = Vec::with_capacity(multiset_count(n) as usize);
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for d in c..n {
                    out.push(TailMultiset::from_vertices(n, [a as u8, b as u8, c as u8, d as u8]));
                }
            }
        }
    }
    out
}

/// `C(n+3, 4)`.
pub fn multiset_count(n: usize) -> u64 {
    let n = n as u64;
    (n + 3) * (n + 2) * (n + 1) * n / 24
}

/// A tail: attachment vertex plus slot index among that vertex's tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub vertex: u8,
    pub slot: u8,
}

/// Register roles in the order ports are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    In0 = 0,
    In1 = 1,
    Out0 = 2,
    Out1 = 3,
}

/// Tails for `0_in`, `1_in`, `0_out`, `1_out`, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortAssignment {
    ports: [Port; 4],
}

impl PortAssignment {
    /// Normal-form assignment from attachment vertices in register order.
    pub fn from_vertices(vertices: [u8; 4]) -> Self {
        let mut ports = [Port { vertex: 0, slot: 0 }; 4];
        for i in 0..4 {
            let slot = vertices[..i].iter().filter(|&&v| v == vertices[i]).count() as u8;
            ports[i] = Port {
                vertex: vertices[i],
                slot,
            };
        }
        PortAssignment { ports }
    }

    /// Validates explicit ports against a multiset and returns the normal form.
    pub fn new(ports: [Port; 4], m: &TailMultiset) -> Result<Self, PortError> {
        for p in &ports {
            if (p.vertex as usize) >= m.n() || p.slot >= m.count(p.vertex as usize) {
                return Err(PortError::NoSuchTail {
                    vertex: p.vertex,
                    slot: p.slot,
                });
            }
        }
        for i in 0..4 {
            if ports[..i].contains(&ports[i]) {
                return Err(PortError::Duplicate);
            }
        }
        let vertices = ports.map(|p| p.vertex);
        if TailMultiset::from_vertices(m.n(), vertices) != *m {
            return Err(PortError::Mismatch);
        }
        Ok(PortAssignment::from_vertices(vertices))
    }

    pub fn ports(&self) -> &[Port; 4] {
        &self.ports
    }

    pub fn port(&self, role: Role) -> Port {
        self.ports[role as usize]
    }

    /// Attachment vertices in register order; the serialized form.
    pub fn vertices(&self) -> [u8; 4] {
        self.ports.map(|p| p.vertex)
    }

    pub fn inputs(&self) -> [Port; 2] {
        [self.ports[0], self.ports[1]]
    }

    pub fn outputs(&self) -> [Port; 2] {
        [self.ports[2], self.ports[3]]
    }

    /// Exchanges the input pair with the output pair.
    pub fn swap_io(&self) -> Self {
        let [a, b, c, d] = self.vertices();
        PortAssignment::from_vertices([c, d, a, b])
    }

    /// Exchanges the `0` and `1` labels on both sides.
    pub fn swap_labels(&self) -> Self {
        let [a, b, c, d] = self.vertices();
        PortAssignment::from_vertices([b, a, d, c])
    }
}

impl fmt::Display for PortAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.vertices();
        write!(f, "({a},{b},{c},{d})")
    }
}

impl Serialize for PortAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.vertices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PortAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(PortAssignment::from_vertices(<[u8; 4]>::deserialize(d)?))
    }
}

/// Distinct register-role assignments over `m`, up to swapping tails on the
/// same vertex, in lexicographic order of the vertex tuple.
pub fn enumerate_role_assignments(m: &TailMultiset) -> Vec<PortAssignment> {
    let base = m.vertex_tuple();
    let mut out = Vec::new();
    let mut used = [false; 4];
    let mut current = [0u8; 4];
    fn rec(depth: usize, base: &[u8; 4], used: &mut [bool; 4], current: &mut [u8; 4], out: &mut Vec<PortAssignment>) {
        if depth == 4 {
            out.push(PortAssignment::from_vertices(*current));
            return;
        }
        for i in 0..4 {
            // skip repeated values so each distinct tuple appears once
            if used[i] || (i > 0 && base[i] == base[i - 1] && !used[i - 1]) {
                continue;
            }
            used[i] = true;
            current[depth] = base[i];
            rec(depth + 1, base, used, current, out);
            used[i] = false;
        }
    }
    rec(0, &base, &mut used, &mut current, &mut out);
    out
}
