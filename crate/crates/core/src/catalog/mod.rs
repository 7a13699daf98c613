//! Deduplication of gates into `(momentum, class, length)` entries, pairing
//! with commensurate identities, and the summary tables.
//!
//! A scan fills [`Shard`]s, which hold every hit under a rounded signature
//! and merge associatively. [`Catalog::finalize`] then clusters the
//! signatures with the real tolerances and numbers the entries.

mod finalize;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::efflen::LengthReport;
use crate::gatekit::{classify, GateCandidate, GateClass, GateError, Tolerances};
use crate::graphset::{canonical_form, canonical_form_coloured, write_graph6, Graph};
use crate::ports::TailMultiset;
use crate::scatter::Momentum;

pub use finalize::{angle_label, path_length, Catalog, CatalogEntry, EntryWitness};
pub use report::{AxisRow, MomentumTotals, OpArrival, ScanReport, SummaryRow, Totals, SUMMARY_HEADER};

/// Witness configurations kept per entry at its smallest vertex count.
pub const WITNESS_CAP: usize = 256;

/// Position in the deterministic configuration stream. Graph indices run
/// across all vertex counts, so the order is the scan order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct StreamPos {
    pub graph: u64,
    pub multiset: u32,
    pub momentum: u32,
    pub assignment: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub graph6: String,
    pub n: u8,
    /// Attachment vertices in role order `in0, in1, out0, out1`.
    pub vertices: [u8; 4],
    pub pos: StreamPos,
}

impl Witness {
    fn size_order(&self) -> (u8, StreamPos) {
        (self.n, self.pos)
    }
}

/// Counters for one `(n, momentum)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    /// Configurations (graph, tail multiset) solved.
    pub scanned: u64,
    /// Gates counted once per role assignment.
    pub hits: u64,
    /// Configurations with at least one gate.
    pub hit_configs: u64,
    /// Gates whose paths disagree on the effective length.
    pub rejected_length: u64,
    /// Systems that needed bound-state completion.
    pub singular: u64,
    /// Systems that could not be solved or failed the flux check.
    pub failures: u64,
}

impl Counts {
    pub fn add(&mut self, o: &Counts) {
        self.scanned += o.scanned;
        self.hits += o.hits;
        self.hit_configs += o.hit_configs;
        self.rejected_length += o.rejected_length;
        self.singular += o.singular;
        self.failures += o.failures;
    }
}

/// Rounded signature of a hit: momentum, phase-fixed matrix and length at
/// a resolution of `1e-6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RawKey {
    pub momentum: Momentum,
    pub matrix: [i64; 8],
    pub length: i64,
}

const KEY_SCALE: f64 = 1e6;

fn quantize(x: f64) -> i64 {
    let q = (x * KEY_SCALE).round();
    // -0 and 0 share a bucket
    if q == 0.0 {
        0
    } else {
        q as i64
    }
}

impl RawKey {
    fn new(momentum: Momentum, class: &GateClass, length: f64) -> Self {
        let mut matrix = [0i64; 8];
        for (i, z) in class.representative.entries().iter().enumerate() {
            matrix[2 * i] = quantize(z.re);
            matrix[2 * i + 1] = quantize(z.im);
        }
        RawKey {
            momentum,
            matrix,
            length: quantize(length),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEntry {
    /// Class and length of the first witness.
    pub class: GateClass,
    pub length: f64,
    /// Role assignments producing the signature.
    pub multiplicity: u64,
    /// Configurations producing the signature.
    pub configurations: u64,
    pub first: Witness,
    pub min_n: Witness,
    /// Canonical tailed configurations at the smallest `n`, the
    /// lexicographically smallest `WITNESS_CAP` of them.
    pub min_n_configs: BTreeSet<String>,
}

impl RawEntry {
    fn absorb(&mut self, o: RawEntry) {
        self.multiplicity += o.multiplicity;
        self.configurations += o.configurations;
        if o.first.pos < self.first.pos {
            self.first = o.first;
            self.class = o.class;
            self.length = o.length;
        }
        match o.min_n.n.cmp(&self.min_n.n) {
            std::cmp::Ordering::Less => {
                self.min_n = o.min_n;
                self.min_n_configs = o.min_n_configs;
            }
            std::cmp::Ordering::Equal => {
                if o.min_n.size_order() < self.min_n.size_order() {
                    self.min_n = o.min_n;
                }
                self.min_n_configs.extend(o.min_n_configs);
                cap(&mut self.min_n_configs);
            }
            std::cmp::Ordering::Greater => {}
        }
    }
}

fn cap(set: &mut BTreeSet<String>) {
    while set.len() > WITNESS_CAP {
        set.pop_last();
    }
}

/// Isomorphism class of a graph with tails attached, written as the
/// canonical graph6 plus the canonical tail counts.
pub fn tailed_key(g: &Graph, m: &TailMultiset) -> String {
    let c = canonical_form_coloured(g, m.counts());
    let counts: String = c.labeling.iter().map(|&v| char::from(b'0' + m.count(v as usize))).collect();
    format!("{}:{}", write_graph6(&c.graph), counts)
}

/// graph6 of the canonical form, the isomorphism class of the bare graph.
pub fn graph_key(g: &Graph) -> String {
    write_graph6(&canonical_form(g).graph)
}

/// A gate accepted for insertion: its candidate, consensus length and place
/// in the stream.
#[derive(Debug, Clone)]
pub struct Hit {
    pub candidate: GateCandidate,
    pub length: f64,
    pub pos: StreamPos,
}

/// Partial catalog over part of the configuration stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Shard {
    entries: BTreeMap<RawKey, RawEntry>,
    counts: BTreeMap<(u8, Momentum), Counts>,
}

#[derive(Serialize, Deserialize)]
struct ShardFile {
    entries: Vec<(RawKey, RawEntry)>,
    counts: Vec<((u8, Momentum), Counts)>,
}

impl Shard {
    pub fn new() -> Self {
        Shard::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.counts.is_empty()
    }

    pub fn raw_len(&self) -> usize {
        self.entries.len()
    }

    pub fn raw_entries(&self) -> impl Iterator<Item = (&RawKey, &RawEntry)> {
        self.entries.iter()
    }

    pub fn counts(&self) -> &BTreeMap<(u8, Momentum), Counts> {
        &self.counts
    }

    pub fn counts_mut(&mut self, n: usize, momentum: Momentum) -> &mut Counts {
        self.counts.entry((n as u8, momentum)).or_default()
    }

    /// Inserts one gate as a configuration of its own.
    pub fn insert(
        &mut self,
        c: &GateCandidate,
        lengths: &LengthReport,
        pos: StreamPos,
        tol: &Tolerances,
    ) -> Result<bool, GateError> {
        let Some(length) = lengths.consensus else {
            return Ok(false);
        };
        self.insert_configuration(
            &[Hit {
                candidate: c.clone(),
                length,
                pos,
            }],
            tol,
        )?;
        Ok(true)
    }

    /// Inserts every accepted gate of one configuration. Hits must share
    /// graph, multiset and momentum.
    pub fn insert_configuration(&mut self, hits: &[Hit], tol: &Tolerances) -> Result<(), GateError> {
        let Some(first) = hits.first() else {
            return Ok(());
        };
        let cfg = tailed_key(&first.candidate.graph, &first.candidate.multiset);
        let graph6 = first.candidate.graph6();
        let n = first.candidate.n() as u8;
        let mut seen = BTreeSet::new();
        for hit in hits {
            let c = &hit.candidate;
            let class = classify(c, tol)?;
            let key = RawKey::new(c.momentum, &class, hit.length);
            let witness = Witness {
                graph6: graph6.clone(),
                n,
                vertices: c.assignment.vertices(),
                pos: hit.pos,
            };
            let entry = RawEntry {
                class,
                length: hit.length,
                multiplicity: 1,
                configurations: u64::from(seen.insert(key)),
                first: witness.clone(),
                min_n: witness,
                min_n_configs: BTreeSet::from([cfg.clone()]),
            };
            self.add_raw(key, entry);
        }
        Ok(())
    }

    fn add_raw(&mut self, key: RawKey, entry: RawEntry) {
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(entry);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => o.get_mut().absorb(entry),
        }
    }

    /// Associative, commutative union.
    pub fn merge(&mut self, other: Shard) {
        for (k, e) in other.entries {
            self.add_raw(k, e);
        }
        for (k, c) in other.counts {
            self.counts.entry(k).or_default().add(&c);
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(&ShardFile {
            entries: self.entries.iter().map(|(k, e)| (*k, e.clone())).collect(),
            counts: self.counts.iter().map(|(k, c)| (*k, *c)).collect(),
        })
    }

    pub fn from_json(s: &str) -> serde_json::Result<Shard> {
        let f: ShardFile = serde_json::from_str(s)?;
        Ok(Shard {
            entries: f.entries.into_iter().collect(),
            counts: f.counts.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests;
