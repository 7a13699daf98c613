use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::finalize::path_length;
use super::{Catalog, CatalogEntry, Counts};
use crate::gatekit::Tolerances;
use crate::scatter::Momentum;

pub const SUMMARY_HEADER: &str = "n,k_p,k_q,scanned,hits,distinct,non_identity,usable,distinct_ops,hit_configs";

/// Cumulative figures over graphs with at most `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: u8,
    pub momentum: Momentum,
    pub scanned: u64,
    /// Per role assignment.
    pub hits: u64,
    /// Per configuration.
    pub hit_configs: u64,
    pub distinct: u64,
    pub non_identity: u64,
    /// Entries whose commensurate identity is also available by `n`.
    pub usable: u64,
    pub distinct_ops: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRow {
    pub momentum: Momentum,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumTotals {
    pub momentum: Momentum,
    pub hits: u64,
    pub hit_configs: u64,
    pub distinct: u64,
    pub non_identity: u64,
    pub usable: u64,
    pub unusable: u64,
    pub distinct_ops: u64,
    /// Usable non-identity operations.
    pub rotations: u64,
    /// Distinct axes among them.
    pub axes: u64,
}

/// A usable operation becoming available at `n`, with the tailed
/// configurations on `n` vertices that produce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpArrival {
    pub momentum: Momentum,
    pub op_class: usize,
    pub n: u8,
    pub configurations: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub scanned: u64,
    pub hits: u64,
    pub hit_configs: u64,
    pub distinct: u64,
    pub non_identity: u64,
    pub usable: u64,
    pub unusable: u64,
    pub distinct_ops: u64,
    /// Operations counted once across momenta.
    pub distinct_ops_any_momentum: u64,
    pub max_length: Option<f64>,
    pub max_length_form: Option<String>,
    pub usable_length_ge_10: u64,
    pub usable_length_ge_100: u64,
    pub negative_lengths: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<SummaryRow>,
    pub axes: Vec<AxisRow>,
    pub per_momentum: Vec<MomentumTotals>,
    pub arrivals: Vec<OpArrival>,
    pub totals: Totals,
}

impl ScanReport {
    /// New usable operations on exactly `n` vertices, summed over momenta.
    pub fn new_operations(&self, n: u8) -> usize {
        self.arrivals.iter().filter(|a| a.n == n).count()
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SUMMARY_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.momentum.p(),
                r.momentum.q(),
                r.scanned,
                r.hits,
                r.distinct,
                r.non_identity,
                r.usable,
                r.distinct_ops,
                r.hit_configs
            )?;
        }
        Ok(())
    }

    pub fn write_axes_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k_p,k_q,theta,phi")?;
        for a in &self.axes {
            writeln!(w, "{},{},{},{}", a.momentum.p(), a.momentum.q(), a.theta, a.phi)?;
        }
        Ok(())
    }
}

/// Tolerance for calling two rotation axes parallel.
const AXIS_MATCH: f64 = 1e-6;

fn same_axis(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= AXIS_MATCH && ((a.1 - b.1).abs() <= AXIS_MATCH || a.0 <= AXIS_MATCH)
}

impl Catalog {
    /// Vertex count at which each entry and its identity partner are both
    /// available; `None` when no partner exists.
    fn availability(&self) -> Vec<Option<u8>> {
        let mut identity_n: BTreeMap<usize, u8> = BTreeMap::new();
        for e in self.entries.iter().filter(|e| e.is_identity()) {
            let slot = identity_n.entry(e.length_class).or_insert(e.n);
            *slot = (*slot).min(e.n);
        }
        self.entries
            .iter()
            .map(|e| {
                if path_length(e.length, &Tolerances::default()) {
                    Some(e.n)
                } else {
                    identity_n.get(&e.length_class).map(|&i| i.max(e.n))
                }
            })
            .collect()
    }

    pub fn report(&self) -> ScanReport {
        let avail = self.availability();
        let momenta = self.momenta();
        let mut sizes: BTreeSet<u8> = self.counts.keys().map(|k| k.0).collect();
        sizes.extend(self.entries.iter().map(|e| e.n));

        // earliest availability of each operation
        let mut op_n: BTreeMap<usize, (Momentum, u8)> = BTreeMap::new();
        for (e, a) in self.entries.iter().zip(&avail) {
            if let Some(a) = *a {
                let slot = op_n.entry(e.op_class).or_insert((e.momentum, a));
                slot.1 = slot.1.min(a);
            }
        }

        let mut rows = Vec::new();
        for &n in &sizes {
            for &k in &momenta {
                let mut c = Counts::default();
                for (_, cell) in self.counts.range((0, k)..=(n, k)).filter(|(key, _)| key.1 == k) {
                    c.add(cell);
                }
                let here: Vec<(&CatalogEntry, &Option<u8>)> =
                    self.entries.iter().zip(&avail).filter(|(e, _)| e.momentum == k && e.n <= n).collect();
                rows.push(SummaryRow {
                    n,
                    momentum: k,
                    scanned: c.scanned,
                    hits: c.hits,
                    hit_configs: c.hit_configs,
                    distinct: here.len() as u64,
                    non_identity: here.iter().filter(|(e, _)| !e.is_identity()).count() as u64,
                    usable: here.iter().filter(|(_, a)| a.is_some_and(|a| a <= n)).count() as u64,
                    distinct_ops: op_n.values().filter(|&&(m, a)| m == k && a <= n).count() as u64,
                });
            }
        }

        let mut arrivals = Vec::new();
        for (&op, &(momentum, n)) in &op_n {
            let mut configurations: BTreeSet<String> = BTreeSet::new();
            for (e, a) in self.entries.iter().zip(&avail) {
                if e.op_class == op && *a == Some(n) && e.n == n {
                    configurations.extend(e.min_n_configurations.iter().cloned());
                }
            }
            arrivals.push(OpArrival {
                momentum,
                op_class: op,
                n,
                configurations: configurations.into_iter().collect(),
            });
        }

        let mut axes = Vec::new();
        let mut per_momentum = Vec::new();
        for &k in &momenta {
            let mine: Vec<&CatalogEntry> = self.entries.iter().filter(|e| e.momentum == k).collect();
            let mut ops: BTreeMap<usize, &CatalogEntry> = BTreeMap::new();
            for e in mine.iter().filter(|e| e.usable) {
                ops.entry(e.op_class).or_insert(e);
            }
            let mut found: Vec<(f64, f64)> = Vec::new();
            for e in ops.values().filter(|e| !e.is_identity()) {
                let axis = (e.theta, e.phi);
                if !found.iter().any(|&f| same_axis(f, axis)) {
                    found.push(axis);
                }
            }
            found.sort_by(|a, b| a.partial_cmp(b).unwrap());
            axes.extend(found.iter().map(|&(theta, phi)| AxisRow { momentum: k, theta, phi }));
            let cells = self.counts.iter().filter(|(key, _)| key.1 == k);
            let (hits, hit_configs) = cells.fold((0, 0), |acc, (_, c)| (acc.0 + c.hits, acc.1 + c.hit_configs));
            let usable = mine.iter().filter(|e| e.usable).count() as u64;
            per_momentum.push(MomentumTotals {
                momentum: k,
                hits,
                hit_configs,
                distinct: mine.len() as u64,
                non_identity: mine.iter().filter(|e| !e.is_identity()).count() as u64,
                usable,
                unusable: mine.len() as u64 - usable,
                distinct_ops: ops.len() as u64,
                rotations: ops.values().filter(|e| !e.is_identity()).count() as u64,
                axes: found.len() as u64,
            });
        }

        let mut totals = Totals::default();
        for c in self.counts.values() {
            totals.scanned += c.scanned;
            totals.hits += c.hits;
            totals.hit_configs += c.hit_configs;
        }
        for m in &per_momentum {
            totals.distinct += m.distinct;
            totals.non_identity += m.non_identity;
            totals.usable += m.usable;
            totals.unusable += m.unusable;
            totals.distinct_ops += m.distinct_ops;
        }
        let mut across: Vec<&CatalogEntry> = Vec::new();
        let mut seen_ops = BTreeSet::new();
        for e in self.entries.iter().filter(|e| e.usable && seen_ops.insert(e.op_class)) {
            let rep = e.representative();
            if !across.iter().any(|o| crate::gatekit::equal_up_to_phase(&o.representative(), &rep, 1e-9)) {
                across.push(e);
            }
        }
        totals.distinct_ops_any_momentum = across.len() as u64;
        if let Some(e) = self.entries.iter().max_by(|a, b| a.length.total_cmp(&b.length)) {
            totals.max_length = Some(e.length);
            totals.max_length_form = e.length_form.clone();
        }
        let usable = self.entries.iter().filter(|e| e.usable);
        totals.usable_length_ge_10 = usable.clone().filter(|e| e.length >= 10.0 - 1e-6).count() as u64;
        totals.usable_length_ge_100 = usable.filter(|e| e.length >= 100.0 - 1e-6).count() as u64;
        totals.negative_lengths = self.entries.iter().filter(|e| e.length < -1e-9).count() as u64;

        ScanReport {
            rows,
            axes,
            per_momentum,
            arrivals,
            totals,
        }
    }

    /// Usable entries on exactly `n` vertices whose operation is not
    /// produced at the same momentum by a usable entry on fewer vertices.
    pub fn first_appearances(&self, n: u8) -> Vec<&CatalogEntry> {
        let earlier: BTreeSet<usize> =
            self.entries.iter().filter(|e| e.usable && e.n < n).map(|e| e.op_class).collect();
        self.entries
            .iter()
            .filter(|e| e.usable && e.n == n && !earlier.contains(&e.op_class))
            .collect()
    }

    /// Writes `catalog.jsonl`, `summary.csv`, `axes.csv` and `counts.json`.
    pub fn emit(&self, dir: &Path) -> io::Result<ScanReport> {
        std::fs::create_dir_all(dir)?;
        let report = self.report();
        let mut w = BufWriter::new(File::create(dir.join("catalog.jsonl"))?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("summary.csv"))?);
        report.write_summary_csv(&mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("axes.csv"))?);
        report.write_axes_csv(&mut w)?;
        w.flush()?;
        let counts: Vec<CountRecord> = self
            .counts
            .iter()
            .map(|(&(n, momentum), &counts)| CountRecord { n, momentum, counts })
            .collect();
        let mut w = BufWriter::new(File::create(dir.join("counts.json"))?);
        serde_json::to_writer_pretty(&mut w, &counts)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(report)
    }

    /// Reads `catalog.jsonl` and, when present next to it, `counts.json`.
    pub fn load(catalog: &Path) -> io::Result<Catalog> {
        let mut c = Catalog::read_jsonl(BufReader::new(File::open(catalog)?))?;
        let counts_path = catalog.with_file_name("counts.json");
        if counts_path.exists() {
            let records: Vec<CountRecord> = serde_json::from_reader(BufReader::new(File::open(counts_path)?))?;
            c.counts = records.into_iter().map(|r| ((r.n, r.momentum), r.counts)).collect();
        }
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct CountRecord {
    n: u8,
    momentum: Momentum,
    #[serde(flatten)]
    counts: Counts,
}
