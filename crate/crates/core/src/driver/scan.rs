use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DriverError, InputMode, ScanConfig};
use crate::catalog::{Catalog, Hit, ScanReport, Shard, StreamPos};
use crate::efflen::measure_lengths;
use crate::gatekit::{find_gates, Tolerances};
use crate::graphset::{enumerate_levels, read_graph6, write_graph6, Graph};
use crate::ports::{enumerate_multisets, enumerate_role_assignments};
use crate::scatter::{build_system, Momentum};

const CHECKPOINT: &str = "checkpoint.json";
const SHARD: &str = "shard.json";
const LOG: &str = "scan.log";

/// One graph and its place in the stream.
#[derive(Debug, Clone)]
pub struct WorkUnit {
    pub index: u64,
    pub graph: Graph,
}

/// A system that needed attention, written to the `.log` channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub event: String,
    pub graph6: String,
    pub multiset: String,
    pub momentum: Option<Momentum>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    /// Graphs fully processed, per vertex count.
    pub progress: BTreeMap<u8, u64>,
    /// Stream prefix covered by the shard file.
    pub done: u64,
    pub shard: String,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// False when the run stopped early and left a checkpoint.
    pub complete: bool,
    pub processed: u64,
    pub total: u64,
    pub catalog: Option<Catalog>,
    pub report: Option<ScanReport>,
}

/// Solves every multiset and momentum of one graph.
pub fn process_graph(unit: &WorkUnit, momenta: &[Momentum], tol: &Tolerances) -> (Shard, Vec<Diagnostic>) {
    let g = &unit.graph;
    let n = g.n();
    let mut shard = Shard::new();
    let mut diags = Vec::new();
    let diag = |event: &str, m: &crate::ports::TailMultiset, k: Momentum, detail: String| Diagnostic {
        event: event.into(),
        graph6: write_graph6(g),
        multiset: m.to_string(),
        momentum: Some(k),
        detail,
    };
    let mut singular = 0u64;
    for (mi, m) in enumerate_multisets(n).iter().enumerate() {
        for (ki, &k) in momenta.iter().enumerate() {
            shard.counts_mut(n, k).scanned += 1;
            let sys = match build_system(g, m, k) {
                Ok(s) => s,
                Err(e) => {
                    shard.counts_mut(n, k).failures += 1;
                    diags.push(diag("failure", m, k, e.to_string()));
                    continue;
                }
            };
            if sys.bound_states() > 0 {
                shard.counts_mut(n, k).singular += 1;
                singular += 1;
            }
            let found = match find_gates(&sys, tol) {
                Ok(f) => f,
                Err(e) => {
                    shard.counts_mut(n, k).failures += 1;
                    diags.push(diag("failure", m, k, e.to_string()));
                    continue;
                }
            };
            if found.gates.is_empty() {
                continue;
            }
            let order = enumerate_role_assignments(m);
            let mut hits = Vec::with_capacity(found.gates.len());
            let mut rejected = 0;
            let gate_count = found.gates.len() as u64;
            for c in found.gates {
                let consensus = measure_lengths(&sys, &c, tol, false).ok().and_then(|r| r.consensus);
                let Some(length) = consensus else {
                    rejected += 1;
                    continue;
                };
                let assignment = order.iter().position(|p| *p == c.assignment).unwrap_or(usize::MAX) as u32;
                hits.push(Hit {
                    candidate: c,
                    length,
                    pos: StreamPos {
                        graph: unit.index,
                        multiset: mi as u32,
                        momentum: ki as u32,
                        assignment,
                    },
                });
            }
            let counts = shard.counts_mut(n, k);
            counts.hits += gate_count;
            counts.hit_configs += 1;
            counts.rejected_length += rejected;
            if let Err(e) = shard.insert_configuration(&hits, tol) {
                shard.counts_mut(n, k).failures += 1;
                diags.push(diag("failure", m, k, e.to_string()));
            }
        }
    }
    // bound states are common; one line per graph keeps the log small
    if singular > 0 {
        diags.push(Diagnostic {
            event: "singular".into(),
            graph6: write_graph6(g),
            multiset: String::new(),
            momentum: None,
            detail: format!("{singular} systems needed bound-state completion"),
        });
    }
    (shard, diags)
}

/// Work units in stream order for the configured vertex range.
fn load_units(cfg: &ScanConfig) -> Result<Vec<WorkUnit>, DriverError> {
    let graphs: Vec<Graph> = match &cfg.input {
        InputMode::Enumerate => enumerate_levels(cfg.n_max)
            .map_err(|e| DriverError::Config(e.to_string()))?
            .into_iter()
            .skip(cfg.n_min - 1)
            .flatten()
            .map(|c| c.graph)
            .collect(),
        InputMode::Graph6(path) => {
            let mut out = Vec::new();
            for g in read_graph6(BufReader::new(File::open(path)?)) {
                let g = g?;
                if (cfg.n_min..=cfg.n_max).contains(&g.n()) {
                    out.push(g);
                }
            }
            out
        }
    };
    Ok(graphs
        .into_iter()
        .enumerate()
        .map(|(i, graph)| WorkUnit { index: i as u64, graph })
        .collect())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn log_line<T: Serialize>(log: &mut impl Write, value: &T) -> Result<(), DriverError> {
    serde_json::to_writer(&mut *log, value)?;
    log.write_all(b"\n")?;
    Ok(())
}

/// Runs the scan, writes the catalog files into `cfg.out` and returns the
/// report. Output does not depend on the number of workers or on how the
/// run was split by checkpoints.
pub fn scan(cfg: &ScanConfig) -> Result<ScanOutcome, DriverError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let hash = cfg.hash()?;
    let units = load_units(cfg)?;
    let total = units.len() as u64;

    let checkpoint_path = cfg.out.join(CHECKPOINT);
    let (mut shard, mut done) = if cfg.resume && checkpoint_path.exists() {
        let cp: Checkpoint = serde_json::from_reader(BufReader::new(File::open(&checkpoint_path)?))?;
        if cp.config_hash != hash {
            return Err(DriverError::HashMismatch {
                found: cp.config_hash,
                expected: hash,
            });
        }
        let shard = Shard::from_json(&fs::read_to_string(cfg.out.join(&cp.shard))?)?;
        log::info!("resuming after {} of {} graphs", cp.done, total);
        (shard, cp.done.min(total))
    } else {
        (Shard::new(), 0)
    };

    let mut log = BufWriter::new(OpenOptions::new().create(true).append(true).open(cfg.out.join(LOG))?);
    log_line(&mut log, &serde_json::json!({"event": "start", "config_hash": hash, "graphs": total, "from": done}))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| DriverError::Config(e.to_string()))?;
    let chunk = if cfg.checkpoint_every > 0 { cfg.checkpoint_every } else { total.max(1) };
    let mut this_run = 0u64;
    while done < total {
        let mut end = (done + chunk).min(total);
        if let Some(limit) = cfg.stop_after {
            if this_run >= limit {
                break;
            }
            end = end.min(done + (limit - this_run));
        }
        let slice = &units[done as usize..end as usize];
        let (part, diags) = pool.install(|| {
            slice
                .par_iter()
                .map(|u| process_graph(u, &cfg.momenta, &cfg.tol))
                .reduce(
                    || (Shard::new(), Vec::new()),
                    |(mut a, mut da), (b, db)| {
                        a.merge(b);
                        da.extend(db);
                        (a, da)
                    },
                )
        });
        shard.merge(part);
        for d in &diags {
            log_line(&mut log, d)?;
        }
        this_run += end - done;
        done = end;
        let last_n = units[done as usize - 1].graph.n();
        log::info!("{done}/{total} graphs (n = {last_n})");
        if cfg.checkpoint_every > 0 || cfg.stop_after.is_some() {
            let mut progress = BTreeMap::new();
            for u in &units[..done as usize] {
                *progress.entry(u.graph.n() as u8).or_insert(0) += 1;
            }
            write_atomic(&cfg.out.join(SHARD), shard.to_json()?.as_bytes())?;
            let cp = Checkpoint {
                config_hash: hash.clone(),
                progress,
                done,
                shard: SHARD.into(),
            };
            write_atomic(&checkpoint_path, serde_json::to_string_pretty(&cp)?.as_bytes())?;
            log_line(&mut log, &serde_json::json!({"event": "checkpoint", "done": done}))?;
        }
    }
    if done < total {
        log_line(&mut log, &serde_json::json!({"event": "stopped", "done": done}))?;
        log.flush()?;
        return Ok(ScanOutcome {
            complete: false,
            processed: done,
            total,
            catalog: None,
            report: None,
        });
    }

    let catalog = Catalog::finalize(shard, &cfg.tol);
    let report = catalog.emit(&cfg.out)?;
    for name in [CHECKPOINT, SHARD] {
        let p = cfg.out.join(name);
        if p.exists() {
            fs::remove_file(p)?;
        }
    }
    log_line(
        &mut log,
        &serde_json::json!({"event": "finish", "entries": catalog.len(), "totals": report.totals}),
    )?;
    log.flush()?;
    Ok(ScanOutcome {
        complete: true,
        processed: done,
        total,
        catalog: Some(catalog),
        report: Some(report),
    })
}
