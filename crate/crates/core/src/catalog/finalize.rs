use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cap, Counts, RawEntry, RawKey, Shard, StreamPos, Witness};
use crate::gatekit::{
    equal_up_to_phase, recognize_quadratic_surd, recognize_rational, AngleForm, GateClass, GateKind, Mat2,
    QuadraticSurd, Rational, Tolerances,
};
use crate::scatter::Momentum;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryWitness {
    pub graph6: String,
    pub n: u8,
    pub vertices: [u8; 4],
}

impl From<&Witness> for EntryWitness {
    fn from(w: &Witness) -> Self {
        EntryWitness {
            graph6: w.graph6.clone(),
            n: w.n,
            vertices: w.vertices,
        }
    }
}

/// One deduplicated gate, as written to `catalog.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: usize,
    pub momentum: Momentum,
    pub kind: GateKind,
    /// Phase-fixed operator, row-major, as `re, im` pairs.
    pub matrix: [f64; 8],
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub angle_form: String,
    pub length: f64,
    pub length_form: Option<String>,
    /// Entries with equal ids have commensurate lengths.
    pub length_class: usize,
    /// Entries with equal ids perform the same operation.
    pub op_class: usize,
    pub usable: bool,
    /// Role assignments producing the entry.
    pub multiplicity: u64,
    /// Configurations producing the entry.
    pub configurations: u64,
    /// Smallest vertex count producing the entry.
    pub n: u8,
    pub witness: EntryWitness,
    pub min_n_witness: EntryWitness,
    /// Canonical tailed configurations at `n`, capped.
    pub min_n_configurations: Vec<String>,
}

impl CatalogEntry {
    pub fn is_identity(&self) -> bool {
        self.kind == GateKind::Identity
    }

    pub fn representative(&self) -> Mat2 {
        let m = &self.matrix;
        let z = |i: usize| Complex64::new(m[2 * i], m[2 * i + 1]);
        Mat2::new(z(0), z(1), z(2), z(3))
    }

    pub fn class(&self, tol: &Tolerances) -> GateClass {
        let angle_form = match recognize_rational(self.alpha / PI, tol.q_max, tol.rational) {
            Some(Rational { p, q }) => AngleForm::RationalPi { p, q },
            None => AngleForm::IrrationalCandidate,
        };
        GateClass {
            representative: self.representative(),
            kind: self.kind,
            theta: self.theta,
            phi: self.phi,
            alpha: self.alpha,
            angle_form,
        }
    }
}

/// `pi`, `-pi/2`, `3pi/4`, `0` or `irrational`.
pub fn angle_label(form: &AngleForm) -> String {
    match *form {
        AngleForm::IrrationalCandidate => "irrational".into(),
        AngleForm::RationalPi { p: 0, .. } => "0".into(),
        AngleForm::RationalPi { p, q } => {
            let num = match p {
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                p => format!("{p}pi"),
            };
            if q == 1 {
                num
            } else {
                format!("{num}/{q}")
            }
        }
    }
}

/// Final catalog: entries in first-witness order plus the scan counters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub counts: BTreeMap<(u8, Momentum), Counts>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    /// Keeps the smaller root so labels do not depend on union order.
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.0[hi] = lo;
        }
    }
}

/// Aggregate of the raw signatures sharing an operator and length cluster.
struct Group {
    first: RawEntry,
    multiplicity: u64,
    configurations: u64,
    min_n: Witness,
    min_n_configs: BTreeSet<String>,
    form: Option<QuadraticSurd>,
    length_cluster: (Momentum, usize),
    op_cluster: (Momentum, usize),
}

impl Group {
    fn absorb(&mut self, e: &RawEntry) {
        self.multiplicity += e.multiplicity;
        self.configurations += e.configurations;
        if e.first.pos < self.first.first.pos {
            let (m, c) = (self.first.multiplicity, self.first.configurations);
            self.first = e.clone();
            self.first.multiplicity = m;
            self.first.configurations = c;
        }
        if e.min_n.n < self.min_n.n {
            self.min_n = e.min_n.clone();
            self.min_n_configs = e.min_n_configs.clone();
        } else if e.min_n.n == self.min_n.n {
            if e.min_n.size_order() < self.min_n.size_order() {
                self.min_n = e.min_n.clone();
            }
            self.min_n_configs.extend(e.min_n_configs.iter().cloned());
            cap(&mut self.min_n_configs);
        }
    }
}

/// Single-linkage clusters of one momentum's operators; returns the cluster
/// root of every distinct rounded matrix.
fn op_clusters(raw: &[(&RawKey, &RawEntry)], tol: &Tolerances) -> HashMap<[i64; 8], usize> {
    let mut reps: BTreeMap<[i64; 8], Mat2> = BTreeMap::new();
    for (k, e) in raw {
        reps.entry(k.matrix).or_insert(e.class.representative);
    }
    let keys: Vec<[i64; 8]> = reps.keys().copied().collect();
    let mats: Vec<Mat2> = reps.values().copied().collect();
    let mut uf = UnionFind::new(keys.len());
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if equal_up_to_phase(&mats[i], &mats[j], tol.gate) {
                uf.union(i, j);
            }
        }
    }
    keys.iter().enumerate().map(|(i, k)| (*k, uf.find(i))).collect()
}

/// Length clusters of one momentum: neighbours within `tol.len` chain
/// together, and clusters whose values share a closed form are joined.
fn length_clusters(
    raw: &[(&RawKey, &RawEntry)],
    tol: &Tolerances,
) -> (HashMap<i64, usize>, HashMap<usize, Option<QuadraticSurd>>) {
    // (min, max, value of the earliest witness, its position)
    let mut buckets: BTreeMap<i64, (f64, f64, f64, StreamPos)> = BTreeMap::new();
    for (k, e) in raw {
        let b = buckets.entry(k.length).or_insert((e.length, e.length, e.length, e.first.pos));
        b.0 = b.0.min(e.length);
        b.1 = b.1.max(e.length);
        if e.first.pos < b.3 {
            b.2 = e.length;
            b.3 = e.first.pos;
        }
    }
    let keys: Vec<i64> = buckets.keys().copied().collect();
    let vals: Vec<(f64, f64, f64, StreamPos)> = buckets.values().copied().collect();
    let mut uf = UnionFind::new(keys.len());
    for i in 1..vals.len() {
        if vals[i].0 - vals[i - 1].1 <= tol.len {
            uf.union(i - 1, i);
        }
    }
    // earliest value of each numeric cluster decides its closed form
    let mut earliest: BTreeMap<usize, (StreamPos, f64)> = BTreeMap::new();
    for (i, v) in vals.iter().enumerate() {
        let r = uf.find(i);
        let slot = earliest.entry(r).or_insert((v.3, v.2));
        if v.3 < slot.0 {
            *slot = (v.3, v.2);
        }
    }
    let forms: BTreeMap<usize, Option<QuadraticSurd>> = earliest
        .iter()
        .map(|(&r, &(_, x))| (r, recognize_quadratic_surd(x, tol.coeff_bound, tol.surd)))
        .collect();
    let mut by_form: BTreeMap<(i64, i64, i64, i64), usize> = BTreeMap::new();
    for (&r, f) in &forms {
        if let Some(s) = f {
            match by_form.get(&(s.a, s.b, s.d, s.den)) {
                Some(&other) => uf.union(other, r),
                None => {
                    by_form.insert((s.a, s.b, s.d, s.den), r);
                }
            }
        }
    }
    let mut root_form: HashMap<usize, Option<QuadraticSurd>> = HashMap::new();
    for (&r, f) in &forms {
        let root = uf.find(r);
        let slot = root_form.entry(root).or_insert(None);
        if slot.is_none() {
            *slot = *f;
        }
    }
    let map = keys.iter().enumerate().map(|(i, k)| (*k, uf.find(i))).collect();
    (map, root_form)
}

/// A bare path of `L` edges is an identity of length `L` at every momentum,
/// so integer lengths always have an identity partner.
pub fn path_length(length: f64, tol: &Tolerances) -> bool {
    length > -tol.len && (length - length.round()).abs() <= tol.len
}

impl Catalog {
    /// Clusters the raw signatures of a complete shard into entries.
    pub fn finalize(shard: Shard, tol: &Tolerances) -> Catalog {
        let mut by_momentum: BTreeMap<Momentum, Vec<(&RawKey, &RawEntry)>> = BTreeMap::new();
        for (k, e) in shard.entries.iter() {
            by_momentum.entry(k.momentum).or_default().push((k, e));
        }
        let mut groups: BTreeMap<(Momentum, usize, usize), Group> = BTreeMap::new();
        for (&momentum, raw) in &by_momentum {
            let ops = op_clusters(raw, tol);
            let (lens, forms) = length_clusters(raw, tol);
            for (k, e) in raw {
                let oc = ops[&k.matrix];
                let lc = lens[&k.length];
                groups
                    .entry((momentum, oc, lc))
                    .and_modify(|g| g.absorb(e))
                    .or_insert_with(|| Group {
                        first: (*e).clone(),
                        multiplicity: e.multiplicity,
                        configurations: e.configurations,
                        min_n: e.min_n.clone(),
                        min_n_configs: e.min_n_configs.clone(),
                        form: forms[&lc],
                        length_cluster: (momentum, lc),
                        op_cluster: (momentum, oc),
                    });
            }
        }
        let mut groups: Vec<Group> = groups.into_values().collect();
        groups.sort_by(|a, b| {
            (a.first.first.pos, a.length_cluster.0).cmp(&(b.first.first.pos, b.length_cluster.0))
        });

        let mut length_ids: HashMap<(Momentum, usize), usize> = HashMap::new();
        let mut op_ids: HashMap<(Momentum, usize), usize> = HashMap::new();
        let entries = groups
            .into_iter()
            .enumerate()
            .map(|(id, g)| {
                let next = length_ids.len();
                let length_class = *length_ids.entry(g.length_cluster).or_insert(next);
                let next = op_ids.len();
                let op_class = *op_ids.entry(g.op_cluster).or_insert(next);
                let c = &g.first.class;
                let mut matrix = [0.0; 8];
                for (i, z) in c.representative.entries().iter().enumerate() {
                    matrix[2 * i] = z.re;
                    matrix[2 * i + 1] = z.im;
                }
                CatalogEntry {
                    id,
                    momentum: g.length_cluster.0,
                    kind: c.kind,
                    matrix,
                    theta: c.theta,
                    phi: c.phi,
                    alpha: c.alpha,
                    angle_form: angle_label(&c.angle_form),
                    length: g.first.length,
                    length_form: g.form.map(|f| f.to_string()),
                    length_class,
                    op_class,
                    usable: false,
                    multiplicity: g.multiplicity,
                    configurations: g.configurations,
                    n: g.min_n.n,
                    witness: (&g.first.first).into(),
                    min_n_witness: (&g.min_n).into(),
                    min_n_configurations: g.min_n_configs.into_iter().collect(),
                }
            })
            .collect();
        let mut catalog = Catalog {
            entries,
            counts: shard.counts,
        };
        catalog.pair_identities(tol);
        catalog
    }

    /// Marks entries usable when an identity shares their momentum and
    /// length class, or when the length is a whole number of edges.
    pub fn pair_identities(&mut self, tol: &Tolerances) {
        let identity_lengths: BTreeSet<usize> =
            self.entries.iter().filter(|e| e.is_identity()).map(|e| e.length_class).collect();
        for e in &mut self.entries {
            e.usable = identity_lengths.contains(&e.length_class) || path_length(e.length, tol);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn momenta(&self) -> BTreeSet<Momentum> {
        self.entries
            .iter()
            .map(|e| e.momentum)
            .chain(self.counts.keys().map(|k| k.1))
            .collect()
    }

    /// Entries with and without an identity of the same momentum and length.
    pub fn commensurate_pairing(&self) -> (Vec<&CatalogEntry>, Vec<&CatalogEntry>) {
        self.entries.iter().partition(|e| e.usable)
    }

    /// One class per usable operation at `momentum`, lengths ignored.
    pub fn distinct_operations(&self, momentum: Momentum, tol: &Tolerances) -> Vec<GateClass> {
        let mut seen = BTreeSet::new();
        self.entries
            .iter()
            .filter(|e| e.momentum == momentum && e.usable && seen.insert(e.op_class))
            .map(|e| e.class(tol))
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads entries back from `catalog.jsonl`; counters are not part of it.
    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Catalog> {
        let mut entries = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: CatalogEntry = serde_json::from_str(&line)
                .map_err(|err| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {err}", i + 1)))?;
            entries.push(e);
        }
        Ok(Catalog {
            entries,
            counts: BTreeMap::new(),
        })
    }
}
