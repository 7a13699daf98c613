use proptest::prelude::*;

use super::*;
use crate::efflen::measure_lengths;
use crate::gatekit::{find_gates, GateKind};
use crate::graphset::enumerate_levels;
use crate::ports::{enumerate_multisets, PortAssignment};
use crate::scatter::build_system;

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Gates of one configuration with consensus lengths, in assignment order.
fn hits(g: &Graph, m: &TailMultiset, k: Momentum, graph: u64, multiset: u32) -> Vec<Hit> {
    let sys = build_system(g, m, k).unwrap();
    let t = tol();
    find_gates(&sys, &t)
        .unwrap()
        .gates
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let l = measure_lengths(&sys, &c, &t, false).ok()?.consensus?;
            Some(Hit {
                candidate: c,
                length: l,
                pos: StreamPos {
                    graph,
                    multiset,
                    momentum: k.q() * 8 + k.p(),
                    assignment: i as u32,
                },
            })
        })
        .collect()
}

/// Hit units for every configuration on up to `n` vertices.
fn small_stream(n: usize) -> Vec<Vec<Hit>> {
    let mut out = Vec::new();
    let mut gi = 0;
    for rep in enumerate_levels(n).unwrap().iter().flatten() {
        for (mi, m) in enumerate_multisets(rep.graph.n()).iter().enumerate() {
            for k in Momentum::default_set() {
                let h = hits(&rep.graph, m, k, gi, mi as u32);
                if !h.is_empty() {
                    out.push(h);
                }
            }
        }
        gi += 1;
    }
    out
}

fn one_gate(edges: &[(usize, usize)], n: usize, roles: [u8; 4], k: Momentum) -> Hit {
    let g = Graph::from_edges(n, edges).unwrap();
    let m = TailMultiset::from_vertices(n, roles);
    let want = PortAssignment::from_vertices(roles);
    hits(&g, &m, k, 0, 0)
        .into_iter()
        .find(|h| h.candidate.assignment == want)
        .expect("configuration is a gate")
}

fn jsonl(c: &Catalog) -> String {
    let mut buf = Vec::new();
    c.write_jsonl(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn double_insert_counts_twice() {
    let k = Momentum::new(1, 4).unwrap();
    let hit = one_gate(&[(0, 1), (2, 3)], 4, [0, 2, 1, 3], k);
    let mut s = Shard::new();
    s.insert_configuration(&[hit.clone()], &tol()).unwrap();
    s.insert_configuration(&[hit], &tol()).unwrap();
    let c = Catalog::finalize(s, &tol());
    assert_eq!(c.len(), 1);
    assert_eq!(c.entries[0].multiplicity, 2);
    assert_eq!(c.entries[0].configurations, 2);
    assert_eq!(c.entries[0].kind, GateKind::Identity);
    assert!(c.entries[0].usable);
    assert!((c.entries[0].length - 1.0).abs() < 1e-9);
}

#[test]
fn empty_catalog_emits_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let c = Catalog::finalize(Shard::new(), &tol());
    let report = c.emit(dir.path()).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(std::fs::read_to_string(dir.path().join("catalog.jsonl")).unwrap(), "");
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(csv, format!("{SUMMARY_HEADER}\n"));
    let axes = std::fs::read_to_string(dir.path().join("axes.csv")).unwrap();
    assert_eq!(axes.lines().count(), 1);
}

#[test]
fn lengths_decide_pairing() {
    let k = Momentum::new(1, 4).unwrap();
    // square root of X and an identity, both of length 5 - 2 sqrt2
    let root_x = one_gate(
        &[(0, 4), (0, 5), (0, 7), (1, 4), (1, 6), (1, 7), (2, 5), (2, 7), (3, 6), (3, 7), (5, 7), (6, 7)],
        8,
        [0, 1, 2, 3],
        k,
    );
    let identity = one_gate(
        &[(0, 4), (0, 7), (1, 5), (1, 7), (2, 6), (2, 7), (3, 6), (3, 7), (4, 7), (5, 7), (6, 7)],
        8,
        [0, 5, 4, 1],
        k,
    );
    let surd = 5.0 - 2.0 * 2f64.sqrt();
    assert!((root_x.length - surd).abs() < 1e-9 && (identity.length - surd).abs() < 1e-9);
    // triangle-with-tail rotation of length 1, paired with a bare path
    let rz = one_gate(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (5, 6)], 7, [5, 0, 6, 0], k);
    assert!((rz.length - 1.0).abs() < 1e-9);

    let mut s = Shard::new();
    s.insert_configuration(&[root_x.clone()], &tol()).unwrap();
    s.insert_configuration(&[rz.clone()], &tol()).unwrap();
    let c = Catalog::finalize(s, &tol());
    assert_eq!(c.len(), 2);
    let (usable, unusable) = c.commensurate_pairing();
    assert_eq!(usable.len(), 1);
    assert!((usable[0].length - 1.0).abs() < 1e-9);
    assert!((unusable[0].length - surd).abs() < 1e-9);

    let mut s = Shard::new();
    for h in [root_x, identity, rz] {
        s.insert_configuration(&[h], &tol()).unwrap();
    }
    let c = Catalog::finalize(s, &tol());
    assert_eq!(c.len(), 3);
    assert!(c.entries.iter().all(|e| e.usable));
    assert_eq!(c.distinct_operations(k, &tol()).len(), 3);
}

#[test]
fn nearby_lengths_share_a_class() {
    let k = Momentum::new(1, 4).unwrap();
    let a = one_gate(&[(0, 1), (2, 3)], 4, [0, 2, 1, 3], k);
    let mut b = a.clone();
    // straddles a rounding boundary of the raw signature
    b.length = a.length + 7e-7;
    b.pos.graph = 1;
    let mut s = Shard::new();
    s.insert_configuration(&[a], &tol()).unwrap();
    s.insert_configuration(&[b], &tol()).unwrap();
    assert_eq!(s.raw_len(), 2);
    let c = Catalog::finalize(s, &tol());
    assert_eq!(c.len(), 1);
    assert_eq!(c.entries[0].multiplicity, 2);
    assert_eq!(c.entries[0].length_form.as_deref(), Some("1"));
}

#[test]
fn shard_round_trips_through_json() {
    let mut s = Shard::new();
    for unit in small_stream(3) {
        s.insert_configuration(&unit, &tol()).unwrap();
    }
    s.counts_mut(3, Momentum::new(1, 3).unwrap()).scanned = 7;
    let back = Shard::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn small_catalog_is_consistent() {
    let mut s = Shard::new();
    for unit in small_stream(4) {
        s.insert_configuration(&unit, &tol()).unwrap();
    }
    let c = Catalog::finalize(s, &tol());
    assert!(!c.is_empty());
    for (i, e) in c.entries.iter().enumerate() {
        assert_eq!(e.id, i);
        assert!(e.multiplicity >= e.configurations && e.configurations >= 1);
        assert!(e.n <= e.witness.n);
        if e.is_identity() {
            assert!(e.usable);
        }
    }
    // q = 5 momenta give only the identity and X
    for p in 1..5 {
        let k = Momentum::new(p, 5).unwrap();
        for class in c.distinct_operations(k, &tol()) {
            assert!(class.is_identity() || (class.alpha - std::f64::consts::PI).abs() < 1e-9);
        }
    }
    let report = c.report();
    for w in report.rows.windows(2) {
        if w[0].momentum == w[1].momentum {
            assert!(w[0].distinct <= w[1].distinct && w[0].distinct_ops <= w[1].distinct_ops);
        }
    }
    for r in &report.rows {
        assert!(r.usable <= r.distinct && r.non_identity <= r.distinct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn merge_is_order_free(seed in any::<u64>(), parts in 1usize..6) {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let stream = small_stream(4);
        let mut whole = Shard::new();
        for unit in &stream {
            whole.insert_configuration(unit, &tol()).unwrap();
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut shards = vec![Shard::new(); parts];
        for unit in &stream {
            let i = rng.gen_range(0..parts);
            shards[i].insert_configuration(unit, &tol()).unwrap();
        }
        shards.shuffle(&mut rng);
        // fold left and right give the same result
        let mut left = Shard::new();
        for s in shards.iter().cloned() {
            left.merge(s);
        }
        let mut right = Shard::new();
        for s in shards.into_iter().rev() {
            let mut acc = s;
            acc.merge(right);
            right = acc;
        }
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(&right, &whole);
        prop_assert_eq!(jsonl(&Catalog::finalize(left, &tol())), jsonl(&Catalog::finalize(whole, &tol())));
    }
}
