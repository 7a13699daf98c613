use std::f64::consts::PI;

use super::*;
use crate::graphset::enumerate_levels;
use crate::ports::enumerate_multisets;
use crate::scatter::{build_system, build_system_at};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn isolated_pairs_give_identity_and_x() {
    let g = Graph::empty(2).unwrap();
    let m = TailMultiset::new(vec![2, 2]).unwrap();
    for k in Momentum::default_set() {
        let sys = build_system(&g, &m, k).unwrap();
        let found = find_gates(&sys, &tol()).unwrap();
        assert_eq!(found.gates.len(), 4, "k={k}");
        let classes: Vec<GateClass> = found.gates.iter().map(|c| classify(c, &tol()).unwrap()).collect();
        assert_eq!(classes.iter().filter(|c| c.is_identity()).count(), 2);
        for (c, class) in found.gates.iter().zip(&classes) {
            let [a, b, _, _] = c.assignment.vertices();
            assert_ne!(a, b);
            if !class.is_identity() {
                assert!(equal_up_to_phase(&c.op, &Mat2::pauli_x(), 1e-12));
            }
        }
    }
}

#[test]
fn one_vertex_never_gates() {
    let g = Graph::empty(1).unwrap();
    let m = TailMultiset::new(vec![4]).unwrap();
    for k in Momentum::default_set() {
        let sys = build_system(&g, &m, k).unwrap();
        assert!(find_gates(&sys, &tol()).unwrap().gates.is_empty());
    }
    for i in 1..100 {
        let k = PI * i as f64 / 100.0;
        let sys = build_system_at(&g, &m, k).unwrap();
        let all = sys.solve_all_incoming(1e-9).unwrap();
        // every tail reflects -1/2 regardless of k
        assert!(!reflectionless(&m, &all, 0.4));
    }
}

#[test]
fn detection_needs_an_exact_momentum() {
    let g = Graph::empty(2).unwrap();
    let m = TailMultiset::new(vec![2, 2]).unwrap();
    let sys = build_system_at(&g, &m, 1.0).unwrap();
    let all = sys.solve_all_incoming(1e-9).unwrap();
    let p = PortAssignment::from_vertices([0, 1, 0, 1]);
    assert!(detect_gate(&sys, &all, &p, 1e-9).is_none());
}

/// Every configuration on up to five vertices at every default momentum:
/// the fast path and the brute-force criterion agree, and each gate passes
/// the full four-port re-check.
#[test]
fn two_pass_matches_full_criterion() {
    let levels = enumerate_levels(5).unwrap();
    let t = tol();
    let mut total = 0;
    for level in &levels {
        for rep in level {
            for m in enumerate_multisets(rep.graph.n()) {
                for k in Momentum::default_set() {
                    let sys = build_system(&rep.graph, &m, k).unwrap();
                    let fast = find_gates(&sys, &t).unwrap().gates;
                    let all = sys.solve_all_incoming(t.flux).unwrap();
                    let brute: Vec<GateCandidate> = enumerate_role_assignments(&m)
                        .iter()
                        .filter_map(|p| detect_gate(&sys, &all, p, t.gate))
                        .collect();
                    assert_eq!(fast, brute);
                    for c in &fast {
                        let ports = c.assignment.ports();
                        for &from in &ports[..2] {
                            let sol = sys.solve_incoming(from, t.flux).unwrap();
                            assert!(sol.reflection.norm() <= t.gate);
                            let mut out_norm = 0.0;
                            for &(to, a) in &sol.transmissions {
                                if ports[..2].contains(&to) {
                                    assert!(a.norm() <= t.gate);
                                }
                                if ports[2..].contains(&to) {
                                    out_norm += a.norm_sqr();
                                }
                            }
                            assert!((out_norm - 1.0).abs() <= 1e-9);
                        }
                    }
                    total += fast.len();
                }
            }
        }
    }
    assert!(total > 0);
}

#[test]
fn relabelings_reflect_the_axis() {
    let levels = enumerate_levels(5).unwrap();
    let t = tol();
    let mut rotations = 0;
    for rep in levels.iter().flatten() {
        for m in enumerate_multisets(rep.graph.n()) {
            for k in Momentum::default_set() {
                let sys = build_system(&rep.graph, &m, k).unwrap();
                let all = sys.solve_all_incoming(t.flux).unwrap();
                for c in find_gates(&sys, &t).unwrap().gates {
                    let g = classify(&c, &t).unwrap();
                    let io = detect_gate(&sys, &all, &c.assignment.swap_io(), t.gate).expect("swapped io is a gate");
                    let lab = detect_gate(&sys, &all, &c.assignment.swap_labels(), t.gate).expect("swapped labels");
                    assert!((io.op - c.op.transpose()).max_abs() < 1e-12);
                    assert!((lab.op - c.op.conj_x()).max_abs() < 1e-12);
                    let gi = classify(&io, &t).unwrap();
                    let gl = classify(&lab, &t).unwrap();
                    assert!(equal_up_to_phase(&gi.su2(), &Mat2::rotation(g.theta, -g.phi, g.alpha), 1e-9));
                    assert!(equal_up_to_phase(&gl.su2(), &Mat2::rotation(g.theta, PI - g.phi, -g.alpha), 1e-9));
                    rotations += usize::from(!g.is_identity());
                }
            }
        }
    }
    assert!(rotations > 0);
}
