use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::DriverError;
use crate::catalog::{Catalog, CatalogEntry};
use crate::efflen::measure_lengths;
use crate::gatekit::{classify, detect_gate, phase_distance, Mat2, Tolerances};
use crate::graphset::parse_graph6;
use crate::ports::{PortAssignment, Role, TailMultiset};
use crate::scatter::{build_system, modulus, to_c64, Dd, Momentum, Real, ScatterError, ScatteringSystem, Wave};

/// Blocked amplitudes must vanish below this at double-double precision.
pub const EXTENDED_ZERO: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryCheck {
    pub id: usize,
    pub passed: bool,
    /// `1 - |tr(U^dagger V)|/2` between the recorded and re-solved operator.
    pub op_error: f64,
    pub length_error: f64,
    /// Largest blocked amplitude at extended precision.
    pub zero_residual: Option<f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<EntryCheck>,
    pub failed: usize,
    pub max_op_error: f64,
    pub max_length_error: f64,
    pub max_zero_residual: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

fn witness_config(e: &CatalogEntry) -> Result<(crate::graphset::Graph, TailMultiset, PortAssignment), String> {
    let g = parse_graph6(&e.witness.graph6).map_err(|err| err.to_string())?;
    if g.n() != e.witness.n as usize || e.witness.vertices.iter().any(|&v| v as usize >= g.n()) {
        return Err("witness does not fit its graph".into());
    }
    let m = TailMultiset::from_vertices(g.n(), e.witness.vertices);
    Ok((g, m, PortAssignment::from_vertices(e.witness.vertices)))
}

fn extended_system(
    g: &crate::graphset::Graph,
    m: &TailMultiset,
    k: Momentum,
) -> Result<ScatteringSystem<Dd>, ScatterError> {
    ScatteringSystem::<Dd>::build(g, m, Some(k), Wave::from_momentum(&k))
}

/// Blocked amplitudes and operator of an assignment at double-double precision.
fn extended_solve(
    g: &crate::graphset::Graph,
    m: &TailMultiset,
    p: &PortAssignment,
    k: Momentum,
) -> Result<(f64, [[Complex<Dd>; 2]; 2]), String> {
    let sys = extended_system(g, m, k).map_err(|e| e.to_string())?;
    let sol = sys.solve_all_incoming(1e-9).map_err(|e| e.to_string())?;
    let amp = |to: Role, from: Role| sol.amplitude(p.port(to), p.port(from)).ok_or("missing tail");
    let mut residual = 0.0f64;
    for (to, from) in [(Role::In0, Role::In0), (Role::In1, Role::In0), (Role::In1, Role::In1), (Role::In0, Role::In1)] {
        residual = residual.max(modulus(amp(to, from)?).to_f64());
    }
    let op = [
        [amp(Role::Out0, Role::In0)?, amp(Role::Out0, Role::In1)?],
        [amp(Role::Out1, Role::In0)?, amp(Role::Out1, Role::In1)?],
    ];
    Ok((residual, op))
}

/// Rotation angle `|alpha|` in `[0, pi]` of the gate of an assignment,
/// computed at double-double precision from `|tr U| / 2 = cos(alpha/2)`.
pub fn extended_angle(
    g: &crate::graphset::Graph,
    m: &TailMultiset,
    p: &PortAssignment,
    k: Momentum,
) -> Result<Dd, String> {
    let (_, op) = extended_solve(g, m, p, k)?;
    let det = op[0][0] * op[1][1] - op[0][1] * op[1][0];
    let tr = op[0][0] + op[1][1];
    let c = modulus(tr) / (Dd::new(2.0) * modulus(det).sqrt());
    let s = (Dd::new(1.0) - c * c).abs().sqrt();
    Ok(Dd::new(2.0) * s.atan2(c))
}

fn check_entry(e: &CatalogEntry, extended: bool, tol: &Tolerances) -> EntryCheck {
    let mut check = EntryCheck {
        id: e.id,
        passed: false,
        op_error: f64::NAN,
        length_error: f64::NAN,
        zero_residual: None,
        reason: None,
    };
    let fail = |mut c: EntryCheck, why: String| {
        c.reason = Some(why);
        c
    };
    let (g, m, p) = match witness_config(e) {
        Ok(x) => x,
        Err(why) => return fail(check, why),
    };
    let rep = e.representative();
    if !(rep.unitarity_defect() <= tol.gate) {
        return fail(check, "recorded matrix is not unitary".into());
    }
    let sys = match build_system(&g, &m, e.momentum) {
        Ok(s) => s,
        Err(err) => return fail(check, err.to_string()),
    };
    let sol = match sys.solve_all_incoming(tol.flux) {
        Ok(s) => s,
        Err(err) => return fail(check, err.to_string()),
    };
    let Some(c) = detect_gate(&sys, &sol, &p, tol.gate) else {
        return fail(check, "witness is not a gate".into());
    };
    check.op_error = phase_distance(&rep, &c.op);
    if !(check.op_error <= tol.gate) {
        let why = format!("operator differs by {:e}", check.op_error);
        return fail(check, why);
    }
    match classify(&c, tol) {
        Ok(class) if class.kind == e.kind => {}
        _ => return fail(check, "gate kind differs".into()),
    }
    match measure_lengths(&sys, &c, tol, false).ok().and_then(|r| r.consensus) {
        Some(l) => check.length_error = (l - e.length).abs(),
        None => return fail(check, "paths disagree on the length".into()),
    }
    if !(check.length_error <= tol.len) {
        let why = format!("length differs by {:e}", check.length_error);
        return fail(check, why);
    }
    if extended {
        let (residual, op) = match extended_solve(&g, &m, &p, e.momentum) {
            Ok(x) => x,
            Err(why) => return fail(check, why),
        };
        check.zero_residual = Some(residual);
        if !(residual <= EXTENDED_ZERO) {
            return fail(check, format!("blocked amplitude {residual:e} at extended precision"));
        }
        let op = Mat2::new(to_c64(op[0][0]), to_c64(op[0][1]), to_c64(op[1][0]), to_c64(op[1][1]));
        let d = phase_distance(&rep, &op);
        if !(d <= tol.gate) {
            return fail(check, format!("extended operator differs by {d:e}"));
        }
    }
    check.passed = true;
    check
}

pub fn verify_catalog(catalog: &Catalog, extended: bool, tol: &Tolerances) -> VerifyReport {
    use rayon::prelude::*;
    let checks: Vec<EntryCheck> = catalog.entries.par_iter().map(|e| check_entry(e, extended, tol)).collect();
    let mut r = VerifyReport {
        failed: checks.iter().filter(|c| !c.passed).count(),
        ..Default::default()
    };
    for c in &checks {
        let finite = |x: f64| if x.is_finite() { x } else { 0.0 };
        r.max_op_error = r.max_op_error.max(finite(c.op_error));
        r.max_length_error = r.max_length_error.max(finite(c.length_error));
        r.max_zero_residual = r.max_zero_residual.max(c.zero_residual.unwrap_or(0.0));
    }
    r.checks = checks;
    r
}

/// Re-solves every entry of a `catalog.jsonl`.
pub fn verify(path: &Path, extended: bool, tol: &Tolerances) -> Result<VerifyReport, DriverError> {
    let catalog = Catalog::load(path)?;
    Ok(verify_catalog(&catalog, extended, tol))
}
