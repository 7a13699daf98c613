//! Gate detection on the four-tail S-matrix and classification of the
//! resulting single-qubit operators.

mod classify;
mod mat2;
mod recognize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphset::{write_graph6, Graph};
use crate::ports::{enumerate_role_assignments, PortAssignment, Role, TailMultiset};
use crate::scatter::{to_c64, IncomingSolutions, Momentum, Real, ScatterError, ScatteringSystem};

pub use classify::{classify_matrix, equal_up_to_phase, fix_phase, phase_distance, AngleForm, GateClass, GateKind};
pub use mat2::Mat2;
pub use recognize::{
    recognize_quadratic_surd, recognize_rational, QuadraticSurd, Rational, DEFAULT_COEFF_BOUND, DEFAULT_Q_MAX,
    DEFAULT_RAT_TOL, DEFAULT_SURD_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GateError {
    #[error("operator is not unitary (defect {0:e})")]
    NonUnitary(f64),
}

/// Numerical thresholds shared by detection, classification and lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `| |r|^2 + sum |t|^2 - 1 |` allowed per solve.
    pub flux: f64,
    /// Zero test for the blocked amplitudes and the unitarity defect.
    pub gate: f64,
    /// Axis components treated as zero when choosing the hemisphere.
    pub axis: f64,
    /// Path lengths that agree within this are the same length.
    pub len: f64,
    pub rational: f64,
    pub q_max: i64,
    pub surd: f64,
    pub coeff_bound: i64,
    /// Upper bound on the stencil step.
    pub stencil_h: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            flux: 1e-9,
            gate: 1e-9,
            axis: 1e-9,
            len: 1e-6,
            rational: DEFAULT_RAT_TOL,
            q_max: DEFAULT_Q_MAX,
            surd: DEFAULT_SURD_TOL,
            coeff_bound: DEFAULT_COEFF_BOUND,
            stencil_h: 1e-2,
        }
    }
}

/// A configuration whose inputs scatter only into its outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCandidate {
    pub graph: Graph,
    pub multiset: TailMultiset,
    pub assignment: PortAssignment,
    pub momentum: Momentum,
    /// `O[j][i] = t(j_out <- i_in)`.
    pub op: Mat2,
}

impl GateCandidate {
    pub fn graph6(&self) -> String {
        write_graph6(&self.graph)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Checks the blocking conditions for one role assignment and assembles the
/// output operator.
pub fn detect_gate<R: Real>(
    sys: &ScatteringSystem<R>,
    solutions: &IncomingSolutions<R>,
    p: &PortAssignment,
    eps: f64,
) -> Option<GateCandidate> {
    let amp = |to: Role, from: Role| -> Option<Complex64> {
        solutions.amplitude(p.port(to), p.port(from)).map(to_c64)
    };
    for (to, from) in [(Role::In0, Role::In0), (Role::In1, Role::In0)] {
        if amp(to, from)?.norm() > eps {
            return None;
        }
    }
    for (to, from) in [(Role::In1, Role::In1), (Role::In0, Role::In1)] {
        if amp(to, from)?.norm() > eps {
            return None;
        }
    }
    let op = Mat2::new(
        amp(Role::Out0, Role::In0)?,
        amp(Role::Out0, Role::In1)?,
        amp(Role::Out1, Role::In0)?,
        amp(Role::Out1, Role::In1)?,
    );
    if op.unitarity_defect() > eps {
        return None;
    }
    Some(GateCandidate {
        graph: *sys.graph(),
        multiset: sys.multiset().clone(),
        assignment: *p,
        momentum: sys.momentum()?,
        op,
    })
}

/// Outcome of searching one configuration.
#[derive(Debug, Clone, Default)]
pub struct GateSearch {
    pub solves: usize,
    pub gates: Vec<GateCandidate>,
}

/// Searches every role assignment of a configuration. A gate forces zero
/// reflection on all four tails, so one solve at the first attachment
/// vertex rejects most configurations before the rest are solved.
pub fn find_gates<R: Real>(sys: &ScatteringSystem<R>, tol: &Tolerances) -> Result<GateSearch, ScatterError> {
    let m = sys.multiset();
    let v0 = m.attachment_vertices()[0];
    let psi = sys.solve_vertex(v0)?;
    let r = to_c64(psi[v0]) - 1.0;
    if !(r.norm() <= tol.gate) {
        return Ok(GateSearch { solves: 1, gates: Vec::new() });
    }
    let solutions = sys.solve_all_incoming(tol.flux)?;
    let gates = enumerate_role_assignments(m)
        .iter()
        .filter_map(|p| detect_gate(sys, &solutions, p, tol.gate))
        .collect();
    Ok(GateSearch {
        solves: 1 + solutions.solves(),
        gates,
    })
}

pub fn classify(c: &GateCandidate, tol: &Tolerances) -> Result<GateClass, GateError> {
    classify_matrix(&c.op, tol)
}

/// All tails reflectionless is necessary for any role assignment to work.
pub fn reflectionless(m: &TailMultiset, solutions: &IncomingSolutions<f64>, eps: f64) -> bool {
    m.tails().iter().all(|&t| solutions.amplitude(t, t).is_some_and(|r| r.norm() <= eps))
}

#[cfg(test)]
mod tests;
