//! Effective length `d/dk arg t` of each input-to-output path of a gate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gatekit::{recognize_quadratic_surd, GateCandidate, QuadraticSurd, Tolerances};
use crate::graphset::Graph;
use crate::ports::{Role, TailMultiset};
use crate::scatter::{build_system_at, ScatterError, ScatteringSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LengthError {
    #[error("transmission {0:e} too small for a defined phase")]
    Undefined(f64),
    #[error("stencil node outside (0, pi)")]
    OutOfRange,
    #[error(transparent)]
    Scatter(#[from] ScatterError),
}

/// Nine-point central difference weights for the first derivative.
const STENCIL: [f64; 9] = [
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
];

/// Length along the path into vertex `from` and out of vertex `to`, from the
/// solution `psi` and its derivative through the same factorization.
pub fn analytic_length(
    sys: &ScatteringSystem,
    from: usize,
    psi: &[Complex64],
    to: usize,
    eps: f64,
) -> Result<f64, LengthError> {
    let t = psi[to];
    if t.norm() <= eps {
        return Err(LengthError::Undefined(t.norm()));
    }
    let dpsi = sys.solve_derivative(from, psi)?;
    Ok((dpsi[to] / t).im)
}

/// Nine-point stencil on the unwrapped phase of `t(to <- from)` around `k`.
pub fn stencil_length(
    g: &Graph,
    m: &TailMultiset,
    from: usize,
    to: usize,
    k: f64,
    h: f64,
    eps: f64,
) -> Result<f64, LengthError> {
    let pi = std::f64::consts::PI;
    if k - 4.0 * h <= 0.0 || k + 4.0 * h >= pi {
        return Err(LengthError::OutOfRange);
    }
    let mut phases = [0.0; 9];
    for (j, slot) in phases.iter_mut().enumerate() {
        let kj = k + (j as f64 - 4.0) * h;
        let t = build_system_at(g, m, kj)?.solve_vertex(from)?[to];
        if t.norm() <= eps {
            return Err(LengthError::Undefined(t.norm()));
        }
        *slot = t.arg();
    }
    // continue from the centre outwards so each step stays within pi
    for j in 5..9 {
        phases[j] = unwrap_near(phases[j], phases[j - 1]);
    }
    for j in (0..4).rev() {
        phases[j] = unwrap_near(phases[j], phases[j + 1]);
    }
    Ok(phases.iter().zip(STENCIL).map(|(p, w)| p * w).sum::<f64>() / h)
}

fn unwrap_near(x: f64, reference: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    x - tau * ((x - reference) / tau).round()
}

/// Step for the stencil: the configured bound, shrunk for long paths whose
/// phase turns over on a scale of `1/l`.
pub fn stencil_step(bound: f64, length: f64) -> f64 {
    bound / length.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLength {
    /// Input register index, 0 or 1.
    pub input: u8,
    /// Output register index, 0 or 1.
    pub output: u8,
    pub analytic: f64,
    pub stencil: Option<f64>,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthReport {
    pub paths: Vec<PathLength>,
    /// Mean analytic length when all paths agree.
    pub consensus: Option<f64>,
    /// Largest pairwise spread of the analytic lengths.
    pub spread: f64,
    /// Largest analytic-versus-stencil difference.
    pub method_gap: f64,
    pub form: Option<QuadraticSurd>,
}

impl LengthReport {
    pub fn is_consistent(&self) -> bool {
        self.consensus.is_some()
    }

    /// Fills in the closed form of the consensus length. Kept separate from
    /// measurement because the surd search dominates the cost of a hit.
    pub fn recognize(&mut self, tol: &Tolerances) {
        self.form = self.consensus.and_then(|l| recognize_quadratic_surd(l, tol.coeff_bound, tol.surd));
    }
}

/// Lengths of every path with non-negligible transmission, by both methods.
pub fn measure_lengths(
    sys: &ScatteringSystem,
    c: &GateCandidate,
    tol: &Tolerances,
    with_stencil: bool,
) -> Result<LengthReport, LengthError> {
    let k = c.momentum.k();
    let mut paths = Vec::new();
    for (i, role_in) in [Role::In0, Role::In1].into_iter().enumerate() {
        let from = c.assignment.port(role_in).vertex as usize;
        let psi = sys.solve_vertex(from)?;
        for (j, role_out) in [Role::Out0, Role::Out1].into_iter().enumerate() {
            let to = c.assignment.port(role_out).vertex as usize;
            if psi[to].norm() <= tol.gate {
                continue;
            }
            let analytic = analytic_length(sys, from, &psi, to, tol.gate)?;
            let step = stencil_step(tol.stencil_h, analytic);
            let stencil = if with_stencil {
                stencil_length(&c.graph, &c.multiset, from, to, k, step, tol.gate).ok()
            } else {
                None
            };
            paths.push(PathLength {
                input: i as u8,
                output: j as u8,
                analytic,
                stencil,
                step,
            });
        }
    }
    Ok(consensus(paths, tol))
}

/// Agreement of the defined paths within `tol.len`.
pub fn consensus(paths: Vec<PathLength>, tol: &Tolerances) -> LengthReport {
    let values: Vec<f64> = paths.iter().map(|p| p.analytic).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if values.is_empty() { 0.0 } else { hi - lo };
    let method_gap = paths
        .iter()
        .filter_map(|p| p.stencil.map(|s| (s - p.analytic).abs()))
        .fold(0.0, f64::max);
    let consensus = (!values.is_empty() && spread <= tol.len).then(|| values.iter().sum::<f64>() / values.len() as f64);
    LengthReport {
        paths,
        consensus,
        spread,
        method_gap,
        form: None,
    }
}
