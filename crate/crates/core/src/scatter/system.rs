use num_complex::Complex;
use thiserror::Error;

use super::lu::LuFactors;
use super::momentum::Momentum;
use super::real::{norm_sqr, Real};
use crate::graphset::{Graph, MAX_VERTICES};
use crate::ports::{Port, TailMultiset};

/// Default bound on `| |r|^2 + sum |t|^2 - 1 |`.
pub const DEFAULT_FLUX_TOL: f64 = 1e-9;
/// Relative pivot size below which the system matrix counts as singular.
const PIVOT_TOL: f64 = 1e-10;
/// Singular values below this (relative) span a bound-state null space.
const NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("tail multiset covers {multiset} vertices but the graph has {graph}")]
    SizeMismatch { multiset: usize, graph: usize },
    #[error("sin k vanishes; no propagating mode")]
    DegenerateMomentum,
    #[error("scattering matrix is singular")]
    Singular,
    #[error("flux conservation violated by {0:e}")]
    Flux(f64),
    #[error("port ({vertex}, {slot}) is not a tail of this configuration")]
    NoSuchPort { vertex: u8, slot: u8 },
}

/// `sin k`, `cos k` and `e^{ik}` at the working precision.
#[derive(Debug, Clone, Copy)]
pub struct Wave<R: Real> {
    pub sin: R,
    pub cos: R,
}

impl<R: Real> Wave<R> {
    pub fn from_momentum(m: &Momentum) -> Self {
        let (sin, cos) = R::sin_cos_pi_frac(m.p() as i64, m.q() as i64);
        Wave { sin, cos }
    }

    pub fn from_k(k: R) -> Self {
        let (sin, cos) = k.sin_cos();
        Wave { sin, cos }
    }

    pub fn phase(&self) -> Complex<R> {
        Complex::new(self.cos, self.sin)
    }
}

/// The effective graph equation `(A - 2cos k + e^{ik} diag(M)) psi = 2i sin k e_v`
/// for one graph, tail multiset and momentum, factorized once.
///
/// Components of the graph that carry no tail never see the incoming wave and
/// are left out; their amplitudes are zero. Bound states in the continuum on
/// the remaining components (null vectors of the matrix, which always vanish
/// on tail vertices) are projected out by completing the matrix with
/// `N N^T`, which leaves every tail amplitude unchanged.
#[derive(Debug, Clone)]
pub struct ScatteringSystem<R: Real = f64> {
    graph: Graph,
    multiset: TailMultiset,
    momentum: Option<Momentum>,
    wave: Wave<R>,
    active: Vec<u8>,
    local: [u8; MAX_VERTICES],
    factors: LuFactors<R>,
    null_vectors: Vec<Vec<R>>,
}

const INACTIVE: u8 = u8::MAX;

/// Builds and factors the system at a catalogued momentum.
pub fn build_system(g: &Graph, m: &TailMultiset, k: Momentum) -> Result<ScatteringSystem<f64>, ScatterError> {
    ScatteringSystem::build(g, m, Some(k), Wave::from_momentum(&k))
}

/// Builds the system at an arbitrary real wavenumber (any `k` with `sin k != 0`).
pub fn build_system_at(g: &Graph, m: &TailMultiset, k: f64) -> Result<ScatteringSystem<f64>, ScatterError> {
    ScatteringSystem::build(g, m, None, Wave::from_k(k))
}

impl<R: Real> ScatteringSystem<R> {
    pub fn build(g: &Graph, m: &TailMultiset, momentum: Option<Momentum>, wave: Wave<R>) -> Result<Self, ScatterError> {
        let n = g.n();
        if m.n() != n {
            return Err(ScatterError::SizeMismatch {
                multiset: m.n(),
                graph: n,
            });
        }
        if wave.sin.to_f64().abs() < 1e-300 {
            return Err(ScatterError::DegenerateMomentum);
        }
        let tail_mask = m.attachment_vertices().iter().fold(0u16, |acc, &v| acc | 1 << v);
        let active_mask = g
            .components()
            .into_iter()
            .filter(|c| c & tail_mask != 0)
            .fold(0u16, |acc, c| acc | c);
        let active: Vec<u8> = (0..n as u8).filter(|&v| active_mask >> v & 1 == 1).collect();
        let mut local = [INACTIVE; MAX_VERTICES];
        for (i, &v) in active.iter().enumerate() {
            local[v as usize] = i as u8;
        }
        let matrix = assemble(g, m, &active, &wave);
        let na = active.len();
        let (factors, null_vectors) = match LuFactors::factor(matrix.clone(), na, PIVOT_TOL) {
            Ok(f) => (f, Vec::new()),
            Err(_) => {
                let null = bound_state_basis(g, m, &active, &wave);
                if null.is_empty() {
                    return Err(ScatterError::Singular);
                }
                let mut completed = matrix;
                for u in &null {
                    for i in 0..na {
                        for j in 0..na {
                            let add = u[i] * u[j];
                            completed[i * na + j].re = completed[i * na + j].re + add;
                        }
                    }
                }
                let f = LuFactors::factor(completed, na, PIVOT_TOL).map_err(|_| ScatterError::Singular)?;
                (f, null)
            }
        };
        Ok(ScatteringSystem {
            graph: *g,
            multiset: m.clone(),
            momentum,
            wave,
            active,
            local,
            factors,
            null_vectors,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn multiset(&self) -> &TailMultiset {
        &self.multiset
    }

    pub fn momentum(&self) -> Option<Momentum> {
        self.momentum
    }

    pub fn wave(&self) -> &Wave<R> {
        &self.wave
    }

    /// Number of bound-state vectors projected out; nonzero only when the
    /// plain matrix was singular.
    pub fn bound_states(&self) -> usize {
        self.null_vectors.len()
    }

    /// Full `n x n` matrix `M(k)`, including tail-free components.
    pub fn matrix(&self) -> Vec<Vec<Complex<R>>> {
        let n = self.graph.n();
        let all: Vec<u8> = (0..n as u8).collect();
        let flat = assemble(&self.graph, &self.multiset, &all, &self.wave);
        flat.chunks(n).map(|r| r.to_vec()).collect()
    }

    fn check_vertex(&self, v: usize) -> Result<usize, ScatterError> {
        if v >= self.graph.n() || self.multiset.count(v) == 0 {
            return Err(ScatterError::NoSuchPort {
                vertex: v as u8,
                slot: 0,
            });
        }
        Ok(self.local[v] as usize)
    }

    fn expand(&self, x: &[Complex<R>]) -> Vec<Complex<R>> {
        let zero = Complex::new(R::zero(), R::zero());
        let mut psi = vec![zero; self.graph.n()];
        for (i, &v) in self.active.iter().enumerate() {
            psi[v as usize] = x[i];
        }
        psi
    }

    /// Graph amplitudes for a wave incoming on a tail at vertex `v`.
    pub fn solve_vertex(&self, v: usize) -> Result<Vec<Complex<R>>, ScatterError> {
        let lv = self.check_vertex(v)?;
        let zero = Complex::new(R::zero(), R::zero());
        let mut b = vec![zero; self.active.len()];
        b[lv] = Complex::new(R::zero(), self.wave.sin + self.wave.sin);
        self.factors.solve_in_place(&mut b);
        Ok(self.expand(&b))
    }

    /// `d psi / dk` for the solution `psi` of a wave incoming at vertex `v`.
    pub fn solve_derivative(&self, v: usize, psi: &[Complex<R>]) -> Result<Vec<Complex<R>>, ScatterError> {
        let lv = self.check_vertex(v)?;
        let two = R::one() + R::one();
        let i_phase = Complex::new(-self.wave.sin, self.wave.cos);
        let mut rhs: Vec<Complex<R>> = self
            .active
            .iter()
            .map(|&u| {
                let p = psi[u as usize];
                let tails = R::from_f64(self.multiset.count(u as usize) as f64);
                -(p * (two * self.wave.sin) + i_phase * p * tails)
            })
            .collect();
        rhs[lv] = rhs[lv] + Complex::new(R::zero(), two * self.wave.cos);
        self.factors.solve_in_place(&mut rhs);
        Ok(self.expand(&rhs))
    }

    /// Reflection and transmissions for a wave incoming on `port`.
    pub fn solve_incoming(&self, port: Port, flux_tol: f64) -> Result<ScatteringSolution<R>, ScatterError> {
        if port.vertex as usize >= self.graph.n() || port.slot >= self.multiset.count(port.vertex as usize) {
            return Err(ScatterError::NoSuchPort {
                vertex: port.vertex,
                slot: port.slot,
            });
        }
        let psi = self.solve_vertex(port.vertex as usize)?;
        let sol = ScatteringSolution::from_amplitudes(&self.multiset, port, psi);
        sol.check_flux(flux_tol)?;
        Ok(sol)
    }

    /// One solve per distinct attachment vertex; tails on a shared vertex
    /// share the amplitude vector.
    pub fn solve_all_incoming(&self, flux_tol: f64) -> Result<IncomingSolutions<R>, ScatterError> {
        let mut per_vertex = Vec::new();
        for v in self.multiset.attachment_vertices() {
            let psi = self.solve_vertex(v)?;
            let sol = ScatteringSolution::from_amplitudes(&self.multiset, Port { vertex: v as u8, slot: 0 }, psi);
            sol.check_flux(flux_tol)?;
            per_vertex.push((v, sol.psi));
        }
        Ok(IncomingSolutions {
            multiset: self.multiset.clone(),
            per_vertex,
        })
    }
}

fn assemble<R: Real>(g: &Graph, m: &TailMultiset, vertices: &[u8], wave: &Wave<R>) -> Vec<Complex<R>> {
    let na = vertices.len();
    let zero = Complex::new(R::zero(), R::zero());
    let one = Complex::new(R::one(), R::zero());
    let mut a = vec![zero; na * na];
    let two_cos = wave.cos + wave.cos;
    for (i, &u) in vertices.iter().enumerate() {
        for (j, &v) in vertices.iter().enumerate() {
            if g.has_edge(u as usize, v as usize) {
                a[i * na + j] = one;
            }
        }
        let tails = R::from_f64(m.count(u as usize) as f64);
        a[i * na + i] = Complex::new(wave.cos * tails - two_cos, wave.sin * tails);
    }
    a
}

/// Real orthonormal basis of `{u : (A - 2cos k) u = 0, u = 0 on tail vertices}`
/// over the active vertices, refined to the working precision.
fn bound_state_basis<R: Real>(g: &Graph, m: &TailMultiset, active: &[u8], wave: &Wave<R>) -> Vec<Vec<R>> {
    use nalgebra::DMatrix;
    let na = active.len();
    let free: Vec<usize> = (0..na).filter(|&i| m.count(active[i] as usize) == 0).collect();
    if free.is_empty() {
        return Vec::new();
    }
    let two_cos = wave.cos + wave.cos;
    let entry = |i: usize, fj: usize| -> R {
        let (u, v) = (active[i] as usize, active[fj] as usize);
        let a = if g.has_edge(u, v) { R::one() } else { R::zero() };
        if i == fj {
            a - two_cos
        } else {
            a
        }
    };
    let b = DMatrix::from_fn(na, free.len(), |i, j| entry(i, free[j]).to_f64());
    let svd = b.clone().svd(true, true);
    let (u_mat, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let sigma_max = svd.singular_values.max().max(1.0);
    let mut null: Vec<Vec<R>> = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= NULL_TOL * sigma_max {
            null.push(v_t.row(r).iter().map(|&x| R::from_f64(x)).collect());
        }
    }
    if null.is_empty() {
        return Vec::new();
    }
    // one Newton step u <- u - B^+ (B u) with the residual at working precision
    for u in &mut null {
        for _ in 0..2 {
            let resid: Vec<R> = (0..na)
                .map(|i| free.iter().enumerate().fold(R::zero(), |acc, (j, &fj)| acc + entry(i, fj) * u[j]))
                .collect();
            let mut corr = vec![0.0; free.len()];
            for (r, &s) in svd.singular_values.iter().enumerate() {
                if s <= NULL_TOL * sigma_max {
                    continue;
                }
                let proj: f64 = (0..na).map(|i| u_mat[(i, r)] * resid[i].to_f64()).sum::<f64>() / s;
                for (j, c) in corr.iter_mut().enumerate() {
                    *c += v_t[(r, j)] * proj;
                }
            }
            for (x, c) in u.iter_mut().zip(corr) {
                *x = *x - R::from_f64(c);
            }
        }
    }
    // Gram-Schmidt at working precision
    let mut basis: Vec<Vec<R>> = Vec::new();
    for mut u in null {
        for e in &basis {
            let dot = u.iter().zip(e).fold(R::zero(), |acc, (&a, &b)| acc + a * b);
            for (x, &y) in u.iter_mut().zip(e) {
                *x = *x - dot * y;
            }
        }
        let norm = u.iter().fold(R::zero(), |acc, &x| acc + x * x).sqrt();
        for x in &mut u {
            *x = *x / norm;
        }
        basis.push(u);
    }
    basis
        .into_iter()
        .map(|u| {
            let mut full = vec![R::zero(); na];
            for (j, &fj) in free.iter().enumerate() {
                full[fj] = u[j];
            }
            full
        })
        .collect()
}

/// Scattering state for one incoming tail.
#[derive(Debug, Clone)]
pub struct ScatteringSolution<R: Real = f64> {
    pub incoming: Port,
    /// Amplitudes on the graph vertices.
    pub psi: Vec<Complex<R>>,
    pub reflection: Complex<R>,
    /// Transmission into every other tail.
    pub transmissions: Vec<(Port, Complex<R>)>,
}

impl<R: Real> ScatteringSolution<R> {
    pub fn from_amplitudes(m: &TailMultiset, incoming: Port, psi: Vec<Complex<R>>) -> Self {
        let v = incoming.vertex as usize;
        let reflection = psi[v] - Complex::new(R::one(), R::zero());
        let transmissions = m
            .tails()
            .into_iter()
            .filter(|&p| p != incoming)
            .map(|p| (p, psi[p.vertex as usize]))
            .collect();
        ScatteringSolution {
            incoming,
            psi,
            reflection,
            transmissions,
        }
    }

    /// `|r|^2 + sum |t|^2 - 1`.
    pub fn flux_defect(&self) -> f64 {
        let total = self
            .transmissions
            .iter()
            .fold(norm_sqr(self.reflection), |acc, (_, t)| acc + norm_sqr(*t));
        (total - R::one()).to_f64()
    }

    pub fn check_flux(&self, tol: f64) -> Result<(), ScatterError> {
        let d = self.flux_defect();
        if d.abs() > tol || !d.is_finite() {
            Err(ScatterError::Flux(d))
        } else {
            Ok(())
        }
    }

    pub fn transmission_to(&self, port: Port) -> Option<Complex<R>> {
        self.transmissions.iter().find(|(p, _)| *p == port).map(|(_, t)| *t)
    }
}

/// Solutions for every attachment vertex of a configuration.
#[derive(Debug, Clone)]
pub struct IncomingSolutions<R: Real = f64> {
    multiset: TailMultiset,
    per_vertex: Vec<(usize, Vec<Complex<R>>)>,
}

impl<R: Real> IncomingSolutions<R> {
    /// Number of linear solves performed.
    pub fn solves(&self) -> usize {
        self.per_vertex.len()
    }

    pub fn multiset(&self) -> &TailMultiset {
        &self.multiset
    }

    pub fn amplitudes(&self, v: usize) -> Option<&[Complex<R>]> {
        self.per_vertex.iter().find(|(u, _)| *u == v).map(|(_, psi)| psi.as_slice())
    }

    pub fn solution(&self, port: Port) -> Option<ScatteringSolution<R>> {
        if port.slot >= *self.multiset.counts().get(port.vertex as usize)? {
            return None;
        }
        let psi = self.amplitudes(port.vertex as usize)?.to_vec();
        Some(ScatteringSolution::from_amplitudes(&self.multiset, port, psi))
    }

    /// Amplitude out of tail `to` for a wave into tail `from`: `r` when they
    /// coincide, otherwise `t`.
    pub fn amplitude(&self, to: Port, from: Port) -> Option<Complex<R>> {
        let psi = self.amplitudes(from.vertex as usize)?;
        let a = psi[to.vertex as usize];
        Some(if to == from { a - Complex::new(R::one(), R::zero()) } else { a })
    }

    /// S-matrix over the tails in multiset order; entry `[j][i]` is the
    /// amplitude out of tail `j` for a wave into tail `i`.
    pub fn smatrix(&self) -> Vec<Vec<Complex<R>>> {
        let tails = self.multiset.tails();
        tails
            .iter()
            .map(|&to| tails.iter().map(|&from| self.amplitude(to, from).unwrap()).collect())
            .collect()
    }
}
