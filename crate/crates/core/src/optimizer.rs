//! Multi-start maximization of `<S_v>` and `<B_CHSH>` over spin directions.
//!
//! Both objectives are multilinear in the measurement directions, so they
//! are evaluated through the state's Pauli correlation tensor. Two backends
//! are available: projected gradient ascent on the sphere (steps in polar
//! angles of a chart centred on the current point), and coordinate ascent that
//! replaces one direction at a time by its normalized coefficient vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{kron, trace_product, ComplexMatrix};
use crate::operators::{
    chsh_operator, pauli, svetlichny_operator, Axis, ChshSettings, SignPattern, SvetlichnySettings, UnitVector3,
};
use crate::sampling::random_unit_vector;
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Fixed(f64),
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    GradientAscent,
    CoordinateAscent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub step_rule: StepRule,
    pub seed: u64,
    pub backend: Backend,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 500,
            gradient_tol: 1e-10,
            step_rule: StepRule::Backtracking,
            seed: 0,
            backend: Backend::GradientAscent,
            execution: Execution::Parallel,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if !(self.gradient_tol > 0.0) {
            return Err(Error::InvalidConfig("gradient_tol must be positive"));
        }
        if let StepRule::Fixed(t) = self.step_rule {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig("fixed step must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimalSettings {
    Svetlichny(SvetlichnySettings),
    Chsh {
        a0: UnitVector3,
        a1: UnitVector3,
        b0: UnitVector3,
        b1: UnitVector3,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub value: f64,
    pub settings: OptimalSettings,
    pub iterations_used: usize,
    pub converged: bool,
    /// Index of the restart that produced the optimum.
    pub restart: usize,
}

impl Optimum {
    pub fn svetlichny_settings(&self) -> Option<SvetlichnySettings> {
        match self.settings {
            OptimalSettings::Svetlichny(s) => Some(s),
            OptimalSettings::Chsh { .. } => None,
        }
    }

    pub fn chsh_settings(&self) -> Option<ChshSettings> {
        match self.settings {
            OptimalSettings::Chsh { a0, a1, b0, b1 } => Some(ChshSettings::from_directions(a0, a1, b0, b1)),
            OptimalSettings::Svetlichny(_) => None,
        }
    }

    /// The directions in objective order.
    pub fn directions(&self) -> Vec<UnitVector3> {
        match self.settings {
            OptimalSettings::Svetlichny(s) => s.vectors().to_vec(),
            OptimalSettings::Chsh { a0, a1, b0, b1 } => vec![a0, a1, b0, b1],
        }
    }
}

pub fn svetlichny_expectation(rho: &DensityMatrix, settings: &SvetlichnySettings) -> Result<f64> {
    rho.expect_qubits(3)?;
    trace_product(&svetlichny_operator(settings), rho.matrix())
}

pub fn chsh_expectation(rho: &DensityMatrix, settings: &ChshSettings) -> Result<f64> {
    rho.expect_qubits(2)?;
    trace_product(&chsh_operator(settings, SignPattern::Standard), rho.matrix())
}

/// Correlation tensor `T[i..] = Tr[rho sigma_i ⊗ ...]`, flattened row-major.
pub fn correlation_tensor(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.qubits();
    let paulis = [pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)];
    (0..3usize.pow(n as u32))
        .map(|flat| {
            let mut op = ComplexMatrix::identity(1);
            for q in 0..n {
                let digit = flat / 3usize.pow((n - 1 - q) as u32) % 3;
                op = kron(&op, &paulis[digit]);
            }
            trace_product(&op, rho.matrix()).expect("matching dimensions")
        })
        .collect()
}

/// `sum_terms coef * T(v[party0][bit0], v[party1][bit1], ...)`; direction
/// `2 * party + bit` is the `bit`-th setting of `party`.
struct Multilinear {
    parties: usize,
    tensor: Vec<f64>,
    terms: Vec<(f64, Vec<usize>)>,
}

impl Multilinear {
    fn svetlichny(rho: &DensityMatrix) -> Self {
        let terms = [
            (1.0, [0, 0, 0]),
            (1.0, [0, 0, 1]),
            (1.0, [0, 1, 0]),
            (-1.0, [0, 1, 1]),
            (1.0, [1, 0, 0]),
            (-1.0, [1, 0, 1]),
            (-1.0, [1, 1, 0]),
            (-1.0, [1, 1, 1]),
        ];
        Self {
            parties: 3,
            tensor: correlation_tensor(rho),
            terms: terms.iter().map(|(c, b)| (*c, b.to_vec())).collect(),
        }
    }

    fn chsh(rho: &DensityMatrix) -> Self {
        let terms = [(1.0, [0, 0]), (1.0, [0, 1]), (1.0, [1, 0]), (-1.0, [1, 1])];
        Self {
            parties: 2,
            tensor: correlation_tensor(rho),
            terms: terms.iter().map(|(c, b)| (*c, b.to_vec())).collect(),
        }
    }

    fn directions(&self) -> usize {
        2 * self.parties
    }

    fn digits(&self, flat: usize) -> [usize; 3] {
        let mut d = [0; 3];
        let mut rest = flat;
        for q in (0..self.parties).rev() {
            d[q] = rest % 3;
            rest /= 3;
        }
        d
    }

    fn value(&self, v: &[[f64; 3]]) -> f64 {
        let mut total = 0.0;
        for (flat, &t) in self.tensor.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let d = self.digits(flat);
            for (coef, bits) in &self.terms {
                let mut prod = coef * t;
                for q in 0..self.parties {
                    prod *= v[2 * q + bits[q]][d[q]];
                }
                total += prod;
            }
        }
        total
    }

    /// Coefficient vector of each direction; the objective is linear in it.
    fn gradient(&self, v: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let mut g = vec![[0.0; 3]; self.directions()];
        for (flat, &t) in self.tensor.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let d = self.digits(flat);
            for (coef, bits) in &self.terms {
                for p in 0..self.parties {
                    let mut prod = coef * t;
                    for q in (0..self.parties).filter(|&q| q != p) {
                        prod *= v[2 * q + bits[q]][d[q]];
                    }
                    g[2 * p + bits[p]][d[p]] += prod;
                }
            }
        }
        g
    }
}

struct RunResult {
    value: f64,
    vectors: Vec<[f64; 3]>,
    iterations: usize,
    converged: bool,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Component of each coefficient vector orthogonal to its direction: the
/// gradient in local polar angles centred on the current point.
fn tangent_gradient(obj: &Multilinear, v: &[[f64; 3]]) -> Vec<[f64; 3]> {
    obj.gradient(v)
        .iter()
        .zip(v)
        .map(|(g, u)| {
            let a = dot(g, u);
            [g[0] - a * u[0], g[1] - a * u[1], g[2] - a * u[2]]
        })
        .collect()
}

fn norm_sq(g: &[[f64; 3]]) -> f64 {
    g.iter().map(|x| dot(x, x)).sum()
}

/// Moves each direction along its tangent by arc length `t |g_k|`.
fn retract(v: &[[f64; 3]], g: &[[f64; 3]], t: f64) -> Vec<[f64; 3]> {
    v.iter()
        .zip(g)
        .map(|(u, gk)| {
            let n = dot(gk, gk).sqrt();
            if n == 0.0 {
                return *u;
            }
            let (s, c) = (t * n).sin_cos();
            let w = [
                c * u[0] + s * gk[0] / n,
                c * u[1] + s * gk[1] / n,
                c * u[2] + s * gk[2] / n,
            ];
            normalize(w).unwrap_or(*u)
        })
        .collect()
}

fn gradient_ascent(obj: &Multilinear, start: &[[f64; 3]], cfg: &OptimizerConfig) -> RunResult {
    let mut v = start.to_vec();
    let mut f = obj.value(&v);
    let mut g = tangent_gradient(obj, &v);
    let mut step = match cfg.step_rule {
        StepRule::Fixed(t) => t,
        StepRule::Backtracking => 0.25,
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        let gg = norm_sq(&g);
        if gg.sqrt() < cfg.gradient_tol {
            converged = true;
            break;
        }
        iterations += 1;
        match cfg.step_rule {
            StepRule::Fixed(t) => v = retract(&v, &g, t),
            StepRule::Backtracking => {
                let mut t = (2.0 * step).min(4.0);
                let accepted = loop {
                    let vn = retract(&v, &g, t);
                    if obj.value(&vn) >= f + 1e-4 * t * gg {
                        break Some(vn);
                    }
                    t *= 0.5;
                    if t < 1e-16 {
                        break None;
                    }
                };
                match accepted {
                    Some(vn) => v = vn,
                    // No ascent at working precision.
                    None => {
                        converged = gg.sqrt() < cfg.gradient_tol.max(1e-7);
                        break;
                    }
                }
                step = t;
            }
        }
        f = obj.value(&v);
        g = tangent_gradient(obj, &v);
    }
    if converged {
        return RunResult {
            value: f,
            vectors: v,
            iterations,
            converged,
        };
    }
    // Degenerate optima flatten the objective to quartic order, where gradient
    // steps crawl; exact per-direction maximization finishes the climb.
    let mut polished = coordinate_ascent(obj, &v, cfg);
    polished.iterations += iterations;
    polished
}

fn normalize(g: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&g, &g).sqrt();
    (n > 1e-300).then(|| [g[0] / n, g[1] / n, g[2] / n])
}

fn coordinate_ascent(obj: &Multilinear, start: &[[f64; 3]], cfg: &OptimizerConfig) -> RunResult {
    let mut v = start.to_vec();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        let residual = norm_sq(&tangent_gradient(obj, &v)).sqrt();
        if residual < cfg.gradient_tol {
            converged = true;
            break;
        }
        iterations += 1;
        for k in 0..v.len() {
            let gk = obj.gradient(&v)[k];
            if let Some(u) = normalize(gk) {
                v[k] = u;
            }
        }
    }
    RunResult {
        value: obj.value(&v),
        vectors: v,
        iterations,
        converged,
    }
}

fn run(obj: &Multilinear, cfg: &OptimizerConfig) -> Result<(RunResult, usize)> {
    cfg.validate()?;
    let n = obj.directions();
    let results = cfg.execution.map_indexed(cfg.restarts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let start: Vec<[f64; 3]> = (0..n).map(|_| random_unit_vector(&mut rng).to_array()).collect();
        match cfg.backend {
            Backend::GradientAscent => gradient_ascent(obj, &start, cfg),
            Backend::CoordinateAscent => coordinate_ascent(obj, &start, cfg),
        }
    });
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best].value {
            best = i;
        }
    }
    let r = results.into_iter().nth(best).expect("at least one restart");
    Ok((r, best))
}

fn unit(v: [f64; 3]) -> UnitVector3 {
    let n = dot(&v, &v).sqrt();
    UnitVector3::from_array_unchecked([v[0] / n, v[1] / n, v[2] / n])
}

pub fn maximize_svetlichny(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<Optimum> {
    rho.expect_qubits(3)?;
    let obj = Multilinear::svetlichny(rho);
    let (r, restart) = run(&obj, cfg)?;
    let settings = SvetlichnySettings::from_vectors(std::array::from_fn(|k| unit(r.vectors[k])));
    Ok(Optimum {
        value: r.value,
        settings: OptimalSettings::Svetlichny(settings),
        iterations_used: r.iterations,
        converged: r.converged,
        restart,
    })
}

pub fn maximize_chsh(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<Optimum> {
    rho.expect_qubits(2)?;
    let obj = Multilinear::chsh(rho);
    let (r, restart) = run(&obj, cfg)?;
    let d: Vec<UnitVector3> = r.vectors.iter().map(|v| unit(*v)).collect();
    Ok(Optimum {
        value: r.value,
        settings: OptimalSettings::Chsh {
            a0: d[0],
            a1: d[1],
            b0: d[2],
            b1: d[3],
        },
        iterations_used: r.iterations,
        converged: r.converged,
        restart,
    })
}
