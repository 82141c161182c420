//! Forward-difference gradients, L-BFGS, and layerwise VQE training.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ansatz::{prepare_state, AnsatzSpec, GateFamily};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulator::StateVector;

pub const DEFAULT_FD_STEP: f64 = 1e-6;
/// Variance of the Gaussian used to draw fresh ansatz parameters.
pub const INIT_VARIANCE: f64 = 0.1;

const WOLFE_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;
const MAX_BRACKET_STEPS: usize = 25;
const MAX_ZOOM_STEPS: usize = 30;
/// Consecutive negligible decreases before giving up.
const STALL_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Forward-difference step.
    pub fd_step: f64,
    /// Stop when the gradient max-norm drops below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Number of stored curvature pairs.
    pub lbfgs_memory: usize,
    /// Stop after a few consecutive accepted steps that lower the value by less than this, relative
    /// to `max(|f|, 1)`.
    pub value_tolerance: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            fd_step: DEFAULT_FD_STEP,
            gradient_tolerance: 1e-8,
            max_iterations: 1000,
            lbfgs_memory: 10,
            value_tolerance: 1e-14,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.fd_step) {
            return Err(Error::InvalidOptions(format!(
                "fd_step must be > 0, got {}",
                self.fd_step
            )));
        }
        if !positive(self.gradient_tolerance) {
            return Err(Error::InvalidOptions(
                "gradient_tolerance must be > 0".into(),
            ));
        }
        if !(self.value_tolerance >= 0.0) {
            return Err(Error::InvalidOptions("value_tolerance must be >= 0".into()));
        }
        if self.lbfgs_memory == 0 {
            return Err(Error::InvalidOptions("lbfgs_memory must be >= 1".into()));
        }
        Ok(())
    }
}

/// `g_k = (f(theta + delta e_k) - f(theta)) / delta`, using `p + 1` evaluations.
pub fn forward_diff_gradient<F>(mut f: F, theta: &[f64], delta: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    let f0 = f(theta);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    forward_diff_from(f, theta, f0, delta)
}

fn forward_diff_from<F>(mut f: F, theta: &[f64], f0: f64, delta: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(delta > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "finite-difference step must be > 0, got {delta}"
        )));
    }
    let mut x = theta.to_vec();
    let mut g = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        x[k] = theta[k] + delta;
        let fk = f(&x);
        x[k] = theta[k];
        if !fk.is_finite() {
            return Err(Error::NonFiniteGradient { component: k });
        }
        g.push((fk - f0) / delta);
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Gradient max-norm below tolerance.
    Converged,
    /// Relative value decrease below tolerance.
    Stalled,
    MaxIterations,
    /// No acceptable step along steepest descent; best point so far returned.
    LineSearchFailed,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::Stalled => "stalled",
            Termination::MaxIterations => "max_iterations",
            Termination::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub iterations: usize,
    pub function_calls: usize,
    pub gradient_calls: usize,
    pub termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Evaluator<F, G> {
    f: F,
    grad: G,
    function_calls: usize,
    gradient_calls: usize,
}

impl<F, G> Evaluator<F, G>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    fn value(&mut self, x: &[f64]) -> f64 {
        self.function_calls += 1;
        (self.f)(x)
    }

    fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_calls += 1;
        (self.grad)(x)
    }
}

struct Step {
    alpha: f64,
    value: f64,
    gradient: Vec<f64>,
}

/// Bracketing line search for the strong Wolfe conditions. Falls back to the
/// best sufficient-decrease point when the curvature condition cannot be met.
fn line_search<F, G>(
    ev: &mut Evaluator<F, G>,
    x: &[f64],
    dir: &[f64],
    f0: f64,
    dphi0: f64,
    alpha0: f64,
) -> Result<Option<Step>>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let point = |a: f64| -> Vec<f64> { x.iter().zip(dir).map(|(xi, di)| xi + a * di).collect() };
    let armijo = |a: f64, fa: f64| fa <= f0 + WOLFE_C1 * a * dphi0;
    let curvature = |d: f64| d.abs() <= -WOLFE_C2 * dphi0;

    // (alpha, value, gradient, directional derivative) of the best Armijo point
    let mut lo: (f64, f64, Option<Vec<f64>>, f64) = (0.0, f0, None, dphi0);
    let mut hi: (f64, f64);
    let mut alpha = alpha0;
    let mut steps = 0;
    loop {
        let xa = point(alpha);
        let fa = ev.value(&xa);
        if !fa.is_finite() || !armijo(alpha, fa) || (steps > 0 && fa >= lo.1) {
            hi = (alpha, if fa.is_finite() { fa } else { f64::INFINITY });
            break;
        }
        let ga = ev.gradient(&xa)?;
        let da = dot(&ga, dir);
        if curvature(da) {
            return Ok(Some(Step {
                alpha,
                value: fa,
                gradient: ga,
            }));
        }
        if da >= 0.0 {
            hi = lo_to_hi(&lo);
            lo = (alpha, fa, Some(ga), da);
            break;
        }
        lo = (alpha, fa, Some(ga), da);
        steps += 1;
        if steps >= MAX_BRACKET_STEPS {
            return Ok(finish(lo));
        }
        alpha *= 2.0;
    }

    for _ in 0..MAX_ZOOM_STEPS {
        let (a_lo, f_lo, _, d_lo) = &lo;
        let (a_hi, f_hi) = hi;
        let width = a_hi - a_lo;
        if width.abs() <= f64::EPSILON * a_lo.abs().max(a_hi.abs()) {
            break;
        }
        // minimiser of the quadratic through (lo, f_lo, d_lo) and (hi, f_hi)
        let denom = 2.0 * (f_hi - f_lo - d_lo * width);
        let mut a = if denom.is_finite() && denom > 0.0 {
            a_lo - d_lo * width * width / denom
        } else {
            a_lo + 0.5 * width
        };
        let (min, max) = (a_lo.min(a_hi), a_lo.max(a_hi));
        let margin = 0.1 * width.abs();
        if !(a > min + margin && a < max - margin) {
            a = a_lo + 0.5 * width;
        }
        let xa = point(a);
        let fa = ev.value(&xa);
        if !fa.is_finite() || !armijo(a, fa) || fa >= *f_lo {
            hi = (a, if fa.is_finite() { fa } else { f64::INFINITY });
            continue;
        }
        let ga = ev.gradient(&xa)?;
        let da = dot(&ga, dir);
        if curvature(da) {
            return Ok(Some(Step {
                alpha: a,
                value: fa,
                gradient: ga,
            }));
        }
        if da * (a_hi - a) >= 0.0 {
            hi = lo_to_hi(&lo);
        }
        lo = (a, fa, Some(ga), da);
    }
    Ok(finish(lo))
}

fn lo_to_hi(lo: &(f64, f64, Option<Vec<f64>>, f64)) -> (f64, f64) {
    (lo.0, lo.1)
}

fn finish(lo: (f64, f64, Option<Vec<f64>>, f64)) -> Option<Step> {
    let (alpha, value, gradient, _) = lo;
    gradient.filter(|_| alpha > 0.0).map(|gradient| Step {
        alpha,
        value,
        gradient,
    })
}

/// Limited-memory BFGS with a strong-Wolfe line search.
///
/// The returned value never exceeds `f(x0)`. A failed line search ends the run
/// with [`Termination::LineSearchFailed`] and the best point so far rather than
/// an error; only a non-finite start or gradient is an error.
pub fn lbfgs_minimize<F, G>(f: F, grad: G, x0: &[f64], opts: &OptimizerOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    opts.validate()?;
    let mut ev = Evaluator {
        f,
        grad,
        function_calls: 0,
        gradient_calls: 0,
    };
    let mut x = x0.to_vec();
    let mut fx = ev.value(&x);
    if !fx.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let initial_value = fx;
    let mut g = ev.gradient(&x)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        VecDeque::with_capacity(opts.lbfgs_memory);
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut small_steps = 0;

    while iterations < opts.max_iterations {
        if max_abs(&g) < opts.gradient_tolerance {
            termination = Termination::Converged;
            break;
        }
        iterations += 1;

        let mut dir = two_loop(&g, &history);
        let mut dphi0 = dot(&g, &dir);
        if !(dphi0 < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            dphi0 = -dot(&g, &g);
        }
        let alpha0 = if history.is_empty() {
            (1.0 / max_abs(&g)).min(1.0)
        } else {
            1.0
        };

        match line_search(&mut ev, &x, &dir, fx, dphi0, alpha0)? {
            Some(step) => {
                let s: Vec<f64> = dir.iter().map(|d| step.alpha * d).collect();
                let y: Vec<f64> = step.gradient.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > f64::EPSILON * dot(&y, &y) {
                    if history.len() == opts.lbfgs_memory {
                        history.pop_front();
                    }
                    history.push_back((s.clone(), y, 1.0 / sy));
                }
                let decrease = fx - step.value;
                for (xi, si) in x.iter_mut().zip(&s) {
                    *xi += si;
                }
                fx = step.value;
                g = step.gradient;
                if decrease <= opts.value_tolerance * fx.abs().max(1.0) {
                    small_steps += 1;
                    if small_steps >= STALL_STEPS {
                        termination = Termination::Stalled;
                        break;
                    }
                } else {
                    small_steps = 0;
                }
            }
            None if !history.is_empty() => history.clear(),
            None => {
                termination = Termination::LineSearchFailed;
                break;
            }
        }
    }

    Ok(Minimum {
        params: x,
        value: fx,
        initial_value,
        iterations,
        function_calls: ev.function_calls,
        gradient_calls: ev.gradient_calls,
        termination,
    })
}

/// `-H g` from the stored curvature pairs.
fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

fn init_distribution() -> Normal<f64> {
    Normal::new(0.0, INIT_VARIANCE.sqrt()).expect("finite positive std")
}

/// `count` i.i.d. draws from `N(0, 0.1)`, reproducible from `seed`.
pub fn gaussian_init(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = init_distribution();
    (0..count).map(|_| dist.sample(&mut rng)).collect()
}

/// A Hamiltonian, a gate family, and the occupied qubits of the reference state.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    hamiltonian: PauliSum,
    family: GateFamily,
    occupations: Vec<usize>,
}

impl VqeProblem {
    pub fn new(hamiltonian: PauliSum, family: GateFamily, occupations: Vec<usize>) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        if n < 2 {
            return Err(Error::InvalidAnsatz("VQE needs at least 2 qubits".into()));
        }
        if let Some(&q) = occupations.iter().find(|&&q| q >= n) {
            return Err(Error::IndexOutOfRange {
                index: q,
                len: n,
                what: "qubits",
            });
        }
        Ok(Self {
            hamiltonian,
            family,
            occupations,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn family(&self) -> GateFamily {
        self.family
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occupations
    }

    pub fn ansatz(&self, layers: usize) -> Result<AnsatzSpec> {
        AnsatzSpec::new(self.n_qubits(), layers, self.family)
    }

    pub fn state(&self, spec: &AnsatzSpec, params: &[f64]) -> Result<StateVector> {
        prepare_state(spec, params, &self.occupations)
    }

    pub fn try_energy(&self, spec: &AnsatzSpec, params: &[f64]) -> Result<f64> {
        self.state(spec, params)?.expectation(&self.hamiltonian)
    }

    /// Energy, or NaN when the state cannot be prepared.
    pub fn energy(&self, spec: &AnsatzSpec, params: &[f64]) -> f64 {
        self.try_energy(spec, params).unwrap_or(f64::NAN)
    }

    pub fn gradient(&self, spec: &AnsatzSpec, params: &[f64], delta: f64) -> Result<Vec<f64>> {
        forward_diff_gradient(|t| self.energy(spec, t), params, delta)
    }

    /// Minimise the energy at fixed depth from `start`.
    pub fn minimize(
        &self,
        spec: &AnsatzSpec,
        start: &[f64],
        opts: &OptimizerOptions,
    ) -> Result<Minimum> {
        let delta = opts.fd_step;
        lbfgs_minimize(
            |t| self.energy(spec, t),
            |t| self.gradient(spec, t, delta),
            start,
            opts,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layers: usize,
    /// Parameters handed to the optimizer at this depth.
    pub initial_params: Vec<f64>,
    pub params: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub function_calls: usize,
    pub gradient_calls: usize,
    pub termination: Option<Termination>,
    /// Set when the optimizer errored; `params` then equal `initial_params`.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerwiseResult {
    pub records: Vec<LayerRecord>,
}

/// Grow the ansatz one layer at a time up to `max_layers`.
///
/// Depth 1 starts from Gaussian parameters. Each deeper run starts from the
/// previous optimum with the new layer's parameters drawn from the same
/// Gaussian; all draws come from one stream seeded by `seed`.
pub fn layerwise_optimize(
    problem: &VqeProblem,
    max_layers: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> Result<LayerwiseResult> {
    if max_layers == 0 {
        return Err(Error::InvalidOptions("max_layers must be >= 1".into()));
    }
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = init_distribution();
    let mut params: Vec<f64> = Vec::new();
    let mut records = Vec::with_capacity(max_layers);
    for layers in 1..=max_layers {
        let spec = problem.ansatz(layers)?;
        let fresh = spec.n_params() - params.len();
        params.extend((0..fresh).map(|_| dist.sample(&mut rng)));
        let initial_params = params.clone();
        let record = match problem.minimize(&spec, &params, opts) {
            Ok(m) => {
                params = m.params.clone();
                LayerRecord {
                    layers,
                    initial_params,
                    params: m.params,
                    energy: m.value,
                    iterations: m.iterations,
                    function_calls: m.function_calls,
                    gradient_calls: m.gradient_calls,
                    termination: Some(m.termination),
                    failure: None,
                }
            }
            Err(e) => LayerRecord {
                layers,
                energy: problem.energy(&spec, &initial_params),
                params: initial_params.clone(),
                initial_params,
                iterations: 0,
                function_calls: 0,
                gradient_calls: 0,
                termination: None,
                failure: Some(e.to_string()),
            },
        };
        records.push(record);
    }
    Ok(LayerwiseResult { records })
}
