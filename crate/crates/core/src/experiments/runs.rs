//! Experiment drivers: layerwise convergence, correlation profiles, gradient
//! variance scans and plain exact diagonalization.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, ModelKind};
use crate::ansatz::alternating_occupations;
use crate::error::{Error, Result};
use crate::models::{
    build_hubbard_nnn, build_tfim, to_qubit_hamiltonian, HubbardNnnParams, TfimParams,
};
use crate::optimizer::{forward_diff_gradient, layerwise_optimize, OptimizerOptions, VqeProblem};
use crate::oracle::{
    correlation_profile, exact_correlation_profile, exact_ground, infidelity, sector_ground,
    GroundSolution,
};
use crate::pauli::PauliSum;
use crate::simulator::StateVector;

/// Qubit Hamiltonian for `n` sites under `cfg`.
pub fn build_hamiltonian(cfg: &ExperimentConfig, n: usize) -> Result<PauliSum> {
    match cfg.model {
        ModelKind::HubbardNnn => {
            let encoding = cfg
                .mapping
                .encoding()
                .ok_or_else(|| Error::Config("model hubbard-nnn needs mapping jw or bk".into()))?;
            let op = build_hubbard_nnn(&HubbardNnnParams {
                n_sites: n,
                t: cfg.t,
                v1: cfg.v1,
                v2: cfg.v2,
                periodic: cfg.periodic,
            })?;
            to_qubit_hamiltonian(&op, encoding)
        }
        ModelKind::Tfim => build_tfim(&TfimParams {
            n_sites: n,
            h: cfg.h,
            periodic: cfg.periodic,
        }),
    }
}

/// Occupied qubits of the circuit's input state: the alternating filling for
/// particle-conserving runs, the all-zero state otherwise.
pub fn reference_occupations(cfg: &ExperimentConfig, n: usize) -> Result<Vec<usize>> {
    if cfg.conserves_particles() {
        alternating_occupations(n, cfg.filling.particles(n))
    } else {
        Ok(Vec::new())
    }
}

/// Particle count of the exact comparison, when restricted to a sector.
pub fn reference_sector(cfg: &ExperimentConfig, n: usize) -> Option<usize> {
    cfg.conserves_particles().then(|| cfg.filling.particles(n))
}

pub fn exact_reference(cfg: &ExperimentConfig, h: &PauliSum) -> Result<GroundSolution> {
    match reference_sector(cfg, h.n_qubits()) {
        Some(k) => sector_ground(h, k),
        None => exact_ground(h),
    }
}

pub fn optimizer_options(cfg: &ExperimentConfig) -> OptimizerOptions {
    OptimizerOptions {
        fd_step: cfg.delta,
        ..OptimizerOptions::default()
    }
}

#[cfg(feature = "parallel")]
fn map_ordered<T: Sync, U: Send>(
    items: &[T],
    parallel: bool,
    f: impl Fn(&T) -> U + Sync + Send,
) -> Vec<U> {
    use rayon::prelude::*;
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, U>(items: &[T], _parallel: bool, f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Exact ground-state summary for one system size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceInfo {
    pub n: usize,
    pub particles: Option<usize>,
    pub e0: f64,
    pub degeneracy: usize,
    pub gap: Option<f64>,
}

impl ReferenceInfo {
    fn new(n: usize, particles: Option<usize>, g: &GroundSolution) -> Self {
        Self {
            n,
            particles,
            e0: g.energy,
            degeneracy: g.degeneracy,
            gap: g.gap,
        }
    }
}

/// Outcome of one optimization at one depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStatus {
    pub n: usize,
    pub layers: usize,
    pub status: String,
}

/// One optimized (or reference) state per reported depth.
struct DepthResult {
    layers: usize,
    state: StateVector,
    energy: f64,
    iterations: usize,
    status: String,
}

struct SizeRun {
    reference: ReferenceInfo,
    ground: GroundSolution,
    depths: Vec<DepthResult>,
}

fn layerwise_run(cfg: &ExperimentConfig, n: usize) -> Result<SizeRun> {
    let h = build_hamiltonian(cfg, n)?;
    let ground = exact_reference(cfg, &h)?;
    let problem = VqeProblem::new(h, cfg.gate_family(), reference_occupations(cfg, n)?)?;
    let max_layers = cfg.max_layers();
    let records = if max_layers > 0 {
        layerwise_optimize(&problem, max_layers, cfg.seed, &optimizer_options(cfg))?.records
    } else {
        Vec::new()
    };
    let mut depths = Vec::with_capacity(cfg.layers.len());
    for &layers in &cfg.layers {
        let spec = problem.ansatz(layers)?;
        let (params, iterations, status): (&[f64], usize, String) = if layers == 0 {
            (&[], 0, "reference".into())
        } else {
            let r = &records[layers - 1];
            let status = match (&r.failure, r.termination) {
                (Some(msg), _) => format!("failed: {msg}"),
                (None, Some(t)) => t.as_str().into(),
                (None, None) => "unknown".into(),
            };
            (&r.params, r.iterations, status)
        };
        let state = problem.state(&spec, params)?;
        let energy = state.expectation(problem.hamiltonian())?;
        depths.push(DepthResult {
            layers,
            state,
            energy,
            iterations,
            status,
        });
    }
    Ok(SizeRun {
        reference: ReferenceInfo::new(n, reference_sector(cfg, n), &ground),
        ground,
        depths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub layers: usize,
    pub e_vqe: f64,
    pub e_exact: f64,
    /// `e_vqe - e_exact`; non-negative up to round-off by the variational principle.
    pub abs_error: f64,
    pub infidelity: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub records: Vec<ConvergenceRecord>,
    pub statuses: Vec<RunStatus>,
    pub references: Vec<ReferenceInfo>,
}

/// Layerwise VQE for every size, compared with the exact ground state.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let runs = map_ordered(&cfg.qubits, true, |&n| layerwise_run(cfg, n));
    let mut report = ConvergenceReport {
        records: Vec::new(),
        statuses: Vec::new(),
        references: Vec::new(),
    };
    for (run, &n) in runs.into_iter().zip(&cfg.qubits) {
        let run = run?;
        for d in &run.depths {
            report.records.push(ConvergenceRecord {
                n,
                layers: d.layers,
                e_vqe: d.energy,
                e_exact: run.ground.energy,
                abs_error: d.energy - run.ground.energy,
                infidelity: infidelity(&d.state, &run.ground)?,
                iterations: d.iterations,
            });
            report.statuses.push(RunStatus {
                n,
                layers: d.layers,
                status: d.status.clone(),
            });
        }
        report.references.push(run.reference);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRecord {
    pub n: usize,
    pub layers: usize,
    pub m: usize,
    pub c_vqe: f64,
    pub c_exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSummary {
    pub n: usize,
    pub layers: usize,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub records: Vec<CorrelationRecord>,
    pub summary: Vec<CorrelationSummary>,
    pub statuses: Vec<RunStatus>,
    pub references: Vec<ReferenceInfo>,
}

/// `||c_vqe - c_exact||_2 / ||c_exact||_2`.
pub fn correlation_relative_error(c_vqe: &[f64], c_exact: &[f64]) -> Result<f64> {
    if c_vqe.len() != c_exact.len() {
        return Err(Error::Invalid(format!(
            "correlation profiles differ in length: {} vs {}",
            c_vqe.len(),
            c_exact.len()
        )));
    }
    let norm = c_exact.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Invalid(
            "exact correlation profile is identically zero".into(),
        ));
    }
    let diff = c_vqe
        .iter()
        .zip(c_exact)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}

/// Density correlations `C(m)` of the optimized and exact states.
pub fn run_correlation(cfg: &ExperimentConfig) -> Result<CorrelationReport> {
    let runs = map_ordered(&cfg.qubits, true, |&n| layerwise_run(cfg, n));
    let mut report = CorrelationReport {
        records: Vec::new(),
        summary: Vec::new(),
        statuses: Vec::new(),
        references: Vec::new(),
    };
    for (run, &n) in runs.into_iter().zip(&cfg.qubits) {
        let run = run?;
        let exact = exact_correlation_profile(&run.ground)?;
        for d in &run.depths {
            let vqe = correlation_profile(&d.state)?;
            for m in 0..n {
                report.records.push(CorrelationRecord {
                    n,
                    layers: d.layers,
                    m,
                    c_vqe: vqe[m],
                    c_exact: exact[m],
                });
            }
            report.summary.push(CorrelationSummary {
                n,
                layers: d.layers,
                rel_error: correlation_relative_error(&vqe, &exact)?,
            });
            report.statuses.push(RunStatus {
                n,
                layers: d.layers,
                status: d.status.clone(),
            });
        }
        report.references.push(run.reference);
    }
    Ok(report)
}

/// Gradient at one random parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauSample {
    pub n: usize,
    pub layers: usize,
    pub sample: usize,
    /// Empty when the sample was excluded.
    pub gradient: Vec<f64>,
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauAggregate {
    pub n: usize,
    pub layers: usize,
    /// Unbiased variance of all gradient components of all used samples.
    pub variance: f64,
    pub samples_used: usize,
    pub samples_excluded: usize,
    /// Unbiased variance of each component across used samples.
    pub component_variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauReport {
    pub samples: Vec<PlateauSample>,
    pub aggregates: Vec<PlateauAggregate>,
}

/// Generator for sample `sample` of cell `(n, layers)`, independent of
/// evaluation order.
pub fn sample_rng(seed: u64, n: usize, layers: usize, sample: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([seed, n as u64, layers as u64, sample as u64])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// `sum (x - mean)^2 / (len - 1)`; NaN below two values.
pub fn unbiased_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (count, sum) = values
        .clone()
        .fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
    if count < 2 {
        return f64::NAN;
    }
    let mean = sum / count as f64;
    values.map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
}

/// Gradient variance over uniformly random parameters in `[0, 2pi)`.
/// Uses the thread pool when the `parallel` feature is on.
pub fn run_plateau(cfg: &ExperimentConfig) -> Result<PlateauReport> {
    plateau(cfg, true)
}

/// [`run_plateau`] on the calling thread only.
pub fn run_plateau_serial(cfg: &ExperimentConfig) -> Result<PlateauReport> {
    plateau(cfg, false)
}

fn plateau(cfg: &ExperimentConfig, parallel: bool) -> Result<PlateauReport> {
    let mut problems = Vec::with_capacity(cfg.qubits.len());
    for &n in &cfg.qubits {
        let h = build_hamiltonian(cfg, n)?;
        problems.push(VqeProblem::new(
            h,
            cfg.gate_family(),
            reference_occupations(cfg, n)?,
        )?);
    }
    let mut tasks = Vec::new();
    for (p, problem) in problems.iter().enumerate() {
        for &layers in &cfg.layers {
            let spec = problem.ansatz(layers)?;
            for sample in 0..cfg.samples {
                tasks.push((p, layers, sample, spec.clone()));
            }
        }
    }
    let samples = map_ordered(&tasks, parallel, |(p, layers, sample, spec)| {
        let problem = &problems[*p];
        let n = problem.n_qubits();
        let mut rng = sample_rng(cfg.seed, n, *layers, *sample);
        let theta: Vec<f64> = (0..spec.n_params())
            .map(|_| rng.random_range(0.0..TAU))
            .collect();
        let (gradient, excluded) =
            match forward_diff_gradient(|t| problem.energy(spec, t), &theta, cfg.delta) {
                Ok(g) => (g, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
        PlateauSample {
            n,
            layers: *layers,
            sample: *sample,
            gradient,
            excluded,
        }
    });

    let mut aggregates = Vec::new();
    for cell in samples.chunks(cfg.samples) {
        let used: Vec<&PlateauSample> = cell.iter().filter(|s| s.excluded.is_none()).collect();
        let pooled = used.iter().flat_map(|s| s.gradient.iter().copied());
        let n_params = used.first().map_or(0, |s| s.gradient.len());
        aggregates.push(PlateauAggregate {
            n: cell[0].n,
            layers: cell[0].layers,
            variance: unbiased_variance(pooled),
            samples_used: used.len(),
            samples_excluded: cell.len() - used.len(),
            component_variance: (0..n_params)
                .map(|k| unbiased_variance(used.iter().map(|s| s.gradient[k])))
                .collect(),
        });
    }
    Ok(PlateauReport {
        samples,
        aggregates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdRecord {
    pub n: usize,
    /// Particle sector, or empty for the full register.
    pub particles: Option<usize>,
    pub e0: f64,
    pub degeneracy: usize,
    pub gap: Option<f64>,
}

/// Exact ground energy and degeneracy for every size.
pub fn run_ed(cfg: &ExperimentConfig) -> Result<Vec<EdRecord>> {
    cfg.qubits
        .iter()
        .map(|&n| {
            let h = build_hamiltonian(cfg, n)?;
            let g = exact_reference(cfg, &h)?;
            Ok(EdRecord {
                n,
                particles: reference_sector(cfg, n),
                e0: g.energy,
                degeneracy: g.degeneracy,
                gap: g.gap,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{Experiment, RawConfig};

    fn config(exp: Experiment, pairs: &[(&str, &str)]) -> ExperimentConfig {
        let mut raw = RawConfig::default();
        for (k, v) in pairs {
            raw.set(k, v).unwrap();
        }
        raw.resolve(exp).unwrap()
    }

    #[test]
    fn relative_error_cases() {
        let c = [0.25, -0.1, 0.05, -0.1];
        assert_eq!(correlation_relative_error(&c, &c).unwrap(), 0.0);
        let doubled: Vec<f64> = c.iter().map(|x| 2.0 * x).collect();
        assert!((correlation_relative_error(&doubled, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation_relative_error(&[0.0; 4], &c).unwrap() - 1.0).abs() < 1e-15);
        assert!(correlation_relative_error(&c, &[0.0; 4]).is_err());
        assert!(correlation_relative_error(&c[..2], &c).is_err());
    }

    #[test]
    fn unbiased_variance_textbook() {
        let v = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert!((unbiased_variance(v.iter().copied()) - 32.0 / 7.0).abs() < 1e-12);
        assert!(unbiased_variance([1.0].iter().copied()).is_nan());
    }

    #[test]
    fn sample_streams_are_distinct_and_stable() {
        let draw = |s, n, l, k| sample_rng(s, n, l, k).random::<u64>();
        assert_eq!(draw(7, 4, 2, 0), draw(7, 4, 2, 0));
        let all = [
            draw(7, 4, 2, 0),
            draw(7, 4, 2, 1),
            draw(7, 4, 6, 0),
            draw(7, 6, 2, 0),
            draw(8, 4, 2, 0),
        ];
        for i in 0..all.len() {
            for j in 0..i {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn convergence_rows_and_reference_depth() {
        let cfg = config(
            Experiment::Convergence,
            &[("qubits", "4"), ("max-layers", "2"), ("seed", "1")],
        );
        let rep = run_convergence(&cfg).unwrap();
        assert_eq!(rep.records.len(), 3);
        let r0 = &rep.records[0];
        assert_eq!(r0.layers, 0);
        // n = 4 half filling starts from sites 0 and 2: V2 couples them twice on the ring
        assert_eq!(r0.e_vqe, 2.0);
        assert_eq!(rep.references[0].particles, Some(2));
        for r in &rep.records {
            assert!(r.abs_error >= -1e-9);
        }
        assert!(rep.records[2].abs_error <= 1e-6, "{:?}", rep.records);
    }

    #[test]
    fn correlation_rows() {
        let cfg = config(
            Experiment::Correlation,
            &[("qubits", "4"), ("layers", "1,2")],
        );
        let rep = run_correlation(&cfg).unwrap();
        assert_eq!(rep.records.len(), 2 * 4);
        assert_eq!(rep.summary.len(), 2);
        for r in &rep.records {
            assert!(r.m < 4);
        }
    }

    #[test]
    fn plateau_shape_and_statistics() {
        let cfg = config(
            Experiment::Plateau,
            &[
                ("qubits", "4,6"),
                ("layers", "0,1,3"),
                ("samples", "5"),
                ("seed", "7"),
            ],
        );
        let rep = run_plateau(&cfg).unwrap();
        assert_eq!(rep.samples.len(), 2 * 2 * 5);
        assert_eq!(rep.aggregates.len(), 4);
        for a in &rep.aggregates {
            let raw: Vec<f64> = rep
                .samples
                .iter()
                .filter(|s| s.n == a.n && s.layers == a.layers)
                .flat_map(|s| s.gradient.clone())
                .collect();
            assert_eq!(raw.len(), 2 * a.layers * (a.n / 2) * 5);
            assert_eq!(a.variance, unbiased_variance(raw.iter().copied()));
            assert_eq!(a.samples_used, 5);
        }
        assert_eq!(rep, run_plateau_serial(&cfg).unwrap());
    }

    #[test]
    fn ed_tfim_three_sites() {
        let cfg = config(
            Experiment::Ed,
            &[("model", "tfim"), ("qubits", "3"), ("h", "1")],
        );
        let rows = run_ed(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].particles, None);
        let h = build_tfim(&TfimParams {
            n_sites: 3,
            h: 1.0,
            periodic: true,
        })
        .unwrap();
        let g = exact_ground(&h).unwrap();
        assert_eq!((rows[0].e0, rows[0].degeneracy), (g.energy, g.degeneracy));
    }
}
