//! WebAssembly entry points for the static demo page.
//!
//! Each export takes plain arguments or `key = value` config text and returns
//! a JSON string; errors come back as message strings.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use vqe_core::ansatz::GateFamily;
use vqe_core::ansatz::AnsatzSpec;
use vqe_core::experiments::config::FamilyName;
use vqe_core::experiments::{
    run_convergence, run_correlation, run_plateau_serial, Experiment, ExperimentConfig, RawConfig,
};

/// Largest register the page will simulate.
pub const MAX_DEMO_QUBITS: usize = 10;
/// Largest sample count per cell the page will evaluate.
pub const MAX_DEMO_SAMPLES: usize = 200;

type Reply = Result<String, String>;

fn to_json<T: Serialize>(value: &T) -> Reply {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn demo_config(text: &str, experiment: Experiment) -> Result<ExperimentConfig, String> {
    let raw = RawConfig::parse(text).map_err(|e| e.to_string())?;
    let cfg = raw.resolve(experiment).map_err(|e| e.to_string())?;
    if let Some(&n) = cfg.qubits.iter().find(|&&n| n > MAX_DEMO_QUBITS) {
        return Err(format!("the demo is limited to {MAX_DEMO_QUBITS} qubits, got {n}"));
    }
    if cfg.samples > MAX_DEMO_SAMPLES {
        return Err(format!("the demo is limited to {MAX_DEMO_SAMPLES} samples, got {}", cfg.samples));
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct GateView {
    layer: usize,
    qa: usize,
    qb: usize,
    first_param: usize,
}

#[derive(Serialize)]
struct LayoutView {
    n_qubits: usize,
    n_layers: usize,
    n_params: usize,
    gates: Vec<GateView>,
}

/// Gate placements of the checkerboard circuit.
#[wasm_bindgen]
pub fn circuit_layout(n_qubits: usize, n_layers: usize, family: &str) -> Reply {
    let family: GateFamily = family.parse::<FamilyName>().map_err(|e| e.to_string())?.0;
    if n_qubits > 64 {
        return Err(format!("too many qubits: {n_qubits}"));
    }
    let spec = AnsatzSpec::new(n_qubits, n_layers, family).map_err(|e| e.to_string())?;
    to_json(&LayoutView {
        n_qubits,
        n_layers,
        n_params: spec.n_params(),
        gates: spec
            .placements()
            .iter()
            .map(|p| GateView {
                layer: p.layer,
                qa: p.qubits.0,
                qb: p.qubits.1,
                first_param: p.params.start,
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct ScanView<'a> {
    convergence: &'a [vqe_core::experiments::ConvergenceRecord],
    correlation: Option<vqe_core::experiments::CorrelationReport>,
    references: &'a [vqe_core::experiments::ReferenceInfo],
}

/// Layerwise VQE energies, plus correlation profiles when the run conserves
/// particle number.
#[wasm_bindgen]
pub fn vqe_scan(config: &str) -> Reply {
    let cfg = demo_config(config, Experiment::Convergence)?;
    let conv = run_convergence(&cfg).map_err(|e| e.to_string())?;
    let correlation = if cfg.conserves_particles() {
        let mut c = cfg.clone();
        c.experiment = Experiment::Correlation;
        Some(run_correlation(&c).map_err(|e| e.to_string())?)
    } else {
        None
    };
    to_json(&ScanView {
        convergence: &conv.records,
        correlation,
        references: &conv.references,
    })
}

/// Pooled gradient variance per `(n, layers)` cell.
#[wasm_bindgen]
pub fn plateau_scan(config: &str) -> Reply {
    let cfg = demo_config(config, Experiment::Plateau)?;
    let rep = run_plateau_serial(&cfg).map_err(|e| e.to_string())?;
    to_json(&rep.aggregates)
}
