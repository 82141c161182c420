use serde_json::Value;
use vqe_web::{circuit_layout, plateau_scan, vqe_scan};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON")
}

#[test]
fn layout_lists_every_gate() {
    let v = parse(&circuit_layout(4, 2, "match").unwrap());
    assert_eq!(v["n_params"], 8);
    let gates = v["gates"].as_array().unwrap();
    assert_eq!(gates.len(), 4);
    assert_eq!((gates[3]["qa"].as_u64(), gates[3]["qb"].as_u64()), (Some(3), Some(0)));
    assert_eq!(gates[3]["first_param"], 6);

    let v = parse(&circuit_layout(5, 1, "generic").unwrap());
    assert_eq!(v["n_params"], 10);
}

#[test]
fn layout_rejects_bad_input() {
    assert!(circuit_layout(4, 1, "swap").unwrap_err().contains("swap"));
    assert!(circuit_layout(1, 1, "match").is_err());
}

#[test]
fn vqe_scan_reports_energies_and_correlations() {
    let v = parse(&vqe_scan("qubits = 4\nmax-layers = 2\nseed = 3").unwrap());
    let rows = v["convergence"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let last = rows[2]["abs_error"].as_f64().unwrap();
    assert!(last.abs() < 1e-6);
    assert_eq!(v["correlation"]["summary"].as_array().unwrap().len(), 3);

    let v = parse(&vqe_scan("model = tfim\nqubits = 3\nmax-layers = 1").unwrap());
    assert!(v["correlation"].is_null());
}

#[test]
fn scans_enforce_demo_limits() {
    assert!(vqe_scan("qubits = 12").unwrap_err().contains("limited"));
    assert!(plateau_scan("samples = 1000").unwrap_err().contains("limited"));
    assert!(vqe_scan("model = tfim\nmapping = jw").is_err());
}

#[test]
fn plateau_scan_is_deterministic() {
    let cfg = "qubits = 4\nlayers = 2,4\nsamples = 8\nseed = 11";
    let a = plateau_scan(cfg).unwrap();
    assert_eq!(a, plateau_scan(cfg).unwrap());
    let v = parse(&a);
    let cells = v.as_array().unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().all(|c| c["variance"].as_f64().unwrap() > 0.0));
}
