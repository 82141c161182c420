pub mod ansatz;
pub mod error;
pub mod experiments;
pub mod fermion;
pub mod models;
pub mod optimizer;
pub mod oracle;
pub mod pauli;
pub mod simulator;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(test)]
pub(crate) mod testutil {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
