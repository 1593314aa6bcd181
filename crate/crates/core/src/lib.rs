//! Numerical laboratory for finite-dimensional quantum groupoids.
//!
//! Everything here lives over direct sums of full complex matrix blocks:
//! C*-algebras are [`algebra::BlockAlgebra`]s, faithful positive functionals
//! carry their modular data as [`weights::Weight`]s, separability idempotents
//! are solved for in [`sepid`], and a candidate quantum groupoid — the tuple
//! `(A, Δ, E, B, ν, φ, ψ)` — is assembled in [`qgroupoid`] and verified
//! identity by identity into a [`report::VerificationReport`].
//!
//! Concrete inputs come from finite groupoid composition tables
//! ([`groupoid`]), which the [`models`] module turns into function-algebra
//! and convolution-algebra candidates.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod linalg;
pub mod linmap;
pub mod models;
pub mod qgroupoid;
pub mod report;
pub mod sepid;
pub mod weights;
pub mod wire;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Default residual tolerance for all verification checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Shared knobs for a verification run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    /// Residual tolerance; every check passes iff its residual stays below this.
    pub tolerance: f64,
    /// Seed for the deterministic random probes used by sampled checks.
    pub seed: u64,
    /// Real parameters at which one-parameter group identities are sampled.
    pub t_samples: Vec<f64>,
    /// Number of random probes per sampled check.
    pub samples: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            tolerance: DEFAULT_TOLERANCE,
            seed: 0x9e3779b97f4a7c15,
            t_samples: vec![1.0, -1.0, 0.5, -0.5, 0.3, -0.3, 0.25, 0.1],
            samples: 20,
        }
    }
}

impl RunSettings {
    pub fn with_tolerance(tolerance: f64) -> Self {
        RunSettings {
            tolerance,
            ..Default::default()
        }
    }

    pub(crate) fn rng(&self) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
