//! Determination of a pure quantum state from measured probability
//! distributions.
//!
//! A complete measurement of an observable gives the probabilities of its
//! eigenvectors in an unknown state, but not the state itself. This crate
//! reconstructs the state by iterating *imposition operators*: each one
//! rewrites the current iterate's expansion moduli in one measured eigenbasis
//! to the measured values while keeping the iterate's phases. Cycling the
//! operators of two or more observables from a random start converges, close
//! to exponentially, onto a ray reproducing every measured distribution:
//! either the generating state or a Pauli partner of it (a distinct ray with
//! identical distributions for everything measured).
//!
//! The pieces:
//!
//! - [`state`]: state vectors, the ray metric √2·√(1 − |⟨a,b⟩|), canonical
//!   phase fixing, Haar-random sampling.
//! - [`eigen`]: a small dense Hermitian eigensolver (cyclic complex Jacobi).
//! - [`observables`]: eigenbases: standard/Fourier, Haar-random, the full
//!   mutually unbiased family in prime dimension, spin components along
//!   arbitrary directions.
//! - [`imposition`]: Born distributions, the imposition operator, the phase
//!   operator, and the analytic distance bound around them.
//! - [`mod@reconstruct`]: the iteration with residual monitoring, stall
//!   detection, and restarts.
//! - [`partners`]: partner enumeration by spanning random starts, the
//!   pathological-case combinatorics, and the closed-form spin-1 partner map.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the `*64` aliases below are the working precision used by the CLI and the
//! test suites. All randomness flows through seeded, streamed generators, so
//! every run is reproducible bit for bit.
//!
//! ```
//! use statedet::{
//!     mub_family, random_state, ray_distance, reconstruct, Config64, ImpositionData,
//!     RandomSource,
//! };
//!
//! // An unknown state and the measured distributions of three mutually
//! // unbiased observables it generates.
//! let mut rng = RandomSource::new(7, 0);
//! let phi = random_state::<f64>(3, &mut rng)?;
//! let data: Vec<_> = mub_family::<f64>(3)?
//!     .into_iter()
//!     .take(3)
//!     .map(|basis| ImpositionData::from_generator(basis, &phi))
//!     .collect::<Result<_, _>>()?;
//!
//! // Reconstruct from the distributions alone.
//! let run = reconstruct(&data, &Config64::new(RandomSource::new(7, 1)))?;
//! assert!(run.converged());
//! // The result reproduces every measured distribution; for generic
//! // generators it is the state itself or one of finitely many partners.
//! assert!(statedet::residual(run.final_state.representative(), &data)? <= 1e-12);
//! # Ok::<(), statedet::Error>(())
//! ```

pub mod eigen;
pub mod error;
pub mod imposition;
pub mod observables;
pub mod partners;
pub mod reconstruct;
pub mod rng;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use rng::RandomSource;
pub use scalar::Scalar;

pub use eigen::{hermitian_eigenbasis, CMatrix};
pub use imposition::{
    born_distribution, impose_distribution, impose_phases, ingest_distributions,
    post_imposition_bound, ImpositionData, ProbabilityDistribution,
};
pub use observables::{
    angular_momentum_basis, fourier_basis, mub_family, random_basis, standard_basis,
    unbiasedness_check, xp_basis, ObservableKind, ObservableSpec, OrthonormalBasis,
};
pub use partners::{
    cluster_rays, enumerate_partners, j_partner_conditions, j_partner_construct,
    pathological_expected_count, JCondition, JState3, PartnerSet, RayCluster,
};
pub use reconstruct::{
    cycle, detect_stall, reconstruct, reconstruct_traced, residual, IterationTrace, OrderingPolicy,
    ReconstructionConfig, RestartPolicy, RunResult, RunStatus,
};
pub use state::{
    canonicalize, induced_distance, random_orthogonal_state, random_state, ray_distance,
    CanonicalRay, StateVector,
};

/// Working-precision aliases.
pub type StateVector64 = state::StateVector<f64>;
pub type CanonicalRay64 = state::CanonicalRay<f64>;
pub type Basis64 = observables::OrthonormalBasis<f64>;
pub type Distribution64 = imposition::ProbabilityDistribution<f64>;
pub type ImpositionData64 = imposition::ImpositionData<f64>;
pub type Config64 = reconstruct::ReconstructionConfig<f64>;
pub type RunResult64 = reconstruct::RunResult<f64>;
pub type PartnerSet64 = partners::PartnerSet<f64>;
