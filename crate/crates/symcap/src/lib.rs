//! Symmetric capacities and action spectra of ellipsoids, polydiscs, balls,
//! and the Lagrangian bidisk: exact closed forms, embedding obstructions,
//! and two independent numerical oracles (a closed-characteristic shooting
//! solver and a Fourier loop-space model).

pub mod bidisk;
pub mod capacities;
pub mod cli;
pub mod domain;
pub mod loopspace;
pub mod solver;
pub mod spectrum;

pub use capacities::{
    capacity_ball, capacity_ellipsoid, capacity_polydisc, embedding_obstruction,
    related_capacities, DomainSpec, ObstructionStatus, ObstructionVerdict,
};
pub use domain::{ActionValue, PSymmetry, Provenance, Radii};
pub use spectrum::{eh_stream, sigma_p_prime_stream, sigma_p_stream, ActionStream};
