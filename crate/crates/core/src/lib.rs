//! Flat planes, curvature and characteristic classes of the biquotients
//! `M_n = Sp(n+1) // Sp(n-1) Sp(1)` with the Cheeger-deformed metric.
//!
//! Layers, bottom up:
//!
//! - [`quat`]: quaternions, quaternionic matrices, `Sp(m)` elements.
//! - [`lie`]: `sp(m)`, its block subspaces, vertical and horizontal spaces.
//! - [`metric`]: the Cheeger metric, Levi-Civita connection and curvature.
//! - [`orbit`]: the fundamental domain `(theta, alpha)` and orbit reduction.
//! - [`flat`]: flat-plane certificates, closed forms and the search.
//! - [`scan`]: grid scans with CSV/JSON output.
//! - [`poly`], [`lattice`], [`topology`]: exact cohomology rings, Smith
//!   forms and Pontryagin classes.
//! - [`verify`], [`cli`]: verification suites and the command line.
//!
//! Each capability has a runnable example under `examples/`:
//! `quaternion_algebra`, `cheeger_curvature`, `submersion_geometry`,
//! `orbit_reduction`, `m2_flat_locus`, `family_flats`, `flat_search`,
//! `sphere_positivity`, `flat_scan` and `pontryagin`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flat;
pub mod lattice;
pub mod lie;
pub mod metric;
pub mod orbit;
pub mod poly;
pub mod quat;
pub mod scan;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
pub use flat::{find_flat_plane, FlatSearch, FlatWitness};
pub use metric::MetricOperator;
pub use orbit::FundamentalPoint;
pub use quat::{GroupElem, QMatrix, Quaternion};
