//! Exact-arithmetic models of linearly recurrent Cantor systems.
//!
//! The crate represents a minimal Cantor system by the nested tower data that
//! defines it: per-level words over the previous level's towers, their
//! incidence matrices, and exact big-integer heights. On top of that it
//! computes the unique invariant measure with certified error radii, sorts
//! candidate eigenvalue exponents into continuous / not-an-eigenvalue /
//! inconclusive classes, simulates finite truncations of the dynamics, and
//! estimates Lyapunov spectra of random matrix-sequence ensembles.
//!
//! Heavy batch work (ensemble scans, classifying many exponents) runs on
//! rayon when the default `parallel` feature is enabled; the `*_seq` variants
//! are always available and are what the feature-off build uses.

pub mod ensemble;
pub mod matrix;
pub mod measure;
pub mod model;
pub mod simulate;
pub mod spectral;

pub use matrix::BigMatrix;
pub use model::{
    gallery, matrices_from_words, parse_gallery_shorthand, validate_system, GallerySpec,
    LevelWords, ModelError, SystemDescription, Tail, TowerSystem,
};
