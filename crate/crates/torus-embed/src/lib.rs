//! Bounded and equivariant isometric embeddings of the universal cover of a
//! Riemannian n-torus, numerically certified.
//!
//! Given a ℤⁿ-periodic (more generally, Bieberbach-invariant) metric g̃ on
//! ℝⁿ, the crate decomposes it as g̃ = Q1 + c·Σdxᵢ², realizes (𝕋ⁿ, Q1)
//! through an explicit verified embedding oracle u : ℝⁿ → ℝᴺ, realizes the
//! constant part by either a product of annulus spirals Ψ : ℝⁿ → ℝ^{2n} or
//! the linear isometry e(x) = √c·x, and pairs the two into
//!
//!  * `E = (Φ, Ψ)` — an isometric embedding into a bounded subset of
//!    ℝ^{N+2n}, and
//!  * `F = (Φ, e)` — an isometric embedding into ℝ^{N+n} to which every
//!    deck transformation extends as an ambient isometry.
//!
//! All core types are generic over the scalar via [`scalar::Real`]
//! (`f32`/`f64`); the group algebra is exact (integer holonomies, rational
//! translations). The aliases below fix `f64`, which is what the CLI and
//! the certification suite use.

// Index loops over parallel matrix/vector structures are the local idiom.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod construct;
pub mod error;
pub mod export;
pub mod exprlang;
pub mod group;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod pipeline;
pub mod sample;
pub mod scalar;
pub mod spiral;
pub mod verify;

pub use error::{Error, Result};

pub type MetricField64 = metric::MetricField<f64>;
pub type MetricSplit64 = metric::MetricSplit<f64>;
pub type SpiralCurve64 = spiral::SpiralCurve<f64>;
pub type ProductSpiralMap64 = spiral::ProductSpiralMap<f64>;
pub type EmbeddingOracle64 = oracle::EmbeddingOracle<f64>;
pub type AmbientMap64 = construct::AmbientMap<f64>;
pub type AmbientIsometry64 = group::AmbientIsometry<f64>;
pub type InducedAction64 = group::InducedAction<f64>;
