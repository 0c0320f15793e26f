//! Simulation and exact sampling for the vertex-splitting process on rooted
//! multigraphs.
//!
//! Every vertex splits at rate 1 into two offspring; each parallel edge
//! follows one offspring chosen by a fair coin, `Po(lambda/2)` new edges join
//! the two offspring, and the root moves to one of them at random. The root
//! component converges to an invariant random graph `M(lambda)`, which
//! [`limit_sampler::sample_m_lambda`] samples exactly.
//!
//! ```
//! use splitgraph::limit_sampler::{sample_m_lambda, SamplerCaps};
//! use splitgraph::rng::stream;
//!
//! let (m, diag) = sample_m_lambda(1.0, &mut stream(7), &SamplerCaps::default()).unwrap();
//! assert!(m.is_connected());
//! assert_eq!(m.vertex_count(), diag.component_size);
//! ```

pub mod error;
pub mod experiments;
pub mod genealogy;
pub mod limit_sampler;
pub mod multigraph;
pub mod processes;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use multigraph::{canonical_form, CanonicalCode, RootedMultigraph, VertexId};
