//! Poisson transforms on trees of bounded degree.
//!
//! Boundary measures are handled through their edge flows on a tree truncated
//! at a finite depth. The Poisson transform `P_z`, its inverse `β_z`, limit
//! recovery on regular trees and the Hölder growth diagnostics are all exact
//! on such a truncation.
//!
//! ```
//! use tree_poisson::{poisson_transform, boundary, BoundaryMeasure, SpectralParam, Tree};
//!
//! let tree = Tree::regular(2, 6)?;
//! let mu = BoundaryMeasure::random(&tree, 7);
//! let z = SpectralParam::real(2.0)?;
//! let f = poisson_transform(z, &mu)?;
//! assert!(boundary::roundtrip_measure(z, &mu)? < 1e-10);
//! assert!(boundary::check_eigen_characterization(z, &f)?.root_gap < 1e-10);
//! # Ok::<(), tree_poisson::Error>(())
//! ```

pub mod boundary;
pub mod error;
pub mod hoelder;
pub mod measure;
pub mod numeric;
pub mod poisson;
pub mod rng;
pub mod tree;

pub use boundary::{EdgeCoefficients, EigenReport, LimitEntry, LimitSequence};
pub use error::{Error, ErrorClass, Result};
pub use hoelder::{GrowthEnvelope, GrowthReport, SectionMap, Theta};
pub use measure::{BoundaryMeasure, ClopenSet, CylinderFunction};
pub use num_complex::Complex64;
pub use numeric::{format_f64, SpectralParam};
pub use poisson::{poisson_transform, PartialFunction, VertexFunction};
pub use rng::UnitSquareSampler;
pub use tree::{DirectedEdge, Rerooted, Tree, Vertex, ROOT};
