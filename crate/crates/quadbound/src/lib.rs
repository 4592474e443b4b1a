//! Quadrilateral meshing of simple polygons with guaranteed angle bounds.
//!
//! The pipeline decomposes a polygon into thick and thin pieces, meshes the
//! thick pieces by transferring a hyperbolic-tessellation mesh of the unit
//! disk through a Schwarz-Christoffel map, meshes the thin pieces with
//! explicit sector and channel templates, and stitches the fragments into a
//! single conforming mesh whose new angles lie in [60, 120] degrees.

pub mod error;
pub mod geom;
pub mod hyperbolic;
pub mod cellmesh;
pub mod hull;
pub mod tessellation;

pub use error::{Error, Result};
