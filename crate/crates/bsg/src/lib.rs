//! Numerical geometry of cotangent bundles carrying a Berger-type deformed
//! Sasaki metric over Kähler bases.
//!
//! The crate evaluates the deformed metric and its Levi-Civita connection
//! through closed-form lift formulas, integrates the geodesic systems of the
//! total space and of the unit cotangent bundle, monitors their conserved
//! quantities, and cross-checks every closed form against a brute-force
//! coordinate-chart oracle. A small registry of charts (a flat worked example
//! with closed-form geodesics, flat `ℂ²`, a Fubini–Study chart of `CP¹`, and
//! two negative controls) backs the test and experiment surface.
//!
//! Quick start:
//!
//! ```
//! use bsg::registry;
//! use bsg::cotangent::{BergerSasakiConfig, CotangentPoint, LiftedVector};
//! use nalgebra::dvector;
//!
//! let chart = registry::lookup("paper-r2-kahler")?.chart();
//! let cfg = BergerSasakiConfig::new(&chart, 0.7);
//! let cp = CotangentPoint::new(dvector![2.0, 3.0], dvector![1.0, 1.0]);
//!
//! // the Liouville field V p has squared length r² in the deformed metric
//! let normal = cfg.unit_normal(&cp);
//! let norm = cfg.bs_metric(&cp, &normal, &normal)?;
//! assert!((norm - cfg.r_squared(&cp)?).abs() < 1e-12);
//! # Ok::<(), bsg::Error>(())
//! ```
//!
//! The accompanying guide (`book/` at the repository root) walks through each
//! layer; its code listings are compiled and run as doc-tests of this crate.

pub mod chart;
pub mod cotangent;
pub mod curve;
pub mod error;
pub mod experiment;
pub mod geodesic;
pub mod kahler;
pub mod ode;
pub mod oracle;
pub mod registry;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod test_charts;

// The guide's code listings run as doc-tests, so the book cannot drift away
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/base-geometry.md")]
    mod base_geometry {}
    #[doc = include_str!("../../../book/src/kahler-structures.md")]
    mod kahler_structures {}
    #[doc = include_str!("../../../book/src/cotangent-bundle.md")]
    mod cotangent_bundle {}
    #[doc = include_str!("../../../book/src/unit-bundle.md")]
    mod unit_bundle {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
