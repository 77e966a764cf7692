//! Structure inference for experimental designs.
//!
//! Starting from a design table (units by factors), this crate builds the
//! *layout structure*: every distinct factor or generalised factor, the
//! refinement order between them, degrees of freedom by the subtraction
//! method and a rank-based check for confounded degrees of freedom. Given a
//! description of the randomisation performed it derives the *restricted
//! layout structure* and a suggested mixed model, and renders both
//! structures as Hasse diagrams (SVG or DOT).
//!
//! ```
//! use hasse_core::{datasets, layout::LayoutStructure};
//!
//! let fixture = datasets::bibd_6_10_3();
//! let ls = LayoutStructure::build(&fixture.table).unwrap();
//! let labels: Vec<_> = ls.objects().iter().map(|o| o.name.as_str()).collect();
//! assert_eq!(labels, ["Mean", "Blocks", "Varieties", "Blocks^Varieties"]);
//! ```

use std::fmt;

pub mod confound;
pub mod datasets;
pub mod design;
pub mod layout;
mod linalg;
pub mod relations;
pub mod render;
pub mod rls;

pub use confound::{detect_confounding, ConfoundReport};
pub use design::{check_design, load_design, partition_of, DesignError, DesignTable, Factor, Partition};
pub use layout::{FactorSet, LayoutError, LayoutOptions, LayoutStructure, StructuralObject};
pub use relations::{classify, refines, Relationship};
pub use rls::{RandExpr, RandomisationPlan, RestrictedLayoutStructure};

/// A warning produced while analysing a design. Never fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    SingleLevel {
        factor: String,
    },
    DiscreteFactor {
        factor: String,
    },
    IdenticalFactors {
        first: String,
        second: String,
    },
    /// A fixed factor equivalent to a generalised factor with a random constituent.
    Reclassified {
        factor: String,
        via: String,
    },
    /// A singular value close to the rank threshold.
    RankTolerance {
        object: String,
    },
    RequiredObjectAbsent {
        object: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::SingleLevel { factor } => {
                write!(f, "factor `{factor}` has a single level and behaves like the Mean")
            }
            Diagnostic::DiscreteFactor { factor } => write!(
                f,
                "factor `{factor}` has one unit per level; it looks like the observational unit index"
            ),
            Diagnostic::IdenticalFactors { first, second } => write!(
                f,
                "factors `{first}` and `{second}` group the units identically and will be merged"
            ),
            Diagnostic::Reclassified { factor, via } => write!(
                f,
                "`{factor}` was declared fixed but is equivalent to `{via}`, which involves a random factor; \
                 it is treated as random (change the flags if this is wrong)"
            ),
            Diagnostic::RankTolerance { object } => write!(
                f,
                "rank decision for `{object}` is close to the numerical tolerance; confounding results may be unreliable"
            ),
            Diagnostic::RequiredObjectAbsent { object } => write!(
                f,
                "`{object}` should always be part of the restricted layout structure but is set to NULL"
            ),
        }
    }
}
