//! Saito bundles and meromorphic connections in Birkhoff normal form, and
//! the F-manifold and Frobenius structures they induce through a primitive
//! section.

mod birkhoff;
mod bundle;
mod induced;

pub use birkhoff::{birkhoff_flatness, birkhoff_to_saito, BirkhoffConnection, BirkhoffFlatness};
pub use bundle::{
    check_saito_axioms, check_saito_metric_axioms, SaitoBundle, SaitoMetricReport, SaitoReport,
};
pub use induced::{
    fmanifold_from_saito, frobenius_from_saito, metric_invariance, SaitoFManifold,
    SaitoFManifoldReport, SaitoFrobenius,
};
