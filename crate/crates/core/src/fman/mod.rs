//! F-manifold models as jet data: canonical models, axiom checks, canonical
//! frames, infinitesimal symmetries and germ isomorphisms.

mod frame;
mod iso;
mod model;
mod symmetry;

pub use frame::{
    bracket_constants, canonical_frame, check_frame_brackets, euler_powers, BracketConstants,
    CanonicalFrame, FrameReport, FrameScope,
};
pub use iso::{distance_from_identity, germ_isomorphism, linear_part, GermIsomorphism, IsoReport};
pub use model::{
    check_fmanifold, product_model, standard_block, standard_model, FManifoldModel, FManifoldReport,
};
pub use symmetry::{
    check_symmetry, check_symmetry_brackets, symmetry_basis, BracketEntry, SymmetryBracketReport,
    SymmetryReport,
};
