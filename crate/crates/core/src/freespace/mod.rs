//! Lipschitz functions, molecules of the Lipschitz-free space, their norms and weak* slices.

mod lipschitz;
mod molecule;
pub mod transport;

pub use lipschitz::{
    is_one_lipschitz, lip_norm, sup_extend, LipNorm, LipschitzFunction, PartialFunction, PointFunction,
};
pub use molecule::{
    evaluate_pairing, molecule_norm, pair_molecule, slice_contains, Molecule, MoleculeNorm, SliceCheck,
    SliceMembership, WeakStarSlice,
};
