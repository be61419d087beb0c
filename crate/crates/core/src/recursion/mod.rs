//! The topological recursion on the framed curve, producing every stable
//! `W^(g,h)` as a symmetric Ψ-basis tensor.

mod cache;
mod calibrate;
mod corrdiff;
pub mod golden;
mod local;
mod step;
mod store;

pub use cache::{checksum, DiskCache, FORMAT_VERSION};
pub use calibrate::{calibrate_sign_kernel, KernelCalibration};
pub use corrdiff::{
    distinct_permutations, is_stable, moduli_dimension, CorrDiff, CorrDiffJson, TermJson,
};
pub use local::{Atom, Factor, LocalData};
pub use step::{assemble_integrand, residue_and_peel, Integrand, Slot, StepStats};
pub use store::{CorrStore, WindowPolicy};
