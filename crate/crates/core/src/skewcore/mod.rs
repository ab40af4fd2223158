//! Storage types, permutations, the T = S − Sᵀ splitting, reconstruction
//! and Matrix Market I/O.

pub mod flops;
pub mod lower;
pub mod matrix;
pub mod mm;
pub mod perm;
pub mod tridiag;
pub mod view;

pub use flops::{FlopCounter, Kernel, KernelCall, Scope};
pub use lower::{pack_in_place, reconstruct, relative_residual, unpack, StorageMode, UnitLowerFactor};
pub use matrix::SkewMatrix;
pub use mm::{mm_read, mm_write, mm_write_general, parse_mm, format_mm};
pub use perm::{apply_symmetric_pivot, compose_permutation, PermutationVector};
pub use tridiag::{form_s_splitting, SSplitting, SkewTridiagonal};
pub use view::{Mat, MatMut, MatRef};
