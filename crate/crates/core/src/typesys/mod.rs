//! Types, successor slots, local constraint systems and augmented types.
//!
//! A local system ranges over variables `f^i`: feature `f` at position `i`,
//! where 0 is the root and `1..=nt` are successor slots. Features may be
//! undefined at a position; the variables of a local system are exactly the
//! defined ones.

mod augmented;
mod layout;
mod types;

pub use augmented::{AugmentedType, Profile, TypeSystem};
pub use layout::{canonical_successor_function, SlotKind, SlotLayout, SlotUse, SuccessorFunction};
pub use types::{enumerate_types, TypeKind, TypeSpace, TypeT};
