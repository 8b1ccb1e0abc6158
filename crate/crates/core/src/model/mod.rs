pub mod constants;
pub mod gauss;
pub mod groups;
pub mod variance;
pub mod walk;

pub use groups::{GroupDescriptor, GroupKind, GroupSpec, Matrix};
