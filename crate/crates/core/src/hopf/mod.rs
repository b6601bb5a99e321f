//! Hopf structure maps, tensor elements, Sweedler expansions and the
//! convolution algebra of linear maps.

mod algebra;
mod linmap;
mod tensor;

pub use algebra::{check_hopf_axioms, HopfAlgebra};
pub use linmap::{check_conv_inverse, conv_inverse_witness, Antipode, InverseSide, LinMap, LinMapKind};
pub use tensor::TensorElement;

#[cfg(test)]
mod tests;
