//! Higher-order derivative tensors of positively homogeneous functions and a
//! numerical check of the collapsed Taylor identity
//! T⁽ᵐ⁾f(a; b−a) = dᵐf(a; b)/m! for f of degree m.
//!
//! Derivatives come from truncated multivariate power series ([`jet`]), are
//! stored as compact symmetric tensors ([`symtensor`]), and are cross-checked
//! against central finite differences ([`fd`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod cli;
pub mod combinat;
pub mod error;
pub mod fd;
pub mod homfun;
pub mod jet;
pub mod riskagg;
pub mod sampling;
pub mod scalar;
pub mod symtensor;
pub mod taylor;
pub mod verify;

pub use error::{Error, Result};
pub use homfun::{make_function, FunctionSpec, HomogeneousFunction};
pub use jet::{jet_variable, Jet};
pub use symtensor::{tensor_close, SymmetricTensor};
pub use taylor::{build_report, Mode, TaylorReport};
