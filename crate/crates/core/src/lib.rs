//! Fixed-precision p-adic integers, van der Put expansions of continuous
//! functions on `Z_p^n`, Lipschitz criteria and derivative-free root lifting.

pub mod dsl;
pub mod error;
pub mod evaluator;
pub mod hensel;
pub mod padic;
pub mod sampling;
pub mod vdp_multi;
pub mod vdp_uni;

pub use error::{Error, Result};
pub use evaluator::{Evaluator, FnEvaluator, Projection};
pub use padic::{initial_part, NaturalIndex, Norm, PadicInt, PadicPoint, Prime, Valuation};
pub use dsl::{DslFunction, FuncDef};
pub use hensel::{CoordinatePolicy, LiftStatus, LiftTrace};
pub use vdp_multi::{MultiIndex, VdpTableN};
pub use vdp_uni::VdpTable1;
