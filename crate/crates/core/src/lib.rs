//! Fast recursive radix-2 discrete sine transforms (types I-IV).
//!
//! The transforms are computed as products of sparse butterfly, rotation and
//! permutation factors. Every execution reports the exact number of additions
//! and multiplications it performed; [`opcount`] holds the closed forms those
//! counts must equal, [`oracle`] the dense definitions the outputs must equal,
//! and [`flowgraph`] the same algorithms as explicit dataflow graphs.
//!
//! ```
//! use rdst::{DstPlan, TransformKind};
//!
//! let mut plan = DstPlan::new(TransformKind::Dst2, 8).unwrap();
//! let x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
//! let mut y = [0.0; 8];
//! let ops = plan.scaled(&x, &mut y).unwrap();
//! assert_eq!((ops.adds, ops.mults), (26, 16));
//! ```

pub mod error;
pub mod flowgraph;
pub mod kernels;
mod kind;
pub mod opcount;
pub mod oracle;
pub mod transform;

pub use error::{DstError, Result};
pub use flowgraph::{build_flowgraph, evaluate_flowgraph, export_dot, FlowGraph};
pub use kernels::{OpCount, RotationConstants};
pub use kind::{ScaleMode, TransformKind};
pub use opcount::{count_table, formula_counts, recurrence_counts, CountFormulaResult, CountRow};
pub use transform::{
    dst1_scaled, dst2_scaled, dst3_scaled, dst4_scaled, dst_scaled, dst_unitary, idst_scaled,
    idst_unitary, DstPlan, ExecCounts,
};
