//! Finite-dimensional realization toolkit for operator-valued function
//! classes on the unit polydisk and the right polyhalfplane.
//!
//! The library constructs, converts, evaluates and numerically certifies
//! transfer-function realizations for four classes: Schur-Agler and
//! Herglotz-Agler functions over the polydisk `D^d`, and their counterparts
//! over the right polyhalfplane `Pi^d`. The pieces:
//!
//! * [`matrix`] / [`linalg`] - dense complex matrices and the numerical
//!   kernels (solve, Hermitian eigen, SVD) everything else is built on;
//! * [`decomp`] - positive and spectral decompositions of the identity,
//!   their pencils `Y(w) = sum_k w_k Y_k`, and Naimark dilation;
//! * [`classes`] - colligations and system nodes with pointwise evaluators:
//!   Givone-Roesser colligations, Herglotz colligations and representations,
//!   impedance/scattering nodes on the halfplane;
//! * [`cayley`] - the Cayley-transform lattice between those pictures:
//!   point maps, value maps, unitary <-> skew-adjoint matrix transforms and
//!   realization-level conversions;
//! * [`pencil`] - Bessmertnyi linear pencils, Schur-complement transfer
//!   functions, pencil construction from a Herglotz representation and
//!   single-variable Nevanlinna atom extraction;
//! * [`realize`] - the lurking-isometry algorithm reconstructing a
//!   colligation from finitely many function samples with Agler-kernel
//!   factors;
//! * [`verify`] - kernels from realizations, decomposition residuals, Gram
//!   positivity, evaluation on commuting operator tuples and seeded random
//!   generators for every type.
//!
//! # Example
//!
//! The canonical shift colligation realizes `S(z) = z`; its double Cayley
//! transform is the identity function on the halfplane:
//!
//! ```
//! use polyreal::{Complex64, SchurGRColligation, Tolerances};
//! use polyreal::cayley::{schur_gr_to_herglotz_rep, VNormalization};
//! use polyreal::pencil::build_pencil_from_herglotz_rep;
//!
//! let tol = Tolerances::default();
//! let col = SchurGRColligation::shift(&tol);
//! let s = col.eval(&[Complex64::new(0.25, 0.0)], &tol)?;
//! assert!((s.get(0, 0) - Complex64::new(0.25, 0.0)).norm() < 1e-14);
//!
//! let rep = schur_gr_to_herglotz_rep(&col, VNormalization::Derived, &tol)?;
//! let pen = build_pencil_from_herglotz_rep(&rep, &tol)?;
//! let f = pen.transfer(&[Complex64::new(3.0, 0.0)], &tol)?;
//! assert!((f.get(0, 0) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
//! # Ok::<(), polyreal::Error>(())
//! ```

pub mod cayley;
pub mod classes;
pub mod decomp;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod pencil;
pub mod realize;
pub mod report;
pub mod tol;
pub mod verify;

pub use cayley::EigenSplit;
pub use classes::{
    HerglotzDiskColligation, HerglotzRepresentation, Metric, NodeFlavor, PiNode,
    SchurGRColligation,
};
pub use decomp::{DecompositionKind, DecompositionOfIdentity};
pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use pencil::{BessmertnyiPencil, NevanlinnaAtom, NevanlinnaData};
pub use realize::DecompositionSample;
pub use report::{CheckResult, VerificationReport};
pub use tol::{Tolerances, Validation};
pub use verify::{CommutingTuple, TupleKind};

pub use num_complex::Complex64;
