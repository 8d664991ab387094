//! Exact-arithmetic kernel for Weyl-invariant weak Jacobi forms on even
//! positive definite root lattices.
//!
//! The crate provides, over exact rational coefficients:
//!
//! - a catalog of irreducible root systems (`A`..`G`) realized in fixed
//!   rational coordinates, together with the even lattice spanned by their
//!   roots, dual coroot data, and the acting orthogonal group ([`rootsys`]);
//! - truncated Fourier expansions in `q = e^{2 pi i tau}` and lattice
//!   elliptic variables, with ring operations, normalized derivatives and
//!   exact order-by-order division ([`series`], [`qseries`]);
//! - eta, theta and Eisenstein building blocks, theta blocks `Phi_R`, and
//!   the classical rank-one generators with their `B_l` symmetrizations
//!   ([`blocks`]);
//! - the Jacobian determinant of a tuple of Jacobi forms and its cofactor
//!   family ([`jacobian`]);
//! - the free-generation certificate for generator towers and the
//!   constructive decomposition of an invariant form into a polynomial in
//!   the generators with coefficients in `Q[E4, E6]` ([`structure`]).
//!
//! Everything is deterministic: all containers are ordered and no floating
//! point is used anywhere.

pub mod blocks;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod jacobian;
pub mod lattice;
pub mod matrix;
pub mod qseries;
pub mod rat;
pub mod rootsys;
pub mod series;
pub mod structure;

pub use error::KernelError;
pub use jacobi::{Character, GroupGenerators, JacobiForm};
pub use lattice::{Lattice, LatticeVector};
pub use qseries::{ModularForm, QSeries};
pub use rat::Rat;
pub use rootsys::{catalog, RootSystemData, RootSystemTag};
pub use series::QZSeries;
pub use structure::{DecompResult, GeneratorSystem, ModPoly};
