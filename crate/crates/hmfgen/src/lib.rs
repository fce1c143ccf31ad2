//! Generator for Hilbert modular form eigenvalue fixtures.
//!
//! Hecke eigensystems on spaces of quaternionic modular forms are computed
//! from scratch: class sets of Eichler orders in the totally definite
//! quaternion algebra `(-1, -1)` over a real quadratic base field, theta
//! series of the connecting ideals, Brandt matrices, and exact eigenvector
//! extraction over the Hecke field.  The output is the newform fixture
//! format consumed by the rest of the workspace.
//!
//! Every stage carries an exactness certificate: lattice discriminants pin
//! the orders, the Eichler mass formula pins the class set, two independent
//! Hecke operator constructions are compared entry by entry, and the final
//! eigenvalue rows are verified against exact matrix identities before they
//! are written out.

pub mod brandt;
pub mod classset;
pub mod eigen;
pub mod field;
pub mod fpenum;
pub mod genfix;
pub mod lattice;
pub mod order;
pub mod quat;
pub mod residue;
pub mod theta;
