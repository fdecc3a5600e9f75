//! Exact theta-ring calculus.
//!
//! A theta-ring (also called a delta-ring or a ring with a p-derivation) is a
//! commutative ring with an operation `theta` such that
//! `psi(a) = a^p + p * theta(a)` is a ring endomorphism lifting Frobenius.
//! This crate provides exact arithmetic to compute with such structures and
//! to check, as finite computations, that cyclotomic rings `Z_p[zeta_{p^k}]`
//! admit none, together with the height-one Lubin-Tate tower presentation of
//! those same rings.
//!
//! Module map:
//!
//! * [`exact`]: integers, rationals, dense univariate polynomials, truncated
//!   p-adic residues and binomial utilities.
//! * [`cyclotomic`]: arithmetic in `Z[x]/Phi_{p^k}(x)` on the power basis.
//! * [`theta`]: the free theta-ring on leveled generators, with `psi`, `theta`
//!   and verifiers for the standard identities.
//! * [`obstruction`]: the finite computations that rule out a theta-structure
//!   on rings containing a primitive `p^k`-th root of unity.
//! * [`lubin_tate`]: the tower `A_k` for the multiplicative formal group and
//!   its identification with `Z[zeta_{p^k}]`.

pub mod cyclotomic;
pub mod error;
pub mod exact;
pub mod lubin_tate;
pub mod obstruction;
pub mod theta;

pub use error::{AlgebraError, Result};
