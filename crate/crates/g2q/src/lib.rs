//! Exact computer algebra for the quantum group U_q(G_2) acting on its
//! 7-dimensional module V, together with a verification harness for the
//! associated diagram category, braided symmetric algebras and invariant
//! theory.
//!
//! Module layout:
//!
//! - [`exactq`]: exact arithmetic in Z[q, q^-1] and its fraction field Q(q)
//! - [`tensorla`]: sparse exact linear algebra on tensor powers of V
//! - [`rep`]: the 7-dimensional standard module, structure maps, R-matrix
//! - [`diagrams`]: the tangle-with-coupon category, DSL, evaluation functor,
//!   cycle reduction
//! - [`algebra`]: the braided symmetric algebras S_q(V) and A_m(V)
//! - [`invariants`]: the invariants Phi, Psi, Upsilon, Theta and the
//!   first-fundamental-theorem spanning checks

pub mod algebra;
pub mod diagrams;
pub mod exactq;
pub mod invariants;
pub mod rep;
pub mod tensorla;

pub use exactq::{qint, LaurentPoly, RatFunc};
pub use tensorla::{EchelonBasis, LegIndex, LinMap, SparseTensor};

/// Outcome of a single verification check inside a suite.
#[derive(Clone, Debug)]
pub struct Check {
    /// Stable identifier, unique within its suite.
    pub id: String,
    pub pass: bool,
    /// Human-readable failure witness (empty on success).
    pub witness: Option<String>,
}

impl Check {
    pub fn passed(id: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            pass: true,
            witness: None,
        }
    }

    pub fn failed(id: impl Into<String>, witness: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            pass: false,
            witness: Some(witness.into()),
        }
    }

    /// Pass/fail from a boolean, attaching the witness only on failure.
    pub fn expect(id: impl Into<String>, ok: bool, witness: impl Into<String>) -> Check {
        if ok {
            Check::passed(id)
        } else {
            Check::failed(id, witness)
        }
    }
}

/// True iff every check in the slice passed.
pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
