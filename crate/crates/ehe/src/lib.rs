//! Exact homomorphic encryption over GF(2) polynomial sets.
//!
//! Messages are encrypted by evaluating a public set of multivariate GF(2)
//! polynomials generated from a random reversible-gate circuit; the circuit
//! itself is the private key and decryption runs it backwards, so decryption
//! is exact. Computations are encrypted the same way: a reversible arithmetic
//! circuit is conjugated by encryption circuits, split into sections, and each
//! section is published as a polynomial set. Evaluating the sections on a
//! ciphertext performs the computation on encrypted data with no noise and no
//! failure probability.
//!
//! Modules:
//! - [`anf`]: multilinear GF(2) polynomials in algebraic normal form.
//! - [`gates`]: multi-controlled NOT gates and circuits, their action on
//!   states and on polynomials, and the evaluation duality linking the two.
//! - [`keygen`] / [`ime`]: message key generation, encryption, decryption.
//! - [`circuits`]: reversible adders, multipliers, dividers, comparators and
//!   friends, plus exhaustive verification against integer oracles.
//! - [`cryptoval`]: encrypted actions, sectional polynomial-set generation and
//!   evaluation, result decryption.
//! - [`security`]: attack-cost estimators and the parameter criterion check.
//! - [`format`]: versioned little-endian binary file formats.
//! - [`cli`]: the `ehe` command-line interface and benchmark harness.
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability; `ehe --help` covers the command-line surface.

pub mod anf;
pub mod bits;
pub mod circuits;
pub mod cli;
pub mod cryptoval;
mod error;
pub mod format;
pub mod gates;
pub mod ime;
pub mod keygen;
pub mod rng;
pub mod security;

pub use anf::{Anf, Monomial};
pub use bits::BitVec;
pub use circuits::{FunctionKind, FunctionSpec};
pub use cryptoval::{CryptovalPrivateKey, EncryptedProgram};
pub use error::{Error, Result};
pub use gates::{Circuit, Gate};
pub use ime::{Ciphertext, PaddingMode, Plaintext};
pub use keygen::{ImePrivateKey, ImePublicKey, KeyParams};
pub use rng::StreamFactory;
pub use security::SecurityReport;
