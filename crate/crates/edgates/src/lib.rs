// SPDX-License-Identifier: Apache-2.0
//! Error-detectable bosonic two-qubit gates built from dispersive beamsplitters.
//!
//! Rates are angular frequencies in rad/s and times are seconds throughout; see
//! [`units`] for conversions from lab units.

pub mod bloch;
pub mod circuits;
pub mod closure;
pub mod codes;
pub mod dynamics;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod units;
