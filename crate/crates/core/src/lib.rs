//! Truth-value semantics for classical first-order logic of partial terms.
//!
//! The crate is organised bottom-up:
//!
//! * [`syntax`]: two-sorted terms and formulae (variables vs. parameters),
//!   parsing, printing, substitution and enumeration of pure terms.
//! * [`valuation`]: finitely represented tv-valuations and their evaluation,
//!   plus bounded checks for equality, total denotation and strictness.
//! * [`deduction`]: natural deduction trees and a checker for the four
//!   supported systems.
//! * [`tableaux`]: a signed tableaux procedure returning closure
//!   certificates or finite countermodels.
//! * [`extension`]: the projection onto a smaller language, extended
//!   valuations and the lift with an undefined constant.
//! * [`conservativity`]: selection and description function constructions
//!   and their bounded verification.
//! * [`cli`]: the `plt` command line front end.

pub mod cli;
pub mod conservativity;
pub mod deduction;
pub mod extension;
pub mod syntax;
pub mod tableaux;
pub mod valuation;
