//! Double categories of relations over stable orthogonal factorisation
//! systems, built as explicit finite data and mechanically checked.
//!
//! Given a finitely complete base category (an explicit composition table, or
//! the structural FinSet/FinPreord backends) and a verified stable
//! factorisation system `(E, M)`, the crate constructs the double category
//! whose vertical arrows are the base arrows and whose horizontal arrows are
//! canonical M-relations, then verifies its structure: equipment data,
//! tabulators, Beck-Chevalley pullbacks, local shape, comprehension schemes,
//! the comprehensive factorisation carried by covers and fibrations, the
//! Cauchy condition, and Cauchisation.

pub mod basecat;
pub mod budget;
pub mod concrete;
pub mod equip;
pub mod construct;
pub mod error;
pub mod factsys;
pub mod limits;
pub mod preset;
pub mod props;
pub mod reldbl;
pub mod report;

pub use basecat::{BackendKind, Category, MorPredicate, MorRef, ObjRef};
pub use budget::Budget;
pub use error::{Error, Result};
