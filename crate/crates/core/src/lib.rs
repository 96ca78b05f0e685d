//! Exact computation of minimal log discrepancies, thresholds and weighted
//! blow-up data for monomial R-ideals on smooth and cyclic quotient germs.

pub mod blowup;
pub mod compose;
pub mod error;
pub mod germ;
pub mod golden;
pub mod ideal;
pub mod lp;
pub mod mld;
pub mod newton;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod rational;
pub mod scan;
pub mod slopes;
pub mod truncation;
pub mod valuation;

pub use error::{Error, Result};
pub use germ::CyclicQuotientGerm;
pub use poly::{dot, ExponentVector, Polynomial};
pub use rational::Rational;
