//! Exact coefficient arithmetic: cyclotomic rationals, truncated
//! ħ-Laurent series and u-Laurent polynomials over them.

mod cyclo;
mod series;

pub use cyclo::{totient, Cyclo};
pub use series::{HbarSeries, ScalarK};

pub(crate) use cyclo::fmt_rational;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("cyclotomic orders {0} and {1} do not match")]
    OrderMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
}

/// Truncation order of a value that is known exactly.
pub const EXACT: i64 = 1 << 40;

/// min(Ta, Tb, Ta + vb, Tb + va): the order up to which a product of two
/// truncated quantities is known, where v is the lowest order present
/// (EXACT for a zero operand).
pub fn product_trunc(ta: i64, va: i64, tb: i64, vb: i64) -> i64 {
    let s1 = (ta + vb).min(EXACT);
    let s2 = (tb + va).min(EXACT);
    ta.min(tb).min(s1).min(s2)
}

/// Renders a signed sum of `coef*f1*f2*...` terms. A unit coefficient is
/// dropped when factors are present.
pub(crate) fn render_terms(terms: &[(BigRational, Vec<String>)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, facs)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        if !(a.is_one() && !facs.is_empty()) {
            parts.push(fmt_rational(&a));
        }
        parts.extend(facs.iter().cloned());
        out.push_str(&parts.join("*"));
    }
    out
}
