use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::{product_trunc, render_terms, Cyclo, EXACT};

/// Truncated Laurent series in ħ with cyclotomic coefficients.
///
/// `trunc` is the highest ħ-order that is known; terms above it are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HbarSeries {
    trunc: i64,
    coeffs: BTreeMap<i32, Cyclo>,
}

impl HbarSeries {
    pub fn zero(trunc: i64) -> HbarSeries {
        HbarSeries { trunc: trunc.min(EXACT), coeffs: BTreeMap::new() }
    }

    pub fn exact_zero() -> HbarSeries {
        HbarSeries::zero(EXACT)
    }

    pub fn constant(c: Cyclo) -> HbarSeries {
        HbarSeries::monomial(c, 0)
    }

    /// c·ħ^e, known exactly.
    pub fn monomial(c: Cyclo, e: i32) -> HbarSeries {
        let mut s = HbarSeries::exact_zero();
        s.add_term(e, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, Cyclo)>>(terms: I, trunc: i64) -> HbarSeries {
        let mut s = HbarSeries::zero(trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }

    /// Lowest exponent with a nonzero coefficient, or None for zero.
    pub fn lowest(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    fn lowest_or_exact(&self) -> i64 {
        self.lowest().map(|v| v as i64).unwrap_or(EXACT)
    }

    pub fn coeff(&self, e: i32) -> Cyclo {
        self.coeffs.get(&e).cloned().unwrap_or_else(Cyclo::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Cyclo)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, e: i32, c: Cyclo) {
        if c.is_zero() || e as i64 > self.trunc {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.coeffs.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    /// Lowers the truncation order, dropping terms above it.
    pub fn truncated(&self, t: i64) -> HbarSeries {
        let t = t.min(self.trunc);
        HbarSeries {
            trunc: t,
            coeffs: self.coeffs.iter().filter(|(e, _)| **e as i64 <= t).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Cyclo) -> HbarSeries {
        let mut s = HbarSeries::zero(self.trunc);
        for (e, v) in &self.coeffs {
            s.add_term(*e, v * c);
        }
        s
    }

    /// Multiplication by ħ^k.
    pub fn shift(&self, k: i32) -> HbarSeries {
        let trunc = if self.is_exact() { EXACT } else { self.trunc + k as i64 };
        HbarSeries { trunc, coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Equality of all coefficients up to the smaller truncation order.
    pub fn eq_upto(&self, other: &HbarSeries) -> bool {
        let t = self.trunc.min(other.trunc);
        (self - other).coeffs.keys().all(|e| *e as i64 > t)
    }

    /// ħ∂_ħ.
    pub fn hbar_euler(&self) -> HbarSeries {
        let mut s = HbarSeries::zero(self.trunc);
        for (e, c) in &self.coeffs {
            s.add_term(*e, c.scale_int(*e as i64));
        }
        s
    }

    fn render_parts(&self, upow: Option<i32>) -> Vec<(BigRational, Vec<String>)> {
        let mut out = Vec::new();
        for (e, c) in &self.coeffs {
            for (r, j) in c.basis_terms() {
                let mut f = Vec::new();
                if j != 0 {
                    f.push(format!("z{}^{}", c.order(), j));
                }
                if *e != 0 {
                    f.push(format!("h^{}", e));
                }
                if let Some(u) = upow {
                    if u != 0 {
                        f.push(format!("u^{}", u));
                    }
                }
                out.push((r, f));
            }
        }
        out
    }
}

impl<'a> Add<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn add(self, rhs: &HbarSeries) -> HbarSeries {
        let mut s = HbarSeries::zero(self.trunc.min(rhs.trunc));
        for (e, c) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            s.add_term(*e, c.clone());
        }
        s
    }
}

impl<'a> Sub<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn sub(self, rhs: &HbarSeries) -> HbarSeries {
        self + &(-rhs)
    }
}

impl Neg for &HbarSeries {
    type Output = HbarSeries;
    fn neg(self) -> HbarSeries {
        HbarSeries { trunc: self.trunc, coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl<'a> Mul<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn mul(self, rhs: &HbarSeries) -> HbarSeries {
        let t = product_trunc(self.trunc, self.lowest_or_exact(), rhs.trunc, rhs.lowest_or_exact());
        let mut s = HbarSeries::zero(t);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                s.add_term(ea + eb, ca * cb);
            }
        }
        s
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(HbarSeries);
owned_ops!(ScalarK);

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_terms(&self.render_parts(None)))
    }
}

/// Laurent polynomial in u with truncated ħ-series coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarK {
    trunc: i64,
    terms: BTreeMap<i32, HbarSeries>,
}

impl ScalarK {
    pub fn zero(trunc: i64) -> ScalarK {
        ScalarK { trunc: trunc.min(EXACT), terms: BTreeMap::new() }
    }

    pub fn exact_zero() -> ScalarK {
        ScalarK::zero(EXACT)
    }

    pub fn constant(c: Cyclo) -> ScalarK {
        ScalarK::monomial(c, 0, 0)
    }

    /// c·ħ^h·u^u, known exactly.
    pub fn monomial(c: Cyclo, h: i32, u: i32) -> ScalarK {
        let mut s = ScalarK::exact_zero();
        s.add_term(u, h, c);
        s
    }

    pub fn from_series(s: HbarSeries, u: i32) -> ScalarK {
        let mut out = ScalarK::zero(s.trunc());
        for (e, c) in s.terms() {
            out.add_term(u, e, c.clone());
        }
        out
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn with_trunc(mut self, t: i64) -> ScalarK {
        let t = t.min(self.trunc);
        self.trunc = t;
        let terms = std::mem::take(&mut self.terms);
        for (u, s) in terms {
            let s = s.truncated(t);
            if !s.is_zero() {
                self.terms.insert(u, s);
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The ħ-series multiplying u^u.
    pub fn series(&self, u: i32) -> HbarSeries {
        self.terms.get(&u).cloned().unwrap_or_else(|| HbarSeries::zero(self.trunc))
    }

    pub fn u_powers(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().copied()
    }

    /// (u, ħ, coefficient) triples in canonical order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (i32, i32, &Cyclo)> {
        self.terms.iter().flat_map(|(u, s)| s.terms().map(move |(h, c)| (*u, h, c)))
    }

    pub fn coeff(&self, u: i32, h: i32) -> Cyclo {
        self.terms.get(&u).map(|s| s.coeff(h)).unwrap_or_else(Cyclo::zero)
    }

    pub fn hbar_lowest(&self) -> Option<i32> {
        self.terms.values().filter_map(|s| s.lowest()).min()
    }

    fn lowest_or_exact(&self) -> i64 {
        self.hbar_lowest().map(|v| v as i64).unwrap_or(EXACT)
    }

    pub fn add_term(&mut self, u: i32, h: i32, c: Cyclo) {
        if c.is_zero() || h as i64 > self.trunc {
            return;
        }
        let trunc = self.trunc;
        let s = self.terms.entry(u).or_insert_with(|| HbarSeries::zero(trunc));
        s.add_term(h, c);
        if s.is_zero() {
            self.terms.remove(&u);
        }
    }

    pub fn scale(&self, c: &Cyclo) -> ScalarK {
        let mut out = ScalarK::zero(self.trunc);
        for (u, h, v) in self.iter_terms() {
            out.add_term(u, h, v * c);
        }
        out
    }

    /// Multiplication by ħ^dh u^du.
    pub fn shift(&self, dh: i32, du: i32) -> ScalarK {
        let trunc = if self.trunc >= EXACT { EXACT } else { self.trunc + dh as i64 };
        let mut out = ScalarK::zero(trunc);
        for (u, h, v) in self.iter_terms() {
            out.add_term(u + du, h + dh, v.clone());
        }
        out
    }

    pub fn eq_upto(&self, other: &ScalarK) -> bool {
        let t = self.trunc.min(other.trunc);
        (self - other).iter_terms().all(|(_, h, _)| h as i64 > t)
    }

    /// True if every retained term up to the truncation order vanishes.
    pub fn is_zero_upto(&self, t: i64) -> bool {
        self.iter_terms().all(|(_, h, _)| h as i64 > t)
    }

    pub fn hbar_euler(&self) -> ScalarK {
        let mut out = ScalarK::zero(self.trunc);
        for (u, h, v) in self.iter_terms() {
            out.add_term(u, h, v.scale_int(h as i64));
        }
        out
    }
}

impl<'a> Add<&'a ScalarK> for &'a ScalarK {
    type Output = ScalarK;
    fn add(self, rhs: &ScalarK) -> ScalarK {
        let mut out = ScalarK::zero(self.trunc.min(rhs.trunc));
        for (u, h, c) in self.iter_terms().chain(rhs.iter_terms()) {
            out.add_term(u, h, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ScalarK> for &'a ScalarK {
    type Output = ScalarK;
    fn sub(self, rhs: &ScalarK) -> ScalarK {
        self + &(-rhs)
    }
}

impl Neg for &ScalarK {
    type Output = ScalarK;
    fn neg(self) -> ScalarK {
        ScalarK { trunc: self.trunc, terms: self.terms.iter().map(|(u, s)| (*u, -s)).collect() }
    }
}

impl<'a> Mul<&'a ScalarK> for &'a ScalarK {
    type Output = ScalarK;
    fn mul(self, rhs: &ScalarK) -> ScalarK {
        let t = product_trunc(self.trunc, self.lowest_or_exact(), rhs.trunc, rhs.lowest_or_exact());
        let mut out = ScalarK::zero(t);
        for (ua, ha, ca) in self.iter_terms() {
            for (ub, hb, cb) in rhs.iter_terms() {
                out.add_term(ua + ub, ha + hb, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for ScalarK {
    /// Canonical text, e.g. `(3/2)*z3^1*h^-1*u^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (u, s) in &self.terms {
            parts.extend(s.render_parts(Some(*u)));
        }
        f.write_str(&render_terms(&parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_truncation_uses_valuations() {
        let a = HbarSeries::from_terms([(1, Cyclo::one())], 4);
        let b = HbarSeries::from_terms([(0, Cyclo::one()), (2, Cyclo::one())], 3);
        // min(4, 3, 4 + 0, 3 + 1)
        assert_eq!((&a * &b).trunc(), 3);
        let c = &HbarSeries::monomial(Cyclo::one(), -1) * &a;
        assert_eq!(c.trunc(), 3);
    }

    #[test]
    fn euler_operator_scales_by_degree() {
        let s = ScalarK::monomial(Cyclo::from_int(2), 3, 1);
        assert_eq!(s.hbar_euler(), ScalarK::monomial(Cyclo::from_int(6), 3, 1));
    }
}
