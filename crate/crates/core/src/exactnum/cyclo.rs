use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// Reduction data for Q(zeta_N): the cyclotomic polynomial and the images of
/// x^j modulo it for every j below 2*phi(N).
#[derive(Debug)]
pub(crate) struct Field {
    pub order: u32,
    pub phi: usize,
    /// x^j mod Phi_N for j in 0..2*phi-1 (and j < N).
    reduce: Vec<Vec<BigRational>>,
}

fn poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // both monic, coefficients low-to-high
    let mut rem = num.to_vec();
    let dl = den.len();
    let ql = num.len() + 1 - dl;
    let mut q = vec![BigInt::zero(); ql];
    for i in (0..ql).rev() {
        let c = rem[i + dl - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

fn cyclotomic_poly(n: u32, memo: &mut HashMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let f = cyclotomic_poly(d, memo);
            p = poly_divexact(&p, &f);
        }
    }
    memo.insert(n, p.clone());
    p
}

impl Field {
    fn build(order: u32) -> Field {
        let mut memo = HashMap::new();
        let phi_poly = cyclotomic_poly(order, &mut memo);
        let phi = phi_poly.len() - 1;
        let count = (2 * phi).max(order as usize).max(1);
        let mut reduce = Vec::with_capacity(count);
        let mut cur = vec![BigRational::zero(); phi];
        cur[0] = BigRational::one();
        for _ in 0..count {
            reduce.push(cur.clone());
            // multiply by x
            let top = cur[phi - 1].clone();
            let mut next = vec![BigRational::zero(); phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..phi {
                    next[i] -= &top * BigRational::from_integer(phi_poly[i].clone());
                }
            }
            cur = next;
        }
        Field { order, phi, reduce }
    }

    pub fn get(order: u32) -> Arc<Field> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Field>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("field cache poisoned");
        guard
            .entry(order)
            .or_insert_with(|| Arc::new(Field::build(order)))
            .clone()
    }

    fn power(&self, j: usize) -> &[BigRational] {
        &self.reduce[j % self.order as usize]
    }
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    Field::get(n).phi
}

/// An element of Q(zeta_N) in the power basis modulo Phi_N.
///
/// Purely rational values are normalized to order 1 so that equality and
/// hashing do not depend on which field an element was computed in.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Cyclo {
        Cyclo { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Cyclo {
        Cyclo::from_int(1)
    }

    pub fn from_int(v: i64) -> Cyclo {
        Cyclo { order: 1, coeffs: vec![BigRational::from_integer(BigInt::from(v))] }
    }

    pub fn from_rational(v: BigRational) -> Cyclo {
        Cyclo { order: 1, coeffs: vec![v] }
    }

    pub fn frac(num: i64, den: i64) -> Cyclo {
        Cyclo::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// zeta_N^j.
    pub fn zeta_pow(order: u32, j: i64) -> Cyclo {
        assert!(order >= 1, "cyclotomic order must be positive");
        let f = Field::get(order);
        let jj = j.rem_euclid(order as i64) as usize;
        Cyclo::from_parts(order, f.power(jj).to_vec())
    }

    /// Builds an element from power-basis coefficients, reducing if the vector
    /// is longer than phi(N).
    pub fn from_coeffs(order: u32, coeffs: &[BigRational]) -> Cyclo {
        let f = Field::get(order);
        let mut out = vec![BigRational::zero(); f.phi];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(f.power(j)) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        Cyclo::from_parts(order, out)
    }

    fn from_parts(order: u32, coeffs: Vec<BigRational>) -> Cyclo {
        if coeffs.iter().skip(1).all(|c| c.is_zero()) {
            let c0 = coeffs.into_iter().next().unwrap_or_else(BigRational::zero);
            return Cyclo { order: 1, coeffs: vec![c0] };
        }
        Cyclo { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.order == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn common_order(&self, other: &Cyclo) -> Result<u32, ExactError> {
        match (self.order, other.order) {
            (1, b) => Ok(b),
            (a, 1) => Ok(a),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(ExactError::OrderMismatch(a, b)),
        }
    }

    fn padded(&self, order: u32) -> Vec<BigRational> {
        let phi = Field::get(order).phi;
        let mut v = self.coeffs.clone();
        v.resize(phi, BigRational::zero());
        v
    }

    pub fn try_add(&self, other: &Cyclo) -> Result<Cyclo, ExactError> {
        let n = self.common_order(other)?;
        if self.order == 1 && other.order == 1 {
            return Ok(Cyclo::from_parts(1, vec![&self.coeffs[0] + &other.coeffs[0]]));
        }
        let mut a = self.padded(n);
        for (x, y) in a.iter_mut().zip(other.padded(n)) {
            *x += y;
        }
        Ok(Cyclo::from_parts(n, a))
    }

    pub fn try_mul(&self, other: &Cyclo) -> Result<Cyclo, ExactError> {
        let n = self.common_order(other)?;
        if self.order == 1 {
            return Ok(other.scale(&self.coeffs[0]));
        }
        if other.order == 1 {
            return Ok(self.scale(&other.coeffs[0]));
        }
        let f = Field::get(n);
        let mut conv = vec![BigRational::zero(); 2 * f.phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        Ok(Cyclo::from_coeffs(n, &conv))
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        if r.is_zero() {
            return Cyclo::zero();
        }
        Cyclo::from_parts(self.order, self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn scale_int(&self, r: i64) -> Cyclo {
        self.scale(&BigRational::from_integer(r.into()))
    }

    /// Multiplicative inverse, via a linear solve against the
    /// multiplication-by-self matrix.
    pub fn inv(&self) -> Result<Cyclo, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Cyclo::from_rational(self.coeffs[0].recip()));
        }
        let n = self.order;
        let phi = Field::get(n).phi;
        // column j = self * x^j
        let mut mat = vec![vec![BigRational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self.try_mul(&Cyclo::zeta_pow(n, j as i64))?.padded(n);
            for i in 0..phi {
                mat[i][j] = col[i].clone();
            }
        }
        mat[0][phi] = BigRational::one();
        let sol = solve(mat).ok_or(ExactError::DivisionByZero)?;
        Ok(Cyclo::from_parts(n, sol))
    }

    pub fn try_div(&self, other: &Cyclo) -> Result<Cyclo, ExactError> {
        self.try_mul(&other.inv()?)
    }

    /// Galois conjugation zeta -> zeta^-1.
    pub fn conj(&self) -> Cyclo {
        if self.order == 1 {
            return self.clone();
        }
        let mut acc = Cyclo::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc + Cyclo::zeta_pow(self.order, -(j as i64)).scale(c);
            }
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Cyclo {
        let mut acc = Cyclo::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// (rational coefficient, zeta exponent) pairs of the nonzero basis terms.
    pub fn basis_terms(&self) -> Vec<(BigRational, usize)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (c.clone(), j))
            .collect()
    }
}

fn solve(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &f * &m[col][c];
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl Default for Cyclo {
    fn default() -> Self {
        Cyclo::zero()
    }
}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        &self + &rhs
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, rhs: &Cyclo) {
        *self = &*self + rhs;
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        self + &(-rhs)
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        &self * &rhs
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-({}/{})", -r.numer(), r.denom())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyclo {
    /// Sum of `c*zN^j` terms, e.g. `(1/2) + z3^1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(BigRational, Vec<String>)> = self
            .basis_terms()
            .into_iter()
            .map(|(c, j)| {
                let fac = if j == 0 { vec![] } else { vec![format!("z{}^{}", self.order, j)] };
                (c, fac)
            })
            .collect();
        f.write_str(&super::render_terms(&terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_orders_need_a_rational_operand() {
        let a = Cyclo::zeta_pow(4, 1);
        assert!(a.try_mul(&Cyclo::zeta_pow(6, 1)).is_err());
        assert_eq!(a.try_mul(&Cyclo::frac(1, 2)).unwrap().order(), 4);
    }

    #[test]
    fn rationals_normalize_to_order_one() {
        let z = Cyclo::zeta_pow(3, 1);
        let s = &(&z + &z.pow(2)) + &Cyclo::one();
        assert!(s.is_zero());
        assert_eq!((&z * &z.conj()).order(), 1);
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(Cyclo::zero().inv().is_err());
    }
}
