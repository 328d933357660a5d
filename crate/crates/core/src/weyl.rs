//! Truncated Weyl algebra with the Moyal product, its matrix version, the
//! z-only products ⋆ and ⋆̂, the group action and the σ maps.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{product_trunc, render_terms, Cyclo, HbarSeries, EXACT};
use crate::model::{Model, Pair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("operand contains fixed-direction (y) variables")]
    FixedVariables,
    #[error("operands belong to different models ({0} vs {1} variables or rank)")]
    ModelMismatch(usize, usize),
}

/// A monomial x^exps ħ^h.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub exps: Vec<u16>,
    pub h: i32,
}

impl Mono {
    pub fn degree(&self) -> i64 {
        self.exps.iter().map(|e| *e as i64).sum()
    }

    /// Polynomial degree plus twice the ħ-order.
    pub fn weight(&self) -> i64 {
        self.degree() + 2 * self.h as i64
    }
}

/// Falling factorial n(n-1)...(n-s+1).
pub fn falling(n: u16, s: u16) -> i64 {
    if s > n {
        return 0;
    }
    (0..s).map(|i| (n - i) as i64).product()
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

/// Expansion of the ordered bidifferential operator exp(c·ħ·Σ_p ω^{ab}∂_a⊗∂_b)
/// on x^xa ⊗ x^xb, restricted to the given pairs: (monomial of the product,
/// ħ-power, rational coefficient).
pub(crate) fn bidiff_expand(xa: &[u16], xb: &[u16], pairs: &[Pair], c: &BigRational) -> Vec<(Vec<u16>, i32, BigRational)> {
    let mut states: Vec<(Vec<u16>, Vec<u16>, i32, BigRational)> =
        vec![(xa.to_vec(), xb.to_vec(), 0, BigRational::one())];
    for p in pairs {
        let (a, b) = (p.a, p.b);
        let mut next = Vec::new();
        for (ea, eb, h, coef) in states {
            // c ∂_a ⊗ ∂_b (s times) and -c ∂_b ⊗ ∂_a (t times)
            let smax = ea[a].min(eb[b]);
            let tmax = ea[b].min(eb[a]);
            for s in 0..=smax {
                for t in 0..=tmax {
                    let num = falling(ea[a], s) * falling(eb[b], s) * falling(ea[b], t) * falling(eb[a], t);
                    let mut f = BigRational::from_integer(num.into())
                        / BigRational::from_integer(factorial(s as u32) * factorial(t as u32));
                    for _ in 0..s {
                        f *= c;
                    }
                    for _ in 0..t {
                        f *= -c;
                    }
                    let mut na = ea.clone();
                    let mut nb = eb.clone();
                    na[a] -= s;
                    nb[b] -= s;
                    na[b] -= t;
                    nb[a] -= t;
                    next.push((na, nb, h + (s + t) as i32, &coef * &f));
                }
            }
        }
        states = next;
    }
    states
        .into_iter()
        .map(|(ea, eb, h, c)| (ea.iter().zip(&eb).map(|(x, y)| x + y).collect(), h, c))
        .collect()
}

/// A weight-truncated series in the 2n variables with ħ-Laurent coefficients.
///
/// Stored flat, keyed by (exponents, ħ-power). Terms of weight above
/// `wtrunc` or ħ-order above `htrunc` are unknown and dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weyl {
    nvars: usize,
    terms: BTreeMap<Mono, Cyclo>,
    wtrunc: i64,
    htrunc: i64,
}

impl Weyl {
    pub fn zero(nvars: usize, wtrunc: i64, htrunc: i64) -> Weyl {
        Weyl { nvars, terms: BTreeMap::new(), wtrunc: wtrunc.min(EXACT), htrunc: htrunc.min(EXACT) }
    }

    pub fn zero_for(m: &Model) -> Weyl {
        Weyl::zero(m.nvars(), m.weight_trunc, m.hbar_trunc)
    }

    pub fn constant(m: &Model, c: Cyclo) -> Weyl {
        let mut w = Weyl::zero_for(m);
        w.add_term(vec![0; m.nvars()], 0, c);
        w
    }

    pub fn one(m: &Model) -> Weyl {
        Weyl::constant(m, Cyclo::one())
    }

    pub fn var(m: &Model, i: usize) -> Weyl {
        let mut e = vec![0; m.nvars()];
        e[i] = 1;
        let mut w = Weyl::zero_for(m);
        w.add_term(e, 0, Cyclo::one());
        w
    }

    pub fn monomial(m: &Model, exps: Vec<u16>, h: i32, c: Cyclo) -> Weyl {
        let mut w = Weyl::zero_for(m);
        w.add_term(exps, h, c);
        w
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn wtrunc(&self) -> i64 {
        self.wtrunc
    }

    pub fn htrunc(&self) -> i64 {
        self.htrunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Cyclo)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, h: i32, c: Cyclo) {
        self.add_mono(Mono { exps, h }, c);
    }

    pub fn add_mono(&mut self, m: Mono, c: Cyclo) {
        if c.is_zero() || m.weight() > self.wtrunc || m.h as i64 > self.htrunc {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn coeff(&self, exps: &[u16], h: i32) -> Cyclo {
        self.terms.get(&Mono { exps: exps.to_vec(), h }).cloned().unwrap_or_else(Cyclo::zero)
    }

    /// The ħ-series multiplying x^exps.
    pub fn coeff_series(&self, exps: &[u16]) -> HbarSeries {
        let deg: i64 = exps.iter().map(|e| *e as i64).sum();
        // weight deg + 2h ≤ W  ⇔  h ≤ (W - deg)/2
        let hw = if self.wtrunc >= EXACT { EXACT } else { (self.wtrunc - deg).div_euclid(2) };
        let mut s = HbarSeries::zero(hw.min(self.htrunc));
        for (m, c) in &self.terms {
            if m.exps == exps {
                s.add_term(m.h, c.clone());
            }
        }
        s
    }

    pub fn lowest_weight(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.weight()).min()
    }

    pub fn lowest_h(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.h).min()
    }

    pub fn max_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Restricts to the given truncation (never raises it).
    pub fn truncated(&self, wtrunc: i64, htrunc: i64) -> Weyl {
        let mut w = Weyl::zero(self.nvars, wtrunc.min(self.wtrunc), htrunc.min(self.htrunc));
        for (m, c) in &self.terms {
            w.add_mono(m.clone(), c.clone());
        }
        w
    }

    /// Declares the element exact (used for literal input).
    pub fn with_trunc(&self, wtrunc: i64, htrunc: i64) -> Weyl {
        let mut w = Weyl::zero(self.nvars, wtrunc, htrunc);
        for (m, c) in &self.terms {
            w.add_mono(m.clone(), c.clone());
        }
        w
    }

    pub fn add(&self, o: &Weyl) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc.min(o.wtrunc), self.htrunc.min(o.htrunc));
        for (m, c) in self.terms.iter().chain(o.terms.iter()) {
            w.add_mono(m.clone(), c.clone());
        }
        w
    }

    pub fn sub(&self, o: &Weyl) -> Weyl {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Weyl {
        self.scale(&Cyclo::from_int(-1))
    }

    pub fn scale(&self, c: &Cyclo) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (m, v) in &self.terms {
            w.add_mono(m.clone(), v * c);
        }
        w
    }

    /// Multiplication by ħ^k; truncations move with it.
    pub fn shift_h(&self, k: i32) -> Weyl {
        let sh = |t: i64, d: i64| if t >= EXACT { EXACT } else { t + d };
        let mut w = Weyl::zero(self.nvars, sh(self.wtrunc, 2 * k as i64), sh(self.htrunc, k as i64));
        for (m, v) in &self.terms {
            w.add_mono(Mono { exps: m.exps.clone(), h: m.h + k }, v.clone());
        }
        w
    }

    fn product_truncs(&self, o: &Weyl) -> (i64, i64) {
        let lw = |w: &Weyl| w.lowest_weight().unwrap_or(EXACT);
        let lh = |w: &Weyl| w.lowest_h().map(|h| h as i64).unwrap_or(EXACT);
        (
            product_trunc(self.wtrunc, lw(self), o.wtrunc, lw(o)),
            product_trunc(self.htrunc, lh(self), o.htrunc, lh(o)),
        )
    }

    /// Product under exp(c·ħ·Σ_{p∈pairs} ω^{ab}∂_a⊗∂_b).
    fn bidiff_product(&self, o: &Weyl, pairs: &[Pair], c: &BigRational) -> Weyl {
        let (wt, ht) = self.product_truncs(o);
        let mut w = Weyl::zero(self.nvars, wt, ht);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let cab = ca * cb;
                let hbase = ma.h + mb.h;
                let wbase = ma.weight() + mb.weight();
                if wbase > wt || hbase as i64 > ht {
                    continue;
                }
                for (e, h, r) in bidiff_expand(&ma.exps, &mb.exps, pairs, c) {
                    w.add_term(e, hbase + h, cab.scale(&r));
                }
            }
        }
        w
    }

    /// Commutative product.
    pub fn mul_commutative(&self, o: &Weyl) -> Weyl {
        self.bidiff_product(o, &[], &BigRational::zero())
    }

    /// Moyal product f⋆g = Σ ħ^j/j! m(Π^j(f⊗g)), Π = ½ω.
    pub fn moyal(&self, m: &Model, o: &Weyl) -> Weyl {
        self.bidiff_product(o, &m.pairs, &BigRational::new(1.into(), 2.into()))
    }

    fn check_z_only(&self, m: &Model) -> Result<(), WeylError> {
        if self.terms.keys().any(|mo| mo.exps[..2 * m.k].iter().any(|e| *e != 0)) {
            return Err(WeylError::FixedVariables);
        }
        Ok(())
    }

    /// Product on the rotated factor with +ħΠ₂.
    pub fn perp_star(&self, m: &Model, o: &Weyl) -> Result<Weyl, WeylError> {
        self.check_z_only(m)?;
        o.check_z_only(m)?;
        let pairs: Vec<Pair> = m.pairs.iter().filter(|p| !p.fixed).copied().collect();
        Ok(self.bidiff_product(o, &pairs, &BigRational::new(1.into(), 2.into())))
    }

    /// Product on the rotated factor with -ħΠ₂.
    pub fn hat_star(&self, m: &Model, o: &Weyl) -> Result<Weyl, WeylError> {
        self.check_z_only(m)?;
        o.check_z_only(m)?;
        let pairs: Vec<Pair> = m.pairs.iter().filter(|p| !p.fixed).copied().collect();
        Ok(self.bidiff_product(o, &pairs, &BigRational::new((-1).into(), 2.into())))
    }

    /// Function part of the g-action: x^α ↦ λ^α x^α.
    pub fn g_act(&self, m: &Model) -> Weyl {
        self.g_pow(m, 1)
    }

    pub fn g_pow(&self, m: &Model, p: i64) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (mo, c) in &self.terms {
            let e = m.monomial_eig_exp(&mo.exps) * p;
            w.add_mono(mo.clone(), c * &Cyclo::zeta_pow(m.order, e));
        }
        w
    }

    /// Average over ⟨g⟩: keeps the monomials of eigenvalue 1.
    pub fn invariant_project(&self, m: &Model) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (mo, c) in &self.terms {
            if m.monomial_eig_exp(&mo.exps) == 0 {
                w.add_mono(mo.clone(), c.clone());
            }
        }
        w
    }

    pub fn is_invariant(&self, m: &Model) -> bool {
        self.terms.keys().all(|mo| m.monomial_eig_exp(&mo.exps) == 0)
    }

    fn keep(&self, f: impl Fn(usize) -> bool) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (mo, c) in &self.terms {
            if mo.exps.iter().enumerate().all(|(i, e)| *e == 0 || !f(i)) {
                w.add_mono(mo.clone(), c.clone());
            }
        }
        w
    }

    /// Sets every z to 0.
    pub fn sigma_z(&self, m: &Model) -> Weyl {
        self.keep(|i| !m.is_fixed_var(i))
    }

    /// Sets every y to 0.
    pub fn sigma_y(&self, m: &Model) -> Weyl {
        self.keep(|i| m.is_fixed_var(i))
    }

    /// ∂/∂x^i.
    pub fn partial(&self, i: usize) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc - 1, self.htrunc);
        for (mo, c) in &self.terms {
            if mo.exps[i] > 0 {
                let mut e = mo.exps.clone();
                let k = e[i];
                e[i] -= 1;
                w.add_term(e, mo.h, c.scale_int(k as i64));
            }
        }
        w
    }

    /// Value at x = 0 as an ħ-series.
    pub fn at_zero(&self) -> HbarSeries {
        self.coeff_series(&vec![0; self.nvars])
    }

    /// Homogeneous polynomial part of the given degree (all ħ-orders).
    pub fn degree_part(&self, d: i64) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (mo, c) in &self.terms {
            if mo.degree() == d {
                w.add_mono(mo.clone(), c.clone());
            }
        }
        w
    }

    /// Part at a fixed ħ-order, returned with ħ-power 0.
    pub fn hbar_part(&self, h: i32) -> Weyl {
        let mut w = Weyl::zero(self.nvars, EXACT, EXACT);
        for (mo, c) in &self.terms {
            if mo.h == h {
                w.add_term(mo.exps.clone(), 0, c.clone());
            }
        }
        w
    }

    /// ∇_{ħ∂ħ} = ħ∂ħ + L_E: multiplies each term by half its weight.
    pub fn gm_nabla(&self) -> Weyl {
        let mut w = Weyl::zero(self.nvars, self.wtrunc, self.htrunc);
        for (mo, c) in &self.terms {
            w.add_mono(mo.clone(), c.scale(&BigRational::new(mo.weight().into(), 2.into())));
        }
        w
    }

    /// Equality of all terms inside the smaller truncation.
    pub fn eq_upto(&self, o: &Weyl) -> bool {
        let wt = self.wtrunc.min(o.wtrunc);
        let ht = self.htrunc.min(o.htrunc);
        self.sub(o).terms.keys().all(|m| m.weight() > wt || m.h as i64 > ht)
    }

    pub fn render(&self, m: &Model) -> String {
        let mut parts = Vec::new();
        for (mo, c) in &self.terms {
            for (r, j) in c.basis_terms() {
                let mut f = Vec::new();
                if j != 0 {
                    f.push(format!("zeta{}^{}", c.order(), j));
                }
                for (i, e) in mo.exps.iter().enumerate() {
                    if *e != 0 {
                        f.push(format!("{}^{}", m.var_name(i), e));
                    }
                }
                if mo.h != 0 {
                    f.push(format!("h^{}", mo.h));
                }
                parts.push((r, f));
            }
        }
        render_terms(&parts)
    }
}

/// An r×r matrix over the Weyl algebra with a common truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixWeyl {
    r: usize,
    entries: Vec<Weyl>,
}

impl MatrixWeyl {
    pub fn zero(m: &Model) -> MatrixWeyl {
        MatrixWeyl { r: m.r, entries: vec![Weyl::zero_for(m); m.r * m.r] }
    }

    pub fn from_entries(r: usize, entries: Vec<Weyl>) -> MatrixWeyl {
        assert_eq!(entries.len(), r * r, "matrix entry count");
        MatrixWeyl { r, entries }
    }

    /// f·Id.
    pub fn scalar(m: &Model, f: &Weyl) -> MatrixWeyl {
        let mut out = MatrixWeyl::zero(m);
        let z = Weyl::zero(f.nvars(), f.wtrunc(), f.htrunc());
        for i in 0..m.r {
            for j in 0..m.r {
                out.entries[i * m.r + j] = if i == j { f.clone() } else { z.clone() };
            }
        }
        out
    }

    /// f·E_ab.
    pub fn unit(m: &Model, a: usize, b: usize, f: &Weyl) -> MatrixWeyl {
        let mut out = MatrixWeyl::zero(m);
        let z = Weyl::zero(f.nvars(), f.wtrunc(), f.htrunc());
        for e in out.entries.iter_mut() {
            *e = z.clone();
        }
        out.entries[a * m.r + b] = f.clone();
        out
    }

    pub fn identity(m: &Model) -> MatrixWeyl {
        MatrixWeyl::scalar(m, &Weyl::one(m))
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn entry(&self, i: usize, j: usize) -> &Weyl {
        &self.entries[i * self.r + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Weyl {
        &mut self.entries[i * self.r + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Weyl)> {
        let r = self.r;
        self.entries.iter().enumerate().map(move |(idx, w)| (idx / r, idx % r, w))
    }

    pub fn map(&self, f: impl Fn(&Weyl) -> Weyl) -> MatrixWeyl {
        MatrixWeyl { r: self.r, entries: self.entries.iter().map(f).collect() }
    }

    pub fn zip(&self, o: &MatrixWeyl, f: impl Fn(&Weyl, &Weyl) -> Weyl) -> MatrixWeyl {
        assert_eq!(self.r, o.r, "matrix rank mismatch");
        MatrixWeyl { r: self.r, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, o: &MatrixWeyl) -> MatrixWeyl {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &MatrixWeyl) -> MatrixWeyl {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &Cyclo) -> MatrixWeyl {
        self.map(|a| a.scale(c))
    }

    pub fn shift_h(&self, k: i32) -> MatrixWeyl {
        self.map(|a| a.shift_h(k))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn product(&self, o: &MatrixWeyl, f: impl Fn(&Weyl, &Weyl) -> Weyl) -> MatrixWeyl {
        assert_eq!(self.r, o.r, "matrix rank mismatch");
        let r = self.r;
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let mut acc: Option<Weyl> = None;
                for l in 0..r {
                    let p = f(self.entry(i, l), o.entry(l, j));
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.add(&p),
                    });
                }
                entries.push(acc.expect("positive rank"));
            }
        }
        MatrixWeyl { r, entries }
    }

    pub fn try_moyal(&self, m: &Model, o: &MatrixWeyl) -> Result<MatrixWeyl, WeylError> {
        if self.r != o.r || self.r != m.r {
            return Err(WeylError::ModelMismatch(self.r, o.r));
        }
        Ok(self.moyal(m, o))
    }

    /// Row-by-column product with Moyal products of entries.
    pub fn moyal(&self, m: &Model, o: &MatrixWeyl) -> MatrixWeyl {
        self.product(o, |a, b| a.moyal(m, b))
    }

    /// (a⋆b - b⋆a)/ħ.
    pub fn bracket(&self, m: &Model, o: &MatrixWeyl) -> MatrixWeyl {
        self.moyal(m, o).sub(&o.moyal(m, self)).shift_h(-1)
    }

    /// g acting on entries and by conjugation with e_twist.
    pub fn g_act(&self, m: &Model) -> MatrixWeyl {
        let r = self.r;
        let fun = self.map(|w| w.g_act(m));
        if !m.twisted {
            return fun;
        }
        let z = Weyl::zero(self.entries[0].nvars(), self.entries[0].wtrunc(), self.entries[0].htrunc());
        let mut out = MatrixWeyl { r, entries: vec![z; r * r] };
        for a in 0..r {
            for b in 0..r {
                let w = fun.entry(a, b);
                if w.is_zero() {
                    continue;
                }
                for (c, d, v) in m.twist_unit(a, b) {
                    let e = out.entry(c, d).add(&w.scale(&v));
                    *out.entry_mut(c, d) = e;
                }
            }
        }
        out
    }

    /// Average over the N powers of g.
    pub fn invariant_project(&self, m: &Model) -> MatrixWeyl {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..m.order {
            cur = cur.g_act(m);
            acc = acc.add(&cur);
        }
        acc.scale(&Cyclo::frac(1, m.order as i64))
    }

    pub fn is_invariant(&self, m: &Model) -> bool {
        self.g_act(m).eq_upto(self)
    }

    pub fn sigma_z(&self, m: &Model) -> MatrixWeyl {
        self.map(|w| w.sigma_z(m))
    }

    pub fn sigma_y(&self, m: &Model) -> MatrixWeyl {
        self.map(|w| w.sigma_y(m))
    }

    pub fn gm_nabla(&self) -> MatrixWeyl {
        self.map(|w| w.gm_nabla())
    }

    pub fn eq_upto(&self, o: &MatrixWeyl) -> bool {
        self.r == o.r && self.entries.iter().zip(&o.entries).all(|(a, b)| a.eq_upto(b))
    }

    pub fn render(&self, m: &Model) -> String {
        if self.r == 1 {
            return self.entries[0].render(m);
        }
        let rows: Vec<String> = (0..self.r)
            .map(|i| {
                let cols: Vec<String> = (0..self.r).map(|j| self.entry(i, j).render(m)).collect();
                format!("[{}]", cols.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}h^{}", self.exps, self.h)
    }
}
