//! Formal de Rham forms: polynomial coefficients times Grassmann generators
//! dy^i, dz^j, with coefficients in ℂ((ħ))[u, u⁻¹].
//!
//! Grassmann generators are kept as a bitmask in the canonical order
//! dy¹ < … < dy^{2k} < dz^{2k+1} < … < dz^{2n}; signs come from sorting by
//! adjacent transpositions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::exactnum::{render_terms, Cyclo, ScalarK, EXACT};
use crate::model::Model;
use crate::weyl::{factorial, Weyl};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form has residual z or dz content; apply sigma_z first")]
    ResidualZ,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FKey {
    pub exps: Vec<u16>,
    pub gm: u64,
    pub h: i32,
    pub u: i32,
}

impl FKey {
    pub fn degree(&self) -> i64 {
        self.exps.iter().map(|e| *e as i64).sum()
    }

    pub fn grassmann(&self) -> i64 {
        self.gm.count_ones() as i64
    }

    /// Polynomial degree + number of Grassmann generators + 2·ħ-order.
    pub fn weight(&self) -> i64 {
        self.degree() + self.grassmann() + 2 * self.h as i64
    }
}

/// Sign of dx^I ∧ dx^J relative to the sorted product, or None if I ∩ J ≠ ∅.
pub fn wedge_sign(i: u64, j: u64) -> Option<i64> {
    if i & j != 0 {
        return None;
    }
    let mut inv = 0u32;
    let mut jj = j;
    while jj != 0 {
        let b = jj.trailing_zeros();
        // generators of I above b must move past dx^b
        inv += (i >> b).count_ones();
        jj &= jj - 1;
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

fn below(gm: u64, i: usize) -> u32 {
    (gm & ((1u64 << i) - 1)).count_ones()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    nvars: usize,
    terms: BTreeMap<FKey, Cyclo>,
    wtrunc: i64,
    htrunc: i64,
}

impl Form {
    pub fn zero(nvars: usize, wtrunc: i64, htrunc: i64) -> Form {
        Form { nvars, terms: BTreeMap::new(), wtrunc: wtrunc.min(EXACT), htrunc: htrunc.min(EXACT) }
    }

    pub fn zero_for(m: &Model) -> Form {
        Form::zero(m.nvars(), m.weight_trunc, m.hbar_trunc)
    }

    pub fn from_weyl(w: &Weyl) -> Form {
        let mut f = Form::zero(w.nvars(), w.wtrunc(), w.htrunc());
        for (mo, c) in w.terms() {
            f.add_term(FKey { exps: mo.exps.clone(), gm: 0, h: mo.h, u: 0 }, c.clone());
        }
        f
    }

    /// The generator dx^i.
    pub fn dvar(m: &Model, i: usize) -> Form {
        let mut f = Form::zero_for(m);
        f.add_term(FKey { exps: vec![0; m.nvars()], gm: 1 << i, h: 0, u: 0 }, Cyclo::one());
        f
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

    pub fn terms(&self) -> impl Iterator<Item = (&FKey, &Cyclo)> {
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

    pub fn add_term(&mut self, k: FKey, c: Cyclo) {
        if c.is_zero() || k.weight() > self.wtrunc || k.h as i64 > self.htrunc {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    fn empty_like(&self) -> Form {
        Form::zero(self.nvars, self.wtrunc, self.htrunc)
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut f = Form::zero(self.nvars, self.wtrunc.min(o.wtrunc), self.htrunc.min(o.htrunc));
        for (k, c) in self.terms.iter().chain(o.terms.iter()) {
            f.add_term(k.clone(), c.clone());
        }
        f
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale(&Cyclo::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclo) -> Form {
        let mut f = self.empty_like();
        for (k, v) in &self.terms {
            f.add_term(k.clone(), v * c);
        }
        f
    }

    /// Multiplication by ħ^dh u^du.
    pub fn shift(&self, dh: i32, du: i32) -> Form {
        let sh = |t: i64, d: i64| if t >= EXACT { EXACT } else { t + d };
        let mut f = Form::zero(self.nvars, sh(self.wtrunc, 2 * dh as i64), sh(self.htrunc, dh as i64));
        for (k, v) in &self.terms {
            f.add_term(FKey { exps: k.exps.clone(), gm: k.gm, h: k.h + dh, u: k.u + du }, v.clone());
        }
        f
    }

    pub fn truncated(&self, wtrunc: i64, htrunc: i64) -> Form {
        let mut f = Form::zero(self.nvars, wtrunc.min(self.wtrunc), htrunc.min(self.htrunc));
        for (k, v) in &self.terms {
            f.add_term(k.clone(), v.clone());
        }
        f
    }

    /// Graded-commutative product a ∧ b.
    pub fn wedge(&self, o: &Form) -> Form {
        let lw = |f: &Form| f.terms.keys().map(|k| k.weight()).min().unwrap_or(EXACT);
        let lh = |f: &Form| f.terms.keys().map(|k| k.h as i64).min().unwrap_or(EXACT);
        let wt = crate::exactnum::product_trunc(self.wtrunc, lw(self), o.wtrunc, lw(o));
        let ht = crate::exactnum::product_trunc(self.htrunc, lh(self), o.htrunc, lh(o));
        let mut f = Form::zero(self.nvars, wt, ht);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                if let Some(s) = wedge_sign(ka.gm, kb.gm) {
                    let exps = ka.exps.iter().zip(&kb.exps).map(|(x, y)| x + y).collect();
                    let k = FKey { exps, gm: ka.gm | kb.gm, h: ka.h + kb.h, u: ka.u + kb.u };
                    f.add_term(k, (ca * cb).scale_int(s));
                }
            }
        }
        f
    }

    /// d = Σ_{i<2k} dy^i ∂_{y^i}.
    pub fn d_2k(&self, m: &Model) -> Form {
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            for i in 0..2 * m.k {
                if k.exps[i] == 0 || k.gm & (1 << i) != 0 {
                    continue;
                }
                let mut e = k.exps.clone();
                let mult = e[i] as i64;
                e[i] -= 1;
                let sign = if below(k.gm, i) % 2 == 0 { 1 } else { -1 };
                f.add_term(FKey { exps: e, gm: k.gm | (1 << i), h: k.h, u: k.u }, c.scale_int(sign * mult));
            }
        }
        f
    }

    /// Left contraction with ∂/∂(dx^i).
    pub fn iota(&self, i: usize) -> Form {
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            if k.gm & (1 << i) == 0 {
                continue;
            }
            let sign = if below(k.gm, i) % 2 == 0 { 1 } else { -1 };
            f.add_term(FKey { exps: k.exps.clone(), gm: k.gm & !(1 << i), h: k.h, u: k.u }, c.scale_int(sign));
        }
        f
    }

    /// ι_{Π₁} = ½ω^{ij}ι_iι_j = Σ over fixed pairs of ι_a ι_b.
    pub fn iota_pi1(&self, m: &Model) -> Form {
        let mut f = self.empty_like();
        for p in m.fixed_pairs() {
            f = f.add(&self.iota(p.b).iota(p.a));
        }
        f
    }

    /// Δ = [d, ι_{Π₁}] = dι - ιd.
    pub fn bv_delta(&self, m: &Model) -> Form {
        self.iota_pi1(m).d_2k(m).sub(&self.d_2k(m).iota_pi1(m))
    }

    pub fn has_z_content(&self, m: &Model) -> bool {
        let zmask: u64 = (2 * m.k..m.nvars()).fold(0, |acc, i| acc | (1 << i));
        self.terms.keys().any(|k| k.gm & zmask != 0 || k.exps[2 * m.k..].iter().any(|e| *e != 0))
    }

    /// Kills z and dz.
    pub fn sigma_z(&self, m: &Model) -> Form {
        let zmask: u64 = (2 * m.k..m.nvars()).fold(0, |acc, i| acc | (1 << i));
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            if k.gm & zmask == 0 && k.exps[2 * m.k..].iter().all(|e| *e == 0) {
                f.add_term(k.clone(), c.clone());
            }
        }
        f
    }

    /// Kills y and dy.
    pub fn sigma_y(&self, m: &Model) -> Form {
        let ymask: u64 = (0..2 * m.k).fold(0, |acc, i| acc | (1 << i));
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            if k.gm & ymask == 0 && k.exps[..2 * m.k].iter().all(|e| *e == 0) {
                f.add_term(k.clone(), c.clone());
            }
        }
        f
    }

    /// Berezin integral u^k σ_y(e^{ħι_{Π₁}/u} a).
    pub fn berezin(&self, m: &Model) -> Result<ScalarK, FormError> {
        if self.has_z_content(m) {
            return Err(FormError::ResidualZ);
        }
        let ht = if self.wtrunc >= EXACT { self.htrunc } else { self.htrunc.min(self.wtrunc.div_euclid(2)) };
        let mut out = ScalarK::zero(ht);
        let mut cur = self.clone();
        let mut j = 0i32;
        while !cur.is_zero() {
            let fac = BigRational::new(1.into(), factorial(j as u32));
            for (k, c) in cur.sigma_y(m).terms() {
                out.add_term(k.u - j + m.k as i32, k.h + j, c.scale(&fac));
            }
            cur = cur.iota_pi1(m);
            j += 1;
        }
        Ok(out)
    }

    /// L_E with E = ½ Σ x^i ∂_i, dx counting as degree 1.
    pub fn euler_lie(&self) -> Form {
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            let w = k.degree() + k.grassmann();
            f.add_term(k.clone(), c.scale(&BigRational::new(BigInt::from(w), 2.into())));
        }
        f
    }

    /// ħ∂ħ + L_E; equals multiplication by half the weight.
    pub fn gm_nabla(&self) -> Form {
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            f.add_term(k.clone(), c.scale(&BigRational::new(BigInt::from(k.weight()), 2.into())));
        }
        f
    }

    /// g acting on coordinates and their differentials.
    pub fn g_act(&self, m: &Model) -> Form {
        let mut f = self.empty_like();
        for (k, c) in &self.terms {
            let mut e = m.monomial_eig_exp(&k.exps);
            for i in 0..m.nvars() {
                if k.gm & (1 << i) != 0 {
                    e += m.eig_exp[i];
                }
            }
            f.add_term(k.clone(), c * &Cyclo::zeta_pow(m.order, e));
        }
        f
    }

    pub fn eq_upto(&self, o: &Form) -> bool {
        let wt = self.wtrunc.min(o.wtrunc);
        let ht = self.htrunc.min(o.htrunc);
        self.sub(o).terms.keys().all(|k| k.weight() > wt || k.h as i64 > ht)
    }

    /// True if no term survives inside the truncation.
    pub fn is_zero_upto(&self) -> bool {
        self.terms.keys().all(|k| k.weight() > self.wtrunc || k.h as i64 > self.htrunc)
    }

    pub fn render(&self, m: &Model) -> String {
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            for (r, j) in c.basis_terms() {
                let mut f = Vec::new();
                if j != 0 {
                    f.push(format!("zeta{}^{}", c.order(), j));
                }
                for (i, e) in k.exps.iter().enumerate() {
                    if *e != 0 {
                        f.push(format!("{}^{}", m.var_name(i), e));
                    }
                }
                for i in 0..m.nvars() {
                    if k.gm & (1 << i) != 0 {
                        f.push(format!("d{}", m.var_name(i)));
                    }
                }
                if k.h != 0 {
                    f.push(format!("h^{}", k.h));
                }
                if k.u != 0 {
                    f.push(format!("u^{}", k.u));
                }
                parts.push((r, f));
            }
        }
        render_terms(&parts)
    }
}
