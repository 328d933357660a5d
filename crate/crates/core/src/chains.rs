//! Normalized twisted Hochschild chains over gl_r of the Weyl algebra, the
//! operators b_g and B_g, shuffles and the twisted matrix trace.
//!
//! A chain is a sparse sum of basis tensors. Each tensor factor is a matrix
//! unit times a monomial, E_{row,col} x^exps; ħ and u powers are collected
//! into the coefficient. In positions ≥ 1 the quotient by scalar multiples
//! of the unit is realized by rewriting the constant E_{r-1,r-1} as
//! -Σ_{i<r-1} E_ii (and dropping constants when r = 1).

use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

use crate::exactnum::{product_trunc, render_terms, Cyclo, EXACT};
use crate::model::{CMatrix, Model};
use crate::weyl::{bidiff_expand, MatrixWeyl};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain is not invariant under the diagonal action of g")]
    NotInvariant,
    #[error("matrix rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub row: u8,
    pub col: u8,
    pub exps: Vec<u16>,
}

impl Slot {
    pub fn degree(&self) -> i64 {
        self.exps.iter().map(|e| *e as i64).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|e| *e == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CKey {
    pub slots: Vec<Slot>,
    pub h: i32,
    pub u: i32,
}

impl CKey {
    pub fn weight(&self) -> i64 {
        self.slots.iter().map(|s| s.degree()).sum::<i64>() + 2 * self.h as i64
    }

    /// Number of tensor factors minus one.
    pub fn m(&self) -> usize {
        self.slots.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    nvars: usize,
    r: usize,
    terms: BTreeMap<CKey, Cyclo>,
    wtrunc: i64,
    htrunc: i64,
}

/// Moyal product of two basis factors: (slot, ħ-power, coefficient) terms.
pub fn slot_mul(m: &Model, a: &Slot, b: &Slot) -> Vec<(Slot, i32, Cyclo)> {
    if a.col != b.row {
        return Vec::new();
    }
    let half = BigRational::new(1.into(), 2.into());
    bidiff_expand(&a.exps, &b.exps, &m.pairs, &half)
        .into_iter()
        .map(|(e, h, c)| (Slot { row: a.row, col: b.col, exps: e }, h, Cyclo::from_rational(c)))
        .collect()
}

/// g acting on a basis factor.
pub fn slot_g(m: &Model, s: &Slot) -> Vec<(Slot, Cyclo)> {
    let lam = m.monomial_eigenvalue(&s.exps);
    m.twist_unit(s.row as usize, s.col as usize)
        .into_iter()
        .map(|(c, d, v)| (Slot { row: c as u8, col: d as u8, exps: s.exps.clone() }, &v * &lam))
        .collect()
}

/// All ways to pick one term from each list: (concatenated items, product of coefficients).
fn cartesian<T: Clone>(lists: &[Vec<(T, Cyclo)>]) -> Vec<(Vec<T>, Cyclo)> {
    let mut acc: Vec<(Vec<T>, Cyclo)> = vec![(Vec::new(), Cyclo::one())];
    for l in lists {
        let mut next = Vec::new();
        for (items, c) in &acc {
            for (t, v) in l {
                let mut it = items.clone();
                it.push(t.clone());
                next.push((it, c * v));
            }
        }
        acc = next;
    }
    acc
}

impl Chain {
    pub fn zero(nvars: usize, r: usize, wtrunc: i64, htrunc: i64) -> Chain {
        Chain { nvars, r, terms: BTreeMap::new(), wtrunc: wtrunc.min(EXACT), htrunc: htrunc.min(EXACT) }
    }

    pub fn zero_for(m: &Model) -> Chain {
        Chain::zero(m.nvars(), m.r, m.weight_trunc, m.hbar_trunc)
    }

    fn empty_like(&self) -> Chain {
        Chain::zero(self.nvars, self.r, self.wtrunc, self.htrunc)
    }

    /// c · O₀ ⊗ … ⊗ O_m.
    pub fn from_tensor(m: &Model, factors: &[MatrixWeyl], c: &Cyclo) -> Result<Chain, ChainError> {
        let mut wt = EXACT;
        let mut ht = EXACT;
        let mut wl = 0i64;
        let mut hl = 0i64;
        let mut lists: Vec<Vec<((Slot, i32), Cyclo)>> = Vec::new();
        for (idx, f) in factors.iter().enumerate() {
            if f.rank() != m.r {
                return Err(ChainError::RankMismatch { expected: m.r, got: f.rank() });
            }
            let mut items = Vec::new();
            let mut fw = EXACT;
            let mut fh = EXACT;
            let mut flw = EXACT;
            let mut flh = EXACT;
            for (i, j, w) in f.entries() {
                fw = fw.min(w.wtrunc());
                fh = fh.min(w.htrunc());
                for (mo, v) in w.terms() {
                    flw = flw.min(mo.weight());
                    flh = flh.min(mo.h as i64);
                    items.push(((Slot { row: i as u8, col: j as u8, exps: mo.exps.clone() }, mo.h), v.clone()));
                }
            }
            if idx == 0 {
                wt = fw;
                ht = fh;
                wl = flw;
                hl = flh;
            } else {
                wt = product_trunc(wt, wl, fw, flw);
                ht = product_trunc(ht, hl, fh, flh);
                wl = (wl + flw).min(EXACT);
                hl = (hl + flh).min(EXACT);
            }
            lists.push(items);
        }
        let mut ch = Chain::zero(m.nvars(), m.r, wt.min(m.weight_trunc), ht.min(m.hbar_trunc));
        for (items, v) in cartesian(&lists) {
            let h: i32 = items.iter().map(|(_, h)| *h).sum();
            let slots = items.into_iter().map(|(s, _)| s).collect();
            ch.add_term(CKey { slots, h, u: 0 }, &v * c);
        }
        Ok(ch)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn wtrunc(&self) -> i64 {
        self.wtrunc
    }

    pub fn htrunc(&self) -> i64 {
        self.htrunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CKey, &Cyclo)> {
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

    pub fn max_m(&self) -> usize {
        self.terms.keys().map(|k| k.m()).max().unwrap_or(0)
    }

    /// Adds a term, rewriting unit content in positions ≥ 1.
    pub fn add_term(&mut self, k: CKey, c: Cyclo) {
        if c.is_zero() || k.weight() > self.wtrunc || k.h as i64 > self.htrunc {
            return;
        }
        let last = (self.r - 1) as u8;
        if let Some(pos) = k.slots.iter().skip(1).position(|s| s.is_constant() && s.row == last && s.col == last) {
            let pos = pos + 1;
            for i in 0..last {
                let mut kk = k.clone();
                kk.slots[pos] = Slot { row: i, col: i, exps: k.slots[pos].exps.clone() };
                self.add_term(kk, -&c);
            }
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

    pub fn add(&self, o: &Chain) -> Chain {
        let mut ch = Chain::zero(self.nvars, self.r, self.wtrunc.min(o.wtrunc), self.htrunc.min(o.htrunc));
        for (k, c) in self.terms.iter().chain(o.terms.iter()) {
            ch.add_term(k.clone(), c.clone());
        }
        ch
    }

    pub fn sub(&self, o: &Chain) -> Chain {
        self.add(&o.scale(&Cyclo::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclo) -> Chain {
        let mut ch = self.empty_like();
        for (k, v) in &self.terms {
            ch.add_term(k.clone(), v * c);
        }
        ch
    }

    /// Multiplication by ħ^dh u^du.
    pub fn shift(&self, dh: i32, du: i32) -> Chain {
        let sh = |t: i64, d: i64| if t >= EXACT { EXACT } else { t + d };
        let mut ch = Chain::zero(self.nvars, self.r, sh(self.wtrunc, 2 * dh as i64), sh(self.htrunc, dh as i64));
        for (k, v) in &self.terms {
            ch.add_term(CKey { slots: k.slots.clone(), h: k.h + dh, u: k.u + du }, v.clone());
        }
        ch
    }

    /// Twisted Hochschild differential:
    /// (-1)^m a_m a₀ ⊗ a₁ ⊗ … + a₀ g(a₁) ⊗ a₂ ⊗ … + Σ_{i=1}^{m-1} (-1)^i … ⊗ a_i a_{i+1} ⊗ ….
    pub fn b_g(&self, m: &Model) -> Chain {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let s = &k.slots;
            let mm = k.m();
            if mm == 0 {
                continue;
            }
            let sign_m = if mm % 2 == 0 { 1 } else { -1 };
            for (p, h, v) in slot_mul(m, &s[mm], &s[0]) {
                let mut slots = vec![p];
                slots.extend_from_slice(&s[1..mm]);
                out.add_term(CKey { slots, h: k.h + h, u: k.u }, (c * &v).scale_int(sign_m));
            }
            for (ga, gv) in slot_g(m, &s[1]) {
                for (p, h, v) in slot_mul(m, &s[0], &ga) {
                    let mut slots = vec![p];
                    slots.extend_from_slice(&s[2..]);
                    out.add_term(CKey { slots, h: k.h + h, u: k.u }, &(c * &gv) * &v);
                }
            }
            for i in 1..mm {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for (p, h, v) in slot_mul(m, &s[i], &s[i + 1]) {
                    let mut slots = s[..i].to_vec();
                    slots.push(p);
                    slots.extend_from_slice(&s[i + 2..]);
                    out.add_term(CKey { slots, h: k.h + h, u: k.u }, (c * &v).scale_int(sign));
                }
            }
        }
        out
    }

    /// Twisted Connes operator on ⟨g⟩-invariant chains.
    pub fn connes_b(&self, m: &Model) -> Result<Chain, ChainError> {
        if !self.is_invariant(m) {
            return Err(ChainError::NotInvariant);
        }
        Ok(self.connes_b_unchecked(m))
    }

    /// Σ_{i=0}^{m} (-1)^{mi} 1 ⊗ a_{m-i+1} ⊗ … ⊗ a_m ⊗ a₀ ⊗ g(a₁) ⊗ … ⊗ g(a_{m-i}).
    pub fn connes_b_unchecked(&self, m: &Model) -> Chain {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let s = &k.slots;
            let mm = k.m();
            for i in 0..=mm {
                let sign = if (mm * i) % 2 == 0 { 1 } else { -1 };
                let mut lists: Vec<Vec<(Slot, Cyclo)>> = Vec::new();
                let unit: Vec<(Slot, Cyclo)> = (0..self.r)
                    .map(|a| (Slot { row: a as u8, col: a as u8, exps: vec![0; self.nvars] }, Cyclo::one()))
                    .collect();
                lists.push(unit);
                for a in &s[mm - i + 1..] {
                    lists.push(vec![(a.clone(), Cyclo::one())]);
                }
                lists.push(vec![(s[0].clone(), Cyclo::one())]);
                for a in &s[1..mm - i + 1] {
                    lists.push(slot_g(m, a));
                }
                for (slots, v) in cartesian(&lists) {
                    out.add_term(CKey { slots, h: k.h, u: k.u }, (c * &v).scale_int(sign));
                }
            }
        }
        out
    }

    /// Variant of B_g with g applied to the wrapped factors a_{m-i+1..m}
    /// instead of a₁…a_{m-i}. It does not anticommute with b_g; kept for
    /// comparison.
    pub fn connes_b_literal(&self, m: &Model) -> Chain {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let s = &k.slots;
            let mm = k.m();
            for i in 0..=mm {
                let sign = if (mm * i) % 2 == 0 { 1 } else { -1 };
                let mut lists: Vec<Vec<(Slot, Cyclo)>> = Vec::new();
                lists.push(
                    (0..self.r)
                        .map(|a| (Slot { row: a as u8, col: a as u8, exps: vec![0; self.nvars] }, Cyclo::one()))
                        .collect(),
                );
                for a in &s[mm - i + 1..] {
                    lists.push(slot_g(m, a));
                }
                for a in &s[..mm - i + 1] {
                    lists.push(vec![(a.clone(), Cyclo::one())]);
                }
                for (slots, v) in cartesian(&lists) {
                    out.add_term(CKey { slots, h: k.h, u: k.u }, (c * &v).scale_int(sign));
                }
            }
        }
        out
    }

    /// b_g + u·B_g on u-extended chains.
    pub fn periodic_d(&self, m: &Model) -> Chain {
        self.b_g(m).add(&self.connes_b_unchecked(m).shift(0, 1))
    }

    /// Diagonal action of g.
    pub fn g_act(&self, m: &Model) -> Chain {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let lists: Vec<Vec<(Slot, Cyclo)>> = k.slots.iter().map(|s| slot_g(m, s)).collect();
            for (slots, v) in cartesian(&lists) {
                out.add_term(CKey { slots, h: k.h, u: k.u }, c * &v);
            }
        }
        out
    }

    pub fn is_invariant(&self, m: &Model) -> bool {
        self.g_act(m).eq_upto(self)
    }

    /// Average over ⟨g⟩.
    pub fn invariant_project(&self, m: &Model) -> Chain {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..m.order {
            cur = cur.g_act(m);
            acc = acc.add(&cur);
        }
        acc.scale(&Cyclo::frac(1, m.order as i64))
    }

    /// ∇_{ħ∂ħ} extended to tensors as a derivation: half the total weight.
    pub fn gm_nabla(&self) -> Chain {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale(&BigRational::new(k.weight().into(), 2.into())));
        }
        out
    }

    pub fn eq_upto(&self, o: &Chain) -> bool {
        let wt = self.wtrunc.min(o.wtrunc);
        let ht = self.htrunc.min(o.htrunc);
        self.sub(o).terms.keys().all(|k| k.weight() > wt || k.h as i64 > ht)
    }

    pub fn is_zero_upto(&self) -> bool {
        self.terms.keys().all(|k| k.weight() > self.wtrunc || k.h as i64 > self.htrunc)
    }

    pub fn render(&self, m: &Model) -> String {
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let factors: Vec<String> = k
                .slots
                .iter()
                .map(|s| {
                    let mut f = Vec::new();
                    if self.r > 1 {
                        f.push(format!("E{}{}", s.row + 1, s.col + 1));
                    }
                    for (i, e) in s.exps.iter().enumerate() {
                        if *e != 0 {
                            f.push(format!("{}^{}", m.var_name(i), e));
                        }
                    }
                    if f.is_empty() {
                        "1".to_string()
                    } else {
                        f.join("*")
                    }
                })
                .collect();
            for (r, j) in c.basis_terms() {
                let mut f = Vec::new();
                if j != 0 {
                    f.push(format!("zeta{}^{}", c.order(), j));
                }
                if k.h != 0 {
                    f.push(format!("h^{}", k.h));
                }
                if k.u != 0 {
                    f.push(format!("u^{}", k.u));
                }
                f.push(format!("[{}]", factors.join(" | ")));
                parts.push((r, f));
            }
        }
        render_terms(&parts)
    }
}

/// Trace of E_{r0c0} e E_{r1c1} ⋯ E_{rmcm}.
pub fn tr_g_units(m: &Model, slots: &[Slot]) -> Cyclo {
    let mm = slots.len() - 1;
    let e = &m.e_twist;
    if mm == 0 {
        return e[slots[0].col as usize][slots[0].row as usize].clone();
    }
    for i in 1..mm {
        if slots[i].col != slots[i + 1].row {
            return Cyclo::zero();
        }
    }
    if slots[mm].col != slots[0].row {
        return Cyclo::zero();
    }
    e[slots[0].col as usize][slots[1].row as usize].clone()
}

/// tr(M₀ g M₁ ⋯ M_m) for constant matrices, g = e_twist.
pub fn tr_g(m: &Model, mats: &[CMatrix]) -> Result<Cyclo, ChainError> {
    for a in mats {
        if a.len() != m.r || a.iter().any(|row| row.len() != m.r) {
            return Err(ChainError::RankMismatch { expected: m.r, got: a.len() });
        }
    }
    let mut prod = mats[0].clone();
    prod = crate::model::mat_mul(&prod, &m.e_twist);
    for a in &mats[1..] {
        prod = crate::model::mat_mul(&prod, a);
    }
    let mut t = Cyclo::zero();
    for (i, row) in prod.iter().enumerate() {
        t += &row[i];
    }
    Ok(t)
}

/// Σ over (p,q)-shuffles of interleavings of s and t. With `odd`, every
/// transposition of an s-entry past a t-entry contributes -1.
pub fn shuffle<T: Clone>(s: &[T], t: &[T], odd: bool) -> Vec<(i64, Vec<T>)> {
    let mut out = Vec::new();
    fn rec<T: Clone>(s: &[T], t: &[T], odd: bool, acc: &mut Vec<T>, inv: usize, out: &mut Vec<(i64, Vec<T>)>) {
        if s.is_empty() && t.is_empty() {
            let sign = if odd && inv % 2 == 1 { -1 } else { 1 };
            out.push((sign, acc.clone()));
            return;
        }
        if let Some((h, rest)) = s.split_first() {
            acc.push(h.clone());
            rec(rest, t, odd, acc, inv, out);
            acc.pop();
        }
        if let Some((h, rest)) = t.split_first() {
            acc.push(h.clone());
            rec(s, rest, odd, acc, inv + s.len(), out);
            acc.pop();
        }
    }
    rec(s, t, odd, &mut Vec::new(), 0, &mut out);
    out
}
