use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CorrelateError;
use crate::chains::{tr_g_units, Chain};
use crate::exactnum::{Cyclo, HbarSeries};
use crate::forms::{wedge_sign, FKey, Form};
use crate::model::Model;
use crate::simplex;
use crate::weyl::{factorial, falling, Weyl};

/// One elementary contraction ∂_{va}^{(sa)} ∂_{vb}^{(sb)} with a constant
/// coefficient; `edge` marks a y-line whose position weight is integrated.
#[derive(Clone, Debug)]
struct Op {
    sa: usize,
    va: usize,
    sb: usize,
    vb: usize,
    coef: Cyclo,
    edge: Option<(usize, usize)>,
}

type FormTerms = Vec<(FKey, Cyclo)>;

/// Evaluates the free correlation map of a model, caching the value of
/// each monomial tensor.
pub struct Correlator<'m> {
    model: &'m Model,
    cache: Mutex<HashMap<Vec<Vec<u16>>, Arc<FormTerms>>>,
}

impl<'m> Correlator<'m> {
    pub fn new(model: &'m Model) -> Correlator<'m> {
        Correlator { model, cache: Mutex::new(HashMap::new()) }
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    /// ⟨c⟩ on a ⟨g⟩-invariant chain.
    pub fn free_correlation(&self, c: &Chain) -> Result<Form, CorrelateError> {
        if !c.is_invariant(self.model) {
            return Err(CorrelateError::NotInvariant);
        }
        Ok(self.free_correlation_unchecked(c))
    }

    /// vacuum · σ_z tr_g of the contraction expansion of O₀ ⊗ dO₁ ⊗ … ⊗ dO_m.
    pub fn free_correlation_unchecked(&self, c: &Chain) -> Form {
        let m = self.model;
        let mut out = Form::zero(m.nvars(), c.wtrunc(), c.htrunc());
        let mut by_mono: HashMap<Vec<Vec<u16>>, Vec<(i32, i32, Cyclo)>> = HashMap::new();
        for (k, coef) in c.terms() {
            let t = tr_g_units(m, &k.slots);
            if t.is_zero() {
                continue;
            }
            let exps: Vec<Vec<u16>> = k.slots.iter().map(|s| s.exps.clone()).collect();
            by_mono.entry(exps).or_default().push((k.h, k.u, coef * &t));
        }
        let mut keys: Vec<_> = by_mono.keys().cloned().collect();
        keys.sort();
        for exps in keys {
            let base = self.correlate_monomials(&exps);
            for (h, u, c) in &by_mono[&exps] {
                for (fk, v) in base.iter() {
                    let key = FKey { exps: fk.exps.clone(), gm: fk.gm, h: fk.h + h, u: fk.u + u };
                    out.add_term(key, v * c);
                }
            }
        }
        out
    }

    /// Correlation of one monomial tensor (matrix part excluded).
    pub fn correlate_monomials(&self, exps: &[Vec<u16>]) -> Arc<FormTerms> {
        if let Some(v) = self.cache.lock().expect("correlator cache poisoned").get(exps) {
            return v.clone();
        }
        let v = Arc::new(self.compute_monomials(exps));
        self.cache.lock().expect("correlator cache poisoned").insert(exps.to_vec(), v.clone());
        v
    }

    fn compute_monomials(&self, exps: &[Vec<u16>]) -> FormTerms {
        let m = self.model;
        let split = 2 * m.k;
        let zparts: Vec<Vec<u16>> = exps.iter().map(|e| e[split..].to_vec()).collect();
        let (zc, zh) = self.tau1_monomials(&zparts);
        if zc.is_zero() {
            return Vec::new();
        }
        let yparts: Vec<Vec<u16>> = exps.iter().map(|e| e[..split].to_vec()).collect();
        let mut out: HashMap<FKey, Cyclo> = HashMap::new();
        for (fk, v) in self.tau0_monomials(&yparts) {
            let mut full = fk.exps.clone();
            full.resize(m.nvars(), 0);
            let key = FKey { exps: full, gm: fk.gm, h: fk.h + zh, u: 0 };
            let e = out.entry(key).or_insert_with(Cyclo::zero);
            *e += &(&v * &zc);
        }
        let mut v: FormTerms = out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// The z-factor: vacuum · σ_z of self-loops and z-lines taken in the
    /// order 1, 2, …, m, 0. Returns (coefficient, ħ-power).
    pub fn tau1_monomials(&self, zparts: &[Vec<u16>]) -> (Cyclo, i32) {
        let m = self.model;
        let nslots = zparts.len();
        let order: Vec<usize> = (1..nslots).chain(std::iter::once(0)).collect();
        let half = Cyclo::frac(1, 2);
        let mut total = m.vacuum_factor();
        let mut hpow = 0i32;
        for (j, p) in m.rotated_pairs() {
            let (a, b) = (p.a - 2 * m.k, p.b - 2 * m.k);
            let s = m.self_loop(j).clone();
            let mut ops = Vec::new();
            for sl in 0..nslots {
                ops.push(Op { sa: sl, va: a, sb: sl, vb: b, coef: s.clone(), edge: None });
            }
            for i in 0..nslots {
                for l in i + 1..nslots {
                    let (e, f) = (order[i], order[l]);
                    ops.push(Op { sa: e, va: a, sb: f, vb: b, coef: &s + &half, edge: None });
                    ops.push(Op { sa: e, va: b, sb: f, vb: a, coef: &s - &half, edge: None });
                }
            }
            let na: u32 = zparts.iter().map(|z| z[a] as u32).sum();
            let nb: u32 = zparts.iter().map(|z| z[b] as u32).sum();
            if na != nb {
                return (Cyclo::zero(), 0);
            }
            hpow += na as i32;
            let mut state: Vec<Vec<u16>> = zparts.to_vec();
            let mut acc = Cyclo::zero();
            full_contractions(&ops, 0, &mut state, Cyclo::one(), &mut acc, &[a, b]);
            total = &total * &acc;
            if total.is_zero() {
                return (Cyclo::zero(), 0);
            }
        }
        // any z outside the rotated pairs cannot occur; all were consumed above
        (total, hpow)
    }

    /// The y-factor: y-lines ħ(-ω^{ij})(d(t_α,t_β) - ½)∂_i^{(α)}∂_j^{(β)} for
    /// α < β, integrated over the simplex, then d on every slot but 0 and
    /// the product of the slots in order.
    pub fn tau0_monomials(&self, yparts: &[Vec<u16>]) -> FormTerms {
        let m = self.model;
        let nslots = yparts.len();
        let mut ops = Vec::new();
        for al in 0..nslots {
            for be in al + 1..nslots {
                for p in m.fixed_pairs() {
                    ops.push(Op { sa: al, va: p.a, sb: be, vb: p.b, coef: Cyclo::from_int(-1), edge: Some((al, be)) });
                    ops.push(Op { sa: al, va: p.b, sb: be, vb: p.a, coef: Cyclo::one(), edge: Some((al, be)) });
                }
            }
        }
        let mut results: HashMap<FKey, Cyclo> = HashMap::new();
        let mut state = yparts.to_vec();
        let mut edges = Vec::new();
        y_contractions(&ops, 0, &mut state, BigRational::one(), 0, &mut edges, &mut |st, coef, nops, edges| {
            let w = simplex::weight(nslots, edges);
            if w.is_zero() {
                return;
            }
            let c = coef * &w;
            for (fk, v) in slot_forms(st) {
                let key = FKey { exps: fk.exps, gm: fk.gm, h: nops as i32, u: 0 };
                let e = results.entry(key).or_insert_with(Cyclo::zero);
                *e += &Cyclo::from_rational(v * &c);
            }
        });
        let mut v: FormTerms = results.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// τ₁ on z-observables by the direct kernel expansion.
    pub fn tau1(&self, bs: &[Weyl]) -> Result<HbarSeries, CorrelateError> {
        let m = self.model;
        let split = 2 * m.k;
        for b in bs {
            if b.terms().any(|(mo, _)| mo.exps[..split].iter().any(|e| *e != 0)) {
                return Err(CorrelateError::WrongFactor("τ₁ factors must not contain y".into()));
            }
        }
        let trunc = bs.iter().map(|b| b.htrunc()).min().unwrap_or(m.hbar_trunc);
        let mut out = HbarSeries::zero(trunc);
        let mut combos: Vec<(Vec<Vec<u16>>, i32, Cyclo)> = vec![(Vec::new(), 0, Cyclo::one())];
        for b in bs {
            let mut next = Vec::new();
            for (e, h, c) in &combos {
                for (mo, v) in b.terms() {
                    let mut ee = e.clone();
                    ee.push(mo.exps[split..].to_vec());
                    next.push((ee, h + mo.h, c * v));
                }
            }
            combos = next;
        }
        for (e, h, c) in combos {
            let (v, hp) = self.tau1_monomials(&e);
            out.add_term(h + hp, &v * &c);
        }
        Ok(out)
    }

    /// T(f) = vacuum · σ_z(exp(ħ S ∂∂) f) on a z-observable.
    pub fn twisted_trace_t(&self, f: &Weyl) -> HbarSeries {
        let m = self.model;
        let mut out = HbarSeries::zero(f.htrunc());
        'terms: for (mo, c) in f.terms() {
            let mut coef = c * &m.vacuum_factor();
            let mut h = mo.h;
            for i in 0..2 * m.k {
                if mo.exps[i] != 0 {
                    continue 'terms;
                }
            }
            for (j, p) in m.rotated_pairs() {
                let (ea, eb) = (mo.exps[p.a], mo.exps[p.b]);
                if ea != eb {
                    continue 'terms;
                }
                // (S ∂_a∂_b)^s / s! on z_a^s z_b^s gives S^s s!
                let s = ea as u32;
                coef = &(&coef * &m.self_loop(j).pow(s)) * &Cyclo::from_rational(BigRational::from_integer(factorial(s)));
                h += s as i32;
            }
            out.add_term(h, coef);
        }
        out
    }

    /// T(b₀ ⋆̂ b_m ⋆̂ … ⋆̂ b₁).
    pub fn tau1_hat(&self, bs: &[Weyl]) -> Result<HbarSeries, CorrelateError> {
        let m = self.model;
        let mut acc = bs[0].clone();
        for b in bs[1..].iter().rev() {
            acc = acc.hat_star(m, b)?;
        }
        Ok(self.twisted_trace_t(&acc))
    }

    /// T(b₁ ⋆ … ⋆ b_m ⋆ b₀).
    pub fn tau1_prime(&self, bs: &[Weyl]) -> Result<HbarSeries, CorrelateError> {
        let m = self.model;
        let mut acc: Option<Weyl> = None;
        for b in bs[1..].iter().chain(std::iter::once(&bs[0])) {
            acc = Some(match acc {
                None => b.clone(),
                Some(a) => a.perp_star(m, b)?,
            });
        }
        Ok(self.twisted_trace_t(&acc.expect("nonempty tensor")))
    }
}

/// Sums over multiplicities of ops whose variables lie in `vars`, requiring
/// every such variable to be fully consumed.
fn full_contractions(ops: &[Op], i: usize, state: &mut Vec<Vec<u16>>, coef: Cyclo, acc: &mut Cyclo, vars: &[usize]) {
    if i == ops.len() {
        if state.iter().all(|s| vars.iter().all(|v| s[*v] == 0)) {
            *acc += &coef;
        }
        return;
    }
    let op = &ops[i];
    let (xa, xb) = (state[op.sa][op.va], state[op.sb][op.vb]);
    let smax = if op.sa == op.sb && op.va == op.vb { xa / 2 } else { xa.min(xb) };
    let mut c = coef.clone();
    for s in 0..=smax {
        if s > 0 {
            let f = falling_pair(state, op, s);
            c = &coef * &(&op.coef.pow(s as u32) * &Cyclo::from_rational(f));
        }
        if c.is_zero() && s > 0 {
            continue;
        }
        state[op.sa][op.va] -= s;
        state[op.sb][op.vb] -= s;
        full_contractions(ops, i + 1, state, c.clone(), acc, vars);
        state[op.sa][op.va] += s;
        state[op.sb][op.vb] += s;
    }
}

/// (1/s!) ∂_a^s ∂_b^s acting on the current exponents.
fn falling_pair(state: &[Vec<u16>], op: &Op, s: u16) -> BigRational {
    let fa = falling(state[op.sa][op.va], s);
    let fb = falling(state[op.sb][op.vb], s);
    BigRational::new((fa * fb).into(), factorial(s as u32))
}

#[allow(clippy::too_many_arguments)]
fn y_contractions(
    ops: &[Op],
    i: usize,
    state: &mut Vec<Vec<u16>>,
    coef: BigRational,
    nops: usize,
    edges: &mut Vec<(usize, usize)>,
    leaf: &mut dyn FnMut(&[Vec<u16>], &BigRational, usize, &[(usize, usize)]),
) {
    if i == ops.len() {
        leaf(state, &coef, nops, edges);
        return;
    }
    let op = &ops[i];
    let smax = state[op.sa][op.va].min(state[op.sb][op.vb]);
    let sign = op.coef.to_rational().expect("rational y-line coefficient");
    for s in 0..=smax {
        let mut c = coef.clone();
        if s > 0 {
            c *= falling_pair(state, op, s);
            for _ in 0..s {
                c *= &sign;
            }
        }
        state[op.sa][op.va] -= s;
        state[op.sb][op.vb] -= s;
        let e = op.edge.expect("y-line has an edge");
        for _ in 0..s {
            edges.push(e);
        }
        y_contractions(ops, i + 1, state, c, nops + s as usize, edges, leaf);
        for _ in 0..s {
            edges.pop();
        }
        state[op.sa][op.va] += s;
        state[op.sb][op.vb] += s;
    }
}

/// Slot 0 as a function, d of each later slot, multiplied in slot order.
fn slot_forms(st: &[Vec<u16>]) -> Vec<(FKey, BigRational)> {
    let nv = st[0].len();
    let mut acc: Vec<(Vec<u16>, u64, BigRational)> = vec![(st[0].clone(), 0, BigRational::one())];
    for s in &st[1..] {
        let mut next = Vec::new();
        for (e, gm, c) in &acc {
            for i in 0..nv {
                if s[i] == 0 {
                    continue;
                }
                let Some(sign) = wedge_sign(*gm, 1 << i) else { continue };
                let mut ne: Vec<u16> = e.iter().zip(s).map(|(a, b)| a + b).collect();
                ne[i] -= 1;
                let v = c * BigRational::from_integer(((s[i] as i64) * sign).into());
                next.push((ne, gm | (1 << i), v));
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    let mut merged: HashMap<(Vec<u16>, u64), BigRational> = HashMap::new();
    for (e, gm, c) in acc {
        *merged.entry((e, gm)).or_insert_with(BigRational::zero) += c;
    }
    merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((e, gm), c)| (FKey { exps: e, gm, h: 0, u: 0 }, c))
        .collect()
}
