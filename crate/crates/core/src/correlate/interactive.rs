use super::{CorrelateError, Correlator, LieElement};
use crate::chains::{shuffle, CKey, Chain, Slot};
use crate::exactnum::{Cyclo, ScalarK, EXACT};
use crate::forms::Form;
use crate::weyl::MatrixWeyl;

/// All permutations of 0..n with their signs.
pub fn signed_permutations(n: usize) -> Vec<(i64, Vec<usize>)> {
    fn rec(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in rec(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    rec(n)
        .into_iter()
        .map(|p| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (if inv % 2 == 0 { 1 } else { -1 }, p)
        })
        .collect()
}

#[derive(Clone)]
enum Entry {
    Fixed(Slot),
    Arg(usize),
}

fn expand(mw: &MatrixWeyl) -> Vec<(Slot, i32, Cyclo)> {
    let mut out = Vec::new();
    for (i, j, w) in mw.entries() {
        for (mo, c) in w.terms() {
            out.push((Slot { row: i as u8, col: j as u8, exps: mo.exps.clone() }, mo.h, c.clone()));
        }
    }
    out
}

impl<'m> Correlator<'m> {
    /// The chain Σ_σ sign(σ) (-1)^{j(j-1)/2} Σ_shuffles ± a₀ ⊗ (a₁…a_m ш ξ_σ),
    /// arguments inserted undivided.
    pub fn insert_arguments(&self, c: &Chain, args: &[MatrixWeyl]) -> Chain {
        let m = self.model();
        let j = args.len();
        let expanded: Vec<Vec<(Slot, i32, Cyclo)>> = args.iter().map(expand).collect();
        let mut wt = c.wtrunc();
        let mut ht = c.htrunc();
        for a in args {
            for (_, _, w) in a.entries() {
                wt = wt.min(w.wtrunc());
                ht = ht.min(w.htrunc());
            }
        }
        let mut out = Chain::zero(m.nvars(), m.r, wt.min(EXACT), ht.min(EXACT));
        let base_sign: i64 = if (j * j.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 };
        for (psign, perm) in signed_permutations(j) {
            let argseq: Vec<Entry> = perm.iter().map(|&i| Entry::Arg(i)).collect();
            for (k, coef) in c.terms() {
                let fixed: Vec<Entry> = k.slots[1..].iter().cloned().map(Entry::Fixed).collect();
                for (ssign, seq) in shuffle(&fixed, &argseq, true) {
                    let sign = base_sign * psign * ssign;
                    // expand the argument entries
                    let mut partial: Vec<(Vec<Slot>, i32, Cyclo)> =
                        vec![(vec![k.slots[0].clone()], k.h, coef.scale_int(sign))];
                    for e in &seq {
                        let mut next = Vec::new();
                        for (slots, h, cc) in &partial {
                            match e {
                                Entry::Fixed(s) => {
                                    let mut sl = slots.clone();
                                    sl.push(s.clone());
                                    next.push((sl, *h, cc.clone()));
                                }
                                Entry::Arg(i) => {
                                    for (s, hh, v) in &expanded[*i] {
                                        let mut sl = slots.clone();
                                        sl.push(s.clone());
                                        next.push((sl, h + hh, cc * v));
                                    }
                                }
                            }
                        }
                        partial = next;
                    }
                    for (slots, h, cc) in partial {
                        out.add_term(CKey { slots, h, u: k.u }, cc);
                    }
                }
            }
        }
        out
    }

    /// Degree-j component of ⟨c ×_sh (Θ̂/ħ)^{⊗j}⟩ evaluated on the arguments.
    pub fn interactive_correlation(&self, c: &Chain, args: &[LieElement]) -> Result<Form, CorrelateError> {
        if !c.is_invariant(self.model()) {
            return Err(CorrelateError::NotInvariant);
        }
        let vals: Vec<MatrixWeyl> = args.iter().map(|a| a.value().clone()).collect();
        Ok(self.interactive_raw(c, &vals))
    }

    /// As interactive_correlation, on arbitrary invariant matrix arguments.
    pub fn interactive_raw(&self, c: &Chain, args: &[MatrixWeyl]) -> Form {
        let inserted = self.insert_arguments(c, args);
        self.free_correlation_unchecked(&inserted).shift(-(args.len() as i32), 0)
    }

    /// Tr̂_g = ∫_BV ∘ ⟨−⟩_int.
    pub fn universal_trace(&self, c: &Chain, args: &[LieElement]) -> Result<ScalarK, CorrelateError> {
        let f = self.interactive_correlation(c, args)?;
        Ok(f.berezin(self.model())?)
    }

    pub fn universal_trace_raw(&self, c: &Chain, args: &[MatrixWeyl]) -> Result<ScalarK, CorrelateError> {
        Ok(self.interactive_raw(c, args).berezin(self.model())?)
    }
}
