use super::CorrelateError;
use crate::exactnum::{Cyclo, HbarSeries};
use crate::model::{CMatrix, Model};
use crate::weyl::{MatrixWeyl, Weyl};

/// An element f·Id + ħA of 𝔤 with f and the entries of A ⟨g⟩-invariant.
///
/// The split is canonical: f is the ħ⁰ part (which must be scalar) and ħA is
/// everything else.
#[derive(Clone, Debug)]
pub struct LieElement {
    value: MatrixWeyl,
    h_member: bool,
}

/// The four components of pr: 𝔤 → 𝔥.
#[derive(Clone, Debug)]
pub struct PrParts {
    /// y-quadratic part of f.
    pub p1: Weyl,
    /// z-quadratic part of f.
    pub p2: Weyl,
    /// A₁(0); the component is ħ times this matrix.
    pub p3: CMatrix,
    /// f(0) + Σ_{i>1} ħ^i tr(A_i(0))/r.
    pub p4: HbarSeries,
}

impl LieElement {
    pub fn new(m: &Model, value: MatrixWeyl) -> Result<LieElement, CorrelateError> {
        if value.rank() != m.r {
            return Err(CorrelateError::InvalidLie(format!("rank {} does not match model rank {}", value.rank(), m.r)));
        }
        for (_, _, w) in value.entries() {
            if w.lowest_h().map(|h| h < 0).unwrap_or(false) {
                return Err(CorrelateError::InvalidLie("negative ħ-power".into()));
            }
        }
        let f0 = value.entry(0, 0).hbar_part(0);
        for (i, j, w) in value.entries() {
            let p = w.hbar_part(0);
            let ok = if i == j { p == f0 } else { p.is_zero() };
            if !ok {
                return Err(CorrelateError::InvalidLie("ħ⁰ part is not a scalar multiple of Id".into()));
            }
        }
        if !value.is_invariant(m) {
            return Err(CorrelateError::InvalidLie("not ⟨g⟩-invariant".into()));
        }
        let mut x = LieElement { value, h_member: false };
        x.h_member = x.pr_element(m).eq_upto(&x.value);
        Ok(x)
    }

    pub fn value(&self) -> &MatrixWeyl {
        &self.value
    }

    /// True iff the element lies in 𝔥 = sp_{2k} ⊕ sp^g ⊕ ħgl_r ⊕ ℂ ⊕ ⊕_{i>1} ħ^iℂ.
    pub fn h_member(&self) -> bool {
        self.h_member
    }

    /// f, the ħ⁰ scalar part.
    pub fn scalar_part(&self) -> Weyl {
        self.value.entry(0, 0).hbar_part(0)
    }

    /// A, with ħA = value - f·Id.
    pub fn matrix_part(&self, m: &Model) -> MatrixWeyl {
        let f = self.scalar_part();
        let fid = MatrixWeyl::scalar(m, &f.with_trunc(self.value.entry(0, 0).wtrunc(), self.value.entry(0, 0).htrunc()));
        self.value.sub(&fid).shift_h(-1)
    }

    pub fn pr(&self, m: &Model) -> PrParts {
        pr_parts(m, &self.value)
    }

    /// pr(x) as an element of 𝔤.
    pub fn pr_element(&self, m: &Model) -> MatrixWeyl {
        pr_to_element(m, &self.pr(m), self.value.entry(0, 0).wtrunc(), self.value.entry(0, 0).htrunc())
    }

    /// x - pr(x).
    pub fn gamma_hat(&self, m: &Model) -> MatrixWeyl {
        self.value.sub(&self.pr_element(m))
    }

    /// [x, y] = (x⋆y - y⋆x)/ħ.
    pub fn bracket(&self, m: &Model, o: &LieElement) -> Result<LieElement, CorrelateError> {
        LieElement::new(m, self.value.bracket(m, &o.value))
    }
}

pub fn pr_to_element(m: &Model, p: &PrParts, wt: i64, ht: i64) -> MatrixWeyl {
    let mut f = p.p1.add(&p.p2).with_trunc(wt, ht);
    let zero = vec![0u16; m.nvars()];
    for (h, c) in p.p4.terms() {
        f.add_term(zero.clone(), h, c.clone());
    }
    let mut out = MatrixWeyl::scalar(m, &f);
    for i in 0..m.r {
        for j in 0..m.r {
            if !p.p3[i][j].is_zero() {
                let e = out.entry(i, j).add(&Weyl::monomial(m, zero.clone(), 1, p.p3[i][j].clone()).with_trunc(wt, ht));
                *out.entry_mut(i, j) = e;
            }
        }
    }
    out
}

/// The components of pr read off an arbitrary matrix value.
pub fn pr_parts(m: &Model, value: &MatrixWeyl) -> PrParts {
    let f = value.entry(0, 0).hbar_part(0);
    let quad = f.degree_part(2);
    let mut p1 = Weyl::zero(m.nvars(), crate::exactnum::EXACT, crate::exactnum::EXACT);
    let mut p2 = p1.clone();
    for (mo, c) in quad.terms() {
        let ydeg: u16 = mo.exps[..2 * m.k].iter().sum();
        if ydeg == 2 {
            p1.add_mono(mo.clone(), c.clone());
        } else if ydeg == 0 {
            p2.add_mono(mo.clone(), c.clone());
        }
    }
    let zero = vec![0u16; m.nvars()];
    let p3: CMatrix = (0..m.r).map(|i| (0..m.r).map(|j| value.entry(i, j).coeff(&zero, 1)).collect()).collect();
    let mut p4 = HbarSeries::zero(value.entry(0, 0).htrunc());
    p4.add_term(0, f.coeff(&zero, 0));
    let maxh = value.entries().flat_map(|(_, _, w)| w.terms().map(|(mo, _)| mo.h)).max().unwrap_or(0);
    let inv_r = Cyclo::frac(1, m.r as i64);
    for h in 2..=maxh {
        let mut t = Cyclo::zero();
        for i in 0..m.r {
            t += &value.entry(i, i).coeff(&zero, h);
        }
        p4.add_term(h, &t * &inv_r);
    }
    PrParts { p1, p2, p3, p4 }
}
