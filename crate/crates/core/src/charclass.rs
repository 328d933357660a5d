//! Curvature of the projection pr: 𝔤 → 𝔥, the characteristic classes built
//! from it, and the one-loop comparison against the universal trace.
//!
//! Cochains are only ever evaluated on a fixed finite list of arguments
//! ξ₀, …, ξ_{J-1}. A cochain is stored as its values on every subset of the
//! arguments (a bit mask, arguments taken in increasing order), which makes
//! the wedge product a sum over splittings of the mask with shuffle signs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chains::Chain;
use crate::correlate::{pr_parts, CorrelateError, Correlator};
use crate::exactnum::{Cyclo, HbarSeries, ScalarK};
use crate::model::{identity, mat_mul, CMatrix, Model};
use crate::simplex::wheel_coefficient;
use crate::weyl::{MatrixWeyl, Weyl};

#[derive(Debug, Error)]
pub enum CharClassError {
    #[error("characteristic classes need an even number of arguments, got {0}")]
    OddDegree(usize),
    #[error("at most {max} arguments are supported, got {got}")]
    TooManyArguments { max: usize, got: usize },
    #[error(transparent)]
    Correlate(#[from] CorrelateError),
}

const MAX_ARGS: usize = 8;

/// R(x, y) = [pr x, pr y] - pr[x, y], split by summand of 𝔥.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// y-quadratic, in sp_{2k}.
    pub r1: Weyl,
    /// z-quadratic, in sp^g_{2n-2k}.
    pub r2: Weyl,
    /// R₃ = ħ·r3.
    pub r3: CMatrix,
    /// Central part.
    pub r4: HbarSeries,
}

fn weyl_bracket(m: &Model, a: &Weyl, b: &Weyl) -> Weyl {
    a.moyal(m, b).sub(&b.moyal(m, a)).shift_h(-1)
}

fn mat_sub(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

fn mat_add(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

fn mat_scale(a: &CMatrix, c: &Cyclo) -> CMatrix {
    a.iter().map(|row| row.iter().map(|x| x * c).collect()).collect()
}

fn mat_trace(a: &CMatrix) -> Cyclo {
    let mut t = Cyclo::zero();
    for (i, row) in a.iter().enumerate() {
        t += &row[i];
    }
    t
}

fn zero_matrix(r: usize) -> CMatrix {
    vec![vec![Cyclo::zero(); r]; r]
}

pub fn curvature(m: &Model, x: &MatrixWeyl, y: &MatrixWeyl) -> Curvature {
    let px = pr_parts(m, x);
    let py = pr_parts(m, y);
    let pxy = pr_parts(m, &x.bracket(m, y));
    let r1 = weyl_bracket(m, &px.p1, &py.p1).sub(&pxy.p1);
    let r2 = weyl_bracket(m, &px.p2, &py.p2).sub(&pxy.p2);
    let comm = mat_sub(&mat_mul(&px.p3, &py.p3), &mat_mul(&py.p3, &px.p3));
    let r3 = mat_sub(&comm, &pxy.p3);
    let r4 = -&pxy.p4;
    Curvature { r1, r2, r3, r4 }
}

/// ω̂₀(x, y) = ω^{ij}∂_i f(0)∂_j g(0) on the scalar parts.
pub fn omega0(m: &Model, x: &MatrixWeyl, y: &MatrixWeyl) -> Cyclo {
    let f = x.entry(0, 0).hbar_part(0);
    let g = y.entry(0, 0).hbar_part(0);
    let mut out = Cyclo::zero();
    for p in m.fixed_pairs() {
        let e = |i: usize| {
            let mut v = vec![0u16; m.nvars()];
            v[i] = 1;
            v
        };
        let fa = f.coeff(&e(p.a), 0);
        let fb = f.coeff(&e(p.b), 0);
        let ga = g.coeff(&e(p.a), 0);
        let gb = g.coeff(&e(p.b), 0);
        out += &(&(&fa * &gb) - &(&fb * &ga));
    }
    out
}

/// Matrix of v ↦ [w, v] on the linear y-functions, for w ∈ sp_{2k}:
/// entry (i, j) is the coefficient of y^i in [w, y^j].
pub fn ad_matrix(m: &Model, w: &Weyl) -> CMatrix {
    let k2 = 2 * m.k;
    let mut out = zero_matrix(k2);
    for j in 0..k2 {
        let b = weyl_bracket(m, w, &Weyl::var(m, j));
        for (i, row) in out.iter_mut().enumerate() {
            let mut e = vec![0u16; m.nvars()];
            e[i] = 1;
            row[j] = b.coeff(&e, 0);
        }
    }
    out
}

/// Sign of the shuffle putting the bits of `t` before those of `s \ t`.
fn split_sign(t: u32, rest: u32) -> i64 {
    let mut inv = 0u32;
    let mut r = rest;
    while r != 0 {
        let b = r.trailing_zeros();
        inv += (t >> (b + 1)).count_ones();
        r &= r - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn submasks(s: u32) -> impl Iterator<Item = u32> {
    let mut t = s;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = t;
        if t == 0 {
            done = true;
        } else {
            t = (t - 1) & s;
        }
        Some(cur)
    })
}

/// A scalar cochain on the fixed argument list, stored per subset.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub nargs: usize,
    pub values: BTreeMap<u32, ScalarK>,
}

impl Cochain {
    pub fn zero(nargs: usize) -> Cochain {
        Cochain { nargs, values: BTreeMap::new() }
    }

    pub fn unit(nargs: usize) -> Cochain {
        let mut c = Cochain::zero(nargs);
        c.values.insert(0, ScalarK::constant(Cyclo::one()));
        c
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.nargs) - 1
    }

    pub fn get(&self, s: u32) -> ScalarK {
        self.values.get(&s).cloned().unwrap_or_else(ScalarK::exact_zero)
    }

    pub fn set(&mut self, s: u32, v: ScalarK) {
        if v.is_zero() {
            self.values.remove(&s);
        } else {
            self.values.insert(s, v);
        }
    }

    pub fn full(&self) -> ScalarK {
        self.get(self.full_mask())
    }

    pub fn add(&self, o: &Cochain) -> Cochain {
        let mut out = self.clone();
        for (s, v) in &o.values {
            let nv = &out.get(*s) + v;
            out.set(*s, nv);
        }
        out
    }

    pub fn scale(&self, c: &ScalarK) -> Cochain {
        let mut out = Cochain::zero(self.nargs);
        for (s, v) in &self.values {
            out.set(*s, v * c);
        }
        out
    }

    /// Wedge product of even cochains.
    pub fn wedge(&self, o: &Cochain) -> Cochain {
        let mut out = Cochain::zero(self.nargs);
        let full = self.full_mask();
        for s in submasks(full) {
            let mut acc = ScalarK::exact_zero();
            for t in submasks(s) {
                let (Some(a), Some(b)) = (self.values.get(&t), o.values.get(&(s & !t))) else { continue };
                let p = a * b;
                acc = if split_sign(t, s & !t) > 0 { &acc + &p } else { &acc - &p };
            }
            out.set(s, acc);
        }
        out
    }

    /// exp of a cochain with vanishing degree-0 part.
    pub fn exp(&self) -> Cochain {
        debug_assert!(self.values.get(&0).is_none(), "exp needs a vanishing constant term");
        let mut out = Cochain::unit(self.nargs);
        let mut pow = Cochain::unit(self.nargs);
        for n in 1..=self.nargs {
            pow = pow.wedge(self).scale(&ScalarK::constant(Cyclo::frac(1, n as i64)));
            if pow.values.is_empty() {
                break;
            }
            out = out.add(&pow);
        }
        out
    }

    /// A ↦ A_u = Σ u^{-p/2} A_p.
    pub fn u_graded(&self) -> Cochain {
        let mut out = Cochain::zero(self.nargs);
        for (s, v) in &self.values {
            out.set(*s, v.shift(0, -((s.count_ones() / 2) as i32)));
        }
        out
    }
}

/// A matrix-valued cochain, values per subset.
#[derive(Clone, Debug)]
struct MatCochain {
    nargs: usize,
    r: usize,
    values: BTreeMap<u32, CMatrix>,
}

impl MatCochain {
    fn wedge(&self, o: &MatCochain) -> MatCochain {
        let mut values = BTreeMap::new();
        let full = (1u32 << self.nargs) - 1;
        for s in submasks(full) {
            let mut acc = zero_matrix(self.r);
            let mut any = false;
            for t in submasks(s) {
                let (Some(a), Some(b)) = (self.values.get(&t), o.values.get(&(s & !t))) else { continue };
                let p = mat_scale(&mat_mul(a, b), &Cyclo::from_int(split_sign(t, s & !t)));
                acc = mat_add(&acc, &p);
                any = true;
            }
            if any {
                values.insert(s, acc);
            }
        }
        MatCochain { nargs: self.nargs, r: self.r, values }
    }

    fn unit(nargs: usize, r: usize) -> MatCochain {
        let mut values = BTreeMap::new();
        values.insert(0, identity(r));
        MatCochain { nargs, r, values }
    }

    fn trace_with(&self, e: &CMatrix) -> Cochain {
        let mut out = Cochain::zero(self.nargs);
        for (s, v) in &self.values {
            out.set(*s, ScalarK::constant(mat_trace(&mat_mul(e, v))));
        }
        out
    }
}

fn pairs(nargs: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..nargs).flat_map(move |i| (i + 1..nargs).map(move |j| (i, j)))
}

fn check_args(args: &[MatrixWeyl]) -> Result<(), CharClassError> {
    if args.len() % 2 != 0 {
        return Err(CharClassError::OddDegree(args.len()));
    }
    if args.len() > MAX_ARGS {
        return Err(CharClassError::TooManyArguments { max: MAX_ARGS, got: args.len() });
    }
    Ok(())
}

/// All curvatures R(ξ_i, ξ_j), i < j.
pub fn curvatures(m: &Model, args: &[MatrixWeyl]) -> BTreeMap<(usize, usize), Curvature> {
    pairs(args.len()).map(|(i, j)| ((i, j), curvature(m, &args[i], &args[j]))).collect()
}

fn pair_mask(i: usize, j: usize) -> u32 {
    (1 << i) | (1 << j)
}

/// Â(sp_{2k}) = exp(½ Σ_j C(2j) tr(X^{2j})), X the matrix of R₁.
pub fn a_hat_eval(m: &Model, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    check_args(args)?;
    let n = args.len();
    let curv = curvatures(m, args);
    let k2 = 2 * m.k;
    let mut x = MatCochain { nargs: n, r: k2, values: BTreeMap::new() };
    for ((i, j), c) in &curv {
        x.values.insert(pair_mask(*i, *j), ad_matrix(m, &c.r1));
    }
    let mut log = Cochain::zero(n);
    let mut pow = MatCochain::unit(n, k2);
    let id = identity(k2);
    for p in 1..=n / 2 {
        pow = pow.wedge(&x);
        if p % 2 == 0 {
            let c = wheel_coefficient(p);
            let coef = ScalarK::constant(Cyclo::from_rational(c / num_rational::BigRational::from_integer(2.into())));
            log = log.add(&pow.trace_with(&id).scale(&coef));
        }
    }
    Ok(log.exp())
}

fn ch_star_generic(
    corr: &Correlator,
    args: &[MatrixWeyl],
    sign: i64,
    tau: impl Fn(&[Weyl]) -> Result<HbarSeries, CorrelateError>,
) -> Result<Cochain, CharClassError> {
    check_args(args)?;
    let m = corr.model();
    let n = args.len();
    let curv = curvatures(m, args);
    let q: BTreeMap<(usize, usize), Weyl> =
        curv.iter().map(|(ij, c)| (*ij, c.r2.scale(&Cyclo::from_int(sign)).shift_h(-1))).collect();
    let mut out = Cochain::zero(n);
    let full = (1u32 << n) - 1;
    for s in submasks(full) {
        if s.count_ones() % 2 != 0 {
            continue;
        }
        let mm = (s.count_ones() / 2) as usize;
        let mut acc = HbarSeries::exact_zero();
        let mut seqs: Vec<(i64, u32, Vec<Weyl>)> = vec![(1, s, vec![Weyl::one(m)])];
        for _ in 0..mm {
            let mut next = Vec::new();
            for (sg, rest, fs) in seqs {
                for (i, j) in pairs(n) {
                    let pm = pair_mask(i, j);
                    if rest & pm != pm {
                        continue;
                    }
                    let mut f2 = fs.clone();
                    f2.push(q[&(i, j)].clone());
                    next.push((sg * split_sign(pm, rest & !pm), rest & !pm, f2));
                }
            }
            seqs = next;
        }
        for (sg, _, fs) in seqs {
            let v = tau(&fs)?;
            acc = &acc + &v.scale(&Cyclo::from_int(sg));
        }
        let fact: i64 = (1..=mm as i64).product();
        out.set(s, ScalarK::from_series(acc.scale(&Cyclo::frac(1, fact)), 0));
    }
    Ok(out)
}

/// Ch⋆_g = Σ_m (1/m!) τ₁(1 ⊗ (-R₂/ħ)^{⊗m}).
pub fn ch_g_star_eval(corr: &Correlator, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    ch_star_generic(corr, args, -1, |fs| corr.tau1(fs))
}

/// The same class through τ₁′ and +R₂/ħ.
pub fn ch_g_star_prime_eval(corr: &Correlator, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    ch_star_generic(corr, args, 1, |fs| corr.tau1_prime(fs))
}

/// Ch_g(gl_r) = tr(g·e^{-R₃/ħ}).
pub fn ch_g_glr_eval(m: &Model, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    check_args(args)?;
    let n = args.len();
    let curv = curvatures(m, args);
    let mut x = MatCochain { nargs: n, r: m.r, values: BTreeMap::new() };
    for ((i, j), c) in &curv {
        x.values.insert(pair_mask(*i, *j), mat_scale(&c.r3, &Cyclo::from_int(-1)));
    }
    let mut total = MatCochain::unit(n, m.r);
    let mut pow = MatCochain::unit(n, m.r);
    for p in 1..=n / 2 {
        pow = pow.wedge(&x);
        let inv = Cyclo::frac(1, (1..=p as i64).product());
        for (s, v) in &pow.values {
            let cur = total.values.remove(s).unwrap_or_else(|| zero_matrix(m.r));
            total.values.insert(*s, mat_add(&cur, &mat_scale(v, &inv)));
        }
    }
    Ok(total.trace_with(&m.e_twist))
}

/// ω̂₀ as a 2-cochain.
pub fn omega0_eval(m: &Model, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    check_args(args)?;
    let mut out = Cochain::zero(args.len());
    for (i, j) in pairs(args.len()) {
        out.set(pair_mask(i, j), ScalarK::constant(omega0(m, &args[i], &args[j])));
    }
    Ok(out)
}

/// R₄/(uħ) as a 2-cochain.
fn r4_over_u_hbar(m: &Model, args: &[MatrixWeyl]) -> Cochain {
    let mut out = Cochain::zero(args.len());
    for ((i, j), c) in curvatures(m, args) {
        out.set(pair_mask(i, j), ScalarK::from_series(c.r4.shift(-1), -1));
    }
    out
}

/// u^k (Â_u · Ch⋆_u · Ch_u) as a cochain.
pub fn class_product(corr: &Correlator, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    let m = corr.model();
    let a = a_hat_eval(m, args)?.u_graded();
    let s = ch_g_star_eval(corr, args)?.u_graded();
    let c = ch_g_glr_eval(m, args)?.u_graded();
    Ok(a.wedge(&s).wedge(&c).scale(&ScalarK::monomial(Cyclo::one(), 0, m.k as i32)))
}

/// u^k e^{-R₄/uħ}(Â_u · Ch⋆_u · Ch_u) on the full argument list.
pub fn oneloop_rhs(corr: &Correlator, args: &[MatrixWeyl]) -> Result<ScalarK, CharClassError> {
    let m = corr.model();
    let e = r4_over_u_hbar(m, args).scale(&ScalarK::constant(Cyclo::from_int(-1))).exp();
    Ok(e.wedge(&class_product(corr, args)?).full())
}

/// The universal trace of the chain 1 with γ̂ = ξ - pr(ξ) inserted, on
/// every subset of the arguments.
pub fn trace_cochain(corr: &Correlator, args: &[MatrixWeyl]) -> Result<Cochain, CharClassError> {
    check_args(args)?;
    let m = corr.model();
    let gam: Vec<MatrixWeyl> = args
        .iter()
        .map(|x| {
            let p = crate::correlate::pr_to_element(m, &pr_parts(m, x), x.entry(0, 0).wtrunc(), x.entry(0, 0).htrunc());
            x.sub(&p)
        })
        .collect();
    let one = Chain::from_tensor(m, &[MatrixWeyl::identity(m)], &Cyclo::one()).map_err(CorrelateError::from)?;
    let mut out = Cochain::zero(args.len());
    for s in submasks(out.full_mask()) {
        if s.count_ones() % 2 != 0 {
            continue;
        }
        let sub: Vec<MatrixWeyl> = (0..args.len()).filter(|i| s & (1 << i) != 0).map(|i| gam[i].clone()).collect();
        out.set(s, corr.universal_trace_raw(&one, &sub)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct OneLoopReport {
    /// Tr̂_g(1) on the full argument list.
    pub lhs: ScalarK,
    /// u^k e^{-R₄/uħ}(Â·Ch⋆·Ch)_u on the full argument list.
    pub rhs: ScalarK,
    /// e^{R₄/uħ}Tr̂_g(1) - u^k(Â·Ch⋆·Ch)_u, which must be O(ħ).
    pub defect: ScalarK,
    pub pass: bool,
}

/// Compares both sides of the one-loop formula: the defect must contain
/// only strictly positive powers of ħ.
pub fn oneloop_compare(corr: &Correlator, args: &[MatrixWeyl]) -> Result<OneLoopReport, CharClassError> {
    let m = corr.model();
    let lhs_c = trace_cochain(corr, args)?;
    let rhs = oneloop_rhs(corr, args)?;
    let e = r4_over_u_hbar(m, args).exp();
    let defect = &e.wedge(&lhs_c).full() - &class_product(corr, args)?.full();
    let pass = defect.iter_terms().all(|(_, h, c)| h >= 1 || c.is_zero());
    Ok(OneLoopReport { lhs: lhs_c.full(), rhs, defect, pass })
}
