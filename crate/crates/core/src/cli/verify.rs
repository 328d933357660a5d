//! Verification suites: each identity is checked exactly on fixed examples
//! and seeded random corpora.

use rand::Rng;
use serde::Serialize;

use crate::chains::{tr_g, Chain};
use crate::charclass::{ch_g_star_eval, ch_g_star_prime_eval, curvature, oneloop_compare};
use crate::corpus::Corpus;
use crate::correlate::{Correlator, LieElement};
use crate::exactnum::{Cyclo, HbarSeries, ScalarK};
use crate::model::{mat_inv, mat_mul, CMatrix, Model};
use crate::simplex::{weight, wheel_closed_form, wheel_coefficient};
use crate::weyl::{MatrixWeyl, Weyl};

pub const SUITES: [&str; 7] = ["arith", "chains", "intertwine", "trace", "wheels", "oneloop", "all"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub corpus: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &str, corpus: impl Into<String>) -> Check {
        Check { name: name.to_string(), corpus: corpus.into(), pass: true, detail: String::new(), witness: None }
    }

    fn fail(&mut self, witness: impl FnOnce() -> String) {
        if self.pass {
            self.witness = Some(witness());
        }
        self.pass = false;
    }

    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.fail(witness);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.seed);
        for c in &self.checks {
            out.push_str(&format!("  [{}] {} :: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.corpus));
            if !c.detail.is_empty() {
                out.push_str(&format!(" :: {}", c.detail));
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                out.push_str(&format!("      witness: {w}\n"));
            }
        }
        out.push_str(if self.pass() { "result: pass\n" } else { "result: FAIL\n" });
        out
    }
}

fn diag(vals: &[i64]) -> CMatrix {
    let r = vals.len();
    (0..r).map(|i| (0..r).map(|j| if i == j { Cyclo::from_int(vals[i]) } else { Cyclo::zero() }).collect()).collect()
}

/// Order-3 matrix [[0,-1],[1,-1]].
fn rot3() -> CMatrix {
    vec![vec![Cyclo::zero(), Cyclo::from_int(-1)], vec![Cyclo::one(), Cyclo::from_int(-1)]]
}

/// (n, k, N) ∈ {(1,0,2), (1,1,1), (2,1,2), (2,1,3)} with r ∈ {1, 2}; the
/// rank-2 models carry a nontrivial twist whenever N > 1.
pub fn reference_models(hbar_trunc: i64, weight_trunc: i64) -> Vec<Model> {
    let specs: [(usize, usize, u32, &[i64]); 4] = [(1, 0, 2, &[1]), (1, 1, 1, &[]), (2, 1, 2, &[1]), (2, 1, 3, &[1])];
    let mut out = Vec::new();
    for (n, k, order, perp) in specs {
        for r in [1usize, 2] {
            let e = if r == 2 {
                match order {
                    2 => Some(diag(&[1, -1])),
                    3 => Some(rot3()),
                    _ => None,
                }
            } else {
                None
            };
            let m = Model::build(n, k, r, order, perp, e).expect("reference model");
            out.push(m.with_truncation(hbar_trunc, weight_trunc));
        }
    }
    out
}

pub fn model_label(m: &Model) -> String {
    format!("(n,k,N,r)=({},{},{},{}){}", m.n, m.k, m.order, m.r, if m.twisted { " twisted" } else { "" })
}

fn labels(ms: &[Model]) -> String {
    ms.iter().map(model_label).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------- arith

pub fn cyclo_axioms(seed: u64, samples: usize) -> Vec<Check> {
    let orders = [1u32, 2, 3, 4, 5, 6, 8, 12];
    let mut cp = Corpus::new(seed);
    let mut ring = Check::new("cyclotomic ring axioms", format!("{samples} triples for N in {orders:?}"));
    let mut inv = Check::new("cyclotomic inverse is two-sided", format!("{samples} nonzero elements for N in {orders:?}"));
    for &n in &orders {
        for _ in 0..samples {
            let a = cp.cyclo(n, 3);
            let b = cp.cyclo(n, 3);
            let c = cp.cyclo(n, 3);
            let ok = &(&a * &b) * &c == &a * &(&b * &c)
                && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
                && &a * &b == &b * &a
                && &(&a + &b) + &c == &a + &(&b + &c);
            ring.expect(ok, || format!("N={n}: a={a}, b={b}, c={c}"));
            if !a.is_zero() {
                let ai = a.inv().expect("nonzero");
                inv.expect((&a * &ai).is_one() && (&ai * &a).is_one(), || format!("N={n}: a={a}"));
            }
        }
    }
    vec![ring, inv]
}

pub fn series_axioms(seed: u64, samples: usize) -> Vec<Check> {
    let mut cp = Corpus::new(seed);
    let mut ring = Check::new("ħ-series ring axioms at shared truncation", format!("{samples} triples, N=3"));
    let mut mono = Check::new("truncation is monotone", format!("{samples} products, T=3 vs T=6"));
    for _ in 0..samples {
        let mk = |cp: &mut Corpus, t: i64| {
            let lo: i32 = cp.rng().gen_range(-1..=1);
            HbarSeries::from_terms((lo..lo + 4).map(|e| (e, cp.cyclo(3, 2))), t)
        };
        let a = mk(&mut cp, 4);
        let b = mk(&mut cp, 5);
        let c = mk(&mut cp, 3);
        let ok = (&(&a * &b) * &c).eq_upto(&(&a * &(&b * &c)))
            && (&a * &(&b + &c)).eq_upto(&(&(&a * &b) + &(&a * &c)))
            && (&a * &b).eq_upto(&(&b * &a));
        ring.expect(ok, || format!("a={a}, b={b}, c={c}"));
        let lo = (&a.truncated(3) * &b.truncated(3)).truncated(3);
        let hi = (&a * &b).truncated(3);
        mono.expect(lo.eq_upto(&hi), || format!("a={a}, b={b}"));
    }
    vec![ring, mono]
}

pub fn weyl_properties(seed: u64, samples: usize) -> Vec<Check> {
    let models = reference_models(3, 6);
    let mut cp = Corpus::new(seed);
    let corpus = format!("{samples} triples per model over {}", labels(&models));
    let mut assoc = Check::new("Moyal associativity", corpus.clone());
    let mut auto = Check::new("g acts by algebra automorphisms", corpus.clone());
    let mut hat = Check::new("hat and perp products are associative", corpus.clone());
    let mut proj = Check::new("invariant projection is idempotent and multiplicative on invariants", corpus);
    for m in &models {
        for _ in 0..samples {
            let a = cp.weyl(m, 3, 1, 3);
            let b = cp.weyl(m, 3, 1, 3);
            let c = cp.weyl(m, 2, 1, 2);
            let l = a.moyal(m, &b).moyal(m, &c);
            let r = a.moyal(m, &b.moyal(m, &c));
            assoc.expect(l.eq_upto(&r), || format!("{}: a={}, b={}, c={}", model_label(m), a.render(m), b.render(m), c.render(m)));
            let ga = a.g_act(m).moyal(m, &b.g_act(m));
            auto.expect(a.moyal(m, &b).g_act(m).eq_upto(&ga), || format!("{}: a={}, b={}", model_label(m), a.render(m), b.render(m)));
            let pa = a.invariant_project(m);
            let pb = b.invariant_project(m);
            let ok = pa.invariant_project(m) == pa && pa.moyal(m, &pb).invariant_project(m).eq_upto(&pa.moyal(m, &pb));
            proj.expect(ok, || format!("{}: a={}", model_label(m), a.render(m)));
            if m.n > m.k {
                let x = cp.z_weyl(m, 2, 2);
                let y = cp.z_weyl(m, 2, 2);
                let z = cp.z_weyl(m, 2, 2);
                let h1 = x.hat_star(m, &y).and_then(|xy| xy.hat_star(m, &z));
                let h2 = y.hat_star(m, &z).and_then(|yz| x.hat_star(m, &yz));
                let p1 = x.perp_star(m, &y).and_then(|xy| xy.perp_star(m, &z));
                let p2 = y.perp_star(m, &z).and_then(|yz| x.perp_star(m, &yz));
                let ok = matches!((&h1, &h2), (Ok(a), Ok(b)) if a.eq_upto(b))
                    && matches!((&p1, &p2), (Ok(a), Ok(b)) if a.eq_upto(b));
                hat.expect(ok, || format!("{}: x={}, y={}, z={}", model_label(m), x.render(m), y.render(m), z.render(m)));
            }
        }
    }
    vec![assoc, auto, hat, proj]
}

// ---------------------------------------------------------------- chains

pub fn chain_identities(seed: u64, samples: usize) -> Vec<Check> {
    let models = reference_models(3, 6);
    let mut cp = Corpus::new(seed);
    let corpus = format!("{samples} invariant chains (m ≤ 3) per model over {}", labels(&models));
    let mut bb = Check::new("b_g² = 0", corpus.clone());
    let mut cc = Check::new("B_g² = 0", corpus.clone());
    let mut bc = Check::new("b_g B_g + B_g b_g = 0", corpus.clone());
    let mut per = Check::new("(b_g + uB_g)² = 0 on u-extended chains", corpus.clone());
    let mut geq = Check::new("g commutes with b_g and B_g", corpus);
    for m in &models {
        for _ in 0..samples {
            let c = cp.invariant_chain(m, 3, 6, 1, 3);
            let b = c.b_g(m);
            let bigb = c.connes_b_unchecked(m);
            bb.expect(b.b_g(m).is_zero_upto(), || format!("{}: c={}", model_label(m), c.render(m)));
            cc.expect(bigb.connes_b_unchecked(m).is_zero_upto(), || format!("{}: c={}", model_label(m), c.render(m)));
            bc.expect(b.connes_b_unchecked(m).add(&bigb.b_g(m)).is_zero_upto(), || {
                format!("{}: c={}", model_label(m), c.render(m))
            });
            let cu = c.add(&cp.invariant_chain(m, 2, 6, 1, 2).shift(0, 1));
            per.expect(cu.periodic_d(m).periodic_d(m).is_zero_upto(), || format!("{}: c={}", model_label(m), cu.render(m)));
            let raw = cp.invariant_chain(m, 2, 6, 1, 2);
            let ok = raw.g_act(m).b_g(m).eq_upto(&raw.b_g(m).g_act(m))
                && raw.g_act(m).connes_b_unchecked(m).eq_upto(&raw.connes_b_unchecked(m).g_act(m));
            geq.expect(ok, || format!("{}: c={}", model_label(m), raw.render(m)));
        }
    }
    vec![bb, cc, bc, per, geq]
}

pub fn twisted_trace_cyclicity(seed: u64, samples: usize) -> Check {
    let mut cp = Corpus::new(seed);
    let twists: Vec<(u32, CMatrix)> = vec![
        (1, diag(&[1])),
        (2, diag(&[1, -1])),
        (3, rot3()),
        (
            3,
            vec![
                vec![Cyclo::zero(), Cyclo::zero(), Cyclo::one()],
                vec![Cyclo::one(), Cyclo::zero(), Cyclo::zero()],
                vec![Cyclo::zero(), Cyclo::one(), Cyclo::zero()],
            ],
        ),
        (4, vec![vec![Cyclo::zeta_pow(4, 1), Cyclo::zero()], vec![Cyclo::zero(), Cyclo::from_int(-1)]]),
    ];
    let mut ch = Check::new(
        "tr_g(M₀⊗…⊗M_m) = tr_g(gM₁g⁻¹⊗M₂⊗…⊗M_m⊗M₀)",
        format!("{samples} random matrix tuples, r ≤ 3, m ≤ 3"),
    );
    for s in 0..samples {
        let (order, e) = &twists[s % twists.len()];
        let r = e.len();
        let m = Model::build(1, 1, r, *order, &[], Some(e.clone())).expect("twist model");
        let len = 2 + s % 3;
        let mats: Vec<CMatrix> = (0..len).map(|_| cp.matrix(r, *order)).collect();
        let lhs = tr_g(&m, &mats).expect("rank");
        let einv = mat_inv(e).expect("invertible");
        let mut rot = vec![mat_mul(&mat_mul(e, &mats[1]), &einv)];
        rot.extend_from_slice(&mats[2..]);
        rot.push(mats[0].clone());
        let rhs = tr_g(&m, &rot).expect("rank");
        ch.expect(lhs == rhs, || format!("r={r}, N={order}: lhs={lhs}, rhs={rhs}"));
    }
    ch
}

// ---------------------------------------------------------------- intertwine

pub fn intertwining(seed: u64, samples: usize) -> Vec<Check> {
    let models = reference_models(3, 6);
    let mut cp = Corpus::new(seed);
    let corpus = format!("{samples} invariant chains (m ≤ 2, weight ≤ 6, ħ ≤ 3) per model over {}", labels(&models));
    let mut hoch = Check::new("ħΔ⟨c⟩ = ⟨b_g c⟩", corpus.clone());
    let mut conn = Check::new("d⟨c⟩ = ⟨B_g c⟩", corpus.clone());
    let mut gm = Check::new("∇⟨c⟩ = ⟨∇c⟩ and ∫_BV ∇ = ∇ ∫_BV", corpus.clone());
    let mut shape = Check::new("⟨c⟩ is invariant and free of z and dz", corpus);
    let mut nonzero = 0usize;
    for m in &models {
        let cor = Correlator::new(m);
        for _ in 0..samples {
            let c = cp.invariant_chain(m, 2, 6, 1, 3);
            let f = cor.free_correlation(&c).expect("invariant chain");
            if !f.is_zero_upto() {
                nonzero += 1;
            }
            let lhs = f.bv_delta(m).shift(1, 0);
            let rhs = cor.free_correlation(&c.b_g(m)).expect("b_g preserves invariance");
            hoch.expect(lhs.eq_upto(&rhs), || {
                format!("{}: c={}; ħΔ⟨c⟩={}; ⟨b_g c⟩={}", model_label(m), c.render(m), lhs.render(m), rhs.render(m))
            });
            let lhs = f.d_2k(m);
            let rhs = cor.free_correlation(&c.connes_b(m).expect("invariant")).expect("invariant");
            conn.expect(lhs.eq_upto(&rhs), || {
                format!("{}: c={}; d⟨c⟩={}; ⟨B_g c⟩={}", model_label(m), c.render(m), lhs.render(m), rhs.render(m))
            });
            let g1 = f.gm_nabla().eq_upto(&cor.free_correlation_unchecked(&c.gm_nabla()));
            let g2 = match (f.gm_nabla().berezin(m), f.berezin(m)) {
                (Ok(a), Ok(b)) => a.eq_upto(&b.hbar_euler()),
                _ => false,
            };
            gm.expect(g1 && g2, || format!("{}: c={}", model_label(m), c.render(m)));
            shape.expect(f.g_act(m).eq_upto(&f) && !f.has_z_content(m), || format!("{}: c={}", model_label(m), c.render(m)));
        }
    }
    hoch.detail = format!("{nonzero} chains with nonzero correlation");
    vec![hoch, conn, gm, shape]
}

pub fn tau1_routes(seed: u64, samples: usize) -> Vec<Check> {
    let mut cp = Corpus::new(seed);
    let mut models = Vec::new();
    for order in [2u32, 3, 4] {
        models.push(Model::build(1, 0, 1, order, &[1], None).expect("model").with_truncation(4, 8));
        models.push(Model::build(2, 0, 1, order, &[1, order as i64 - 1], None).expect("model").with_truncation(4, 8));
    }
    let corpus = format!("{samples} z-chains (m ≤ 3) per model over {}", labels(&models));
    let mut routes = Check::new("τ₁ (kernel expansion) = τ₁ (⋆̂ route) = τ₁′ (⋆ route)", corpus.clone());
    let mut cyc = Check::new("τ₁(b₀⊗b₁) = τ₁(g(b₁)⊗b₀)", corpus);
    for m in &models {
        let cor = Correlator::new(m);
        for s in 0..samples {
            let len = 1 + s % 4;
            let bs: Vec<Weyl> = (0..len).map(|_| cp.z_weyl(m, 2, 2)).collect();
            let a = cor.tau1(&bs).expect("z-only");
            let b = cor.tau1_hat(&bs).expect("z-only");
            let c = cor.tau1_prime(&bs).expect("z-only");
            routes.expect(a.eq_upto(&b) && a.eq_upto(&c), || {
                let r: Vec<String> = bs.iter().map(|b| b.render(m)).collect();
                format!("{}: {:?}: {a} | {b} | {c}", model_label(m), r)
            });
            let b0 = cp.z_weyl(m, 2, 2);
            let b1 = cp.z_weyl(m, 2, 2);
            let l = cor.tau1(&[b0.clone(), b1.clone()]).expect("z-only");
            let r = cor.tau1(&[b1.g_act(m), b0.clone()]).expect("z-only");
            cyc.expect(l.eq_upto(&r), || format!("{}: b0={}, b1={}", model_label(m), b0.render(m), b1.render(m)));
        }
    }
    let m = Model::build(1, 0, 1, 2, &[1], None).expect("model");
    let cor = Correlator::new(&m);
    let v = cor.tau1(&[Weyl::var(&m, 0), Weyl::var(&m, 1)]).expect("z-only");
    let mut spot = Check::new("τ₁(z¹⊗z²) = -ħ/8 at N = 2", "(n,k,N)=(1,0,2)");
    spot.detail = format!("value {v}");
    spot.expect(v == HbarSeries::monomial(Cyclo::frac(-1, 8), 1).truncated(v.trunc()), || format!("got {v}"));
    routes.detail = "three independent contraction routes".into();
    vec![routes, cyc, spot]
}

// ---------------------------------------------------------------- trace

fn unit_chain(m: &Model) -> Chain {
    Chain::from_tensor(m, &[MatrixWeyl::identity(m)], &Cyclo::one()).expect("rank")
}

pub fn trace_normalization() -> Check {
    let mut models = reference_models(3, 6);
    models.push(Model::build(1, 0, 1, 3, &[1], None).expect("model"));
    models.push(Model::build(2, 0, 1, 5, &[1, 2], None).expect("model"));
    let mut ch = Check::new("Tr̂_g(1) = u^k det(1-g⊥⁻¹)⁻¹ tr(e)", labels(&models));
    let mut vals = Vec::new();
    for m in &models {
        let cor = Correlator::new(m);
        let v = cor.universal_trace_raw(&unit_chain(m), &[]).expect("trace");
        let expect = ScalarK::monomial(&m.vacuum_factor() * &m.twist_trace(), 0, m.k as i32);
        vals.push(format!("{}→{}", model_label(m), v));
        ch.expect(v.eq_upto(&expect), || format!("{}: got {v}, expected {expect}", model_label(m)));
    }
    let m2 = Model::build(1, 0, 1, 2, &[1], None).expect("model");
    let m3 = Model::build(1, 0, 1, 3, &[1], None).expect("model");
    let v2 = Correlator::new(&m2).universal_trace_raw(&unit_chain(&m2), &[]).expect("trace");
    let v3 = Correlator::new(&m3).universal_trace_raw(&unit_chain(&m3), &[]).expect("trace");
    ch.expect(v2 == ScalarK::constant(Cyclo::frac(1, 4)).with_trunc(v2.trunc()), || format!("(1,0,2): {v2}"));
    ch.expect(v3 == ScalarK::constant(Cyclo::frac(1, 3)).with_trunc(v3.trunc()), || format!("(1,0,3): {v3}"));
    ch.detail = format!("(1,0,2)→{v2}, (1,0,3)→{v3}");
    ch
}

/// One element of each summand of 𝔥 that is available in the model.
pub fn h_samples(m: &Model) -> Vec<(&'static str, MatrixWeyl)> {
    let nv = m.nvars();
    let mono = |e: Vec<u16>, h: i32, c: Cyclo| Weyl::monomial(m, e, h, c);
    let mut out = Vec::new();
    if m.k > 0 {
        let mut e = vec![0u16; nv];
        e[0] = 1;
        e[m.k] = 1;
        let mut e2 = vec![0u16; nv];
        e2[0] = 2;
        let w = mono(e, 0, Cyclo::one()).add(&mono(e2, 0, Cyclo::frac(1, 2)));
        out.push(("sp_2k", MatrixWeyl::scalar(m, &w)));
    }
    if let Some((_, p)) = m.rotated_pairs().next() {
        let mut e = vec![0u16; nv];
        e[p.a] = 1;
        e[p.b] = 1;
        out.push(("sp^g", MatrixWeyl::scalar(m, &mono(e, 0, Cyclo::from_int(2)))));
    }
    // ħ times a constant matrix commuting with the twist
    let mut a = MatrixWeyl::zero(m);
    for i in 0..m.r {
        for j in 0..m.r {
            let c = if i == j { Cyclo::from_int(i as i64 + 1) } else { Cyclo::zero() };
            *a.entry_mut(i, j) = mono(vec![0; nv], 1, c);
        }
    }
    let a = a.invariant_project(m);
    out.push(("ħgl_r", a));
    out.push(("center", MatrixWeyl::scalar(m, &mono(vec![0; nv], 0, Cyclo::from_int(3)))));
    out.push(("ħ²center", MatrixWeyl::scalar(m, &mono(vec![0; nv], 2, Cyclo::one()))));
    out
}

pub fn h_vanishing(seed: u64, samples: usize) -> Check {
    let models = reference_models(3, 6);
    let mut cp = Corpus::new(seed);
    let mut ch = Check::new(
        "Tr̂_g vanishes with an argument in 𝔥",
        format!("all 𝔥 summands, degree 1 and degree 2 with {samples} random partners, per model over {}", labels(&models)),
    );
    let mut count = 0usize;
    for m in &models {
        let cor = Correlator::new(m);
        let one = unit_chain(m);
        for (name, x) in h_samples(m) {
            let xe = LieElement::new(m, x.clone()).expect("valid element");
            let ok = xe.h_member();
            ch.expect(ok, || format!("{}: sample {name} is not in 𝔥", model_label(m)));
            let v = cor.universal_trace(&one, &[xe.clone()]).expect("trace");
            count += 1;
            ch.expect(v.is_zero_upto(v.trunc()), || format!("{}: {name}: degree 1 value {v}", model_label(m)));
            for _ in 0..samples {
                let y = cp.lie_value(m, 3, 2);
                let Ok(ye) = LieElement::new(m, y) else { continue };
                for args in [[xe.clone(), ye.clone()], [ye.clone(), xe.clone()]] {
                    let v = cor.universal_trace(&one, &args).expect("trace");
                    count += 1;
                    ch.expect(v.is_zero_upto(v.trunc()), || {
                        format!("{}: {name} with {}: value {v}", model_label(m), ye.value().render(m))
                    });
                }
            }
        }
    }
    ch.detail = format!("{count} evaluations");
    ch
}

// ---------------------------------------------------------------- wheels

pub fn wheels() -> Vec<Check> {
    let mut odd = Check::new("C(k) = 0 for odd k ≤ 7", "exact simplex integration");
    for k in [1usize, 3, 5, 7] {
        let c = wheel_coefficient(k);
        odd.expect(c == num_rational::BigRational::from_integer(0.into()), || format!("C({k}) = {c}"));
    }
    let mut even = Check::new("C(2) = -1/24, C(4) = 1/2880, C(6) = -B₆/(6·6!)", "exact simplex integration");
    let c2 = wheel_coefficient(2);
    let c4 = wheel_coefficient(4);
    let c6 = wheel_coefficient(6);
    let q = |n: i64, d: i64| num_rational::BigRational::new(n.into(), d.into());
    even.expect(c2 == q(-1, 24), || format!("C(2) = {c2}"));
    even.expect(c4 == q(1, 2880), || format!("C(4) = {c4}"));
    even.expect(c6 == wheel_closed_form(6), || format!("C(6) = {c6}"));
    even.detail = format!("C(2) = {c2}, C(3) = {}, C(4) = {c4}, C(6) = {c6}", wheel_coefficient(3));
    let sets: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (2, vec![(0, 1), (1, 0)]),
        (3, vec![(0, 1), (1, 2), (2, 0)]),
        (3, vec![(0, 2), (1, 2)]),
        (4, vec![(0, 1), (2, 3), (1, 3)]),
        (4, vec![(0, 2), (2, 1), (1, 3), (3, 0)]),
        (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
    ];
    let mut rot = Check::new("weights are invariant under cyclic rotation", format!("{} edge sets", sets.len()));
    let mut rev = Check::new("reversing one edge negates the weight", format!("{} edge sets", sets.len()));
    for (p, es) in &sets {
        let w = weight(*p, es);
        for s in 1..*p {
            let r: Vec<_> = es.iter().map(|&(a, b)| ((a + s) % p, (b + s) % p)).collect();
            let wr = weight(*p, &r);
            rot.expect(wr == w, || format!("{es:?} shifted by {s}: {w} vs {wr}"));
        }
        let mut flipped = es.clone();
        flipped[0] = (es[0].1, es[0].0);
        let wf = weight(*p, &flipped);
        rev.expect(wf == -w.clone(), || format!("{es:?}: {w} vs {wf}"));
    }
    vec![odd, even, rot, rev]
}

// ---------------------------------------------------------------- oneloop

fn var(m: &Model, i: usize) -> MatrixWeyl {
    MatrixWeyl::scalar(m, &Weyl::var(m, i))
}

fn mono_mat(m: &Model, a: usize, b: usize, e: &[u16], h: i32, c: i64) -> MatrixWeyl {
    MatrixWeyl::unit(m, a, b, &Weyl::monomial(m, e.to_vec(), h, Cyclo::from_int(c)))
}

/// Named argument lists for the one-loop comparison.
pub fn oneloop_cases() -> Vec<(String, Model, Vec<MatrixWeyl>)> {
    let mut out = Vec::new();
    for m in reference_models(3, 6) {
        out.push((format!("degree 0 {}", model_label(&m)), m, vec![]));
    }
    let m = Model::build(1, 1, 1, 1, &[], None).expect("model");
    out.push(("Γ₁: (y¹, y²)".into(), m.clone(), vec![var(&m, 0), var(&m, 1)]));
    let cubic = MatrixWeyl::scalar(&m, &Weyl::monomial(&m, vec![3, 0], 0, Cyclo::one()));
    out.push(("𝔥 argument: (y¹, (y¹)²)".into(), m.clone(), vec![var(&m, 0), MatrixWeyl::scalar(&m, &Weyl::monomial(&m, vec![2, 0], 0, Cyclo::one()))]));
    out.push(("mixed: (y², (y¹)³)".into(), m.clone(), vec![var(&m, 1), cubic]));
    let m2 = Model::build(1, 1, 2, 1, &[], None).expect("model");
    out.push(("Γ₂: (y¹, ħy²E₁₁)".into(), m2.clone(), vec![var(&m2, 0), mono_mat(&m2, 0, 0, &[0, 1], 1, 1)]));
    let mt = Model::build(1, 1, 2, 2, &[], Some(diag(&[1, -1]))).expect("model");
    out.push(("Γ₂ twisted: (y¹, 3ħy²E₂₂), e = diag(1,-1)".into(), mt.clone(), vec![var(&mt, 0), mono_mat(&mt, 1, 1, &[0, 1], 1, 3)]));
    let m4 = Model::build(2, 1, 1, 3, &[1], None).expect("model");
    out.push((
        "Γ₄: (y¹, y²z³z⁴) at N = 3".into(),
        m4.clone(),
        vec![var(&m4, 0), MatrixWeyl::scalar(&m4, &Weyl::monomial(&m4, vec![0, 1, 1, 1], 0, Cyclo::one()))],
    ));
    let m22 = Model::build(2, 2, 2, 1, &[], None).expect("model");
    let e3 = [0u16, 0, 1, 0];
    let e4 = [0u16, 0, 0, 1];
    out.push((
        "𝔊₂ degree 4: (y¹, ħy³E₁₁, y², ħy⁴(E₁₁+2E₂₂))".into(),
        m22.clone(),
        vec![
            var(&m22, 0),
            mono_mat(&m22, 0, 0, &e3, 1, 1),
            var(&m22, 1),
            mono_mat(&m22, 0, 0, &e4, 1, 1).add(&mono_mat(&m22, 1, 1, &e4, 1, 2)),
        ],
    ));
    let mw = Model::build(1, 1, 1, 1, &[], None).expect("model").with_truncation(4, 10);
    out.push((
        "𝔊₃ degree 4: (y¹, (y²)³, y², (y¹)³)".into(),
        mw.clone(),
        vec![
            var(&mw, 0),
            MatrixWeyl::scalar(&mw, &Weyl::monomial(&mw, vec![0, 3], 0, Cyclo::one())),
            var(&mw, 1),
            MatrixWeyl::scalar(&mw, &Weyl::monomial(&mw, vec![3, 0], 0, Cyclo::one())),
        ],
    ));
    out
}

pub fn oneloop(seed: u64, samples: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, m, args) in oneloop_cases() {
        let cor = Correlator::new(&m);
        let mut ch = Check::new(&format!("one-loop comparison, {name}"), model_label(&m));
        match oneloop_compare(&cor, &args) {
            Ok(r) => {
                ch.detail = format!("Tr̂ = {}, rhs = {}", r.lhs, r.rhs);
                ch.expect(r.pass, || format!("defect {}", r.defect));
            }
            Err(e) => ch.fail(|| e.to_string()),
        }
        checks.push(ch);
    }
    // Ch⋆ through both τ₁ routes, curvature antisymmetry, pr on 𝔥
    let models = reference_models(3, 6);
    let mut cp = Corpus::new(seed);
    let corpus = format!("{samples} random argument pairs per model over {}", labels(&models));
    let mut star = Check::new("Ch⋆ via τ₁(-R₂/ħ) = via τ₁′(R₂/ħ)", corpus.clone());
    let mut anti = Check::new("R_i(ξ,η) = -R_i(η,ξ)", corpus.clone());
    let mut hpr = Check::new("pr is the identity on 𝔥 and R(ξ,-) = 0 for ξ ∈ 𝔥", corpus);
    for m in &models {
        let cor = Correlator::new(m);
        for _ in 0..samples {
            let x = cp.lie_value(m, 3, 2);
            let y = cp.lie_value(m, 3, 2);
            let args = [x.clone(), y.clone()];
            let a = ch_g_star_eval(&cor, &args);
            let b = ch_g_star_prime_eval(&cor, &args);
            let ok = match (&a, &b) {
                (Ok(a), Ok(b)) => a.full().eq_upto(&b.full()),
                _ => false,
            };
            star.expect(ok, || format!("{}: x={}, y={}", model_label(m), x.render(m), y.render(m)));
            let r1 = curvature(m, &x, &y);
            let r2 = curvature(m, &y, &x);
            let neg = |a: &CMatrix| -> CMatrix { a.iter().map(|row| row.iter().map(|v| -v).collect()).collect() };
            let ok = r1.r1.eq_upto(&r2.r1.neg())
                && r1.r2.eq_upto(&r2.r2.neg())
                && r1.r3 == neg(&r2.r3)
                && r1.r4.eq_upto(&-&r2.r4);
            anti.expect(ok, || format!("{}: x={}, y={}", model_label(m), x.render(m), y.render(m)));
            for (name, h) in h_samples(m) {
                let he = LieElement::new(m, h.clone()).expect("valid");
                let c = curvature(m, &h, &x);
                let zero_m = c.r3.iter().all(|row| row.iter().all(Cyclo::is_zero));
                let ok = he.h_member()
                    && c.r1.eq_upto(&Weyl::zero_for(m))
                    && c.r2.eq_upto(&Weyl::zero_for(m))
                    && zero_m
                    && c.r4.eq_upto(&HbarSeries::zero(c.r4.trunc()));
                hpr.expect(ok, || format!("{}: {name} against x={}", model_label(m), x.render(m)));
            }
        }
    }
    checks.push(star);
    checks.push(anti);
    checks.push(hpr);
    checks
}

/// Runs a suite by name; None for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<Report> {
    let mut checks = Vec::new();
    let all = name == "all";
    if !SUITES.contains(&name) {
        return None;
    }
    if all || name == "arith" {
        checks.extend(cyclo_axioms(seed, 500));
        checks.extend(series_axioms(seed, 200));
        checks.extend(weyl_properties(seed, 200));
    }
    if all || name == "chains" {
        checks.extend(chain_identities(seed, 50));
        checks.push(twisted_trace_cyclicity(seed, 100));
    }
    if all || name == "intertwine" {
        checks.extend(intertwining(seed, 50));
        checks.extend(tau1_routes(seed, 30));
    }
    if all || name == "trace" {
        checks.push(trace_normalization());
        checks.push(h_vanishing(seed, 5));
    }
    if all || name == "wheels" {
        checks.extend(wheels());
    }
    if all || name == "oneloop" {
        checks.extend(oneloop(seed, 10));
    }
    Some(Report { suite: name.to_string(), seed, checks })
}
