//! Seeded random generators for invariant chains, matrices and observables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::{CKey, Chain, Slot};
use crate::exactnum::Cyclo;
use crate::model::{CMatrix, Model};
use crate::weyl::{MatrixWeyl, Weyl};

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Corpus {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A small nonzero rational, or a rational times a power of ζ.
    pub fn scalar(&mut self, order: u32) -> Cyclo {
        let mut num: i64 = self.rng.gen_range(-3..=3);
        if num == 0 {
            num = 1;
        }
        let den: i64 = self.rng.gen_range(1..=3);
        let c = Cyclo::frac(num, den);
        if order > 2 && self.rng.gen_bool(0.3) {
            let j = self.rng.gen_range(0..order as i64);
            &c * &Cyclo::zeta_pow(order, j)
        } else {
            c
        }
    }

    /// A random element of ℚ(ζ_N) with up to `terms` basis terms.
    pub fn cyclo(&mut self, order: u32, terms: usize) -> Cyclo {
        let mut acc = Cyclo::zero();
        for _ in 0..terms {
            let num: i64 = self.rng.gen_range(-5..=5);
            let den: i64 = self.rng.gen_range(1..=4);
            let j = self.rng.gen_range(0..order.max(1) as i64);
            acc = &acc + &(&Cyclo::frac(num, den) * &Cyclo::zeta_pow(order, j));
        }
        acc
    }

    /// A monomial exponent vector with total degree at most `deg`.
    pub fn exps(&mut self, nvars: usize, deg: u16) -> Vec<u16> {
        let mut e = vec![0u16; nvars];
        let d = self.rng.gen_range(0..=deg);
        for _ in 0..d {
            let i = self.rng.gen_range(0..nvars);
            e[i] += 1;
        }
        e
    }

    /// A nonzero invariant chain of total weight at most `max_weight`, with
    /// at most `nterms` basis tensors before projection.
    pub fn invariant_chain(&mut self, m: &Model, max_m: usize, max_weight: i64, max_h: i32, nterms: usize) -> Chain {
        loop {
            let mut c = Chain::zero_for(m);
            for _ in 0..nterms {
                let mm = self.rng.gen_range(0..=max_m);
                let h = self.rng.gen_range(0..=max_h.max(0));
                let budget = (max_weight - 2 * h as i64).max(0);
                let mut left = budget;
                let mut slots = Vec::new();
                for _ in 0..=mm {
                    let d = if left > 0 { self.rng.gen_range(0..=left.min(3)) } else { 0 } as u16;
                    let e = self.exps(m.nvars(), d);
                    left -= e.iter().map(|&x| x as i64).sum::<i64>();
                    let row = self.rng.gen_range(0..m.r) as u8;
                    let col = self.rng.gen_range(0..m.r) as u8;
                    slots.push(Slot { row, col, exps: e });
                }
                let v = self.scalar(m.order);
                c.add_term(CKey { slots, h, u: 0 }, v);
            }
            let p = c.invariant_project(m);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A random Weyl element with `nterms` terms of degree ≤ deg.
    pub fn weyl(&mut self, m: &Model, deg: u16, max_h: i32, nterms: usize) -> Weyl {
        let mut w = Weyl::zero_for(m);
        for _ in 0..nterms {
            let e = self.exps(m.nvars(), deg);
            let h = self.rng.gen_range(0..=max_h.max(0));
            let v = self.scalar(m.order);
            w.add_term(e, h, v);
        }
        w
    }

    /// A random Weyl element in the z-variables only.
    pub fn z_weyl(&mut self, m: &Model, deg: u16, nterms: usize) -> Weyl {
        let mut w = Weyl::zero_for(m);
        let nz = 2 * (m.n - m.k);
        if nz == 0 {
            return Weyl::constant(m, self.scalar(m.order));
        }
        for _ in 0..nterms {
            let mut e = vec![0u16; m.nvars()];
            let d = self.rng.gen_range(0..=deg);
            for _ in 0..d {
                e[2 * m.k + self.rng.gen_range(0..nz)] += 1;
            }
            let v = self.scalar(m.order);
            w.add_term(e, 0, v);
        }
        w
    }

    pub fn matrix_weyl(&mut self, m: &Model, deg: u16, max_h: i32, nterms: usize) -> MatrixWeyl {
        let entries = (0..m.r * m.r).map(|_| self.weyl(m, deg, max_h, nterms)).collect();
        MatrixWeyl::from_entries(m.r, entries)
    }

    /// A random invariant element f·Id + ħA of the Lie algebra.
    pub fn lie_value(&mut self, m: &Model, deg: u16, nterms: usize) -> MatrixWeyl {
        let f = self.weyl(m, deg, 0, nterms).invariant_project(m);
        let a = self.matrix_weyl(m, deg, 1, 1).invariant_project(m).shift_h(1);
        MatrixWeyl::scalar(m, &f).add(&a)
    }

    /// An r×r matrix of small rationals.
    pub fn matrix(&mut self, r: usize, order: u32) -> CMatrix {
        (0..r)
            .map(|_| (0..r).map(|_| if self.rng.gen_bool(0.3) { Cyclo::zero() } else { self.scalar(order) }).collect())
            .collect()
    }
}
