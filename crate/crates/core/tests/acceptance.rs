//! Acceptance criteria, one test each. Run with `--nocapture` for the
//! per-criterion summary lines.

use std::time::{Duration, Instant};

use orbifold_tqm::cli::verify::{
    chain_identities, h_vanishing, intertwining, oneloop, tau1_routes, trace_normalization, twisted_trace_cyclicity,
    weyl_properties, wheels, Check,
};

const SEED: u64 = 20240611;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Criterion {
    fn run(id: u32, title: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Vec<Check>) -> Criterion {
        let t = Instant::now();
        let checks = f();
        Criterion { id, title, checks, elapsed: t.elapsed(), limit }
    }

    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.limit.map_or(true, |l| self.elapsed <= l)
    }

    fn line(&self) -> String {
        let mut s = format!(
            "criterion {}: {} {} ({} checks, {:.1}s)",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        );
        for c in self.checks.iter().filter(|c| !c.pass) {
            s.push_str(&format!("\n    failed: {} :: {}", c.name, c.witness.as_deref().unwrap_or("")));
        }
        if let Some(l) = self.limit {
            if self.elapsed > l {
                s.push_str(&format!("\n    over time budget of {}s", l.as_secs()));
            }
        }
        s
    }
}

fn only(checks: Vec<Check>, names: &[&str]) -> Vec<Check> {
    checks.into_iter().filter(|c| names.iter().any(|n| c.name.starts_with(n))).collect()
}

fn check(c: Criterion) {
    println!("{}", c.line());
    assert!(c.pass(), "criterion {} failed", c.id);
}

#[test]
fn criterion_01_intertwining() {
    check(Criterion::run(1, "intertwining of b_g with ħΔ and B_g with d", Some(Duration::from_secs(300)), || {
        only(intertwining(SEED, 50), &["ħΔ", "d⟨c⟩", "⟨c⟩ is invariant"])
    }));
}

#[test]
fn criterion_02_trace_normalization() {
    check(Criterion::run(2, "trace normalization", None, || vec![trace_normalization()]));
}

#[test]
fn criterion_03_h_vanishing() {
    check(Criterion::run(3, "vanishing on 𝔥", None, || vec![h_vanishing(SEED, 3)]));
}

#[test]
fn criterion_04_wheels() {
    check(Criterion::run(4, "wheel coefficients", Some(Duration::from_secs(60)), wheels));
}

#[test]
fn criterion_05_chain_complex() {
    check(Criterion::run(5, "chain complex identities", None, || {
        only(chain_identities(SEED, 40), &["b_g²", "B_g²", "b_g B_g", "(b_g + uB_g)²"])
    }));
}

#[test]
fn criterion_06_twisted_trace() {
    check(Criterion::run(6, "twisted trace cyclicity", None, || vec![twisted_trace_cyclicity(SEED, 100)]));
}

#[test]
fn criterion_07_tau1_consistency() {
    check(Criterion::run(7, "τ₁ consistency", None, || tau1_routes(SEED, 30)));
}

#[test]
fn criterion_08_gauss_manin() {
    check(Criterion::run(8, "Gauss-Manin flatness", None, || only(intertwining(SEED + 1, 20), &["∇"])));
}

#[test]
fn criterion_09_oneloop() {
    check(Criterion::run(9, "one-loop spot checks", None, || only(oneloop(SEED, 4), &["one-loop comparison"])));
}

#[test]
fn criterion_10_moyal() {
    check(Criterion::run(10, "Moyal associativity and automorphisms", None, || {
        only(weyl_properties(SEED, 200), &["Moyal associativity", "g acts"])
    }));
}
