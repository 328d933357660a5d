//! Exact integrals of products of the circle propagator over cyclic
//! configuration spaces, and the wheel coefficients.
//!
//! Positions 0..=m sit at 0 = t₀ < t₁ < … < t_m < 1. An edge (α, β) carries
//! the factor d(t_α, t_β) - ½ where d is the oriented distance from α to β
//! going forward around the circle.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::weyl::factorial;

/// A multiset of directed edges between cyclic positions 0..m_plus_1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    pub m_plus_1: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeSet {
    pub fn new(m_plus_1: usize, edges: Vec<(usize, usize)>) -> Result<EdgeSet, String> {
        for &(a, b) in &edges {
            if a >= m_plus_1 || b >= m_plus_1 {
                return Err(format!("edge ({a},{b}) out of range for {m_plus_1} positions"));
            }
            if a == b {
                return Err(format!("edge ({a},{a}) is a loop"));
            }
        }
        Ok(EdgeSet { m_plus_1, edges })
    }

    /// Lexicographically minimal rotation of the sorted edge list.
    pub fn canonical(&self) -> Vec<(usize, usize)> {
        let n = self.m_plus_1;
        (0..n)
            .map(|s| {
                let mut e: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| ((a + s) % n, (b + s) % n)).collect();
                e.sort();
                e
            })
            .min()
            .unwrap_or_default()
    }
}

type Poly = BTreeMap<Vec<u32>, BigRational>;

fn poly_mul_linear(p: &Poly, lin: &[(Option<usize>, BigRational)]) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        for (v, lc) in lin {
            let mut ne = e.clone();
            if let Some(v) = v {
                ne[*v] += 1;
            }
            let val = c * lc;
            let entry = out.entry(ne).or_insert_with(BigRational::zero);
            *entry += val;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn integrate(m: usize, edges: &[(usize, usize)]) -> BigRational {
    if m == 0 {
        // a single point: the base point is integrated out
        return if edges.is_empty() { BigRational::one() } else { BigRational::zero() };
    }
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::one();
    let mut p = Poly::new();
    p.insert(vec![0; m], BigRational::one());
    for &(a, b) in edges {
        // variable index of t_α is α-1; t₀ = 0
        let var = |x: usize| if x == 0 { None } else { Some(x - 1) };
        let mut lin: Vec<(Option<usize>, BigRational)> = Vec::new();
        if b > a {
            lin.push((var(b), one.clone()));
            if a != 0 {
                lin.push((var(a), -one.clone()));
            }
            lin.push((None, -half.clone()));
        } else {
            lin.push((None, half.clone()));
            lin.push((var(a), -one.clone()));
            if b != 0 {
                lin.push((var(b), one.clone()));
            }
        }
        p = poly_mul_linear(&p, &lin);
    }
    // ∫_0^{t_{v+1}} dt_v, innermost first; the last upper limit is 1
    for v in 0..m {
        let mut next = Poly::new();
        for (e, c) in p {
            let a = e[v];
            let val = c / BigRational::from_integer(BigInt::from(a + 1));
            let mut ne = e.clone();
            ne[v] = 0;
            if v + 1 < m {
                ne[v + 1] += a + 1;
            }
            let entry = next.entry(ne).or_insert_with(BigRational::zero);
            *entry += val;
        }
        next.retain(|_, c| !c.is_zero());
        p = next;
    }
    p.into_values().fold(BigRational::zero(), |a, b| a + b)
}

/// ∫_{0<t₁<…<t_m<1} Π_{(α,β)} (d(t_α,t_β) - ½), memoized by the canonical
/// rotation of the edge set.
pub fn pairing_weight(e: &EdgeSet) -> BigRational {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Vec<(usize, usize)>), BigRational>>> = OnceLock::new();
    let key = (e.m_plus_1, e.canonical());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("weight cache poisoned").get(&key) {
        return v.clone();
    }
    let v = integrate(e.m_plus_1 - 1, &key.1);
    cache.lock().expect("weight cache poisoned").insert(key, v.clone());
    v
}

/// Shorthand for pairing_weight over m_plus_1 positions.
pub fn weight(m_plus_1: usize, edges: &[(usize, usize)]) -> BigRational {
    pairing_weight(&EdgeSet { m_plus_1, edges: edges.to_vec() })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// C(k) without its u^{-k} factor: (1/k) ∫ over the configuration space of
/// k labelled points on the circle of the k-cycle of propagators. Vertex 1
/// is placed at the base point; the remaining vertices run over all
/// cyclic orders.
pub fn wheel_coefficient(k: usize) -> BigRational {
    assert!(k >= 1, "wheel needs at least one vertex");
    if k == 1 {
        // a single tadpole edge from a point to itself: d = 0 (or 1), symmetrised to 0
        return BigRational::zero();
    }
    let mut total = BigRational::zero();
    for perm in permutations(k - 1) {
        // position of vertex v: 0 for v = 0, 1 + perm[v-1] otherwise
        let pos = |v: usize| if v == 0 { 0 } else { 1 + perm[v - 1] };
        let edges: Vec<(usize, usize)> = (0..k).map(|v| (pos(v), pos((v + 1) % k))).collect();
        total += weight(k, &edges);
    }
    total / BigRational::from_integer(BigInt::from(k))
}

/// Bernoulli numbers B_n (B₁ = -1/2).
pub fn bernoulli(n: usize) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for mm in 0..=n {
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            let binom = factorial((mm + 1) as u32) / (factorial(j as u32) * factorial((mm + 1 - j) as u32));
            s += BigRational::from_integer(binom) * bj;
        }
        let v = if mm == 0 { BigRational::one() } else { -s / BigRational::from_integer(BigInt::from(mm + 1)) };
        b.push(v);
    }
    b[n].clone()
}

/// -B_{k}/(k·k!), the closed form of C(k) for even k.
pub fn wheel_closed_form(k: usize) -> BigRational {
    -bernoulli(k) / BigRational::from_integer(BigInt::from(k as u64) * factorial(k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn empty_edge_set_is_simplex_volume() {
        assert_eq!(weight(4, &[]), q(1, 6));
    }

    #[test]
    fn single_edges() {
        assert_eq!(weight(2, &[(0, 1)]), q(0, 1));
        assert_eq!(weight(3, &[(0, 1)]), q(-1, 12));
        assert_eq!(weight(3, &[(1, 2)]), q(-1, 12));
    }

    #[test]
    fn rejects_self_loops() {
        assert!(EdgeSet::new(2, vec![(1, 1)]).is_err());
        assert!(EdgeSet::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(5), q(0, 1));
    }
}
