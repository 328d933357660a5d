//! The linear model (V, ω, g) in complexified Darboux coordinates, its
//! propagator kernels and the vacuum factor.
//!
//! Variables are indexed 0..2n. Indices 0..2k are the fixed directions
//! y^1..y^{2k}, paired as (i, i+k). Indices 2k..2n are the rotated
//! directions z^{2k+1}..z^{2n}, paired as (2k+j, 2k+j+n-k) with
//! g·z^{2k+j} = ζ^{l_j} z^{2k+j} and g·z^{2k+j+n-k} = ζ^{-l_j} z^{2k+j+n-k}.
//! In every pair (a, b) we have ω^{ab} = 1 = -ω^{ba}.

use thiserror::Error;

use crate::exactnum::Cyclo;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("k = {k} exceeds n = {n}")]
    KTooLarge { n: usize, k: usize },
    #[error("order N must be positive")]
    ZeroOrder,
    #[error("rank r must be positive")]
    ZeroRank,
    #[error("expected {expected} perp eigenvalue exponents, got {got}")]
    PerpCount { expected: usize, got: usize },
    #[error("perp eigenvalue exponent l = {0} is 0 mod N; that direction belongs to the fixed block")]
    TrivialPerpEigenvalue(i64),
    #[error("g does not preserve ω on directions {0} and {1}")]
    NotSymplectic(usize, usize),
    #[error("e_twist must be an {0}x{0} matrix")]
    TwistShape(usize),
    #[error("e_twist is not invertible")]
    TwistSingular,
    #[error("e_twist^N is not the identity")]
    TwistOrder,
    #[error("too many variables for the form encoding (2n = {0}, maximum 64)")]
    TooManyVariables(usize),
}

/// A symplectic pair of variable indices with ω^{ab} = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
    pub fixed: bool,
}

pub type CMatrix = Vec<Vec<Cyclo>>;

/// Constant two-point kernels over the rotated block, as 2n x 2n matrices
/// indexed by variables. `*_swap` is the slot-exchanged kernel (the
/// transpose).
#[derive(Clone, Debug)]
pub struct PropagatorKernels {
    pub pi1: CMatrix,
    pub pi2: CMatrix,
    pub p12: CMatrix,
    pub p2: CMatrix,
    pub p3: CMatrix,
    pub p12_swap: CMatrix,
    pub p2_swap: CMatrix,
    pub p3_swap: CMatrix,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub order: u32,
    pub perp_eigs: Vec<i64>,
    /// Twist on the coefficient bundle; the identity when none was given.
    pub e_twist: CMatrix,
    pub e_twist_inv: CMatrix,
    pub twisted: bool,
    pub hbar_trunc: i64,
    pub weight_trunc: i64,
    pub pairs: Vec<Pair>,
    /// ζ-exponent of the g-eigenvalue of each coordinate function.
    pub eig_exp: Vec<i64>,
    pub kernels: PropagatorKernels,
    vacuum: Cyclo,
    /// Per rotated pair: the self-loop constant ½(1+λ⁻¹)/(1-λ⁻¹).
    self_loop: Vec<Cyclo>,
}

pub fn identity(r: usize) -> CMatrix {
    (0..r).map(|i| (0..r).map(|j| if i == j { Cyclo::one() } else { Cyclo::zero() }).collect()).collect()
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let r = a.len();
    let c = b.first().map(|row| row.len()).unwrap_or(0);
    let mut out = vec![vec![Cyclo::zero(); c]; r];
    for i in 0..r {
        for (l, bl) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                if !bl[j].is_zero() {
                    out[i][j] += &(&a[i][l] * &bl[j]);
                }
            }
        }
    }
    out
}

/// Inverse by Gauss-Jordan elimination; None if singular.
pub fn mat_inv(a: &CMatrix) -> Option<CMatrix> {
    let r = a.len();
    let mut m: Vec<Vec<Cyclo>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..r).map(|j| if i == j { Cyclo::one() } else { Cyclo::zero() }));
            v
        })
        .collect();
    for col in 0..r {
        let piv = (col..r).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].inv().ok()?;
        for c in 0..2 * r {
            m[col][c] = &m[col][c] * &p;
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..2 * r {
                    let v = &f * &m[col][c];
                    m[i][c] = &m[i][c] - &v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[r..].to_vec()).collect())
}

impl Model {
    /// Validates the data and caches the kernels.
    pub fn build(
        n: usize,
        k: usize,
        r: usize,
        order: u32,
        perp_eigs: &[i64],
        e_twist: Option<CMatrix>,
    ) -> Result<Model, ModelError> {
        if k > n {
            return Err(ModelError::KTooLarge { n, k });
        }
        if order == 0 {
            return Err(ModelError::ZeroOrder);
        }
        if r == 0 {
            return Err(ModelError::ZeroRank);
        }
        if 2 * n > 64 {
            return Err(ModelError::TooManyVariables(2 * n));
        }
        if perp_eigs.len() != n - k {
            return Err(ModelError::PerpCount { expected: n - k, got: perp_eigs.len() });
        }
        let nn = order as i64;
        let mut eigs = Vec::new();
        for &l in perp_eigs {
            let l = l.rem_euclid(nn);
            if l == 0 {
                return Err(ModelError::TrivialPerpEigenvalue(l));
            }
            eigs.push(l);
        }
        let m = n - k;
        let mut pairs = Vec::new();
        for i in 0..k {
            pairs.push(Pair { a: i, b: i + k, fixed: true });
        }
        for j in 0..m {
            pairs.push(Pair { a: 2 * k + j, b: 2 * k + j + m, fixed: false });
        }
        let mut eig_exp = vec![0i64; 2 * n];
        for j in 0..m {
            eig_exp[2 * k + j] = eigs[j];
            eig_exp[2 * k + j + m] = (-eigs[j]).rem_euclid(nn);
        }
        // gᵀωg = ω on the diagonal basis: λ_a λ_b = 1 whenever ω^{ab} ≠ 0
        for p in &pairs {
            if (eig_exp[p.a] + eig_exp[p.b]).rem_euclid(nn) != 0 {
                return Err(ModelError::NotSymplectic(p.a, p.b));
            }
        }

        let (e, twisted) = match e_twist {
            None => (identity(r), false),
            Some(e) => {
                if e.len() != r || e.iter().any(|row| row.len() != r) {
                    return Err(ModelError::TwistShape(r));
                }
                (e, true)
            }
        };
        let e_inv = mat_inv(&e).ok_or(ModelError::TwistSingular)?;
        let mut pw = identity(r);
        for _ in 0..order {
            pw = mat_mul(&pw, &e);
        }
        if pw != identity(r) {
            return Err(ModelError::TwistOrder);
        }

        let dim = 2 * n;
        let zero = || vec![vec![Cyclo::zero(); dim]; dim];
        let half = Cyclo::frac(1, 2);
        let (mut pi1, mut pi2) = (zero(), zero());
        let (mut p12, mut p2, mut p3) = (zero(), zero(), zero());
        let mut vacuum = Cyclo::one();
        let mut self_loop = Vec::new();
        for p in &pairs {
            let target = if p.fixed { &mut pi1 } else { &mut pi2 };
            target[p.a][p.b] = half.clone();
            target[p.b][p.a] = -&half;
        }
        for p in pairs.iter().filter(|p| !p.fixed) {
            let lam = Cyclo::zeta_pow(order, eig_exp[p.a]);
            let lam_inv = Cyclo::zeta_pow(order, -eig_exp[p.a]);
            let one = Cyclo::one();
            // μ_b: eigenvalue of g⁻¹ on the vector dual to z^b
            let mu_b = lam.clone();
            let mu_a = lam_inv.clone();
            let inv1 = |mu: &Cyclo| (&one - mu).inv().expect("nontrivial eigenvalue");
            // P12 = -(1 ⊗ (1-g⁻¹)⁻¹) Π2
            p12[p.a][p.b] = -&(&pi2[p.a][p.b] * &inv1(&mu_b));
            p12[p.b][p.a] = -&(&pi2[p.b][p.a] * &inv1(&mu_a));
            // P2 = -(1 ⊗ g⁻¹(1-g⁻¹)⁻¹) Π2 - ½ Π2
            p2[p.a][p.b] = &(-&(&(&pi2[p.a][p.b] * &mu_b) * &inv1(&mu_b))) - &(&half * &pi2[p.a][p.b]);
            p2[p.b][p.a] = &(-&(&(&pi2[p.b][p.a] * &mu_a) * &inv1(&mu_a))) - &(&half * &pi2[p.b][p.a]);
            p3[p.a][p.b] = &p2[p.a][p.b] + &(&half * &pi2[p.a][p.b]);
            p3[p.b][p.a] = &p2[p.b][p.a] + &(&half * &pi2[p.b][p.a]);
            let s = &(&half * &(&one + &lam_inv)) * &inv1(&lam_inv);
            self_loop.push(s);
            let det = &(&one - &lam) * &(&one - &lam_inv);
            vacuum = &vacuum * &det.inv().expect("nontrivial eigenvalue");
        }
        let transpose = |m: &CMatrix| -> CMatrix {
            (0..dim).map(|i| (0..dim).map(|j| m[j][i].clone()).collect()).collect()
        };
        let kernels = PropagatorKernels {
            p12_swap: transpose(&p12),
            p2_swap: transpose(&p2),
            p3_swap: transpose(&p3),
            pi1,
            pi2,
            p12,
            p2,
            p3,
        };
        Ok(Model {
            n,
            k,
            r,
            order,
            perp_eigs: eigs,
            e_twist: e,
            e_twist_inv: e_inv,
            twisted,
            hbar_trunc: 6,
            weight_trunc: 8,
            pairs,
            eig_exp,
            kernels,
            vacuum,
            self_loop,
        })
    }

    pub fn with_truncation(mut self, hbar_trunc: i64, weight_trunc: i64) -> Model {
        self.hbar_trunc = hbar_trunc;
        self.weight_trunc = weight_trunc;
        self
    }

    pub fn nvars(&self) -> usize {
        2 * self.n
    }

    pub fn is_fixed_var(&self, i: usize) -> bool {
        i < 2 * self.k
    }

    /// ω^{ab} as -1, 0 or 1.
    pub fn omega(&self, a: usize, b: usize) -> i64 {
        for p in &self.pairs {
            if p.a == a && p.b == b {
                return 1;
            }
            if p.b == a && p.a == b {
                return -1;
            }
        }
        0
    }

    /// The g-eigenvalue of the coordinate function with index i.
    pub fn eigenvalue(&self, i: usize) -> Cyclo {
        Cyclo::zeta_pow(self.order, self.eig_exp[i])
    }

    /// Eigenvalue of g on a monomial with the given exponents.
    pub fn monomial_eigenvalue(&self, exps: &[u16]) -> Cyclo {
        let e: i64 = exps.iter().zip(&self.eig_exp).map(|(x, l)| *x as i64 * l).sum();
        Cyclo::zeta_pow(self.order, e)
    }

    /// ζ-exponent of g on a monomial, reduced mod N.
    pub fn monomial_eig_exp(&self, exps: &[u16]) -> i64 {
        let e: i64 = exps.iter().zip(&self.eig_exp).map(|(x, l)| *x as i64 * l).sum();
        e.rem_euclid(self.order as i64)
    }

    /// det(1 - g⊥⁻¹)⁻¹.
    pub fn vacuum_factor(&self) -> Cyclo {
        self.vacuum.clone()
    }

    pub fn kernels(&self) -> &PropagatorKernels {
        &self.kernels
    }

    /// Self-loop constant of the j-th rotated pair (twice the P2 entry).
    pub fn self_loop(&self, j: usize) -> &Cyclo {
        &self.self_loop[j]
    }

    pub fn rotated_pairs(&self) -> impl Iterator<Item = (usize, &Pair)> {
        self.pairs.iter().filter(|p| !p.fixed).enumerate()
    }

    pub fn fixed_pairs(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter().filter(|p| p.fixed)
    }

    pub fn var_name(&self, i: usize) -> String {
        if self.is_fixed_var(i) {
            format!("y{}", i + 1)
        } else {
            format!("z{}", i + 1)
        }
    }

    /// g acting on the matrix unit E_ab: e E_ab e⁻¹ = Σ e[c][a] e⁻¹[b][d] E_cd.
    pub fn twist_unit(&self, a: usize, b: usize) -> Vec<(usize, usize, Cyclo)> {
        if !self.twisted {
            return vec![(a, b, Cyclo::one())];
        }
        let mut out = Vec::new();
        for c in 0..self.r {
            if self.e_twist[c][a].is_zero() {
                continue;
            }
            for d in 0..self.r {
                let v = &self.e_twist[c][a] * &self.e_twist_inv[b][d];
                if !v.is_zero() {
                    out.push((c, d, v));
                }
            }
        }
        out
    }

    /// tr(e_twist).
    pub fn twist_trace(&self) -> Cyclo {
        let mut t = Cyclo::zero();
        for i in 0..self.r {
            t += &self.e_twist[i][i];
        }
        t
    }
}
