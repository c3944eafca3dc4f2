//! Proof states on the vertex ⊗ color space, their block decomposition, and
//! the quantum/classical distances.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::csp::Coloring;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `sum |amp|^2 = 1`.
pub const NORM_TOL: f64 = 1e-10;

/// Blocks with norm at or below this are treated as empty by [`decompose`].
pub const ZERO_BLOCK: f64 = 1e-12;

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Pure state in `H_n ⊗ H_K`, amplitude of `|i>|j>` at index `i * K + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofState {
    n: usize,
    k: usize,
    amps: Vec<C64>,
}

impl ProofState {
    /// Rejects inputs whose squared norm is further than [`NORM_TOL`] from 1.
    pub fn new(n: usize, k: usize, amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(n, k, &amps)?;
        let ns = norm_sqr(&amps);
        if (ns - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(ns));
        }
        Ok(Self { n, k, amps })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(n: usize, k: usize, mut amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(n, k, &amps)?;
        let ns = norm_sqr(&amps);
        if !(ns > 0.0) || !ns.is_finite() {
            return Err(Error::NotNormalized(ns));
        }
        let scale = 1.0 / ns.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok(Self { n, k, amps })
    }

    fn check_shape(n: usize, k: usize, amps: &[C64]) -> Result<()> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("empty register: n = {n}, K = {k}")));
        }
        if amps.len() != n * k {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for n = {n}, K = {k}",
                amps.len()
            )));
        }
        Ok(())
    }

    /// Computational basis state `|i>|j>`.
    pub fn basis(n: usize, k: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= k {
            return Err(Error::InvalidArgument(format!("basis index ({i}, {j}) out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n * k];
        amps[i * k + j] = C64::new(1.0, 0.0);
        Self::new(n, k, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, i: usize, j: usize) -> C64 {
        self.amps[i * self.k + j]
    }

    /// Amplitudes of vertex block `i`.
    pub fn block(&self, i: usize) -> &[C64] {
        &self.amps[i * self.k..(i + 1) * self.k]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ProofState) -> Result<C64> {
        self.check_same_dims(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn check_same_dims(&self, other: &ProofState) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch(format!(
                "(n, K) = ({}, {}) vs ({}, {})",
                self.n, self.k, other.n, other.k
            )));
        }
        Ok(())
    }

    /// Outcome probabilities of a computational-basis measurement.
    pub fn basis_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `exp(i theta)`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Self { n: self.n, k: self.k, amps: self.amps.iter().map(|a| a * ph).collect() }
    }

    /// Relabels vertices: block `i` moves to `perm[i]`.
    pub fn permute_vertices(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for n = {}",
                perm.len(),
                self.n
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, &p) in perm.iter().enumerate() {
            amps[p * self.k..(p + 1) * self.k].copy_from_slice(self.block(i));
        }
        Ok(Self { n: self.n, k: self.k, amps })
    }
}

/// `|psi> = sum_i alpha_i |i> sum_j beta_{i,j} |j>` with `alpha_i >= 0` real
/// and every row of `beta` unit-norm. Phases live in `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    k: usize,
    alpha: Vec<f64>,
    beta: Vec<C64>,
    beta_row_sum: Vec<C64>,
}

impl BlockDecomposition {
    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta_row(&self, i: usize) -> &[C64] {
        &self.beta[i * self.k..(i + 1) * self.k]
    }

    /// `beta_i = sum_j beta_{i,j}`.
    pub fn beta_row_sum(&self) -> &[C64] {
        &self.beta_row_sum
    }

    /// `alpha_i * beta_{i,j}` for every `(i, j)`.
    pub fn recompose(&self) -> Vec<C64> {
        self.beta
            .chunks(self.k)
            .zip(&self.alpha)
            .flat_map(|(row, &a)| row.iter().map(move |b| b * a))
            .collect()
    }
}

/// Splits a state into vertex weights and per-vertex color rows. Empty
/// blocks get the canonical row `(1, 0, ..., 0)`.
pub fn decompose(s: &ProofState) -> Result<BlockDecomposition> {
    let ns = norm_sqr(&s.amps);
    if (ns - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(ns));
    }
    let k = s.k;
    let mut alpha = Vec::with_capacity(s.n);
    let mut beta = Vec::with_capacity(s.amps.len());
    for block in s.amps.chunks(k) {
        let a = norm_sqr(block).sqrt();
        if a > ZERO_BLOCK {
            beta.extend(block.iter().map(|x| x / a));
            alpha.push(a);
        } else {
            beta.push(C64::new(1.0, 0.0));
            beta.extend(core::iter::repeat_n(C64::new(0.0, 0.0), k - 1));
            alpha.push(0.0);
        }
    }
    let beta_row_sum = beta.chunks(k).map(|row| row.iter().sum()).collect();
    Ok(BlockDecomposition { k, alpha, beta, beta_row_sum })
}

/// Two unentangled proofs with matching dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofPair {
    pub psi: ProofState,
    pub phi: ProofState,
}

impl ProofPair {
    pub fn new(psi: ProofState, phi: ProofState) -> Result<Self> {
        psi.check_same_dims(&phi)?;
        Ok(Self { psi, phi })
    }

    /// The same state on both sides.
    pub fn twin(s: ProofState) -> Self {
        Self { psi: s.clone(), phi: s }
    }

    pub fn n(&self) -> usize {
        self.psi.n
    }

    pub fn k(&self) -> usize {
        self.psi.k
    }
}

/// `(1/sqrt n) sum_i |i>|c(i)>`.
pub fn proper_state(n: usize, k: usize, c: &Coloring) -> Result<ProofState> {
    if c.len() != n {
        return Err(Error::InvalidColoring(format!("length {} for n = {n}", c.len())));
    }
    if c.colors().iter().any(|&x| x >= k) {
        return Err(Error::InvalidColoring(format!("color outside 0..{k}")));
    }
    let mut amps = vec![C64::new(0.0, 0.0); n * k];
    let w = 1.0 / (n as f64).sqrt();
    for (i, &col) in c.colors().iter().enumerate() {
        amps[i * k + col] = C64::new(w, 0.0);
    }
    ProofState::new(n, k, amps)
}

/// Normalized i.i.d. complex Gaussian amplitudes, deterministic per seed.
pub fn random_state(n: usize, k: usize, seed: u64) -> ProofState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..n * k)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    ProofState::normalized(n, k, amps).expect("a Gaussian draw is nonzero")
}

/// `sqrt(1 - |<a|b>|^2)`, clamped to `[0, 1]`.
pub fn quantum_distance(a: &ProofState, b: &ProofState) -> Result<f64> {
    let ov = a.inner(b)?.norm_sqr();
    Ok((1.0 - ov).clamp(0.0, 1.0).sqrt())
}

/// Total variation distance `(1/2) sum |p_i - q_i|`.
pub fn classical_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution(format!(
            "support sizes {} and {} differ",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("p", p), ("q", q)] {
        if d.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("{name} has a negative entry")));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("{name} sums to {s}")));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S2: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn decompose_basis_state() {
        let s = ProofState::basis(3, 2, 2, 1).unwrap();
        let d = decompose(&s).unwrap();
        assert_eq!(d.alpha(), &[0.0, 0.0, 1.0]);
        assert_eq!(d.beta_row(2), &[c(0.0), c(1.0)]);
        assert_eq!(d.beta_row(0), &[c(1.0), c(0.0)]);
        assert_eq!(d.beta_row(1), &[c(1.0), c(0.0)]);
    }

    #[test]
    fn decompose_proper_state() {
        let s = proper_state(2, 2, &Coloring::new(vec![0, 1])).unwrap();
        let d = decompose(&s).unwrap();
        for &a in d.alpha() {
            assert!((a - S2).abs() < 1e-15);
        }
        assert!((d.beta_row(0)[0] - c(1.0)).norm() < 1e-15);
        assert!((d.beta_row(1)[1] - c(1.0)).norm() < 1e-15);
        assert!(d.beta_row(1)[0].norm() < 1e-15);
    }

    #[test]
    fn decompose_uniform_state() {
        let (n, k) = (4, 3);
        let s = ProofState::normalized(n, k, vec![c(1.0); n * k]).unwrap();
        let d = decompose(&s).unwrap();
        for i in 0..n {
            assert!((d.alpha()[i] - 0.5).abs() < 1e-15);
            for b in d.beta_row(i) {
                assert!((b - c(1.0 / 3f64.sqrt())).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn decompose_rejects_unnormalized() {
        let s = ProofState { n: 1, k: 2, amps: vec![c(1.0), c(1.0)] };
        assert!(matches!(decompose(&s), Err(Error::NotNormalized(_))));
        assert!(ProofState::new(1, 2, vec![c(1.0), c(1.0)]).is_err());
        assert!(ProofState::new(1, 2, vec![c(1.0)]).is_err());
    }

    #[test]
    fn proper_state_examples() {
        let s = proper_state(1, 3, &Coloring::new(vec![2])).unwrap();
        assert_eq!(s, ProofState::basis(1, 3, 0, 2).unwrap());
        let s = proper_state(3, 3, &Coloring::new(vec![0, 1, 2])).unwrap();
        let nz: Vec<_> = s.amps().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 3);
        for a in nz {
            assert!((a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn proper_overlap_counts_agreements() {
        let a = proper_state(4, 3, &Coloring::new(vec![0, 1, 2, 0])).unwrap();
        let b = proper_state(4, 3, &Coloring::new(vec![0, 2, 2, 1])).unwrap();
        let ov = a.inner(&b).unwrap();
        assert!((ov - c(0.5)).norm() < 1e-15);
        assert!((quantum_distance(&a, &b).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_state_contract() {
        let a = random_state(5, 3, 7);
        assert!((norm_sqr(a.amps()) - 1.0).abs() < 1e-12);
        assert_eq!(a, random_state(5, 3, 7));
        assert_ne!(a, random_state(5, 3, 8));
    }

    #[test]
    fn random_state_block_mass_is_symmetric() {
        let (n, k, trials) = (4, 3, 10_000);
        let mut mass = [0.0f64; 4];
        for seed in 0..trials {
            let d = decompose(&random_state(n, k, seed)).unwrap();
            for (m, a) in mass.iter_mut().zip(d.alpha()) {
                *m += a * a;
            }
        }
        for m in mass {
            assert!((m / trials as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn distances() {
        let a = ProofState::basis(2, 2, 0, 0).unwrap();
        let b = ProofState::basis(2, 2, 1, 0).unwrap();
        assert_eq!(quantum_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(quantum_distance(&a, &b).unwrap(), 1.0);
        assert!(quantum_distance(&a, &ProofState::basis(1, 2, 0, 0).unwrap()).is_err());

        assert_eq!(classical_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(classical_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(classical_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert!(classical_distance(&[0.5, 0.6], &[1.0, 0.0]).is_err());
        assert!(classical_distance(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn zero_block_row_is_canonical_and_inert() {
        let s = ProofState::new(2, 3, vec![c(0.0), c(0.0), c(0.0), c(0.6), c(0.0), c(-0.8)])
            .unwrap();
        let d = decompose(&s).unwrap();
        assert_eq!(d.beta_row(0), &[c(1.0), c(0.0), c(0.0)]);
        assert_eq!(d.recompose(), s.amps().to_vec());
    }

    #[test]
    fn lemma41_on_random_rows() {
        // max_j |beta_ij|^2 >= 1/K on every normalized row
        for seed in 0..100_000u64 {
            let k = 2 + (seed % 7) as usize;
            let row = random_state(1, k, seed);
            let m = row.amps().iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
            assert!(m >= 1.0 / k as f64 - 1e-12);
        }
    }

    fn arb_state() -> impl Strategy<Value = ProofState> {
        (1usize..6, 1usize..5, any::<u64>()).prop_map(|(n, k, seed)| random_state(n, k, seed))
    }

    proptest! {
        #[test]
        fn decompose_round_trip(s in arb_state()) {
            let d = decompose(&s).unwrap();
            let sum_a: f64 = d.alpha().iter().map(|a| a * a).sum();
            prop_assert!((sum_a - 1.0).abs() < 1e-10);
            for i in 0..s.n() {
                let r: f64 = d.beta_row(i).iter().map(|b| b.norm_sqr()).sum();
                prop_assert!((r - 1.0).abs() < 1e-10);
            }
            for (x, y) in d.recompose().iter().zip(s.amps()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
        }

        #[test]
        fn measured_distance_below_quantum_distance(
            n in 1usize..7, k in 1usize..4, sa in any::<u64>(), sb in any::<u64>()
        ) {
            let a = random_state(n, k, sa);
            let b = random_state(n, k, sb);
            let dc = classical_distance(&a.basis_distribution(), &b.basis_distribution()).unwrap();
            prop_assert!(dc <= quantum_distance(&a, &b).unwrap() + 1e-9);
        }
    }
}
