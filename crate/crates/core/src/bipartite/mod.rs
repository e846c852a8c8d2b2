//! Bipartite entanglement of formation with exact fast paths and a
//! convex-roof upper bound as the general fallback.
//!
//! [`eof`] dispatches in this order:
//!
//! 1. pure global state with a cut covering the register: entropy of the
//!    A marginal;
//! 2. reduce to the cut and drop product blocks that sit entirely on one side
//!    (appending or discarding an uncorrelated local ancilla leaves E_F
//!    unchanged);
//! 3. rank-one remainder: entropy of entanglement;
//! 4. compress onto the local marginal supports; a trivial side means zero;
//! 5. 2⊗2 after compression: Wootters' formula;
//! 6. PPT and either at most 2⊗3 or of rank at most the larger local rank:
//!    certified zero;
//! 7. otherwise: numerical convex-roof minimization (upper bound).

mod compress;
mod convex_roof;

use serde::Serialize;

pub use compress::{
    compress, local_support, ppt_is_separable_indicator, BipartiteDensity, CompressionMap, PRODUCT_TOL,
    SUPPORT_TOL,
};
pub use convex_roof::{convex_roof_upper, RoofBudget};

pub(crate) use compress::{combinations, product_blocks};

use crate::error::{argument, contract, Result};
use crate::qcore::{
    binary_entropy_unchecked, eig_hermitian, matrix_entropy, reduce_ordered, ComplexMatrix, StateObject,
};

/// Two disjoint, nonempty sets of qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut side_a: Vec<usize>, mut side_b: Vec<usize>) -> Result<Self> {
        side_a.sort_unstable();
        side_b.sort_unstable();
        if side_a.is_empty() || side_b.is_empty() {
            return argument("both sides of a bipartition must be nonempty");
        }
        if side_a.windows(2).any(|w| w[0] == w[1]) || side_b.windows(2).any(|w| w[0] == w[1]) {
            return argument("bipartition sides contain repeated indices");
        }
        if side_a.iter().any(|q| side_b.binary_search(q).is_ok()) {
            return argument("bipartition sides overlap");
        }
        Ok(Self { side_a, side_b })
    }

    /// `head : rest` inside a cluster.
    pub fn head_vs_rest(head: usize, cluster: &[usize]) -> Result<Self> {
        if !cluster.contains(&head) {
            return argument(format!("head {head} is not in the cluster"));
        }
        Self::new(vec![head], cluster.iter().copied().filter(|&q| q != head).collect())
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn len(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn check_register(&self, n: usize) -> Result<()> {
        if let Some(q) = self.side_a.iter().chain(&self.side_b).find(|&&q| q >= n) {
            return argument(format!("cut index {q} outside a {n}-qubit register"));
        }
        Ok(())
    }

    pub fn covers(&self, n: usize) -> bool {
        self.len() == n && self.check_register(n).is_ok()
    }
}

/// How an [`EofResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PureEntropy,
    #[serde(rename = "wootters-2x2")]
    Wootters2x2,
    CompressedWootters,
    PptZero,
    ConvexRoofUpper,
}

impl Method {
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::ConvexRoofUpper)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PureEntropy => "pure-entropy",
            Method::Wootters2x2 => "wootters-2x2",
            Method::CompressedWootters => "compressed-wootters",
            Method::PptZero => "ppt-zero",
            Method::ConvexRoofUpper => "convex-roof-upper",
        }
    }
}

/// A bipartite entanglement value in bits with its certified interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EofResult {
    pub value: f64,
    pub method: Method,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// False only when the convex-roof optimizer exhausted its budget.
    pub converged: bool,
}

impl EofResult {
    pub fn exact(value: f64, method: Method) -> Self {
        debug_assert!(method.is_exact());
        Self { value, method, lower_bound: value, upper_bound: value, converged: true }
    }

    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }
}

/// A bipartite entanglement quantifier usable as the base measure of the
/// multipartite construction.
pub trait BipartiteMeasure: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, state: &StateObject, cut: &Bipartition) -> Result<EofResult>;
}

/// Entanglement of formation, the only measure shipped.
#[derive(Clone, Debug, Default)]
pub struct EntanglementOfFormation {
    pub budget: RoofBudget,
}

impl BipartiteMeasure for EntanglementOfFormation {
    fn name(&self) -> &'static str {
        "EoF"
    }

    fn evaluate(&self, state: &StateObject, cut: &Bipartition) -> Result<EofResult> {
        eof_with(state, cut, &self.budget)
    }
}

/// Von Neumann entropy of the A marginal of a pure state.
pub fn entropy_of_entanglement(psi: &StateObject, cut: &Bipartition) -> Result<f64> {
    if !psi.is_pure_vector() {
        return contract("entropy of entanglement needs a pure state");
    }
    if !cut.covers(psi.n_qubits()) {
        return argument("cut must cover the whole register of a pure state");
    }
    matrix_entropy(&reduce_ordered(psi, cut.side_a())?)
}

fn sigma_yy() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
    )
    .expect("constant matrix")
}

/// Wootters concurrence of a 4x4 two-qubit density matrix.
///
/// With `rho = X X^dagger`, `X = [sqrt(l_i) e_i]` over the support, the
/// Wootters values are the singular values of `tau = X^T (σy⊗σy) X`.
pub(crate) fn concurrence_matrix(rho: &ComplexMatrix) -> Result<f64> {
    let (values, vectors) = eig_hermitian(rho)?;
    let cutoff = 1e-15 * values[0].abs().max(1.0);
    let cols: Vec<Vec<num_complex::Complex64>> = values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cutoff)
        .map(|(i, &l)| vectors.column(i).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    if cols.is_empty() {
        return Ok(0.0);
    }
    let x = ComplexMatrix::from_columns(&cols);
    let tau = x.transpose().matmul(&sigma_yy()).matmul(&x);
    let (mu, _) = eig_hermitian(&tau.adjoint().matmul(&tau).hermitian_part())?;
    let mut l: Vec<f64> = mu.iter().map(|&v| v.max(0.0).sqrt()).collect();
    l.resize(4, 0.0);
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)` of a two-qubit state.
pub fn concurrence_2x2(rho: &StateObject) -> Result<f64> {
    if rho.n_qubits() != 2 {
        return argument(format!("concurrence needs a two-qubit state, got {} qubits", rho.n_qubits()));
    }
    concurrence_matrix(&rho.density_matrix())
}

/// `h((1 + sqrt(1 - C^2)) / 2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy_unchecked(small_branch(c * c))
}

/// `(1 - sqrt(1 - eps)) / 2`, evaluated without cancellation for small `eps`.
fn small_branch(eps: f64) -> f64 {
    let eps = eps.clamp(0.0, 1.0);
    eps / (2.0 * (1.0 + (1.0 - eps).sqrt()))
}

/// Entanglement of formation of a two-qubit state via Wootters' formula.
pub fn eof_2x2(rho: &StateObject) -> Result<EofResult> {
    let c = concurrence_2x2(rho)?;
    Ok(EofResult::exact(eof_from_concurrence(c), Method::Wootters2x2))
}

/// Head-versus-rest EoF of a `k`-qubit cluster of `|W_n>`:
/// `h((1 + sqrt(1 - 4(k-1)/n^2)) / 2)`.
pub fn g(k: usize, n: usize) -> Result<f64> {
    if k < 2 || k > n {
        return argument(format!("g(k, n) needs 2 <= k <= n, got k={k}, n={n}"));
    }
    Ok(g_unchecked(k, n))
}

/// `g` extended with `g(1, n) = 0`.
pub(crate) fn g_unchecked(k: usize, n: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    binary_entropy_unchecked(small_branch(4.0 * (k - 1) as f64 / (nf * nf)))
}

/// Entanglement of formation across `cut` with the default optimizer budget.
/// Qubits outside the cut are traced out first.
pub fn eof(state: &StateObject, cut: &Bipartition) -> Result<EofResult> {
    eof_with(state, cut, &RoofBudget::default())
}

pub fn eof_with(state: &StateObject, cut: &Bipartition, budget: &RoofBudget) -> Result<EofResult> {
    let n = state.n_qubits();
    cut.check_register(n)?;
    if state.is_pure_vector() && cut.covers(n) {
        return Ok(EofResult::exact(entropy_of_entanglement(state, cut)?, Method::PureEntropy));
    }
    let full = BipartiteDensity::from_cut(state, cut)?;
    let na = cut.side_a().len();
    let nq = cut.len();

    // Drop product blocks lying entirely on one side of the cut.
    let blocks = product_blocks(&full.rho, nq)?;
    let mut kept: Vec<usize> = blocks
        .into_iter()
        .filter(|b| b.iter().any(|&q| q < na) && b.iter().any(|&q| q >= na))
        .flatten()
        .collect();
    if kept.is_empty() {
        return Ok(EofResult::exact(0.0, Method::PptZero));
    }
    kept.sort_unstable();
    let reduced = kept.len() < nq;
    let working = if reduced {
        let as_state = StateObject::from_density_unchecked(full.rho);
        let ka = kept.iter().filter(|&&q| q < na).count();
        let rho = reduce_ordered(&as_state, &kept)?;
        BipartiteDensity::new(rho, 1 << ka, 1 << (kept.len() - ka))
    } else {
        full
    };
    eof_density(&working, reduced, budget)
}

/// Dispatch on a general bipartite density (steps 3 to 7).
pub(crate) fn eof_density(state: &BipartiteDensity, reduced: bool, budget: &RoofBudget) -> Result<EofResult> {
    if let Some(v) = state.pure_vector()? {
        return Ok(EofResult::exact(pure_vector_entropy(&v, state.dim_a, state.dim_b)?, Method::PureEntropy));
    }
    let original = (state.dim_a, state.dim_b);
    let (small, _) = compress::compress_density(state)?;
    if small.dim_a <= 1 || small.dim_b <= 1 {
        return Ok(EofResult::exact(0.0, Method::PptZero));
    }
    if small.dim_a == 2 && small.dim_b == 2 {
        let c = concurrence_matrix(&small.rho)?;
        let method = if !reduced && original == (2, 2) { Method::Wootters2x2 } else { Method::CompressedWootters };
        return Ok(EofResult::exact(eof_from_concurrence(c), method));
    }
    // PPT is sufficient for separability up to 2⊗3, and for any PPT state
    // whose rank is at most the larger local rank (here the larger dimension,
    // since compression leaves full-rank marginals).
    let low_rank = || -> Result<bool> {
        let (values, _) = eig_hermitian(&small.rho)?;
        let rank = values.iter().filter(|&&l| l > SUPPORT_TOL).count();
        Ok(rank <= small.dim_a.max(small.dim_b))
    };
    if (small.dim_a * small.dim_b <= 6 || low_rank()?) && compress::is_ppt(&small)? {
        return Ok(EofResult::exact(0.0, Method::PptZero));
    }
    convex_roof::roof_result(&small, budget)
}

/// Entropy (bits) of the A marginal of a pure bipartite vector.
pub(crate) fn pure_vector_entropy(v: &[num_complex::Complex64], da: usize, db: usize) -> Result<f64> {
    let m = ComplexMatrix::from_fn(da, db, |a, b| v[a * db + b]);
    let sigma = if da <= db { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(&m) };
    matrix_entropy(&sigma.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_local_unitary, partial_trace, StateBody};
    use crate::random::{haar_unitary, random_density, random_separable};
    use crate::states::{bell, build, ghz, psi_mk, w, w_reduced, zero, StateSpec};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H_TWO_THIRDS: f64 = 0.918_295_834_054_489_6;

    fn cut(a: &[usize], b: &[usize]) -> Bipartition {
        Bipartition::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn low_rank_ppt_states_are_certified_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            // four product terms: rank 4 on a 2⊗4 compressed space
            let rho = random_separable(3, 4, &mut rng);
            let r = eof(&rho, &cut(&[0], &[1, 2])).unwrap();
            assert_eq!((r.value, r.method), (0.0, Method::PptZero));
        }
        // entangled rank-2 state on 2⊗4 is not PPT and goes to the roof
        let rho = random_density(3, 2, &mut rng);
        assert_eq!(eof(&rho, &cut(&[0], &[1, 2])).unwrap().method, Method::ConvexRoofUpper);
    }

    /// Brute-force binary entropy for oracle values.
    fn h(x: f64) -> f64 {
        let mut s = 0.0;
        for p in [x, 1.0 - x] {
            if p > 0.0 {
                s -= p * p.ln() / std::f64::consts::LN_2;
            }
        }
        s
    }

    fn result3(m: usize, k: usize, n: usize) -> f64 {
        let (m, k, n) = (m as f64, k as f64, n as f64);
        h((1.0 + (1.0 - 4.0 * m * (k - m) / (n * n)).sqrt()) / 2.0)
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(vec![], vec![1]).is_err());
        assert!(Bipartition::new(vec![0, 1], vec![1]).is_err());
        assert!(Bipartition::new(vec![0, 0], vec![1]).is_err());
        assert!(Bipartition::head_vs_rest(3, &[0, 1]).is_err());
        let c = Bipartition::head_vs_rest(1, &[2, 1, 0]).unwrap();
        assert_eq!((c.side_a(), c.side_b()), (&[1][..], &[0, 2][..]));
    }

    #[test]
    fn entropy_of_entanglement_examples() {
        for n in 2..=6 {
            let g = ghz(n).unwrap();
            let rest: Vec<usize> = (1..n).collect();
            assert_abs_diff_eq!(entropy_of_entanglement(&g, &cut(&[0], &rest)).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(entropy_of_entanglement(&zero(3).unwrap(), &cut(&[0], &[1, 2])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            entropy_of_entanglement(&w(3).unwrap(), &cut(&[0], &[1, 2])).unwrap(),
            H_TWO_THIRDS,
            epsilon = 1e-12
        );
        let mixed = StateObject::mixed(bell().density_matrix()).unwrap();
        assert!(entropy_of_entanglement(&mixed, &cut(&[0], &[1])).is_err());
        assert!(entropy_of_entanglement(&ghz(3).unwrap(), &cut(&[0], &[1])).is_err());
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence_2x2(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        let mm = StateObject::mixed(ComplexMatrix::diagonal(&[0.25; 4])).unwrap();
        assert_abs_diff_eq!(concurrence_2x2(&mm).unwrap(), 0.0, epsilon = 1e-12);
        assert!(concurrence_2x2(&ghz(3).unwrap()).is_err());
    }

    #[test]
    fn eof_2x2_examples() {
        let r = eof_2x2(&bell()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert_eq!(r.method, Method::Wootters2x2);
        let sep = StateObject::mixed(ComplexMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        assert_abs_diff_eq!(eof_2x2(&sep).unwrap().value, 0.0, epsilon = 1e-12);
        // h((1 + sqrt(5)/3)/2) from C = 2/3
        let r = eof_2x2(&w_reduced(2, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(r.value, h((1.0 + 5f64.sqrt() / 3.0) / 2.0), epsilon = 1e-12);
        assert_abs_diff_eq!(r.value, 0.550_048_2, epsilon = 1e-6);
    }

    #[test]
    fn compressed_w_reduced_concurrence_matches_closed_form() {
        for n in 2..=8 {
            for k in 2..=n {
                let rho = w_reduced(k, n).unwrap();
                for m in 1..k {
                    let a: Vec<usize> = (0..m).collect();
                    let b: Vec<usize> = (m..k).collect();
                    let (small, _) = compress(&rho, &cut(&a, &b)).unwrap();
                    assert_eq!((small.dim_a, small.dim_b), (2, 2));
                    let c = concurrence_matrix(&small.rho).unwrap();
                    let expected = 2.0 * ((m * (k - m)) as f64).sqrt() / n as f64;
                    assert_abs_diff_eq!(c, expected, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn compress_w_reduced_matches_known_isometries() {
        // V_A|0> = |0^m>, V_A|1> = |W_m>; likewise for B with k - m qubits.
        for (m, k, n) in [(1, 2, 3), (1, 3, 4), (2, 4, 5), (2, 5, 7)] {
            let rho = w_reduced(k, n).unwrap();
            let a: Vec<usize> = (0..m).collect();
            let b: Vec<usize> = (m..k).collect();
            let (small, map) = compress(&rho, &cut(&a, &b)).unwrap();
            let known_a = ComplexMatrix::from_columns(&[
                zero(m).unwrap().amplitudes().unwrap().to_vec(),
                w(m).unwrap().amplitudes().unwrap().to_vec(),
            ]);
            let known_b = ComplexMatrix::from_columns(&[
                zero(k - m).unwrap().amplitudes().unwrap().to_vec(),
                w(k - m).unwrap().amplitudes().unwrap().to_vec(),
            ]);
            let ua = known_a.adjoint().matmul(&map.iso_a);
            let ub = known_b.adjoint().matmul(&map.iso_b);
            assert!(ua.is_unitary(1e-10) && ub.is_unitary(1e-10));
            let u = crate::qcore::kron(&ua, &ub).unwrap();
            let aligned = u.matmul(&small.rho).matmul(&u.adjoint());
            let frac = k as f64 / n as f64;
            let psi = psi_mk(m, k).unwrap();
            let mut expected = ComplexMatrix::projector(psi.amplitudes().unwrap()).scale_real(frac);
            expected[(0, 0)] += num_complex::Complex64::new(1.0 - frac, 0.0);
            assert!(aligned.max_abs_diff(&expected) < 1e-10, "m={m} k={k} n={n}");

            // expanding reconstructs the original cut state
            let big = BipartiteDensity::from_cut(&rho, &cut(&a, &b)).unwrap();
            assert!(map.expand(&small).rho.max_abs_diff(&big.rho) < 1e-10);
            assert!(map.iso_a.has_orthonormal_columns(1e-10) && map.iso_b.has_orthonormal_columns(1e-10));
        }
    }

    #[test]
    fn compress_product_is_scalar() {
        let (small, _) = compress(&zero(3).unwrap(), &cut(&[0], &[1, 2])).unwrap();
        assert_eq!((small.dim_a, small.dim_b), (1, 1));
    }

    #[test]
    fn compress_ghz_marginal_is_classical() {
        let rho = partial_trace(&ghz(4).unwrap(), &[0, 1, 2]).unwrap();
        let (small, _) = compress(&rho, &cut(&[0], &[1, 2])).unwrap();
        assert_eq!((small.dim_a, small.dim_b), (2, 2));
        let off_diag: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|(i, j)| i != j)
            .map(|(i, j)| small.rho[(i, j)].norm()).sum();
        assert!(off_diag < 1e-12);
        assert_abs_diff_eq!(concurrence_matrix(&small.rho).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn g_examples() {
        assert_abs_diff_eq!(g(2, 2).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g(3, 3).unwrap(), H_TWO_THIRDS, epsilon = 1e-12);
        let via_wootters = eof_2x2(&w_reduced(2, 3).unwrap()).unwrap().value;
        assert_abs_diff_eq!(g(2, 3).unwrap(), via_wootters, epsilon = 1e-12);
        assert!(g(1, 3).is_err());
        assert!(g(4, 3).is_err());
        assert_eq!(g_unchecked(1, 5), 0.0);
    }

    #[test]
    fn eof_result3_identity() {
        for n in 2..=8 {
            let wn = w(n).unwrap();
            for k in 2..=n {
                for m in 1..k {
                    let a: Vec<usize> = (0..m).collect();
                    let b: Vec<usize> = (m..k).collect();
                    let r = eof(&wn, &cut(&a, &b)).unwrap();
                    assert!(r.method.is_exact(), "{:?}", r.method);
                    assert_abs_diff_eq!(r.value, result3(m, k, n), epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn eof_dispatch_examples() {
        let g5 = ghz(5).unwrap();
        for cluster in [vec![0, 1], vec![0, 2, 4], vec![1, 2, 3, 4]] {
            let r = eof(&g5, &Bipartition::head_vs_rest(cluster[0], &cluster).unwrap()).unwrap();
            assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
            assert!(r.method.is_exact());
        }
        let prod = build(&StateSpec::parse("bell*bell").unwrap()).unwrap();
        let r = eof(&prod, &cut(&[0, 1], &[2, 3])).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
        let r = eof(&prod, &cut(&[0], &[1, 2])).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert_eq!(r.method, Method::PureEntropy);

        let r = eof(&bell(), &cut(&[0], &[1])).unwrap();
        assert_eq!(r.method, Method::PureEntropy);
        let r = eof(&StateObject::mixed(bell().density_matrix()).unwrap(), &cut(&[0], &[1])).unwrap();
        assert_eq!(r.method, Method::PureEntropy);
        let r = eof(&w_reduced(2, 3).unwrap(), &cut(&[0], &[1])).unwrap();
        assert_eq!(r.method, Method::Wootters2x2);
        let r = eof(&w(4).unwrap(), &cut(&[0], &[1, 2])).unwrap();
        assert_eq!(r.method, Method::CompressedWootters);
        assert!(eof(&ghz(3).unwrap(), &cut(&[0], &[3])).is_err());
    }

    #[test]
    fn pure_two_qubit_methods_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let psi = crate::random::random_pure(2, &mut rng);
            let a = entropy_of_entanglement(&psi, &cut(&[0], &[1])).unwrap();
            let rho = StateObject::mixed(psi.density_matrix().hermitian_part()).unwrap();
            let b = eof_from_concurrence(concurrence_2x2(&rho).unwrap());
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn concurrence_bounds_and_monotone_eof() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pairs = Vec::new();
        for i in 0..10_000 {
            let rho = random_density(2, 1 + i % 4, &mut rng);
            let c = concurrence_2x2(&rho).unwrap();
            assert!((0.0..=1.0).contains(&c));
            pairs.push((c, eof_from_concurrence(c)));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pairs.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-15));
    }

    #[test]
    fn local_unitary_invariance_of_eof() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = w(4).unwrap();
        let c = cut(&[0], &[1, 2]);
        let before = eof(&base, &c).unwrap().value;
        let mut s = base.clone();
        for q in 0..4 {
            s = apply_local_unitary(&s, &haar_unitary(2, &mut rng), q).unwrap();
        }
        assert_abs_diff_eq!(eof(&s, &c).unwrap().value, before, epsilon = 1e-8);
        assert!(matches!(s.body(), StateBody::Pure(_)));
    }
}
