//! Numerical convex-roof minimization of the entanglement of formation.
//!
//! A mixed state `rho = sum_i l_i |e_i><e_i|` of rank `r` is decomposed as
//! `|phi_j> = sum_i U_ji sqrt(l_i) |e_i>` for `j < K = r^2`, where `U` is a
//! `K x r` matrix with orthonormal columns. Every such `U` yields a valid
//! pure-state ensemble, so the average marginal entropy at any `U` is an upper
//! bound on E_F. The search runs Riemannian steepest descent on the Stiefel
//! manifold with Armijo backtracking: first on the linear entropy (smooth,
//! zero exactly on product ensembles), then on the von Neumann entropy.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::compress::{BipartiteDensity, SUPPORT_TOL};
use super::{Bipartition, EofResult, Method};
use crate::error::{argument, Result};
use crate::qcore::{eig_hermitian, ComplexMatrix, StateObject, ZERO};
use crate::random::haar_unitary;

/// Optimizer settings for [`convex_roof_upper`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoofBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for RoofBudget {
    fn default() -> Self {
        Self { restarts: 16, iterations: 2000, seed: 0x0005_EED0_FE0F }
    }
}

/// Upper bound on the entanglement of formation across a cut covering the
/// register, by minimizing over pure-state decompositions.
pub fn convex_roof_upper(rho: &StateObject, cut: &Bipartition, budget: &RoofBudget) -> Result<EofResult> {
    if !cut.covers(rho.n_qubits()) {
        return argument("convex roof needs a cut covering the register");
    }
    roof_result(&BipartiteDensity::from_cut(rho, cut)?, budget)
}

pub(crate) fn roof_result(state: &BipartiteDensity, budget: &RoofBudget) -> Result<EofResult> {
    let outcome = minimize(state, budget)?;
    Ok(EofResult {
        value: outcome.bits,
        method: Method::ConvexRoofUpper,
        lower_bound: outcome.lower_bits,
        upper_bound: outcome.bits,
        converged: outcome.converged,
    })
}

struct Outcome {
    bits: f64,
    lower_bits: f64,
    converged: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Objective {
    Linear,
    VonNeumann,
}

/// The eigen-ensemble and problem sizes. `dim_a <= dim_b` always holds.
struct Roof {
    da: usize,
    db: usize,
    rank: usize,
    terms: usize,
    vecs: Vec<Vec<Complex64>>,
}

const ARMIJO: f64 = 1e-4;
const LINEAR_FLOOR: f64 = 1e-22;
const VN_FLOOR: f64 = 1e-16;

fn minimize(state: &BipartiteDensity, budget: &RoofBudget) -> Result<Outcome> {
    let state = if state.dim_a > state.dim_b { state.swapped() } else { state.clone() };
    let (values, vectors) = eig_hermitian(&state.rho)?;
    let vecs: Vec<Vec<Complex64>> = values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SUPPORT_TOL)
        .map(|(i, &l)| vectors.column(i).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let rank = vecs.len();
    let roof = Roof { da: state.dim_a, db: state.dim_b, rank, terms: rank * rank, vecs };

    if rank <= 1 {
        let bits = if rank == 1 { roof.value(&[Complex64::new(1.0, 0.0)], Objective::VonNeumann, false).0 } else { 0.0 }
            / std::f64::consts::LN_2;
        return Ok(Outcome { bits, lower_bits: bits, converged: true });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best = f64::INFINITY;
    let mut converged = false;
    let linear_iters = budget.iterations / 2;
    let vn_iters = budget.iterations - linear_iters;
    for restart in 0..budget.restarts.max(1) {
        let mut u = if restart == 0 { roof.eigen_start() } else { roof.random_start(&mut rng) };
        best = best.min(roof.value(&u, Objective::VonNeumann, false).0);
        roof.descend(&mut u, Objective::Linear, linear_iters);
        best = best.min(roof.value(&u, Objective::VonNeumann, false).0);
        let run = roof.descend(&mut u, Objective::VonNeumann, vn_iters);
        best = best.min(run.value);
        converged |= run.converged;
        if best <= VN_FLOOR {
            converged = true;
            break;
        }
    }
    let bits = (best / std::f64::consts::LN_2).max(0.0);
    Ok(Outcome { bits, lower_bits: 0.0, converged })
}

struct Run {
    value: f64,
    converged: bool,
}

impl Roof {
    fn eigen_start(&self) -> Vec<Complex64> {
        let mut u = vec![ZERO; self.terms * self.rank];
        for i in 0..self.rank {
            u[i * self.rank + i] = Complex64::new(1.0, 0.0);
        }
        u
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let full = haar_unitary(self.terms, rng);
        let mut u = Vec::with_capacity(self.terms * self.rank);
        for j in 0..self.terms {
            for i in 0..self.rank {
                u.push(full[(j, i)]);
            }
        }
        u
    }

    /// Objective in nats and, when requested, its Euclidean gradient with
    /// respect to conj(U), row-major `terms x rank`.
    fn value(&self, u: &[Complex64], objective: Objective, want_grad: bool) -> (f64, Vec<Complex64>) {
        let (da, db, r) = (self.da, self.db, self.rank);
        let d = da * db;
        let mut total = 0.0;
        let mut grad = if want_grad { vec![ZERO; u.len()] } else { Vec::new() };
        let mut psi = vec![ZERO; d];
        let mut g = vec![ZERO; d];
        for j in 0..u.len() / r {
            psi.iter_mut().for_each(|z| *z = ZERO);
            for i in 0..r {
                let c = u[j * r + i];
                if c != ZERO {
                    psi.iter_mut().zip(&self.vecs[i]).for_each(|(p, v)| *p += c * v);
                }
            }
            let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if p < 1e-300 {
                continue;
            }
            // sigma = M M^dagger with M[a][b] = psi[a * db + b]
            let sigma = ComplexMatrix::from_fn(da, da, |a, c| {
                (0..db).map(|b| psi[a * db + b] * psi[c * db + b].conj()).sum()
            });
            // left factor L so that dF/dconj(M) = L M
            let left = match objective {
                Objective::Linear => {
                    let purity: f64 = sigma.as_slice().iter().map(|z| z.norm_sqr()).sum();
                    total += p - purity / p;
                    if !want_grad {
                        continue;
                    }
                    let mut l = sigma.scale_real(-2.0 / p);
                    for a in 0..da {
                        l[(a, a)] += Complex64::new(1.0 + purity / (p * p), 0.0);
                    }
                    l
                }
                Objective::VonNeumann => {
                    let (mu, w) = herm_eig(&sigma);
                    let lnp = p.ln();
                    total += p * lnp;
                    let mut l = ComplexMatrix::zeros(da, da);
                    for (idx, &m) in mu.iter().enumerate() {
                        if m <= 0.0 {
                            continue;
                        }
                        total -= m * m.ln();
                        if want_grad {
                            let coeff = -(m.ln() - lnp);
                            for a in 0..da {
                                for c in 0..da {
                                    l[(a, c)] += w[(a, idx)] * w[(c, idx)].conj() * coeff;
                                }
                            }
                        }
                    }
                    if !want_grad {
                        continue;
                    }
                    l
                }
            };
            for a in 0..da {
                for b in 0..db {
                    g[a * db + b] = (0..da).map(|c| left[(a, c)] * psi[c * db + b]).sum();
                }
            }
            for i in 0..r {
                grad[j * r + i] = g.iter().zip(&self.vecs[i]).map(|(x, v)| x * v.conj()).sum();
            }
        }
        (total, grad)
    }

    /// Riemannian conjugate gradient (Polak-Ribiere+, transport by
    /// projection) with Armijo backtracking.
    fn descend(&self, u: &mut Vec<Complex64>, objective: Objective, iterations: usize) -> Run {
        let floor = if objective == Objective::Linear { LINEAR_FLOOR } else { VN_FLOOR };
        let grad_tol = if objective == Objective::Linear { 1e-13 } else { 1e-9 };
        let (mut f, gamma) = self.value(u, objective, true);
        let mut grad = self.tangent(u, &gamma);
        let mut dir: Vec<Complex64> = grad.iter().map(|z| -z).collect();
        let mut step: f64 = 1.0;
        for _ in 0..iterations {
            if f <= floor {
                return Run { value: f, converged: true };
            }
            let gn2 = norm_sqr(&grad);
            if gn2.sqrt() < grad_tol {
                return Run { value: f, converged: true };
            }
            // df along dir is 2 Re<grad, dir>
            let mut slope = 2.0 * inner_re(&grad, &dir);
            if slope >= 0.0 {
                dir = grad.iter().map(|z| -z).collect();
                slope = -2.0 * gn2;
            }
            let mut t = (step * 2.0).min(1e3);
            let mut accepted = None;
            for _ in 0..60 {
                let cand = self.retract(u, &dir, t);
                let fc = self.value(&cand, objective, false).0;
                if fc <= f + ARMIJO * t * slope {
                    accepted = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, _)) = accepted else {
                if dir.iter().zip(&grad).all(|(d, g)| *d == -g) {
                    // no descent left at double precision
                    return Run { value: f, converged: true };
                }
                dir = grad.iter().map(|z| -z).collect();
                continue;
            };
            *u = cand;
            step = t;
            let gamma;
            (f, gamma) = self.value(u, objective, true);
            let new_grad = self.tangent(u, &gamma);
            let moved_grad = self.tangent(u, &grad);
            let beta = (inner_re(&new_grad, &new_grad) - inner_re(&new_grad, &moved_grad)) / gn2;
            let moved_dir = self.tangent(u, &dir);
            dir = new_grad.iter().zip(&moved_dir).map(|(g, d)| -g + d * beta.max(0.0)).collect();
            grad = new_grad;
        }
        Run { value: f, converged: false }
    }

    /// Projection of the Euclidean gradient onto the Stiefel tangent space:
    /// `G - U sym(U^dagger G)`.
    fn tangent(&self, u: &[Complex64], gamma: &[Complex64]) -> Vec<Complex64> {
        let r = self.rank;
        let k = u.len() / r;
        let mut ug = vec![ZERO; r * r];
        for a in 0..r {
            for b in 0..r {
                ug[a * r + b] = (0..k).map(|j| u[j * r + a].conj() * gamma[j * r + b]).sum();
            }
        }
        let mut out = gamma.to_vec();
        for j in 0..k {
            for b in 0..r {
                let mut s = ZERO;
                for a in 0..r {
                    let sym = (ug[a * r + b] + ug[b * r + a].conj()) * 0.5;
                    s += u[j * r + a] * sym;
                }
                out[j * r + b] -= s;
            }
        }
        out
    }

    /// `qf(U + t D)`: Gram-Schmidt on the columns (applied twice).
    fn retract(&self, u: &[Complex64], dir: &[Complex64], t: f64) -> Vec<Complex64> {
        let r = self.rank;
        let k = u.len() / r;
        let mut cols: Vec<Vec<Complex64>> =
            (0..r).map(|i| (0..k).map(|j| u[j * r + i] + dir[j * r + i] * t).collect()).collect();
        for _ in 0..2 {
            for i in 0..r {
                for prev in 0..i {
                    let (done, rest) = cols.split_at_mut(i);
                    let q = &done[prev];
                    let overlap: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                    rest[0].iter_mut().zip(q).for_each(|(x, a)| *x -= overlap * a);
                }
                let norm = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                cols[i].iter_mut().for_each(|z| *z /= norm);
            }
        }
        let mut out = vec![ZERO; k * r];
        for (i, col) in cols.iter().enumerate() {
            for (j, z) in col.iter().enumerate() {
                out[j * r + i] = *z;
            }
        }
        out
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn inner_re(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Eigenpairs of a small Hermitian matrix, closed form for 2x2.
fn herm_eig(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    if m.rows() != 2 {
        return eig_hermitian(&m.hermitian_part()).expect("Gram matrix is Hermitian");
    }
    let a = m[(0, 0)].re;
    let c = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let delta = (half * half + b.norm_sqr()).sqrt();
    let (hi, lo) = (mean + delta, mean - delta);
    if b.norm() == 0.0 {
        let (v0, v1) = if a >= c { ((1.0, 0.0), (0.0, 1.0)) } else { ((0.0, 1.0), (1.0, 0.0)) };
        let vecs = ComplexMatrix::from_fn(2, 2, |i, j| {
            let v = if j == 0 { v0 } else { v1 };
            Complex64::new(if i == 0 { v.0 } else { v.1 }, 0.0)
        });
        return (vec![hi, lo], vecs);
    }
    // two representations of the top eigenvector; keep the better conditioned
    let x = [b, Complex64::new(hi - a, 0.0)];
    let y = [Complex64::new(hi - c, 0.0), b.conj()];
    let nx = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
    let ny = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
    let top = if nx >= ny { [x[0] / nx, x[1] / nx] } else { [y[0] / ny, y[1] / ny] };
    let bottom = [-top[1].conj(), top[0].conj()];
    let vecs = ComplexMatrix::from_fn(2, 2, |i, j| if j == 0 { top[i] } else { bottom[i] });
    (vec![hi, lo], vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{eof_2x2, eof_from_concurrence, entropy_of_entanglement, g};
    use crate::random::{random_density, random_pure, random_separable};
    use crate::states::{w, w_reduced};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn cut(a: &[usize], b: &[usize]) -> Bipartition {
        Bipartition::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn herm_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let m = crate::random::random_hermitian(2, &mut rng);
            let (mu, v) = herm_eig(&m);
            let back = v.matmul(&ComplexMatrix::diagonal(&mu)).matmul(&v.adjoint());
            assert!(back.max_abs_diff(&m) < 1e-12);
            assert!(mu[0] >= mu[1]);
        }
        let (mu, _) = herm_eig(&ComplexMatrix::diagonal(&[0.2, 0.7]));
        assert_abs_diff_eq!(mu[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(mu[1], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density(3, 3, &mut rng);
        let bd = BipartiteDensity::from_cut(&rho, &cut(&[0], &[1, 2])).unwrap();
        let (values, vectors) = eig_hermitian(&bd.rho).unwrap();
        let vecs: Vec<Vec<Complex64>> = (0..3).map(|i| vectors.column(i).into_iter().map(|z| z * values[i].sqrt()).collect()).collect();
        let roof = Roof { da: 2, db: 4, rank: 3, terms: 9, vecs };
        let u = roof.random_start(&mut rng);
        for obj in [Objective::Linear, Objective::VonNeumann] {
            let (_, grad) = roof.value(&u, obj, true);
            let h = 1e-6;
            for idx in [0, 4, 13, 26] {
                for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                    let mut up = u.clone();
                    up[idx] += dir * h;
                    let mut dn = u.clone();
                    dn[idx] -= dir * h;
                    let fd = (roof.value(&up, obj, false).0 - roof.value(&dn, obj, false).0) / (2.0 * h);
                    // df = 2 Re(conj(grad) dU)
                    let analytic = 2.0 * (grad[idx].conj() * dir).re;
                    assert_abs_diff_eq!(fd, analytic, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn pure_input_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_pure(3, &mut rng);
        let c = cut(&[0], &[1, 2]);
        let rho = StateObject::mixed(psi.density_matrix().hermitian_part()).unwrap();
        let r = convex_roof_upper(&rho, &c, &RoofBudget::default()).unwrap();
        assert_abs_diff_eq!(r.value, entropy_of_entanglement(&psi, &c).unwrap(), epsilon = 1e-9);
        assert_eq!(r.method, Method::ConvexRoofUpper);
    }

    #[test]
    fn matches_wootters_on_w_pair() {
        let rho = w_reduced(2, 3).unwrap();
        let r = convex_roof_upper(&rho, &cut(&[0], &[1]), &RoofBudget::default()).unwrap();
        let exact = eof_2x2(&rho).unwrap().value;
        assert!(r.value >= exact - 1e-12);
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-4);
    }

    #[test]
    fn uncompressed_w_cluster_matches_closed_form() {
        let rho = crate::qcore::partial_trace(&w(4).unwrap(), &[0, 1, 2]).unwrap();
        let r = convex_roof_upper(&rho, &cut(&[0], &[1, 2]), &RoofBudget::default()).unwrap();
        let expected = g(3, 4).unwrap();
        assert!(r.value >= expected - 1e-12);
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-3);
    }

    #[test]
    fn upper_bounds_wootters_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..12 {
            let rho = random_density(2, 2 + trial % 3, &mut rng);
            let exact = eof_from_concurrence(crate::bipartite::concurrence_2x2(&rho).unwrap());
            let r = convex_roof_upper(&rho, &cut(&[0], &[1]), &RoofBudget::default()).unwrap();
            assert!(r.value >= exact - 1e-12, "trial {trial}: {} < {exact}", r.value);
            assert!(r.value - exact <= 1e-3, "trial {trial}: gap {}", r.value - exact);
            assert!(r.lower_bound <= r.value && r.value <= r.upper_bound);
        }
    }

    #[test]
    fn separable_mixture_reaches_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let rho = random_separable(3, 3, &mut rng);
            let r = convex_roof_upper(&rho, &cut(&[0], &[1, 2]), &RoofBudget::default()).unwrap();
            assert!(r.value <= 1e-6, "{}", r.value);
        }
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rho = random_density(2, 3, &mut rng);
        let budget = RoofBudget { restarts: 3, iterations: 300, seed: 99 };
        let a = convex_roof_upper(&rho, &cut(&[0], &[1]), &budget).unwrap();
        let b = convex_roof_upper(&rho, &cut(&[0], &[1]), &budget).unwrap();
        assert_eq!(a, b);
    }
}
