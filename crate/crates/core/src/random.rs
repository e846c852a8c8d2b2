//! Seeded random unitaries and states.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qcore::{kron_vec, ComplexMatrix, StateObject, ONE};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random `dim x dim` unitary: Gram-Schmidt QR of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(q).for_each(|(x, a)| *x -= overlap * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        // Gram-Schmidt leaves R's diagonal real and positive, which is the
        // phase convention that makes Q Haar distributed.
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_columns(&cols)
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure(n: usize, rng: &mut impl Rng) -> StateObject {
    let v: Vec<Complex64> = (0..1usize << n).map(|_| gaussian(rng)).collect();
    StateObject::pure_normalized(v).expect("gaussian vector is nonzero")
}

/// Tensor product of independent Haar-random single-qubit states.
pub fn random_product(n: usize, rng: &mut impl Rng) -> StateObject {
    let mut amps = vec![ONE];
    for _ in 0..n {
        let q = random_pure(1, rng);
        amps = kron_vec(&amps, q.amplitudes().expect("pure")).expect("within cap");
    }
    StateObject::from_pure_unchecked(amps)
}

/// Mixture of `terms` random product states with random weights.
pub fn random_separable(n: usize, terms: usize, rng: &mut impl Rng) -> StateObject {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let dim = 1usize << n;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for w in weights {
        let p = random_product(n, rng);
        rho = rho.add(&p.density_matrix().scale_real(w / total));
    }
    StateObject::from_density_unchecked(rho.hermitian_part())
}

/// Random density matrix of the given rank (`G G^dagger / tr`, `G` Ginibre).
pub fn random_density(n: usize, rank: usize, rng: &mut impl Rng) -> StateObject {
    let dim = 1usize << n;
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    StateObject::from_density_unchecked(rho.scale_real(1.0 / tr).hermitian_part())
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    g.add(&g.adjoint()).scale_real(0.5)
}
