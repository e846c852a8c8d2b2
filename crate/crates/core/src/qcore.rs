//! Dense complex linear algebra and entropy primitives for qubit registers.
//!
//! Basis convention: qubit 0 is the leftmost tensor factor, so it owns the
//! most significant bit of a basis index. For an `n`-qubit register qubit `q`
//! sits at bit `n - 1 - q`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{argument, contract, EntError, Result};

/// Maximum number of complex entries held by any matrix or amplitude vector.
pub const MAX_ENTRIES: usize = 1 << 20;

/// Tolerance used when validating pure-state normalization and density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIG_CLAMP, 0)` are treated as zero before taking logarithms.
pub const EIG_CLAMP: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_entries(rows: usize, cols: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_ENTRIES => Ok(()),
        _ => Err(EntError::Size(format!(
            "{rows}x{cols} matrix exceeds the cap of {MAX_ENTRIES} entries"
        ))),
    }
}

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Entries must be finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_entries(rows, cols)?;
        if data.len() != rows * cols {
            return argument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return contract("matrix entries must be finite");
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO })
    }

    /// The projector `|v><v|` (no normalization applied).
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Entrywise difference. Panics on shape mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matrix product. Panics on inner dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// True when `U^dagger U = I` within `tol` (entrywise).
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// True when the columns are orthonormal within `tol`.
    pub fn has_orthonormal_columns(&self, tol: f64) -> bool {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.cols)) <= tol
    }

    pub(crate) fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or_else(|| EntError::Size("kron row overflow".into()))?;
    let cols = a.cols.checked_mul(b.cols).ok_or_else(|| EntError::Size("kron column overflow".into()))?;
    check_entries(rows, cols)?;
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    }))
}

/// Kronecker product of two amplitude vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let len = a.len().checked_mul(b.len()).ok_or_else(|| EntError::Size("kron overflow".into()))?;
    check_entries(len, 1)?;
    Ok(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
}

/// Ordered list of subsystem dimensions. Every subsystem is a qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    local_dims: Vec<usize>,
}

impl RegisterLayout {
    pub fn qubits(n: usize) -> Result<Self> {
        if n == 0 {
            return argument("a register needs at least one qubit");
        }
        if n >= usize::BITS as usize - 1 || (1usize << n) > MAX_ENTRIES {
            return Err(EntError::Size(format!("{n} qubits exceed the register cap")));
        }
        Ok(Self { local_dims: vec![2; n] })
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_qubits(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        1 << self.local_dims.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateBody {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

/// A normalized pure state or a density matrix over a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateObject {
    layout: RegisterLayout,
    body: StateBody,
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return argument(format!("dimension {dim} is not a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl StateObject {
    /// Pure state from amplitudes; the vector must already be normalized.
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        let layout = RegisterLayout::qubits(n)?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return contract("amplitudes must be finite");
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return contract(format!("pure state norm {norm} differs from 1"));
        }
        Ok(Self { layout, body: StateBody::Pure(amplitudes) })
    }

    /// Pure state from arbitrary nonzero amplitudes, normalized on construction.
    pub fn pure_normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return contract("cannot normalize a zero or non-finite vector");
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::pure(amplitudes)
    }

    /// Density matrix; must be Hermitian, unit trace and positive semidefinite
    /// within [`STATE_TOL`].
    pub fn mixed(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return contract("density matrix must be square");
        }
        let n = qubits_for_dim(rho.rows())?;
        let layout = RegisterLayout::qubits(n)?;
        if !rho.is_hermitian(STATE_TOL) {
            return contract("density matrix is not Hermitian");
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return contract(format!("density matrix trace {tr} differs from 1"));
        }
        let (values, _) = eig_hermitian(&rho)?;
        if let Some(&min) = values.last() {
            if min < -STATE_TOL {
                return contract(format!("density matrix has negative eigenvalue {min}"));
            }
        }
        Ok(Self { layout, body: StateBody::Mixed(rho) })
    }

    /// Internal constructor for matrices produced by trusted operations.
    pub(crate) fn from_density_unchecked(rho: ComplexMatrix) -> Self {
        let n = rho.rows().trailing_zeros() as usize;
        Self { layout: RegisterLayout { local_dims: vec![2; n] }, body: StateBody::Mixed(rho) }
    }

    pub(crate) fn from_pure_unchecked(amps: Vec<Complex64>) -> Self {
        let n = amps.len().trailing_zeros() as usize;
        Self { layout: RegisterLayout { local_dims: vec![2; n] }, body: StateBody::Pure(amps) }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn body(&self) -> &StateBody {
        &self.body
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// True when stored as an amplitude vector.
    pub fn is_pure_vector(&self) -> bool {
        matches!(self.body, StateBody::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.body {
            StateBody::Pure(a) => Some(a),
            StateBody::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match &self.body {
            StateBody::Pure(a) => ComplexMatrix::projector(a),
            StateBody::Mixed(m) => m.clone(),
        }
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        match &self.body {
            StateBody::Pure(_) => 1.0,
            StateBody::Mixed(m) => m.as_slice().iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Hash of the exact stored entries, used to key shared term caches.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        let entries = match &self.body {
            StateBody::Pure(a) => {
                0u8.hash(&mut h);
                a.as_slice()
            }
            StateBody::Mixed(m) => {
                1u8.hash(&mut h);
                m.as_slice()
            }
        };
        entries.len().hash(&mut h);
        for z in entries {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Reorders qubits: the output's qubit `i` is input qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_qubits();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return argument("permutation must list every qubit exactly once");
        }
        let map = index_map(n, order, &[]);
        Ok(match &self.body {
            StateBody::Pure(a) => Self::from_pure_unchecked(map.iter().map(|&x| a[x]).collect()),
            StateBody::Mixed(m) => {
                let d = self.dim();
                Self::from_density_unchecked(ComplexMatrix::from_fn(d, d, |i, j| m[(map[i], map[j])]))
            }
        })
    }
}

/// Maps `(a, t)` packed as `a * 2^|traced| + t` to a full basis index, where `a`
/// indexes the qubits in `kept` (in the given order) and `t` the qubits in `traced`.
pub(crate) fn index_map(n: usize, kept: &[usize], traced: &[usize]) -> Vec<usize> {
    let k = kept.len();
    let r = traced.len();
    let mut out = Vec::with_capacity(1 << (k + r));
    for a in 0..(1usize << k) {
        let mut base = 0usize;
        for (p, &q) in kept.iter().enumerate() {
            if (a >> (k - 1 - p)) & 1 == 1 {
                base |= 1 << (n - 1 - q);
            }
        }
        for t in 0..(1usize << r) {
            let mut x = base;
            for (p, &q) in traced.iter().enumerate() {
                if (t >> (r - 1 - p)) & 1 == 1 {
                    x |= 1 << (n - 1 - q);
                }
            }
            out.push(x);
        }
    }
    out
}

fn validate_index_set(n: usize, set: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &q in set {
        if q >= n {
            return argument(format!("qubit index {q} outside a {n}-qubit register"));
        }
        if std::mem::replace(&mut seen[q], true) {
            return argument(format!("qubit index {q} repeated"));
        }
    }
    Ok(())
}

/// Reduced density matrix on `kept`, with output qubit order following `kept`.
pub(crate) fn reduce_ordered(state: &StateObject, kept: &[usize]) -> Result<ComplexMatrix> {
    let n = state.n_qubits();
    validate_index_set(n, kept)?;
    if kept.is_empty() {
        return argument("keep-set must be nonempty");
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let map = index_map(n, kept, &traced);
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    Ok(match state.body() {
        StateBody::Pure(psi) => {
            let mut out = ComplexMatrix::zeros(dk, dk);
            for a in 0..dk {
                for b in a..dk {
                    let mut s = ZERO;
                    for t in 0..dt {
                        s += psi[map[a * dt + t]] * psi[map[b * dt + t]].conj();
                    }
                    out[(a, b)] = s;
                    out[(b, a)] = s.conj();
                }
            }
            out
        }
        StateBody::Mixed(rho) => {
            let mut out = ComplexMatrix::zeros(dk, dk);
            for a in 0..dk {
                for b in 0..dk {
                    let mut s = ZERO;
                    for t in 0..dt {
                        s += rho[(map[a * dt + t], map[b * dt + t])];
                    }
                    out[(a, b)] = s;
                }
            }
            out
        }
    })
}

/// Traces out every qubit not in `keep`. The surviving qubits keep their
/// register order.
pub fn partial_trace(state: &StateObject, keep: &[usize]) -> Result<StateObject> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    Ok(StateObject::from_density_unchecked(reduce_ordered(state, &sorted)?))
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are returned in
/// descending order; column `i` of the second value is the eigenvector for
/// eigenvalue `i`.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return contract("eigendecomposition needs a square matrix");
    }
    if !m.is_hermitian(1e-8) {
        return contract(format!("matrix is not Hermitian (defect {:.3e})", m.hermiticity_defect()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let h = m.hermitian_part();
    let mut pairs: Vec<(f64, Vec<(usize, Complex64)>)> = Vec::with_capacity(n);
    for block in sparsity_blocks(&h) {
        if block.len() == 1 {
            let i = block[0];
            pairs.push((h[(i, i)].re, vec![(i, ONE)]));
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| h[(block[i], block[j])]);
        let (values, vectors) = dense_eig(sub)?;
        for (j, &v) in values.iter().enumerate() {
            pairs.push((v, block.iter().enumerate().map(|(i, &row)| (row, vectors[(i, j)])).collect()));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (j, (_, entries)) in pairs.iter().enumerate() {
        for &(row, z) in entries {
            vectors[(row, j)] = z;
        }
    }
    Ok((pairs.into_iter().map(|p| p.0).collect(), vectors))
}

/// Index sets of the connected components of the nonzero pattern, so that the
/// matrix is block diagonal after a permutation. Exactly zero rows end up as
/// singletons.
fn sparsity_blocks(h: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = h.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if h[(i, j)] != ZERO {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

/// nalgebra's solver can return non-finite values on some highly degenerate
/// inputs at its default threshold; results are checked and retried with a
/// looser one.
fn dense_eig(m: DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for eps in [f64::EPSILON, 1e-15, 1e-14, 1e-13] {
        let Some(eig) = SymmetricEigen::try_new(m.clone(), eps, 0) else { continue };
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let sum: f64 = values.iter().sum();
        let finite = values.iter().all(|v| v.is_finite()) && eig.eigenvectors.iter().all(|z| z.is_finite());
        if finite && (sum - trace).abs() <= 1e-9 * scale * m.nrows() as f64 {
            return Ok((values, eig.eigenvectors));
        }
    }
    Err(EntError::Contract("Hermitian eigensolver did not converge".to_string()))
}

/// Binary entropy in bits. `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return argument(format!("binary entropy argument {x} outside [0, 1]"));
    }
    Ok(binary_entropy_unchecked(x.clamp(0.0, 1.0)))
}

pub(crate) fn binary_entropy_unchecked(x: f64) -> f64 {
    xlog2x_neg(x) + xlog2x_neg(1.0 - x)
}

/// `-x log2 x` with the continuous extension at 0.
#[inline]
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy (bits) of a spectrum, clamping tiny negative values.
pub(crate) fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -EIG_CLAMP {
            return contract(format!("eigenvalue {v} is negative beyond tolerance"));
        }
        s += xlog2x_neg(v.max(0.0));
    }
    Ok(s)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &StateObject) -> Result<f64> {
    match rho.body() {
        StateBody::Pure(_) => Ok(0.0),
        StateBody::Mixed(m) => matrix_entropy(m),
    }
}

pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    let (values, _) = eig_hermitian(m)?;
    spectrum_entropy(&values)
}

/// Applies a single-qubit unitary to qubit `target`.
pub fn apply_local_unitary(state: &StateObject, u: &ComplexMatrix, target: usize) -> Result<StateObject> {
    if u.rows() != 2 || u.cols() != 2 {
        return argument("local unitary must be 2x2");
    }
    if !u.is_unitary(1e-10) {
        return contract("local operator is not unitary");
    }
    apply_gate(state, u, &[target])
}

/// Applies a `2^k x 2^k` operator to the listed qubits (first listed qubit is
/// the most significant factor of the operator). Unitarity is the caller's
/// responsibility.
pub(crate) fn apply_gate(state: &StateObject, gate: &ComplexMatrix, targets: &[usize]) -> Result<StateObject> {
    let n = state.n_qubits();
    validate_index_set(n, targets)?;
    let k = targets.len();
    if k == 0 || gate.rows() != 1 << k || gate.cols() != 1 << k {
        return argument("gate size does not match its target list");
    }
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let map = index_map(n, targets, &rest);
    let dg = 1usize << k;
    let dr = 1usize << rest.len();
    match state.body() {
        StateBody::Pure(psi) => {
            let mut out = vec![ZERO; psi.len()];
            for t in 0..dr {
                for a in 0..dg {
                    let mut s = ZERO;
                    for b in 0..dg {
                        s += gate[(a, b)] * psi[map[b * dr + t]];
                    }
                    out[map[a * dr + t]] = s;
                }
            }
            Ok(StateObject::from_pure_unchecked(out))
        }
        StateBody::Mixed(rho) => {
            let d = rho.rows();
            // full operator G (acting on targets) built implicitly: rho' = G rho G^dagger
            let mut left = ComplexMatrix::zeros(d, d);
            for col in 0..d {
                for t in 0..dr {
                    for a in 0..dg {
                        let mut s = ZERO;
                        for b in 0..dg {
                            s += gate[(a, b)] * rho[(map[b * dr + t], col)];
                        }
                        left[(map[a * dr + t], col)] = s;
                    }
                }
            }
            let mut out = ComplexMatrix::zeros(d, d);
            for row in 0..d {
                for t in 0..dr {
                    for a in 0..dg {
                        let mut s = ZERO;
                        for b in 0..dg {
                            s += left[(row, map[b * dr + t])] * gate[(a, b)].conj();
                        }
                        out[(row, map[a * dr + t])] = s;
                    }
                }
            }
            Ok(StateObject::from_density_unchecked(out))
        }
    }
}
