//! Local-support compression, product-block detection and the PPT test.

use num_complex::Complex64;

use super::Bipartition;
use crate::error::Result;
use crate::qcore::{eig_hermitian, index_map, reduce_ordered, ComplexMatrix, StateObject, ZERO};

/// Eigenvalues at or below this are outside a marginal's support.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Entrywise tolerance for accepting `rho = rho_T ⊗ rho_rest`.
pub const PRODUCT_TOL: f64 = 1e-10;

/// A density matrix on `dim_a ⊗ dim_b`, A-index major. Local dimensions need
/// not be powers of two.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteDensity {
    pub rho: ComplexMatrix,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteDensity {
    pub fn new(rho: ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        assert_eq!(rho.rows(), dim_a * dim_b, "density size does not match local dimensions");
        Self { rho, dim_a, dim_b }
    }

    /// Reduces `state` to the qubits of `cut`, A side first.
    pub fn from_cut(state: &StateObject, cut: &Bipartition) -> Result<Self> {
        let order: Vec<usize> = cut.side_a().iter().chain(cut.side_b()).copied().collect();
        let rho = reduce_ordered(state, &order)?;
        Ok(Self::new(rho, 1 << cut.side_a().len(), 1 << cut.side_b().len()))
    }

    pub fn marginal_a(&self) -> ComplexMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        ComplexMatrix::from_fn(da, da, |a, c| (0..db).map(|b| self.rho[(a * db + b, c * db + b)]).sum())
    }

    pub fn marginal_b(&self) -> ComplexMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        ComplexMatrix::from_fn(db, db, |b, d| (0..da).map(|a| self.rho[(a * db + b, a * db + d)]).sum())
    }

    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        let db = self.dim_b;
        let d = self.rho.rows();
        ComplexMatrix::from_fn(d, d, |i, j| {
            let (a, b) = (i / db, i % db);
            let (c, e) = (j / db, j % db);
            self.rho[(a * db + e, c * db + b)]
        })
    }

    /// Same state with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        let (da, db) = (self.dim_a, self.dim_b);
        let d = da * db;
        let rho = ComplexMatrix::from_fn(d, d, |i, j| {
            let (b, a) = (i / da, i % da);
            let (e, c) = (j / da, j % da);
            self.rho[(a * db + b, c * db + e)]
        });
        Self { rho, dim_a: db, dim_b: da }
    }

    /// Principal eigenvector when the state is rank one within `SUPPORT_TOL`.
    pub fn pure_vector(&self) -> Result<Option<Vec<Complex64>>> {
        let (values, vectors) = eig_hermitian(&self.rho)?;
        if values.len() > 1 && values[1] > SUPPORT_TOL {
            return Ok(None);
        }
        Ok(Some(vectors.column(0)))
    }
}

/// Orthonormal support basis of a Hermitian PSD matrix, eigenvalue descending.
/// Each column is phase-fixed so its largest-magnitude entry is real positive.
pub(crate) fn support_basis(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_hermitian(m)?;
    let cols: Vec<Vec<Complex64>> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > SUPPORT_TOL)
        .map(|(j, _)| {
            let mut col = vectors.column(j);
            let pivot = col.iter().copied().fold(ZERO, |best, z| if z.norm() > best.norm() + 1e-12 { z } else { best });
            if pivot.norm() > 0.0 {
                let phase = pivot.conj() / pivot.norm();
                col.iter_mut().for_each(|z| *z *= phase);
            }
            col
        })
        .collect();
    if cols.is_empty() {
        return Ok(ComplexMatrix::zeros(m.rows(), 0));
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Orthonormal basis (as matrix columns) of the support of the marginal on `side`.
pub fn local_support(rho: &StateObject, side: &[usize]) -> Result<ComplexMatrix> {
    let mut sorted = side.to_vec();
    sorted.sort_unstable();
    support_basis(&reduce_ordered(rho, &sorted)?)
}

/// Local isometries onto the marginal supports of the two sides of a cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionMap {
    pub iso_a: ComplexMatrix,
    pub iso_b: ComplexMatrix,
}

impl CompressionMap {
    /// `(V_A ⊗ V_B) rho (V_A ⊗ V_B)^dagger`, back on the original local spaces.
    pub fn expand(&self, small: &BipartiteDensity) -> BipartiteDensity {
        let v = kron_small(&self.iso_a, &self.iso_b);
        let rho = v.matmul(&small.rho).matmul(&v.adjoint());
        BipartiteDensity::new(rho, self.iso_a.rows(), self.iso_b.rows())
    }
}

fn kron_small(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a[(i / b.rows(), j / b.cols())] * b[(i % b.rows(), j % b.cols())]
    })
}

/// Compresses a bipartite density onto its local supports.
pub(crate) fn compress_density(state: &BipartiteDensity) -> Result<(BipartiteDensity, CompressionMap)> {
    let iso_a = support_basis(&state.marginal_a())?;
    let iso_b = support_basis(&state.marginal_b())?;
    let v = kron_small(&iso_a, &iso_b);
    let small = v.adjoint().matmul(&state.rho).matmul(&v).hermitian_part();
    let map = CompressionMap { iso_a, iso_b };
    let (da, db) = (map.iso_a.cols(), map.iso_b.cols());
    Ok((BipartiteDensity::new(small, da, db), map))
}

/// Reduces `rho` to the cut and conjugates by the local support isometries.
pub fn compress(rho: &StateObject, cut: &Bipartition) -> Result<(BipartiteDensity, CompressionMap)> {
    cut.check_register(rho.n_qubits())?;
    compress_density(&BipartiteDensity::from_cut(rho, cut)?)
}

/// True iff the partial transpose over B has no eigenvalue below `-1e-10`.
/// A zero certificate only when the compressed dimensions are at most 2⊗3.
pub fn ppt_is_separable_indicator(rho: &StateObject, cut: &Bipartition) -> Result<bool> {
    cut.check_register(rho.n_qubits())?;
    is_ppt(&BipartiteDensity::from_cut(rho, cut)?)
}

pub(crate) fn is_ppt(state: &BipartiteDensity) -> Result<bool> {
    let (values, _) = eig_hermitian(&state.partial_transpose_b())?;
    Ok(values.last().is_none_or(|&v| v >= -1e-10))
}

/// True when the `n`-qubit density factorizes as `rho_T ⊗ rho_rest`.
pub(crate) fn is_product_across(rho: &ComplexMatrix, n: usize, subset: &[usize]) -> Result<bool> {
    let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
    if subset.is_empty() || rest.is_empty() {
        return Ok(true);
    }
    let state = StateObject::from_density_unchecked(rho.clone());
    let rho_t = reduce_ordered(&state, subset)?;
    let rho_r = reduce_ordered(&state, &rest)?;
    let map = index_map(n, subset, &rest);
    let dt = rho_t.rows();
    let dr = rho_r.rows();
    for a in 0..dt {
        for b in 0..dt {
            let tab = rho_t[(a, b)];
            for t in 0..dr {
                let x = map[a * dr + t];
                for u in 0..dr {
                    let y = map[b * dr + u];
                    if (rho[(x, y)] - tab * rho_r[(t, u)]).norm() > PRODUCT_TOL {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The finest partition of the qubits of an `n`-qubit density into blocks
/// with `rho = ⊗ rho_block`. Blocks are sorted and listed by smallest member.
///
/// Two qubits with a correlated two-qubit marginal always share a block, so
/// the search only tries unions of connected components of that graph.
pub(crate) fn product_blocks(rho: &ComplexMatrix, n: usize) -> Result<Vec<Vec<usize>>> {
    let state = StateObject::from_density_unchecked(rho.clone());
    let mut component: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if component[i] == component[j] {
                continue;
            }
            let pair = reduce_ordered(&state, &[i, j])?;
            if !is_product_across(&pair, 2, &[0])? {
                let (from, to) = (component[i].max(component[j]), component[i].min(component[j]));
                component.iter_mut().filter(|c| **c == from).for_each(|c| *c = to);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for q in 0..n {
        match groups.iter_mut().find(|g| component[g[0]] == component[q]) {
            Some(g) => g.push(q),
            None => groups.push(vec![q]),
        }
    }
    let mut remaining: Vec<usize> = (0..groups.len()).collect();
    let mut blocks = Vec::new();
    while !remaining.is_empty() {
        let anchor = remaining[0];
        let others = &remaining[1..];
        let mut found = None;
        'sizes: for extra in 0..others.len() {
            for combo in combinations(others, extra) {
                let mut block: Vec<usize> = groups[anchor].clone();
                combo.iter().for_each(|&g| block.extend(&groups[g]));
                block.sort_unstable();
                if is_product_across(rho, n, &block)? {
                    found = Some(combo);
                    break 'sizes;
                }
            }
        }
        let chosen: Vec<usize> = match found {
            Some(combo) => std::iter::once(anchor).chain(combo).collect(),
            None => remaining.clone(),
        };
        remaining.retain(|g| !chosen.contains(g));
        let mut block: Vec<usize> = chosen.iter().flat_map(|&g| groups[g].iter().copied()).collect();
        block.sort_unstable();
        blocks.push(block);
    }
    blocks.sort();
    Ok(blocks)
}

/// All `k`-element subsets of `items`, in lexicographic order of positions.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - current.len() {
                break;
            }
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, k, 0, &mut current, &mut out);
    out
}
