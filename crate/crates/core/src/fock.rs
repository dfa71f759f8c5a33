//! Truncated Fock-space operators and Hermitian eigendecomposition.
//!
//! Operators are stored as dense complex matrices tagged with their per-mode
//! truncations. Mode order in tensor products is left to right, so for
//! `dims = [na, nb]` the basis index of `|n_a, n_b>` is `n_a * nb + n_b`.

use ndarray::{Array1, Array2, ArrayView1, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result, Warning};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative drift allowed between a result at `dims` and at doubled `dims`.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Hermiticity tolerance relative to the Frobenius norm.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dims: Vec<usize>,
    data: Array2<C64>,
}

impl FockOperator {
    /// Wrap a matrix. Fails unless it is square with side `prod(dims)`.
    pub fn from_matrix(dims: Vec<usize>, data: Array2<C64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but dims {:?} need {n}x{n}",
                data.nrows(),
                data.ncols(),
                dims
            )));
        }
        Ok(FockOperator { dims, data })
    }

    pub fn from_real(dims: Vec<usize>, data: Array2<f64>) -> Result<Self> {
        Self::from_matrix(dims, data.mapv(|x| C64::new(x, 0.0)))
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        FockOperator { dims: dims.to_vec(), data: Array2::eye(n) }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        FockOperator { dims: dims.to_vec(), data: Array2::zeros((n, n)) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<C64> {
        self.data
    }

    pub fn dagger(&self) -> Self {
        FockOperator { dims: self.dims.clone(), data: self.data.t().mapv(|z| z.conj()) }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!("dims {:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator { dims: self.dims.clone(), data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator { dims: self.dims.clone(), data: &self.data - &other.data })
    }

    pub fn scale(&self, c: C64) -> Self {
        FockOperator { dims: self.dims.clone(), data: self.data.mapv(|z| z * c) }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        FockOperator { dims: self.dims.clone(), data: self.data.mapv(|z| z * c) }
    }

    /// Matrix product `self * other`.
    pub fn dot(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator { dims: self.dims.clone(), data: matmul(&self.data, &other.data) })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.dot(other)?.sub(&other.dot(self)?)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// `|H - H^dag|` in the Frobenius norm.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[[i, j]] - self.data[[j, i]].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_residual() <= rel_tol * self.norm()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        is_real(&self.data)
    }

    pub fn apply(&self, v: ArrayView1<C64>) -> Result<Array1<C64>> {
        if v.len() != self.dim() {
            return Err(Error::Shape(format!("vector of length {} vs operator side {}", v.len(), self.dim())));
        }
        Ok(self.data.dot(&v))
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }
}

/// Annihilation operator with `sqrt(n)` on the superdiagonal.
pub fn destroy(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { dims: vec![dim], data: m })
}

pub fn create(dim: usize) -> Result<FockOperator> {
    Ok(destroy(dim)?.dagger())
}

pub fn number(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let diag: Array1<C64> = (0..dim).map(|n| C64::new(n as f64, 0.0)).collect();
    Ok(FockOperator { dims: vec![dim], data: Array2::from_diag(&diag) })
}

/// Kronecker product with concatenated dims.
pub fn tensor(a: &FockOperator, b: &FockOperator) -> FockOperator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    FockOperator { dims, data: ndarray::linalg::kron(&a.data, &b.data) }
}

/// `(a (x) I, I (x) b)` on a two-mode space.
pub fn two_mode_ops(dims: [usize; 2]) -> Result<(FockOperator, FockOperator)> {
    let a = destroy(dims[0])?;
    let b = destroy(dims[1])?;
    Ok((tensor(&a, &FockOperator::identity(&[dims[1]])), tensor(&FockOperator::identity(&[dims[0]]), &b)))
}

/// Joint photon-number parity `(-1)^(sum n_k)` as a diagonal operator.
pub fn parity(dims: &[usize]) -> FockOperator {
    let n: usize = dims.iter().product();
    let diag: Array1<C64> =
        (0..n).map(|i| if excitation_count(dims, i).is_multiple_of(2) { ONE } else { -ONE }).collect();
    FockOperator { dims: dims.to_vec(), data: Array2::from_diag(&diag) }
}

/// Basis indices split into (even, odd) total excitation number.
pub fn parity_sectors(dims: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n: usize = dims.iter().product();
    (0..n).partition(|&i| excitation_count(dims, i).is_multiple_of(2))
}

/// Occupation numbers of basis index `i`.
pub fn occupations(dims: &[usize], mut i: usize) -> Vec<usize> {
    let mut occ = vec![0; dims.len()];
    for (k, &d) in dims.iter().enumerate().rev() {
        occ[k] = i % d;
        i /= d;
    }
    occ
}

fn excitation_count(dims: &[usize], i: usize) -> usize {
    occupations(dims, i).iter().sum()
}

/// Basis indices with every mode occupation below `cutoff`.
pub fn interior_indices(dims: &[usize], cutoff: usize) -> Vec<usize> {
    let n: usize = dims.iter().product();
    (0..n).filter(|&i| occupations(dims, i).iter().all(|&o| o < cutoff)).collect()
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub dims: Vec<usize>,
    /// Ascending eigenvalues.
    pub frequencies: Vec<f64>,
    /// Eigenvectors as columns.
    pub states: Array2<C64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn state(&self, mu: usize) -> ArrayView1<'_, C64> {
        self.states.column(mu)
    }

    /// `omega_nu - omega_mu`.
    pub fn gap(&self, mu: usize, nu: usize) -> f64 {
        self.frequencies[nu] - self.frequencies[mu]
    }

    /// Excitation energies relative to the ground state, skipping it.
    pub fn excitation_gaps(&self, count: usize) -> Vec<f64> {
        let e0 = self.frequencies[0];
        self.frequencies.iter().skip(1).take(count).map(|e| e - e0).collect()
    }

    /// `<mu|X|nu>` for states of this system.
    pub fn element(&self, mu: usize, x: &FockOperator, nu: usize) -> Result<C64> {
        matrix_element(self.state(mu), x, self.state(nu))
    }

    /// `V^dag X V`: the operator written in this eigenbasis.
    pub fn to_eigenbasis(&self, x: &FockOperator) -> Result<Array2<C64>> {
        self.check_dims(x)?;
        let xv = matmul(x.data(), &self.states);
        Ok(matmul(&self.states.t().mapv(|z| z.conj()), &xv))
    }

    /// `V M V^dag`: an eigenbasis matrix mapped back to the Fock basis.
    pub fn from_eigenbasis(&self, m: &Array2<C64>) -> Result<FockOperator> {
        let vm = matmul(&self.states, m);
        FockOperator::from_matrix(self.dims.clone(), matmul(&vm, &self.states.t().mapv(|z| z.conj())))
    }

    fn check_dims(&self, x: &FockOperator) -> Result<()> {
        if x.dims() != self.dims.as_slice() {
            return Err(Error::Shape(format!("operator dims {:?} vs eigensystem dims {:?}", x.dims(), self.dims)));
        }
        Ok(())
    }
}

/// `<bra|X|ket>`.
pub fn matrix_element(bra: ArrayView1<C64>, x: &FockOperator, ket: ArrayView1<C64>) -> Result<C64> {
    if bra.len() != x.dim() {
        return Err(Error::Shape(format!("bra of length {} vs operator side {}", bra.len(), x.dim())));
    }
    let xk = x.apply(ket)?;
    Ok(bra.iter().zip(xk.iter()).map(|(b, k)| b.conj() * k).sum())
}

/// Full eigendecomposition of a Hermitian operator.
///
/// The matrix is split into the connected components of its sparsity
/// pattern and each block is diagonalized separately, with a real solver
/// when the block is real. Each eigenvector is rotated so its largest
/// component is real and positive; exactly degenerate levels are ordered
/// by descending lexicographic comparison of their eigenvectors.
/// Hermitian eigendecomposition. LAPACK gets a column-major copy; handing
/// it a row-major complex array yields conjugated eigenvectors.
pub(crate) fn eigh_complex(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let mut f = Array2::<C64>::zeros(m.raw_dim().f());
    f.assign(m);
    Ok(f.eigh(UPLO::Lower)?)
}

pub fn eig_hermitian(h: &FockOperator) -> Result<EigenSystem> {
    let norm = h.norm();
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian { residual, norm });
    }
    let n = h.dim();
    let mut pairs: Vec<(f64, Array1<C64>)> = Vec::with_capacity(n);
    for block in connected_blocks(h.data()) {
        let sub = submatrix(h.data(), &block);
        if is_real(&sub) {
            let (vals, vecs) = sub.mapv(|z| z.re).eigh(UPLO::Lower)?;
            for (k, &val) in vals.iter().enumerate() {
                let mut v = Array1::zeros(n);
                for (r, &idx) in block.iter().enumerate() {
                    v[idx] = C64::new(vecs[[r, k]], 0.0);
                }
                pairs.push((val, v));
            }
        } else {
            let (vals, vecs) = eigh_complex(&sub)?;
            for (k, &val) in vals.iter().enumerate() {
                let mut v = Array1::zeros(n);
                for (r, &idx) in block.iter().enumerate() {
                    v[idx] = vecs[[r, k]];
                }
                pairs.push((val, v));
            }
        }
    }
    for (_, v) in pairs.iter_mut() {
        fix_phase(v);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 < tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        }
        start = end;
    }

    let mut states = Array2::zeros((n, n));
    let mut frequencies = Vec::with_capacity(n);
    for (k, (val, v)) in pairs.into_iter().enumerate() {
        frequencies.push(val);
        states.column_mut(k).assign(&v);
    }
    Ok(EigenSystem { dims: h.dims().to_vec(), frequencies, states })
}

fn fix_phase(v: &mut Array1<C64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    // first component within rounding of the maximum, so ties break by index
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-10)).unwrap_or(0);
    let p = v[pivot];
    let phase = p.conj() / p.norm();
    v.mapv_inplace(|z| z * phase);
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

fn lexicographic(a: &Array1<C64>, b: &Array1<C64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x.re - y.re).abs() > 1e-12 {
            return y.re.total_cmp(&x.re);
        }
        if (x.im - y.im).abs() > 1e-12 {
            return y.im.total_cmp(&x.im);
        }
    }
    std::cmp::Ordering::Equal
}

/// Connected components of the nonzero pattern, each sorted ascending.
fn connected_blocks(m: &Array2<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[[i, j]] != ZERO || m[[j, i]] != ZERO {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn submatrix(m: &Array2<C64>, idx: &[usize]) -> Array2<C64> {
    Array2::from_shape_fn((idx.len(), idx.len()), |(i, j)| m[[idx[i], idx[j]]])
}

pub(crate) fn is_real(m: &Array2<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub(crate) fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense product, through the real BLAS path when both factors are real.
pub(crate) fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    if is_real(a) && is_real(b) {
        let ar = a.mapv(|z| z.re);
        let br = b.mapv(|z| z.re);
        ar.dot(&br).mapv(|x| C64::new(x, 0.0))
    } else {
        a.dot(b)
    }
}

/// `exp(G)` for anti-Hermitian `G`, through the eigendecomposition of `iG`.
pub fn expm_antihermitian(g: &FockOperator) -> Result<FockOperator> {
    let sum = g.add(&g.dagger())?;
    let residual = sum.norm();
    if residual > HERMITIAN_TOL * g.norm().max(1.0) {
        return Err(Error::NotAntiHermitian { residual });
    }
    let h = g.scale(C64::i());
    let es = eig_hermitian(&h)?;
    let phases: Array1<C64> = es.frequencies.iter().map(|&l| C64::from_polar(1.0, -l)).collect();
    let mut vp = es.states.clone();
    for (mut col, p) in vp.axis_iter_mut(Axis(1)).zip(phases.iter()) {
        col.mapv_inplace(|z| z * p);
    }
    let u = matmul(&vp, &es.states.t().mapv(|z| z.conj()));
    FockOperator::from_matrix(g.dims().to_vec(), u)
}

/// Runs `f` at `dims` and at doubled `dims` and reports the largest
/// relative drift. The result at `dims` is returned.
pub fn converged<F>(quantity: &str, dims: &[usize], f: F) -> Result<(Vec<f64>, Option<Warning>)>
where
    F: Fn(&[usize]) -> Result<Vec<f64>>,
{
    let base = f(dims)?;
    let doubled: Vec<usize> = dims.iter().map(|d| 2 * d).collect();
    let fine = f(&doubled)?;
    let drift =
        base.iter().zip(fine.iter()).map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let warning =
        (drift > CONVERGENCE_TOL).then(|| Warning::Convergence { quantity: quantity.to_string(), drift }.emit());
    Ok((base, warning))
}

/// Compressed sparse rows of an operator restricted to a basis subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlock {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseBlock {
    /// The part of `m` acting on `idx`, keeping nonzero entries only.
    pub fn restricted(m: &FockOperator, idx: &[usize]) -> Self {
        let m = m.data();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &i in idx {
            for (c, &j) in idx.iter().enumerate() {
                let v = m[[i, j]];
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseBlock { row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `sum_k c_k B_k` over blocks of equal size.
    pub fn combine(terms: &[(f64, &SparseBlock)]) -> Result<Self> {
        let n = terms.first().map(|t| t.1.dim()).ok_or_else(|| Error::Shape("no terms to combine".into()))?;
        if let Some(t) = terms.iter().find(|t| t.1.dim() != n) {
            return Err(Error::Shape(format!("blocks of size {n} and {}", t.1.dim())));
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![ZERO; n];
        let mut touched = Vec::new();
        for r in 0..n {
            for &(c, b) in terms {
                for k in b.row_ptr[r]..b.row_ptr[r + 1] {
                    let j = b.cols[k];
                    if acc[j] == ZERO {
                        touched.push(j);
                    }
                    acc[j] += b.vals[k] * c;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &j in &touched {
                if acc[j] != ZERO {
                    cols.push(j);
                    vals.push(acc[j]);
                }
                acc[j] = ZERO;
            }
            touched.clear();
            row_ptr.push(cols.len());
        }
        Ok(SparseBlock { row_ptr, cols, vals })
    }

    pub fn apply(&self, x: &Array1<C64>) -> Array1<C64> {
        Array1::from_shape_fn(self.dim(), |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum()
        })
    }
}

/// The `k` lowest eigenvalues of `h` restricted to the basis subset `idx`
/// (for instance a parity sector). Exactly degenerate eigenvalues appear once.
pub fn lowest_eigenvalues_in(h: &FockOperator, idx: &[usize], k: usize) -> Result<Vec<f64>> {
    lowest_eigenvalues_sparse(&SparseBlock::restricted(h, idx), k)
}

/// The `k` lowest eigenvalues of a Hermitian block by Lanczos with full
/// reorthogonalization.
pub fn lowest_eigenvalues_sparse(csr: &SparseBlock, k: usize) -> Result<Vec<f64>> {
    let n = csr.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("requested {k} eigenvalues from a block of size {n}")));
    }
    let mut v0: Array1<C64> = (0..n).map(|i| C64::new(1.0 + ((i * 7919) % 13) as f64 / 13.0, 0.0)).collect();
    let nrm = v0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v0.mapv_inplace(|z| z / nrm);

    let mut basis: Vec<Array1<C64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut ritz: Vec<f64> = Vec::new();
    for j in 0..n {
        let mut w = csr.apply(&basis[j]);
        let a: C64 = basis[j].iter().zip(w.iter()).map(|(v, x)| v.conj() * x).sum();
        alpha.push(a.re);
        for _ in 0..2 {
            for q in &basis {
                let c: C64 = q.iter().zip(w.iter()).map(|(v, x)| v.conj() * x).sum();
                w.zip_mut_with(q, |x, v| *x -= c * v);
            }
        }
        let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let m = alpha.len();
        let check = m >= k && (m.is_multiple_of(8) || m == n || b < 1e-12);
        if check {
            let t = Array2::from_shape_fn((m, m), |(r, c)| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let (vals, vecs) = t.eigh(UPLO::Lower)?;
            let scale = vals.iter().map(|x| x.abs()).fold(1.0, f64::max);
            let done = (0..k.min(m)).all(|i| (b * vecs[[m - 1, i]]).abs() <= 1e-13 * scale);
            ritz = vals.iter().take(k).copied().collect();
            if done || b < 1e-12 || m == n {
                break;
            }
        }
        beta.push(b);
        basis.push(w.mapv(|z| z / b));
    }
    if ritz.len() < k {
        return Err(Error::NoConvergence(format!("Lanczos found {} of {k} eigenvalues", ritz.len())));
    }
    Ok(ritz)
}

/// Lowest `k` eigenvalues over the whole space.
pub fn lowest_eigenvalues(h: &FockOperator, k: usize) -> Result<Vec<f64>> {
    let idx: Vec<usize> = (0..h.dim()).collect();
    lowest_eigenvalues_in(h, &idx, k)
}

/// The part of `m` acting on the basis subset `idx`.
pub fn restrict(m: &FockOperator, idx: &[usize]) -> Array2<C64> {
    submatrix(m.data(), idx)
}
