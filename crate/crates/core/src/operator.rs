//! Dense complex operators on small tensor-product spaces.
//!
//! An [`Operator`] is a square complex matrix tagged with the dimensions of
//! its tensor factors. Subsystem `k` is the `k`-th factor; basis index
//! digits are big-endian, so subsystem 0 is the most significant.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::TOL;

pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: Matrix,
    dims: Vec<usize>,
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending.
///
/// Column `k` of `vectors` is the eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Operator {
    pub fn new(mat: Matrix, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare(mat.nrows(), mat.ncols()));
        }
        if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != mat.nrows() {
            return Err(Error::DimsMismatch {
                side: mat.nrows(),
                dims,
            });
        }
        Ok(Self { mat, dims })
    }

    /// Single-factor operator from a square matrix.
    pub fn single(mat: Matrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Self {
            mat: Matrix::identity(n, n),
            dims: dims.to_vec(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Self {
            mat: Matrix::zeros(n, n),
            dims: dims.to_vec(),
        }
    }

    /// Single-qubit operator from row-major complex entries.
    pub fn qubit(entries: [Complex64; 4]) -> Self {
        Self {
            mat: Matrix::from_row_slice(2, 2, &entries),
            dims: vec![2],
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) ket on a single factor.
    pub fn projector(ket: &[Complex64]) -> Self {
        let n = ket.len();
        let mat = Matrix::from_fn(n, n, |i, j| ket[i] * ket[j].conj());
        Self { mat, dims: vec![n] }
    }

    /// Computational basis projector |k⟩⟨k| on a `d`-dimensional factor.
    pub fn basis_projector(d: usize, k: usize) -> Self {
        let mut mat = Matrix::zeros(d, d);
        mat[(k, k)] = ONE;
        Self { mat, dims: vec![d] }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Same entries, regrouped into different factors.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.mat, dims)
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn dagger(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Full transpose in the computational product basis.
    pub fn transpose(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
            dims: self.dims.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale(s),
            dims: self.dims.clone(),
        }
    }

    /// Matrix product; dims must agree.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_dims(rhs)?;
        Ok(Self {
            mat: &self.mat * &rhs.mat,
            dims: self.dims.clone(),
        })
    }

    /// `Tr[self · rhs]` without forming the product.
    pub fn trace_product(&self, rhs: &Operator) -> Complex64 {
        let n = self.side();
        debug_assert_eq!(n, rhs.side());
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * rhs.mat[(k, i)];
            }
        }
        acc
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self> {
        self.check_same_dims(u)?;
        Ok(Self {
            mat: &u.mat * &self.mat * u.mat.adjoint(),
            dims: self.dims.clone(),
        })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.side() != other.side() {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.side();
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= TOL
    }

    /// Deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let id = Matrix::identity(self.side(), self.side());
        prod.iter()
            .zip(id.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dims(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::IncompatibleDims(self.dims.clone(), other.dims.clone()));
        }
        Ok(())
    }

    fn check_indices(&self, indices: &[usize]) -> Result<Vec<usize>> {
        let n = self.dims.len();
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
            return Err(Error::SubsystemOutOfRange { index: bad, n });
        }
        Ok(sorted)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Offsets into the full basis contributed by every multi-index over
    /// the given subsystems, enumerated in their own big-endian order.
    fn offsets(&self, subsystems: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for &k in subsystems {
            let stride = strides[k];
            offs = offs
                .iter()
                .flat_map(|&o| (0..self.dims[k]).map(move |d| o + d * stride))
                .collect();
        }
        offs
    }

    fn complement(&self, subsystems: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|k| !subsystems.contains(k)).collect()
    }

    /// Kronecker product; dims are concatenated.
    pub fn kron(&self, rhs: &Operator) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self {
            mat: self.mat.kronecker(&rhs.mat),
            dims,
        }
    }

    /// Trace out every subsystem not listed in `keep`.
    ///
    /// The result keeps the surviving subsystems in their original order.
    /// Keeping nothing yields a 1×1 operator holding the trace.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.check_indices(keep)?;
        let traced = self.complement(&keep);
        let keep_offs = self.offsets(&keep);
        let tr_offs = self.offsets(&traced);
        let m = keep_offs.len();
        let mut mat = Matrix::zeros(m, m);
        for (r, &ro) in keep_offs.iter().enumerate() {
            for (c, &co) in keep_offs.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &tr_offs {
                    acc += self.mat[(ro + t, co + t)];
                }
                mat[(r, c)] = acc;
            }
        }
        let dims = if keep.is_empty() {
            vec![1]
        } else {
            keep.iter().map(|&k| self.dims[k]).collect()
        };
        Ok(Self { mat, dims })
    }

    /// Replace the subsystems in `replaced` by the normalized identity:
    /// `I^X/d_X ⊗ Tr_X[op]`, with the identity factors left in place.
    pub fn identity_replace(&self, replaced: &[usize]) -> Result<Self> {
        let replaced = self.check_indices(replaced)?;
        if replaced.is_empty() {
            return Ok(self.clone());
        }
        let keep = self.complement(&replaced);
        let reduced = self.partial_trace(&keep)?;
        let keep_offs = self.offsets(&keep);
        let rep_offs = self.offsets(&replaced);
        let d_x = rep_offs.len() as f64;
        let mut mat = Matrix::zeros(self.side(), self.side());
        for (r, &ro) in keep_offs.iter().enumerate() {
            for (c, &co) in keep_offs.iter().enumerate() {
                let v = reduced.mat[(r, c)] / d_x;
                for &t in &rep_offs {
                    mat[(ro + t, co + t)] = v;
                }
            }
        }
        Ok(Self {
            mat,
            dims: self.dims.clone(),
        })
    }

    /// Reorder tensor factors: factor `k` of the result is factor
    /// `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidPermutation(order.to_vec()));
        }
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        // offsets() walks the requested subsystems in order, so it enumerates
        // the new basis and returns the matching old index.
        let map = self.offsets(order);
        let side = self.side();
        let mat = Matrix::from_fn(side, side, |i, j| self.mat[(map[i], map[j])]);
        Ok(Self { mat, dims: new_dims })
    }

    /// Insert an identity factor of dimension `d` at position `pos`.
    pub fn insert_identity(&self, pos: usize, d: usize) -> Result<Self> {
        let n = self.dims.len();
        if pos > n {
            return Err(Error::SubsystemOutOfRange { index: pos, n });
        }
        let grown = self.kron(&Operator::identity(&[d]));
        // grown has the new factor last; move it to `pos`.
        let mut order: Vec<usize> = (0..n).collect();
        order.insert(pos, n);
        grown.permute(&order)
    }

    /// Hermitian eigendecomposition, eigenvalues sorted descending.
    pub fn eig_hermitian(&self) -> Result<Eigen> {
        let dev = self.hermiticity_deviation();
        if dev > TOL {
            return Err(Error::NotHermitian(dev));
        }
        let sym = (&self.mat + self.mat.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Matrix::from_fn(self.side(), idx.len(), |i, j| eig.eigenvectors[(i, idx[j])]);
        Ok(Eigen { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig_hermitian()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("non-empty operator"))
    }

    /// Apply a real function to the spectrum of a Hermitian operator.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        let n = self.side();
        let mut mat = Matrix::zeros(n, n);
        for (k, &lam) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(k);
            mat += (v * v.adjoint()).scale(f(lam));
        }
        Ok(Self {
            mat,
            dims: self.dims.clone(),
        })
    }
}

impl Eigen {
    pub fn reconstruct(&self, dims: &[usize]) -> Operator {
        let n = self.vectors.nrows();
        let mut mat = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            mat += (v * v.adjoint()).scale(lam);
        }
        Operator {
            mat,
            dims: dims.to_vec(),
        }
    }
}

/// Kronecker product of a sequence of operators.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> Operator {
    let mut it = ops.into_iter();
    let first = it.next().expect("kron_all needs at least one operator").clone();
    it.fold(first, |acc, op| acc.kron(op))
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "dims mismatch in operator addition");
        Operator {
            mat: &self.mat + &rhs.mat,
            dims: self.dims.clone(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "dims mismatch in operator subtraction");
        Operator {
            mat: &self.mat - &rhs.mat,
            dims: self.dims.clone(),
        }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, s: f64) -> Operator {
        self.scale(s)
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, s: f64) -> Operator {
        self.scale(s)
    }
}

/// Named single-qubit operators and kets used throughout the crate.
pub mod qubit {
    use super::*;

    pub fn id() -> Operator {
        Operator::identity(&[2])
    }

    pub fn sigma_x() -> Operator {
        Operator::qubit([ZERO, ONE, ONE, ZERO])
    }

    pub fn sigma_y() -> Operator {
        let i = Complex64::new(0.0, 1.0);
        Operator::qubit([ZERO, -i, i, ZERO])
    }

    pub fn sigma_z() -> Operator {
        Operator::qubit([ONE, ZERO, ZERO, -ONE])
    }

    /// |k⟩ in the σ_z eigenbasis.
    pub fn ket(k: usize) -> [Complex64; 2] {
        if k == 0 {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        }
    }

    pub fn ket_plus() -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
    }

    pub fn ket_minus() -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]
    }

    pub fn proj(k: usize) -> Operator {
        Operator::basis_projector(2, k)
    }

    /// Unnormalized |φ⁺⟩⟨φ⁺| with |φ⁺⟩ = |00⟩ + |11⟩, dims [2, 2].
    pub fn phi_plus() -> Operator {
        let ket = [ONE, ZERO, ZERO, ONE];
        Operator::projector(&ket).with_dims(vec![2, 2]).unwrap()
    }

    /// Normalized singlet (|01⟩ − |10⟩)/√2 as a density matrix, dims [2, 2].
    pub fn singlet() -> Operator {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let ket = [ZERO, h, -h, ZERO];
        Operator::projector(&ket).with_dims(vec![2, 2]).unwrap()
    }
}
