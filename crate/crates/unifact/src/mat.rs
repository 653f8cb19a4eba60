//! Dense complex linear algebra kernel.
//!
//! [`MatrixC`] is the single carrier type for operators, vectors (d×1
//! matrices) and unitaries. It is a plain row-major `Vec<Complex64>` with
//! the arithmetic written out directly; the Hermitian eigensolver and the
//! SVD are delegated to `nalgebra`. Inner products are linear in the
//! second argument.

use num_complex::Complex64;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Ambient-dimension cap for Kronecker products and constructions.
pub const DIM_CAP: usize = 4096;

/// Numerical thresholds threaded through every operation.
///
/// `rank_tol` truncates singular/eigenvalue spectra relative to the largest
/// value, `eq_tol` is the absolute scale for matrix-equality assertions and
/// `cluster_gap` groups eigenvalues of Hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub eq_tol: f64,
    pub cluster_gap: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_tol: 1e-9, eq_tol: 1e-9, cluster_gap: 1e-8 }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("eq_tol", self.eq_tol),
            ("cluster_gap", self.cluster_gap),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Contract(format!(
                    "tolerance {name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Scale all three thresholds by a common factor (CLI `--tol` override).
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerance {
            rank_tol: self.rank_tol * factor,
            eq_tol: self.eq_tol * factor,
            cluster_gap: self.cluster_gap * factor,
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixC {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Serialize for MatrixC {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            data: Vec<[f64; 2]>,
            #[serde(skip)]
            _p: &'a (),
        }
        let data = self.data.iter().map(|z| [z.re, z.im]).collect();
        Repr { rows: self.rows, cols: self.cols, data, _p: &() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixC {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            data: Vec<[f64; 2]>,
        }
        let r = Repr::deserialize(deserializer)?;
        let data: Vec<Complex64> =
            r.data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        MatrixC::from_vec(r.rows, r.cols, data).map_err(D::Error::custom)
    }
}

impl MatrixC {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixC { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major entry vector; checks shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Contract(format!(
                "entry count {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(MatrixC { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column vector from complex entries.
    pub fn col_vec(entries: &[Complex64]) -> Self {
        MatrixC { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    /// Column vector from real entries.
    pub fn col_vec_real(entries: &[f64]) -> Self {
        Self::col_vec(&entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> MatrixC {
        let mut v = Self::zeros(self.rows, 1);
        for i in 0..self.rows {
            v[(i, 0)] = self[(i, j)];
        }
        v
    }

    pub fn columns(&self) -> impl Iterator<Item = MatrixC> + '_ {
        (0..self.cols).map(|j| self.col(j))
    }

    pub fn from_columns(cols: &[MatrixC]) -> Self {
        if cols.is_empty() {
            return Self::zeros(0, 0);
        }
        let rows = cols[0].rows;
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.rows, rows, "column length mismatch");
            assert_eq!(c.cols, 1, "from_columns expects column vectors");
            for i in 0..rows {
                m[(i, j)] = c[(i, 0)];
            }
        }
        m
    }

    /// Horizontal concatenation `[self rhs]`.
    pub fn hstack(&self, rhs: &MatrixC) -> MatrixC {
        if self.is_empty() && self.rows == 0 {
            return rhs.clone();
        }
        if rhs.is_empty() && rhs.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..rhs.cols {
                m[(i, self.cols + j)] = rhs[(i, j)];
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &MatrixC) -> MatrixC {
        assert_eq!(self.cols, rhs.cols, "vstack col mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        MatrixC { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    pub fn adjoint(&self) -> MatrixC {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> MatrixC {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> MatrixC {
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> MatrixC {
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &MatrixC) -> MatrixC {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &MatrixC) -> MatrixC {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        MatrixC {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, rhs: &MatrixC) -> MatrixC {
        assert_eq!(self.cols, rhs.rows, "mul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &rhs.data[l * m..(l + 1) * m];
                let dst = &mut out.data[i * m..(i + 1) * m];
                for j in 0..m {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    /// Inner product `⟨self, rhs⟩ = Σ conj(self) · rhs`, linear in `rhs`.
    /// For square matrices this is the Hilbert–Schmidt product tr(A*B).
    pub fn dot(&self, rhs: &MatrixC) -> Complex64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dot shape mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn normalized(&self) -> Result<MatrixC> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Contract("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Flatten row-major into a column vector of length rows·cols.
    pub fn vec(&self) -> MatrixC {
        MatrixC { rows: self.rows * self.cols, cols: 1, data: self.data.clone() }
    }

    /// Inverse of [`vec`](Self::vec) for a given shape.
    pub fn unvec(&self, rows: usize, cols: usize) -> MatrixC {
        assert_eq!(self.cols, 1, "unvec expects a column vector");
        assert_eq!(self.rows, rows * cols, "unvec length mismatch");
        MatrixC { rows, cols, data: self.data.clone() }
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.sub(&self.adjoint()).norm() <= tol.eq_tol * (1.0 + self.norm())
    }

    /// Kronecker product in the standard lexicographic ordering
    /// (self-index major).
    pub fn kron(&self, rhs: &MatrixC) -> Result<MatrixC> {
        if self.is_empty() || rhs.is_empty() {
            return Err(Error::Contract("kron of an empty matrix".into()));
        }
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        if rows > DIM_CAP || cols > DIM_CAP {
            return Err(Error::Capacity(format!(
                "kron result {rows}x{cols} exceeds the {DIM_CAP} dimension cap"
            )));
        }
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix, grouped into clusters.
    ///
    /// Eigenvalues are sorted ascending and a new cluster starts whenever
    /// the gap to the previous eigenvalue exceeds `cluster_gap·(1+‖a‖)`.
    /// Each cluster carries its mean eigenvalue and an orthonormal
    /// eigenbasis.
    pub fn hermitian_eig(&self, tol: &Tolerance) -> Result<Vec<(f64, MatrixC)>> {
        if !self.is_square() {
            return Err(Error::Contract("hermitian_eig of a non-square matrix".into()));
        }
        let scale = 1.0 + self.norm();
        if self.sub(&self.adjoint()).norm() > tol.eq_tol * scale {
            return Err(Error::Contract("hermitian_eig input is not Hermitian".into()));
        }
        // Symmetrize so the solver sees an exactly Hermitian matrix.
        let sym = self.add(&self.adjoint()).scale(Complex64::new(0.5, 0.0));
        let (values, vectors) = crate::jacobi::hermitian_eigen(&sym);

        let gap = tol.cluster_gap * scale;
        let mut clusters: Vec<(f64, MatrixC)> = Vec::new();
        let mut start = 0;
        while start < values.len() {
            let mut end = start + 1;
            while end < values.len() && values[end] - values[end - 1] <= gap {
                end += 1;
            }
            let members = &values[start..end];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            let basis = MatrixC::from_fn(self.rows, end - start, |i, j| vectors[(i, start + j)]);
            clusters.push((mean, basis));
            start = end;
        }
        Ok(clusters)
    }

    /// Orthonormal basis of the column span, rank-truncated at
    /// `rank_tol·σ_max`. A matrix that is zero to within
    /// `rank_tol·(1+‖a‖)` has an empty span.
    pub fn orthonormal_columns(&self, tol: &Tolerance) -> MatrixC {
        if self.is_empty() {
            return MatrixC::zeros(self.rows, 0);
        }
        let svd = crate::jacobi::svd(self);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        if smax <= tol.rank_tol * (1.0 + self.norm()) {
            return MatrixC::zeros(self.rows, 0);
        }
        let keep = svd.singular_values.iter().take_while(|&&s| s > tol.rank_tol * smax).count();
        MatrixC::from_fn(self.rows, keep, |i, j| svd.u[(i, j)])
    }

    /// Numerical rank at `rank_tol·σ_max` (zero for numerically zero
    /// matrices).
    pub fn rank(&self, tol: &Tolerance) -> usize {
        if self.is_empty() {
            return 0;
        }
        let svd = crate::jacobi::svd(self);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        if smax <= tol.rank_tol * (1.0 + self.norm()) {
            return 0;
        }
        svd.singular_values.iter().filter(|&&s| s > tol.rank_tol * smax).count()
    }

    /// Largest singular value, estimated by power iteration on `A*A`.
    /// Deterministic start, relative accuracy ~1e-9; plenty for comparing
    /// deviations against thresholds.
    pub fn op_norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let n = self.cols;
        // fixed quasi-random start so results are reproducible
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut v = MatrixC::zeros(n, 1);
        for i in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            v[(i, 0)] = Complex64::new(1.0 + re, im);
        }
        let mut sigma = 0.0f64;
        for _ in 0..200 {
            let av = self.mul(&v);
            let new_sigma = av.norm() / v.norm();
            let w = self.adjoint().mul(&av);
            let wn = w.norm();
            if wn == 0.0 {
                return 0.0;
            }
            v = w.scale(Complex64::new(1.0 / wn, 0.0));
            if (new_sigma - sigma).abs() <= 1e-10 * (1.0 + new_sigma) {
                return new_sigma;
            }
            sigma = new_sigma;
        }
        sigma
    }

    /// Orthonormal basis of the (right) nullspace.
    ///
    /// Returns `cols − rank` orthonormal columns `v` with
    /// `‖a·v‖ ≤ rank_tol·(1+‖a‖)`.
    pub fn nullspace_basis(&self, tol: &Tolerance) -> Result<MatrixC> {
        if self.is_empty() {
            return Err(Error::Contract("nullspace of an empty matrix".into()));
        }
        let svd = crate::jacobi::svd(self);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        // A numerically zero matrix annihilates everything; the purely
        // relative cutoff would otherwise compare noise against noise.
        let cutoff = if smax <= tol.rank_tol * (1.0 + self.norm()) {
            f64::INFINITY
        } else {
            tol.rank_tol * smax
        };
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] <= cutoff)
            .collect();
        Ok(MatrixC::from_fn(self.cols, keep.len(), |i, j| svd.v[(i, keep[j])]))
    }

    /// Least-squares solve `self · x ≈ rhs` via the SVD pseudoinverse.
    pub fn solve_lstsq(&self, rhs: &MatrixC, tol: &Tolerance) -> MatrixC {
        let svd = crate::jacobi::svd(self);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        let mut x = MatrixC::zeros(self.cols, rhs.cols());
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= tol.rank_tol * smax {
                break;
            }
            let uk = svd.u.col(k);
            let vk = svd.v.col(k);
            // x += v_k (u_k* rhs) / s
            let coeff = uk.adjoint().mul(rhs).scale(Complex64::new(1.0 / s, 0.0));
            x = x.add(&vk.mul(&coeff));
        }
        x
    }

    /// The orthogonal projector `B B*` onto the span of orthonormal columns.
    pub fn projector(&self) -> MatrixC {
        self.mul(&self.adjoint())
    }
}

impl std::ops::Index<(usize, usize)> for MatrixC {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixC {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Mode selector for [`subspace_ops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceMode {
    Intersect,
    Sum,
    /// `span(u) ⊖ span(v)`, requiring `span(v) ⊆ span(u)`.
    ComplementWithin,
}

/// Meet, join and relative complement of subspaces given by orthonormal
/// column bases.
pub fn subspace_ops(u: &MatrixC, v: &MatrixC, mode: SubspaceMode, tol: &Tolerance) -> Result<MatrixC> {
    if u.rows() != v.rows() {
        return Err(Error::Contract("subspace_ops row-count mismatch".into()));
    }
    let d = u.rows();
    match mode {
        SubspaceMode::Sum => Ok(u.hstack(v).orthonormal_columns(tol)),
        SubspaceMode::Intersect => {
            if u.cols() == 0 || v.cols() == 0 {
                return Ok(MatrixC::zeros(d, 0));
            }
            // Any kernel vector of the stacked projector differences lies
            // in span(a), so parameterize through the smaller basis: the
            // intersection is a·ker(a − P_b·a).
            let (a, b) = if u.cols() <= v.cols() { (u, v) } else { (v, u) };
            let residual = a.sub(&b.projector().mul(a));
            let kernel = residual.nullspace_basis(tol)?;
            if kernel.cols() == 0 {
                return Ok(MatrixC::zeros(d, 0));
            }
            Ok(a.mul(&kernel).orthonormal_columns(tol))
        }
        SubspaceMode::ComplementWithin => {
            let pu = u.projector();
            for j in 0..v.cols() {
                let col = v.col(j);
                if pu.mul(&col).sub(&col).norm() > tol.eq_tol * (1.0 + col.norm()) {
                    return Err(Error::Contract(
                        "complement_within requires span(v) ⊆ span(u)".into(),
                    ));
                }
            }
            if v.cols() == 0 {
                return Ok(u.clone());
            }
            let pv = v.projector();
            let residual = u.sub(&pv.mul(u));
            Ok(residual.orthonormal_columns(tol))
        }
    }
}

/// `‖P_u − P_v‖₂`, the sine of the largest principal angle between the
/// spans of two orthonormal column sets (1 when the dimensions differ).
pub fn span_deviation(u: &MatrixC, v: &MatrixC) -> f64 {
    assert_eq!(u.rows(), v.rows(), "span_deviation row mismatch");
    if u.cols() == 0 && v.cols() == 0 {
        return 0.0;
    }
    u.projector().sub(&v.projector()).op_norm()
}

/// Gram–Schmidt a batch of new columns against an existing orthonormal set,
/// appending only those with residual norm above `rank_tol` times the
/// incoming column norm. Re-orthogonalizes once, which is enough at these
/// scales.
pub fn extend_orthonormal(basis: &mut Vec<MatrixC>, candidates: &[MatrixC], tol: &Tolerance) {
    extend_orthonormal_capped(basis, candidates, tol, usize::MAX);
}

/// [`extend_orthonormal`] that stops as soon as the basis reaches `cap`
/// elements. With `cap` equal to the dimension of the enclosing space the
/// remaining candidates are spanned automatically.
pub fn extend_orthonormal_capped(
    basis: &mut Vec<MatrixC>,
    candidates: &[MatrixC],
    tol: &Tolerance,
    cap: usize,
) {
    for cand in candidates {
        if basis.len() >= cap {
            return;
        }
        let scale = cand.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = cand.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&w);
                w = w.sub(&b.scale(c));
            }
        }
        if w.norm() > tol.rank_tol.max(1e-12) * scale.max(1.0) * 10.0 {
            let n = w.norm();
            basis.push(w.scale(Complex64::new(1.0 / n, 0.0)));
        }
    }
}

/// Matrix with independent complex Gaussian entries (Box–Muller).
pub fn random_gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> MatrixC {
    let mut normal = || {
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let data: Vec<Complex64> =
        (0..rows * cols).map(|_| Complex64::new(normal(), normal())).collect();
    MatrixC { rows, cols, data }
}

/// Haar-like random unitary via orthonormalization of a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> MatrixC {
    let g = random_gaussian(n, n, rng);
    let mut basis: Vec<MatrixC> = Vec::with_capacity(n);
    let tol = Tolerance::default();
    extend_orthonormal(&mut basis, &g.columns().collect::<Vec<_>>(), &tol);
    while basis.len() < n {
        // Gaussian matrices are almost surely nonsingular; top up anyway.
        let extra = random_gaussian(n, 1, rng);
        extend_orthonormal(&mut basis, &[extra], &tol);
    }
    MatrixC::from_columns(&basis)
}

/// Random unit column vector.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> MatrixC {
    loop {
        let v = random_gaussian(n, 1, rng);
        if let Ok(u) = v.normalized() {
            return u;
        }
    }
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
