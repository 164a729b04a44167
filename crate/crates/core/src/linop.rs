//! Dense complex operators on finite Hilbert spaces.
//!
//! A tensor basis vector `e_i ⊗ e_j` of `H ⊗ K` sits at index `i * dim K + j`,
//! which is the layout of [`nalgebra::DMatrix::kronecker`]. Vectorization of
//! an operator is column-major.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Equality tolerance for operator identities (spectral norm).
pub const TOL: f64 = 1e-9;
/// Relative singular-value cutoff for rank and null-space decisions.
pub const RANK_REL: f64 = 1e-8;
/// Below this, a largest singular value counts as zero.
const ABS_ZERO: f64 = 1e-12;

fn cutoff(smax: f64) -> f64 {
    (RANK_REL * smax).max(ABS_ZERO)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinopError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operator of size {rows}x{cols} does not factor as ({h}*{k})^2")]
    BadFactorization { rows: usize, cols: usize, h: usize, k: usize },
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(r: usize, cl: usize) -> Mat {
    Mat::zeros(r, cl)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn adjoint(a: &Mat) -> Mat {
    a.adjoint()
}

pub fn compose(a: &Mat, b: &Mat) -> Result<Mat, LinopError> {
    if a.ncols() != b.nrows() {
        return Err(LinopError::ShapeMismatch(format!(
            "{}x{} times {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a * b)
}

/// The matrix unit `E_{ij}` of size `n`.
pub fn unit_matrix(n: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

pub fn diag_indicator(n: usize, pred: impl Fn(usize) -> bool) -> Mat {
    Mat::from_fn(n, n, |i, j| if i == j && pred(i) { c(1.0) } else { c(0.0) })
}

fn to_faer(a: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> Mat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin SVD `a = u diag(s) v*` with `s` non-increasing.
///
/// Backed by faer: the nalgebra 0.33 bidiagonal SVD loses accuracy (errors
/// near 1e-3) on some rank-deficient 0/1 matrices that occur here.
pub fn svd(a: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (zeros(m, 0), Vec::new(), zeros(n, 0));
    }
    let f = to_faer(a).thin_svd().expect("SVD converges");
    let s = f.S().column_vector();
    let vals: Vec<f64> = (0..k).map(|i| s[i].re).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));
    let (u, v) = (from_faer(f.U()), from_faer(f.V()));
    let pick = |w: &Mat| Mat::from_columns(&order.iter().map(|&i| w.column(i).into_owned()).collect::<Vec<_>>());
    (pick(&u), order.iter().map(|&i| vals[i]).collect(), pick(&v))
}

pub fn singular_values(a: &Mat) -> Vec<f64> {
    svd(a).1
}

/// Spectral norm.
pub fn op_norm(a: &Mat) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

pub fn frob(a: &Mat) -> f64 {
    a.norm()
}

/// Norm used for residuals. The Frobenius norm bounds the spectral norm, so
/// when it is already far below tolerance it is reported directly.
pub fn residual_norm(a: &Mat) -> f64 {
    let f = frob(a);
    if !f.is_finite() {
        return f64::NAN;
    }
    if f < 1e-3 * TOL {
        f
    } else {
        op_norm(a)
    }
}

pub fn diff_norm(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    residual_norm(&(a - b))
}

pub fn is_projection(a: &Mat) -> bool {
    a.is_square() && diff_norm(&(a * a), a) < TOL && diff_norm(&a.adjoint(), a) < TOL
}

pub fn is_partial_isometry(a: &Mat) -> bool {
    diff_norm(&(a * a.adjoint() * a), a) < TOL
}

pub fn is_unitary(a: &Mat) -> bool {
    a.is_square() && diff_norm(&(a.adjoint() * a), &eye(a.ncols())) < TOL
}

/// Column-major vectorization.
pub fn vec_op(a: &Mat) -> Vector {
    Vector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &[C64], n: usize) -> Mat {
    Mat::from_column_slice(n, n, v)
}

/// Trace inner product `⟨A, B⟩ = Tr(B* A)`.
pub fn inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum()
}

pub fn trace(a: &Mat) -> C64 {
    a.trace()
}

/// The flip `Σ: H ⊗ K → K ⊗ H`, `Σ(v ⊗ w) = w ⊗ v`.
pub fn swap(h: usize, k: usize) -> Mat {
    let mut m = zeros(h * k, h * k);
    for i in 0..h {
        for j in 0..k {
            m[(j * h + i, i * k + j)] = c(1.0);
        }
    }
    m
}

/// A linear form on `𝓛(K)`.
#[derive(Debug, Clone)]
pub enum LinearForm {
    /// `ω_{ξ,η}(T) = ⟨Tξ, η⟩`.
    RankOne { xi: Vector, eta: Vector },
    /// `ω(T) = Σ D[i,j] T[i,j]`.
    Dense(Mat),
}

impl LinearForm {
    /// The basis form `ω_{χ_p, χ_q}`, picking out the entry `T[q, p]`.
    pub fn basis(dim: usize, p: usize, q: usize) -> Self {
        let mut d = zeros(dim, dim);
        d[(q, p)] = c(1.0);
        LinearForm::Dense(d)
    }

    pub fn dim(&self) -> usize {
        match self {
            LinearForm::RankOne { xi, .. } => xi.len(),
            LinearForm::Dense(d) => d.nrows(),
        }
    }

    /// Coefficient matrix `D` with `ω(T) = Σ D[i,j] T[i,j]`.
    pub fn coefficients(&self) -> Mat {
        match self {
            LinearForm::RankOne { xi, eta } => {
                Mat::from_fn(xi.len(), xi.len(), |i, j| eta[i].conj() * xi[j])
            }
            LinearForm::Dense(d) => d.clone(),
        }
    }

    pub fn eval(&self, t: &Mat) -> C64 {
        let d = self.coefficients();
        d.iter().zip(t.iter()).map(|(a, b)| a * b).sum()
    }
}

fn check_factor(x: &Mat, h: usize, k: usize) -> Result<(), LinopError> {
    if x.nrows() != h * k || x.ncols() != h * k {
        return Err(LinopError::BadFactorization { rows: x.nrows(), cols: x.ncols(), h, k });
    }
    Ok(())
}

/// `(i ⊗ ω)(X)` for `X` on `H ⊗ K`, `dim H = h`, `ω` a form on `𝓛(K)`.
pub fn slice_right(x: &Mat, h: usize, k: usize, w: &LinearForm) -> Result<Mat, LinopError> {
    check_factor(x, h, k)?;
    if w.dim() != k {
        return Err(LinopError::ShapeMismatch("form dimension differs from second leg".into()));
    }
    let d = w.coefficients();
    let nz: Vec<(usize, usize, C64)> = nonzeros(&d);
    Ok(Mat::from_fn(h, h, |g, g2| {
        nz.iter().map(|&(i, j, v)| v * x[(g * k + i, g2 * k + j)]).sum()
    }))
}

/// `(ω ⊗ i)(X)` for `X` on `H ⊗ K`, `ω` a form on `𝓛(H)`.
pub fn slice_left(x: &Mat, h: usize, k: usize, w: &LinearForm) -> Result<Mat, LinopError> {
    check_factor(x, h, k)?;
    if w.dim() != h {
        return Err(LinopError::ShapeMismatch("form dimension differs from first leg".into()));
    }
    let d = w.coefficients();
    let nz = nonzeros(&d);
    Ok(Mat::from_fn(k, k, |a, b| {
        nz.iter().map(|&(i, j, v)| v * x[(i * k + a, j * k + b)]).sum()
    }))
}

/// `slice_right` against `ω_{χ_p, χ_q}`: entry `[g, g'] = X[(g, q), (g', p)]`.
pub fn slice_right_basis(x: &Mat, h: usize, k: usize, p: usize, q: usize) -> Mat {
    debug_assert_eq!(x.nrows(), h * k);
    Mat::from_fn(h, h, |g, g2| x[(g * k + q, g2 * k + p)])
}

/// `slice_left` against `ω_{χ_p, χ_q}`: entry `[g, g'] = X[(q, g), (p, g')]`.
pub fn slice_left_basis(x: &Mat, h: usize, k: usize, p: usize, q: usize) -> Mat {
    debug_assert_eq!(x.nrows(), h * k);
    Mat::from_fn(k, k, |g, g2| x[(q * k + g, p * k + g2)])
}

fn nonzeros(m: &Mat) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != C64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Which two legs of `H ⊗ H ⊗ H` an operator on `H ⊗ H` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Legs {
    L12,
    L13,
    L23,
}

/// Computes `X_legs · M` for `M` with `n³` rows, by index contraction over
/// the nonzero entries of `X`.
pub fn leg_apply(x: &Mat, n: usize, legs: Legs, m: &Mat) -> Mat {
    assert_eq!(x.nrows(), n * n);
    assert_eq!(m.nrows(), n * n * n);
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut out = zeros(m.nrows(), m.ncols());
    for (row, col, v) in nonzeros(x) {
        let (r1, r2) = (row / n, row % n);
        let (c1, c2) = (col / n, col % n);
        for t in 0..n {
            let (dst, src) = match legs {
                Legs::L12 => (idx(r1, r2, t), idx(c1, c2, t)),
                Legs::L13 => (idx(r1, t, r2), idx(c1, t, c2)),
                Legs::L23 => (idx(t, r1, r2), idx(t, c1, c2)),
            };
            for k in 0..m.ncols() {
                let s = m[(src, k)];
                if s != C64::new(0.0, 0.0) {
                    out[(dst, k)] += v * s;
                }
            }
        }
    }
    out
}

/// The leg embedding as an explicit `n³ × n³` operator, via Kronecker
/// products with the identity and the flip.
pub fn leg_explicit(x: &Mat, n: usize, legs: Legs) -> Mat {
    match legs {
        Legs::L12 => kron(x, &eye(n)),
        Legs::L23 => kron(&eye(n), x),
        Legs::L13 => {
            let s23 = kron(&eye(n), &swap(n, n));
            &s23 * kron(x, &eye(n)) * &s23
        }
    }
}

/// Pentagon residual `‖I₁₂ I₁₃ I₂₃ − I₂₃ I₁₂‖`.
pub fn pentagon_residual(x: &Mat, n: usize) -> f64 {
    let id = eye(n * n * n);
    let lhs = leg_apply(x, n, Legs::L12, &leg_apply(x, n, Legs::L13, &leg_apply(x, n, Legs::L23, &id)));
    let rhs = leg_apply(x, n, Legs::L23, &leg_apply(x, n, Legs::L12, &id));
    diff_norm(&lhs, &rhs)
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &Mat) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if a.nrows() == 0 {
        return eye(n);
    }
    // Reduce tall systems to an n×n triangular factor with the same kernel.
    let sq = if a.nrows() > n {
        a.clone().qr().r()
    } else {
        let mut p = zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    };
    let (_, sv, v) = svd(&sq);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = cutoff(smax);
    let cols: Vec<Vector> = (0..sv.len()).filter(|&i| sv[i] <= cut).map(|i| v.column(i).into_owned()).collect();
    if cols.is_empty() {
        return zeros(n, 0);
    }
    Mat::from_columns(&cols)
}

pub fn rank(a: &Mat) -> usize {
    let sv = singular_values(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > cutoff(smax)).count()
}

/// Orthonormal basis of the column span. Nonzero columns are normalized
/// first so that the relative cutoff is not skewed by scale.
pub fn orth(a: &Mat) -> Mat {
    let big = a.column_iter().map(|col| col.norm()).fold(0.0, f64::max);
    // A column of norm ν carries absolute rounding error near 1e-16, so after
    // normalization its relative error is 1e-16/ν. Columns too small for that
    // to stay below the rank cutoff are dropped instead of promoted.
    let floor = (1e-7 * big).max(ABS_ZERO);
    let cols: Vec<Vector> = a
        .column_iter()
        .filter_map(|col| {
            let nrm = col.norm();
            (nrm > floor).then(|| col / c(nrm))
        })
        .collect();
    if cols.is_empty() {
        return zeros(a.nrows(), 0);
    }
    let m = Mat::from_columns(&cols);
    let (u, sv, _) = svd(&m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let keep: Vec<Vector> =
        (0..sv.len()).filter(|&i| sv[i] > cutoff(smax)).map(|i| u.column(i).into_owned()).collect();
    if keep.is_empty() {
        return zeros(a.nrows(), 0);
    }
    Mat::from_columns(&keep)
}

/// Moore-Penrose pseudo-inverse with the relative rank cutoff.
pub fn pinv(a: &Mat) -> Mat {
    if a.is_empty() {
        return zeros(a.ncols(), a.nrows());
    }
    let (u, sv, v) = svd(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = cutoff(smax);
    let inv = Vector::from_iterator(sv.len(), sv.iter().map(|&x| if x > cut { c(1.0 / x) } else { c(0.0) }));
    v * Mat::from_diagonal(&inv) * u.adjoint()
}

/// Least-squares solution of `a x = b` with the relative residual `‖ax − b‖`.
pub fn lstsq(a: &Mat, b: &Mat) -> (Mat, f64) {
    let x = pinv(a) * b;
    let r = residual_norm(&(a * &x - b));
    (x, r)
}

/// Whether the smallest singular value exceeds the invertibility cutoff.
pub fn is_invertible(a: &Mat) -> bool {
    a.is_square() && singular_values(a).into_iter().fold(f64::INFINITY, f64::min) > RANK_REL
}

/// Hermitian part of `a`, then its eigen-decomposition.
pub fn hermitian_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let h = (a + a.adjoint()) * c(0.5);
    if h.is_empty() {
        return (Vec::new(), h);
    }
    let e = to_faer(&h).self_adjoint_eigen(faer::Side::Lower).expect("eigensolver converges");
    let s = e.S().column_vector();
    ((0..h.nrows()).map(|i| s[i].re).collect(), from_faer(e.U()))
}

/// `f(a)` for a Hermitian `a` by spectral calculus.
pub fn hermitian_fn(a: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (vals, vecs) = hermitian_eigen(a);
    let d = Mat::from_diagonal(&Vector::from_iterator(vals.len(), vals.iter().map(|&v| c(f(v)))));
    &vecs * d * vecs.adjoint()
}

pub fn min_eigenvalue(a: &Mat) -> f64 {
    hermitian_eigen(a).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Square root of a positive semidefinite operator; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn sqrt_psd(a: &Mat) -> Mat {
    hermitian_fn(a, |v| v.max(0.0).sqrt())
}

/// JSON-friendly export as nested `[re, im]` pairs, row by row.
pub fn to_pairs(a: &Mat) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
}

pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Mat, LinopError> {
    let r = rows.len();
    let cl = rows.first().map_or(0, |v| v.len());
    if rows.iter().any(|v| v.len() != cl) {
        return Err(LinopError::ShapeMismatch("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(r, cl, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}
