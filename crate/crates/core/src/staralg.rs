//! Operator subspaces and finite-dimensional *-algebras.
//!
//! A [`StarSubspace`] stores an orthonormal basis (trace inner product) of
//! vectorized operators; its closure flags are computed, never assumed. An
//! [`FdAlgebra`] is the abstract counterpart given by structure constants.

use crate::linop::{self, c, Mat, Vector, C64, TOL};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StarAlgError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("base representations are over different unit sets")]
    BaseMismatch,
    #[error("algebra has no unit (defect {0:.3e})")]
    NoUnit(f64),
}

#[derive(Debug, Clone)]
pub struct StarSubspace {
    n: usize,
    q: Mat,
    pub closed_under_product: bool,
    pub closed_under_adjoint: bool,
    pub product_residual: f64,
    pub adjoint_residual: f64,
}

impl StarSubspace {
    /// Span of the given operators on an `n`-dimensional space.
    pub fn span(n: usize, ops: &[Mat]) -> Self {
        let cols: Vec<Vector> = ops.iter().map(linop::vec_op).collect();
        let m = if cols.is_empty() { linop::zeros(n * n, 0) } else { Mat::from_columns(&cols) };
        Self::from_q(n, linop::orth(&m))
    }

    /// Builds from a matrix whose columns are already orthonormal.
    pub fn from_q(n: usize, q: Mat) -> Self {
        assert_eq!(q.nrows(), n * n);
        let mut s = StarSubspace {
            n,
            q,
            closed_under_product: false,
            closed_under_adjoint: false,
            product_residual: 0.0,
            adjoint_residual: 0.0,
        };
        s.refresh_flags();
        s
    }

    pub fn full(n: usize) -> Self {
        Self::from_q(n, linop::eye(n * n))
    }

    fn refresh_flags(&mut self) {
        let n2 = self.n * self.n;
        if self.dim() == n2 {
            self.closed_under_adjoint = true;
            self.closed_under_product = true;
            return;
        }
        let els = self.elements();
        let off = |cols: Vec<Vector>| -> f64 {
            if cols.is_empty() {
                return 0.0;
            }
            let m = Mat::from_columns(&cols);
            let rest = &m - &self.q * (self.q.adjoint() * &m);
            rest.column_iter().map(|v| v.norm()).fold(0.0, f64::max)
        };
        let adj = off(els.iter().map(|a| linop::vec_op(&a.adjoint())).collect());
        let mut prod = 0.0f64;
        for a in &els {
            prod = prod.max(off(els.iter().map(|b| linop::vec_op(&(a * b))).collect()));
        }
        self.adjoint_residual = adj;
        self.product_residual = prod;
        self.closed_under_adjoint = adj < TOL;
        self.closed_under_product = prod < TOL;
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn element(&self, i: usize) -> Mat {
        linop::unvec(self.q.column(i).as_slice(), self.n)
    }

    pub fn elements(&self) -> Vec<Mat> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Coordinates of `x`'s orthogonal projection in the stored basis.
    pub fn coords(&self, x: &Mat) -> Vector {
        self.q.adjoint() * linop::vec_op(x)
    }

    pub fn project(&self, x: &Mat) -> Mat {
        let v = &self.q * self.coords(x);
        linop::unvec(v.as_slice(), self.n)
    }

    /// Frobenius distance from `x` to the subspace.
    pub fn outside(&self, x: &Mat) -> f64 {
        let v = linop::vec_op(x);
        (&v - &self.q * (self.q.adjoint() * &v)).norm()
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.outside(x) < TOL
    }

    pub fn is_star_algebra(&self) -> bool {
        self.closed_under_product && self.closed_under_adjoint
    }

    /// Structure constants in the stored orthonormal basis.
    pub fn to_fd_algebra(&self) -> Result<FdAlgebra, StarAlgError> {
        FdAlgebra::from_operators(&self.elements())
    }
}

/// Smallest subspace containing `gens` closed under products and adjoints,
/// optionally also containing the identity.
pub fn generated_algebra(n: usize, gens: &[Mat], unital: bool) -> StarSubspace {
    let mut pool: Vec<Mat> = Vec::new();
    for g in gens {
        pool.push(g.clone());
        pool.push(g.adjoint());
    }
    let gen_span = StarSubspace::span(n, &pool);
    let gen_basis = gen_span.elements();
    if unital {
        pool.push(linop::eye(n));
    }
    let mut cur = StarSubspace::span(n, &pool);
    let cap = n * n + 2;
    for _ in 0..cap {
        let mut next = cur.elements();
        let base = next.clone();
        for w in &base {
            for g in &gen_basis {
                next.push(w * g);
            }
        }
        let grown = StarSubspace::span(n, &next);
        if grown.dim() == cur.dim() {
            return grown;
        }
        cur = grown;
    }
    panic!("span growth did not stabilize within the ambient dimension");
}

/// `{X : XG = GX for all G in gens}` on an `n`-dimensional space.
pub fn commutant(n: usize, gens: &[Mat]) -> StarSubspace {
    let span = StarSubspace::span(n, gens);
    if span.dim() == 0 {
        return StarSubspace::full(n);
    }
    let id = linop::eye(n);
    let mut r: Option<Mat> = None;
    for g in span.elements() {
        // vec(XG) = (Gᵀ ⊗ 1) vec X, vec(GX) = (1 ⊗ G) vec X
        let block = linop::kron(&g.transpose(), &id) - linop::kron(&id, &g);
        let stacked = match r.take() {
            None => block,
            Some(prev) => {
                let mut s = linop::zeros(prev.nrows() + block.nrows(), n * n);
                s.view_mut((0, 0), (prev.nrows(), n * n)).copy_from(&prev);
                s.view_mut((prev.nrows(), 0), (block.nrows(), n * n)).copy_from(&block);
                s
            }
        };
        r = Some(if stacked.nrows() > n * n { stacked.qr().r() } else { stacked });
    }
    StarSubspace::from_q(n, linop::null_space(&r.unwrap()))
}

pub fn intersect(a: &StarSubspace, b: &StarSubspace) -> Result<StarSubspace, StarAlgError> {
    if a.n != b.n {
        return Err(StarAlgError::AmbientMismatch(a.n, b.n));
    }
    let n2 = a.n * a.n;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(StarSubspace::from_q(a.n, linop::zeros(n2, 0)));
    }
    let mut m = linop::zeros(n2, a.dim() + b.dim());
    m.view_mut((0, 0), (n2, a.dim())).copy_from(&a.q);
    m.view_mut((0, a.dim()), (n2, b.dim())).copy_from(&(-&b.q));
    let ns = linop::null_space(&m);
    let vecs = &a.q * ns.rows(0, a.dim());
    Ok(StarSubspace::from_q(a.n, linop::orth(&vecs)))
}

/// Mutual projection residual `max(‖(1−P_B)Q_A‖, ‖(1−P_A)Q_B‖)`; equal iff
/// both directions are below tolerance.
pub fn subspace_equal(a: &StarSubspace, b: &StarSubspace) -> Result<(bool, f64), StarAlgError> {
    if a.n != b.n {
        return Err(StarAlgError::AmbientMismatch(a.n, b.n));
    }
    let off = |x: &StarSubspace, y: &StarSubspace| -> f64 {
        if x.dim() == 0 {
            return 0.0;
        }
        let rest = &x.q - &y.q * (y.q.adjoint() * &x.q);
        linop::op_norm(&rest)
    };
    let r = off(a, b).max(off(b, a));
    Ok((r < TOL && a.dim() == b.dim(), r))
}

pub fn center(a: &StarSubspace) -> StarSubspace {
    let comm = commutant(a.n, &a.elements());
    intersect(a, &comm).expect("same ambient")
}

/// A representation of `N = C(𝒢⁰)` by diagonal projections, one per unit.
#[derive(Debug, Clone)]
pub struct BaseRep {
    pub units: Vec<usize>,
    pub proj: Vec<Mat>,
}

impl BaseRep {
    /// `f ↦ f ∘ map` on `ℓ²` of a finite set, where `map` sends each basis
    /// label to a unit.
    pub fn from_map(units: &[usize], map: &[usize]) -> Self {
        let n = map.len();
        let proj = units.iter().map(|&u| linop::diag_indicator(n, |x| map[x] == u)).collect();
        BaseRep { units: units.to_vec(), proj }
    }

    pub fn dim(&self) -> usize {
        self.proj.first().map_or(0, |p| p.nrows())
    }

    /// Image of a function on units given by its values.
    pub fn apply(&self, f: &[C64]) -> Mat {
        let mut out = linop::zeros(self.dim(), self.dim());
        for (p, &v) in self.proj.iter().zip(f) {
            out += p * v;
        }
        out
    }

    /// Residual of orthogonality plus completeness: `Σ p_u = 1`, `p_u p_v = δ p_u`.
    pub fn partition_residual(&self) -> f64 {
        let n = self.dim();
        let mut sum = linop::zeros(n, n);
        let mut r = 0.0f64;
        for (i, p) in self.proj.iter().enumerate() {
            sum += p;
            for (j, q) in self.proj.iter().enumerate() {
                let want = if i == j { p.clone() } else { linop::zeros(n, n) };
                r = r.max(linop::diff_norm(&(p * q), &want));
            }
        }
        r.max(linop::diff_norm(&sum, &linop::eye(n)))
    }
}

/// `e = Σ_u s(χ_u) ⊗ r(χ_u)`.
pub fn e_proj(s_rep: &BaseRep, r_rep: &BaseRep) -> Result<Mat, StarAlgError> {
    if s_rep.units != r_rep.units {
        return Err(StarAlgError::BaseMismatch);
    }
    let (a, b) = (s_rep.dim(), r_rep.dim());
    let mut e = linop::zeros(a * b, a * b);
    for (p, q) in s_rep.proj.iter().zip(&r_rep.proj) {
        e += linop::kron(p, q);
    }
    Ok(e)
}

/// `(i ⊗ Tr)(e)`, reported as a diagnostic only.
pub fn e_proj_partial_trace(e: &Mat, a: usize, b: usize) -> Mat {
    let mut out = linop::zeros(a, a);
    for k in 0..b {
        out += linop::slice_right_basis(e, a, b, k, k);
    }
    out
}

/// Finite-dimensional algebra by structure constants:
/// `a_i a_j = Σ_k mult[(i d + j) d + k] a_k`, `a_i* = Σ_k star[(k, i)] a_k`.
#[derive(Debug, Clone)]
pub struct FdAlgebra {
    pub d: usize,
    pub mult: Vec<C64>,
    pub star: Mat,
    pub unit: Vector,
}

impl FdAlgebra {
    /// Structure constants of the span of linearly independent operators.
    /// Products are expressed by least squares; the basis need not be
    /// orthonormal.
    pub fn from_operators(ops: &[Mat]) -> Result<Self, StarAlgError> {
        let d = ops.len();
        let cols: Vec<Vector> = ops.iter().map(linop::vec_op).collect();
        let b = Mat::from_columns(&cols);
        let bp = linop::pinv(&b);
        let coords = |x: &Mat| -> Vector { &bp * linop::vec_op(x) };
        let mut mult = vec![c(0.0); d * d * d];
        for i in 0..d {
            for j in 0..d {
                let v = coords(&(&ops[i] * &ops[j]));
                for k in 0..d {
                    mult[(i * d + j) * d + k] = v[k];
                }
            }
        }
        let mut star = linop::zeros(d, d);
        for i in 0..d {
            star.set_column(i, &coords(&ops[i].adjoint()));
        }
        let mut alg = FdAlgebra { d, mult, star, unit: Vector::zeros(d) };
        let n = ops.first().map_or(0, |o| o.nrows());
        let id = linop::eye(n);
        let u = coords(&id);
        let back: Mat = ops.iter().zip(u.iter()).fold(linop::zeros(n, n), |acc, (o, &w)| acc + o * w);
        if linop::diff_norm(&back, &id) < TOL {
            alg.unit = u;
        } else {
            alg.unit = alg.solve_unit()?;
        }
        Ok(alg)
    }

    pub fn m(&self, i: usize, j: usize, k: usize) -> C64 {
        self.mult[(i * self.d + j) * self.d + k]
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.d;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            if x[i] == c(0.0) {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == c(0.0) {
                    continue;
                }
                for k in 0..d {
                    out[k] += w * self.m(i, j, k);
                }
            }
        }
        out
    }

    pub fn star_of(&self, x: &Vector) -> Vector {
        &self.star * x.map(|z| z.conj())
    }

    pub fn basis_vec(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.d);
        v[i] = c(1.0);
        v
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mult(&self, x: &Vector) -> Mat {
        let mut l = linop::zeros(self.d, self.d);
        for j in 0..self.d {
            l.set_column(j, &self.mul(x, &self.basis_vec(j)));
        }
        l
    }

    /// Matrix of `y ↦ y x`.
    pub fn right_mult(&self, x: &Vector) -> Mat {
        let mut r = linop::zeros(self.d, self.d);
        for j in 0..self.d {
            r.set_column(j, &self.mul(&self.basis_vec(j), x));
        }
        r
    }

    /// The matrix `M_c` with entries `M_c[i, j] = m(i, j, c)`.
    pub fn slice_matrix(&self, k: usize) -> Mat {
        Mat::from_fn(self.d, self.d, |i, j| self.m(i, j, k))
    }

    fn solve_unit(&self) -> Result<Vector, StarAlgError> {
        let d = self.d;
        // e a_i = a_i and a_i e = a_i for every i.
        let mut a = linop::zeros(2 * d * d, d);
        let mut b = linop::zeros(2 * d * d, 1);
        for i in 0..d {
            for k in 0..d {
                for e in 0..d {
                    a[(i * d + k, e)] = self.m(e, i, k);
                    a[(d * d + i * d + k, e)] = self.m(i, e, k);
                }
                if i == k {
                    b[(i * d + k, 0)] = c(1.0);
                    b[(d * d + i * d + k, 0)] = c(1.0);
                }
            }
        }
        let (x, r) = linop::lstsq(&a, &b);
        if r >= TOL {
            return Err(StarAlgError::NoUnit(r));
        }
        Ok(x.column(0).into_owned())
    }

    /// Associativity and star-law residuals (anti-multiplicative involution).
    pub fn axiom_residuals(&self) -> (f64, f64) {
        let d = self.d;
        let mut assoc = 0.0f64;
        let mut star = 0.0f64;
        for i in 0..d {
            let ai = self.basis_vec(i);
            for j in 0..d {
                let aj = self.basis_vec(j);
                let ij = self.mul(&ai, &aj);
                let lhs = self.star_of(&ij);
                let rhs = self.mul(&self.star_of(&aj), &self.star_of(&ai));
                star = star.max((lhs - rhs).norm());
                for k in 0..d {
                    let ak = self.basis_vec(k);
                    let l = self.mul(&ij, &ak);
                    let r = self.mul(&ai, &self.mul(&aj, &ak));
                    assoc = assoc.max((l - r).norm());
                }
            }
            star = star.max((self.star_of(&self.star_of(&ai)) - ai).norm());
        }
        (assoc, star)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli() -> (Mat, Mat) {
        let x = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        (x, z)
    }

    fn block_algebra(blocks: &[usize]) -> Vec<Mat> {
        let n: usize = blocks.iter().sum();
        let mut out = Vec::new();
        let mut off = 0;
        for &b in blocks {
            for i in 0..b {
                for j in 0..b {
                    out.push(linop::unit_matrix(n, off + i, off + j));
                }
            }
            off += b;
        }
        out
    }

    #[test]
    fn generated_examples() {
        assert_eq!(generated_algebra(3, &[linop::eye(3)], false).dim(), 1);
        let (x, z) = pauli();
        let m2 = generated_algebra(2, &[x, z], false);
        assert_eq!(m2.dim(), 4);
        assert!(m2.is_star_algebra());
        let diags: Vec<Mat> = (0..4).map(|i| linop::unit_matrix(4, i, i)).collect();
        let a = generated_algebra(4, &diags, false);
        assert_eq!(a.dim(), 4);
        let els = a.elements();
        for u in &els {
            for v in &els {
                assert!(linop::diff_norm(&(u * v), &(v * u)) < TOL);
            }
        }
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(3, &[]).dim(), 9);
        let (x, z) = pauli();
        assert_eq!(commutant(2, &[x, z]).dim(), 1);
        let p2 = crate::instances::p2();
        let r = BaseRep::from_map(p2.units(), p2.target_map());
        let comm = commutant(4, &r.proj);
        assert_eq!(comm.dim(), 8);
        assert!(comm.is_star_algebra());
    }

    #[test]
    fn intersections_and_centers() {
        let diag = StarSubspace::span(2, &[linop::unit_matrix(2, 0, 0), linop::unit_matrix(2, 1, 1)]);
        let full = StarSubspace::full(2);
        assert_eq!(intersect(&diag, &full).unwrap().dim(), 2);
        let (eq, r) = subspace_equal(&diag, &diag).unwrap();
        assert!(eq && r < 1e-14);
        let m2m3 = StarSubspace::span(5, &block_algebra(&[2, 3]));
        assert_eq!(m2m3.dim(), 13);
        assert_eq!(center(&m2m3).dim(), 2);
        assert!(matches!(intersect(&diag, &StarSubspace::full(3)), Err(StarAlgError::AmbientMismatch(2, 3))));
    }

    #[test]
    fn bicommutant_on_block_algebras() {
        for blocks in [vec![1, 1], vec![2], vec![2, 1], vec![1, 2, 1]] {
            let n: usize = blocks.iter().sum();
            let a = generated_algebra(n, &block_algebra(&blocks), true);
            let cc = commutant(n, &commutant(n, &a.elements()).elements());
            let c1 = commutant(n, &a.elements());
            assert!(subspace_equal(&a, &cc).unwrap().0, "{blocks:?}: {} {} {} {:?}", a.dim(), c1.dim(), cc.dim(), subspace_equal(&a, &cc));
            let again = generated_algebra(n, &a.elements(), true);
            assert!(subspace_equal(&a, &again).unwrap().0, "{blocks:?}: {} {} {:?}", a.dim(), again.dim(), subspace_equal(&a, &again));
        }
    }

    #[test]
    fn e_proj_trivial_and_p2() {
        let one = BaseRep::from_map(&[0], &[0, 0]);
        assert_eq!(e_proj(&one, &one).unwrap(), linop::eye(4));
        let p2 = crate::instances::p2();
        let s = BaseRep::from_map(p2.units(), p2.source_map());
        let e = e_proj(&s, &s).unwrap();
        assert!(linop::is_projection(&e));
        assert_eq!(linop::rank(&e), 8);
        for p in &s.proj {
            let lhs = &e * linop::kron(p, &linop::eye(4));
            let rhs = &e * linop::kron(&linop::eye(4), p);
            assert!(linop::diff_norm(&lhs, &rhs) < TOL);
        }
        let other = BaseRep::from_map(&[7], &[7; 4]);
        assert_eq!(e_proj(&s, &other), Err(StarAlgError::BaseMismatch));
    }

    /// Projections e on H⊗H in the algebra generated by s(N) ⊗ r(N) with
    /// e(s(n)⊗1) = e(1⊗r(n)) and (i⊗Tr)(e) invertible: the linear
    /// constraints leave exactly the sums of the pieces s_u ⊗ r_v, and among
    /// the 0/1 combinations only e_{s,r} satisfies both properties.
    #[test]
    fn e_proj_unique_on_p2() {
        let p2 = crate::instances::p2();
        let s = BaseRep::from_map(p2.units(), p2.source_map());
        let r = BaseRep::from_map(p2.units(), p2.target_map());
        let k = s.units.len();
        let mut found = Vec::new();
        for mask in 0u32..(1 << (k * k)) {
            let mut e = linop::zeros(16, 16);
            for u in 0..k {
                for v in 0..k {
                    if mask & (1 << (u * k + v)) != 0 {
                        e += linop::kron(&s.proj[u], &r.proj[v]);
                    }
                }
            }
            let ok_b = (0..k).all(|u| {
                let lhs = &e * linop::kron(&s.proj[u], &linop::eye(4));
                let rhs = &e * linop::kron(&linop::eye(4), &r.proj[u]);
                linop::diff_norm(&lhs, &rhs) < TOL
            });
            let pt = e_proj_partial_trace(&e, 4, 4);
            if ok_b && linop::is_invertible(&pt) {
                found.push(e);
            }
        }
        assert_eq!(found.len(), 1);
        assert!(linop::diff_norm(&found[0], &e_proj(&s, &r).unwrap()) < TOL);
    }

    #[test]
    fn fd_algebra_from_m2() {
        let ops = block_algebra(&[2]);
        let a = FdAlgebra::from_operators(&ops).unwrap();
        let (assoc, star) = a.axiom_residuals();
        assert!(assoc < 1e-12 && star < 1e-12);
        let u = a.unit.clone();
        for i in 0..4 {
            let e = a.basis_vec(i);
            assert!((a.mul(&u, &e) - &e).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn generated_algebra_idempotent(seed in 0u64..50) {
            let n = 3;
            let g = Mat::from_fn(n, n, |i, j| {
                let h = (seed.wrapping_mul(31) + (i * 7 + j * 3) as u64) % 5;
                if h < 2 { c(0.0) } else { c(h as f64 - 2.5) }
            });
            let a = generated_algebra(n, &[g], true);
            let b = generated_algebra(n, &a.elements(), true);
            prop_assert!(subspace_equal(&a, &b).unwrap().0);
            prop_assert!(a.is_star_algebra());
            let cc = commutant(n, &commutant(n, &a.elements()).elements());
            prop_assert!(subspace_equal(&a, &cc).unwrap().0);
        }
    }
}
