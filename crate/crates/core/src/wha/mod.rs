//! Weak Hopf C*-algebras in coordinates.
//!
//! Elements are coordinate vectors in a fixed basis `a_1..a_d`. The
//! coproduct is a `d² × d` matrix whose column `i` holds the coordinates of
//! `Γ(a_i)` in the basis `a_j ⊗ a_k` (index `j * d + k`); the antipode is a
//! `d × d` matrix and the counit a row of `d` values.

mod gns;
mod haar;
mod oracle;

pub use gns::{gns_mpi, gns_round_trip, GnsMpi};
pub use haar::{gram, haar_derived, haar_solve, GnsFrame, HaarDerived, HaarSolution};
pub use oracle::{commutative_oracle, group_algebra_oracle, lambda, oracle_match, rho};

use thiserror::Error;

use crate::linop::{self, c, Mat, Vector, C64, TOL};
use crate::mpi::{self, Mpi, MpiError};
use crate::report::Report;
use crate::staralg::{FdAlgebra, StarAlgError, StarSubspace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WhaError {
    #[error("the mpi is not regular (residual {0:.3e})")]
    NotRegular(f64),
    #[error("slice formulas do not define a map for {what} (defect {defect:.3e})")]
    InconsistentSlices { what: &'static str, defect: f64 },
    #[error("Haar conditions have no solution (defect {0:.3e})")]
    NoSolution(f64),
    #[error("Haar conditions have rank {rank} < {d}")]
    NonUnique { rank: usize, d: usize },
    #[error("form is not positive (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("Haar measure is not faithful (smallest eigenvalue {0:.3e})")]
    NotFaithful(f64),
    #[error("antipode is not involutive on the Cartan subalgebras (residual {0:.3e})")]
    AntipodeNotInvolutiveOnCartan(f64),
    #[error("GNS base construction needs a commutative source Cartan subalgebra")]
    UnsupportedBase,
    #[error("pairing is degenerate: rank {rank} < {d}")]
    Degenerate { rank: usize, d: usize },
    #[error("structure has no Haar measure attached")]
    NoHaar,
    #[error(transparent)]
    Alg(#[from] StarAlgError),
    #[error(transparent)]
    Mpi(#[from] MpiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(S, Γ, κ, ε)` on the left slices.
    Left,
    /// `(Ŝ, Γ̂, κ̂, ε̂)` on the right slices.
    Right,
}

#[derive(Debug, Clone)]
pub struct WeakHopf {
    pub alg: FdAlgebra,
    pub coproduct: Mat,
    pub antipode: Mat,
    pub counit: Vector,
    pub haar: Option<Vector>,
    /// Operator realization of the basis, when the structure came from an mpi.
    pub ops: Option<Vec<Mat>>,
    pub labels: Vec<String>,
}

/// `x y` in `A₁ ⊗ A₂` for coordinate vectors of length `d₁ d₂`.
pub fn tensor_mul(a1: &FdAlgebra, a2: &FdAlgebra, x: &Vector, y: &Vector) -> Vector {
    let (d1, d2) = (a1.d, a2.d);
    let xm = to_grid(x, d1, d2);
    let ym = to_grid(y, d1, d2);
    let mut out = Vector::zeros(d1 * d2);
    // T_c = Xᵀ M_c Y holds Σ_{a,b} X[a,a'] M[a,b,c] Y[b,b'].
    let m2: Vec<Mat> = (0..d2).map(|k| a2.slice_matrix(k)).collect();
    for cc in 0..d1 {
        let t = xm.transpose() * a1.slice_matrix(cc) * &ym;
        for (c2, mk) in m2.iter().enumerate() {
            out[cc * d2 + c2] = t.iter().zip(mk.iter()).map(|(p, q)| p * q).sum();
        }
    }
    out
}

/// Coordinates `v[j * d2 + k]` as a `d1 × d2` grid.
pub fn to_grid(v: &Vector, d1: usize, d2: usize) -> Mat {
    Mat::from_fn(d1, d2, |j, k| v[j * d2 + k])
}

pub fn from_grid(m: &Mat) -> Vector {
    let (d1, d2) = m.shape();
    Vector::from_fn(d1 * d2, |i, _| m[(i / d2, i % d2)])
}

pub fn elementary(x: &Vector, y: &Vector) -> Vector {
    let d2 = y.len();
    Vector::from_fn(x.len() * d2, |i, _| x[i / d2] * y[i % d2])
}

/// The flip `ς` on coordinates of `A ⊗ A`.
pub fn flip_matrix(d: usize) -> Mat {
    linop::swap(d, d)
}

/// Coordinates of `X ∈ 𝓛(H ⊗ H)` in the basis `q_j ⊗ q_k`, where the
/// columns of `q` are orthonormal vectorized operators on `H`, together with
/// the Frobenius distance from `X` to the span.
pub fn tensor_coords(x: &Mat, q: &Mat, n: usize) -> (Mat, f64) {
    // R[(p + q n), (r + s n)] = X[p n + r, q n + s] so that X = Σ c_jk a_j ⊗ a_k
    // becomes R = Q c Qᵀ.
    let r = Mat::from_fn(n * n, n * n, |row, col| {
        let (p, qq) = (row % n, row / n);
        let (rr, s) = (col % n, col / n);
        x[(p * n + rr, qq * n + s)]
    });
    let coords = q.adjoint() * &r * q.map(|z| z.conj());
    let back = q * &coords * q.transpose();
    (coords, (r - back).norm())
}

impl WeakHopf {
    pub fn d(&self) -> usize {
        self.alg.d
    }

    pub fn unit(&self) -> &Vector {
        &self.alg.unit
    }

    pub fn coproduct_of(&self, x: &Vector) -> Vector {
        &self.coproduct * x
    }

    pub fn antipode_of(&self, x: &Vector) -> Vector {
        &self.antipode * x
    }

    pub fn counit_of(&self, x: &Vector) -> C64 {
        self.counit.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn delta_one(&self) -> Vector {
        self.coproduct_of(self.unit())
    }

    pub fn tmul(&self, x: &Vector, y: &Vector) -> Vector {
        tensor_mul(&self.alg, &self.alg, x, y)
    }

    /// The operator realizing a coordinate vector, when available.
    pub fn realize(&self, x: &Vector) -> Option<Mat> {
        let ops = self.ops.as_ref()?;
        let n = ops.first()?.nrows();
        Some(ops.iter().zip(x.iter()).fold(linop::zeros(n, n), |acc, (o, &w)| acc + o * w))
    }

    /// Copy with a replaced antipode, for negative controls.
    pub fn with_antipode(&self, k: Mat) -> Self {
        WeakHopf { antipode: k, ..self.clone() }
    }
}

/// Builds `(S, Γ, κ, ε)` or `(Ŝ, Γ̂, κ̂, ε̂)` from a regular mpi.
pub fn extract_wha(i: &Mpi, side: Side) -> Result<WeakHopf, WhaError> {
    let (regular, rep) = mpi::is_regular(i);
    if !regular {
        return Err(WhaError::NotRegular(rep.max_residual()));
    }
    extract_unchecked(i, side)
}

/// Extraction without the regularity precheck.
pub fn extract_unchecked(i: &Mpi, side: Side) -> Result<WeakHopf, WhaError> {
    let n = i.n;
    let ia = i.matrix.adjoint();
    let (slices, star_slices) = match side {
        Side::Left => (i.left_slices(), left_slices_of(&ia, n)),
        Side::Right => (i.right_slices(), right_slices_of(&ia, n)),
    };
    let sub = StarSubspace::span(n, &slices);
    let ops = sub.elements();
    let d = ops.len();
    let alg = FdAlgebra::from_operators(&ops)?;
    let q = sub.q().clone();

    let mut gamma = linop::zeros(d * d, d);
    let mut gamma_defect = 0.0f64;
    for (k, a) in ops.iter().enumerate() {
        let id = linop::eye(n);
        let x = match side {
            Side::Left => &i.matrix * linop::kron(a, &id) * &ia,
            Side::Right => &ia * linop::kron(&id, a) * &i.matrix,
        };
        let (coords, defect) = tensor_coords(&x, &q, n);
        gamma_defect = gamma_defect.max(defect);
        gamma.set_column(k, &from_grid(&coords));
    }
    if gamma_defect >= TOL {
        return Err(WhaError::InconsistentSlices { what: "coproduct", defect: gamma_defect });
    }

    // Slice coordinates C (d × n²) and the prescribed antipode images T.
    let cmat = coords_matrix(&q, &slices);
    let tvecs = Mat::from_columns(&star_slices.iter().map(linop::vec_op).collect::<Vec<_>>());
    let cp = linop::pinv(&cmat);
    let kmat = q.adjoint() * &tvecs * &cp;
    let k_defect = (&q * &kmat * &cmat - &tvecs).norm();
    if k_defect >= TOL {
        return Err(WhaError::InconsistentSlices { what: "antipode", defect: k_defect });
    }
    // ε(slice_{p,q}) = ω_{p,q}(1) = δ_{pq}
    let w = Mat::from_fn(1, n * n, |_, pq| if pq / n == pq % n { c(1.0) } else { c(0.0) });
    let eps = &w * &cp;
    let e_defect = (&eps * &cmat - &w).norm();
    if e_defect >= TOL {
        return Err(WhaError::InconsistentSlices { what: "counit", defect: e_defect });
    }
    let labels = (0..d).map(|k| format!("{}{k}", if side == Side::Left { "s" } else { "t" })).collect();
    Ok(WeakHopf {
        alg,
        coproduct: gamma,
        antipode: kmat,
        counit: eps.row(0).transpose(),
        haar: None,
        ops: Some(ops),
        labels,
    })
}

fn left_slices_of(x: &Mat, n: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            out.push(linop::slice_left_basis(x, n, n, p, q));
        }
    }
    out
}

fn right_slices_of(x: &Mat, n: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            out.push(linop::slice_right_basis(x, n, n, p, q));
        }
    }
    out
}

fn coords_matrix(q: &Mat, ops: &[Mat]) -> Mat {
    let vecs = Mat::from_columns(&ops.iter().map(linop::vec_op).collect::<Vec<_>>());
    q.adjoint() * vecs
}

/// Residual of every axiom of a weak Hopf C*-algebra, on basis elements
/// (and basis pairs for the bilinear axioms).
pub fn verify_weak_hopf(w: &WeakHopf) -> Report {
    let d = w.d();
    let mut r = Report::new(format!("weak Hopf C*-algebra of dimension {d}"));
    let a = &w.alg;
    let g = &w.coproduct;
    let k = &w.antipode;
    let e = |i: usize| a.basis_vec(i);
    let id = linop::eye(d);

    let (assoc, star_law) = a.axiom_residuals();
    r.check("algebra_associative", assoc);
    r.check("algebra_star", star_law);
    let unit_res = (0..d)
        .map(|i| (a.mul(&a.unit, &e(i)) - e(i)).norm().max((a.mul(&e(i), &a.unit) - e(i)).norm()))
        .fold(0.0, f64::max);
    r.check("algebra_unit", unit_res);

    r.check("coassociativity", linop::diff_norm(&(linop::kron(g, &id) * g), &(linop::kron(&id, g) * g)));

    let mut mult = 0.0f64;
    let mut star = 0.0f64;
    let mut anti = 0.0f64;
    let sstar = linop::kron(&a.star, &a.star);
    for i in 0..d {
        let gi = g * e(i);
        let lhs = g * a.star_of(&e(i));
        let rhs = &sstar * gi.map(|z| z.conj());
        star = star.max((lhs - rhs).norm());
        for j in 0..d {
            let gj = g * e(j);
            let prod = a.mul(&e(i), &e(j));
            mult = mult.max((g * &prod - w.tmul(&gi, &gj)).norm());
            let lhs = k * &prod;
            let rhs = a.mul(&(k * e(j)), &(k * e(i)));
            anti = anti.max((lhs - rhs).norm());
        }
    }
    r.check("coproduct_multiplicative", mult);
    r.check("coproduct_star", star);
    r.check("antipode_antimultiplicative", anti);
    // (κ∘*)² is x ↦ K S conj(K S conj(x)) = K S K̄ S̄ x
    let ks = k * &a.star;
    r.check("antipode_star_involution", linop::diff_norm(&(&ks * ks.map(|z| z.conj())), &id));
    let flip = flip_matrix(d);
    r.check("antipode_coproduct", linop::diff_norm(&(linop::kron(k, k) * g), &(&flip * g * k)));

    // (m(κ ⊗ i) ⊗ i)(Γ ⊗ i)Γ(x) = (1 ⊗ x)Γ(1)
    let mut pmat = linop::zeros(d * d, d);
    for aa in 0..d {
        let ka = k * e(aa);
        for b in 0..d {
            pmat.set_row(aa * d + b, &a.mul(&ka, &e(b)).transpose());
        }
    }
    let g2 = linop::kron(g, &id) * g;
    let d1 = w.delta_one();
    let mut ant = 0.0f64;
    for x in 0..d {
        let y = g2.column(x);
        let ygrid = Mat::from_fn(d * d, d, |ab, cc| y[ab * d + cc]);
        let z = pmat.transpose() * ygrid;
        let rhs = w.tmul(&elementary(&a.unit, &e(x)), &d1);
        ant = ant.max((from_grid(&z) - rhs).norm());
    }
    r.check("antipode_identity", ant);

    let eps_row = w.counit.transpose();
    let mut cl = 0.0f64;
    let mut cr = 0.0f64;
    for i in 0..d {
        let grid = to_grid(&(g * e(i)), d, d);
        let left = (&eps_row * &grid).transpose();
        let right = &grid * &w.counit;
        cl = cl.max((left - e(i)).norm());
        cr = cr.max((right - e(i)).norm());
    }
    r.check("counit_left", cl);
    r.check("counit_right", cr);

    // (ε⊗ε)((x⊗1)Γ(1)(1⊗y)) = ε(xy); with E1[x, a] = ε(a_x a_a) this reads E1 G1 E1 = E1
    let e1 = Mat::from_fn(d, d, |x, aa| (0..d).map(|cc| a.m(x, aa, cc) * w.counit[cc]).sum());
    let g1 = to_grid(&d1, d, d);
    r.check("counit_weak_multiplicativity", linop::diff_norm(&(&e1 * &g1 * &e1), &e1));

    let gram = Mat::from_fn(d, d, |i, j| w.counit_of(&a.mul(&a.star_of(&e(i)), &e(j))));
    let herm = linop::diff_norm(&gram, &gram.adjoint());
    let neg = (-linop::min_eigenvalue(&gram)).max(0.0);
    r.check("counit_positive", herm.max(neg));
    r
}

/// Target and source Cartan subalgebras as coordinate bases (columns).
#[derive(Debug, Clone)]
pub struct Cartan {
    pub target: Mat,
    pub source: Mat,
    pub report: Report,
}

fn null_of_stack(blocks: &[Mat], d: usize) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = linop::zeros(rows, d);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, 0), (b.nrows(), d)).copy_from(b);
        off += b.nrows();
    }
    linop::null_space(&m)
}

/// Whether two coordinate column spans coincide, with the residual.
pub fn col_span_residual(a: &Mat, b: &Mat) -> f64 {
    let qa = linop::orth(a);
    let qb = linop::orth(b);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let r1 = linop::op_norm(&(&qa - &qb * (qb.adjoint() * &qa)));
    let r2 = linop::op_norm(&(&qb - &qa * (qa.adjoint() * &qb)));
    r1.max(r2)
}

pub fn cartan(w: &WeakHopf) -> Cartan {
    let d = w.d();
    let a = &w.alg;
    let d1 = w.delta_one();
    let g = &w.coproduct;
    let mut lt1 = linop::zeros(d * d, d);
    let mut lt2 = linop::zeros(d * d, d);
    let mut ls1 = linop::zeros(d * d, d);
    let mut ls2 = linop::zeros(d * d, d);
    for i in 0..d {
        let x = a.basis_vec(i);
        let x1 = elementary(&x, &a.unit);
        let one_x = elementary(&a.unit, &x);
        lt1.set_column(i, &w.tmul(&d1, &x1));
        lt2.set_column(i, &w.tmul(&x1, &d1));
        ls1.set_column(i, &w.tmul(&d1, &one_x));
        ls2.set_column(i, &w.tmul(&one_x, &d1));
    }
    let target = null_of_stack(&[g - &lt1, g - &lt2], d);
    let source = null_of_stack(&[g - &ls1, g - &ls2], d);
    let mut r = Report::new("Cartan subalgebras");
    let mut comm = 0.0f64;
    for i in 0..target.ncols() {
        let x = target.column(i).into_owned();
        for j in 0..source.ncols() {
            let y = source.column(j).into_owned();
            comm = comm.max((a.mul(&x, &y) - a.mul(&y, &x)).norm());
        }
    }
    r.check("cartan_commute", comm);
    r.check("antipode_maps_target_to_source", col_span_residual(&(&w.antipode * &target), &source));
    r.check("target_closed", closure_residual(a, &target));
    r.check("source_closed", closure_residual(a, &source));
    r.observe("dim_target", target.ncols());
    r.observe("dim_source", source.ncols());
    Cartan { target, source, report: r }
}

/// Distance of products and adjoints of basis columns from their span.
fn closure_residual(a: &FdAlgebra, basis: &Mat) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    let q = linop::orth(basis);
    let off = |v: Vector| (&v - &q * (q.adjoint() * &v)).norm();
    let mut res = 0.0f64;
    for i in 0..basis.ncols() {
        let x = basis.column(i).into_owned();
        res = res.max(off(a.star_of(&x)));
        for j in 0..basis.ncols() {
            res = res.max(off(a.mul(&x, &basis.column(j).into_owned())));
        }
    }
    res
}

/// The bilinear pairing `⟨(ω ⊗ i)(I), (i ⊗ ω′)(I)⟩ = (ω ⊗ ω′)(I)` in the
/// orthonormal slice bases of `S` and `Ŝ`.
#[derive(Debug, Clone)]
pub struct Pairing {
    pub matrix: Mat,
    pub rank: usize,
    pub consistency: f64,
}

pub fn pairing(i: &Mpi) -> Result<Pairing, WhaError> {
    let n = i.n;
    let (s, sh) = mpi::leg_algebras(i)?;
    let cl = coords_matrix(s.q(), &i.left_slices());
    let cr = coords_matrix(sh.q(), &i.right_slices());
    // V[(p,q),(r,t)] = (ω_{p,q} ⊗ ω_{r,t})(I) = I[(q,t),(p,r)]
    let v = Mat::from_fn(n * n, n * n, |pq, rt| {
        let (p, q) = (pq / n, pq % n);
        let (rr, t) = (rt / n, rt % n);
        i.matrix[(q * n + t, p * n + rr)]
    });
    let p = linop::pinv(&cl.transpose()) * &v * linop::pinv(&cr);
    let consistency = linop::residual_norm(&(cl.transpose() * &p * &cr - &v));
    let rank = linop::rank(&p);
    if consistency >= TOL {
        return Err(WhaError::InconsistentSlices { what: "pairing", defect: consistency });
    }
    if rank < s.dim().max(sh.dim()) {
        return Err(WhaError::Degenerate { rank, d: s.dim().max(sh.dim()) });
    }
    Ok(Pairing { matrix: p, rank, consistency })
}

/// Residuals showing that `T` (columns: images of the source basis in
/// destination coordinates) is an isomorphism of weak Hopf structures.
pub fn isomorphism_residual(src: &WeakHopf, dst: &WeakHopf, t: &Mat) -> Report {
    let d = src.d();
    let mut r = Report::new("isomorphism of weak Hopf structures");
    r.assert("dimensions_match", d == dst.d() && t.shape() == (dst.d(), d));
    if !(d == dst.d() && t.shape() == (d, d)) {
        return r;
    }
    r.check("map_invertible", if linop::is_invertible(t) { 0.0 } else { 1.0 });
    let mut prod = 0.0f64;
    let mut star = 0.0f64;
    for i in 0..d {
        let ei = src.alg.basis_vec(i);
        let ti = t * &ei;
        star = star.max((t * src.alg.star_of(&ei) - dst.alg.star_of(&ti)).norm());
        for j in 0..d {
            let ej = src.alg.basis_vec(j);
            let lhs = t * src.alg.mul(&ei, &ej);
            let rhs = dst.alg.mul(&ti, &(t * &ej));
            prod = prod.max((lhs - rhs).norm());
        }
    }
    r.check("product", prod);
    r.check("star", star);
    r.check("unit", (t * &src.alg.unit - &dst.alg.unit).norm());
    r.check("coproduct", linop::diff_norm(&(linop::kron(t, t) * &src.coproduct), &(&dst.coproduct * t)));
    r.check("antipode", linop::diff_norm(&(t * &src.antipode), &(&dst.antipode * t)));
    r.check("counit", (dst.counit.transpose() * t - src.counit.transpose()).norm());
    r
}

/// Coordinates in `dst`'s operator basis of the operators `ops`, with the
/// largest distance of any of them from the span of `dst`.
pub fn transport(dst: &WeakHopf, ops: &[Mat]) -> Option<(Mat, f64)> {
    let basis = dst.ops.as_ref()?;
    let cols = Mat::from_columns(&basis.iter().map(linop::vec_op).collect::<Vec<_>>());
    let targets = Mat::from_columns(&ops.iter().map(linop::vec_op).collect::<Vec<_>>());
    let (t, res) = linop::lstsq(&cols, &targets);
    Some((t, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::MatchPair;
    use crate::instances;
    use crate::mpi::{build_i_g, build_i_hk};

    fn s3_mpi() -> Mpi {
        let (g, h, k) = instances::s3_match_pair_ids();
        build_i_hk(&MatchPair::new(&g, &h, &k).unwrap())
    }

    #[test]
    fn extracted_structures_verify() {
        for i in [build_i_g(&instances::z2()), build_i_g(&instances::p2()), s3_mpi()] {
            for side in [Side::Left, Side::Right] {
                let w = extract_wha(&i, side).unwrap();
                let r = verify_weak_hopf(&w);
                assert!(r.passed(), "{side:?}\n{}", r.to_text());
            }
        }
    }

    #[test]
    fn identity_antipode_fails_on_p2() {
        let w = extract_wha(&build_i_g(&instances::p2()), Side::Left).unwrap();
        let bad = w.with_antipode(linop::eye(w.d()));
        let r = verify_weak_hopf(&bad);
        assert!(!r.passed());
        assert!(r.residual("antipode_identity") >= 0.1, "{}", r.to_text());
    }

    #[test]
    fn cartan_dims() {
        let w = extract_wha(&build_i_g(&instances::p2()), Side::Left).unwrap();
        let c = cartan(&w);
        assert!(c.report.passed(), "{}", c.report.to_text());
        assert_eq!((c.target.ncols(), c.source.ncols()), (2, 2));
        // A_t is spanned by the r-diagonals
        let p2 = instances::p2();
        for &u in p2.units() {
            let diag = linop::diag_indicator(4, |x| p2.tgt(x) == u);
            let (coords, res) = transport(&w, &[diag]).unwrap();
            assert!(res < 1e-12);
            let mut ext = c.target.clone();
            ext.extend(coords.column_iter().map(|v| v.into_owned()));
            assert!(col_span_residual(&c.target, &ext) < 1e-9);
        }
        let w = extract_wha(&s3_mpi(), Side::Right).unwrap();
        let c = cartan(&w);
        assert_eq!((c.target.ncols(), c.source.ncols()), (1, 1));
        let w = extract_wha(&build_i_g(&instances::z2()), Side::Right).unwrap();
        let c = cartan(&w);
        assert_eq!((c.target.ncols(), c.source.ncols()), (1, 1));
    }

    #[test]
    fn pairing_ranks() {
        assert_eq!(pairing(&build_i_g(&instances::u1())).unwrap().rank, 1);
        let p = pairing(&build_i_g(&instances::u1())).unwrap();
        assert!((p.matrix[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert_eq!(pairing(&build_i_g(&instances::z2())).unwrap().rank, 2);
        assert_eq!(pairing(&build_i_g(&instances::p2())).unwrap().rank, 4);
        assert_eq!(pairing(&s3_mpi()).unwrap().rank, 6);
    }

    #[test]
    fn tensor_coords_roundtrip() {
        let w = extract_wha(&build_i_g(&instances::p2()), Side::Left).unwrap();
        let ops = w.ops.clone().unwrap();
        let q = Mat::from_columns(&ops.iter().map(linop::vec_op).collect::<Vec<_>>());
        let x = linop::kron(&ops[1], &ops[2]) * c(2.0) + linop::kron(&ops[0], &ops[3]);
        let (coords, res) = tensor_coords(&x, &q, 4);
        assert!(res < 1e-12);
        assert!((coords[(1, 2)] - c(2.0)).norm() < 1e-12);
        assert!((coords[(0, 3)] - c(1.0)).norm() < 1e-12);
    }
}
