//! Haar measure as the solution of one stacked linear system, and the
//! objects derived from it.

use crate::linop::{self, c, Mat, Vector, TOL};
use crate::report::Report;

use super::{cartan, col_span_residual, to_grid, WeakHopf, WhaError};

#[derive(Debug, Clone)]
pub struct HaarSolution {
    pub phi: Vector,
    /// Rank of the full system; uniqueness means rank `d`.
    pub rank: usize,
    /// Dimension of the solutions of the homogeneous conditions alone
    /// (antipode invariance and strong invariance), a diagnostic.
    pub invariant_dim: usize,
    pub residual: f64,
    /// Smallest eigenvalue of the Gram matrix `[φ(a_i* a_j)]`.
    pub gram_min: f64,
}

/// Rows of `φ∘κ = φ` and strong invariance, then the normalization
/// `(i ⊗ φ)Γ(1) = 1` with its right-hand side.
fn haar_system(w: &WeakHopf) -> (Mat, Mat, Vector) {
    let d = w.d();
    let a = &w.alg;
    let k = &w.antipode;
    let grids: Vec<Mat> = (0..d).map(|x| to_grid(&w.coproduct.column(x).into_owned(), d, d)).collect();
    let lefts: Vec<Mat> = (0..d).map(|y| a.left_mult(&a.basis_vec(y))).collect();
    let rights: Vec<Mat> = (0..d).map(|x| a.right_mult(&a.basis_vec(x))).collect();

    let mut hom = linop::zeros(d + d * d * d, d);
    hom.view_mut((0, 0), (d, d)).copy_from(&(k.transpose() - linop::eye(d)));
    for x in 0..d {
        for y in 0..d {
            // (1 ⊗ a_y)Γ(a_x) and Γ(a_y)(1 ⊗ a_x) as grids
            let z1 = &grids[x] * lefts[y].transpose();
            let z2 = &grids[y] * rights[x].transpose();
            let row = d + (x * d + y) * d;
            hom.view_mut((row, 0), (d, d)).copy_from(&(z1 - k * z2));
        }
    }
    let norm = to_grid(&w.delta_one(), d, d);
    (hom, norm, a.unit.clone())
}

/// The Gram matrix `G[i, j] = φ(a_i* a_j)` of the GNS inner product.
pub fn gram(w: &WeakHopf, phi: &Vector) -> Mat {
    let a = &w.alg;
    let d = w.d();
    let ev = |x: &Vector| -> linop::C64 { phi.iter().zip(x.iter()).map(|(p, q)| p * q).sum() };
    Mat::from_fn(d, d, |i, j| ev(&a.mul(&a.star_of(&a.basis_vec(i)), &a.basis_vec(j))))
}

pub fn haar_solve(w: &WeakHopf) -> Result<HaarSolution, WhaError> {
    let d = w.d();
    let (hom, norm, rhs) = haar_system(w);
    let mut m = linop::zeros(hom.nrows() + d, d);
    m.view_mut((0, 0), (hom.nrows(), d)).copy_from(&hom);
    m.view_mut((hom.nrows(), 0), (d, d)).copy_from(&norm);
    let mut b = linop::zeros(hom.nrows() + d, 1);
    b.view_mut((hom.nrows(), 0), (d, 1)).copy_from(&rhs);
    let (x, residual) = linop::lstsq(&m, &b);
    if residual >= TOL {
        return Err(WhaError::NoSolution(residual));
    }
    let rank = linop::rank(&m);
    if rank < d {
        return Err(WhaError::NonUnique { rank, d });
    }
    let phi = x.column(0).into_owned();
    let g = gram(w, &phi);
    let herm = linop::diff_norm(&g, &g.adjoint());
    let gram_min = linop::min_eigenvalue(&((&g + g.adjoint()) * c(0.5)));
    if herm >= TOL || gram_min < -TOL {
        return Err(WhaError::NotPositive(if herm >= TOL { -herm } else { gram_min }));
    }
    if gram_min <= linop::RANK_REL {
        return Err(WhaError::NotFaithful(gram_min));
    }
    Ok(HaarSolution { phi, rank, invariant_dim: linop::null_space(&hom).ncols(), residual, gram_min })
}

/// The GNS frame: `B = G^{1/2}`, so that `π(a) = B L_a B⁻¹` acts on an
/// orthonormal basis of `H_φ`.
#[derive(Debug, Clone)]
pub struct GnsFrame {
    pub b: Mat,
    pub b_inv: Mat,
}

impl GnsFrame {
    pub fn new(w: &WeakHopf, phi: &Vector) -> Self {
        let g = gram(w, phi);
        let g = (&g + g.adjoint()) * c(0.5);
        GnsFrame { b: linop::hermitian_fn(&g, |t| t.max(0.0).sqrt()), b_inv: linop::hermitian_fn(&g, |t| 1.0 / t.sqrt()) }
    }

    pub fn pi(&self, w: &WeakHopf, x: &Vector) -> Mat {
        &self.b * w.alg.left_mult(x) * &self.b_inv
    }

    /// Preimage of an operator commuting with the right multiplications.
    pub fn element(&self, w: &WeakHopf, op: &Mat) -> Vector {
        // π(x) B 1 = B x
        &self.b_inv * op * &self.b * &w.alg.unit
    }
}

#[derive(Debug, Clone)]
pub struct HaarDerived {
    pub es: Mat,
    pub et: Mat,
    pub g_s: Vector,
    pub g_t: Vector,
    pub report: Report,
}

fn is_positive(frame: &GnsFrame, w: &WeakHopf, x: &Vector) -> f64 {
    let p = frame.pi(w, x);
    let herm = linop::diff_norm(&p, &p.adjoint());
    herm.max(-linop::min_eigenvalue(&((&p + p.adjoint()) * c(0.5))))
}

fn square_root(frame: &GnsFrame, w: &WeakHopf, x: &Vector) -> Vector {
    let p = frame.pi(w, x);
    let root = linop::sqrt_psd(&((&p + p.adjoint()) * c(0.5)));
    frame.element(w, &root)
}

/// Conditional expectations, `g_s`, `g_t` with `p = 1`, and the identities
/// relating them to the antipode and the modular group.
pub fn haar_derived(w: &WeakHopf, phi: &Vector) -> Result<HaarDerived, WhaError> {
    let d = w.d();
    let a = &w.alg;
    let g = &w.coproduct;
    let es = Mat::from_fn(d, d, |cc, i| (0..d).map(|aa| phi[aa] * g[(aa * d + cc, i)]).sum());
    let et = Mat::from_fn(d, d, |cc, i| (0..d).map(|b| g[(cc * d + b, i)] * phi[b]).sum());
    let frame = GnsFrame::new(w, phi);
    let cart = cartan(w);
    let mut r = Report::new("Haar conditional expectations and modular data");

    r.check("source_expectation_idempotent", linop::diff_norm(&(&es * &es), &es));
    r.check("target_expectation_idempotent", linop::diff_norm(&(&et * &et), &et));
    r.check("source_expectation_range", col_span_residual(&es, &cart.source));
    r.check("target_expectation_range", col_span_residual(&et, &cart.target));
    let phirow = phi.transpose();
    r.check("haar_preserved_by_source_expectation", (&phirow * &es - &phirow).norm());
    r.check("haar_preserved_by_target_expectation", (&phirow * &et - &phirow).norm());

    let mut samples: Vec<Vector> = (0..d).map(|i| a.basis_vec(i)).collect();
    for i in 0..d {
        for j in i + 1..d {
            samples.push(a.basis_vec(i) + a.basis_vec(j));
            samples.push(a.basis_vec(i) + a.basis_vec(j) * c64i());
        }
    }
    let mut pos = 0.0f64;
    for x in &samples {
        let sq = a.mul(&a.star_of(x), x);
        pos = pos.max(is_positive(&frame, w, &(&es * &sq))).max(is_positive(&frame, w, &(&et * &sq)));
    }
    r.check("expectations_positive_on_squares", pos.max(0.0));

    let ys = &es * &a.unit;
    let yt = &et * &a.unit;
    let invertible = linop::is_invertible(&frame.pi(w, &ys)) && linop::is_invertible(&frame.pi(w, &yt));
    r.check("expectations_of_unit_positive", is_positive(&frame, w, &ys).max(is_positive(&frame, w, &yt)).max(0.0));
    r.assert("expectations_of_unit_invertible", invertible);
    let g_s = square_root(&frame, w, &ys);
    let g_t = square_root(&frame, w, &yt);
    r.check("g_t_is_antipode_of_g_s", (&w.antipode * &g_s - &g_t).norm());

    if invertible {
        let inv = |x: &Vector| frame.element(w, &linop::pinv(&frame.pi(w, x)));
        let (gs_inv, gt_inv) = (inv(&g_s), inv(&g_t));
        let left = a.mul(&g_t, &gs_inv);
        let right = a.mul(&gt_inv, &g_s);
        let k2 = &w.antipode * &w.antipode;
        let conj = a.left_mult(&left) * a.right_mult(&right);
        r.check("antipode_square_is_inner", linop::diff_norm(&k2, &conj));
        // φ(x y) = φ(y σ(x)) with σ(x) = g_t g_s x g_t⁻¹ g_s⁻¹
        let sl = a.mul(&g_t, &g_s);
        let sr = a.mul(&gt_inv, &gs_inv);
        let sigma = a.left_mult(&sl) * a.right_mult(&sr);
        let ev = |x: &Vector| -> linop::C64 { phi.iter().zip(x.iter()).map(|(p, q)| p * q).sum() };
        let mut kms = 0.0f64;
        for i in 0..d {
            let x = a.basis_vec(i);
            let sx = &sigma * &x;
            for j in 0..d {
                let y = a.basis_vec(j);
                kms = kms.max((ev(&a.mul(&x, &y)) - ev(&a.mul(&y, &sx))).norm());
            }
        }
        r.check("modular_relation", kms);
        r.observe("antipode_square_is_identity", linop::diff_norm(&k2, &linop::eye(d)) < TOL);
    }
    Ok(HaarDerived { es, et, g_s, g_t, report: r })
}

fn c64i() -> linop::C64 {
    linop::C64::new(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::MatchPair;
    use crate::instances;
    use crate::mpi::{build_i_g, build_i_hk};
    use crate::wha::{commutative_oracle, extract_wha, group_algebra_oracle, oracle_match, Side};

    fn close(v: &Vector, want: &[f64]) -> bool {
        v.len() == want.len() && v.iter().zip(want).all(|(a, &b)| (a - c(b)).norm() < 1e-9)
    }

    #[test]
    fn haar_on_commutative_examples() {
        let w = extract_wha(&build_i_g(&instances::z2()), Side::Left).unwrap();
        let o = commutative_oracle(&instances::z2());
        let h = haar_solve(&o).unwrap();
        assert!(close(&h.phi, &[0.5, 0.5]));
        assert_eq!(h.rank, 2);
        // same form through the change of basis from the oracle
        let (t, _) = crate::wha::transport(&w, o.ops.as_ref().unwrap()).unwrap();
        let hw = haar_solve(&w).unwrap();
        assert!(close(&(t.transpose() * &hw.phi), &[0.5, 0.5]));

        let h = haar_solve(&commutative_oracle(&instances::p2())).unwrap();
        assert!(close(&h.phi, &[0.5; 4]));
        let h = haar_solve(&commutative_oracle(&instances::u1())).unwrap();
        assert!(close(&h.phi, &[1.0]));
        let h = haar_solve(&commutative_oracle(&instances::z2_sqcup_z2())).unwrap();
        assert!(close(&h.phi, &[0.5; 4]));
    }

    #[test]
    fn haar_matches_oracle_value() {
        for g in [instances::z2(), instances::p2(), instances::p3(), instances::s3()] {
            for o in [commutative_oracle(&g), group_algebra_oracle(&g)] {
                let h = haar_solve(&o).unwrap();
                assert!((h.phi.clone() - o.haar.clone().unwrap()).norm() < 1e-9, "{}", g.len());
            }
        }
    }

    #[test]
    fn derived_objects() {
        let (g, hh, kk) = instances::s3_match_pair_ids();
        let ihk = build_i_hk(&MatchPair::new(&g, &hh, &kk).unwrap());
        let ws = [
            commutative_oracle(&instances::p2()),
            group_algebra_oracle(&instances::z2()),
            extract_wha(&ihk, Side::Left).unwrap(),
            extract_wha(&ihk, Side::Right).unwrap(),
        ];
        for w in &ws {
            let h = haar_solve(w).unwrap();
            let der = haar_derived(w, &h.phi).unwrap();
            assert!(der.report.passed(), "{}", der.report.to_text());
            let id = der.report.observations.iter().find(|o| o.name == "antipode_square_is_identity").unwrap();
            assert_eq!(id.value, "true");
        }
        // trivial Cartan: E^t = φ(·)1 on the group algebra of ℤ/2
        let w = &ws[1];
        let phi = haar_solve(w).unwrap().phi;
        let der = haar_derived(w, &phi).unwrap();
        let want = &w.alg.unit * phi.transpose();
        assert!(linop::diff_norm(&der.et, &want) < 1e-12);
    }

    #[test]
    fn extracted_matches_oracle_after_haar() {
        let g = instances::p2();
        let w = extract_wha(&build_i_g(&g), Side::Left).unwrap();
        assert!(oracle_match(&w, &commutative_oracle(&g)).passed());
        assert!(haar_solve(&w).is_ok());
    }
}
