//! The mpi `Λ(x ⊗ y) ↦ Λ(Γ(x)(1 ⊗ y))` on the GNS space of the Haar
//! measure, and the round trip back to a weak Hopf structure.

use crate::linop::{self, c, Mat, Vector, TOL};
use crate::mpi::{self, Mpi, MpiKind};
use crate::report::Report;
use crate::staralg::{BaseRep, StarSubspace};

use super::haar::{haar_solve, GnsFrame};
use super::{cartan, extract_wha, isomorphism_residual, to_grid, transport, Side, WeakHopf, WhaError};

#[derive(Debug, Clone)]
pub struct GnsMpi {
    pub mpi: Mpi,
    pub phi: Vector,
    pub frame: GnsFrame,
}

/// Joint spectral projections of a commuting family of normal operators.
fn minimal_projections(ops: &[Mat], n: usize) -> Vec<Mat> {
    let mut h = linop::zeros(n, n);
    for (k, o) in ops.iter().enumerate() {
        // fixed incommensurable weights separate the joint spectrum
        let w = 1.0 / (k as f64 + std::f64::consts::E);
        let s = o + o.adjoint();
        let t = (o - o.adjoint()) * linop::C64::new(0.0, -1.0);
        h += s * c(w) + t * c(w * std::f64::consts::SQRT_2);
    }
    let (vals, vecs) = linop::hermitian_eigen(&h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut out = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && (vals[i] - vals[order[pos - 1]]).abs() > 1e-6 {
            out.push(group_projection(&vecs, &group));
            group.clear();
        }
        group.push(i);
    }
    if !group.is_empty() {
        out.push(group_projection(&vecs, &group));
    }
    out
}

fn group_projection(vecs: &Mat, idx: &[usize]) -> Mat {
    let cols: Vec<Vector> = idx.iter().map(|&i| vecs.column(i).into_owned()).collect();
    let v = Mat::from_columns(&cols);
    &v * v.adjoint()
}

pub fn gns_mpi(w: &WeakHopf) -> Result<GnsMpi, WhaError> {
    let phi = match &w.haar {
        Some(p) => p.clone(),
        None => haar_solve(w)?.phi,
    };
    let d = w.d();
    let a = &w.alg;
    let frame = GnsFrame::new(w, &phi);
    let gram_min = linop::singular_values(&frame.b).into_iter().fold(f64::INFINITY, f64::min);
    if gram_min <= linop::RANK_REL {
        return Err(WhaError::NotFaithful(gram_min * gram_min));
    }
    let cart = cartan(w);
    let k2 = &w.antipode * &w.antipode;
    let inv_res = [&cart.target, &cart.source]
        .iter()
        .map(|m| linop::residual_norm(&(&k2 * *m - *m)))
        .fold(0.0, f64::max);
    if inv_res >= TOL {
        return Err(WhaError::AntipodeNotInvolutiveOnCartan(inv_res));
    }

    // α(u) = π(P_u) for the minimal projections P_u of A_s, β(u) = π(κ(P_u)).
    let src_ops: Vec<Mat> = cart.source.column_iter().map(|col| frame.pi(w, &col.into_owned())).collect();
    for x in &src_ops {
        for y in &src_ops {
            if linop::diff_norm(&(x * y), &(y * x)) >= TOL {
                return Err(WhaError::UnsupportedBase);
            }
        }
    }
    let span = StarSubspace::span(d, &src_ops);
    let projs = minimal_projections(&src_ops, d);
    if projs.len() != span.dim() || projs.iter().any(|p| !span.contains(p)) {
        return Err(WhaError::UnsupportedBase);
    }
    let alpha: Vec<Mat> = projs.clone();
    let beta: Vec<Mat> = projs
        .iter()
        .map(|p| {
            let x = frame.element(w, p);
            frame.pi(w, &(&w.antipode * x))
        })
        .collect();

    // M[:, x d + y] = coordinates of Γ(a_x)(1 ⊗ a_y)
    let mut m = linop::zeros(d * d, d * d);
    let rights: Vec<Mat> = (0..d).map(|y| a.right_mult(&a.basis_vec(y))).collect();
    for x in 0..d {
        let grid = to_grid(&w.coproduct.column(x).into_owned(), d, d);
        for y in 0..d {
            m.set_column(x * d + y, &super::from_grid(&(&grid * rights[y].transpose())));
        }
    }
    let bb = linop::kron(&frame.b, &frame.b);
    let bb_inv = linop::kron(&frame.b_inv, &frame.b_inv);
    let matrix = &bb * m * &bb_inv;

    // I*I = Σ β̂(u) ⊗ α(u) gives β̂(u) = (i ⊗ Tr)((1 ⊗ α(u)) I*I) / Tr α(u).
    let iti = matrix.adjoint() * &matrix;
    let beta_hat: Vec<Mat> = alpha
        .iter()
        .map(|p| {
            let y = linop::kron(&linop::eye(d), p) * &iti;
            let mut out = linop::zeros(d, d);
            for k in 0..d {
                out += linop::slice_right_basis(&y, d, d, k, k);
            }
            out / linop::trace(p)
        })
        .collect();

    let units: Vec<usize> = (0..alpha.len()).collect();
    let rep = |proj: Vec<Mat>| BaseRep { units: units.clone(), proj };
    let i = Mpi {
        n: d,
        matrix,
        alpha: rep(alpha),
        beta: rep(beta),
        beta_hat: rep(beta_hat),
        kind: MpiKind::Gns,
        labels: w.labels.clone(),
    };
    Ok(GnsMpi { mpi: i, phi, frame })
}

/// Builds the GNS mpi, verifies it, extracts the left structure again and
/// checks that `π_φ` is an isomorphism onto it.
pub fn gns_round_trip(w: &WeakHopf, max_pentagon_dim: usize) -> Result<Report, WhaError> {
    let g = gns_mpi(w)?;
    let mut r = Report::new("GNS round trip");
    r.absorb("mpi", mpi::verify_mpi(&g.mpi, max_pentagon_dim));
    let (regular, reg) = mpi::is_regular(&g.mpi);
    r.absorb("regular", reg);
    if !regular {
        return Ok(r);
    }
    let back = extract_wha(&g.mpi, Side::Left)?;
    let images: Vec<Mat> = (0..w.d()).map(|i| g.frame.pi(w, &w.alg.basis_vec(i))).collect();
    let (t, res) = transport(&back, &images).expect("extracted structures carry operators");
    r.check("representation_lands_in_left_leg", res);
    r.absorb("iso", isomorphism_residual(w, &back, &t));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::MatchPair;
    use crate::instances;
    use crate::mpi::{build_i_g, build_i_hk};
    use crate::wha::{commutative_oracle, extract_wha};

    #[test]
    fn round_trip_on_extracted_structures() {
        let (g, h, k) = instances::s3_match_pair_ids();
        let ihk = build_i_hk(&MatchPair::new(&g, &h, &k).unwrap());
        for i in [build_i_g(&instances::z2()), build_i_g(&instances::p2()), ihk] {
            let w = extract_wha(&i, Side::Left).unwrap();
            let r = gns_round_trip(&w, 12).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn z2_gns_is_i_g_up_to_permutation() {
        let g = instances::z2();
        let w = commutative_oracle(&g);
        let gm = gns_mpi(&w).unwrap();
        // δ_g has norm φ(δ_g)^{1/2}; the frame sends it to a multiple of χ_g
        let ig = build_i_g(&g);
        assert!(linop::diff_norm(&gm.mpi.matrix, &ig.matrix) < 1e-12);
    }

    #[test]
    fn p2_supports_match() {
        let g = instances::p2();
        let gm = gns_mpi(&commutative_oracle(&g)).unwrap();
        let ig = build_i_g(&g);
        let rk = |m: &Mat| linop::rank(&(m.adjoint() * m));
        assert_eq!(rk(&gm.mpi.matrix), rk(&ig.matrix));
        assert!(mpi::verify_mpi(&gm.mpi, 12).passed());
    }

    #[test]
    fn u1_is_identity() {
        let gm = gns_mpi(&commutative_oracle(&instances::u1())).unwrap();
        assert!(linop::diff_norm(&gm.mpi.matrix, &linop::eye(1)) < 1e-12);
    }
}
