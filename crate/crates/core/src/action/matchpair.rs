//! The two quantum groupoids of a match pair `𝒢 = ℋ𝒦`, computed from the
//! multiplicative partial isometry and from the double groupoid of cells,
//! and compared.
//!
//! A cell `(k, h)` is identified with `kh ∈ 𝒢`. On the right side the
//! basis is `R^δ(χ_{(k,h)})`, on the left side `L^γ(χ_{(k ▷ h, k)})`; both
//! act on `ℓ²(𝒢)`.

use crate::groupoid::{Cell, MatchPair};
use crate::linop::{self, c, Mat, Vector};
use crate::mpi;
use crate::report::Report;
use crate::staralg::FdAlgebra;
use crate::wha::{self, extract_wha, group_algebra_oracle, oracle_match, transport, Side, WeakHopf};

use super::convolution::{ActionSide, ConvolutionAlgebra, FiberedAction};
use super::ActionError;

#[derive(Debug, Clone)]
pub struct MatchPairStructures {
    pub cells: Vec<Cell>,
    pub right: WeakHopf,
    pub right_cells: WeakHopf,
    pub left: WeakHopf,
    pub left_cells: WeakHopf,
    pub report: Report,
}

/// `R^δ(χ_{(k,h)})ξ(g) = χ_{ℋk}(g) ξ(gh)` for every cell.
pub fn r_delta_ops(mp: &MatchPair) -> Vec<Mat> {
    let g = mp.groupoid();
    let n = g.len();
    mp.cells()
        .iter()
        .map(|&(k, h)| {
            let mut m = linop::zeros(n, n);
            for y in 0..n {
                if mp.p2(y) != k {
                    continue;
                }
                if let Some(yh) = g.mul(y, h) {
                    m[(y, yh)] = c(1.0);
                }
            }
            m
        })
        .collect()
}

/// `(ω_{χ_{kh}, χ_k} ⊗ i)(I_{ℋ,𝒦})` for every cell.
pub fn l_gamma_ops(mp: &MatchPair, i: &mpi::Mpi) -> Vec<Mat> {
    let n = mp.groupoid().len();
    mp.cells()
        .iter()
        .map(|&cell| linop::slice_left_basis(&i.matrix, n, n, mp.cell_element(cell), cell.0))
        .collect()
}

/// Structure maps on the cell basis. `horizontal` selects the law used for
/// the product; the other law gives the coproduct.
fn cell_structure(mp: &MatchPair, ops: Vec<Mat>, horizontal: bool) -> WeakHopf {
    let g = mp.groupoid();
    let cells = mp.cells();
    let d = cells.len();
    let idx = |c: Cell| cells.iter().position(|&x| x == c).expect("cell");
    let prod = |a: Cell, b: Cell| {
        if horizontal {
            mp.box_horizontal(a, b).ok()
        } else {
            mp.box_vertical(a, b).ok()
        }
    };
    let coprod = |a: Cell, b: Cell| {
        if horizontal {
            mp.box_vertical(a, b).ok()
        } else {
            mp.box_horizontal(a, b).ok()
        }
    };
    let mut mult = vec![c(0.0); d * d * d];
    let mut gamma = linop::zeros(d * d, d);
    for (i, &a) in cells.iter().enumerate() {
        for (j, &b) in cells.iter().enumerate() {
            if let Some(p) = prod(a, b) {
                mult[(i * d + j) * d + idx(p)] = c(1.0);
            }
            if let Some(p) = coprod(a, b) {
                gamma[(i * d + j, idx(p))] = c(1.0);
            }
        }
    }
    let mut star = linop::zeros(d, d);
    let mut kappa = linop::zeros(d, d);
    for (i, &a) in cells.iter().enumerate() {
        let s = if horizontal { mp.horizontal_inverse(a) } else { mp.vertical_inverse(a) };
        star[(idx(s), i)] = c(1.0);
        kappa[(idx(mp.double_inverse(a)), i)] = c(1.0);
    }
    // units of the product law, counit on units of the coproduct law
    let unit = Vector::from_fn(d, |i, _| {
        let (k, h) = cells[i];
        c(if horizontal { g.is_unit(k) } else { g.is_unit(h) } as u8 as f64)
    });
    let counit = Vector::from_fn(d, |i, _| {
        let (k, h) = cells[i];
        c(if horizontal { g.is_unit(h) } else { g.is_unit(k) } as u8 as f64)
    });
    WeakHopf {
        alg: FdAlgebra { d, mult, star, unit },
        coproduct: gamma,
        antipode: kappa,
        counit,
        haar: None,
        ops: Some(ops),
        labels: cells.iter().map(|&(k, h)| format!("[{}|{}]", g.name(k), g.name(h))).collect(),
    }
}

/// A fibered action with the groupoid ids of its acting elements and of
/// its points.
pub type EmbeddedAction = (FiberedAction, Vec<usize>, Vec<usize>);

/// `ℋ` acting on `𝒦` from the right by `◁` and `𝒦` acting on `ℋ` from the
/// left by `▷`, over the restricted groupoids. The second component maps
/// restricted ids back to ids of `𝒢`.
pub fn fibered_actions(mp: &MatchPair) -> Result<[EmbeddedAction; 2], ActionError> {
    let g = mp.groupoid();
    let build = |acting: &[usize], points: &[usize], side: ActionSide| -> Result<_, ActionError> {
        let (sub, back) = g.restrict(acting)?;
        let fwd = |old: usize| back.iter().position(|&b| b == old).expect("unit of the restriction");
        let fiber = points.iter().map(|&x| fwd(if side == ActionSide::Right { g.src(x) } else { g.tgt(x) })).collect();
        let table = points
            .iter()
            .map(|&x| {
                back.iter()
                    .map(|&a| {
                        let y = match side {
                            ActionSide::Right => mp.act_right(x, a),
                            ActionSide::Left => mp.act_left(a, x),
                        };
                        y.map(|y| points.iter().position(|&p| p == y).expect("action stays in the set"))
                    })
                    .collect()
            })
            .collect();
        let names = points.iter().map(|&x| g.name(x).to_string()).collect();
        Ok((FiberedAction::new(sub, fiber, table, side, names)?, back, points.to_vec()))
    };
    Ok([build(mp.h_ids(), mp.k_ids(), ActionSide::Right)?, build(mp.k_ids(), mp.h_ids(), ActionSide::Left)?])
}

/// Permutation `ℓ²(pairs) → ℓ²(𝒢)` sending `(x, a)` to `elem(x, a)`.
fn pair_embedding(pairs: &[(usize, usize)], n: usize, elem: impl Fn(usize, usize) -> usize) -> Mat {
    let mut p = linop::zeros(n, pairs.len());
    for (i, &(x, a)) in pairs.iter().enumerate() {
        p[(elem(x, a), i)] = c(1.0);
    }
    p
}

pub fn matchpair_structures(mp: &MatchPair, max_pentagon_dim: usize) -> Result<MatchPairStructures, ActionError> {
    let g = mp.groupoid();
    let n = g.len();
    let mut r = Report::new("match pair structure maps");
    for (name, ok) in mp.lemma_checks() {
        r.assert(format!("pair.{name}"), ok);
    }
    let i = mpi::build_i_hk(mp);
    r.absorb("mpi", mpi::verify_mpi(&i, max_pentagon_dim));
    let (regular, reg) = mpi::is_regular(&i);
    r.absorb("regular", reg);
    if !regular {
        return Err(ActionError::Wha(wha::WhaError::NotRegular(r.max_residual())));
    }
    let cells = mp.cells();
    r.assert("cells_biject_with_groupoid", cells.len() == n);

    // right side: extracted against the □↓ / □→ structure on R^δ(χ_c)
    let right = extract_wha(&i, Side::Right)?;
    let right_cells = cell_structure(mp, r_delta_ops(mp), false);
    r.absorb("right.cells_weak_hopf", wha::verify_weak_hopf(&right_cells));
    r.absorb("right.agreement", oracle_match(&right, &right_cells));
    r.assert("right.dimension", right.d() == cells.len());
    let t = transport(&right, right_cells.ops.as_ref().unwrap()).map(|(t, _)| t).expect("extracted ops");
    let col = |c: Cell| t.column(cells.iter().position(|&x| x == c).unwrap()).into_owned();
    let mut kappa = 0.0f64;
    let mut eps = 0.0f64;
    let mut ident = true;
    for x in 0..n {
        let cx = mp.cell_of(x);
        let cinv = mp.cell_of(g.inv(x));
        ident &= mp.double_inverse(cx) == cinv;
        kappa = kappa.max((right.antipode_of(&col(cx)) - col(cinv)).norm());
        let want = if mp.in_h(x) { 1.0 } else { 0.0 };
        eps = eps.max((right.counit_of(&col(cx)) - c(want)).norm());
    }
    r.assert("antipode_of_element_is_inverse_cell", ident);
    r.check("antipode_of_element_is_inverse", kappa);
    r.check("counit_is_indicator_of_h", eps);
    // coproduct on C(𝒦) = {R^δ(χ_{(k, s(k))})}
    let mut lemma = 0.0f64;
    for &k in mp.k_ids() {
        let mut want = Vector::zeros(right.d() * right.d());
        for &k1 in mp.k_ids() {
            for &k2 in mp.k_ids() {
                if g.mul(k1, k2) == Some(k) {
                    want += col((k1, g.src(k1))).kronecker(&col((k2, g.src(k2))));
                }
            }
        }
        lemma = lemma.max((right.coproduct_of(&col((k, g.src(k)))) - want).norm());
    }
    r.check("coproduct_restricts_to_k", lemma);

    // R^δ from the convolution algebra of ℋ acting on 𝒦, moved to ℓ²(𝒢)
    let [(ract, rback, rpoints), (lact, lback, lpoints)] = fibered_actions(mp)?;
    let conv = ConvolutionAlgebra::new(&ract)?;
    r.absorb("right.convolution", conv.report.clone());
    let to_cell = |(x, a): (usize, usize)| (rpoints[x], rback[a]);
    let p = pair_embedding(&conv.pairs, n, |x, a| mp.cell_element(to_cell((x, a))));
    let mut rep = 0.0f64;
    let mut vstar = 0.0f64;
    let rops = right_cells.ops.as_ref().unwrap();
    for (ci, &pair) in conv.pairs.iter().enumerate() {
        let cell = to_cell(pair);
        let j = cells.iter().position(|&x| x == cell).unwrap();
        rep = rep.max(linop::diff_norm(&(&p * &conv.ops[ci] * p.adjoint()), &rops[j]));
        for (cj, &pair2) in conv.pairs.iter().enumerate() {
            let want = mp.box_vertical(cell, to_cell(pair2)).ok();
            for (ck, &pair3) in conv.pairs.iter().enumerate() {
                let w = if want == Some(to_cell(pair3)) { 1.0 } else { 0.0 };
                vstar = vstar.max((conv.alg.m(ci, cj, ck) - c(w)).norm());
            }
        }
    }
    r.check("right.convolution_is_r_delta", rep);
    r.check("right.convolution_is_vertical_product", vstar);

    // left side: the transposed double groupoid on L^γ(χ_{(k ▷ h, k)})
    let left = extract_wha(&i, Side::Left)?;
    let left_cells = cell_structure(mp, l_gamma_ops(mp, &i), true);
    r.absorb("left.cells_weak_hopf", wha::verify_weak_hopf(&left_cells));
    r.absorb("left.agreement", oracle_match(&left, &left_cells));
    let lconv = ConvolutionAlgebra::new(&lact)?;
    r.absorb("left.convolution", lconv.report.clone());
    // L^γ acts on ℓ²(ℋ ×ₛ 𝒦); (h, k) is the cell (k, h)
    let carrier = lact.pairs_s();
    let q = pair_embedding(&carrier, n, |x, a| mp.cell_element((lback[a], lpoints[x])));
    let lops = left_cells.ops.as_ref().unwrap();
    let mut lrep = 0.0f64;
    for (ci, &(x, a)) in lconv.pairs.iter().enumerate() {
        // χ_{(k ▷ h, k)} with x = k ▷ h, a = k
        let k = lback[a];
        let hh = lpoints[x];
        let h = mp.h_ids().iter().copied().find(|&h| g.src(k) == g.tgt(h) && mp.act_left(k, h) == Some(hh));
        let Some(h) = h else {
            lrep = lrep.max(1.0);
            continue;
        };
        let j = cells.iter().position(|&y| y == (k, h)).unwrap();
        lrep = lrep.max(linop::diff_norm(&(&q * &lconv.ops[ci] * q.adjoint()), &lops[j]));
    }
    r.check("left.slices_are_l_gamma", lrep);

    if mp.k_ids().iter().all(|&k| g.is_unit(k)) {
        r.absorb("degenerate.group_algebra", oracle_match(&right, &group_algebra_oracle(g)));
    }
    // the two sides are mutually dual: the pairing has full rank
    let pairing = wha::pairing(&i)?;
    r.assert("pairing_full_rank", pairing.rank == cells.len());
    Ok(MatchPairStructures { cells, right, right_cells, left, left_cells, report: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn s3_pair() -> MatchPair {
        let (g, h, k) = instances::s3_match_pair_ids();
        MatchPair::new(&g, &h, &k).unwrap()
    }

    #[test]
    fn s3_structures_agree() {
        let s = matchpair_structures(&s3_pair(), 12).unwrap();
        assert!(s.report.passed(), "{}", s.report.to_text());
        assert!(s.report.max_residual() < 1e-10);
    }

    #[test]
    fn degenerate_pairs_reduce_to_group_algebra() {
        for g in [instances::z2(), instances::p2(), instances::s3()] {
            let s = matchpair_structures(&MatchPair::trivial(&g), 12).unwrap();
            assert!(s.report.passed(), "{}", s.report.to_text());
            assert!(s.report.get("degenerate.group_algebra.structure.coproduct").is_some());
            let all: Vec<usize> = (0..g.len()).collect();
            let s = matchpair_structures(&MatchPair::new(&g, g.units(), &all).unwrap(), 12).unwrap();
            assert!(s.report.passed(), "{}", s.report.to_text());
        }
    }

    #[test]
    fn horizontal_product_order_matters() {
        // on the S₃ pair □→ is commutative; with 𝒦 = S₃ it is not
        let g = instances::s3();
        let all: Vec<usize> = (0..g.len()).collect();
        let mp = MatchPair::new(&g, g.units(), &all).unwrap();
        let i = mpi::build_i_hk(&mp);
        let left = extract_wha(&i, Side::Left).unwrap();
        let cells = mp.cells();
        // L_a L_b = L_{a □→ b}; the other order must be rejected
        let mut w = cell_structure(&mp, l_gamma_ops(&mp, &i), true);
        let d = cells.len();
        w.alg.mult = vec![c(0.0); d * d * d];
        for (a, &x) in cells.iter().enumerate() {
            for (b, &y) in cells.iter().enumerate() {
                if let Ok(p) = mp.box_horizontal(y, x) {
                    let k = cells.iter().position(|&z| z == p).unwrap();
                    w.alg.mult[(a * d + b) * d + k] = c(1.0);
                }
            }
        }
        assert!(oracle_match(&left, &cell_structure(&mp, l_gamma_ops(&mp, &i), true)).passed());
        assert!(!oracle_match(&left, &w).passed());
    }
}
