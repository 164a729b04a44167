//! Reference structures for a groupoid written directly from the formulas
//! for functions on `𝒢` and for the right regular representation.

use crate::groupoid::Groupoid;
use crate::linop::{self, c, Mat, Vector};
use crate::report::Report;
use crate::staralg::FdAlgebra;

use super::{isomorphism_residual, transport, WeakHopf};

/// `(ρ(x)ξ)(t) = ξ(tx)` when `s(t) = r(x)`, zero otherwise.
pub fn rho(g: &Groupoid, x: usize) -> Mat {
    let n = g.len();
    let mut m = linop::zeros(n, n);
    for t in 0..n {
        if let Some(tx) = g.mul(t, x) {
            m[(t, tx)] = c(1.0);
        }
    }
    m
}

/// `(λ(s)ξ)(t) = ξ(s⁻¹t)` when `r(s) = r(t)`, zero otherwise.
pub fn lambda(g: &Groupoid, s: usize) -> Mat {
    let n = g.len();
    let mut m = linop::zeros(n, n);
    for t in 0..n {
        if let Some(st) = g.mul(g.inv(s), t) {
            m[(t, st)] = c(1.0);
        }
    }
    m
}

fn delta(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = c(1.0);
    v
}

/// `(C(𝒢), Γ_𝒢, κ_𝒢, ε_𝒢)` in the δ-basis, realized by diagonal operators.
pub fn commutative_oracle(g: &Groupoid) -> WeakHopf {
    let n = g.len();
    let mut mult = vec![c(0.0); n * n * n];
    for i in 0..n {
        mult[(i * n + i) * n + i] = c(1.0);
    }
    let mut gamma = linop::zeros(n * n, n);
    for (a, b) in g.composable_pairs() {
        gamma[(a * n + b, g.mul(a, b).unwrap())] = c(1.0);
    }
    let mut kappa = linop::zeros(n, n);
    for x in 0..n {
        kappa[(g.inv(x), x)] = c(1.0);
    }
    let counit = Vector::from_fn(n, |x, _| if g.is_unit(x) { c(1.0) } else { c(0.0) });
    let fiber = |x: usize| (0..n).filter(|&y| g.tgt(y) == g.tgt(x)).count() as f64;
    let haar = Vector::from_fn(n, |x, _| c(1.0 / fiber(x)));
    WeakHopf {
        alg: FdAlgebra { d: n, mult, star: linop::eye(n), unit: Vector::from_element(n, c(1.0)) },
        coproduct: gamma,
        antipode: kappa,
        counit,
        haar: Some(haar),
        ops: Some((0..n).map(|x| linop::diag_indicator(n, |y| y == x)).collect()),
        labels: g.names().iter().map(|s| format!("δ[{s}]")).collect(),
    }
}

/// `(𝓡(𝒢), Γ̂_𝒢, κ̂_𝒢, ε̂_𝒢)` in the basis `ρ(s)`.
pub fn group_algebra_oracle(g: &Groupoid) -> WeakHopf {
    let n = g.len();
    let mut mult = vec![c(0.0); n * n * n];
    for (s, t) in g.composable_pairs() {
        mult[(s * n + t) * n + g.mul(s, t).unwrap()] = c(1.0);
    }
    let mut gamma = linop::zeros(n * n, n);
    let mut kappa = linop::zeros(n, n);
    let mut star = linop::zeros(n, n);
    for s in 0..n {
        gamma[(s * n + s, s)] = c(1.0);
        kappa[(g.inv(s), s)] = c(1.0);
        star[(g.inv(s), s)] = c(1.0);
    }
    let unit = g.units().iter().fold(Vector::zeros(n), |acc, &u| acc + delta(n, u));
    WeakHopf {
        alg: FdAlgebra { d: n, mult, star, unit: unit.clone() },
        coproduct: gamma,
        antipode: kappa,
        counit: Vector::from_element(n, c(1.0)),
        haar: Some(unit),
        ops: Some((0..n).map(|s| rho(g, s)).collect()),
        labels: g.names().iter().map(|s| format!("ρ[{s}]")).collect(),
    }
}

/// Compares an extracted structure with an oracle through their operator
/// realizations: the oracle basis is expressed in the extracted basis and
/// the structure maps are compared under that change of basis.
pub fn oracle_match(extracted: &WeakHopf, oracle: &WeakHopf) -> Report {
    let mut r = Report::new("agreement with the reference structure");
    let (Some(ops), true) = (oracle.ops.as_ref(), extracted.ops.is_some()) else {
        r.assert("operator_realizations_available", false);
        return r;
    };
    let (t, res) = transport(extracted, ops).expect("checked above");
    r.check("oracle_basis_in_extracted_span", res);
    r.absorb("structure", isomorphism_residual(oracle, extracted, &t));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::mpi::build_i_g;
    use crate::wha::{extract_wha, verify_weak_hopf, Side};

    #[test]
    fn oracles_are_weak_hopf() {
        for g in [instances::u1(), instances::z2(), instances::p2(), instances::s3(), instances::z2_sqcup_z2()] {
            for w in [commutative_oracle(&g), group_algebra_oracle(&g)] {
                let r = verify_weak_hopf(&w);
                assert!(r.passed(), "{}", r.to_text());
            }
        }
    }

    #[test]
    fn extraction_matches_oracles() {
        for g in [instances::z2(), instances::p2(), instances::p3(), instances::s3()] {
            let i = build_i_g(&g);
            let left = oracle_match(&extract_wha(&i, Side::Left).unwrap(), &commutative_oracle(&g));
            assert!(left.passed() && left.max_residual() < 1e-12, "{}", left.to_text());
            let right = oracle_match(&extract_wha(&i, Side::Right).unwrap(), &group_algebra_oracle(&g));
            assert!(right.passed() && right.max_residual() < 1e-12, "{}", right.to_text());
        }
    }

    #[test]
    fn rho_products_and_commutation() {
        let g = instances::p2();
        for x in 0..g.len() {
            for y in 0..g.len() {
                let want = g.mul(x, y).map_or(linop::zeros(4, 4), |xy| rho(&g, xy));
                assert_eq!(rho(&g, x) * rho(&g, y), want);
                assert_eq!(lambda(&g, x) * rho(&g, y), rho(&g, y) * lambda(&g, x));
            }
        }
    }

    #[test]
    fn wrong_oracle_is_rejected() {
        let g = instances::p2();
        let i = build_i_g(&g);
        let w = extract_wha(&i, Side::Left).unwrap();
        let mut bad = commutative_oracle(&g);
        bad.antipode = linop::eye(4);
        assert!(!oracle_match(&w, &bad).passed());
    }
}
