//! Acceptance run: thirteen criteria, each printed as `criterion N: PASS`
//! or `FAIL` with the failing detail. Exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use qgroupoid::action::{self, ActionSide, ConvolutionAlgebra, GroupoidAction};
use qgroupoid::instances;
use qgroupoid::linop::{self, c, Mat, Vector};
use qgroupoid::mpi::{self, build_i_g, build_i_hk, Mpi};
use qgroupoid::wha::{self, Side, WeakHopf};
use qgroupoid::{Groupoid, MatchPair, Report};

const TOL: f64 = 1e-9;

/// Collects failures for one criterion.
#[derive(Default)]
struct Crit {
    failures: Vec<String>,
}

impl Crit {
    fn ensure(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn below(&mut self, what: &str, value: f64, bound: f64) {
        self.ensure(value.is_finite() && value < bound, format!("{what}: {value:.3e} not below {bound:.1e}"));
    }

    fn report(&mut self, what: &str, r: &Report, bound: f64) {
        if !r.passed() || r.max_residual().is_nan() || r.max_residual() >= bound {
            let bad: Vec<String> = r
                .checks
                .iter()
                .filter(|k| !k.pass || k.residual.is_nan() || k.residual >= bound)
                .map(|k| format!("{} = {:.3e}", k.axiom, k.residual))
                .collect();
            self.failures.push(format!("{what}: {}", bad.join(", ")));
        }
    }

    fn residual(&mut self, what: &str, r: &Report, axiom: &str) {
        self.below(&format!("{what} {axiom}"), r.residual(axiom), TOL);
    }
}

fn observed(r: &Report, name: &str) -> Option<String> {
    r.observations.iter().find(|o| o.name == name).map(|o| o.value.clone())
}

fn groupoids() -> Vec<(&'static str, Groupoid)> {
    vec![
        ("U1", instances::u1()),
        ("Z/2", instances::z2()),
        ("P2", instances::p2()),
        ("P3", instances::p3()),
        ("Z/2 + Z/2", instances::z2_sqcup_z2()),
    ]
}

fn s3_pair() -> MatchPair {
    let (g, h, k) = instances::s3_match_pair_ids();
    MatchPair::new(&g, &h, &k).expect("S3 match pair")
}

/// `(𝒢, 𝒢, 𝒢⁰)`: ℋ the whole groupoid, 𝒦 its units.
fn degenerate_pair(g: &Groupoid) -> MatchPair {
    let all: Vec<usize> = (0..g.len()).collect();
    MatchPair::new(g, &all, g.units()).expect("degenerate pair")
}

fn mpis() -> Vec<(String, Mpi)> {
    let mut out: Vec<(String, Mpi)> = groupoids().into_iter().map(|(n, g)| (format!("I_G({n})"), build_i_g(&g))).collect();
    out.push(("I_HK(S3)".into(), build_i_hk(&s3_pair())));
    out
}

fn criterion_1() -> Crit {
    let mut k = Crit::default();
    let start = Instant::now();
    for (name, i) in mpis() {
        let r = mpi::verify_mpi(&i, 12);
        for axiom in ["pentagon", "initial_support", "final_support", "base_commutation", "intertwining"] {
            k.residual(&name, &r, axiom);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    k.ensure(secs < 10.0, format!("runtime {secs:.2} s"));
    k
}

fn criterion_2() -> Crit {
    let mut k = Crit::default();
    for (name, i) in mpis() {
        let (regular, r) = mpi::is_regular(&i);
        k.ensure(regular, format!("{name} not regular"));
        k.residual(&name, &r, "leg_dims_equal");
        let (s, sh) = mpi::leg_algebras(&i).expect("leg algebras");
        k.ensure(s.dim() == sh.dim(), format!("{name}: dim S {} vs dim Ŝ {}", s.dim(), sh.dim()));
        match wha::pairing(&i) {
            Ok(p) => {
                k.ensure(p.rank == s.dim(), format!("{name}: pairing rank {} < {}", p.rank, s.dim()));
                let want = match name.as_str() {
                    "I_G(Z/2)" => Some(2),
                    "I_G(P2)" => Some(4),
                    "I_HK(S3)" => Some(6),
                    _ => None,
                };
                if let Some(w) = want {
                    k.ensure(p.rank == w, format!("{name}: pairing rank {} expected {w}", p.rank));
                }
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_3() -> Crit {
    let mut k = Crit::default();
    for (name, g) in groupoids().into_iter().chain([("S3", instances::s3())]) {
        let i = build_i_g(&g);
        let w = wha::extract_wha(&i, Side::Left).expect("left structure");
        k.report(&format!("{name} function algebra"), &wha::oracle_match(&w, &wha::commutative_oracle(&g)), 1e-12);
        let w = wha::extract_wha(&i, Side::Right).expect("right structure");
        k.report(&format!("{name} group algebra"), &wha::oracle_match(&w, &wha::group_algebra_oracle(&g)), 1e-12);
    }
    k
}

fn structures() -> Vec<(String, WeakHopf)> {
    let mut out = Vec::new();
    for (name, i) in mpis() {
        for side in [Side::Left, Side::Right] {
            match wha::extract_wha(&i, side) {
                Ok(w) => out.push((format!("{name} {side:?}"), w)),
                Err(e) => panic!("{name} {side:?}: {e}"),
            }
        }
    }
    out
}

fn criterion_4() -> Crit {
    let mut k = Crit::default();
    for (name, w) in structures() {
        k.report(&name, &wha::verify_weak_hopf(&w), TOL);
        // negative control: scale the antipode
        let bad = w.with_antipode(&w.antipode * c(1.5));
        let r = wha::verify_weak_hopf(&bad);
        k.ensure(!r.passed(), format!("{name}: corrupted antipode passes"));
        k.ensure(r.max_residual() >= 0.1, format!("{name}: corrupted antipode residual {:.3e}", r.max_residual()));
    }
    k
}

/// Haar weights of `C(𝒢)` solved from the conditions written out on
/// indicator functions: `φ(δ_x) = φ(δ_{x⁻¹})`, strong invariance
/// `φ(δ_a) = φ(δ_b)` when `s(a) = s(b)`, and `Σ_{r(y) = u} φ(δ_y) = 1`.
fn haar_by_hand(g: &Groupoid) -> Vec<f64> {
    let n = g.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    let eq = |a: usize, b: usize, rows: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>| {
        let mut r = vec![0.0; n];
        r[a] += 1.0;
        r[b] -= 1.0;
        rows.push(r);
        rhs.push(0.0);
    };
    for a in 0..n {
        eq(a, g.inv(a), &mut rows, &mut rhs);
        for b in 0..n {
            if g.src(a) == g.src(b) {
                eq(a, b, &mut rows, &mut rhs);
            }
        }
    }
    for &u in g.units() {
        rows.push((0..n).map(|y| if g.tgt(y) == u { 1.0 } else { 0.0 }).collect());
        rhs.push(1.0);
    }
    let a = Mat::from_fn(rows.len(), n, |i, j| c(rows[i][j]));
    let b = Mat::from_fn(rhs.len(), 1, |i, _| c(rhs[i]));
    let (x, res) = linop::lstsq(&a, &b);
    assert!(res < TOL, "hand Haar system is inconsistent");
    assert_eq!(linop::rank(&a), n, "hand Haar system is not unique");
    (0..n).map(|i| x[(i, 0)].re).collect()
}

fn criterion_5() -> Crit {
    let mut k = Crit::default();
    let close = |v: &Vector, want: &[f64]| {
        v.len() == want.len() && v.iter().zip(want).all(|(a, &b)| (a - c(b)).norm() < TOL)
    };
    let z2 = wha::haar_solve(&wha::commutative_oracle(&instances::z2())).expect("Z/2 Haar");
    k.ensure(close(&z2.phi, &[0.5, 0.5]), format!("Z/2 φ = {:?}", z2.phi.as_slice()));
    let p2 = instances::p2();
    let want = haar_by_hand(&p2);
    k.ensure(want.iter().all(|&w| (w - 0.5).abs() < TOL), format!("P2 hand solve gives {want:?}"));
    let hp = wha::haar_solve(&wha::commutative_oracle(&p2)).expect("P2 Haar");
    k.ensure(close(&hp.phi, &want), format!("P2 φ = {:?}", hp.phi.as_slice()));
    for (name, w) in structures() {
        let h = match wha::haar_solve(&w) {
            Ok(h) => h,
            Err(e) => {
                k.ensure(false, format!("{name}: {e}"));
                continue;
            }
        };
        k.ensure(h.rank == w.d(), format!("{name}: Haar rank {} < {}", h.rank, w.d()));
        k.ensure(h.gram_min > 0.0, format!("{name}: Gram minimum {:.3e}", h.gram_min));
        match wha::haar_derived(&w, &h.phi) {
            Ok(d) => {
                for axiom in [
                    "source_expectation_idempotent",
                    "target_expectation_idempotent",
                    "source_expectation_range",
                    "target_expectation_range",
                    "g_t_is_antipode_of_g_s",
                ] {
                    k.residual(&name, &d.report, axiom);
                }
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_6() -> Crit {
    let mut k = Crit::default();
    match wha::gns_round_trip(&wha::commutative_oracle(&instances::z2()), 12) {
        Ok(r) => k.report("GNS round trip of C(Z/2)", &r, TOL),
        Err(e) => k.ensure(false, e.to_string()),
    }
    k
}

fn actions() -> Vec<(&'static str, GroupoidAction, usize)> {
    vec![
        ("Z/2 flip", instances::z2_flip(), 4),
        ("Z/2 Ad(σx)", instances::z2_ad_sigma_x(), 8),
        ("P2 identity", instances::p2_identity(), 4),
    ]
}

fn criterion_7() -> Crit {
    let mut k = Crit::default();
    for (name, act, dim) in actions() {
        let cp = match action::crossed_product(&act) {
            Ok(cp) => cp,
            Err(e) => {
                k.ensure(false, format!("{name}: {e}"));
                continue;
            }
        };
        k.ensure(cp.dim() == dim, format!("{name}: dim {} expected {dim}", cp.dim()));
        for axiom in ["dimension_formula", "unique_decomposition", "products_span_algebra", "product_basis_free"] {
            k.residual(name, &cp.report, axiom);
        }
        // recover the coordinates of a generic element
        let coords: Vec<_> = (0..act.n())
            .map(|h| {
                let d = act.module.fiber_dim(act.tgt_index(h));
                Vector::from_fn(d, |i, _| c(1.0 + i as f64 + 0.37 * h as f64))
            })
            .collect();
        let x = cp.recompose(&coords);
        let (back, res) = cp.decompose(&x);
        let err = coords.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(res, f64::max);
        k.below(&format!("{name} decomposition round trip"), err, TOL);
    }
    let flip = action::crossed_product(&instances::z2_flip()).expect("flip");
    k.ensure(observed(&flip.report, "center_dim").as_deref() == Some("1"), "Z/2 flip crossed product center is not trivial");
    k
}

fn criterion_8() -> Crit {
    let mut k = Crit::default();
    let cases = [
        ("Z/2 Ad(σx)", instances::z2_ad_sigma_x(), false, Some(2)),
        ("Z/2 trivial on M2", instances::z2_trivial_m2(), false, None),
        ("P2 identity", instances::p2_identity(), true, None),
        ("Z/2 flip", instances::z2_flip(), true, None),
    ];
    for (name, act, outer, rel) in cases {
        let v = match action::crossed_product(&act).and_then(|cp| action::outer_test(&cp)) {
            Ok(v) => v,
            Err(e) => {
                k.ensure(false, format!("{name}: {e}"));
                continue;
            }
        };
        k.ensure(v.outer == outer, format!("{name}: outer = {}", v.outer));
        if let Some(d) = rel {
            k.ensure(v.relative_commutant_dim == d, format!("{name}: relative commutant dim {}", v.relative_commutant_dim));
        }
        if act.module.all_factors() {
            k.ensure(v.outer_combinatorial == Some(v.outer), format!("{name}: verdicts disagree"));
        }
        k.report(name, &v.report, TOL);
    }
    k
}

fn criterion_9() -> Crit {
    let mut k = Crit::default();
    for (name, act, _) in actions() {
        match action::t_delta(&act) {
            Ok((_, r)) => {
                for axiom in ["idempotent", "unital", "range_is_fixed_points", "bimodular", "faithful"] {
                    k.residual(name, &r, axiom);
                }
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_10() -> Crit {
    let mut k = Crit::default();
    for (name, act, _) in actions() {
        let res = action::crossed_product(&act).and_then(|cp| action::double_crossed(&cp));
        match res {
            Ok((dc, r)) => {
                k.residual(name, &r, "equals_compressed_tensor_product");
                if name == "Z/2 flip" {
                    let want = act.module.dim() * act.n() * act.n();
                    k.ensure(dc.dim() == want, format!("{name}: double crossed dim {} expected {want}", dc.dim()));
                }
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_11() -> Crit {
    let mut k = Crit::default();
    let mut pairs = vec![("S3 match pair".to_string(), s3_pair())];
    for (name, g) in [("Z/2", instances::z2()), ("P2", instances::p2()), ("S3", instances::s3())] {
        pairs.push((format!("({name}, {name}, units)"), degenerate_pair(&g)));
    }
    for (name, mp) in pairs {
        match action::matchpair_structures(&mp, 12) {
            Ok(s) => {
                k.report(&name, &s.report, TOL);
                k.residual(&name, &s.report, "antipode_of_element_is_inverse");
                k.residual(&name, &s.report, "counit_is_indicator_of_h");
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_12() -> Crit {
    let mut k = Crit::default();
    for side in [ActionSide::Right, ActionSide::Left] {
        let name = format!("S3 {side:?} convolution");
        match ConvolutionAlgebra::new(&instances::s3_fibered_action(side)) {
            Ok(a) => {
                k.report(&name, &a.report, TOL);
                for axiom in ["associative", "involutive", "representation_multiplicative", "representation_star", "image_is_crossed_product"] {
                    k.residual(&name, &a.report, axiom);
                }
            }
            Err(e) => k.ensure(false, format!("{name}: {e}")),
        }
    }
    k
}

fn criterion_13() -> Crit {
    let mut k = Crit::default();
    for case in common::CASES {
        if let Err(e) = common::check_case(case) {
            k.ensure(false, e);
        }
        let mut args = case.args.to_vec();
        args.extend(["--format", "json"]);
        let (_, stdout, _) = common::run(&args);
        match serde_json::from_str(&stdout) {
            Ok(doc) => {
                if let Err(e) = common::schema_ok(&doc) {
                    k.ensure(false, format!("{}: {e}", case.name));
                }
            }
            Err(e) => k.ensure(false, format!("{}: {e}", case.name)),
        }
    }
    k
}

fn main() -> ExitCode {
    let criteria: [fn() -> Crit; 13] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
        criterion_13,
    ];
    let mut all = true;
    for (i, f) in criteria.iter().enumerate() {
        let k = f();
        let ok = k.failures.is_empty();
        all &= ok;
        println!("criterion {}: {}", i + 1, if ok { "PASS" } else { "FAIL" });
        for msg in &k.failures {
            println!("    {msg}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
