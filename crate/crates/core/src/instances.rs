//! Named test instances: small groupoids, the S₃ match pair and the
//! groupoid actions used throughout the test suite and the CLI fixtures.

use crate::action::{ActionSide, BlockAlgebra, FiberedAction, GroupoidAction, VNModule};
use crate::groupoid::{Groupoid, MatchPair};
use crate::linop::{c, Mat};

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

pub fn cyclic(n: usize) -> Groupoid {
    Groupoid::group(&cyclic_table(n)).expect("cyclic table is a group")
}

pub fn u1() -> Groupoid {
    Groupoid::pair(1).expect("k = 1").with_names(vec!["e".into()])
}

pub fn z2() -> Groupoid {
    cyclic(2).with_names(vec!["e".into(), "g".into()])
}

pub fn p2() -> Groupoid {
    Groupoid::pair(2).expect("k = 2")
}

pub fn p3() -> Groupoid {
    Groupoid::pair(3).expect("k = 3")
}

pub fn z2_sqcup_z2() -> Groupoid {
    Groupoid::disjoint_union(&z2(), &z2())
}

/// The permutations of `{0, 1, 2}` in lexicographic order.
fn s3_perms() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                if a != b && b != cc && a != cc {
                    out.push([a, b, cc]);
                }
            }
        }
    }
    out
}

fn perm_name(p: &[usize; 3]) -> String {
    let fixed: Vec<usize> = (0..3).filter(|&i| p[i] == i).collect();
    match fixed.len() {
        3 => "e".into(),
        1 => {
            let moved: Vec<usize> = (0..3).filter(|&i| p[i] != i).map(|i| i + 1).collect();
            format!("({}{})", moved[0], moved[1])
        }
        _ => format!("(1{}{})", p[0] + 1, p[p[0]] + 1),
    }
}

/// Multiplication table of S₃, composing right to left.
pub fn s3_table() -> Vec<Vec<usize>> {
    let perms = s3_perms();
    let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    perms
        .iter()
        .map(|s| perms.iter().map(|t| idx([s[t[0]], s[t[1]], s[t[2]]])).collect())
        .collect()
}

pub fn s3() -> Groupoid {
    let names = s3_perms().iter().map(perm_name).collect();
    Groupoid::group(&s3_table()).expect("S3 table is a group").with_names(names)
}

fn s3_id(name: &str) -> usize {
    s3_perms().iter().position(|p| perm_name(p) == name).expect("known name")
}

/// The transposition `(12)`.
pub fn s3_transposition() -> usize {
    s3_id("(12)")
}

/// The 3-cycle `(123)`.
pub fn s3_cycle() -> usize {
    s3_id("(123)")
}

/// `S₃ = ℋ𝒦` with `ℋ = ⟨(12)⟩`, `𝒦 = ⟨(123)⟩`.
pub fn s3_match_pair_ids() -> (Groupoid, Vec<usize>, Vec<usize>) {
    let h = vec![s3_id("e"), s3_id("(12)")];
    let k = vec![s3_id("e"), s3_id("(123)"), s3_id("(132)")];
    (s3(), h, k)
}

/// `ℋ = ⟨(12)⟩`, `𝒦 = ⟨(13)⟩`: only four products, no factorization.
pub fn s3_bad_pair_ids() -> (Groupoid, Vec<usize>, Vec<usize>) {
    (s3(), vec![s3_id("e"), s3_id("(12)")], vec![s3_id("e"), s3_id("(13)")])
}

fn swap2() -> Mat {
    Mat::from_fn(2, 2, |i, j| c((i != j) as u8 as f64))
}

/// ℤ/2 acting on `ℂ²` by exchanging the coordinates.
pub fn z2_flip() -> GroupoidAction {
    let module = VNModule::new(vec![BlockAlgebra::new(vec![1, 1])]);
    GroupoidAction::new(z2(), module, vec![Mat::identity(2, 2), swap2()]).expect("flip is well formed")
}

/// ℤ/2 acting on `M₂` by `Ad(σ_x)`.
pub fn z2_ad_sigma_x() -> GroupoidAction {
    GroupoidAction::from_unitaries(z2(), vec![BlockAlgebra::new(vec![2])], &[Mat::identity(2, 2), swap2()])
        .expect("Ad(σ_x) is well formed")
}

/// ℤ/2 acting trivially on `M₂`.
pub fn z2_trivial_m2() -> GroupoidAction {
    GroupoidAction::trivial(z2(), BlockAlgebra::new(vec![2])).expect("trivial action is well formed")
}

/// The pair groupoid on two points acting by identities on `ℂ` fibers.
pub fn p2_identity() -> GroupoidAction {
    GroupoidAction::trivial(p2(), BlockAlgebra::new(vec![1])).expect("identity action is well formed")
}

/// `ℋ` acting on `𝒦` by `◁` (right) or `𝒦` acting on `ℋ` by `▷` (left)
/// for the S₃ match pair.
pub fn s3_fibered_action(side: ActionSide) -> FiberedAction {
    let (g, h, k) = s3_match_pair_ids();
    let mp = MatchPair::new(&g, &h, &k).expect("S3 pair");
    let [right, left] = crate::action::fibered_actions(&mp).expect("match pair actions");
    match side {
        ActionSide::Right => right.0,
        ActionSide::Left => left.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_names_and_orders() {
        let g = s3();
        let names: Vec<&str> = (0..6).map(|i| g.name(i)).collect();
        for n in ["e", "(12)", "(13)", "(23)", "(123)", "(132)"] {
            assert!(names.contains(&n), "{n} missing from {names:?}");
        }
        let c = s3_cycle();
        let c2 = g.mul(c, c).unwrap();
        assert_eq!(g.name(c2), "(132)");
        assert_eq!(g.mul(c2, c).unwrap(), g.units()[0]);
    }
}
