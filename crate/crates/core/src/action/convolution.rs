//! Actions of a groupoid on a fibered finite set and the convolution
//! algebras `(L¹(X ᵦ×ᵣ 𝒢), ⋆, #)` with their regular representations.

use crate::groupoid::Groupoid;
use crate::linop::{self, c, Mat, Vector, C64};
use crate::report::Report;
use crate::staralg::{self, FdAlgebra, StarSubspace};

use super::{crossed_product, ActionError, BlockAlgebra, GroupoidAction, VNModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSide {
    /// `x ◁ g` defined when `p(x) = r(g)`.
    Right,
    /// `g ▷ x` defined when `p(x) = s(g)`.
    Left,
}

#[derive(Debug, Clone)]
pub struct FiberedAction {
    pub groupoid: Groupoid,
    /// `p(x)` as an element id of a unit.
    pub fiber: Vec<usize>,
    /// `table[x][g]`, `None` off the domain.
    pub table: Vec<Vec<Option<usize>>>,
    pub side: ActionSide,
    pub names: Vec<String>,
}

impl FiberedAction {
    pub fn new(
        groupoid: Groupoid,
        fiber: Vec<usize>,
        table: Vec<Vec<Option<usize>>>,
        side: ActionSide,
        names: Vec<String>,
    ) -> Result<Self, ActionError> {
        let a = FiberedAction { groupoid, fiber, table, side, names };
        a.validate()?;
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.fiber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber.is_empty()
    }

    pub fn act(&self, x: usize, g: usize) -> Option<usize> {
        self.table[x][g]
    }

    fn validate(&self) -> Result<(), ActionError> {
        let g = &self.groupoid;
        let fail = |m: String| Err(ActionError::NotAFiberedAction(m));
        if self.table.len() != self.len() || self.names.len() != self.len() {
            return fail("table and fiber sizes differ".into());
        }
        for x in 0..self.len() {
            if !g.is_unit(self.fiber[x]) {
                return fail(format!("fiber of point {x} is not a unit"));
            }
            if self.table[x].len() != g.len() {
                return fail(format!("row {x} has the wrong length"));
            }
            for h in 0..g.len() {
                let (anchor, lands) = match self.side {
                    ActionSide::Right => (g.tgt(h), g.src(h)),
                    ActionSide::Left => (g.src(h), g.tgt(h)),
                };
                match (self.fiber[x] == anchor, self.table[x][h]) {
                    (true, Some(y)) if y < self.len() && self.fiber[y] == lands => {}
                    (false, None) => {}
                    _ => return fail(format!("domain or fiber violated at ({x}, {})", g.name(h))),
                }
                if g.is_unit(h) && self.table[x][h].is_some_and(|y| y != x) {
                    return fail(format!("unit {} moves point {x}", g.name(h)));
                }
            }
            for (a, b) in g.composable_pairs() {
                let ab = g.mul(a, b).unwrap();
                let lhs = match self.side {
                    ActionSide::Right => self.table[x][a].and_then(|y| self.table[y][b]),
                    ActionSide::Left => self.table[x][b].and_then(|y| self.table[y][a]),
                };
                if lhs.is_some() && lhs != self.table[x][ab] {
                    return fail(format!("composition fails at ({x}, {}, {})", g.name(a), g.name(b)));
                }
            }
        }
        Ok(())
    }

    /// Points over a unit, ascending.
    pub fn over(&self, u: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.fiber[x] == u).collect()
    }

    /// `X ᵦ×ᵣ 𝒢`, ordered by `g` and then by `x`.
    pub fn pairs_r(&self) -> Vec<(usize, usize)> {
        let g = &self.groupoid;
        (0..g.len()).flat_map(|h| self.over(g.tgt(h)).into_iter().map(move |x| (x, h))).collect()
    }

    /// `X ᵦ×ₛ 𝒢`, ordered by `g` and then by `x`.
    pub fn pairs_s(&self) -> Vec<(usize, usize)> {
        let g = &self.groupoid;
        (0..g.len()).flat_map(|h| self.over(g.src(h)).into_iter().map(move |x| (x, h))).collect()
    }

    /// The action `α_g f = f(· ◁ g)` of `𝒢` on `C(X) = ⊕_u ℂ^{p⁻¹(u)}`.
    pub fn to_action(&self) -> Result<GroupoidAction, ActionError> {
        if self.side != ActionSide::Right {
            return Err(ActionError::Malformed("only right actions induce a right coaction".into()));
        }
        let g = &self.groupoid;
        let fibers: Vec<Vec<usize>> = g.units().iter().map(|&u| self.over(u)).collect();
        let module = VNModule::new(fibers.iter().map(|f| BlockAlgebra::new(vec![1; f.len()])).collect());
        let local = |x: usize| fibers[g.unit_index(self.fiber[x])].iter().position(|&y| y == x).unwrap();
        let maps = (0..g.len())
            .map(|h| {
                let (rf, sf) = (&fibers[g.unit_index(g.tgt(h))], &fibers[g.unit_index(g.src(h))]);
                let mut m = linop::zeros(rf.len(), sf.len());
                for (i, &x) in rf.iter().enumerate() {
                    m[(i, local(self.act(x, h).unwrap()))] = c(1.0);
                }
                m
            })
            .collect();
        GroupoidAction::new(g.clone(), module, maps)
    }
}

/// `L¹(X ᵦ×ᵣ 𝒢)` with the convolution of the given side, in the basis of
/// characteristic functions of [`FiberedAction::pairs_r`].
#[derive(Debug, Clone)]
pub struct ConvolutionAlgebra {
    pub action: FiberedAction,
    pub pairs: Vec<(usize, usize)>,
    pub alg: FdAlgebra,
    /// Regular representation: `R^δ` on `ℓ²(X ᵦ×ᵣ 𝒢)` or `L^γ` on
    /// `ℓ²(X ᵦ×ₛ 𝒢)`, one operator per basis function.
    pub ops: Vec<Mat>,
    pub report: Report,
}

impl ConvolutionAlgebra {
    pub fn index(&self, x: usize, g: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (x, g))
    }

    pub fn new(action: &FiberedAction) -> Result<Self, ActionError> {
        let g = &action.groupoid;
        let pairs = action.pairs_r();
        let d = pairs.len();
        let idx = |x: usize, h: usize| pairs.iter().position(|&p| p == (x, h));
        let mut mult = vec![c(0.0); d * d * d];
        let mut star = linop::zeros(d, d);
        // χ_a ⋆ χ_b is a sum of point masses; read off F ⋆ F′ at every (x, g)
        for (i, &(x1, h1)) in pairs.iter().enumerate() {
            for (j, &(x2, h2)) in pairs.iter().enumerate() {
                for (k, &(x, gg)) in pairs.iter().enumerate() {
                    let mut v = c(0.0);
                    for h in 0..g.len() {
                        if g.tgt(h) != g.tgt(gg) || (x, h) != (x1, h1) {
                            continue;
                        }
                        let Some(rest) = g.mul(g.inv(h), gg) else { continue };
                        let y = match action.side {
                            ActionSide::Right => action.act(x, h),
                            ActionSide::Left => action.act(x, g.inv(h)),
                        };
                        if y == Some(x2) && rest == h2 {
                            v += c(1.0);
                        }
                    }
                    mult[(i * d + j) * d + k] = v;
                }
            }
            // F#(x, g) = conj F(x ◁ g, g⁻¹) is supported on the (x, g) with
            // x ◁ g = x1 and g⁻¹ = h1
            for (k, &(x, gg)) in pairs.iter().enumerate() {
                let y = match action.side {
                    ActionSide::Right => action.act(x, gg),
                    ActionSide::Left => action.act(x, g.inv(gg)),
                };
                if g.inv(gg) == h1 && y == Some(x1) {
                    star[(k, i)] = c(1.0);
                }
            }
        }
        let mut unit = Vector::zeros(d);
        for x in 0..action.len() {
            unit[idx(x, action.fiber[x]).expect("units pair with their fiber")] = c(1.0);
        }
        let alg = FdAlgebra { d, mult, star, unit };

        let ops: Vec<Mat> = match action.side {
            ActionSide::Right => right_regular(action, &pairs),
            ActionSide::Left => left_regular(action, &pairs),
        };

        let mut r = Report::new("convolution algebra");
        let (assoc, star_law) = alg.axiom_residuals();
        r.check("associative", assoc);
        r.check("involution_antimultiplicative", star_law);
        let inv = (0..d)
            .map(|i| (alg.star_of(&alg.star_of(&alg.basis_vec(i))) - alg.basis_vec(i)).norm())
            .fold(0.0, f64::max);
        r.check("involutive", inv);
        let u = (0..d)
            .map(|i| (alg.mul(&alg.unit, &alg.basis_vec(i)) - alg.basis_vec(i)).norm())
            .fold(0.0, f64::max);
        r.check("unit", u);
        let mut hom = 0.0f64;
        let mut adj = 0.0f64;
        let apply = |v: &Vector| -> Mat {
            v.iter().zip(&ops).fold(linop::zeros(ops[0].nrows(), ops[0].ncols()), |acc, (w, o)| acc + o * *w)
        };
        for i in 0..d {
            let ai = alg.basis_vec(i);
            adj = adj.max(linop::diff_norm(&apply(&alg.star_of(&ai)), &ops[i].adjoint()));
            for j in 0..d {
                let p = alg.mul(&ai, &alg.basis_vec(j));
                hom = hom.max(linop::diff_norm(&apply(&p), &(&ops[i] * &ops[j])));
            }
        }
        r.check("representation_multiplicative", hom);
        r.check("representation_star", adj);
        let n = ops[0].nrows();
        let image = StarSubspace::span(n, &ops);
        r.assert("representation_injective", image.dim() == d);

        let crossed = match action.side {
            ActionSide::Right => crossed_product(&action.to_action()?)?.algebra,
            ActionSide::Left => left_crossed_product(action),
        };
        let (eq, res) = staralg::subspace_equal(&image, &crossed)?;
        r.check("image_is_crossed_product", if eq { res } else { res.max(1.0) });
        Ok(ConvolutionAlgebra { action: action.clone(), pairs, alg, ops, report: r })
    }
}

fn right_regular(action: &FiberedAction, pairs: &[(usize, usize)]) -> Vec<Mat> {
    // R^δ(χ_{(y,k)})[(x,g), (x,gk)] = 1 when x ◁ g = y
    let g = &action.groupoid;
    let n = pairs.len();
    let pos = |x: usize, h: usize| pairs.iter().position(|&p| p == (x, h));
    pairs
        .iter()
        .map(|&(y, k)| {
            let mut m = linop::zeros(n, n);
            for (row, &(x, gg)) in pairs.iter().enumerate() {
                if action.act(x, gg) != Some(y) {
                    continue;
                }
                if let Some(col) = g.mul(gg, k).and_then(|gk| pos(x, gk)) {
                    m[(row, col)] = c(1.0);
                }
            }
            m
        })
        .collect()
}

fn left_regular(action: &FiberedAction, pairs: &[(usize, usize)]) -> Vec<Mat> {
    // L^γ(χ_{(y,k)})[(x,g), (x,k⁻¹g)] = 1 when g ▷ x = y
    let g = &action.groupoid;
    let carrier = action.pairs_s();
    let n = carrier.len();
    let pos = |x: usize, h: usize| carrier.iter().position(|&p| p == (x, h));
    pairs
        .iter()
        .map(|&(y, k)| {
            let mut m = linop::zeros(n, n);
            for (row, &(x, gg)) in carrier.iter().enumerate() {
                if action.act(x, gg) != Some(y) {
                    continue;
                }
                if let Some(col) = g.mul(g.inv(k), gg).and_then(|kg| pos(x, kg)) {
                    m[(row, col)] = c(1.0);
                }
            }
            m
        })
        .collect()
}

/// `C(𝒢) ⋉_γ C(X)` on `ℓ²(X ᵦ×ₛ 𝒢)`: generated by the multiplications
/// `ξ(x,g) ↦ f(g ▷ x)ξ(x,g)` and the translations `ξ(x,g) ↦ ξ(x,h⁻¹g)`.
fn left_crossed_product(action: &FiberedAction) -> StarSubspace {
    let g = &action.groupoid;
    let carrier = action.pairs_s();
    let n = carrier.len();
    let pos = |x: usize, h: usize| carrier.iter().position(|&p| p == (x, h));
    let mut gens = Vec::new();
    for y in 0..action.len() {
        gens.push(linop::diag_indicator(n, |i| {
            let (x, gg) = carrier[i];
            action.act(x, gg) == Some(y)
        }));
    }
    for h in 0..g.len() {
        let mut m = linop::zeros(n, n);
        for (row, &(x, gg)) in carrier.iter().enumerate() {
            if let Some(col) = g.mul(g.inv(h), gg).and_then(|hg| pos(x, hg)) {
                m[(row, col)] = C64::new(1.0, 0.0);
            }
        }
        gens.push(m);
    }
    staralg::generated_algebra(n, &gens, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn trivial_action_on_units_is_groupoid_convolution() {
        let g = instances::p2();
        let units: Vec<usize> = g.units().to_vec();
        let fiber = units.clone();
        let table: Vec<Vec<Option<usize>>> = units
            .iter()
            .map(|&u| (0..g.len()).map(|h| (g.tgt(h) == u).then(|| units.iter().position(|&v| v == g.src(h)).unwrap())).collect())
            .collect();
        let act = FiberedAction::new(g.clone(), fiber, table, ActionSide::Right, vec!["u0".into(), "u1".into()]).unwrap();
        let conv = ConvolutionAlgebra::new(&act).unwrap();
        assert!(conv.report.passed(), "{}", conv.report.to_text());
        assert_eq!(conv.alg.d, g.len());
        // χ_{(r(a), a)} ⋆ χ_{(r(b), b)} = χ_{(r(ab), ab)} for composable a, b
        for (a, b) in g.composable_pairs() {
            let i = conv.index(units.iter().position(|&u| u == g.tgt(a)).unwrap(), a).unwrap();
            let j = conv.index(units.iter().position(|&u| u == g.tgt(b)).unwrap(), b).unwrap();
            let ab = g.mul(a, b).unwrap();
            let k = conv.index(units.iter().position(|&u| u == g.tgt(ab)).unwrap(), ab).unwrap();
            assert_eq!(conv.alg.m(i, j, k), c(1.0));
        }
    }

    #[test]
    fn match_pair_actions() {
        for side in [ActionSide::Right, ActionSide::Left] {
            let act = instances::s3_fibered_action(side);
            let conv = ConvolutionAlgebra::new(&act).unwrap();
            assert!(conv.report.passed(), "{:?}: {}", side, conv.report.to_text());
            assert_eq!(conv.alg.d, 6);
        }
    }

    #[test]
    fn broken_table_is_rejected() {
        let mut act = instances::s3_fibered_action(ActionSide::Right);
        let h = act.groupoid.len() - 1;
        act.table[0][h] = act.table[0][h].map(|y| (y + 1) % act.len());
        let err = FiberedAction::new(act.groupoid, act.fiber, act.table, act.side, act.names);
        assert!(matches!(err, Err(ActionError::NotAFiberedAction(_))));
    }
}
