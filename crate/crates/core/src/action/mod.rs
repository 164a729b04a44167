//! Groupoid actions on finite-dimensional von Neumann modules and the
//! equivalent right actions of `C(𝒢)`.
//!
//! Each fiber `A_u` is a direct sum of full matrix blocks. Elements are
//! coordinate vectors in the matrix-unit basis (block by block, row-major
//! within a block). The Hilbert space `H_u` is the trace-GNS space of
//! `A_u`, which in these coordinates is `ℂ^{dim A_u}` with `A_u` acting by
//! left multiplication. `H = ⊕_u H_u` and operators of `A ⊗ C(𝒢)` act on
//! `H ⊗ ℓ²(𝒢)` with index `h * |𝒢| + g`.

mod convolution;
mod crossed;
mod matchpair;

pub use convolution::{ActionSide, ConvolutionAlgebra, FiberedAction};
pub use crossed::{crossed_product, double_crossed, dual_coaction, outer_test, CrossedProduct, DualCoaction, OuterVerdict};
pub use matchpair::{fibered_actions, l_gamma_ops, matchpair_structures, r_delta_ops, EmbeddedAction, MatchPairStructures};

use thiserror::Error;

use crate::groupoid::{Groupoid, GroupoidError};
use crate::linop::{self, c, Mat, Vector, TOL};
use crate::mpi;
use crate::report::Report;
use crate::wha::{self, WhaError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("malformed action: {0}")]
    Malformed(String),
    #[error("action axiom {0} fails (residual {1:.3e})")]
    ActionAxiomFailed(String, f64),
    #[error("dual coaction is not well defined (defect {0:.3e})")]
    ConsistencyDefect(f64),
    #[error("not a fibered action: {0}")]
    NotAFiberedAction(String),
    #[error("structure maps disagree on {0} (residual {1:.3e})")]
    StructureMismatch(String, f64),
    #[error("implementation is not unitary (residual {0:.3e})")]
    NotTracePreserving(f64),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Wha(#[from] WhaError),
}

/// `⊕_b M_{n_b}` with matrix units as basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAlgebra {
    pub blocks: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<usize>) -> Self {
        BlockAlgebra { blocks }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size of the concrete block-diagonal realization.
    pub fn size(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_factor(&self) -> bool {
        self.blocks.len() == 1
    }

    /// `(block, i, j)` of each basis element.
    fn units(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push((b, i, j));
                }
            }
        }
        out
    }

    fn offset(&self, b: usize) -> usize {
        self.blocks[..b].iter().sum()
    }

    /// Concrete block-diagonal matrix of a coordinate vector.
    pub fn to_matrix(&self, x: &Vector) -> Mat {
        let m = self.size();
        let mut out = linop::zeros(m, m);
        for (k, (b, i, j)) in self.units().into_iter().enumerate() {
            let o = self.offset(b);
            out[(o + i, o + j)] += x[k];
        }
        out
    }

    /// Coordinates of the block-diagonal part of a concrete matrix.
    pub fn from_matrix(&self, m: &Mat) -> Vector {
        let units = self.units();
        Vector::from_fn(units.len(), |k, _| {
            let (b, i, j) = units[k];
            let o = self.offset(b);
            m[(o + i, o + j)]
        })
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        self.from_matrix(&(self.to_matrix(x) * self.to_matrix(y)))
    }

    pub fn star(&self, x: &Vector) -> Vector {
        self.from_matrix(&self.to_matrix(x).adjoint())
    }

    pub fn unit(&self) -> Vector {
        self.from_matrix(&linop::eye(self.size()))
    }

    /// Left multiplication on the trace-GNS space.
    pub fn left_mult(&self, x: &Vector) -> Mat {
        let d = self.dim();
        let mut l = linop::zeros(d, d);
        for j in 0..d {
            l.set_column(j, &self.mul(x, &basis(d, j)));
        }
        l
    }

    pub fn right_mult(&self, x: &Vector) -> Mat {
        let d = self.dim();
        let mut r = linop::zeros(d, d);
        for j in 0..d {
            r.set_column(j, &self.mul(&basis(d, j), x));
        }
        r
    }

    /// Block identities, a basis of the center.
    pub fn center_basis(&self) -> Vec<Vector> {
        (0..self.blocks.len())
            .map(|b| {
                let o = self.offset(b);
                let n = self.blocks[b];
                let m = linop::diag_indicator(self.size(), |i| i >= o && i < o + n);
                self.from_matrix(&m)
            })
            .collect()
    }

    /// Matrix of `Ad(u)` in the matrix-unit basis, for a unitary `u`
    /// preserving the block structure.
    pub fn ad_matrix(&self, u: &Mat) -> Mat {
        let d = self.dim();
        let mut a = linop::zeros(d, d);
        for j in 0..d {
            let x = self.to_matrix(&basis(d, j));
            a.set_column(j, &self.from_matrix(&(u * x * u.adjoint())));
        }
        a
    }
}

pub(crate) fn basis(d: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[i] = c(1.0);
    v
}

/// `A = ⊕_{u ∈ 𝒢⁰} A_u` with `b(δ_u) = 1_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct VNModule {
    /// One block algebra per unit, in the order of `Groupoid::units`.
    pub fibers: Vec<BlockAlgebra>,
    offsets: Vec<usize>,
}

impl VNModule {
    pub fn new(fibers: Vec<BlockAlgebra>) -> Self {
        let mut offsets = Vec::with_capacity(fibers.len());
        let mut acc = 0;
        for f in &fibers {
            offsets.push(acc);
            acc += f.dim();
        }
        VNModule { fibers, offsets }
    }

    pub fn dim(&self) -> usize {
        self.fibers.iter().map(BlockAlgebra::dim).sum()
    }

    pub fn fiber_dim(&self, ui: usize) -> usize {
        self.fibers[ui].dim()
    }

    pub fn offset(&self, ui: usize) -> usize {
        self.offsets[ui]
    }

    /// `D × d_u` embedding of `A_u` coordinates.
    pub fn embed(&self, ui: usize) -> Mat {
        let (d, du, o) = (self.dim(), self.fiber_dim(ui), self.offsets[ui]);
        Mat::from_fn(d, du, |i, j| if i == o + j { c(1.0) } else { c(0.0) })
    }

    pub fn restrict(&self, x: &Vector, ui: usize) -> Vector {
        x.rows(self.offsets[ui], self.fiber_dim(ui)).into_owned()
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (ui, f) in self.fibers.iter().enumerate() {
            let p = f.mul(&self.restrict(x, ui), &self.restrict(y, ui));
            out.rows_mut(self.offsets[ui], f.dim()).copy_from(&p);
        }
        out
    }

    pub fn star(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (ui, f) in self.fibers.iter().enumerate() {
            out.rows_mut(self.offsets[ui], f.dim()).copy_from(&f.star(&self.restrict(x, ui)));
        }
        out
    }

    pub fn unit(&self) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (ui, f) in self.fibers.iter().enumerate() {
            out.rows_mut(self.offsets[ui], f.dim()).copy_from(&f.unit());
        }
        out
    }

    /// `1_u = b(δ_u)` as a global coordinate vector.
    pub fn fiber_unit(&self, ui: usize) -> Vector {
        self.embed(ui) * self.fibers[ui].unit()
    }

    /// `π(x)` on `H = ⊕ H_u`.
    pub fn pi(&self, x: &Vector) -> Mat {
        let d = self.dim();
        let mut out = linop::zeros(d, d);
        for (ui, f) in self.fibers.iter().enumerate() {
            let o = self.offsets[ui];
            out.view_mut((o, o), (f.dim(), f.dim())).copy_from(&f.left_mult(&self.restrict(x, ui)));
        }
        out
    }

    pub fn all_factors(&self) -> bool {
        self.fibers.iter().all(BlockAlgebra::is_factor)
    }

    pub fn center_basis(&self) -> Vec<Vector> {
        let mut out = Vec::new();
        for (ui, f) in self.fibers.iter().enumerate() {
            for z in f.center_basis() {
                out.push(self.embed(ui) * z);
            }
        }
        out
    }
}

/// A functor `g ↦ α_g : A_{s(g)} → A_{r(g)}`, each map a `d_{r(g)} × d_{s(g)}`
/// matrix in the matrix-unit bases.
#[derive(Debug, Clone)]
pub struct GroupoidAction {
    pub groupoid: Groupoid,
    pub module: VNModule,
    pub maps: Vec<Mat>,
}

impl GroupoidAction {
    pub fn new(groupoid: Groupoid, module: VNModule, maps: Vec<Mat>) -> Result<Self, ActionError> {
        if module.fibers.len() != groupoid.units().len() {
            return Err(ActionError::Malformed(format!(
                "{} fibers for {} units",
                module.fibers.len(),
                groupoid.units().len()
            )));
        }
        if maps.len() != groupoid.len() {
            return Err(ActionError::Malformed(format!("{} maps for {} elements", maps.len(), groupoid.len())));
        }
        for (g, m) in maps.iter().enumerate() {
            let want = (module.fiber_dim(groupoid.unit_index(groupoid.tgt(g))), module.fiber_dim(groupoid.unit_index(groupoid.src(g))));
            if m.shape() != want {
                return Err(ActionError::Malformed(format!("map {g} has shape {:?}, expected {want:?}", m.shape())));
            }
        }
        Ok(GroupoidAction { groupoid, module, maps })
    }

    /// `α_g = Ad(u_g)` on fibers that share one block structure.
    pub fn from_unitaries(groupoid: Groupoid, fibers: Vec<BlockAlgebra>, unitaries: &[Mat]) -> Result<Self, ActionError> {
        let module = VNModule::new(fibers);
        let maps = unitaries
            .iter()
            .enumerate()
            .map(|(g, u)| module.fibers[groupoid.unit_index(groupoid.src(g))].ad_matrix(u))
            .collect();
        GroupoidAction::new(groupoid, module, maps)
    }

    /// `α_g = id` when all fibers are equal.
    pub fn trivial(groupoid: Groupoid, fiber: BlockAlgebra) -> Result<Self, ActionError> {
        let n = groupoid.units().len();
        let d = fiber.dim();
        let maps = vec![linop::eye(d); groupoid.len()];
        GroupoidAction::new(groupoid, VNModule::new(vec![fiber; n]), maps)
    }

    pub fn n(&self) -> usize {
        self.groupoid.len()
    }

    pub fn src_index(&self, g: usize) -> usize {
        self.groupoid.unit_index(self.groupoid.src(g))
    }

    pub fn tgt_index(&self, g: usize) -> usize {
        self.groupoid.unit_index(self.groupoid.tgt(g))
    }

    /// `α_g` as a `D × D` map that reads the `s(g)` block and writes the
    /// `r(g)` block.
    pub fn global_map(&self, g: usize) -> Mat {
        let m = &self.module;
        m.embed(self.tgt_index(g)) * &self.maps[g] * m.embed(self.src_index(g)).transpose()
    }

    /// `α_g(a_{s(g)})` as a global coordinate vector.
    pub fn apply(&self, g: usize, a: &Vector) -> Vector {
        self.global_map(g) * a
    }
}

pub fn validate_action(act: &GroupoidAction) -> Report {
    let g = &act.groupoid;
    let m = &act.module;
    let mut r = Report::new("groupoid action");
    let mut mult = 0.0f64;
    let mut star = 0.0f64;
    let mut unit = 0.0f64;
    let mut bij = 0.0f64;
    for x in 0..g.len() {
        let (si, ti) = (act.src_index(x), act.tgt_index(x));
        let (fs, ft) = (&m.fibers[si], &m.fibers[ti]);
        let a = &act.maps[x];
        for i in 0..fs.dim() {
            let ei = basis(fs.dim(), i);
            star = star.max((a * fs.star(&ei) - ft.star(&(a * &ei))).norm());
            for j in 0..fs.dim() {
                let ej = basis(fs.dim(), j);
                mult = mult.max((a * fs.mul(&ei, &ej) - ft.mul(&(a * &ei), &(a * &ej))).norm());
            }
        }
        unit = unit.max((a * fs.unit() - ft.unit()).norm());
        if fs.dim() != ft.dim() || linop::rank(a) != fs.dim() {
            bij = 1.0;
        }
    }
    r.check("maps_multiplicative", mult);
    r.check("maps_star_preserving", star);
    r.check("maps_unital", unit);
    r.check("maps_bijective", bij);
    let mut func = 0.0f64;
    for (x, y) in g.composable_pairs() {
        let xy = g.mul(x, y).unwrap();
        func = func.max(linop::diff_norm(&act.maps[xy], &(&act.maps[x] * &act.maps[y])));
    }
    r.check("functoriality", func);
    let ident = g
        .units()
        .iter()
        .map(|&u| linop::diff_norm(&act.maps[u], &linop::eye(m.fiber_dim(g.unit_index(u)))))
        .fold(0.0, f64::max);
    r.check("units_act_trivially", ident);
    r
}

/// The right action `δ_α(a) : g ↦ α_g(a_{s(g)})` of `C(𝒢)` and its
/// left counterpart, as operators on `H ⊗ ℓ²(𝒢)`.
#[derive(Debug, Clone)]
pub struct DeltaAction<'a> {
    pub act: &'a GroupoidAction,
}

impl<'a> DeltaAction<'a> {
    pub fn new(act: &'a GroupoidAction) -> Self {
        DeltaAction { act }
    }

    fn diag_sum(&self, f: impl Fn(usize) -> Vector) -> Mat {
        let n = self.act.n();
        let mut out = linop::zeros(self.act.module.dim() * n, self.act.module.dim() * n);
        for g in 0..n {
            out += linop::kron(&self.act.module.pi(&f(g)), &linop::unit_matrix(n, g, g));
        }
        out
    }

    pub fn delta(&self, a: &Vector) -> Mat {
        self.diag_sum(|g| self.act.apply(g, a))
    }

    /// `γ_α(a) : g ↦ α_{g⁻¹}(a_{r(g)})`.
    pub fn gamma(&self, a: &Vector) -> Mat {
        let inv = |g: usize| self.act.groupoid.inv(g);
        self.diag_sum(|g| self.act.apply(inv(g), a))
    }

    /// `e_{b,i} = Σ_u 1_u ⊗ r_u`, which equals `δ(1)`.
    pub fn e_bi(&self) -> Mat {
        let g = &self.act.groupoid;
        let m = &self.act.module;
        let mut out = linop::zeros(m.dim() * g.len(), m.dim() * g.len());
        for (ui, &u) in g.units().iter().enumerate() {
            let r = linop::diag_indicator(g.len(), |x| g.tgt(x) == u);
            out += linop::kron(&m.pi(&m.fiber_unit(ui)), &r);
        }
        out
    }

    /// `e_{b′,κ} = Σ_u 1_u ⊗ s_u`, which equals `γ(1)`.
    pub fn e_bkappa(&self) -> Mat {
        let g = &self.act.groupoid;
        let m = &self.act.module;
        let mut out = linop::zeros(m.dim() * g.len(), m.dim() * g.len());
        for (ui, &u) in g.units().iter().enumerate() {
            let s = linop::diag_indicator(g.len(), |x| g.src(x) == u);
            out += linop::kron(&m.pi(&m.fiber_unit(ui)), &s);
        }
        out
    }

    /// Residuals of the right-action axioms for `δ` and the left-action
    /// axioms for `γ`.
    pub fn verify(&self) -> Report {
        let act = self.act;
        let g = &act.groupoid;
        let m = &act.module;
        let (d, n) = (m.dim(), g.len());
        let ig = mpi::build_i_g(g).matrix;
        let mut r = Report::new("right action of C(G)");
        let mut hom = 0.0f64;
        let mut star = 0.0f64;
        let mut hom_l = 0.0f64;
        for i in 0..d {
            let ei = basis(d, i);
            let di = self.delta(&ei);
            star = star.max(linop::diff_norm(&self.delta(&m.star(&ei)), &di.adjoint()));
            for j in 0..d {
                let ej = basis(d, j);
                let prod = m.mul(&ei, &ej);
                hom = hom.max(linop::diff_norm(&self.delta(&prod), &(&di * self.delta(&ej))));
                hom_l = hom_l.max(linop::diff_norm(&self.gamma(&prod), &(self.gamma(&ei) * self.gamma(&ej))));
            }
        }
        r.check("delta_multiplicative", hom);
        r.check("delta_star_preserving", star);
        let vecs: Vec<Vector> = (0..d).map(|i| linop::vec_op(&self.delta(&basis(d, i)))).collect();
        r.assert("delta_injective", linop::rank(&Mat::from_columns(&vecs)) == d);

        // (δ ⊗ i)δ(a) = Σ_g δ(α_g(a)) ⊗ e_gg against I₂₃(δ(a) ⊗ 1)I₂₃*
        let i23 = linop::kron(&linop::eye(d), &ig);
        let mut coassoc = 0.0f64;
        let mut coassoc_l = 0.0f64;
        let flip = linop::kron(&linop::eye(d), &linop::swap(n, n));
        for i in 0..d {
            let ei = basis(d, i);
            let mut lhs = linop::zeros(d * n * n, d * n * n);
            let mut lhs_l = linop::zeros(d * n * n, d * n * n);
            for x in 0..n {
                let exx = linop::unit_matrix(n, x, x);
                lhs += linop::kron(&self.delta(&act.apply(x, &ei)), &exx);
                lhs_l += linop::kron(&self.gamma(&act.apply(g.inv(x), &ei)), &exx);
            }
            let rhs = &i23 * linop::kron(&self.delta(&ei), &linop::eye(n)) * i23.adjoint();
            coassoc = coassoc.max(linop::diff_norm(&lhs, &rhs));
            // (i ⊗ ςΓ)γ(a) for the left action
            let rhs_l = &flip * (&i23 * linop::kron(&self.gamma(&ei), &linop::eye(n)) * i23.adjoint()) * &flip;
            coassoc_l = coassoc_l.max(linop::diff_norm(&lhs_l, &rhs_l));
        }
        r.check("delta_coassociative", coassoc);

        let e = self.e_bi();
        let ek = self.e_bkappa();
        r.check("delta_of_unit_is_e_bi", linop::diff_norm(&self.delta(&m.unit()), &e));
        r.assert("e_bi_projection", linop::is_projection(&e));
        let mut base = 0.0f64;
        let mut base_l = 0.0f64;
        for (ui, &u) in g.units().iter().enumerate() {
            // δ(b(r_u)) = e_{b,i}(1 ⊗ κ(r_u)) with κ(r_u) = s_u
            let s = linop::diag_indicator(n, |x| g.src(x) == u);
            let rr = linop::diag_indicator(n, |x| g.tgt(x) == u);
            let rhs = &e * linop::kron(&linop::eye(d), &s);
            base = base.max(linop::diff_norm(&self.delta(&m.fiber_unit(ui)), &rhs));
            let rhs_l = &ek * linop::kron(&linop::eye(d), &rr);
            base_l = base_l.max(linop::diff_norm(&self.gamma(&m.fiber_unit(ui)), &rhs_l));
        }
        r.check("delta_base_condition", base);
        r.check("gamma_multiplicative", hom_l);
        r.check("gamma_coassociative", coassoc_l);
        r.check("gamma_base_condition", base_l);
        r
    }
}

/// `A^δ = {a : δ(a) = e_{b,i}(a ⊗ 1)}` as coordinate columns, with checks.
pub fn fixed_points(act: &GroupoidAction) -> (Mat, Report) {
    let m = &act.module;
    let d = m.dim();
    let n = act.n();
    let mut rows = linop::zeros(n * d, d);
    for g in 0..n {
        let p_r = m.embed(act.tgt_index(g)) * m.embed(act.tgt_index(g)).transpose();
        rows.view_mut((g * d, 0), (d, d)).copy_from(&(act.global_map(g) - p_r));
    }
    let fixed = linop::null_space(&rows);
    let dl = DeltaAction::new(act);
    let e = dl.e_bi();
    let mut r = Report::new("fixed point subalgebra");
    let mut res = 0.0f64;
    let mut comm = 0.0f64;
    for col in fixed.column_iter() {
        let a = col.into_owned();
        let rhs = &e * linop::kron(&m.pi(&a), &linop::eye(n));
        res = res.max(linop::diff_norm(&dl.delta(&a), &rhs));
        for ui in 0..m.fibers.len() {
            let b = m.fiber_unit(ui);
            comm = comm.max((m.mul(&a, &b) - m.mul(&b, &a)).norm());
        }
    }
    r.check("fixed_equation", res);
    r.check("commutes_with_base", comm);
    r.check("star_subalgebra", closure(m, &fixed));
    r.observe("dim", fixed.ncols());
    (fixed, r)
}

fn closure(m: &VNModule, basis_cols: &Mat) -> f64 {
    if basis_cols.ncols() == 0 {
        return 0.0;
    }
    let q = linop::orth(basis_cols);
    let off = |v: Vector| (&v - &q * (q.adjoint() * &v)).norm();
    let mut res = 0.0f64;
    for x in basis_cols.column_iter() {
        let x = x.into_owned();
        res = res.max(off(m.star(&x)));
        for y in basis_cols.column_iter() {
            res = res.max(off(m.mul(&x, &y.into_owned())));
        }
    }
    res
}

/// `T_δ = (i ⊗ φ)δ` with `φ` the Haar measure of `C(𝒢)`.
pub fn t_delta(act: &GroupoidAction) -> Result<(Mat, Report), ActionError> {
    let phi = wha::haar_solve(&wha::commutative_oracle(&act.groupoid))?.phi;
    let m = &act.module;
    let d = m.dim();
    let mut t = linop::zeros(d, d);
    for g in 0..act.n() {
        t += act.global_map(g) * phi[g];
    }
    let (fixed, _) = fixed_points(act);
    let mut r = Report::new("Haar conditional expectation");
    r.check("idempotent", linop::diff_norm(&(&t * &t), &t));
    r.check("unital", (&t * m.unit() - m.unit()).norm());
    r.check("range_is_fixed_points", wha::col_span_residual(&t, &fixed));
    let mut bimod = 0.0f64;
    for cc in fixed.column_iter() {
        let cc = cc.into_owned();
        for bb in fixed.column_iter() {
            let bb = bb.into_owned();
            for i in 0..d {
                let a = basis(d, i);
                let lhs = &t * m.mul(&m.mul(&cc, &a), &bb);
                let rhs = m.mul(&m.mul(&cc, &(&t * &a)), &bb);
                bimod = bimod.max((lhs - rhs).norm());
            }
        }
    }
    r.check("bimodular", bimod);
    // faithful: a ↦ Tr π(T(a* a)) is a positive definite form
    let gram = Mat::from_fn(d, d, |i, j| {
        let x = m.mul(&m.star(&basis(d, i)), &basis(d, j));
        linop::trace(&m.pi(&(&t * x)))
    });
    let gmin = linop::min_eigenvalue(&((&gram + gram.adjoint()) * c(0.5)));
    r.check("faithful", if gmin > linop::RANK_REL { 0.0 } else { 1.0 + gmin.abs() });
    let mut pos = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let x = basis(d, i) + basis(d, j) * linop::C64::new(0.3, 0.7);
            let y = m.pi(&(&t * m.mul(&m.star(&x), &x)));
            pos = pos.max(linop::diff_norm(&y, &y.adjoint())).max(-linop::min_eigenvalue(&y));
        }
    }
    r.check("positive", pos.max(0.0));
    Ok((t, r))
}

/// `U = ⊕_g u_g` from `⊕_g H_{s(g)}` to `⊕_g H_{r(g)}` with
/// `u_g Λ(x) = Λ(α_g(x))`, and the identity `δ(a) = U(a ⊗_s 1)U*`.
pub fn implementing_unitary(act: &GroupoidAction) -> Result<(Mat, Report), ActionError> {
    let n = act.n();
    let m = &act.module;
    let s_off = offsets(&(0..n).map(|g| m.fiber_dim(act.src_index(g))).collect::<Vec<_>>());
    let r_off = offsets(&(0..n).map(|g| m.fiber_dim(act.tgt_index(g))).collect::<Vec<_>>());
    let (ds, dr) = (*s_off.last().unwrap(), *r_off.last().unwrap());
    let mut u = linop::zeros(dr, ds);
    for g in 0..n {
        u.view_mut((r_off[g], s_off[g]), act.maps[g].shape()).copy_from(&act.maps[g]);
    }
    let unitary = linop::diff_norm(&(u.adjoint() * &u), &linop::eye(ds)).max(linop::diff_norm(&(&u * u.adjoint()), &linop::eye(dr)));
    if unitary >= TOL {
        return Err(ActionError::NotTracePreserving(unitary));
    }
    let mut r = Report::new("implementing unitary");
    r.check("unitary", unitary);
    let mut res = 0.0f64;
    for i in 0..m.dim() {
        let a = basis(m.dim(), i);
        let mut src = linop::zeros(ds, ds);
        let mut dst = linop::zeros(dr, dr);
        for g in 0..n {
            let (si, ti) = (act.src_index(g), act.tgt_index(g));
            let fs = &m.fibers[si];
            let ft = &m.fibers[ti];
            let a_s = m.restrict(&a, si);
            src.view_mut((s_off[g], s_off[g]), (fs.dim(), fs.dim())).copy_from(&fs.left_mult(&a_s));
            let img = &act.maps[g] * a_s;
            dst.view_mut((r_off[g], r_off[g]), (ft.dim(), ft.dim())).copy_from(&ft.left_mult(&img));
        }
        res = res.max(linop::diff_norm(&dst, &(&u * src * u.adjoint())));
    }
    r.check("implements_delta", res);
    Ok((u, r))
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn example_actions_validate() {
        for act in [instances::z2_flip(), instances::z2_ad_sigma_x(), instances::z2_trivial_m2(), instances::p2_identity()] {
            let r = validate_action(&act);
            assert!(r.passed(), "{}", r.to_text());
            let r = DeltaAction::new(&act).verify();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn broken_functor_is_reported() {
        let mut act = instances::z2_flip();
        act.maps[1] = linop::eye(2);
        act.maps[0] = Mat::from_fn(2, 2, |i, j| if i != j { c(1.0) } else { c(0.0) });
        let r = validate_action(&act);
        assert!(r.residual("units_act_trivially") > 0.5);
        assert!(r.residual("functoriality") > 0.5);
    }

    #[test]
    fn fixed_point_dims() {
        assert_eq!(fixed_points(&instances::z2_flip()).0.ncols(), 1);
        assert_eq!(fixed_points(&instances::z2_ad_sigma_x()).0.ncols(), 2);
        assert_eq!(fixed_points(&instances::p2_identity()).0.ncols(), 1);
        for act in [instances::z2_flip(), instances::z2_ad_sigma_x(), instances::p2_identity()] {
            let (_, r) = fixed_points(&act);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn t_delta_on_flip() {
        let (t, r) = t_delta(&instances::z2_flip()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let a = Vector::from_vec(vec![c(3.0), c(1.0)]);
        assert!((&t * a - Vector::from_vec(vec![c(2.0), c(2.0)])).norm() < 1e-12);
        for act in [instances::z2_ad_sigma_x(), instances::p2_identity()] {
            let (_, r) = t_delta(&act).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn implementing_unitaries() {
        let (u, r) = implementing_unitary(&instances::p2_identity()).unwrap();
        assert!(r.passed());
        assert_eq!(u, linop::eye(4));
        let (u, r) = implementing_unitary(&instances::z2_flip()).unwrap();
        assert!(r.passed());
        let swap = Mat::from_fn(2, 2, |i, j| if i != j { c(1.0) } else { c(0.0) });
        assert_eq!(u.view((2, 2), (2, 2)).into_owned(), swap);
        let (_, r) = implementing_unitary(&instances::z2_ad_sigma_x()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn block_algebra_basics() {
        let a = BlockAlgebra::new(vec![1, 2]);
        assert_eq!(a.dim(), 5);
        assert_eq!(a.center_basis().len(), 2);
        let u = a.unit();
        let x = Vector::from_fn(5, |i, _| c(i as f64 + 1.0));
        assert_eq!(a.mul(&u, &x), x);
    }
}
