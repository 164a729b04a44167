//! Crossed products `A ⋊_δ C(𝒢)`, outerness, the dual coaction of
//! `𝓡(𝒢)` and the double crossed product.
//!
//! Operators live on the compressed carrier `K = ⊕_g H_{r(g)}`, the range
//! of `e_{b,i} = δ(1)` inside `H ⊗ ℓ²(𝒢)`. `carrier` is the isometry from
//! `K` into `H ⊗ ℓ²(𝒢)`, ordered by `g` and then by the basis of `H_{r(g)}`.

use crate::linop::{self, c, Mat, Vector, TOL};
use crate::report::Report;
use crate::staralg::{self, StarSubspace};
use crate::wha::rho;

use super::{basis, validate_action, ActionError, DeltaAction, GroupoidAction};

#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub act: GroupoidAction,
    /// Isometry `K → H ⊗ ℓ²(𝒢)`.
    pub carrier: Mat,
    /// Compressed `δ(a_i)` for the global basis of `A`.
    pub delta_ops: Vec<Mat>,
    /// Compressed `1 ⊗_r ρ(h)` for every `h`.
    pub rho_ops: Vec<Mat>,
    /// `(h, k)` labels of the product basis `δ(a^k_{r(h)})(1 ⊗_r ρ(h))`.
    pub basis: Vec<(usize, usize)>,
    pub basis_ops: Vec<Mat>,
    pub algebra: StarSubspace,
    pub report: Report,
}

impl CrossedProduct {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn size(&self) -> usize {
        self.carrier.ncols()
    }

    pub fn compress(&self, x: &Mat) -> Mat {
        self.carrier.adjoint() * x * &self.carrier
    }

    pub fn expand(&self, x: &Mat) -> Mat {
        &self.carrier * x * self.carrier.adjoint()
    }

    pub fn delta(&self, a: &Vector) -> Mat {
        self.compress(&DeltaAction::new(&self.act).delta(a))
    }

    /// Coordinates `x^h ∈ A_{r(h)}` with `x = Σ_h δ(x^h)(1 ⊗_r ρ(h))`, plus
    /// the reconstruction residual.
    pub fn decompose(&self, x: &Mat) -> (Vec<Vector>, f64) {
        let cols: Vec<Vector> = self.basis_ops.iter().map(linop::vec_op).collect();
        let a = Mat::from_columns(&cols);
        let b = Mat::from_columns(&[linop::vec_op(x)]);
        let (sol, res) = linop::lstsq(&a, &b);
        let mut out: Vec<Vector> = (0..self.act.n())
            .map(|h| Vector::zeros(self.act.module.fiber_dim(self.act.tgt_index(h))))
            .collect();
        for (i, &(h, k)) in self.basis.iter().enumerate() {
            out[h][k] = sol[(i, 0)];
        }
        (out, res)
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn recompose(&self, coords: &[Vector]) -> Mat {
        let mut out = linop::zeros(self.size(), self.size());
        for (i, &(h, k)) in self.basis.iter().enumerate() {
            out += &self.basis_ops[i] * coords[h][k];
        }
        out
    }
}

pub fn crossed_product(act: &GroupoidAction) -> Result<CrossedProduct, ActionError> {
    let valid = validate_action(act);
    if let Some(f) = valid.failures().first() {
        return Err(ActionError::ActionAxiomFailed(f.axiom.clone(), f.residual));
    }
    let g = &act.groupoid;
    let m = &act.module;
    let (d, n) = (m.dim(), g.len());
    let mut cols = Vec::new();
    for x in 0..n {
        let ti = act.tgt_index(x);
        for i in 0..m.fiber_dim(ti) {
            let mut v = Vector::zeros(d * n);
            v[(m.offset(ti) + i) * n + x] = c(1.0);
            cols.push(v);
        }
    }
    let carrier = Mat::from_columns(&cols);
    let dl = DeltaAction::new(act);
    let compress = |x: &Mat| carrier.adjoint() * x * &carrier;
    let delta_ops: Vec<Mat> = (0..d).map(|i| compress(&dl.delta(&basis(d, i)))).collect();
    let rho_full: Vec<Mat> = (0..n).map(|h| linop::kron(&linop::eye(d), &rho(g, h))).collect();
    let rho_ops: Vec<Mat> = rho_full.iter().map(&compress).collect();

    let mut basis_labels = Vec::new();
    let mut basis_ops = Vec::new();
    for h in 0..n {
        let ti = act.tgt_index(h);
        let emb = m.embed(ti);
        for k in 0..m.fiber_dim(ti) {
            let a = emb.column(k).into_owned();
            basis_labels.push((h, k));
            basis_ops.push(compress(&dl.delta(&a)) * &rho_ops[h]);
        }
    }
    let size = carrier.ncols();
    let mut gens = delta_ops.clone();
    gens.extend(rho_ops.iter().cloned());
    let algebra = staralg::generated_algebra(size, &gens, true);

    let mut r = Report::new("crossed product");
    r.absorb("action", dl.verify());
    let mut comm = 0.0f64;
    for h in 0..n {
        for i in 0..d {
            let a = basis(d, i);
            let lhs = &rho_ops[h] * &delta_ops[i];
            let rhs = compress(&dl.delta(&act.apply(h, &a))) * &rho_ops[h];
            comm = comm.max(linop::diff_norm(&lhs, &rhs));
        }
    }
    r.check("commutation_relation", comm);
    r.check("delta_of_unit_is_identity", linop::diff_norm(&compress(&dl.e_bi()), &linop::eye(size)));
    let expected: usize = (0..n).map(|h| m.fiber_dim(act.tgt_index(h))).sum();
    let prod_span = StarSubspace::span(size, &basis_ops);
    r.assert("product_basis_free", prod_span.dim() == basis_ops.len());
    r.assert("dimension_formula", algebra.dim() == expected);
    let (eq, res) = staralg::subspace_equal(&prod_span, &algebra)?;
    r.check("products_span_algebra", if eq { res } else { res.max(1.0) });
    r.observe("dim", algebra.dim());
    r.observe("center_dim", staralg::center(&algebra).dim());

    let mut cp = CrossedProduct {
        act: act.clone(),
        carrier,
        delta_ops,
        rho_ops,
        basis: basis_labels,
        basis_ops,
        algebra,
        report: Report::new(""),
    };
    // decomposition recovers coordinates of generic products
    let mut dec = 0.0f64;
    for x in &cp.basis_ops {
        for y in cp.basis_ops.iter().step_by(3) {
            let p = x * y;
            let (coords, res) = cp.decompose(&p);
            dec = dec.max(res).max(linop::diff_norm(&cp.recompose(&coords), &p));
        }
    }
    r.check("unique_decomposition", dec);
    cp.report = r;
    Ok(cp)
}

impl From<staralg::StarAlgError> for ActionError {
    fn from(e: staralg::StarAlgError) -> Self {
        ActionError::Wha(e.into())
    }
}

#[derive(Debug, Clone)]
pub struct OuterVerdict {
    /// Relative commutant equals `Z(A) ⋊ β(C(𝒢⁰))`.
    pub outer: bool,
    /// Verdict of the inner-automorphism criterion, when every fiber is a
    /// factor.
    pub outer_combinatorial: Option<bool>,
    pub relative_commutant_dim: usize,
    pub reference_dim: usize,
    /// `(h, x^h)` with `a x^h = x^h α_h(a)` and `x^h` invertible.
    pub witnesses: Vec<(usize, Vector)>,
    pub report: Report,
}

/// Invertible `x ∈ A_u` with `a x = x α_h(a)` for all `a ∈ A_u`, if any.
fn inner_witness(act: &GroupoidAction, h: usize) -> Option<Vector> {
    let ui = act.src_index(h);
    let f = &act.module.fibers[ui];
    let du = f.dim();
    let mut rows = linop::zeros(du * du, du);
    for i in 0..du {
        let a = basis(du, i);
        let block = f.left_mult(&a) - f.right_mult(&(&act.maps[h] * &a));
        rows.view_mut((i * du, 0), (du, du)).copy_from(&block);
    }
    let sols = linop::null_space(&rows);
    if sols.ncols() == 0 {
        return None;
    }
    let mut x = Vector::zeros(du);
    for (k, col) in sols.column_iter().enumerate() {
        x += col * c(1.0 / (k as f64 + std::f64::consts::E));
    }
    let smin = linop::singular_values(&f.left_mult(&x)).into_iter().fold(f64::INFINITY, f64::min);
    let norm = x.norm();
    (smin > linop::RANK_REL).then(|| x / c(norm))
}

pub fn outer_test(cp: &CrossedProduct) -> Result<OuterVerdict, ActionError> {
    let act = &cp.act;
    let g = &act.groupoid;
    let m = &act.module;
    let size = cp.size();
    let rel = staralg::intersect(&staralg::commutant(size, &cp.delta_ops), &cp.algebra)?;
    let mut refs = Vec::new();
    for z in m.center_basis() {
        for &u in g.units() {
            refs.push(cp.delta(&z) * &cp.rho_ops[u]);
        }
    }
    let reference = StarSubspace::span(size, &refs);
    let (outer, res) = staralg::subspace_equal(&rel, &reference)?;
    let mut r = Report::new("outer action test");
    let inside = refs.iter().map(|x| rel.outside(x)).fold(0.0, f64::max);
    r.check("reference_in_relative_commutant", inside);
    r.observe("relative_commutant_dim", rel.dim());
    r.observe("reference_dim", reference.dim());
    r.observe("subspace_residual", format!("{res:.3e}"));
    r.observe("outer", outer);

    let mut witnesses = Vec::new();
    for h in 0..g.len() {
        if g.src(h) == g.tgt(h) && !g.is_unit(h) {
            if let Some(x) = inner_witness(act, h) {
                let ui = act.src_index(h);
                let f = &m.fibers[ui];
                let mut eq = 0.0f64;
                for i in 0..f.dim() {
                    let a = basis(f.dim(), i);
                    eq = eq.max((f.mul(&a, &x) - f.mul(&x, &(&act.maps[h] * &a))).norm());
                }
                r.check(format!("witness_equation[{}]", g.name(h)), eq);
                witnesses.push((h, x));
            }
        }
    }
    let outer_combinatorial = m.all_factors().then_some(witnesses.is_empty());
    if let Some(v) = outer_combinatorial {
        r.assert("verdicts_agree", v == outer);
    }
    Ok(OuterVerdict {
        outer,
        outer_combinatorial,
        relative_commutant_dim: rel.dim(),
        reference_dim: reference.dim(),
        witnesses,
        report: r,
    })
}

/// `δ̂ : A ⋊ C(𝒢) → (A ⋊ C(𝒢)) ⊗ 𝓡(𝒢)` on `H ⊗ ℓ²(𝒢) ⊗ ℓ²(𝒢)`, given by its
/// values on the product basis.
#[derive(Debug, Clone)]
pub struct DualCoaction {
    pub images: Vec<Mat>,
    pub report: Report,
}

impl DualCoaction {
    pub fn apply(&self, cp: &CrossedProduct, x: &Mat) -> Mat {
        let (coords, _) = cp.decompose(x);
        let mut out = linop::zeros(self.images[0].nrows(), self.images[0].ncols());
        for (i, &(h, k)) in cp.basis.iter().enumerate() {
            out += &self.images[i] * coords[h][k];
        }
        out
    }
}

/// `Σ_t y_t ⊗ ρ(t)` split into its legs, with the reconstruction residual.
fn split_right_leg(x: &Mat, big: usize, n: usize, rhos: &[Mat]) -> (Vec<Mat>, f64) {
    let mut parts = Vec::with_capacity(rhos.len());
    let mut back = linop::zeros(x.nrows(), x.ncols());
    for r in rhos {
        let y = linop::kron(&linop::eye(big), &r.adjoint()) * x;
        let mut p = linop::zeros(big, big);
        for k in 0..n {
            p += linop::slice_right_basis(&y, big, n, k, k);
        }
        let norm = linop::trace(&(r.adjoint() * r));
        p /= norm;
        back += linop::kron(&p, r);
        parts.push(p);
    }
    let res = linop::diff_norm(&back, x);
    (parts, res)
}

pub fn dual_coaction(cp: &CrossedProduct) -> Result<DualCoaction, ActionError> {
    let act = &cp.act;
    let g = &act.groupoid;
    let m = &act.module;
    let (d, n) = (m.dim(), g.len());
    let big = d * n;
    let dl = DeltaAction::new(act);
    let rhos: Vec<Mat> = (0..n).map(|h| rho(g, h)).collect();
    let e_ba = g.units().iter().fold(linop::zeros(n * n, n * n), |acc, &u| acc + linop::kron(&rhos[u], &rhos[u]));
    let one_e_ba = linop::kron(&linop::eye(d), &e_ba);
    let hat_delta = |a: &Vector| &one_e_ba * linop::kron(&dl.delta(a), &linop::eye(n));
    let e = dl.e_bi();
    let hat_rho = |h: usize| linop::kron(&e, &linop::eye(n)) * linop::kron(&linop::eye(d), &linop::kron(&rhos[h], &rhos[h]));

    // δ̂(δ(a)(1 ⊗ ρ(h))) = δ̂(δ(a)) δ̂(e_{b,i}(1 ⊗ ρ(h)))
    let images: Vec<Mat> = cp
        .basis
        .iter()
        .map(|&(h, k)| {
            let a = m.embed(act.tgt_index(h)).column(k).into_owned();
            hat_delta(&a) * hat_rho(h)
        })
        .collect();
    let dc = DualCoaction { images, report: Report::new("") };
    let mut r = Report::new("dual coaction");

    let mut defect = 0.0f64;
    for i in 0..d {
        let a = basis(d, i);
        defect = defect.max(linop::diff_norm(&dc.apply(cp, &cp.delta(&a)), &hat_delta(&a)));
    }
    for h in 0..n {
        defect = defect.max(linop::diff_norm(&dc.apply(cp, &cp.rho_ops[h]), &hat_rho(h)));
    }
    for (i, x) in cp.basis_ops.iter().enumerate() {
        defect = defect.max(linop::diff_norm(&dc.apply(cp, &x.adjoint()), &dc.images[i].adjoint()));
        for (j, y) in cp.basis_ops.iter().enumerate() {
            let lhs = dc.apply(cp, &(x * y));
            defect = defect.max(linop::diff_norm(&lhs, &(&dc.images[i] * &dc.images[j])));
        }
    }
    r.check("well_defined", defect);
    if defect >= TOL {
        return Err(ActionError::ConsistencyDefect(defect));
    }

    // (δ̂ ⊗ i)δ̂ = (i ⊗ Γ̂)δ̂ on the generators
    let mut gens: Vec<Mat> = (0..d).map(|i| cp.delta(&basis(d, i))).collect();
    gens.extend(cp.rho_ops.iter().cloned());
    let mut coassoc = 0.0f64;
    let mut lands = 0.0f64;
    for x in &gens {
        let y = dc.apply(cp, x);
        let (parts, res) = split_right_leg(&y, big, n, &rhos);
        lands = lands.max(res);
        let mut lhs = linop::zeros(big * n * n, big * n * n);
        let mut rhs = linop::zeros(big * n * n, big * n * n);
        for (t, p) in parts.iter().enumerate() {
            let pc = cp.compress(p);
            lands = lands.max(cp.algebra.outside(&pc));
            lhs += linop::kron(&dc.apply(cp, &pc), &rhos[t]);
            rhs += linop::kron(p, &linop::kron(&rhos[t], &rhos[t]));
        }
        coassoc = coassoc.max(linop::diff_norm(&lhs, &rhs));
    }
    r.check("lands_in_tensor_product", lands);
    r.check("coassociative", coassoc);

    // δ̂(e_{b,i}(1 ⊗ s_u)) = δ̂(1)(1 ⊗ 1 ⊗ s_u)
    let one_hat = dc.apply(cp, &linop::eye(cp.size()));
    r.assert("unit_image_projection", linop::is_projection(&one_hat));
    let mut base = 0.0f64;
    for &u in g.units() {
        let x = cp.rho_ops[u].clone();
        let rhs = &one_hat * linop::kron(&linop::eye(big), &rhos[u]);
        base = base.max(linop::diff_norm(&dc.apply(cp, &x), &rhs));
    }
    r.check("base_condition", base);
    Ok(DualCoaction { report: r, ..dc })
}

/// The algebra generated by `δ(A)` and `δ(1)(1 ⊗ 𝒲(𝒢))`, compared with
/// `δ(1)(A ⊗ 𝒲(𝒢))δ(1)`, where `𝒲(𝒢)` is the commutant of the
/// `r`-diagonals in `𝓛(ℓ²(𝒢))`.
pub fn double_crossed(cp: &CrossedProduct) -> Result<(StarSubspace, Report), ActionError> {
    let act = &cp.act;
    let g = &act.groupoid;
    let m = &act.module;
    let (d, n) = (m.dim(), g.len());
    let r_diag: Vec<Mat> = g.units().iter().map(|&u| linop::diag_indicator(n, |x| g.tgt(x) == u)).collect();
    let w = staralg::commutant(n, &r_diag);
    let mut gens = cp.delta_ops.clone();
    for y in w.elements() {
        gens.push(cp.compress(&linop::kron(&linop::eye(d), &y)));
    }
    let generated = staralg::generated_algebra(cp.size(), &gens, true);
    let mut target = Vec::new();
    for i in 0..d {
        let pa = m.pi(&basis(d, i));
        for y in w.elements() {
            target.push(cp.compress(&linop::kron(&pa, &y)));
        }
    }
    let target = StarSubspace::span(cp.size(), &target);
    let (eq, res) = staralg::subspace_equal(&generated, &target)?;
    let mut r = Report::new("double crossed product");
    r.check("equals_compressed_tensor_product", if eq { res } else { res.max(1.0) });
    r.observe("w_dim", w.dim());
    r.observe("dim", generated.dim());
    r.assert("contains_crossed_product", cp.algebra.elements().iter().all(|x| generated.contains(x)));
    Ok((generated, r))
}
