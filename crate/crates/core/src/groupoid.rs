//! Finite groupoids with dense integer element ids, plus the match-pair
//! factorization data (p1, p2, the middle map and the mutual actions).
//!
//! Every table is filled once at validation time; lookups afterwards are
//! plain indexing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("table malformed: {0}")]
    Malformed(String),
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("bad inverse for element {0}")]
    BadInverse(usize),
    #[error("bad unit {0}")]
    BadUnit(usize),
    #[error("product ({0}, {1}) is defined iff source equals target, violated here")]
    PartialityMismatch(usize, usize),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("subset {0} is not a wide subgroupoid")]
    NotSubgroupoid(&'static str),
    #[error("element {0} lies in both subgroupoids but is not a unit")]
    IntersectionTooBig(usize),
    #[error("element {0} has no factorization hk")]
    FactorizationMissing(usize),
    #[error("element {0} has more than one factorization hk")]
    FactorizationAmbiguous(usize),
    #[error("cells are not composable")]
    NotComposable,
}

/// Raw groupoid description, the on-disk JSON shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    pub units: Vec<usize>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub inverse: Vec<usize>,
    pub mul: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Groupoid {
    n: usize,
    units: Vec<usize>,
    is_unit: Vec<bool>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    inv: Vec<usize>,
    mul: Vec<Option<usize>>,
    names: Vec<String>,
}

impl Groupoid {
    /// Validates a raw description against the groupoid axioms.
    pub fn validate(desc: &GroupoidDesc) -> Result<Self, GroupoidError> {
        let n = desc.source.len();
        if n == 0 {
            return Err(GroupoidError::Malformed("no elements".into()));
        }
        if desc.target.len() != n || desc.inverse.len() != n {
            return Err(GroupoidError::Malformed(
                "source, target and inverse must have equal length".into(),
            ));
        }
        let in_range = |v: usize| v < n;
        if !desc
            .source
            .iter()
            .chain(&desc.target)
            .chain(&desc.inverse)
            .chain(&desc.units)
            .all(|&v| in_range(v))
        {
            return Err(GroupoidError::Malformed("index out of range".into()));
        }
        let mut mul = vec![None; n * n];
        for &[x, y, z] in &desc.mul {
            if !(in_range(x) && in_range(y) && in_range(z)) {
                return Err(GroupoidError::Malformed("mul index out of range".into()));
            }
            match mul[x * n + y] {
                Some(prev) if prev != z => return Err(GroupoidError::PartialityMismatch(x, y)),
                _ => mul[x * n + y] = Some(z),
            }
        }
        let names = match &desc.elements {
            Some(v) if v.len() == n => v.clone(),
            Some(_) => return Err(GroupoidError::Malformed("elements has wrong length".into())),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let mut is_unit = vec![false; n];
        for &u in &desc.units {
            if is_unit[u] {
                return Err(GroupoidError::Malformed(format!("unit {u} listed twice")));
            }
            is_unit[u] = true;
        }
        let g = Groupoid {
            n,
            units: desc.units.clone(),
            is_unit,
            src: desc.source.clone(),
            tgt: desc.target.clone(),
            inv: desc.inverse.clone(),
            mul,
            names,
        };
        g.check_axioms()?;
        Ok(g)
    }

    fn check_axioms(&self) -> Result<(), GroupoidError> {
        let n = self.n;
        for x in 0..n {
            if !self.is_unit[self.src[x]] {
                return Err(GroupoidError::BadUnit(self.src[x]));
            }
            if !self.is_unit[self.tgt[x]] {
                return Err(GroupoidError::BadUnit(self.tgt[x]));
            }
        }
        for &u in &self.units {
            if self.src[u] != u || self.tgt[u] != u || self.mul[u * n + u] != Some(u) {
                return Err(GroupoidError::BadUnit(u));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let defined = self.mul[x * n + y].is_some();
                if defined != (self.src[x] == self.tgt[y]) {
                    return Err(GroupoidError::PartialityMismatch(x, y));
                }
                if let Some(z) = self.mul[x * n + y] {
                    if self.src[z] != self.src[y] || self.tgt[z] != self.tgt[x] {
                        return Err(GroupoidError::PartialityMismatch(x, y));
                    }
                }
            }
        }
        for x in 0..n {
            if self.mul(self.tgt[x], x) != Some(x) {
                return Err(GroupoidError::BadUnit(self.tgt[x]));
            }
            if self.mul(x, self.src[x]) != Some(x) {
                return Err(GroupoidError::BadUnit(self.src[x]));
            }
        }
        for x in 0..n {
            let xi = self.inv[x];
            if self.src[xi] != self.tgt[x]
                || self.mul(x, xi) != Some(self.tgt[x])
                || self.mul(xi, x) != Some(self.src[x])
            {
                return Err(GroupoidError::BadInverse(x));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = self.mul(x, y) else { continue };
                for z in 0..n {
                    let Some(yz) = self.mul(y, z) else { continue };
                    if self.mul(xy, z) != self.mul(x, yz) {
                        return Err(GroupoidError::NonAssociative(x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_desc(&self) -> GroupoidDesc {
        let mut mul = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if let Some(z) = self.mul(x, y) {
                    mul.push([x, y, z]);
                }
            }
        }
        GroupoidDesc {
            elements: Some(self.names.clone()),
            units: self.units.clone(),
            source: self.src.clone(),
            target: self.tgt.clone(),
            inverse: self.inv.clone(),
            mul,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unit element ids, in the order that fixes every base representation.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.is_unit[x]
    }

    /// Position of a unit inside [`Groupoid::units`].
    pub fn unit_index(&self, u: usize) -> usize {
        self.units.iter().position(|&v| v == u).expect("not a unit")
    }

    pub fn src(&self, x: usize) -> usize {
        self.src[x]
    }

    pub fn tgt(&self, x: usize) -> usize {
        self.tgt[x]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn mul(&self, x: usize, y: usize) -> Option<usize> {
        self.mul[x * self.n + y]
    }

    pub fn composable(&self, x: usize, y: usize) -> bool {
        self.src[x] == self.tgt[y]
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = names;
        self
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| (0..self.n).map(move |y| (x, y)))
            .filter(move |&(x, y)| self.composable(x, y))
    }

    pub fn source_map(&self) -> &[usize] {
        &self.src
    }

    pub fn target_map(&self) -> &[usize] {
        &self.tgt
    }

    /// The pair groupoid on `k` points: element `(i, j)` has id `i * k + j`.
    pub fn pair(k: usize) -> Result<Self, GroupoidError> {
        if k == 0 {
            return Err(GroupoidError::Malformed("pair groupoid needs k >= 1".into()));
        }
        Self::transitive(k, &[vec![0]])
    }

    /// A group, given by its multiplication table, as a one-unit groupoid.
    pub fn group(table: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        let e = check_group(table)?;
        let n = table.len();
        let inv: Vec<usize> =
            (0..n).map(|x| (0..n).find(|&y| table[x][y] == e).unwrap()).collect();
        let mut mul = Vec::with_capacity(n * n);
        for (x, row) in table.iter().enumerate() {
            for (y, &z) in row.iter().enumerate() {
                mul.push([x, y, z]);
            }
        }
        Self::validate(&GroupoidDesc {
            elements: None,
            units: vec![e],
            source: vec![e; n],
            target: vec![e; n],
            inverse: inv,
            mul,
        })
    }

    /// `X × X × G` with `|X| = k`: element `(i, j, g)` has id `(i * k + j) * |G| + g`,
    /// source `(j, j, e)` and target `(i, i, e)`.
    pub fn transitive(k: usize, table: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        if k == 0 {
            return Err(GroupoidError::Malformed("transitive groupoid needs k >= 1".into()));
        }
        let e = check_group(table)?;
        let m = table.len();
        let id = |i: usize, j: usize, g: usize| (i * k + j) * m + g;
        let n = k * k * m;
        let mut src = vec![0; n];
        let mut tgt = vec![0; n];
        let mut inv = vec![0; n];
        let mut names = vec![String::new(); n];
        let mut mul = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for g in 0..m {
                    let x = id(i, j, g);
                    src[x] = id(j, j, e);
                    tgt[x] = id(i, i, e);
                    let gi = (0..m).find(|&h| table[g][h] == e).unwrap();
                    inv[x] = id(j, i, gi);
                    names[x] = if m == 1 { format!("({i},{j})") } else { format!("({i},{j},{g})") };
                    for l in 0..k {
                        for h in 0..m {
                            mul.push([x, id(j, l, h), id(i, l, table[g][h])]);
                        }
                    }
                }
            }
        }
        let units = (0..k).map(|i| id(i, i, e)).collect();
        Self::validate(&GroupoidDesc { elements: Some(names), units, source: src, target: tgt, inverse: inv, mul })
    }

    /// Disjoint union; elements of `b` are shifted by `a.len()`.
    pub fn disjoint_union(a: &Groupoid, b: &Groupoid) -> Groupoid {
        let off = a.n;
        let n = a.n + b.n;
        let mut mul = vec![None; n * n];
        for x in 0..a.n {
            for y in 0..a.n {
                mul[x * n + y] = a.mul(x, y);
            }
        }
        for x in 0..b.n {
            for y in 0..b.n {
                mul[(x + off) * n + y + off] = b.mul(x, y).map(|z| z + off);
            }
        }
        let shift = |v: &[usize]| v.iter().map(|&x| x + off).collect::<Vec<_>>();
        let cat = |p: &[usize], q: &[usize]| [p.to_vec(), shift(q)].concat();
        let mut names: Vec<String> = a.names.iter().map(|s| format!("a{s}")).collect();
        names.extend(b.names.iter().map(|s| format!("b{s}")));
        Groupoid {
            n,
            units: cat(&a.units, &b.units),
            is_unit: [a.is_unit.clone(), b.is_unit.clone()].concat(),
            src: cat(&a.src, &b.src),
            tgt: cat(&a.tgt, &b.tgt),
            inv: cat(&a.inv, &b.inv),
            mul,
            names,
        }
    }

    /// The subgroupoid on `ids` as a groupoid in its own right, with the
    /// reindexing map (new id -> old id).
    pub fn restrict(&self, ids: &[usize]) -> Result<(Groupoid, Vec<usize>), GroupoidError> {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in sorted.iter().enumerate() {
            pos[x] = i;
        }
        let look = |x: usize| -> Result<usize, GroupoidError> {
            match pos[x] {
                usize::MAX => Err(GroupoidError::NotSubgroupoid("restriction")),
                p => Ok(p),
            }
        };
        let mut desc = GroupoidDesc {
            elements: Some(sorted.iter().map(|&x| self.names[x].clone()).collect()),
            units: Vec::new(),
            source: Vec::new(),
            target: Vec::new(),
            inverse: Vec::new(),
            mul: Vec::new(),
        };
        for &x in &sorted {
            if self.is_unit[x] {
                desc.units.push(look(x)?);
            }
            desc.source.push(look(self.src[x])?);
            desc.target.push(look(self.tgt[x])?);
            desc.inverse.push(look(self.inv[x])?);
            for &y in &sorted {
                if let Some(z) = self.mul(x, y) {
                    desc.mul.push([look(x)?, look(y)?, look(z)?]);
                }
            }
        }
        Ok((Groupoid::validate(&desc)?, sorted))
    }
}

/// Checks a group table and returns the identity.
fn check_group(table: &[Vec<usize>]) -> Result<usize, GroupoidError> {
    let n = table.len();
    if n == 0 {
        return Err(GroupoidError::NotAGroup("empty table".into()));
    }
    if table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
        return Err(GroupoidError::NotAGroup("table is not square over 0..n".into()));
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| GroupoidError::NotAGroup("no identity".into()))?;
    for x in 0..n {
        if !(0..n).any(|y| table[x][y] == e && table[y][x] == e) {
            return Err(GroupoidError::NotAGroup(format!("{x} has no inverse")));
        }
        for y in 0..n {
            for z in 0..n {
                if table[table[x][y]][z] != table[x][table[y][z]] {
                    return Err(GroupoidError::NotAGroup(format!("({x},{y},{z}) not associative")));
                }
            }
        }
    }
    Ok(e)
}

/// The isotropy subgroupoid `{h : s(h) = r(h)}` and its splitting into
/// isotropy groups, one per unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isotropy {
    pub elements: Vec<usize>,
    pub groups: Vec<(usize, Vec<usize>)>,
}

pub fn iso_subgroupoid(g: &Groupoid) -> Isotropy {
    let elements: Vec<usize> = (0..g.len()).filter(|&x| g.src(x) == g.tgt(x)).collect();
    let groups = g
        .units()
        .iter()
        .map(|&u| (u, elements.iter().copied().filter(|&x| g.src(x) == u).collect()))
        .collect();
    Isotropy { elements, groups }
}

/// A cell of the double groupoid: `(k, h)` with `k ∈ 𝒦`, `h ∈ ℋ`, `s(k) = r(h)`.
pub type Cell = (usize, usize);

/// Validated match pair `𝒢 = ℋ𝒦` with all derived tables.
#[derive(Debug, Clone)]
pub struct MatchPair {
    parent: Groupoid,
    in_h: Vec<bool>,
    in_k: Vec<bool>,
    h_ids: Vec<usize>,
    k_ids: Vec<usize>,
    p1: Vec<usize>,
    p2: Vec<usize>,
    // factorization g = q1(g) q2(g) with q1 ∈ 𝒦, q2 ∈ ℋ
    q1: Vec<usize>,
    q2: Vec<usize>,
    m: Vec<usize>,
}

impl MatchPair {
    pub fn new(g: &Groupoid, h_ids: &[usize], k_ids: &[usize]) -> Result<Self, GroupoidError> {
        let n = g.len();
        let mut in_h = vec![false; n];
        let mut in_k = vec![false; n];
        for &x in h_ids {
            if x >= n {
                return Err(GroupoidError::Malformed("h index out of range".into()));
            }
            in_h[x] = true;
        }
        for &x in k_ids {
            if x >= n {
                return Err(GroupoidError::Malformed("k index out of range".into()));
            }
            in_k[x] = true;
        }
        check_wide_subgroupoid(g, &in_h, "h")?;
        check_wide_subgroupoid(g, &in_k, "k")?;
        if let Some(x) = (0..n).find(|&x| in_h[x] && in_k[x] && !g.is_unit(x)) {
            return Err(GroupoidError::IntersectionTooBig(x));
        }
        let h_ids: Vec<usize> = (0..n).filter(|&x| in_h[x]).collect();
        let k_ids: Vec<usize> = (0..n).filter(|&x| in_k[x]).collect();
        let factor = |left: &[usize], right: &[usize]| -> Result<(Vec<usize>, Vec<usize>), GroupoidError> {
            let mut found: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut count = vec![0usize; n];
            for &a in left {
                for &b in right {
                    if let Some(z) = g.mul(a, b) {
                        count[z] += 1;
                        found[z] = Some((a, b));
                    }
                }
            }
            for z in 0..n {
                match count[z] {
                    0 => return Err(GroupoidError::FactorizationMissing(z)),
                    1 => {}
                    _ => return Err(GroupoidError::FactorizationAmbiguous(z)),
                }
            }
            Ok(found.into_iter().map(|f| f.unwrap()).unzip())
        };
        let (p1, p2) = factor(&h_ids, &k_ids)?;
        // 𝒢 = 𝒦ℋ follows from 𝒢 = ℋ𝒦 by inversion; computed, then checked in `lemma_checks`.
        let (q1, q2) = factor(&k_ids, &h_ids)?;
        let m = (0..n).map(|x| g.src(p1[x])).collect();
        Ok(MatchPair { parent: g.clone(), in_h, in_k, h_ids, k_ids, p1, p2, q1, q2, m })
    }

    /// The degenerate pair `(𝒢, 𝒢⁰)`.
    pub fn trivial(g: &Groupoid) -> Self {
        let all: Vec<usize> = (0..g.len()).collect();
        MatchPair::new(g, &all, g.units()).expect("(G, G0) is always a match pair")
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.parent
    }

    pub fn h_ids(&self) -> &[usize] {
        &self.h_ids
    }

    pub fn k_ids(&self) -> &[usize] {
        &self.k_ids
    }

    pub fn in_h(&self, x: usize) -> bool {
        self.in_h[x]
    }

    pub fn in_k(&self, x: usize) -> bool {
        self.in_k[x]
    }

    pub fn p1(&self, x: usize) -> usize {
        self.p1[x]
    }

    pub fn p2(&self, x: usize) -> usize {
        self.p2[x]
    }

    /// Middle map `m = s∘p1 = r∘p2`.
    pub fn m(&self, x: usize) -> usize {
        self.m[x]
    }

    pub fn middle_map(&self) -> &[usize] {
        &self.m
    }

    /// `k ▷ h` for `s(k) = r(h)`.
    pub fn act_left(&self, k: usize, h: usize) -> Option<usize> {
        self.parent.mul(k, h).map(|kh| self.p1[kh])
    }

    /// `k ◁ h` for `s(k) = r(h)`.
    pub fn act_right(&self, k: usize, h: usize) -> Option<usize> {
        self.parent.mul(k, h).map(|kh| self.p2[kh])
    }

    /// All cells `(k, h)`, ordered by `k` then `h`.
    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.parent;
        let mut out = Vec::new();
        for &k in &self.k_ids {
            for &h in &self.h_ids {
                if g.src(k) == g.tgt(h) {
                    out.push((k, h));
                }
            }
        }
        out
    }

    pub fn is_cell(&self, (k, h): Cell) -> bool {
        self.in_k[k] && self.in_h[h] && self.parent.src(k) == self.parent.tgt(h)
    }

    /// The cell `(k, h)` with `kh = g`, i.e. the `𝒦ℋ` factorization.
    pub fn cell_of(&self, g: usize) -> Cell {
        (self.q1[g], self.q2[g])
    }

    /// The element `kh` represented by a cell.
    pub fn cell_element(&self, (k, h): Cell) -> usize {
        self.parent.mul(k, h).expect("cell is composable")
    }

    /// Horizontal product `(k,h) □→ (k',h') = (kk', h')`, defined when the
    /// shared vertical edge matches: `h = k' ▷ h'`.
    pub fn box_horizontal(&self, a: Cell, b: Cell) -> Result<Cell, GroupoidError> {
        let ((k, h), (k2, h2)) = (a, b);
        if !self.is_cell(a) || !self.is_cell(b) || self.act_left(k2, h2) != Some(h) {
            return Err(GroupoidError::NotComposable);
        }
        let kk = self.parent.mul(k, k2).ok_or(GroupoidError::NotComposable)?;
        Ok((kk, h2))
    }

    /// Horizontal product with the composability rule read literally as
    /// `h' = k ▷ h`. Kept for comparison; it does not match the operator
    /// product of the leg algebra on non-degenerate pairs.
    pub fn box_horizontal_literal(&self, a: Cell, b: Cell) -> Result<Cell, GroupoidError> {
        let ((k, h), (k2, h2)) = (a, b);
        if !self.is_cell(a) || !self.is_cell(b) || self.act_left(k, h) != Some(h2) {
            return Err(GroupoidError::NotComposable);
        }
        let kk = self.parent.mul(k, k2).ok_or(GroupoidError::NotComposable)?;
        Ok((kk, h2))
    }

    /// Vertical product `(k,h) □↓ (k',h') = (k, hh')`, defined when `k' = k ◁ h`.
    pub fn box_vertical(&self, a: Cell, b: Cell) -> Result<Cell, GroupoidError> {
        let ((k, h), (k2, h2)) = (a, b);
        if !self.is_cell(a) || !self.is_cell(b) || self.act_right(k, h) != Some(k2) {
            return Err(GroupoidError::NotComposable);
        }
        let hh = self.parent.mul(h, h2).ok_or(GroupoidError::NotComposable)?;
        Ok((k, hh))
    }

    /// Inverse for `□↓`: `(k ◁ h, h⁻¹)`.
    pub fn vertical_inverse(&self, (k, h): Cell) -> Cell {
        (self.act_right(k, h).expect("cell"), self.parent.inv(h))
    }

    /// Inverse for `□→`: `(k⁻¹, k ▷ h)`.
    pub fn horizontal_inverse(&self, (k, h): Cell) -> Cell {
        (self.parent.inv(k), self.act_left(k, h).expect("cell"))
    }

    /// Both inverses at once: `((k ◁ h)⁻¹, (k ▷ h)⁻¹)`.
    pub fn double_inverse(&self, (k, h): Cell) -> Cell {
        let g = &self.parent;
        (g.inv(self.act_right(k, h).unwrap()), g.inv(self.act_left(k, h).unwrap()))
    }

    /// Exhaustive checks of the counting lemmas, `m(hgk) = m(g)`, the
    /// `𝒦ℋ` factorization and functoriality of both actions. Returns the
    /// name of every identity that failed.
    pub fn lemma_checks(&self) -> Vec<(&'static str, bool)> {
        let g = &self.parent;
        let n = g.len();
        let k_fiber = |u: usize| self.k_ids.iter().filter(|&&k| g.tgt(k) == u).count();
        let card_k = self.h_ids.iter().all(|&h| k_fiber(g.src(h)) == k_fiber(g.tgt(h)));
        let card_m = g.units().iter().all(|&u| {
            let m = (0..n).filter(|&x| self.m[x] == u).count();
            let s = (0..n).filter(|&x| g.src(x) == u).count();
            let r = (0..n).filter(|&x| g.tgt(x) == u).count();
            m == s && s == r
        });
        let factor = (0..n).all(|x| g.mul(self.p1[x], self.p2[x]) == Some(x))
            && (0..n).all(|x| g.mul(self.q1[x], self.q2[x]) == Some(x));
        let mut middle = true;
        for x in 0..n {
            for &h in &self.h_ids {
                for &k in &self.k_ids {
                    if let Some(hx) = g.mul(h, x) {
                        if let Some(hxk) = g.mul(hx, k) {
                            middle &= self.m[hxk] == self.m[x];
                        }
                    }
                }
            }
        }
        let mut left_action = true;
        let mut right_action = true;
        for &k in &self.k_ids {
            for &k2 in &self.k_ids {
                let Some(kk) = g.mul(k, k2) else { continue };
                for &h in &self.h_ids {
                    if g.src(k2) != g.tgt(h) {
                        continue;
                    }
                    let inner = self.act_left(k2, h).unwrap();
                    left_action &= self.act_left(kk, h) == self.act_left(k, inner);
                }
            }
            for &h in &self.h_ids {
                if g.src(k) != g.tgt(h) {
                    continue;
                }
                let kh = self.act_right(k, h).unwrap();
                for &h2 in &self.h_ids {
                    let Some(hh) = g.mul(h, h2) else { continue };
                    right_action &= self.act_right(kh, h2) == self.act_right(k, hh);
                }
            }
        }
        vec![
            ("k_fiber_cardinality", card_k),
            ("middle_fiber_cardinality", card_m),
            ("unique_factorizations", factor),
            ("middle_map_invariance", middle),
            ("left_action_functorial", left_action),
            ("right_action_functorial", right_action),
        ]
    }
}

fn check_wide_subgroupoid(g: &Groupoid, mask: &[bool], which: &'static str) -> Result<(), GroupoidError> {
    if g.units().iter().any(|&u| !mask[u]) {
        return Err(GroupoidError::NotSubgroupoid(which));
    }
    for x in 0..g.len() {
        if !mask[x] {
            continue;
        }
        if !mask[g.inv(x)] {
            return Err(GroupoidError::NotSubgroupoid(which));
        }
        for y in 0..g.len() {
            if mask[y] {
                if let Some(z) = g.mul(x, y) {
                    if !mask[z] {
                        return Err(GroupoidError::NotSubgroupoid(which));
                    }
                }
            }
        }
    }
    Ok(())
}
