//! On-disk JSON formats: groupoids, match pairs, actions and the weak Hopf
//! export.
//!
//! Complex entries are written as `[re, im]`; a bare number is read as a
//! real entry. Paths inside a file resolve against that file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, BlockAlgebra, GroupoidAction, VNModule};
use crate::groupoid::{Groupoid, GroupoidDesc, GroupoidError, MatchPair};
use crate::linop::{Mat, Vector, C64};
use crate::staralg::FdAlgebra;
use crate::wha::WeakHopf;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {msg}")]
    Read { path: String, msg: String },
    #[error("cannot parse {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// A complex scalar, either `[re, im]` or a real number.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    pub fn value(self) -> C64 {
        match self {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl From<C64> for Entry {
    fn from(z: C64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_to_json(m: &Mat) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<Mat, IoError> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(IoError::Shape("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(nr, nc, |i, j| rows[i][j].value()))
}

pub fn vector_to_json(v: &Vector) -> Vec<Entry> {
    v.iter().map(|&z| z.into()).collect()
}

pub fn vector_from_json(v: &[Entry]) -> Vector {
    Vector::from_iterator(v.len(), v.iter().map(|e| e.value()))
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::Read { path: path.display().to_string(), msg: e.to_string() })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::Parse { path: path.display().to_string(), msg: e.to_string() })
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn read_groupoid(path: &Path) -> Result<Groupoid, IoError> {
    let desc: GroupoidDesc = parse(path)?;
    Ok(Groupoid::validate(&desc)?)
}

pub fn groupoid_json(g: &Groupoid) -> String {
    serde_json::to_string_pretty(&g.to_desc()).expect("groupoid serializes")
}

/// `{"h": [...], "k": [...]}`: element ids of the two wide subgroupoids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchPairDesc {
    pub h: Vec<usize>,
    pub k: Vec<usize>,
}

pub fn read_match_pair(g: &Groupoid, path: &Path) -> Result<MatchPair, IoError> {
    let desc: MatchPairDesc = parse(path)?;
    Ok(MatchPair::new(g, &desc.h, &desc.k)?)
}

/// A groupoid given inline or by a path relative to the referring file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupoidRef {
    Path(String),
    Inline(GroupoidDesc),
}

/// Action file. Each `maps` entry is `α_g` as a `d_{r(g)} × d_{s(g)}`
/// matrix in the matrix-unit bases of the fibers; `unitaries` instead gives
/// one unitary per element and the action is `Ad` of it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionDesc {
    pub groupoid: GroupoidRef,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<MatrixJson>>,
}

pub fn action_from_desc(desc: &ActionDesc, base: &Path) -> Result<GroupoidAction, IoError> {
    let g = match &desc.groupoid {
        GroupoidRef::Path(p) => read_groupoid(&resolve(base, p))?,
        GroupoidRef::Inline(d) => Groupoid::validate(d)?,
    };
    if desc.blocks.len() != g.units().len() {
        return Err(IoError::Shape(format!("{} block lists for {} units", desc.blocks.len(), g.units().len())));
    }
    if desc.blocks.iter().any(|b| b.is_empty() || b.contains(&0)) {
        return Err(IoError::Shape("block sizes must be positive and nonempty".into()));
    }
    let fibers: Vec<BlockAlgebra> = desc.blocks.iter().cloned().map(BlockAlgebra::new).collect();
    let mats = |list: &[MatrixJson]| list.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>();
    match (&desc.maps, &desc.unitaries) {
        (Some(maps), None) => Ok(GroupoidAction::new(g, VNModule::new(fibers), mats(maps)?)?),
        (None, Some(us)) => {
            let us = mats(us)?;
            if us.len() != g.len() {
                return Err(IoError::Shape(format!("{} unitaries for {} elements", us.len(), g.len())));
            }
            for (x, u) in us.iter().enumerate() {
                let n = fibers[g.unit_index(g.src(x))].size();
                if u.shape() != (n, n) || fibers[g.unit_index(g.tgt(x))] != fibers[g.unit_index(g.src(x))] {
                    return Err(IoError::Shape(format!("unitary {x} does not fit its fibers")));
                }
            }
            Ok(GroupoidAction::from_unitaries(g, fibers, &us)?)
        }
        _ => Err(IoError::Shape("give exactly one of maps or unitaries".into())),
    }
}

pub fn read_action(path: &Path) -> Result<GroupoidAction, IoError> {
    let desc: ActionDesc = parse(path)?;
    action_from_desc(&desc, path)
}

/// Action file for an existing action, with the groupoid inlined.
pub fn action_desc(act: &GroupoidAction) -> ActionDesc {
    ActionDesc {
        groupoid: GroupoidRef::Inline(act.groupoid.to_desc()),
        blocks: act.module.fibers.iter().map(|f| f.blocks.clone()).collect(),
        maps: Some(act.maps.iter().map(matrix_to_json).collect()),
        unitaries: None,
    }
}

/// Weak Hopf export. `mult` is flat with index `(i * d + j) * d + k` for
/// the coefficient of `a_k` in `a_i a_j`; `coproduct` is `d² × d` with
/// column `i` holding `Γ(a_i)` in the basis `a_j ⊗ a_k` at row `j * d + k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakHopfExport {
    pub d: usize,
    pub labels: Vec<String>,
    pub mult: Vec<Entry>,
    pub star: MatrixJson,
    pub unit: Vec<Entry>,
    pub coproduct: MatrixJson,
    pub antipode: MatrixJson,
    pub counit: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<Vec<Entry>>,
}

pub fn export_weak_hopf(w: &WeakHopf) -> WeakHopfExport {
    WeakHopfExport {
        d: w.d(),
        labels: w.labels.clone(),
        mult: w.alg.mult.iter().map(|&z| z.into()).collect(),
        star: matrix_to_json(&w.alg.star),
        unit: vector_to_json(&w.alg.unit),
        coproduct: matrix_to_json(&w.coproduct),
        antipode: matrix_to_json(&w.antipode),
        counit: vector_to_json(&w.counit),
        haar: w.haar.as_ref().map(vector_to_json),
    }
}

pub fn import_weak_hopf(x: &WeakHopfExport) -> Result<WeakHopf, IoError> {
    let d = x.d;
    let shape = |what: &str, ok: bool| if ok { Ok(()) } else { Err(IoError::Shape(format!("{what} has the wrong size for d = {d}"))) };
    shape("mult", x.mult.len() == d * d * d)?;
    shape("unit", x.unit.len() == d)?;
    shape("counit", x.counit.len() == d)?;
    let star = matrix_from_json(&x.star)?;
    let coproduct = matrix_from_json(&x.coproduct)?;
    let antipode = matrix_from_json(&x.antipode)?;
    shape("star", star.shape() == (d, d))?;
    shape("antipode", antipode.shape() == (d, d))?;
    shape("coproduct", coproduct.shape() == (d * d, d))?;
    if let Some(h) = &x.haar {
        shape("haar", h.len() == d)?;
    }
    let labels = if x.labels.len() == d { x.labels.clone() } else { (0..d).map(|i| format!("a{i}")).collect() };
    Ok(WeakHopf {
        alg: FdAlgebra { d, mult: x.mult.iter().map(|e| e.value()).collect(), star, unit: vector_from_json(&x.unit) },
        coproduct,
        antipode,
        counit: vector_from_json(&x.counit),
        haar: x.haar.as_deref().map(vector_from_json),
        ops: None,
        labels,
    })
}

pub fn read_weak_hopf(path: &Path) -> Result<WeakHopf, IoError> {
    let x: WeakHopfExport = parse(path)?;
    import_weak_hopf(&x)
}
