//! MDRG distances.
//!
//! For one diagram kind the distance between two MDRGs is the bottleneck
//! distance of their level-1 diagrams plus, for every deeper level, the
//! normalized sum over bins `c` of the cost of the best bijection between
//! the child graphs whose parents sit in bin `c`. The total distance is the
//! weighted sum over the kinds PD0, PD0 of `−f` and ExDg1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bottleneck::{bottleneck_points, Matching};
use crate::error::{Error, Result};
use crate::jcn::{build_jcn, shared_quantizations, FragmentMode};
use crate::matching::{bottleneck_assignment, hungarian};
use crate::mdrg::{build_mdrg, Mdrg};
use crate::mesh::MultiFieldMesh;
use crate::persistence::{self, DiagramKind, PersistenceDiagram};
use crate::quantize::Quantization;
use crate::reeb::morseify;
use crate::spectral::EigenDescriptorSet;

/// Relative size of the Morse-ification offset against the slab width.
pub const MORSE_EPSILON: f64 = 1e-6;

/// How the bijection between two collections of diagrams is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BijectionObjective {
    /// Minimize the largest matched cost.
    #[default]
    Minimax,
    /// Minimize the summed cost.
    Hungarian,
}

/// `(w0, w1, w2)` for PD0, PD0 of `−f` and ExDg1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Weights([f64; 3]);

impl Weights {
    pub fn new(w: [f64; 3]) -> Result<Self> {
        let sum: f64 = w.iter().sum();
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(w));
        }
        Ok(Self(w))
    }

    pub fn get(&self) -> [f64; 3] {
        self.0
    }

    pub fn of(&self, kind: DiagramKind) -> f64 {
        match kind {
            DiagramKind::Pd0 => self.0[0],
            DiagramKind::Pd0Neg => self.0[1],
            DiagramKind::Exdg1 => self.0[2],
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self([1.0 / 3.0; 3])
    }
}

impl TryFrom<[f64; 3]> for Weights {
    type Error = Error;

    fn try_from(w: [f64; 3]) -> Result<Self> {
        Self::new(w)
    }
}

impl From<Weights> for [f64; 3] {
    fn from(w: Weights) -> Self {
        w.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BijectionPair {
    /// `None` is a dummy (empty) graph.
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub cost: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bijection {
    pub pairs: Vec<BijectionPair>,
    /// Largest matched cost.
    pub cost: f64,
}

/// Best bijection between two collections of diagrams, the shorter side
/// padded with empty diagrams. Whatever the objective, the returned cost is
/// the largest bottleneck distance along the chosen bijection.
pub fn optimal_bijection(
    sf: &[PersistenceDiagram],
    sg: &[PersistenceDiagram],
    objective: BijectionObjective,
) -> Result<Bijection> {
    if let Some(first) = sf.iter().chain(sg).next() {
        for d in sf.iter().chain(sg) {
            persistence::ensure_same_kind(first, d)?;
        }
    }
    let points = |d: &PersistenceDiagram| d.points.iter().map(|p| (p.birth, p.death)).collect::<Vec<_>>();
    let pf: Vec<_> = sf.iter().map(points).collect();
    let pg: Vec<_> = sg.iter().map(points).collect();
    bijection_of_points(&pf, &pg, objective)
}

fn bijection_of_points(
    pf: &[Vec<(f64, f64)>],
    pg: &[Vec<(f64, f64)>],
    objective: BijectionObjective,
) -> Result<Bijection> {
    let n = pf.len().max(pg.len());
    if n == 0 {
        return Ok(Bijection::default());
    }
    let empty = Vec::new();
    let side = |s: &[Vec<(f64, f64)>], i: usize| s.get(i).unwrap_or(&empty).clone();
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| bottleneck_points(&side(pf, i), &side(pg, j)).0).collect())
        .collect();
    let assignment = match objective {
        BijectionObjective::Minimax => bottleneck_assignment(&cost)?,
        BijectionObjective::Hungarian => hungarian(&cost)?,
    };
    let pairs: Vec<BijectionPair> = assignment
        .columns
        .iter()
        .enumerate()
        .map(|(i, &j)| BijectionPair {
            left: (i < pf.len()).then_some(i),
            right: (j < pg.len()).then_some(j),
            cost: cost[i][j],
        })
        .collect();
    Ok(Bijection {
        cost: assignment.max,
        pairs,
    })
}

/// Diagrams of every graph of an MDRG, computed once after Morse-ification.
#[derive(Clone, Debug, PartialEq)]
pub struct MdrgDiagrams {
    /// `levels[i][g]` holds the PD0, PD0-neg and ExDg1 diagrams of graph `g`.
    levels: Vec<Vec<[PersistenceDiagram; 3]>>,
}

impl MdrgDiagrams {
    pub fn new(mdrg: &Mdrg) -> Result<Self> {
        let levels = (0..mdrg.level_count())
            .map(|i| {
                let eps = mdrg.quantizations()[i].width() * MORSE_EPSILON;
                mdrg.level(i)
                    .par_iter()
                    .map(|g| {
                        let m = morseify(&g.graph, eps);
                        Ok([
                            persistence::compute_pd0(&m)?,
                            persistence::compute_pd0_neg(&m)?,
                            persistence::compute_exdg1(&m)?,
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { levels })
    }

    pub fn get(&self, level: usize, graph: usize, kind: DiagramKind) -> &PersistenceDiagram {
        let k = DiagramKind::ALL.iter().position(|&x| x == kind).unwrap();
        &self.levels[level][graph][k]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinTerm {
    pub bin: usize,
    pub left_graphs: usize,
    pub right_graphs: usize,
    pub cost: f64,
    pub bijection: Bijection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTerm {
    /// Field whose bins group the child graphs (0-based).
    pub field: usize,
    pub normalization: f64,
    pub bins: Vec<BinTerm>,
    /// `normalization · Σ cost`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindReport {
    pub kind: DiagramKind,
    pub level1: f64,
    pub level1_matching: Matching,
    pub levels: Vec<LevelTerm>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub weights: Weights,
    pub objective: BijectionObjective,
    pub parts: Vec<KindReport>,
    pub total: f64,
}

impl DistanceReport {
    pub fn part(&self, kind: DiagramKind) -> &KindReport {
        self.parts.iter().find(|p| p.kind == kind).expect("all kinds are reported")
    }

    /// `Σ w_k d_k` recomputed from the parts.
    pub fn recombine(&self) -> f64 {
        self.parts.iter().map(|p| self.weights.of(p.kind) * p.total).sum()
    }
}

fn check_compatible(a: &Mdrg, b: &Mdrg) -> Result<()> {
    if a.level_count() != b.level_count() {
        return Err(Error::LevelMismatch(a.level_count(), b.level_count()));
    }
    if a.quantizations() != b.quantizations() {
        return Err(Error::QuantizationMismatch);
    }
    Ok(())
}

/// `1 / #bins meeting Range(f_i) ∪ Range(g_i)`. With overlapping ranges on a
/// union quantization this is `1/q`.
fn normalization(q: &Quantization, a: (f64, f64), b: (f64, f64)) -> f64 {
    let ra = q.bins_meeting(a.0, a.1);
    let rb = q.bins_meeting(b.0, b.1);
    let count = (0..q.slabs()).filter(|k| ra.contains(k) || rb.contains(k)).count();
    1.0 / count.max(1) as f64
}

fn kind_report(
    a: &Mdrg,
    b: &Mdrg,
    da: &MdrgDiagrams,
    db: &MdrgDiagrams,
    kind: DiagramKind,
    objective: BijectionObjective,
) -> Result<KindReport> {
    let (level1, level1_matching) = persistence_pair(da.get(0, 0, kind), db.get(0, 0, kind));
    let mut levels = Vec::new();
    let mut total = level1;
    for field in 0..a.level_count() - 1 {
        let q = &a.quantizations()[field];
        let norm = normalization(q, a.ranges()[field], b.ranges()[field]);
        let bins = (0..q.slabs())
            .into_par_iter()
            .filter_map(|c| {
                let ga = a.children_in_bin(field, c);
                let gb = b.children_in_bin(field, c);
                if ga.is_empty() && gb.is_empty() {
                    return None;
                }
                let sf: Vec<PersistenceDiagram> = ga.iter().map(|&g| da.get(field + 1, g, kind).clone()).collect();
                let sg: Vec<PersistenceDiagram> = gb.iter().map(|&g| db.get(field + 1, g, kind).clone()).collect();
                Some(optimal_bijection(&sf, &sg, objective).map(|bijection| BinTerm {
                    bin: c,
                    left_graphs: ga.len(),
                    right_graphs: gb.len(),
                    cost: bijection.cost,
                    bijection,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        let value = norm * bins.iter().map(|t| t.cost).sum::<f64>();
        total += value;
        levels.push(LevelTerm {
            field,
            normalization: norm,
            bins,
            value,
        });
    }
    Ok(KindReport {
        kind,
        level1,
        level1_matching,
        levels,
        total,
    })
}

fn persistence_pair(x: &PersistenceDiagram, y: &PersistenceDiagram) -> (f64, Matching) {
    let px: Vec<_> = x.points.iter().map(|p| (p.birth, p.death)).collect();
    let py: Vec<_> = y.points.iter().map(|p| (p.birth, p.death)).collect();
    bottleneck_points(&px, &py)
}

/// Distance between two MDRGs for one diagram kind, with its trace.
pub fn mdrg_distance(a: &Mdrg, b: &Mdrg, kind: DiagramKind, objective: BijectionObjective) -> Result<KindReport> {
    check_compatible(a, b)?;
    let da = MdrgDiagrams::new(a)?;
    let db = MdrgDiagrams::new(b)?;
    kind_report(a, b, &da, &db, kind, objective)
}

/// Weighted sum of the three kind distances, over every MDRG level.
pub fn total_distance(a: &Mdrg, b: &Mdrg, weights: Weights, objective: BijectionObjective) -> Result<DistanceReport> {
    check_compatible(a, b)?;
    let da = MdrgDiagrams::new(a)?;
    let db = MdrgDiagrams::new(b)?;
    total_from_diagrams(a, b, &da, &db, weights, objective)
}

pub fn total_from_diagrams(
    a: &Mdrg,
    b: &Mdrg,
    da: &MdrgDiagrams,
    db: &MdrgDiagrams,
    weights: Weights,
    objective: BijectionObjective,
) -> Result<DistanceReport> {
    check_compatible(a, b)?;
    let parts = DiagramKind::ALL
        .iter()
        .map(|&k| kind_report(a, b, da, db, k, objective))
        .collect::<Result<Vec<_>>>()?;
    let total = parts.iter().map(|p| weights.of(p.kind) * p.total).sum();
    Ok(DistanceReport {
        weights,
        objective,
        parts,
        total,
    })
}

/// The r-field distance: the level-1 term plus one normalized term per
/// deeper level, weighted over the three diagram kinds. Requires `r ≥ 2`.
pub fn generalized_distance(
    a: &Mdrg,
    b: &Mdrg,
    weights: Weights,
    objective: BijectionObjective,
) -> Result<DistanceReport> {
    check_compatible(a, b)?;
    if a.level_count() < 2 {
        return Err(Error::Invalid("the r-field distance needs at least two fields".into()));
    }
    total_distance(a, b, weights, objective)
}

/// Pipeline settings shared by every comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceConfig {
    /// Slab count per field; the last entry repeats for later fields.
    pub slabs: Vec<usize>,
    pub weights: Weights,
    pub bijection: BijectionObjective,
    pub fragment_mode: FragmentMode,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            slabs: vec![32],
            weights: Weights::default(),
            bijection: BijectionObjective::default(),
            fragment_mode: FragmentMode::default(),
        }
    }
}

impl DistanceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slabs.is_empty() || self.slabs.contains(&0) {
            return Err(Error::ZeroSlabs);
        }
        Weights::new(self.weights.get())?;
        Ok(())
    }
}

/// Builds both MDRGs over the union-range quantization of every field and
/// returns their total distance.
pub fn compare_fields(a: &MultiFieldMesh, b: &MultiFieldMesh, config: &DistanceConfig) -> Result<DistanceReport> {
    config.validate()?;
    let quants = shared_quantizations(a, b, &config.slabs)?;
    let (ma, mb) = rayon::join(
        || build_jcn(a, &quants, config.fragment_mode).and_then(|j| build_mdrg(&j)),
        || build_jcn(b, &quants, config.fragment_mode).and_then(|j| build_mdrg(&j)),
    );
    total_distance(&ma?, &mb?, config.weights, config.bijection)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    /// `d_T` for the descriptor pairs `(i, i+1)`, `i = 1..E−1`.
    pub terms: Vec<f64>,
    pub total: f64,
}

/// Sum over consecutive descriptor pairs of the bivariate-field distance.
pub fn shape_distance(
    mesh_a: &MultiFieldMesh,
    desc_a: &EigenDescriptorSet,
    mesh_b: &MultiFieldMesh,
    desc_b: &EigenDescriptorSet,
    count: usize,
    config: &DistanceConfig,
) -> Result<ShapeReport> {
    if count < 2 {
        return Err(Error::Invalid("shape distance needs at least two descriptors".into()));
    }
    for d in [desc_a, desc_b] {
        if d.count() < count {
            return Err(Error::NotEnoughDescriptors {
                requested: count,
                available: d.count(),
            });
        }
    }
    let with_pair = |mesh: &MultiFieldMesh, desc: &EigenDescriptorSet, i: usize| {
        mesh.without_fields()
            .with_field(format!("phi{i}"), desc.descriptors[i - 1].clone())?
            .with_field(format!("phi{}", i + 1), desc.descriptors[i].clone())
    };
    let terms = (1..count)
        .map(|i| {
            let a = with_pair(mesh_a, desc_a, i)?;
            let b = with_pair(mesh_b, desc_b, i)?;
            Ok(compare_fields(&a, &b, config)?.total)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ShapeReport {
        total: terms.iter().sum(),
        terms,
    })
}
