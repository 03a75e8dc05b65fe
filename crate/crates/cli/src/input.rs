//! Item descriptions: geometry strings, field specs and manifests.
//!
//! Geometry is a mesh path (`.off`, `.obj`) or `grid:NXxNYxNZ[@h]` for a
//! regular grid with spacing `h`. A field spec is either `eig` (descriptors
//! computed from the mesh), `desc:PATH` (a descriptor CSV written by the
//! `descriptors` command) or a `;`-separated list of sources, each `PATH` or
//! `PATH#COLUMN` for a named CSV column.

use std::path::{Path, PathBuf};

use reebdist::io::{load_csv_table, load_mesh_auto, load_scalars, load_volume, VolumeFormat};
use reebdist::{grid_to_mesh, mesh_descriptors, EigenDescriptorSet, MultiFieldMesh, RegularGrid, ShapeItem};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Mesh(PathBuf),
    Grid { dims: [usize; 3], spacing: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Source {
    pub path: PathBuf,
    pub column: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Spectral,
    Descriptors(PathBuf),
    Sources(Vec<Source>),
}

/// A loaded item: explicit fields or a shape with its descriptors.
pub enum Item {
    Fields(MultiFieldMesh),
    Shape(ShapeItem),
}

pub fn parse_geometry(text: &str, base: &Path) -> CliResult<Geometry> {
    let text = text.trim();
    let Some(rest) = text.strip_prefix("grid:") else {
        return Ok(Geometry::Mesh(base.join(text)));
    };
    let bad = || CliError::Input(format!("bad grid geometry `{text}`, expected grid:NXxNYxNZ[@h]"));
    let (dims, spacing) = match rest.split_once('@') {
        Some((d, h)) => (d, h.parse::<f64>().map_err(|_| bad())?),
        None => (rest, 1.0),
    };
    let dims: Vec<usize> = dims.split('x').map(|d| d.parse().map_err(|_| bad())).collect::<CliResult<_>>()?;
    let dims: [usize; 3] = dims.try_into().map_err(|_| bad())?;
    Ok(Geometry::Grid { dims, spacing })
}

pub fn parse_fields(text: &str, base: &Path) -> FieldSpec {
    let text = text.trim();
    if text.is_empty() || text == "eig" {
        return FieldSpec::Spectral;
    }
    if let Some(p) = text.strip_prefix("desc:") {
        return FieldSpec::Descriptors(base.join(p.trim()));
    }
    FieldSpec::Sources(
        text.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s.split_once('#') {
                Some((p, c)) => Source {
                    path: base.join(p),
                    column: Some(c.to_string()),
                },
                None => Source {
                    path: base.join(s),
                    column: None,
                },
            })
            .collect(),
    )
}

fn load_source(source: &Source, grid: Option<[usize; 3]>) -> CliResult<Vec<f64>> {
    if let Some(col) = &source.column {
        let table = load_csv_table(&source.path)?;
        return table
            .column(col)
            .map(<[f64]>::to_vec)
            .ok_or_else(|| CliError::Input(format!("{} has no column `{col}`", source.path.display())));
    }
    match grid {
        Some(dims) => {
            let format = VolumeFormat::from_path(&source.path).ok_or_else(|| {
                CliError::Input(format!("cannot infer volume format of {}", source.path.display()))
            })?;
            Ok(load_volume(&source.path, dims, format)?)
        }
        None => Ok(load_scalars(&source.path)?),
    }
}

pub fn load_item(id: &str, geometry: &Geometry, fields: &FieldSpec, config: &RunConfig) -> CliResult<Item> {
    let with_id = |e: CliError| match e {
        CliError::Input(m) => CliError::Input(format!("item `{id}`: {m}")),
        other => other,
    };
    load_item_inner(id, geometry, fields, config).map_err(with_id)
}

fn load_item_inner(id: &str, geometry: &Geometry, fields: &FieldSpec, config: &RunConfig) -> CliResult<Item> {
    match (geometry, fields) {
        (Geometry::Mesh(path), FieldSpec::Sources(sources)) => {
            let mut mesh = load_mesh_auto(path)?;
            for (k, s) in sources.iter().enumerate() {
                mesh.attach_field(format!("f{}", k + 1), load_source(s, None)?)?;
            }
            Ok(Item::Fields(mesh))
        }
        (Geometry::Grid { dims, spacing }, FieldSpec::Sources(sources)) => {
            let mut grid = RegularGrid::new(*dims, [*spacing; 3])?;
            for (k, s) in sources.iter().enumerate() {
                grid.attach_field(format!("f{}", k + 1), load_source(s, Some(*dims))?)?;
            }
            Ok(Item::Fields(grid_to_mesh(&grid)?))
        }
        (Geometry::Mesh(path), FieldSpec::Spectral) => {
            let mesh = load_mesh_auto(path)?;
            let descriptors = mesh_descriptors(&mesh, config.eigenfunctions, config.laplace())?;
            Ok(Item::Shape(ShapeItem {
                id: id.to_string(),
                mesh,
                descriptors,
            }))
        }
        (Geometry::Mesh(path), FieldSpec::Descriptors(desc)) => {
            let mesh = load_mesh_auto(path)?;
            let descriptors = EigenDescriptorSet::load(desc)?;
            if descriptors.vertex_count() != mesh.vertex_count() {
                return Err(CliError::Input(format!(
                    "{} has {} rows but the mesh has {} vertices",
                    desc.display(),
                    descriptors.vertex_count(),
                    mesh.vertex_count()
                )));
            }
            Ok(Item::Shape(ShapeItem {
                id: id.to_string(),
                mesh,
                descriptors,
            }))
        }
        (Geometry::Grid { .. }, _) => Err(CliError::Input("descriptors need a surface mesh, not a grid".into())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    pub id: String,
    pub geometry: Geometry,
    pub fields: FieldSpec,
    pub label: String,
}

#[derive(Deserialize)]
struct RawRow {
    id: String,
    geometry: String,
    #[serde(default)]
    fields: String,
    #[serde(default)]
    label: String,
}

/// Reads a manifest CSV with header `id,geometry,fields,label`. Paths are
/// relative to the manifest's directory; `fields` and `label` may be empty.
pub fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize::<RawRow>() {
        let r = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        rows.push(ManifestRow {
            geometry: parse_geometry(&r.geometry, base)?,
            fields: parse_fields(&r.fields, base),
            id: r.id,
            label: r.label,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for r in &rows {
        if !seen.insert(&r.id) {
            return Err(CliError::Input(format!("duplicate id `{}` in {}", r.id, path.display())));
        }
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{} lists no items", path.display())));
    }
    Ok(rows)
}
