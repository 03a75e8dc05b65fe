use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use reebdist::evaluate::{distances_to_gnuplot, format_matrix_csv, parse_matrix_csv, peaks_to_csv};
use reebdist::evaluate::retrieval_metrics_with_cutoff;
use reebdist::io::load_mesh_auto;
use reebdist::{compare_fields, mesh_descriptors, pairwise_matrix, shape_distance, LabeledDistanceMatrix};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::input::{load_item, parse_fields, parse_geometry, read_manifest, Item};

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
    }
}

fn to_json(value: &impl Serialize) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn need_eigenfunctions(config: &RunConfig, at_least: usize) -> CliResult<()> {
    if config.eigenfunctions < at_least {
        return Err(CliError::Usage(format!(
            "E must be at least {at_least}, got {}",
            config.eigenfunctions
        )));
    }
    Ok(())
}

pub fn descriptors(mesh: &Path, config: &RunConfig, out: Option<&Path>) -> CliResult<()> {
    need_eigenfunctions(config, 1)?;
    let mesh = load_mesh_auto(mesh)?;
    let set = mesh_descriptors(&mesh, config.eigenfunctions, config.laplace())?;
    emit(out, &set.to_csv())
}

pub fn distance(a: &str, b: &str, fields_a: &str, fields_b: Option<&str>, config: &RunConfig, out: Option<&Path>) -> CliResult<()> {
    let here = Path::new("");
    let spec_a = parse_fields(fields_a, here);
    let spec_b = parse_fields(fields_b.unwrap_or(fields_a), here);
    if matches!(spec_a, crate::input::FieldSpec::Spectral) || matches!(spec_b, crate::input::FieldSpec::Spectral) {
        need_eigenfunctions(config, 2)?;
    }
    let (ia, ib) = rayon::join(
        || load_item("A", &parse_geometry(a, here)?, &spec_a, config),
        || load_item("B", &parse_geometry(b, here)?, &spec_b, config),
    );
    let text = match (ia?, ib?) {
        (Item::Fields(x), Item::Fields(y)) => {
            if x.field_count() != y.field_count() {
                return Err(CliError::Input(format!(
                    "A has {} fields but B has {}",
                    x.field_count(),
                    y.field_count()
                )));
            }
            to_json(&compare_fields(&x, &y, &config.distance())?)?
        }
        (Item::Shape(x), Item::Shape(y)) => {
            need_eigenfunctions(config, 2)?;
            let r = shape_distance(&x.mesh, &x.descriptors, &y.mesh, &y.descriptors, config.eigenfunctions, &config.distance())?;
            to_json(&r)?
        }
        _ => return Err(CliError::Input("cannot compare explicit fields with spectral descriptors".into())),
    };
    emit(out, &text)
}

fn load_all(manifest: &Path, config: &RunConfig) -> CliResult<(Vec<String>, Vec<String>, Vec<Item>)> {
    let rows = read_manifest(manifest)?;
    let items = rows
        .par_iter()
        .map(|r| load_item(&r.id, &r.geometry, &r.fields, config))
        .collect::<CliResult<Vec<Item>>>()?;
    let shapes = items.iter().filter(|i| matches!(i, Item::Shape(_))).count();
    if shapes != 0 && shapes != items.len() {
        return Err(CliError::Input("manifest mixes explicit fields and spectral descriptors".into()));
    }
    if shapes > 0 {
        need_eigenfunctions(config, 2)?;
    }
    if let Some(Item::Fields(first)) = items.first() {
        for (r, item) in rows.iter().zip(&items) {
            if let Item::Fields(m) = item {
                if m.field_count() != first.field_count() {
                    return Err(CliError::Input(format!(
                        "item `{}` has {} fields, item `{}` has {}",
                        r.id,
                        m.field_count(),
                        rows[0].id,
                        first.field_count()
                    )));
                }
            }
        }
    }
    let ids = rows.iter().map(|r| r.id.clone()).collect();
    let labels = rows.into_iter().map(|r| r.label).collect();
    Ok((ids, labels, items))
}

fn pair_distance(items: &[Item], i: usize, j: usize, config: &RunConfig) -> reebdist::Result<f64> {
    match (&items[i], &items[j]) {
        (Item::Fields(a), Item::Fields(b)) => Ok(compare_fields(a, b, &config.distance())?.total),
        (Item::Shape(a), Item::Shape(b)) => Ok(shape_distance(
            &a.mesh,
            &a.descriptors,
            &b.mesh,
            &b.descriptors,
            config.eigenfunctions,
            &config.distance(),
        )?
        .total),
        _ => unreachable!("load_all rejects mixed manifests"),
    }
}

/// Side file where finished pairs are appended while a matrix is built.
pub fn progress_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".pairs");
    out.with_file_name(name)
}

/// Pairs already known from a complete or partial earlier run.
fn known_pairs(out: &Path, ids: &[String]) -> CliResult<HashMap<(usize, usize), f64>> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut known = HashMap::new();
    let mut add = |a: &str, b: &str, v: f64| {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            if i != j {
                known.insert((i.min(j), i.max(j)), v);
            }
        }
    };
    if let Ok(text) = fs::read_to_string(out) {
        if let Ok((old_ids, values)) = parse_matrix_csv(&text) {
            for (i, a) in old_ids.iter().enumerate() {
                for (j, b) in old_ids.iter().enumerate().skip(i + 1) {
                    add(a, b, values[i][j]);
                }
            }
        }
    }
    if let Ok(text) = fs::read_to_string(progress_path(out)) {
        for line in text.lines() {
            // A line cut short by an interrupted write fails to parse and is redone.
            let cells: Vec<&str> = line.split(',').collect();
            if let [a, b, v] = cells[..] {
                if let Ok(v) = v.parse::<f64>() {
                    add(a, b, v);
                }
            }
        }
    }
    Ok(known)
}

pub fn matrix(manifest: &Path, config: &RunConfig, out: Option<&Path>, labels_out: Option<&Path>, resume: bool) -> CliResult<()> {
    if resume && out.is_none() {
        return Err(CliError::Usage("--resume needs --output".into()));
    }
    let (ids, labels, items) = load_all(manifest, config)?;
    let known = match (resume, out) {
        (true, Some(o)) => known_pairs(o, &ids)?,
        _ => HashMap::new(),
    };
    if !known.is_empty() {
        log::info!("resuming with {} finished pairs", known.len());
    }
    let log_file = match out {
        Some(o) => {
            let path = progress_path(o);
            let file = OpenOptions::new()
                .create(true)
                .append(resume)
                .write(true)
                .truncate(!resume)
                .open(&path)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Some(Mutex::new(file))
        }
        None => None,
    };
    let record = |i: usize, j: usize, v: f64| {
        if let Some(f) = &log_file {
            let mut f = f.lock().unwrap_or_else(|p| p.into_inner());
            if let Err(e) = writeln!(f, "{},{},{v}", ids[i], ids[j]) {
                log::warn!("cannot record pair ({i}, {j}): {e}");
            }
        }
    };
    let m = pairwise_matrix(
        items.len(),
        |i, j| known.get(&(i, j)).copied(),
        |i, j| {
            let v = pair_distance(&items, i, j, config)?;
            record(i, j, v);
            Ok(v)
        },
    )?;
    emit(out, &format_matrix_csv(&ids, &m))?;
    if let Some(o) = out {
        drop(log_file);
        let _ = fs::remove_file(progress_path(o));
    }
    if let Some(l) = labels_out {
        let mut text = String::from("id,label\n");
        for (id, label) in ids.iter().zip(&labels) {
            text.push_str(&format!("{id},{label}\n"));
        }
        emit(Some(l), &text)?;
    }
    Ok(())
}

pub fn evaluate(matrix: &Path, labels: &Path, cutoff: usize, out: Option<&Path>) -> CliResult<()> {
    let m = LabeledDistanceMatrix::load(matrix, labels)?;
    let metrics = retrieval_metrics_with_cutoff(&m, cutoff)?;
    emit(out, &to_json(&metrics)?)
}

pub fn timeseries(manifest: &Path, config: &RunConfig, out: Option<&Path>, plot: Option<&Path>, report: Option<&Path>) -> CliResult<()> {
    let (_, _, items) = load_all(manifest, config)?;
    let sites = items
        .into_iter()
        .map(|i| match i {
            Item::Fields(m) => Ok(m),
            Item::Shape(_) => Err(CliError::Input("time-series sites need explicit fields".into())),
        })
        .collect::<CliResult<Vec<_>>>()?;
    let r = reebdist::timeseries(&sites, &config.distance())?;
    if let Some(p) = plot {
        emit(Some(p), &distances_to_gnuplot(&r.distances))?;
    }
    if let Some(p) = report {
        emit(Some(p), &to_json(&r)?)?;
    }
    emit(out, &peaks_to_csv(&r.peaks))
}

