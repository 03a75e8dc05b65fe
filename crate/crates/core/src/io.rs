//! Readers and writers for surface meshes, volume fields and scalar lists.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{MultiFieldMesh, Point3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeFormat {
    RawF32Le,
    RawF64Le,
    Csv,
}

impl VolumeFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "f32" | "raw" => Some(Self::RawF32Le),
            "f64" => Some(Self::RawF64Le),
            "csv" | "txt" => Some(Self::Csv),
            _ => None,
        }
    }
}

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a triangle mesh. The returned mesh has no fields.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<MultiFieldMesh> {
    let path = path.as_ref();
    let text = read_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

/// Loads a mesh, picking the format from the file extension.
pub fn load_mesh_auto(path: impl AsRef<Path>) -> Result<MultiFieldMesh> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        Error::Invalid(format!("cannot infer mesh format of {}", path.display()))
    })?;
    load_mesh(path, format)
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{token}`")))
}

pub fn parse_off(text: &str) -> Result<MultiFieldMesh> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first().map(|t| t.ends_with("OFF")) != Some(true) {
        return Err(Error::parse(line_no, "missing OFF header"));
    }
    tokens.remove(0);
    let (count_line, counts) = if tokens.is_empty() {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no, "missing element counts"))?;
        (n, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (line_no, tokens)
    };
    if counts.len() < 2 {
        return Err(Error::parse(count_line, "expected vertex and face counts"));
    }
    let nv: usize = parse_num(counts[0], count_line)?;
    let nf: usize = parse_num(counts[1], count_line)?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(count_line, "unexpected end of vertex list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(Error::parse(n, "vertex needs three coordinates"));
        }
        vertices.push([parse_num(t[0], n)?, parse_num(t[1], n)?, parse_num(t[2], n)?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for face in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(count_line, "unexpected end of face list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let arity: usize = parse_num(t[0], n)?;
        if arity != 3 {
            return Err(Error::NonTriangleFace { face, arity });
        }
        if t.len() < 4 {
            return Err(Error::parse(n, "face lists fewer indices than declared"));
        }
        faces.push(vec![parse_num(t[1], n)?, parse_num(t[2], n)?, parse_num(t[3], n)?]);
    }
    MultiFieldMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<MultiFieldMesh> {
    let mut vertices: Vec<Point3> = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in significant_lines(text) {
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(Error::parse(n, "vertex needs three coordinates"));
                }
                vertices.push([parse_num(c[0], n)?, parse_num(c[1], n)?, parse_num(c[2], n)?]);
            }
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(Error::NonTriangleFace {
                        face: faces.len(),
                        arity: refs.len(),
                    });
                }
                let mut face = Vec::with_capacity(3);
                for r in refs {
                    let idx: i64 = parse_num(r.split('/').next().unwrap_or(""), n)?;
                    let resolved = if idx > 0 {
                        idx - 1
                    } else if idx < 0 {
                        vertices.len() as i64 + idx
                    } else {
                        return Err(Error::parse(n, "OBJ indices are 1-based"));
                    };
                    if resolved < 0 {
                        return Err(Error::parse(n, format!("relative index {idx} underflows")));
                    }
                    face.push(resolved as usize);
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    MultiFieldMesh::new(vertices, faces)
}

/// Serializes a triangle mesh. Fields are not written.
pub fn format_mesh(mesh: &MultiFieldMesh, format: MeshFormat) -> Result<String> {
    if !mesh.is_triangle_mesh() {
        return Err(Error::NotTriangleMesh);
    }
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(out, "OFF\n{} {} 0", mesh.vertex_count(), mesh.simplex_count());
            for v in mesh.vertices() {
                let _ = writeln!(out, "{} {} {}", v[0], v[1], v[2]);
            }
            for s in mesh.simplices() {
                let _ = writeln!(out, "3 {} {} {}", s[0], s[1], s[2]);
            }
        }
        MeshFormat::Obj => {
            for v in mesh.vertices() {
                let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
            }
            for s in mesh.simplices() {
                let _ = writeln!(out, "f {} {} {}", s[0] + 1, s[1] + 1, s[2] + 1);
            }
        }
    }
    Ok(out)
}

pub fn write_mesh(mesh: &MultiFieldMesh, path: impl AsRef<Path>, format: MeshFormat) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_mesh(mesh, format)?).map_err(|e| Error::io(path, e))
}

/// Reads a scalar volume of `dims` samples stored x-fastest, then y, then z.
///
/// CSV input may spread values over any number of rows and columns; a first
/// row that does not parse as numbers is treated as a header and skipped.
pub fn load_volume(path: impl AsRef<Path>, dims: [usize; 3], format: VolumeFormat) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let expected: usize = dims.iter().product();
    let values = match format {
        VolumeFormat::RawF32Le | VolumeFormat::RawF64Le => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_raw(&bytes, format)?
        }
        VolumeFormat::Csv => parse_csv_values(&read_string(path)?)?,
    };
    if values.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: values.len(),
        });
    }
    Ok(values)
}

fn decode_raw(bytes: &[u8], format: VolumeFormat) -> Result<Vec<f64>> {
    let width = if format == VolumeFormat::RawF32Le { 4 } else { 8 };
    if bytes.len() % width != 0 {
        return Err(Error::Invalid(format!(
            "raw volume of {} bytes is not a multiple of {width}",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(width)
        .map(|c| match width {
            4 => f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64,
            _ => f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]),
        })
        .collect())
}

fn split_cells(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

fn parse_csv_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cells: Vec<&str> = split_cells(line).collect();
        if cells.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(row) => values.extend(row),
            Err(_) if values.is_empty() && i == first_nonblank(text) => continue,
            Err(_) => {
                let bad = cells.iter().find(|c| c.parse::<f64>().is_err()).unwrap();
                return Err(Error::parse(i + 1, format!("non-numeric cell `{bad}`")));
            }
        }
    }
    Ok(values)
}

fn first_nonblank(text: &str) -> usize {
    text.lines().position(|l| !l.trim().is_empty()).unwrap_or(0)
}

/// Reads one scalar per line; blank lines and `#` comments are ignored.
pub fn load_scalars(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_scalars(&read_string(path)?)
}

pub fn parse_scalars(text: &str) -> Result<Vec<f64>> {
    significant_lines(text)
        .map(|(n, l)| parse_num::<f64>(l, n))
        .collect()
}

/// A CSV table with a header row and numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }
}

pub fn parse_csv_table(text: &str) -> Result<CsvTable> {
    let mut rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = rows.next().ok_or_else(|| Error::parse(1, "empty CSV"))?;
    let header: Vec<String> = header_line.split(',').map(|s| s.trim().to_string()).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (i, line) in rows {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::parse(
                i + 1,
                format!("expected {} cells, found {}", header.len(), cells.len()),
            ));
        }
        for (col, cell) in columns.iter_mut().zip(cells) {
            col.push(parse_num(cell, i + 1)?);
        }
    }
    Ok(CsvTable { header, columns })
}

pub fn load_csv_table(path: impl AsRef<Path>) -> Result<CsvTable> {
    let path = path.as_ref();
    parse_csv_table(&read_string(path)?)
}
