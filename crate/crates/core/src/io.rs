//! Mesh readers (OBJ, OFF, ascii PLY) and writers for per-vertex fields (CSV,
//! ascii PLY) and sparse matrices (Matrix Market).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::mesh::{MeshError, Point, TriMesh};
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("ParseError at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("UnsupportedElement at line {line}: {element}")]
    UnsupportedElement { line: usize, element: String },
    #[error("unsupported format '{0}'")]
    UnsupportedFormat(String),
    #[error("InvalidName: '{0}'")]
    InvalidName(String),
    #[error("column '{name}' has {got} values, expected {expected}")]
    LengthMismatch { name: String, expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn parse_error(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        ext.parse()
    }
}

impl FromStr for MeshFormat {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, IoError> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "off" => Ok(MeshFormat::Off),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(IoError::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Raw vertex positions and triangles, in file order.
pub type MeshData = (Vec<Point>, Vec<[usize; 3]>);

pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<MeshData, IoError> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = fs::read_to_string(path)?;
    parse_mesh(&text, format)
}

/// Loads and validates a mesh.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<TriMesh, IoError> {
    let (vertices, faces) = load_mesh(path, None)?;
    Ok(TriMesh::new(vertices, faces)?)
}

pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<MeshData, IoError> {
    match format {
        MeshFormat::Obj => parse_obj(text),
        MeshFormat::Off => parse_off(text),
        MeshFormat::Ply => parse_ply(text),
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64, IoError> {
    token.parse().map_err(|_| parse_error(line, format!("expected a number, found '{token}'")))
}

fn parse_usize(token: &str, line: usize) -> Result<usize, IoError> {
    token.parse().map_err(|_| parse_error(line, format!("expected an index, found '{token}'")))
}

/// Splits a polygon into a fan of triangles around its first corner.
fn fan(polygon: &[usize], line: usize, faces: &mut Vec<[usize; 3]>) -> Result<(), IoError> {
    if polygon.len() < 3 {
        return Err(parse_error(line, format!("face with {} vertices", polygon.len())));
    }
    for k in 1..polygon.len() - 1 {
        faces.push([polygon[0], polygon[k], polygon[k + 1]]);
    }
    Ok(())
}

fn parse_obj(text: &str) -> Result<MeshData, IoError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        match tag {
            "v" => {
                let coords: Vec<f64> = tokens.take(3).map(|t| parse_f64(t, line)).collect::<Result<_, _>>()?;
                if coords.len() < 3 {
                    return Err(parse_error(line, "vertex needs three coordinates"));
                }
                vertices.push(Point::new(coords[0], coords[1], coords[2]));
            }
            "f" => {
                let polygon = tokens
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        let idx: i64 = first.parse().map_err(|_| parse_error(line, format!("bad face index '{t}'")))?;
                        let n = vertices.len() as i64;
                        let resolved = if idx < 0 { n + idx } else { idx - 1 };
                        if idx == 0 || resolved < 0 || resolved >= n {
                            return Err(parse_error(line, format!("face index {idx} out of range")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                fan(&polygon, line, &mut faces)?;
            }
            "l" | "p" | "curv" | "curv2" | "surf" => {
                return Err(IoError::UnsupportedElement { line, element: tag.to_string() });
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// Non-empty, comment-free lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_off(text: &str) -> Result<MeshData, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_error(line, "expected 'OFF' header"));
    }
    let mut rest: Vec<&str> = header_tokens.collect();
    let mut count_line = line;
    if rest.is_empty() {
        let (l, counts) = lines.next().ok_or_else(|| parse_error(line, "missing element counts"))?;
        rest = counts.split_whitespace().collect();
        count_line = l;
    }
    if rest.len() < 2 {
        return Err(parse_error(count_line, "expected vertex and face counts"));
    }
    let nv = parse_usize(rest[0], count_line)?;
    let nf = parse_usize(rest[1], count_line)?;

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (l, text) = lines.next().ok_or_else(|| parse_error(count_line, format!("declared {nv} vertices, found {k}")))?;
        let c: Vec<f64> = text.split_whitespace().take(3).map(|t| parse_f64(t, l)).collect::<Result<_, _>>()?;
        if c.len() < 3 {
            return Err(parse_error(l, "vertex needs three coordinates"));
        }
        vertices.push(Point::new(c[0], c[1], c[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for k in 0..nf {
        let (l, text) = lines.next().ok_or_else(|| parse_error(count_line, format!("declared {nf} faces, found {k}")))?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let count = parse_usize(tokens[0], l)?;
        if tokens.len() < count + 1 {
            return Err(parse_error(l, format!("face declares {count} vertices")));
        }
        let polygon: Vec<usize> = tokens[1..=count].iter().map(|t| parse_usize(t, l)).collect::<Result<_, _>>()?;
        if let Some(&bad) = polygon.iter().find(|&&v| v >= nv) {
            return Err(parse_error(l, format!("face index {bad} out of range")));
        }
        fan(&polygon, l, &mut faces)?;
    }
    if let Some((l, _)) = lines.next() {
        return Err(parse_error(l, format!("content beyond the declared {nv} vertices and {nf} faces")));
    }
    Ok((vertices, faces))
}

struct PlyElement {
    name: String,
    count: usize,
    /// `(name, is_list)`
    properties: Vec<(String, bool)>,
}

fn parse_ply(text: &str) -> Result<MeshData, IoError> {
    let last_line = text.lines().count();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_error(1, "expected 'ply' magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let (l, line) = lines.next().ok_or_else(|| parse_error(last_line, "missing end_header"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first().copied() {
            Some("format") => {
                if tokens.get(1) != Some(&"ascii") {
                    return Err(IoError::UnsupportedElement { line: l, element: format!("{} PLY", tokens.get(1).unwrap_or(&"?")) });
                }
            }
            Some("element") => {
                if tokens.len() < 3 {
                    return Err(parse_error(l, "malformed element declaration"));
                }
                elements.push(PlyElement { name: tokens[1].to_string(), count: parse_usize(tokens[2], l)?, properties: Vec::new() });
            }
            Some("property") => {
                let el = elements.last_mut().ok_or_else(|| parse_error(l, "property before any element"))?;
                let is_list = tokens.get(1) == Some(&"list");
                let name = tokens.last().ok_or_else(|| parse_error(l, "unnamed property"))?;
                el.properties.push((name.to_string(), is_list));
            }
            Some("end_header") => break,
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => return Err(parse_error(l, format!("unexpected header keyword '{other}'"))),
        }
    }

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut body = lines.filter(|(_, l)| !l.is_empty());
    for el in &elements {
        for k in 0..el.count {
            let (l, line) = body.next().ok_or_else(|| parse_error(last_line, format!("declared {} {} elements, found {k}", el.count, el.name)))?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let mut pos = 0;
            let mut coords = [f64::NAN; 3];
            let mut polygon = None;
            for (name, is_list) in &el.properties {
                if *is_list {
                    let count = parse_usize(tokens.get(pos).ok_or_else(|| parse_error(l, "truncated list"))?, l)?;
                    let items = tokens.get(pos + 1..pos + 1 + count).ok_or_else(|| parse_error(l, "truncated list"))?;
                    if name == "vertex_indices" || name == "vertex_index" {
                        polygon = Some(items.iter().map(|t| parse_usize(t, l)).collect::<Result<Vec<_>, _>>()?);
                    }
                    pos += 1 + count;
                } else {
                    let token = tokens.get(pos).ok_or_else(|| parse_error(l, format!("missing property '{name}'")))?;
                    if el.name == "vertex" {
                        if let Some(axis) = ["x", "y", "z"].iter().position(|a| a == name) {
                            coords[axis] = parse_f64(token, l)?;
                        }
                    }
                    pos += 1;
                }
            }
            match el.name.as_str() {
                "vertex" => {
                    if coords.iter().any(|c| c.is_nan()) {
                        return Err(parse_error(l, "vertex without x, y, z"));
                    }
                    vertices.push(Point::new(coords[0], coords[1], coords[2]));
                }
                "face" => {
                    let polygon = polygon.ok_or_else(|| parse_error(l, "face without vertex_indices"))?;
                    fan(&polygon, l, &mut faces)?;
                }
                _ => {}
            }
        }
    }
    if let Some(&bad) = faces.iter().flatten().find(|&&v| v >= vertices.len()) {
        return Err(parse_error(last_line, format!("face index {bad} out of range")));
    }
    Ok((vertices, faces))
}

/// Positions and faces plus named per-vertex columns, ready for export.
#[derive(Debug, Clone)]
pub struct FieldExport {
    pub positions: Vec<Point>,
    pub faces: Vec<[usize; 3]>,
    columns: Vec<(String, Vec<f64>)>,
}

impl FieldExport {
    pub fn new(mesh: &TriMesh) -> Self {
        Self { positions: mesh.vertices().to_vec(), faces: mesh.faces().to_vec(), columns: Vec::new() }
    }

    /// Replaces the exported positions, e.g. with faired ones.
    pub fn with_positions(mut self, positions: Vec<Point>) -> Result<Self, IoError> {
        if positions.len() != self.positions.len() {
            return Err(IoError::LengthMismatch { name: "positions".into(), expected: self.positions.len(), got: positions.len() });
        }
        self.positions = positions;
        Ok(self)
    }

    pub fn with_column(mut self, name: &str, values: Vec<f64>) -> Result<Self, IoError> {
        let reserved = ["index", "x", "y", "z"];
        let bad_char = name.chars().any(|c| c.is_whitespace() || c == ',' || c == '"');
        if name.is_empty() || bad_char || reserved.contains(&name) || self.columns.iter().any(|(n, _)| n == name) {
            return Err(IoError::InvalidName(name.to_string()));
        }
        if values.len() != self.positions.len() {
            return Err(IoError::LengthMismatch { name: name.to_string(), expected: self.positions.len(), got: values.len() });
        }
        self.columns.push((name.to_string(), values));
        Ok(self)
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Ply,
}

impl FromStr for FieldFormat {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, IoError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(FieldFormat::Csv),
            "ply" => Ok(FieldFormat::Ply),
            other => Err(IoError::UnsupportedFormat(other.to_string())),
        }
    }
}

/// 17 significant digits, locale independent.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn save_field(export: &FieldExport, path: impl AsRef<Path>, format: FieldFormat) -> Result<(), IoError> {
    let path = path.as_ref();
    match format {
        FieldFormat::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
            let mut header = vec!["index".to_string(), "x".into(), "y".into(), "z".into()];
            header.extend(export.columns.iter().map(|(n, _)| n.clone()));
            w.write_record(&header).map_err(csv_io)?;
            for (i, p) in export.positions.iter().enumerate() {
                let mut row = vec![i.to_string(), real(p.x), real(p.y), real(p.z)];
                row.extend(export.columns.iter().map(|(_, c)| real(c[i])));
                w.write_record(&row).map_err(csv_io)?;
            }
            w.flush()?;
            Ok(())
        }
        FieldFormat::Ply => {
            let mut s = String::new();
            writeln!(s, "ply\nformat ascii 1.0\nelement vertex {}", export.positions.len()).unwrap();
            for axis in ["x", "y", "z"] {
                writeln!(s, "property double {axis}").unwrap();
            }
            for (name, _) in &export.columns {
                writeln!(s, "property double {name}").unwrap();
            }
            writeln!(s, "element face {}\nproperty list uchar int vertex_indices\nend_header", export.faces.len()).unwrap();
            for (i, p) in export.positions.iter().enumerate() {
                let mut row = vec![real(p.x), real(p.y), real(p.z)];
                row.extend(export.columns.iter().map(|(_, c)| real(c[i])));
                writeln!(s, "{}", row.join(" ")).unwrap();
            }
            for f in &export.faces {
                writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
            }
            fs::write(path, s)?;
            Ok(())
        }
    }
}

fn csv_io(e: csv::Error) -> IoError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IoError::Io(io),
        other => IoError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// A CSV field file read back: positions plus named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub positions: Vec<Point>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl FieldTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }
}

pub fn load_field(path: impl AsRef<Path>) -> Result<FieldTable, IoError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_io)?;
    let header: Vec<String> = reader.headers().map_err(csv_io)?.iter().map(str::to_string).collect();
    if header.len() < 4 || header[..4] != ["index", "x", "y", "z"] {
        return Err(parse_error(1, "expected header starting with index,x,y,z"));
    }
    let mut positions = Vec::new();
    let mut columns: Vec<(String, Vec<f64>)> = header[4..].iter().map(|n| (n.clone(), Vec::new())).collect();
    for (r, record) in reader.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| parse_error(line, e.to_string()))?;
        if record.len() != header.len() {
            return Err(parse_error(line, format!("expected {} fields, found {}", header.len(), record.len())));
        }
        if parse_usize(&record[0], line)? != r {
            return Err(parse_error(line, "vertex indices must be consecutive from 0"));
        }
        positions.push(Point::new(parse_f64(&record[1], line)?, parse_f64(&record[2], line)?, parse_f64(&record[3], line)?));
        for (k, col) in columns.iter_mut().enumerate() {
            col.1.push(parse_f64(&record[4 + k], line)?);
        }
    }
    Ok(FieldTable { positions, columns })
}

/// Reads `(vertex, value)` rows; a header row is optional.
pub fn load_constraints(path: impl AsRef<Path>) -> Result<Vec<(usize, f64)>, IoError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (line, content) in content_lines(&text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_error(line, "expected 'vertex,value'"));
        }
        if out.is_empty() && fields[0].parse::<usize>().is_err() && fields[1].parse::<f64>().is_err() {
            continue;
        }
        out.push((parse_usize(fields[0], line)?, parse_f64(fields[1], line)?));
    }
    Ok(out)
}

/// Matrix Market coordinate text; symmetric matrices store their lower triangle.
pub fn matrix_market(matrix: &SparseMatrix) -> String {
    let symmetric = matrix.nrows() == matrix.ncols() && matrix.is_symmetric();
    let entries: Vec<(usize, usize, f64)> = matrix.triplets().filter(|&(r, c, _)| !symmetric || r >= c).collect();
    let mut s = String::new();
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(s, "%%MatrixMarket matrix coordinate real {kind}").unwrap();
    writeln!(s, "{} {} {}", matrix.nrows(), matrix.ncols(), entries.len()).unwrap();
    for (r, c, v) in entries {
        writeln!(s, "{} {} {}", r + 1, c + 1, real(v)).unwrap();
    }
    s
}

pub fn save_matrix(matrix: &SparseMatrix, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, matrix_market(matrix))?;
    Ok(())
}

pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
    let banner: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if banner.len() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" || banner[2] != "coordinate" || banner[3] != "real" {
        return Err(parse_error(1, "expected '%%MatrixMarket matrix coordinate real <symmetry>'"));
    }
    let symmetric = match banner[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(IoError::UnsupportedElement { line: 1, element: other.to_string() }),
    };
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sl, size) = body.next().ok_or_else(|| parse_error(2, "missing size line"))?;
    let dims: Vec<usize> = size.split_whitespace().map(|t| parse_usize(t, sl)).collect::<Result<_, _>>()?;
    if dims.len() != 3 {
        return Err(parse_error(sl, "expected 'rows cols entries'"));
    }
    let mut triplets = Vec::with_capacity(dims[2] * if symmetric { 2 } else { 1 });
    for k in 0..dims[2] {
        let (l, line) = body.next().ok_or_else(|| parse_error(sl, format!("declared {} entries, found {k}", dims[2])))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_error(l, "expected 'row col value'"));
        }
        let (r, c) = (parse_usize(t[0], l)?, parse_usize(t[1], l)?);
        if r == 0 || c == 0 || r > dims[0] || c > dims[1] {
            return Err(parse_error(l, "entry outside the matrix"));
        }
        let v = parse_f64(t[2], l)?;
        triplets.push((r - 1, c - 1, v));
        if symmetric && r != c {
            triplets.push((c - 1, r - 1, v));
        }
    }
    Ok(SparseMatrix::from_triplets(dims[0], dims[1], triplets))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<SparseMatrix, IoError> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_obj() {
        let (v, f) = parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", MeshFormat::Obj).unwrap();
        assert_eq!((v.len(), f), (3, vec![[0, 1, 2]]));
    }

    #[test]
    fn obj_slashes_negative_indices_and_quads() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2//1 -2 -1\n";
        let (_, f) = parse_mesh(text, MeshFormat::Obj).unwrap();
        assert_eq!(f, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_rejects_polylines_and_bad_indices() {
        let err = parse_mesh("v 0 0 0\nv 1 0 0\nl 1 2\n", MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, IoError::UnsupportedElement { line: 3, .. }));
        let err = parse_mesh("v 0 0 0\nf 1 2 3\n", MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }));
    }

    #[test]
    fn off_counts_are_checked() {
        let good = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert_eq!(parse_mesh(good, MeshFormat::Off).unwrap().1, vec![[0, 1, 2]]);
        let short = "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(matches!(parse_mesh(short, MeshFormat::Off), Err(IoError::Parse { .. })));
        let long = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n3 0 1 2\n";
        assert!(matches!(parse_mesh(long, MeshFormat::Off), Err(IoError::Parse { line: 7, .. })));
    }

    #[test]
    fn ply_ignores_extra_properties() {
        let text = "ply\nformat ascii 1.0\ncomment test\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nproperty float quality\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 0.5\n1 0 0 0.25\n0 1 0 1\n3 0 1 2\n";
        let (v, f) = parse_mesh(text, MeshFormat::Ply).unwrap();
        assert_eq!(v[1], Point::new(1.0, 0.0, 0.0));
        assert_eq!(f, vec![[0, 1, 2]]);
        let binary = text.replace("format ascii", "format binary_little_endian");
        assert!(matches!(parse_mesh(&binary, MeshFormat::Ply), Err(IoError::UnsupportedElement { .. })));
    }

    #[test]
    fn matrix_market_identity_and_empty() {
        let text = matrix_market(&SparseMatrix::identity(2));
        assert_eq!(text, "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0000000000000000e0\n2 2 1.0000000000000000e0\n");
        let empty = matrix_market(&SparseMatrix::zeros(3, 3));
        assert_eq!(empty.lines().count(), 2);
        let general = SparseMatrix::from_triplets(2, 3, vec![(0, 2, 1.5), (1, 0, -2.0)]);
        assert_eq!(parse_matrix_market(&matrix_market(&general)).unwrap(), general);
        let sym = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 0.1), (1, 0, 0.1), (1, 1, 3.0)]);
        assert_eq!(parse_matrix_market(&matrix_market(&sym)).unwrap(), sym);
    }

    #[test]
    fn column_names_are_validated() {
        let m = TriMesh::new(vec![Point::zeros(), Point::x(), Point::y()], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(FieldExport::new(&m).with_column("", vec![0.0; 3]), Err(IoError::InvalidName(_))));
        let e = FieldExport::new(&m).with_column("u", vec![0.0; 3]).unwrap();
        assert!(matches!(e.clone().with_column("u", vec![0.0; 3]), Err(IoError::InvalidName(_))));
        assert!(matches!(e.with_column("v", vec![0.0; 2]), Err(IoError::LengthMismatch { .. })));
    }
}
