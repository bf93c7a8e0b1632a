//! Wavefront OBJ and PLY readers/writers.
//!
//! Polygons are fan-triangulated on input. OBJ `usemtl` names matching a
//! [`Material`] are carried as per-face material tags, and `g`/`o` names become
//! region labels. PLY input may be `ascii` or `binary_little_endian`; output is
//! always ASCII with `double` coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::mesh::{FaceAttr, Material, TriangleMesh};
use super::vector::{Vec2, Vec3};
use super::MeshError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, MeshError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            _ => Err(MeshError::UnsupportedFormat(path.to_path_buf())),
        }
    }
}

/// Reads a mesh, choosing the parser from the file extension.
pub fn load_mesh<S: Real>(path: &Path) -> Result<TriangleMesh<S>, MeshError> {
    let format = MeshFormat::from_path(path)?;
    let bytes = fs::read(path).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        MeshFormat::Obj => {
            let text = String::from_utf8(bytes).map_err(|_| MeshError::Parse {
                line: 0,
                message: "file is not valid UTF-8".into(),
            })?;
            parse_obj(&text)
        }
        MeshFormat::Ply => parse_ply(&bytes),
    }
}

/// Writes a mesh, choosing the format from the file extension.
pub fn save_mesh<S: Real>(mesh: &TriangleMesh<S>, path: &Path) -> Result<(), MeshError> {
    mesh.validate()?;
    let format = MeshFormat::from_path(path)?;
    let text = match format {
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh),
    };
    let io_err = |source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_floats<S: Real, const N: usize>(
    tokens: &mut std::str::SplitWhitespace<'_>,
    line: usize,
    what: &str,
) -> Result<[S; N], MeshError> {
    let mut out = [S::zero(); N];
    for slot in out.iter_mut() {
        let tok = tokens
            .next()
            .ok_or_else(|| parse_err(line, format!("{what}: expected {N} numbers")))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| parse_err(line, format!("{what}: bad number {tok:?}")))?;
        *slot = S::lit(v);
    }
    Ok(out)
}

/// Resolves a 1-based (or negative, relative) OBJ index.
fn obj_index(tok: &str, count: usize, line: usize) -> Result<usize, i64> {
    let _ = line;
    let i: i64 = tok.parse().map_err(|_| i64::MIN)?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        return Err(i64::MIN);
    };
    if resolved < 0 || resolved as usize >= count {
        return Err(resolved);
    }
    Ok(resolved as usize)
}

/// Maps an index failure from [`obj_index`] to a mesh error.
fn index_error(tok: &str, resolved: i64, count: usize, face: usize, line: usize, what: &str) -> MeshError {
    if resolved == i64::MIN {
        parse_err(line, format!("bad {what} index {tok:?}"))
    } else if what == "vertex" && resolved >= 0 {
        MeshError::FaceIndexOutOfRange {
            face,
            index: resolved as usize,
            vertex_count: count,
        }
    } else {
        parse_err(line, format!("{what} index {tok:?} out of range ({count} defined)"))
    }
}

type Corner = (usize, Option<usize>, Option<usize>);

struct ObjFace {
    corners: [Corner; 3],
    material: Material,
    region: Option<String>,
}

pub fn parse_obj<S: Real>(text: &str) -> Result<TriangleMesh<S>, MeshError> {
    let mut pos: Vec<Vec3<S>> = Vec::new();
    let mut tex: Vec<Vec2<S>> = Vec::new();
    let mut nrm: Vec<Vec3<S>> = Vec::new();
    let mut faces: Vec<ObjFace> = Vec::new();
    let mut material = Material::Generic;
    let mut region: Option<String> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap_or_default();
        match keyword {
            "v" => {
                let [x, y, z] = parse_floats::<S, 3>(&mut tokens, line, "vertex")?;
                pos.push(Vec3::new(x, y, z));
            }
            "vt" => {
                let [u, v] = parse_floats::<S, 2>(&mut tokens, line, "texture coordinate")?;
                tex.push(Vec2::new(u, v));
            }
            "vn" => {
                let [x, y, z] = parse_floats::<S, 3>(&mut tokens, line, "normal")?;
                nrm.push(Vec3::new(x, y, z));
            }
            "f" => {
                let mut corners = Vec::new();
                let face = faces.len();
                for tok in tokens {
                    let mut parts = tok.split('/');
                    let vs = parts.next().unwrap_or("");
                    let v = obj_index(vs, pos.len(), line)
                        .map_err(|r| index_error(vs, r, pos.len(), face, line, "vertex"))?;
                    let vt = match parts.next() {
                        Some("") | None => None,
                        Some(t) => Some(
                            obj_index(t, tex.len(), line)
                                .map_err(|r| index_error(t, r, tex.len(), face, line, "texture"))?,
                        ),
                    };
                    let vn = match parts.next() {
                        Some("") | None => None,
                        Some(t) => Some(
                            obj_index(t, nrm.len(), line)
                                .map_err(|r| index_error(t, r, nrm.len(), face, line, "normal"))?,
                        ),
                    };
                    corners.push((v, vt, vn));
                }
                if corners.len() < 3 {
                    return Err(parse_err(line, "face needs at least 3 vertices"));
                }
                for k in 1..corners.len() - 1 {
                    faces.push(ObjFace {
                        corners: [corners[0], corners[k], corners[k + 1]],
                        material,
                        region: region.clone(),
                    });
                }
            }
            "usemtl" => {
                material = tokens
                    .next()
                    .and_then(Material::parse)
                    .unwrap_or(Material::Generic);
            }
            "g" | "o" => {
                region = tokens.next().map(str::to_owned);
            }
            "mtllib" | "s" | "l" | "p" => {}
            other => return Err(parse_err(line, format!("unknown statement {other:?}"))),
        }
    }
    if faces.is_empty() {
        return Err(MeshError::NoFaces);
    }

    let has_uv = faces.iter().all(|f| f.corners.iter().all(|c| c.1.is_some()));
    let has_n = faces.iter().all(|f| f.corners.iter().all(|c| c.2.is_some()));
    // when every attribute index equals the position index the file order is kept
    let aligned = faces.iter().all(|f| {
        f.corners.iter().all(|&(v, t, n)| {
            (!has_uv || t == Some(v)) && (!has_n || n == Some(v))
        })
    }) && (!has_uv || tex.len() >= pos.len())
        && (!has_n || nrm.len() >= pos.len());

    let (positions, uvs, normals, tris) = if aligned {
        let tris: Vec<[u32; 3]> = faces
            .iter()
            .map(|f| f.corners.map(|c| c.0 as u32))
            .collect();
        let uvs = has_uv.then(|| tex[..pos.len()].to_vec());
        let normals = has_n.then(|| nrm[..pos.len()].to_vec());
        (pos, uvs, normals, tris)
    } else {
        let mut map: HashMap<(usize, Option<usize>, Option<usize>), u32> = HashMap::new();
        let mut positions = Vec::new();
        let mut uvs = Vec::new();
        let mut normals = Vec::new();
        let mut tris = Vec::with_capacity(faces.len());
        for f in &faces {
            let mut tri = [0u32; 3];
            for (k, &(v, t, n)) in f.corners.iter().enumerate() {
                let key = (v, if has_uv { t } else { None }, if has_n { n } else { None });
                tri[k] = *map.entry(key).or_insert_with(|| {
                    positions.push(pos[v]);
                    if has_uv {
                        uvs.push(tex[t.unwrap_or(0)]);
                    }
                    if has_n {
                        normals.push(nrm[n.unwrap_or(0)]);
                    }
                    (positions.len() - 1) as u32
                });
            }
            tris.push(tri);
        }
        (
            positions,
            has_uv.then_some(uvs),
            has_n.then_some(normals),
            tris,
        )
    };

    let mut mesh = TriangleMesh::from_parts(positions, normals, uvs, tris)?;
    for (i, f) in faces.iter().enumerate() {
        mesh.set_face_attr(
            i,
            FaceAttr {
                material: f.material,
                ..FaceAttr::default()
            },
        );
    }
    if faces.iter().any(|f| f.region.is_some()) {
        let labels: Vec<Option<String>> = faces.iter().map(|f| f.region.clone()).collect();
        mesh.set_regions(&labels)?;
    }
    Ok(mesh)
}

pub fn write_obj<S: Real>(mesh: &TriangleMesh<S>) -> String {
    let mut out = String::new();
    out.push_str("# crackforge mesh\n");
    for p in mesh.positions() {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for t in mesh.uvs() {
        let _ = writeln!(out, "vt {} {}", t.x, t.y);
    }
    for n in mesh.normals() {
        let _ = writeln!(out, "vn {} {} {}", n.x, n.y, n.z);
    }
    let mut material = None;
    let mut region: Option<Option<&str>> = None;
    for (i, f) in mesh.faces().iter().enumerate() {
        let r = mesh.face_region(i);
        if region != Some(r) {
            if let Some(name) = r {
                let _ = writeln!(out, "g {name}");
            } else if region.is_some() {
                out.push_str("g\n");
            }
            region = Some(r);
        }
        let m = mesh.face_material(i);
        if material != Some(m) {
            let _ = writeln!(out, "usemtl {}", m.as_str());
            material = Some(m);
        }
        let [a, b, c] = f.map(|i| i + 1);
        let _ = writeln!(out, "f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}");
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PlyEncoding {
    Ascii,
    BinaryLe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PlyType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => PlyType::I8,
            "uchar" | "uint8" => PlyType::U8,
            "short" | "int16" => PlyType::I16,
            "ushort" | "uint16" => PlyType::U16,
            "int" | "int32" => PlyType::I32,
            "uint" | "uint32" => PlyType::U32,
            "float" | "float32" => PlyType::F32,
            "double" | "float64" => PlyType::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            PlyType::I8 | PlyType::U8 => 1,
            PlyType::I16 | PlyType::U16 => 2,
            PlyType::I32 | PlyType::U32 | PlyType::F32 => 4,
            PlyType::F64 => 8,
        }
    }
}

#[derive(Clone, Debug)]
enum PlyProperty {
    Scalar(String, PlyType),
    List(String, PlyType, PlyType),
}

#[derive(Clone, Debug)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

/// Cursor over the PLY body for either encoding.
struct PlyBody<'a> {
    encoding: PlyEncoding,
    bytes: &'a [u8],
    offset: usize,
    line: usize,
    tokens: std::vec::IntoIter<&'a str>,
}

impl<'a> PlyBody<'a> {
    fn next_record(&mut self) -> Result<(), MeshError> {
        if self.encoding != PlyEncoding::Ascii {
            return Ok(());
        }
        loop {
            if self.offset >= self.bytes.len() {
                return Err(parse_err(self.line, "unexpected end of file"));
            }
            let rest = &self.bytes[self.offset..];
            let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
            let line = std::str::from_utf8(&rest[..end])
                .map_err(|_| parse_err(self.line + 1, "invalid UTF-8"))?;
            self.offset += end + 1;
            self.line += 1;
            let toks: Vec<&'a str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                self.tokens = toks.into_iter();
                return Ok(());
            }
        }
    }

    fn end_record(&mut self) -> Result<(), MeshError> {
        if self.encoding == PlyEncoding::Ascii && self.tokens.len() != 0 {
            return Err(parse_err(self.line, "trailing values in record"));
        }
        Ok(())
    }

    fn read(&mut self, ty: PlyType) -> Result<f64, MeshError> {
        match self.encoding {
            PlyEncoding::Ascii => {
                let tok = self
                    .tokens
                    .next()
                    .ok_or_else(|| parse_err(self.line, "too few values in record"))?;
                tok.parse::<f64>()
                    .map_err(|_| parse_err(self.line, format!("bad number {tok:?}")))
            }
            PlyEncoding::BinaryLe => {
                let n = ty.size();
                let b = self
                    .bytes
                    .get(self.offset..self.offset + n)
                    .ok_or_else(|| parse_err(self.line, "unexpected end of binary data"))?;
                self.offset += n;
                Ok(match ty {
                    PlyType::I8 => b[0] as i8 as f64,
                    PlyType::U8 => b[0] as f64,
                    PlyType::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
                    PlyType::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
                    PlyType::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    PlyType::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    PlyType::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
                    PlyType::F64 => f64::from_le_bytes(b.try_into().expect("8 bytes")),
                })
            }
        }
    }
}

pub fn parse_ply<S: Real>(bytes: &[u8]) -> Result<TriangleMesh<S>, MeshError> {
    // header is ASCII up to and including "end_header\n"
    let marker = b"end_header";
    let header_end = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| parse_err(1, "missing end_header"))?;
    let body_start = bytes[header_end..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| header_end + p + 1)
        .unwrap_or(bytes.len());
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| parse_err(1, "header is not ASCII"))?;

    let mut lines = header.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(parse_err(1, "missing 'ply' magic")),
    }
    let mut encoding = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut header_lines = 1;
    for (ln, l) in lines {
        header_lines = ln + 1;
        let line = ln + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", enc, _version] => {
                encoding = Some(match *enc {
                    "ascii" => PlyEncoding::Ascii,
                    "binary_little_endian" => PlyEncoding::BinaryLe,
                    other => {
                        return Err(parse_err(line, format!("unsupported PLY encoding {other:?}")))
                    }
                });
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_err(line, "bad element count"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", cty, ity, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "property before element"))?;
                let cty = PlyType::parse(cty).ok_or_else(|| parse_err(line, "bad list count type"))?;
                let ity = PlyType::parse(ity).ok_or_else(|| parse_err(line, "bad list item type"))?;
                el.properties.push(PlyProperty::List(name.to_string(), cty, ity));
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "property before element"))?;
                let ty = PlyType::parse(ty).ok_or_else(|| parse_err(line, "bad property type"))?;
                el.properties.push(PlyProperty::Scalar(name.to_string(), ty));
            }
            _ => return Err(parse_err(line, format!("unrecognised header line {l:?}"))),
        }
    }
    let encoding = encoding.ok_or_else(|| parse_err(1, "missing format line"))?;

    let mut body = PlyBody {
        encoding,
        bytes: &bytes[body_start..],
        offset: 0,
        line: header_lines + 1,
        tokens: Vec::new().into_iter(),
    };

    let mut positions: Vec<Vec3<S>> = Vec::new();
    let mut normals: Vec<Vec3<S>> = Vec::new();
    let mut uvs: Vec<Vec2<S>> = Vec::new();
    let mut tris: Vec<[u32; 3]> = Vec::new();
    let mut has_normals = false;
    let mut has_uvs = false;

    for el in &elements {
        let names: Vec<&str> = el
            .properties
            .iter()
            .map(|p| match p {
                PlyProperty::Scalar(n, _) | PlyProperty::List(n, _, _) => n.as_str(),
            })
            .collect();
        if el.name == "vertex" {
            has_normals = ["nx", "ny", "nz"].iter().all(|n| names.contains(n));
            has_uvs = (names.contains(&"s") && names.contains(&"t"))
                || (names.contains(&"u") && names.contains(&"v"))
                || (names.contains(&"texture_u") && names.contains(&"texture_v"));
            for _ in 0..el.count {
                body.next_record()?;
                let mut vals: HashMap<&str, f64> = HashMap::new();
                for p in &el.properties {
                    match p {
                        PlyProperty::Scalar(n, ty) => {
                            vals.insert(n.as_str(), body.read(*ty)?);
                        }
                        PlyProperty::List(_, cty, ity) => {
                            let k = body.read(*cty)? as usize;
                            for _ in 0..k {
                                body.read(*ity)?;
                            }
                        }
                    }
                }
                body.end_record()?;
                let get = |n: &str| vals.get(n).copied().unwrap_or(0.0);
                positions.push(Vec3::from_f64([get("x"), get("y"), get("z")]));
                if has_normals {
                    normals.push(Vec3::from_f64([get("nx"), get("ny"), get("nz")]));
                }
                if has_uvs {
                    let (u, v) = if vals.contains_key("s") {
                        (get("s"), get("t"))
                    } else if vals.contains_key("u") {
                        (get("u"), get("v"))
                    } else {
                        (get("texture_u"), get("texture_v"))
                    };
                    uvs.push(Vec2::new(S::lit(u), S::lit(v)));
                }
            }
        } else if el.name == "face" {
            for _ in 0..el.count {
                body.next_record()?;
                let line = body.line;
                let mut poly: Vec<u32> = Vec::new();
                for p in &el.properties {
                    match p {
                        PlyProperty::List(n, cty, ity)
                            if n == "vertex_indices" || n == "vertex_index" =>
                        {
                            let k = body.read(*cty)? as usize;
                            for _ in 0..k {
                                let v = body.read(*ity)?;
                                if v < 0.0 || v.fract() != 0.0 {
                                    return Err(parse_err(line, format!("bad vertex index {v}")));
                                }
                                poly.push(v as u32);
                            }
                        }
                        PlyProperty::List(_, cty, ity) => {
                            let k = body.read(*cty)? as usize;
                            for _ in 0..k {
                                body.read(*ity)?;
                            }
                        }
                        PlyProperty::Scalar(_, ty) => {
                            body.read(*ty)?;
                        }
                    }
                }
                body.end_record()?;
                if poly.len() < 3 {
                    return Err(parse_err(line, "face needs at least 3 vertices"));
                }
                for k in 1..poly.len() - 1 {
                    tris.push([poly[0], poly[k], poly[k + 1]]);
                }
            }
        } else {
            // skip unknown elements record by record
            for _ in 0..el.count {
                body.next_record()?;
                for p in &el.properties {
                    match p {
                        PlyProperty::Scalar(_, ty) => {
                            body.read(*ty)?;
                        }
                        PlyProperty::List(_, cty, ity) => {
                            let k = body.read(*cty)? as usize;
                            for _ in 0..k {
                                body.read(*ity)?;
                            }
                        }
                    }
                }
                body.end_record()?;
            }
        }
    }

    TriangleMesh::from_parts(
        positions,
        has_normals.then_some(normals),
        has_uvs.then_some(uvs),
        tris,
    )
}

pub fn write_ply<S: Real>(mesh: &TriangleMesh<S>) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\ncomment crackforge mesh\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertex_count());
    for p in ["x", "y", "z", "nx", "ny", "nz", "s", "t"] {
        let _ = writeln!(out, "property double {p}");
    }
    let _ = writeln!(out, "element face {}", mesh.face_count());
    out.push_str("property list uchar uint vertex_indices\nend_header\n");
    for ((p, n), t) in mesh.positions().iter().zip(mesh.normals()).zip(mesh.uvs()) {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            p.x, p.y, p.z, n.x, n.y, n.z, t.x, t.y
        );
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: &str = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";

    #[test]
    fn single_triangle_obj() {
        let m: TriangleMesh<f64> = parse_obj(TRI).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.face_count(), 1);
    }

    #[test]
    fn out_of_range_obj_index() {
        let err = parse_obj::<f64>("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 6\n").unwrap_err();
        assert!(matches!(err, MeshError::FaceIndexOutOfRange { index: 5, vertex_count: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_obj::<f64>("v 0 0 0\nv 1 x 0\n").unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn zero_faces_rejected() {
        assert!(matches!(parse_obj::<f64>("v 0 0 0\n"), Err(MeshError::NoFaces)));
    }

    #[test]
    fn quads_are_fan_triangulated() {
        let m: TriangleMesh<f64> = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn negative_indices_and_split_attributes() {
        let src = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nvt 0.5 0.5\nf -3/4 -2/2 -1/3\n";
        let m: TriangleMesh<f64> = parse_obj(src).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.uvs()[0], Vec2::new(0.5, 0.5));
    }

    #[test]
    fn usemtl_and_groups() {
        let src = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\ng wall\nusemtl masonry\nf 1 2 3\ng\nusemtl bogus\nf 2 4 3\n";
        let m: TriangleMesh<f64> = parse_obj(src).unwrap();
        assert_eq!(m.face_material(0), Material::Masonry);
        assert_eq!(m.face_material(1), Material::Generic);
        assert_eq!(m.face_region(0), Some("wall"));
        assert_eq!(m.face_region(1), None);
    }

    #[test]
    fn ply_ascii_with_quad() {
        let src = b"ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let m: TriangleMesh<f64> = parse_ply(src).unwrap();
        assert_eq!(m.face_count(), 2);
    }

    #[test]
    fn ply_binary_little_endian() {
        let mut src = b"ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n".to_vec();
        for v in [[0f32, 0., 0.], [1., 0., 0.], [0., 1., 0.]] {
            for c in v {
                src.extend_from_slice(&c.to_le_bytes());
            }
        }
        src.push(3);
        for i in [0i32, 1, 2] {
            src.extend_from_slice(&i.to_le_bytes());
        }
        let m: TriangleMesh<f64> = parse_ply(&src).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.positions()[1], Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn ply_out_of_range() {
        let src = b"ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n";
        assert!(matches!(
            parse_ply::<f64>(src),
            Err(MeshError::FaceIndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn ply_truncated_body_reports_line() {
        let src = b"ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0\n";
        assert!(matches!(parse_ply::<f64>(src), Err(MeshError::Parse { .. })));
    }
}
