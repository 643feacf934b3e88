//! File formats: operator JSON, point/band/count CSVs and ASCII PLY meshes.

use std::fs;
use std::io::Write;
use std::path::Path;

use jnr_core::herm::HermitianOperator;
use jnr_core::hull::{Hull, HullMesh};
use jnr_core::range::OperatorTuple;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const POINTS_HEADER: [&str; 7] = ["theta", "phi", "x", "y", "z", "energy", "gap"];
pub const PROJECTED_HEADER: [&str; 4] = ["theta", "phi", "u", "v"];
pub const PREP_HEADER: [&str; 4] = ["theta_a", "theta_b", "phi1", "phi2"];
pub const COUNTS_HEADER: [&str; 17] = [
    "state",
    "operator",
    "shots",
    "n0",
    "n1",
    "n2",
    "p0",
    "p1",
    "p2",
    "q0",
    "q1",
    "q2",
    "lambda0",
    "lambda1",
    "lambda2",
    "expectation",
    "theory",
];
pub const SIMILARITY_HEADER: [&str; 3] = ["state", "operator", "similarity"];
pub const LEVELS_HEADER: [&str; 4] = ["angle", "level", "x", "y"];

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One Hermitian operator as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFileV1 {
    pub dim: usize,
    pub operators: Vec<OperatorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl OperatorFileV1 {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input {
            message: format!("operator file: {e}"),
            line: Some(e.line() as u64),
            column: Some(e.column() as u64),
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_tuple(t: &OperatorTuple, labels: Option<Vec<String>>) -> Self {
        let d = t.dim();
        let operators = t
            .ops()
            .iter()
            .map(|f| OperatorEntry {
                re: (0..d)
                    .map(|i| (0..d).map(|j| f.entry(i, j).re).collect())
                    .collect(),
                im: (0..d)
                    .map(|i| (0..d).map(|j| f.entry(i, j).im).collect())
                    .collect(),
            })
            .collect();
        Self {
            dim: d,
            operators,
            labels,
        }
    }

    fn name(&self, k: usize) -> String {
        match self.labels.as_ref().and_then(|l| l.get(k)) {
            Some(label) => format!("operator {k} ({label})"),
            None => format!("operator {k}"),
        }
    }

    /// Validated tuple; Hermiticity is checked entry by entry at 1e-12.
    pub fn to_tuple(&self) -> CliResult<OperatorTuple> {
        if self.operators.is_empty() {
            return Err(CliError::input("operator file lists no operators"));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.operators.len() {
                return Err(CliError::input(format!(
                    "{} labels for {} operators",
                    labels.len(),
                    self.operators.len()
                )));
            }
        }
        let d = self.dim;
        let mut ops = Vec::with_capacity(self.operators.len());
        for (k, op) in self.operators.iter().enumerate() {
            for (part, m) in [("re", &op.re), ("im", &op.im)] {
                if m.len() != d || m.iter().any(|row| row.len() != d) {
                    return Err(CliError::input(format!(
                        "{}: {part} is not {d}x{d}",
                        self.name(k)
                    )));
                }
            }
            let f = HermitianOperator::from_parts(&op.re, &op.im)
                .map_err(|e| CliError::input(format!("{}: {e}", self.name(k))))?;
            ops.push(f);
        }
        Ok(OperatorTuple::new(ops)?)
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("operator file serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

fn create(path: &Path) -> CliResult<fs::File> {
    fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Writes rows of pre-formatted fields under `header`.
pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Opens `path` for writing, or standard output when `path` is `None`.
pub fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn read_records(path: &Path) -> CliResult<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

fn field(row: &csv::StringRecord, idx: usize, line: usize, name: &str) -> CliResult<Option<f64>> {
    let s = row.get(idx).unwrap_or("").trim();
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|_| CliError::Input {
        message: format!("column {name}: cannot parse {s:?} as a number"),
        line: Some(line as u64),
        column: Some(idx as u64 + 1),
    })
}

/// Points of a sample or projection CSV. Returns the dimension (2 or 3),
/// the coordinates and the `(theta, phi)` columns, blank entries as NaN.
pub fn read_points(path: &Path) -> CliResult<(usize, Vec<Vec<f64>>, Vec<[f64; 2]>)> {
    let (header, rows) = read_records(path)?;
    let names: &[&str] = if column(&header, "u").is_some() {
        &["u", "v"]
    } else {
        &["x", "y", "z"]
    };
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            column(&header, n)
                .ok_or_else(|| CliError::input(format!("{}: missing column {n}", path.display())))
        })
        .collect::<CliResult<_>>()?;
    let angle = |row: &csv::StringRecord, line, name| -> CliResult<f64> {
        Ok(match column(&header, name) {
            Some(i) => field(row, i, line, name)?.unwrap_or(f64::NAN),
            None => f64::NAN,
        })
    };
    let mut points = Vec::with_capacity(rows.len());
    let mut angles = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let line = k + 2;
        let vals: Vec<Option<f64>> = idx
            .iter()
            .zip(names)
            .map(|(&i, n)| field(row, i, line, n))
            .collect::<CliResult<_>>()?;
        points.push(vals);
        angles.push([angle(row, line, "theta")?, angle(row, line, "phi")?]);
    }
    let blank_z = names.len() == 3 && points.iter().all(|p| p[2].is_none());
    let dim = if names.len() == 2 || blank_z { 2 } else { 3 };
    let coords = points
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            p[..dim]
                .iter()
                .map(|x| {
                    x.ok_or_else(|| CliError::Input {
                        message: "blank coordinate".into(),
                        line: Some(k as u64 + 2),
                        column: None,
                    })
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<_>>()?;
    Ok((dim, coords, angles))
}

/// Rows of a preparation-angle CSV.
pub fn read_prep(path: &Path) -> CliResult<Vec<[f64; 4]>> {
    let (header, rows) = read_records(path)?;
    let idx: Vec<usize> = PREP_HEADER
        .iter()
        .map(|n| {
            column(&header, n)
                .ok_or_else(|| CliError::input(format!("{}: missing column {n}", path.display())))
        })
        .collect::<CliResult<_>>()?;
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            let mut out = [0.0; 4];
            for (slot, (&i, n)) in out.iter_mut().zip(idx.iter().zip(PREP_HEADER)) {
                *slot = field(row, i, k + 2, n)?.ok_or_else(|| CliError::Input {
                    message: format!("column {n} is blank"),
                    line: Some(k as u64 + 2),
                    column: Some(i as u64 + 1),
                })?;
            }
            Ok(out)
        })
        .collect()
}

/// Vertices and triangles in ambient coordinates; polygons are fanned.
pub fn hull_geometry(hull: &Hull) -> (Vec<[f64; 3]>, Vec<[usize; 3]>, usize) {
    fn lift(p: &[f64]) -> [f64; 3] {
        [p[0], p[1], p.get(2).copied().unwrap_or(0.0)]
    }
    fn fan(n: usize) -> Vec<[usize; 3]> {
        (1..n.saturating_sub(1)).map(|k| [0, k, k + 1]).collect()
    }
    fn polygon(m: &HullMesh, map: impl Fn(&[f64]) -> [f64; 3]) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
        let verts: Vec<[f64; 3]> = m.polygon().iter().map(|&i| map(&m.vertices[i])).collect();
        let n = verts.len();
        (verts, fan(n))
    }
    match hull {
        Hull::Full(m) if m.dim == 3 => {
            let faces = m.faces.iter().map(|f| [f[0], f[1], f[2]]).collect();
            (m.vertices.iter().map(|v| lift(v)).collect(), faces, 3)
        }
        Hull::Full(m) => {
            let (v, f) = polygon(m, lift);
            (v, f, 2)
        }
        Hull::Degenerate(d) => match &d.inner {
            Some(inner) => {
                let (v, f) = polygon(inner, |c| {
                    let mut p = d.origin.clone();
                    for (b, x) in d.basis.iter().zip(c) {
                        for (pi, bi) in p.iter_mut().zip(b) {
                            *pi += x * bi;
                        }
                    }
                    lift(&p)
                });
                (v, f, d.affine_rank)
            }
            None => (
                d.vertices.iter().map(|v| lift(v)).collect(),
                Vec::new(),
                d.affine_rank,
            ),
        },
    }
}

/// ASCII PLY with double vertices and triangle faces.
pub fn write_ply(out: &mut dyn Write, hull: &Hull) -> CliResult<()> {
    let (verts, faces, rank) = hull_geometry(hull);
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    s.push_str(&format!("comment affine_rank {rank}\n"));
    s.push_str(&format!(
        "element vertex {}\nproperty double x\nproperty double y\nproperty double z\n",
        verts.len()
    ));
    s.push_str(&format!(
        "element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        faces.len()
    ));
    for v in &verts {
        s.push_str(&format!("{} {} {}\n", num(v[0]), num(v[1]), num(v[2])));
    }
    for f in &faces {
        s.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
    }
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use jnr_core::fixtures;

    #[test]
    fn operator_file_round_trip() {
        let t = fixtures::class(6);
        let f = OperatorFileV1::from_tuple(&t, Some(vec!["a".into(), "b".into(), "c".into()]));
        let text = serde_json::to_string_pretty(&f).unwrap();
        let back = OperatorFileV1::parse(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_tuple().unwrap(), t);
        assert_eq!(back.digest(), f.digest());
    }

    #[test]
    fn broken_hermiticity_names_the_entry() {
        let text = r#"{"dim":2,"operators":[{"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]},{"re":[[0,1],[0.5,0]],"im":[[0,0],[0,0]]}],"labels":["A","B"]}"#;
        let err = OperatorFileV1::parse(text).unwrap().to_tuple().unwrap_err();
        let msg = err.message();
        assert!(
            msg.contains("operator 1 (B)") && msg.contains("(0,1)"),
            "{msg}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = OperatorFileV1::parse("{\n  \"dim\": 3,\n  \"operators\": [,]\n}").unwrap_err();
        match err {
            CliError::Input { line, column, .. } => {
                assert_eq!((line, column.is_some()), (Some(3), true))
            }
            _ => panic!(),
        }
    }

    #[test]
    fn numbers_keep_seventeen_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }
}
