//! Reading and writing point clouds, diagrams, manifests, Gram matrices and
//! predictions.
//!
//! * point clouds: CSV without header, one point per row;
//! * diagrams: CSV with header `dim,birth,death`, one point per row;
//! * manifests: `manifest.json` listing diagram files in sample order;
//! * Gram matrices: dense row-major CSV plus a JSON sidecar with provenance;
//! * predictions: CSV `sample_id,true,predicted`.
//!
//! Floats are written in Rust's shortest round-trip form, so files can be
//! read back bit for bit and reruns produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::kernels::{GramMatrix, GramProvenance};

pub const MANIFEST_FILE: &str = "manifest.json";

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    match field.trim() {
        "inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        s => s
            .parse()
            .map_err(|_| parse_err(path, format!("line {line}: `{s}` is not a number"))),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => parse_err(path, format!("{kind:?}")),
    }
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .map(|f| parse_f64(path, line + 1, f))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    PointCloud::new(rows).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_point_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a diagram file. `dim` is used for files without rows; otherwise
/// every row must carry it.
pub fn read_diagram(path: &Path, dim: usize) -> Result<PersistenceDiagram> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["dim", "birth", "death"] {
        return Err(parse_err(path, "expected the header `dim,birth,death`"));
    }
    let mut points = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = line + 2;
        let d: usize = rec[0]
            .parse()
            .map_err(|_| parse_err(path, format!("line {line}: bad dimension `{}`", &rec[0])))?;
        if d != dim {
            return Err(parse_err(path, format!("line {line}: dimension {d}, expected {dim}")));
        }
        let (b, de) = (parse_f64(path, line, &rec[1])?, parse_f64(path, line, &rec[2])?);
        if de.is_infinite() {
            return Err(parse_err(
                path,
                format!("line {line}: essential classes must be capped before use"),
            ));
        }
        points.push(DiagramPoint::new(b, de));
    }
    PersistenceDiagram::new(dim, points).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_diagram(path: &Path, d: &PersistenceDiagram) -> Result<()> {
    let mut out = String::from("dim,birth,death\n");
    for p in d.points() {
        out.push_str(&format!("{},{},{}\n", d.dim(), p.birth, p.death));
    }
    fs::write(path, out)?;
    Ok(())
}

/// One sample of a diagram set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub label: String,
    pub dim: usize,
    /// Set when the sample could not be computed; such entries are skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Ordered list of samples; its order is the sample order everywhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| parse_err(&path, e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    /// Entries without an error flag.
    pub fn usable(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.error.is_none())
    }
}

/// A loaded diagram set with class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSet {
    pub names: Vec<String>,
    pub diagrams: Vec<PersistenceDiagram>,
    /// Class id of each sample: index into `classes`.
    pub labels: Vec<usize>,
    /// Distinct labels in order of first appearance.
    pub classes: Vec<String>,
}

impl DiagramSet {
    pub fn new(names: Vec<String>, diagrams: Vec<PersistenceDiagram>, labels: &[String]) -> Self {
        let mut classes: Vec<String> = Vec::new();
        let ids = labels
            .iter()
            .map(|l| match classes.iter().position(|c| c == l) {
                Some(i) => i,
                None => {
                    classes.push(l.clone());
                    classes.len() - 1
                }
            })
            .collect();
        DiagramSet {
            names,
            diagrams,
            labels: ids,
            classes,
        }
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }
}

/// Loads every usable diagram listed in `dir/manifest.json`, in order.
pub fn load_diagram_set(dir: &Path) -> Result<DiagramSet> {
    let manifest = Manifest::read(dir)?;
    let mut names = Vec::new();
    let mut diagrams = Vec::new();
    let mut labels = Vec::new();
    for e in manifest.usable() {
        diagrams.push(read_diagram(&dir.join(&e.file), e.dim)?);
        names.push(e.file.clone());
        labels.push(e.label.clone());
    }
    Ok(DiagramSet::new(names, diagrams, &labels))
}

/// Sidecar written next to a Gram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSidecar {
    pub n: usize,
    #[serde(flatten)]
    pub provenance: Option<GramProvenance>,
    /// Sample names in row order.
    #[serde(default)]
    pub samples: Vec<String>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the matrix as CSV and its sidecar as JSON next to it.
pub fn write_gram(path: &Path, k: &GramMatrix, samples: &[String]) -> Result<()> {
    let mut out = String::new();
    for i in 0..k.len() {
        let row: Vec<String> = k.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    let sidecar = GramSidecar {
        n: k.len(),
        provenance: k.provenance().cloned(),
        samples: samples.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    fs::write(sidecar_path(path), text)?;
    Ok(())
}

/// Reads a Gram CSV; provenance is taken from the sidecar when present.
pub fn read_gram(path: &Path) -> Result<GramMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut values = Vec::new();
    let mut rows = 0;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        for f in rec.iter() {
            values.push(parse_f64(path, line + 1, f)?);
        }
        rows += 1;
    }
    let k = GramMatrix::from_values(rows, values).map_err(|e| parse_err(path, e.to_string()))?;
    let side = sidecar_path(path);
    if side.exists() {
        let text = fs::read_to_string(&side)?;
        let s: GramSidecar =
            serde_json::from_str(&text).map_err(|e| parse_err(&side, e.to_string()))?;
        if let Some(p) = s.provenance {
            return Ok(k.with_provenance(p));
        }
    }
    Ok(k)
}

/// Writes `sample_id,true,predicted` rows.
pub fn write_predictions(
    path: &Path,
    sample_ids: &[String],
    truth: &[String],
    predicted: &[String],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["sample_id", "true", "predicted"])
        .map_err(|e| csv_err(path, e))?;
    for ((s, t), p) in sample_ids.iter().zip(truth).zip(predicted) {
        w.write_record([s, t, p]).map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram_matrix, DiagramKernel};

    #[test]
    fn diagram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let d = PersistenceDiagram::from_pairs(1, &[(0.1, 0.30000000000000004), (1.0, 2f64.sqrt())])
            .unwrap();
        write_diagram(&path, &d).unwrap();
        assert_eq!(read_diagram(&path, 1).unwrap(), d);
        assert!(read_diagram(&path, 0).is_err());
        let empty = PersistenceDiagram::empty(2);
        write_diagram(&path, &empty).unwrap();
        assert_eq!(read_diagram(&path, 2).unwrap(), empty);
    }

    #[test]
    fn malformed_files_are_parse_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "dim,birth,death\n1,0.5,abc\n").unwrap();
        assert!(matches!(read_diagram(&path, 1), Err(Error::Parse { .. })));
        fs::write(&path, "dim,birth,death\n1,0.5,inf\n").unwrap();
        assert!(matches!(read_diagram(&path, 1), Err(Error::Parse { .. })));
        fs::write(&path, "0,0\n1,x\n").unwrap();
        assert!(matches!(read_point_cloud(&path), Err(Error::Parse { .. })));
        fs::write(&path, "0,0\n1\n").unwrap();
        assert!(read_point_cloud(&path).unwrap_err().is_input_error());
    }

    #[test]
    fn cloud_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let c = PointCloud::new(vec![vec![0.1, 0.2], vec![1.0 / 3.0, 7.0]]).unwrap();
        write_point_cloud(&path, &c).unwrap();
        assert_eq!(read_point_cloud(&path).unwrap(), c);
    }

    #[test]
    fn gram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gram.csv");
        let ds = vec![
            PersistenceDiagram::from_pairs(1, &[(0.0, 1.0)]).unwrap(),
            PersistenceDiagram::from_pairs(1, &[(0.2, 0.7), (0.1, 0.4)]).unwrap(),
        ];
        let k = gram_matrix(&DiagramKernel::pss(0.3).unwrap(), &ds).unwrap();
        write_gram(&path, &k, &["a".into(), "b".into()]).unwrap();
        assert_eq!(read_gram(&path).unwrap(), k);
        assert!(sidecar_path(&path).exists());
    }

    #[test]
    fn manifest_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let d = PersistenceDiagram::from_pairs(1, &[(0.0, 1.0)]).unwrap();
        let mut m = Manifest::default();
        for (i, label) in ["b", "a", "b"].iter().enumerate() {
            let file = format!("{i}.csv");
            write_diagram(&dir.path().join(&file), &d).unwrap();
            m.entries.push(ManifestEntry {
                file,
                label: label.to_string(),
                dim: 1,
                error: None,
            });
        }
        m.entries.push(ManifestEntry {
            file: "missing.csv".into(),
            label: "c".into(),
            dim: 1,
            error: Some("failed".into()),
        });
        m.write(dir.path()).unwrap();
        let set = load_diagram_set(dir.path()).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.labels, vec![0, 1, 0]);
        assert_eq!(set.classes, vec!["b".to_string(), "a".to_string()]);
    }
}
