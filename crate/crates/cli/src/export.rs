//! CSV polylines for plotting, in the R³ picture the results live in.

use std::path::{Path, PathBuf};

use nalgebra::{Vector3, Vector4};
use trefoil_core::curve::{KnotCurve, ProjectedCurve, SpaceCurve};

use crate::document::{CertRecord, CertStatus, Payload, ResultDocument};
use crate::CliError;

pub const CURVE_SAMPLES: usize = 1024;
/// Quadrisecant segments extend this fraction of their span past the outer points.
const LINE_OVERHANG: f64 = 0.1;

fn io(path: &Path, e: impl ToString) -> CliError {
    CliError::Io(path.display().to_string(), e.to_string())
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(header).map_err(|e| io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

fn xyz(p: &Vector3<f64>) -> [String; 3] {
    [p.x.to_string(), p.y.to_string(), p.z.to_string()]
}

/// The certified trefoil with the largest margin.
fn best_trefoil(records: &[CertRecord]) -> Option<&CertRecord> {
    records
        .iter()
        .filter(|r| r.status == CertStatus::Certified)
        .max_by(|a, b| a.margin.unwrap_or(0.0).total_cmp(&b.margin.unwrap_or(0.0)))
}

/// Writes `curve.csv` (when the document names a curve), `hexagon.csv`
/// (closed, seven rows) and `line.csv` (two rows per quadrisecant) as the
/// payload allows. Returns the files written.
pub fn export_plot_data(doc: &ResultDocument, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let hexagon: Option<[[f64; 3]; 6]> = match &doc.payload {
        Payload::Certify(c) => best_trefoil(&c.results).and_then(|r| r.points),
        Payload::ClassifyHex(h) => Some(h.points),
        _ => None,
    };
    let pole: Option<[f64; 4]> = match &doc.payload {
        Payload::Certify(c) => best_trefoil(&c.results).and_then(|r| r.pole),
        _ => None,
    };
    if let Some(echo) = &doc.config.curve {
        let curve = echo.spec.to_curve()?;
        let picture: Box<dyn SpaceCurve<3>> = match (&curve, pole) {
            (KnotCurve::S3(c), Some(p)) => Box::new(ProjectedCurve::new(c.clone(), Vector4::from(p))),
            _ => curve.r3_model(),
        };
        let rows: Vec<Vec<String>> = (0..CURVE_SAMPLES)
            .map(|i| {
                let t = i as f64 / CURVE_SAMPLES as f64;
                let mut row = vec![t.to_string()];
                row.extend(xyz(&picture.point(t)));
                row
            })
            .collect();
        let path = dir.join("curve.csv");
        write_rows(&path, &["t", "x", "y", "z"], &rows)?;
        written.push(path);
    }
    if let Some(points) = hexagon {
        let rows: Vec<Vec<String>> = (0..=6)
            .map(|i| {
                let mut row = vec![(i % 6).to_string()];
                row.extend(xyz(&Vector3::from(points[i % 6])));
                row
            })
            .collect();
        let path = dir.join("hexagon.csv");
        write_rows(&path, &["vertex", "x", "y", "z"], &rows)?;
        written.push(path);
    }
    if let Payload::Quadrisecants(q) = &doc.payload {
        let curve = doc.config.curve.as_ref().ok_or_else(|| CliError::Input("quadrisecant document without a curve".into()))?;
        let picture = curve.spec.to_curve()?.r3_model();
        let mut rows = Vec::new();
        for (k, line) in q.quadrisecants.iter().enumerate() {
            let base = Vector3::from(line.point);
            let dir = Vector3::from(line.direction);
            let s: Vec<f64> = line.params.iter().map(|&t| dir.dot(&(picture.point(t) - base))).collect();
            let (lo, hi) = (s.iter().copied().fold(f64::INFINITY, f64::min), s.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let pad = LINE_OVERHANG * (hi - lo);
            for end in [lo - pad, hi + pad] {
                let mut row = vec![k.to_string()];
                row.extend(xyz(&(base + dir * end)));
                rows.push(row);
            }
        }
        let path = dir.join("line.csv");
        write_rows(&path, &["quadrisecant", "x", "y", "z"], &rows)?;
        written.push(path);
    }
    Ok(written)
}
