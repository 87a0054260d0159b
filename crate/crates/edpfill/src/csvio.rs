//! CSV formats.
//!
//! Matrices, masks and feature tables share one layout: the first row holds
//! the column ids, the first column the row ids, and the top-left cell a tag
//! naming what the file contains (`top_displacement`, `base_shear`, `mask`,
//! `ground_motion`, `material`). Floats are written in Rust's shortest
//! round-trip form, so a write/read cycle reproduces every bit.
//!
//! Ground-motion records are two-column `time,accel` files.

use std::fs;
use std::path::Path;

use edpfill_core::cluster::ClusterAssignment;
use edpfill_core::data::{EdpKind, EdpMatrix, FeatureAxis, FeatureTable, ObservationMask};
use edpfill_core::gm::GroundMotionRecord;
use edpfill_core::Dense;

use crate::error::{Error, Result};

/// Tag in the top-left cell of mask files.
pub const MASK_TAG: &str = "mask";
/// Largest deviation between consecutive time steps a record may have.
pub const DT_TOLERANCE: f64 = 1e-9;

struct Table {
    corner: String,
    columns: Vec<String>,
    row_ids: Vec<String>,
    cells: Vec<Vec<String>>,
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::csv(path, e))?,
        None => return Err(Error::parse(path, 1, "empty file")),
    };
    if header.len() < 2 {
        return Err(Error::parse(path, 1, "header needs a tag and at least one column id"));
    }
    let corner = header[0].to_string();
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut row_ids = Vec::new();
    let mut cells = Vec::new();
    for (k, rec) in records.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.len() != columns.len() + 1 {
            return Err(Error::parse(
                path,
                line,
                format!("row `{}` has {} cells, expected {}", &rec[0], rec.len() - 1, columns.len()),
            ));
        }
        row_ids.push(rec[0].to_string());
        cells.push(rec.iter().skip(1).map(str::to_string).collect());
    }
    Ok(Table {
        corner,
        columns,
        row_ids,
        cells,
    })
}

fn parse_floats(path: &Path, t: &Table) -> Result<Dense> {
    let mut data = Vec::with_capacity(t.row_ids.len() * t.columns.len());
    for (i, row) in t.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let line = i + 2;
            if cell.is_empty() {
                return Err(Error::parse(path, line, format!("missing value in column `{}`", t.columns[j])));
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(path, line, format!("`{cell}` in column `{}` is not a number", t.columns[j]))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    path,
                    line,
                    format!("non-finite value `{cell}` in column `{}`", t.columns[j]),
                ));
            }
            data.push(v);
        }
    }
    Ok(Dense::from_vec(t.row_ids.len(), t.columns.len(), data)?)
}

fn write_table<S: AsRef<str>>(
    path: &Path,
    corner: &str,
    columns: &[S],
    row_ids: &[S],
    cell: impl Fn(usize, usize) -> String,
) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut header = vec![corner.to_string()];
    header.extend(columns.iter().map(|c| c.as_ref().to_string()));
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for (i, id) in row_ids.iter().enumerate() {
        let mut rec = vec![id.as_ref().to_string()];
        rec.extend((0..columns.len()).map(|j| cell(i, j)));
        w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<EdpMatrix> {
    let path = path.as_ref();
    let t = read_table(path)?;
    let kind = EdpKind::from_tag(&t.corner)
        .ok_or_else(|| Error::parse(path, 1, format!("unknown matrix kind `{}`", t.corner)))?;
    let values = parse_floats(path, &t)?;
    Ok(EdpMatrix::new(kind, values, t.row_ids, t.columns)?)
}

pub fn write_matrix(matrix: &EdpMatrix, path: impl AsRef<Path>) -> Result<()> {
    let v = matrix.values();
    write_table(path.as_ref(), matrix.kind().tag(), matrix.col_ids(), matrix.row_ids(), |i, j| {
        v[(i, j)].to_string()
    })
}

/// Writes an estimate with the ids of the matrix it completes.
pub fn write_estimate(like: &EdpMatrix, values: &Dense, path: impl AsRef<Path>) -> Result<()> {
    write_table(path.as_ref(), like.kind().tag(), like.col_ids(), like.row_ids(), |i, j| {
        values[(i, j)].to_string()
    })
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<ObservationMask> {
    let path = path.as_ref();
    let t = read_table(path)?;
    if t.corner != MASK_TAG {
        return Err(Error::parse(path, 1, format!("expected tag `{MASK_TAG}`, found `{}`", t.corner)));
    }
    let mut flags = Vec::with_capacity(t.row_ids.len() * t.columns.len());
    for (i, row) in t.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            flags.push(match cell.as_str() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::parse(
                        path,
                        i + 2,
                        format!("mask cell `{other}` in column `{}` is not 0 or 1", t.columns[j]),
                    ))
                }
            });
        }
    }
    Ok(ObservationMask::from_flags(t.row_ids.len(), t.columns.len(), flags)?)
}

/// Writes a mask with the row and column ids of `like`.
pub fn write_mask(mask: &ObservationMask, row_ids: &[String], col_ids: &[String], path: impl AsRef<Path>) -> Result<()> {
    write_table(path.as_ref(), MASK_TAG, col_ids, row_ids, |i, j| {
        if mask.is_observed(i, j) { "1" } else { "0" }.to_string()
    })
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let t = read_table(path)?;
    let axis = FeatureAxis::from_tag(&t.corner)
        .ok_or_else(|| Error::parse(path, 1, format!("unknown feature axis `{}`", t.corner)))?;
    let values = parse_floats(path, &t)?;
    Ok(FeatureTable::new(axis, values, t.row_ids, t.columns)?)
}

pub fn write_features(table: &FeatureTable, path: impl AsRef<Path>) -> Result<()> {
    let v = table.values();
    write_table(path.as_ref(), table.axis().tag(), table.dim_names(), table.row_ids(), |i, j| {
        v[(i, j)].to_string()
    })
}

/// Writes a bare point set (rows `p0..`, columns `x0..`).
pub fn write_points(points: &Dense, path: impl AsRef<Path>) -> Result<()> {
    let cols: Vec<String> = (0..points.cols()).map(|j| format!("x{j}")).collect();
    let rows: Vec<String> = (0..points.rows()).map(|i| format!("p{i}")).collect();
    write_table(path.as_ref(), "point", &cols, &rows, |i, j| points[(i, j)].to_string())
}

/// Reads a `time,accel` record; the id is the file stem.
pub fn read_record(path: impl AsRef<Path>) -> Result<GroundMotionRecord> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut time = Vec::new();
    let mut accel = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.len() != 2 {
            return Err(Error::parse(path, line, "expected two columns: time, accel"));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("`{s}` is not a finite number")))
        };
        time.push(parse(&rec[0])?);
        accel.push(parse(&rec[1])?);
    }
    if time.len() < 2 {
        return Err(Error::parse(path, 1, "a record needs at least two samples"));
    }
    let dt = time[1] - time[0];
    for (k, w) in time.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > DT_TOLERANCE {
            return Err(Error::parse(path, k + 3, format!("time step {} differs from dt {dt}", w[1] - w[0])));
        }
    }
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(GroundMotionRecord::new(id, dt, accel)?)
}

pub fn write_record(record: &GroundMotionRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["time", "accel"]).map_err(|e| Error::csv(path, e))?;
    for (k, a) in record.accel().iter().enumerate() {
        let t = k as f64 * record.dt();
        w.write_record([t.to_string(), a.to_string()]).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads every `*.csv` record in a directory, sorted by file name.
pub fn read_record_dir(dir: impl AsRef<Path>) -> Result<Vec<GroundMotionRecord>> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::parse(dir, 0, "no .csv records found"));
    }
    paths.iter().map(read_record).collect()
}

/// `row_id,label,medoid` per point; `medoid` is 1 for the cluster's medoid.
pub fn write_clusters(assignment: &ClusterAssignment, row_ids: &[String], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["row_id", "label", "medoid"]).map_err(|e| Error::csv(path, e))?;
    for (i, (id, label)) in row_ids.iter().zip(&assignment.labels).enumerate() {
        let is_medoid = assignment.medoids.get(*label) == Some(&i);
        w.write_record([id.as_str(), &label.to_string(), if is_medoid { "1" } else { "0" }])
            .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads labels back; medoid indices are restored when the file marks them.
pub fn read_clusters(path: impl AsRef<Path>) -> Result<ClusterAssignment> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut labels = Vec::new();
    let mut medoids = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.len() != 3 {
            return Err(Error::parse(path, line, "expected row_id,label,medoid"));
        }
        let label: usize = rec[1]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad label `{}`", &rec[1])))?;
        if &rec[2] == "1" {
            medoids.push((label, k));
        }
        labels.push(label);
    }
    let mut a = ClusterAssignment::from_labels(labels)?;
    medoids.sort_unstable();
    if medoids.len() == a.k() {
        a.medoids = medoids.into_iter().map(|(_, i)| i).collect();
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let v = Dense::from_rows(&[vec![0.1, 1.0 / 3.0], vec![-2.5e-17, 6.02e23], vec![1.0, 2.0]]).unwrap();
        let m = EdpMatrix::with_default_ids(EdpKind::BaseShear, v).unwrap();
        write_matrix(&m, &p).unwrap();
        assert_eq!(read_matrix(&p).unwrap(), m);
    }

    #[test]
    fn missing_cell_names_location() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "top_displacement,m0,m1\ng0,1,2\ng1,3,\n").unwrap();
        let e = read_matrix(&p).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("m1"), "{e}");
        fs::write(&p, "top_displacement,m0,m1\ng0,1,2\ng1,3\n").unwrap();
        assert!(read_matrix(&p).unwrap_err().to_string().contains("line 3"));
    }

    #[test]
    fn nan_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nan.csv");
        fs::write(&p, "base_shear,m0,m1\ng0,1,NaN\ng1,3,4\n").unwrap();
        assert!(read_matrix(&p).unwrap_err().to_string().contains("non-finite"));
    }

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mask.csv");
        let mask = ObservationMask::new(4, 2, vec![true, false, false, true, true, false, false, true], 0.5).unwrap();
        let ids = |n: usize, c: char| (0..n).map(|k| format!("{c}{k}")).collect::<Vec<_>>();
        write_mask(&mask, &ids(4, 'g'), &ids(2, 'm'), &p).unwrap();
        assert_eq!(read_mask(&p).unwrap(), mask);
    }

    #[test]
    fn record_round_trip_and_dt_check() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r7.csv");
        let r = GroundMotionRecord::new("r7", 0.01, vec![0.0, 0.5, -1.25, 0.0]).unwrap();
        write_record(&r, &p).unwrap();
        let back = read_record(&p).unwrap();
        assert_eq!(back.accel(), r.accel());
        assert_eq!(back.id(), "r7");
        assert!((back.dt() - 0.01).abs() < 1e-15);
        fs::write(&p, "time,accel\n0,1\n0.01,2\n0.03,3\n").unwrap();
        assert!(read_record(&p).is_err());
    }

    #[test]
    fn features_and_clusters_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = FeatureTable::new(
            FeatureAxis::Material,
            Dense::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.5]]).unwrap(),
            vec!["m0".into(), "m1".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let p = dir.path().join("f.csv");
        write_features(&t, &p).unwrap();
        assert_eq!(read_features(&p).unwrap(), t);

        let a = ClusterAssignment {
            medoids: vec![1, 2],
            labels: vec![0, 0, 1],
            cost: 1.0,
            trace: vec![1.0],
        };
        let q = dir.path().join("c.csv");
        write_clusters(&a, &["x".into(), "y".into(), "z".into()], &q).unwrap();
        let back = read_clusters(&q).unwrap();
        assert_eq!(back.labels, a.labels);
        assert_eq!(back.medoids, a.medoids);
    }
}
