//! Text formats and atomic file output.
//!
//! Floats are written with 17 significant digits so values survive a round
//! trip through text.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{PfsdmError, Result};
use crate::geometry::Point;
use crate::moments::{DistanceMatrix, MomentCurves};
use crate::shapes::Contour;

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, creating parent directories as needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| PfsdmError::Io(e.error))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| PfsdmError::Format(format!("line {line}: `{}` is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(PfsdmError::Format(format!("line {line}: non-finite value")));
    }
    Ok(v)
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One `x,y` line per point.
pub fn contour_to_csv(c: &Contour) -> String {
    let mut s = String::new();
    for p in c.points() {
        let _ = writeln!(s, "{},{}", format_float(p.x), format_float(p.y));
    }
    s
}

/// Parses `x,y` lines; a leading `x,y` header is accepted.
pub fn contour_from_csv(text: &str) -> Result<Contour> {
    let mut pts = Vec::new();
    for (n, line) in data_lines(text) {
        if pts.is_empty() && line.eq_ignore_ascii_case("x,y") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(PfsdmError::Format(format!("line {n}: expected `x,y`")));
        }
        pts.push(Point::new(parse_float(fields[0], n)?, parse_float(fields[1], n)?));
    }
    Contour::new(pts).map_err(|e| match e {
        PfsdmError::InvalidContour(m) => PfsdmError::Format(format!("invalid contour: {m}")),
        other => other,
    })
}

/// Header `r,M1,...,MK`, one row per radius.
pub fn moments_to_csv(m: &MomentCurves) -> String {
    let mut s = String::from("r");
    for k in 1..=m.k_order() {
        let _ = write!(s, ",M{k}");
    }
    s.push('\n');
    for (i, r) in m.r_grid.iter().enumerate() {
        s.push_str(&format_float(*r));
        for row in &m.values {
            s.push(',');
            s.push_str(&format_float(row[i]));
        }
        s.push('\n');
    }
    s
}

pub fn moments_from_csv(text: &str, shape_id: &str) -> Result<MomentCurves> {
    let mut lines = data_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| PfsdmError::Format("empty moment file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let k_order = cols.len().saturating_sub(1);
    if k_order == 0
        || cols[0] != "r"
        || cols[1..].iter().enumerate().any(|(k, c)| *c != format!("M{}", k + 1))
    {
        return Err(PfsdmError::Format(format!("bad moment header `{header}`")));
    }
    let mut r_grid = Vec::new();
    let mut values = vec![Vec::new(); k_order];
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k_order + 1 {
            return Err(PfsdmError::Format(format!("line {n}: expected {} columns", k_order + 1)));
        }
        r_grid.push(parse_float(fields[0], n)?);
        for (k, f) in fields[1..].iter().enumerate() {
            values[k].push(parse_float(f, n)?);
        }
    }
    if r_grid.len() < 2 {
        return Err(PfsdmError::Format("moment file needs at least two radii".into()));
    }
    Ok(MomentCurves {
        shape_id: shape_id.to_string(),
        r_grid,
        values,
    })
}

/// Square table with an `id` corner cell and shape ids on both axes.
pub fn distance_matrix_to_csv(d: &DistanceMatrix) -> String {
    let mut s = String::from("id");
    for id in &d.shape_ids {
        s.push(',');
        s.push_str(id);
    }
    s.push('\n');
    for (id, row) in d.shape_ids.iter().zip(&d.values) {
        s.push_str(id);
        for v in row {
            s.push(',');
            s.push_str(&format_float(*v));
        }
        s.push('\n');
    }
    s
}

pub fn distance_matrix_from_csv(text: &str) -> Result<DistanceMatrix> {
    let mut lines = data_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| PfsdmError::Format("empty distance matrix".into()))?;
    let ids: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    let mut values = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ids.len() + 1 || fields[0].trim() != ids[values.len().min(ids.len() - 1)] {
            return Err(PfsdmError::Format(format!("line {n}: row does not match header")));
        }
        values.push(fields[1..].iter().map(|f| parse_float(f, n)).collect::<Result<Vec<_>>>()?);
    }
    if values.len() != ids.len() {
        return Err(PfsdmError::Format("distance matrix is not square".into()));
    }
    Ok(DistanceMatrix { shape_ids: ids, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn contour_csv_round_trip() {
        let c = Contour::from_xy(&[(0.1, 0.2), (-0.3, 0.25), (0.0, -1.0 / 3.0)]).unwrap();
        let text = contour_to_csv(&c);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(contour_from_csv(&text).unwrap(), c);
        let with_header = format!("x,y\n# comment\n{text}");
        assert_eq!(contour_from_csv(&with_header).unwrap(), c);
        assert!(matches!(contour_from_csv("1,2\n3\n"), Err(PfsdmError::Format(_))));
        assert!(matches!(contour_from_csv("1,2\n3,4\n"), Err(PfsdmError::Format(_))));
    }

    #[test]
    fn moments_csv_round_trip() {
        let m = MomentCurves {
            shape_id: "a".into(),
            r_grid: vec![0.1, 0.5, 0.9],
            values: vec![vec![1.0, 2.0, 3.0], vec![0.1, 0.2, 0.3]],
        };
        let text = moments_to_csv(&m);
        assert!(text.starts_with("r,M1,M2\n"));
        assert_eq!(moments_from_csv(&text, "a").unwrap(), m);
        assert!(moments_from_csv("r,M2\n0.1,1\n0.2,1\n", "a").is_err());
    }

    #[test]
    fn distance_matrix_csv_round_trip() {
        let d = DistanceMatrix {
            shape_ids: vec!["a".into(), "b".into()],
            values: vec![vec![0.0, 0.25], vec![0.25, 0.0]],
        };
        let text = distance_matrix_to_csv(&d);
        assert!(text.starts_with("id,a,b\n"));
        assert_eq!(distance_matrix_from_csv(&text).unwrap(), d);
        assert!(distance_matrix_from_csv("id,a,b\na,0,1\n").is_err());
    }

    #[test]
    fn atomic_write_creates_parents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x/y/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    }
}
