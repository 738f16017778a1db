//! Point files: CSV rows `x,y,z[,label]` with `#` comments, or a JSON array
//! of `[x, y, z]` triples.

use std::path::Path;

use thiserror::Error;

use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub format: Format,
    pub points: Vec<Vec3>,
    /// Present only when every CSV row carries a label.
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("the file contains no points")]
    Empty,
}

pub fn read_point_file(path: &Path) -> Result<PointFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    if is_json {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

pub fn parse_json(text: &str) -> Result<PointFile, InputError> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 3 {
            return Err(InputError::Json(format!(
                "point {} has {} coordinates, expected 3",
                i + 1,
                row.len()
            )));
        }
        points.push(Vec3::new(row[0], row[1], row[2]));
    }
    if points.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(PointFile {
        format: Format::Json,
        points,
        labels: None,
    })
}

pub fn parse_csv(text: &str) -> Result<PointFile, InputError> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes());
        let record = match reader.records().next() {
            Some(Ok(r)) => r,
            Some(Err(e)) => {
                return Err(InputError::Row {
                    line,
                    message: e.to_string(),
                })
            }
            None => continue,
        };
        if !(3..=4).contains(&record.len()) {
            return Err(InputError::Row {
                line,
                message: format!(
                    "expected x,y,z with an optional label, found {} fields",
                    record.len()
                ),
            });
        }
        let mut xyz = [0.0; 3];
        for (k, v) in xyz.iter_mut().enumerate() {
            let field = &record[k];
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| InputError::Row {
                    line,
                    message: format!("'{field}' is not a finite number"),
                })?;
        }
        points.push(Vec3::from(xyz));
        labels.push(record.get(3).map(str::to_string));
    }
    if points.is_empty() {
        return Err(InputError::Empty);
    }
    let labels = if labels.iter().all(Option::is_some) {
        Some(labels.into_iter().flatten().collect())
    } else {
        None
    };
    Ok(PointFile {
        format: Format::Csv,
        points,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_comments_and_labels() {
        let f = parse_csv("# header\n1, 2, 3, a\n\n4,5,6,b\n-1e-3,0,7,c\n").unwrap();
        assert_eq!(f.points.len(), 3);
        assert_eq!(f.points[2], Vec3::new(-1e-3, 0.0, 7.0));
        assert_eq!(f.labels.unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn malformed_row_names_its_line() {
        let err = parse_csv("1,2,3\n# c\n4,five,6\n").unwrap_err();
        assert_eq!(
            err,
            InputError::Row {
                line: 3,
                message: "'five' is not a finite number".into()
            }
        );
        assert!(matches!(
            parse_csv("1,2\n"),
            Err(InputError::Row { line: 1, .. })
        ));
        assert!(matches!(
            parse_csv("1,2,inf\n"),
            Err(InputError::Row { line: 1, .. })
        ));
        assert_eq!(parse_csv("# nothing\n"), Err(InputError::Empty));
    }

    #[test]
    fn partial_labels_are_dropped() {
        let f = parse_csv("1,2,3,a\n4,5,6\n").unwrap();
        assert!(f.labels.is_none());
    }

    #[test]
    fn json_points() {
        let f = parse_json("[[1,2,3],[4.5,-6,7e2]]").unwrap();
        assert_eq!(
            f.points,
            vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.5, -6.0, 700.0)]
        );
        assert!(parse_json("[[1,2]]").is_err());
        assert!(parse_json("{}").is_err());
    }
}
