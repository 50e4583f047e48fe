use std::io::Read;
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::discrete::{detect_categorical, DEFAULT_BINS};
use crate::error::{invalid_input, Result};

/// Samples × features matrix with categorical labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Vec<String>,
    continuous: Vec<bool>,
}

impl Dataset {
    /// Validates shapes and finiteness. Labels must already be dense codes.
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        continuous: Vec<bool>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n < 2 {
            return Err(invalid_input(format!(
                "a dataset needs at least 2 samples, got {n}"
            )));
        }
        if d < 1 {
            return Err(invalid_input("a dataset needs at least one feature"));
        }
        if labels.len() != n {
            return Err(invalid_input(format!(
                "{} labels for {n} samples",
                labels.len()
            )));
        }
        if feature_names.len() != d || continuous.len() != d {
            return Err(invalid_input(format!(
                "{} feature names and {} flags for {d} features",
                feature_names.len(),
                continuous.len()
            )));
        }
        if let Some(((row, col), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid_input(format!(
                "non-finite value {v} at row {row}, column {col} ({})",
                feature_names[col]
            )));
        }
        let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        let class_names = (0..classes).map(|c| c.to_string()).collect();
        Ok(Self {
            name: name.into(),
            features,
            labels,
            class_names,
            feature_names,
            continuous,
        })
    }

    /// Names features `x0, x1, …` and flags categorical columns automatically.
    pub fn from_features(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let d = features.ncols();
        let names = (0..d).map(|j| format!("x{j}")).collect();
        let flags = features
            .columns()
            .into_iter()
            .map(|c| !detect_categorical(&c.to_vec(), DEFAULT_BINS))
            .collect();
        Self::new(name, features, labels, names, flags)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() < self.class_names.len() {
            return Err(invalid_input(format!(
                "{} class names for {} classes",
                names.len(),
                self.class_names.len()
            )));
        }
        self.class_names = names;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn continuous_flags(&self) -> &[bool] {
        &self.continuous
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.column(j).to_vec()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// Recomputes the continuous/categorical flags for a bin count.
    pub fn reflag(mut self, bins: usize) -> Self {
        self.continuous = self
            .features
            .columns()
            .into_iter()
            .map(|c| !detect_categorical(&c.to_vec(), bins))
            .collect();
        self
    }

    /// Keeps the given rows, in order.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(invalid_input("row subset needs at least 2 samples"));
        }
        let features = self.features.select(ndarray::Axis(0), rows);
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Ok(Self {
            name: self.name.clone(),
            features,
            labels,
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            continuous: self.continuous.clone(),
        })
    }

    /// Writes `feature names…, label` CSV with class names as label values.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.feature_names.clone();
        header.push("label".into());
        w.write_record(&header)?;
        for (row, &label) in self.features.outer_iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(self.class_names[label].clone());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Which CSV column holds the labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Name(String),
    /// Zero-based; negative values count from the end (`-1` is the last).
    Index(isize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<isize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    parse_csv(std::fs::File::open(path)?, label, name)
}

/// Parses a header + numeric rows CSV. Labels may be any strings; they are
/// coded densely in numeric order when all are numbers, else lexically.
pub fn parse_csv<R: Read>(
    reader: R,
    label: &LabelColumn,
    name: impl Into<String>,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let width = header.len();
    let label_idx = match label {
        LabelColumn::Name(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| invalid_input(format!("label column '{n}' not in header")))?,
        LabelColumn::Index(i) => {
            let idx = if *i < 0 { width as isize + i } else { *i };
            if idx < 0 || idx as usize >= width {
                return Err(invalid_input(format!(
                    "label column index {i} out of range for {width} columns"
                )));
            }
            idx as usize
        }
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                if cell.is_empty() {
                    return Err(invalid_input(format!("missing label at row {row}")));
                }
                raw_labels.push(cell.to_string());
                continue;
            }
            if cell.is_empty() {
                return Err(invalid_input(format!(
                    "missing value at row {row}, column {}",
                    header[j]
                )));
            }
            let v: f64 = cell.parse().map_err(|_| {
                invalid_input(format!(
                    "non-numeric value '{cell}' at row {row}, column {}",
                    header[j]
                ))
            })?;
            if !v.is_finite() {
                return Err(invalid_input(format!(
                    "non-finite value '{cell}' at row {row}, column {}",
                    header[j]
                )));
            }
            values.push(v);
        }
    }
    let n = raw_labels.len();
    let features = Array2::from_shape_vec((n, feature_names.len()), values)
        .map_err(|e| invalid_input(e.to_string()))?;
    let (labels, class_names) = encode_labels(&raw_labels);
    let flags = features
        .columns()
        .into_iter()
        .map(|c| !detect_categorical(&c.to_vec(), DEFAULT_BINS))
        .collect();
    Dataset::new(name, features, labels, feature_names, flags)?.with_class_names(class_names)
}

fn encode_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut classes: Vec<String> = raw.to_vec();
    let numeric: Option<Vec<f64>> = classes.iter().map(|s| s.parse::<f64>().ok()).collect();
    if numeric.is_some() {
        classes.sort_by(|a, b| {
            a.parse::<f64>()
                .unwrap()
                .total_cmp(&b.parse::<f64>().unwrap())
        });
    } else {
        classes.sort();
    }
    classes.dedup();
    let codes = raw
        .iter()
        .map(|s| classes.iter().position(|c| c == s).expect("class present"))
        .collect();
    (codes, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "a,b,label\n1.0,2.5,yes\n0.5,3,no\n2,1,yes\n";

    #[test]
    fn parses_header_and_rows() {
        let ds = parse_csv(
            SMALL.as_bytes(),
            &LabelColumn::Name("label".into()),
            "small",
        )
        .unwrap();
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(ds.labels(), &[1, 0, 1]);
        assert_eq!(ds.class_names(), &["no".to_string(), "yes".to_string()]);
        let by_index = parse_csv(SMALL.as_bytes(), &LabelColumn::Index(-1), "small").unwrap();
        assert_eq!(ds, by_index);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let csv = "x,y\n1,-1\n2,1\n3,10\n4,-1\n";
        let ds = parse_csv(csv.as_bytes(), &LabelColumn::Name("y".into()), "n").unwrap();
        assert_eq!(
            ds.class_names(),
            &["-1".to_string(), "1".to_string(), "10".to_string()]
        );
        assert_eq!(ds.labels(), &[0, 1, 2, 0]);
    }

    #[test]
    fn rejects_nan_and_missing_values() {
        let csv = "a,b,label\n1,NaN,0\n2,3,1\n";
        let err = parse_csv(csv.as_bytes(), &LabelColumn::Index(-1), "bad")
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1") && err.contains("column b"), "{err}");

        let csv = "a,b,label\n1,2,0\n2,,1\n";
        let err = parse_csv(csv.as_bytes(), &LabelColumn::Index(-1), "bad")
            .unwrap_err()
            .to_string();
        assert!(err.contains("missing value at row 2, column b"), "{err}");

        let csv = "a,b,label\n1,x,0\n2,3,1\n";
        assert!(parse_csv(csv.as_bytes(), &LabelColumn::Index(-1), "bad").is_err());
        assert!(parse_csv(SMALL.as_bytes(), &LabelColumn::Name("nope".into()), "bad").is_err());
        assert!(parse_csv(SMALL.as_bytes(), &LabelColumn::Index(3), "bad").is_err());
    }

    #[test]
    fn categorical_flags() {
        let csv = "c,f,label\n1,0.5,0\n2,1.5,1\n1,2.25,0\n3,0.1,1\n";
        let ds = parse_csv(csv.as_bytes(), &LabelColumn::Index(-1), "flags").unwrap();
        assert_eq!(ds.continuous_flags(), &[false, true]);
    }

    #[test]
    fn csv_round_trip() {
        let ds = parse_csv(SMALL.as_bytes(), &LabelColumn::Index(-1), "small").unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = parse_csv(buf.as_slice(), &LabelColumn::Index(-1), "small").unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn constructor_validation() {
        let f = Array2::from_shape_vec((2, 1), vec![1.0, f64::INFINITY]).unwrap();
        let err = Dataset::from_features("x", f, vec![0, 1])
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1, column 0 (x0)"), "{err}");
        let f = Array2::from_shape_vec((1, 1), vec![1.0]).unwrap();
        assert!(Dataset::from_features("x", f, vec![0]).is_err());
        let f = Array2::from_shape_vec((2, 1), vec![1.0, 2.0]).unwrap();
        assert!(Dataset::from_features("x", f, vec![0]).is_err());
    }
}
