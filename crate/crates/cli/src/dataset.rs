//! CSV datasets: a header `x1,...,xp,y`, one labelled row per observation
//! and optionally a final row whose `y` cell is empty, giving the features
//! of the point to predict. A header of just `y` is an unsupervised bag.

use std::path::Path;

use conformal_exact::{LabeledPoint, Sample};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: Vec<String>,
    pub points: Vec<LabeledPoint>,
    pub prediction: Option<Vec<f64>>,
}

impl Dataset {
    /// Number of features `p`.
    pub fn dim(&self) -> usize {
        self.header.len() - 1
    }

    pub fn is_unsupervised(&self) -> bool {
        self.dim() == 0
    }

    pub fn sample(&self) -> CliResult<Sample> {
        Ok(Sample::new(self.points.clone())?)
    }

    pub fn responses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.response).collect()
    }

    pub fn require_prediction(&self) -> CliResult<&[f64]> {
        self.prediction
            .as_deref()
            .ok_or_else(|| CliError::dataset(self.points.len() as u64 + 1, "missing prediction row (features with an empty y)"))
    }
}

fn check_header(header: &[String]) -> CliResult<()> {
    let Some((last, features)) = header.split_last() else {
        return Err(CliError::dataset(1, "empty header"));
    };
    for (j, name) in features.iter().enumerate() {
        if name != &format!("x{}", j + 1) {
            return Err(CliError::dataset(1, format!("expected column `x{}`, found `{name}`", j + 1)));
        }
    }
    if last != "y" {
        return Err(CliError::dataset(1, format!("last column must be `y`, found `{last}`")));
    }
    Ok(())
}

fn parse_cell(cell: &str, line: u64, column: &str) -> CliResult<f64> {
    let value: f64 = cell
        .parse()
        .map_err(|_| CliError::dataset(line, format!("column `{column}`: `{cell}` is not a number")))?;
    if !value.is_finite() {
        return Err(CliError::dataset(line, format!("column `{column}`: non-finite value")));
    }
    Ok(value)
}

pub fn parse_dataset(text: &str) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::dataset(1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    check_header(&header)?;
    let p = header.len() - 1;

    let mut points = Vec::new();
    let mut prediction = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line());
            CliError::dataset(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |pos| pos.line());
        if prediction.is_some() {
            return Err(CliError::dataset(line, "rows after the prediction row"));
        }
        let features = (0..p)
            .map(|j| parse_cell(&record[j], line, &header[j]))
            .collect::<CliResult<Vec<f64>>>()?;
        if record[p].is_empty() {
            if p == 0 {
                return Err(CliError::dataset(line, "empty response in an unsupervised dataset"));
            }
            prediction = Some(features);
        } else {
            points.push(LabeledPoint::new(features, parse_cell(&record[p], line, "y")?));
        }
    }
    if points.is_empty() {
        return Err(CliError::dataset(2, "no labelled rows"));
    }
    Ok(Dataset {
        header,
        points,
        prediction,
    })
}

pub fn read_dataset(path: &Path) -> CliResult<(Dataset, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Input {
        path: path.display().to_string(),
        message: "not valid UTF-8".into(),
    })?;
    let dataset = parse_dataset(text).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok((dataset, bytes))
}

/// Serialises with shortest round-trip float formatting.
pub fn write_dataset(points: &[LabeledPoint], prediction: Option<&[f64]>) -> String {
    let p = points.first().map_or_else(|| prediction.map_or(0, <[f64]>::len), |q| q.features.len());
    let mut out = String::new();
    let mut header: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for point in points {
        let mut cells: Vec<String> = point.features.iter().map(f64::to_string).collect();
        cells.push(point.response.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(x) = prediction {
        let mut cells: Vec<String> = x.iter().map(f64::to_string).collect();
        cells.push(String::new());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_row_is_split_off() {
        let d = parse_dataset("x1,x2,y\n1,2,3\n4,5e-1,-6\n7,8,\n").unwrap();
        assert_eq!(d.points.len(), 2);
        assert_eq!(d.points[1], LabeledPoint::new(vec![4.0, 0.5], -6.0));
        assert_eq!(d.prediction, Some(vec![7.0, 8.0]));
    }

    #[test]
    fn unsupervised_bag() {
        let d = parse_dataset("y\n1\n2\n3\n").unwrap();
        assert!(d.is_unsupervised());
        assert_eq!(d.responses(), vec![1.0, 2.0, 3.0]);
        assert!(d.require_prediction().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "x2,y\n1,2\n",
            "x1,z\n1,2\n",
            "x1,y\n1,2,3\n",
            "x1,y\n1,abc\n",
            "x1,y\n1,2\n3,\n4,5\n",
            "x1,y\n1,NaN\n",
            "x1,y\n",
        ] {
            assert!(parse_dataset(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn written_values_read_back_exactly() {
        let points = vec![
            LabeledPoint::new(vec![0.1, -1e-300], 1.0 / 3.0),
            LabeledPoint::new(vec![f64::MAX, 2.5], -0.0),
        ];
        let x = [std::f64::consts::PI, 7.0];
        let back = parse_dataset(&write_dataset(&points, Some(&x))).unwrap();
        for (a, b) in points.iter().zip(&back.points) {
            assert_eq!(a.response.to_bits(), b.response.to_bits());
            for (u, v) in a.features.iter().zip(&b.features) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
        assert_eq!(back.prediction.as_deref(), Some(&x[..]));
    }
}
