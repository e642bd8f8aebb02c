//! JSON payload parsing: matrices, combinations and families.

use dilation_core::linalg::{
    format_rational, integer, parse_rational, rational_to_f64, Matrix, Rational, Scalar, ScalarMode,
};
use serde_json::Value;

use crate::CliError;

/// One numeric entry as written in the payload.
#[derive(Clone, Debug)]
pub enum Entry {
    Exact(Rational),
    Float(f64),
}

impl Entry {
    fn parse(v: &Value, at: &str) -> Result<Entry, CliError> {
        match v {
            Value::String(s) => parse_rational(s).map(Entry::Exact).map_err(|e| CliError::Input(format!("{at}: {e}"))),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Entry::Exact(integer(i))),
                None => n
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .map(Entry::Float)
                    .ok_or_else(|| CliError::Input(format!("{at}: unrepresentable number {n}"))),
            },
            other => Err(CliError::Input(format!("{at}: expected a number or \"n/d\" string, got {other}"))),
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            Entry::Exact(r) => rational_to_f64(r),
            Entry::Float(x) => *x,
        }
    }
}

/// Converts a parsed entry into the working scalar type.
pub trait FromEntry: Scalar {
    fn from_entry(e: &Entry) -> Self;
}

impl FromEntry for Rational {
    fn from_entry(e: &Entry) -> Self {
        match e {
            Entry::Exact(r) => r.clone(),
            Entry::Float(x) => <Rational as Scalar>::from_f64(*x),
        }
    }
}

impl FromEntry for f64 {
    fn from_entry(e: &Entry) -> Self {
        e.as_f64()
    }
}

/// Decides the scalar mode of a payload from all of its entries. Integers
/// fit either mode; a fraction next to a fractional literal forces float
/// mode with a warning.
pub fn detect_mode<'a>(
    entries: impl IntoIterator<Item = &'a Entry>,
    what: &str,
    warnings: &mut Vec<String>,
) -> ScalarMode {
    let (mut fractions, mut floats) = (false, false);
    for e in entries {
        match e {
            Entry::Exact(r) if !r.is_integer() => fractions = true,
            Entry::Exact(_) => {}
            Entry::Float(_) => floats = true,
        }
    }
    if floats && fractions {
        warnings.push(format!("{what} mixes exact and decimal entries; using float mode"));
    }
    if floats {
        ScalarMode::Float
    } else {
        ScalarMode::Exact
    }
}

#[derive(Clone, Debug)]
pub struct RawMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

impl RawMatrix {
    pub fn parse(v: &Value, at: &str) -> Result<RawMatrix, CliError> {
        let obj = v.as_object().ok_or_else(|| CliError::Input(format!("{at}: expected a matrix object")))?;
        let dim = |key: &str| {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| CliError::Input(format!("{at}: missing or invalid \"{key}\"")))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let data = obj
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::Input(format!("{at}: missing \"data\"")))?;
        if data.len() != rows {
            return Err(CliError::Input(format!("{at}: {} data rows, expected {rows}", data.len())));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in data.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| CliError::Input(format!("{at}: row {i} is not an array")))?;
            if row.len() != cols {
                return Err(CliError::Input(format!("{at}: row {i} has {} entries, expected {cols}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                entries.push(Entry::parse(x, &format!("{at}[{i}][{j}]"))?);
            }
        }
        Ok(RawMatrix { rows, cols, entries })
    }

    pub fn to_matrix<S: FromEntry>(&self) -> Result<Matrix<S>, CliError> {
        Ok(Matrix::new(self.rows, self.cols, self.entries.iter().map(S::from_entry).collect())?)
    }

    pub fn square_dim(&self, at: &str) -> Result<usize, CliError> {
        if self.rows != self.cols || self.rows == 0 {
            return Err(CliError::Input(format!(
                "{at}: expected a non-empty square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }
}

/// `{"p", "isometries", "weights", "labels"}`; weights are optional for
/// commands that only need the isometries.
#[derive(Clone, Debug)]
pub struct RawCombination {
    pub p: Option<String>,
    pub isometries: Vec<RawMatrix>,
    pub weights: Option<Vec<Entry>>,
    pub labels: Vec<String>,
}

impl RawCombination {
    pub fn parse(v: &Value, at: &str) -> Result<RawCombination, CliError> {
        let obj = v.as_object().ok_or_else(|| CliError::Input(format!("{at}: expected a combination object")))?;
        let p = match obj.get("p") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            Some(other) => return Err(CliError::Input(format!("{at}.p: expected a string, got {other}"))),
        };
        let isometries = obj
            .get("isometries")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::Input(format!("{at}: missing \"isometries\"")))?
            .iter()
            .enumerate()
            .map(|(i, m)| RawMatrix::parse(m, &format!("{at}.isometries[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if isometries.is_empty() {
            return Err(CliError::Input(format!("{at}: no isometries")));
        }
        let weights = match obj.get("weights") {
            None => None,
            Some(w) => Some(
                w.as_array()
                    .ok_or_else(|| CliError::Input(format!("{at}.weights: expected an array")))?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| Entry::parse(x, &format!("{at}.weights[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        if weights.as_ref().is_some_and(|w| w.len() != isometries.len()) {
            return Err(CliError::Input(format!("{at}: weights and isometries differ in length")));
        }
        let labels = match obj.get("labels") {
            None => (1..=isometries.len()).map(|i| format!("T{i}")).collect(),
            Some(l) => l
                .as_array()
                .and_then(|a| a.iter().map(|x| x.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                .ok_or_else(|| CliError::Input(format!("{at}.labels: expected an array of strings")))?,
        };
        if labels.len() != isometries.len() {
            return Err(CliError::Input(format!("{at}: labels and isometries differ in length")));
        }
        Ok(RawCombination { p, isometries, weights, labels })
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.isometries.iter().flat_map(|m| &m.entries).chain(self.weights.iter().flatten())
    }

    pub fn matrices<S: FromEntry>(&self) -> Result<Vec<Matrix<S>>, CliError> {
        self.isometries.iter().map(RawMatrix::to_matrix).collect()
    }
}

/// Float weights stay floats so that the core converts them losslessly.
pub enum Weights {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

pub fn weights_of(entries: &[Entry]) -> Weights {
    if entries.iter().all(|e| matches!(e, Entry::Exact(_))) {
        Weights::Exact(entries.iter().map(<Rational as FromEntry>::from_entry).collect())
    } else {
        Weights::Float(entries.iter().map(Entry::as_f64).collect())
    }
}

/// Resolves the exponent from the payload and the flag; both may be given
/// only when they agree.
pub fn resolve_p(payload: Option<&str>, flag: Option<&str>) -> Result<String, CliError> {
    match (payload, flag) {
        (Some(a), Some(b)) => {
            let (ra, rb) = (parse_rational(a)?, parse_rational(b)?);
            if ra != rb {
                return Err(CliError::Input(format!("payload p = {a} disagrees with --p {b}")));
            }
            Ok(format_rational(&ra))
        }
        (Some(a), None) | (None, Some(a)) => Ok(a.to_string()),
        (None, None) => Ok("2".to_string()),
    }
}

pub fn read_json(path: &std::path::Path, bytes: &mut Vec<u8>) -> Result<Value, CliError> {
    let data = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let v = serde_json::from_slice(&data).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    bytes.extend_from_slice(&data);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exact_and_float_entries() {
        let m = RawMatrix::parse(&json!({"rows": 1, "cols": 3, "data": [["1/2", 1, "-3/4"]]}), "m").unwrap();
        let mut w = Vec::new();
        assert_eq!(detect_mode(&m.entries, "m", &mut w), ScalarMode::Exact);
        assert!(w.is_empty());
        let m = RawMatrix::parse(&json!({"rows": 1, "cols": 2, "data": [["1/2", 0.25]]}), "m").unwrap();
        assert_eq!(detect_mode(&m.entries, "m", &mut w), ScalarMode::Float);
        assert_eq!(w.len(), 1);
        assert_eq!(m.to_matrix::<f64>().unwrap().data(), &[0.5, 0.25]);
    }

    #[test]
    fn malformed_matrices() {
        for bad in [
            json!({"rows": 2, "cols": 1, "data": [[1]]}),
            json!({"rows": 1, "cols": 2, "data": [[1]]}),
            json!({"rows": 1, "cols": 1, "data": [["x"]]}),
            json!({"rows": 1, "cols": 1, "data": [[true]]}),
            json!({"cols": 1, "data": [[1]]}),
        ] {
            assert!(RawMatrix::parse(&bad, "m").is_err(), "{bad}");
        }
    }

    #[test]
    fn combination_defaults() {
        let c = RawCombination::parse(
            &json!({"isometries": [{"rows": 1, "cols": 1, "data": [[1]]}, {"rows": 1, "cols": 1, "data": [[-1]]}],
                    "weights": ["1/3", "2/3"]}),
            "combo",
        )
        .unwrap();
        assert_eq!(c.labels, vec!["T1", "T2"]);
        assert!(c.p.is_none());
        assert!(matches!(weights_of(c.weights.as_ref().unwrap()), Weights::Exact(_)));
    }

    #[test]
    fn exponent_resolution() {
        assert_eq!(resolve_p(None, None).unwrap(), "2");
        assert_eq!(resolve_p(Some("3"), Some("6/2")).unwrap(), "3");
        assert!(resolve_p(Some("3"), Some("4")).is_err());
    }
}
