//! JSON matrix format:
//! `{"rows": r, "cols": c, "entries": [[re, im], ...]}` in row-major order.
//! A bare number is shorthand for a real entry.

use num_complex::Complex64;
use serde_json::{json, Value};

use super::{Matrix, MatrixError};

fn parse_entry(v: &Value, idx: usize) -> Result<Complex64, MatrixError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(|| MatrixError::Parse(format!("entry {idx}: not a finite number"))),
        Value::Array(parts) if parts.len() == 2 => {
            let re = parts[0].as_f64();
            let im = parts[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(MatrixError::Parse(format!(
                    "entry {idx}: expected [re, im] numbers"
                ))),
            }
        }
        _ => Err(MatrixError::Parse(format!(
            "entry {idx}: expected a number or [re, im]"
        ))),
    }
}

fn dim_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize, MatrixError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|d| d as usize)
        .ok_or_else(|| MatrixError::Parse(format!("missing or invalid \"{key}\"")))
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix<Complex64>, MatrixError> {
    let obj = v
        .as_object()
        .ok_or_else(|| MatrixError::Parse("matrix must be a JSON object".into()))?;
    let rows = dim_field(obj, "rows")?;
    let cols = dim_field(obj, "cols")?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| MatrixError::Parse("missing \"entries\" array".into()))?;
    if entries.len() != rows * cols {
        return Err(MatrixError::Parse(format!(
            "expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            entries.len()
        )));
    }
    let data = entries
        .iter()
        .enumerate()
        .map(|(i, e)| parse_entry(e, i))
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_vec(rows, cols, data)
}

/// Parses a matrix whose entries must all have zero imaginary part.
pub fn real_matrix_from_json(v: &Value) -> Result<Matrix<f64>, MatrixError> {
    let m = matrix_from_json(v)?;
    if let Some(idx) = m.as_slice().iter().position(|z| z.im != 0.0) {
        return Err(MatrixError::Parse(format!(
            "entry {idx} has nonzero imaginary part in a real matrix slot"
        )));
    }
    Ok(m.real_part())
}

pub fn matrix_to_json(m: &Matrix<Complex64>) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.as_slice().iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entries() {
        let v: Value =
            serde_json::from_str(r#"{"rows": 2, "cols": 2, "entries": [0, [1, 0], [-1, 0], 0.5]}"#)
                .unwrap();
        let m = real_matrix_from_json(&v).unwrap();
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 0)], -1.0);
        assert_eq!(m[(1, 1)], 0.5);
    }

    #[test]
    fn rejects_imaginary_in_real_slot() {
        let v: Value =
            serde_json::from_str(r#"{"rows": 1, "cols": 1, "entries": [[0, 1]]}"#).unwrap();
        assert!(matrix_from_json(&v).is_ok());
        assert!(matches!(real_matrix_from_json(&v), Err(MatrixError::Parse(_))));
    }

    #[test]
    fn rejects_wrong_entry_count_and_shapes() {
        for bad in [
            r#"{"rows": 2, "cols": 2, "entries": [1, 2, 3]}"#,
            r#"{"rows": 1, "cols": 1, "entries": [[1, 2, 3]]}"#,
            r#"{"cols": 1, "entries": [1]}"#,
            r#"[1, 2]"#,
        ] {
            let v: Value = serde_json::from_str(bad).unwrap();
            assert!(matrix_from_json(&v).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix::from_fn(2, 3, |i, j| Complex64::new(i as f64, -(j as f64)));
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
    }
}
