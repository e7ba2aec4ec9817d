use std::path::Path;

use laxforge_core::matrix::{real_matrix_from_json, MatrixError, ValidatedSystem};
use num_complex::Complex64;
use serde_json::Value;

use crate::CliError;

/// `(Γ, P)` and any explicit `(λ, w)` pairs from an input file.
#[derive(Debug, Clone)]
pub struct Input {
    pub system: ValidatedSystem<f64>,
    pub pairs: Vec<(Complex64, Vec<Complex64>)>,
}

pub fn load(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Input, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| CliError::Parse("input must be a JSON object".into()))?;
    let matrix = |key: &str| -> Result<_, CliError> {
        let m = obj.get(key).ok_or_else(|| CliError::Parse(format!("missing \"{key}\"")))?;
        real_matrix_from_json(m).map_err(|e| CliError::Parse(format!("\"{key}\": {e}")))
    };
    let gamma = matrix("gamma")?;
    let p = matrix("p")?;
    let system = ValidatedSystem::new(gamma, p).map_err(|e| match e {
        MatrixError::Parse(msg) => CliError::Parse(msg),
        other => CliError::Validation(other.to_string()),
    })?;

    let mut pairs = Vec::new();
    if let Some(list) = obj.get("pairs") {
        let list = list.as_array().ok_or_else(|| CliError::Parse("\"pairs\" must be an array".into()))?;
        for (k, item) in list.iter().enumerate() {
            let lambda = item
                .get("lambda")
                .and_then(complex)
                .ok_or_else(|| CliError::Parse(format!("pairs[{k}]: \"lambda\" must be [re, im]")))?;
            let w = item
                .get("w")
                .and_then(Value::as_array)
                .and_then(|ws| ws.iter().map(complex).collect::<Option<Vec<_>>>())
                .ok_or_else(|| CliError::Parse(format!("pairs[{k}]: \"w\" must be a list of [re, im]")))?;
            pairs.push((lambda, w));
        }
    }
    Ok(Input { system, pairs })
}

/// `[re, im]` or a bare real number.
fn complex(v: &Value) -> Option<Complex64> {
    if let Some(x) = v.as_f64() {
        return Some(Complex64::new(x, 0.0));
    }
    match v.as_array()?.as_slice() {
        [re, im] => Some(Complex64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}
