use serde::{Deserialize, Serialize};

use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImprovementKind {
    /// `100 (a - b) / b`
    Relative,
    /// `a - b` in percentage points.
    Points,
}

pub fn improvement(a: f64, b: f64, kind: ImprovementKind) -> Result<f64, EvalError> {
    match kind {
        ImprovementKind::Relative if b == 0.0 => Err(EvalError::DivisionByZero),
        ImprovementKind::Relative => Ok(100.0 * (a - b) / b),
        ImprovementKind::Points => Ok(a - b),
    }
}
