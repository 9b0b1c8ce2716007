//! JSON system documents.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use zsf_core::{Complex64, Mat, StateSpace, Tolerances, ZsfError};

/// Per-document tolerance overrides. Missing fields keep their defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_tol: Option<f64>,
}

impl ToleranceOverrides {
    /// `self` wins over `base` field by field.
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            rank_rtol: self.rank_rtol.unwrap_or(base.rank_rtol),
            zero_atol: self.zero_atol.unwrap_or(base.zero_atol),
            match_tol: self.match_tol.unwrap_or(base.match_tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    /// `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_zeros: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DocumentError {
    Io {
        path: String,
        message: String,
    },
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    Field {
        field: String,
        message: String,
    },
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Io { path, message } => write!(f, "{path}: {message}"),
            DocumentError::Syntax {
                line,
                column,
                message,
            } => write!(f, "line {line}, column {column}: {message}"),
            DocumentError::Field { field, message } => write!(f, "field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for DocumentError {}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// Check that `rows` is rectangular with finite entries; returns `(rows, cols)`.
fn check_matrix(field: &str, rows: &[Vec<f64>]) -> Result<(usize, usize), DocumentError> {
    let cols = rows.first().map_or(0, Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(field_err(
                format!("{field}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(field_err(
                format!("{field}[{i}][{j}]"),
                "entry is not finite",
            ));
        }
    }
    Ok((rows.len(), cols))
}

fn expect_shape(
    field: &str,
    got: (usize, usize),
    want: (usize, usize),
) -> Result<(), DocumentError> {
    if got != want {
        return Err(field_err(
            field,
            format!("expected {}x{}, got {}x{}", want.0, want.1, got.0, got.1),
        ));
    }
    Ok(())
}

fn to_mat(rows: &[Vec<f64>], shape: (usize, usize)) -> Mat {
    Mat::from_fn(shape.0, shape.1, |i, j| rows[i][j])
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: SystemDocument =
            serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_system(name: impl Into<String>, sys: &StateSpace) -> Self {
        let rows = |m: &Mat| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        SystemDocument {
            name: name.into(),
            a: rows(sys.a()),
            b: rows(sys.b()),
            c: rows(sys.c()),
            d: Some(rows(sys.d())),
            tolerances: None,
            expected_zeros: None,
        }
    }

    /// Shape and finiteness checks, reported against the offending field.
    pub fn validate(&self) -> Result<(), DocumentError> {
        let a = check_matrix("A", &self.a)?;
        let b = check_matrix("B", &self.b)?;
        let c = check_matrix("C", &self.c)?;
        let n = a.0;
        if n == 0 {
            return Err(field_err("A", "system has no states"));
        }
        expect_shape("A", a, (n, n))?;
        if b.1 == 0 {
            return Err(field_err("B", "system has no inputs"));
        }
        expect_shape("B", b, (n, b.1))?;
        if c.0 == 0 {
            return Err(field_err("C", "system has no outputs"));
        }
        expect_shape("C", c, (c.0, n))?;
        if let Some(d) = &self.d {
            let d = check_matrix("D", d)?;
            expect_shape("D", d, (c.0, b.1))?;
        }
        if let Some(t) = &self.tolerances {
            t.apply(Tolerances::default())
                .validate()
                .map_err(|e| field_err("tolerances", e.to_string()))?;
        }
        if let Some(z) = &self.expected_zeros {
            if let Some(i) = z
                .iter()
                .position(|p| !p[0].is_finite() || !p[1].is_finite())
            {
                return Err(field_err(
                    format!("expected_zeros[{i}]"),
                    "entry is not finite",
                ));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<StateSpace, DocumentError> {
        self.validate()?;
        let n = self.a.len();
        let m = self.b[0].len();
        let p = self.c.len();
        let d = match &self.d {
            Some(d) => to_mat(d, (p, m)),
            None => Mat::zeros(p, m),
        };
        StateSpace::new(
            to_mat(&self.a, (n, n)),
            to_mat(&self.b, (n, m)),
            to_mat(&self.c, (p, n)),
            d,
        )
        .map_err(|e: ZsfError| field_err("A", e.to_string()))
    }

    /// Defaults, then document overrides, then `flags`.
    pub fn tolerances(&self, flags: &ToleranceOverrides) -> Tolerances {
        let base = self
            .tolerances
            .unwrap_or_default()
            .apply(Tolerances::default());
        flags.apply(base)
    }

    pub fn expected(&self) -> Option<Vec<Complex64>> {
        self.expected_zeros
            .as_ref()
            .map(|z| z.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}
