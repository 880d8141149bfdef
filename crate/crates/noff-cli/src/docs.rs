//! Document formats and JSON rendering.
//!
//! Inputs are parsed with serde; outputs are rendered by a small writer
//! that prints every float with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly and keeps output files byte-deterministic.

use nalgebra::DMatrix;
use serde::Deserialize;

use noff_core::{is_projection, Projection, SymmetricOperator, Tolerance};

/// A square matrix with its intended interpretation.
#[derive(Debug, Clone, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub kind: MatrixKind,
    pub data: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Symmetric,
    Projection,
    General,
}

impl MatrixKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixKind::Symmetric => "symmetric",
            MatrixKind::Projection => "projection",
            MatrixKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct FrameItemDocument {
    pub weight: f64,
    pub matrix: MatrixDocument,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FrameDocument {
    pub n: usize,
    pub items: Vec<FrameItemDocument>,
}

/// Sampler specification for the `random` subcommand.
#[derive(Debug, Clone, Deserialize)]
pub struct SamplerDocument {
    pub n: usize,
    pub kind: String,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub matrix: Option<MatrixDocument>,
    #[serde(default)]
    pub atoms: Option<Vec<AtomDocument>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AtomDocument {
    pub probability: f64,
    pub matrix: MatrixDocument,
}

/// Config for the variance action: a list of independent samplers.
#[derive(Debug, Clone, Deserialize)]
pub struct VarianceConfigDocument {
    pub samplers: Vec<SamplerDocument>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GeneratorsDocument {
    pub n: usize,
    pub generators: Vec<MatrixDocument>,
}

#[derive(Debug)]
pub enum DocError {
    /// Structural problem: wrong shape, bad kind, unreadable content.
    Malformed(String),
    /// Semantic problem named after the violated domain contract.
    Domain { name: &'static str, message: String },
}

impl MatrixDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let doc: MatrixDocument =
            serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
        doc.check_shape()?;
        Ok(doc)
    }

    fn check_shape(&self) -> Result<(), DocError> {
        if self.n == 0 {
            return Err(DocError::Malformed("matrix dimension must be positive".into()));
        }
        if self.data.len() != self.n || self.data.iter().any(|row| row.len() != self.n) {
            return Err(DocError::Malformed(format!(
                "matrix data is not {0}x{0}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.data[i][j])
    }

    /// Interpret as a symmetric operator (symmetrizing), validating the
    /// projection invariant first when the document claims one.
    pub fn to_symmetric_operator(&self, tol: &Tolerance) -> Result<SymmetricOperator, DocError> {
        if self.kind == MatrixKind::Projection {
            self.to_projection(tol)?;
        }
        SymmetricOperator::new(self.to_dmatrix()).map_err(|e| DocError::Domain {
            name: e.name(),
            message: e.to_string(),
        })
    }

    /// Interpret as a projection; documents of kind `projection` (and any
    /// other kind used where a projection is required) must pass the
    /// idempotency check.
    pub fn to_projection(&self, tol: &Tolerance) -> Result<Projection, DocError> {
        let m = self.to_dmatrix();
        let (flag, residual) = is_projection(&m, tol);
        if !flag {
            return Err(DocError::Domain {
                name: "NotIdempotent",
                message: format!(
                    "matrix declared as projection has idempotency residual {residual:.3e}"
                ),
            });
        }
        Projection::from_matrix(m, tol).map_err(|e| DocError::Domain {
            name: e.name(),
            message: e.to_string(),
        })
    }
}

impl FrameDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let doc: FrameDocument =
            serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
        for item in &doc.items {
            item.matrix.check_shape()?;
            if item.matrix.n != doc.n {
                return Err(DocError::Malformed(format!(
                    "frame item dimension {} does not match frame dimension {}",
                    item.matrix.n, doc.n
                )));
            }
        }
        Ok(doc)
    }
}

/// JSON value with deterministic rendering: floats carry 17 significant
/// digits, non-finite floats render as null, object keys keep insertion
/// order.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Uint(usize),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(&'static str, Json)>),
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Uint(u) => out.push_str(&u.to_string()),
            Json::Float(x) => out.push_str(&fmt_float(*x)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32))
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Array(values) => {
                if values.is_empty() {
                    out.push_str("[]");
                    return;
                }
                // Scalar-only arrays (matrix rows, index pairs) stay on one
                // line; arrays of composites get one element per line.
                let scalar_only = values.iter().all(|v| {
                    matches!(
                        v,
                        Json::Null | Json::Bool(_) | Json::Uint(_) | Json::Float(_)
                    )
                });
                if scalar_only {
                    out.push('[');
                    for (i, value) in values.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        value.write(out, indent);
                    }
                    out.push(']');
                    return;
                }
                out.push('[');
                for (i, value) in values.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Object(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Render a matrix as a row-major nested array, one row per line.
pub fn matrix_data_json(m: &DMatrix<f64>) -> Json {
    let rows = (0..m.nrows())
        .map(|i| Json::Array((0..m.ncols()).map(|j| Json::Float(m[(i, j)])).collect()))
        .collect();
    Json::Array(rows)
}

pub fn matrix_document_json(kind: MatrixKind, m: &DMatrix<f64>) -> Json {
    Json::Object(vec![
        ("n", Json::Uint(m.nrows())),
        ("kind", Json::Str(kind.name().to_string())),
        ("data", matrix_data_json(m)),
    ])
}

pub fn frame_document_json(
    dim: usize,
    items: &[(f64, Projection)],
    kind: MatrixKind,
) -> Json {
    let rendered = items
        .iter()
        .map(|(weight, p)| {
            Json::Object(vec![
                ("weight", Json::Float(*weight)),
                ("matrix", matrix_document_json(kind, p.matrix())),
            ])
        })
        .collect();
    Json::Object(vec![
        ("n", Json::Uint(dim)),
        ("items", Json::Array(rendered)),
    ])
}

/// Output documents end with a trailing newline.
pub fn render_document(json: &Json) -> String {
    let mut text = json.render();
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_digits() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_float(f64::INFINITY), "null");
    }

    #[test]
    fn float_round_trips_exactly() {
        for x in [
            1.0 / 3.0,
            2.0f64.sqrt(),
            -1.2345678901234567e-300,
            6.02214076e23,
            -0.0,
        ] {
            let parsed: f64 = fmt_float(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn matrix_document_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 1.0 / 3.0]);
        let text = render_document(&matrix_document_json(MatrixKind::Symmetric, &m));
        let doc = MatrixDocument::parse(&text).unwrap();
        assert_eq!(doc.n, 2);
        assert_eq!(doc.kind, MatrixKind::Symmetric);
        assert_eq!(doc.to_dmatrix(), m);
    }

    #[test]
    fn shape_validation() {
        let bad = r#"{"n": 2, "kind": "symmetric", "data": [[1.0, 0.0]]}"#;
        assert!(matches!(
            MatrixDocument::parse(bad),
            Err(DocError::Malformed(_))
        ));
    }

    #[test]
    fn projection_kind_is_validated() {
        let tol = Tolerance::default();
        let doc = MatrixDocument {
            n: 2,
            kind: MatrixKind::Projection,
            data: vec![vec![1.0, 0.0], vec![0.0, 0.5]],
        };
        assert!(matches!(
            doc.to_projection(&tol),
            Err(DocError::Domain {
                name: "NotIdempotent",
                ..
            })
        ));
    }
}
