//! JSON documents for pencils and transform results.
//!
//! Scalars travel as strings (`"620/63"`) so exact values survive any JSON
//! parser. Output is pretty-printed with a fixed key order and a trailing
//! newline, so identical inputs give byte-identical files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pencil::{Epsilon, PencilError, PencilSpec, TransformResult};
use crate::polyseq::Polynomial;
use crate::scalar::{Field, Rational, ScalarError};

pub const PENCIL_FORMAT: &str = "gevp-pencil/1";
pub const RESULT_FORMAT: &str = "gevp-result/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("parse error at {path}: {source}")]
    Parse { path: String, source: ScalarError },
    #[error("length mismatch: {0}")]
    LengthMismatch(PencilError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn from_pencil_error(err: PencilError) -> IoError {
    match err {
        PencilError::BadEpsilon(v) => schema("epsilon", format!("entries must be 0 or 1, found {v}")),
        PencilError::EmptyPencil => schema("N", "must be at least 1"),
        PencilError::NoFactors => schema("M", "must be at least 1"),
        other => IoError::LengthMismatch(other),
    }
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), IoError> {
    if expected == found {
        Ok(())
    } else {
        Err(IoError::LengthMismatch(PencilError::LengthMismatch {
            what: what.into(),
            expected,
            found,
        }))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRows {
    Nested(Vec<Vec<String>>),
    Flat(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPencil {
    format: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(default)]
    epsilon: Option<Vec<u64>>,
    q: RawRows,
    e: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResult {
    format: String,
    kind: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(default)]
    epsilon: Option<Vec<u64>>,
    q_hat: RawRows,
    e_hat: Vec<String>,
    #[serde(default)]
    charpoly: Option<Vec<String>>,
    #[serde(default)]
    verified: Option<bool>,
}

#[derive(Deserialize)]
struct FormatProbe {
    format: Option<String>,
}

fn parse_json<'de, T: Deserialize<'de>>(bytes: &'de [u8]) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        schema(path, err.into_inner().to_string())
    })
}

fn check_format(found: &str, expected: &str) -> Result<(), IoError> {
    if found == expected {
        Ok(())
    } else {
        Err(schema("format", format!("expected \"{expected}\", found \"{found}\"")))
    }
}

fn parse_vec<S: Field>(items: &[String], path: &str) -> Result<Vec<S>, IoError> {
    items
        .iter()
        .enumerate()
        .map(|(i, text)| {
            Rational::parse(text)
                .map(|r| S::from_rational(&r))
                .map_err(|source| IoError::Parse {
                    path: format!("{path}[{i}]"),
                    source,
                })
        })
        .collect()
}

fn parse_rows<S: Field>(rows: &RawRows, name: &str, n: usize, m: usize) -> Result<Vec<Vec<S>>, IoError> {
    let rows: Vec<&[String]> = match rows {
        RawRows::Nested(rows) => rows.iter().map(Vec::as_slice).collect(),
        RawRows::Flat(row) if m == 1 => vec![row.as_slice()],
        RawRows::Flat(_) => {
            return Err(schema(name, format!("a flat array needs M = 1, found M = {m}")))
        }
    };
    check_len(name, m, rows.len())?;
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            let path = format!("{name}[{k}]");
            check_len(&path, n, row.len())?;
            parse_vec(row, &path)
        })
        .collect()
}

fn parse_epsilon(epsilon: Option<&[u64]>, n: usize) -> Result<Epsilon, IoError> {
    match epsilon {
        None => Ok(Epsilon::all_ones(n)),
        Some(bits) => {
            check_len("epsilon", n.saturating_sub(1), bits.len())?;
            Epsilon::from_ints(bits).map_err(from_pencil_error)
        }
    }
}

fn check_sizes(n: usize, m: usize) -> Result<(), IoError> {
    if n == 0 {
        return Err(schema("N", "must be at least 1"));
    }
    if m == 0 {
        return Err(schema("M", "must be at least 1"));
    }
    Ok(())
}

/// Reads a pencil, converting every scalar once into `S`.
pub fn read_pencil_as<S: Field>(bytes: &[u8]) -> Result<PencilSpec<S>, IoError> {
    let raw: RawPencil = parse_json(bytes)?;
    check_format(&raw.format, PENCIL_FORMAT)?;
    check_sizes(raw.n, raw.m)?;
    let epsilon = parse_epsilon(raw.epsilon.as_deref(), raw.n)?;
    let q = parse_rows(&raw.q, "q", raw.n, raw.m)?;
    check_len("e", raw.n - 1, raw.e.len())?;
    let e = parse_vec(&raw.e, "e")?;
    PencilSpec::new(q, e, epsilon).map_err(from_pencil_error)
}

/// Reads a pencil exactly.
pub fn read_pencil(bytes: &[u8]) -> Result<PencilSpec<Rational>, IoError> {
    read_pencil_as(bytes)
}

/// A result document with its optional verification fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDocument {
    pub result: TransformResult<Rational>,
    pub charpoly: Option<Polynomial>,
    pub verified: Option<bool>,
}

pub fn read_result(bytes: &[u8]) -> Result<ResultDocument, IoError> {
    let raw: RawResult = parse_json(bytes)?;
    check_format(&raw.format, RESULT_FORMAT)?;
    check_sizes(raw.n, raw.m)?;
    let expected_kind = kind_for(raw.m);
    if raw.kind != expected_kind {
        return Err(schema(
            "kind",
            format!("M = {} requires \"{expected_kind}\", found \"{}\"", raw.m, raw.kind),
        ));
    }
    let epsilon = parse_epsilon(raw.epsilon.as_deref(), raw.n)?;
    let q_hat = parse_rows(&raw.q_hat, "q_hat", raw.n, raw.m)?;
    check_len("e_hat", raw.n - 1, raw.e_hat.len())?;
    let e_hat = parse_vec(&raw.e_hat, "e_hat")?;
    let charpoly = match &raw.charpoly {
        Some(coeffs) => {
            check_len("charpoly", raw.n + 1, coeffs.len())?;
            Some(Polynomial::new(parse_vec(coeffs, "charpoly")?))
        }
        None => None,
    };
    let result = TransformResult::new(q_hat, e_hat, epsilon).map_err(from_pencil_error)?;
    Ok(ResultDocument {
        result,
        charpoly,
        verified: raw.verified,
    })
}

/// Either kind of document, told apart by its `format` field.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Pencil(PencilSpec<Rational>),
    Result(ResultDocument),
}

pub fn read_document(bytes: &[u8]) -> Result<Document, IoError> {
    let probe: FormatProbe = parse_json(bytes)?;
    match probe.format.as_deref() {
        Some(PENCIL_FORMAT) => read_pencil(bytes).map(Document::Pencil),
        Some(RESULT_FORMAT) => read_result(bytes).map(Document::Result),
        Some(other) => Err(schema("format", format!("unknown format \"{other}\""))),
        None => Err(schema("format", "missing field `format`")),
    }
}

fn kind_for(m: usize) -> &'static str {
    if m == 1 {
        "tridiagonal"
    } else {
        "hessenberg"
    }
}

fn strings<S: Field>(values: &[S]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
struct PencilOut {
    format: &'static str,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    epsilon: Vec<u64>,
    q: Vec<Vec<String>>,
    e: Vec<String>,
}

#[derive(Serialize)]
struct ResultOut {
    format: &'static str,
    kind: &'static str,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    epsilon: Vec<u64>,
    q_hat: Vec<Vec<String>>,
    e_hat: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    charpoly: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("document serializes");
    out.push('\n');
    out
}

/// Canonical pencil document. `epsilon` and the nested `q` are always written.
pub fn write_pencil<S: Field>(spec: &PencilSpec<S>) -> String {
    to_pretty(&PencilOut {
        format: PENCIL_FORMAT,
        n: spec.n,
        m: spec.m,
        epsilon: spec.epsilon.to_ints(),
        q: spec.q.iter().map(|row| strings(row)).collect(),
        e: strings(&spec.e),
    })
}

/// Optional verification fields for [`write_result`].
#[derive(Debug, Clone, Default)]
pub struct WriteOptions<'a> {
    pub charpoly: Option<&'a Polynomial>,
    pub verified: Option<bool>,
}

/// Canonical result document. Float results are written in shortest
/// round-trip decimal form and cannot be read back exactly.
pub fn write_result<S: Field>(result: &TransformResult<S>, options: &WriteOptions<'_>) -> String {
    to_pretty(&ResultOut {
        format: RESULT_FORMAT,
        kind: kind_for(result.m),
        n: result.n,
        m: result.m,
        epsilon: result.epsilon.to_ints(),
        q_hat: result.q_hat.iter().map(|row| strings(row)).collect(),
        e_hat: strings(&result.e_hat),
        charpoly: options.charpoly.map(|p| {
            let mut c = strings(p.coeffs());
            c.resize(result.n + 1, "0".into());
            c
        }),
        verified: options.verified,
    })
}
