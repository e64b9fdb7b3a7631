//! JSON file formats: decompositions, exported MUB vectors and certificate
//! reports. Every document carries `format_version: "1"`, which is checked
//! before anything else is read.

use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constructions::{Decomposition, Family};
use crate::error::{Error, Result};
use crate::mub::{CertificateReport, MubFamily};
use crate::residue::{Gl2Matrix, Prime, ResidueScalar, Subspace2};
use crate::subalgebra::{phi_inverse, SubalgebraDesc, SubalgebraKind};
use crate::weyl::{ComplexMatrix, ComplexVector};

pub const FORMAT_VERSION: &str = "1";
/// Norm tolerance for reloaded MUB vectors.
pub const VECTOR_NORM_TOL: f64 = 1e-10;

/// A JSON document with a version gate.
pub trait Document: Serialize + DeserializeOwned {
    /// Top-level fields, in serialization order.
    const FIELDS: &'static [&'static str];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Metadata {
    pub fn now(seed: Option<u64>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Metadata { seed, tool_version: env!("CARGO_PKG_VERSION").into(), timestamp }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraEntry {
    pub kind: SubalgebraKind,
    /// Canonical echelon basis.
    pub subspace: [[u32; 4]; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub format_version: String,
    pub p: u32,
    pub family: Family,
    pub nonresidue: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<[[u32; 2]; 2]>>,
    pub subalgebras: Vec<SubalgebraEntry>,
    pub metadata: Metadata,
}

impl Document for DecompositionFile {
    const FIELDS: &'static [&'static str] =
        &["format_version", "p", "family", "nonresidue", "subalgebras", "metadata"];
}

impl DecompositionFile {
    pub fn from_decomposition(dec: &Decomposition, metadata: Metadata) -> Self {
        DecompositionFile {
            format_version: FORMAT_VERSION.into(),
            p: dec.p.get(),
            family: dec.family,
            nonresidue: dec.nonresidue.map(|d| d.value()),
            generators: dec.generators.as_ref().map(|g| g.iter().map(Gl2Matrix::entries).collect()),
            subalgebras: dec
                .subalgebras
                .iter()
                .map(|s| SubalgebraEntry { kind: s.kind, subspace: s.subspace.rows() })
                .collect(),
            metadata,
        }
    }

    /// Kind tags are kept as stored; only the plane arithmetic is checked.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let p = Prime::new(self.p as u64)?;
        let nonresidue = self.nonresidue.map(|d| ResidueScalar::new(d as i64, p));
        let generators = match &self.generators {
            Some(gens) => Some(
                gens.iter()
                    .map(|g| Gl2Matrix::new(g.map(|r| r.map(i64::from)), p))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let subalgebras = self
            .subalgebras
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let subspace = canonical_plane(e.subspace, p).map_err(|m| Error::Format(format!("subalgebra {k}: {m}")))?;
                Ok(SubalgebraDesc { kind: e.kind, subspace, gl2_rep: phi_inverse(&subspace).ok() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { p, family: self.family, nonresidue, subalgebras, generators })
    }
}

fn canonical_plane(rows: [[u32; 4]; 2], p: Prime) -> std::result::Result<Subspace2, String> {
    if rows.iter().flatten().any(|&x| x >= p.get()) {
        return Err(format!("entries must lie in 0..{p}"));
    }
    let s = Subspace2::from_rows(rows.map(|r| r.map(i64::from)), p).map_err(|e| e.to_string())?;
    if s.rows() != rows {
        return Err(format!("rows {rows:?} are not the canonical echelon basis {:?}", s.rows()));
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorEntry {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub source_subspace: [[u32; 4]; 2],
    pub vectors: Vec<VectorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MubVectorsFile {
    pub format_version: String,
    pub p: u32,
    pub dimension: usize,
    pub seed: Option<u64>,
    pub bases: Vec<BasisEntry>,
}

impl Document for MubVectorsFile {
    const FIELDS: &'static [&'static str] = &["format_version", "p", "dimension", "seed", "bases"];
}

impl MubVectorsFile {
    pub fn from_family(family: &MubFamily, seed: Option<u64>) -> Self {
        let bases = family
            .bases
            .iter()
            .zip(&family.source_masas)
            .map(|(u, s)| BasisEntry {
                source_subspace: s.subspace.rows(),
                vectors: u
                    .column_iter()
                    .map(|c| VectorEntry { re: c.iter().map(|z| z.re).collect(), im: c.iter().map(|z| z.im).collect() })
                    .collect(),
            })
            .collect();
        MubVectorsFile { format_version: FORMAT_VERSION.into(), p: family.p.get(), dimension: family.dimension(), seed, bases }
    }

    pub fn to_family(&self) -> Result<MubFamily> {
        let p = Prime::new(self.p as u64)?;
        let dim = (self.p * self.p) as usize;
        if self.dimension != dim {
            return Err(Error::Format(format!("dimension {} but p^2 = {dim}", self.dimension)));
        }
        let mut bases = Vec::with_capacity(self.bases.len());
        let mut masas = Vec::with_capacity(self.bases.len());
        for (b, entry) in self.bases.iter().enumerate() {
            let subspace = canonical_plane(entry.source_subspace, p).map_err(|m| Error::Format(format!("basis {b}: {m}")))?;
            masas.push(SubalgebraDesc::from_subspace(subspace));
            if entry.vectors.len() != dim {
                return Err(Error::Format(format!("basis {b} has {} vectors, expected {dim}", entry.vectors.len())));
            }
            let mut cols = Vec::with_capacity(dim);
            for (k, v) in entry.vectors.iter().enumerate() {
                if v.re.len() != dim || v.im.len() != dim {
                    return Err(Error::Format(format!("basis {b} vector {k} has the wrong length")));
                }
                let col = ComplexVector::from_iterator(dim, v.re.iter().zip(&v.im).map(|(&re, &im)| Complex64::new(re, im)));
                let norm = col.norm();
                if (norm - 1.0).abs() > VECTOR_NORM_TOL {
                    return Err(Error::Format(format!("basis {b} vector {k} has norm {norm}")));
                }
                cols.push(col);
            }
            bases.push(ComplexMatrix::from_columns(&cols));
        }
        Ok(MubFamily { p, bases, source_masas: masas })
    }
}

impl Document for CertificateReport {
    const FIELDS: &'static [&'static str] = &[
        "format_version",
        "p",
        "family",
        "subalgebra_count",
        "factor_count",
        "bound_required",
        "verdict",
        "checks",
        "residuals",
        "issues",
        "provenance",
    ];
}

pub fn to_json<T: Document>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn parse_error(e: &serde_json::Error, text: &str, fields: &[&str]) -> Error {
    let mut message = e.to_string();
    if e.is_eof() {
        // name the first top-level field the truncated text never reached
        if let Some(f) = fields.iter().find(|f| !text.contains(&format!("\"{f}\""))) {
            message = format!("{message}; missing field `{f}`");
        }
    }
    Error::Parse { line: e.line(), column: e.column(), message }
}

/// Checks the version gate, then parses. Unknown fields, missing fields and
/// syntax errors come back as [`Error::Parse`] with a position.
pub fn from_json<T: Document>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(&e, text, T::FIELDS))?;
    match value.get("format_version") {
        Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(Error::VersionMismatch { found: v.clone() }),
        Some(other) => return Err(Error::VersionMismatch { found: other.to_string() }),
        None if value.is_object() => {
            return Err(Error::Parse { line: 1, column: 1, message: "missing field `format_version`".into() })
        }
        None => return Err(Error::Parse { line: 1, column: 1, message: "expected a JSON object".into() }),
    }
    serde_json::from_str(text).map_err(|e| parse_error(&e, text, T::FIELDS))
}
