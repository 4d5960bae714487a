//! JSON and CSV catalog formats.
//!
//! JSON: `{"basis": [{"name", "value"}]?, "independence_declared": bool,
//! "lines": [{"s": real | {"coeffs": {name: "num/den"}}, "p", "mult"}],
//! "zero_lines": [{"p", "mult"}]}`. CSV: header `s,p,mult`, zero lines are
//! rows with `s = 0`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    format_rational, parse_rational, BasisFrequency, ExactFrequency, SpectralLine,
    SpectrumCatalog,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogFormat {
    Json,
    Csv,
}

impl CatalogFormat {
    /// `.csv` means CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CatalogFormat::Csv,
            _ => CatalogFormat::Json,
        }
    }
}

impl FromStr for CatalogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(CatalogFormat::Json),
            "csv" => Ok(CatalogFormat::Csv),
            other => Err(Error::Config(format!("unknown catalog format `{other}`"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<RawBasis>>,
    #[serde(default)]
    independence_declared: bool,
    #[serde(default)]
    lines: Vec<RawLine>,
    #[serde(default)]
    zero_lines: Vec<RawZeroLine>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    name: String,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawFrequency {
    Float(f64),
    Exact { coeffs: BTreeMap<String, String> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    s: RawFrequency,
    p: i64,
    mult: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZeroLine {
    p: i64,
    mult: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    s: f64,
    p: i64,
    mult: i64,
}

fn multiplicity(m: i64, s: impl std::fmt::Display, p: i64) -> Result<u64> {
    if m < 1 {
        return Err(Error::Constraint(format!(
            "multiplicity must be >= 1, got {m} (line s = {s}, p = {p})"
        )));
    }
    Ok(m as u64)
}

/// Reads a catalog from disk.
pub fn load_catalog(path: &Path, format: Option<CatalogFormat>) -> Result<SpectrumCatalog> {
    let text = std::fs::read_to_string(path)?;
    parse_catalog(&text, format.unwrap_or_else(|| CatalogFormat::from_path(path)))
}

/// Parses and canonicalizes catalog text.
pub fn parse_catalog(text: &str, format: CatalogFormat) -> Result<SpectrumCatalog> {
    match format {
        CatalogFormat::Json => parse_json(text),
        CatalogFormat::Csv => parse_csv(text),
    }
}

fn parse_json(text: &str) -> Result<SpectrumCatalog> {
    let raw: RawCatalog = serde_json::from_str(text)?;
    let basis: Vec<BasisFrequency> = raw
        .basis
        .unwrap_or_default()
        .into_iter()
        .map(|b| BasisFrequency {
            name: b.name,
            value: b.value,
        })
        .collect();

    let mut lines = Vec::with_capacity(raw.lines.len() + raw.zero_lines.len());
    for l in raw.lines {
        let line = match l.s {
            RawFrequency::Float(s) => SpectralLine::new(s, l.p, multiplicity(l.mult, s, l.p)?),
            RawFrequency::Exact { coeffs } => {
                let mut parsed = Vec::with_capacity(coeffs.len());
                for (name, c) in coeffs {
                    if !basis.iter().any(|b| b.name == name) {
                        return Err(Error::Basis(name));
                    }
                    parsed.push((name, parse_rational(&c)?));
                }
                let exact = ExactFrequency::new(parsed)?;
                let mult = multiplicity(l.mult, &exact, l.p)?;
                SpectralLine {
                    s: 0.0,
                    exact: Some(exact),
                    p: l.p,
                    mult,
                }
            }
        };
        lines.push(line);
    }
    for z in raw.zero_lines {
        lines.push(SpectralLine::zero(z.p, multiplicity(z.mult, 0, z.p)?));
    }
    SpectrumCatalog::new(lines, basis, raw.independence_declared)
}

fn parse_csv(text: &str) -> Result<SpectrumCatalog> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["s", "p", "mult"] {
        return Err(Error::Parse(format!(
            "catalog CSV header must be `s,p,mult`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut lines = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row?;
        lines.push(SpectralLine::new(row.s, row.p, multiplicity(row.mult, row.s, row.p)?));
    }
    SpectrumCatalog::new(lines, Vec::new(), false)
}

impl SpectrumCatalog {
    /// Serializes to the JSON schema accepted by [`parse_catalog`].
    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawCatalog {
            basis: if self.basis.is_empty() {
                None
            } else {
                Some(
                    self.basis
                        .iter()
                        .map(|b| RawBasis {
                            name: b.name.clone(),
                            value: b.value,
                        })
                        .collect(),
                )
            },
            independence_declared: self.independence_declared,
            lines: self
                .lines
                .iter()
                .map(|l| RawLine {
                    s: match &l.exact {
                        None => RawFrequency::Float(l.s),
                        Some(ex) => RawFrequency::Exact {
                            coeffs: ex
                                .coeffs
                                .iter()
                                .map(|(k, v)| (k.clone(), format_rational(v)))
                                .collect(),
                        },
                    },
                    p: l.p,
                    mult: l.mult as i64,
                })
                .collect(),
            zero_lines: self
                .zero_lines
                .iter()
                .map(|z| RawZeroLine {
                    p: z.p,
                    mult: z.mult as i64,
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("catalog serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("catalog serializes")
    }

    /// CSV with header `s,p,mult`; exact frequencies are written as their
    /// realized floats.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        w.write_record(["s", "p", "mult"])?;
        for l in self.zero_lines.iter().chain(&self.lines) {
            w.serialize(CsvRow {
                s: l.s,
                p: l.p,
                mult: l.mult as i64,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_merge_example() {
        let c = parse_catalog(
            r#"{"lines":[{"s":1.5,"p":1,"mult":1},{"s":-1.5,"p":-1,"mult":1}],"zero_lines":[]}"#,
            CatalogFormat::Json,
        )
        .unwrap();
        assert_eq!(c.lines, vec![SpectralLine::new(1.5, 1, 2)]);
    }

    #[test]
    fn json_zero_line_example() {
        let c = parse_catalog(
            r#"{"independence_declared":false,"lines":[],"zero_lines":[{"p":1,"mult":2}]}"#,
            CatalogFormat::Json,
        )
        .unwrap();
        assert!(c.lines.is_empty());
        assert_eq!(c.zero_lines, vec![SpectralLine::zero(1, 2)]);
    }

    #[test]
    fn csv_row_is_canonicalized() {
        let c = parse_catalog("s,p,mult\n0.0,-3,1\n", CatalogFormat::Csv).unwrap();
        assert_eq!(c.zero_lines, vec![SpectralLine::zero(3, 1)]);
        assert!(parse_catalog("a,b,c\n1,2,3\n", CatalogFormat::Csv).is_err());
        assert!(parse_catalog("s,p,mult\n1.0,x,1\n", CatalogFormat::Csv).is_err());
    }

    #[test]
    fn errors_are_classified() {
        let e = parse_catalog(r#"{"lines":[{"s":1.0,"p":0,"mult":0}]}"#, CatalogFormat::Json).unwrap_err();
        assert!(matches!(e, Error::Constraint(_)));
        let e = parse_catalog(r#"{"lines":[{"s":1.0,"p":0}]}"#, CatalogFormat::Json).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = parse_catalog(
            r#"{"lines":[{"s":{"coeffs":{"beta":"1/2"}},"p":0,"mult":1}]}"#,
            CatalogFormat::Json,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Basis(_)));
    }

    #[test]
    fn exact_round_trip() {
        let text = r#"{"basis":[{"name":"beta","value":4.770984191560898}],
            "lines":[{"s":{"coeffs":{"beta":"-11/18"}},"p":-1,"mult":1}]}"#;
        let c = parse_catalog(text, CatalogFormat::Json).unwrap();
        assert_eq!(c.lines[0].p, 1);
        let again = parse_catalog(&c.to_json(), CatalogFormat::Json).unwrap();
        assert_eq!(c, again);
        assert!(c.to_json().contains("\"11/18\""));
    }

    #[test]
    fn csv_round_trip() {
        let c = parse_catalog("s,p,mult\n2.5,1,3\n0,2,1\n-1.25,4,1\n", CatalogFormat::Csv).unwrap();
        let again = parse_catalog(&c.to_csv().unwrap(), CatalogFormat::Csv).unwrap();
        assert_eq!(c, again);
    }
}
