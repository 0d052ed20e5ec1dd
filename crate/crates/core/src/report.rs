//! Versioned JSON report envelope and atomic file output.

use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const FORMAT: u32 = 1;

/// Everything that determines a report. Output depends on nothing else.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub family: Option<String>,
    pub params: Option<Value>,
    pub bounds: Option<crate::space::IndexBounds>,
    pub horizon: Option<u32>,
    pub deltas: Vec<String>,
    pub options: Value,
    pub out: Option<String>,
    pub precision_bits: u32,
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub kind: String,
    pub ok: bool,
    pub config: RunConfig,
    pub result: Value,
}

impl Report {
    pub fn new(kind: &str, ok: bool, config: RunConfig, result: impl Serialize) -> Result<Self> {
        Ok(Self { kind: kind.to_string(), ok, config, result: serde_json::to_value(result)? })
    }

    pub fn to_value(&self) -> Result<Value> {
        Ok(json!({
            "format": FORMAT,
            "kind": self.kind,
            "ok": self.ok,
            "config": serde_json::to_value(&self.config)?,
            "result": self.result,
        }))
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(&self.to_value()?)?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Reads a report file and checks its format version.
pub fn read_report(path: &Path) -> Result<Value> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    match v.get("format").and_then(Value::as_u64) {
        Some(f) if f == u64::from(FORMAT) => Ok(v),
        other => Err(Error::Parse(format!("{}: unsupported report format {other:?}", path.display()))),
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name =
        path.file_name().ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(res?)
}

/// Decimal rendering of `x` truncated toward zero after `digits` places.
pub fn decimal(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let scaled = x.abs() * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
    let (q, _) = scaled.numer().div_rem(scaled.denom());
    let mut s = q.to_string();
    if s.len() <= digits {
        s = "0".repeat(digits + 1 - s.len()) + &s;
    }
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Decimal places matching `bits` of binary precision.
pub fn digits_for_bits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(&q(1, 3), 4), "0.3333");
        assert_eq!(decimal(&q(-7, 2), 2), "-3.50");
        assert_eq!(decimal(&q(1, 96), 3), "0.010");
        assert_eq!(decimal(&q(5, 1), 0), "5");
        assert_eq!(digits_for_bits(64), 20);
    }

    #[test]
    fn envelope_is_sorted_and_atomic() {
        let r = Report::new("demo", true, RunConfig::default(), json!({ "b": 1, "a": 2 })).unwrap();
        let text = String::from_utf8(r.to_bytes().unwrap()).unwrap();
        assert!(text.find("\"config\"").unwrap() < text.find("\"format\"").unwrap());
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        let dir = std::env::temp_dir().join(format!("expansive-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.json");
        write_atomic(&path, &r.to_bytes().unwrap()).unwrap();
        assert_eq!(read_report(&path).unwrap()["kind"], "demo");
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
