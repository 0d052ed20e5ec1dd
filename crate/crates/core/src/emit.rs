//! Tab-separated tables from reports, for external plotting.

use std::fmt::Write;

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    CompanionProfile,
    ArcDiameter,
    OmegaChain,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::CompanionProfile => "companion-profile",
            TableKind::ArcDiameter => "arc-diameter",
            TableKind::OmegaChain => "omega-chain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [TableKind::CompanionProfile, TableKind::ArcDiameter, TableKind::OmegaChain]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table kind `{s}`")))
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            TableKind::CompanionProfile => &["horizon", "max_card", "witness_id"],
            TableKind::ArcDiameter => &["m", "diameter"],
            TableKind::OmegaChain => &["level", "class_count", "classes"],
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(xs) => xs.iter().map(cell).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Renders the rows of `report` (a full envelope). A report without rows
/// gives the header alone.
pub fn emit_table(report: &Value, kind: TableKind) -> Result<String> {
    let found = report.get("kind").and_then(Value::as_str).unwrap_or("");
    if found != kind.name() {
        return Err(Error::KindMismatch { expected: kind.name().to_string(), found: found.to_string() });
    }
    let mut out = kind.header().join("\t");
    out.push('\n');
    let empty = Vec::new();
    let rows = match kind {
        TableKind::OmegaChain => report["result"]["levels"].as_array(),
        _ => report["result"]["rows"].as_array(),
    }
    .unwrap_or(&empty);
    for row in rows {
        let cells: Vec<String> = match kind {
            TableKind::CompanionProfile => vec![cell(&row["horizon"]), cell(&row["max_card"]), cell(&row["witness"])],
            TableKind::ArcDiameter => vec![cell(&row["m"]), cell(&row["diameter"])],
            TableKind::OmegaChain => {
                let classes = row["classes"].as_array().map_or(0, Vec::len);
                vec![cell(&row["index"]), classes.to_string(), cell(&row["classes"])]
            }
        };
        writeln!(out, "{}", cells.join("\t")).expect("write to string");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    #[test]
    fn profile_rows_and_empty() {
        let r = json!({ "kind": "companion-profile", "result": { "rows": [
            { "horizon": 0, "max_card": 5, "witness": "s[0]" },
            { "horizon": 4, "max_card": 2, "witness": "x[1,1,3]" },
        ] } });
        let t = emit_table(&r, TableKind::CompanionProfile).unwrap();
        assert_eq!(t, "horizon\tmax_card\twitness_id\n0\t5\ts[0]\n4\t2\tx[1,1,3]\n");
        let empty = json!({ "kind": "arc-diameter", "result": { "rows": [] } });
        assert_eq!(emit_table(&empty, TableKind::ArcDiameter).unwrap(), "m\tdiameter\n");
        assert!(matches!(emit_table(&empty, TableKind::OmegaChain), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn chain_rows() {
        let r = json!({ "kind": "omega-chain", "result": { "levels": [
            { "index": 0, "classes": ["s_inf", "S", "x1"] },
            { "index": 1, "classes": ["s_inf"] },
        ] } });
        let t = emit_table(&r, TableKind::OmegaChain).unwrap();
        assert_eq!(t.lines().nth(1), Some("0\t3\ts_inf,S,x1"));
        assert!(TableKind::parse("histogram").is_err());
    }
}
