//! Building systems by family name and the JSON system file format.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::denjoy::{build_denjoy, DenjoySystem};
use crate::error::{Error, Result};
use crate::exactnum::{interval_refine, ExactScalar};
use crate::space::{Coord, IndexBounds, SystemRef};
use crate::winding::{
    build_harmonic, build_limit_glue, build_tower, build_winding_x2, standard_s, LayerRef, LimitGlue, PrimeStream,
    TowerSpec, X2Params,
};

pub const FORMAT: u32 = 1;

pub const FAMILIES: [&str; 6] = ["denjoy", "standard-s", "winding-x2", "tower", "limit-glue", "harmonic"];

/// A built system together with its concrete type where callers need it.
#[derive(Clone)]
pub enum Built {
    Denjoy(Arc<DenjoySystem>),
    Layer(LayerRef),
    Glue(Arc<LimitGlue>),
    Plain(SystemRef),
}

impl Built {
    pub fn system(&self) -> SystemRef {
        match self {
            Built::Denjoy(d) => d.clone(),
            Built::Layer(l) => l.clone(),
            Built::Glue(g) => g.clone(),
            Built::Plain(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct DenjoyArgs {
    n: u32,
}

#[derive(Deserialize)]
struct GlueArgs {
    components: Vec<Component>,
    #[serde(default)]
    x0: Option<[ExactScalar; 2]>,
}

#[derive(Deserialize)]
struct Component {
    family: String,
    #[serde(default)]
    params: Value,
}

fn args<T: for<'de> Deserialize<'de>>(family: &str, params: &Value) -> Result<T> {
    serde_json::from_value(params.clone()).map_err(|e| Error::InvalidArgument(format!("bad {family} parameters: {e}")))
}

fn checked(primes: PrimeStream) -> Result<PrimeStream> {
    let mut p = PrimeStream::new(primes.base)?;
    for op in primes.path {
        p = p.sub(op);
    }
    Ok(p)
}

/// Builds a system from its family name and parameter object.
pub fn build_family(family: &str, params: &Value) -> Result<Built> {
    let params = if params.is_null() { &json!({}) } else { params };
    Ok(match family {
        "denjoy" => Built::Denjoy(Arc::new(build_denjoy(args::<DenjoyArgs>(family, params)?.n)?)),
        "standard-s" => Built::Plain(Arc::new(standard_s())),
        "harmonic" => Built::Plain(Arc::new(build_harmonic())),
        "winding-x2" => {
            let mut p: X2Params = args(family, params)?;
            p.primes = checked(p.primes)?;
            Built::Layer(Arc::new(build_winding_x2(p)?))
        }
        "tower" => {
            let mut spec: TowerSpec = args(family, params)?;
            spec.primes = checked(spec.primes)?;
            Built::Layer(build_tower(spec)?)
        }
        "limit-glue" => {
            let g: GlueArgs = args(family, params)?;
            let comps = g
                .components
                .iter()
                .map(|c| build_family(&c.family, &c.params).map(|b| b.system()))
                .collect::<Result<Vec<_>>>()?;
            let [x, y] = g.x0.unwrap_or_else(|| [ExactScalar::zero(), ExactScalar::zero()]);
            Built::Glue(Arc::new(build_limit_glue(comps, Coord::plane(x, y))?))
        }
        other => return Err(Error::InvalidArgument(format!("unknown family `{other}`"))),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile {
    pub format: u32,
    pub family: String,
    pub params: Value,
    pub bounds: Option<IndexBounds>,
    pub horizon: Option<u32>,
    #[serde(default)]
    pub details: Value,
}

pub fn load(path: &Path) -> Result<(SystemFile, Built)> {
    let text = std::fs::read_to_string(path)?;
    let file: SystemFile = serde_json::from_str(&text)?;
    if file.format != FORMAT {
        return Err(Error::Parse(format!("unsupported format {} in {}", file.format, path.display())));
    }
    let built = build_family(&file.family, &file.params)?;
    Ok((file, built))
}

fn coord_json(c: &Coord, bits: u32) -> Value {
    match c {
        Coord::Plane { x, y } => json!({ "x": x, "y": y }),
        Coord::Circle(pos) => {
            let iv = interval_refine(&pos.theta, bits);
            json!({ "theta": pos.theta, "theta_lo": iv.lo.to_string(), "theta_hi": iv.hi.to_string() })
        }
    }
}

/// Descriptive payload of a system file: description, certificates and a
/// point listing over `bounds` at `bits` of precision.
pub fn describe(built: &Built, bounds: &IndexBounds, bits: u32) -> Result<Value> {
    let sys = built.system();
    let points = if bounds.is_empty() { Vec::new() } else { sys.enumerate(bounds)? };
    let mut listing = Vec::new();
    for p in &points {
        let mut entry = json!({ "id": p, "coord": coord_json(&sys.coord(p)?, bits) });
        if let Built::Denjoy(d) = built {
            let iv = d.position(p, bits)?;
            entry["position"] = json!([iv.lo.to_string(), iv.hi.to_string()]);
        }
        listing.push(entry);
    }
    let mut out = json!({ "points": listing, "precision_bits": bits });
    if let Some(s) = sys.space() {
        out["schema"] = s.schema_json();
        out["rank"] = json!(s.cb_rank()?);
    }
    match built {
        Built::Denjoy(d) => {
            let fibers: Vec<Value> = (bounds.lo..=bounds.hi)
                .map(|k| {
                    json!({
                        "k": k,
                        "arc_length": crate::denjoy::arc_length(k).to_string(),
                        "points": (0..d.n()).map(|i| crate::space::Point::Arc { k, i }).collect::<Vec<_>>(),
                    })
                })
                .collect();
            out["fibers"] = json!(fibers);
            out["fiber_size"] = json!(d.n());
        }
        Built::Layer(l) => {
            out["certificates"] = serde_json::to_value(l.family_certificates(bounds.depth.clamp(1, 3))?)?;
        }
        Built::Glue(g) => {
            out["witness_chain"] = serde_json::to_value(g.witness_chain())?;
        }
        Built::Plain(_) => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_rebuild_from_params() {
        for fam in FAMILIES {
            let params = match fam {
                "denjoy" => json!({ "n": 3 }),
                "winding-x2" => json!({ "n": 2 }),
                "tower" => json!({ "alpha": "3", "n": 2 }),
                "limit-glue" => json!({ "components": [
                    { "family": "tower", "params": { "alpha": "2", "n": 2 } },
                    { "family": "tower", "params": { "alpha": "3", "n": 2 } },
                ] }),
                _ => json!({}),
            };
            let b = build_family(fam, &params).unwrap();
            let sys = b.system();
            assert_eq!(sys.family(), if fam == "tower" && params["alpha"] == "2" { "winding-x2" } else { fam });
            let again = build_family(fam, &sys.params()).unwrap().system();
            assert_eq!(again.params(), sys.params());
        }
        assert!(build_family("mystery", &json!({})).is_err());
        assert!(build_family("denjoy", &json!({ "n": 1 })).is_err());
    }
}
