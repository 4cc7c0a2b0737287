//! Textual specs for weights and functions, e.g. `power:alpha=0.5,center=0`
//! or `bspline:n=3,level=1,shift=0.5`; axes of product objects are joined
//! with `|`.

use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};
use blbesov_core::spline::{bspline, pp_combine, CombineTerm, PiecewisePoly, ProductFn};
use blbesov_core::weights::{Weight1D, WeightN};

fn split_kv(body: &str) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    if body.trim().is_empty() {
        return Ok(out);
    }
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got `{part}`"))?;
        let val: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("bad numeric value in `{part}`"))?;
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}

pub fn parse_weight_1d(spec: &str) -> Result<Weight1D> {
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let kv = split_kv(body)?;
    let get = |k: &str, default: Option<f64>| -> Result<f64> {
        kv.get(k)
            .copied()
            .or(default)
            .ok_or_else(|| anyhow!("weight spec `{spec}` is missing `{k}`"))
    };
    match head.trim() {
        "one" => Ok(Weight1D::one()),
        "const" => {
            let c = get("c", Some(1.0))?;
            if c <= 0.0 {
                bail!("constant weight must be positive");
            }
            Ok(Weight1D::Constant(c))
        }
        "power" => Ok(Weight1D::Power {
            alpha: get("alpha", None)?,
            center: get("center", Some(0.0))?,
        }),
        "exptail" => Ok(Weight1D::PowerExpTail { alpha: get("alpha", None)? }),
        "homog" => Ok(Weight1D::Homogeneous { alpha: get("alpha", None)? }),
        other => bail!("unknown weight kind `{other}` (use one|const|power|exptail|homog)"),
    }
}

pub fn parse_weight_n(spec: &str) -> Result<WeightN> {
    let axes: Vec<Weight1D> = spec
        .split('|')
        .map(parse_weight_1d)
        .collect::<Result<_>>()?;
    WeightN::new(axes).map_err(|e| anyhow!(e.to_string()))
}

pub fn parse_fn_1d(spec: &str) -> Result<PiecewisePoly> {
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let kv = split_kv(body)?;
    match head.trim() {
        "bspline" => {
            let n = *kv.get("n").ok_or_else(|| anyhow!("`bspline` needs n"))? as usize;
            let level = kv.get("level").copied().unwrap_or(0.0) as i32;
            let shift = kv.get("shift").copied().unwrap_or(0.0);
            let scale = kv.get("scale").copied().unwrap_or(1.0);
            let base = bspline(n, 0.0).map_err(|e| anyhow!(e.to_string()))?;
            Ok(pp_combine(&[CombineTerm {
                coeff: scale,
                f: &base,
                level,
                shift,
            }]))
        }
        "const" => {
            let lo = kv.get("lo").copied().unwrap_or(0.0);
            let hi = kv.get("hi").copied().unwrap_or(1.0);
            let c = kv.get("c").copied().unwrap_or(1.0);
            PiecewisePoly::new(vec![lo, hi], vec![vec![c]], 0).map_err(|e| anyhow!(e.to_string()))
        }
        other => bail!("unknown function kind `{other}` (use bspline|const)"),
    }
}

pub fn parse_fn_nd(spec: &str) -> Result<ProductFn> {
    let axes: Vec<PiecewisePoly> = spec.split('|').map(parse_fn_1d).collect::<Result<_>>()?;
    ProductFn::new(axes).map_err(|e| anyhow!(e.to_string()))
}
