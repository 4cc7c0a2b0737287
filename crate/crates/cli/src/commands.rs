//! Subcommand implementations. Every JSON payload carries the config hash;
//! tabular output is CSV with '.' decimals and a leading comment line holding
//! the hash and truncation indicators.

use anyhow::{anyhow, Result};
use blbesov_core::ef::{euler_frobenius, TMask};
use blbesov_core::embed::{approximation_numbers, embedding_diagonal};
use blbesov_core::hardy::{hardy_c, verify_forward, verify_reverse, AxisStar, HardyWeights, OperatorSpec};
use blbesov_core::spaces::{
    analyze, b_norm, besov_norm_via_wavelets, f_norm, lp_besov_norm, Domain, MollifierSpec,
    NormKind, SpaceParams,
};
use blbesov_core::spline::bspline;
use blbesov_core::suite::{dilation_family_2d, standard_1d, standard_2d};
use blbesov_core::wavelet::{LocalizedBasis1D, TensorBasis};
use blbesov_core::weights::{muckenhoupt_constant, r0_estimate, CellMassTable, CubeFamily};
use serde_json::{json, Value};

use crate::parse::{parse_fn_nd, parse_weight_n};

pub struct Emitted {
    pub json: Value,
    pub csv: Option<String>,
}

fn domain_from(lo: &[f64], hi: &[f64]) -> Result<Domain> {
    Domain::new(lo.to_vec(), hi.to_vec()).map_err(|e| anyhow!(e.to_string()))
}

pub fn cmd_ef(order: usize, mask: Option<&str>, hash: &str) -> Result<Emitted> {
    let tmask = match mask {
        None => TMask::all_r(order),
        Some(s) => {
            let choices: Vec<bool> = s
                .split(',')
                .map(|t| match t.trim() {
                    "r" => Ok(false),
                    "1/r" | "recip" => Ok(true),
                    other => Err(anyhow!("mask entries are r or 1/r, got `{other}`")),
                })
                .collect::<Result<_>>()?;
            TMask::new(choices)
        }
    };
    let data = euler_frobenius(order, tmask)?;
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "order": order,
            "gram": data.gram,
            "roots": data.roots,
            "alphas": data.alphas,
            "beta": data.beta,
            "gamma": data.gamma,
            "lambdas": data.lambdas,
            "lam1": data.lam1,
        }),
        csv: None,
    })
}

pub fn cmd_spline(order: usize, shift: f64, samples: usize, hash: &str) -> Result<Emitted> {
    let b = bspline(order, shift)?;
    let (lo, hi) = b.support();
    let mut csv = format!("# config_hash={hash} truncation=exact-support\nx,value\n");
    for i in 0..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        csv.push_str(&format!("{x},{}\n", b.eval(x)));
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "order": order,
            "shift": shift,
            "breakpoints": b.breaks(),
            "pieces": b.pieces(),
        }),
        csv: Some(csv),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_wavelet(
    order: usize,
    kk: u8,
    m: usize,
    k: f64,
    s: f64,
    samples: usize,
    hash: &str,
) -> Result<Emitted> {
    let basis = LocalizedBasis1D::new(euler_frobenius(order, TMask::all_r(order))?, m, kk, k, s)?;
    let mut csv = format!("# config_hash={hash} truncation=exact-support\nx,phi,psi\n");
    let lo = basis.phi.support().0.min(basis.psi.support().0);
    let hi = basis.phi.support().1.max(basis.psi.support().1);
    for i in 0..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        csv.push_str(&format!("{x},{},{}\n", basis.phi.eval(x), basis.psi.eval(x)));
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "order": order,
            "kk": kk,
            "m": m,
            "k": k,
            "s": s,
            "lam1": basis.ef.lam1,
            "lam2": basis.lam2,
            "phi": { "breakpoints": basis.phi.breaks(), "pieces": basis.phi.pieces() },
            "psi": { "breakpoints": basis.psi.breaks(), "pieces": basis.psi.pieces() },
        }),
        csv: Some(csv),
    })
}

pub fn cmd_muck(
    weight: &str,
    p: f64,
    levels: u32,
    window: f64,
    r0_grid: Option<&str>,
    hash: &str,
) -> Result<Emitted> {
    let w = parse_weight_n(weight)?;
    let family = CubeFamily { max_level: levels, window };
    let mut report = muckenhoupt_constant(&w, p, &family)?;
    if let Some(grid) = r0_grid {
        let ps: Vec<f64> = grid
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| anyhow!("bad p value `{t}`")))
            .collect::<Result<_>>()?;
        report.r0_estimate = Some(r0_estimate(&w, &ps, 2.0)?);
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "weight": weight,
            "report": report,
        }),
        csv: None,
    })
}

fn build_basis(n_dim: usize, order: usize, kk: u8, m: usize) -> Result<TensorBasis> {
    let mut axes = Vec::new();
    for axis in 0..n_dim {
        let (akk, am) = if axis == 0 { (kk, m) } else { (0, 0) };
        axes.push(LocalizedBasis1D::new(
            euler_frobenius(order, TMask::all_r(order))?,
            am,
            akk,
            0.0,
            0.0,
        )?);
    }
    Ok(TensorBasis::new(axes)?)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_coeffs(
    f_spec: &str,
    order: usize,
    depth: usize,
    lo: &[f64],
    hi: &[f64],
    hash: &str,
) -> Result<Emitted> {
    let f = parse_fn_nd(f_spec)?;
    let domain = domain_from(lo, hi)?;
    let basis = build_basis(f.n_dim(), order, 0, 0)?;
    let coeffs = analyze(&f, &basis, depth, &domain)?;
    let mut csv = format!(
        "# config_hash={hash} truncation_warning={} shell_fraction={:.6e}\ni,d,tau1,tau2,value\n",
        coeffs.truncation_warning, coeffs.shell_fraction
    );
    for (key, v) in &coeffs.entries {
        csv.push_str(&format!("{},{},{},{},{v}\n", key.i, key.d, key.tau[0], key.tau[1]));
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "function": f_spec,
            "depth": depth,
            "entry_count": coeffs.entries.len(),
            "truncation_warning": coeffs.truncation_warning,
            "shell_fraction": coeffs.shell_fraction,
        }),
        csv: Some(csv),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_norm(
    kind: &str,
    f_spec: &str,
    weight: &str,
    s: f64,
    p: f64,
    q: f64,
    order: usize,
    depth: usize,
    lo: &[f64],
    hi: &[f64],
    r0: f64,
    hash: &str,
) -> Result<Emitted> {
    let f = parse_fn_nd(f_spec)?;
    let w = parse_weight_n(weight)?;
    let params = SpaceParams::new(p, q, s, w)?;
    let domain = domain_from(lo, hi)?;
    let basis = build_basis(f.n_dim(), order, 0, 0)?;
    let coeffs = analyze(&f, &basis, depth, &domain)?;
    let tables: Vec<CellMassTable> = params
        .weight
        .axes
        .iter()
        .map(|wx| CellMassTable::new(wx.clone()))
        .collect();
    let value = match kind {
        "b" => b_norm(&coeffs, &params, &tables)?,
        "f" => f_norm(&coeffs, &params, &tables)?,
        "wavelet" => besov_norm_via_wavelets(&f, &params, &basis, depth, &domain, r0, NormKind::Besov)?,
        "lp" => lp_besov_norm(&f, &params, &MollifierSpec::standard(), &domain, depth)?,
        other => return Err(anyhow!("norm kind `{other}` (use b|f|wavelet|lp)")),
    };
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "kind": kind,
            "function": f_spec,
            "weight": weight,
            "s": s, "p": p, "q": q,
            "depth": depth,
            "value": value,
            "truncation_warning": coeffs.truncation_warning,
            "shell_fraction": coeffs.shell_fraction,
        }),
        csv: None,
    })
}

fn parse_star(s: &str) -> Result<AxisStar> {
    match s.trim() {
        "0" | "none" => Ok(AxisStar::None),
        "+" | "plus" => Ok(AxisStar::Plus),
        "-" | "minus" => Ok(AxisStar::Minus),
        other => Err(anyhow!("axis star `{other}` (use 0|+|-)")),
    }
}

pub fn parse_operator(stars: &str, orders: &str, cuts: &str) -> Result<OperatorSpec> {
    let stars: Vec<AxisStar> = stars.split(',').map(parse_star).collect::<Result<_>>()?;
    let orders: Vec<usize> = orders
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| anyhow!("bad order `{t}`")))
        .collect::<Result<_>>()?;
    let cuts: Vec<f64> = cuts
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| anyhow!("bad cut `{t}`")))
        .collect::<Result<_>>()?;
    Ok(OperatorSpec::new(stars, orders, cuts)?)
}

/// Inline JSON form, e.g. `{"stars":["plus","none"],"orders":[1,0],"cuts":[0,0]}`.
pub fn parse_operator_json(text: &str) -> Result<OperatorSpec> {
    let mut spec: OperatorSpec = serde_json::from_str(text)?;
    if spec.whole_line.is_empty() {
        spec.whole_line = vec![false; spec.stars.len()];
    }
    spec.validate()?;
    Ok(spec)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_hardy(
    spec_json: Option<&str>,
    stars: &str,
    orders: &str,
    cuts: &str,
    w_spec: &str,
    u_spec: &str,
    p: f64,
    depth: usize,
    range: i64,
    hash: &str,
) -> Result<Emitted> {
    let spec = match spec_json {
        Some(text) => parse_operator_json(text)?,
        None => parse_operator(stars, orders, cuts)?,
    };
    let weights = HardyWeights {
        w: parse_weight_n(w_spec)?,
        u: parse_weight_n(u_spec)?,
        ubar: None,
        utilde: None,
    };
    let report = hardy_c(&spec, &weights, p, depth, range)?;
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "operator": spec,
            "p": p,
            "report": report,
        }),
        csv: None,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_verify(
    direction: &str,
    stars: &str,
    orders: &str,
    cuts: &str,
    w_spec: &str,
    u_spec: &str,
    s: f64,
    p: f64,
    q: f64,
    order: usize,
    depth: usize,
    range: i64,
    hash: &str,
) -> Result<Emitted> {
    let spec = parse_operator(stars, orders, cuts)?;
    let n = spec.n_dim();
    let w = parse_weight_n(w_spec)?;
    let u = parse_weight_n(u_spec)?;
    let total: usize = spec.orders.iter().sum();
    let mut axes = Vec::new();
    for axis in 0..n {
        let (kk, m) = if spec.stars[axis] != AxisStar::None {
            (1u8, order + spec.orders[axis])
        } else {
            (0u8, 0)
        };
        axes.push(LocalizedBasis1D::new(
            euler_frobenius(order, TMask::all_r(order))?,
            m,
            kk,
            0.0,
            0.0,
        )?);
    }
    let basis = TensorBasis::new(axes)?;
    let domain = if n == 2 {
        Domain::new(vec![-3.0, -4.0], vec![10.0, 9.0])?
    } else {
        Domain::one_dim(-3.0, 10.0)
    };
    let suite: Vec<(String, blbesov_core::spline::ProductFn)> = if n == 2 {
        let mut s2 = standard_2d();
        s2.extend(dilation_family_2d());
        s2
    } else {
        standard_1d()
    };
    let report = match direction {
        "forward" => {
            let weights = HardyWeights { w: w.clone(), u: u.clone(), ubar: None, utilde: None };
            let source = SpaceParams::new(p, q, s - total as f64, u)?;
            let target = SpaceParams::new(p, q, s, w)?;
            verify_forward(&spec, &weights, &source, &target, &suite, &basis, depth, &domain, 1.0, range)?
        }
        "reverse" => {
            let low = SpaceParams::new(p, q, s - total as f64, w.clone())?;
            let high = SpaceParams::new(p, q, s, w)?;
            verify_reverse(&spec, &low, &high, &suite, &basis, depth, &domain, 1.0)?
        }
        other => return Err(anyhow!("verify direction `{other}` (use forward|reverse)")),
    };
    let mut csv = format!(
        "# config_hash={hash} inconclusive={} c_constant={:?}\nname,rho\n",
        report.inconclusive, report.c_constant
    );
    for (name, rho) in report.names.iter().zip(&report.rhos) {
        csv.push_str(&format!("{name},{rho}\n"));
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "direction": direction,
            "report": report,
        }),
        csv: Some(csv),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_embed(
    s1: f64,
    s2: f64,
    v_spec: &str,
    w_spec: &str,
    depth: usize,
    k_max: usize,
    lo: &[f64],
    hi: &[f64],
    hash: &str,
) -> Result<Emitted> {
    let v = parse_weight_n(v_spec)?;
    let w = parse_weight_n(w_spec)?;
    let source = SpaceParams::new(2.0, 2.0, s1, v)?;
    let target = SpaceParams::new(2.0, 2.0, s2, w)?;
    let domain = domain_from(lo, hi)?;
    let model = embedding_diagonal(&source, &target, depth, &domain)?;
    let k_max = k_max.min(model.multipliers.len());
    let spectrum = approximation_numbers(&model, k_max)?;
    let mut csv = format!("# config_hash={hash} indices={}\nk,a_k\n", model.multipliers.len());
    for (k, a) in spectrum.a.iter().enumerate() {
        csv.push_str(&format!("{},{a}\n", k + 1));
    }
    Ok(Emitted {
        json: json!({
            "config_hash": hash,
            "s1": s1, "s2": s2,
            "index_count": model.multipliers.len(),
            "a": spectrum.a,
        }),
        csv: Some(csv),
    })
}
