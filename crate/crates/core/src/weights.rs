//! Product weights on R^N, dyadic cell masses and local Muckenhoupt constants.
//!
//! Cells are centered: `Q_{d,r}` with base `b` is the interval
//! `[(r-b-1/2)/2^d, (r-b+1/2)/2^d]`. Masses of power weights use closed-form
//! antiderivatives; quadrature is never applied across a singularity.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::gauss;

/// One-variable weight, positive a.e. and locally integrable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Weight1D {
    /// w(x) = c with c > 0.
    Constant(f64),
    /// w(x) = |x - center|^alpha, alpha > -1.
    Power { alpha: f64, center: f64 },
    /// w(x) = |x|^alpha for |x| <= 1 and exp(|x| - 1) for |x| > 1.
    PowerExpTail { alpha: f64 },
    /// w(x) = |x|^alpha with the scaling law w(cx) = c^alpha w(x).
    Homogeneous { alpha: f64 },
}

impl Weight1D {
    pub fn one() -> Self {
        Weight1D::Constant(1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Weight1D::Constant(c) => c,
            Weight1D::Power { alpha, center } => (x - center).abs().powf(alpha),
            Weight1D::PowerExpTail { alpha } => {
                if x.abs() <= 1.0 {
                    x.abs().powf(alpha)
                } else {
                    (x.abs() - 1.0).exp()
                }
            }
            Weight1D::Homogeneous { alpha } => x.abs().powf(alpha),
        }
    }

    /// Points where the weight is not smooth (piece boundaries for quadrature).
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Weight1D::Constant(_) => vec![],
            Weight1D::Power { center, .. } => vec![center],
            Weight1D::PowerExpTail { .. } => vec![-1.0, 0.0, 1.0],
            Weight1D::Homogeneous { .. } => vec![0.0],
        }
    }

    /// Polynomial degree of the weight on each smooth piece, when it is one.
    pub fn poly_degree(&self) -> Option<usize> {
        let int_deg = |alpha: f64| {
            if alpha >= 0.0 && alpha.fract() == 0.0 {
                Some(alpha as usize)
            } else {
                None
            }
        };
        match *self {
            Weight1D::Constant(_) => Some(0),
            Weight1D::Power { alpha, .. } => int_deg(alpha),
            Weight1D::Homogeneous { alpha } => int_deg(alpha),
            Weight1D::PowerExpTail { .. } => None,
        }
    }

    fn alpha_center(&self) -> Option<(f64, f64)> {
        match *self {
            Weight1D::Power { alpha, center } => Some((alpha, center)),
            Weight1D::Homogeneous { alpha } => Some((alpha, 0.0)),
            _ => None,
        }
    }

    /// Exact mass over [a, b].
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        match *self {
            Weight1D::Constant(c) => Ok(c * (b - a)),
            Weight1D::Power { .. } | Weight1D::Homogeneous { .. } => {
                let (alpha, center) = self.alpha_center().unwrap();
                power_integral(a, b, alpha, center, 0.0)
            }
            Weight1D::PowerExpTail { alpha } => {
                let mut total = 0.0;
                let cuts = [a, -1.0, 0.0, 1.0, b];
                let mut pts: Vec<f64> = cuts.iter().copied().filter(|&t| t >= a && t <= b).collect();
                pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                pts.dedup();
                for w in pts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let mid = 0.5 * (lo + hi);
                    if mid.abs() <= 1.0 {
                        total += power_integral(lo, hi, alpha, 0.0, 0.0)?;
                    } else {
                        total += gauss::integrate_adaptive(&|x: f64| (x.abs() - 1.0).exp(), lo, hi, 1e-12);
                    }
                }
                Ok(total)
            }
        }
    }

    /// Mass of w^q over [a, b], excising a core of half-width `excise` around
    /// the singular point when the exact integral does not converge.
    pub fn powered_mass(&self, a: f64, b: f64, q: f64, excise: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        match *self {
            Weight1D::Constant(c) => Ok(c.powf(q) * (b - a)),
            Weight1D::Power { .. } | Weight1D::Homogeneous { .. } => {
                let (alpha, center) = self.alpha_center().unwrap();
                let beta = alpha * q;
                if beta <= -1.0 && a < center && center < b {
                    if excise > 0.0 {
                        let left = power_integral(a, (center - excise).max(a), beta, center, 0.0)?;
                        let right = power_integral((center + excise).min(b), b, beta, center, 0.0)?;
                        return Ok(left + right);
                    }
                    return Ok(f64::INFINITY);
                }
                power_integral(a, b, beta, center, excise_if_boundary(beta, excise))
            }
            Weight1D::PowerExpTail { alpha } => {
                let core = Weight1D::Power { alpha, center: 0.0 };
                let mut total = 0.0;
                let cuts = [a, -1.0, 0.0, 1.0, b];
                let mut pts: Vec<f64> = cuts.iter().copied().filter(|&t| t >= a && t <= b).collect();
                pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                pts.dedup();
                for w in pts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let mid = 0.5 * (lo + hi);
                    if mid.abs() <= 1.0 {
                        total += core.powered_mass(lo, hi, q, excise)?;
                    } else {
                        total += gauss::integrate_adaptive(
                            &|x: f64| ((x.abs() - 1.0) * q).exp(),
                            lo,
                            hi,
                            1e-12,
                        );
                    }
                    if total.is_infinite() {
                        return Ok(f64::INFINITY);
                    }
                }
                Ok(total)
            }
        }
    }
}

fn excise_if_boundary(beta: f64, excise: f64) -> f64 {
    if beta <= -1.0 {
        excise
    } else {
        0.0
    }
}

/// Closed-form integral of |x - center|^beta over [a, b], excising
/// (center-excise, center+excise) when beta <= -1 and the endpoint touches
/// the singularity. Errors when the weight itself (beta used as alpha) is not
/// integrable on the cell.
fn power_integral(a: f64, b: f64, beta: f64, center: f64, excise: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let lo = a - center;
    let hi = b - center;
    if beta <= -1.0 && excise == 0.0 && lo <= 0.0 && hi >= 0.0 && (lo < 0.0 || hi > 0.0) {
        return Err(CoreError::NonIntegrable { a, b, alpha: beta });
    }
    // F(t) = t^{beta+1}/(beta+1) on t >= 0 (ln t when beta = -1)
    let anti = |t: f64| -> f64 {
        if beta == -1.0 {
            t.ln()
        } else {
            t.powf(beta + 1.0) / (beta + 1.0)
        }
    };
    let one_side = |t0: f64, t1: f64| -> f64 {
        // integral over distances [t0, t1], 0 <= t0 <= t1
        let t0 = t0.max(excise_if_boundary(beta, excise));
        if t1 <= t0 {
            0.0
        } else {
            anti(t1) - anti(t0)
        }
    };
    let mut total = 0.0;
    if lo < 0.0 {
        // part left of the singularity: distances from max(0,-hi) to -lo
        total += one_side((-hi).max(0.0), -lo);
    }
    if hi > 0.0 {
        total += one_side(lo.max(0.0), hi);
    }
    Ok(total)
}

/// Product weight on R^N, N in {1, 2}.
#[derive(Clone, Debug, Serialize)]
pub struct WeightN {
    pub axes: Vec<Weight1D>,
}

impl WeightN {
    pub fn new(axes: Vec<Weight1D>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(CoreError::Invalid(format!(
                "product weights support 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        Ok(WeightN { axes })
    }

    pub fn ones(n_dim: usize) -> Self {
        WeightN {
            axes: vec![Weight1D::one(); n_dim],
        }
    }

    pub fn n_dim(&self) -> usize {
        self.axes.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(w, &t)| w.eval(t)).product()
    }
}

/// Memoized per-axis masses of centered dyadic cells.
pub struct CellMassTable {
    weight: Weight1D,
    map: RwLock<HashMap<(u32, i64), f64>>,
}

impl CellMassTable {
    pub fn new(weight: Weight1D) -> Self {
        CellMassTable {
            weight,
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn weight(&self) -> &Weight1D {
        &self.weight
    }

    /// Endpoints of the cell `Q^[base]_{d,r}`.
    pub fn cell(d: u32, r: i64, base: i64) -> (f64, f64) {
        let h = 0.5f64.powi(d as i32);
        let t = (r - base) as f64;
        ((t - 0.5) * h, (t + 0.5) * h)
    }

    /// Mass of the weight over `Q^[base]_{d,r}`; memoized (insert-if-absent).
    pub fn mass(&self, d: u32, r: i64, base: i64) -> Result<f64> {
        let key = (d, r - base);
        if let Some(&v) = self.map.read().unwrap().get(&key) {
            return Ok(v);
        }
        let (a, b) = Self::cell(d, r, base);
        let v = self.weight.mass(a, b)?;
        self.map.write().unwrap().entry(key).or_insert(v);
        Ok(v)
    }
}

/// Dyadic cube family used for Muckenhoupt suprema: at every level
/// j = 0..=max_level, cubes of side 2^{-j} centered on the grid 2^{-j} Z^N,
/// restricted to [-window, window]^N.
#[derive(Clone, Copy, Debug)]
pub struct CubeFamily {
    pub max_level: u32,
    pub window: f64,
}

impl CubeFamily {
    pub fn standard() -> Self {
        CubeFamily {
            max_level: 4,
            window: 2.0,
        }
    }

    fn describe(&self) -> String {
        format!(
            "dyadic cubes, side 2^-j for j=0..={}, centers on 2^-j Z within |x|<={}",
            self.max_level, self.window
        )
    }
}

/// Estimate of a local Muckenhoupt constant over a sampled cube family.
#[derive(Clone, Debug, Serialize)]
pub struct MuckReport {
    pub p: f64,
    pub estimate: f64,
    pub r0_estimate: Option<f64>,
    pub family: String,
}

fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

/// A_p quantity of a single interval for one axis weight.
///
/// For p = 1 the essential supremum of 1/w is approximated by the maximum
/// over 64 Chebyshev nodes (an under-estimate). Divergent dual integrals are
/// regularized by excising a core of half-width `excise` around the singular
/// point, tying divergence detection to family refinement.
fn axis_quantity(w: &Weight1D, a: f64, b: f64, p: f64, excise: f64) -> Result<f64> {
    let len = b - a;
    let avg_w = w.mass(a, b)? / len;
    if p == 1.0 {
        let inv_max = chebyshev_nodes(a, b, 64)
            .into_iter()
            .map(|x| 1.0 / w.eval(x))
            .fold(0.0f64, f64::max);
        Ok(avg_w * inv_max)
    } else {
        let pp = p / (p - 1.0);
        let dual = w.powered_mass(a, b, 1.0 - pp, excise)? / len;
        Ok(avg_w * dual.powf(p / pp))
    }
}

/// Local Muckenhoupt constant estimate over the family.
pub fn muckenhoupt_constant(w: &WeightN, p: f64, family: &CubeFamily) -> Result<MuckReport> {
    if p < 1.0 {
        return Err(CoreError::Invalid(format!("p must satisfy p >= 1, got {p}")));
    }
    let excise = 0.5f64.powi(family.max_level as i32 + 2);
    let mut estimate = 1.0f64;
    let mut best = 0.0f64;
    // Product cubes: the quantity factorizes per axis, so the supremum over
    // cubes of a given side is the product of per-axis suprema.
    for j in 0..=family.max_level {
        let side = 0.5f64.powi(j as i32);
        let count = (family.window / side).ceil() as i64;
        let mut level_value = 1.0;
        for axis in &w.axes {
            let mut axis_sup = 0.0f64;
            for m in -count..=count {
                let c = m as f64 * side;
                let q = axis_quantity(axis, c - 0.5 * side, c + 0.5 * side, p, excise)?;
                axis_sup = axis_sup.max(q);
            }
            level_value *= axis_sup;
        }
        best = best.max(level_value);
    }
    estimate = estimate.max(best);
    Ok(MuckReport {
        p,
        estimate,
        r0_estimate: None,
        family: family.describe(),
    })
}

/// Growth of the Muckenhoupt estimate under cube refinement; used to flag
/// divergence at a given p.
pub fn refinement_growth(w: &WeightN, p: f64, rounds: u32) -> Result<(f64, Vec<f64>)> {
    let base = CubeFamily::standard();
    let mut values = Vec::new();
    for t in 0..=rounds {
        let fam = CubeFamily {
            max_level: base.max_level + t,
            window: base.window,
        };
        values.push(muckenhoupt_constant(w, p, &fam)?.estimate);
    }
    let growth = values[values.len() - 1] / values[0].max(1e-300);
    Ok((growth, values))
}

/// Empirical upper bound for r_0: smallest p in the ascending grid whose
/// estimate stops growing under refinement (growth over 4 extra rounds stays
/// below `threshold`).
pub fn r0_estimate(w: &WeightN, p_grid: &[f64], threshold: f64) -> Result<f64> {
    for &p in p_grid {
        let (growth, _) = refinement_growth(w, p, 4)?;
        if growth < threshold {
            return Ok(p);
        }
    }
    Ok(f64::INFINITY)
}

/// Empirical doubling exponent: max over unit cubes of log(w(Q_t)/w(Q))/t.
pub fn doubling_probe(w: &WeightN, t: f64, window: f64) -> Result<f64> {
    assert!((1.0..=8.0).contains(&t), "doubling probe requires 1 <= t <= 8");
    let count = window.ceil() as i64;
    let mut worst = f64::NEG_INFINITY;
    let n = w.n_dim();
    let centers_1d: Vec<f64> = (-count..=count).map(|m| m as f64).collect();
    let mut eval_cube = |center: &[f64]| -> Result<()> {
        let mut mass_q = 1.0;
        let mut mass_qt = 1.0;
        for (axis, &c) in w.axes.iter().zip(center) {
            mass_q *= axis.mass(c - 0.5, c + 0.5)?;
            mass_qt *= axis.mass(c - 0.5 * t, c + 0.5 * t)?;
        }
        worst = worst.max((mass_qt / mass_q).ln() / t);
        Ok(())
    };
    if n == 1 {
        for &c in &centers_1d {
            eval_cube(&[c])?;
        }
    } else {
        for &c1 in &centers_1d {
            for &c2 in &centers_1d {
                eval_cube(&[c1, c2])?;
            }
        }
    }
    Ok(worst)
}
