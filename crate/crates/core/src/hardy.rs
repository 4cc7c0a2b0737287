//! Riemann-Liouville integration operators of natural order, the discrete
//! weighted Hardy quantities M(d), N(d) and their composite constant, a
//! brute-force best-constant search, and the two-sided verification harness
//! for the image/pre-image norm inequalities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::gauss;
use crate::spaces::{besov_norm_via_wavelets, Domain, NormKind, SpaceParams};
use crate::spline::{PiecewisePoly, ProductFn};
use crate::wavelet::TensorBasis;
use crate::weights::{CellMassTable, WeightN};

/// Per-axis role in a combined integration operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisStar {
    None,
    Plus,
    Minus,
}

/// A combination of one-sided integration operators across axes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub stars: Vec<AxisStar>,
    pub orders: Vec<usize>,
    pub cuts: Vec<f64>,
    /// Per-axis whole-line variant: the cut is ignored and no mask applies.
    #[serde(default)]
    pub whole_line: Vec<bool>,
}

impl OperatorSpec {
    pub fn new(stars: Vec<AxisStar>, orders: Vec<usize>, cuts: Vec<f64>) -> Result<Self> {
        let n = stars.len();
        let whole_line = vec![false; n];
        let spec = OperatorSpec { stars, orders, cuts, whole_line };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.stars.len();
        if n == 0 || n > 2 || self.orders.len() != n || self.cuts.len() != n || self.whole_line.len() != n {
            return Err(CoreError::Invalid("operator axes must agree and be 1 or 2".into()));
        }
        for (star, &m) in self.stars.iter().zip(&self.orders) {
            match star {
                AxisStar::None if m != 0 => {
                    return Err(CoreError::Invalid("inactive axes must have order 0".into()))
                }
                AxisStar::Plus | AxisStar::Minus if m == 0 => {
                    return Err(CoreError::Invalid("active axes must have order >= 1".into()))
                }
                _ => {}
            }
        }
        if self.active_axes().is_empty() {
            return Err(CoreError::Invalid("at least one axis must be active".into()));
        }
        Ok(())
    }

    pub fn n_dim(&self) -> usize {
        self.stars.len()
    }

    pub fn total_order(&self) -> usize {
        self.orders.iter().sum()
    }

    pub fn active_axes(&self) -> Vec<usize> {
        (0..self.stars.len())
            .filter(|&k| self.stars[k] != AxisStar::None)
            .collect()
    }
}

fn abs_mass(f: &PiecewisePoly, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut cuts: Vec<f64> = f
        .breaks()
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    cuts.insert(0, lo);
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| gauss::integrate(|x| f.eval(x).abs(), w[0], w[1], 12))
        .sum()
}

/// Reflection g(x) = f(2 c - x).
fn reflect(f: &PiecewisePoly, center: f64) -> PiecewisePoly {
    let breaks = f.breaks();
    let pieces = f.pieces();
    let new_breaks: Vec<f64> = breaks.iter().rev().map(|&b| 2.0 * center - b).collect();
    let mut new_pieces = Vec::with_capacity(pieces.len());
    for i in (0..pieces.len()).rev() {
        let width = breaks[i + 1] - breaks[i];
        // local u on [2c - b_{i+1}, 2c - b_i): f local t = width - u
        new_pieces.push(compose_neg(&pieces[i], width));
    }
    // breakpoints may be non-strictly ordered only if input was degenerate
    if new_breaks.windows(2).any(|w| w[1] <= w[0]) {
        return PiecewisePoly::zero(f.degree());
    }
    PiecewisePoly::new(new_breaks, new_pieces, f.degree()).expect("reflection keeps validity")
}

fn compose_neg(p: &[f64], width: f64) -> Vec<f64> {
    // p(width - u) expanded in u
    let mut out = vec![0.0];
    for &c in p.iter().rev() {
        let mut next = vec![0.0; out.len() + 1];
        for (k, &v) in out.iter().enumerate() {
            next[k] += v * width;
            next[k + 1] -= v;
        }
        next[0] += c;
        out = next;
    }
    out.truncate(p.len().max(1));
    out
}

/// Cumulative integral on [from, to]: F(x) = integral of f over [from, x],
/// materialized with its constant continuation past the support.
fn cumulative(f: &PiecewisePoly, from: f64, to: f64) -> PiecewisePoly {
    let mut cuts: Vec<f64> = f
        .breaks()
        .iter()
        .copied()
        .filter(|&b| b > from && b < to)
        .collect();
    cuts.insert(0, from);
    cuts.push(to);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let deg = f.degree() + 1;
    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    let mut running = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        // piece polynomial of f on this segment, re-anchored at a
        let clipped = f.clip(a, b);
        let mut anti = vec![0.0; deg + 1];
        anti[0] = running;
        if let Some(seg) = clipped {
            if f.eval(mid) != 0.0 || !seg.is_zero() {
                let local = &seg.pieces()[0];
                for (k, &c) in local.iter().enumerate() {
                    anti[k + 1] = c / (k as f64 + 1.0);
                }
            }
        }
        running = {
            let mut acc = 0.0;
            for &c in anti.iter().rev() {
                acc = acc * (b - a) + c;
            }
            acc
        };
        pieces.push(anti);
    }
    PiecewisePoly::new(cuts, pieces, deg).expect("cumulative construction")
}

/// One-axis integration of natural order with a cut and direction.
fn integrate_axis(
    f: &PiecewisePoly,
    star: AxisStar,
    order: usize,
    cut: f64,
    whole_line: bool,
    lo: f64,
    hi: f64,
) -> Result<PiecewisePoly> {
    match star {
        AxisStar::None => Ok(f.clone()),
        AxisStar::Plus => {
            let start = if whole_line { f.support().0.min(lo) } else { cut };
            if !whole_line {
                let total = abs_mass(f, f.support().0, f.support().1).max(1e-300);
                let dead = abs_mass(f, f.support().0, cut.min(f.support().1));
                if dead > 1e-12 * total {
                    return Err(CoreError::SupportViolation { cut, mass: dead });
                }
            }
            let mut g = f.clone();
            for _ in 0..order {
                g = cumulative(&g, start, hi);
            }
            if whole_line {
                probe_local_integrability(&g, lo, hi)?;
            }
            Ok(g)
        }
        AxisStar::Minus => {
            if !whole_line {
                let total = abs_mass(f, f.support().0, f.support().1).max(1e-300);
                let dead = abs_mass(f, cut.max(f.support().0), f.support().1);
                if dead > 1e-12 * total {
                    return Err(CoreError::SupportViolation { cut, mass: dead });
                }
            }
            // I^- f = reflect of I^+ applied to the reflection about the cut
            let center = if whole_line { 0.5 * (lo + hi) } else { cut };
            let r = reflect(f, center);
            let start = if whole_line { r.support().0.min(lo) } else { center };
            let mut g = r;
            for _ in 0..order {
                g = cumulative(&g, start, 2.0 * center - lo);
            }
            let out = reflect(&g, center);
            if whole_line {
                probe_local_integrability(&out, lo, hi)?;
            }
            Ok(out)
        }
    }
}

/// Whole-line variants carry no mask; the image must still be locally
/// integrable, probed as a finite absolute mass over the working box.
fn probe_local_integrability(g: &PiecewisePoly, lo: f64, hi: f64) -> Result<()> {
    let mass = abs_mass(g, lo, hi);
    if !mass.is_finite() {
        return Err(CoreError::Invalid(
            "whole-line image is not locally integrable over the box".into(),
        ));
    }
    Ok(())
}

/// Applies the operator axis by axis; the result is materialized over the
/// domain (cumulative integrals have unbounded support, so the tail is kept
/// as explicit constant pieces up to the box edge).
pub fn rl_apply(spec: &OperatorSpec, f: &ProductFn, domain: &Domain) -> Result<ProductFn> {
    spec.validate()?;
    if f.n_dim() != spec.n_dim() || domain.n_dim() != spec.n_dim() {
        return Err(CoreError::Invalid("operator, function and domain dimensions must agree".into()));
    }
    let mut axes = Vec::with_capacity(f.axes.len());
    for (k, fx) in f.axes.iter().enumerate() {
        axes.push(integrate_axis(
            fx,
            spec.stars[k],
            spec.orders[k],
            spec.cuts[k],
            spec.whole_line[k],
            domain.lo[k],
            domain.hi[k],
        )?);
    }
    ProductFn::new(axes)
}

/// Grid route: the order-m integral via its one-fold kernel form, composite
/// Gauss per grid cell. Used to cross-check the exact piecewise route.
pub fn rl_apply_grid<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    order: usize,
    cut: f64,
    grid: &[f64],
) -> Vec<f64> {
    let mfact: f64 = (1..order).map(|k| k as f64).product();
    grid.par_iter()
        .map(|&x| {
            if x <= cut {
                return 0.0;
            }
            // split [cut, x] at grid points for composite quadrature
            let mut acc = 0.0;
            let mut a = cut;
            for &g in grid.iter().filter(|&&g| g > cut && g < x) {
                acc += gauss::integrate(|y| (x - y).powi(order as i32 - 1) * f(y), a, g, 8);
                a = g;
            }
            acc += gauss::integrate(|y| (x - y).powi(order as i32 - 1) * f(y), a, x, 8);
            acc / mfact
        })
        .collect()
}

/// Direction of the one-sided discrete Hardy quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Plus,
    Minus,
}

struct QuantityInput<'a> {
    w: &'a CellMassTable,
    u: &'a CellMassTable,
    p: f64,
    d: u32,
    base: i64,
    range: i64,
    dir: Direction,
}

/// Shared two-term supremum with configurable index powers. Returns the value
/// and whether a supremum was attained in the outermost quarter of the range.
fn hardy_quantity(inp: &QuantityInput<'_>, pow_w: f64, pow_u: f64) -> Result<(f64, bool)> {
    let p = inp.p;
    let pp = p / (p - 1.0);
    let r_range: Vec<i64> = match inp.dir {
        Direction::Plus => (inp.base..=inp.base + inp.range).collect(),
        Direction::Minus => (inp.base - inp.range..=inp.base).collect(),
    };
    let w_mass: Vec<f64> = r_range
        .iter()
        .map(|&r| inp.w.mass(inp.d, r, inp.base))
        .collect::<Result<_>>()?;
    let u_dual: Vec<f64> = r_range
        .iter()
        .map(|&r| inp.u.mass(inp.d, r, inp.base).map(|m| m.powf(1.0 - pp)))
        .collect::<Result<_>>()?;
    let count = r_range.len();
    let mut best1 = (f64::NEG_INFINITY, 0usize);
    let mut best2 = (f64::NEG_INFINITY, 0usize);
    for ti in 0..count {
        // index distance |r - tau| + 1 enters the power weights; the w-side
        // runs away from the base, the u-side towards it
        let (w_side, u_side): (Vec<usize>, Vec<usize>) = match inp.dir {
            Direction::Plus => ((ti..count).collect(), (0..=ti).collect()),
            Direction::Minus => ((0..=ti).collect(), (ti..count).collect()),
        };
        let dist = |a: usize, b: usize| (a as i64 - b as i64).unsigned_abs() as f64 + 1.0;
        let s1w: f64 = w_side.iter().map(|&r| dist(r, ti).powf(pow_w) * w_mass[r]).sum();
        let s1u: f64 = u_side.iter().map(|&r| u_dual[r]).sum();
        let t1 = s1w.powf(1.0 / p) * s1u.powf(1.0 / pp);
        let s2w: f64 = w_side.iter().map(|&r| w_mass[r]).sum();
        let s2u: f64 = u_side.iter().map(|&r| dist(ti, r).powf(pow_u) * u_dual[r]).sum();
        let t2 = s2w.powf(1.0 / p) * s2u.powf(1.0 / pp);
        if t1 > best1.0 {
            best1 = (t1, ti);
        }
        if t2 > best2.0 {
            best2 = (t2, ti);
        }
    }
    let outer = |ti: usize| -> bool {
        let frac = ti as f64 / (count.max(2) - 1) as f64;
        match inp.dir {
            Direction::Plus => frac >= 0.75,
            Direction::Minus => frac <= 0.25,
        }
    };
    Ok((best1.0 + best2.0, outer(best1.1) || outer(best2.1)))
}

/// First Hardy quantity at depth d: index powers p(m-1) and p'(m-1).
#[allow(clippy::too_many_arguments)]
pub fn hardy_m(
    w: &CellMassTable,
    ubar: &CellMassTable,
    p: f64,
    m: usize,
    d: u32,
    base: i64,
    range: i64,
    dir: Direction,
) -> Result<(f64, bool)> {
    if range < 3 {
        return Err(CoreError::Invalid("range must span at least four cells".into()));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(CoreError::Invalid(format!("p must lie in (1, inf), got {p}")));
    }
    let pp = p / (p - 1.0);
    let inp = QuantityInput { w, u: ubar, p, d, base, range, dir };
    hardy_quantity(&inp, p * (m as f64 - 1.0), pp * (m as f64 - 1.0))
}

/// Second Hardy quantity at depth d >= 1: index powers p(2m-1) and p'(2m-1).
#[allow(clippy::too_many_arguments)]
pub fn hardy_n(
    w: &CellMassTable,
    utilde: &CellMassTable,
    p: f64,
    m: usize,
    d: u32,
    base: i64,
    range: i64,
    dir: Direction,
) -> Result<(f64, bool)> {
    if d == 0 {
        return Err(CoreError::Invalid("the second quantity starts at depth 1".into()));
    }
    if range < 3 {
        return Err(CoreError::Invalid("range must span at least four cells".into()));
    }
    let pp = p / (p - 1.0);
    let inp = QuantityInput { w, u: utilde, p, d, base, range, dir };
    hardy_quantity(&inp, p * (2.0 * m as f64 - 1.0), pp * (2.0 * m as f64 - 1.0))
}

/// Weight configuration of the composite constant: target w, source u and the
/// optional auxiliary minorants (defaulting to u itself, the largest
/// admissible choice).
#[derive(Clone, Debug, Serialize)]
pub struct HardyWeights {
    pub w: WeightN,
    pub u: WeightN,
    pub ubar: Option<WeightN>,
    pub utilde: Option<WeightN>,
}

/// Per-axis Hardy arrays and the composite constant.
#[derive(Clone, Debug, Serialize)]
pub struct AxisHardy {
    pub axis: usize,
    /// M(d) for d = 0..=D.
    pub m_vals: Vec<f64>,
    /// N(d) for d = 1..=D+1.
    pub n_vals: Vec<f64>,
    pub tail_flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyReport {
    pub axes: Vec<AxisHardy>,
    /// sup over d <= D of the summed M(d) + N(d+1).
    pub c: f64,
    pub depth: usize,
    pub range: i64,
    /// Set when any supremum was attained in the outer quarter of the
    /// truncated index range.
    pub inconclusive: bool,
}

/// Composite constant over all active axes.
pub fn hardy_c(
    spec: &OperatorSpec,
    weights: &HardyWeights,
    p: f64,
    depth: usize,
    range: i64,
) -> Result<HardyReport> {
    spec.validate()?;
    let n = spec.n_dim();
    if weights.w.n_dim() != n || weights.u.n_dim() != n {
        return Err(CoreError::Invalid("weight dimensions must match the operator".into()));
    }
    // the source weight must agree with the target weight on inactive axes
    for k in 0..n {
        if spec.stars[k] == AxisStar::None {
            for d in 0..=2u32 {
                for r in -2..=2i64 {
                    let a = CellMassTable::new(weights.w.axes[k].clone()).mass(d, r, 0)?;
                    let b = CellMassTable::new(weights.u.axes[k].clone()).mass(d, r, 0)?;
                    if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                        return Err(CoreError::WeightMismatch { axis: k });
                    }
                }
            }
        }
    }
    let mut axes_out = Vec::new();
    let mut any_tail = false;
    for k in spec.active_axes() {
        let dir = match spec.stars[k] {
            AxisStar::Plus => Direction::Plus,
            AxisStar::Minus => Direction::Minus,
            AxisStar::None => unreachable!(),
        };
        let base = if spec.whole_line[k] {
            -range / 2
        } else {
            spec.cuts[k].floor() as i64
        };
        let w_table = CellMassTable::new(weights.w.axes[k].clone());
        let ubar_axis = weights.ubar.as_ref().unwrap_or(&weights.u).axes[k].clone();
        let utilde_axis = weights.utilde.as_ref().unwrap_or(&weights.u).axes[k].clone();
        let ubar_table = CellMassTable::new(ubar_axis);
        let utilde_table = CellMassTable::new(utilde_axis);
        let m_k = spec.orders[k];
        let mut m_vals = Vec::with_capacity(depth + 1);
        let mut n_vals = Vec::with_capacity(depth + 1);
        let mut tail = false;
        for d in 0..=depth as u32 {
            let (v, t) = hardy_m(&w_table, &ubar_table, p, m_k, d, base, range, dir)?;
            m_vals.push(v);
            tail |= t;
        }
        for d in 1..=depth as u32 + 1 {
            let (v, t) = hardy_n(&w_table, &utilde_table, p, m_k, d, base, range, dir)?;
            n_vals.push(v);
            tail |= t;
        }
        any_tail |= tail;
        axes_out.push(AxisHardy { axis: k, m_vals, n_vals, tail_flagged: tail });
    }
    let mut c = 0.0f64;
    for d in 0..=depth {
        let mut level = 0.0;
        for ax in &axes_out {
            level += ax.m_vals[d] + ax.n_vals[d]; // n_vals[d] holds N(d+1)
        }
        c = c.max(level);
    }
    Ok(HardyReport {
        axes: axes_out,
        c,
        depth,
        range,
        inconclusive: any_tail,
    })
}

/// Brute-force best constant of the one-weight discrete Hardy inequality
/// (first order): maximize the ratio over nonnegative sequences by seeded
/// multi-start coordinate ascent. The dual-extremal test sequences are always
/// included as starts, so the result dominates the one-term quantity.
pub fn hardy_bruteforce(w: &[f64], u: &[f64], p: f64, trials: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    if w.len() != u.len() || w.is_empty() || w.len() > 65 {
        return Err(CoreError::Invalid("weight vectors must share a length of at most 65".into()));
    }
    if w.iter().chain(u.iter()).any(|&v| v <= 0.0) {
        return Err(CoreError::Invalid("weights must be positive".into()));
    }
    let count = w.len();
    let pp = p / (p - 1.0);
    let ratio = |a: &[f64]| -> f64 {
        let mut cum = 0.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for r in 0..count {
            cum += a[r];
            num += cum.powf(p) * w[r];
            den += a[r].powf(p) * u[r];
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).powf(1.0 / p)
        }
    };
    let ascent = |start: Vec<f64>| -> f64 {
        let mut a = start;
        let mut best = ratio(&a);
        for _ in 0..40 {
            let mut improved = false;
            for r in 0..count {
                let keep = a[r];
                let scale = a.iter().copied().fold(0.0f64, f64::max).max(1.0);
                for factor in [0.0, 0.25, 0.5, 0.8, 0.95, 1.05, 1.25, 2.0, 4.0] {
                    a[r] = if keep == 0.0 { factor * 0.1 * scale } else { keep * factor };
                    let v = ratio(&a);
                    if v > best * (1.0 + 1e-13) {
                        best = v;
                        improved = true;
                    } else {
                        a[r] = keep;
                    }
                    if a[r] != keep {
                        break;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best
    };
    let mut best = 0.0f64;
    // dual-extremal seeds: a_r = u_r^{1-p'} up to tau, 0 beyond
    for tau in 0..count {
        let a: Vec<f64> = (0..count)
            .map(|r| if r <= tau { u[r].powf(1.0 - pp) } else { 0.0 })
            .collect();
        best = best.max(ascent(a));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a: Vec<f64> = (0..count).map(|_| rng.gen_range(0.01..1.0)).collect();
        best = best.max(ascent(a));
    }
    Ok(best)
}

/// One-term dual quantity of the first-order discrete inequality.
pub fn muckenhoupt_one_term(w: &[f64], u: &[f64], p: f64) -> f64 {
    let pp = p / (p - 1.0);
    let count = w.len();
    let mut best = 0.0f64;
    for tau in 0..count {
        let s1: f64 = (tau..count).map(|r| w[r]).sum();
        let s2: f64 = (0..=tau).map(|r| u[r].powf(1.0 - pp)).sum();
        best = best.max(s1.powf(1.0 / p) * s2.powf(1.0 / pp));
    }
    best
}

/// Per-function ratio band of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub names: Vec<String>,
    pub rhos: Vec<f64>,
    pub max: f64,
    pub min: f64,
    /// Composite constant used in the denominator (forward runs).
    pub c_constant: Option<f64>,
    pub inconclusive: bool,
    pub truncation_warning: bool,
}

fn band(names: Vec<String>, rhos: Vec<f64>, c: Option<f64>, inconclusive: bool, warn: bool) -> RatioReport {
    let max = rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rhos.iter().copied().fold(f64::INFINITY, f64::min);
    RatioReport {
        names,
        rhos,
        max,
        min,
        c_constant: c,
        inconclusive,
        truncation_warning: warn,
    }
}

/// Forward inequality harness: rho(f) = ||I f||_{s,w} / (C ||f||_{s-|m|,u}).
#[allow(clippy::too_many_arguments)]
pub fn verify_forward(
    spec: &OperatorSpec,
    weights: &HardyWeights,
    source: &SpaceParams,
    target: &SpaceParams,
    suite: &[(String, ProductFn)],
    basis: &TensorBasis,
    depth: usize,
    domain: &Domain,
    r0: f64,
    range: i64,
) -> Result<RatioReport> {
    let report = hardy_c(spec, weights, target.p, depth, range)?;
    if !report.c.is_finite() {
        return Err(CoreError::Invalid("composite constant is not finite".into()));
    }
    let results: Vec<Result<Option<(String, f64)>>> = suite
        .par_iter()
        .map(|(name, f)| {
            let source_norm = besov_norm_via_wavelets(f, source, basis, depth, domain, r0, NormKind::Besov)?;
            if source_norm == 0.0 {
                return Ok(None);
            }
            let image = rl_apply(spec, f, domain)?;
            let image_norm =
                besov_norm_via_wavelets(&image, target, basis, depth, domain, r0, NormKind::Besov)?;
            Ok(Some((name.clone(), image_norm / (report.c * source_norm))))
        })
        .collect();
    let mut names = Vec::new();
    let mut rhos = Vec::new();
    for r in results {
        if let Some((name, rho)) = r? {
            names.push(name);
            rhos.push(rho);
        }
    }
    Ok(band(names, rhos, Some(report.c), report.inconclusive, false))
}

/// Reverse inequality harness: rho'(f) = ||f||_{s-|m|,w} / ||I f||_{s,w};
/// no Hardy condition enters.
#[allow(clippy::too_many_arguments)]
pub fn verify_reverse(
    spec: &OperatorSpec,
    low: &SpaceParams,
    high: &SpaceParams,
    suite: &[(String, ProductFn)],
    basis: &TensorBasis,
    depth: usize,
    domain: &Domain,
    r0: f64,
) -> Result<RatioReport> {
    let results: Vec<Result<Option<(String, f64)>>> = suite
        .par_iter()
        .map(|(name, f)| {
            let image = rl_apply(spec, f, domain)?;
            let image_norm =
                besov_norm_via_wavelets(&image, high, basis, depth, domain, r0, NormKind::Besov)?;
            if image_norm == 0.0 {
                return Ok(None);
            }
            let low_norm = besov_norm_via_wavelets(f, low, basis, depth, domain, r0, NormKind::Besov)?;
            Ok(Some((name.clone(), low_norm / image_norm)))
        })
        .collect();
    let mut names = Vec::new();
    let mut rhos = Vec::new();
    for r in results {
        if let Some((name, rho)) = r? {
            names.push(name);
            rhos.push(rho);
        }
    }
    Ok(band(names, rhos, None, false, false))
}
