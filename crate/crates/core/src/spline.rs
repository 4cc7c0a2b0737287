//! Exact compactly supported piecewise polynomials with B-splines as the
//! primitive family.
//!
//! Every function of the construction (B-splines, localized scaling functions
//! and wavelets, test functions) is stored as a [`PiecewisePoly`]: strictly
//! increasing breakpoints and one monomial coefficient vector per piece in the
//! local variable x - left endpoint, zero outside the support. Evaluation uses
//! the half-open convention [b_i, b_{i+1}).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::gauss;
use crate::weights::Weight1D;

/// Maximum polynomial degree accepted by the public constructors.
pub const MAX_ORDER: usize = 16;

/// Tolerance for deduplicating merged breakpoints.
const BREAK_MERGE_TOL: f64 = 1e-12;

/// Compactly supported piecewise polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    degree: usize,
}

/// One term of a finite combination: coeff * f(2^level x - shift).
pub struct CombineTerm<'a> {
    pub coeff: f64,
    pub f: &'a PiecewisePoly,
    pub level: i32,
    pub shift: f64,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Vec<f64>>, degree: usize) -> Result<Self> {
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(CoreError::Invalid(
                "piece count must be breakpoint count - 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::Invalid("breakpoints must strictly increase".into()));
        }
        if pieces.iter().any(|p| p.len() != degree + 1) {
            return Err(CoreError::Invalid(
                "every coefficient vector must have length degree + 1".into(),
            ));
        }
        Ok(PiecewisePoly {
            breaks,
            pieces,
            degree,
        })
    }

    /// The zero function represented on [0, 1].
    pub fn zero(degree: usize) -> Self {
        PiecewisePoly {
            breaks: vec![0.0, 1.0],
            pieces: vec![vec![0.0; degree + 1]],
            degree,
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Support as the breakpoint extent.
    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.iter().all(|&c| c == 0.0))
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        if x < self.breaks[0] || x >= *self.breaks.last().unwrap() {
            return None;
        }
        let i = self.breaks.partition_point(|&b| b <= x);
        Some(i - 1)
    }

    /// Exact evaluation; 0 outside the support, half-open pieces.
    pub fn eval(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            None => 0.0,
            Some(i) => horner(&self.pieces[i], x - self.breaks[i]),
        }
    }

    /// Piecewise (a.e.) derivative of order k.
    pub fn derivative(&self, k: usize) -> Result<Self> {
        if k > self.degree {
            return Err(CoreError::DegreeExceeded {
                order: k,
                degree: self.degree,
            });
        }
        let new_deg = self.degree - k;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut c = p.clone();
                for _ in 0..k {
                    c = poly_derivative(&c);
                }
                c.resize(new_deg + 1, 0.0);
                c
            })
            .collect();
        PiecewisePoly::new(self.breaks.clone(), pieces, new_deg)
    }

    /// Continuous antiderivative F with F(leftmost breakpoint) = 0.
    pub fn antiderivative(&self) -> Self {
        let new_deg = self.degree + 1;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut running = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let mut c = poly_antiderivative(p);
            c[0] = running;
            let width = self.breaks[i + 1] - self.breaks[i];
            running = horner(&c, width);
            c.resize(new_deg + 1, 0.0);
            pieces.push(c);
        }
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces,
            degree: new_deg,
        }
    }

    /// Total integral.
    pub fn integral(&self) -> f64 {
        self.moment(0)
    }

    /// Exact m-th moment: integral of x^m f(x).
    pub fn moment(&self, m: usize) -> f64 {
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let a = self.breaks[i];
            let width = self.breaks[i + 1] - a;
            // shift (t + a)^m into local coordinates and integrate exactly
            let shifted = poly_mul(&binomial_shift(m, a), p);
            let anti = poly_antiderivative(&shifted);
            total += horner(&anti, width);
        }
        total
    }

    /// Restriction of self to [lo, hi] (pieces clipped, others dropped).
    pub fn clip(&self, lo: f64, hi: f64) -> Option<Self> {
        let (slo, shi) = self.support();
        let lo = lo.max(slo);
        let hi = hi.min(shi);
        if hi <= lo {
            return None;
        }
        let mut breaks = vec![lo];
        let mut pieces = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let (a, b) = (self.breaks[i], self.breaks[i + 1]);
            if b <= lo || a >= hi {
                continue;
            }
            let start = a.max(lo);
            let end = b.min(hi);
            // re-anchor local coordinates to `start`
            let local = compose_affine(p, 1.0, start - a);
            breaks.push(end);
            pieces.push(local);
        }
        Some(PiecewisePoly {
            breaks,
            pieces,
            degree: self.degree,
        })
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|k| p[k] * k as f64).collect()
}

fn poly_antiderivative(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] = c / (k as f64 + 1.0);
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of (t + a)^m.
fn binomial_shift(m: usize, a: f64) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    let mut binom = 1.0;
    for k in 0..=m {
        out[k] = binom * a.powi((m - k) as i32);
        binom = binom * (m - k) as f64 / (k as f64 + 1.0);
    }
    out
}

/// p(alpha t + beta) expanded in t; same degree as the input.
fn compose_affine(p: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    for &c in p.iter().rev() {
        // out = out * (alpha t + beta) + c
        let mut next = vec![0.0; out.len() + 1];
        for (k, &v) in out.iter().enumerate() {
            next[k] += v * beta;
            next[k + 1] += v * alpha;
        }
        next[0] += c;
        out = next;
    }
    out.truncate(p.len().max(1));
    out
}

/// B-spline of order n shifted by `shift`: support [shift, shift + n + 1].
pub fn bspline(n: usize, shift: f64) -> Result<PiecewisePoly> {
    if n > MAX_ORDER {
        return Err(CoreError::OrderTooLarge(n));
    }
    if !shift.is_finite() {
        return Err(CoreError::Invalid("shift must be finite".into()));
    }
    Ok(bspline_impl(n, shift))
}

/// Internal constructor without the public order guard; spectral data of
/// order n needs the Gram spline of order 2n + 1 <= 17.
pub(crate) fn bspline_impl(n: usize, shift: f64) -> PiecewisePoly {
    // pieces[m] holds the local polynomial on [m, m+1); the two-term
    // recurrence keeps the same local variable on both summands
    let mut pieces: Vec<Vec<f64>> = vec![vec![1.0]];
    for order in 1..=n {
        let prev = pieces;
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let mut acc = vec![0.0; order + 1];
            if m < prev.len() {
                // (t + m)/order * prev[m](t)
                let part = poly_mul(&[m as f64 / order as f64, 1.0 / order as f64], &prev[m]);
                add_into(&mut acc, &part);
            }
            if m >= 1 && m - 1 < prev.len() {
                // (order + 1 - m - t)/order * prev[m-1](t)
                let part = poly_mul(
                    &[
                        (order + 1 - m) as f64 / order as f64,
                        -1.0 / order as f64,
                    ],
                    &prev[m - 1],
                );
                add_into(&mut acc, &part);
            }
            next.push(acc);
        }
        pieces = next;
    }
    let breaks = (0..=n + 1).map(|m| shift + m as f64).collect();
    PiecewisePoly {
        breaks,
        pieces,
        degree: n,
    }
}

fn add_into(acc: &mut [f64], p: &[f64]) {
    for (a, &b) in acc.iter_mut().zip(p) {
        *a += b;
    }
}

/// Finite combination sum_i c_i f_i(2^{d_i} x - shift_i) on the merged grid.
pub fn pp_combine(terms: &[CombineTerm<'_>]) -> PiecewisePoly {
    if terms.is_empty() {
        return PiecewisePoly::zero(0);
    }
    let degree = terms.iter().map(|t| t.f.degree).max().unwrap();
    let mut breaks: Vec<f64> = Vec::new();
    for t in terms {
        let scale = (t.level as f64).exp2();
        for &b in &t.f.breaks {
            breaks.push((b + t.shift) / scale);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= BREAK_MERGE_TOL);
    if breaks.len() < 2 {
        return PiecewisePoly::zero(degree);
    }
    let mut pieces = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let mut acc = vec![0.0; degree + 1];
        for t in terms {
            let scale = (t.level as f64).exp2();
            let y = scale * mid - t.shift;
            if let Some(j) = t.f.piece_index(y) {
                // local var of f: scale*(x) - shift - f.breaks[j]
                //               = scale*u + (scale*a - shift - f.breaks[j])
                let beta = scale * a - t.shift - t.f.breaks[j];
                let comp = compose_affine(&t.f.pieces[j], scale, beta);
                for (k, &c) in comp.iter().enumerate() {
                    acc[k] += t.coeff * c;
                }
            }
        }
        pieces.push(acc);
    }
    PiecewisePoly {
        breaks,
        pieces,
        degree,
    }
}

/// Weighted inner product of two piecewise polynomials by per-piece
/// Gauss-Legendre quadrature, exact (to rounding) for polynomial weights.
pub fn pp_inner(f: &PiecewisePoly, g: &PiecewisePoly, weight: Option<&Weight1D>) -> f64 {
    let (flo, fhi) = f.support();
    let (glo, ghi) = g.support();
    let lo = flo.max(glo);
    let hi = fhi.min(ghi);
    if hi <= lo {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::new();
    cuts.push(lo);
    cuts.push(hi);
    for &b in f.breaks.iter().chain(g.breaks.iter()) {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    let mut w_deg = Some(0usize);
    if let Some(w) = weight {
        for b in w.breakpoints() {
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        w_deg = w.poly_degree();
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= BREAK_MERGE_TOL);
    let nodes = match w_deg {
        Some(dw) => (f.degree + g.degree + dw + 1).div_ceil(2) + 1,
        None => 32,
    };
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        total += gauss::integrate(
            |x| {
                let wv = weight.map_or(1.0, |w| w.eval(x));
                f.eval(x) * g.eval(x) * wv
            },
            seg[0],
            seg[1],
            nodes,
        );
    }
    total
}

/// Fourier transform of the order-n B-spline at frequency omega:
/// (2 pi)^{-1/2} (e^{-i omega/2} sinc(omega/2))^{n+1}, removable singularity
/// at omega = 0 filled by the limit.
pub fn bspline_fourier(n: usize, omega: f64) -> Complex64 {
    let half = 0.5 * omega;
    let sinc = if half.abs() < 1e-4 {
        let t2 = half * half;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        half.sin() / half
    };
    let base = Complex64::from_polar(1.0, -half) * sinc;
    base.powu(n as u32 + 1) * (2.0 * std::f64::consts::PI).sqrt().recip()
}

/// Tensor-product function: one piecewise-polynomial factor per axis.
#[derive(Clone, Debug, Serialize)]
pub struct ProductFn {
    pub axes: Vec<PiecewisePoly>,
}

impl ProductFn {
    pub fn new(axes: Vec<PiecewisePoly>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(CoreError::Invalid(format!(
                "product functions support 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        Ok(ProductFn { axes })
    }

    pub fn one_dim(f: PiecewisePoly) -> Self {
        ProductFn { axes: vec![f] }
    }

    pub fn n_dim(&self) -> usize {
        self.axes.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(f, &t)| f.eval(t)).product()
    }
}
