//! Order-n spectral data of the spline orthogonalization polynomial: Gram
//! coefficients, the roots r_j in (0, 1), derived constants and the cosine
//! expansion coefficients used by the localized wavelet assembly.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::spline::{bspline_fourier, bspline_impl};

/// Per-root choice t_j in {r_j, 1/r_j}; `true` selects the reciprocal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TMask(Vec<bool>);

impl TMask {
    pub fn all_r(n: usize) -> Self {
        TMask(vec![false; n])
    }

    pub fn new(choices: Vec<bool>) -> Self {
        TMask(choices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cardinality of the reciprocal index set J_{1/r}.
    pub fn c_recip(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn uses_recip(&self, j: usize) -> bool {
        self.0[j]
    }
}

/// Spectral data of the order-n construction.
#[derive(Clone, Debug, Serialize)]
pub struct EulerFrobeniusData {
    pub order: usize,
    /// Gram coefficients g_k = B_{2n+1}(n+1+k) for k = -n..n.
    pub gram: Vec<f64>,
    /// Roots r_1..r_n in (0, 1), ascending.
    pub roots: Vec<f64>,
    /// alpha_j = (1 + r_j)^2 / (4 r_j).
    pub alphas: Vec<f64>,
    /// beta_n = 2^n sqrt(prod alpha_j r_j).
    pub beta: f64,
    /// gamma_n = (prod r_j) sqrt(prod alpha_j r_j).
    pub gamma: f64,
    /// Cosine expansion coefficients lambda_0..lambda_n (lambda_n = 2).
    pub lambdas: Vec<f64>,
    /// Lambda'_n = prod (1 + r_j).
    pub lam1: f64,
    pub tmask: TMask,
}

impl EulerFrobeniusData {
    /// g_k with k in -n..=n.
    pub fn gram_at(&self, k: i64) -> f64 {
        let n = self.order as i64;
        if k < -n || k > n {
            0.0
        } else {
            self.gram[(k + n) as usize]
        }
    }

    /// The Laurent polynomial sum g_k z^k.
    pub fn laurent_at(&self, z: f64) -> f64 {
        let n = self.order as i64;
        (-n..=n).map(|k| self.gram_at(k) * z.powi(k as i32)).sum()
    }

    /// The Gram form of the orthogonalization polynomial at frequency omega.
    pub fn gram_symbol(&self, omega: f64) -> f64 {
        let mut acc = self.gram_at(0);
        for k in 1..=self.order as i64 {
            acc += 2.0 * self.gram_at(k) * (k as f64 * omega).cos();
        }
        acc
    }

    /// t_j per the mask.
    pub fn t(&self, j: usize) -> f64 {
        if self.tmask.uses_recip(j) {
            1.0 / self.roots[j]
        } else {
            self.roots[j]
        }
    }

    pub fn c_recip(&self) -> usize {
        self.tmask.c_recip()
    }

    /// Lambda''_n per the localized-wavelet sum rule; `aux` carries the
    /// order-m data of the extra factor when the flag kk = 1 is set.
    pub fn lam2(&self, aux: Option<&EulerFrobeniusData>) -> f64 {
        let base: f64 = self
            .roots
            .iter()
            .map(|&r| (1.0 + r) * (1.0 - r * r))
            .product();
        match aux {
            None => base,
            Some(m_data) => {
                let extra: f64 = m_data.roots.iter().map(|&r| 1.0 - r * r).product();
                base * extra * extra
            }
        }
    }
}

/// Builds the order-n spectral data, 1 <= n <= 8.
pub fn euler_frobenius(n: usize, tmask: TMask) -> Result<EulerFrobeniusData> {
    if n == 0 || n > 8 {
        return Err(CoreError::Invalid(format!(
            "spectral data is built for orders 1..=8, got {n}"
        )));
    }
    if tmask.len() != n {
        return Err(CoreError::Invalid(format!(
            "mask length {} does not match order {n}",
            tmask.len()
        )));
    }
    // Gram coefficients from exact integer samples of B_{2n+1}.
    let big = bspline_impl(2 * n + 1, 0.0);
    let gram: Vec<f64> = (-(n as i64)..=n as i64)
        .map(|k| big.eval((n as i64 + 1 + k) as f64))
        .collect();
    let roots = find_roots(n, &gram)?;
    let alphas: Vec<f64> = roots.iter().map(|&r| (1.0 + r).powi(2) / (4.0 * r)).collect();
    let prod_ar: f64 = roots.iter().zip(&alphas).map(|(&r, &a)| a * r).product();
    let prod_r: f64 = roots.iter().product();
    let beta = (n as f64).exp2() * prod_ar.sqrt();
    let gamma = prod_r * prod_ar.sqrt();
    let lambdas = lambda_coeffs(&roots);
    let lam1: f64 = roots.iter().map(|&r| 1.0 + r).product();
    Ok(EulerFrobeniusData {
        order: n,
        gram,
        roots,
        alphas,
        beta,
        gamma,
        lambdas,
        lam1,
        tmask,
    })
}

/// Roots of sum g_k z^k inside (-1, 0), returned negated and ascending.
///
/// The polynomial is sampled on a logarithmic grid r = e^{-u} (the roots of
/// high orders cluster near zero), bracketed by sign changes, bisected and
/// polished by Newton steps.
fn find_roots(n: usize, gram: &[f64]) -> Result<Vec<f64>> {
    // p(z) = z^n sum g_k z^k, ascending coefficients
    let coeffs: Vec<f64> = gram.to_vec();
    let eval = |r: f64| -> f64 {
        // evaluate at z = -r via Horner
        let z = -r;
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let eval_deriv = |r: f64| -> f64 {
        // d/dr of p(-r) = -p'(-r)
        let z = -r;
        let mut d = 0.0;
        for (k, &c) in coeffs.iter().enumerate().skip(1) {
            d += c * k as f64 * z.powi(k as i32 - 1);
        }
        -d
    };
    let mut brackets = Vec::new();
    for &grid in &[6000usize, 48000] {
        brackets.clear();
        let u_max = 60.0f64;
        let mut prev_u = u_max;
        let mut prev_v = eval((-prev_u).exp());
        for i in 1..=grid {
            let u = u_max * (grid - i) as f64 / grid as f64;
            let r = (-u).exp();
            let v = eval(r);
            if prev_v == 0.0 {
                brackets.push(((-prev_u).exp(), (-prev_u).exp()));
            } else if prev_v * v < 0.0 {
                brackets.push(((-prev_u).exp(), r));
            }
            prev_u = u;
            prev_v = v;
        }
        if brackets.len() == n {
            break;
        }
    }
    if brackets.len() != n {
        return Err(CoreError::RootCount {
            expected: n,
            found: brackets.len(),
        });
    }
    let mut roots = Vec::with_capacity(n);
    for (mut a, mut b) in brackets {
        let mut fa = eval(a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = eval(mid);
            if fa * fm <= 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
            if (b - a) <= 1e-16 * b.abs().max(1e-30) {
                break;
            }
        }
        let mut r = 0.5 * (a + b);
        for _ in 0..5 {
            let d = eval_deriv(r);
            if d != 0.0 {
                r -= eval(r) / d;
            }
        }
        roots.push(r);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(roots)
}

/// Cosine expansion coefficients: prod_j |1 - e^{i theta} t_j|^2 equals
/// (prod t_j) sum_j (-1)^j lambda_j cos(j theta) with lambda_n = 2; the
/// lambdas depend only on rho_j = r_j + 1/r_j and not on the mask.
pub fn lambda_coeffs(roots: &[f64]) -> Vec<f64> {
    let n = roots.len();
    // Laurent coefficients c_{-n}..c_n of prod (1 - r e^{i t})(1 - r e^{-i t})
    let mut c = vec![0.0; 2 * n + 1];
    c[n] = 1.0;
    for &r in roots {
        let mut next = vec![0.0; 2 * n + 1];
        for (k, &v) in c.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            next[k] += (1.0 + r * r) * v;
            if k > 0 {
                next[k - 1] -= r * v;
            }
            if k + 1 < next.len() {
                next[k + 1] -= r * v;
            }
        }
        c = next;
    }
    let prod_r: f64 = roots.iter().product();
    let mut lambdas = Vec::with_capacity(n + 1);
    lambdas.push(c[n] / prod_r);
    for j in 1..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        lambdas.push(sign * 2.0 * c[n + j] / prod_r);
    }
    lambdas
}

/// Symmetric Laurent coefficients A_{-m}..A_m of
/// prod_j (1 - rho_j e^{i w})(1 - rho_j e^{-i w}) for rho_j = r_j^2; the
/// integer-shift coefficient sequence of the localization factor.
pub fn squared_root_factor(roots: &[f64]) -> Vec<f64> {
    let m = roots.len();
    let mut c = vec![0.0; 2 * m + 1];
    c[m] = 1.0;
    for &r in roots {
        let rho = r * r;
        let mut next = vec![0.0; 2 * m + 1];
        for (k, &v) in c.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            next[k] += (1.0 + rho * rho) * v;
            if k > 0 {
                next[k - 1] -= rho * v;
            }
            if k + 1 < next.len() {
                next[k + 1] -= rho * v;
            }
        }
        c = next;
    }
    c
}

/// Truncated infinite-sum form of the orthogonalization polynomial,
/// normalized to match the Gram symbol.
pub fn truncated_symbol(n: usize, omega: f64, terms: i64) -> f64 {
    let mut acc = 0.0;
    for m in -terms..=terms {
        let v = bspline_fourier(n, omega + 2.0 * std::f64::consts::PI * m as f64);
        acc += v.norm_sqr();
    }
    2.0 * std::f64::consts::PI * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn order_one_gram_is_sixth_four_sixth() {
        // B_3 at 1, 2, 3 from the recurrence oracle: 1/6, 4/6, 1/6
        let ef = euler_frobenius(1, TMask::all_r(1)).unwrap();
        assert_abs_diff_eq!(ef.gram[0], 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ef.gram[1], 4.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ef.gram[2], 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn order_one_root_and_alpha() {
        // z^2 + 4z + 1 has the root -(2 - sqrt 3) in (-1, 0); alpha = 3/2
        let ef = euler_frobenius(1, TMask::all_r(1)).unwrap();
        assert_eq!(ef.roots.len(), 1);
        assert_abs_diff_eq!(ef.roots[0], 2.0 - 3.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(ef.alphas[0], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn gram_sums_to_one_and_is_symmetric_positive() {
        for n in 1..=8 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            let sum: f64 = ef.gram.iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ef.gram_symbol(0.0), 1.0, epsilon = 1e-12);
            for k in 0..=n as i64 {
                assert!(ef.gram_at(k) > 0.0);
                assert_abs_diff_eq!(ef.gram_at(k), ef.gram_at(-k), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn exactly_n_roots_with_small_residuals() {
        for n in 1..=8 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            assert_eq!(ef.roots.len(), n);
            for &r in &ef.roots {
                assert!(r > 0.0 && r < 1.0);
                // the Laurent polynomial vanishes at z = -r_j; the residual is
                // measured against the magnitude of its largest term
                let scale = |z: f64| -> f64 {
                    (-(n as i64)..=n as i64)
                        .map(|k| (ef.gram_at(k) * z.powi(k as i32)).abs())
                        .fold(1.0, f64::max)
                };
                let res = ef.laurent_at(-r).abs() / scale(-r);
                assert!(res <= 1e-10, "n={n} r={r} residual={res}");
                // and at the reciprocal root z = -1/r_j
                let rr = ef.laurent_at(-1.0 / r).abs() / scale(-1.0 / r);
                assert!(rr <= 1e-8, "n={n} r={r} reciprocal residual={rr}");
            }
            // ascending and distinct
            assert!(ef.roots.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn alpha_root_relation_round_trip() {
        for n in 1..=8 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            for (&r, &a) in ef.roots.iter().zip(&ef.alphas) {
                assert!(a > 1.0);
                let back = (2.0 * a - 1.0) - 2.0 * (a * (a - 1.0)).sqrt();
                assert_abs_diff_eq!(back, r, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn truncated_symbol_agrees_with_gram_form() {
        for n in 1..=6 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            for i in 0..50 {
                let omega = -3.0 + 6.0 * i as f64 / 49.0;
                let a = truncated_symbol(n, omega, 200);
                let b = ef.gram_symbol(omega);
                assert!((a - b).abs() <= 1e-8, "n={n} omega={omega} gap={}", (a - b).abs());
            }
        }
    }

    #[test]
    fn lambda_order_one_is_rho_and_two() {
        let ef = euler_frobenius(1, TMask::all_r(1)).unwrap();
        let r = ef.roots[0];
        assert_abs_diff_eq!(ef.lambdas[0], r + 1.0 / r, epsilon = 1e-12);
        assert_abs_diff_eq!(ef.lambdas[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_top_is_two_and_all_positive() {
        for n in 1..=8 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            assert_abs_diff_eq!(ef.lambdas[n], 2.0, epsilon = 1e-12);
            assert!(ef.lambdas.iter().all(|&l| l > 0.0));
        }
    }

    #[test]
    fn lambda_identity_sampled() {
        // prod |1 - e^{i w/2} t_j|^2  ==  (prod t_j) sum (-1)^j lambda_j cos(j w/2)
        for (n, mask) in [
            (3usize, TMask::all_r(3)),
            (3, TMask::new(vec![true, false, true])),
            (5, TMask::all_r(5)),
        ] {
            let ef = euler_frobenius(n, mask).unwrap();
            let prod_t: f64 = (0..n).map(|j| ef.t(j)).product();
            for i in 0..100 {
                let omega = -6.0 + 12.0 * i as f64 / 99.0;
                let theta = 0.5 * omega;
                let lhs: f64 = (0..n)
                    .map(|j| {
                        let t = ef.t(j);
                        (1.0 - t * theta.cos()).powi(2) + (t * theta.sin()).powi(2)
                    })
                    .product();
                let rhs: f64 = prod_t
                    * ef.lambdas
                        .iter()
                        .enumerate()
                        .map(|(j, &l)| {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            sign * l * (j as f64 * theta).cos()
                        })
                        .sum::<f64>();
                let tol = 1e-10 * lhs.abs().max(1.0);
                assert!((lhs - rhs).abs() <= tol, "n={n} w={omega} gap={}", (lhs - rhs).abs());
            }
        }
    }

    #[test]
    fn lambda_identity_at_zero_frequency() {
        for n in 1..=6 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            let prod_t: f64 = (0..n).map(|j| ef.t(j)).product();
            let alt: f64 = ef
                .lambdas
                .iter()
                .enumerate()
                .map(|(j, &l)| if j % 2 == 0 { l } else { -l })
                .sum();
            let target: f64 = (0..n).map(|j| (1.0 - ef.t(j)).powi(2)).product();
            assert_abs_diff_eq!(prod_t * alt, target, epsilon = 1e-12);
        }
    }

    #[test]
    fn lambda_matches_independent_sampling_fit() {
        // fit sum (-1)^j lambda_j cos(j theta) = prod (rho_j - 2 cos theta)
        // on n+1 sample points and compare with the convolution route
        let n = 3usize;
        let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
        let thetas: Vec<f64> = (0..=n).map(|i| 0.3 + i as f64 * 0.7).collect();
        let mut a = vec![vec![0.0; n + 1]; n + 1];
        let mut rhs = vec![0.0; n + 1];
        for (row, &th) in thetas.iter().enumerate() {
            for j in 0..=n {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                a[row][j] = sign * (j as f64 * th).cos();
            }
            rhs[row] = ef
                .roots
                .iter()
                .map(|&r| (r + 1.0 / r) - 2.0 * th.cos())
                .product();
        }
        // tiny Gaussian elimination
        for col in 0..=n {
            let piv = (col..=n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
            a.swap(col, piv);
            rhs.swap(col, piv);
            for row in col + 1..=n {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut sol = vec![0.0; n + 1];
        for row in (0..=n).rev() {
            let mut acc = rhs[row];
            for k in row + 1..=n {
                acc -= a[row][k] * sol[k];
            }
            sol[row] = acc / a[row][row];
        }
        for j in 0..=n {
            assert!((sol[j] - ef.lambdas[j]).abs() <= 1e-10, "j={j}");
        }
    }

    #[test]
    fn positivity_of_sum_rules() {
        for n in 1..=6 {
            let ef = euler_frobenius(n, TMask::all_r(n)).unwrap();
            assert!(ef.lam1 > 0.0);
            assert!(ef.lam2(None) > 0.0);
            let aux = euler_frobenius(4, TMask::all_r(4)).unwrap();
            assert!(ef.lam2(Some(&aux)) > 0.0);
        }
    }

    #[test]
    fn order_one_beta_value() {
        // beta_1 = 2 sqrt(1.5 (2 - sqrt 3)), equal to 3 - sqrt 3
        let ef = euler_frobenius(1, TMask::all_r(1)).unwrap();
        assert_abs_diff_eq!(ef.beta, 2.0 * (1.5 * (2.0 - 3.0f64.sqrt())).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(ef.beta, 3.0 - 3.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(ef.lam1, 3.0 - 3.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mask_changes_t_but_not_lambdas() {
        let all_r = euler_frobenius(2, TMask::all_r(2)).unwrap();
        let mixed = euler_frobenius(2, TMask::new(vec![true, false])).unwrap();
        assert_eq!(mixed.c_recip(), 1);
        assert_abs_diff_eq!(mixed.t(0), 1.0 / all_r.roots[0], epsilon = 1e-14);
        for j in 0..=2 {
            assert_abs_diff_eq!(all_r.lambdas[j], mixed.lambdas[j], epsilon = 1e-14);
        }
    }

    #[test]
    fn squared_root_factor_matches_direct_product() {
        let ef = euler_frobenius(4, TMask::all_r(4)).unwrap();
        let coeffs = squared_root_factor(&ef.roots);
        for i in 0..30 {
            let w = -3.0 + 6.0 * i as f64 / 29.0;
            let direct: f64 = ef
                .roots
                .iter()
                .map(|&r| {
                    let rho = r * r;
                    (1.0 - rho * w.cos()).powi(2) + (rho * w.sin()).powi(2)
                })
                .product();
            let m = ef.order as i64;
            let series: f64 = (-m..=m)
                .map(|k| coeffs[(k + m) as usize] * (k as f64 * w).cos())
                .sum();
            assert_abs_diff_eq!(direct, series, epsilon = 1e-12);
        }
    }
}
