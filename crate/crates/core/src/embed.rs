//! Finite-section diagonal models of embeddings between weighted sequence
//! spaces in the Hilbert case p = q = 2, their approximation numbers, and the
//! factorization inequalities connecting integration operators to embeddings.
//!
//! For a diagonal map between Hilbert sequence spaces the k-th approximation
//! number is exactly the k-th largest multiplier; this module is restricted
//! to p = q = 2 for that reason. Entropy numbers are defined in the same
//! setting but their covering-number computation is exponential and is not
//! attempted here.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::spaces::{CoeffKey, Domain, SpaceParams};
use crate::weights::CellMassTable;

/// Diagonal operator between two truncated coefficient index sets.
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalModel {
    pub keys: Vec<CoeffKey>,
    pub multipliers: Vec<f64>,
}

impl DiagonalModel {
    /// Multipliers sorted in nonincreasing order.
    pub fn sorted_multipliers(&self) -> Vec<f64> {
        let mut s = self.multipliers.clone();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }
}

/// Index counts per depth (gender multiplicity included).
pub fn depth_counts(model: &DiagonalModel) -> Vec<(u8, usize)> {
    let mut counts: Vec<(u8, usize)> = Vec::new();
    for key in &model.keys {
        match counts.iter_mut().find(|(d, _)| *d == key.d) {
            Some((_, c)) => *c += 1,
            None => counts.push((key.d, 1)),
        }
    }
    counts.sort_by_key(|&(d, _)| d);
    counts
}

/// Diagonal model of the embedding id: b^{s1,v}_{22} -> b^{s2,w}_{22} over the
/// truncated index set of the box: sigma = 2^{-d(s1-s2)} (w(Q)/v(Q))^{1/2}.
pub fn embedding_diagonal(
    source: &SpaceParams,
    target: &SpaceParams,
    depth: usize,
    domain: &Domain,
) -> Result<DiagonalModel> {
    for params in [source, target] {
        if (params.p - 2.0).abs() > 1e-12 || (params.q - 2.0).abs() > 1e-12 {
            return Err(CoreError::NonHilbert { p: params.p, q: params.q });
        }
    }
    let n = source.n_dim();
    if target.n_dim() != n || domain.n_dim() != n {
        return Err(CoreError::Invalid("model dimensions must agree".into()));
    }
    let v_tables: Vec<CellMassTable> = source
        .weight
        .axes
        .iter()
        .map(|w| CellMassTable::new(w.clone()))
        .collect();
    let w_tables: Vec<CellMassTable> = target
        .weight
        .axes
        .iter()
        .map(|w| CellMassTable::new(w.clone()))
        .collect();
    let genders = (1usize << n) - 1;
    let delta = source.s - target.s;
    let mut keys = Vec::new();
    let mut multipliers = Vec::new();
    let tau_range = |d: u32, l: usize| -> (i64, i64) {
        let scale = (d as f64).exp2();
        (
            (scale * domain.lo[l]).ceil() as i64,
            (scale * domain.hi[l]).floor() as i64,
        )
    };
    let mut push = |d: u8, i: u8, tau: [i64; 2]| -> Result<()> {
        let mut ratio = 1.0;
        for l in 0..n {
            let wq = w_tables[l].mass(d as u32, tau[l], 0)?;
            let vq = v_tables[l].mass(d as u32, tau[l], 0)?;
            ratio *= wq / vq;
        }
        let sigma = (-(d as f64) * delta).exp2() * ratio.sqrt();
        keys.push(CoeffKey { d, i, tau });
        multipliers.push(sigma);
        Ok(())
    };
    // depth 0, gender 0
    let (lo0, hi0) = tau_range(0, 0);
    let (lo1, hi1) = if n == 2 { tau_range(0, 1) } else { (0, 0) };
    for t0 in lo0..=hi0 {
        for t1 in lo1..=hi1 {
            push(0, 0, [t0, t1])?;
        }
    }
    for d in 1..=depth as u8 {
        let (lo0, hi0) = tau_range(d as u32, 0);
        let (lo1, hi1) = if n == 2 { tau_range(d as u32, 1) } else { (0, 0) };
        for i in 1..=genders as u8 {
            for t0 in lo0..=hi0 {
                for t1 in lo1..=hi1 {
                    push(d, i, [t0, t1])?;
                }
            }
        }
    }
    Ok(DiagonalModel { keys, multipliers })
}

/// Approximation numbers a_1..a_K of the diagonal model: exactly the sorted
/// multipliers.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub a: Vec<f64>,
}

pub fn approximation_numbers(model: &DiagonalModel, k_max: usize) -> Result<SpectrumReport> {
    if k_max > model.multipliers.len() {
        return Err(CoreError::Invalid(format!(
            "requested {k_max} numbers from a model of {} indices",
            model.multipliers.len()
        )));
    }
    let sorted = model.sorted_multipliers();
    Ok(SpectrumReport {
        a: sorted[..k_max].to_vec(),
    })
}

/// Outcome of the two-sided factorization comparison.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    /// max over k of a_k(I) - R a_k(id), clipped at zero.
    pub upper_violation: f64,
    /// max over k of a_k(id) - R a_k(I), clipped at zero (the mirrored
    /// factorization with the same bound).
    pub lower_violation: f64,
}

/// Checks a_k(I) <= R a_k(id) for all k (and the mirrored inequality with the
/// same norm bound), where the image model is a pointwise bounded multiple of
/// the embedding model.
pub fn factorization_check(
    image: &DiagonalModel,
    embedding: &DiagonalModel,
    r_norm: f64,
) -> Result<FactorizationReport> {
    if image.keys != embedding.keys {
        return Err(CoreError::ModelShape(
            "image and embedding models index different sets".into(),
        ));
    }
    let a_i = image.sorted_multipliers();
    let a_e = embedding.sorted_multipliers();
    let mut upper = 0.0f64;
    let mut lower = 0.0f64;
    for (ai, ae) in a_i.iter().zip(&a_e) {
        upper = upper.max(ai - r_norm * ae);
        lower = lower.max(ae - r_norm * ai);
    }
    Ok(FactorizationReport {
        upper_violation: upper.max(0.0),
        lower_violation: lower.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Weight1D, WeightN};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hilbert_params(s: f64, weight: WeightN) -> SpaceParams {
        SpaceParams::new(2.0, 2.0, s, weight).unwrap()
    }

    #[test]
    fn identity_model_has_unit_multipliers() {
        let w = WeightN::ones(1);
        let p = hilbert_params(1.0, w.clone());
        let model = embedding_diagonal(&p, &p, 3, &Domain::one_dim(-2.0, 2.0)).unwrap();
        assert!(model.multipliers.iter().all(|&s| (s - 1.0).abs() <= 1e-14));
        let a = approximation_numbers(&model, 5).unwrap();
        assert!(a.a.iter().all(|&x| (x - 1.0).abs() <= 1e-14));
    }

    #[test]
    fn smoothness_gap_gives_dyadic_staircase() {
        let w = WeightN::ones(1);
        let source = hilbert_params(2.0, w.clone());
        let target = hilbert_params(1.0, w);
        let domain = Domain::one_dim(-2.0, 2.0);
        let model = embedding_diagonal(&source, &target, 3, &domain).unwrap();
        // sigma = 2^{-d}; plateau widths equal the per-depth index counts
        let counts = depth_counts(&model);
        let sorted = model.sorted_multipliers();
        let mut offset = 0;
        for &(d, count) in &counts {
            let expect = (-(d as f64)).exp2();
            for k in offset..offset + count {
                assert_abs_diff_eq!(sorted[k], expect, epsilon = 1e-14);
            }
            offset += count;
        }
        assert_eq!(offset, sorted.len());
        // counting oracle: depth-d translations in [-2, 2] are 4*2^d + 1,
        // with a single gender in one dimension
        for &(d, count) in &counts {
            let per_axis = 4 * (1i64 << d) + 1;
            assert_eq!(count as i64, per_axis, "d={d}");
        }
    }

    #[test]
    fn two_dim_multiplicity_counts_genders() {
        let w = WeightN::ones(2);
        let source = hilbert_params(2.0, w.clone());
        let target = hilbert_params(1.0, w);
        let domain = Domain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let model = embedding_diagonal(&source, &target, 2, &domain).unwrap();
        // three genders at each positive depth, translations (2*2^d + 1)^2
        for (d, count) in depth_counts(&model) {
            let per_axis = 2 * (1i64 << d) + 1;
            let genders = if d == 0 { 1 } else { 3 };
            assert_eq!(count as i64, genders * per_axis * per_axis, "d={d}");
        }
    }

    #[test]
    fn constant_weight_ratio_scales_all_multipliers() {
        let v = WeightN::ones(1);
        let w = WeightN::new(vec![Weight1D::Constant(4.0)]).unwrap();
        let source = hilbert_params(1.0, v);
        let target = hilbert_params(1.0, w);
        let model = embedding_diagonal(&source, &target, 2, &Domain::one_dim(-1.0, 1.0)).unwrap();
        assert!(model.multipliers.iter().all(|&s| (s - 2.0).abs() <= 1e-12));
    }

    #[test]
    fn non_hilbert_parameters_are_rejected() {
        let w = WeightN::ones(1);
        let p = SpaceParams::new(2.5, 2.0, 1.0, w.clone()).unwrap();
        let h = hilbert_params(1.0, w);
        assert!(matches!(
            embedding_diagonal(&p, &h, 2, &Domain::one_dim(-1.0, 1.0)),
            Err(CoreError::NonHilbert { .. })
        ));
    }

    #[test]
    fn spectrum_is_nonincreasing_and_starts_at_operator_norm() {
        let mut model = DiagonalModel {
            keys: (0..5)
                .map(|k| CoeffKey { d: 1, i: 1, tau: [k, 0] })
                .collect(),
            multipliers: vec![3.0, 1.0, 2.0, 0.5, 2.5],
        };
        let a = approximation_numbers(&model, 5).unwrap();
        assert_eq!(a.a, vec![3.0, 2.5, 2.0, 1.0, 0.5]);
        assert!(a.a.windows(2).all(|w| w[0] >= w[1]));
        model.multipliers = vec![3.0, 2.0, 1.0];
        model.keys.truncate(3);
        let a = approximation_numbers(&model, 3).unwrap();
        assert_eq!(a.a, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn rank_k_brute_force_optimality_on_small_models() {
        // over all coordinate subsets of size k the best achievable residual
        // norm of a diagonal map is the (k+1)-st largest multiplier
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let count = 10usize;
        let multipliers: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..3.0)).collect();
        let model = DiagonalModel {
            keys: (0..count as i64)
                .map(|k| CoeffKey { d: 1, i: 1, tau: [k, 0] })
                .collect(),
            multipliers: multipliers.clone(),
        };
        let sorted = model.sorted_multipliers();
        for k in 0..count {
            let mut best = f64::INFINITY;
            // iterate over all subsets with k elements
            for mask in 0u32..(1 << count) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let residual = (0..count)
                    .filter(|&i| mask & (1 << i) == 0)
                    .map(|i| multipliers[i])
                    .fold(0.0f64, f64::max);
                best = best.min(residual);
            }
            let expect = if k < count { sorted[k] } else { 0.0 };
            assert_abs_diff_eq!(best, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn factorization_inequalities_hold_for_bounded_multiples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let count = 24usize;
        let keys: Vec<CoeffKey> = (0..count as i64)
            .map(|k| CoeffKey { d: 1, i: 1, tau: [k, 0] })
            .collect();
        let base: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..2.0)).collect();
        let embedding = DiagonalModel { keys: keys.clone(), multipliers: base.clone() };

        // rho = 1: equality
        let image = DiagonalModel { keys: keys.clone(), multipliers: base.clone() };
        let rep = factorization_check(&image, &embedding, 1.0).unwrap();
        assert!(rep.upper_violation <= 1e-12 && rep.lower_violation <= 1e-12);

        // rho random in [0, 1]: one-sided domination
        let rho: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..1.0)).collect();
        let image = DiagonalModel {
            keys: keys.clone(),
            multipliers: base.iter().zip(&rho).map(|(b, r)| b * r).collect(),
        };
        let rep = factorization_check(&image, &embedding, 1.0).unwrap();
        assert!(rep.upper_violation <= 1e-12);

        // rho = 2: exact doubling both ways
        let image = DiagonalModel {
            keys,
            multipliers: base.iter().map(|b| 2.0 * b).collect(),
        };
        let rep = factorization_check(&image, &embedding, 2.0).unwrap();
        assert!(rep.upper_violation <= 1e-12);
        let a_i = image.sorted_multipliers();
        let a_e = embedding.sorted_multipliers();
        for (ai, ae) in a_i.iter().zip(&a_e) {
            assert_abs_diff_eq!(*ai, 2.0 * ae, epsilon = 1e-13);
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = DiagonalModel {
            keys: vec![CoeffKey { d: 0, i: 0, tau: [0, 0] }],
            multipliers: vec![1.0],
        };
        let b = DiagonalModel {
            keys: vec![CoeffKey { d: 1, i: 1, tau: [0, 0] }],
            multipliers: vec![1.0],
        };
        assert!(matches!(
            factorization_check(&a, &b, 1.0),
            Err(CoreError::ModelShape(_))
        ));
    }

    #[test]
    fn compactness_signal() {
        let w = WeightN::ones(1);
        let domain = Domain::one_dim(-2.0, 2.0);
        // s1 > s2: multipliers decay through depth plateaus
        let model = embedding_diagonal(
            &hilbert_params(2.5, w.clone()),
            &hilbert_params(1.0, w.clone()),
            5,
            &domain,
        )
        .unwrap();
        let a = model.sorted_multipliers();
        assert!(a.last().unwrap() < &0.01);
        // s1 = s2: no compactness, all multipliers one
        let flat = embedding_diagonal(
            &hilbert_params(1.0, w.clone()),
            &hilbert_params(1.0, w),
            5,
            &domain,
        )
        .unwrap();
        assert!(flat.multipliers.iter().all(|&s| (s - 1.0).abs() <= 1e-14));
    }
}
