//! Battle-Lemarie spline wavelet bases and their localized variants, weighted
//! Besov / Triebel-Lizorkin sequence norms, discrete weighted Hardy constants
//! for Riemann-Liouville integration operators, and approximation numbers of
//! diagonal embedding models.

#![allow(clippy::needless_range_loop)]

pub mod ef;
pub mod embed;
pub mod error;
pub mod gauss;
pub mod hardy;
pub mod spaces;
pub mod spline;
pub mod suite;
pub mod wavelet;
pub mod weights;

pub use ef::{euler_frobenius, lambda_coeffs, EulerFrobeniusData, TMask};
pub use embed::{
    approximation_numbers, embedding_diagonal, factorization_check, DiagonalModel, SpectrumReport,
};
pub use error::{CoreError, Result};
pub use hardy::{
    hardy_bruteforce, hardy_c, hardy_m, hardy_n, rl_apply, verify_forward, verify_reverse,
    AxisStar, Direction, HardyReport, HardyWeights, OperatorSpec, RatioReport,
};
pub use spaces::{
    analyze, b_norm, besov_norm_via_wavelets, f_norm, lp_besov_norm, CoeffKey, Domain,
    MollifierSpec, NormKind, SequenceCoeffs, SpaceParams,
};
pub use wavelet::{
    localized_scaling, localized_wavelet, normalized_pair, Factor, LocalizedBasis1D, TensorBasis,
};
pub use spline::{bspline, bspline_fourier, pp_combine, pp_inner, CombineTerm, PiecewisePoly, ProductFn};
pub use weights::{
    doubling_probe, muckenhoupt_constant, r0_estimate, CellMassTable, CubeFamily, MuckReport,
    Weight1D, WeightN,
};
