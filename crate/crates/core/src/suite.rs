//! Fixed, versioned test-function suite used by the verification harness and
//! the acceptance runs: shifted B-splines of orders 1..4, their dyadic
//! dilates, translates, a high-order spline bump, and products for two
//! dimensions. All members live on the right half line so they are valid
//! inputs for cut-at-zero operators.

use crate::spline::{bspline, PiecewisePoly, ProductFn};

fn member(n: usize, level: i32, shift: f64) -> PiecewisePoly {
    // B_n(2^level x - shift) built on the exact dyadic grid
    let b = bspline(n, 0.0).expect("suite orders are small");
    crate::spline::pp_combine(&[crate::spline::CombineTerm {
        coeff: 1.0,
        f: &b,
        level,
        shift,
    }])
}

/// The twenty one-dimensional members.
pub fn standard_1d() -> Vec<(String, ProductFn)> {
    let mut out = Vec::with_capacity(20);
    for n in 1..=4usize {
        for level in 0..=3i32 {
            out.push((
                format!("B{n}(2^{level} x)"),
                ProductFn::one_dim(member(n, level, 0.0)),
            ));
        }
    }
    out.push(("B2(x-1)".into(), ProductFn::one_dim(member(2, 0, 1.0))));
    out.push(("B3(x-2)".into(), ProductFn::one_dim(member(3, 0, 2.0))));
    out.push(("B6(x)".into(), ProductFn::one_dim(member(6, 0, 0.0))));
    out.push(("B6(2x-2)".into(), ProductFn::one_dim(member(6, 1, 2.0))));
    out
}

/// Two-dimensional products; the first axis stays on the live side of a cut
/// at zero, the second axis is unconstrained.
pub fn standard_2d() -> Vec<(String, ProductFn)> {
    let pairs: Vec<(&str, PiecewisePoly, PiecewisePoly)> = vec![
        ("B1 x B3(.+2)", member(1, 0, 0.0), member(3, 0, -2.0)),
        ("B2(2.) x B3(.+2)", member(2, 1, 0.0), member(3, 0, -2.0)),
        ("B3 x B2(.-1)", member(3, 0, 0.0), member(2, 0, 1.0)),
        ("B3(2.) x B3(.+2)", member(3, 1, 0.0), member(3, 0, -2.0)),
        ("B4(4.) x B3(.+2)", member(4, 2, 0.0), member(3, 0, -2.0)),
        ("B6 x B2(.-1)", member(6, 0, 0.0), member(2, 0, 1.0)),
        ("B3(4.) x B3(.+2)", member(3, 2, 0.0), member(3, 0, -2.0)),
        ("B2 x B6(.-1)", member(2, 0, 0.0), member(6, 0, 1.0)),
    ];
    pairs
        .into_iter()
        .map(|(name, a, b)| (name.to_string(), ProductFn::new(vec![a, b]).unwrap()))
        .collect()
}

/// Dyadic dilation family f_j(x) = f(2^j x) of the cubic member, j = 0..3.
pub fn dilation_family_2d() -> Vec<(String, ProductFn)> {
    (0..=3i32)
        .map(|j| {
            (
                format!("B3(2^{j} x1) x B3(x2+2)"),
                ProductFn::new(vec![member(3, j, 0.0), member(3, 0, -2.0)]).unwrap(),
            )
        })
        .collect()
}
