//! Built-in sample colligations used by the test suite and shipped as JSON
//! with the command-line tool: two hand-constructed two-variable unitary
//! colligations with contrasting minimality behavior, plus the trivial
//! one-variable shift realization.

use crate::colligation::GRColligation;
use crate::matrix::{c, eye, CMat};

/// One-variable realization of `S(z) = z`: `A = 0, B = C = 1, D = 0`.
pub fn shift_realization_1d() -> GRColligation {
    GRColligation::new(
        CMat::zeros(1, 1),
        CMat::from_element(1, 1, c(1.0)),
        CMat::from_element(1, 1, c(1.0)),
        CMat::zeros(1, 1),
        vec![eye(1)],
    )
    .expect("static shapes")
}

/// Two-variable colligation on a 4-dimensional state with scalar input and
/// output realizing `S(z) = z_1 z_2`. It is closely connected but neither
/// strictly closely connected (defect spanned by `e_3`) nor shifted
/// strictly closely connected (defect spanned by `(1, -1, 0, 0)/sqrt 2`).
pub fn example_one() -> GRColligation {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = CMat::from_row_slice(
        4,
        4,
        &[
            c(0.0), c(0.0), c(-h),  c(0.0),
            c(0.0), c(0.0), c(h),   c(0.0),
            c(-h),  c(h),   c(0.0), c(0.0),
            c(h),   c(h),   c(0.0), c(0.0),
        ],
    );
    let b = CMat::from_row_slice(4, 1, &[c(h), c(h), c(0.0), c(0.0)]);
    let c_blk = CMat::from_row_slice(1, 4, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
    let d = CMat::zeros(1, 1);
    let p1 = CMat::from_row_slice(
        4,
        4,
        &[
            c(1.0), c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.5), c(0.5),
            c(0.0), c(0.0), c(0.5), c(0.5),
        ],
    );
    let p2 = CMat::from_row_slice(
        4,
        4,
        &[
            c(0.0), c(0.0), c(0.0),  c(0.0),
            c(0.0), c(1.0), c(0.0),  c(0.0),
            c(0.0), c(0.0), c(0.5),  c(-0.5),
            c(0.0), c(0.0), c(-0.5), c(0.5),
        ],
    );
    GRColligation::new(a, b, c_blk, d, vec![p1, p2]).expect("static shapes")
}

/// Two-variable colligation on an 8-dimensional state with 3-dimensional
/// input and output. It is strictly closely connected (in both variants)
/// yet *not* scattering minimal: a whole family of window-supported state
/// fields is annihilated by both scattering criteria.
pub fn example_two() -> GRColligation {
    let r = 1.0 / 6.0_f64.sqrt(); // 1/sqrt(6)
    let t = (2.0 / 3.0_f64).sqrt(); // sqrt(2/3)
    let a = CMat::from_row_slice(
        8,
        8,
        &[
            c(0.0), c(0.0), c(0.0), c(r),   c(r),   c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(0.0), c(t),   c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(t),   c(0.0), c(0.0), c(0.0), c(0.0),
            c(r),   c(0.0), c(t),   c(0.0), c(0.0), c(0.0), c(0.0), c(0.0),
            c(r),   c(t),   c(0.0), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(r),   c(-r),  c(0.0), c(0.0), c(0.0),
            c(0.0), c(-r),  c(r),   c(0.0), c(0.0), c(0.0), c(0.0), c(0.0),
            c(-t),  c(r),   c(r),   c(0.0), c(0.0), c(0.0), c(0.0), c(0.0),
        ],
    );
    let b = CMat::from_row_slice(
        8,
        3,
        &[
            c(0.0), c(0.0), c(-t),
            c(0.0), c(-r),  c(r),
            c(0.0), c(r),   c(r),
            c(r),   c(0.0), c(0.0),
            c(-r),  c(0.0), c(0.0),
            c(0.0), c(-t),  c(0.0),
            c(-t),  c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0),
        ],
    );
    let mut c_blk = CMat::zeros(3, 8);
    c_blk[(0, 5)] = c(1.0);
    c_blk[(1, 6)] = c(1.0);
    c_blk[(2, 7)] = c(1.0);
    let d = CMat::zeros(3, 3);
    let third = 1.0 / 3.0;
    let sixth = 1.0 / 6.0;
    let p1 = CMat::from_row_slice(
        8,
        8,
        &[
            c(5.0 * sixth), c(0.0), c(-third), c(0.0), c(0.0),         c(-sixth),      c(0.0),       c(0.0),
            c(0.0),         c(0.0), c(0.0),   c(0.0), c(0.0),         c(0.0),         c(0.0),       c(0.0),
            c(-third),      c(0.0), c(third), c(0.0), c(0.0),         c(-third),      c(0.0),       c(0.0),
            c(0.0),         c(0.0), c(0.0),   c(1.0), c(0.0),         c(0.0),         c(0.0),       c(0.0),
            c(0.0),         c(0.0), c(0.0),   c(0.0), c(2.0 * third), c(0.0),         c(-third),    c(third),
            c(-sixth),      c(0.0), c(-third), c(0.0), c(0.0),        c(5.0 * sixth), c(0.0),       c(0.0),
            c(0.0),         c(0.0), c(0.0),   c(0.0), c(-third),      c(0.0),         c(sixth),     c(-sixth),
            c(0.0),         c(0.0), c(0.0),   c(0.0), c(third),       c(0.0),         c(-sixth),    c(sixth),
        ],
    );
    let p2 = CMat::from_row_slice(
        8,
        8,
        &[
            c(sixth), c(0.0), c(third),       c(0.0), c(0.0),   c(sixth), c(0.0),         c(0.0),
            c(0.0),   c(1.0), c(0.0),         c(0.0), c(0.0),   c(0.0),   c(0.0),         c(0.0),
            c(third), c(0.0), c(2.0 * third), c(0.0), c(0.0),   c(third), c(0.0),         c(0.0),
            c(0.0),   c(0.0), c(0.0),         c(0.0), c(0.0),   c(0.0),   c(0.0),         c(0.0),
            c(0.0),   c(0.0), c(0.0),         c(0.0), c(third), c(0.0),   c(third),       c(-third),
            c(sixth), c(0.0), c(third),       c(0.0), c(0.0),   c(sixth), c(0.0),         c(0.0),
            c(0.0),   c(0.0), c(0.0),         c(0.0), c(third), c(0.0),   c(5.0 * sixth), c(sixth),
            c(0.0),   c(0.0), c(0.0),         c(0.0), c(-third), c(0.0),  c(sixth),       c(5.0 * sixth),
        ],
    );
    GRColligation::new(a, b, c_blk, d, vec![p1, p2]).expect("static shapes")
}
