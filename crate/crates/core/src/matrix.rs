//! Dense complex matrices and the small linear-algebra toolkit the rest of
//! the crate leans on: spans, null spaces, Hermitian eigenvalues, unitary
//! polar factors, random unitaries, and the `[re, im]` JSON encoding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Dense complex matrix used everywhere in the crate.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Zero matrix of the given shape.
pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Identity matrix of the given size.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Operator (spectral) norm; 0 for an empty matrix.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Frobenius norm.
pub fn fro_norm(m: &CMat) -> f64 {
    m.norm()
}

/// Hermitian part `(m + m^*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Departure from Hermitian symmetry, `|| m - m^* ||`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// first so tiny asymmetries do not poison the solver.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Orthonormal basis (as matrix columns) of the column span of `m`,
/// keeping singular directions with `sigma > rel_tol * sigma_max`.
pub fn column_span(m: &CMat, rel_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return zeros(m.nrows(), 0);
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count();
    u.columns(0, rank).into_owned()
}

/// Numerical rank with relative threshold `rel_tol`.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis (matrix columns) of the right null space of `m`:
/// vectors x with `m x ~ 0`, singular values `<= rel_tol * sigma_max`.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return eye(n);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with v_t requested");
    let smax = svd.singular_values.max();
    let rank = if smax == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax)
            .count()
    };
    // Rows of v_t beyond the rank span the null space (conjugated back).
    let mut basis = zeros(n, n - rank);
    for (j, row) in (rank..v_t.nrows()).enumerate() {
        for i in 0..n {
            basis[(i, j)] = v_t[(row, i)].conj();
        }
    }
    // v_t only has min(nrows, ncols) rows; complete with the kernel of the
    // trivial directions when m has fewer rows than columns.
    let have = v_t.nrows();
    if have < n {
        // Append an orthonormal completion of the row space of v_t.
        let mut full = zeros(n, n);
        for r in 0..have {
            for i in 0..n {
                full[(i, r)] = v_t[(r, i)].conj();
            }
        }
        let completion = complete_orthonormal(&full.columns(0, have).into_owned());
        let extra = completion.ncols();
        let mut out = zeros(n, n - rank);
        out.columns_mut(0, have - rank)
            .copy_from(&basis.columns(0, have - rank));
        out.columns_mut(have - rank, extra).copy_from(&completion);
        return out;
    }
    basis
}

/// Orthonormal vectors spanning the orthogonal complement of the column
/// span of `q` (whose columns are assumed orthonormal).
pub fn complete_orthonormal(q: &CMat) -> CMat {
    let n = q.nrows();
    let r = q.ncols();
    if r >= n {
        return zeros(n, 0);
    }
    // Project the identity and orthonormalize the residuals.
    let mut cols: Vec<CVec> = Vec::new();
    let mut basis = q.clone();
    for i in 0..n {
        if basis.ncols() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        // Two rounds of Gram-Schmidt for numerical safety.
        for _ in 0..2 {
            let coeffs = basis.adjoint() * &v;
            v -= &basis * coeffs;
        }
        let norm = v.norm();
        if norm > 1e-10 {
            v /= Complex64::new(norm, 0.0);
            basis = hcat(&[basis.clone(), CMat::from_columns(&[v.clone()])]);
            cols.push(v);
        }
    }
    if cols.is_empty() {
        zeros(n, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Least-squares solve `m x = rhs` via SVD (minimum-norm solution).
pub fn lstsq(m: &CMat, rhs: &CMat, rel_tol: f64) -> CMat {
    if m.ncols() == 0 {
        return zeros(0, rhs.ncols());
    }
    let svd = m.clone().svd(true, true);
    svd.solve(rhs, rel_tol * svd.singular_values.max().max(f64::MIN_POSITIVE))
        .expect("svd solve")
}

/// Moore-Penrose pseudoinverse.
pub fn pinv(m: &CMat, rel_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let eps = rel_tol * svd.singular_values.max().max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps).expect("pseudo inverse")
}

/// Closest unitary matrix in the polar sense: for `m = U S V^*`, returns
/// `U V^*`. Requires a square input.
pub fn polar_unitary(m: &CMat) -> CMat {
    assert_eq!(m.nrows(), m.ncols(), "polar factor needs a square matrix");
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Deviation of `m` from being unitary, `max(||m^* m - I||, ||m m^* - I||)`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let c = m.ncols();
    let left = (m.adjoint() * m - eye(c)).norm();
    let right = (m * m.adjoint() - eye(n)).norm();
    left.max(right)
}

/// Horizontal concatenation of equally tall blocks.
pub fn hcat(blocks: &[CMat]) -> CMat {
    assert!(!blocks.is_empty());
    let rows = blocks[0].nrows();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.columns_mut(c, b.ncols()).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Vertical concatenation of equally wide blocks.
pub fn vcat(blocks: &[CMat]) -> CMat {
    assert!(!blocks.is_empty());
    let cols = blocks[0].ncols();
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat column mismatch");
        out.rows_mut(r, b.nrows()).copy_from(b);
        r += b.nrows();
    }
    out
}

/// 2x2 block matrix `[[a, b], [c, d]]`.
pub fn block2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    vcat(&[hcat(&[a.clone(), b.clone()]), hcat(&[c.clone(), d.clone()])])
}

/// Random matrix with independent standard complex Gaussian entries.
pub fn random_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        // Box-Muller from uniform draws keeps the dependency surface small.
        let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(
            r * (2.0 * std::f64::consts::PI * u2).cos(),
            r * (2.0 * std::f64::consts::PI * u2).sin(),
        )
    })
}

/// Haar-ish random unitary matrix: QR of a complex Gaussian sample with the
/// R diagonal phases absorbed.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = random_gaussian(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random family of d orthogonal projections that are mutually orthogonal
/// and sum to the identity, with ranks as evenly split as the dimension
/// allows (every rank at least 1 requires `n >= d`).
pub fn random_projection_partition<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<CMat> {
    assert!(n >= d, "need state dimension >= number of projections");
    let w = random_unitary(rng, n);
    let base = n / d;
    let extra = n % d;
    let mut projections = Vec::with_capacity(d);
    let mut col = 0;
    for k in 0..d {
        let mult = base + usize::from(k < extra);
        let wk = w.columns(col, mult).into_owned();
        projections.push(&wk * wk.adjoint());
        col += mult;
    }
    projections
}

/// JSON wire form of a complex matrix: row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    /// Encode a matrix.
    pub fn from_matrix(m: &CMat) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    /// Decode a matrix, validating rectangularity against the given shape.
    pub fn to_matrix(&self, rows: usize, cols: usize) -> Result<CMat> {
        if self.0.len() != rows || self.0.iter().any(|r| r.len() != cols) {
            let got_rows = self.0.len();
            let got_cols = self.0.first().map_or(0, |r| r.len());
            return Err(CoreError::ShapeMismatch {
                expected: (rows, cols),
                got: (got_rows, got_cols),
            });
        }
        Ok(CMat::from_fn(rows, cols, |i, j| {
            Complex64::new(self.0[i][j][0], self.0[i][j][1])
        }))
    }
}

/// Real scalar as a complex entry, ergonomic shorthand for tests and data.
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
