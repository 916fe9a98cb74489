//! Formal reproducing kernels `K(z, w) = sum_{n,m} K_{n,m} z^n w^{-m}` with
//! matrix coefficients, positivity certificates over finite index windows,
//! Kolmogorov factorizations, and overlapping-space bases for kernel
//! families.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lattice::{IndexBox, MultiIndex, Sublattice};
use crate::laurent::LaurentMatrixSeries;
use crate::matrix::{
    self, hermitian_defect, hermitian_eigenvalues, null_space, CMat, MatrixJson,
};

/// Relative rank threshold shared by factorization and span computations.
pub const RANK_TOL: f64 = 1e-9;

/// A finitely supported formal kernel with `rows x cols` matrix
/// coefficients, stored sparsely over index pairs `(n, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalKernel {
    d: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), CMat>,
}

impl FormalKernel {
    /// The zero kernel.
    pub fn zero(d: usize, rows: usize, cols: usize) -> Self {
        FormalKernel {
            d,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// Lattice dimension.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Coefficient shape.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Insert or overwrite the coefficient at `(n, m)`; zeros are pruned.
    pub fn set(&mut self, n: MultiIndex, m: MultiIndex, coeff: CMat) {
        assert_eq!(n.dim(), self.d);
        assert_eq!(m.dim(), self.d);
        assert_eq!((coeff.nrows(), coeff.ncols()), (self.rows, self.cols));
        if coeff.norm() == 0.0 {
            self.terms.remove(&(n, m));
        } else {
            self.terms.insert((n, m), coeff);
        }
    }

    /// Accumulate into the coefficient at `(n, m)`.
    pub fn add_to(&mut self, n: MultiIndex, m: MultiIndex, coeff: &CMat) {
        let updated = match self.terms.get(&(n.clone(), m.clone())) {
            Some(existing) => existing + coeff,
            None => coeff.clone(),
        };
        self.set(n, m, updated);
    }

    /// Coefficient at `(n, m)` (zero when absent).
    pub fn coeff(&self, n: &MultiIndex, m: &MultiIndex) -> CMat {
        self.terms
            .get(&(n.clone(), m.clone()))
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Term iteration in lexicographic order of `(n, m)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &CMat)> {
        self.terms.iter()
    }

    /// Number of stored coefficients.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exact sum of kernels.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for ((n, m), coeff) in &other.terms {
            out.add_to(n.clone(), m.clone(), coeff);
        }
        Ok(out)
    }

    /// Exact difference of kernels.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for ((n, m), coeff) in &other.terms {
            out.add_to(n.clone(), m.clone(), &(-coeff));
        }
        Ok(out)
    }

    /// The shifted kernel `z^p K(z, w) w^{-q}`, moving `(n, m)` to
    /// `(n + p, m + q)`.
    pub fn shifted(&self, p: &MultiIndex, q: &MultiIndex) -> Self {
        let mut out = FormalKernel::zero(self.d, self.rows, self.cols);
        for ((n, m), coeff) in &self.terms {
            out.set(n + p, m + q, coeff.clone());
        }
        out
    }

    /// Largest coefficient norm (0 for the zero kernel).
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient norm of the difference over all index pairs.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_coeff_norm())
    }

    /// Largest coefficient norm of the difference restricted to pairs with
    /// both indices inside `window`.
    pub fn max_deviation_on(&self, other: &Self, window: &IndexBox) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff
            .terms
            .iter()
            .filter(|((n, m), _)| window.contains(n) && window.contains(m))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max))
    }

    /// Hermitian-symmetry defect `max_{n,m} || K_{n,m} - K_{m,n}^* ||`.
    pub fn hermitian_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((n, m), coeff) in &self.terms {
            let mirror = self.coeff(m, n);
            worst = worst.max((coeff - mirror.adjoint()).norm());
        }
        worst
    }

    /// Restrict the support to pairs with both indices inside the window.
    pub fn restrict_to_box(&self, window: &IndexBox) -> Self {
        let mut out = FormalKernel::zero(self.d, self.rows, self.cols);
        for ((n, m), coeff) in &self.terms {
            if window.contains(n) && window.contains(m) {
                out.set(n.clone(), m.clone(), coeff.clone());
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(CoreError::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(CoreError::ShapeMismatch {
                expected: (self.rows, self.cols),
                got: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Serialize into the JSON wire schema.
    pub fn to_json(&self) -> KernelJson {
        KernelJson {
            d: self.d,
            shape: [self.rows, self.cols],
            hermitian: self.hermitian_symmetry_defect() < 1e-12,
            terms: self
                .terms
                .iter()
                .map(|((n, m), coeff)| KernelTermJson {
                    n: n.0.clone(),
                    m: m.0.clone(),
                    matrix: MatrixJson::from_matrix(coeff),
                })
                .collect(),
        }
    }

    /// Deserialize from the JSON wire schema.
    pub fn from_json(json: &KernelJson) -> Result<Self> {
        let [rows, cols] = json.shape;
        let mut out = FormalKernel::zero(json.d, rows, cols);
        for term in &json.terms {
            if term.n.len() != json.d || term.m.len() != json.d {
                return Err(CoreError::DimensionMismatch {
                    expected: json.d,
                    got: term.n.len().max(term.m.len()),
                });
            }
            out.set(
                MultiIndex(term.n.clone()),
                MultiIndex(term.m.clone()),
                term.matrix.to_matrix(rows, cols)?,
            );
        }
        Ok(out)
    }
}

/// JSON wire schema of a formal kernel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelJson {
    /// Lattice dimension.
    pub d: usize,
    /// Coefficient shape `[rows, cols]`.
    pub shape: [usize; 2],
    /// Whether the kernel satisfied `K_{n,m} = K_{m,n}^*` when written.
    pub hermitian: bool,
    /// Nonzero coefficients.
    pub terms: Vec<KernelTermJson>,
}

/// One kernel coefficient in the JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelTermJson {
    /// Row index (power of z).
    pub n: Vec<i64>,
    /// Column index (power of w^{-1}).
    pub m: Vec<i64>,
    /// Coefficient matrix.
    pub matrix: MatrixJson,
}

/// A Kolmogorov factor `H(z) = sum_n H_n z^n` with `rows x inner`
/// coefficients; the induced kernel is `K_{n,m} = H_n H_m^*`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelFactor {
    d: usize,
    rows: usize,
    inner: usize,
    terms: BTreeMap<MultiIndex, CMat>,
}

impl KernelFactor {
    /// The zero factor with the given shape.
    pub fn zero(d: usize, rows: usize, inner: usize) -> Self {
        KernelFactor {
            d,
            rows,
            inner,
            terms: BTreeMap::new(),
        }
    }

    /// Lattice dimension.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Outer (row) dimension of the coefficients.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Inner (auxiliary space) dimension.
    pub fn inner_dim(&self) -> usize {
        self.inner
    }

    /// Insert a coefficient; zeros are pruned.
    pub fn set(&mut self, n: MultiIndex, coeff: CMat) {
        assert_eq!(n.dim(), self.d);
        assert_eq!((coeff.nrows(), coeff.ncols()), (self.rows, self.inner));
        if coeff.norm() == 0.0 {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, coeff);
        }
    }

    /// Coefficient at `n` (zero when absent).
    pub fn coeff(&self, n: &MultiIndex) -> CMat {
        self.terms
            .get(n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.inner))
    }

    /// Support iteration in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    /// Term iteration.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CMat)> {
        self.terms.iter()
    }

    /// The factor shifted by `z^p`.
    pub fn shifted(&self, p: &MultiIndex) -> Self {
        let mut out = KernelFactor::zero(self.d, self.rows, self.inner);
        for (n, coeff) in &self.terms {
            out.set(n + p, coeff.clone());
        }
        out
    }

    /// View as a Laurent series (same coefficients).
    pub fn as_series(&self) -> LaurentMatrixSeries {
        let mut s = LaurentMatrixSeries::zero(self.d, self.rows, self.inner);
        for (n, coeff) in &self.terms {
            s.set(n.clone(), coeff.clone());
        }
        s
    }
}

/// The kernel induced by a factor: `K_{n,m} = H_n H_m^*` over the factor's
/// finite support. The result is Hermitian by construction.
pub fn kernel_from_factor(factor: &KernelFactor) -> FormalKernel {
    let mut out = FormalKernel::zero(factor.d, factor.rows, factor.rows);
    for (n, hn) in &factor.terms {
        for (m, hm) in &factor.terms {
            out.add_to(n.clone(), m.clone(), &(hn * hm.adjoint()));
        }
    }
    out
}

/// Positivity certificate for a kernel over a finite window: the assembled
/// block Gram matrix `[K_{n_i, n_j}]_{i,j}` together with its extreme
/// eigenvalues and the verdict.
#[derive(Clone, Debug)]
pub struct GramCertificate {
    /// The (sorted, deduplicated) window indices.
    pub window: Vec<MultiIndex>,
    /// Block size (the kernel's coefficient row dimension).
    pub block: usize,
    /// The assembled Gram matrix.
    pub gram: CMat,
    /// Most negative eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// Largest eigenvalue.
    pub max_eigenvalue: f64,
    /// Hermitian-symmetry defect of the assembled Gram matrix.
    pub hermitian_defect: f64,
    /// Whether the kernel passed the PSD test at the given tolerance.
    pub psd: bool,
    /// Tolerance used for the verdict.
    pub tol: f64,
}

/// Assemble the Gram matrix of `kernel` over `window` and test positive
/// semidefiniteness: pass when `min_eig >= -tol * max(1, max_eig)`.
///
/// Requires a square-coefficient kernel. The window is sorted and
/// deduplicated so certificates are reproducible.
pub fn psd_certificate(
    kernel: &FormalKernel,
    window: &[MultiIndex],
    tol: f64,
) -> Result<GramCertificate> {
    let (rows, cols) = kernel.shape();
    if rows != cols {
        return Err(CoreError::ShapeMismatch {
            expected: (rows, rows),
            got: (rows, cols),
        });
    }
    let mut pts: Vec<MultiIndex> = window.to_vec();
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return Err(CoreError::InvalidArgument(
            "psd certificate needs a nonempty window".into(),
        ));
    }
    if pts.iter().any(|n| n.dim() != kernel.dim()) {
        return Err(CoreError::DimensionMismatch {
            expected: kernel.dim(),
            got: pts.iter().map(|n| n.dim()).find(|&x| x != kernel.dim()).unwrap(),
        });
    }
    let b = rows;
    let size = b * pts.len();
    let mut gram = CMat::zeros(size, size);
    for (i, n) in pts.iter().enumerate() {
        for (j, m) in pts.iter().enumerate() {
            gram.view_mut((i * b, j * b), (b, b))
                .copy_from(&kernel.coeff(n, m));
        }
    }
    let herm_defect = hermitian_defect(&gram);
    let ev = hermitian_eigenvalues(&gram);
    let min_eigenvalue = *ev.first().unwrap();
    let max_eigenvalue = *ev.last().unwrap();
    let psd = min_eigenvalue >= -tol * max_eigenvalue.abs().max(1.0)
        && herm_defect <= tol * max_eigenvalue.abs().max(1.0);
    Ok(GramCertificate {
        window: pts,
        block: b,
        gram,
        min_eigenvalue,
        max_eigenvalue,
        hermitian_defect: herm_defect,
        psd,
        tol,
    })
}

/// Extract a Kolmogorov factor from a passed PSD certificate: eigenvalue
/// decomposition `G = W L W^*` with small/negative eigenvalues dropped,
/// `H = W L^{1/2}` sliced back into window blocks. The reconstruction
/// `H H^* ~ G` is verified to `RANK_TOL * ||G||` before returning.
pub fn kolmogorov_factor(kernel: &FormalKernel, cert: &GramCertificate) -> Result<KernelFactor> {
    if !cert.psd {
        return Err(CoreError::NotPositiveSemidefinite {
            min_eigenvalue: cert.min_eigenvalue,
        });
    }
    let herm = matrix::hermitian_part(&cert.gram);
    let eig = herm.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > RANK_TOL * lmax.max(1e-300))
        .collect();
    let inner = keep.len();
    let b = cert.block;
    let mut factor_matrix = CMat::zeros(cert.gram.nrows(), inner);
    for (j, &i) in keep.iter().enumerate() {
        let scale = matrix::c(eig.eigenvalues[i].sqrt());
        factor_matrix
            .column_mut(j)
            .copy_from(&(eig.eigenvectors.column(i) * scale));
    }
    let residual = (&factor_matrix * factor_matrix.adjoint() - &herm).norm();
    let scale = herm.norm().max(1.0);
    if residual > 1e-7 * scale {
        return Err(CoreError::NoConvergence {
            iterations: 1,
            last_delta: residual,
        });
    }
    let mut factor = KernelFactor::zero(kernel.dim(), b, inner);
    for (i, n) in cert.window.iter().enumerate() {
        factor.set(n.clone(), factor_matrix.rows(i * b, b).into_owned());
    }
    Ok(factor)
}

/// The Szego-type kernel of a sublattice restricted to a box:
/// `K_{n,n} = I` for `n` in the sublattice intersected with the box.
pub fn szego_kernel(d: usize, block: usize, sublattice: Sublattice, window: &IndexBox) -> FormalKernel {
    let mut out = FormalKernel::zero(d, block, block);
    for n in window.iter().filter(|n| sublattice.contains(n)) {
        out.set(n.clone(), n.clone(), matrix::eye(block));
    }
    out
}

/// The multiplier-defect kernel `k_{Sz,Omega} (I - S(z) S(w)^*)` of a
/// finitely supported multiplier `S`, with coefficients emitted for all
/// index pairs inside `window`:
///
/// `[K]_{n,m} = chi_Omega(n) delta_{n,m} I - sum_{p in Omega} S_{n-p} S_{m-p}^*`.
///
/// Every emitted coefficient is an exact finite sum because `S` has finite
/// support, so the inner sum over `p` only meets finitely many lattice
/// points of the sublattice.
pub fn multiplier_defect(
    s: &LaurentMatrixSeries,
    sublattice: Sublattice,
    window: &IndexBox,
) -> Result<FormalKernel> {
    let (out_dim, _in_dim) = s.shape();
    if s.dim() != window.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: s.dim(),
            got: window.dim(),
        });
    }
    let mut kernel = FormalKernel::zero(s.dim(), out_dim, out_dim);
    for n in window.iter() {
        for m in window.iter() {
            let mut coeff = CMat::zeros(out_dim, out_dim);
            if n == m && sublattice.contains(&n) {
                coeff += matrix::eye(out_dim);
            }
            // p = n - a for a in supp S; constrain p in Omega and m - p in supp S.
            for (a, sa) in s.terms() {
                let p = &n - a;
                if !sublattice.contains(&p) {
                    continue;
                }
                let b = &m - &p;
                if let Some(sb) = s.coeff_ref(&b) {
                    coeff -= sa * sb.adjoint();
                }
            }
            kernel.set(n.clone(), m.clone(), coeff);
        }
    }
    Ok(kernel)
}

/// Orthonormal basis of the overlapping space of a family of kernel
/// factors: vectors `x = (x_1, ..., x_d)` in the direct sum of the inner
/// spaces with `sum_j H_j(z) x_j = 0` coefficientwise (with `H_j` replaced
/// by `z_j H_j` when `shifted` is set).
#[derive(Clone, Debug)]
pub struct OverlapBasis {
    /// Inner dimension of each factor, in order.
    pub inner_dims: Vec<usize>,
    /// Orthonormal basis columns, length `sum(inner_dims)`.
    pub basis: CMat,
    /// Whether the shifted family `z_j H_j` was used.
    pub shifted: bool,
    /// Total degree at which the null-space dimension stabilized.
    pub degree_reached: i64,
}

impl OverlapBasis {
    /// Dimension of the overlapping space.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Compute an [`OverlapBasis`] for the given factors.
///
/// The equation system stacks, for each lattice index `n` up to a growing
/// total-degree cutoff, the row block `[H_{1,n'} | ... | H_{d,n'}]` (with
/// `n' = n - e_j` for factor `j` in the shifted case). The cutoff grows
/// until the null-space dimension is unchanged for two consecutive degrees
/// or the finite supports are exhausted, and the degree reached is
/// recorded.
pub fn overlap_basis(factors: &[KernelFactor], shifted: bool) -> Result<OverlapBasis> {
    if factors.is_empty() {
        return Err(CoreError::InvalidArgument(
            "overlap basis needs at least one factor".into(),
        ));
    }
    let d = factors[0].dim();
    let rows = factors[0].rows();
    if factors.len() != d {
        return Err(CoreError::InvalidArgument(format!(
            "expected one factor per axis (d = {d}), got {}",
            factors.len()
        )));
    }
    for f in factors {
        if f.dim() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
        if f.rows() != rows {
            return Err(CoreError::ShapeMismatch {
                expected: (rows, f.inner_dim()),
                got: (f.rows(), f.inner_dim()),
            });
        }
    }
    let inner_dims: Vec<usize> = factors.iter().map(|f| f.inner_dim()).collect();
    let total_inner: usize = inner_dims.iter().sum();

    // Effective per-factor supports (shifted by +e_j when requested).
    let shifted_factors: Vec<KernelFactor> = factors
        .iter()
        .enumerate()
        .map(|(j, f)| {
            if shifted {
                f.shifted(&MultiIndex::unit(d, j))
            } else {
                f.clone()
            }
        })
        .collect();
    let all_indices: BTreeSet<MultiIndex> = shifted_factors
        .iter()
        .flat_map(|f| f.support().cloned())
        .collect();
    let max_degree = all_indices.iter().map(|n| n.abs_total()).max().unwrap_or(0);

    let mut prev_dim: Option<usize> = None;
    let mut basis = matrix::eye(total_inner);
    let mut degree_reached = 0;
    for deg in 0..=max_degree {
        let rows_at: Vec<&MultiIndex> = all_indices
            .iter()
            .filter(|n| n.abs_total() <= deg)
            .collect();
        let stacked = if rows_at.is_empty() {
            CMat::zeros(0, total_inner)
        } else {
            let blocks: Vec<CMat> = rows_at
                .iter()
                .map(|n| {
                    let row: Vec<CMat> =
                        shifted_factors.iter().map(|f| f.coeff(n)).collect();
                    matrix::hcat(&row)
                })
                .collect();
            matrix::vcat(&blocks)
        };
        let ns = null_space(&stacked, RANK_TOL);
        let dim = ns.ncols();
        basis = ns;
        degree_reached = deg;
        if prev_dim == Some(dim) && deg >= 1 {
            break;
        }
        prev_dim = Some(dim);
    }
    Ok(OverlapBasis {
        inner_dims,
        basis,
        shifted,
        degree_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, eye};
    use num_complex::Complex64;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn factor_kernel_round_trip_through_certificate() {
        // H(z) = [1; z] in d = 1 gives the rank-one kernel of the shift.
        let mut h = KernelFactor::zero(1, 1, 1);
        h.set(mi(&[0]), CMat::from_element(1, 1, c(1.0)));
        h.set(mi(&[1]), CMat::from_element(1, 1, c(1.0)));
        let k = kernel_from_factor(&h);
        assert_eq!(k.coeff(&mi(&[0]), &mi(&[1]))[(0, 0)], c(1.0));
        assert!(k.hermitian_symmetry_defect() < 1e-15);

        let window: Vec<MultiIndex> = (0..=1).map(|i| mi(&[i])).collect();
        let cert = psd_certificate(&k, &window, 1e-9).unwrap();
        assert!(cert.psd);
        assert!(cert.min_eigenvalue > -1e-12);

        let refactored = kolmogorov_factor(&k, &cert).unwrap();
        let rebuilt = kernel_from_factor(&refactored);
        assert!(k.max_deviation(&rebuilt).unwrap() < 1e-9);
        // Rank-one Gram: the extracted inner dimension is 1.
        assert_eq!(refactored.inner_dim(), 1);
    }

    #[test]
    fn indefinite_kernel_is_rejected() {
        // K with coefficient -1 at (0,0) is not PSD.
        let mut k = FormalKernel::zero(1, 1, 1);
        k.set(mi(&[0]), mi(&[0]), CMat::from_element(1, 1, c(-1.0)));
        let cert = psd_certificate(&k, &[mi(&[0])], 1e-9).unwrap();
        assert!(!cert.psd);
        assert!(kolmogorov_factor(&k, &cert).is_err());
    }

    #[test]
    fn szego_kernel_of_quadrant() {
        let w = IndexBox::centered(2, 1);
        let k = szego_kernel(2, 1, Sublattice::Quadrant, &w);
        assert_eq!(k.coeff(&mi(&[0, 0]), &mi(&[0, 0])), eye(1));
        assert_eq!(k.coeff(&mi(&[1, 1]), &mi(&[1, 1])), eye(1));
        assert_eq!(k.coeff(&mi(&[-1, 0]), &mi(&[-1, 0])).norm(), 0.0);
        assert_eq!(k.coeff(&mi(&[0, 0]), &mi(&[1, 1])).norm(), 0.0);
    }

    #[test]
    fn inner_multiplier_has_zero_defect_on_full_lattice() {
        // S = z1 z2 is inner: the defect kernel vanishes when Omega = Z^d.
        let s = LaurentMatrixSeries::monomial(mi(&[1, 1]), CMat::from_element(1, 1, c(1.0)));
        let w = IndexBox::centered(2, 2);
        let k = multiplier_defect(&s, Sublattice::Full, &w).unwrap();
        assert_eq!(k.num_terms(), 0);
    }

    #[test]
    fn defect_of_inner_multiplier_on_quadrant_sits_on_the_boundary() {
        // With Omega = Z^2_+, the defect of S = z1 z2 is the diagonal kernel
        // supported on the quadrant points whose back-shift by (1,1) leaves
        // the quadrant.
        let s = LaurentMatrixSeries::monomial(mi(&[1, 1]), CMat::from_element(1, 1, c(1.0)));
        let w = IndexBox::centered(2, 2);
        let k = multiplier_defect(&s, Sublattice::Quadrant, &w).unwrap();
        for n in w.iter() {
            for m in w.iter() {
                let expected = if n == m
                    && n.is_nonnegative()
                    && !(&n - &mi(&[1, 1])).is_nonnegative()
                {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(
                    k.coeff(&n, &m)[(0, 0)],
                    Complex64::new(expected, 0.0),
                    "at ({n:?}, {m:?})"
                );
            }
        }
        // And it is PSD.
        let window: Vec<MultiIndex> = w.iter().collect();
        assert!(psd_certificate(&k, &window, 1e-9).unwrap().psd);
    }

    #[test]
    fn contractive_multiplier_defect_is_psd() {
        // S = (z1 + z2) / 2 is a contractive multiplier of the full lattice.
        let s = LaurentMatrixSeries::monomial(mi(&[1, 0]), CMat::from_element(1, 1, c(0.5)))
            .add(&LaurentMatrixSeries::monomial(
                mi(&[0, 1]),
                CMat::from_element(1, 1, c(0.5)),
            ))
            .unwrap();
        let w = IndexBox::centered(2, 2);
        let k = multiplier_defect(&s, Sublattice::Full, &w).unwrap();
        let window: Vec<MultiIndex> = w.iter().collect();
        let cert = psd_certificate(&k, &window, 1e-9).unwrap();
        assert!(cert.psd, "min eigenvalue {}", cert.min_eigenvalue);
    }

    #[test]
    fn overlap_basis_detects_dependent_factors() {
        // Two identical scalar factors H_1 = H_2 = [1] overlap in the
        // direction (1, -1); the shifted family z_1 H_1, z_2 H_2 does not.
        let mut h = KernelFactor::zero(2, 1, 1);
        h.set(mi(&[0, 0]), CMat::from_element(1, 1, c(1.0)));
        let factors = vec![h.clone(), h];
        let plain = overlap_basis(&factors, false).unwrap();
        assert_eq!(plain.dim(), 1);
        let v = plain.basis.column(0);
        assert!((v[0] + v[1]).norm() < 1e-12, "direction (1,-1) expected");
        let shifted = overlap_basis(&factors, true).unwrap();
        assert_eq!(shifted.dim(), 0);
    }

    #[test]
    fn kernel_json_round_trip() {
        let mut k = FormalKernel::zero(2, 1, 1);
        k.set(mi(&[1, 0]), mi(&[0, 1]), CMat::from_element(1, 1, Complex64::new(0.5, -1.5)));
        k.set(mi(&[0, 1]), mi(&[1, 0]), CMat::from_element(1, 1, Complex64::new(0.5, 1.5)));
        let text = serde_json::to_string(&k.to_json()).unwrap();
        let parsed: KernelJson = serde_json::from_str(&text).unwrap();
        let back = FormalKernel::from_json(&parsed).unwrap();
        assert_eq!(k, back);
        assert!(parsed.hermitian);
    }
}
