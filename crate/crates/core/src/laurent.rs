//! Sparse matrix-coefficient formal Laurent series in d commuting
//! indeterminates: finitely many nonzero coefficients `f_n` indexed by
//! points of Z^d, with exact term-by-term algebra and the involution
//! `(z^n)^* = z^{-n}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lattice::{IndexBox, MultiIndex};
use crate::matrix::{CMat, MatrixJson};

/// Coefficients below this Frobenius norm are pruned from supports so that
/// exact cancellations keep supports finite and iteration deterministic.
const PRUNE_TOL: f64 = 0.0;

/// A finitely supported formal Laurent series `f(z) = sum_n f_n z^n` with
/// matrix coefficients of a fixed shape.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrixSeries {
    d: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<MultiIndex, CMat>,
}

impl LaurentMatrixSeries {
    /// The zero series with the given lattice dimension and matrix shape.
    pub fn zero(d: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrixSeries {
            d,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// The constant series with a single coefficient at the origin.
    pub fn constant(d: usize, coeff: CMat) -> Self {
        let mut s = LaurentMatrixSeries::zero(d, coeff.nrows(), coeff.ncols());
        s.set(MultiIndex::zero(d), coeff);
        s
    }

    /// The scalar monomial `z^n` times the given coefficient.
    pub fn monomial(n: MultiIndex, coeff: CMat) -> Self {
        let mut s = LaurentMatrixSeries::zero(n.dim(), coeff.nrows(), coeff.ncols());
        s.set(n, coeff);
        s
    }

    /// Lattice dimension d.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Coefficient shape `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Insert or overwrite a coefficient; zero coefficients are dropped.
    pub fn set(&mut self, n: MultiIndex, coeff: CMat) {
        assert_eq!(n.dim(), self.d, "index dimension mismatch");
        assert_eq!(
            (coeff.nrows(), coeff.ncols()),
            (self.rows, self.cols),
            "coefficient shape mismatch"
        );
        if coeff.norm() <= PRUNE_TOL {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, coeff);
        }
    }

    /// Add `coeff` into the coefficient at `n`.
    pub fn add_to(&mut self, n: MultiIndex, coeff: &CMat) {
        let updated = match self.terms.get(&n) {
            Some(existing) => existing + coeff,
            None => coeff.clone(),
        };
        self.set(n, updated);
    }

    /// The coefficient at `n` (zero when absent).
    pub fn coeff(&self, n: &MultiIndex) -> CMat {
        self.terms
            .get(n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Stored coefficient reference, if the index is in the support.
    pub fn coeff_ref(&self, n: &MultiIndex) -> Option<&CMat> {
        self.terms.get(n)
    }

    /// Support iteration in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    /// Term iteration in lexicographic index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CMat)> {
        self.terms.iter()
    }

    /// Number of nonzero coefficients.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest absolute-total degree in the support (0 for the zero series).
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|n| n.abs_total()).max().unwrap_or(0)
    }

    /// Largest Frobenius norm over coefficients (0 for the zero series).
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// Exact term-by-term sum; shapes and d must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, false)?;
        let mut out = self.clone();
        for (n, coeff) in &other.terms {
            out.add_to(n.clone(), coeff);
        }
        Ok(out)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, false)?;
        let mut out = self.clone();
        for (n, coeff) in &other.terms {
            out.add_to(n.clone(), &(-coeff));
        }
        Ok(out)
    }

    /// Exact convolution product `(self * other)_n = sum_l self_{n-l} other_l`.
    /// Both supports are finite so every output coefficient is an exact
    /// finite sum; no truncation happens here.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(CoreError::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        if self.cols != other.rows {
            return Err(CoreError::ShapeMismatch {
                expected: (self.cols, self.cols),
                got: (other.rows, other.cols),
            });
        }
        let mut out = LaurentMatrixSeries::zero(self.d, self.rows, other.cols);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_to(a + b, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// The formal adjoint `f(z)^* = sum_n f_n^* z^{-n}`.
    pub fn adjoint(&self) -> Self {
        let mut out = LaurentMatrixSeries::zero(self.d, self.cols, self.rows);
        for (n, coeff) in &self.terms {
            out.set(-n, coeff.adjoint());
        }
        out
    }

    /// Left scalar multiple.
    pub fn scale(&self, s: num_complex::Complex64) -> Self {
        let mut out = LaurentMatrixSeries::zero(self.d, self.rows, self.cols);
        for (n, coeff) in &self.terms {
            out.set(n.clone(), coeff.map(|z| z * s));
        }
        out
    }

    /// Restriction of the support to a sublattice membership predicate.
    pub fn restrict<F: Fn(&MultiIndex) -> bool>(&self, keep: F) -> Self {
        let mut out = LaurentMatrixSeries::zero(self.d, self.rows, self.cols);
        for (n, coeff) in &self.terms {
            if keep(n) {
                out.set(n.clone(), coeff.clone());
            }
        }
        out
    }

    /// Restriction of the support to a finite box.
    pub fn restrict_to_box(&self, window: &IndexBox) -> Self {
        self.restrict(|n| window.contains(n))
    }

    /// Shift of the variable: returns `z^m f(z)`.
    pub fn shifted(&self, m: &MultiIndex) -> Self {
        let mut out = LaurentMatrixSeries::zero(self.d, self.rows, self.cols);
        for (n, coeff) in &self.terms {
            out.set(n + m, coeff.clone());
        }
        out
    }

    /// Largest coefficient norm of `self - other`; shapes must agree.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_coeff_norm())
    }

    fn check_compatible(&self, other: &Self, _product: bool) -> Result<()> {
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
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            d: self.d,
            shape: [self.rows, self.cols],
            terms: self
                .terms
                .iter()
                .map(|(n, m)| SeriesTermJson {
                    index: n.0.clone(),
                    matrix: MatrixJson::from_matrix(m),
                })
                .collect(),
        }
    }

    /// Deserialize from the JSON wire schema, validating shapes.
    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let [rows, cols] = json.shape;
        let mut out = LaurentMatrixSeries::zero(json.d, rows, cols);
        for term in &json.terms {
            if term.index.len() != json.d {
                return Err(CoreError::DimensionMismatch {
                    expected: json.d,
                    got: term.index.len(),
                });
            }
            out.set(
                MultiIndex(term.index.clone()),
                term.matrix.to_matrix(rows, cols)?,
            );
        }
        Ok(out)
    }
}

/// JSON wire schema of a Laurent series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    /// Lattice dimension.
    pub d: usize,
    /// Coefficient shape `[rows, cols]`.
    pub shape: [usize; 2],
    /// Nonzero terms.
    pub terms: Vec<SeriesTermJson>,
}

/// One nonzero coefficient in the JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTermJson {
    /// Lattice index of the coefficient.
    pub index: Vec<i64>,
    /// The coefficient matrix.
    pub matrix: MatrixJson,
}
