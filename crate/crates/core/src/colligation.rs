//! Givone-Roesser unitary colligations: a unitary connecting matrix
//! `U = [[A, B], [C, D]]` on `H (+) E -> H (+) E_*` together with a family
//! of orthogonal projections `P_1, ..., P_d` decomposing the state space.
//! This module provides structural validation, the abelianized functional
//! calculus, transfer-function coefficients, Krylov-type closures and the
//! minimality taxonomy (closely connected / strictly closely connected /
//! the shifted variant), plus a window search for scattering-minimality
//! counterexample witnesses.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lattice::{IndexBox, MultiIndex};
use crate::laurent::LaurentMatrixSeries;
use crate::matrix::{
    self, block2x2, hcat, null_space, random_projection_partition, random_unitary, unitarity_defect,
    CMat, CVec, MatrixJson,
};

/// Default tolerance for structural validation residuals.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Relative rank threshold for span computations.
const RANK_TOL: f64 = 1e-9;

/// A Givone-Roesser unitary colligation.
#[derive(Clone, Debug)]
pub struct GRColligation {
    d: usize,
    state_dim: usize,
    in_dim: usize,
    out_dim: usize,
    a: CMat,
    b: CMat,
    c: CMat,
    dmat: CMat,
    projections: Vec<CMat>,
}

impl GRColligation {
    /// Assemble a colligation from its blocks, checking shapes only;
    /// use [`GRColligation::validate`] for the numeric structure checks.
    pub fn new(
        a: CMat,
        b: CMat,
        c: CMat,
        dmat: CMat,
        projections: Vec<CMat>,
    ) -> Result<Self> {
        let state_dim = a.nrows();
        if a.ncols() != state_dim {
            return Err(CoreError::ShapeMismatch {
                expected: (state_dim, state_dim),
                got: (a.nrows(), a.ncols()),
            });
        }
        let in_dim = b.ncols();
        let out_dim = c.nrows();
        if b.nrows() != state_dim {
            return Err(CoreError::ShapeMismatch {
                expected: (state_dim, in_dim),
                got: (b.nrows(), b.ncols()),
            });
        }
        if c.ncols() != state_dim {
            return Err(CoreError::ShapeMismatch {
                expected: (out_dim, state_dim),
                got: (c.nrows(), c.ncols()),
            });
        }
        if (dmat.nrows(), dmat.ncols()) != (out_dim, in_dim) {
            return Err(CoreError::ShapeMismatch {
                expected: (out_dim, in_dim),
                got: (dmat.nrows(), dmat.ncols()),
            });
        }
        if projections.is_empty() {
            return Err(CoreError::InvalidArgument(
                "a colligation needs at least one projection".into(),
            ));
        }
        for p in &projections {
            if (p.nrows(), p.ncols()) != (state_dim, state_dim) {
                return Err(CoreError::ShapeMismatch {
                    expected: (state_dim, state_dim),
                    got: (p.nrows(), p.ncols()),
                });
            }
        }
        Ok(GRColligation {
            d: projections.len(),
            state_dim,
            in_dim,
            out_dim,
            a,
            b,
            c,
            dmat,
            projections,
        })
    }

    /// Number of lattice dimensions (= number of projections).
    pub fn dim(&self) -> usize {
        self.d
    }

    /// State space dimension.
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    /// Input space dimension.
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    /// Output space dimension.
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// The A block (state -> state).
    pub fn a(&self) -> &CMat {
        &self.a
    }

    /// The B block (input -> state).
    pub fn b(&self) -> &CMat {
        &self.b
    }

    /// The C block (state -> output).
    pub fn c(&self) -> &CMat {
        &self.c
    }

    /// The D block (input -> output).
    pub fn d_block(&self) -> &CMat {
        &self.dmat
    }

    /// The state projections.
    pub fn projections(&self) -> &[CMat] {
        &self.projections
    }

    /// The k-th projection.
    pub fn projection(&self, k: usize) -> &CMat {
        &self.projections[k]
    }

    /// The connecting matrix `[[A, B], [C, D]]`.
    pub fn connecting_matrix(&self) -> CMat {
        block2x2(&self.a, &self.b, &self.c, &self.dmat)
    }

    /// Structural residuals: projection idempotency/self-adjointness,
    /// mutual orthogonality, partition of the identity, and unitarity of
    /// the connecting matrix.
    pub fn validate(&self) -> ValidationReport {
        let mut idempotent: f64 = 0.0;
        let mut hermitian: f64 = 0.0;
        let mut mutual: f64 = 0.0;
        let mut sum = CMat::zeros(self.state_dim, self.state_dim);
        for (k, p) in self.projections.iter().enumerate() {
            idempotent = idempotent.max((p * p - p).norm());
            hermitian = hermitian.max(matrix::hermitian_defect(p));
            for q in self.projections.iter().skip(k + 1) {
                mutual = mutual.max((p * q).norm());
            }
            sum += p;
        }
        let projection_sum = (sum - matrix::eye(self.state_dim)).norm();
        let unitarity = unitarity_defect(&self.connecting_matrix());
        ValidationReport {
            projection_idempotent: idempotent,
            projection_hermitian: hermitian,
            projection_mutual: mutual,
            projection_sum,
            unitarity,
        }
    }

    /// Validate against a tolerance, failing with the first bad residual.
    pub fn validated(self, tol: f64) -> Result<Self> {
        let report = self.validate();
        match report.worst_offender(tol) {
            None => Ok(self),
            Some(msg) => Err(CoreError::ValidationFailed(msg)),
        }
    }

    /// Orthonormal basis columns of the range of `P_k`.
    pub fn projection_basis(&self, k: usize) -> CMat {
        matrix::column_span(&self.projections[k], RANK_TOL)
    }

    /// Serialize into the JSON wire schema.
    pub fn to_json(&self) -> ColligationJson {
        ColligationJson {
            d: self.d,
            state_dim: self.state_dim,
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            a: MatrixJson::from_matrix(&self.a),
            b: MatrixJson::from_matrix(&self.b),
            c: MatrixJson::from_matrix(&self.c),
            dmat: MatrixJson::from_matrix(&self.dmat),
            projections: self
                .projections
                .iter()
                .map(MatrixJson::from_matrix)
                .collect(),
        }
    }

    /// Deserialize from the JSON wire schema (shape checks included).
    pub fn from_json(json: &ColligationJson) -> Result<Self> {
        if json.projections.len() != json.d {
            return Err(CoreError::DimensionMismatch {
                expected: json.d,
                got: json.projections.len(),
            });
        }
        GRColligation::new(
            json.a.to_matrix(json.state_dim, json.state_dim)?,
            json.b.to_matrix(json.state_dim, json.in_dim)?,
            json.c.to_matrix(json.out_dim, json.state_dim)?,
            json.dmat.to_matrix(json.out_dim, json.in_dim)?,
            json.projections
                .iter()
                .map(|p| p.to_matrix(json.state_dim, json.state_dim))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// Residuals from [`GRColligation::validate`].
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// `max_k || P_k^2 - P_k ||`.
    pub projection_idempotent: f64,
    /// `max_k || P_k - P_k^* ||`.
    pub projection_hermitian: f64,
    /// `max_{j != k} || P_j P_k ||`.
    pub projection_mutual: f64,
    /// `|| sum_k P_k - I ||`.
    pub projection_sum: f64,
    /// `max(|| U^* U - I ||, || U U^* - I ||)` for the connecting matrix.
    pub unitarity: f64,
}

impl ValidationReport {
    /// Largest residual.
    pub fn max_residual(&self) -> f64 {
        self.projection_idempotent
            .max(self.projection_hermitian)
            .max(self.projection_mutual)
            .max(self.projection_sum)
            .max(self.unitarity)
    }

    /// True when every residual is within `tol`.
    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }

    fn worst_offender(&self, tol: f64) -> Option<String> {
        let checks = [
            ("projection idempotency", self.projection_idempotent),
            ("projection self-adjointness", self.projection_hermitian),
            ("projection mutual orthogonality", self.projection_mutual),
            ("projection partition of identity", self.projection_sum),
            ("connecting matrix unitarity", self.unitarity),
        ];
        checks
            .iter()
            .filter(|(_, r)| *r > tol)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(name, r)| format!("{name} residual {r:.3e} exceeds tol {tol:.1e}"))
    }
}

/// JSON wire schema of a colligation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColligationJson {
    /// Lattice dimension.
    pub d: usize,
    /// State dimension.
    pub state_dim: usize,
    /// Input dimension.
    pub in_dim: usize,
    /// Output dimension.
    pub out_dim: usize,
    /// The A block.
    #[serde(rename = "A")]
    pub a: MatrixJson,
    /// The B block.
    #[serde(rename = "B")]
    pub b: MatrixJson,
    /// The C block.
    #[serde(rename = "C")]
    pub c: MatrixJson,
    /// The D block.
    #[serde(rename = "D")]
    pub dmat: MatrixJson,
    /// The state projections, in axis order.
    pub projections: Vec<MatrixJson>,
}

/// Memoizing evaluator for the abelianized functional calculus
/// `(G^a)^n = sum over words with letter counts n of P_{i_N} G ... P_{i_1} G`,
/// computed through the recursion
/// `(G^a)^n = sum_{k : n_k > 0} P_k G (G^a)^{n - e_k}`.
pub struct AbelianCalculus {
    g: CMat,
    projections: Vec<CMat>,
    memo: BTreeMap<MultiIndex, CMat>,
}

impl AbelianCalculus {
    /// Calculus for generator `g` and the given projections.
    pub fn new(g: CMat, projections: Vec<CMat>) -> Self {
        AbelianCalculus {
            g,
            projections,
            memo: BTreeMap::new(),
        }
    }

    /// Calculus in the main generator A of a colligation.
    pub fn of_a(col: &GRColligation) -> Self {
        AbelianCalculus::new(col.a.clone(), col.projections.clone())
    }

    /// Calculus in the adjoint generator A^* (same projections); note
    /// `((A^a)^n)^*` is *not* this object's power at `n` in general, see
    /// [`AbelianCalculus::power`].
    pub fn of_a_star(col: &GRColligation) -> Self {
        AbelianCalculus::new(col.a.adjoint(), col.projections.clone())
    }

    /// The abelianized power `(G^a)^n`; zero whenever `n` leaves the
    /// nonnegative quadrant.
    pub fn power(&mut self, n: &MultiIndex) -> CMat {
        let s = self.g.nrows();
        if !n.is_nonnegative() {
            return CMat::zeros(s, s);
        }
        if n.abs_total() == 0 {
            return matrix::eye(s);
        }
        if let Some(hit) = self.memo.get(n) {
            return hit.clone();
        }
        let mut acc = CMat::zeros(s, s);
        for k in 0..self.projections.len() {
            if n.entry(k) > 0 {
                let prev = self.power(&n.step_down(k));
                acc += &self.projections[k] * &self.g * prev;
            }
        }
        self.memo.insert(n.clone(), acc.clone());
        acc
    }
}

/// One-shot abelianized power `(G^a)^n`.
pub fn abelianized_power(g: &CMat, projections: &[CMat], n: &MultiIndex) -> CMat {
    AbelianCalculus::new(g.clone(), projections.to_vec()).power(n)
}

/// Transfer-function coefficients of the colligation up to total degree
/// `max_degree`:
/// `S_0 = D`, and `S_n = sum_k C (A^a)^{n - e_k} P_k B` for `n` in the
/// nonnegative quadrant with `1 <= |n| <= max_degree`. All coefficients in
/// that range are exact; nothing beyond the quadrant is emitted because the
/// transfer function is supported there.
pub fn transfer_coefficients(col: &GRColligation, max_degree: i64) -> LaurentMatrixSeries {
    let d = col.d;
    let mut series = LaurentMatrixSeries::zero(d, col.out_dim, col.in_dim);
    series.set(MultiIndex::zero(d), col.dmat.clone());
    let mut calc = AbelianCalculus::of_a(col);
    for n in IndexBox::nonnegative(d, max_degree).iter() {
        let t = n.total();
        if t < 1 || t > max_degree {
            continue;
        }
        let mut coeff = CMat::zeros(col.out_dim, col.in_dim);
        for k in 0..d {
            if n.entry(k) > 0 {
                coeff += &col.c * calc.power(&n.step_down(k)) * &col.projections[k] * &col.b;
            }
        }
        series.set(n, coeff);
    }
    series
}

/// An orthonormal basis of the smallest subspace containing the given seed
/// columns and invariant under every generator.
#[derive(Clone, Debug)]
pub struct KrylovClosure {
    /// Orthonormal basis columns of the closure.
    pub basis: CMat,
}

impl KrylovClosure {
    /// Dimension of the closed subspace.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> CMat {
        matrix::complete_orthonormal(&self.basis)
    }
}

/// Compute the Krylov closure of `seeds` under `generators` by repeated
/// Gram-Schmidt extension until no new directions appear. Deterministic:
/// seeds and generators are consumed in the given order.
pub fn krylov_closure(ambient_dim: usize, seeds: &[CMat], generators: &[CMat]) -> KrylovClosure {
    let mut basis = CMat::zeros(ambient_dim, 0);
    for s in seeds {
        extend_basis(&mut basis, s);
    }
    loop {
        let before = basis.ncols();
        if before == ambient_dim {
            break;
        }
        for g in generators {
            if basis.ncols() > 0 {
                let image = g * &basis;
                extend_basis(&mut basis, &image);
            }
        }
        if basis.ncols() == before {
            break;
        }
    }
    KrylovClosure { basis }
}

/// Append the new directions of `cols` to the orthonormal `basis` in place.
fn extend_basis(basis: &mut CMat, cols: &CMat) {
    for j in 0..cols.ncols() {
        let mut v: CVec = cols.column(j).into_owned();
        let scale = v.norm().max(1.0);
        for _ in 0..2 {
            if basis.ncols() > 0 {
                let coeffs = basis.adjoint() * &v;
                v -= &*basis * coeffs;
            }
        }
        if v.norm() > 1e-9 * scale {
            v /= num_complex::Complex64::new(v.norm(), 0.0);
            *basis = if basis.ncols() == 0 {
                CMat::from_columns(&[v])
            } else {
                hcat(&[basis.clone(), CMat::from_columns(&[v])])
            };
        }
    }
}

/// The three canonical closures of a colligation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    /// Closely connected: smallest subspace containing `im B` and
    /// `im C^*` invariant under `A, A^*, P_1, ..., P_d`.
    CloselyConnected,
    /// Strictly closely connected:
    /// `span { im ((A^a)^n)^* C^*, im (A^a)^n P_k B }` over the quadrant.
    StrictlyCloselyConnected,
    /// The shifted variant:
    /// `span { im ((A^a)^n)^* P_k C^*, im ((A^{*a})^n)^* B }`, where
    /// `(A^{*a})` is the abelianized calculus in the generator `A^*`.
    ShiftedStrictlyCloselyConnected,
}

/// Compute the requested closure subspace.
///
/// The cc closure is a genuine Krylov fixed point. The scc/sscc spans are
/// unions over all quadrant exponents of abelianized powers applied to the
/// seeds; the total degree is grown until the span is stable for two
/// consecutive degrees (and at least `state_dim` degrees were examined,
/// which caps the growth since each productive degree adds a dimension).
pub fn colligation_closure(col: &GRColligation, kind: ClosureKind) -> KrylovClosure {
    let cstar = col.c.adjoint();
    if let ClosureKind::CloselyConnected = kind {
        let mut gens = vec![col.a.clone(), col.a.adjoint()];
        gens.extend(col.projections.iter().cloned());
        return krylov_closure(col.state_dim, &[col.b.clone(), cstar], &gens);
    }
    let d = col.d;
    let mut fwd = AbelianCalculus::of_a(col);
    let mut bwd = AbelianCalculus::of_a_star(col);
    // The summed coefficient map T(q) = sum_k (A^a)^{q - e_k} P_k is the
    // state-side factor of the transfer coefficient S_q; its adjoint equals
    // the corresponding coefficient of the backward calculus, by regrouping
    // the words of the two expansions.
    let t_of = |fwd: &mut AbelianCalculus, q: &MultiIndex| -> CMat {
        let mut acc = CMat::zeros(col.state_dim, col.state_dim);
        for k in 0..d {
            if q.entry(k) > 0 {
                acc += fwd.power(&q.step_down(k)) * &col.projections[k];
            }
        }
        acc
    };
    let mut basis = CMat::zeros(col.state_dim, 0);
    let max_degree = (col.state_dim + 2) as i64;
    let mut stable_for = 0usize;
    for deg in 0..=max_degree {
        let before = basis.ncols();
        for n in IndexBox::nonnegative(d, deg).iter() {
            if n.total() != deg {
                continue;
            }
            match kind {
                ClosureKind::StrictlyCloselyConnected => {
                    // Adjoints of the coefficients of
                    // [C (I - Z A)^{-1}; B^* (I - Z^{-1} A^*)^{-1} Z^{-1}]:
                    // ((A^a)^n)^* C^* and T(n) B (n > 0 for the latter).
                    extend_basis(&mut basis, &(fwd.power(&n).adjoint() * &cstar));
                    if deg > 0 {
                        extend_basis(&mut basis, &(t_of(&mut fwd, &n) * &col.b));
                    }
                }
                ClosureKind::ShiftedStrictlyCloselyConnected => {
                    // Adjoints of the coefficients of
                    // [C (I - Z A)^{-1} Z; B^* (I - Z^{-1} A^*)^{-1}]:
                    // T(n)^* C^* (n > 0) and ((A^{*a})^n)^* B.
                    if deg > 0 {
                        extend_basis(&mut basis, &(t_of(&mut fwd, &n).adjoint() * &cstar));
                    }
                    extend_basis(&mut basis, &(bwd.power(&n).adjoint() * &col.b));
                }
                ClosureKind::CloselyConnected => unreachable!(),
            }
        }
        if basis.ncols() == col.state_dim {
            break;
        }
        stable_for = if basis.ncols() == before { stable_for + 1 } else { 0 };
        if stable_for >= 2 {
            break;
        }
    }
    KrylovClosure { basis }
}

/// A finitely supported state-valued Laurent polynomial, used as a witness
/// in scattering-minimality certificates.
#[derive(Clone, Debug)]
pub struct StateFieldPolynomial {
    /// Lattice dimension.
    pub d: usize,
    /// State dimension.
    pub state_dim: usize,
    /// Nonzero coefficients.
    pub terms: BTreeMap<MultiIndex, CVec>,
}

impl StateFieldPolynomial {
    /// Squared l2 norm of the coefficient family.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|v| v.norm_squared()).sum()
    }

    /// Coefficient at `p` (zero when absent).
    pub fn coeff(&self, p: &MultiIndex) -> CVec {
        self.terms
            .get(p)
            .cloned()
            .unwrap_or_else(|| CVec::zeros(self.state_dim))
    }
}

/// Classification of a colligation against the minimality taxonomy.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    /// State dimension of the classified colligation.
    pub state_dim: usize,
    /// Dimension of the closely-connected subspace.
    pub cc_dim: usize,
    /// Dimension of the strictly-closely-connected subspace.
    pub scc_dim: usize,
    /// Dimension of the shifted strictly-closely-connected subspace.
    pub sscc_dim: usize,
    /// `cc_dim == state_dim`.
    pub closely_connected: bool,
    /// `scc_dim == state_dim`.
    pub strictly_closely_connected: bool,
    /// `sscc_dim == state_dim`.
    pub shifted_strictly_closely_connected: bool,
    /// Orthonormal basis of the orthogonal complement of the scc subspace.
    pub scc_defect: CMat,
    /// Orthonormal basis of the orthogonal complement of the sscc subspace.
    pub sscc_defect: CMat,
    /// A nonzero state field annihilated by the scattering-minimality
    /// criterion on the searched window, when one exists.
    pub scattering_witness: Option<StateFieldPolynomial>,
    /// Dimension of the space of witnesses found on the window.
    pub scattering_defect_dim: usize,
    /// Window searched for witnesses.
    pub cert_window: IndexBox,
    /// Power depth used in the witness search.
    pub cert_depth: usize,
}

/// Classify a colligation: compute the three closures, and search the
/// given window/depth for scattering-minimality witnesses, i.e. nonzero
/// state fields `x(z)` supported in `cert_window` with
/// `C (Z(z) A)^N x(z) = 0` and `B^* Z(z)^{-1} (A^* Z(z)^{-1})^N x(z) = 0`
/// coefficientwise for `N = 0, ..., cert_depth`. A found witness is
/// re-verified at depth `2 * cert_depth` before being reported.
pub fn classify_minimality(
    col: &GRColligation,
    cert_window: &IndexBox,
    cert_depth: usize,
) -> Result<MinimalityReport> {
    if cert_window.dim() != col.d {
        return Err(CoreError::DimensionMismatch {
            expected: col.d,
            got: cert_window.dim(),
        });
    }
    let cc = colligation_closure(col, ClosureKind::CloselyConnected);
    let scc = colligation_closure(col, ClosureKind::StrictlyCloselyConnected);
    let sscc = colligation_closure(col, ClosureKind::ShiftedStrictlyCloselyConnected);

    let witnesses = scattering_witness_space(col, cert_window, cert_depth)?;
    let scattering_defect_dim = witnesses.ncols();
    let scattering_witness = if scattering_defect_dim > 0 {
        let w = state_field_from_vector(col, cert_window, &witnesses.column(0).into_owned());
        // Confidence pass: the witness must stay annihilated at twice the depth.
        let residual = witness_residual(col, &w, cert_depth * 2)?;
        if residual > 1e-8 * w.norm_sq().sqrt().max(1.0) {
            None
        } else {
            Some(w)
        }
    } else {
        None
    };

    Ok(MinimalityReport {
        state_dim: col.state_dim,
        cc_dim: cc.dim(),
        scc_dim: scc.dim(),
        sscc_dim: sscc.dim(),
        closely_connected: cc.dim() == col.state_dim,
        strictly_closely_connected: scc.dim() == col.state_dim,
        shifted_strictly_closely_connected: sscc.dim() == col.state_dim,
        scc_defect: scc.complement(),
        sscc_defect: sscc.complement(),
        scattering_witness,
        scattering_defect_dim,
        cert_window: cert_window.clone(),
        cert_depth,
    })
}

/// Orthonormal basis of the space of window-supported state fields
/// annihilated by both scattering criteria up to `depth` (columns are
/// stacked coefficient vectors in the lexicographic window order).
pub fn scattering_witness_space(
    col: &GRColligation,
    window: &IndexBox,
    depth: usize,
) -> Result<CMat> {
    let rows = witness_constraint_matrix(col, window, depth)?;
    Ok(null_space(&rows, RANK_TOL))
}

/// Residual of the scattering criteria applied to a specific state field.
pub fn witness_residual(
    col: &GRColligation,
    field: &StateFieldPolynomial,
    depth: usize,
) -> Result<f64> {
    if field.d != col.d || field.state_dim != col.state_dim {
        return Err(CoreError::DimensionMismatch {
            expected: col.d,
            got: field.d,
        });
    }
    // Rebuild the constraint matrix on the (bounding box of the) support.
    let support: Vec<&MultiIndex> = field.terms.keys().collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let lo: Vec<i64> = (0..col.d)
        .map(|k| support.iter().map(|n| n.entry(k)).min().unwrap())
        .collect();
    let hi: Vec<i64> = (0..col.d)
        .map(|k| support.iter().map(|n| n.entry(k)).max().unwrap())
        .collect();
    let bbox = IndexBox::new(lo, hi)?;
    let rows = witness_constraint_matrix(col, &bbox, depth)?;
    let mut x = CVec::zeros(bbox.len() * col.state_dim);
    for (i, p) in bbox.iter().enumerate() {
        x.rows_mut(i * col.state_dim, col.state_dim)
            .copy_from(&field.coeff(&p));
    }
    Ok((rows * x).norm())
}

/// Assemble the linear system encoding both scattering criteria over the
/// window, with one unknown state vector per window site.
fn witness_constraint_matrix(
    col: &GRColligation,
    window: &IndexBox,
    depth: usize,
) -> Result<CMat> {
    let d = col.d;
    let s = col.state_dim;
    let sites: Vec<MultiIndex> = window.iter().collect();
    let col_of: BTreeMap<&MultiIndex, usize> =
        sites.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let unknowns = sites.len() * s;

    let mut calc_a = AbelianCalculus::of_a(col);
    let mut calc_astar = AbelianCalculus::of_a_star(col);

    // Forward family: the coefficient of C (Z A)^N x(z) at site q is
    // sum over |m| = N, p with m + p = q of C (A^a)^m x_p. Backward
    // family: the coefficient of B^* Z^{-1} (A^* Z^{-1})^N x(z) at -q is
    // sum over |m| = N, axes j, p with p - m - e_j = -q... of
    // B^* (A^{*a})^m P_j x_p. Rows are grouped by (N, output site);
    // summing over different powers N would weaken the system.
    let mut fwd_rows: BTreeMap<(usize, MultiIndex), CMat> = BTreeMap::new();
    let mut bwd_rows: BTreeMap<(usize, MultiIndex), CMat> = BTreeMap::new();

    for m in IndexBox::nonnegative(d, depth as i64).iter() {
        if m.total() > depth as i64 {
            continue;
        }
        let level = m.total() as usize;
        let cam = &col.c * calc_a.power(&m);
        for p in &sites {
            let q = &m + p;
            let row = fwd_rows
                .entry((level, q))
                .or_insert_with(|| CMat::zeros(col.out_dim, unknowns));
            let j0 = col_of[p] * s;
            let mut view = row.view_mut((0, j0), (col.out_dim, s));
            view += &cam;
        }
        let bsm = &col.b.adjoint() * calc_astar.power(&m);
        for j in 0..d {
            let block = &bsm * &col.projections[j];
            for p in &sites {
                let q = (&(p - &m)).step_down(j);
                let row = bwd_rows
                    .entry((level, q))
                    .or_insert_with(|| CMat::zeros(col.in_dim, unknowns));
                let j0 = col_of[p] * s;
                let mut view = row.view_mut((0, j0), (col.in_dim, s));
                view += &block;
            }
        }
    }
    let blocks: Vec<CMat> = fwd_rows
        .into_values()
        .chain(bwd_rows.into_values())
        .collect();
    Ok(matrix::vcat(&blocks))
}

/// Reinterpret a stacked unknown vector as a state field polynomial.
pub fn state_field_from_vector(
    col: &GRColligation,
    window: &IndexBox,
    x: &CVec,
) -> StateFieldPolynomial {
    let s = col.state_dim;
    let mut terms = BTreeMap::new();
    for (i, p) in window.iter().enumerate() {
        let v: CVec = x.rows(i * s, s).into_owned();
        if v.norm() > 0.0 {
            terms.insert(p, v);
        }
    }
    StateFieldPolynomial {
        d: col.d,
        state_dim: col.state_dim,
        terms,
    }
}

/// Compress a colligation to its closely-connected subspace. Returns the
/// compressed colligation together with the orthonormal basis used, so the
/// compression can be related back to the original state space. The cc
/// subspace is invariant under `A`, `A^*` and every `P_k` and contains
/// `im B` and `im C^*`, so the compression is again a unitary colligation
/// with the same transfer function.
pub fn compress_to_cc(col: &GRColligation) -> Result<(GRColligation, CMat)> {
    let cc = colligation_closure(col, ClosureKind::CloselyConnected);
    let q = cc.basis.clone();
    let a = q.adjoint() * &col.a * &q;
    let b = q.adjoint() * &col.b;
    let c = &col.c * &q;
    let projections: Vec<CMat> = col
        .projections
        .iter()
        .map(|p| q.adjoint() * p * &q)
        .collect();
    let compressed = GRColligation::new(a, b, c, col.dmat.clone(), projections)?
        .validated(1e-8)?;
    Ok((compressed, q))
}

/// Draw a random Givone-Roesser unitary colligation with square
/// input/output (`io_dim`); the connecting matrix is Haar-ish unitary and
/// the projections are a random orthogonal partition of the state space.
pub fn random_colligation<R: Rng>(
    rng: &mut R,
    d: usize,
    state_dim: usize,
    io_dim: usize,
) -> GRColligation {
    let n = state_dim + io_dim;
    let u = random_unitary(rng, n);
    let a = u.view((0, 0), (state_dim, state_dim)).into_owned();
    let b = u.view((0, state_dim), (state_dim, io_dim)).into_owned();
    let c = u.view((state_dim, 0), (io_dim, state_dim)).into_owned();
    let dmat = u.view((state_dim, state_dim), (io_dim, io_dim)).into_owned();
    let projections = random_projection_partition(rng, state_dim, d);
    GRColligation::new(a, b, c, dmat, projections).expect("shapes are consistent")
}

/// Draw random colligations until one is strictly closely connected (and
/// shifted-strictly closely connected); random draws almost surely are.
pub fn random_scc_colligation<R: Rng>(
    rng: &mut R,
    d: usize,
    state_dim: usize,
    io_dim: usize,
) -> GRColligation {
    for _ in 0..64 {
        let col = random_colligation(rng, d, state_dim, io_dim);
        let scc = colligation_closure(&col, ClosureKind::StrictlyCloselyConnected);
        let sscc = colligation_closure(&col, ClosureKind::ShiftedStrictlyCloselyConnected);
        if scc.dim() == state_dim && sscc.dim() == state_dim {
            return col;
        }
    }
    panic!("no strictly closely connected colligation found in 64 draws");
}
