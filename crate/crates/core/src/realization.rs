//! Realization of a transfer function from augmented Agler decomposition
//! data.  The lurking-isometry construction pairs coefficient columns of
//! the factor kernels with their shifted counterparts; when the data is
//! strictly closely connected the pairing determines a unique unitary
//! colligation.  In the degenerate case the defect channels are the
//! overlapping spaces of the factor family, and every compatible
//! realization arises from a structured unitary extension `U_0` closed by
//! a Redheffer feedback loop against a load colligation.

use std::collections::BTreeSet;

use crate::colligation::{transfer_coefficients, GRColligation, VALIDATION_TOL};
use crate::error::{CoreError, Result};
use crate::kernels::{kernel_from_factor, KernelFactor, RANK_TOL};
use crate::lattice::{IndexBox, MultiIndex};
use crate::laurent::LaurentMatrixSeries;
use crate::matrix::{eye, hcat, null_space, pinv, polar_unitary, rank, vcat, zeros, CMat};

/// Paired column data of the lurking isometry: for every lattice site `m`
/// in the generated window, the domain column
/// `[H_{1,m}^*; ...; H_{d,m}^*; [S_m^*, d_{m,0} I]]` and the range column
/// `[H_{1,m-e_1}^*; ...; H_{d,m-e_d}^*; [d_{m,0} I, S_{-m}]]`, both acting
/// on `E_* (+) E`.  Any colligation realizing the data satisfies
/// `U domain = range` columnwise.
#[derive(Clone, Debug)]
pub struct LurkingData {
    /// Lattice dimension.
    pub d: usize,
    /// Output dimension.
    pub out: usize,
    /// Input dimension.
    pub inn: usize,
    /// Inner dimension of each factor; the state space is their direct sum.
    pub inner_dims: Vec<usize>,
    /// Stacked domain columns, `(state + inn) x (sites * (out + inn))`.
    pub domain: CMat,
    /// Stacked range columns, `(state + out) x (sites * (out + inn))`.
    pub range: CMat,
    /// Lattice sites backing the columns, in order.
    pub sites: Vec<MultiIndex>,
}

impl LurkingData {
    /// Total state dimension `sum_k r_k`.
    pub fn state_dim(&self) -> usize {
        self.inner_dims.iter().sum()
    }

    /// Deviation of the two column Gram matrices; small iff the factor
    /// data actually satisfies the kernel Cuntz-defect identity.
    pub fn gram_defect(&self) -> f64 {
        (self.domain.adjoint() * &self.domain - self.range.adjoint() * &self.range).norm()
    }
}

/// Assemble the lurking-isometry columns from augmented factors and the
/// transfer coefficients.  Sites cover every index at which the truncated
/// factor data is exact: nonnegative indices up to the factor degree and
/// the negative factor-support sites one shift inside the truncation.
pub fn build_lurking_data(
    factors: &[KernelFactor],
    transfer: &LaurentMatrixSeries,
    out: usize,
    inn: usize,
) -> Result<LurkingData> {
    if factors.is_empty() {
        return Err(CoreError::InvalidArgument(
            "lurking data needs at least one factor".into(),
        ));
    }
    let d = factors[0].dim();
    if factors.len() != d {
        return Err(CoreError::InvalidArgument(format!(
            "expected one factor per axis (d = {d}), got {}",
            factors.len()
        )));
    }
    for f in factors {
        if f.rows() != out + inn {
            return Err(CoreError::ShapeMismatch {
                expected: (out + inn, f.inner_dim()),
                got: (f.rows(), f.inner_dim()),
            });
        }
    }
    let inner_dims: Vec<usize> = factors.iter().map(|f| f.inner_dim()).collect();

    let degree = factors
        .iter()
        .flat_map(|f| f.support())
        .filter(|n| n.is_nonnegative())
        .map(|n| n.total())
        .max()
        .unwrap_or(0);
    let mut sites: BTreeSet<MultiIndex> = IndexBox::nonnegative(d, degree)
        .iter()
        .filter(|n| n.total() <= degree)
        .collect();
    for mu in IndexBox::nonnegative(d, (degree - 1).max(0)).iter() {
        if mu.total() > degree - 1 {
            continue;
        }
        for k in 0..d {
            sites.insert(-&mu.step_up(k));
        }
    }
    let sites: Vec<MultiIndex> = sites.into_iter().collect();

    let mut dom_cols = Vec::with_capacity(sites.len());
    let mut ran_cols = Vec::with_capacity(sites.len());
    let zero = MultiIndex::zero(d);
    for m in &sites {
        let mut dom_blocks: Vec<CMat> =
            factors.iter().map(|f| f.coeff(m).adjoint()).collect();
        let delta_in = if *m == zero { eye(inn) } else { zeros(inn, inn) };
        dom_blocks.push(hcat(&[transfer.coeff(m).adjoint(), delta_in]));
        dom_cols.push(vcat(&dom_blocks));

        let mut ran_blocks: Vec<CMat> = factors
            .iter()
            .enumerate()
            .map(|(k, f)| f.coeff(&m.step_down(k)).adjoint())
            .collect();
        let delta_out = if *m == zero { eye(out) } else { zeros(out, out) };
        ran_blocks.push(hcat(&[delta_out, transfer.coeff(&-m)]));
        ran_cols.push(vcat(&ran_blocks));
    }

    Ok(LurkingData {
        d,
        out,
        inn,
        inner_dims,
        domain: hcat(&dom_cols),
        range: hcat(&ran_cols),
        sites,
    })
}

/// Coordinate projections of the direct sum `C^{r_1} (+) ... (+) C^{r_d}`.
pub fn coordinate_projections(inner_dims: &[usize]) -> Vec<CMat> {
    let s: usize = inner_dims.iter().sum();
    let mut projections = Vec::with_capacity(inner_dims.len());
    let mut offset = 0;
    for &r in inner_dims {
        let mut p = zeros(s, s);
        p.view_mut((offset, offset), (r, r)).copy_from(&eye(r));
        projections.push(p);
        offset += r;
    }
    projections
}

/// Solve the lurking-isometry equations for the unique unitary colligation
/// when the decomposition data is strictly closely connected (domain
/// columns span) and shifted strictly closely connected (range columns
/// span); otherwise report the two rank defects.
pub fn realize_scc(
    factors: &[KernelFactor],
    transfer: &LaurentMatrixSeries,
    out: usize,
    inn: usize,
) -> Result<GRColligation> {
    let data = build_lurking_data(factors, transfer, out, inn)?;
    let s = data.state_dim();
    let domain_defect = s + inn - rank(&data.domain, RANK_TOL);
    let range_defect = s + out - rank(&data.range, RANK_TOL);
    if domain_defect > 0 || range_defect > 0 {
        return Err(CoreError::NotStrictlyCloselyConnected {
            domain_defect,
            range_defect,
        });
    }
    let u = polar_unitary(&(&data.range * pinv(&data.domain, RANK_TOL)));
    let a = u.view((0, 0), (s, s)).into_owned();
    let b = u.view((0, s), (s, inn)).into_owned();
    let c = u.view((s, 0), (out, s)).into_owned();
    let dmat = u.view((s, s), (out, inn)).into_owned();
    GRColligation::new(a, b, c, dmat, coordinate_projections(&data.inner_dims))?
        .validated(VALIDATION_TOL)
}

/// The structured unitary extension of the lurking isometry.  It maps
/// `H (+) E (+) L'` to `H (+) E_* (+) L` where `H = (+)_k C^{r_k}`; it
/// acts as the lurking isometry on the domain columns, swaps the two
/// defect channels, and has vanishing corner `L' -> L`.  The defect
/// channels coincide with the overlapping spaces of the factor family
/// (unshifted for `L`, shifted for `L'`).
#[derive(Clone, Debug)]
pub struct U0System {
    /// Lattice dimension.
    pub d: usize,
    /// Output dimension of the target transfer function.
    pub out: usize,
    /// Input dimension of the target transfer function.
    pub inn: usize,
    /// Inner dimension of each factor.
    pub inner_dims: Vec<usize>,
    /// The extension matrix, `(s + out + l) x (s + inn + l')`.
    pub u0: CMat,
    /// Orthonormal basis of the `L` channel inside `H (+) E`.
    pub defect_domain: CMat,
    /// Orthonormal basis of the `L'` channel inside `H (+) E_*`.
    pub defect_range: CMat,
}

impl U0System {
    /// Total state dimension.
    pub fn state_dim(&self) -> usize {
        self.inner_dims.iter().sum()
    }

    /// Dimension of the input defect channel `L`.
    pub fn defect_in(&self) -> usize {
        self.defect_domain.ncols()
    }

    /// Dimension of the output defect channel `L'`.
    pub fn defect_out(&self) -> usize {
        self.defect_range.ncols()
    }

    /// Block `(i, j)` of `U_0` for the row partition `[s, out, l]` and
    /// column partition `[s, inn, l']`.
    pub fn block(&self, i: usize, j: usize) -> CMat {
        let s = self.state_dim();
        let rows = [s, self.out, self.defect_in()];
        let cols = [s, self.inn, self.defect_out()];
        let r0: usize = rows[..i].iter().sum();
        let c0: usize = cols[..j].iter().sum();
        self.u0.view((r0, c0), (rows[i], cols[j])).into_owned()
    }
}

/// Build the structured extension `U_0` from augmented factors and
/// transfer coefficients.
pub fn build_u0(
    factors: &[KernelFactor],
    transfer: &LaurentMatrixSeries,
    out: usize,
    inn: usize,
) -> Result<U0System> {
    let data = build_lurking_data(factors, transfer, out, inn)?;
    let s = data.state_dim();

    // The lurking isometry as a partial map: coisometry onto the range
    // span with initial space the domain span.
    let partial = &data.range * pinv(&data.domain, RANK_TOL);
    // Defect channels: orthogonal complements of the two column spans.
    let defect_domain = null_space(&data.domain.adjoint(), RANK_TOL);
    let defect_range = null_space(&data.range.adjoint(), RANK_TOL);
    let l = defect_domain.ncols();
    let lp = defect_range.ncols();

    let mut u0 = zeros(s + out + l, s + inn + lp);
    u0.view_mut((0, 0), (s + out, s + inn)).copy_from(&partial);
    u0.view_mut((0, s + inn), (s + out, lp))
        .copy_from(&defect_range);
    u0.view_mut((s + out, 0), (l, s + inn))
        .copy_from(&defect_domain.adjoint());
    Ok(U0System {
        d: data.d,
        out,
        inn,
        inner_dims: data.inner_dims,
        u0,
        defect_domain,
        defect_range,
    })
}

/// Close the feedback loop of `U_0` against a load colligation with input
/// space `L` and output space `L'`.  The result is the GR-unitary
/// colligation
/// `[[A11, A12, B1], [A21, A22, B2], [C1, C2, D]]` on state space
/// `H (+) H~` whose projections are the coordinate projections joined with
/// the load projections; every realization compatible with the factor
/// data arises this way.
pub fn redheffer_close(u0: &U0System, load: &GRColligation) -> Result<GRColligation> {
    if load.dim() != u0.d {
        return Err(CoreError::DimensionMismatch {
            expected: u0.d,
            got: load.dim(),
        });
    }
    if load.in_dim() != u0.defect_in() || load.out_dim() != u0.defect_out() {
        return Err(CoreError::ShapeMismatch {
            expected: (u0.defect_out(), u0.defect_in()),
            got: (load.out_dim(), load.in_dim()),
        });
    }
    let (u011, u012, u013) = (u0.block(0, 0), u0.block(0, 1), u0.block(0, 2));
    let (u021, u022, u023) = (u0.block(1, 0), u0.block(1, 1), u0.block(1, 2));
    let (u031, u032) = (u0.block(2, 0), u0.block(2, 1));
    let (lt11, lt12, lt21, lt22) = (load.a(), load.b(), load.c(), load.d_block());

    // The loop is triangular because the corner L' -> L of U_0 vanishes.
    let a11 = &u011 + &u013 * lt22 * &u031;
    let a12 = &u013 * lt21;
    let b1 = &u012 + &u013 * lt22 * &u032;
    let a21 = lt12 * &u031;
    let a22 = lt11.clone();
    let b2 = lt12 * &u032;
    let c1 = &u021 + &u023 * lt22 * &u031;
    let c2 = &u023 * lt21;
    let dmat = &u022 + &u023 * lt22 * &u032;

    let s = u0.state_dim();
    let st = load.state_dim();
    let mut a = zeros(s + st, s + st);
    a.view_mut((0, 0), (s, s)).copy_from(&a11);
    a.view_mut((0, s), (s, st)).copy_from(&a12);
    a.view_mut((s, 0), (st, s)).copy_from(&a21);
    a.view_mut((s, s), (st, st)).copy_from(&a22);
    let b = vcat(&[b1, b2]);
    let c = hcat(&[c1, c2]);

    let base = coordinate_projections(&u0.inner_dims);
    let mut projections = Vec::with_capacity(u0.d);
    for k in 0..u0.d {
        let mut p = zeros(s + st, s + st);
        p.view_mut((0, 0), (s, s)).copy_from(&base[k]);
        p.view_mut((s, s), (st, st)).copy_from(load.projection(k));
        projections.push(p);
    }
    GRColligation::new(a, b, c, dmat, projections)?.validated(VALIDATION_TOL)
}

/// Residuals measuring whether a colligation is compatible with given
/// decomposition data: the transfer coefficients must agree and the
/// factor kernels `K_k = H_k H_k^*` must coincide on the window.
#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    /// Max deviation of the transfer coefficients up to the data degree.
    pub transfer_residual: f64,
    /// Max deviation of each factor kernel over the window.
    pub kernel_residuals: Vec<f64>,
}

impl CompatibilityReport {
    /// Largest residual of the report.
    pub fn max_residual(&self) -> f64 {
        self.kernel_residuals
            .iter()
            .fold(self.transfer_residual, |acc, r| acc.max(*r))
    }
}

/// Compare the transfer function and Agler-factor kernels of `col` with
/// externally supplied decomposition data on `window`.
pub fn verify_compatibility(
    col: &GRColligation,
    factors: &[KernelFactor],
    transfer: &LaurentMatrixSeries,
    window: &IndexBox,
) -> Result<CompatibilityReport> {
    let degree = transfer.degree();
    let own_transfer = transfer_coefficients(col, degree);
    let transfer_residual = own_transfer.max_deviation(transfer)?;

    let own_degree = factors
        .iter()
        .flat_map(|f| f.support())
        .map(|n| n.abs_total())
        .max()
        .unwrap_or(0);
    let own_factors = crate::agler::agler_factors(col, own_degree);
    let mut kernel_residuals = Vec::with_capacity(factors.len());
    for (own, given) in own_factors.iter().zip(factors) {
        let res = kernel_from_factor(own)
            .max_deviation_on(&kernel_from_factor(given), window)?;
        kernel_residuals.push(res);
    }
    Ok(CompatibilityReport {
        transfer_residual,
        kernel_residuals,
    })
}

/// Outcome of the Gram-matching test for unitary equivalence of two
/// colligations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    /// An explicit projection-intertwining unitary was found.
    Equivalent,
    /// The colligations are provably not unitarily equivalent.
    NotEquivalent,
    /// The generated families do not span (colligation not closely
    /// connected), so the test is only conclusive on the generated part.
    Inconclusive,
}

/// Test unitary equivalence of colligations (same `A, B, C, D` up to a
/// unitary state-space change commuting with all projections).  A paired
/// breadth-first Krylov sweep grows the family generated from the columns
/// of `B` and `C^*` by the generators `{A, A^*, P_1, ..., P_d}`, applying
/// the identical recipes on both sides; any intertwiner must map the one
/// family to the other, so it can be solved for on the generated span and
/// verified explicitly.  When the family fails to span (the colligation is
/// not closely connected) the test is inconclusive.
pub fn unitary_equivalence_check(
    col_a: &GRColligation,
    col_b: &GRColligation,
    max_rounds: usize,
    tol: f64,
) -> Result<EquivalenceVerdict> {
    if col_a.dim() != col_b.dim()
        || col_a.in_dim() != col_b.in_dim()
        || col_a.out_dim() != col_b.out_dim()
    {
        return Err(CoreError::InvalidArgument(
            "colligations must share lattice dimension and I/O spaces".into(),
        ));
    }
    let s = col_a.state_dim();
    if s != col_b.state_dim() {
        return Ok(EquivalenceVerdict::NotEquivalent);
    }
    if (col_a.d_block() - col_b.d_block()).norm() > tol {
        return Ok(EquivalenceVerdict::NotEquivalent);
    }

    let (family_a, family_b) = paired_families(col_a, col_b, max_rounds);
    let gram_a = family_a.adjoint() * &family_a;
    let gram_b = family_b.adjoint() * &family_b;
    if (&gram_a - &gram_b).norm() > tol * (1.0 + gram_a.norm()) {
        return Ok(EquivalenceVerdict::NotEquivalent);
    }
    if rank(&family_a, RANK_TOL) < s {
        return Ok(EquivalenceVerdict::Inconclusive);
    }
    // Gram equality on a spanning family determines the intertwiner.
    let w = polar_unitary(&(&family_b * pinv(&family_a, RANK_TOL)));
    let mut residual: f64 = (&w * &family_a - &family_b).norm();
    residual = residual.max((&w * col_a.a() - col_b.a() * &w).norm());
    residual = residual.max((&w * col_a.b() - col_b.b()).norm());
    residual = residual.max((col_b.c() * &w - col_a.c()).norm());
    for k in 0..col_a.dim() {
        residual = residual.max((&w * col_a.projection(k) - col_b.projection(k) * &w).norm());
    }
    if residual < tol * (1.0 + family_a.norm()) {
        Ok(EquivalenceVerdict::Equivalent)
    } else {
        Ok(EquivalenceVerdict::NotEquivalent)
    }
}

/// Grow the paired generated families.  Vectors are kept only while they
/// enlarge the side-`a` span, so the family count stays bounded by the
/// state dimension times the seed width, and both sides always record the
/// result of the same word applied to the same seed column.
fn paired_families(col_a: &GRColligation, col_b: &GRColligation, max_rounds: usize) -> (CMat, CMat) {
    let gens = |col: &GRColligation| -> Vec<CMat> {
        let mut g = vec![col.a().clone(), col.a().adjoint()];
        g.extend(col.projections().iter().cloned());
        g
    };
    let gens_a = gens(col_a);
    let gens_b = gens(col_b);
    let s = col_a.state_dim();
    let seeds_a = hcat(&[col_a.b().clone(), col_a.c().adjoint()]);
    let seeds_b = hcat(&[col_b.b().clone(), col_b.c().adjoint()]);

    let mut vecs_a: Vec<CMat> = (0..seeds_a.ncols())
        .map(|j| seeds_a.view((0, j), (s, 1)).into_owned())
        .collect();
    let mut vecs_b: Vec<CMat> = (0..seeds_b.ncols())
        .map(|j| seeds_b.view((0, j), (s, 1)).into_owned())
        .collect();
    let mut frontier: Vec<usize> = (0..vecs_a.len()).collect();
    for _ in 0..max_rounds {
        let current = hcat(&vecs_a);
        let current_rank = rank(&current, RANK_TOL);
        let mut next_frontier = Vec::new();
        for &i in &frontier {
            for (ga, gb) in gens_a.iter().zip(&gens_b) {
                let cand_a = ga * &vecs_a[i];
                let mut trial = vecs_a.clone();
                trial.push(cand_a.clone());
                if rank(&hcat(&trial), RANK_TOL) > rank(&hcat(&vecs_a), RANK_TOL) {
                    next_frontier.push(vecs_a.len());
                    vecs_a.push(cand_a);
                    vecs_b.push(gb * &vecs_b[i]);
                }
            }
        }
        if next_frontier.is_empty() || rank(&hcat(&vecs_a), RANK_TOL) >= s || current_rank >= s {
            break;
        }
        frontier = next_frontier;
    }
    (hcat(&vecs_a), hcat(&vecs_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agler::agler_factors;
    use crate::colligation::{random_colligation, random_scc_colligation};
    use crate::samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn decomposition_data(
        col: &GRColligation,
        degree: i64,
    ) -> (Vec<KernelFactor>, LaurentMatrixSeries) {
        (
            agler_factors(col, degree),
            transfer_coefficients(col, degree),
        )
    }

    #[test]
    fn lurking_grams_match_for_samples() {
        for col in [
            samples::shift_realization_1d(),
            samples::example_one(),
            samples::example_two(),
        ] {
            let (factors, transfer) = decomposition_data(&col, col.state_dim() as i64 + 1);
            let data =
                build_lurking_data(&factors, &transfer, col.out_dim(), col.in_dim()).unwrap();
            assert!(data.gram_defect() < 1e-9, "defect {}", data.gram_defect());
        }
    }

    #[test]
    fn realize_scc_round_trips_up_to_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut cols = vec![samples::shift_realization_1d(), samples::example_two()];
        cols.push(random_scc_colligation(&mut rng, 2, 4, 2));
        for col in cols {
            let (factors, transfer) = decomposition_data(&col, col.state_dim() as i64 + 1);
            let realized = realize_scc(&factors, &transfer, col.out_dim(), col.in_dim()).unwrap();
            let verdict =
                unitary_equivalence_check(&col, &realized, col.state_dim() + 1, 1e-8).unwrap();
            assert_eq!(verdict, EquivalenceVerdict::Equivalent);
        }
    }

    #[test]
    fn degenerate_sample_is_rejected_with_defects() {
        // The four-state sample is closely connected but not strictly so;
        // the lurking system has a one-dimensional defect on both sides.
        let col = samples::example_one();
        let (factors, transfer) = decomposition_data(&col, 6);
        match realize_scc(&factors, &transfer, 1, 1) {
            Err(CoreError::NotStrictlyCloselyConnected {
                domain_defect,
                range_defect,
            }) => {
                assert_eq!((domain_defect, range_defect), (1, 1));
            }
            other => panic!("expected rank defect, got {other:?}"),
        }
    }

    #[test]
    fn defect_channels_are_overlapping_spaces() {
        let col = samples::example_one();
        let (factors, transfer) = decomposition_data(&col, 6);
        let u0 = build_u0(&factors, &transfer, 1, 1).unwrap();
        assert_eq!(u0.defect_in(), 1);
        assert_eq!(u0.defect_out(), 1);
        assert!(crate::matrix::unitarity_defect(&u0.u0) < 1e-9);

        // The channels live inside the state summand and match the
        // overlap bases of the factor family.
        let s = u0.state_dim();
        let unshifted = crate::kernels::overlap_basis(&factors, false).unwrap();
        let shifted = crate::kernels::overlap_basis(&factors, true).unwrap();
        assert_eq!(unshifted.dim(), 1);
        assert_eq!(shifted.dim(), 1);
        let dom_state = u0.defect_domain.view((0, 0), (s, 1)).into_owned();
        let dom_io = u0.defect_domain.view((s, 0), (1, 1)).into_owned();
        assert!(dom_io.norm() < 1e-9);
        let overlap_angle = (unshifted.basis.adjoint() * &dom_state).norm();
        assert!((overlap_angle - 1.0).abs() < 1e-9);
        let ran_state = u0.defect_range.view((0, 0), (s, 1)).into_owned();
        let angle = (shifted.basis.adjoint() * &ran_state).norm();
        assert!((angle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn redheffer_closure_is_compatible_with_the_data() {
        let col = samples::example_one();
        let (factors, transfer) = decomposition_data(&col, 6);
        let u0 = build_u0(&factors, &transfer, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let load = random_colligation(&mut rng, 2, 2, 1);
        let closed = redheffer_close(&u0, &load).unwrap();
        assert_eq!(closed.state_dim(), u0.state_dim() + 2);
        let window = IndexBox::centered(2, 2);
        let report = verify_compatibility(&closed, &factors, &transfer, &window).unwrap();
        assert!(
            report.max_residual() < 1e-8,
            "residuals {:?}",
            report.kernel_residuals
        );
    }

    #[test]
    fn redheffer_closure_matches_feedback_solve() {
        let col = samples::example_one();
        let (factors, transfer) = decomposition_data(&col, 6);
        let u0 = build_u0(&factors, &transfer, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let load = random_colligation(&mut rng, 2, 3, 1);
        let closed = redheffer_close(&u0, &load).unwrap();

        // Independent oracle: solve the (triangular) feedback system for
        // each standard basis input.
        let s = u0.state_dim();
        let st = load.state_dim();
        let n_in = s + st + u0.inn;
        let mut oracle = zeros(s + st + u0.out, n_in);
        for j in 0..n_in {
            let mut x = zeros(n_in, 1);
            x[(j, 0)] = crate::matrix::c(1.0);
            let h = x.view((0, 0), (s, 1)).into_owned();
            let ht = x.view((s, 0), (st, 1)).into_owned();
            let e = x.view((s + st, 0), (u0.inn, 1)).into_owned();
            let ell = u0.block(2, 0) * &h + u0.block(2, 1) * &e;
            let ellp = load.c() * &ht + load.d_block() * &ell;
            let hp = u0.block(0, 0) * &h + u0.block(0, 1) * &e + u0.block(0, 2) * &ellp;
            let es = u0.block(1, 0) * &h + u0.block(1, 1) * &e + u0.block(1, 2) * &ellp;
            let htp = load.a() * &ht + load.b() * &ell;
            oracle.view_mut((0, j), (s, 1)).copy_from(&hp);
            oracle.view_mut((s, j), (st, 1)).copy_from(&htp);
            oracle.view_mut((s + st, j), (u0.out, 1)).copy_from(&es);
        }
        assert!((closed.connecting_matrix() - oracle).norm() < 1e-10);
    }

    #[test]
    fn equivalence_check_separates_and_identifies() {
        let col = samples::example_one();
        // Conjugate by a projection-commuting unitary: block unitaries on
        // each coordinate summand.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut w = zeros(4, 4);
        for k in 0..2 {
            let q = col.projection_basis(k);
            let u = crate::matrix::random_unitary(&mut rng, q.ncols());
            w += &q * u * q.adjoint();
        }
        let twisted = GRColligation::new(
            w.adjoint() * col.a() * &w,
            w.adjoint() * col.b(),
            col.c() * &w,
            col.d_block().clone(),
            (0..2)
                .map(|k| w.adjoint() * col.projection(k) * &w)
                .collect(),
        )
        .unwrap();
        assert_eq!(
            unitary_equivalence_check(&col, &twisted, 5, 1e-8).unwrap(),
            EquivalenceVerdict::Equivalent
        );

        // Sign-flipped transfer function is not equivalent.
        let shift = samples::shift_realization_1d();
        let flipped = GRColligation::new(
            shift.a().clone(),
            shift.b().clone(),
            -shift.c(),
            shift.d_block().clone(),
            shift.projections().to_vec(),
        )
        .unwrap();
        assert_eq!(
            unitary_equivalence_check(&shift, &flipped, 3, 1e-8).unwrap(),
            EquivalenceVerdict::NotEquivalent
        );
    }
}
