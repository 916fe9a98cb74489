//! Agler-type decompositions for transfer functions of Givone-Roesser
//! unitary colligations: the augmented kernel identity and its Kolmogorov
//! factors, the de Branges-Rovnyak model kernels attached to a
//! shift-invariant sublattice, the scattering-subspace kernel
//! decomposition, and the asymptotic (limit) kernels in each lattice
//! direction together with their closed forms and a `d = 1` Toeplitz
//! oracle.

use num_complex::Complex64;

use crate::colligation::{AbelianCalculus, GRColligation};
use crate::error::{CoreError, Result};
use std::collections::BTreeMap;

use crate::kernels::{FormalKernel, KernelFactor};
use crate::lattice::{IndexBox, MultiIndex, Sublattice};
use crate::laurent::LaurentMatrixSeries;
use crate::matrix::{block2x2, eye, vcat, zeros, CMat};

/// Tolerance used by the identity checks in this module.
pub const IDENTITY_TOL: f64 = 1e-10;

/// One Kolmogorov factor per lattice direction for the augmented kernel
/// identity of a colligation.  Factor `k` has `out + in` rows and
/// `rank P_k` inner columns; its coefficient at `n >= 0` has top block
/// `C (A^a)^n Q_k` and its coefficient at `-(m + e_k)` (for `m >= 0`)
/// has bottom block `B^* (A^{*a})^m Q_k`, where `Q_k` is an orthonormal
/// basis of `im P_k`.  Coefficients are generated up to total degree
/// `degree` in `n` and `m`.
pub fn agler_factors(col: &GRColligation, degree: i64) -> Vec<KernelFactor> {
    let d = col.dim();
    let out = col.out_dim();
    let inn = col.in_dim();
    let mut fwd = AbelianCalculus::of_a(col);
    let mut bwd = AbelianCalculus::of_a_star(col);
    let b_adj = col.b().adjoint();

    let mut factors = Vec::with_capacity(d);
    for k in 0..d {
        let q_k = col.projection_basis(k);
        let r_k = q_k.ncols();
        let mut factor = KernelFactor::zero(d, out + inn, r_k);
        for n in nonnegative_indices(d, degree) {
            let top = col.c() * fwd.power(&n) * &q_k;
            let mut coeff = zeros(out + inn, r_k);
            coeff.view_mut((0, 0), (out, r_k)).copy_from(&top);
            factor.set(n, coeff);
        }
        for m in nonnegative_indices(d, degree) {
            let bottom = &b_adj * bwd.power(&m) * &q_k;
            let mut coeff = zeros(out + inn, r_k);
            coeff.view_mut((out, 0), (inn, r_k)).copy_from(&bottom);
            factor.set(-&m.step_up(k), coeff);
        }
        factors.push(factor);
    }
    factors
}

/// The augmented kernel
/// `[[I - S(z) S(w)^*, S(w) - S(z)], [S(z)^* - S(w)^*, S(z)^* S(w) - I]]`
/// restricted to coefficient pairs `(n, m)` with both indices in `window`.
pub fn augmented_kernel(
    transfer: &LaurentMatrixSeries,
    out: usize,
    inn: usize,
    window: &IndexBox,
) -> FormalKernel {
    let d = transfer.dim();
    let zero_idx = MultiIndex::zero(d);
    let mut kernel = FormalKernel::zero(d, out + inn, out + inn);
    for n in window.iter() {
        for m in window.iter() {
            let s_n = transfer.coeff(&n);
            let s_m = transfer.coeff(&m);
            let s_neg_n = transfer.coeff(&-&n);
            let s_neg_m = transfer.coeff(&-&m);
            let dn = n == zero_idx;
            let dm = m == zero_idx;

            let mut b11 = -(&s_n * s_m.adjoint());
            if dn && dm {
                b11 += eye(out);
            }
            let mut b12 = zeros(out, inn);
            if dn {
                b12 += &s_neg_m;
            }
            if dm {
                b12 -= &s_n;
            }
            let mut b21 = zeros(inn, out);
            if dm {
                b21 += s_neg_n.adjoint();
            }
            if dn {
                b21 -= s_m.adjoint();
            }
            let mut b22 = s_neg_n.adjoint() * &s_neg_m;
            if dn && dm {
                b22 -= eye(inn);
            }
            kernel.set(n.clone(), m, block2x2(&b11, &b12, &b21, &b22));
        }
    }
    kernel
}

/// Maximum residual over `window x window` of the augmented decomposition
/// `[[I - S S^*, S(w) - S(z)], [S^* - S(w)^*, S^* S(w) - I]](n, m)
///  = sum_k [K_k(n, m) - K_k(n - e_k, m - e_k)]`
/// where `K_k` is the kernel of the `k`-th Agler factor.
pub fn augmented_decomposition_residual(col: &GRColligation, window: &IndexBox) -> Result<f64> {
    let degree = window.max_abs_total() + 1;
    let transfer = crate::colligation::transfer_coefficients(col, degree);
    let target = augmented_kernel(&transfer, col.out_dim(), col.in_dim(), window);
    let factors = agler_factors(col, degree);

    let mut worst = 0.0f64;
    for n in window.iter() {
        for m in window.iter() {
            let mut rhs = zeros(col.out_dim() + col.in_dim(), col.out_dim() + col.in_dim());
            for (k, factor) in factors.iter().enumerate() {
                rhs += factor.coeff(&n) * factor.coeff(&m).adjoint();
                rhs -= factor.coeff(&n.step_down(k)) * factor.coeff(&m.step_down(k)).adjoint();
            }
            let res = (target.coeff(&n, &m) - rhs).norm();
            worst = worst.max(res);
        }
    }
    Ok(worst)
}

/// Maximum residual over `window x window` of the kernel
/// Cuntz-defect-positivity identity
/// `sum_k K_k + K_F = sum_k z_k K_k w_k^{-1} + K_F*`.
pub fn cdp_residual(col: &GRColligation, window: &IndexBox) -> Result<f64> {
    let degree = window.max_abs_total() + 1;
    let transfer = crate::colligation::transfer_coefficients(col, degree);
    let factors = agler_factors(col, degree);
    let out = col.out_dim();
    let inn = col.in_dim();

    let mut worst = 0.0f64;
    for n in window.iter() {
        for m in window.iter() {
            let mut lhs = future_column(&transfer, inn, &n) * future_column(&transfer, inn, &m).adjoint();
            let mut rhs = past_column(&transfer, out, &n) * past_column(&transfer, out, &m).adjoint();
            for (k, factor) in factors.iter().enumerate() {
                lhs += factor.coeff(&n) * factor.coeff(&m).adjoint();
                rhs += factor.coeff(&n.step_down(k)) * factor.coeff(&m.step_down(k)).adjoint();
            }
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// The six de Branges-Rovnyak model kernels of a colligation, restricted
/// to coefficient pairs in `window x window`.  All blocks are
/// `(out + in) x (out + in)`.
#[derive(Clone, Debug)]
pub struct DbrKernels {
    /// Ambient kernel `k_Sz(z, w) [[I, S(z)], [S(z)^*, I]]`.
    pub ambient: FormalKernel,
    /// Future kernel `[S(z); I] [S(w)^*, I]`.
    pub future: FormalKernel,
    /// Past kernel `[I; S(z)^*] [I, S(w)]`.
    pub past: FormalKernel,
    /// Smeared future kernel `sum_{p in Omega} z^p K_F w^{-p}`.
    pub future_smeared: FormalKernel,
    /// Smeared past kernel `sum_{p not in Omega} z^p K_F* w^{-p}`.
    pub past_smeared: FormalKernel,
    /// Scattering-subspace kernel `ambient - future_smeared - past_smeared`.
    pub scattering: FormalKernel,
}

/// Builds the de Branges-Rovnyak kernels for the sublattice `omega`.  The
/// ambient kernel reads transfer coefficients at index differences, so the
/// transfer is computed to twice the window radius; with that cutoff every
/// per-coefficient sum is exact on the window for an admissible `omega`
/// (in particular the balanced half-space).
pub fn dbr_kernels(col: &GRColligation, omega: Sublattice, window: &IndexBox) -> Result<DbrKernels> {
    let d = col.dim();
    let out = col.out_dim();
    let inn = col.in_dim();
    let degree = 2 * window.max_abs_total() + 1;
    let transfer = crate::colligation::transfer_coefficients(col, degree);

    let mut ambient = FormalKernel::zero(d, out + inn, out + inn);
    let mut future = FormalKernel::zero(d, out + inn, out + inn);
    let mut past = FormalKernel::zero(d, out + inn, out + inn);
    let mut future_smeared = FormalKernel::zero(d, out + inn, out + inn);
    let mut past_smeared = FormalKernel::zero(d, out + inn, out + inn);

    // Precompute the nonzero column symbols; the smearing sums then run
    // over these supports instead of over boxes of translation sites.
    let zero = MultiIndex::zero(d);
    let mut colf: BTreeMap<MultiIndex, CMat> = BTreeMap::new();
    let mut colv: BTreeMap<MultiIndex, CMat> = BTreeMap::new();
    for a in transfer.support().cloned().chain([zero.clone()]) {
        colf.insert(a.clone(), future_column(&transfer, inn, &a));
        colv.insert(-&a, past_column(&transfer, out, &-&a));
    }

    for n in window.iter() {
        for m in window.iter() {
            let mut amb = block2x2(
                &zeros(out, out),
                &transfer.coeff(&(&n - &m)),
                &transfer.coeff(&(&m - &n)).adjoint(),
                &zeros(inn, inn),
            );
            if n == m {
                amb += eye(out + inn);
            }
            ambient.set(n.clone(), m.clone(), amb);

            future.set(
                n.clone(),
                m.clone(),
                future_column(&transfer, inn, &n) * future_column(&transfer, inn, &m).adjoint(),
            );
            past.set(
                n.clone(),
                m.clone(),
                past_column(&transfer, out, &n) * past_column(&transfer, out, &m).adjoint(),
            );

            // sum over p in Omega; only translation sites p = n - a with
            // `a` in the column support contribute.
            let mut smeared = zeros(out + inn, out + inn);
            for (a, left) in &colf {
                let p = &n - a;
                if !omega.contains(&p) {
                    continue;
                }
                if let Some(right) = colf.get(&(&m - &p)) {
                    smeared += left * right.adjoint();
                }
            }
            future_smeared.set(n.clone(), m.clone(), smeared);

            // sum over p outside Omega, again driven by column support.
            let mut smeared = zeros(out + inn, out + inn);
            for (a, left) in &colv {
                let p = &n - a;
                if omega.contains(&p) {
                    continue;
                }
                if let Some(right) = colv.get(&(&m - &p)) {
                    smeared += left * right.adjoint();
                }
            }
            past_smeared.set(n.clone(), m, smeared);
        }
    }

    let scattering = ambient.sub(&future_smeared)?.sub(&past_smeared)?;
    Ok(DbrKernels {
        ambient,
        future,
        past,
        future_smeared,
        past_smeared,
        scattering,
    })
}

/// The scattering-subspace kernel written in mixed smeared-Szego form
/// `[[k_{Sz,O} (I - S S(w)^*), k_{Sz,O^c} (S(z) - S(w))],
///   [k_{Sz,O} (S(z)^* - S(w)^*), k_{Sz,O^c} (I - S(z)^* S(w))]]`,
/// restricted to `window x window`.  Agrees with `DbrKernels::scattering`
/// for admissible sublattices.
pub fn dbr_mixed_form(
    col: &GRColligation,
    omega: Sublattice,
    window: &IndexBox,
) -> Result<FormalKernel> {
    let d = col.dim();
    let out = col.out_dim();
    let inn = col.in_dim();
    let degree = 2 * window.max_abs_total() + 1;
    let transfer = crate::colligation::transfer_coefficients(col, degree);
    let ind = |flag: bool| if flag { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };

    let mut kernel = FormalKernel::zero(d, out + inn, out + inn);
    for n in window.iter() {
        for m in window.iter() {
            let in_n = omega.contains(&n);
            let in_m = omega.contains(&m);

            let min_nm: Vec<i64> = (0..d).map(|j| n.entry(j).min(m.entry(j))).collect();
            let lo: Vec<i64> = min_nm.iter().map(|v| v - degree).collect();
            let mut b11 = zeros(out, out);
            if n == m && in_n {
                b11 += eye(out);
            }
            for p in IndexBox::new(lo, min_nm)?.iter() {
                if omega.contains(&p) {
                    b11 -= transfer.coeff(&(&n - &p)) * transfer.coeff(&(&m - &p)).adjoint();
                }
            }

            let b12 = transfer.coeff(&(&n - &m)) * (ind(!in_m) - ind(!in_n));
            let b21 = transfer.coeff(&(&m - &n)).adjoint() * (ind(in_m) - ind(in_n));

            let max_nm: Vec<i64> = (0..d).map(|j| n.entry(j).max(m.entry(j))).collect();
            let hi: Vec<i64> = max_nm.iter().map(|v| v + degree).collect();
            let mut b22 = zeros(inn, inn);
            if n == m && !in_n {
                b22 += eye(inn);
            }
            for p in IndexBox::new(max_nm, hi)?.iter() {
                if !omega.contains(&p) {
                    b22 -= transfer.coeff(&(&p - &n)).adjoint() * transfer.coeff(&(&p - &m));
                }
            }

            kernel.set(n.clone(), m, block2x2(&b11, &b12, &b21, &b22));
        }
    }
    Ok(kernel)
}

/// Maximum residual over `window x window` of the scattering-subspace
/// decomposition for the balanced half-space:
/// `K_V(n, m) = sum_k sum_{q : |q|_1-total = 0} K_k(n - q, m - q)`.
pub fn scattering_decomposition_residual(col: &GRColligation, window: &IndexBox) -> Result<f64> {
    let degree = window.max_abs_total() + 1;
    let kernels = dbr_kernels(col, Sublattice::Balanced, window)?;
    let factors = agler_factors(col, degree);

    // group the factor supports by total degree so each (n, m) pair only
    // touches the cross-section it actually sums over.
    let by_total: Vec<BTreeMap<i64, Vec<MultiIndex>>> = factors
        .iter()
        .map(|factor| {
            let mut groups: BTreeMap<i64, Vec<MultiIndex>> = BTreeMap::new();
            for a in factor.support() {
                groups.entry(a.total()).or_default().push(a.clone());
            }
            groups
        })
        .collect();

    let mut worst = 0.0f64;
    for n in window.iter() {
        for m in window.iter() {
            let shift = &m - &n;
            let mut rhs = zeros(col.out_dim() + col.in_dim(), col.out_dim() + col.in_dim());
            for (factor, groups) in factors.iter().zip(&by_total) {
                // q = n - a runs over the zero-total-degree cross-section.
                let Some(slice) = groups.get(&n.total()) else {
                    continue;
                };
                for a in slice {
                    let b = a + &shift;
                    rhs += factor.coeff(a) * factor.coeff(&b).adjoint();
                }
            }
            worst = worst.max((kernels.scattering.coeff(&n, &m) - rhs).norm());
        }
    }
    Ok(worst)
}

/// Strong limit of `M^s M^{*s}` as `s -> infinity` for a contraction `M`,
/// computed by repeated squaring of `M^s`.  The sequence is monotone
/// nonincreasing, so convergence within the iteration budget is
/// guaranteed up to numerical noise.
pub fn delta_limit(m: &CMat, tol: f64, max_doublings: usize) -> Result<CMat> {
    let mut power = m.clone();
    let mut gram = &power * power.adjoint();
    let mut last_delta = f64::INFINITY;
    for _ in 0..max_doublings {
        power = &power * &power;
        let next = &power * power.adjoint();
        last_delta = (&next - &gram).norm();
        gram = next;
        if last_delta < tol {
            return Ok(gram);
        }
    }
    Err(CoreError::NoConvergence {
        iterations: max_doublings,
        last_delta,
    })
}

/// Truncated limit-kernel coefficient
/// `C (A^a)^{alpha + T e_k} P_k ((A^a)^{beta + T e_k})^* C^*`
/// approximating the direction-`k` asymptotic kernel at `(alpha, beta)`;
/// both shifted exponents must be componentwise nonnegative.
pub fn limit_kernel_truncated(
    col: &GRColligation,
    k: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    t: i64,
) -> Result<CMat> {
    let shift = |idx: &MultiIndex| {
        let mut v: Vec<i64> = (0..col.dim()).map(|j| idx.entry(j)).collect();
        v[k] += t;
        MultiIndex(v)
    };
    let a = shift(alpha);
    let b = shift(beta);
    if !a.is_nonnegative() || !b.is_nonnegative() {
        return Err(CoreError::InvalidArgument(format!(
            "shifted exponents {:?}, {:?} must be nonnegative",
            a, b
        )));
    }
    let mut fwd = AbelianCalculus::of_a(col);
    let left = col.c() * fwd.power(&a);
    let right = fwd.power(&b).adjoint() * col.c().adjoint();
    Ok(left * col.projection(k) * right)
}

/// Closed form of the direction-`k` limit-kernel coefficient when both
/// indices lie on the `k`-th axis: with `A_kk = Q_k^* A Q_k`,
/// `C_k = C Q_k` and `D = strong lim A_kk^s A_kk^{*s}`, the coefficient
/// at axis positions `(alpha_k, beta_k)` is
/// `C_k D A_kk^{*(beta_k - alpha_k)} C_k^*` for `alpha_k <= beta_k` and
/// `C_k A_kk^{alpha_k - beta_k} D C_k^*` otherwise.
pub fn limit_kernel_closed_form(
    col: &GRColligation,
    k: usize,
    alpha_k: i64,
    beta_k: i64,
) -> Result<CMat> {
    let q_k = col.projection_basis(k);
    let a_kk = q_k.adjoint() * col.a() * &q_k;
    let c_k = col.c() * &q_k;
    let delta = delta_limit(&a_kk, 1e-14, 128)?;
    let core = if alpha_k <= beta_k {
        delta * mat_power(&a_kk.adjoint(), (beta_k - alpha_k) as usize)
    } else {
        mat_power(&a_kk, (alpha_k - beta_k) as usize) * delta
    };
    Ok(&c_k * core * c_k.adjoint())
}

/// `d = 1` Toeplitz oracle for the limit kernel: the coefficient at
/// `(n, m)` of the asymptotically Toeplitz matrix is
/// `d_{n,m} I - sum_{l >= 0} S_l S_{m-n+l}^*` for `n <= m` (and the
/// mirror image for `n > m`), truncated at the degree of `transfer`.
pub fn toeplitz_limit_oracle(transfer: &LaurentMatrixSeries, out: usize, n: i64, m: i64) -> CMat {
    let degree = transfer.degree();
    let mut acc = zeros(out, out);
    if n == m {
        acc += eye(out);
    }
    for l in 0..=degree {
        let (i, j) = if n <= m { (l, m - n + l) } else { (n - m + l, l) };
        acc -= transfer.coeff(&MultiIndex(vec![i])) * transfer.coeff(&MultiIndex(vec![j])).adjoint();
    }
    acc
}

/// All componentwise-nonnegative multi-indices of total degree at most
/// `degree`.
fn nonnegative_indices(d: usize, degree: i64) -> Vec<MultiIndex> {
    IndexBox::nonnegative(d, degree)
        .iter()
        .filter(|n| n.total() <= degree)
        .collect()
}

/// Column symbol `[S_n; d_{n,0} I]` of the future kernel.
fn future_column(transfer: &LaurentMatrixSeries, inn: usize, n: &MultiIndex) -> CMat {
    let bottom = if n.total() == 0 && n.is_nonnegative() {
        eye(inn)
    } else {
        zeros(inn, inn)
    };
    vcat(&[transfer.coeff(n), bottom])
}

/// Column symbol `[d_{n,0} I; S_{-n}^*]` of the past kernel.
fn past_column(transfer: &LaurentMatrixSeries, out: usize, n: &MultiIndex) -> CMat {
    let top = if n.total() == 0 && n.is_nonnegative() {
        eye(out)
    } else {
        zeros(out, out)
    };
    vcat(&[top, transfer.coeff(&-n).adjoint()])
}

/// Naive nonnegative matrix power.
fn mat_power(m: &CMat, s: usize) -> CMat {
    let mut acc = eye(m.nrows());
    for _ in 0..s {
        acc = acc * m;
    }
    acc
}
