//! Acceptance suite: one test per top-level acceptance criterion, each
//! printing a single pass/fail line.  Residual bounds and runtime budgets
//! are asserted, so `cargo test` fails if any criterion regresses.

use std::collections::BTreeMap;
use std::time::Instant;

use gr_scattering_core::agler::{
    agler_factors, augmented_decomposition_residual, cdp_residual, delta_limit,
    limit_kernel_closed_form, scattering_decomposition_residual, toeplitz_limit_oracle,
};
use gr_scattering_core::colligation::{
    classify_minimality, colligation_closure, random_colligation, random_scc_colligation,
    scattering_witness_space, transfer_coefficients, ClosureKind, GRColligation,
};
use gr_scattering_core::kernels::{overlap_basis, RANK_TOL};
use gr_scattering_core::lattice::{IndexBox, MultiIndex};
use gr_scattering_core::laurent::LaurentMatrixSeries;
use gr_scattering_core::matrix::{c, eye, pinv, zeros, CVec};
use gr_scattering_core::realization::{
    build_u0, realize_scc, redheffer_close, unitary_equivalence_check, EquivalenceVerdict,
};
use gr_scattering_core::samples;
use gr_scattering_core::scattering::{impulse_response, schaffer_apply, ScatteringVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(num: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {:02} ({}): {} [{}]",
        num,
        name,
        if ok { "pass" } else { "fail" },
        detail
    );
    assert!(ok, "criterion {num} ({name}) failed: {detail}");
}

/// Shared verification corpus: the three bundled examples plus twenty
/// seeded random unitary colligations with d <= 3 and state_dim <= 6.
fn corpus() -> Vec<GRColligation> {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut cols = vec![
        samples::shift_realization_1d(),
        samples::example_one(),
        samples::example_two(),
    ];
    for i in 0..20usize {
        let d = 1 + i % 3;
        let state = d + 1 + i % 3;
        let io = 1 + i % 2;
        cols.push(random_colligation(&mut rng, d, state, io));
    }
    cols
}

fn random_cvec<R: Rng>(rng: &mut R, len: usize) -> CVec {
    CVec::from_iterator(
        len,
        (0..len).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)),
    )
}

#[test]
fn criterion_01_example_one_reproduction() {
    let start = Instant::now();
    let col = samples::example_one();
    let validation = col.validate().max_residual();

    // Transfer function is the monomial z_1 z_2, exactly, through degree 4.
    let mut expected = LaurentMatrixSeries::zero(2, 1, 1);
    expected.set(MultiIndex(vec![1, 1]), eye(1));
    let transfer_dev = transfer_coefficients(&col, 4)
        .max_deviation(&expected)
        .unwrap();

    let class = classify_minimality(&col, &IndexBox::centered(2, 2), 4).unwrap();
    let scc_defect_ok = !class.strictly_closely_connected
        && class.scc_defect.ncols() == 1
        && (class.scc_defect[(2, 0)].norm() - 1.0).abs() < 1e-10;
    let mut sscc_target = zeros(4, 1);
    sscc_target[(0, 0)] = c(1.0 / 2f64.sqrt());
    sscc_target[(1, 0)] = c(-1.0 / 2f64.sqrt());
    let sscc_defect_ok = !class.shifted_strictly_closely_connected
        && class.sscc_defect.ncols() == 1
        && ((class.sscc_defect.adjoint() * &sscc_target).norm() - 1.0).abs() < 1e-10;

    let elapsed = start.elapsed();
    let ok = validation < 1e-10
        && transfer_dev < 1e-10
        && class.closely_connected
        && scc_defect_ok
        && sscc_defect_ok
        && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "example one reproduction",
        ok,
        &format!(
            "validate {validation:.2e}, transfer dev {transfer_dev:.2e}, \
             cc {} scc {} sscc {}, {:?}",
            class.closely_connected,
            class.strictly_closely_connected,
            class.shifted_strictly_closely_connected,
            elapsed
        ),
    );
}

#[test]
fn criterion_02_example_two_reproduction() {
    let start = Instant::now();
    let col = samples::example_two();
    let validation = col.validate().max_residual();
    let window = IndexBox::centered(2, 2);
    let class = classify_minimality(&col, &window, 8).unwrap();

    // The full witness space on the window must lie inside the family of
    // state fields [z1 f; z2 f; z1 f; z1 g; z2 g; 0; 0; 0] with f, g
    // window-supported scalar polynomials.
    let sites: Vec<MultiIndex> = window.iter().collect();
    let pos: BTreeMap<&MultiIndex, usize> = sites.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let s = col.state_dim();
    let qbox = IndexBox::new(vec![-2, -2], vec![1, 1]).unwrap();
    let mut family = zeros(sites.len() * s, 2 * qbox.len());
    for (j, q) in qbox.iter().enumerate() {
        let r1 = pos[&q.step_up(0)] * s;
        let r2 = pos[&q.step_up(1)] * s;
        family[(r1, 2 * j)] = c(1.0);
        family[(r1 + 2, 2 * j)] = c(1.0);
        family[(r2 + 1, 2 * j)] = c(1.0);
        family[(r1 + 3, 2 * j + 1)] = c(1.0);
        family[(r2 + 4, 2 * j + 1)] = c(1.0);
    }
    let witnesses = scattering_witness_space(&col, &window, 8).unwrap();
    let projection = &family * pinv(&family, RANK_TOL) * &witnesses;
    let family_residual = (&witnesses - projection).norm();

    let elapsed = start.elapsed();
    let ok = validation < 1e-10
        && class.strictly_closely_connected
        && class.shifted_strictly_closely_connected
        && class.scattering_witness.is_some()
        && witnesses.ncols() == 2 * qbox.len()
        && family_residual < 1e-8
        && elapsed.as_secs_f64() < 10.0;
    report(
        2,
        "example two reproduction",
        ok,
        &format!(
            "validate {validation:.2e}, scc {} sscc {}, witness dim {}, \
             family residual {family_residual:.2e}, {:?}",
            class.strictly_closely_connected,
            class.shifted_strictly_closely_connected,
            witnesses.ncols(),
            elapsed
        ),
    );
}

#[test]
fn criterion_03_augmented_agler_identity() {
    let start = Instant::now();
    let mut worst_aug = 0.0f64;
    let mut worst_cdp = 0.0f64;
    for col in corpus() {
        let window = IndexBox::centered(col.dim(), 3);
        worst_aug = worst_aug.max(augmented_decomposition_residual(&col, &window).unwrap());
        worst_cdp = worst_cdp.max(cdp_residual(&col, &window).unwrap());
    }
    let elapsed = start.elapsed();
    let ok = worst_aug < 1e-10 && worst_cdp < 1e-10 && elapsed.as_secs_f64() < 30.0;
    report(
        3,
        "augmented Agler identity",
        ok,
        &format!("augmented {worst_aug:.2e}, cdp {worst_cdp:.2e}, {:?}", elapsed),
    );
}

#[test]
fn criterion_04_scattering_space_decomposition() {
    let mut worst = 0.0f64;
    for col in corpus() {
        let window = IndexBox::centered(col.dim(), 2);
        worst = worst.max(scattering_decomposition_residual(&col, &window).unwrap());
    }
    let ok = worst < 1e-10;
    report(
        4,
        "scattering-space kernel decomposition",
        ok,
        &format!("residual {worst:.2e}"),
    );
}

#[test]
fn criterion_05_round_trip_realization() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut cols = vec![samples::example_two()];
    for i in 0..10usize {
        let d = 1 + i % 2;
        let state = d + 2 + i % 2;
        cols.push(random_scc_colligation(&mut rng, d, state, 1 + i % 2));
    }
    let mut worst_transfer = 0.0f64;
    let mut all_equivalent = true;
    for col in cols {
        let degree = col.state_dim() as i64 + 1;
        let factors = agler_factors(&col, degree);
        let transfer = transfer_coefficients(&col, degree);
        let realized = realize_scc(&factors, &transfer, col.out_dim(), col.in_dim()).unwrap();
        let verdict =
            unitary_equivalence_check(&col, &realized, col.state_dim() + 1, 1e-8).unwrap();
        all_equivalent &= verdict == EquivalenceVerdict::Equivalent;
        let dev = transfer_coefficients(&realized, 6)
            .max_deviation(&transfer_coefficients(&col, 6))
            .unwrap();
        worst_transfer = worst_transfer.max(dev);
    }
    let ok = all_equivalent && worst_transfer < 1e-9;
    report(
        5,
        "round-trip realization",
        ok,
        &format!("equivalent {all_equivalent}, transfer residual {worst_transfer:.2e}"),
    );
}

#[test]
fn criterion_06_impulse_response_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut worst = 0.0f64;
    for i in 0..20usize {
        let d = 1 + i % 3;
        let col = random_colligation(&mut rng, d, d + 1 + i % 3, 1 + i % 2);
        let dev = impulse_response(&col, 5)
            .unwrap()
            .max_deviation(&transfer_coefficients(&col, 5))
            .unwrap();
        worst = worst.max(dev);
    }
    let ok = worst < 1e-10;
    report(6, "impulse-response oracle", ok, &format!("residual {worst:.2e}"));
}

#[test]
fn criterion_07_schaffer_suite() {
    let mut worst_iso = 0.0f64;
    let mut worst_comm = 0.0f64;
    for col in [samples::example_one(), samples::example_two()] {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let vec = random_scattering_vector(&mut rng, &col);
            let norm = vec.norm_sq();
            for k in 0..2 {
                let moved = schaffer_apply(&col, k, &vec).unwrap();
                worst_iso = worst_iso.max((moved.norm_sq() - norm).abs() / norm.max(1.0));
            }
            let ab = schaffer_apply(&col, 0, &schaffer_apply(&col, 1, &vec).unwrap()).unwrap();
            let ba = schaffer_apply(&col, 1, &schaffer_apply(&col, 0, &vec).unwrap()).unwrap();
            worst_comm = worst_comm.max(ab.max_deviation(&ba));
        }
    }
    let ok = worst_iso < 1e-12 && worst_comm < 1e-12;
    report(
        7,
        "Schaffer suite",
        ok,
        &format!("isometry {worst_iso:.2e}, commutation {worst_comm:.2e}"),
    );
}

fn random_scattering_vector<R: Rng>(rng: &mut R, col: &GRColligation) -> ScatteringVector {
    let d = col.dim();
    let mut vec = ScatteringVector::default();
    for _ in 0..4 {
        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] -= total + 1 + rng.gen_range(0..2);
        vec.e_star
            .insert(MultiIndex(site), random_cvec(rng, col.out_dim()));

        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] -= total;
        vec.xi
            .insert(MultiIndex(site), random_cvec(rng, col.state_dim()));

        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] += -total + rng.gen_range(0..3);
        vec.e.insert(MultiIndex(site), random_cvec(rng, col.in_dim()));
    }
    vec
}

#[test]
fn criterion_08_limit_kernel_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut worst_toeplitz = 0.0f64;
    let mut worst_delta = 0.0f64;
    for i in 0..10usize {
        let col = random_colligation(&mut rng, 1, 2 + i % 3, 1 + i % 2);
        // Long truncation: the oracle's tail decays geometrically with the
        // spectral radius of A, so degree 20000 is far below 1e-8.
        let transfer = transfer_coefficients(&col, 20_000);
        for n in -4..=4i64 {
            for m in -4..=4i64 {
                let closed = limit_kernel_closed_form(&col, 0, n, m).unwrap();
                let oracle = toeplitz_limit_oracle(&transfer, col.out_dim(), n, m);
                worst_toeplitz = worst_toeplitz.max((closed - oracle).norm());
            }
        }
        let delta = delta_limit(col.a(), 1e-14, 128).unwrap();
        worst_delta = worst_delta.max((col.a() * &delta * col.a().adjoint() - &delta).norm());
    }
    let ok = worst_toeplitz < 1e-8 && worst_delta < 1e-8;
    report(
        8,
        "limit-kernel consistency",
        ok,
        &format!("toeplitz {worst_toeplitz:.2e}, delta identity {worst_delta:.2e}"),
    );
}

#[test]
fn criterion_09_overlap_cross_check() {
    let mut disagreements = 0usize;
    for col in corpus() {
        let s = col.state_dim();
        let factors = agler_factors(&col, s as i64 + 2);
        let unshifted = overlap_basis(&factors, false).unwrap().dim();
        let shifted = overlap_basis(&factors, true).unwrap().dim();
        let scc = colligation_closure(&col, ClosureKind::StrictlyCloselyConnected).dim() == s;
        let sscc =
            colligation_closure(&col, ClosureKind::ShiftedStrictlyCloselyConnected).dim() == s;
        if (unshifted == 0) != scc || (shifted == 0) != sscc {
            disagreements += 1;
        }
    }
    report(
        9,
        "overlap/minimality cross-check",
        disagreements == 0,
        &format!("disagreements {disagreements}"),
    );
}

#[test]
fn criterion_10_redheffer_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let base = samples::example_one();
    let mut worst_validate = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for i in 0..10usize {
        // Vary U_0 by conjugating the base data with a random
        // projection-commuting unitary, then draw an independent load.
        let mut w = zeros(4, 4);
        for k in 0..2 {
            let q = base.projection_basis(k);
            let u = gr_scattering_core::matrix::random_unitary(&mut rng, q.ncols());
            w += &q * u * q.adjoint();
        }
        let col = GRColligation::new(
            w.adjoint() * base.a() * &w,
            w.adjoint() * base.b(),
            base.c() * &w,
            base.d_block().clone(),
            (0..2)
                .map(|k| w.adjoint() * base.projection(k) * &w)
                .collect(),
        )
        .unwrap();
        let factors = agler_factors(&col, 6);
        let transfer = transfer_coefficients(&col, 6);
        let u0 = build_u0(&factors, &transfer, 1, 1).unwrap();
        let load = random_colligation(&mut rng, 2, 2 + i % 4, 1);
        let closed = redheffer_close(&u0, &load).unwrap();
        worst_validate = worst_validate.max(closed.validate().max_residual());

        // Feedback-solve oracle: propagate each basis vector through the
        // triangular loop by hand.
        let s = u0.state_dim();
        let st = load.state_dim();
        let n_in = s + st + u0.inn;
        let mut oracle = zeros(s + st + u0.out, n_in);
        for j in 0..n_in {
            let mut x = zeros(n_in, 1);
            x[(j, 0)] = c(1.0);
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
        worst_oracle = worst_oracle.max((closed.connecting_matrix() - oracle).norm());
    }
    let ok = worst_validate < 1e-9 && worst_oracle < 1e-10;
    report(
        10,
        "Redheffer closure",
        ok,
        &format!("unitarity {worst_validate:.2e}, oracle {worst_oracle:.2e}"),
    );
}
