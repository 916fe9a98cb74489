//! Multidimensional linear-system trajectories and the Lax-Phillips
//! scattering picture for Givone-Roesser unitary colligations: forward and
//! backward (adjoint) lattice sweeps over finite windows with per-axis
//! boundary data, per-site energy balance, the Schaffer-style ambient
//! evolution operators acting on finitely supported scattering vectors,
//! and an impulse-response oracle for the transfer coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::colligation::GRColligation;
use crate::error::{CoreError, Result};
use crate::lattice::{IndexBox, MultiIndex};
use crate::laurent::LaurentMatrixSeries;
use crate::matrix::CVec;

/// Tolerance for trajectory and evolution identities.
pub const TRAJECTORY_TOL: f64 = 1e-12;

/// A system trajectory over a finite index window: full state vectors,
/// inputs and outputs per site.
#[derive(Clone, Debug)]
pub struct TrajectoryWindow {
    /// The window the trajectory lives on.
    pub window: IndexBox,
    /// State vector `x(n)` at each window site.
    pub states: BTreeMap<MultiIndex, CVec>,
    /// Input `u(n)` at each window site.
    pub inputs: BTreeMap<MultiIndex, CVec>,
    /// Output `y(n)` at each window site.
    pub outputs: BTreeMap<MultiIndex, CVec>,
}

fn fetch(map: &BTreeMap<MultiIndex, CVec>, n: &MultiIndex, len: usize) -> CVec {
    map.get(n).cloned().unwrap_or_else(|| CVec::zeros(len))
}

/// Run the forward Givone-Roesser recursion
/// `P_k x(n) = P_k A x(n - e_k) + P_k B u(n - e_k)`,
/// `y(n) = C x(n) + D u(n)`
/// over `window` in lexicographic order.  `boundary[k]` must provide the
/// `k`-th state component on the lower face `n_k = lo_k`; missing inputs
/// default to zero.
pub fn simulate_forward(
    col: &GRColligation,
    window: &IndexBox,
    inputs: &BTreeMap<MultiIndex, CVec>,
    boundary: &[BTreeMap<MultiIndex, CVec>],
) -> Result<TrajectoryWindow> {
    let d = col.dim();
    if boundary.len() != d {
        return Err(CoreError::InvalidArgument(format!(
            "expected one boundary map per axis (d = {d}), got {}",
            boundary.len()
        )));
    }
    let s = col.state_dim();
    let mut states: BTreeMap<MultiIndex, CVec> = BTreeMap::new();
    let mut outputs = BTreeMap::new();
    for n in window.iter() {
        let mut x = CVec::zeros(s);
        for k in 0..d {
            if n.entry(k) == window.lo()[k] {
                let face_val = boundary[k].get(&n).ok_or(CoreError::MissingBoundaryData {
                    site: (0..d).map(|j| n.entry(j)).collect(),
                    axis: k,
                })?;
                x += col.projection(k) * face_val;
            } else {
                let prev = n.step_down(k);
                let x_prev = &states[&prev];
                let u_prev = fetch(inputs, &prev, col.in_dim());
                x += col.projection(k) * (col.a() * x_prev + col.b() * &u_prev);
            }
        }
        let u = fetch(inputs, &n, col.in_dim());
        outputs.insert(n.clone(), col.c() * &x + col.d_block() * &u);
        states.insert(n, x);
    }
    Ok(TrajectoryWindow {
        window: window.clone(),
        states,
        inputs: window
            .iter()
            .map(|n| {
                let u = fetch(inputs, &n, col.in_dim());
                (n, u)
            })
            .collect(),
        outputs,
    })
}

/// Run the adjoint recursion backwards:
/// with `xi(n) = sum_j P_j x(n + e_j)`,
/// `x(n) = A^* xi(n) + C^* y(n)` and `u(n) = B^* xi(n) + D^* y(n)`.
/// `boundary[j]` must provide the `j`-th state component on the upper
/// ghost face `n_j = hi_j + 1`; missing outputs default to zero.
pub fn simulate_backward(
    col: &GRColligation,
    window: &IndexBox,
    outputs: &BTreeMap<MultiIndex, CVec>,
    boundary: &[BTreeMap<MultiIndex, CVec>],
) -> Result<TrajectoryWindow> {
    let d = col.dim();
    if boundary.len() != d {
        return Err(CoreError::InvalidArgument(format!(
            "expected one boundary map per axis (d = {d}), got {}",
            boundary.len()
        )));
    }
    let s = col.state_dim();
    let mut states: BTreeMap<MultiIndex, CVec> = BTreeMap::new();
    let mut inputs = BTreeMap::new();
    let sites: Vec<MultiIndex> = window.iter().collect();
    for n in sites.into_iter().rev() {
        let mut xi = CVec::zeros(s);
        for j in 0..d {
            let up = n.step_up(j);
            if n.entry(j) == window.hi()[j] {
                let face_val = boundary[j].get(&up).ok_or(CoreError::MissingBoundaryData {
                    site: (0..d).map(|i| up.entry(i)).collect(),
                    axis: j,
                })?;
                xi += col.projection(j) * face_val;
            } else {
                xi += col.projection(j) * &states[&up];
            }
        }
        let y = fetch(outputs, &n, col.out_dim());
        states.insert(n.clone(), col.a().adjoint() * &xi + col.c().adjoint() * &y);
        inputs.insert(n.clone(), col.b().adjoint() * &xi + col.d_block().adjoint() * &y);
    }
    Ok(TrajectoryWindow {
        window: window.clone(),
        states,
        inputs,
        outputs: window
            .iter()
            .map(|n| {
                let y = fetch(outputs, &n, col.out_dim());
                (n, y)
            })
            .collect(),
    })
}

/// Maximum per-site energy-balance residual
/// `| ||A x + B u||^2 + ||y||^2 - ||x||^2 - ||u||^2 |` over the window;
/// zero for trajectories of a unitary colligation.
pub fn energy_balance(col: &GRColligation, traj: &TrajectoryWindow) -> f64 {
    let mut worst = 0.0f64;
    for (n, x) in &traj.states {
        let u = fetch(&traj.inputs, n, col.in_dim());
        let y = fetch(&traj.outputs, n, col.out_dim());
        let advanced = col.a() * x + col.b() * &u;
        let res = (advanced.norm_squared() + y.norm_squared()
            - x.norm_squared()
            - u.norm_squared())
        .abs();
        worst = worst.max(res);
    }
    worst
}

/// A finitely supported vector of the ambient scattering space for the
/// balanced half-space geometry: an outgoing part on `{total < 0}`, state
/// data on the zero-total cross-section, and an incoming part on
/// `{total >= 0}`.
#[derive(Clone, Debug, Default)]
pub struct ScatteringVector {
    /// Output-channel component, supported on total degree `< 0`.
    pub e_star: BTreeMap<MultiIndex, CVec>,
    /// Full state vectors on the zero-total cross-section.
    pub xi: BTreeMap<MultiIndex, CVec>,
    /// Input-channel component, supported on total degree `>= 0`.
    pub e: BTreeMap<MultiIndex, CVec>,
}

impl ScatteringVector {
    /// Squared ambient norm.
    pub fn norm_sq(&self) -> f64 {
        self.e_star
            .values()
            .chain(self.xi.values())
            .chain(self.e.values())
            .map(|v| v.norm_squared())
            .sum()
    }

    /// Largest entrywise deviation from another vector.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let part = |a: &BTreeMap<MultiIndex, CVec>, b: &BTreeMap<MultiIndex, CVec>| -> f64 {
            let mut worst = 0.0f64;
            for (n, v) in a {
                let w = b.get(n).cloned().unwrap_or_else(|| CVec::zeros(v.len()));
                worst = worst.max((v - w).norm());
            }
            for (n, w) in b {
                if !a.contains_key(n) {
                    worst = worst.max(w.norm());
                }
            }
            worst
        };
        part(&self.e_star, &other.e_star)
            .max(part(&self.xi, &other.xi))
            .max(part(&self.e, &other.e))
    }

    fn prune(mut self) -> Self {
        self.e_star.retain(|_, v| v.norm() > 0.0);
        self.xi.retain(|_, v| v.norm() > 0.0);
        self.e.retain(|_, v| v.norm() > 0.0);
        self
    }
}

/// Apply the adjoint ambient evolution `U_k^*` of the Schaffer embedding:
/// every channel is pulled back by one step in direction `k`; data
/// crossing the zero-total cross-section is routed through the colligation
/// (`x` components are scattered by `[A, B]`, the output channel picks up
/// `C x + D e`).
pub fn schaffer_apply(
    col: &GRColligation,
    k: usize,
    vec: &ScatteringVector,
) -> Result<ScatteringVector> {
    let d = col.dim();
    if k >= d {
        return Err(CoreError::InvalidArgument(format!(
            "axis {k} out of range for d = {d}"
        )));
    }
    let mut out = ScatteringVector::default();

    // Incoming channel: e'(n) = e(n + e_k) while n stays in the
    // half-space; the cross-section values feed the colligation below.
    for (p, v) in &vec.e {
        if p.total() >= 1 {
            out.e.insert(p.step_down(k), v.clone());
        }
    }
    // Outgoing channel shift away from the cross-section.
    for (p, v) in &vec.e_star {
        out.e_star.insert(p.step_down(k), v.clone());
    }
    // Cross-section scattering: at each zero-total site p the pair
    // (x(p), e(p)) is mapped by the connecting matrix; the new state
    // component j lands at p - e_k + e_j and the output at p - e_k.
    let zero_in = CVec::zeros(col.in_dim());
    let zero_state = CVec::zeros(col.state_dim());
    let mut sites: Vec<MultiIndex> = vec.xi.keys().cloned().collect();
    for p in vec.e.keys().filter(|p| p.total() == 0) {
        if !vec.xi.contains_key(p) {
            sites.push(p.clone());
        }
    }
    for p in sites {
        let x = vec.xi.get(&p).unwrap_or(&zero_state);
        let e = vec.e.get(&p).unwrap_or(&zero_in);
        let advanced = col.a() * x + col.b() * e;
        for j in 0..d {
            let target = p.step_down(k).step_up(j);
            let contribution = col.projection(j) * &advanced;
            out.xi
                .entry(target)
                .and_modify(|acc| *acc += &contribution)
                .or_insert(contribution);
        }
        let output = col.c() * x + col.d_block() * e;
        out.e_star.insert(p.step_down(k), output);
    }
    Ok(out.prune())
}

/// Transfer coefficients recovered by impulse simulation: feeding the
/// input impulse `u = delta_{n,0} e_i` with zero initial state over the
/// nonnegative box of radius `degree` reads off `y(n) = S_n e_i`.
pub fn impulse_response(col: &GRColligation, degree: i64) -> Result<LaurentMatrixSeries> {
    let d = col.dim();
    let window = IndexBox::nonnegative(d, degree);
    let zero_boundary: Vec<BTreeMap<MultiIndex, CVec>> = (0..d)
        .map(|k| {
            window
                .iter()
                .filter(|n| n.entry(k) == 0)
                .map(|n| (n, CVec::zeros(col.state_dim())))
                .collect()
        })
        .collect();

    let mut series = LaurentMatrixSeries::zero(d, col.out_dim(), col.in_dim());
    for i in 0..col.in_dim() {
        let mut impulse = CVec::zeros(col.in_dim());
        impulse[i] = Complex64::new(1.0, 0.0);
        let mut inputs = BTreeMap::new();
        inputs.insert(MultiIndex::zero(d), impulse);
        let traj = simulate_forward(col, &window, &inputs, &zero_boundary)?;
        for (n, y) in &traj.outputs {
            if n.total() > degree {
                continue;
            }
            let mut coeff = series.coeff(n);
            coeff.view_mut((0, i), (col.out_dim(), 1)).copy_from(y);
            series.set(n.clone(), coeff);
        }
    }
    Ok(series)
}

/// Convenience: full `x` component maps on the upper ghost faces of a
/// forward trajectory, as required by [`simulate_backward`].
pub fn upper_ghost_boundary(
    col: &GRColligation,
    traj: &TrajectoryWindow,
) -> Vec<BTreeMap<MultiIndex, CVec>> {
    let d = col.dim();
    let mut boundary: Vec<BTreeMap<MultiIndex, CVec>> = vec![BTreeMap::new(); d];
    for (n, x) in &traj.states {
        let u = fetch(&traj.inputs, n, col.in_dim());
        let advanced = col.a() * x + col.b() * &u;
        for j in 0..d {
            if n.entry(j) == traj.window.hi()[j] {
                boundary[j].insert(n.step_up(j), advanced.clone());
            }
        }
    }
    boundary
}
