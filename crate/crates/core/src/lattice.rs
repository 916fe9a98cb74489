//! Multi-indices on the integer lattice Z^d, finite index boxes, and the
//! shift-invariant sublattices that organize frequency supports.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A point of the integer lattice Z^d.
///
/// Multi-indices are ordered lexicographically (derived `Ord`), which gives
/// every support iteration in the crate a deterministic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    /// The origin of Z^d.
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The k-th coordinate unit vector e_k (0-based axis).
    pub fn unit(d: usize, k: usize) -> Self {
        assert!(k < d, "axis {k} out of range for Z^{d}");
        let mut v = vec![0; d];
        v[k] = 1;
        MultiIndex(v)
    }

    /// Number of lattice dimensions.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Sum of the entries; the grading used by the balanced sublattice.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Sum of absolute values (the degree used for truncation windows).
    pub fn abs_total(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    /// True when every entry is >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// The index shifted by +e_k.
    pub fn step_up(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v[k] += 1;
        MultiIndex(v)
    }

    /// The index shifted by -e_k.
    pub fn step_down(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v[k] -= 1;
        MultiIndex(v)
    }

    /// Entry on the given axis.
    pub fn entry(&self, k: usize) -> i64 {
        self.0[k]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

/// An axis-aligned finite box `[lo_1, hi_1] x ... x [lo_d, hi_d]` in Z^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IndexBox {
    /// Build a box from corner vectors; fails when `lo[k] > hi[k]` anywhere.
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(CoreError::InvalidArgument(format!(
                "empty index box: lo {lo:?} exceeds hi {hi:?}"
            )));
        }
        Ok(IndexBox { lo, hi })
    }

    /// The symmetric box `[-r, r]^d`.
    pub fn centered(d: usize, r: i64) -> Self {
        IndexBox {
            lo: vec![-r; d],
            hi: vec![r; d],
        }
    }

    /// The nonnegative box `[0, r]^d`.
    pub fn nonnegative(d: usize, r: i64) -> Self {
        IndexBox {
            lo: vec![0; d],
            hi: vec![r; d],
        }
    }

    /// Number of lattice dimensions.
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Lower corner.
    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    /// Upper corner.
    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    /// Membership test.
    pub fn contains(&self, n: &MultiIndex) -> bool {
        n.dim() == self.dim()
            && n.0
                .iter()
                .enumerate()
                .all(|(k, &x)| self.lo[k] <= x && x <= self.hi[k])
    }

    /// Number of lattice points in the box.
    pub fn len(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .product()
    }

    /// True when the box has no points (never true for a constructed box).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All lattice points of the box in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        let d = self.dim();
        let mut cur: Option<Vec<i64>> = if self.is_empty() {
            None
        } else {
            Some(self.lo.clone())
        };
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            // lexicographic increment with carry, last axis fastest
            let v = cur.as_mut().unwrap();
            let mut k = d;
            loop {
                if k == 0 {
                    cur = None;
                    break;
                }
                k -= 1;
                if v[k] < self.hi[k] {
                    v[k] += 1;
                    break;
                }
                v[k] = self.lo[k];
            }
            Some(MultiIndex(out))
        })
    }

    /// The largest absolute-total degree attained inside the box.
    pub fn max_abs_total(&self) -> i64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l.abs().max(h.abs()))
            .sum()
    }
}

/// The four shift-invariant sublattices used as frequency supports.
///
/// `Balanced` is the "signal half" `{ n : n_1 + ... + n_d >= 0 }`; its
/// boundary in every axis direction is the hyperplane `{ n : total(n) = 0 }`,
/// which is the same finite-codimension set for all axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sublattice {
    /// All of Z^d.
    Full,
    /// The empty set.
    Empty,
    /// The nonnegative quadrant Z^d_+.
    Quadrant,
    /// The complement of the quadrant.
    QuadrantComplement,
    /// The balanced half-space { n : total(n) >= 0 }.
    Balanced,
    /// The complement { n : total(n) < 0 } of the balanced half-space.
    BalancedComplement,
}

impl Sublattice {
    /// Membership of `n` in the sublattice.
    pub fn contains(&self, n: &MultiIndex) -> bool {
        match self {
            Sublattice::Full => true,
            Sublattice::Empty => false,
            Sublattice::Quadrant => n.is_nonnegative(),
            Sublattice::QuadrantComplement => !n.is_nonnegative(),
            Sublattice::Balanced => n.total() >= 0,
            Sublattice::BalancedComplement => n.total() < 0,
        }
    }

    /// The complementary sublattice.
    pub fn complement(&self) -> Sublattice {
        match self {
            Sublattice::Full => Sublattice::Empty,
            Sublattice::Empty => Sublattice::Full,
            Sublattice::Quadrant => Sublattice::QuadrantComplement,
            Sublattice::QuadrantComplement => Sublattice::Quadrant,
            Sublattice::Balanced => Sublattice::BalancedComplement,
            Sublattice::BalancedComplement => Sublattice::Balanced,
        }
    }

    /// Shift-invariance sanity check: `n` in the set implies `n + e_k` in
    /// the set for every axis, over all points of `window`.
    pub fn is_forward_invariant_on(&self, window: &IndexBox) -> bool {
        window.iter().all(|n| {
            !self.contains(&n)
                || (0..n.dim()).all(|k| self.contains(&n.step_up(k)))
        })
    }

    /// The boundary of the sublattice in direction `k` inside `window`:
    /// points n with `n` outside but `n + e_k` inside.
    pub fn boundary_in(&self, k: usize, window: &IndexBox) -> Vec<MultiIndex> {
        window
            .iter()
            .filter(|n| !self.contains(n) && self.contains(&n.step_up(k)))
            .collect()
    }
}

/// Decides whether the sublattice has the *finite boundary* property used by
/// the scattering construction: for each axis k, the sets
/// `{ n notin Omega : n + e_k in Omega }` coincide for all k and have bounded
/// total degree. Only the balanced half-space (and trivially `Full`/`Empty`)
/// qualifies; the quadrant's boundary is an infinite "staircase".
///
/// The check is exact on the given window and is reported together with the
/// boundary slice found there.
pub fn finite_boundary(sublattice: Sublattice, window: &IndexBox) -> FiniteBoundaryReport {
    let d = window.dim();
    let per_axis: Vec<Vec<MultiIndex>> = (0..d)
        .map(|k| sublattice.boundary_in(k, window))
        .collect();
    let axes_agree = per_axis.windows(2).all(|w| w[0] == w[1]);
    // The balanced boundary is { total = -1 } shifted into the set: the
    // sites n with total(n) = -1. Structural finiteness holds exactly when
    // membership only depends on the total degree.
    let structural = matches!(
        sublattice,
        Sublattice::Full | Sublattice::Empty | Sublattice::Balanced | Sublattice::BalancedComplement
    ) || d == 1; // in Z^1 the quadrant and the balanced half-space coincide
    FiniteBoundaryReport {
        sublattice,
        axes_agree,
        finite: structural && axes_agree,
        boundary: per_axis.into_iter().next().unwrap_or_default(),
    }
}

/// Result of [`finite_boundary`].
#[derive(Clone, Debug)]
pub struct FiniteBoundaryReport {
    /// Sublattice examined.
    pub sublattice: Sublattice,
    /// Whether the per-axis boundary slices coincide on the window.
    pub axes_agree: bool,
    /// Whether the sublattice has the finite-boundary property.
    pub finite: bool,
    /// The boundary slice on the window (for axis 0).
    pub boundary: Vec<MultiIndex>,
}
