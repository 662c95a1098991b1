//! Extreme points of the relaxed interventional parameter space and their
//! conversion to linear inequalities.
//!
//! The pipeline is: bound each `η*_{xw}` and `δ*_w` by a box around the
//! observed conditionals, enumerate the vertices of the per-treatment
//! polygon `{(η*_{x0}, η*_{x1}) : |η*_{x1} − η*_{x0}| ≤ ε_w}`, push the
//! product of those vertices with the `δ*` box corners into the joint
//! 12-dimensional `(ζ*, η*)` space, and finally convert that vertex set to
//! halfspaces with [`dual_conversion`].
//!
//! Joint coordinates `0..8` hold `ζ*_{yx.w}` at [`cell_index`]`(y, x, w)`;
//! coordinates `8..12` hold `η*_{xw}` at `8 + `[`xw_index`]`(x, w)`.

mod dd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tables::{cell_index, xw_index};

pub use dd::{dual_conversion, hrep_to_vrep};

/// Tolerance used to merge coincident vertices.
pub const DEDUP_TOL: f64 = 1e-12;
/// Tolerance used to accept a point as satisfying an inequality.
pub const FEAS_TOL: f64 = 1e-9;
/// Dimension of the joint `(ζ*, η*)` space.
pub const JOINT_DIM: usize = 12;
/// Offset of the `η*` block inside a joint vertex.
pub const ETA_OFFSET: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("polygon infeasible: boxes separated by more than eps_w")]
    Infeasible,
    #[error("empty vertex set")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numerical degeneracy in dual conversion: {0}")]
    NumericalDegeneracy(String),
    #[error("invalid box [{lower}, {upper}]")]
    InvalidBox { lower: f64, upper: f64 },
}

/// A finite point set, read as the vertices of its convex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VRep {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl VRep {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
        }
    }

    /// Builds a point set, dropping duplicates within [`DEDUP_TOL`].
    pub fn from_points(dim: usize, points: Vec<Vec<f64>>) -> Result<Self, PolytopeError> {
        let mut v = Self::new(dim);
        for p in points {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            v.push_unique(p);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Appends `p` unless a point within [`DEDUP_TOL`] (max-norm) exists.
    pub fn push_unique(&mut self, p: Vec<f64>) -> bool {
        let dup = self.points.iter().any(|q| {
            q.iter()
                .zip(&p)
                .all(|(a, b)| (a - b).abs() <= DEDUP_TOL)
        });
        if !dup {
            self.points.push(p);
        }
        !dup
    }

    /// True when some stored point is within `tol` of `p` in max-norm.
    pub fn contains_point(&self, p: &[f64], tol: f64) -> bool {
        self.points
            .iter()
            .any(|q| q.iter().zip(p).all(|(a, b)| (a - b).abs() <= tol))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("VRep serializes")
    }
}

/// The polyhedron `{v : A v ≤ b}`; `a` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRep {
    pub dim: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl HRep {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.dim);
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn n_rows(&self) -> usize {
        self.b.len()
    }

    /// Largest violation `max_i (a_i·v − b_i)`, or `-∞` for no rows.
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &rhs)| dot(row, v) - rhs)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.max_violation(v) <= tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("HRep serializes")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-cell bounds `[lower, upper]` on `η*_{xw}`, indexed by [`xw_index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaBox {
    pub lower: [f64; 4],
    pub upper: [f64; 4],
}

impl EtaBox {
    /// `[P(Y=1|x,w) − ε_y, P(Y=1|x,w) + ε_y] ∩ [0, 1]`.
    pub fn around(p_y1: [f64; 4], eps_y: f64) -> Self {
        let mut lower = [0.0; 4];
        let mut upper = [1.0; 4];
        for i in 0..4 {
            lower[i] = (p_y1[i] - eps_y).clamp(0.0, 1.0);
            upper[i] = (p_y1[i] + eps_y).clamp(0.0, 1.0);
        }
        Self { lower, upper }
    }
}

/// Per-stratum bounds on `δ*_w`, the latent-averaged `P(X = 1 | W = w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBox {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl DeltaBox {
    pub fn around(p_x1: [f64; 2], eps_x: f64) -> Self {
        let mut lower = [0.0; 2];
        let mut upper = [1.0; 2];
        for w in 0..2 {
            lower[w] = (p_x1[w] - eps_x).clamp(0.0, 1.0);
            upper[w] = (p_x1[w] + eps_x).clamp(0.0, 1.0);
        }
        Self { lower, upper }
    }

    fn corners(&self, w: usize) -> Vec<f64> {
        if (self.upper[w] - self.lower[w]).abs() <= DEDUP_TOL {
            vec![self.lower[w]]
        } else {
            vec![self.lower[w], self.upper[w]]
        }
    }
}

fn check_interval(lower: f64, upper: f64) -> Result<(), PolytopeError> {
    if !(lower.is_finite() && upper.is_finite() && lower <= upper + DEDUP_TOL) {
        return Err(PolytopeError::InvalidBox { lower, upper });
    }
    Ok(())
}

/// Vertices of `{(a, b) ∈ [l0, u0] × [l1, u1] : |a − b| ≤ eps_w}`.
///
/// Candidates are the box corners inside the band and the points where the
/// lines `a − b = ±eps_w` cross the box edges. The result is sorted
/// counter-clockwise around its centroid. Boxes separated by more than
/// `eps_w` give [`PolytopeError::Infeasible`].
pub fn eta_polygon_vertices(
    l0: f64,
    u0: f64,
    l1: f64,
    u1: f64,
    eps_w: f64,
) -> Result<VRep, PolytopeError> {
    check_interval(l0, u0)?;
    check_interval(l1, u1)?;
    let eps = eps_w.max(0.0);
    if l0 - u1 > eps + DEDUP_TOL || l1 - u0 > eps + DEDUP_TOL {
        return Err(PolytopeError::Infeasible);
    }
    let in0 = |a: f64| a >= l0 - DEDUP_TOL && a <= u0 + DEDUP_TOL;
    let in1 = |b: f64| b >= l1 - DEDUP_TOL && b <= u1 + DEDUP_TOL;
    let mut cands: Vec<[f64; 2]> = Vec::with_capacity(12);
    for &a in &[l0, u0] {
        for &b in &[l1, u1] {
            if (a - b).abs() <= eps + DEDUP_TOL {
                cands.push([a, b]);
            }
        }
    }
    for &s in &[eps, -eps] {
        // a − b = s
        for &a in &[l0, u0] {
            let b = a - s;
            if in1(b) {
                cands.push([a, b.clamp(l1, u1)]);
            }
        }
        for &b in &[l1, u1] {
            let a = b + s;
            if in0(a) {
                cands.push([a.clamp(l0, u0), b]);
            }
        }
    }
    let mut out = VRep::new(2);
    for c in cands {
        out.push_unique(c.to_vec());
    }
    if out.is_empty() {
        return Err(PolytopeError::Infeasible);
    }
    let n = out.len() as f64;
    let cx = out.points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = out.points.iter().map(|p| p[1]).sum::<f64>() / n;
    out.points.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.total_cmp(&aq)
    });
    Ok(out)
}

/// Maps per-treatment polygon vertices and `δ*` box corners into the joint
/// `(ζ*, η*)` space.
///
/// `eta[x]` holds the vertices `(η*_{x0}, η*_{x1})` of the polygon for
/// treatment level `x`.
pub fn joint_vertices(eta: &[VRep; 2], delta: &DeltaBox) -> Result<VRep, PolytopeError> {
    for e in eta {
        if e.is_empty() {
            return Err(PolytopeError::Infeasible);
        }
        if e.dim != 2 {
            return Err(PolytopeError::DimensionMismatch {
                expected: 2,
                found: e.dim,
            });
        }
    }
    for w in 0..2 {
        check_interval(delta.lower[w], delta.upper[w])?;
    }
    let lex = |v: &VRep| {
        let mut pts = v.points.clone();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts
    };
    let (poly0, poly1) = (lex(&eta[0]), lex(&eta[1]));
    let d0 = delta.corners(0);
    let d1 = delta.corners(1);
    let mut out = VRep::new(JOINT_DIM);
    // This nesting order keeps the double-description intermediate sets
    // small; it does not change the resulting point set.
    for &dw0 in &d0 {
        for &dw1 in &d1 {
            for p1 in &poly1 {
                for p0 in &poly0 {
                    let mut v = vec![0.0; JOINT_DIM];
                    let dl = [dw0, dw1];
                    for w in 0..2 {
                        for x in 0..2 {
                            let e = if x == 0 { p0[w] } else { p1[w] };
                            let dx = if x == 1 { dl[w] } else { 1.0 - dl[w] };
                            v[cell_index(1, x, w)] = e * dx;
                            v[cell_index(0, x, w)] = (1.0 - e) * dx;
                            v[ETA_OFFSET + xw_index(x, w)] = e;
                        }
                    }
                    out.push_unique(v);
                }
            }
        }
    }
    Ok(out)
}

/// Vertices of the joint space for given boxes and `ε_w`, combining
/// [`eta_polygon_vertices`] and [`joint_vertices`].
pub fn relaxed_vertices(eta: &EtaBox, delta: &DeltaBox, eps_w: f64) -> Result<VRep, PolytopeError> {
    let mut polys = Vec::with_capacity(2);
    for x in 0..2 {
        let (i0, i1) = (xw_index(x, 0), xw_index(x, 1));
        polys.push(eta_polygon_vertices(
            eta.lower[i0],
            eta.upper[i0],
            eta.lower[i1],
            eta.upper[i1],
            eps_w,
        )?);
    }
    let polys: [VRep; 2] = polys.try_into().expect("two polygons");
    joint_vertices(&polys, delta)
}
