//! Closed-form bounds on the latent-averaged interventional parameters
//! `ω_{xw}`, the iterative back-substitution optimizer that combines them,
//! and the standard instrumental-variable closed forms.
//!
//! Every inequality is written as a linear form in the eight `κ_{yx.w}` plus
//! a constant. Because the input is the observed `ζ` and `κ` is only known
//! to lie in `[ζ/β̄, ζ/β̲]`, a form is evaluated at the interval endpoint
//! that makes the resulting bound loosest. At `β = 1` this is exact.
//!
//! Naming: for a cell `(x, w)` the complements are `x' = 1 − x` and
//! `w' = 1 − w`. Difference bounds are kept per treatment level as bounds
//! on `ω_{x1} − ω_{x0}`.

mod forms;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{BoundOutcome, IntervalBound, ObservedConditionals, RelaxationParams};
use crate::tables::{cell_index, xw_index, StratumTable};
pub use forms::KappaForm;

/// Default number of back-substitution sweeps.
pub const DEFAULT_MAX_ITERS: usize = 4;
/// Crossing bounds within this tolerance collapse to their midpoint.
pub const CROSS_TOL: f64 = 1e-9;
/// Denominators at or below this are treated as zero.
const DIV_TOL: f64 = 1e-12;
/// Smallest change that counts as progress between sweeps.
const CHANGE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("invalid relaxation parameters: {0}")]
    InvalidParams(String),
}

/// Observation-derived constants of the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `max(P(Y=1|x,w) − ε_y, 0)` by `xw_index`.
    pub l_yu: [f64; 4],
    /// `min(P(Y=1|x,w) + ε_y, 1)` by `xw_index`.
    pub u_yu: [f64; 4],
    /// `max(P(X=1|w) − ε_x, 0)` per `w`.
    pub l_xu_w: [f64; 2],
    /// `min(P(X=1|w) + ε_x, 1)` per `w`.
    pub u_xu_w: [f64; 2],
    /// Lower bound on `P(X=x|W=w,U)` by `xw_index`: `L_w` for `x = 1`,
    /// `1 − U_w` for `x = 0`.
    pub l_xu: [f64; 4],
    /// Upper bound on `P(X=x|W=w,U)` by `xw_index`.
    pub u_xu: [f64; 4],
    /// `min L^{YU}` over all cells.
    pub l_min: f64,
    /// `max U^{YU}` over all cells.
    pub u_max: f64,
    /// `true` where the conditional `P(Y=1|x,w)` was undefined.
    pub undefined_y: [bool; 4],
    /// `true` where `P(X=1|w)` was undefined.
    pub undefined_x: [bool; 2],
}

impl DerivedConstants {
    pub fn l_yu(&self, x: usize, w: usize) -> f64 {
        self.l_yu[xw_index(x, w)]
    }
    pub fn u_yu(&self, x: usize, w: usize) -> f64 {
        self.u_yu[xw_index(x, w)]
    }
    pub fn l_xu(&self, x: usize, w: usize) -> f64 {
        self.l_xu[xw_index(x, w)]
    }
    pub fn u_xu(&self, x: usize, w: usize) -> f64 {
        self.u_xu[xw_index(x, w)]
    }
}

/// Computes the constants of the closed-form bounds. Undefined conditionals
/// give the vacuous `[0, 1]` and are flagged.
pub fn derived_constants(zeta: &StratumTable, eps_x: f64, eps_y: f64) -> DerivedConstants {
    let obs = ObservedConditionals::from_stratum(zeta);
    let eta = obs.eta_box(eps_y);
    let delta = obs.delta_box(eps_x);
    let mut l_xu = [0.0; 4];
    let mut u_xu = [1.0; 4];
    for w in 0..2 {
        l_xu[xw_index(1, w)] = delta.lower[w];
        u_xu[xw_index(1, w)] = delta.upper[w];
        l_xu[xw_index(0, w)] = 1.0 - delta.upper[w];
        u_xu[xw_index(0, w)] = 1.0 - delta.lower[w];
    }
    DerivedConstants {
        l_yu: eta.lower,
        u_yu: eta.upper,
        l_xu_w: delta.lower,
        u_xu_w: delta.upper,
        l_xu,
        u_xu,
        l_min: eta.lower.iter().copied().fold(f64::INFINITY, f64::min),
        u_max: eta.upper.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        undefined_y: obs.p_y1.map(|p| p.is_none()),
        undefined_x: obs.p_x1.map(|p| p.is_none()),
    }
}

/// Per-cell intervals on `κ_{yx.w}`, indexed by `cell_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaIntervals {
    pub lower: [f64; 8],
    pub upper: [f64; 8],
}

impl KappaIntervals {
    pub fn get(&self, y: usize, x: usize, w: usize) -> IntervalBound {
        let i = cell_index(y, x, w);
        IntervalBound::new(self.lower[i], self.upper[i])
    }

    /// Interval on `χ_{x.w} = κ_{1x.w} + κ_{0x.w}`.
    pub fn chi(&self, x: usize, w: usize) -> IntervalBound {
        let a = self.get(1, x, w);
        let b = self.get(0, x, w);
        IntervalBound::new(a.lower + b.lower, a.upper + b.upper)
    }
}

/// `[ζ_{yx.w}/β̄, ζ_{yx.w}/β̲] ∩ [0, 1]`; cells with undefined `ζ_{yx.w}`
/// get `[0, 1]`.
pub fn kappa_interval(zeta: &StratumTable, beta_low: f64, beta_high: f64) -> KappaIntervals {
    let obs = ObservedConditionals::from_stratum(zeta);
    let mut k = KappaIntervals {
        lower: [0.0; 8],
        upper: [1.0; 8],
    };
    for i in 0..8 {
        if let Some(z) = obs.zeta[i] {
            k.lower[i] = (z / beta_high).clamp(0.0, 1.0);
            k.upper[i] = (z / beta_low).clamp(0.0, 1.0);
        }
    }
    k
}

/// Bounds on each `ω_{xw}` and on each difference `ω_{x1} − ω_{x0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    /// By `xw_index`.
    pub lower: [f64; 4],
    pub upper: [f64; 4],
    /// Per `x`: bounds on `ω_{x1} − ω_{x0}`.
    pub diff_lower: [f64; 2],
    pub diff_upper: [f64; 2],
}

impl BoxBounds {
    pub fn cell(&self, x: usize, w: usize) -> IntervalBound {
        let i = xw_index(x, w);
        IntervalBound::new(self.lower[i], self.upper[i])
    }

    /// Bounds on `ω_{xw} − ω_{xw'}`.
    pub fn diff(&self, x: usize, w: usize) -> IntervalBound {
        if w == 1 {
            IntervalBound::new(self.diff_lower[x], self.diff_upper[x])
        } else {
            IntervalBound::new(-self.diff_upper[x], -self.diff_lower[x])
        }
    }

    pub fn is_feasible(&self) -> bool {
        (0..4).all(|i| self.lower[i] <= self.upper[i] + CROSS_TOL)
            && (0..2).all(|x| self.diff_lower[x] <= self.diff_upper[x] + CROSS_TOL)
    }

    fn set_diff(&mut self, x: usize, w: usize, lo: f64, hi: f64) -> (bool, bool) {
        // lo ≤ ω_{xw} − ω_{xw'} ≤ hi, stored as bounds on ω_{x1} − ω_{x0}.
        let (dl, du) = if w == 1 { (lo, hi) } else { (-hi, -lo) };
        let mut changed = (false, false);
        if dl > self.diff_lower[x] + CHANGE_TOL {
            self.diff_lower[x] = dl;
            changed.0 = true;
        }
        if du < self.diff_upper[x] - CHANGE_TOL {
            self.diff_upper[x] = du;
            changed.1 = true;
        }
        changed
    }

    fn vacuous(eps_w: f64) -> Self {
        Self {
            lower: [0.0; 4],
            upper: [1.0; 4],
            diff_lower: [-eps_w; 2],
            diff_upper: [eps_w; 2],
        }
    }
}

/// Which inequality last moved each bound.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BindingTrace {
    pub lower: [String; 4],
    pub upper: [String; 4],
    pub diff_lower: [String; 2],
    pub diff_upper: [String; 2],
}

impl BindingTrace {
    fn initial() -> Self {
        let unit = || std::array::from_fn(|_| "unit".to_string());
        let eps = || std::array::from_fn(|_| "eps_w".to_string());
        Self {
            lower: unit(),
            upper: unit(),
            diff_lower: eps(),
            diff_upper: eps(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Outcome of the closed-form machinery for one stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoxOutcome {
    Feasible {
        bounds: BoxBounds,
        trace: BindingTrace,
        iterations: usize,
    },
    Infeasible {
        trace: BindingTrace,
    },
}

impl BoxOutcome {
    pub fn bounds(&self) -> Option<&BoxBounds> {
        match self {
            Self::Feasible { bounds, .. } => Some(bounds),
            Self::Infeasible { .. } => None,
        }
    }

    pub fn trace(&self) -> &BindingTrace {
        match self {
            Self::Feasible { trace, .. } | Self::Infeasible { trace } => trace,
        }
    }
}

/// A bound on one `ω` cell: `lower` or upper, its label and the form.
struct CellBound {
    upper: bool,
    label: &'static str,
    form: KappaForm,
}

fn k1(x: usize, w: usize) -> KappaForm {
    KappaForm::kappa(1, x, w)
}

fn k0(x: usize, w: usize) -> KappaForm {
    KappaForm::kappa(0, x, w)
}

fn chi(x: usize, w: usize) -> KappaForm {
    KappaForm::chi(x, w)
}

/// All single-cell bounds on `ω_{xw}` from the three theorems, with
/// divisions by zero dropped.
fn cell_bounds(c: &DerivedConstants, eps: f64, x: usize, w: usize) -> Vec<CellBound> {
    let (xp, wp) = (1 - x, 1 - w);
    let (lm, um) = (c.l_min, c.u_max);
    let one = KappaForm::constant(1.0);
    let mut out = Vec::with_capacity(14);
    let mut push = |upper: bool, label: &'static str, form: Option<KappaForm>| {
        if let Some(form) = form {
            out.push(CellBound { upper, label, form });
        }
    };

    // Theorem 1, upper then lower.
    push(true, "th1.1a", Some(k1(x, w) + chi(xp, w) * c.u_yu(x, w)));
    push(true, "th1.1b", k1(x, w).div(c.l_xu(x, w), DIV_TOL));
    push(true, "th1.1c", k0(x, w).div(c.u_xu(x, w), DIV_TOL).map(|f| one - f));
    push(false, "th1.2a", Some(k1(x, w) + chi(xp, w) * c.l_yu(x, w)));
    push(false, "th1.2b", k1(x, w).div(c.u_xu(x, w), DIV_TOL));
    push(false, "th1.2c", k0(x, w).div(c.l_xu(x, w), DIV_TOL).map(|f| one - f));

    // Theorem 2, box forms.
    push(true, "th2.1a", (k1(x, wp) + chi(x, wp) * eps).div(c.l_xu(x, wp), DIV_TOL));
    push(
        true,
        "th2.1b",
        (k0(x, wp) - chi(x, wp) * eps).div(c.u_xu(x, wp), DIV_TOL).map(|f| one - f),
    );
    push(false, "th2.2a", (k1(x, wp) - chi(x, wp) * eps).div(c.u_xu(x, wp), DIV_TOL));
    push(
        false,
        "th2.2b",
        (k0(x, wp) + chi(x, wp) * eps).div(c.l_xu(x, wp), DIV_TOL).map(|f| one - f),
    );

    // Theorem 3, box forms.
    push(
        true,
        "th3.1a",
        Some(
            k1(xp, wp) + k1(x, wp) + k1(x, w) - k1(xp, w) + chi(xp, w) * (um + lm + 2.0 * eps)
                - KappaForm::constant(lm),
        ),
    );
    push(
        true,
        "th3.1b",
        Some(
            k1(xp, w) + k1(x, w) + k1(x, wp) - k1(xp, wp)
                + chi(xp, w) * (2.0 * eps)
                + chi(xp, wp) * (um + lm)
                - KappaForm::constant(lm),
        ),
    );
    push(
        false,
        "th3.2a",
        Some(
            k1(x, wp) + k1(xp, w) + k1(x, w) - k1(xp, wp) + chi(xp, wp) * (um + lm)
                - chi(xp, w) * (2.0 * eps)
                - KappaForm::constant(um),
        ),
    );
    push(
        false,
        "th3.2b",
        Some(
            k1(x, w) + k1(xp, wp) + k1(x, wp) - k1(xp, w) - chi(xp, w) * (2.0 * eps - um - lm)
                - KappaForm::constant(um),
        ),
    );
    out
}

/// `ω_{xw} − b ω_{xw'} ≤ c` (`upper = true`) or `≥ c`.
pub(crate) struct PairRelation {
    pub upper: bool,
    pub label: &'static str,
    pub b: f64,
    pub c: KappaForm,
}

/// The four two-variable relations for cell `(x, w)`.
pub(crate) fn pair_relations(c: &DerivedConstants, eps: f64, x: usize, w: usize) -> [PairRelation; 4] {
    let xp = 1 - x;
    let (ub, lb) = (c.u_xu(xp, w), c.l_xu(xp, w));
    let one = KappaForm::constant(1.0);
    [
        PairRelation {
            upper: true,
            label: "th2.3r1",
            b: ub,
            c: k1(x, w) + chi(xp, w) * eps,
        },
        PairRelation {
            upper: false,
            label: "th2.3r2",
            b: lb,
            c: k1(x, w) - chi(xp, w) * eps,
        },
        PairRelation {
            upper: false,
            label: "th2.3r3",
            b: ub,
            c: one - k0(x, w) - KappaForm::constant(ub) - chi(xp, w) * eps,
        },
        PairRelation {
            upper: true,
            label: "th2.3r4",
            b: lb,
            c: one - k0(x, w) - KappaForm::constant(lb) + chi(xp, w) * eps,
        },
    ]
}

/// `ω_{xw} + s (ω_{x'w} − ω_{x'w'}) ≤ c` (`upper = true`) or `≥ c`, with
/// `s = ±1`.
pub(crate) struct TripleRelation {
    pub upper: bool,
    pub label: &'static str,
    pub sign: f64,
    pub c: KappaForm,
}

/// The four three-variable relations for cell `(x, w)`.
pub(crate) fn triple_relations(c: &DerivedConstants, eps: f64, x: usize, w: usize) -> [TripleRelation; 4] {
    let (xp, wp) = (1 - x, 1 - w);
    let (lm, um) = (c.l_min, c.u_max);
    [
        TripleRelation {
            upper: false,
            label: "th3.3t1",
            sign: 1.0,
            c: k1(xp, w) + k1(x, w) - k1(xp, wp) + k1(x, wp) - chi(x, wp) * (um + lm + 2.0 * eps)
                + KappaForm::constant(lm),
        },
        TripleRelation {
            upper: false,
            label: "th3.3t2",
            sign: -1.0,
            c: k1(xp, wp) + k1(x, wp) - k1(xp, w) + k1(x, w)
                - chi(x, wp) * (2.0 * eps)
                - chi(x, w) * (um + lm)
                + KappaForm::constant(lm),
        },
        TripleRelation {
            upper: true,
            label: "th3.3t3",
            sign: -1.0,
            c: k1(x, w) + k1(xp, wp) + k1(x, wp) - k1(xp, w) - chi(x, w) * (um + lm)
                + chi(x, wp) * (2.0 * eps)
                + KappaForm::constant(um),
        },
        TripleRelation {
            upper: true,
            label: "th3.3t4",
            sign: 1.0,
            c: k1(x, wp) + k1(xp, w) + k1(x, w) - k1(xp, wp) + chi(x, wp) * (2.0 * eps - um - lm)
                + KappaForm::constant(um),
        },
    ]
}

fn validate(aleph: &RelaxationParams) -> Result<(), SymbolicError> {
    aleph
        .validate()
        .map_err(|e| SymbolicError::InvalidParams(e.to_string()))
}

/// Intersection of every single-cell bound of the three theorems with
/// `[0, 1]`, evaluated at loosest-valid `κ` endpoints.
pub fn theorem_box(consts: &DerivedConstants, kappa: &KappaIntervals, eps_w: f64) -> BoxOutcome {
    let mut b = BoxBounds::vacuous(eps_w);
    let mut trace = BindingTrace::initial();
    for x in 0..2 {
        for w in 0..2 {
            let i = xw_index(x, w);
            for cb in cell_bounds(consts, eps_w, x, w) {
                if cb.upper {
                    let v = cb.form.max_over(kappa);
                    if v < b.upper[i] {
                        b.upper[i] = v;
                        trace.upper[i] = cb.label.to_string();
                    }
                } else {
                    let v = cb.form.min_over(kappa);
                    if v > b.lower[i] {
                        b.lower[i] = v;
                        trace.lower[i] = cb.label.to_string();
                    }
                }
            }
        }
    }
    finish(b, trace, 0)
}

/// Settles crossings: within [`CROSS_TOL`] they collapse to a point,
/// beyond it the outcome is infeasible.
fn finish(mut b: BoxBounds, trace: BindingTrace, iterations: usize) -> BoxOutcome {
    for i in 0..4 {
        if b.lower[i] > b.upper[i] + CROSS_TOL {
            return BoxOutcome::Infeasible { trace };
        }
        if b.lower[i] > b.upper[i] {
            let m = 0.5 * (b.lower[i] + b.upper[i]);
            b.lower[i] = m;
            b.upper[i] = m;
        }
    }
    for x in 0..2 {
        if b.diff_lower[x] > b.diff_upper[x] + CROSS_TOL {
            return BoxOutcome::Infeasible { trace };
        }
        if b.diff_lower[x] > b.diff_upper[x] {
            let m = 0.5 * (b.diff_lower[x] + b.diff_upper[x]);
            b.diff_lower[x] = m;
            b.diff_upper[x] = m;
        }
    }
    BoxOutcome::Feasible {
        bounds: b,
        trace,
        iterations,
    }
}

/// Iterative tightening of the theorem box.
///
/// Each sweep first tightens boxes and difference bounds with the
/// two-variable relations, then tightens boxes with the three-variable
/// relations using the current difference bounds. Bounds only ever move
/// inward. Stops when a sweep changes nothing or after `max_iters` sweeps.
pub fn back_substitution(
    zeta: &StratumTable,
    aleph: &RelaxationParams,
    max_iters: usize,
) -> Result<BoxOutcome, SymbolicError> {
    validate(aleph)?;
    let consts = derived_constants(zeta, aleph.eps_x, aleph.eps_y);
    let kappa = kappa_interval(zeta, aleph.beta_low, aleph.beta_high);
    let eps = aleph.eps_w;
    let (mut b, mut trace, _) = match theorem_box(&consts, &kappa, eps) {
        BoxOutcome::Feasible {
            bounds,
            trace,
            iterations,
        } => (bounds, trace, iterations),
        inf => return Ok(inf),
    };

    // The relation constants depend only on the inputs, so evaluate once.
    let mut pairs = Vec::with_capacity(16);
    let mut triples = Vec::with_capacity(16);
    for x in 0..2 {
        for w in 0..2 {
            for r in pair_relations(&consts, eps, x, w) {
                let c = if r.upper { r.c.max_over(&kappa) } else { r.c.min_over(&kappa) };
                pairs.push((x, w, r.upper, r.label, r.b, c));
            }
            for r in triple_relations(&consts, eps, x, w) {
                let c = if r.upper { r.c.max_over(&kappa) } else { r.c.min_over(&kappa) };
                triples.push((x, w, r.upper, r.label, r.sign, c));
            }
        }
    }

    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut changed = false;

        for &(x, w, upper, label, bcoef, c) in &pairs {
            let (i, ip) = (xw_index(x, w), xw_index(x, 1 - w));
            if upper {
                // ω_{xw} ≤ c + b ω_{xw'}
                let v = c + bcoef * b.upper[ip];
                if v < b.upper[i] - CHANGE_TOL {
                    b.upper[i] = v;
                    trace.upper[i] = label.to_string();
                    changed = true;
                }
                // ω_{xw} − ω_{xw'} ≤ c − (1 − b) ω_{xw'}
                let d = c + (bcoef - 1.0) * b.lower[ip];
                let (dl, du) = b.set_diff(x, w, f64::NEG_INFINITY, d);
                if dl || du {
                    record_diff(&mut trace, x, w, true, label);
                    changed = true;
                }
            } else {
                let v = c + bcoef * b.lower[ip];
                if v > b.lower[i] + CHANGE_TOL {
                    b.lower[i] = v;
                    trace.lower[i] = label.to_string();
                    changed = true;
                }
                let d = c + (bcoef - 1.0) * b.upper[ip];
                let (dl, du) = b.set_diff(x, w, d, f64::INFINITY);
                if dl || du {
                    record_diff(&mut trace, x, w, false, label);
                    changed = true;
                }
            }
        }
        for x in 0..2 {
            let (i1, i0) = (xw_index(x, 1), xw_index(x, 0));
            let (dl, du) = b.set_diff(x, 1, b.lower[i1] - b.upper[i0], b.upper[i1] - b.lower[i0]);
            if dl {
                trace.diff_lower[x] = "box".into();
                changed = true;
            }
            if du {
                trace.diff_upper[x] = "box".into();
                changed = true;
            }
        }

        for &(x, w, upper, label, sign, c) in &triples {
            let i = xw_index(x, w);
            let g = b.diff(1 - x, w);
            // ω_{xw} + s g ≤ c  ⇒  ω_{xw} ≤ c − min(s g); likewise for ≥.
            let (sg_min, sg_max) = if sign > 0.0 {
                (g.lower, g.upper)
            } else {
                (-g.upper, -g.lower)
            };
            if upper {
                let v = c - sg_min;
                if v < b.upper[i] - CHANGE_TOL {
                    b.upper[i] = v;
                    trace.upper[i] = label.to_string();
                    changed = true;
                }
            } else {
                let v = c - sg_max;
                if v > b.lower[i] + CHANGE_TOL {
                    b.lower[i] = v;
                    trace.lower[i] = label.to_string();
                    changed = true;
                }
            }
        }

        if !b.is_feasible() || !changed {
            break;
        }
    }
    Ok(finish(b, trace, iterations))
}

fn record_diff(trace: &mut BindingTrace, x: usize, w: usize, upper: bool, label: &str) {
    // A bound on ω_{x0} − ω_{x1} lands on the opposite side of the stored
    // difference.
    let stored_upper = upper == (w == 1);
    if stored_upper {
        trace.diff_upper[x] = label.to_string();
    } else {
        trace.diff_lower[x] = label.to_string();
    }
}

/// Converts `ω` boxes to an ACE interval using `β̲ω ≤ η ≤ β̄ω`.
pub fn box_to_ace(b: &BoxBounds, pw: [f64; 2], beta_low: f64, beta_high: f64) -> IntervalBound {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for w in 0..2 {
        let e1 = b.cell(1, w);
        let e0 = b.cell(0, w);
        let (e1_lo, e1_hi) = ((beta_low * e1.lower).max(0.0), (beta_high * e1.upper).min(1.0));
        let (e0_lo, e0_hi) = ((beta_low * e0.lower).max(0.0), (beta_high * e0.upper).min(1.0));
        lo += pw[w] * (e1_lo - e0_hi);
        hi += pw[w] * (e1_hi - e0_lo);
    }
    IntervalBound::new(lo.clamp(-1.0, 1.0), hi.clamp(-1.0, 1.0))
}

/// Back-substitution followed by [`box_to_ace`] for one stratum.
pub fn backsub_stratum_bounds(
    zeta: &StratumTable,
    aleph: &RelaxationParams,
    max_iters: usize,
) -> Result<BoundOutcome, SymbolicError> {
    let out = back_substitution(zeta, aleph, max_iters)?;
    Ok(match out.bounds() {
        Some(b) => {
            let s = zeta.normalized();
            BoundOutcome::Bounded(box_to_ace(b, [s.p_w(0), s.p_w(1)], aleph.beta_low, aleph.beta_high))
        }
        None => BoundOutcome::Infeasible,
    })
}

/// Closed-form bounds on `P(Y = 1 | do(X = x))` under the standard
/// instrumental-variable model, as `[lower(η_0), upper(η_0)]` and the same
/// for `η_1`.
pub fn balke_pearl_eta(zeta: &StratumTable) -> [IntervalBound; 2] {
    let s = zeta.conditionals();
    let z = |y: usize, x: usize, w: usize| s[cell_index(y, x, w)];
    let max4 = |v: [f64; 4]| v.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let min4 = |v: [f64; 4]| v.into_iter().fold(f64::INFINITY, f64::min);
    let eta0 = IntervalBound::new(
        max4([
            z(1, 0, 1),
            z(1, 0, 0),
            z(1, 0, 0) + z(1, 1, 0) - z(0, 0, 1) - z(1, 1, 1),
            -z(0, 0, 0) - z(1, 1, 0) + z(1, 0, 1) + z(1, 1, 1),
        ]),
        min4([
            1.0 - z(0, 0, 0),
            1.0 - z(0, 0, 1),
            z(0, 1, 0) + z(1, 0, 0) + z(1, 0, 1) + z(1, 1, 1),
            z(1, 0, 0) + z(1, 1, 0) + z(0, 1, 1) + z(1, 0, 1),
        ]),
    );
    let eta1 = IntervalBound::new(
        max4([
            z(1, 1, 1),
            z(1, 1, 0),
            -z(0, 1, 0) - z(1, 0, 0) + z(1, 0, 1) + z(1, 1, 1),
            z(1, 0, 0) + z(1, 1, 0) - z(0, 1, 1) - z(1, 0, 1),
        ]),
        min4([
            1.0 - z(0, 1, 1),
            1.0 - z(0, 1, 0),
            z(1, 0, 0) + z(1, 1, 0) + z(0, 0, 1) + z(1, 1, 1),
            z(0, 0, 0) + z(1, 1, 0) + z(1, 0, 1) + z(1, 1, 1),
        ]),
    );
    [eta0, eta1]
}

/// Standard instrumental-variable ACE interval
/// `[L(η_1) − U(η_0), U(η_1) − L(η_0)]`.
pub fn balke_pearl_siv(zeta: &StratumTable) -> IntervalBound {
    let [e0, e1] = balke_pearl_eta(zeta);
    IntervalBound::new(e1.lower - e0.upper, e1.upper - e0.lower)
}
