//! The Frobenius-Perron operators of the greedy and lazy maps, acting
//! exactly on step functions.
//!
//! For the greedy map the operator is
//!
//! ```text
//! Gf(x) = (1/q0) f(x/q0) 1_{[0,r)}(x) + (1/q1) f((x+1)/q1)
//! ```
//!
//! and the lazy operator carries the indicator `1_{(ell, right]}` on its
//! second term instead. Both push a step function to a step function whose
//! breakpoints are the images of the input breakpoints under the matching
//! branch maps, plus the indicator cut itself; no discretization is
//! involved. The indicator cut is placed as an exact breakpoint so that
//! support statements stay sharp under iteration.

use crate::base::BasePair;
use crate::cylinders::{level_partition, ImageInterval};
use crate::error::{Error, Result};
use crate::maps::MapKind;
use crate::stepfn::{StepFunction, MERGE_TOL};

/// Hard cap on breakpoints produced while iterating; the tolerance merge
/// keeps realistic runs at a few hundred.
pub const BREAKPOINT_CAP: usize = 20_000;

/// Three consecutive L1 increments below this stop an iteration early: the
/// fixed point has been reached to working precision.
const CONVERGED_INCREMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct TransferOperator {
    base: BasePair,
    kind: MapKind,
}

/// One row of an iteration trace.
#[derive(Debug, Clone, Copy)]
pub struct IterationStep {
    pub n: usize,
    pub l1_increment: f64,
    pub breakpoint_count: usize,
    /// L1 mass outside the support of the invariant density of this map.
    pub mass_outside_support: f64,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub final_density: StepFunction,
}

/// Build a step function from contiguous segments `(right_end, value)`
/// starting at zero.
fn from_segments(domain_right: f64, segs: &[(f64, f64)]) -> StepFunction {
    let mut breakpoints = Vec::with_capacity(segs.len().saturating_sub(1));
    let mut values = Vec::with_capacity(segs.len());
    for (i, &(end, v)) in segs.iter().enumerate() {
        values.push(v);
        if i + 1 < segs.len() {
            breakpoints.push(end);
        }
    }
    StepFunction::new(domain_right, breakpoints, values)
        .expect("segment builder produces sorted finite pieces")
}

/// `g(x) = (1/q) f((x + d)/q)` on `[window_lo, window_hi]`, zero elsewhere
/// on `[0, out_right]`. This is the pushforward of `f` through the branch
/// `u -> q*u - d` restricted to the given window.
fn branch_pushforward(
    f: &StepFunction,
    q: f64,
    digit: u8,
    window_lo: f64,
    window_hi: f64,
    out_right: f64,
) -> StepFunction {
    let d = f64::from(digit);
    let x_of = |u: f64| q * u - d;
    let hi = window_hi.min(out_right);
    let mut segs: Vec<(f64, f64)> = Vec::with_capacity(f.piece_count() + 2);
    let start_x = window_lo.max(x_of(0.0)).max(0.0);
    let mut cursor = 0.0f64;
    if start_x > 0.0 {
        segs.push((start_x, 0.0));
        cursor = start_x;
    }
    for (_, r, v) in f.pieces() {
        if cursor >= hi {
            break;
        }
        let xr = x_of(r).min(hi);
        if xr <= cursor {
            continue;
        }
        segs.push((xr, v / q));
        cursor = xr;
    }
    if cursor < out_right {
        segs.push((out_right, 0.0));
    }
    from_segments(out_right, &segs)
}

impl TransferOperator {
    pub fn new(base: BasePair, kind: MapKind) -> Self {
        TransferOperator { base, kind }
    }

    pub fn base(&self) -> &BasePair {
        &self.base
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    fn check_domain(&self, f: &StepFunction) -> Result<()> {
        if (f.domain_right() - self.base.right()).abs() > MERGE_TOL {
            return Err(Error::DomainMismatch(f.domain_right(), self.base.right()));
        }
        Ok(())
    }

    /// One exact application of the operator.
    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        self.check_domain(f)?;
        let q = &self.base;
        let right = q.right();
        let (term0, term1) = match self.kind {
            MapKind::Greedy => (
                branch_pushforward(f, q.q0(), 0, 0.0, q.r(), right),
                branch_pushforward(f, q.q1(), 1, 0.0, right, right),
            ),
            MapKind::Lazy => (
                branch_pushforward(f, q.q0(), 0, 0.0, right, right),
                branch_pushforward(f, q.q1(), 1, q.ell(), right, right),
            ),
        };
        term0.add(&term1)
    }

    /// `‖ apply(f) − f ‖₁`, the fixed-point defect of `f`.
    pub fn residual(&self, f: &StepFunction) -> Result<f64> {
        self.apply(f)?.l1_distance(f)
    }

    /// L1 mass of `f` outside the support of this operator's invariant
    /// density (`[0, r)` greedy, `(ell, right]` lazy).
    pub fn mass_outside_support(&self, f: &StepFunction) -> f64 {
        match self.kind {
            MapKind::Greedy => f.integral_abs_on(self.base.r(), self.base.right()),
            MapKind::Lazy => f.integral_abs_on(0.0, self.base.ell()),
        }
    }

    /// Apply the operator `n` times to the probability density `f0`,
    /// recording per-step Cauchy increments. Stops early once the increment
    /// stays below `1e-12` for three consecutive steps.
    pub fn iterate(&self, f0: &StepFunction, n: usize) -> Result<IterationTrace> {
        self.check_domain(f0)?;
        let mass = f0.integrate();
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(mass));
        }
        let mut steps = Vec::with_capacity(n);
        let mut cur = f0.clone();
        let mut quiet = 0usize;
        for k in 1..=n {
            let next = self.apply(&cur)?;
            let bp = next.piece_count().saturating_sub(1);
            if bp > BREAKPOINT_CAP {
                return Err(Error::BreakpointOverflow {
                    count: bp,
                    cap: BREAKPOINT_CAP,
                });
            }
            let inc = next.l1_distance(&cur)?;
            steps.push(IterationStep {
                n: k,
                l1_increment: inc,
                breakpoint_count: bp,
                mass_outside_support: self.mass_outside_support(&next),
            });
            cur = next;
            quiet = if inc < CONVERGED_INCREMENT {
                quiet + 1
            } else {
                0
            };
            if quiet >= 3 {
                break;
            }
        }
        Ok(IterationTrace {
            steps,
            final_density: cur,
        })
    }

    /// L1 gap between the `n`-fold application of the greedy operator and
    /// its expansion over level-`n` cylinder words,
    /// `Σ_w (1/A_w) 1_{J_w}(y) f(G_w^{-1}(y))`. The two routes share no code
    /// path beyond the step-function algebra.
    pub fn power_expansion_check(&self, f: &StepFunction, n: usize) -> Result<f64> {
        if self.kind != MapKind::Greedy {
            return Err(Error::Unsupported(
                "the cylinder expansion is built for the greedy operator",
            ));
        }
        if n == 0 || n > 10 {
            return Err(Error::Unsupported("power expansion depth must be 1..=10"));
        }
        self.check_domain(f)?;
        let mut lhs = f.clone();
        for _ in 0..n {
            lhs = self.apply(&lhs)?;
        }
        let right = self.base.right();
        let mut rhs = StepFunction::constant(right, 0.0);
        for cyl in level_partition(&self.base, n)? {
            let span = match cyl.image {
                ImageInterval::Empty => continue,
                ImageInterval::RightOpen(xi) => xi,
                ImageInterval::Full => right,
            };
            // Term over J_w: y -> (1/A_w) f(left_w + y/A_w).
            let mut segs: Vec<(f64, f64)> = Vec::new();
            let mut cursor = 0.0f64;
            for (_, r, v) in f.pieces() {
                if cursor >= span {
                    break;
                }
                let yr = (cyl.weight * (r - cyl.left)).min(span);
                if yr <= cursor {
                    continue;
                }
                segs.push((yr, v / cyl.weight));
                cursor = yr;
            }
            if cursor < right {
                segs.push((right, 0.0));
            }
            rhs = rhs.add(&from_segments(right, &segs))?;
        }
        lhs.l1_distance(&rhs)
    }
}
