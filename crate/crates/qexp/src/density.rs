//! Invariant densities in closed form.
//!
//! The greedy invariant density is proportional to the jump function
//!
//! ```text
//! h_g(x) = Σ_{n>=0}  q1^{-s(n)} q0^{-(n-s(n))} · 1_{[0, G^n(r))}(x)
//! ```
//!
//! where `s(n)` sums the first `n` digits of the greedy expansion of `r`;
//! the lazy density mirrors it with indicators `(L^n(ell), right]`. When the
//! critical orbit is detected to be eventually constant (it hits `0` or
//! `right`), the remaining geometric tail is summed exactly and the
//! construction is closed-form; otherwise the series is truncated with a
//! certified L1 tail bound `right * qmin^-N / (1 - 1/qmin)`.

use crate::base::BasePair;
use crate::error::{Error, Result};
use crate::maps::{pi_value, step, DigitWord, MapKind, OrbitRecord, Tail, DOMAIN_TOL};
use crate::stepfn::StepFunction;
use crate::transfer::TransferOperator;

/// A digit word with its running digit sums `s(0) = 0, .., s(n)`.
#[derive(Debug, Clone)]
pub struct DigitSumSeq {
    pub digits: DigitWord,
    pub partial_sums: Vec<usize>,
}

impl DigitSumSeq {
    pub fn from_word(digits: DigitWord) -> Self {
        let mut partial_sums = Vec::with_capacity(digits.len() + 1);
        let mut s = 0usize;
        partial_sums.push(0);
        for &d in digits.digits() {
            s += usize::from(d);
            partial_sums.push(s);
        }
        DigitSumSeq {
            digits,
            partial_sums,
        }
    }
}

/// Which endpoint an eventually constant critical orbit is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantAt {
    Zero,
    Right,
}

#[derive(Debug, Clone)]
pub struct CriticalOrbit {
    pub record: OrbitRecord,
    pub sums: DigitSumSeq,
    /// `Some((n, endpoint))` if `x_n` was detected on an endpoint; every
    /// later point is then pinned there exactly.
    pub constant_from: Option<(usize, ConstantAt)>,
}

/// The critical orbit driving the jump function: the greedy orbit of `r` or
/// the lazy orbit of `ell`, with endpoint detection at `1e-12`.
pub fn critical_orbit(q: &BasePair, kind: MapKind, n: usize) -> Result<CriticalOrbit> {
    if n == 0 {
        return Err(Error::Unsupported("critical orbit needs n >= 1"));
    }
    let start = match kind {
        MapKind::Greedy => q.r(),
        MapKind::Lazy => q.ell(),
    };
    let mut points = Vec::with_capacity(n + 1);
    let mut digits = DigitWord::default();
    let mut constant_from = None;
    let mut cur = start;
    points.push(cur);
    for i in 0..=n {
        if constant_from.is_none() {
            if cur.abs() <= DOMAIN_TOL {
                constant_from = Some((i, ConstantAt::Zero));
            } else if (cur - q.right()).abs() <= DOMAIN_TOL {
                constant_from = Some((i, ConstantAt::Right));
            }
        }
        if i == n {
            break;
        }
        match constant_from {
            Some((_, ConstantAt::Zero)) => {
                digits.push(0);
                cur = 0.0;
            }
            Some((_, ConstantAt::Right)) => {
                digits.push(1);
                cur = q.right();
            }
            None => {
                let (d, next) = step(q, kind, cur)?;
                digits.push(d);
                cur = next;
            }
        }
        points.push(cur);
    }
    // Pin the detected index itself for a clean record.
    if let Some((n0, at)) = constant_from {
        let v = match at {
            ConstantAt::Zero => 0.0,
            ConstantAt::Right => q.right(),
        };
        for p in points.iter_mut().skip(n0) {
            *p = v;
        }
    }
    Ok(CriticalOrbit {
        record: OrbitRecord {
            base: *q,
            start,
            points,
            digits: digits.clone(),
            map_kind: kind,
        },
        sums: DigitSumSeq::from_word(digits),
        constant_from,
    })
}

fn geometric_tail_weight(q: &BasePair, kind: MapKind) -> f64 {
    match kind {
        // Digits are all ones from the pinning index on: Σ q1^-k.
        MapKind::Greedy => q.q1() / (q.q1() - 1.0),
        // Lazy orbits pin at zero with digit zero: Σ q0^-k.
        MapKind::Lazy => q.q0() / (q.q0() - 1.0),
    }
}

fn assemble(q: &BasePair, kind: MapKind, terms: &[(f64, f64)]) -> StepFunction {
    match kind {
        MapKind::Greedy => StepFunction::from_upper_indicators(q.right(), terms),
        MapKind::Lazy => StepFunction::from_lower_indicators(q.right(), terms),
    }
}

/// Truncation tail bound: every dropped term has L1 norm at most
/// `right * qmin^-n`.
pub fn truncation_tail_bound(q: &BasePair, n: usize) -> f64 {
    let ratio = 1.0 / q.min_q();
    q.right() * ratio.powi(n as i32) / (1.0 - ratio)
}

/// Smallest truncation depth whose tail bound is at most `eps` (capped).
pub fn depth_for_tail(q: &BasePair, eps: f64) -> usize {
    let ratio = 1.0 / q.min_q();
    let mut tail = q.right() * ratio / (1.0 - ratio);
    let mut n = 1usize;
    while tail > eps && n < 100_000 {
        tail *= ratio;
        n += 1;
    }
    n
}

/// The unnormalized jump function truncated at depth `n`, together with the
/// L1 bound on the dropped tail (zero when the critical orbit pins to an
/// endpoint and the tail is summed in closed form).
pub fn jump_function(q: &BasePair, kind: MapKind, n: usize) -> Result<(StepFunction, f64)> {
    let orbit = critical_orbit(q, kind, n)?;
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    let mut weight = 1.0f64;
    let stop = orbit.constant_from.map_or(n, |(n0, _)| n0);
    for i in 0..stop.min(n) {
        terms.push((orbit.record.points[i], weight));
        weight /= q.q(orbit.record.digits.digits()[i]);
    }
    let tail_bound = match orbit.constant_from {
        Some((_, at)) => {
            let pinned_contributes = match (kind, at) {
                (MapKind::Greedy, ConstantAt::Right) => true,
                (MapKind::Lazy, ConstantAt::Zero) => true,
                _ => false, // indicators from the pinned point on are empty
            };
            if pinned_contributes {
                // weight currently equals 1/A_{n0} at the pinning index.
                let cut = match kind {
                    MapKind::Greedy => q.right(),
                    MapKind::Lazy => 0.0,
                };
                terms.push((cut, weight * geometric_tail_weight(q, kind)));
            }
            0.0
        }
        None => truncation_tail_bound(q, n),
    };
    Ok((assemble(q, kind, &terms), tail_bound))
}

/// The jump function of a prescribed eventually-constant critical expansion,
/// evaluated in closed form: the orbit points are the values of the shifted
/// digit sequence, so a word that ends in the constant tail yields an exact
/// finite construction with zero tail bound.
///
/// The word must actually expand the matching critical point (`r` for
/// greedy, `ell` for lazy) to within `1e-8`, and must be consistent with the
/// branch switches to within `1e-9`.
pub fn jump_function_from_word(
    q: &BasePair,
    kind: MapKind,
    word: &DigitWord,
    tail: Tail,
) -> Result<StepFunction> {
    let target = match kind {
        MapKind::Greedy => q.r(),
        MapKind::Lazy => q.ell(),
    };
    let full = pi_value(q.q0(), q.q1(), word.digits(), tail);
    if (full - target).abs() > 1e-8 {
        return Err(Error::NoSolution(format!(
            "word {word} with {tail:?} tail evaluates to {full}, not to the critical point {target}"
        )));
    }
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(word.len() + 1);
    let mut weight = 1.0f64;
    for i in 0..word.len() {
        let shifted = pi_value(q.q0(), q.q1(), &word.digits()[i..], tail);
        let digit = word.digits()[i];
        let consistent = match (kind, digit) {
            (MapKind::Greedy, 1) => shifted >= q.greedy_switch() - 1e-9,
            (MapKind::Greedy, 0) => shifted < q.greedy_switch() + 1e-9,
            (MapKind::Lazy, 0) => shifted <= q.lazy_switch() + 1e-9,
            (MapKind::Lazy, 1) => shifted > q.lazy_switch() - 1e-9,
            _ => unreachable!(),
        };
        if !consistent {
            return Err(Error::NoSolution(format!(
                "digit {digit} at position {i} contradicts the {kind} branch switch"
            )));
        }
        terms.push((shifted, weight));
        weight /= q.q(digit);
    }
    match (kind, tail) {
        (MapKind::Greedy, Tail::Ones) => {
            terms.push((q.right(), weight * geometric_tail_weight(q, kind)));
        }
        (MapKind::Lazy, Tail::Zeros) => {
            terms.push((0.0, weight * geometric_tail_weight(q, kind)));
        }
        // Zero tails contribute empty indicators for greedy; ones tails sit
        // at `right` with empty indicators for lazy.
        _ => {}
    }
    Ok(assemble(q, kind, &terms))
}

/// Both normalized invariant densities with their truncation metadata.
#[derive(Debug, Clone)]
pub struct DensityPair {
    pub base: BasePair,
    pub h_greedy: StepFunction,
    pub h_lazy: StepFunction,
    pub truncation_n: usize,
    /// L1 bound on the normalization-propagated truncation error, the worse
    /// of the two kinds.
    pub tail_bound_l1: f64,
}

fn normalized_tail(tail: f64, integral: f64) -> f64 {
    if tail == 0.0 {
        0.0
    } else if integral > tail {
        tail / (integral - tail)
    } else {
        f64::INFINITY
    }
}

/// Build and normalize both jump functions at truncation depth `n`.
pub fn invariant_densities(q: &BasePair, n: usize) -> Result<DensityPair> {
    let (jg, tg) = jump_function(q, MapKind::Greedy, n)?;
    let (jl, tl) = jump_function(q, MapKind::Lazy, n)?;
    let tail = normalized_tail(tg, jg.integrate()).max(normalized_tail(tl, jl.integrate()));
    Ok(DensityPair {
        base: *q,
        h_greedy: jg.normalize()?,
        h_lazy: jl.normalize()?,
        truncation_n: n,
        tail_bound_l1: tail,
    })
}

/// Densities at an adaptive depth chosen so the truncation tail bound is
/// below `eps` (exact constructions stop as soon as the orbit pins).
pub fn invariant_densities_auto(q: &BasePair, eps: f64) -> Result<DensityPair> {
    invariant_densities(q, depth_for_tail(q, eps))
}

/// Exact densities from prescribed critical expansions (zero tail bound).
pub fn invariant_densities_from_words(
    q: &BasePair,
    greedy_word: &DigitWord,
    greedy_tail: Tail,
    lazy_word: &DigitWord,
    lazy_tail: Tail,
) -> Result<DensityPair> {
    let jg = jump_function_from_word(q, MapKind::Greedy, greedy_word, greedy_tail)?;
    let jl = jump_function_from_word(q, MapKind::Lazy, lazy_word, lazy_tail)?;
    Ok(DensityPair {
        base: *q,
        h_greedy: jg.normalize()?,
        h_lazy: jl.normalize()?,
        truncation_n: greedy_word.len().max(lazy_word.len()),
        tail_bound_l1: 0.0,
    })
}

impl DensityPair {
    pub fn density(&self, kind: MapKind) -> &StepFunction {
        match kind {
            MapKind::Greedy => &self.h_greedy,
            MapKind::Lazy => &self.h_lazy,
        }
    }

    /// `∫ x h(x) dx` of the chosen normalized density.
    pub fn mean(&self, kind: MapKind) -> f64 {
        self.density(kind).first_moment()
    }

    pub fn operator(&self, kind: MapKind) -> TransferOperator {
        TransferOperator::new(self.base, kind)
    }
}
