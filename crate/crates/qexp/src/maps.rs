//! The greedy and lazy interval maps, digit words, expansion evaluation, and
//! the conjugated map on `[0,1]`.
//!
//! Both maps act on `I_Q = [0, 1/(q1-1)]` with the two affine branches
//! `x -> q0*x` (digit 0) and `x -> q1*x - 1` (digit 1). The greedy map takes
//! digit 1 as soon as it can (`x >= 1/q1`), the lazy map takes digit 0 as
//! long as it can (`x <= 1/(q0*(q1-1))`). Branch selection at the switch
//! points uses exact comparisons, matching the half-open branch intervals.

use crate::base::BasePair;
use crate::error::{Error, Result};

/// Absolute tolerance for domain membership and boundary drift clamping.
pub const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Greedy,
    Lazy,
}

impl std::fmt::Display for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MapKind::Greedy => "greedy",
            MapKind::Lazy => "lazy",
        })
    }
}

/// Constant tail appended to a finite digit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Zeros,
    Ones,
}

/// A finite word over the digit alphabet `{0, 1}`.
///
/// Ordering is lexicographic, which is the order used to compare greedy and
/// lazy expansions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DigitWord {
    digits: Vec<u8>,
}

impl DigitWord {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| d > 1) {
            return Err(Error::Parse(format!("digit {bad} is not 0 or 1")));
        }
        Ok(DigitWord { digits })
    }

    /// Parse a string of `0`/`1` characters; the empty string is the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let mut digits = Vec::with_capacity(text.len());
        for c in text.trim().chars() {
            match c {
                '0' => digits.push(0),
                '1' => digits.push(1),
                other => return Err(Error::Parse(format!("bad digit character {other:?}"))),
            }
        }
        Ok(DigitWord { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub(crate) fn push(&mut self, digit: u8) {
        debug_assert!(digit <= 1);
        self.digits.push(digit);
    }

    pub(crate) fn pop(&mut self) {
        self.digits.pop();
    }
}

impl std::fmt::Display for DigitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A finite trajectory under one of the two maps: points `x_0..x_n` together
/// with the `n` digits emitted along the way.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub base: BasePair,
    pub start: f64,
    pub points: Vec<f64>,
    pub digits: DigitWord,
    pub map_kind: MapKind,
}

fn check_in(x: f64, lo: f64, hi: f64, what: &'static str) -> Result<f64> {
    if !x.is_finite() || x < lo - DOMAIN_TOL || x > hi + DOMAIN_TOL {
        return Err(Error::OutOfDomain {
            what,
            value: x,
            lo,
            hi,
        });
    }
    Ok(x.clamp(lo, hi))
}

/// Clamp boundary drift: affine steps amplify representation error, so
/// values within [`DOMAIN_TOL`] of an endpoint snap back onto it.
fn clamp_drift(x: f64, hi: f64) -> f64 {
    if x < 0.0 {
        debug_assert!(x >= -DOMAIN_TOL);
        0.0
    } else if x > hi {
        debug_assert!(x <= hi + DOMAIN_TOL);
        hi
    } else {
        x
    }
}

/// One greedy step: digit 0 with `x -> q0*x` below `1/q1`, digit 1 with
/// `x -> q1*x - 1` from `1/q1` on.
pub fn greedy_step(q: &BasePair, x: f64) -> Result<(u8, f64)> {
    let x = check_in(x, 0.0, q.right(), "x")?;
    if x < q.greedy_switch() {
        Ok((0, clamp_drift(q.q0() * x, q.right())))
    } else {
        Ok((1, clamp_drift(q.q1() * x - 1.0, q.right())))
    }
}

/// One lazy step: digit 0 up to and including `1/(q0*(q1-1))`, digit 1 above.
pub fn lazy_step(q: &BasePair, x: f64) -> Result<(u8, f64)> {
    let x = check_in(x, 0.0, q.right(), "x")?;
    if x <= q.lazy_switch() {
        Ok((0, clamp_drift(q.q0() * x, q.right())))
    } else {
        Ok((1, clamp_drift(q.q1() * x - 1.0, q.right())))
    }
}

pub fn step(q: &BasePair, kind: MapKind, x: f64) -> Result<(u8, f64)> {
    match kind {
        MapKind::Greedy => greedy_step(q, x),
        MapKind::Lazy => lazy_step(q, x),
    }
}

/// Follow a chosen digit from `x` regardless of which map would pick it.
/// Errors if that branch throws the point out of the interval, i.e. if the
/// digit is not admissible at `x`.
pub fn digit_step(q: &BasePair, x: f64, digit: u8) -> Result<f64> {
    let x = check_in(x, 0.0, q.right(), "x")?;
    let v = if digit == 0 {
        q.q0() * x
    } else {
        q.q1() * x - 1.0
    };
    if v < -DOMAIN_TOL || v > q.right() + DOMAIN_TOL {
        return Err(Error::OutOfDomain {
            what: "digit image",
            value: v,
            lo: 0.0,
            hi: q.right(),
        });
    }
    Ok(clamp_drift(v, q.right()))
}

/// Iterate the chosen map `n` times from `x`, recording points and digits.
pub fn expansion(q: &BasePair, x: f64, n: usize, kind: MapKind) -> Result<OrbitRecord> {
    let mut cur = check_in(x, 0.0, q.right(), "x")?;
    let mut points = Vec::with_capacity(n + 1);
    let mut digits = DigitWord::default();
    points.push(cur);
    for _ in 0..n {
        let (d, next) = step(q, kind, cur)?;
        digits.push(d);
        points.push(next);
        cur = next;
    }
    Ok(OrbitRecord {
        base: *q,
        start: points[0],
        points,
        digits,
        map_kind: kind,
    })
}

/// `pi(c)` for the sequence `word` followed by the constant `tail`, without
/// requiring an admissible pair. Prefix terms use compensated summation; the
/// ones tail is the closed-form geometric remainder.
pub(crate) fn pi_value(q0: f64, q1: f64, word: &[u8], tail: Tail) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut add = |term: f64| {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    let mut amp = 1.0f64;
    for &d in word {
        amp *= if d == 0 { q0 } else { q1 };
        if d == 1 {
            add(1.0 / amp);
        }
    }
    if tail == Tail::Ones {
        add(1.0 / (amp * (q1 - 1.0)));
    }
    sum
}

/// Value of the expansion `word` followed by the constant `tail`.
pub fn evaluate(q: &BasePair, word: &DigitWord, tail: Tail) -> f64 {
    pi_value(q.q0(), q.q1(), word.digits(), tail)
}

/// The digits that can legally be emitted from `x`: digit 0 needs
/// `q0*x <= right`, digit 1 needs `q1*x - 1 >= 0`. At least one always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibleDigits {
    pub zero: bool,
    pub one: bool,
}

impl AdmissibleDigits {
    pub fn count(&self) -> usize {
        usize::from(self.zero) + usize::from(self.one)
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> {
        let (zero, one) = (self.zero, self.one);
        [0u8, 1u8]
            .into_iter()
            .filter(move |&d| (d == 0 && zero) || (d == 1 && one))
    }
}

pub fn admissible_digits(q: &BasePair, x: f64) -> Result<AdmissibleDigits> {
    let x = check_in(x, 0.0, q.right(), "x")?;
    Ok(AdmissibleDigits {
        zero: x <= q.lazy_switch(),
        one: x >= q.greedy_switch(),
    })
}

/// `H^k(t)` for the increasing partial inverse `H(t) = (1+t)/q1` of the
/// greedy map. `H` fixes `right` and `G(H(t)) = t`.
pub fn partial_inverse_h(q: &BasePair, t: f64, k: usize) -> Result<f64> {
    let mut v = check_in(t, 0.0, q.right(), "t")?;
    for _ in 0..k {
        v = clamp_drift((1.0 + v) / q.q1(), q.right());
    }
    Ok(v)
}

/// The greedy map conjugated to `[0,1]` by `x = u/(q1-1)`: expansion by `q0`
/// below `a1 = (q1-1)/q1` and by `q1` (through `u -> q1*u - (q1-1)`) above.
pub fn conjugate_map(q: &BasePair, u: f64) -> Result<f64> {
    let u = check_in(u, 0.0, 1.0, "u")?;
    let a1 = (q.q1() - 1.0) / q.q1();
    let v = if u < a1 {
        q.q0() * u
    } else {
        q.q1() * u - (q.q1() - 1.0)
    };
    Ok(clamp_drift(v, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{random_strict_base, solve_base};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn figure_base() -> BasePair {
        BasePair::new(2.1479, 1.46557).unwrap()
    }

    /// The base whose critical points have expansions 1110^inf and 001^inf.
    fn solved_figure_base() -> BasePair {
        solve_base(
            &DigitWord::parse("111").unwrap(),
            Tail::Zeros,
            &DigitWord::parse("00").unwrap(),
            Tail::Ones,
        )
        .unwrap()
    }

    #[test]
    fn greedy_step_examples() {
        let q = figure_base();
        let (d, y) = greedy_step(&q, 1.465573).unwrap();
        assert_eq!(d, 1);
        assert_relative_eq!(y, q.q1() * 1.465573 - 1.0, max_relative = 1e-15);
        assert!((y - 1.1479).abs() < 1e-4);

        assert_eq!(greedy_step(&q, 0.0).unwrap(), (0, 0.0));

        let (d, y) = greedy_step(&q, 0.5).unwrap();
        assert_eq!(d, 0);
        assert_relative_eq!(y, 1.07395, max_relative = 1e-12);

        assert!(greedy_step(&q, q.right() + 1e-6).is_err());
        assert!(greedy_step(&q, f64::NAN).is_err());
    }

    #[test]
    fn lazy_step_examples() {
        let q = figure_base();
        // The right endpoint is fixed by branch 1.
        let (d, y) = lazy_step(&q, q.right()).unwrap();
        assert_eq!(d, 1);
        assert_relative_eq!(y, q.right(), max_relative = 1e-12);

        let (d, y) = lazy_step(&q, 0.9).unwrap();
        assert_eq!(d, 0);
        assert_relative_eq!(y, 1.93311, max_relative = 1e-12);

        let q = BasePair::new(3.0, 1.5).unwrap();
        let (d, y) = lazy_step(&q, 0.7).unwrap();
        assert_eq!(d, 1);
        assert_relative_eq!(y, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn expansion_of_critical_points_at_solved_base() {
        let q = solved_figure_base();
        let greedy = expansion(&q, q.r(), 6, MapKind::Greedy).unwrap();
        assert_eq!(greedy.digits.to_string(), "111000");
        let lazy = expansion(&q, q.ell(), 5, MapKind::Lazy).unwrap();
        assert_eq!(lazy.digits.to_string(), "00111");
    }

    #[test]
    fn expansion_from_zero_is_all_zeros() {
        let q = figure_base();
        for kind in [MapKind::Greedy, MapKind::Lazy] {
            let orbit = expansion(&q, 0.0, 9, kind).unwrap();
            assert!(orbit.digits.digits().iter().all(|&d| d == 0));
            assert!(orbit.points.iter().all(|&p| p == 0.0));
        }
    }

    #[test]
    fn evaluate_tail_closed_forms() {
        let q = figure_base();
        assert_eq!(evaluate(&q, &DigitWord::default(), Tail::Ones), q.right());
        assert_eq!(evaluate(&q, &DigitWord::default(), Tail::Zeros), 0.0);

        let solved = solved_figure_base();
        let w111 = DigitWord::parse("111").unwrap();
        let w00 = DigitWord::parse("00").unwrap();
        assert!((evaluate(&solved, &w111, Tail::Zeros) - solved.r()).abs() <= 1e-10);
        assert!((evaluate(&solved, &w00, Tail::Ones) - solved.ell()).abs() <= 1e-10);
        // The printed five-digit base satisfies the same identities loosely.
        assert!((evaluate(&q, &w111, Tail::Zeros) - 1.465573).abs() < 1e-4);
        assert!((evaluate(&q, &w00, Tail::Ones) - 0.46558).abs() < 1e-4);
    }

    #[test]
    fn admissible_digit_examples() {
        let q = figure_base();
        assert_eq!(
            admissible_digits(&q, 0.9).unwrap(),
            AdmissibleDigits {
                zero: true,
                one: true
            }
        );
        assert_eq!(
            admissible_digits(&q, 0.0).unwrap(),
            AdmissibleDigits {
                zero: true,
                one: false
            }
        );
        assert_eq!(
            admissible_digits(&q, q.right()).unwrap(),
            AdmissibleDigits {
                zero: false,
                one: true
            }
        );
        // At a boundary pair the overlap degenerates to the single switch point.
        let b = BasePair::new(3.0, 1.5).unwrap();
        assert_eq!(admissible_digits(&b, b.greedy_switch()).unwrap().count(), 2);
        assert_eq!(admissible_digits(&b, 0.5).unwrap().count(), 1);
        assert_eq!(admissible_digits(&b, 1.0).unwrap().count(), 1);
    }

    #[test]
    fn partial_inverse_fixes_right_and_inverts_greedy() {
        let q = figure_base();
        for k in [0, 1, 5, 40] {
            assert!((partial_inverse_h(&q, q.right(), k).unwrap() - q.right()).abs() <= 1e-12);
        }
        assert_eq!(partial_inverse_h(&q, 0.0, 1).unwrap(), q.greedy_switch());
        // H^k([0, r]) exhausts [0, right): the iterates converge to right.
        assert!((partial_inverse_h(&q, 0.0, 200).unwrap() - q.right()).abs() <= 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = rng.random_range(0.0..q.right());
            let h = partial_inverse_h(&q, t, 1).unwrap();
            let (d, back) = greedy_step(&q, h).unwrap();
            assert_eq!(d, 1);
            assert!((back - t).abs() <= 1e-12);
            assert!(h >= t);
        }
    }

    #[test]
    fn conjugate_map_examples() {
        let q = figure_base();
        assert_eq!(conjugate_map(&q, 0.0).unwrap(), 0.0);
        let a1 = (q.q1() - 1.0) / q.q1();
        assert!(conjugate_map(&q, a1).unwrap().abs() <= 1e-15);
        let v = conjugate_map(&q, 0.5).unwrap();
        assert_relative_eq!(v, q.q1() * 0.5 - (q.q1() - 1.0), max_relative = 1e-15);
        assert!((v - 0.26722).abs() < 1e-5);
        assert!(conjugate_map(&q, 1.5).is_err());
    }

    #[test]
    fn conjugacy_identity_holds_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let q = random_strict_base(&mut rng);
            let phi = |u: f64| u * q.right();
            for _ in 0..200 {
                let u = rng.random_range(0.0..1.0);
                let lhs = phi(conjugate_map(&q, u).unwrap());
                let (_, rhs) = greedy_step(&q, phi(u).min(q.right())).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12,
                    "conjugacy gap {} at u={u} for {q}",
                    (lhs - rhs).abs()
                );
            }
        }
    }

    #[test]
    fn remainder_identity_along_greedy_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let q = random_strict_base_mid(&mut rng);
            let x = rng.random_range(0.0..q.right());
            let orbit = expansion(&q, x, 40, MapKind::Greedy).unwrap();
            let mut amp = 1.0f64;
            for n in 1..=40usize {
                amp *= q.q(orbit.digits.digits()[n - 1]);
                let prefix = DigitWord::new(orbit.digits.digits()[..n].to_vec()).unwrap();
                let approx_x = evaluate(&q, &prefix, Tail::Zeros);
                let lhs = x - approx_x;
                let rhs = orbit.points[n] / amp;
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * x.max(1.0),
                    "remainder identity off by {} at n={n}",
                    (lhs - rhs).abs()
                );
                assert!(lhs.abs() <= q.right() / q.min_q().powi(n as i32) + 1e-9);
            }
        }
    }

    fn random_strict_base_mid(rng: &mut impl Rng) -> BasePair {
        crate::base::random_strict_base_in(rng, (1.3, 2.5), 1.3, (0.1, 0.9))
    }

    proptest! {
        #[test]
        fn orbits_stay_confined(seed in 0u64..500, steps in 1usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_strict_base(&mut rng);
            let x = rng.random_range(0.0..q.right());
            for kind in [MapKind::Greedy, MapKind::Lazy] {
                let orbit = expansion(&q, x, steps, kind).unwrap();
                for &p in &orbit.points {
                    prop_assert!((0.0..=q.right()).contains(&p));
                }
                // The recurrence x_{k+1} = q_d * x_k - d holds up to the
                // boundary drift clamp.
                for k in 0..steps {
                    let d = orbit.digits.digits()[k];
                    let raw = q.q(d) * orbit.points[k] - f64::from(d);
                    prop_assert!((orbit.points[k + 1] - raw).abs() <= DOMAIN_TOL);
                }
            }
        }

        #[test]
        fn admissible_digits_never_empty(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_strict_base(&mut rng);
            let x = rng.random_range(0.0..=q.right());
            prop_assert!(admissible_digits(&q, x).unwrap().count() >= 1);
        }
    }
}
