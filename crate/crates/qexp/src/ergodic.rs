//! Sampling-based verification layer: Birkhoff averages, the integral-gap
//! ordering of the two invariant means, expansion enumeration and counting,
//! unique-prefix decay, and mixing correlations.
//!
//! Monte Carlo loops are embarrassingly parallel. Determinism is guaranteed
//! by a counter-based seeding contract: sample `i` of a run with seed `s`
//! always draws from stream `i` of a ChaCha generator seeded with `s`, so
//! results are independent of worker count and iteration order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::base::BasePair;
use crate::density::DensityPair;
use crate::error::{Error, Result};
use crate::maps::{admissible_digits, digit_step, evaluate, step, DigitWord, MapKind, Tail};
use crate::stepfn::StepFunction;

/// Hard cap on materialized expansion lists.
pub const ENUM_CAP: usize = 1 << 20;

/// Per-sample generator of the seeding contract.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One Monte Carlo statistic with its provenance.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub base: BasePair,
    pub statistic: String,
    pub n_samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// `(1/n) Σ_{j<n} x_j` along the chosen orbit of `x`.
///
/// As a self-check, the normalized-error identity `θ_j = x_j` (the defining
/// product formula against the orbit point) is validated at three indices
/// capped at `j = 60`; beyond that the comparison scale `A_j` amplifies
/// machine rounding past any useful tolerance.
pub fn birkhoff_average(q: &BasePair, x: f64, n: usize, kind: MapKind) -> Result<f64> {
    if n == 0 {
        return Err(Error::Unsupported("birkhoff average needs n >= 1"));
    }
    let jcap = n.min(60);
    let checks = [1usize, (jcap / 2).max(1), jcap];
    let mut digits = DigitWord::default();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut cur = x;
    let mut amp = 1.0f64;
    for j in 0..n {
        let y = cur - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        if j < jcap {
            let (d, next) = step(q, kind, cur)?;
            digits.push(d);
            amp *= q.q(d);
            if checks.contains(&(j + 1)) {
                // theta_{j+1} = A_{j+1} (x - S_{j+1}) must equal x_{j+1};
                // compare on the unamplified scale.
                let prefix_value = evaluate(q, &digits, Tail::Zeros);
                let gap = (x - prefix_value) - next / amp;
                assert!(
                    gap.abs() <= 1e-6 * x.abs().max(1.0),
                    "normalized-error identity violated at j={} (gap {gap})",
                    j + 1
                );
            }
            cur = next;
        } else {
            let (_, next) = step(q, kind, cur)?;
            cur = next;
        }
    }
    Ok(sum / n as f64)
}

/// Mean and standard error of `n_samples` Birkhoff averages of length
/// `n_orbit`, started from uniform draws on the interval.
pub fn birkhoff_report(
    q: &BasePair,
    kind: MapKind,
    n_orbit: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SampleReport> {
    let averages: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let x = rng.random_range(0.0..q.right());
            birkhoff_average(q, x, n_orbit, kind)
        })
        .collect::<Result<_>>()?;
    let mean = averages.iter().sum::<f64>() / n_samples as f64;
    let var = averages
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / (n_samples as f64 - 1.0).max(1.0);
    Ok(SampleReport {
        base: *q,
        statistic: format!("birkhoff_{kind}"),
        n_samples,
        depth: n_orbit,
        seed,
        mean,
        stderr: (var / n_samples as f64).sqrt(),
    })
}

/// The two invariant means around the Lebesgue midpoint: returns
/// `(mean_greedy, 1/(2(q1-1)), mean_lazy)`, which are strictly ordered for
/// every strict base. Boundary pairs collapse all three to one value and are
/// rejected.
pub fn chebyshev_gap(d: &DensityPair) -> Result<(f64, f64, f64)> {
    if !d.base.is_strict() {
        return Err(Error::NotStrict);
    }
    let midpoint = 1.0 / (2.0 * (d.base.q1() - 1.0));
    Ok((d.mean(MapKind::Greedy), midpoint, d.mean(MapKind::Lazy)))
}

fn enumerate_rec(
    q: &BasePair,
    x: f64,
    depth: usize,
    word: &mut DigitWord,
    out: &mut Vec<DigitWord>,
) -> Result<()> {
    if depth == 0 {
        if out.len() >= ENUM_CAP {
            return Err(Error::BranchOverflow(ENUM_CAP));
        }
        out.push(word.clone());
        return Ok(());
    }
    let branches = admissible_digits(q, x)?;
    for d in branches.iter() {
        let next = digit_step(q, x, d)?;
        word.push(d);
        enumerate_rec(q, next, depth - 1, word, out)?;
        word.pop();
    }
    Ok(())
}

/// Every digit word of length `depth` that keeps the orbit of `x` inside the
/// interval, in lexicographic order. The greedy and lazy words of `x` are
/// the maximum and minimum of this list.
pub fn enumerate_expansions(q: &BasePair, x: f64, depth: usize) -> Result<Vec<DigitWord>> {
    let mut out = Vec::new();
    let mut word = DigitWord::default();
    enumerate_rec(q, x, depth, &mut word, &mut out)?;
    Ok(out)
}

fn count_rec(q: &BasePair, x: f64, depth: usize, limit: usize, acc: &mut usize) -> Result<()> {
    if *acc >= limit {
        return Ok(());
    }
    if depth == 0 {
        *acc += 1;
        return Ok(());
    }
    let branches = admissible_digits(q, x)?;
    for d in branches.iter() {
        let next = digit_step(q, x, d)?;
        count_rec(q, next, depth - 1, limit, acc)?;
        if *acc >= limit {
            return Ok(());
        }
    }
    Ok(())
}

/// Number of expansions of `x` to the given depth, saturating at `limit`.
/// Nothing is materialized, so deep counts with small limits stay cheap.
pub fn count_expansions(q: &BasePair, x: f64, depth: usize, limit: usize) -> Result<usize> {
    let mut acc = 0usize;
    count_rec(q, x, depth, limit, &mut acc)?;
    Ok(acc)
}

/// First step at which the greedy and lazy digits of `x` disagree, which
/// happens exactly when the shared orbit enters the switch overlap
/// `[1/q1, 1/(q0(q1-1))]`. Returns `max_depth` if they agree throughout.
pub fn first_divergence(q: &BasePair, x: f64, max_depth: usize) -> Result<usize> {
    let mut cur = x;
    for j in 0..max_depth {
        if cur >= q.greedy_switch() && cur <= q.lazy_switch() {
            return Ok(j);
        }
        // Outside the overlap both maps agree, so either step works.
        let (_, next) = step(q, MapKind::Greedy, cur)?;
        cur = next;
    }
    Ok(max_depth)
}

/// Fractions of uniform samples whose greedy and lazy digit prefixes agree
/// to each requested depth. Works for every admissible base; the fractions
/// are non-increasing in the depth by construction.
pub fn unique_prefix_fractions(
    q: &BasePair,
    depths: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<SampleReport>> {
    if n_samples == 0 {
        return Err(Error::Unsupported("need at least one sample"));
    }
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let firsts: Vec<usize> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let x = rng.random_range(0.0..q.right());
            first_divergence(q, x, max_depth)
        })
        .collect::<Result<_>>()?;
    Ok(depths
        .iter()
        .map(|&depth| {
            let hits = firsts.iter().filter(|&&f| f >= depth).count();
            let p = hits as f64 / n_samples as f64;
            SampleReport {
                base: *q,
                statistic: "unique_prefix_fraction".into(),
                n_samples,
                depth,
                seed,
                mean: p,
                stderr: (p * (1.0 - p) / n_samples as f64).sqrt(),
            }
        })
        .collect())
}

/// Monte Carlo fraction of points that still look univoque at `depth`
/// (greedy prefix equal to lazy prefix). Only meaningful for strict bases,
/// where it decays to zero; boundary pairs are rejected.
pub fn univoque_fraction(
    q: &BasePair,
    depth: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SampleReport> {
    if !q.is_strict() {
        return Err(Error::NotStrict);
    }
    Ok(unique_prefix_fractions(q, &[depth], n_samples, seed)?.remove(0))
}

/// Exact inverse-CDF sampler over the pieces of a probability step density.
pub struct DensitySampler {
    cumulative: Vec<f64>,
    lefts: Vec<f64>,
    rights: Vec<f64>,
    values: Vec<f64>,
    total: f64,
}

impl DensitySampler {
    pub fn new(h: &StepFunction) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(h.piece_count());
        let (mut lefts, mut rights, mut values) = (Vec::new(), Vec::new(), Vec::new());
        let mut acc = 0.0f64;
        for (l, r, v) in h.pieces() {
            if v < 0.0 {
                return Err(Error::ZeroIntegral(v));
            }
            cumulative.push(acc);
            lefts.push(l);
            rights.push(r);
            values.push(v);
            acc += v * (r - l);
        }
        if acc <= 0.0 {
            return Err(Error::ZeroIntegral(acc));
        }
        Ok(DensitySampler {
            cumulative,
            lefts,
            rights,
            values,
            total: acc,
        })
    }

    /// Map `u` in `[0,1)` through the inverse CDF.
    pub fn sample(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= target)
            .saturating_sub(1);
        let v = self.values[idx];
        if v <= 0.0 {
            return self.lefts[idx];
        }
        let x = self.lefts[idx] + (target - self.cumulative[idx]) / v;
        x.min(self.rights[idx])
    }
}

/// One lag of an estimated autocorrelation.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationPoint {
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
}

/// Estimates `C_n = mu(A ∩ T^{-n} B) - mu(A) mu(B)` for `n = 0..=n_max`
/// under the invariant measure of the chosen map, sampling starts from the
/// invariant density by exact inverse-CDF. Mixing drives `C_n` to zero.
pub fn mixing_correlation(
    d: &DensityPair,
    kind: MapKind,
    a: (f64, f64),
    b: (f64, f64),
    n_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CorrelationPoint>> {
    let q = &d.base;
    for (name, w) in [("A", a), ("B", b)] {
        if !(w.0.is_finite() && w.1.is_finite()) || w.0 > w.1 || w.0 < 0.0 || w.1 > q.right() {
            return Err(Error::OutOfDomain {
                what: if name == "A" { "window A" } else { "window B" },
                value: w.0,
                lo: 0.0,
                hi: q.right(),
            });
        }
    }
    let h = d.density(kind);
    let sampler = DensitySampler::new(h)?;
    let mu_a = h.integral_abs_on(a.0, a.1);
    let mu_b = h.integral_abs_on(b.0, b.1);

    let in_window = |w: (f64, f64), x: f64| x >= w.0 && x < w.1;
    let counts: Vec<u64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>> {
            let mut rng = sample_rng(seed, i);
            let mut x = sampler.sample(rng.random::<f64>());
            let mut hits = vec![0u64; n_max + 1];
            if in_window(a, x) {
                for (n, h) in hits.iter_mut().enumerate() {
                    if n > 0 {
                        let (_, next) = step(q, kind, x)?;
                        x = next;
                    }
                    if in_window(b, x) {
                        *h = 1;
                    }
                }
            }
            Ok(hits)
        })
        .try_reduce(
            || vec![0u64; n_max + 1],
            |mut acc, hits| {
                for (a, h) in acc.iter_mut().zip(hits) {
                    *a += h;
                }
                Ok(acc)
            },
        )?;

    Ok(counts
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let p = c as f64 / n_samples as f64;
            CorrelationPoint {
                n,
                value: p - mu_a * mu_b,
                stderr: (p * (1.0 - p) / n_samples as f64).sqrt().max(
                    // keep a sane floor when the joint event never fires
                    (mu_a * mu_b / n_samples as f64).sqrt(),
                ),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::random_strict_base;
    use crate::density::invariant_densities_auto;
    use crate::maps::expansion;

    fn figure_base() -> BasePair {
        BasePair::new(2.1479, 1.46557).unwrap()
    }

    #[test]
    fn birkhoff_fixed_points() {
        let q = figure_base();
        assert_eq!(
            birkhoff_average(&q, 0.0, 1000, MapKind::Greedy).unwrap(),
            0.0
        );
        let avg = birkhoff_average(&q, q.right(), 1000, MapKind::Lazy).unwrap();
        assert!((avg - q.right()).abs() <= 1e-12);
    }

    #[test]
    fn birkhoff_average_approaches_the_density_mean() {
        let q = figure_base();
        let d = invariant_densities_auto(&q, 1e-10).unwrap();
        let mut rng = sample_rng(2024, 0);
        let x = rng.random_range(0.0..q.right());
        let avg = birkhoff_average(&q, x, 100_000, MapKind::Greedy).unwrap();
        assert!(
            (avg - d.mean(MapKind::Greedy)).abs() < 0.01,
            "avg {avg} vs mean {}",
            d.mean(MapKind::Greedy)
        );
    }

    #[test]
    fn birkhoff_is_cesaro_insensitive_to_the_start() {
        let q = figure_base();
        let n = 100_000usize;
        let mut rng = sample_rng(7, 1);
        let x = rng.random_range(0.0..q.right());
        let shifted = expansion(&q, x, 10, MapKind::Greedy).unwrap().points[10];
        let a = birkhoff_average(&q, x, n, MapKind::Greedy).unwrap();
        let b = birkhoff_average(&q, shifted, n, MapKind::Greedy).unwrap();
        assert!((a - b).abs() <= 10.0 * q.right() / n as f64);
    }

    #[test]
    fn chebyshev_gap_brackets_the_midpoint() {
        let q = figure_base();
        let d = invariant_densities_auto(&q, 1e-10).unwrap();
        let (g, mid, l) = chebyshev_gap(&d).unwrap();
        assert!((mid - 1.07395).abs() < 1e-4);
        assert!(g < mid && mid < l, "({g}, {mid}, {l}) not ordered");

        let b = BasePair::new(3.0, 1.5).unwrap();
        let db = crate::density::invariant_densities(&b, 8).unwrap();
        assert!(matches!(chebyshev_gap(&db), Err(Error::NotStrict)));
        // All three coincide at a boundary pair.
        let mid_b = 1.0 / (2.0 * (b.q1() - 1.0));
        assert!((db.mean(MapKind::Greedy) - mid_b).abs() <= 1e-12);
        assert!((db.mean(MapKind::Lazy) - mid_b).abs() <= 1e-12);
    }

    #[test]
    fn zero_has_exactly_one_expansion() {
        let q = figure_base();
        let words = enumerate_expansions(&q, 0.0, 12).unwrap();
        assert_eq!(words.len(), 1);
        assert!(words[0].digits().iter().all(|&d| d == 0));
    }

    #[test]
    fn overlap_points_branch_and_extremes_are_greedy_and_lazy() {
        let q = figure_base();
        for (i, x) in [0.9, 0.3, 1.3, q.r(), 0.7004].iter().enumerate() {
            let depth = 10;
            let words = enumerate_expansions(&q, *x, depth).unwrap();
            assert!(words.windows(2).all(|w| w[0] < w[1]), "not sorted/deduped");
            let greedy = expansion(&q, *x, depth, MapKind::Greedy).unwrap().digits;
            let lazy = expansion(&q, *x, depth, MapKind::Lazy).unwrap().digits;
            assert_eq!(words.first().unwrap(), &lazy, "lazy not minimal at {x}");
            assert_eq!(words.last().unwrap(), &greedy, "greedy not maximal at {x}");
            if i == 0 {
                assert!(words.len() >= 2, "0.9 sits in the overlap");
            }
        }
    }

    #[test]
    fn branch_counts_grow_with_depth() {
        let q = figure_base();
        for x in [0.9, 0.5, 1.2] {
            let mut prev = 0usize;
            for depth in [2, 4, 6, 8, 10] {
                let n = enumerate_expansions(&q, x, depth).unwrap().len();
                assert!(n >= prev);
                prev = n;
            }
        }
    }

    #[test]
    fn enumeration_overflows_on_maximal_overlap() {
        // At (1.05, 1.1) the overlap spans most of the interval and the
        // expansion tree of an interior point breaches the cap by depth 22.
        let q = BasePair::new(1.05, 1.1).unwrap();
        assert!(matches!(
            enumerate_expansions(&q, 5.0, 22),
            Err(Error::BranchOverflow(_))
        ));
        // Saturating counts stay cheap on the same tree.
        assert_eq!(count_expansions(&q, 5.0, 22, 1000).unwrap(), 1000);
    }

    #[test]
    fn counting_matches_enumeration_and_saturates() {
        let q = figure_base();
        for x in [0.9, 0.4, 1.1] {
            let full = enumerate_expansions(&q, x, 10).unwrap().len();
            assert_eq!(count_expansions(&q, x, 10, usize::MAX).unwrap(), full);
            assert_eq!(count_expansions(&q, x, 10, 2).unwrap(), 2.min(full));
        }
        // Deep counting with a small limit stays cheap.
        assert!(count_expansions(&q, 0.9, 48, 2).unwrap() >= 2);
    }

    #[test]
    fn most_points_have_many_expansions_at_strict_bases() {
        let q = figure_base();
        let n = 200u64;
        let mut multi = 0;
        for i in 0..n {
            let mut rng = sample_rng(88, i);
            let x = rng.random_range(0.0..q.right());
            if count_expansions(&q, x, 32, 2).unwrap() >= 2 {
                multi += 1;
            }
        }
        assert!(multi as f64 / n as f64 >= 0.95, "only {multi}/{n} branch");
    }

    #[test]
    fn unique_prefix_fraction_decays_only_at_strict_bases() {
        let q = figure_base();
        let reports = unique_prefix_fractions(&q, &[0, 8, 16, 32], 2000, 99).unwrap();
        assert_eq!(reports[0].mean, 1.0);
        for w in reports.windows(2) {
            assert!(w[1].mean <= w[0].mean);
        }
        assert!(reports[3].mean < 0.05);

        let b = BasePair::new(3.0, 1.5).unwrap();
        let rb = unique_prefix_fractions(&b, &[64], 2000, 99).unwrap();
        assert_eq!(rb[0].mean, 1.0);
        assert!(matches!(
            univoque_fraction(&b, 64, 100, 1),
            Err(Error::NotStrict)
        ));
    }

    #[test]
    fn univoque_fraction_is_deterministic_under_seed() {
        let q = figure_base();
        let a = univoque_fraction(&q, 16, 500, 424242).unwrap();
        let b = univoque_fraction(&q, 16, 500, 424242).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
        let c = univoque_fraction(&q, 16, 500, 424243).unwrap();
        assert!((a.mean - c.mean).abs() > 0.0, "different seeds, same draw");
    }

    #[test]
    fn sampler_reproduces_the_density_mass() {
        let q = figure_base();
        let d = invariant_densities_auto(&q, 1e-10).unwrap();
        let sampler = DensitySampler::new(&d.h_greedy).unwrap();
        let n = 20_000u64;
        let mut below = 0usize;
        let cut = 0.9;
        for i in 0..n {
            let mut rng = sample_rng(5150, i);
            let x = sampler.sample(rng.random::<f64>());
            assert!((0.0..=q.r()).contains(&x));
            if x < cut {
                below += 1;
            }
        }
        let want = d.h_greedy.integral_abs_on(0.0, cut);
        let got = below as f64 / n as f64;
        assert!((got - want).abs() < 0.015, "{got} vs {want}");
    }

    #[test]
    fn correlation_identities_at_lag_zero_and_full_window() {
        let q = figure_base();
        let d = invariant_densities_auto(&q, 1e-10).unwrap();
        // B = full support: C_n = mu(A)(1 - mu(support)) ~ 0 for every lag.
        let c = mixing_correlation(&d, MapKind::Greedy, (0.0, 0.7), (0.0, q.r()), 10, 4000, 31)
            .unwrap();
        for pt in &c {
            assert!(pt.value.abs() <= 3.0 * pt.stderr + 1e-9, "lag {}", pt.n);
        }
        // Disjoint windows at lag 0: the joint event is impossible.
        let c0 =
            mixing_correlation(&d, MapKind::Greedy, (0.0, 0.5), (0.6, 1.0), 0, 2000, 32).unwrap();
        let h = &d.h_greedy;
        let expect = -h.integral_abs_on(0.0, 0.5) * h.integral_abs_on(0.6, 1.0);
        assert!((c0[0].value - expect).abs() <= 1e-12);
    }

    #[test]
    fn correlations_decay_into_the_noise_by_lag_thirty() {
        let q = figure_base();
        let d = invariant_densities_auto(&q, 1e-10).unwrap();
        let half = (0.0, q.r() / 2.0);
        let pts = mixing_correlation(&d, MapKind::Greedy, half, half, 30, 20_000, 61).unwrap();
        // Lag zero carries the full variance; late lags are indistinguishable
        // from independence.
        assert!(pts[0].value > 10.0 * pts[0].stderr);
        for pt in pts.iter().filter(|p| p.n >= 25) {
            assert!(
                pt.value.abs() <= 3.0 * pt.stderr,
                "lag {} correlation {} above noise {}",
                pt.n,
                pt.value,
                3.0 * pt.stderr
            );
        }
    }

    #[test]
    fn random_strict_bases_have_ordered_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(20_260_811);
        for _ in 0..20 {
            let q = random_strict_base(&mut rng);
            let d = invariant_densities_auto(&q, 1e-10).unwrap();
            let (g, mid, l) = chebyshev_gap(&d).unwrap();
            assert!(g < mid && mid < l, "violated at {q}: ({g}, {mid}, {l})");
        }
    }
}
