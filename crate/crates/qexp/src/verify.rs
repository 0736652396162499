//! The runnable acceptance checklist behind `qexp verify` and the
//! `acceptance` integration suite: ten numbered criteria, each with pinned
//! tolerances and, where stated, a wall-clock budget.
//!
//! Every random quantity is driven by the caller's seed through the
//! counter-based sampling contract, so a run is reproducible bit for bit.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::base::{random_strict_base, solve_base, BasePair};
use crate::cylinders::{full_return, image_interval, level_partition, ImageInterval};
use crate::density::{
    depth_for_tail, invariant_densities, invariant_densities_auto, invariant_densities_from_words,
    jump_function,
};
use crate::ergodic::{
    birkhoff_report, chebyshev_gap, count_expansions, enumerate_expansions, sample_rng,
    unique_prefix_fractions,
};
use crate::maps::{expansion, DigitWord, MapKind, Tail};
use crate::stepfn::StepFunction;
use crate::transfer::TransferOperator;

pub const DEFAULT_SEED: u64 = 7;

/// Sample-count profile: `Desk` runs the full numbers the tolerances were
/// calibrated for; `Ci` shrinks the Monte Carlo loops for quick smoke runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Ci,
}

impl Profile {
    fn samples(&self, desk: usize) -> usize {
        match self {
            Profile::Desk => desk,
            Profile::Ci => (desk / 10).max(10),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:02} {:<22} {} ({:.2} s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

struct Check {
    passed: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            passed: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.passed = false;
            self.notes.push(format!("FAILED: {what}"));
        }
    }

    fn note(&mut self, what: String) {
        self.notes.push(what);
    }

    fn finish(
        self,
        id: usize,
        name: &'static str,
        started: Instant,
        budget: Option<f64>,
    ) -> CriterionReport {
        let seconds = started.elapsed().as_secs_f64();
        let mut passed = self.passed;
        let mut detail = self.notes.join("; ");
        if let Some(b) = budget {
            if seconds >= b {
                passed = false;
                detail = format!("over budget {b} s; {detail}");
            }
        }
        CriterionReport {
            id,
            name,
            passed,
            detail,
            seconds,
            budget_seconds: budget,
        }
    }
}

fn mix_seed(seed: u64, id: u64) -> u64 {
    seed ^ id.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn figure_base() -> BasePair {
    BasePair::new(2.1479, 1.46557).expect("published pair is admissible")
}

fn figure_words() -> (DigitWord, DigitWord) {
    (
        DigitWord::parse("111").expect("literal"),
        DigitWord::parse("00").expect("literal"),
    )
}

/// Figure reproduction: the greedy density of the base prescribed by the
/// critical expansions (1110^inf, 001^inf) has exactly three support pieces
/// with the published values and breakpoints. The five-digit published pair
/// is the display rounding of that base, so the solved pair is checked
/// against it first.
pub fn criterion_01_figure_density() -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let (wg, wl) = figure_words();
    match solve_base(&wg, Tail::Zeros, &wl, Tail::Ones) {
        Err(e) => c.require(false, &format!("solve_base failed: {e}")),
        Ok(q) => {
            c.require(
                (q.q0() - 2.1479).abs() <= 5e-5 && (q.q1() - 1.46557).abs() <= 5e-5,
                "solved base differs from the published pair",
            );
            match invariant_densities_from_words(&q, &wg, Tail::Zeros, &wl, Tail::Ones) {
                Err(e) => c.require(false, &format!("density construction failed: {e}")),
                Ok(pair) => {
                    let h = &pair.h_greedy;
                    let support: Vec<(f64, f64, f64)> =
                        h.pieces().filter(|&(_, _, v)| v > 0.0).collect();
                    c.require(support.len() == 3, "support is not three pieces");
                    let want_values = [0.8369, 0.6554, 0.3896];
                    let want_breaks = [0.682328, 1.1479, 1.465573];
                    for (i, &(_, right, v)) in support.iter().enumerate() {
                        c.require(
                            (v - want_values[i]).abs() <= 5e-4,
                            &format!("value {i} = {v}"),
                        );
                        c.require(
                            (right - want_breaks[i]).abs() <= 5e-6,
                            &format!("breakpoint {i} = {right}"),
                        );
                    }
                    c.note(format!(
                        "base ({:.6}, {:.6}), values ({:.4}, {:.4}, {:.4})",
                        q.q0(),
                        q.q1(),
                        support[0].2,
                        support[1].2,
                        support[2].2
                    ));
                }
            }
        }
    }
    c.finish(1, "figure-density", started, Some(1.0))
}

/// Boundary family: pairs on q0 + q1 = q0*q1 have uniform invariant
/// densities and the uniform density is already the transfer fixed point.
pub fn criterion_02_boundary_family() -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    for q0 in [1.5, 2.0, 2.5, 3.0, 4.0] {
        let q1 = q0 / (q0 - 1.0);
        match BasePair::new(q0, q1) {
            Err(e) => c.require(false, &format!("({q0}, {q1}) rejected: {e}")),
            Ok(q) => {
                match invariant_densities(&q, 64) {
                    Err(e) => c.require(false, &format!("densities failed at {q}: {e}")),
                    Ok(pair) => {
                        for kind in [MapKind::Greedy, MapKind::Lazy] {
                            let h = pair.density(kind);
                            let uniform_gap = h
                                .pieces()
                                .map(|(_, _, v)| (v - (q.q1() - 1.0)).abs())
                                .fold(0.0, f64::max);
                            c.require(
                                uniform_gap <= 1e-9,
                                &format!("{kind} density not uniform at {q} (gap {uniform_gap})"),
                            );
                        }
                    }
                }
                let uniform = StepFunction::constant(q.right(), q.q1() - 1.0);
                for kind in [MapKind::Greedy, MapKind::Lazy] {
                    match TransferOperator::new(q, kind).iterate(&uniform, 2) {
                        Err(e) => c.require(false, &format!("iterate failed: {e}")),
                        Ok(trace) => c.require(
                            trace.steps[0].l1_increment <= 1e-12,
                            &format!(
                                "{kind} increment {} after one step at {q}",
                                trace.steps[0].l1_increment
                            ),
                        ),
                    }
                }
            }
        }
    }
    c.note("5 boundary pairs uniform, one-step fixed".into());
    c.finish(2, "boundary-family", started, Some(1.0))
}

/// Fixed-point identity: truncated jump functions are near-fixed points of
/// their operators, with defect controlled by twice the truncation tail.
pub fn criterion_03_fixed_point_residual(seed: u64) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 3));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let q = random_strict_base(&mut rng);
        let n = depth_for_tail(&q, 1e-10);
        for kind in [MapKind::Greedy, MapKind::Lazy] {
            match jump_function(&q, kind, n) {
                Err(e) => c.require(false, &format!("jump function failed at {q}: {e}")),
                Ok((h, tail)) => match TransferOperator::new(q, kind).residual(&h) {
                    Err(e) => c.require(false, &format!("residual failed at {q}: {e}")),
                    Ok(res) => {
                        worst = worst.max(res - 2.0 * tail);
                        c.require(
                            res <= 2.0 * tail + 1e-9,
                            &format!("residual {res} > 2*{tail} + 1e-9 for {kind} at {q}"),
                        );
                    }
                },
            }
        }
    }
    c.note(format!(
        "20 bases, both kinds, worst residual excess {worst:.2e}"
    ));
    c.finish(3, "fixed-point-residual", started, None)
}

/// Transfer convergence at the published pair: sixty greedy iterations from
/// the uniform density reach the constructed invariant density in L1, with
/// eventually monotone increments and vanishing mass on the dead zone.
pub fn criterion_04_transfer_convergence() -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let q = figure_base();
    let op = TransferOperator::new(q, MapKind::Greedy);
    let uniform = StepFunction::constant(q.right(), 1.0 / q.right());
    match (op.iterate(&uniform, 60), invariant_densities_auto(&q, 1e-9)) {
        (Ok(trace), Ok(pair)) => {
            let gap = trace
                .final_density
                .l1_distance(&pair.h_greedy)
                .unwrap_or(f64::INFINITY);
            c.require(gap <= 1e-3, &format!("L1 gap to the jump density is {gap}"));
            let incs: Vec<f64> = trace.steps.iter().map(|s| s.l1_increment).collect();
            let last_rise = incs
                .windows(2)
                .rposition(|w| w[1] > w[0] + 1e-15)
                .map_or(0, |i| i + 1);
            c.require(
                last_rise <= incs.len().saturating_sub(20),
                &format!(
                    "increments still rising at step {last_rise} of {}",
                    incs.len()
                ),
            );
            let mass = trace
                .steps
                .last()
                .map_or(f64::INFINITY, |s| s.mass_outside_support);
            c.require(mass < 1e-6, &format!("mass on [r, right] is {mass}"));
            c.note(format!(
                "gap {gap:.2e}, monotone from step {last_rise}, dead-zone mass {mass:.2e}"
            ));
        }
        (Err(e), _) => c.require(false, &format!("iteration failed: {e}")),
        (_, Err(e)) => c.require(false, &format!("density failed: {e}")),
    }
    c.finish(4, "transfer-convergence", started, Some(10.0))
}

fn predicted_full_return(q: &BasePair, image: ImageInterval) -> Option<usize> {
    match image {
        ImageInterval::Empty => None,
        ImageInterval::Full => Some(1),
        ImageInterval::RightOpen(xi) => {
            if (xi - q.r()).abs() <= 1e-12 {
                return Some(0);
            }
            let ok = |m: i64| m >= 0 && q.q0().powi(m as i32) * xi >= q.r() - 1e-12;
            let mut m = ((q.r() / xi).ln() / q.q0().ln()).ceil() as i64;
            m = m.max(1);
            while m > 1 && ok(m - 1) {
                m -= 1;
            }
            while !ok(m) {
                m += 1;
            }
            Some(m as usize)
        }
    }
}

/// Cylinder partitions: the level sets tile the interval, images obey the
/// full/right-open/empty trichotomy, the level-two closed forms hold, and
/// the full-return depth matches its closed-form prediction.
pub fn criterion_05_cylinder_partitions(seed: u64) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 5));
    let bases: Vec<BasePair> = (0..10).map(|_| random_strict_base(&mut rng)).collect();

    for q in &bases {
        for n in [1usize, 3, 6, 9, 12] {
            match level_partition(q, n) {
                Err(e) => c.require(false, &format!("partition failed: {e}")),
                Ok(level) => {
                    let contiguous = level[0].left == 0.0
                        && level.last().unwrap().right == q.right()
                        && level.windows(2).all(|w| w[0].right == w[1].left);
                    c.require(contiguous, &format!("level {n} not contiguous at {q}"));
                    let total: f64 = level.iter().map(|c| c.domain_length()).sum();
                    c.require(
                        (total - q.right()).abs() <= 1e-9,
                        &format!("level {n} length {total} vs {}", q.right()),
                    );
                    for cyl in &level {
                        let all_ones = cyl.word.digits().iter().all(|&d| d == 1);
                        let ok = match cyl.image {
                            ImageInterval::Full => all_ones,
                            ImageInterval::RightOpen(xi) => {
                                !all_ones && xi > 0.0 && xi <= q.right()
                            }
                            ImageInterval::Empty => false,
                        };
                        c.require(ok, &format!("trichotomy broken for {}", cyl.word));
                    }
                }
            }
        }
    }

    // Level-two closed forms at the published pair.
    let q = figure_base();
    let (q0, q1) = (q.q0(), q.q1());
    match level_partition(&q, 2) {
        Err(e) => c.require(false, &format!("level 2 failed: {e}")),
        Ok(l2) => {
            let ends = [
                1.0 / (q0 * q1),
                1.0 / q1,
                1.0 / q1 + 1.0 / (q1 * q1),
                q.right(),
            ];
            let images = [q.r(), q0 - 1.0, q.r(), q.right()];
            for (i, cyl) in l2.iter().enumerate() {
                c.require(
                    (cyl.right - ends[i]).abs() <= 1e-12,
                    &format!("I end {i} = {}", cyl.right),
                );
                c.require(
                    (cyl.image.right_end(&q) - images[i]).abs() <= 1e-12,
                    &format!("J end {i} = {}", cyl.image.right_end(&q)),
                );
            }
            c.require(l2[3].image == ImageInterval::Full, "J_11 is not full");
        }
    }

    // Full returns against the closed-form prediction.
    let mut checked = 0usize;
    let mut word_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 55));
    while checked < 100 {
        let q = bases[word_rng.random_range(0..bases.len())];
        let len = word_rng.random_range(1..=10usize);
        let digits: Vec<u8> = (0..len).map(|_| word_rng.random_range(0..=1u8)).collect();
        let word = DigitWord::new(digits).expect("binary digits");
        let image = image_interval(&q, &word);
        let Some(want) = predicted_full_return(&q, image) else {
            continue;
        };
        match full_return(&q, &word, 400) {
            Ok(got) => c.require(
                got == want,
                &format!("full_return({word}) = {got}, predicted {want} at {q}"),
            ),
            Err(e) => c.require(false, &format!("full_return({word}) failed: {e}")),
        }
        checked += 1;
    }
    c.note("10 bases, levels <= 12, 100 full-return words".into());
    c.finish(5, "cylinder-partitions", started, None)
}

/// Birkhoff agreement: orbit averages reproduce the invariant means.
pub fn criterion_06_birkhoff(seed: u64, profile: Profile) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let q = figure_base();
    let n_orbit = profile.samples(100_000);
    let n_samples = profile.samples(50).min(50);
    match invariant_densities_auto(&q, 1e-10) {
        Err(e) => c.require(false, &format!("densities failed: {e}")),
        Ok(pair) => {
            for kind in [MapKind::Greedy, MapKind::Lazy] {
                match birkhoff_report(&q, kind, n_orbit, n_samples, mix_seed(seed, 6)) {
                    Err(e) => c.require(false, &format!("sampling failed: {e}")),
                    Ok(report) => {
                        let gap = (report.mean - pair.mean(kind)).abs();
                        c.require(
                            gap <= 4.0 * report.stderr,
                            &format!(
                                "{kind}: |{:.6} - {:.6}| > 4 * {:.2e}",
                                report.mean,
                                pair.mean(kind),
                                report.stderr
                            ),
                        );
                        c.note(format!(
                            "{kind} gap {:.2e} (stderr {:.2e})",
                            gap, report.stderr
                        ));
                    }
                }
            }
        }
    }
    c.finish(6, "birkhoff-agreement", started, Some(20.0))
}

/// Integral gap: the greedy mean sits strictly below the Lebesgue midpoint
/// and the lazy mean strictly above, with quantitative margins.
pub fn criterion_07_chebyshev_gap(seed: u64) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 7));
    let mut min_margin = f64::INFINITY;
    for _ in 0..20 {
        let q = random_strict_base(&mut rng);
        match invariant_densities_auto(&q, 1e-10).and_then(|d| chebyshev_gap(&d)) {
            Err(e) => c.require(false, &format!("gap failed at {q}: {e}")),
            Ok((g, mid, l)) => {
                let margin = (mid - g).min(l - mid);
                min_margin = min_margin.min(margin);
                c.require(
                    margin > 1e-6,
                    &format!("margin {margin} at {q}: ({g}, {mid}, {l})"),
                );
            }
        }
    }
    c.note(format!("20 strict bases, smallest margin {min_margin:.3e}"));
    c.finish(7, "chebyshev-gap", started, None)
}

/// Unique-prefix decay: at the published strict pair the fraction of
/// unique-to-depth points collapses with depth; at a boundary pair it stays
/// at one.
pub fn criterion_08_univoque_decay(seed: u64, profile: Profile) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let q = figure_base();
    let n = profile.samples(10_000);
    match unique_prefix_fractions(&q, &[8, 16, 32, 64], n, mix_seed(seed, 8)) {
        Err(e) => c.require(false, &format!("sampling failed: {e}")),
        Ok(reports) => {
            for w in reports.windows(2) {
                c.require(
                    w[1].mean <= w[0].mean,
                    &format!("fraction rose from depth {} to {}", w[0].depth, w[1].depth),
                );
            }
            let at64 = reports.last().unwrap().mean;
            c.require(at64 < 0.01, &format!("fraction {at64} at depth 64"));
            c.note(format!(
                "strict fractions {:?}",
                reports.iter().map(|r| r.mean).collect::<Vec<_>>()
            ));
        }
    }
    let b = BasePair::new(3.0, 1.5).expect("boundary pair");
    match unique_prefix_fractions(&b, &[64], n, mix_seed(seed, 88)) {
        Err(e) => c.require(false, &format!("boundary sampling failed: {e}")),
        Ok(reports) => {
            c.require(
                reports[0].mean > 0.99,
                &format!("boundary fraction {}", reports[0].mean),
            );
            c.note(format!("boundary fraction {}", reports[0].mean));
        }
    }
    c.finish(8, "univoque-decay", started, Some(30.0))
}

/// Multiplicity shadow: almost every sampled point branches within depth 48,
/// and greedy/lazy words bound every enumerated expansion set.
pub fn criterion_09_multiplicity(seed: u64, profile: Profile) -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let q = figure_base();
    let n = profile.samples(1000);
    let mut multi = 0usize;
    for i in 0..n as u64 {
        let mut rng = sample_rng(mix_seed(seed, 9), i);
        let x = rng.random_range(0.0..q.right());
        match count_expansions(&q, x, 48, 2) {
            Ok(count) if count >= 2 => multi += 1,
            Ok(_) => {}
            Err(e) => c.require(false, &format!("count failed at {x}: {e}")),
        }
    }
    let frac = multi as f64 / n as f64;
    c.require(frac >= 0.99, &format!("only {frac} branch by depth 48"));
    c.note(format!("branching fraction {frac}"));

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 99));
    for depth in [6usize, 10, 14] {
        for _ in 0..34 {
            let x = rng.random_range(0.0..q.right());
            match enumerate_expansions(&q, x, depth) {
                Err(e) => c.require(false, &format!("enumeration failed: {e}")),
                Ok(words) => {
                    let greedy = expansion(&q, x, depth, MapKind::Greedy)
                        .expect("orbit stays in the interval")
                        .digits;
                    let lazy = expansion(&q, x, depth, MapKind::Lazy)
                        .expect("orbit stays in the interval")
                        .digits;
                    c.require(
                        words.first() == Some(&lazy) && words.last() == Some(&greedy),
                        &format!("extremes wrong at x={x}, depth {depth}"),
                    );
                }
            }
        }
    }
    c.finish(9, "multiplicity-shadow", started, None)
}

/// Single-base cross-check: at the golden-ratio pair the construction
/// reproduces the classical beta-transformation step density.
pub fn criterion_10_single_base() -> CriterionReport {
    let started = Instant::now();
    let mut c = Check::new();
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let q = BasePair::new(phi, phi).expect("golden pair is strictly admissible");
    match invariant_densities(&q, 64) {
        Err(e) => c.require(false, &format!("densities failed: {e}")),
        Ok(pair) => {
            // Two-term closed form: 1_{[0,1)} + (1/phi) 1_{[0,1/phi)}, normalized.
            let oracle = StepFunction::from_upper_indicators(
                q.right(),
                &[(1.0, 1.0), (1.0 / phi, 1.0 / phi)],
            )
            .normalize()
            .expect("positive mass");
            let gap = pair.h_greedy.l1_distance(&oracle).unwrap_or(f64::INFINITY);
            c.require(gap <= 1e-9, &format!("L1 gap {gap}"));
            c.note(format!("L1 gap {gap:.2e}"));
        }
    }
    c.finish(10, "single-base-parry", started, None)
}

/// Run all ten criteria with a shared seed.
pub fn run_all(profile: Profile, seed: u64) -> Vec<CriterionReport> {
    vec![
        criterion_01_figure_density(),
        criterion_02_boundary_family(),
        criterion_03_fixed_point_residual(seed),
        criterion_04_transfer_convergence(),
        criterion_05_cylinder_partitions(seed),
        criterion_06_birkhoff(seed, profile),
        criterion_07_chebyshev_gap(seed),
        criterion_08_univoque_decay(seed, profile),
        criterion_09_multiplicity(seed, profile),
        criterion_10_single_base(),
    ]
}
