//! Iterating the greedy transfer operator from the uniform density: the
//! Cauchy increments collapse geometrically, mass drains off the dead zone
//! [r, right], and the limit matches the closed-form jump density.
//!
//! ```bash
//! cargo run --example transfer_convergence
//! ```

use qexp::density::invariant_densities_auto;
use qexp::{BasePair, MapKind, StepFunction, TransferOperator};

fn main() {
    let q = BasePair::new(2.1479, 1.46557).unwrap();
    let op = TransferOperator::new(q, MapKind::Greedy);
    let uniform = StepFunction::constant(q.right(), 1.0 / q.right());

    let trace = op.iterate(&uniform, 60).unwrap();
    println!(
        "{:>4} {:>14} {:>12} {:>14}",
        "n", "l1_increment", "breakpoints", "mass_on_[r,R]"
    );
    for step in trace.steps.iter().filter(|s| s.n <= 10 || s.n % 10 == 0) {
        println!(
            "{:>4} {:>14.3e} {:>12} {:>14.3e}",
            step.n, step.l1_increment, step.breakpoint_count, step.mass_outside_support
        );
    }

    let pair = invariant_densities_auto(&q, 1e-10).unwrap();
    let gap = trace.final_density.l1_distance(&pair.h_greedy).unwrap();
    println!(
        "\nafter {} steps: L1 distance to the jump-function density = {gap:.3e}",
        trace.steps.len()
    );
    println!(
        "fixed-point residual of the jump density itself = {:.3e}",
        op.residual(&pair.h_greedy).unwrap()
    );
}
