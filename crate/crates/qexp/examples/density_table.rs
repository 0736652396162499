//! The three-piece greedy invariant density of the base with critical
//! expansions 1110^inf and 001^inf, printed as a table next to its lazy
//! counterpart.
//!
//! ```bash
//! cargo run --example density_table
//! ```

use qexp::base::solve_base;
use qexp::density::invariant_densities_from_words;
use qexp::{DigitWord, MapKind, Tail};

fn main() {
    let wg = DigitWord::parse("111").unwrap();
    let wl = DigitWord::parse("00").unwrap();
    let q = solve_base(&wg, Tail::Zeros, &wl, Tail::Ones).unwrap();
    let pair = invariant_densities_from_words(&q, &wg, Tail::Zeros, &wl, Tail::Ones).unwrap();

    println!("base: q0 = {:.6}, q1 = {:.6}\n", q.q0(), q.q1());
    for kind in [MapKind::Greedy, MapKind::Lazy] {
        let h = pair.density(kind);
        println!("{kind} density h (integral {:.12}):", h.integrate());
        println!("  {:>12} {:>12} {:>10}", "left", "right", "value");
        for (l, r, v) in h.pieces() {
            println!("  {l:>12.6} {r:>12.6} {v:>10.4}");
        }
        println!("  mean = {:.6}\n", pair.mean(kind));
    }
    println!(
        "Lebesgue midpoint 1/(2(q1-1)) = {:.6} separates the two means.",
        1.0 / (2.0 * (q.q1() - 1.0))
    );
}
