//! Recover a base pair from prescribed critical-point expansions.
//!
//! The greedy expansion of `r = q0/q1` and the lazy expansion of
//! `ell = q1/(q0(q1-1)) - 1` pin the pair down (away from the boundary
//! curve, where every pair satisfies the degenerate prescription 1^inf /
//! 0^inf). Here we ask for greedy 1110^inf and lazy 001^inf.
//!
//! ```bash
//! cargo run --example solve_base
//! ```

use qexp::base::solve_base;
use qexp::maps::{evaluate, expansion};
use qexp::{DigitWord, MapKind, Tail};

fn main() {
    let greedy = DigitWord::parse("111").unwrap();
    let lazy = DigitWord::parse("00").unwrap();
    let q = solve_base(&greedy, Tail::Zeros, &lazy, Tail::Ones).unwrap();
    println!("prescribed: r ~ 1110^inf, ell ~ 001^inf");
    println!("solved base: q0 = {:.10}, q1 = {:.10}", q.q0(), q.q1());

    // Check the defining equations by evaluating the words.
    println!(
        "pi(1110^inf) - r   = {:+.2e}",
        evaluate(&q, &greedy, Tail::Zeros) - q.r()
    );
    println!(
        "pi(001^inf)  - ell = {:+.2e}",
        evaluate(&q, &lazy, Tail::Ones) - q.ell()
    );

    // And by re-running the dynamics from the critical points.
    let wg = expansion(&q, q.r(), 8, MapKind::Greedy).unwrap().digits;
    let wl = expansion(&q, q.ell(), 8, MapKind::Lazy).unwrap().digits;
    println!("greedy digits of r:   {wg}");
    println!("lazy digits of ell:   {wl}");
}
