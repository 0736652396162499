//! Greedy and lazy expansions of a point, and how many expansions exist.
//!
//! ```bash
//! cargo run --example expansions
//! ```

use qexp::ergodic::enumerate_expansions;
use qexp::maps::{admissible_digits, evaluate, expansion};
use qexp::{BasePair, MapKind, Tail};

fn main() {
    let q = BasePair::new(2.1479, 1.46557).unwrap();
    let x = 0.9;
    let depth = 10;

    // 0.9 lies in the digit overlap, so both digits are available right away.
    let first = admissible_digits(&q, x).unwrap();
    println!(
        "admissible first digits of {x}: zero={}, one={}",
        first.zero, first.one
    );

    let greedy = expansion(&q, x, depth, MapKind::Greedy).unwrap();
    let lazy = expansion(&q, x, depth, MapKind::Lazy).unwrap();
    println!("greedy word: {}", greedy.digits);
    println!("lazy word:   {}", lazy.digits);

    // Evaluating a finite word with a zeros tail under-shoots x by the
    // orbit remainder, which shrinks geometrically with the depth.
    let back = evaluate(&q, &greedy.digits, Tail::Zeros);
    println!(
        "pi(greedy prefix + 0^inf) = {back:.12}  (x - back = {:.3e})",
        x - back
    );

    // All expansions of depth 10, lexicographically sorted: the lazy word
    // is the minimum and the greedy word the maximum.
    let words = enumerate_expansions(&q, x, depth).unwrap();
    println!("\n{} expansions to depth {depth}:", words.len());
    for w in &words {
        let marker = if *w == greedy.digits {
            "  <- greedy"
        } else if *w == lazy.digits {
            "  <- lazy"
        } else {
            ""
        };
        println!("  {w}{marker}");
    }
}
