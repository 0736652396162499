//! Validate base pairs and inspect their derived constants.
//!
//! ```bash
//! cargo run --example base_constants
//! ```

use qexp::BasePair;

fn main() {
    // A strictly admissible pair: q0 + q1 > q0*q1.
    let q = BasePair::new(2.1479, 1.46557).unwrap();
    println!("{q}");
    println!("  interval          [0, {:.6}]", q.right());
    println!("  r    = q0/q1             = {:.6}", q.r());
    println!("  ell  = q1/(q0(q1-1)) - 1 = {:.6}", q.ell());
    println!("  greedy switch 1/q1       = {:.6}", q.greedy_switch());
    println!("  lazy switch 1/(q0(q1-1)) = {:.6}", q.lazy_switch());
    println!(
        "  digit overlap            = [{:.6}, {:.6}]",
        q.greedy_switch(),
        q.lazy_switch()
    );
    println!("  strict                   = {}", q.is_strict());

    // On the boundary curve q0 + q1 = q0*q1 the overlap degenerates to a
    // point and the two invariant measures coincide.
    let b = BasePair::new(3.0, 1.5).unwrap();
    println!("\n{b}");
    println!(
        "  r = right = {}, ell = {}, strict = {}",
        b.r(),
        b.ell(),
        b.is_strict()
    );

    // Below the curve there are points with no expansion at all.
    match BasePair::new(2.0, 2.5) {
        Err(e) => println!("\n(2, 2.5) rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
