//! On the boundary curve q0 + q1 = q0*q1 both invariant measures are the
//! normalized Lebesgue measure: the densities are the constant q1 - 1.
//!
//! ```bash
//! cargo run --example boundary_uniform
//! ```

use qexp::density::invariant_densities;
use qexp::{BasePair, MapKind};

fn main() {
    println!(
        "{:>6} {:>9} {:>10} {:>14} {:>14}",
        "q0", "q1", "right", "h_greedy", "h_lazy"
    );
    for q0 in [1.5, 2.0, 2.5, 3.0, 4.0] {
        let q1 = q0 / (q0 - 1.0);
        let q = BasePair::new(q0, q1).unwrap();
        let pair = invariant_densities(&q, 32).unwrap();
        let hg = pair.density(MapKind::Greedy);
        let hl = pair.density(MapKind::Lazy);
        assert_eq!(hg.piece_count(), 1);
        assert_eq!(hl.piece_count(), 1);
        println!(
            "{:>6.2} {:>9.4} {:>10.4} {:>14.10} {:>14.10}",
            q0,
            q1,
            q.right(),
            hg.values()[0],
            hl.values()[0],
        );
    }
    println!("\nEach density equals q1 - 1, the uniform density on [0, 1/(q1-1)].");
}
