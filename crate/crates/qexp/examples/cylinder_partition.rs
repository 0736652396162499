//! Cylinder intervals of the greedy map: each level tiles the interval,
//! images are full exactly for all-ones words, and appending zeros always
//! returns the image to [0, r).
//!
//! ```bash
//! cargo run --example cylinder_partition
//! ```

use qexp::cylinders::{full_return, level_partition};
use qexp::{BasePair, DigitWord};

fn main() {
    let q = BasePair::new(2.1479, 1.46557).unwrap();

    for level in 1..=3 {
        let cylinders = level_partition(&q, level).unwrap();
        println!("level {level}:");
        println!(
            "  {:<6} {:>10} {:>10} {:>12} {:>10}",
            "word", "left", "right", "image_right", "weight"
        );
        for c in &cylinders {
            println!(
                "  {:<6} {:>10.6} {:>10.6} {:>12.6} {:>10.4}",
                c.word.to_string(),
                c.left,
                c.right,
                c.image.right_end(&q),
                c.weight
            );
        }
        let total: f64 = cylinders.iter().map(|c| c.domain_length()).sum();
        println!(
            "  total domain length = {total:.12} (right = {:.12})\n",
            q.right()
        );
    }

    println!("full-return depths m with J_(w 0^m) = [0, r):");
    for w in ["1", "11", "0", "01", "0110"] {
        let word = DigitWord::parse(w).unwrap();
        match full_return(&q, &word, 100) {
            Ok(m) => println!("  w = {w:<5} m = {m}"),
            Err(e) => println!("  w = {w:<5} {e}"),
        }
    }
}
