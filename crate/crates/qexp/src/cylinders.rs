//! Cylinder intervals of the greedy map and their forward images.
//!
//! For a word `w = w_1..w_n` the cylinder `I_w` is the set of points whose
//! greedy itinerary starts with `w`, and `J_w` is its image under the
//! composed branch maps. The images have a rigid shape: `J_w` is the whole
//! state interval exactly for `w = 1^n`, and otherwise is either empty or a
//! right-open interval `[0, xi_w)` with `xi_w` obeying the recursion
//!
//! ```text
//! xi_{u0} = min(r, q0 * xi_u)          xi_{u1} = q1 * xi_u - 1   (xi_u > 1/q1)
//! ```
//!
//! Appending zeros therefore always reaches `J = [0, r)` after finitely many
//! steps; [`full_return`] computes that depth.

use crate::base::BasePair;
use crate::error::{Error, Result};
use crate::maps::DigitWord;

/// Shape of a cylinder image `J_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImageInterval {
    Empty,
    /// `[0, xi)` with `0 < xi <= right`.
    RightOpen(f64),
    /// The whole interval `[0, right]`; occurs exactly for all-ones words.
    Full,
}

impl ImageInterval {
    pub fn length(&self, base: &BasePair) -> f64 {
        match self {
            ImageInterval::Empty => 0.0,
            ImageInterval::RightOpen(xi) => *xi,
            ImageInterval::Full => base.right(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ImageInterval::Empty)
    }

    /// Right end of the interval, taking `Empty` as zero.
    pub fn right_end(&self, base: &BasePair) -> f64 {
        self.length(base)
    }
}

/// A word together with its domain interval, image interval and branch
/// weight `A_w = prod q_{w_i}`.
#[derive(Debug, Clone)]
pub struct CylinderInterval {
    pub word: DigitWord,
    /// Left end of the domain.
    pub left: f64,
    /// Right end of the domain.
    pub right: f64,
    /// Whether the domain is closed at its right end (all-ones words only).
    pub closed: bool,
    pub image: ImageInterval,
    pub weight: f64,
}

impl CylinderInterval {
    pub fn domain_length(&self) -> f64 {
        self.right - self.left
    }
}

fn level_one(q: &BasePair) -> Vec<CylinderInterval> {
    vec![
        CylinderInterval {
            word: DigitWord::new(vec![0]).unwrap(),
            left: 0.0,
            right: q.greedy_switch(),
            closed: false,
            image: ImageInterval::RightOpen(q.r()),
            weight: q.q0(),
        },
        CylinderInterval {
            word: DigitWord::new(vec![1]).unwrap(),
            left: q.greedy_switch(),
            right: q.right(),
            closed: true,
            image: ImageInterval::Full,
            weight: q.q1(),
        },
    ]
}

/// Image recursion for one appended digit.
fn image_child(q: &BasePair, image: ImageInterval, digit: u8) -> ImageInterval {
    match (image, digit) {
        (ImageInterval::Empty, _) => ImageInterval::Empty,
        (ImageInterval::Full, 0) => ImageInterval::RightOpen(q.r()),
        (ImageInterval::Full, 1) => ImageInterval::Full,
        (ImageInterval::RightOpen(xi), 0) => ImageInterval::RightOpen(q.r().min(q.q0() * xi)),
        (ImageInterval::RightOpen(xi), 1) => {
            if xi > q.greedy_switch() {
                ImageInterval::RightOpen((q.q1() * xi - 1.0).min(q.right()))
            } else {
                ImageInterval::Empty
            }
        }
        (_, _) => unreachable!("digits are validated to 0/1"),
    }
}

/// The one or two children of a cylinder, in domain order. Children whose
/// domain degenerates to a point are pruned.
pub fn children(q: &BasePair, parent: &CylinderInterval) -> Vec<CylinderInterval> {
    let mut out = Vec::with_capacity(2);
    let span = parent.image.length(q);
    if span <= 0.0 {
        return out;
    }
    // The branch composition maps the domain affinely onto [0, span) with
    // slope A_w, so the split point sits at left + min(1/q1, span)/A_w. When
    // the whole image lies below the switch the zero child takes the parent
    // domain verbatim.
    let image1 = image_child(q, parent.image, 1);
    let split = if image1.is_empty() {
        parent.right
    } else {
        let zero_part = q.greedy_switch().min(span);
        (parent.left + zero_part / parent.weight).min(parent.right)
    };
    {
        let mut word = parent.word.clone();
        word.push(0);
        out.push(CylinderInterval {
            word,
            left: parent.left,
            right: split,
            closed: if image1.is_empty() {
                parent.closed
            } else {
                false
            },
            image: image_child(q, parent.image, 0),
            weight: parent.weight * q.q0(),
        });
    }
    if !image1.is_empty() && parent.right > split {
        let mut word = parent.word.clone();
        word.push(1);
        out.push(CylinderInterval {
            word,
            left: split,
            right: parent.right,
            closed: parent.closed,
            image: image1,
            weight: parent.weight * q.q1(),
        });
    }
    out
}

/// All nonempty cylinders of word length `n`, sorted by left endpoint. The
/// domains tile `[0, right]` exactly: each child pair shares its parent's
/// endpoints and the split point between them.
pub fn level_partition(q: &BasePair, n: usize) -> Result<Vec<CylinderInterval>> {
    if n == 0 || n > 20 {
        return Err(Error::Unsupported("partition level must be in 1..=20"));
    }
    let mut level = level_one(q);
    for _ in 1..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for parent in &level {
            next.extend(children(q, parent));
        }
        level = next;
    }
    Ok(level)
}

/// `J_w` computed by the forward recursion, without tracking the domain.
pub fn image_interval(q: &BasePair, word: &DigitWord) -> ImageInterval {
    let mut image = ImageInterval::Full;
    for &d in word.digits() {
        image = image_child(q, image, d);
        if image.is_empty() {
            return image;
        }
    }
    image
}

/// Least `m` with `J_{u 0^m} = [0, r)`, computed by iterating the image
/// recursion. Exists for every word with nonempty image since appending a
/// zero multiplies `xi` by `q0 > 1` until it saturates at `r`.
pub fn full_return(q: &BasePair, word: &DigitWord, m_max: usize) -> Result<usize> {
    let mut xi = match image_interval(q, word) {
        ImageInterval::Empty => return Err(Error::EmptyCylinder(word.to_string())),
        ImageInterval::Full => {
            // One zero lands exactly on [0, r).
            return if m_max >= 1 {
                Ok(1)
            } else {
                Err(Error::NotFound(m_max))
            };
        }
        ImageInterval::RightOpen(xi) => xi,
    };
    if (xi - q.r()).abs() <= 1e-12 {
        return Ok(0);
    }
    for m in 1..=m_max {
        xi = q.r().min(q.q0() * xi);
        if (xi - q.r()).abs() <= 1e-12 {
            return Ok(m);
        }
    }
    Err(Error::NotFound(m_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::random_strict_base;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn figure_base() -> BasePair {
        BasePair::new(2.1479, 1.46557).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    #[test]
    fn level_one_and_two_match_the_closed_forms() {
        for q in [figure_base(), BasePair::new(1.7, 2.0).unwrap()] {
            let (q0, q1) = (q.q0(), q.q1());
            let l1 = level_partition(&q, 1).unwrap();
            assert_eq!(l1.len(), 2);
            assert_eq!((l1[0].left, l1[0].right), (0.0, 1.0 / q1));
            assert_eq!((l1[1].left, l1[1].right), (1.0 / q1, q.right()));
            assert_eq!(l1[0].image, ImageInterval::RightOpen(q.r()));
            assert_eq!(l1[1].image, ImageInterval::Full);
            assert!(l1[1].closed && !l1[0].closed);

            let l2 = level_partition(&q, 2).unwrap();
            assert_eq!(l2.len(), 4);
            let words: Vec<String> = l2.iter().map(|c| c.word.to_string()).collect();
            assert_eq!(words, ["00", "01", "10", "11"]);
            assert_close(l2[0].right, 1.0 / (q0 * q1), 1e-12, "I_00 right");
            assert_close(l2[1].right, 1.0 / q1, 1e-12, "I_01 right");
            assert_close(l2[2].right, 1.0 / q1 + 1.0 / (q1 * q1), 1e-12, "I_10 right");
            assert_close(l2[3].right, q.right(), 0.0, "I_11 right");
            assert_close(l2[0].image.right_end(&q), q.r(), 1e-12, "J_00");
            assert_close(l2[1].image.right_end(&q), q0 - 1.0, 1e-12, "J_01");
            assert_close(l2[2].image.right_end(&q), q.r(), 1e-12, "J_10");
            assert_eq!(l2[3].image, ImageInterval::Full);
        }
    }

    #[test]
    fn boundary_base_level_two_lengths_sum_to_right() {
        let q = BasePair::new(3.0, 1.5).unwrap();
        let total: f64 = level_partition(&q, 2)
            .unwrap()
            .iter()
            .map(CylinderInterval::domain_length)
            .sum();
        assert_close(total, 2.0, 1e-12, "level-2 total length");
    }

    #[test]
    fn partitions_tile_the_interval_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let q = random_strict_base(&mut rng);
            for n in [1, 4, 8, 12] {
                let level = level_partition(&q, n).unwrap();
                assert_eq!(level[0].left, 0.0);
                assert_eq!(level.last().unwrap().right, q.right());
                for pair in level.windows(2) {
                    assert_eq!(pair[0].right, pair[1].left, "gap at level {n}");
                }
                let total: f64 = level.iter().map(CylinderInterval::domain_length).sum();
                assert_close(total, q.right(), 1e-9, "cover length");
                let closed: Vec<_> = level.iter().filter(|c| c.closed).collect();
                assert_eq!(closed.len(), 1);
                assert!(closed[0].word.digits().iter().all(|&d| d == 1));
            }
        }
    }

    #[test]
    fn refinement_children_tile_each_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let q = random_strict_base(&mut rng);
        for parent in level_partition(&q, 6).unwrap() {
            let kids = children(&q, &parent);
            assert!(!kids.is_empty());
            assert_eq!(kids[0].left, parent.left);
            assert_eq!(kids.last().unwrap().right, parent.right);
            for pair in kids.windows(2) {
                assert_eq!(pair[0].right, pair[1].left);
            }
        }
    }

    #[test]
    fn image_trichotomy_and_affine_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let q = random_strict_base(&mut rng);
            for n in [3, 7, 11] {
                for cyl in level_partition(&q, n).unwrap() {
                    let all_ones = cyl.word.digits().iter().all(|&d| d == 1);
                    match cyl.image {
                        ImageInterval::Full => assert!(all_ones),
                        ImageInterval::RightOpen(xi) => {
                            assert!(!all_ones);
                            assert!(0.0 < xi && xi <= q.right());
                        }
                        ImageInterval::Empty => panic!("empty cylinder in partition"),
                    }
                    let lhs = cyl.image.length(&q);
                    let rhs = cyl.weight * cyl.domain_length();
                    assert!(
                        (lhs - rhs).abs() <= 1e-9 * rhs.max(1.0),
                        "affine mismatch {lhs} vs {rhs} for {}",
                        cyl.word
                    );
                }
            }
        }
    }

    #[test]
    fn domain_lengths_shrink_geometrically() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let q = random_strict_base(&mut rng);
        for n in 1..=12usize {
            let max_len = level_partition(&q, n)
                .unwrap()
                .iter()
                .map(CylinderInterval::domain_length)
                .fold(0.0, f64::max);
            assert!(max_len <= q.right() / q.min_q().powi(n as i32) + 1e-12);
        }
    }

    #[test]
    fn full_return_examples() {
        let q = figure_base();
        for k in 1..6 {
            let ones = DigitWord::new(vec![1; k]).unwrap();
            assert_eq!(full_return(&q, &ones, 10).unwrap(), 1);
        }
        // J_0 = [0, r) already.
        assert_eq!(
            full_return(&q, &DigitWord::parse("0").unwrap(), 10).unwrap(),
            0
        );
        // xi_01 = q0 - 1 = 1.1479 and q0 * xi exceeds r at the first zero.
        assert_eq!(
            full_return(&q, &DigitWord::parse("01").unwrap(), 10).unwrap(),
            1
        );
        assert!(matches!(
            full_return(&q, &DigitWord::parse("01").unwrap(), 0),
            Err(Error::NotFound(0))
        ));
    }

    #[test]
    fn empty_image_is_reported() {
        let q = BasePair::new(1.1, 3.5).unwrap();
        let w = DigitWord::parse("0111").unwrap();
        assert!(image_interval(&q, &w).is_empty());
        assert!(matches!(
            full_return(&q, &w, 10),
            Err(Error::EmptyCylinder(_))
        ));
    }

    #[test]
    fn level_bounds_are_enforced() {
        let q = figure_base();
        assert!(level_partition(&q, 0).is_err());
        assert!(level_partition(&q, 21).is_err());
    }
}
