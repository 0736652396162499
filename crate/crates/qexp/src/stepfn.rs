//! Piecewise-constant functions on `[0, R]` with exact breakpoint algebra.
//!
//! Every density in this crate is a [`StepFunction`]: a finite list of
//! strictly increasing breakpoints `b_1 < ... < b_m` inside `(0, R)` and one
//! value per piece. Piece `i` is the half-open interval `[b_i, b_{i+1})` with
//! `b_0 = 0`; the final piece is closed at `R`. Functions are kept in
//! canonical form: breakpoints closer than [`MERGE_TOL`] collapse to their
//! midpoint, zero-length pieces are dropped, and adjacent pieces with equal
//! values are merged.

use crate::error::{Error, Result};

/// Breakpoints closer than this collapse during canonicalization. Chosen to
/// separate genuine structure from accumulated affine-map rounding at the
/// iteration depths used elsewhere in the crate.
pub const MERGE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    domain_right: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Constant function `c` on `[0, right]`.
    pub fn constant(domain_right: f64, value: f64) -> Self {
        StepFunction {
            domain_right,
            breakpoints: Vec::new(),
            values: vec![value],
        }
    }

    /// Build from breakpoints (non-decreasing, within `[0, right]`) and one
    /// value per piece; the result is canonicalized.
    pub fn new(domain_right: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !domain_right.is_finite() || domain_right <= 0.0 {
            return Err(Error::NonFinite("domain_right"));
        }
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Parse(format!(
                "need {} values for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("piece value"));
        }
        if breakpoints
            .iter()
            .any(|b| !b.is_finite() || *b < 0.0 || *b > domain_right)
        {
            return Err(Error::Parse("breakpoint outside [0, domain_right]".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Parse("breakpoints not sorted".into()));
        }
        let mut f = StepFunction {
            domain_right,
            breakpoints,
            values,
        };
        f.canonicalize();
        Ok(f)
    }

    /// Indicator of `[0, cut)`, clipped to the domain.
    pub fn indicator_below(domain_right: f64, cut: f64) -> Self {
        Self::from_upper_indicators(domain_right, &[(cut, 1.0)])
    }

    /// Indicator of `(cut, domain_right]`, clipped to the domain.
    pub fn indicator_above(domain_right: f64, cut: f64) -> Self {
        Self::from_lower_indicators(domain_right, &[(cut, 1.0)])
    }

    /// `f(x) = Σ w_j · 1_{[0, c_j)}(x)` for `terms = [(c_j, w_j)]`.
    ///
    /// Cuts at or beyond the domain end contribute their weight everywhere;
    /// non-positive cuts contribute nothing.
    pub fn from_upper_indicators(domain_right: f64, terms: &[(f64, f64)]) -> Self {
        let mut interior: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        let mut everywhere = 0.0;
        for &(cut, w) in terms {
            if cut >= domain_right {
                everywhere += w;
            } else if cut > 0.0 {
                interior.push((cut, w));
            }
        }
        interior.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Suffix sums: the value left of a cut includes the cut's own weight.
        let mut breakpoints = Vec::with_capacity(interior.len());
        let mut values = vec![everywhere];
        for &(cut, _) in &interior {
            breakpoints.push(cut);
            values.push(everywhere);
        }
        let mut acc = 0.0;
        for (i, &(_, w)) in interior.iter().enumerate().rev() {
            acc += w;
            values[i] = everywhere + acc;
        }
        let mut f = StepFunction {
            domain_right,
            breakpoints,
            values,
        };
        f.canonicalize();
        f
    }

    /// `f(x) = Σ w_j · 1_{(c_j, R]}(x)` for `terms = [(c_j, w_j)]`.
    pub fn from_lower_indicators(domain_right: f64, terms: &[(f64, f64)]) -> Self {
        let mut interior: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        let mut everywhere = 0.0;
        for &(cut, w) in terms {
            if cut <= 0.0 {
                everywhere += w;
            } else if cut < domain_right {
                interior.push((cut, w));
            }
        }
        interior.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints = Vec::with_capacity(interior.len());
        let mut values = vec![everywhere];
        let mut acc = everywhere;
        for &(cut, w) in &interior {
            breakpoints.push(cut);
            acc += w;
            values.push(acc);
        }
        let mut f = StepFunction {
            domain_right,
            breakpoints,
            values,
        };
        f.canonicalize();
        f
    }

    pub fn domain_right(&self) -> f64 {
        self.domain_right
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// Iterator over pieces as `(left, right, value)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |i| (self.left(i), self.right(i), self.values[i]))
    }

    fn left(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.breakpoints[i - 1]
        }
    }

    fn right(&self, i: usize) -> f64 {
        if i == self.breakpoints.len() {
            self.domain_right
        } else {
            self.breakpoints[i]
        }
    }

    fn piece_index(&self, x: f64) -> usize {
        // Pieces are [b_i, b_{i+1}); x == b_i selects the piece to its right.
        self.breakpoints.partition_point(|b| *b <= x)
    }

    /// Value of the piece containing `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 || x > self.domain_right {
            return Err(Error::OutOfDomain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: self.domain_right,
            });
        }
        Ok(self.values[self.piece_index(x)])
    }

    fn check_domains(&self, other: &StepFunction) -> Result<()> {
        if (self.domain_right - other.domain_right).abs() > MERGE_TOL {
            return Err(Error::DomainMismatch(self.domain_right, other.domain_right));
        }
        Ok(())
    }

    /// Merged breakpoint grid of two functions (tolerance-deduplicated).
    fn merged_grid(&self, other: &StepFunction) -> Vec<f64> {
        let mut grid = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => {
                    if x <= y {
                        i += 1;
                        x
                    } else {
                        j += 1;
                        y
                    }
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => break,
            };
            match grid.last() {
                Some(&prev) if next - prev < MERGE_TOL => {}
                _ => grid.push(next),
            }
        }
        grid
    }

    fn zip_with(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_domains(other)?;
        let grid = self.merged_grid(other);
        let mut values = Vec::with_capacity(grid.len() + 1);
        for k in 0..=grid.len() {
            let lo = if k == 0 { 0.0 } else { grid[k - 1] };
            let hi = if k == grid.len() {
                self.domain_right
            } else {
                grid[k]
            };
            let mid = 0.5 * (lo + hi);
            values.push(op(
                self.values[self.piece_index(mid)],
                other.values[other.piece_index(mid)],
            ));
        }
        let mut f = StepFunction {
            domain_right: self.domain_right,
            breakpoints: grid,
            values,
        };
        f.canonicalize();
        Ok(f)
    }

    /// Pointwise sum on the merged grid.
    pub fn add(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise difference on the merged grid.
    pub fn sub(&self, other: &StepFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise scaling by `c`.
    pub fn scale(&self, c: f64) -> Self {
        let mut f = StepFunction {
            domain_right: self.domain_right,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        };
        f.canonicalize();
        f
    }

    /// `∫ f dx` as the exact piecewise sum.
    pub fn integrate(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v * (r - l)).sum()
    }

    /// `∫ x f(x) dx` as the exact piecewise sum.
    pub fn first_moment(&self) -> f64 {
        self.pieces()
            .map(|(l, r, v)| v * (r * r - l * l) * 0.5)
            .sum()
    }

    /// `∫ |f| dx` restricted to `[lo, hi]`.
    pub fn integral_abs_on(&self, lo: f64, hi: f64) -> f64 {
        self.pieces()
            .map(|(l, r, v)| {
                let a = l.max(lo);
                let b = r.min(hi);
                if b > a {
                    v.abs() * (b - a)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `‖f − g‖₁` over the common domain.
    pub fn l1_distance(&self, other: &StepFunction) -> Result<f64> {
        self.check_domains(other)?;
        let grid = self.merged_grid(other);
        let mut total = 0.0;
        for k in 0..=grid.len() {
            let lo = if k == 0 { 0.0 } else { grid[k - 1] };
            let hi = if k == grid.len() {
                self.domain_right
            } else {
                grid[k]
            };
            let mid = 0.5 * (lo + hi);
            let d = self.values[self.piece_index(mid)] - other.values[other.piece_index(mid)];
            total += d.abs() * (hi - lo);
        }
        Ok(total)
    }

    /// `‖f‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v.abs() * (r - l)).sum()
    }

    /// Divide by the integral so the result integrates to one.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.integrate();
        if mass <= 0.0 {
            return Err(Error::ZeroIntegral(mass));
        }
        Ok(self.scale(1.0 / mass))
    }

    /// Piece values never increase from left to right, up to `tol`.
    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// Piece values never decrease from left to right, up to `tol`.
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Smallest piece value among pieces intersecting `[lo, hi)`.
    pub fn min_value_on(&self, lo: f64, hi: f64) -> Option<f64> {
        self.pieces()
            .filter(|&(l, r, _)| r > lo && l < hi)
            .map(|(_, _, v)| v)
            .reduce(f64::min)
    }

    fn canonicalize(&mut self) {
        // Collapse breakpoint clusters (gap < MERGE_TOL, including the domain
        // endpoints) to their midpoint, dropping the values of the resulting
        // zero-length pieces.
        let m = self.breakpoints.len();
        let mut bp = Vec::with_capacity(m);
        let mut vals = Vec::with_capacity(m + 1);
        vals.push(self.values[0]);
        let mut k = 0;
        while k < m {
            let start = k;
            while k + 1 < m && self.breakpoints[k + 1] - self.breakpoints[start] < MERGE_TOL {
                k += 1;
            }
            let cluster_mid = if k == start {
                self.breakpoints[start]
            } else {
                0.5 * (self.breakpoints[start] + self.breakpoints[k])
            };
            // The value after the whole cluster survives; interior ones drop.
            if cluster_mid < MERGE_TOL {
                // Piece before the cluster has zero length: keep the right side.
                *vals.last_mut().unwrap() = self.values[k + 1];
            } else if cluster_mid > self.domain_right - MERGE_TOL {
                // Everything from here on is a zero-length tail: discard.
            } else {
                bp.push(cluster_mid);
                vals.push(self.values[k + 1]);
            }
            k += 1;
        }
        // Merge adjacent pieces with identical values.
        let mut out_bp = Vec::with_capacity(bp.len());
        let mut out_vals = vec![vals[0]];
        for (i, &b) in bp.iter().enumerate() {
            let v = vals[i + 1];
            if v.to_bits() == out_vals.last().unwrap().to_bits() {
                continue;
            }
            out_bp.push(b);
            out_vals.push(v);
        }
        self.breakpoints = out_bp;
        self.values = out_vals;
    }

    /// CSV rows `(piece_index, left, right, value)` with a header, 17
    /// significant digits per number so the decimal round-trip is exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("piece_index,left,right,value\n");
        for (i, (l, r, v)) in self.pieces().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i,
                fmt_f64(l),
                fmt_f64(r),
                fmt_f64(v)
            ));
        }
        out
    }

    /// Parse the output of [`StepFunction::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "piece_index,left,right,value" => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad step-function CSV header: {:?}",
                    other
                )))
            }
        }
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        let mut prev_right: Option<f64> = None;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("expected 4 columns: {line:?}")));
            }
            let left: f64 = parse_f64(cols[1])?;
            let right: f64 = parse_f64(cols[2])?;
            let value: f64 = parse_f64(cols[3])?;
            match prev_right {
                None => {
                    if left != 0.0 {
                        return Err(Error::Parse("first piece must start at 0".into()));
                    }
                }
                Some(pr) => {
                    if pr != left {
                        return Err(Error::Parse("pieces are not contiguous".into()));
                    }
                    breakpoints.push(left);
                }
            }
            values.push(value);
            prev_right = Some(right);
        }
        let domain_right = prev_right.ok_or_else(|| Error::Parse("no pieces".into()))?;
        StepFunction::new(domain_right, breakpoints, values)
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))
}
