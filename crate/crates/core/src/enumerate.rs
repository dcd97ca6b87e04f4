//! Short-vector enumeration in negative definite sublattices.
//!
//! Completed-square (Fincke–Pohst) recursion on the positive definite form
//! `-gram`, carried out in exact rational arithmetic. Floating point is only
//! used to guess each coordinate interval, which is then widened and every
//! candidate re-checked exactly.

use std::ops::ControlFlow;

use num_rational::Ratio;

use crate::arith::Int;
use crate::exec::Parallelism;
use crate::lattice::{ClassVector, LatticeError, NegDefSublattice};

type Q = Ratio<Int>;

struct Enumerator {
    /// `q[i][i]` are the square weights, `q[i][j]` (j > i) the shifts.
    q: Vec<Vec<Q>>,
    /// Upper bound on the positive form, i.e. `-lower`.
    max: Q,
    /// Lower bound on the positive form, i.e. `-upper`.
    min: Q,
}

fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

impl Enumerator {
    fn new(sub: &NegDefSublattice, lower: Int, upper: Int) -> Self {
        let k = sub.rank();
        let mut q: Vec<Vec<Q>> = sub.gram().iter().map(|row| row.iter().map(|&g| Q::from(-g)).collect()).collect();
        for i in 0..k {
            for j in i + 1..k {
                q[j][i] = q[i][j];
                q[i][j] = q[i][j] / q[i][i];
            }
            for l in i + 1..k {
                for m in l..k {
                    q[l][m] = q[l][m] - q[l][i] * q[i][m];
                }
            }
        }
        Enumerator { q, max: Q::from(-lower), min: Q::from(-upper) }
    }

    fn rank(&self) -> usize {
        self.q.len()
    }

    /// Integer values of coordinate `i` compatible with the partial sum,
    /// together with the centre of the interval.
    fn candidates(&self, i: usize, x: &[Int], partial: Q) -> (Q, std::ops::RangeInclusive<Int>) {
        let mut center = Q::from(0);
        for j in i + 1..self.rank() {
            if x[j] != 0 {
                center -= self.q[i][j] * x[j];
            }
        }
        let rem = self.max - partial;
        let qi = self.q[i][i];
        let rad = (to_f64(&rem) / to_f64(&qi)).max(0.0).sqrt();
        let c = to_f64(&center);
        let lo = (c - rad).floor() as Int - 1;
        let hi = (c + rad).ceil() as Int + 1;
        (center, lo..=hi)
    }

    fn term(&self, i: usize, xi: Int, center: Q) -> Q {
        let d = Q::from(xi) - center;
        self.q[i][i] * d * d
    }

    fn walk<F>(&self, i: usize, x: &mut Vec<Int>, partial: Q, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Int], Int) -> ControlFlow<()>,
    {
        let (center, range) = self.candidates(i, x, partial);
        for xi in range {
            let value = partial + self.term(i, xi, center);
            if value > self.max {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                if value >= self.min {
                    debug_assert!(value.is_integer());
                    visit(x, -value.to_integer())?;
                }
            } else {
                self.walk(i - 1, x, value, visit)?;
            }
        }
        x[i] = 0;
        ControlFlow::Continue(())
    }

    /// Enumerates with the top coordinate fixed to `top`.
    fn walk_top<F>(&self, top: Int, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Int], Int) -> ControlFlow<()>,
    {
        let k = self.rank();
        let mut x = vec![0; k];
        let value = self.term(k - 1, top, Q::from(0));
        if value > self.max {
            return ControlFlow::Continue(());
        }
        x[k - 1] = top;
        if k == 1 {
            if value >= self.min {
                return visit(&x, -value.to_integer());
            }
            return ControlFlow::Continue(());
        }
        self.walk(k - 2, &mut x, value, visit)
    }

    fn top_range(&self) -> Vec<Int> {
        let k = self.rank();
        let x = vec![0; k];
        self.candidates(k - 1, &x, Q::from(0)).1.collect()
    }
}

fn check_request(lower: Int, upper: Int) -> Result<bool, LatticeError> {
    if upper >= 0 {
        return Err(LatticeError::UnboundedRequest);
    }
    Ok(lower <= upper)
}

/// All sublattice vectors `x` with `lower ≤ x² ≤ upper`, in ambient
/// coordinates, sorted lexicographically.
pub fn short_vectors(sub: &NegDefSublattice, lower: Int, upper: Int) -> Result<Vec<ClassVector>, LatticeError> {
    short_vectors_with(sub, lower, upper, Parallelism::default())
}

pub fn short_vectors_with(
    sub: &NegDefSublattice,
    lower: Int,
    upper: Int,
    mode: Parallelism,
) -> Result<Vec<ClassVector>, LatticeError> {
    if !check_request(lower, upper)? {
        return Ok(Vec::new());
    }
    let en = Enumerator::new(sub, lower, upper);
    let tops = en.top_range();
    let chunks = mode.map(&tops, |&top| {
        let mut found = Vec::new();
        let _ = en.walk_top(top, &mut |x, _| {
            found.push(sub.embed(x));
            ControlFlow::Continue(())
        });
        found
    });
    let mut out: Vec<ClassVector> = chunks.into_iter().flatten().collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Visits sublattice vectors with `lower ≤ x² ≤ upper` in enumeration order
/// until `visit` breaks. Returns whether it broke early.
pub fn visit_short_vectors<F>(sub: &NegDefSublattice, lower: Int, upper: Int, mut visit: F) -> Result<bool, LatticeError>
where
    F: FnMut(&ClassVector, Int) -> ControlFlow<()>,
{
    if !check_request(lower, upper)? {
        return Ok(false);
    }
    let en = Enumerator::new(sub, lower, upper);
    for top in en.top_range() {
        let flow = en.walk_top(top, &mut |x, n| visit(&sub.embed(x), n));
        if flow.is_break() {
            return Ok(true);
        }
    }
    Ok(false)
}
