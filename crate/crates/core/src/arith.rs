//! Exact integer helpers: gcds, unimodular column reduction, determinants
//! and inverses of small square matrices.

use num_rational::Ratio;

/// Scalar type for every exact computation in the crate.
pub type Int = i128;

pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_all<I: IntoIterator<Item = Int>>(values: I) -> Int {
    values.into_iter().fold(0, gcd)
}

/// Returns `(g, a, b)` with `a*x + b*y = g = gcd(x, y) >= 0`.
pub fn ext_gcd(x: Int, y: Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (x, y);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Nearest integer to `num/den`, ties rounded toward negative infinity.
pub fn round_div(num: Int, den: Int) -> Int {
    debug_assert!(den != 0);
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    (2 * num + den - 1).div_euclid(2 * den)
}

pub fn is_prime(n: Int) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime divisors of `|n|` in increasing order (empty for 0 and ±1).
pub fn prime_divisors(n: Int) -> Vec<Int> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Unimodular column reduction of a row vector.
///
/// Returns `(pivot, u)` where `u` is an `n x n` unimodular matrix (stored as
/// columns) such that `w . u[j] = 0` for every `j != pivot` and
/// `w . u[pivot] = gcd(w) >= 0`. For `w = 0` the pivot is 0 and `u` is the
/// identity.
pub fn column_reduce(w: &[Int]) -> (usize, Vec<Vec<Int>>) {
    let n = w.len();
    let mut w = w.to_vec();
    let mut cols: Vec<Vec<Int>> = (0..n)
        .map(|j| (0..n).map(|i| Int::from(i == j)).collect())
        .collect();
    loop {
        let pivot = (0..n)
            .filter(|&i| w[i] != 0)
            .min_by_key(|&i| (w[i].abs(), i));
        let Some(p) = pivot else {
            return (0, cols);
        };
        let mut done = true;
        for j in 0..n {
            if j == p || w[j] == 0 {
                continue;
            }
            let q = round_div(w[j], w[p]);
            w[j] -= q * w[p];
            let (src, dst) = if p < j {
                let (a, b) = cols.split_at_mut(j);
                (&a[p], &mut b[0])
            } else {
                let (a, b) = cols.split_at_mut(p);
                (&b[0], &mut a[j])
            };
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= q * s;
            }
            if w[j] != 0 {
                done = false;
            }
        }
        if done {
            if w[p] < 0 {
                w[p] = -w[p];
                for c in cols[p].iter_mut() {
                    *c = -*c;
                }
            }
            return (p, cols);
        }
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Leading principal minors `det(m[..k][..k])` for `k = 1..=n`.
pub fn leading_minors(m: &[Vec<Int>]) -> Vec<Int> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<Int>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(&sub)
        })
        .collect()
}

/// Inverse of a square matrix with determinant ±1, or `None` otherwise.
pub fn unimodular_inverse(m: &[Vec<Int>]) -> Option<Vec<Vec<Int>>> {
    let n = m.len();
    let det = determinant(m);
    if det.abs() != 1 {
        return None;
    }
    let minor = |skip_row: usize, skip_col: usize| -> Vec<Vec<Int>> {
        m.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip_row)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip_col)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect()
    };
    let mut inv = vec![vec![0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let cofactor = determinant(&minor(j, i));
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *entry = sign * cofactor * det;
        }
    }
    Some(inv)
}

/// Solves `basis * c = target` exactly, where `basis` is given as a list of
/// column vectors. Returns `None` when there is no rational solution or the
/// unique solution is not integral.
pub fn solve_integral(basis: &[Vec<Int>], target: &[Int]) -> Option<Vec<Int>> {
    let rows = target.len();
    let cols = basis.len();
    let mut a: Vec<Vec<Ratio<Int>>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Ratio<Int>> = basis.iter().map(|b| Ratio::from(b[i])).collect();
            row.push(Ratio::from(target[i]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != Ratio::from(0)) else {
            continue;
        };
        a.swap(r, p);
        let lead = a[r][c];
        for x in a[r].iter_mut() {
            *x /= lead;
        }
        for i in 0..rows {
            if i != r && a[i][c] != Ratio::from(0) {
                let f = a[i][c];
                for j in 0..=cols {
                    let v = a[r][j];
                    a[i][j] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[cols] != Ratio::from(0)) {
        return None;
    }
    let mut out = vec![0; cols];
    for (i, &c) in pivots.iter().enumerate() {
        let v = a[i][cols];
        if !v.is_integer() {
            return None;
        }
        out[c] = v.to_integer();
    }
    Some(out)
}
