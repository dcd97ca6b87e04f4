//! Reference implementations for the integration tests. Nothing here calls
//! the enumeration or reduction code of the crate: the `E8` vectors come from
//! the orthonormal `D8⁺` model and the lattice form is rebuilt from the
//! Dynkin diagram.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use mukai_core::lattice::ClassVector;
use num_rational::Ratio;

pub type Int = i128;
type Q = Ratio<Int>;

/// Bourbaki `E8`: chain 1-3-4-5-6-7-8, node 2 on node 4.
pub const DYNKIN: [(usize, usize); 7] = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];

pub fn gram() -> [[Int; 10]; 10] {
    let mut g = [[0; 10]; 10];
    g[0][1] = 1;
    g[1][0] = 1;
    for i in 2..10 {
        g[i][i] = -2;
    }
    for (a, b) in DYNKIN {
        g[a + 1][b + 1] = 1;
        g[b + 1][a + 1] = 1;
    }
    g
}

pub fn dense_inner(x: &ClassVector, y: &ClassVector) -> Int {
    static G: std::sync::OnceLock<[[Int; 10]; 10]> = std::sync::OnceLock::new();
    let g = G.get_or_init(gram);
    let mut acc = 0;
    for i in 0..10 {
        for j in 0..10 {
            acc += x.0[i] * g[i][j] * y.0[j];
        }
    }
    acc
}

/// `⟨x, y⟩ = -∫ x^∨ ∧ y` computed in `H^0 ⊕ H^2 ⊕ H^4`, with `x = r + c1 + aρ`
/// and `a = -s/2`. Returns twice the pairing to stay integral.
pub fn wedge_pairing_twice(x: (Int, &ClassVector, Int), y: (Int, &ClassVector, Int)) -> Int {
    // Doubled degree-4 coefficients: 2a = -s.
    let (r1, c1, two_a1) = (x.0, x.1, -x.2);
    let (r2, c2, two_a2) = (y.0, y.1, -y.2);
    // x^∨ = r - c1 + aρ; the top-degree part of x^∨ ∧ y is
    // r·a' + (-c1)·c1' + a·r'.
    let top_twice = r1 * two_a2 - 2 * dense_inner(c1, c2) + two_a1 * r2;
    -top_twice
}

/// The orthonormal model of `E8` with doubled coordinates, so every vector is
/// an integer 8-tuple whose entries are all even or all odd.
pub struct E8Model {
    /// Doubled simple roots `α1, …, α8`.
    pub simple: [[Int; 8]; 8],
    inverse: Vec<Vec<Q>>,
    layers: Mutex<BTreeMap<Int, Vec<ClassVector>>>,
}

impl E8Model {
    pub fn new() -> Self {
        let mut simple = [[0; 8]; 8];
        simple[0] = [1, -1, -1, -1, -1, -1, -1, 1];
        simple[1][0] = 2;
        simple[1][1] = 2;
        for k in 2..8 {
            // α3 = e2 - e1, α4 = e3 - e2, …, α8 = e7 - e6
            simple[k][k - 1] = 2;
            simple[k][k - 2] = -2;
        }
        // Columns of A are the simple roots; invert A over ℚ.
        let n = 8;
        let mut a: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut row: Vec<Q> = (0..n).map(|j| Q::from(simple[j][i])).collect();
                row.extend((0..n).map(|j| Q::from(Int::from(i == j))));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| a[i][c] != Q::from(0)).expect("simple roots are independent");
            a.swap(c, p);
            let lead = a[c][c];
            for x in a[c].iter_mut() {
                *x /= lead;
            }
            for i in 0..n {
                if i != c {
                    let f = a[i][c];
                    if f != Q::from(0) {
                        for j in 0..2 * n {
                            let v = a[c][j];
                            a[i][j] -= f * v;
                        }
                    }
                }
            }
        }
        let inverse = a.into_iter().map(|row| row[n..].to_vec()).collect();
        E8Model { simple, inverse, layers: Mutex::default() }
    }

    /// Euclidean products of the simple roots: the positive Cartan matrix.
    pub fn cartan(&self) -> [[Int; 8]; 8] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.simple[i].iter().zip(&self.simple[j]).map(|(x, y)| x * y).sum::<Int>() / 4)
        })
    }

    /// Simple-root coordinates of a doubled model vector.
    pub fn to_roots(&self, x: &[Int; 8]) -> [Int; 8] {
        std::array::from_fn(|i| {
            let v: Q = (0..8).map(|j| self.inverse[i][j] * Q::from(x[j])).sum();
            assert!(v.is_integer(), "{x:?} is not in the root lattice");
            v.to_integer()
        })
    }

    /// All lattice vectors of squared length `n`, doubled coordinates.
    pub fn vectors_of_norm(&self, n: Int) -> Vec<[Int; 8]> {
        let target = 4 * n;
        let mut out = Vec::new();
        for parity in [0, 1] {
            let mut x = [0; 8];
            fill(0, target, parity, &mut x, &mut out);
        }
        out.retain(|x| x.iter().sum::<Int>().rem_euclid(4) == 0);
        out
    }

    /// Vectors of `-E8` with `η² = -n`, embedded as class vectors.
    pub fn neg_e8_layer(&self, n: Int) -> Vec<ClassVector> {
        if let Some(hit) = self.layers.lock().unwrap().get(&n) {
            return hit.clone();
        }
        let layer: Vec<ClassVector> = self
            .vectors_of_norm(n)
            .iter()
            .map(|x| {
                let y = self.to_roots(x);
                let mut c = [0; 10];
                c[2..].copy_from_slice(&y);
                ClassVector(c)
            })
            .collect();
        self.layers.lock().unwrap().insert(n, layer.clone());
        layer
    }
}

fn fill(i: usize, remaining: Int, parity: Int, x: &mut [Int; 8], out: &mut Vec<[Int; 8]>) {
    if i == 8 {
        if remaining == 0 {
            out.push(*x);
        }
        return;
    }
    let mut bound = 0;
    while (bound + 1) * (bound + 1) <= remaining {
        bound += 1;
    }
    for v in -bound..=bound {
        if v.rem_euclid(2) != parity {
            continue;
        }
        // every later coordinate contributes at least parity²
        let rest = remaining - v * v;
        if rest < (7 - i as Int) * parity {
            continue;
        }
        x[i] = v;
        fill(i + 1, rest, parity, x, out);
    }
    x[i] = 0;
}

fn isqrt(n: Int) -> Int {
    let mut r = (n as f64).sqrt() as Int;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn representative(x: ClassVector) -> ClassVector {
    match x.0.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => ClassVector(x.0.map(|v| -v)),
        _ => x,
    }
}

/// Bounds on `(ξ,f)` and `(ξ,σ)` used by [`walls_oracle`].
pub fn oracle_box(h: &ClassVector, r: Int, delta: Int) -> (Int, Int) {
    let b = (r * r * delta) / 4;
    let hh = dense_inner(h, h);
    assert!(hh > 0);
    let (hs, hf) = (h.0[0], h.0[1]);
    // |x| ≤ |hs|·√(2B/hh)  ⇔  x² ≤ hs²·2B/hh
    (isqrt(hs * hs * 2 * b / hh), isqrt(hf * hf * 2 * b / hh))
}

/// Largest `-E8` layer [`walls_oracle`] has to list for `h`.
pub fn oracle_depth(h: &ClassVector, r: Int, delta: Int) -> Int {
    let (x, y) = oracle_box(h, r, delta);
    2 * x * y + (r * r * delta) / 4
}

/// Walls of type `(r, Δ)` through `h`, by direct search: with the majorant
/// `Q_H(ξ) = -ξ² + 2(ξ,H)²/H²` one gets `|(ξ,f)| ≤ |H_σ|·√(2B/H²)` and
/// `|(ξ,σ)| ≤ |H_f|·√(2B/H²)` for `ξ ⊥ H`, `ξ² ≥ -B`; the `-E8` part then
/// has bounded norm and a fixed pairing with the `-E8` part of `H`.
pub fn walls_oracle(model: &E8Model, h: &ClassVector, r: Int, delta: Int) -> BTreeSet<ClassVector> {
    let b = (r * r * delta) / 4;
    let (xmax, ymax) = oracle_box(h, r, delta);
    let (hs, hf) = (h.0[0], h.0[1]);
    let h8 = {
        let mut c = h.0;
        c[0] = 0;
        c[1] = 0;
        ClassVector(c)
    };
    let depth = 2 * xmax * ymax + b;
    assert!(depth <= 60, "oracle layer {depth} too large");
    // (η², (η, h8)) ↦ vectors, for every η with -η² ≤ depth
    let mut index: BTreeMap<(Int, Int), Vec<ClassVector>> = BTreeMap::new();
    index.entry((0, 0)).or_default().push(ClassVector([0; 10]));
    for n in (2..=depth).step_by(2) {
        for eta in model.neg_e8_layer(n) {
            index.entry((n, dense_inner(&eta, &h8))).or_default().push(eta);
        }
    }
    let mut out = BTreeSet::new();
    for x in -xmax..=xmax {
        for y in -ymax..=ymax {
            // ξ = xσ + yf + η, ξ² = 2xy + η², need -B ≤ ξ² ≤ -1.
            let pair_target = -(x * hf + y * hs);
            for n in (2 * x * y + 1).max(0)..=2 * x * y + b {
                for eta in index.get(&(n, pair_target)).into_iter().flatten() {
                    let mut c = eta.0;
                    c[0] = x;
                    c[1] = y;
                    let xi = ClassVector(c);
                    let nx = dense_inner(&xi, &xi);
                    if nx < 0 && 4 * nx >= -r * r * delta {
                        out.insert(representative(xi));
                    }
                }
            }
        }
    }
    out
}

/// Primitivity in `{(r, c1, s) : s ≡ r mod 2}` by trial division: `v` is not
/// primitive iff some `d ≥ 2` divides `r`, `c1` and `s` with `s/d ≡ r/d mod 2`.
pub fn primitive_by_division(r: Int, c1: &ClassVector, s: Int) -> bool {
    let m = c1.0.iter().chain([&r, &s]).map(|v| v.abs()).max().unwrap_or(0);
    if m == 0 {
        return false;
    }
    for d in 2..=m {
        if r % d == 0 && s % d == 0 && c1.0.iter().all(|c| c % d == 0) && (r / d - s / d).rem_euclid(2) == 0 {
            return false;
        }
    }
    true
}

/// Determinant by Gaussian elimination over ℚ.
pub fn rational_det(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.iter().map(|row| row.iter().map(|&x| Q::from(x)).collect()).collect();
    let mut det = Q::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != Q::from(0)) else {
            return 0;
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let v = a[c][j];
                a[i][j] -= f * v;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}
