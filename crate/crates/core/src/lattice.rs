//! The rank-10 even unimodular lattice `H ⊥ -E8` in the fixed basis
//! `(σ, f, e1, …, e8)`.
//!
//! The hyperbolic block has `σ² = f² = 0`, `σ·f = 1`. The `-E8` block is the
//! negated Cartan matrix with the Bourbaki labeling: the simple roots form the
//! chain `1-3-4-5-6-7-8` with node 2 attached to node 4. In particular
//! `e2·e3 = 0` and every `ei² = -2`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, Int};

pub const RANK: usize = 10;
pub const SIGMA: usize = 0;
pub const F: usize = 1;

/// Dynkin-adjacent pairs of the E8 labeling (1-based node numbers).
pub const E8_ADJACENCY: [(usize, usize); 7] = [(1, 3), (3, 4), (2, 4), (4, 5), (5, 6), (6, 7), (7, 8)];

/// Ambient coordinate index of `e_i` (`i` in `1..=8`).
pub const fn e(i: usize) -> usize {
    i + 1
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("rank too small")]
    RankTooSmall,
    #[error("quadratic bound requires definite form")]
    BoundRequiresDefinite,
    #[error("primitive element required")]
    NotPrimitive,
    #[error("sublattice is not unimodular")]
    NotUnimodular,
    #[error("complement not negative definite")]
    ComplementNotNegativeDefinite,
    #[error("unbounded request")]
    UnboundedRequest,
    #[error("not in positive cone")]
    NotInPositiveCone,
    #[error("vector {0} does not lie in the sublattice")]
    NotInSublattice(Box<ClassVector>),
    #[error("basis change is not an isometry with determinant ±1")]
    NotIsometry,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse class vector: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// An element of `H²(X,ℤ)_f` in the basis `(σ, f, e1, …, e8)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassVector(pub [Int; RANK]);

impl ClassVector {
    pub const ZERO: ClassVector = ClassVector([0; RANK]);

    pub fn new(coords: [Int; RANK]) -> Self {
        ClassVector(coords)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0; RANK];
        c[i] = 1;
        ClassVector(c)
    }

    pub fn sigma() -> Self {
        Self::basis(SIGMA)
    }

    pub fn f() -> Self {
        Self::basis(F)
    }

    /// `e_i` for `i` in `1..=8`.
    pub fn e(i: usize) -> Self {
        Self::basis(e(i))
    }

    /// `a·σ + b·f`
    pub fn hyperbolic(a: Int, b: Int) -> Self {
        let mut c = [0; RANK];
        c[SIGMA] = a;
        c[F] = b;
        ClassVector(c)
    }

    /// Embeds `-E8` coordinates `(x1, …, x8)`.
    pub fn from_e8(x: [Int; 8]) -> Self {
        let mut c = [0; RANK];
        c[2..].copy_from_slice(&x);
        ClassVector(c)
    }

    pub fn coords(&self) -> &[Int; RANK] {
        &self.0
    }

    pub fn sigma_coeff(&self) -> Int {
        self.0[SIGMA]
    }

    pub fn f_coeff(&self) -> Int {
        self.0[F]
    }

    /// The `-E8` component, as a class vector with zero hyperbolic part.
    pub fn e8_part(&self) -> ClassVector {
        let mut c = self.0;
        c[SIGMA] = 0;
        c[F] = 0;
        ClassVector(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn inner(&self, other: &ClassVector) -> Int {
        inner(self, other)
    }

    pub fn norm(&self) -> Int {
        norm(self)
    }
}

impl Add for ClassVector {
    type Output = ClassVector;
    fn add(mut self, rhs: ClassVector) -> ClassVector {
        self += rhs;
        self
    }
}

impl AddAssign for ClassVector {
    fn add_assign(&mut self, rhs: ClassVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for ClassVector {
    type Output = ClassVector;
    fn sub(self, rhs: ClassVector) -> ClassVector {
        self + (-rhs)
    }
}

impl Neg for ClassVector {
    type Output = ClassVector;
    fn neg(self) -> ClassVector {
        ClassVector(self.0.map(|c| -c))
    }
}

impl Mul<ClassVector> for Int {
    type Output = ClassVector;
    fn mul(self, rhs: ClassVector) -> ClassVector {
        ClassVector(rhs.0.map(|c| self * c))
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for ClassVector {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| LatticeError::Parse(format!("expected [a0,...,a9], got {s:?}")))?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != RANK {
            return Err(LatticeError::Parse(format!("expected {RANK} coordinates, got {}", parts.len())));
        }
        let mut c = [0; RANK];
        for (slot, p) in c.iter_mut().zip(parts) {
            *slot = p.parse().map_err(|e| LatticeError::Parse(format!("{p:?}: {e}")))?;
        }
        Ok(ClassVector(c))
    }
}

impl Serialize for ClassVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClassVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        <[Int; RANK]>::deserialize(deserializer).map(ClassVector)
    }
}

/// The intersection form `H ⊥ -E8` as a dense matrix.
pub fn gram_matrix() -> [[Int; RANK]; RANK] {
    let mut g = [[0; RANK]; RANK];
    g[SIGMA][F] = 1;
    g[F][SIGMA] = 1;
    for i in 1..=8 {
        g[e(i)][e(i)] = -2;
    }
    for (a, b) in E8_ADJACENCY {
        g[e(a)][e(b)] = 1;
        g[e(b)][e(a)] = 1;
    }
    g
}

/// The `-E8` block alone (8x8).
pub fn neg_e8_matrix() -> Vec<Vec<Int>> {
    let g = gram_matrix();
    g[2..].iter().map(|row| row[2..].to_vec()).collect()
}

type Matrix = [[Int; RANK]; RANK];

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = [[0; RANK]; RANK];
    for i in 0..RANK {
        for k in 0..RANK {
            if a[i][k] != 0 {
                for j in 0..RANK {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn transpose(a: &Matrix) -> Matrix {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// `G⁻¹`, integral since the form is unimodular.
fn gram_inverse() -> &'static Matrix {
    static INV: OnceLock<Matrix> = OnceLock::new();
    INV.get_or_init(|| {
        let g: Vec<Vec<Int>> = gram_matrix().iter().map(|r| r.to_vec()).collect();
        let inv = arith::unimodular_inverse(&g).expect("the form is unimodular");
        std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j]))
    })
}

pub fn inner(x: &ClassVector, y: &ClassVector) -> Int {
    let (x, y) = (&x.0, &y.0);
    let mut acc = x[SIGMA] * y[F] + x[F] * y[SIGMA];
    for i in 2..RANK {
        acc -= 2 * x[i] * y[i];
    }
    for (a, b) in E8_ADJACENCY {
        let (a, b) = (e(a), e(b));
        acc += x[a] * y[b] + x[b] * y[a];
    }
    acc
}

pub fn norm(x: &ClassVector) -> Int {
    inner(x, x)
}

/// gcd of the ten coordinates; 0 exactly for the zero vector.
pub fn content(x: &ClassVector) -> Int {
    arith::gcd_all(x.0)
}

pub fn is_primitive(x: &ClassVector) -> bool {
    content(x) == 1
}

/// Hyperbolic distance between the rays of two classes in the positive cone.
/// Floating point, for diagnostics only.
pub fn hyperbolic_distance(h1: &ClassVector, h2: &ClassVector) -> Result<f64, LatticeError> {
    let (n1, n2, p) = (norm(h1), norm(h2), inner(h1, h2));
    if n1 <= 0 || n2 <= 0 || p <= 0 {
        return Err(LatticeError::NotInPositiveCone);
    }
    let ratio = p as f64 / ((n1 * n2) as f64).sqrt();
    Ok(ratio.max(1.0).acosh())
}

/// A change of basis of the ambient lattice. Column `j` of the matrix is the
/// `j`-th new basis vector written in the old coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    matrix: Box<[[Int; RANK]; RANK]>,
    inverse: Box<[[Int; RANK]; RANK]>,
}

impl BasisChange {
    /// Validates that `matrix` preserves the form. Such a matrix is
    /// automatically invertible over ℤ with inverse `G⁻¹ Tᵀ G`.
    pub fn new(matrix: [[Int; RANK]; RANK]) -> Result<Self, LatticeError> {
        let g = gram_matrix();
        let gt = mat_mul(&g, &matrix);
        if mat_mul(&transpose(&matrix), &gt) != g {
            return Err(LatticeError::NotIsometry);
        }
        let inverse = mat_mul(&mat_mul(gram_inverse(), &transpose(&matrix)), &g);
        debug_assert_eq!(mat_mul(&inverse, &matrix), *BasisChange::identity().matrix);
        Ok(BasisChange { matrix: Box::new(matrix), inverse: Box::new(inverse) })
    }

    /// Builds the change whose new basis vectors are `images` (old coordinates).
    pub fn from_images(images: [ClassVector; RANK]) -> Result<Self, LatticeError> {
        let mut m = [[0; RANK]; RANK];
        for (j, v) in images.iter().enumerate() {
            for i in 0..RANK {
                m[i][j] = v.0[i];
            }
        }
        Self::new(m)
    }

    pub fn identity() -> Self {
        let mut m = [[0; RANK]; RANK];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        BasisChange { matrix: Box::new(m), inverse: Box::new(m) }
    }

    pub fn matrix(&self) -> &[[Int; RANK]; RANK] {
        &self.matrix
    }

    /// New basis vector `j` in old coordinates.
    pub fn image(&self, j: usize) -> ClassVector {
        ClassVector(std::array::from_fn(|i| self.matrix[i][j]))
    }

    /// Old coordinates of a class given in the new basis.
    pub fn to_old(&self, new: &ClassVector) -> ClassVector {
        ClassVector(std::array::from_fn(|i| (0..RANK).map(|j| self.matrix[i][j] * new.0[j]).sum()))
    }

    /// Coordinates in the new basis of a class given in the old basis.
    pub fn to_new(&self, old: &ClassVector) -> ClassVector {
        ClassVector(std::array::from_fn(|i| (0..RANK).map(|j| self.inverse[i][j] * old.0[j]).sum()))
    }

    pub fn inverse(&self) -> BasisChange {
        BasisChange { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    pub fn determinant(&self) -> Int {
        let rows: Vec<Vec<Int>> = self.matrix.iter().map(|r| r.to_vec()).collect();
        arith::determinant(&rows)
    }

    /// Known name, if this is one of the named changes.
    pub fn name(&self) -> Option<&'static str> {
        if *self == alternate_decomposition() {
            Some("alternate")
        } else if *self == alternate_decomposition().inverse() {
            Some("alternate_inverse")
        } else if *self == swap_hyperbolic() {
            Some("swap")
        } else if *self == BasisChange::identity() {
            Some("identity")
        } else {
            None
        }
    }

    pub fn by_name(name: &str) -> Option<BasisChange> {
        match name {
            "alternate" => Some(alternate_decomposition()),
            "alternate_inverse" => Some(alternate_decomposition().inverse()),
            "swap" => Some(swap_hyperbolic()),
            "identity" => Some(BasisChange::identity()),
            _ => None,
        }
    }
}

impl Serialize for BasisChange {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.name() {
            Some(n) => serializer.serialize_str(n),
            None => self.matrix.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for BasisChange {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Matrix(Box<[[Int; RANK]; RANK]>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(n) => BasisChange::by_name(&n)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown basis change {n:?}"))),
            Repr::Matrix(m) => BasisChange::new(*m).map_err(serde::de::Error::custom),
        }
    }
}

/// `σ' = σ`, `f' = σ + f + e1`, `e1' = e1 + 2σ`, `e3' = e3 - σ`, all other
/// `ei' = ei`. This is [`alternate_decomposition_for`] at the root `e1`.
pub fn alternate_decomposition() -> BasisChange {
    alternate_decomposition_for(&ClassVector::e(1)).expect("e1 is a root of -E8")
}

/// Second orthogonal decomposition `H' ⊥ -E8'` attached to a root `e` of
/// the `-E8` block: `σ' = σ`, `f' = σ + f + e` and `ei' = ei - (ei, e)σ`.
///
/// In the new basis `c1 = (r/2)(σ + f) + ξ` has `f'`-coefficient `r/2` and
/// `σ'`-coefficient `r + (ξ, e)`.
pub fn alternate_decomposition_for(root: &ClassVector) -> Result<BasisChange, LatticeError> {
    if root.sigma_coeff() != 0 || root.f_coeff() != 0 || norm(root) != -2 {
        return Err(LatticeError::InvalidArgument(format!("{root} is not a root of the -E8 block")));
    }
    let mut images: [ClassVector; RANK] = std::array::from_fn(ClassVector::basis);
    images[F] = ClassVector::sigma() + ClassVector::f() + *root;
    for i in 1..=8 {
        let ei = ClassVector::e(i);
        images[e(i)] = ei - inner(&ei, root) * ClassVector::sigma();
    }
    BasisChange::from_images(images)
}

/// Exchanges `σ` and `f`.
pub fn swap_hyperbolic() -> BasisChange {
    let mut images: [ClassVector; RANK] = std::array::from_fn(ClassVector::basis);
    images.swap(SIGMA, F);
    BasisChange::from_images(images).expect("swap is an isometry")
}

/// A sublattice of the ambient lattice, given by a basis in ambient
/// coordinates and its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    basis: Vec<ClassVector>,
    gram: Vec<Vec<Int>>,
    /// Set when the basis is a subset of the ambient coordinate vectors.
    coordinate_block: Option<Vec<usize>>,
}

impl Sublattice {
    pub fn from_basis(basis: Vec<ClassVector>) -> Self {
        let gram = basis.iter().map(|a| basis.iter().map(|b| inner(a, b)).collect()).collect();
        Sublattice { basis, gram, coordinate_block: None }
    }

    fn coordinate(indices: Vec<usize>) -> Self {
        let mut s = Self::from_basis(indices.iter().map(|&i| ClassVector::basis(i)).collect());
        s.coordinate_block = Some(indices);
        s
    }

    /// The whole lattice `H ⊥ -E8`.
    pub fn full() -> Self {
        Self::coordinate((0..RANK).collect())
    }

    /// The `-E8` block spanned by `e1, …, e8`.
    pub fn neg_e8() -> Self {
        Self::coordinate((2..RANK).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ClassVector] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<Int>] {
        &self.gram
    }

    pub fn determinant(&self) -> Int {
        arith::determinant(&self.gram)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs() == 1
    }

    /// Leading principal minors alternate in sign, starting negative.
    pub fn is_negative_definite(&self) -> bool {
        arith::leading_minors(&self.gram)
            .iter()
            .enumerate()
            .all(|(k, &m)| if k % 2 == 0 { m < 0 } else { m > 0 })
    }

    /// Coordinates of an ambient vector with respect to the basis.
    pub fn coords_of(&self, x: &ClassVector) -> Result<Vec<Int>, LatticeError> {
        if let Some(idx) = &self.coordinate_block {
            let outside = (0..RANK).any(|i| !idx.contains(&i) && x.0[i] != 0);
            if outside {
                return Err(LatticeError::NotInSublattice(Box::new(*x)));
            }
            return Ok(idx.iter().map(|&i| x.0[i]).collect());
        }
        let cols: Vec<Vec<Int>> = self.basis.iter().map(|b| b.0.to_vec()).collect();
        arith::solve_integral(&cols, &x.0).ok_or_else(|| LatticeError::NotInSublattice(Box::new(*x)))
    }

    pub fn embed(&self, coords: &[Int]) -> ClassVector {
        let mut out = ClassVector::ZERO;
        for (&c, b) in coords.iter().zip(&self.basis) {
            if c != 0 {
                out += c * *b;
            }
        }
        out
    }

    /// Value of the form on sublattice coordinates.
    pub fn form(&self, x: &[Int], y: &[Int]) -> Int {
        let mut acc = 0;
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                acc += a * self.gram[i][j] * b;
            }
        }
        acc
    }
}

/// A sublattice whose form has been certified negative definite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegDefSublattice(Sublattice);

impl NegDefSublattice {
    pub fn new(sub: Sublattice) -> Result<Self, LatticeError> {
        if sub.is_negative_definite() {
            Ok(NegDefSublattice(sub))
        } else {
            Err(LatticeError::InvalidArgument("sublattice is not negative definite".into()))
        }
    }

    pub fn neg_e8() -> Self {
        NegDefSublattice(Sublattice::neg_e8())
    }

    pub fn inner(&self) -> &Sublattice {
        &self.0
    }
}

impl std::ops::Deref for NegDefSublattice {
    type Target = Sublattice;
    fn deref(&self) -> &Sublattice {
        &self.0
    }
}

/// Pairwise (Gauss-style) reduction of a basis with respect to a positive
/// definite bilinear form given by `dot`. Every step is unimodular, so the
/// span is unchanged.
pub(crate) fn pairwise_reduce<F>(vectors: &mut [Vec<Int>], dot: F)
where
    F: Fn(&[Int], &[Int]) -> Int,
{
    let n = vectors.len();
    loop {
        let mut changed = false;
        for j in 0..n {
            let qj = dot(&vectors[j], &vectors[j]);
            if qj == 0 {
                continue;
            }
            for i in 0..n {
                if i == j {
                    continue;
                }
                let q = arith::round_div(dot(&vectors[i], &vectors[j]), qj);
                if q != 0 {
                    let (vi, vj) = (vectors[i].clone(), &vectors[j]);
                    let reduced: Vec<Int> = vi.iter().zip(vj).map(|(a, b)| a - q * b).collect();
                    if dot(&reduced, &reduced) < dot(&vi, &vi) {
                        vectors[i] = reduced;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    vectors.sort_by_key(|v| dot(v, v));
}

/// Integral basis of `{x : x·H = 0}`; negative definite because `H² > 0`
/// and the ambient signature is `(1, 9)`.
pub fn orthogonal_complement(h: &ClassVector) -> Result<NegDefSublattice, LatticeError> {
    if norm(h) <= 0 {
        return Err(LatticeError::ComplementNotNegativeDefinite);
    }
    let w: Vec<Int> = (0..RANK).map(|i| inner(&ClassVector::basis(i), h)).collect();
    let (pivot, cols) = arith::column_reduce(&w);
    let mut kernel: Vec<Vec<Int>> = cols
        .into_iter()
        .enumerate()
        .filter(|(j, _)| *j != pivot)
        .map(|(_, c)| c)
        .collect();
    let as_vec = |c: &[Int]| ClassVector(std::array::from_fn(|i| c[i]));
    pairwise_reduce(&mut kernel, |a, b| -inner(&as_vec(a), &as_vec(b)));
    let basis: Vec<ClassVector> = kernel.iter().map(|c| as_vec(c)).collect();
    if let Some(bad) = basis.iter().find(|b| inner(b, h) != 0) {
        return Err(LatticeError::Internal(format!("complement vector {bad} pairs nonzero with {h}")));
    }
    NegDefSublattice::new(Sublattice::from_basis(basis))
        .map_err(|_| LatticeError::Internal("complement failed the definiteness certificate".into()))
}

fn primes_from(start: Int) -> impl Iterator<Item = Int> {
    (start.max(2)..).filter(|&n| arith::is_prime(n))
}

/// Finds `ξ` in the sublattice such that `(x + rξ)/l` is primitive, where
/// `l = gcd(r, x)`. With `bound = Some(M)` the sublattice must be negative
/// definite and additionally `2⟨x,ξ⟩ + r⟨ξ,ξ⟩ < M`.
pub fn primitive_shift(
    sub: &Sublattice,
    x: &ClassVector,
    r: Int,
    bound: Option<Int>,
) -> Result<ClassVector, LatticeError> {
    let n = sub.rank();
    if n <= 1 {
        return Err(LatticeError::RankTooSmall);
    }
    if r <= 0 {
        return Err(LatticeError::InvalidArgument(format!("r must be positive, got {r}")));
    }
    if bound.is_some() && !sub.is_negative_definite() {
        return Err(LatticeError::BoundRequiresDefinite);
    }
    let xc = sub.coords_of(x)?;
    let l = arith::gcd(r, arith::gcd_all(xc.iter().copied()));
    let quadratic = |xi: &[Int]| 2 * sub.form(&xc, xi) + r * sub.form(xi, xi);

    let xi = if l == r && xc.iter().all(|&c| c == 0) {
        match bound {
            None => unit(n, 0),
            Some(m) => {
                let (i, j) = if n >= 3 { (1, 2) } else { (0, 1) };
                let primes: Vec<Int> = primes_from(2).take(2).collect();
                let (mut p, mut q) = (primes[0], primes[1]);
                loop {
                    let mut xi = vec![0; n];
                    xi[i] = p;
                    xi[j] = q;
                    if quadratic(&xi) < m {
                        break xi;
                    }
                    p = q;
                    q = primes_from(q + 1).next().expect("infinitely many primes");
                }
            }
        }
    } else {
        let a: Vec<Int> = xc.iter().map(|c| c / l).collect();
        let i1 = a.iter().position(|&c| c != 0).expect("x/l is nonzero");
        let i2 = (i1 + 1) % n;
        let (a1, a2) = (a[i1], a[i2]);
        let k: Int = arith::prime_divisors(a1).into_iter().filter(|p| a2 % p != 0).product();
        let mut b: Int = 1;
        loop {
            if arith::gcd(b, a1) == 1 {
                let mut xi = vec![0; n];
                xi[i2] = k * b;
                match bound {
                    None => break xi,
                    Some(m) if quadratic(&xi) < m => break xi,
                    Some(_) => {}
                }
            }
            b += 1;
        }
    };

    let shifted: Vec<Int> = xc.iter().zip(&xi).map(|(a, b)| a + r * b).collect();
    if shifted.iter().any(|c| c % l != 0) || arith::gcd_all(shifted.iter().map(|c| c / l)) != 1 {
        return Err(LatticeError::Internal(format!("primitive_shift produced a non-primitive result for {x}")));
    }
    if let Some(m) = bound {
        if quadratic(&xi) >= m {
            return Err(LatticeError::Internal("primitive_shift bound not met".into()));
        }
    }
    Ok(sub.embed(&xi))
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Finds `η` in a unimodular sublattice with `⟨η, y⟩ = m`, for `y`
/// primitive in that sublattice.
pub fn solve_pairing(sub: &Sublattice, y: &ClassVector, m: Int) -> Result<ClassVector, LatticeError> {
    if !sub.is_unimodular() {
        return Err(LatticeError::NotUnimodular);
    }
    let yc = sub.coords_of(y)?;
    if arith::gcd_all(yc.iter().copied()) != 1 {
        return Err(LatticeError::NotPrimitive);
    }
    // w_i = ⟨b_i, y⟩; unimodularity makes gcd(w) = 1.
    let w: Vec<Int> = sub.gram.iter().map(|row| row.iter().zip(&yc).map(|(g, c)| g * c).sum()).collect();
    let (pivot, mut cols) = arith::column_reduce(&w);
    let dot_w = |c: &[Int]| c.iter().zip(&w).map(|(a, b)| a * b).sum::<Int>();
    if dot_w(&cols[pivot]) != 1 {
        return Err(LatticeError::Internal("pairing functional of a primitive vector is not surjective".into()));
    }
    let mut eta = cols.swap_remove(pivot);
    let euclid = |a: &[Int], b: &[Int]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Int>();
    pairwise_reduce(&mut cols, euclid);
    loop {
        let mut changed = false;
        for k in &cols {
            let q = arith::round_div(euclid(&eta, k), euclid(k, k));
            if q != 0 {
                let cand: Vec<Int> = eta.iter().zip(k).map(|(a, b)| a - q * b).collect();
                if euclid(&cand, &cand) < euclid(&eta, &eta) {
                    eta = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let eta: Vec<Int> = eta.iter().map(|c| m * c).collect();
    let out = sub.embed(&eta);
    if inner(&out, y) != m {
        return Err(LatticeError::Internal(format!("solve_pairing missed target {m} for {y}")));
    }
    Ok(out)
}
