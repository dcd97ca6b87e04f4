//! Invariant suite behind `mukai verify`: exhaustive sweeps plus seeded
//! random properties, reported as per-property counts.

use std::collections::BTreeSet;

use mukai_core::arith::{gcd, Int};
use mukai_core::enumerate::short_vectors;
use mukai_core::lattice::{self, content, primitive_shift, solve_pairing, ClassVector, NegDefSublattice, Sublattice};
use mukai_core::mukai::{self, MukaiVector};
use mukai_core::reduction::{kim_normalize, reduce_even, verify_certificate, ReductionError, SearchBudget};
use mukai_core::walls::{walls_through, AmpleClass, WallSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Property {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

struct Tally {
    name: &'static str,
    checked: usize,
    failed: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, failed: 0, first: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            self.first.get_or_insert_with(what);
        }
    }

    fn done(self) -> Property {
        Property { name: self.name, checked: self.checked, failed: self.failed, first_failure: self.first }
    }
}

fn class(rng: &mut ChaCha8Rng, range: Int) -> ClassVector {
    ClassVector(std::array::from_fn(|_| rng.gen_range(-range..=range)))
}

fn mukai_vector(rng: &mut ChaCha8Rng) -> MukaiVector {
    let r: Int = rng.gen_range(-10..=10);
    let s = 2 * rng.gen_range(-15..=15) + r.rem_euclid(2);
    MukaiVector::new(r, class(rng, 6), s).expect("parity chosen to match")
}

/// `c1` on the coordinates `σ, f, e1`, entries in `[-3, 3]`.
fn small_classes() -> impl Iterator<Item = ClassVector> {
    (0..343).map(|k: Int| {
        let mut c = [0; 10];
        c[0] = k % 7 - 3;
        c[1] = (k / 7) % 7 - 3;
        c[2] = k / 49 - 3;
        ClassVector(c)
    })
}

fn lattice_identities() -> Property {
    let mut t = Tally::new("lattice determinants");
    let full = Sublattice::full().determinant();
    let e8 = Sublattice::neg_e8().determinant();
    t.check(full == -1, || format!("det = {full}"));
    t.check(e8 == 1, || format!("-E8 det = {e8}"));
    t.done()
}

fn even_norms(rng: &mut ChaCha8Rng, cases: usize) -> Property {
    let mut t = Tally::new("even norms");
    for _ in 0..cases {
        let x = class(rng, 100);
        t.check(lattice::norm(&x) % 2 == 0, || format!("norm({x}) odd"));
    }
    t.done()
}

fn twist_isometry(rng: &mut ChaCha8Rng, cases: usize) -> Property {
    let mut t = Tally::new("twist isometry");
    for _ in 0..cases {
        let (v, w, d) = (mukai_vector(rng), mukai_vector(rng), class(rng, 6));
        let before = mukai::mukai_pairing(&v, &w);
        let after = mukai::mukai_pairing(&mukai::twist(&v, &d), &mukai::twist(&w, &d));
        t.check(before == after, || format!("{v}, {w}, D = {d}"));
    }
    t.done()
}

fn gcd_sweep() -> Property {
    let mut t = Tally::new("gcd sweep");
    for c1 in small_classes() {
        for r in -6..=6 {
            for s in -12..=12 {
                let Ok(v) = MukaiVector::new(r, c1, s) else { continue };
                if !mukai::is_primitive(&v) {
                    continue;
                }
                let g = mukai::gcd_rcs(&v);
                let c2 = mukai::to_chern(&v).c2;
                let ok = match g {
                    1 => r % 2 != 0 || content(&c1) % 2 != 0,
                    2 => c2 % 2 != 0 && (r + s).rem_euclid(4) == 2,
                    _ => false,
                };
                t.check(ok, || format!("{v}: gcd {g}, c2 {c2}"));
            }
        }
    }
    t.done()
}

fn rank_two_primitivity() -> Property {
    let mut t = Tally::new("rank-2 primitivity");
    for c1 in small_classes() {
        for tt in -20..=20 {
            let v = MukaiVector::new(2, c1, -2 * tt).expect("even s");
            let expected = !(content(&c1) % 2 == 0 && tt % 2 != 0);
            t.check(mukai::is_primitive(&v) == expected, || format!("{v}"));
        }
    }
    t.done()
}

fn kim_sweep() -> Property {
    let mut t = Tally::new("rank-2 normalization");
    for c1 in small_classes() {
        for tt in -20..=20 {
            let v = MukaiVector::new(2, c1, -2 * tt).expect("even s");
            let ok = matches!(kim_normalize(&v), Ok((_, w)) if matches!(w.t(), Some(0 | 1)));
            t.check(ok, || format!("{v}"));
        }
    }
    t.done()
}

fn root_layers() -> Property {
    let mut t = Tally::new("-E8 layer counts");
    let e8 = NegDefSublattice::neg_e8();
    for (n, expected) in [(2, 240), (4, 2160)] {
        let got = short_vectors(&e8, -n, -n).map(|v| v.len());
        t.check(got == Ok(expected), || format!("norm -{n}: {got:?}"));
    }
    t.done()
}

/// Walls through `σ + f`, rebuilt from the `-E8` layers: `ξ = x(σ - f) + η`.
fn walls_vs_layers() -> Property {
    let mut t = Tally::new("walls through sigma+f");
    let spec = WallSpec::new(2, 4).expect("valid type");
    let h = AmpleClass::new(ClassVector::hyperbolic(1, 1)).expect("positive");
    let got: BTreeSet<ClassVector> = match walls_through(&h, &spec) {
        Ok(w) => w.into_iter().map(|w| w.xi).collect(),
        Err(e) => {
            t.check(false, || e.to_string());
            return t.done();
        }
    };
    let e8 = NegDefSublattice::neg_e8();
    let mut layer: Vec<ClassVector> = short_vectors(&e8, -4, -2).unwrap_or_default();
    layer.push(ClassVector::ZERO);
    let mut expected = BTreeSet::new();
    for x in -1..=1 {
        for eta in &layer {
            let xi = ClassVector::hyperbolic(x, -x) + *eta;
            let n = lattice::norm(&xi);
            let first = xi.0.iter().find(|&&c| c != 0);
            if (-4..0).contains(&n) && first.is_some_and(|&c| c > 0) {
                expected.insert(xi);
            }
        }
    }
    t.check(got.len() == 1441, || format!("{} walls", got.len()));
    t.check(got == expected, || "differs from layer reconstruction".into());
    t.done()
}

fn reductions(rng: &mut ChaCha8Rng, cases: usize) -> Property {
    let mut t = Tally::new("random reductions");
    let budget = SearchBudget::default();
    let mut produced = 0;
    while produced < cases {
        let r = 2 * rng.gen_range(3..=10);
        let v = MukaiVector::new(r, class(rng, 5), 2 * rng.gen_range(-20..=20)).expect("even s");
        if !mukai::is_primitive(&v) {
            continue;
        }
        produced += 1;
        match reduce_even(&v, &budget) {
            Ok(cert) => {
                let check = verify_certificate(&cert);
                t.check(check.ok, || format!("{v}: {}", check.detail()));
            }
            // exhaustion is a budget outcome, not a wrong answer
            Err(ReductionError::SearchExhausted(_)) => {}
            Err(e) => t.check(false, || format!("{v}: {e}")),
        }
    }
    t.done()
}

fn shifts_and_pairings(rng: &mut ChaCha8Rng, cases: usize) -> [Property; 2] {
    let e8 = Sublattice::neg_e8();
    let mut shift = Tally::new("primitive shift");
    for _ in 0..cases {
        let k: Int = rng.gen_range(1..=4);
        let x = k * ClassVector::from_e8(std::array::from_fn(|_| rng.gen_range(-5..=5)));
        let r = rng.gen_range(1..=24);
        let bound = rng.gen_bool(0.5).then(|| rng.gen_range(-500..=50));
        let ok = primitive_shift(&e8, &x, r, bound).is_ok_and(|xi| {
            let within = bound.is_none_or(|m| 2 * lattice::inner(&x, &xi) + r * lattice::norm(&xi) < m);
            content(&(x + r * xi)) == gcd(r, content(&x)) && within
        });
        shift.check(ok, || format!("x = {x}, r = {r}, M = {bound:?}"));
    }
    let mut pairing = Tally::new("solve pairing");
    let full = Sublattice::full();
    let mut done = 0;
    while done < cases {
        let y = class(rng, 9);
        if !lattice::is_primitive(&y) {
            continue;
        }
        done += 1;
        let m = rng.gen_range(-1000..=1000);
        let ok = solve_pairing(&full, &y, m).is_ok_and(|eta| lattice::inner(&eta, &y) == m);
        pairing.check(ok, || format!("y = {y}, m = {m}"));
    }
    [shift.done(), pairing.done()]
}

pub fn run(seed: u64, cases: usize) -> Vec<Property> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        lattice_identities(),
        even_norms(&mut rng, cases),
        twist_isometry(&mut rng, cases),
        gcd_sweep(),
        rank_two_primitivity(),
        kim_sweep(),
        root_layers(),
        walls_vs_layers(),
        reductions(&mut rng, cases),
    ];
    out.extend(shifts_and_pairings(&mut rng, cases));
    out
}
