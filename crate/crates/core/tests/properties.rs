use mukai_core::arith::Int;
use mukai_core::enumerate::short_vectors_with;
use mukai_core::exec::Parallelism;
use mukai_core::lattice::{
    self, alternate_decomposition_for, content, orthogonal_complement, primitive_shift, solve_pairing, swap_hyperbolic,
    ClassVector, NegDefSublattice, Sublattice,
};
use mukai_core::mukai::{self, apply_move, Move, MukaiVector};
use mukai_core::reduction::{kim_normalize, normalize_window, reduce_even, verify_certificate, SearchBudget};
use mukai_core::walls::{is_of_type, subsheaf_class, walls_through_with, AmpleClass, WallSpec};
use proptest::prelude::*;

fn class(range: Int) -> impl Strategy<Value = ClassVector> {
    prop::array::uniform10(-range..=range).prop_map(ClassVector)
}

fn e8_class(range: Int) -> impl Strategy<Value = ClassVector> {
    prop::array::uniform8(-range..=range).prop_map(ClassVector::from_e8)
}

fn mukai_vector() -> impl Strategy<Value = MukaiVector> {
    (-12 as Int..=12, class(4), -20 as Int..=20)
        .prop_map(|(r, c1, s)| MukaiVector::new(r, c1, 2 * s + r.rem_euclid(2)).unwrap())
}

fn hyperbolic_class() -> impl Strategy<Value = ClassVector> {
    (1 as Int..=6, 1 as Int..=6, e8_class(1)).prop_map(|(a, b, x)| ClassVector::hyperbolic(a, b) + x)
}

proptest! {
    #[test]
    fn form_is_symmetric_bilinear_and_even(x in class(20), y in class(20), z in class(20), a in -9 as Int..=9) {
        prop_assert_eq!(lattice::inner(&x, &y), lattice::inner(&y, &x));
        prop_assert_eq!(lattice::inner(&(a * x + y), &z), a * lattice::inner(&x, &z) + lattice::inner(&y, &z));
        prop_assert_eq!(lattice::norm(&x).rem_euclid(2), 0);
    }

    #[test]
    fn twist_is_an_isometry(v in mukai_vector(), w in mukai_vector(), d in class(5)) {
        let (tv, tw) = (mukai::twist(&v, &d), mukai::twist(&w, &d));
        prop_assert_eq!(mukai::mukai_pairing(&tv, &tw), mukai::mukai_pairing(&v, &w));
        prop_assert_eq!(mukai::is_primitive(&tv), mukai::is_primitive(&v));
        prop_assert_eq!(mukai::v_square(&v), mukai::mukai_pairing(&v, &v));
    }

    #[test]
    fn twist_is_a_group_action(v in mukai_vector(), d in class(5), e in class(5)) {
        prop_assert_eq!(mukai::twist(&mukai::twist(&v, &d), &e), mukai::twist(&v, &(d + e)));
        prop_assert_eq!(mukai::twist(&mukai::twist(&v, &d), &-d), v);
    }

    #[test]
    fn switch_keeps_square_and_primitivity(r in 1 as Int..=20, s in 1 as Int..=20, xi in e8_class(3)) {
        prop_assume!((r - s) % 2 == 0 && !xi.is_zero());
        let v = MukaiVector::new(r, xi, s).unwrap();
        let w = mukai::switch(&v).unwrap();
        prop_assert_eq!((w.r, w.c1, w.s), (s, -xi, r));
        prop_assert_eq!(mukai::v_square(&w), mukai::v_square(&v));
        prop_assert_eq!(mukai::is_primitive(&w), mukai::is_primitive(&v));
        prop_assert_eq!(mukai::switch(&w).unwrap(), v);
    }

    #[test]
    fn chern_round_trip(v in mukai_vector()) {
        let d = mukai::to_chern(&v);
        prop_assert_eq!(mukai::from_chern(&d), v);
        prop_assert_eq!(mukai::euler_char(&v), d.r + lattice::norm(&d.c1) / 2 - d.c2);
    }

    #[test]
    fn move_inverses_undo(v in mukai_vector(), d in class(4), root in 0usize..240) {
        let roots = lattice_roots();
        let b = alternate_decomposition_for(&roots[root]).unwrap();
        for m in [Move::Twist(d), Move::ReBase(b), Move::ReBase(swap_hyperbolic())] {
            let w = apply_move(&v, &m).unwrap();
            prop_assert_eq!(mukai::v_square(&w), mukai::v_square(&v));
            prop_assert_eq!(apply_move(&w, &m.inverse()).unwrap(), v);
        }
    }

    #[test]
    fn window_lands_in_half_open_interval(v in mukai_vector()) {
        prop_assume!(v.r > 0);
        let (w, m) = normalize_window(&v).unwrap();
        prop_assert_eq!(apply_move(&v, &m).unwrap(), w);
        for d in [w.c1.sigma_coeff(), w.c1.f_coeff()] {
            prop_assert!(-w.r < 2 * d && 2 * d <= w.r);
        }
    }

    #[test]
    fn kim_reaches_t_zero_or_one(c1 in class(6), t in -40 as Int..=40) {
        let v = MukaiVector::new(2, c1, -2 * t).unwrap();
        let (m, w) = kim_normalize(&v).unwrap();
        prop_assert!(matches!(w.t(), Some(0 | 1)));
        prop_assert_eq!(apply_move(&v, &m).unwrap(), w);
    }

    #[test]
    fn primitive_shift_postcondition(x in e8_class(6), r in 1 as Int..=24, bound in prop::option::of(-400 as Int..=40)) {
        let e8 = Sublattice::neg_e8();
        let xi = primitive_shift(&e8, &x, r, bound).unwrap();
        let l = mukai_core::arith::gcd(r, content(&x));
        let y = x + r * xi;
        prop_assert_eq!(content(&y), l);
        if let Some(m) = bound {
            prop_assert!(2 * lattice::inner(&x, &xi) + r * lattice::norm(&xi) < m);
        }
    }

    #[test]
    fn solve_pairing_postcondition(y in class(7), m in -50 as Int..=50) {
        prop_assume!(lattice::is_primitive(&y));
        let eta = solve_pairing(&Sublattice::full(), &y, m).unwrap();
        prop_assert_eq!(lattice::inner(&eta, &y), m);
    }

    #[test]
    fn complement_is_orthogonal(h in hyperbolic_class()) {
        prop_assume!(lattice::norm(&h) > 0);
        let comp = orthogonal_complement(&h).unwrap();
        prop_assert_eq!(comp.rank(), 9);
        for b in comp.basis() {
            prop_assert_eq!(lattice::inner(b, &h), 0);
        }
    }

    #[test]
    fn wall_type_bound(xi in class(3), r in 2 as Int..=6, delta in 1 as Int..=6) {
        let spec = WallSpec::new(r, delta).unwrap();
        let n = lattice::norm(&xi);
        prop_assert_eq!(is_of_type(&xi, &spec), n < 0 && 4 * n >= -r * r * delta);
        prop_assert_eq!(spec.min_norm(), -((r * r * delta) / 4));
    }

    #[test]
    fn subsheaf_class_is_odd(r in 2 as Int..=8, rp in 1 as Int..=7, a in class(4), b in class(4)) {
        prop_assume!(rp < r);
        prop_assert_eq!(subsheaf_class(r, &a, rp, &b).unwrap(), -subsheaf_class(r, &-a, rp, &-b).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_certificates_verify(r in 3 as Int..=10, c1 in class(5), s in -20 as Int..=20) {
        let v = MukaiVector::new(2 * r, c1, 2 * s).unwrap();
        prop_assume!(mukai::is_primitive(&v));
        let cert = reduce_even(&v, &SearchBudget { ab: 64, eta: 32 }).unwrap();
        let check = verify_certificate(&cert);
        prop_assert!(check.ok, "{}", check.detail());
        prop_assert!(matches!(cert.final_.r, 2 | 4));
        for step in &cert.steps {
            prop_assert_eq!(mukai::v_square(&step.result), mukai::v_square(&v));
        }
    }

    #[test]
    fn sequential_and_parallel_walls_agree(h in hyperbolic_class(), r in 2 as Int..=3) {
        prop_assume!(lattice::norm(&h) > 0);
        let spec = WallSpec::new(r, 4).unwrap();
        let ample = AmpleClass::new(h).unwrap();
        prop_assert_eq!(
            walls_through_with(&ample, &spec, Parallelism::Sequential).unwrap(),
            walls_through_with(&ample, &spec, Parallelism::Parallel).unwrap()
        );
    }

    #[test]
    fn sequential_and_parallel_short_vectors_agree(h in hyperbolic_class()) {
        prop_assume!(lattice::norm(&h) > 0);
        let comp = orthogonal_complement(&h).unwrap();
        prop_assert_eq!(
            short_vectors_with(&comp, -6, -1, Parallelism::Sequential).unwrap(),
            short_vectors_with(&comp, -6, -1, Parallelism::Parallel).unwrap()
        );
    }
}

fn lattice_roots() -> &'static [ClassVector] {
    static ROOTS: std::sync::OnceLock<Vec<ClassVector>> = std::sync::OnceLock::new();
    ROOTS.get_or_init(|| mukai_core::enumerate::short_vectors(&NegDefSublattice::neg_e8(), -2, -2).unwrap())
}
