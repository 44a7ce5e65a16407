use extamen::iet::random_angle;
use extamen::{AngleGroup, AngleGroupBuilder, Iet, LampConfig, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn group() -> &'static Arc<AngleGroup> {
    static G: OnceLock<Arc<AngleGroup>> = OnceLock::new();
    G.get_or_init(|| {
        AngleGroupBuilder::new(12).thetas(&["sqrt(2) - 1", "sqrt(3) - 1"]).bases(&["0", "sqrt(7) - 2"]).build().unwrap()
    })
}

fn iet(seed: u64, factors: usize) -> Iet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Iet::random(group(), &mut rng, factors, 3).unwrap()
}

fn point(seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let base = (seed % 2) as u32;
    Point::new(base, random_angle(group(), &mut rng, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(a: u64, b: u64, c: u64) {
        let (f, g, h) = (iet(a, 3), iet(b, 3), iet(c, 3));
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_and_identity(a: u64) {
        let g = iet(a, 4);
        let e = Iet::identity(group());
        prop_assert_eq!(g.compose(&g.inverse()).unwrap(), e.clone());
        prop_assert_eq!(g.inverse().compose(&g).unwrap(), e.clone());
        prop_assert_eq!(g.compose(&e).unwrap(), g.clone());
        prop_assert_eq!(g.inverse().inverse(), g);
    }

    #[test]
    fn composition_acts_pointwise(a: u64, b: u64, x: u64) {
        let (g, h) = (iet(a, 3), iet(b, 3));
        let p = point(x);
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.evaluate(&p).unwrap(), g.evaluate(&h.evaluate(&p).unwrap()).unwrap());
        prop_assert_eq!(g.inverse().evaluate(&g.evaluate(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn cocycle_identity(a: u64, b: u64) {
        let (g, h) = (iet(a, 3), iet(b, 3));
        let lhs = g.compose(&h).unwrap().cocycle().unwrap();
        let rhs = g.cocycle().unwrap().compose(&h.cocycle().unwrap().conjugate(&g).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cocycle_trivial_exactly_on_rotations(a: u64, factors in 0usize..5) {
        let g = iet(a, factors);
        prop_assert_eq!(g.cocycle().unwrap().is_identity(), g.is_rotation());
        let mut rng = ChaCha8Rng::seed_from_u64(a);
        let r = Iet::rotation(group(), random_angle(group(), &mut rng, 5));
        prop_assert!(r.cocycle().unwrap().is_identity());
    }

    #[test]
    fn lamp_xor_is_a_group_law(
        a in prop::collection::btree_set(-20i64..20, 0..12),
        b in prop::collection::btree_set(-20i64..20, 0..12),
        c in prop::collection::btree_set(-20i64..20, 0..12),
    ) {
        let (a, b, c) = (LampConfig::from_points(a), LampConfig::from_points(b), LampConfig::from_points(c));
        prop_assert_eq!(a.xor(&b), b.xor(&a));
        prop_assert_eq!(a.xor(&b).xor(&c), a.xor(&b.xor(&c)));
        prop_assert!(a.xor(&a).is_empty());
        prop_assert_eq!(a.xor(&LampConfig::empty()), a.clone());
        prop_assert_eq!(a.xor(&b).len() % 2, (a.len() + b.len()) % 2);
    }

    #[test]
    fn toggling_twice_restores(a in prop::collection::btree_set(-20i64..20, 0..12), x in -25i64..25) {
        let orig = LampConfig::from_points(a);
        let mut l = orig.clone();
        l.toggle(x);
        prop_assert_ne!(&l, &orig);
        prop_assert_eq!(l.is_lit(&x), !orig.is_lit(&x));
        l.toggle(x);
        prop_assert_eq!(l, orig);
    }

    #[test]
    fn angle_arithmetic(a: u64, b: u64, c: u64, n in -6i32..6) {
        let m = group().m();
        let draw = |s: u64| random_angle(group(), &mut ChaCha8Rng::seed_from_u64(s), 9);
        let (x, y, z) = (draw(a), draw(b), draw(c));
        prop_assert_eq!(x.add_mod(y, m), y.add_mod(x, m));
        prop_assert_eq!(x.add_mod(y, m).add_mod(z, m), x.add_mod(y.add_mod(z, m), m));
        prop_assert!(x.add_mod(x.neg_mod(m), m).is_zero());
        prop_assert_eq!(x.sub_mod(y, m), x.add_mod(y.neg_mod(m), m));
        let mut sum = extamen::Angle::ZERO;
        for _ in 0..n.unsigned_abs() {
            sum = sum.add_mod(if n < 0 { x.neg_mod(m) } else { x }, m);
        }
        prop_assert_eq!(x.scale_mod(n, m), sum);
    }
}
