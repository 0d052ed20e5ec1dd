use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use expansive_core::analysis::{companion_set, power_containment, Mode, SeparationTable};
use expansive_core::exactnum::{interval_refine, ord_compare, ExactScalar, OrdinalCnf};
use expansive_core::space::{orbit, power_system, truncate, Delta, IndexBounds, SystemRef};
use expansive_core::winding::{build_harmonic, build_winding_x2, standard_s, X2Params};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn scalar() -> impl Strategy<Value = ExactScalar> {
    (-40i64..40, 1i64..24, -40i64..40, 1i64..24).prop_map(|(a, b, c, d)| ExactScalar::quad(q(a, b), q(c, d)))
}

fn ordinal() -> impl Strategy<Value = OrdinalCnf> {
    prop::collection::vec((0u32..4, 1u64..5), 0..4).prop_map(OrdinalCnf::from_terms)
}

fn x2() -> SystemRef {
    Arc::new(build_winding_x2(X2Params::new(2, Default::default())).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, ExactScalar::zero());
        if let Some(inv) = a.recip() {
            prop_assert_eq!(&a * &inv, ExactScalar::one());
        }
    }

    #[test]
    fn order_is_compatible_with_addition(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.cmp(&b), (&a + &c).cmp(&(&b + &c)));
        prop_assert_eq!(a.cmp(&b), (&a - &b).signum());
    }

    #[test]
    fn refinement_encloses_and_narrows(a in scalar(), bits in 1u32..80) {
        let iv = interval_refine(&a, bits);
        prop_assert!(iv.contains(&a));
        prop_assert!(iv.width() <= q(1, 1) / BigRational::from_integer(BigInt::from(2).pow(bits)));
        let finer = interval_refine(&a, bits + 8);
        prop_assert!(iv.contains_interval(&finer));
    }

    #[test]
    fn text_round_trip(a in scalar(), o in ordinal()) {
        prop_assert_eq!(a.to_string().parse::<ExactScalar>().unwrap(), a);
        prop_assert_eq!(o.to_string().parse::<OrdinalCnf>().unwrap(), o);
    }

    #[test]
    fn ordinal_addition(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_ne!(ord_compare(&a.add(&b), &a), Ordering::Less);
        prop_assert_eq!(ord_compare(&a.succ(), &a), Ordering::Greater);
        if let Some(d) = a.add(&b).left_sub(&a) {
            prop_assert_eq!(d, b);
        }
    }

    #[test]
    fn metric_axioms_on_x2(i in 0usize..125, j in 0usize..125, k in 0usize..125) {
        let tr = truncate(x2(), &IndexBounds::symmetric(4, 2), 0).unwrap();
        let pts = tr.points();
        let (a, b, c) = (&pts[i % pts.len()], &pts[j % pts.len()], &pts[k % pts.len()]);
        let d = |x, y| tr.distance(x, y).unwrap().upper();
        prop_assert_eq!(d(a, a), ExactScalar::zero());
        prop_assert_eq!(d(a, b), d(b, a));
        if a != b {
            prop_assert!(d(a, b) > ExactScalar::zero());
        }
        prop_assert!(d(a, c) <= &d(a, b) + &d(b, c));
    }

    #[test]
    fn companions_shrink_with_horizon_and_delta(h in 0u32..12, i in 0usize..200) {
        let tr = truncate(x2(), &IndexBounds::symmetric(6, 2), 12).unwrap();
        let x = tr.points()[i % tr.len()].clone();
        let d = ExactScalar::ratio(1, 8);
        let now = companion_set(&tr, &x, &d, h, Mode::TwoSided).unwrap().members;
        let later = companion_set(&tr, &x, &d, h + 1, Mode::TwoSided).unwrap().members;
        prop_assert!(later.iter().all(|y| now.contains(y)));
        let smaller = companion_set(&tr, &x, &ExactScalar::ratio(1, 16), h, Mode::TwoSided).unwrap().members;
        prop_assert!(smaller.iter().all(|y| now.contains(y)));
        let fwd = companion_set(&tr, &x, &d, h, Mode::Forward).unwrap().members;
        prop_assert!(now.iter().all(|y| fwd.contains(y)));
        prop_assert!(now.contains(&x));
    }

    #[test]
    fn power_orbits(i in 0usize..60, k in prop::sample::select(vec![-3i64, -2, 2, 3]), m in -4i64..4) {
        let sys = x2();
        let tr = truncate(sys.clone(), &IndexBounds::symmetric(5, 1), 0).unwrap();
        let x = tr.points()[i % tr.len()].clone();
        let p = power_system(sys.clone(), k).unwrap();
        let via_power = orbit(&*p, &x, m, m).unwrap().remove(0);
        let direct = orbit(&*sys, &x, k * m, k * m).unwrap().remove(0);
        prop_assert_eq!(via_power, direct);
    }
}

#[test]
fn powers_contain_companions_on_every_point() {
    let systems: [(SystemRef, IndexBounds); 3] = [
        (Arc::new(standard_s()), IndexBounds::symmetric(10, 0)),
        (Arc::new(build_harmonic()), IndexBounds::new(1, 40, 0)),
        (x2(), IndexBounds::symmetric(5, 2)),
    ];
    for (sys, b) in systems {
        let tr = truncate(sys, &b, 12).unwrap();
        for k in [2, 3, -2] {
            for d in [ExactScalar::ratio(1, 4), ExactScalar::ratio(1, 16)] {
                let c = power_containment(&tr, k, &d, 12).unwrap();
                assert!(c.holds(), "k={k} delta={d}: {:?}", &c.violations[..c.violations.len().min(4)]);
            }
        }
    }
}

#[test]
fn separation_table_is_symmetric() {
    let tr = truncate(x2(), &IndexBounds::symmetric(4, 2), 16).unwrap();
    let t = SeparationTable::build(&tr, &Delta::new(ExactScalar::ratio(1, 8)).unwrap(), 16, Mode::TwoSided).unwrap();
    for i in 0..tr.len() {
        for j in 0..tr.len() {
            assert_eq!(t.get(i, j), t.get(j, i));
        }
    }
}
