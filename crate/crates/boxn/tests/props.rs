//! Property tests for the algebraic core.

use boxn::augmentation::{generator_decompose, Side};
use boxn::gram::{rational_approx, simplest_in_open_interval};
use boxn::groups::{standard, GroupModel, Word};
use boxn::ringalg::{RingElement, Scalar};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn arb_word(alphabet_len: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..alphabet_len, 0..=max_len).prop_map(Word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_idempotent_free(w in arb_word(4, 12)) {
        let f = GroupModel::free(2);
        let n = f.normalize(&w).unwrap();
        prop_assert_eq!(f.normalize(&n).unwrap(), n);
    }

    #[test]
    fn inverse_law_s3(w in arb_word(3, 10)) {
        let g = standard::symmetric3();
        let inv = g.invert(&w).unwrap();
        prop_assert_eq!(g.multiply(&w, &inv).unwrap(), Word::identity());
        prop_assert_eq!(g.multiply(&inv, &w).unwrap(), Word::identity());
    }

    #[test]
    fn star_is_antiautomorphism(
        seed_x in prop::collection::vec((arb_word(3, 4), -4i64..5), 0..4),
        seed_y in prop::collection::vec((arb_word(3, 4), -4i64..5), 0..4),
    ) {
        let g = standard::symmetric3();
        let mk = |terms: &[(Word, i64)]| {
            RingElement::from_terms(
                &g,
                terms.iter().map(|(w, c)| (w.clone(), Scalar::from_integer((*c).into()))),
            )
            .unwrap()
        };
        let x = mk(&seed_x);
        let y = mk(&seed_y);
        prop_assert_eq!(
            x.mul(&y).unwrap().star(),
            y.star().mul(&x.star()).unwrap()
        );
        // augmentation is a *-invariant homomorphism
        prop_assert_eq!(
            x.mul(&y).unwrap().augmentation(),
            x.augmentation() * y.augmentation()
        );
        prop_assert_eq!(x.star().augmentation(), x.augmentation());
    }

    #[test]
    fn generator_decomposition_roundtrips(q8_elem in any::<u64>()) {
        // derive a deterministic augmentation-ideal element from the seed
        use rand::{Rng, SeedableRng};
        let g = standard::quaternion8();
        let elements = g.all_elements().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q8_elem);
        let mut xi = RingElement::zero(&g);
        for _ in 0..rng.gen_range(1..4) {
            let w = elements[rng.gen_range(0..elements.len())].clone();
            let c = Scalar::from_integer(rng.gen_range(-3i64..4).into());
            xi = xi.add(&RingElement::one_minus(&g, &w).unwrap().scale(&c)).unwrap();
        }
        for side in [Side::Left, Side::Right] {
            let d = generator_decompose(&xi, side).unwrap();
            prop_assert_eq!(d.recompose(&g).unwrap(), xi.clone());
        }
    }

    #[test]
    fn simplest_rational_is_simplest(
        a_num in -40i64..40, a_den in 1i64..20,
        width_num in 1i64..10, width_den in 1i64..20,
    ) {
        let lo = Scalar::new(BigInt::from(a_num), BigInt::from(a_den));
        let hi = lo.clone() + Scalar::new(BigInt::from(width_num), BigInt::from(width_den));
        let s = simplest_in_open_interval(&lo, &hi);
        prop_assert!(lo < s && s < hi);
        // nothing with a strictly smaller denominator fits the interval
        let den = s.denom().to_i64().unwrap();
        for q in 1..den {
            let lo_f = lo.to_f64().unwrap();
            let hi_f = hi.to_f64().unwrap();
            let mut p = (lo_f * q as f64).floor() as i64 - 1;
            loop {
                let candidate = Scalar::new(BigInt::from(p), BigInt::from(q));
                if candidate >= hi {
                    break;
                }
                prop_assert!(
                    candidate <= lo,
                    "{candidate} is simpler than {s} in ({lo}, {hi})"
                );
                p += 1;
                if (p as f64) > hi_f * q as f64 + 2.0 {
                    break;
                }
            }
        }
    }

    #[test]
    fn rational_approx_respects_bound(x in -1000.0f64..1000.0, exp in 1u32..20) {
        let bound = 1u64 << exp;
        let r = rational_approx(x, bound);
        prop_assert!(r.denom() <= &BigInt::from(bound));
        // approximation error is at most 1/bound against the input
        let err = (r.to_f64().unwrap() - x).abs();
        prop_assert!(err <= 1.0 / bound as f64 + 1e-9, "err {err} at bound {bound}");
    }

    #[test]
    fn ring_ops_respect_augmentation_kernel(
        x_seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let z = standard::integers();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(x_seed);
        let mut x = RingElement::zero(&z);
        for _ in 0..rng.gen_range(1..4) {
            let len = rng.gen_range(0..4);
            let w = Word((0..len).map(|_| rng.gen_range(0..2u32)).collect());
            let c = Scalar::from_integer(rng.gen_range(-3i64..4).into());
            x = x.add(&RingElement::one_minus(&z, &w).unwrap().scale(&c)).unwrap();
        }
        prop_assert!(x.augmentation().is_zero());
        prop_assert!(x.mul(&x).unwrap().augmentation().is_zero());
        prop_assert!(x.add(&x.star()).unwrap().is_hermitian());
    }
}
