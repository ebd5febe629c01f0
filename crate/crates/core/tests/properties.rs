use proptest::prelude::*;

use skeincert_core::certify::mfw_report;
use skeincert_core::seifert::is_locally_twisted;
use skeincert_core::skein::{build_tree, evaluate_tree, homfly, Chooser, Strategy};
use skeincert_core::{BraidWord, Diagram, Laurent2, Letter, Sign};

fn sign(pos: bool) -> Sign {
    if pos {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

prop_compose! {
    fn word(max_strands: usize, max_len: usize)
        (n in 2..=max_strands)
        (letters in prop::collection::vec((1..n, any::<bool>()), 0..=max_len), n in Just(n))
        -> BraidWord
    {
        BraidWord::new(letters.into_iter().map(|(i, p)| Letter::new(i, sign(p))).collect(), n).unwrap()
    }
}

fn closure(w: &BraidWord) -> Diagram {
    Diagram::from_braid(w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn braid_round_trip(w in word(6, 12)) {
        let back = BraidWord::parse_with_strands(&w.to_string(), Some(w.strands())).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn skein_relation(w in word(4, 8), pick in any::<prop::sample::Index>()) {
        prop_assume!(!w.is_empty());
        let d = closure(&w);
        let g = pick.index(d.crossing_count());
        let other = d.flip_crossing(g).unwrap();
        let (plus, minus) = match d.sign(g) {
            Sign::Pos => (d.clone(), other),
            Sign::Neg => (other, d.clone()),
        };
        let a = Laurent2::monomial(1, 1, 0);
        let a_inv = Laurent2::monomial(1, -1, 0);
        let z = Laurent2::monomial(1, 0, 1);
        let lhs = &(&a * &homfly(&plus)) - &(&a_inv * &homfly(&minus));
        let rhs = &z * &homfly(&d.smooth_crossing(g).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn strategies_agree(w in word(5, 9), seed in any::<u64>()) {
        let d = closure(&w);
        let p = homfly(&d);
        for s in [Strategy::Descending, Strategy::XCoherent, Strategy::YCoherent] {
            prop_assert_eq!(&evaluate_tree(&build_tree(&d, s, Chooser::Seeded(seed))), &p);
        }
    }

    #[test]
    fn mirror_conjugates_a(w in word(4, 9)) {
        let d = closure(&w);
        prop_assert_eq!(homfly(&d.mirror()), homfly(&d).mirror());
    }

    #[test]
    fn locally_twisted_survives_mirror(w in word(5, 12)) {
        let d = closure(&w);
        prop_assert_eq!(is_locally_twisted(&d), is_locally_twisted(&d.mirror()));
    }

    #[test]
    fn markov_moves_preserve_polynomial(u in word(4, 5), v in word(4, 5), pos in any::<bool>()) {
        let n = u.strands().max(v.strands());
        let u = u.with_strands(n).unwrap();
        let v = v.with_strands(n).unwrap();
        prop_assert_eq!(homfly(&closure(&u.concat(&v))), homfly(&closure(&v.concat(&u))));

        let stab = BraidWord::new(vec![Letter::new(n, sign(pos))], n + 1).unwrap();
        let longer = u.with_strands(n + 1).unwrap().concat(&stab);
        prop_assert_eq!(homfly(&closure(&longer)), homfly(&closure(&u)));
    }

    #[test]
    fn degree_bounds_hold(w in word(5, 10)) {
        let d = closure(&w);
        let r = mfw_report(&d).unwrap();
        let (s, wr) = (r.s as i64, r.writhe);
        prop_assert!(i64::from(r.e) >= -wr - s + 1);
        prop_assert!(i64::from(r.E) <= -wr + s - 1);
        prop_assert!(r.M as i64 <= r.crossing_count as i64 - s + 1);
        prop_assert_eq!(r.mfw_sharp, i64::from(r.E - r.e) / 2 + 1 == s);
    }

    #[test]
    fn seifert_picture_ignores_crossing_signs(w in word(5, 10), pick in any::<prop::sample::Index>()) {
        prop_assume!(!w.is_empty());
        let d = closure(&w);
        let flipped = d.flip_crossing(pick.index(d.crossing_count())).unwrap();
        let (a, b) = (d.seifert_smooth(), flipped.seifert_smooth());
        prop_assert_eq!(a.joins, b.joins);
        prop_assert_eq!(a.circles.len(), b.circles.len());
        for (x, y) in a.circles.iter().zip(&b.circles) {
            prop_assert_eq!((x.clockwise, x.parent, x.depth), (y.clockwise, y.parent, y.depth));
        }
    }
}
