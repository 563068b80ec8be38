mod common;

use common::{big, cofactor_det, matrix};
use num_traits::Signed;
use tightlab::exact::{rat, smith_normal_form};
use tightlab::surgery::*;

#[test]
fn e_presentation_has_invariant_factor_five() {
    let link = family_link(Family::E, 3, 1).unwrap();
    let pres = link.presentation();
    assert_eq!(cofactor_det(&pres.relations).abs(), big(5));
    assert_eq!(smith_normal_form(&pres.relations).invariant_factors(), vec![big(5)]);
}

#[test]
fn family_orders_at_three_one() {
    let h: Vec<_> = Family::ALL.iter().map(|&f| family_record(f, 3, 1).unwrap().h).collect();
    assert_eq!(h, vec![big(5), big(89), big(84), big(79)]);
    let s = family_record(Family::S, 3, 1).unwrap();
    assert_eq!(s.surgery_coefficient, Some(rat(89, 8)));
    let u = family_record(Family::U, 3, 1).unwrap();
    assert_eq!(u.surgery_coefficient, Some(rat(79, 6)));
    let e = family_record(Family::E, 3, 1).unwrap();
    assert_eq!(e.surgery_coefficient, Some(rat(5, 1)));
}

#[test]
fn family_orders_match_cofactor_oracle() {
    for p in 2..=5 {
        for n in 1..=3 {
            for f in Family::ALL {
                let link = family_link(f, p, n).unwrap();
                let det = cofactor_det(&link.presentation().relations).abs();
                assert_eq!(det, closed_form_order(f, p, n), "{f}({p},{n})");
                let direct = link.rational_presentation().order_or_zero();
                assert_eq!(direct, det);
                let seifert = family_seifert_link(f, p, n).unwrap();
                assert_eq!(seifert.rational_presentation().order_or_zero(), det);
            }
        }
    }
}

#[test]
fn rational_unknot_order_is_numerator() {
    for (a, b) in [(89, 8), (-7, 6), (79, 6), (13, 1), (-1, 5), (2, 7)] {
        let link = FramedLink::unknot(rat(a, b).into());
        assert_eq!(h1_order(&link), big(i64::abs(a)));
    }
}

#[test]
fn generator_reduction_on_s_three_one() {
    let pres = family_link(Family::S, 3, 1).unwrap().presentation();
    let red = pres.generator_reduction("d").unwrap();
    assert_eq!(red.order, big(89));
    assert_eq!(red.coefficient("d"), Some(&big(1)));
    assert_eq!(red.coefficient("a1"), Some(&big(22)));
    assert_eq!(red.coefficient("a2"), Some(&big(67)));
    assert_eq!(red.coefficient("b"), Some(&big(89 - 30)));
    assert_eq!(red.coefficient("c"), Some(&big(51)));
}

#[test]
fn generator_reduction_closed_form_for_a1() {
    // μ_a1 = (n(n+1)p² + 2np - 1 - n) μ_d
    for p in [3u64, 5, 7] {
        for n in 1..=4u64 {
            let pres = family_link(Family::S, p, n).unwrap().presentation();
            let red = pres.generator_reduction("d").unwrap();
            let (pi, ni) = (p as i64, n as i64);
            let expected = big(ni * (ni + 1) * pi * pi + 2 * ni * pi - 1 - ni) % &red.order;
            assert_eq!(red.coefficient("a1"), Some(&expected));
        }
    }
}

#[test]
fn generator_reduction_errors() {
    // Z/2 + Z/2 is not cyclic
    let pres = FramedLink::from_linking_matrix(&matrix(&[&[2, 0], &[0, 2]]))
        .unwrap()
        .presentation();
    assert!(matches!(
        pres.generator_reduction("K0"),
        Err(tightlab::Error::NotCyclic(_))
    ));
    let pres = FramedLink::from_linking_matrix(&matrix(&[&[4, 2], &[2, 2]]))
        .unwrap()
        .presentation();
    assert_eq!(pres.order().unwrap(), big(4));
    assert!(matches!(
        pres.generator_reduction("K0"),
        Err(tightlab::Error::NotCyclic(_))
    ));
    let pres = FramedLink::unknot(Coefficient::integer(0)).presentation();
    assert!(matches!(
        pres.generator_reduction("K0"),
        Err(tightlab::Error::InfiniteHomology)
    ));
}

#[test]
fn non_generator_detected() {
    // Z/6 presented on two meridians with μ_1 = 2 μ_0
    let pres = HomologyPresentation {
        relations: matrix(&[&[6, 0], &[-2, 1]]),
        meridian_labels: vec!["x".into(), "y".into()],
    };
    let red = pres.generator_reduction("x").unwrap();
    assert_eq!(red.coefficient("y"), Some(&big(2)));
    assert!(matches!(
        pres.generator_reduction("y"),
        Err(tightlab::Error::NotGenerator(_))
    ));
}

#[test]
fn blow_down_preserves_l_chain_order() {
    // Chain a1 (n) - a2 (-p) with an extra (-1) unknot blown up on a2 and b.
    let link = family_link(Family::L, 3, 1).unwrap();
    assert_eq!(h1_order(&link), big(84));
    let up = blow_up(&link, -1, &[(1, 1), (2, 1)]).unwrap();
    assert_eq!(h1_order(&up), big(84));
    let down = blow_down(&up, up.len() - 1).unwrap();
    assert_eq!(down, link);
}

#[test]
fn rolfsen_preserves_order_on_seifert_diagram() {
    let link = family_seifert_link(Family::E, 3, 1).unwrap();
    let c = link.index_of("c").unwrap();
    let twisted = rolfsen_twist(&link, c, -1).unwrap();
    assert_eq!(twisted.framings()[c], Coefficient::Finite(rat(-7, 8)));
    assert_eq!(h1_order(&twisted), h1_order(&link));
    let mirror = link.mirror();
    assert_eq!(h1_order(&mirror), h1_order(&link));
}

#[test]
fn lens_summands_of_l() {
    let rec = family_record(Family::L, 3, 1).unwrap();
    let ls = rec.lens_summands.unwrap();
    let shown: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
    assert_eq!(shown, vec!["-L(4,1)", "L(3,1)", "-L(7,1)"]);
    let plain: Vec<String> = lens_summands(&family_link(Family::L, 3, 1).unwrap())
        .unwrap()
        .iter()
        .map(|l| l.to_string())
        .collect();
    assert_eq!(plain, vec!["L(4,3)", "L(3,1)", "-L(7,1)"]);
}

#[test]
fn spin_counts() {
    let count = |f| family_link(f, 3, 1).unwrap().presentation().spin_count().unwrap();
    assert_eq!(count(Family::S), big(1));
    assert_eq!(count(Family::E), big(1));
    assert_eq!(count(Family::L), big(2));
    let trivial = FramedLink::unknot(Coefficient::integer(1)).presentation();
    assert_eq!(trivial.spin_count().unwrap(), big(1));
}

#[test]
fn slice_genus_and_lspace() {
    assert_eq!(slice_genus_torus_knot(2, 3).unwrap(), 1);
    assert_eq!(slice_genus_torus_knot(3, 4).unwrap(), 3);
    assert!(slice_genus_torus_knot(2, 4).is_err());
    for p in 2..8u64 {
        for n in 1..5u64 {
            let g = slice_genus_torus_knot(p, p * n + 1).unwrap();
            assert_eq!(2 * g - 1, p * p * n - p * n - 1);
        }
    }
    assert!(is_lspace_surgery(3, 4, &rat(89, 8)).unwrap());
    assert!(is_lspace_surgery(3, 4, &rat(5, 1)).unwrap());
    assert!(!is_lspace_surgery_with(3, 4, &rat(5, 1), LSpaceBound::Strict).unwrap());
    assert!(!is_lspace_surgery(2, 3, &rat(0, 1)).unwrap());
}

#[test]
fn link_json_roundtrip() {
    let link = family_seifert_link(Family::S, 3, 1).unwrap();
    let s = serde_json::to_string(&link).unwrap();
    assert!(s.contains(r#""framing":"-4""#), "{s}");
    let back: FramedLink = serde_json::from_str(&s).unwrap();
    assert_eq!(back, link);
    let doc = r#"{"components":[{"framing":"-7/6"},{"framing":"inf"}],"linking":[[0,1],[1,0]]}"#;
    let link: FramedLink = serde_json::from_str(doc).unwrap();
    assert_eq!(h1_order(&link), big(7));
    let bad = r#"{"components":[{"framing":"1"},{"framing":"1"}],"linking":[[0,1],[2,0]]}"#;
    assert!(serde_json::from_str::<FramedLink>(bad).is_err());
}

fn small_link(coeffs: &[(i64, i64)], links: &[i64]) -> FramedLink {
    let k = coeffs.len();
    let mut m = tightlab::exact::IntMatrix::zeros(k, k);
    let mut it = links.iter().cycle();
    for i in 0..k {
        for j in i + 1..k {
            let v = *it.next().unwrap();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let framings = coeffs.iter().map(|&(p, q)| Coefficient::from_pair(big(p), big(q))).collect();
    FramedLink::new(framings, m).unwrap()
}

proptest::proptest! {
    #[test]
    fn h1_order_routes_agree(
        coeffs in proptest::collection::vec((-9i64..=9, 1i64..=5), 1..=4),
        links in proptest::collection::vec(-2i64..=2, 6),
    ) {
        let link = small_link(&coeffs, &links);
        proptest::prop_assert_eq!(h1_order(&link), link.presentation().order_or_zero());
    }
}
