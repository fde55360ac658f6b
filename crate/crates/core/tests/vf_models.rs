use tanaka_core::catalog;
use tanaka_core::vf::{
    check_involutivity_flags, iterate_prolong, recognize_skn, regular_flag, symbol_invariants, tanaka_symbol_at, PointSampler,
};

#[test]
fn flat_model_symbol_at_origin() {
    let m = catalog::build_skn(0, 6).unwrap();
    let f = catalog::flat_model_frame(&m).unwrap();
    let q = vec![Default::default(); f.dim()];
    let rep = regular_flag(&f, &q, 0).unwrap();
    assert_eq!(rep.dims, vec![2, 3, 5, 6]);
    let s = tanaka_symbol_at(&f, &q, 0).unwrap();
    assert!(recognize_skn(&s, 0, 6, 0).unwrap().is_isomorphic());
}

#[test]
fn flat_tower_symbols() {
    let m = catalog::build_skn(0, 6).unwrap();
    let f = catalog::flat_model_frame(&m).unwrap();
    for k in 1..=2 {
        let t = iterate_prolong(&f, k).unwrap();
        let q = PointSampler::new(k as u64).point(t.top().dim());
        let s = tanaka_symbol_at(t.top(), &q, 0).unwrap();
        let r = recognize_skn(&s, k, 6, 0).unwrap();
        assert!(r.is_isomorphic(), "k={k}: {r:?}");
    }
}

#[test]
fn flat_tower_involutivity() {
    let m = catalog::build_skn(0, 6).unwrap();
    let t = iterate_prolong(&catalog::flat_model_frame(&m).unwrap(), 2).unwrap();
    let mut s = PointSampler::new(11);
    for _ in 0..3 {
        let q = s.point(t.top().dim());
        let rep = check_involutivity_flags(&t, &q, 0).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.checks);
    }
}

#[test]
fn monge_symbols_diverge_then_unify() {
    let mut inv = Vec::new();
    for which in [1, 2] {
        let f = catalog::monge_frame(6, which).unwrap();
        let q = PointSampler::new(5).point(f.dim());
        let s = tanaka_symbol_at(&f, &q, 0).unwrap();
        println!("monge{which}: {:?} {:?}", s.weight_dims(), symbol_invariants(&s));
        inv.push(symbol_invariants(&s));
        let t = iterate_prolong(&f, 1).unwrap();
        let q = PointSampler::new(6).point(t.top().dim());
        let s1 = tanaka_symbol_at(t.top(), &q, 0).unwrap();
        let r = recognize_skn(&s1, 1, 6, 0).unwrap();
        assert!(r.is_isomorphic(), "monge{which}: {r:?}");
    }
    assert_ne!(inv[0], inv[1]);
}

/// X1 = ∂x, X2 = ∂y + x²∂z: growth (2,3) off the plane x = 0 and (2,2,3) on it.
fn cubic_contact() -> tanaka_core::vf::PolyFrame {
    use tanaka_core::vf::{Poly, PolyFrame, PolyVectorField};
    let coords: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let x1 = PolyVectorField::coordinate_field(coords.clone(), 0);
    let x2 = PolyVectorField::new(coords.clone(), vec![Poly::zero(3), Poly::constant(3, tanaka_core::Rational::from_integer(1.into())), Poly::var(3, 0).mul(&Poly::var(3, 0))]).unwrap();
    PolyFrame::new(coords, x1, x2).unwrap()
}

#[test]
fn regular_flag_rejects_singular_points_only() {
    let f = cubic_contact();
    let r = |v: i64| tanaka_core::Rational::from_integer(v.into());
    let generic = regular_flag(&f, &[r(1), r(0), r(0)], 0).unwrap();
    assert_eq!(generic.dims, vec![2, 3]);
    let err = regular_flag(&f, &[r(0), r(1), r(1)], 0).unwrap_err();
    assert!(matches!(err, tanaka_core::Error::NotEquiregular(_)), "{err}");
}
