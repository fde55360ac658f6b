use proptest::prelude::*;
use tanaka_core::catalog;
use tanaka_core::cohomo::{self, Cochain, CochainSpace};
use tanaka_core::exactla::{Matrix, SparseVec};
use tanaka_core::{GradedLieAlgebra, Rational};

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    let cols = rows[0].len();
    Matrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>(), cols)
}

fn combo(coeffs: &[i64], support: &[usize]) -> SparseVec {
    SparseVec::from_pairs(support.iter().zip(coeffs).map(|(&i, &c)| (i, int(c))))
}

/// A small 𝔰^{k,n} with its gl2 ⋉ heis prolongation.
fn algebra() -> impl Strategy<Value = GradedLieAlgebra> {
    (6usize..=7).prop_flat_map(|n| (0..=n - 4).prop_map(move |k| catalog::gl2_heis_skn(k, n).unwrap()))
}

fn element(idx: Vec<usize>) -> impl Strategy<Value = SparseVec> {
    prop::collection::vec(-3i64..=3, idx.len()).prop_map(move |c| combo(&c, &idx))
}

fn cochain(g: &GradedLieAlgebra, degree: usize) -> impl Strategy<Value = Cochain> {
    let sp = CochainSpace::new(g, degree, false);
    let dim = sp.dim();
    prop::collection::vec((0..dim, -3i64..=3), 0..8).prop_map(move |terms| {
        let mut c = Cochain::zero(degree);
        for (i, x) in terms {
            c = c.plus(&sp.unit(i).scaled(&int(x)));
        }
        c
    })
}

fn negative(g: &GradedLieAlgebra) -> Vec<usize> {
    (0..g.dim()).filter(|&i| g.weight(i) < 0).collect()
}

fn degree_zero(g: &GradedLieAlgebra) -> Vec<usize> {
    g.graded_component(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(rows in matrix_strategy()) {
        let m = to_matrix(&rows);
        let ker = m.kernel_basis();
        prop_assert_eq!(m.rank() + ker.len(), m.cols());
        for v in &ker {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_consistent_systems(rows in matrix_strategy(), x in prop::collection::vec(-3i64..=3, 6)) {
        let m = to_matrix(&rows);
        let x: Vec<Rational> = x[..m.cols()].iter().map(|&v| int(v)).collect();
        let b = m.mul_dense(&x).unwrap();
        let y = m.solve(&b).unwrap().expect("b is in the column space");
        prop_assert_eq!(m.mul_dense(&y).unwrap(), b);
    }

    #[test]
    fn bracket_axioms((g, x, y, z, s) in algebra().prop_flat_map(|g| {
        let all: Vec<usize> = (0..g.dim()).collect();
        (Just(g.clone()), element(all.clone()), element(all.clone()), element(all), -3i64..=3)
    })) {
        let br = |a: &SparseVec, b: &SparseVec| g.bracket(a, b);
        prop_assert_eq!(br(&x, &y), br(&y, &x).neg());
        prop_assert_eq!(br(&x.scaled(&int(s)).plus(&z), &y), br(&x, &y).scaled(&int(s)).plus(&br(&z, &y)));
        let jacobi = br(&x, &br(&y, &z)).plus(&br(&y, &br(&z, &x))).plus(&br(&z, &br(&x, &y)));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn coboundary_of_one_cochains((g, phi, x, y) in algebra().prop_flat_map(|g| {
        let m = negative(&g);
        (Just(g.clone()), cochain(&g, 1), element(m.clone()), element(m))
    })) {
        let d = cohomo::coboundary(&phi, &g).unwrap();
        let at = |v: &SparseVec| phi.eval(std::slice::from_ref(v));
        let expect = g.bracket(&x, &at(&y)).minus(&g.bracket(&y, &at(&x))).minus(&at(&g.bracket(&x, &y)));
        prop_assert_eq!(d.eval(&[x, y]), expect);
        prop_assert!(cohomo::coboundary(&d, &g).unwrap().is_zero());
    }

    #[test]
    fn degree_zero_action_on_two_cochains((g, a, phi, x, y) in algebra().prop_flat_map(|g| {
        let m = negative(&g);
        (Just(g.clone()), element(degree_zero(&g)), cochain(&g, 2), element(m.clone()), element(m))
    })) {
        let acted = cohomo::g0_action(&a, &phi, &g);
        let expect = g
            .bracket(&a, &phi.eval(&[x.clone(), y.clone()]))
            .minus(&phi.eval(&[g.bracket(&a, &x), y.clone()]))
            .minus(&phi.eval(&[x.clone(), g.bracket(&a, &y)]));
        prop_assert_eq!(acted.eval(&[x, y]), expect);
    }

    #[test]
    fn degree_zero_action_commutes_with_coboundary((g, a, phi) in algebra().prop_flat_map(|g| {
        (Just(g.clone()), element(degree_zero(&g)), cochain(&g, 1))
    })) {
        let lhs = cohomo::g0_action(&a, &cohomo::coboundary(&phi, &g).unwrap(), &g);
        let rhs = cohomo::coboundary(&cohomo::g0_action(&a, &phi, &g), &g).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
