use abwl::lattice::{
    lattice_contains, project, quotient, smith_normal_form, IntMatrix, LatticeError, Quotient,
};
use proptest::prelude::*;

fn m(rows: &[[i64; 2]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn smith_examples() {
    assert_eq!(
        smith_normal_form(&m(&[[4, 1], [1, 2]])).unwrap().diagonal(),
        [1, 7]
    );
    assert_eq!(
        smith_normal_form(&m(&[[7, 4], [4, 5]])).unwrap().diagonal(),
        [1, 19]
    );
    let id = IntMatrix::identity(3);
    let s = smith_normal_form(&id).unwrap();
    assert_eq!(s.d, id);
}

#[test]
fn membership_examples() {
    let g = m(&[[4, 1], [1, 2]]);
    assert!(lattice_contains(&g, &[3, -1]).unwrap());
    assert!(lattice_contains(&g, &[0, 0]).unwrap());
    assert!(!lattice_contains(&g, &[1, 0]).unwrap());
    assert_eq!(
        lattice_contains(&m(&[[1, 2], [2, 4]]), &[0, 0]),
        Err(LatticeError::SingularMatrix)
    );
}

#[test]
fn quotient_examples() {
    assert_eq!(
        quotient(&m(&[[5, 2], [2, 3]])).unwrap().invariant_factors,
        [11]
    );
    assert_eq!(quotient(&IntMatrix::identity(2)).unwrap().order(), 1);
    let z9 = quotient(&m(&[[4, 1], [3, 3]])).unwrap();
    assert_eq!((z9.invariant_factors.clone(), z9.order()), (vec![9], 9));
}

#[test]
fn projection_examples() {
    let g = m(&[[4, 1], [1, 2]]);
    assert_eq!(project(&g, &[3, 0]).unwrap(), project(&g, &[0, 1]).unwrap());
    assert_eq!(project(&g, &[0, 0]).unwrap(), quotient(&g).unwrap().zero());
    let g = m(&[[5, 2], [2, 3]]);
    assert_eq!(project(&g, &[4, 1]).unwrap(), project(&g, &[1, 2]).unwrap());
}

/// Membership through the Smith form: `yM = v` iff every coordinate of
/// `v V^{-1}` is divisible by the matching diagonal entry.
fn snf_contains(q: &Quotient, v: &[i64]) -> bool {
    let s = q.smith();
    let w = s.v_inv.left_mul(v).unwrap();
    w.iter()
        .zip(s.diagonal())
        .all(|(&x, d)| if d == 0 { x == 0 } else { x % d == 0 })
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (2usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, n), n)
            .prop_map(|r| IntMatrix::from_rows(&r).unwrap())
    })
}

fn nonsingular() -> impl Strategy<Value = IntMatrix> {
    matrix().prop_filter("nonsingular", |x| x.det().unwrap() != 0)
}

fn with_vector() -> impl Strategy<Value = (IntMatrix, Vec<i64>)> {
    nonsingular().prop_flat_map(|x| {
        let n = x.rows();
        (Just(x), prop::collection::vec(-20i64..=20, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn smith_reconstructs(x in matrix()) {
        let s = smith_normal_form(&x).unwrap();
        prop_assert_eq!(s.u.mul(&s.d).unwrap().mul(&s.v).unwrap(), x.clone());
        prop_assert_eq!(s.u.det().unwrap().abs(), 1);
        prop_assert_eq!(s.v.det().unwrap().abs(), 1);
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(x.rows()));
        let d = s.diagonal();
        for i in 0..d.len() {
            prop_assert!(d[i] >= 0);
            for j in 0..d.len() {
                prop_assert!(i == j || s.d.get(i, j) == 0);
            }
            if i + 1 < d.len() && d[i] != 0 {
                prop_assert_eq!(d[i + 1] % d[i], 0);
            }
        }
    }

    #[test]
    fn membership_oracles_agree((x, v) in with_vector()) {
        let q = Quotient::new(&x).unwrap();
        let adj = q.contains(&v).unwrap();
        prop_assert_eq!(adj, snf_contains(&q, &v));
        prop_assert_eq!(adj, q.project(&v).unwrap() == q.group().zero());
        if let Some(y) = q.solve(&v).unwrap() {
            prop_assert_eq!(x.left_mul(&y).unwrap(), v);
        } else {
            prop_assert!(!adj);
        }
    }

    #[test]
    fn order_is_abs_det(x in nonsingular()) {
        let q = Quotient::new(&x).unwrap();
        prop_assert_eq!(q.group().order() as i64, x.det().unwrap().abs());
        for i in 0..x.rows() {
            prop_assert_eq!(q.project(x.row(i)).unwrap(), q.group().zero());
        }
    }

    #[test]
    fn projection_is_additive((x, v) in with_vector(), w in prop::collection::vec(-20i64..=20, 4)) {
        let q = Quotient::new(&x).unwrap();
        let w = &w[..x.rows()];
        let sum: Vec<i64> = v.iter().zip(w).map(|(a, b)| a + b).collect();
        let g = q.group();
        prop_assert_eq!(q.project(&sum).unwrap(), g.add(&q.project(&v).unwrap(), &q.project(w).unwrap()));
    }
}
