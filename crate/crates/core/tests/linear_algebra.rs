use proptest::prelude::*;
use torfib::exactla::{Matrix, PrimeField, Subspace};

const P: u32 = 5;

fn field() -> PrimeField {
    PrimeField::new(P).unwrap()
}

fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(0..P, r * c).prop_map(move |data| Matrix::from_flat(field(), r, c, data).unwrap())
    })
}

fn subspace(ambient: usize) -> impl Strategy<Value = Subspace> {
    (0..=ambient).prop_flat_map(move |k| {
        prop::collection::vec(prop::collection::vec(0..P, ambient), k)
            .prop_map(move |vs| Subspace::span(field(), ambient, &vs))
    })
}

/// Rank by brute force: the number of distinct vectors in the row space is `p^rank`.
fn brute_rank(m: &Matrix) -> usize {
    let f = m.field();
    let mut space: std::collections::HashSet<Vec<u32>> = [vec![0; m.cols()]].into();
    for r in 0..m.rows() {
        let mut next = space.clone();
        for v in &space {
            for c in 1..P {
                let w: Vec<u32> = v.iter().zip(m.row(r)).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
                next.insert(w);
            }
        }
        space = next;
    }
    let mut rank = 0;
    let mut size = 1;
    while size < space.len() {
        size *= P as usize;
        rank += 1;
    }
    rank
}

#[test]
fn worked_examples() {
    let f = field();
    let empty = Matrix::zeros(f, 0, 0);
    assert_eq!(empty.rank(), 0);
    assert_eq!(empty.kernel().dim(), 0);
    let id = Matrix::identity(f, 3);
    assert_eq!((id.rank(), id.kernel().dim()), (3, 0));
    let m = Matrix::from_rows(f, &[[1, 2], [2, 4]]).unwrap();
    let k = m.kernel();
    assert_eq!((m.rank(), k.dim()), (1, 1));
    assert!(k.contains(&[3, 1]));
    let e1 = Subspace::coordinate(f, 3, &[0]);
    let e23 = Subspace::coordinate(f, 3, &[1, 2]);
    let (meet, join) = e1.meet_join(&e23).unwrap();
    assert_eq!((meet.dim(), join.dim()), (0, 3));
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant_and_matches_brute_force(m in matrix(4)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank(), brute_rank(&m));
    }

    #[test]
    fn rref_is_idempotent(m in matrix(6)) {
        let r = m.rref();
        let again = r.reduced.rref();
        prop_assert_eq!(&again.reduced, &r.reduced);
        prop_assert_eq!(again.rank, r.rank);
        prop_assert!(r.pivots.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kernel_has_complementary_dimension(m in matrix(6)) {
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for i in 0..k.dim() {
            prop_assert!(m.mul_vec(k.vector(i)).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_succeeds_exactly_when_ranks_agree(m in matrix(5), seed in prop::collection::vec(0..P, 5)) {
        let b: Vec<u32> = seed.into_iter().cycle().take(m.rows()).collect();
        let aug = m.hstack(&Matrix::from_col_vecs(field(), m.rows(), std::slice::from_ref(&b))).unwrap();
        match m.solve(&b) {
            Some(x) => prop_assert_eq!(m.mul_vec(&x), b.clone()),
            None => prop_assert!(aug.rank() > m.rank()),
        }
        if aug.rank() == m.rank() {
            prop_assert!(m.solve(&b).is_some());
        }
    }

    #[test]
    fn meet_and_join_satisfy_the_modular_law(u in subspace(4), v in subspace(4)) {
        let (meet, join) = u.meet_join(&v).unwrap();
        prop_assert_eq!(meet.dim() + join.dim(), u.dim() + v.dim());
        for i in 0..meet.dim() {
            prop_assert!(u.contains(meet.vector(i)) && v.contains(meet.vector(i)));
        }
        for i in 0..u.dim() {
            prop_assert!(join.contains(u.vector(i)));
        }
    }
}
