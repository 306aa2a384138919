use std::sync::Arc;

use proptest::prelude::*;
use torfib::algebra::{fiber_product, FiniteLocalAlgebra};
use torfib::corpus::{generate, CorpusParams};
use torfib::exactla::{Matrix, PrimeField};
use torfib::fdmodule::{AlgebraMatrix, FdModule};
use torfib::resolution::{minimal_resolution, syzygy};
use torfib::tor::{tor_dims, TorMethod};

const P: u32 = 5;
const DEPTH: usize = 4;

fn field() -> PrimeField {
    PrimeField::new(P).unwrap()
}

/// `k[x]/(x³) ×_k k[y]/(y²)`, dimension 4.
fn ring() -> Arc<FiniteLocalAlgebra> {
    let f = field();
    let s = Arc::new(FiniteLocalAlgebra::monomial_quotient(f, &["x"], &[vec![3]]).unwrap());
    let t = Arc::new(FiniteLocalAlgebra::monomial_quotient(f, &["y"], &[vec![2]]).unwrap());
    fiber_product(s, t).unwrap().r
}

/// Kernel of the projective cover, computed densely.
fn naive_syzygy(m: &FdModule) -> FdModule {
    let (b, cover) = m.minimal_generators();
    FdModule::free(m.algebra().clone(), b).submodule(&cover.kernel()).unwrap()
}

/// `β_i = β_0(Ω^i M)` from repeated dense syzygies.
fn naive_betti(m: &FdModule, len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = m.clone();
    for _ in 0..=len {
        out.push(cur.betti0());
        cur = naive_syzygy(&cur);
    }
    out
}

/// `Tor_0 = M ⊗ N` and, from `0 → Tor_1(Ω^{i-1}, N) → Ω^i ⊗ N → F ⊗ N → Ω^{i-1} ⊗ N → 0`,
/// `Tor_i(M, N) = dim Ω^i⊗N − β_0(Ω^{i-1})·dim N + dim Ω^{i-1}⊗N`.
fn naive_tor(m: &FdModule, n: &FdModule, bound: usize) -> Vec<usize> {
    let tdim = |a: &FdModule| a.tensor(n).unwrap().dim();
    let mut out = vec![tdim(m)];
    let mut prev = m.clone();
    for _ in 1..=bound {
        let next = naive_syzygy(&prev);
        out.push(tdim(&next) + tdim(&prev) - prev.betti0() * n.dim());
        prev = next;
    }
    out
}

fn module() -> impl Strategy<Value = FdModule> {
    let a = ring();
    let d = a.dim();
    let unit = a.unit_index();
    (1usize..=2, 0usize..=3).prop_flat_map(move |(rows, cols)| {
        let a = a.clone();
        prop::collection::vec(prop::collection::vec(0..P, d), rows * cols).prop_map(move |entries| {
            let rows_v: Vec<Vec<Vec<u32>>> = (0..rows)
                .map(|r| {
                    (0..cols)
                        .map(|c| {
                            let mut e = entries[r * cols + c].clone();
                            e[unit] = 0;
                            e
                        })
                        .collect()
                })
                .collect();
            let pres = if cols == 0 {
                AlgebraMatrix::from_dense_columns(d, rows, &[])
            } else {
                AlgebraMatrix::from_entries(d, &rows_v).unwrap()
            };
            FdModule::from_presentation(a.clone(), &pres).unwrap()
        })
    })
}

fn invertible(n: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    prop::collection::vec(0..P, n * n).prop_filter_map("singular", move |data| {
        let m = Matrix::from_flat(field(), n, n, data).unwrap();
        m.inverse().map(|inv| (m, inv))
    })
}

fn conjugate(m: &FdModule, p: &Matrix, inv: &Matrix) -> FdModule {
    let action = m.actions().iter().map(|a| p.mul(a).unwrap().mul(inv).unwrap()).collect();
    FdModule::new(m.algebra().clone(), m.dim(), action).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn betti_numbers_match_dense_syzygies(m in module()) {
        let res = minimal_resolution(&m, DEPTH).unwrap();
        prop_assert_eq!(res.betti().to_vec(), naive_betti(&m, DEPTH));
    }

    #[test]
    fn tor_matches_dense_oracle(m in module(), n in module()) {
        let t = tor_dims(&m, &n, DEPTH, TorMethod::Left).unwrap();
        prop_assert_eq!(t.dims, naive_tor(&m, &n, DEPTH));
    }

    #[test]
    fn tor_is_symmetric(m in module(), n in module()) {
        let both = tor_dims(&m, &n, DEPTH, TorMethod::Both).unwrap();
        prop_assert_eq!(both.balanced, Some(true));
        let swapped = tor_dims(&n, &m, DEPTH, TorMethod::Left).unwrap();
        prop_assert_eq!(both.dims, swapped.dims);
    }

    #[test]
    fn tor_is_additive(m in module(), m2 in module(), n in module()) {
        let sum = m.direct_sum(&m2).unwrap();
        let a = tor_dims(&m, &n, DEPTH, TorMethod::Left).unwrap().dims;
        let b = tor_dims(&m2, &n, DEPTH, TorMethod::Left).unwrap().dims;
        let s = tor_dims(&sum, &n, DEPTH, TorMethod::Left).unwrap().dims;
        let expect: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(s, expect);
    }

    #[test]
    fn tor_shifts_along_syzygies(m in module(), n in module()) {
        let om = syzygy(&m, 1).unwrap();
        let t = tor_dims(&m, &n, DEPTH, TorMethod::Left).unwrap().dims;
        let s = tor_dims(&om, &n, DEPTH - 1, TorMethod::Left).unwrap().dims;
        prop_assert_eq!(&t[2..], &s[1..]);
    }

    #[test]
    fn betti_numbers_ignore_the_basis(
        (m, (pm, inv)) in module().prop_flat_map(|m| {
            let n = m.dim();
            (Just(m), invertible(n))
        })
    ) {
        let c = conjugate(&m, &pm, &inv);
        let a = minimal_resolution(&m, DEPTH).unwrap();
        let b = minimal_resolution(&c, DEPTH).unwrap();
        prop_assert_eq!(a.betti(), b.betti());
        prop_assert_eq!(a.syzygy_dims(), b.syzygy_dims());
    }
}

#[test]
fn corpus_pairs_match_dense_oracle() {
    let params = CorpusParams {
        count: 6,
        seed: 7,
        ..CorpusParams::default()
    };
    for i in 0..params.count {
        let inst = generate(&params, i).unwrap();
        let xz = inst.x_plus_z();
        for (a, b) in [(&inst.m, &inst.n), (&xz, &inst.m), (&inst.y_r, &inst.w_r)] {
            let t = tor_dims(a, b, DEPTH, TorMethod::Both).unwrap();
            assert_eq!(t.dims, naive_tor(a, b, DEPTH), "instance {i}");
        }
        let k = FdModule::residue_field(inst.r().clone());
        assert_eq!(minimal_resolution(&k, DEPTH).unwrap().betti(), naive_betti(&k, DEPTH).as_slice());
    }
}
