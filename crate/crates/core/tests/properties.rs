use proptest::prelude::*;
use schrogeo_core::numkernel::{
    rank_nullspace, DenseMatrix, Jet2, SeededSampler, DEFAULT_RANK_TOL,
};

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0f64..2.0, 3)
}

proptest! {
    #[test]
    fn jet_product_rule(p in point()) {
        let x = Jet2::seed(&p);
        let f = &x[0] * &x[1] + x[2].sin();
        let g = x[0].exp() - x[1].square();
        let fg = &f * &g;
        for i in 0..3 {
            let want = f.d(i) * g.value() + f.value() * g.d(i);
            prop_assert!((fg.d(i) - want).abs() <= 1e-12 * (1.0 + want.abs()));
            for j in 0..3 {
                let want = f.dd(i, j) * g.value() + f.d(i) * g.d(j) + f.d(j) * g.d(i) + f.value() * g.dd(i, j);
                prop_assert!((fg.dd(i, j) - want).abs() <= 1e-11 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn sampler_is_deterministic(seed in any::<u64>()) {
        let mut a = SeededSampler::cube(seed, 4, -1.0, 1.0);
        let mut b = SeededSampler::cube(seed, 4, -1.0, 1.0);
        prop_assert_eq!(a.samples(10).unwrap(), b.samples(10).unwrap());
    }

    #[test]
    fn rank_is_idempotent(entries in proptest::collection::vec(-1.0f64..1.0, 12)) {
        // rank of M and of the projection onto its row space agree
        let m = DenseMatrix::from_row_slice(3, 4, &entries);
        let rn = rank_nullspace(&m, DEFAULT_RANK_TOL).unwrap();
        let mut k = DenseMatrix::zeros(4, 4);
        for v in &rn.nullspace {
            k += v * v.transpose();
        }
        let proj = DenseMatrix::identity(4, 4) - k;
        let rp = rank_nullspace(&proj, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(rn.rank, rp.rank);
        prop_assert_eq!(rn.rank + rn.nullity(), 4);
    }
}
