use deflation_core::coarse::{read_coarse_space, write_coarse_space, CoarseSpace, Provenance};
use deflation_core::linalg::{
    parse_dense_csv, parse_matrix_market, write_dense_csv_string, write_matrix_market_string, DenseMatrix,
    SparseMatrix,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_market_roundtrip(entries in proptest::collection::vec((0usize..9, 0usize..7, -1e6f64..1e6), 0..40)) {
        let mut seen = std::collections::BTreeMap::new();
        for (i, j, v) in entries {
            seen.insert((i, j), v);
        }
        let trip: Vec<(usize, usize, f64)> = seen.into_iter().map(|((i, j), v)| (i, j, v)).collect();
        let a = SparseMatrix::from_triplets(9, 7, &trip).unwrap();
        prop_assert_eq!(parse_matrix_market(&write_matrix_market_string(&a)).unwrap(), a);
    }

    #[test]
    fn dense_csv_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 36)) {
        let a = DenseMatrix::from_fn(rows, cols, |i, j| seed[i * 6 + j]);
        prop_assert_eq!(parse_dense_csv(&write_dense_csv_string(&a)).unwrap(), a);
    }
}

#[test]
fn coarse_space_file_keeps_metadata() {
    let dir = std::env::temp_dir().join(format!("deflation-core-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z.csv");
    let z = DenseMatrix::identity_columns(5, 2);
    let mut cs = CoarseSpace::new(z.clone(), Provenance::Perturbed { eps: 1e3 }).unwrap();
    cs.groups = Some(vec![0, 1]);
    write_coarse_space(&cs, &path).unwrap();
    let back = read_coarse_space(&path).unwrap();
    assert_eq!(back.z, z);
    assert_eq!(back.provenance, Provenance::Perturbed { eps: 1e3 });
    assert_eq!(back.groups, Some(vec![0, 1]));
    std::fs::remove_file(dir.join("z.csv.json")).unwrap();
    let bare = read_coarse_space(&path).unwrap();
    assert_eq!(bare.provenance, Provenance::Imported);
    std::fs::remove_dir_all(&dir).unwrap();
}
