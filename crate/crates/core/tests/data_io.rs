use std::fs;

use elastika::data::{
    add_noise, load_ucr_dataset, load_ucr_tsv, write_ucr_dataset, Dataset, RngSeed, Series, Split,
};
use elastika::Error;

#[test]
fn loads_label_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.tsv");
    fs::write(&path, "2\t0.0\t1.5\t-1.0\n1\t1\t2\t3\n").unwrap();
    let ds = load_ucr_tsv(&path, Split::Train).unwrap();
    assert_eq!(ds.labels(), &[2, 1]);
    assert_eq!(ds.series()[0].values(), &[0.0, 1.5, -1.0]);
}

#[test]
fn integer_valued_real_labels_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.tsv");
    fs::write(&path, "-1.0\t0.5\t0.25\n").unwrap();
    assert_eq!(load_ucr_tsv(&path, Split::Test).unwrap().labels(), &[-1]);
}

#[test]
fn missing_file_is_io_error() {
    let err = load_ucr_tsv("/nonexistent/elastika.tsv", Split::Train).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn dataset_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |split, values: Vec<(Vec<f64>, i64)>| {
        Dataset::new(
            "Toy",
            split,
            values
                .into_iter()
                .map(|(v, l)| (Series::new(v).unwrap(), l)),
        )
        .unwrap()
    };
    let train = mk(
        Split::Train,
        vec![(vec![0.1, 1.0 / 3.0], 1), (vec![-2.5e-7, 4.0], 2)],
    );
    let test = mk(Split::Test, vec![(vec![std::f64::consts::PI, 0.0], 2)]);
    write_ucr_dataset(dir.path(), &train, &test).unwrap();
    let (tr, te) = load_ucr_dataset(dir.path(), "Toy").unwrap();
    assert_eq!(tr.series(), train.series());
    assert_eq!(te.series(), test.series());
    assert_eq!(tr.labels(), train.labels());
}

#[test]
fn noise_leaves_labels_and_is_seeded() {
    let ds = Dataset::new(
        "n",
        Split::Train,
        (0..5).map(|k| {
            (
                Series::new((0..50).map(|i| (i * k) as f64).collect()).unwrap(),
                k as i64,
            )
        }),
    )
    .unwrap();
    let a = add_noise(&ds, 0.1, RngSeed(1)).unwrap();
    let b = add_noise(&ds, 0.1, RngSeed(1)).unwrap();
    assert_eq!(a.series(), b.series());
    assert_eq!(a.labels(), ds.labels());
    // Series 0 is constant, so it stays unchanged.
    assert_eq!(a.series()[0], ds.series()[0]);
    assert!(add_noise(&ds, -1.0, RngSeed(1)).is_err());
}
