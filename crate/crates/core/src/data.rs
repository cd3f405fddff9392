//! Series and labelled datasets, UCR TSV I/O, noise injection and the derivative transform.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = i64;

/// A non-empty sequence of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::usage("series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "series value at index {pos} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Population standard deviation of the values.
    pub fn std_dev(&self) -> f64 {
        population_std(&self.0)
    }
}

impl AsRef<[f64]> for Series {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Self {
        s.0
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "TRAIN",
            Split::Test => "TEST",
        })
    }
}

/// Seed for every stochastic operation. Streams come from ChaCha8, which is
/// stable across platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// An independent seed for sub-task `stream` (splitmix64 finaliser).
    pub fn derive(self, stream: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Equal-length labelled series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    split: Split,
    series: Vec<Series>,
    labels: Vec<Label>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        split: Split,
        items: impl IntoIterator<Item = (Series, Label)>,
    ) -> Result<Self> {
        let name = name.into();
        let (series, labels): (Vec<Series>, Vec<Label>) = items.into_iter().unzip();
        let Some(first) = series.first() else {
            return Err(Error::EmptyDataset(name));
        };
        let expected = first.len();
        if let Some((idx, s)) = series.iter().enumerate().find(|(_, s)| s.len() != expected) {
            return Err(Error::VariableLength {
                origin: name,
                line: idx + 1,
                expected,
                found: s.len(),
            });
        }
        Ok(Self {
            name,
            split,
            series,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Shared series length `L`.
    pub fn series_len(&self) -> usize {
        self.series[0].len()
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, idx: usize) -> (&Series, Label) {
        (&self.series[idx], self.labels[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Series, Label)> {
        self.series.iter().zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
    }

    /// Population standard deviation over every value of every series.
    pub fn value_std(&self) -> f64 {
        let all: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.values().iter().copied())
            .collect();
        population_std(&all)
    }

    /// Rejects training sets with a class represented by a single exemplar.
    pub fn check_tuning_gate(&self) -> Result<()> {
        match self.class_counts().into_iter().find(|&(_, n)| n < 2) {
            Some((label, _)) => Err(Error::SingletonClass { label }),
            None => Ok(()),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Applies `f` to every series, keeping labels.
    pub fn map_series(&self, mut f: impl FnMut(&Series) -> Result<Series>) -> Result<Self> {
        let series = self.series.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Dataset::new(
            self.name.clone(),
            self.split,
            series.into_iter().zip(self.labels.iter().copied()),
        )
    }
}

/// Reads a UCR-style TSV file: one series per line, label first, tab-separated.
///
/// Trailing `NaN` fields are treated as padding, which is how the UCR archive
/// encodes variable-length datasets; such files are rejected as variable length.
pub fn load_ucr_tsv(path: impl AsRef<Path>, split: Split) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = dataset_name_from_path(path);
    parse_ucr_tsv(&text, path, &name, split)
}

fn dataset_name_from_path(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    stem.strip_suffix("_TRAIN")
        .or_else(|| stem.strip_suffix("_TEST"))
        .unwrap_or(&stem)
        .to_string()
}

pub(crate) fn parse_ucr_tsv(text: &str, path: &Path, name: &str, split: Split) -> Result<Dataset> {
    let parse_err = |line: usize, field: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        field,
        message,
    };

    let mut items = Vec::new();
    let mut expected: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let label_field = fields.next().unwrap_or_default().trim();
        let label_real: f64 = label_field
            .parse()
            .map_err(|_| parse_err(line_no, 1, format!("label {label_field:?} is not numeric")))?;
        if !label_real.is_finite() || label_real.fract() != 0.0 {
            return Err(parse_err(
                line_no,
                1,
                format!("label {label_field:?} is not an integer"),
            ));
        }
        let label = label_real as Label;

        let mut values = Vec::new();
        let mut padding_from: Option<usize> = None;
        for (f_idx, field) in fields.enumerate() {
            let field_no = f_idx + 2;
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, field_no, format!("{field:?} is not numeric")))?;
            if v.is_nan() {
                padding_from.get_or_insert(field_no);
                continue;
            }
            if let Some(pad) = padding_from {
                return Err(parse_err(
                    line_no,
                    pad,
                    "missing value inside the series".to_string(),
                ));
            }
            if !v.is_finite() {
                return Err(parse_err(
                    line_no,
                    field_no,
                    format!("{field:?} is not finite"),
                ));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(parse_err(line_no, 2, "row has no values".to_string()));
        }
        match expected {
            None => expected = Some(values.len()),
            Some(len) if len != values.len() => {
                return Err(Error::VariableLength {
                    origin: path.display().to_string(),
                    line: line_no,
                    expected: len,
                    found: values.len(),
                })
            }
            Some(_) => {}
        }
        items.push((Series(values), label));
    }
    Dataset::new(name, split, items)
}

/// Writes `ds` in the same TSV layout [`load_ucr_tsv`] reads. Values use the
/// shortest representation that parses back to the identical `f64`.
pub fn write_ucr_tsv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        for (s, label) in ds.iter() {
            write!(out, "{label}")?;
            for v in s.values() {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Paths of `<dir>/<name>/<name>_TRAIN.tsv` and `<dir>/<name>/<name>_TEST.tsv`.
pub fn ucr_paths(dir: impl AsRef<Path>, name: &str) -> (PathBuf, PathBuf) {
    let base = dir.as_ref().join(name);
    (
        base.join(format!("{name}_TRAIN.tsv")),
        base.join(format!("{name}_TEST.tsv")),
    )
}

/// Loads the train and test splits of dataset `name` from a UCR archive directory.
pub fn load_ucr_dataset(dir: impl AsRef<Path>, name: &str) -> Result<(Dataset, Dataset)> {
    let (train_path, test_path) = ucr_paths(dir, name);
    let train = load_ucr_tsv(&train_path, Split::Train)?.with_name(name);
    let test = load_ucr_tsv(&test_path, Split::Test)?.with_name(name);
    if train.series_len() != test.series_len() {
        return Err(Error::VariableLength {
            origin: test_path.display().to_string(),
            line: 1,
            expected: train.series_len(),
            found: test.series_len(),
        });
    }
    Ok((train, test))
}

/// Writes both splits of a dataset under `dir` in the archive layout.
pub fn write_ucr_dataset(dir: impl AsRef<Path>, train: &Dataset, test: &Dataset) -> Result<()> {
    let (train_path, test_path) = ucr_paths(dir, train.name());
    write_ucr_tsv(train, train_path)?;
    write_ucr_tsv(test, test_path)
}

/// Adds `scale × N(0, σ_s)` to every value, where `σ_s` is the population
/// standard deviation of the series the value belongs to.
pub fn add_noise(ds: &Dataset, scale: f64, seed: RngSeed) -> Result<Dataset> {
    if !scale.is_finite() || scale < 0.0 {
        return Err(Error::usage(format!(
            "noise scale must be a finite nonnegative real, got {scale}"
        )));
    }
    let mut rng = seed.rng();
    ds.map_series(|s| {
        let sd = s.std_dev();
        let values = s
            .values()
            .iter()
            .map(|&v| {
                let z: f64 = StandardNormal.sample(&mut rng);
                v + scale * sd * z
            })
            .collect();
        Ok(Series(values))
    })
}

/// Derivative estimate `((s_i − s_{i−1}) + (s_{i+1} − s_{i−1}) / 2) / 2` at
/// interior points; each endpoint copies its neighbouring interior value.
pub fn derivative_transform(s: &Series) -> Result<Series> {
    derivative_values(s.values()).map(Series)
}

pub(crate) fn derivative_values(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n < 3 {
        return Err(Error::SeriesTooShort(n));
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = ((v[i] - v[i - 1]) + (v[i + 1] - v[i - 1]) / 2.0) / 2.0;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    Ok(d)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn series(v: &[f64]) -> Series {
        Series::new(v.to_vec()).unwrap()
    }

    fn parse(text: &str) -> Result<Dataset> {
        parse_ucr_tsv(text, Path::new("mem.tsv"), "mem", Split::Train)
    }

    #[test]
    fn parses_a_line() {
        let ds = parse("2\t0.0\t1.5\t-1.0\n").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.labels(), &[2]);
        assert_eq!(ds.series()[0].values(), &[0.0, 1.5, -1.0]);
    }

    #[test]
    fn accepts_integer_valued_real_labels() {
        let ds = parse("1.0\t1\t2\n-1\t3\t4\n").unwrap();
        assert_eq!(ds.labels(), &[1, -1]);
        assert!(matches!(
            parse("1.5\t1\t2\n"),
            Err(Error::Parse { field: 1, .. })
        ));
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = parse("1\t1\t2\t3\t4\t5\n1\t1\t2\t3\t4\t5\t6\n").unwrap_err();
        assert!(matches!(
            err,
            Error::VariableLength {
                line: 2,
                expected: 5,
                found: 6,
                ..
            }
        ));
    }

    #[test]
    fn nan_padding_counts_as_variable_length() {
        let err = parse("1\t1\t2\t3\n1\t1\t2\tNaN\n").unwrap_err();
        assert!(matches!(err, Error::VariableLength { found: 2, .. }));
        let err = parse("1\t1\tNaN\t3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn reports_parse_error_line() {
        let err = parse("1\t1\t2\n1\t1\tx\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 2,
                field: 3,
                ..
            }
        ));
    }

    #[test]
    fn empty_file() {
        assert!(matches!(parse(""), Err(Error::EmptyDataset(_))));
        assert!(matches!(parse("\n\n"), Err(Error::EmptyDataset(_))));
    }

    #[test]
    fn tuning_gate_rejects_singletons() {
        let ds = parse("1\t0\t0\n2\t1\t1\n2\t2\t2\n2\t3\t3\n").unwrap();
        assert!(matches!(
            ds.check_tuning_gate(),
            Err(Error::SingletonClass { label: 1 })
        ));
        let ok = parse("1\t0\t0\n1\t0\t1\n2\t1\t1\n2\t2\t2\n").unwrap();
        ok.check_tuning_gate().unwrap();
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let items = vec![
            (series(&[0.1, -1.0 / 3.0, 1e-300, 123456.789]), 3),
            (
                series(&[f64::MAX, f64::MIN_POSITIVE, -0.0, 2.0f64.sqrt()]),
                1,
            ),
        ];
        let ds = Dataset::new("Toy", Split::Train, items).unwrap();
        let path = dir.path().join("Toy/Toy_TRAIN.tsv");
        write_ucr_tsv(&ds, &path).unwrap();
        let back = load_ucr_tsv(&path, Split::Train).unwrap();
        assert_eq!(back.name(), "Toy");
        for (a, b) in ds.iter().zip(back.iter()) {
            assert_eq!(a.1, b.1);
            let bits = |s: &Series| s.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a.0), bits(b.0));
        }
    }

    #[test]
    fn noise_zero_scale_and_constant_series() {
        let ds = Dataset::new(
            "n",
            Split::Train,
            vec![(series(&[1.0, 2.0, 4.0]), 0), (series(&[5.0, 5.0, 5.0]), 1)],
        )
        .unwrap();
        assert_eq!(add_noise(&ds, 0.0, RngSeed(7)).unwrap(), ds);
        let noisy = add_noise(&ds, 3.0, RngSeed(7)).unwrap();
        assert_eq!(noisy.series()[1], ds.series()[1]);
        assert_ne!(noisy.series()[0], ds.series()[0]);
        assert_eq!(noisy.labels(), ds.labels());
        assert!(matches!(
            add_noise(&ds, -0.1, RngSeed(7)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn noise_matches_series_std() {
        let n = 100_000;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * 0.01).sin() * 3.0).collect();
        let s = series(&values);
        let sd = s.std_dev();
        let ds = Dataset::new("big", Split::Train, vec![(s, 0)]).unwrap();
        let noisy = add_noise(&ds, 1.0, RngSeed(42)).unwrap();
        let diffs: Vec<f64> = noisy.series()[0]
            .values()
            .iter()
            .zip(&values)
            .map(|(a, b)| a - b)
            .collect();
        let emp = population_std(&diffs);
        assert!((emp - sd).abs() / sd < 0.05, "empirical {emp} vs {sd}");
    }

    #[test]
    fn noise_seed_reproducible_and_distinct() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64).cos()).collect();
        let ds = Dataset::new("r", Split::Test, vec![(series(&values), 0)]).unwrap();
        let a = add_noise(&ds, 0.1, RngSeed(1)).unwrap();
        let b = add_noise(&ds, 0.1, RngSeed(1)).unwrap();
        let c = add_noise(&ds, 0.1, RngSeed(2)).unwrap();
        assert_eq!(a, b);
        let differing = a.series()[0]
            .values()
            .iter()
            .zip(c.series()[0].values())
            .filter(|(x, y)| x != y)
            .count();
        assert!(differing as f64 >= 0.99 * values.len() as f64);
    }

    #[test]
    fn derivative_examples() {
        let ramp = derivative_transform(&series(&[0.0, 1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!(ramp.values().iter().all(|&d| d == 1.0));

        let flat = derivative_transform(&series(&[2.5; 6])).unwrap();
        assert!(flat.values().iter().all(|&d| d == 0.0));

        // d_1 = ((1-0) + (0-0)/2)/2 = 0.5, d_2 = ((0-1) + (1-1)/2)/2 = -0.5, d_3 = 0.5
        let zig = derivative_transform(&series(&[0.0, 1.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(zig.values(), &[0.5, 0.5, -0.5, 0.5, 0.5]);

        assert!(matches!(
            derivative_transform(&series(&[1.0, 2.0])),
            Err(Error::SeriesTooShort(2))
        ));
    }

    #[test]
    fn derived_seeds_differ() {
        let s = RngSeed(9);
        assert_ne!(s.derive(0), s.derive(1));
        assert_eq!(s.derive(3), s.derive(3));
    }

    proptest! {
        #[test]
        fn derivative_is_linear(
            v in proptest::collection::vec(-100.0f64..100.0, 3..40),
            alpha in -10.0f64..10.0,
        ) {
            let d = derivative_transform(&series(&v)).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| alpha * x).collect();
            let ds = derivative_transform(&series(&scaled)).unwrap();
            for (a, b) in d.values().iter().zip(ds.values()) {
                prop_assert!((alpha * a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
    }
}
