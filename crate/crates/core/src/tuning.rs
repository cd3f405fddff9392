//! Parameter grids and leave-one-out 1-NN tuning of `(γ, w)` for DTW and
//! `(γ, ω)` for ADTW.
//!
//! For every exponent the best window (or penalty) is picked first. Ties
//! within an exponent resolve to the smallest window for DTW and to the
//! median tied penalty for ADTW. The per-exponent champions with the best
//! train accuracy then compete: the median exponent wins, and with an even
//! number of tied champions the middle exponent nearer to 1 wins.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostExponent, ExponentSet, ExponentSetName};
use crate::data::{Dataset, RngSeed};
use crate::distance::{direct_value, Distance, Penalty, WarpingWindow};
use crate::error::{Error, Result};

/// Ordered pairs sampled when estimating the ADTW penalty scale.
pub const OMEGA_PRIME_SAMPLES: usize = 4000;

/// Parameter values per exponent used by default.
pub const DEFAULT_PER_GAMMA: usize = 100;

/// The distance families with a tunable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TunedKind {
    /// DTW with a tuned window.
    Dtw,
    /// DTW without a window; only the exponent is tuned.
    Dtwf,
    /// ADTW with a tuned penalty.
    Adtw,
}

impl TunedKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TunedKind::Dtw => "dtw",
            TunedKind::Dtwf => "dtwf",
            TunedKind::Adtw => "adtw",
        }
    }
}

impl fmt::Display for TunedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TunedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtw" => Ok(TunedKind::Dtw),
            "dtwf" => Ok(TunedKind::Dtwf),
            "adtw" => Ok(TunedKind::Adtw),
            other => Err(Error::usage(format!(
                "unknown tunable distance {other:?} (expected dtw, dtwf or adtw)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Window(WarpingWindow),
    Penalty(Penalty),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Window(w) => write!(f, "w={w}"),
            Param::Penalty(p) => write!(f, "omega={}", p.value()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEntry {
    pub gamma: CostExponent,
    pub param: Param,
}

impl GridEntry {
    pub fn distance(&self) -> Distance {
        match self.param {
            Param::Window(window) => Distance::Dtw {
                window,
                gamma: self.gamma,
            },
            Param::Penalty(penalty) => Distance::Adtw {
                penalty,
                gamma: self.gamma,
            },
        }
    }
}

/// Candidate `(γ, parameter)` pairs, grouped by exponent in set order and
/// sorted by ascending parameter within each exponent.
#[derive(Debug, Clone)]
pub struct ParamGrid {
    kind: TunedKind,
    set: ExponentSet,
    per_gamma_count: usize,
    entries: Vec<GridEntry>,
    /// `groups[k]` is the index range of exponent `k`'s entries.
    groups: Vec<std::ops::Range<usize>>,
}

impl ParamGrid {
    fn from_groups(
        kind: TunedKind,
        set: &ExponentSet,
        per_gamma_count: usize,
        params: impl Fn(usize, CostExponent) -> Result<Vec<Param>>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        let mut groups = Vec::with_capacity(set.len());
        for (k, &gamma) in set.exponents().iter().enumerate() {
            let start = entries.len();
            entries.extend(
                params(k, gamma)?
                    .into_iter()
                    .map(|param| GridEntry { gamma, param }),
            );
            groups.push(start..entries.len());
        }
        Ok(Self {
            kind,
            set: set.clone(),
            per_gamma_count,
            entries,
            groups,
        })
    }

    /// DTW grid: [`window_grid`] for every exponent.
    pub fn dtw(series_len: usize, set: &ExponentSet, per_gamma_count: usize) -> Result<Self> {
        let windows = window_grid(series_len, per_gamma_count)?;
        Self::from_groups(TunedKind::Dtw, set, per_gamma_count, |_, _| {
            Ok(windows
                .iter()
                .map(|&w| Param::Window(WarpingWindow::Bounded(w)))
                .collect())
        })
    }

    /// Unconstrained DTW: one entry per exponent.
    pub fn dtw_full(set: &ExponentSet) -> Result<Self> {
        Self::from_groups(TunedKind::Dtwf, set, 1, |_, _| {
            Ok(vec![Param::Window(WarpingWindow::Unlimited)])
        })
    }

    /// ADTW grid: `ω′_γ × r_i` for every exponent, with `ω′_γ` estimated from `train`.
    pub fn adtw(
        train: &Dataset,
        set: &ExponentSet,
        per_gamma_count: usize,
        seed: RngSeed,
    ) -> Result<Self> {
        let ratios = penalty_ratios(per_gamma_count)?;
        Self::from_groups(TunedKind::Adtw, set, per_gamma_count, |_, gamma| {
            let omega_prime = estimate_omega_prime(train, gamma, seed)?;
            ratios
                .iter()
                .map(|r| Ok(Param::Penalty(Penalty::new(omega_prime * r)?)))
                .collect()
        })
    }

    pub fn build(
        kind: TunedKind,
        train: &Dataset,
        set: &ExponentSet,
        per_gamma_count: usize,
        seed: RngSeed,
    ) -> Result<Self> {
        match kind {
            TunedKind::Dtw => Self::dtw(train.series_len(), set, per_gamma_count),
            TunedKind::Dtwf => Self::dtw_full(set),
            TunedKind::Adtw => Self::adtw(train, set, per_gamma_count, seed),
        }
    }

    pub fn kind(&self) -> TunedKind {
        self.kind
    }

    pub fn set(&self) -> &ExponentSet {
        &self.set
    }

    pub fn per_gamma_count(&self) -> usize {
        self.per_gamma_count
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn groups(&self) -> &[std::ops::Range<usize>] {
        &self.groups
    }
}

/// `min(count, L − 1)` evenly spaced integer windows over `[0, L − 2]`:
/// `round(k (L − 2) / (count − 1))` for `k = 0..count`, deduplicated.
pub fn window_grid(series_len: usize, count: usize) -> Result<Vec<usize>> {
    if series_len < 2 {
        return Err(Error::usage(format!(
            "window grid needs series of length >= 2, got {series_len}"
        )));
    }
    if count == 0 {
        return Err(Error::usage("window grid needs at least one value"));
    }
    if count == 1 {
        return Ok(vec![0]);
    }
    let span = (series_len - 2) as f64;
    let mut windows: Vec<usize> = (0..count)
        .map(|k| (k as f64 * span / (count - 1) as f64).round() as usize)
        .collect();
    windows.dedup();
    Ok(windows)
}

/// Penalty ratios `(i / count)^5` for `i = 1..=count`, computed as an exact
/// integer quotient so the endpoints are `count^-5` and exactly `1.0`.
pub fn penalty_ratios(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::usage("penalty grid needs at least one value"));
    }
    let denom = (count as f64).powi(5);
    Ok((1..=count).map(|i| (i as f64).powi(5) / denom).collect())
}

/// Mean direct-alignment cost over seeded random ordered pairs of distinct
/// training series, or over every ordered pair when there are fewer than
/// [`OMEGA_PRIME_SAMPLES`] of them.
pub fn estimate_omega_prime(train: &Dataset, gamma: CostExponent, seed: RngSeed) -> Result<f64> {
    let n = train.len();
    if n < 2 {
        return Err(Error::usage(
            "estimating the penalty scale needs at least two series",
        ));
    }
    let series = train.series();
    let pair = |i: usize, j: usize| direct_value(series[i].values(), series[j].values(), gamma);
    if n * (n - 1) <= OMEGA_PRIME_SAMPLES {
        let mut total = 0.0;
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                total += pair(i, j);
            }
        }
        return Ok(total / (n * (n - 1)) as f64);
    }
    let mut rng = seed.rng();
    let mut total = 0.0;
    for _ in 0..OMEGA_PRIME_SAMPLES {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        total += pair(i, j);
    }
    Ok(total / OMEGA_PRIME_SAMPLES as f64)
}

/// Leave-one-out correct counts, one per grid entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoocvTable {
    pub correct: Vec<usize>,
    pub n: usize,
}

/// Index of the nearest neighbour of `query` among `others`, skipping
/// `exclude`; equal distances resolve to the smallest index.
pub(crate) fn nearest(
    distance: &Distance,
    query: &[f64],
    others: &Dataset,
    exclude: Option<usize>,
) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for (k, s) in others.series().iter().enumerate() {
        if Some(k) == exclude {
            continue;
        }
        let d = distance.eval_prepared(query, s.values());
        if d < best.0 || best.1 == usize::MAX {
            best = (d, k);
        }
    }
    best.1
}

/// For every grid entry, the number of training items whose nearest
/// neighbour among the other `N − 1` items shares their label.
pub fn loocv_table(train: &Dataset, grid: &ParamGrid) -> Result<LoocvTable> {
    train.check_tuning_gate()?;
    let n = train.len();
    let correct = grid
        .entries()
        .par_iter()
        .map(|entry| loocv_correct(train, &entry.distance()))
        .collect();
    Ok(LoocvTable { correct, n })
}

fn loocv_correct(train: &Dataset, distance: &Distance) -> usize {
    let n = train.len();
    let series = train.series();
    let labels = train.labels();
    // Every distance here is symmetric, so fill the upper triangle once.
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for k in i + 1..n {
            let d = distance.eval_prepared(series[i].values(), series[k].values());
            dist[i * n + k] = d;
            dist[k * n + i] = d;
        }
    }
    (0..n)
        .filter(|&i| {
            let mut best = (f64::INFINITY, usize::MAX);
            for k in (0..n).filter(|&k| k != i) {
                let d = dist[i * n + k];
                if d < best.0 || best.1 == usize::MAX {
                    best = (d, k);
                }
            }
            labels[best.1] == labels[i]
        })
        .count()
}

/// Applies the tie-breaking hierarchy to a LOOCV table and returns the index
/// of the winning grid entry.
pub fn select_entry(grid: &ParamGrid, table: &LoocvTable) -> Result<usize> {
    if table.correct.len() != grid.len() {
        return Err(Error::usage(format!(
            "LOOCV table has {} entries, grid has {}",
            table.correct.len(),
            grid.len()
        )));
    }
    // Per-exponent champions.
    let champions: Vec<usize> = grid
        .groups()
        .iter()
        .filter(|r| !r.is_empty())
        .map(|range| {
            let best = range.clone().map(|i| table.correct[i]).max().unwrap_or(0);
            let tied: Vec<usize> = range
                .clone()
                .filter(|&i| table.correct[i] == best)
                .collect();
            match grid.kind() {
                TunedKind::Adtw => tied[(tied.len() - 1) / 2],
                TunedKind::Dtw | TunedKind::Dtwf => tied[0],
            }
        })
        .collect();
    let Some(best) = champions.iter().map(|&i| table.correct[i]).max() else {
        return Err(Error::usage("cannot select from an empty grid"));
    };
    let tied: Vec<usize> = champions
        .into_iter()
        .filter(|&i| table.correct[i] == best)
        .collect();
    let m = tied.len();
    if m % 2 == 1 {
        return Ok(tied[m / 2]);
    }
    let (lower, upper) = (tied[m / 2 - 1], tied[m / 2]);
    let gl = grid.entries()[lower].gamma.gamma();
    let gu = grid.entries()[upper].gamma.gamma();
    let (dl, du) = ((gl - 1.0).abs(), (gu - 1.0).abs());
    Ok(if dl < du || (dl == du && gl <= gu) {
        lower
    } else {
        upper
    })
}

/// A tuned nearest-neighbour configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelDoc", try_from = "ModelDoc")]
pub struct TrainedModel {
    pub distance: TunedKind,
    pub gamma: CostExponent,
    pub param: Param,
    pub train_correct: usize,
    pub train_size: usize,
    pub set: ExponentSetName,
    pub exponents: Vec<CostExponent>,
    pub per_gamma_count: usize,
    pub seed: RngSeed,
}

impl TrainedModel {
    pub fn train_accuracy(&self) -> f64 {
        self.train_correct as f64 / self.train_size as f64
    }

    pub fn distance_config(&self) -> Distance {
        GridEntry {
            gamma: self.gamma,
            param: self.param,
        }
        .distance()
    }
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    set: ExponentSetName,
    per_gamma_count: usize,
    exponents: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamDoc {
    Window(usize),
    Penalty(f64),
    Unlimited(String),
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    distance: TunedKind,
    gamma: f64,
    param: ParamDoc,
    train_accuracy: f64,
    train_correct: usize,
    train_size: usize,
    grid: GridDoc,
    seed: u64,
}

impl From<TrainedModel> for ModelDoc {
    fn from(m: TrainedModel) -> Self {
        let param = match m.param {
            Param::Window(WarpingWindow::Bounded(w)) => ParamDoc::Window(w),
            Param::Window(WarpingWindow::Unlimited) => ParamDoc::Unlimited("unlimited".into()),
            Param::Penalty(p) => ParamDoc::Penalty(p.value()),
        };
        ModelDoc {
            distance: m.distance,
            gamma: m.gamma.gamma(),
            param,
            train_accuracy: m.train_accuracy(),
            train_correct: m.train_correct,
            train_size: m.train_size,
            grid: GridDoc {
                set: m.set,
                per_gamma_count: m.per_gamma_count,
                exponents: m.exponents.iter().map(|g| g.gamma()).collect(),
            },
            seed: m.seed.0,
        }
    }
}

impl TryFrom<ModelDoc> for TrainedModel {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let param = match (doc.distance, doc.param) {
            (TunedKind::Adtw, ParamDoc::Penalty(p)) => Param::Penalty(Penalty::new(p)?),
            (TunedKind::Adtw, ParamDoc::Window(p)) => Param::Penalty(Penalty::new(p as f64)?),
            (_, ParamDoc::Window(w)) => Param::Window(WarpingWindow::Bounded(w)),
            (_, ParamDoc::Unlimited(s)) if s == "unlimited" => {
                Param::Window(WarpingWindow::Unlimited)
            }
            (kind, _) => return Err(Error::usage(format!("invalid parameter for {kind} model"))),
        };
        if doc.train_size == 0 || doc.train_correct > doc.train_size {
            return Err(Error::usage("train accuracy counts are inconsistent"));
        }
        Ok(TrainedModel {
            distance: doc.distance,
            gamma: CostExponent::new(doc.gamma)?,
            param,
            train_correct: doc.train_correct,
            train_size: doc.train_size,
            set: doc.grid.set,
            exponents: doc
                .grid
                .exponents
                .into_iter()
                .map(CostExponent::new)
                .collect::<Result<_>>()?,
            per_gamma_count: doc.grid.per_gamma_count,
            seed: RngSeed(doc.seed),
        })
    }
}

/// Builds the model for grid entry `idx` of a LOOCV run.
pub fn model_from_selection(
    grid: &ParamGrid,
    table: &LoocvTable,
    idx: usize,
    seed: RngSeed,
) -> TrainedModel {
    let entry = grid.entries()[idx];
    TrainedModel {
        distance: grid.kind(),
        gamma: entry.gamma,
        param: entry.param,
        train_correct: table.correct[idx],
        train_size: table.n,
        set: grid.set().name(),
        exponents: grid.set().exponents().to_vec(),
        per_gamma_count: grid.per_gamma_count(),
        seed,
    }
}

/// Tunes `(γ, w)` or `(γ, ω)` jointly by LOOCV over `set × per_gamma_count`.
pub fn train_plus(
    train: &Dataset,
    kind: TunedKind,
    set: &ExponentSet,
    per_gamma_count: usize,
    seed: RngSeed,
) -> Result<TrainedModel> {
    train.check_tuning_gate()?;
    let grid = ParamGrid::build(kind, train, set, per_gamma_count, seed)?;
    let table = loocv_table(train, &grid)?;
    let idx = select_entry(&grid, &table)?;
    Ok(model_from_selection(&grid, &table, idx, seed))
}

/// Tunes only the window or penalty for a fixed exponent.
pub fn train_fixed(
    train: &Dataset,
    kind: TunedKind,
    gamma: CostExponent,
    per_gamma_count: usize,
    seed: RngSeed,
) -> Result<TrainedModel> {
    train_plus(
        train,
        kind,
        &ExponentSet::single(gamma),
        per_gamma_count,
        seed,
    )
}

/// Fraction of `test` items whose nearest training neighbour shares their label.
pub fn classify(model: &TrainedModel, train: &Dataset, test: &Dataset) -> Result<f64> {
    classify_with(&model.distance_config(), train, test)
}

pub fn classify_with(distance: &Distance, train: &Dataset, test: &Dataset) -> Result<f64> {
    if test.is_empty() || train.is_empty() {
        return Err(Error::usage(
            "classification needs non-empty train and test sets",
        ));
    }
    if train.series_len() != test.series_len() {
        return Err(Error::LengthMismatch {
            left: train.series_len(),
            right: test.series_len(),
        });
    }
    distance.validate()?;
    let correct = test
        .series()
        .par_iter()
        .zip(test.labels().par_iter())
        .filter(|(s, &label)| {
            let nn = nearest(distance, s.values(), train, None);
            train.labels()[nn] == label
        })
        .count();
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::exponent_set;
    use crate::data::{Series, Split};

    fn ds(items: Vec<(Vec<f64>, i64)>) -> Dataset {
        Dataset::new(
            "t",
            Split::Train,
            items.into_iter().map(|(v, l)| (Series::new(v).unwrap(), l)),
        )
        .unwrap()
    }

    #[test]
    fn window_grid_examples() {
        assert_eq!(window_grid(12, 100).unwrap(), (0..=10).collect::<Vec<_>>());
        let g = window_grid(102, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0);
        assert_eq!(*g.last().unwrap(), 100);
        // round(k * 100 / 99) for k = 50 is round(50.505) = 51
        assert_eq!(g[50], 51);
        assert_eq!(window_grid(50, 1).unwrap(), vec![0]);
        assert_eq!(window_grid(2, 100).unwrap(), vec![0]);
        assert!(window_grid(1, 10).is_err());
    }

    #[test]
    fn ratio_endpoints_are_exact() {
        let r = penalty_ratios(100).unwrap();
        assert_eq!(r.len(), 100);
        assert_eq!(r[0], 1e-10);
        assert_eq!(r[99], 1.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(penalty_ratios(500).unwrap()[499], 1.0);
    }

    #[test]
    fn omega_prime_examples() {
        let same = ds(vec![(vec![1.0, 2.0, 3.0], 0), (vec![1.0, 2.0, 3.0], 1)]);
        assert_eq!(
            estimate_omega_prime(&same, CostExponent::ABS, RngSeed(1)).unwrap(),
            0.0
        );
        let pair = ds(vec![(vec![0.0, 0.0, 0.0], 0), (vec![1.0, 2.0, 3.0], 1)]);
        assert_eq!(
            estimate_omega_prime(&pair, CostExponent::ABS, RngSeed(1)).unwrap(),
            6.0
        );
        let single = ds(vec![(vec![0.0], 0)]);
        assert!(estimate_omega_prime(&single, CostExponent::ABS, RngSeed(1)).is_err());
    }

    #[test]
    fn grid_sizes() {
        let a = exponent_set("a").unwrap();
        assert_eq!(ParamGrid::dtw(102, &a, 100).unwrap().len(), 500);
        assert_eq!(ParamGrid::dtw(12, &a, 100).unwrap().len(), 55);
        let train = ds(vec![
            (vec![0.0, 1.0, 0.5], 0),
            (vec![0.2, 1.0, 0.5], 0),
            (vec![3.0, 1.0, 0.0], 1),
            (vec![3.0, 1.5, 0.0], 1),
        ]);
        let g = ParamGrid::adtw(&train, &a, 100, RngSeed(3)).unwrap();
        assert_eq!(g.len(), 500);
        for range in g.groups() {
            let ps: Vec<f64> = g.entries()[range.clone()]
                .iter()
                .map(|e| match e.param {
                    Param::Penalty(p) => p.value(),
                    Param::Window(_) => unreachable!(),
                })
                .collect();
            assert!(ps.windows(2).all(|w| w[0] < w[1]));
        }
    }

    fn table(grid: &ParamGrid, f: impl Fn(usize, &GridEntry) -> usize) -> LoocvTable {
        LoocvTable {
            correct: grid
                .entries()
                .iter()
                .enumerate()
                .map(|(i, e)| f(i, e))
                .collect(),
            n: 10,
        }
    }

    #[test]
    fn all_tied_picks_gamma_one_smallest_window() {
        let grid = ParamGrid::dtw(30, &exponent_set("a").unwrap(), 100).unwrap();
        let t = table(&grid, |_, _| 7);
        let e = grid.entries()[select_entry(&grid, &t).unwrap()];
        assert_eq!(e.gamma.gamma(), 1.0);
        assert_eq!(e.param, Param::Window(WarpingWindow::Bounded(0)));
    }

    #[test]
    fn even_tie_prefers_gamma_near_one() {
        let grid = ParamGrid::dtw(30, &exponent_set("a").unwrap(), 100).unwrap();
        let t = table(&grid, |_, e| if e.gamma.gamma() >= 1.5 { 9 } else { 3 });
        let e = grid.entries()[select_entry(&grid, &t).unwrap()];
        assert_eq!(e.gamma.gamma(), 1.5);

        let t = table(&grid, |_, e| {
            let g = e.gamma.gamma();
            if g == 0.5 || g == 2.0 {
                9
            } else {
                3
            }
        });
        let e = grid.entries()[select_entry(&grid, &t).unwrap()];
        assert_eq!(e.gamma.gamma(), 0.5);
    }

    #[test]
    fn adtw_within_gamma_median() {
        let train = ds(vec![
            (vec![0.0, 1.0, 0.5], 0),
            (vec![0.2, 1.0, 0.5], 0),
            (vec![3.0, 1.0, 0.0], 1),
            (vec![3.0, 1.5, 0.0], 1),
        ]);
        let set = ExponentSet::single(CostExponent::ABS);
        let grid = ParamGrid::adtw(&train, &set, 10, RngSeed(0)).unwrap();
        // Indices 2..=5 tie: four entries, lower middle is index 3.
        let t = table(&grid, |i, _| if (2..=5).contains(&i) { 4 } else { 1 });
        assert_eq!(select_entry(&grid, &t).unwrap(), 3);
        let t = table(&grid, |i, _| if (2..=6).contains(&i) { 4 } else { 1 });
        assert_eq!(select_entry(&grid, &t).unwrap(), 4);
    }

    #[test]
    fn dtw_within_gamma_smallest_window() {
        let set = ExponentSet::single(CostExponent::SQUARE);
        let grid = ParamGrid::dtw(30, &set, 100).unwrap();
        let t = table(&grid, |i, _| if i >= 4 { 8 } else { 2 });
        assert_eq!(select_entry(&grid, &t).unwrap(), 4);
    }

    fn separable() -> Dataset {
        ds(vec![
            (vec![0.0; 6], 1),
            (vec![0.1; 6], 1),
            (vec![0.2; 6], 1),
            (vec![5.0; 6], 2),
            (vec![5.1; 6], 2),
            (vec![4.9; 6], 2),
        ])
    }

    #[test]
    fn separable_classes_are_always_correct() {
        let train = separable();
        let grid = ParamGrid::dtw(6, &exponent_set("a").unwrap(), 100).unwrap();
        let t = loocv_table(&train, &grid).unwrap();
        assert!(t.correct.iter().all(|&c| c == 6));
        let model = train_plus(
            &train,
            TunedKind::Adtw,
            &exponent_set("a").unwrap(),
            100,
            RngSeed(1),
        )
        .unwrap();
        assert_eq!(model.train_accuracy(), 1.0);
        assert_eq!(classify(&model, &train, &train).unwrap(), 1.0);
    }

    #[test]
    fn gate_and_classify_errors() {
        let bad = ds(vec![
            (vec![0.0; 4], 1),
            (vec![1.0; 4], 2),
            (vec![1.1; 4], 2),
        ]);
        let grid = ParamGrid::dtw(4, &exponent_set("a").unwrap(), 10).unwrap();
        assert!(matches!(
            loocv_table(&bad, &grid),
            Err(Error::SingletonClass { label: 1 })
        ));
        let train = separable();
        let model =
            train_fixed(&train, TunedKind::Dtw, CostExponent::ABS, 100, RngSeed(0)).unwrap();
        let short = ds(vec![(vec![0.0; 5], 1)]);
        assert!(matches!(
            classify(&model, &train, &short),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let train = separable();
        for kind in [TunedKind::Dtw, TunedKind::Dtwf, TunedKind::Adtw] {
            let m = train_plus(&train, kind, &exponent_set("a").unwrap(), 20, RngSeed(11)).unwrap();
            let json = serde_json::to_value(&m).unwrap();
            assert_eq!(json["distance"], kind.as_str());
            assert_eq!(json["grid"]["set"], "a");
            assert_eq!(json["train_accuracy"], 1.0);
            let back: TrainedModel = serde_json::from_value(json).unwrap();
            assert_eq!(back, m);
        }
    }
}
