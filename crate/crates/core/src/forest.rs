//! Proximity Forest, with an optional mode that samples the cost exponent at
//! every node for the DTW family and SQED.
//!
//! Each internal node holds one exemplar per class present at that node and a
//! randomly parameterised distance; items follow the branch of their nearest
//! exemplar. Every tree draws from its own ChaCha stream (stream index = tree
//! index), so parallel and serial training produce identical forests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostExponent, ExponentSet, ExponentSetName};
use crate::data::{derivative_values, Dataset, Label, RngSeed};
use crate::distance::{Distance, WarpingWindow};
use crate::error::{Error, Result};

/// Sampling rounds before a node that no candidate can split becomes a leaf.
const MAX_SPLIT_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitterKind {
    Sqed,
    DtwFull,
    DtwWindow,
    DdtwFull,
    DdtwWindow,
    Wdtw,
    Dwdtw,
    Lcss,
    Erp,
    Msm,
    Twe,
}

impl SplitterKind {
    pub const ALL: [SplitterKind; 11] = [
        SplitterKind::Sqed,
        SplitterKind::DtwFull,
        SplitterKind::DtwWindow,
        SplitterKind::DdtwFull,
        SplitterKind::DdtwWindow,
        SplitterKind::Wdtw,
        SplitterKind::Dwdtw,
        SplitterKind::Lcss,
        SplitterKind::Erp,
        SplitterKind::Msm,
        SplitterKind::Twe,
    ];

    /// Kinds whose pointwise cost is `|a - b|^γ`.
    pub fn uses_gamma(self) -> bool {
        !matches!(
            self,
            SplitterKind::Lcss | SplitterKind::Erp | SplitterKind::Msm | SplitterKind::Twe
        )
    }

    pub fn uses_derivative(self) -> bool {
        matches!(
            self,
            SplitterKind::DdtwFull | SplitterKind::DdtwWindow | SplitterKind::Dwdtw
        )
    }
}

/// `c` values for MSM: 100 points spaced exponentially from 0.01 to 100.
pub fn msm_cost_ladder() -> Vec<f64> {
    (0..100)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0))
        .collect()
}

/// Stiffness values for TWE.
pub const TWE_NU: [f64; 10] = [1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1, 0.5, 1.0];

/// Edit penalties for TWE: ten points evenly spaced over `[0, 0.1]`.
pub fn twe_lambda_ladder() -> Vec<f64> {
    (0..10).map(|i| 0.1 * i as f64 / 9.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfConfig {
    pub num_trees: usize,
    pub candidates_per_node: usize,
    pub plus_mode: bool,
    pub exponent_set: ExponentSet,
    pub seed: RngSeed,
}

impl PfConfig {
    pub fn new(seed: RngSeed) -> Self {
        Self {
            num_trees: 100,
            candidates_per_node: 5,
            plus_mode: false,
            exponent_set: ExponentSet::named(ExponentSetName::A)
                .expect("set a is always constructible"),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 || self.candidates_per_node == 0 {
            return Err(Error::usage(
                "forest needs at least one tree and one candidate per node",
            ));
        }
        Ok(())
    }
}

/// A node's distance together with its per-class exemplars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Splitter {
    pub kind: SplitterKind,
    pub distance: Distance,
    /// Training-set indices, one per class, in ascending label order.
    pub exemplars: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        label: Label,
    },
    Internal {
        splitter: Splitter,
        children: Vec<Node>,
    },
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { children, .. } => {
                1 + children.iter().map(Node::depth).max().unwrap_or(0)
            }
        }
    }
}

/// 1 − Σ p². Errors when every count is zero.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::usage("gini of an empty node"));
    }
    let t = total as f64;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>())
}

/// Size-weighted mean Gini impurity of a partition.
pub fn weighted_gini(children: &[Vec<Label>]) -> f64 {
    let total: usize = children.iter().map(Vec::len).sum();
    children
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
            for &l in c {
                *counts.entry(l).or_default() += 1;
            }
            let counts: Vec<usize> = counts.into_values().collect();
            c.len() as f64 / total as f64 * gini(&counts).unwrap_or(0.0)
        })
        .sum()
}

/// Training series in the two representations splitters need.
#[derive(Debug, Clone)]
struct TrainViews {
    raw: Vec<Vec<f64>>,
    deriv: Option<Vec<Vec<f64>>>,
    labels: Vec<Label>,
}

impl TrainViews {
    fn new(train: &Dataset) -> Result<Self> {
        let raw: Vec<Vec<f64>> = train.series().iter().map(|s| s.values().to_vec()).collect();
        let deriv = if train.series_len() >= 3 {
            Some(
                raw.iter()
                    .map(|v| derivative_values(v))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            raw,
            deriv,
            labels: train.labels().to_vec(),
        })
    }

    fn view(&self, idx: usize, derivative: bool) -> &[f64] {
        match (&self.deriv, derivative) {
            (Some(d), true) => &d[idx],
            _ => &self.raw[idx],
        }
    }
}

/// Draws random splitters for nodes of one training set.
#[derive(Debug, Clone)]
pub struct SplitterSampler {
    kinds: Vec<SplitterKind>,
    series_len: usize,
    value_std: f64,
    plus_mode: bool,
    exponents: Vec<CostExponent>,
    msm_costs: Vec<f64>,
    twe_lambdas: Vec<f64>,
}

impl SplitterSampler {
    pub fn new(train: &Dataset, config: &PfConfig) -> Self {
        // The derivative transform needs three points.
        let kinds = SplitterKind::ALL
            .into_iter()
            .filter(|k| train.series_len() >= 3 || !k.uses_derivative())
            .collect();
        Self {
            kinds,
            series_len: train.series_len(),
            value_std: train.value_std(),
            plus_mode: config.plus_mode,
            exponents: config.exponent_set.exponents().to_vec(),
            msm_costs: msm_cost_ladder(),
            twe_lambdas: twe_lambda_ladder(),
        }
    }

    /// Samples a distance kind, its parameters and one exemplar per class
    /// among `items` (indices into `labels`).
    pub fn sample(
        &self,
        items: &[usize],
        labels: &[Label],
        rng: &mut ChaCha8Rng,
    ) -> Result<Splitter> {
        let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
        for &i in items {
            by_class.entry(labels[i]).or_default().push(i);
        }
        if by_class.len() < 2 {
            return Err(Error::usage("cannot split a node holding a single class"));
        }
        let kind = *self.kinds.choose(rng).expect("kind list is never empty");
        let gamma = if kind.uses_gamma() && self.plus_mode {
            *self
                .exponents
                .choose(rng)
                .expect("exponent set is never empty")
        } else {
            CostExponent::SQUARE
        };
        let distance = self.sample_params(kind, gamma, rng);
        let exemplars = by_class
            .values()
            .map(|members| *members.choose(rng).expect("class has members"))
            .collect();
        Ok(Splitter {
            kind,
            distance,
            exemplars,
        })
    }

    fn sample_params(
        &self,
        kind: SplitterKind,
        gamma: CostExponent,
        rng: &mut ChaCha8Rng,
    ) -> Distance {
        let quarter = self.series_len / 4;
        let sd = self.value_std;
        let mut window = || WarpingWindow::Bounded(rng.gen_range(0..=quarter));
        match kind {
            SplitterKind::Sqed => Distance::Sqed { gamma },
            SplitterKind::DtwFull => Distance::Dtw {
                window: WarpingWindow::Unlimited,
                gamma,
            },
            SplitterKind::DtwWindow => Distance::Dtw {
                window: window(),
                gamma,
            },
            SplitterKind::DdtwFull => Distance::Ddtw {
                window: WarpingWindow::Unlimited,
                gamma,
            },
            SplitterKind::DdtwWindow => Distance::Ddtw {
                window: window(),
                gamma,
            },
            SplitterKind::Wdtw => Distance::Wdtw {
                g: rng.gen_range(0.0..1.0),
                gamma,
            },
            SplitterKind::Dwdtw => Distance::Dwdtw {
                g: rng.gen_range(0.0..1.0),
                gamma,
            },
            SplitterKind::Lcss => {
                let epsilon = uniform_or(rng, sd / 5.0, sd).max(f64::EPSILON);
                Distance::Lcss {
                    epsilon,
                    window: WarpingWindow::Bounded(rng.gen_range(0..=quarter)),
                }
            }
            SplitterKind::Erp => {
                let gap = uniform_or(rng, sd / 5.0, sd);
                Distance::Erp {
                    gap,
                    window: WarpingWindow::Bounded(rng.gen_range(0..=quarter)),
                }
            }
            SplitterKind::Msm => Distance::Msm {
                cost: *self.msm_costs.choose(rng).expect("non-empty ladder"),
            },
            SplitterKind::Twe => Distance::Twe {
                nu: *TWE_NU.choose(rng).expect("non-empty ladder"),
                lambda: *self.twe_lambdas.choose(rng).expect("non-empty ladder"),
            },
        }
    }
}

fn uniform_or(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Index of the exemplar nearest to `query`; the first exemplar wins ties.
fn route(
    splitter: &Splitter,
    views: &TrainViews,
    query: &[f64],
    query_deriv: Option<&[f64]>,
) -> usize {
    let derivative = splitter.kind.uses_derivative();
    let q = match (derivative, query_deriv) {
        (true, Some(d)) => d,
        _ => query,
    };
    let mut best = (f64::INFINITY, 0);
    for (b, &ex) in splitter.exemplars.iter().enumerate() {
        let d = splitter
            .distance
            .eval_prepared(q, views.view(ex, derivative));
        if d < best.0 {
            best = (d, b);
        }
    }
    best.1
}

fn majority(labels: impl IntoIterator<Item = Label>) -> Label {
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // BTreeMap iterates in ascending label order, so the first maximum is the smallest label.
    let mut best = (0usize, Label::MIN);
    for (l, c) in counts {
        if c > best.0 {
            best = (c, l);
        }
    }
    best.1
}

struct TreeBuilder<'a> {
    views: &'a TrainViews,
    sampler: &'a SplitterSampler,
    candidates: usize,
}

impl TreeBuilder<'_> {
    fn build(&self, items: Vec<usize>, rng: &mut ChaCha8Rng) -> Result<Node> {
        let labels = &self.views.labels;
        let first = labels[items[0]];
        if items.iter().all(|&i| labels[i] == first) {
            return Ok(Node::Leaf { label: first });
        }
        let majority_leaf = || Node::Leaf {
            label: majority(items.iter().map(|&i| labels[i])),
        };
        let reference = &self.views.raw[items[0]];
        if items.iter().all(|&i| &self.views.raw[i] == reference) {
            return Ok(majority_leaf());
        }

        for _ in 0..MAX_SPLIT_ROUNDS {
            let mut best: Option<(f64, Splitter, Vec<Vec<usize>>)> = None;
            for _ in 0..self.candidates {
                let splitter = self.sampler.sample(&items, labels, rng)?;
                let mut parts = vec![Vec::new(); splitter.exemplars.len()];
                for &i in &items {
                    let q = &self.views.raw[i];
                    let qd = self.views.deriv.as_ref().map(|d| d[i].as_slice());
                    parts[route(&splitter, self.views, q, qd)].push(i);
                }
                let part_labels: Vec<Vec<Label>> = parts
                    .iter()
                    .map(|p| p.iter().map(|&i| labels[i]).collect())
                    .collect();
                let score = weighted_gini(&part_labels);
                if !matches!(&best, Some((s, _, _)) if score >= *s) {
                    best = Some((score, splitter, parts));
                }
            }
            let (_, splitter, parts) = best.expect("at least one candidate");
            if parts.iter().filter(|p| !p.is_empty()).count() < 2 {
                continue;
            }
            let mut children = Vec::with_capacity(parts.len());
            for (b, part) in parts.into_iter().enumerate() {
                children.push(if part.is_empty() {
                    Node::Leaf {
                        label: labels[splitter.exemplars[b]],
                    }
                } else {
                    self.build(part, rng)?
                });
            }
            return Ok(Node::Internal { splitter, children });
        }
        Ok(majority_leaf())
    }
}

fn tree_rng(seed: RngSeed, tree: usize) -> ChaCha8Rng {
    let mut rng = seed.rng();
    rng.set_stream(tree as u64);
    rng
}

/// A trained forest bound to its training data.
#[derive(Debug, Clone)]
pub struct ProximityForest {
    config: PfConfig,
    trees: Vec<Node>,
    views: TrainViews,
}

/// Serialisable form of a forest; exemplars are indices into the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: PfConfig,
    pub train_size: usize,
    pub series_len: usize,
    pub trees: Vec<Node>,
}

impl ProximityForest {
    pub fn train(train: &Dataset, config: &PfConfig) -> Result<Self> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::usage("cannot train a forest on an empty set"));
        }
        let views = TrainViews::new(train)?;
        let sampler = SplitterSampler::new(train, config);
        let builder = TreeBuilder {
            views: &views,
            sampler: &sampler,
            candidates: config.candidates_per_node,
        };
        let trees = (0..config.num_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(config.seed, t);
                builder.build((0..train.len()).collect(), &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            trees,
            views,
        })
    }

    pub fn config(&self) -> &PfConfig {
        &self.config
    }

    pub fn trees(&self) -> &[Node] {
        &self.trees
    }

    fn predict_tree(&self, mut node: &Node, query: &[f64], query_deriv: Option<&[f64]>) -> Label {
        loop {
            match node {
                Node::Leaf { label } => return *label,
                Node::Internal { splitter, children } => {
                    node = &children[route(splitter, &self.views, query, query_deriv)];
                }
            }
        }
    }

    /// Majority vote over trees; ties go to the smallest label.
    pub fn predict(&self, series: &[f64]) -> Result<Label> {
        let len = self.views.raw[0].len();
        if series.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: series.len(),
            });
        }
        let deriv = if len >= 3 {
            Some(derivative_values(series)?)
        } else {
            None
        };
        Ok(majority(
            self.trees
                .iter()
                .map(|t| self.predict_tree(t, series, deriv.as_deref())),
        ))
    }

    pub fn accuracy(&self, test: &Dataset) -> Result<f64> {
        if test.is_empty() {
            return Err(Error::usage("cannot score an empty test set"));
        }
        let predictions = test
            .series()
            .par_iter()
            .map(|s| self.predict(s.values()))
            .collect::<Result<Vec<_>>>()?;
        let correct = predictions
            .iter()
            .zip(test.labels())
            .filter(|(p, l)| p == l)
            .count();
        Ok(correct as f64 / test.len() as f64)
    }

    pub fn to_model(&self) -> ForestModel {
        ForestModel {
            config: self.config.clone(),
            train_size: self.views.raw.len(),
            series_len: self.views.raw[0].len(),
            trees: self.trees.clone(),
        }
    }

    /// Rebinds a deserialised forest to the training set it was grown on.
    pub fn from_model(model: ForestModel, train: &Dataset) -> Result<Self> {
        if model.train_size != train.len() || model.series_len != train.series_len() {
            return Err(Error::usage(format!(
                "forest was trained on {} series of length {}, got {} of length {}",
                model.train_size,
                model.series_len,
                train.len(),
                train.series_len()
            )));
        }
        fn check(node: &Node, n: usize) -> bool {
            match node {
                Node::Leaf { .. } => true,
                Node::Internal { splitter, children } => {
                    splitter.exemplars.len() == children.len()
                        && splitter.exemplars.iter().all(|&e| e < n)
                        && children.iter().all(|c| check(c, n))
                }
            }
        }
        if !model.trees.iter().all(|t| check(t, train.len())) {
            return Err(Error::usage(
                "forest references exemplars outside the training set",
            ));
        }
        Ok(Self {
            config: model.config,
            trees: model.trees,
            views: TrainViews::new(train)?,
        })
    }
}

/// Trains a forest and returns it; shorthand for [`ProximityForest::train`].
pub fn train_pf(train: &Dataset, config: &PfConfig) -> Result<ProximityForest> {
    ProximityForest::train(train, config)
}
