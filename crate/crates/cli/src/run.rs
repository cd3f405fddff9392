//! Subcommand implementations. Each returns the lines it would print so the
//! binary stays a thin shell.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::hint::black_box;
use std::path::{Path, PathBuf};
use std::time::Instant;

use elastika::cost::{exponent_set, CostExponent};
use elastika::data::{add_noise, load_ucr_dataset, ucr_paths, write_ucr_dataset, Dataset, RngSeed};
use elastika::forest::{ForestModel, PfConfig, ProximityForest};
use elastika::report::{emit_cd, emit_scatter};
use elastika::stats::{
    cliques, mean_ranks, wilcoxon_signed_rank, win_tie_loss, AccuracyMatrix, PairRow,
    PairedAccuracies,
};
use elastika::tuning::{classify, train_plus, Param, TrainedModel};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::classifier::{ClassifierId, Exponents};
use crate::cli::{
    CdArgs, DatasetSelection, ForestOptions, NoiseArgs, NoisySplits, PfArgs, PredictArgs,
    ScatterArgs, SweepArgs, SweepOptions, SynthArgs, TimingArgs, TuneArgs,
};
use crate::error::{CliError, Result};
use crate::record::{RecordModel, RunRecord, Store, VERSION};
use crate::synth;

/// A trained classifier's serialisable artefact.
pub enum Artifact {
    Tuned(TrainedModel),
    Forest(ForestModel),
}

impl Artifact {
    fn write(&self, path: &Path) -> Result<()> {
        let json = match self {
            Artifact::Tuned(m) => serde_json::to_string_pretty(m),
            Artifact::Forest(m) => serde_json::to_string(m),
        }
        .map_err(|e| CliError::Internal(format!("cannot encode model: {e}")))?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(path, json + "\n").map_err(|e| CliError::io(path, e))
    }
}

fn forest_config(plus: bool, opts: ForestOptions, seed: u64) -> PfConfig {
    let mut config = PfConfig::new(RngSeed(seed));
    config.plus_mode = plus;
    config.num_trees = opts.trees;
    config.candidates_per_node = opts.candidates;
    config
}

/// Trains `id` on `train`, scores it on `test` and builds the record.
pub fn run_classifier(
    id: &ClassifierId,
    train: &Dataset,
    test: &Dataset,
    seed: u64,
    forest: ForestOptions,
) -> Result<(RunRecord, Artifact)> {
    let start = Instant::now();
    let (model, artifact, accuracy, train_seconds, test_seconds) = match *id {
        ClassifierId::Tuned {
            kind,
            exponents,
            per_gamma,
        } => {
            let model = train_plus(train, kind, &exponents.set()?, per_gamma, RngSeed(seed))?;
            let trained = start.elapsed().as_secs_f64();
            let test_start = Instant::now();
            let acc = classify(&model, train, test)?;
            let tested = test_start.elapsed().as_secs_f64();
            (
                RecordModel::Tuned(model.clone()),
                Artifact::Tuned(model),
                acc,
                trained,
                tested,
            )
        }
        ClassifierId::Forest { plus } => {
            let config = forest_config(plus, forest, seed);
            let pf = ProximityForest::train(train, &config)?;
            let trained = start.elapsed().as_secs_f64();
            let test_start = Instant::now();
            let acc = pf.accuracy(test)?;
            let tested = test_start.elapsed().as_secs_f64();
            (
                RecordModel::Forest(config),
                Artifact::Forest(pf.to_model()),
                acc,
                trained,
                tested,
            )
        }
    };
    let record = RunRecord {
        dataset: train.name().to_string(),
        classifier: id.to_string(),
        model,
        test_accuracy: accuracy,
        train_seconds,
        test_seconds,
        seed,
        version: VERSION.to_string(),
    };
    Ok((record, artifact))
}

fn describe(record: &RunRecord) -> String {
    let detail = match &record.model {
        RecordModel::Tuned(m) => match m.param {
            Param::Window(w) => format!(" gamma={} w={w}", m.gamma),
            Param::Penalty(p) => format!(" gamma={} omega={}", m.gamma, p.value()),
        },
        RecordModel::Forest(c) => format!(" trees={}", c.num_trees),
    };
    format!(
        "{} {} test_accuracy={:.4}{detail} train_s={:.3} test_s={:.3}",
        record.dataset,
        record.classifier,
        record.test_accuracy,
        record.train_seconds,
        record.test_seconds
    )
}

pub fn tune(args: &TuneArgs) -> Result<Vec<String>> {
    let exponents = match (args.gamma, args.set) {
        (Some(g), _) => Exponents::Fixed(CostExponent::new(g)?),
        (None, Some(name)) => Exponents::Set(name),
        (None, None) => Exponents::Set(exponent_set("a")?.name()),
    };
    if args.per_gamma == 0 {
        return Err(CliError::usage("--per-gamma must be positive"));
    }
    let id = ClassifierId::Tuned {
        kind: args.distance,
        exponents,
        per_gamma: args.per_gamma,
    };
    let (train, test) = load_ucr_dataset(&args.data_dir, &args.dataset)?;
    let (record, artifact) = run_classifier(
        &id,
        &train,
        &test,
        args.seed,
        ForestOptions {
            trees: 0,
            candidates: 0,
        },
    )?;
    Store::new(&args.out).append(&record)?;
    if let Some(path) = &args.model_out {
        artifact.write(path)?;
    }
    Ok(vec![describe(&record)])
}

pub fn pf(args: &PfArgs) -> Result<Vec<String>> {
    let id = ClassifierId::Forest { plus: args.plus };
    forest_config(args.plus, args.forest, args.seed).validate()?;
    let (train, test) = load_ucr_dataset(&args.data_dir, &args.dataset)?;
    let (record, artifact) = run_classifier(&id, &train, &test, args.seed, args.forest)?;
    Store::new(&args.out).append(&record)?;
    if let Some(path) = &args.model_out {
        artifact.write(path)?;
    }
    Ok(vec![describe(&record)])
}

pub fn predict(args: &PredictArgs) -> Result<Vec<String>> {
    let (train, test) = load_ucr_dataset(&args.data_dir, &args.dataset)?;
    let text = fs::read_to_string(&args.model).map_err(|e| CliError::io(&args.model, e))?;
    let parse_err = |e: serde_json::Error| CliError::Parse {
        path: args.model.clone(),
        line: e.line(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    let predictions: Vec<i64> = if value.get("trees").is_some() {
        let model: ForestModel = serde_json::from_value(value).map_err(parse_err)?;
        let forest = ProximityForest::from_model(model, &train)?;
        test.series()
            .iter()
            .map(|s| forest.predict(s.values()))
            .collect::<elastika::Result<_>>()?
    } else {
        let model: TrainedModel = serde_json::from_value(value).map_err(parse_err)?;
        let distance = model.distance_config();
        if train.series_len() != test.series_len() {
            return Err(elastika::Error::LengthMismatch {
                left: train.series_len(),
                right: test.series_len(),
            }
            .into());
        }
        test.series()
            .iter()
            .map(|s| {
                let mut best = (f64::INFINITY, 0);
                for (k, t) in train.series().iter().enumerate() {
                    let d = distance.eval(s.values(), t.values())?;
                    if d < best.0 {
                        best = (d, k);
                    }
                }
                Ok(train.labels()[best.1])
            })
            .collect::<elastika::Result<_>>()?
    };
    let correct = predictions
        .iter()
        .zip(test.labels())
        .filter(|(p, l)| p == l)
        .count();
    let accuracy = correct as f64 / test.len() as f64;
    if let Some(path) = &args.predictions {
        let body: String = predictions.iter().map(|p| format!("{p}\n")).collect();
        fs::write(path, body).map_err(|e| CliError::io(path, e))?;
    }
    Ok(vec![format!(
        "{} test_accuracy={accuracy:.4}",
        args.dataset
    )])
}

/// Dataset names from `--datasets`, `--list`, or every dataset directory.
pub fn dataset_names(sel: &DatasetSelection) -> Result<Vec<String>> {
    if !sel.datasets.is_empty() {
        return Ok(sel.datasets.clone());
    }
    if let Some(list) = &sel.list {
        let text = fs::read_to_string(list).map_err(|e| CliError::io(list, e))?;
        return Ok(text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect());
    }
    let entries = fs::read_dir(&sel.data_dir).map_err(|e| CliError::io(&sel.data_dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(&sel.data_dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if ucr_paths(&sel.data_dir, &name).0.is_file() {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

#[derive(Debug, Serialize)]
struct Failure<'a> {
    dataset: &'a str,
    classifier: String,
    seed: u64,
    exit_code: u8,
    error: String,
}

fn failures_path(opts: &SweepOptions) -> PathBuf {
    opts.failures.clone().unwrap_or_else(|| {
        let mut name = opts.out.file_stem().unwrap_or_default().to_os_string();
        name.push(".failures.jsonl");
        opts.out.with_file_name(name)
    })
}

/// Runs every classifier on every dataset under `data_dir`, appending one
/// record per completed run and skipping `(dataset, classifier, seed)`
/// triples already present in the result file. Failures go to the manifest
/// and do not stop the sweep.
pub fn sweep_datasets(
    data_dir: &Path,
    names: &[String],
    opts: &SweepOptions,
    prior_failures: Vec<(String, CliError)>,
) -> Result<Vec<String>> {
    let store = Store::new(&opts.out);
    let mut done = store.completed()?;
    let manifest = failures_path(opts);
    let mut failures: Vec<String> = Vec::new();
    let mut lines = Vec::new();
    let mut record_failure = |dataset: &str, id: &str, err: &CliError, lines: &mut Vec<String>| {
        lines.push(format!(
            "{dataset} {id} FAILED (exit {}): {err}",
            err.exit_code()
        ));
        let f = Failure {
            dataset,
            classifier: id.to_string(),
            seed: opts.seed,
            exit_code: err.exit_code(),
            error: err.to_string(),
        };
        failures.push(serde_json::to_string(&f).expect("failure entries always encode"));
    };
    for (dataset, err) in &prior_failures {
        record_failure(dataset, "*", err, &mut lines);
    }
    let (mut ran, mut skipped) = (0, 0);
    for name in names {
        let pending: Vec<&ClassifierId> = opts
            .classifiers
            .iter()
            .filter(|id| !done.contains(&(name.clone(), id.to_string(), opts.seed)))
            .collect();
        skipped += opts.classifiers.len() - pending.len();
        if pending.is_empty() {
            continue;
        }
        let (train, test) = match load_ucr_dataset(data_dir, name) {
            Ok(splits) => splits,
            Err(e) => {
                let err = CliError::from(e);
                for id in pending {
                    record_failure(name, &id.to_string(), &err, &mut lines);
                }
                continue;
            }
        };
        for id in pending {
            match run_classifier(id, &train, &test, opts.seed, opts.forest) {
                Ok((record, _)) => {
                    store.append(&record)?;
                    done.insert(record.key());
                    lines.push(describe(&record));
                    ran += 1;
                }
                Err(err) => record_failure(name, &id.to_string(), &err, &mut lines),
            }
        }
    }
    let body: String = failures.iter().map(|l| format!("{l}\n")).collect();
    if let Some(parent) = manifest.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(&manifest, body).map_err(|e| CliError::io(&manifest, e))?;
    lines.push(format!(
        "sweep finished: {ran} run, {skipped} already recorded, {} failed (manifest {})",
        failures.len(),
        manifest.display()
    ));
    Ok(lines)
}

pub fn sweep(args: &SweepArgs) -> Result<Vec<String>> {
    let names = dataset_names(&args.selection)?;
    sweep_datasets(&args.selection.data_dir, &names, &args.sweep, Vec::new())
}

/// Stable per-name stream so noise does not depend on dataset order.
fn name_stream(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn noise(args: &NoiseArgs) -> Result<Vec<String>> {
    if !(args.scale >= 0.0 && args.scale.is_finite()) {
        return Err(CliError::usage(format!(
            "noise scale must be nonnegative, got {}",
            args.scale
        )));
    }
    let names = dataset_names(&args.selection)?;
    let master = RngSeed(args.sweep.seed);
    let mut ready = Vec::new();
    let mut failed = Vec::new();
    for name in &names {
        let seed = master.derive(name_stream(name));
        let noisy = load_ucr_dataset(&args.selection.data_dir, name).and_then(|(train, test)| {
            let train = match args.splits {
                NoisySplits::Both | NoisySplits::Train => {
                    add_noise(&train, args.scale, seed.derive(0))?
                }
                NoisySplits::Test => train,
            };
            let test = match args.splits {
                NoisySplits::Both | NoisySplits::Test => {
                    add_noise(&test, args.scale, seed.derive(1))?
                }
                NoisySplits::Train => test,
            };
            write_ucr_dataset(&args.work_dir, &train, &test)
        });
        match noisy {
            Ok(()) => ready.push(name.clone()),
            Err(e) => failed.push((name.clone(), e.into())),
        }
    }
    sweep_datasets(&args.work_dir, &ready, &args.sweep, failed)
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<RunRecord>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(Store::new(p).load_existing()?);
    }
    Ok(all)
}

/// Mean test accuracy per `(classifier, dataset)`, averaging over seeds.
fn accuracy_table(records: &[RunRecord]) -> BTreeMap<String, BTreeMap<String, f64>> {
    let mut sums: BTreeMap<String, BTreeMap<String, (f64, usize)>> = BTreeMap::new();
    for r in records {
        let e = sums
            .entry(r.classifier.clone())
            .or_default()
            .entry(r.dataset.clone())
            .or_insert((0.0, 0));
        e.0 += r.test_accuracy;
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(id, per)| {
            (
                id,
                per.into_iter()
                    .map(|(d, (s, n))| (d, s / n as f64))
                    .collect(),
            )
        })
        .collect()
}

pub fn report_scatter(args: &ScatterArgs) -> Result<Vec<String>> {
    let table = accuracy_table(&load_all(&args.results)?);
    let column = |id: &str| {
        table
            .get(id)
            .ok_or_else(|| CliError::usage(format!("no records for classifier {id:?}")))
    };
    let (a, b) = (column(&args.a)?, column(&args.b)?);
    let rows: Vec<PairRow> = a
        .iter()
        .filter_map(|(d, &acc_a)| {
            b.get(d).map(|&acc_b| PairRow {
                dataset: d.clone(),
                acc_a,
                acc_b,
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(CliError::usage(format!(
            "{} and {} share no datasets",
            args.a, args.b
        )));
    }
    let pairs = PairedAccuracies::new(rows)?;
    let files = emit_scatter(&pairs, (&args.a, &args.b), &args.out)?;
    let (wins, ties, losses) = win_tie_loss(&pairs)?;
    let p = wilcoxon_signed_rank(&pairs)?.p_value;
    Ok(vec![format!(
        "{} vs {} over {} datasets: {wins}/{ties}/{losses} win/tie/loss, p={p:.4}; wrote {} and {}",
        args.a,
        args.b,
        pairs.len(),
        files.csv.display(),
        files.svg.display()
    )])
}

pub fn report_cd(args: &CdArgs) -> Result<Vec<String>> {
    let table = accuracy_table(&load_all(&args.results)?);
    let ids: Vec<String> = if args.classifiers.is_empty() {
        table.keys().cloned().collect()
    } else {
        args.classifiers.clone()
    };
    if ids.len() < 2 {
        return Err(CliError::usage(
            "a critical-difference diagram needs at least two classifiers",
        ));
    }
    let mut columns = Vec::new();
    for id in &ids {
        columns.push(
            table
                .get(id)
                .ok_or_else(|| CliError::usage(format!("no records for classifier {id:?}")))?,
        );
    }
    let datasets: BTreeSet<&String> = columns[0].keys().collect();
    for (id, col) in ids.iter().zip(&columns) {
        if col.keys().collect::<BTreeSet<_>>() != datasets {
            return Err(CliError::usage(format!(
                "classifier {id} covers different datasets than {}; a rank table needs every classifier on every dataset",
                ids[0]
            )));
        }
    }
    let rows = datasets
        .iter()
        .map(|d| columns.iter().map(|c| c[*d]).collect())
        .collect();
    let matrix = AccuracyMatrix::new(
        ids.clone(),
        datasets.iter().map(|d| d.to_string()).collect(),
        rows,
    )?;
    let ranks = mean_ranks(&matrix);
    let groups = cliques(&matrix, args.alpha)?;
    let files = emit_cd(&ranks, &groups, &args.out)?;
    let mut lines: Vec<String> = ranks
        .classifiers
        .iter()
        .zip(&ranks.mean_ranks)
        .map(|(c, r)| format!("{c} mean_rank={r:.4}"))
        .collect();
    lines.push(format!(
        "{} cliques; wrote {} and {}",
        groups.len(),
        files.csv.display(),
        files.svg.display()
    ));
    Ok(lines)
}

pub fn synth(args: &SynthArgs) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for (train, test) in synth::generate(RngSeed(args.seed))? {
        write_ucr_dataset(&args.out_dir, &train, &test)?;
        lines.push(format!(
            "{}: {} train, {} test, length {}",
            train.name(),
            train.len(),
            test.len(),
            train.series_len()
        ));
    }
    Ok(lines)
}

pub fn timing(args: &TimingArgs) -> Result<Vec<String>> {
    if args.n == 0 || args.reps == 0 {
        return Err(CliError::usage("--n and --reps must be positive"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let a: Vec<f64> = (0..args.n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let b: Vec<f64> = (0..args.n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let fastest = |f: &dyn Fn(f64, f64) -> f64| {
        (0..args.reps)
            .map(|_| {
                let start = Instant::now();
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(&b) {
                    acc += f(*x, *y);
                }
                black_box(acc);
                start.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let per_element = |secs: f64| secs * 1e9 / args.n as f64;
    let mut lines = Vec::new();
    for g in [0.5, 1.0, 2.0, 1.5] {
        let gamma = black_box(CostExponent::new(g)?);
        let fast = fastest(&|x, y| gamma.eval(x, y));
        let general = fastest(&|x, y| gamma.eval_general(x, y));
        lines.push(format!(
            "gamma={g} path={:?} fast={:.2}ns general={:.2}ns speedup={:.2}x",
            gamma.fast_path(),
            per_element(fast),
            per_element(general),
            general / fast
        ));
    }
    Ok(lines)
}
