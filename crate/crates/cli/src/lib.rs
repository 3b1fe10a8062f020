//! Command-line front end for `qperceptron`.
//!
//! [`run`] parses a command line, dispatches to the library and writes
//! line-oriented text (or one JSON document with `--json`) to `out`.
//! Exit codes: 0 success, 1 usage, 2 data or ingest, 3 numerical or regime.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qperceptron::baseline::{predict_classical, train_classical, ClassicalOptions};
use qperceptron::clustering::{cluster_consensus, cluster_with, Comparison};
use qperceptron::ensemble::{
    class_capacity, classify_ensemble, generate_synthetic, train_ensemble, DecisionKind, SyntheticEmgConfig,
    DEFAULT_ACTIVATION_FRACTION,
};
use qperceptron::io::{self, BaselineFile, Table, MODEL_VERSION};
use qperceptron::perceptron::{classify_feature, ClassificationResult};
use qperceptron::sampling::{classify_probabilistic, empirical_accuracy, outcome_probabilities, sample_outcome};
use qperceptron::{
    EncodingScheme, Error, ErrorKind, Expectations, FeatureVector, Label, NormalizationMode, NumericPolicy,
    Outcome, RandomSource, RegimeReport,
};

#[derive(Debug, Parser)]
#[command(name = "qperceptron", version, about = "Projector-sum quantum perceptron and classical baseline")]
struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn class operators from a labeled CSV file.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label: String,
        #[arg(long, default_value = "qubit")]
        encoding: EncodingScheme,
        #[arg(long, default_value = "rescale")]
        norm: NormalizationMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one input or every row of a CSV file.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Mode::Argmax)]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report the operator regime of a saved model.
    Regime {
        #[arg(long)]
        model: PathBuf,
    },
    /// Draw measurement outcomes for one input.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        input: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        draws: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Fraction of sampled outcomes matching the labels of a CSV file.
    Accuracy {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Unsupervised two-class assignment, optionally over seeded permutations.
    Cluster {
        #[arg(long)]
        data: PathBuf,
        /// Columns to leave out of the feature vectors.
        #[arg(long)]
        ignore: Vec<String>,
        #[arg(long, default_value = "direct")]
        encoding: EncodingScheme,
        #[arg(long, value_enum, default_value_t = ComparisonArg::Unnormalized)]
        comparison: ComparisonArg,
        #[arg(long, default_value_t = 1)]
        permutations: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train one perceptron per degree of freedom; DOF i is the i-th --data file.
    EnsembleTrain {
        #[arg(long, required = true)]
        data: Vec<PathBuf>,
        #[arg(long, default_value = "label")]
        label: String,
        #[arg(long, default_value = "rescale")]
        norm: NormalizationMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify rows with an ensemble; `truth_<dof>` columns, if present, are scored.
    EnsembleClassify {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_ACTIVATION_FRACTION)]
        fraction: f64,
    },
    /// Number of original and pairwise-superposition classes for n DOFs.
    Capacity {
        #[arg(long)]
        n: u64,
    },
    /// Write synthetic per-DOF training files and a combined-activation file.
    Synth {
        #[arg(long, default_value_t = 8)]
        channels: usize,
        #[arg(long, default_value_t = 2)]
        dofs: usize,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train the classical Rosenblatt perceptron.
    BaselineTrain {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label: String,
        #[arg(long)]
        bias: bool,
        #[arg(long)]
        shuffle: bool,
        #[arg(long, default_value_t = 10_000)]
        max_updates: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict with saved classical weights.
    BaselinePredict {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Comma-separated feature values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "data", required_unless_present = "data")]
    input: Option<Vec<f64>>,
    /// CSV file with one record per row.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column of --data, scored against predictions.
    #[arg(long, requires = "data")]
    label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Argmax,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComparisonArg {
    Unnormalized,
    Count,
}

impl From<ComparisonArg> for Comparison {
    fn from(c: ComparisonArg) -> Self {
        match c {
            ComparisonArg::Unnormalized => Comparison::Unnormalized,
            ComparisonArg::Count => Comparison::CountNormalized,
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut ctx = Ctx { out, json: cli.json };
    match ctx.dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numeric => 3,
            }
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

fn signed(v: i8) -> String {
    if v == 0 {
        "0".into()
    } else {
        format!("{v:+}")
    }
}

fn expectations_json(e: &Expectations) -> Value {
    json!({ "-1": e.minus, "+1": e.plus, "0": e.zero })
}

fn regime_json(r: &RegimeReport) -> Value {
    json!({
        "case": r.case.to_string(),
        "orthogonality_defect": r.orthogonality_defect,
        "completeness_defect": r.completeness_defect,
        "p_zero_min_eig": r.p_zero_min_eig,
        "physical": r.physical,
    })
}

fn rng_metadata(seed: u64) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("rng".to_string(), RandomSource::ALGORITHM.to_string()),
        ("seed".to_string(), seed.to_string()),
    ])
}

fn require_seed(seed: Option<u64>, what: &str) -> std::result::Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage(format!("{what} is stochastic and requires --seed")))
}

/// Records named by `--input`/`--data`, with the feature columns of the file header when read from disk.
fn read_inputs(input: &InputArgs, exclude: &[&str]) -> std::result::Result<(Vec<FeatureVector>, Option<Table>), Failure> {
    match (&input.input, &input.data) {
        (Some(values), None) => Ok((vec![FeatureVector::new(values.clone())], None)),
        (None, Some(path)) => {
            let table = Table::read(path)?;
            let data = table.feature_vectors(input.label.as_deref(), exclude)?;
            Ok((data, Some(table)))
        }
        _ => Err(Failure::Usage("exactly one of --input or --data is required".into())),
    }
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str, value: Value) -> CmdResult {
        if self.json {
            writeln!(self.out, "{value}")?;
        } else {
            write!(self.out, "{text}")?;
        }
        Ok(())
    }

    fn dispatch(&mut self, command: Command) -> CmdResult {
        match command {
            Command::Train {
                data,
                label,
                encoding,
                norm,
                out,
            } => self.train(&data, &label, encoding, norm, &out),
            Command::Classify { model, input, mode, seed } => self.classify(&model, &input, mode, seed),
            Command::Regime { model } => self.regime(&model),
            Command::Sample {
                model,
                input,
                draws,
                seed,
            } => self.sample(&model, input, draws, seed),
            Command::Accuracy {
                model,
                data,
                label,
                trials,
                seed,
            } => self.accuracy(&model, &data, &label, trials, seed),
            Command::Cluster {
                data,
                ignore,
                encoding,
                comparison,
                permutations,
                seed,
            } => self.cluster(&data, &ignore, encoding, comparison.into(), permutations, seed),
            Command::EnsembleTrain { data, label, norm, out } => self.ensemble_train(&data, &label, norm, &out),
            Command::EnsembleClassify { model, input, fraction } => self.ensemble_classify(&model, &input, fraction),
            Command::Capacity { n } => self.capacity(n),
            Command::Synth {
                channels,
                dofs,
                sigma,
                trials,
                seed,
                out_dir,
            } => self.synth(channels, dofs, sigma, trials, seed, &out_dir),
            Command::BaselineTrain {
                data,
                label,
                bias,
                shuffle,
                max_updates,
                seed,
                out,
            } => self.baseline_train(&data, &label, ClassicalOptions { max_updates, bias, shuffle }, seed, &out),
            Command::BaselinePredict { model, input } => self.baseline_predict(&model, &input),
        }
    }

    fn train(&mut self, data: &Path, label: &str, encoding: EncodingScheme, norm: NormalizationMode, out: &Path) -> CmdResult {
        let records = io::ingest_csv(data, Some(label))?;
        let model = qperceptron::train(&records, encoding, norm)?;
        let metadata = BTreeMap::from([
            ("source".to_string(), data.display().to_string()),
            ("records".to_string(), records.len().to_string()),
        ]);
        io::save_model(out, &model, metadata)?;
        let r = model.regime();
        let text = format!(
            "trained {} records: encoding={} norm={} dim={} case {}\nwrote {}\n",
            records.len(),
            encoding,
            norm,
            model.dim(),
            r.case,
            out.display()
        );
        let value = json!({
            "records": records.len(),
            "encoding": encoding.as_str(),
            "norm_mode": norm.as_str(),
            "dim": model.dim(),
            "regime": regime_json(r),
            "out": out.display().to_string(),
        });
        self.emit(&text, value)
    }

    fn classify(&mut self, model_path: &Path, input: &InputArgs, mode: Mode, seed: Option<u64>) -> CmdResult {
        let model = io::load_model(model_path)?;
        let (records, _) = read_inputs(input, &[])?;
        let mut rng = match mode {
            Mode::Argmax => None,
            Mode::Probabilistic => Some(RandomSource::new(require_seed(seed, "probabilistic classification")?)),
        };
        let mut results: Vec<ClassificationResult> = Vec::with_capacity(records.len());
        for fv in &records {
            let r = match rng.as_mut() {
                None => classify_feature(&model, fv)?,
                Some(rng) => classify_probabilistic(&model, &model.encode(fv)?, rng)?,
            };
            results.push(r);
        }
        let mut text = String::new();
        let mut rows = Vec::new();
        let mut correct = 0usize;
        let labeled = records.iter().all(|fv| fv.label.is_some()) && input.label.is_some();
        for (fv, r) in records.iter().zip(&results) {
            let e = &r.expectations;
            text.push_str(&format!("label {} e(-1)={} e(+1)={} e(0)={}\n", r.label, e.minus, e.plus, e.zero));
            if fv.label.map(Outcome::from) == Some(r.label) {
                correct += 1;
            }
            rows.push(json!({ "label": r.label.value(), "expectations": expectations_json(e) }));
        }
        let mut value = json!({
            "mode": match mode { Mode::Argmax => "argmax", Mode::Probabilistic => "probabilistic" },
            "results": rows,
        });
        if labeled {
            text.push_str(&format!("correct {correct}/{}\n", records.len()));
            value["correct"] = json!(correct);
        }
        if let Some(rng) = &rng {
            value["rng"] = json!(RandomSource::ALGORITHM);
            value["seed"] = json!(rng.seed());
        }
        self.emit(&text, value)
    }

    fn regime(&mut self, model_path: &Path) -> CmdResult {
        let model = io::load_model(model_path)?;
        let r = model.regime();
        let text = format!(
            "case {}\northogonality_defect {}\ncompleteness_defect {}\np_zero_min_eig {}\nphysical {}\n",
            r.case, r.orthogonality_defect, r.completeness_defect, r.p_zero_min_eig, r.physical
        );
        self.emit(&text, regime_json(r))
    }

    fn sample(&mut self, model_path: &Path, input: Vec<f64>, draws: usize, seed: u64) -> CmdResult {
        if draws == 0 {
            return Err(Failure::Usage("--draws must be positive".into()));
        }
        let model = io::load_model(model_path)?;
        let state = model.encode(&FeatureVector::new(input))?;
        let probs = outcome_probabilities(&model, &state)?;
        let mut rng = RandomSource::new(seed);
        let mut counts = [0usize; 3];
        let mut sequence = Vec::with_capacity(draws.min(100));
        for i in 0..draws {
            let o = sample_outcome(&model, &state, &mut rng)?;
            counts[Outcome::ALL.iter().position(|&a| a == o).unwrap_or(2)] += 1;
            if i < 100 {
                sequence.push(o.value());
            }
        }
        let mut text = format!(
            "p(-1)={} p(+1)={} p(0)={}\n",
            probs.minus, probs.plus, probs.zero
        );
        for (o, c) in Outcome::ALL.iter().zip(counts) {
            text.push_str(&format!("{o} {c}\n"));
        }
        let value = json!({
            "probabilities": expectations_json(&probs),
            "counts": Outcome::ALL.iter().zip(counts).map(|(o, c)| (o.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
            "first_draws": sequence,
            "draws": draws,
            "rng": RandomSource::ALGORITHM,
            "seed": seed,
        });
        self.emit(&text, value)
    }

    fn accuracy(&mut self, model_path: &Path, data: &Path, label: &str, trials: usize, seed: u64) -> CmdResult {
        let model = io::load_model(model_path)?;
        let records = io::ingest_csv(data, Some(label))?;
        let acc = empirical_accuracy(&model, &records, trials, &mut RandomSource::new(seed))?;
        let text = format!("accuracy {acc} ({} records x {trials} draws)\n", records.len());
        let value = json!({
            "accuracy": acc,
            "records": records.len(),
            "trials": trials,
            "rng": RandomSource::ALGORITHM,
            "seed": seed,
        });
        self.emit(&text, value)
    }

    fn cluster(
        &mut self,
        data: &Path,
        ignore: &[String],
        encoding: EncodingScheme,
        comparison: Comparison,
        permutations: usize,
        seed: Option<u64>,
    ) -> CmdResult {
        let exclude: Vec<&str> = ignore.iter().map(String::as_str).collect();
        let records = Table::read(data)?.feature_vectors(None, &exclude)?;
        let states = records.iter().map(|fv| encoding.encode(fv)).collect::<qperceptron::Result<Vec<_>>>()?;
        let policy = NumericPolicy::default();
        if permutations <= 1 {
            let state = cluster_with(&states, comparison, &policy)?;
            let labels: Vec<i8> = state.assignments.iter().map(|l| l.value()).collect();
            let text: String = labels.iter().map(|&l| format!("{}\n", signed(l))).collect();
            return self.emit(&text, json!({ "assignments": labels }));
        }
        let seed = require_seed(seed, "clustering over permutations")?;
        let report = cluster_consensus(&states, permutations, comparison, &policy, &mut RandomSource::new(seed))?;
        let mut text: String = report.reference.iter().map(|&l| format!("{}\n", signed(l))).collect();
        text.push_str(&format!("agreement {} over {} runs\n", report.agreement, report.runs));
        let mut value = serde_json::to_value(&report).map_err(Error::Json)?;
        value["rng"] = json!(RandomSource::ALGORITHM);
        value["seed"] = json!(seed);
        self.emit(&text, value)
    }

    fn ensemble_train(&mut self, data: &[PathBuf], label: &str, norm: NormalizationMode, out: &Path) -> CmdResult {
        let datasets = data
            .iter()
            .map(|p| io::ingest_csv(p, Some(label)))
            .collect::<qperceptron::Result<Vec<_>>>()?;
        let model = train_ensemble(&datasets, norm)?;
        io::save_ensemble(out, &model)?;
        let mut text = String::new();
        let mut dofs = Vec::new();
        for ((name, p), reference) in model.dof_names().iter().zip(model.perceptrons()).zip(model.references()) {
            text.push_str(&format!("{name}: case {} reference {reference}\n", p.regime().case));
            dofs.push(json!({ "name": name, "regime": regime_json(p.regime()), "reference": reference }));
        }
        text.push_str(&format!("wrote {}\n", out.display()));
        self.emit(&text, json!({ "channels": model.channels(), "dofs": dofs, "out": out.display().to_string() }))
    }

    fn ensemble_classify(&mut self, model_path: &Path, input: &InputArgs, fraction: f64) -> CmdResult {
        let model = io::load_ensemble(model_path)?;
        let truth_names: Vec<String> = model.dof_names().iter().map(|n| format!("truth_{n}")).collect();
        let exclude: Vec<&str> = truth_names.iter().map(String::as_str).collect();
        let (records, table) = read_inputs(input, &exclude)?;
        let truth_cols: Option<Vec<usize>> = table
            .as_ref()
            .and_then(|t| truth_names.iter().map(|n| t.column(n)).collect());

        let mut text = String::new();
        let mut rows = Vec::new();
        let mut matched = 0usize;
        for (i, fv) in records.iter().enumerate() {
            let d = classify_ensemble(&model, fv, fraction)?;
            let kind = match d.kind {
                DecisionKind::Single => "single",
                DecisionKind::Superposition => "superposition",
                DecisionKind::None => "none",
            };
            let active: Vec<String> = d
                .active_set
                .iter()
                .map(|(dof, l)| format!("{}:{}", model.dof_names()[*dof], signed(l.value())))
                .collect();
            text.push_str(&format!("{kind} {}", active.join(" ")).trim_end().to_string());
            let mut row = json!({ "kind": kind, "active": active, "per_dof": d.per_dof });
            if let (Some(cols), Some(table)) = (&truth_cols, &table) {
                let mut truth = std::collections::BTreeSet::new();
                for (dof, &c) in cols.iter().enumerate() {
                    let v = table.rows[i][c];
                    if v != 0.0 {
                        let l = Label::from_value(v).ok_or_else(|| {
                            Error::Data(format!("row {}, column {}: {v} is not -1, 0 or +1", i + 1, table.header[c]))
                        })?;
                        truth.insert((dof, l));
                    }
                }
                let hit = truth == d.active_set;
                matched += usize::from(hit);
                text.push_str(if hit { " match" } else { " miss" });
                row["match"] = json!(hit);
            }
            text.push('\n');
            rows.push(row);
        }
        let mut value = json!({ "fraction": fraction, "results": rows });
        if truth_cols.is_some() {
            text.push_str(&format!("matched {matched}/{}\n", records.len()));
            value["matched"] = json!(matched);
        }
        self.emit(&text, value)
    }

    fn capacity(&mut self, n: u64) -> CmdResult {
        let c = class_capacity(n)?;
        let text = format!("originals={} superpositions={}\n", c.originals, c.superpositions);
        self.emit(&text, json!({ "n": n, "originals": c.originals, "superpositions": c.superpositions }))
    }

    fn synth(&mut self, channels: usize, dofs: usize, sigma: f64, trials: usize, seed: u64, out_dir: &Path) -> CmdResult {
        let config = SyntheticEmgConfig::disjoint(channels, dofs, sigma, seed)?;
        let data = generate_synthetic(&config, trials)?;
        fs::create_dir_all(out_dir)?;
        let mut files = Vec::new();
        for (i, set) in data.training.iter().enumerate() {
            let path = out_dir.join(format!("dof{i}.csv"));
            fs::write(&path, io::feature_csv(set, "label"))?;
            files.push(path);
        }
        let mut header: Vec<String> = (0..channels).map(|c| format!("ch{c}")).collect();
        header.extend((0..dofs).map(|d| format!("truth_dof{d}")));
        let rows: Vec<Vec<f64>> = data
            .combined
            .iter()
            .map(|trial| {
                let mut row = trial.features.features.clone();
                row.extend((0..dofs).map(|d| {
                    trial
                        .active
                        .iter()
                        .find(|(dof, _)| *dof == d)
                        .map_or(0.0, |(_, l)| f64::from(l.value()))
                }));
                row
            })
            .collect();
        let combined = out_dir.join("combined.csv");
        fs::write(&combined, io::write_csv(&header, &rows))?;
        files.push(combined);

        let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
        let text: String = names.iter().map(|n| format!("wrote {n}\n")).collect();
        let value = json!({
            "files": names,
            "training_rows": data.training.iter().map(Vec::len).collect::<Vec<_>>(),
            "combined_rows": rows.len(),
            "rng": RandomSource::ALGORITHM,
            "seed": seed,
        });
        self.emit(&text, value)
    }

    fn baseline_train(&mut self, data: &Path, label: &str, options: ClassicalOptions, seed: u64, out: &Path) -> CmdResult {
        let records = io::ingest_csv(data, Some(label))?;
        let outcome = train_classical(&records, options, &mut RandomSource::new(seed))?;
        let w = outcome.weights().clone();
        let mut metadata = rng_metadata(seed);
        metadata.insert("source".into(), data.display().to_string());
        io::save_baseline(
            out,
            &BaselineFile {
                version: MODEL_VERSION,
                kind: "baseline".into(),
                converged: outcome.converged(),
                weights: w.clone(),
                metadata,
            },
        )?;
        let status = if outcome.converged() { "converged" } else { "non-convergence" };
        let weights: Vec<String> = w.weights.iter().map(f64::to_string).collect();
        let text = format!(
            "{status} after {} updates\nweights {}\nwrote {}\n",
            w.update_count,
            weights.join(","),
            out.display()
        );
        let value = json!({
            "converged": outcome.converged(),
            "updates": w.update_count,
            "weights": w.weights,
            "bias": w.bias,
            "rng": RandomSource::ALGORITHM,
            "seed": seed,
        });
        self.emit(&text, value)
    }

    fn baseline_predict(&mut self, model_path: &Path, input: &InputArgs) -> CmdResult {
        let file = io::load_baseline(model_path)?;
        let (records, _) = read_inputs(input, &[])?;
        let mut text = String::new();
        let mut labels = Vec::new();
        let mut correct = 0usize;
        for fv in &records {
            let l = predict_classical(&file.weights, fv)?;
            text.push_str(&format!("label {}\n", l.sign_char()));
            correct += usize::from(fv.label == Some(l));
            labels.push(l.value());
        }
        let mut value = json!({ "labels": labels });
        if input.label.is_some() {
            text.push_str(&format!("correct {correct}/{}\n", records.len()));
            value["correct"] = json!(correct);
        }
        self.emit(&text, value)
    }
}
