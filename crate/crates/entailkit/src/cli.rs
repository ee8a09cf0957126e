//! Command-line entry point: normalize, features, train, predict, eval, and
//! gridsearch subcommands over the library modules.
//!
//! Options come from flags plus an optional `key = value` config file; flags
//! override the file. Identical inputs and seed produce byte-identical
//! outputs.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{self, Label};
use crate::error::{Error, Result};
use crate::eval;
use crate::features::{self, Dataset, FeatureSpec, Lexicons};
use crate::lexicon::{AntonymLexicon, DefinitionLexicon, NegationList, SynonymLexicon};
use crate::model::{self, Model};
use crate::normalize::{self, ExceptionList, NumeralGrammar, ScriptTable};

/// Seed used when none is given, so repeated runs match by default.
pub const DEFAULT_SEED: u64 = 42;

/// Failure with the process exit status it should map to: 2 for usage and
/// configuration problems, 1 for data and runtime errors.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        CliFailure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn usage_error(message: impl Into<String>) -> CliFailure {
    CliFailure {
        code: 2,
        message: message.into(),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "entailkit",
    version,
    about = "Feature-based textual entailment over pre-annotated Chinese statement pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize text from stdin to stdout (numerals first, then script).
    Normalize(NormalizeArgs),
    /// Extract feature vectors into a tab-separated dump.
    Features(FeaturesArgs),
    /// Train a margin or tree model on labeled pairs.
    Train(TrainArgs),
    /// Label pairs with a saved model.
    Predict(PredictArgs),
    /// Score a predictions file against its gold labels.
    Eval(EvalArgs),
    /// Exhaustive grid search for a heuristic model.
    Gridsearch(GridsearchArgs),
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// key = value file supplying any missing options
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pair file: id ⟨tab⟩ Y|N|- ⟨tab⟩ T ⟨tab⟩ H
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Annotation blocks keyed by <pairid>.t / <pairid>.h
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Feature spec: one feature name per line plus option lines
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Synonym file: word ⟨tab⟩ syn1,syn2,…
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Antonym file: word ⟨tab⟩ ant1,ant2,…
    #[arg(long)]
    antonyms: Option<PathBuf>,
    /// Negation file with [single]/[multi]/[exceptions] sections
    #[arg(long)]
    negations: Option<PathBuf>,
    /// Definition file: word ⟨tab⟩ bracketed tree
    #[arg(long)]
    definitions: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    /// Convert Chinese numerals to Arabic digits
    #[arg(long)]
    numerals: bool,
    /// Script conversion table: source ⟨tab⟩ target
    #[arg(long)]
    script: Option<PathBuf>,
    /// Idioms the numeral converter must skip
    #[arg(long)]
    exceptions: Option<PathBuf>,
    /// key = value file supplying any missing options
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FeaturesArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Where to write the vector dump (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// margin | tree
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    reg: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the trained model
    #[arg(long)]
    out_model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Saved model file
    #[arg(long)]
    model: Option<PathBuf>,
    /// Where to write id ⟨tab⟩ gold ⟨tab⟩ predicted lines (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Predictions file: id ⟨tab⟩ gold ⟨tab⟩ predicted
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Where to write the metric report (stdout when omitted)
    #[arg(long)]
    report: Option<PathBuf>,
    /// key = value file supplying any missing options
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridsearchArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Grid spec: param: v1,v2,… lines plus objective
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Where to write the best model
    #[arg(long)]
    out_model: Option<PathBuf>,
    /// Where to write the full score table
    #[arg(long)]
    report: Option<PathBuf>,
}

/// `key = value` lines, `#` comments.
#[derive(Debug, Default)]
struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, lineno + 1, "expected `key = value`"))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad config value `{v}` for `{key}`"))),
        }
    }
}

struct LoadedData {
    dataset: Dataset,
    spec: FeatureSpec,
}

fn load_lexicons(common: &CommonOpts, cfg: &ConfigFile) -> Result<Lexicons> {
    let pick = |flag: &Option<PathBuf>, key: &str| flag.clone().or_else(|| cfg.path(key));
    let mut lex = Lexicons::default();
    if let Some(p) = pick(&common.synonyms, "synonyms") {
        lex.synonyms = SynonymLexicon::load(p)?;
    }
    if let Some(p) = pick(&common.antonyms, "antonyms") {
        lex.antonyms = AntonymLexicon::load(p)?;
    }
    if let Some(p) = pick(&common.negations, "negations") {
        lex.negations = NegationList::load(p)?;
    }
    if let Some(p) = pick(&common.definitions, "definitions") {
        lex.definitions = DefinitionLexicon::load(p)?;
    }
    Ok(lex)
}

fn load_data(common: &CommonOpts, cfg: &ConfigFile) -> std::result::Result<LoadedData, CliFailure> {
    let pairs_path = common
        .pairs
        .clone()
        .or_else(|| cfg.path("pairs"))
        .ok_or_else(|| usage_error("no pair file given (--pairs or `pairs` in the config)"))?;
    let spec_path = common
        .spec
        .clone()
        .or_else(|| cfg.path("spec"))
        .ok_or_else(|| usage_error("no feature spec given (--spec or `spec` in the config)"))?;

    let mut pairs = corpus::load_pairs(&pairs_path)?;
    if let Some(ann) = common.annotations.clone().or_else(|| cfg.path("annotations")) {
        let (annotated, warnings) = corpus::attach_annotations(pairs, &ann)?;
        pairs = annotated;
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
    for pair in &pairs {
        for stmt in [&pair.t, &pair.h] {
            let violations = corpus::validate(stmt);
            if !violations.is_empty() {
                return Err(Error::Config(format!(
                    "statement `{}` fails validation: {}",
                    stmt.id, violations[0]
                ))
                .into());
            }
        }
    }

    let spec = FeatureSpec::load(&spec_path)?;
    let lex = load_lexicons(common, cfg)?;
    let dataset = features::extract_all(&pairs, &lex, &spec);
    Ok(LoadedData { dataset, spec })
}

fn write_or_print(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| Error::io(p, e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_normalize(args: &NormalizeArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let numerals = args.numerals || cfg.parse::<bool>("numerals")?.unwrap_or(false);
    let script = args.script.clone().or_else(|| cfg.path("script"));
    let exceptions = args.exceptions.clone().or_else(|| cfg.path("exceptions"));

    let mut input = String::new();
    std::io::stdin()
        .read_to_string(&mut input)
        .map_err(|e| Error::io("<stdin>", e))?;

    let mut text = input;
    if numerals {
        let grammar = NumeralGrammar::default();
        let ex = match exceptions {
            Some(p) => ExceptionList::load(p)?,
            None => ExceptionList::default(),
        };
        text = normalize::normalize_numerals(&text, &grammar, &ex);
    }
    if let Some(table_path) = script {
        let table = ScriptTable::load(table_path)?;
        text = normalize::convert_script(&text, &table);
    }
    print!("{text}");
    Ok(())
}

fn run_features(args: &FeaturesArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let data = load_data(&args.common, &cfg)?;
    let dump = features::write_dump(&data.dataset, &data.spec);
    let output = args.output.clone().or_else(|| cfg.path("output"));
    write_or_print(output.as_deref(), &dump)?;
    Ok(())
}

fn labeled_rows(dataset: &Dataset) -> std::result::Result<(Vec<features::FeatureVector>, Vec<Label>), CliFailure> {
    let (vectors, labels) = dataset.labeled();
    if vectors.is_empty() {
        return Err(Error::EmptyData.into());
    }
    Ok((vectors, labels))
}

fn run_train(args: &TrainArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let out_model = args
        .out_model
        .clone()
        .or_else(|| cfg.path("out-model"))
        .ok_or_else(|| usage_error("no model output path (--out-model)"))?;
    let method = args
        .method
        .clone()
        .or(cfg.parse::<String>("method")?)
        .unwrap_or_else(|| "margin".to_string());

    let data = load_data(&args.common, &cfg)?;
    let (vectors, labels) = labeled_rows(&data.dataset)?;

    let trained = match method.as_str() {
        "margin" => {
            let epochs = args.epochs.or(cfg.parse("epochs")?).unwrap_or(200);
            let step = args.step.or(cfg.parse("step")?).unwrap_or(0.1);
            let reg = args.reg.or(cfg.parse("reg")?).unwrap_or(0.01);
            let seed = args.seed.or(cfg.parse("seed")?).unwrap_or(DEFAULT_SEED);
            Model::Linear(model::train_margin(
                &vectors, &labels, epochs, step, reg, seed,
            )?)
        }
        "tree" => {
            let depth = args.max_depth.or(cfg.parse("max-depth")?).unwrap_or(3);
            Model::Tree(model::train_tree(&vectors, &labels, depth)?)
        }
        other => return Err(usage_error(format!("unknown method `{other}` (margin|tree)"))),
    };
    model::save_model(&out_model, &trained)?;
    eprintln!(
        "trained {} model on {} labeled pairs -> {}",
        trained.kind(),
        vectors.len(),
        out_model.display()
    );
    Ok(())
}

fn run_predict(args: &PredictArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let model_path = args
        .model
        .clone()
        .or_else(|| cfg.path("model"))
        .ok_or_else(|| usage_error("no model file given (--model)"))?;
    let trained = model::load_model(&model_path)?;
    let data = load_data(&args.common, &cfg)?;

    let mut out = String::new();
    for ((id, fv), gold) in data
        .dataset
        .ids
        .iter()
        .zip(&data.dataset.vectors)
        .zip(&data.dataset.labels)
    {
        let pred = trained.predict(fv)?;
        let gold = gold.map_or("-".to_string(), |l| l.to_string());
        out.push_str(&format!("{id}\t{gold}\t{pred}\n"));
    }
    let output = args.output.clone().or_else(|| cfg.path("output"));
    write_or_print(output.as_deref(), &out)?;
    Ok(())
}

fn run_eval(args: &EvalArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let predictions = args
        .predictions
        .clone()
        .or_else(|| cfg.path("predictions"))
        .ok_or_else(|| usage_error("no predictions file given (--predictions)"))?;

    let text = std::fs::read_to_string(&predictions).map_err(|e| Error::io(&predictions, e))?;
    let mut golds = Vec::new();
    let mut preds = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::format(
                &predictions,
                lineno + 1,
                "expected `id ⟨tab⟩ gold ⟨tab⟩ predicted`",
            )
            .into());
        }
        let gold = fields[1]
            .parse::<Label>()
            .map_err(|_| Error::Config(format!(
                "pair `{}` has no gold label; every evaluated pair needs one",
                fields[0]
            )))?;
        let pred = fields[2]
            .parse::<Label>()
            .map_err(|_| Error::InvalidLabel { line: lineno + 1 })?;
        golds.push(gold);
        preds.push(pred);
    }
    let report = eval::score(&preds, &golds)?;
    let rendered = eval::format_report(&report);
    let out = args.report.clone().or_else(|| cfg.path("report"));
    write_or_print(out.as_deref(), &rendered)?;
    Ok(())
}

fn run_gridsearch(args: &GridsearchArgs) -> std::result::Result<(), CliFailure> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let grid_path = args
        .grid
        .clone()
        .or_else(|| cfg.path("grid"))
        .ok_or_else(|| usage_error("no grid spec given (--grid)"))?;
    let out_model = args
        .out_model
        .clone()
        .or_else(|| cfg.path("out-model"))
        .ok_or_else(|| usage_error("no model output path (--out-model)"))?;

    let grid = model::GridSpec::load(&grid_path)?;
    eprintln!("grid has {} points", grid.size());

    let data = load_data(&args.common, &cfg)?;
    let (vectors, labels) = labeled_rows(&data.dataset)?;
    let (best, report) = model::train_grid(&vectors, &labels, &grid)?;
    model::save_model(&out_model, &Model::Heuristic(best))?;

    let table = report.to_table(&grid);
    let report_path = args.report.clone().or_else(|| cfg.path("report"));
    write_or_print(report_path.as_deref(), &table)?;
    eprintln!(
        "best point {} scores {:.6} ({})",
        report.best_index, report.best_score, report.objective
    );
    Ok(())
}

/// Parses argv and dispatches. Returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports its own usage errors (exit 2) and help/version (exit 0)
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Normalize(args) => run_normalize(args),
        Command::Features(args) => run_features(args),
        Command::Train(args) => run_train(args),
        Command::Predict(args) => run_predict(args),
        Command::Eval(args) => run_eval(args),
        Command::Gridsearch(args) => run_gridsearch(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("entailkit: {}", failure.message);
            failure.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn config_file_parses_key_values() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\npairs = /tmp/x.tsv\nseed = 7\nnumerals = true").unwrap();
        let cfg = ConfigFile::load(Some(f.path())).unwrap();
        assert_eq!(cfg.path("pairs"), Some(PathBuf::from("/tmp/x.tsv")));
        assert_eq!(cfg.parse::<u64>("seed").unwrap(), Some(7));
        assert_eq!(cfg.parse::<bool>("numerals").unwrap(), Some(true));
        assert_eq!(cfg.path("missing"), None);
    }

    #[test]
    fn bad_config_value_is_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "seed = notanumber").unwrap();
        let cfg = ConfigFile::load(Some(f.path())).unwrap();
        assert!(cfg.parse::<u64>("seed").is_err());
    }

    #[test]
    fn unknown_flag_exits_with_usage_code() {
        assert_eq!(main_with_args(["entailkit", "eval", "--no-such-flag"]), 2);
    }

    #[test]
    fn predict_without_model_exits_two() {
        assert_eq!(main_with_args(["entailkit", "predict"]), 2);
    }

    #[test]
    fn unknown_subcommand_exits_two() {
        assert_eq!(main_with_args(["entailkit", "frobnicate"]), 2);
    }
}
