use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{CommandFactory, Parser, Subcommand};

use rexo_core::corpus::{load_split, write_canonical, InputFormat};
use rexo_core::partition::partition_split;
use rexo_core::report::{emit_report, to_canonical_json, OutputFormat};
use rexo_core::retention::run_retention;
use rexo_core::scorer::evaluate;
use rexo_core::stats::stats_report;
use rexo_core::swap::{generate_swaps, records_from_map, score_swap, SwapConfig, SwapMapEntry};
use rexo_core::{CaseMode, MatchSetting, Split, TrainIndex};

mod output;

const SCHEMA_HELP: &str = "\
Canonical corpus / prediction schema (UTF-8 JSON array, one record per sentence):

  [{\"id\": \"s1\",
    \"tokens\": [\"John\", \"killed\", \"Mary\"],
    \"entities\": [{\"start\": 0, \"end\": 1, \"type\": \"Peop\"},
                 {\"start\": 2, \"end\": 3, \"type\": \"Peop\"}],
    \"relations\": [{\"head\": 0, \"tail\": 1, \"type\": \"Kill\"}]}]

Spans are token offsets, start inclusive and end exclusive. Relation head and
tail index into the sentence's entities. Prediction files use the same schema
and must carry the same ids and tokens as the gold file.

Exit status: 0 on success, 1 on validation or alignment errors, 2 on usage errors.";

#[derive(Debug, Parser)]
#[command(name = "rexo", version, about = "Lexical-overlap evaluation of entity and relation extraction", after_help = SCHEMA_HELP)]
struct Cli {
    /// Surface comparison for overlap: sensitive or fold (lowercase).
    #[arg(long = "case", global = true, default_value = "sensitive")]
    case_mode: CaseMode,

    /// Report format: json, csv or md.
    #[arg(long, global = true, default_value = "json")]
    format: OutputFormat,

    /// Input corpus format: canonical, scierc or spert.
    #[arg(long = "from", global = true, default_value = "canonical")]
    input_format: InputFormat,

    /// Reserved. Nothing in this tool is random; passing it is an error.
    #[arg(long, global = true, hide = true)]
    seed_free: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a corpus file to the canonical schema.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label test mentions Seen/Unseen and relations Exact/Partial/New.
    Partition {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions overall and per overlap partition.
    Eval {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Comma-separated subset of ner, boundaries, strict.
        #[arg(long, value_delimiter = ',', default_value = "ner,boundaries,strict")]
        settings: Vec<MatchSetting>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict with the retention baseline (majority train label of exact matches).
    Retention {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label consistency and argument statistics of evaluation splits.
    Stats {
        #[arg(long)]
        train: PathBuf,
        /// Evaluation split; may be repeated.
        #[arg(long, required = true)]
        eval: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Swap head and tail of a same-typed relation in every eligible sentence.
    Swap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        relation: String,
        #[arg(long = "arg-type")]
        arg_type: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Score predictions on swapped sentences with RE and reverse RE.
    ScoreSwap {
        #[arg(long)]
        swapped: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        relation: String,
        #[arg(long = "arg-type", default_value = "")]
        arg_type: String,
        /// Train split; when given, outcomes also report the overlap partition
        /// of the original triple.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.seed_free {
        Cli::command()
            .error(
                clap::error::ErrorKind::ArgumentConflict,
                "--seed-free is reserved: no command uses randomness",
            )
            .exit();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli, path: &Path) -> anyhow::Result<Split> {
    load_split(path, cli.input_format).with_context(|| format!("loading {}", path.display()))
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let case_mode = cli.case_mode;
    match &cli.command {
        Command::Convert { input, out } => {
            let split = load(cli, input)?;
            output::write_atomic(out, write_canonical(&split).as_bytes())
        }
        Command::Partition { train, test, out } => {
            let index = TrainIndex::build(&load(cli, train)?, case_mode);
            let report = partition_split(&index, &load(cli, test)?);
            output::emit(out.as_deref(), &emit_report(&report, cli.format))
        }
        Command::Eval {
            train,
            gold,
            pred,
            settings,
            out,
        } => {
            let index = TrainIndex::build(&load(cli, train)?, case_mode);
            let report = evaluate(&index, &load(cli, gold)?, &load(cli, pred)?, settings)?;
            output::emit(out.as_deref(), &emit_report(&report, cli.format))
        }
        Command::Retention { train, input, out } => {
            let preds = run_retention(&load(cli, train)?, &load(cli, input)?, case_mode)?;
            output::write_atomic(out, write_canonical(&preds).as_bytes())
        }
        Command::Stats { train, eval, out } => {
            let train = load(cli, train)?;
            let splits = eval
                .iter()
                .map(|p| Ok((label(p), load(cli, p)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let named: Vec<(String, &Split)> = splits.iter().map(|(n, s)| (n.clone(), s)).collect();
            let report = stats_report(&train, &named, case_mode)?;
            output::emit(out.as_deref(), &emit_report(&report, cli.format))
        }
        Command::Swap {
            input,
            relation,
            arg_type,
            out,
            map,
        } => {
            let config = SwapConfig {
                case_mode,
                ..SwapConfig::new(relation, arg_type)
            };
            let records = generate_swaps(&load(cli, input)?, &config)?;
            let swapped: Split = records.iter().map(|r| r.swapped.clone()).collect();
            let entries: Vec<SwapMapEntry> = records.iter().map(|r| r.map_entry()).collect();
            let map_json = to_canonical_json(&entries);
            output::write_atomic(out, write_canonical(&swapped).as_bytes())?;
            output::write_atomic(map, map_json.as_bytes())
        }
        Command::ScoreSwap {
            swapped,
            map,
            pred,
            relation,
            arg_type,
            train,
            out,
        } => {
            let config = SwapConfig {
                case_mode,
                ..SwapConfig::new(relation, arg_type)
            };
            let map_text = std::fs::read_to_string(map)
                .with_context(|| format!("reading {}", map.display()))?;
            let entries: Vec<SwapMapEntry> = serde_json::from_str(&map_text)
                .with_context(|| format!("parsing {}", map.display()))?;
            let records = records_from_map(&entries, &load(cli, swapped)?)?;
            let index = train
                .as_deref()
                .map(|t| load(cli, t).map(|s| TrainIndex::build(&s, case_mode)))
                .transpose()?;
            let report = score_swap(&records, &load(cli, pred)?, &config, index.as_ref())?;
            output::emit(out.as_deref(), &emit_report(&report, cli.format))
        }
    }
}
