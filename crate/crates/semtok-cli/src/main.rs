//! `semtok` command line: train vocabularies, encode/decode line streams,
//! and report vocabulary efficiency.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};

use semtok::codec;
use semtok::corpus::{self, NormalizationConfig};
use semtok::metrics;
use semtok::trainer::{self, TrainerConfig};
use semtok::vocab::Vocabulary;

#[derive(Parser)]
#[command(name = "semtok", version, about = "Semantic subword tokenizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a two-segment (semantic + residual) vocabulary
    Train(TrainArgs),
    /// Train the plain BPE baseline vocabulary
    TrainBpe(TrainBpeArgs),
    /// Encode stdin lines to pieces (or ids) on stdout
    Encode(EncodeArgs),
    /// Decode stdin lines of pieces back to text
    Decode(DecodeArgs),
    /// Report vocabulary efficiency over a corpus
    Analyze(AnalyzeArgs),
    /// Compare two vocabularies over a corpus
    Compare(CompareArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Input corpus: UTF-8 text files or directories, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    input: Vec<PathBuf>,

    /// Lowercase text during normalization
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    lowercase: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    /// Output prefix: writes <prefix>.model and <prefix>.vocab.txt
    #[arg(long)]
    model_prefix: String,

    /// Total vocabulary size including special tokens
    #[arg(long)]
    vocab_size: usize,

    /// Fraction of non-special slots for the semantic segment
    #[arg(long, default_value_t = 0.9)]
    semantic_fraction: f64,

    /// Fraction of corpus character mass kept encodable
    #[arg(long, default_value_t = 0.9999)]
    character_coverage: f64,

    /// Minimum word count for semantic-segment candidates
    #[arg(long, default_value_t = 2)]
    min_frequency: u64,

    /// Minimum stem length for stem/suffix decomposition
    #[arg(long, default_value_t = 2)]
    min_stem_length: usize,
}

#[derive(Args)]
struct TrainBpeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    #[arg(long)]
    model_prefix: String,

    #[arg(long)]
    vocab_size: usize,

    #[arg(long, default_value_t = 0.9999)]
    character_coverage: f64,
}

#[derive(Args)]
struct EncodeArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,

    /// Emit token ids instead of pieces
    #[arg(long)]
    output_ids: bool,

    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    lowercase: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    corpus: CorpusArgs,

    /// Piece budget for the wordform coverage count
    #[arg(long, default_value_t = 2)]
    max_pieces: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    model: PathBuf,

    /// Baseline model to compare against
    #[arg(long)]
    baseline: PathBuf,

    #[command(flatten)]
    corpus: CorpusArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here with a non-error kind
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semtok: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => train(args),
        Command::TrainBpe(args) => train_bpe(args),
        Command::Encode(args) => encode(args),
        Command::Decode(args) => decode(args),
        Command::Analyze(args) => analyze(args),
        Command::Compare(args) => compare(args),
    }
}

fn normalization(lowercase: bool) -> NormalizationConfig {
    NormalizationConfig {
        lowercase,
        ..NormalizationConfig::default()
    }
}

fn write_model_files(vocab: &Vocabulary, prefix: &str) -> Result<()> {
    let model_path = format!("{prefix}.model");
    let mut model = BufWriter::new(
        File::create(&model_path).with_context(|| format!("creating {model_path}"))?,
    );
    vocab
        .write_model(&mut model)
        .with_context(|| format!("writing {model_path}"))?;
    model.flush()?;

    let vocab_path = format!("{prefix}.vocab.txt");
    let mut out = BufWriter::new(
        File::create(&vocab_path).with_context(|| format!("creating {vocab_path}"))?,
    );
    vocab
        .write_bert_vocab(&mut out)
        .with_context(|| format!("writing {vocab_path}"))?;
    out.flush()?;
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let config = TrainerConfig {
        vocab_size: args.vocab_size,
        semantic_fraction: args.semantic_fraction,
        min_frequency: args.min_frequency,
        min_stem_length: args.min_stem_length,
        character_coverage: args.character_coverage,
        normalization: normalization(args.corpus.lowercase),
        ..TrainerConfig::default()
    };
    let (vocab, summary) = trainer::train_from_files(&args.corpus.input, &config)?;
    write_model_files(&vocab, &args.model_prefix)?;
    println!("{summary}");
    Ok(())
}

fn train_bpe(args: TrainBpeArgs) -> Result<()> {
    let config = TrainerConfig {
        vocab_size: args.vocab_size,
        character_coverage: args.character_coverage,
        normalization: normalization(args.corpus.lowercase),
        ..TrainerConfig::default()
    };
    let freq = corpus::build_frequency_table_from_files(&args.corpus.input, &config.normalization)?;
    let vocab = semtok::bpe::train_bpe(&freq, args.vocab_size, &config)?;
    write_model_files(&vocab, &args.model_prefix)?;
    println!("vocab_size:{}", vocab.len());
    println!("special_tokens:{}", vocab.special_count());
    println!(
        "residual_tokens:{}",
        vocab.len() - vocab.special_count()
    );
    Ok(())
}

fn load_model(path: &PathBuf) -> Result<Vocabulary> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let vocab = Vocabulary::read_model(io::BufReader::new(file))
        .with_context(|| format!("loading {}", path.display()))?;
    Ok(vocab)
}

fn encode(args: EncodeArgs) -> Result<()> {
    let vocab = load_model(&args.model)?;
    let norm = normalization(args.lowercase);
    let stdin = io::stdin().lock();
    let stdout = io::stdout().lock();
    let mut out = BufWriter::new(stdout);
    for line in stdin.lines() {
        let line = line.context("reading stdin")?;
        let encoding = codec::encode_text(&line, &vocab, &norm)?;
        let mut first = true;
        for i in 0..encoding.len() {
            if !first {
                write!(out, " ")?;
            }
            if args.output_ids {
                write!(out, "{}", encoding.ids[i])?;
            } else {
                write!(out, "{}", encoding.pieces[i])?;
            }
            first = false;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn decode(args: DecodeArgs) -> Result<()> {
    let vocab = load_model(&args.model)?;
    let stdin = io::stdin().lock();
    let stdout = io::stdout().lock();
    let mut out = BufWriter::new(stdout);
    for line in stdin.lines() {
        let line = line.context("reading stdin")?;
        let mut ids = Vec::new();
        for piece in line.split_whitespace() {
            match vocab.lookup(piece) {
                Some(id) => ids.push(id),
                None => bail!("unknown piece {piece:?}"),
            }
        }
        writeln!(out, "{}", codec::decode(&ids, &vocab)?)?;
    }
    out.flush()?;
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let vocab = load_model(&args.model)?;
    let norm = normalization(args.corpus.lowercase);
    let freq = corpus::build_frequency_table_from_files(&args.corpus.input, &norm)?;
    let report = metrics::efficiency_report(&vocab, &freq, args.max_pieces);
    print!("{report}");
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let vocab = load_model(&args.model)?;
    let baseline = load_model(&args.baseline)?;
    let norm = normalization(args.corpus.lowercase);
    let freq = corpus::build_frequency_table_from_files(&args.corpus.input, &norm)?;
    let report = metrics::compare_vocabularies(&vocab, &baseline, &freq, 2);
    print!("{report}");
    Ok(())
}
