//! `spectra`: ingest WordNet, query similarities, train sense spectra and
//! evaluate them.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or data error.

mod config;
mod manifest;

use std::fmt;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use sense_spectra::eval::{
    self, dump_spectrum_csv, evaluate_measure, format_report_table, load_simlex, max_his_synset_pairs, mean_sparsity,
    neighbors, recovery_stats, report_csv, CorrelationMode, EvalOptions, Selection, Taxonomies,
};
use sense_spectra::similarity::{max_pair, similarity, Convention, PairChoice};
use sense_spectra::taxonomy::TaxonomyOptions;
use sense_spectra::trainer::{load_checkpoint, loss_csv, save_checkpoint, sense_groups, train_with};
use sense_spectra::wordnet::{load_wndb_dir, parse_edge_list};
use sense_spectra::{build_taxonomy, Database, Error, HisParams, Measure, PartOfSpeech, SpectrumTable, Taxonomy};

use crate::config::{parse_pos, read_kv, resolve_train, TrainFlags};
use crate::manifest::RunManifest;

/// A problem with the invocation or its inputs (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(
    name = "spectra",
    version,
    about = "Hypernym intersection similarity and sense spectra over WordNet"
)]
struct Cli {
    /// More log output (repeat for debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Source {
    /// WNDB `dict` directory with data.{noun,verb} and index.{noun,verb}
    /// [default: $WORDNET_DIR]
    #[arg(long, value_name = "DIR")]
    wordnet_dir: Option<PathBuf>,

    /// Edge-list fixture file instead of a WNDB directory
    #[arg(long, value_name = "FILE", conflicts_with = "wordnet_dir")]
    fixture: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ConventionArg {
    Formula,
    Reference,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Formula => Convention::Formula,
            ConventionArg::Reference => Convention::Reference,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SelectionArg {
    /// Each measure picks its own best synset pair
    Own,
    /// Every measure scores the max-HIS synset pair
    His,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Rank,
    Raw,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a database and print its synset and lemma counts
    Ingest {
        #[command(flatten)]
        source: Source,
        /// Also write the summary to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Similarity of two synsets, or of two words via their best synset pair
    Sim {
        #[command(flatten)]
        source: Source,
        /// his, path, lch or wp
        #[arg(long, default_value = "his")]
        measure: String,
        /// Path conventions for lch and wp
        #[arg(long, value_enum, default_value = "reference")]
        convention: ConventionArg,
        /// Treat the operands as words rather than synset names
        #[arg(long)]
        words: bool,
        /// Part of speech for word mode (n or v)
        #[arg(long, default_value = "n")]
        pos: String,
        a: String,
        b: String,
    },
    /// Train a spectrum table for one part of speech
    Train {
        #[command(flatten)]
        source: Source,
        /// key=value file; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// n or v
        #[arg(long)]
        pos: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        lr: Option<f64>,
        /// Pairs per sampling strategy; the batch holds 3T pairs
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        init_scale: Option<f64>,
        /// Restrict training to this synset and its descendants
        #[arg(long)]
        subset: Option<String>,
        #[arg(long)]
        log_interval: Option<u64>,
        /// Rewrite the checkpoint every N steps (0 = only at the end)
        #[arg(long)]
        checkpoint_interval: Option<u64>,
        /// Checkpoint path; the loss log and manifest go next to it
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation with SimLex-999 and, given spectra, recovery statistics
    Eval {
        #[command(flatten)]
        source: Source,
        /// SimLex-999 file [default: $SIMLEX_PATH]
        #[arg(long)]
        simlex: Option<PathBuf>,
        /// `all` or a comma-separated list of his, path, lch, wp
        #[arg(long, default_value = "all")]
        measures: String,
        #[arg(long, value_enum, default_value = "reference")]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value = "own")]
        selection: SelectionArg,
        #[arg(long, value_enum, default_value = "rank")]
        mode: ModeArg,
        /// Trained checkpoints (one per part of speech)
        #[arg(long)]
        spectra: Vec<PathBuf>,
        /// Recovery histogram CSV (with --spectra)
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Write the report CSV and a manifest here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nearest spectra of a synset under spectrum HIS
    Neighbors {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        spectra: PathBuf,
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..), default_value = "3")]
        k: u32,
        name: String,
    },
    /// Write spectra of named synsets as CSV
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        spectra: PathBuf,
        /// Comma-separated synset names
        #[arg(long, value_delimiter = ',', required = true)]
        names: Vec<String>,
        /// Output file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Loaded {
    db: Database,
    inputs: Vec<(String, PathBuf)>,
}

impl Source {
    fn load(&self) -> Result<Loaded> {
        if let Some(path) = &self.fixture {
            let text = fs::read_to_string(path).with_context(|| format!("reading fixture {}", path.display()))?;
            let db = parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?;
            return Ok(Loaded {
                db,
                inputs: vec![("fixture".into(), path.clone())],
            });
        }
        let dir = match (&self.wordnet_dir, std::env::var_os("WORDNET_DIR")) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => PathBuf::from(d),
            (None, None) => bail!(UsageError("give --wordnet-dir, --fixture or set WORDNET_DIR".into())),
        };
        if !dir.is_dir() {
            bail!(UsageError(format!("{} is not a directory", dir.display())));
        }
        let db = load_wndb_dir(&dir).with_context(|| format!("loading WordNet from {}", dir.display()))?;
        let inputs = ["data.noun", "index.noun", "data.verb", "index.verb"]
            .iter()
            .map(|f| (f.to_string(), dir.join(f)))
            .collect();
        Ok(Loaded { db, inputs })
    }
}

impl Loaded {
    fn taxonomy(&self, pos: PartOfSpeech) -> Result<Taxonomy> {
        Ok(build_taxonomy(&self.db, pos, TaxonomyOptions::wordnet())?)
    }

    fn manifest(&self, command: &str) -> Result<RunManifest> {
        let mut m = RunManifest::new(command);
        for (label, path) in &self.inputs {
            m.add_input(label, path)?;
        }
        Ok(m)
    }
}

fn parse_measure(s: &str) -> Result<Measure> {
    s.parse::<Measure>().map_err(|e| UsageError(e.to_string()).into())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_ingest(source: &Source, out: Option<&Path>) -> Result<()> {
    let loaded = source.load()?;
    let shown: Vec<PartOfSpeech> = PartOfSpeech::ALL
        .into_iter()
        .filter(|&pos| loaded.db.count(pos) > 0 || source.fixture.is_none())
        .collect();
    let synsets: Vec<String> = shown
        .iter()
        .map(|&p| format!("{p}: {} synsets", loaded.db.count(p)))
        .collect();
    let lemmas: Vec<String> = shown
        .iter()
        .map(|&p| format!("{p} {}", loaded.db.lemma_count(p)))
        .collect();
    let summary = format!("{}\nlemmas: {}\n", synsets.join(", "), lemmas.join(", "));
    print!("{summary}");
    if let Some(path) = out {
        let mut text = loaded.manifest("ingest")?.render();
        text.push_str(&summary);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_choice(measure: Measure, t: &Taxonomy, c: &PairChoice) -> Result<()> {
    let mut line = format!("{} {}", t.name(c.a)?, t.name(c.b)?);
    if measure == Measure::His {
        let s = t.his_scalars(c.a, c.b)?;
        line.push_str(&format!(" alpha={} beta={} gamma={}", s.alpha, s.beta, s.gamma));
    }
    println!("{line} {}={:.4}", measure.key(), c.score.value);
    Ok(())
}

fn cmd_sim(
    source: &Source,
    measure: &str,
    convention: Convention,
    words: bool,
    pos: &str,
    a: &str,
    b: &str,
) -> Result<()> {
    let measure = parse_measure(measure)?;
    let loaded = source.load()?;
    let db = &loaded.db;
    let params = HisParams::default();
    if words {
        let pos = parse_pos(pos)?;
        let t = loaded.taxonomy(pos)?;
        let Some(choice) = max_pair(db, &t, measure, convention, &params, a, b, pos)? else {
            bail!(UsageError(format!("no {pos} synset pair for {a:?} and {b:?}")));
        };
        return print_choice(measure, &t, &choice);
    }
    let (ia, ib) = (db.resolve_name(a)?, db.resolve_name(b)?);
    if ia.pos != ib.pos {
        return Err(Error::CrossPos(ia.pos, ib.pos)).context(format!(
            "{a} and {b} live in different hypernym hierarchies; similarity is only defined within one part of speech"
        ));
    }
    let t = loaded.taxonomy(ia.pos)?;
    let score = similarity(&t, measure, convention, &params, ia, ib)?;
    print_choice(measure, &t, &PairChoice { a: ia, b: ib, score })
}

fn cmd_train(source: &Source, config: Option<&Path>, flags: TrainFlags, out: &Path) -> Result<()> {
    let file = match config {
        Some(p) => read_kv(p)?,
        None => Default::default(),
    };
    let settings = resolve_train(&flags, &file)?;
    let loaded = source.load()?;
    let full = loaded.taxonomy(settings.pos)?;
    let t = match &settings.subset {
        Some(name) => {
            let root = loaded.db.resolve_name(name)?;
            full.subtaxonomy(root)?
        }
        None => full,
    };
    let groups = sense_groups(&loaded.db, settings.pos).restrict_to(&t);
    info!(
        "training {} {} synsets, {} sense groups, {} steps",
        t.len(),
        settings.pos,
        groups.len(),
        settings.config.steps
    );

    let mut manifest = loaded.manifest("train")?;
    if let Some(p) = config {
        manifest.add_input("config", p)?;
    }
    manifest.seed = Some(settings.config.seed);
    manifest.config = settings.entries();

    let run = train_with(&t, &groups, &settings.config, |step, table| {
        info!("step {step}: writing checkpoint");
        save_checkpoint(table, out)
    })?;
    save_checkpoint(&run.table, out)?;
    fs::write(with_suffix(out, ".loss.csv"), loss_csv(&run.losses))?;
    manifest.write(&with_suffix(out, ".manifest"))?;
    let last = run.losses.last().map(|r| r.mean_loss);
    println!(
        "{} rows x {} dims -> {}{}",
        run.table.len(),
        run.table.dim(),
        out.display(),
        last.map(|l| format!(", final mean loss {l:.4}")).unwrap_or_default()
    );
    Ok(())
}

struct EvalArgs<'a> {
    source: &'a Source,
    simlex: Option<&'a Path>,
    measures: &'a str,
    options: EvalOptions,
    spectra: &'a [PathBuf],
    histogram: Option<&'a Path>,
    out: Option<&'a Path>,
}

fn cmd_eval(args: EvalArgs<'_>) -> Result<()> {
    let measures: Vec<Measure> = if args.measures == "all" {
        Measure::ALL.to_vec()
    } else {
        args.measures
            .split(',')
            .map(|m| parse_measure(m.trim()))
            .collect::<Result<_>>()?
    };
    let simlex_path = match (args.simlex, std::env::var_os("SIMLEX_PATH")) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => bail!(UsageError("give --simlex or set SIMLEX_PATH".into())),
    };
    let file = fs::File::open(&simlex_path).with_context(|| format!("opening {}", simlex_path.display()))?;
    let simlex = load_simlex(BufReader::new(file))?;
    info!(
        "{} noun, {} verb pairs; {} adjective rows dropped",
        simlex.count(PartOfSpeech::Noun),
        simlex.count(PartOfSpeech::Verb),
        simlex.adjective_rows
    );

    let loaded = args.source.load()?;
    // checkpoints are validated before any long computation
    let tables = args
        .spectra
        .iter()
        .map(|p| load_checkpoint(p, &loaded.db).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<SpectrumTable>>>()?;

    let noun = loaded.taxonomy(PartOfSpeech::Noun)?;
    let verb = loaded.taxonomy(PartOfSpeech::Verb)?;
    let ts = Taxonomies {
        noun: &noun,
        verb: &verb,
    };
    let reports = measures
        .iter()
        .map(|&m| evaluate_measure(m, &simlex.pairs, &loaded.db, ts, &args.options))
        .collect::<sense_spectra::Result<Vec<_>>>()?;
    println!("Spearman correlation x100 with SimLex-999");
    print!("{}", format_report_table(&reports));

    let mut histogram_csv = String::new();
    for table in &tables {
        let t = ts.get(table.pos());
        let pairs: Vec<_> = max_his_synset_pairs(&simlex.pairs, &loaded.db, t, &args.options.params)?
            .into_iter()
            .filter(|(a, b)| table.row_of(*a).is_ok() && table.row_of(*b).is_ok())
            .collect();
        let stats = recovery_stats(table, t, &pairs)?;
        println!("\nRecovery ratio, {} spectra ({} rows)", table.pos(), table.len());
        print!("{}", stats.summary());
        println!("mean sparsity: {:.4}", mean_sparsity(table));
        for line in stats.histogram_csv().lines().skip(1) {
            histogram_csv.push_str(&format!("{},{line}\n", table.pos()));
        }
    }
    if let Some(path) = args.histogram {
        fs::write(path, format!("pos,bin_start,bin_end,count\n{histogram_csv}"))?;
    }
    if let Some(out) = args.out {
        fs::write(out, report_csv(&reports))?;
        let mut manifest = loaded.manifest("eval")?;
        manifest.add_input("simlex", &simlex_path)?;
        for (i, p) in args.spectra.iter().enumerate() {
            manifest.add_input(&format!("spectra{i}"), p)?;
        }
        let o = &args.options;
        manifest.config.insert("measures".into(), args.measures.to_string());
        manifest
            .config
            .insert("convention".into(), format!("{:?}", o.convention).to_lowercase());
        manifest
            .config
            .insert("selection".into(), format!("{:?}", o.selection).to_lowercase());
        manifest
            .config
            .insert("mode".into(), format!("{:?}", o.mode).to_lowercase());
        manifest.write(&with_suffix(out, ".manifest"))?;
    }
    Ok(())
}

fn cmd_neighbors(source: &Source, spectra: &Path, k: u32, name: &str) -> Result<()> {
    let loaded = source.load()?;
    let table = load_checkpoint(spectra, &loaded.db).with_context(|| format!("loading {}", spectra.display()))?;
    let id = loaded.db.resolve_name(name)?;
    for (n, score) in neighbors(&table, id, k as usize, &HisParams::default())? {
        println!("{} {score:.4}", loaded.db.canonical_name(n)?);
    }
    Ok(())
}

fn cmd_export(source: &Source, spectra: &Path, names: &[String], out: Option<&Path>) -> Result<()> {
    let loaded = source.load()?;
    let table = load_checkpoint(spectra, &loaded.db).with_context(|| format!("loading {}", spectra.display()))?;
    let ids = names
        .iter()
        .map(|n| loaded.db.resolve_name(n.trim()))
        .collect::<sense_spectra::Result<Vec<_>>>()?;
    let csv = dump_spectrum_csv(&table, &ids)?;
    for (name, id) in names.iter().zip(&ids) {
        eprintln!("{} sparsity {:.4}", name.trim(), eval::sparsity(table.spectrum(*id)?));
    }
    match out {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { source, out } => cmd_ingest(&source, out.as_deref()),
        Command::Sim {
            source,
            measure,
            convention,
            words,
            pos,
            a,
            b,
        } => cmd_sim(&source, &measure, convention.into(), words, &pos, &a, &b),
        Command::Train {
            source,
            config,
            pos,
            dim,
            steps,
            lr,
            t,
            seed,
            init_scale,
            subset,
            log_interval,
            checkpoint_interval,
            out,
        } => {
            let flags = TrainFlags {
                pos: pos.as_deref().map(parse_pos).transpose()?,
                dim,
                steps,
                lr,
                t,
                seed,
                init_scale,
                subset,
                log_interval,
                checkpoint_interval,
            };
            cmd_train(&source, config.as_deref(), flags, &out)
        }
        Command::Eval {
            source,
            simlex,
            measures,
            convention,
            selection,
            mode,
            spectra,
            histogram,
            out,
        } => cmd_eval(EvalArgs {
            source: &source,
            simlex: simlex.as_deref(),
            measures: &measures,
            options: EvalOptions {
                selection: match selection {
                    SelectionArg::Own => Selection::OwnMax,
                    SelectionArg::His => Selection::HisSelected,
                },
                convention: convention.into(),
                mode: match mode {
                    ModeArg::Rank => CorrelationMode::Rank,
                    ModeArg::Raw => CorrelationMode::Raw,
                },
                params: HisParams::default(),
            },
            spectra: &spectra,
            histogram: histogram.as_deref(),
            out: out.as_deref(),
        }),
        Command::Neighbors {
            source,
            spectra,
            k,
            name,
        } => cmd_neighbors(&source, &spectra, k, &name),
        Command::Export {
            source,
            spectra,
            names,
            out,
        } => cmd_export(&source, &spectra, &names, out.as_deref()),
    }
}

/// 2 for usage and data errors, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NonFiniteUpdate { .. } | Error::DimensionMismatch { .. } | Error::Inconsistent(_) => 1,
                Error::Io(io) if io.kind() != io::ErrorKind::NotFound => 1,
                _ => 2,
            };
        }
        if let Some(io) = cause.downcast_ref::<io::Error>() {
            return if io.kind() == io::ErrorKind::NotFound { 2 } else { 1 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
