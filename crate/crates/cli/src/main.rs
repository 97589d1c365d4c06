use anyhow::Context;
use biaslens::report::{emit_report, run_pipeline, Analysis, Format, RunConfig};
use biaslens::synth::{generate, SynthFiles, SynthOptions};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 1;
const EXIT_INGEST: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "biaslens", version, about = "Measure gender bias in entity-linked comment corpora")]
struct Cli {
    /// Log more (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses and write a report bundle.
    Run(RunArgs),
    /// Write a synthetic corpus with matching registry, lexicons and config.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration. Flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comment corpus, one JSON object per line.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Entity registry CSV.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Valence/arousal/dominance lexicon, tab separated.
    #[arg(long)]
    vad: Option<PathBuf>,
    /// Subreddit to group CSV.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Sense annotations for top lexicon words.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Author patterns marking bot comments, one per line.
    #[arg(long = "bot-patterns")]
    bot_patterns: Option<PathBuf>,
    /// Entity to drop for a robustness slice; repeatable.
    #[arg(long = "exclude-entity", value_name = "ID")]
    exclude_entity: Vec<String>,
    /// Analyses to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    analyses: Option<Vec<Analysis>>,
    /// Null samples for the co-mention test.
    #[arg(long, value_name = "K")]
    permutations: Option<usize>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Words kept per gender in lexicon lists.
    #[arg(long = "top-k", value_name = "K")]
    top_k: Option<usize>,
    /// Minimum word count for PMI scoring.
    #[arg(long = "min-count", value_name = "N")]
    min_count: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output formats, comma separated (json, csv).
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write into.
    #[arg(long, default_value = "synth")]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    comments: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long = "female-entities", default_value_t = 20)]
    female_entities: usize,
    #[arg(long = "male-entities", default_value_t = 80)]
    male_entities: usize,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, biaslens::report::ConfigError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let set = |slot: &mut PathBuf, v: Option<PathBuf>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.corpus, self.corpus);
        set(&mut c.registry, self.registry);
        set(&mut c.out, self.out);
        for (slot, v) in [
            (&mut c.vad, self.vad),
            (&mut c.groups, self.groups),
            (&mut c.annotations, self.annotations),
            (&mut c.bot_patterns, self.bot_patterns),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
        if !self.exclude_entity.is_empty() {
            c.exclude_entities = self.exclude_entity;
        }
        if let Some(a) = self.analyses {
            c.analyses = a.into_iter().collect();
        }
        if let Some(f) = self.format {
            c.formats = f.into_iter().collect();
        }
        c.permutations = self.permutations.unwrap_or(c.permutations);
        c.seed = self.seed.unwrap_or(c.seed);
        c.top_k = self.top_k.unwrap_or(c.top_k);
        c.min_count = self.min_count.unwrap_or(c.min_count);
        Ok(c)
    }
}

fn run(args: RunArgs) -> ExitCode {
    let config = match args.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let bundle = match run_pipeline(&config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_INGEST });
        }
    };
    let manifest = match emit_report(&bundle, &config.out, &config.formats) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    println!(
        "wrote {} files to {} in {} ms",
        manifest.files.len() + 1,
        config.out.display(),
        manifest.wall_clock_ms
    );
    let mut partial = false;
    for scope in &bundle.scopes {
        for a in scope.failures() {
            eprintln!("warning: {} failed in scope {}", a.as_str(), scope.scope);
            partial = true;
        }
    }
    if partial {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

/// Paths are written relative to the config's own directory.
fn sample_config(files: &SynthFiles) -> String {
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "corpus = \"{}\"\nregistry = \"{}\"\ngroups = \"{}\"\nvad = \"{}\"\nannotations = \"{}\"\n\
         permutations = 1000\nseed = 1\ntop_k = 20\nout = \"report\"\n",
        name(&files.corpus),
        name(&files.registry),
        name(&files.groups),
        name(&files.vad),
        name(&files.annotations),
    )
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let opts = SynthOptions {
        comments: args.comments,
        seed: args.seed,
        female_entities: args.female_entities,
        male_entities: args.male_entities,
        ..Default::default()
    };
    anyhow::ensure!(opts.female_entities > 0 && opts.male_entities > 0, "need at least one entity of each gender");
    let files = generate(&opts).write_dir(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    let config = args.out.join("run.toml");
    std::fs::write(&config, sample_config(&files)).with_context(|| format!("writing {}", config.display()))?;
    println!("wrote synthetic inputs to {}; try: biaslens run --config {}", args.out.display(), config.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match cli.command {
        Command::Run(args) => run(args),
        Command::Synth(args) => match synth(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
