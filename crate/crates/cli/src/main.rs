use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use patavoid::certify::{self, Morphism, VerificationReport};
use patavoid::patterns::{self, Pattern};
use patavoid::series::{self, Attempt, SeriesReport, SeriesSpec, Strategy, Term};
use patavoid::spectral;
use patavoid::words::Word;

#[derive(Parser)]
#[command(name = "patavoid", version, about = "Pattern avoidability workbench")]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Least occurrence of a pattern in a word
    Occ {
        pattern: String,
        word: String,
        /// Upper bound on the total image length
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Doubled patterns on 4 or 5 variables left open by the series method
    Enumerate {
        #[arg(long = "vars")]
        vars: usize,
    },
    /// Smallest positive root of the growth series
    Series(SeriesArgs),
    /// Avoidability exponent of a pattern with every variable twice
    Ae { pattern: String },
    /// Bounded check that morphic images of (5/4)+-free words avoid a pattern
    Verify(VerifyArgs),
    /// Number of words avoiding a pattern, per length
    Count {
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 3)]
        alphabet: u32,
        #[arg(long)]
        up_to: usize,
        /// Compare with the series lower bound
        #[arg(long)]
        check: bool,
    },
    /// n-splitted factor of a word of length n^k on k letters
    Splitted { word: String, n: usize },
    /// The ten sporadic patterns and their morphisms
    Corpus {
        /// Print the morphism images
        #[arg(long)]
        images: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    Prefix,
    Auto,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, required_unless_present = "terms", conflicts_with = "terms")]
    pattern: Option<String>,
    /// Explicit terms `c:w,c:w,...` instead of a pattern
    #[arg(long)]
    terms: Option<String>,
    #[arg(long, default_value_t = 3)]
    alphabet: u32,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    /// Prefix length for `--strategy prefix` (default: longest distinct prefix)
    #[arg(long)]
    prefix: Option<usize>,
    /// Exit with status 1 when no root is found
    #[arg(long)]
    require_root: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corpus entry by number or pattern
    #[arg(long, conflicts_with_all = ["all", "morphism"])]
    entry: Option<String>,
    /// Every corpus entry
    #[arg(long)]
    all: bool,
    /// Pattern to check against `--morphism`
    #[arg(long, requires = "morphism")]
    pattern: Option<String>,
    /// Morphism file (`d -> bits` per line)
    #[arg(long, requires = "pattern")]
    morphism: Option<PathBuf>,
    #[arg(long, default_value_t = certify::DEFAULT_MAX_PREIMAGE_LEN)]
    max_preimage_len: usize,
    /// Upper bound on the total image length (default: twice the morphism length)
    #[arg(long)]
    image_cap: Option<usize>,
}

/// Input errors exit with status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<ExitCode, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool");
    }
    match run(&cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    let out = if json { serde_json::to_string_pretty(value).expect("serializable report") } else { text() };
    let mut stdout = std::io::stdout().lock();
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(stdout, "{out}").and_then(|_| stdout.flush());
}

fn run(cli: &Cli) -> CmdResult {
    let json = cli.json;
    match &cli.command {
        Command::Occ { pattern, word, cap } => {
            let p: Pattern = pattern.parse()?;
            let w: Word = word.parse()?;
            let occ = patterns::find_occurrence(&p, &w, *cap);
            emit(json, &occ, || occ.as_ref().map_or("none".to_string(), |o| o.to_string()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { vars } => {
            let found = patterns::enumerate_remaining(*vars)?;
            emit(json, &found, || found.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Series(args) => series_cmd(json, args),
        Command::Ae { pattern } => {
            let r = spectral::avoidability_exponent(&pattern.parse()?)?;
            emit(json, &r, || format!("beta={:.6} ae={:.6}", r.beta, r.ae));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => verify_cmd(json, args),
        Command::Count { pattern, alphabet, up_to, check } => {
            let p: Pattern = pattern.parse()?;
            if *check {
                let c = certify::cross_check(&p, *alphabet, *up_to)?;
                emit(json, &c, || {
                    let mut out: Vec<String> = c
                        .counts
                        .iter()
                        .zip(&c.bounds)
                        .enumerate()
                        .map(|(i, (n, b))| format!("{i} {n} {b:.6}"))
                        .collect();
                    out.push(format!("strategy={} holds={}", c.attempt.strategy, c.holds));
                    out.join("\n")
                });
                Ok(if c.holds { ExitCode::SUCCESS } else { ExitCode::FAILURE })
            } else {
                let counts = certify::count_avoiding(&p, *alphabet, *up_to)?;
                emit(json, &counts, || {
                    counts.iter().enumerate().map(|(i, n)| format!("{i} {n}")).collect::<Vec<_>>().join("\n")
                });
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Splitted { word, n } => {
            let w: Word = word.parse()?;
            let r = patterns::find_splitted_factor(&w, *n)?;
            emit(json, &r, || format!("factor={} offset={} n={} depth={}", r.factor, r.offset, r.n, r.depth));
            Ok(ExitCode::SUCCESS)
        }
        Command::Corpus { images } => {
            let entries = certify::corpus();
            emit(json, &entries, || {
                let mut out = Vec::new();
                for e in &entries {
                    out.push(format!("{} {} q={} ae={:.6}", e.id, e.pattern, e.morphism.uniform_len, e.ae));
                    if *images {
                        out.push(e.morphism.to_string().trim_end().to_string());
                    }
                }
                out.join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_terms(s: &str) -> Result<Vec<Term>, UsageError> {
    s.split(',')
        .map(|t| {
            let (c, w) = t.split_once(':').ok_or_else(|| UsageError(format!("bad term {t:?}, expected c:w")))?;
            Ok(Term::new(c.trim().parse()?, w.trim().parse()?))
        })
        .collect()
}

fn attempt_line(pattern: &str, a: &Attempt) -> String {
    let root = a.result.root.map_or("none".to_string(), |r| format!("{r:.6}"));
    let growth = a.result.growth.map_or("none".to_string(), |g| format!("{g:.4}"));
    let mut line = format!(
        "pattern={pattern} strategy={} {} root={root} growth={growth} conclusive={}",
        a.strategy,
        a.spec,
        a.result.is_present()
    );
    if !a.result.is_present() {
        line.push_str(&format!(" scan_min={:.6}", a.result.scan_min));
    }
    line
}

fn series_cmd(json: bool, args: &SeriesArgs) -> CmdResult {
    let report = if let Some(terms) = &args.terms {
        let spec = SeriesSpec::new(args.alphabet, parse_terms(terms)?)?;
        let result = series::smallest_positive_root(&spec);
        let attempt = Attempt { strategy: Strategy::Full, spec, result };
        let conclusive = attempt.result.is_present();
        emit(json, &attempt, || attempt_line("-", &attempt));
        conclusive
    } else {
        let p: Pattern = args.pattern.as_deref().unwrap().parse()?;
        let report = match args.strategy {
            StrategyArg::Auto => series::certify_avoidable(&p, args.alphabet)?,
            StrategyArg::Full => single(&p, args.alphabet, Strategy::Full)?,
            StrategyArg::Prefix => {
                let k = args.prefix.unwrap_or_else(|| p.distinct_prefix_len().min(p.var_count()));
                single(&p, args.alphabet, Strategy::Prefix(k))?
            }
        };
        emit(json, &report, || {
            report.attempts.iter().map(|a| attempt_line(&p.to_string(), a)).collect::<Vec<_>>().join("\n")
        });
        report.conclusive
    };
    Ok(if args.require_root && !report { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn single(p: &Pattern, m: u32, strategy: Strategy) -> Result<SeriesReport, UsageError> {
    let spec = series::spec_for(p, m, strategy)?;
    let result = series::smallest_positive_root(&spec);
    let conclusive = result.is_present();
    Ok(SeriesReport { pattern: p.clone(), attempts: vec![Attempt { strategy, spec, result }], conclusive })
}

fn verify_cmd(json: bool, args: &VerifyArgs) -> CmdResult {
    let jobs: Vec<(Pattern, Morphism, String)> = if args.all {
        certify::corpus().into_iter().map(|e| (e.pattern, e.morphism, e.id.to_string())).collect()
    } else if let Some(key) = &args.entry {
        let e = certify::corpus_entry(key)?;
        vec![(e.pattern, e.morphism, e.id.to_string())]
    } else if let (Some(p), Some(path)) = (&args.pattern, &args.morphism) {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        vec![(p.parse()?, Morphism::parse(&text)?, path.display().to_string())]
    } else {
        return Err(UsageError("give --entry, --all, or --pattern with --morphism".into()));
    };
    let reports = jobs
        .iter()
        .map(|(p, m, id)| {
            let cap = args.image_cap.unwrap_or(2 * m.uniform_len);
            certify::verify(p, m, id, args.max_preimage_len, cap)
        })
        .collect::<Result<Vec<VerificationReport>, _>>()?;
    emit(json, &reports, || reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"));
    Ok(if reports.iter().all(|r| r.passed()) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
