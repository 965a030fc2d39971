//! The `latgame` command-line tool.
//!
//! Every subcommand is a thin adapter over `latgame`; failures print a JSON
//! object `{"error": kind, "message": text}` on stderr and exit with
//! [`EXIT_ERROR`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latgame::format::{self, Document, GameDoc, StrategyDoc, StratificationDoc};
use latgame::games::{self, HeapGameSpec, PlayMode};
use latgame::strat::{compile_rational_strategy, validate_stratification, AffineStratification};
use latgame::strategy::{self, congruent, CongruenceOptions, Engine};
use latgame::{board, oracle, LatticeGame, Limits, RationalGf};
use serde_json::json;

pub mod api;
pub mod plot;

/// Exit status for every kind of failure.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "latgame", version, about = "Exact solving and rational strategies for lattice games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the rule-set axioms; exit 0 if valid, 1 if not.
    Validate { game: PathBuf },
    /// Label every position of a sublevel.
    Solve {
        game: PathBuf,
        #[arg(long)]
        level: i64,
        #[arg(long, value_enum, default_value_t = SolveFormat::Text)]
        format: SolveFormat,
    },
    /// Compile a stratification into a rational strategy.
    Compile {
        strat: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Game to verify the strategy against.
        #[arg(long, required_unless_present = "no_verify")]
        game: Option<PathBuf>,
        #[arg(long, required_unless_present = "no_verify")]
        verify_level: Option<i64>,
        #[arg(long, conflicts_with_all = ["game", "verify_level"])]
        no_verify: bool,
    },
    /// Print P or N for a position; exit 0 for P, 1 for N.
    Query {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(long, value_parser = parse_pos, allow_hyphen_values = true)]
        pos: Pos,
    },
    /// Print the winning moves from a position, one per line.
    Move {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(long, value_parser = parse_pos, allow_hyphen_values = true)]
        pos: Pos,
    },
    /// Decide misère congruence; exit 0 certified, 1 distinguished, 2 probable.
    Congruent(CongruentArgs),
    /// Print the bit complexity of a game, strategy or stratification.
    Complexity { file: PathBuf },
    /// Write a built-in game.
    Gen {
        #[command(subcommand)]
        which: GenCommand,
    },
    /// Draw a two-dimensional sublevel.
    Plot {
        game: PathBuf,
        #[arg(long)]
        level: i64,
        /// Also write an SVG rendering.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Stratification for certified congruence answers.
        #[arg(long)]
        strat: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Sublevel on which the strategy is checked at startup.
        #[arg(long, default_value_t = 20)]
        verify_level: i64,
    },
}

#[derive(Debug, Args)]
struct CongruentArgs {
    game: PathBuf,
    strategy: Option<PathBuf>,
    #[arg(long, value_parser = parse_pos, allow_hyphen_values = true)]
    pos1: Pos,
    #[arg(long, value_parser = parse_pos, allow_hyphen_values = true)]
    pos2: Pos,
    #[arg(long)]
    strat: Option<PathBuf>,
    #[arg(long)]
    radius: Option<i64>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    Nim {
        #[arg(long)]
        heaps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Misere)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Octal {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Ex5 {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Normal,
    Misere,
}

/// A position given as `a,b,...`.
#[derive(Clone, Debug)]
struct Pos(Vec<i64>);

fn parse_pos(s: &str) -> Result<Pos, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("{s:?} is not a comma-separated list of integers")))
        .collect::<Result<_, _>>()
        .map(Pos)
}

fn format_pos(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// A failure reported on stderr.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<latgame::Error> for Failure {
    fn from(e: latgame::Error) -> Self {
        Failure { kind: e.kind().into(), message: e.to_string() }
    }
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { kind: "io".into(), message: format!("{}: {e}", path.display()) }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { kind: "usage".into(), message: message.into() }
    }

    pub fn to_json(&self) -> String {
        json!({"error": self.kind, "message": self.message}).to_string()
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the tool and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let f = Failure::usage(e.to_string().trim_end());
            eprintln!("{}", f.to_json());
            return EXIT_ERROR;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.to_json());
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn limits() -> Result<Limits, Failure> {
    Ok(Limits::from_env()?)
}

pub fn load_game(path: &Path, limits: &Limits) -> Result<LatticeGame, Failure> {
    Ok(format::parse::<GameDoc>(&read(path)?)?.to_game(limits)?)
}

pub fn load_strategy(path: &Path) -> Result<RationalGf, Failure> {
    Ok(format::parse::<StrategyDoc>(&read(path)?)?.to_gf()?)
}

pub fn load_stratification(path: &Path) -> Result<AffineStratification, Failure> {
    Ok(format::parse::<StratificationDoc>(&read(path)?)?.to_stratification()?)
}

fn check_dim(game: &LatticeGame, pos: &[i64]) -> Result<(), Failure> {
    if pos.len() != game.dim() {
        return Err(latgame::Error::DimensionMismatch { expected: game.dim(), found: pos.len() }.into());
    }
    Ok(())
}

fn dispatch(command: Command) -> Outcome {
    let limits = limits()?;
    match command {
        Command::Validate { game } => {
            let doc: GameDoc = format::parse(&read(&game)?)?;
            let (rules, cone) = doc.parts()?;
            let report = board::validate_rule_set(&rules, &cone, &limits)?;
            write_output(None, &format::to_json(&report))?;
            Ok(if report.valid { 0 } else { 1 })
        }
        Command::Solve { game, level, format: fmt } => {
            let game = load_game(&game, &limits)?;
            let region = oracle::solve_sublevel(&game, level, &limits)?;
            match fmt {
                SolveFormat::Text => print!("{}", region.to_text()),
                SolveFormat::Json => write_output(None, &format::to_json(&format::region_points(&region)))?,
            }
            Ok(0)
        }
        Command::Compile { strat, output, game, verify_level, no_verify } => {
            let s = load_stratification(&strat)?;
            let f = compile_rational_strategy(&s)?;
            if !no_verify {
                let (Some(game), Some(level)) = (game, verify_level) else {
                    return Err(Failure::usage("--game and --verify-level are required unless --no-verify"));
                };
                let game = load_game(&game, &limits)?;
                let report = validate_stratification(&s, &game, level, &limits)?;
                if !report.valid {
                    return Err(Failure {
                        kind: "verification_failed".into(),
                        message: format!("stratification does not match the solver: {}", format::to_json(&report)),
                    });
                }
                Engine::new(game, Some(f.clone()), limits.clone())?.verify(level)?;
            }
            write_output(output.as_deref(), &format::to_json(&StrategyDoc::from_gf(&f)?))?;
            Ok(0)
        }
        Command::Query { game, strategy, pos: Pos(pos) } => {
            let game = load_game(&game, &limits)?;
            let f = load_strategy(&strategy)?;
            check_dim(&game, &pos)?;
            if !game.board_contains(&pos) {
                return Err(latgame::Error::PositionOffBoard(pos).into());
            }
            let p = strategy::is_p(&f, &pos, game.ell(), &limits)?;
            write_output(None, if p { "P" } else { "N" })?;
            Ok(if p { 0 } else { 1 })
        }
        Command::Move { game, strategy, pos: Pos(pos) } => {
            let game = load_game(&game, &limits)?;
            let f = load_strategy(&strategy)?;
            check_dim(&game, &pos)?;
            let moves = strategy::winning_moves(&game, &f, &pos, &limits)?;
            let mut out = String::new();
            for m in moves {
                out.push_str(&format_pos(&m));
                out.push('\n');
            }
            print!("{out}");
            Ok(0)
        }
        Command::Congruent(args) => {
            let game = load_game(&args.game, &limits)?;
            let f = args.strategy.as_deref().map(load_strategy).transpose()?;
            let s = args.strat.as_deref().map(load_stratification).transpose()?;
            let engine = Engine::new(game, f, limits)?;
            let opts = CongruenceOptions { radius: args.radius, trials: args.trials, seed: args.seed };
            let verdict = congruent(&engine, s.as_ref(), &args.pos1.0, &args.pos2.0, &opts)?;
            write_output(None, &format::to_json(&verdict))?;
            Ok(verdict.exit_code())
        }
        Command::Complexity { file } => {
            let bits = match format::parse_document(&read(&file)?)? {
                Document::Game(doc) => doc.to_game(&limits)?.input_complexity(),
                Document::Strategy(doc) => {
                    let c = doc.to_gf()?.complexity();
                    if c.mixed_k {
                        eprintln!("note: terms have different numbers of denominator factors (mixed-k)");
                    }
                    c.bits
                }
                Document::Stratification(doc) => doc.to_stratification()?.complexity(),
            };
            write_output(None, &bits.to_string())?;
            Ok(0)
        }
        Command::Gen { which } => {
            let (game, output) = match which {
                GenCommand::Nim { heaps, mode, output } => {
                    let mode = match mode {
                        Mode::Normal => PlayMode::Normal,
                        Mode::Misere => PlayMode::Misere,
                    };
                    (games::nim(heaps, mode)?, output)
                }
                GenCommand::Octal { spec, output } => {
                    let spec: HeapGameSpec = format::parse(&read(&spec)?)?;
                    (games::octal(&spec)?, output)
                }
                GenCommand::Ex5 { output } => (games::ex5(), output),
            };
            write_output(output.as_deref(), &format::to_json(&GameDoc::from_game(&game)))?;
            Ok(0)
        }
        Command::Plot { game, level, svg } => {
            let game = load_game(&game, &limits)?;
            if game.dim() != 2 {
                return Err(Failure::usage(format!("plot needs a two-dimensional game, got d = {}", game.dim())));
            }
            let region = oracle::solve_sublevel(&game, level, &limits)?;
            print!("{}", plot::text_grid(&region));
            if let Some(path) = svg {
                fs::write(&path, plot::svg(&region)).map_err(|e| Failure::io(&path, e))?;
            }
            Ok(0)
        }
        Command::Serve { game, strategy, strat, port, host, verify_level } => {
            let game = load_game(&game, &limits)?;
            let f = strategy.as_deref().map(load_strategy).transpose()?;
            let s = strat.as_deref().map(load_stratification).transpose()?;
            let engine = Engine::new(game, f, limits)?;
            engine.verify(verify_level)?;
            let state = Arc::new(api::AppState::new(engine, s));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::io(Path::new("<runtime>"), e))?;
            runtime.block_on(async move {
                let addr = format!("{host}:{port}");
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|e| Failure::io(Path::new(&addr), e))?;
                eprintln!("listening on http://{addr}");
                axum::serve(listener, api::router(state))
                    .await
                    .map_err(|e| Failure::io(Path::new(&addr), e))
            })?;
            Ok(0)
        }
    }
}
