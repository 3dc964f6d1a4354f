use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ubfm::eval::{generate_eval_sets, EvalSet, EvalSetsFile};
use ubfm::game::{game_by_name, parse_diagram, print_diagram, Game, GameState, Move, Player};
use ubfm::harness::{
    play_match_logged, run_tournament_with, seeded_setup, trace_backprop, MatchSpec, TournamentConfig,
};
use ubfm::oracle::Oracle;
use ubfm::search::{Budget, Preset, SearchConfig, TieBreak};
use ubfm::CompletedValue;

mod selftest;

#[derive(Parser)]
#[command(name = "ubfm", version, about = "Unbounded best-first minimax: play, solve, trace and run tournaments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match and print the result with per-move stats.
    Play(PlayArgs),
    /// Run a tournament and write the report.
    Tournament(TournamentArgs),
    /// Solve a position exactly.
    Solve(SolveArgs),
    /// Run a search with both backpropagation rules and diff the logs.
    Trace(TraceArgs),
    /// Run the built-in invariant checks.
    Selftest,
    /// Generate eval sets and write them as JSON.
    Evals(EvalsArgs),
}

#[derive(Args)]
struct BudgetArgs {
    /// Iterations per move.
    #[arg(long, conflicts_with = "budget_ms")]
    budget_iters: Option<u64>,
    /// Wall-clock milliseconds per move.
    #[arg(long)]
    budget_ms: Option<u64>,
}

impl BudgetArgs {
    fn get(&self) -> Option<Budget> {
        match (self.budget_iters, self.budget_ms) {
            (Some(n), _) => Some(Budget::Iterations(n)),
            (None, Some(ms)) => Some(Budget::WallClockMillis(ms)),
            (None, None) => None,
        }
    }

    fn or_default(&self) -> Budget {
        self.get().unwrap_or(Budget::Iterations(ubfm::search::DEFAULT_ITERATIONS))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlayFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Seat {
    First,
    Second,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ties {
    First,
    Random,
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long, default_value = "tictactoe")]
    game: String,
    /// Variant playing side A.
    #[arg(long, default_value = "ubfm_ref")]
    variant: Preset,
    /// Variant playing side B.
    #[arg(long, default_value = "ubfm_ref")]
    opponent: Preset,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eval sets file; generated from the seed when absent.
    #[arg(long)]
    eval_sets: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    set: usize,
    #[arg(long, default_value_t = 0)]
    member_a: usize,
    #[arg(long, default_value_t = 1)]
    member_b: usize,
    /// Seat taken by side A.
    #[arg(long, value_enum, default_value = "first")]
    seat: Seat,
    #[arg(long, value_enum, default_value = "text")]
    format: PlayFormat,
}

#[derive(Args)]
struct TournamentArgs {
    /// TOML tournament config; the desk-scale defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Eval sets files replacing the generated sets of their games.
    #[arg(long)]
    eval_sets: Vec<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "tictactoe")]
    game: String,
    /// File holding a position diagram.
    #[arg(long, conflicts_with = "moves")]
    diagram: Option<PathBuf>,
    /// Comma-separated moves from the initial position.
    #[arg(long)]
    moves: Option<String>,
    /// List every optimal move, also in won positions.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, default_value = "hex5")]
    game: String,
    /// Picks the opening and the evaluation function.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Salt the evaluation so distinct states never tie.
    #[arg(long)]
    injective_eval: bool,
    #[arg(long)]
    no_tt: bool,
    #[arg(long)]
    no_completion: bool,
    #[arg(long, value_enum, default_value = "first")]
    ties: Ties,
    /// Also print both full logs.
    #[arg(long)]
    logs: bool,
}

#[derive(Args)]
struct EvalsArgs {
    #[arg(long)]
    game: String,
    #[arg(long, default_value_t = ubfm::eval::DEFAULT_SETS)]
    sets: usize,
    #[arg(long, default_value_t = ubfm::eval::DEFAULT_MEMBERS)]
    members: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Play(a) => play(a),
        Command::Tournament(a) => tournament(a),
        Command::Solve(a) => solve(a),
        Command::Trace(a) => trace(a),
        Command::Selftest => selftest::run(),
        Command::Evals(a) => evals(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_eval_sets(path: &Path) -> Result<(String, Vec<EvalSet>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = EvalSetsFile::from_json(&text)?;
    let sets = file.to_sets()?;
    Ok((file.game, sets))
}

fn play(a: PlayArgs) -> Result<ExitCode> {
    let game = game_by_name(&a.game)?;
    let sets = match &a.eval_sets {
        Some(path) => {
            let (name, sets) = load_eval_sets(path)?;
            ensure!(name == game.name(), "eval sets are for {name}, not {}", game.name());
            sets
        }
        None => generate_eval_sets(game, a.set + 1, a.member_a.max(a.member_b) + 1, a.seed)?,
    };
    let set = sets.get(a.set).context("no such eval set")?;
    let member = |i: usize| set.members.get(i).cloned().context("no such eval set member");
    let budget = a.budget.or_default();
    let spec = MatchSpec {
        game,
        config_a: SearchConfig::preset(a.variant).with_budget(budget),
        config_b: SearchConfig::preset(a.opponent).with_budget(budget),
        eval_a: member(a.member_a)?,
        eval_b: member(a.member_b)?,
        seat_a: match a.seat {
            Seat::First => Player::First,
            Seat::Second => Player::Second,
        },
        seed: a.seed,
    };
    let (result, moves) = play_match_logged(&spec)?;
    match a.format {
        PlayFormat::Json => {
            let value = serde_json::json!({ "result": result, "moves": moves });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        PlayFormat::Text => {
            println!("ply\tside\tmove\titers\texpanded\tdepth\troot");
            for m in &moves {
                let side = if m.side == ubfm::harness::Winner::A { "A" } else { "B" };
                println!(
                    "{}\t{side}\t{}\t{}\t{}\t{}\t{}",
                    m.ply,
                    m.mv,
                    m.iterations,
                    m.nodes_expanded,
                    m.max_depth,
                    show_value(&m.root_value)
                );
            }
            println!(
                "{}: {} ({}) vs {} ({}), A seated {:?}: winner {:?}, score {} after {} moves{}",
                result.game,
                a.variant,
                result.eval_a,
                a.opponent,
                result.eval_b,
                result.seat_a,
                result.winner,
                result.score_a,
                result.move_count,
                if result.move_limit_exceeded { " (move limit)" } else { "" }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn show_value(cv: &CompletedValue) -> String {
    match cv.proved_score() {
        Some(1) => "win".into(),
        Some(-1) => "loss".into(),
        Some(_) => "draw".into(),
        None => format!("{:+.4}", cv.value),
    }
}

fn tournament(a: TournamentArgs) -> Result<ExitCode> {
    let mut config = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            TournamentConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => TournamentConfig::default(),
    };
    if let Some(budget) = a.budget.get() {
        config.budget = budget;
    }
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    if a.print_config {
        print!("{}", config.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    let mut overrides = BTreeMap::new();
    for path in &a.eval_sets {
        let (name, sets) = load_eval_sets(path)?;
        overrides.insert(name, sets);
    }
    eprintln!("running {} matches", config.expected_match_count());
    let report = run_tournament_with(&config, &overrides)?;
    let text = match a.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    emit(a.out.as_deref(), &text)?;
    eprint!("{}", report.to_table());
    for e in &report.errors {
        eprintln!("match {:?} failed: {}", e.key, e.message);
    }
    Ok(ExitCode::SUCCESS)
}

fn solve_position(game: &'static dyn Game, a: &SolveArgs) -> Result<GameState> {
    if let Some(path) = &a.diagram {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(parse_diagram(game, &text)?);
    }
    let mut state = game.initial_state();
    for token in a.moves.iter().flat_map(|m| m.split(',')).map(str::trim).filter(|t| !t.is_empty()) {
        let mv = match token {
            "pass" => Move::PASS,
            t => Move(t.parse().with_context(|| format!("bad move `{t}`"))?),
        };
        state = game.apply(&state, mv)?;
    }
    Ok(state)
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let game = game_by_name(&a.game)?;
    let state = solve_position(game, &a)?;
    print!("{}", print_diagram(game, &state));
    let mut oracle = Oracle::new(game);
    let r = oracle.solve(&state)?;
    let moves = if a.all && !r.optimal_moves.is_empty() {
        oracle.optimal_move_set(&state)?
    } else {
        r.optimal_moves
    };
    let list: Vec<String> = moves.iter().map(Move::to_string).collect();
    println!("value {}", r.value);
    println!("optimal moves {}", list.join(","));
    println!("nodes visited {}", oracle.nodes_visited());
    Ok(ExitCode::SUCCESS)
}

fn trace(a: TraceArgs) -> Result<ExitCode> {
    let game = game_by_name(&a.game)?;
    let (state, eval) = seeded_setup(game, a.seed, a.injective_eval);
    let config = SearchConfig {
        use_tt: !a.no_tt,
        completion: !a.no_completion,
        tie_break: match a.ties {
            Ties::First => TieBreak::FirstChild,
            Ties::Random => TieBreak::SeededRandom(a.seed),
        },
        rng_seed: a.seed,
        ..SearchConfig::default().with_budget(a.budget.or_default())
    };
    let t = trace_backprop(game, state, &eval, config)?;
    if a.logs {
        for (name, log) in [("full", &t.full), ("kc", &t.kc)] {
            println!("# {name}");
            for r in log {
                println!("{r}");
            }
        }
    }
    print!("{t}");
    Ok(ExitCode::SUCCESS)
}

fn evals(a: EvalsArgs) -> Result<ExitCode> {
    let game = game_by_name(&a.game)?;
    if a.members < 2 || a.sets == 0 {
        bail!("need at least one set of two members");
    }
    let sets = generate_eval_sets(game, a.sets, a.members, a.seed)?;
    let mut text = EvalSetsFile::from_sets(game, a.seed, &sets).to_json();
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}
