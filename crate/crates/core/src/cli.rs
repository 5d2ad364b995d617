//! Command implementations behind the `secgame` binary.
//!
//! Every command prints a human-readable summary on stdout. With
//! `--out DIR` it also writes CSV files and a `manifest.json` echoing the
//! configuration, so a run can be repeated byte for byte.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 numerical
//! non-convergence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::coop::{should_cooperate, should_respond_collectively};
use crate::engine::{evaluate_profile, evaluate_profile_traced, EngineConfig, ProfileKey, RunResult, GENERATOR};
use crate::error::{Error, Result};
use crate::fixture;
use crate::game::{validate_spec, Game, GameSpec, Player};
use crate::iif::{
    embed_strategy, iif_matrix, marginal_transition_matrix, occurrence_ratios, perceived_ratios, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use crate::io::{self, RunManifest};
use crate::ploy::{assess_response, select_offer, Assessment};
use crate::sensor::{derive_error_rows, perception_distribution, SignatureFile};
use crate::strategy::{
    aggression_profile, apply_skill, default_levels, epsilon_nosp, sweep, NospResult, SkillLevel, SkillProfile,
    SweepResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Published prescriptions `(admin, user)` per skill, shown for comparison.
pub const REFERENCE_PRESCRIPTIONS: [(SkillLevel, (usize, usize)); 3] = [
    (SkillLevel::BelowAverage, (7, 2)),
    (SkillLevel::Average, (8, 6)),
    (SkillLevel::AboveAverage, (4, 1)),
];

#[derive(Debug, Parser)]
#[command(name = "secgame", version, about = "Stochastic security game analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perception distribution of a sensor reading over state signatures.
    Classify(ClassifyArgs),
    /// Check a game file and report warnings and violations.
    Validate(SpecArgs),
    /// Write the bundled five-state game file.
    Fixture {
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Information sets and extended action sets of every state.
    Infosets(SpecArgs),
    /// Evaluate one aggression profile.
    Simulate(SimulateArgs),
    /// Evaluate the full aggression grid.
    Sweep(SweepArgs),
    /// ε-neighborhood optimal strategy profiles of a sweep.
    Nosp(NospArgs),
    /// Occurrence ratios, perceived ratios and the imperfect information factor.
    Iif(IifArgs),
    /// Choose a honeypot offer from a preference pool.
    Ploy(PloyArgs),
    /// Cooperation and collective-response decisions.
    Coop(CoopArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Game file (JSON); the bundled five-state game when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Attacker skill applied to contested transitions.
    #[arg(long)]
    pub skill: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per strategy profile.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Horizon threshold θ; runs stop once β^t < θ.
    #[arg(long, default_value_t = crate::engine::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = crate::engine::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Signature file with `signatures` and optional `reading` / `labelled_readings`.
    #[arg(long)]
    pub signatures: PathBuf,
    /// Comma-separated reading; overrides the file's `reading`.
    #[arg(long)]
    pub reading: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 0.0)]
    pub admin_level: f64,
    #[arg(long, default_value_t = 0.0)]
    pub user_level: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every step of every run.
    #[arg(long)]
    pub trajectories: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Number of evenly spaced levels, or a comma-separated list.
    #[arg(long, default_value = "10")]
    pub levels: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trajectories: bool,
    /// Evaluate cells on one thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args)]
pub struct NospArgs {
    /// Sweep CSV to analyze; a live sweep is run when omitted.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[command(flatten)]
    pub live: SweepArgs,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct IifArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub skill: Option<String>,
    /// Sensor whose factor is computed.
    #[arg(long, default_value = "admin")]
    pub player: String,
    #[arg(long, default_value_t = 0.0)]
    pub admin_level: f64,
    #[arg(long, default_value_t = 0.0)]
    pub user_level: f64,
    /// Start state key; the game's start state when omitted.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PloyArgs {
    /// CSV with columns `action,probability,nash`.
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub min_size: usize,
    /// Largest offer; the pool size when omitted.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Action the user took, to assess against the offer.
    #[arg(long)]
    pub taken: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoopArgs {
    /// CSV with columns `kind,name,variant,reward`.
    #[arg(long)]
    pub input: PathBuf,
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Runs a command and returns its stdout text.
pub fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Classify(a) => cmd_classify(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Fixture { out } => cmd_fixture(out.as_deref()),
        Command::Infosets(a) => cmd_infosets(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a).map(|(text, _)| text),
        Command::Nosp(a) => cmd_nosp(&a),
        Command::Iif(a) => cmd_iif(&a),
        Command::Ploy(a) => cmd_ploy(&a),
        Command::Coop(a) => cmd_coop(&a),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_skill(s: Option<&str>) -> Result<Option<SkillProfile>> {
    s.map(|s| s.parse::<SkillLevel>().map(SkillProfile::of)).transpose()
}

/// Loads the game file (or the bundled game), applies the skill and
/// compiles it. Warnings go to stderr.
pub fn load_game(spec: Option<&Path>, skill: Option<&SkillProfile>) -> Result<Game> {
    let mut parsed = match spec {
        Some(p) => GameSpec::from_json(&read_text(p)?).map_err(|e| match e {
            Error::Json(j) => Error::Parse(format!("{}: {j}", p.display())),
            other => other,
        })?,
        None => fixture::five_state_spec(),
    };
    if let Some(s) = skill {
        parsed = apply_skill(&parsed, s)?;
    }
    let (game, report) = Game::compile(parsed)?;
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(game)
}

/// Aggression levels from `N` (count) or `a,b,c` (explicit list).
pub fn parse_levels(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        if n == 0 {
            return Err(Error::invalid("--levels needs at least one level"));
        }
        return Ok(default_levels(n));
    }
    let levels: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad level `{x}`"))))
        .collect::<Result<_>>()?;
    if let Some(bad) = levels.iter().find(|a| !(0.0..1.0).contains(*a)) {
        return Err(Error::invalid(format!("level {bad} not in [0, 1)")));
    }
    Ok(levels)
}

fn engine_config(game: &Game, a: &GameArgs) -> Result<EngineConfig> {
    let cfg = EngineConfig {
        discount: game.discount(),
        horizon_threshold: a.threshold,
        max_steps: a.max_steps,
        base_seed: a.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn config_json(game: &Game, a: &GameArgs, cfg: &EngineConfig) -> Result<serde_json::Value> {
    Ok(json!({
        "discount": cfg.discount,
        "horizon_threshold": cfg.horizon_threshold,
        "horizon": cfg.step_cap()?,
        "max_steps": cfg.max_steps,
        "seed": cfg.base_seed,
        "generator": GENERATOR,
        "runs": a.runs,
        "skill": a.skill.as_deref().map(|s| s.parse::<SkillLevel>().map(|l| l.to_string())).transpose()?,
        "game": game.spec().name,
    }))
}

fn spec_path(a: &SpecArgs) -> Option<String> {
    a.spec.as_ref().map(|p| p.display().to_string())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs) -> Result<String> {
    let file: SignatureFile = serde_json::from_str(&read_text(&a.signatures)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", a.signatures.display())))?;
    let reading = match &a.reading {
        Some(r) => Some(crate::sensor::SensorReading(
            r.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad reading component `{x}`"))))
                .collect::<Result<_>>()?,
        )),
        None => file.reading.clone(),
    };
    if reading.is_none() && file.labelled_readings.is_none() {
        return Err(Error::invalid("no reading given (use --reading or a `reading` entry)"));
    }
    let labels: Vec<String> = file.signatures.iter().map(|s| s.state.clone()).collect();
    let mut text = String::new();
    let mut manifest = RunManifest::new(
        "classify",
        Some(a.signatures.display().to_string()),
        json!({ "reading": reading.as_ref().map(|r| r.0.clone()) }),
    );
    if let Some(out) = &a.out {
        ensure_dir(out)?;
    }
    if let Some(r) = &reading {
        let p = perception_distribution(&file.signatures, r)?;
        writeln!(text, "state,probability").unwrap();
        for (s, x) in labels.iter().zip(&p) {
            writeln!(text, "{s},{x}").unwrap();
        }
        if let Some(out) = &a.out {
            let mut w = io::create_csv(&out.join("perception.csv"))?;
            io::write_matrix(&mut w, "reading", &["reading".to_string()], &labels, &[p])?;
            manifest.outputs.push("perception.csv".into());
        }
    }
    if let Some(lr) = &file.labelled_readings {
        let rows = derive_error_rows(&file.signatures, lr)?;
        writeln!(text, "error rows (true state → perceived):").unwrap();
        for (s, row) in labels.iter().zip(&rows) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(text, "{s}: {}", cells.join(" ")).unwrap();
        }
        if let Some(out) = &a.out {
            let mut w = io::create_csv(&out.join("error_rows.csv"))?;
            io::write_matrix(&mut w, "true_state", &labels, &labels, &rows)?;
            manifest.outputs.push("error_rows.csv".into());
        }
    }
    if let Some(out) = &a.out {
        manifest.write(out)?;
    }
    Ok(text)
}

fn cmd_validate(a: &SpecArgs) -> Result<String> {
    let spec = match &a.spec {
        Some(p) => GameSpec::from_json(&read_text(p)?)?,
        None => fixture::five_state_spec(),
    };
    let report = validate_spec(&spec);
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report));
    }
    let mut text = String::new();
    for w in report.warnings() {
        writeln!(text, "warning: {w}").unwrap();
    }
    writeln!(
        text,
        "ok: `{}` with {} states, {} actions, {} transition entries",
        spec.name,
        spec.states.len(),
        spec.actions.len(),
        spec.transitions.len()
    )
    .unwrap();
    Ok(text)
}

fn cmd_fixture(out: Option<&Path>) -> Result<String> {
    let json = fixture::build_five_state_spec().to_json();
    match out {
        Some(p) => {
            std::fs::write(p, json)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(json),
    }
}

fn cmd_infosets(a: &SpecArgs) -> Result<String> {
    let game = load_game(a.spec.as_deref(), None)?;
    let mut text = String::new();
    for p in Player::ALL {
        for s in game.states() {
            let info: Vec<&str> = game.information_set(p, s)?.into_iter().map(|t| game.state_key(t)).collect();
            let ext = game.extended_action_set(p, s)?;
            writeln!(
                text,
                "{p} at {}: information set {{{}}}, {} allowed, {} attemptable, sensor error {:.4}",
                game.state_key(s),
                info.join(", "),
                game.allowed(p, s).len(),
                ext.len(),
                game.sensor_error(p, s)?,
            )
            .unwrap();
        }
    }
    Ok(text)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<String> {
    let skill = parse_skill(a.game.skill.as_deref())?;
    let game = load_game(a.game.spec.spec.as_deref(), skill.as_ref())?;
    let cfg = engine_config(&game, &a.game)?;
    let profile = aggression_profile(&game, a.admin_level, a.user_level)?;
    let key = ProfileKey::default();
    let (stats, runs) = if a.trajectories {
        let (s, r) = evaluate_profile_traced(&game, &profile, key, a.game.runs, &cfg)?;
        (s, Some(r))
    } else {
        (evaluate_profile(&game, &profile, key, a.game.runs, &cfg)?, None)
    };
    let mut text = String::new();
    writeln!(text, "profile admin={} user={} runs={} horizon={}", a.admin_level, a.user_level, a.game.runs, cfg.step_cap()?)
        .unwrap();
    for p in Player::ALL {
        let s = stats.get(p);
        writeln!(text, "{p}: mean {:.6} sigma {:.6}", s.mean, s.sigma).unwrap();
    }
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        let mut config = config_json(&game, &a.game, &cfg)?;
        config["admin_level"] = json!(a.admin_level);
        config["user_level"] = json!(a.user_level);
        let mut m = RunManifest::new("simulate", spec_path(&a.game.spec), config);
        let mut w = io::create_csv(&out.join("returns.csv"))?;
        let single = SweepResult { levels: vec![a.admin_level], n_runs: a.game.runs, config: cfg, cells: vec![stats] };
        io::write_returns(&mut w, &single)?;
        m.outputs.push("returns.csv".into());
        if let Some(r) = runs {
            let mut w = io::create_csv(&out.join("trajectories.csv"))?;
            io::write_trajectories(&mut w, &game, &[((0, 0), r)])?;
            m.outputs.push("trajectories.csv".into());
        }
        m.write(out)?;
    }
    Ok(text)
}

fn grid_summary(s: &SweepResult, player: Player) -> String {
    let mut text = format!("{player} mean return (rows: admin level, columns: user level)\n");
    for row in s.means(player) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.2}")).collect();
        writeln!(text, "{}", cells.join("")).unwrap();
    }
    text
}

fn run_sweep(a: &SweepArgs) -> Result<(Game, EngineConfig, SweepResult)> {
    let skill = parse_skill(a.game.skill.as_deref())?;
    let game = load_game(a.game.spec.spec.as_deref(), skill.as_ref())?;
    let cfg = engine_config(&game, &a.game)?;
    let levels = parse_levels(&a.levels)?;
    let result = sweep(&game, &levels, a.game.runs, &cfg, !a.serial)?;
    Ok((game, cfg, result))
}

fn cmd_sweep(a: &SweepArgs) -> Result<(String, SweepResult)> {
    let (game, cfg, result) = run_sweep(a)?;
    let mut text = grid_summary(&result, Player::Admin);
    text.push_str(&grid_summary(&result, Player::User));
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        write_sweep_outputs(out, &game, a, &cfg, &result)?;
        writeln!(text, "wrote {}", out.display()).unwrap();
    }
    Ok((text, result))
}

fn write_sweep_outputs(out: &Path, game: &Game, a: &SweepArgs, cfg: &EngineConfig, result: &SweepResult) -> Result<RunManifest> {
    let mut config = config_json(game, &a.game, cfg)?;
    config["levels"] = json!(result.levels);
    config["parallel"] = json!(!a.serial);
    let mut m = RunManifest::new("sweep", spec_path(&a.game.spec), config);
    let mut w = io::create_csv(&out.join("sweep.csv"))?;
    io::write_sweep(&mut w, result)?;
    m.outputs.push("sweep.csv".into());
    let mut w = io::create_csv(&out.join("returns.csv"))?;
    io::write_returns(&mut w, result)?;
    m.outputs.push("returns.csv".into());
    if a.trajectories {
        let n = result.size();
        let runs: Vec<((usize, usize), Vec<RunResult>)> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let key = ProfileKey { admin: k / n, user: k % n };
                let profile = aggression_profile(game, result.levels[key.admin], result.levels[key.user])?;
                let (_, runs) = evaluate_profile_traced(game, &profile, key, result.n_runs, cfg)?;
                Ok(((key.admin, key.user), runs))
            })
            .collect::<Result<_>>()?;
        let mut w = io::create_csv(&out.join("trajectories.csv"))?;
        io::write_trajectories(&mut w, game, &runs)?;
        m.outputs.push("trajectories.csv".into());
    }
    m.write(out)?;
    Ok(m)
}

fn nosp_report(r: &NospResult, skill: Option<SkillLevel>) -> String {
    let mut text = String::new();
    let members: Vec<String> = r.members.iter().map(|(i, j)| format!("({i},{j})")).collect();
    writeln!(text, "epsilon {}: {} member(s) {}", r.epsilon, r.members.len(), members.join(" ")).unwrap();
    match r.prescribed {
        Some((i, j)) => {
            let gain = r.cell(i, j).user_dev.gain;
            writeln!(text, "prescribed (admin, user) = ({i},{j}), attacker deviation gain {gain:.6}").unwrap();
        }
        None => writeln!(text, "no prescription: empty set").unwrap(),
    }
    writeln!(text, "attacker deviation gain per member:").unwrap();
    for &(i, j) in &r.members {
        writeln!(text, "  ({i},{j}) {:.6}", r.cell(i, j).user_dev.gain).unwrap();
    }
    for (level, pair) in REFERENCE_PRESCRIPTIONS {
        if skill.is_none_or(|s| s == level) {
            writeln!(text, "reference prescription for {level}: {pair:?}").unwrap();
        }
    }
    text
}

fn cmd_nosp(a: &NospArgs) -> Result<String> {
    let skill = a.live.game.skill.as_deref().map(str::parse::<SkillLevel>).transpose()?;
    let (result, live) = match &a.sweep {
        Some(p) => (io::read_sweep(std::fs::File::open(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?)?, None),
        None => {
            let (game, cfg, r) = run_sweep(&a.live)?;
            (r.clone(), Some((game, cfg, r)))
        }
    };
    let nosp = epsilon_nosp(&result, a.epsilon)?;
    let text = nosp_report(&nosp, skill);
    if let Some(out) = &a.live.out {
        ensure_dir(out)?;
        let mut m = match &live {
            Some((game, cfg, r)) => write_sweep_outputs(out, game, &a.live, cfg, r)?,
            None => RunManifest::new("nosp", None, json!({ "sweep": a.sweep.as_ref().map(|p| p.display().to_string()) })),
        };
        m.command = "nosp".into();
        m.config["epsilon"] = json!(a.epsilon);
        let mut w = io::create_csv(&out.join("nosp.csv"))?;
        io::write_nosp(&mut w, &nosp)?;
        m.outputs.push("nosp.csv".into());
        m.write(out)?;
    }
    Ok(text)
}

fn cmd_iif(a: &IifArgs) -> Result<String> {
    let skill = parse_skill(a.skill.as_deref())?;
    let game = load_game(a.spec.spec.as_deref(), skill.as_ref())?;
    let player: Player = a.player.parse()?;
    let profile = aggression_profile(&game, a.admin_level, a.user_level)?;
    let start = match &a.start {
        Some(k) => game.state(k)?,
        None => game.start_state(),
    };
    let p = marginal_transition_matrix(&game, &profile)?;
    let r = occurrence_ratios(&p, start.0, a.tol, a.max_iter)?;
    let e = game.error_rows(player);
    let rp = perceived_ratios(e, &r.r)?;
    let z = iif_matrix(e, &r.r)?;
    let labels: Vec<String> = game.states().map(|s| game.state_key(s).to_string()).collect();

    let mut text = String::new();
    writeln!(text, "state,occurrence,perceived").unwrap();
    for (k, l) in labels.iter().enumerate() {
        writeln!(text, "{l},{},{}", r.r[k], rp.r_prime[k]).unwrap();
    }
    writeln!(text, "iif ({player} sensor; rows perceived, columns true) after {} iterations", r.iterations).unwrap();
    for (k, row) in z.z.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
        let flag = if z.flagged[k] { " (never perceived)" } else { "" };
        writeln!(text, "{}: {}{flag}", labels[k], cells.join(" ")).unwrap();
    }
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        let mut m = RunManifest::new(
            "iif",
            spec_path(&a.spec),
            json!({
                "player": player.to_string(),
                "admin_level": a.admin_level,
                "user_level": a.user_level,
                "start": game.state_key(start),
                "tol": a.tol,
                "max_iter": a.max_iter,
                "iterations": r.iterations,
                "skill": skill.map(|s| s.level.to_string()),
                "flagged": z.flagged,
            }),
        );
        let one = vec!["value".to_string()];
        let mut w = io::create_csv(&out.join("occurrence.csv"))?;
        io::write_matrix(&mut w, "ratio", &one, &labels, std::slice::from_ref(&r.r))?;
        let mut w = io::create_csv(&out.join("perceived.csv"))?;
        io::write_matrix(&mut w, "ratio", &one, &labels, std::slice::from_ref(&rp.r_prime))?;
        let mut w = io::create_csv(&out.join("iif.csv"))?;
        io::write_matrix(&mut w, "perceived", &labels, &labels, &z.z)?;
        let emb = embed_strategy(&game, player, profile.get(player))?;
        let perceived = crate::iif::apply_iif(&z, &emb)?;
        let actions: Vec<String> = game.player_actions(player).iter().map(|&id| game.action(id).id.clone()).collect();
        let mut w = io::create_csv(&out.join("perceived_strategy.csv"))?;
        io::write_matrix(&mut w, "perceived", &labels, &actions, &perceived)?;
        m.outputs.extend(["occurrence.csv", "perceived.csv", "iif.csv", "perceived_strategy.csv"].map(String::from));
        m.write(out)?;
    }
    Ok(text)
}

fn cmd_ploy(a: &PloyArgs) -> Result<String> {
    let pool = io::read_ploy_pool(std::fs::File::open(&a.pool).map_err(|e| Error::Parse(format!("{}: {e}", a.pool.display())))?)?;
    let max = a.max_size.unwrap_or(pool.actions.len());
    let offer = select_offer(&pool, a.min_size, max)?;
    let mut text = String::new();
    let regime = serde_json::to_value(offer.regime)?;
    writeln!(text, "offer ({} actions, {} search):", offer.size(), regime.as_str().unwrap_or_default()).unwrap();
    for act in &offer.actions {
        let mark = if act.id == offer.nash_action { " *" } else { "" };
        writeln!(text, "  {} {:.6}{mark}", act.id, act.p).unwrap();
    }
    writeln!(text, "gap {:.6e}", offer.gap).unwrap();
    writeln!(text, "entropy {:.6} bits", offer.entropy).unwrap();
    if let Some(t) = &a.taken {
        match assess_response(&offer, t)? {
            Assessment::ConfirmsBelief => writeln!(text, "response `{t}` confirms the belief").unwrap(),
            Assessment::Deviation { action, rank } => {
                writeln!(text, "response `{action}` deviates: alternative of preference rank {rank}").unwrap()
            }
        }
    }
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        let mut m = RunManifest::new(
            "ploy",
            Some(a.pool.display().to_string()),
            json!({ "min_size": a.min_size, "max_size": max, "regime": regime, "gap": offer.gap, "entropy": offer.entropy }),
        );
        let ids: Vec<String> = offer.actions.iter().map(|x| x.id.clone()).collect();
        let probs: Vec<f64> = offer.actions.iter().map(|x| x.p).collect();
        let mut w = io::create_csv(&out.join("offer.csv"))?;
        io::write_matrix(&mut w, "offer", &["probability".to_string()], &ids, &[probs])?;
        m.outputs.push("offer.csv".into());
        m.write(out)?;
    }
    Ok(text)
}

fn cmd_coop(a: &CoopArgs) -> Result<String> {
    let input = io::read_coop(std::fs::File::open(&a.input).map_err(|e| Error::Parse(format!("{}: {e}", a.input.display())))?)?;
    if input.users.is_empty() && input.individual.is_empty() {
        return Err(Error::invalid("coop input has no user or game rows"));
    }
    let mut text = String::new();
    if !input.users.is_empty() {
        let d = should_cooperate(&input.users)?;
        writeln!(text, "{}", if d.cooperate { "cooperate" } else { "no cooperation" }).unwrap();
        for (u, m) in input.users.iter().zip(&d.margins) {
            writeln!(text, "  {} margin {m}", u.player).unwrap();
        }
    }
    if !input.individual.is_empty() {
        let d = should_respond_collectively(&input.individual, &input.common)?;
        writeln!(text, "{} (margin {})", if d.collective { "collective response" } else { "individual responses" }, d.margin)
            .unwrap();
    }
    Ok(text)
}
