//! CSV and manifest output.
//!
//! Every CSV starts with a `# manifest=<file>` comment line naming the
//! manifest written by the same invocation. Floats use 17 significant
//! digits so they round-trip exactly. Readers skip `#` lines.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coop::RewardTrajectory;
use crate::engine::{EngineConfig, ProfileStats, RewardStats, RunResult};
use crate::error::{Error, Result};
use crate::game::{Game, Player};
use crate::ploy::PloyPool;
use crate::strategy::{NospResult, SweepResult};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub spec: Option<String>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, spec: Option<String>, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }
}

/// CSV writer that has already emitted the manifest comment line.
pub fn csv_writer<W: Write>(mut out: W) -> Result<csv::Writer<W>> {
    writeln!(out, "# manifest={MANIFEST_FILE}")?;
    Ok(csv::WriterBuilder::new().from_writer(out))
}

pub fn create_csv(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    csv_writer(BufWriter::new(File::create(path)?))
}

pub fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input)
}

fn parse_f64(field: &str, what: &str, line: u64) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} `{field}`")))
}

fn parse_usize(field: &str, what: &str, line: u64) -> Result<usize> {
    field.parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} `{field}`")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

const SWEEP_HEADER: [&str; 9] = [
    "admin_idx", "user_idx", "admin_level", "user_level", "n_runs", "admin_mean", "admin_sigma", "user_mean",
    "user_sigma",
];

pub fn write_sweep<W: Write>(w: &mut csv::Writer<W>, sweep: &SweepResult) -> Result<()> {
    w.write_record(SWEEP_HEADER)?;
    let n = sweep.size();
    for i in 0..n {
        for j in 0..n {
            let c = sweep.cell(i, j);
            w.write_record([
                i.to_string(),
                j.to_string(),
                fmt_f64(sweep.levels[i]),
                fmt_f64(sweep.levels[j]),
                c.admin.n.to_string(),
                fmt_f64(c.admin.mean),
                fmt_f64(c.admin.sigma),
                fmt_f64(c.user.mean),
                fmt_f64(c.user.sigma),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a sweep grid back. Per-run returns are not part of the file.
pub fn read_sweep<R: Read>(input: R) -> Result<SweepResult> {
    let mut rdr = csv_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != SWEEP_HEADER {
        return Err(Error::Parse(format!("unexpected sweep header: {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut cells: BTreeMap<(usize, usize), (f64, f64, ProfileStats)> = BTreeMap::new();
    let mut n_runs = 0;
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let i = parse_usize(&rec[0], "admin_idx", line)?;
        let j = parse_usize(&rec[1], "user_idx", line)?;
        let la = parse_f64(&rec[2], "admin_level", line)?;
        let lu = parse_f64(&rec[3], "user_level", line)?;
        n_runs = parse_usize(&rec[4], "n_runs", line)?;
        let stats = ProfileStats {
            admin: RewardStats::summary(parse_f64(&rec[5], "admin_mean", line)?, parse_f64(&rec[6], "admin_sigma", line)?, n_runs),
            user: RewardStats::summary(parse_f64(&rec[7], "user_mean", line)?, parse_f64(&rec[8], "user_sigma", line)?, n_runs),
        };
        if cells.insert((i, j), (la, lu, stats)).is_some() {
            return Err(Error::invalid(format!("line {line}: duplicate cell ({i}, {j})")));
        }
    }
    let n = (cells.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != cells.len() || cells.keys().any(|&(i, j)| i >= n || j >= n) {
        return Err(Error::invalid(format!("incomplete sweep grid: {} cells", cells.len())));
    }
    let levels: Vec<f64> = (0..n).map(|i| cells[&(i, 0)].0).collect();
    let cells = cells.into_values().map(|(_, _, s)| s).collect();
    Ok(SweepResult { levels, n_runs, config: EngineConfig::default(), cells })
}

pub fn write_returns<W: Write>(w: &mut csv::Writer<W>, sweep: &SweepResult) -> Result<()> {
    w.write_record(["admin_idx", "user_idx", "run", "admin_return", "user_return"])?;
    let n = sweep.size();
    for i in 0..n {
        for j in 0..n {
            let c = sweep.cell(i, j);
            for (run, (a, u)) in c.admin.returns.iter().zip(&c.user.returns).enumerate() {
                w.write_record([i.to_string(), j.to_string(), run.to_string(), fmt_f64(*a), fmt_f64(*u)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_nosp<W: Write>(w: &mut csv::Writer<W>, nosp: &NospResult) -> Result<()> {
    w.write_record(["admin_idx", "user_idx", "member", "admin_ratio", "admin_gain", "user_ratio", "user_gain"])?;
    for c in &nosp.cells {
        w.write_record([
            c.admin.to_string(),
            c.user.to_string(),
            u8::from(c.member).to_string(),
            fmt_f64(c.admin_dev.ratio),
            fmt_f64(c.admin_dev.gain),
            fmt_f64(c.user_dev.ratio),
            fmt_f64(c.user_dev.gain),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per step of every run, labelled with the grid cell and run.
pub fn write_trajectories<W: Write>(
    w: &mut csv::Writer<W>,
    game: &Game,
    runs: &[((usize, usize), Vec<RunResult>)],
) -> Result<()> {
    w.write_record([
        "admin_idx", "user_idx", "run", "seed", "t", "state", "admin_perceived", "admin_chosen", "admin_effective",
        "admin_reward", "user_perceived", "user_chosen", "user_effective", "user_reward", "next_state", "weight",
    ])?;
    for ((i, j), results) in runs {
        for (run, r) in results.iter().enumerate() {
            for step in &r.trajectory {
                let mut rec = vec![
                    i.to_string(),
                    j.to_string(),
                    run.to_string(),
                    r.seed.to_string(),
                    step.t.to_string(),
                    game.state_key(step.true_state).to_string(),
                ];
                for p in Player::ALL {
                    let s = &step.players[p.index()];
                    rec.push(game.state_key(s.perceived).to_string());
                    rec.push(game.action(s.chosen).id.clone());
                    rec.push(game.action(s.effective).id.clone());
                    rec.push(fmt_f64(s.scalar));
                }
                rec.push(game.state_key(step.next_state).to_string());
                rec.push(fmt_f64(step.weight));
                w.write_record(rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Labelled matrix; `row_header` names the first column.
pub fn write_matrix<W: Write>(
    w: &mut csv::Writer<W>,
    row_header: &str,
    rows: &[String],
    cols: &[String],
    m: &[Vec<f64>],
) -> Result<()> {
    let mut head = vec![row_header.to_string()];
    head.extend(cols.iter().cloned());
    w.write_record(&head)?;
    for (label, row) in rows.iter().zip(m) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|&x| fmt_f64(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Pool file with columns `action,probability,nash`; `nash` is 1 on
/// exactly one row. Probabilities are normalized on load.
pub fn read_ploy_pool<R: Read>(input: R) -> Result<PloyPool> {
    let mut rdr = csv_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["action", "probability", "nash"] {
        return Err(Error::Parse("pool header must be `action,probability,nash`".into()));
    }
    let mut weights = Vec::new();
    let mut nash = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let p = parse_f64(&rec[1], "probability", line)?;
        match &rec[2] {
            "1" | "true" => nash.push(rec[0].to_string()),
            "0" | "false" | "" => {}
            other => return Err(Error::Parse(format!("line {line}: bad nash flag `{other}`"))),
        }
        weights.push((rec[0].to_string(), p));
    }
    if nash.len() != 1 {
        return Err(Error::invalid(format!("pool must flag exactly one nash action, found {}", nash.len())));
    }
    PloyPool::from_weights(weights, nash.remove(0))
}

/// Inputs for the multi-user predicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoopInput {
    pub users: Vec<RewardTrajectory>,
    pub individual: Vec<f64>,
    pub common: Vec<f64>,
}

/// Long-format file with columns `kind,name,variant,reward`.
///
/// `kind = user` rows carry per-state rewards with variant `solo` or
/// `coop`, in window order. `kind = game` rows carry one administrator
/// reward per game with variant `individual` or `common`.
pub fn read_coop<R: Read>(input: R) -> Result<CoopInput> {
    let mut rdr = csv_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["kind", "name", "variant", "reward"] {
        return Err(Error::Parse("coop header must be `kind,name,variant,reward`".into()));
    }
    let mut users: Vec<RewardTrajectory> = Vec::new();
    let mut games: Vec<(String, Option<f64>, Option<f64>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let name = rec[1].to_string();
        let x = parse_f64(&rec[3], "reward", line)?;
        match (&rec[0], &rec[2]) {
            ("user", variant @ ("solo" | "coop")) => {
                let k = match users.iter().position(|u| u.player == name) {
                    Some(k) => k,
                    None => {
                        users.push(RewardTrajectory::new(name, Vec::new(), Vec::new()));
                        users.len() - 1
                    }
                };
                if variant == "solo" {
                    users[k].solo.push(x);
                } else {
                    users[k].coop.push(x);
                }
            }
            ("game", variant @ ("individual" | "common")) => {
                let k = match games.iter().position(|g| g.0 == name) {
                    Some(k) => k,
                    None => {
                        games.push((name, None, None));
                        games.len() - 1
                    }
                };
                let slot = if variant == "individual" { &mut games[k].1 } else { &mut games[k].2 };
                *slot = Some(slot.unwrap_or(0.0) + x);
            }
            (kind, variant) => {
                return Err(Error::Parse(format!("line {line}: unknown kind/variant `{kind}`/`{variant}`")));
            }
        }
    }
    let mut out = CoopInput { users, ..CoopInput::default() };
    for (name, ind, com) in games {
        match (ind, com) {
            (Some(a), Some(b)) => {
                out.individual.push(a);
                out.common.push(b);
            }
            _ => return Err(Error::invalid(format!("game `{name}` needs both individual and common rewards"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{default_levels, epsilon_nosp};

    fn tiny_sweep() -> SweepResult {
        let cells = (0..4)
            .map(|k| ProfileStats {
                admin: RewardStats::from_returns(vec![k as f64, 0.1 + k as f64]),
                user: RewardStats::from_returns(vec![-(k as f64), 1.0 / 3.0]),
            })
            .collect();
        SweepResult { levels: default_levels(2), n_runs: 2, config: EngineConfig::default(), cells }
    }

    fn to_string(f: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> String {
        let mut w = csv_writer(Vec::new()).unwrap();
        f(&mut w).unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_round_trip() {
        let s = tiny_sweep();
        let text = to_string(|w| write_sweep(w, &s));
        assert!(text.starts_with("# manifest=manifest.json\n"));
        let back = read_sweep(text.as_bytes()).unwrap();
        assert_eq!(back.levels, s.levels);
        for (a, b) in back.cells.iter().zip(&s.cells) {
            assert_eq!((a.admin.mean, a.admin.sigma), (b.admin.mean, b.admin.sigma));
            assert_eq!((a.user.mean, a.user.sigma), (b.user.mean, b.user.sigma));
        }
        assert_eq!(epsilon_nosp(&back, 0.1).unwrap(), epsilon_nosp(&s, 0.1).unwrap());
    }

    #[test]
    fn incomplete_grid_rejected() {
        let s = tiny_sweep();
        let text = to_string(|w| write_sweep(w, &s));
        let cut: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(read_sweep(cut.as_bytes()).is_err());
        assert!(read_sweep("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn pool_file() {
        let p = read_ploy_pool("# pool\naction,probability,nash\nx,2,0\ny,1,1\nz,1,0\n".as_bytes()).unwrap();
        assert_eq!(p.nash_action, "y");
        assert_eq!(p.actions[0].p, 0.5);
        assert!(read_ploy_pool("action,probability,nash\nx,1,0\ny,1,0\n".as_bytes()).is_err());
        assert!(read_ploy_pool("action,probability,nash\nx,abc,1\ny,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn coop_file() {
        let text = "kind,name,variant,reward\n\
                    user,a,solo,20\nuser,a,solo,30\nuser,a,coop,60\nuser,a,coop,0\n\
                    user,b,solo,10\nuser,b,coop,12\n\
                    game,g1,individual,30\ngame,g1,common,35\ngame,g2,individual,40\ngame,g2,common,45\n";
        let c = read_coop(text.as_bytes()).unwrap();
        assert_eq!(c.users.len(), 2);
        assert_eq!(c.users[0].solo, vec![20.0, 30.0]);
        assert_eq!(c.individual, vec![30.0, 40.0]);
        assert_eq!(c.common, vec![35.0, 45.0]);
        assert!(read_coop("kind,name,variant,reward\nuser,a,alone,1\n".as_bytes()).is_err());
        assert!(read_coop("kind,name,variant,reward\ngame,g,common,1\n".as_bytes()).is_err());
    }
}
