//! Acceptance suite: one PASS/FAIL line per criterion, each with its
//! tolerance and runtime bound. Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secgame::coop::{should_cooperate, should_respond_collectively, RewardTrajectory};
use secgame::engine::{
    evaluate_profile, horizon, play_step, EngineConfig, MixedStrategy, ProfileKey, StrategyProfile,
};
use secgame::fixture;
use secgame::iif::{iif_matrix, occurrence_ratios, DEFAULT_MAX_ITER, DEFAULT_TOL};
use secgame::io;
use secgame::ploy::{entropy_bits, equiprobability_gap, select_offer, PloyPool, TIE_TOLERANCE};
use secgame::reward::RewardVector;
use secgame::sensor::{perception_distribution, SensorReading, StateSignature};
use secgame::strategy::{
    apply_skill, default_levels, epsilon_nosp, pure_nash_oracle, sweep, SkillLevel, SkillProfile, SweepResult,
};
use secgame::{Game, Player, StateId};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn criterion_1() -> Outcome {
    let sigs = vec![
        StateSignature::new("Low_Privilege", vec![vec![1.0, 0.15]]),
        StateSignature::new("High_Privilege", vec![vec![2.0, 0.15]]),
    ];
    let p = perception_distribution(&sigs, &SensorReading(vec![1.7, 0.15])).map_err(|e| e.to_string())?;
    ensure((p[0] - 0.3).abs() <= 1e-9 && (p[1] - 0.7).abs() <= 1e-9, || format!("got {p:?}"))?;
    Ok(format!("Low {:.12}, High {:.12}", p[0], p[1]))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases = 10_000;
    for case in 0..cases {
        let n = rng.gen_range(2..=6);
        let dim = rng.gen_range(1..=4);
        let sigs: Vec<StateSignature> = (0..n)
            .map(|k| {
                let elems = rng.gen_range(1..=3);
                StateSignature::new(
                    format!("s{k}"),
                    (0..elems).map(|_| (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect(),
                )
            })
            .collect();
        let cv = SensorReading((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect());
        let p = perception_distribution(&sigs, &cv).map_err(|e| format!("case {case}: {e}"))?;
        ensure(p.iter().all(|&x| (0.0..=1.0).contains(&x)), || format!("case {case}: entry outside [0,1]: {p:?}"))?;
        ensure((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9, || format!("case {case}: sums to {}", p.iter().sum::<f64>()))?;

        // independent distances: minimum RMS over signature elements
        let d: Vec<f64> = sigs
            .iter()
            .map(|s| {
                s.elements
                    .iter()
                    .map(|e| (e.iter().zip(&cv.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / dim as f64).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                if d[i] < d[j] - 1e-12 {
                    ensure(p[i] >= p[j] - 1e-12, || format!("case {case}: closer state {i} less probable than {j}"))?;
                }
            }
        }

        let c = rng.gen_range(0.01..100.0);
        let scaled: Vec<StateSignature> = sigs
            .iter()
            .map(|s| StateSignature::new(s.state.clone(), s.elements.iter().map(|e| e.iter().map(|x| x * c).collect()).collect()))
            .collect();
        let q = perception_distribution(&scaled, &SensorReading(cv.0.iter().map(|x| x * c).collect()))
            .map_err(|e| e.to_string())?;
        ensure(p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-9), || format!("case {case}: scale {c} changed {p:?} to {q:?}"))?;
    }
    Ok(format!("{cases} cases valid, monotone, scale-invariant"))
}

fn random_stochastic(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(floor..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances = 1_000;
    let mut worst_row = 0.0f64;
    let mut worst_stationary = 0.0f64;
    for k in 0..instances {
        let n = rng.gen_range(2..=6);
        let p = random_stochastic(&mut rng, n, 0.01);
        // sparse error rows with a guaranteed diagonal
        let e: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let row: Vec<f64> =
                    (0..n).map(|j| if i == j || rng.gen_bool(0.5) { rng.gen_range(0.05..1.0) } else { 0.0 }).collect();
                let s: f64 = row.iter().sum();
                row.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let start = rng.gen_range(0..n);
        let r = occurrence_ratios(&p, start, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| format!("instance {k}: {e}"))?;
        for j in 0..n {
            let rp: f64 = (0..n).map(|i| r.r[i] * p[i][j]).sum();
            worst_stationary = worst_stationary.max((rp - r.r[j]).abs());
        }
        let z = iif_matrix(&e, &r.r).map_err(|e| e.to_string())?;
        for (i, row) in z.z.iter().enumerate() {
            if !z.flagged[i] {
                worst_row = worst_row.max((row.iter().sum::<f64>() - 1.0).abs());
            }
        }
        let identity: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let zi = iif_matrix(&identity, &r.r).map_err(|e| e.to_string())?;
        ensure(zi.z == identity, || format!("instance {k}: perfect sensor gave {:?}", zi.z))?;
    }
    ensure(worst_row <= 1e-9, || format!("IIF row sum off by {worst_row:e}"))?;
    ensure(worst_stationary <= 1e-8, || format!("|rP - r| = {worst_stationary:e}"))?;
    let two = occurrence_ratios(&[vec![0.9, 0.1], vec![0.2, 0.8]], 0, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
    ensure((two.r[0] - 2.0 / 3.0).abs() <= 1e-8 && (two.r[1] - 1.0 / 3.0).abs() <= 1e-8, || format!("2-state r = {:?}", two.r))?;
    Ok(format!(
        "{instances} instances; max row error {worst_row:.1e}, max |rP-r| {worst_stationary:.1e}; 2-state r = ({:.10}, {:.10})",
        two.r[0], two.r[1]
    ))
}

fn criterion_4() -> Outcome {
    let h = horizon(0.9, 1e-3).map_err(|e| e.to_string())?;
    ensure(h == 66, || format!("horizon(0.9, 1e-3) = {h}"))?;
    let game = common::toy_game();
    let cfg = EngineConfig::for_game(&game).with_seed(4);
    let cap = cfg.step_cap().map_err(|e| e.to_string())?;
    ensure(cap == 66, || format!("step cap {cap}"))?;
    let profile = StrategyProfile {
        admin: common::to_mixed(&game, Player::Admin, &common::ADMIN_MIX),
        user: common::to_mixed(&game, Player::User, &common::USER_MIX),
    };
    let n = 10_000;
    let stats = evaluate_profile(&game, &profile, ProfileKey::default(), n, &cfg).map_err(|e| e.to_string())?;
    let exact = common::exact_returns(&common::ADMIN_MIX, &common::USER_MIX, 0.9, 66);
    let mut detail = Vec::new();
    for p in Player::ALL {
        let s = stats.get(p);
        let bound = 3.0 * s.sigma / (n as f64).sqrt();
        let err = (s.mean - exact[p.index()]).abs();
        ensure(err <= bound, || format!("{p}: |{} - {}| = {err} > {bound}", s.mean, exact[p.index()]))?;
        detail.push(format!("{p} |mean-exact| {err:.4} <= {bound:.4}"));
    }
    Ok(format!("step cap 66; {}", detail.join(", ")))
}

fn sweep_csv(s: &SweepResult) -> Result<Vec<u8>, String> {
    let mut w = io::csv_writer(Vec::new()).map_err(|e| e.to_string())?;
    io::write_sweep(&mut w, s).map_err(|e| e.to_string())?;
    let mut bytes = w.into_inner().map_err(|e| e.to_string())?;
    let mut w = io::csv_writer(Vec::new()).map_err(|e| e.to_string())?;
    io::write_returns(&mut w, s).map_err(|e| e.to_string())?;
    bytes.extend(w.into_inner().map_err(|e| e.to_string())?);
    Ok(bytes)
}

fn criterion_5() -> Outcome {
    let game = fixture::five_state();
    let cfg = EngineConfig::for_game(&game).with_seed(5);
    let levels = default_levels(10);
    let par = sweep(&game, &levels, 100, &cfg, true).map_err(|e| e.to_string())?;
    let ser = sweep(&game, &levels, 100, &cfg, false).map_err(|e| e.to_string())?;
    let again = sweep(&game, &levels, 100, &cfg, true).map_err(|e| e.to_string())?;
    let (a, b, c) = (sweep_csv(&par)?, sweep_csv(&ser)?, sweep_csv(&again)?);
    ensure(a == b, || "parallel and serial CSVs differ".into())?;
    ensure(a == c, || "repeated parallel CSVs differ".into())?;
    Ok(format!("10x10x100 sweep, {} CSV bytes identical serial/parallel/repeat", a.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..5).map(|_| (0..5).map(|_| f64::from(rng.gen_range(-4i32..=4))).collect()).collect()
    };
    let stats_grid = |a: &[Vec<f64>], u: &[Vec<f64>], sig: &dyn Fn(usize) -> f64| {
        let mut cells = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                let k = 2 * (i * 5 + j);
                cells.push(secgame::engine::ProfileStats {
                    admin: secgame::engine::RewardStats::summary(a[i][j], sig(k), 1),
                    user: secgame::engine::RewardStats::summary(u[i][j], sig(k + 1), 1),
                });
            }
        }
        SweepResult { levels: default_levels(5), n_runs: 1, config: EngineConfig::default(), cells }
    };
    let mut total_nash = 0;
    for g in 0..100 {
        let a = grid(&mut rng);
        let u = grid(&mut rng);
        let r = epsilon_nosp(&stats_grid(&a, &u, &|_| 0.0), 0.0).map_err(|e| e.to_string())?;
        let oracle = pure_nash_oracle(&a, &u);
        ensure(r.members == oracle, || format!("grid {g}: {:?} vs oracle {oracle:?}", r.members))?;
        total_nash += oracle.len();

        let sig: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..3.0)).collect();
        let s = stats_grid(&a, &u, &|k| sig[k]);
        let mut prev: Vec<(usize, usize)> = Vec::new();
        for eps in [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0] {
            let m = epsilon_nosp(&s, eps).map_err(|e| e.to_string())?.members;
            ensure(prev.iter().all(|x| m.contains(x)), || format!("grid {g}: membership shrank at eps {eps}"))?;
            prev = m;
        }
    }
    Ok(format!("100 grids match the oracle ({total_nash} pure equilibria); monotone in eps"))
}

fn criterion_7() -> Outcome {
    let base = fixture::five_state_spec();
    let reference = [(SkillLevel::BelowAverage, (7, 2)), (SkillLevel::Average, (8, 6)), (SkillLevel::AboveAverage, (4, 1))];
    let mut detail = Vec::new();
    for (level, published) in reference {
        let spec = apply_skill(&base, &SkillProfile::of(level)).map_err(|e| e.to_string())?;
        let game = Game::new(spec).map_err(|e| e.to_string())?;
        let cfg = EngineConfig::for_game(&game).with_seed(7);
        let s = sweep(&game, &default_levels(10), 100, &cfg, true).map_err(|e| e.to_string())?;
        let r = epsilon_nosp(&s, 0.01).map_err(|e| e.to_string())?;
        ensure(!r.members.is_empty(), || format!("{level}: empty eps-NOSP set"))?;
        let flat = s.cells.iter().filter(|c| c.admin.sigma == 0.0 || c.user.sigma == 0.0).count();
        ensure(flat == 0, || format!("{level}: {flat} profiles with zero spread"))?;
        detail.push(format!(
            "{level}: {} member(s), prescribed {:?} (published {published:?})",
            r.members.len(),
            r.prescribed.unwrap()
        ));
    }
    Ok(detail.join("; "))
}

/// Independent enumerator for criterion 8.
fn brute_offer(p: &[f64], nash: usize) -> (f64, f64, Vec<usize>) {
    let n = p.len();
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << n) {
        if mask >> nash & 1 == 0 || mask.count_ones() < 2 {
            continue;
        }
        let m: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
        let t: f64 = m.iter().map(|&k| p[k]).sum();
        let pn = p[nash] / t;
        let gap = (pn - (1.0 - pn) / (m.len() as f64 - 1.0)).abs();
        let h: f64 = m.iter().map(|&k| p[k] / t).map(|q| -q * q.log2()).sum();
        let better = match &best {
            None => true,
            Some((bg, bh, bm)) => {
                if (gap - bg).abs() > TIE_TOLERANCE {
                    gap < *bg
                } else if (h - bh).abs() > TIE_TOLERANCE {
                    h > *bh
                } else if m.len() != bm.len() {
                    m.len() < bm.len()
                } else {
                    let ids = |v: &[usize]| {
                        let mut s: Vec<String> = v.iter().map(|k| format!("a{k}")).collect();
                        s.sort();
                        s
                    };
                    ids(&m) < ids(bm)
                }
            }
        };
        if better {
            best = Some((gap, h, m));
        }
    }
    best.unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..1_000 {
        let n = rng.gen_range(2..=10);
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let nash = rng.gen_range(0..n);
        let pool = PloyPool::from_weights(w.iter().enumerate().map(|(k, &x)| (format!("a{k}"), x)).collect(), format!("a{nash}"))
            .map_err(|e| e.to_string())?;
        let offer = select_offer(&pool, 2, n).map_err(|e| e.to_string())?;
        let p: Vec<f64> = pool.actions.iter().map(|a| a.p).collect();
        let (gap, h, members) = brute_offer(&p, nash);
        let mut got: Vec<String> = offer.actions.iter().map(|a| a.id.clone()).collect();
        got.sort();
        let mut want: Vec<String> = members.iter().map(|k| format!("a{k}")).collect();
        want.sort();
        ensure(got == want, || format!("case {case}: {got:?} vs {want:?}"))?;
        ensure((offer.gap - gap).abs() <= 1e-12 && (offer.entropy - h).abs() <= 1e-12, || format!("case {case}: scores differ"))?;
    }
    for y in 2..=10 {
        let u = vec![1.0 / y as f64; y];
        let gap = equiprobability_gap(&u, 0).map_err(|e| e.to_string())?;
        ensure(gap == 0.0, || format!("uniform y={y}: gap {gap}"))?;
        let h = entropy_bits(&u);
        ensure((h - (y as f64).log2()).abs() <= 1e-12, || format!("uniform y={y}: entropy {h}"))?;
    }
    let h4 = entropy_bits(&[0.25; 4]);
    ensure(h4 == 2.0, || format!("y=4 entropy {h4}"))?;
    Ok("1000 pools match enumeration; uniform gap 0, entropy log2 y (2.0 bits at y=4)".into())
}

fn criterion_9() -> Outcome {
    let t = |name: &str, solo: f64, coop: f64| RewardTrajectory::new(name, vec![solo], vec![coop]);
    let err = |e: secgame::Error| e.to_string();
    ensure(!should_cooperate(&[t("a", 5.0, 5.0), t("b", 3.0, 3.0)]).map_err(err)?.cooperate, || "equal sums cooperate".into())?;
    let d = should_cooperate(&[t("a", 50.0, 60.0), t("b", 10.0, 12.0)]).map_err(err)?;
    ensure(d.cooperate && d.margins == vec![10.0, 2.0], || format!("{d:?}"))?;
    ensure(!should_cooperate(&[t("a", 50.0, 60.0), t("b", 10.0, 8.0)]).map_err(err)?.cooperate, || "loser joined".into())?;
    ensure(!should_respond_collectively(&[30.0, 40.0], &[40.0, 30.0]).map_err(err)?.collective, || "equal sums collective".into())?;
    let c = should_respond_collectively(&[30.0, 40.0], &[35.0, 45.0]).map_err(err)?;
    ensure(c.collective && c.margin == 10.0, || format!("{c:?}"))?;
    ensure(!should_respond_collectively(&[30.0, 40.0], &[60.0, 5.0]).map_err(err)?.collective, || "65 vs 70".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1_000 {
        let n = rng.gen_range(2..6);
        let len = rng.gen_range(1..5);
        let mut users: Vec<RewardTrajectory> = (0..n)
            .map(|k| {
                let solo: Vec<f64> = (0..len).map(|_| f64::from(rng.gen_range(-20i32..20))).collect();
                let coop: Vec<f64> = (0..len).map(|_| f64::from(rng.gen_range(-20i32..20))).collect();
                RewardTrajectory::new(format!("u{k}"), solo, coop)
            })
            .collect();
        let base = should_cooperate(&users).map_err(err)?.cooperate;
        for _ in 0..3 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            users.swap(i, j);
            ensure(should_cooperate(&users).map_err(err)?.cooperate == base, || "order changed the decision".into())?;
        }
        let zero = RewardTrajectory::new("z", users[0].solo.clone(), users[0].solo.clone());
        ensure(zero.margin() == 0.0, || "zero margin".into())?;
        let mut with_zero = users.clone();
        with_zero.push(zero);
        ensure(!should_cooperate(&with_zero).map_err(err)?.cooperate, || "zero-margin user joined".into())?;
    }
    Ok("worked cases, strictness, permutation invariance".into())
}

fn criterion_10() -> Outcome {
    // fixture: every attemptable but disallowed action behaves as the normal action
    let g = fixture::five_state();
    let mut checked = 0;
    for p in Player::ALL {
        for s in g.states() {
            let normal = g.normal_action(p, s);
            for id in g.extended_action_set(p, s).map_err(|e| e.to_string())? {
                if g.allowed(p, s).contains(&id) {
                    continue;
                }
                let eff = g.effective_action(p, s, id).map_err(|e| e.to_string())?;
                ensure(eff == normal, || format!("{p} {} at {}: effective {}", g.action(id).id, g.state_key(s), g.action(eff).id))?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "fixture has no attemptable disallowed actions".into())?;

    // engine: same seed, out-of-set attempt vs the normal action's own row
    let game = common::toy_game();
    let a = game.state("a").map_err(|e| e.to_string())?;
    let pure = |player: Player, pick: &str| {
        MixedStrategy::pure(&game, player, |s: StateId| {
            let allowed = game.allowed(player, s);
            allowed.iter().position(|&id| game.action(id).id == pick).unwrap_or(0)
        })
    };
    let user = pure(Player::User, "ua");
    let attempt = StrategyProfile { admin: pure(Player::Admin, "xb"), user: user.clone() };
    let plain = StrategyProfile { admin: pure(Player::Admin, "nb"), user };
    let xb_cost = game.action(game.action_id("xb").map_err(|e| e.to_string())?).attempt_cost;
    let mut substituted = 0;
    for seed in 0..2_000u64 {
        let s1 = play_step(&game, a, &attempt, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        let s2 = play_step(&game, a, &plain, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        let (x, y) = (&s1.players[0], &s2.players[0]);
        if game.state_key(x.perceived) != "b" {
            continue;
        }
        substituted += 1;
        ensure(game.action(x.effective).id == "na" && x.effective == y.effective, || "not executed as normal".into())?;
        ensure(s1.next_state == s2.next_state, || format!("seed {seed}: next states differ"))?;
        ensure(
            game.transition(a, x.effective, s1.players[1].effective) == game.transition(a, game.normal_action(Player::Admin, a), s1.players[1].effective),
            || "transition rows differ".into(),
        )?;
        let diff = x.reward.components().iter().zip(y.reward.components()).map(|(p, q)| p - q).collect::<Vec<_>>();
        ensure(diff == vec![xb_cost, 0.0, 0.0], || format!("seed {seed}: reward difference {diff:?}"))?;
        let base = game.reward(a, x.effective, s1.players[1].effective)[0];
        ensure(x.reward == base + RewardVector::new(xb_cost, 0.0, 0.0), || "reward is not base plus attempt cost".into())?;
        ensure(y.reward == base, || "nb attempt (cost 0) changed the reward".into())?;
    }
    ensure(substituted > 0, || "no substituted steps sampled".into())?;
    Ok(format!("{checked} fixture substitutions; {substituted} sampled steps, reward difference exactly {xb_cost}"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "bandwidth classification (0.3, 0.7) to 1e-9", Duration::from_millis(1), criterion_1),
        (2, "error-distribution properties on 1e4 fuzz cases", Duration::from_secs(5), criterion_2),
        (3, "IIF algebra on 1e3 instances", Duration::from_secs(10), criterion_3),
        (4, "engine unbiasedness (3 sigma/sqrt n, 1e4 runs), step cap 66", Duration::from_secs(30), criterion_4),
        (5, "determinism of 10x10x100 sweep CSVs", Duration::from_secs(60), criterion_5),
        (6, "eps-NOSP vs oracle on 100 5x5 grids", Duration::from_secs(5), criterion_6),
        (7, "fixture sweep sanity per skill (eps = 0.01)", Duration::from_secs(120), criterion_7),
        (8, "ploy optimality on 1e3 pools", Duration::from_secs(10), criterion_8),
        (9, "multi-user predicates", Duration::from_secs(1), criterion_9),
        (10, "disallowed-action rule", Duration::from_secs(1), criterion_10),
    ];
    let mut failed = 0;
    for (id, name, bound, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= bound { Ok(d) } else { Err(format!("{d}; runtime {elapsed:.3?} exceeds {bound:?}")) }
        });
        match outcome {
            Ok(d) => println!("criterion {id}: PASS  {name} [{elapsed:.3?} <= {bound:?}] {d}"),
            Err(e) => {
                failed += 1;
                println!("criterion {id}: FAIL  {name} [{elapsed:.3?}, bound {bound:?}] {e}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
