//! C ABI over the `secgame` library.
//!
//! Games and sweeps cross the boundary as opaque handles created by a
//! `*_new`/`*_from_*` call and released with the matching `*_free`. Every
//! fallible call returns a [`SecgameStatus`]; on failure the message is kept
//! per thread and can be read with [`secgame_last_error`]. Matrices are
//! passed row-major as flat `double` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;
use std::slice;

use secgame::coop::{should_cooperate, should_respond_collectively, RewardTrajectory};
use secgame::engine::{horizon, EngineConfig};
use secgame::iif::{iif_matrix, occurrence_ratios};
use secgame::ploy::{select_offer, PloyPool, SearchRegime};
use secgame::sensor::perception_from_distances;
use secgame::strategy::{apply_skill, epsilon_nosp, sweep, SkillLevel, SkillProfile, SweepResult};
use secgame::{fixture, Error, Game, GameSpec, Player, StateId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecgameStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Validation = 3,
    NotConverged = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Opaque compiled game.
pub struct SecgameGame {
    game: Game,
}

/// Opaque sweep result over a square grid of aggression levels.
pub struct SecgameSweep {
    result: SweepResult,
}

/// Summary statistics of one sweep cell.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SecgameCellStats {
    pub admin_mean: f64,
    pub admin_sigma: f64,
    pub user_mean: f64,
    pub user_sigma: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> SecgameStatus {
    match err {
        Error::InvalidSpec(_) => SecgameStatus::Validation,
        Error::NotConverged { .. } => SecgameStatus::NotConverged,
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) => SecgameStatus::Parse,
        Error::Io(_) => SecgameStatus::Internal,
        Error::NotFound { .. } | Error::DimensionMismatch { .. } | Error::Contract(_) | Error::InvalidArgument(_) => {
            SecgameStatus::InvalidArgument
        }
    }
}

enum Fail {
    Core(Error),
    Arg(String),
    Small(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn arg(msg: &str) -> Fail {
    Fail::Arg(msg.to_string())
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F>(f: F) -> SecgameStatus
where
    F: FnOnce() -> Result<(), Fail> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SecgameStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Arg(m))) => {
            set_error(m);
            SecgameStatus::InvalidArgument
        }
        Ok(Err(Fail::Small(m))) => {
            set_error(m);
            SecgameStatus::BufferTooSmall
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SecgameStatus::Internal
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Arg(format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Arg(format!("{what} is null")));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Arg(format!("{what} is null")));
    }
    p.write(v);
    Ok(())
}

unsafe fn game_ref<'a>(g: *const SecgameGame) -> Result<&'a Game, Fail> {
    g.as_ref().map(|h| &h.game).ok_or_else(|| arg("game handle is null"))
}

unsafe fn sweep_ref<'a>(s: *const SecgameSweep) -> Result<&'a SweepResult, Fail> {
    s.as_ref().map(|h| &h.result).ok_or_else(|| arg("sweep handle is null"))
}

fn player(p: u32) -> Result<Player, Fail> {
    Player::from_index(p as usize).ok_or_else(|| arg("player must be 0 (admin) or 1 (user)"))
}

fn rows(flat: &[f64], n: usize) -> Vec<Vec<f64>> {
    flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn secgame_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates a game file given as a NUL-terminated JSON string.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_from_json(json: *const c_char, out: *mut *mut SecgameGame) -> SecgameStatus {
    guard(|| {
        if json.is_null() {
            return Err(arg("json is null"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| arg("json is not UTF-8"))?;
        let game = Game::new(GameSpec::from_json(text)?)?;
        put(out, Box::into_raw(Box::new(SecgameGame { game })), "out")
    })
}

/// The bundled five-state administrator/user game.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_fixture(out: *mut *mut SecgameGame) -> SecgameStatus {
    guard(|| put(out, Box::into_raw(Box::new(SecgameGame { game: fixture::five_state() })), "out"))
}

/// Copy of `game` with contested transitions re-weighted for a skill level
/// (0 below average, 1 average, 2 above average). A NaN `success` uses the
/// level's default attack success.
///
/// # Safety
/// `game` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_with_skill(
    game: *const SecgameGame,
    level: u32,
    success: f64,
    out: *mut *mut SecgameGame,
) -> SecgameStatus {
    guard(|| {
        let g = game_ref(game)?;
        let level = *SkillLevel::ALL.get(level as usize).ok_or_else(|| arg("skill level must be 0, 1 or 2"))?;
        let skill = if success.is_nan() { SkillProfile::of(level) } else { SkillProfile::new(level, success)? };
        let spec = apply_skill(g.spec(), &skill)?;
        put(out, Box::into_raw(Box::new(SecgameGame { game: Game::new(spec)? })), "out")
    })
}

/// # Safety
/// `game` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_free(game: *mut SecgameGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn secgame_game_num_states(game: *const SecgameGame) -> usize {
    game.as_ref().map_or(0, |h| h.game.num_states())
}

/// States `player` may believe it is in when the true state is `state`.
/// `*len` receives the set size even when `cap` is too small.
///
/// # Safety
/// `game` must be a live handle, `out` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn secgame_information_set(
    game: *const SecgameGame,
    player_index: u32,
    state: usize,
    out: *mut usize,
    cap: usize,
    len: *mut usize,
) -> SecgameStatus {
    guard(|| {
        let g = game_ref(game)?;
        if state >= g.num_states() {
            return Err(arg("state index out of range"));
        }
        let set = g.information_set(player(player_index)?, StateId(state))?;
        put(len, set.len(), "len")?;
        if set.len() > cap {
            return Err(Fail::Small(format!("information set has {} states, buffer holds {cap}", set.len())));
        }
        for (o, s) in output(out, set.len(), "out")?.iter_mut().zip(set) {
            *o = s.0;
        }
        Ok(())
    })
}

/// Smallest `h` with `beta^h < theta`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn secgame_horizon(beta: f64, theta: f64, out: *mut usize) -> SecgameStatus {
    guard(|| put(out, horizon(beta, theta)?, "out"))
}

/// Perception distribution over `n` states from their RMS distances to a
/// sensor reading.
///
/// # Safety
/// `distances` and `out` must each hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn secgame_classify(distances: *const f64, n: usize, out: *mut f64) -> SecgameStatus {
    guard(|| {
        let d = input(distances, n, "distances")?;
        if n == 0 {
            return Err(arg("no distances"));
        }
        if d.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(arg("distances must be finite and non-negative"));
        }
        output(out, n, "out")?.copy_from_slice(&perception_from_distances(d));
        Ok(())
    })
}

/// Monte Carlo sweep of every (admin, user) pair of aggression levels.
///
/// # Safety
/// `game` must be a live handle, `levels` must hold `n_levels` elements and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_sweep(
    game: *const SecgameGame,
    levels: *const f64,
    n_levels: usize,
    n_runs: usize,
    seed: u64,
    out: *mut *mut SecgameSweep,
) -> SecgameStatus {
    guard(|| {
        let g = game_ref(game)?;
        let levels = input(levels, n_levels, "levels")?;
        let cfg = EngineConfig::for_game(g).with_seed(seed);
        let result = sweep(g, levels, n_runs, &cfg, true)?;
        put(out, Box::into_raw(Box::new(SecgameSweep { result })), "out")
    })
}

/// # Safety
/// `sweep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn secgame_sweep_free(sweep: *mut SecgameSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Side length of the sweep grid, or 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn secgame_sweep_size(sweep: *const SecgameSweep) -> usize {
    sweep.as_ref().map_or(0, |h| h.result.size())
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn secgame_sweep_cell(
    sweep: *const SecgameSweep,
    admin: usize,
    user: usize,
    out: *mut SecgameCellStats,
) -> SecgameStatus {
    guard(|| {
        let s = sweep_ref(sweep)?;
        if admin >= s.size() || user >= s.size() {
            return Err(arg("cell index out of range"));
        }
        let c = s.cell(admin, user);
        let stats = SecgameCellStats {
            admin_mean: c.admin.mean,
            admin_sigma: c.admin.sigma,
            user_mean: c.user.mean,
            user_sigma: c.user.sigma,
        };
        put(out, stats, "out")
    })
}

/// ε-neighborhood optimal profiles of a sweep. `members` receives one byte
/// per cell in row-major order. `*found` is 0 when the set is empty; otherwise
/// the prescribed pair is written to `admin`/`user`.
///
/// # Safety
/// `sweep` must be a live handle and `members` must hold `size * size` bytes.
#[no_mangle]
pub unsafe extern "C" fn secgame_nosp(
    sweep: *const SecgameSweep,
    epsilon: f64,
    members: *mut u8,
    found: *mut u8,
    admin: *mut usize,
    user: *mut usize,
) -> SecgameStatus {
    guard(|| {
        let s = sweep_ref(sweep)?;
        let r = epsilon_nosp(s, epsilon)?;
        for (m, c) in output(members, r.cells.len(), "members")?.iter_mut().zip(&r.cells) {
            *m = c.member as u8;
        }
        put(found, r.prescribed.is_some() as u8, "found")?;
        if let Some((i, j)) = r.prescribed {
            put(admin, i, "admin")?;
            put(user, j, "user")?;
        }
        Ok(())
    })
}

/// Long-run state occurrence ratios of an `n`×`n` row-stochastic matrix.
/// `iterations` may be null.
///
/// # Safety
/// `p` must hold `n * n` elements and `out` `n`.
#[no_mangle]
pub unsafe extern "C" fn secgame_occurrence_ratios(
    p: *const f64,
    n: usize,
    start: usize,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
    iterations: *mut usize,
) -> SecgameStatus {
    guard(|| {
        let p = rows(input(p, n * n, "p")?, n);
        let r = occurrence_ratios(&p, start, tol, max_iter)?;
        output(out, n, "out")?.copy_from_slice(&r.r);
        if !iterations.is_null() {
            iterations.write(r.iterations);
        }
        Ok(())
    })
}

/// Imperfect information factor from an `n`×`n` sensor error matrix and
/// occurrence ratios. `z` receives `n * n` values (rows: perceived state),
/// `flagged` one byte per row whose perceived ratio is zero.
///
/// # Safety
/// `error_rows` and `z` must hold `n * n` elements; `r` and `flagged` `n`.
#[no_mangle]
pub unsafe extern "C" fn secgame_iif(
    error_rows: *const f64,
    r: *const f64,
    n: usize,
    z: *mut f64,
    flagged: *mut u8,
) -> SecgameStatus {
    guard(|| {
        let e = rows(input(error_rows, n * n, "error_rows")?, n);
        let m = iif_matrix(&e, input(r, n, "r")?)?;
        for (o, x) in output(z, n * n, "z")?.iter_mut().zip(m.z.iter().flatten()) {
            *o = *x;
        }
        for (o, f) in output(flagged, n, "flagged")?.iter_mut().zip(&m.flagged) {
            *o = *f as u8;
        }
        Ok(())
    })
}

/// Chooses a honeypot offer from `n` actions given by positive weights.
/// Actions are referred to by their index. `offer` receives the offered
/// indices in preference order and `*len` their count.
///
/// # Safety
/// `weights` and `offer` must hold `n` elements; the scalar outputs must be
/// writable. `exhaustive` may be null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn secgame_ploy_select(
    weights: *const f64,
    n: usize,
    nash: usize,
    min_size: usize,
    max_size: usize,
    offer: *mut usize,
    len: *mut usize,
    gap: *mut f64,
    exhaustive: *mut u8,
) -> SecgameStatus {
    guard(|| {
        let w = input(weights, n, "weights")?;
        if nash >= n {
            return Err(arg("nash index out of range"));
        }
        let pool = PloyPool::from_weights(w.iter().enumerate().map(|(k, &x)| (k.to_string(), x)).collect(), nash.to_string())?;
        let o = select_offer(&pool, min_size, max_size)?;
        let out = output(offer, n, "offer")?;
        for (slot, a) in out.iter_mut().zip(&o.actions) {
            *slot = a.id.parse().map_err(|_| arg("offer id"))?;
        }
        put(len, o.size(), "len")?;
        put(gap, o.gap, "gap")?;
        if !exhaustive.is_null() {
            exhaustive.write((o.regime == SearchRegime::Exhaustive) as u8);
        }
        Ok(())
    })
}

/// Whether `n_users` users gain by cooperating. Each user contributes a
/// row of `steps` rewards to `solo` and to `coop`.
///
/// # Safety
/// `solo` and `coop` must hold `n_users * steps` elements.
#[no_mangle]
pub unsafe extern "C" fn secgame_should_cooperate(
    solo: *const f64,
    coop: *const f64,
    n_users: usize,
    steps: usize,
    out: *mut u8,
) -> SecgameStatus {
    guard(|| {
        let solo = input(solo, n_users * steps, "solo")?;
        let coop = input(coop, n_users * steps, "coop")?;
        let users: Vec<_> = (0..n_users)
            .map(|k| {
                let row = k * steps..(k + 1) * steps;
                RewardTrajectory::new(format!("user{k}"), solo[row.clone()].to_vec(), coop[row].to_vec())
            })
            .collect();
        put(out, should_cooperate(&users)?.cooperate as u8, "out")
    })
}

/// Whether a common response beats independent responses over `n` games.
/// `margin` may be null.
///
/// # Safety
/// `individual` and `common` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn secgame_should_respond_collectively(
    individual: *const f64,
    common: *const f64,
    n: usize,
    out: *mut u8,
    margin: *mut f64,
) -> SecgameStatus {
    guard(|| {
        let d = should_respond_collectively(input(individual, n, "individual")?, input(common, n, "common")?)?;
        put(out, d.collective as u8, "out")?;
        if !margin.is_null() {
            margin.write(d.margin);
        }
        Ok(())
    })
}
