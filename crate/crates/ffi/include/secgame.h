#ifndef SECGAME_H
#define SECGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SecgameStatus {
  SECGAME_STATUS_OK = 0,
  SECGAME_STATUS_INVALID_ARGUMENT = 1,
  SECGAME_STATUS_PARSE = 2,
  SECGAME_STATUS_VALIDATION = 3,
  SECGAME_STATUS_NOT_CONVERGED = 4,
  SECGAME_STATUS_BUFFER_TOO_SMALL = 5,
  SECGAME_STATUS_INTERNAL = 6,
} SecgameStatus;

/**
 * Opaque compiled game.
 */
typedef struct SecgameGame SecgameGame;

/**
 * Opaque sweep result over a square grid of aggression levels.
 */
typedef struct SecgameSweep SecgameSweep;

/**
 * Summary statistics of one sweep cell.
 */
typedef struct SecgameCellStats {
  double admin_mean;
  double admin_sigma;
  double user_mean;
  double user_sigma;
} SecgameCellStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *secgame_last_error(void);

/**
 * Parses and validates a game file given as a NUL-terminated JSON string.
 *
 * # Safety
 * `json` must be a valid C string and `out` a writable pointer.
 */
enum SecgameStatus secgame_game_from_json(const char *json, struct SecgameGame **out);

/**
 * The bundled five-state administrator/user game.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum SecgameStatus secgame_game_fixture(struct SecgameGame **out);

/**
 * Copy of `game` with contested transitions re-weighted for a skill level
 * (0 below average, 1 average, 2 above average). A NaN `success` uses the
 * level's default attack success.
 *
 * # Safety
 * `game` must be a live handle and `out` a writable pointer.
 */
enum SecgameStatus secgame_game_with_skill(const struct SecgameGame *game,
                                           uint32_t level,
                                           double success,
                                           struct SecgameGame **out);

/**
 * # Safety
 * `game` must be null or a handle not yet freed.
 */
void secgame_game_free(struct SecgameGame *game);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t secgame_game_num_states(const struct SecgameGame *game);

/**
 * States `player` may believe it is in when the true state is `state`.
 * `*len` receives the set size even when `cap` is too small.
 *
 * # Safety
 * `game` must be a live handle, `out` must hold `cap` elements.
 */
enum SecgameStatus secgame_information_set(const struct SecgameGame *game,
                                           uint32_t player_index,
                                           size_t state,
                                           size_t *out,
                                           size_t cap,
                                           size_t *len);

/**
 * Smallest `h` with `beta^h < theta`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum SecgameStatus secgame_horizon(double beta, double theta, size_t *out);

/**
 * Perception distribution over `n` states from their RMS distances to a
 * sensor reading.
 *
 * # Safety
 * `distances` and `out` must each hold `n` elements.
 */
enum SecgameStatus secgame_classify(const double *distances, size_t n, double *out);

/**
 * Monte Carlo sweep of every (admin, user) pair of aggression levels.
 *
 * # Safety
 * `game` must be a live handle, `levels` must hold `n_levels` elements and
 * `out` must be writable.
 */
enum SecgameStatus secgame_sweep(const struct SecgameGame *game,
                                 const double *levels,
                                 size_t n_levels,
                                 size_t n_runs,
                                 uint64_t seed,
                                 struct SecgameSweep **out);

/**
 * # Safety
 * `sweep` must be null or a handle not yet freed.
 */
void secgame_sweep_free(struct SecgameSweep *sweep);

/**
 * Side length of the sweep grid, or 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t secgame_sweep_size(const struct SecgameSweep *sweep);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
enum SecgameStatus secgame_sweep_cell(const struct SecgameSweep *sweep,
                                      size_t admin,
                                      size_t user,
                                      struct SecgameCellStats *out);

/**
 * ε-neighborhood optimal profiles of a sweep. `members` receives one byte
 * per cell in row-major order. `*found` is 0 when the set is empty; otherwise
 * the prescribed pair is written to `admin`/`user`.
 *
 * # Safety
 * `sweep` must be a live handle and `members` must hold `size * size` bytes.
 */
enum SecgameStatus secgame_nosp(const struct SecgameSweep *sweep,
                                double epsilon,
                                uint8_t *members,
                                uint8_t *found,
                                size_t *admin,
                                size_t *user);

/**
 * Long-run state occurrence ratios of an `n`×`n` row-stochastic matrix.
 * `iterations` may be null.
 *
 * # Safety
 * `p` must hold `n * n` elements and `out` `n`.
 */
enum SecgameStatus secgame_occurrence_ratios(const double *p,
                                             size_t n,
                                             size_t start,
                                             double tol,
                                             size_t max_iter,
                                             double *out,
                                             size_t *iterations);

/**
 * Imperfect information factor from an `n`×`n` sensor error matrix and
 * occurrence ratios. `z` receives `n * n` values (rows: perceived state),
 * `flagged` one byte per row whose perceived ratio is zero.
 *
 * # Safety
 * `error_rows` and `z` must hold `n * n` elements; `r` and `flagged` `n`.
 */
enum SecgameStatus secgame_iif(const double *error_rows,
                               const double *r,
                               size_t n,
                               double *z,
                               uint8_t *flagged);

/**
 * Chooses a honeypot offer from `n` actions given by positive weights.
 * Actions are referred to by their index. `offer` receives the offered
 * indices in preference order and `*len` their count.
 *
 * # Safety
 * `weights` and `offer` must hold `n` elements; the scalar outputs must be
 * writable. `exhaustive` may be null.
 */
enum SecgameStatus secgame_ploy_select(const double *weights,
                                       size_t n,
                                       size_t nash,
                                       size_t min_size,
                                       size_t max_size,
                                       size_t *offer,
                                       size_t *len,
                                       double *gap,
                                       uint8_t *exhaustive);

/**
 * Whether `n_users` users gain by cooperating. Each user contributes a
 * row of `steps` rewards to `solo` and to `coop`.
 *
 * # Safety
 * `solo` and `coop` must hold `n_users * steps` elements.
 */
enum SecgameStatus secgame_should_cooperate(const double *solo,
                                            const double *coop,
                                            size_t n_users,
                                            size_t steps,
                                            uint8_t *out);

/**
 * Whether a common response beats independent responses over `n` games.
 * `margin` may be null.
 *
 * # Safety
 * `individual` and `common` must hold `n` elements.
 */
enum SecgameStatus secgame_should_respond_collectively(const double *individual,
                                                       const double *common,
                                                       size_t n,
                                                       uint8_t *out,
                                                       double *margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECGAME_H */
