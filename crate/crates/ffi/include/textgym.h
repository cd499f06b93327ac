#ifndef TEXTGYM_H
#define TEXTGYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TgStatus {
  TG_STATUS_OK = 0,
  TG_STATUS_NULL_POINTER = 1,
  TG_STATUS_INVALID_UTF8 = 2,
  /**
   * Unparseable or out-of-range episode config.
   */
  TG_STATUS_BAD_CONFIG = 3,
  /**
   * The seed does not belong to the requested fold.
   */
  TG_STATUS_FOLD_MISMATCH = 4,
  TG_STATUS_IO = 5,
  /**
   * A tree file failed to parse or validate.
   */
  TG_STATUS_TREE_FORMAT = 6,
  /**
   * The tree was crawled for a different config.
   */
  TG_STATUS_TREE_MISMATCH = 7,
  /**
   * Crawl exceeded its size budget.
   */
  TG_STATUS_CRAWL_BUDGET = 8,
  TG_STATUS_PANIC = 99,
} TgStatus;

/**
 * A live episode.
 */
typedef struct TgSession TgSession;

/**
 * A loaded, immutable precrawled tree.
 */
typedef struct TgTree TgTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tg_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next `tg_` call on the same thread.
 */
const char *tg_last_error(void);

/**
 * Starts an episode. `config_json` uses the wire field names (`game`,
 * `seed`, `fold`, `difficulty`, `num_locations`, ...). With a non-NULL
 * `tree` the session plays back that tree instead of running the engine.
 * On success `*out` owns a new session and `*result_json` the first step.
 */
enum TgStatus tg_session_reset(const char *config_json,
                               const struct TgTree *tree,
                               struct TgSession **out,
                               char **result_json);

/**
 * Steps with free-text input. Unrecognized input is not an error; the
 * result's observation says so.
 */
enum TgStatus tg_session_step(struct TgSession *session, const char *input, char **result_json);

/**
 * Steps with the `index`-th entry of the last valid-action list.
 */
enum TgStatus tg_session_step_index(struct TgSession *session, uintptr_t index, char **result_json);

void tg_session_free(struct TgSession *session);

/**
 * Loads a tree file (`.gz` is decompressed).
 */
enum TgStatus tg_tree_load(const char *path, struct TgTree **out);

/**
 * Crawls a tree in memory to `max_depth`.
 */
enum TgStatus tg_tree_crawl(const char *config_json, uint32_t max_depth, struct TgTree **out);

/**
 * Number of nodes, or 0 for NULL.
 */
uintptr_t tg_tree_node_count(const struct TgTree *tree);

/**
 * Sessions created from the tree keep it alive; freeing here is always safe.
 */
void tg_tree_free(struct TgTree *tree);

/**
 * Releases a string returned by this library.
 */
void tg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXTGYM_H */
