#ifndef BEAUVILLE_H
#define BEAUVILLE_H

/* Generated by cbindgen from beauville-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point. The numeric values mirror
 * the CLI exit codes where they overlap.
 */
typedef enum BvStatus {
  /**
   * Completed; out parameters are valid.
   */
  BV_STATUS_OK = 0,
  /**
   * Malformed input (parse error, bad arguments).
   */
  BV_STATUS_INPUT_ERROR = 2,
  /**
   * A search budget or order cap was exceeded; no verdict.
   */
  BV_STATUS_INDETERMINATE = 3,
  /**
   * A consistency or invariant violation was detected.
   */
  BV_STATUS_INVARIANT_VIOLATION = 4,
  /**
   * A required pointer argument was null.
   */
  BV_STATUS_NULL_ARGUMENT = 5,
  /**
   * Unexpected internal failure; see bv_last_error_message.
   */
  BV_STATUS_INTERNAL_ERROR = 6,
} BvStatus;

/**
 * Oracle mode selector for [`bv_oracle_json`].
 */
typedef enum BvOracleMode {
  BV_ORACLE_MODE_NAIVE = 0,
  BV_ORACLE_MODE_SOCLE = 1,
} BvOracleMode;

/**
 * Opaque enumerated group.
 */
typedef struct BvGroup BvGroup;

/**
 * Opaque parsed presentation.
 */
typedef struct BvPresentation BvPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *bv_version(void);

/**
 * Last error message for this thread, or null if none. Free with
 * bv_string_free.
 */
char *bv_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a beauville-ffi function and not freed
 * before.
 */
void bv_string_free(char *s);

/**
 * Parse a presentation from UTF-8 text.
 *
 * # Safety
 * `text` must be a valid nul-terminated C string; `out` must be a valid
 * pointer.
 */
enum BvStatus bv_presentation_parse(const char *text, struct BvPresentation **out);

/**
 * # Safety
 * `p` must be a live handle from bv_presentation_parse (or null).
 */
void bv_presentation_free(struct BvPresentation *p);

/**
 * # Safety
 * `p` must be a live presentation handle.
 */
uint64_t bv_presentation_order(const struct BvPresentation *p);

/**
 * # Safety
 * `p` must be a live presentation handle.
 */
uint32_t bv_presentation_prime(const struct BvPresentation *p);

/**
 * # Safety
 * `p` must be a live presentation handle.
 */
uint32_t bv_presentation_length(const struct BvPresentation *p);

/**
 * Canonical text form of the presentation.
 *
 * # Safety
 * `p` must be a live presentation handle; `out` must be valid.
 */
enum BvStatus bv_presentation_canonical_text(const struct BvPresentation *p, char **out);

/**
 * Content hash of the canonical presentation text.
 *
 * # Safety
 * `p` must be a live presentation handle; `out` must be valid.
 */
enum BvStatus bv_presentation_content_id(const struct BvPresentation *p, char **out);

/**
 * Run the consistency certificate. Returns BV_OK when the presentation
 * defines a group of exactly p^n elements, BV_INVARIANT_VIOLATION with a
 * witness message otherwise.
 *
 * # Safety
 * `p` must be a live presentation handle.
 */
enum BvStatus bv_check_consistency(const struct BvPresentation *p);

/**
 * Enumerate a consistent presentation into a group handle.
 *
 * # Safety
 * `p` must be a live presentation handle; `out` must be valid.
 */
enum BvStatus bv_group_enumerate(const struct BvPresentation *p, struct BvGroup **out);

/**
 * # Safety
 * `g` must be a live handle from bv_group_enumerate (or null).
 */
void bv_group_free(struct BvGroup *g);

/**
 * # Safety
 * `g` must be a live group handle.
 */
uint64_t bv_group_order(const struct BvGroup *g);

/**
 * Minimal number of generators d(G).
 *
 * # Safety
 * `g` must be a live group handle.
 */
uint32_t bv_group_rank(const struct BvGroup *g);

/**
 * Maximal-class profile (or a not-maximal-class marker) as JSON.
 *
 * # Safety
 * `g` must be a live group handle; `out` must be valid.
 */
enum BvStatus bv_analyze_json(const struct BvGroup *g, char **out);

/**
 * Decide the Beauville property by definition and refine tame/wild. The
 * report is returned as JSON; `budget_pairs` = 0 means unlimited.
 *
 * # Safety
 * `g` must be a live group handle; `out` must be valid.
 */
enum BvStatus bv_oracle_json(const struct BvGroup *g,
                             enum BvOracleMode mode,
                             uint64_t budget_pairs,
                             char **out);

/**
 * Fast classifier for maximal-class groups; both readings reported as
 * JSON.
 *
 * # Safety
 * `g` must be a live group handle; `out` must be valid.
 */
enum BvStatus bv_classify_json(const struct BvGroup *g, char **out);

/**
 * Presentation text for a quotient of the pro-p group of maximal class.
 *
 * # Safety
 * `out` must be valid.
 */
enum BvStatus bv_construct_pquotient(uint32_t p, uint32_t m, char **out);

/**
 * Presentation text for C_{n1} x C_{n2} over a common prime.
 *
 * # Safety
 * `out` must be valid.
 */
enum BvStatus bv_construct_abelian(uint64_t n1, uint64_t n2, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEAUVILLE_H */
