#ifndef BOXN_CAPI_H
#define BOXN_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BoxnStatus {
  /**
   * Success, or an exact positive verdict.
   */
  BoxnStatus_Ok = 0,
  /**
   * An exact negative verdict (falsified certificate, not PSD, ...).
   */
  BoxnStatus_Falsified = 1,
  /**
   * Invalid input, unsupported operation, or internal failure.
   */
  BoxnStatus_Error = 2,
  /**
   * A required pointer argument was NULL.
   */
  BoxnStatus_NullPointer = 3,
} BoxnStatus;

/**
 * Opaque group-ring element handle.
 */
typedef struct BoxnElement BoxnElement;

/**
 * Opaque group model handle.
 */
typedef struct BoxnGroup BoxnGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the most recent error message on this thread, or NULL.
 * The caller owns the string and must free it with
 * `boxn_string_free`.
 */
char *boxn_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void boxn_string_free(char *s);

/**
 * Parses a group definition (the JSON group file format) into a group
 * handle written to `out`.
 *
 * # Safety
 * `json` must point to a NUL-terminated string and `out` to a valid
 * pointer slot.
 */
enum BoxnStatus boxn_group_from_json(const char *json, struct BoxnGroup **out);

/**
 * Frees a group handle. NULL is ignored.
 *
 * # Safety
 * `group` must have come from `boxn_group_from_json` and not be used
 * afterwards.
 */
void boxn_group_free(struct BoxnGroup *group);

/**
 * Number of generators in the symmetrized alphabet.
 *
 * # Safety
 * `group` must be a live handle from `boxn_group_from_json`.
 */
uintptr_t boxn_group_generator_count(const struct BoxnGroup *group);

/**
 * Parses an element (the JSON element file format). When `group` is
 * non-NULL it supplies the context and the file's own group key is
 * ignored; otherwise the JSON must inline its group.
 *
 * # Safety
 * Pointers must be valid as for `boxn_group_from_json`.
 */
enum BoxnStatus boxn_element_from_json(const struct BoxnGroup *group,
                                       const char *json,
                                       struct BoxnElement **out);

/**
 * Frees an element handle. NULL is ignored.
 *
 * # Safety
 * `elem` must have come from this library and not be used afterwards.
 */
void boxn_element_free(struct BoxnElement *elem);

/**
 * Serializes an element to its JSON file format (group inlined).
 *
 * # Safety
 * `elem` must be a live element handle.
 */
char *boxn_element_to_json(const struct BoxnElement *elem);

/**
 * Builds the n-th element of the order-unit family over the group.
 *
 * # Safety
 * `group` and `out` must be valid.
 */
enum BoxnStatus boxn_box_element(const struct BoxnGroup *group,
                                 uintptr_t n,
                                 struct BoxnElement **out);

/**
 * Exact verification of a certificate given as the JSON certificate
 * file format. Returns `Ok` when the identity holds exactly,
 * `Falsified` when it does not, `Error` on malformed input.
 *
 * # Safety
 * `json` must point to a NUL-terminated string.
 */
enum BoxnStatus boxn_certificate_verify_json(const char *json);

/**
 * Exact positivity oracle for hermitian elements of finite groups:
 * `Ok` when the regular representation is PSD, `Falsified` when not.
 *
 * # Safety
 * `elem` must be a live element handle.
 */
enum BoxnStatus boxn_oracle_psd(const struct BoxnElement *elem);

/**
 * Spectral-gap search for the Laplacian of the group's generating
 * set. On success writes the certified lambda as a rational string
 * (caller frees) and returns `Ok`.
 *
 * # Safety
 * `group` and `out_lambda` must be valid.
 */
enum BoxnStatus boxn_spectral_gap(const struct BoxnGroup *group, char **out_lambda);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BOXN_CAPI_H */
