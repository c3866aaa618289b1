#ifndef ANCS_H
#define ANCS_H

/* Generated by cbindgen from the ancs-ffi crate; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C API call; zero means success.
 */
typedef enum AncsStatus {
  /**
   * The call succeeded and all out-pointers are populated.
   */
  ANCS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ANCS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A name or parameter was rejected before any evaluation started.
   */
  ANCS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The inputs were well-formed but outside the mathematical domain
   * (negative intensity, unreachable mean count, efficiency above one).
   */
  ANCS_STATUS_DOMAIN_ERROR = 3,
  /**
   * An internal iteration hit its limit without reaching tolerance.
   */
  ANCS_STATUS_NO_CONVERGENCE = 4,
  /**
   * The supplied buffer is shorter than the result; the required
   * length has been written through the length out-pointer.
   */
  ANCS_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * A bug: an unexpected panic was caught at the language boundary.
   */
  ANCS_STATUS_INTERNAL_ERROR = 6,
} AncsStatus;

/**
 * Opaque handle to a generalized-coherent-state family.
 */
typedef struct AncsFamily AncsFamily;

/**
 * Vacuum-versus-state discrimination summary at one mean count.
 */
typedef struct AncsHelstrom {
  /**
   * Mean count of the prepared state, before detector losses.
   */
  double nbar;
  /**
   * Detection efficiency used for the evaluation.
   */
  double eta;
  /**
   * Prior weight of the vacuum hypothesis.
   */
  double xi0;
  /**
   * Squared vacuum overlap of the detected state.
   */
  double overlap_sq;
  /**
   * Minimum error probability over all quantum measurements.
   */
  double p_h;
  /**
   * Overlap excess relative to a Poissonian state of the same
   * detected mean; its sign classifies the family.
   */
  double delta;
} AncsHelstrom;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static NUL-terminated string.
 */
const char *ancs_version(void);

/**
 * Returns a static NUL-terminated description of a status code.
 */
const char *ancs_status_message(enum AncsStatus status);

/**
 * Creates a family handle and stores it in `*out`.
 *
 * `kind` selects the family: `"gs"`, `"spin"`, `"perelomov"`,
 * `"barut_girardello"`, `"hermite"`, `"abel"`, `"sg"`, or `"sgm"`.
 * Families with a parameter take exactly one: `n_j` for spin, `kappa`
 * for perelomov and barut_girardello, `a` for hermite, `beta` for abel.
 * Pass it as `param_name`/`param_value`; pass a null `param_name` (the
 * value is then ignored) for the parameter-free kinds.
 *
 * On success the handle must be released with [`ancs_family_free`].
 *
 * # Safety
 *
 * `kind` and a non-null `param_name` must point to NUL-terminated
 * strings, and `out` must be valid for writing one pointer.
 */
enum AncsStatus ancs_family_new(const char *kind,
                                const char *param_name,
                                double param_value,
                                struct AncsFamily **out);

/**
 * Releases a handle created by [`ancs_family_new`]. Null is ignored.
 *
 * # Safety
 *
 * `fam` must be null or a handle not yet freed; the handle must not be
 * used afterwards.
 */
void ancs_family_free(struct AncsFamily *fam);

/**
 * Returns the family's kind name as a static NUL-terminated string, or
 * null if the handle is null.
 *
 * # Safety
 *
 * `fam` must be null or a live handle.
 */
const char *ancs_family_kind(const struct AncsFamily *fam);

/**
 * Writes the squared convergence radius of the family's intensity
 * domain to `*out` (infinity when the domain is the whole half-line).
 *
 * # Safety
 *
 * `fam` must be a live handle and `out` valid for writing one double.
 */
enum AncsStatus ancs_family_radius_sq(const struct AncsFamily *fam, double *out);

/**
 * Writes the mean photon number at intensity `u` to `*out`.
 *
 * # Safety
 *
 * `fam` must be a live handle and `out` valid for writing one double.
 */
enum AncsStatus ancs_nbar(const struct AncsFamily *fam, double u, double *out);

/**
 * Writes the Mandel parameter at intensity `u` to `*out`.
 *
 * # Safety
 *
 * `fam` must be a live handle and `out` valid for writing one double.
 */
enum AncsStatus ancs_mandel_q(const struct AncsFamily *fam, double u, double *out);

/**
 * Writes the intensity that realizes mean photon number `nbar` to
 * `*out`. Fails with a domain error when no intensity reaches `nbar`.
 *
 * # Safety
 *
 * `fam` must be a live handle and `out` valid for writing one double.
 */
enum AncsStatus ancs_u_of_nbar(const struct AncsFamily *fam, double nbar, double *out);

/**
 * Fills `buf` with the photon-number distribution at intensity `u`,
 * detected with efficiency `eta` (pass 1 for ideal detection). The
 * probabilities start at count zero and are truncated where the summed
 * tail is negligible; `*out_len` always receives the full length, so a
 * call with `cap = 0` sizes the buffer.
 *
 * # Safety
 *
 * `fam` must be a live handle, `out_len` valid for writing one size,
 * and `buf` valid for writing `cap` doubles (null is allowed when `cap`
 * is 0).
 */
enum AncsStatus ancs_distribution(const struct AncsFamily *fam,
                                  double u,
                                  double eta,
                                  double *buf,
                                  size_t cap,
                                  size_t *out_len);

/**
 * Evaluates the binary discrimination summary against the vacuum at
 * mean count `nbar`, vacuum prior `xi0` in (0, 1), and detection
 * efficiency `eta` in (0, 1], writing the record to `*out`.
 *
 * # Safety
 *
 * `fam` must be a live handle and `out` valid for writing one record.
 */
enum AncsStatus ancs_helstrom(const struct AncsFamily *fam,
                              double nbar,
                              double xi0,
                              double eta,
                              struct AncsHelstrom *out);

/**
 * Finds the mean counts in `[nbar_lo, nbar_hi]` where the equal-prior
 * discrimination bound vanishes (only the oscillatory families have
 * any) and fills `buf` with them in increasing order. `*out_len` always
 * receives the full count, so a call with `cap = 0` sizes the buffer.
 *
 * # Safety
 *
 * `fam` must be a live handle, `out_len` valid for writing one size,
 * and `buf` valid for writing `cap` doubles (null is allowed when `cap`
 * is 0).
 */
enum AncsStatus ancs_bound_zeros(const struct AncsFamily *fam,
                                 double nbar_lo,
                                 double nbar_hi,
                                 double *buf,
                                 size_t cap,
                                 size_t *out_len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ANCS_H */
