#ifndef PADIC_SIEGEL_H
#define PADIC_SIEGEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsOutcome {
  PS_OUTCOME_PASS = 0,
  PS_OUTCOME_FAIL = 2,
  PS_OUTCOME_PRECISION_INSUFFICIENT = 3,
} PsOutcome;

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_PRECONDITION = 3,
  PS_STATUS_COMPUTATION = 4,
  PS_STATUS_PRECISION_LOSS = 5,
  PS_STATUS_PANIC = 6,
} PsStatus;

// A Dirichlet character mod p with values in Q(ζ_{p-1}).
typedef struct PsCharacter PsCharacter;

// A finished lab report.
typedef struct PsReport PsReport;

// A degree-2 Siegel expansion with coefficients in Q(ζ_{p-1}).
typedef struct PsSeries PsSeries;

// Parameters of a convergence run. `a = 0` selects the smallest admissible a.
typedef struct PsRunConfig {
  uint64_t p;
  const struct PsCharacter *chi;
  size_t sigma_index;
  uint64_t a;
  uint32_t m_max;
  size_t trunc;
  uint32_t prec;
  // Permit m_max above 3.
  bool allow_large;
} PsRunConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *ps_version(void);

// Copy of the last error message on this thread, or NULL. Free with `ps_string_free`.
char *ps_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library.
void ps_string_free(char *s);

// The character of (Z/p)^× sending the smallest primitive root to ζ_{p-1}^t.
//
// # Safety
// `out` must be valid for writes.
enum PsStatus ps_character_new(uint64_t p, uint64_t t, struct PsCharacter **out);

// Parses "p:t".
//
// # Safety
// `spec` must be a nul-terminated string and `out` valid for writes.
enum PsStatus ps_character_parse(const char *spec, struct PsCharacter **out);

// # Safety
// `chi` must be a live handle and `out` valid for writes.
enum PsStatus ps_character_inverse(const struct PsCharacter *chi, struct PsCharacter **out);

// Order of the character, or 0 for a NULL handle.
//
// # Safety
// `chi` must be NULL or a live handle.
uint64_t ps_character_order(const struct PsCharacter *chi);

// # Safety
// `chi` must be NULL or a handle not yet freed.
void ps_character_free(struct PsCharacter *chi);

// Sorted roots of Φ_{p-1} mod p. Writes at most `capacity` roots; `out_len` receives the count.
//
// # Safety
// `roots` must hold `capacity` values (or be NULL with capacity 0); `out_len` valid for writes.
enum PsStatus ps_cyclotomic_roots(uint64_t p, uint64_t *roots, size_t capacity, size_t *out_len);

// Convergence run for G_{k_m}, m = 1..=m_max.
//
// # Safety
// `cfg` must point to a valid config with a live `chi`; `out` valid for writes.
enum PsStatus ps_theorem2_run(const struct PsRunConfig *cfg, struct PsReport **out);

// Product run of `f` against the sequence configured by `cfg_inverse`.
//
// # Safety
// `f` must be a live handle, `cfg_inverse` a valid config, `out` valid for writes.
enum PsStatus ps_theorem1_run(const struct PsSeries *f,
                              const struct PsRunConfig *cfg_inverse,
                              struct PsReport **out);

// # Safety
// `report` must be a live handle.
enum PsStatus ps_report_outcome(const struct PsReport *report, enum PsOutcome *out);

// Number of stages, or 0 for a NULL handle.
//
// # Safety
// `report` must be NULL or a live handle.
size_t ps_report_stage_count(const struct PsReport *report);

// Minimum valuation of stage `index`; `capped` is set when only a lower bound is known.
//
// # Safety
// `report` must be a live handle; `value` and `capped` valid for writes.
enum PsStatus ps_report_min_valuation(const struct PsReport *report,
                                      size_t index,
                                      int64_t *value,
                                      bool *capped);

// Report as JSON. Free with `ps_string_free`.
//
// # Safety
// `report` must be a live handle and `out` valid for writes.
enum PsStatus ps_report_to_json(const struct PsReport *report, char **out);

// # Safety
// `report` must be NULL or a handle not yet freed.
void ps_report_free(struct PsReport *report);

// The exact series G_{k_m} of a configured run.
//
// # Safety
// `cfg` must be a valid config and `out` valid for writes.
enum PsStatus ps_build_g(const struct PsRunConfig *cfg, uint32_t m, struct PsSeries **out);

// # Safety
// `json` must be a nul-terminated string and `out` valid for writes.
enum PsStatus ps_series_from_json(const char *json, struct PsSeries **out);

// # Safety
// `series` must be a live handle and `out` valid for writes.
enum PsStatus ps_series_to_json(const struct PsSeries *series, char **out);

// Whether σ_i(G) ≡ 1 mod p on the stored support.
//
// # Safety
// `series` must be a live handle and `holds` valid for writes.
enum PsStatus ps_unit_congruence(const struct PsSeries *series,
                                 uint64_t p,
                                 size_t sigma_index,
                                 uint32_t prec,
                                 bool *holds);

// # Safety
// `series` must be NULL or a handle not yet freed.
void ps_series_free(struct PsSeries *series);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_SIEGEL_H */
