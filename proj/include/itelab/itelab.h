/* C interface to the equilibration laboratory.
 *
 * All functions return an ite_status (0 on success) unless noted. On failure
 * the thread-local message from ite_last_error() describes the problem.
 * Handles are opaque; free them with the matching *_free function. Output
 * buffers are caller-allocated at the documented sizes.
 */
#ifndef ITELAB_H
#define ITELAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ite_status {
    ITE_OK = 0,
    ITE_INVALID_INPUT = 2, /* bad arguments, bad config, capacity guards */
    ITE_NUMERIC = 3,       /* eigensolver or tolerance failure */
    ITE_CHECK_FAILED = 4   /* --check style assertion did not hold */
} ite_status;

typedef struct ite_hamiltonian ite_hamiltonian;
typedef struct ite_spectrum ite_spectrum;

/* Library version string; static storage. */
const char* ite_version(void);

/* Message for the most recent failure on this thread; static storage,
 * overwritten by the next failing call. Empty string if none. */
const char* ite_last_error(void);

/* Builds or samples a Hamiltonian from an ensemble-spec JSON document
 * (e.g. {"variant":"gue","D":8}). */
ite_status ite_hamiltonian_create(const char* spec_json, uint64_t master_seed,
                                  uint64_t stream_index, ite_hamiltonian** out);
ite_status ite_hamiltonian_dim(const ite_hamiltonian* h, int* out_dim);
/* Copies the D x D matrix into out, row-major, interleaved re/im:
 * out must hold 2*D*D doubles. */
ite_status ite_hamiltonian_entries(const ite_hamiltonian* h, double* out);
/* Writes the binary dump plus its JSON sidecar at path / path+".json". */
ite_status ite_hamiltonian_dump(const ite_hamiltonian* h, const char* path);
void ite_hamiltonian_free(ite_hamiltonian* h);

ite_status ite_diagonalize(const ite_hamiltonian* h, ite_spectrum** out);
ite_status ite_spectrum_dim(const ite_spectrum* s, int* out_dim);
/* Ascending eigenvalues; out must hold D doubles. */
ite_status ite_spectrum_energies(const ite_spectrum* s, double* out);
/* Outcome distribution Pr(k | exp(-iHt) |x>); out must hold D doubles. */
ite_status ite_evolve_probabilities(const ite_spectrum* s, int x, double t, double* out);
void ite_spectrum_free(ite_spectrum* s);

/* Variance of a probability vector around 1/dim. */
ite_status ite_outcome_variance(const double* probs, int dim, double* out);
/* L1 distance of a probability vector from uniform. */
ite_status ite_l1_distance_to_uniform(const double* probs, int dim, double* out);

/* Runs a named experiment ("spread", "scaling", "formfactor", "haar-verify",
 * "distinguish", "dump-hamiltonian"). config_json may be NULL or empty to use
 * the built-in default config. Writes CSV/SVG outputs and a manifest into
 * out_dir. The returned status doubles as the process exit code. */
ite_status ite_run_command(const char* name, const char* config_json, const char* out_dir,
                           uint64_t master_seed, int threads, int no_plot, int check_mode);

/* Default config JSON for a named experiment; static storage per name.
 * NULL for unknown names. */
const char* ite_default_config(const char* name);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ITELAB_H */
