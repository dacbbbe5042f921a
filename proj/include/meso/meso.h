#ifndef MESO_MESO_H
#define MESO_MESO_H

/* C interface to the meso-scale solver.
 *
 * Units: moduli in GPa, lengths in the units of the cluster file. Every call
 * returns a meso_status; on failure meso_last_error() describes the problem
 * for the calling thread. Strings handed out by the library are released with
 * meso_string_free, handles with their *_free function. */

#include <stddef.h>

#if defined(MESO_BUILDING_LIBRARY)
#define MESO_API __attribute__((visibility("default")))
#else
#define MESO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum meso_status {
  MESO_OK = 0,
  MESO_ERR_INVALID_ARGUMENT = 1,
  MESO_ERR_INCOMPATIBLE = 2,
  MESO_ERR_PARSE = 3,
  MESO_ERR_IO = 4,
  MESO_ERR_VALIDATION = 5,
  MESO_ERR_SINGULAR = 6,
  MESO_ERR_DIVERGED = 7,
  MESO_ERR_NOT_CONVERGED = 8,
  MESO_ERR_INTERNAL = 9
} meso_status;

typedef struct meso_cluster meso_cluster;
typedef struct meso_coeffs meso_coeffs;

MESO_API const char* meso_version(void);
MESO_API const char* meso_status_name(meso_status status);
/* Message of the last failed call on this thread; "" after success. */
MESO_API const char* meso_last_error(void);
/* 1-based line of the last parse error, 0 if unknown. */
MESO_API size_t meso_last_error_line(void);
MESO_API void meso_string_free(char* s);

/* 0 restores the default (available cores). */
MESO_API void meso_set_threads(unsigned count);

/* Shear modulus of a built-in material; "void" gives 0. */
MESO_API meso_status meso_material_shear(const char* name, double* shear_gpa);

/* ---- clusters ---------------------------------------------------------- */

/* With strict != 0, overlaps and inclusions outside the domain fail with
 * MESO_ERR_VALIDATION; otherwise they are kept for meso_cluster_validate. An
 * eps/d ratio above the threshold is never an error. */
MESO_API meso_status meso_cluster_load(const char* path, double ratio_threshold, int strict,
                                       meso_cluster** out);
MESO_API meso_status meso_cluster_parse(const char* text, double ratio_threshold, int strict,
                                        meso_cluster** out);
/* Periodic cluster in the whole space (matrix `matrix`) with background
 * x_1 / mu_O. */
MESO_API meso_status meso_cluster_generate(int n1, double beta, const char* material,
                                           const char* matrix, meso_cluster** out);
MESO_API void meso_cluster_free(meso_cluster* cluster);
MESO_API meso_status meso_cluster_serialize(const meso_cluster* cluster, char** json);

MESO_API size_t meso_cluster_size(const meso_cluster* cluster);
/* d is +inf for a single inclusion. */
MESO_API meso_status meso_cluster_metrics(const meso_cluster* cluster, double* epsilon,
                                          double* d, size_t* count);
MESO_API meso_status meso_cluster_inclusion(const meso_cluster* cluster, size_t index,
                                            double center[3], double* radius,
                                            double* shear_gpa);
/* Matrix shear modulus and ball radius (+inf for the whole space). */
MESO_API meso_status meso_cluster_domain(const meso_cluster* cluster, double* matrix_shear,
                                         double* radius);
/* Re-runs admissibility with the given threshold. The report is JSON. */
MESO_API meso_status meso_cluster_validate(const meso_cluster* cluster, double ratio_threshold,
                                           int* admissible, char** report_json);

/* ---- interaction system ------------------------------------------------ */

/* method: "direct", "neumann" or "auto" (direct while 3N <= 20000). */
MESO_API meso_status meso_solve(const meso_cluster* cluster, const char* method, double tol,
                                int max_iter, meso_coeffs** out);
MESO_API meso_status meso_contraction_norm(const meso_cluster* cluster, int iters,
                                           double* value);
MESO_API meso_status meso_stability_ratio(const meso_cluster* cluster,
                                          const meso_coeffs* coeffs, double* value);

MESO_API meso_status meso_coeffs_load(const char* path, meso_coeffs** out);
MESO_API meso_status meso_coeffs_parse(const char* csv, meso_coeffs** out);
MESO_API void meso_coeffs_free(meso_coeffs* coeffs);
MESO_API meso_status meso_coeffs_serialize(const meso_coeffs* coeffs, char** csv);
MESO_API size_t meso_coeffs_size(const meso_coeffs* coeffs);
MESO_API meso_status meso_coeffs_get(const meso_coeffs* coeffs, size_t index, double c[3]);
/* method stays owned by the handle. */
MESO_API meso_status meso_coeffs_info(const meso_coeffs* coeffs, const char** method,
                                      int* iterations, double* residual);

/* ---- evaluation -------------------------------------------------------- */

MESO_API meso_status meso_eval(const meso_cluster* cluster, const meso_coeffs* coeffs,
                               const double x[3], double* u, double grad[3]);
/* axis is the plane normal (0, 1, 2); u and v are the remaining axes in
 * increasing order. Rows: v outer, u inner. */
MESO_API meso_status meso_eval_plane_csv(const meso_cluster* cluster, const meso_coeffs* coeffs,
                                         int axis, double offset, double u_min, double u_max,
                                         double v_min, double v_max, int nu, int nv,
                                         char** csv);
MESO_API meso_status meso_eval_line_csv(const meso_cluster* cluster, const meso_coeffs* coeffs,
                                        const double from[3], const double to[3], int samples,
                                        char** csv);

/* ---- homogenisation ---------------------------------------------------- */

typedef struct meso_medium {
  double effective_shear;
  double q; /* diagonal entry of Q */
  double regime_indicator;
  int regime_warning;
} meso_medium;

MESO_API meso_status meso_effective_medium(double b, double mu_o, double mu_i,
                                           meso_medium* out);

typedef struct meso_homog_options {
  int n1;
  double beta;
  const char* material;
  const char* matrix;
  int samples;
  double x_min;
  double x_max;
  const char* method; /* "neumann" or "direct" */
  double tol;
  int max_iter;
} meso_homog_options;

typedef struct meso_homog_summary {
  size_t count;
  double b;
  double effective_shear;
  double sup_gap;
  double sup_gap_homog_coeffs;
  double coefficient_gap;
  double stability;
  int regime_warning;
} meso_homog_summary;

MESO_API void meso_homog_default_options(meso_homog_options* options);
/* csv may be NULL. */
MESO_API meso_status meso_homog_compare(const meso_homog_options* options,
                                        meso_homog_summary* summary, char** csv);

/* ---- diagnostics ------------------------------------------------------- */

/* ok is 1 when interface continuity and the solver residual both pass. */
MESO_API meso_status meso_check(const meso_cluster* cluster, const meso_coeffs* coeffs,
                                size_t samples_per_inclusion, int* ok, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
